#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ballistic/io.hpp"
#include "ballistic/propagation.hpp"
#include "ballistic/runner.hpp"
#include "ballistic/verification.hpp"

namespace py = pybind11;
using namespace ballistic;

namespace {

py::array_t<std::complex<double>> amplitudes_array(const LatticeState& s) {
    const auto amp = s.amplitudes();
    py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(amp.size()));
    std::copy(amp.begin(), amp.end(), out.mutable_data());
    return out;
}

void set_amplitudes(LatticeState& s, py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> a) {
    if (a.ndim() != 1 || a.shape(0) != static_cast<py::ssize_t>(s.amplitudes().size()))
        throw std::invalid_argument("amplitude array must be 1-d with total_sites entries");
    std::copy(a.data(), a.data() + a.shape(0), s.amplitudes().begin());
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Matrix-free simulator and verification harness for transport of discrete "
              "Schrodinger operators H = -Delta + V on truncated boxes of Z^d";
    m.attr("__version__") = kVersion;

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<NormDriftError>(m, "NormDriftError");

    py::class_<BoxGeometry, GeometryPtr>(m, "BoxGeometry")
        .def(py::init([](int dimension, int radius) { return make_geometry(dimension, radius); }),
             py::arg("dimension"), py::arg("radius"))
        .def_property_readonly("dimension", &BoxGeometry::dimension)
        .def_property_readonly("radius", &BoxGeometry::radius)
        .def_property_readonly("total_sites", &BoxGeometry::total_sites)
        .def("index_of",
             [](const BoxGeometry& g, const std::vector<int>& site) -> py::object {
                 auto idx = g.index_of(site);
                 if (!idx) return py::none();
                 return py::int_(*idx);
             })
        .def("site_of", &BoxGeometry::site_of)
        .def("__repr__", [](const BoxGeometry& g) {
            return "BoxGeometry(dimension=" + std::to_string(g.dimension()) +
                   ", radius=" + std::to_string(g.radius()) + ")";
        });

    py::class_<LatticeState>(m, "LatticeState")
        .def(py::init([](GeometryPtr g) { return LatticeState::zero(std::move(g)); }), py::arg("geometry"))
        .def_static("delta",
                    [](GeometryPtr g, const std::vector<int>& site) { return LatticeState::delta(std::move(g), site); },
                    py::arg("geometry"), py::arg("site"))
        .def_static("gaussian",
                    [](GeometryPtr g, const std::vector<int>& center, double width,
                       const std::vector<double>& momentum) {
                        return LatticeState::gaussian(std::move(g), center, width, momentum);
                    },
                    py::arg("geometry"), py::arg("center"), py::arg("width"),
                    py::arg("momentum") = std::vector<double>{})
        .def_static("random_normalized", &LatticeState::random_normalized, py::arg("geometry"), py::arg("seed"))
        .def_property("amplitudes", &amplitudes_array, &set_amplitudes)
        .def_property_readonly("geometry", [](const LatticeState& s) { return s.geometry_ptr(); })
        .def("norm", &LatticeState::norm)
        .def("normalize", &LatticeState::normalize);

    m.def("weighted_norm", &weighted_norm, py::arg("state"), py::arg("r"));
    m.def("moment_sum", &moment_sum, py::arg("state"), py::arg("r"));
    m.def("ball_probability", &ball_probability, py::arg("state"), py::arg("radius"));
    m.def("second_moment", &second_moment, py::arg("state"));

    py::class_<PotentialField>(m, "PotentialField")
        .def_property_readonly("values",
                               [](const PotentialField& f) {
                                   py::array_t<double> out(static_cast<py::ssize_t>(f.values().size()));
                                   std::copy(f.values().begin(), f.values().end(), out.mutable_data());
                                   return out;
                               })
        .def_property_readonly("sup_norm", &PotentialField::sup_norm)
        .def_property_readonly("geometry", [](const PotentialField& f) { return f.geometry_ptr(); });

    m.def("zero_potential", [] { return PotentialSpec(ZeroPotential{}); });
    m.def("power_law_potential", [](double c, double alpha) { return PotentialSpec(PowerLawPotential{c, alpha}); },
          py::arg("c"), py::arg("alpha"));
    m.def("wigner_von_neumann_potential",
          [](double c, double k) { return PotentialSpec(WignerVonNeumannPotential{c, k}); }, py::arg("c"),
          py::arg("k"));
    m.def("anderson_potential",
          [](double lam, std::uint64_t seed) { return PotentialSpec(AndersonPotential{lam, seed}); },
          py::arg("lambda_"), py::arg("seed"));
    m.def("periodic_potential", [](std::vector<double> p) { return PotentialSpec(PeriodicPotential{std::move(p)}); },
          py::arg("pattern"));
    py::class_<PotentialSpec>(m, "PotentialSpec")
        .def_property_readonly("family", [](const PotentialSpec& s) { return family_name(s); });
    m.def("realize", &realize, py::arg("spec"), py::arg("geometry"));
    m.def("decay_profile", [](const PotentialField& f) {
        std::vector<std::pair<int, double>> out;
        for (const auto& p : decay_profile(f)) out.emplace_back(p.radius, p.value);
        return out;
    });

    py::class_<Hamiltonian>(m, "Hamiltonian")
        .def(py::init<PotentialField>(), py::arg("potential"))
        .def_property_readonly("potential", &Hamiltonian::potential)
        .def("apply", &apply_hamiltonian, py::arg("state"));
    m.def("free_hamiltonian", &free_hamiltonian, py::arg("geometry"));

    m.def("apply_laplacian", &apply_laplacian);
    m.def("apply_weight_q", &apply_weight_q);
    m.def("apply_q_squared", &apply_q_squared);
    m.def("apply_commutator_q_h", &apply_commutator_q_h, py::arg("h"), py::arg("state"));
    m.def("apply_dilation", &apply_dilation, py::arg("h"), py::arg("state"));
    m.def("apply_double_commutator", &apply_double_commutator, py::arg("h"), py::arg("state"));
    m.def("apply_double_commutator_bulk", &apply_double_commutator_bulk, py::arg("h"), py::arg("state"));
    m.def("commutator_q_h_norm",
          [](const Hamiltonian& h, int iters) { return commutator_q_h_norm(h, iters).value; }, py::arg("h"),
          py::arg("max_iterations") = 3000);
    m.def("materialize_dense",
          [](const Hamiltonian& h) {
              return materialize_dense([&h](const LatticeState& s) { return apply_hamiltonian(h, s); },
                                       h.geometry_ptr(), "H")
                  .mat;
          },
          py::arg("h"));

    py::class_<SpectralBounds>(m, "SpectralBounds")
        .def_readonly("e_min", &SpectralBounds::e_min)
        .def_readonly("e_max", &SpectralBounds::e_max);
    m.def("estimate_spectral_bounds", &estimate_spectral_bounds);
    m.def("light_cone_horizon",
          [](const GeometryPtr& g, int support, double safety) { return light_cone_horizon(*g, support, safety); },
          py::arg("geometry"), py::arg("initial_support_radius"), py::arg("safety") = 0.9);
    m.def("support_radius", &support_radius);

    py::class_<ChebyshevPlan>(m, "ChebyshevPlan")
        .def_readonly("tau", &ChebyshevPlan::tau)
        .def_readonly("order", &ChebyshevPlan::order)
        .def_readonly("tolerance", &ChebyshevPlan::tolerance);
    m.def("plan_chebyshev", &plan_chebyshev, py::arg("bounds"), py::arg("tau"), py::arg("tolerance") = 1e-14);

    py::class_<ChebyshevPropagator>(m, "ChebyshevPropagator")
        .def(py::init([](const Hamiltonian& h, double tau, double tol) {
                 return ChebyshevPropagator(h, tau > 0 ? tau : ChebyshevPropagator::default_tau(
                                                                   estimate_spectral_bounds(h)),
                                            tol);
             }),
             py::arg("h"), py::arg("tau") = -1.0, py::arg("tolerance") = 1e-14, py::keep_alive<1, 2>())
        .def_property_readonly("base_tau", &ChebyshevPropagator::base_tau)
        .def("advance", &ChebyshevPropagator::advance, py::arg("state"), py::arg("dt"));
    m.def("propagate", &propagate, py::arg("h"), py::arg("plan"), py::arg("state"));

    py::class_<EnergyInterval>(m, "EnergyInterval")
        .def(py::init<double, double, bool, bool>(), py::arg("lo"), py::arg("hi"), py::arg("lo_closed") = true,
             py::arg("hi_closed") = true)
        .def_static("j_theta", &EnergyInterval::j_theta, py::arg("theta"), py::arg("dimension"))
        .def_readonly("lo", &EnergyInterval::lo)
        .def_readonly("hi", &EnergyInterval::hi)
        .def("contains", &EnergyInterval::contains);

    py::class_<SpectralDecomposition, std::shared_ptr<SpectralDecomposition>>(m, "SpectralDecomposition")
        .def_readonly("eigenvalues", &SpectralDecomposition::eigenvalues)
        .def_readonly("eigenvectors", &SpectralDecomposition::eigenvectors)
        .def_readonly("residual", &SpectralDecomposition::residual);
    m.def("dense_eigendecomposition",
          [](const Hamiltonian& h, std::int64_t cap) {
              return std::make_shared<SpectralDecomposition>(dense_eigendecomposition(h, cap));
          },
          py::arg("h"), py::arg("dense_cap") = kDefaultDenseCap);
    m.def("spectral_projection_apply",
          [](const std::shared_ptr<SpectralDecomposition>& d, const EnergyInterval& w, const LatticeState& s) {
              return spectral_projection_apply(*d, w, s);
          });
    m.def("dense_oracle_propagate",
          [](const std::shared_ptr<SpectralDecomposition>& d, const LatticeState& s, double t) {
              return dense_oracle_propagate(*d, s, t);
          },
          py::arg("decomposition"), py::arg("state"), py::arg("t"));

    py::class_<MourreFormResult>(m, "MourreFormResult")
        .def_readonly("min_rayleigh", &MourreFormResult::min_rayleigh)
        .def_readonly("window_rank", &MourreFormResult::window_rank)
        .def_readonly("witness", &MourreFormResult::witness);
    m.def("mourre_form_min",
          [](const std::shared_ptr<SpectralDecomposition>& d, const Hamiltonian& h, const EnergyInterval& w) {
              return mourre_form_min(*d, h, w);
          });
    py::class_<CompactSplitReport>(m, "CompactSplitReport")
        .def_readonly("min_rayleigh_free", &CompactSplitReport::min_rayleigh_free)
        .def_readonly("compact_norm", &CompactSplitReport::compact_norm)
        .def_readonly("certified_bound", &CompactSplitReport::certified_bound)
        .def_readonly("rank_full", &CompactSplitReport::rank_full)
        .def_readonly("rank_free", &CompactSplitReport::rank_free);
    m.def("mourre_compact_split",
          [](const std::shared_ptr<SpectralDecomposition>& fd, const std::shared_ptr<SpectralDecomposition>& ud,
             const Hamiltonian& h, const EnergyInterval& w) { return mourre_compact_split(*fd, *ud, h, w); });
    py::class_<ShrinkScanRow>(m, "ShrinkScanRow")
        .def_readonly("delta", &ShrinkScanRow::delta)
        .def_readonly("rank", &ShrinkScanRow::rank)
        .def_readonly("compact_norm", &ShrinkScanRow::compact_norm)
        .def_readonly("min_rayleigh_free", &ShrinkScanRow::min_rayleigh_free)
        .def_readonly("certified_bound", &ShrinkScanRow::certified_bound)
        .def_readonly("below_half_theta", &ShrinkScanRow::below_half_theta);
    m.def("shrink_interval_scan",
          [](const std::shared_ptr<SpectralDecomposition>& fd, const std::shared_ptr<SpectralDecomposition>& ud,
             const Hamiltonian& h, const EnergyInterval& base, double e0, const std::vector<double>& deltas,
             double theta) { return shrink_interval_scan(*fd, *ud, h, base, e0, deltas, theta); });
    m.def("mode_delocalization", [](const std::shared_ptr<SpectralDecomposition>& d) {
        ModeStats s = mode_delocalization(*d);
        return std::make_pair(s.ipr, s.boundary_weight);
    });
    py::class_<AcSurrogateProjector>(m, "AcSurrogateProjector")
        .def_readonly("modes", &AcSurrogateProjector::modes)
        .def("empty", &AcSurrogateProjector::empty)
        .def("apply", &AcSurrogateProjector::apply);
    m.def("ac_surrogate_projection",
          [](const std::shared_ptr<SpectralDecomposition>& d, const EnergyInterval& w, double ipr, double bnd) {
              return ac_surrogate_projection(d, w, ipr, bnd);
          },
          py::arg("decomposition"), py::arg("interval"), py::arg("ipr_threshold"), py::arg("boundary_threshold"));

    py::class_<MomentSeries>(m, "MomentSeries")
        .def_readonly("orders", &MomentSeries::orders)
        .def_readonly("ball_radii", &MomentSeries::ball_radii)
        .def_readonly("times", &MomentSeries::times)
        .def_readonly("norm0", &MomentSeries::norm0)
        .def_readonly("norms", &MomentSeries::norms)
        .def_readonly("ball", &MomentSeries::ball)
        .def_readonly("horizon", &MomentSeries::horizon);
    m.def("record_moments",
          [](const Hamiltonian& h, const ChebyshevPropagator& prop, const LatticeState& u,
             const std::vector<double>& orders, const std::vector<double>& times, const std::vector<int>& radii,
             double horizon) { return record_moments(h, prop, u, orders, times, radii, horizon); },
          py::arg("h"), py::arg("propagator"), py::arg("initial"), py::arg("orders"), py::arg("times"),
          py::arg("ball_radii"), py::arg("horizon"));

    py::class_<ExponentFit>(m, "ExponentFit")
        .def_readonly("r", &ExponentFit::r)
        .def_readonly("slope", &ExponentFit::slope)
        .def_readonly("intercept", &ExponentFit::intercept)
        .def_readonly("residual_rms", &ExponentFit::residual_rms)
        .def_readonly("slope_spread", &ExponentFit::slope_spread)
        .def_readonly("ratio_min", &ExponentFit::ratio_min)
        .def_readonly("ratio_max", &ExponentFit::ratio_max)
        .def_readonly("n_samples", &ExponentFit::n_samples)
        .def("ballistic", &ExponentFit::ballistic, py::arg("tol") = 0.05);
    m.def("fit_transport_exponent", &fit_transport_exponent, py::arg("series"), py::arg("r"), py::arg("t_lo"),
          py::arg("t_hi"));

    py::class_<UpperBoundReport>(m, "UpperBoundReport")
        .def_readonly("c1_hat", &UpperBoundReport::c1_hat)
        .def_readonly("order1_violation", &UpperBoundReport::order1_violation)
        .def_readonly("order1_worst_margin", &UpperBoundReport::order1_worst_margin)
        .def_readonly("c2_min", &UpperBoundReport::c2_min)
        .def_readonly("c2_reference", &UpperBoundReport::c2_reference);
    m.def("check_upper_bounds", &check_upper_bounds, py::arg("series"), py::arg("h"), py::arg("initial"),
          py::arg("c1_hat") = -1.0);

    py::class_<HeisenbergCheck>(m, "HeisenbergCheck")
        .def_readonly("max_defect", &HeisenbergCheck::max_defect)
        .def_readonly("max_im", &HeisenbergCheck::max_im)
        .def_readonly("theta_eff", &HeisenbergCheck::theta_eff)
        .def_readonly("integral_margin", &HeisenbergCheck::integral_margin)
        .def_readonly("quadrature_converged", &HeisenbergCheck::quadrature_converged);
    m.def("heisenberg_expansion_check",
          [](const std::shared_ptr<SpectralDecomposition>& d, const Hamiltonian& h, const EnergyInterval& w,
             const LatticeState& u, const std::vector<double>& tg) {
              return heisenberg_expansion_check(*d, h, w, u, tg);
          });

    py::class_<CrossTermSeries>(m, "CrossTermSeries")
        .def_readonly("times", &CrossTermSeries::times)
        .def_readonly("c_abs", &CrossTermSeries::c_abs)
        .def_readonly("almost_orthog_fraction", &CrossTermSeries::almost_orthog_fraction)
        .def_readonly("norm1_bound", &CrossTermSeries::norm1_bound)
        .def_readonly("max_c_abs", &CrossTermSeries::max_c_abs);
    m.def("cross_term_series",
          [](const std::shared_ptr<SpectralDecomposition>& d, const EnergyInterval& wi, const EnergyInterval& wj,
             const LatticeState& u, const std::vector<double>& tg) { return cross_term_series(*d, wi, wj, u, tg); });

    py::class_<RageRadiusReport>(m, "RageRadiusReport")
        .def_readonly("radius", &RageRadiusReport::radius)
        .def_readonly("sup_ball", &RageRadiusReport::sup_ball)
        .def_readonly("time_avg_final", &RageRadiusReport::time_avg_final)
        .def_readonly("time_avg_half", &RageRadiusReport::time_avg_half)
        .def_readonly("tail_pointwise", &RageRadiusReport::tail_pointwise)
        .def_readonly("label", &RageRadiusReport::label);
    m.def("rage_diagnostics", &rage_diagnostics);

    py::class_<MomentInequalityReport>(m, "MomentInequalityReport")
        .def_readonly("jensen_checks", &MomentInequalityReport::jensen_checks)
        .def_readonly("jensen_violations", &MomentInequalityReport::jensen_violations)
        .def_readonly("interp_checks", &MomentInequalityReport::interp_checks)
        .def_readonly("interp_violations", &MomentInequalityReport::interp_violations);
    m.def("check_moment_inequalities", &check_moment_inequalities);

    // Experiment pipeline
    py::class_<RunResult>(m, "RunResult")
        .def_readonly("exit_code", &RunResult::exit_code)
        .def_readonly("failures", &RunResult::failures)
        .def_readonly("slope_r1", &RunResult::slope_r1)
        .def_property_readonly("out_dir", [](const RunResult& r) { return r.out_dir.string(); });
    m.def("run_config_file",
          [](const std::string& path, const std::string& out) {
              ExperimentConfig cfg = parse_config_file(path);
              return run_experiment(cfg, out);
          },
          py::arg("config_path"), py::arg("out_dir"));
    m.def("run_config_text",
          [](const std::string& text, const std::string& out) {
              ExperimentConfig cfg = parse_config(text);
              return run_experiment(cfg, out);
          },
          py::arg("config_text"), py::arg("out_dir"));
    m.def("config_hash", [](const std::string& text) { return parse_config(text).hash(); }, py::arg("config_text"));
    m.def("verify_suite", [](const std::string& suite) {
        std::vector<std::tuple<std::string, bool, double, std::string>> out;
        for (const auto& r : run_verify_suite(suite))
            out.emplace_back(r.name, r.pass || r.informational, r.measured, r.detail);
        return out;
    });
}
