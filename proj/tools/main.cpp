#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "ballistic/propagation.hpp"
#include "ballistic/runner.hpp"
#include "ballistic/util.hpp"
#include "ballistic/verification.hpp"

namespace {

std::filesystem::path resolve_out(const std::string& explicit_out, const std::string& config_out) {
    if (!explicit_out.empty()) return explicit_out;
    std::filesystem::path base = config_out;
    if (const char* root = std::getenv("BALLISTIC_OUT_ROOT"); root && *root && base.is_relative())
        return std::filesystem::path(root) / base;
    return base;
}

int do_run(const std::string& config_path, const std::string& out_override) {
    ballistic::ExperimentConfig cfg = ballistic::parse_config_file(config_path);
    ballistic::RunResult res = ballistic::run_experiment(cfg, resolve_out(out_override, cfg.out));
    for (const auto& f : res.failures) std::cerr << "assertion: " << f << "\n";
    std::cout << "run " << (res.exit_code == 0 ? "ok" : "failed") << " -> " << res.out_dir.string()
              << " (config " << cfg.hash() << ")\n";
    return res.exit_code;
}

int do_verify(const std::string& suite) {
    const auto results = ballistic::run_verify_suite(suite);
    int fails = 0;
    for (const auto& r : results) {
        std::cout << ballistic::format_check_line(r) << "\n";
        if (!r.pass) ++fails;
    }
    std::cout << results.size() << " checks, " << fails << " failed\n";
    return fails == 0 ? ballistic::kExitOk : ballistic::kExitAssertion;
}

int do_sweep(const std::string& config_path, const std::string& axis, const std::string& values_csv, int workers,
             const std::string& out_override) {
    ballistic::ExperimentConfig cfg = ballistic::parse_config_file(config_path);
    std::vector<double> values;
    std::stringstream ss(values_csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) values.push_back(ballistic::parse_double(cell));
    if (values.empty()) throw ballistic::ConfigError("empty sweep axis grid", 0, "--values");
    const auto out = resolve_out(out_override, cfg.out + "_sweep_" + axis);
    const auto rows = ballistic::run_sweep(cfg, axis, values, workers, out);
    int bad = 0;
    for (const auto& row : rows) {
        std::cout << axis << "=" << ballistic::format_double(row.value) << "  exit=" << row.exit_code << "  "
                  << row.status << "\n";
        if (row.exit_code != 0) ++bad;
    }
    std::cout << "sweep -> " << out.string() << "\n";
    return bad == 0 ? ballistic::kExitOk : ballistic::kExitAssertion;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ballistic: matrix-free transport simulator and verification harness for discrete "
                 "Schrodinger operators on Z^d"};
    app.require_subcommand(1);

    std::string config_path, out_override, suite, axis, values;
    int workers = 1;

    auto* run_cmd = app.add_subcommand("run", "run a config-driven experiment");
    run_cmd->add_option("config", config_path, "experiment config file")->required();
    run_cmd->add_option("--out", out_override, "output directory override");

    auto* verify_cmd = app.add_subcommand("verify", "run a module invariant suite");
    verify_cmd->add_option("suite", suite, "operators|propagation|spectral|transport|all")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "run a config across an axis grid");
    sweep_cmd->add_option("config", config_path, "experiment config file")->required();
    sweep_cmd->add_option("--axis", axis, "alpha|lambda|theta|L|r")->required();
    sweep_cmd->add_option("--values", values, "comma-separated grid")->required();
    sweep_cmd->add_option("--workers", workers, "worker pool size");
    sweep_cmd->add_option("--out", out_override, "output directory override");

    try {
        app.parse(argc, argv);
        if (run_cmd->parsed()) return do_run(config_path, out_override);
        if (verify_cmd->parsed()) return do_verify(suite);
        if (sweep_cmd->parsed()) return do_sweep(config_path, axis, values, workers, out_override);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : ballistic::kExitConfig;
    } catch (const ballistic::ConfigError& e) {
        std::cerr << "config error";
        if (e.line > 0) std::cerr << " (line " << e.line << ")";
        if (!e.field.empty()) std::cerr << " [" << e.field << "]";
        std::cerr << ": " << e.what() << "\n";
        return ballistic::kExitConfig;
    } catch (const ballistic::NormDriftError& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return ballistic::kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ballistic::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ballistic::kExitAssertion;
    }
    return 0;
}
