#include "ballistic/io.hpp"

#include <fstream>
#include <sstream>

#include "ballistic/util.hpp"

namespace ballistic {

namespace {

void hash_comment(std::ostream& os, const std::string& config_hash) {
    if (!config_hash.empty()) os << "# config_hash=" << config_hash << "\n";
}

void site_columns(std::ostream& os, int d) {
    for (int j = 1; j <= d; ++j) os << ",n_" << j;
}

} // namespace

void write_state_csv(std::ostream& os, const LatticeState& state, const std::string& config_hash) {
    const BoxGeometry& g = state.geometry();
    hash_comment(os, config_hash);
    os << "index";
    site_columns(os, g.dimension());
    os << ",re,im\n";
    for (std::int64_t i = 0; i < g.total_sites(); ++i) {
        os << i;
        for (int c : g.site_of(i)) os << ',' << c;
        os << ',' << format_double(state[i].real()) << ',' << format_double(state[i].imag()) << '\n';
    }
}

void write_potential_csv(std::ostream& os, const PotentialField& field, const std::string& config_hash) {
    const BoxGeometry& g = field.geometry();
    hash_comment(os, config_hash);
    os << "index";
    site_columns(os, g.dimension());
    os << ",value\n";
    for (std::int64_t i = 0; i < g.total_sites(); ++i) {
        os << i;
        for (int c : g.site_of(i)) os << ',' << c;
        os << ',' << format_double(field[i]) << '\n';
    }
}

void write_dense_csv(std::ostream& os, const DenseOperator& op, const std::string& config_hash) {
    hash_comment(os, config_hash);
    os << "n,m,value\n";
    for (Eigen::Index r = 0; r < op.mat.rows(); ++r)
        for (Eigen::Index c = 0; c < op.mat.cols(); ++c)
            os << r << ',' << c << ',' << format_double(op.mat(r, c)) << '\n';
}

void write_eigs_csv(std::ostream& os, const SpectralDecomposition& dec, const ModeStats& stats,
                    const std::string& config_hash) {
    hash_comment(os, config_hash);
    os << "k,lambda,ipr,boundary_weight\n";
    for (Eigen::Index k = 0; k < dec.eigenvalues.size(); ++k)
        os << k << ',' << format_double(dec.eigenvalues[k]) << ','
           << format_double(stats.ipr[static_cast<std::size_t>(k)]) << ','
           << format_double(stats.boundary_weight[static_cast<std::size_t>(k)]) << '\n';
}

void write_series_csv(std::ostream& os, const MomentSeries& series) {
    hash_comment(os, series.provenance);
    os << 't';
    for (double r : series.orders) os << ",r=" << format_double(r);
    for (int n : series.ball_radii) os << ",ball_N" << n;
    os << '\n';
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        os << format_double(series.times[i]);
        for (double v : series.norms[i]) os << ',' << format_double(v);
        for (double v : series.ball[i]) os << ',' << format_double(v);
        os << '\n';
    }
}

LatticeState read_state_csv(std::istream& is, GeometryPtr geometry) {
    LatticeState state = LatticeState::zero(std::move(geometry));
    const std::int64_t n = state.geometry().total_sites();
    std::string line;
    std::int64_t row = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("index", 0) == 0) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < 3) throw std::invalid_argument("state csv: malformed row '" + line + "'");
        const auto idx = static_cast<std::int64_t>(parse_double(cells[0]));
        if (idx < 0 || idx >= n) throw std::invalid_argument("state csv: index out of range");
        state[idx] = cplx(parse_double(cells[cells.size() - 2]), parse_double(cells[cells.size() - 1]));
        ++row;
    }
    if (row != n) throw std::invalid_argument("state csv: expected " + std::to_string(n) + " rows, found " +
                                              std::to_string(row));
    return state;
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << contents;
    os.close();
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::uint64_t file_checksum(const std::filesystem::path& path) { return fnv1a64(read_text_file(path)); }

} // namespace ballistic
