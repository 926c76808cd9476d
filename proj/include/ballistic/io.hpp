#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ballistic/operators.hpp"
#include "ballistic/spectral.hpp"
#include "ballistic/transport.hpp"

namespace ballistic {

/// State dump: header `index,n_1,...,n_d,re,im`, one row per site,
/// lexicographic order. Floats as shortest round-trip decimals throughout.
void write_state_csv(std::ostream& os, const LatticeState& state, const std::string& config_hash = {});

/// Potential dump: `index,n_1..n_d,value`.
void write_potential_csv(std::ostream& os, const PotentialField& field, const std::string& config_hash = {});

/// Dense operator dump: row-major `n,m,value`.
void write_dense_csv(std::ostream& os, const DenseOperator& op, const std::string& config_hash = {});

/// Eigenvalue dump: `k,lambda,ipr,boundary_weight`.
void write_eigs_csv(std::ostream& os, const SpectralDecomposition& dec, const ModeStats& stats,
                    const std::string& config_hash = {});

/// Series dump: `t,r=...,...,ball_N...`, config hash in the header comment.
void write_series_csv(std::ostream& os, const MomentSeries& series);

LatticeState read_state_csv(std::istream& is, GeometryPtr geometry);

void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);
std::uint64_t file_checksum(const std::filesystem::path& path);

} // namespace ballistic
