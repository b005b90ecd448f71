#pragma once

#include <string>
#include <vector>

#include "mkin/grid.hpp"
#include "mkin/solver.hpp"

// Snapshot format MKIN1 (little-endian):
//   bytes 0..4   magic "MKIN1"
//   int32        dim_x
//   int32        n_x
//   int32        n_v
//   float64      l_v
//   float64      time
//   float64[]    values, row major, x slowest / v2 fastest

namespace mkin {

void write_snapshot(const std::string& path, const Field& f);
Field read_snapshot(const std::string& path);

void write_density_csv(const std::string& path, const Field& f,
                       const std::string& header_comment = "");

void write_diagnostics_csv(const std::string& path, const std::vector<StepDiagnostics>& series,
                           const std::string& header_comment = "");

// FNV-1a over the given bytes; used to stamp outputs with the config identity.
std::uint64_t fnv1a(const std::string& bytes, std::uint64_t seed = 1469598103934665603ull);

}  // namespace mkin
