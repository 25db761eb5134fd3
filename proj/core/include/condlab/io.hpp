#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "condlab/harness.hpp"
#include "condlab/linalg.hpp"
#include "condlab/metrics.hpp"
#include "condlab/network.hpp"
#include "condlab/scaling.hpp"

namespace condlab {

// Writes content to a temporary sibling and renames it over path, so a
// crash mid-write never leaves a truncated file.  IoError on failure.
void write_text_atomic(const std::string& path, const std::string& content);

// Shortest round-trippable decimal form of v ("%.17g").
std::string format_double(double v);

// FNV-1a digest of a byte string, as 16 hex characters.
std::string content_digest(std::string_view bytes);

// Every CSV starts with "# condlab <name> schema_version=<v>" followed by a
// header row; values use '.' decimals and "%.17g" formatting.
void write_metric_series_csv(const std::string& path, const std::string& name,
                             const MetricSeries& series);
void write_sweep_csv(const std::string& path,
                     const std::vector<SweepRow>& rows);
void write_phase_grid_csv(const std::string& path,
                          const std::vector<PhaseCell>& cells);
void write_matrix_csv(const std::string& path, const std::string& name,
                      const SymmetricMatrix& matrix);

// Parameter snapshot: meta header (m, d, seed, nu, eps, activation, t,
// format_version), the a vector on one row, then the rows of W.
struct ParamsSnapshot {
  NormalizedParams params;
  std::uint64_t seed = 0;
  double nu = 0.0;
  double eps = 0.0;
  std::string activation;
  double t = 0.0;
};

void save_params(const std::string& path, const NormalizedParams& params,
                 const ScalingConfig& scaling, std::uint64_t seed,
                 const std::string& activation, double t);
ParamsSnapshot load_params(const std::string& path);

}  // namespace condlab
