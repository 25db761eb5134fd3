#pragma once

// Training data: storage, the label-weighted mean direction z that drives
// alignment, assumption checks, synthetic generation, and CSV round-trips.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "condlab/linalg.hpp"

namespace condlab {

struct Dataset {
  Dataset() = default;
  // x is n*d row-major; throws DimensionMismatch on inconsistent sizes and
  // ParseError on non-finite entries.
  Dataset(std::size_t n, std::size_t d, Vec x, Vec y);

  std::size_t n() const { return n_; }
  std::size_t d() const { return d_; }
  std::span<const double> input(std::size_t i) const {
    return {x_.data() + i * d_, d_};
  }
  double label(std::size_t i) const { return y_[i]; }
  const Vec& inputs_flat() const { return x_; }
  const Vec& labels() const { return y_; }

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  Vec x_;
  Vec y_;
};

struct CondensationDirection {
  Vec z;          // (1/n) sum_i y_i x_i
  double z_norm = 0.0;
  Vec z_hat;      // z / ||z||
};

// Throws DegenerateData when ||z|| < 1e-12.
CondensationDirection compute_direction(const Dataset& data);

struct AssumptionReport {
  bool nondegenerate_ok = false;   // norm floors/ceilings on x, y, z
  bool nonparallel_ok = false;     // no pair of inputs is (near-)parallel
  double norm_bound_c = 0.0;       // the c the report was evaluated against
  std::vector<std::string> violations;  // empty iff both flags true
};

// Pure report, never throws on data problems; throws Error if c <= 1.
AssumptionReport validate(const Dataset& data, double c = 10.0);

// Inputs: uniform directions with norms uniform in [0.5, 1.5]. Labels:
// uniform in [-label_scale, label_scale], redrawn until ||z|| >= 0.1 (at most
// 100 attempts, then SynthesisFailed). Fully determined by (n, d, seed,
// label_scale).
Dataset synth_dataset(std::size_t n, std::size_t d, std::uint64_t seed,
                      double label_scale = 1.0);

// CSV rows are "x_1,...,x_d,label" with no header. Ragged rows and malformed
// numbers throw ParseError naming the row (and column where it applies).
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& data, const std::string& path);

// FNV-1a over the shape and raw coefficient bytes; used in run manifests.
std::string dataset_digest(const Dataset& data);

}  // namespace condlab
