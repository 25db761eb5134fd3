#include "condlab/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "condlab/errors.hpp"
#include "condlab/rng.hpp"

namespace condlab {

Dataset::Dataset(std::size_t n, std::size_t d, Vec x, Vec y)
    : n_(n), d_(d), x_(std::move(x)), y_(std::move(y)) {
  if (n_ == 0 || d_ == 0)
    throw DimensionMismatch("dataset: n and d must be positive");
  if (x_.size() != n_ * d_)
    throw DimensionMismatch("dataset: expected " + std::to_string(n_ * d_) +
                            " input coefficients, got " + std::to_string(x_.size()));
  if (y_.size() != n_)
    throw DimensionMismatch("dataset: expected " + std::to_string(n_) +
                            " labels, got " + std::to_string(y_.size()));
  for (double v : x_)
    if (!std::isfinite(v)) throw ParseError("dataset: non-finite input entry");
  for (double v : y_)
    if (!std::isfinite(v)) throw ParseError("dataset: non-finite label");
}

CondensationDirection compute_direction(const Dataset& data) {
  const std::size_t n = data.n();
  const std::size_t d = data.d();
  CondensationDirection dir;
  dir.z.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = data.input(i);
    const double yi = data.label(i);
    for (std::size_t j = 0; j < d; ++j) dir.z[j] += yi * xi[j];
  }
  for (std::size_t j = 0; j < d; ++j) dir.z[j] /= static_cast<double>(n);
  dir.z_norm = norm2(dir.z);
  if (dir.z_norm < 1e-12)
    throw DegenerateData("compute_direction: ||z|| below 1e-12; labels and "
                         "inputs cancel");
  dir.z_hat.resize(d);
  for (std::size_t j = 0; j < d; ++j) dir.z_hat[j] = dir.z[j] / dir.z_norm;
  return dir;
}

AssumptionReport validate(const Dataset& data, double c) {
  if (!(c > 1.0)) throw Error("validate: norm bound c must be > 1");
  AssumptionReport rep;
  rep.norm_bound_c = c;

  const std::size_t n = data.n();
  bool norms_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double nx = norm2(data.input(i));
    if (!(nx >= 1.0 / c)) {
      norms_ok = false;
      rep.violations.push_back("input " + std::to_string(i) + " has norm " +
                               std::to_string(nx) + " below the floor 1/c");
    }
    if (!(std::fabs(data.label(i)) <= c)) {
      norms_ok = false;
      rep.violations.push_back("label " + std::to_string(i) +
                               " exceeds the bound c");
    }
  }

  // z bounds, computed without the degeneracy throw: report instead.
  Vec z(data.d(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = data.input(i);
    for (std::size_t j = 0; j < data.d(); ++j) z[j] += data.label(i) * xi[j];
  }
  for (double& v : z) v /= static_cast<double>(n);
  const double zn = norm2(z);
  if (!(zn >= 1.0 / c) || !(zn <= c)) {
    norms_ok = false;
    rep.violations.push_back("direction vector norm " + std::to_string(zn) +
                             " outside [1/c, c]");
  }
  rep.nondegenerate_ok = norms_ok;

  bool parallel_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = data.input(i);
    const double ni = norm2(xi);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto xj = data.input(j);
      const double nj = norm2(xj);
      if (std::fabs(dot(xi, xj)) >= (1.0 - 1e-10) * ni * nj) {
        parallel_ok = false;
        rep.violations.push_back("inputs " + std::to_string(i) + " and " +
                                 std::to_string(j) + " are parallel within tolerance");
      }
    }
  }
  rep.nonparallel_ok = parallel_ok;
  return rep;
}

Dataset synth_dataset(std::size_t n, std::size_t d, std::uint64_t seed,
                      double label_scale) {
  if (n == 0 || d == 0) throw Error("synth_dataset: n and d must be positive");
  if (!(label_scale > 0.0)) throw Error("synth_dataset: label_scale must be positive");

  Pcg32 rng(derive_stream(seed, kStreamDataset, n, d));

  Vec x(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    double nrm = 0.0;
    do {
      for (std::size_t j = 0; j < d; ++j) x[i * d + j] = rng.next_normal();
      nrm = norm2({x.data() + i * d, d});
    } while (nrm == 0.0);
    const double radius = 0.5 + rng.next_double();  // uniform in [0.5, 1.5)
    for (std::size_t j = 0; j < d; ++j) x[i * d + j] *= radius / nrm;
  }

  Vec y(n);
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (std::size_t i = 0; i < n; ++i)
      y[i] = rng.next_uniform(-label_scale, label_scale);
    Vec z(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) z[j] += y[i] * x[i * d + j];
    for (double& v : z) v /= static_cast<double>(n);
    if (norm2(z) >= 0.1) return Dataset(n, d, std::move(x), std::move(y));
  }
  throw SynthesisFailed("synth_dataset: 100 label draws never reached "
                        "||z|| >= 0.1; label_scale is likely too small");
}

namespace {

double parse_field(const std::string& field, std::size_t row, std::size_t col) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end != begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r'))
    --end;
  double value = 0.0;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ParseError("dataset: row " + std::to_string(row + 1) + ", column " +
                     std::to_string(col + 1) + ": cannot parse '" + field + "'");
  return value;
}

}  // namespace

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_dataset: cannot open '" + path + "'");

  std::vector<Vec> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") {
      ++lineno;
      continue;
    }
    Vec fields;
    std::stringstream ss(line);
    std::string field;
    std::size_t col = 0;
    while (std::getline(ss, field, ',')) {
      fields.push_back(parse_field(field, lineno, col));
      ++col;
    }
    if (fields.size() < 2)
      throw ParseError("dataset: row " + std::to_string(lineno + 1) +
                       " has fewer than two fields");
    if (!rows.empty() && fields.size() != rows.front().size())
      throw ParseError("dataset: row " + std::to_string(lineno + 1) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(rows.front().size()));
    rows.push_back(std::move(fields));
    ++lineno;
  }
  if (rows.empty()) throw ParseError("dataset: '" + path + "' contains no rows");

  const std::size_t n = rows.size();
  const std::size_t d = rows.front().size() - 1;
  Vec x(n * d);
  Vec y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x[i * d + j] = rows[i][j];
    y[i] = rows[i][d];
  }
  return Dataset(n, d, std::move(x), std::move(y));
}

void save_dataset(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_dataset: cannot open '" + path + "' for writing");
  char buf[32];
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto xi = data.input(i);
    for (std::size_t j = 0; j < data.d(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", xi[j]);
      out << buf << ',';
    }
    std::snprintf(buf, sizeof(buf), "%.17g", data.label(i));
    out << buf << '\n';
  }
  if (!out) throw IoError("save_dataset: write to '" + path + "' failed");
}

std::string dataset_digest(const Dataset& data) {
  std::string bytes;
  bytes.reserve(16 + data.inputs_flat().size() * 8 + data.labels().size() * 8);
  const auto append_u64 = [&bytes](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
  };
  const auto append_double = [&](double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(bits));
    append_u64(bits);
  };
  append_u64(data.n());
  append_u64(data.d());
  for (double v : data.inputs_flat()) append_double(v);
  for (double v : data.labels()) append_double(v);
  const std::uint64_t h = fnv1a(bytes);
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return std::string(out);
}

}  // namespace condlab
