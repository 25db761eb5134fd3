#include "condlab/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "condlab/errors.hpp"
#include "condlab/rng.hpp"
#include "condlab/version.hpp"

namespace condlab {

namespace {

void append_comment(std::string& out, const std::string& name) {
  out += "# condlab " + name +
         " schema_version=" + std::to_string(kSchemaVersion) + "\n";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_double_field(std::string_view field, std::size_t line,
                          const std::string& what) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(what + ": malformed number on line " +
                     std::to_string(line));
  }
  return value;
}

std::uint64_t parse_u64_field(std::string_view field, std::size_t line,
                              const std::string& what) {
  field = trim(field);
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(what + ": malformed integer on line " +
                     std::to_string(line));
  }
  return value;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

std::vector<std::string> read_lines(const std::string& path,
                                    const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(what + ": cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("write_text_atomic: cannot open " + tmp);
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write_text_atomic: write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw IoError("write_text_atomic: rename to " + path + " failed: " +
                  ec.message());
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string content_digest(std::string_view bytes) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(bytes)));
  return buf;
}

void write_metric_series_csv(const std::string& path, const std::string& name,
                             const MetricSeries& series) {
  std::string out;
  out.reserve(64 + series.times.size() * 96);
  append_comment(out, name);
  out += "t,loss,rd,ratio,q_max,p_max\n";
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    out += format_double(series.times[i]);
    out += ',';
    out += format_double(series.loss[i]);
    out += ',';
    out += format_double(series.rd[i]);
    out += ',';
    out += format_double(series.ratio[i]);
    out += ',';
    out += format_double(series.q_max[i]);
    out += ',';
    out += format_double(series.p_max[i]);
    out += '\n';
  }
  write_text_atomic(path, out);
}

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepRow>& rows) {
  std::string out;
  out.reserve(64 + rows.size() * 120);
  append_comment(out, "sweep");
  out +=
      "m,gamma,gamma_prime,seed,t_hat,peak_ratio,sup_rd,final_loss_ratio,"
      "horizon_limited\n";
  for (const SweepRow& row : rows) {
    out += std::to_string(row.m);
    out += ',';
    out += format_double(row.gamma);
    out += ',';
    out += format_double(row.gamma_prime);
    out += ',';
    out += std::to_string(row.seed);
    out += ',';
    out += format_double(row.t_hat);
    out += ',';
    out += format_double(row.peak_ratio);
    out += ',';
    out += format_double(row.sup_rd);
    out += ',';
    out += format_double(row.final_loss_ratio);
    out += ',';
    out += row.horizon_limited ? '1' : '0';
    out += '\n';
  }
  write_text_atomic(path, out);
}

void write_phase_grid_csv(const std::string& path,
                          const std::vector<PhaseCell>& cells) {
  std::string out;
  out.reserve(64 + cells.size() * 160);
  append_comment(out, "phase_grid");
  out +=
      "gamma,gamma_prime,m_probe,theory_label,empirical_label,mean_sup_rd,"
      "min_sup_rd,max_sup_rd,mean_peak_ratio,min_peak_ratio,max_peak_ratio\n";
  for (const PhaseCell& cell : cells) {
    out += format_double(cell.gamma);
    out += ',';
    out += format_double(cell.gamma_prime);
    out += ',';
    out += std::to_string(cell.m_probe);
    out += ',';
    out += to_string(cell.theory_label);
    out += ',';
    out += to_string(cell.empirical_label);
    out += ',';
    out += format_double(cell.mean_sup_rd);
    out += ',';
    out += format_double(cell.min_sup_rd);
    out += ',';
    out += format_double(cell.max_sup_rd);
    out += ',';
    out += format_double(cell.mean_peak_ratio);
    out += ',';
    out += format_double(cell.min_peak_ratio);
    out += ',';
    out += format_double(cell.max_peak_ratio);
    out += '\n';
  }
  write_text_atomic(path, out);
}

void write_matrix_csv(const std::string& path, const std::string& name,
                      const SymmetricMatrix& matrix) {
  std::string out;
  append_comment(out, name);
  for (std::size_t i = 0; i < matrix.order; ++i) {
    for (std::size_t j = 0; j < matrix.order; ++j) {
      if (j > 0) out += ',';
      out += format_double(matrix(i, j));
    }
    out += '\n';
  }
  write_text_atomic(path, out);
}

void save_params(const std::string& path, const NormalizedParams& params,
                 const ScalingConfig& scaling, std::uint64_t seed,
                 const std::string& activation, double t) {
  std::string out;
  out.reserve(128 + params.m * (params.d + 1) * 26);
  append_comment(out, "params");
  out += "m,d,seed,nu,eps,activation,t,format_version\n";
  out += std::to_string(params.m);
  out += ',';
  out += std::to_string(params.d);
  out += ',';
  out += std::to_string(seed);
  out += ',';
  out += format_double(scaling.nu);
  out += ',';
  out += format_double(scaling.eps);
  out += ',';
  out += activation;
  out += ',';
  out += format_double(t);
  out += ',';
  out += std::to_string(kParamsFormatVersion);
  out += '\n';
  for (std::size_t k = 0; k < params.m; ++k) {
    if (k > 0) out += ',';
    out += format_double(params.a[k]);
  }
  out += '\n';
  for (std::size_t k = 0; k < params.m; ++k) {
    for (std::size_t j = 0; j < params.d; ++j) {
      if (j > 0) out += ',';
      out += format_double(params.W(k, j));
    }
    out += '\n';
  }
  write_text_atomic(path, out);
}

ParamsSnapshot load_params(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path, "load_params");
  if (lines.size() < 4) {
    throw ParseError("load_params: file too short: " + path);
  }
  const std::string expected_comment =
      "# condlab params schema_version=" + std::to_string(kSchemaVersion);
  if (lines[0] != expected_comment) {
    throw ParseError("load_params: schema_version line mismatch in " + path);
  }
  if (lines[1] != "m,d,seed,nu,eps,activation,t,format_version") {
    throw ParseError("load_params: unexpected header in " + path);
  }
  const auto meta = split_csv(lines[2]);
  if (meta.size() != 8) {
    throw ParseError("load_params: meta row must have 8 fields");
  }
  ParamsSnapshot snap;
  const auto m = static_cast<std::size_t>(parse_u64_field(meta[0], 3, "load_params"));
  const auto d = static_cast<std::size_t>(parse_u64_field(meta[1], 3, "load_params"));
  snap.seed = parse_u64_field(meta[2], 3, "load_params");
  snap.nu = parse_double_field(meta[3], 3, "load_params");
  snap.eps = parse_double_field(meta[4], 3, "load_params");
  snap.activation = std::string(trim(meta[5]));
  snap.t = parse_double_field(meta[6], 3, "load_params");
  const std::uint64_t version = parse_u64_field(meta[7], 3, "load_params");
  if (version != kParamsFormatVersion) {
    throw ParseError("load_params: unsupported format_version " +
                     std::to_string(version));
  }
  if (lines.size() != 4 + m) {
    throw ParseError("load_params: expected " + std::to_string(4 + m) +
                     " lines, found " + std::to_string(lines.size()));
  }

  snap.params.m = m;
  snap.params.d = d;
  snap.params.a.resize(m);
  const auto a_fields = split_csv(lines[3]);
  if (a_fields.size() != m) {
    throw ParseError("load_params: a row must have " + std::to_string(m) +
                     " fields");
  }
  for (std::size_t k = 0; k < m; ++k) {
    snap.params.a[k] = parse_double_field(a_fields[k], 4, "load_params");
  }
  snap.params.W = Matrix(m, d);
  for (std::size_t k = 0; k < m; ++k) {
    const auto row = split_csv(lines[4 + k]);
    if (row.size() != d) {
      throw ParseError("load_params: W row on line " + std::to_string(5 + k) +
                       " must have " + std::to_string(d) + " fields");
    }
    for (std::size_t j = 0; j < d; ++j) {
      snap.params.W(k, j) =
          parse_double_field(row[j], 5 + k, "load_params");
    }
  }
  return snap;
}

}  // namespace condlab
