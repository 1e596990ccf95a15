#pragma once

// Text formats: +-1-per-line sequences, CSV for drives / spectra / envelopes /
// sweeps, line-oriented `key = value` configs, and run manifests. All floats
// print with 17 significant digits so files round-trip bit-exactly.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "prethermal/common.hpp"
#include "prethermal/drives.hpp"
#include "prethermal/spectra.hpp"

namespace prethermal {

inline void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path);
  if (!out) throw parameter_error("cannot open for writing: " + path);
  for (const auto& l : lines) out << l << "\n";
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parameter_error("cannot open for reading: " + path);
  std::vector<std::string> lines;
  std::string l;
  while (std::getline(in, l)) lines.push_back(l);
  return lines;
}

// ---- step sequences: one +-1 integer per line ----

inline void write_sequence(const std::string& path, const StepSequence& seq) {
  std::ofstream out(path);
  if (!out) throw parameter_error("cannot open for writing: " + path);
  for (auto v : seq.values) out << static_cast<int>(v) << "\n";
}

inline StepSequence read_sequence(const std::string& path, double dt = 1.0) {
  StepSequence seq;
  seq.dt = dt;
  for (const auto& l : read_lines(path)) {
    if (l.empty()) continue;
    const int v = std::stoi(l);
    if (v != 1 && v != -1) throw parameter_error("read_sequence: entry not +-1 in " + path);
    seq.values.push_back(static_cast<std::int8_t>(v));
  }
  return seq;
}

// ---- generic CSV ----

inline void write_csv(const std::string& path, const std::string& header,
                      const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw parameter_error("cannot open for writing: " + path);
  out << header << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_g17(r[i]);
    out << "\n";
  }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) out.push_back(cur);
  return out;
}

inline std::vector<std::vector<double>> read_csv(const std::string& path, std::string* header = nullptr) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw parameter_error("read_csv: empty file " + path);
  if (header) *header = lines[0];
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split_csv_line(lines[i])) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---- typed CSV formats ----

inline void write_drive(const std::string& path, const ContinuousDrive& d) {
  std::ofstream out(path);
  if (!out) throw parameter_error("cannot open for writing: " + path);
  out << "label,freq,amp,phase\n";
  for (const auto& c : d.components)
    out << c.label.str() << "," << format_g17(c.freq) << "," << format_g17(c.amp) << ","
        << format_g17(c.phase) << "\n";
}

// Labels print as "(n1 n2 ...)" for integer vectors and "p/q" for rationals;
// which rational group a file holds is the caller's context.
inline FrequencyLabel parse_label(const std::string& text, LabelKind kind) {
  if (kind == LabelKind::IntVec) {
    if (text.size() < 2 || text.front() != '(' || text.back() != ')')
      throw parameter_error("parse_label: expected (n1 n2 ...), got " + text);
    std::vector<std::int64_t> n;
    std::istringstream is(text.substr(1, text.size() - 2));
    std::int64_t v;
    while (is >> v) n.push_back(v);
    return FrequencyLabel::int_vec(std::move(n));
  }
  const auto slash = text.find('/');
  const std::int64_t num = std::stoll(text.substr(0, slash));
  const std::int64_t den = slash == std::string::npos ? 1 : std::stoll(text.substr(slash + 1));
  const Rational mu(num, den);
  return kind == LabelKind::Dyadic ? FrequencyLabel::dyadic(mu) : FrequencyLabel::factorial(mu);
}

inline ContinuousDrive read_drive(const std::string& path, LabelKind kind, double lambda = 1.0) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "label,freq,amp,phase")
    throw parameter_error("read_drive: bad header in " + path);
  ContinuousDrive d;
  d.lambda = lambda;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() != 4) throw parameter_error("read_drive: malformed row in " + path);
    d.components.push_back({parse_label(cells[0], kind), std::stod(cells[1]), std::stod(cells[2]),
                            std::stod(cells[3])});
  }
  return d;
}

inline void write_spectrum(const std::string& path, const Spectrum& s) {
  std::vector<std::vector<double>> rows;
  rows.reserve(s.entries.size());
  for (const auto& e : s.entries) rows.push_back({e.omega, e.value.real(), e.value.imag()});
  write_csv(path, "omega,re,im", rows);
}

inline Spectrum read_spectrum(const std::string& path, std::size_t n,
                              Normalization norm = Normalization::OneOverN) {
  Spectrum s;
  s.n = n;
  s.normalization = norm;
  for (const auto& r : read_csv(path)) {
    if (r.size() != 3) throw parameter_error("read_spectrum: malformed row in " + path);
    s.entries.push_back({r[0], {r[1], r[2]}});
  }
  return s;
}

inline void write_envelope(const std::string& path, const Envelope& env) {
  std::vector<std::vector<double>> rows;
  for (const auto& p : env.points) rows.push_back({p.omega_center, p.magnitude});
  write_csv(path, "omega,median_mag", rows);
}

inline Envelope read_envelope(const std::string& path) {
  Envelope env;
  for (const auto& r : read_csv(path)) {
    if (r.size() != 2) throw parameter_error("read_envelope: malformed row in " + path);
    env.points.push_back({r[0], r[1]});
  }
  return env;
}

// gnuplot-ready two-column log-log file: ln omega, ln magnitude
inline void write_loglog(const std::string& path, const Envelope& env) {
  std::ofstream out(path);
  if (!out) throw parameter_error("cannot open for writing: " + path);
  for (const auto& p : env.points)
    if (p.magnitude > 0)
      out << format_g17(std::log(p.omega_center)) << " " << format_g17(std::log(p.magnitude))
          << "\n";
}

// ---- key = value configs ----

using ConfigMap = std::map<std::string, std::string>;

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline ConfigMap parse_config_text(const std::vector<std::string>& lines) {
  ConfigMap cfg;
  for (const auto& raw : lines) {
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw parameter_error("config: missing '=' in line: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw parameter_error("config: empty key in line: " + line);
    cfg[key] = val;
  }
  return cfg;
}

inline ConfigMap parse_config_file(const std::string& path) {
  return parse_config_text(read_lines(path));
}

// FNV-1a over the canonical (sorted) key=value rendering.
inline std::uint64_t config_hash(const ConfigMap& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
  };
  for (const auto& [k, v] : cfg) {
    mix(k);
    mix("=");
    mix(v);
    mix("\n");
  }
  return h;
}

}  // namespace prethermal
