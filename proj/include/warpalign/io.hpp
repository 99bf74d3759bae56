#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "warpalign/align_bayes.hpp"
#include "warpalign/align_sa.hpp"
#include "warpalign/core.hpp"
#include "warpalign/landmarks.hpp"
#include "warpalign/shapeops.hpp"
#include "warpalign/srvf.hpp"
#include "warpalign/warpmap.hpp"

namespace warpalign::io {

using json = nlohmann::json;

/// Shortest decimal form that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf, end);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_number(std::string_view field, const std::string& where) {
  double v = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
    throw DataError(where + ": not a number: '" + std::string(field) + "'");
  return v;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<int> line_numbers;
  bool closed = false;
};

/// Reads a comma-separated table with one header row. Lines starting with '#'
/// are comments; "# closed" marks a closed curve.
inline Table read_table(std::istream& in, const std::string& name) {
  Table table;
  std::string raw;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (trim(line.substr(1)) == "closed") table.closed = true;
      continue;
    }
    const std::string where = name + ":" + std::to_string(line_no);
    const auto fields = split(line);
    if (!have_header) {
      for (auto f : fields) table.header.emplace_back(f);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size())
      throw DataError(where + ": expected " + std::to_string(table.header.size()) + " columns, found " +
                      std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) row.push_back(parse_number(f, where));
    table.rows.push_back(std::move(row));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) throw DataError(name + ": missing header row");
  return table;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

}  // namespace detail

/// Curve CSV: header `t,x1[,x2,x3]`, t strictly increasing from 0 to 1,
/// optional `# closed` line.
inline Curve parse_curve(std::istream& in, const std::string& name = "<curve>") {
  const auto table = detail::read_table(in, name);
  const std::size_t cols = table.header.size();
  if (cols < 2 || cols > 4) throw DataError(name + ": curve CSV needs columns t,x1[,x2,x3]");
  if (table.header.front() != "t") throw DataError(name + ": first column must be named t");
  if (table.rows.size() < 2) throw DataError(name + ": curve needs at least two rows");
  std::vector<double> t(table.rows.size());
  Points p(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(cols - 1));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    t[r] = table.rows[r][0];
    const std::string where = name + ":" + std::to_string(table.line_numbers[r]);
    if (r > 0 && !(t[r] > t[r - 1])) throw DataError(where + ": t column must be strictly increasing");
    for (std::size_t c = 1; c < cols; ++c)
      p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - 1)) = table.rows[r][c];
  }
  if (t.front() != 0.0 || t.back() != 1.0) throw DataError(name + ": t column must run from 0 to 1");
  const Topology topo = table.closed ? Topology::closed : Topology::open;
  if (topo == Topology::closed && (p.row(0) - p.row(p.rows() - 1)).norm() > 1e-9)
    throw DataError(name + ": closed curve must end where it starts (line " +
                    std::to_string(table.line_numbers.back()) + ")");
  return Curve(Grid(std::move(t)), std::move(p), topo);
}

inline Curve load_curve(const std::string& path) {
  auto in = detail::open_in(path);
  return parse_curve(in, path);
}

inline void write_curve(std::ostream& out, const Curve& c) {
  if (c.closed()) out << "# closed\n";
  out << "t";
  for (int k = 1; k <= c.dim(); ++k) out << ",x" << k;
  out << "\n";
  for (std::size_t r = 0; r < c.size(); ++r) {
    out << format_double(c.grid()[r]);
    for (int k = 0; k < c.dim(); ++k) out << ',' << format_double(c.points()(static_cast<Eigen::Index>(r), k));
    out << "\n";
  }
}

inline void write_curve(const std::string& path, const Curve& c) {
  auto out = detail::open_out(path);
  write_curve(out, c);
}

inline json to_json(const PLWarp& w) {
  json knots = json::array();
  for (std::size_t k = 0; k < w.knot_count(); ++k) knots.push_back({w.knot_t()[k], w.knot_y()[k]});
  return json{{"knots", std::move(knots)}};
}

inline json to_json(const CircularWarp& w) {
  json j = to_json(w.base());
  j["seed"] = w.seed();
  j["wrap_point"] = w.wrap_point();
  return j;
}

/// Row-major matrix.
inline json to_json(const Rotation& r) {
  json rows = json::array();
  for (int i = 0; i < r.dim(); ++i) {
    json row = json::array();
    for (int k = 0; k < r.dim(); ++k) row.push_back(r.matrix()(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline PLWarp warp_from_json(const json& j) {
  if (!j.is_object() || !j.contains("knots") || !j["knots"].is_array()) throw DataError("warp JSON needs a knots array");
  std::vector<double> t, y;
  for (const auto& k : j["knots"]) {
    if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number())
      throw DataError("each knot must be a [t, y] pair");
    t.push_back(k[0].get<double>());
    y.push_back(k[1].get<double>());
  }
  try {
    return PLWarp(std::move(t), std::move(y));
  } catch (const ArgumentError& e) {
    throw DataError(std::string("invalid warp: ") + e.what());
  }
}

inline void write_warp(const std::string& path, const PLWarp& w) {
  auto out = detail::open_out(path);
  out << to_json(w).dump(2) << "\n";
}

inline PLWarp load_warp(const std::string& path) {
  auto in = detail::open_in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  return warp_from_json(j);
}

inline json to_json(const AlignmentResult& r) {
  return json{{"warp", to_json(r.warp)},          {"rotation", to_json(r.rotation)},
              {"seed", r.seed},                    {"initial_energy", r.initial_energy},
              {"final_energy", r.final_energy},    {"iterations", r.iterations},
              {"accepted", r.accepted}};
}

inline void write_energy_trace(const std::string& path, std::span<const double> trace) {
  auto out = detail::open_out(path);
  out << "iteration,energy\n";
  for (std::size_t i = 0; i < trace.size(); ++i) out << i << ',' << format_double(trace[i]) << "\n";
}

/// Band CSV: t,lower,mean,upper,width.
inline void write_band(std::ostream& out, const PosteriorBand& band) {
  out << "t,lower,mean,upper,width\n";
  for (std::size_t k = 0; k < band.grid.size(); ++k)
    out << format_double(band.grid[k]) << ',' << format_double(band.lower[k]) << ',' << format_double(band.mean[k])
        << ',' << format_double(band.upper[k]) << ',' << format_double(band.upper[k] - band.lower[k]) << "\n";
}

inline void write_band(const std::string& path, const PosteriorBand& band) {
  auto out = detail::open_out(path);
  write_band(out, band);
}

/// Landmark CSV: header `a,b`.
inline LandmarkSet parse_landmarks(std::istream& in, const std::string& name = "<landmarks>") {
  const auto table = detail::read_table(in, name);
  if (table.header != std::vector<std::string>{"a", "b"}) throw DataError(name + ": landmark CSV needs columns a,b");
  std::vector<LandmarkPair> pairs;
  for (const auto& row : table.rows) pairs.push_back({row[0], row[1]});
  try {
    return LandmarkSet(std::move(pairs));
  } catch (const ArgumentError& e) {
    throw DataError(name + ": " + e.what());
  }
}

inline LandmarkSet load_landmarks(const std::string& path) {
  auto in = detail::open_in(path);
  return parse_landmarks(in, path);
}

/// SRVF values as CSV (t,q1[,q2,q3]) for plotting.
inline void write_srvf(const std::string& path, const Srvf& q) {
  auto out = detail::open_out(path);
  out << "t";
  for (int k = 1; k <= q.dim(); ++k) out << ",q" << k;
  out << "\n";
  for (std::size_t r = 0; r < q.size(); ++r) {
    out << format_double(q.grid[r]);
    for (int k = 0; k < q.dim(); ++k) out << ',' << format_double(q.values(static_cast<Eigen::Index>(r), k));
    out << "\n";
  }
}

}  // namespace warpalign::io
