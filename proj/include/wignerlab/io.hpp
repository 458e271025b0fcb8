#pragma once

// Text formats.
//
// Grid-sampled CSV: five header rows `N,<n>`, `x_min,<v>`, `dx,<v>`, `eta,<v>`, `kind,<k>`,
// then a `real,imag` line and one `re,im` row per sample. Phase-space functions and operator
// kernels are stored row-major (x index slowest). Kind is `wavefunction`, `operator`, or a
// PhaseKind name.
//
// Tomogram CSV: the same five header rows with kind `tomogram`, then `angles,<a0>,<a1>,...`,
// then one row of N values per angle.
//
// Doubles are written with 17 significant digits, so files round-trip exactly.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "quantumness.hpp"
#include "tomography.hpp"

namespace wignerlab::io {

using json = nlohmann::json;

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void dump(const json& j, std::string& out, int indent, int depth) {
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) { out += "{}"; return; }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += pad + json(it.key()).dump() + sep;
        dump(it.value(), out, indent, depth + 1);
      }
      out += close + '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) { out += "[]"; return; }
      // Numeric arrays stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat && indent > 0 ? ", " : ",";
        first = false;
        if (!flat) out += pad;
        dump(e, out, indent, depth + 1);
      }
      out += (flat ? "" : close) + ']';
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default: out += j.dump();
  }
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() && s.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigurationError("malformed number for " + what + ": '" + s + "'");
  }
}

struct Header {
  int n = 0;
  double x_min = 0.0, dx = 0.0, eta = 0.0;
  std::string kind;
  Grid grid() const { return Grid(x_min, x_min + n * dx, static_cast<std::size_t>(n)); }
};

inline void write_header(std::ostream& os, const Grid& g, double eta, const std::string& kind) {
  os << "N," << g.n() << "\nx_min," << format_double(g.x_min()) << "\ndx," << format_double(g.dx()) << "\neta,"
     << format_double(eta) << "\nkind," << kind << "\n";
}

inline std::string next_line(std::istream& is, const char* what) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigurationError(std::string("unexpected end of CSV while reading ") + what);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

inline Header read_header(std::istream& is) {
  Header h;
  const char* keys[] = {"N", "x_min", "dx", "eta", "kind"};
  for (const char* key : keys) {
    const auto cells = split(next_line(is, key));
    if (cells.size() != 2 || cells[0] != key) throw ConfigurationError(std::string("CSV header row '") + key + "' missing");
    if (cells[0] == "N") {
      const double v = parse_double(cells[1], "N");
      if (v != std::floor(v) || v < 1 || v > (1 << 20)) throw ConfigurationError("CSV header N is not a valid size");
      h.n = static_cast<int>(v);
    } else if (cells[0] == "x_min") {
      h.x_min = parse_double(cells[1], "x_min");
    } else if (cells[0] == "dx") {
      h.dx = parse_double(cells[1], "dx");
    } else if (cells[0] == "eta") {
      h.eta = parse_double(cells[1], "eta");
    } else {
      h.kind = cells[1];
    }
  }
  Eta(h.eta);
  if (!(h.dx > 0.0)) throw ConfigurationError("CSV header dx must be > 0");
  return h;
}

inline void write_samples(std::ostream& os, const cplx* data, std::size_t count) {
  os << "real,imag\n";
  for (std::size_t i = 0; i < count; ++i) os << format_double(data[i].real()) << ',' << format_double(data[i].imag()) << '\n';
}

inline std::vector<cplx> read_samples(std::istream& is, std::size_t count) {
  if (split(next_line(is, "column header")) != std::vector<std::string>{"real", "imag"})
    throw ConfigurationError("CSV column header must be 'real,imag'");
  std::vector<cplx> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto cells = split(next_line(is, "samples"));
    if (cells.size() != 2) throw ConfigurationError("CSV sample row " + std::to_string(i) + " must have two columns");
    out[i] = {parse_double(cells[0], "real"), parse_double(cells[1], "imag")};
  }
  std::string rest;
  while (std::getline(is, rest))
    if (rest.find_first_not_of(" \t\r") != std::string::npos) throw ConfigurationError("CSV has trailing rows");
  return out;
}

inline CMat row_major(const std::vector<cplx>& v, int n) {
  CMat m(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) m(j, k) = v[static_cast<std::size_t>(j) * n + k];
  return m;
}

inline std::vector<cplx> flatten(const CMat& m) {
  std::vector<cplx> v;
  v.reserve(static_cast<std::size_t>(m.size()));
  for (int j = 0; j < m.rows(); ++j)
    for (int k = 0; k < m.cols(); ++k) v.push_back(m(j, k));
  return v;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigurationError("cannot open '" + path + "'");
  return is;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigurationError("cannot write '" + path + "'");
  return os;
}

}  // namespace detail

inline std::string dump_json(const json& j, int indent = 2) {
  std::string out;
  detail::dump(j, out, indent, 0);
  return out;
}

inline void write_json_file(const std::string& path, const json& j) {
  auto os = detail::open_out(path);
  os << dump_json(j) << '\n';
}

inline json read_json_file(const std::string& path) {
  auto is = detail::open_in(path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigurationError("invalid JSON in '" + path + "': " + e.what());
  }
}

// CSV streams

inline void write_csv(std::ostream& os, const GridFunction& f) {
  detail::write_header(os, f.grid, f.eta, "wavefunction");
  detail::write_samples(os, f.values.data(), f.values.size());
}

inline void write_csv(std::ostream& os, const PhaseSpaceFunction& f) {
  detail::write_header(os, f.grid, f.eta, to_string(f.kind));
  const auto v = detail::flatten(f.values);
  detail::write_samples(os, v.data(), v.size());
}

inline void write_csv(std::ostream& os, const OperatorMatrix& op) {
  detail::write_header(os, op.grid, op.eta, "operator");
  const auto v = detail::flatten(op.kernel);
  detail::write_samples(os, v.data(), v.size());
}

inline void write_csv(std::ostream& os, const DensityMatrix& rho) { write_csv(os, rho.op()); }

inline void write_csv(std::ostream& os, const TomogramSet& t) {
  detail::write_header(os, t.xgrid, t.eta, "tomogram");
  os << "angles";
  for (double a : t.angles) os << ',' << format_double(a);
  os << '\n';
  for (int r = 0; r < t.values.rows(); ++r) {
    for (int i = 0; i < t.values.cols(); ++i) os << (i ? "," : "") << format_double(t.values(r, i));
    os << '\n';
  }
}

inline GridFunction read_grid_function(std::istream& is) {
  const auto h = detail::read_header(is);
  if (h.kind != "wavefunction") throw ConfigurationError("expected kind 'wavefunction', got '" + h.kind + "'");
  const auto v = detail::read_samples(is, static_cast<std::size_t>(h.n));
  return GridFunction(h.grid(), Eta(h.eta), Eigen::Map<const CVec>(v.data(), h.n));
}

inline PhaseSpaceFunction read_phase_space(std::istream& is) {
  const auto h = detail::read_header(is);
  const PhaseKind kind = phase_kind_from_string(h.kind);
  const auto v = detail::read_samples(is, static_cast<std::size_t>(h.n) * h.n);
  return PhaseSpaceFunction(h.grid(), Eta(h.eta), detail::row_major(v, h.n), kind);
}

inline OperatorMatrix read_operator(std::istream& is) {
  const auto h = detail::read_header(is);
  if (h.kind != "operator") throw ConfigurationError("expected kind 'operator', got '" + h.kind + "'");
  const auto v = detail::read_samples(is, static_cast<std::size_t>(h.n) * h.n);
  return OperatorMatrix(h.grid(), Eta(h.eta), detail::row_major(v, h.n));
}

inline TomogramSet read_tomograms(std::istream& is) {
  const auto h = detail::read_header(is);
  if (h.kind != "tomogram") throw ConfigurationError("expected kind 'tomogram', got '" + h.kind + "'");
  const auto cells = detail::split(detail::next_line(is, "angles"));
  if (cells.size() < 2 || cells[0] != "angles") throw ConfigurationError("tomogram CSV needs an 'angles' row");
  std::vector<double> angles;
  for (std::size_t i = 1; i < cells.size(); ++i) angles.push_back(detail::parse_double(cells[i], "angle"));
  Eigen::MatrixXd v(angles.size(), h.n);
  for (std::size_t r = 0; r < angles.size(); ++r) {
    const auto row = detail::split(detail::next_line(is, "tomogram row"));
    if (static_cast<int>(row.size()) != h.n) throw ConfigurationError("tomogram row " + std::to_string(r) + " has wrong length");
    for (int i = 0; i < h.n; ++i) v(r, i) = detail::parse_double(row[i], "tomogram value");
  }
  return TomogramSet(h.grid(), h.eta, std::move(angles), std::move(v));
}

// CSV files

template <typename T>
void save_csv(const std::string& path, const T& value) {
  auto os = detail::open_out(path);
  write_csv(os, value);
}

inline GridFunction load_grid_function(const std::string& path) {
  auto is = detail::open_in(path);
  return read_grid_function(is);
}

inline PhaseSpaceFunction load_phase_space(const std::string& path) {
  auto is = detail::open_in(path);
  return read_phase_space(is);
}

inline OperatorMatrix load_operator(const std::string& path) {
  auto is = detail::open_in(path);
  return read_operator(is);
}

inline TomogramSet load_tomograms(const std::string& path) {
  auto is = detail::open_in(path);
  return read_tomograms(is);
}

// Plot-ready layout: `x,p,value` rows with a blank line between x blocks.
inline void write_heatmap(std::ostream& os, const PhaseSpaceFunction& f) {
  os << "x,p,value\n";
  for (int j = 0; j < f.grid.n(); ++j) {
    for (int k = 0; k < f.grid.n(); ++k)
      os << format_double(f.x(j)) << ',' << format_double(f.p(k)) << ',' << format_double(f.values(j, k).real()) << '\n';
    os << '\n';
  }
}

// JSON envelopes

inline json grid_json(const Grid& g, double eta) {
  return {{"N", g.n()}, {"x_min", g.x_min()}, {"dx", g.dx()}, {"eta", eta}};
}

inline json samples_json(const std::vector<cplx>& v) {
  json re = json::array(), im = json::array();
  for (const auto& c : v) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  return {{"real", re}, {"imag", im}};
}

inline json to_json(const GridFunction& f) {
  json j = grid_json(f.grid, f.eta);
  j["kind"] = "wavefunction";
  j.update(samples_json(std::vector<cplx>(f.values.data(), f.values.data() + f.values.size())));
  return j;
}

inline json to_json(const PhaseSpaceFunction& f) {
  json j = grid_json(f.grid, f.eta);
  j["kind"] = to_string(f.kind);
  j.update(samples_json(detail::flatten(f.values)));
  return j;
}

inline json to_json(const OperatorMatrix& op) {
  json j = grid_json(op.grid, op.eta);
  j["kind"] = "operator";
  j.update(samples_json(detail::flatten(op.kernel)));
  return j;
}

namespace detail {

inline Header header_from_json(const json& j) {
  try {
    Header h{j.at("N").get<int>(), j.at("x_min").get<double>(), j.at("dx").get<double>(), j.at("eta").get<double>(),
             j.at("kind").get<std::string>()};
    Eta(h.eta);
    return h;
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("malformed JSON envelope: ") + e.what());
  }
}

inline std::vector<cplx> samples_from_json(const json& j, std::size_t count) {
  try {
    const auto re = j.at("real").get<std::vector<double>>();
    const auto im = j.at("imag").get<std::vector<double>>();
    if (re.size() != count || im.size() != count) throw ConfigurationError("JSON envelope has wrong sample count");
    std::vector<cplx> v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = {re[i], im[i]};
    return v;
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("malformed JSON samples: ") + e.what());
  }
}

}  // namespace detail

inline GridFunction grid_function_from_json(const json& j) {
  const auto h = detail::header_from_json(j);
  if (h.kind != "wavefunction") throw ConfigurationError("expected kind 'wavefunction'");
  const auto v = detail::samples_from_json(j, static_cast<std::size_t>(h.n));
  return GridFunction(h.grid(), Eta(h.eta), Eigen::Map<const CVec>(v.data(), h.n));
}

inline PhaseSpaceFunction phase_space_from_json(const json& j) {
  const auto h = detail::header_from_json(j);
  const auto v = detail::samples_from_json(j, static_cast<std::size_t>(h.n) * h.n);
  return PhaseSpaceFunction(h.grid(), Eta(h.eta), detail::row_major(v, h.n), phase_kind_from_string(h.kind));
}

inline json to_json(const RMat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (int k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(r);
  }
  return rows;
}

inline json vector_json(const RVec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline RMat matrix_from_json(const json& j) {
  try {
    const auto rows = j.get<std::vector<std::vector<double>>>();
    if (rows.empty()) throw ConfigurationError("empty matrix");
    RMat m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.front().size()) throw ConfigurationError("ragged matrix");
      for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
    }
    return m;
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("malformed matrix: ") + e.what());
  }
}

inline json to_json(const WilliamsonForm& w, const RMat& sigma) {
  return {{"S", to_json(w.S)},
          {"lambda", vector_json(w.lambda)},
          {"reconstruction_error", w.reconstruction_error(sigma)},
          {"symplectic_residual", symplectic_residual(w.S)},
          {"near_degenerate", w.near_degenerate}};
}

inline json to_json(const AdmissibilityReport& r) {
  json j = {{"eta", r.eta},
            {"positive_definite", r.positive_definite},
            {"eigenvalue_criterion", r.eigenvalue_criterion},
            {"matrix_min_eigenvalue", r.matrix_min_eigenvalue},
            {"matrix_determinant", {r.matrix_determinant.real(), r.matrix_determinant.imag()}},
            {"matrix_criterion", r.matrix_criterion},
            {"rs_margins", r.rs_margins},
            {"rs_satisfied", r.rs_satisfied},
            {"admissible", r.admissible}};
  if (r.positive_definite) j["lambda"] = vector_json(r.lambda);
  return j;
}

inline json to_json(const KLMReport& r) {
  json pts = json::array();
  for (const auto& z : r.points) pts.push_back({z.x, z.p});
  return {{"eta", r.eta},
          {"seed", r.seed},
          {"samples", r.samples},
          {"continuity", r.continuity},
          {"continuity_ok", r.continuity_ok},
          {"hessian_min_eigenvalue", r.hessian_min_eigenvalue},
          {"hessian_ok", r.hessian_ok},
          {"fourth_moment_x", r.fourth_moment_x},
          {"fourth_moment_p", r.fourth_moment_p},
          {"fourth_moments_ok", r.fourth_moments_ok},
          {"min_eigenvalue", r.min_eigenvalue},
          {"matrix_norm", r.matrix_norm},
          {"matrix_ok", r.matrix_ok},
          {"pass", r.pass},
          {"violations", r.violations},
          {"points", pts}};
}

inline json to_json(const EtaScanResult& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"eta", e.eta},
                       {"verdict", to_string(e.verdict)},
                       {"min_eigenvalue", e.min_eigenvalue},
                       {"psd_tolerance", e.psd_tolerance},
                       {"purity_surrogate", e.purity_surrogate},
                       {"trace", e.trace}});
  return {{"entries", entries}, {"monotone", r.monotone}};
}

inline json to_json(const DensityReport& r) {
  return {{"hermiticity_residue", r.hermiticity_residue},
          {"trace", r.trace},
          {"trace_from_spectrum", r.trace_from_spectrum},
          {"min_eigenvalue", r.min_eigenvalue},
          {"max_eigenvalue", r.max_eigenvalue},
          {"psd_tolerance", r.psd_tolerance},
          {"clamped_total", r.clamped_total},
          {"hermitian", r.hermitian},
          {"positive", r.positive},
          {"unit_trace", r.unit_trace},
          {"violations", r.violations}};
}

}  // namespace wignerlab::io
