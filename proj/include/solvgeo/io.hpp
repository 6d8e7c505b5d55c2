#ifndef SOLVGEO_IO_HPP
#define SOLVGEO_IO_HPP

#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "solvgeo/helmholtz.hpp"
#include "solvgeo/lie_algebra.hpp"
#include "solvgeo/metric.hpp"

namespace solvgeo {

using json = nlohmann::ordered_json;

inline json parse_json_text(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::io, "malformed JSON in " + what);
  return j;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Algebra file schema (1-based indices):
/// {"name": "...", "dim": n, "brackets": [{"i":1,"j":2,"k":3,"c":1.0}, ...],
///  "nilradical": [2,3,4]?}
inline LieAlgebra parse_algebra(const std::string& text, const std::string& what = "algebra") {
  json j = parse_json_text(text, what);
  try {
    std::string name = j.value("name", std::string("unnamed"));
    if (!j.contains("dim") || !j["dim"].is_number_integer())
      throw Error(ErrorKind::io, "algebra file needs an integer 'dim'");
    int dim = j["dim"].get<int>();
    std::vector<BracketEntry> entries;
    for (const auto& b : j.value("brackets", json::array())) {
      BracketEntry e;
      e.i = b.at("i").get<int>() - 1;
      e.j = b.at("j").get<int>() - 1;
      e.k = b.at("k").get<int>() - 1;
      e.c = b.at("c").get<double>();
      entries.push_back(e);
    }
    std::optional<std::vector<int>> nil;
    if (j.contains("nilradical")) {
      std::vector<int> v;
      for (const auto& idx : j["nilradical"]) v.push_back(idx.get<int>() - 1);
      nil = std::move(v);
    }
    return LieAlgebra::from_brackets(name, dim, std::move(entries), std::move(nil));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, std::string("bad algebra file: ") + e.what());
  }
}

inline LieAlgebra load_algebra(const std::string& path) {
  return parse_algebra(read_file(path), path);
}

inline json algebra_to_json(const LieAlgebra& L) {
  json j;
  j["name"] = L.name();
  j["dim"] = L.dim();
  json brackets = json::array();
  for (const auto& e : L.entries())
    brackets.push_back({{"i", e.i + 1}, {"j", e.j + 1}, {"k", e.k + 1}, {"c", e.c}});
  j["brackets"] = brackets;
  if (L.nilradical()) {
    json nil = json::array();
    for (int idx : *L.nilradical()) nil.push_back(idx + 1);
    j["nilradical"] = nil;
  }
  return j;
}

/// Metric file schema: {"algebra": "...", "matrix": [[...], ...]}.
/// A missing file or matrix defaults to the identity on the declared basis.
inline Eigen::MatrixXd parse_metric(const std::string& text, int dim,
                                    const std::string& what = "metric") {
  json j = parse_json_text(text, what);
  if (!j.contains("matrix")) return Eigen::MatrixXd::Identity(dim, dim);
  const auto& rows = j["matrix"];
  if (static_cast<int>(rows.size()) != dim)
    throw Error(ErrorKind::io, "metric matrix has wrong dimensions");
  Eigen::MatrixXd H(dim, dim);
  for (int r = 0; r < dim; ++r) {
    if (static_cast<int>(rows[r].size()) != dim)
      throw Error(ErrorKind::io, "metric matrix has wrong dimensions");
    for (int c = 0; c < dim; ++c) H(r, c) = rows[r][c].get<double>();
  }
  require_metric(H);
  return H;
}

inline Eigen::MatrixXd load_metric(const std::string& path, int dim) {
  return parse_metric(read_file(path), dim, path);
}

/// Graph file schema (1-based vertex ids):
/// {"vertices": [{"m": 1.0}, ...], "edges": [{"u":1,"v":2,"w":1.0}, ...]}
inline FluxGraph parse_graph(const std::string& text, const std::string& what = "graph") {
  json j = parse_json_text(text, what);
  FluxGraph G;
  try {
    for (const auto& v : j.at("vertices")) G.measure.push_back(v.at("m").get<double>());
    for (const auto& e : j.at("edges"))
      G.edges.push_back({e.at("u").get<int>() - 1, e.at("v").get<int>() - 1, e.at("w").get<double>()});
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, std::string("bad graph file: ") + e.what());
  }
  validate_graph(G);
  return G;
}

/// Field file schema: {"edges": [{"u":1,"v":2,"x":0.5}, ...]}; every graph edge
/// must appear exactly once, in either orientation.
inline EdgeField parse_field(const std::string& text, const FluxGraph& G,
                             const std::string& what = "field") {
  json j = parse_json_text(text, what);
  std::map<std::pair<int, int>, double> given;
  try {
    for (const auto& e : j.at("edges")) {
      int u = e.at("u").get<int>() - 1;
      int v = e.at("v").get<int>() - 1;
      given[{u, v}] = e.at("x").get<double>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, std::string("bad field file: ") + e.what());
  }
  EdgeField X;
  X.value.reserve(G.edges.size());
  for (const auto& ed : G.edges) {
    auto fwd = given.find({ed.u, ed.v});
    auto rev = given.find({ed.v, ed.u});
    if (fwd != given.end())
      X.value.push_back(fwd->second);
    else if (rev != given.end())
      X.value.push_back(-rev->second);
    else
      throw Error(ErrorKind::io, "field file is missing edge (" + std::to_string(ed.u + 1) + "," +
                                     std::to_string(ed.v + 1) + ")");
  }
  return X;
}

inline json matrix_to_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (int r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(row);
  }
  return rows;
}

inline json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace solvgeo

#endif
