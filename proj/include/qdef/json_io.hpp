#pragma once

#include <qdef/chan.hpp>
#include <qdef/expmodel.hpp>
#include <qdef/sdpsolve.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace qdef {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Shared matrix schema: {"rows": r, "cols": c, "entries": [[re, im], ...]}
// row-major, with floats emitted losslessly.

inline json matrix_to_json(const Mat& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  json entries = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int k = 0; k < m.cols(); ++k)
      entries.push_back(json::array({m(i, k).real(), m(i, k).imag()}));
  j["entries"] = std::move(entries);
  return j;
}

inline Mat matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries"))
    throw std::invalid_argument("matrix: expected object with rows/cols/entries");
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  const auto& entries = j.at("entries");
  if (!entries.is_array() || static_cast<int>(entries.size()) != rows * cols)
    throw std::invalid_argument("matrix: entry count does not equal rows*cols");
  Mat m(rows, cols);
  int idx = 0;
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) {
      const auto& e = entries.at(idx++);
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument("matrix: each entry must be a [re, im] pair");
      m(i, k) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
    }
  return m;
}

// ---------------------------------------------------------------------------
// Experiment: {"dim": d, "states": [{"label": s, "matrix": {...}}, ...]}

inline json experiment_to_json(const Experiment& e) {
  json j;
  j["dim"] = e.dim;
  json states = json::array();
  for (int i = 0; i < e.size(); ++i) {
    json s;
    s["label"] = e.labels[i];
    s["matrix"] = matrix_to_json(e.states[i]);
    states.push_back(std::move(s));
  }
  j["states"] = std::move(states);
  return j;
}

inline Experiment experiment_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("states"))
    throw std::invalid_argument("experiment: expected object with dim/states");
  Experiment e;
  e.dim = j.at("dim").get<int>();
  for (const auto& s : j.at("states")) {
    e.labels.push_back(s.at("label").get<std::string>());
    e.states.push_back(matrix_from_json(s.at("matrix")));
  }
  return e;
}

inline json loss_to_json(const LossFamily& l) {
  json j;
  j["dim_decision"] = l.dim_decision;
  json ops = json::array();
  for (int i = 0; i < l.size(); ++i) {
    json s;
    s["label"] = l.labels[i];
    s["matrix"] = matrix_to_json(l.operators[i]);
    ops.push_back(std::move(s));
  }
  j["operators"] = std::move(ops);
  return j;
}

inline LossFamily loss_from_json(const json& j) {
  LossFamily l;
  l.dim_decision = j.at("dim_decision").get<int>();
  for (const auto& s : j.at("operators")) {
    l.labels.push_back(s.at("label").get<std::string>());
    l.operators.push_back(matrix_from_json(s.at("matrix")));
  }
  return l;
}

inline json prior_to_json(const Prior& p) {
  json weights = json::array();
  for (std::size_t i = 0; i < p.labels.size(); ++i)
    weights.push_back(json{{"label", p.labels[i]}, {"weight", p.weights[i]}});
  return json{{"weights", std::move(weights)}};
}

inline Prior prior_from_json(const json& j) {
  Prior p;
  for (const auto& w : j.at("weights")) {
    p.labels.push_back(w.at("label").get<std::string>());
    p.weights.push_back(w.at("weight").get<double>());
  }
  return p;
}

inline json profile_to_json(const DeficiencyProfile& p) {
  json e = json::array();
  for (std::size_t i = 0; i < p.labels.size(); ++i)
    e.push_back(json{{"label", p.labels[i]}, {"value", p.e[i]}});
  return json{{"e", std::move(e)}};
}

inline DeficiencyProfile profile_from_json(const json& j) {
  DeficiencyProfile p;
  for (const auto& w : j.at("e")) {
    p.labels.push_back(w.at("label").get<std::string>());
    p.e.push_back(w.at("value").get<double>());
  }
  return p;
}

inline json choi_to_json(const ChoiMatrix& c) {
  json j;
  j["d_in"] = c.d_in;
  j["d_out"] = c.d_out;
  j["matrix"] = matrix_to_json(c.J);
  return j;
}

inline ChoiMatrix choi_from_json(const json& j) {
  ChoiMatrix c;
  c.d_in = j.at("d_in").get<int>();
  c.d_out = j.at("d_out").get<int>();
  c.J = matrix_from_json(j.at("matrix"));
  if (c.J.rows() != c.d_in * c.d_out || !c.J.square())
    throw std::invalid_argument("choi: matrix dimension is not d_in*d_out");
  return c;
}

inline json solution_to_json(const Solution& s) {
  json j;
  j["status"] = to_string(s.status);
  j["objective_value"] = s.objective_value;
  j["iterations"] = s.iterations;
  j["primal_residual"] = s.primal_residual;
  j["dual_residual"] = s.dual_residual;
  j["cone_residual"] = s.cone_residual;
  return j;
}

inline json validation_to_json(const ValidationReport& r) {
  json j;
  j["valid"] = r.valid();
  json v = json::array();
  for (const auto& item : r.violations)
    v.push_back(json{{"what", item.what}, {"label", item.label}, {"magnitude", item.magnitude}});
  j["violations"] = std::move(v);
  return j;
}

// ---------------------------------------------------------------------------
// File helpers

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return j;
}

inline void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open file for writing: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace qdef
