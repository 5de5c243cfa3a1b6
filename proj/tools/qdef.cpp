// qdef: comparison of quantum statistical experiments from the command line.

#include <qdef/covariant.hpp>
#include <qdef/defcomp.hpp>
#include <qdef/gaussmod.hpp>
#include <qdef/json_io.hpp>
#include <qdef/morphism.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitFails = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitNoConvergence = 3;

using qdef::json;

struct GlobalOpts {
  double tol = 1e-7;
  long max_iter = 200000;
  int threads = 1;
  std::string format = "json";
  std::string output;
};

void add_common_flags(CLI::App* cmd, GlobalOpts& g) {
  cmd->add_option("--tol", g.tol, "solver tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", g.max_iter, "solver iteration cap")->check(CLI::PositiveNumber);
  cmd->add_option("--threads", g.threads, "worker threads for block projections")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--format", g.format, "output format: json, text, or csv")
      ->check(CLI::IsMember({"json", "text", "csv"}));
  cmd->add_option("--output", g.output, "write the report to a file instead of stdout");
}

qdef::SolveOptions solve_opts(const GlobalOpts& g) {
  qdef::SolveOptions o;
  o.tol = g.tol;
  o.max_iter = g.max_iter;
  o.threads = g.threads;
  return o;
}

json envelope(const std::string& command, const GlobalOpts& g) {
  json j;
  j["tool"] = "qdef";
  j["version"] = kVersion;
  j["command"] = command;
  j["options"] = json{{"tol", g.tol}, {"max_iter", g.max_iter}, {"threads", g.threads}};
  return j;
}

void render_text(const json& j, const std::string& prefix, std::ostream& os) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items())
      render_text(value, prefix.empty() ? key : prefix + "." + key, os);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      render_text(j[i], prefix + "[" + std::to_string(i) + "]", os);
  } else {
    os << prefix << " = " << j.dump() << "\n";
  }
}

void write_out(const std::string& text, const GlobalOpts& g) {
  if (g.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(g.output);
  if (!out) throw std::invalid_argument("cannot open output file: " + g.output);
  out << text;
}

/// Renders the report; csv_table, when nonempty, carries the rows used by the
/// csv format (first row is the header).
int emit(const json& report, const GlobalOpts& g,
         const std::vector<std::vector<std::string>>& csv_table = {}) {
  if (g.format == "json") {
    write_out(report.dump(2) + "\n", g);
  } else if (g.format == "text") {
    std::ostringstream os;
    render_text(report, "", os);
    write_out(os.str(), g);
  } else {
    if (csv_table.empty())
      throw std::invalid_argument("csv format is not available for this command");
    std::ostringstream os;
    for (const auto& row : csv_table) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
      os << "\n";
    }
    write_out(os.str(), g);
  }
  return kExitOk;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json solver_json(const qdef::Solution& s) { return qdef::solution_to_json(s); }

qdef::Experiment load_experiment(const std::string& path) {
  return qdef::experiment_from_json(qdef::load_json_file(path));
}

json deficiency_report_json(const qdef::DeficiencyReport& rep) {
  json j;
  j["value"] = rep.value;
  json errs = json::array();
  for (std::size_t i = 0; i < rep.labels.size(); ++i)
    errs.push_back(json{{"label", rep.labels[i]}, {"error", rep.per_label_error[i]}});
  j["per_label_error"] = std::move(errs);
  j["channel"] = qdef::choi_to_json(rep.channel);
  j["solver"] = solver_json(rep.solver);
  return j;
}

// --- matrix expression parser for --aprime ---------------------------------
// forms: "rot(30)", "diag(1.5,1.2)", "[[a,b],[c,d]]", optionally "s*" scaled.

qdef::Mat2 parse_mat2_expr(std::string expr) {
  auto fail = [&]() -> qdef::Mat2 {
    throw std::invalid_argument("cannot parse matrix expression: " + expr);
  };
  std::string s;
  for (char c : expr)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  double scale = 1.0;
  const auto star = s.find('*');
  if (star != std::string::npos && (s.compare(star + 1, 4, "rot(") == 0 ||
                                    s.compare(star + 1, 5, "diag(") == 0 ||
                                    s[star + 1] == '[')) {
    scale = std::stod(s.substr(0, star));
    s = s.substr(star + 1);
  }
  qdef::Mat2 m;
  if (s.rfind("rot(", 0) == 0 && s.back() == ')') {
    const double deg = std::stod(s.substr(4, s.size() - 5));
    m = qdef::Mat2::rotation(deg * M_PI / 180.0);
  } else if (s.rfind("diag(", 0) == 0 && s.back() == ')') {
    const std::string body = s.substr(5, s.size() - 6);
    const auto comma = body.find(',');
    if (comma == std::string::npos) return fail();
    m = qdef::Mat2::diag(std::stod(body.substr(0, comma)), std::stod(body.substr(comma + 1)));
  } else if (!s.empty() && s.front() == '[') {
    json j = json::parse(s, nullptr, true);
    if (!j.is_array() || j.size() != 2 || j[0].size() != 2 || j[1].size() != 2) return fail();
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) m.a[i][k] = j[i][k].get<double>();
  } else {
    return fail();
  }
  return m * scale;
}

qdef::Mat2 mat2_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || j[0].size() != 2 || j[1].size() != 2)
    throw std::invalid_argument("expected a 2x2 real matrix as [[a,b],[c,d]]");
  qdef::Mat2 m;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) m.a[i][k] = j[i][k].get<double>();
  return m;
}

json mat2_to_json(const qdef::Mat2& m) {
  return json::array({json::array({m.a[0][0], m.a[0][1]}), json::array({m.a[1][0], m.a[1][1]})});
}

int solver_exit(const qdef::Solution& s, int ok_code) {
  return s.status == qdef::SolveStatus::optimal ? ok_code : kExitNoConvergence;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"comparison of quantum statistical experiments"};
  app.set_version_flag("--version", std::string("qdef ") + kVersion);
  app.require_subcommand(1);

  GlobalOpts g;

  // validate
  std::string in_a, in_b;
  auto* cmd_validate = app.add_subcommand("validate", "check experiment invariants");
  cmd_validate->add_option("experiment", in_a, "experiment JSON file")->required();
  add_common_flags(cmd_validate, g);

  // deficiency
  bool check_flag = false;
  double check_tol = 1e-6;
  std::string profile_path;
  auto* cmd_def = app.add_subcommand("deficiency", "quantum deficiency via the channel SDP");
  cmd_def->add_option("E", in_a, "source experiment JSON")->required();
  cmd_def->add_option("F", in_b, "target experiment JSON")->required();
  cmd_def->add_option("--profile", profile_path, "per-label error budget JSON");
  cmd_def->add_flag("--check", check_flag, "exit 1 unless the value is within --check-tol");
  cmd_def->add_option("--check-tol", check_tol, "threshold for --check");
  add_common_flags(cmd_def, g);

  // classical-deficiency
  auto* cmd_cdef =
      app.add_subcommand("classical-deficiency", "stochastic-matrix LP on diagonal experiments");
  cmd_cdef->add_option("P", in_a, "source experiment JSON (diagonal states)")->required();
  cmd_cdef->add_option("Q", in_b, "target experiment JSON (diagonal states)")->required();
  add_common_flags(cmd_cdef, g);

  // binary-check
  double e0 = 0.0, e1 = 0.0, margin_tol = 1e-6;
  qdef::BinaryGrid grid;
  std::string emit_csv;
  auto* cmd_bin = app.add_subcommand("binary-check", "two-decision trace-norm criterion");
  cmd_bin->add_option("E", in_a, "source experiment JSON")->required();
  cmd_bin->add_option("F", in_b, "target experiment JSON")->required();
  cmd_bin->add_option("--e0", e0, "allowed error for the first label");
  cmd_bin->add_option("--e1", e1, "allowed error for the second label");
  cmd_bin->add_option("--margin-tol", margin_tol, "tolerance on the worst margin");
  cmd_bin->add_option("--s-min", grid.s_min, "grid lower end");
  cmd_bin->add_option("--s-max", grid.s_max, "grid upper end");
  cmd_bin->add_option("--s-points", grid.points, "number of grid points");
  cmd_bin->add_option("--emit-csv", emit_csv, "write the (s, lhs, rhs) curve to a CSV file");
  add_common_flags(cmd_bin, g);

  // bayes-gap
  std::string loss_path, decision_path, prior_path;
  auto* cmd_bayes = app.add_subcommand("bayes-gap", "optimal-vs-reference Bayes risk difference");
  cmd_bayes->add_option("E", in_a, "source experiment JSON")->required();
  cmd_bayes->add_option("F", in_b, "target experiment JSON")->required();
  cmd_bayes->add_option("--loss", loss_path, "loss family JSON")->required();
  cmd_bayes->add_option("--decision", decision_path, "decision channel (Choi) JSON")->required();
  cmd_bayes->add_option("--prior", prior_path, "prior JSON")->required();
  add_common_flags(cmd_bayes, g);

  // covariant depolarizing | weyl
  auto* cmd_cov = app.add_subcommand("covariant", "closed-form covariant comparisons");
  cmd_cov->require_subcommand(1);
  std::string inst_path;
  auto* cmd_dep = cmd_cov->add_subcommand("depolarizing", "piecewise closed form");
  cmd_dep->add_option("instance", inst_path, "instance JSON {u, target}")->required();
  add_common_flags(cmd_dep, g);
  auto* cmd_weyl = cmd_cov->add_subcommand("weyl", "discrete Weyl orbit reduction");
  cmd_weyl->add_option("instance", inst_path, "instance JSON {d, rho0, sigma0}")->required();
  add_common_flags(cmd_weyl, g);

  // gaussian
  std::string gauss_path, aprime_expr;
  double iso_a = 0.0;
  auto* cmd_gauss = app.add_subcommand("gaussian", "Gaussian shift comparison conditions");
  cmd_gauss->add_option("instance", gauss_path, "instance JSON {Sigma_rho, Sigma_sigma, A, B}");
  cmd_gauss->add_option("--a", iso_a, "isotropic covariance scale (with --aprime)");
  cmd_gauss->add_option("--aprime", aprime_expr,
                        "A' expression, e.g. \"1.3*rot(30)\" or \"diag(1.5,1.2)\"");
  add_common_flags(cmd_gauss, g);

  // morphism
  auto* cmd_morph = app.add_subcommand("morphism", "linear extension and its classification");
  cmd_morph->add_option("states", in_a, "experiment JSON with the input states")->required();
  cmd_morph->add_option("targets", in_b, "experiment JSON with the target states")->required();
  add_common_flags(cmd_morph, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }

  try {
    if (cmd_validate->parsed()) {
      qdef::Experiment e = load_experiment(in_a);
      qdef::ValidationReport rep = qdef::validate(e);
      json out = envelope("validate", g);
      out["result"] = qdef::validation_to_json(rep);
      emit(out, g);
      return rep.valid() ? kExitOk : kExitFails;
    }

    if (cmd_def->parsed()) {
      qdef::Experiment e = load_experiment(in_a);
      qdef::Experiment f = load_experiment(in_b);
      qdef::DeficiencyProfile profile = qdef::DeficiencyProfile::zero(e.labels);
      if (!profile_path.empty())
        profile = qdef::profile_from_json(qdef::load_json_file(profile_path));
      qdef::DeficiencyReport rep = qdef::quantum_deficiency(e, f, profile, solve_opts(g));
      json out = envelope("deficiency", g);
      out["result"] = deficiency_report_json(rep);
      if (check_flag) out["result"]["check"] = json{{"tol", check_tol}, {"holds", rep.value <= check_tol}};
      std::vector<std::vector<std::string>> table{{"label", "error"}};
      for (std::size_t i = 0; i < rep.labels.size(); ++i)
        table.push_back({rep.labels[i], fmt_double(rep.per_label_error[i])});
      emit(out, g, table);
      if (rep.solver.status != qdef::SolveStatus::optimal) return kExitNoConvergence;
      return (!check_flag || rep.value <= check_tol) ? kExitOk : kExitFails;
    }

    if (cmd_cdef->parsed()) {
      qdef::Experiment e = load_experiment(in_a);
      qdef::Experiment f = load_experiment(in_b);
      auto P = qdef::experiment_to_classical(e);
      auto Q = qdef::experiment_to_classical(f);
      qdef::require_same_labels(e.labels, f.labels, "classical-deficiency");
      qdef::ClassicalDeficiencyReport rep = qdef::classical_deficiency(P, Q, solve_opts(g));
      json out = envelope("classical-deficiency", g);
      out["result"]["value"] = rep.value;
      json chan = json::array();
      for (const auto& row : rep.channel) chan.push_back(row);
      out["result"]["channel"] = std::move(chan);
      json errs = json::array();
      for (std::size_t i = 0; i < rep.per_label_error.size(); ++i)
        errs.push_back(json{{"label", e.labels[i]}, {"error", rep.per_label_error[i]}});
      out["result"]["per_label_error"] = std::move(errs);
      out["result"]["solver"] = solver_json(rep.solver);
      std::vector<std::vector<std::string>> table{{"label", "error"}};
      for (std::size_t i = 0; i < rep.per_label_error.size(); ++i)
        table.push_back({e.labels[i], fmt_double(rep.per_label_error[i])});
      emit(out, g, table);
      return solver_exit(rep.solver, kExitOk);
    }

    if (cmd_bin->parsed()) {
      qdef::Experiment e = load_experiment(in_a);
      qdef::Experiment f = load_experiment(in_b);
      qdef::BinaryCriterionReport rep = qdef::binary_trace_criterion(e, f, e0, e1, grid, margin_tol);
      json out = envelope("binary-check", g);
      out["result"] = json{{"holds", rep.holds},
                           {"min_margin", rep.min_margin},
                           {"worst_s", rep.worst_s},
                           {"uniform_e", rep.uniform_e},
                           {"uniform_e_s", std::isinf(rep.uniform_e_s) ? json("inf")
                                                                       : json(rep.uniform_e_s)},
                           {"e0", e0},
                           {"e1", e1},
                           {"points", rep.s_grid.size()}};
      std::vector<std::vector<std::string>> table{{"s", "lhs", "rhs"}};
      for (std::size_t i = 0; i < rep.s_grid.size(); ++i)
        table.push_back({fmt_double(rep.s_grid[i]), fmt_double(rep.lhs[i]), fmt_double(rep.rhs[i])});
      if (!emit_csv.empty()) {
        std::ofstream csv(emit_csv);
        if (!csv) throw std::invalid_argument("cannot open csv file: " + emit_csv);
        for (const auto& row : table) {
          for (std::size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << row[i];
          csv << "\n";
        }
      }
      emit(out, g, table);
      return rep.holds ? kExitOk : kExitFails;
    }

    if (cmd_bayes->parsed()) {
      qdef::Experiment e = load_experiment(in_a);
      qdef::Experiment f = load_experiment(in_b);
      qdef::LossFamily loss = qdef::loss_from_json(qdef::load_json_file(loss_path));
      qdef::ChoiMatrix dec = qdef::choi_from_json(qdef::load_json_file(decision_path));
      qdef::Prior prior = qdef::prior_from_json(qdef::load_json_file(prior_path));
      qdef::BayesGapReport rep = qdef::bayes_risk_gap(e, f, loss, dec, prior, solve_opts(g));
      json out = envelope("bayes-gap", g);
      out["result"] = json{{"gap", rep.gap},
                           {"optimal_risk", rep.optimal_risk},
                           {"reference_risk", rep.reference_risk},
                           {"solver", solver_json(rep.solver)}};
      emit(out, g);
      return solver_exit(rep.solver, kExitOk);
    }

    if (cmd_dep->parsed()) {
      json j = qdef::load_json_file(inst_path);
      qdef::DepolarizingInstance inst;
      inst.u = j.at("u").get<double>();
      const auto& t = j.at("target");
      if (!t.is_array() || t.size() != 3)
        throw std::invalid_argument("depolarizing instance: target must be a 3-vector");
      for (int i = 0; i < 3; ++i) inst.target[i] = t[i].get<double>();
      qdef::DepolarizingResult res = qdef::depolarizing_deficiency(inst);
      json out = envelope("covariant depolarizing", g);
      out["result"] = json{{"delta", res.delta}, {"lambda_opt", res.lambda_opt}};
      emit(out, g);
      return kExitOk;
    }

    if (cmd_weyl->parsed()) {
      json j = qdef::load_json_file(inst_path);
      qdef::WeylOrbitInstance inst;
      inst.d = j.at("d").get<int>();
      inst.rho0 = qdef::matrix_from_json(j.at("rho0"));
      inst.sigma0 = qdef::matrix_from_json(j.at("sigma0"));
      qdef::WeylOrbitResult res = qdef::weyl_orbit_deficiency(inst, solve_opts(g));
      json out = envelope("covariant weyl", g);
      out["result"] = json{{"delta", res.delta},
                           {"weights", res.weights},
                           {"solver", solver_json(res.solver)}};
      emit(out, g);
      return solver_exit(res.solver, kExitOk);
    }

    if (cmd_gauss->parsed()) {
      json out = envelope("gaussian", g);
      if (!aprime_expr.empty()) {
        if (!(iso_a > 0.0))
          throw std::invalid_argument("gaussian --aprime requires --a > 0");
        qdef::Mat2 ap = parse_mat2_expr(aprime_expr);
        qdef::IsotropicReport rep = qdef::isotropic_check(iso_a, ap);
        json margins = json::object();
        for (const auto& [k, v] : rep.margins) margins[k] = v;
        out["result"] = json{{"branch", "isotropic"},
                             {"a", iso_a},
                             {"aprime", mat2_to_json(ap)},
                             {"classical", rep.classical},
                             {"quantum", qdef::to_string(rep.quantum)},
                             {"margins", std::move(margins)}};
        emit(out, g);
        return rep.quantum == qdef::Tri::yes ? kExitOk : kExitFails;
      }
      if (gauss_path.empty())
        throw std::invalid_argument("gaussian: provide an instance file or --a/--aprime");
      json j = qdef::load_json_file(gauss_path);
      qdef::Mat2 sr = mat2_from_json(j.at("Sigma_rho"));
      qdef::Mat2 ss = mat2_from_json(j.at("Sigma_sigma"));
      qdef::ShiftModel m{mat2_from_json(j.at("A")), mat2_from_json(j.at("B"))};
      qdef::GaussReport rep = qdef::gaussian_ge_condition(sr, ss, m);
      json margins = json::object();
      for (const auto& [k, v] : rep.margins) margins[k] = v;
      out["result"] = json{{"holds", rep.status == qdef::Tri::yes},
                           {"status", qdef::to_string(rep.status)},
                           {"branch", rep.branch},
                           {"margins", std::move(margins)}};
      emit(out, g);
      return rep.status == qdef::Tri::yes ? kExitOk : kExitFails;
    }

    if (cmd_morph->parsed()) {
      qdef::Experiment states = load_experiment(in_a);
      qdef::Experiment targets = load_experiment(in_b);
      qdef::require_same_labels(states.labels, targets.labels, "morphism");
      json out = envelope("morphism", g);
      try {
        qdef::ExtensionResult res = qdef::linear_extension(states.states, targets.states);
        qdef::TracePreservationReport tp = qdef::check_trace_preserving(res.map);
        qdef::CpReport cp = qdef::check_complete_positivity(res.map);
        qdef::SampledPositivityReport pos = qdef::check_positivity_sampled(res.map, 2000, 1);
        json mat;
        mat["rows"] = qdef::herm_dim(res.map.d_out);
        mat["cols"] = qdef::herm_dim(res.map.d_in);
        mat["entries"] = res.map.m;
        out["result"] = json{
            {"status", res.status == qdef::ExtensionStatus::exact ? "exact" : "partial"},
            {"rank", res.rank},
            {"residual", res.residual},
            {"trace_preserving", json{{"ok", tp.ok}, {"defect", tp.defect}}},
            {"completely_positive",
             json{{"ok", cp.ok}, {"min_choi_eigenvalue", cp.min_choi_eigenvalue}}},
            {"positivity_sampled",
             json{{"ok", pos.ok},
                  {"samples", 2000},
                  {"seed", 1},
                  {"worst_violation", pos.worst_violation}}},
            {"map", json{{"d_in", res.map.d_in}, {"d_out", res.map.d_out}, {"matrix", std::move(mat)}}}};
        emit(out, g);
        const bool holds = res.status == qdef::ExtensionStatus::exact && tp.ok && cp.ok;
        return holds ? kExitOk : kExitFails;
      } catch (const std::invalid_argument& ex) {
        const std::string what = ex.what();
        if (what.find("inconsistent") == std::string::npos) throw;
        out["result"] = json{{"status", "inconsistent"}, {"error", what}};
        emit(out, g);
        return kExitFails;
      }
    }

    std::cerr << "error: no command\n";
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  }
}
