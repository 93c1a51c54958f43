// Batch command-line surface over the ktorus library: file-based inputs,
// machine-readable JSON reports on stdout (or --out), human summaries on
// stderr.  Exit codes: 0 ok, 1 malformed input / validation, 2 check failed
// beyond tolerance, 3 I/O failure.

#include <CLI11.hpp>
#include <complex>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>

#include "ktorus/errors.hpp"
#include "ktorus/field.hpp"
#include "ktorus/geodesic.hpp"
#include "ktorus/io.hpp"
#include "ktorus/killing.hpp"
#include "ktorus/reconstruct.hpp"
#include "ktorus/search.hpp"
#include "ktorus/trilinear.hpp"

namespace {

using nlohmann::json;
using namespace ktorus;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitCheckFailed = 2;
constexpr int kExitIo = 3;

struct Output {
  std::string out_path;  // empty: stdout
  bool quiet = false;    // --json: suppress stderr chatter

  void emit(const json& report) const {
    if (out_path.empty()) {
      std::cout << report.dump(2) << std::endl;
    } else {
      std::ofstream f(out_path);
      if (!f) throw io_error("cannot open " + out_path + " for writing");
      f << report.dump(2) << "\n";
      if (!f) throw io_error("write failure on " + out_path);
    }
  }

  void note(const std::string& line) const {
    if (!quiet) std::cerr << line << "\n";
  }
};

json envelope(const std::string& command,
              const std::vector<std::pair<std::string, std::string>>& inputs) {
  json inputs_json = json::object();
  for (const auto& [key, path] : inputs)
    inputs_json[key] = {{"path", path}, {"digest", io::file_digest(path)}};
  return json{{"schema", 1},
              {"tool", {{"name", "ktorus"}, {"version", io::version()}}},
              {"command", command},
              {"inputs", inputs_json}};
}

json residual_json(const ResidualReport& rep, bool per_equation) {
  json j{{"norm", rep.norm},
         {"maxAbs", rep.max_abs},
         {"worstNode", {rep.worst.n1, rep.worst.n2}},
         {"equationCount", rep.equation_count}};
  if (per_equation) {
    json arr = json::array();
    for (const auto& [n, r] : rep.per_equation)
      arr.push_back({{"n", {n.n1, n.n2}}, {"re", r.real()}, {"im", r.imag()}});
    j["perEquation"] = arr;
  }
  return j;
}

json constants_json(const KillingConstants& k) {
  return json{{"a", {k.a1, k.a2}}, {"c", {k.c1, k.c2}}};
}

std::vector<double> parse_reals(const std::string& csv, size_t expect, const char* what) {
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      vals.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw validation_error(std::string("cannot parse ") + what + ": " + csv);
    }
  }
  if (expect != 0 && vals.size() != expect)
    throw validation_error(std::string(what) + " needs " + std::to_string(expect) +
                           " comma-separated values");
  return vals;
}

int cmd_check_killing(const std::string& field_path, const std::string& constants_path,
                      bool fit, double tol, bool per_equation, const Output& out) {
  const io::FieldFile ff = io::load_field(field_path);
  std::vector<std::pair<std::string, std::string>> inputs{{"field", field_path}};

  KillingConstants k;
  bool fitted = false;
  if (fit) {
    k = best_constants(ff.field).constants;
    fitted = true;
  } else if (!constants_path.empty()) {
    k = io::load_constants(constants_path);
    inputs.emplace_back("constants", constants_path);
  } else {
    throw validation_error("check-killing: pass --constants or --fit");
  }

  const ResidualReport rep = system_residual(ff.field, k);
  json report = envelope("check-killing", inputs);
  report["constants"] = constants_json(k);
  report["fitted"] = fitted;
  report["tol"] = tol;
  report["residual"] = residual_json(rep, per_equation);

  out.emit(report);
  out.note("check-killing: norm = " + std::to_string(rep.norm) +
           (rep.norm <= tol ? " (pass)" : " (fail)"));
  return rep.norm <= tol ? kExitOk : kExitCheckFailed;
}

int cmd_check_cubic(const std::string& field_path, const std::string& c_csv,
                    const Output& out) {
  const io::FieldFile ff = io::load_field(field_path);
  std::vector<Eigen::Vector2d> nodes;
  for (const auto& [n, v] : ff.field.coeffs())
    if (!n.is_origin()) nodes.push_back(ff.field.node(n));

  std::optional<Eigen::Vector2d> c;
  if (!c_csv.empty()) {
    const auto vals = parse_reals(c_csv, 2, "--c");
    c = Eigen::Vector2d(vals[0], vals[1]);
  }
  const CubicReport rep = cubic_analysis(nodes, c);

  json report = envelope("check-cubic", {{"field", field_path}});
  json dirs = json::array();
  for (const auto& d : rep.admissible_directions) dirs.push_back({d.x(), d.y()});
  report["admissibleDirections"] = dirs;
  if (rep.three_lines)
    report["threeLines"] = {(*rep.three_lines)[0], (*rep.three_lines)[1],
                            (*rep.three_lines)[2]};
  if (rep.given_admissible) report["givenAdmissible"] = *rep.given_admissible;
  out.emit(report);

  if (rep.given_admissible && !*rep.given_admissible) return kExitCheckFailed;
  return kExitOk;
}

int cmd_reconstruct(const std::string& field_path, const std::string& constants_path,
                    const std::string& out_path, double tol, double hessian_tol,
                    const Output& out) {
  const io::FieldFile ff = io::load_field(field_path);
  const KillingConstants k = io::load_constants(constants_path);

  const VWPair vw = compute_vw(ff.field, k);
  const ReconstructChecks checks = residual_checks(ff.field, k, vw);
  const Potential u = integrate_u(ff.field, vw, tol);  // throws exit-2 on inconsistency
  const double hess = hessian_residual(ff.field, k, u);

  io::save_potential(out_path, u, ff.pq);

  json report =
      envelope("reconstruct", {{"field", field_path}, {"constants", constants_path}});
  report["crNorm"] = checks.cr_norm;
  report["consistencyNorm"] = checks.consistency_norm;
  report["hessianResidual"] = hess;
  report["linear"] = {u.linear.first, u.linear.second};
  report["potentialPath"] = out_path;
  out.emit(report);
  out.note("reconstruct: hessian residual = " + std::to_string(hess));
  return hess <= hessian_tol ? kExitOk : kExitCheckFailed;
}

int cmd_geodesic(const std::string& field_path, const std::string& init_csv, double T,
                 double h, const std::string& check_csv, const std::string& traj_path,
                 bool unchecked, const Output& out) {
  const io::FieldFile ff = io::load_field(field_path);
  const auto init_vals = parse_reals(init_csv, 4, "--init");
  const GeodesicState init{init_vals[0], init_vals[1], init_vals[2], init_vals[3]};

  std::vector<ConservedQuantity> which;
  std::stringstream ss(check_csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "energy") which.push_back(ConservedQuantity::energy);
    else if (item == "clairaut") which.push_back(ConservedQuantity::clairaut);
    else if (item == "clairautCube") which.push_back(ConservedQuantity::clairaut_cube);
    else throw validation_error("geodesic: unknown quantity " + item);
  }

  const Trajectory traj = integrate_geodesic(ff.field, init, T, h);
  const auto series = conserved_quantities(ff.field, traj, which, !unchecked);
  if (!traj_path.empty()) io::save_trajectory_csv(traj_path, ff.field, traj);

  json report = envelope("geodesic", {{"field", field_path}});
  report["T"] = T;
  report["h"] = h;
  report["steps"] = traj.states.size() - 1;
  json drifts = json::object();
  for (const auto& [q, s] : series) {
    const char* name = q == ConservedQuantity::energy ? "energy"
                       : q == ConservedQuantity::clairaut ? "clairaut"
                                                          : "clairautCube";
    drifts[name] = {{"initial", s.values.front()}, {"maxDrift", s.max_drift}};
  }
  report["conservation"] = drifts;
  if (!traj_path.empty()) report["trajectoryPath"] = traj_path;
  out.emit(report);
  return kExitOk;
}

TripleSequence truncated(const TripleSequence& s, int band) {
  TripleSequence t(band);
  for (int n = 1; n <= band; ++n) t.set(n, s.x(n), s.y(n), s.z(n));
  return t;
}

int cmd_trilinear(const std::string& seq_path, const std::string& action, double tol,
                  double r0, const std::string& theta_csv, int steps,
                  const std::string& seq_out, const Output& out) {
  std::vector<std::pair<std::string, std::string>> inputs;
  if (!seq_path.empty()) inputs.emplace_back("seq", seq_path);
  json report = envelope("trilinear", inputs);
  report["action"] = action;

  if (action == "growth") {
    const auto phases = parse_reals(theta_csv.empty() ? "0" : theta_csv, 0, "--theta");
    const GrowthResult g = growth_recursion(r0, phases, steps);
    report["r0"] = r0;
    report["steps"] = steps;
    report["rFinal"] = g.r.back();
    report["ratioBoundOK"] = g.ratio_bound_ok;
    report["lowerBound"] = g.lower_bound;
    out.emit(report);
    return g.ratio_bound_ok ? kExitOk : kExitCheckFailed;
  }

  if (seq_path.empty()) throw validation_error("trilinear: --seq is required");
  const TripleSequence s = io::load_sequence(seq_path);

  if (action == "residual") {
    const TrilinearResidual r = trilinear_residual(s);
    report["maxAbs"] = r.max_abs;
    report["l2"] = r.l2;
    report["worst"] = {r.worst[0], r.worst[1]};
    report["equationCount"] = r.equation_count;
    out.emit(report);
    return r.max_abs <= tol ? kExitOk : kExitCheckFailed;
  }
  if (action.rfind("symmetry=", 0) == 0) {
    const int which = std::stoi(action.substr(9));
    const TripleSequence t = apply_symmetry(s, which);
    const TrilinearResidual before = trilinear_residual(s);
    const TrilinearResidual after = trilinear_residual(t);
    report["which"] = which;
    report["residualBefore"] = before.max_abs;
    report["residualAfter"] = after.max_abs;
    if (!seq_out.empty()) {
      io::save_sequence(seq_out, t);
      report["seqOut"] = seq_out;
    }
    out.emit(report);
    return kExitOk;
  }
  if (action == "moduli") {
    const auto violations = moduli_relations(s, 1e-12, tol);
    json arr = json::array();
    for (const auto& v : violations)
      arr.push_back({{"m", v.m}, {"n", v.n}, {"relation", v.relation},
                     {"magnitude", v.magnitude}});
    report["violations"] = arr;
    out.emit(report);
    return violations.empty() ? kExitOk : kExitCheckFailed;
  }
  if (action.rfind("extend=", 0) == 0) {
    const int n = std::stoi(action.substr(7));
    if (n < 2 || s.band() < n - 1)
      throw validation_error("trilinear: extend target needs prefix band >= n-1");
    const ExtendResult r = extend_and_classify(truncated(s, n - 1), n);
    report["n"] = n;
    report["status"] = r.status == ExtendStatus::consistent ? "Consistent"
                       : r.status == ExtendStatus::underdetermined
                           ? "Underdetermined"
                           : "Overdetermined-Inconsistent";
    report["solveResidual"] = r.solve_residual;
    if (r.candidate) {
      json cand = json::array();
      for (const Complex& v : *r.candidate)
        cand.push_back({{"re", v.real()}, {"im", v.imag()}});
      report["candidate"] = cand;
    }
    const auto& cls = r.classification;
    report["classification"] =
        cls.kind == ExtendClassification::Kind::one_dimensional ? "OneDimensional"
        : cls.kind == ExtendClassification::Kind::non_one_dimensional
            ? "NonOneDimensional"
            : "ViolatesSystem";
    if (cls.axis)
      report["axis"] = *cls.axis == Axis::x ? "x" : *cls.axis == Axis::y ? "y" : "z";
    if (cls.witness) report["witness"] = {(*cls.witness)[0], (*cls.witness)[1]};
    out.emit(report);
    return r.status == ExtendStatus::overdetermined_inconsistent ? kExitCheckFailed
                                                                 : kExitOk;
  }
  throw validation_error("trilinear: unknown action " + action);
}

json search_result_json(const SearchResult& res) {
  json j;
  j["constants"] = constants_json(res.constants);
  j["residualNorm"] = res.residual_norm;
  j["converged"] = res.converged;
  j["iterations"] = res.trace.size();
  if (!res.trace.empty()) j["finalObjective"] = res.trace.back().objective;
  if (res.line_energies)
    j["lineEnergies"] = {(*res.line_energies)[0], (*res.line_energies)[1],
                         (*res.line_energies)[2]};
  json coeffs = json::array();
  for (const auto& [n, v] : res.field.coeffs()) {
    if (!n.is_origin() && !n.lex_positive()) continue;
    coeffs.push_back({{"n", {n.n1, n.n2}}, {"re", v.real()}, {"im", v.imag()}});
  }
  j["field"] = {{"schema", 1}, {"coeffs", coeffs}};
  j["label"] = "observational";
  return j;
}

int cmd_search(const std::string& problem_path, std::optional<std::uint64_t> seed,
               const Output& out) {
  SearchProblem p = io::load_problem(problem_path);
  if (seed) p.seed = *seed;
  const SearchResult res = minimize(p);
  json report = envelope("search", {{"problem", problem_path}});
  report["seed"] = p.seed;
  report["result"] = search_result_json(res);
  out.emit(report);
  out.note("search: residual norm = " + std::to_string(res.residual_norm) +
           " (observational)");
  return kExitOk;
}

int cmd_shift(const std::string& problem_path, double lambda0,
              std::optional<std::uint64_t> seed, const Output& out) {
  SearchProblem p = io::load_problem(problem_path);
  if (seed) p.seed = *seed;
  const ShiftExperimentResult res = shift_experiment(p, lambda0);
  json report = envelope("shift", {{"problem", problem_path}});
  report["seed"] = p.seed;
  report["lambda0"] = lambda0;
  report["jointResidual"] = res.joint_residual;
  report["classification"] = res.classification == ShiftClassification::one_dimensional
                                 ? "OneDimensional"
                                 : "PositiveFloor";
  report["result"] = search_result_json(res.result);
  out.emit(report);
  out.note("shift: joint residual = " + std::to_string(res.joint_residual) +
           " (observational)");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral Killing-tensor checks, reconstruction and searches on flat 2-tori"};
  app.set_version_flag("--version", io::version());
  app.require_subcommand(1);

  Output out;
  app.add_option("--out", out.out_path, "write the JSON report here instead of stdout");
  app.add_flag("--json", out.quiet, "machine output only (quiet stderr)");

  // check-killing
  std::string field_path, constants_path;
  bool fit = false, per_equation = false;
  double tol = 1e-9;
  auto* ck = app.add_subcommand("check-killing", "residuals of the quadratic system");
  ck->add_option("--field", field_path)->required();
  ck->add_option("--constants", constants_path);
  ck->add_flag("--fit", fit, "fit the constants by constrained least squares");
  ck->add_option("--tol", tol, "pass threshold on the residual norm");
  ck->add_flag("--per-equation", per_equation, "include per-node residuals");

  // check-cubic
  std::string cubic_field, cubic_c;
  auto* cc = app.add_subcommand("check-cubic", "cubic spectrum constraint / three lines");
  cc->add_option("--field", cubic_field)->required();
  cc->add_option("--c", cubic_c, "c1,c2 to test for admissibility");

  // reconstruct
  std::string r_field, r_constants, r_out;
  double r_tol = 1e-9, r_hessian_tol = 1e-9;
  auto* rc = app.add_subcommand("reconstruct", "solve for the potential and verify");
  rc->add_option("--field", r_field)->required();
  rc->add_option("--constants", r_constants)->required();
  rc->add_option("--out", r_out, "output potential JSON")->required();
  rc->add_option("--tol", r_tol, "consistency tolerance");
  rc->add_option("--hessian-tol", r_hessian_tol, "pass threshold on the grid residual");

  // geodesic
  std::string g_field, g_init = "0,0,1,0", g_check = "energy", g_traj;
  double g_T = 10.0, g_h = 1e-3;
  bool g_unchecked = false;
  auto* gd = app.add_subcommand("geodesic", "integrate the geodesic flow");
  gd->add_option("--field", g_field)->required();
  gd->add_option("--init", g_init, "x,y,vx,vy");
  gd->add_option("--T", g_T)->required();
  gd->add_option("--h", g_h)->required();
  gd->add_option("--check", g_check, "energy,clairaut,clairautCube");
  gd->add_option("--traj-out", g_traj, "trajectory CSV path");
  gd->add_flag("--unchecked", g_unchecked, "skip the one-dimensionality precondition");

  // trilinear
  std::string t_seq, t_action, t_theta, t_seq_out;
  double t_tol = 1e-9, t_r0 = 0.5;
  int t_steps = 100;
  auto* tl = app.add_subcommand("trilinear", "reduced-system operations");
  tl->add_option("--seq", t_seq, "sequence JSON");
  tl->add_option("--action", t_action, "residual|symmetry=K|moduli|extend=N|growth")
      ->required();
  tl->add_option("--tol", t_tol);
  tl->add_option("--r0", t_r0, "growth start value in (0,1)");
  tl->add_option("--theta", t_theta, "growth phases (single value or comma list)");
  tl->add_option("--steps", t_steps, "growth iteration count");
  tl->add_option("--seq-out", t_seq_out, "write the transformed sequence here");

  // search / shift
  std::string s_problem;
  std::uint64_t seed_value = 0;
  auto* se = app.add_subcommand("search", "residual minimization");
  se->add_option("--problem", s_problem)->required();
  auto* seed_opt = se->add_option("--seed", seed_value, "override the problem seed");

  std::string sh_problem;
  double sh_lambda0 = 1.0;
  std::uint64_t sh_seed_value = 0;
  auto* sh = app.add_subcommand("shift", "joint shifted-pair minimization");
  sh->add_option("--problem", sh_problem)->required();
  sh->add_option("--lambda0", sh_lambda0)->required();
  auto* sh_seed_opt = sh->add_option("--seed", sh_seed_value, "override the problem seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (ck->parsed())
      return cmd_check_killing(field_path, constants_path, fit, tol, per_equation, out);
    if (cc->parsed()) return cmd_check_cubic(cubic_field, cubic_c, out);
    if (rc->parsed())
      return cmd_reconstruct(r_field, r_constants, r_out, r_tol, r_hessian_tol, out);
    if (gd->parsed())
      return cmd_geodesic(g_field, g_init, g_T, g_h, g_check, g_traj, g_unchecked, out);
    if (tl->parsed())
      return cmd_trilinear(t_seq, t_action, t_tol, t_r0, t_theta, t_steps, t_seq_out, out);
    if (se->parsed()) {
      std::optional<std::uint64_t> seed;
      if (seed_opt->count()) seed = seed_value;
      return cmd_search(s_problem, seed, out);
    }
    if (sh->parsed()) {
      std::optional<std::uint64_t> seed;
      if (sh_seed_opt->count()) seed = sh_seed_value;
      return cmd_shift(sh_problem, sh_lambda0, seed, out);
    }
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const check_failure& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
