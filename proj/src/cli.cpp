#include "dtph/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dtph/cayley.hpp"
#include "dtph/error.hpp"
#include "dtph/kyp.hpp"
#include "dtph/ph.hpp"
#include "dtph/report.hpp"
#include "dtph/sim.hpp"
#include "dtph/system_io.hpp"
#include "dtph/transfer.hpp"

namespace dtph::cli {

namespace {

using nlohmann::json;

struct Tolerances {
  double tol_rank = kTolRank;
  double tol_lmi = 1e-8;
  double tol_strict = 1e-6;
  double cond_max = 1e12;
  int jobs = 1;

  LmiOptions lmi() const {
    LmiOptions o;
    o.tol_lmi = tol_lmi;
    o.tol_strict = tol_strict;
    return o;
  }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    const auto b = cur.find_first_not_of(" \t\r"), e = cur.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cur.substr(b, e - b + 1));
  }
  return out;
}

json artifact_header(const SystemFile& in, const std::string& operation) {
  return json{{"generator", "dtph " + tool_version()}, {"input_hash", in.hash}, {"operation", operation}};
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-")
    out << text;
  else
    write_text_file(path, text);
}

json system_artifact(const SystemFile& in, const std::string& operation, const DescriptorSystem& sys,
                     const std::vector<std::string>& notes) {
  json j = artifact_header(in, operation);
  j.update(system_to_json(sys));
  j["notes"] = notes;
  return j;
}

bool assert_list(const ClassificationReport& rep, const std::string& list, std::ostream& err) {
  bool ok = true;
  for (const std::string& name : split(list, ',')) {
    if (name.empty()) continue;
    if (name == "audit") {
      if (rep.has_violation()) {
        err << "assertion failed: implication audit has a violated edge\n";
        ok = false;
      }
      continue;
    }
    if (!rep.find(name)) throw Error(ErrorCode::Parse, "--assert: unknown property \"" + name + "\"");
    if (rep.verdict(name) != true) {
      err << "assertion failed: " << name << " is not true\n";
      ok = false;
    }
  }
  return ok;
}

std::vector<Vector> read_input_csv(const std::string& path, Index m) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, path + ": cannot open input file");
  std::vector<Vector> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> cells = split(line, ',');
    Vector v(m);
    try {
      if (static_cast<Index>(cells.size()) != m) throw Error(ErrorCode::Parse, "column count");
      for (Index i = 0; i < m; ++i) v(i) = parse_complex(cells[static_cast<std::size_t>(i)]);
    } catch (const Error&) {
      if (rows.empty() && lineno == 1) continue;  // header row
      throw Error(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": expected " + std::to_string(m) +
                                        " numeric columns");
    }
    rows.push_back(v);
  }
  return rows;
}

Vector parse_vector(const std::string& text, Index n, const std::string& what) {
  const std::vector<std::string> cells = split(text, ',');
  if (static_cast<Index>(cells.size()) != n)
    throw Error(ErrorCode::Parse, what + ": expected " + std::to_string(n) + " comma-separated entries");
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = parse_complex(cells[static_cast<std::size_t>(i)]);
  return v;
}

int cmd_classify(const std::string& file, const std::string& format, const std::string& out_path,
                 const std::string& asserts, const Tolerances& tol, std::ostream& out, std::ostream& err) {
  const SystemFile in = load_system_file(file);
  for (const auto& w : in.warnings) err << "warning: " << w << "\n";
  ClassificationOptions opts;
  opts.lmi = tol.lmi();
  opts.tol_rank = tol.tol_rank;
  opts.grid.jobs = tol.jobs;
  opts.grid.cond_max = tol.cond_max;
  const ClassificationReport rep = classify(in.system, opts);
  json j = rep.to_json();
  j["input"] = file;
  j["input_hash"] = in.hash;
  j["operation"] = "classify";
  j["notes"] = in.warnings;
  if (format == "table" || format == "both") out << rep.to_table();
  if (format == "json" || format == "both") out << j.dump(2) << "\n";
  if (!out_path.empty()) write_text_file(out_path, j.dump(2) + "\n");
  return assert_list(rep, asserts, err) ? kSuccess : kAssertionFailed;
}

int cmd_to_ph(const std::string& file, const std::string& out_path, bool assert_ph, const Tolerances& tol,
              std::ostream& out, std::ostream& err) {
  const SystemFile in = load_system_file(file);
  const PhVerdict v = is_ph(in.system, tol.lmi());
  json j = artifact_header(in, "to-ph");
  j["is_ph"] = v.is_ph;
  j["notes"] = json::array({v.note});
  if (v.representation) {
    const PhRepresentation& r = *v.representation;
    j.update(system_to_json(r.transformed()));
    j["weight"] = matrix_to_json(r.X);
    j["weight_sqrt"] = matrix_to_json(r.X_half);
    j["weighted_norm"] = r.norm_value;
    j["hamiltonian"] = "0.5 x^H weight x on the standard-system state";
  }
  emit(out_path, j.dump(2) + "\n", out);
  if (!out_path.empty()) out << (v.is_ph ? "scattering pH: yes" : "scattering pH: no") << " (" << v.note << ")\n";
  if (!v.is_ph && assert_ph) {
    err << "assertion failed: not a scattering pH system\n";
    return kAssertionFailed;
  }
  return kSuccess;
}

int cmd_cayley(const std::string& file, const std::string& direction, const std::string& out_path,
               std::ostream& out) {
  const SystemFile in = load_system_file(file);
  const CayleyDirection dir =
      direction == "imp-to-scat" ? CayleyDirection::ImpedanceToScattering : CayleyDirection::ScatteringToImpedance;
  const ExternalCayleyResult r = external_cayley(in.system, dir);
  json j = system_artifact(in, "cayley " + direction, r.transformed, r.notes);
  j["restricted"] = r.restricted;
  if (r.restricted) j["input_basis"] = matrix_to_json(r.input_basis);
  j["feedthrough_condition"] = r.feedthrough_condition;
  emit(out_path, j.dump(2) + "\n", out);
  return kSuccess;
}

int cmd_discretize(const std::string& file, const std::string& alpha_text, const std::string& out_path,
                   std::ostream& out) {
  const SystemFile in = load_system_file(file);
  const Scalar alpha = parse_complex(alpha_text);
  const InternalCayleyResult r = internal_cayley(in.system, alpha);
  json j = system_artifact(in, "discretize", r.discrete, r.notes);
  j["alpha"] = json::array({alpha.real(), alpha.imag()});
  j["resolvent_condition"] = r.resolvent_condition;
  emit(out_path, j.dump(2) + "\n", out);
  return kSuccess;
}

int cmd_simulate(const std::string& file, const std::string& input, const std::string& x0_text, int steps,
                 const std::string& storage, const std::string& csv_path, bool project, bool assert_audit,
                 const Tolerances& tol, std::ostream& out, std::ostream& err) {
  const SystemFile in = load_system_file(file);
  const DescriptorSystem& sys = in.system;
  const Index n = sys.n(), m = sys.m();
  std::vector<Vector> u;
  if (!input.empty() && input != "zero") u = read_input_csv(input, m);
  if (steps < 0) steps = u.empty() ? 10 : static_cast<int>(u.size());
  if (!u.empty() && static_cast<int>(u.size()) < steps)
    throw Error(ErrorCode::Parse, "--input has " + std::to_string(u.size()) + " rows, --steps asks for " +
                                      std::to_string(steps));
  u.resize(static_cast<std::size_t>(steps), Vector::Zero(m));
  const Vector x0 = x0_text.empty() ? Vector(Vector::Zero(n)) : parse_vector(x0_text, n, "--x0");
  SimulateOptions so;
  so.project_initial_state = project;
  so.tol_rank = tol.tol_rank;
  const Trajectory traj = simulate(sys, u, x0, so);

  std::optional<Matrix> X;
  SupplyRate sr = SupplyRate::scattering(m);
  json audit_json;
  bool audit_ok = true;
  if (!storage.empty()) {
    const PassivityKind kind = storage == "impedance" ? PassivityKind::Impedance : PassivityKind::Scattering;
    if (kind == PassivityKind::Impedance) sr = SupplyRate::impedance(m);
    const PassivityVerdict pv = check_passivity(sys, kind, tol.lmi());
    if (pv.passive) {
      X = pv.storage;
      const DissipationAudit a = audit_dissipation(traj, sr, *X, sys.E);
      audit_ok = a.dissipative;
      audit_json = {{"supply", storage},
                    {"dissipative", a.dissipative},
                    {"strictly_dissipative", a.strictly_dissipative},
                    {"conservative", a.conservative},
                    {"max_violation", a.max_violation},
                    {"first_violation", a.first_violation ? json(*a.first_violation) : json(nullptr)},
                    {"storage", matrix_to_json(*X)}};
    } else {
      audit_ok = false;
      audit_json = {{"supply", storage}, {"dissipative", nullptr}, {"note", "no quadratic storage: not passive"}};
    }
  }
  std::ostringstream csv;
  csv << "# generator dtph " << tool_version() << "; input_hash " << in.hash << "\n";
  if (traj.projected_initial_state) csv << "# initial state projected onto the consistent set\n";
  if (!audit_json.is_null() && (csv_path.empty() || csv_path == "-")) csv << "# audit " << audit_json.dump() << "\n";
  csv << trajectory_csv(traj, sys.E, X, sr);
  emit(csv_path, csv.str(), out);
  if (!audit_json.is_null() && !(csv_path.empty() || csv_path == "-")) out << audit_json.dump(2) << "\n";
  if (assert_audit && !audit_ok) {
    err << "assertion failed: dissipation audit\n";
    return kAssertionFailed;
  }
  return kSuccess;
}

int cmd_transfer(const std::string& file, const std::string& points, bool grid_flag, int boundary,
                 const std::string& realness, const std::string& out_path, bool assert_real, const Tolerances& tol,
                 std::ostream& out, std::ostream& err) {
  const SystemFile in = load_system_file(file);
  TransferFunction tf(in.system, tol.cond_max);
  json j = artifact_header(in, "transfer");
  j["points"] = json::array();
  std::vector<Scalar> zs;
  if (!points.empty())
    for (const auto& p : split(points, ',')) zs.push_back(parse_complex(p));
  RealnessGrid grid;
  grid.jobs = tol.jobs;
  grid.cond_max = tol.cond_max;
  grid.boundary_angles = boundary;
  if (grid_flag) {
    const auto g = grid.points();
    zs.insert(zs.end(), g.begin(), g.end());
  }
  for (const Scalar& z : zs) {
    json pt = {{"z", json::array({z.real(), z.imag()})}};
    try {
      pt["T"] = matrix_to_json(tf.evaluate(z));
      pt["residual"] = tf.last_residual();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PoleProximity) throw;
      pt["error"] = e.what();
    }
    j["points"].push_back(pt);
  }
  const Properness pr = is_proper(in.system);
  j["notes"] = in.warnings;
  j["proper"] = {{"proper", pr.proper},
                 {"structural_residual", pr.structural_residual},
                 {"growth_exponent", pr.growth_exponent},
                 {"notes", pr.notes}};
  bool ok = true;
  std::vector<RealnessKind> kinds;
  if (realness == "positive" || realness == "both") kinds.push_back(RealnessKind::Positive);
  if (realness == "bounded" || realness == "both") kinds.push_back(RealnessKind::Bounded);
  for (RealnessKind k : kinds) {
    const RealnessReport r = check_realness(in.system, k, grid);
    ok &= r.holds_on_grid;
    json poles = json::array();
    for (const auto& p : r.unstable_poles)
      poles.push_back({{"location", json::array({p.location.real(), p.location.imag()})}, {"cancelled", p.cancelled}});
    j["realness"][to_string(k)] = {{"holds_on_grid", r.holds_on_grid},
                                   {"margin", std::isfinite(r.margin) ? json(r.margin) : json(nullptr)},
                                   {"worst_point", json::array({r.worst_point.real(), r.worst_point.imag()})},
                                   {"points_checked", r.points_checked},
                                   {"unstable_poles", poles},
                                   {"notes", r.notes},
                                   {"caveat", r.caveat}};
  }
  emit(out_path, j.dump(2) + "\n", out);
  if (assert_real && !ok) {
    err << "assertion failed: realness does not hold on the grid\n";
    return kAssertionFailed;
  }
  return kSuccess;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Parse:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvalidMatrix:
    case ErrorCode::KindMismatch: return kUsageError;
    default: return kNumericalFailure;
  }
}

}  // namespace

Scalar parse_complex(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (c != ' ') s += c;
  const auto fail = [&]() -> Scalar { throw Error(ErrorCode::Parse, "not a number: \"" + raw + "\""); };
  if (s.empty()) return fail();
  const auto to_double = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      fail();
    }
    if (used != t.size()) fail();
    return v;
  };
  const char last = s.back();
  if (last != 'j' && last != 'i') return {to_double(s), 0.0};
  s.pop_back();
  // split at the last sign that is not an exponent sign or the leading one
  std::size_t cut = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;)
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      cut = k;
      break;
    }
  if (cut == std::string::npos) return {0.0, to_double(s)};
  return {to_double(s.substr(0, cut)), to_double(s.substr(cut))};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Passivity and port-Hamiltonian analysis of discrete-time descriptor systems", "dtph"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());
  Tolerances tol;
  app.add_option("--tol-rank", tol.tol_rank, "relative rank threshold")->capture_default_str();
  app.add_option("--tol-lmi", tol.tol_lmi, "LMI feasibility tolerance")->capture_default_str();
  app.add_option("--tol-strict", tol.tol_strict, "strict definiteness threshold")->capture_default_str();
  app.add_option("--cond-max", tol.cond_max, "largest accepted condition number near poles")->capture_default_str();
  app.add_option("--jobs", tol.jobs, "threads for grid evaluation")->capture_default_str()->check(CLI::PositiveNumber);

  std::string file, out_path, format = "both", asserts, direction, alpha = "1", input, x0, storage, points,
                              realness = "both";
  int steps = -1, boundary = 256;
  bool assert_flag = false, grid_flag = false, project = false;

  auto* classify_cmd = app.add_subcommand("classify", "property verdicts and implication audit");
  classify_cmd->add_option("file", file, "system JSON")->required()->check(CLI::ExistingFile);
  classify_cmd->add_option("--format", format, "table, json or both")
      ->check(CLI::IsMember({"table", "json", "both"}))
      ->capture_default_str();
  classify_cmd->add_option("--out", out_path, "also write the JSON report here");
  classify_cmd->add_option("--assert", asserts, "comma-separated properties that must hold (\"audit\": no violated edge)");

  auto* toph_cmd = app.add_subcommand("to-ph", "scattering port-Hamiltonian representation");
  toph_cmd->add_option("file", file, "system JSON")->required()->check(CLI::ExistingFile);
  toph_cmd->add_option("--out", out_path, "output JSON (stdout when omitted)");
  toph_cmd->add_flag("--assert", assert_flag, "exit 1 unless the system is scattering pH");

  auto* cayley_cmd = app.add_subcommand("cayley", "external Cayley transform");
  cayley_cmd->add_option("file", file, "system JSON")->required()->check(CLI::ExistingFile);
  cayley_cmd->add_option("--direction", direction, "imp-to-scat or scat-to-imp")
      ->required()
      ->check(CLI::IsMember({"imp-to-scat", "scat-to-imp"}));
  cayley_cmd->add_option("--out", out_path, "output JSON (stdout when omitted)");

  auto* disc_cmd = app.add_subcommand("discretize", "internal Cayley (Tustin) transform");
  disc_cmd->add_option("file", file, "continuous-time system JSON")->required()->check(CLI::ExistingFile);
  disc_cmd->add_option("--alpha", alpha, "Re alpha > 0; 2/h for step size h")->capture_default_str();
  disc_cmd->add_option("--out", out_path, "output JSON (stdout when omitted)");

  auto* sim_cmd = app.add_subcommand("simulate", "simulate and optionally audit a storage function");
  sim_cmd->add_option("file", file, "system JSON")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--input", input, "CSV with m columns per step, or \"zero\"");
  sim_cmd->add_option("--x0", x0, "comma-separated initial state (default 0)");
  sim_cmd->add_option("--steps", steps, "number of samples (default: input rows, else 10)");
  sim_cmd->add_option("--storage", storage, "supply rate to audit; without it V is 0 and s uses the scattering supply")
      ->check(CLI::IsMember({"impedance", "scattering"}));
  sim_cmd->add_option("--out-csv", out_path, "trajectory CSV (stdout when omitted)");
  sim_cmd->add_flag("--project-x0", project, "replace an inconsistent algebraic part of x0");
  sim_cmd->add_flag("--assert", assert_flag, "exit 1 unless the storage audit passes");

  auto* tf_cmd = app.add_subcommand("transfer", "transfer function values and realness");
  tf_cmd->add_option("file", file, "system JSON")->required()->check(CLI::ExistingFile);
  tf_cmd->add_option("--points", points, "comma-separated evaluation points, e.g. 2,1+1j");
  tf_cmd->add_flag("--grid", grid_flag, "also evaluate on the realness grid");
  tf_cmd->add_option("--boundary", boundary, "samples on the refined circle |z| = 1 + 1e-6 (0: fixed grid only)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  tf_cmd->add_option("--realness", realness, "positive, bounded, both or none")
      ->check(CLI::IsMember({"positive", "bounded", "both", "none"}))
      ->capture_default_str();
  tf_cmd->add_option("--out", out_path, "output JSON (stdout when omitted)");
  tf_cmd->add_flag("--assert", assert_flag, "exit 1 unless the requested realness holds on the grid");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*classify_cmd) return cmd_classify(file, format, out_path, asserts, tol, out, err);
    if (*toph_cmd) return cmd_to_ph(file, out_path, assert_flag, tol, out, err);
    if (*cayley_cmd) return cmd_cayley(file, direction, out_path, out);
    if (*disc_cmd) return cmd_discretize(file, alpha, out_path, out);
    if (*sim_cmd)
      return cmd_simulate(file, input, x0, steps, storage, out_path, project, assert_flag, tol, out, err);
    if (*tf_cmd) return cmd_transfer(file, points, grid_flag, boundary, realness, out_path, assert_flag, tol, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kUsageError;
}

}  // namespace dtph::cli
