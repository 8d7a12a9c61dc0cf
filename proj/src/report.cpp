#include "dtph/report.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dtph/controllability.hpp"
#include "dtph/error.hpp"
#include "dtph/pencil.hpp"
#include "dtph/ph.hpp"
#include "dtph/sim.hpp"
#include "dtph/system_io.hpp"

namespace dtph {

namespace {

using nlohmann::json;

const std::vector<std::string> kOrder = {"regular", "completely_causal", "C1", "C2", "O1", "O2",
                                         "stable", "asymptotically_stable", "d-iKYP", "d-sKYP", "d-iPa",
                                         "d-sPa", "d-PR", "d-BR", "d-spH"};

struct EdgeSpec {
  const char* premise;
  const char* conclusion;
  const char* condition;  // "" for unconditional
};

const EdgeSpec kEdges[] = {
    {"d-spH", "d-sKYP", ""},   {"d-sKYP", "d-sPa", ""},   {"d-sPa", "d-sKYP", ""},
    {"d-sPa", "d-BR", ""},     {"d-iKYP", "d-iPa", ""},   {"d-iPa", "d-iKYP", ""},
    {"d-iPa", "d-PR", ""},     {"d-spH", "stable", ""},   {"d-sKYP", "d-spH", "O1"},
    {"d-BR", "d-sPa", "C1"},   {"d-BR", "d-sKYP", "C1"},  {"d-BR", "d-spH", "C1 and O1"},
    {"d-PR", "d-iPa", "C1"},   {"d-PR", "d-iKYP", "C1"},
};

std::optional<bool> lookup(const VerdictMap& v, const std::string& key) {
  const auto it = v.find(key);
  return it == v.end() ? std::nullopt : it->second;
}

std::optional<bool> condition_value(const VerdictMap& v, const std::string& cond) {
  if (cond == "C1 and O1") {
    const auto c = lookup(v, "C1"), o = lookup(v, "O1");
    if (c && o) return *c && *o;
    if ((c && !*c) || (o && !*o)) return false;
    return std::nullopt;
  }
  return lookup(v, cond);
}

json json_value(const std::optional<bool>& v) { return v ? json(*v) : json(nullptr); }

json certificate_json(const LmiCertificate& c) {
  return json{{"status", std::string(to_string(c.status))},
              {"mode", c.mode == SolveMode::Strict ? "strict" : "semidefinite"},
              {"t_star", c.t_star},
              {"upper_bound", std::isfinite(c.upper_bound) ? json(c.upper_bound) : json("inf")},
              {"min_eig_W", c.min_eig_W},
              {"min_eig_X", c.min_eig_X},
              {"rho", c.rho},
              {"forced_zero", c.forced_zero},
              {"on_boundary", c.on_boundary},
              {"note", c.note},
              {"X", matrix_to_json(c.X)}};
}

json realness_json(const RealnessReport& r) {
  json poles = json::array();
  for (const auto& p : r.unstable_poles)
    poles.push_back({{"location", json::array({p.location.real(), p.location.imag()})}, {"cancelled", p.cancelled}});
  return json{{"holds_on_grid", r.holds_on_grid},
              {"proper", r.proper},
              {"margin", std::isfinite(r.margin) ? json(r.margin) : json(nullptr)},
              {"worst_point", json::array({r.worst_point.real(), r.worst_point.imag()})},
              {"points_checked", r.points_checked},
              {"unstable_poles", poles},
              {"notes", r.notes},
              {"caveat", r.caveat}};
}

std::optional<bool> lmi_verdict(const LmiCertificate& c) {
  if (c.status == LmiStatus::Marginal) return std::nullopt;
  return c.feasible();
}

// Storage audit along seeded random trajectories of an index <= 1 system.
bool storage_audit(const DescriptorSystem& sys, const ReducedStandardSystem& red, const Matrix& storage,
                   const SupplyRate& sr) {
  std::mt19937_64 gen(0x5eed);
  std::normal_distribution<double> nd;
  const auto draw = [&](Index rows) {
    Vector v(rows);
    for (Index i = 0; i < rows; ++i) v(i) = Scalar(nd(gen), sys.is_real() ? 0.0 : nd(gen));
    return v;
  };
  for (int run = 0; run < 3; ++run) {
    std::vector<Vector> u;
    for (int k = 0; k < 20; ++k) u.push_back(draw(sys.m()));
    const Vector x0 = red.state_map * draw(red.n()) + red.input_map * u[0];
    const Trajectory tr = simulate(sys, u, x0);
    if (!audit_dissipation(tr, sr, storage, sys.E).dissipative) return false;
  }
  return true;
}

}  // namespace

std::string to_string(EdgeStatus s) {
  switch (s) {
    case EdgeStatus::Holds: return "holds";
    case EdgeStatus::Vacuous: return "vacuous";
    case EdgeStatus::Violated: return "violated";
    case EdgeStatus::CounterexampleReproduced: return "counterexample";
    case EdgeStatus::NotChecked: return "not checked";
  }
  return "?";
}

std::vector<ImplicationEdge> audit_implications(const VerdictMap& verdicts, bool assumption) {
  std::vector<ImplicationEdge> out;
  for (const EdgeSpec& spec : kEdges) {
    ImplicationEdge e;
    e.premise = spec.premise;
    e.conclusion = spec.conclusion;
    e.condition = spec.condition;
    e.kind = e.condition.empty() ? EdgeKind::Unconditional : EdgeKind::Conditional;
    const auto p = lookup(verdicts, e.premise), c = lookup(verdicts, e.conclusion);
    if (!assumption) {
      e.note = "standing assumption (regular, E != 0, completely causal) fails";
    } else if (!p || !c) {
      e.note = "undecided verdict";
    } else if (!*p) {
      e.status = EdgeStatus::Vacuous;
    } else if (e.kind == EdgeKind::Unconditional) {
      e.status = *c ? EdgeStatus::Holds : EdgeStatus::Violated;
    } else {
      const auto cond = condition_value(verdicts, e.condition);
      if (!cond) {
        e.note = "side condition undecided";
      } else if (*cond) {
        e.status = *c ? EdgeStatus::Holds : EdgeStatus::Violated;
      } else if (!*c) {
        e.status = EdgeStatus::CounterexampleReproduced;
        e.note = "side condition " + e.condition + " fails and the implication does not hold";
      } else {
        e.status = EdgeStatus::Holds;
        e.note = "holds although " + e.condition + " fails";
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

const PropertyVerdict* ClassificationReport::find(const std::string& name) const {
  for (const auto& v : verdicts)
    if (v.name == name) return &v;
  return nullptr;
}

std::optional<bool> ClassificationReport::verdict(const std::string& name) const {
  const PropertyVerdict* v = find(name);
  return v ? v->value : std::nullopt;
}

VerdictMap ClassificationReport::verdict_map() const {
  VerdictMap m;
  for (const auto& v : verdicts) m[v.name] = v.value;
  return m;
}

bool ClassificationReport::has_violation() const {
  return std::any_of(implication_audit.begin(), implication_audit.end(),
                     [](const ImplicationEdge& e) { return e.status == EdgeStatus::Violated; });
}

bool ClassificationReport::reproduces(const std::string& premise, const std::string& conclusion) const {
  return std::any_of(implication_audit.begin(), implication_audit.end(), [&](const ImplicationEdge& e) {
    return e.premise == premise && e.conclusion == conclusion && e.status == EdgeStatus::CounterexampleReproduced;
  });
}

json ClassificationReport::to_json() const {
  json v = json::object();
  for (const auto& pv : verdicts) v[pv.name] = {{"value", json_value(pv.value)}, {"note", pv.note}};
  v["index"] = {{"value", index ? json(*index) : json(nullptr)}, {"note", ""}};
  json audit = json::array();
  for (const auto& e : implication_audit)
    audit.push_back({{"premise", e.premise},
                     {"conclusion", e.conclusion},
                     {"condition", e.condition},
                     {"kind", e.kind == EdgeKind::Unconditional ? "unconditional" : "conditional"},
                     {"status", to_string(e.status)},
                     {"note", e.note}});
  return json{{"schema", 1},
              {"generator", "dtph " + tool_version()},
              {"system_hash", system_hash},
              {"time_domain", time_domain == TimeDomain::Discrete ? "discrete" : "continuous"},
              {"assumption_holds", assumption_holds},
              {"verdicts", v},
              {"certificates", certificates},
              {"implication_audit", audit}};
}

std::string ClassificationReport::to_table() const {
  std::ostringstream os;
  const auto show = [](const std::optional<bool>& b) { return b ? (*b ? "yes" : "no") : "undecided"; };
  os << "system " << system_hash.substr(0, 16) << "  index " << (index ? std::to_string(*index) : "-")
     << "  standing assumption " << (assumption_holds ? "holds" : "fails") << "\n";
  for (const auto& v : verdicts) {
    const std::string value = show(v.value);
    os << "  " << v.name << std::string(v.name.size() < 22 ? 22 - v.name.size() : 1, ' ') << value;
    if (!v.note.empty()) os << std::string(value.size() < 11 ? 11 - value.size() : 1, ' ') << "(" << v.note << ")";
    os << "\n";
  }
  os << "implications:\n";
  for (const auto& e : implication_audit) {
    os << "  " << e.premise << " => " << e.conclusion;
    if (!e.condition.empty()) os << " [" << e.condition << "]";
    os << ": " << to_string(e.status);
    if (!e.note.empty()) os << " (" << e.note << ")";
    os << "\n";
  }
  return os.str();
}

ClassificationReport classify(const DescriptorSystem& sys, const ClassificationOptions& opts) {
  require_valid(sys);
  ClassificationReport rep;
  rep.system_hash = system_hash(sys);
  rep.time_domain = sys.time_domain;
  std::map<std::string, PropertyVerdict> v;
  for (const auto& name : kOrder) v[name].name = name;
  const auto set = [&](const std::string& name, std::optional<bool> value, std::string note = "") {
    v[name].value = value;
    v[name].note = std::move(note);
  };
  const auto finish = [&]() {
    for (const auto& name : kOrder) rep.verdicts.push_back(v[name]);
    rep.implication_audit = audit_implications(rep.verdict_map(), rep.assumption_holds);
    return rep;
  };

  const PencilAnalysis pa = analyze_pencil(sys.E, sys.A, opts.tol_rank);
  set("regular", pa.regular);
  if (!pa.regular) {
    for (const auto& name : kOrder)
      if (name != "regular") set(name, std::nullopt, "singular pencil");
    set("C2", check_c2(sys, opts.tol_rank).holds);
    set("O2", check_o2(sys, opts.tol_rank).holds);
    return finish();
  }
  rep.index = pa.index;
  set("completely_causal", pa.completely_causal);
  const bool zero_e = sys.E.norm() == 0.0;
  rep.assumption_holds = pa.completely_causal && !zero_e && sys.time_domain == TimeDomain::Discrete;

  const RankTestReport c1 = check_c1(sys, opts.tol_rank), o1 = check_o1(sys, opts.tol_rank);
  const RankTestReport c2 = check_c2(sys, opts.tol_rank), o2 = check_o2(sys, opts.tol_rank);
  for (const auto* r : {&c1, &c2, &o1, &o2})
    set(to_string(r->property), r->holds, r->marginal ? "marginal rank decision" : "");

  if (sys.time_domain == TimeDomain::Continuous) {
    for (const char* name : {"stable", "asymptotically_stable", "d-iKYP", "d-sKYP", "d-iPa", "d-sPa", "d-PR", "d-BR",
                             "d-spH"})
      set(name, std::nullopt, "continuous-time system: discretize first");
    return finish();
  }

  const StabilityReport st = classify_stability(sys.E, sys.A, opts.lmi);
  set("stable", st.stable, st.agrees() ? "" : "spectral and Lyapunov tests disagree");
  set("asymptotically_stable", st.asymptotically_stable);
  rep.certificates["stability"] = {{"spectral_radius", st.spectral_radius},
                                   {"lyapunov_stable", st.lyapunov_stable},
                                   {"details", st.details}};

  if (pa.completely_causal) {
    for (PassivityKind kind : {PassivityKind::Impedance, PassivityKind::Scattering}) {
      const bool imp = kind == PassivityKind::Impedance;
      const std::string kyp = imp ? "d-iKYP" : "d-sKYP", pa_name = imp ? "d-iPa" : "d-sPa";
      const PassivityVerdict pv = check_passivity(sys, kind, opts.lmi);
      const std::optional<bool> value = lmi_verdict(pv.certificate);
      set(kyp, value, "on the associated standard system");
      std::string note = "quadratic storage from the standard-system KYP inequality";
      std::optional<bool> passive = value;
      if (value && *value && opts.audit_trajectories) {
        const SupplyRate sr = imp ? SupplyRate::impedance(sys.m()) : SupplyRate::scattering(sys.m());
        if (!storage_audit(sys, pv.reduced, pv.storage, sr)) {
          passive = std::nullopt;
          note = "storage failed the trajectory audit";
        }
      }
      set(pa_name, passive, note);
      json cert = certificate_json(pv.certificate);
      cert["storage"] = matrix_to_json(pv.storage);
      rep.certificates[kyp] = cert;
    }
    const PhVerdict ph = is_ph(sys, opts.lmi);
    std::optional<bool> phv = lmi_verdict(ph.certificate);
    set("d-spH", phv, ph.note);
    rep.certificates["d-spH"] = certificate_json(ph.certificate);
  } else {
    for (LmiKind kind : {LmiKind::DiscreteImpedance, LmiKind::DiscreteScattering}) {
      const std::string kyp = kind == LmiKind::DiscreteImpedance ? "d-iKYP" : "d-sKYP";
      const LmiProblem p = build_lmi(sys, kind);
      const LmiCertificate semi = solve_feasibility(p, SolveMode::Semidefinite, opts.lmi);
      const LmiCertificate strict = solve_feasibility(p, SolveMode::Strict, opts.lmi);
      set(kyp, lmi_verdict(semi), "descriptor coefficients (index > 1 has no standard system); X > 0: " +
                                      std::string(strict.feasible() ? "feasible" : "infeasible"));
      rep.certificates[kyp] = certificate_json(semi);
      rep.certificates[kyp + " positive definite"] = certificate_json(strict);
    }
    set("d-iPa", std::nullopt, "index > 1: no finite passivity test");
    set("d-sPa", std::nullopt, "index > 1: no finite passivity test");
    set("d-spH", false, "not completely causal");
  }

  const RealnessReport pr = check_realness(sys, RealnessKind::Positive, opts.grid);
  const RealnessReport br = check_realness(sys, RealnessKind::Bounded, opts.grid);
  set("d-PR", pr.holds_on_grid, pr.caveat);
  set("d-BR", br.holds_on_grid, br.caveat);
  rep.certificates["d-PR"] = realness_json(pr);
  rep.certificates["d-BR"] = realness_json(br);
  return finish();
}

}  // namespace dtph
