#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dtph/kyp.hpp"
#include "dtph/system.hpp"
#include "dtph/transfer.hpp"

namespace dtph {

/// Verdict of one property: true, false, or undecided/not applicable (empty).
struct PropertyVerdict {
  std::string name;
  std::optional<bool> value;
  std::string note;
};

enum class EdgeKind { Unconditional, Conditional };
enum class EdgeStatus { Holds, Vacuous, Violated, CounterexampleReproduced, NotChecked };

std::string to_string(EdgeStatus s);

struct ImplicationEdge {
  std::string premise, conclusion;
  /// Side condition ("C1", "O1", "C1 and O1"); empty for unconditional edges.
  std::string condition;
  EdgeKind kind = EdgeKind::Unconditional;
  EdgeStatus status = EdgeStatus::NotChecked;
  std::string note;
};

using VerdictMap = std::map<std::string, std::optional<bool>>;

/// Checks the passivity implication chart against a set of verdicts.
/// Unconditional edges: d-spH => d-sKYP <=> d-sPa => d-BR, d-iKYP <=> d-iPa
/// => d-PR, d-spH => stable. Conditional: d-sKYP => d-spH under O1; d-BR =>
/// d-sPa, d-sKYP and d-PR => d-iPa, d-iKYP under C1; d-BR => d-spH under C1
/// and O1. A conditional edge whose condition fails while the premise holds
/// and the conclusion does not is a reproduced counterexample. Edges are only
/// checked when `assumption` (regular, E != 0, completely causal) holds.
std::vector<ImplicationEdge> audit_implications(const VerdictMap& verdicts, bool assumption);

/// Fixed grid plus a refined pass just outside the unit circle.
inline RealnessGrid classification_grid() {
  RealnessGrid g;
  g.boundary_angles = 256;
  return g;
}

struct ClassificationOptions {
  LmiOptions lmi;
  RealnessGrid grid = classification_grid();
  double tol_rank = kTolRank;
  /// Cross-check passivity verdicts by auditing the storage on a few
  /// simulated trajectories.
  bool audit_trajectories = true;
};

struct ClassificationReport {
  std::string system_hash;
  TimeDomain time_domain = TimeDomain::Discrete;
  /// Regular, E != 0 and completely causal.
  bool assumption_holds = false;
  std::optional<int> index;
  std::vector<PropertyVerdict> verdicts;
  nlohmann::json certificates = nlohmann::json::object();
  std::vector<ImplicationEdge> implication_audit;

  std::optional<bool> verdict(const std::string& name) const;
  const PropertyVerdict* find(const std::string& name) const;
  VerdictMap verdict_map() const;
  bool has_violation() const;
  bool reproduces(const std::string& premise, const std::string& conclusion) const;

  /// {"schema": 1, "system_hash", "verdicts", "certificates", "implication_audit"}.
  nlohmann::json to_json() const;
  std::string to_table() const;
};

/// Property order: regular, completely_causal, C1, C2, O1, O2, stable,
/// asymptotically_stable, d-iKYP, d-sKYP, d-iPa, d-sPa, d-PR, d-BR, d-spH.
/// Passivity and KYP verdicts for index <= 1 refer to the associated standard
/// system; for index > 1 the KYP inequalities are solved on the descriptor
/// coefficients and passivity is left undecided. Continuous-time systems get
/// the pencil and rank verdicts only.
ClassificationReport classify(const DescriptorSystem& sys, const ClassificationOptions& opts = {});

}  // namespace dtph
