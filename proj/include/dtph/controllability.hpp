#pragma once

#include <string>
#include <vector>

#include "dtph/matcore.hpp"
#include "dtph/system.hpp"

namespace dtph {

enum class RankProperty { C1, C2, O1, O2 };

std::string to_string(RankProperty p);

struct RankWitness {
  Scalar lambda;  // unused for C2/O2
  int rank = 0;
  double relative_sigma_min = 0.0;
};

struct RankTestReport {
  RankProperty property = RankProperty::C1;
  bool holds = false;
  /// Some tested point has sigma_min / sigma_max within [tol, 10 tol].
  bool marginal = false;
  std::vector<RankWitness> witnesses;
};

/// rank [lambda E - A, B] = n at every finite spectrum point and one resolvent
/// point. Throws IrregularPencil.
RankTestReport check_c1(const DescriptorSystem& sys, double tol_rank = kTolRank);
/// rank [lambda E^H - A^H, C^H] = n, same evaluation points.
RankTestReport check_o1(const DescriptorSystem& sys, double tol_rank = kTolRank);
/// rank [E, A S, B] = n with S a kernel basis of E. Evaluated for any pencil.
RankTestReport check_c2(const DescriptorSystem& sys, double tol_rank = kTolRank);
/// rank [E^H, A^H T, C^H] = n with T a kernel basis of E^H.
RankTestReport check_o2(const DescriptorSystem& sys, double tol_rank = kTolRank);

}  // namespace dtph
