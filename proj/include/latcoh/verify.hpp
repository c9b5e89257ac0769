#pragma once

#include <string>
#include <vector>

#include "latcoh/series.hpp"

namespace latcoh {

struct CheckResult {
  std::string name;
  bool ok = true;
  std::string detail;
  std::string window;
};

struct VerifyReport {
  std::string h, s;
  std::vector<CheckResult> checks;
  bool ok() const;
  size_t failures() const;
};

struct VerifyOptions {
  int64_t nmax = 6;
  size_t samples = 5;  // points for the zeta-sum identity
  size_t jobs = 1;
  size_t budget = default_budget();
};

// identity battery for one (class, semigroup element)
VerifyReport verify_identities(const LatticeContext& ctx, const HClass& h, const IntVec& s, const VerifyOptions& opt);

}  // namespace latcoh
