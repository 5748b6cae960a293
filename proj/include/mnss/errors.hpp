#pragma once

#include <stdexcept>
#include <string>

namespace mnss {

// A requested target cannot be met by any sample size (e.g. the adjusted
// R-squared of a pair reaches or exceeds its shrinkage target). Carries the
// pair identity when one is involved; k == r == 0 means "not pair specific".
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(std::string msg, int k = 0, int r = 0)
      : std::runtime_error(std::move(msg)), k_(k), r_(r) {}
  int pair_k() const noexcept { return k_; }
  int pair_r() const noexcept { return r_; }

 private:
  int k_, r_;
};

// Malformed or inconsistent configuration input (file or flags).
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative search or fit failed to reach its tolerance.
class NonConvergenceError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Newton step hit a numerically singular Hessian.
class SingularHessianError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mnss
