#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace mnss {

// Predictor matrix plus category labels in 1..K. K is inferred as the
// largest label; multinomial fits additionally require every category to be
// present.
struct Dataset {
  Eigen::MatrixXd x;   // n x Q
  Eigen::VectorXi y;   // labels in 1..K

  Eigen::Index rows() const { return y.size(); }
  int categories() const { return y.size() ? y.maxCoeff() : 0; }
};

struct FitOptions {
  int max_iterations = 100;
  double score_tolerance = 1e-8;        // max-norm of the score vector
  double lnl_relative_tolerance = 1e-12;
  double separation_threshold = 15.0;   // |coefficient| beyond this flags separation
};

struct BinaryFit {
  Eigen::VectorXd coefficients;  // [intercept, slopes...]
  double lnl = 0.0;
  double lnl_null = 0.0;
  bool converged = false;
  bool separation = false;
  int iterations = 0;
};

struct MultinomialFit {
  // Row k-2 holds (beta_{0,k}, beta_{1,k}, ..., beta_{Q,k}); category 1 is
  // the reference.
  Eigen::MatrixXd coefficients;  // (K-1) x (Q+1)
  double lnl = 0.0;
  double lnl_null = 0.0;
  bool converged = false;
  bool separation = false;
  int iterations = 0;
};

struct ShrinkageHeuristic {
  double value = 0.0;  // 1 - params/lr; may be negative
  double lr = 0.0;
  int params = 0;
};

// Newton-Raphson maximum likelihood for binary logistic regression on a raw
// design: y01 in {0,1}, x without intercept column (one is added), optional
// fixed offset added to the linear predictor. lnl_null is the closed-form
// intercept-only log-likelihood without the offset.
BinaryFit fit_binary_logistic(const Eigen::MatrixXd& x,
                              const Eigen::VectorXd& y01,
                              const Eigen::VectorXd& offset = Eigen::VectorXd(),
                              const FitOptions& options = FitOptions());

// Dataset front ends. fit_binary requires K == 2 and models category 2
// against the reference category 1.
BinaryFit fit_binary(const Dataset& data, const FitOptions& options = FitOptions());
MultinomialFit fit_multinomial(const Dataset& data,
                               const FitOptions& options = FitOptions());

// Closed-form intercept-only multinomial fit (log frequency ratios); its lnl
// equals the null log-likelihood used everywhere else.
MultinomialFit fit_intercept_only(const Dataset& data);

// LR = -2 (lnl_null - lnl_model), clamped at zero for round-off level
// violations of lnl_model >= lnl_null.
double lr_statistic(double lnl_null, double lnl_model);

ShrinkageHeuristic heuristic_shrinkage(int params, double lr);

namespace detail {

// Shared Newton core for multinomial likelihoods where sub-model k (k=2..K)
// has its own design matrix. The plain multinomial fit passes the same
// augmented design K-1 times; the recalibration fit passes per-sub-model
// [1, lp_k] designs. Parameters are concatenated sub-model segments.
struct GeneralMultinomialFit {
  Eigen::VectorXd theta;
  double lnl = 0.0;
  bool converged = false;
  bool separation = false;
  int iterations = 0;
};

GeneralMultinomialFit fit_multinomial_designs(
    const std::vector<const Eigen::MatrixXd*>& designs, const Eigen::VectorXi& y,
    int k_categories, const FitOptions& options);

}  // namespace detail

}  // namespace mnss
