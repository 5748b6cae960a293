#include "mnss/glm.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mnss/errors.hpp"
#include "mnss/rsq.hpp"

namespace mnss {

namespace {

double binary_lnl(const Eigen::VectorXd& eta, const Eigen::VectorXd& y01) {
  // log(1+e^eta) = max(eta,0) + log1p(exp(-|eta|)), vectorised
  const auto e = eta.array();
  return (y01.array() * e).sum() -
         (e.max(0.0) + (-e.abs()).exp().log1p()).sum();
}

std::vector<std::int64_t> category_counts(const Eigen::VectorXi& y, int k_categories) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(k_categories), 0);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] < 1 || y[i] > k_categories) {
      throw std::invalid_argument("labels must lie in 1.." +
                                  std::to_string(k_categories) + ", got " +
                                  std::to_string(y[i]));
    }
    ++counts[static_cast<std::size_t>(y[i] - 1)];
  }
  return counts;
}

// Reciprocal condition estimate from the LDLT diagonal; cheap and adequate
// for flagging numerically singular Hessians.
bool ldlt_near_singular(const Eigen::LDLT<Eigen::MatrixXd>& ldlt) {
  const Eigen::VectorXd d = ldlt.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  const double dmin = d.cwiseAbs().minCoeff();
  return !(dmin > 0.0) || dmin / dmax < 1e-12;
}

}  // namespace

BinaryFit fit_binary_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y01,
                              const Eigen::VectorXd& offset,
                              const FitOptions& options) {
  const Eigen::Index n = y01.size();
  if (n == 0) throw std::invalid_argument("fit_binary_logistic: empty data");
  if (x.rows() != 0 && x.rows() != n) {
    throw std::invalid_argument("fit_binary_logistic: x rows do not match y");
  }
  const bool has_offset = offset.size() != 0;
  if (has_offset && offset.size() != n) {
    throw std::invalid_argument("fit_binary_logistic: offset length mismatch");
  }
  double events = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y01[i] != 0.0 && y01[i] != 1.0) {
      throw std::invalid_argument("fit_binary_logistic: y must be 0/1");
    }
    events += y01[i];
  }
  if (events == 0.0 || events == static_cast<double>(n)) {
    throw std::invalid_argument("fit_binary_logistic: both classes must be present");
  }

  const Eigen::Index q = x.cols();
  Eigen::MatrixXd design(n, q + 1);
  design.col(0).setOnes();
  if (q > 0) design.rightCols(q) = x;

  BinaryFit fit;
  fit.lnl_null = lnl_null_binary(static_cast<std::int64_t>(events),
                                 static_cast<std::int64_t>(n - events));
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(q + 1);
  Eigen::VectorXd eta = has_offset ? offset.eval() : Eigen::VectorXd::Zero(n);
  double lnl = binary_lnl(eta, y01);
  int stagnant = 0;

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    fit.iterations = iter;
    const Eigen::ArrayXd p = 1.0 / (1.0 + (-eta.array()).exp());
    const Eigen::VectorXd score = design.transpose() * (y01.array() - p).matrix();
    if (score.cwiseAbs().maxCoeff() < options.score_tolerance) {
      fit.converged = true;
      fit.iterations = iter - 1;
      break;
    }
    const Eigen::ArrayXd w = p * (1.0 - p);
    const Eigen::MatrixXd wdesign = design.array().colwise() * w;
    const Eigen::MatrixXd hess = design.transpose() * wdesign;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    if (ldlt.info() != Eigen::Success || ldlt_near_singular(ldlt)) {
      throw SingularHessianError(
          "fit_binary_logistic: singular Hessian (collinear predictors?)");
    }
    const Eigen::VectorXd step = ldlt.solve(score);

    // When the predicted gain score.step drops below the floating-point
    // noise of the likelihood sum, halving on lnl comparisons only rejects
    // good steps; the full Newton step is safe on a concave likelihood.
    const double lnl_noise = 1e-11 * (std::fabs(lnl) + 1.0);
    const bool near_optimum = score.dot(step) <= lnl_noise;
    double t = 1.0;
    double lnl_new;
    Eigen::VectorXd beta_new, eta_new;
    for (int h = 0;; ++h) {
      beta_new = beta + t * step;
      eta_new = design * beta_new;
      if (has_offset) eta_new += offset;
      lnl_new = binary_lnl(eta_new, y01);
      if (near_optimum || lnl_new >= lnl || h >= 40) break;
      t *= 0.5;
    }
    const bool improving = lnl_new > lnl + 1e-12 * std::fabs(lnl);
    const double rel_change = std::fabs(lnl_new - lnl) / (std::fabs(lnl) + 1.0);
    beta.swap(beta_new);
    eta.swap(eta_new);
    lnl = lnl_new;
    if (beta.cwiseAbs().maxCoeff() > options.separation_threshold && improving) {
      fit.separation = true;
      break;
    }
    // stagnation alone is not enough: with large n the likelihood flattens
    // while the score is still above tolerance, so require it to persist
    stagnant = (rel_change < options.lnl_relative_tolerance) ? stagnant + 1 : 0;
    if (stagnant >= 3) break;
  }

  fit.coefficients = beta;
  fit.lnl = lnl;
  if (!fit.converged && !fit.separation) {
    // the loop ended on stagnation or the iteration cap; settle via the score
    const Eigen::ArrayXd p = 1.0 / (1.0 + (-eta.array()).exp());
    const Eigen::VectorXd score = design.transpose() * (y01.array() - p).matrix();
    fit.converged = score.cwiseAbs().maxCoeff() < options.score_tolerance;
  }
  return fit;
}

BinaryFit fit_binary(const Dataset& data, const FitOptions& options) {
  if (data.categories() != 2) {
    throw std::invalid_argument("fit_binary: labels must be in {1,2}");
  }
  Eigen::VectorXd y01(data.y.size());
  for (Eigen::Index i = 0; i < data.y.size(); ++i) {
    if (data.y[i] != 1 && data.y[i] != 2) {
      throw std::invalid_argument("fit_binary: labels must be in {1,2}");
    }
    y01[i] = (data.y[i] == 2) ? 1.0 : 0.0;
  }
  return fit_binary_logistic(data.x, y01, Eigen::VectorXd(), options);
}

namespace detail {

namespace {

// log of the softmax denominator, log(1 + sum_k e^{eta_k}), row-wise and
// overflow safe.
Eigen::ArrayXd multinomial_logden(const Eigen::MatrixXd& eta) {
  const Eigen::ArrayXd m = eta.rowwise().maxCoeff().cwiseMax(0.0).array();
  Eigen::ArrayXd denom = (-m).exp();
  for (Eigen::Index k = 0; k < eta.cols(); ++k) {
    denom += (eta.col(k).array() - m).exp();
  }
  return m + denom.log();
}

double multinomial_lnl(const Eigen::MatrixXd& eta, const Eigen::VectorXi& y) {
  double lnl = -multinomial_logden(eta).sum();
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] >= 2) lnl += eta(i, y[i] - 2);
  }
  return lnl;
}

void multinomial_probs(const Eigen::MatrixXd& eta, Eigen::MatrixXd& pr) {
  const Eigen::ArrayXd logden = multinomial_logden(eta);
  pr.resize(eta.rows(), eta.cols());
  for (Eigen::Index k = 0; k < eta.cols(); ++k) {
    pr.col(k) = (eta.col(k).array() - logden).exp();
  }
}

}  // namespace

GeneralMultinomialFit fit_multinomial_designs(
    const std::vector<const Eigen::MatrixXd*>& designs, const Eigen::VectorXi& y,
    int k_categories, const FitOptions& options) {
  const int km1 = k_categories - 1;
  if (km1 < 1 || static_cast<int>(designs.size()) != km1) {
    throw std::invalid_argument("fit_multinomial_designs: need K-1 designs");
  }
  const Eigen::Index n = y.size();
  std::vector<Eigen::Index> off(static_cast<std::size_t>(km1) + 1, 0);
  for (int k = 0; k < km1; ++k) {
    if (designs[static_cast<std::size_t>(k)]->rows() != n) {
      throw std::invalid_argument("fit_multinomial_designs: design rows mismatch");
    }
    off[static_cast<std::size_t>(k) + 1] =
        off[static_cast<std::size_t>(k)] + designs[static_cast<std::size_t>(k)]->cols();
  }
  const Eigen::Index p_total = off.back();

  // indicator matrix for non-reference categories
  Eigen::MatrixXd ind = Eigen::MatrixXd::Zero(n, km1);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y[i] >= 2) ind(i, y[i] - 2) = 1.0;
  }

  GeneralMultinomialFit fit;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p_total);
  Eigen::MatrixXd eta = Eigen::MatrixXd::Zero(n, km1);
  Eigen::MatrixXd pr;
  double lnl = multinomial_lnl(eta, y);
  int stagnant = 0;

  Eigen::VectorXd score(p_total);
  Eigen::MatrixXd hess(p_total, p_total);
  Eigen::MatrixXd wdb;  // weighted-design workspace, reused across iterations

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    fit.iterations = iter;
    multinomial_probs(eta, pr);
    for (int a = 0; a < km1; ++a) {
      const Eigen::MatrixXd& da = *designs[static_cast<std::size_t>(a)];
      score.segment(off[static_cast<std::size_t>(a)], da.cols()) =
          da.transpose() * (ind.col(a) - pr.col(a));
    }
    if (score.cwiseAbs().maxCoeff() < options.score_tolerance) {
      fit.converged = true;
      fit.iterations = iter - 1;
      break;
    }
    for (int a = 0; a < km1; ++a) {
      const Eigen::MatrixXd& da = *designs[static_cast<std::size_t>(a)];
      for (int b = a; b < km1; ++b) {
        const Eigen::MatrixXd& db = *designs[static_cast<std::size_t>(b)];
        Eigen::ArrayXd w;
        if (a == b) {
          w = pr.col(a).array() * (1.0 - pr.col(a).array());
        } else {
          w = -pr.col(a).array() * pr.col(b).array();
        }
        wdb.resize(n, db.cols());
        wdb = db.array().colwise() * w;
        hess.block(off[static_cast<std::size_t>(a)], off[static_cast<std::size_t>(b)],
                   da.cols(), db.cols()).noalias() = da.transpose() * wdb;
        if (b != a) {
          hess.block(off[static_cast<std::size_t>(b)], off[static_cast<std::size_t>(a)],
                     db.cols(), da.cols()) =
              hess.block(off[static_cast<std::size_t>(a)],
                         off[static_cast<std::size_t>(b)], da.cols(), db.cols())
                  .transpose();
        }
      }
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    if (ldlt.info() != Eigen::Success || ldlt_near_singular(ldlt)) {
      throw SingularHessianError("fit_multinomial: singular Hessian");
    }
    const Eigen::VectorXd step = ldlt.solve(score);

    // near the optimum the lnl comparison is fp-noise bound; see the binary
    // engine for the rationale
    const double lnl_noise = 1e-11 * (std::fabs(lnl) + 1.0);
    const bool near_optimum = score.dot(step) <= lnl_noise;
    double t = 1.0;
    double lnl_new;
    Eigen::VectorXd theta_new;
    Eigen::MatrixXd eta_new(n, km1);
    for (int h = 0;; ++h) {
      theta_new = theta + t * step;
      for (int a = 0; a < km1; ++a) {
        eta_new.col(a) = *designs[static_cast<std::size_t>(a)] *
                         theta_new.segment(off[static_cast<std::size_t>(a)],
                                           designs[static_cast<std::size_t>(a)]->cols());
      }
      lnl_new = multinomial_lnl(eta_new, y);
      if (near_optimum || lnl_new >= lnl || h >= 40) break;
      t *= 0.5;
    }
    const bool improving = lnl_new > lnl + 1e-12 * std::fabs(lnl);
    const double rel_change = std::fabs(lnl_new - lnl) / (std::fabs(lnl) + 1.0);
    theta.swap(theta_new);
    eta.swap(eta_new);
    lnl = lnl_new;
    if (theta.cwiseAbs().maxCoeff() > options.separation_threshold && improving) {
      fit.separation = true;
      break;
    }
    stagnant = (rel_change < options.lnl_relative_tolerance) ? stagnant + 1 : 0;
    if (stagnant >= 3) break;
  }

  fit.theta = theta;
  fit.lnl = lnl;
  if (!fit.converged && !fit.separation) {
    multinomial_probs(eta, pr);
    for (int a = 0; a < km1; ++a) {
      const Eigen::MatrixXd& da = *designs[static_cast<std::size_t>(a)];
      score.segment(off[static_cast<std::size_t>(a)], da.cols()) =
          da.transpose() * (ind.col(a) - pr.col(a));
    }
    fit.converged = score.cwiseAbs().maxCoeff() < options.score_tolerance;
  }
  return fit;
}

}  // namespace detail

MultinomialFit fit_multinomial(const Dataset& data, const FitOptions& options) {
  const int k_categories = data.categories();
  if (k_categories < 2) {
    throw std::invalid_argument("fit_multinomial: need K >= 2");
  }
  const auto counts = category_counts(data.y, k_categories);
  for (int k = 0; k < k_categories; ++k) {
    if (counts[static_cast<std::size_t>(k)] == 0) {
      throw std::invalid_argument("fit_multinomial: category " +
                                  std::to_string(k + 1) + " absent from data");
    }
  }
  const Eigen::Index n = data.rows();
  const Eigen::Index q = data.x.cols();
  Eigen::MatrixXd design(n, q + 1);
  design.col(0).setOnes();
  if (q > 0) design.rightCols(q) = data.x;
  std::vector<const Eigen::MatrixXd*> designs(
      static_cast<std::size_t>(k_categories - 1), &design);

  const auto general =
      detail::fit_multinomial_designs(designs, data.y, k_categories, options);

  MultinomialFit fit;
  fit.coefficients.resize(k_categories - 1, q + 1);
  for (int k = 0; k < k_categories - 1; ++k) {
    fit.coefficients.row(k) = general.theta.segment(k * (q + 1), q + 1);
  }
  fit.lnl = general.lnl;
  fit.converged = general.converged;
  fit.separation = general.separation;
  fit.iterations = general.iterations;
  fit.lnl_null = lnl_null_multinomial(OutcomeDistribution::from_counts(counts));
  return fit;
}

MultinomialFit fit_intercept_only(const Dataset& data) {
  const int k_categories = data.categories();
  if (k_categories < 2) {
    throw std::invalid_argument("fit_intercept_only: need K >= 2");
  }
  const auto counts = category_counts(data.y, k_categories);
  for (int k = 0; k < k_categories; ++k) {
    if (counts[static_cast<std::size_t>(k)] == 0) {
      throw std::invalid_argument("fit_intercept_only: category " +
                                  std::to_string(k + 1) + " absent from data");
    }
  }
  MultinomialFit fit;
  fit.coefficients = Eigen::MatrixXd::Zero(k_categories - 1, data.x.cols() + 1);
  for (int k = 2; k <= k_categories; ++k) {
    fit.coefficients(k - 2, 0) =
        std::log(static_cast<double>(counts[static_cast<std::size_t>(k - 1)]) /
                 static_cast<double>(counts[0]));
  }
  fit.lnl_null = lnl_null_multinomial(OutcomeDistribution::from_counts(counts));
  fit.lnl = fit.lnl_null;
  fit.converged = true;
  fit.iterations = 0;
  return fit;
}

double lr_statistic(double lnl_null, double lnl_model) {
  const double diff = lnl_model - lnl_null;
  if (diff < 0.0) {
    const double tol = 1e-6 * std::max(1.0, std::fabs(lnl_null));
    if (-diff > tol) {
      throw std::invalid_argument(
          "lr_statistic: model log-likelihood " + std::to_string(lnl_model) +
          " is below the null " + std::to_string(lnl_null) +
          " (models not nested or fit failed)");
    }
    return 0.0;
  }
  return 2.0 * diff;
}

ShrinkageHeuristic heuristic_shrinkage(int params, double lr) {
  if (params < 1) {
    throw std::invalid_argument("heuristic_shrinkage: params must be >= 1");
  }
  if (!(lr > 0.0)) {
    throw std::domain_error("heuristic_shrinkage: LR must be positive");
  }
  ShrinkageHeuristic s;
  s.params = params;
  s.lr = lr;
  s.value = 1.0 - static_cast<double>(params) / lr;
  return s;
}

}  // namespace mnss
