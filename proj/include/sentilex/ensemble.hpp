#pragma once

// Ensemble over formula features: z-score normalization, stability selection
// with a randomized lasso, and a grid-searched regularized linear learner
// (ridge for regression, L2 logistic regression for classification).

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sentilex/common.hpp"
#include "sentilex/evalkit.hpp"
#include "sentilex/formulae.hpp"
#include "sentilex/swn_store.hpp"

namespace sentilex {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct FeatureMatrix {
  std::vector<std::string> keys;
  MatrixXd x;
  std::optional<VectorXd> y;

  std::size_t rows() const { return keys.size(); }
};

// One row of all_formula_features per key, in the order given.
inline FeatureMatrix build_feature_matrix(const std::vector<std::string>& keys,
                                          const SwnStore& store) {
  FeatureMatrix fm;
  fm.keys = keys;
  fm.x.resize(static_cast<Eigen::Index>(keys.size()), kFeatureCount);
  for (std::size_t r = 0; r < keys.size(); ++r) {
    const auto profile = store.sense_profile(keys[r]);
    if (!profile) throw DataError("no SentiWordNet senses for " + keys[r]);
    const FeatureVector f = all_formula_features(*profile);
    for (std::size_t c = 0; c < kFeatureCount; ++c) {
      fm.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = f[c];
    }
  }
  return fm;
}

inline MatrixXd select_rows(const MatrixXd& x, const std::vector<std::size_t>& rows) {
  MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

inline VectorXd select_rows(const VectorXd& y, const std::vector<std::size_t>& rows) {
  VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

// Column z-scores with population statistics from the training data.
// Constant columns get std 1 and are flagged; they normalize to 0.
struct Normalizer {
  VectorXd means;
  VectorXd stds;
  std::vector<bool> constant;

  static Normalizer fit(const MatrixXd& train) {
    if (train.rows() == 0) throw DataError("cannot normalize an empty matrix");
    Normalizer n;
    const auto cols = train.cols();
    n.means = train.colwise().mean().transpose();
    n.stds.resize(cols);
    n.constant.assign(static_cast<std::size_t>(cols), false);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double var =
          (train.col(c).array() - n.means(c)).square().mean();
      const double sd = std::sqrt(var);
      if (sd <= 1e-12 * std::max(1.0, std::abs(n.means(c)))) {
        n.stds(c) = 1.0;
        n.constant[static_cast<std::size_t>(c)] = true;
      } else {
        n.stds(c) = sd;
      }
    }
    return n;
  }

  MatrixXd apply(const MatrixXd& x) const {
    if (x.cols() != means.size()) {
      throw DataError("feature matrix has " + std::to_string(x.cols()) +
                      " columns, normalizer expects " + std::to_string(means.size()));
    }
    MatrixXd z = (x.rowwise() - means.transpose()).array().rowwise() /
                 stds.transpose().array();
    for (std::size_t c = 0; c < constant.size(); ++c) {
      if (constant[c]) z.col(static_cast<Eigen::Index>(c)).setZero();
    }
    return z;
  }
};

struct ZScoreResult {
  MatrixXd train;
  MatrixXd test;
  Normalizer normalizer;
};

inline ZScoreResult zscore_fit_apply(const MatrixXd& train, const MatrixXd& test) {
  ZScoreResult r;
  r.normalizer = Normalizer::fit(train);
  r.train = r.normalizer.apply(train);
  r.test = r.normalizer.apply(test);
  return r;
}

// ---------------------------------------------------------------------------
// Lasso and stability selection

struct LassoOptions {
  double tolerance = 1e-7;  // max absolute coefficient change per sweep
  int max_sweeps = 10000;
};

// Cyclic coordinate descent for
//   (1/2n) ||y - X b||^2 + alpha * sum_j penalty_j |b_j|
// on centered y and columns of X. No intercept. Works on the Gram matrix,
// so a sweep costs O(p^2) whatever the row count.
inline VectorXd lasso_coordinate_descent(const MatrixXd& x, const VectorXd& y,
                                         double alpha, const VectorXd& penalty,
                                         const LassoOptions& opt = {}) {
  const auto n = static_cast<double>(x.rows());
  const auto p = x.cols();
  const MatrixXd gram = x.transpose() * x / n;
  const VectorXd xty = x.transpose() * y / n;
  VectorXd b = VectorXd::Zero(p);
  VectorXd gb = VectorXd::Zero(p);  // gram * b
  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double gjj = gram(j, j);
      if (gjj <= 0.0) continue;
      const double old = b(j);
      const double rho = xty(j) - gb(j) + gjj * old;
      const double thr = alpha * penalty(j);
      double nb = 0.0;
      if (rho > thr) {
        nb = (rho - thr) / gjj;
      } else if (rho < -thr) {
        nb = (rho + thr) / gjj;
      }
      if (nb != old) {
        gb += (nb - old) * gram.col(j);
        b(j) = nb;
        max_change = std::max(max_change, std::abs(nb - old));
      }
    }
    if (max_change < opt.tolerance) break;
  }
  return b;
}

struct StabilityOptions {
  double fraction = 0.75;
  double threshold = 0.25;
  std::size_t resamples = 1000;
  double weakness = 0.5;  // penalty factors drawn uniformly from [weakness, 1]
  // Lasso strength on standardized data; when unset, sqrt(2 ln p / m) for a
  // subsample of m rows.
  std::optional<double> alpha;
  std::uint64_t seed = 0;
  LassoOptions lasso;
};

struct StabilityResult {
  std::vector<double> frequencies;
  std::vector<bool> mask;
  bool fallback = false;  // nothing reached the threshold; all features kept
};

namespace detail {

// Standardizes columns and y of a sample in place; constant columns become 0.
inline void standardize(MatrixXd& x, VectorXd& y) {
  y.array() -= y.mean();
  const double ys = std::sqrt(y.squaredNorm() / static_cast<double>(y.size()));
  if (ys > 0) y /= ys;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    x.col(c).array() -= x.col(c).mean();
    const double s = std::sqrt(x.col(c).squaredNorm() / static_cast<double>(x.rows()));
    if (s > 1e-12) {
      x.col(c) /= s;
    } else {
      x.col(c).setZero();
    }
  }
}

}  // namespace detail

// Randomized lasso: each resample draws `fraction` of the rows without
// replacement, perturbs each feature's penalty by an independent factor in
// [weakness, 1], and records the features with non-zero coefficients.
// Features selected in at least `threshold` of the resamples form the mask.
inline StabilityResult stability_select(const MatrixXd& x, const VectorXd& y,
                                        const StabilityOptions& opt = {}) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto p = static_cast<std::size_t>(x.cols());
  if (n < 10) throw DataError("stability selection needs at least 10 rows");
  if (static_cast<std::size_t>(y.size()) != n) {
    throw DataError("stability selection: target length mismatch");
  }
  if ((y.array() == y(0)).all()) {
    throw DataError("stability selection: constant target");
  }
  const auto m = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::lround(opt.fraction * static_cast<double>(n))));
  const double alpha =
      opt.alpha.value_or(std::sqrt(2.0 * std::log(static_cast<double>(std::max<std::size_t>(p, 2))) /
                                   static_cast<double>(m)));

  std::vector<std::size_t> counts(p, 0);
  std::vector<std::size_t> rows(n);
  for (std::size_t r = 0; r < opt.resamples; ++r) {
    Rng rng(derive_seed(derive_seed(opt.seed, "stability"), r));
    for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    // Partial Fisher-Yates: the first m entries are a uniform subsample.
    for (std::size_t i = 0; i < m; ++i) {
      std::swap(rows[i], rows[i + rng.index(n - i)]);
    }
    std::vector<std::size_t> sub(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(m));
    MatrixXd xs = select_rows(x, sub);
    VectorXd ys = select_rows(y, sub);
    detail::standardize(xs, ys);
    VectorXd penalty(static_cast<Eigen::Index>(p));
    for (std::size_t j = 0; j < p; ++j) {
      penalty(static_cast<Eigen::Index>(j)) = rng.uniform(opt.weakness, 1.0);
    }
    if (ys.squaredNorm() == 0.0) continue;
    const VectorXd b = lasso_coordinate_descent(xs, ys, alpha, penalty, opt.lasso);
    for (std::size_t j = 0; j < p; ++j) {
      if (b(static_cast<Eigen::Index>(j)) != 0.0) ++counts[j];
    }
  }

  StabilityResult res;
  res.frequencies.resize(p);
  res.mask.resize(p);
  bool any = false;
  for (std::size_t j = 0; j < p; ++j) {
    res.frequencies[j] = opt.resamples == 0
                             ? 0.0
                             : static_cast<double>(counts[j]) /
                                   static_cast<double>(opt.resamples);
    res.mask[j] = res.frequencies[j] >= opt.threshold;
    any = any || res.mask[j];
  }
  if (!any) {
    res.fallback = true;
    std::fill(res.mask.begin(), res.mask.end(), true);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Linear learners

enum class Task { regression, classification };

inline std::string_view task_name(Task t) {
  return t == Task::regression ? "regression" : "classification";
}

struct LinearFit {
  VectorXd weights;
  double intercept = 0.0;
};

// A learner fits a penalized linear model on already-normalized features and
// scores held-out predictions (higher is better).
template <typename L>
concept LinearLearner = requires(const L& l, const MatrixXd& x, const VectorXd& y,
                                 double lambda, const LinearFit& fit) {
  { l.fit(x, y, lambda) } -> std::same_as<LinearFit>;
  { l.score(fit, x, y) } -> std::convertible_to<double>;
};

inline VectorXd linear_scores(const LinearFit& fit, const MatrixXd& x) {
  return (x * fit.weights).array() + fit.intercept;
}

// Minimizes (1/n) ||y - b0 - X w||^2 + lambda ||w||^2 in closed form.
struct RidgeLearner {
  LinearFit fit(const MatrixXd& x, const VectorXd& y, double lambda) const {
    const auto n = static_cast<double>(x.rows());
    const auto p = x.cols();
    LinearFit f;
    const double y_mean = y.mean();
    if (p == 0) {
      f.weights = VectorXd::Zero(0);
      f.intercept = y_mean;
      return f;
    }
    const VectorXd x_mean = x.colwise().mean().transpose();
    const MatrixXd xc = x.rowwise() - x_mean.transpose();
    const VectorXd yc = y.array() - y_mean;
    MatrixXd gram = xc.transpose() * xc / n;
    gram.diagonal().array() += lambda;
    f.weights = gram.ldlt().solve(xc.transpose() * yc / n);
    f.intercept = y_mean - x_mean.dot(f.weights);
    return f;
  }

  // Negative MAE of clamped predictions.
  double score(const LinearFit& fit, const MatrixXd& x, const VectorXd& y) const {
    const VectorXd pred = linear_scores(fit, x).cwiseMax(-1.0).cwiseMin(1.0);
    return -(pred - y).cwiseAbs().mean();
  }
};

// Minimizes (1/n) sum log(1 + exp(-y (b0 + x.w))) + lambda ||w||^2 by
// damped Newton iterations. Labels are +-1.
struct LogisticLearner {
  int max_iterations = 100;
  double tolerance = 1e-10;

  LinearFit fit(const MatrixXd& x, const VectorXd& y, double lambda) const {
    const auto n = x.rows();
    const auto p = x.cols();
    // Augmented design: column 0 is the intercept.
    MatrixXd a(n, p + 1);
    a.col(0).setOnes();
    a.rightCols(p) = x;
    VectorXd beta = VectorXd::Zero(p + 1);
    const double inv_n = 1.0 / static_cast<double>(n);
    auto objective = [&](const VectorXd& b) {
      const VectorXd margin = (a * b).cwiseProduct(y);
      double loss = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double mgn = margin(i);
        loss += mgn > 0 ? std::log1p(std::exp(-mgn)) : -mgn + std::log1p(std::exp(mgn));
      }
      return loss * inv_n + lambda * b.tail(p).squaredNorm();
    };
    double obj = objective(beta);
    for (int it = 0; it < max_iterations; ++it) {
      const VectorXd margin = (a * beta).cwiseProduct(y);
      VectorXd grad_coef(n);
      VectorXd curv(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double s = 1.0 / (1.0 + std::exp(margin(i)));  // sigmoid(-margin)
        grad_coef(i) = -y(i) * s;
        curv(i) = s * (1.0 - s);
      }
      VectorXd grad = a.transpose() * grad_coef * inv_n;
      grad.tail(p) += 2.0 * lambda * beta.tail(p);
      MatrixXd hess = a.transpose() * curv.asDiagonal() * a * inv_n;
      hess.diagonal().tail(p).array() += 2.0 * lambda;
      hess(0, 0) += 1e-12;
      const VectorXd step = hess.ldlt().solve(grad);
      double t = 1.0;
      VectorXd next = beta - step;
      double next_obj = objective(next);
      while (next_obj > obj && t > 1e-8) {
        t *= 0.5;
        next = beta - t * step;
        next_obj = objective(next);
      }
      const double change = (next - beta).cwiseAbs().maxCoeff();
      beta = next;
      obj = next_obj;
      if (change < tolerance) break;
    }
    LinearFit f;
    f.intercept = beta(0);
    f.weights = beta.tail(p);
    return f;
  }

  // Accuracy of sign predictions (zero maps to +1).
  double score(const LinearFit& fit, const MatrixXd& x, const VectorXd& y) const {
    const VectorXd s = linear_scores(fit, x);
    Eigen::Index hit = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      hit += (s(i) >= 0.0 ? 1.0 : -1.0) == y(i);
    }
    return s.size() == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(s.size());
  }
};

// 13 strengths log-spaced from 1e-4 to 1e2.
inline std::vector<double> default_lambda_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 12; ++i) g.push_back(std::pow(10.0, -4.0 + 0.5 * i));
  return g;
}

struct GridSearchResult {
  double best_lambda = 0.0;
  std::vector<double> lambdas;
  std::vector<double> cv_scores;  // mean held-out score per lambda
};

// k-fold cross-validated grid search. Folds are contiguous blocks of a
// seeded shuffle; ties go to the larger lambda.
template <LinearLearner L>
GridSearchResult grid_search(const L& learner, const MatrixXd& x, const VectorXd& y,
                             const std::vector<double>& grid, std::size_t folds,
                             std::uint64_t seed) {
  if (grid.empty()) throw UsageError("empty regularization grid");
  for (double l : grid) {
    if (!(l > 0.0)) throw UsageError("regularization strengths must be > 0");
  }
  const auto n = static_cast<std::size_t>(x.rows());
  folds = std::min(folds, n);
  if (folds < 2) throw DataError("cross-validation needs at least 2 rows");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(derive_seed(seed, "cv-folds"));
  rng.shuffle(order);

  std::vector<std::size_t> fold_of(n);
  for (std::size_t pos = 0; pos < n; ++pos) fold_of[order[pos]] = pos * folds / n;

  GridSearchResult res;
  res.lambdas = grid;
  std::sort(res.lambdas.begin(), res.lambdas.end());
  res.cv_scores.assign(res.lambdas.size(), 0.0);
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < n; ++i) (fold_of[i] == f ? te : tr).push_back(i);
    const MatrixXd xtr = select_rows(x, tr), xte = select_rows(x, te);
    const VectorXd ytr = select_rows(y, tr), yte = select_rows(y, te);
    for (std::size_t g = 0; g < res.lambdas.size(); ++g) {
      const LinearFit fit = learner.fit(xtr, ytr, res.lambdas[g]);
      res.cv_scores[g] += learner.score(fit, xte, yte) / static_cast<double>(folds);
    }
  }
  double best = -INFINITY;
  for (std::size_t g = 0; g < res.lambdas.size(); ++g) {
    if (res.cv_scores[g] >= best) {
      best = res.cv_scores[g];
      res.best_lambda = res.lambdas[g];
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Model

struct EnsembleModel {
  Task task = Task::regression;
  VectorXd means;
  VectorXd stds;
  std::vector<bool> mask;
  VectorXd weights;  // one per selected feature, in column order
  double intercept = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;

  std::size_t feature_count() const { return mask.size(); }

  std::vector<std::size_t> selected() const {
    std::vector<std::size_t> s;
    for (std::size_t j = 0; j < mask.size(); ++j) {
      if (mask[j]) s.push_back(j);
    }
    return s;
  }

  // Linear score on raw features.
  VectorXd decision(const MatrixXd& x) const {
    if (static_cast<std::size_t>(x.cols()) != mask.size()) {
      throw DataError("model expects " + std::to_string(mask.size()) +
                      " feature columns, got " + std::to_string(x.cols()));
    }
    if (!x.allFinite()) throw DataError("non-finite feature value");
    VectorXd out = VectorXd::Constant(x.rows(), intercept);
    const auto sel = selected();
    for (std::size_t k = 0; k < sel.size(); ++k) {
      const auto j = static_cast<Eigen::Index>(sel[k]);
      out += weights(static_cast<Eigen::Index>(k)) *
             ((x.col(j).array() - means(j)) / stds(j)).matrix();
    }
    return out;
  }

  // Weights and intercept expressed on the raw feature scale.
  LinearFit raw_coefficients() const {
    LinearFit f;
    f.weights = VectorXd::Zero(static_cast<Eigen::Index>(mask.size()));
    f.intercept = intercept;
    const auto sel = selected();
    for (std::size_t k = 0; k < sel.size(); ++k) {
      const auto j = static_cast<Eigen::Index>(sel[k]);
      const double w = weights(static_cast<Eigen::Index>(k)) / stds(j);
      f.weights(j) = w;
      f.intercept -= w * means(j);
    }
    return f;
  }
};

// Regression: linear score clamped to [-1,1]. Classification: sign, with 0
// mapped to +1.
inline VectorXd predict(const EnsembleModel& model, const MatrixXd& x) {
  VectorXd s = model.decision(x);
  if (model.task == Task::regression) return s.cwiseMax(-1.0).cwiseMin(1.0);
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = s(i) >= 0.0 ? 1.0 : -1.0;
  return s;
}

struct FitOptions {
  std::vector<double> grid = default_lambda_grid();
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  std::optional<std::vector<bool>> mask;  // defaults to every column
};

namespace detail {

template <LinearLearner L>
EnsembleModel fit_linear(const L& learner, Task task, const MatrixXd& x,
                         const VectorXd& y, const FitOptions& opt) {
  if (x.rows() != y.size()) throw DataError("feature/target row mismatch");
  if (!x.allFinite() || !y.allFinite()) throw DataError("non-finite training data");
  EnsembleModel m;
  m.task = task;
  m.seed = opt.seed;
  const Normalizer norm = Normalizer::fit(x);
  m.means = norm.means;
  m.stds = norm.stds;
  m.mask = opt.mask.value_or(std::vector<bool>(static_cast<std::size_t>(x.cols()), true));
  if (m.mask.size() != static_cast<std::size_t>(x.cols())) {
    throw UsageError("feature mask length does not match the feature count");
  }
  for (std::size_t j = 0; j < m.mask.size(); ++j) {
    if (norm.constant[j]) m.mask[j] = false;
  }
  const auto sel = m.selected();
  const MatrixXd z = norm.apply(x);
  MatrixXd zs(z.rows(), static_cast<Eigen::Index>(sel.size()));
  for (std::size_t k = 0; k < sel.size(); ++k) {
    zs.col(static_cast<Eigen::Index>(k)) = z.col(static_cast<Eigen::Index>(sel[k]));
  }
  const GridSearchResult gs = grid_search(learner, zs, y, opt.grid, opt.folds, opt.seed);
  m.lambda = gs.best_lambda;
  const LinearFit fit = learner.fit(zs, y, m.lambda);
  m.weights = fit.weights;
  m.intercept = fit.intercept;
  return m;
}

}  // namespace detail

inline EnsembleModel fit_regressor(const MatrixXd& x, const VectorXd& y,
                                   const FitOptions& opt = {}) {
  if (x.rows() < 20) throw DataError("regression ensemble needs at least 20 rows");
  return detail::fit_linear(RidgeLearner{}, Task::regression, x, y, opt);
}

inline EnsembleModel fit_classifier(const MatrixXd& x, const VectorXd& y,
                                    const FitOptions& opt = {}) {
  bool pos = false, neg = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) == 1.0) {
      pos = true;
    } else if (y(i) == -1.0) {
      neg = true;
    } else {
      throw DataError("classification labels must be +1 or -1");
    }
  }
  if (!pos || !neg) throw DataError("classification needs both classes in training data");
  return detail::fit_linear(LogisticLearner{}, Task::classification, x, y, opt);
}

struct EnsembleOptions {
  bool stability_selection = true;
  StabilityOptions stability;
  FitOptions fit;
};

struct EnsembleFit {
  EnsembleModel model;
  std::optional<StabilityResult> stability;
};

// Full pipeline: stability selection on the training data, then the
// grid-searched learner restricted to the selected features.
inline EnsembleFit fit_ensemble(Task task, const MatrixXd& x, const VectorXd& y,
                                const EnsembleOptions& opt = {}) {
  EnsembleFit out;
  FitOptions fit = opt.fit;
  if (opt.stability_selection) {
    StabilityOptions so = opt.stability;
    so.seed = derive_seed(opt.fit.seed, "stability-selection");
    out.stability = stability_select(x, y, so);
    fit.mask = out.stability->mask;
  }
  out.model = task == Task::regression ? fit_regressor(x, y, fit)
                                       : fit_classifier(x, y, fit);
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

inline constexpr std::string_view kModelMagic = "sentilex-ensemble-model";
inline constexpr int kModelVersion = 1;

inline void write_model(std::ostream& out, const EnsembleModel& m) {
  out << kModelMagic << " v" << kModelVersion << '\n';
  out << "task " << task_name(m.task) << '\n';
  out << "seed " << m.seed << '\n';
  out << "lambda " << format_exact(m.lambda) << '\n';
  out << "features " << m.mask.size() << '\n';
  auto row = [&](const char* name, auto&& get, std::size_t n) {
    out << name;
    for (std::size_t j = 0; j < n; ++j) out << ' ' << get(j);
    out << '\n';
  };
  row("means", [&](std::size_t j) { return format_exact(m.means(static_cast<Eigen::Index>(j))); },
      m.mask.size());
  row("stds", [&](std::size_t j) { return format_exact(m.stds(static_cast<Eigen::Index>(j))); },
      m.mask.size());
  row("mask", [&](std::size_t j) { return m.mask[j] ? 1 : 0; }, m.mask.size());
  out << "intercept " << format_exact(m.intercept) << '\n';
  row("weights",
      [&](std::size_t k) { return format_exact(m.weights(static_cast<Eigen::Index>(k))); },
      static_cast<std::size_t>(m.weights.size()));
  out << "end\n";
}

inline std::string model_to_string(const EnsembleModel& m) {
  std::ostringstream os;
  write_model(os, m);
  return os.str();
}

inline EnsembleModel read_model(std::istream& in) {
  auto fail = [](const std::string& what) -> EnsembleModel {
    throw DataError("malformed model file: " + what);
  };
  std::string magic, version;
  if (!(in >> magic >> version) || magic != kModelMagic) return fail("bad header");
  if (version != "v" + std::to_string(kModelVersion)) {
    return fail("unsupported version " + version);
  }
  EnsembleModel m;
  std::string tag, value;
  std::size_t features = 0;
  auto expect = [&](const char* name) {
    if (!(in >> tag) || tag != name) fail(std::string("expected '") + name + "'");
  };
  auto read_double = [&]() {
    std::string tok;
    double v = 0;
    if (!(in >> tok) || !parse_double(tok, v)) fail("bad number");
    return v;
  };
  expect("task");
  in >> value;
  if (value == "regression") {
    m.task = Task::regression;
  } else if (value == "classification") {
    m.task = Task::classification;
  } else {
    return fail("unknown task " + value);
  }
  expect("seed");
  if (!(in >> m.seed)) return fail("bad seed");
  expect("lambda");
  m.lambda = read_double();
  expect("features");
  if (!(in >> features)) return fail("bad feature count");
  m.means.resize(static_cast<Eigen::Index>(features));
  m.stds.resize(static_cast<Eigen::Index>(features));
  expect("means");
  for (std::size_t j = 0; j < features; ++j) m.means(static_cast<Eigen::Index>(j)) = read_double();
  expect("stds");
  for (std::size_t j = 0; j < features; ++j) m.stds(static_cast<Eigen::Index>(j)) = read_double();
  expect("mask");
  m.mask.resize(features);
  std::size_t selected = 0;
  for (std::size_t j = 0; j < features; ++j) {
    int b = 0;
    if (!(in >> b) || (b != 0 && b != 1)) return fail("bad mask");
    m.mask[j] = b == 1;
    selected += m.mask[j];
  }
  expect("intercept");
  m.intercept = read_double();
  expect("weights");
  m.weights.resize(static_cast<Eigen::Index>(selected));
  for (std::size_t k = 0; k < selected; ++k) m.weights(static_cast<Eigen::Index>(k)) = read_double();
  expect("end");
  return m;
}

inline bool operator==(const EnsembleModel& a, const EnsembleModel& b) {
  return a.task == b.task && a.seed == b.seed && a.lambda == b.lambda &&
         a.mask == b.mask && a.intercept == b.intercept && a.means == b.means &&
         a.stds == b.stds && a.weights == b.weights;
}

}  // namespace sentilex
