#pragma once

// Evaluation protocol: seeded train/test splits, regression and
// classification metrics, significance tests and error analysis.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "sentilex/common.hpp"

namespace sentilex {

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

struct SplitPlan {
  std::size_t repeats = 5;
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  std::vector<Split> splits;
};

// Materializes `repeats` independent shuffles of [0, n); the first
// round(train_fraction * n) indices of each form the training set. Both
// halves are returned sorted.
inline SplitPlan make_splits(std::size_t n, SplitPlan plan) {
  if (n < 10) throw DataError("need at least 10 items to split, got " +
                              std::to_string(n));
  if (plan.train_fraction <= 0.0 || plan.train_fraction >= 1.0) {
    throw UsageError("train fraction must lie in (0,1)");
  }
  const auto n_train = static_cast<std::size_t>(
      std::lround(plan.train_fraction * static_cast<double>(n)));
  plan.splits.clear();
  for (std::size_t r = 0; r < plan.repeats; ++r) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    Rng rng(derive_seed(derive_seed(plan.seed, "split"), r));
    rng.shuffle(idx);
    Split s;
    s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    plan.splits.push_back(std::move(s));
  }
  return plan;
}

inline SplitPlan make_splits(std::size_t n, std::size_t repeats = 5,
                             double train_fraction = 0.7, std::uint64_t seed = 0) {
  SplitPlan plan;
  plan.repeats = repeats;
  plan.train_fraction = train_fraction;
  plan.seed = seed;
  return make_splits(n, std::move(plan));
}

template <typename T>
std::vector<T> gather(std::span<const T> v, std::span<const std::size_t> idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(v[i]);
  return out;
}

namespace detail {
inline void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DataError(std::string(what) + ": length mismatch (" +
                    std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}
}  // namespace detail

inline double mae(std::span<const double> pred, std::span<const double> gold) {
  detail::check_lengths(pred.size(), gold.size(), "mae");
  if (pred.empty()) throw DataError("mae: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - gold[i]);
  return sum / static_cast<double>(pred.size());
}

// Sample Pearson correlation. Constant input has no correlation and throws.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  detail::check_lengths(x.size(), y.size(), "pearson");
  const std::size_t n = x.size();
  if (n < 2) throw DataError("pearson: need at least 2 points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DataError("pearson: undefined for a constant vector");
  }
  const double den = static_cast<double>(n - 1);
  const double r = (sxy / den) / std::sqrt((sxx / den) * (syy / den));
  return std::clamp(r, -1.0, 1.0);
}

// Pearson that reports an undefined correlation as NaN instead of throwing.
inline double pearson_or_nan(std::span<const double> x, std::span<const double> y) {
  try {
    return pearson(x, y);
  } catch (const DataError&) {
    return std::nan("");
  }
}

inline int sign_label(double v) { return v >= 0.0 ? +1 : -1; }

inline double accuracy(std::span<const int> pred, std::span<const int> gold) {
  detail::check_lengths(pred.size(), gold.size(), "accuracy");
  if (pred.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == gold[i];
  return static_cast<double>(hit) / static_cast<double>(pred.size());
}

// Cohen's kappa with marginal-product chance agreement. When chance
// agreement is 1 the statistic is undefined; 0 is returned and `degenerate`
// set.
inline double cohen_kappa(std::span<const int> pred, std::span<const int> gold,
                          bool* degenerate = nullptr) {
  detail::check_lengths(pred.size(), gold.size(), "cohen_kappa");
  if (degenerate) *degenerate = false;
  if (pred.empty()) return 0.0;
  std::map<int, double> pm, gm;
  double agree = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    pm[pred[i]] += 1;
    gm[gold[i]] += 1;
    agree += pred[i] == gold[i];
  }
  const double n = static_cast<double>(pred.size());
  const double po = agree / n;
  double pe = 0.0;
  for (const auto& [label, count] : pm) {
    const auto it = gm.find(label);
    if (it != gm.end()) pe += (count / n) * (it->second / n);
  }
  if (pe >= 1.0 - 1e-15) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  return (po - pe) / (1.0 - pe);
}

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool degenerate = false;
};

// Two-sided paired Student's t-test on the differences a - b.
inline TestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  detail::check_lengths(a.size(), b.size(), "paired_t_test");
  const std::size_t n = a.size();
  if (n < 2) throw DataError("paired_t_test: need at least 2 pairs");
  double mean = 0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  TestResult r;
  if (sd == 0.0) {
    r.degenerate = true;
    r.statistic = mean == 0.0 ? 0.0 : std::copysign(INFINITY, mean);
    r.p_value = mean == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
  boost::math::students_t dist(static_cast<double>(n - 1));
  r.p_value = std::clamp(2.0 * boost::math::cdf(boost::math::complement(
                                   dist, std::abs(r.statistic))),
                         0.0, 1.0);
  return r;
}

using RegressionMetric =
    std::function<double(std::span<const double>, std::span<const double>)>;

// Approximate randomization: each instance's pair of predictions is swapped
// with probability 1/2; p = (hits + 1) / (iterations + 1), where a hit is a
// shuffle whose |metric(a) - metric(b)| reaches the observed difference.
inline TestResult approx_randomization_test(std::span<const double> pred_a,
                                            std::span<const double> pred_b,
                                            std::span<const double> gold,
                                            const RegressionMetric& metric,
                                            std::size_t iterations = 10000,
                                            std::uint64_t seed = 0) {
  detail::check_lengths(pred_a.size(), gold.size(), "approx_randomization_test");
  detail::check_lengths(pred_b.size(), gold.size(), "approx_randomization_test");
  const double observed = std::abs(metric(pred_a, gold) - metric(pred_b, gold));
  std::vector<double> sa(pred_a.begin(), pred_a.end());
  std::vector<double> sb(pred_b.begin(), pred_b.end());
  Rng rng(derive_seed(seed, "approx-randomization"));
  std::size_t hits = 0;
  const double eps = 1e-12 * std::max(1.0, observed);
  for (std::size_t it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < sa.size(); ++i) {
      if (rng.coin()) {
        sa[i] = pred_b[i];
        sb[i] = pred_a[i];
      } else {
        sa[i] = pred_a[i];
        sb[i] = pred_b[i];
      }
    }
    if (std::abs(metric(sa, gold) - metric(sb, gold)) >= observed - eps) ++hits;
  }
  TestResult r;
  r.statistic = observed;
  r.p_value = static_cast<double>(hits + 1) / static_cast<double>(iterations + 1);
  return r;
}

// Label-valued convenience: accuracy as the metric.
inline TestResult approx_randomization_test(std::span<const int> pred_a,
                                            std::span<const int> pred_b,
                                            std::span<const int> gold,
                                            std::size_t iterations = 10000,
                                            std::uint64_t seed = 0) {
  auto to_d = [](std::span<const int> v) {
    return std::vector<double>(v.begin(), v.end());
  };
  const auto a = to_d(pred_a), b = to_d(pred_b), g = to_d(gold);
  RegressionMetric acc = [](std::span<const double> p, std::span<const double> y) {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < p.size(); ++i) hit += p[i] == y[i];
    return p.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(p.size());
  };
  return approx_randomization_test(a, b, g, acc, iterations, seed);
}

// Two-sided test for the difference of two independent correlations.
inline TestResult fisher_z_test(double r1, std::size_t n1, double r2, std::size_t n2) {
  if (std::abs(r1) >= 1.0 || std::abs(r2) >= 1.0) {
    throw DataError("fisher_z_test: |r| must be < 1");
  }
  if (n1 <= 3 || n2 <= 3) throw DataError("fisher_z_test: need n > 3");
  const double se = std::sqrt(1.0 / static_cast<double>(n1 - 3) +
                              1.0 / static_cast<double>(n2 - 3));
  TestResult r;
  r.statistic = (std::atanh(r1) - std::atanh(r2)) / se;
  boost::math::normal_distribution<double> norm;
  r.p_value = std::clamp(
      2.0 * boost::math::cdf(boost::math::complement(norm, std::abs(r.statistic))),
      0.0, 1.0);
  return r;
}

struct BinMae {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double mae = 0.0;
};

inline std::vector<double> equal_bins(std::size_t bins = 8, double lo = -1.0,
                                      double hi = 1.0) {
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  }
  return edges;
}

// MAE per gold-value bin [edge_i, edge_{i+1}), the last bin closed. Empty
// bins are omitted.
inline std::vector<BinMae> mae_by_bin(std::span<const double> pred,
                                      std::span<const double> gold,
                                      std::span<const double> edges) {
  detail::check_lengths(pred.size(), gold.size(), "mae_by_bin");
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end())) {
    throw UsageError("mae_by_bin: need at least two ascending edges");
  }
  const std::size_t bins = edges.size() - 1;
  std::vector<double> sum(bins, 0.0);
  std::vector<std::size_t> count(bins, 0);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const double g = gold[i];
    if (g < edges.front() || g > edges.back()) continue;
    auto it = std::upper_bound(edges.begin(), edges.end(), g);
    std::size_t b = static_cast<std::size_t>(it - edges.begin());
    b = b == 0 ? 0 : std::min(b - 1, bins - 1);
    sum[b] += std::abs(pred[i] - g);
    ++count[b];
  }
  std::vector<BinMae> out;
  for (std::size_t b = 0; b < bins; ++b) {
    if (count[b] == 0) continue;
    out.push_back({edges[b], edges[b + 1], count[b],
                   sum[b] / static_cast<double>(count[b])});
  }
  return out;
}

// Items whose absolute error exceeds mean + 2 sd of the absolute errors.
inline std::vector<std::size_t> regression_outliers(std::span<const double> pred,
                                                    std::span<const double> gold,
                                                    double k = 2.0) {
  detail::check_lengths(pred.size(), gold.size(), "regression_outliers");
  const std::size_t n = pred.size();
  if (n == 0) return {};
  std::vector<double> err(n);
  double mean = 0;
  for (std::size_t i = 0; i < n; ++i) {
    err[i] = std::abs(pred[i] - gold[i]);
    mean += err[i];
  }
  mean /= static_cast<double>(n);
  double var = 0;
  for (double e : err) var += (e - mean) * (e - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (err[i] > mean + k * sd) out.push_back(i);
  }
  return out;
}

struct ErrorPartition {
  std::vector<std::size_t> both_wrong;
  std::vector<std::size_t> only_a_wrong;
  std::vector<std::size_t> only_b_wrong;

  // Shares of the items at least one system got wrong.
  double share(const std::vector<std::size_t>& bucket) const {
    const std::size_t total =
        both_wrong.size() + only_a_wrong.size() + only_b_wrong.size();
    return total == 0 ? 0.0
                      : static_cast<double>(bucket.size()) / static_cast<double>(total);
  }
};

inline ErrorPartition classification_errors(std::span<const int> pred_a,
                                            std::span<const int> pred_b,
                                            std::span<const int> gold) {
  detail::check_lengths(pred_a.size(), gold.size(), "classification_errors");
  detail::check_lengths(pred_b.size(), gold.size(), "classification_errors");
  ErrorPartition p;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool wa = pred_a[i] != gold[i];
    const bool wb = pred_b[i] != gold[i];
    if (wa && wb) {
      p.both_wrong.push_back(i);
    } else if (wa) {
      p.only_a_wrong.push_back(i);
    } else if (wb) {
      p.only_b_wrong.push_back(i);
    }
  }
  return p;
}

struct MetricSummary {
  std::vector<double> per_repeat;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single repeat
};

// NaN repeats are skipped; all-NaN gives NaN mean.
inline MetricSummary summarize(std::vector<double> values) {
  MetricSummary s;
  s.per_repeat = std::move(values);
  std::vector<double> ok;
  for (double v : s.per_repeat) {
    if (!std::isnan(v)) ok.push_back(v);
  }
  if (ok.empty()) {
    s.mean = s.std = std::nan("");
    return s;
  }
  for (double v : ok) s.mean += v;
  s.mean /= static_cast<double>(ok.size());
  if (ok.size() > 1) {
    double ss = 0;
    for (double v : ok) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(ok.size() - 1));
  }
  return s;
}

// One row per system, one MetricSummary per metric name.
struct EvalReport {
  std::vector<std::string> metric_names;
  std::vector<std::string> systems;
  std::vector<std::map<std::string, MetricSummary>> rows;

  void add(const std::string& system, std::map<std::string, MetricSummary> row) {
    systems.push_back(system);
    rows.push_back(std::move(row));
  }
};

inline std::string format_metric(double v) {
  return std::isnan(v) ? "nan" : format_fixed(v, 3);
}

inline void write_report_tsv(std::ostream& out, const EvalReport& rep) {
  out << "system";
  for (const auto& m : rep.metric_names) out << '\t' << m << "_mean\t" << m << "_std";
  out << '\n';
  for (std::size_t i = 0; i < rep.systems.size(); ++i) {
    out << rep.systems[i];
    for (const auto& m : rep.metric_names) {
      const auto it = rep.rows[i].find(m);
      if (it == rep.rows[i].end()) {
        out << "\tnan\tnan";
      } else {
        out << '\t' << format_fixed(it->second.mean, 6) << '\t'
            << format_fixed(it->second.std, 6);
      }
    }
    out << '\n';
  }
}

inline void write_report_table(std::ostream& out, const EvalReport& rep) {
  std::size_t width = 6;
  for (const auto& s : rep.systems) width = std::max(width, s.size());
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  out << pad("system", width);
  for (const auto& m : rep.metric_names) {
    out << "  " << pad(m + "_mu", 9) << "  " << pad(m + "_sd", 9);
  }
  out << '\n';
  for (std::size_t i = 0; i < rep.systems.size(); ++i) {
    out << pad(rep.systems[i], width);
    for (const auto& m : rep.metric_names) {
      const auto it = rep.rows[i].find(m);
      const double mu = it == rep.rows[i].end() ? std::nan("") : it->second.mean;
      const double sd = it == rep.rows[i].end() ? std::nan("") : it->second.std;
      out << "  " << pad(format_metric(mu), 9) << "  " << pad(format_metric(sd), 9);
    }
    out << '\n';
  }
}

}  // namespace sentilex
