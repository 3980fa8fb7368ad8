#pragma once

// Posterior-to-prior polarity formulae. Each formula reduces the ordered
// positive and negative sense scores of a lemma#PoS to a pair
// (f_pos, f_neg) in [0,1]; a mapping strategy then turns that pair into one
// signed prior polarity in [-1,1].

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sentilex/common.hpp"
#include "sentilex/swn_store.hpp"

namespace sentilex {

enum class FormulaId {
  fs,
  mean,
  uni,
  uniw,
  w1,
  w2,
  w1s,
  w2s,
  w1n,
  w2n,
  w1sn,
  w2sn,
  median,
  max,
};

inline constexpr std::array<FormulaId, 14> kAllFormulae = {
    FormulaId::fs,   FormulaId::mean, FormulaId::uni,    FormulaId::uniw,
    FormulaId::w1,   FormulaId::w2,   FormulaId::w1s,    FormulaId::w2s,
    FormulaId::w1n,  FormulaId::w2n,  FormulaId::w1sn,   FormulaId::w2sn,
    FormulaId::median, FormulaId::max};

inline std::string_view formula_name(FormulaId id) {
  switch (id) {
    case FormulaId::fs: return "fs";
    case FormulaId::mean: return "mean";
    case FormulaId::uni: return "uni";
    case FormulaId::uniw: return "uniw";
    case FormulaId::w1: return "w1";
    case FormulaId::w2: return "w2";
    case FormulaId::w1s: return "w1s";
    case FormulaId::w2s: return "w2s";
    case FormulaId::w1n: return "w1n";
    case FormulaId::w2n: return "w2n";
    case FormulaId::w1sn: return "w1sn";
    case FormulaId::w2sn: return "w2sn";
    case FormulaId::median: return "median";
    case FormulaId::max: return "max";
  }
  return "?";
}

inline std::optional<FormulaId> formula_from_name(std::string_view name) {
  for (FormulaId id : kAllFormulae) {
    if (formula_name(id) == name) return id;
  }
  return std::nullopt;
}

enum class Strategy { m, d };

inline std::string_view strategy_name(Strategy s) {
  return s == Strategy::m ? "m" : "d";
}

struct FormulaOutput {
  double f_pos = 0.0;
  double f_neg = 0.0;
  std::optional<int> forced_sign;  // +1 or -1
};

struct PriorScore {
  double value = 0.0;
  Strategy strategy = Strategy::m;
};

namespace detail {

enum class Series { geometric, harmonic };

// Weights normalized to sum to 1 over n senses: geometric 1/2, 1/4, ...;
// harmonic 1, 1/2, 1/3, ...
inline double weighted_sum(std::span<const double> scores, Series series) {
  if (scores.empty()) return 0.0;
  double num = 0.0;
  double den = 0.0;
  double w = series == Series::geometric ? 0.5 : 1.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (series == Series::harmonic) w = 1.0 / static_cast<double>(i + 1);
    num += w * scores[i];
    den += w;
    if (series == Series::geometric) w *= 0.5;
  }
  return num / den;
}

inline std::vector<double> sorted_desc(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

inline double median_of(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

inline double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

// Drops senses scored (0, 0).
inline void drop_null_senses(std::vector<double>& pos, std::vector<double>& neg) {
  std::size_t out = 0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (pos[i] != 0.0 || neg[i] != 0.0) {
      pos[out] = pos[i];
      neg[out] = neg[i];
      ++out;
    }
  }
  pos.resize(out);
  neg.resize(out);
}

inline FormulaOutput weighted(std::span<const double> pos_in,
                              std::span<const double> neg_in, Series series,
                              bool by_strength, bool drop_null) {
  std::vector<double> pos(pos_in.begin(), pos_in.end());
  std::vector<double> neg(neg_in.begin(), neg_in.end());
  if (drop_null) drop_null_senses(pos, neg);
  if (by_strength) {
    pos = sorted_desc(pos);
    neg = sorted_desc(neg);
  }
  return {weighted_sum(pos, series), weighted_sum(neg, series), std::nullopt};
}

// Scores that differ only by summation rounding count as tied.
inline constexpr double kTieTolerance = 1e-12;

inline bool tied(double a, double b) { return std::abs(a - b) <= kTieTolerance; }

// Senses whose positive score dominates (pos >= neg, pos > 0) versus those
// whose negative score dominates (neg > pos, neg > 0); each side is the mean
// over its own set.
inline FormulaOutput uni(std::span<const double> pos, std::span<const double> neg,
                         bool weighted_tie_break) {
  std::vector<double> strong_pos;
  std::vector<double> strong_neg;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (pos[i] >= neg[i] && pos[i] > 0.0) {
      strong_pos.push_back(pos[i]);
    } else if (neg[i] > pos[i] && neg[i] > 0.0) {
      strong_neg.push_back(neg[i]);
    }
  }
  FormulaOutput out{mean_of(strong_pos), mean_of(strong_neg), std::nullopt};
  if (weighted_tie_break && tied(out.f_pos, out.f_neg) &&
      strong_pos.size() != strong_neg.size()) {
    out.forced_sign = strong_pos.size() > strong_neg.size() ? +1 : -1;
  }
  return out;
}

}  // namespace detail

inline FormulaOutput apply_formula(FormulaId id, const SenseProfile& p) {
  using detail::Series;
  if (p.size() == 0) throw DataError("empty sense profile: " + p.key);
  std::span<const double> pos = p.pos_scores;
  std::span<const double> neg = p.neg_scores;
  switch (id) {
    case FormulaId::fs:
      return {pos[0], neg[0], std::nullopt};
    case FormulaId::mean:
      return {detail::mean_of(pos), detail::mean_of(neg), std::nullopt};
    case FormulaId::uni:
      return detail::uni(pos, neg, true);
    case FormulaId::uniw:
      return detail::uni(pos, neg, false);
    case FormulaId::w1:
      return detail::weighted(pos, neg, Series::geometric, false, false);
    case FormulaId::w2:
      return detail::weighted(pos, neg, Series::harmonic, false, false);
    case FormulaId::w1s:
      return detail::weighted(pos, neg, Series::geometric, true, false);
    case FormulaId::w2s:
      return detail::weighted(pos, neg, Series::harmonic, true, false);
    case FormulaId::w1n:
      return detail::weighted(pos, neg, Series::geometric, false, true);
    case FormulaId::w2n:
      return detail::weighted(pos, neg, Series::harmonic, false, true);
    case FormulaId::w1sn:
      return detail::weighted(pos, neg, Series::geometric, true, true);
    case FormulaId::w2sn:
      return detail::weighted(pos, neg, Series::harmonic, true, true);
    case FormulaId::median:
      return {detail::median_of(pos), detail::median_of(neg), std::nullopt};
    case FormulaId::max:
      return {*std::max_element(pos.begin(), pos.end()),
              *std::max_element(neg.begin(), neg.end()), std::nullopt};
  }
  return {};
}

// m: signed maximum (ties go positive); d: difference. A forced sign
// overrides both: sign * max(f_pos, f_neg).
inline PriorScore map_polarity(const FormulaOutput& out, Strategy strategy) {
  if (out.forced_sign) {
    return {*out.forced_sign * std::max(out.f_pos, out.f_neg), strategy};
  }
  if (strategy == Strategy::m) {
    const bool pos_wins = out.f_pos > out.f_neg || detail::tied(out.f_pos, out.f_neg);
    return {pos_wins ? out.f_pos : -out.f_neg, strategy};
  }
  return {out.f_pos - out.f_neg, strategy};
}

// Uniform in [-1,1], a pure function of (key, seed).
inline PriorScore baseline_rnd(std::string_view key, std::uint64_t seed,
                               Strategy strategy = Strategy::m) {
  Rng rng(derive_seed(seed, fnv1a(key)));
  return {rng.uniform(-1.0, 1.0), strategy};
}

// Scores of one uniformly chosen sense, a pure function of (key, seed).
inline PriorScore baseline_swnrnd(const SenseProfile& p, std::uint64_t seed,
                                  Strategy strategy = Strategy::m) {
  if (p.size() == 0) throw DataError("empty sense profile: " + p.key);
  Rng rng(derive_seed(derive_seed(seed, "swnrnd"), fnv1a(p.key)));
  const std::size_t i = rng.index(p.size());
  return map_polarity({p.pos_scores[i], p.neg_scores[i], std::nullopt},
                      strategy);
}

// The more frequent label; a tie goes to +1.
inline int majority_class_label(std::span<const int> labels) {
  if (labels.empty()) throw DataError("majority class of an empty label set");
  long balance = 0;
  for (int l : labels) balance += l > 0 ? 1 : -1;
  return balance >= 0 ? +1 : -1;
}

// Feature layout: formulae in declaration order, m before d; uni contributes
// one signed entry (its weight tie-break has no difference form).
inline constexpr std::size_t kFeatureCount = 27;
using FeatureVector = std::array<double, kFeatureCount>;

inline const std::array<std::string, kFeatureCount>& feature_names() {
  static const std::array<std::string, kFeatureCount> names = [] {
    std::array<std::string, kFeatureCount> n;
    std::size_t i = 0;
    for (FormulaId id : kAllFormulae) {
      const std::string base(formula_name(id));
      if (id == FormulaId::uni) {
        n[i++] = base;
      } else {
        n[i++] = base + "_m";
        n[i++] = base + "_d";
      }
    }
    return n;
  }();
  return names;
}

inline std::optional<std::size_t> feature_index(std::string_view name) {
  const auto& names = feature_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  return std::nullopt;
}

inline FeatureVector all_formula_features(const SenseProfile& p) {
  FeatureVector v{};
  std::size_t i = 0;
  for (FormulaId id : kAllFormulae) {
    const FormulaOutput out = apply_formula(id, p);
    v[i++] = map_polarity(out, Strategy::m).value;
    if (id != FormulaId::uni) v[i++] = map_polarity(out, Strategy::d).value;
  }
  return v;
}

}  // namespace sentilex
