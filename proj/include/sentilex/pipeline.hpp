#pragma once

// End-to-end commands behind the CLI: prior-polarity evaluation, lexicon
// construction, sentence-level evaluation, inspection and coverage. Every
// command returns its output files as strings so that two runs can be
// compared byte for byte; writing them to disk is left to the caller.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sentilex/common.hpp"
#include "sentilex/ensemble.hpp"
#include "sentilex/evalkit.hpp"
#include "sentilex/formulae.hpp"
#include "sentilex/gold_lexica.hpp"
#include "sentilex/sentence_sa.hpp"
#include "sentilex/swn_store.hpp"

namespace sentilex {

enum class UndecidablePolicy { wrong, drop, random };

struct UndecidableSetting {
  UndecidablePolicy policy = UndecidablePolicy::wrong;
  std::optional<std::uint64_t> seed;  // random(N); falls back to --seed
};

// "wrong", "drop", "random" or "random(N)".
inline UndecidableSetting parse_undecidable(std::string_view s) {
  UndecidableSetting u;
  if (s == "wrong") return u;
  if (s == "drop") {
    u.policy = UndecidablePolicy::drop;
    return u;
  }
  if (s.starts_with("random")) {
    u.policy = UndecidablePolicy::random;
    auto rest = s.substr(6);
    if (rest.empty()) return u;
    if (rest.size() > 2 && rest.front() == '(' && rest.back() == ')') {
      double v = 0;
      const auto inner = rest.substr(1, rest.size() - 2);
      if (parse_double(inner, v) && v >= 0 && v == std::floor(v)) {
        u.seed = static_cast<std::uint64_t>(v);
        return u;
      }
    }
  }
  throw UsageError("--undecidable must be wrong, drop, random or random(N); got '" +
                   std::string(s) + "'");
}

inline std::string_view undecidable_name(UndecidablePolicy p) {
  switch (p) {
    case UndecidablePolicy::wrong: return "wrong";
    case UndecidablePolicy::drop: return "drop";
    case UndecidablePolicy::random: return "random";
  }
  return "?";
}

inline Strategy parse_strategy(std::string_view s) {
  if (s == "m") return Strategy::m;
  if (s == "d") return Strategy::d;
  throw UsageError("--strategy must be m or d");
}

struct RunConfig {
  std::optional<std::uint64_t> seed;
  std::string swn_path;
  std::string gold_path;
  GoldFormat gold_format = GoldFormat::generic_tsv;
  std::vector<std::string> dataset_paths;
  std::vector<std::string> lexicon_specs;  // name=path or path
  std::string stoplist_path;               // empty: bundled MySQL list
  std::string output_dir;
  std::vector<std::string> keys;           // inspect
  Strategy strategy = Strategy::m;
  std::vector<double> grid = default_lambda_grid();
  std::size_t folds = 10;
  std::size_t repeats = 5;
  double train_fraction = 0.7;
  bool stopwords = false;
  bool nonzero_only = false;
  double neg_threshold = -0.5;
  double pos_threshold = 0.5;
  UndecidableSetting undecidable;
  bool stability_selection = true;
  std::size_t stability_resamples = 1000;
  std::size_t randomization_iterations = 10000;
};

// Output file name and contents, in writing order.
using OutputFiles = std::vector<std::pair<std::string, std::string>>;

inline void write_outputs(const OutputFiles& files, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const auto& [name, text] : files) {
    const auto path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
  }
}

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline std::string base_name(const std::string& path) {
  return std::filesystem::path(path).filename().string();
}

inline void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw UsageError(what + " path is required");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw UsageError(what + " not found: " + path);
  }
}

inline std::uint64_t require_seed(const RunConfig& cfg, std::string_view cmd) {
  if (!cfg.seed) throw UsageError(std::string(cmd) + " needs --seed");
  return *cfg.seed;
}

struct NamedPath {
  std::string label;
  std::string path;
};

inline std::string provenance(std::string_view command, std::optional<std::uint64_t> seed,
                              const std::vector<NamedPath>& inputs) {
  std::string out = "# sentilex " + std::string(kVersion) + "\n";
  out += "# command: " + std::string(command) + "\n";
  out += "# seed: " + (seed ? std::to_string(*seed) : std::string("none")) + "\n";
  for (const auto& in : inputs) {
    out += "# input " + in.label + ": " + base_name(in.path) +
           " fnv1a=" + hex64(fnv1a(read_file(in.path))) + "\n";
  }
  return out;
}

// name=path, or a bare path named after its file stem.
inline NamedPath parse_lexicon_spec(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq != std::string::npos && eq > 0) {
    return {spec.substr(0, eq), spec.substr(eq + 1)};
  }
  return {std::filesystem::path(spec).stem().string(), spec};
}

inline std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

inline std::vector<int> to_labels(const std::vector<double>& v) {
  std::vector<int> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = sign_label(v[i]);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Prior-polarity evaluation

struct PriorEvalOptions {
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::m;  // for the rnd and swnrnd baselines
  std::size_t repeats = 5;
  double train_fraction = 0.7;
  bool include_ensemble = true;
  EnsembleOptions ensemble;
  std::size_t randomization_iterations = 10000;
};

struct PriorEvalResult {
  Task task = Task::regression;
  std::size_t entries = 0;
  EvalReport report;  // systems sorted best first
  // Test-set predictions of every system pooled over the repeats.
  std::map<std::string, std::vector<double>> pooled;
  std::vector<double> pooled_gold;
  std::vector<double> selection_frequency;  // mean over repeats
  std::vector<std::size_t> selection_count;  // repeats in which a feature was kept
};

inline constexpr std::string_view kEnsembleRow = "ensemble";

inline bool is_formula_row(const std::string& name) {
  return feature_index(name).has_value();
}

inline std::string primary_metric(Task task) {
  return task == Task::regression ? "MAE" : "Accuracy";
}

inline PriorEvalResult evaluate_priors(const SwnStore& store, const GoldLexicon& gold,
                                       const PriorEvalOptions& opt) {
  PriorEvalResult res;
  res.task = gold.kind == GoldKind::binary ? Task::classification : Task::regression;
  res.entries = gold.size();
  if (gold.size() < 50) {
    throw DataError("only " + std::to_string(gold.size()) +
                    " aligned gold entries; at least 50 are needed");
  }
  std::vector<std::string> keys;
  VectorXd y(static_cast<Eigen::Index>(gold.size()));
  for (const auto& [k, v] : gold.entries) {
    y(static_cast<Eigen::Index>(keys.size())) = v;
    keys.push_back(k);
  }
  const FeatureMatrix fm = build_feature_matrix(keys, store);
  std::vector<SenseProfile> profiles;
  profiles.reserve(keys.size());
  for (const auto& k : keys) profiles.push_back(*store.sense_profile(k));

  const bool cls = res.task == Task::classification;
  const auto& names = feature_names();
  std::vector<std::string> systems(names.begin(), names.end());
  systems.push_back("rnd");
  systems.push_back("swnrnd");
  if (cls) systems.push_back("majority_class");
  if (opt.include_ensemble) systems.emplace_back(kEnsembleRow);

  res.report.metric_names = cls ? std::vector<std::string>{"Accuracy", "Kappa"}
                                : std::vector<std::string>{"MAE", "Pearson"};
  std::map<std::string, std::map<std::string, std::vector<double>>> per_repeat;

  const SplitPlan plan = make_splits(keys.size(), opt.repeats, opt.train_fraction,
                                     derive_seed(opt.seed, "priors-splits"));
  const std::uint64_t rnd_seed = derive_seed(opt.seed, "rnd");
  const std::uint64_t swnrnd_seed = derive_seed(opt.seed, "swnrnd");
  res.selection_frequency.assign(kFeatureCount, 0.0);
  res.selection_count.assign(kFeatureCount, 0);

  for (std::size_t r = 0; r < plan.splits.size(); ++r) {
    const Split& sp = plan.splits[r];
    const std::size_t nt = sp.test.size();
    std::map<std::string, std::vector<double>> pred;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      auto& p = pred[names[j]];
      p.resize(nt);
      for (std::size_t i = 0; i < nt; ++i) {
        const double v = fm.x(static_cast<Eigen::Index>(sp.test[i]), static_cast<Eigen::Index>(j));
        p[i] = cls ? sign_label(v) : v;
      }
    }
    auto& rnd = pred["rnd"];
    auto& swnrnd = pred["swnrnd"];
    for (std::size_t i = 0; i < nt; ++i) {
      const std::size_t k = sp.test[i];
      const double a = baseline_rnd(keys[k], rnd_seed, opt.strategy).value;
      const double b = baseline_swnrnd(profiles[k], swnrnd_seed, opt.strategy).value;
      rnd.push_back(cls ? sign_label(a) : a);
      swnrnd.push_back(cls ? sign_label(b) : b);
    }
    if (cls) {
      std::vector<int> train_labels;
      for (std::size_t k : sp.train) train_labels.push_back(sign_label(y(static_cast<Eigen::Index>(k))));
      pred["majority_class"].assign(nt, majority_class_label(train_labels));
    }
    if (opt.include_ensemble) {
      EnsembleOptions eo = opt.ensemble;
      eo.fit.seed = derive_seed(derive_seed(opt.seed, "ensemble"), r);
      const MatrixXd xtr = select_rows(fm.x, sp.train);
      const VectorXd ytr = select_rows(y, sp.train);
      const EnsembleFit fit = fit_ensemble(res.task, xtr, ytr, eo);
      const VectorXd p = predict(fit.model, select_rows(fm.x, sp.test));
      pred[std::string(kEnsembleRow)].assign(p.data(), p.data() + p.size());
      for (std::size_t j = 0; j < kFeatureCount; ++j) {
        if (fit.stability) {
          res.selection_frequency[j] +=
              fit.stability->frequencies[j] / static_cast<double>(plan.splits.size());
        }
        res.selection_count[j] += fit.model.mask[j];
      }
    }

    std::vector<double> g(nt);
    for (std::size_t i = 0; i < nt; ++i) g[i] = y(static_cast<Eigen::Index>(sp.test[i]));
    res.pooled_gold.insert(res.pooled_gold.end(), g.begin(), g.end());
    const auto gl = detail::to_labels(g);
    for (const auto& s : systems) {
      const auto& p = pred.at(s);
      auto& pool = res.pooled[s];
      pool.insert(pool.end(), p.begin(), p.end());
      auto& m = per_repeat[s];
      if (cls) {
        const auto pl = detail::to_labels(p);
        m["Accuracy"].push_back(accuracy(pl, gl));
        m["Kappa"].push_back(cohen_kappa(pl, gl));
      } else {
        m["MAE"].push_back(mae(p, g));
        m["Pearson"].push_back(pearson_or_nan(p, g));
      }
    }
  }

  const std::string primary = primary_metric(res.task);
  std::vector<std::pair<std::string, std::map<std::string, MetricSummary>>> rows;
  for (const auto& s : systems) {
    std::map<std::string, MetricSummary> row;
    for (auto& [metric, values] : per_repeat[s]) row[metric] = summarize(values);
    rows.emplace_back(s, std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) {
    const double va = a.second.at(primary).mean;
    const double vb = b.second.at(primary).mean;
    if (std::isnan(va) != std::isnan(vb)) return std::isnan(vb);
    if (va != vb) return cls ? va > vb : va < vb;
    return a.first < b.first;
  });
  for (auto& [s, row] : rows) res.report.add(s, std::move(row));
  return res;
}

inline std::string priors_significance(const PriorEvalResult& res, std::uint64_t seed,
                                       std::size_t iterations) {
  const std::string primary = primary_metric(res.task);
  const auto& sys = res.report.systems;
  std::ostringstream out;
  out << "# paired t-test p-values on per-repeat " << primary << '\n';
  out << "system";
  for (const auto& s : sys) out << '\t' << s;
  out << '\n';
  for (std::size_t i = 0; i < sys.size(); ++i) {
    out << sys[i];
    const auto& a = res.report.rows[i].at(primary).per_repeat;
    for (std::size_t j = 0; j < sys.size(); ++j) {
      const auto& b = res.report.rows[j].at(primary).per_repeat;
      out << '\t' << format_metric(a.size() >= 2 ? paired_t_test(a, b).p_value : NAN);
    }
    out << '\n';
  }
  out << "# approximate randomization on pooled test predictions (" << iterations
      << " iterations), " << primary << " against " << sys.front() << '\n';
  out << "system\tdelta\tp_value\n";
  const auto& best = res.pooled.at(sys.front());
  RegressionMetric metric;
  if (res.task == Task::regression) {
    metric = [](std::span<const double> p, std::span<const double> g) { return mae(p, g); };
  } else {
    metric = [](std::span<const double> p, std::span<const double> g) {
      std::size_t hit = 0;
      for (std::size_t i = 0; i < p.size(); ++i) hit += sign_label(p[i]) == sign_label(g[i]);
      return static_cast<double>(hit) / static_cast<double>(p.size());
    };
  }
  for (std::size_t i = 1; i < sys.size(); ++i) {
    const auto t = approx_randomization_test(best, res.pooled.at(sys[i]), res.pooled_gold,
                                             metric, iterations,
                                             derive_seed(seed, fnv1a(sys[i])));
    out << sys[i] << '\t' << format_fixed(t.statistic, 6) << '\t'
        << format_fixed(t.p_value, 6) << '\n';
  }
  return out.str();
}

// Loads and aligns a gold lexicon; the all-zero filter is applied when
// `drop_all_zero` is set.
struct PreparedGold {
  GoldLexicon aligned;
  GoldLexicon filtered;
  AlignReport report;
  std::size_t removed_all_zero = 0;
};

inline PreparedGold prepare_gold(const std::string& path, GoldFormat format,
                                 const SwnStore& store) {
  PreparedGold g;
  const auto raw = load_gold(path, format);
  g.aligned = align_to_swn(raw, store, default_kind(format), EnglishSuffixLemmatizer{},
                           detail::base_name(path), &g.report);
  g.filtered = filter_all_zero(g.aligned, store, &g.removed_all_zero);
  return g;
}

inline EnsembleOptions ensemble_options(const RunConfig& cfg) {
  EnsembleOptions eo;
  eo.stability_selection = cfg.stability_selection;
  eo.stability.resamples = cfg.stability_resamples;
  eo.fit.grid = cfg.grid;
  eo.fit.folds = cfg.folds;
  return eo;
}

inline OutputFiles cmd_eval_priors(const RunConfig& cfg) {
  const std::uint64_t seed = detail::require_seed(cfg, "eval-priors");
  detail::require_file(cfg.swn_path, "SentiWordNet file");
  detail::require_file(cfg.gold_path, "gold lexicon");
  const std::string head = detail::provenance(
      "eval-priors", seed, {{"swn", cfg.swn_path}, {"gold", cfg.gold_path}});

  const SwnStore store = SwnStore::load(cfg.swn_path);
  const PreparedGold gold = prepare_gold(cfg.gold_path, cfg.gold_format, store);

  PriorEvalOptions opt;
  opt.seed = seed;
  opt.strategy = cfg.strategy;
  opt.repeats = cfg.repeats;
  opt.train_fraction = cfg.train_fraction;
  opt.ensemble = ensemble_options(cfg);
  opt.randomization_iterations = cfg.randomization_iterations;
  const PriorEvalResult res = evaluate_priors(store, gold.filtered, opt);

  const std::string info = "# task: " + std::string(task_name(res.task)) +
                           "\n# entries: " + std::to_string(res.entries) +
                           "\n# protocol: " + std::to_string(cfg.repeats) + " x " +
                           format_fixed(cfg.train_fraction, 2) + " train splits\n";
  OutputFiles files;
  {
    std::ostringstream os;
    os << head << info;
    write_report_tsv(os, res.report);
    files.emplace_back("priors.tsv", os.str());
  }
  {
    std::ostringstream os;
    os << head << info;
    write_report_table(os, res.report);
    files.emplace_back("priors.txt", os.str());
  }
  files.emplace_back("priors_significance.tsv",
                     head + priors_significance(res, derive_seed(seed, "significance"),
                                                cfg.randomization_iterations));
  {
    std::ostringstream os;
    os << head << "feature\tselection_frequency\trepeats_kept\n";
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      os << feature_names()[j] << '\t' << format_fixed(res.selection_frequency[j], 4) << '\t'
         << res.selection_count[j] << '\n';
    }
    files.emplace_back("ensemble_features.tsv", os.str());
  }
  if (res.task == Task::regression) {
    std::string best_formula;
    for (const auto& s : res.report.systems) {
      if (is_formula_row(s)) {
        best_formula = s;
        break;
      }
    }
    std::ostringstream os;
    os << head << "system\tbin_lo\tbin_hi\tcount\tMAE\n";
    for (const auto& s : {best_formula, std::string(kEnsembleRow)}) {
      for (const auto& b : mae_by_bin(res.pooled.at(s), res.pooled_gold, equal_bins())) {
        os << s << '\t' << format_fixed(b.lo, 3) << '\t' << format_fixed(b.hi, 3) << '\t'
           << b.count << '\t' << format_fixed(b.mae, 6) << '\n';
      }
    }
    files.emplace_back("priors_bins.tsv", os.str());
  }
  {
    std::ostringstream os;
    os << head;
    write_align_report(os, gold.report, gold.removed_all_zero, gold.filtered.size());
    files.emplace_back("align_report.tsv", os.str());
  }
  return files;
}

// ---------------------------------------------------------------------------
// Lexicon construction

struct BuildResult {
  std::string lexicon;  // header + sorted key<TAB>score lines
  EnsembleModel model;
  std::size_t keys = 0;
  std::size_t from_gold = 0;
  std::size_t predicted = 0;
  std::size_t zero = 0;
};

// Model prediction for every non-zero SWN key, 0 for all-zero keys, and the
// gold value wherever the key is in the gold lexicon. Gold values are written
// in shortest round-trip form so they read back exactly.
inline BuildResult build_sentiwords(const SwnStore& store, const GoldLexicon& gold,
                                    EnsembleOptions eo, std::uint64_t seed,
                                    bool nonzero_only, const std::string& head) {
  const Task task = gold.kind == GoldKind::binary ? Task::classification : Task::regression;
  std::vector<std::string> train_keys;
  std::vector<double> train_y;
  for (const auto& [k, v] : gold.entries) {
    if (!store.is_all_zero(k)) {
      train_keys.push_back(k);
      train_y.push_back(v);
    }
  }
  const FeatureMatrix train = build_feature_matrix(train_keys, store);
  const VectorXd y = Eigen::Map<const VectorXd>(train_y.data(),
                                                static_cast<Eigen::Index>(train_y.size()));
  eo.fit.seed = derive_seed(seed, "build");
  BuildResult res;
  res.model = fit_ensemble(task, train.x, y, eo).model;

  const auto all_keys = store.lemma_pos_keys();
  std::vector<std::string> to_predict;
  for (const auto& k : all_keys) {
    if (!gold.entries.count(k) && !store.is_all_zero(k)) to_predict.push_back(k);
  }
  const VectorXd pred = predict(res.model, build_feature_matrix(to_predict, store).x);

  std::ostringstream body;
  std::size_t p = 0;
  for (const auto& k : all_keys) {
    if (const auto it = gold.entries.find(k); it != gold.entries.end()) {
      body << k << '\t' << format_shortest(it->second) << '\n';
      ++res.from_gold;
    } else if (store.is_all_zero(k)) {
      if (nonzero_only) continue;
      body << k << "\t0\n";
      ++res.zero;
    } else {
      body << k << '\t' << format_fixed(pred(static_cast<Eigen::Index>(p++)), 6) << '\n';
      ++res.predicted;
    }
  }
  res.keys = res.from_gold + res.zero + res.predicted;
  std::ostringstream out;
  out << head << "# task: " << task_name(task) << '\n'
      << "# model fnv1a=" << hex64(fnv1a(model_to_string(res.model))) << '\n'
      << "# keys: " << res.keys << " gold: " << res.from_gold
      << " predicted: " << res.predicted << " zero: " << res.zero << '\n'
      << "# lemma#pos\tscore\n"
      << body.str();
  res.lexicon = out.str();
  return res;
}

inline OutputFiles cmd_build_sentiwords(const RunConfig& cfg) {
  const std::uint64_t seed = detail::require_seed(cfg, "build-lexicon");
  detail::require_file(cfg.swn_path, "SentiWordNet file");
  detail::require_file(cfg.gold_path, "gold lexicon");
  const std::string head = detail::provenance(
      "build-lexicon", seed, {{"swn", cfg.swn_path}, {"gold", cfg.gold_path}});
  const SwnStore store = SwnStore::load(cfg.swn_path);
  const PreparedGold gold = prepare_gold(cfg.gold_path, cfg.gold_format, store);
  const BuildResult res =
      build_sentiwords(store, gold.aligned, ensemble_options(cfg), seed, cfg.nonzero_only, head);
  std::ostringstream align;
  align << head;
  write_align_report(align, gold.report, gold.removed_all_zero, gold.filtered.size());
  return {{"sentiwords.tsv", res.lexicon},
          {"sentiwords.model", model_to_string(res.model)},
          {"align_report.tsv", align.str()}};
}

// ---------------------------------------------------------------------------
// Sentence-level evaluation

struct NamedLexicon {
  std::string name;
  Lexicon entries;
};

struct NamedDataset {
  std::string name;
  std::vector<TaggedSentence> sentences;
};

struct SentenceEvalOptions {
  std::uint64_t seed = 0;
  double neg_threshold = -0.5;
  double pos_threshold = 0.5;
  UndecidableSetting undecidable;
  bool with_stopwords = false;  // also evaluate with stop words removed
  StopList stoplist = StopList::mysql_default();
  std::size_t randomization_iterations = 10000;
};

struct SentenceRow {
  std::string dataset;
  std::string lexicon;
  bool stop_filtered = false;
  CoverageResult cov;
  bool regression = false;
  double pearson_excluded = NAN;  // undecidable sentences left out
  std::size_t n_excluded = 0;
  double pearson_zero = NAN;  // undecidable sentences scored 0
  std::size_t n_all = 0;
  double acc = NAN;  // under the configured undecidable policy
  std::size_t n_binary = 0;
  std::size_t undecidable = 0;  // binarized sentences the vote cannot decide
  std::vector<double> scores_zero;
  std::vector<int> labels;  // 0 marks an undecidable sentence
  std::vector<int> gold_labels;
};

inline SentenceRow evaluate_sentences_one(const NamedDataset& data, const NamedLexicon& lex,
                                          bool stop_filtered, const SentenceEvalOptions& opt) {
  if (data.sentences.empty()) throw DataError("dataset " + data.name + " is empty");
  const StopList* stop = stop_filtered ? &opt.stoplist : nullptr;
  SentenceRow row;
  row.dataset = data.name;
  row.lexicon = lex.name;
  row.stop_filtered = stop_filtered;
  row.cov = coverage(std::span<const TaggedSentence>(data.sentences), lex.entries, stop);

  for (const auto& s : data.sentences) {
    if (!s.gold) throw DataError("sentence " + s.id + " in " + data.name + " has no gold score");
    if (*s.gold != 1.0 && *s.gold != -1.0) row.regression = true;
  }
  if (row.regression) {
    std::vector<double> gx, px, g0;
    for (const auto& s : data.sentences) {
      const auto v = score_sentence_avg(s, lex.entries, stop);
      row.scores_zero.push_back(v.value_or(0.0));
      g0.push_back(*s.gold);
      if (v) {
        px.push_back(*v);
        gx.push_back(*s.gold);
      }
    }
    row.n_excluded = px.size();
    row.n_all = g0.size();
    if (px.size() >= 2) row.pearson_excluded = pearson_or_nan(px, gx);
    row.pearson_zero = pearson_or_nan(row.scores_zero, g0);
  }

  const auto bin = binarize_dataset(data.sentences, opt.neg_threshold, opt.pos_threshold);
  const BinaryLexicon blex = binarize_lexicon(lex.entries);
  const std::uint64_t rseed = derive_seed(opt.undecidable.seed.value_or(opt.seed), "undecidable");
  std::size_t hit = 0, counted = 0;
  for (const auto& s : bin) {
    const int g = *s.gold > 0 ? 1 : -1;
    auto l = classify_sentence_majority(s, blex, stop);
    row.gold_labels.push_back(g);
    if (!l) {
      ++row.undecidable;
      if (opt.undecidable.policy == UndecidablePolicy::random) {
        Rng rng(derive_seed(rseed, fnv1a(data.name + '\t' + lex.name + '\t' + s.id)));
        l = rng.coin() ? 1 : -1;
      }
    }
    row.labels.push_back(l.value_or(0));
    if (!l && opt.undecidable.policy == UndecidablePolicy::drop) continue;
    ++counted;
    hit += l && *l == g;
  }
  row.n_binary = counted;
  if (counted > 0) row.acc = static_cast<double>(hit) / static_cast<double>(counted);
  return row;
}

struct SentenceEvalResult {
  std::vector<SentenceRow> rows;
  std::string significance;
};

inline SentenceEvalResult evaluate_sentences(const std::vector<NamedDataset>& datasets,
                                             const std::vector<NamedLexicon>& lexica,
                                             const SentenceEvalOptions& opt) {
  if (datasets.empty()) throw UsageError("no dataset given");
  if (lexica.empty()) throw UsageError("no lexicon given");
  SentenceEvalResult res;
  std::vector<bool> settings{false};
  if (opt.with_stopwords) settings.push_back(true);
  for (const auto& d : datasets) {
    for (bool stop : settings) {
      for (const auto& l : lexica) res.rows.push_back(evaluate_sentences_one(d, l, stop, opt));
    }
  }

  // Fisher z on correlations (undecidable scored 0, so every lexicon has the
  // same n) and approximate randomization on majority-vote accuracy, each
  // against the best lexicon of the same dataset and setting; then stop
  // words on against off for every lexicon.
  std::ostringstream out;
  out << "dataset\tstopwords\tsystem_a\tsystem_b\ttest\tstatistic\tp_value\n";
  auto acc_metric = [](std::span<const double> p, std::span<const double> g) {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < p.size(); ++i) hit += p[i] == g[i];
    return static_cast<double>(hit) / static_cast<double>(p.size());
  };
  auto as_double = [](const std::vector<int>& v) { return std::vector<double>(v.begin(), v.end()); };
  auto emit = [&](const SentenceRow& a, const SentenceRow& b, const std::string& stop_col) {
    if (a.regression && !std::isnan(a.pearson_zero) && !std::isnan(b.pearson_zero) &&
        std::abs(a.pearson_zero) < 1 && std::abs(b.pearson_zero) < 1 && a.n_all > 3) {
      const auto t = fisher_z_test(a.pearson_zero, a.n_all, b.pearson_zero, b.n_all);
      out << a.dataset << '\t' << stop_col << '\t' << a.lexicon << '\t' << b.lexicon
          << "\tfisher_z\t" << format_fixed(t.statistic, 4) << '\t'
          << format_fixed(t.p_value, 6) << '\n';
    }
    if (!a.labels.empty()) {
      const auto t = approx_randomization_test(
          as_double(a.labels), as_double(b.labels), as_double(a.gold_labels), acc_metric,
          opt.randomization_iterations,
          derive_seed(opt.seed, fnv1a(a.dataset + '\t' + stop_col + '\t' + a.lexicon + '\t' +
                                      b.lexicon)));
      out << a.dataset << '\t' << stop_col << '\t' << a.lexicon << '\t' << b.lexicon
          << "\trandomization\t" << format_fixed(t.statistic, 4) << '\t'
          << format_fixed(t.p_value, 6) << '\n';
    }
  };
  const std::size_t nl = lexica.size();
  for (std::size_t g = 0; g < res.rows.size(); g += nl) {
    std::size_t best = g;
    for (std::size_t i = g; i < g + nl; ++i) {
      const auto& r = res.rows[i];
      const auto& b = res.rows[best];
      const double ri = r.regression ? r.pearson_zero : r.acc;
      const double rb = b.regression ? b.pearson_zero : b.acc;
      if (!std::isnan(ri) && (std::isnan(rb) || ri > rb)) best = i;
    }
    for (std::size_t i = g; i < g + nl; ++i) {
      if (i != best) emit(res.rows[best], res.rows[i], res.rows[i].stop_filtered ? "on" : "off");
    }
  }
  if (opt.with_stopwords) {
    for (std::size_t g = 0; g < res.rows.size(); g += 2 * nl) {
      for (std::size_t i = 0; i < nl; ++i) {
        emit(res.rows[g + nl + i], res.rows[g + i], "on_vs_off");
      }
    }
  }
  res.significance = out.str();
  return res;
}

inline void write_sentence_tsv(std::ostream& out, const std::vector<SentenceRow>& rows) {
  out << "dataset\tlexicon\tstopwords\tsentences\tcoverage\tunmatched_sentences"
         "\tpearson_excluded\tn_excluded\tpearson_zero\tn_all\taccuracy\tn_binary"
         "\tundecidable\n";
  for (const auto& r : rows) {
    out << r.dataset << '\t' << r.lexicon << '\t' << (r.stop_filtered ? "on" : "off") << '\t'
        << r.cov.sentences << '\t' << format_fixed(r.cov.ratio(), 4) << '\t'
        << r.cov.unmatched_sentences << '\t' << format_metric(r.pearson_excluded) << '\t'
        << r.n_excluded << '\t' << format_metric(r.pearson_zero) << '\t' << r.n_all << '\t'
        << format_metric(r.acc) << '\t' << r.n_binary << '\t' << r.undecidable << '\n';
  }
}

inline void write_sentence_table(std::ostream& out, const std::vector<SentenceRow>& rows) {
  std::size_t wd = 7, wl = 7;
  for (const auto& r : rows) {
    wd = std::max(wd, r.dataset.size());
    wl = std::max(wl, r.lexicon.size());
  }
  using detail::pad;
  out << pad("dataset", wd) << "  " << pad("lexicon", wl)
      << "  stop  coverage  unmatched  r_excl  r_zero  accuracy  undecidable\n";
  for (const auto& r : rows) {
    out << pad(r.dataset, wd) << "  " << pad(r.lexicon, wl) << "  "
        << pad(r.stop_filtered ? "on" : "off", 4) << "  " << pad(format_metric(r.cov.ratio()), 8)
        << "  " << pad(std::to_string(r.cov.unmatched_sentences), 9) << "  "
        << pad(format_metric(r.pearson_excluded), 6) << "  "
        << pad(format_metric(r.pearson_zero), 6) << "  " << pad(format_metric(r.acc), 8) << "  "
        << r.undecidable << '\n';
  }
}

namespace detail {

inline std::vector<NamedDataset> load_datasets(const RunConfig& cfg,
                                               std::vector<NamedPath>& inputs) {
  if (cfg.dataset_paths.empty()) throw UsageError("at least one --dataset is required");
  std::vector<NamedDataset> out;
  for (const auto& p : cfg.dataset_paths) {
    require_file(p, "dataset");
    inputs.push_back({"dataset", p});
  }
  for (const auto& p : cfg.dataset_paths) {
    NamedDataset d{std::filesystem::path(p).stem().string(), load_dataset(p)};
    if (d.sentences.empty()) throw DataError("dataset " + p + " is empty");
    out.push_back(std::move(d));
  }
  return out;
}

inline std::vector<NamedLexicon> load_lexica(const RunConfig& cfg,
                                             std::vector<NamedPath>& inputs) {
  if (cfg.lexicon_specs.empty()) throw UsageError("at least one --lexicon is required");
  std::vector<NamedPath> specs;
  for (const auto& s : cfg.lexicon_specs) {
    specs.push_back(parse_lexicon_spec(s));
    require_file(specs.back().path, "lexicon");
    inputs.push_back({"lexicon " + specs.back().label, specs.back().path});
  }
  std::vector<NamedLexicon> out;
  for (const auto& s : specs) out.push_back({s.label, load_lexicon(s.path)});
  return out;
}

inline StopList load_stoplist(const RunConfig& cfg, std::vector<NamedPath>& inputs) {
  if (cfg.stoplist_path.empty()) return StopList::mysql_default();
  require_file(cfg.stoplist_path, "stop list");
  inputs.push_back({"stoplist", cfg.stoplist_path});
  return StopList::load(cfg.stoplist_path);
}

}  // namespace detail

inline OutputFiles cmd_eval_sentences(const RunConfig& cfg) {
  const std::uint64_t seed = detail::require_seed(cfg, "eval-sentences");
  if (!(cfg.neg_threshold < cfg.pos_threshold)) {
    throw UsageError("--neg-threshold must be below --pos-threshold");
  }
  std::vector<detail::NamedPath> inputs;
  const auto datasets = detail::load_datasets(cfg, inputs);
  const auto lexica = detail::load_lexica(cfg, inputs);
  SentenceEvalOptions opt;
  opt.seed = seed;
  opt.neg_threshold = cfg.neg_threshold;
  opt.pos_threshold = cfg.pos_threshold;
  opt.undecidable = cfg.undecidable;
  opt.with_stopwords = cfg.stopwords;
  opt.stoplist = detail::load_stoplist(cfg, inputs);
  opt.randomization_iterations = cfg.randomization_iterations;
  const std::string head = detail::provenance("eval-sentences", seed, inputs) +
                           "# thresholds: " + format_fixed(cfg.neg_threshold, 3) + " " +
                           format_fixed(cfg.pos_threshold, 3) + "\n# undecidable: " +
                           std::string(undecidable_name(cfg.undecidable.policy)) + "\n";
  const auto res = evaluate_sentences(datasets, lexica, opt);
  std::ostringstream tsv, txt;
  tsv << head;
  write_sentence_tsv(tsv, res.rows);
  txt << head;
  write_sentence_table(txt, res.rows);
  return {{"sentences.tsv", tsv.str()},
          {"sentences.txt", txt.str()},
          {"sentences_significance.tsv", head + res.significance}};
}

// ---------------------------------------------------------------------------
// Inspection and coverage

inline std::string inspect_store(const SwnStore& store, const ParseDiagnostics& diag,
                                 const std::vector<std::string>& keys) {
  std::ostringstream out;
  if (keys.empty()) {
    out << "lines\t" << diag.lines_read << "\nentries\t" << diag.entries << "\nskipped\t"
        << diag.skipped << "\nsum_warnings\t" << diag.sum_warnings << "\nkeys\t"
        << store.key_count() << "\nnonzero_keys\t" << store.lemma_pos_keys(true).size()
        << '\n';
    std::map<char, std::size_t> per_pos;
    for (const auto& k : store.lemma_pos_keys()) ++per_pos[k.back()];
    for (const auto& [p, n] : per_pos) out << "keys_" << p << '\t' << n << '\n';
    return out.str();
  }
  for (const auto& key : keys) {
    const auto lp = split_key(key);
    if (!lp) throw UsageError("not a lemma#pos key: " + key);
    const auto profile = store.sense_profile(make_key(to_lower(lp->lemma), lp->pos));
    if (!profile) {
      out << key << "\tnot in store\n";
      continue;
    }
    out << profile->key << '\n' << "sense\tpos\tneg\n";
    for (std::size_t i = 0; i < profile->size(); ++i) {
      out << i + 1 << '\t' << format_fixed(profile->pos_scores[i]) << '\t'
          << format_fixed(profile->neg_scores[i]) << '\n';
    }
    out << "formula\tf_pos\tf_neg\tforced_sign\tm\td\n";
    for (FormulaId id : kAllFormulae) {
      const auto o = apply_formula(id, *profile);
      out << formula_name(id) << '\t' << format_fixed(o.f_pos) << '\t' << format_fixed(o.f_neg)
          << '\t' << (o.forced_sign ? std::to_string(*o.forced_sign) : std::string("-")) << '\t'
          << format_fixed(map_polarity(o, Strategy::m).value) << '\t'
          << format_fixed(map_polarity(o, Strategy::d).value) << '\n';
    }
    out << '\n';
  }
  return out.str();
}

inline OutputFiles cmd_inspect(const RunConfig& cfg) {
  detail::require_file(cfg.swn_path, "SentiWordNet file");
  ParseDiagnostics diag;
  const SwnStore store = SwnStore::load(cfg.swn_path, &diag);
  std::string text = inspect_store(store, diag, cfg.keys);
  if (cfg.keys.empty()) {
    for (std::size_t i = 0; i < diag.messages.size() && i < 20; ++i) {
      text += "# " + diag.messages[i] + "\n";
    }
  }
  return {{"inspect.txt", text}};
}

inline OutputFiles cmd_coverage(const RunConfig& cfg) {
  std::vector<detail::NamedPath> inputs;
  const auto datasets = detail::load_datasets(cfg, inputs);
  const auto lexica = detail::load_lexica(cfg, inputs);
  const StopList stop = detail::load_stoplist(cfg, inputs);
  std::ostringstream out;
  out << detail::provenance("coverage", cfg.seed, inputs)
      << "dataset\tlexicon\tstopwords\tsentences\ttokens\tmatched\tcoverage"
         "\tunmatched_sentences\n";
  for (const auto& d : datasets) {
    for (bool filtered : {false, true}) {
      if (filtered && !cfg.stopwords) continue;
      for (const auto& l : lexica) {
        const auto c = coverage(std::span<const TaggedSentence>(d.sentences), l.entries,
                                filtered ? &stop : nullptr);
        out << d.name << '\t' << l.name << '\t' << (filtered ? "on" : "off") << '\t'
            << c.sentences << '\t' << c.total_tokens << '\t' << c.matched_tokens << '\t'
            << format_fixed(c.ratio(), 4) << '\t' << c.unmatched_sentences << '\n';
      }
    }
  }
  return {{"coverage.tsv", out.str()}};
}

}  // namespace sentilex
