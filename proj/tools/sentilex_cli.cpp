// sentilex: prior-polarity lexicon toolkit.
//
//   sentilex eval-priors    --swn FILE --gold FILE --format anew|gi|warr|tsv --seed N --out DIR
//   sentilex build-lexicon  --swn FILE --gold FILE --format ... --seed N --out DIR
//   sentilex eval-sentences --dataset FILE... --lexicon [name=]FILE... --seed N --out DIR
//   sentilex inspect        --swn FILE [--key lemma#pos ...]
//   sentilex coverage       --dataset FILE... --lexicon [name=]FILE...
//
// Exit status: 0 success, 1 usage error, 2 data error.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sentilex/pipeline.hpp"

using namespace sentilex;

namespace {

struct Flags {
  RunConfig cfg;
  std::uint64_t seed = 0;
  std::string format = "tsv";
  std::string strategy = "m";
  std::string stopwords = "off";
  std::string undecidable = "wrong";
  std::vector<double> grid;
  bool no_stability = false;
};

void add_seed(CLI::App* cmd, Flags& f, bool required) {
  auto* opt = cmd->add_option("--seed", f.seed, "Random seed");
  if (required) opt->required();
}

void add_gold(CLI::App* cmd, Flags& f) {
  cmd->add_option("--swn", f.cfg.swn_path, "SentiWordNet 3.0 file")->required();
  cmd->add_option("--gold", f.cfg.gold_path, "Gold lexicon file")->required();
  cmd->add_option("--format", f.format, "Gold format: anew, gi, warr, tsv")
      ->check(CLI::IsMember({"anew", "gi", "warr", "tsv", "generic_tsv"}));
  cmd->add_option("--strategy", f.strategy, "Mapping strategy for baselines: m or d")
      ->check(CLI::IsMember({"m", "d"}));
  cmd->add_option("--grid", f.grid, "Regularization strengths");
  cmd->add_option("--folds", f.cfg.folds, "Cross-validation folds");
  cmd->add_option("--resamples", f.cfg.stability_resamples, "Stability selection resamples");
  cmd->add_flag("--no-stability", f.no_stability, "Skip stability selection");
}

void add_sentences(CLI::App* cmd, Flags& f) {
  cmd->add_option("--dataset", f.cfg.dataset_paths, "id<TAB>gold<TAB>tokens file")->required();
  cmd->add_option("--lexicon", f.cfg.lexicon_specs, "[name=]lexicon TSV")->required();
  cmd->add_option("--stopwords", f.stopwords, "Also evaluate with stop words removed")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--stoplist", f.cfg.stoplist_path, "Stop list, one token per line");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sentilex: prior-polarity lexicon toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "TOML-style config file; flags override it");
  app.require_subcommand(1);
  Flags f;
  std::string out_dir = ".";

  auto* priors = app.add_subcommand("eval-priors", "Evaluate formulae and the ensemble on a gold lexicon");
  add_gold(priors, f);
  add_seed(priors, f, true);
  priors->add_option("--repeats", f.cfg.repeats, "Random 70/30 splits");
  priors->add_option("--iterations", f.cfg.randomization_iterations, "Randomization test iterations");
  priors->add_option("--out", out_dir, "Output directory");

  auto* build = app.add_subcommand("build-lexicon", "Build a SentiWords-style lexicon");
  add_gold(build, f);
  add_seed(build, f, true);
  build->add_flag("--nonzero-only", f.cfg.nonzero_only, "Omit keys whose senses are all zero");
  build->add_option("--out", out_dir, "Output directory");

  auto* sent = app.add_subcommand("eval-sentences", "Sentence-level evaluation of lexica");
  add_sentences(sent, f);
  add_seed(sent, f, true);
  sent->add_option("--neg-threshold", f.cfg.neg_threshold, "Gold <= this is negative");
  sent->add_option("--pos-threshold", f.cfg.pos_threshold, "Gold >= this is positive");
  sent->add_option("--undecidable", f.undecidable, "wrong, drop, random or random(N)");
  sent->add_option("--iterations", f.cfg.randomization_iterations, "Randomization test iterations");
  sent->add_option("--out", out_dir, "Output directory");

  auto* inspect = app.add_subcommand("inspect", "Store summary or per-key formula table");
  inspect->add_option("--swn", f.cfg.swn_path, "SentiWordNet 3.0 file")->required();
  inspect->add_option("--key", f.cfg.keys, "lemma#pos to show");

  auto* cov = app.add_subcommand("coverage", "Token coverage of lexica over datasets");
  add_sentences(cov, f);
  add_seed(cov, f, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    RunConfig& cfg = f.cfg;
    const auto* seed_opt = app.get_subcommands().front()->get_option_no_throw("--seed");
    if (seed_opt && seed_opt->count() > 0) cfg.seed = f.seed;
    cfg.gold_format = parse_gold_format(f.format);
    cfg.strategy = parse_strategy(f.strategy);
    cfg.stopwords = f.stopwords == "on";
    cfg.undecidable = parse_undecidable(f.undecidable);
    cfg.stability_selection = !f.no_stability;
    if (!f.grid.empty()) cfg.grid = f.grid;

    OutputFiles files;
    CLI::App* cmd = app.get_subcommands().front();
    if (cmd == priors) {
      files = cmd_eval_priors(cfg);
    } else if (cmd == build) {
      files = cmd_build_sentiwords(cfg);
    } else if (cmd == sent) {
      files = cmd_eval_sentences(cfg);
    } else if (cmd == inspect) {
      std::cout << cmd_inspect(cfg).front().second;
      return 0;
    } else {
      std::cout << cmd_coverage(cfg).front().second;
      return 0;
    }
    write_outputs(files, out_dir);
    for (const auto& [name, text] : files) {
      std::cerr << "wrote " << (std::filesystem::path(out_dir) / name).string() << '\n';
    }
    // The human-readable table goes to stdout as well.
    for (const auto& [name, text] : files) {
      if (name.ends_with(".txt")) std::cout << text;
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "sentilex: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "sentilex: " << e.what() << '\n';
    return 2;
  }
}
