#pragma once

// Bag-of-words sentence scoring against a word-level lexicon: averaged
// scores for regression, majority vote for classification.

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sentilex/common.hpp"
#include "sentilex/stopwords.hpp"
#include "sentilex/swn_store.hpp"

namespace sentilex {

struct TaggedSentence {
  std::string id;
  std::vector<std::string> tokens;  // lemma#pos
  std::optional<double> gold;
};

using Lexicon = std::unordered_map<std::string, double>;
using BinaryLexicon = std::unordered_map<std::string, int>;

class StopList {
 public:
  StopList() = default;

  template <typename Range>
  explicit StopList(const Range& words) {
    for (const auto& w : words) words_.insert(to_lower(w));
  }

  static StopList mysql_default() { return StopList(kMysqlStopwords); }

  static StopList parse(std::istream& in) {
    StopList s;
    std::string line;
    while (std::getline(in, line)) {
      const auto w = trim(line);
      if (w.empty() || w.front() == '#') continue;
      s.words_.insert(to_lower(w));
    }
    return s;
  }

  static StopList load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read stop list: " + path);
    StopList s = parse(in);
    if (s.empty()) throw DataError("stop list is empty: " + path);
    return s;
  }

  bool contains(std::string_view lemma) const {
    return words_.count(to_lower(lemma)) > 0;
  }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

 private:
  std::unordered_set<std::string> words_;
};

namespace detail {

// lemma#p with p in a/n/v/r ('s' folds into 'a'); lemma lowercased.
inline std::optional<std::string> normalize_token(std::string_view tok) {
  const auto lp = split_key(tok);
  if (!lp) return std::nullopt;
  return make_key(to_lower(lp->lemma), lp->pos);
}

inline std::string_view token_lemma(std::string_view tok) {
  const auto hash = tok.rfind('#');
  return hash == std::string_view::npos ? tok : tok.substr(0, hash);
}

}  // namespace detail

// One sentence per line: id<TAB>gold<TAB>lemma#pos lemma#pos ...
// An empty gold field (or "-", "NA") means no gold. The token field may be
// empty or missing.
inline std::vector<TaggedSentence> parse_dataset(std::istream& in) {
  std::vector<TaggedSentence> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto f = split(line, '\t');
    if (f.size() < 2 || f.size() > 3) {
      throw DataError("dataset line " + std::to_string(line_no) +
                      ": expected id<TAB>gold<TAB>tokens");
    }
    TaggedSentence s;
    s.id = std::string(trim(f[0]));
    const auto g = trim(f[1]);
    if (!g.empty() && g != "-" && g != "NA") {
      double v = 0.0;
      if (!parse_double(g, v)) {
        throw DataError("dataset line " + std::to_string(line_no) +
                        ": bad gold value '" + std::string(g) + "'");
      }
      s.gold = v;
    }
    if (f.size() == 3) {
      std::istringstream toks(f[2]);
      std::string tok;
      while (toks >> tok) {
        auto norm = detail::normalize_token(tok);
        if (!norm) {
          throw DataError("dataset line " + std::to_string(line_no) +
                          ": token '" + tok + "' is not lemma#pos");
        }
        s.tokens.push_back(std::move(*norm));
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<TaggedSentence> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read dataset: " + path);
  return parse_dataset(in);
}

// lemma#pos<TAB>score[<TAB>...]; '#' lines are header/comments.
// A repeated key with a different score is an error.
inline Lexicon parse_lexicon(std::istream& in) {
  Lexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto f = split(line, '\t');
    double v = 0.0;
    auto key = f.size() >= 2 ? detail::normalize_token(trim(f[0])) : std::nullopt;
    if (!key || !parse_double(f[1], v)) {
      throw DataError("lexicon line " + std::to_string(line_no) +
                      ": expected lemma#pos<TAB>score");
    }
    auto [it, fresh] = lex.emplace(*key, v);
    if (!fresh && it->second != v) {
      throw DataError("lexicon line " + std::to_string(line_no) +
                      ": conflicting score for " + *key);
    }
  }
  return lex;
}

inline Lexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read lexicon: " + path);
  return parse_lexicon(in);
}

// Sign of each score; zero-scored entries stay 0 and never sway a vote.
inline BinaryLexicon binarize_lexicon(const Lexicon& lex) {
  BinaryLexicon out;
  out.reserve(lex.size());
  for (const auto& [k, v] : lex) out.emplace(k, v > 0.0 ? 1 : (v < 0.0 ? -1 : 0));
  return out;
}

inline std::vector<std::string> filter_stopwords(
    std::span<const std::string> tokens, const StopList& stop) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!stop.contains(detail::token_lemma(t))) out.push_back(t);
  }
  return out;
}

namespace detail {

inline std::vector<std::string> effective_tokens(const TaggedSentence& s,
                                                 const StopList* stop) {
  if (!stop) return s.tokens;
  return filter_stopwords(s.tokens, *stop);
}

}  // namespace detail

// Mean lexicon score over matched tokens; nullopt when nothing matches.
inline std::optional<double> score_sentence_avg(const TaggedSentence& s,
                                                const Lexicon& lex,
                                                const StopList* stop = nullptr) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& t : detail::effective_tokens(s, stop)) {
    const auto it = lex.find(t);
    if (it == lex.end()) continue;
    sum += it->second;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

// Sign of the summed labels. A zero sum, including no match at all, is
// undecidable.
inline std::optional<int> classify_sentence_majority(
    const TaggedSentence& s, const BinaryLexicon& lex,
    const StopList* stop = nullptr) {
  long sum = 0;
  for (const auto& t : detail::effective_tokens(s, stop)) {
    const auto it = lex.find(t);
    if (it != lex.end()) sum += it->second;
  }
  if (sum == 0) return std::nullopt;
  return sum > 0 ? 1 : -1;
}

struct CoverageResult {
  std::size_t sentences = 0;
  std::size_t total_tokens = 0;
  std::size_t matched_tokens = 0;
  std::size_t unmatched_sentences = 0;  // no token in the lexicon

  double ratio() const {
    return total_tokens == 0 ? 0.0
                             : static_cast<double>(matched_tokens) /
                                   static_cast<double>(total_tokens);
  }
  double unmatched_fraction() const {
    return sentences == 0 ? 0.0
                          : static_cast<double>(unmatched_sentences) /
                                static_cast<double>(sentences);
  }
};

template <typename Lex>
CoverageResult coverage(std::span<const TaggedSentence> data, const Lex& lex,
                        const StopList* stop = nullptr) {
  if (data.empty()) throw DataError("coverage of an empty dataset");
  CoverageResult r;
  r.sentences = data.size();
  for (const auto& s : data) {
    std::size_t hit = 0;
    const auto toks = detail::effective_tokens(s, stop);
    for (const auto& t : toks) hit += lex.count(t);
    r.total_tokens += toks.size();
    r.matched_tokens += hit;
    if (hit == 0) ++r.unmatched_sentences;
  }
  return r;
}

struct BinarizeCounts {
  std::size_t negative = 0;
  std::size_t positive = 0;
  std::size_t dropped = 0;
};

// gold <= neg_hi -> -1, gold >= pos_lo -> +1, anything between is dropped.
inline std::vector<TaggedSentence> binarize_dataset(
    std::span<const TaggedSentence> data, double neg_hi = -0.5,
    double pos_lo = 0.5, BinarizeCounts* counts = nullptr) {
  if (!(neg_hi < pos_lo)) {
    throw UsageError("negative threshold " + format_fixed(neg_hi, 3) +
                     " must be below positive threshold " +
                     format_fixed(pos_lo, 3));
  }
  BinarizeCounts c;
  std::vector<TaggedSentence> out;
  for (const auto& s : data) {
    if (!s.gold) throw DataError("sentence " + s.id + " has no gold score");
    const double g = *s.gold;
    if (g < -1.0 || g > 1.0) {
      throw DataError("sentence " + s.id + ": gold outside [-1,1]");
    }
    if (g <= neg_hi) {
      out.push_back(s);
      out.back().gold = -1.0;
      ++c.negative;
    } else if (g >= pos_lo) {
      out.push_back(s);
      out.back().gold = 1.0;
      ++c.positive;
    } else {
      ++c.dropped;
    }
  }
  if (counts) *counts = c;
  return out;
}

}  // namespace sentilex
