#pragma once

// In-memory SentiWordNet store: parses the SWN 3.0 distribution format and
// serves, for each lemma#PoS, the positive/negative scores of its senses in
// sense-number order (sense 1 = most frequent sense).

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sentilex/common.hpp"

namespace sentilex {

enum class PoS : char { adjective = 'a', noun = 'n', verb = 'v', adverb = 'r' };

inline constexpr std::array<PoS, 4> kAllPoS = {PoS::adjective, PoS::noun,
                                               PoS::verb, PoS::adverb};

inline std::optional<PoS> parse_pos(std::string_view s) {
  if (s.size() != 1) return std::nullopt;
  switch (s[0]) {
    case 'a':
    case 's':  // WordNet satellite adjectives
      return PoS::adjective;
    case 'n':
      return PoS::noun;
    case 'v':
      return PoS::verb;
    case 'r':
      return PoS::adverb;
    default:
      return std::nullopt;
  }
}

inline char pos_char(PoS p) { return static_cast<char>(p); }

inline std::string make_key(std::string_view lemma, PoS pos) {
  std::string key(lemma);
  key += '#';
  key += pos_char(pos);
  return key;
}

struct LemmaPos {
  std::string lemma;
  PoS pos;
};

// Splits "lemma#p". Returns nullopt for anything else.
inline std::optional<LemmaPos> split_key(std::string_view key) {
  const auto hash = key.rfind('#');
  if (hash == std::string_view::npos || hash == 0) return std::nullopt;
  auto pos = parse_pos(key.substr(hash + 1));
  if (!pos) return std::nullopt;
  return LemmaPos{std::string(key.substr(0, hash)), *pos};
}

struct SenseTerm {
  std::string lemma;
  int sense_number = 0;
};

struct SynsetEntry {
  PoS pos = PoS::noun;
  std::string offset;
  double pos_score = 0.0;
  double neg_score = 0.0;
  std::vector<SenseTerm> terms;
};

struct SenseProfile {
  std::string key;
  std::vector<double> pos_scores;
  std::vector<double> neg_scores;

  std::size_t size() const { return pos_scores.size(); }
  bool all_zero() const {
    auto nz = [](double v) { return v != 0.0; };
    return std::none_of(pos_scores.begin(), pos_scores.end(), nz) &&
           std::none_of(neg_scores.begin(), neg_scores.end(), nz);
  }
};

struct ParseDiagnostics {
  std::size_t lines_read = 0;
  std::size_t entries = 0;
  std::size_t skipped = 0;
  std::size_t sum_warnings = 0;
  std::vector<std::string> messages;

  void note(std::size_t line_no, std::string msg) {
    messages.push_back("line " + std::to_string(line_no) + ": " + std::move(msg));
  }
};

namespace detail {

inline bool parse_term(std::string_view tok, SenseTerm& out) {
  const auto hash = tok.rfind('#');
  if (hash == std::string_view::npos || hash == 0 || hash + 1 == tok.size()) {
    return false;
  }
  int sense = 0;
  for (char c : tok.substr(hash + 1)) {
    if (c < '0' || c > '9') return false;
    sense = sense * 10 + (c - '0');
    if (sense > 100000) return false;
  }
  if (sense < 1) return false;
  out.lemma = to_lower(tok.substr(0, hash));
  out.sense_number = sense;
  return true;
}

}  // namespace detail

// Parses one SWN data line. Returns nullopt (and records why) for comments,
// blank lines and malformed lines. Scores outside [0,1] throw.
inline std::optional<SynsetEntry> parse_swn_line(std::string_view line,
                                                 std::size_t line_no,
                                                 ParseDiagnostics& diag) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (line.empty() || line.front() == '#') return std::nullopt;
  if (trim(line).empty()) return std::nullopt;

  const auto fields = split(line, '\t');
  if (fields.size() < 6) {
    ++diag.skipped;
    diag.note(line_no, "expected at least 6 tab-separated fields, got " +
                           std::to_string(fields.size()));
    return std::nullopt;
  }
  SynsetEntry e;
  auto pos = parse_pos(fields[0]);
  if (!pos) {
    ++diag.skipped;
    diag.note(line_no, "unknown part of speech '" + fields[0] + "'");
    return std::nullopt;
  }
  e.pos = *pos;
  e.offset = fields[1];
  if (!parse_double(fields[2], e.pos_score) ||
      !parse_double(fields[3], e.neg_score)) {
    ++diag.skipped;
    diag.note(line_no, "non-numeric score");
    return std::nullopt;
  }
  if (e.pos_score < 0.0 || e.pos_score > 1.0 || e.neg_score < 0.0 ||
      e.neg_score > 1.0) {
    throw DataError("line " + std::to_string(line_no) +
                    ": score outside [0,1] for synset " + e.offset);
  }
  std::istringstream terms(fields[4]);
  std::string tok;
  while (terms >> tok) {
    SenseTerm t;
    if (!detail::parse_term(tok, t)) {
      e.terms.clear();
      break;
    }
    e.terms.push_back(std::move(t));
  }
  if (e.terms.empty()) {
    ++diag.skipped;
    diag.note(line_no, "missing or malformed synset terms");
    return std::nullopt;
  }
  if (e.pos_score + e.neg_score > 1.0 + 1e-9) {
    ++diag.sum_warnings;
    diag.note(line_no, "PosScore + NegScore > 1 for synset " + e.offset +
                           " (kept)");
  }
  return e;
}

class SwnStore {
 public:
  struct SenseScores {
    double pos = 0.0;
    double neg = 0.0;
  };

  SwnStore() = default;

  // Adds every (lemma, sense) of a synset. Repeated (lemma, pos, sense)
  // triples are inconsistent and throw.
  void add(const SynsetEntry& e) {
    for (const auto& t : e.terms) {
      add_sense(t.lemma, e.pos, t.sense_number, e.pos_score, e.neg_score);
    }
  }

  void add_sense(const std::string& lemma, PoS pos, int sense, double pos_score,
                 double neg_score) {
    auto& senses = senses_[make_key(lemma, pos)];
    if (senses.empty()) {
      auto& tags = lemma_pos_[lemma];
      if (std::find(tags.begin(), tags.end(), pos) == tags.end()) {
        tags.push_back(pos);
        std::sort(tags.begin(), tags.end(), [](PoS a, PoS b) {
          return pos_char(a) < pos_char(b);
        });
      }
    }
    if (!senses.emplace(sense, SenseScores{pos_score, neg_score}).second) {
      throw DataError("duplicate sense " + make_key(lemma, pos) + "#" +
                      std::to_string(sense));
    }
  }

  static SwnStore parse(std::istream& in, ParseDiagnostics* diag = nullptr) {
    ParseDiagnostics local;
    ParseDiagnostics& d = diag ? *diag : local;
    SwnStore store;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      ++d.lines_read;
      if (auto e = parse_swn_line(line, line_no, d)) {
        store.add(*e);
        ++d.entries;
      }
    }
    return store;
  }

  static SwnStore load(const std::string& path,
                       ParseDiagnostics* diag = nullptr) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read SentiWordNet file: " + path);
    return parse(in, diag);
  }

  // Canonical dump: lemma#pos<TAB>sense<TAB>pos<TAB>neg, sorted by key then
  // sense, 6 decimals.
  void write_canonical(std::ostream& out) const {
    for (const auto& [key, senses] : senses_) {
      for (const auto& [sense, s] : senses) {
        out << key << '\t' << sense << '\t' << format_fixed(s.pos) << '\t'
            << format_fixed(s.neg) << '\n';
      }
    }
  }

  static SwnStore parse_canonical(std::istream& in) {
    SwnStore store;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto f = split(line, '\t');
      double p = 0, n = 0, sense = 0;
      auto lp = f.size() == 4 ? split_key(f[0]) : std::nullopt;
      if (!lp || !parse_double(f[1], sense) || !parse_double(f[2], p) ||
          !parse_double(f[3], n) || sense < 1) {
        throw DataError("malformed canonical store line " +
                        std::to_string(line_no));
      }
      store.add_sense(lp->lemma, lp->pos, static_cast<int>(sense), p, n);
    }
    return store;
  }

  // Scores of every sense of lemma#pos, ordered by sense number. A gap in
  // the sense numbering throws: frequency-weighted formulae depend on rank.
  std::optional<SenseProfile> sense_profile(const std::string& lemma,
                                            PoS pos) const {
    return sense_profile(make_key(lemma, pos));
  }

  std::optional<SenseProfile> sense_profile(const std::string& key) const {
    const auto it = senses_.find(key);
    if (it == senses_.end()) return std::nullopt;
    SenseProfile p;
    p.key = key;
    p.pos_scores.reserve(it->second.size());
    p.neg_scores.reserve(it->second.size());
    int expected = 1;
    for (const auto& [sense, s] : it->second) {
      if (sense != expected) {
        throw DataError("sense numbering gap for " + key + ": expected sense " +
                        std::to_string(expected) + ", found " +
                        std::to_string(sense));
      }
      ++expected;
      p.pos_scores.push_back(s.pos);
      p.neg_scores.push_back(s.neg);
    }
    return p;
  }

  bool contains(const std::string& key) const { return senses_.count(key) > 0; }

  bool has_lemma(const std::string& lemma) const {
    return lemma_pos_.count(lemma) > 0;
  }

  // PoS tags under which the lemma occurs, in a/n/r/v order.
  std::vector<PoS> pos_for_lemma(const std::string& lemma) const {
    const auto it = lemma_pos_.find(lemma);
    return it == lemma_pos_.end() ? std::vector<PoS>{} : it->second;
  }

  bool is_all_zero(const std::string& key) const {
    const auto it = senses_.find(key);
    if (it == senses_.end()) throw DataError("key not in store: " + key);
    return std::all_of(it->second.begin(), it->second.end(), [](const auto& kv) {
      return kv.second.pos == 0.0 && kv.second.neg == 0.0;
    });
  }

  // Sorted lexicographically. With only_nonzero, keys with at least one
  // non-zero positive or negative score.
  std::vector<std::string> lemma_pos_keys(bool only_nonzero = false) const {
    std::vector<std::string> keys;
    keys.reserve(senses_.size());
    for (const auto& [key, senses] : senses_) {
      if (only_nonzero && is_all_zero(key)) continue;
      keys.push_back(key);
    }
    return keys;
  }

  std::size_t key_count() const { return senses_.size(); }

  bool operator==(const SwnStore& other) const {
    if (senses_.size() != other.senses_.size()) return false;
    auto a = senses_.begin();
    auto b = other.senses_.begin();
    for (; a != senses_.end(); ++a, ++b) {
      if (a->first != b->first || a->second.size() != b->second.size()) {
        return false;
      }
      auto sa = a->second.begin();
      auto sb = b->second.begin();
      for (; sa != a->second.end(); ++sa, ++sb) {
        if (sa->first != sb->first || sa->second.pos != sb->second.pos ||
            sa->second.neg != sb->second.neg) {
          return false;
        }
      }
    }
    return true;
  }

 private:
  std::map<std::string, std::map<int, SenseScores>> senses_;
  std::unordered_map<std::string, std::vector<PoS>> lemma_pos_;
};

}  // namespace sentilex
