#pragma once

// Human-annotated gold lexica: loaders for ANEW/Warriner-style valence
// norms, General Inquirer labels and a generic TSV format, plus alignment of
// the raw words onto SentiWordNet lemma#PoS keys.

#include <algorithm>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sentilex/common.hpp"
#include "sentilex/swn_store.hpp"

namespace sentilex {

enum class GoldFormat { anew, gi, warr, generic_tsv };
enum class GoldKind { continuous, binary };

inline GoldFormat parse_gold_format(std::string_view s) {
  if (s == "anew") return GoldFormat::anew;
  if (s == "gi") return GoldFormat::gi;
  if (s == "warr") return GoldFormat::warr;
  if (s == "generic_tsv" || s == "tsv") return GoldFormat::generic_tsv;
  throw UsageError("unknown gold lexicon format: " + std::string(s));
}

inline GoldKind default_kind(GoldFormat f) {
  return f == GoldFormat::gi ? GoldKind::binary : GoldKind::continuous;
}

struct RawGoldRecord {
  std::string word;
  double score = 0.0;
  std::optional<std::string> pos_tag;  // a/n/v/r or "modif"
  bool sense_disambiguated = false;
};

struct GoldLexicon {
  GoldKind kind = GoldKind::continuous;
  std::map<std::string, double> entries;
  std::string provenance;

  std::size_t size() const { return entries.size(); }
};

// Maps the 1-9 valence scale onto [-1,1] around the midpoint 5.
inline double rescale_valence(double v) { return (v - 5.0) / 4.0; }

namespace detail {

inline std::vector<std::string> split_csv(std::string_view line) {
  auto fields = split(line, line.find('\t') != std::string_view::npos &&
                                    line.find(',') == std::string_view::npos
                                ? '\t'
                                : ',');
  for (auto& f : fields) f = std::string(trim(f));
  return fields;
}

inline std::optional<std::size_t> find_column(
    const std::vector<std::string>& header,
    std::initializer_list<std::string_view> names) {
  for (std::string_view want : names) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (to_lower(header[i]) == want) return i;
    }
  }
  return std::nullopt;
}

// GI entries carry sense suffixes like "ABOUT#1".
inline bool has_sense_suffix(std::string_view w) {
  const auto hash = w.rfind('#');
  return hash != std::string_view::npos && hash + 1 < w.size() &&
         std::all_of(w.begin() + hash + 1, w.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

inline std::optional<std::string> normalize_tag(std::string_view raw) {
  const std::string t = to_lower(trim(raw));
  if (t.empty()) return std::nullopt;
  if (t == "a" || t == "adj" || t == "adjective" || t == "j") return "a";
  if (t == "n" || t == "noun") return "n";
  if (t == "v" || t == "verb" || t == "supv") return "v";
  if (t == "r" || t == "adv" || t == "adverb") return "r";
  if (t == "modif") return "modif";
  return std::nullopt;
}

inline void load_valence_csv(std::istream& in, std::vector<RawGoldRecord>& out) {
  std::string line;
  std::optional<std::size_t> word_col;
  std::optional<std::size_t> val_col;
  bool first = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line.front() == '#') continue;
    const auto f = split_csv(line);
    if (first) {
      first = false;
      double probe = 0;
      if (f.size() >= 2 && !parse_double(f[1], probe)) {
        word_col = find_column(f, {"word", "description", "words"});
        val_col = find_column(f, {"valence mean", "valence_mean", "v.mean.sum",
                                  "valmn", "valence"});
        if (!word_col || !val_col) {
          throw DataError(
              "valence file header lacks a word or valence-mean column");
        }
        continue;
      }
      word_col = 0;
      val_col = 1;
    }
    const std::size_t need = std::max(*word_col, *val_col) + 1;
    double v = 0;
    if (f.size() < need || !parse_double(f[*val_col], v)) {
      throw DataError("valence file line " + std::to_string(line_no) +
                      ": missing word or valence column");
    }
    RawGoldRecord r;
    r.word = to_lower(f[*word_col]);
    r.score = rescale_valence(v);
    out.push_back(std::move(r));
  }
}

// Either the full Inquirer spreadsheet (Entry, Positiv, Negativ, Othtags
// columns) or headerless "word,tag,label" rows.
inline void load_gi(std::istream& in, std::vector<RawGoldRecord>& out) {
  std::string line;
  bool first = true;
  std::optional<std::size_t> entry_col, pos_col, neg_col, tags_col;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line.front() == '#') continue;
    const auto f = split_csv(line);
    if (first) {
      first = false;
      entry_col = find_column(f, {"entry"});
      if (entry_col) {
        pos_col = find_column(f, {"positiv"});
        neg_col = find_column(f, {"negativ"});
        tags_col = find_column(f, {"othtags"});
        if (!pos_col || !neg_col) {
          throw DataError("GI header lacks Positiv/Negativ columns");
        }
        continue;
      }
    }
    RawGoldRecord r;
    int label = 0;
    std::string word;
    std::optional<std::string> tag;
    if (entry_col) {
      const std::size_t need =
          std::max({*entry_col, *pos_col, *neg_col}) + 1;
      if (f.size() < need) {
        throw DataError("GI line " + std::to_string(line_no) +
                        ": missing columns");
      }
      const bool p = !f[*pos_col].empty();
      const bool n = !f[*neg_col].empty();
      if (p == n) continue;  // neither or both: not an affective entry
      label = p ? +1 : -1;
      word = f[*entry_col];
      if (tags_col && *tags_col < f.size()) {
        for (const auto& t : split(f[*tags_col], ' ')) {
          if (auto nt = normalize_tag(t)) {
            tag = nt;
            break;
          }
        }
      }
    } else {
      if (f.size() < 3) {
        throw DataError("GI line " + std::to_string(line_no) +
                        ": expected word,tag,label");
      }
      const std::string lab = to_lower(f[2]);
      if (lab == "positiv" || lab == "positive" || lab == "+1" || lab == "1") {
        label = +1;
      } else if (lab == "negativ" || lab == "negative" || lab == "-1") {
        label = -1;
      } else {
        continue;
      }
      word = f[0];
      tag = normalize_tag(f[1]);
    }
    r.sense_disambiguated = has_sense_suffix(word);
    r.word = to_lower(word);
    r.score = label;
    r.pos_tag = tag;
    out.push_back(std::move(r));
  }
}

inline void load_generic_tsv(std::istream& in, std::vector<RawGoldRecord>& out) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto f = split(line, '\t');
    double v = 0;
    if (f.size() < 2 || !parse_double(f[1], v)) {
      throw DataError("gold TSV line " + std::to_string(line_no) +
                      ": expected word<TAB>score");
    }
    RawGoldRecord r;
    std::string word = to_lower(trim(f[0]));
    // word#pos#sense is sense-disambiguated; word#pos carries a tag.
    const auto parts = split(word, '#');
    if (parts.size() >= 3) {
      r.sense_disambiguated = true;
    } else if (parts.size() == 2 && parse_pos(parts[1])) {
      word = parts[0];
      r.pos_tag = parts[1];
    }
    r.word = word;
    r.score = v;
    out.push_back(std::move(r));
  }
}

}  // namespace detail

inline std::vector<RawGoldRecord> load_gold(std::istream& in, GoldFormat format) {
  std::vector<RawGoldRecord> out;
  switch (format) {
    case GoldFormat::anew:
    case GoldFormat::warr:
      detail::load_valence_csv(in, out);
      break;
    case GoldFormat::gi:
      detail::load_gi(in, out);
      break;
    case GoldFormat::generic_tsv:
      detail::load_generic_tsv(in, out);
      break;
  }
  return out;
}

inline std::vector<RawGoldRecord> load_gold(const std::string& path,
                                            GoldFormat format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read gold lexicon: " + path);
  return load_gold(in, format);
}

// Proposes base forms for an inflected word, most plausible first.
using Lemmatizer = std::function<std::vector<std::string>(const std::string&)>;

// Lowercasing plus English inflection stripping: plural -s/-es/-ies/-ves,
// past -ed/-ied, progressive -ing, with consonant undoubling and e-restoring.
struct EnglishSuffixLemmatizer {
  std::vector<std::string> operator()(const std::string& word) const {
    const std::string w = to_lower(word);
    std::vector<std::string> c;
    auto ends = [&](std::string_view suf) {
      return w.size() > suf.size() + 1 &&
             std::string_view(w).substr(w.size() - suf.size()) == suf;
    };
    auto stem = [&](std::size_t n) { return w.substr(0, w.size() - n); };
    auto undouble = [](const std::string& s) -> std::optional<std::string> {
      const std::size_t n = s.size();
      if (n >= 3 && s[n - 1] == s[n - 2] &&
          std::string_view("aeiouyslz").find(s[n - 1]) == std::string_view::npos) {
        return s.substr(0, n - 1);
      }
      return std::nullopt;
    };
    if (ends("ies") || ends("ied")) c.push_back(stem(3) + "y");
    if (ends("ves")) {
      c.push_back(stem(3) + "f");
      c.push_back(stem(3) + "fe");
    }
    if (ends("es")) c.push_back(stem(2));
    if (ends("s") && !ends("ss")) c.push_back(stem(1));
    if (ends("ed")) {
      const std::string s = stem(2);
      if (auto u = undouble(s)) c.push_back(*u);
      c.push_back(s);
      c.push_back(stem(1));  // "-e" + "d"
    }
    if (ends("ing")) {
      const std::string s = stem(3);
      if (auto u = undouble(s)) c.push_back(*u);
      c.push_back(s);
      c.push_back(s + "e");
    }
    std::vector<std::string> unique;
    for (auto& s : c) {
      if (!s.empty() && s != w &&
          std::find(unique.begin(), unique.end(), s) == unique.end()) {
        unique.push_back(std::move(s));
      }
    }
    return unique;
  }
};

struct AlignReport {
  std::size_t input = 0;
  std::size_t aligned_direct = 0;
  std::size_t aligned_lemmatized = 0;
  std::size_t dropped = 0;
  std::size_t sense_discarded = 0;
  std::size_t expansions = 0;      // lemma#PoS entries produced before merging
  std::size_t duplicates = 0;      // keys produced more than once
  std::size_t label_conflicts = 0; // binary duplicates with opposite labels
  std::vector<std::string> warnings;
};

// Aligns raw words onto SWN lemma#PoS keys. A word is kept as-is when it is
// an SWN lemma, otherwise its lemmatizer candidates are tried in order, and
// it is dropped when nothing matches. An untagged word expands to every PoS
// of the lemma in SWN; "modif" expands to adjective and adverb.
inline GoldLexicon align_to_swn(const std::vector<RawGoldRecord>& records,
                                const SwnStore& store, GoldKind kind,
                                const Lemmatizer& lemmatizer = EnglishSuffixLemmatizer{},
                                std::string provenance = {},
                                AlignReport* report = nullptr) {
  AlignReport local;
  AlignReport& rep = report ? *report : local;
  std::map<std::string, std::vector<double>> collected;

  for (const auto& r : records) {
    ++rep.input;
    if (r.sense_disambiguated) {
      ++rep.sense_discarded;
      continue;
    }
    std::string word = r.word;
    std::replace(word.begin(), word.end(), ' ', '_');
    std::optional<std::string> lemma;
    bool lemmatized = false;
    if (store.has_lemma(word)) {
      lemma = word;
    } else if (lemmatizer) {
      for (const auto& cand : lemmatizer(word)) {
        if (store.has_lemma(cand)) {
          lemma = cand;
          lemmatized = true;
          break;
        }
      }
    }
    if (!lemma) {
      ++rep.dropped;
      continue;
    }
    std::vector<PoS> wanted;
    const auto available = store.pos_for_lemma(*lemma);
    if (!r.pos_tag) {
      wanted = available;
    } else {
      std::vector<PoS> tags;
      if (*r.pos_tag == "modif") {
        tags = {PoS::adjective, PoS::adverb};
      } else if (auto p = parse_pos(*r.pos_tag)) {
        tags = {*p};
      }
      for (PoS p : tags) {
        if (std::find(available.begin(), available.end(), p) != available.end()) {
          wanted.push_back(p);
        }
      }
    }
    if (wanted.empty()) {
      ++rep.dropped;
      continue;
    }
    ++(lemmatized ? rep.aligned_lemmatized : rep.aligned_direct);
    for (PoS p : wanted) {
      collected[make_key(*lemma, p)].push_back(r.score);
      ++rep.expansions;
    }
  }

  GoldLexicon gold;
  gold.kind = kind;
  gold.provenance = std::move(provenance);
  for (auto& [key, scores] : collected) {
    if (scores.size() > 1) {
      ++rep.duplicates;
      rep.warnings.push_back("duplicate key " + key + " (" +
                             std::to_string(scores.size()) + " sources)");
    }
    double sum = 0.0;
    for (double s : scores) sum += s;
    const double mean = sum / static_cast<double>(scores.size());
    if (kind == GoldKind::binary) {
      const bool agree = std::all_of(scores.begin(), scores.end(),
                                     [&](double s) { return s == scores[0]; });
      if (!agree) {
        ++rep.label_conflicts;
        rep.warnings.push_back("conflicting labels for " + key + " (dropped)");
        continue;
      }
      gold.entries.emplace(key, scores[0] > 0 ? 1.0 : -1.0);
    } else {
      gold.entries.emplace(key, std::clamp(mean, -1.0, 1.0));
    }
  }
  return gold;
}

// Aligned lexicon back to raw records; re-aligning them is the identity.
inline std::vector<RawGoldRecord> to_records(const GoldLexicon& gold) {
  std::vector<RawGoldRecord> out;
  out.reserve(gold.size());
  for (const auto& [key, score] : gold.entries) {
    auto lp = split_key(key);
    if (!lp) throw DataError("malformed gold key: " + key);
    RawGoldRecord r;
    r.word = lp->lemma;
    r.pos_tag = std::string(1, pos_char(lp->pos));
    r.score = score;
    out.push_back(std::move(r));
  }
  return out;
}

// Removes entries whose senses are all scored (0, 0).
inline GoldLexicon filter_all_zero(const GoldLexicon& gold, const SwnStore& store,
                                   std::size_t* removed = nullptr) {
  GoldLexicon out;
  out.kind = gold.kind;
  out.provenance = gold.provenance;
  std::size_t n = 0;
  for (const auto& [key, score] : gold.entries) {
    if (!store.contains(key)) {
      throw DataError("gold key missing from SentiWordNet store: " + key);
    }
    if (store.is_all_zero(key)) {
      ++n;
      continue;
    }
    out.entries.emplace(key, score);
  }
  if (removed) *removed = n;
  return out;
}

inline void write_align_report(std::ostream& out, const AlignReport& rep,
                               std::size_t filtered_all_zero,
                               std::size_t final_size) {
  out << "input\t" << rep.input << '\n'
      << "aligned_direct\t" << rep.aligned_direct << '\n'
      << "aligned_lemmatized\t" << rep.aligned_lemmatized << '\n'
      << "dropped\t" << rep.dropped << '\n'
      << "sense_discarded\t" << rep.sense_discarded << '\n'
      << "expansions\t" << rep.expansions << '\n'
      << "duplicates\t" << rep.duplicates << '\n'
      << "label_conflicts\t" << rep.label_conflicts << '\n'
      << "filtered_all_zero\t" << filtered_all_zero << '\n'
      << "final\t" << final_size << '\n';
}

}  // namespace sentilex
