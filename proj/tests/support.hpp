#pragma once

// Test-only helpers: a brute-force reimplementation of the formulae used as
// an oracle, and generators for synthetic SentiWordNet stores and datasets.

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sentilex/common.hpp"
#include "sentilex/formulae.hpp"
#include "sentilex/swn_store.hpp"

namespace oracle {

// Straightforward versions: explicit weight vectors, explicit sorts, no
// shared code with the library.
inline double weighted(const std::vector<double>& s, bool geometric) {
  if (s.empty()) return 0.0;
  std::vector<double> w(s.size());
  double total = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    w[i] = geometric ? std::pow(2.0, -static_cast<double>(i + 1)) : 1.0 / static_cast<double>(i + 1);
    total += w[i];
  }
  double acc = 0;
  for (std::size_t i = 0; i < s.size(); ++i) acc += s[i] * (w[i] / total);
  return acc;
}

inline std::vector<double> desc(std::vector<double> v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    for (std::size_t j = i; j > 0 && v[j] > v[j - 1]; --j) std::swap(v[j], v[j - 1]);
  }
  return v;
}

inline double median(std::vector<double> v) {
  v = desc(v);
  const std::size_t n = v.size();
  if (n % 2) return v[n / 2];
  return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double maximum(const std::vector<double>& v) {
  double m = v[0];
  for (double x : v) m = x > m ? x : m;
  return m;
}

struct Out {
  double pos;
  double neg;
  int sign;  // 0 = none
};

inline Out formula(const std::string& name, std::vector<double> pos, std::vector<double> neg) {
  const bool n_variant = name.size() > 2 && name.back() == 'n' && name[0] == 'w';
  const bool s_variant = name.find('s') != std::string::npos && name[0] == 'w';
  if (n_variant) {
    std::vector<double> p2, n2;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      if (!(pos[i] == 0 && neg[i] == 0)) {
        p2.push_back(pos[i]);
        n2.push_back(neg[i]);
      }
    }
    pos = p2;
    neg = n2;
  }
  if (s_variant) {
    pos = desc(pos);
    neg = desc(neg);
  }
  if (name[0] == 'w') {
    const bool geo = name[1] == '1';
    return {weighted(pos, geo), weighted(neg, geo), 0};
  }
  if (name == "fs") return {pos[0], neg[0], 0};
  if (name == "mean") return {mean(pos), mean(neg), 0};
  if (name == "median") return {median(pos), median(neg), 0};
  if (name == "max") return {maximum(pos), maximum(neg), 0};
  // uni / uniw
  std::vector<double> sp, sn;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (pos[i] > 0 && pos[i] >= neg[i]) sp.push_back(pos[i]);
    if (neg[i] > 0 && neg[i] > pos[i]) sn.push_back(neg[i]);
  }
  Out o{mean(sp), mean(sn), 0};
  if (name == "uni" && std::fabs(o.pos - o.neg) <= 1e-12 && sp.size() != sn.size()) {
    o.sign = sp.size() > sn.size() ? 1 : -1;
  }
  return o;
}

inline double map_m(const Out& o) {
  if (o.sign) return o.sign * (o.pos > o.neg ? o.pos : o.neg);
  return o.pos >= o.neg - 1e-12 ? o.pos : -o.neg;
}

inline double map_d(const Out& o) {
  if (o.sign) return o.sign * (o.pos > o.neg ? o.pos : o.neg);
  return o.pos - o.neg;
}

}  // namespace oracle

namespace testdata {

inline sentilex::SenseProfile cold_a() {
  return {"cold#a", {0, 0, 0, 0.125, 0.625}, {0.75, 0.75, 0, 0.375, 0}};
}

// Scores on the grid {0, 1/8, ..., 1}; with `valid`, pos + neg <= 1.
inline sentilex::SenseProfile random_profile(sentilex::Rng& rng, std::size_t max_len = 8,
                                             bool valid = false, double zero_rate = 0.25) {
  sentilex::SenseProfile p;
  p.key = "w#n";
  const std::size_t n = 1 + rng.index(max_len);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform() < zero_rate) {
      p.pos_scores.push_back(0);
      p.neg_scores.push_back(0);
      continue;
    }
    const double a = static_cast<double>(rng.index(9)) / 8.0;
    double b = static_cast<double>(rng.index(9)) / 8.0;
    if (valid && a + b > 1.0) b = 1.0 - a;
    p.pos_scores.push_back(a);
    p.neg_scores.push_back(b);
  }
  return p;
}

// SentiWordNet-format text: one synset per (lemma, sense).
struct SwnBuilder {
  std::ostringstream text;
  int offset = 1;

  SwnBuilder() { text << "# POS\tID\tPosScore\tNegScore\tSynsetTerms\tGloss\n"; }

  void add_profile(const std::string& lemma, char pos, const std::vector<double>& p,
                   const std::vector<double>& n) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      char id[16];
      std::snprintf(id, sizeof id, "%08d", offset++);
      text << pos << '\t' << id << '\t' << sentilex::format_exact(p[i]) << '\t'
           << sentilex::format_exact(n[i]) << '\t' << lemma << '#' << (i + 1)
           << "\tgloss " << offset << '\n';
    }
  }

  std::string str() const { return text.str(); }
};

inline sentilex::SwnStore parse_store(const std::string& text) {
  std::istringstream in(text);
  return sentilex::SwnStore::parse(in);
}

// A synthetic store with `n` lemmas (noun keys "lemNNNN#n", some also as
// adjectives), random valid profiles, roughly `zero_share` of them all-zero.
inline std::string random_swn_text(std::size_t n, std::uint64_t seed, double zero_share = 0.2) {
  sentilex::Rng rng(seed);
  SwnBuilder b;
  for (std::size_t i = 0; i < n; ++i) {
    char lemma[32];
    std::snprintf(lemma, sizeof lemma, "lem%05zu", i);
    auto prof = random_profile(rng, 6, true, 0.2);
    if (rng.uniform() < zero_share) {
      std::fill(prof.pos_scores.begin(), prof.pos_scores.end(), 0.0);
      std::fill(prof.neg_scores.begin(), prof.neg_scores.end(), 0.0);
    }
    b.add_profile(lemma, 'n', prof.pos_scores, prof.neg_scores);
    if (i % 5 == 0) {
      auto adj = random_profile(rng, 4, true, 0.2);
      b.add_profile(lemma, 'a', adj.pos_scores, adj.neg_scores);
    }
  }
  return b.str();
}

struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("sentilex_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }

  std::string write(const std::string& name, const std::string& text) const {
    const auto p = path / name;
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
  }

  std::string file(const std::string& name) const { return (path / name).string(); }
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace testdata
