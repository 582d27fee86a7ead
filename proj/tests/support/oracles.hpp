#pragma once

// Slow reference implementations used to cross-check the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "api2com/javaparse/ast.hpp"
#include "api2com/javaparse/lexer.hpp"

namespace oracle {

using Sentence = std::vector<std::string>;

inline std::unordered_map<std::string, int> ngram_bag(const Sentence& s, std::size_t n) {
  std::unordered_map<std::string, int> bag;
  for (std::size_t i = 0; i + n <= s.size(); ++i) {
    std::string key;
    for (std::size_t k = 0; k < n; ++k) key += s[i + k] + '\x1f';
    ++bag[key];
  }
  return bag;
}

inline std::pair<long, long> clipped_counts(const Sentence& ref, const Sentence& hyp, std::size_t n) {
  auto h = ngram_bag(hyp, n);
  auto r = ngram_bag(ref, n);
  long m = 0, t = 0;
  for (auto& [k, c] : h) {
    t += c;
    m += std::min(c, r.count(k) ? r[k] : 0);
  }
  return {m, t};
}

/// Corpus BLEU-N in percent.
inline double bleu(const std::vector<std::pair<Sentence, Sentence>>& pairs, std::size_t max_n) {
  long rl = 0, hl = 0;
  double product = 1;
  for (std::size_t n = 1; n <= max_n; ++n) {
    long m = 0, t = 0;
    for (auto& [ref, hyp] : pairs) {
      auto [mm, tt] = clipped_counts(ref, hyp, n);
      m += mm;
      t += tt;
    }
    product *= t == 0 ? 0.0 : double(m) / double(t);
  }
  for (auto& [ref, hyp] : pairs) {
    rl += long(ref.size());
    hl += long(hyp.size());
  }
  if (hl == 0 || product == 0) return 0;
  double bp = hl >= rl ? 1.0 : std::exp(1.0 - double(rl) / double(hl));
  return 100 * bp * std::pow(product, 1.0 / double(max_n));
}

inline double smoothed_bleu(const Sentence& ref, const Sentence& hyp) {
  if (hyp.empty()) return 0;
  double product = 1;
  for (std::size_t n = 1; n <= 4; ++n) {
    auto [m, t] = clipped_counts(ref, hyp, n);
    if (n == 1) {
      if (m == 0) return 0;
      product *= double(m) / double(t);
    } else {
      product *= double(m + 1) / double(t + 1);
    }
  }
  double bp = hyp.size() >= ref.size() ? 1.0 : std::exp(1.0 - double(ref.size()) / double(hyp.size()));
  return 100 * bp * std::pow(product, 0.25);
}

/// Top-down memoized LCS.
inline std::size_t lcs(const Sentence& a, const Sentence& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size() || j == b.size()) return 0;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t r = a[i] == b[j] ? 1 + go(i + 1, j + 1) : std::max(go(i + 1, j), go(i, j + 1));
    memo[key] = r;
    return r;
  };
  return go(0, 0);
}

inline double rouge_l(const Sentence& ref, const Sentence& hyp, double beta = 1.0) {
  if (hyp.empty()) return 0;
  double l = double(lcs(ref, hyp));
  if (l == 0) return 0;
  double r = l / double(ref.size()), p = l / double(hyp.size());
  return 100 * (1 + beta * beta) * r * p / (r + beta * beta * p);
}

/// Branch-and-bound enumeration of all maximum-cardinality alignments,
/// returning (matches, fewest chunks).
inline std::pair<std::size_t, std::size_t> meteor_align(const Sentence& ref, const Sentence& hyp) {
  std::map<std::string, int> rc, hc;
  for (auto& w : ref) ++rc[w];
  for (auto& w : hyp) ++hc[w];
  std::size_t target = 0;
  for (auto& [w, c] : hc) target += std::size_t(std::min(c, rc.count(w) ? rc[w] : 0));
  if (target == 0) return {0, 0};

  // Number of matchable hypothesis tokens at or after i.
  std::vector<std::size_t> matchable_after(hyp.size() + 1, 0);
  for (std::size_t i = hyp.size(); i-- > 0;) matchable_after[i] = matchable_after[i + 1] + (rc.count(hyp[i]) ? 1 : 0);

  std::vector<bool> used(ref.size(), false);
  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::function<void(std::size_t, std::size_t, long, std::size_t)> dfs = [&](std::size_t i, std::size_t matched,
                                                                             long prev, std::size_t chunks) {
    if (chunks >= best) return;
    if (matched + matchable_after[i] < target) return;
    if (i == hyp.size()) {
      if (matched == target) best = chunks;
      return;
    }
    for (std::size_t j = 0; j < ref.size(); ++j) {
      if (used[j] || ref[j] != hyp[i]) continue;
      used[j] = true;
      bool extends = prev >= 0 && long(j) == prev + 1;
      dfs(i + 1, matched + 1, long(j), chunks + (extends ? 0 : 1));
      used[j] = false;
    }
    dfs(i + 1, matched, -1, chunks);
  };
  dfs(0, 0, -1, 0);
  return {target, best};
}

inline double meteor(const Sentence& ref, const Sentence& hyp) {
  auto [m, ch] = meteor_align(ref, hyp);
  if (m == 0) return 0;
  double p = double(m) / double(hyp.size()), r = double(m) / double(ref.size());
  double f = p * r / (0.9 * p + 0.1 * r);
  double pen = 0.5 * std::pow(double(ch) / double(m), 3.0);
  return 100 * f * (1 - pen);
}

/// Call sites read straight off the significant token stream: an identifier
/// followed by "(" that is not a declaration, annotation or constructor.
inline std::vector<std::pair<std::string, std::size_t>> call_sites(std::string_view source) {
  using api2com::javaparse::TokenClass;
  const auto t = api2com::javaparse::lex_significant(source);
  std::vector<std::pair<std::string, std::size_t>> out;
  int braces = 0;
  bool decl_seen = false;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (t[i].is_sep("{")) ++braces;
    if (t[i].is_sep("}")) --braces;
    if (t[i].cls != TokenClass::Identifier || !t[i + 1].is_sep("(")) continue;
    if (braces == 0) {
      bool annotation = i > 0 && t[i - 1].is_sep("@");
      if (!annotation && !decl_seen) {
        decl_seen = true;
        continue;
      }
      if (annotation) continue;
    }
    if (i > 0) {
      const auto& p = t[i - 1];
      if (p.cls == TokenClass::Identifier || p.is_sep("]") || p.is_sep("@")) continue;
      if (p.cls == TokenClass::Keyword && (api2com::javaparse::is_primitive_type(p.text) || p.text == "void" ||
                                           p.text == "new")) {
        continue;
      }
      // new a.b.C(...)
      std::size_t k = i;
      while (k >= 2 && t[k - 1].is_sep(".") && t[k - 2].cls == TokenClass::Identifier) k -= 2;
      if (k != i && k > 0 && t[k - 1].is_kw("new")) continue;
    }
    // Arity: top-level commas inside the matching parenthesis.
    int depth = 0;
    std::size_t commas = 0;
    bool empty = t.size() > i + 2 && t[i + 2].is_sep(")");
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      const auto& x = t[j];
      if (x.is_sep("(") || x.is_sep("[") || x.is_sep("{")) ++depth;
      if (x.is_sep(")") || x.is_sep("]") || x.is_sep("}")) {
        if (--depth == 0) break;
      }
      if (depth == 1 && x.is_sep(",")) ++commas;
    }
    out.emplace_back(t[i].text, empty ? 0 : commas + 1);
  }
  return out;
}

/// Random AST with labels drawn from identifier-like and operator strings.
inline api2com::javaparse::AstNode random_tree(std::mt19937_64& rng, int depth) {
  using api2com::javaparse::AstNode;
  using api2com::javaparse::NodeKind;
  static const std::vector<std::string> labels = {"", "", "x", "getName", "+", "==", "a.b.c", "42", "\"s\"",
                                                  "Call", "int", "'c'", "-", "<<=", "foo_bar"};
  std::uniform_int_distribution<int> kind(0, static_cast<int>(NodeKind::Other));
  std::uniform_int_distribution<std::size_t> lab(0, labels.size() - 1);
  AstNode n(static_cast<NodeKind>(kind(rng)), labels[lab(rng)]);
  if (depth > 0) {
    std::uniform_int_distribution<int> kids(0, depth > 3 ? 3 : 4);
    int c = kids(rng);
    for (int i = 0; i < c; ++i) n.children.push_back(random_tree(rng, depth - 1));
  }
  return n;
}

}  // namespace oracle
