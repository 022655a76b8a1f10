#pragma once

// Brute-force oracles kept independent of the library implementations
// they check: naive scans, no shared helpers, no memoization.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

inline ClassScores class_scores(const std::vector<std::string>& gold,
                                const std::vector<std::string>& pred,
                                const std::string& label) {
  std::size_t tp = 0, fp = 0, fn = 0, support = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == label) ++support;
    if (pred[i] == label && gold[i] == label) ++tp;
    if (pred[i] == label && gold[i] != label) ++fp;
    if (pred[i] != label && gold[i] == label) ++fn;
  }
  ClassScores s;
  s.support = support;
  s.precision = (tp + fp) == 0 ? 0.0 : double(tp) / double(tp + fp);
  s.recall = (tp + fn) == 0 ? 0.0 : double(tp) / double(tp + fn);
  s.f1 = (s.precision + s.recall) == 0.0
             ? 0.0
             : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

inline std::map<std::string, ClassScores> per_gold_class(
    const std::vector<std::string>& gold, const std::vector<std::string>& pred) {
  std::set<std::string> classes(gold.begin(), gold.end());
  std::map<std::string, ClassScores> out;
  for (const auto& label : classes) out[label] = class_scores(gold, pred, label);
  return out;
}

inline ClassScores macro(const std::vector<std::string>& gold,
                         const std::vector<std::string>& pred) {
  const auto per_class = per_gold_class(gold, pred);
  ClassScores m;
  for (const auto& [_, s] : per_class) {
    m.precision += s.precision;
    m.recall += s.recall;
    m.f1 += s.f1;
  }
  const double k = double(per_class.size());
  m.precision /= k;
  m.recall /= k;
  m.f1 /= k;
  return m;
}

// --- Wu-Palmer over a raw parent-map taxonomy ---------------------------

struct RawTaxonomy {
  std::string root;
  std::map<std::string, std::vector<std::string>> parents;
  std::map<std::string, std::vector<std::string>> term_synsets;
};

/// Recursive depth, recomputed from scratch on every call.
inline int naive_depth(const RawTaxonomy& t, const std::string& node) {
  if (node == t.root) return 1;
  int best = 0;
  for (const auto& p : t.parents.at(node)) best = std::max(best, naive_depth(t, p));
  return best + 1;
}

inline void collect_ancestors(const RawTaxonomy& t, const std::string& node,
                              std::set<std::string>& out) {
  if (!out.insert(node).second) return;
  auto it = t.parents.find(node);
  if (it == t.parents.end()) return;
  for (const auto& p : it->second) collect_ancestors(t, p, out);
}

/// Max over synset pairs of 2*depth(deepest common ancestor) /
/// (depth(sa) + depth(sb)), by plain enumeration.
inline double naive_wu_palmer(const RawTaxonomy& t, const std::string& a,
                              const std::string& b) {
  double best = 0.0;
  for (const auto& sa : t.term_synsets.at(a)) {
    std::set<std::string> anc_a;
    collect_ancestors(t, sa, anc_a);
    for (const auto& sb : t.term_synsets.at(b)) {
      std::set<std::string> anc_b;
      collect_ancestors(t, sb, anc_b);
      int lcs = 0;
      for (const auto& common : anc_a) {
        if (anc_b.count(common)) lcs = std::max(lcs, naive_depth(t, common));
      }
      if (lcs > 0) {
        best = std::max(best, 2.0 * lcs /
                                  double(naive_depth(t, sa) + naive_depth(t, sb)));
      }
    }
  }
  return best;
}

} // namespace oracle
