#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ncemb {

// A rooted is-a taxonomy over synsets with a term -> synsets mapping.
// Multiple parents are allowed (DAG); cycles and unreachable nodes are
// load errors. depth(root) = 1 and depth(n) = 1 + max over parents, so
// an ancestor is always strictly shallower than its descendants.
class Taxonomy {
public:
  Taxonomy() = default; // empty: no root, no terms

  // File format, one record per line:
  //   synset_id \t parent_id     (the root uses parent "-")
  //   term      \t synset_id
  // The two kinds share one shape; an id is taken to be a synset iff it
  // appears as some parent or is the root, so every non-root synset must
  // be a parent or be referenced by a term line.
  static Taxonomy load(std::istream& in);
  static Taxonomy load_file(const std::string& path);

  bool has_term(const std::string& term) const;
  bool has_synset(const std::string& synset) const;
  const std::vector<std::string>& synsets_of(const std::string& term) const;

  /// 1 at the root, 1 + deepest parent elsewhere.
  int depth(const std::string& synset) const;

  /// All ancestors of `synset`, inclusive.
  std::unordered_set<std::string> ancestors(const std::string& synset) const;

  std::size_t node_count() const { return parents_.size(); }
  const std::string& root() const { return root_; }

private:
  void finalize(); // depth computation + validation

  std::string root_;
  std::unordered_map<std::string, std::vector<std::string>> parents_;
  std::unordered_map<std::string, std::vector<std::string>> term_synsets_;
  std::unordered_map<std::string, int> depth_;

  friend class TaxonomyBuilder;
};

/// Programmatic construction for fixtures and generators.
class TaxonomyBuilder {
public:
  TaxonomyBuilder& root(const std::string& synset);
  TaxonomyBuilder& edge(const std::string& synset, const std::string& parent);
  TaxonomyBuilder& term(const std::string& term, const std::string& synset);
  Taxonomy build();

private:
  Taxonomy tax_;
};

// Wu-Palmer similarity: max over synset pairs (sa, sb) of the two terms
// of 2*depth(lcs) / (depth(sa) + depth(sb)) with lcs the deepest common
// ancestor. nullopt when either term is absent.
std::optional<double> wu_palmer(const Taxonomy& tax, const std::string& a,
                                const std::string& b);

} // namespace ncemb
