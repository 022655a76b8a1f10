#pragma once

#include "ncemb/embeddings.hpp"
#include "ncemb/paraphrase.hpp"
#include "ncemb/taxonomy.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

namespace ncemb {

enum class NeighborCategory {
  rare_word,
  backtrans_paraphrase,
  shared_constituent,
  wordnet_similar,
  other_compound,
  other_word,
};

std::string to_string(NeighborCategory c);
const std::vector<NeighborCategory>& all_neighbor_categories();

struct NeighborEntry {
  std::string token;
  double score = 0.0; // cosine similarity
  int rank = 0;       // 1-based
  std::optional<NeighborCategory> category;
};

// Candidate pool for retrieval: the word space plus any composed
// compound vectors added on top. Brute-force exact cosine search.
class NeighborPool {
public:
  explicit NeighborPool(Eigen::Index dim) : dim_(dim) {}
  static NeighborPool from_space(const EmbeddingSpace& space);

  void add(const std::string& token, const Eigen::VectorXd& vector);
  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  /// Exact top-k by cosine, ties broken lexicographically, `exclude`
  /// (plus zero-norm candidates) never returned. Callers put the target
  /// itself in `exclude`.
  std::vector<NeighborEntry> top_k(const Eigen::VectorXd& query, int k,
                                   const std::unordered_set<std::string>& exclude) const;

private:
  Eigen::Index dim_;
  std::vector<std::string> tokens_;
  std::vector<Eigen::VectorXd> vectors_;
  std::vector<double> norms_;
};

struct CategorizeResources {
  /// token -> corpus count; absent counts as 0.
  const std::unordered_map<std::string, std::uint64_t>* frequencies = nullptr;
  /// backtranslation sets keyed by target surface.
  const std::map<std::string, ParaphraseSet>* backtranslations = nullptr;
  const Taxonomy* taxonomy = nullptr; // optional; category skipped when absent
  std::uint64_t rare_threshold = 10;
  double wordnet_min_similarity = 0.25;
};

// First matching category in precedence order: rare word, backtranslation
// paraphrase, shared constituent, WordNet-similar, other compound, other
// word. Compound neighbors are recognized by an underscore in the token.
NeighborCategory categorize(const NounCompound& target,
                            const std::string& neighbor_token,
                            const CategorizeResources& resources);

struct NeighborReport {
  std::string cohort;
  int k = 0;
  /// target surface -> categorized top-k entries, in target order.
  std::vector<std::pair<std::string, std::vector<NeighborEntry>>> per_target;
  std::map<NeighborCategory, double> category_percent; // sums to 100
};

/// Query vector per target; nullopt targets are skipped (counted).
using TargetVectorFn = std::function<std::optional<Eigen::VectorXd>(const NounCompound&)>;

NeighborReport neighbor_report(std::span<const NounCompound> targets,
                               const TargetVectorFn& target_vector,
                               const NeighborPool& pool, int k,
                               const CategorizeResources& resources,
                               const std::string& cohort_name = "all");

/// The n most rare or most frequent compounds; ties broken by surface.
enum class Cohort { rare, frequent };
std::vector<NounCompound> select_cohort(std::span<const NounCompound> compounds,
                                        Cohort cohort, std::size_t n);

struct RareCurvePoint {
  double bin_center = 0.0;
  double mean_rare_percent = 0.0; // in [0, 100]
  std::size_t compounds = 0;
};

struct RareCurve {
  std::vector<RareCurvePoint> points;
  std::vector<std::pair<double, double>> empty_bins; // omitted, logged by caller
  std::size_t skipped_targets = 0;                   // no vector available
};

/// Mean percentage of rare neighbors (frequency < threshold) among the
/// top-k, per compound-frequency bin. Bin edges are half-open [lo, hi).
RareCurve rare_curve(const EmbeddingSpace& space, std::span<const NounCompound> compounds,
                     const std::vector<double>& bin_edges,
                     std::uint64_t rare_threshold = 10, int k = 10);

/// TSV of (target, rank, neighbor, score, category) then a summary block
/// of category percentages.
void write_neighbor_report(const NeighborReport& report, std::ostream& out);

} // namespace ncemb
