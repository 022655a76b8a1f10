#include "ncemb/neighbors.hpp"

#include "ncemb/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace ncemb {

namespace {

std::vector<std::string> split_underscores(const std::string& token) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto us = token.find('_', start);
    if (us == std::string::npos) {
      parts.push_back(token.substr(start));
      break;
    }
    parts.push_back(token.substr(start, us - start));
    start = us + 1;
  }
  return parts;
}

bool is_compound_token(const std::string& token) {
  return token.find('_') != std::string::npos;
}

} // namespace

std::string to_string(NeighborCategory c) {
  switch (c) {
    case NeighborCategory::rare_word: return "rare_word";
    case NeighborCategory::backtrans_paraphrase: return "backtrans_paraphrase";
    case NeighborCategory::shared_constituent: return "shared_constituent";
    case NeighborCategory::wordnet_similar: return "wordnet_similar";
    case NeighborCategory::other_compound: return "other_compound";
    case NeighborCategory::other_word: return "other_word";
  }
  throw Error("unknown neighbor category");
}

const std::vector<NeighborCategory>& all_neighbor_categories() {
  static const std::vector<NeighborCategory> all{
      NeighborCategory::rare_word,          NeighborCategory::backtrans_paraphrase,
      NeighborCategory::shared_constituent, NeighborCategory::wordnet_similar,
      NeighborCategory::other_compound,     NeighborCategory::other_word,
  };
  return all;
}

NeighborPool NeighborPool::from_space(const EmbeddingSpace& space) {
  NeighborPool pool(space.dim());
  for (Eigen::Index i = 0; i < space.size(); ++i) {
    pool.add(space.tokens()[i], space.vector_at(i));
  }
  return pool;
}

void NeighborPool::add(const std::string& token, const Eigen::VectorXd& vector) {
  if (vector.size() != dim_) {
    throw Error("neighbor pool: vector for \"" + token + "\" has length " +
                std::to_string(vector.size()) + ", pool dimension is " +
                std::to_string(dim_));
  }
  tokens_.push_back(token);
  vectors_.push_back(vector);
  norms_.push_back(vector.norm());
}

std::vector<NeighborEntry> NeighborPool::top_k(
    const Eigen::VectorXd& query, int k,
    const std::unordered_set<std::string>& exclude) const {
  if (k < 1) throw Error("top_k: k must be >= 1");
  const double qnorm = query.norm();
  if (qnorm == 0.0) throw DegenerateInputError("top_k: zero-norm query");

  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (norms_[i] == 0.0) continue; // cosine undefined, never ranked
    if (exclude.count(tokens_[i])) continue;
    scored.emplace_back(query.dot(vectors_[i]) / (qnorm * norms_[i]), i);
  }

  const std::size_t take = std::min<std::size_t>(k, scored.size());
  auto better = [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return tokens_[a.second] < tokens_[b.second];
  };
  std::partial_sort(scored.begin(), scored.begin() + take, scored.end(), better);

  std::vector<NeighborEntry> entries;
  entries.reserve(take);
  for (std::size_t r = 0; r < take; ++r) {
    entries.push_back({tokens_[scored[r].second], scored[r].first,
                       static_cast<int>(r) + 1, std::nullopt});
  }
  return entries;
}

NeighborCategory categorize(const NounCompound& target, const std::string& neighbor_token,
                            const CategorizeResources& resources) {
  std::uint64_t freq = 0;
  if (resources.frequencies) {
    auto it = resources.frequencies->find(neighbor_token);
    if (it != resources.frequencies->end()) freq = it->second;
  }
  if (freq < resources.rare_threshold) return NeighborCategory::rare_word;

  if (resources.backtranslations) {
    auto it = resources.backtranslations->find(target.surface());
    if (it != resources.backtranslations->end() &&
        it->second.contains(split_underscores(neighbor_token))) {
      return NeighborCategory::backtrans_paraphrase;
    }
  }

  const bool compound = is_compound_token(neighbor_token);
  if (compound) {
    const auto parts = split_underscores(neighbor_token);
    for (const auto& part : parts) {
      if (part == target.w1 || part == target.w2) {
        return NeighborCategory::shared_constituent;
      }
    }
  } else if (neighbor_token == target.w1 || neighbor_token == target.w2) {
    return NeighborCategory::shared_constituent;
  }

  if (resources.taxonomy) {
    const auto similarity = wu_palmer(*resources.taxonomy, target.surface(), neighbor_token);
    if (similarity && *similarity > resources.wordnet_min_similarity) {
      return NeighborCategory::wordnet_similar;
    }
  }

  return compound ? NeighborCategory::other_compound : NeighborCategory::other_word;
}

NeighborReport neighbor_report(std::span<const NounCompound> targets,
                               const TargetVectorFn& target_vector,
                               const NeighborPool& pool, int k,
                               const CategorizeResources& resources,
                               const std::string& cohort_name) {
  if (targets.empty()) throw EvalError("neighbor_report: empty cohort");

  NeighborReport report;
  report.cohort = cohort_name;
  report.k = k;

  std::map<NeighborCategory, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& target : targets) {
    const auto query = target_vector(target);
    if (!query) continue; // target not representable under this provider
    std::unordered_set<std::string> exclude{target.surface()};
    auto entries = pool.top_k(*query, k, exclude);
    for (auto& entry : entries) {
      entry.category = categorize(target, entry.token, resources);
      ++counts[*entry.category];
      ++total;
    }
    report.per_target.emplace_back(target.surface(), std::move(entries));
  }
  if (total == 0) throw EvalError("neighbor_report: no target had a vector");

  for (const auto cat : all_neighbor_categories()) {
    const auto it = counts.find(cat);
    const std::size_t n = it == counts.end() ? 0 : it->second;
    report.category_percent[cat] = 100.0 * static_cast<double>(n) / static_cast<double>(total);
  }
  return report;
}

std::vector<NounCompound> select_cohort(std::span<const NounCompound> compounds,
                                        Cohort cohort, std::size_t n) {
  std::vector<NounCompound> sorted(compounds.begin(), compounds.end());
  std::sort(sorted.begin(), sorted.end(), [&](const NounCompound& a, const NounCompound& b) {
    if (a.frequency != b.frequency) {
      return cohort == Cohort::rare ? a.frequency < b.frequency : a.frequency > b.frequency;
    }
    return a.surface() < b.surface();
  });
  if (sorted.size() > n) sorted.resize(n);
  return sorted;
}

RareCurve rare_curve(const EmbeddingSpace& space, std::span<const NounCompound> compounds,
                     const std::vector<double>& bin_edges, std::uint64_t rare_threshold,
                     int k) {
  if (bin_edges.size() < 2) throw ConfigError("rare_curve: need at least two bin edges");
  if (!std::is_sorted(bin_edges.begin(), bin_edges.end())) {
    throw ConfigError("rare_curve: bin edges must be ascending");
  }

  const NeighborPool pool = NeighborPool::from_space(space);
  const std::size_t bins = bin_edges.size() - 1;
  std::vector<double> percent_sum(bins, 0.0);
  std::vector<std::size_t> bin_count(bins, 0);

  RareCurve curve;
  for (const auto& nc : compounds) {
    const auto query = space.lookup(nc.surface());
    if (!query) {
      ++curve.skipped_targets;
      continue;
    }
    const double freq = static_cast<double>(nc.frequency);
    std::size_t bin = bins;
    for (std::size_t b = 0; b < bins; ++b) {
      if (freq >= bin_edges[b] && freq < bin_edges[b + 1]) {
        bin = b;
        break;
      }
    }
    if (bin == bins) continue; // outside every bin

    std::unordered_set<std::string> exclude{nc.surface()};
    const auto entries = pool.top_k(*query, k, exclude);
    if (entries.empty()) continue;
    std::size_t rare = 0;
    for (const auto& e : entries) {
      if (space.frequency(e.token) < rare_threshold) ++rare;
    }
    percent_sum[bin] += 100.0 * static_cast<double>(rare) / static_cast<double>(entries.size());
    ++bin_count[bin];
  }

  for (std::size_t b = 0; b < bins; ++b) {
    if (bin_count[b] == 0) {
      curve.empty_bins.emplace_back(bin_edges[b], bin_edges[b + 1]);
      continue;
    }
    curve.points.push_back({(bin_edges[b] + bin_edges[b + 1]) / 2.0,
                            percent_sum[b] / static_cast<double>(bin_count[b]),
                            bin_count[b]});
  }
  return curve;
}

void write_neighbor_report(const NeighborReport& report, std::ostream& out) {
  out << "target\trank\tneighbor\tscore\tcategory\n";
  std::ostringstream num;
  num.precision(6);
  for (const auto& [target, entries] : report.per_target) {
    for (const auto& e : entries) {
      num.str("");
      num << e.score;
      out << target << '\t' << e.rank << '\t' << e.token << '\t' << num.str() << '\t'
          << (e.category ? to_string(*e.category) : "-") << '\n';
    }
  }
  out << "#summary\tcohort=" << report.cohort << "\tk=" << report.k << '\n';
  for (const auto& [category, percent] : report.category_percent) {
    num.str("");
    num << percent;
    out << "#percent\t" << to_string(category) << '\t' << num.str() << '\n';
  }
}

} // namespace ncemb
