#include "ncemb/taxonomy.hpp"

#include "ncemb/error.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <istream>

namespace ncemb {

Taxonomy Taxonomy::load(std::istream& in) {
  struct Line {
    std::string a, b;
    std::size_t no;
  };
  std::vector<Line> lines;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (raw.empty() || raw[0] == '#') continue;
    const auto tab = raw.find('\t');
    if (tab == std::string::npos || raw.find('\t', tab + 1) != std::string::npos) {
      throw ParseError("expected exactly two tab-separated fields: " + raw, line_no);
    }
    Line line{raw.substr(0, tab), raw.substr(tab + 1), line_no};
    if (line.a.empty() || line.b.empty()) throw ParseError("empty field", line_no);
    lines.push_back(std::move(line));
  }

  Taxonomy tax;
  // An id is a synset iff it is the root or appears as some parent;
  // everything else in a first field is a term.
  std::unordered_set<std::string> synsets;
  for (const auto& line : lines) {
    if (line.b == "-") {
      if (!tax.root_.empty() && tax.root_ != line.a) {
        throw ParseError("multiple roots: " + tax.root_ + " and " + line.a, line.no);
      }
      tax.root_ = line.a;
      synsets.insert(line.a);
    } else {
      synsets.insert(line.b);
    }
  }
  if (tax.root_.empty()) throw ParseError("no root line (parent \"-\") found");

  tax.parents_[tax.root_]; // root exists with no parents
  for (const auto& line : lines) {
    if (line.b == "-") continue;
    if (synsets.count(line.a)) {
      auto& parents = tax.parents_[line.a];
      if (std::find(parents.begin(), parents.end(), line.b) == parents.end()) {
        parents.push_back(line.b);
      }
      tax.parents_[line.b];
    } else {
      auto& entry = tax.term_synsets_[line.a];
      if (std::find(entry.begin(), entry.end(), line.b) == entry.end()) {
        entry.push_back(line.b);
      }
      tax.parents_[line.b];
    }
  }

  tax.finalize();
  return tax;
}

Taxonomy Taxonomy::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingResourceError("cannot open taxonomy file: " + path);
  return load(in);
}

void Taxonomy::finalize() {
  // depth by DFS with cycle detection; 0 = unvisited, -1 = in progress.
  depth_.clear();
  std::function<int(const std::string&)> depth_of = [&](const std::string& node) -> int {
    auto it = depth_.find(node);
    if (it != depth_.end()) {
      if (it->second == -1) throw Error("taxonomy contains a cycle through " + node);
      return it->second;
    }
    const auto parent_it = parents_.find(node);
    if (parent_it == parents_.end()) {
      throw Error("taxonomy references undeclared synset " + node);
    }
    if (node == root_) {
      depth_[node] = 1;
      return 1;
    }
    if (parent_it->second.empty()) {
      throw Error("synset " + node + " cannot reach the root (no parents)");
    }
    depth_[node] = -1;
    int best = 0;
    for (const auto& parent : parent_it->second) {
      best = std::max(best, depth_of(parent));
    }
    depth_[node] = best + 1;
    return best + 1;
  };
  for (const auto& [node, _] : parents_) depth_of(node);
  for (const auto& [term, synsets] : term_synsets_) {
    for (const auto& s : synsets) {
      if (!parents_.count(s)) {
        throw Error("term \"" + term + "\" references undeclared synset " + s);
      }
    }
  }
}

bool Taxonomy::has_term(const std::string& term) const {
  return term_synsets_.count(term) > 0;
}

bool Taxonomy::has_synset(const std::string& synset) const {
  return parents_.count(synset) > 0;
}

const std::vector<std::string>& Taxonomy::synsets_of(const std::string& term) const {
  static const std::vector<std::string> empty;
  auto it = term_synsets_.find(term);
  return it == term_synsets_.end() ? empty : it->second;
}

int Taxonomy::depth(const std::string& synset) const {
  auto it = depth_.find(synset);
  if (it == depth_.end()) throw Error("unknown synset: " + synset);
  return it->second;
}

std::unordered_set<std::string> Taxonomy::ancestors(const std::string& synset) const {
  std::unordered_set<std::string> seen;
  std::vector<std::string> stack{synset};
  while (!stack.empty()) {
    std::string node = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(node).second) continue;
    auto it = parents_.find(node);
    if (it == parents_.end()) throw Error("unknown synset: " + node);
    for (const auto& parent : it->second) stack.push_back(parent);
  }
  return seen;
}

TaxonomyBuilder& TaxonomyBuilder::root(const std::string& synset) {
  tax_.root_ = synset;
  tax_.parents_[synset];
  return *this;
}

TaxonomyBuilder& TaxonomyBuilder::edge(const std::string& synset, const std::string& parent) {
  auto& parents = tax_.parents_[synset];
  if (std::find(parents.begin(), parents.end(), parent) == parents.end()) {
    parents.push_back(parent);
  }
  tax_.parents_[parent];
  return *this;
}

TaxonomyBuilder& TaxonomyBuilder::term(const std::string& term, const std::string& synset) {
  auto& entry = tax_.term_synsets_[term];
  if (std::find(entry.begin(), entry.end(), synset) == entry.end()) {
    entry.push_back(synset);
  }
  return *this;
}

Taxonomy TaxonomyBuilder::build() {
  if (tax_.root_.empty()) throw Error("taxonomy builder: no root set");
  tax_.finalize();
  return std::move(tax_);
}

std::optional<double> wu_palmer(const Taxonomy& tax, const std::string& a,
                                const std::string& b) {
  if (!tax.has_term(a) || !tax.has_term(b)) return std::nullopt;

  double best = 0.0;
  bool found = false;
  for (const auto& sa : tax.synsets_of(a)) {
    const auto ancestors_a = tax.ancestors(sa);
    for (const auto& sb : tax.synsets_of(b)) {
      // Deepest common ancestor over the pair.
      int lcs_depth = 0;
      for (const auto& anc : tax.ancestors(sb)) {
        if (ancestors_a.count(anc)) lcs_depth = std::max(lcs_depth, tax.depth(anc));
      }
      if (lcs_depth == 0) continue; // disjoint, cannot happen in a rooted taxonomy
      found = true;
      best = std::max(best, 2.0 * lcs_depth /
                                static_cast<double>(tax.depth(sa) + tax.depth(sb)));
    }
  }
  if (!found) return 0.0;
  return best;
}

} // namespace ncemb
