#include "ncemb/embeddings.hpp"

#include "ncemb/error.hpp"
#include "ncemb/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace ncemb {

namespace {

bool valid_constituent(const std::string& w) {
  if (w.empty()) return false;
  return std::none_of(w.begin(), w.end(), [](unsigned char c) {
    return c == '_' || std::isspace(c);
  });
}

} // namespace

NounCompound::NounCompound(std::string w1_, std::string w2_, std::uint64_t frequency_)
    : w1(std::move(w1_)), w2(std::move(w2_)), frequency(frequency_) {
  if (!valid_constituent(w1) || !valid_constituent(w2)) {
    throw Error("invalid compound constituents: \"" + w1 + "\" + \"" + w2 +
                "\" (must be non-empty, no whitespace or underscore)");
  }
}

std::optional<NounCompound> compound_from_surface(std::string_view surface) {
  auto underscore = surface.find('_');
  if (underscore == std::string_view::npos) return std::nullopt;
  if (surface.find('_', underscore + 1) != std::string_view::npos) return std::nullopt;
  std::string w1(surface.substr(0, underscore));
  std::string w2(surface.substr(underscore + 1));
  if (!valid_constituent(w1) || !valid_constituent(w2)) return std::nullopt;
  return NounCompound(std::move(w1), std::move(w2));
}

EmbeddingSpace::EmbeddingSpace(std::vector<std::string> tokens, Eigen::MatrixXd vectors,
                               std::unordered_map<std::string, std::uint64_t> frequencies)
    : tokens_(std::move(tokens)),
      vectors_(std::move(vectors)),
      frequencies_(std::move(frequencies)) {
  if (static_cast<Eigen::Index>(tokens_.size()) != vectors_.rows()) {
    throw Error("embedding row count " + std::to_string(vectors_.rows()) +
                " does not match token count " + std::to_string(tokens_.size()));
  }
  if (vectors_.cols() <= 0) {
    throw Error("embedding dimension must be positive");
  }
  if (!vectors_.allFinite()) {
    throw Error("embedding matrix contains non-finite entries");
  }
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    auto [_, inserted] = index_.emplace(tokens_[i], static_cast<Eigen::Index>(i));
    if (!inserted) throw Error("duplicate token in embedding space: " + tokens_[i]);
  }
}

bool EmbeddingSpace::contains(std::string_view token) const {
  return index_.find(std::string(token)) != index_.end();
}

std::optional<Eigen::Index> EmbeddingSpace::index_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Eigen::VectorXd EmbeddingSpace::vector_at(Eigen::Index i) const {
  return vectors_.row(i).transpose();
}

std::optional<Eigen::VectorXd> EmbeddingSpace::lookup(std::string_view token) const {
  auto idx = index_of(token);
  if (!idx) return std::nullopt;
  return vector_at(*idx);
}

std::uint64_t EmbeddingSpace::frequency(std::string_view token) const {
  auto it = frequencies_.find(std::string(token));
  return it == frequencies_.end() ? 0 : it->second;
}

EmbeddingSpace EmbeddingSpace::with_frequencies(
    std::unordered_map<std::string, std::uint64_t> frequencies) const {
  return EmbeddingSpace(tokens_, vectors_, std::move(frequencies));
}

EmbeddingSpace load_embeddings(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty embedding file", 1);

  std::istringstream header(line);
  long long count = -1;
  long long dim = -1;
  if (!(header >> count >> dim) || count < 0 || dim <= 0) {
    throw ParseError("malformed header, expected \"<token_count> <dim>\": " + line, 1);
  }
  std::string extra;
  if (header >> extra) {
    throw ParseError("malformed header, trailing content: " + line, 1);
  }

  std::vector<std::string> tokens;
  tokens.reserve(static_cast<std::size_t>(count));
  Eigen::MatrixXd vectors(count, dim);

  std::size_t line_no = 1;
  for (long long row = 0; row < count; ++row) {
    if (!std::getline(in, line)) {
      throw ParseError("expected " + std::to_string(count) + " rows, file ended after " +
                           std::to_string(row),
                       line_no);
    }
    ++line_no;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) throw ParseError("blank embedding row", line_no);
    long long col = 0;
    std::string cell;
    for (; fields >> cell; ++col) {
      if (col >= dim) {
        throw ParseError("row for \"" + token + "\" has more than " +
                             std::to_string(dim) + " values",
                         line_no);
      }
      try {
        std::size_t used = 0;
        vectors(row, col) = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError("non-numeric entry \"" + cell + "\" for token \"" + token + "\"",
                         line_no);
      }
    }
    if (col != dim) {
      throw ParseError("row for \"" + token + "\" has " + std::to_string(col) +
                           " values, expected " + std::to_string(dim),
                       line_no);
    }
    tokens.push_back(std::move(token));
  }

  try {
    return EmbeddingSpace(std::move(tokens), std::move(vectors));
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

EmbeddingSpace load_embeddings_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingResourceError("cannot open embedding file: " + path);
  return load_embeddings(in);
}

void save_embeddings(const EmbeddingSpace& space, std::ostream& out) {
  out << space.size() << ' ' << space.dim() << '\n';
  const auto& m = space.matrix();
  std::ostringstream cell;
  cell.precision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < space.size(); ++i) {
    out << space.tokens()[i];
    for (Eigen::Index j = 0; j < space.dim(); ++j) {
      cell.str("");
      cell << m(i, j);
      out << ' ' << cell.str();
    }
    out << '\n';
  }
  if (!out) throw Error("failed writing embedding stream");
}

void save_embeddings_file(const EmbeddingSpace& space, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  save_embeddings(space, out);
}

std::unordered_map<std::string, std::uint64_t> load_frequency_sidecar(std::istream& in) {
  std::unordered_map<std::string, std::uint64_t> counts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("expected \"token\\tcount\": " + line, line_no);
    }
    std::string token = line.substr(0, tab);
    std::string raw = line.substr(tab + 1);
    try {
      std::size_t used = 0;
      long long v = std::stoll(raw, &used);
      if (used != raw.size() || v < 0) throw std::invalid_argument(raw);
      counts[token] = static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
      throw ParseError("bad count \"" + raw + "\" for token \"" + token + "\"", line_no);
    }
  }
  return counts;
}

std::unordered_map<std::string, std::uint64_t> load_frequency_sidecar_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingResourceError("cannot open frequency file: " + path);
  return load_frequency_sidecar(in);
}

EmbeddingSpace synthetic_space(std::uint64_t seed, const std::vector<std::string>& vocab,
                               Eigen::Index dim,
                               const std::map<std::string, std::uint64_t>& frequency_plan) {
  if (vocab.empty()) throw Error("synthetic_space requires a non-empty vocabulary");
  if (dim <= 0) throw Error("synthetic_space requires a positive dimension");

  Rng rng(derive_seed(seed, "synthetic_space"));
  Eigen::MatrixXd vectors(static_cast<Eigen::Index>(vocab.size()), dim);
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      vectors(i, j) = rng.uniform(-1.0, 1.0);
    }
  }

  std::unordered_map<std::string, std::uint64_t> frequencies(frequency_plan.begin(),
                                                             frequency_plan.end());
  return EmbeddingSpace(vocab, std::move(vectors), std::move(frequencies));
}

std::vector<NounCompound> parse_compounds(std::istream& in) {
  std::vector<NounCompound> compounds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string w1, w2, freq;
    std::getline(fields, w1, '\t');
    if (!std::getline(fields, w2, '\t')) {
      throw ParseError("expected \"w1\\tw2[\\tfrequency]\": " + line, line_no);
    }
    std::uint64_t frequency = 0;
    if (std::getline(fields, freq, '\t') && !freq.empty()) {
      try {
        std::size_t used = 0;
        long long v = std::stoll(freq, &used);
        if (used != freq.size() || v < 0) throw std::invalid_argument(freq);
        frequency = static_cast<std::uint64_t>(v);
      } catch (const std::exception&) {
        throw ParseError("bad frequency \"" + freq + "\"", line_no);
      }
    }
    try {
      compounds.emplace_back(w1, w2, frequency);
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return compounds;
}

std::vector<NounCompound> parse_compounds_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingResourceError("cannot open compounds file: " + path);
  return parse_compounds(in);
}

} // namespace ncemb
