#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ncemb {

/// A binary noun compound. Constituents are plain word tokens; the
/// surface form (w1_w2) is derived, matching the single-token convention
/// used for compounds inside an embedding vocabulary.
struct NounCompound {
  std::string w1;
  std::string w2;
  std::uint64_t frequency = 0;

  NounCompound() = default;
  NounCompound(std::string w1_, std::string w2_, std::uint64_t frequency_ = 0);

  std::string surface() const { return w1 + "_" + w2; }
  bool operator==(const NounCompound& o) const {
    return w1 == o.w1 && w2 == o.w2;
  }
};

/// Splits a surface form "w1_w2" back into a compound. Returns nullopt
/// for strings that are not exactly two underscore-joined tokens.
std::optional<NounCompound> compound_from_surface(std::string_view surface);

// Immutable vocabulary -> vector mapping plus per-token corpus counts.
// Vectors are stored unnormalized; consumers normalize on demand.
class EmbeddingSpace {
public:
  /// `vectors` holds one row per token; throws on duplicate tokens,
  /// row-count mismatch, or non-finite entries.
  EmbeddingSpace(std::vector<std::string> tokens, Eigen::MatrixXd vectors,
                 std::unordered_map<std::string, std::uint64_t> frequencies = {});

  Eigen::Index dim() const { return vectors_.cols(); }
  Eigen::Index size() const { return vectors_.rows(); }

  const std::vector<std::string>& tokens() const { return tokens_; }
  const Eigen::MatrixXd& matrix() const { return vectors_; }

  bool contains(std::string_view token) const;
  std::optional<Eigen::Index> index_of(std::string_view token) const;

  /// Row i as a column vector.
  Eigen::VectorXd vector_at(Eigen::Index i) const;

  /// Stored vector for a known token; nullopt is the OOV signal.
  std::optional<Eigen::VectorXd> lookup(std::string_view token) const;

  /// Corpus count; tokens without an entry count as 0.
  std::uint64_t frequency(std::string_view token) const;

  const std::unordered_map<std::string, std::uint64_t>& frequencies() const {
    return frequencies_;
  }

  /// Returns a copy with the given frequency table attached.
  EmbeddingSpace with_frequencies(
      std::unordered_map<std::string, std::uint64_t> frequencies) const;

private:
  std::vector<std::string> tokens_;
  Eigen::MatrixXd vectors_;
  std::unordered_map<std::string, std::uint64_t> frequencies_;
  std::unordered_map<std::string, Eigen::Index> index_;
};

// Text format: line 1 is "<token_count> <dim>", each following line is
// the token and d decimal numbers, space-separated.
EmbeddingSpace load_embeddings(std::istream& in);
EmbeddingSpace load_embeddings_file(const std::string& path);
void save_embeddings(const EmbeddingSpace& space, std::ostream& out);
void save_embeddings_file(const EmbeddingSpace& space, const std::string& path);

/// Frequency sidecar: lines of "<token>\t<count>".
std::unordered_map<std::string, std::uint64_t> load_frequency_sidecar(std::istream& in);
std::unordered_map<std::string, std::uint64_t> load_frequency_sidecar_file(const std::string& path);

/// Deterministic test-fixture space: entries uniform in [-1, 1), a pure
/// function of (seed, vocab, dim, frequency_plan).
EmbeddingSpace synthetic_space(
    std::uint64_t seed, const std::vector<std::string>& vocab, Eigen::Index dim,
    const std::map<std::string, std::uint64_t>& frequency_plan = {});

/// Compounds TSV: "w1\tw2" with an optional third frequency column.
std::vector<NounCompound> parse_compounds(std::istream& in);
std::vector<NounCompound> parse_compounds_file(const std::string& path);

} // namespace ncemb
