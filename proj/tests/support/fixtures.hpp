#pragma once

#include "ncemb/embeddings.hpp"
#include "ncemb/rng.hpp"

#include <Eigen/Core>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <initializer_list>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fixtures {

inline bool exactly_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

inline Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const double x : values) v(i++) = x;
  return v;
}

inline Eigen::VectorXd random_vector(Eigen::Index d, ncemb::Rng& rng, double lo = -1.0,
                                     double hi = 1.0) {
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

/// A unit vector with an exact target cosine against `anchor` (2d only).
inline Eigen::VectorXd with_cosine(double target_cos) {
  Eigen::VectorXd v(2);
  v << target_cos, std::sqrt(1.0 - target_cos * target_cos);
  return v;
}

/// Unique scratch directory under the system temp root, removed on scope exit.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ncemb-" + tag + "-" + std::to_string(rd()) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
  std::filesystem::path path_;
};

/// Generative fixture: words w0..w{n-1} plus compound surfaces whose
/// stored vectors are produced by `observe(v1, v2)`.
template <typename ObserveFn>
ncemb::EmbeddingSpace generated_space(std::uint64_t seed, std::size_t word_count,
                                      Eigen::Index dim,
                                      const std::vector<ncemb::NounCompound>& compounds,
                                      ObserveFn observe) {
  ncemb::Rng rng(seed);
  std::vector<std::string> tokens;
  std::vector<Eigen::VectorXd> rows;
  for (std::size_t i = 0; i < word_count; ++i) {
    tokens.push_back("w" + std::to_string(i));
    rows.push_back(random_vector(dim, rng));
  }
  const auto lookup = [&](const std::string& token) -> const Eigen::VectorXd& {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i] == token) return rows[i];
    }
    throw std::runtime_error("generated_space: unknown word " + token);
  };
  for (const auto& nc : compounds) {
    const Eigen::VectorXd observed = observe(lookup(nc.w1), lookup(nc.w2));
    tokens.push_back(nc.surface());
    rows.push_back(observed);
  }
  Eigen::MatrixXd matrix(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    matrix.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  return ncemb::EmbeddingSpace(std::move(tokens), std::move(matrix));
}

/// Random compounds over the w0..w{word_count-1} vocabulary, unique pairs.
inline std::vector<ncemb::NounCompound> random_compounds(std::size_t count,
                                                         std::size_t word_count,
                                                         std::uint64_t seed) {
  ncemb::Rng rng(seed);
  std::vector<ncemb::NounCompound> compounds;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  while (compounds.size() < count) {
    const std::size_t a = rng.index(word_count);
    const std::size_t b = rng.index(word_count);
    if (a == b || !seen.emplace(a, b).second) continue;
    compounds.emplace_back("w" + std::to_string(a), "w" + std::to_string(b),
                           rng.index(1000));
  }
  return compounds;
}

} // namespace fixtures
