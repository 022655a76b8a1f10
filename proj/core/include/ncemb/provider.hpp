#pragma once

#include "ncemb/embeddings.hpp"

#include <Eigen/Core>

#include <memory>
#include <optional>
#include <string>

namespace ncemb {

/// A representation under test: maps a compound to a vector, or signals
/// that the compound cannot be represented (distributional OOV).
class VectorProvider {
public:
  virtual ~VectorProvider() = default;
  virtual std::optional<Eigen::VectorXd> vector_for(const NounCompound& nc) const = 0;
  virtual std::string name() const = 0;
};

} // namespace ncemb
