#pragma once

#include "ncemb/compose.hpp"
#include "ncemb/embeddings.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ncemb {

enum class Objective { compositional, paraphrase };
enum class Distance { mse, cosine };

std::string to_string(Objective o);
std::string to_string(Distance d);
Objective objective_from_string(const std::string& name);
Distance distance_from_string(const std::string& name);

struct TrainConfig {
  Objective objective = Objective::compositional;
  Distance distance = Distance::mse;
  double margin = 0.6;
  std::optional<double> learning_rate;  // unset -> per-kind default
  int epochs = 50;
  int batch_size = 64;
  std::uint64_t seed = 0;
  std::optional<bool> normalize_inputs; // unset -> per-objective default
  int early_stop_patience = 0;          // 0 disables early stopping
  int negatives_per_positive = 1;

  /// 0.05 for add/fulladd/matrix, 0.01 for the LSTM, unless set.
  double resolved_learning_rate(CompositionKind kind) const;
  /// false for the compositional objective (keeps target magnitudes),
  /// true for the paraphrase objective (cosine loss), unless set.
  bool resolved_normalize_inputs() const;

  void validate(CompositionKind kind) const;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  int selected_epoch = -1; // index of the minimum validation loss, earliest tie

  /// One "epoch\ttrain_loss\tval_loss" line per epoch.
  void write_log(std::ostream& out) const;
};

/// mse: mean squared entry difference. cosine: 1 - cos(composed, observed).
double compositional_loss(const Eigen::VectorXd& composed,
                          const Eigen::VectorXd& observed, Distance distance);

/// max(0, margin - cos(nc, p) + cos(nc, neg)); all vectors must be nonzero.
double margin_loss(const Eigen::VectorXd& v_nc, const Eigen::VectorXd& v_p,
                   const Eigen::VectorXd& v_neg, double margin);

/// One compositional training example; vectors are frozen inputs.
struct ComposeExample {
  Eigen::VectorXd v1;
  Eigen::VectorXd v2;
  Eigen::VectorXd observed;
};

/// One paraphrase training triple: compound, paraphrase, sampled negative,
/// each a token-vector sequence fed through the shared encoder.
struct TripleExample {
  std::vector<Eigen::VectorXd> nc;
  std::vector<Eigen::VectorXd> positive;
  std::vector<Eigen::VectorXd> negative;
};

struct TrainOutcome {
  CompositionModel model;
  TrainHistory history;
  std::size_t dropped_train = 0; // OOV-excluded items, counted never substituted
  std::size_t dropped_val = 0;
};

/// Mini-batch gradient descent on compositional_loss over frozen
/// constituent vectors; returns the best-validation-epoch parameters.
TrainOutcome train_compositional(const EmbeddingSpace& space,
                                 std::span<const NounCompound> train_set,
                                 std::span<const NounCompound> val_set,
                                 CompositionKind kind, const TrainConfig& config);

/// A compound paired with one paraphrase token sequence.
struct ParaphrasePair {
  NounCompound compound;
  std::vector<std::string> paraphrase;
};

/// Margin training of one LSTM shared between compounds and
/// paraphrases; negatives are re-sampled each epoch from other
/// compounds' paraphrases. Falls back to the training pairs for
/// validation when `val_pairs` is empty.
TrainOutcome train_paraphrase(const EmbeddingSpace& space,
                              std::span<const ParaphrasePair> train_pairs,
                              std::span<const ParaphrasePair> val_pairs,
                              const TrainConfig& config);

/// Batch mean of the active loss; shared by training and gradient checks.
double batch_loss(const CompositionModel& model,
                  std::span<const ComposeExample> batch, Distance distance);
double batch_loss(const CompositionModel& model,
                  std::span<const TripleExample> batch, double margin);

/// Analytic batch-mean gradients, same layout as param_spans(model).
CompositionModel batch_gradients(const CompositionModel& model,
                                 std::span<const ComposeExample> batch,
                                 Distance distance, double* loss_out = nullptr);
CompositionModel batch_gradients(const CompositionModel& model,
                                 std::span<const TripleExample> batch,
                                 double margin, double* loss_out = nullptr);

// Central-difference verification of the manual backprop. Returns the
// max over parameters of |a - n| / max(|a|, |n|, 1e-8).
double gradient_check(const CompositionModel& model,
                      std::span<const ComposeExample> batch, Distance distance,
                      double step);
double gradient_check(const CompositionModel& model,
                      std::span<const TripleExample> batch, double margin,
                      double step);

struct CompoundSplit {
  std::vector<NounCompound> train;
  std::vector<NounCompound> val;
  std::vector<NounCompound> test;
};

/// Seeded shuffle + largest-remainder partition; ratios must sum to 1.
CompoundSplit split_compounds(std::span<const NounCompound> compounds,
                              const std::array<double, 3>& ratios,
                              std::uint64_t seed);

} // namespace ncemb
