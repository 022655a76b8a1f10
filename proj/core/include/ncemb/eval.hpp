#pragma once

#include "ncemb/embeddings.hpp"
#include "ncemb/provider.hpp"
#include "ncemb/train.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ncemb {

enum class ClassifierFamily { logistic_regression, linear_svm };
std::string to_string(ClassifierFamily f);

struct LinearClassifier {
  ClassifierFamily family = ClassifierFamily::logistic_regression;
  std::vector<std::string> classes; // sorted; one-vs-rest row per class
  Eigen::MatrixXd weights;          // classes x d
  Eigen::VectorXd bias;             // per class
  double l2 = 0.0;
};

struct ClassifierOptions {
  int epochs = 300;
  double learning_rate = 0.0; // 0 -> stable_learning_rate(X, l2)
};

// Full-batch gradient descent at or below this rate keeps the logistic
// cross-entropy + L2 objective non-increasing (1 / Lipschitz bound of
// the gradient, bias column included).
double stable_learning_rate(const Eigen::MatrixXd& x, double l2);

LinearClassifier fit_linear(ClassifierFamily family, const Eigen::MatrixXd& x,
                            const std::vector<std::string>& labels, double l2,
                            const ClassifierOptions& options = {});

/// Per-epoch objective values for one one-vs-rest logistic problem;
/// exposed for the monotonicity property.
std::vector<double> logistic_loss_curve(const Eigen::MatrixXd& x,
                                        const std::vector<int>& targets,
                                        double l2, const ClassifierOptions& options);

/// argmax of class scores, ties to the earliest class name.
std::vector<std::string> predict(const LinearClassifier& clf, const Eigen::MatrixXd& x);
std::string predict_one(const LinearClassifier& clf, const Eigen::VectorXd& v);

enum class Averaging { binary_positive, macro };

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct Metrics {
  std::map<std::string, ClassMetrics> per_class; // classes observed in gold
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// binary_positive reports the positive class only; macro averages the
// per-class scores of the classes observed in gold, unweighted. Classes
// with no predicted positives take precision 0.
Metrics score(std::span<const std::string> gold, std::span<const std::string> predicted,
              Averaging averaging, const std::string& positive_label = "1");

struct GridPoint {
  ClassifierFamily family = ClassifierFamily::logistic_regression;
  double l2 = 0.0;
};

/// {1e-4 ... 1} x {logistic, svm}.
std::vector<GridPoint> default_grid();

struct SelectionRecord {
  GridPoint chosen;
  double validation_f1 = 0.0;
  std::vector<std::pair<GridPoint, double>> tried; // grid order, with val F1
};

/// Trains every grid point and keeps the best validation F1; ties go to
/// the smaller l2, then to the earlier family.
std::pair<LinearClassifier, SelectionRecord> train_classifier(
    const Eigen::MatrixXd& train_x, const std::vector<std::string>& train_y,
    const Eigen::MatrixXd& val_x, const std::vector<std::string>& val_y,
    std::span<const GridPoint> grid, Averaging averaging,
    const std::string& positive_label = "1",
    const ClassifierOptions& options = {});

struct LexicalSplit {
  std::vector<NounCompound> train;
  std::vector<NounCompound> val;
  std::vector<NounCompound> test;
  std::size_t discarded = 0; // compounds straddling folds
  int attempts = 0;
};

// Assigns the constituent vocabulary to folds, keeps only compounds
// whose two constituents fall in one fold, so folds share no
// constituents by construction. Fails after max_attempts when retention
// stays under 50% or a fold ends up empty.
LexicalSplit lexical_split(std::span<const NounCompound> compounds,
                           const std::array<double, 3>& ratios, std::uint64_t seed,
                           int max_attempts = 20);

struct PropertyInstance {
  std::string item; // word token or compound surface w1_w2
  bool positive = false;
};

/// Property TSV: "item\tproperty\t{1|0}".
std::map<std::string, std::vector<PropertyInstance>> parse_property_file(std::istream& in);
std::map<std::string, std::vector<PropertyInstance>> parse_property_file(const std::string& path);

struct PropertyEvalResult {
  Metrics metrics; // positive class
  SelectionRecord selection;
  std::size_t oov_forced_negative = 0; // test items without a vector
  std::size_t dropped_train = 0;
  std::size_t test_size = 0;
};

// Words split 90/10 into train/validation; compounds 20/20/60 into
// train/validation/test. Word vectors come from the space, compound
// vectors from the provider; unrepresentable test items are scored as
// predicted-negative so every representation faces the same test set.
std::map<std::string, PropertyEvalResult> property_eval(
    const VectorProvider& provider, const EmbeddingSpace& space,
    const std::map<std::string, std::vector<PropertyInstance>>& datasets,
    std::uint64_t seed, std::span<const GridPoint> grid,
    const ClassifierOptions& options = {});

struct RelationInstance {
  NounCompound compound;
  std::string fine_label;
  std::string coarse_label;
};

/// Labeled compounds TSV: "w1\tw2\tfine_label\tcoarse_label".
std::vector<RelationInstance> parse_relation_file(std::istream& in);
std::vector<RelationInstance> parse_relation_file(const std::string& path);

enum class SplitKind { random_split, lexical };
enum class Granularity { coarse, fine };
std::string to_string(SplitKind s);
std::string to_string(Granularity g);

/// Fine-grained relations excluded before splitting (non-compositional
/// or named-entity classes, consumed as data from the label file).
const std::vector<std::string>& excluded_relations();

struct RelationEvalResult {
  Metrics metrics; // macro plus per-relation
  SelectionRecord selection;
  std::size_t oov_forced_wrong = 0;
  std::size_t dropped_train = 0;
  std::size_t discarded_split = 0;
  std::size_t test_size = 0;
};

// Multiclass one-vs-rest over the compound vector only. Test compounds
// without a vector count as misclassified rather than being dropped.
RelationEvalResult relation_eval(const VectorProvider& provider,
                                 std::span<const RelationInstance> instances,
                                 SplitKind split, Granularity granularity,
                                 std::uint64_t seed, std::span<const GridPoint> grid,
                                 const ClassifierOptions& options = {});

/// Per-class TSV rows plus a JSON summary line with selection provenance.
void write_metrics_report(const Metrics& metrics, const SelectionRecord& selection,
                          std::ostream& out);

} // namespace ncemb
