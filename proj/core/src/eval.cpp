#include "ncemb/eval.hpp"

#include "ncemb/error.hpp"
#include "ncemb/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace ncemb {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

/// Largest-remainder apportionment of n items over the given ratios;
/// ties go to the earlier fold.
std::vector<std::size_t> apportion(std::size_t n, std::span<const double> ratios) {
  std::vector<std::size_t> counts(ratios.size(), 0);
  std::vector<double> fractional(ratios.size(), 0.0);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double exact = ratios[i] * static_cast<double>(n);
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    fractional[i] = exact - std::floor(exact);
    assigned += counts[i];
  }
  while (assigned < n) {
    std::size_t pick = 0;
    for (std::size_t i = 1; i < ratios.size(); ++i) {
      if (fractional[i] > fractional[pick]) pick = i;
    }
    ++counts[pick];
    fractional[pick] = -1.0;
    ++assigned;
  }
  return counts;
}

double sigmoid_scalar(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct BinaryFitResult {
  Eigen::VectorXd w;
  double b = 0.0;
  std::vector<double> loss_curve;
};

// Full-batch gradient descent on mean log(1 + exp(-y z)) + l2 ||w||^2;
// the bias is unregularized. Deterministic: zero init, fixed order.
BinaryFitResult fit_logistic(const Eigen::MatrixXd& x, const std::vector<int>& y,
                             double l2, int epochs, double lr, bool record_curve) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  BinaryFitResult r;
  r.w = Eigen::VectorXd::Zero(d);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    Eigen::VectorXd grad_w = 2.0 * l2 * r.w;
    double grad_b = 0.0;
    double loss = l2 * r.w.squaredNorm();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double yi = static_cast<double>(y[i]);
      const double z = x.row(i).dot(r.w) + r.b;
      const double m = yi * z;
      // log(1+exp(-m)) computed stably.
      loss += (m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m))) /
              static_cast<double>(n);
      const double coeff = -yi * sigmoid_scalar(-m) / static_cast<double>(n);
      grad_w += coeff * x.row(i).transpose();
      grad_b += coeff;
    }
    if (record_curve) r.loss_curve.push_back(loss);
    r.w -= lr * grad_w;
    r.b -= lr * grad_b;
  }
  return r;
}

/// Subgradient descent on mean hinge + l2 ||w||^2.
BinaryFitResult fit_svm(const Eigen::MatrixXd& x, const std::vector<int>& y, double l2,
                        int epochs, double lr) {
  const Eigen::Index n = x.rows();
  BinaryFitResult r;
  r.w = Eigen::VectorXd::Zero(x.cols());
  for (int epoch = 0; epoch < epochs; ++epoch) {
    Eigen::VectorXd grad_w = 2.0 * l2 * r.w;
    double grad_b = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double yi = static_cast<double>(y[i]);
      const double z = x.row(i).dot(r.w) + r.b;
      if (1.0 - yi * z > 0.0) {
        grad_w -= yi / static_cast<double>(n) * x.row(i).transpose();
        grad_b -= yi / static_cast<double>(n);
      }
    }
    r.w -= lr * grad_w;
    r.b -= lr * grad_b;
  }
  return r;
}

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, support = 0;
};

ClassMetrics metrics_from(const Confusion& c) {
  ClassMetrics m;
  m.support = c.support;
  m.precision = (c.tp + c.fp) == 0 ? 0.0
                                   : static_cast<double>(c.tp) /
                                         static_cast<double>(c.tp + c.fp);
  m.recall = (c.tp + c.fn) == 0
                 ? 0.0
                 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

bool grid_point_preferred(const GridPoint& a, const GridPoint& b) {
  // tie-break order: smaller l2 wins, then logistic before svm.
  if (a.l2 != b.l2) return a.l2 < b.l2;
  return static_cast<int>(a.family) < static_cast<int>(b.family);
}

} // namespace

std::string to_string(ClassifierFamily f) {
  return f == ClassifierFamily::logistic_regression ? "logistic_regression" : "linear_svm";
}

std::string to_string(SplitKind s) {
  return s == SplitKind::random_split ? "random" : "lexical";
}

std::string to_string(Granularity g) { return g == Granularity::coarse ? "coarse" : "fine"; }

double stable_learning_rate(const Eigen::MatrixXd& x, double l2) {
  double max_sq = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    max_sq = std::max(max_sq, x.row(i).squaredNorm() + 1.0); // +1 for the bias column
  }
  const double lipschitz = 0.25 * max_sq + 2.0 * l2;
  return lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;
}

LinearClassifier fit_linear(ClassifierFamily family, const Eigen::MatrixXd& x,
                            const std::vector<std::string>& labels, double l2,
                            const ClassifierOptions& options) {
  if (x.rows() == 0) throw EvalError("fit_linear: empty training set");
  if (static_cast<std::size_t>(x.rows()) != labels.size()) {
    throw EvalError("fit_linear: row/label count mismatch");
  }
  if (l2 < 0.0) throw ConfigError("fit_linear: l2 must be non-negative");

  std::set<std::string> class_set(labels.begin(), labels.end());
  if (class_set.size() < 2) {
    throw EvalError("fit_linear: training data has a single class");
  }

  LinearClassifier clf;
  clf.family = family;
  clf.l2 = l2;
  clf.classes.assign(class_set.begin(), class_set.end());
  clf.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(clf.classes.size()), x.cols());
  clf.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(clf.classes.size()));

  const double lr =
      options.learning_rate > 0.0 ? options.learning_rate : stable_learning_rate(x, l2);

  // One-vs-rest per class.
  for (std::size_t c = 0; c < clf.classes.size(); ++c) {
    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      y[i] = labels[i] == clf.classes[c] ? 1 : -1;
    }
    const BinaryFitResult fit =
        family == ClassifierFamily::logistic_regression
            ? fit_logistic(x, y, l2, options.epochs, lr, /*record_curve=*/false)
            : fit_svm(x, y, l2, options.epochs, lr);
    clf.weights.row(static_cast<Eigen::Index>(c)) = fit.w.transpose();
    clf.bias(static_cast<Eigen::Index>(c)) = fit.b;
  }
  return clf;
}

std::vector<double> logistic_loss_curve(const Eigen::MatrixXd& x,
                                        const std::vector<int>& targets, double l2,
                                        const ClassifierOptions& options) {
  const double lr =
      options.learning_rate > 0.0 ? options.learning_rate : stable_learning_rate(x, l2);
  return fit_logistic(x, targets, l2, options.epochs, lr, /*record_curve=*/true).loss_curve;
}

std::string predict_one(const LinearClassifier& clf, const Eigen::VectorXd& v) {
  if (v.size() != clf.weights.cols()) {
    throw EvalError("predict: vector length " + std::to_string(v.size()) +
                    " does not match classifier dimension " +
                    std::to_string(clf.weights.cols()));
  }
  const Eigen::VectorXd scores = clf.weights * v + clf.bias;
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < scores.size(); ++c) {
    if (scores(c) > scores(best)) best = c; // ties keep the earlier class name
  }
  return clf.classes[static_cast<std::size_t>(best)];
}

std::vector<std::string> predict(const LinearClassifier& clf, const Eigen::MatrixXd& x) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out.push_back(predict_one(clf, x.row(i).transpose()));
  }
  return out;
}

Metrics score(std::span<const std::string> gold, std::span<const std::string> predicted,
              Averaging averaging, const std::string& positive_label) {
  if (gold.size() != predicted.size()) throw EvalError("score: length mismatch");
  if (gold.empty()) throw EvalError("score: empty label sequences");

  std::map<std::string, Confusion> confusion;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++confusion[gold[i]].support;
    if (gold[i] == predicted[i]) {
      ++confusion[gold[i]].tp;
    } else {
      ++confusion[gold[i]].fn;
      ++confusion[predicted[i]].fp;
    }
  }

  Metrics metrics;
  for (const auto& [label, c] : confusion) {
    if (c.support == 0) continue; // predicted-only labels carry no class row
    metrics.per_class[label] = metrics_from(c);
  }

  if (averaging == Averaging::binary_positive) {
    const auto it = confusion.find(positive_label);
    const ClassMetrics m = it == confusion.end() ? ClassMetrics{} : metrics_from(it->second);
    metrics.precision = m.precision;
    metrics.recall = m.recall;
    metrics.f1 = m.f1;
    return metrics;
  }

  if (metrics.per_class.empty()) throw EvalError("score: no gold classes");
  for (const auto& [_, m] : metrics.per_class) {
    metrics.precision += m.precision;
    metrics.recall += m.recall;
    metrics.f1 += m.f1;
  }
  const double k = static_cast<double>(metrics.per_class.size());
  metrics.precision /= k;
  metrics.recall /= k;
  metrics.f1 /= k;
  return metrics;
}

std::vector<GridPoint> default_grid() {
  std::vector<GridPoint> grid;
  for (const auto family :
       {ClassifierFamily::logistic_regression, ClassifierFamily::linear_svm}) {
    for (const double l2 : {0.0001, 0.001, 0.01, 0.1, 1.0}) {
      grid.push_back({family, l2});
    }
  }
  return grid;
}

std::pair<LinearClassifier, SelectionRecord> train_classifier(
    const Eigen::MatrixXd& train_x, const std::vector<std::string>& train_y,
    const Eigen::MatrixXd& val_x, const std::vector<std::string>& val_y,
    std::span<const GridPoint> grid, Averaging averaging, const std::string& positive_label,
    const ClassifierOptions& options) {
  if (grid.empty()) throw EvalError("train_classifier: empty grid");
  if (val_y.empty()) throw EvalError("train_classifier: empty validation set");

  SelectionRecord record;
  std::optional<LinearClassifier> best;
  double best_f1 = -1.0;
  for (const auto& point : grid) {
    LinearClassifier clf = fit_linear(point.family, train_x, train_y, point.l2, options);
    const auto predictions = predict(clf, val_x);
    const double f1 = score(val_y, predictions, averaging, positive_label).f1;
    record.tried.emplace_back(point, f1);
    const bool better =
        f1 > best_f1 ||
        (f1 == best_f1 && best && grid_point_preferred(point, record.chosen));
    if (!best || better) {
      best = std::move(clf);
      best_f1 = f1;
      record.chosen = point;
      record.validation_f1 = f1;
    }
  }
  return {std::move(*best), std::move(record)};
}

LexicalSplit lexical_split(std::span<const NounCompound> compounds,
                           const std::array<double, 3>& ratios, std::uint64_t seed,
                           int max_attempts) {
  double sum = 0.0;
  for (const double r : ratios) {
    if (r < 0.0) throw ConfigError("lexical_split: ratios must be non-negative");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("lexical_split: ratios must sum to 1");
  if (compounds.empty()) throw EvalError("lexical_split: no compounds");
  if (max_attempts < 1) throw ConfigError("lexical_split: max_attempts must be >= 1");

  // Deterministic constituent vocabulary (sorted, then seeded shuffles).
  std::set<std::string> vocab_set;
  for (const auto& nc : compounds) {
    vocab_set.insert(nc.w1);
    vocab_set.insert(nc.w2);
  }
  const std::vector<std::string> vocab(vocab_set.begin(), vocab_set.end());

  double best_retention = 0.0;
  std::array<std::size_t, 3> last_sizes{};
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<NounCompound> shuffled(compounds.begin(), compounds.end());
    Rng rng(derive_seed(seed, "lexical/" + std::to_string(attempt)));
    rng.shuffle(shuffled);

    // Greedy constituent assignment toward the target ratios, driven by
    // the compound order: a compound with no assigned constituent claims
    // the most-deficient fold for both, a half-assigned compound keeps
    // its pair together when it can. Compounds whose constituents still
    // end up apart are discarded, so folds never share a constituent.
    std::unordered_map<std::string, int> fold_of;
    std::array<double, 3> assigned{};
    auto most_deficient = [&] {
      int pick = 0;
      double best_deficit = -1.0;
      for (int f = 0; f < 3; ++f) {
        const double deficit =
            ratios[f] * static_cast<double>(vocab.size()) - assigned[f];
        if (deficit > best_deficit) {
          best_deficit = deficit;
          pick = f;
        }
      }
      return pick;
    };
    for (const auto& nc : shuffled) {
      const auto it1 = fold_of.find(nc.w1);
      const auto it2 = fold_of.find(nc.w2);
      if (it1 == fold_of.end() && it2 == fold_of.end()) {
        const int fold = most_deficient();
        fold_of[nc.w1] = fold;
        fold_of[nc.w2] = fold;
        assigned[fold] += nc.w1 == nc.w2 ? 1.0 : 2.0;
      } else if (it1 == fold_of.end()) {
        fold_of[nc.w1] = it2->second;
        assigned[it2->second] += 1.0;
      } else if (it2 == fold_of.end()) {
        fold_of[nc.w2] = it1->second;
        assigned[it1->second] += 1.0;
      }
    }

    LexicalSplit split;
    split.attempts = attempt + 1;
    for (const auto& nc : compounds) {
      const int f1 = fold_of[nc.w1];
      if (f1 != fold_of[nc.w2]) {
        ++split.discarded;
        continue;
      }
      (f1 == 0 ? split.train : f1 == 1 ? split.val : split.test).push_back(nc);
    }

    const double retention =
        1.0 - static_cast<double>(split.discarded) / static_cast<double>(compounds.size());
    best_retention = std::max(best_retention, retention);
    last_sizes = {split.train.size(), split.val.size(), split.test.size()};
    if (retention >= 0.5 && !split.train.empty() && !split.val.empty() &&
        !split.test.empty()) {
      return split;
    }
  }

  std::ostringstream msg;
  msg << "lexical split failed after " << max_attempts << " attempts: best retention "
      << best_retention << ", last fold sizes " << last_sizes[0] << "/" << last_sizes[1]
      << "/" << last_sizes[2]
      << " (shared constituents force straddling or an empty fold)";
  throw EvalError(msg.str());
}

std::map<std::string, std::vector<PropertyInstance>> parse_property_file(std::istream& in) {
  std::map<std::string, std::vector<PropertyInstance>> datasets;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw ParseError("expected \"item\\tproperty\\t{1|0}\": " + line, line_no);
    }
    if (fields[2] != "0" && fields[2] != "1") {
      throw ParseError("label must be 0 or 1, got \"" + fields[2] + "\"", line_no);
    }
    datasets[fields[1]].push_back({fields[0], fields[2] == "1"});
  }
  return datasets;
}

std::map<std::string, std::vector<PropertyInstance>> parse_property_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingResourceError("cannot open property file: " + path);
  return parse_property_file(in);
}

std::vector<RelationInstance> parse_relation_file(std::istream& in) {
  std::vector<RelationInstance> instances;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw ParseError("expected \"w1\\tw2\\tfine\\tcoarse\": " + line, line_no);
    }
    try {
      instances.push_back({NounCompound(fields[0], fields[1]), fields[2], fields[3]});
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
    if (fields[2].empty() || fields[3].empty()) {
      throw ParseError("empty relation label", line_no);
    }
  }
  return instances;
}

std::vector<RelationInstance> parse_relation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingResourceError("cannot open relation file: " + path);
  return parse_relation_file(in);
}

const std::vector<std::string>& excluded_relations() {
  static const std::vector<std::string> excluded{"lexicalized", "personal_name",
                                                 "personal_title"};
  return excluded;
}

namespace {

bool is_compound_item(const std::string& item) {
  return item.find('_') != std::string::npos;
}

struct VectorRows {
  Eigen::MatrixXd x;
  std::vector<std::string> y;
};

VectorRows to_matrix(const std::vector<std::pair<Eigen::VectorXd, std::string>>& rows,
                     Eigen::Index dim) {
  VectorRows out;
  out.x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), dim);
  out.y.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = rows[i].first.transpose();
    out.y.push_back(rows[i].second);
  }
  return out;
}

} // namespace

std::map<std::string, PropertyEvalResult> property_eval(
    const VectorProvider& provider, const EmbeddingSpace& space,
    const std::map<std::string, std::vector<PropertyInstance>>& datasets,
    std::uint64_t seed, std::span<const GridPoint> grid,
    const ClassifierOptions& options) {
  std::map<std::string, PropertyEvalResult> results;

  for (const auto& [property, instances] : datasets) {
    std::vector<PropertyInstance> words;
    std::vector<PropertyInstance> compounds;
    for (const auto& inst : instances) {
      (is_compound_item(inst.item) ? compounds : words).push_back(inst);
    }

    Rng rng(derive_seed(seed, "property/" + property));
    rng.shuffle(words);
    rng.shuffle(compounds);

    // Words 90/10 into train/validation; compounds 20/20/60.
    const std::array<double, 2> word_ratios{0.9, 0.1};
    const std::array<double, 3> nc_ratios{0.2, 0.2, 0.6};
    const auto word_counts = apportion(words.size(), word_ratios);
    const auto nc_counts = apportion(compounds.size(), nc_ratios);

    PropertyEvalResult result;
    std::vector<std::pair<Eigen::VectorXd, std::string>> train_rows;
    std::vector<std::pair<Eigen::VectorXd, std::string>> val_rows;

    auto add_word = [&](const PropertyInstance& inst, auto& rows) {
      if (const auto v = space.lookup(inst.item)) {
        rows.emplace_back(*v, inst.positive ? "1" : "0");
      } else {
        ++result.dropped_train;
      }
    };
    auto add_compound = [&](const PropertyInstance& inst, auto& rows) {
      const auto nc = compound_from_surface(inst.item);
      if (!nc) {
        ++result.dropped_train;
        return;
      }
      if (const auto v = provider.vector_for(*nc)) {
        rows.emplace_back(*v, inst.positive ? "1" : "0");
      } else {
        ++result.dropped_train;
      }
    };

    for (std::size_t i = 0; i < words.size(); ++i) {
      add_word(words[i], i < word_counts[0] ? train_rows : val_rows);
    }
    std::vector<PropertyInstance> test;
    for (std::size_t i = 0; i < compounds.size(); ++i) {
      if (i < nc_counts[0]) {
        add_compound(compounds[i], train_rows);
      } else if (i < nc_counts[0] + nc_counts[1]) {
        add_compound(compounds[i], val_rows);
      } else {
        test.push_back(compounds[i]);
      }
    }

    if (test.empty()) throw EvalError("property \"" + property + "\": empty test set");
    if (std::none_of(test.begin(), test.end(),
                     [](const PropertyInstance& i) { return i.positive; })) {
      throw EvalError("property \"" + property + "\" has no positive test instances");
    }
    if (train_rows.empty() || val_rows.empty()) {
      throw EvalError("property \"" + property + "\": empty train or validation fold");
    }

    const auto train = to_matrix(train_rows, space.dim());
    const auto val = to_matrix(val_rows, space.dim());
    auto [clf, selection] =
        train_classifier(train.x, train.y, val.x, val.y, grid,
                         Averaging::binary_positive, "1", options);

    std::vector<std::string> gold;
    std::vector<std::string> predicted;
    for (const auto& inst : test) {
      gold.push_back(inst.positive ? "1" : "0");
      const auto nc = compound_from_surface(inst.item);
      const auto v = nc ? provider.vector_for(*nc) : std::nullopt;
      if (!v) {
        // Unrepresentable items face the same test set as everyone else:
        // they are scored as predicted-negative, not dropped.
        predicted.push_back("0");
        ++result.oov_forced_negative;
        continue;
      }
      predicted.push_back(predict_one(clf, *v));
    }

    result.metrics = score(gold, predicted, Averaging::binary_positive, "1");
    result.selection = std::move(selection);
    result.test_size = test.size();
    results.emplace(property, std::move(result));
  }
  return results;
}

RelationEvalResult relation_eval(const VectorProvider& provider,
                                 std::span<const RelationInstance> instances,
                                 SplitKind split, Granularity granularity,
                                 std::uint64_t seed, std::span<const GridPoint> grid,
                                 const ClassifierOptions& options) {
  // Excluded relations are dropped before any splitting.
  std::vector<RelationInstance> kept;
  kept.reserve(instances.size());
  for (const auto& inst : instances) {
    const std::string fine = lower(inst.fine_label);
    if (std::find(excluded_relations().begin(), excluded_relations().end(), fine) !=
        excluded_relations().end()) {
      continue;
    }
    kept.push_back(inst);
  }
  if (kept.size() < 3) throw EvalError("relation_eval: too few instances after exclusions");

  std::unordered_map<std::string, const RelationInstance*> by_surface;
  std::vector<NounCompound> compounds;
  compounds.reserve(kept.size());
  for (const auto& inst : kept) {
    if (by_surface.emplace(inst.compound.surface(), &inst).second) {
      compounds.push_back(inst.compound);
    }
  }

  std::vector<NounCompound> train_fold, val_fold, test_fold;
  RelationEvalResult result;
  if (split == SplitKind::random_split) {
    auto folds = split_compounds(compounds, {0.8, 0.1, 0.1}, derive_seed(seed, "relation"));
    train_fold = std::move(folds.train);
    val_fold = std::move(folds.val);
    test_fold = std::move(folds.test);
  } else {
    auto folds = lexical_split(compounds, {0.8, 0.1, 0.1}, derive_seed(seed, "relation"));
    train_fold = std::move(folds.train);
    val_fold = std::move(folds.val);
    test_fold = std::move(folds.test);
    result.discarded_split = folds.discarded;
  }

  auto label_of = [&](const NounCompound& nc) -> const std::string& {
    const RelationInstance* inst = by_surface.at(nc.surface());
    return granularity == Granularity::coarse ? inst->coarse_label : inst->fine_label;
  };

  std::vector<std::pair<Eigen::VectorXd, std::string>> train_rows;
  std::vector<std::pair<Eigen::VectorXd, std::string>> val_rows;
  Eigen::Index dim = -1;
  auto add_row = [&](const NounCompound& nc, auto& rows) {
    if (const auto v = provider.vector_for(nc)) {
      dim = v->size();
      rows.emplace_back(*v, label_of(nc));
    } else {
      ++result.dropped_train;
    }
  };
  for (const auto& nc : train_fold) add_row(nc, train_rows);
  for (const auto& nc : val_fold) add_row(nc, val_rows);
  if (train_rows.empty() || val_rows.empty()) {
    throw EvalError("relation_eval: empty train or validation fold after OOV drops");
  }

  const auto train = to_matrix(train_rows, dim);
  const auto val = to_matrix(val_rows, dim);
  auto [clf, selection] =
      train_classifier(train.x, train.y, val.x, val.y, grid, Averaging::macro, "1", options);

  std::vector<std::string> gold;
  std::vector<std::string> predicted;
  for (const auto& nc : test_fold) {
    gold.push_back(label_of(nc));
    if (const auto v = provider.vector_for(nc)) {
      predicted.push_back(predict_one(clf, *v));
    } else {
      // Counted as misclassified: the reserved label never matches gold.
      predicted.push_back("__unavailable__");
      ++result.oov_forced_wrong;
    }
  }
  if (gold.empty()) throw EvalError("relation_eval: empty test fold");

  result.metrics = score(gold, predicted, Averaging::macro);
  result.selection = std::move(selection);
  result.test_size = test_fold.size();
  return result;
}

void write_metrics_report(const Metrics& metrics, const SelectionRecord& selection,
                          std::ostream& out) {
  out << "class\tprecision\trecall\tf1\tsupport\n";
  std::ostringstream num;
  num.precision(6);
  auto fmt = [&](double v) {
    num.str("");
    num << v;
    return num.str();
  };
  for (const auto& [label, m] : metrics.per_class) {
    out << label << '\t' << fmt(m.precision) << '\t' << fmt(m.recall) << '\t' << fmt(m.f1)
        << '\t' << m.support << '\n';
  }
  nlohmann::json summary{
      {"precision", metrics.precision},
      {"recall", metrics.recall},
      {"f1", metrics.f1},
      {"selection",
       {{"family", to_string(selection.chosen.family)},
        {"l2", selection.chosen.l2},
        {"validation_f1", selection.validation_f1}}},
  };
  out << "#summary\t" << summary.dump() << '\n';
}

} // namespace ncemb
