#include "ncemb/train.hpp"

#include "ncemb/error.hpp"
#include "ncemb/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <unordered_set>

namespace ncemb {

namespace {

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw DegenerateInputError("cosine of a zero-norm vector is undefined");
  }
  return a.dot(b) / (na * nb);
}

/// d cos(a, b) / d a.
Eigen::VectorXd cosine_grad_wrt_first(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw DegenerateInputError("cosine of a zero-norm vector is undefined");
  }
  const double cos_ab = a.dot(b) / (na * nb);
  return b / (na * nb) - cos_ab * a / (na * na);
}

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) {
  return ((-z.array()).exp() + 1.0).inverse();
}

// Per-step forward cache for backpropagation through time.
struct LstmStep {
  Eigen::VectorXd x, h_prev, c_prev;
  Eigen::VectorXd i, f, o, g, c, tc;
};

struct LstmTrace {
  std::vector<LstmStep> steps;
  Eigen::VectorXd output; // final hidden state
};

LstmTrace lstm_forward(const LstmParams& p, std::span<const Eigen::VectorXd> sequence) {
  const Eigen::Index d = p.wi.rows();
  LstmTrace trace;
  trace.steps.reserve(sequence.size());
  Eigen::VectorXd h = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
  for (const auto& x : sequence) {
    LstmStep s;
    s.x = x;
    s.h_prev = h;
    s.c_prev = c;
    s.i = sigmoid(p.wi * x + p.ui * h + p.bi);
    s.f = sigmoid(p.wf * x + p.uf * h + p.bf);
    s.o = sigmoid(p.wo * x + p.uo * h + p.bo);
    s.g = (p.wc * x + p.uc * h + p.bc).array().tanh();
    s.c = s.f.cwiseProduct(c) + s.i.cwiseProduct(s.g);
    s.tc = s.c.array().tanh();
    h = s.o.cwiseProduct(s.tc);
    c = s.c;
    trace.steps.push_back(std::move(s));
  }
  trace.output = h;
  return trace;
}

/// Accumulates dL/dparams into `grads` given dL/d(final hidden state).
void lstm_backward(const LstmParams& p, const LstmTrace& trace,
                   const Eigen::VectorXd& d_output, LstmParams& grads) {
  Eigen::VectorXd dh = d_output;
  Eigen::VectorXd dc = Eigen::VectorXd::Zero(d_output.size());
  for (auto it = trace.steps.rbegin(); it != trace.steps.rend(); ++it) {
    const LstmStep& s = *it;
    const Eigen::VectorXd dzo =
        dh.cwiseProduct(s.tc).cwiseProduct(s.o).cwiseProduct((1.0 - s.o.array()).matrix());
    dc += dh.cwiseProduct(s.o).cwiseProduct((1.0 - s.tc.array().square()).matrix());
    const Eigen::VectorXd dzi =
        dc.cwiseProduct(s.g).cwiseProduct(s.i).cwiseProduct((1.0 - s.i.array()).matrix());
    const Eigen::VectorXd dzc =
        dc.cwiseProduct(s.i).cwiseProduct((1.0 - s.g.array().square()).matrix());
    const Eigen::VectorXd dzf =
        dc.cwiseProduct(s.c_prev).cwiseProduct(s.f).cwiseProduct((1.0 - s.f.array()).matrix());

    grads.wi += dzi * s.x.transpose();
    grads.ui += dzi * s.h_prev.transpose();
    grads.bi += dzi;
    grads.wf += dzf * s.x.transpose();
    grads.uf += dzf * s.h_prev.transpose();
    grads.bf += dzf;
    grads.wo += dzo * s.x.transpose();
    grads.uo += dzo * s.h_prev.transpose();
    grads.bo += dzo;
    grads.wc += dzc * s.x.transpose();
    grads.uc += dzc * s.h_prev.transpose();
    grads.bc += dzc;

    dh = p.ui.transpose() * dzi + p.uf.transpose() * dzf + p.uo.transpose() * dzo +
         p.uc.transpose() * dzc;
    dc = dc.cwiseProduct(s.f);
  }
}

/// dL/d(composed) for one compositional example.
Eigen::VectorXd loss_grad_wrt_composed(const Eigen::VectorXd& composed,
                                       const Eigen::VectorXd& observed, Distance distance) {
  if (distance == Distance::mse) {
    return 2.0 / static_cast<double>(composed.size()) * (composed - observed);
  }
  return -cosine_grad_wrt_first(composed, observed);
}

/// Backprop one example's output gradient into the parameter holder.
void accumulate_example(const CompositionModel& model, const Eigen::VectorXd& v1,
                        const Eigen::VectorXd& v2, const Eigen::VectorXd& g_out,
                        CompositionModel& grads) {
  switch (model.kind) {
    case CompositionKind::add: {
      auto& g = grads.add();
      g.alpha += g_out.dot(v1);
      g.beta += g_out.dot(v2);
      break;
    }
    case CompositionKind::full_add: {
      auto& g = grads.full_add();
      g.w1 += g_out * v1.transpose();
      g.w2 += g_out * v2.transpose();
      break;
    }
    case CompositionKind::matrix: {
      const auto& p = model.matrix();
      Eigen::VectorXd concat(v1.size() + v2.size());
      concat << v1, v2;
      const Eigen::VectorXd y = (p.w.transpose() * concat).array().tanh();
      const Eigen::VectorXd dpre = g_out.cwiseProduct((1.0 - y.array().square()).matrix());
      grads.matrix().w += concat * dpre.transpose();
      break;
    }
    case CompositionKind::lstm: {
      const std::vector<Eigen::VectorXd> seq{v1, v2};
      const LstmTrace trace = lstm_forward(model.lstm(), seq);
      lstm_backward(model.lstm(), trace, g_out, grads.lstm());
      break;
    }
  }
}

Eigen::VectorXd maybe_normalize(Eigen::VectorXd v, bool normalize) {
  if (normalize) {
    const double n = v.norm();
    if (n > 0.0) v /= n;
  }
  return v;
}

} // namespace

std::string to_string(Objective o) {
  return o == Objective::compositional ? "compositional" : "paraphrase";
}

std::string to_string(Distance d) { return d == Distance::mse ? "mse" : "cosine"; }

Objective objective_from_string(const std::string& name) {
  if (name == "compositional") return Objective::compositional;
  if (name == "paraphrase") return Objective::paraphrase;
  throw ConfigError("unknown objective: " + name);
}

Distance distance_from_string(const std::string& name) {
  if (name == "mse") return Distance::mse;
  if (name == "cosine") return Distance::cosine;
  throw ConfigError("unknown distance: " + name);
}

double TrainConfig::resolved_learning_rate(CompositionKind kind) const {
  if (learning_rate) return *learning_rate;
  return kind == CompositionKind::lstm ? 0.01 : 0.05;
}

bool TrainConfig::resolved_normalize_inputs() const {
  if (normalize_inputs) return *normalize_inputs;
  return objective == Objective::paraphrase;
}

void TrainConfig::validate(CompositionKind kind) const {
  if (resolved_learning_rate(kind) <= 0.0) throw ConfigError("learning_rate must be > 0");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (objective == Objective::paraphrase) {
    if (!(margin > 0.0 && margin <= 2.0)) throw ConfigError("margin must be in (0, 2]");
    if (negatives_per_positive < 1) {
      throw ConfigError("negatives_per_positive must be >= 1");
    }
    if (kind != CompositionKind::lstm) {
      throw ConfigError("the paraphrase objective trains an lstm encoder");
    }
  }
  if (early_stop_patience < 0) throw ConfigError("early_stop_patience must be >= 0");
}

void TrainHistory::write_log(std::ostream& out) const {
  for (std::size_t e = 0; e < train_loss.size(); ++e) {
    out << e << '\t' << train_loss[e] << '\t' << val_loss[e] << '\n';
  }
}

double compositional_loss(const Eigen::VectorXd& composed, const Eigen::VectorXd& observed,
                          Distance distance) {
  if (composed.size() != observed.size()) {
    throw Error("compositional_loss: length mismatch");
  }
  if (distance == Distance::mse) {
    return (composed - observed).squaredNorm() / static_cast<double>(composed.size());
  }
  return 1.0 - cosine(composed, observed);
}

double margin_loss(const Eigen::VectorXd& v_nc, const Eigen::VectorXd& v_p,
                   const Eigen::VectorXd& v_neg, double margin) {
  return std::max(0.0, margin - cosine(v_nc, v_p) + cosine(v_nc, v_neg));
}

double batch_loss(const CompositionModel& model, std::span<const ComposeExample> batch,
                  Distance distance) {
  if (batch.empty()) throw Error("batch_loss: empty batch");
  double total = 0.0;
  for (const auto& ex : batch) {
    total += compositional_loss(compose(model, ex.v1, ex.v2), ex.observed, distance);
  }
  return total / static_cast<double>(batch.size());
}

double batch_loss(const CompositionModel& model, std::span<const TripleExample> batch,
                  double margin) {
  if (batch.empty()) throw Error("batch_loss: empty batch");
  const auto& p = model.lstm();
  double total = 0.0;
  for (const auto& t : batch) {
    const Eigen::VectorXd h_nc = compose_lstm(p, t.nc);
    const Eigen::VectorXd h_p = compose_lstm(p, t.positive);
    const Eigen::VectorXd h_neg = compose_lstm(p, t.negative);
    total += margin_loss(h_nc, h_p, h_neg, margin);
  }
  return total / static_cast<double>(batch.size());
}

CompositionModel batch_gradients(const CompositionModel& model,
                                 std::span<const ComposeExample> batch, Distance distance,
                                 double* loss_out) {
  if (batch.empty()) throw Error("batch_gradients: empty batch");
  CompositionModel grads = zeros_like(model);
  double total = 0.0;
  for (const auto& ex : batch) {
    const Eigen::VectorXd composed = compose(model, ex.v1, ex.v2);
    total += compositional_loss(composed, ex.observed, distance);
    accumulate_example(model, ex.v1, ex.v2,
                       loss_grad_wrt_composed(composed, ex.observed, distance), grads);
  }
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (auto span : param_spans(grads)) {
    for (std::size_t i = 0; i < span.size; ++i) span.data[i] *= scale;
  }
  if (loss_out) *loss_out = total * scale;
  return grads;
}

CompositionModel batch_gradients(const CompositionModel& model,
                                 std::span<const TripleExample> batch, double margin,
                                 double* loss_out) {
  if (batch.empty()) throw Error("batch_gradients: empty batch");
  if (model.kind != CompositionKind::lstm) {
    throw Error("margin gradients require an lstm model");
  }
  const auto& p = model.lstm();
  CompositionModel grads = zeros_like(model);
  auto& g = grads.lstm();
  double total = 0.0;
  for (const auto& t : batch) {
    const LstmTrace tr_nc = lstm_forward(p, t.nc);
    const LstmTrace tr_p = lstm_forward(p, t.positive);
    const LstmTrace tr_neg = lstm_forward(p, t.negative);
    const double hinge = margin - cosine(tr_nc.output, tr_p.output) +
                         cosine(tr_nc.output, tr_neg.output);
    if (hinge <= 0.0) continue;
    total += hinge;
    // One shared encoder: the three sequences all backpropagate into g.
    const Eigen::VectorXd d_nc = -cosine_grad_wrt_first(tr_nc.output, tr_p.output) +
                                 cosine_grad_wrt_first(tr_nc.output, tr_neg.output);
    const Eigen::VectorXd d_p = -cosine_grad_wrt_first(tr_p.output, tr_nc.output);
    const Eigen::VectorXd d_neg = cosine_grad_wrt_first(tr_neg.output, tr_nc.output);
    lstm_backward(p, tr_nc, d_nc, g);
    lstm_backward(p, tr_p, d_p, g);
    lstm_backward(p, tr_neg, d_neg, g);
  }
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (auto span : param_spans(grads)) {
    for (std::size_t i = 0; i < span.size; ++i) span.data[i] *= scale;
  }
  if (loss_out) *loss_out = total * scale;
  return grads;
}

namespace {

template <typename Batch, typename LossArg>
double gradient_check_impl(const CompositionModel& model, Batch batch, LossArg arg,
                           double step) {
  if (step <= 0.0) throw Error("gradient_check: step must be positive");
  CompositionModel analytic = batch_gradients(model, batch, arg);
  CompositionModel probe = model;
  auto probe_spans = param_spans(probe);
  auto analytic_spans = param_spans(analytic);

  double worst = 0.0;
  for (std::size_t s = 0; s < probe_spans.size(); ++s) {
    for (std::size_t k = 0; k < probe_spans[s].size; ++k) {
      double& theta = probe_spans[s].data[k];
      const double saved = theta;
      theta = saved + step;
      const double plus = batch_loss(probe, batch, arg);
      theta = saved - step;
      const double minus = batch_loss(probe, batch, arg);
      theta = saved;
      const double numeric = (plus - minus) / (2.0 * step);
      const double a = analytic_spans[s].data[k];
      const double rel =
          std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

} // namespace

double gradient_check(const CompositionModel& model, std::span<const ComposeExample> batch,
                      Distance distance, double step) {
  return gradient_check_impl(model, batch, distance, step);
}

double gradient_check(const CompositionModel& model, std::span<const TripleExample> batch,
                      double margin, double step) {
  return gradient_check_impl(model, batch, margin, step);
}

namespace {

struct EpochRunner {
  // Shared epoch/selection loop for both objectives. `train_epoch` runs
  // one epoch and returns the mean training loss; `val_loss` evaluates
  // the current parameters.
  template <typename TrainEpochFn, typename ValLossFn>
  static void run(CompositionModel& model, const TrainConfig& config,
                  TrainHistory& history, TrainEpochFn train_epoch, ValLossFn val_loss) {
    CompositionModel best = model;
    double best_val = std::numeric_limits<double>::infinity();
    int best_epoch = -1;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      history.train_loss.push_back(train_epoch(epoch));
      const double vl = val_loss();
      history.val_loss.push_back(vl);
      if (vl < best_val) {
        best_val = vl;
        best_epoch = epoch;
        best = model;
      }
      if (config.early_stop_patience > 0 &&
          epoch - best_epoch >= config.early_stop_patience) {
        break;
      }
    }
    if (best_epoch >= 0) {
      model = best;
      history.selected_epoch = best_epoch;
    }
  }
};

void apply_update(CompositionModel& model, const CompositionModel& grads, double lr) {
  auto m = param_spans(model);
  auto g = param_spans(const_cast<CompositionModel&>(grads));
  for (std::size_t s = 0; s < m.size(); ++s) {
    for (std::size_t k = 0; k < m[s].size; ++k) {
      m[s].data[k] -= lr * g[s].data[k];
    }
  }
}

} // namespace

TrainOutcome train_compositional(const EmbeddingSpace& space,
                                 std::span<const NounCompound> train_set,
                                 std::span<const NounCompound> val_set,
                                 CompositionKind kind, const TrainConfig& config) {
  config.validate(kind);
  const bool normalize = config.resolved_normalize_inputs();

  auto collect = [&](std::span<const NounCompound> set, std::size_t& dropped) {
    std::vector<ComposeExample> out;
    out.reserve(set.size());
    for (const auto& nc : set) {
      const auto v1 = space.lookup(nc.w1);
      const auto v2 = space.lookup(nc.w2);
      const auto observed = space.lookup(nc.surface());
      if (!v1 || !v2 || !observed) {
        ++dropped;
        continue;
      }
      out.push_back({maybe_normalize(*v1, normalize), maybe_normalize(*v2, normalize),
                     maybe_normalize(*observed, normalize)});
    }
    return out;
  };

  TrainOutcome outcome;
  const std::vector<ComposeExample> train = collect(train_set, outcome.dropped_train);
  const std::vector<ComposeExample> val = collect(val_set, outcome.dropped_val);
  if (train.empty()) {
    throw TrainError("no trainable compounds: every item had an OOV constituent or "
                     "observed vector");
  }

  outcome.model = init_model(kind, space.dim(), config.seed);
  if (config.epochs == 0) return outcome;

  const double lr = config.resolved_learning_rate(kind);
  Rng shuffle_rng(derive_seed(config.seed, "shuffle"));
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  // Validation falls back to the training loss when no usable val items exist.
  const std::span<const ComposeExample> val_span = val.empty() ? std::span(train) : std::span(val);

  auto train_epoch = [&](int) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<ComposeExample> batch;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) batch.push_back(train[order[i]]);
      double batch_mean = 0.0;
      const CompositionModel grads =
          batch_gradients(outcome.model, batch, config.distance, &batch_mean);
      apply_update(outcome.model, grads, lr);
      loss_sum += batch_mean * static_cast<double>(batch.size());
    }
    return loss_sum / static_cast<double>(order.size());
  };
  auto val_loss = [&] { return batch_loss(outcome.model, val_span, config.distance); };

  EpochRunner::run(outcome.model, config, outcome.history, train_epoch, val_loss);
  return outcome;
}

namespace {

struct EncodedPair {
  std::string surface; // owning compound
  std::vector<Eigen::VectorXd> nc;
  std::vector<Eigen::VectorXd> paraphrase;
};

std::vector<EncodedPair> encode_pairs(const EmbeddingSpace& space,
                                      std::span<const ParaphrasePair> pairs, bool normalize,
                                      std::size_t& dropped) {
  std::vector<EncodedPair> out;
  out.reserve(pairs.size());
  for (const auto& pair : pairs) {
    const auto v1 = space.lookup(pair.compound.w1);
    const auto v2 = space.lookup(pair.compound.w2);
    if (!v1 || !v2) {
      ++dropped;
      continue;
    }
    std::vector<Eigen::VectorXd> tokens;
    tokens.reserve(pair.paraphrase.size());
    for (const auto& tok : pair.paraphrase) {
      if (auto v = space.lookup(tok)) {
        tokens.push_back(maybe_normalize(std::move(*v), normalize));
      }
      // OOV paraphrase tokens are dropped, never substituted.
    }
    if (tokens.empty()) {
      ++dropped;
      continue;
    }
    EncodedPair enc;
    enc.surface = pair.compound.surface();
    enc.nc = {maybe_normalize(*v1, normalize), maybe_normalize(*v2, normalize)};
    enc.paraphrase = std::move(tokens);
    out.push_back(std::move(enc));
  }
  return out;
}

std::size_t distinct_compounds(const std::vector<EncodedPair>& pairs) {
  std::unordered_set<std::string> surfaces;
  for (const auto& p : pairs) surfaces.insert(p.surface);
  return surfaces.size();
}

/// Uniform draw over pairs owned by a different compound.
std::size_t sample_other(const std::vector<EncodedPair>& pool, const std::string& surface,
                         Rng& rng) {
  while (true) {
    const std::size_t j = rng.index(pool.size());
    if (pool[j].surface != surface) return j;
  }
}

} // namespace

TrainOutcome train_paraphrase(const EmbeddingSpace& space,
                              std::span<const ParaphrasePair> train_pairs,
                              std::span<const ParaphrasePair> val_pairs,
                              const TrainConfig& config) {
  TrainConfig cfg = config;
  cfg.objective = Objective::paraphrase;
  cfg.validate(CompositionKind::lstm);
  const bool normalize = cfg.resolved_normalize_inputs();

  TrainOutcome outcome;
  const std::vector<EncodedPair> train =
      encode_pairs(space, train_pairs, normalize, outcome.dropped_train);
  if (train.empty()) throw TrainError("no trainable paraphrase pairs after OOV filtering");
  if (distinct_compounds(train) < 2) {
    throw TrainError("paraphrase training needs at least 2 distinct compounds to "
                     "sample negatives");
  }
  const std::vector<EncodedPair> val =
      encode_pairs(space, val_pairs, normalize, outcome.dropped_val);

  outcome.model = init_model(CompositionKind::lstm, space.dim(), cfg.seed);
  if (cfg.epochs == 0) return outcome;

  // Fixed validation triples: negatives drawn once from the training
  // pool so the per-epoch validation losses are comparable.
  const std::vector<EncodedPair>& val_pool = val.empty() ? train : val;
  std::vector<TripleExample> val_triples;
  {
    Rng val_rng(derive_seed(cfg.seed, "val-negatives"));
    val_triples.reserve(val_pool.size());
    for (const auto& pair : val_pool) {
      const std::size_t j = sample_other(train, pair.surface, val_rng);
      val_triples.push_back({pair.nc, pair.paraphrase, train[j].paraphrase});
    }
  }

  const double lr = cfg.resolved_learning_rate(CompositionKind::lstm);
  Rng shuffle_rng(derive_seed(cfg.seed, "shuffle"));
  Rng negative_rng(derive_seed(cfg.seed, "negatives"));
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  auto train_epoch = [&](int) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t triple_count = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::vector<TripleExample> batch;
      batch.reserve((end - start) * cfg.negatives_per_positive);
      for (std::size_t i = start; i < end; ++i) {
        const EncodedPair& pair = train[order[i]];
        for (int n = 0; n < cfg.negatives_per_positive; ++n) {
          const std::size_t j = sample_other(train, pair.surface, negative_rng);
          batch.push_back({pair.nc, pair.paraphrase, train[j].paraphrase});
        }
      }
      double batch_mean = 0.0;
      const CompositionModel grads =
          batch_gradients(outcome.model, batch, cfg.margin, &batch_mean);
      apply_update(outcome.model, grads, lr);
      loss_sum += batch_mean * static_cast<double>(batch.size());
      triple_count += batch.size();
    }
    return loss_sum / static_cast<double>(triple_count);
  };
  auto val_loss = [&] { return batch_loss(outcome.model, val_triples, cfg.margin); };

  EpochRunner::run(outcome.model, cfg, outcome.history, train_epoch, val_loss);
  return outcome;
}

CompoundSplit split_compounds(std::span<const NounCompound> compounds,
                              const std::array<double, 3>& ratios, std::uint64_t seed) {
  double sum = 0.0;
  for (double r : ratios) {
    if (r < 0.0) throw ConfigError("split ratios must be non-negative");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
  if (compounds.size() < 3) {
    throw TrainError("need at least 3 compounds to split into train/validation/test");
  }

  std::vector<NounCompound> shuffled(compounds.begin(), compounds.end());
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(shuffled);

  // Largest-remainder apportionment; ties go to the earlier fold.
  const std::size_t n = shuffled.size();
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> fractional{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = ratios[i] * static_cast<double>(n);
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    fractional[i] = exact - std::floor(exact);
    assigned += counts[i];
  }
  while (assigned < n) {
    int pick = 0;
    for (int i = 1; i < 3; ++i) {
      if (fractional[i] > fractional[pick]) pick = i;
    }
    ++counts[pick];
    fractional[pick] = -1.0;
    ++assigned;
  }

  CompoundSplit split;
  auto cursor = shuffled.begin();
  split.train.assign(cursor, cursor + counts[0]);
  cursor += counts[0];
  split.val.assign(cursor, cursor + counts[1]);
  cursor += counts[1];
  split.test.assign(cursor, cursor + counts[2]);
  return split;
}

} // namespace ncemb
