// Acceptance suite: every release gate in one binary, one PASS/FAIL
// line per criterion. Returns nonzero when any criterion fails.

#include "ncemb/compose.hpp"
#include "ncemb/embeddings.hpp"
#include "ncemb/error.hpp"
#include "ncemb/eval.hpp"
#include "ncemb/neighbors.hpp"
#include "ncemb/paraphrase.hpp"
#include "ncemb/pipeline.hpp"
#include "ncemb/rng.hpp"
#include "ncemb/taxonomy.hpp"
#include "ncemb/train.hpp"

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "../support/planted_grid.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace ncemb;

namespace {

struct Gate {
  int failures = 0;

  void check(int criterion, const std::string& name, const std::function<bool()>& body) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
      ok = body();
    } catch (const std::exception& e) {
      detail = std::string(" (exception: ") + e.what() + ")";
    }
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << criterion << ": " << name << " ["
              << elapsed << " ms]" << detail << '\n';
    if (!ok) ++failures;
  }
};

bool expect(bool condition, const std::string& message) {
  if (!condition) std::cout << "  failed: " << message << '\n';
  return condition;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// --- criterion 1: gradient correctness ---------------------------------------

bool gradients_ok() {
  const Eigen::Index d = 8;
  const auto start = std::chrono::steady_clock::now();
  Rng rng(1001);

  double worst = 0.0;
  for (const auto kind : {CompositionKind::add, CompositionKind::full_add,
                          CompositionKind::matrix, CompositionKind::lstm}) {
    for (const auto distance : {Distance::mse, Distance::cosine}) {
      for (int batch_no = 0; batch_no < 20; ++batch_no) {
        const CompositionModel model = init_model(kind, d, rng.next_u64());
        std::vector<ComposeExample> batch;
        for (int i = 0; i < 4; ++i) {
          batch.push_back({fixtures::random_vector(d, rng), fixtures::random_vector(d, rng),
                           fixtures::random_vector(d, rng)});
        }
        worst = std::max(worst, gradient_check(model, batch, distance, 1e-5));
      }
    }
  }

  double worst_margin = 0.0;
  for (int batch_no = 0; batch_no < 20; ++batch_no) {
    const CompositionModel model = init_model(CompositionKind::lstm, d, rng.next_u64());
    std::vector<TripleExample> batch;
    for (int i = 0; i < 4; ++i) {
      auto seq = [&](std::size_t len) {
        std::vector<Eigen::VectorXd> s;
        for (std::size_t t = 0; t < len; ++t) s.push_back(fixtures::random_vector(d, rng));
        return s;
      };
      batch.push_back({seq(2), seq(2 + rng.index(4)), seq(2 + rng.index(4))});
    }
    worst_margin = std::max(worst_margin, gradient_check(model, batch, 0.6, 1e-5));
  }

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                       start)
                             .count();
  return expect(worst < 1e-4, "compositional gradients: max relative error " +
                                  std::to_string(worst)) &
         expect(worst_margin < 1e-4,
                "margin gradients: max relative error " + std::to_string(worst_margin)) &
         expect(seconds < 30.0, "runtime " + std::to_string(seconds) + " s >= 30 s");
}

// --- criterion 2: composition recovery ---------------------------------------

bool fulladd_recovery_ok() {
  const auto start = std::chrono::steady_clock::now();
  const Eigen::Index d = 10;
  const auto compounds = fixtures::random_compounds(500, 200, 21);
  Rng wgen(22);
  Eigen::MatrixXd w1(d, d), w2(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      w1(i, j) = wgen.uniform(-0.5, 0.5);
      w2(i, j) = wgen.uniform(-0.5, 0.5);
    }
  }
  const auto space = fixtures::generated_space(
      23, 200, d, compounds,
      [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return w1 * a + w2 * b; });
  const CompoundSplit split = split_compounds(compounds, {0.8, 0.1, 0.1}, 24);

  TrainConfig config;
  config.learning_rate = 1.0;
  config.epochs = 50;
  config.seed = 25;
  const TrainOutcome outcome =
      train_compositional(space, split.train, split.val, CompositionKind::full_add, config);

  double cosine_sum = 0.0;
  for (const auto& nc : split.test) {
    const Eigen::VectorXd composed =
        compose(outcome.model, *space.lookup(nc.w1), *space.lookup(nc.w2));
    const Eigen::VectorXd observed = *space.lookup(nc.surface());
    cosine_sum += composed.dot(observed) / (composed.norm() * observed.norm());
  }
  const double mean_cosine = cosine_sum / static_cast<double>(split.test.size());

  // Add recovery on the v1 + v2 fixture under the default mse settings.
  const auto add_space = fixtures::generated_space(
      26, 200, d, compounds,
      [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a + b; });
  TrainConfig add_config;
  add_config.seed = 27;
  const TrainOutcome add_outcome = train_compositional(add_space, split.train, split.val,
                                                       CompositionKind::add, add_config);

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                       start)
                             .count();
  return expect(mean_cosine >= 0.99,
                "held-out mean cosine " + std::to_string(mean_cosine) + " < 0.99") &
         expect(std::abs(add_outcome.model.add().alpha - 1.0) <= 0.05,
                "alpha " + std::to_string(add_outcome.model.add().alpha)) &
         expect(std::abs(add_outcome.model.add().beta - 1.0) <= 0.05,
                "beta " + std::to_string(add_outcome.model.add().beta)) &
         expect(seconds < 60.0, "runtime " + std::to_string(seconds) + " s >= 60 s");
}

// --- criterion 3: margin-objective separation --------------------------------

struct ClusteredFixture {
  std::vector<std::string> tokens;
  std::vector<Eigen::VectorXd> rows;
  std::vector<ParaphrasePair> pairs;
};

ClusteredFixture clustered_fixture(std::size_t n_compounds, std::size_t paraphrases_each,
                                   Eigen::Index dim, std::uint64_t seed) {
  Rng rng(seed);
  ClusteredFixture fx;
  for (std::size_t c = 0; c < n_compounds; ++c) {
    Eigen::VectorXd center = fixtures::random_vector(dim, rng);
    center /= center.norm();
    auto near_center = [&] {
      return Eigen::VectorXd(center + 0.08 * fixtures::random_vector(dim, rng));
    };
    const std::string a = "m" + std::to_string(c);
    const std::string b = "h" + std::to_string(c);
    fx.tokens.push_back(a);
    fx.rows.push_back(near_center());
    fx.tokens.push_back(b);
    fx.rows.push_back(near_center());
    NounCompound nc(a, b);
    for (std::size_t p = 0; p < paraphrases_each; ++p) {
      std::vector<std::string> paraphrase;
      const std::size_t len = 3 + rng.index(3);
      for (std::size_t t = 0; t < len; ++t) {
        const std::string tok =
            "p" + std::to_string(c) + "_" + std::to_string(p) + "_" + std::to_string(t);
        fx.tokens.push_back(tok);
        fx.rows.push_back(near_center());
        paraphrase.push_back(tok);
      }
      fx.pairs.push_back({nc, paraphrase});
    }
  }
  return fx;
}

bool margin_separation_ok() {
  const auto start = std::chrono::steady_clock::now();
  const Eigen::Index d = 10;
  const auto fx = clustered_fixture(50, 4, d, 31);
  Eigen::MatrixXd matrix(static_cast<Eigen::Index>(fx.rows.size()), d);
  for (std::size_t i = 0; i < fx.rows.size(); ++i) {
    matrix.row(static_cast<Eigen::Index>(i)) = fx.rows[i].transpose();
  }
  const EmbeddingSpace space(fx.tokens, matrix);

  TrainConfig config;
  config.objective = Objective::paraphrase;
  config.epochs = 60;
  config.batch_size = 32;
  config.learning_rate = 0.05;
  config.seed = 32;
  const TrainOutcome outcome = train_paraphrase(space, fx.pairs, {}, config);

  // Evaluate separation and mean margin loss over the training triples
  // with freshly sampled other-compound negatives.
  const auto& lstm = outcome.model.lstm();
  auto encode = [&](const std::vector<std::string>& toks) {
    std::vector<Eigen::VectorXd> vs;
    for (const auto& t : toks) {
      Eigen::VectorXd v = *space.lookup(t);
      v /= v.norm();
      vs.push_back(v);
    }
    return compose_lstm(lstm, vs);
  };

  Rng rng(33);
  std::size_t satisfied = 0;
  double loss_sum = 0.0;
  std::size_t total = 0;
  for (const auto& pair : fx.pairs) {
    const auto h_nc = encode({pair.compound.w1, pair.compound.w2});
    const auto h_p = encode(pair.paraphrase);
    std::size_t j = rng.index(fx.pairs.size());
    while (fx.pairs[j].compound == pair.compound) j = rng.index(fx.pairs.size());
    const auto h_neg = encode(fx.pairs[j].paraphrase);
    const double cos_p = h_nc.dot(h_p) / (h_nc.norm() * h_p.norm());
    const double cos_n = h_nc.dot(h_neg) / (h_nc.norm() * h_neg.norm());
    if (cos_p >= cos_n) ++satisfied;
    loss_sum += std::max(0.0, 0.6 - cos_p + cos_n);
    ++total;
  }
  const double separation = static_cast<double>(satisfied) / static_cast<double>(total);
  const double mean_loss = loss_sum / static_cast<double>(total);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                       start)
                             .count();
  return expect(separation >= 0.9,
                "separation " + std::to_string(separation) + " < 0.9") &
         expect(mean_loss < 0.06, "mean margin loss " + std::to_string(mean_loss)) &
         expect(seconds < 60.0, "runtime " + std::to_string(seconds) + " s >= 60 s");
}

// --- criterion 4: wu-palmer oracle -------------------------------------------

struct RandomTaxonomy {
  Taxonomy tax;
  oracle::RawTaxonomy raw;
  std::vector<std::string> terms;
};

RandomTaxonomy random_taxonomy(std::uint64_t seed, std::size_t max_nodes) {
  Rng rng(seed);
  const std::size_t nodes = 2 + rng.index(max_nodes - 1);
  RandomTaxonomy result;
  TaxonomyBuilder builder;
  builder.root("n0");
  result.raw.root = "n0";
  result.raw.parents["n0"] = {};
  for (std::size_t i = 1; i < nodes; ++i) {
    const std::string id = "n" + std::to_string(i);
    std::set<std::string> parents;
    const std::size_t parent_count = 1 + rng.index(2);
    for (std::size_t p = 0; p < parent_count; ++p) {
      parents.insert("n" + std::to_string(rng.index(i)));
    }
    for (const auto& parent : parents) {
      builder.edge(id, parent);
      result.raw.parents[id].push_back(parent);
    }
  }
  const std::size_t term_count = 2 + rng.index(12);
  for (std::size_t t = 0; t < term_count; ++t) {
    const std::string term = "t" + std::to_string(t);
    std::set<std::string> synsets;
    const std::size_t synset_count = 1 + rng.index(3); // <= 3 synsets per term
    for (std::size_t s = 0; s < synset_count; ++s) {
      synsets.insert("n" + std::to_string(rng.index(nodes)));
    }
    for (const auto& s : synsets) {
      builder.term(term, s);
      result.raw.term_synsets[term].push_back(s);
    }
    result.terms.push_back(term);
  }
  result.tax = builder.build();
  return result;
}

bool wu_palmer_ok() {
  const Taxonomy toy = TaxonomyBuilder()
                           .root("root")
                           .edge("A", "root")
                           .edge("sB", "A")
                           .edge("sC", "A")
                           .term("B", "sB")
                           .term("C", "sC")
                           .build();
  bool ok = expect(wu_palmer(toy, "B", "C") == 2.0 / 3.0, "hand case B,C != 2/3");

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const RandomTaxonomy fixture = random_taxonomy(seed, 200);
    Rng rng(seed + 5000);
    for (int pair = 0; pair < 8; ++pair) {
      const auto& a = fixture.terms[rng.index(fixture.terms.size())];
      const auto& b = fixture.terms[rng.index(fixture.terms.size())];
      const auto ours = wu_palmer(fixture.tax, a, b);
      const double expected = oracle::naive_wu_palmer(fixture.raw, a, b);
      if (!ours || *ours != expected) {
        return expect(false, "mismatch at taxonomy seed " + std::to_string(seed) + " (" +
                                 a + ", " + b + ")");
      }
    }
  }
  return ok;
}

// --- criterion 5: neighbor categorization fixture ----------------------------

bool street_level_ok() {
  const NounCompound target("street", "level", 500);
  const Eigen::Index d = 12;

  // Target on the first axis, the eight expected neighbors at descending
  // cosine, everything else orthogonal.
  const std::vector<std::pair<std::string, NeighborCategory>> expected{
      {"3bf", NeighborCategory::rare_word},
      {"ground_floor", NeighborCategory::backtrans_paraphrase},
      {"street", NeighborCategory::shared_constituent},
      {"level", NeighborCategory::shared_constituent},
      {"sea_level", NeighborCategory::shared_constituent},
      {"storey", NeighborCategory::wordnet_similar},
      {"parking_garage", NeighborCategory::other_compound},
      {"stairs", NeighborCategory::other_word},
  };

  std::vector<std::string> tokens{target.surface()};
  std::vector<Eigen::VectorXd> rows;
  Eigen::VectorXd axis = Eigen::VectorXd::Zero(d);
  axis(0) = 1.0;
  rows.push_back(axis);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
    v(0) = 1.0;
    v(1) = 0.1 * static_cast<double>(i + 1); // decreasing cosine with the target
    tokens.push_back(expected[i].first);
    rows.push_back(v);
  }
  for (int i = 0; i < 6; ++i) { // orthogonal distractors
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
    v(2 + i) = 1.0;
    tokens.push_back("distractor" + std::to_string(i));
    rows.push_back(v);
  }
  Eigen::MatrixXd matrix(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    matrix.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  const EmbeddingSpace space(tokens, matrix);

  const std::unordered_map<std::string, std::uint64_t> frequencies{
      {"3bf", 3},           {"ground_floor", 120},   {"street", 9000},
      {"level", 12000},     {"sea_level", 800},      {"storey", 640},
      {"parking_garage", 77}, {"stairs", 4500},      {"street_level", 500},
      {"distractor0", 50},  {"distractor1", 50},     {"distractor2", 50},
      {"distractor3", 50},  {"distractor4", 50},     {"distractor5", 50}};

  std::map<std::string, ParaphraseSet> backtranslations;
  ParaphraseSet bt;
  bt.compound = target;
  bt.source = ParaphraseSource::backtranslation;
  bt.paraphrases = {{"ground", "floor"}};
  bt.raw_candidates = 2;
  backtranslations.emplace(target.surface(), bt);

  // Deep enough that the unrelated branch scores 2*1/10 = 0.2 <= 0.25
  // while the sibling storey scores 2*4/10 = 0.8.
  const Taxonomy taxonomy = TaxonomyBuilder()
                                .root("entity")
                                .edge("thing", "entity")
                                .edge("artifact", "thing")
                                .edge("structure", "artifact")
                                .edge("s_street_level", "structure")
                                .edge("s_storey", "structure")
                                .edge("act", "entity")
                                .edge("motion", "act")
                                .edge("climb", "motion")
                                .edge("s_stairs", "climb")
                                .term("street_level", "s_street_level")
                                .term("storey", "s_storey")
                                .term("stairs", "s_stairs")
                                .build();

  CategorizeResources resources;
  resources.frequencies = &frequencies;
  resources.backtranslations = &backtranslations;
  resources.taxonomy = &taxonomy;
  resources.rare_threshold = 10;

  const NeighborPool pool = NeighborPool::from_space(space);
  const std::vector<NounCompound> cohort{target};
  const auto report = neighbor_report(
      cohort, [&](const NounCompound& nc) { return space.lookup(nc.surface()); }, pool,
      static_cast<int>(expected.size()), resources, "fixture");

  bool ok = expect(report.per_target.size() == 1, "one target expected");
  const auto& entries = report.per_target[0].second;
  ok &= expect(entries.size() == expected.size(), "eight neighbors expected");
  std::set<std::string> seen;
  for (const auto& entry : entries) seen.insert(entry.token);
  for (const auto& [token, category] : expected) {
    ok &= expect(seen.count(token) == 1, "neighbor " + token + " missing from top-k");
    for (const auto& entry : entries) {
      if (entry.token == token) {
        ok &= expect(entry.category == category,
                     token + " categorized as " + to_string(*entry.category) +
                         ", expected " + to_string(category));
      }
    }
  }
  double sum = 0.0;
  for (const auto& [_, percent] : report.category_percent) sum += percent;
  ok &= expect(std::abs(sum - 100.0) <= 0.01, "percentages sum to " + std::to_string(sum));
  return ok;
}

// --- criterion 6: metrics oracle ----------------------------------------------

bool metrics_oracle_ok() {
  Rng rng(61);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t classes = 2 + rng.index(9);
    const std::size_t n = 1 + rng.index(80);
    std::vector<std::string> gold, pred;
    for (std::size_t i = 0; i < n; ++i) {
      gold.push_back("c" + std::to_string(rng.index(classes)));
      pred.push_back("c" + std::to_string(rng.index(classes)));
    }
    const auto ours = score(gold, pred, Averaging::macro);
    const auto expected = oracle::macro(gold, pred);
    if (std::abs(ours.f1 - expected.f1) > 1e-12 ||
        std::abs(ours.precision - expected.precision) > 1e-12 ||
        std::abs(ours.recall - expected.recall) > 1e-12) {
      return expect(false, "macro mismatch at trial " + std::to_string(trial));
    }
    const auto binary = score(gold, pred, Averaging::binary_positive, "c0");
    const auto expected_binary = oracle::class_scores(gold, pred, "c0");
    if (std::abs(binary.f1 - expected_binary.f1) > 1e-12) {
      return expect(false, "binary mismatch at trial " + std::to_string(trial));
    }
  }
  const std::vector<std::string> gold{"1", "1", "0", "0", "0"};
  const std::vector<std::string> all_negative(5, "0");
  return expect(score(gold, all_negative, Averaging::binary_positive).f1 == 0.0,
                "all-negative predictor must score positive-class F1 = 0");
}

// --- criterion 7: lexical split soundness --------------------------------------

bool lexical_split_ok() {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed + 900);
    const std::size_t count = 30 + rng.index(170);
    const auto compounds = fixtures::random_compounds(count, 3 * count, seed);
    const auto split = lexical_split(compounds, {0.8, 0.1, 0.1}, seed);

    auto constituents = [](const std::vector<NounCompound>& fold) {
      std::set<std::string> out;
      for (const auto& nc : fold) {
        out.insert(nc.w1);
        out.insert(nc.w2);
      }
      return out;
    };
    const auto a = constituents(split.train);
    const auto b = constituents(split.val);
    const auto c = constituents(split.test);
    for (const auto& t : b) {
      if (a.count(t)) return expect(false, "train/val share " + t);
    }
    for (const auto& t : c) {
      if (a.count(t) || b.count(t)) return expect(false, "test shares " + t);
    }
    if (split.train.size() + split.val.size() + split.test.size() + split.discarded !=
        compounds.size()) {
      return expect(false, "split does not account for every compound");
    }
  }

  std::vector<NounCompound> shared_head;
  for (int i = 0; i < 25; ++i) shared_head.emplace_back("mod" + std::to_string(i), "guide");
  try {
    lexical_split(shared_head, {0.8, 0.1, 0.1}, 1);
    return expect(false, "all-shared-head dataset must fail to split");
  } catch (const EvalError&) {
    return true;
  }
}

// --- criterion 8 + 9: planted grid end-to-end and determinism ------------------

struct GridRun {
  double add_f1 = 0.0;
  double fulladd_f1 = 0.0;
  double random_f1 = 1.0;
  double dist_f1 = 1.0;
  std::size_t dist_oov_forced = 0;
};

GridRun read_report(const AggregateReport& report) {
  GridRun run;
  for (const auto& row : report.rows) {
    if (row.representation == "add") run.add_f1 = row.mean_f1;
    if (row.representation == "fulladd") run.fulladd_f1 = row.mean_f1;
    if (row.representation == "random_baseline") run.random_f1 = row.mean_f1;
    if (row.representation == "distributional") run.dist_f1 = row.mean_f1;
  }
  for (const auto& cell : report.cells) {
    if (cell.representation == "distributional") run.dist_oov_forced += cell.oov_forced;
  }
  return run;
}

const char* kGridReps = R"([{"kind": "add", "train": {"epochs": 50, "learning_rate": 1.0}},
      {"kind": "fulladd", "train": {"epochs": 50, "learning_rate": 1.0}},
      {"kind": "random_baseline"},
      {"kind": "distributional"}])";

bool planted_grid_ok(fixtures::PlantedGridFixture& fixture) {
  const auto start = std::chrono::steady_clock::now();
  const std::string spec_path = fixture.write_spec(kGridReps, "out");
  const AggregateReport report = run_grid(DsmGridSpec::from_json_file(spec_path));
  const GridRun run = read_report(report);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                       start)
                             .count();
  return expect(run.add_f1 >= 0.9, "add macro F1 " + std::to_string(run.add_f1)) &
         expect(run.fulladd_f1 >= 0.9,
                "fulladd macro F1 " + std::to_string(run.fulladd_f1)) &
         expect(run.random_f1 <= 0.4,
                "random baseline macro F1 " + std::to_string(run.random_f1)) &
         expect(run.dist_f1 <= 0.4,
                "distributional (mostly OOV) macro F1 " + std::to_string(run.dist_f1) +
                    " above the forced-negative floor band") &
         expect(run.dist_oov_forced > 0, "distributional saw no forced-wrong items") &
         expect(seconds < 300.0, "runtime " + std::to_string(seconds) + " s >= 5 min");
}

bool determinism_ok(fixtures::PlantedGridFixture& fixture) {
  const std::string spec_a = fixture.write_spec(kGridReps, "det-a");
  const std::string spec_b = fixture.write_spec(kGridReps, "det-b");
  run_grid(DsmGridSpec::from_json_file(spec_a));
  run_grid(DsmGridSpec::from_json_file(spec_b));

  bool ok = true;
  for (const std::string name : {"results.tsv", "aggregate.tsv", "best.tsv"}) {
    ok &= expect(slurp(fixture.dir.file("det-a") + "/" + name) ==
                     slurp(fixture.dir.file("det-b") + "/" + name),
                 name + " differs between identical runs");
  }
  namespace fs = std::filesystem;
  std::size_t models = 0;
  for (const auto& entry : fs::directory_iterator(fixture.dir.file("det-a") + "/models")) {
    const std::string name = entry.path().filename().string();
    ok &= expect(slurp(fixture.dir.file("det-a") + "/models/" + name) ==
                     slurp(fixture.dir.file("det-b") + "/models/" + name),
                 "model " + name + " differs between identical runs");
    ++models;
  }
  ok &= expect(models == 2, "expected 2 trained model files, saw " + std::to_string(models));
  return ok;
}

// --- criterion 10: paraphrase filter contract ----------------------------------

bool paraphrase_filter_ok() {
  MockTranslationBackend backend;
  backend.add("en", "fr", "baby oil", "huile pour bébé");
  backend.add("fr", "en", "huile pour bébé", "oil for baby");
  backend.add("fr", "en", "huile pour bébé", "baby oil");

  const NounCompound nc("baby", "oil");
  const auto outcome = backtranslate(nc, backend, {"fr"});
  bool ok = expect(outcome.candidates ==
                       std::vector<std::string>{"oil for baby", "baby oil"},
                   "raw candidates differ from the fixture");

  const VocabularyRatioIdentifier langid(
      std::unordered_set<std::string>{"oil", "for", "baby"});
  const ParaphraseSet set = filter_paraphrases(nc, outcome.candidates, langid);
  ok &= expect(set.paraphrases ==
                   std::vector<std::vector<std::string>>{{"oil", "for", "baby"}},
               "surviving set is not exactly {oil for baby}");

  Rng rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ParaphraseSet> sets;
    const std::size_t n = 1 + rng.index(25);
    std::size_t oracle_total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      ParaphraseSet s;
      s.compound = NounCompound("a" + std::to_string(i), "b");
      const std::size_t count = rng.index(12);
      for (std::size_t p = 0; p < count; ++p) {
        s.paraphrases.push_back({"x" + std::to_string(p), "y", "z"});
      }
      s.raw_candidates = count;
      oracle_total += count;
      sets.push_back(std::move(s));
    }
    const auto stats = paraphrase_stats(sets);
    const double oracle_mean = static_cast<double>(oracle_total) / static_cast<double>(n);
    if (stats.total != oracle_total || std::abs(stats.mean_per_compound - oracle_mean) > 1e-12) {
      return expect(false, "stats oracle mismatch at trial " + std::to_string(trial));
    }
  }
  return ok;
}

} // namespace

int main() {
  Gate gate;
  gate.check(1, "analytic gradients match central differences (1e-4, d=8, 20 batches)",
             gradients_ok);
  gate.check(2, "fulladd recovery >= 0.99 held-out cosine; add recovers (1,1) +/- 0.05",
             fulladd_recovery_ok);
  gate.check(3, "margin training separates >= 90% of triples, mean loss < 0.06",
             margin_separation_ok);
  gate.check(4, "wu-palmer equals the brute-force oracle on 100 random taxonomies",
             wu_palmer_ok);
  gate.check(5, "street-level neighbors categorized per the six-way scheme", street_level_ok);
  gate.check(6, "score equals the confusion-matrix oracle on 1000 random labelings",
             metrics_oracle_ok);
  gate.check(7, "lexical split keeps folds constituent-disjoint; shared head fails",
             lexical_split_ok);

  fixtures::PlantedGridFixture grid_fixture(0.2, 800, 81);
  gate.check(8, "planted-signal grid: add/fulladd >= 0.9, baselines at the floor",
             [&] { return planted_grid_ok(grid_fixture); });
  gate.check(9, "identical seeds give byte-identical model files and result TSVs",
             [&] { return determinism_ok(grid_fixture); });
  gate.check(10, "baby-oil backtranslation filter and the stats sum/len oracle",
             paraphrase_filter_ok);

  if (gate.failures > 0) {
    std::cout << gate.failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
