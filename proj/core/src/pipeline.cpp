#include "ncemb/pipeline.hpp"

#include "ncemb/error.hpp"
#include "ncemb/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>

namespace ncemb {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(RepresentationKind k) {
  switch (k) {
    case RepresentationKind::distributional: return "distributional";
    case RepresentationKind::add: return "add";
    case RepresentationKind::full_add: return "fulladd";
    case RepresentationKind::matrix: return "matrix";
    case RepresentationKind::lstm: return "lstm";
    case RepresentationKind::cooccurrence: return "cooccurrence";
    case RepresentationKind::backtranslation: return "backtranslation";
    case RepresentationKind::random_baseline: return "random_baseline";
  }
  throw Error("unknown representation kind");
}

RepresentationKind representation_kind_from_string(const std::string& name) {
  for (const auto kind :
       {RepresentationKind::distributional, RepresentationKind::add,
        RepresentationKind::full_add, RepresentationKind::matrix, RepresentationKind::lstm,
        RepresentationKind::cooccurrence, RepresentationKind::backtranslation,
        RepresentationKind::random_baseline}) {
    if (to_string(kind) == name) return kind;
  }
  if (name == "full_add") return RepresentationKind::full_add;
  throw ConfigError("unknown representation kind: " + name);
}

bool is_paraphrase_kind(RepresentationKind k) {
  return k == RepresentationKind::cooccurrence || k == RepresentationKind::backtranslation;
}

bool is_compositional_kind(RepresentationKind k) {
  return k == RepresentationKind::add || k == RepresentationKind::full_add ||
         k == RepresentationKind::matrix || k == RepresentationKind::lstm;
}

void RepresentationSpec::validate() const {
  if (is_paraphrase_kind(kind) && paraphrase_path.empty()) {
    throw ConfigError("representation " + to_string(kind) + " requires a paraphrase file");
  }
  if (!is_paraphrase_kind(kind) && !paraphrase_path.empty()) {
    throw ConfigError("representation " + to_string(kind) +
                      " does not take a paraphrase file");
  }
}

namespace {

class DistributionalProvider : public VectorProvider {
public:
  explicit DistributionalProvider(const EmbeddingSpace& space) : space_(space) {}
  std::optional<Eigen::VectorXd> vector_for(const NounCompound& nc) const override {
    return space_.lookup(nc.surface());
  }
  std::string name() const override { return "distributional"; }

private:
  const EmbeddingSpace& space_;
};

class ComposedProvider : public VectorProvider {
public:
  ComposedProvider(const EmbeddingSpace& space, CompositionModel model, std::string name,
                   bool normalize_inputs)
      : space_(space), model_(std::move(model)), name_(std::move(name)),
        normalize_inputs_(normalize_inputs) {}

  std::optional<Eigen::VectorXd> vector_for(const NounCompound& nc) const override {
    auto v1 = space_.lookup(nc.w1);
    auto v2 = space_.lookup(nc.w2);
    if (!v1 || !v2) return std::nullopt; // OOV constituents only
    if (normalize_inputs_) {
      if (const double n = v1->norm(); n > 0.0) *v1 /= n;
      if (const double n = v2->norm(); n > 0.0) *v2 /= n;
    }
    return compose(model_, *v1, *v2);
  }
  std::string name() const override { return name_; }

private:
  const EmbeddingSpace& space_;
  CompositionModel model_;
  std::string name_;
  bool normalize_inputs_;
};

/// Deterministic per-surface random unit vector; a control that carries
/// no information about the constituents.
class RandomBaselineProvider : public VectorProvider {
public:
  RandomBaselineProvider(Eigen::Index dim, std::uint64_t seed) : dim_(dim), seed_(seed) {}

  std::optional<Eigen::VectorXd> vector_for(const NounCompound& nc) const override {
    Rng rng(derive_seed(seed_, "random-baseline/" + nc.surface()));
    Eigen::VectorXd v(dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) v(i) = rng.uniform(-1.0, 1.0);
    const double n = v.norm();
    if (n > 0.0) v /= n;
    return v;
  }
  std::string name() const override { return "random_baseline"; }

private:
  Eigen::Index dim_;
  std::uint64_t seed_;
};

std::vector<ParaphrasePair> pairs_for(std::span<const NounCompound> fold,
                                      const std::map<std::string, ParaphraseSet>& sets) {
  std::vector<ParaphrasePair> pairs;
  for (const auto& nc : fold) {
    const auto it = sets.find(nc.surface());
    if (it == sets.end()) continue;
    for (const auto& paraphrase : it->second.paraphrases) {
      pairs.push_back({nc, paraphrase});
    }
  }
  return pairs;
}

} // namespace

std::unique_ptr<VectorProvider> make_provider(RepresentationKind kind,
                                              const EmbeddingSpace& space,
                                              std::optional<CompositionModel> model,
                                              bool normalize_inputs, std::uint64_t seed) {
  if (kind == RepresentationKind::distributional) {
    return std::make_unique<DistributionalProvider>(space);
  }
  if (kind == RepresentationKind::random_baseline) {
    return std::make_unique<RandomBaselineProvider>(space.dim(),
                                                    derive_seed(seed, "random-baseline"));
  }
  if (!model) {
    throw ConfigError("representation " + to_string(kind) + " needs a trained model");
  }
  const CompositionKind expected = is_paraphrase_kind(kind)
                                       ? CompositionKind::lstm
                                       : composition_kind_from_string(to_string(kind));
  if (model->kind != expected) {
    throw ConfigError("representation " + to_string(kind) + " expects a " +
                      to_string(expected) + " model, got " + to_string(model->kind));
  }
  return std::make_unique<ComposedProvider>(space, std::move(*model), to_string(kind),
                                            normalize_inputs);
}

RepresentationBuild build_representation(const RepresentationSpec& spec,
                                         const EmbeddingSpace& space,
                                         std::span<const NounCompound> train_set,
                                         std::span<const NounCompound> val_set,
                                         const std::map<std::string, ParaphraseSet>* paraphrases,
                                         std::uint64_t seed) {
  spec.validate();
  RepresentationBuild build;
  const std::string rep_name = to_string(spec.kind);

  try {
    switch (spec.kind) {
      case RepresentationKind::distributional:
        build.provider = std::make_unique<DistributionalProvider>(space);
        break;
      case RepresentationKind::random_baseline:
        build.provider = std::make_unique<RandomBaselineProvider>(
            space.dim(), derive_seed(seed, "random-baseline"));
        break;
      case RepresentationKind::add:
      case RepresentationKind::full_add:
      case RepresentationKind::matrix:
      case RepresentationKind::lstm: {
        const CompositionKind kind = composition_kind_from_string(rep_name);
        TrainConfig config = spec.train;
        config.objective = Objective::compositional;
        config.seed = derive_seed(seed, "train/" + rep_name);
        auto outcome = train_compositional(space, train_set, val_set, kind, config);
        build.dropped_train = outcome.dropped_train;
        build.history = std::move(outcome.history);
        build.provider = std::make_unique<ComposedProvider>(
            space, outcome.model, rep_name, config.resolved_normalize_inputs());
        build.model = std::move(outcome.model);
        break;
      }
      case RepresentationKind::cooccurrence:
      case RepresentationKind::backtranslation: {
        if (!paraphrases) {
          throw TrainError("no paraphrase sets supplied for " + rep_name);
        }
        TrainConfig config = spec.train;
        config.objective = Objective::paraphrase;
        config.seed = derive_seed(seed, "train/" + rep_name);
        const auto train_pairs = pairs_for(train_set, *paraphrases);
        const auto val_pairs = pairs_for(val_set, *paraphrases);
        auto outcome = train_paraphrase(space, train_pairs, val_pairs, config);
        build.dropped_train = outcome.dropped_train;
        build.history = std::move(outcome.history);
        build.provider = std::make_unique<ComposedProvider>(
            space, outcome.model, rep_name, config.resolved_normalize_inputs());
        build.model = std::move(outcome.model);
        break;
      }
    }
  } catch (const Error& e) {
    throw TrainError("representation " + rep_name + ": " + e.what());
  }
  return build;
}

namespace {

TrainConfig train_config_from_json(const json& j) {
  TrainConfig config;
  for (const auto& [key, value] : j.items()) {
    if (key == "objective") config.objective = objective_from_string(value.get<std::string>());
    else if (key == "distance") config.distance = distance_from_string(value.get<std::string>());
    else if (key == "margin") config.margin = value.get<double>();
    else if (key == "learning_rate") config.learning_rate = value.get<double>();
    else if (key == "epochs") config.epochs = value.get<int>();
    else if (key == "batch_size") config.batch_size = value.get<int>();
    else if (key == "normalize_inputs") config.normalize_inputs = value.get<bool>();
    else if (key == "early_stop_patience") config.early_stop_patience = value.get<int>();
    else if (key == "negatives_per_positive") config.negatives_per_positive = value.get<int>();
    else throw ConfigError("unknown train config key: " + key);
  }
  return config;
}

std::string train_config_digest(const TrainConfig& c) {
  std::ostringstream out;
  out << to_string(c.objective) << '|' << to_string(c.distance) << '|' << c.margin << '|'
      << (c.learning_rate ? std::to_string(*c.learning_rate) : "auto") << '|' << c.epochs
      << '|' << c.batch_size << '|'
      << (c.normalize_inputs ? (*c.normalize_inputs ? "norm" : "raw") : "auto") << '|'
      << c.early_stop_patience << '|' << c.negatives_per_positive;
  return out.str();
}

} // namespace

DsmGridSpec DsmGridSpec::from_json(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("grid spec is not valid JSON: ") + e.what());
  }

  DsmGridSpec spec;
  try {
    spec.seed = j.value("seed", 0ull);
    spec.output_dir = j.at("output_dir").get<std::string>();
    spec.workers = j.value("workers", 1);
    spec.compounds_path = j.at("compounds").get<std::string>();

    for (const auto& e : j.at("embeddings")) {
      EmbeddingSpec emb;
      emb.name = e.at("name").get<std::string>();
      emb.window = e.at("window").get<int>();
      emb.dim = e.at("dim").get<int>();
      emb.path = e.at("path").get<std::string>();
      emb.frequencies_path = e.value("frequencies", "");
      spec.embeddings.push_back(std::move(emb));
    }

    for (const auto& r : j.at("representations")) {
      RepresentationSpec rep;
      rep.kind = representation_kind_from_string(r.at("kind").get<std::string>());
      if (r.contains("train")) rep.train = train_config_from_json(r.at("train"));
      rep.paraphrase_path = r.value("paraphrases", "");
      spec.representations.push_back(std::move(rep));
    }

    if (j.contains("tasks")) {
      const auto& tasks = j.at("tasks");
      if (tasks.contains("relation")) {
        const auto& t = tasks.at("relation");
        RelationTaskSpec rel;
        rel.data_path = t.at("data").get<std::string>();
        const std::string split = t.value("split", "random");
        if (split == "random") rel.split = SplitKind::random_split;
        else if (split == "lexical") rel.split = SplitKind::lexical;
        else throw ConfigError("unknown relation split: " + split);
        const std::string gran = t.value("granularity", "coarse");
        if (gran == "coarse") rel.granularity = Granularity::coarse;
        else if (gran == "fine") rel.granularity = Granularity::fine;
        else throw ConfigError("unknown granularity: " + gran);
        spec.relation = rel;
      }
      if (tasks.contains("property")) {
        spec.property = PropertyTaskSpec{tasks.at("property").at("data").get<std::string>()};
      }
      if (tasks.contains("neighbors")) {
        const auto& t = tasks.at("neighbors");
        NeighborsTaskSpec n;
        n.k = t.value("k", 10);
        n.taxonomy_path = t.value("taxonomy", "");
        n.backtranslation_path = t.value("backtranslations", "");
        n.cohort = t.value("cohort", "rare");
        n.rare_threshold = t.value("rare_threshold", 10ull);
        n.cohort_size = t.value("cohort_size", std::size_t{100});
        spec.neighbors = n;
      }
    }

    if (j.contains("classifier_grid")) {
      for (const auto& g : j.at("classifier_grid")) {
        GridPoint point;
        const std::string family = g.at("family").get<std::string>();
        if (family == "logistic_regression") {
          point.family = ClassifierFamily::logistic_regression;
        } else if (family == "linear_svm") {
          point.family = ClassifierFamily::linear_svm;
        } else {
          throw ConfigError("unknown classifier family: " + family);
        }
        point.l2 = g.at("l2").get<double>();
        spec.classifier_grid.push_back(point);
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("grid spec: ") + e.what());
  }

  spec.validate();
  return spec;
}

DsmGridSpec DsmGridSpec::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingResourceError("cannot open grid spec: " + path);
  return from_json(in);
}

void DsmGridSpec::validate() const {
  if (embeddings.empty()) throw ConfigError("grid spec: no embeddings listed");
  if (representations.empty()) throw ConfigError("grid spec: no representations listed");
  if (!relation && !property && !neighbors) {
    throw ConfigError("grid spec: no tasks requested");
  }
  if (output_dir.empty()) throw ConfigError("grid spec: output_dir is required");
  if (workers < 1) throw ConfigError("grid spec: workers must be >= 1");
  for (const auto& e : embeddings) {
    if (e.name.empty()) throw ConfigError("grid spec: embedding name must be non-empty");
    if (e.path.empty()) throw ConfigError("grid spec: embedding path must be non-empty");
  }
  for (const auto& r : representations) r.validate();
}

std::string cell_identity(const EmbeddingSpec& dsm, const RepresentationSpec& rep,
                          const std::string& task, std::uint64_t seed) {
  // Identity hangs off DSM metadata rather than file paths so a moved
  // output directory still resumes.
  std::ostringstream key;
  key << dsm.name << '|' << dsm.window << '|' << dsm.dim << '|' << to_string(rep.kind)
      << '|' << train_config_digest(rep.train) << '|' << task << '|' << seed;
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << hash_label(key.str());
  return hex.str();
}

namespace {

json cell_to_json(const CellResult& c) {
  return json{{"cell_id", c.cell_id},
              {"embedding", c.embedding_name},
              {"window", c.window},
              {"dim", c.dim},
              {"representation", c.representation},
              {"task", c.task},
              {"ok", c.ok},
              {"error", c.error},
              {"precision", c.precision},
              {"recall", c.recall},
              {"f1", c.f1},
              {"oov_forced", c.oov_forced}};
}

CellResult cell_from_json(const json& j) {
  CellResult c;
  c.cell_id = j.at("cell_id").get<std::string>();
  c.embedding_name = j.at("embedding").get<std::string>();
  c.window = j.at("window").get<int>();
  c.dim = j.at("dim").get<int>();
  c.representation = j.at("representation").get<std::string>();
  c.task = j.at("task").get<std::string>();
  c.ok = j.at("ok").get<bool>();
  c.error = j.at("error").get<std::string>();
  c.precision = j.at("precision").get<double>();
  c.recall = j.at("recall").get<double>();
  c.f1 = j.at("f1").get<double>();
  c.oov_forced = j.at("oov_forced").get<std::size_t>();
  return c;
}

bool cell_scored(const CellResult& c) { return c.task.rfind("neighbors", 0) != 0; }

void sort_cells(std::vector<CellResult>& cells) {
  std::sort(cells.begin(), cells.end(), [](const CellResult& a, const CellResult& b) {
    return std::tie(a.task, a.representation, a.embedding_name, a.window, a.dim) <
           std::tie(b.task, b.representation, b.embedding_name, b.window, b.dim);
  });
}

AggregateReport aggregate_cells(std::vector<CellResult> cells) {
  sort_cells(cells);

  AggregateReport report;
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  std::map<std::pair<std::string, std::string>, std::size_t> failures;
  for (const auto& c : cells) {
    if (!cell_scored(c)) continue;
    const auto key = std::make_pair(c.task, c.representation);
    if (c.ok) {
      groups[key].push_back(c.f1);
    } else {
      groups[key]; // the row exists even if every cell failed
      ++failures[key];
    }
  }

  for (const auto& [key, f1s] : groups) {
    const auto& [task, representation] = key;
    const std::size_t failed = failures.count(key) ? failures.at(key) : 0;
    if (f1s.empty()) {
      throw EvalError("grid row " + representation + " x " + task +
                      ": every cell failed, aborting the report");
    }
    AggregateRow row;
    row.task = task;
    row.representation = representation;
    row.cells = f1s.size();
    row.failed = failed;
    double mean = 0.0;
    for (const double f : f1s) mean += f;
    mean /= static_cast<double>(f1s.size());
    double var = 0.0;
    for (const double f : f1s) var += (f - mean) * (f - mean);
    var /= static_cast<double>(f1s.size()); // population variance across DSMs
    row.mean_f1 = mean;
    row.std_f1 = std::sqrt(var);
    report.rows.push_back(std::move(row));
  }

  std::map<std::string, const CellResult*> best;
  for (const auto& c : cells) {
    if (!c.ok || !cell_scored(c)) continue;
    auto [it, created] = best.emplace(c.task, &c);
    if (!created && c.f1 > it->second->f1) it->second = &c;
  }
  for (const auto& [task, cell] : best) report.best_per_task.push_back({task, *cell});

  report.cells = std::move(cells);
  return report;
}

struct TaskContext {
  std::vector<RelationInstance> relation_instances;
  std::map<std::string, std::vector<PropertyInstance>> property_datasets;
  std::optional<Taxonomy> taxonomy;
  std::map<std::string, ParaphraseSet> backtranslations;
  std::vector<GridPoint> grid;
};

std::vector<std::string> task_names(const DsmGridSpec& spec, const TaskContext& ctx) {
  std::vector<std::string> names;
  if (spec.relation) {
    names.push_back("relation/" + to_string(spec.relation->granularity) + "-" +
                    to_string(spec.relation->split));
  }
  if (spec.property) {
    for (const auto& [property, _] : ctx.property_datasets) {
      names.push_back("property/" + property);
    }
  }
  if (spec.neighbors) names.push_back("neighbors/" + spec.neighbors->cohort);
  return names;
}

} // namespace

AggregateReport run_grid(const DsmGridSpec& spec) {
  spec.validate();
  fs::create_directories(spec.output_dir);
  fs::create_directories(fs::path(spec.output_dir) / "models");
  fs::create_directories(fs::path(spec.output_dir) / "neighbors");

  const auto compounds = parse_compounds_file(spec.compounds_path);

  TaskContext ctx;
  ctx.grid = spec.classifier_grid.empty() ? default_grid() : spec.classifier_grid;
  if (spec.relation) ctx.relation_instances = parse_relation_file(spec.relation->data_path);
  if (spec.property) ctx.property_datasets = parse_property_file(spec.property->data_path);
  if (spec.neighbors && !spec.neighbors->taxonomy_path.empty()) {
    ctx.taxonomy = Taxonomy::load_file(spec.neighbors->taxonomy_path);
  }
  if (spec.neighbors && !spec.neighbors->backtranslation_path.empty()) {
    ctx.backtranslations = load_paraphrase_sets_file(spec.neighbors->backtranslation_path,
                                                     ParaphraseSource::backtranslation);
  }
  const auto tasks = task_names(spec, ctx);

  // Resume: cells already journaled are never recomputed.
  const fs::path journal_path = fs::path(spec.output_dir) / "cells.jsonl";
  std::map<std::string, CellResult> done;
  if (fs::exists(journal_path)) {
    std::ifstream in(journal_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      CellResult c = cell_from_json(json::parse(line));
      done.emplace(c.cell_id, std::move(c));
    }
  }

  // Shared paraphrase sets per representation spec (path -> sets).
  std::map<std::string, std::map<std::string, ParaphraseSet>> paraphrase_cache;
  for (const auto& rep : spec.representations) {
    if (is_paraphrase_kind(rep.kind) && !paraphrase_cache.count(rep.paraphrase_path)) {
      paraphrase_cache.emplace(
          rep.paraphrase_path,
          load_paraphrase_sets_file(rep.paraphrase_path,
                                    rep.kind == RepresentationKind::cooccurrence
                                        ? ParaphraseSource::cooccurrence
                                        : ParaphraseSource::backtranslation));
    }
  }

  struct Job {
    std::size_t dsm = 0;
    std::size_t rep = 0;
  };
  std::vector<Job> jobs;
  for (std::size_t d = 0; d < spec.embeddings.size(); ++d) {
    for (std::size_t r = 0; r < spec.representations.size(); ++r) {
      jobs.push_back({d, r});
    }
  }

  // Spaces are immutable and shared across jobs; load each file once.
  std::vector<EmbeddingSpace> spaces;
  spaces.reserve(spec.embeddings.size());
  for (const auto& emb : spec.embeddings) {
    EmbeddingSpace space = load_embeddings_file(emb.path);
    if (!emb.frequencies_path.empty()) {
      space = space.with_frequencies(load_frequency_sidecar_file(emb.frequencies_path));
    }
    spaces.push_back(std::move(space));
  }

  std::mutex journal_mutex;
  std::ofstream journal(journal_path, std::ios::app);
  if (!journal) throw Error("cannot open journal for writing: " + journal_path.string());
  std::vector<std::vector<CellResult>> job_cells(jobs.size());

  auto record = [&](std::size_t job_index, CellResult cell) {
    std::lock_guard<std::mutex> lock(journal_mutex);
    journal << cell_to_json(cell).dump() << '\n';
    journal.flush();
    job_cells[job_index].push_back(std::move(cell));
  };

  auto run_job = [&](std::size_t job_index) {
    const Job& job = jobs[job_index];
    const EmbeddingSpec& dsm = spec.embeddings[job.dsm];
    const RepresentationSpec& rep = spec.representations[job.rep];
    const EmbeddingSpace& space = spaces[job.dsm];
    const std::string rep_name = to_string(rep.kind);

    std::vector<std::pair<std::string, std::string>> pending; // (task, cell_id)
    for (const auto& task : tasks) {
      const std::string id = cell_identity(dsm, rep, task, spec.seed);
      if (auto it = done.find(id); it != done.end()) {
        job_cells[job_index].push_back(it->second);
      } else {
        pending.emplace_back(task, id);
      }
    }
    if (pending.empty()) return;

    CellResult base;
    base.embedding_name = dsm.name;
    base.window = dsm.window;
    base.dim = dsm.dim;
    base.representation = rep_name;

    // The representation is trained once per (DSM x representation);
    // its seed must not depend on which tasks run.
    const std::string job_key = cell_identity(dsm, rep, "model", spec.seed);
    const std::uint64_t job_seed = derive_seed(spec.seed, "job/" + job_key);

    RepresentationBuild build;
    try {
      const auto split = split_compounds(compounds, {0.8, 0.1, 0.1},
                                         derive_seed(job_seed, "compound-split"));
      const auto* paraphrases = is_paraphrase_kind(rep.kind)
                                    ? &paraphrase_cache.at(rep.paraphrase_path)
                                    : nullptr;
      build = build_representation(rep, space, split.train, split.val, paraphrases, job_seed);
      if (build.model) {
        save_model_file(*build.model,
                        (fs::path(spec.output_dir) / "models" / (job_key + ".ncm")).string());
      }

      for (const auto& [task, id] : pending) {
        CellResult cell = base;
        cell.cell_id = id;
        cell.task = task;
        try {
          if (task.rfind("relation/", 0) == 0) {
            const auto r = relation_eval(*build.provider, ctx.relation_instances,
                                         spec.relation->split, spec.relation->granularity,
                                         derive_seed(job_seed, task), ctx.grid);
            cell.precision = r.metrics.precision;
            cell.recall = r.metrics.recall;
            cell.f1 = r.metrics.f1;
            cell.oov_forced = r.oov_forced_wrong;
            cell.ok = true;
          } else if (task.rfind("property/", 0) == 0) {
            const std::string property = task.substr(std::string("property/").size());
            std::map<std::string, std::vector<PropertyInstance>> one;
            one.emplace(property, ctx.property_datasets.at(property));
            const auto results = property_eval(*build.provider, space, one,
                                               derive_seed(job_seed, "property"), ctx.grid);
            const auto& r = results.at(property);
            cell.precision = r.metrics.precision;
            cell.recall = r.metrics.recall;
            cell.f1 = r.metrics.f1;
            cell.oov_forced = r.oov_forced_negative;
            cell.ok = true;
          } else { // neighbors
            const auto& n = *spec.neighbors;
            const auto test_split = split_compounds(compounds, {0.8, 0.1, 0.1},
                                                    derive_seed(job_seed, "compound-split"));
            std::vector<NounCompound> targets =
                n.cohort == "all"
                    ? test_split.test
                    : select_cohort(test_split.test,
                                    n.cohort == "frequent" ? Cohort::frequent : Cohort::rare,
                                    n.cohort_size);

            NeighborPool pool(space.dim());
            if (rep.kind == RepresentationKind::distributional) {
              pool = NeighborPool::from_space(space);
            } else {
              // Single words plus the composed vectors of the test cohort.
              for (Eigen::Index i = 0; i < space.size(); ++i) {
                if (space.tokens()[i].find('_') == std::string::npos) {
                  pool.add(space.tokens()[i], space.vector_at(i));
                }
              }
              for (const auto& nc : test_split.test) {
                if (const auto v = build.provider->vector_for(nc)) {
                  pool.add(nc.surface(), *v);
                }
              }
            }

            std::unordered_map<std::string, std::uint64_t> frequencies =
                space.frequencies();
            for (const auto& nc : compounds) {
              frequencies.emplace(nc.surface(), nc.frequency);
            }
            CategorizeResources resources;
            resources.frequencies = &frequencies;
            resources.backtranslations =
                ctx.backtranslations.empty() ? nullptr : &ctx.backtranslations;
            resources.taxonomy = ctx.taxonomy ? &*ctx.taxonomy : nullptr;
            resources.rare_threshold = n.rare_threshold;

            const auto report = neighbor_report(
                targets,
                [&](const NounCompound& nc) { return build.provider->vector_for(nc); },
                pool, n.k, resources, n.cohort);
            std::ofstream out(fs::path(spec.output_dir) / "neighbors" /
                              (cell_identity(dsm, rep, task, spec.seed) + ".tsv"));
            write_neighbor_report(report, out);
            cell.ok = true;
          }
        } catch (const std::exception& e) {
          cell.ok = false;
          cell.error = rep_name + ": " + e.what();
        }
        record(job_index, std::move(cell));
      }
      return;
    } catch (const std::exception& e) {
      // Training failed: every pending task cell fails with the cause.
      for (const auto& [task, id] : pending) {
        CellResult cell = base;
        cell.cell_id = id;
        cell.task = task;
        cell.ok = false;
        cell.error = e.what();
        record(job_index, std::move(cell));
      }
    }
  };

  if (spec.workers == 1 || jobs.size() <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> pool;
    const int n = std::min<int>(spec.workers, static_cast<int>(jobs.size()));
    for (int w = 0; w < n; ++w) {
      pool.push_back(std::async(std::launch::async, [&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= jobs.size()) return;
          run_job(i);
        }
      }));
    }
    for (auto& f : pool) f.get();
  }

  // Deterministic barrier: aggregate over the collected cells in job
  // order, independent of scheduling.
  std::vector<CellResult> cells;
  for (const auto& jc : job_cells) cells.insert(cells.end(), jc.begin(), jc.end());
  AggregateReport report = aggregate_cells(std::move(cells));

  std::ofstream results(fs::path(spec.output_dir) / "results.tsv");
  write_results_tsv(report, results);
  std::ofstream aggregate(fs::path(spec.output_dir) / "aggregate.tsv");
  write_aggregate_tsv(report, aggregate);
  std::ofstream best(fs::path(spec.output_dir) / "best.tsv");
  write_best_tsv(report, best);
  return report;
}

AggregateReport aggregate_from_journal(std::istream& in) {
  std::vector<CellResult> cells;
  std::map<std::string, std::size_t> seen; // later journal lines win
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    CellResult c = cell_from_json(json::parse(line));
    if (auto it = seen.find(c.cell_id); it != seen.end()) {
      cells[it->second] = std::move(c);
    } else {
      seen.emplace(c.cell_id, cells.size());
      cells.push_back(std::move(c));
    }
  }
  return aggregate_cells(std::move(cells));
}

namespace {

std::string fmt_double(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

} // namespace

void write_results_tsv(const AggregateReport& report, std::ostream& out) {
  out << "cell_id\ttask\trepresentation\tembedding\twindow\tdim\tstatus\tprecision\t"
         "recall\tf1\toov_forced\terror\n";
  for (const auto& c : report.cells) {
    out << c.cell_id << '\t' << c.task << '\t' << c.representation << '\t'
        << c.embedding_name << '\t' << c.window << '\t' << c.dim << '\t'
        << (c.ok ? "ok" : "failed") << '\t' << fmt_double(c.precision) << '\t'
        << fmt_double(c.recall) << '\t' << fmt_double(c.f1) << '\t' << c.oov_forced << '\t'
        << c.error << '\n';
  }
}

void write_aggregate_tsv(const AggregateReport& report, std::ostream& out) {
  out << "task\trepresentation\tmean_f1\tstd_f1\tcells\tfailed\n";
  for (const auto& row : report.rows) {
    out << row.task << '\t' << row.representation << '\t' << fmt_double(row.mean_f1) << '\t'
        << fmt_double(row.std_f1) << '\t' << row.cells << '\t' << row.failed << '\n';
  }
}

void write_best_tsv(const AggregateReport& report, std::ostream& out) {
  out << "task\trepresentation\tembedding\twindow\tdim\tprecision\trecall\tf1\n";
  for (const auto& b : report.best_per_task) {
    out << b.task << '\t' << b.cell.representation << '\t' << b.cell.embedding_name << '\t'
        << b.cell.window << '\t' << b.cell.dim << '\t' << fmt_double(b.cell.precision)
        << '\t' << fmt_double(b.cell.recall) << '\t' << fmt_double(b.cell.f1) << '\n';
  }
}

} // namespace ncemb
