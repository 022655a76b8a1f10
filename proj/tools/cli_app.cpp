#include "cli_app.hpp"

#include "ncemb/embeddings.hpp"
#include "ncemb/error.hpp"
#include "ncemb/eval.hpp"
#include "ncemb/kvconfig.hpp"
#include "ncemb/neighbors.hpp"
#include "ncemb/paraphrase.hpp"
#include "ncemb/pipeline.hpp"
#include "ncemb/rng.hpp"
#include "ncemb/taxonomy.hpp"
#include "ncemb/train.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace ncemb::cli {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kTrainConfigKeys{
    "objective",        "distance",   "margin",
    "learning_rate",    "epochs",     "batch_size",
    "seed",             "normalize_inputs", "early_stop_patience",
    "negatives_per_positive"};

void require_file(const std::string& path, const std::string& what) {
  if (!fs::exists(path)) {
    throw MissingResourceError(what + " not found: " + path);
  }
}

EmbeddingSpace load_space(const std::string& embeddings_path,
                          const std::string& frequencies_path) {
  require_file(embeddings_path, "embedding file");
  EmbeddingSpace space = load_embeddings_file(embeddings_path);
  if (!frequencies_path.empty()) {
    require_file(frequencies_path, "frequency file");
    space = space.with_frequencies(load_frequency_sidecar_file(frequencies_path));
  }
  return space;
}

/// Every run echoes its fully resolved configuration.
void echo_config(const KvConfig& config) {
  std::istringstream lines(config.resolved_text());
  std::string line;
  while (std::getline(lines, line)) std::cout << "# config " << line << '\n';
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out << text;
}

std::unordered_map<std::string, std::uint64_t> merged_frequencies(
    const EmbeddingSpace& space, const std::vector<NounCompound>& compounds) {
  auto freqs = space.frequencies();
  for (const auto& nc : compounds) freqs.emplace(nc.surface(), nc.frequency);
  return freqs;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string kind = "add";
  std::string embeddings;
  std::string compounds;
  std::string out_dir;
  std::string config_path;
  std::string paraphrases;
  std::string paraphrase_source = "cooccurrence";
  std::string frequencies;
  // flag overrides; empty string means "not set on the command line"
  std::string objective, distance, margin, learning_rate, epochs, batch_size,
      normalize_inputs, patience, negatives;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

KvConfig resolve_train_config(const TrainArgs& args) {
  KvConfig config;
  // defaults
  config.set("objective", "compositional");
  config.set("distance", "mse");
  config.set("margin", "0.6");
  config.set("epochs", "50");
  config.set("batch_size", "64");
  config.set("seed", "0");
  config.set("early_stop_patience", "0");
  config.set("negatives_per_positive", "1");
  // file
  if (!args.config_path.empty()) {
    require_file(args.config_path, "config file");
    const KvConfig file = KvConfig::parse_file(args.config_path);
    file.reject_unknown_keys(kTrainConfigKeys);
    for (const auto& [key, value] : file.entries()) config.set(key, value);
  }
  // flags
  if (!args.objective.empty()) config.set("objective", args.objective);
  if (!args.distance.empty()) config.set("distance", args.distance);
  if (!args.margin.empty()) config.set("margin", args.margin);
  if (!args.learning_rate.empty()) config.set("learning_rate", args.learning_rate);
  if (!args.epochs.empty()) config.set("epochs", args.epochs);
  if (!args.batch_size.empty()) config.set("batch_size", args.batch_size);
  if (!args.normalize_inputs.empty()) config.set("normalize_inputs", args.normalize_inputs);
  if (!args.patience.empty()) config.set("early_stop_patience", args.patience);
  if (!args.negatives.empty()) config.set("negatives_per_positive", args.negatives);
  if (args.seed_set) config.set("seed", std::to_string(args.seed));
  return config;
}

TrainConfig to_train_config(const KvConfig& kv) {
  TrainConfig config;
  config.objective = objective_from_string(kv.get("objective"));
  config.distance = distance_from_string(kv.get("distance"));
  config.margin = kv.as_double("margin");
  if (kv.has("learning_rate")) config.learning_rate = kv.as_double("learning_rate");
  config.epochs = static_cast<int>(kv.as_int("epochs"));
  config.batch_size = static_cast<int>(kv.as_int("batch_size"));
  config.seed = static_cast<std::uint64_t>(kv.as_int("seed"));
  if (kv.has("normalize_inputs")) config.normalize_inputs = kv.as_bool("normalize_inputs");
  config.early_stop_patience = static_cast<int>(kv.as_int("early_stop_patience"));
  config.negatives_per_positive = static_cast<int>(kv.as_int("negatives_per_positive"));
  return config;
}

int run_train(const TrainArgs& args) {
  const KvConfig kv = resolve_train_config(args);
  echo_config(kv);
  const TrainConfig config = to_train_config(kv);
  const CompositionKind kind = composition_kind_from_string(args.kind);

  require_file(args.compounds, "compounds file");
  const EmbeddingSpace space = load_space(args.embeddings, args.frequencies);
  const auto compounds = parse_compounds_file(args.compounds);
  const CompoundSplit split =
      split_compounds(compounds, {0.8, 0.1, 0.1}, derive_seed(config.seed, "split"));

  TrainOutcome outcome;
  if (config.objective == Objective::compositional) {
    outcome = train_compositional(space, split.train, split.val, kind, config);
  } else {
    if (kind != CompositionKind::lstm) {
      throw ConfigError("the paraphrase objective trains --kind lstm");
    }
    require_file(args.paraphrases, "paraphrase file");
    const auto source = args.paraphrase_source == "backtranslation"
                            ? ParaphraseSource::backtranslation
                            : ParaphraseSource::cooccurrence;
    const auto sets = load_paraphrase_sets_file(args.paraphrases, source);
    auto pairs_of = [&](std::span<const NounCompound> fold) {
      std::vector<ParaphrasePair> pairs;
      for (const auto& nc : fold) {
        const auto it = sets.find(nc.surface());
        if (it == sets.end()) continue;
        for (const auto& p : it->second.paraphrases) pairs.push_back({nc, p});
      }
      return pairs;
    };
    outcome = train_paraphrase(space, pairs_of(split.train), pairs_of(split.val), config);
  }

  fs::create_directories(args.out_dir);
  save_model_file(outcome.model, (fs::path(args.out_dir) / "model.ncm").string());
  std::ostringstream log;
  outcome.history.write_log(log);
  write_text_file((fs::path(args.out_dir) / "history.tsv").string(), log.str());
  write_text_file((fs::path(args.out_dir) / "config_resolved.txt").string(),
                  kv.resolved_text());

  std::cout << "trained " << to_string(kind) << ": epochs=" << outcome.history.train_loss.size()
            << " selected_epoch=" << outcome.history.selected_epoch
            << " dropped_oov=" << outcome.dropped_train + outcome.dropped_val << '\n';
  std::cout << "model written to " << (fs::path(args.out_dir) / "model.ncm").string() << '\n';
  return kExitOk;
}

// ---- providers shared by neighbors / eval ----------------------------------

struct ProviderArgs {
  std::string representation = "distributional";
  std::string model_path;
  bool normalize_inputs = false;
};

std::unique_ptr<VectorProvider> provider_from_args(const ProviderArgs& args,
                                                   const EmbeddingSpace& space,
                                                   std::uint64_t seed) {
  const RepresentationKind kind = representation_kind_from_string(args.representation);
  std::optional<CompositionModel> model;
  if (kind != RepresentationKind::distributional &&
      kind != RepresentationKind::random_baseline) {
    if (args.model_path.empty()) {
      throw ConfigError("--model is required for representation " + args.representation);
    }
    require_file(args.model_path, "model file");
    model = load_model_file(args.model_path);
  }
  const bool normalize = args.normalize_inputs || is_paraphrase_kind(kind);
  return make_provider(kind, space, std::move(model), normalize, seed);
}

// ---- neighbors --------------------------------------------------------------

struct NeighborsArgs {
  std::string embeddings, compounds, report, taxonomy, backtranslations, frequencies;
  ProviderArgs provider;
  int k = 10;
  std::string cohort = "rare";
  std::size_t cohort_size = 100;
  std::uint64_t rare_threshold = 10;
  std::uint64_t seed = 0;
  std::string rare_curve_path; // optional second artifact
  std::vector<double> bins{0, 2, 5, 10, 20, 50, 100, 250, 500};
};

int run_neighbors(const NeighborsArgs& args) {
  KvConfig echo;
  echo.set("k", std::to_string(args.k));
  echo.set("cohort", args.cohort);
  echo.set("cohort_size", std::to_string(args.cohort_size));
  echo.set("rare_threshold", std::to_string(args.rare_threshold));
  echo.set("representation", args.provider.representation);
  echo.set("seed", std::to_string(args.seed));
  echo_config(echo);

  require_file(args.compounds, "compounds file");
  const EmbeddingSpace space = load_space(args.embeddings, args.frequencies);
  const auto compounds = parse_compounds_file(args.compounds);
  const auto provider = provider_from_args(args.provider, space, args.seed);
  const RepresentationKind kind =
      representation_kind_from_string(args.provider.representation);

  const CompoundSplit split =
      split_compounds(compounds, {0.8, 0.1, 0.1}, derive_seed(args.seed, "split"));
  std::vector<NounCompound> targets =
      args.cohort == "all"
          ? split.test
          : select_cohort(split.test,
                          args.cohort == "frequent" ? Cohort::frequent : Cohort::rare,
                          args.cohort_size);

  NeighborPool pool(space.dim());
  if (kind == RepresentationKind::distributional) {
    pool = NeighborPool::from_space(space);
  } else {
    for (Eigen::Index i = 0; i < space.size(); ++i) {
      if (space.tokens()[i].find('_') == std::string::npos) {
        pool.add(space.tokens()[i], space.vector_at(i));
      }
    }
    for (const auto& nc : split.test) {
      if (const auto v = provider->vector_for(nc)) pool.add(nc.surface(), *v);
    }
  }

  std::optional<Taxonomy> taxonomy;
  if (!args.taxonomy.empty()) {
    require_file(args.taxonomy, "taxonomy file");
    taxonomy = Taxonomy::load_file(args.taxonomy);
  }
  std::map<std::string, ParaphraseSet> backtranslations;
  if (!args.backtranslations.empty()) {
    require_file(args.backtranslations, "backtranslation paraphrase file");
    backtranslations = load_paraphrase_sets_file(args.backtranslations,
                                                 ParaphraseSource::backtranslation);
  }
  const auto frequencies = merged_frequencies(space, compounds);

  CategorizeResources resources;
  resources.frequencies = &frequencies;
  resources.backtranslations = backtranslations.empty() ? nullptr : &backtranslations;
  resources.taxonomy = taxonomy ? &*taxonomy : nullptr;
  resources.rare_threshold = args.rare_threshold;

  const auto report = neighbor_report(
      targets, [&](const NounCompound& nc) { return provider->vector_for(nc); }, pool,
      args.k, resources, args.cohort);

  std::ofstream out(args.report);
  if (!out) throw Error("cannot open report for writing: " + args.report);
  write_neighbor_report(report, out);
  std::cout << "neighbor report for " << report.per_target.size() << " targets written to "
            << args.report << '\n';

  // Frequency curve of rare neighbors over the distributional space,
  // binned by compound corpus frequency.
  if (!args.rare_curve_path.empty()) {
    const RareCurve curve =
        rare_curve(space, compounds, args.bins, args.rare_threshold, args.k);
    std::ofstream curve_out(args.rare_curve_path);
    if (!curve_out) throw Error("cannot open for writing: " + args.rare_curve_path);
    curve_out << "bin_center\tmean_rare_percent\tcompounds\n";
    for (const auto& point : curve.points) {
      curve_out << point.bin_center << '\t' << point.mean_rare_percent << '\t'
                << point.compounds << '\n';
    }
    for (const auto& [lo, hi] : curve.empty_bins) {
      std::cout << "rare-curve: empty bin [" << lo << ", " << hi << ") omitted\n";
    }
    if (curve.skipped_targets > 0) {
      std::cout << "rare-curve: " << curve.skipped_targets
                << " compounds without a stored vector skipped\n";
    }
    std::cout << "rare curve written to " << args.rare_curve_path << '\n';
  }
  return kExitOk;
}

// ---- eval-property / eval-relation ------------------------------------------

struct EvalArgs {
  std::string embeddings, frequencies, data, out_dir;
  ProviderArgs provider;
  std::uint64_t seed = 0;
  std::string split = "random";
  std::string granularity = "coarse";
};

int run_eval_property(const EvalArgs& args) {
  KvConfig echo;
  echo.set("representation", args.provider.representation);
  echo.set("seed", std::to_string(args.seed));
  echo_config(echo);

  require_file(args.data, "property file");
  const EmbeddingSpace space = load_space(args.embeddings, args.frequencies);
  const auto provider = provider_from_args(args.provider, space, args.seed);
  const auto datasets = parse_property_file(args.data);
  const auto grid = default_grid();
  const auto results = property_eval(*provider, space, datasets, args.seed, grid);

  fs::create_directories(args.out_dir);
  for (const auto& [property, result] : results) {
    std::ostringstream report;
    write_metrics_report(result.metrics, result.selection, report);
    write_text_file((fs::path(args.out_dir) / ("property_" + property + ".tsv")).string(),
                    report.str());
    std::cout << "property\t" << property << "\tP=" << result.metrics.precision
              << "\tR=" << result.metrics.recall << "\tF1=" << result.metrics.f1
              << "\toov_forced_negative=" << result.oov_forced_negative << '\n';
  }
  return kExitOk;
}

int run_eval_relation(const EvalArgs& args) {
  KvConfig echo;
  echo.set("representation", args.provider.representation);
  echo.set("split", args.split);
  echo.set("granularity", args.granularity);
  echo.set("seed", std::to_string(args.seed));
  echo_config(echo);

  require_file(args.data, "relation file");
  const EmbeddingSpace space = load_space(args.embeddings, args.frequencies);
  const auto provider = provider_from_args(args.provider, space, args.seed);
  const auto instances = parse_relation_file(args.data);
  const auto grid = default_grid();

  const SplitKind split =
      args.split == "lexical" ? SplitKind::lexical : SplitKind::random_split;
  const Granularity granularity =
      args.granularity == "fine" ? Granularity::fine : Granularity::coarse;
  const auto result =
      relation_eval(*provider, instances, split, granularity, args.seed, grid);

  fs::create_directories(args.out_dir);
  std::ostringstream report;
  write_metrics_report(result.metrics, result.selection, report);
  write_text_file((fs::path(args.out_dir) / "relation_metrics.tsv").string(), report.str());
  std::cout << "relation\t" << args.granularity << "-" << args.split
            << "\tP=" << result.metrics.precision << "\tR=" << result.metrics.recall
            << "\tF1=" << result.metrics.f1 << "\toov_forced_wrong=" << result.oov_forced_wrong
            << "\tdiscarded_split=" << result.discarded_split << '\n';
  return kExitOk;
}

// ---- paraphrase --------------------------------------------------------------

struct BacktranslateArgs {
  std::string compounds, embeddings, cache, out;
  std::string backend = "mock";
  std::string fixtures;
  std::vector<std::string> pivots;
  int max_in_flight = 1;
  // http backend
  std::string http_base_url, http_endpoint, http_auth_env;
  std::string http_json_pointer = "/translations";
  int http_timeout_ms = 10000;
};

int run_backtranslate(const BacktranslateArgs& args) {
  KvConfig echo;
  echo.set("backend", args.backend);
  echo.set("max_in_flight", std::to_string(args.max_in_flight));
  echo_config(echo);

  require_file(args.compounds, "compounds file");
  require_file(args.embeddings, "embedding file");
  const auto compounds = parse_compounds_file(args.compounds);
  const EmbeddingSpace space = load_embeddings_file(args.embeddings);
  const VocabularyRatioIdentifier langid(space);

  std::unique_ptr<TranslationBackend> backend;
  MockTranslationBackend mock;
  if (args.backend == "mock") {
    require_file(args.fixtures, "mock fixture file");
    mock = MockTranslationBackend::from_file(args.fixtures);
  } else if (args.backend == "http") {
    HttpBackendConfig config;
    config.base_url = args.http_base_url;
    config.endpoint_template = args.http_endpoint;
    config.auth_token_env = args.http_auth_env;
    config.response_json_pointer = args.http_json_pointer;
    config.timeout_ms = args.http_timeout_ms;
    backend = make_http_backend(config);
  } else {
    throw ConfigError("unknown backend: " + args.backend);
  }
  TranslationBackend& active = backend ? *backend : static_cast<TranslationBackend&>(mock);

  const auto pivots = args.pivots.empty() ? default_pivot_langs() : args.pivots;
  BacktranslationCache cache;
  if (!args.cache.empty() && fs::exists(args.cache)) {
    cache = BacktranslationCache::load_file(args.cache);
  }

  const auto outcomes = backtranslate_all(compounds, active, pivots, args.max_in_flight,
                                          args.cache.empty() ? nullptr : &cache);
  if (!args.cache.empty()) cache.save_file(args.cache);

  std::map<std::string, ParaphraseSet> sets;
  std::size_t pivot_failures = 0;
  std::vector<ParaphraseSet> all_sets;
  for (std::size_t i = 0; i < compounds.size(); ++i) {
    pivot_failures += outcomes[i].failed_pivots.size();
    ParaphraseSet set = filter_paraphrases(compounds[i], outcomes[i].candidates, langid);
    all_sets.push_back(set);
    if (!set.paraphrases.empty()) sets.emplace(compounds[i].surface(), std::move(set));
  }

  std::ofstream out(args.out);
  if (!out) throw Error("cannot open output for writing: " + args.out);
  save_paraphrase_sets(sets, out);

  const auto stats = paraphrase_stats(all_sets);
  std::cout << "backtranslation: compounds=" << compounds.size()
            << " mean_paraphrases=" << stats.mean_per_compound << " total=" << stats.total
            << " filtered_fraction=" << stats.filtered_fraction
            << " pivot_failures=" << pivot_failures << '\n';
  return kExitOk;
}

struct LoadCoocArgs {
  std::string input, out, embeddings;
};

int run_load_cooc(const LoadCoocArgs& args) {
  KvConfig echo;
  echo.set("input", args.input);
  echo_config(echo);

  require_file(args.input, "co-occurrence file");
  std::unordered_set<std::string> vocab;
  const bool filter = !args.embeddings.empty();
  if (filter) {
    require_file(args.embeddings, "embedding file");
    const EmbeddingSpace space = load_embeddings_file(args.embeddings);
    vocab.insert(space.tokens().begin(), space.tokens().end());
  }

  std::ifstream in(args.input);
  const CooccurrenceLoad load = load_cooccurrence(in, filter ? &vocab : nullptr);

  std::ofstream out(args.out);
  if (!out) throw Error("cannot open output for writing: " + args.out);
  save_paraphrase_sets(load.sets, out);

  std::vector<ParaphraseSet> sets;
  for (const auto& [_, set] : load.sets) sets.push_back(set);
  if (!sets.empty()) {
    const auto stats = paraphrase_stats(sets);
    std::cout << "cooccurrence: compounds=" << sets.size()
              << " mean_paraphrases=" << stats.mean_per_compound << " total=" << stats.total
              << " rejected_length=" << load.rejected_length
              << " duplicates=" << load.duplicates
              << " filtered_vocab=" << load.filtered_vocab << '\n';
  } else {
    std::cout << "cooccurrence: no paraphrases admitted (rejected_length="
              << load.rejected_length << ", filtered_vocab=" << load.filtered_vocab << ")\n";
  }
  return kExitOk;
}

// ---- grid / inspect -----------------------------------------------------------

struct GridArgs {
  std::string spec;
  int workers = 0; // 0 = use the spec's value
};

int run_grid_command(const GridArgs& args) {
  require_file(args.spec, "grid spec");
  DsmGridSpec spec = DsmGridSpec::from_json_file(args.spec);
  if (args.workers > 0) spec.workers = args.workers;

  KvConfig echo;
  echo.set("spec", args.spec);
  echo.set("workers", std::to_string(spec.workers));
  echo.set("seed", std::to_string(spec.seed));
  echo.set("output_dir", spec.output_dir);
  echo_config(echo);

  const AggregateReport report = run_grid(spec);
  std::cout << "task\trepresentation\tmean_f1\tstd_f1\tcells\tfailed\n";
  for (const auto& row : report.rows) {
    std::cout << row.task << '\t' << row.representation << '\t' << row.mean_f1 << '\t'
              << row.std_f1 << '\t' << row.cells << '\t' << row.failed << '\n';
  }
  std::cout << "results written to " << spec.output_dir << '\n';
  return kExitOk;
}

int run_inspect(const std::string& model_path) {
  require_file(model_path, "model file");
  const CompositionModel model = load_model_file(model_path);
  std::cout << "kind: " << to_string(model.kind) << '\n'
            << "dim: " << model.dim << '\n'
            << "parameters: " << parameter_count(model) << '\n';
  return kExitOk;
}

} // namespace

struct AppState {
  TrainArgs train;
  NeighborsArgs neighbors;
  EvalArgs eval_property;
  EvalArgs eval_relation;
  BacktranslateArgs backtranslate;
  LoadCoocArgs load_cooc;
  GridArgs grid;
  std::string inspect_model;
  int exit_code = kExitOk;
};

std::unique_ptr<CLI::App> make_app(std::shared_ptr<AppState>& state) {
  if (!state) state = std::make_shared<AppState>();
  auto app = std::make_unique<CLI::App>(
      "noun compound representation toolkit: train composition functions, "
      "gather paraphrases, and evaluate representations");
  app->require_subcommand(1);

  // train
  auto* train = app->add_subcommand("train", "train a composition or paraphrase encoder");
  auto& t = state->train;
  train->add_option("--kind", t.kind, "composition function: add|fulladd|matrix|lstm");
  train->add_option("--embeddings", t.embeddings, "embedding text file")->required();
  train->add_option("--compounds", t.compounds, "compounds TSV (w1\\tw2[\\tfreq])")->required();
  train->add_option("--out", t.out_dir, "output directory")->required();
  train->add_option("--config", t.config_path, "key = value training config file");
  train->add_option("--frequencies", t.frequencies, "token frequency sidecar TSV");
  train->add_option("--paraphrases", t.paraphrases,
                    "paraphrase TSV (required for the paraphrase objective)");
  train->add_option("--paraphrase-source", t.paraphrase_source,
                    "paraphrase source tag: cooccurrence|backtranslation");
  train->add_option("--objective", t.objective, "compositional|paraphrase");
  train->add_option("--distance", t.distance, "compositional distance: mse|cosine");
  train->add_option("--margin", t.margin, "margin for the paraphrase hinge loss");
  train->add_option("--learning-rate", t.learning_rate, "gradient descent step size");
  train->add_option("--epochs", t.epochs, "training epochs");
  train->add_option("--batch-size", t.batch_size, "mini-batch size");
  train->add_option("--normalize-inputs", t.normalize_inputs,
                    "length-normalize vectors drawn from the space (true|false)");
  train->add_option("--patience", t.patience, "early stopping patience, 0 disables");
  train->add_option("--negatives", t.negatives, "negatives sampled per positive pair");
  train->add_option("--seed", t.seed, "seed for split/init/sampling streams")
      ->each([&t](const std::string&) { t.seed_set = true; });
  train->callback([state] { state->exit_code = run_train(state->train); });

  // paraphrase
  auto* paraphrase =
      app->add_subcommand("paraphrase", "acquire and filter noun compound paraphrases");
  paraphrase->require_subcommand(1);
  auto* bt = paraphrase->add_subcommand("backtranslate",
                                        "pivot-language paraphrases via a translation backend");
  auto& b = state->backtranslate;
  bt->add_option("--compounds", b.compounds, "compounds TSV")->required();
  bt->add_option("--embeddings", b.embeddings,
                 "embedding file backing the English-vocabulary check")
      ->required();
  bt->add_option("--out", b.out, "output paraphrase TSV")->required();
  bt->add_option("--backend", b.backend, "mock|http");
  bt->add_option("--fixtures", b.fixtures, "mock backend fixture TSV");
  bt->add_option("--cache", b.cache, "candidate cache file, read and updated");
  bt->add_option("--pivots", b.pivots, "pivot languages (default fr,it,es,ro)")
      ->delimiter(',');
  bt->add_option("--max-in-flight", b.max_in_flight, "concurrent backend requests");
  bt->add_option("--http-base-url", b.http_base_url, "http backend base URL");
  bt->add_option("--http-endpoint", b.http_endpoint,
                 "endpoint template with {from},{to},{text}");
  bt->add_option("--http-auth-env", b.http_auth_env, "env var holding the bearer token");
  bt->add_option("--http-json-pointer", b.http_json_pointer,
                 "JSON pointer to the candidate array");
  bt->add_option("--http-timeout-ms", b.http_timeout_ms, "request timeout");
  bt->callback([state] { state->exit_code = run_backtranslate(state->backtranslate); });

  auto* cooc = paraphrase->add_subcommand("load-cooc",
                                          "load and normalize co-occurrence paraphrases");
  auto& c = state->load_cooc;
  cooc->add_option("--input", c.input, "co-occurrence TSV (w1\\tw2\\tparaphrase)")->required();
  cooc->add_option("--out", c.out, "normalized paraphrase TSV")->required();
  cooc->add_option("--embeddings", c.embeddings, "vocabulary filter embedding file");
  cooc->callback([state] { state->exit_code = run_load_cooc(state->load_cooc); });

  // neighbors
  auto* neighbors =
      app->add_subcommand("neighbors", "nearest-neighbor analysis and categorization");
  auto& n = state->neighbors;
  neighbors->add_option("--embeddings", n.embeddings, "embedding text file")->required();
  neighbors->add_option("--compounds", n.compounds, "compounds TSV")->required();
  neighbors->add_option("--report", n.report, "output report TSV")->required();
  neighbors->add_option("--k", n.k, "neighbors per target");
  neighbors->add_option("--taxonomy", n.taxonomy, "taxonomy file for the similarity category");
  neighbors->add_option("--backtranslations", n.backtranslations,
                        "backtranslation paraphrase TSV for the paraphrase category");
  neighbors->add_option("--frequencies", n.frequencies, "token frequency sidecar TSV");
  neighbors->add_option("--representation", n.provider.representation,
                        "distributional|add|fulladd|matrix|lstm|cooccurrence|"
                        "backtranslation|random_baseline");
  neighbors->add_option("--model", n.provider.model_path,
                        "trained model file for composed representations");
  neighbors->add_option("--cohort", n.cohort, "rare|frequent|all");
  neighbors->add_option("--cohort-size", n.cohort_size, "targets per cohort");
  neighbors->add_option("--rare-threshold", n.rare_threshold,
                        "corpus count below which a token is rare");
  neighbors->add_option("--seed", n.seed, "seed for the compound split");
  neighbors->add_option("--rare-curve", n.rare_curve_path,
                        "also write the rare-neighbor frequency curve TSV here");
  neighbors->add_option("--bins", n.bins, "frequency bin edges for --rare-curve")
      ->delimiter(',');
  neighbors->callback([state] { state->exit_code = run_neighbors(state->neighbors); });

  // eval-property
  auto* property = app->add_subcommand("eval-property", "binary property prediction");
  auto& p = state->eval_property;
  property->add_option("--embeddings", p.embeddings, "embedding text file")->required();
  property->add_option("--properties", p.data, "property TSV (item\\tproperty\\t{1|0})")
      ->required();
  property->add_option("--out", p.out_dir, "output directory")->required();
  property->add_option("--frequencies", p.frequencies, "token frequency sidecar TSV");
  property->add_option("--representation", p.provider.representation, "representation kind");
  property->add_option("--model", p.provider.model_path, "trained model file");
  property->add_option("--seed", p.seed, "split seed");
  property->callback([state] { state->exit_code = run_eval_property(state->eval_property); });

  // eval-relation
  auto* relation = app->add_subcommand("eval-relation", "compound relation classification");
  auto& r = state->eval_relation;
  relation->add_option("--embeddings", r.embeddings, "embedding text file")->required();
  relation->add_option("--data", r.data, "labeled compounds TSV (w1\\tw2\\tfine\\tcoarse)")
      ->required();
  relation->add_option("--out", r.out_dir, "output directory")->required();
  relation->add_option("--frequencies", r.frequencies, "token frequency sidecar TSV");
  relation->add_option("--split", r.split, "random|lexical");
  relation->add_option("--granularity", r.granularity, "coarse|fine");
  relation->add_option("--representation", r.provider.representation, "representation kind");
  relation->add_option("--model", r.provider.model_path, "trained model file");
  relation->add_option("--seed", r.seed, "split seed");
  relation->callback([state] { state->exit_code = run_eval_relation(state->eval_relation); });

  // grid
  auto* grid = app->add_subcommand("grid", "run a DSM x representation x task grid");
  auto& g = state->grid;
  grid->add_option("--spec", g.spec, "grid spec JSON")->required();
  grid->add_option("--workers", g.workers, "override the spec's worker count");
  grid->callback([state] { state->exit_code = run_grid_command(state->grid); });

  // inspect
  auto* inspect = app->add_subcommand("inspect", "describe a serialized model file");
  inspect->add_option("model", state->inspect_model, "model file")->required();
  inspect->callback([state] { state->exit_code = run_inspect(state->inspect_model); });

  return app;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("ncemb");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
  std::shared_ptr<AppState> state;
  auto app = make_app(state);
  try {
    app->parse(argc, argv);
    return state->exit_code;
  } catch (const CLI::CallForHelp& e) {
    return app->exit(e);
  } catch (const CLI::ParseError& e) {
    app->exit(e);
    return kExitConfig;
  } catch (const MissingResourceError& e) {
    std::cerr << "error:missing-resource: " << e.what() << '\n';
    return kExitMissingResource;
  } catch (const ParseError& e) {
    std::cerr << "error:parse: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error:config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const TrainError& e) {
    std::cerr << "error:training: " << e.what() << '\n';
    return kExitRunFailure;
  } catch (const EvalError& e) {
    std::cerr << "error:eval: " << e.what() << '\n';
    return kExitRunFailure;
  } catch (const Error& e) {
    std::cerr << "error:run: " << e.what() << '\n';
    return kExitRunFailure;
  } catch (const std::exception& e) {
    std::cerr << "error:internal: " << e.what() << '\n';
    return kExitRunFailure;
  }
}

} // namespace ncemb::cli
