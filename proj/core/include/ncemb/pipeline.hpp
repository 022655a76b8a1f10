#pragma once

#include "ncemb/embeddings.hpp"
#include "ncemb/eval.hpp"
#include "ncemb/neighbors.hpp"
#include "ncemb/paraphrase.hpp"
#include "ncemb/provider.hpp"
#include "ncemb/train.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ncemb {

// The seven evaluated representations plus a seeded random baseline used
// as a diagnostic control in end-to-end checks.
enum class RepresentationKind {
  distributional,
  add,
  full_add,
  matrix,
  lstm,
  cooccurrence,
  backtranslation,
  random_baseline,
};

std::string to_string(RepresentationKind k);
RepresentationKind representation_kind_from_string(const std::string& name);
bool is_paraphrase_kind(RepresentationKind k);
bool is_compositional_kind(RepresentationKind k);

struct RepresentationSpec {
  RepresentationKind kind = RepresentationKind::distributional;
  TrainConfig train;
  std::string paraphrase_path; // required iff kind is a paraphrase kind

  void validate() const;
};

struct RepresentationBuild {
  std::unique_ptr<VectorProvider> provider;
  std::optional<CompositionModel> model; // trained kinds only
  TrainHistory history;
  std::size_t dropped_train = 0;
};

/// Trains (when the kind requires it) and wraps the representation as a
/// compound -> vector provider over the given space and splits.
RepresentationBuild build_representation(
    const RepresentationSpec& spec, const EmbeddingSpace& space,
    std::span<const NounCompound> train_set, std::span<const NounCompound> val_set,
    const std::map<std::string, ParaphraseSet>* paraphrases, std::uint64_t seed);

/// Wraps an already-trained model (or none, for distributional and the
/// random baseline) as a provider. The space must outlive the provider.
std::unique_ptr<VectorProvider> make_provider(RepresentationKind kind,
                                              const EmbeddingSpace& space,
                                              std::optional<CompositionModel> model,
                                              bool normalize_inputs, std::uint64_t seed);

struct EmbeddingSpec {
  std::string name;      // embedding algorithm label
  int window = 0;
  int dim = 0;
  std::string path;
  std::string frequencies_path; // optional sidecar
};

struct RelationTaskSpec {
  std::string data_path;
  SplitKind split = SplitKind::random_split;
  Granularity granularity = Granularity::coarse;
};

struct PropertyTaskSpec {
  std::string data_path;
};

struct NeighborsTaskSpec {
  int k = 10;
  std::string taxonomy_path;        // optional
  std::string backtranslation_path; // optional, for the paraphrase category
  std::string cohort = "rare";      // rare | frequent | all
  std::uint64_t rare_threshold = 10;
  std::size_t cohort_size = 100;
};

struct DsmGridSpec {
  std::vector<EmbeddingSpec> embeddings;
  std::vector<RepresentationSpec> representations;
  std::optional<RelationTaskSpec> relation;
  std::optional<PropertyTaskSpec> property;
  std::optional<NeighborsTaskSpec> neighbors;
  std::string compounds_path; // representation training compounds
  std::string output_dir;
  std::uint64_t seed = 0;
  int workers = 1;
  std::vector<GridPoint> classifier_grid; // empty -> default_grid()

  static DsmGridSpec from_json(std::istream& in);
  static DsmGridSpec from_json_file(const std::string& path);
  void validate() const;
};

struct CellResult {
  std::string cell_id; // stable hash of (representation, DSM metadata, task, seed)
  std::string embedding_name;
  int window = 0;
  int dim = 0;
  std::string representation;
  std::string task;
  bool ok = false;
  std::string error;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t oov_forced = 0;
};

struct AggregateRow {
  std::string representation;
  std::string task;
  double mean_f1 = 0.0;
  double std_f1 = 0.0; // population standard deviation across DSMs
  std::size_t cells = 0;
  std::size_t failed = 0;
};

struct BestRow {
  std::string task;
  CellResult cell;
};

struct AggregateReport {
  std::vector<CellResult> cells;     // sorted by (task, representation, embedding)
  std::vector<AggregateRow> rows;    // sorted by (task, representation)
  std::vector<BestRow> best_per_task;
};

// Runs every (DSM x representation x task) cell on a bounded worker
// pool, persists per-cell records incrementally (cells.jsonl, resumable
// by cell id), then writes results.tsv / aggregate.tsv / best.tsv. A
// representation x task row with no surviving cell aborts the report.
AggregateReport run_grid(const DsmGridSpec& spec);

/// Recomputes the aggregate purely from a persisted cells.jsonl stream.
AggregateReport aggregate_from_journal(std::istream& in);

std::string cell_identity(const EmbeddingSpec& dsm, const RepresentationSpec& rep,
                          const std::string& task, std::uint64_t seed);

void write_results_tsv(const AggregateReport& report, std::ostream& out);
void write_aggregate_tsv(const AggregateReport& report, std::ostream& out);
void write_best_tsv(const AggregateReport& report, std::ostream& out);

} // namespace ncemb
