#pragma once

#include "ncemb/embeddings.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace ncemb {

enum class ParaphraseSource { backtranslation, cooccurrence };

std::string to_string(ParaphraseSource s);

struct ParaphraseSet {
  NounCompound compound;
  std::vector<std::vector<std::string>> paraphrases; // tokenized, deduplicated
  ParaphraseSource source = ParaphraseSource::backtranslation;
  std::size_t raw_candidates = 0; // before filtering, for filtered_fraction

  /// True when `tokens` (case-insensitively) is one of the paraphrases.
  bool contains(const std::vector<std::string>& tokens) const;
};

class TranslationBackend {
public:
  virtual ~TranslationBackend() = default;
  /// All candidate translations the provider suggests, in provider order.
  virtual std::vector<std::string> translate(const std::string& text,
                                             const std::string& from_lang,
                                             const std::string& to_lang) = 0;
};

// Offline deterministic backend driven by a fixture table. Fixture TSV:
// "from\tto\ttext\tcandidate", one candidate per line, file order kept.
class MockTranslationBackend : public TranslationBackend {
public:
  MockTranslationBackend() = default;
  static MockTranslationBackend from_stream(std::istream& in);
  static MockTranslationBackend from_file(const std::string& path);

  void add(const std::string& from_lang, const std::string& to_lang,
           const std::string& text, const std::string& candidate);

  std::vector<std::string> translate(const std::string& text,
                                     const std::string& from_lang,
                                     const std::string& to_lang) override;

private:
  std::map<std::string, std::vector<std::string>> table_;
};

/// Generic HTTP adapter; the request shape is configured per provider.
struct HttpBackendConfig {
  std::string base_url;               // e.g. "http://localhost:8080"
  std::string endpoint_template;      // "{from}", "{to}", "{text}" substituted
  std::string auth_token_env;         // env var holding the bearer token, may be empty
  std::string response_json_pointer = "/translations"; // array of strings
  int timeout_ms = 10000;
};

std::unique_ptr<TranslationBackend> make_http_backend(HttpBackendConfig config);

class LanguageIdentifier {
public:
  virtual ~LanguageIdentifier() = default;
  virtual bool is_english(const std::string& text) const = 0;
};

/// English iff at least half of the whitespace tokens are in-vocabulary.
class VocabularyRatioIdentifier : public LanguageIdentifier {
public:
  explicit VocabularyRatioIdentifier(std::unordered_set<std::string> vocabulary,
                                     double min_ratio = 0.5);
  explicit VocabularyRatioIdentifier(const EmbeddingSpace& space,
                                     double min_ratio = 0.5);
  bool is_english(const std::string& text) const override;

private:
  std::unordered_set<std::string> vocabulary_;
  double min_ratio_;
};

/// The paper-motivated default pivot set (Romance languages).
const std::vector<std::string>& default_pivot_langs();

struct BacktranslationOutcome {
  std::vector<std::string> candidates;    // pivot order, then backend order
  std::vector<std::string> failed_pivots; // recorded and skipped
};

/// Forward-translate to each pivot, back-translate every suggestion,
/// and return the multiset union. Throws when every pivot fails.
BacktranslationOutcome backtranslate(const NounCompound& nc,
                                     TranslationBackend& backend,
                                     const std::vector<std::string>& pivot_langs);

/// Self-removal, language filtering, tokenization, deduplication, in
/// that order. An empty result is a valid set.
ParaphraseSet filter_paraphrases(const NounCompound& nc,
                                 const std::vector<std::string>& raw,
                                 const LanguageIdentifier& langid);

struct CooccurrenceLoad {
  std::map<std::string, ParaphraseSet> sets; // keyed by compound surface
  std::size_t rejected_length = 0;           // outside the 3..5-token window
  std::size_t duplicates = 0;
  std::size_t filtered_vocab = 0;            // compound constituents not in vocab
};

// TSV "w1\tw2\tparaphrase tokens space-separated". `vocabulary` is an
// optional constituent filter; pass nullptr to keep every compound.
CooccurrenceLoad load_cooccurrence(std::istream& in,
                                   const std::unordered_set<std::string>* vocabulary);

struct ParaphraseStats {
  double mean_per_compound = 0.0;
  std::size_t total = 0;
  double filtered_fraction = 0.0;
};

/// Mean over compounds (zero-paraphrase sets stay in the denominator).
ParaphraseStats paraphrase_stats(const std::vector<ParaphraseSet>& sets);

// Cache of raw backtranslation candidates keyed by (w1, w2, pivot), so
// re-runs never re-query a backend. File format:
// "w1\tw2\tpivot\tcandidate". An empty candidate column records a
// pivot that was queried and returned nothing.
class BacktranslationCache {
public:
  BacktranslationCache() = default;
  static BacktranslationCache load(std::istream& in);
  static BacktranslationCache load_file(const std::string& path);
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;

  std::optional<std::vector<std::string>> find(const NounCompound& nc,
                                               const std::string& pivot) const;
  void store(const NounCompound& nc, const std::string& pivot,
             std::vector<std::string> candidates);

  std::size_t size() const { return entries_.size(); }

private:
  std::map<std::string, std::vector<std::string>> entries_;
};

/// Runs backtranslate over many compounds with at most `max_in_flight`
/// concurrent backend calls; the output order matches `compounds`
/// regardless of scheduling. A cache, when given, is consulted first
/// and filled with fresh results.
std::vector<BacktranslationOutcome> backtranslate_all(
    const std::vector<NounCompound>& compounds, TranslationBackend& backend,
    const std::vector<std::string>& pivot_langs, int max_in_flight,
    BacktranslationCache* cache = nullptr);

/// Paraphrase-set TSV in the co-occurrence line format, usable as the
/// training input for the paraphrase objective.
void save_paraphrase_sets(const std::map<std::string, ParaphraseSet>& sets,
                          std::ostream& out);
std::map<std::string, ParaphraseSet> load_paraphrase_sets(std::istream& in,
                                                          ParaphraseSource source);
std::map<std::string, ParaphraseSet> load_paraphrase_sets_file(const std::string& path,
                                                               ParaphraseSource source);

} // namespace ncemb
