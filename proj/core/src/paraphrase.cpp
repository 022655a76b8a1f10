#include "ncemb/paraphrase.hpp"

#include "ncemb/error.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <future>
#include <istream>
#include <ostream>
#include <sstream>

namespace ncemb {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

std::vector<std::string> lower_tokens(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(lower(t));
  return out;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::string mock_key(const std::string& from_lang, const std::string& to_lang,
                     const std::string& text) {
  return from_lang + "\x1f" + to_lang + "\x1f" + lower(text);
}

std::string cache_key(const NounCompound& nc, const std::string& pivot) {
  return nc.w1 + "\x1f" + nc.w2 + "\x1f" + pivot;
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

} // namespace

std::string to_string(ParaphraseSource s) {
  return s == ParaphraseSource::backtranslation ? "backtranslation" : "cooccurrence";
}

bool ParaphraseSet::contains(const std::vector<std::string>& tokens) const {
  const auto needle = lower_tokens(tokens);
  return std::any_of(paraphrases.begin(), paraphrases.end(),
                     [&](const auto& p) { return lower_tokens(p) == needle; });
}

MockTranslationBackend MockTranslationBackend::from_stream(std::istream& in) {
  MockTranslationBackend backend;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw ParseError("expected \"from\\tto\\ttext\\tcandidate\": " + line, line_no);
    }
    backend.add(fields[0], fields[1], fields[2], fields[3]);
  }
  return backend;
}

MockTranslationBackend MockTranslationBackend::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingResourceError("cannot open translation fixture: " + path);
  return from_stream(in);
}

void MockTranslationBackend::add(const std::string& from_lang, const std::string& to_lang,
                                 const std::string& text, const std::string& candidate) {
  table_[mock_key(from_lang, to_lang, text)].push_back(candidate);
}

std::vector<std::string> MockTranslationBackend::translate(const std::string& text,
                                                           const std::string& from_lang,
                                                           const std::string& to_lang) {
  auto it = table_.find(mock_key(from_lang, to_lang, text));
  if (it == table_.end()) return {};
  return it->second;
}

VocabularyRatioIdentifier::VocabularyRatioIdentifier(
    std::unordered_set<std::string> vocabulary, double min_ratio)
    : vocabulary_(std::move(vocabulary)), min_ratio_(min_ratio) {}

VocabularyRatioIdentifier::VocabularyRatioIdentifier(const EmbeddingSpace& space,
                                                     double min_ratio)
    : min_ratio_(min_ratio) {
  for (const auto& t : space.tokens()) vocabulary_.insert(lower(t));
}

bool VocabularyRatioIdentifier::is_english(const std::string& text) const {
  const auto tokens = tokenize(text);
  if (tokens.empty()) return false;
  std::size_t known = 0;
  for (const auto& t : tokens) {
    if (vocabulary_.count(lower(t))) ++known;
  }
  return static_cast<double>(known) >=
         min_ratio_ * static_cast<double>(tokens.size());
}

const std::vector<std::string>& default_pivot_langs() {
  static const std::vector<std::string> pivots{"fr", "it", "es", "ro"};
  return pivots;
}

BacktranslationOutcome backtranslate(const NounCompound& nc, TranslationBackend& backend,
                                     const std::vector<std::string>& pivot_langs) {
  if (pivot_langs.empty()) throw ConfigError("backtranslate: no pivot languages");
  const std::string text = nc.w1 + " " + nc.w2;

  BacktranslationOutcome outcome;
  for (const auto& pivot : pivot_langs) {
    try {
      for (const auto& forward : backend.translate(text, "en", pivot)) {
        for (auto& back : backend.translate(forward, pivot, "en")) {
          outcome.candidates.push_back(std::move(back));
        }
      }
    } catch (const std::exception& e) {
      outcome.failed_pivots.push_back(pivot + ": " + e.what());
    }
  }
  if (!pivot_langs.empty() && outcome.failed_pivots.size() == pivot_langs.size()) {
    throw Error("backtranslation failed for every pivot of \"" + text + "\"");
  }
  return outcome;
}

ParaphraseSet filter_paraphrases(const NounCompound& nc, const std::vector<std::string>& raw,
                                 const LanguageIdentifier& langid) {
  ParaphraseSet set;
  set.compound = nc;
  set.source = ParaphraseSource::backtranslation;
  set.raw_candidates = raw.size();

  const std::vector<std::string> self{lower(nc.w1), lower(nc.w2)};
  std::vector<std::vector<std::string>> seen_lower;
  for (const auto& candidate : raw) {
    const auto tokens = tokenize(candidate);
    if (tokens.empty()) continue;
    const auto lowered = lower_tokens(tokens);
    if (lowered == self) continue; // the compound itself is never a paraphrase
    if (!langid.is_english(candidate)) continue;
    if (std::find(seen_lower.begin(), seen_lower.end(), lowered) != seen_lower.end()) {
      continue;
    }
    seen_lower.push_back(lowered);
    set.paraphrases.push_back(tokens);
  }
  return set;
}

CooccurrenceLoad load_cooccurrence(std::istream& in,
                                   const std::unordered_set<std::string>* vocabulary) {
  CooccurrenceLoad load;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw ParseError("expected \"w1\\tw2\\tparaphrase\": " + line, line_no);
    }
    NounCompound nc;
    try {
      nc = NounCompound(fields[0], fields[1]);
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
    if (vocabulary && (!vocabulary->count(nc.w1) || !vocabulary->count(nc.w2))) {
      ++load.filtered_vocab;
      continue;
    }
    const auto tokens = tokenize(fields[2]);
    if (tokens.size() < 3 || tokens.size() > 5) {
      ++load.rejected_length;
      continue;
    }

    auto [it, created] = load.sets.try_emplace(nc.surface());
    ParaphraseSet& set = it->second;
    if (created) {
      set.compound = nc;
      set.source = ParaphraseSource::cooccurrence;
    }
    ++set.raw_candidates;
    if (set.contains(tokens)) {
      ++load.duplicates;
      continue;
    }
    const std::vector<std::string> self{lower(nc.w1), lower(nc.w2)};
    if (lower_tokens(tokens) == self) continue;
    set.paraphrases.push_back(tokens);
  }
  return load;
}

ParaphraseStats paraphrase_stats(const std::vector<ParaphraseSet>& sets) {
  if (sets.empty()) throw Error("paraphrase_stats: empty collection");
  std::size_t total = 0;
  std::size_t raw = 0;
  for (const auto& s : sets) {
    total += s.paraphrases.size();
    raw += s.raw_candidates;
  }
  ParaphraseStats stats;
  stats.total = total;
  stats.mean_per_compound = static_cast<double>(total) / static_cast<double>(sets.size());
  stats.filtered_fraction =
      raw == 0 ? 0.0 : 1.0 - static_cast<double>(total) / static_cast<double>(raw);
  return stats;
}

BacktranslationCache BacktranslationCache::load(std::istream& in) {
  BacktranslationCache cache;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw ParseError("expected \"w1\\tw2\\tpivot\\tcandidate\": " + line, line_no);
    }
    auto& entry = cache.entries_[fields[0] + "\x1f" + fields[1] + "\x1f" + fields[2]];
    if (!fields[3].empty()) entry.push_back(fields[3]);
  }
  return cache;
}

BacktranslationCache BacktranslationCache::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingResourceError("cannot open backtranslation cache: " + path);
  return load(in);
}

void BacktranslationCache::save(std::ostream& out) const {
  for (const auto& [key, candidates] : entries_) {
    const auto fields = [&] {
      std::vector<std::string> f;
      std::size_t start = 0;
      while (true) {
        const auto sep = key.find('\x1f', start);
        if (sep == std::string::npos) {
          f.push_back(key.substr(start));
          break;
        }
        f.push_back(key.substr(start, sep - start));
        start = sep + 1;
      }
      return f;
    }();
    if (candidates.empty()) {
      out << fields[0] << '\t' << fields[1] << '\t' << fields[2] << "\t\n";
      continue;
    }
    for (const auto& c : candidates) {
      out << fields[0] << '\t' << fields[1] << '\t' << fields[2] << '\t' << c << '\n';
    }
  }
}

void BacktranslationCache::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  save(out);
}

std::optional<std::vector<std::string>> BacktranslationCache::find(
    const NounCompound& nc, const std::string& pivot) const {
  auto it = entries_.find(cache_key(nc, pivot));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void BacktranslationCache::store(const NounCompound& nc, const std::string& pivot,
                                 std::vector<std::string> candidates) {
  entries_[cache_key(nc, pivot)] = std::move(candidates);
}

std::vector<BacktranslationOutcome> backtranslate_all(
    const std::vector<NounCompound>& compounds, TranslationBackend& backend,
    const std::vector<std::string>& pivot_langs, int max_in_flight,
    BacktranslationCache* cache) {
  if (max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");

  // Per compound: serve each pivot from the cache when possible, query
  // the backend otherwise. Backend calls across compounds run on a
  // bounded pool; results land at the compound's index, so the output
  // order never depends on scheduling.
  auto run_one = [&](const NounCompound& nc) {
    BacktranslationOutcome outcome;
    const std::string text = nc.w1 + " " + nc.w2;
    for (const auto& pivot : pivot_langs) {
      if (cache) {
        if (auto cached = cache->find(nc, pivot)) {
          outcome.candidates.insert(outcome.candidates.end(), cached->begin(),
                                    cached->end());
          continue;
        }
      }
      try {
        std::vector<std::string> fresh;
        for (const auto& forward : backend.translate(text, "en", pivot)) {
          for (auto& back : backend.translate(forward, pivot, "en")) {
            fresh.push_back(std::move(back));
          }
        }
        outcome.candidates.insert(outcome.candidates.end(), fresh.begin(), fresh.end());
        if (cache) cache->store(nc, pivot, std::move(fresh));
      } catch (const std::exception& e) {
        outcome.failed_pivots.push_back(pivot + ": " + e.what());
      }
    }
    return outcome;
  };

  std::vector<BacktranslationOutcome> results(compounds.size());
  if (max_in_flight == 1 || compounds.size() <= 1) {
    for (std::size_t i = 0; i < compounds.size(); ++i) results[i] = run_one(compounds[i]);
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> workers;
  const int pool = std::min<int>(max_in_flight, static_cast<int>(compounds.size()));
  for (int w = 0; w < pool; ++w) {
    workers.push_back(std::async(std::launch::async, [&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= compounds.size()) return;
        results[i] = run_one(compounds[i]);
      }
    }));
  }
  for (auto& f : workers) f.get();
  return results;
}

void save_paraphrase_sets(const std::map<std::string, ParaphraseSet>& sets,
                          std::ostream& out) {
  for (const auto& [_, set] : sets) {
    for (const auto& p : set.paraphrases) {
      out << set.compound.w1 << '\t' << set.compound.w2 << '\t' << join(p) << '\n';
    }
  }
}

std::map<std::string, ParaphraseSet> load_paraphrase_sets(std::istream& in,
                                                          ParaphraseSource source) {
  std::map<std::string, ParaphraseSet> sets;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw ParseError("expected \"w1\\tw2\\tparaphrase\": " + line, line_no);
    }
    NounCompound nc;
    try {
      nc = NounCompound(fields[0], fields[1]);
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
    const auto tokens = tokenize(fields[2]);
    if (tokens.empty()) throw ParseError("empty paraphrase", line_no);

    auto [it, created] = sets.try_emplace(nc.surface());
    ParaphraseSet& set = it->second;
    if (created) {
      set.compound = nc;
      set.source = source;
    }
    ++set.raw_candidates;
    if (set.contains(tokens)) continue;
    set.paraphrases.push_back(tokens);
  }
  return sets;
}

std::map<std::string, ParaphraseSet> load_paraphrase_sets_file(const std::string& path,
                                                               ParaphraseSource source) {
  std::ifstream in(path);
  if (!in) throw MissingResourceError("cannot open paraphrase file: " + path);
  return load_paraphrase_sets(in, source);
}

} // namespace ncemb
