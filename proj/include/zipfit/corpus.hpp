#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "zipfit/sample.hpp"

namespace zipfit::corpus {

/// A literal open/close bracket pair; everything from an opener through the
/// next closer is deleted. Written as "<open> ... <close>", e.g. "[** ... **]".
struct DeidPattern {
  std::string open;
  std::string close;
  bool operator==(const DeidPattern&) const = default;
};

DeidPattern parse_deid_pattern(std::string_view spec);
std::string format_deid_pattern(const DeidPattern& p);

struct TokenizerConfig {
  bool lowercase = true;
  bool digit_folding = true;
  bool strip_punctuation = true;
  std::vector<DeidPattern> deid_patterns{{"[**", "**]"}};
  std::int64_t min_frequency = 2;
  std::optional<std::filesystem::path> lemma_map_path;
  std::optional<std::filesystem::path> stopword_list_path;

  bool operator==(const TokenizerConfig&) const = default;
};

/// Throws std::invalid_argument if min_frequency < 1.
void validate(const TokenizerConfig& cfg);

struct FrequencyTable {
  std::map<std::string, std::int64_t> entries;
  std::int64_t total_tokens = 0;
  std::int64_t unique_tokens = 0;

  bool operator==(const FrequencyTable&) const = default;
};

/// Lowercase, digits to 'D', pure numbers ("2.8", "110/65", "34") to
/// "digit", punctuation removed. Returns "" when nothing is left.
std::string normalize_token(std::string_view raw, const TokenizerConfig& cfg);

/// Replaces every de-identification span with a single space. An opener
/// without a closer is left as is.
std::string remove_deid(std::string_view text, std::span<const DeidPattern> patterns);

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg);
/// Throws std::runtime_error on a stream failure.
std::vector<std::string> tokenize(std::istream& in, const TokenizerConfig& cfg);

using LemmaMap = std::unordered_map<std::string, std::string>;
using StopWords = std::unordered_set<std::string>;

/// Two whitespace-separated columns per line; blank lines skipped. Throws
/// std::runtime_error naming the line on anything else.
LemmaMap parse_lemma_map(std::istream& in);
LemmaMap load_lemma_map(const std::filesystem::path& path);
/// One token per line; surrounding whitespace trimmed, blank lines skipped.
StopWords parse_stopwords(std::istream& in);
StopWords load_stopwords(const std::filesystem::path& path);

/// Lemma replacement first, then stop-word removal on the replaced token.
std::vector<std::string> apply_lemma_and_stopwords(std::vector<std::string> tokens, const LemmaMap& lemmas,
                                                   const StopWords& stopwords);

using Counts = std::map<std::string, std::int64_t>;

Counts count_tokens(std::span<const std::string> tokens);
void merge_counts(Counts& into, const Counts& from);
/// Drops entries below min_frequency and recomputes the totals.
FrequencyTable finalize(Counts counts, std::int64_t min_frequency);

FrequencyTable build_frequency_table(std::span<const std::string> tokens, const TokenizerConfig& cfg);

/// Full text pipeline over many documents: tokenize, lemma map and stop
/// words from the config paths, count per document, merge, filter.
FrequencyTable count_documents(std::span<const std::filesystem::path> files, const TokenizerConfig& cfg,
                               unsigned threads = 0);

/// Descending count, ties by token ascending. Throws if n < 1.
std::vector<std::pair<std::string, std::int64_t>> top_words(const FrequencyTable& table, std::size_t n);

/// Header `token,count`, rows by count descending then token ascending.
void write_frequency_csv(const FrequencyTable& table, std::ostream& out);
/// Reads the format above (row order free). No frequency filtering.
FrequencyTable read_frequency_csv(std::istream& in);
FrequencyTable read_frequency_csv(const std::filesystem::path& path);

/// The counts as an integer sample for fitting.
Sample to_sample(const FrequencyTable& table);

}  // namespace zipfit::corpus
