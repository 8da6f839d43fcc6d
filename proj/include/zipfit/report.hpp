#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zipfit/compare.hpp"
#include "zipfit/corpus.hpp"
#include "zipfit/dist.hpp"
#include "zipfit/fit.hpp"
#include "zipfit/gof.hpp"

namespace zipfit::report {

enum class InputKind { text, freq_csv };

struct InputSpec {
  std::string label;
  std::filesystem::path path;  // a file, or for text a directory of documents
  InputKind kind = InputKind::text;
  bool operator==(const InputSpec&) const = default;
};

struct AnalysisConfig {
  std::vector<InputSpec> inputs;
  corpus::TokenizerConfig tokenizer;
  int n_boot_gof = 1000;
  int n_boot_ci = 1000;
  std::uint64_t seed = 0;
  std::size_t min_tail = 10;
  std::size_t top_n = 20;
  std::filesystem::path output_dir = "zipfit_out";
  bool include_exponential_ccdf = false;
  unsigned threads = 0;

  bool operator==(const AnalysisConfig&) const = default;
};

/// Reads a JSON config. Relative paths resolve against the config file's
/// directory. Throws std::runtime_error with a readable message.
AnalysisConfig load_config(const std::filesystem::path& path);
AnalysisConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir);
/// Throws std::invalid_argument on duplicate labels or bad settings.
void validate(const AnalysisConfig& cfg);

struct CcdfSeries {
  std::string family;  // "empirical" or a family name
  std::vector<dist::CcdfPoint> points;
  bool operator==(const CcdfSeries&) const = default;
};

struct LabelReport {
  std::string label;
  std::optional<std::string> error;
  std::int64_t total_tokens = 0;
  std::int64_t unique_tokens = 0;
  fit::FitResult power_law;
  gof::GofResult gof;
  std::vector<fit::FitResult> alternatives;
  std::vector<compare::ComparisonResult> comparisons;
  compare::SupportLabel support = compare::SupportLabel::none;
  std::vector<std::pair<std::string, std::int64_t>> top_words;
  std::vector<CcdfSeries> ccdf;

  bool operator==(const LabelReport&) const = default;
};

struct ReportBundle {
  std::uint64_t seed = 0;
  std::vector<LabelReport> labels;
  bool operator==(const ReportBundle&) const = default;
};

/// Seed used for one label's bootstraps: derive_seed(seed, stable_hash(label)).
std::uint64_t label_seed(std::uint64_t seed, const std::string& label);

/// Fits, tests and classifies one frequency table.
LabelReport analyze_table(const std::string& label, const corpus::FrequencyTable& table, const AnalysisConfig& cfg);

/// Runs every input. A failing label keeps its error message and the rest
/// still complete.
ReportBundle run_analysis(const AnalysisConfig& cfg);

/// Writes params.csv, comparisons.csv, top_words_<label>.csv,
/// ccdf_<label>_<family>.csv and report.json.
void emit_report(const ReportBundle& bundle, const std::filesystem::path& output_dir);

std::string to_json(const ReportBundle& bundle);
ReportBundle bundle_from_json(const std::string& text);

/// Label made safe for a file name.
std::string file_stem(const std::string& label);

}  // namespace zipfit::report
