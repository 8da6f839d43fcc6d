// zipfit: Zipf's-law testing for token-frequency data.
//
//   zipfit analyze  --config run.json [--seed N] [--boots B] [--out DIR] ...
//   zipfit tokenize notes/ more.txt -o freq.csv
//   zipfit fit freq.csv [--boots B]
//   zipfit classify results.csv

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zipfit/compare.hpp"
#include "zipfit/corpus.hpp"
#include "zipfit/fit.hpp"
#include "zipfit/report.hpp"
#include "zipfit/simd/kernels.hpp"

namespace fs = std::filesystem;
using namespace zipfit;

namespace {

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::recursive_directory_iterator(in))
        if (e.is_regular_file()) found.push_back(e.path());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.emplace_back(in);
    }
  }
  return files;
}

int run_analyze(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<int> boots,
                std::optional<std::size_t> min_tail, std::optional<std::string> out, bool include_exp,
                std::optional<unsigned> threads) {
  auto cfg = report::load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (boots) cfg.n_boot_gof = cfg.n_boot_ci = *boots;
  if (min_tail) cfg.min_tail = *min_tail;
  if (out) cfg.output_dir = *out;
  if (include_exp) cfg.include_exponential_ccdf = true;
  if (threads) cfg.threads = *threads;
  report::validate(cfg);

  const auto bundle = report::run_analysis(cfg);
  report::emit_report(bundle, cfg.output_dir);
  int failures = 0;
  for (const auto& r : bundle.labels) {
    if (r.error) {
      ++failures;
      std::fprintf(stderr, "%s: error: %s\n", r.label.c_str(), r.error->c_str());
    } else {
      std::fprintf(stderr, "%s: alpha=%.3f x_min=%lld gof_p=%.3f support=%s\n", r.label.c_str(),
                   r.power_law.params.alpha, static_cast<long long>(r.power_law.params.x_min), r.gof.p_value,
                   std::string(compare::to_string(r.support)).c_str());
    }
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fit and test Zipf's law on token-frequency data"};
  app.require_subcommand(1);
  std::string simd;
  app.add_option("--simd", simd, "Kernel variant: scalar or avx2 (default: best available)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Full pipeline from a JSON config");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> boots;
  std::optional<std::size_t> min_tail;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
  bool include_exp = false;
  analyze->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  analyze->add_option("--seed", seed, "Master seed");
  analyze->add_option("--boots", boots, "Replicates for both bootstraps")->check(CLI::PositiveNumber);
  analyze->add_option("--min-tail", min_tail, "Smallest tail accepted for x_min")->check(CLI::PositiveNumber);
  analyze->add_option("--out", out, "Output directory");
  analyze->add_flag("--include-exponential-ccdf", include_exp, "Also write the exponential CCDF file");
  analyze->add_option("--threads", threads, "Worker threads (0 = all cores)");

  // tokenize
  auto* tokenize = app.add_subcommand("tokenize", "Text files or directories to a frequency CSV");
  std::vector<std::string> inputs;
  std::string tok_out = "-";
  corpus::TokenizerConfig tok;
  std::vector<std::string> deid;
  std::string lemma_map, stopwords;
  bool keep_case = false, keep_digits = false, keep_punct = false;
  tokenize->add_option("inputs", inputs, "Files or directories")->required();
  tokenize->add_option("-o,--out", tok_out, "Output CSV (- for stdout)");
  tokenize->add_option("--min-frequency", tok.min_frequency, "Drop tokens seen fewer times")->check(CLI::PositiveNumber);
  tokenize->add_option("--deid", deid, "De-identification bracket, e.g. '[** ... **]' (repeatable)");
  tokenize->add_option("--lemma-map", lemma_map, "Two-column surface/lemma file")->check(CLI::ExistingFile);
  tokenize->add_option("--stopwords", stopwords, "One stop word per line")->check(CLI::ExistingFile);
  tokenize->add_flag("--keep-case", keep_case);
  tokenize->add_flag("--keep-digits", keep_digits);
  tokenize->add_flag("--keep-punctuation", keep_punct);
  tokenize->add_option("--threads", threads, "Worker threads (0 = all cores)");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Power-law fit of a frequency CSV");
  std::string freq_path;
  int fit_boots = 0;
  std::uint64_t fit_seed = 0;
  std::size_t fit_min_tail = 10;
  std::int64_t fit_min_freq = 2;
  fit_cmd->add_option("freq_csv", freq_path)->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--boots", fit_boots, "Bootstrap replicates for confidence intervals (0 = none)");
  fit_cmd->add_option("--seed", fit_seed);
  fit_cmd->add_option("--min-tail", fit_min_tail)->check(CLI::PositiveNumber);
  fit_cmd->add_option("--min-frequency", fit_min_freq)->check(CLI::PositiveNumber);
  fit_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");

  // classify
  auto* classify = app.add_subcommand("classify", "Support labels from recorded GoF/LR results");
  std::string table_path;
  classify->add_option("table", table_path, "CSV with label, gof_p and <family>_lr/<family>_p columns")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simd == "scalar") simd::select(simd::Isa::scalar);
    else if (simd == "avx2") simd::select(simd::Isa::avx2);
    else if (!simd.empty()) throw std::invalid_argument("--simd must be scalar or avx2");

    if (*analyze) return run_analyze(config_path, seed, boots, min_tail, out, include_exp, threads);

    if (*tokenize) {
      tok.lowercase = !keep_case;
      tok.digit_folding = !keep_digits;
      tok.strip_punctuation = !keep_punct;
      if (!deid.empty()) {
        tok.deid_patterns.clear();
        for (const auto& d : deid) tok.deid_patterns.push_back(corpus::parse_deid_pattern(d));
      }
      if (!lemma_map.empty()) tok.lemma_map_path = lemma_map;
      if (!stopwords.empty()) tok.stopword_list_path = stopwords;
      const auto table = corpus::count_documents(expand_inputs(inputs), tok, threads.value_or(0));
      if (tok_out == "-") {
        corpus::write_frequency_csv(table, std::cout);
      } else {
        std::ofstream f(tok_out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + tok_out);
        corpus::write_frequency_csv(table, f);
      }
      std::fprintf(stderr, "%lld tokens, %lld unique\n", static_cast<long long>(table.total_tokens),
                   static_cast<long long>(table.unique_tokens));
      return 0;
    }

    if (*fit_cmd) {
      const auto table = corpus::finalize(corpus::read_frequency_csv(fs::path(freq_path)).entries, fit_min_freq);
      const auto data = corpus::to_sample(table);
      const auto f = fit::fit_powerlaw(data, {fit_min_tail});
      std::printf("alpha,%.6f\nx_min,%lld\nks,%.6f\nn_tail,%zu\nlog_likelihood,%.6f\n", f.params.alpha,
                  static_cast<long long>(f.params.x_min), f.ks, f.n_tail, f.log_likelihood);
      if (f.degenerate) std::printf("degenerate,1\n");
      if (fit_boots > 0) {
        fit::BootstrapConfig bc;
        bc.n_boot = fit_boots;
        bc.seed = fit_seed;
        bc.threads = threads.value_or(0);
        bc.fit = {fit_min_tail};
        const auto ci = fit::bootstrap_ci(data, bc);
        std::printf("alpha_lo,%.6f\nalpha_hi,%.6f\nxmin_lo,%.6f\nxmin_hi,%.6f\n", ci.alpha_ci.low, ci.alpha_ci.high,
                    ci.xmin_ci.low, ci.xmin_ci.high);
      }
      return 0;
    }

    if (*classify) {
      std::ifstream in(table_path);
      if (!in) throw std::runtime_error("cannot open " + table_path);
      std::printf("label,support\n");
      for (const auto& row : compare::read_replay_table(in)) {
        const auto label = compare::classify_support(row.gof_p, row.comparisons);
        std::printf("%s,%s\n", row.label.c_str(), std::string(compare::to_string(label)).c_str());
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "zipfit: %s\n", e.what());
    return 2;
  }
  return 0;
}
