#include "zipfit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "zipfit/rng.hpp"

namespace zipfit::report {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// --- number formatting -----------------------------------------------------

std::string fixed3(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string general(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double read_number(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

// --- JSON mapping ----------------------------------------------------------

json params_json(const dist::DistParams& p) {
  return {{"family", dist::to_string(p.family)}, {"alpha", number(p.alpha)}, {"lambda", number(p.lambda)},
          {"beta", number(p.beta)},              {"mu", number(p.mu)},       {"sigma", number(p.sigma)},
          {"x_min", p.x_min}};
}

dist::DistParams params_from(const json& j) {
  dist::DistParams p;
  p.family = dist::family_from_string(j.at("family").get<std::string>());
  p.alpha = read_number(j.at("alpha"));
  p.lambda = read_number(j.at("lambda"));
  p.beta = read_number(j.at("beta"));
  p.mu = read_number(j.at("mu"));
  p.sigma = read_number(j.at("sigma"));
  p.x_min = j.at("x_min").get<std::int64_t>();
  return p;
}

json interval_json(const std::optional<fit::Interval>& i) {
  if (!i) return nullptr;
  return json::array({number(i->low), number(i->high)});
}

std::optional<fit::Interval> interval_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return fit::Interval{read_number(j.at(0)), read_number(j.at(1))};
}

json fit_json(const fit::FitResult& f) {
  return {{"params", params_json(f.params)},
          {"ks", number(f.ks)},
          {"n_tail", f.n_tail},
          {"log_likelihood", number(f.log_likelihood)},
          {"alpha_ci", interval_json(f.alpha_ci)},
          {"xmin_ci", interval_json(f.xmin_ci)},
          {"n_boot", f.n_boot},
          {"seed", f.seed},
          {"degenerate", f.degenerate},
          {"converged", f.converged},
          {"evaluations", f.evaluations}};
}

fit::FitResult fit_from(const json& j) {
  fit::FitResult f;
  f.params = params_from(j.at("params"));
  f.ks = read_number(j.at("ks"));
  f.n_tail = j.at("n_tail").get<std::size_t>();
  f.log_likelihood = read_number(j.at("log_likelihood"));
  f.alpha_ci = interval_from(j.at("alpha_ci"));
  f.xmin_ci = interval_from(j.at("xmin_ci"));
  f.n_boot = j.at("n_boot").get<int>();
  f.seed = j.at("seed").get<std::uint64_t>();
  f.degenerate = j.at("degenerate").get<bool>();
  f.converged = j.at("converged").get<bool>();
  f.evaluations = j.at("evaluations").get<int>();
  return f;
}

json gof_json(const gof::GofResult& g) {
  return {{"p_value", g.p_value}, {"exceed", g.exceed},     {"n_boot", g.n_boot},
          {"d_observed", number(g.d_observed)}, {"seed", g.seed}, {"plausible", g.plausible}};
}

gof::GofResult gof_from(const json& j) {
  gof::GofResult g;
  g.p_value = j.at("p_value").get<double>();
  g.exceed = j.at("exceed").get<int>();
  g.n_boot = j.at("n_boot").get<int>();
  g.d_observed = read_number(j.at("d_observed"));
  g.seed = j.at("seed").get<std::uint64_t>();
  g.plausible = j.at("plausible").get<bool>();
  return g;
}

json comparison_json(const compare::ComparisonResult& c) {
  return {{"alternative", dist::to_string(c.alternative)},
          {"lr", number(c.lr)},
          {"p", number(c.p)},
          {"favored", compare::to_string(c.favored)},
          {"nested", c.nested}};
}

compare::ComparisonResult comparison_from(const json& j) {
  return {dist::family_from_string(j.at("alternative").get<std::string>()), read_number(j.at("lr")),
          read_number(j.at("p")), compare::favored_from_string(j.at("favored").get<std::string>()),
          j.at("nested").get<bool>()};
}

json label_json(const LabelReport& r) {
  json j = {{"label", r.label}};
  if (r.error) {
    j["error"] = *r.error;
    return j;
  }
  j["total_tokens"] = r.total_tokens;
  j["unique_tokens"] = r.unique_tokens;
  j["power_law"] = fit_json(r.power_law);
  j["gof"] = gof_json(r.gof);
  j["alternatives"] = json::array();
  for (const auto& a : r.alternatives) j["alternatives"].push_back(fit_json(a));
  j["comparisons"] = json::array();
  for (const auto& c : r.comparisons) j["comparisons"].push_back(comparison_json(c));
  j["support"] = compare::to_string(r.support);
  j["top_words"] = json::array();
  for (const auto& [token, count] : r.top_words) j["top_words"].push_back({{"token", token}, {"count", count}});
  j["ccdf"] = json::array();
  for (const auto& s : r.ccdf) {
    json pts = json::array();
    for (const auto& p : s.points) pts.push_back(json::array({p.x, number(p.ccdf)}));
    j["ccdf"].push_back({{"family", s.family}, {"points", std::move(pts)}});
  }
  return j;
}

LabelReport label_from(const json& j) {
  LabelReport r;
  r.label = j.at("label").get<std::string>();
  if (j.contains("error")) {
    r.error = j.at("error").get<std::string>();
    return r;
  }
  r.total_tokens = j.at("total_tokens").get<std::int64_t>();
  r.unique_tokens = j.at("unique_tokens").get<std::int64_t>();
  r.power_law = fit_from(j.at("power_law"));
  r.gof = gof_from(j.at("gof"));
  for (const auto& a : j.at("alternatives")) r.alternatives.push_back(fit_from(a));
  for (const auto& c : j.at("comparisons")) r.comparisons.push_back(comparison_from(c));
  r.support = compare::support_from_string(j.at("support").get<std::string>());
  for (const auto& w : j.at("top_words"))
    r.top_words.emplace_back(w.at("token").get<std::string>(), w.at("count").get<std::int64_t>());
  for (const auto& s : j.at("ccdf")) {
    CcdfSeries series{s.at("family").get<std::string>(), {}};
    for (const auto& p : s.at("points")) series.points.push_back({p.at(0).get<std::int64_t>(), read_number(p.at(1))});
    r.ccdf.push_back(std::move(series));
  }
  return r;
}

// --- config ----------------------------------------------------------------

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::runtime_error("unknown key '" + key + "' in " + where);
  }
}

corpus::TokenizerConfig tokenizer_from(const json& j, const fs::path& base) {
  reject_unknown(j,
                 {"lowercase", "digit_folding", "strip_punctuation", "deid_patterns", "min_frequency", "lemma_map",
                  "stopwords"},
                 "tokenizer");
  corpus::TokenizerConfig t;
  t.lowercase = j.value("lowercase", t.lowercase);
  t.digit_folding = j.value("digit_folding", t.digit_folding);
  t.strip_punctuation = j.value("strip_punctuation", t.strip_punctuation);
  if (j.contains("deid_patterns")) {
    t.deid_patterns.clear();
    for (const auto& p : j.at("deid_patterns")) t.deid_patterns.push_back(corpus::parse_deid_pattern(p.get<std::string>()));
  }
  t.min_frequency = j.value("min_frequency", t.min_frequency);
  if (j.contains("lemma_map")) t.lemma_map_path = resolve(base, j.at("lemma_map").get<std::string>());
  if (j.contains("stopwords")) t.stopword_list_path = resolve(base, j.at("stopwords").get<std::string>());
  return t;
}

std::vector<fs::path> documents_under(const fs::path& path) {
  if (!fs::is_directory(path)) return {path};
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(path))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

corpus::FrequencyTable ingest(const InputSpec& in, const AnalysisConfig& cfg) {
  if (in.kind == InputKind::freq_csv) {
    auto table = corpus::read_frequency_csv(in.path);
    return corpus::finalize(std::move(table.entries), cfg.tokenizer.min_frequency);
  }
  const auto files = documents_under(in.path);
  if (files.empty()) throw std::runtime_error("no documents under " + in.path.string());
  return corpus::count_documents(files, cfg.tokenizer, cfg.threads);
}

std::vector<CcdfSeries> ccdf_series(const Sample& data, const LabelReport& r, bool include_exponential) {
  const std::int64_t x_min = r.power_law.params.x_min;
  const std::size_t j = data.lower_index(x_min);
  const auto values = data.values().subspan(j);
  const auto weights = data.weights().subspan(j);
  const double n = static_cast<double>(data.tail_count(j));

  std::vector<CcdfSeries> out;
  CcdfSeries emp{"empirical", {}};
  double remaining = n;
  for (std::size_t i = 0; i < values.size(); ++i) {
    emp.points.push_back({values[i], remaining / n});
    remaining -= weights[i];
  }
  out.push_back(std::move(emp));

  auto fitted = [&](const dist::DistParams& p) {
    CcdfSeries s{std::string(dist::to_string(p.family)), {}};
    const auto cc = dist::ccdf_at(p, values);
    for (std::size_t i = 0; i < values.size(); ++i) s.points.push_back({values[i], cc[i]});
    out.push_back(std::move(s));
  };
  fitted(r.power_law.params);
  for (const auto& a : r.alternatives) {
    if (a.params.family == dist::Family::exponential && !include_exponential) continue;
    fitted(a.params);
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

AnalysisConfig parse_config(const std::string& json_text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    reject_unknown(j,
                   {"inputs", "tokenizer", "n_boot_gof", "n_boot_ci", "seed", "min_tail", "top_n", "output_dir",
                    "include_exponential_ccdf", "threads"},
                   "config");
    AnalysisConfig cfg;
    for (const auto& in : j.at("inputs")) {
      reject_unknown(in, {"label", "path", "kind"}, "input");
      InputSpec spec;
      spec.label = in.at("label").get<std::string>();
      spec.path = resolve(base_dir, in.at("path").get<std::string>());
      const std::string kind = in.value("kind", std::string("text"));
      if (kind == "text") spec.kind = InputKind::text;
      else if (kind == "freq_csv") spec.kind = InputKind::freq_csv;
      else throw std::runtime_error("input kind must be 'text' or 'freq_csv', got '" + kind + "'");
      cfg.inputs.push_back(std::move(spec));
    }
    if (j.contains("tokenizer")) cfg.tokenizer = tokenizer_from(j.at("tokenizer"), base_dir);
    cfg.n_boot_gof = j.value("n_boot_gof", cfg.n_boot_gof);
    cfg.n_boot_ci = j.value("n_boot_ci", cfg.n_boot_ci);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.min_tail = j.value("min_tail", cfg.min_tail);
    cfg.top_n = j.value("top_n", cfg.top_n);
    if (j.contains("output_dir")) cfg.output_dir = resolve(base_dir, j.at("output_dir").get<std::string>());
    cfg.include_exponential_ccdf = j.value("include_exponential_ccdf", cfg.include_exponential_ccdf);
    cfg.threads = j.value("threads", cfg.threads);
    validate(cfg);
    return cfg;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("bad config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("bad config: ") + e.what());
  }
}

AnalysisConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), fs::absolute(path).parent_path());
}

void validate(const AnalysisConfig& cfg) {
  if (cfg.inputs.empty()) throw std::invalid_argument("no inputs configured");
  std::set<std::string> labels, stems;
  for (const auto& in : cfg.inputs) {
    if (in.label.empty()) throw std::invalid_argument("input label is empty");
    if (!labels.insert(in.label).second) throw std::invalid_argument("duplicate label '" + in.label + "'");
    if (!stems.insert(file_stem(in.label)).second)
      throw std::invalid_argument("label '" + in.label + "' clashes with another after file-name cleanup");
  }
  corpus::validate(cfg.tokenizer);
  if (cfg.n_boot_gof < 1 || cfg.n_boot_ci < 1) throw std::invalid_argument("bootstrap counts must be at least 1");
  if (cfg.min_tail < 1) throw std::invalid_argument("min_tail must be at least 1");
  if (cfg.top_n < 1) throw std::invalid_argument("top_n must be at least 1");
}

std::uint64_t label_seed(std::uint64_t seed, const std::string& label) {
  return derive_seed(seed, stable_hash(label.data(), label.size()));
}

std::string file_stem(const std::string& label) {
  std::string out;
  for (unsigned char c : label) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                      c == '_' || c == '.';
    out.push_back(keep ? static_cast<char>(c) : '_');
  }
  return out;
}

LabelReport analyze_table(const std::string& label, const corpus::FrequencyTable& table, const AnalysisConfig& cfg) {
  LabelReport r;
  r.label = label;
  r.total_tokens = table.total_tokens;
  r.unique_tokens = table.unique_tokens;
  if (table.entries.empty()) throw std::runtime_error("frequency table is empty after filtering");

  const Sample data = corpus::to_sample(table);
  const fit::FitConfig fc{cfg.min_tail};
  const std::uint64_t seed = label_seed(cfg.seed, label);

  r.power_law = fit::fit_powerlaw(data, fc);
  fit::BootstrapConfig bc;
  bc.n_boot = cfg.n_boot_ci;
  bc.seed = derive_seed(seed, 1);
  bc.threads = cfg.threads;
  bc.fit = fc;
  const auto ci = fit::bootstrap_ci(data, bc);
  r.power_law.alpha_ci = ci.alpha_ci;
  r.power_law.xmin_ci = ci.xmin_ci;
  r.power_law.n_boot = bc.n_boot;
  r.power_law.seed = bc.seed;

  r.gof = gof::gof_pvalue(data, r.power_law, {cfg.n_boot_gof, derive_seed(seed, 2), cfg.threads, fc});

  for (dist::Family family : compare::kAlternatives)
    r.alternatives.push_back(fit::fit_alternative(data, r.power_law.params.x_min, family));
  r.comparisons = compare::compare_all(data, r.power_law, r.alternatives);
  r.support = compare::classify_support(r.gof, r.comparisons);
  r.top_words = corpus::top_words(table, cfg.top_n);
  r.ccdf = ccdf_series(data, r, cfg.include_exponential_ccdf);
  return r;
}

ReportBundle run_analysis(const AnalysisConfig& cfg) {
  validate(cfg);
  ReportBundle bundle;
  bundle.seed = cfg.seed;
  for (const auto& in : cfg.inputs) {
    try {
      bundle.labels.push_back(analyze_table(in.label, ingest(in, cfg), cfg));
    } catch (const std::exception& e) {
      LabelReport failed;
      failed.label = in.label;
      failed.error = e.what();
      bundle.labels.push_back(std::move(failed));
    }
  }
  return bundle;
}

std::string to_json(const ReportBundle& bundle) {
  json j = {{"seed", bundle.seed}, {"labels", json::array()}};
  for (const auto& r : bundle.labels) j["labels"].push_back(label_json(r));
  return j.dump(2) + "\n";
}

ReportBundle bundle_from_json(const std::string& text) {
  const json j = json::parse(text);
  ReportBundle b;
  b.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& r : j.at("labels")) b.labels.push_back(label_from(r));
  return b;
}

void emit_report(const ReportBundle& bundle, const fs::path& output_dir) {
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + output_dir.string() + ": " + ec.message());

  std::string params = "label,alpha,alpha_lo,alpha_hi,xmin,xmin_lo,xmin_hi,gof_p\n";
  std::string comparisons = "label,family,lr,p,favored,support\n";
  for (const auto& r : bundle.labels) {
    if (r.error) continue;
    const auto& pl = r.power_law;
    const auto a_ci = pl.alpha_ci.value_or(fit::Interval{NAN, NAN});
    const auto x_ci = pl.xmin_ci.value_or(fit::Interval{NAN, NAN});
    params += csv_field(r.label) + ',' + fixed3(pl.params.alpha) + ',' + fixed3(a_ci.low) + ',' + fixed3(a_ci.high) +
              ',' + std::to_string(pl.params.x_min) + ',' + fixed3(x_ci.low) + ',' + fixed3(x_ci.high) + ',' +
              fixed3(r.gof.p_value) + '\n';
    for (const auto& c : r.comparisons) {
      comparisons += csv_field(r.label) + ',' + std::string(dist::to_string(c.alternative)) + ',' + fixed3(c.lr) + ',' +
                     fixed3(c.p) + ',' + std::string(compare::to_string(c.favored)) + ',' +
                     std::string(compare::to_string(r.support)) + '\n';
    }

    const std::string stem = file_stem(r.label);
    std::string top = "token,count\n";
    for (const auto& [token, count] : r.top_words) top += csv_field(token) + ',' + std::to_string(count) + '\n';
    write_file(output_dir / ("top_words_" + stem + ".csv"), top);
    for (const auto& s : r.ccdf) {
      std::string body = "x,ccdf\n";
      for (const auto& p : s.points) body += std::to_string(p.x) + ',' + general(p.ccdf) + '\n';
      write_file(output_dir / ("ccdf_" + stem + "_" + s.family + ".csv"), body);
    }
  }
  write_file(output_dir / "params.csv", params);
  write_file(output_dir / "comparisons.csv", comparisons);
  write_file(output_dir / "report.json", to_json(bundle));
}

}  // namespace zipfit::report
