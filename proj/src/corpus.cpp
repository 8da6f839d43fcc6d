#include "zipfit/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "zipfit/parallel.hpp"

namespace zipfit::corpus {
namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_punct(unsigned char c) { return c < 0x80 && std::ispunct(c); }
bool is_separator(unsigned char c) { return c == '.' || c == '/' || c == '-' || c == ':'; }

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string read_all(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw std::runtime_error("failed reading input stream");
  return std::move(buf).str();
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
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

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw std::runtime_error("unterminated quote in CSV line");
  return fields;
}

}  // namespace

DeidPattern parse_deid_pattern(std::string_view spec) {
  const auto mid = spec.find("...");
  if (mid == std::string_view::npos) throw std::invalid_argument("de-id pattern needs the form '<open> ... <close>'");
  DeidPattern p{trim(spec.substr(0, mid)), trim(spec.substr(mid + 3))};
  if (p.open.empty() || p.close.empty()) throw std::invalid_argument("de-id pattern has an empty bracket");
  return p;
}

std::string format_deid_pattern(const DeidPattern& p) { return p.open + " ... " + p.close; }

void validate(const TokenizerConfig& cfg) {
  if (cfg.min_frequency < 1) throw std::invalid_argument("min_frequency must be at least 1");
}

std::string normalize_token(std::string_view raw, const TokenizerConfig& cfg) {
  // Characters plus a flag marking the ones that came from a digit, so a
  // literal 'D' in the input is never mistaken for a folded digit.
  std::string chars;
  std::vector<bool> folded;
  chars.reserve(raw.size());
  for (unsigned char c : raw) {
    if (cfg.strip_punctuation && is_punct(c) && !is_separator(c)) continue;
    const bool digit = cfg.digit_folding && is_digit(c);
    if (digit) c = 'D';
    else if (cfg.lowercase && c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
    chars.push_back(static_cast<char>(c));
    folded.push_back(digit);
  }

  if (cfg.digit_folding) {
    bool any_digit = false;
    bool numeric = true;
    for (std::size_t i = 0; i < chars.size() && numeric; ++i) {
      any_digit = any_digit || folded[i];
      numeric = folded[i] || is_separator(static_cast<unsigned char>(chars[i]));
    }
    if (numeric && any_digit) return "digit";
  }

  if (!cfg.strip_punctuation) return chars;
  std::string out;
  out.reserve(chars.size());
  for (char c : chars)
    if (!is_separator(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

std::string remove_deid(std::string_view text, std::span<const DeidPattern> patterns) {
  std::string current(text);
  for (const auto& p : patterns) {
    std::string out;
    out.reserve(current.size());
    std::size_t pos = 0;
    while (true) {
      const auto open = current.find(p.open, pos);
      if (open == std::string::npos) break;
      const auto close = current.find(p.close, open + p.open.size());
      if (close == std::string::npos) break;
      out.append(current, pos, open - pos);
      out.push_back(' ');
      pos = close + p.close.size();
    }
    out.append(current, pos);
    current = std::move(out);
  }
  return current;
}

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg) {
  const std::string clean = remove_deid(text, cfg.deid_patterns);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < clean.size()) {
    while (i < clean.size() && is_space(static_cast<unsigned char>(clean[i]))) ++i;
    std::size_t j = i;
    while (j < clean.size() && !is_space(static_cast<unsigned char>(clean[j]))) ++j;
    if (j > i) {
      std::string t = normalize_token(std::string_view(clean).substr(i, j - i), cfg);
      if (!t.empty()) out.push_back(std::move(t));
    }
    i = j;
  }
  return out;
}

std::vector<std::string> tokenize(std::istream& in, const TokenizerConfig& cfg) {
  return tokenize(read_all(in), cfg);
}

LemmaMap parse_lemma_map(std::istream& in) {
  LemmaMap out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    std::istringstream fields(line);
    std::string surface, lemma, extra;
    if (!(fields >> surface)) continue;
    if (!(fields >> lemma) || (fields >> extra))
      throw std::runtime_error("lemma map line " + std::to_string(lineno) + " does not have two columns");
    out[surface] = lemma;
  }
  if (in.bad()) throw std::runtime_error("failed reading lemma map");
  return out;
}

LemmaMap load_lemma_map(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_lemma_map(in);
}

StopWords parse_stopwords(std::istream& in) {
  StopWords out;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (!t.empty()) out.insert(std::move(t));
  }
  if (in.bad()) throw std::runtime_error("failed reading stop-word list");
  return out;
}

StopWords load_stopwords(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_stopwords(in);
}

std::vector<std::string> apply_lemma_and_stopwords(std::vector<std::string> tokens, const LemmaMap& lemmas,
                                                   const StopWords& stopwords) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (auto& t : tokens) {
    if (const auto it = lemmas.find(t); it != lemmas.end()) t = it->second;
    if (!stopwords.contains(t)) out.push_back(std::move(t));
  }
  return out;
}

Counts count_tokens(std::span<const std::string> tokens) {
  Counts out;
  for (const auto& t : tokens) ++out[t];
  return out;
}

void merge_counts(Counts& into, const Counts& from) {
  for (const auto& [token, count] : from) into[token] += count;
}

FrequencyTable finalize(Counts counts, std::int64_t min_frequency) {
  if (min_frequency < 1) throw std::invalid_argument("min_frequency must be at least 1");
  FrequencyTable table;
  std::erase_if(counts, [&](const auto& kv) { return kv.second < min_frequency; });
  table.entries = std::move(counts);
  for (const auto& [token, count] : table.entries) table.total_tokens += count;
  table.unique_tokens = static_cast<std::int64_t>(table.entries.size());
  return table;
}

FrequencyTable build_frequency_table(std::span<const std::string> tokens, const TokenizerConfig& cfg) {
  validate(cfg);
  return finalize(count_tokens(tokens), cfg.min_frequency);
}

FrequencyTable count_documents(std::span<const std::filesystem::path> files, const TokenizerConfig& cfg,
                               unsigned threads) {
  validate(cfg);
  const LemmaMap lemmas = cfg.lemma_map_path ? load_lemma_map(*cfg.lemma_map_path) : LemmaMap{};
  const StopWords stopwords = cfg.stopword_list_path ? load_stopwords(*cfg.stopword_list_path) : StopWords{};
  std::vector<Counts> partial(files.size());
  parallel_for(files.size(), threads, [&](std::size_t i) {
    auto in = open_input(files[i]);
    partial[i] = count_tokens(apply_lemma_and_stopwords(tokenize(in, cfg), lemmas, stopwords));
  });
  Counts merged;
  for (const auto& c : partial) merge_counts(merged, c);
  return finalize(std::move(merged), cfg.min_frequency);
}

std::vector<std::pair<std::string, std::int64_t>> top_words(const FrequencyTable& table, std::size_t n) {
  if (n < 1) throw std::invalid_argument("top_words needs n >= 1");
  std::vector<std::pair<std::string, std::int64_t>> all(table.entries.begin(), table.entries.end());
  const auto by_rank = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  const std::size_t k = std::min(n, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), by_rank);
  all.resize(k);
  return all;
}

void write_frequency_csv(const FrequencyTable& table, std::ostream& out) {
  out << "token,count\n";
  for (const auto& [token, count] : top_words(table, std::max<std::size_t>(table.entries.size(), 1)))
    out << csv_field(token) << ',' << count << '\n';
}

FrequencyTable read_frequency_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("frequency CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "token,count") throw std::runtime_error("frequency CSV must start with the header token,count");
  Counts counts;
  for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const auto where = " on frequency CSV line " + std::to_string(lineno);
    if (fields.size() != 2) throw std::runtime_error("expected two fields" + where);
    std::int64_t count = 0;
    try {
      std::size_t used = 0;
      count = std::stoll(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::runtime_error("bad count" + where);
    }
    if (count < 1) throw std::runtime_error("count must be positive" + where);
    if (!counts.emplace(fields[0], count).second) throw std::runtime_error("duplicate token" + where);
  }
  if (in.bad()) throw std::runtime_error("failed reading frequency CSV");
  return finalize(std::move(counts), 1);
}

FrequencyTable read_frequency_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_frequency_csv(in);
}

Sample to_sample(const FrequencyTable& table) {
  std::vector<std::int64_t> counts;
  counts.reserve(table.entries.size());
  for (const auto& [token, count] : table.entries) counts.push_back(count);
  return Sample(counts);
}

}  // namespace zipfit::corpus
