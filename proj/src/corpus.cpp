#include "memquote/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <set>

#include "memquote/error.hpp"
#include "memquote/io.hpp"

namespace memquote {
namespace {

std::vector<std::string> words_of(std::string_view text) {
  return token_strings(tokenize(text), false);
}

bool within_threshold(const std::vector<std::string>& a,
                      const std::vector<std::string>& b, double threshold) {
  if (a.empty() || b.empty()) return false;
  const double longer = static_cast<double>(std::max(a.size(), b.size()));
  const double gap = std::fabs(static_cast<double>(a.size()) - static_cast<double>(b.size()));
  if (gap / longer > threshold) return false;  // length gap alone exceeds it
  return normalized_edit_distance(a, b) <= threshold;
}

std::string require_string(const nlohmann::json& j, const char* key, std::size_t line) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw ParseError(std::string("missing string field '") + key + "'", line);
  }
  return it->get<std::string>();
}

std::vector<std::filesystem::path> jsonl_inputs(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("no such path: " + path.string());
  if (!std::filesystem::is_directory(path)) return {path};
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(path)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

double normalized_edit_distance(std::span<const std::string> a,
                                std::span<const std::string> b) {
  if (a.empty() && b.empty()) return 0.0;
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[b.size()]) /
         static_cast<double>(std::max(a.size(), b.size()));
}

std::string strip_entry_decorations(std::string_view line) {
  std::string out;
  int depth = 0;
  for (char c : line) {
    if (c == '[') {
      ++depth;
    } else if (c == ']' && depth > 0) {
      --depth;
    } else if (depth == 0) {
      out.push_back(c);
    }
  }
  const auto colon = out.find(':');
  if (colon != std::string::npos && colon > 0 && colon <= 40 &&
      colon + 1 < out.size() && std::isspace(static_cast<unsigned char>(out[colon + 1]))) {
    const std::string prefix = out.substr(0, colon);
    // Periods only after short titles ("Dr. Evil", "Mrs. Robinson").
    bool periods_ok = true;
    for (std::size_t p = prefix.find('.'); p != std::string::npos; p = prefix.find('.', p + 1)) {
      const auto word_start = prefix.find_last_of(" ", p);
      const std::size_t len = p - (word_start == std::string::npos ? 0 : word_start + 1);
      if (len == 0 || len > 3 || (p + 1 < prefix.size() && prefix[p + 1] != ' ')) periods_ok = false;
    }
    const bool name_like =
        std::isupper(static_cast<unsigned char>(prefix.front())) && periods_ok &&
        prefix.find_first_of("!?,\"") == std::string::npos &&
        std::count(prefix.begin(), prefix.end(), ' ') < 4;
    if (name_like) out.erase(0, colon + 1);
  }
  const auto first = out.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = out.find_last_not_of(" \t");
  return out.substr(first, last - first + 1);
}

Alignment align_memorable(const Script& script, const MemorableList& memlist,
                          double threshold) {
  Alignment out;
  out.labels.resize(script.lines.size());

  // Word sequences of each script line, whole and per sentence.
  std::vector<std::vector<std::string>> line_words(script.lines.size());
  std::vector<std::vector<std::vector<std::string>>> line_sentences(script.lines.size());
  for (std::size_t i = 0; i < script.lines.size(); ++i) {
    line_words[i] = words_of(script.lines[i].text);
    const auto sentences = split_sentences(script.lines[i].text);
    if (sentences.size() > 1) {
      for (const auto& s : sentences) line_sentences[i].push_back(words_of(s));
    }
  }

  for (const auto& entry : memlist.entries) {
    std::vector<std::string> entry_lines;
    std::size_t start = 0;
    while (start <= entry.size()) {
      auto nl = entry.find('\n', start);
      if (nl == std::string::npos) nl = entry.size();
      std::string cleaned = strip_entry_decorations(std::string_view(entry).substr(start, nl - start));
      if (!cleaned.empty()) entry_lines.push_back(std::move(cleaned));
      start = nl + 1;
    }
    if (entry_lines.empty()) continue;

    const bool single = entry_lines.size() == 1 && is_single_sentence(entry_lines.front());
    if (single) {
      const auto target = words_of(entry_lines.front());
      for (std::size_t i = 0; i < script.lines.size(); ++i) {
        if (within_threshold(line_words[i], target, threshold)) {
          out.labels[i].memorable = true;
          out.labels[i].covered = true;
        } else {
          for (const auto& sw : line_sentences[i]) {
            if (within_threshold(sw, target, threshold)) out.labels[i].covered = true;
          }
        }
      }
      continue;
    }

    std::vector<std::vector<std::string>> parts;
    for (const auto& l : entry_lines) {
      parts.push_back(words_of(l));
      const auto sentences = split_sentences(l);
      if (sentences.size() > 1) {
        for (const auto& s : sentences) parts.push_back(words_of(s));
      }
    }
    for (std::size_t i = 0; i < script.lines.size(); ++i) {
      if (out.labels[i].covered) continue;
      for (const auto& part : parts) {
        bool hit = within_threshold(line_words[i], part, threshold);
        for (const auto& sw : line_sentences[i]) {
          hit = hit || within_threshold(sw, part, threshold);
        }
        if (hit) {
          out.labels[i].covered = true;
          break;
        }
      }
    }
  }
  return out;
}

bool is_eligible_foil(const Script& script, const Alignment& alignment, std::size_t m,
                      std::size_t candidate, const PairingOptions& options) {
  if (candidate == m) return false;
  const auto& label = alignment.labels[candidate];
  if (label.memorable || label.covered) return false;
  const auto& ml = script.lines[m];
  const auto& cl = script.lines[candidate];
  if (ml.speaker != cl.speaker) return false;
  if (options.single_sentence_foil && !is_single_sentence(cl.text)) return false;
  return count_words(tokenize(ml.text)) == count_words(tokenize(cl.text));
}

std::vector<QuotePair> build_pairs(const Script& script, const Alignment& alignment,
                                   const PairingOptions& options) {
  if (alignment.labels.size() != script.lines.size()) {
    throw ConfigError("alignment does not match script " + script.movie_id);
  }
  const std::size_t n = script.lines.size();
  std::vector<std::size_t> words(n);
  std::vector<bool> single(n);
  for (std::size_t i = 0; i < n; ++i) {
    words[i] = count_words(tokenize(script.lines[i].text));
    single[i] = is_single_sentence(script.lines[i].text);
  }

  // Positions of each speaker's lines, in script order.
  std::map<std::string, std::vector<std::size_t>> by_speaker;
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& v = by_speaker[script.lines[i].speaker];
    rank[i] = v.size();
    v.push_back(i);
  }

  std::vector<bool> used(n, false);
  auto eligible = [&](std::size_t m, std::size_t c) {
    const auto& label = alignment.labels[c];
    return !label.memorable && !label.covered && words[c] == words[m] &&
           (!options.single_sentence_foil || single[c]) &&
           (!options.one_to_one || !used[c]);
  };

  std::vector<QuotePair> pairs;
  for (std::size_t m = 0; m < n; ++m) {
    if (!alignment.labels[m].memorable || words[m] == 0) continue;
    const auto& same = by_speaker[script.lines[m].speaker];
    std::optional<std::size_t> before;
    std::optional<std::size_t> after;
    for (std::size_t r = rank[m]; r-- > 0;) {
      if (eligible(m, same[r])) {
        before = same[r];
        break;
      }
    }
    for (std::size_t r = rank[m] + 1; r < same.size(); ++r) {
      if (eligible(m, same[r])) {
        after = same[r];
        break;
      }
    }
    if (!before && !after) continue;
    const std::size_t mi = script.lines[m].line_index;
    std::size_t chosen;
    if (before && after) {
      const std::size_t db = mi - script.lines[*before].line_index;
      const std::size_t da = script.lines[*after].line_index - mi;
      chosen = da < db ? *after : *before;
    } else {
      chosen = before ? *before : *after;
    }
    used[chosen] = true;

    QuotePair p;
    const auto& ml = script.lines[m];
    const auto& nl = script.lines[chosen];
    p.memorable = make_quote(script.movie_id, ml.line_index, ml.speaker, ml.text, true);
    p.nonmemorable = make_quote(script.movie_id, nl.line_index, nl.speaker, nl.text, false);
    p.line_distance = ml.line_index > nl.line_index ? ml.line_index - nl.line_index
                                                    : nl.line_index - ml.line_index;
    p.speaker_line_distance = rank[m] > rank[chosen] ? rank[m] - rank[chosen]
                                                     : rank[chosen] - rank[m];
    check_pair(p);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

DecileHistogram decile_histogram(std::span<const Script> scripts,
                                 std::span<const Alignment> alignments,
                                 bool drop_first_last) {
  if (scripts.size() != alignments.size()) {
    throw ConfigError("decile_histogram: scripts and alignments differ in length");
  }
  DecileHistogram hist{};
  for (std::size_t s = 0; s < scripts.size(); ++s) {
    const std::size_t n = scripts[s].lines.size();
    for (std::size_t pos = 0; pos < n; ++pos) {
      if (!alignments[s].labels[pos].memorable) continue;
      if (drop_first_last && (pos == 0 || pos + 1 == n)) continue;
      hist[std::min<std::size_t>(9, 10 * pos / n)] += 1;
    }
  }
  return hist;
}

bool passes_count_rule(std::uint64_t memorable_count, std::uint64_t nonmemorable_count) {
  return memorable_count > 5 && memorable_count >= 2 * nonmemorable_count;
}

CountFilterResult filter_by_counts(
    std::span<const QuotePair> pairs,
    const std::unordered_map<std::string, std::uint64_t>& counts) {
  CountFilterResult out;
  for (const auto& p : pairs) {
    const auto m = counts.find(quote_id(p.memorable));
    const auto n = counts.find(quote_id(p.nonmemorable));
    if (m == counts.end() || n == counts.end()) {
      out.missing.push_back(p);
      continue;
    }
    if (passes_count_rule(m->second, n->second)) out.kept.push_back(p);
  }
  return out;
}

double median_speaker_distance(std::span<const QuotePair> pairs) {
  if (pairs.empty()) return 0.0;
  std::vector<std::size_t> d;
  d.reserve(pairs.size());
  for (const auto& p : pairs) d.push_back(p.speaker_line_distance);
  std::sort(d.begin(), d.end());
  const std::size_t mid = d.size() / 2;
  if (d.size() % 2 == 1) return static_cast<double>(d[mid]);
  return (static_cast<double>(d[mid - 1]) + static_cast<double>(d[mid])) / 2.0;
}

std::vector<Script> read_scripts(const std::filesystem::path& path) {
  std::map<std::string, Script> by_movie;
  for (const auto& file : jsonl_inputs(path)) {
    std::size_t row = 0;
    for (const auto& j : read_jsonl(file)) {
      ++row;
      const std::string movie = require_string(j, "movie_id", row);
      const auto idx = j.find("line_index");
      if (idx == j.end() || !idx->is_number_unsigned()) {
        throw ParseError(file.string() + ": line_index must be a nonnegative integer", row);
      }
      auto& script = by_movie[movie];
      script.movie_id = movie;
      script.lines.push_back(ScriptLine{idx->get<std::size_t>(),
                                        require_string(j, "speaker", row),
                                        require_string(j, "text", row)});
    }
  }
  std::vector<Script> out;
  for (auto& [movie, script] : by_movie) {
    std::stable_sort(script.lines.begin(), script.lines.end(),
                     [](const ScriptLine& a, const ScriptLine& b) {
                       return a.line_index < b.line_index;
                     });
    for (std::size_t i = 1; i < script.lines.size(); ++i) {
      if (script.lines[i].line_index == script.lines[i - 1].line_index) {
        throw ConfigError("movie " + movie + " repeats line_index " +
                          std::to_string(script.lines[i].line_index));
      }
    }
    out.push_back(std::move(script));
  }
  return out;
}

std::vector<MemorableList> read_memorable_lists(const std::filesystem::path& path) {
  std::map<std::string, MemorableList> by_movie;
  for (const auto& file : jsonl_inputs(path)) {
    std::size_t row = 0;
    for (const auto& j : read_jsonl(file)) {
      ++row;
      const std::string movie = require_string(j, "movie_id", row);
      std::string text = require_string(j, "entry_text", row);
      if (text.find_first_not_of(" \t\n") == std::string::npos) {
        throw ParseError(file.string() + ": empty entry_text", row);
      }
      auto& list = by_movie[movie];
      list.movie_id = movie;
      list.entries.push_back(std::move(text));
    }
  }
  std::vector<MemorableList> out;
  for (auto& [movie, list] : by_movie) out.push_back(std::move(list));
  return out;
}

std::unordered_map<std::string, std::uint64_t> read_counts(const std::filesystem::path& path) {
  std::unordered_map<std::string, std::uint64_t> counts;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(path)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ParseError(path.string() + ": expected quote_id<TAB>count", line_no);
    }
    const std::string value = line.substr(tab + 1);
    if (value.empty() || !std::all_of(value.begin(), value.end(), [](char c) {
          return std::isdigit(static_cast<unsigned char>(c)) != 0;
        })) {
      throw ParseError(path.string() + ": count must be a nonnegative integer", line_no);
    }
    counts[line.substr(0, tab)] = std::stoull(value);
  }
  return counts;
}

nlohmann::json quote_to_json(const Quote& q) {
  return {{"movie_id", q.movie_id},
          {"line_index", q.line_index},
          {"speaker", q.speaker},
          {"text", q.text}};
}

Quote quote_from_json(const nlohmann::json& j, bool is_memorable) {
  return make_quote(j.at("movie_id").get<std::string>(), j.at("line_index").get<std::size_t>(),
                    j.at("speaker").get<std::string>(), j.at("text").get<std::string>(),
                    is_memorable);
}

nlohmann::json pair_to_json(const QuotePair& p) {
  return {{"memorable", quote_to_json(p.memorable)},
          {"nonmemorable", quote_to_json(p.nonmemorable)},
          {"line_distance", p.line_distance},
          {"speaker_line_distance", p.speaker_line_distance}};
}

QuotePair pair_from_json(const nlohmann::json& j) {
  QuotePair p;
  p.memorable = quote_from_json(j.at("memorable"), true);
  p.nonmemorable = quote_from_json(j.at("nonmemorable"), false);
  p.line_distance = j.at("line_distance").get<std::size_t>();
  p.speaker_line_distance = j.value("speaker_line_distance", std::size_t{0});
  return p;
}

void write_pairs(const std::filesystem::path& path, std::span<const QuotePair> pairs) {
  std::vector<nlohmann::json> rows;
  rows.reserve(pairs.size());
  for (const auto& p : pairs) rows.push_back(pair_to_json(p));
  write_file_atomic(path, to_jsonl(rows));
}

std::vector<QuotePair> read_pairs(const std::filesystem::path& path) {
  std::vector<QuotePair> out;
  std::size_t row = 0;
  for (const auto& j : read_jsonl(path)) {
    ++row;
    try {
      out.push_back(pair_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": malformed pair: " + e.what(), row);
    }
    check_pair(out.back());
  }
  return out;
}

}  // namespace memquote
