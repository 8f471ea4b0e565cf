#include "memquote/pos.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <random>

#include "memquote/error.hpp"
#include "memquote/io.hpp"

namespace memquote {
namespace {

constexpr std::string_view kFormatName = "memquote-tagger";
constexpr int kFormatVersion = 1;
constexpr std::string_view kStart1 = "-START-";
constexpr std::string_view kStart2 = "-START2-";
constexpr std::string_view kEnd1 = "-END-";
constexpr std::string_view kEnd2 = "-END2-";

// Tag dictionary thresholds: a word needs this many training occurrences
// and this share under one tag.
constexpr int kDictMinCount = 10;
constexpr double kDictMinShare = 0.97;

bool all_of_chars(std::string_view s, std::string_view allowed) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [&](char c) {
    return allowed.find(c) != std::string_view::npos;
  });
}

bool has_alnum(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 ||
           static_cast<unsigned char>(c) >= 0x80;
  });
}

std::string normalize(std::string_view word) {
  if (word.find('-') != std::string_view::npos && word.front() != '-') return "!HYPHEN";
  if (word.size() == 4 && std::all_of(word.begin(), word.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c)) != 0;
      })) {
    return "!YEAR";
  }
  if (!word.empty() && std::isdigit(static_cast<unsigned char>(word.front()))) {
    return "!DIGITS";
  }
  return to_lower_ascii(word);
}

std::string suffix(std::string_view w, std::size_t n) {
  return std::string(w.size() > n ? w.substr(w.size() - n) : w);
}

std::vector<std::string> extract_features(const std::vector<std::string>& context,
                                          std::size_t i,  // index into context
                                          std::string_view raw_word,
                                          std::string_view prev,
                                          std::string_view prev2) {
  const std::string& word = context[i];
  std::vector<std::string> f;
  f.reserve(18);
  f.emplace_back("bias");
  f.push_back("i suffix " + suffix(word, 3));
  f.push_back("i suffix2 " + suffix(word, 2));
  f.push_back("i pref1 " + std::string(word.substr(0, 1)));
  f.push_back("i-1 tag " + std::string(prev));
  f.push_back("i-2 tag " + std::string(prev2));
  f.push_back("i tag+i-2 tag " + std::string(prev) + " " + std::string(prev2));
  f.push_back("i word " + word);
  f.push_back("i-1 tag+i word " + std::string(prev) + " " + word);
  f.push_back("i-1 word " + context[i - 1]);
  f.push_back("i-1 suffix " + suffix(context[i - 1], 3));
  f.push_back("i-2 word " + context[i - 2]);
  f.push_back("i+1 word " + context[i + 1]);
  f.push_back("i+1 suffix " + suffix(context[i + 1], 3));
  f.push_back("i+2 word " + context[i + 2]);
  if (!raw_word.empty() && std::isupper(static_cast<unsigned char>(raw_word.front()))) {
    f.push_back(i == 2 ? "i cap first" : "i cap");
  }
  if (std::any_of(raw_word.begin(), raw_word.end(),
                  [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; })) {
    f.emplace_back("i has digit");
  }
  return f;
}

std::vector<std::string> padded_context(std::span<const std::string> tokens) {
  std::vector<std::string> ctx;
  ctx.reserve(tokens.size() + 4);
  ctx.emplace_back(kStart1);
  ctx.emplace_back(kStart2);
  for (const auto& t : tokens) ctx.push_back(normalize(t));
  ctx.emplace_back(kEnd1);
  ctx.emplace_back(kEnd2);
  return ctx;
}

// Fixed punctuation tags for a whole sentence; empty entries are left to
// the classifier.
std::vector<std::string> punctuation_tags(std::span<const std::string> tokens) {
  std::vector<std::string> out(tokens.size());
  bool inside_quote = false;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out[i] = punctuation_tag(tokens[i], !inside_quote);
    if (tokens[i] == "\"" || tokens[i] == "``" || tokens[i] == "''") {
      inside_quote = !inside_quote;
    }
  }
  return out;
}

class Trainer {
 public:
  Trainer(std::size_t n_tags) : n_tags_(n_tags) {}

  int predict(const std::vector<std::string>& features) const {
    std::vector<double> scores(n_tags_, 0.0);
    for (const auto& f : features) {
      const auto it = weights_.find(f);
      if (it == weights_.end()) continue;
      for (std::size_t t = 0; t < n_tags_; ++t) scores[t] += it->second.w[t];
    }
    return static_cast<int>(std::max_element(scores.begin(), scores.end()) -
                            scores.begin());
  }

  void update(int truth, int guess, const std::vector<std::string>& features) {
    ++instances_;
    if (truth == guess) return;
    for (const auto& f : features) {
      auto& p = weights_.try_emplace(f, n_tags_).first->second;
      bump(p, static_cast<std::size_t>(truth), 1.0);
      bump(p, static_cast<std::size_t>(guess), -1.0);
    }
  }

  std::unordered_map<std::string, std::vector<double>> averaged() {
    std::unordered_map<std::string, std::vector<double>> out;
    for (auto& [feature, p] : weights_) {
      std::vector<double> avg(n_tags_, 0.0);
      bool any = false;
      for (std::size_t t = 0; t < n_tags_; ++t) {
        const double total =
            p.total[t] + static_cast<double>(instances_ - p.stamp[t]) * p.w[t];
        avg[t] = total / static_cast<double>(instances_);
        any = any || avg[t] != 0.0;
      }
      if (any) out.emplace(feature, std::move(avg));
    }
    return out;
  }

 private:
  struct Param {
    explicit Param(std::size_t n) : w(n, 0.0), total(n, 0.0), stamp(n, 0) {}
    std::vector<double> w;
    std::vector<double> total;
    std::vector<std::uint64_t> stamp;
  };

  void bump(Param& p, std::size_t t, double delta) {
    p.total[t] += static_cast<double>(instances_ - p.stamp[t]) * p.w[t];
    p.stamp[t] = instances_;
    p.w[t] += delta;
  }

  std::size_t n_tags_;
  std::uint64_t instances_ = 0;
  std::unordered_map<std::string, Param> weights_;
};

}  // namespace

std::string punctuation_tag(std::string_view token, bool open_double_quote) {
  if (all_of_chars(token, ".!?")) return ".";
  if (token == ",") return ",";
  if (all_of_chars(token, ";:-") || token == "...") return ":";
  if (token == "(" || token == "[" || token == "{") return "(";
  if (token == ")" || token == "]" || token == "}") return ")";
  if (token == "$") return "$";
  if (token == "#") return "#";
  if (token == "``" || token == "`") return "``";
  if (token == "''") return "''";
  if (token == "\"") return open_double_quote ? "``" : "''";
  if (!has_alnum(token) && token != "'") return ":";
  return "";
}

bool TaggerModel::has_tag(std::string_view tag) const {
  return tag_index_.contains(std::string(tag));
}

int TaggerModel::predict(const std::vector<std::string>& features) const {
  std::vector<double> scores(tags_.size(), 0.0);
  for (const auto& f : features) {
    const auto it = weights_.find(f);
    if (it == weights_.end()) continue;
    for (std::size_t t = 0; t < tags_.size(); ++t) scores[t] += it->second[t];
  }
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

std::vector<std::string> TaggerModel::tag_tokens(std::span<const std::string> tokens) const {
  std::vector<std::string> out = punctuation_tags(tokens);
  if (tags_.empty()) return out;
  const auto context = padded_context(tokens);
  std::string prev(kStart1);
  std::string prev2(kStart2);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (out[i].empty()) {
      const auto dict = tag_dictionary_.find(context[i + 2]);
      if (dict != tag_dictionary_.end()) {
        out[i] = tags_[static_cast<std::size_t>(dict->second)];
      } else {
        out[i] = tags_[static_cast<std::size_t>(
            predict(extract_features(context, i + 2, tokens[i], prev, prev2)))];
      }
    }
    prev2 = prev;
    prev = out[i];
  }
  return out;
}

TaggerModel train_tagger(std::span<const TaggedSentence> corpus, int iterations,
                         std::uint64_t seed) {
  if (corpus.empty()) throw ConfigError("cannot train a tagger on an empty corpus");
  if (iterations < 1) throw ConfigError("tagger iterations must be positive");

  TaggerModel model;
  model.iterations_ = iterations;
  std::map<std::string, std::map<std::string, int>> word_tag_counts;
  std::vector<std::string> tagset;
  for (const auto& s : corpus) {
    if (s.tokens.size() != s.tags.size()) {
      throw ConfigError("tagged sentence has mismatched token and tag counts");
    }
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      tagset.push_back(s.tags[i]);
      ++word_tag_counts[normalize(s.tokens[i])][s.tags[i]];
    }
  }
  for (const char* punct : {".", ",", ":", "(", ")", "$", "#", "``", "''"}) {
    tagset.emplace_back(punct);
  }
  std::sort(tagset.begin(), tagset.end());
  tagset.erase(std::unique(tagset.begin(), tagset.end()), tagset.end());
  model.tags_ = tagset;
  for (std::size_t t = 0; t < tagset.size(); ++t) {
    model.tag_index_[tagset[t]] = static_cast<int>(t);
  }
  for (const auto& [word, counts] : word_tag_counts) {
    int total = 0;
    std::pair<std::string, int> best{"", 0};
    for (const auto& [t, c] : counts) {
      total += c;
      if (c > best.second) best = {t, c};
    }
    if (total >= kDictMinCount &&
        static_cast<double>(best.second) / total >= kDictMinShare) {
      model.tag_dictionary_[word] = model.tag_index_[best.first];
    }
  }

  Trainer trainer(tagset.size());
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (int iter = 0; iter < iterations; ++iter) {
    for (const std::size_t idx : order) {
      const auto& s = corpus[idx];
      const auto context = padded_context(s.tokens);
      const auto fixed = punctuation_tags(s.tokens);
      std::string prev(kStart1);
      std::string prev2(kStart2);
      for (std::size_t i = 0; i < s.tokens.size(); ++i) {
        std::string guess;
        const auto dict = model.tag_dictionary_.find(context[i + 2]);
        if (!fixed[i].empty()) {
          guess = fixed[i];
        } else if (dict != model.tag_dictionary_.end()) {
          guess = tagset[static_cast<std::size_t>(dict->second)];
        } else {
          const auto feats = extract_features(context, i + 2, s.tokens[i], prev, prev2);
          const int g = trainer.predict(feats);
          trainer.update(model.tag_index_[s.tags[i]], g, feats);
          guess = tagset[static_cast<std::size_t>(g)];
        }
        prev2 = prev;
        prev = guess;
      }
    }
    // Fisher-Yates with our own draws so the order is identical across
    // standard library implementations.
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng() % i]);
    }
  }
  model.weights_ = trainer.averaged();
  return model;
}

TaggedQuote tag(const TaggerModel& model, const Quote& quote) {
  const auto cased = tokenize_cased(quote.text);
  std::vector<std::string> surface;
  surface.reserve(cased.size());
  for (const auto& t : cased) surface.push_back(t.text);
  TaggedQuote out{quote, model.tag_tokens(surface)};
  if (out.tags.size() != quote.tokens.size()) {
    throw InvariantError("tag count differs from token count for quote '" + quote.text + "'");
  }
  return out;
}

nlohmann::json TaggerModel::to_json() const {
  nlohmann::json j;
  j["format"] = kFormatName;
  j["version"] = kFormatVersion;
  j["iterations"] = iterations_;
  j["tags"] = tags_;
  std::map<std::string, std::string> dict;
  for (const auto& [w, t] : tag_dictionary_) dict[w] = tags_[static_cast<std::size_t>(t)];
  j["tag_dictionary"] = dict;
  std::map<std::string, std::vector<double>> weights(weights_.begin(), weights_.end());
  j["weights"] = weights;
  return j;
}

TaggerModel TaggerModel::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kFormatName ||
        j.at("version").get<int>() != kFormatVersion) {
      throw ConfigError("not a memquote tagger model of a supported version");
    }
    TaggerModel m;
    m.iterations_ = j.at("iterations").get<int>();
    m.tags_ = j.at("tags").get<std::vector<std::string>>();
    for (std::size_t t = 0; t < m.tags_.size(); ++t) {
      m.tag_index_[m.tags_[t]] = static_cast<int>(t);
    }
    for (const auto& [w, t] : j.at("tag_dictionary").items()) {
      const auto it = m.tag_index_.find(t.get<std::string>());
      if (it == m.tag_index_.end()) throw ConfigError("tag dictionary uses unknown tag");
      m.tag_dictionary_[w] = it->second;
    }
    for (const auto& [f, w] : j.at("weights").items()) {
      auto v = w.get<std::vector<double>>();
      if (v.size() != m.tags_.size()) throw ConfigError("weight row has wrong width");
      m.weights_.emplace(f, std::move(v));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed tagger model: ") + e.what());
  }
}

void TaggerModel::save(const std::filesystem::path& path) const {
  write_file_atomic(path, to_json().dump() + "\n");
}

TaggerModel TaggerModel::load(const std::filesystem::path& path) {
  return from_json(nlohmann::json::parse(read_file(path)));
}

TaggedSentence parse_tagged_line(std::string_view line, std::size_t line_no) {
  TaggedSentence s;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    if (i >= line.size()) break;
    std::size_t j = line.find(' ', i);
    if (j == std::string_view::npos) j = line.size();
    const std::string_view item = line.substr(i, j - i);
    const auto cut = item.rfind('_');
    if (cut == std::string_view::npos || cut == 0 || cut + 1 == item.size()) {
      throw ParseError("malformed token_TAG item '" + std::string(item) + "'", line_no);
    }
    s.tokens.emplace_back(item.substr(0, cut));
    s.tags.emplace_back(item.substr(cut + 1));
    i = j;
  }
  return s;
}

std::string format_tagged_line(std::span<const std::string> tokens,
                               std::span<const std::string> tags) {
  if (tokens.size() != tags.size()) throw ConfigError("token and tag counts differ");
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
    out.push_back('_');
    out += tags[i];
  }
  return out;
}

std::vector<TaggedSentence> read_tagged_corpus(const std::filesystem::path& path) {
  std::vector<TaggedSentence> out;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(path)) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line.front() == '#' && line.find('_') == std::string::npos) continue;
    try {
      out.push_back(parse_tagged_line(line, line_no));
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": " + e.what(), line_no);
    }
  }
  return out;
}

std::vector<TaggedQuote> ingest_pretagged(const std::filesystem::path& path) {
  std::vector<TaggedQuote> out;
  std::size_t index = 0;
  for (auto& s : read_tagged_corpus(path)) {
    TaggedQuote tq;
    tq.quote.movie_id = path.stem().string();
    tq.quote.line_index = index++;
    std::vector<Token> cased;
    std::vector<Token> toks;
    for (const auto& t : s.tokens) {
      const bool is_word = has_alnum(t) || t == "'";
      cased.push_back(Token{t, is_word});
      toks.push_back(Token{to_lower_ascii(t), is_word});
    }
    tq.quote.text = join(cased);
    tq.quote.tokens = std::move(toks);
    tq.tags = std::move(s.tags);
    out.push_back(std::move(tq));
  }
  return out;
}

double tagging_accuracy(const TaggerModel& model, std::span<const TaggedSentence> gold) {
  std::size_t correct = 0;
  std::size_t total = 0;
  for (const auto& s : gold) {
    const auto predicted = model.tag_tokens(s.tokens);
    for (std::size_t i = 0; i < s.tags.size(); ++i) {
      correct += predicted[i] == s.tags[i] ? 1 : 0;
      ++total;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace memquote
