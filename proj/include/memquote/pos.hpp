#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "memquote/text.hpp"

namespace memquote {

/// Tokens in original case with one Penn Treebank tag each.
struct TaggedSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;
};

struct TaggedQuote {
  Quote quote;
  /// One tag per entry of quote.tokens.
  std::vector<std::string> tags;
};

/// Greedy left-to-right averaged perceptron tagger. Immutable once
/// trained, so a shared model may be used from any number of threads.
class TaggerModel {
 public:
  /// Tags cased tokens. Punctuation gets its fixed Penn tag regardless of
  /// the learned weights.
  std::vector<std::string> tag_tokens(std::span<const std::string> tokens) const;

  const std::vector<std::string>& tagset() const { return tags_; }
  int iterations() const { return iterations_; }
  bool has_tag(std::string_view tag) const;

  nlohmann::json to_json() const;
  static TaggerModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static TaggerModel load(const std::filesystem::path& path);

 private:
  friend TaggerModel train_tagger(std::span<const TaggedSentence>, int, std::uint64_t);

  int predict(const std::vector<std::string>& features) const;

  std::vector<std::string> tags_;
  std::unordered_map<std::string, int> tag_index_;
  std::unordered_map<std::string, std::vector<double>> weights_;
  /// Frequent words seen with a single tag skip the classifier.
  std::unordered_map<std::string, int> tag_dictionary_;
  int iterations_ = 0;
};

/// Trains on (tokens, tags) sentences. The sentence order is reshuffled each
/// iteration from `seed`, so training is reproducible. Throws ConfigError on
/// an empty corpus or a length mismatch.
TaggerModel train_tagger(std::span<const TaggedSentence> corpus, int iterations,
                         std::uint64_t seed = 1);

/// Tags a quote. The tagger sees the original-cased text, segmented exactly
/// like quote.tokens.
TaggedQuote tag(const TaggerModel& model, const Quote& quote);

/// Penn tag for a punctuation token, or empty if `token` is not punctuation
/// with a fixed tag. `open_double_quote` selects `` over ''.
std::string punctuation_tag(std::string_view token, bool open_double_quote);

/// Parses "tok_TAG tok_TAG ..." splitting each item at its final underscore.
TaggedSentence parse_tagged_line(std::string_view line, std::size_t line_no);
std::string format_tagged_line(std::span<const std::string> tokens,
                               std::span<const std::string> tags);

/// token_TAG file: one sentence per line. Blank lines are skipped.
std::vector<TaggedSentence> read_tagged_corpus(const std::filesystem::path& path);

/// Reads a token_TAG file into tagged quotes, bypassing the tagger. Quote
/// text is the space-joined tokens.
std::vector<TaggedQuote> ingest_pretagged(const std::filesystem::path& path);

/// Token-level accuracy of `model` on gold sentences.
double tagging_accuracy(const TaggerModel& model, std::span<const TaggedSentence> gold);

}  // namespace memquote
