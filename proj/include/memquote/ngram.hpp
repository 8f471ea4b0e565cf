#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace memquote {

using TokenSequence = std::vector<std::string>;

/// Which alphabet a model is built over. Comparing a word model with a tag
/// model is a configuration error.
enum class Alphabet { kWords, kTags };

struct LmOptions {
  int order = 1;
  double alpha = 0.2;
  /// Predict an end-of-sequence event after the last token.
  bool end_symbol = false;
  /// Count the reserved UNK type in |V|. Turning this off leaves the
  /// conditionals unnormalized; it exists to measure the effect.
  bool unk_in_vocabulary = true;
  Alphabet alphabet = Alphabet::kWords;
};

/// Additively smoothed n-gram model:
///   P(w | ctx) = (c(ctx, w) + alpha) / (c(ctx) + alpha * |V|)
/// with order-1 start padding and out-of-vocabulary tokens mapped to UNK.
/// Immutable after training.
class NGramLM {
 public:
  static constexpr std::string_view kUnk = "<unk>";
  static constexpr std::string_view kStart = "<s>";
  static constexpr std::string_view kEnd = "</s>";

  static NGramLM train(std::span<const TokenSequence> corpus,
                       const LmOptions& options);

  /// Natural-log likelihood of the whole sequence.
  double log_prob(std::span<const std::string> sequence) const;

  /// Smoothed P(token | context). Only the last order-1 context entries are
  /// used; missing leading context is start padding.
  double conditional_prob(std::span<const std::string> context,
                          std::string_view token) const;

  int order() const { return options_.order; }
  double alpha() const { return options_.alpha; }
  Alphabet alphabet() const { return options_.alphabet; }
  const LmOptions& options() const { return options_; }

  /// |V| used in the denominator.
  std::size_t vocabulary_size() const;
  /// Observed types, without UNK or the boundary symbols.
  std::vector<std::string> vocabulary() const;
  bool in_vocabulary(std::string_view token) const;
  std::uint64_t total_tokens() const { return total_tokens_; }

  /// Raw count of an n-gram of exactly order() tokens (start symbols
  /// allowed as kStart).
  std::uint64_t ngram_count(std::span<const std::string> ngram) const;
  /// Raw count of an (order-1)-token context.
  std::uint64_t context_count(std::span<const std::string> context) const;

  /// Every stored n-gram as token strings with its count. Sorted.
  std::vector<std::pair<std::vector<std::string>, std::uint64_t>> ngrams() const;

  nlohmann::json to_json() const;
  static NGramLM from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static NGramLM load(const std::filesystem::path& path);

  friend bool operator==(const NGramLM& a, const NGramLM& b);

 private:
  using Id = std::uint32_t;
  static constexpr Id kUnkId = 0;
  static constexpr Id kStartId = 1;
  static constexpr Id kEndId = 2;
  static constexpr Id kFirstTypeId = 3;
  static constexpr int kBitsPerId = 21;

  NGramLM() = default;

  Id lookup(std::string_view token) const;
  Id intern(const std::string& token);
  static std::uint64_t pack(std::span<const Id> ids);
  std::vector<Id> padded_ids(std::span<const std::string> sequence) const;
  double log_conditional(std::uint64_t context_key, std::uint64_t ngram_key) const;
  void check_invariants() const;

  LmOptions options_;
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, Id> token_to_id_;
  std::unordered_map<std::uint64_t, std::uint64_t> ngram_counts_;
  std::unordered_map<std::uint64_t, std::uint64_t> context_counts_;
  std::uint64_t total_tokens_ = 0;
};

NGramLM train_lm(std::span<const TokenSequence> corpus, int order,
                 double alpha = 0.2, Alphabet alphabet = Alphabet::kWords);

double log_prob(const NGramLM& lm, std::span<const std::string> sequence);

enum class Preference { kA, kB, kTie };

/// Which model assigns the sequence the higher likelihood. Throws
/// ConfigError if the models differ in order or alphabet.
Preference prefers(const NGramLM& lm_a, const NGramLM& lm_b,
                   std::span<const std::string> sequence);

}  // namespace memquote
