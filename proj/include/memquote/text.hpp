#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace memquote {

/// One token of a quote. Punctuation stays in the stream but is not a word.
struct Token {
  std::string text;
  bool is_word = true;

  friend bool operator==(const Token&, const Token&) = default;
};

/// Splits text into tokens, lowercased. Contractions are split at the
/// apostrophe ("it's" -> "it" "'s", "don't" -> "do" "n't"), punctuation is
/// emitted as separate non-word tokens.
std::vector<Token> tokenize(std::string_view text);

/// Same segmentation as tokenize() but keeps the original case. The tagger
/// consumes these.
std::vector<Token> tokenize_cased(std::string_view text);

/// Space-joins token texts.
std::string join(const std::vector<Token>& tokens);

std::size_t count_words(const std::vector<Token>& tokens);

/// Token texts, optionally dropping punctuation.
std::vector<std::string> token_strings(const std::vector<Token>& tokens,
                                       bool include_punctuation = true);

std::string to_lower_ascii(std::string_view s);

/// True when the text reads as one sentence: no sentence-final punctuation
/// (. ! ?) followed by further words.
bool is_single_sentence(std::string_view text);

/// Splits on sentence-final punctuation followed by more words.
std::vector<std::string> split_sentences(std::string_view text);

struct Quote {
  std::string movie_id;
  std::size_t line_index = 0;
  std::string speaker;
  std::string text;
  std::vector<Token> tokens;
  bool is_memorable = false;
};

Quote make_quote(std::string movie_id, std::size_t line_index,
                 std::string speaker, std::string text, bool is_memorable);

std::size_t word_count(const Quote& quote);

/// "movie_id:line_index"; keys count snapshots and pair logs.
std::string quote_id(const Quote& quote);

struct QuotePair {
  Quote memorable;
  Quote nonmemorable;
  std::size_t line_distance = 0;
  /// Same-speaker lines separating M and N (1 = adjacent lines of that speaker).
  std::size_t speaker_line_distance = 0;
};

/// Throws InvariantError if the pair breaks any pairing invariant.
void check_pair(const QuotePair& pair);

}  // namespace memquote
