#include "memquote/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "memquote/error.hpp"

namespace memquote {
namespace {

constexpr std::array<std::string_view, 6> kApostropheClitics = {
    "'s", "'re", "'ll", "'ve", "'d", "'m"};

// Colloquial elisions that start with an apostrophe but are whole words.
constexpr std::array<std::string_view, 7> kLeadingElisions = {
    "'em", "'cause", "'til", "'bout", "'round", "'n'", "'n"};

constexpr std::array<std::string_view, 14> kAbbreviations = {
    "mr", "mrs", "ms", "dr", "st", "jr", "sr", "vs", "etc", "prof",
    "gen", "lt", "sgt", "capt"};

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

bool is_space_byte(unsigned char c) { return std::isspace(c) != 0; }

bool is_apostrophe_clitic(std::string_view lower) {
  return std::find(kApostropheClitics.begin(), kApostropheClitics.end(),
                   lower) != kApostropheClitics.end();
}

bool is_clitic(std::string_view lower) {
  return lower == "n't" || is_apostrophe_clitic(lower);
}

bool is_leading_elision(std::string_view lower) {
  return std::find(kLeadingElisions.begin(), kLeadingElisions.end(), lower) !=
         kLeadingElisions.end();
}

// Curly quotes become their ASCII counterparts so that "it’s" splits like
// "it's".
std::string normalize_quotes(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
        static_cast<unsigned char>(text[i + 1]) == 0x80) {
      const auto c = static_cast<unsigned char>(text[i + 2]);
      if (c == 0x98 || c == 0x99) {
        out.push_back('\'');
        i += 2;
        continue;
      }
      if (c == 0x9C || c == 0x9D) {
        out.push_back('"');
        i += 2;
        continue;
      }
    }
    out.push_back(text[i]);
  }
  return out;
}

bool has_word_char(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    return is_word_byte(static_cast<unsigned char>(c));
  });
}

class Tokenizer {
 public:
  explicit Tokenizer(bool lowercase) : lowercase_(lowercase) {}

  std::vector<Token> run(std::string_view raw) {
    const std::string text = normalize_quotes(raw);
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && is_space_byte(text[i])) ++i;
      std::size_t j = i;
      while (j < text.size() && !is_space_byte(text[j])) ++j;
      if (j > i) chunk(std::string_view(text).substr(i, j - i));
      i = j;
    }
    return std::move(out_);
  }

 private:
  void emit(std::string_view s, bool is_word) {
    out_.push_back(Token{lowercase_ ? to_lower_ascii(s) : std::string(s),
                         is_word});
  }

  // Emits a run of identical punctuation bytes ("...", "--", "!!") as one
  // token and returns its length.
  std::size_t punct_run(std::string_view s, std::size_t from) {
    std::size_t to = from + 1;
    while (to < s.size() && s[to] == s[from]) ++to;
    emit(s.substr(from, to - from), false);
    return to - from;
  }

  void chunk(std::string_view s) {
    const std::string lower = to_lower_ascii(s);
    // A detached apostrophe is a quotation mark.
    if (s == "'") {
      emit(s, false);
      return;
    }
    if (is_clitic(lower) || is_leading_elision(lower)) {
      emit(s, true);
      return;
    }

    // Leading punctuation.
    std::size_t begin = 0;
    bool opened_with_apostrophe = false;
    while (begin < s.size() && !is_word_byte(s[begin])) {
      const std::string rest = to_lower_ascii(s.substr(begin));
      if (s[begin] == '\'' && (is_clitic(rest) || is_leading_elision(rest))) {
        break;
      }
      if (s[begin] == '\'') opened_with_apostrophe = true;
      begin += punct_run(s, begin);
    }
    if (begin == s.size()) return;

    // Trailing punctuation, apostrophes excluded; those are resolved below.
    std::size_t end = s.size();
    while (end > begin && !is_word_byte(s[end - 1]) && s[end - 1] != '\'') {
      --end;
    }
    std::string_view trailing = s.substr(end);
    std::string_view core = s.substr(begin, end - begin);

    // "'hello'" closes a quotation; without an opening apostrophe a final
    // one is a possessive ("dogs'") or an elision ("goin'").
    if (opened_with_apostrophe) {
      std::size_t k = core.size();
      while (k > 0 && core[k - 1] == '\'') --k;
      if (k > 0 && k < core.size()) {
        trailing = s.substr(begin + k);
        core = core.substr(0, k);
      }
    }

    // "Mr." and "U.S." keep their final period.
    bool keeps_period = false;
    if (!trailing.empty() && trailing.front() == '.' &&
        (trailing.size() == 1 || trailing[1] != '.')) {
      const std::string lower_core = to_lower_ascii(core);
      const bool initial = core.size() == 1 && std::isupper(static_cast<unsigned char>(core[0])) &&
                           core[0] != 'I' && core[0] != 'A';
      const bool dotted = core.find('.') != std::string_view::npos &&
                          std::all_of(core.begin(), core.end(), [](char c) {
                            return c == '.' || std::isalpha(static_cast<unsigned char>(c));
                          });
      keeps_period = initial || dotted ||
                     std::find(kAbbreviations.begin(), kAbbreviations.end(),
                               lower_core) != kAbbreviations.end();
    }
    split_core(core);
    if (keeps_period) {
      out_.back().text.push_back('.');
      trailing = trailing.substr(1);
    }

    for (std::size_t k = 0; k < trailing.size();) {
      k += punct_run(trailing, k);
    }
  }

  // Splits internal punctuation that is not a connector between word
  // characters ("e-mail", "3,000", "U.S" stay whole).
  void split_core(std::string_view core) {
    std::size_t start = 0;
    std::size_t k = 0;
    while (k < core.size()) {
      const auto c = static_cast<unsigned char>(core[k]);
      if (is_word_byte(c)) {
        ++k;
        continue;
      }
      const bool between_words = k > 0 && k + 1 < core.size() &&
                                 is_word_byte(core[k - 1]) &&
                                 is_word_byte(core[k + 1]);
      const bool digit_comma = c == ',' && between_words &&
                               std::isdigit(static_cast<unsigned char>(core[k - 1])) &&
                               std::isdigit(static_cast<unsigned char>(core[k + 1]));
      const bool connector =
          (c == '-' || c == '.' || c == '\'' || c == '/' || c == '&') &&
          between_words;
      if (connector || digit_comma) {
        ++k;
        continue;
      }
      if (c == '\'' && k > 0 && is_word_byte(core[k - 1]) &&
          (k + 1 == core.size() || !is_word_byte(core[k + 1]))) {
        // Possessive "dogs'" or dropped g "goin'".
        ++k;
        continue;
      }
      if (k > start) word(core.substr(start, k - start));
      k += punct_run(core, k);
      start = k;
    }
    if (k > start) word(core.substr(start, k - start));
  }

  void word(std::string_view w) {
    std::vector<std::string_view> suffixes;
    while (true) {
      const std::string lower = to_lower_ascii(w);
      if (lower.size() > 3 && lower.ends_with("n't")) {
        suffixes.push_back(w.substr(w.size() - 3));
        w = w.substr(0, w.size() - 3);
        continue;
      }
      if (lower.size() > 1 && lower.back() == '\'' &&
          lower[lower.size() - 2] == 's') {
        suffixes.push_back(w.substr(w.size() - 1));
        w = w.substr(0, w.size() - 1);
        continue;
      }
      const auto apos = lower.rfind('\'');
      if (apos != std::string::npos && apos > 0 &&
          is_apostrophe_clitic(std::string_view(lower).substr(apos))) {
        suffixes.push_back(w.substr(apos));
        w = w.substr(0, apos);
        continue;
      }
      break;
    }
    if (to_lower_ascii(w) == "cannot") {
      emit(w.substr(0, 3), true);
      emit(w.substr(3), true);
    } else if (!w.empty()) {
      emit(w, true);
    }
    for (auto it = suffixes.rbegin(); it != suffixes.rend(); ++it) {
      emit(*it, true);
    }
  }

  bool lowercase_;
  std::vector<Token> out_;
};

// Index just past a sentence terminator that is followed by more words, or
// npos.
std::size_t next_sentence_break(std::string_view text, std::size_t from) {
  for (std::size_t i = from; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t j = i;
    while (j < text.size() &&
           (text[j] == '.' || text[j] == '!' || text[j] == '?' ||
            text[j] == '"' || text[j] == '\'' || text[j] == ')')) {
      ++j;
    }
    if (j >= text.size() || !is_space_byte(text[j])) {
      i = j > i ? j - 1 : i;
      continue;
    }
    if (c == '.' && j == i + 1) {
      // Abbreviation or initial before the period?
      std::size_t w = i;
      while (w > 0 && std::isalpha(static_cast<unsigned char>(text[w - 1]))) --w;
      const std::string prev = to_lower_ascii(text.substr(w, i - w));
      const bool initial = prev.size() == 1 && std::isupper(static_cast<unsigned char>(text[w]));
      if (initial || std::find(kAbbreviations.begin(), kAbbreviations.end(),
                               prev) != kAbbreviations.end()) {
        continue;
      }
    }
    if (has_word_char(text.substr(j))) return j;
  }
  return std::string_view::npos;
}

}  // namespace

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<Token> tokenize(std::string_view text) {
  return Tokenizer(true).run(text);
}

std::vector<Token> tokenize_cased(std::string_view text) {
  return Tokenizer(false).run(text);
}

std::string join(const std::vector<Token>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    // Possessive apostrophes stay glued to their host word.
    if (!out.empty() && !(t.is_word && t.text == "'")) out.push_back(' ');
    out += t.text;
  }
  return out;
}

std::size_t count_words(const std::vector<Token>& tokens) {
  return static_cast<std::size_t>(std::count_if(
      tokens.begin(), tokens.end(), [](const Token& t) { return t.is_word; }));
}

std::vector<std::string> token_strings(const std::vector<Token>& tokens,
                                       bool include_punctuation) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (include_punctuation || t.is_word) out.push_back(t.text);
  }
  return out;
}

bool is_single_sentence(std::string_view text) {
  return next_sentence_break(text, 0) == std::string_view::npos;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t cut = next_sentence_break(text, start);
    std::string_view piece = text.substr(
        start, cut == std::string_view::npos ? std::string_view::npos : cut - start);
    while (!piece.empty() && is_space_byte(piece.front())) piece.remove_prefix(1);
    while (!piece.empty() && is_space_byte(piece.back())) piece.remove_suffix(1);
    if (!piece.empty()) out.emplace_back(piece);
    if (cut == std::string_view::npos) break;
    start = cut;
  }
  return out;
}

Quote make_quote(std::string movie_id, std::size_t line_index,
                 std::string speaker, std::string text, bool is_memorable) {
  Quote q;
  q.movie_id = std::move(movie_id);
  q.line_index = line_index;
  q.speaker = std::move(speaker);
  q.tokens = tokenize(text);
  q.text = std::move(text);
  q.is_memorable = is_memorable;
  return q;
}

std::size_t word_count(const Quote& quote) { return count_words(quote.tokens); }

std::string quote_id(const Quote& quote) {
  return quote.movie_id + ":" + std::to_string(quote.line_index);
}

void check_pair(const QuotePair& pair) {
  const auto& m = pair.memorable;
  const auto& n = pair.nonmemorable;
  if (m.movie_id != n.movie_id) throw InvariantError("pair spans two movies");
  if (m.speaker != n.speaker) throw InvariantError("pair spans two speakers");
  if (word_count(m) != word_count(n)) {
    throw InvariantError("pair quotes differ in word count");
  }
  if (!m.is_memorable || n.is_memorable) {
    throw InvariantError("pair memorability labels are wrong");
  }
  if (pair.line_distance == 0) throw InvariantError("pair line distance is zero");
}

}  // namespace memquote
