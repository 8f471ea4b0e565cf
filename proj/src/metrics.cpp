#include "memquote/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "memquote/error.hpp"
#include "memquote/io.hpp"
#include "memquote/kernels.hpp"
#include "memquote/stats.hpp"

namespace memquote {
namespace {

bool is_possessive_form(std::string_view w) {
  return w == "his" || w == "hers" || w == "its" || w == "their" || w == "theirs";
}

std::string fmt(std::optional<double> v, int precision) {
  if (!v) return "NA";
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(precision);
  ss << *v;
  return ss.str();
}

std::string fmt_p(std::optional<double> p) {
  if (!p) return "NA";
  std::ostringstream ss;
  ss.precision(6);
  ss << *p;
  return ss.str();
}

nlohmann::json opt(std::optional<double> v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <typename F>
MetricReport compare_pairs(std::string name, std::size_t n, F&& score_diff) {
  std::uint64_t w = 0, l = 0, t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int s = score_diff(i);
    if (s > 0) {
      ++w;
    } else if (s < 0) {
      ++l;
    } else {
      ++t;
    }
  }
  return make_report(std::move(name), w, l, t);
}

template <typename T>
int cmp(T a, T b) {
  return (a > b) - (a < b);
}

}  // namespace

MetricReport make_report(std::string name, std::uint64_t wins, std::uint64_t losses,
                         std::uint64_t ties) {
  MetricReport r;
  r.metric_name = std::move(name);
  r.wins = wins;
  r.losses = losses;
  r.ties = ties;
  if (wins + losses > 0) {
    r.win_percent = 100.0 * static_cast<double>(wins) / static_cast<double>(wins + losses);
    r.p_value = stats::sign_test(wins, losses)->p_value;
  }
  return r;
}

TaggedPair tag_pair(const TaggerModel& model, const QuotePair& pair) {
  return TaggedPair{tag(model, pair.memorable), tag(model, pair.nonmemorable)};
}

TokenSequence word_sequence(const Quote& quote, bool include_punctuation) {
  return token_strings(quote.tokens, include_punctuation);
}

TokenSequence tag_sequence(const TaggedQuote& tq, bool include_punctuation) {
  if (tq.tags.size() != tq.quote.tokens.size()) {
    throw InvariantError("tag count differs from token count for " + quote_id(tq.quote));
  }
  TokenSequence out;
  for (std::size_t i = 0; i < tq.tags.size(); ++i) {
    if (include_punctuation || tq.quote.tokens[i].is_word) out.push_back(tq.tags[i]);
  }
  return out;
}

MetricReport distinctiveness_eval(std::span<const QuotePair> pairs, const NGramLM& lm,
                                  std::span<const TaggedPair> tagged,
                                  bool include_punctuation) {
  const bool tags = lm.alphabet() == Alphabet::kTags;
  if (tags && tagged.size() != pairs.size()) {
    throw ConfigError("tag model needs tagged pairs (" + std::to_string(tagged.size()) +
                      " tagged for " + std::to_string(pairs.size()) + " pairs)");
  }
  std::vector<TokenSequence> seqs;
  seqs.reserve(2 * pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (tags) {
      seqs.push_back(tag_sequence(tagged[i].memorable, include_punctuation));
      seqs.push_back(tag_sequence(tagged[i].nonmemorable, include_punctuation));
    } else {
      seqs.push_back(word_sequence(pairs[i].memorable, include_punctuation));
      seqs.push_back(word_sequence(pairs[i].nonmemorable, include_punctuation));
    }
  }
  const auto lp = kernels::score_sequences(lm, seqs);
  const std::string name = std::string(tags ? "pos" : "lexical") + " " +
                           std::to_string(lm.order()) + "-gram";
  // Lower likelihood is more distinctive.
  return compare_pairs(name, pairs.size(),
                       [&](std::size_t i) { return cmp(lp[2 * i + 1], lp[2 * i]); });
}

GeneralityCounts& GeneralityCounts::operator+=(const GeneralityCounts& o) {
  third_person_pronouns += o.third_person_pronouns;
  indefinite_articles += o.indefinite_articles;
  past_tense_verbs += o.past_tense_verbs;
  present_tense_verbs += o.present_tense_verbs;
  total_tokens += o.total_tokens;
  total_past_present += o.total_past_present;
  return *this;
}

const std::vector<std::string>& third_person_lexicon() {
  static const std::vector<std::string> lex = {
      "he",     "him",     "his", "himself", "she",  "her",   "hers",   "herself",
      "it",     "its",     "itself", "they", "them", "their", "theirs", "themselves"};
  return lex;
}

GeneralityCounts generality_counts(const TaggedQuote& tq, const GeneralityOptions& options) {
  const auto& toks = tq.quote.tokens;
  if (tq.tags.size() != toks.size()) {
    throw InvariantError("tag count differs from token count for " + quote_id(tq.quote));
  }
  const auto& lex = third_person_lexicon();
  GeneralityCounts c;
  c.total_tokens = toks.size();
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const std::string& w = toks[i].text;
    const std::string& t = tq.tags[i];
    if (t == "PRP" || t == "PRP$") {
      const bool possessive = t == "PRP$" || is_possessive_form(w);
      if (std::find(lex.begin(), lex.end(), w) != lex.end() &&
          (options.include_possessives || !possessive)) {
        ++c.third_person_pronouns;
      }
    } else if (t == "DT" && (w == "a" || w == "an")) {
      ++c.indefinite_articles;
    } else if (t == "VBD") {
      ++c.past_tense_verbs;
    } else if (t == "VBP" || t == "VBZ") {
      ++c.present_tense_verbs;
    }
  }
  c.total_past_present = c.past_tense_verbs + c.present_tense_verbs;
  return c;
}

std::string metric_name(GeneralityMetric metric) {
  switch (metric) {
    case GeneralityMetric::kFewerThirdPersonPronouns: return "fewer 3rd-person pronouns";
    case GeneralityMetric::kMoreIndefiniteArticles: return "more indefinite articles";
    case GeneralityMetric::kFewerPastTense: return "less past tense";
    case GeneralityMetric::kMorePresentTense: return "more present tense";
  }
  throw InvariantError("unknown generality metric");
}

double generality_rate(const GeneralityCounts& c, GeneralityMetric metric) {
  auto ratio = [](std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  switch (metric) {
    case GeneralityMetric::kFewerThirdPersonPronouns:
      return ratio(c.third_person_pronouns, c.total_tokens);
    case GeneralityMetric::kMoreIndefiniteArticles:
      return ratio(c.indefinite_articles, c.total_tokens);
    case GeneralityMetric::kFewerPastTense:
      return ratio(c.past_tense_verbs, c.total_past_present);
    case GeneralityMetric::kMorePresentTense:
      return ratio(c.present_tense_verbs, c.total_past_present);
  }
  throw InvariantError("unknown generality metric");
}

MetricReport generality_eval(std::span<const TaggedPair> pairs, GeneralityMetric metric,
                             const GeneralityOptions& options) {
  return compare_pairs(metric_name(metric), pairs.size(), [&](std::size_t i) {
    const auto m = generality_counts(pairs[i].memorable, options);
    const auto n = generality_counts(pairs[i].nonmemorable, options);
    switch (metric) {
      case GeneralityMetric::kFewerThirdPersonPronouns:
        return cmp(n.third_person_pronouns, m.third_person_pronouns);
      case GeneralityMetric::kMoreIndefiniteArticles:
        return cmp(m.indefinite_articles, n.indefinite_articles);
      case GeneralityMetric::kFewerPastTense:
        return cmp(n.past_tense_verbs, m.past_tense_verbs);
      case GeneralityMetric::kMorePresentTense:
        return cmp(m.present_tense_verbs, n.present_tense_verbs);
    }
    return 0;
  });
}

GeneralityRates pooled_rates(std::string corpus_name, std::span<const TaggedQuote> corpus,
                             const GeneralityOptions& options) {
  GeneralityRates r;
  r.corpus_name = std::move(corpus_name);
  for (const auto& tq : corpus) r.counts += generality_counts(tq, options);
  auto pct = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return 100.0 * static_cast<double>(num) / static_cast<double>(den);
  };
  r.third_person_percent = pct(r.counts.third_person_pronouns, r.counts.total_tokens);
  r.indefinite_article_percent = pct(r.counts.indefinite_articles, r.counts.total_tokens);
  r.past_tense_percent = pct(r.counts.past_tense_verbs, r.counts.total_past_present);
  return r;
}

std::array<GeneralityRates, 3> slogan_spectrum(std::span<const TaggedQuote> slogans,
                                               std::span<const TaggedQuote> memorables,
                                               std::span<const TaggedQuote> nonmemorables,
                                               const GeneralityOptions& options) {
  return {pooled_rates("slogans", slogans, options),
          pooled_rates("memorable", memorables, options),
          pooled_rates("non-memorable", nonmemorables, options)};
}

PreferenceReport preference_eval(std::string name, const NGramLM& lm_a, const NGramLM& lm_b,
                                 std::span<const TokenSequence> sequences) {
  if (lm_a.order() != lm_b.order() || lm_a.alphabet() != lm_b.alphabet()) {
    throw ConfigError("preference_eval: models differ in order or alphabet");
  }
  const auto a = kernels::score_sequences(lm_a, sequences);
  const auto b = kernels::score_sequences(lm_b, sequences);
  PreferenceReport r;
  r.name = std::move(name);
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    if (a[i] > b[i]) {
      ++r.prefer_a;
    } else if (a[i] < b[i]) {
      ++r.prefer_b;
    } else {
      ++r.ties;
    }
  }
  if (!sequences.empty()) {
    r.percent_a = 100.0 * static_cast<double>(r.prefer_a) / static_cast<double>(sequences.size());
  }
  if (const auto s = stats::sign_test(r.prefer_a, r.prefer_b)) r.p_value = s->p_value;
  return r;
}

std::unordered_set<std::string> load_word_list(const std::filesystem::path& path) {
  std::unordered_set<std::string> out;
  for (const auto& line : read_lines(path)) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t");
    out.insert(to_lower_ascii(line.substr(first, last - first + 1)));
  }
  return out;
}

std::size_t vowel_groups(std::string_view word) {
  std::size_t groups = 0;
  bool in_group = false;
  for (char ch : word) {
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    const bool vowel = c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
    if (vowel && !in_group) ++groups;
    in_group = vowel;
  }
  return groups;
}

AuxMeasures aux_metrics(const TaggedQuote& tq, const AuxConfig& config) {
  const auto& toks = tq.quote.tokens;
  if (tq.tags.size() != toks.size()) {
    throw InvariantError("tag count differs from token count for " + quote_id(tq.quote));
  }
  AuxMeasures m;
  std::uint64_t words = 0;
  std::uint64_t syllables = 0;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (tq.tags[i] == "CC") ++m.conjunctions;
    if (!toks[i].is_word || config.curse_words.count(toks[i].text)) continue;
    const std::string& w = toks[i].text;
    bool has_letter = false;
    for (char ch : w) {
      const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      if (std::isalpha(static_cast<unsigned char>(c))) has_letter = true;
      if (config.front_letters.find(c) != std::string::npos) ++m.front_sounds;
      if (config.back_letters.find(c) != std::string::npos) ++m.back_sounds;
    }
    if (!has_letter) continue;
    ++words;
    syllables += std::max<std::size_t>(1, vowel_groups(w));
  }
  if (words > 0) m.mean_syllables = static_cast<double>(syllables) / static_cast<double>(words);
  return m;
}

std::vector<MetricReport> aux_eval(std::span<const TaggedPair> pairs, const AuxConfig& config) {
  std::vector<AuxMeasures> m, n;
  for (const auto& p : pairs) {
    m.push_back(aux_metrics(p.memorable, config));
    n.push_back(aux_metrics(p.nonmemorable, config));
  }
  const std::size_t k = pairs.size();
  std::vector<MetricReport> out;
  out.push_back(compare_pairs("more front sounds", k, [&](std::size_t i) {
    return cmp(m[i].front_sounds, n[i].front_sounds);
  }));
  out.push_back(compare_pairs("fewer back sounds", k, [&](std::size_t i) {
    return cmp(n[i].back_sounds, m[i].back_sounds);
  }));
  out.push_back(compare_pairs("more syllables per word", k, [&](std::size_t i) {
    return cmp(m[i].mean_syllables.value_or(0.0), n[i].mean_syllables.value_or(0.0));
  }));
  out.push_back(compare_pairs("fewer coordinating conjunctions", k, [&](std::size_t i) {
    return cmp(n[i].conjunctions, m[i].conjunctions);
  }));
  return out;
}

nlohmann::json to_json(const MetricReport& r) {
  return {{"metric_name", r.metric_name}, {"wins", r.wins},
          {"losses", r.losses},           {"ties", r.ties},
          {"win_percent", opt(r.win_percent)}, {"p_value", opt(r.p_value)},
          {"significance", stats::significance_stars(r.p_value)}};
}

nlohmann::json to_json(const GeneralityRates& r) {
  return {{"corpus", r.corpus_name},
          {"third_person_percent", opt(r.third_person_percent)},
          {"indefinite_article_percent", opt(r.indefinite_article_percent)},
          {"past_tense_percent", opt(r.past_tense_percent)},
          {"total_tokens", r.counts.total_tokens},
          {"total_past_present", r.counts.total_past_present}};
}

nlohmann::json to_json(const PreferenceReport& r) {
  return {{"name", r.name},           {"prefer_a", r.prefer_a},
          {"prefer_b", r.prefer_b},   {"ties", r.ties},
          {"percent_a", opt(r.percent_a)}, {"p_value", opt(r.p_value)}};
}

std::string reports_tsv(std::span<const MetricReport> reports) {
  std::string out = "metric_name\twins\tlosses\tties\twin_percent\tp_value\tsignificance\n";
  for (const auto& r : reports) {
    out += r.metric_name + "\t" + std::to_string(r.wins) + "\t" + std::to_string(r.losses) +
           "\t" + std::to_string(r.ties) + "\t" + fmt(r.win_percent, 2) + "\t" +
           fmt_p(r.p_value) + "\t" + stats::significance_stars(r.p_value) + "\n";
  }
  return out;
}

std::string rates_tsv(std::span<const GeneralityRates> rows) {
  std::string out =
      "corpus\tthird_person_percent\tindefinite_article_percent\tpast_tense_percent\t"
      "total_tokens\ttotal_past_present\n";
  for (const auto& r : rows) {
    out += r.corpus_name + "\t" + fmt(r.third_person_percent, 2) + "\t" +
           fmt(r.indefinite_article_percent, 2) + "\t" + fmt(r.past_tense_percent, 2) + "\t" +
           std::to_string(r.counts.total_tokens) + "\t" +
           std::to_string(r.counts.total_past_present) + "\n";
  }
  return out;
}

std::string preferences_tsv(std::span<const PreferenceReport> rows) {
  std::string out = "name\tprefer_a\tprefer_b\tties\tpercent_a\tp_value\n";
  for (const auto& r : rows) {
    out += r.name + "\t" + std::to_string(r.prefer_a) + "\t" + std::to_string(r.prefer_b) +
           "\t" + std::to_string(r.ties) + "\t" + fmt(r.percent_a, 2) + "\t" +
           fmt_p(r.p_value) + "\n";
  }
  return out;
}

}  // namespace memquote
