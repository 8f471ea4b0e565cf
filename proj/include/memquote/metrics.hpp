#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "memquote/ngram.hpp"
#include "memquote/pos.hpp"
#include "memquote/text.hpp"

namespace memquote {

/// Wins/losses/ties of the memorable side over a pair collection.
struct MetricReport {
  std::string metric_name;
  std::uint64_t wins = 0;
  std::uint64_t losses = 0;
  std::uint64_t ties = 0;
  /// 100 * wins / (wins + losses); absent when every pair ties.
  std::optional<double> win_percent;
  /// Two-tailed sign test; absent when every pair ties.
  std::optional<double> p_value;

  std::uint64_t pairs() const { return wins + losses + ties; }
};

MetricReport make_report(std::string name, std::uint64_t wins, std::uint64_t losses,
                         std::uint64_t ties);

struct TaggedPair {
  TaggedQuote memorable;
  TaggedQuote nonmemorable;
};

TaggedPair tag_pair(const TaggerModel& model, const QuotePair& pair);

/// What an LM sees for a quote: lowercase tokens, or their tags.
/// Punctuation tokens are kept unless excluded.
TokenSequence word_sequence(const Quote& quote, bool include_punctuation = true);
TokenSequence tag_sequence(const TaggedQuote& tq, bool include_punctuation = true);

/// The memorable quote wins when it is less likely under `lm`. Tag models
/// need `tagged`, parallel to `pairs`; otherwise ConfigError.
MetricReport distinctiveness_eval(std::span<const QuotePair> pairs, const NGramLM& lm,
                                  std::span<const TaggedPair> tagged = {},
                                  bool include_punctuation = true);

struct GeneralityCounts {
  std::uint64_t third_person_pronouns = 0;
  std::uint64_t indefinite_articles = 0;
  std::uint64_t past_tense_verbs = 0;
  std::uint64_t present_tense_verbs = 0;
  std::uint64_t total_tokens = 0;
  std::uint64_t total_past_present = 0;

  GeneralityCounts& operator+=(const GeneralityCounts& o);
  friend bool operator==(const GeneralityCounts&, const GeneralityCounts&) = default;
};

struct GeneralityOptions {
  /// Count his/hers/its/their/theirs and PRP$ tokens.
  bool include_possessives = true;
};

/// he him his himself she her hers herself it its itself they them their
/// theirs themselves
const std::vector<std::string>& third_person_lexicon();

GeneralityCounts generality_counts(const TaggedQuote& tq, const GeneralityOptions& options = {});

enum class GeneralityMetric {
  kFewerThirdPersonPronouns,
  kMoreIndefiniteArticles,
  kFewerPastTense,
  kMorePresentTense,
};

inline constexpr std::array<GeneralityMetric, 4> kGeneralityMetrics = {
    GeneralityMetric::kFewerThirdPersonPronouns, GeneralityMetric::kMoreIndefiniteArticles,
    GeneralityMetric::kFewerPastTense, GeneralityMetric::kMorePresentTense};

std::string metric_name(GeneralityMetric metric);

/// Per-quote rate for a metric: count over total_tokens, or for the tense
/// metrics over past+present verbs. 0 when the denominator is 0.
double generality_rate(const GeneralityCounts& c, GeneralityMetric metric);

/// Compares raw counts within each pair. Equal counts are ties.
MetricReport generality_eval(std::span<const TaggedPair> pairs, GeneralityMetric metric,
                             const GeneralityOptions& options = {});

/// Pooled rates over a corpus, in percent. Absent when the denominator is 0.
struct GeneralityRates {
  std::string corpus_name;
  GeneralityCounts counts;
  std::optional<double> third_person_percent;
  std::optional<double> indefinite_article_percent;
  std::optional<double> past_tense_percent;
};

GeneralityRates pooled_rates(std::string corpus_name, std::span<const TaggedQuote> corpus,
                             const GeneralityOptions& options = {});

/// Slogans, memorable quotes, non-memorable quotes, in that order.
std::array<GeneralityRates, 3> slogan_spectrum(std::span<const TaggedQuote> slogans,
                                               std::span<const TaggedQuote> memorables,
                                               std::span<const TaggedQuote> nonmemorables,
                                               const GeneralityOptions& options = {});

/// How often model A assigns a sequence higher likelihood than model B.
struct PreferenceReport {
  std::string name;
  std::uint64_t prefer_a = 0;
  std::uint64_t prefer_b = 0;
  std::uint64_t ties = 0;
  /// 100 * prefer_a / all sequences; absent for an empty corpus.
  std::optional<double> percent_a;
  std::optional<double> p_value;
};

PreferenceReport preference_eval(std::string name, const NGramLM& lm_a, const NGramLM& lm_b,
                                 std::span<const TokenSequence> sequences);

struct AuxConfig {
  std::string front_letters = "pbmfvwie";
  std::string back_letters = "uo";
  std::unordered_set<std::string> curse_words;
};

/// One word per line, '#' comments, lowercased.
std::unordered_set<std::string> load_word_list(const std::filesystem::path& path);

struct AuxMeasures {
  std::uint64_t front_sounds = 0;
  std::uint64_t back_sounds = 0;
  /// Vowel groups over [aeiouy] per word, at least 1 for any word with a
  /// letter. Absent when no word is left.
  std::optional<double> mean_syllables;
  std::uint64_t conjunctions = 0;
};

/// Vowel-group count over [aeiouy]; 0 if `word` has no vowel.
std::size_t vowel_groups(std::string_view word);

AuxMeasures aux_metrics(const TaggedQuote& tq, const AuxConfig& config);

/// Four reports: more front sounds, fewer back sounds, more syllables per
/// word, fewer coordinating conjunctions.
std::vector<MetricReport> aux_eval(std::span<const TaggedPair> pairs, const AuxConfig& config);

nlohmann::json to_json(const MetricReport& r);
nlohmann::json to_json(const GeneralityRates& r);
nlohmann::json to_json(const PreferenceReport& r);

std::string reports_tsv(std::span<const MetricReport> reports);
std::string rates_tsv(std::span<const GeneralityRates> rows);
std::string preferences_tsv(std::span<const PreferenceReport> rows);

}  // namespace memquote
