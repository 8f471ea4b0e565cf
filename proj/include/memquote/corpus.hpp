#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "memquote/text.hpp"

namespace memquote {

struct ScriptLine {
  std::size_t line_index = 0;
  std::string speaker;
  std::string text;
};

/// All lines of one movie, line_index strictly increasing.
struct Script {
  std::string movie_id;
  std::vector<ScriptLine> lines;
};

/// Quotes from a movie's memorable-quotes page. An entry is either a single
/// sentence or a multi-sentence / multi-line dialogue block ('\n' between
/// lines, optionally "Speaker: text").
struct MemorableList {
  std::string movie_id;
  std::vector<std::string> entries;
};

struct LineLabel {
  /// Matches a single-sentence memorable entry: an M candidate.
  bool memorable = false;
  /// Matches any part of any memorable entry: never usable as N.
  bool covered = false;
};

/// Per-line labels, parallel to Script::lines.
struct Alignment {
  std::vector<LineLabel> labels;
};

constexpr double kDefaultAlignThreshold = 0.2;

/// Word-level Levenshtein distance divided by the longer length. Both empty
/// gives 0.
double normalized_edit_distance(std::span<const std::string> a,
                                std::span<const std::string> b);

/// Drops a leading "Speaker:" prefix and bracketed stage directions from a
/// memorable entry line.
std::string strip_entry_decorations(std::string_view line);

/// Labels script lines against a memorable list. A line is memorable iff a
/// single-sentence entry matches it with normalized word edit distance <=
/// threshold; any match against any entry or entry part marks it covered.
Alignment align_memorable(const Script& script, const MemorableList& memlist,
                          double threshold = kDefaultAlignThreshold);

struct PairingOptions {
  /// Each script line serves as N for at most one pair.
  bool one_to_one = true;
  /// N must itself read as a single sentence.
  bool single_sentence_foil = true;
};

/// True if line `candidate` may serve as the foil for memorable line `m`
/// (ignoring one-to-one use).
bool is_eligible_foil(const Script& script, const Alignment& alignment,
                      std::size_t m, std::size_t candidate,
                      const PairingOptions& options);

/// Pairs every memorable line, in script order, with the nearest eligible
/// line by the same speaker with the same word count. Ties between an
/// equally distant earlier and later line go to the earlier one. Memorable
/// lines with no eligible foil are dropped.
std::vector<QuotePair> build_pairs(const Script& script, const Alignment& alignment,
                                   const PairingOptions& options = {});

using DecileHistogram = std::array<std::uint64_t, 10>;

/// Memorable lines by position decile: bin floor(10 * position / lines),
/// clamped to 9, summed over movies. Optionally skips each movie's first
/// and last line.
DecileHistogram decile_histogram(std::span<const Script> scripts,
                                 std::span<const Alignment> alignments,
                                 bool drop_first_last = false);

/// Search-count rule: count(M) > 5 and count(M) >= 2 * count(N).
bool passes_count_rule(std::uint64_t memorable_count, std::uint64_t nonmemorable_count);

struct CountFilterResult {
  std::vector<QuotePair> kept;
  /// Pairs with a quote missing from the count table; excluded from kept.
  std::vector<QuotePair> missing;
};

CountFilterResult filter_by_counts(std::span<const QuotePair> pairs,
                                   const std::unordered_map<std::string, std::uint64_t>& counts);

double median_speaker_distance(std::span<const QuotePair> pairs);

// File formats.

/// JSON-lines scripts: {movie_id, line_index, speaker, text}. `path` may be
/// a file or a directory of *.jsonl files. Scripts come back sorted by
/// movie_id with lines sorted by line_index.
std::vector<Script> read_scripts(const std::filesystem::path& path);

/// JSON-lines memorable entries: {movie_id, entry_text}.
std::vector<MemorableList> read_memorable_lists(const std::filesystem::path& path);

/// TSV "quote_id<TAB>count". Lines starting with '#' are comments.
std::unordered_map<std::string, std::uint64_t> read_counts(const std::filesystem::path& path);

nlohmann::json quote_to_json(const Quote& q);
Quote quote_from_json(const nlohmann::json& j, bool is_memorable);
nlohmann::json pair_to_json(const QuotePair& p);
QuotePair pair_from_json(const nlohmann::json& j);

void write_pairs(const std::filesystem::path& path, std::span<const QuotePair> pairs);
std::vector<QuotePair> read_pairs(const std::filesystem::path& path);

}  // namespace memquote
