#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "memquote/stats.hpp"
#include "memquote/text.hpp"

namespace memquote {

/// One quiz question. The id does not depend on which side is memorable.
struct QuizItem {
  std::string pair_id;
  std::string memorable_text;
  std::string nonmemorable_text;
};

std::string make_pair_id(const QuotePair& pair);
std::vector<QuizItem> quiz_items(std::span<const QuotePair> pairs);

enum class Position { kFirst, kSecond };
/// MN: memorable shown first.
enum class PresentedOrder { kMN, kNM };

struct Judgment {
  std::string pair_id;
  std::string subject_id;
  Position chosen_position = Position::kFirst;
  PresentedOrder presented_order = PresentedOrder::kMN;
  /// Milliseconds since the Unix epoch.
  std::int64_t timestamp_ms = 0;

  bool correct() const {
    return (chosen_position == Position::kFirst) == (presented_order == PresentedOrder::kMN);
  }
};

nlohmann::json to_json(const Judgment& j);
Judgment judgment_from_json(const nlohmann::json& j);

struct SubjectStats {
  std::string subject_id;
  std::uint64_t matches = 0;
  std::uint64_t total = 0;
  double percent = 0.0;
  /// One-sided binomial upper tail at 0.5.
  double p_value = 1.0;
};

struct QuizStats {
  std::vector<SubjectStats> subjects;
  std::uint64_t matches = 0;
  std::uint64_t total = 0;
  /// Binomial over all pooled trials.
  std::optional<stats::TestResult> pooled;
  /// One-sided binomial on the number of subjects above chance, subjects
  /// exactly at chance dropped.
  std::optional<stats::TestResult> subject_level;
  /// Mean of per-subject match percentages.
  std::optional<double> macro_average;

  nlohmann::json to_json() const;
};

QuizStats compute_quiz_stats(std::span<const Judgment> judgments);

/// Client-visible failure with an HTTP status.
class QuizError : public std::runtime_error {
 public:
  QuizError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

struct QuizOptions {
  std::size_t session_length = 12;
  std::uint64_t seed = 1;
  std::filesystem::path log_path;
};

/// Pair serving and judgment bookkeeping. Which pair a subject sees next and
/// in which order are functions of (seed, subject, pair), so a reload shows
/// the same pending pair, also after a restart. Every accepted judgment is
/// appended to the log and fsync'd before the call returns.
class QuizService {
 public:
  /// Replays the log. A torn final line (no newline, bad JSON) is dropped
  /// and truncated away; any other bad line throws ParseError.
  QuizService(std::vector<QuizItem> items, QuizOptions options);
  ~QuizService();
  QuizService(const QuizService&) = delete;
  QuizService& operator=(const QuizService&) = delete;

  /// {pair_id, quote_a_text, quote_b_text}, or {done, judged, session_length,
  /// matches, percent} once the session is over or the pool is exhausted.
  nlohmann::json get_pair(const std::string& subject_id) const;

  /// Records a choice for the pair currently served to the subject.
  /// Throws QuizError: 400 bad input, 404 unknown pair, 409 duplicate or a
  /// pair that is not the one being served.
  nlohmann::json post_judgment(const std::string& subject_id, const std::string& pair_id,
                               Position chosen, std::int64_t timestamp_ms = -1);

  QuizStats stats() const;
  std::vector<Judgment> judgments() const;
  std::size_t item_count() const { return items_.size(); }

 private:
  struct SubjectState {
    std::set<std::string> judged;
    std::uint64_t matches = 0;
  };

  PresentedOrder order_for(const std::string& subject, const std::string& pair_id) const;
  /// Index of the next unjudged item, or nullopt when done.
  std::optional<std::size_t> next_item(const std::string& subject,
                                       const SubjectState* state) const;
  nlohmann::json done_payload(const SubjectState* state) const;
  void apply(const Judgment& j);
  void replay();

  std::vector<QuizItem> items_;
  std::map<std::string, std::size_t> index_;
  QuizOptions options_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, SubjectState> subjects_;
  std::vector<Judgment> log_;
  int log_fd_ = -1;
};

namespace http {

struct ServeOptions {
  std::string host = "127.0.0.1";
  /// 0 picks a free port.
  int port = 8080;
  std::string cors_origin = "*";
};

/// Owns an HTTP server bound to the service. start() returns the bound port
/// and serves on a background thread until stop().
class QuizServer {
 public:
  QuizServer(QuizService& service, ServeOptions options);
  ~QuizServer();
  int start();
  /// Blocks until stop() is called from another thread or a signal handler.
  void listen_blocking();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace http

}  // namespace memquote
