#include "memquote/quiz.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <mutex>

#include "memquote/error.hpp"
#include "memquote/hash.hpp"
#include "memquote/io.hpp"

namespace memquote {
namespace {

std::uint64_t mix(std::uint64_t seed, const std::string& a, const std::string& b) {
  Fnv1a h;
  h.bytes(&seed, sizeof seed);
  h.str(a);
  h.str(b);
  return h.value();
}

std::int64_t now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::optional<double> percent(std::uint64_t m, std::uint64_t t) {
  if (t == 0) return std::nullopt;
  return 100.0 * static_cast<double>(m) / static_cast<double>(t);
}

nlohmann::json test_json(const std::optional<stats::TestResult>& r) {
  if (!r) return nullptr;
  return {{"test", r->test_name}, {"statistic", r->statistic}, {"p_value", r->p_value},
          {"n", r->n}};
}

}  // namespace

std::string make_pair_id(const QuotePair& pair) {
  std::string a = quote_id(pair.memorable);
  std::string b = quote_id(pair.nonmemorable);
  if (b < a) std::swap(a, b);
  Fnv1a h;
  h.str(a);
  h.str(b);
  return "p" + h.hex();
}

std::vector<QuizItem> quiz_items(std::span<const QuotePair> pairs) {
  std::vector<QuizItem> out;
  std::set<std::string> seen;
  for (const auto& p : pairs) {
    QuizItem item{make_pair_id(p), p.memorable.text, p.nonmemorable.text};
    if (!seen.insert(item.pair_id).second) {
      throw ConfigError("duplicate pair in quiz pool: " + quote_id(p.memorable));
    }
    out.push_back(std::move(item));
  }
  return out;
}

nlohmann::json to_json(const Judgment& j) {
  return {{"pair_id", j.pair_id},
          {"subject_id", j.subject_id},
          {"chosen_position", j.chosen_position == Position::kFirst ? "first" : "second"},
          {"presented_order", j.presented_order == PresentedOrder::kMN ? "MN" : "NM"},
          {"timestamp", j.timestamp_ms}};
}

Judgment judgment_from_json(const nlohmann::json& j) {
  Judgment out;
  out.pair_id = j.at("pair_id").get<std::string>();
  out.subject_id = j.at("subject_id").get<std::string>();
  const auto pos = j.at("chosen_position").get<std::string>();
  if (pos != "first" && pos != "second") throw ConfigError("bad chosen_position '" + pos + "'");
  out.chosen_position = pos == "first" ? Position::kFirst : Position::kSecond;
  const auto order = j.at("presented_order").get<std::string>();
  if (order != "MN" && order != "NM") throw ConfigError("bad presented_order '" + order + "'");
  out.presented_order = order == "MN" ? PresentedOrder::kMN : PresentedOrder::kNM;
  out.timestamp_ms = j.value("timestamp", std::int64_t{0});
  return out;
}

QuizStats compute_quiz_stats(std::span<const Judgment> judgments) {
  std::map<std::string, SubjectStats> by;
  for (const auto& j : judgments) {
    auto& s = by[j.subject_id];
    s.subject_id = j.subject_id;
    ++s.total;
    if (j.correct()) ++s.matches;
  }
  QuizStats out;
  double pct_sum = 0.0;
  std::uint64_t above = 0, decided = 0;
  for (auto& [id, s] : by) {
    s.percent = *percent(s.matches, s.total);
    s.p_value = stats::binomial_test(s.matches, s.total, 0.5).p_value;
    pct_sum += s.percent;
    out.matches += s.matches;
    out.total += s.total;
    if (2 * s.matches != s.total) {
      ++decided;
      if (2 * s.matches > s.total) ++above;
    }
    out.subjects.push_back(s);
  }
  if (out.total > 0) {
    out.pooled = stats::binomial_test(out.matches, out.total, 0.5);
    out.macro_average = pct_sum / static_cast<double>(out.subjects.size());
  }
  if (decided > 0) out.subject_level = stats::binomial_test(above, decided, 0.5);
  return out;
}

nlohmann::json QuizStats::to_json() const {
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& s : subjects) {
    subs.push_back({{"subject_id", s.subject_id}, {"matches", s.matches}, {"total", s.total},
                    {"percent", s.percent}, {"p_value", s.p_value}});
  }
  return {{"subjects", subs},
          {"matches", matches},
          {"total", total},
          {"pooled", test_json(pooled)},
          {"subject_level", test_json(subject_level)},
          {"macro_average", macro_average ? nlohmann::json(*macro_average) : nullptr}};
}

QuizService::QuizService(std::vector<QuizItem> items, QuizOptions options)
    : items_(std::move(items)), options_(std::move(options)) {
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (!index_.emplace(items_[i].pair_id, i).second) {
      throw ConfigError("duplicate pair_id " + items_[i].pair_id);
    }
  }
  if (!options_.log_path.empty()) {
    replay();
    log_fd_ = ::open(options_.log_path.c_str(), O_WRONLY | O_APPEND | O_CREAT, 0644);
    if (log_fd_ < 0) {
      throw ConfigError("cannot open judgment log " + options_.log_path.string() + ": " +
                        std::strerror(errno));
    }
  }
}

QuizService::~QuizService() {
  if (log_fd_ >= 0) ::close(log_fd_);
}

void QuizService::replay() {
  const auto& path = options_.log_path;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (!std::filesystem::exists(path)) return;
  std::string content = read_file(path);
  std::size_t start = 0, line_no = 0;
  while (start < content.size()) {
    ++line_no;
    const auto nl = content.find('\n', start);
    const bool torn_candidate = nl == std::string::npos;
    const std::string line = content.substr(start, torn_candidate ? std::string::npos : nl - start);
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        if (!torn_candidate) throw ParseError(path.string() + ": " + e.what(), line_no);
        // Crash mid-append: the judgment was never acknowledged.
        std::filesystem::resize_file(path, start);
        break;
      }
      Judgment jd;
      try {
        jd = judgment_from_json(j);
      } catch (const std::exception& e) {
        throw ParseError(path.string() + ": " + e.what(), line_no);
      }
      if (!index_.count(jd.pair_id)) {
        throw ParseError(path.string() + ": unknown pair " + jd.pair_id, line_no);
      }
      if (subjects_[jd.subject_id].judged.count(jd.pair_id)) {
        throw ParseError(path.string() + ": duplicate judgment for " + jd.pair_id, line_no);
      }
      apply(jd);
      if (torn_candidate) {
        // Complete record missing its newline; terminate it.
        std::ofstream(path, std::ios::app) << '\n';
      }
    }
    if (torn_candidate) break;
    start = nl + 1;
  }
}

void QuizService::apply(const Judgment& j) {
  auto& s = subjects_[j.subject_id];
  s.judged.insert(j.pair_id);
  if (j.correct()) ++s.matches;
  log_.push_back(j);
}

PresentedOrder QuizService::order_for(const std::string& subject,
                                      const std::string& pair_id) const {
  return (mix(options_.seed ^ 0x9e3779b97f4a7c15ULL, subject, pair_id) & 1)
             ? PresentedOrder::kNM
             : PresentedOrder::kMN;
}

std::optional<std::size_t> QuizService::next_item(const std::string& subject,
                                                  const SubjectState* state) const {
  const std::size_t judged = state ? state->judged.size() : 0;
  if (options_.session_length > 0 && judged >= options_.session_length) return std::nullopt;
  std::optional<std::size_t> best;
  std::uint64_t best_key = 0;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (state && state->judged.count(items_[i].pair_id)) continue;
    const std::uint64_t key = mix(options_.seed, subject, items_[i].pair_id);
    if (!best || key < best_key || (key == best_key && items_[i].pair_id < items_[*best].pair_id)) {
      best = i;
      best_key = key;
    }
  }
  return best;
}

nlohmann::json QuizService::done_payload(const SubjectState* state) const {
  const std::uint64_t judged = state ? state->judged.size() : 0;
  const std::uint64_t matches = state ? state->matches : 0;
  const auto pct = percent(matches, judged);
  return {{"done", true},
          {"judged", judged},
          {"session_length", options_.session_length},
          {"matches", matches},
          {"percent", pct ? nlohmann::json(*pct) : nullptr}};
}

nlohmann::json QuizService::get_pair(const std::string& subject_id) const {
  if (subject_id.empty()) throw QuizError(400, "missing subject");
  std::shared_lock lock(mutex_);
  const auto it = subjects_.find(subject_id);
  const SubjectState* state = it == subjects_.end() ? nullptr : &it->second;
  const auto next = next_item(subject_id, state);
  if (!next) return done_payload(state);
  const auto& item = items_[*next];
  const bool mn = order_for(subject_id, item.pair_id) == PresentedOrder::kMN;
  return {{"pair_id", item.pair_id},
          {"quote_a_text", mn ? item.memorable_text : item.nonmemorable_text},
          {"quote_b_text", mn ? item.nonmemorable_text : item.memorable_text}};
}

nlohmann::json QuizService::post_judgment(const std::string& subject_id,
                                          const std::string& pair_id, Position chosen,
                                          std::int64_t timestamp_ms) {
  if (subject_id.empty()) throw QuizError(400, "missing subject_id");
  if (!index_.count(pair_id)) throw QuizError(404, "unknown pair " + pair_id);
  std::unique_lock lock(mutex_);
  auto it = subjects_.find(subject_id);
  const SubjectState* state = it == subjects_.end() ? nullptr : &it->second;
  if (state && state->judged.count(pair_id)) {
    throw QuizError(409, "pair " + pair_id + " already judged by " + subject_id);
  }
  const auto next = next_item(subject_id, state);
  if (!next) throw QuizError(409, "session is complete");
  if (items_[*next].pair_id != pair_id) {
    throw QuizError(409, "pair " + pair_id + " is not the pair being served");
  }

  Judgment j{pair_id, subject_id, chosen, order_for(subject_id, pair_id),
             timestamp_ms >= 0 ? timestamp_ms : now_ms()};
  if (log_fd_ >= 0) {
    const std::string line = to_json(j).dump() + "\n";
    std::size_t written = 0;
    while (written < line.size()) {
      const ssize_t n = ::write(log_fd_, line.data() + written, line.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw QuizError(500, std::string("judgment log write failed: ") + std::strerror(errno));
      }
      written += static_cast<std::size_t>(n);
    }
    if (::fsync(log_fd_) != 0) {
      throw QuizError(500, std::string("judgment log fsync failed: ") + std::strerror(errno));
    }
  }
  apply(j);

  const SubjectState& s = subjects_.at(subject_id);
  const bool done = !next_item(subject_id, &s);
  nlohmann::json ack = {{"accepted", true},
                        {"pair_id", pair_id},
                        {"judged", s.judged.size()},
                        {"session_length", options_.session_length},
                        {"done", done}};
  if (done) {
    const auto pct = percent(s.matches, s.judged.size());
    ack["matches"] = s.matches;
    ack["percent"] = pct ? nlohmann::json(*pct) : nullptr;
  }
  return ack;
}

QuizStats QuizService::stats() const {
  std::shared_lock lock(mutex_);
  return compute_quiz_stats(log_);
}

std::vector<Judgment> QuizService::judgments() const {
  std::shared_lock lock(mutex_);
  return log_;
}

}  // namespace memquote
