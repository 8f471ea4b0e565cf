#include "memquote/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "memquote/error.hpp"
#include "memquote/io.hpp"

namespace memquote {
namespace {

constexpr std::string_view kFormatName = "memquote-ngram";
constexpr int kFormatVersion = 1;

std::string alphabet_name(Alphabet a) {
  return a == Alphabet::kWords ? "words" : "tags";
}

Alphabet parse_alphabet(const std::string& s) {
  if (s == "words") return Alphabet::kWords;
  if (s == "tags") return Alphabet::kTags;
  throw ConfigError("unknown alphabet '" + s + "'");
}

}  // namespace

NGramLM::Id NGramLM::lookup(std::string_view token) const {
  const auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnkId : it->second;
}

NGramLM::Id NGramLM::intern(const std::string& token) {
  const auto [it, inserted] =
      token_to_id_.try_emplace(token, static_cast<Id>(id_to_token_.size()));
  if (inserted) {
    if (id_to_token_.size() >= (Id{1} << kBitsPerId) - 1) {
      throw ConfigError("vocabulary exceeds 2^21 types");
    }
    id_to_token_.push_back(token);
  }
  return it->second;
}

std::uint64_t NGramLM::pack(std::span<const Id> ids) {
  std::uint64_t key = 0;
  for (Id id : ids) key = (key << kBitsPerId) | id;
  return key;
}

std::vector<NGramLM::Id> NGramLM::padded_ids(
    std::span<const std::string> sequence) const {
  std::vector<Id> ids(static_cast<std::size_t>(options_.order - 1), kStartId);
  ids.reserve(ids.size() + sequence.size() + 1);
  for (const auto& tok : sequence) ids.push_back(lookup(tok));
  if (options_.end_symbol) ids.push_back(kEndId);
  return ids;
}

NGramLM NGramLM::train(std::span<const TokenSequence> corpus,
                       const LmOptions& options) {
  if (corpus.empty()) throw ConfigError("cannot train a language model on an empty corpus");
  if (options.order < 1 || options.order > 3) {
    throw ConfigError("language model order must be 1, 2 or 3");
  }
  if (!(options.alpha > 0.0) || !std::isfinite(options.alpha)) {
    throw ConfigError("smoothing constant alpha must be positive");
  }

  NGramLM lm;
  lm.options_ = options;
  lm.id_to_token_ = {std::string(kUnk), std::string(kStart), std::string(kEnd)};
  lm.token_to_id_ = {{std::string(kUnk), kUnkId},
                     {std::string(kStart), kStartId},
                     {std::string(kEnd), kEndId}};
  for (const auto& seq : corpus) {
    for (const auto& tok : seq) {
      if (tok == kUnk || tok == kStart || tok == kEnd) {
        throw ConfigError("training token collides with reserved symbol " + tok);
      }
      lm.intern(tok);
    }
  }

  const auto order = static_cast<std::size_t>(options.order);
  for (const auto& seq : corpus) {
    const auto ids = lm.padded_ids(seq);
    for (std::size_t i = order - 1; i < ids.size(); ++i) {
      const std::span<const Id> ngram(ids.data() + i + 1 - order, order);
      ++lm.ngram_counts_[pack(ngram)];
      ++lm.context_counts_[pack(ngram.first(order - 1))];
      ++lm.total_tokens_;
    }
  }
  lm.check_invariants();
  return lm;
}

void NGramLM::check_invariants() const {
  const auto shift = kBitsPerId;
  std::uint64_t sum = 0;
  for (const auto& [key, count] : ngram_counts_) {
    const auto ctx = context_counts_.find(key >> shift);
    const std::uint64_t ctx_count =
        options_.order == 1 ? total_tokens_
                            : (ctx == context_counts_.end() ? 0 : ctx->second);
    if (count > ctx_count) throw InvariantError("n-gram count exceeds its context count");
    sum += count;
  }
  if (sum != total_tokens_) throw InvariantError("n-gram counts do not sum to total_tokens");
}

std::size_t NGramLM::vocabulary_size() const {
  std::size_t v = id_to_token_.size() - kFirstTypeId;
  if (options_.unk_in_vocabulary) ++v;
  if (options_.end_symbol) ++v;
  return v;
}

std::vector<std::string> NGramLM::vocabulary() const {
  return {id_to_token_.begin() + kFirstTypeId, id_to_token_.end()};
}

bool NGramLM::in_vocabulary(std::string_view token) const {
  return lookup(token) >= kFirstTypeId;
}

double NGramLM::log_conditional(std::uint64_t context_key,
                                std::uint64_t ngram_key) const {
  const auto ng = ngram_counts_.find(ngram_key);
  const auto ctx = context_counts_.find(context_key);
  const double num =
      static_cast<double>(ng == ngram_counts_.end() ? 0 : ng->second) + options_.alpha;
  const double den =
      static_cast<double>(ctx == context_counts_.end() ? 0 : ctx->second) +
      options_.alpha * static_cast<double>(vocabulary_size());
  return std::log(num / den);
}

double NGramLM::log_prob(std::span<const std::string> sequence) const {
  const auto order = static_cast<std::size_t>(options_.order);
  const auto ids = padded_ids(sequence);
  double total = 0.0;
  for (std::size_t i = order - 1; i < ids.size(); ++i) {
    const std::span<const Id> ngram(ids.data() + i + 1 - order, order);
    total += log_conditional(pack(ngram.first(order - 1)), pack(ngram));
  }
  return total;
}

double NGramLM::conditional_prob(std::span<const std::string> context,
                                 std::string_view token) const {
  const auto need = static_cast<std::size_t>(options_.order - 1);
  std::vector<Id> ids(need, kStartId);
  const std::size_t take = std::min(need, context.size());
  for (std::size_t i = 0; i < take; ++i) {
    ids[need - take + i] = lookup(context[context.size() - take + i]);
  }
  const std::uint64_t ctx_key = pack(ids);
  ids.push_back(token == kEnd ? kEndId : lookup(token));
  return std::exp(log_conditional(ctx_key, pack(ids)));
}

std::uint64_t NGramLM::ngram_count(std::span<const std::string> ngram) const {
  if (ngram.size() != static_cast<std::size_t>(options_.order)) {
    throw ConfigError("n-gram length does not match model order");
  }
  std::vector<Id> ids;
  for (const auto& t : ngram) ids.push_back(lookup(t));
  const auto it = ngram_counts_.find(pack(ids));
  return it == ngram_counts_.end() ? 0 : it->second;
}

std::uint64_t NGramLM::context_count(std::span<const std::string> context) const {
  if (context.size() + 1 != static_cast<std::size_t>(options_.order)) {
    throw ConfigError("context length does not match model order");
  }
  if (context.empty()) return total_tokens_;
  std::vector<Id> ids;
  for (const auto& t : context) ids.push_back(lookup(t));
  const auto it = context_counts_.find(pack(ids));
  return it == context_counts_.end() ? 0 : it->second;
}

std::vector<std::pair<std::vector<std::string>, std::uint64_t>> NGramLM::ngrams()
    const {
  std::vector<std::pair<std::vector<std::string>, std::uint64_t>> out;
  out.reserve(ngram_counts_.size());
  const std::uint64_t mask = (std::uint64_t{1} << kBitsPerId) - 1;
  for (const auto& [key, count] : ngram_counts_) {
    std::vector<std::string> toks(static_cast<std::size_t>(options_.order));
    std::uint64_t k = key;
    for (auto it = toks.rbegin(); it != toks.rend(); ++it) {
      *it = id_to_token_[k & mask];
      k >>= kBitsPerId;
    }
    out.emplace_back(std::move(toks), count);
  }
  std::sort(out.begin(), out.end());
  return out;
}

nlohmann::json NGramLM::to_json() const {
  nlohmann::json j;
  j["format"] = kFormatName;
  j["version"] = kFormatVersion;
  j["order"] = options_.order;
  j["alpha"] = options_.alpha;
  j["end_symbol"] = options_.end_symbol;
  j["unk_in_vocabulary"] = options_.unk_in_vocabulary;
  j["alphabet"] = alphabet_name(options_.alphabet);
  j["total_tokens"] = total_tokens_;
  j["vocabulary"] = vocabulary();

  // Each n-gram is stored as its token ids followed by its count. Ids 0-2
  // are <unk>, <s>, </s>; id k >= 3 is vocabulary[k - 3].
  std::vector<std::pair<std::uint64_t, std::uint64_t>> sorted(ngram_counts_.begin(),
                                                              ngram_counts_.end());
  std::sort(sorted.begin(), sorted.end());
  const std::uint64_t mask = (std::uint64_t{1} << kBitsPerId) - 1;
  auto rows = nlohmann::json::array();
  for (const auto& [key, count] : sorted) {
    std::vector<std::uint64_t> row(static_cast<std::size_t>(options_.order));
    std::uint64_t k = key;
    for (auto it = row.rbegin(); it != row.rend(); ++it) {
      *it = k & mask;
      k >>= kBitsPerId;
    }
    row.push_back(count);
    rows.push_back(std::move(row));
  }
  j["ngrams"] = std::move(rows);
  return j;
}

NGramLM NGramLM::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kFormatName) {
      throw ConfigError("not a memquote n-gram model");
    }
    if (j.at("version").get<int>() != kFormatVersion) {
      throw ConfigError("unsupported n-gram model version");
    }
    NGramLM lm;
    lm.options_.order = j.at("order").get<int>();
    lm.options_.alpha = j.at("alpha").get<double>();
    lm.options_.end_symbol = j.at("end_symbol").get<bool>();
    lm.options_.unk_in_vocabulary = j.at("unk_in_vocabulary").get<bool>();
    lm.options_.alphabet = parse_alphabet(j.at("alphabet").get<std::string>());
    if (lm.options_.order < 1 || lm.options_.order > 3) {
      throw ConfigError("model order out of range");
    }
    lm.id_to_token_ = {std::string(kUnk), std::string(kStart), std::string(kEnd)};
    lm.token_to_id_ = {{std::string(kUnk), kUnkId},
                       {std::string(kStart), kStartId},
                       {std::string(kEnd), kEndId}};
    for (const auto& t : j.at("vocabulary")) lm.intern(t.get<std::string>());
    lm.total_tokens_ = j.at("total_tokens").get<std::uint64_t>();
    const auto order = static_cast<std::size_t>(lm.options_.order);
    for (const auto& row : j.at("ngrams")) {
      const auto values = row.get<std::vector<std::uint64_t>>();
      if (values.size() != order + 1) throw ConfigError("malformed n-gram row");
      std::vector<Id> ids;
      for (std::size_t i = 0; i < order; ++i) {
        if (values[i] >= lm.id_to_token_.size()) throw ConfigError("n-gram id out of range");
        ids.push_back(static_cast<Id>(values[i]));
      }
      lm.ngram_counts_[pack(ids)] += values[order];
      lm.context_counts_[pack(std::span<const Id>(ids).first(order - 1))] +=
          values[order];
    }
    lm.check_invariants();
    return lm;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed n-gram model: ") + e.what());
  }
}

void NGramLM::save(const std::filesystem::path& path) const {
  write_file_atomic(path, to_json().dump() + "\n");
}

NGramLM NGramLM::load(const std::filesystem::path& path) {
  return from_json(nlohmann::json::parse(read_file(path)));
}

bool operator==(const NGramLM& a, const NGramLM& b) {
  return a.options_.order == b.options_.order && a.options_.alpha == b.options_.alpha &&
         a.options_.end_symbol == b.options_.end_symbol &&
         a.options_.unk_in_vocabulary == b.options_.unk_in_vocabulary &&
         a.options_.alphabet == b.options_.alphabet &&
         a.total_tokens_ == b.total_tokens_ && a.id_to_token_ == b.id_to_token_ &&
         a.ngram_counts_ == b.ngram_counts_ && a.context_counts_ == b.context_counts_;
}

NGramLM train_lm(std::span<const TokenSequence> corpus, int order, double alpha,
                 Alphabet alphabet) {
  LmOptions o;
  o.order = order;
  o.alpha = alpha;
  o.alphabet = alphabet;
  return NGramLM::train(corpus, o);
}

double log_prob(const NGramLM& lm, std::span<const std::string> sequence) {
  return lm.log_prob(sequence);
}

Preference prefers(const NGramLM& lm_a, const NGramLM& lm_b,
                   std::span<const std::string> sequence) {
  if (lm_a.order() != lm_b.order() || lm_a.alphabet() != lm_b.alphabet()) {
    throw ConfigError("prefers: models differ in order or alphabet");
  }
  const double a = lm_a.log_prob(sequence);
  const double b = lm_b.log_prob(sequence);
  if (a > b) return Preference::kA;
  if (a < b) return Preference::kB;
  return Preference::kTie;
}

}  // namespace memquote
