#include "memquote/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <random>
#include <unordered_map>

#include "memquote/error.hpp"
#include "memquote/hash.hpp"

namespace memquote {
namespace {

constexpr std::array<const char*, 6> kBankNames = {"word1", "word2", "word3",
                                                   "pos1",  "pos2",  "pos3"};

// Unbiased index in [0, n) from a 64-bit engine; std::uniform_int_distribution
// is not reproducible across standard libraries.
std::size_t draw_below(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return static_cast<std::size_t>(r % n);
}

template <typename T>
void fisher_yates(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[draw_below(rng, i)]);
}

bool uses_common(FeatureSet fs) {
  return fs == FeatureSet::kDistinctiveness || fs == FeatureSet::kAll3;
}
bool uses_slogan(FeatureSet fs) {
  return fs == FeatureSet::kSloganSim || fs == FeatureSet::kAll3;
}
bool uses_generality(FeatureSet fs) {
  return fs == FeatureSet::kGenerality || fs == FeatureSet::kAll3;
}

void check_bank(const LmBank* bank, const char* what) {
  if (bank == nullptr) throw ConfigError(std::string("missing ") + what + " language models");
  if (bank->models.size() != kBankNames.size()) {
    throw ConfigError(std::string(what) + " bank must hold 6 models");
  }
  for (std::size_t i = 0; i < bank->models.size(); ++i) {
    const auto& m = bank->models[i];
    const bool tags = i >= 3;
    if (m.order() != static_cast<int>(i % 3) + 1 ||
        (m.alphabet() == Alphabet::kTags) != tags) {
      throw ConfigError(std::string(what) + " bank is not word 1-3 then tag 1-3");
    }
  }
}

void add_schema_lm(FeatureSchema& s, const std::string& prefix) {
  for (const char* name : kBankNames) {
    const int base = static_cast<int>(s.names.size());
    for (const char* part : {"ll_q1", "ll_q2", "diff", "sign"}) {
      s.names.push_back(prefix + ":" + name + ":" + part);
    }
    s.partner.insert(s.partner.end(), {base + 1, base, -1, -1});
  }
}

void add_lm_features(std::vector<double>& out, const LmBank& bank, const TaggedQuote& q1,
                     const TaggedQuote& q2, bool punct) {
  const TokenSequence w1 = word_sequence(q1.quote, punct), w2 = word_sequence(q2.quote, punct);
  const TokenSequence t1 = tag_sequence(q1, punct), t2 = tag_sequence(q2, punct);
  for (std::size_t i = 0; i < bank.models.size(); ++i) {
    const bool tags = i >= 3;
    const double a = bank.models[i].log_prob(tags ? t1 : w1);
    const double b = bank.models[i].log_prob(tags ? t2 : w2);
    const double d = a - b;
    out.insert(out.end(), {a, b, d, static_cast<double>((d > 0) - (d < 0))});
  }
}

using BowIndex = std::unordered_map<std::string, std::size_t>;

BowIndex make_bow_index(const std::vector<std::string>& vocab) {
  BowIndex idx;
  for (std::size_t i = 0; i < vocab.size(); ++i) idx.emplace(vocab[i], i);
  return idx;
}

std::vector<double> extract_with(const TaggedQuote& q1, const TaggedQuote& q2, FeatureSet fs,
                                 const FeatureContext& ctx, const BowIndex& bow) {
  std::vector<double> out;
  if (fs == FeatureSet::kBow) {
    out.assign(ctx.bow_vocabulary.size(), 0.0);
    for (const auto& t : q1.quote.tokens) {
      if (auto it = bow.find(t.text); t.is_word && it != bow.end()) out[it->second] += 1.0;
    }
    for (const auto& t : q2.quote.tokens) {
      if (auto it = bow.find(t.text); t.is_word && it != bow.end()) out[it->second] -= 1.0;
    }
    return out;
  }
  if (uses_common(fs)) {
    check_bank(ctx.common, "common-language");
    add_lm_features(out, *ctx.common, q1, q2, ctx.include_punctuation);
  }
  if (uses_generality(fs)) {
    const auto c1 = generality_counts(q1, ctx.generality);
    const auto c2 = generality_counts(q2, ctx.generality);
    for (auto m : kGeneralityMetrics) out.push_back(generality_rate(c1, m) - generality_rate(c2, m));
  }
  if (uses_slogan(fs)) {
    check_bank(ctx.slogan, "slogan");
    add_lm_features(out, *ctx.slogan, q1, q2, ctx.include_punctuation);
  }
  return out;
}

std::vector<std::vector<double>> design(std::span<const LabeledPair> data, FeatureSet fs,
                                        const FeatureContext& ctx, const FeatureSchema& schema,
                                        bool parallel) {
  const BowIndex bow = make_bow_index(ctx.bow_vocabulary);
  std::vector<std::vector<double>> x(data.size());
  const auto n = static_cast<std::int64_t>(data.size());
  std::vector<std::exception_ptr> errors(data.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      x[i] = antisymmetric_view(extract_with(data[i].first, data[i].second, fs, ctx, bow), schema);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return x;
}

std::vector<int> labels_of(std::span<const LabeledPair> data) {
  std::vector<int> y;
  y.reserve(data.size());
  for (const auto& p : data) y.push_back(p.label);
  return y;
}

struct Fitted {
  double accuracy = 0.0;
  std::string hash;
  LinearModel model;
};

Fitted fit_and_score(const std::vector<std::vector<double>>& xtrain, std::span<const int> ytrain,
                     const std::vector<std::vector<double>>& xtest, std::span<const int> ytest,
                     const std::vector<std::string>& vocabulary, const SvmOptions& svm) {
  Fitted f;
  f.model = train_classifier(xtrain, ytrain, svm);
  double credit = 0.0;
  for (std::size_t i = 0; i < xtest.size(); ++i) {
    credit += prediction_credit(f.model.decision(xtest[i]), ytest[i]);
  }
  f.accuracy = xtest.empty() ? 0.0 : credit / static_cast<double>(xtest.size());
  Fnv1a h;
  for (const auto& t : vocabulary) h.str(t);
  for (double s : f.model.scales) h.num(s);
  for (double w : f.model.weights) h.num(w);
  f.hash = h.hex();
  return f;
}

}  // namespace

std::string to_string(FeatureSet fs) {
  switch (fs) {
    case FeatureSet::kBow: return "bow";
    case FeatureSet::kDistinctiveness: return "distinctiveness";
    case FeatureSet::kGenerality: return "generality";
    case FeatureSet::kSloganSim: return "slogan_sim";
    case FeatureSet::kAll3: return "all3";
  }
  throw InvariantError("unknown feature set");
}

FeatureSet parse_feature_set(std::string_view name) {
  for (auto fs : {FeatureSet::kBow, FeatureSet::kDistinctiveness, FeatureSet::kGenerality,
                  FeatureSet::kSloganSim, FeatureSet::kAll3}) {
    if (to_string(fs) == name) return fs;
  }
  throw ConfigError("unknown feature set '" + std::string(name) + "'");
}

std::vector<LabeledPair> present_pairs(std::span<const TaggedPair> pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<LabeledPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (rng() & 1) {
      out.push_back({p.nonmemorable, p.memorable, -1});
    } else {
      out.push_back({p.memorable, p.nonmemorable, 1});
    }
  }
  return out;
}

LabeledPair reversed(const LabeledPair& p) { return {p.second, p.first, -p.label}; }

LmBank train_bank(std::span<const TaggedQuote> corpus, double alpha,
                  bool include_punctuation) {
  std::vector<TokenSequence> words, tags;
  for (const auto& tq : corpus) {
    words.push_back(word_sequence(tq.quote, include_punctuation));
    tags.push_back(tag_sequence(tq, include_punctuation));
  }
  LmBank bank;
  for (int order = 1; order <= 3; ++order) {
    bank.models.push_back(train_lm(words, order, alpha, Alphabet::kWords));
  }
  for (int order = 1; order <= 3; ++order) {
    bank.models.push_back(train_lm(tags, order, alpha, Alphabet::kTags));
  }
  return bank;
}

FeatureSchema feature_schema(FeatureSet fs, const FeatureContext& ctx) {
  FeatureSchema s;
  s.id = to_string(fs);
  if (fs == FeatureSet::kBow) {
    for (const auto& t : ctx.bow_vocabulary) {
      s.names.push_back("bow:" + t);
      s.partner.push_back(-1);
    }
    s.id += ":" + std::to_string(ctx.bow_vocabulary.size());
    return s;
  }
  if (uses_common(fs)) add_schema_lm(s, "common");
  if (uses_generality(fs)) {
    for (auto m : kGeneralityMetrics) {
      s.names.push_back("generality:" + metric_name(m));
      s.partner.push_back(-1);
    }
  }
  if (uses_slogan(fs)) add_schema_lm(s, "slogan");
  return s;
}

std::vector<double> extract_features(const TaggedQuote& q1, const TaggedQuote& q2,
                                     FeatureSet fs, const FeatureContext& ctx) {
  return extract_with(q1, q2, fs, ctx, make_bow_index(ctx.bow_vocabulary));
}

std::vector<std::string> bow_vocabulary(std::span<const LabeledPair> train,
                                        std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  for (const auto& p : train) {
    for (const auto* q : {&p.first.quote, &p.second.quote}) {
      for (const auto& t : q->tokens) {
        if (t.is_word) ++counts[t.text];
      }
    }
  }
  std::vector<std::string> vocab;
  for (const auto& [term, c] : counts) {
    if (c >= min_count) vocab.push_back(term);
  }
  return vocab;
}

std::vector<double> antisymmetric_view(std::span<const double> x, const FeatureSchema& schema) {
  if (x.size() != schema.size()) {
    throw InvariantError("feature vector length " + std::to_string(x.size()) +
                         " does not match schema " + schema.id);
  }
  std::vector<double> out;
  out.reserve(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const int p = schema.partner[j];
    if (p < 0) {
      out.push_back(x[j]);
    } else if (static_cast<std::size_t>(p) > j) {
      out.push_back(x[j] - x[p]);
    }
  }
  return out;
}

double LinearModel::decision(std::span<const double> x) const {
  if (x.size() != weights.size()) throw InvariantError("decision: dimension mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += weights[j] * (x[j] * scales[j]);
  return s;
}

nlohmann::json LinearModel::to_json() const {
  return {{"format", "memquote-linear"}, {"version", 1}, {"weights", weights},
          {"scales", scales},           {"epochs", epochs}};
}

LinearModel train_classifier(const std::vector<std::vector<double>>& x,
                             std::span<const int> y, const SvmOptions& options) {
  if (x.empty()) throw ConfigError("train_classifier: no training data");
  if (x.size() != y.size()) throw ConfigError("train_classifier: label count mismatch");
  if (options.c <= 0.0) throw ConfigError("train_classifier: C must be positive");
  const std::size_t d = x.front().size();
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != d) throw ConfigError("train_classifier: ragged feature rows");
    for (double v : x[i]) {
      if (!std::isfinite(v)) throw ConfigError("train_classifier: non-finite feature");
    }
    if (y[i] == 1) {
      pos = true;
    } else if (y[i] == -1) {
      neg = true;
    } else {
      throw ConfigError("train_classifier: labels must be -1 or +1");
    }
  }
  if (!pos || !neg) throw ConfigError("train_classifier: training data has a single class");

  LinearModel m;
  // Scale by root mean square; no centering, so a reversed pair still maps
  // to the negated vector.
  m.scales.assign(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    double ss = 0.0;
    for (const auto& row : x) ss += row[j] * row[j];
    const double rms = std::sqrt(ss / static_cast<double>(x.size()));
    if (rms > 0.0) m.scales[j] = 1.0 / rms;
  }
  std::vector<std::vector<double>> z(x.size(), std::vector<double>(d));
  std::vector<double> qii(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      z[i][j] = x[i][j] * m.scales[j];
      qii[i] += z[i][j] * z[i][j];
    }
  }

  m.weights.assign(d, 0.0);
  std::vector<double> alpha(x.size(), 0.0);
  std::vector<std::size_t> order(x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(options.seed);
  const double c = options.c;
  for (int epoch = 0; epoch < options.max_epochs; ++epoch) {
    fisher_yates(order, rng);
    double max_pg = -INFINITY, min_pg = INFINITY;
    for (std::size_t i : order) {
      if (qii[i] == 0.0) continue;
      double wx = 0.0;
      for (std::size_t j = 0; j < d; ++j) wx += m.weights[j] * z[i][j];
      const double g = y[i] * wx - 1.0;
      double pg = g;
      if (alpha[i] == 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha[i] == c) {
        pg = std::max(g, 0.0);
      }
      max_pg = std::max(max_pg, pg);
      min_pg = std::min(min_pg, pg);
      if (std::fabs(pg) > 1e-12) {
        const double old = alpha[i];
        alpha[i] = std::clamp(alpha[i] - g / qii[i], 0.0, c);
        const double step = (alpha[i] - old) * y[i];
        for (std::size_t j = 0; j < d; ++j) m.weights[j] += step * z[i][j];
      }
    }
    m.epochs = epoch + 1;
    if (max_pg - min_pg < options.tolerance || max_pg == -INFINITY) break;
  }
  return m;
}

double prediction_credit(double decision, int label) {
  if (decision == 0.0) return 0.5;
  return (decision > 0.0) == (label > 0) ? 1.0 : 0.0;
}

std::vector<int> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("k must be at least 2");
  if (labels.size() < static_cast<std::size_t>(k)) {
    throw ConfigError("need at least k=" + std::to_string(k) + " pairs, have " +
                      std::to_string(labels.size()));
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] > 0 ? pos : neg).push_back(i);
  fisher_yates(pos, rng);
  fisher_yates(neg, rng);
  std::vector<int> fold(labels.size());
  std::size_t next = 0;
  for (const auto* group : {&pos, &neg}) {
    for (std::size_t i : *group) fold[i] = static_cast<int>(next++ % k);
  }
  return fold;
}

FoldResult run_fold(std::span<const LabeledPair> train, std::span<const LabeledPair> test,
                    FeatureSet fs, const FeatureContext& ctx, const CvOptions& options) {
  FeatureContext local = ctx;
  if (fs == FeatureSet::kBow) local.bow_vocabulary = bow_vocabulary(train, options.bow_min_count);
  FoldResult r;
  r.schema = feature_schema(fs, local);
  r.feature_count = r.schema.size();
  const auto xtrain = design(train, fs, local, r.schema, false);
  const auto xtest = design(test, fs, local, r.schema, false);
  const auto f = fit_and_score(xtrain, labels_of(train), xtest, labels_of(test),
                               local.bow_vocabulary, options.svm);
  r.accuracy = f.accuracy;
  r.artifact_hash = f.hash;
  r.model = f.model;
  return r;
}

FoldReport cross_validate(std::span<const LabeledPair> data, FeatureSet fs,
                          const FeatureContext& ctx, const CvOptions& options) {
  const auto y = labels_of(data);
  const auto folds = stratified_folds(y, options.k, options.seed);
  return cross_validate_folds(data, folds, options.k, fs, ctx, options);
}

FoldReport cross_validate_folds(std::span<const LabeledPair> data, std::span<const int> fold_of,
                                int k, FeatureSet fs, const FeatureContext& ctx,
                                const CvOptions& options) {
  if (fold_of.size() != data.size()) throw ConfigError("fold assignment size mismatch");
  const auto y = labels_of(data);

  FoldReport rep;
  rep.feature_set = to_string(fs);
  {
    FeatureContext all = ctx;
    if (fs == FeatureSet::kBow) all.bow_vocabulary = bow_vocabulary(data, options.bow_min_count);
    rep.feature_count = feature_schema(fs, all).size();
  }

  // Label-independent features are extracted once for every pair.
  std::vector<std::vector<double>> shared;
  FeatureSchema shared_schema;
  if (fs != FeatureSet::kBow) {
    shared_schema = feature_schema(fs, ctx);
    shared = design(data, fs, ctx, shared_schema, options.parallel);
  }

  rep.per_fold_accuracy.assign(k, 0.0);
  rep.per_fold_feature_count.assign(k, 0);
  rep.artifact_hash.assign(k, "");
  std::vector<std::exception_ptr> errors(k);
#pragma omp parallel for schedule(dynamic, 1) if (options.parallel)
  for (int f = 0; f < k; ++f) {
    try {
      std::vector<std::size_t> tr, te;
      for (std::size_t i = 0; i < data.size(); ++i) (fold_of[i] == f ? te : tr).push_back(i);
      FeatureContext local = ctx;
      std::vector<std::vector<double>> xtrain, xtest;
      std::vector<int> ytrain, ytest;
      for (std::size_t i : tr) ytrain.push_back(y[i]);
      for (std::size_t i : te) ytest.push_back(y[i]);
      std::size_t width = shared_schema.size();
      if (fs == FeatureSet::kBow) {
        std::vector<LabeledPair> train, test;
        for (std::size_t i : tr) train.push_back(data[i]);
        for (std::size_t i : te) test.push_back(data[i]);
        local.bow_vocabulary = bow_vocabulary(train, options.bow_min_count);
        const auto schema = feature_schema(fs, local);
        width = schema.size();
        xtrain = design(train, fs, local, schema, false);
        xtest = design(test, fs, local, schema, false);
      } else {
        for (std::size_t i : tr) xtrain.push_back(shared[i]);
        for (std::size_t i : te) xtest.push_back(shared[i]);
      }
      SvmOptions svm = options.svm;
      svm.seed = options.svm.seed + static_cast<std::uint64_t>(f);
      const auto fit = fit_and_score(xtrain, ytrain, xtest, ytest, local.bow_vocabulary, svm);
      rep.per_fold_accuracy[f] = fit.accuracy;
      rep.per_fold_feature_count[f] = width;
      rep.artifact_hash[f] = fit.hash;
    } catch (...) {
      errors[f] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  double sum = 0.0;
  for (double a : rep.per_fold_accuracy) sum += a;
  rep.mean_accuracy = sum / static_cast<double>(k);
  return rep;
}

nlohmann::json FoldReport::to_json() const {
  return {{"feature_set", feature_set},
          {"per_fold_accuracy", per_fold_accuracy},
          {"mean_accuracy", mean_accuracy},
          {"feature_count", feature_count},
          {"per_fold_feature_count", per_fold_feature_count},
          {"artifact_hash", artifact_hash}};
}

}  // namespace memquote
