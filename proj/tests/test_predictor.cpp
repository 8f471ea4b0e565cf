#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "memquote/error.hpp"
#include "memquote/predictor.hpp"

using namespace memquote;

namespace {

const std::vector<std::string> kWords = {"a", "he", "walked", "walks", "dog", "cat", "the",
                                         "it", "runs", "ran", "home", "an", "they", "see"};

std::string tag_for(const std::string& w) {
  if (w == "a" || w == "an" || w == "the") return "DT";
  if (w == "he" || w == "it" || w == "they") return "PRP";
  if (w == "walked" || w == "ran") return "VBD";
  if (w == "walks" || w == "runs") return "VBZ";
  if (w == "see") return "VBP";
  if (w == ".") return ".";
  return "NN";
}

TaggedQuote quote_of(std::size_t line, const std::vector<std::string>& ws, bool mem) {
  std::string text;
  for (const auto& w : ws) text += (text.empty() ? "" : " ") + w;
  text += ".";
  TaggedQuote t{make_quote("mv", line, "A", text, mem), {}};
  for (const auto& tok : t.quote.tokens) t.tags.push_back(tag_for(tok.text));
  return t;
}

std::vector<std::string> random_words(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::string> ws(n);
  for (auto& w : ws) w = kWords[rng() % kWords.size()];
  return ws;
}

std::vector<TaggedPair> random_pairs(std::mt19937_64& rng, std::size_t count) {
  std::vector<TaggedPair> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = 2 + rng() % 6;
    out.push_back({quote_of(2 * i, random_words(rng, n), true),
                   quote_of(2 * i + 1, random_words(rng, n), false)});
  }
  return out;
}

std::vector<TaggedQuote> random_corpus(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::vector<TaggedQuote> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(quote_of(i, random_words(rng, 2 + rng() % 8), false));
  return out;
}

struct Banks {
  LmBank common = train_bank(random_corpus(1, 200));
  LmBank slogan = train_bank(random_corpus(2, 50));
  FeatureContext ctx() const {
    FeatureContext c;
    c.common = &common;
    c.slogan = &slogan;
    return c;
  }
};

const Banks& banks() {
  static const Banks b;
  return b;
}

}  // namespace

TEST_CASE("feature set names") {
  for (auto fs : {FeatureSet::kBow, FeatureSet::kDistinctiveness, FeatureSet::kGenerality,
                  FeatureSet::kSloganSim, FeatureSet::kAll3}) {
    CHECK(parse_feature_set(to_string(fs)) == fs);
  }
  CHECK_THROWS_AS(parse_feature_set("nope"), ConfigError);
}

TEST_CASE("schema sizes and extraction widths") {
  const auto ctx = banks().ctx();
  std::mt19937_64 rng(1);
  const auto pairs = random_pairs(rng, 3);
  const std::vector<std::pair<FeatureSet, std::size_t>> expect = {
      {FeatureSet::kDistinctiveness, 24}, {FeatureSet::kGenerality, 4},
      {FeatureSet::kSloganSim, 24}, {FeatureSet::kAll3, 52}};
  for (const auto& [fs, n] : expect) {
    const auto schema = feature_schema(fs, ctx);
    CHECK(schema.size() == n);
    CHECK(extract_features(pairs[0].memorable, pairs[0].nonmemorable, fs, ctx).size() == n);
  }
  auto bow_ctx = ctx;
  bow_ctx.bow_vocabulary = {"dog", "he"};
  CHECK(feature_schema(FeatureSet::kBow, bow_ctx).size() == 2);
  FeatureContext empty;
  CHECK_THROWS_AS(extract_features(pairs[0].memorable, pairs[0].nonmemorable,
                                   FeatureSet::kDistinctiveness, empty),
                  ConfigError);
}

TEST_CASE("reversing a pair negates the antisymmetric view") {
  auto ctx = banks().ctx();
  ctx.bow_vocabulary = {"a", "dog", "he", "walked"};
  std::mt19937_64 rng(2);
  const auto pairs = random_pairs(rng, 40);
  for (auto fs : {FeatureSet::kBow, FeatureSet::kAll3}) {
    const auto schema = feature_schema(fs, ctx);
    for (const auto& p : pairs) {
      const auto x = extract_features(p.memorable, p.nonmemorable, fs, ctx);
      const auto r = extract_features(p.nonmemorable, p.memorable, fs, ctx);
      for (std::size_t j = 0; j < x.size(); ++j) {
        const int partner = schema.partner[j];
        if (partner < 0) {
          CHECK(r[j] == doctest::Approx(-x[j]));
        } else {
          CHECK(r[j] == doctest::Approx(x[partner]));
        }
      }
      const auto vx = antisymmetric_view(x, schema);
      const auto vr = antisymmetric_view(r, schema);
      REQUIRE(vx.size() == vr.size());
      for (std::size_t j = 0; j < vx.size(); ++j) CHECK(vr[j] == doctest::Approx(-vx[j]));
    }
  }
}

TEST_CASE("a trained model flips its prediction on reversed pairs") {
  const auto ctx = banks().ctx();
  std::mt19937_64 rng(3);
  const auto data = present_pairs(random_pairs(rng, 200), 9);
  const auto schema = feature_schema(FeatureSet::kAll3, ctx);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (const auto& p : data) {
    x.push_back(antisymmetric_view(extract_features(p.first, p.second, FeatureSet::kAll3, ctx), schema));
    y.push_back(p.label);
  }
  const auto model = train_classifier(x, y);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto r = reversed(data[i]);
    CHECK(r.label == -data[i].label);
    const auto a = model.decision(x[i]);
    const auto b = model.decision(
        antisymmetric_view(extract_features(r.first, r.second, FeatureSet::kAll3, ctx), schema));
    CHECK(b == doctest::Approx(-a));
    CHECK(prediction_credit(a, data[i].label) + prediction_credit(b, r.label) ==
          doctest::Approx(2 * prediction_credit(a, data[i].label)));
  }
}

TEST_CASE("prediction credit") {
  CHECK(prediction_credit(1.0, 1) == 1.0);
  CHECK(prediction_credit(-1.0, 1) == 0.0);
  CHECK(prediction_credit(-0.5, -1) == 1.0);
  CHECK(prediction_credit(0.0, 1) == 0.5);
  CHECK(prediction_credit(0.0, -1) == 0.5);
}

TEST_CASE("classifier input validation") {
  const std::vector<int> y = {1, -1};
  CHECK_THROWS_AS(train_classifier({}, std::vector<int>{}), ConfigError);
  CHECK_THROWS_AS(train_classifier({{1.0}}, y), ConfigError);
  CHECK_THROWS_AS(train_classifier({{1.0}, {1.0, 2.0}}, y), ConfigError);
  CHECK_THROWS_AS(train_classifier({{1.0}, {NAN}}, y), ConfigError);
  CHECK_THROWS_AS(train_classifier({{1.0}, {2.0}}, std::vector<int>{1, 1}), ConfigError);
  CHECK_THROWS_AS(train_classifier({{1.0}, {2.0}}, std::vector<int>{1, 2}), ConfigError);
}

TEST_CASE("separable data is learned perfectly") {
  // Memorable quotes carry an extra indefinite article, nothing else differs.
  std::mt19937_64 rng(4);
  std::vector<TaggedPair> pairs;
  for (std::size_t i = 0; i < 200; ++i) {
    auto base = random_words(rng, 4);
    std::erase_if(base, [](const std::string& w) { return w == "a" || w == "an"; });
    auto m = base;
    m.push_back("a");
    auto n = base;
    n.push_back("dog");
    pairs.push_back({quote_of(2 * i, m, true), quote_of(2 * i + 1, n, false)});
  }
  const auto data = present_pairs(pairs, 5);
  CvOptions opt;
  opt.k = 5;
  const auto rep = cross_validate(data, FeatureSet::kGenerality, banks().ctx(), opt);
  CHECK(rep.mean_accuracy == doctest::Approx(1.0));
  CHECK(rep.feature_count == 4);
}

TEST_CASE("label-independent features give chance accuracy") {
  std::mt19937_64 rng(5);
  const auto data = present_pairs(random_pairs(rng, 1000), 6);
  CvOptions opt;
  const auto rep = cross_validate(data, FeatureSet::kAll3, banks().ctx(), opt);
  CHECK(rep.mean_accuracy >= 0.45);
  CHECK(rep.mean_accuracy <= 0.55);
  CHECK(rep.per_fold_accuracy.size() == 10);
}

TEST_CASE("constant features score exactly one half") {
  std::vector<TaggedPair> pairs;
  for (std::size_t i = 0; i < 100; ++i) {
    pairs.push_back({quote_of(2 * i, {"the", "dog"}, true), quote_of(2 * i + 1, {"the", "dog"}, false)});
  }
  const auto data = present_pairs(pairs, 7);
  const auto rep = cross_validate(data, FeatureSet::kAll3, banks().ctx());
  CHECK(rep.mean_accuracy == doctest::Approx(0.5));
}

TEST_CASE("stratified folds balance labels") {
  std::vector<int> y;
  for (int i = 0; i < 103; ++i) y.push_back(i % 3 == 0 ? 1 : -1);
  const auto f = stratified_folds(y, 10, 3);
  std::vector<int> pos(10), neg(10);
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] > 0 ? pos : neg)[f[i]]++;
  CHECK(*std::max_element(pos.begin(), pos.end()) - *std::min_element(pos.begin(), pos.end()) <= 1);
  CHECK(*std::max_element(neg.begin(), neg.end()) - *std::min_element(neg.begin(), neg.end()) <= 1);
  CHECK(stratified_folds(y, 10, 3) == f);
}

TEST_CASE("test pairs never reach the fitted artifacts") {
  std::mt19937_64 rng(8);
  const auto data = present_pairs(random_pairs(rng, 300), 2);
  std::vector<int> y;
  for (const auto& p : data) y.push_back(p.label);
  const auto folds = stratified_folds(y, 5, 1);
  CvOptions opt;
  opt.k = 5;
  opt.bow_min_count = 3;
  const auto full = cross_validate_folds(data, folds, 5, FeatureSet::kBow, banks().ctx(), opt);

  // Drop one test pair of fold 0; its fitted artifacts must not move.
  const auto victim = static_cast<std::size_t>(std::find(folds.begin(), folds.end(), 0) - folds.begin());
  std::vector<LabeledPair> less;
  std::vector<int> less_folds;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (i == victim) continue;
    less.push_back(data[i]);
    less_folds.push_back(folds[i]);
  }
  const auto cut = cross_validate_folds(less, less_folds, 5, FeatureSet::kBow, banks().ctx(), opt);
  CHECK(cut.artifact_hash[0] == full.artifact_hash[0]);
  CHECK(cut.per_fold_feature_count[0] == full.per_fold_feature_count[0]);
  // Other folds did train on it.
  CHECK(cut.artifact_hash[1] != full.artifact_hash[1]);
}

TEST_CASE("cross-validation is reproducible and thread-count independent") {
  std::mt19937_64 rng(10);
  const auto data = present_pairs(random_pairs(rng, 300), 3);
  for (auto fs : {FeatureSet::kBow, FeatureSet::kAll3}) {
    CvOptions par;
    par.bow_min_count = 3;
    CvOptions ser = par;
    ser.parallel = false;
    const auto a = cross_validate(data, fs, banks().ctx(), par);
    const auto b = cross_validate(data, fs, banks().ctx(), par);
    const auto c = cross_validate(data, fs, banks().ctx(), ser);
    CHECK(a.to_json().dump() == b.to_json().dump());
    CHECK(a.to_json().dump() == c.to_json().dump());
    CHECK(a.per_fold_accuracy == c.per_fold_accuracy);
  }
}
