#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "memquote/metrics.hpp"
#include "memquote/ngram.hpp"

namespace memquote {

enum class FeatureSet { kBow, kDistinctiveness, kGenerality, kSloganSim, kAll3 };

std::string to_string(FeatureSet fs);
/// "bow", "distinctiveness", "generality", "slogan_sim", "all3".
FeatureSet parse_feature_set(std::string_view name);

/// A pair in presentation order. label is +1 when `first` is the memorable
/// quote, -1 otherwise.
struct LabeledPair {
  TaggedQuote first;
  TaggedQuote second;
  int label = 1;
};

/// Randomizes the order within every pair from `seed`.
std::vector<LabeledPair> present_pairs(std::span<const TaggedPair> pairs, std::uint64_t seed);

LabeledPair reversed(const LabeledPair& p);

/// Word 1/2/3-gram then tag 1/2/3-gram models.
struct LmBank {
  std::vector<NGramLM> models;
};

/// Trains the six models of a bank over the given tagged corpus.
LmBank train_bank(std::span<const TaggedQuote> corpus, double alpha = 0.2,
                  bool include_punctuation = true);

struct FeatureContext {
  const LmBank* common = nullptr;
  const LmBank* slogan = nullptr;
  GeneralityOptions generality;
  /// Must match how the banks were trained.
  bool include_punctuation = true;
  /// Bag-of-words terms, fitted per training fold.
  std::vector<std::string> bow_vocabulary;
};

/// Positions bound to names. partner[j] is -1 for a feature that changes
/// sign when the pair is reversed, otherwise the index of the feature it
/// swaps with.
struct FeatureSchema {
  std::string id;
  std::vector<std::string> names;
  std::vector<int> partner;

  std::size_t size() const { return names.size(); }
};

FeatureSchema feature_schema(FeatureSet fs, const FeatureContext& ctx);

/// Throws ConfigError when a model bank needed by `fs` is missing.
std::vector<double> extract_features(const TaggedQuote& q1, const TaggedQuote& q2,
                                     FeatureSet fs, const FeatureContext& ctx);

/// Terms whose count over both quotes of the training pairs is >= min_count.
std::vector<std::string> bow_vocabulary(std::span<const LabeledPair> train,
                                        std::size_t min_count = 10);

/// Collapses each swapping pair (j, partner) into x[j] - x[partner] so that
/// reversing the pair negates the whole vector.
std::vector<double> antisymmetric_view(std::span<const double> x, const FeatureSchema& schema);

struct SvmOptions {
  double c = 1.0;
  double tolerance = 1e-3;
  int max_epochs = 1000;
  std::uint64_t seed = 1;
};

/// No-intercept linear model over RMS-scaled features.
struct LinearModel {
  std::vector<double> weights;
  std::vector<double> scales;
  int epochs = 0;

  double decision(std::span<const double> x) const;
  nlohmann::json to_json() const;
};

/// L2-regularized hinge loss by dual coordinate descent. Labels in {-1,+1}.
/// Throws ConfigError on empty or non-finite input, ragged rows, or a single
/// class.
LinearModel train_classifier(const std::vector<std::vector<double>>& x,
                             std::span<const int> y, const SvmOptions& options = {});

/// 1 for a correct sign, 0.5 for a zero decision, 0 otherwise.
double prediction_credit(double decision, int label);

struct CvOptions {
  int k = 10;
  std::uint64_t seed = 1;
  SvmOptions svm;
  std::size_t bow_min_count = 10;
  bool parallel = true;
};

struct FoldReport {
  std::string feature_set;
  std::vector<double> per_fold_accuracy;
  double mean_accuracy = 0.0;
  /// Schema size fitted on all pairs (BOW vocabulary depends on data).
  std::size_t feature_count = 0;
  std::vector<std::size_t> per_fold_feature_count;
  /// Hash of each fold's fitted artifacts (vocabulary, scales, weights).
  std::vector<std::string> artifact_hash;

  nlohmann::json to_json() const;
};

/// Label-stratified assignment of items to k folds from `seed`.
std::vector<int> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed);

FoldReport cross_validate(std::span<const LabeledPair> data, FeatureSet fs,
                          const FeatureContext& ctx, const CvOptions& options = {});

/// Same, with an explicit fold index per pair.
FoldReport cross_validate_folds(std::span<const LabeledPair> data, std::span<const int> fold_of,
                                int k, FeatureSet fs, const FeatureContext& ctx,
                                const CvOptions& options = {});

/// Feature extraction, fitting, and prediction for one train/test split.
struct FoldResult {
  double accuracy = 0.0;
  std::size_t feature_count = 0;
  std::string artifact_hash;
  FeatureSchema schema;
  LinearModel model;
};

FoldResult run_fold(std::span<const LabeledPair> train, std::span<const LabeledPair> test,
                    FeatureSet fs, const FeatureContext& ctx, const CvOptions& options);

}  // namespace memquote
