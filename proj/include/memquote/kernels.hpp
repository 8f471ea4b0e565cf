#pragma once

#include <span>
#include <vector>

#include "memquote/corpus.hpp"
#include "memquote/ngram.hpp"

namespace memquote::kernels {

/// log_prob of every sequence under `lm`, in input order.
std::vector<double> score_sequences(const NGramLM& lm, std::span<const TokenSequence> seqs);
std::vector<double> score_sequences_serial(const NGramLM& lm,
                                           std::span<const TokenSequence> seqs);

/// Aligns and pairs every movie. Memorable lists are matched to scripts by
/// movie_id; scripts without a list get no memorable lines. Output is
/// parallel to `scripts`.
struct MoviePairs {
  Alignment alignment;
  std::vector<QuotePair> pairs;
};

std::vector<MoviePairs> build_all_pairs(std::span<const Script> scripts,
                                        std::span<const MemorableList> lists,
                                        double threshold, const PairingOptions& options);
std::vector<MoviePairs> build_all_pairs_serial(std::span<const Script> scripts,
                                               std::span<const MemorableList> lists,
                                               double threshold,
                                               const PairingOptions& options);

}  // namespace memquote::kernels
