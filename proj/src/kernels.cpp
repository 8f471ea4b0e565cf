#include "memquote/kernels.hpp"

#include <cstdint>
#include <exception>
#include <map>
#include <string>

namespace memquote::kernels {
namespace {

const MemorableList* find_list(const std::map<std::string, const MemorableList*>& index,
                               const std::string& movie) {
  const auto it = index.find(movie);
  return it == index.end() ? nullptr : it->second;
}

std::map<std::string, const MemorableList*> index_lists(std::span<const MemorableList> lists) {
  std::map<std::string, const MemorableList*> index;
  for (const auto& l : lists) index[l.movie_id] = &l;
  return index;
}

MoviePairs process_movie(const Script& script, const MemorableList* list, double threshold,
                         const PairingOptions& options) {
  static const MemorableList kEmpty;
  MoviePairs out;
  out.alignment = align_memorable(script, list ? *list : kEmpty, threshold);
  out.pairs = build_pairs(script, out.alignment, options);
  return out;
}

}  // namespace

std::vector<double> score_sequences(const NGramLM& lm, std::span<const TokenSequence> seqs) {
  std::vector<double> out(seqs.size());
  const auto n = static_cast<std::int64_t>(seqs.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = lm.log_prob(seqs[i]);
  return out;
}

std::vector<double> score_sequences_serial(const NGramLM& lm,
                                           std::span<const TokenSequence> seqs) {
  std::vector<double> out;
  out.reserve(seqs.size());
  for (const auto& s : seqs) out.push_back(lm.log_prob(s));
  return out;
}

std::vector<MoviePairs> build_all_pairs(std::span<const Script> scripts,
                                        std::span<const MemorableList> lists,
                                        double threshold, const PairingOptions& options) {
  const auto index = index_lists(lists);
  std::vector<MoviePairs> out(scripts.size());
  const auto n = static_cast<std::int64_t>(scripts.size());
  // Exceptions may not cross the parallel region; keep the first by index.
  std::vector<std::exception_ptr> errors(scripts.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[i] = process_movie(scripts[i], find_list(index, scripts[i].movie_id), threshold,
                             options);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<MoviePairs> build_all_pairs_serial(std::span<const Script> scripts,
                                               std::span<const MemorableList> lists,
                                               double threshold,
                                               const PairingOptions& options) {
  const auto index = index_lists(lists);
  std::vector<MoviePairs> out;
  out.reserve(scripts.size());
  for (const auto& s : scripts) {
    out.push_back(process_movie(s, find_list(index, s.movie_id), threshold, options));
  }
  return out;
}

}  // namespace memquote::kernels
