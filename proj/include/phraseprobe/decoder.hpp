#pragma once

#include <cmath>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "phraseprobe/table.hpp"

namespace phraseprobe {

struct DecoderOptions {
  std::size_t beam_width = 16;
  /// Added once per produced target token.
  double word_penalty = 0.0;
};

/// Log score charged for copying an unmatched source token through.
inline const double kOovLogProb = std::log(1e-9);

struct Hypothesis {
  std::size_t covered = 0;
  std::string target;  // space-joined
  std::size_t target_tokens = 0;
  double score = 0.0;
};

/// Monotone phrase-based beam search over phi(t|s). No distortion, no language model.
class MonotoneDecoder {
 public:
  /// Requires phi(t|s) > 0 on every entry (run estimate_probabilities or score first).
  explicit MonotoneDecoder(const PhraseTable& table);

  Tokens decode(std::span<const std::string> source, const DecoderOptions& options = {}) const;
  /// Best hypothesis after search, including its score.
  Hypothesis search(std::span<const std::string> source, const DecoderOptions& options = {}) const;

  struct Option {
    std::string target;
    std::size_t target_tokens;
    double log_prob;
  };
  /// Translation options whose source phrase matches source[begin, begin + len).
  const std::vector<Option>* options_at(std::span<const std::string> source, std::size_t begin,
                                        std::size_t len) const;
  std::size_t max_source_length() const { return max_source_len_; }

 private:
  std::unordered_map<std::string, std::vector<Option>> options_;
  std::size_t max_source_len_ = 0;
};

Tokens decode_monotone(const PhraseTable& table, std::span<const std::string> source,
                       const DecoderOptions& options = {});

struct BleuResult {
  std::vector<std::size_t> matches;  // clipped n-gram matches, n = 1..max_n
  std::vector<std::size_t> totals;
  std::vector<double> precisions;
  std::size_t hypothesis_length = 0;
  std::size_t reference_length = 0;
  double brevity_penalty = 0.0;
  double score = 0.0;
};

/// Corpus-level single-reference BLEU without smoothing.
BleuResult bleu(std::span<const Tokens> hypotheses, std::span<const Tokens> references, int max_n = 4);

}  // namespace phraseprobe
