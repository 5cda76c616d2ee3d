#include "phraseprobe/decoder.hpp"

#include <algorithm>
#include <map>

namespace phraseprobe {

MonotoneDecoder::MonotoneDecoder(const PhraseTable& table) {
  for (const auto& [key, e] : table) {
    if (!(e.forward_prob > 0.0)) {
      throw ValidationError("decoder needs phi(t|s) > 0; entry '" + key.source + " ||| " +
                            key.target + "' is unscored");
    }
    const std::size_t target_tokens = split_tokens(key.target).size();
    options_[key.source].push_back({key.target, target_tokens, std::log(e.forward_prob)});
    max_source_len_ = std::max(max_source_len_, split_tokens(key.source).size());
  }
}

const std::vector<MonotoneDecoder::Option>* MonotoneDecoder::options_at(
    std::span<const std::string> source, std::size_t begin, std::size_t len) const {
  auto it = options_.find(join_tokens(source, begin, begin + len));
  return it == options_.end() ? nullptr : &it->second;
}

namespace {

bool better(const Hypothesis& a, const Hypothesis& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.target < b.target;
}

Hypothesis extend(const Hypothesis& h, std::size_t covered, const std::string& target,
                  std::size_t tokens, double log_prob, double word_penalty) {
  Hypothesis next;
  next.covered = covered;
  next.target = h.target.empty() ? target : h.target + ' ' + target;
  next.target_tokens = h.target_tokens + tokens;
  next.score = h.score + log_prob + word_penalty * static_cast<double>(tokens);
  return next;
}

}  // namespace

Hypothesis MonotoneDecoder::search(std::span<const std::string> source,
                                   const DecoderOptions& options) const {
  const std::size_t n = source.size();
  if (n == 0) return {};
  const std::size_t beam = std::max<std::size_t>(1, options.beam_width);
  std::vector<std::vector<Hypothesis>> stacks(n + 1);
  stacks[0].push_back({});
  for (std::size_t k = 0; k < n; ++k) {
    auto& stack = stacks[k];
    if (stack.empty()) continue;
    std::sort(stack.begin(), stack.end(), better);
    if (stack.size() > beam) stack.resize(beam);

    bool matched = false;
    for (std::size_t len = 1; len <= max_source_len_ && k + len <= n; ++len) {
      const auto* opts = options_at(source, k, len);
      if (!opts) continue;
      matched = true;
      for (const Hypothesis& h : stack)
        for (const Option& o : *opts)
          stacks[k + len].push_back(extend(h, k + len, o.target, o.target_tokens, o.log_prob, options.word_penalty));
    }
    if (!matched) {
      for (const Hypothesis& h : stack)
        stacks[k + 1].push_back(extend(h, k + 1, source[k], 1, kOovLogProb, options.word_penalty));
    }
  }
  auto& final_stack = stacks[n];
  return *std::min_element(final_stack.begin(), final_stack.end(), better);
}

Tokens MonotoneDecoder::decode(std::span<const std::string> source,
                               const DecoderOptions& options) const {
  return split_tokens(search(source, options).target);
}

Tokens decode_monotone(const PhraseTable& table, std::span<const std::string> source,
                       const DecoderOptions& options) {
  return MonotoneDecoder(table).decode(source, options);
}

BleuResult bleu(std::span<const Tokens> hypotheses, std::span<const Tokens> references, int max_n) {
  if (hypotheses.size() != references.size()) {
    throw ValidationError("bleu: " + std::to_string(hypotheses.size()) + " hypotheses vs " +
                          std::to_string(references.size()) + " references");
  }
  if (hypotheses.empty()) throw ValidationError("bleu: empty corpus");
  if (max_n < 1) throw ValidationError("bleu: max_n must be at least 1");

  BleuResult r;
  r.matches.assign(static_cast<std::size_t>(max_n), 0);
  r.totals.assign(static_cast<std::size_t>(max_n), 0);
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    const Tokens& hyp = hypotheses[s];
    const Tokens& ref = references[s];
    r.hypothesis_length += hyp.size();
    r.reference_length += ref.size();
    for (int n = 1; n <= max_n; ++n) {
      const auto un = static_cast<std::size_t>(n);
      std::map<std::vector<std::string_view>, std::size_t> ref_counts;
      for (std::size_t i = 0; i + un <= ref.size(); ++i)
        ++ref_counts[std::vector<std::string_view>(ref.begin() + static_cast<std::ptrdiff_t>(i),
                                                   ref.begin() + static_cast<std::ptrdiff_t>(i + un))];
      std::map<std::vector<std::string_view>, std::size_t> hyp_counts;
      for (std::size_t i = 0; i + un <= hyp.size(); ++i)
        ++hyp_counts[std::vector<std::string_view>(hyp.begin() + static_cast<std::ptrdiff_t>(i),
                                                   hyp.begin() + static_cast<std::ptrdiff_t>(i + un))];
      for (const auto& [gram, count] : hyp_counts) {
        auto it = ref_counts.find(gram);
        r.matches[un - 1] += std::min(count, it == ref_counts.end() ? 0 : it->second);
        r.totals[un - 1] += count;
      }
    }
  }

  double log_sum = 0.0;
  bool zero = false;
  for (std::size_t n = 0; n < r.matches.size(); ++n) {
    const double p = r.totals[n] ? static_cast<double>(r.matches[n]) / static_cast<double>(r.totals[n]) : 0.0;
    r.precisions.push_back(p);
    if (p == 0.0) {
      zero = true;
    } else {
      log_sum += std::log(p);
    }
  }
  if (r.hypothesis_length > 0) {
    r.brevity_penalty = std::min(1.0, std::exp(1.0 - static_cast<double>(r.reference_length) /
                                                         static_cast<double>(r.hypothesis_length)));
  }
  r.score = zero ? 0.0 : r.brevity_penalty * std::exp(log_sum / static_cast<double>(max_n));
  return r;
}

}  // namespace phraseprobe
