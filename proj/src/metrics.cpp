#include "phraseprobe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "phraseprobe/parallel.hpp"

namespace phraseprobe {

std::size_t table_size(const PhraseTable& table) { return table.size(); }

namespace {

struct RecoveryIndex {
  std::unordered_map<std::string_view, std::vector<std::string_view>> targets_by_source;
  std::size_t max_source_len = 0;
  std::size_t max_target_len = 0;

  explicit RecoveryIndex(const PhraseTable& table) {
    for (const auto& [key, e] : table) {
      targets_by_source[key.source].push_back(key.target);
      const auto source_len = static_cast<std::size_t>(std::count(key.source.begin(), key.source.end(), ' ') + 1);
      const auto target_len = static_cast<std::size_t>(std::count(key.target.begin(), key.target.end(), ' ') + 1);
      max_source_len = std::max(max_source_len, source_len);
      max_target_len = std::max(max_target_len, target_len);
    }
  }

  std::size_t covered(const SentenceRecord& r) const {
    std::unordered_set<std::string_view> candidates;
    for (std::size_t i = 0; i < r.source.size(); ++i) {
      for (std::size_t len = 1; len <= max_source_len && i + len <= r.source.size(); ++len) {
        auto it = targets_by_source.find(join_tokens(r.source, i, i + len));
        if (it != targets_by_source.end()) candidates.insert(it->second.begin(), it->second.end());
      }
    }
    if (candidates.empty()) return 0;
    std::vector<bool> hit(r.target.size(), false);
    for (std::size_t j = 0; j < r.target.size(); ++j) {
      for (std::size_t len = 1; len <= max_target_len && j + len <= r.target.size(); ++len) {
        if (candidates.contains(join_tokens(r.target, j, j + len))) {
          std::fill(hit.begin() + static_cast<std::ptrdiff_t>(j),
                    hit.begin() + static_cast<std::ptrdiff_t>(j + len), true);
        }
      }
    }
    return static_cast<std::size_t>(std::count(hit.begin(), hit.end(), true));
  }
};

}  // namespace

double recovery_percent(const PhraseTable& table, std::span<const SentenceRecord> corpus,
                        Averaging averaging, unsigned threads) {
  if (corpus.empty()) throw ValidationError("recovery percent needs a nonempty corpus");
  const RecoveryIndex index(table);
  std::vector<std::size_t> covered(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t n) { covered[n] = index.covered(corpus[n]); });

  if (averaging == Averaging::micro) {
    std::size_t hit = 0;
    std::size_t total = 0;
    for (std::size_t n = 0; n < corpus.size(); ++n) {
      hit += covered[n];
      total += corpus[n].target.size();
    }
    return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
  }
  double sum = 0.0;
  std::size_t sentences = 0;
  for (std::size_t n = 0; n < corpus.size(); ++n) {
    if (corpus[n].target.empty()) continue;
    sum += static_cast<double>(covered[n]) / static_cast<double>(corpus[n].target.size());
    ++sentences;
  }
  return sentences == 0 ? 0.0 : sum / static_cast<double>(sentences);
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ValidationError("pearson: series lengths differ");
  if (xs.size() < 2) throw ValidationError("pearson: need at least two points");
  const double n = static_cast<double>(xs.size());
  const double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ValidationError("pearson: correlation undefined for a constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::string_view to_string(LengthClass c) {
  switch (c) {
    case LengthClass::short_phrase: return "short";
    case LengthClass::middle_phrase: return "middle";
    case LengthClass::long_phrase: return "long";
    case LengthClass::over_length: return "over";
  }
  return "?";
}

std::string_view to_string(FertilityClass c) {
  switch (c) {
    case FertilityClass::one_to_one: return "1-1";
    case FertilityClass::many_to_one: return "M-1";
    case FertilityClass::one_to_many: return "1-M";
  }
  return "?";
}

LengthClass length_class(std::size_t source_tokens, std::size_t target_tokens) {
  const std::size_t len = std::max(source_tokens, target_tokens);
  if (len <= 3) return LengthClass::short_phrase;
  if (len <= 5) return LengthClass::middle_phrase;
  if (len <= 7) return LengthClass::long_phrase;
  return LengthClass::over_length;
}

LengthClass length_class(const PhraseKey& key) {
  return length_class(split_tokens(key.source).size(), split_tokens(key.target).size());
}

Orientation reorder_class(const PhraseEntry& entry) {
  std::size_t best = 0;
  for (std::size_t o = 1; o < entry.orientation.size(); ++o) {
    if (entry.orientation[o] > entry.orientation[best]) best = o;
  }
  return static_cast<Orientation>(best);
}

FertilityClass fertility_class(const Alignment& internal) {
  if (internal.empty()) throw ValidationError("fertility class of a phrase pair with no links");
  std::unordered_map<int, int> per_source;
  std::unordered_map<int, int> per_target;
  bool one_to_many = false;
  bool many_to_one = false;
  for (const Link& l : internal) {
    one_to_many |= ++per_source[l.source] >= 2;
    many_to_one |= ++per_target[l.target] >= 2;
  }
  if (one_to_many) return FertilityClass::one_to_many;
  if (many_to_one) return FertilityClass::many_to_one;
  return FertilityClass::one_to_one;
}

FertilityClass fertility_class(const PhraseEntry& entry) {
  return fertility_class(parse_pharaoh(entry.representative_alignment()));
}

ComplexityProfile profile(const PhraseTable& table) {
  ComplexityProfile p;
  for (const auto& [key, e] : table) {
    ++p.length[static_cast<std::size_t>(length_class(key))];
    ++p.reordering[static_cast<std::size_t>(reorder_class(e))];
    ++p.fertility[static_cast<std::size_t>(fertility_class(e))];
    ++p.total;
  }
  return p;
}

}  // namespace phraseprobe
