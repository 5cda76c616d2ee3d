#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "phraseprobe/corpus.hpp"
#include "phraseprobe/table.hpp"

namespace phraseprobe {

std::size_t table_size(const PhraseTable& table);

enum class Averaging { micro, macro };

/// Fraction of target tokens covered by some entry (s,t) whose s occurs contiguously in the
/// sentence's source and whose t occurs contiguously in its target over that token. Micro
/// averaging pools tokens; macro averages per-sentence ratios over nonempty targets.
double recovery_percent(const PhraseTable& table, std::span<const SentenceRecord> corpus,
                        Averaging averaging = Averaging::micro, unsigned threads = 1);

/// Sample Pearson correlation. Throws on length mismatch, fewer than two points or a constant series.
double pearson(std::span<const double> xs, std::span<const double> ys);

// Complexity classes, each listed from simplest to hardest.
enum class LengthClass : std::uint8_t { short_phrase, middle_phrase, long_phrase, over_length };
enum class FertilityClass : std::uint8_t { one_to_one, many_to_one, one_to_many };

std::string_view to_string(LengthClass c);
std::string_view to_string(FertilityClass c);

/// By max(|source|, |target|) in tokens: <=3 short, 4-5 middle, 6-7 long, otherwise over.
LengthClass length_class(const PhraseKey& key);
LengthClass length_class(std::size_t source_tokens, std::size_t target_tokens);

/// Majority orientation; ties go to the simpler class.
Orientation reorder_class(const PhraseEntry& entry);

/// 1-M if a source word links to several target words, else M-1 if a target word links to
/// several source words, else 1-1. Throws on an empty alignment.
FertilityClass fertility_class(const Alignment& internal);
FertilityClass fertility_class(const PhraseEntry& entry);

struct ComplexityProfile {
  std::array<std::uint64_t, 4> length{};
  std::array<std::uint64_t, 3> reordering{};
  std::array<std::uint64_t, 3> fertility{};
  std::uint64_t total = 0;
};

ComplexityProfile profile(const PhraseTable& table);

}  // namespace phraseprobe
