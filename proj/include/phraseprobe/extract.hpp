#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "phraseprobe/corpus.hpp"

namespace phraseprobe {

/// Stands in for every target token the model failed to predict.
inline constexpr std::string_view kMaskSymbol = "$MASK$";

inline constexpr int kDefaultMaxPhraseLength = 7;

/// Ordered by increasing reordering complexity.
enum class Orientation : std::uint8_t { monotone = 0, swap = 1, discontinuous = 2 };

std::string_view to_string(Orientation orientation);

/// Inclusive token span.
struct Span {
  int begin = 0;
  int end = 0;
  int length() const { return end - begin + 1; }
  bool contains(int index) const { return begin <= index && index <= end; }
  auto operator<=>(const Span&) const = default;
};

struct PhraseOccurrence {
  Span source_span;
  Span target_span;
  std::string source_phrase;
  std::string target_phrase;
  /// Links inside the box, shifted to span-local coordinates.
  Alignment internal_alignment;
  Orientation orientation = Orientation::monotone;

  bool operator==(const PhraseOccurrence&) const = default;
};

/// Target tokens with every mask-0 position replaced by kMaskSymbol. Throws if the
/// target already contains the symbol.
Tokens apply_mask(const SentenceRecord& record);

/// All alignment-consistent phrase pairs up to `max_len` tokens per side, including boxes widened
/// over unaligned boundary words, minus every pair whose target side covers a masked token.
/// Output order: source span, then target span.
std::vector<PhraseOccurrence> extract_phrases(const SentenceRecord& record,
                                              int max_len = kDefaultMaxPhraseLength);

/// Word-based orientation against the previous target position, with virtual links
/// (-1,-1) and (source_len, target_len) at the sentence edges.
Orientation classify_orientation(Span source, Span target, const Alignment& alignment,
                                 int source_len, int target_len);

/// `src_span \t tgt_span \t src_phrase \t tgt_phrase \t orientation` with spans as "b-e".
std::string format_occurrence(const PhraseOccurrence& occurrence);

}  // namespace phraseprobe
