#include "phraseprobe/extract.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

namespace phraseprobe {

std::string_view to_string(Orientation orientation) {
  switch (orientation) {
    case Orientation::monotone: return "monotone";
    case Orientation::swap: return "swap";
    case Orientation::discontinuous: return "discontinuous";
  }
  return "?";
}

Tokens apply_mask(const SentenceRecord& record) {
  Tokens masked = record.target;
  for (std::size_t j = 0; j < masked.size(); ++j) {
    if (masked[j] == kMaskSymbol) {
      throw ValidationError("target token " + std::to_string(j) + " collides with reserved symbol " +
                            std::string(kMaskSymbol));
    }
    if (record.mask && (*record.mask)[j] == 0) masked[j] = std::string(kMaskSymbol);
  }
  return masked;
}

Orientation classify_orientation(Span source, Span target, const Alignment& alignment,
                                 int source_len, int target_len) {
  auto linked = [&](int i, int j) {
    if (i == -1 && j == -1) return true;
    if (i == source_len && j == target_len) return true;
    return alignment.contains({i, j});
  };
  if (linked(source.begin - 1, target.begin - 1)) return Orientation::monotone;
  if (linked(source.end + 1, target.begin - 1)) return Orientation::swap;
  return Orientation::discontinuous;
}

std::vector<PhraseOccurrence> extract_phrases(const SentenceRecord& record, int max_len) {
  if (max_len < 1) throw ValidationError("max phrase length must be at least 1");
  const Tokens target = apply_mask(record);
  const int source_len = static_cast<int>(record.source.size());
  const int target_len = static_cast<int>(target.size());

  std::vector<std::vector<int>> targets_of(static_cast<std::size_t>(source_len));
  std::vector<int> column_min(static_cast<std::size_t>(target_len), std::numeric_limits<int>::max());
  std::vector<int> column_max(static_cast<std::size_t>(target_len), -1);
  for (const Link& l : record.alignment) {
    targets_of[l.source].push_back(l.target);
    column_min[l.target] = std::min(column_min[l.target], l.source);
    column_max[l.target] = std::max(column_max[l.target], l.source);
  }
  auto target_aligned = [&](int j) { return column_max[j] >= 0; };

  std::vector<PhraseOccurrence> out;
  for (int s1 = 0; s1 < source_len; ++s1) {
    int min_t = std::numeric_limits<int>::max();
    int max_t = -1;
    for (int s2 = s1; s2 < source_len && s2 - s1 < max_len; ++s2) {
      for (int t : targets_of[s2]) {
        min_t = std::min(min_t, t);
        max_t = std::max(max_t, t);
      }
      if (max_t < 0) continue;
      if (max_t - min_t + 1 > max_len) break;

      bool consistent = true;
      for (int t = min_t; t <= max_t && consistent; ++t) {
        if (target_aligned(t) && (column_min[t] < s1 || column_max[t] > s2)) consistent = false;
      }
      if (!consistent) continue;

      for (int t1 = min_t; t1 >= 0 && (t1 == min_t || !target_aligned(t1)); --t1) {
        for (int t2 = max_t; t2 < target_len && (t2 == max_t || !target_aligned(t2)) &&
                             t2 - t1 + 1 <= max_len;
             ++t2) {
          const bool masked = std::any_of(target.begin() + t1, target.begin() + t2 + 1,
                                          [](const std::string& tok) { return tok == kMaskSymbol; });
          if (masked) continue;

          PhraseOccurrence occ;
          occ.source_span = {s1, s2};
          occ.target_span = {t1, t2};
          occ.source_phrase = join_tokens(record.source, s1, s2 + 1);
          occ.target_phrase = join_tokens(target, t1, t2 + 1);
          std::vector<Link> inside;
          for (const Link& l : record.alignment) {
            if (occ.source_span.contains(l.source) && occ.target_span.contains(l.target))
              inside.push_back({l.source - s1, l.target - t1});
          }
          occ.internal_alignment = Alignment(std::move(inside));
          occ.orientation = classify_orientation(occ.source_span, occ.target_span,
                                                 record.alignment, source_len, target_len);
          out.push_back(std::move(occ));
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const PhraseOccurrence& a, const PhraseOccurrence& b) {
    return std::tie(a.source_span, a.target_span) < std::tie(b.source_span, b.target_span);
  });
  return out;
}

std::string format_occurrence(const PhraseOccurrence& occ) {
  auto span = [](Span s) { return std::to_string(s.begin) + "-" + std::to_string(s.end); };
  std::string line = span(occ.source_span);
  line += '\t';
  line += span(occ.target_span);
  line += '\t';
  line += occ.source_phrase;
  line += '\t';
  line += occ.target_phrase;
  line += '\t';
  line += to_string(occ.orientation);
  return line;
}

}  // namespace phraseprobe
