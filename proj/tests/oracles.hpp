#pragma once

// Independent reference implementations used only by tests. They share no code path with the
// library routines they check beyond the plain data types.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "phraseprobe/corpus.hpp"
#include "phraseprobe/decoder.hpp"
#include "phraseprobe/extract.hpp"
#include "phraseprobe/table.hpp"

namespace phraseprobe::oracle {

using Box = std::tuple<int, int, int, int, std::string, std::string, std::vector<Link>, int>;

inline std::string join(const std::vector<std::string>& toks, int b, int e) {
  std::string s;
  for (int k = b; k <= e; ++k) {
    if (k > b) s += ' ';
    s += toks[static_cast<std::size_t>(k)];
  }
  return s;
}

/// Every box [i1,i2]x[j1,j2] is tested directly: at least one link inside, no link with
/// exactly one coordinate inside, no masked target token inside.
inline std::vector<Box> extract_boxes(const SentenceRecord& r, int max_len) {
  const int I = static_cast<int>(r.source.size());
  const int J = static_cast<int>(r.target.size());
  std::vector<Box> out;
  for (int i1 = 0; i1 < I; ++i1)
    for (int i2 = i1; i2 < I && i2 - i1 < max_len; ++i2)
      for (int j1 = 0; j1 < J; ++j1)
        for (int j2 = j1; j2 < J && j2 - j1 < max_len; ++j2) {
          bool any_inside = false;
          bool crossing = false;
          std::vector<Link> inside;
          for (const Link& l : r.alignment.links()) {
            const bool s_in = l.source >= i1 && l.source <= i2;
            const bool t_in = l.target >= j1 && l.target <= j2;
            if (s_in && t_in) {
              any_inside = true;
              inside.push_back({l.source - i1, l.target - j1});
            } else if (s_in != t_in) {
              crossing = true;
            }
          }
          if (!any_inside || crossing) continue;
          bool masked = false;
          if (r.mask)
            for (int j = j1; j <= j2; ++j)
              if ((*r.mask)[static_cast<std::size_t>(j)] == 0) masked = true;
          if (masked) continue;
          // Orientation: monotone if the cell up-left of the box corner is a link (or the
          // virtual start), swap if the cell up-right is, else discontinuous.
          auto at = [&](int i, int j) {
            if (i == -1 && j == -1) return true;
            if (i == I && j == J) return true;
            for (const Link& l : r.alignment.links())
              if (l.source == i && l.target == j) return true;
            return false;
          };
          int orientation = at(i1 - 1, j1 - 1) ? 0 : at(i2 + 1, j1 - 1) ? 1 : 2;
          std::sort(inside.begin(), inside.end());
          out.emplace_back(i1, i2, j1, j2, join(r.source, i1, i2), join(r.target, j1, j2), inside, orientation);
        }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Box> as_boxes(const std::vector<PhraseOccurrence>& occs) {
  std::vector<Box> out;
  for (const auto& o : occs) {
    out.emplace_back(o.source_span.begin, o.source_span.end, o.target_span.begin, o.target_span.end,
                     o.source_phrase, o.target_phrase, o.internal_alignment.links(),
                     static_cast<int>(o.orientation));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::string> tokens_of(const std::string& phrase) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : phrase) {
    if (c == ' ') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::vector<std::size_t> occurrences_of(const std::vector<std::string>& hay,
                                               const std::vector<std::string>& needle) {
  std::vector<std::size_t> at;
  if (needle.size() > hay.size()) return at;
  for (std::size_t p = 0; p + needle.size() <= hay.size(); ++p)
    if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<std::ptrdiff_t>(p))) at.push_back(p);
  return at;
}

/// Covered target tokens per sentence: scan every table entry against every sentence.
inline std::pair<std::size_t, std::size_t> recovery_counts(const PhraseTable& table,
                                                           const std::vector<SentenceRecord>& corpus) {
  std::size_t hit = 0;
  std::size_t total = 0;
  for (const SentenceRecord& r : corpus) {
    std::vector<bool> covered(r.target.size(), false);
    for (const auto& [key, e] : table) {
      if (occurrences_of(r.source, tokens_of(key.source)).empty()) continue;
      const auto t = tokens_of(key.target);
      for (std::size_t p : occurrences_of(r.target, t))
        for (std::size_t k = 0; k < t.size(); ++k) covered[p + k] = true;
    }
    hit += static_cast<std::size_t>(std::count(covered.begin(), covered.end(), true));
    total += r.target.size();
  }
  return {hit, total};
}

/// Textbook single-pass Pearson formula.
inline double pearson_direct(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

struct Path {
  double score;
  std::string target;
};

/// Enumerates every monotone segmentation; the best path by (score desc, target asc).
inline Path exhaustive_decode(const PhraseTable& table, const std::vector<std::string>& src,
                              double word_penalty, std::size_t* reachable = nullptr) {
  std::map<std::string, std::vector<std::pair<std::string, double>>> by_source;
  std::size_t longest = 0;
  for (const auto& [key, e] : table) {
    by_source[key.source].emplace_back(key.target, std::log(e.forward_prob));
    longest = std::max(longest, tokens_of(key.source).size());
  }
  std::vector<Path> complete;
  std::size_t partial = 0;
  std::function<void(std::size_t, double, std::string)> walk = [&](std::size_t k, double score,
                                                                   std::string out) {
    ++partial;
    if (k == src.size()) {
      complete.push_back({score, out});
      return;
    }
    bool matched = false;
    for (std::size_t len = 1; len <= longest && k + len <= src.size(); ++len) {
      std::string s;
      for (std::size_t q = k; q < k + len; ++q) s += (q > k ? " " : "") + src[q];
      auto it = by_source.find(s);
      if (it == by_source.end()) continue;
      matched = true;
      for (const auto& [t, lp] : it->second) {
        const double wp = word_penalty * static_cast<double>(tokens_of(t).size());
        walk(k + len, score + lp + wp, out.empty() ? t : out + " " + t);
      }
    }
    if (!matched) walk(k + 1, score + kOovLogProb + word_penalty, out.empty() ? src[k] : out + " " + src[k]);
  };
  walk(0, 0.0, "");
  if (reachable) *reachable = partial;
  return *std::min_element(complete.begin(), complete.end(), [](const Path& a, const Path& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.target < b.target;
  });
}

}  // namespace phraseprobe::oracle
