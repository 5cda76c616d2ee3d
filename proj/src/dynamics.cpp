#include "phraseprobe/dynamics.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace phraseprobe {

bool checkpoint_label_less(std::string_view a, std::string_view b) {
  auto digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (digit(a[i]) && digit(b[j])) {
      std::size_t ei = i;
      std::size_t ej = j;
      while (ei < a.size() && digit(a[ei])) ++ei;
      while (ej < b.size() && digit(b[ej])) ++ej;
      std::string_view na = a.substr(i, ei - i);
      std::string_view nb = b.substr(j, ej - j);
      while (na.size() > 1 && na.front() == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb.front() == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ei;
      j = ej;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
  return a < b;
}

CheckpointSeries::CheckpointSeries(std::vector<Checkpoint> checkpoints)
    : checkpoints_(std::move(checkpoints)) {
  if (checkpoints_.empty()) throw ValidationError("checkpoint series is empty");
  std::set<std::string_view> seen;
  for (const Checkpoint& c : checkpoints_) {
    if (!seen.insert(c.label).second) {
      throw ValidationError("duplicate checkpoint label '" + c.label + "'");
    }
  }
}

std::vector<EpochDiff> diff_series(const CheckpointSeries& series) {
  std::vector<EpochDiff> out;
  // Pair -> still present at every checkpoint since it was first learned.
  std::map<PhraseKey, bool> learned;
  std::size_t intact = 0;
  for (std::size_t e = 0; e < series.size(); ++e) {
    const PhraseTable& table = series[e].table;
    EpochDiff d;
    d.label = series[e].label;
    d.table_size = table.size();
    for (const auto& [key, entry] : table) {
      auto [it, inserted] = learned.try_emplace(key, true);
      if (inserted) {
        ++d.newly_learned;
        ++intact;
      }
    }
    if (e > 0) {
      for (const auto& [key, entry] : series[e - 1].table) {
        if (!table.contains(key)) ++d.forgotten;
      }
    }
    for (auto& [key, unbroken] : learned) {
      if (unbroken && !table.contains(key)) {
        unbroken = false;
        --intact;
      }
    }
    d.cumulative_learned = learned.size();
    d.never_forgotten_fraction =
        learned.empty() ? 0.0 : static_cast<double>(intact) / static_cast<double>(learned.size());
    out.push_back(std::move(d));
  }
  return out;
}

UnforgettableResult unforgettable(const CheckpointSeries& series, std::size_t horizon) {
  if (horizon < 1) throw ValidationError("unforgettable horizon must be at least 1");
  if (horizon > series.size()) {
    throw ValidationError("unforgettable horizon " + std::to_string(horizon) +
                          " exceeds series length " + std::to_string(series.size()));
  }
  const std::size_t last_eligible = series.size() - horizon;  // 1-based first-learned bound
  UnforgettableResult result;
  std::set<PhraseKey> seen;
  for (std::size_t e = 0; e < last_eligible; ++e) {
    for (const auto& [key, entry] : series[e].table) {
      if (!seen.insert(key).second) continue;
      ++result.eligible;
      bool always = true;
      for (std::size_t later = e + 1; later < series.size() && always; ++later) {
        always = series[later].table.contains(key);
      }
      if (always) result.pairs.push_back(key);
    }
  }
  std::sort(result.pairs.begin(), result.pairs.end());
  if (result.eligible > 0) {
    result.fraction = static_cast<double>(result.pairs.size()) / static_cast<double>(result.eligible);
  }
  return result;
}

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::length: return "length";
    case Axis::reordering: return "reordering";
    case Axis::fertility: return "fertility";
  }
  return "?";
}

Axis parse_axis(std::string_view name) {
  if (name == "length") return Axis::length;
  if (name == "reordering") return Axis::reordering;
  if (name == "fertility") return Axis::fertility;
  throw ValidationError("unknown complexity axis '" + std::string(name) + "'");
}

std::vector<std::string> class_names(Axis axis) {
  switch (axis) {
    case Axis::length: return {"short", "middle", "long", "over"};
    case Axis::reordering: return {"monotone", "swap", "discontinuous"};
    case Axis::fertility: return {"1-1", "M-1", "1-M"};
  }
  return {};
}

std::vector<LearningCurve> learning_curves(std::span<const ComplexityProfile> profiles, Axis axis) {
  const std::vector<std::string> names = class_names(axis);
  std::vector<LearningCurve> curves(names.size());
  for (std::size_t c = 0; c < names.size(); ++c) {
    LearningCurve& curve = curves[c];
    curve.class_name = names[c];
    for (const ComplexityProfile& p : profiles) {
      switch (axis) {
        case Axis::length: curve.counts.push_back(p.length[c]); break;
        case Axis::reordering: curve.counts.push_back(p.reordering[c]); break;
        case Axis::fertility: curve.counts.push_back(p.fertility[c]); break;
      }
    }
    const std::size_t peak = curve.counts.empty() ? 0 : *std::max_element(curve.counts.begin(), curve.counts.end());
    curve.populated = peak > 0;
    for (std::size_t count : curve.counts) {
      curve.normalized.push_back(peak ? static_cast<double>(count) / static_cast<double>(peak) : 0.0);
    }
  }
  return curves;
}

std::vector<LearningCurve> learning_curves(const CheckpointSeries& series, Axis axis) {
  std::vector<ComplexityProfile> profiles;
  profiles.reserve(series.size());
  for (const Checkpoint& c : series) profiles.push_back(profile(c.table));
  return learning_curves(profiles, axis);
}

}  // namespace phraseprobe
