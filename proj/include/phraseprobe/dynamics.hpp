#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "phraseprobe/metrics.hpp"
#include "phraseprobe/table.hpp"

namespace phraseprobe {

struct Checkpoint {
  std::string label;
  PhraseTable table;
};

/// Orders labels by training progress: digit runs compare numerically, the rest bytewise,
/// so "epoch1.step200" < "epoch1.step1000" < "epoch2".
bool checkpoint_label_less(std::string_view a, std::string_view b);

/// Checkpoint tables in training order. Needs at least one checkpoint and unique labels;
/// the input order is kept (callers sort with checkpoint_label_less when needed).
class CheckpointSeries {
 public:
  explicit CheckpointSeries(std::vector<Checkpoint> checkpoints);

  std::size_t size() const { return checkpoints_.size(); }
  const Checkpoint& operator[](std::size_t e) const { return checkpoints_[e]; }
  auto begin() const { return checkpoints_.begin(); }
  auto end() const { return checkpoints_.end(); }

 private:
  std::vector<Checkpoint> checkpoints_;
};

struct EpochDiff {
  std::string label;
  std::size_t table_size = 0;
  std::size_t newly_learned = 0;
  std::size_t forgotten = 0;
  std::size_t cumulative_learned = 0;
  /// Pairs learned so far that have been present at every checkpoint since they appeared,
  /// as a fraction of cumulative_learned (0 when nothing is learned yet).
  double never_forgotten_fraction = 0.0;
};

std::vector<EpochDiff> diff_series(const CheckpointSeries& series);

struct UnforgettableResult {
  std::vector<PhraseKey> pairs;
  /// Pairs first learned early enough to be observed for `horizon` checkpoints.
  std::size_t eligible = 0;
  double fraction = 0.0;
};

/// With n checkpoints, a pair first learned at checkpoint f (1-based) is eligible iff
/// f <= n - horizon, so every eligible pair is observed for at least `horizon` further
/// checkpoints. An eligible pair is unforgettable iff it is present at every checkpoint from f
/// to n. Requires 1 <= horizon <= n.
UnforgettableResult unforgettable(const CheckpointSeries& series, std::size_t horizon);

enum class Axis { length, reordering, fertility };

std::string_view to_string(Axis axis);
Axis parse_axis(std::string_view name);
/// Class names of an axis in complexity order.
std::vector<std::string> class_names(Axis axis);

struct LearningCurve {
  std::string class_name;
  std::vector<std::size_t> counts;
  /// counts[e] / max(counts); all zeros when the class never appears.
  std::vector<double> normalized;
  bool populated = false;
};

std::vector<LearningCurve> learning_curves(const CheckpointSeries& series, Axis axis);
/// Same, from precomputed per-checkpoint profiles.
std::vector<LearningCurve> learning_curves(std::span<const ComplexityProfile> profiles, Axis axis);

}  // namespace phraseprobe
