#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phraseprobe/common.hpp"

namespace phraseprobe {

/// One alignment point, source index first (Pharaoh convention).
struct Link {
  int source = 0;
  int target = 0;
  auto operator<=>(const Link&) const = default;
};

/// A set of links. Kept sorted and duplicate-free, so equality is set equality.
class Alignment {
 public:
  Alignment() = default;
  explicit Alignment(std::vector<Link> links);
  Alignment(std::initializer_list<Link> links) : Alignment(std::vector<Link>(links)) {}

  void insert(Link link);
  bool contains(Link link) const;
  bool empty() const { return links_.empty(); }
  std::size_t size() const { return links_.size(); }
  const std::vector<Link>& links() const { return links_; }
  auto begin() const { return links_.begin(); }
  auto end() const { return links_.end(); }

  /// Swaps source and target roles of every link.
  Alignment transposed() const;

  bool operator==(const Alignment&) const = default;

 private:
  std::vector<Link> links_;
};

/// Parses "i-j i-j ..."; duplicates collapse. Errors name the line and the bad token.
Alignment parse_pharaoh(std::string_view line, std::size_t line_number = 0);
std::string format_pharaoh(const Alignment& alignment);

using Mask = std::vector<std::uint8_t>;

Mask parse_mask(std::string_view line, std::size_t line_number = 0);
std::string format_mask(const Mask& mask);

struct SentenceRecord {
  Tokens source;
  Tokens target;
  Alignment alignment;
  /// Absent means every target token counts as correctly predicted.
  std::optional<Mask> mask;
};

/// Throws ValidationError if a link is out of range or the mask length differs from |target|.
void validate(const SentenceRecord& record, std::size_t line_number = 0);
void validate_alignment(const SentenceRecord& record, std::size_t line_number = 0);
void validate_mask(const SentenceRecord& record, std::size_t line_number = 0);

struct CorpusPaths {
  std::filesystem::path source;
  std::filesystem::path target;
  /// Without an alignment file every record carries an empty alignment.
  std::optional<std::filesystem::path> alignment;
  std::optional<std::filesystem::path> mask;
};

/// Record-at-a-time reader over the parallel files. Every record is validated before it is
/// returned; line-count mismatches are reported at the first line where one file runs out.
class CorpusReader {
 public:
  explicit CorpusReader(const CorpusPaths& paths);

  std::optional<SentenceRecord> next();
  /// 1-based number of the last line returned.
  std::size_t line_number() const { return line_; }

 private:
  struct Stream {
    std::string name;
    std::ifstream in;
  };
  static Stream open(const std::filesystem::path& path);

  Stream source_;
  Stream target_;
  std::optional<Stream> alignment_;
  std::optional<Stream> mask_;
  std::size_t line_ = 0;
};

std::vector<SentenceRecord> load_corpus(const CorpusPaths& paths);

/// Masks for a corpus at each simulated checkpoint.
enum class MaskMode { all_ones, random, frequency_threshold };

struct MaskSchedule {
  MaskMode mode = MaskMode::all_ones;
  /// Number of epochs for all-ones and random; frequency mode uses thresholds.size().
  std::size_t epochs = 1;
  double probability = 0.5;
  std::uint64_t seed = 0;
  /// Per-epoch minimum target-token frequency; must be nonincreasing.
  std::vector<std::uint64_t> thresholds;

  static MaskSchedule all_ones(std::size_t epochs = 1);
  static MaskSchedule random(double probability, std::uint64_t seed, std::size_t epochs = 1);
  static MaskSchedule frequency(std::vector<std::uint64_t> thresholds);

  std::size_t epoch_count() const;
  void validate() const;
};

/// Result is indexed [epoch][sentence].
std::vector<std::vector<Mask>> synthesize_masks(std::span<const SentenceRecord> corpus,
                                                const MaskSchedule& schedule);

/// One 0/1 line per sentence.
void write_mask_file(const std::filesystem::path& path, std::span<const Mask> masks);
void write_lines(const std::filesystem::path& path, std::span<const std::string> lines);

}  // namespace phraseprobe
