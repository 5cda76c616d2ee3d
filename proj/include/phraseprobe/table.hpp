#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phraseprobe/aligner.hpp"
#include "phraseprobe/extract.hpp"

namespace phraseprobe {

struct PhraseKey {
  std::string source;
  std::string target;
  auto operator<=>(const PhraseKey&) const = default;
};

struct PhraseEntry {
  std::uint64_t joint_count = 0;   // c(s,t)
  std::uint64_t source_count = 0;  // c(s)
  std::uint64_t target_count = 0;  // c(t)
  double forward_prob = 0.0;       // phi(t|s)
  double backward_prob = 0.0;      // phi(s|t)
  double forward_lex = 0.0;        // lex(t|s)
  double backward_lex = 0.0;       // lex(s|t)
  /// Indexed by Orientation.
  std::array<std::uint64_t, 3> orientation{};
  /// Serialized internal alignment -> number of occurrences carrying it.
  std::map<std::string, std::uint64_t> alignment_votes;

  /// Most frequent internal alignment; ties go to the lexicographically smaller serialization.
  std::string representative_alignment() const;

  bool operator==(const PhraseEntry&) const = default;
};

/// Phrase pairs keyed by (source phrase, target phrase), iterated in sorted key order.
class PhraseTable {
 public:
  using Map = std::map<PhraseKey, PhraseEntry>;

  PhraseTable() = default;
  explicit PhraseTable(Map entries) : entries_(std::move(entries)) {}

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool contains(const PhraseKey& key) const { return entries_.contains(key); }
  const PhraseEntry* find(const PhraseKey& key) const;
  PhraseEntry& operator[](const PhraseKey& key) { return entries_[key]; }
  void erase(const PhraseKey& key) { entries_.erase(key); }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  const Map& entries() const { return entries_; }
  Map& entries() { return entries_; }

  bool operator==(const PhraseTable&) const = default;

 private:
  Map entries_;
};

/// Streaming count accumulator. `build()` fills c(s) and c(t) from the joint counts.
class TableBuilder {
 public:
  void add(const PhraseOccurrence& occurrence);
  void add(std::span<const PhraseOccurrence> occurrences);
  /// Folds another builder in; counting is commutative, so merge order does not matter.
  void merge(TableBuilder&& other);
  PhraseTable build() &&;

 private:
  PhraseTable::Map entries_;
};

/// Counts only: c(s,t), marginals, orientation tallies, alignment votes. Keys are sharded
/// across `threads` workers; the result does not depend on the thread count or input order.
PhraseTable aggregate(std::span<const PhraseOccurrence> occurrences, unsigned threads = 1);

/// Recomputes c(s) and c(t) from the joint counts currently in the table.
void recompute_marginals(PhraseTable& table);

/// Relative-frequency phi(t|s) and phi(s|t) from the stored counts.
void estimate_probabilities(PhraseTable& table);

/// phi by relative frequency plus lexical weights. `target_given_source` holds w(t|s),
/// `source_given_target` holds w(s|t); unseen words fall back to LexiconTable::kFloor.
void score(PhraseTable& table, const LexiconTable& target_given_source,
           const LexiconTable& source_given_target, unsigned threads = 1);

/// lex(t|s) for one pair under an internal alignment (source-first, span-local).
double lexical_weight(std::span<const std::string> source, std::span<const std::string> target,
                      const Alignment& internal, const LexiconTable& target_given_source);

/// Drops entries with c(s,t) < k. Probabilities and marginals are left as they were.
PhraseTable filter_min_count(const PhraseTable& table, std::uint64_t k = 2);

struct SharedTables {
  PhraseTable under_a;
  PhraseTable under_b;
};

/// Key-set intersection; each side keeps its own scores.
SharedTables intersect(const PhraseTable& a, const PhraseTable& b);
/// Key-set difference a \ b with a's scores.
PhraseTable subtract(const PhraseTable& a, const PhraseTable& b);

struct OverlapStats {
  /// |intersection of all key sets| / |union of all key sets|.
  double k_way_overlap = 0.0;
  std::vector<std::vector<double>> pairwise_jaccard;
};

OverlapStats overlap_stats(std::span<const PhraseTable* const> tables);

struct SharedSourceStats {
  /// Fraction of non-shared entries whose source phrase occurs in the shared table.
  double share_source_fraction = 0.0;
  /// Among those, the fraction with phi(t|s) strictly below the best shared phi for that source.
  double lower_prob_fraction = 0.0;
  /// False when no non-shared entry shares a source phrase; lower_prob_fraction is then 0.
  bool lower_prob_defined = false;
  std::size_t non_shared_entries = 0;
  std::size_t sharing_entries = 0;
  std::size_t lower_entries = 0;
};

SharedSourceStats shared_source_stats(const PhraseTable& shared, const PhraseTable& non_shared);

/// `src ||| tgt ||| phi(s|t) lex(s|t) phi(t|s) lex(t|s) ||| align ||| c(t) c(s) c(s,t)`,
/// one line per entry in sorted key order.
void export_moses(const PhraseTable& table, std::ostream& out);
void export_moses(const PhraseTable& table, const std::filesystem::path& path);

/// Reads the Moses layout back. Orientation tallies are not part of the format and stay zero;
/// the alignment column becomes the single alignment vote with weight c(s,t).
PhraseTable read_moses(std::istream& in);

/// Full-fidelity binary cache: magic "PPTABLE", format version, then entries.
inline constexpr std::uint32_t kTableCacheVersion = 1;
void save_table(const PhraseTable& table, const std::filesystem::path& path);
/// Loads either the binary cache or a Moses text table (detected by the magic bytes).
PhraseTable load_table(const std::filesystem::path& path);

}  // namespace phraseprobe
