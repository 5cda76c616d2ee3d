#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phraseprobe/corpus.hpp"

namespace phraseprobe {

/// Word-translation table w(to | from) with a distinguished NULL `from` word.
class LexiconTable {
 public:
  static constexpr double kFloor = 1e-12;
  using Row = std::map<std::string, double, std::less<>>;

  /// w(to | from), or kFloor when the pair was never observed.
  double probability(std::string_view from, std::string_view to) const;
  double null_probability(std::string_view to) const;

  void set(std::string from, std::string to, double p);
  void set_null(std::string to, double p);

  const std::map<std::string, Row, std::less<>>& rows() const { return rows_; }
  const Row& null_row() const { return null_row_; }
  bool empty() const { return rows_.empty() && null_row_.empty(); }

  /// Largest |sum of a row - 1| over all rows, including NULL.
  double max_row_deviation() const;

  /// TSV `from \t to \t probability`; the NULL row has an empty first field.
  void save_tsv(const std::filesystem::path& path) const;
  static LexiconTable load_tsv(const std::filesystem::path& path);

  bool operator==(const LexiconTable&) const = default;

 private:
  std::map<std::string, Row, std::less<>> rows_;
  Row null_row_;
};

/// Which side is generated. `target_given_source` yields w(t|s).
enum class Direction { target_given_source, source_given_target };

struct Model1Options {
  int iterations = 5;
  unsigned threads = 1;
};

struct Model1Result {
  LexiconTable lexicon;
  /// Corpus log-likelihood before the first iteration and after each one (iterations + 1 values).
  std::vector<double> log_likelihood;
};

/// IBM Model 1 EM with a NULL word. Output is bit-identical for any thread count.
Model1Result train_model1(std::span<const SentenceRecord> corpus, const Model1Options& options,
                          Direction direction = Direction::target_given_source);

/// Each `to` word links to its most probable `from` word; a NULL winner leaves it unaligned.
/// Ties go to the smaller index, and a real word beats NULL on a tie. Links are (from, to).
Alignment viterbi_align(const LexiconTable& lexicon, std::span<const std::string> from,
                        std::span<const std::string> to);
/// Source-first alignment using w(t|s).
Alignment viterbi_align(const LexiconTable& lexicon, const SentenceRecord& pair);

enum class Heuristic { intersection, union_, grow_diag_final };

Heuristic parse_heuristic(std::string_view name);
std::string_view to_string(Heuristic heuristic);

/// Both inputs in source-first coordinates.
Alignment symmetrize(const Alignment& forward, const Alignment& backward, Heuristic heuristic);

struct AlignerOptions {
  int iterations = 5;
  Heuristic heuristic = Heuristic::grow_diag_final;
  unsigned threads = 1;
};

struct AlignmentRun {
  std::vector<Alignment> alignments;
  Model1Result forward;   // w(t|s)
  Model1Result backward;  // w(s|t)
};

/// Trains both directions, Viterbi-aligns every pair and symmetrizes.
AlignmentRun align_corpus(std::span<const SentenceRecord> corpus, const AlignerOptions& options);

/// Corpus-level AER with sure = possible = gold: 1 - 2|A∩G| / (|A| + |G|).
double alignment_error_rate(std::span<const Alignment> hypothesis, std::span<const Alignment> gold);

}  // namespace phraseprobe
