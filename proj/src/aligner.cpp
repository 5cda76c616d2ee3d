#include "phraseprobe/aligner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>

#include "phraseprobe/parallel.hpp"

namespace phraseprobe {

double LexiconTable::probability(std::string_view from, std::string_view to) const {
  auto row = rows_.find(from);
  if (row == rows_.end()) return kFloor;
  auto cell = row->second.find(to);
  return cell == row->second.end() ? kFloor : std::max(cell->second, kFloor);
}

double LexiconTable::null_probability(std::string_view to) const {
  auto cell = null_row_.find(to);
  return cell == null_row_.end() ? kFloor : std::max(cell->second, kFloor);
}

void LexiconTable::set(std::string from, std::string to, double p) {
  rows_[std::move(from)][std::move(to)] = p;
}

void LexiconTable::set_null(std::string to, double p) { null_row_[std::move(to)] = p; }

double LexiconTable::max_row_deviation() const {
  auto deviation = [](const Row& row) {
    double sum = 0.0;
    for (const auto& [to, p] : row) sum += p;
    return std::abs(sum - 1.0);
  };
  double worst = null_row_.empty() ? 0.0 : deviation(null_row_);
  for (const auto& [from, row] : rows_) worst = std::max(worst, deviation(row));
  return worst;
}

void LexiconTable::save_tsv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& [to, p] : null_row_) out << '\t' << to << '\t' << format_exact(p) << '\n';
  for (const auto& [from, row] : rows_)
    for (const auto& [to, p] : row) out << from << '\t' << to << '\t' << format_exact(p) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

LexiconTable LexiconTable::load_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  LexiconTable table;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    auto first = line.find('\t');
    auto second = first == std::string::npos ? first : line.find('\t', first + 1);
    if (second == std::string::npos) {
      throw ParseError(path.string() + ": " + at_line(line_number, "expected three TSV fields"));
    }
    std::string from = line.substr(0, first);
    std::string to = line.substr(first + 1, second - first - 1);
    double p = 0.0;
    try {
      std::size_t used = 0;
      p = std::stod(line.substr(second + 1), &used);
      if (second + 1 + used != line.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(path.string() + ": " + at_line(line_number, "bad probability"));
    }
    if (from.empty()) {
      table.set_null(std::move(to), p);
    } else {
      table.set(std::move(from), std::move(to), p);
    }
  }
  return table;
}

namespace {

constexpr int kNullId = 0;
constexpr std::size_t kBlockSize = 64;

struct Vocabulary {
  std::unordered_map<std::string, int> ids;
  std::vector<std::string> words;

  int intern(const std::string& word) {
    auto [it, inserted] = ids.try_emplace(word, static_cast<int>(words.size()));
    if (inserted) words.push_back(word);
    return it->second;
  }
};

struct EncodedPair {
  std::vector<int> from;  // slot 0 holds NULL
  std::vector<int> to;
};

// Dense co-occurrence parameter store: row r lists its `to` ids sorted, probs share offsets.
struct Parameters {
  std::vector<std::size_t> row_offset;
  std::vector<int> row_to;
  std::vector<double> prob;

  std::size_t slot(int from, int to) const {
    auto begin = row_to.begin() + static_cast<std::ptrdiff_t>(row_offset[from]);
    auto end = row_to.begin() + static_cast<std::ptrdiff_t>(row_offset[from + 1]);
    return static_cast<std::size_t>(std::lower_bound(begin, end, to) - row_to.begin());
  }
};

struct BlockResult {
  std::unordered_map<std::size_t, double> counts;
  double log_likelihood = 0.0;
};

BlockResult expectation(const Parameters& params, std::span<const EncodedPair> block,
                        bool collect) {
  BlockResult result;
  std::vector<std::size_t> slots;
  std::vector<double> probs;
  for (const EncodedPair& pair : block) {
    const double uniform = 1.0 / static_cast<double>(pair.from.size());
    for (int to : pair.to) {
      slots.clear();
      probs.clear();
      double total = 0.0;
      for (int from : pair.from) {
        const std::size_t s = params.slot(from, to);
        slots.push_back(s);
        probs.push_back(params.prob[s]);
        total += params.prob[s];
      }
      result.log_likelihood += std::log(total * uniform);
      if (!collect) continue;
      for (std::size_t k = 0; k < slots.size(); ++k) result.counts[slots[k]] += probs[k] / total;
    }
  }
  return result;
}

}  // namespace

Model1Result train_model1(std::span<const SentenceRecord> corpus, const Model1Options& options,
                          Direction direction) {
  if (corpus.empty()) throw ValidationError("cannot train Model 1 on an empty corpus");
  if (options.iterations < 1) throw ValidationError("Model 1 needs at least one iteration");

  const bool forward = direction == Direction::target_given_source;
  Vocabulary from_vocab;
  Vocabulary to_vocab;
  from_vocab.intern("");  // NULL
  std::vector<EncodedPair> pairs(corpus.size());
  for (std::size_t n = 0; n < corpus.size(); ++n) {
    const Tokens& from = forward ? corpus[n].source : corpus[n].target;
    const Tokens& to = forward ? corpus[n].target : corpus[n].source;
    pairs[n].from.push_back(kNullId);
    for (const std::string& w : from) pairs[n].from.push_back(from_vocab.intern(w));
    for (const std::string& w : to) pairs[n].to.push_back(to_vocab.intern(w));
  }

  std::vector<std::set<int>> cooccur(from_vocab.words.size());
  for (const EncodedPair& p : pairs)
    for (int f : p.from) cooccur[f].insert(p.to.begin(), p.to.end());

  Parameters params;
  params.row_offset.push_back(0);
  for (const auto& row : cooccur) {
    params.row_to.insert(params.row_to.end(), row.begin(), row.end());
    params.row_offset.push_back(params.row_to.size());
    const double uniform = row.empty() ? 0.0 : 1.0 / static_cast<double>(row.size());
    params.prob.insert(params.prob.end(), row.size(), uniform);
  }

  const std::size_t blocks = (pairs.size() + kBlockSize - 1) / kBlockSize;
  auto run_e_step = [&](bool collect) {
    std::vector<BlockResult> results(blocks);
    parallel_for(blocks, options.threads, [&](std::size_t b) {
      const std::size_t begin = b * kBlockSize;
      const std::size_t end = std::min(pairs.size(), begin + kBlockSize);
      results[b] = expectation(params, std::span(pairs).subspan(begin, end - begin), collect);
    });
    return results;
  };

  Model1Result result;
  std::vector<double> counts(params.prob.size());
  for (int iteration = 0; iteration < options.iterations; ++iteration) {
    std::vector<BlockResult> partial = run_e_step(true);
    std::fill(counts.begin(), counts.end(), 0.0);
    double log_likelihood = 0.0;
    // Block order fixes the floating-point summation order.
    for (const BlockResult& block : partial) {
      log_likelihood += block.log_likelihood;
      for (const auto& [slot, c] : block.counts) counts[slot] += c;
    }
    result.log_likelihood.push_back(log_likelihood);
    for (std::size_t r = 0; r + 1 < params.row_offset.size(); ++r) {
      double total = 0.0;
      for (std::size_t s = params.row_offset[r]; s < params.row_offset[r + 1]; ++s)
        total += counts[s];
      if (total <= 0.0) continue;
      for (std::size_t s = params.row_offset[r]; s < params.row_offset[r + 1]; ++s)
        params.prob[s] = counts[s] / total;
    }
  }
  double final_ll = 0.0;
  for (const BlockResult& block : run_e_step(false)) final_ll += block.log_likelihood;
  result.log_likelihood.push_back(final_ll);

  for (std::size_t r = 0; r + 1 < params.row_offset.size(); ++r) {
    for (std::size_t s = params.row_offset[r]; s < params.row_offset[r + 1]; ++s) {
      const std::string& to = to_vocab.words[static_cast<std::size_t>(params.row_to[s])];
      if (r == kNullId) {
        result.lexicon.set_null(to, params.prob[s]);
      } else {
        result.lexicon.set(from_vocab.words[r], to, params.prob[s]);
      }
    }
  }
  return result;
}

Alignment viterbi_align(const LexiconTable& lexicon, std::span<const std::string> from,
                        std::span<const std::string> to) {
  std::vector<Link> links;
  for (std::size_t j = 0; j < to.size(); ++j) {
    int best = -1;
    double best_p = 0.0;
    for (std::size_t i = 0; i < from.size(); ++i) {
      const double p = lexicon.probability(from[i], to[j]);
      if (p > best_p) {
        best_p = p;
        best = static_cast<int>(i);
      }
    }
    if (lexicon.null_probability(to[j]) > best_p) best = -1;
    if (best >= 0) links.push_back({best, static_cast<int>(j)});
  }
  return Alignment(std::move(links));
}

Alignment viterbi_align(const LexiconTable& lexicon, const SentenceRecord& pair) {
  return viterbi_align(lexicon, pair.source, pair.target);
}

Heuristic parse_heuristic(std::string_view name) {
  if (name == "intersection") return Heuristic::intersection;
  if (name == "union") return Heuristic::union_;
  if (name == "grow-diag-final") return Heuristic::grow_diag_final;
  throw ValidationError("unknown symmetrization heuristic '" + std::string(name) + "'");
}

std::string_view to_string(Heuristic heuristic) {
  switch (heuristic) {
    case Heuristic::intersection: return "intersection";
    case Heuristic::union_: return "union";
    case Heuristic::grow_diag_final: return "grow-diag-final";
  }
  return "?";
}

Alignment symmetrize(const Alignment& forward, const Alignment& backward, Heuristic heuristic) {
  std::vector<Link> both;
  std::set_intersection(forward.begin(), forward.end(), backward.begin(), backward.end(),
                        std::back_inserter(both));
  std::vector<Link> either;
  std::set_union(forward.begin(), forward.end(), backward.begin(), backward.end(),
                 std::back_inserter(either));
  if (heuristic == Heuristic::intersection) return Alignment(std::move(both));
  if (heuristic == Heuristic::union_) return Alignment(std::move(either));

  const Alignment candidates(either);
  Alignment result(both);
  std::set<int> source_aligned;
  std::set<int> target_aligned;
  for (const Link& l : result) {
    source_aligned.insert(l.source);
    target_aligned.insert(l.target);
  }
  auto add = [&](Link l) {
    result.insert(l);
    source_aligned.insert(l.source);
    target_aligned.insert(l.target);
  };

  static constexpr int kNeighbors[8][2] = {{-1, 0}, {0, -1}, {1, 0}, {0, 1},
                                           {-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
  for (bool grew = true; grew;) {
    grew = false;
    const std::vector<Link> current = result.links();
    for (const Link& l : current) {
      for (const auto& d : kNeighbors) {
        const Link n{l.source + d[0], l.target + d[1]};
        if (!candidates.contains(n) || result.contains(n)) continue;
        if (!source_aligned.contains(n.source) || !target_aligned.contains(n.target)) {
          add(n);
          grew = true;
        }
      }
    }
  }
  for (const Alignment* directional : {&forward, &backward}) {
    for (const Link& l : *directional) {
      if (!source_aligned.contains(l.source) && !target_aligned.contains(l.target)) add(l);
    }
  }
  return result;
}

AlignmentRun align_corpus(std::span<const SentenceRecord> corpus, const AlignerOptions& options) {
  Model1Options model_options{options.iterations, options.threads};
  AlignmentRun run;
  run.forward = train_model1(corpus, model_options, Direction::target_given_source);
  run.backward = train_model1(corpus, model_options, Direction::source_given_target);
  run.alignments.resize(corpus.size());
  parallel_for(corpus.size(), options.threads, [&](std::size_t n) {
    const SentenceRecord& r = corpus[n];
    Alignment fwd = viterbi_align(run.forward.lexicon, r.source, r.target);
    Alignment bwd = viterbi_align(run.backward.lexicon, r.target, r.source).transposed();
    run.alignments[n] = symmetrize(fwd, bwd, options.heuristic);
  });
  return run;
}

double alignment_error_rate(std::span<const Alignment> hypothesis, std::span<const Alignment> gold) {
  if (hypothesis.size() != gold.size()) {
    throw ValidationError("hypothesis and gold alignments differ in sentence count");
  }
  std::size_t matched = 0;
  std::size_t total = 0;
  for (std::size_t n = 0; n < gold.size(); ++n) {
    for (const Link& l : hypothesis[n]) matched += gold[n].contains(l) ? 1 : 0;
    total += hypothesis[n].size() + gold[n].size();
  }
  if (total == 0) return 0.0;
  return 1.0 - 2.0 * static_cast<double>(matched) / static_cast<double>(total);
}

}  // namespace phraseprobe
