#include "phraseprobe/table.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "phraseprobe/parallel.hpp"

namespace phraseprobe {

std::string PhraseEntry::representative_alignment() const {
  const std::string* best = nullptr;
  std::uint64_t best_count = 0;
  // alignment_votes is ordered, so the first maximum is the lexicographically smallest.
  for (const auto& [links, count] : alignment_votes) {
    if (count > best_count) {
      best = &links;
      best_count = count;
    }
  }
  return best ? *best : std::string();
}

const PhraseEntry* PhraseTable::find(const PhraseKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void TableBuilder::add(const PhraseOccurrence& occ) {
  PhraseEntry& e = entries_[PhraseKey{occ.source_phrase, occ.target_phrase}];
  ++e.joint_count;
  ++e.orientation[static_cast<std::size_t>(occ.orientation)];
  ++e.alignment_votes[format_pharaoh(occ.internal_alignment)];
}

void TableBuilder::add(std::span<const PhraseOccurrence> occurrences) {
  for (const PhraseOccurrence& occ : occurrences) add(occ);
}

void TableBuilder::merge(TableBuilder&& other) {
  if (entries_.empty()) {
    entries_ = std::move(other.entries_);
    return;
  }
  for (auto& [key, theirs] : other.entries_) {
    PhraseEntry& mine = entries_[key];
    mine.joint_count += theirs.joint_count;
    for (std::size_t o = 0; o < mine.orientation.size(); ++o) mine.orientation[o] += theirs.orientation[o];
    for (const auto& [links, count] : theirs.alignment_votes) mine.alignment_votes[links] += count;
  }
  other.entries_.clear();
}

PhraseTable TableBuilder::build() && {
  PhraseTable table(std::move(entries_));
  recompute_marginals(table);
  return table;
}

void recompute_marginals(PhraseTable& table) {
  std::map<std::string_view, std::uint64_t> by_source;
  std::map<std::string_view, std::uint64_t> by_target;
  for (const auto& [key, e] : table) {
    by_source[key.source] += e.joint_count;
    by_target[key.target] += e.joint_count;
  }
  for (auto& [key, e] : table.entries()) {
    e.source_count = by_source[key.source];
    e.target_count = by_target[key.target];
  }
}

PhraseTable aggregate(std::span<const PhraseOccurrence> occurrences, unsigned threads) {
  const unsigned workers = std::max(1u, threads);
  std::vector<TableBuilder> shards(workers);
  const std::size_t chunk = (occurrences.size() + workers - 1) / workers;
  parallel_for(workers, workers, [&](std::size_t w) {
    const std::size_t begin = std::min(occurrences.size(), w * chunk);
    const std::size_t end = std::min(occurrences.size(), begin + chunk);
    shards[w].add(occurrences.subspan(begin, end - begin));
  });
  TableBuilder total;
  for (TableBuilder& shard : shards) total.merge(std::move(shard));
  return std::move(total).build();
}

void estimate_probabilities(PhraseTable& table) {
  for (auto& [key, e] : table.entries()) {
    e.forward_prob = e.source_count ? static_cast<double>(e.joint_count) / static_cast<double>(e.source_count) : 0.0;
    e.backward_prob = e.target_count ? static_cast<double>(e.joint_count) / static_cast<double>(e.target_count) : 0.0;
  }
}

double lexical_weight(std::span<const std::string> source, std::span<const std::string> target,
                      const Alignment& internal, const LexiconTable& target_given_source) {
  std::vector<std::vector<int>> linked(target.size());
  for (const Link& l : internal) linked[static_cast<std::size_t>(l.target)].push_back(l.source);
  double weight = 1.0;
  for (std::size_t j = 0; j < target.size(); ++j) {
    if (linked[j].empty()) {
      weight *= target_given_source.null_probability(target[j]);
      continue;
    }
    double sum = 0.0;
    for (int i : linked[j]) sum += target_given_source.probability(source[static_cast<std::size_t>(i)], target[j]);
    weight *= sum / static_cast<double>(linked[j].size());
  }
  return weight;
}

void score(PhraseTable& table, const LexiconTable& target_given_source,
           const LexiconTable& source_given_target, unsigned threads) {
  estimate_probabilities(table);
  std::vector<std::pair<const PhraseKey*, PhraseEntry*>> work;
  work.reserve(table.size());
  for (auto& [key, e] : table.entries()) work.emplace_back(&key, &e);
  parallel_for(work.size(), threads, [&](std::size_t n) {
    const auto& [key, e] = work[n];
    const Tokens source = split_tokens(key->source);
    const Tokens target = split_tokens(key->target);
    const Alignment internal = parse_pharaoh(e->representative_alignment());
    e->forward_lex = lexical_weight(source, target, internal, target_given_source);
    e->backward_lex = lexical_weight(target, source, internal.transposed(), source_given_target);
  });
}

PhraseTable filter_min_count(const PhraseTable& table, std::uint64_t k) {
  if (k < 1) throw ValidationError("minimum count must be at least 1");
  PhraseTable out;
  for (const auto& [key, e] : table) {
    if (e.joint_count >= k) out.entries().emplace_hint(out.entries().end(), key, e);
  }
  return out;
}

SharedTables intersect(const PhraseTable& a, const PhraseTable& b) {
  SharedTables shared;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      shared.under_a.entries().emplace_hint(shared.under_a.entries().end(), *ia);
      shared.under_b.entries().emplace_hint(shared.under_b.entries().end(), *ib);
      ++ia;
      ++ib;
    }
  }
  return shared;
}

PhraseTable subtract(const PhraseTable& a, const PhraseTable& b) {
  PhraseTable out;
  for (const auto& item : a) {
    if (!b.contains(item.first)) out.entries().emplace_hint(out.entries().end(), item);
  }
  return out;
}

namespace {

double ratio(std::size_t numerator, std::size_t denominator) {
  // Two empty key sets are identical.
  return denominator == 0 ? 1.0 : static_cast<double>(numerator) / static_cast<double>(denominator);
}

}  // namespace

OverlapStats overlap_stats(std::span<const PhraseTable* const> tables) {
  if (tables.size() < 2) throw ValidationError("overlap statistics need at least two tables");
  OverlapStats stats;
  std::set<PhraseKey> all;
  for (const PhraseTable* t : tables)
    for (const auto& [key, e] : *t) all.insert(key);
  std::size_t in_all = 0;
  for (const PhraseKey& key : all) {
    in_all += std::all_of(tables.begin(), tables.end(), [&](const PhraseTable* t) { return t->contains(key); });
  }
  stats.k_way_overlap = ratio(in_all, all.size());

  const std::size_t n = tables.size();
  stats.pairwise_jaccard.assign(n, std::vector<double>(n, 1.0));
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      const std::size_t shared = intersect(*tables[x], *tables[y]).under_a.size();
      const double j = ratio(shared, tables[x]->size() + tables[y]->size() - shared);
      stats.pairwise_jaccard[x][y] = stats.pairwise_jaccard[y][x] = j;
    }
  }
  return stats;
}

SharedSourceStats shared_source_stats(const PhraseTable& shared, const PhraseTable& non_shared) {
  std::map<std::string_view, double> best_shared;
  for (const auto& [key, e] : shared) {
    auto [it, inserted] = best_shared.try_emplace(key.source, e.forward_prob);
    if (!inserted) it->second = std::max(it->second, e.forward_prob);
  }
  SharedSourceStats stats;
  stats.non_shared_entries = non_shared.size();
  for (const auto& [key, e] : non_shared) {
    auto it = best_shared.find(key.source);
    if (it == best_shared.end()) continue;
    ++stats.sharing_entries;
    if (e.forward_prob < it->second) ++stats.lower_entries;
  }
  if (stats.non_shared_entries > 0) {
    stats.share_source_fraction =
        static_cast<double>(stats.sharing_entries) / static_cast<double>(stats.non_shared_entries);
  }
  stats.lower_prob_defined = stats.sharing_entries > 0;
  if (stats.lower_prob_defined) {
    stats.lower_prob_fraction =
        static_cast<double>(stats.lower_entries) / static_cast<double>(stats.sharing_entries);
  }
  return stats;
}

void export_moses(const PhraseTable& table, std::ostream& out) {
  for (const auto& [key, e] : table) {
    out << key.source << " ||| " << key.target << " ||| " << format_score(e.backward_prob) << ' '
        << format_score(e.backward_lex) << ' ' << format_score(e.forward_prob) << ' '
        << format_score(e.forward_lex) << " ||| " << e.representative_alignment() << " ||| "
        << e.target_count << ' ' << e.source_count << ' ' << e.joint_count << '\n';
  }
}

void export_moses(const PhraseTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  export_moses(table, out);
  if (!out) throw IoError("write failed for " + path.string());
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  static constexpr std::string_view kSep = " ||| ";
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(kSep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + kSep.size();
  }
}

template <class T>
std::vector<T> parse_numbers(const std::string& text, std::size_t line_number) {
  std::istringstream in(text);
  std::vector<T> values;
  T value;
  while (in >> value) values.push_back(value);
  if (!in.eof()) throw ParseError(at_line(line_number, "bad numeric field '" + text + "'"));
  return values;
}

}  // namespace

PhraseTable read_moses(std::istream& in) {
  PhraseTable table;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() < 5) throw ParseError(at_line(line_number, "expected 5 ||| fields"));
    const auto scores = parse_numbers<double>(fields[2], line_number);
    const auto counts = parse_numbers<std::uint64_t>(fields[4], line_number);
    if (scores.size() != 4 || counts.size() != 3) {
      throw ParseError(at_line(line_number, "expected 4 scores and 3 counts"));
    }
    PhraseEntry e;
    e.backward_prob = scores[0];
    e.backward_lex = scores[1];
    e.forward_prob = scores[2];
    e.forward_lex = scores[3];
    e.target_count = counts[0];
    e.source_count = counts[1];
    e.joint_count = counts[2];
    e.alignment_votes[format_pharaoh(parse_pharaoh(fields[3], line_number))] = e.joint_count;
    table[PhraseKey{fields[0], fields[1]}] = std::move(e);
  }
  return table;
}

namespace {

constexpr char kMagic[8] = {'P', 'P', 'T', 'A', 'B', 'L', 'E', '\0'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  void u64(std::uint64_t v) {
    char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((v >> (8 * b)) & 0xff);
    out_.write(bytes, 8);
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}
  std::uint64_t u64() {
    unsigned char bytes[8];
    if (!in_.read(reinterpret_cast<char*>(bytes), 8)) truncated();
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint64_t n = u64();
    if (n > (1u << 30)) truncated();
    std::string s(n, '\0');
    if (!in_.read(s.data(), static_cast<std::streamsize>(n))) truncated();
    return s;
  }

 private:
  [[noreturn]] void truncated() { throw ParseError(name_ + ": truncated or corrupt table cache"); }
  std::istream& in_;
  std::string name_;
};

}  // namespace

void save_table(const PhraseTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  Writer w(out);
  w.u64(kTableCacheVersion);
  w.u64(table.size());
  for (const auto& [key, e] : table) {
    w.str(key.source);
    w.str(key.target);
    w.u64(e.joint_count);
    w.u64(e.source_count);
    w.u64(e.target_count);
    w.f64(e.forward_prob);
    w.f64(e.backward_prob);
    w.f64(e.forward_lex);
    w.f64(e.backward_lex);
    for (std::uint64_t o : e.orientation) w.u64(o);
    w.u64(e.alignment_votes.size());
    for (const auto& [links, count] : e.alignment_votes) {
      w.str(links);
      w.u64(count);
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

PhraseTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[sizeof kMagic] = {};
  in.read(magic, sizeof magic);
  if (in.gcount() != sizeof magic || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    in.clear();
    in.seekg(0);
    return read_moses(in);
  }
  Reader r(in, path.string());
  const std::uint64_t version = r.u64();
  if (version != kTableCacheVersion) {
    throw ParseError(path.string() + ": unsupported table cache version " + std::to_string(version));
  }
  const std::uint64_t count = r.u64();
  PhraseTable table;
  for (std::uint64_t n = 0; n < count; ++n) {
    PhraseKey key;
    key.source = r.str();
    key.target = r.str();
    PhraseEntry e;
    e.joint_count = r.u64();
    e.source_count = r.u64();
    e.target_count = r.u64();
    e.forward_prob = r.f64();
    e.backward_prob = r.f64();
    e.forward_lex = r.f64();
    e.backward_lex = r.f64();
    for (std::uint64_t& o : e.orientation) o = r.u64();
    const std::uint64_t votes = r.u64();
    for (std::uint64_t v = 0; v < votes; ++v) {
      std::string links = r.str();
      e.alignment_votes[std::move(links)] = r.u64();
    }
    table.entries().emplace_hint(table.entries().end(), std::move(key), std::move(e));
  }
  return table;
}

}  // namespace phraseprobe
