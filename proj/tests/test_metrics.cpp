#include "doctest.h"

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "phraseprobe/metrics.hpp"
#include "test_util.hpp"

using namespace phraseprobe;
using phraseprobe::testing::make_record;

namespace {

PhraseTable random_corpus_table(std::mt19937& rng, const std::vector<SentenceRecord>& corpus, double keep) {
  std::uniform_real_distribution<double> coin(0, 1);
  PhraseTable t;
  for (const auto& r : corpus)
    for (const auto& o : extract_phrases(r, 4))
      if (coin(rng) < keep) t[{o.source_phrase, o.target_phrase}].joint_count += 1;
  // A few entries that match nothing, or match only one side.
  t[{"s0 s0 s0", "zz"}].joint_count = 1;
  t[{"nowhere", "t1"}].joint_count = 1;
  return t;
}

std::vector<SentenceRecord> random_corpus(std::mt19937& rng) {
  std::uniform_int_distribution<int> n(1, 6);
  std::vector<SentenceRecord> corpus;
  for (int k = n(rng); k > 0; --k) corpus.push_back(phraseprobe::testing::random_record(rng, 10, 4, 0.2, false));
  return corpus;
}

PhraseEntry entry_with(const std::string& links, std::array<std::uint64_t, 3> orient = {1, 0, 0}) {
  PhraseEntry e;
  e.joint_count = 1;
  e.orientation = orient;
  e.alignment_votes[links] = 1;
  return e;
}

}  // namespace

TEST_CASE("table_size") {
  CHECK(table_size(PhraseTable{}) == 0);
  PhraseTable t;
  t[{"a", "x"}];
  t[{"a", "z"}];
  CHECK(table_size(t) == 2);
}

TEST_CASE("recovery_percent examples") {
  const std::vector<SentenceRecord> corpus{make_record("a b", "x y")};
  PhraseTable t;
  t[{"a", "x"}].joint_count = 1;
  CHECK(recovery_percent(t, corpus) == 0.5);
  CHECK(recovery_percent(PhraseTable{}, corpus) == 0.0);

  const std::vector<SentenceRecord> two{make_record("a b", "x y"), make_record("c", "z w v")};
  PhraseTable whole;
  for (const auto& r : two) whole[{join_tokens(r.source), join_tokens(r.target)}].joint_count = 1;
  CHECK(recovery_percent(whole, two) == 1.0);
  CHECK(recovery_percent(whole, two, Averaging::macro) == 1.0);

  // Micro pools 1 of 5 tokens; macro averages 1/2 and 0.
  CHECK(recovery_percent(t, two) == doctest::Approx(0.2));
  CHECK(recovery_percent(t, two, Averaging::macro) == doctest::Approx(0.25));

  CHECK_THROWS_AS(recovery_percent(t, std::vector<SentenceRecord>{}), ValidationError);
}

TEST_CASE("recovery needs the source phrase in the same sentence") {
  PhraseTable t;
  t[{"a", "y"}].joint_count = 1;
  CHECK(recovery_percent(t, std::vector{make_record("b", "y")}) == 0.0);
  CHECK(recovery_percent(t, std::vector{make_record("a b", "y y")}) == 1.0);
}

TEST_CASE("recovery_percent agrees with the brute-force span matcher") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const auto corpus = random_corpus(rng);
    const PhraseTable t = random_corpus_table(rng, corpus, 0.3);
    const auto [hit, total] = oracle::recovery_counts(t, corpus);
    CHECK(recovery_percent(t, corpus, Averaging::micro, 1 + trial % 3) ==
          static_cast<double>(hit) / static_cast<double>(total));
  }
}

TEST_CASE("recovery_percent is monotone in the table") {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const auto corpus = random_corpus(rng);
    const PhraseTable big = random_corpus_table(rng, corpus, 0.6);
    PhraseTable small;
    std::bernoulli_distribution keep(0.5);
    for (const auto& [k, e] : big)
      if (keep(rng)) small[k] = e;
    CHECK(recovery_percent(small, corpus) <= recovery_percent(big, corpus));
    CHECK(recovery_percent(small, corpus, Averaging::macro) <= recovery_percent(big, corpus, Averaging::macro));
  }
}

TEST_CASE("pearson examples") {
  using V = std::vector<double>;
  CHECK(pearson(V{1, 2, 3}, V{2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pearson(V{1, 2, 3}, V{3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(pearson(V{1, 2, 3, 4}, V{1, 3, 2, 4}) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK_THROWS_AS(pearson(V{1, 2}, V{1, 2, 3}), ValidationError);
  CHECK_THROWS_AS(pearson(V{1, 1, 1}, V{1, 2, 3}), ValidationError);
  CHECK_THROWS_AS(pearson(V{1}, V{2}), ValidationError);
}

TEST_CASE("pearson: affine invariance and direct-formula agreement") {
  std::mt19937 rng(47);
  std::normal_distribution<double> g(0, 1);
  std::uniform_real_distribution<double> scale(0.1, 10), shift(-5, 5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(3 + trial % 20), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = g(rng);
      y[i] = 0.5 * x[i] + g(rng);
    }
    const double r = pearson(x, y);
    CHECK(std::abs(r - oracle::pearson_direct(x, y)) <= 1e-9);
    const double a = scale(rng), b = shift(rng);
    std::vector<double> ax(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) ax[i] = a * x[i] + b;
    CHECK(std::abs(pearson(ax, y) - r) <= 1e-12);
    CHECK(std::abs(pearson(x, ax) - 1.0) <= 1e-12);
  }
}

TEST_CASE("length_class buckets") {
  CHECK(length_class(PhraseKey{"a b", "x"}) == LengthClass::short_phrase);
  CHECK(length_class(5, 2) == LengthClass::middle_phrase);
  CHECK(length_class(4, 4) == LengthClass::middle_phrase);
  CHECK(length_class(7, 7) == LengthClass::long_phrase);
  CHECK(length_class(1, 6) == LengthClass::long_phrase);
  CHECK(length_class(8, 1) == LengthClass::over_length);
  CHECK(length_class(3, 3) == LengthClass::short_phrase);
}

TEST_CASE("reorder_class majority") {
  CHECK(reorder_class(entry_with("0-0", {3, 1, 0})) == Orientation::monotone);
  CHECK(reorder_class(entry_with("0-0", {2, 2, 0})) == Orientation::monotone);
  CHECK(reorder_class(entry_with("0-0", {0, 0, 5})) == Orientation::discontinuous);
  CHECK(reorder_class(entry_with("0-0", {0, 3, 3})) == Orientation::swap);
}

TEST_CASE("fertility_class precedence") {
  CHECK(fertility_class(Alignment{{0, 0}}) == FertilityClass::one_to_one);
  CHECK(fertility_class(Alignment{{0, 0}, {1, 0}}) == FertilityClass::many_to_one);
  CHECK(fertility_class(Alignment{{0, 0}, {0, 1}}) == FertilityClass::one_to_many);
  CHECK(fertility_class(Alignment{{0, 0}, {0, 1}, {1, 2}, {2, 2}}) == FertilityClass::one_to_many);
  CHECK(fertility_class(entry_with("0-0 1-0")) == FertilityClass::many_to_one);
  CHECK_THROWS_AS(fertility_class(Alignment{}), ValidationError);
  CHECK(to_string(FertilityClass::one_to_many) == "1-M");
}

TEST_CASE("profile partitions the table on every axis") {
  PhraseTable one;
  one[{"a", "x"}] = entry_with("0-0");
  const ComplexityProfile p = profile(one);
  CHECK(p.total == 1);
  CHECK(p.length[0] == 1);
  CHECK(p.reordering[0] == 1);
  CHECK(p.fertility[0] == 1);

  const ComplexityProfile empty = profile(PhraseTable{});
  CHECK(empty.total == 0);
  CHECK(empty.length == std::array<std::uint64_t, 4>{});

  std::mt19937 rng(53);
  PhraseTable t;
  for (int n = 0; n < 40; ++n) {
    auto r = phraseprobe::testing::random_record(rng, 10, 5, 0.2, false);
    for (const auto& o : extract_phrases(r)) {
      PhraseEntry& e = t[{o.source_phrase, o.target_phrase}];
      e.joint_count += 1;
      e.orientation[static_cast<std::size_t>(o.orientation)] += 1;
      e.alignment_votes[format_pharaoh(o.internal_alignment)] += 1;
    }
  }
  const ComplexityProfile q = profile(t);
  auto sum = [](const auto& a) { return std::accumulate(a.begin(), a.end(), std::uint64_t{0}); };
  CHECK(q.total == t.size());
  CHECK(sum(q.length) == t.size());
  CHECK(sum(q.reordering) == t.size());
  CHECK(sum(q.fertility) == t.size());
}
