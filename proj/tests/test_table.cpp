#include "doctest.h"

#include <algorithm>
#include <random>
#include <sstream>

#include "phraseprobe/table.hpp"
#include "test_util.hpp"

using namespace phraseprobe;
using phraseprobe::testing::make_record;

namespace {

PhraseOccurrence occ(const std::string& s, const std::string& t, const std::string& links = "0-0",
                     Orientation o = Orientation::monotone) {
  PhraseOccurrence p;
  p.source_phrase = s;
  p.target_phrase = t;
  p.internal_alignment = parse_pharaoh(links);
  p.orientation = o;
  const int ns = static_cast<int>(split_tokens(s).size());
  const int nt = static_cast<int>(split_tokens(t).size());
  p.source_span = {0, ns - 1};
  p.target_span = {0, nt - 1};
  return p;
}

PhraseTable keys(std::initializer_list<std::pair<const char*, const char*>> pairs) {
  PhraseTable t;
  for (const auto& [s, tg] : pairs) t[{s, tg}].joint_count = 1;
  return t;
}

std::vector<PhraseOccurrence> random_stream(std::mt19937& rng, int sentences) {
  std::vector<PhraseOccurrence> out;
  for (int n = 0; n < sentences; ++n) {
    auto r = phraseprobe::testing::random_record(rng, 7, 4, 0.25, n % 3 == 0);
    auto occs = extract_phrases(r, 4);
    out.insert(out.end(), occs.begin(), occs.end());
  }
  return out;
}

PhraseTable random_table(std::mt19937& rng, int sentences) {
  auto stream = random_stream(rng, sentences);
  return aggregate(stream);
}

std::string moses_text(const PhraseTable& t) {
  std::ostringstream os;
  export_moses(t, os);
  return os.str();
}

}  // namespace

TEST_CASE("aggregate counts joint and marginal frequencies") {
  const std::vector<PhraseOccurrence> stream{occ("a", "x"), occ("a", "x"), occ("a", "z"), occ("b", "z")};
  const PhraseTable t = aggregate(stream);
  REQUIRE(t.size() == 3);
  const PhraseEntry& ax = *t.find({"a", "x"});
  CHECK(ax.joint_count == 2);
  CHECK(ax.source_count == 3);
  CHECK(t.find({"b", "z"})->target_count == 2);
  CHECK(ax.orientation[0] == 2);
  CHECK(ax.representative_alignment() == "0-0");
  CHECK(aggregate(std::vector<PhraseOccurrence>{}).empty());
}

TEST_CASE("representative alignment is the most frequent, ties lexicographic") {
  const std::vector<PhraseOccurrence> stream{occ("a b", "x", "1-0"), occ("a b", "x", "0-0"),
                                             occ("a b", "x", "0-0 1-0")};
  CHECK(aggregate(stream).find({"a b", "x"})->representative_alignment() == "0-0");
  const std::vector<PhraseOccurrence> skewed{occ("a b", "x", "1-0"), occ("a b", "x", "1-0"),
                                             occ("a b", "x", "0-0")};
  CHECK(aggregate(skewed).find({"a b", "x"})->representative_alignment() == "1-0");
}

TEST_CASE("score: relative frequency and lexical weights") {
  const std::vector<PhraseOccurrence> stream{occ("a", "x"), occ("a", "x"), occ("a", "z"),
                                             occ("a b", "x", "0-0 1-0")};
  PhraseTable t = aggregate(stream);
  LexiconTable t_given_s;
  t_given_s.set("a", "x", 0.4);
  t_given_s.set("b", "x", 0.8);
  LexiconTable s_given_t;
  s_given_t.set("x", "a", 0.5);
  score(t, t_given_s, s_given_t);

  const PhraseEntry& ax = *t.find({"a", "x"});
  CHECK(ax.forward_prob == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(ax.backward_prob == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(ax.forward_lex == doctest::Approx(0.4));
  CHECK(ax.backward_lex == doctest::Approx(0.5));
  CHECK(t.find({"a b", "x"})->forward_lex == doctest::Approx(0.6));
  // w(z|a) was never estimated.
  CHECK(t.find({"a", "z"})->forward_lex == LexiconTable::kFloor);
}

TEST_CASE("lexical_weight averages over links and uses NULL for unaligned targets") {
  LexiconTable lex;
  lex.set("a", "x", 0.5);
  lex.set_null("y", 0.2);
  const Tokens s{"a"};
  CHECK(lexical_weight(s, Tokens{"x"}, Alignment{{0, 0}}, lex) == doctest::Approx(0.5));
  CHECK(lexical_weight(s, Tokens{"x", "y"}, Alignment{{0, 0}}, lex) == doctest::Approx(0.1));
}

TEST_CASE("phi(t|s) sums to one per source phrase") {
  std::mt19937 rng(5);
  PhraseTable t = random_table(rng, 80);
  estimate_probabilities(t);
  std::map<std::string, double> sums;
  for (const auto& [k, e] : t) sums[k.source] += e.forward_prob;
  for (const auto& [s, sum] : sums) CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("filter_min_count") {
  PhraseTable t;
  t[{"a", "x"}].joint_count = 2;
  t[{"a", "z"}].joint_count = 1;
  t[{"a", "x"}].forward_prob = 2.0 / 3.0;
  const PhraseTable kept = filter_min_count(t, 2);
  REQUIRE(kept.size() == 1);
  CHECK(kept.find({"a", "x"})->forward_prob == 2.0 / 3.0);
  CHECK(filter_min_count(t, 1) == t);
  CHECK(filter_min_count(PhraseTable{}).empty());
  CHECK_THROWS_AS(filter_min_count(t, 0), ValidationError);
}

TEST_CASE("filter_min_count is idempotent and monotone in k") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const PhraseTable t = random_table(rng, 30);
    for (std::uint64_t k = 1; k <= 4; ++k) {
      const PhraseTable f = filter_min_count(t, k);
      CHECK(filter_min_count(f, k) == f);
      const PhraseTable g = filter_min_count(t, k + 1);
      for (const auto& [key, e] : g) CHECK(f.contains(key));
    }
  }
}

TEST_CASE("intersect and subtract") {
  const PhraseTable a = keys({{"p", "1"}, {"p", "2"}});
  const PhraseTable b = keys({{"p", "2"}, {"p", "3"}});
  const auto shared = intersect(a, b);
  CHECK(shared.under_a == keys({{"p", "2"}}));
  CHECK(intersect(a, keys({{"q", "9"}})).under_a.empty());
  CHECK(intersect(a, a).under_a == a);
  CHECK(subtract(a, keys({{"p", "2"}})) == keys({{"p", "1"}}));
  CHECK(subtract(keys({{"p", "2"}}), b).empty());
  CHECK(subtract(a, PhraseTable{}) == a);
}

TEST_CASE("intersect keeps each side's scores") {
  PhraseTable a = keys({{"s", "t"}});
  PhraseTable b = keys({{"s", "t"}});
  a[{"s", "t"}].forward_prob = 0.3;
  b[{"s", "t"}].forward_prob = 0.9;
  const auto shared = intersect(a, b);
  CHECK(shared.under_a.find({"s", "t"})->forward_prob == 0.3);
  CHECK(shared.under_b.find({"s", "t"})->forward_prob == 0.9);
}

TEST_CASE("intersect and subtract partition A") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const PhraseTable a = random_table(rng, 6);
    const PhraseTable b = random_table(rng, 6);
    CHECK(intersect(a, b).under_a.size() + subtract(a, b).size() == a.size());
  }
}

TEST_CASE("overlap_stats") {
  const PhraseTable a = keys({{"p", "1"}, {"p", "2"}});
  const PhraseTable b = keys({{"p", "2"}, {"p", "3"}});
  const PhraseTable* two[] = {&a, &b};
  const auto st = overlap_stats(two);
  CHECK(st.k_way_overlap == doctest::Approx(1.0 / 3.0));
  CHECK(st.pairwise_jaccard[0][1] == doctest::Approx(1.0 / 3.0));
  CHECK(st.pairwise_jaccard[1][0] == doctest::Approx(1.0 / 3.0));

  const PhraseTable* same[] = {&a, &a, &a};
  CHECK(overlap_stats(same).k_way_overlap == 1.0);

  const PhraseTable c = keys({{"q", "1"}});
  const PhraseTable d = keys({{"r", "1"}});
  const PhraseTable* disjoint[] = {&a, &c, &d};
  CHECK(overlap_stats(disjoint).k_way_overlap == 0.0);

  const PhraseTable* one[] = {&a};
  CHECK_THROWS_AS(overlap_stats(one), ValidationError);
}

TEST_CASE("shared_source_stats") {
  PhraseTable shared;
  shared[{"a", "x"}].forward_prob = 0.7;
  PhraseTable non_shared;
  non_shared[{"a", "z"}].forward_prob = 0.2;
  auto st = shared_source_stats(shared, non_shared);
  CHECK(st.share_source_fraction == 1.0);
  CHECK(st.lower_prob_fraction == 1.0);
  CHECK(st.lower_prob_defined);

  PhraseTable elsewhere;
  elsewhere[{"q", "z"}].forward_prob = 0.2;
  st = shared_source_stats(shared, elsewhere);
  CHECK(st.share_source_fraction == 0.0);
  CHECK(st.lower_prob_fraction == 0.0);
  CHECK_FALSE(st.lower_prob_defined);

  non_shared[{"a", "w"}].forward_prob = 0.8;
  st = shared_source_stats(shared, non_shared);
  CHECK(st.sharing_entries == 2);
  CHECK(st.lower_entries == 1);
  CHECK(st.lower_prob_fraction == 0.5);
}

TEST_CASE("export_moses line layout") {
  PhraseTable t;
  PhraseEntry& e = t[{"a", "x"}];
  e.joint_count = 2;
  e.source_count = 3;
  e.target_count = 2;
  e.forward_prob = 2.0 / 3.0;
  e.backward_prob = 1.0;
  e.forward_lex = 0.5;
  e.backward_lex = 0.5;
  e.alignment_votes["0-0"] = 2;
  CHECK(moses_text(t) == "a ||| x ||| 1 0.5 0.666667 0.5 ||| 0-0 ||| 2 3 2\n");
  CHECK(moses_text(PhraseTable{}).empty());

  t[{"a", "w"}] = e;
  const std::string text = moses_text(t);
  CHECK(text.find("a ||| w") < text.find("a ||| x"));
}

TEST_CASE("aggregation ignores input order and thread count") {
  std::mt19937 rng(19);
  auto stream = random_stream(rng, 60);
  const PhraseTable reference = aggregate(stream, 1);
  for (unsigned threads : {1u, 2u, 3u, 8u}) {
    std::shuffle(stream.begin(), stream.end(), rng);
    const PhraseTable t = aggregate(stream, threads);
    CHECK(t == reference);
    CHECK(moses_text(t) == moses_text(reference));
  }
}

TEST_CASE("binary cache and Moses text round-trip") {
  std::mt19937 rng(31);
  PhraseTable t = random_table(rng, 40);
  LexiconTable lex;
  score(t, lex, lex);
  phraseprobe::testing::TempDir dir;

  save_table(t, dir.file("t.bin"));
  CHECK(load_table(dir.file("t.bin")) == t);

  export_moses(t, dir.file("t.moses"));
  const PhraseTable back = load_table(dir.file("t.moses"));
  CHECK(back.size() == t.size());
  CHECK(moses_text(back) == moses_text(t));

  dir.write("bad.bin", std::string("PPTABLE\0", 8) + "\x09\x00\x00\x00");
  CHECK_THROWS_AS(load_table(dir.file("bad.bin")), Error);
  dir.write("bad.moses", "a ||| x ||| 1 2\n");
  CHECK_THROWS_AS(load_table(dir.file("bad.moses")), ParseError);
}
