#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "phraseprobe/decoder.hpp"
#include "test_util.hpp"

using namespace phraseprobe;

namespace {

PhraseTable table_of(std::initializer_list<std::tuple<const char*, const char*, double>> rows) {
  PhraseTable t;
  for (const auto& [s, tg, p] : rows) {
    PhraseEntry& e = t[{s, tg}];
    e.joint_count = 1;
    e.forward_prob = p;
    e.backward_prob = p;
  }
  return t;
}

std::vector<Tokens> lines(std::initializer_list<const char*> texts) {
  std::vector<Tokens> out;
  for (const char* t : texts) out.push_back(split_tokens(t));
  return out;
}

std::vector<SentenceRecord> cipher_corpus(std::mt19937& rng, int sentences) {
  std::uniform_int_distribution<int> len(3, 9), word(0, 29);
  std::vector<SentenceRecord> corpus;
  for (int n = 0; n < sentences; ++n) {
    SentenceRecord r;
    const int L = len(rng);
    for (int i = 0; i < L; ++i) {
      const int w = word(rng);
      r.source.push_back("w" + std::to_string(w));
      r.target.push_back("c" + std::to_string((w * 7 + 3) % 30));
      r.alignment.insert({i, i});
    }
    corpus.push_back(std::move(r));
  }
  return corpus;
}

PhraseTable full_table(const std::vector<SentenceRecord>& corpus) {
  std::vector<PhraseOccurrence> occs;
  for (const auto& r : corpus) {
    auto o = extract_phrases(r);
    occs.insert(occs.end(), o.begin(), o.end());
  }
  PhraseTable t = aggregate(occs);
  estimate_probabilities(t);
  return t;
}

}  // namespace

TEST_CASE("decode examples") {
  const Tokens ab{"a", "b"};
  CHECK(decode_monotone(table_of({{"a", "x", 1.0}, {"b", "y", 1.0}}), ab) == Tokens{"x", "y"});
  CHECK(decode_monotone(table_of({{"a", "x", 1.0}}), Tokens{"a", "c"}) == Tokens{"x", "c"});
  CHECK(decode_monotone(table_of({{"a", "x", 0.9}, {"a", "z", 0.1}}), Tokens{"a"}) == Tokens{"x"});
  CHECK(decode_monotone(table_of({{"a", "x", 1.0}}), Tokens{}).empty());
}

TEST_CASE("decoder scores and ties") {
  const PhraseTable t = table_of({{"a", "x", 0.5}, {"a", "w", 0.5}, {"a b", "q", 0.2}, {"b", "y", 1.0}});
  const MonotoneDecoder dec(t);
  const Hypothesis h = dec.search(Tokens{"a", "b"});
  CHECK(h.target == "w y");
  CHECK(h.score == doctest::Approx(std::log(0.5)));
  CHECK(h.covered == 2);

  const Hypothesis oov = dec.search(Tokens{"z"});
  CHECK(oov.target == "z");
  CHECK(oov.score == doctest::Approx(kOovLogProb));

  DecoderOptions penalised;
  penalised.word_penalty = -2.0;
  CHECK(dec.decode(Tokens{"a", "b"}, penalised) == Tokens{"q"});
  CHECK_THROWS_AS(MonotoneDecoder(table_of({{"a", "x", 0.0}})), ValidationError);
}

TEST_CASE("large-beam decoding equals exhaustive search") {
  std::mt19937 rng(71);
  std::uniform_int_distribution<int> len(1, 8), word(0, 3), tlen(1, 2);
  std::uniform_real_distribution<double> prob(0.05, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    PhraseTable t;
    for (int k = 0; k < 14; ++k) {
      std::string s = "s" + std::to_string(word(rng));
      if (k % 3 == 0) s += " s" + std::to_string(word(rng));
      std::string tg = "t" + std::to_string(word(rng));
      if (tlen(rng) == 2) tg += " t" + std::to_string(word(rng));
      PhraseEntry& e = t[{s, tg}];
      e.joint_count = 1;
      e.forward_prob = prob(rng);
    }
    Tokens src;
    for (int i = len(rng); i > 0; --i) src.push_back("s" + std::to_string(word(rng) + (trial % 5 == 0 ? 1 : 0)));
    const double wp = trial % 2 ? -0.3 : 0.0;
    std::size_t reachable = 0;
    const oracle::Path best = oracle::exhaustive_decode(t, src, wp, &reachable);
    DecoderOptions opts;
    opts.beam_width = reachable;
    opts.word_penalty = wp;
    const Hypothesis h = MonotoneDecoder(t).search(src, opts);
    CAPTURE(trial);
    CHECK(h.target == best.target);
    CHECK(h.score == doctest::Approx(best.score).epsilon(1e-12));
  }
}

TEST_CASE("bleu examples") {
  auto same = lines({"a b c d e", "f g h i"});
  CHECK(bleu(same, same).score == 1.0);
  CHECK(bleu(lines({"a b"}), lines({"c d"})).score == 0.0);

  const auto r = bleu(lines({"a b c d e", "f g"}), lines({"a b c d e", "f h"}));
  CHECK(r.matches == std::vector<std::size_t>{6, 4, 3, 2});
  CHECK(r.totals == std::vector<std::size_t>{7, 5, 3, 2});
  CHECK(r.brevity_penalty == 1.0);
  CHECK(r.score == doctest::Approx(0.9099882808096075).epsilon(1e-12));

  const auto short_hyp = bleu(lines({"a b c d"}), lines({"a b c d e f"}));
  CHECK(short_hyp.brevity_penalty == doctest::Approx(std::exp(1.0 - 6.0 / 4.0)));
  CHECK(short_hyp.score == doctest::Approx(std::exp(1.0 - 6.0 / 4.0)));

  // Clipping: a repeated hypothesis word counts at most as often as in the reference.
  CHECK(bleu(lines({"a a a a"}), lines({"a b c d"}), 1).precisions[0] == 0.25);

  CHECK_THROWS_AS(bleu(lines({"a"}), lines({"a", "b"})), ValidationError);
  CHECK_THROWS_AS(bleu(std::vector<Tokens>{}, std::vector<Tokens>{}), ValidationError);
}

TEST_CASE("bleu is invariant to corpus order") {
  std::mt19937 rng(73);
  std::uniform_int_distribution<int> len(1, 9), word(0, 5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Tokens> hyps, refs;
    for (int n = 0; n < 8; ++n) {
      Tokens h, r;
      for (int i = len(rng); i > 0; --i) h.push_back("w" + std::to_string(word(rng)));
      for (int i = len(rng); i > 0; --i) r.push_back("w" + std::to_string(word(rng)));
      hyps.push_back(h);
      refs.push_back(r);
    }
    const double before = bleu(hyps, refs).score;
    std::vector<std::size_t> order(hyps.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Tokens> h2, r2;
    for (auto k : order) {
      h2.push_back(hyps[k]);
      r2.push_back(refs[k]);
    }
    CHECK(bleu(h2, r2).score == before);
  }
}

TEST_CASE("a cipher corpus decodes back exactly with its full table") {
  std::mt19937 rng(79);
  const auto corpus = cipher_corpus(rng, 60);
  const PhraseTable t = full_table(corpus);
  const MonotoneDecoder dec(t);
  std::vector<Tokens> hyps, refs;
  for (const auto& r : corpus) {
    hyps.push_back(dec.decode(r.source));
    refs.push_back(r.target);
  }
  CHECK(bleu(hyps, refs).score == 1.0);
}
