#include <doctest.h>

#include <cmath>

#include "lugasr/decoder.hpp"
#include "lugasr/text_util.hpp"
#include "oracles.hpp"

using namespace lugasr;

namespace {

// three classes: a, b, blank
Alphabet ab_alphabet() { return Alphabet(std::string("ab")); }

// rows of per-frame probabilities (will be log()d); columns a, b, blank
Eigen::MatrixXd probs(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index t = 0;
  for (const auto& row : rows) {
    Eigen::Index k = 0;
    for (double v : row) m(t, k++) = std::log(v);
    ++t;
  }
  return m;
}

DecoderConfig exact_cfg(int beam) {
  DecoderConfig cfg;
  cfg.beam_width = beam;
  cfg.lm_alpha = 0.0;
  cfg.lm_beta = 0.0;
  cfg.prune_logp = -1e30;
  return cfg;
}

std::string decode_ids(const Alphabet& a, const std::vector<int>& ids) {
  return a.decode(ids);
}

}  // namespace

TEST_CASE("greedy: collapse rule") {
  Alphabet a = ab_alphabet();
  // path a a - a b b - b  =>  "aabb"
  auto lp = probs({{0.8, 0.1, 0.1},
                   {0.8, 0.1, 0.1},
                   {0.1, 0.1, 0.8},
                   {0.8, 0.1, 0.1},
                   {0.1, 0.8, 0.1},
                   {0.1, 0.8, 0.1},
                   {0.1, 0.1, 0.8},
                   {0.1, 0.8, 0.1}});
  CHECK(greedy_decode(lp, a) == "aabb");
}

TEST_CASE("greedy: all blanks and ties") {
  Alphabet a = ab_alphabet();
  CHECK(greedy_decode(probs({{0.1, 0.1, 0.8}, {0.2, 0.2, 0.6}}), a) == "");
  // exact tie between a and b goes to the lowest symbol index
  CHECK(greedy_decode(probs({{0.4, 0.4, 0.2}}), a) == "a");
}

TEST_CASE("beam matches a hand-worked three-frame posterior") {
  Alphabet a = ab_alphabet();
  // columns a, b, blank; e.g. P("ba") sums the five alignment paths
  // (b,a,-),(b,a,a),(b,-,a),(b,b,a),(-,b,a):
  //   .35*.35*.10 + .35*.35*.50 + .35*.40*.50 + .35*.25*.50 + .25*.25*.50
  auto lp = probs({{0.40, 0.35, 0.25}, {0.35, 0.25, 0.40}, {0.50, 0.40, 0.10}});
  auto beam = beam_decode(lp, a, nullptr, exact_cfg(16));
  REQUIRE(beam.size() >= 3);
  CHECK(beam[0].text == "ba");
  CHECK(std::exp(beam[0].score) == doctest::Approx(0.2185).epsilon(1e-6));
  CHECK(beam[1].text == "ab");
  CHECK(std::exp(beam[1].score) == doctest::Approx(0.2050).epsilon(1e-6));
  CHECK(beam[2].text == "a");
  CHECK(std::exp(beam[2].score) == doctest::Approx(0.2025).epsilon(1e-6));
}

TEST_CASE("wide beam matches exhaustive max-posterior enumeration") {
  lugasr::Rng rng(2024);
  Alphabet a = ab_alphabet();
  for (int i = 0; i < 100; ++i) {
    int frames = 1 + static_cast<int>(uniform_index(rng, 4));
    auto lp = oracles::random_logprobs(frames, 3, rng, 1.0);
    auto beam = beam_decode(lp, a, nullptr, exact_cfg(4096));
    auto expect = oracles::best_labeling_brute_force(lp, a.blank_index());
    REQUIRE(!beam.empty());
    CHECK(beam[0].text == decode_ids(a, expect));
  }
}

TEST_CASE("prefix mass equals the brute-force sum over alignment paths") {
  lugasr::Rng rng(99);
  Alphabet a = ab_alphabet();
  for (int i = 0; i < 20; ++i) {
    int frames = 2 + static_cast<int>(uniform_index(rng, 4));  // up to 5
    auto lp = oracles::random_logprobs(frames, 3, rng, 1.0);
    auto beam = beam_decode(lp, a, nullptr, exact_cfg(1 << 14));
    auto mass = oracles::enumerate_labelings(lp, a.blank_index());
    CHECK(beam.size() == mass.size());
    for (const auto& hyp : beam) {
      std::vector<int> ids;
      for (char c : hyp.text) ids.push_back(*a.index_of(static_cast<char32_t>(c)));
      REQUIRE(mass.count(ids));
      CHECK(hyp.score == doctest::Approx(mass.at(ids)).epsilon(1e-9));
    }
  }
}

TEST_CASE("beam width 1 equals greedy on peaked random frames") {
  lugasr::Rng rng(555);
  Alphabet a = ab_alphabet();
  for (int i = 0; i < 20; ++i) {
    int frames = 2 + static_cast<int>(uniform_index(rng, 6));
    // peaked rows keep the argmax path dominant
    auto lp = oracles::random_logprobs(frames, 3, rng, 4.0);
    auto beam = beam_decode(lp, a, nullptr, exact_cfg(1));
    CHECK(beam[0].text == greedy_decode(lp, a));
  }
}

TEST_CASE("zero boosts and an empty hotword table decode identically") {
  lugasr::Rng rng(77);
  Alphabet a = Alphabet::english();
  auto lp = oracles::random_logprobs(12, a.num_classes(), rng, 2.0);
  DecoderConfig cfg = exact_cfg(16);
  auto plain = beam_decode(lp, a, nullptr, cfg);
  DecoderConfig boosted = cfg;
  boosted.hotwords = {{"wano", 0.0}, {"ddala", 0.0}};
  auto zeroed = beam_decode(lp, a, nullptr, boosted);
  REQUIRE(plain.size() == zeroed.size());
  for (size_t i = 0; i < plain.size(); ++i) {
    CHECK(plain[i].text == zeroed[i].text);
    CHECK(plain[i].score == zeroed[i].score);  // bit-identical
  }
}

namespace {

// Two competing two-letter words, "ab" (target) and "ac" (competitor);
// the acoustics slightly prefer the competitor at the second frame.
// Columns: a, b, c, space, blank.
Eigen::MatrixXd ambiguous_instance() {
  return probs({
      {0.90, 0.02, 0.02, 0.02, 0.04},
      {0.04, 0.40, 0.50, 0.02, 0.04},
      {0.02, 0.02, 0.02, 0.90, 0.04},
  });
}

}  // namespace

TEST_CASE("hotword boost flips an ambiguous word and is monotone") {
  Alphabet a(std::string("abc "));
  auto lp = ambiguous_instance();
  DecoderConfig cfg = exact_cfg(64);

  CHECK(decode_with_hotwords(lp, a, nullptr, cfg, {}) == "ac ");
  CHECK(decode_with_hotwords(lp, a, nullptr, cfg, {{"ab", 0.0}}) == "ac ");
  CHECK(decode_with_hotwords(lp, a, nullptr, cfg, {{"ab", 2.0}}) == "ab ");

  // large negative boost suppresses a word the acoustics support
  CHECK(decode_with_hotwords(lp, a, nullptr, cfg, {{"ac", -1000.0}}) == "ab ");

  // monotone: once present, the keyword stays as the boost grows
  bool seen = false;
  for (double boost : kDefaultBoostGrid) {
    std::string out = decode_with_hotwords(lp, a, nullptr, cfg, {{"ab", boost}});
    bool present = contains_whole_word(out, "ab");
    if (seen) CHECK(present);
    seen = seen || present;
  }
  CHECK(seen);
}

TEST_CASE("boost_sweep emits one row per utterance and boost") {
  Alphabet a(std::string("abc "));
  auto lp = ambiguous_instance();
  DecoderConfig cfg = exact_cfg(64);
  auto rows = boost_sweep({lp, lp}, a, "ab", kDefaultBoostGrid, nullptr, cfg);
  CHECK(rows.size() == 2 * kDefaultBoostGrid.size());
  // contains_keyword is monotone non-decreasing within each utterance
  for (size_t u = 0; u < 2; ++u) {
    bool seen = false;
    for (size_t i = 0; i < kDefaultBoostGrid.size(); ++i) {
      const auto& row = rows[u * kDefaultBoostGrid.size() + i];
      CHECK(row.utterance == u);
      CHECK(row.boost == kDefaultBoostGrid[i]);
      if (seen) CHECK(row.contains_keyword);
      seen = seen || row.contains_keyword;
    }
    CHECK(seen);
  }

  CHECK(boost_sweep({}, a, "ab", kDefaultBoostGrid, nullptr, cfg).empty());
  CHECK_THROWS_AS(boost_sweep({lp}, a, "ab", {}, nullptr, cfg), Error);
}

TEST_CASE("default boost grid matches the documented sweep") {
  const std::vector<double> expect = {-1000, -600, -200, 0, 200, 600, 1000};
  CHECK(kDefaultBoostGrid == expect);
}

TEST_CASE("lm fusion rescores hypotheses at word boundaries") {
  // LM strongly prefers the word "a" over "b"
  auto [lm, stats] = build_lm({"a", "a", "a", "a", "b"}, 2);
  Alphabet a(std::string("ab "));
  auto lp = probs({
      {0.46, 0.46, 0.04, 0.04},  // dead tie acoustically
      {0.02, 0.02, 0.90, 0.06},
  });
  DecoderConfig cfg;
  cfg.beam_width = 64;
  cfg.prune_logp = -1e30;
  cfg.lm_alpha = 1.5;
  cfg.lm_beta = 0.0;
  auto beam = beam_decode(lp, a, &lm, cfg);
  REQUIRE(!beam.empty());
  CHECK(beam[0].text == "a ");

  // score decomposition: acoustic mass plus weighted lm terms
  auto no_lm = beam_decode(lp, a, nullptr, exact_cfg(64));
  for (const auto& hyp : beam) {
    for (const auto& plain : no_lm) {
      if (plain.text != hyp.text) continue;
      // rebuild the lm contribution from the transcript
      std::vector<std::string> ctx = {"<s>"};
      double lm_ln = 0.0;
      int words = 0;
      std::string word;
      for (char c : hyp.text + std::string("\x01")) {
        if (c == ' ' || c == '\x01') {
          if (!word.empty()) {
            lm_ln += std::log(10.0) * lm.logprob(word, ctx);
            ctx.push_back(word);
            words += 1;
            word.clear();
          }
          continue;
        }
        word.push_back(c);
      }
      lm_ln += std::log(10.0) * lm.logprob("</s>", ctx);
      double expect = plain.score + cfg.lm_alpha * lm_ln + cfg.lm_beta * words;
      CHECK(hyp.score == doctest::Approx(expect).epsilon(1e-9));
    }
  }
}

TEST_CASE("decoding is deterministic") {
  lugasr::Rng rng(31);
  Alphabet a = Alphabet::english();
  auto lp = oracles::random_logprobs(30, a.num_classes(), rng, 2.0);
  DecoderConfig cfg;
  cfg.beam_width = 8;
  auto one = beam_decode(lp, a, nullptr, cfg);
  auto two = beam_decode(lp, a, nullptr, cfg);
  CHECK(one == two);
}
