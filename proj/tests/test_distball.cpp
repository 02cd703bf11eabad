#include <cmath>

#include "doctest.h"
#include "qevote/bindings.hpp"
#include "qevote/distball.hpp"
#include "qevote/errors.hpp"

using namespace qevote;
namespace dbl = qevote::distball;

namespace {

// Casts `votes` (voter 0 optionally transferring d with difference lhat) and tallies.
std::optional<int64_t> run_round(dbl::BallotState& s, const dbl::DistBallotParams& p, const std::vector<int>& votes,
                                 Rng& rng, int d = 0, int lhat = 0) {
  std::vector<int> r;
  for (std::size_t k = 0; k < votes.size(); ++k) {
    dbl::Option v = votes[k] ? dbl::Option::yes : dbl::Option::no;
    double extra = k == 0 ? dbl::transfer_angle(d, lhat, p.D) : 0.0;
    r.push_back(s.cast(p.theta(v), rng, extra, -p.D * extra));
  }
  return dbl::tally(s, r, p, rng).m;
}

int yes_count(const std::vector<int>& v) {
  int m = 0;
  for (int x : v) m += x;
  return m;
}

}  // namespace

TEST_CASE("draw_params respects N * diff < D") {
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    int N = 1 + static_cast<int>(rng.below(6));
    int D = N + 1 + static_cast<int>(rng.below(40));
    auto p = dbl::draw_params(D, N, rng);
    CHECK(p.diff() >= 1);
    CHECK(static_cast<int64_t>(N) * p.diff() < D);
    CHECK(p.delta >= 0.0);
    CHECK(p.delta < kTwoPi / D);
  }
  CHECK_THROWS_AS(dbl::draw_params(4, 4, rng), ParameterError);
  dbl::DistBallotParams bad{7, 3, 3, 0, 0.0};
  CHECK_THROWS_AS(dbl::validate(bad), ParameterError);
}

TEST_CASE("decode inverts m * diff mod D") {
  for (int D : {7, 8, 31})
    for (int diff = 1; diff < D; ++diff) {
      dbl::DistBallotParams p{D, 1, diff, 0, 0.0};
      for (int m = 0; m * diff < D; ++m) CHECK(dbl::decode(m * diff, p) == m);
    }
  // 4 * 2 = 1 mod 7 has the unique preimage 4 because 2 is a unit mod 7.
  dbl::DistBallotParams p{7, 3, 2, 0, 0.0};
  CHECK(dbl::decode(1, p) == 4);
  dbl::DistBallotParams even{8, 3, 2, 0, 0.0};
  CHECK_FALSE(dbl::decode(1, even).has_value());
}

TEST_CASE("honest rounds decode the yes count on both state paths") {
  Rng rng(2);
  for (bool full : {false, true}) {
    const int D = 7, N = 3;
    for (int mask = 0; mask < 8; ++mask)
      for (int rep = 0; rep < 10; ++rep) {
        std::vector<int> v = {mask & 1, (mask >> 1) & 1, (mask >> 2) & 1};
        auto p = dbl::draw_params(D, N, rng);
        auto s = full ? dbl::make_full(D, N) : dbl::make_compact(D, N);
        CHECK(run_round(*s, p, v, rng) == yes_count(v));
      }
  }
}

TEST_CASE("after the tally corrections the state is |Omega_q>") {
  Rng rng(3);
  for (bool full : {false, true}) {
    const int D = 5, N = 2;
    auto p = dbl::draw_params(D, N, rng);
    auto s = full ? dbl::make_full(D, N) : dbl::make_compact(D, N);
    std::vector<int> r = {s->cast(p.theta(dbl::Option::yes), rng), s->cast(p.theta(dbl::Option::no), rng)};
    for (int rk : r) s->phase_below(rk, -D * p.delta);
    s->phase_linear(-2 * p.theta(dbl::Option::no));
    auto c = s->coefficients();
    const int q = p.diff();
    for (int j = 0; j < D; ++j) CHECK(std::abs(c[static_cast<std::size_t>(j)] - std::polar(1.0, kTwoPi * j * q / D)) < 1e-9);
  }
}

TEST_CASE("d-transfer with the exact difference adds d") {
  Rng rng(4);
  for (bool full : {false, true})
    for (int mask = 0; mask < 8; ++mask)
      for (int rep = 0; rep < 5; ++rep) {
        std::vector<int> v = {mask & 1, (mask >> 1) & 1, (mask >> 2) & 1};
        auto p = dbl::draw_params(7, 3, rng);
        auto s = full ? dbl::make_full(7, 3) : dbl::make_compact(7, 3);
        CHECK(run_round(*s, p, v, rng, 1, p.diff()) == yes_count(v) + 1);
      }
}

TEST_CASE("algorithm1 thresholds and wrap-around order") {
  const int D = 8;
  auto at = [&](int bin, int n) { return std::vector<double>(static_cast<std::size_t>(n), kTwoPi * (bin + 0.5) / D); };
  auto join = [](std::vector<double> a, const std::vector<double>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  auto one = dbl::algorithm1(join(at(3, 9), at(5, 1)), D);
  CHECK(one.solution == std::vector<int>{3});
  CHECK(one.record[3] == 9);
  auto two = dbl::algorithm1(join(at(3, 5), at(4, 5)), D);
  CHECK(two.solution == std::vector<int>{3, 4});
  CHECK(two.ltilde == 3);
  auto wrap = dbl::algorithm1(join(at(0, 5), at(7, 5)), D);
  CHECK(wrap.solution == std::vector<int>{7, 0});
  CHECK(wrap.ltilde == 7);
  // 40% threshold is inclusive: 2 of 5.
  CHECK(dbl::algorithm1(join(at(1, 2), join(at(2, 1), join(at(4, 1), at(6, 1)))), D).solution == std::vector<int>{1});
  CHECK_THROWS_AS(dbl::algorithm1({}, D), EstimatorEmpty);
  CHECK_THROWS_AS(dbl::algorithm1(join(at(1, 1), join(at(2, 1), at(3, 1))), D), EstimatorEmpty);
  // Three bins cannot all reach 40%, so EstimatorOverflow is a guard only.
  CHECK(dbl::algorithm1(join(at(1, 2), join(at(2, 2), at(3, 1))), D).solution == std::vector<int>{1, 2});
}

TEST_CASE("difference estimate from POVM samples") {
  Rng rng(5);
  const int D = 16;
  int contained = 0, cheat = 0;
  const int runs = 60;
  for (int i = 0; i < runs; ++i) {
    auto p = dbl::draw_params(D, 3, rng);
    std::vector<double> y, n;
    for (int k = 0; k < 500; ++k) {
      y.push_back(povm_theta_sample(D, p.theta(dbl::Option::yes), rng));
      n.push_back(povm_theta_sample(D, p.theta(dbl::Option::no), rng));
    }
    auto est = dbl::attack_estimate_difference(y, n, D);
    bool ok = false;
    for (int l : est.yes.solution) ok = ok || l == p.l_y;
    contained += ok;
    cheat += est.lhat == p.diff();
  }
  CHECK(contained == runs);
  CHECK(cheat >= runs * 0.85);
}

TEST_CASE("clamp_transfer keeps m + d below D") {
  CHECK(dbl::clamp_transfer(5, 10, 3) == 5);
  CHECK(dbl::clamp_transfer(9, 10, 3) == 6);
  CHECK(dbl::clamp_transfer(-1, 10, 3) == 0);
}

TEST_CASE("multi-round run reports consistent outcomes") {
  Rng rng(6);
  dbl::MultiRoundConfig cfg{1009, 200, {1, 0, 1}, 3, 3, false};
  auto res = dbl::multi_round(cfg, rng);
  CHECK(res.rounds.size() == 3);
  CHECK(res.honest_m == 100 + 1 + 2);
  bool all_cheat = true;
  for (const auto& r : res.rounds) all_cheat = all_cheat && r.cheat;
  if (all_cheat) CHECK(res.outcome == res.honest_m + res.d);
  CHECK_THROWS_AS(dbl::multi_round({1009, 2, {}, 1, 0, false}, rng), ParameterError);
}

TEST_CASE("session: honest multi-round tally and port checks") {
  Rng rng(7);
  dbl::Session s(4, 11, 3, false);
  s.setup(rng);
  s.ballots().open_casting();
  std::vector<int> votes = {1, 1, 0, 1};
  for (int k = 0; k < 4; ++k) s.cast_honest(k, votes[static_cast<std::size_t>(k)], rng);
  s.ballots().close_casting();
  TallyResult x = s.tally(rng);
  CHECK_FALSE(x.bottom);
  CHECK(x.counts == std::vector<int64_t>{1, 3});
  CHECK(s.aux() == "rounds_m=3/3/3");

  dbl::Session t(3, 7, 1, false);
  t.setup(rng);
  t.ballots().open_casting();
  CHECK_THROWS_AS(t.measure_option(0, 0, dbl::Option::yes, rng), ConfigError);
  t.mark_corrupted(0);
  t.measure_option(0, 0, dbl::Option::yes, rng);
  CHECK_THROWS_AS(t.measure_option(0, 0, dbl::Option::yes, rng), ProtocolOrderError);
  CHECK_THROWS_AS(t.measure_option(0, 1, dbl::Option::no, rng), IndexError);
  CHECK_THROWS_AS(dbl::Session(3, 3, 1, false), ParameterError);
}

TEST_CASE("missing ballot aborts the tally") {
  Rng rng(8);
  dbl::Session s(3, 7, 1, false);
  s.setup(rng);
  s.ballots().open_casting();
  s.cast_honest(0, 1, rng);
  s.ballots().close_casting();
  CHECK(s.tally(rng).bottom);
}

TEST_CASE("d-transfer adversary breaks integrity") {
  ExperimentConfig c;
  c.voters = 41;
  c.epsilon = 0.9;
  c.trials = 20;
  c.seed = 9;
  auto rep = run_exp_qint(c, make_adversary("distball-dtransfer", "distball", json::object()),
                          make_protocol("distball", 41, json{{"D", 1009}, {"rounds", 1}}));
  CHECK(rep.wins >= 1);
  for (const auto& t : rep.trials) {
    CAPTURE(t.aux);
    if (t.aux.find("cheat_rounds=1") != std::string::npos) CHECK(t.outcome == 1);
  }
}
