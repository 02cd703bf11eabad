#include <cmath>

#include "doctest.h"
#include "qevote/bindings.hpp"
#include "qevote/errors.hpp"
#include "qevote/harness.hpp"

using namespace qevote;

namespace {

// Classical plain-text ballot box; enough to exercise the game logic.
class ToySession : public Session {
 public:
  ToySession(int N, int c) : N_(N), c_(c) { init_register(N); }
  std::string protocol() const override { return "toy"; }
  int voters() const override { return N_; }
  int candidates() const override { return c_; }
  Capabilities capabilities() const override { return {true, true, true}; }
  bool ballots_at_setup() const override { return false; }
  void setup(Rng&) override {}
  void cast_honest(int voter, int vote, Rng&) override { ballots().write(voter, {std::to_string(vote), -1}); }
  TallyResult tally(Rng&) override {
    TallyResult x;
    x.counts.assign(static_cast<std::size_t>(c_), extra_);
    for (int k = 0; k < N_; ++k)
      if (ballots().written(k)) ++x.counts[static_cast<std::size_t>(std::stoi(ballots().slot(k).record))];
    return x;
  }
  int64_t extra_ = 0;  // stuffed ballots per candidate

 private:
  int N_, c_;
};

ProtocolBinding toy(int N, int c = 2) {
  return {"toy", [=] { return std::make_unique<ToySession>(N, c); },
          [](const Session&, const TallyResult& x) { return !x.bottom; }};
}

class StuffingAdversary : public Adversary {
 public:
  std::string name() const override { return "stuffing"; }
  void tamper_setup(Session& s, Rng&) override { static_cast<ToySession&>(s).extra_ = 1; }
};

class GreedyAdversary : public Adversary {
 public:
  std::string name() const override { return "greedy"; }
  bool corrupt(int, Session&, Rng&) override { return true; }
};

// Reads the plain ballot of voter 0 and compares with the left-world vote.
class PeekAdversary : public Adversary {
 public:
  std::string name() const override { return "peek"; }
  std::vector<int> choose_votes(const GameView& v, Rng&) override {
    std::vector<int> votes(static_cast<std::size_t>(v.voters), 0);
    votes[1] = 1;
    return votes;
  }
  std::vector<int> choose_permutation(const GameView& v, const std::vector<int>&, Rng&) override {
    std::vector<int> p(static_cast<std::size_t>(v.voters));
    for (int k = 0; k < v.voters; ++k) p[static_cast<std::size_t>(k)] = k;
    std::swap(p[0], p[1]);
    return p;
  }
  int guess_beta(Session& s, Rng&) override { return s.ballots().slot(0).record == "0" ? 0 : 1; }
};

// Permutes votes between an honest and a corrupted voter: a False_Attack.
class CrossingAdversary : public PeekAdversary {
 public:
  std::string name() const override { return "crossing"; }
  bool corrupt(int voter, Session&, Rng&) override { return voter == 1; }
};

ExperimentConfig base(int N, uint64_t trials, uint64_t seed) {
  ExperimentConfig c;
  c.voters = N;
  c.trials = trials;
  c.seed = seed;
  return c;
}

template <class A>
AdversaryFactory factory() {
  return [] { return std::make_unique<A>(); };
}

}  // namespace

TEST_CASE("referendum tally and p_vcounted") {
  TallyResult x = referendum_tally(3, 5);
  CHECK(x.counts == std::vector<int64_t>{2, 3});
  CHECK(referendum_tally(7, 5).counts == std::vector<int64_t>{0, 7});
  CHECK(x.ballots() == 5);
  CHECK(p_vcounted(x, {2, 2}, 1));
  CHECK_FALSE(p_vcounted(x, {2, 2}, 0));
  CHECK_FALSE(p_vcounted(x, {3, 2}, 1));
  CHECK_FALSE(p_vcounted(TallyResult::abort("x"), {0, 0}, 0));
}

TEST_CASE("ballot register is write-once and gated by the casting phase") {
  BallotRegister r(3);
  CHECK_THROWS_AS(r.write(0, {"a", -1}), ProtocolOrderError);
  r.open_casting();
  r.write(0, {"a", -1});
  CHECK_THROWS_AS(r.write(0, {"b", -1}), ProtocolOrderError);
  CHECK_THROWS_AS(r.write(3, {"b", -1}), IndexError);
  CHECK(r.filled() == 1);
  CHECK_THROWS_AS(r.slot(1), ProtocolOrderError);
  r.close_casting();
  CHECK_THROWS_AS(r.write(1, {"c", -1}), ProtocolOrderError);
}

TEST_CASE("corruption budget is floor(eps N)") {
  CHECK(corruption_budget(10, 0.3) == 3);
  CHECK(corruption_budget(4, 0.5) == 2);
  CHECK(corruption_budget(7, 0.0) == 0);
  CHECK(corruption_budget(7, 1.0) == 7);
  CHECK_THROWS_AS(corruption_budget(7, 1.5), ParameterError);
}

TEST_CASE("wilson interval matches the closed form") {
  const double z = kWilsonZ;
  for (auto [k, n] : std::vector<std::pair<uint64_t, uint64_t>>{{0, 10}, {7, 10}, {500, 1000}, {10, 10}}) {
    double p = double(k) / n;
    double den = 1 + z * z / n;
    double centre = (p + z * z / (2 * n)) / den;
    double half = z * std::sqrt(p * (1 - p) / n + z * z / (4.0 * n * n)) / den;
    Estimate e = wilson_interval(k, n);
    CHECK(e.point == doctest::Approx(p));
    CHECK(e.lo == doctest::Approx(std::max(0.0, centre - half)));
    CHECK(e.hi == doctest::Approx(std::min(1.0, centre + half)));
  }
  CHECK_THROWS_AS(wilson_interval(0, 0), DegenerateSample);
}

TEST_CASE("honest adversary never wins integrity or verifiability") {
  auto rep = run_exp_qint(base(4, 50, 1), factory<HonestAdversary>(), toy(4));
  CHECK(rep.wins == 0);
  CHECK(rep.losses == 50);
  auto ver = run_exp_qver(base(4, 50, 1), factory<HonestAdversary>(), toy(4));
  CHECK(ver.wins == 0);
}

TEST_CASE("ballot stuffing wins integrity") {
  auto rep = run_exp_qint(base(4, 20, 2), factory<StuffingAdversary>(), toy(4));
  CHECK(rep.wins == 20);
}

TEST_CASE("qver needs a Verify predicate") {
  ProtocolBinding b = toy(3);
  b.verify = nullptr;
  CHECK_THROWS_AS(run_exp_qver(base(3, 1, 0), factory<HonestAdversary>(), b), ConfigError);
}

TEST_CASE("privacy: reading a plain ballot always wins, blind guessing is a coin") {
  auto peek = run_exp_qpriv(base(3, 200, 3), factory<PeekAdversary>(), toy(3));
  CHECK(peek.wins == 200);
  auto blind = run_exp_qpriv(base(3, 4000, 4), factory<BlindGuessAdversary>(), toy(3));
  Estimate e = estimate_advantage(blind);
  CHECK(std::abs(e.point - 0.5) < 3 * std::sqrt(0.25 / 4000));
}

TEST_CASE("permuting a corrupted voter's choice is a False_Attack") {
  ExperimentConfig c = base(4, 30, 5);
  c.epsilon = 0.25;
  auto rep = run_exp_qpriv(c, factory<CrossingAdversary>(), toy(4));
  CHECK(rep.false_attacks == 30);
  CHECK_THROWS_AS(estimate_advantage(rep), DegenerateSample);
}

TEST_CASE("exceeding the corruption budget is an internal error") {
  ExperimentConfig c = base(4, 1, 6);
  c.epsilon = 0.5;
  CHECK_THROWS_AS(run_exp_qint(c, factory<GreedyAdversary>(), toy(4)), InternalError);
}

TEST_CASE("config validation") {
  ExperimentConfig c = base(3, 1, 0);
  c.votes = {0, 2, 1};
  CHECK_THROWS_AS(run_exp_qint(c, factory<HonestAdversary>(), toy(3)), DomainError);
  c.votes = {0, 1};
  CHECK_THROWS_AS(run_exp_qint(c, factory<HonestAdversary>(), toy(3)), ConfigError);
  c = base(3, 1, 0);
  c.order = {0, 0, 1};
  CHECK_THROWS_AS(run_exp_qint(c, factory<HonestAdversary>(), toy(3)), ConfigError);
  c = base(3, 1, 0);
  c.votes = {1, 1, 1};
  c.permutation = {1, 2, 0};
  CHECK_THROWS_AS(run_exp_qpriv(c, factory<HonestAdversary>(), toy(3)), ConfigError);
  c = base(3, 0, 0);
  CHECK_THROWS_AS(run_exp_qint(c, factory<HonestAdversary>(), toy(3)), ConfigError);
}

TEST_CASE("results are independent of the thread count") {
  for (const char* p : {"travelball", "dualbasis", "distball", "conjcode"}) {
    CAPTURE(p);
    ProtocolBinding b = make_protocol(p, 4, json::object());
    ExperimentConfig c = base(4, 24, 77);
    auto one = run_exp_qpriv(c, factory<BlindGuessAdversary>(), b);
    c.threads = 3;
    auto three = run_exp_qpriv(c, factory<BlindGuessAdversary>(), b);
    REQUIRE(one.trials.size() == three.trials.size());
    for (std::size_t i = 0; i < one.trials.size(); ++i) {
      CHECK(one.trials[i].outcome == three.trials[i].outcome);
      CHECK(one.trials[i].seed == three.trials[i].seed);
      CHECK(one.trials[i].aux == three.trials[i].aux);
    }
  }
}

TEST_CASE("parallel_for rethrows worker failures") {
  CHECK_THROWS_AS(parallel_for(10, 2, [](uint64_t i) {
                    if (i == 7) throw DomainError("boom");
                  }),
                  DomainError);
  CHECK_THROWS_AS(parallel_for(1, 0, [](uint64_t) {}), ParameterError);
}

TEST_CASE("catalog and bindings") {
  CHECK(protocol_names().size() == 4);
  CHECK_THROWS_AS(make_protocol("nope", 3, json::object()), ConfigError);
  CHECK_THROWS_AS(make_protocol("travelball", 3, json{{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(make_adversary("travelball-sandwich", "conjcode", json::object()), ConfigError);
  CHECK(adversary_entry("conjcode-malleate").natural_game == Game::qint);
  CHECK(parse_game("qpriv") == Game::qpriv);
  CHECK_THROWS_AS(parse_game("qfoo"), ConfigError);
}
