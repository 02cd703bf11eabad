#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "doctest.h"
#include "qevote/analysis.hpp"
#include "qevote/bindings.hpp"
#include "qevote/dualbasis.hpp"
#include "qevote/errors.hpp"

using namespace qevote;
namespace db = qevote::dualbasis;

namespace {

TallyResult run_honest(const db::DualBasisParams& p, const std::vector<int>& votes, Rng& rng,
                       db::SamplingOrder order = db::SamplingOrder::index) {
  db::Session s(p, order);
  s.setup(rng);
  s.ballots().open_casting();
  for (int k = 0; k < p.N; ++k) s.cast_honest(k, votes[static_cast<std::size_t>(k)], rng);
  s.ballots().close_casting();
  return s.tally(rng);
}

std::vector<int64_t> histogram(const std::vector<int>& votes, int c) {
  std::vector<int64_t> h(static_cast<std::size_t>(c), 0);
  for (int v : votes) ++h[static_cast<std::size_t>(v)];
  return h;
}

std::vector<int> digits(int x, int n, int base) {
  std::vector<int> d(static_cast<std::size_t>(n));
  for (int k = n - 1; k >= 0; --k, x /= base) d[static_cast<std::size_t>(k)] = x % base;
  return d;
}

}  // namespace

TEST_CASE("copy counts and parameter validation") {
  db::DualBasisParams p{3, 2, 2, false};
  CHECK(p.picks() == 4);
  CHECK(p.d1_copies() == 15);
  CHECK(p.d2_copies() == 13);
  CHECK_THROWS_AS((db::DualBasisParams{1, 2, 1, false}.validate()), ParameterError);
  CHECK_THROWS_AS((db::DualBasisParams{3, 1, 1, false}.validate()), ParameterError);
  CHECK_THROWS_AS((db::DualBasisParams{8, 2, 1, false}.validate()), CapacityError);
}

TEST_CASE("|D1> and |D2> amplitudes") {
  for (int N = 2; N <= 4; ++N)
    for (int c = 2; c <= 3; ++c) {
      PureState s = db::d1_state(N, c);
      const double amp = std::pow(c, -(N - 1) / 2.0);
      for (std::size_t i = 0; i < s.size(); ++i) {
        auto d = digits(static_cast<int>(i), N, c);
        bool zero = std::accumulate(d.begin(), d.end(), 0) % c == 0;
        CHECK(std::abs(s.amps()[i] - cplx(zero ? amp : 0.0, 0)) < 1e-12);
      }
    }
  for (int N = 2; N <= 4; ++N) {
    PureState s = db::d2_state(N);
    double fact = 1;
    for (int k = 2; k <= N; ++k) fact *= k;
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto d = digits(static_cast<int>(i), N, N);
      auto sorted = d;
      std::sort(sorted.begin(), sorted.end());
      bool perm = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
      CHECK(std::abs(s.amps()[i] - cplx(perm ? 1 / std::sqrt(fact) : 0.0, 0)) < 1e-12);
    }
  }
}

TEST_CASE("measurement invariants hold on both paths") {
  Rng rng(1);
  for (bool full : {false, true}) {
    db::DualBasisParams p{3, 3, 1, full};
    db::Copy d1{db::CopyKind::d1, false, {}, false}, d2{db::CopyKind::d2, false, {}, false};
    for (int i = 0; i < 200; ++i) {
      auto a = db::measure_copy(d1, Basis::computational, p, rng);
      CHECK(std::accumulate(a.begin(), a.end(), 0) % 3 == 0);
      auto b = db::measure_copy(d1, Basis::fourier, p, rng);
      CHECK(std::all_of(b.begin(), b.end(), [&](int x) { return x == b[0]; }));
      auto c = db::measure_copy(d2, Basis::computational, p, rng);
      std::sort(c.begin(), c.end());
      CHECK(c == std::vector<int>{0, 1, 2});
      auto d = db::measure_copy(d2, Basis::fourier, p, rng);
      CHECK(std::accumulate(d.begin(), d.end(), 0) % 3 == 0);
    }
  }
}

TEST_CASE("fast D2 Fourier table matches the state-vector route") {
  Rng rng(2);
  db::DualBasisParams fast{3, 2, 1, false}, full{3, 2, 1, true};
  db::Copy d2{db::CopyKind::d2, false, {}, false};
  std::map<std::vector<int>, int> a, b;
  const int n = 6000;
  for (int i = 0; i < n; ++i) {
    ++a[db::measure_copy(d2, Basis::fourier, fast, rng)];
    ++b[db::measure_copy(d2, Basis::fourier, full, rng)];
  }
  // Two-sample chi-square over the union of outcomes.
  std::map<std::vector<int>, int> keys = a;
  for (auto& [k, v] : b) keys[k] += 0;
  double chi = 0;
  for (auto& [k, _] : keys) {
    double x = a[k], y = b[k];
    if (x + y > 0) chi += (x - y) * (x - y) / (x + y);
  }
  // At most 8 degrees of freedom; the 0.999 quantile there is 26.1.
  CHECK(keys.size() <= 9);
  CHECK(chi < 30);
}

TEST_CASE("product copies fail the Fourier test at rate 1 - m^(1-N)") {
  Rng rng(3);
  db::DualBasisParams p{3, 2, 1, false};
  db::Copy bad{db::CopyKind::d1, true, {1, 1, 0}, false};
  int caught = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    auto o = db::measure_copy(bad, Basis::fourier, p, rng);
    if (!std::all_of(o.begin(), o.end(), [&](int x) { return x == o[0]; })) ++caught;
  }
  double want = 1 - std::pow(2.0, 1 - 3);
  CHECK(std::abs(double(caught) / n - want) < 4 * std::sqrt(want * (1 - want) / n));
}

TEST_CASE("honest protocol is correct for every vote vector") {
  Rng rng(4);
  for (bool full : {false, true})
    for (int N = 2; N <= 4; ++N)
      for (int mask = 0; mask < (1 << N); ++mask) {
        std::vector<int> votes(static_cast<std::size_t>(N));
        for (int k = 0; k < N; ++k) votes[static_cast<std::size_t>(k)] = (mask >> k) & 1;
        TallyResult x = run_honest({N, 2, 1, full}, votes, rng);
        CHECK_FALSE(x.bottom);
        CHECK(x.counts == histogram(votes, 2));
      }
}

TEST_CASE("cast, assemble and extraction") {
  db::BlankBallot b{{1, 0, 2}, 1};
  CHECK(db::cast(b, 2, 3) == std::vector<int>{1, 2, 2});
  CHECK_THROWS_AS(db::cast(b, 3, 3), DomainError);
  auto B = db::assemble({{1, 2}, {3, 4}});
  CHECK(B == db::VoteMatrix{{1, 3}, {2, 4}});
  CHECK(db::row_sums(B, 3) == std::vector<int>{1, 0});
  CHECK_THROWS_AS(db::assemble({{1, 2}, {}}), ProtocolOrderError);
  db::VoteMatrix pre{{0, 1}, {1, 0}}, post{{1, 1}, {1, 1}};
  CHECK(db::attack_extract_votes(pre, post, 2) == std::vector<int>{1, 1});
}

TEST_CASE("corrupted copies survive at the exact rate") {
  Rng rng(5);
  const int N = 4, t = 2, d0 = 2;
  db::DualBasisParams p{N, 2, d0, false};
  std::vector<bool> corrupted = {false, false, true, true};
  std::vector<int> order = {0, 1, 2, 3};
  const int n = 20000;
  int survived = 0;
  for (int i = 0; i < n; ++i) {
    db::StateSet set = db::attack_corrupt_setup(p, rng);
    auto cut = db::cut_and_choose(set, order, corrupted, rng);
    if (cut.corrupted_untested) ++survived;
  }
  double want = static_cast<double>(pr_win_given_bad(N, t, d0));
  CHECK(std::abs(double(survived) / n - want) < 3 * std::sqrt(want * (1 - want) / n));
}

TEST_CASE("sampling sequence puts corrupted voters last") {
  Rng rng(6);
  auto seq = db::sampling_sequence(db::SamplingOrder::adversary_last, {true, false, true, false}, rng);
  CHECK(seq == std::vector<int>{1, 3, 0, 2});
  CHECK(db::parse_sampling_order("random") == db::SamplingOrder::random);
  CHECK_THROWS_AS(db::parse_sampling_order("x"), ConfigError);
}

TEST_CASE("surviving corrupted setup reveals every vote") {
  Rng rng(7);
  int survived = 0;
  for (int trial = 0; trial < 400; ++trial) {
    db::DualBasisParams p{3, 3, 0, false};
    db::Session s(p, db::SamplingOrder::index);
    s.request_corrupt_setup(db::CorruptTarget::d1);
    s.mark_corrupted(2);
    s.setup(rng);
    if (!s.cut().accept || !s.cut().corrupted_untested) continue;
    ++survived;
    std::vector<int> votes = {static_cast<int>(rng.below(3)), static_cast<int>(rng.below(3)),
                              static_cast<int>(rng.below(3))};
    s.ballots().open_casting();
    for (int k = 0; k < 3; ++k) s.cast_honest(k, votes[static_cast<std::size_t>(k)], rng);
    s.ballots().close_casting();
    TallyResult x = s.tally(rng);
    CHECK_FALSE(x.bottom);
    db::VoteMatrix pre;
    for (int j : s.cut().remaining_d1) pre.push_back(s.states().d1[static_cast<std::size_t>(j)].digits);
    CHECK(db::attack_extract_votes(pre, s.broadcast(), 3) == votes);
  }
  CHECK(survived > 0);
}

TEST_CASE("abort attack recovers the victim's vote whenever it fires") {
  Rng rng(8);
  const int N = 4, trials = 3000;
  int fired = 0;
  for (int trial = 0; trial < trials; ++trial) {
    db::Session s({N, 2, 1, false}, db::SamplingOrder::index);
    db::AbortAdversary adv(db::AbortAdversary::Mode::random);
    GameView view{Game::qpriv, N, 2, 0.25, 1};
    adv.begin(view);
    adv.choose_votes(view, rng);
    std::vector<int> votes(N);
    for (auto& v : votes) v = static_cast<int>(rng.below(2));
    s.mark_corrupted(N - 1);
    s.setup(rng);
    s.ballots().open_casting();
    for (int k = 0; k < N - 1; ++k) s.cast_honest(k, votes[static_cast<std::size_t>(k)], rng);
    adv.cast_corrupted(N - 1, votes[N - 1], s, rng);
    s.ballots().close_casting();
    TallyResult x = s.tally(rng);
    adv.guess_beta(s, rng);
    CHECK(x.bottom == adv.fired());
    if (!adv.fired()) continue;
    ++fired;
    CHECK(adv.victim() < N - 1);
    CHECK(adv.recovered() == votes[static_cast<std::size_t>(adv.victim())]);
  }
  double rate = double(fired) / trials;
  CHECK(std::abs(rate - 0.5) < 3 * std::sqrt(0.25 / trials));
}

TEST_CASE("honest baseline on the session binding") {
  ExperimentConfig c;
  c.voters = 3;
  c.trials = 200;
  c.seed = 9;
  auto rep = run_exp_qint(c, make_adversary("honest", "dualbasis", json::object()),
                          make_protocol("dualbasis", 3, json{{"c", 3}}));
  CHECK(rep.wins == 0);
}
