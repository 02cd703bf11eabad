#include "qevote/distball.hpp"

#include <algorithm>
#include <cmath>

#include "qevote/errors.hpp"

namespace qevote::distball {

namespace {

int mod(int64_t a, int m) { return static_cast<int>(((a % m) + m) % m); }

double wrap(double a) {
  double r = std::fmod(a, kTwoPi);
  return r < 0.0 ? r + kTwoPi : r;
}

// Samples q from |<Omega_q|psi>|^2 given the GHZ coefficients c_j (unit
// modulus up to numerics). Tries the dominant q first so a sharp state costs O(D).
std::optional<int> sample_q(const std::vector<cplx>& c, Rng& rng) {
  const int D = static_cast<int>(c.size());
  std::vector<cplx> root(static_cast<std::size_t>(D));
  for (int k = 0; k < D; ++k) root[static_cast<std::size_t>(k)] = std::polar(1.0, -kTwoPi * k / D);
  auto prob = [&](int q) {
    cplx acc = 0.0;
    for (int j = 0; j < D; ++j)
      acc += root[static_cast<std::size_t>((static_cast<int64_t>(j) * q) % D)] * c[static_cast<std::size_t>(j)];
    return std::norm(acc) / (static_cast<double>(D) * D);
  };
  double norm = 0.0;
  for (const auto& x : c) norm += std::norm(x);
  norm /= D;
  int guess = 0;
  if (D > 1 && std::abs(c[0]) > 0.0) guess = mod(std::lround(std::arg(c[1] / c[0]) * D / kTwoPi), D);
  const double u = rng.uniform() * std::max(norm, 1.0);
  double acc = prob(guess);
  if (u < acc) return guess;
  for (int q = 0; q < D; ++q) {
    if (q == guess) continue;
    acc += prob(q);
    if (u < acc) return q;
  }
  return std::nullopt;
}

class CompactState : public BallotState {
 public:
  CompactState(int D, int N) : D_(D), step_(static_cast<std::size_t>(D) + 1, 0.0) {
    if (D < 2) throw ParameterError("distball: D must be >= 2");
    if (N < 1) throw ParameterError("distball: N must be >= 1");
  }
  int cast(double theta, Rng& rng, double extra, double correct) override {
    const int r = static_cast<int>(rng.below(static_cast<uint64_t>(D_)));
    const double t = theta + extra;
    // e^{i t ((j - r) mod D)} = e^{i t j} e^{-i t r} e^{i D t [j < r]}
    lin_ = wrap(lin_ + t);
    phase_below(r, static_cast<double>(D_) * t);
    phase_below(r, correct);
    ++casts_;
    return r;
  }
  void phase_below(int r, double angle) override {
    if (r <= 0) return;
    step_[0] = wrap(step_[0] + angle);
    step_[static_cast<std::size_t>(r)] = wrap(step_[static_cast<std::size_t>(r)] - angle);
  }
  void phase_linear(double angle) override { lin_ = wrap(lin_ + angle); }
  std::optional<int> measure_q(Rng& rng) override { return sample_q(coefficients(), rng); }
  std::vector<cplx> coefficients() const override {
    std::vector<cplx> c(static_cast<std::size_t>(D_));
    double s = 0.0;
    for (int j = 0; j < D_; ++j) {
      s = wrap(s + step_[static_cast<std::size_t>(j)]);
      c[static_cast<std::size_t>(j)] = std::polar(1.0, wrap(lin_ * j) + s);
    }
    const cplx c0 = c[0];
    for (auto& x : c) x /= c0;
    return c;
  }
  int cast_count() const override { return casts_; }

 private:
  int D_;
  double lin_ = 0.0;
  std::vector<double> step_;  // difference array of the piecewise-constant phase
  int casts_ = 0;
};

class FullState : public BallotState {
 public:
  FullState(int D, int N) : D_(D), N_(N), s_(make_ghz_phase_state(N, D, [](int) { return 0.0; })) {
    if (D < 2) throw ParameterError("distball: D must be >= 2");
    checked_dimension(std::vector<int>(static_cast<std::size_t>(2 * N), D));
  }
  int cast(double theta, Rng& rng, double extra, double correct) override {
    if (casts_ >= N_) throw ProtocolOrderError("distball: every ballot qudit has been cast");
    const int ballot = casts_;
    const double t = theta + extra;
    std::vector<cplx> opt(static_cast<std::size_t>(D_));
    for (int j = 0; j < D_; ++j) opt[static_cast<std::size_t>(j)] = std::polar(1.0 / std::sqrt(D_), t * j);
    s_ = s_.tensor(PureState({D_}, std::move(opt)));
    const int option = s_.qudits() - 1;
    MeasurementRecord rec = measure_partition(
        s_,
        [&](std::size_t idx) { return mod(s_.digit(idx, ballot) - s_.digit(idx, option), D_); },
        D_, Basis::r_pair, rng);
    s_ = std::move(rec.collapsed);
    const int r = static_cast<int>(rec.outcome);
    s_ = apply_unitary(s_, gates::shift(D_, r), {option});
    if (correct != 0.0 && r > 0) {
      std::vector<cplx> ph(static_cast<std::size_t>(D_), 1.0);
      for (int j = 0; j < r; ++j) ph[static_cast<std::size_t>(j)] = std::polar(1.0, correct);
      s_ = apply_diagonal(s_, ph, option);
    }
    ++casts_;
    return r;
  }
  void phase_below(int r, double angle) override {
    std::vector<cplx> ph(static_cast<std::size_t>(D_), 1.0);
    for (int j = 0; j < std::min(r, D_); ++j) ph[static_cast<std::size_t>(j)] = std::polar(1.0, angle);
    s_ = apply_diagonal(s_, ph, 0);
  }
  void phase_linear(double angle) override {
    std::vector<cplx> ph(static_cast<std::size_t>(D_));
    for (int j = 0; j < D_; ++j) ph[static_cast<std::size_t>(j)] = std::polar(1.0, wrap(angle * j));
    s_ = apply_diagonal(s_, ph, 0);
  }
  std::optional<int> measure_q(Rng& rng) override {
    std::vector<cplx> c(static_cast<std::size_t>(D_));
    for (int j = 0; j < D_; ++j) c[static_cast<std::size_t>(j)] = ghz(j) * std::sqrt(static_cast<double>(D_));
    return sample_q(c, rng);
  }
  std::vector<cplx> coefficients() const override {
    std::vector<cplx> c(static_cast<std::size_t>(D_));
    for (int j = 0; j < D_; ++j) c[static_cast<std::size_t>(j)] = ghz(j);
    const cplx c0 = c[0];
    for (auto& x : c) x /= c0;
    return c;
  }
  int cast_count() const override { return casts_; }

 private:
  cplx ghz(int j) const {
    std::size_t idx = 0;
    for (int q = 0; q < s_.qudits(); ++q) idx += static_cast<std::size_t>(j) * s_.stride(q);
    return s_.amps()[idx];
  }
  int D_, N_;
  PureState s_;
  int casts_ = 0;
};

}  // namespace

int DistBallotParams::diff() const { return mod(l_y - l_n, D); }

double DistBallotParams::theta(Option v) const {
  return kTwoPi * (v == Option::yes ? l_y : l_n) / D + delta;
}

void validate(const DistBallotParams& p) {
  if (p.N < 1) throw ParameterError("distball: N must be >= 1");
  if (p.D <= p.N) throw ParameterError("distball: D must exceed N (q decoding breaks otherwise)");
  if (p.l_y < 0 || p.l_y >= p.D || p.l_n < 0 || p.l_n >= p.D) throw ParameterError("distball: l_v outside Z_D");
  if (!(p.delta >= 0.0 && p.delta < kTwoPi / p.D)) throw ParameterError("distball: delta outside [0, 2 pi / D)");
  if (p.diff() == 0 || static_cast<int64_t>(p.N) * p.diff() >= p.D)
    throw ParameterError("distball: need 0 < N ((l_y - l_n) mod D) < D");
}

DistBallotParams draw_params(int D, int N, Rng& rng) {
  if (N < 1) throw ParameterError("distball: N must be >= 1");
  if (D <= N) throw ParameterError("distball: D must exceed N (q decoding breaks otherwise)");
  DistBallotParams p;
  p.D = D;
  p.N = N;
  p.l_y = static_cast<int>(rng.below(static_cast<uint64_t>(D)));
  const int max_diff = (D - 1) / N;
  const int diff = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(max_diff)));
  p.l_n = mod(p.l_y - diff, D);
  p.delta = rng.uniform() * (kTwoPi / D);
  validate(p);
  return p;
}

std::optional<int64_t> decode(int q, const DistBallotParams& p) {
  const int diff = p.diff();
  for (int64_t m = 0; m < p.D; ++m)
    if (mod(m * diff, p.D) == mod(q, p.D)) return m;
  return std::nullopt;
}

double transfer_angle(int d, int lhat, int D) { return static_cast<double>(d) * kTwoPi * lhat / D; }

std::unique_ptr<BallotState> make_compact(int D, int N) { return std::make_unique<CompactState>(D, N); }
std::unique_ptr<BallotState> make_full(int D, int N) { return std::make_unique<FullState>(D, N); }

RoundTally tally(BallotState& s, const std::vector<int>& r, const DistBallotParams& p, Rng& rng) {
  if (s.cast_count() != static_cast<int>(r.size())) throw ProtocolOrderError("distball: tally before every voter cast");
  for (int rk : r) s.phase_below(rk, -static_cast<double>(p.D) * p.delta);
  s.phase_linear(-static_cast<double>(r.size()) * p.theta(Option::no));
  RoundTally t;
  t.q = s.measure_q(rng);
  if (t.q) t.m = decode(*t.q, p);
  return t;
}

Estimation algorithm1(const std::vector<double>& samples, int D) {
  if (D < 2) throw ParameterError("algorithm1: D must be >= 2");
  if (samples.empty()) throw EstimatorEmpty("algorithm1: no samples");
  Estimation e;
  e.record.assign(static_cast<std::size_t>(D), 0);
  for (double y : samples) ++e.record[static_cast<std::size_t>(grid_bin(y, D))];
  const int64_t n = static_cast<int64_t>(samples.size());
  for (int l = 0; l < D; ++l) {
    if (5 * e.record[static_cast<std::size_t>(l)] < 2 * n) continue;
    if (e.solution.size() == 2) throw EstimatorOverflow("algorithm1: three or more bins over the threshold");
    e.solution.push_back(l);
  }
  if (e.solution.empty()) throw EstimatorEmpty("algorithm1: no bin over the threshold");
  if (e.solution.size() == 2 && e.solution[0] == 0 && e.solution[1] == D - 1) std::swap(e.solution[0], e.solution[1]);
  e.ltilde = e.solution[0];
  return e;
}

DifferenceEstimate attack_estimate_difference(const std::vector<double>& yes, const std::vector<double>& no, int D) {
  DifferenceEstimate out;
  out.yes = algorithm1(yes, D);
  out.no = algorithm1(no, D);
  out.lhat = mod(out.yes.ltilde - out.no.ltilde, D);
  return out;
}

int attack_d_transfer(BallotState& s, const DistBallotParams& p, int d, int lhat, Rng& rng) {
  const double extra = transfer_angle(d, lhat, p.D);
  return s.cast(p.theta(Option::yes), rng, extra, -static_cast<double>(p.D) * extra);
}

int clamp_transfer(int d, int D, int N) { return std::max(0, std::min(d, D - 1 - N)); }

MultiRoundResult multi_round(const MultiRoundConfig& cfg, Rng& rng) {
  if (cfg.rounds < 1) throw ParameterError("multi_round: rounds must be >= 1");
  if (cfg.retainers < 0 || cfg.d < 0) throw ParameterError("multi_round: negative retainer count or d");
  const int N = cfg.retainers + 1 + static_cast<int>(cfg.honest_votes.size());
  MultiRoundResult res;
  res.d = clamp_transfer(cfg.d, cfg.D, N);
  int yes = 1;
  for (int i = 0; i < cfg.retainers; ++i) yes += (i % 2 == 0) ? 1 : 0;
  for (int v : cfg.honest_votes) {
    if (v != 0 && v != 1) throw DomainError("multi_round: votes must be 0 or 1");
    yes += v;
  }
  res.honest_m = yes;

  for (int round = 0; round < cfg.rounds; ++round) {
    Rng rr(rng.next_u64());
    DistBallotParams p = draw_params(cfg.D, N, rr);
    auto state = cfg.full_state ? make_full(cfg.D, N) : make_compact(cfg.D, N);
    std::vector<int> r;
    std::vector<double> kept_yes, kept_no;
    for (int i = 0; i < cfg.retainers; ++i) {
      Option v = (i % 2 == 0) ? Option::yes : Option::no;
      r.push_back(state->cast(p.theta(v), rr));
      Option other = v == Option::yes ? Option::no : Option::yes;
      (other == Option::yes ? kept_yes : kept_no).push_back(povm_theta_sample(cfg.D, p.theta(other), rr));
    }
    RoundReport rep;
    try {
      DifferenceEstimate est = attack_estimate_difference(kept_yes, kept_no, cfg.D);
      rep.lhat = est.lhat;
      rep.cheat = est.lhat == p.diff();
      r.push_back(attack_d_transfer(*state, p, res.d, est.lhat, rr));
    } catch (const EstimatorOverflow&) {
      rep.estimator_failed = true;
    } catch (const EstimatorEmpty&) {
      rep.estimator_failed = true;
    }
    if (rep.estimator_failed) r.push_back(state->cast(p.theta(Option::yes), rr));
    for (int v : cfg.honest_votes) r.push_back(state->cast(p.theta(v ? Option::yes : Option::no), rr));
    rep.m = tally(*state, r, p, rr).m;
    res.rounds.push_back(rep);
  }
  res.outcome = res.rounds[0].m;
  for (const auto& rep : res.rounds)
    if (!rep.m || rep.m != res.outcome) res.outcome.reset();
  return res;
}

// ---------------------------------------------------------------------------

Session::Session(int N, int D, int rounds, bool full_state) : N_(N), D_(D), rounds_(rounds), full_(full_state) {
  if (N < 1) throw ParameterError("distball: N must be >= 1");
  if (D <= N) throw ParameterError("distball: D must exceed N (q decoding breaks otherwise)");
  if (rounds < 1) throw ParameterError("distball: rounds must be >= 1");
  if (full_state) checked_dimension(std::vector<int>(static_cast<std::size_t>(2 * N), D));
  init_register(N);
}

void Session::setup(Rng& rng) {
  params_.clear();
  states_.clear();
  r_.assign(static_cast<std::size_t>(rounds_), {});
  used_.assign(static_cast<std::size_t>(rounds_), std::vector<uint8_t>(static_cast<std::size_t>(2 * N_), 0));
  round_m_.clear();
  for (int k = 0; k < rounds_; ++k) {
    Rng rr(rng.next_u64());
    params_.push_back(draw_params(D_, N_, rr));
    states_.push_back(full_ ? make_full(D_, N_) : make_compact(D_, N_));
  }
}

void Session::take(int voter, int round, Option v) {
  if (params_.empty()) throw ProtocolOrderError("distball: setup has not run");
  if (round < 0 || round >= rounds_) throw IndexError("distball: round out of range");
  if (voter < 0 || voter >= N_) throw IndexError("distball: voter out of range");
  if (ballots().written(voter)) throw ProtocolOrderError("distball: voter already returned the ballot");
  auto& u = used_[static_cast<std::size_t>(round)];
  const std::size_t slot = static_cast<std::size_t>(2 * voter + static_cast<int>(v));
  if (u[slot]) throw ProtocolOrderError("distball: option qudit already consumed");
  u[slot] = 1;
}

void Session::cast_honest(int voter, int vote, Rng& rng) {
  if (vote != 0 && vote != 1) throw DomainError("distball: vote must be 0 or 1");
  Option v = vote ? Option::yes : Option::no;
  for (int k = 0; k < rounds_; ++k) {
    take(voter, k, v);
    r_[static_cast<std::size_t>(k)].push_back(states_[static_cast<std::size_t>(k)]->cast(
        params_[static_cast<std::size_t>(k)].theta(v), rng));
  }
  ballots().write(voter, {"cast", voter});
}

double Session::measure_option(int voter, int round, Option v, Rng& rng) {
  if (!is_corrupted(voter)) throw ConfigError("distball: only a corrupted voter keeps option qudits");
  take(voter, round, v);
  return povm_theta_sample(D_, params_[static_cast<std::size_t>(round)].theta(v), rng);
}

void Session::cast_option(int voter, int round, Option v, int d, int lhat, Rng& rng) {
  if (!is_corrupted(voter)) throw ConfigError("distball: only a corrupted voter may deviate");
  take(voter, round, v);
  const auto& p = params_[static_cast<std::size_t>(round)];
  auto& s = *states_[static_cast<std::size_t>(round)];
  const double extra = transfer_angle(d, lhat, D_);
  r_[static_cast<std::size_t>(round)].push_back(s.cast(p.theta(v), rng, extra, -static_cast<double>(D_) * extra));
}

void Session::finish_voter(int voter) { ballots().write(voter, {"cast", voter}); }

TallyResult Session::tally(Rng& rng) {
  if (params_.empty()) throw ProtocolOrderError("distball: setup has not run");
  for (int k = 0; k < rounds_; ++k)
    if (static_cast<int>(r_[static_cast<std::size_t>(k)].size()) != N_)
      return TallyResult::abort("a voter did not return a valid ballot");
  round_m_.clear();
  for (int k = 0; k < rounds_; ++k)
    round_m_.push_back(distball::tally(*states_[static_cast<std::size_t>(k)], r_[static_cast<std::size_t>(k)],
                                       params_[static_cast<std::size_t>(k)], rng)
                           .m);
  for (const auto& m : round_m_)
    if (!m || m != round_m_[0]) return TallyResult::abort("rounds disagree");
  return referendum_tally(*round_m_[0], N_);
}

std::string Session::aux() const {
  std::string s = "rounds_m=";
  for (std::size_t k = 0; k < round_m_.size(); ++k) {
    if (k) s += "/";
    s += round_m_[k] ? std::to_string(*round_m_[k]) : "bottom";
  }
  return s;
}

// ---------------------------------------------------------------------------

std::vector<int> DTransferAdversary::choose_votes(const GameView& view, Rng&) {
  std::vector<int> v(static_cast<std::size_t>(view.voters));
  for (int k = 0; k < view.voters; ++k) v[static_cast<std::size_t>(k)] = k % 2;
  return v;
}

bool DTransferAdversary::corrupt(int, qevote::Session&, Rng&) {
  if (seen_ >= view_.budget) return false;
  ++seen_;
  return true;
}

void DTransferAdversary::cast_corrupted(int voter, int, qevote::Session& s, Rng& rng) {
  auto& db = dynamic_cast<Session&>(s);
  const int rounds = db.rounds();
  if (yes_.empty()) {
    yes_.resize(static_cast<std::size_t>(rounds));
    no_.resize(static_cast<std::size_t>(rounds));
  }
  const int idx = seen_ - 1;
  if (idx < view_.budget - 1) {
    Option v = (idx % 2 == 0) ? Option::yes : Option::no;
    Option other = v == Option::yes ? Option::no : Option::yes;
    if (v == Option::yes) ++retained_yes_;
    for (int k = 0; k < rounds; ++k) {
      db.cast_option(voter, k, v, 0, 0, rng);
      double y = db.measure_option(voter, k, other, rng);
      (other == Option::yes ? yes_ : no_)[static_cast<std::size_t>(k)].push_back(y);
    }
  } else {
    // Counted yes-votes of the coalition become budget + 1, one more than it may cast.
    d_ = clamp_transfer(view_.budget - retained_yes_, db.dimension(), db.voters());
    for (int k = 0; k < rounds; ++k) {
      try {
        auto est = attack_estimate_difference(yes_[static_cast<std::size_t>(k)], no_[static_cast<std::size_t>(k)],
                                              db.dimension());
        if (est.lhat == db.true_difference(k)) ++cheats_;
        db.cast_option(voter, k, Option::yes, d_, est.lhat, rng);
      } catch (const EstimatorOverflow&) {
        ++failures_;
        db.cast_option(voter, k, Option::yes, 0, 0, rng);
      } catch (const EstimatorEmpty&) {
        ++failures_;
        db.cast_option(voter, k, Option::yes, 0, 0, rng);
      }
    }
  }
  db.finish_voter(voter);
}

std::string DTransferAdversary::aux() const {
  return "d=" + std::to_string(d_) + ";cheat_rounds=" + std::to_string(cheats_) +
         ";estimator_failures=" + std::to_string(failures_);
}

}  // namespace qevote::distball
