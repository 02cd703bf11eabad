#include "qevote/travelball.hpp"

#include <algorithm>
#include <cmath>

#include "qevote/errors.hpp"

namespace qevote::travelball {

namespace {

int mod(int64_t a, int m) { return static_cast<int>(((a % m) + m) % m); }

}  // namespace

TravelState setup(int N, int M) {
  if (N < 1) throw ParameterError("travelball: N must be >= 1");
  if (M == 0) M = N + 1;
  if (M < N) throw ParameterError("travelball: M must be >= N");
  if (M < 2) throw ParameterError("travelball: M must be >= 2");
  checked_dimension({M, M});
  std::vector<cplx> a(static_cast<std::size_t>(M) * M);
  const double s = 1.0 / std::sqrt(static_cast<double>(M));
  for (int j = 0; j < M; ++j) a[static_cast<std::size_t>(j) * M + j] = s;
  return TravelState{PureState({M, M}, std::move(a)), 0, N, M};
}

TravelState cast(const TravelState& s, int v) {
  if (s.position >= s.voters) throw ProtocolOrderError("travelball: every voter has already cast");
  if (v != 0 && v != 1) throw DomainError("travelball: vote must be 0 or 1");
  TravelState r = s;
  if (v == 1) r.state = apply_unitary(s.state, gates::shift(s.M), {0});
  ++r.position;
  return r;
}

int64_t tally(const TravelState& s, Rng& rng) {
  if (s.position != s.voters) throw ProtocolOrderError("travelball: tally before every voter cast");
  MeasurementRecord a = measure_computational(s.state, 0, rng);
  MeasurementRecord b = measure_computational(a.collapsed, 1, rng);
  return mod(a.outcome - b.outcome, s.M);
}

int measure_ballot(TravelState& s, Rng& rng) {
  MeasurementRecord r = measure_computational(s.state, 0, rng);
  s.state = std::move(r.collapsed);
  return static_cast<int>(r.outcome);
}

TravelState attack_double_vote(const TravelState& s, int d) {
  if (d < 0) throw DomainError("travelball: d must be >= 0");
  if (s.position >= s.voters) throw ProtocolOrderError("travelball: every voter has already cast");
  TravelState r = s;
  if (d % s.M != 0) r.state = apply_unitary(s.state, gates::shift(s.M, d), {0});
  ++r.position;
  return r;
}

SandwichRun attack_collude_sandwich(const std::vector<int>& votes, int k, int M, Rng& rng, int gap) {
  const int N = static_cast<int>(votes.size());
  if (gap < 1) throw ParameterError("sandwich: gap must be >= 1");
  if (k < 1 || k + gap > N - 1) throw ParameterError("sandwich: colluders need positions k-1 and k+gap");
  TravelState s = setup(N, M);
  SandwichRun out;
  int a = 0, b = 0;
  for (int p = 0; p < N; ++p) {
    if (p == k + gap) b = measure_ballot(s, rng);
    s = cast(s, votes[static_cast<std::size_t>(p)]);
    if (p == k - 1) a = measure_ballot(s, rng);
    if (p >= k && p < k + gap) out.victims_total += votes[static_cast<std::size_t>(p)];
  }
  out.recovered = mod(b - a, s.M);
  out.tally = tally(s, rng);
  return out;
}

// ---------------------------------------------------------------------------

Session::Session(int N, int M) : N_(N), M_(M == 0 ? N + 1 : M) {
  travelball::setup(N_, M_);  // validates parameters
  init_register(N_);
}

void Session::setup(Rng&) {
  st_ = travelball::setup(N_, M_);
  result_ = -1;
}

void Session::hold(int voter) {
  if (!st_) throw ProtocolOrderError("travelball: setup has not run");
  if (ballots().written(voter)) throw ProtocolOrderError("travelball: voter already passed the ballot on");
}

void Session::cast_honest(int voter, int vote, Rng&) {
  hold(voter);
  *st_ = cast(*st_, vote);
  ballots().write(voter, {"passed", 0});
}

void Session::apply_yes(int voter, int times) {
  hold(voter);
  if (!is_corrupted(voter)) throw ConfigError("travelball: only a corrupted voter may deviate");
  if (times < 0) throw DomainError("travelball: negative shift count");
  if (times % M_ != 0) st_->state = apply_unitary(st_->state, gates::shift(M_, times), {0});
}

int Session::measure_ballot(int voter, Rng& rng) {
  hold(voter);
  if (!is_corrupted(voter)) throw ConfigError("travelball: only a corrupted voter may measure the ballot");
  return travelball::measure_ballot(*st_, rng);
}

TallyResult Session::tally(Rng& rng) {
  if (!st_) throw ProtocolOrderError("travelball: setup has not run");
  // Corrupted voters pass the ballot through apply_yes; count their turns here.
  st_->position = ballots().filled();
  result_ = travelball::tally(*st_, rng);
  return referendum_tally(result_, N_);
}

std::string Session::aux() const { return "tally=" + std::to_string(result_); }

// ---------------------------------------------------------------------------

std::vector<int> SandwichAdversary::choose_votes(const GameView& view, Rng&) {
  votes_.assign(static_cast<std::size_t>(view.voters), 0);
  for (int k = 0; k < view.voters; ++k) votes_[static_cast<std::size_t>(k)] = (k >> 1) & 1;
  return votes_;
}

std::vector<int> SandwichAdversary::choose_permutation(const GameView& view, const std::vector<int>&, Rng&) {
  std::vector<int> src(static_cast<std::size_t>(view.voters));
  for (int k = 0; k < view.voters; ++k) src[static_cast<std::size_t>(k)] = partner(k, view.voters);
  return src;
}

void SandwichAdversary::tamper_setup(qevote::Session& s, Rng&) {
  const std::vector<int>& order = s.leaked_order();
  const int N = s.voters();
  team_.assign(static_cast<std::size_t>(N), false);
  for (int i = 1; i + 1 < N; ++i) {
    int v = order[static_cast<std::size_t>(i)];
    int pre = order[static_cast<std::size_t>(i) - 1], post = order[static_cast<std::size_t>(i) + 1];
    int pv = partner(v, N);
    if (pv == v || pv == pre || pv == post) continue;
    std::vector<bool> team(static_cast<std::size_t>(N), false);
    for (int k : {pre, post, partner(pre, N), partner(post, N)}) team[static_cast<std::size_t>(k)] = true;
    if (std::count(team.begin(), team.end(), true) > view_.budget) continue;
    victim_ = v;
    pre_ = pre;
    post_ = post;
    team_ = std::move(team);
    return;
  }
}

bool SandwichAdversary::corrupt(int voter, qevote::Session&, Rng&) {
  return victim_ >= 0 && team_[static_cast<std::size_t>(voter)];
}

void SandwichAdversary::cast_corrupted(int voter, int vote, qevote::Session& s, Rng& rng) {
  auto& tb = dynamic_cast<Session&>(s);
  if (voter == post_) b_ = tb.measure_ballot(voter, rng);
  tb.apply_yes(voter, vote);
  if (voter == pre_) a_ = tb.measure_ballot(voter, rng);
  tb.ballots().write(voter, {"passed", 0});
}

int SandwichAdversary::guess_beta(qevote::Session& s, Rng& rng) {
  if (victim_ < 0 || a_ < 0 || b_ < 0 || votes_.empty()) return rng.coin() ? 1 : 0;
  int M = dynamic_cast<Session&>(s).dimension();
  int recovered = mod(b_ - a_, M);
  return recovered == votes_[static_cast<std::size_t>(victim_)] ? 0 : 1;
}

std::string SandwichAdversary::aux() const {
  return "victim=" + std::to_string(victim_) + ";a=" + std::to_string(a_) + ";b=" + std::to_string(b_);
}

std::vector<int> DoubleVoteAdversary::choose_votes(const GameView& view, Rng&) {
  return std::vector<int>(static_cast<std::size_t>(view.voters), 0);
}

bool DoubleVoteAdversary::corrupt(int, qevote::Session&, Rng&) {
  if (used_) return false;
  used_ = true;
  return true;
}

void DoubleVoteAdversary::cast_corrupted(int voter, int, qevote::Session& s, Rng&) {
  auto& tb = dynamic_cast<Session&>(s);
  tb.apply_yes(voter, applications_);
  tb.ballots().write(voter, {"passed", 0});
}

}  // namespace qevote::travelball
