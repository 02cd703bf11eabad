#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qevote/harness.hpp"
#include "qevote/qcore.hpp"

namespace qevote::distball {

enum class Option { no = 0, yes = 1 };

struct DistBallotParams {
  int D = 0;
  int N = 0;
  int l_y = 0;
  int l_n = 0;
  double delta = 0.0;  // in [0, 2 pi / D)

  int diff() const;  // (l_y - l_n) mod D
  double theta(Option v) const;
  double grid(int l) const { return kTwoPi * l / D; }
};

// Fresh tallier secrets. diff is uniform on {1, ..., floor((D-1)/N)}.
DistBallotParams draw_params(int D, int N, Rng& rng);
void validate(const DistBallotParams& p);

// Smallest m in [0, D) with m * diff = q (mod D), or nullopt.
std::optional<int64_t> decode(int q, const DistBallotParams& p);

// Phase angle per |j> added by C_d for a difference estimate lhat.
double transfer_angle(int d, int lhat, int D);

// Global ballot state (1/sqrt D) sum_j c_j |j>^{(x) n}. Two realizations: a
// compact one tracking the c_j only, and a full state vector (the oracle).
class BallotState {
 public:
  virtual ~BallotState() = default;
  // Appends option qudit |psi(theta)> with C_d angle `extra`, measures R,
  // corrects with U_r and finally applies Correct_r with angle `correct`
  // (both zero for an honest voter). Returns r.
  virtual int cast(double theta, Rng& rng, double extra = 0.0, double correct = 0.0) = 0;
  // Multiplies the j < r block by e^{i angle}.
  virtual void phase_below(int r, double angle) = 0;
  // Multiplies |j> by e^{i j angle}.
  virtual void phase_linear(double angle) = 0;
  // Measures in the |Omega_q> family; nullopt when the state leaves it.
  virtual std::optional<int> measure_q(Rng& rng) = 0;
  // c_j normalized so that c_0 = 1 when |c_0| > 0.
  virtual std::vector<cplx> coefficients() const = 0;
  virtual int cast_count() const = 0;
};

std::unique_ptr<BallotState> make_compact(int D, int N);
std::unique_ptr<BallotState> make_full(int D, int N);

struct RoundTally {
  std::optional<int> q;
  std::optional<int64_t> m;
};

// W_k for every announced r_k, strip e^{-i j N theta_n}, measure, decode.
RoundTally tally(BallotState& s, const std::vector<int>& r, const DistBallotParams& p, Rng& rng);

struct Estimation {
  std::vector<int64_t> record;
  std::vector<int> solution;  // at most two entries, scan order after the wrap swap
  int ltilde = -1;
};

// Record/Solution estimator over POVM angles; 40% threshold.
Estimation algorithm1(const std::vector<double>& samples, int D);

struct DifferenceEstimate {
  Estimation yes, no;
  int lhat = 0;
};

DifferenceEstimate attack_estimate_difference(const std::vector<double>& yes, const std::vector<double>& no, int D);

// Cast of the transferring voter: yes option with C_d and Correct_r from lhat.
int attack_d_transfer(BallotState& s, const DistBallotParams& p, int d, int lhat, Rng& rng);

// Largest admissible d so that every reachable m + d stays below D.
int clamp_transfer(int d, int D, int N);

struct RoundReport {
  std::optional<int64_t> m;
  int lhat = -1;
  bool cheat = false;  // lhat equals the true difference
  bool estimator_failed = false;
};

struct MultiRoundResult {
  std::vector<RoundReport> rounds;
  std::optional<int64_t> outcome;  // common tally, nullopt on disagreement or abort
  int64_t honest_m = 0;            // yes-count with every voter honest
  int d = 0;
};

// A corrupted block of `retainers` voters (alternating yes/no, keeping the other
// option qudit for the estimator) plus one transferring voter, followed by the
// honest voters' `honest_votes`. Fresh secrets every round.
struct MultiRoundConfig {
  int D = 0;
  int retainers = 0;
  std::vector<int> honest_votes;
  int d = 1;
  int rounds = 1;
  bool full_state = false;
};

MultiRoundResult multi_round(const MultiRoundConfig& cfg, Rng& rng);

class Session : public qevote::Session {
 public:
  Session(int N, int D, int rounds, bool full_state);
  std::string protocol() const override { return "distball"; }
  int voters() const override { return N_; }
  int candidates() const override { return 2; }
  Capabilities capabilities() const override { return {false, false, false}; }
  bool ballots_at_setup() const override { return false; }
  void setup(Rng& rng) override;
  void cast_honest(int voter, int vote, Rng& rng) override;
  TallyResult tally(Rng& rng) override;
  std::string aux() const override;

  int rounds() const { return rounds_; }
  int dimension() const { return D_; }
  // Ports for corrupted voters, per round.
  double measure_option(int voter, int round, Option v, Rng& rng);
  void cast_option(int voter, int round, Option v, int d, int lhat, Rng& rng);
  void finish_voter(int voter);
  // Challenger-side view for reporting.
  int true_difference(int round) const { return params_[static_cast<std::size_t>(round)].diff(); }

 private:
  void take(int voter, int round, Option v);
  int N_, D_, rounds_;
  bool full_;
  std::vector<DistBallotParams> params_;
  std::vector<std::unique_ptr<BallotState>> states_;
  std::vector<std::vector<int>> r_;
  std::vector<std::vector<uint8_t>> used_;  // [round][2*voter + option]
  std::vector<std::optional<int64_t>> round_m_;
};

// Retains option qudits, estimates l_y - l_n each round and shifts d votes.
class DTransferAdversary : public Adversary {
 public:
  std::string name() const override { return "distball-dtransfer"; }
  std::vector<int> choose_votes(const GameView& view, Rng& rng) override;
  bool corrupt(int voter, qevote::Session& s, Rng& rng) override;
  void cast_corrupted(int voter, int vote, qevote::Session& s, Rng& rng) override;
  std::string aux() const override;

 private:
  int seen_ = 0;
  int retained_yes_ = 0;
  std::vector<std::vector<double>> yes_, no_;
  int d_ = 0;
  int cheats_ = 0;
  int failures_ = 0;
};

}  // namespace qevote::distball
