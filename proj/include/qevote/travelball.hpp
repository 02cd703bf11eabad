#pragma once

#include <optional>
#include <vector>

#include "qevote/harness.hpp"
#include "qevote/qcore.hpp"

namespace qevote::travelball {

// Ballot qudit V (index 0) and tallier qudit T (index 1), both of dimension M.
struct TravelState {
  PureState state;
  int position = 0;  // voters that have already held the ballot
  int voters = 0;
  int M = 0;
};

// M = 0 selects the default N + 1.
TravelState setup(int N, int M = 0);
TravelState cast(const TravelState& s, int v);
int64_t tally(const TravelState& s, Rng& rng);

// Computational measurement of the ballot qudit, as done by a colluding voter.
int measure_ballot(TravelState& s, Rng& rng);

// Applies the yes-shift d times at the current position.
TravelState attack_double_vote(const TravelState& s, int d);

struct SandwichRun {
  int recovered = 0;  // (b - a) mod M
  int victims_total = 0;
  int64_t tally = 0;
};

// Full run where the voters at positions k-1 and k+gap collude around the
// `gap` voters in between (gap = 1: a single victim at position k).
SandwichRun attack_collude_sandwich(const std::vector<int>& votes, int k, int M, Rng& rng, int gap = 1);

class Session : public qevote::Session {
 public:
  Session(int N, int M);
  std::string protocol() const override { return "travelball"; }
  int voters() const override { return N_; }
  int candidates() const override { return 2; }
  Capabilities capabilities() const override { return {true, false, false}; }
  bool ballots_at_setup() const override { return false; }
  void setup(Rng& rng) override;
  void cast_honest(int voter, int vote, Rng& rng) override;
  TallyResult tally(Rng& rng) override;
  std::string aux() const override;

  // Ports for the voter currently holding the ballot.
  void apply_yes(int voter, int times);
  int measure_ballot(int voter, Rng& rng);
  int dimension() const { return M_; }

 private:
  void hold(int voter);
  int N_, M_;
  std::optional<TravelState> st_;
  int64_t result_ = -1;
};

// Colluders sandwich one honest voter and read the vote off two measurements.
class SandwichAdversary : public Adversary {
 public:
  std::string name() const override { return "travelball-sandwich"; }
  std::vector<int> choose_votes(const GameView& view, Rng& rng) override;
  std::vector<int> choose_permutation(const GameView& view, const std::vector<int>& votes, Rng& rng) override;
  void tamper_setup(qevote::Session& s, Rng& rng) override;
  bool corrupt(int voter, qevote::Session& s, Rng& rng) override;
  void cast_corrupted(int voter, int vote, qevote::Session& s, Rng& rng) override;
  int guess_beta(qevote::Session& s, Rng& rng) override;
  std::string aux() const override;

 private:
  // Pairs two voters apart, so a victim's partner is never an adjacent caster
  // under the default order.
  static int partner(int k, int N) { return (k ^ 2) < N ? (k ^ 2) : k; }
  std::vector<int> votes_;
  std::vector<bool> team_;
  int victim_ = -1, pre_ = -1, post_ = -1;
  int a_ = -1, b_ = -1;
};

// One corrupted voter applies the yes-shift `applications` times.
class DoubleVoteAdversary : public Adversary {
 public:
  explicit DoubleVoteAdversary(int applications = 2) : applications_(applications) {}
  std::string name() const override { return "travelball-double-vote"; }
  std::vector<int> choose_votes(const GameView& view, Rng& rng) override;
  bool corrupt(int voter, qevote::Session& s, Rng& rng) override;
  void cast_corrupted(int voter, int vote, qevote::Session& s, Rng& rng) override;

 private:
  int applications_;
  bool used_ = false;
};

}  // namespace qevote::travelball
