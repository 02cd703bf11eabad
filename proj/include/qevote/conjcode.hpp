#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qevote/harness.hpp"
#include "qevote/qcore.hpp"

namespace qevote::conjcode {

// b_i = 0: computational basis, 1: Hadamard basis, per qubit position.
using BasisVector = std::vector<int>;

struct BallotFragment {
  PureState state;     // n+1 qubits
  std::vector<int> a;  // generating bits, kept by the challenger
};

struct Ballot {
  int n = 0;
  std::vector<BallotFragment> fragments;
  int voter = -1;  // challenger-side only
  int w() const { return static_cast<int>(fragments.size()); }
};

BasisVector random_basis(int n, Rng& rng);

// Single qubit |psi_{a,b}>: |0>, |1>, |+>, |->.
PureState bb84_state(int a, int b);

// Fresh fragment with generating bits `a` (parity is the caller's business).
BallotFragment make_fragment(const std::vector<int>& a, const BasisVector& b);

Ballot make_blank_ballot(int n, int w, const BasisVector& b, Rng& rng);
Ballot rerandomize(const Ballot& ballot, Rng& rng);
// Y on the (n+1)-th qubit of the trailing fragments; bits[r] targets fragment w-m+r.
Ballot encode_vote(const Ballot& ballot, const std::vector<int>& bits);
// One decoded bit per fragment.
std::vector<int> tally_decode(const Ballot& ballot, const BasisVector& b, Rng& rng);
Ballot attack_malleate(const Ballot& ballot, const std::vector<int>& mask);

// EA-side tagging: head fragment j decodes to tag[j].
Ballot attack_serial_number(int n, int w, const BasisVector& b, const std::vector<int>& tag, Rng& rng);
std::vector<int> serial_tag(int id, int width);
int read_serial(const std::vector<int>& decoded, int width);

int candidate_bits(int candidates);
int default_fragments(int n);  // 4(n+1)
// Big-endian candidate value of the trailing m bits.
int candidate_of(const std::vector<int>& decoded, int m);
std::vector<int> candidate_field(int candidate, int m);

// The unforgeability game is an assumption of the scheme, not simulated.
inline const char* one_more_unforgeability() { return "assumption"; }

class Session : public qevote::Session {
 public:
  // w = 0 selects default_fragments(n).
  Session(int N, int n, int w, int candidates);
  std::string protocol() const override { return "conjcode"; }
  int voters() const override { return N_; }
  int candidates() const override { return c_; }
  Capabilities capabilities() const override { return {false, true, true}; }
  bool ballots_at_setup() const override { return true; }
  void setup(Rng& rng) override;
  void cast_honest(int voter, int vote, Rng& rng) override;
  TallyResult tally(Rng& rng) override;
  std::string aux() const override;

  int field_bits() const { return m_; }
  int fragments() const { return w_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // EA port: head fragments of voter k's blank ballot carry serial_tag(k+1, width).
  void ea_tag_ballots(int width);
  // Anonymous channel tap: the ballot most recently put in transit.
  Ballot& latest_in_transit();
  // Decoded ballots published by T, in channel order.
  const std::vector<std::vector<int>>& published() const { return published_; }

 private:
  int N_, n_, w_, c_, m_;
  int tag_width_ = 0;
  BasisVector b_;
  std::vector<Ballot> blanks_;
  std::vector<Ballot> channel_;
  std::vector<std::vector<int>> published_;
  std::vector<std::string> warnings_;
  int rejected_ = 0;
};

// Flips the candidate bits of the first honest ballot seen in transit.
class MalleateAdversary : public Adversary {
 public:
  std::string name() const override { return "conjcode-malleate"; }
  std::vector<int> choose_votes(const GameView& view, Rng& rng) override;
  void on_honest_ballot(int voter, qevote::Session& s, Rng& rng) override;

 private:
  bool done_ = false;
};

// Corrupted EA tags blank ballots and links decoded votes to voters.
class SerialNumberAdversary : public Adversary {
 public:
  std::string name() const override { return "conjcode-serial-number"; }
  std::vector<int> choose_votes(const GameView& view, Rng& rng) override;
  std::vector<int> choose_permutation(const GameView& view, const std::vector<int>& votes, Rng& rng) override;
  void tamper_setup(qevote::Session& s, Rng& rng) override;
  int guess_beta(qevote::Session& s, Rng& rng) override;
  std::string aux() const override;

 private:
  std::vector<int> votes_;
  int width_ = 0;
  int linked_ = -1;
};

}  // namespace qevote::conjcode
