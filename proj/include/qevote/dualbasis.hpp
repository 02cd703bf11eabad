#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qevote/harness.hpp"
#include "qevote/qcore.hpp"

namespace qevote::dualbasis {

// Qudit dimension equals the candidate count c.
struct DualBasisParams {
  int N = 3;
  int c = 2;
  int delta0 = 1;
  bool full_state = false;  // measure through explicit state vectors (oracle path)

  int picks() const { return 1 << delta0; }
  int d1_copies() const { return N + N * picks(); }
  int d2_copies() const { return 1 + N * picks(); }
  void validate() const;
};

enum class CopyKind { d1, d2 };

struct Copy {
  CopyKind kind = CopyKind::d1;
  bool corrupt = false;     // product state |digits_1> ... |digits_N>
  std::vector<int> digits;  // known to the preparer when corrupt
  bool tested = false;
};

struct StateSet {
  DualBasisParams params;
  std::vector<Copy> d1;
  std::vector<Copy> d2;
};

StateSet setup_honest(const DualBasisParams& p);

enum class CorruptTarget { d1, d2 };
// N product copies of |D1> (or one product copy of |D2>) at random positions.
StateSet attack_corrupt_setup(const DualBasisParams& p, Rng& rng, CorruptTarget target = CorruptTarget::d1);

// Explicit amplitude vectors of the honest states.
PureState d1_state(int N, int c);
PureState d2_state(int N);

// Joint outcome of every voter measuring their qudit of one copy in `basis`
// (computational or fourier).
std::vector<int> measure_copy(const Copy& copy, Basis basis, const DualBasisParams& p, Rng& rng);

enum class SamplingOrder { index, random, adversary_last };
const char* sampling_order_name(SamplingOrder s);
SamplingOrder parse_sampling_order(const std::string& s);
std::vector<int> sampling_sequence(SamplingOrder s, const std::vector<bool>& corrupted, Rng& rng);

struct CutResult {
  bool accept = true;
  std::string reason;
  std::vector<int> remaining_d1;  // ascending copy indices
  int remaining_d2 = -1;
  bool corrupted_untested = false;  // every corrupted copy survived untested
};

// Voters in `order` each test picks() unchecked copies of both kinds; corrupted
// voters avoid corrupted copies.
CutResult cut_and_choose(StateSet& set, const std::vector<int>& order, const std::vector<bool>& corrupted, Rng& rng);

struct BlankBallot {
  std::vector<int> xi;  // column, one entry per row
  int sk = 0;           // secret row index, 0-based
};

// Measures the surviving copies into one blank ballot per voter.
std::vector<BlankBallot> distribute(const StateSet& set, const CutResult& cut, Rng& rng);

using VoteMatrix = std::vector<std::vector<int>>;  // [row][voter]

std::vector<int> cast(const BlankBallot& b, int v, int c);
VoteMatrix assemble(const std::vector<std::vector<int>>& columns);
std::vector<int> row_sums(const VoteMatrix& B, int c);
// First honest voter (by index) whose row does not sum to their vote, or -1.
int failed_check(const std::vector<int>& sums, const std::vector<BlankBallot>& ballots, const std::vector<int>& votes,
                 const std::vector<bool>& honest);

// v_k = sum_j (post[j][k] - pre[j][k]) mod c.
std::vector<int> attack_extract_votes(const VoteMatrix& pre, const VoteMatrix& post, int c);

class Session : public qevote::Session {
 public:
  Session(DualBasisParams p, SamplingOrder order);
  std::string protocol() const override { return "dualbasis"; }
  int voters() const override { return p_.N; }
  int candidates() const override { return p_.c; }
  Capabilities capabilities() const override { return {false, false, false}; }
  bool ballots_at_setup() const override { return true; }
  void setup(Rng& rng) override;
  void cast_honest(int voter, int vote, Rng& rng) override;
  TallyResult tally(Rng& rng) override;
  std::string aux() const override;

  const DualBasisParams& params() const { return p_; }
  // Adversary ports.
  void request_corrupt_setup(CorruptTarget target);
  const StateSet& states() const { return set_; }
  const CutResult& cut() const { return cut_; }
  const BlankBallot& ballot_of(int voter) const;  // corrupted voters only
  void tamper_entry(int voter, int row, int value);
  const VoteMatrix& broadcast() const { return matrix_; }
  const std::vector<int>& sums() const { return sums_; }
  int abort_voter() const { return abort_voter_; }

 private:
  DualBasisParams p_;
  SamplingOrder order_;
  std::optional<CorruptTarget> corrupt_target_;
  StateSet set_;
  CutResult cut_;
  std::vector<BlankBallot> ballots_;
  std::vector<std::vector<int>> columns_;
  std::vector<int> cast_votes_;
  VoteMatrix matrix_;
  std::vector<int> sums_;
  int abort_voter_ = -1;
};

// Distributing party prepares product |D1> copies and reads every vote.
class CorruptSetupAdversary : public Adversary {
 public:
  explicit CorruptSetupAdversary(CorruptTarget target = CorruptTarget::d1) : target_(target) {}
  std::string name() const override { return "dualbasis-corrupt-setup"; }
  std::vector<int> choose_votes(const GameView& view, Rng& rng) override;
  void tamper_setup(qevote::Session& s, Rng& rng) override;
  bool corrupt(int voter, qevote::Session& s, Rng& rng) override;
  int guess_beta(qevote::Session& s, Rng& rng) override;
  std::string aux() const override;

  bool survived() const { return survived_; }
  const std::vector<int>& extracted() const { return extracted_; }

 private:
  CorruptTarget target_;
  std::vector<int> votes_;
  std::vector<int> extracted_;
  bool survived_ = false;
};

// Corrupted voter replaces one entry of its column in another voter's row.
class AbortAdversary : public Adversary {
 public:
  enum class Mode { random, flip };
  explicit AbortAdversary(Mode mode = Mode::random) : mode_(mode) {}
  std::string name() const override { return "dualbasis-abort"; }
  std::vector<int> choose_votes(const GameView& view, Rng& rng) override;
  std::vector<int> choose_permutation(const GameView& view, const std::vector<int>& votes, Rng& rng) override;
  bool corrupt(int voter, qevote::Session& s, Rng& rng) override;
  void cast_corrupted(int voter, int vote, qevote::Session& s, Rng& rng) override;
  int guess_beta(qevote::Session& s, Rng& rng) override;
  std::string aux() const override;

  bool fired() const { return victim_ >= 0; }
  int victim() const { return victim_; }
  int recovered() const { return recovered_; }

 private:
  Mode mode_;
  std::vector<int> votes_;
  int row_ = -1, delta_ = 0;
  int victim_ = -1, recovered_ = -1;
};

}  // namespace qevote::dualbasis
