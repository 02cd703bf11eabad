#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qevote/rng.hpp"

namespace qevote {

enum class Game { qver, qint, qpriv };
const char* game_name(Game g);

// Tally output X: per-candidate counts, or bottom.
struct TallyResult {
  bool bottom = false;
  std::vector<int64_t> counts;
  std::string note;

  static TallyResult abort(std::string why) { return TallyResult{true, {}, std::move(why)}; }
  int64_t ballots() const;
};

// Referendum tally with m yes-votes among N voters. m > N cannot be split into
// {N-m, m} and is reported as {0, m}.
TallyResult referendum_tally(int64_t m, int N);

// X counts every honest choice and at most `corrupted` extra ballots.
bool p_vcounted(const TallyResult& x, const std::vector<int64_t>& honest_counts, int corrupted);

struct Capabilities {
  bool order_leak = false;         // the casting order is visible to the adversary
  bool transit_observe = false;    // ballots can be read while in transit
  bool transit_transform = false;  // ballots can be modified while in transit
};

// Global register B: one write-once slot per voter, writable only while casting.
class BallotRegister {
 public:
  struct Slot {
    std::string record;  // classical part
    int handle = -1;     // index of the quantum part inside the session, if any
  };

  explicit BallotRegister(int voters = 0) : slots_(static_cast<std::size_t>(voters)) {}
  void open_casting() { casting_ = true; }
  void close_casting() { casting_ = false; }
  bool casting() const { return casting_; }
  void write(int voter, Slot slot);
  bool written(int voter) const;
  const Slot& slot(int voter) const;
  int size() const { return static_cast<int>(slots_.size()); }
  int filled() const;

 private:
  std::vector<std::optional<Slot>> slots_;
  bool casting_ = false;
};

// One protocol execution inside one trial. Concrete sessions expose further,
// protocol-specific ports for adversaries.
class Session {
 public:
  virtual ~Session() = default;
  virtual std::string protocol() const = 0;
  virtual int voters() const = 0;
  virtual int candidates() const = 0;
  virtual Capabilities capabilities() const = 0;
  // True when blank ballots exist before casting; corruption is then decided
  // for every voter before setup.
  virtual bool ballots_at_setup() const = 0;
  virtual void setup(Rng& rng) = 0;
  virtual void cast_honest(int voter, int vote, Rng& rng) = 0;
  virtual TallyResult tally(Rng& rng) = 0;
  // key=value pairs for the per-trial CSV row.
  virtual std::string aux() const { return {}; }

  void mark_corrupted(int voter);
  bool is_corrupted(int voter) const;
  const std::vector<bool>& corrupted() const { return corrupted_; }
  BallotRegister& ballots() { return register_; }
  const BallotRegister& ballots() const { return register_; }
  // Casting order; readable by adversaries only through capabilities().order_leak.
  void set_order(std::vector<int> order) { order_ = std::move(order); }
  const std::vector<int>& leaked_order() const;

 protected:
  void init_register(int voters);

 private:
  std::vector<bool> corrupted_;
  BallotRegister register_;
  std::vector<int> order_;
};

struct GameView {
  Game game = Game::qint;
  int voters = 0;
  int candidates = 2;
  double epsilon = 0.0;
  int budget = 0;
};

class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual std::string name() const = 0;
  // Called once per trial before any other hook.
  virtual void begin(const GameView& view) { view_ = view; }
  virtual std::vector<int> choose_votes(const GameView& view, Rng& rng);
  // source[k]: voter k casts votes[source[k]] in the permuted world.
  virtual std::vector<int> choose_permutation(const GameView& view, const std::vector<int>& votes, Rng& rng);
  virtual void tamper_setup(Session&, Rng&) {}
  virtual bool corrupt(int /*voter*/, Session&, Rng&) { return false; }
  virtual void on_honest_ballot(int /*voter*/, Session&, Rng&) {}
  virtual void cast_corrupted(int voter, int vote, Session& s, Rng& rng) { s.cast_honest(voter, vote, rng); }
  virtual int guess_beta(Session&, Rng& rng) { return rng.coin() ? 1 : 0; }
  virtual std::string aux() const { return {}; }

 protected:
  GameView view_;
};

using SessionFactory = std::function<std::unique_ptr<Session>()>;
using AdversaryFactory = std::function<std::unique_ptr<Adversary>()>;
using VerifyPredicate = std::function<bool(const Session&, const TallyResult&)>;

struct ProtocolBinding {
  std::string name;
  SessionFactory make;
  VerifyPredicate verify;  // empty: the protocol has no Verify
};

struct ExperimentConfig {
  int voters = 0;
  double epsilon = 0.0;
  int delta0 = 0;
  std::vector<int> order;        // empty: 0, 1, ..., N-1
  std::vector<int> votes;        // empty: chosen by the adversary
  std::vector<int> permutation;  // qpriv only; empty: chosen by the adversary
  uint64_t trials = 1;
  uint64_t seed = 0;
  int threads = 1;
};

int corruption_budget(int voters, double epsilon);

struct TrialOutcome {
  int outcome = 0;  // qver/qint: {0,1}; qpriv: {-1,0,1}
  uint64_t seed = 0;
  std::string aux;
};

struct TrialReport {
  std::string game;
  std::string protocol;
  std::string adversary;
  uint64_t seed = 0;
  std::vector<TrialOutcome> trials;
  uint64_t wins = 0;
  uint64_t losses = 0;
  uint64_t false_attacks = 0;
};

struct Estimate {
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  uint64_t n = 0;
};

inline constexpr double kWilsonZ = 1.959963984540054;

Estimate wilson_interval(uint64_t successes, uint64_t n, double z = kWilsonZ);
Estimate estimate_advantage(const TrialReport& report);

TrialReport run_exp_qver(const ExperimentConfig& cfg, const AdversaryFactory& adv, const ProtocolBinding& protocol);
TrialReport run_exp_qint(const ExperimentConfig& cfg, const AdversaryFactory& adv, const ProtocolBinding& protocol);
TrialReport run_exp_qpriv(const ExperimentConfig& cfg, const AdversaryFactory& adv, const ProtocolBinding& protocol);
TrialReport run_experiment(Game g, const ExperimentConfig& cfg, const AdversaryFactory& adv,
                           const ProtocolBinding& protocol);

// Runs body(i) for i in [0, n) on up to `threads` workers; rethrows the first failure.
void parallel_for(uint64_t n, int threads, const std::function<void(uint64_t)>& body);

// Baselines shared by every protocol.
class HonestAdversary : public Adversary {
 public:
  std::string name() const override { return "honest"; }
};

class BlindGuessAdversary : public Adversary {
 public:
  std::string name() const override { return "blind-guess"; }
};

}  // namespace qevote
