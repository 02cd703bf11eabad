#include "qevote/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "qevote/errors.hpp"

namespace qevote {

const char* game_name(Game g) {
  switch (g) {
    case Game::qver: return "qver";
    case Game::qint: return "qint";
    case Game::qpriv: return "qpriv";
  }
  return "unknown";
}

int64_t TallyResult::ballots() const {
  int64_t s = 0;
  for (int64_t c : counts) s += c;
  return s;
}

TallyResult referendum_tally(int64_t m, int N) {
  TallyResult t;
  if (m < 0) return TallyResult::abort("negative tally");
  if (m <= N)
    t.counts = {N - m, m};
  else
    t.counts = {0, m};
  return t;
}

bool p_vcounted(const TallyResult& x, const std::vector<int64_t>& honest_counts, int corrupted) {
  if (x.bottom) return false;
  if (x.counts.size() != honest_counts.size()) return false;
  int64_t extra = 0;
  for (std::size_t c = 0; c < honest_counts.size(); ++c) {
    if (x.counts[c] < honest_counts[c]) return false;
    extra += x.counts[c] - honest_counts[c];
  }
  return extra <= corrupted;
}

void BallotRegister::write(int voter, Slot slot) {
  if (!casting_) throw ProtocolOrderError("ballot register written outside the casting phase");
  if (voter < 0 || voter >= size()) throw IndexError("ballot register: voter out of range");
  auto& s = slots_[static_cast<std::size_t>(voter)];
  if (s) throw ProtocolOrderError("ballot register slot " + std::to_string(voter) + " written twice");
  s = std::move(slot);
}

bool BallotRegister::written(int voter) const {
  if (voter < 0 || voter >= size()) throw IndexError("ballot register: voter out of range");
  return slots_[static_cast<std::size_t>(voter)].has_value();
}

const BallotRegister::Slot& BallotRegister::slot(int voter) const {
  if (!written(voter)) throw ProtocolOrderError("ballot register slot " + std::to_string(voter) + " is empty");
  return *slots_[static_cast<std::size_t>(voter)];
}

int BallotRegister::filled() const {
  return static_cast<int>(std::count_if(slots_.begin(), slots_.end(), [](const auto& s) { return s.has_value(); }));
}

void Session::init_register(int voters) {
  register_ = BallotRegister(voters);
  corrupted_.assign(static_cast<std::size_t>(voters), false);
}

void Session::mark_corrupted(int voter) {
  if (voter < 0 || voter >= static_cast<int>(corrupted_.size())) throw IndexError("corrupt: voter out of range");
  corrupted_[static_cast<std::size_t>(voter)] = true;
}

bool Session::is_corrupted(int voter) const {
  if (voter < 0 || voter >= static_cast<int>(corrupted_.size())) throw IndexError("voter out of range");
  return corrupted_[static_cast<std::size_t>(voter)];
}

const std::vector<int>& Session::leaked_order() const {
  if (!capabilities().order_leak) throw ConfigError(protocol() + ": the casting order is not visible to the adversary");
  return order_;
}

std::vector<int> Adversary::choose_votes(const GameView& view, Rng&) {
  std::vector<int> v(static_cast<std::size_t>(view.voters));
  for (int k = 0; k < view.voters; ++k) v[static_cast<std::size_t>(k)] = k % view.candidates;
  return v;
}

std::vector<int> Adversary::choose_permutation(const GameView& view, const std::vector<int>& votes, Rng&) {
  std::vector<int> src(static_cast<std::size_t>(view.voters));
  for (int k = 0; k < view.voters; ++k) src[static_cast<std::size_t>(k)] = k;
  for (int a = 0; a < view.voters; ++a)
    for (int b = a + 1; b < view.voters; ++b)
      if (votes[static_cast<std::size_t>(a)] != votes[static_cast<std::size_t>(b)]) {
        std::swap(src[static_cast<std::size_t>(a)], src[static_cast<std::size_t>(b)]);
        return src;
      }
  return src;
}

int corruption_budget(int voters, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ParameterError("epsilon must lie in [0, 1]");
  // Tolerate representation error when eps * N is meant to be integral.
  return static_cast<int>(std::floor(epsilon * voters + 1e-9));
}

Estimate wilson_interval(uint64_t successes, uint64_t n, double z) {
  if (n == 0) throw DegenerateSample("no trials to estimate from");
  double nn = static_cast<double>(n);
  double p = static_cast<double>(successes) / nn;
  double z2 = z * z;
  double denom = 1.0 + z2 / nn;
  double centre = (p + z2 / (2.0 * nn)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return Estimate{p, std::max(0.0, centre - half), std::min(1.0, centre + half), n};
}

Estimate estimate_advantage(const TrialReport& report) {
  uint64_t n = report.wins + report.losses;
  if (report.wins + report.losses + report.false_attacks == 0) throw DegenerateSample("report has no trials");
  if (n == 0) throw DegenerateSample("every trial ended in False_Attack; nothing to condition on");
  return wilson_interval(report.wins, n);
}

void parallel_for(uint64_t n, int threads, const std::function<void(uint64_t)>& body) {
  if (threads < 1) throw ParameterError("threads must be >= 1");
  uint64_t workers = std::min<uint64_t>(static_cast<uint64_t>(threads), n);
  if (workers <= 1) {
    for (uint64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (uint64_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (uint64_t i = w; i < n; i += workers) {
        {
          std::lock_guard<std::mutex> lock(mu);
          if (first) return;
        }
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

namespace {

constexpr uint64_t kAdversaryStream = 0xad0e75a1;
constexpr uint64_t kBetaStream = 0xbe7a;

std::vector<int> resolve_order(const ExperimentConfig& cfg) {
  std::vector<int> order = cfg.order;
  if (order.empty()) {
    order.resize(static_cast<std::size_t>(cfg.voters));
    for (int k = 0; k < cfg.voters; ++k) order[static_cast<std::size_t>(k)] = k;
  }
  if (static_cast<int>(order.size()) != cfg.voters) throw ConfigError("casting order must list every voter once");
  std::vector<bool> seen(order.size(), false);
  for (int k : order) {
    if (k < 0 || k >= cfg.voters || seen[static_cast<std::size_t>(k)])
      throw ConfigError("casting order is not a permutation of the voters");
    seen[static_cast<std::size_t>(k)] = true;
  }
  return order;
}

void check_votes(const std::vector<int>& votes, int voters, int candidates) {
  if (static_cast<int>(votes.size()) != voters) throw ConfigError("vote vector must have one entry per voter");
  for (int v : votes)
    if (v < 0 || v >= candidates) throw DomainError("vote " + std::to_string(v) + " outside the candidate range");
}

void check_permutation(const std::vector<int>& src, const std::vector<int>& votes) {
  std::size_t n = votes.size();
  if (src.size() != n) throw ConfigError("permutation must have one entry per voter");
  std::vector<bool> seen(n, false);
  bool changes = false;
  for (std::size_t k = 0; k < n; ++k) {
    int s = src[k];
    if (s < 0 || static_cast<std::size_t>(s) >= n || seen[static_cast<std::size_t>(s)])
      throw ConfigError("permutation is not a bijection on the voters");
    seen[static_cast<std::size_t>(s)] = true;
    if (votes[static_cast<std::size_t>(s)] != votes[k]) changes = true;
  }
  if (!changes) throw ConfigError("permutation leaves every vote unchanged; the privacy game would be vacuous");
}

struct TrialContext {
  const ExperimentConfig& cfg;
  const AdversaryFactory& make_adv;
  const ProtocolBinding& protocol;
  Game game;
  std::vector<int> order;
};

TrialOutcome run_trial(const TrialContext& ctx, uint64_t index) {
  const ExperimentConfig& cfg = ctx.cfg;
  TrialOutcome out;
  out.seed = derive_seed(cfg.seed, index);
  Rng ch(out.seed);
  Rng av(derive_seed(out.seed, kAdversaryStream));
  Rng coin(derive_seed(out.seed, kBetaStream));

  std::unique_ptr<Session> session = ctx.protocol.make();
  std::unique_ptr<Adversary> adv = ctx.make_adv();
  const int N = session->voters();
  if (N != cfg.voters) throw ConfigError("protocol voter count disagrees with the experiment config");
  session->set_order(ctx.order);

  GameView view{ctx.game, N, session->candidates(), cfg.epsilon, corruption_budget(N, cfg.epsilon)};
  adv->begin(view);
  std::vector<int> votes = cfg.votes.empty() ? adv->choose_votes(view, av) : cfg.votes;
  check_votes(votes, N, session->candidates());

  // beta and the permuted world stay in this frame; the adversary never sees them.
  int beta = 0;
  std::vector<int> permuted = votes;
  std::vector<int> cast = votes;
  if (ctx.game == Game::qpriv) {
    std::vector<int> src = cfg.permutation.empty() ? adv->choose_permutation(view, votes, av) : cfg.permutation;
    check_permutation(src, votes);
    for (int k = 0; k < N; ++k) permuted[static_cast<std::size_t>(k)] = votes[static_cast<std::size_t>(src[k])];
    beta = coin.coin() ? 1 : 0;
    if (beta == 1) cast = permuted;
  }

  int corrupted = 0;
  auto consult = [&](int k) {
    if (adv->corrupt(k, *session, av)) {
      if (corrupted + 1 > view.budget)
        throw InternalError(adv->name() + " exceeded the corruption budget of " + std::to_string(view.budget));
      session->mark_corrupted(k);
      ++corrupted;
    }
  };

  adv->tamper_setup(*session, av);
  if (session->ballots_at_setup())
    for (int k : ctx.order) consult(k);
  session->setup(ch);
  session->ballots().open_casting();
  for (int k : ctx.order) {
    if (!session->ballots_at_setup()) consult(k);
    if (session->is_corrupted(k)) {
      adv->cast_corrupted(k, votes[static_cast<std::size_t>(k)], *session, av);
    } else {
      session->cast_honest(k, cast[static_cast<std::size_t>(k)], ch);
      adv->on_honest_ballot(k, *session, av);
    }
  }
  session->ballots().close_casting();
  TallyResult x = session->tally(ch);

  if (corrupted > view.budget) throw InternalError("corruption budget exceeded");
  const int guess = ctx.game == Game::qpriv ? adv->guess_beta(*session, av) : 0;

  std::string aux = session->aux();
  std::string adv_aux = adv->aux();
  if (!adv_aux.empty()) aux += (aux.empty() ? "" : ";") + adv_aux;
  if (x.bottom) aux += std::string(aux.empty() ? "" : ";") + "tally=bottom";

  if (ctx.game == Game::qpriv) {
    // Tally-phase condition: on the honest voters the permutation must only
    // reorder choices, so the honest multiset is the same in both worlds.
    std::vector<int> a, b;
    for (int k = 0; k < N; ++k)
      if (!session->is_corrupted(k)) {
        a.push_back(votes[static_cast<std::size_t>(k)]);
        b.push_back(permuted[static_cast<std::size_t>(k)]);
      }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    out.outcome = (a != b) ? -1 : (guess == beta ? 1 : 0);
    out.aux = aux;
    return out;
  }

  std::vector<int64_t> honest(static_cast<std::size_t>(session->candidates()), 0);
  for (int k = 0; k < N; ++k)
    if (!session->is_corrupted(k)) ++honest[static_cast<std::size_t>(cast[static_cast<std::size_t>(k)])];
  bool counted = p_vcounted(x, honest, corrupted);
  bool win = !x.bottom && (!counted || x.ballots() > N);
  if (ctx.game == Game::qver) win = win && ctx.protocol.verify(*session, x);
  out.outcome = win ? 1 : 0;

  out.aux = aux;
  return out;
}

}  // namespace

TrialReport run_experiment(Game g, const ExperimentConfig& cfg, const AdversaryFactory& adv,
                           const ProtocolBinding& protocol) {
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  if (cfg.voters < 1) throw ConfigError("voters must be >= 1");
  if (g == Game::qver && !protocol.verify)
    throw ConfigError(protocol.name +
                      " has no Verify predicate; bind one explicitly or run the integrity experiment (qint)");
  corruption_budget(cfg.voters, cfg.epsilon);
  TrialContext ctx{cfg, adv, protocol, g, resolve_order(cfg)};
  TrialReport rep;
  rep.game = game_name(g);
  rep.protocol = protocol.name;
  rep.adversary = adv()->name();
  rep.seed = cfg.seed;
  rep.trials.resize(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](uint64_t i) { rep.trials[i] = run_trial(ctx, i); });
  for (const auto& t : rep.trials) {
    if (t.outcome == 1)
      ++rep.wins;
    else if (t.outcome == 0)
      ++rep.losses;
    else
      ++rep.false_attacks;
  }
  return rep;
}

TrialReport run_exp_qver(const ExperimentConfig& cfg, const AdversaryFactory& adv, const ProtocolBinding& protocol) {
  return run_experiment(Game::qver, cfg, adv, protocol);
}

TrialReport run_exp_qint(const ExperimentConfig& cfg, const AdversaryFactory& adv, const ProtocolBinding& protocol) {
  return run_experiment(Game::qint, cfg, adv, protocol);
}

TrialReport run_exp_qpriv(const ExperimentConfig& cfg, const AdversaryFactory& adv, const ProtocolBinding& protocol) {
  return run_experiment(Game::qpriv, cfg, adv, protocol);
}

}  // namespace qevote
