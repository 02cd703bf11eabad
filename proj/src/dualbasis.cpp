#include "qevote/dualbasis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>

#include "qevote/errors.hpp"

namespace qevote::dualbasis {

namespace {

int mod(int64_t a, int m) { return static_cast<int>(((a % m) + m) % m); }

std::size_t ipow(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

std::vector<int> sum_zero_tuple(int N, int c, Rng& rng) {
  std::vector<int> t(static_cast<std::size_t>(N));
  int64_t s = 0;
  for (int k = 0; k + 1 < N; ++k) {
    t[static_cast<std::size_t>(k)] = static_cast<int>(rng.below(static_cast<uint64_t>(c)));
    s += t[static_cast<std::size_t>(k)];
  }
  t.back() = mod(-s, c);
  return t;
}

std::vector<int> random_permutation(int N, Rng& rng) {
  std::vector<int> p(static_cast<std::size_t>(N));
  std::iota(p.begin(), p.end(), 0);
  rng.shuffle(p);
  return p;
}

std::vector<int> digits_of(std::size_t index, int N, int d) {
  std::vector<int> out(static_cast<std::size_t>(N));
  for (int k = N - 1; k >= 0; --k) {
    out[static_cast<std::size_t>(k)] = static_cast<int>(index % static_cast<std::size_t>(d));
    index /= static_cast<std::size_t>(d);
  }
  return out;
}

// Cumulative outcome distribution of |D2> measured qudit-wise in the Fourier basis.
const std::vector<double>& d2_fourier_cdf(int N) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const std::vector<double>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(N);
  if (it != cache.end()) return *it->second;
  PureState s = d2_state(N);
  const Matrix fd = gates::fourier(N).adjoint();
  for (int k = 0; k < N; ++k) s = apply_unitary(s, fd, {k});
  auto cdf = std::make_shared<std::vector<double>>(s.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    acc += std::norm(s.amps()[i]);
    (*cdf)[i] = acc;
  }
  for (auto& x : *cdf) x /= acc;
  return *cache.emplace(N, std::move(cdf)).first->second;
}

std::vector<int> measure_full(const PureState& start, int N, Basis basis, Rng& rng) {
  PureState s = start;
  std::vector<int> out(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) {
    MeasurementRecord r = basis == Basis::fourier ? measure_fourier(s, k, rng) : measure_computational(s, k, rng);
    out[static_cast<std::size_t>(k)] = static_cast<int>(r.outcome);
    s = std::move(r.collapsed);
  }
  return out;
}

}  // namespace

void DualBasisParams::validate() const {
  if (N < 2) throw ParameterError("dualbasis: N must be >= 2");
  if (c < 2) throw ParameterError("dualbasis: c must be >= 2");
  if (delta0 < 0 || delta0 > 16) throw ParameterError("dualbasis: delta0 must lie in [0, 16]");
  if (full_state) {
    checked_dimension(std::vector<int>(static_cast<std::size_t>(N), c));
    checked_dimension(std::vector<int>(static_cast<std::size_t>(N), N));
  } else if (N > 7) {
    // The exact Fourier distribution of |D2> is tabulated from N^N amplitudes.
    throw CapacityError("dualbasis: N above 7 exceeds the |D2> Fourier table");
  }
}

StateSet setup_honest(const DualBasisParams& p) {
  p.validate();
  StateSet s;
  s.params = p;
  s.d1.assign(static_cast<std::size_t>(p.d1_copies()), Copy{CopyKind::d1, false, {}, false});
  s.d2.assign(static_cast<std::size_t>(p.d2_copies()), Copy{CopyKind::d2, false, {}, false});
  return s;
}

StateSet attack_corrupt_setup(const DualBasisParams& p, Rng& rng, CorruptTarget target) {
  StateSet s = setup_honest(p);
  if (target == CorruptTarget::d1) {
    std::vector<int> idx(s.d1.size());
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    for (int j = 0; j < p.N; ++j) {
      Copy& c = s.d1[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
      c.corrupt = true;
      c.digits = sum_zero_tuple(p.N, p.c, rng);
    }
  } else {
    Copy& c = s.d2[static_cast<std::size_t>(rng.below(s.d2.size()))];
    c.corrupt = true;
    c.digits = random_permutation(p.N, rng);
  }
  return s;
}

PureState d1_state(int N, int c) {
  std::vector<int> dims(static_cast<std::size_t>(N), c);
  std::vector<cplx> a(checked_dimension(dims));
  const double amp = 1.0 / std::sqrt(static_cast<double>(ipow(c, N - 1)));
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto d = digits_of(i, N, c);
    if (mod(std::accumulate(d.begin(), d.end(), int64_t{0}), c) == 0) a[i] = amp;
  }
  return PureState(dims, std::move(a));
}

PureState d2_state(int N) {
  std::vector<int> dims(static_cast<std::size_t>(N), N);
  std::vector<cplx> a(checked_dimension(dims));
  std::vector<int> p(static_cast<std::size_t>(N));
  std::iota(p.begin(), p.end(), 0);
  double count = 0;
  do {
    std::size_t i = 0;
    for (int x : p) i = i * static_cast<std::size_t>(N) + static_cast<std::size_t>(x);
    a[i] = 1.0;
    ++count;
  } while (std::next_permutation(p.begin(), p.end()));
  for (auto& x : a) x /= std::sqrt(count);
  return PureState(dims, std::move(a));
}

std::vector<int> measure_copy(const Copy& copy, Basis basis, const DualBasisParams& p, Rng& rng) {
  if (basis != Basis::computational && basis != Basis::fourier)
    throw DomainError("dualbasis: copies are measured in the computational or Fourier basis");
  const int d = copy.kind == CopyKind::d1 ? p.c : p.N;
  if (p.full_state) {
    std::vector<int> dims(static_cast<std::size_t>(p.N), d);
    PureState s = copy.corrupt ? PureState::basis(dims, copy.digits)
                               : (copy.kind == CopyKind::d1 ? d1_state(p.N, p.c) : d2_state(p.N));
    return measure_full(s, p.N, basis, rng);
  }
  if (copy.corrupt) {
    if (basis == Basis::computational) return copy.digits;
    std::vector<int> out(static_cast<std::size_t>(p.N));
    for (auto& x : out) x = static_cast<int>(rng.below(static_cast<uint64_t>(d)));
    return out;
  }
  if (copy.kind == CopyKind::d1) {
    if (basis == Basis::computational) return sum_zero_tuple(p.N, p.c, rng);
    return std::vector<int>(static_cast<std::size_t>(p.N), static_cast<int>(rng.below(static_cast<uint64_t>(p.c))));
  }
  if (basis == Basis::computational) return random_permutation(p.N, rng);
  const auto& cdf = d2_fourier_cdf(p.N);
  double u = rng.uniform();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  std::size_t i = std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
  return digits_of(i, p.N, p.N);
}

const char* sampling_order_name(SamplingOrder s) {
  switch (s) {
    case SamplingOrder::index: return "index";
    case SamplingOrder::random: return "random";
    case SamplingOrder::adversary_last: return "adversary-last";
  }
  return "?";
}

SamplingOrder parse_sampling_order(const std::string& s) {
  if (s == "index") return SamplingOrder::index;
  if (s == "random") return SamplingOrder::random;
  if (s == "adversary-last") return SamplingOrder::adversary_last;
  throw ConfigError("unknown sampling order '" + s + "'");
}

std::vector<int> sampling_sequence(SamplingOrder s, const std::vector<bool>& corrupted, Rng& rng) {
  const int N = static_cast<int>(corrupted.size());
  std::vector<int> order(static_cast<std::size_t>(N));
  std::iota(order.begin(), order.end(), 0);
  if (s == SamplingOrder::random) rng.shuffle(order);
  if (s == SamplingOrder::adversary_last)
    std::stable_partition(order.begin(), order.end(), [&](int k) { return !corrupted[static_cast<std::size_t>(k)]; });
  return order;
}

CutResult cut_and_choose(StateSet& set, const std::vector<int>& order, const std::vector<bool>& corrupted, Rng& rng) {
  const DualBasisParams& p = set.params;
  const int h = p.picks();
  const int comp = (h + 1) / 2;
  CutResult res;
  if (static_cast<int>(order.size()) != p.N || static_cast<int>(corrupted.size()) != p.N)
    throw ParameterError("cut_and_choose: order and corruption mask need one entry per voter");

  struct Test {
    const Copy* copy;
    Basis basis;
  };
  std::vector<Test> tests;
  auto pick = [&](std::vector<Copy>& pool, bool avoid_corrupt) {
    std::vector<int> open, preferred;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (!pool[i].tested) {
        open.push_back(static_cast<int>(i));
        if (!pool[i].corrupt) preferred.push_back(static_cast<int>(i));
      }
    std::vector<int>& from = (avoid_corrupt && static_cast<int>(preferred.size()) >= h) ? preferred : open;
    if (static_cast<int>(from.size()) < h) return false;
    // Partial Fisher-Yates: the first h entries are a uniform h-subset.
    for (int r = 0; r < h; ++r) {
      std::size_t j = static_cast<std::size_t>(r) + rng.below(from.size() - static_cast<std::size_t>(r));
      std::swap(from[static_cast<std::size_t>(r)], from[j]);
      Copy& c = pool[static_cast<std::size_t>(from[static_cast<std::size_t>(r)])];
      c.tested = true;
      tests.push_back({&c, r < comp ? Basis::computational : Basis::fourier});
    }
    return true;
  };
  for (int k : order) {
    bool avoid = corrupted[static_cast<std::size_t>(k)];
    if (!pick(set.d1, avoid) || !pick(set.d2, avoid)) {
      res.accept = false;
      res.reason = "copies exhausted";
      return res;
    }
  }
  // Results are broadcast together once every voter has measured.
  for (const Test& t : tests) {
    std::vector<int> out = measure_copy(*t.copy, t.basis, p, rng);
    bool ok = true;
    if (t.copy->kind == CopyKind::d1) {
      if (t.basis == Basis::computational)
        ok = mod(std::accumulate(out.begin(), out.end(), int64_t{0}), p.c) == 0;
      else
        ok = std::all_of(out.begin(), out.end(), [&](int x) { return x == out[0]; });
    } else {
      if (t.basis == Basis::computational) {
        std::vector<int> s = out;
        std::sort(s.begin(), s.end());
        ok = std::adjacent_find(s.begin(), s.end()) == s.end();
      } else {
        ok = mod(std::accumulate(out.begin(), out.end(), int64_t{0}), p.N) == 0;
      }
    }
    if (!ok && res.accept) {
      res.accept = false;
      res.reason = std::string(t.copy->kind == CopyKind::d1 ? "D1 " : "D2 ") + basis_name(t.basis) + " test failed";
    }
  }
  bool all_untested = true, any_corrupt = false;
  for (std::size_t i = 0; i < set.d1.size(); ++i) {
    if (!set.d1[i].tested) res.remaining_d1.push_back(static_cast<int>(i));
    if (set.d1[i].corrupt) {
      any_corrupt = true;
      all_untested = all_untested && !set.d1[i].tested;
    }
  }
  for (std::size_t i = 0; i < set.d2.size(); ++i) {
    if (!set.d2[i].tested) res.remaining_d2 = static_cast<int>(i);
    if (set.d2[i].corrupt) {
      any_corrupt = true;
      all_untested = all_untested && !set.d2[i].tested;
    }
  }
  res.corrupted_untested = any_corrupt && all_untested;
  return res;
}

std::vector<BlankBallot> distribute(const StateSet& set, const CutResult& cut, Rng& rng) {
  const DualBasisParams& p = set.params;
  if (!cut.accept) throw ProtocolOrderError("dualbasis: setup aborted, no ballots to distribute");
  if (static_cast<int>(cut.remaining_d1.size()) != p.N || cut.remaining_d2 < 0)
    throw InternalError("dualbasis: unexpected number of surviving copies");
  std::vector<BlankBallot> out(static_cast<std::size_t>(p.N));
  for (auto& b : out) b.xi.resize(static_cast<std::size_t>(p.N));
  for (int j = 0; j < p.N; ++j) {
    auto row = measure_copy(set.d1[static_cast<std::size_t>(cut.remaining_d1[static_cast<std::size_t>(j)])],
                            Basis::computational, p, rng);
    for (int k = 0; k < p.N; ++k)
      out[static_cast<std::size_t>(k)].xi[static_cast<std::size_t>(j)] = row[static_cast<std::size_t>(k)];
  }
  auto sk = measure_copy(set.d2[static_cast<std::size_t>(cut.remaining_d2)], Basis::computational, p, rng);
  for (int k = 0; k < p.N; ++k) out[static_cast<std::size_t>(k)].sk = sk[static_cast<std::size_t>(k)];
  return out;
}

std::vector<int> cast(const BlankBallot& b, int v, int c) {
  if (v < 0 || v >= c) throw DomainError("dualbasis: vote outside Z_c");
  if (b.sk < 0 || b.sk >= static_cast<int>(b.xi.size())) throw DomainError("dualbasis: secret row out of range");
  std::vector<int> col = b.xi;
  col[static_cast<std::size_t>(b.sk)] = mod(col[static_cast<std::size_t>(b.sk)] + v, c);
  return col;
}

VoteMatrix assemble(const std::vector<std::vector<int>>& columns) {
  const std::size_t n = columns.size();
  VoteMatrix B(n, std::vector<int>(n));
  for (std::size_t k = 0; k < n; ++k) {
    if (columns[k].size() != n) throw ProtocolOrderError("dualbasis: matrix assembled before every column arrived");
    for (std::size_t j = 0; j < n; ++j) B[j][k] = columns[k][j];
  }
  return B;
}

std::vector<int> row_sums(const VoteMatrix& B, int c) {
  std::vector<int> s;
  s.reserve(B.size());
  for (const auto& row : B) s.push_back(mod(std::accumulate(row.begin(), row.end(), int64_t{0}), c));
  return s;
}

int failed_check(const std::vector<int>& sums, const std::vector<BlankBallot>& ballots, const std::vector<int>& votes,
                 const std::vector<bool>& honest) {
  for (std::size_t k = 0; k < ballots.size(); ++k)
    if (honest[k] && sums[static_cast<std::size_t>(ballots[k].sk)] != votes[k]) return static_cast<int>(k);
  return -1;
}

std::vector<int> attack_extract_votes(const VoteMatrix& pre, const VoteMatrix& post, int c) {
  if (pre.size() != post.size()) throw ParameterError("extract: matrix shapes differ");
  const std::size_t n = pre.size();
  std::vector<int> v(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    int64_t s = 0;
    for (std::size_t j = 0; j < n; ++j) s += post[j][k] - pre[j][k];
    v[k] = mod(s, c);
  }
  return v;
}

// ---------------------------------------------------------------------------

Session::Session(DualBasisParams p, SamplingOrder order) : p_(p), order_(order) {
  p_.validate();
  init_register(p_.N);
}

void Session::request_corrupt_setup(CorruptTarget target) { corrupt_target_ = target; }

void Session::setup(Rng& rng) {
  set_ = corrupt_target_ ? attack_corrupt_setup(p_, rng, *corrupt_target_) : setup_honest(p_);
  cut_ = cut_and_choose(set_, sampling_sequence(order_, corrupted(), rng), corrupted(), rng);
  ballots_.clear();
  if (cut_.accept) ballots_ = distribute(set_, cut_, rng);
  columns_.assign(static_cast<std::size_t>(p_.N), {});
  cast_votes_.assign(static_cast<std::size_t>(p_.N), -1);
  matrix_.clear();
  sums_.clear();
  abort_voter_ = -1;
}

void Session::cast_honest(int voter, int vote, Rng&) {
  if (ballots().written(voter)) throw ProtocolOrderError("dualbasis: voter already cast");
  if (!cut_.accept) {
    ballots().write(voter, {"aborted", -1});
    return;
  }
  columns_[static_cast<std::size_t>(voter)] = cast(ballots_[static_cast<std::size_t>(voter)], vote, p_.c);
  cast_votes_[static_cast<std::size_t>(voter)] = vote;
  ballots().write(voter, {"column", voter});
}

const BlankBallot& Session::ballot_of(int voter) const {
  if (!is_corrupted(voter)) throw ConfigError("dualbasis: blank ballots of honest voters are private");
  if (ballots_.empty()) throw ProtocolOrderError("dualbasis: no ballots were distributed");
  return ballots_[static_cast<std::size_t>(voter)];
}

void Session::tamper_entry(int voter, int row, int value) {
  if (!is_corrupted(voter)) throw ConfigError("dualbasis: only a corrupted voter may alter its column");
  if (!ballots().written(voter) || columns_[static_cast<std::size_t>(voter)].empty())
    throw ProtocolOrderError("dualbasis: column not cast yet");
  if (row < 0 || row >= p_.N) throw IndexError("dualbasis: row out of range");
  if (value < 0 || value >= p_.c) throw DomainError("dualbasis: entry outside Z_c");
  columns_[static_cast<std::size_t>(voter)][static_cast<std::size_t>(row)] = value;
}

TallyResult Session::tally(Rng&) {
  if (!cut_.accept) return TallyResult::abort("setup: " + cut_.reason);
  matrix_ = assemble(columns_);
  sums_ = row_sums(matrix_, p_.c);
  std::vector<bool> honest(static_cast<std::size_t>(p_.N));
  for (int k = 0; k < p_.N; ++k) honest[static_cast<std::size_t>(k)] = !is_corrupted(k);
  abort_voter_ = failed_check(sums_, ballots_, cast_votes_, honest);
  if (abort_voter_ >= 0) return TallyResult::abort("row check failed for voter " + std::to_string(abort_voter_));
  std::vector<int64_t> counts(static_cast<std::size_t>(p_.c), 0);
  for (int s : sums_) ++counts[static_cast<std::size_t>(s)];
  return TallyResult{false, std::move(counts), {}};
}

std::string Session::aux() const {
  std::string s = "setup=" + std::string(cut_.accept ? "accept" : "abort");
  s += ";untested=" + std::to_string(cut_.corrupted_untested ? 1 : 0);
  if (abort_voter_ >= 0) s += ";abort_voter=" + std::to_string(abort_voter_);
  return s;
}

// ---------------------------------------------------------------------------

std::vector<int> CorruptSetupAdversary::choose_votes(const GameView& view, Rng&) {
  votes_.assign(static_cast<std::size_t>(view.voters), 0);
  for (int k = 0; k < view.voters; ++k) votes_[static_cast<std::size_t>(k)] = k % view.candidates;
  return votes_;
}

void CorruptSetupAdversary::tamper_setup(qevote::Session& s, Rng&) {
  dynamic_cast<Session&>(s).request_corrupt_setup(target_);
}

bool CorruptSetupAdversary::corrupt(int voter, qevote::Session& s, Rng&) { return voter >= s.voters() - view_.budget; }

int CorruptSetupAdversary::guess_beta(qevote::Session& s, Rng& rng) {
  auto& db = dynamic_cast<Session&>(s);
  const CutResult& cut = db.cut();
  const DualBasisParams& p = db.params();
  survived_ = cut.accept && cut.corrupted_untested && !db.broadcast().empty();
  if (!survived_ || votes_.empty()) return rng.coin() ? 1 : 0;
  if (target_ == CorruptTarget::d1) {
    VoteMatrix pre(static_cast<std::size_t>(p.N));
    for (int j = 0; j < p.N; ++j)
      pre[static_cast<std::size_t>(j)] =
          db.states().d1[static_cast<std::size_t>(cut.remaining_d1[static_cast<std::size_t>(j)])].digits;
    extracted_ = attack_extract_votes(pre, db.broadcast(), p.c);
  } else {
    const auto& sk = db.states().d2[static_cast<std::size_t>(cut.remaining_d2)].digits;
    extracted_.assign(static_cast<std::size_t>(p.N), 0);
    for (int k = 0; k < p.N; ++k)
      extracted_[static_cast<std::size_t>(k)] = db.sums()[static_cast<std::size_t>(sk[static_cast<std::size_t>(k)])];
  }
  for (int k = 0; k < p.N; ++k)
    if (!s.is_corrupted(k) && extracted_[static_cast<std::size_t>(k)] != votes_[static_cast<std::size_t>(k)]) return 1;
  return 0;
}

std::string CorruptSetupAdversary::aux() const { return "survived=" + std::to_string(survived_ ? 1 : 0); }

std::vector<int> AbortAdversary::choose_votes(const GameView& view, Rng&) {
  if (view.voters < 3) throw ConfigError("abort attack needs three voters");
  votes_.assign(static_cast<std::size_t>(view.voters), 0);
  votes_[1] = 1;
  return votes_;
}

std::vector<int> AbortAdversary::choose_permutation(const GameView& view, const std::vector<int>&, Rng&) {
  std::vector<int> src(static_cast<std::size_t>(view.voters));
  std::iota(src.begin(), src.end(), 0);
  std::swap(src[0], src[1]);
  return src;
}

bool AbortAdversary::corrupt(int voter, qevote::Session& s, Rng&) { return voter == s.voters() - 1; }

void AbortAdversary::cast_corrupted(int voter, int vote, qevote::Session& s, Rng& rng) {
  auto& db = dynamic_cast<Session&>(s);
  db.cast_honest(voter, vote, rng);
  if (!db.cut().accept) return;
  const BlankBallot& own = db.ballot_of(voter);
  row_ = own.sk == 0 ? 1 : 0;
  const int c = db.params().c;
  int old = cast(own, vote, c)[static_cast<std::size_t>(row_)];
  int value = mode_ == Mode::flip ? mod(old + 1, c) : static_cast<int>(rng.below(static_cast<uint64_t>(c)));
  delta_ = mod(value - old, c);
  db.tamper_entry(voter, row_, value);
}

int AbortAdversary::guess_beta(qevote::Session& s, Rng& rng) {
  auto& db = dynamic_cast<Session&>(s);
  victim_ = db.abort_voter();
  if (victim_ < 0 || row_ < 0) return rng.coin() ? 1 : 0;
  recovered_ = mod(db.sums()[static_cast<std::size_t>(row_)] - delta_, db.params().c);
  if (votes_.empty()) return rng.coin() ? 1 : 0;
  return recovered_ == votes_[static_cast<std::size_t>(victim_)] ? 0 : 1;
}

std::string AbortAdversary::aux() const {
  return "fired=" + std::to_string(victim_ >= 0 ? 1 : 0) + ";victim=" + std::to_string(victim_) +
         ";recovered=" + std::to_string(recovered_);
}

}  // namespace qevote::dualbasis
