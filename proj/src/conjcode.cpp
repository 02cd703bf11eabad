#include "qevote/conjcode.hpp"

#include <cmath>

#include "qevote/errors.hpp"

namespace qevote::conjcode {

namespace {

void check_basis(const BasisVector& b, int n) {
  if (static_cast<int>(b.size()) != n + 1) throw ParameterError("conjcode: basis vector must have n+1 entries");
  for (int x : b)
    if (x != 0 && x != 1) throw DomainError("conjcode: basis entries must be 0 or 1");
}

// Random bit vector of length n+1 whose last bit is the XOR of the others.
std::vector<int> parity_bits(int n, Rng& rng) {
  std::vector<int> a(static_cast<std::size_t>(n) + 1, 0);
  int x = 0;
  for (int i = 0; i < n; ++i) {
    a[static_cast<std::size_t>(i)] = rng.coin() ? 1 : 0;
    x ^= a[static_cast<std::size_t>(i)];
  }
  a[static_cast<std::size_t>(n)] = x;
  return a;
}

}  // namespace

BasisVector random_basis(int n, Rng& rng) {
  if (n < 1) throw ParameterError("conjcode: n must be >= 1");
  BasisVector b(static_cast<std::size_t>(n) + 1);
  for (auto& x : b) x = rng.coin() ? 1 : 0;
  return b;
}

PureState bb84_state(int a, int b) {
  if ((a != 0 && a != 1) || (b != 0 && b != 1)) throw DomainError("bb84_state: bits must be 0 or 1");
  if (b == 0) return PureState::basis({2}, {a});
  const double s = 1.0 / std::sqrt(2.0);
  return PureState({2}, {s, a == 0 ? s : -s});
}

BallotFragment make_fragment(const std::vector<int>& a, const BasisVector& b) {
  if (a.size() != b.size() || a.empty()) throw ParameterError("conjcode: fragment bits and basis differ in length");
  PureState s = bb84_state(a[0], b[0]);
  for (std::size_t i = 1; i < a.size(); ++i) s = s.tensor(bb84_state(a[i], b[i]));
  return BallotFragment{std::move(s), a};
}

Ballot make_blank_ballot(int n, int w, const BasisVector& b, Rng& rng) {
  if (n < 1) throw ParameterError("conjcode: n must be >= 1");
  if (w < 1) throw ParameterError("conjcode: w must be >= 1");
  check_basis(b, n);
  Ballot out;
  out.n = n;
  out.fragments.reserve(static_cast<std::size_t>(w));
  for (int j = 0; j < w; ++j) out.fragments.push_back(make_fragment(parity_bits(n, rng), b));
  return out;
}

Ballot rerandomize(const Ballot& ballot, Rng& rng) {
  Ballot out = ballot;
  const Matrix y = gates::y_flip();
  for (auto& f : out.fragments) {
    std::vector<int> d = parity_bits(ballot.n, rng);
    for (int i = 0; i <= ballot.n; ++i)
      if (d[static_cast<std::size_t>(i)]) f.state = apply_unitary(f.state, y, {i});
  }
  return out;
}

Ballot encode_vote(const Ballot& ballot, const std::vector<int>& bits) {
  const int w = ballot.w();
  if (static_cast<int>(bits.size()) > w) throw DomainError("conjcode: candidate field longer than the ballot");
  Ballot out = ballot;
  const Matrix y = gates::y_flip();
  const int first = w - static_cast<int>(bits.size());
  for (std::size_t r = 0; r < bits.size(); ++r) {
    if (bits[r] != 0 && bits[r] != 1) throw DomainError("conjcode: candidate bits must be 0 or 1");
    if (bits[r]) {
      auto& f = out.fragments[static_cast<std::size_t>(first) + r];
      f.state = apply_unitary(f.state, y, {ballot.n});
    }
  }
  return out;
}

std::vector<int> tally_decode(const Ballot& ballot, const BasisVector& b, Rng& rng) {
  check_basis(b, ballot.n);
  const Matrix h = gates::hadamard();
  std::vector<int> out;
  out.reserve(ballot.fragments.size());
  for (const auto& f : ballot.fragments) {
    PureState s = f.state;
    for (int i = 0; i <= ballot.n; ++i)
      if (b[static_cast<std::size_t>(i)]) s = apply_unitary(s, h, {i});
    int x = 0;
    for (int i = 0; i <= ballot.n; ++i) {
      MeasurementRecord r = measure_computational(s, i, rng);
      x ^= static_cast<int>(r.outcome);
      s = std::move(r.collapsed);
    }
    out.push_back(x);
  }
  return out;
}

Ballot attack_malleate(const Ballot& ballot, const std::vector<int>& mask) { return encode_vote(ballot, mask); }

Ballot attack_serial_number(int n, int w, const BasisVector& b, const std::vector<int>& tag, Rng& rng) {
  if (static_cast<int>(tag.size()) > w) throw ParameterError("conjcode: serial tag longer than the ballot");
  Ballot out = make_blank_ballot(n, w, b, rng);
  for (std::size_t j = 0; j < tag.size(); ++j) {
    if (!tag[j]) continue;
    std::vector<int> a = out.fragments[j].a;
    a[static_cast<std::size_t>(n)] ^= 1;
    out.fragments[j] = make_fragment(a, b);
  }
  return out;
}

std::vector<int> serial_tag(int id, int width) {
  if (id < 0 || (width < 31 && id >= (1 << width))) throw DomainError("conjcode: serial number does not fit the tag");
  std::vector<int> t(static_cast<std::size_t>(width));
  for (int j = 0; j < width; ++j) t[static_cast<std::size_t>(j)] = (id >> (width - 1 - j)) & 1;
  return t;
}

int read_serial(const std::vector<int>& decoded, int width) {
  if (static_cast<int>(decoded.size()) < width) throw DomainError("conjcode: decoded ballot shorter than the tag");
  int id = 0;
  for (int j = 0; j < width; ++j) id = (id << 1) | decoded[static_cast<std::size_t>(j)];
  return id;
}

int candidate_bits(int candidates) {
  if (candidates < 2) throw ParameterError("conjcode: need at least two candidates");
  int m = 0;
  while ((1 << m) < candidates) ++m;
  return m;
}

int default_fragments(int n) { return 4 * (n + 1); }

int candidate_of(const std::vector<int>& decoded, int m) {
  if (static_cast<int>(decoded.size()) < m) throw DomainError("conjcode: decoded ballot shorter than the field");
  int v = 0;
  for (std::size_t r = decoded.size() - static_cast<std::size_t>(m); r < decoded.size(); ++r) v = (v << 1) | decoded[r];
  return v;
}

std::vector<int> candidate_field(int candidate, int m) { return serial_tag(candidate, m); }

// ---------------------------------------------------------------------------

Session::Session(int N, int n, int w, int candidates)
    : N_(N), n_(n), w_(w == 0 ? default_fragments(n) : w), c_(candidates), m_(candidate_bits(candidates)) {
  if (N < 1) throw ParameterError("conjcode: N must be >= 1");
  if (n < 1) throw ParameterError("conjcode: n must be >= 1");
  if (n + 1 > 20) throw CapacityError("conjcode: fragment register too large");
  if (m_ > w_) throw ParameterError("conjcode: candidate field longer than the ballot");
  if (static_cast<int64_t>(N) * m_ >= w_)
    warnings_.push_back("N*m = " + std::to_string(N * m_) + " is not small against w = " + std::to_string(w_));
  init_register(N);
}

void Session::ea_tag_ballots(int width) {
  if (width < 1 || width > w_ - m_) throw ConfigError("conjcode: serial tag does not fit the head fragments");
  tag_width_ = width;
}

void Session::setup(Rng& rng) {
  b_ = random_basis(n_, rng);
  blanks_.clear();
  channel_.clear();
  published_.clear();
  rejected_ = 0;
  for (int k = 0; k < N_; ++k) {
    Ballot blank = tag_width_ > 0 ? attack_serial_number(n_, w_, b_, serial_tag(k + 1, tag_width_), rng)
                                  : make_blank_ballot(n_, w_, b_, rng);
    blank.voter = k;
    blanks_.push_back(std::move(blank));
  }
}

void Session::cast_honest(int voter, int vote, Rng& rng) {
  if (blanks_.empty()) throw ProtocolOrderError("conjcode: setup has not run");
  if (ballots().written(voter)) throw ProtocolOrderError("conjcode: voter already cast");
  Ballot b = encode_vote(rerandomize(blanks_[static_cast<std::size_t>(voter)], rng), candidate_field(vote, m_));
  b.voter = -1;  // the anonymous channel strips the sender
  channel_.push_back(std::move(b));
  ballots().write(voter, {"sent", static_cast<int>(channel_.size()) - 1});
}

Ballot& Session::latest_in_transit() {
  if (channel_.empty()) throw ProtocolOrderError("conjcode: no ballot in transit");
  return channel_.back();
}

TallyResult Session::tally(Rng& rng) {
  if (blanks_.empty()) throw ProtocolOrderError("conjcode: setup has not run");
  rng.shuffle(channel_);
  std::vector<int64_t> counts(static_cast<std::size_t>(c_), 0);
  for (const auto& ballot : channel_) {
    std::vector<int> d = tally_decode(ballot, b_, rng);
    bool valid = true;
    for (int j = 0; j < w_ - m_; ++j) valid = valid && d[static_cast<std::size_t>(j)] == 0;
    int cand = candidate_of(d, m_);
    if (valid && cand < c_)
      ++counts[static_cast<std::size_t>(cand)];
    else
      ++rejected_;
    published_.push_back(std::move(d));
  }
  return TallyResult{false, std::move(counts), {}};
}

std::string Session::aux() const { return "rejected=" + std::to_string(rejected_); }

// ---------------------------------------------------------------------------

std::vector<int> MalleateAdversary::choose_votes(const GameView& view, Rng&) {
  return std::vector<int>(static_cast<std::size_t>(view.voters), 0);
}

void MalleateAdversary::on_honest_ballot(int, qevote::Session& s, Rng&) {
  if (done_) return;
  if (!s.capabilities().transit_transform) throw ConfigError("malleation needs write access to the channel");
  auto& cs = dynamic_cast<Session&>(s);
  Ballot& b = cs.latest_in_transit();
  std::vector<int> mask(static_cast<std::size_t>(cs.field_bits()), 0);
  mask.back() = 1;
  b = attack_malleate(b, mask);
  done_ = true;
}

std::vector<int> SerialNumberAdversary::choose_votes(const GameView& view, Rng&) {
  votes_.assign(static_cast<std::size_t>(view.voters), 0);
  for (int k = 0; k < view.voters; ++k) votes_[static_cast<std::size_t>(k)] = k % view.candidates;
  if (view.voters < 2) throw ConfigError("serial-number attack needs two voters");
  votes_[0] = 0;
  votes_[1] = 1;
  return votes_;
}

std::vector<int> SerialNumberAdversary::choose_permutation(const GameView& view, const std::vector<int>&, Rng&) {
  std::vector<int> src(static_cast<std::size_t>(view.voters));
  for (int k = 0; k < view.voters; ++k) src[static_cast<std::size_t>(k)] = k;
  std::swap(src[0], src[1]);
  return src;
}

void SerialNumberAdversary::tamper_setup(qevote::Session& s, Rng&) {
  auto& cs = dynamic_cast<Session&>(s);
  width_ = 1;
  while ((1 << width_) <= cs.voters()) ++width_;
  cs.ea_tag_ballots(width_);
}

int SerialNumberAdversary::guess_beta(qevote::Session& s, Rng& rng) {
  auto& cs = dynamic_cast<Session&>(s);
  for (const auto& d : cs.published())
    if (read_serial(d, width_) == 1) {
      linked_ = candidate_of(d, cs.field_bits());
      if (votes_.empty()) break;
      return linked_ == votes_[0] ? 0 : 1;
    }
  return rng.coin() ? 1 : 0;
}

std::string SerialNumberAdversary::aux() const { return "linked_vote=" + std::to_string(linked_); }

}  // namespace qevote::conjcode
