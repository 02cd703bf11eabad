#include "qevote/bindings.hpp"

#include <algorithm>
#include <set>

#include "qevote/conjcode.hpp"
#include "qevote/distball.hpp"
#include "qevote/dualbasis.hpp"
#include "qevote/errors.hpp"
#include "qevote/travelball.hpp"

namespace qevote {

namespace {

void allow_keys(const json& params, const std::set<std::string>& keys, const std::string& owner) {
  if (params.is_null()) return;
  if (!params.is_object()) throw ConfigError(owner + ": params must be a JSON object");
  for (const auto& [k, v] : params.items())
    if (!keys.count(k)) throw ConfigError(owner + ": unknown parameter '" + k + "'");
}

template <typename T>
T get_or(const json& params, const char* key, T fallback) {
  if (params.is_null() || !params.contains(key)) return fallback;
  try {
    return params.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("parameter '") + key + "' has the wrong type");
  }
}

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

int next_prime_above(int n) {
  int p = n + 1;
  while (!is_prime(p)) ++p;
  return p;
}

}  // namespace

ProtocolBinding make_protocol(const std::string& name, int voters, const json& params) {
  ProtocolBinding b;
  b.name = name;
  if (name == "travelball") {
    allow_keys(params, {"M"}, name);
    const int M = get_or(params, "M", 0);
    travelball::Session probe(voters, M);  // validates eagerly
    b.make = [voters, M] { return std::make_unique<travelball::Session>(voters, M); };
  } else if (name == "dualbasis") {
    allow_keys(params, {"c", "delta0", "sampling", "full_state"}, name);
    dualbasis::DualBasisParams p;
    p.N = voters;
    p.c = get_or(params, "c", 2);
    p.delta0 = get_or(params, "delta0", 1);
    p.full_state = get_or(params, "full_state", false);
    auto order = dualbasis::parse_sampling_order(get_or<std::string>(params, "sampling", "index"));
    p.validate();
    b.make = [p, order] { return std::make_unique<dualbasis::Session>(p, order); };
  } else if (name == "distball") {
    allow_keys(params, {"D", "rounds", "full_state"}, name);
    const int D = get_or(params, "D", next_prime_above(voters));
    const int rounds = get_or(params, "rounds", 1);
    const bool full = get_or(params, "full_state", false);
    distball::Session probe(voters, D, rounds, full);
    b.make = [=] { return std::make_unique<distball::Session>(voters, D, rounds, full); };
  } else if (name == "conjcode") {
    allow_keys(params, {"n", "w", "candidates"}, name);
    const int n = get_or(params, "n", 2);
    const int w = get_or(params, "w", 0);
    const int c = get_or(params, "candidates", 2);
    conjcode::Session probe(voters, n, w, c);
    b.make = [=] { return std::make_unique<conjcode::Session>(voters, n, w, c); };
  } else {
    throw ConfigError("unknown protocol '" + name + "'");
  }
  return b;
}

std::vector<std::string> protocol_names() { return {"travelball", "dualbasis", "distball", "conjcode"}; }

void bind_verify(ProtocolBinding& binding, const std::string& verify) {
  if (verify.empty()) return;
  // None of the protocols carries a verification mechanism; the only
  // predicate on offer accepts every non-bottom tally.
  if (verify == "accept-all") {
    binding.verify = [](const Session&, const TallyResult& x) { return !x.bottom; };
    return;
  }
  throw ConfigError("unknown verify predicate '" + verify + "'");
}

const std::vector<AdversaryEntry>& adversary_catalog() {
  static const std::vector<AdversaryEntry> catalog = {
      {"honest", "", Game::qint},
      {"blind-guess", "", Game::qpriv},
      {"travelball-sandwich", "travelball", Game::qpriv},
      {"travelball-double-vote", "travelball", Game::qint},
      {"dualbasis-corrupt-setup", "dualbasis", Game::qpriv},
      {"dualbasis-abort", "dualbasis", Game::qpriv},
      {"distball-dtransfer", "distball", Game::qint},
      {"conjcode-malleate", "conjcode", Game::qint},
      {"conjcode-serial-number", "conjcode", Game::qpriv},
  };
  return catalog;
}

const AdversaryEntry& adversary_entry(const std::string& name) {
  for (const auto& e : adversary_catalog())
    if (e.name == name) return e;
  throw ConfigError("unknown adversary '" + name + "'");
}

AdversaryFactory make_adversary(const std::string& name, const std::string& protocol, const json& params) {
  const AdversaryEntry& e = adversary_entry(name);
  if (!e.protocol.empty() && e.protocol != protocol)
    throw ConfigError("adversary '" + name + "' targets " + e.protocol + ", not " + protocol);
  if (name == "travelball-double-vote") {
    allow_keys(params, {"applications"}, name);
    const int a = get_or(params, "applications", 2);
    if (a < 0) throw ConfigError("applications must be >= 0");
    return [a] { return std::make_unique<travelball::DoubleVoteAdversary>(a); };
  }
  if (name == "dualbasis-corrupt-setup") {
    allow_keys(params, {"target"}, name);
    const std::string t = get_or<std::string>(params, "target", "d1");
    if (t != "d1" && t != "d2") throw ConfigError("target must be d1 or d2");
    auto target = t == "d1" ? dualbasis::CorruptTarget::d1 : dualbasis::CorruptTarget::d2;
    return [target] { return std::make_unique<dualbasis::CorruptSetupAdversary>(target); };
  }
  if (name == "dualbasis-abort") {
    allow_keys(params, {"mode"}, name);
    const std::string m = get_or<std::string>(params, "mode", "random");
    if (m != "random" && m != "flip") throw ConfigError("mode must be random or flip");
    auto mode = m == "flip" ? dualbasis::AbortAdversary::Mode::flip : dualbasis::AbortAdversary::Mode::random;
    return [mode] { return std::make_unique<dualbasis::AbortAdversary>(mode); };
  }
  allow_keys(params, {}, name);
  if (name == "honest") return [] { return std::make_unique<HonestAdversary>(); };
  if (name == "blind-guess") return [] { return std::make_unique<BlindGuessAdversary>(); };
  if (name == "travelball-sandwich") return [] { return std::make_unique<travelball::SandwichAdversary>(); };
  if (name == "distball-dtransfer") return [] { return std::make_unique<distball::DTransferAdversary>(); };
  if (name == "conjcode-malleate") return [] { return std::make_unique<conjcode::MalleateAdversary>(); };
  if (name == "conjcode-serial-number") return [] { return std::make_unique<conjcode::SerialNumberAdversary>(); };
  throw InternalError("adversary catalog entry without a factory: " + name);
}

Game parse_game(const std::string& s) {
  if (s == "qver") return Game::qver;
  if (s == "qint") return Game::qint;
  if (s == "qpriv") return Game::qpriv;
  throw ConfigError("unknown experiment '" + s + "' (expected qver, qint or qpriv)");
}

}  // namespace qevote
