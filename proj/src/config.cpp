#include "qevote/config.hpp"

#include <set>
#include <sstream>

#include "qevote/errors.hpp"

namespace qevote::config {

namespace {

const std::set<std::string> kTopLevel = {
    "schema_version", "description", "protocol", "voters", "params",  "votes",   "experiment", "adversary",
    "adversary_params", "epsilon",   "order",    "permutation", "verify", "sweep", "trials",     "seed",
    "threads"};

template <typename T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

std::string require_string(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("config is missing '") + key + "'");
  return field<std::string>(j, key, "");
}

int voter_count(const json& j) {
  if (j.contains("voters")) return field<int>(j, "voters", 0);
  if (j.contains("votes")) return static_cast<int>(j.at("votes").size());
  throw ConfigError("config needs 'voters' or 'votes'");
}

}  // namespace

json parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!kTopLevel.count(k)) throw ConfigError("unknown config key '" + k + "'");
  if (!j.contains("schema_version")) throw ConfigError("config is missing 'schema_version'");
  if (field<int>(j, "schema_version", 0) != kSchemaVersion)
    throw ConfigError("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
  return j;
}

Experiment experiment_from(const json& j, bool attack_mode) {
  Experiment e;
  const std::string protocol = require_string(j, "protocol");
  const int N = voter_count(j);
  e.protocol = make_protocol(protocol, N, j.value("params", json()));
  bind_verify(e.protocol, field<std::string>(j, "verify", ""));
  e.adversary_name = field<std::string>(j, "adversary", attack_mode ? "" : "honest");
  if (e.adversary_name.empty()) throw ConfigError("run-attack needs an 'adversary'");
  e.adversary = make_adversary(e.adversary_name, protocol, j.value("adversary_params", json()));
  if (j.contains("experiment"))
    e.game = parse_game(field<std::string>(j, "experiment", ""));
  else if (attack_mode)
    e.game = adversary_entry(e.adversary_name).natural_game;
  else
    throw ConfigError("config is missing 'experiment'");

  ExperimentConfig& c = e.cfg;
  c.voters = N;
  c.epsilon = field<double>(j, "epsilon", 0.0);
  c.votes = field<std::vector<int>>(j, "votes", {});
  c.order = field<std::vector<int>>(j, "order", {});
  c.permutation = field<std::vector<int>>(j, "permutation", {});
  c.trials = field<uint64_t>(j, "trials", 1);
  c.seed = field<uint64_t>(j, "seed", 0);
  c.threads = field<int>(j, "threads", 1);
  if (j.contains("params") && j.at("params").contains("delta0")) c.delta0 = j.at("params").at("delta0").get<int>();
  if (!c.permutation.empty() && e.game != Game::qpriv) throw ConfigError("'permutation' applies to qpriv only");
  return e;
}

TrialReport run(const json& j, bool attack_mode) {
  Experiment e = experiment_from(j, attack_mode);
  return run_experiment(e.game, e.cfg, e.adversary, e.protocol);
}

json run_protocol(const json& j) {
  const std::string protocol = require_string(j, "protocol");
  if (!j.contains("votes")) throw ConfigError("run-protocol needs a 'votes' vector");
  const std::vector<int> votes = field<std::vector<int>>(j, "votes", {});
  const int N = voter_count(j);
  if (static_cast<int>(votes.size()) != N) throw ConfigError("'votes' must have one entry per voter");
  ProtocolBinding b = make_protocol(protocol, N, j.value("params", json()));
  std::unique_ptr<Session> s = b.make();
  for (int v : votes)
    if (v < 0 || v >= s->candidates()) throw DomainError("vote " + std::to_string(v) + " outside the candidate range");
  std::vector<int> order = field<std::vector<int>>(j, "order", {});
  if (order.empty())
    for (int k = 0; k < N; ++k) order.push_back(k);
  s->set_order(order);

  Rng rng(field<uint64_t>(j, "seed", 0));
  s->setup(rng);
  s->ballots().open_casting();
  for (int k : order) s->cast_honest(k, votes.at(static_cast<std::size_t>(k)), rng);
  s->ballots().close_casting();
  TallyResult x = s->tally(rng);

  std::vector<int64_t> expected(static_cast<std::size_t>(s->candidates()), 0);
  for (int v : votes) ++expected[static_cast<std::size_t>(v)];
  json out;
  out["protocol"] = protocol;
  out["voters"] = N;
  out["votes"] = votes;
  out["tally"] = {{"bottom", x.bottom}, {"counts", x.counts}, {"note", x.note}};
  out["expected"] = expected;
  out["correct"] = !x.bottom && x.counts == expected;
  out["aux"] = s->aux();
  return out;
}

json report_json(const TrialReport& r) {
  json j;
  j["game"] = r.game;
  j["protocol"] = r.protocol;
  j["adversary"] = r.adversary;
  j["seed"] = r.seed;
  j["trials"] = r.trials.size();
  j["wins"] = r.wins;
  j["losses"] = r.losses;
  j["false_attacks"] = r.false_attacks;
  try {
    Estimate e = estimate_advantage(r);
    j["estimate"] = {{"point", e.point}, {"lo", e.lo}, {"hi", e.hi}, {"n", e.n}};
  } catch (const DegenerateSample&) {
    j["estimate"] = nullptr;
  }
  return j;
}

std::string report_csv(const TrialReport& r) {
  std::ostringstream os;
  os << "trial_index,seed,outcome,auxiliary\n";
  for (std::size_t i = 0; i < r.trials.size(); ++i) {
    const auto& t = r.trials[i];
    std::string aux = t.aux;
    if (aux.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char ch : aux) q += (ch == '"') ? std::string("\"\"") : std::string(1, ch);
      aux = q + "\"";
    }
    os << i << ',' << t.seed << ',' << t.outcome << ',' << aux << '\n';
  }
  return os.str();
}

}  // namespace qevote::config
