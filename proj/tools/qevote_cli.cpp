// qevote: command-line front end over the C API.
#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qevote/qevote.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

struct CliError {
  int code;
  std::string message;
};

int exit_code_for(qev_status s) {
  switch (s) {
    case QEV_OK: return kExitOk;
    case QEV_PARAMETER_ERROR:
    case QEV_CONFIG_ERROR:
    case QEV_DOMAIN_ERROR:
    case QEV_INDEX_ERROR:
    case QEV_CAPACITY_ERROR: return kExitUsage;
    case QEV_INTERNAL_ERROR:
    case QEV_UNITARITY_ERROR: return kExitInternal;
    default: return kExitFail;
  }
}

void check(qev_status s) {
  if (s != QEV_OK)
    throw CliError{exit_code_for(s), std::string(qev_status_name(s)) + ": " + qev_last_error_message()};
}

// Owns a string allocated by the library.
class LibString {
 public:
  LibString() = default;
  LibString(const LibString&) = delete;
  LibString& operator=(const LibString&) = delete;
  ~LibString() { qev_free_string(p_); }
  char** out() { return &p_; }
  std::string str() const { return p_ ? std::string(p_) : std::string(); }

 private:
  char* p_ = nullptr;
};

struct ReportHandle {
  qev_report* r = nullptr;
  ReportHandle() = default;
  ReportHandle(const ReportHandle&) = delete;
  ReportHandle& operator=(const ReportHandle&) = delete;
  ~ReportHandle() { qev_report_destroy(r); }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CliError{kExitUsage, "cannot read " + p.string()};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw CliError{kExitFail, "cannot write " + p.string()};
  out << data;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw CliError{kExitInternal, "SHA-256 failed"};
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw CliError{kExitUsage, what + " is not valid JSON: " + e.what()};
  }
}

struct Globals {
  std::optional<uint64_t> seed;
  std::optional<uint64_t> trials;
  std::optional<int> threads;
  std::string out = "qevote-out";
  std::string config;
};

// Run outputs: file name -> payload, written in order and hashed into the manifest.
using Artifacts = std::vector<std::pair<std::string, std::string>>;

json effective_config(const Globals& g) {
  if (g.config.empty()) throw CliError{kExitUsage, "--config is required"};
  json cfg = parse_json(read_file(g.config), g.config);
  if (!cfg.is_object()) throw CliError{kExitUsage, "config must be a JSON object"};
  if (g.seed) cfg["seed"] = *g.seed;
  if (g.trials) cfg["trials"] = *g.trials;
  if (g.threads) cfg["threads"] = *g.threads;
  check(qev_validate_config(cfg.dump().c_str()));
  return cfg;
}

void write_run(const std::string& subcommand, const json& cfg, const json& options, const std::string& config_path,
               const fs::path& out, const Artifacts& artifacts) {
  fs::create_directories(out);
  json manifest;
  manifest["tool"] = "qevote";
  manifest["version"] = qev_version();
  manifest["subcommand"] = subcommand;
  manifest["config_path"] = config_path;
  manifest["config"] = cfg;
  manifest["options"] = options;
  manifest["seed"] = cfg.is_object() ? cfg.value("seed", uint64_t{0}) : uint64_t{0};
  manifest["output_dir"] = out.string();
  manifest["created_utc"] = utc_now();
  manifest["artifacts"] = json::array();
  for (const auto& [name, data] : artifacts) {
    write_file(out / name, data);
    manifest["artifacts"].push_back({{"file", name}, {"sha256", sha256_hex(data)}, {"bytes", data.size()}});
  }
  write_file(out / "manifest.json", manifest.dump(2) + "\n");
}

// --- run-protocol ----------------------------------------------------------

int run_protocol(const json& cfg, Artifacts& art) {
  LibString res;
  check(qev_run_protocol(cfg.dump().c_str(), res.out()));
  json r = parse_json(res.str(), "library result");
  const auto& t = r["tally"];
  std::cout << "protocol " << r["protocol"].get<std::string>() << ", " << r["voters"] << " voters\n";
  if (t["bottom"].get<bool>()) {
    std::cout << "tally: bottom (" << t["note"].get<std::string>() << ")\n";
  } else {
    std::cout << "tally:";
    const auto& counts = t["counts"];
    for (std::size_t c = 0; c < counts.size(); ++c) std::cout << " candidate" << c << "=" << counts[c];
    std::cout << "\n";
  }
  std::cout << (r["correct"].get<bool>() ? "result matches the cast votes\n" : "result does NOT match the cast votes\n");
  art.push_back({"result.json", r.dump(2) + "\n"});
  return r["correct"].get<bool>() ? kExitOk : kExitFail;
}

// --- run-experiment / run-attack ------------------------------------------

struct Summary {
  uint64_t trials = 0, wins = 0, losses = 0, false_attacks = 0;
  std::optional<double> point, lo, hi;
};

Summary run_one(const json& cfg, bool attack, std::string& report_json, std::string& csv) {
  ReportHandle h;
  check(attack ? qev_run_attack(cfg.dump().c_str(), &h.r) : qev_run_experiment(cfg.dump().c_str(), &h.r));
  Summary s;
  check(qev_report_counts(h.r, &s.trials, &s.wins, &s.losses, &s.false_attacks));
  double p = 0, lo = 0, hi = 0;
  if (qev_report_estimate(h.r, &p, &lo, &hi) == QEV_OK) {
    s.point = p;
    s.lo = lo;
    s.hi = hi;
  }
  LibString js, cs;
  check(qev_report_json(h.r, js.out()));
  check(qev_report_csv(h.r, cs.out()));
  report_json = js.str() + "\n";
  csv = cs.str();
  return s;
}

std::string fmt(std::optional<double> v) {
  if (!v) return "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << *v;
  return os.str();
}

void print_summary(const json& report, const Summary& s) {
  std::cout << report.value("game", "") << " / " << report.value("protocol", "") << " / "
            << report.value("adversary", "") << ": " << s.trials << " trials, " << s.wins << " wins, " << s.losses
            << " losses, " << s.false_attacks << " false attacks; win rate " << fmt(s.point) << " [" << fmt(s.lo)
            << ", " << fmt(s.hi) << "]\n";
}

json::json_pointer sweep_pointer(const std::string& dotted) {
  std::string p;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) p += "/" + part;
  return json::json_pointer(p);
}

int run_experiment(json cfg, bool attack, Artifacts& art) {
  if (!cfg.contains("sweep")) {
    std::string rj, csv;
    Summary s = run_one(cfg, attack, rj, csv);
    print_summary(parse_json(rj, "report"), s);
    art.push_back({"report.json", rj});
    art.push_back({"trials.csv", csv});
    return kExitOk;
  }
  json sweep = cfg["sweep"];
  cfg.erase("sweep");
  if (!sweep.is_object() || !sweep.contains("parameter") || !sweep.contains("values") || !sweep["values"].is_array())
    throw CliError{kExitUsage, "sweep needs 'parameter' and a 'values' array"};
  for (const auto& [k, v] : sweep.items())
    if (k != "parameter" && k != "values" && k != "reference")
      throw CliError{kExitUsage, "unknown sweep key '" + k + "'"};
  const std::string param = sweep["parameter"].get<std::string>();
  std::ostringstream series;
  series << "index," << param << ",trials,wins,losses,false_attacks,point,lo,hi\n";
  std::size_t i = 0;
  for (const auto& value : sweep["values"]) {
    json point = cfg;
    point[sweep_pointer(param)] = value;
    std::string rj, csv;
    Summary s = run_one(point, attack, rj, csv);
    std::cout << param << "=" << value.dump() << ": ";
    print_summary(parse_json(rj, "report"), s);
    art.push_back({"report_" + std::to_string(i) + ".json", rj});
    art.push_back({"trials_" + std::to_string(i) + ".csv", csv});
    series << i << ',' << value.dump() << ',' << s.trials << ',' << s.wins << ',' << s.losses << ','
           << s.false_attacks << ',' << fmt(s.point) << ',' << fmt(s.lo) << ',' << fmt(s.hi) << '\n';
    ++i;
  }
  art.push_back({"series.csv", series.str()});
  json plot = {{"mark", "line"},
               {"data", "series.csv"},
               {"x", {{"field", param}, {"type", "quantitative"}}},
               {"y", {{"field", "point"}, {"type", "quantitative"}, {"title", "win rate"}}},
               {"band", {{"lower", "lo"}, {"upper", "hi"}}}};
  if (sweep.contains("reference")) plot["reference"] = sweep["reference"];
  art.push_back({"plot.json", plot.dump(2) + "\n"});
  return kExitOk;
}

// --- verify-bounds -----------------------------------------------------------

int verify_bounds(const std::string& filter, bool inject, Artifacts& art) {
  LibString rep;
  int all = 0;
  check(qev_verify_bounds(filter.empty() ? nullptr : filter.c_str(), inject ? 1 : 0, rep.out(), &all));
  json checks = parse_json(rep.str(), "bound report");
  if (checks.empty()) throw CliError{kExitUsage, "no bound matches filter '" + filter + "'"};
  std::cout << std::left << std::setw(6) << "PASS" << std::setw(16) << "group" << std::setw(44) << "bound"
            << "computed\n";
  for (const auto& c : checks) {
    std::cout << std::left << std::setw(6) << (c["pass"].get<bool>() ? "ok" : "FAIL") << std::setw(16)
              << c["group"].get<std::string>() << std::setw(44) << c["name"].get<std::string>()
              << std::setprecision(10) << c["computed"].get<double>() << "\n";
  }
  for (const auto& c : checks) {
    if (c["pass"].get<bool>()) continue;
    const std::string detail = c["detail"].get<std::string>();
    std::cerr << "failed bound: " << c["name"].get<std::string>() << " (" << c["claim"].get<std::string>()
              << (detail.empty() ? "" : "; " + detail) << ")\n";
  }
  art.push_back({"bounds.json", checks.dump(2) + "\n"});
  return all ? kExitOk : kExitFail;
}

// --- dispatch and export -------------------------------------------------------

int dispatch(const std::string& sub, const json& cfg, const std::string& filter, bool inject, Artifacts& art) {
  if (sub == "run-protocol") return run_protocol(cfg, art);
  if (sub == "run-experiment") return run_experiment(cfg, false, art);
  if (sub == "run-attack") return run_experiment(cfg, true, art);
  if (sub == "verify-bounds") return verify_bounds(filter, inject, art);
  throw CliError{kExitUsage, "unknown subcommand " + sub};
}

int export_replay(const std::string& manifest_path, const fs::path& out) {
  json m = parse_json(read_file(manifest_path), manifest_path);
  const std::string sub = m.at("subcommand").get<std::string>();
  const json cfg = m.value("config", json());
  const json extra = m.value("options", json::object());
  Artifacts art;
  dispatch(sub, cfg, extra.value("filter", ""), extra.value("inject_fault", false), art);
  std::map<std::string, std::string> produced(art.begin(), art.end());
  bool same = true;
  for (const auto& a : m.at("artifacts")) {
    const std::string name = a.at("file").get<std::string>();
    auto it = produced.find(name);
    if (it == produced.end()) {
      std::cerr << "replay did not produce " << name << "\n";
      same = false;
      continue;
    }
    bool match = sha256_hex(it->second) == a.at("sha256").get<std::string>();
    std::cout << (match ? "identical " : "DIFFERS   ") << name << "\n";
    same = same && match;
  }
  if (produced.size() != m.at("artifacts").size()) same = false;
  if (!out.empty()) {
    fs::create_directories(out);
    for (const auto& [name, data] : art) write_file(out / name, data);
  }
  std::cout << (same ? "replay is byte-identical\n" : "replay differs from the manifest\n");
  return same ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qevote: quantum e-voting protocol simulations, attacks and security experiments"};
  app.require_subcommand(1);
  Globals g;
  uint64_t seed = 0, trials = 0;
  int threads = 0;
  auto* o_seed = app.add_option("--seed", seed, "Base seed (u64)");
  auto* o_trials = app.add_option("--trials", trials, "Number of trials");
  auto* o_threads = app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--config", g.config, "JSON config path");
  app.fallthrough();

  std::string filter, manifest;
  bool inject = false;
  auto* c_proto = app.add_subcommand("run-protocol", "One honest execution; exit 1 if the result is wrong or aborts");
  auto* c_exp = app.add_subcommand("run-experiment", "Security experiment (qver, qint or qpriv), optional sweep");
  auto* c_att = app.add_subcommand("run-attack", "Named attack in the game it targets");
  auto* c_bounds = app.add_subcommand("verify-bounds", "Check every analytic bound; exit 1 on a failed relation");
  c_bounds->add_option("--filter", filter, "Only this bound group");
  c_bounds->add_flag("--inject-fault", inject, "Perturb one claimed constant (negative control)");
  auto* c_export = app.add_subcommand("export", "Replay a manifest and confirm byte-identical artifacts");
  c_export->add_option("--manifest", manifest, "manifest.json of an earlier run")->required();
  for (auto* c : {c_proto, c_exp, c_att, c_bounds, c_export}) c->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }
  if (o_seed->count()) g.seed = seed;
  if (o_trials->count()) g.trials = trials;
  if (o_threads->count()) g.threads = threads;

  try {
    if (c_export->parsed()) return export_replay(manifest, g.out == "qevote-out" ? fs::path() : fs::path(g.out));
    std::string sub = app.get_subcommands().front()->get_name();
    json cfg;
    if (sub != "verify-bounds") cfg = effective_config(g);
    Artifacts art;
    int rc = dispatch(sub, cfg, filter, inject, art);
    write_run(sub, cfg, {{"filter", filter}, {"inject_fault", inject}}, g.config, g.out, art);
    return rc;
  } catch (const CliError& e) {
    std::cerr << "qevote: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "qevote: " << e.what() << "\n";
    return kExitInternal;
  }
}
