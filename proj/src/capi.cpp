#include "qevote/qevote.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "qevote/analysis.hpp"
#include "qevote/config.hpp"
#include "qevote/errors.hpp"
#include "qevote/qcore.hpp"

struct qev_rng {
  qevote::Rng rng;
};

struct qev_state {
  qevote::PureState state;
};

struct qev_report {
  qevote::TrialReport report;
};

namespace {

thread_local std::string g_last_error;

qev_status fail(qev_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Maps every exception escaping the core onto a status code.
template <typename F>
qev_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return QEV_OK;
  } catch (const qevote::Error& e) {
    return fail(static_cast<qev_status>(e.status()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(QEV_CONFIG_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(QEV_CAPACITY_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(QEV_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(QEV_INTERNAL_ERROR, "unknown failure");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void need(const void* p, const char* what) {
  if (!p) throw qevote::ParameterError(std::string(what) + " must not be NULL");
}

}  // namespace

extern "C" {

const char* qev_version(void) { return "1.0.0"; }

const char* qev_status_name(qev_status s) { return qevote::status_name(static_cast<qevote::Status>(s)); }

const char* qev_last_error_message(void) { return g_last_error.c_str(); }

void qev_free_string(char* s) { std::free(s); }

qev_status qev_rng_create(uint64_t seed, qev_rng** out) {
  return guarded([&] {
    need(out, "out");
    *out = new qev_rng{qevote::Rng(seed)};
  });
}

void qev_rng_destroy(qev_rng* rng) { delete rng; }

qev_status qev_rng_next_u64(qev_rng* rng, uint64_t* out) {
  return guarded([&] {
    need(rng, "rng");
    need(out, "out");
    *out = rng->rng.next_u64();
  });
}

qev_status qev_rng_uniform(qev_rng* rng, double* out) {
  return guarded([&] {
    need(rng, "rng");
    need(out, "out");
    *out = rng->rng.uniform();
  });
}

qev_status qev_state_basis(const int* dims, size_t n, const int* digits, qev_state** out) {
  return guarded([&] {
    need(dims, "dims");
    need(digits, "digits");
    need(out, "out");
    std::vector<int> d(dims, dims + n), g(digits, digits + n);
    *out = new qev_state{qevote::PureState::basis(d, g)};
  });
}

void qev_state_destroy(qev_state* s) { delete s; }

qev_status qev_state_size(const qev_state* s, size_t* out) {
  return guarded([&] {
    need(s, "state");
    need(out, "out");
    *out = s->state.size();
  });
}

qev_status qev_state_amplitude(const qev_state* s, size_t index, double* re, double* im) {
  return guarded([&] {
    need(s, "state");
    need(re, "re");
    need(im, "im");
    if (index >= s->state.size()) throw qevote::IndexError("amplitude index out of range");
    *re = s->state.amps()[index].real();
    *im = s->state.amps()[index].imag();
  });
}

qev_status qev_state_apply_shift(qev_state* s, int target, int times) {
  return guarded([&] {
    need(s, "state");
    if (target < 0 || target >= s->state.qudits()) throw qevote::IndexError("target qudit out of range");
    int d = s->state.dims()[static_cast<std::size_t>(target)];
    s->state = qevote::apply_unitary(s->state, qevote::gates::shift(d, times), {target});
  });
}

qev_status qev_state_apply_fourier(qev_state* s, int target) {
  return guarded([&] {
    need(s, "state");
    if (target < 0 || target >= s->state.qudits()) throw qevote::IndexError("target qudit out of range");
    int d = s->state.dims()[static_cast<std::size_t>(target)];
    s->state = qevote::apply_unitary(s->state, qevote::gates::fourier(d), {target});
  });
}

qev_status qev_state_measure(qev_state* s, int target, qev_basis basis, qev_rng* rng, int* outcome) {
  return guarded([&] {
    need(s, "state");
    need(rng, "rng");
    need(outcome, "outcome");
    if (basis != QEV_BASIS_COMPUTATIONAL && basis != QEV_BASIS_FOURIER) throw qevote::DomainError("unknown basis");
    qevote::MeasurementRecord r = basis == QEV_BASIS_COMPUTATIONAL
                                      ? qevote::measure_computational(s->state, target, rng->rng)
                                      : qevote::measure_fourier(s->state, target, rng->rng);
    s->state = std::move(r.collapsed);
    *outcome = static_cast<int>(r.outcome);
  });
}

qev_status qev_povm_sample(int D, double theta_v, qev_rng* rng, double* out) {
  return guarded([&] {
    need(rng, "rng");
    need(out, "out");
    *out = qevote::povm_theta_sample(D, theta_v, rng->rng);
  });
}

qev_status qev_povm_density(double theta, int D, double theta_v, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = qevote::povm_density(theta, D, theta_v);
  });
}

qev_status qev_pr_win_given_bad(int N, int t, int delta0, char** fraction, double* approx) {
  return guarded([&] {
    qevote::ExactRational p = qevote::pr_win_given_bad(N, t, delta0);
    if (fraction) *fraction = dup_string(boost::multiprecision::numerator(p).str() + "/" +
                                         boost::multiprecision::denominator(p).str());
    if (approx) *approx = static_cast<double>(p);
  });
}

qev_status qev_three_bin_mass(int D, int l_v, double delta, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = qevote::three_bin_mass(D, l_v, delta).value;
  });
}

qev_status qev_rounds_threshold(int64_t rho, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = qevote::rounds_threshold(rho);
  });
}

qev_status qev_taylor_sin2_lower(double x, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = qevote::taylor_sin2_lower(x);
  });
}

qev_status qev_verify_bounds(const char* filter, int inject_fault, char** report_json, int* all_pass) {
  return guarded([&] {
    need(report_json, "report_json");
    auto checks = qevote::run_bound_suite(filter ? filter : "", inject_fault != 0);
    nlohmann::json j = nlohmann::json::array();
    bool ok = true;
    for (const auto& c : checks) {
      j.push_back({{"name", c.name},
                   {"group", c.group},
                   {"claim", c.claim},
                   {"computed", c.computed},
                   {"pass", c.pass},
                   {"detail", c.detail}});
      ok = ok && c.pass;
    }
    *report_json = dup_string(j.dump(2));
    if (all_pass) *all_pass = ok ? 1 : 0;
  });
}

qev_status qev_validate_config(const char* config_json) {
  return guarded([&] {
    need(config_json, "config_json");
    qevote::config::parse(config_json);
  });
}

qev_status qev_run_protocol(const char* config_json, char** result_json) {
  return guarded([&] {
    need(config_json, "config_json");
    need(result_json, "result_json");
    *result_json = dup_string(qevote::config::run_protocol(qevote::config::parse(config_json)).dump(2));
  });
}

static qev_status run_report(const char* config_json, qev_report** out, bool attack) {
  return guarded([&] {
    need(config_json, "config_json");
    need(out, "out");
    auto rep = std::make_unique<qev_report>();
    rep->report = qevote::config::run(qevote::config::parse(config_json), attack);
    *out = rep.release();
  });
}

qev_status qev_run_experiment(const char* config_json, qev_report** out) { return run_report(config_json, out, false); }

qev_status qev_run_attack(const char* config_json, qev_report** out) { return run_report(config_json, out, true); }

qev_status qev_catalog(char** catalog_json) {
  return guarded([&] {
    need(catalog_json, "catalog_json");
    nlohmann::json j;
    j["protocols"] = qevote::protocol_names();
    j["adversaries"] = nlohmann::json::array();
    for (const auto& e : qevote::adversary_catalog())
      j["adversaries"].push_back(
          {{"name", e.name}, {"protocol", e.protocol}, {"game", qevote::game_name(e.natural_game)}});
    j["bound_groups"] = qevote::bound_groups();
    *catalog_json = dup_string(j.dump(2));
  });
}

void qev_report_destroy(qev_report* r) { delete r; }

qev_status qev_report_counts(const qev_report* r, uint64_t* trials, uint64_t* wins, uint64_t* losses,
                             uint64_t* false_attacks) {
  return guarded([&] {
    need(r, "report");
    if (trials) *trials = r->report.trials.size();
    if (wins) *wins = r->report.wins;
    if (losses) *losses = r->report.losses;
    if (false_attacks) *false_attacks = r->report.false_attacks;
  });
}

qev_status qev_report_outcome(const qev_report* r, uint64_t index, int* outcome, uint64_t* seed) {
  return guarded([&] {
    need(r, "report");
    if (index >= r->report.trials.size()) throw qevote::IndexError("trial index out of range");
    if (outcome) *outcome = r->report.trials[index].outcome;
    if (seed) *seed = r->report.trials[index].seed;
  });
}

qev_status qev_report_estimate(const qev_report* r, double* point, double* lo, double* hi) {
  return guarded([&] {
    need(r, "report");
    qevote::Estimate e = qevote::estimate_advantage(r->report);
    if (point) *point = e.point;
    if (lo) *lo = e.lo;
    if (hi) *hi = e.hi;
  });
}

qev_status qev_report_json(const qev_report* r, char** out) {
  return guarded([&] {
    need(r, "report");
    need(out, "out");
    *out = dup_string(qevote::config::report_json(r->report).dump(2));
  });
}

qev_status qev_report_csv(const qev_report* r, char** out) {
  return guarded([&] {
    need(r, "report");
    need(out, "out");
    *out = dup_string(qevote::config::report_csv(r->report));
  });
}

}  // extern "C"
