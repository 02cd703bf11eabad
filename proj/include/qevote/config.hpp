#pragma once

#include <string>

#include "qevote/bindings.hpp"
#include "qevote/harness.hpp"

namespace qevote::config {

inline constexpr int kSchemaVersion = 1;

// Parses and checks top-level keys and the schema version.
json parse(const std::string& text);

struct Experiment {
  Game game = Game::qint;
  ExperimentConfig cfg;
  ProtocolBinding protocol;
  AdversaryFactory adversary;
  std::string adversary_name;
};

// attack_mode: the game defaults to the adversary's natural game.
Experiment experiment_from(const json& j, bool attack_mode);
TrialReport run(const json& j, bool attack_mode);

// One honest execution with the configured votes.
json run_protocol(const json& j);

json report_json(const TrialReport& r);
std::string report_csv(const TrialReport& r);

}  // namespace qevote::config
