#pragma once

#include <string>
#include <vector>

#include "qevote/harness.hpp"
#include "json.hpp"

namespace qevote {

using json = nlohmann::json;

// Protocol parameters are validated against a per-protocol key list; unknown
// keys raise ConfigError.
ProtocolBinding make_protocol(const std::string& name, int voters, const json& params);
std::vector<std::string> protocol_names();

// `verify` names an explicit Verify predicate for qver ("" leaves it unbound).
void bind_verify(ProtocolBinding& binding, const std::string& verify);

struct AdversaryEntry {
  std::string name;
  std::string protocol;  // empty: usable with every protocol
  Game natural_game;     // the game the attack targets
};

AdversaryFactory make_adversary(const std::string& name, const std::string& protocol, const json& params);
const std::vector<AdversaryEntry>& adversary_catalog();
const AdversaryEntry& adversary_entry(const std::string& name);

Game parse_game(const std::string& s);

}  // namespace qevote
