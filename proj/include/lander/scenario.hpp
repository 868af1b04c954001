#ifndef LANDER_SCENARIO_HPP
#define LANDER_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace lander::scenario {

enum class Kind { kGravity, kHop, kTumble, kCoverage, kExclusion, kEvolve };

const char* kind_name(Kind k);
std::optional<Kind> kind_from_name(const std::string& name);

struct ScenarioConfig {
    Kind kind = Kind::kGravity;
    nlohmann::json params;   // validated, defaults filled
    std::string out_dir;
    std::uint64_t seed = 1;
};

// Strict parse: unknown keys are errors (named in the message), required keys
// checked, ranges validated, defaults filled. `kind` in the file is optional
// but must agree with the subcommand when present.
ScenarioConfig parse_config(const std::string& path, Kind kind);
ScenarioConfig parse_config_text(const std::string& text, Kind kind,
                                 const std::string& origin = "<memory>");

// Replace the config's seed (CLI --seed). Evolve runs keep theirs under
// "master_seed"; everything else uses "seed".
void override_seed(ScenarioConfig& cfg, std::uint64_t seed);

struct RunManifest {
    std::string config_hash;  // order-independent hash of the resolved config
    std::string tool_version;
    std::uint64_t seed = 0;
    double wall_time_s = 0;
    std::vector<std::string> files;  // everything written under out_dir
    bool converged = true;
};

// Dispatch to the owning module, write CSV/JSON artifacts plus manifest.json
// under out_dir. Returns the manifest; converged=false marks a run that hit
// its step budget (CLI exits 2 for those).
RunManifest run(const ScenarioConfig& cfg);

// FNV-1a over the canonical (key-sorted) dump; stable under key reordering.
std::string config_hash(const nlohmann::json& j);

}  // namespace lander::scenario

#endif
