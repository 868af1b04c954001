// landersim: gravity maps, hop/tumble mobility runs, swarm coverage and the
// genetic design search, all driven by JSON scenario configs.
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lander/scenario.hpp"
#include "lander/version.hpp"

namespace {

struct SubSpec {
    const char* name;
    lander::scenario::Kind kind;
    const char* help;
};

constexpr SubSpec kSubs[] = {
    {"gravity", lander::scenario::Kind::kGravity, "polyhedron gravity slice map"},
    {"hop", lander::scenario::Kind::kHop, "propelled ballistic hop"},
    {"tumble", lander::scenario::Kind::kTumble, "wheel-driven tumble / hybrid hop"},
    {"coverage", lander::scenario::Kind::kCoverage, "virtual-force swarm dispersal"},
    {"exclusion", lander::scenario::Kind::kExclusion, "dispersal around an impact site"},
    {"evolve", lander::scenario::Kind::kEvolve, "NSGA-II swarm design search"},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"asteroid nano-lander simulation toolkit"};
    app.set_version_flag("--version", lander::kToolVersion);
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    std::vector<CLI::App*> subs;
    for (const auto& s : kSubs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--config", config_path, "scenario config (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_option("--seed", seed, "override the config seed");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        for (size_t i = 0; i < subs.size(); ++i) {
            if (!subs[i]->parsed()) continue;
            auto cfg = lander::scenario::parse_config(config_path, kSubs[i].kind);
            cfg.out_dir = out_dir;
            if (subs[i]->count("--seed") > 0) lander::scenario::override_seed(cfg, seed);
            auto man = lander::scenario::run(cfg);
            std::printf("%s: wrote %zu files to %s (config %s, %.3f s)\n", kSubs[i].name,
                        man.files.size(), out_dir.c_str(), man.config_hash.c_str(),
                        man.wall_time_s);
            if (!man.converged) {
                std::fprintf(stderr, "warning: run hit its step budget before settling\n");
                return 2;
            }
            return 0;
        }
        std::fprintf(stderr, "error: no subcommand given\n");
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
