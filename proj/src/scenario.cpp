#include "lander/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "lander/constants.hpp"
#include "lander/errors.hpp"
#include "lander/evolve.hpp"
#include "lander/log.hpp"
#include "lander/mobility.hpp"
#include "lander/polyhedron_gravity.hpp"
#include "lander/rng.hpp"
#include "lander/shape_model.hpp"
#include "lander/swarm_coverage.hpp"
#include "lander/version.hpp"

namespace lander::scenario {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
    throw ConfigError(origin + ": " + msg);
}

std::string quoted(const char* key) { return "'" + std::string(key) + "'"; }

// Strict reader: every key must be fetched through one of the getters (or
// marked with know()); finish() rejects anything left over by name. Getters
// type-check, range-check, apply defaults, and copy the resolved value into
// the canonical params object.
class Schema {
public:
    Schema(const json& in, const std::string& origin, const char* kind)
        : in_(in), origin_(origin), kind_(kind) {
        if (!in.is_object()) fail(origin_, "config must be a JSON object");
        know("kind");
    }

    void know(const char* key) { known_.emplace_back(key); }
    bool has(const char* key) const { return in_.contains(key); }
    const json& raw(const char* key) const { return in_.at(key); }
    void set(const char* key, json v) { out_[key] = std::move(v); }

    double number(const char* key, std::optional<double> def) {
        know(key);
        if (!in_.contains(key)) {
            if (!def)
                fail(origin_, "missing required key " + quoted(key) + " for " + kind_ + " config");
            out_[key] = *def;
            return *def;
        }
        const json& j = in_.at(key);
        if (!j.is_number()) fail(origin_, quoted(key) + " must be a number");
        double v = j.get<double>();
        out_[key] = v;
        return v;
    }

    double positive(const char* key, std::optional<double> def) {
        double v = number(key, def);
        if (!(v > 0)) fail(origin_, quoted(key) + " must be positive");
        return v;
    }

    double nonneg(const char* key, std::optional<double> def) {
        double v = number(key, def);
        if (v < 0) fail(origin_, quoted(key) + " must be non-negative");
        return v;
    }

    double in_range(const char* key, std::optional<double> def, double lo, double hi) {
        double v = number(key, def);
        if (!(v >= lo && v <= hi)) {
            std::ostringstream os;
            os << quoted(key) << " = " << v << " is outside [" << lo << ", " << hi << "]";
            fail(origin_, os.str());
        }
        return v;
    }

    long integer(const char* key, std::optional<long> def, long lo, long hi) {
        know(key);
        if (!in_.contains(key)) {
            if (!def)
                fail(origin_, "missing required key " + quoted(key) + " for " + kind_ + " config");
            out_[key] = *def;
            return *def;
        }
        const json& j = in_.at(key);
        if (!j.is_number_integer()) fail(origin_, quoted(key) + " must be an integer");
        long v = j.get<long>();
        if (v < lo || v > hi) {
            std::ostringstream os;
            os << quoted(key) << " = " << v << " is outside [" << lo << ", " << hi << "]";
            fail(origin_, os.str());
        }
        out_[key] = v;
        return v;
    }

    bool boolean(const char* key, bool def) {
        know(key);
        if (!in_.contains(key)) {
            out_[key] = def;
            return def;
        }
        const json& j = in_.at(key);
        if (!j.is_boolean()) fail(origin_, quoted(key) + " must be a boolean");
        bool v = j.get<bool>();
        out_[key] = v;
        return v;
    }

    std::string choice(const char* key, const char* def, std::initializer_list<const char*> allowed) {
        know(key);
        std::string v = def;
        if (in_.contains(key)) {
            const json& j = in_.at(key);
            if (!j.is_string()) fail(origin_, quoted(key) + " must be a string");
            v = j.get<std::string>();
        }
        bool ok = false;
        for (const char* a : allowed) ok = ok || v == a;
        if (!ok) {
            std::string opts;
            for (const char* a : allowed) opts += (opts.empty() ? "\"" : ", \"") + std::string(a) + "\"";
            fail(origin_, quoted(key) + " must be one of " + opts);
        }
        out_[key] = v;
        return v;
    }

    std::uint64_t seed(const char* key = "seed") {
        know(key);
        std::uint64_t v = 1;
        if (in_.contains(key)) {
            const json& j = in_.at(key);
            if (!j.is_number_unsigned() && !j.is_number_integer())
                fail(origin_, quoted(key) + " must be a non-negative integer");
            if (j.is_number_integer() && j.get<long long>() < 0)
                fail(origin_, quoted(key) + " must be a non-negative integer");
            v = j.get<std::uint64_t>();
        }
        out_[key] = v;
        return v;
    }

    json finish() {
        for (const auto& item : in_.items()) {
            if (std::find(known_.begin(), known_.end(), item.key()) == known_.end())
                fail(origin_, "unknown key '" + item.key() + "' for " + kind_ + " config");
        }
        return std::move(out_);
    }

    const std::string& origin() const { return origin_; }

private:
    const json& in_;
    std::string origin_;
    std::string kind_;
    std::vector<std::string> known_;
    json out_ = json::object();
};

// ---- per-kind resolution -------------------------------------------------

void resolve_shape_source(Schema& s, const json& in) {
    s.know("shape_path");
    s.know("shape");
    s.know("size");
    s.know("subdivisions");
    if (in.contains("shape_path")) {
        if (in.contains("shape") || in.contains("size") || in.contains("subdivisions"))
            fail(s.origin(), "'shape_path' excludes 'shape', 'size' and 'subdivisions'");
        if (!in.at("shape_path").is_string()) fail(s.origin(), "'shape_path' must be a string");
        s.set("shape_path", in.at("shape_path").get<std::string>());
        return;
    }
    std::string shape = "cube";
    if (in.contains("shape")) {
        if (!in.at("shape").is_string()) fail(s.origin(), "'shape' must be a string");
        shape = in.at("shape").get<std::string>();
        if (shape != "cube" && shape != "icosphere")
            fail(s.origin(), "'shape' must be one of \"cube\", \"icosphere\"");
    }
    s.set("shape", shape);
    double size = 500;
    if (in.contains("size")) {
        if (!in.at("size").is_number()) fail(s.origin(), "'size' must be a number");
        size = in.at("size").get<double>();
    }
    if (!(size > 0)) fail(s.origin(), "'size' must be positive");
    s.set("size", size);
    long sub = 2;
    if (in.contains("subdivisions")) {
        if (!in.at("subdivisions").is_number_integer())
            fail(s.origin(), "'subdivisions' must be an integer");
        sub = in.at("subdivisions").get<long>();
    }
    if (sub < 0 || sub > 6) fail(s.origin(), "'subdivisions' must lie in [0, 6]");
    s.set("subdivisions", sub);
}

json resolve_gravity(const json& in, const std::string& origin) {
    Schema s(in, origin, "gravity");
    resolve_shape_source(s, in);
    s.positive("density", 2100.0);
    s.choice("plane", "xz", {"xy", "xz", "yz"});
    s.number("plane_offset", 0.0);
    s.nonneg("resolution", 0.0);  // grid spacing in metres; 0 picks extent/15
    s.seed();
    return s.finish();
}

json resolve_hop(const json& in, const std::string& origin) {
    Schema s(in, origin, "hop");
    s.positive("mass", 1.0);
    s.positive("inertia", 1e-3);
    s.positive("thrust", 0.0445);
    s.positive("isp", 370.0);
    s.nonneg("propellant", 1e-3);
    if (in.contains("burn_propellant") && in.contains("burn_time"))
        fail(origin, "give either 'burn_propellant' or 'burn_time', not both");
    if (in.contains("burn_time"))
        s.nonneg("burn_time", std::nullopt);
    else
        s.nonneg("burn_propellant", 20e-6);
    s.positive("gravity", 1e-3);
    s.positive("dt", 1e-3);
    s.nonneg("kp", 1e-3);
    s.nonneg("kd", 2e-3);
    s.positive("wheel_max_torque", 0.01);
    s.in_range("tilt_deg", 0.0, -89.0, 89.0);
    s.nonneg("escape_speed", 0.0);
    s.positive("flight_sample_dt", 0.1);
    s.seed();
    return s.finish();
}

json resolve_tumble(const json& in, const std::string& origin) {
    Schema s(in, origin, "tumble");
    s.positive("mass", 1.0);
    s.positive("inertia", 1e-3);
    s.positive("arm", 0.1);
    double rest = s.in_range("rest_angle_deg", 45.0, 1.0, 89.0);
    double spike = s.in_range("spike_angle_deg", 0.0, 0.0, 45.0);
    if (rest + spike >= 90.0)
        fail(origin, "'rest_angle_deg' plus 'spike_angle_deg' must stay below 90");
    s.in_range("transfer_eff", 0.9, 1e-6, 1.0);
    s.positive("wheel_inertia", 1e-4);
    s.positive("wheel_max_torque", 0.01);
    s.positive("wheel_max_speed", 600.0);
    s.nonneg("target_wheel_speed", std::nullopt);
    s.positive("gravity", 1e-3);
    s.positive("dt", 1e-4);
    s.positive("t_max", 900.0);
    s.positive("sample_dt", 0.05);
    s.positive("stiffness", 1000.0);
    s.number("damping", -1.0);  // negative = critical for the body mass
    s.nonneg("friction", 0.5);
    s.nonneg("escape_speed", 0.0);
    s.boolean("stop_at_touchdown", false);
    s.seed();
    return s.finish();
}

void resolve_obstacles(Schema& s, const json& in) {
    s.know("obstacles");
    json out = json::array();
    if (in.contains("obstacles")) {
        const json& arr = in.at("obstacles");
        if (!arr.is_array()) fail(s.origin(), "'obstacles' must be an array");
        for (const auto& ob : arr) {
            if (!ob.is_object()) fail(s.origin(), "each obstacle must be an object");
            for (const auto& item : ob.items()) {
                if (item.key() != "x" && item.key() != "y" && item.key() != "radius")
                    fail(s.origin(), "unknown key '" + item.key() + "' in obstacle entry");
            }
            if (!ob.contains("x") || !ob.contains("y") || !ob.at("x").is_number() ||
                !ob.at("y").is_number())
                fail(s.origin(), "each obstacle needs numeric 'x' and 'y'");
            double radius = 0;
            if (ob.contains("radius")) {
                if (!ob.at("radius").is_number())
                    fail(s.origin(), "obstacle 'radius' must be a number");
                radius = ob.at("radius").get<double>();
                if (radius < 0) fail(s.origin(), "obstacle 'radius' must be non-negative");
            }
            out.push_back({{"x", ob.at("x").get<double>()},
                           {"y", ob.at("y").get<double>()},
                           {"radius", radius}});
        }
    }
    s.set("obstacles", out);
}

void resolve_swarm_common(Schema& s, const json& in, const char* kind) {
    (void)kind;
    s.integer("n_landers", 40, 1, 4096);
    s.integer("degree", 3, 1, 64);
    s.positive("r_c", 5.0);
    s.positive("r_s", 2.5);
    s.nonneg("c_cov", 1.0);
    s.nonneg("c_com", 0.1);
    s.nonneg("c_obs", 1.0);
    s.positive("mass", 1.0);
    s.nonneg("damping", 2.0);
    s.positive("dt", 0.1);
    s.integer("max_steps", 10000, 1, 2000000);
    double side = s.positive("area_side", 30.0);
    s.positive("init_side", side / 6.0);
    s.positive("settle_eps", 1e-3);
    s.integer("settle_window", 10, 1, 100000);
    s.positive("hop_length", 1.0);
    s.integer("sensing_cells", 256, 0, 4096);
    resolve_obstacles(s, in);
    s.seed();
}

json resolve_coverage(const json& in, const std::string& origin) {
    Schema s(in, origin, "coverage");
    resolve_swarm_common(s, in, "coverage");
    return s.finish();
}

json resolve_exclusion(const json& in, const std::string& origin) {
    Schema s(in, origin, "exclusion");
    resolve_swarm_common(s, in, "exclusion");
    s.know("impact_site");
    json site = json::array({3.0, -1.0});
    if (in.contains("impact_site")) {
        const json& js = in.at("impact_site");
        if (!js.is_array() || js.size() != 2 || !js[0].is_number() || !js[1].is_number())
            fail(origin, "'impact_site' must be an [x, y] pair");
        site = json::array({js[0].get<double>(), js[1].get<double>()});
    }
    s.set("impact_site", site);
    s.nonneg("exclusion_radius", 2.0);
    s.positive("site_gain_scale", 10.0);
    return s.finish();
}

json resolve_evolve(const json& in, const std::string& origin) {
    Schema s(in, origin, "evolve");
    long m = s.integer("pop_size", 20, 4, 4096);
    if (m % 2 != 0) fail(origin, "'pop_size' must be even");
    s.integer("generations", 15, 1, 100000);
    s.in_range("p_crossover", 0.8, 0.0, 1.0);
    s.in_range("p_mutation", 0.2, 0.0, 1.0);
    s.integer("eval_seeds", 3, 1, 64);
    double attr = s.nonneg("attrition", 0.1);
    if (attr >= 1) fail(origin, "'attrition' must stay below 1");
    s.positive("area_side", 30.0);
    s.positive("r_c", 5.0);
    s.positive("r_s", 2.5);
    s.positive("dt", 0.1);
    s.integer("max_steps", 10000, 1, 2000000);
    s.positive("settle_eps", 1e-3);
    s.integer("settle_window", 10, 1, 100000);
    s.positive("hop_length", 1.0);
    s.boolean("parallel", true);
    s.seed("master_seed");
    return s.finish();
}

// ---- artifact writing ------------------------------------------------------

std::string fmt_num(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct Artifacts {
    fs::path dir;
    std::vector<std::string> files;

    std::ofstream open(const std::string& name) {
        fs::create_directories(dir);
        std::ofstream f(dir / name);
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        files.push_back(name);
        return f;
    }

    void write_json(const std::string& name, const json& j) {
        auto f = open(name);
        f << j.dump(2) << '\n';
    }
};

void write_trajectory_csv(Artifacts& art, const mobility::HopTrajectory& traj) {
    auto csv = art.open("trajectory.csv");
    csv << "t,x,y,z,vx,vy,vz,roll,pitch,yaw,wx,wy,wz\n";
    for (const auto& r : traj.rows) {
        csv << fmt_num(r.t) << ',' << fmt_num(r.pos.x) << ',' << fmt_num(r.pos.y) << ','
            << fmt_num(r.pos.z) << ',' << fmt_num(r.vel.x) << ',' << fmt_num(r.vel.y) << ','
            << fmt_num(r.vel.z) << ',' << fmt_num(r.att.x) << ',' << fmt_num(r.att.y) << ','
            << fmt_num(r.att.z) << ',' << fmt_num(r.rate.x) << ',' << fmt_num(r.rate.y) << ','
            << fmt_num(r.rate.z) << '\n';
    }
}

// ---- runners ---------------------------------------------------------------

double axis_of(const Vec3& v, int a) { return a == 0 ? v.x : (a == 1 ? v.y : v.z); }

bool run_gravity(const ScenarioConfig& cfg, Artifacts& art) {
    const json& p = cfg.params;
    const double density = p.at("density").get<double>();
    gravity::ShapeModel shape = [&] {
        if (p.contains("shape_path"))
            return gravity::load_shape(p.at("shape_path").get<std::string>(), density);
        const double size = p.at("size").get<double>();
        if (p.at("shape").get<std::string>() == "cube") return gravity::make_cube(size, density);
        return gravity::make_icosphere(size, density, static_cast<int>(p.at("subdivisions").get<long>()));
    }();

    const std::string plane = p.at("plane").get<std::string>();
    const int fixed = plane == "yz" ? 0 : (plane == "xz" ? 1 : 2);
    double spacing = p.at("resolution").get<double>();
    if (spacing <= 0) {
        const int ua = (fixed + 1) % 3;
        spacing = (axis_of(shape.bbox_max(), ua) - axis_of(shape.bbox_min(), ua)) / 15.0;
    }

    auto map = gravity::surface_gravity_map(shape, fixed, p.at("plane_offset").get<double>(), spacing);

    auto csv = art.open("gravity_map.csv");
    csv << "x,y,z,potential,ax,ay,az\n";
    long flagged = 0, interior = 0;
    double max_acc = 0;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (size_t i = 0; i < map.points.size(); ++i) {
        const auto& pt = map.points[i];
        const auto& fsamp = map.fields.samples[i];
        if (map.fields.flagged[i]) ++flagged;
        else if (fsamp.interior) ++interior;
        // Field values only make sense outside the body; interior and
        // singular grid points get NaN rows so plots show a hole.
        const bool masked = map.fields.flagged[i] || fsamp.interior;
        const double pot = masked ? nan : fsamp.potential;
        const Vec3 acc = masked ? Vec3{nan, nan, nan} : fsamp.acceleration;
        csv << fmt_num(pt.x) << ',' << fmt_num(pt.y) << ',' << fmt_num(pt.z) << ','
            << fmt_num(pot) << ',' << fmt_num(acc.x) << ',' << fmt_num(acc.y) << ','
            << fmt_num(acc.z) << '\n';
        if (!masked) max_acc = std::max(max_acc, fsamp.acceleration.norm());
    }

    art.write_json("summary.json",
                   {{"vertices", shape.vertices().size()},
                    {"faces", shape.faces().size()},
                    {"volume_m3", shape.volume()},
                    {"mass_kg", shape.mass()},
                    {"mean_radius_m", shape.mean_radius()},
                    {"grid", {{"nu", map.nu}, {"nv", map.nv}, {"spacing_m", spacing}}},
                    {"flagged_points", flagged},
                    {"interior_points", interior},
                    {"max_acceleration_m_s2", max_acc}});
    return true;
}

bool run_hop(const ScenarioConfig& cfg, Artifacts& art) {
    const json& p = cfg.params;
    mobility::LanderBody body;
    body.mass = p.at("mass").get<double>();
    body.inertia = p.at("inertia").get<double>();
    mobility::PropulsionUnit prop{p.at("thrust").get<double>(), p.at("isp").get<double>(),
                                  p.at("propellant").get<double>()};
    const double tilt = p.at("tilt_deg").get<double>() * kDegToRad;
    mobility::AttitudeController ctrl;
    ctrl.kp = p.at("kp").get<double>();
    ctrl.kd = p.at("kd").get<double>();
    ctrl.att_target = {0, tilt, 0};
    mobility::ReactionWheel wheel;
    wheel.max_torque = p.at("wheel_max_torque").get<double>();

    mobility::PropelledHopConfig hc;
    hc.gravity = p.at("gravity").get<double>();
    hc.dt = p.at("dt").get<double>();
    hc.escape_speed = p.at("escape_speed").get<double>();
    hc.flight_sample_dt = p.at("flight_sample_dt").get<double>();
    hc.initial_att = {0, tilt, 0};
    if (p.contains("burn_time")) {
        hc.burn_time = p.at("burn_time").get<double>();
    } else {
        const double mdot = prop.thrust / (prop.isp * kStandardGravity);
        hc.burn_time = p.at("burn_propellant").get<double>() / mdot;
    }

    auto traj = mobility::propelled_hop(body, prop, ctrl, wheel, hc);
    write_trajectory_csv(art, traj);
    art.write_json("summary.json", {{"range_m", traj.range},
                                    {"max_speed_m_s", traj.max_speed},
                                    {"propellant_kg", traj.propellant_used},
                                    {"escaped", traj.escaped}});
    return true;
}

const char* outcome_name(mobility::HopOutcome o) {
    switch (o) {
        case mobility::HopOutcome::kStuck: return "stuck";
        case mobility::HopOutcome::kTumble: return "tumble";
        case mobility::HopOutcome::kHop: return "hop";
        default: return "escaped";
    }
}

bool run_tumble(const ScenarioConfig& cfg, Artifacts& art) {
    const json& p = cfg.params;
    mobility::LanderBody body;
    body.mass = p.at("mass").get<double>();
    body.inertia = p.at("inertia").get<double>();
    body.arm = p.at("arm").get<double>();
    body.rest_angle = p.at("rest_angle_deg").get<double>() * kDegToRad;
    body.spike_angle = p.at("spike_angle_deg").get<double>() * kDegToRad;
    body.transfer_eff = p.at("transfer_eff").get<double>();
    mobility::ReactionWheel wheel;
    wheel.inertia = p.at("wheel_inertia").get<double>();
    wheel.max_torque = p.at("wheel_max_torque").get<double>();
    wheel.max_speed = p.at("wheel_max_speed").get<double>();
    mobility::ContactParams contact{p.at("stiffness").get<double>(),
                                    p.at("damping").get<double>(),
                                    p.at("friction").get<double>()};
    mobility::HybridHopConfig hc;
    hc.gravity = p.at("gravity").get<double>();
    hc.dt = p.at("dt").get<double>();
    hc.t_max = p.at("t_max").get<double>();
    hc.escape_speed = p.at("escape_speed").get<double>();
    hc.sample_dt = p.at("sample_dt").get<double>();
    hc.stop_at_touchdown = p.at("stop_at_touchdown").get<bool>();

    auto res = mobility::hybrid_control_hop(body, wheel, contact,
                                            p.at("target_wheel_speed").get<double>(), hc);
    write_trajectory_csv(art, res.trajectory);
    art.write_json("summary.json", {{"range_m", res.trajectory.range},
                                    {"max_speed_m_s", res.trajectory.max_speed},
                                    {"propellant_kg", 0.0},
                                    {"escaped", res.trajectory.escaped},
                                    {"outcome", outcome_name(res.outcome)},
                                    {"release_rate_rad_s", res.release_rate},
                                    {"ballistic_range_m", res.trajectory.ballistic_range}});
    return res.trajectory.settled;
}

bool run_swarm(const ScenarioConfig& cfg, Artifacts& art, bool exclusion) {
    const json& p = cfg.params;
    swarm::VirtualForceParams vp;
    vp.c_cov = p.at("c_cov").get<double>();
    vp.c_com = p.at("c_com").get<double>();
    vp.c_obs = p.at("c_obs").get<double>();
    vp.r_c = p.at("r_c").get<double>();
    vp.r_s = p.at("r_s").get<double>();
    vp.degree_target = static_cast<int>(p.at("degree").get<long>());
    vp.mass = p.at("mass").get<double>();
    vp.damping = p.at("damping").get<double>();

    swarm::RunOptions ro;
    ro.dt = p.at("dt").get<double>();
    ro.max_steps = p.at("max_steps").get<long>();
    ro.settle_eps = p.at("settle_eps").get<double>();
    ro.settle_window = static_cast<int>(p.at("settle_window").get<long>());
    ro.area_side = p.at("area_side").get<double>();
    ro.hop_length = p.at("hop_length").get<double>();
    ro.sensing_cells = static_cast<int>(p.at("sensing_cells").get<long>());
    ro.record_trace = true;

    Rng rng(cfg.seed);
    swarm::SwarmState init =
        swarm::random_cluster(static_cast<int>(p.at("n_landers").get<long>()),
                              p.at("init_side").get<double>(), rng);
    for (const auto& ob : p.at("obstacles"))
        init.obstacles.push_back(
            {{ob.at("x").get<double>(), ob.at("y").get<double>()}, ob.at("radius").get<double>(), 1.0});

    swarm::CoverageRun run;
    Vec2 site{};
    if (exclusion) {
        site = {p.at("impact_site")[0].get<double>(), p.at("impact_site")[1].get<double>()};
        run = swarm::run_exclusion(init, site, vp, ro, p.at("site_gain_scale").get<double>());
    } else {
        run = swarm::run_coverage(init, vp, ro);
    }

    {
        auto csv = art.open("steps.csv");
        csv << "t,lander_id,x,y,degree\n";
        for (size_t k = 0; k < run.trace.size(); ++k) {
            const auto& st = run.trace[k];
            for (size_t i = 0; i < st.pos.size(); ++i) {
                csv << fmt_num(st.step * ro.dt) << ',' << i << ',' << fmt_num(st.pos[i].x) << ','
                    << fmt_num(st.pos[i].y) << ',' << run.trace_degrees[k][i] << '\n';
            }
        }
    }

    json sum{{"area", run.metrics.area},
             {"sensing_area", run.metrics.sensing_area},
             {"mean_degree", run.metrics.mean_degree},
             {"t_settle", run.metrics.t_settle},
             {"hops_total", run.metrics.hops_total},
             {"min_pair_dist", run.metrics.min_pair_dist},
             {"settled", run.metrics.settled}};
    if (exclusion) {
        double clearance = std::numeric_limits<double>::infinity();
        for (const auto& q : run.final_state.pos)
            clearance = std::min(clearance, (q - site).norm());
        sum["min_site_distance"] = clearance;
        sum["exclusion_radius"] = p.at("exclusion_radius").get<double>();
    }
    art.write_json("summary.json", sum);
    return run.metrics.settled;
}

bool run_evolve(const ScenarioConfig& cfg, Artifacts& art) {
    const json& p = cfg.params;
    evolve::EvolveConfig ec;
    ec.pop_size = static_cast<int>(p.at("pop_size").get<long>());
    ec.generations = static_cast<int>(p.at("generations").get<long>());
    ec.p_crossover = p.at("p_crossover").get<double>();
    ec.p_mutation = p.at("p_mutation").get<double>();
    ec.eval_seeds = static_cast<int>(p.at("eval_seeds").get<long>());
    ec.master_seed = cfg.seed;
    ec.parallel_eval = p.at("parallel").get<bool>();
    ec.eval.area_side = p.at("area_side").get<double>();
    ec.eval.r_c = p.at("r_c").get<double>();
    ec.eval.r_s = p.at("r_s").get<double>();
    ec.eval.attrition = p.at("attrition").get<double>();
    ec.eval.run.dt = p.at("dt").get<double>();
    ec.eval.run.max_steps = p.at("max_steps").get<long>();
    ec.eval.run.settle_eps = p.at("settle_eps").get<double>();
    ec.eval.run.settle_window = static_cast<int>(p.at("settle_window").get<long>());
    ec.eval.run.hop_length = p.at("hop_length").get<double>();

    auto res = evolve::run_nsga2(ec);

    {
        auto csv = art.open("history.csv");
        csv << "gen,mean_An,mean_Dn,mean_Tn,mean_En,best_overall,best_N,best_D,best_Ccov,"
               "best_Ccom\n";
        for (const auto& st : res.history) {
            csv << st.gen << ',' << fmt_num(st.mean_area_n) << ',' << fmt_num(st.mean_degree_n)
                << ',' << fmt_num(st.mean_time_n) << ',' << fmt_num(st.mean_energy_n) << ','
                << fmt_num(st.best_overall) << ',' << st.best.n << ',' << st.best.degree << ','
                << fmt_num(st.best.c_cov) << ',' << fmt_num(st.best.c_com) << '\n';
        }
    }

    auto pheno_json = [](const evolve::Individual& ind) {
        return json{{"n", ind.phenotype.n},
                    {"degree", ind.phenotype.degree},
                    {"c_cov", ind.phenotype.c_cov},
                    {"c_com", ind.phenotype.c_com},
                    {"overall", ind.overall},
                    {"fitness",
                     {{"area", ind.fitness.area_n},
                      {"degree", ind.fitness.degree_n},
                      {"time", ind.fitness.time_n},
                      {"energy", ind.fitness.energy_n}}}};
    };
    json front = json::array();
    for (const auto& ind : res.front) front.push_back(pheno_json(ind));
    art.write_json("summary.json",
                   {{"baseline", {{"t_ref", res.baseline.t_ref}, {"e_ref", res.baseline.e_ref}}},
                    {"initial_best", res.initial_best},
                    {"best", pheno_json(res.best)},
                    {"front", front},
                    {"generations", res.history.size()}});
    return true;
}

}  // namespace

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::kGravity: return "gravity";
        case Kind::kHop: return "hop";
        case Kind::kTumble: return "tumble";
        case Kind::kCoverage: return "coverage";
        case Kind::kExclusion: return "exclusion";
        default: return "evolve";
    }
}

std::optional<Kind> kind_from_name(const std::string& name) {
    if (name == "gravity") return Kind::kGravity;
    if (name == "hop") return Kind::kHop;
    if (name == "tumble") return Kind::kTumble;
    if (name == "coverage") return Kind::kCoverage;
    if (name == "exclusion") return Kind::kExclusion;
    if (name == "evolve") return Kind::kEvolve;
    return std::nullopt;
}

// Evolve configs name their seed differently because one master seed fans out
// into per-individual evaluation streams rather than seeding a single run.
static const char* seed_key(Kind k) { return k == Kind::kEvolve ? "master_seed" : "seed"; }

ScenarioConfig parse_config_text(const std::string& text, Kind kind, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(origin, e.what());
    }
    if (!doc.is_object()) fail(origin, "config must be a JSON object");
    if (doc.contains("kind")) {
        if (!doc.at("kind").is_string()) fail(origin, "'kind' must be a string");
        std::string named = doc.at("kind").get<std::string>();
        auto k = kind_from_name(named);
        if (!k) fail(origin, "unknown config kind '" + named + "'");
        if (*k != kind)
            fail(origin, "config kind '" + named + "' does not match the " +
                             std::string(kind_name(kind)) + " subcommand");
    }

    ScenarioConfig cfg;
    cfg.kind = kind;
    switch (kind) {
        case Kind::kGravity: cfg.params = resolve_gravity(doc, origin); break;
        case Kind::kHop: cfg.params = resolve_hop(doc, origin); break;
        case Kind::kTumble: cfg.params = resolve_tumble(doc, origin); break;
        case Kind::kCoverage: cfg.params = resolve_coverage(doc, origin); break;
        case Kind::kExclusion: cfg.params = resolve_exclusion(doc, origin); break;
        case Kind::kEvolve: cfg.params = resolve_evolve(doc, origin); break;
    }
    cfg.params["kind"] = kind_name(kind);
    cfg.seed = cfg.params.at(seed_key(kind)).get<std::uint64_t>();
    return cfg;
}

void override_seed(ScenarioConfig& cfg, std::uint64_t seed) {
    cfg.seed = seed;
    cfg.params[seed_key(cfg.kind)] = seed;
}

ScenarioConfig parse_config(const std::string& path, Kind kind) {
    std::ifstream f(path);
    if (!f) throw ConfigError(path + ": cannot open config file");
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str(), kind, path);
}

std::string config_hash(const nlohmann::json& j) {
    const std::string dump = j.dump();  // object keys iterate sorted, so this is canonical
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunManifest run(const ScenarioConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    Artifacts art{cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir), {}};

    log::write(log::kInfo, "running %s scenario (seed %llu)", kind_name(cfg.kind),
               static_cast<unsigned long long>(cfg.seed));

    bool converged = true;
    switch (cfg.kind) {
        case Kind::kGravity: converged = run_gravity(cfg, art); break;
        case Kind::kHop: converged = run_hop(cfg, art); break;
        case Kind::kTumble: converged = run_tumble(cfg, art); break;
        case Kind::kCoverage: converged = run_swarm(cfg, art, false); break;
        case Kind::kExclusion: converged = run_swarm(cfg, art, true); break;
        case Kind::kEvolve: converged = run_evolve(cfg, art); break;
    }

    RunManifest man;
    man.config_hash = config_hash(cfg.params);
    man.tool_version = kToolVersion;
    man.seed = cfg.seed;
    man.converged = converged;
    man.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    man.files = art.files;
    man.files.push_back("manifest.json");

    art.write_json("manifest.json", {{"config_hash", man.config_hash},
                                     {"tool_version", man.tool_version},
                                     {"seed", man.seed},
                                     {"wall_time_s", man.wall_time_s},
                                     {"files", man.files},
                                     {"converged", man.converged}});
    return man;
}

}  // namespace lander::scenario
