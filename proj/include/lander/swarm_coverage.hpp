#ifndef LANDER_SWARM_COVERAGE_HPP
#define LANDER_SWARM_COVERAGE_HPP

#include <vector>

#include "lander/rng.hpp"
#include "lander/vec.hpp"

namespace lander::swarm {

struct Obstacle {
    Vec2 pos;
    double radius = 0;       // used for reporting only; forces use center distance
    double gain_scale = 1;   // impact sites repel harder than rocks
};

struct VirtualForceParams {
    double c_cov = 1.0;   // pairwise repulsion gain
    double c_com = 0.1;   // link-keeping spring gain
    double c_obs = 1.0;   // obstacle repulsion gain
    double r_c = 5.0;     // communication range
    double r_s = 2.5;     // sensing range
    int degree_target = 3;
    double mass = 1.0;
    double damping = 2.0;
};

struct SwarmState {
    std::vector<Vec2> pos;
    std::vector<Vec2> vel;
    std::vector<Obstacle> obstacles;
    long step = 0;
};

struct CoverageMetrics {
    double area = 0;          // lander-polygon area at the final step
    double sensing_area = 0;  // union of sensing disks (grid estimate)
    double mean_degree = 0;
    double min_pair_dist = 0; // running min past the startup transient
    bool settled = false;
    long t_settle = -1;       // first step of the quiet window, -1 if never
    long hops_total = 0;
};

struct RunOptions {
    double dt = 0.1;
    long max_steps = 10000;  // 40-lander campaigns settle by ~8000 at worst
    double settle_eps = 1e-3;  // per-step displacement threshold
    int settle_window = 10;    // consecutive quiet steps to declare settlement
    double area_side = 30;     // reflecting boundary; <= 0 disables
    double hop_length = 1.0;   // path-length quantum for the energy proxy
    int sensing_cells = 0;     // grid resolution for the disk-union estimate; 0 skips it
    bool record_trace = false;
    bool parallel_forces = true;
};

// Pairwise repulsion, magnitude gain/dist, pointing from j to i. Distances
// below 1e-6 clamp the magnitude and keep the last defined direction.
Vec2 coverage_force(const Vec2& ri, const Vec2& rj, double gain);

// Linear spring toward j, active only while lander i is short of links.
Vec2 comms_force(const Vec2& ri, const Vec2& rj, double gain, int degree_i, int degree_target);

// Same shape as coverage_force, from an obstacle center.
Vec2 obstacle_force(const Vec2& ri, const Vec2& rl, double gain);

// Count of landers j != i within r_c of lander i.
int degree(int i, const SwarmState& s, double r_c);

// Net virtual force on lander i. Lander-lander terms act within r_c only and
// fade linearly across the outer 0.4·r_c band; the spring term scales with
// lander i's fractional degree deficit (full at 4 missing links) and is
// restricted to its degree_target nearest neighbors so a sparse lander chases
// its closest links instead of the whole swarm. Keeping the field continuous
// is what lets the swarm settle instead of chattering at the range boundary.
// Obstacle forces have no range limit.
Vec2 net_force(int i, const SwarmState& s, const VirtualForceParams& p);

// One synchronous semi-implicit Euler step of m v' + mu v = F for all landers;
// forces are read from the pre-step state.
SwarmState step(const SwarmState& s, const VirtualForceParams& p, double dt);

struct CoverageRun {
    SwarmState final_state;
    CoverageMetrics metrics;
    std::vector<SwarmState> trace;       // filled when record_trace
    std::vector<std::vector<int>> trace_degrees;
};

// Iterate until the swarm settles or max_steps. Boundary reflection keeps
// landers inside the centered area square when area_side > 0.
CoverageRun run_coverage(const SwarmState& initial, const VirtualForceParams& p,
                         const RunOptions& opt);

// Same dynamics with the impact site added as an extra hard-repelling
// obstacle. exclusion_radius only feeds the reported clearance check.
CoverageRun run_exclusion(const SwarmState& initial, const Vec2& impact_site,
                          const VirtualForceParams& p, const RunOptions& opt,
                          double site_gain_scale = 10);

// Area of the polygon with the landers as vertices, ordered by angle about
// their centroid. Fewer than 3 landers span no area.
double coverage_area(const std::vector<Vec2>& positions);

// Union of r_s-disks, estimated on a grid (reported alongside the polygon
// area; the polygon is what feeds the optimizer).
double sensing_disk_area(const std::vector<Vec2>& positions, double r_s, int cells_per_axis = 256);

// Uniform placement inside a centered box; starting clusters are a fraction
// of the target area so dispersal is visible.
SwarmState random_cluster(int n, double box_side, Rng& rng);

}  // namespace lander::swarm

#endif
