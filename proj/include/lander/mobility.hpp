#ifndef LANDER_MOBILITY_HPP
#define LANDER_MOBILITY_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "lander/vec.hpp"

namespace lander::mobility {

// ---------------------------------------------------------------------------
// Body and actuator parameters

struct LanderBody {
    double mass = 1.0;          // kg
    double inertia = 1e-3;      // about the CoM, pivot-relevant axis, kg*m^2
    double arm = 0.1;           // pivot-to-CoM distance, m
    double rest_angle = 0.7853981633974483;   // CoM-pivot tilt from vertical at rest (body geometry)
    double spike_angle = 0.0;   // extra tilt contributed by the ground spike
    double transfer_eff = 0.9;  // wheel-to-body energy transfer efficiency, (0,1]
};

// rest_angle + spike_angle: the full tilt the CoM must overcome to tip.
double total_rest_angle(const LanderBody& b);
// inertia about the ground pivot (parallel axis).
double pivot_inertia(const LanderBody& b);
// Throws std::invalid_argument on out-of-range fields.
void validate(const LanderBody& b);

struct ReactionWheel {
    double inertia = 1e-4;   // kg*m^2
    double max_torque = 0.01;
    double max_speed = 600;  // rad/s
    double mass = 0.1;       // kg
    double radius = 0.043;   // m
};

void validate(const ReactionWheel& w);

struct PropulsionUnit {
    double thrust = 0.0445;    // N
    double isp = 370;          // s
    double propellant = 1e-3;  // kg available
};

void validate(const PropulsionUnit& p);

struct AttitudeController {
    double kp = 1e-3;  // N*m/rad
    double kd = 2e-3;  // N*m*s/rad
    Vec3 att_target;   // desired Euler angles, rad
    Vec3 rate_target;  // desired body rates, rad/s
};

struct ContactParams {
    double stiffness = 1000;  // N/m
    double damping = -1;      // N*s/m; negative = critical for the body mass
    double friction = 0.5;    // Coulomb coefficient
};

// ---------------------------------------------------------------------------
// Attitude control

// Stabilizing PD law: torque drives the actual state toward the target.
// Components clamp to +-torque_limit when torque_limit > 0.
Vec3 pd_torque(const AttitudeController& ctrl, const Vec3& att, const Vec3& rate,
               double torque_limit = 0);

// ---------------------------------------------------------------------------
// Propelled ballistic hop

struct TrajectoryRow {
    double t = 0;
    Vec3 pos, vel;
    Vec3 att;   // roll, pitch, yaw
    Vec3 rate;  // body rates
};

struct HopTrajectory {
    std::vector<TrajectoryRow> rows;
    double range = 0;             // first to last ground-contact point, m
    double max_speed = 0;         // m/s
    double propellant_used = 0;   // kg
    bool escaped = false;         // exceeded the caller-supplied escape speed
    bool settled = true;          // reached rest before t_max
    double ballistic_range = 0;   // liftoff point to first touchdown (hybrid hops)
};

struct PropelledHopConfig {
    double gravity = 0.001;   // m/s^2
    double burn_time = 0;     // s
    double dt = 1e-3;         // s, burn-phase step
    double escape_speed = 0;  // 0 disables the check
    double flight_sample_dt = 0.1;  // row spacing during coast
    Vec3 initial_att;         // launch attitude (tilt the hop by commanding pitch)
};

// Constant thrust along body +z for burn_time (PD-held attitude on three wheel
// axes), then ballistic coast to touchdown at the launch height. Coast steps
// are exact for constant acceleration, so the up/down speed symmetry is tight.
// Throws PropellantError when the burn needs more propellant than available.
HopTrajectory propelled_hop(const LanderBody& body, const PropulsionUnit& prop,
                            const AttitudeController& ctrl, const ReactionWheel& wheel,
                            const PropelledHopConfig& cfg);

// Ideal rocket equation, g0 = 9.80665. Throws std::domain_error if burned >= wet_mass.
double rocket_delta_v(const PropulsionUnit& prop, double wet_mass, double burned);

// ---------------------------------------------------------------------------
// Stride phase (pivot about a ground spike), angle measured from vertical

// One semi-implicit Euler step of
//   theta_dd = (m g l sin(theta) - tau) / (I_cm + m l^2).
std::pair<double, double> stride_step(const LanderBody& body, double theta, double theta_dot,
                                      double tau, double gravity, double dt);

// Quasi-static torque to start tipping from rest: m g l sin(rest + spike).
double min_tumble_torque(const LanderBody& body, double gravity);

// Integrates the stride from rest under constant tau; true if theta reaches 0
// (the CoM passes over the pivot) within t_max.
bool stride_crosses_vertical(const LanderBody& body, double tau, double gravity,
                             double t_max, double dt);

// ---------------------------------------------------------------------------
// Wheel-driven hop formulas

// Minimum wheel speed whose braked release just carries the CoM over the pivot.
double hop_wheel_speed_threshold(const LanderBody& body, const ReactionWheel& wheel,
                                 double gravity);

// Wheel speed that lands an ideal hop at `range` (inverse of hop_launch in the
// large-torque limit). Throws std::domain_error when the rest geometry leaves
// no horizontal launch component.
double wheel_speed_for_range(const LanderBody& body, double range, double gravity);

// Ideal launch angle and ballistic range for a braked release at wheel speed
// omega_r with stride torque tau. Throws TorqueError when tau cannot even
// start the tip. Returns {launch_angle, range}.
std::pair<double, double> hop_launch(const LanderBody& body, const ReactionWheel& wheel,
                                     double omega_r, double tau, double gravity);

// Brake torque needed to dump wheel speed for `range` within brake_time;
// grows with commanded range (trend fixture).
double brake_torque_for_range(const LanderBody& body, const ReactionWheel& wheel,
                              double range, double gravity, double brake_time);

// ---------------------------------------------------------------------------
// Hybrid spin-up / brake hop simulation

enum class HopOutcome : std::uint8_t {
    kStuck = 0,    // rocked back to the starting pose
    kTumble = 1,   // tipped to an adjacent rest pose without leaving the ground
    kHop = 2,      // went airborne, landed, settled
    kEscaped = 3,  // airborne past the escape speed
};

struct HybridHopConfig {
    double gravity = 0.001;
    double dt = 1e-4;
    double t_max = 900;
    double escape_speed = 0;        // 0 disables
    double sample_dt = 0.05;        // row spacing
    bool stop_at_touchdown = false; // end the run at first ground contact after flight
};

struct HybridHopResult {
    HopOutcome outcome = HopOutcome::kStuck;
    HopTrajectory trajectory;
    double release_rate = 0;   // body rate just after the brake, rad/s
    double launch_speed = 0;   // CoM speed at liftoff (hops only)
    double launch_angle = 0;   // CoM tilt from vertical at liftoff
};

// Spin-up below the tumble threshold, impulsive brake (wheel energy transferred
// to the body at transfer_eff), stride phase, flight once the spike normal
// force would go negative, spring-damper + Coulomb touchdown, ground tumbling
// with inelastic pivot handoffs until rest.
// Throws SaturationError if target_omega exceeds the wheel speed limit.
HybridHopResult hybrid_control_hop(const LanderBody& body, const ReactionWheel& wheel,
                                   const ContactParams& contact, double target_omega,
                                   const HybridHopConfig& cfg);

}  // namespace lander::mobility

#endif
