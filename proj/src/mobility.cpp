#include "lander/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lander/constants.hpp"
#include "lander/errors.hpp"

namespace lander::mobility {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clamp_abs(double v, double bound) {
    if (bound <= 0) return v;
    return std::clamp(v, -bound, bound);
}

// body +z axis in world coordinates for yaw-pitch-roll Euler angles
Vec3 body_z_world(const Vec3& att) {
    double cr = std::cos(att.x), sr = std::sin(att.x);
    double cp = std::cos(att.y), sp = std::sin(att.y);
    double cy = std::cos(att.z), sy = std::sin(att.z);
    return {cy * sp * cr + sy * sr, sy * sp * cr - cy * sr, cp * cr};
}

}  // namespace

double total_rest_angle(const LanderBody& b) { return b.rest_angle + b.spike_angle; }

double pivot_inertia(const LanderBody& b) { return b.inertia + b.mass * b.arm * b.arm; }

void validate(const LanderBody& b) {
    if (!(b.mass > 0)) throw std::invalid_argument("lander mass must be positive");
    if (!(b.inertia > 0)) throw std::invalid_argument("lander inertia must be positive");
    if (!(b.arm > 0)) throw std::invalid_argument("pivot arm must be positive");
    double a = total_rest_angle(b);
    if (!(a >= 0 && a < kPi / 2))
        throw std::invalid_argument("rest angle plus spike angle must lie in [0, pi/2)");
    if (!(b.transfer_eff > 0 && b.transfer_eff <= 1))
        throw std::invalid_argument("transfer efficiency must lie in (0, 1]");
}

void validate(const ReactionWheel& w) {
    if (!(w.inertia > 0)) throw std::invalid_argument("wheel inertia must be positive");
    if (!(w.max_torque > 0)) throw std::invalid_argument("wheel torque bound must be positive");
    if (!(w.max_speed > 0)) throw std::invalid_argument("wheel speed bound must be positive");
}

void validate(const PropulsionUnit& p) {
    if (!(p.thrust > 0)) throw std::invalid_argument("thrust must be positive");
    if (!(p.isp > 0)) throw std::invalid_argument("specific impulse must be positive");
    if (p.propellant < 0) throw std::invalid_argument("propellant mass must be non-negative");
}

Vec3 pd_torque(const AttitudeController& ctrl, const Vec3& att, const Vec3& rate,
               double torque_limit) {
    Vec3 tau = (ctrl.att_target - att) * ctrl.kp + (ctrl.rate_target - rate) * ctrl.kd;
    return {clamp_abs(tau.x, torque_limit), clamp_abs(tau.y, torque_limit),
            clamp_abs(tau.z, torque_limit)};
}

double rocket_delta_v(const PropulsionUnit& prop, double wet_mass, double burned) {
    validate(prop);
    if (!(wet_mass > 0)) throw std::domain_error("wet mass must be positive");
    if (burned < 0 || burned >= wet_mass)
        throw std::domain_error("burned propellant must lie in [0, wet mass)");
    return prop.isp * kStandardGravity * std::log(wet_mass / (wet_mass - burned));
}

HopTrajectory propelled_hop(const LanderBody& body, const PropulsionUnit& prop,
                            const AttitudeController& ctrl, const ReactionWheel& wheel,
                            const PropelledHopConfig& cfg) {
    validate(body);
    validate(prop);
    validate(wheel);
    if (!(cfg.gravity > 0)) throw std::invalid_argument("gravity must be positive");
    if (!(cfg.dt > 0)) throw std::invalid_argument("dt must be positive");
    if (cfg.burn_time < 0) throw std::invalid_argument("burn time must be non-negative");

    const double mdot = prop.thrust / (prop.isp * kStandardGravity);
    const double need = mdot * cfg.burn_time;
    if (need > prop.propellant * (1 + 1e-12))
        throw PropellantError("burn needs more propellant than the tank holds");

    HopTrajectory traj;
    double t = 0, mass = body.mass;
    Vec3 pos, vel;
    Vec3 att = cfg.initial_att, rate;

    auto record = [&](double tt) {
        traj.rows.push_back({tt, pos, vel, att, rate});
        traj.max_speed = std::max(traj.max_speed, vel.norm());
        if (cfg.escape_speed > 0 && vel.norm() > cfg.escape_speed) traj.escaped = true;
    };
    record(0);

    // powered ascent: thrust along body +z, PD-held attitude, shrinking mass
    double remaining = cfg.burn_time;
    while (remaining > 1e-15) {
        double h = std::min(cfg.dt, remaining);
        Vec3 tau = pd_torque(ctrl, att, rate, wheel.max_torque);
        rate += tau * (h / body.inertia);
        att += rate * h;  // small-angle Euler kinematics; hops stay near level

        Vec3 acc = body_z_world(att) * (prop.thrust / mass);
        acc.z -= cfg.gravity;
        vel += acc * h;
        pos += vel * h;
        if (pos.z < 0) {  // resting on the ground until thrust wins
            pos.z = 0;
            vel.z = std::max(vel.z, 0.0);
        }
        mass -= mdot * h;
        t += h;
        remaining -= h;
        record(t);
    }
    traj.propellant_used = mdot * cfg.burn_time;

    // coast: exact constant-acceleration steps down to the launch altitude
    const double g = cfg.gravity;
    if (pos.z > 0 || vel.z > 0) {
        for (;;) {
            double h = cfg.flight_sample_dt;
            double z_next = pos.z + vel.z * h - 0.5 * g * h * h;
            if (z_next <= 0) {
                double hit = (vel.z + std::sqrt(vel.z * vel.z + 2 * g * pos.z)) / g;
                pos += vel * hit;
                pos.z = 0;
                vel.z -= g * hit;
                t += hit;
                record(t);
                break;
            }
            pos.x += vel.x * h;
            pos.y += vel.y * h;
            pos.z = z_next;
            vel.z -= g * h;
            t += h;
            record(t);
        }
    }

    traj.range = std::hypot(pos.x - traj.rows.front().pos.x, pos.y - traj.rows.front().pos.y);
    return traj;
}

std::pair<double, double> stride_step(const LanderBody& body, double theta, double theta_dot,
                                      double tau, double gravity, double dt) {
    if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
    double acc = (body.mass * gravity * body.arm * std::sin(theta) - tau) / pivot_inertia(body);
    double w = theta_dot + dt * acc;
    return {theta + dt * w, w};
}

double min_tumble_torque(const LanderBody& body, double gravity) {
    if (gravity < 0) throw std::invalid_argument("gravity must be non-negative");
    return body.mass * gravity * body.arm * std::sin(total_rest_angle(body));
}

bool stride_crosses_vertical(const LanderBody& body, double tau, double gravity,
                             double t_max, double dt) {
    double theta = total_rest_angle(body), w = 0;
    for (double t = 0; t < t_max; t += dt) {
        std::tie(theta, w) = stride_step(body, theta, w, tau, gravity, dt);
        if (theta <= 0) return true;
        if (theta > kPi / 2) return false;  // fell back onto the face
    }
    return false;
}

double hop_wheel_speed_threshold(const LanderBody& body, const ReactionWheel& wheel,
                                 double gravity) {
    validate(body);
    validate(wheel);
    if (gravity < 0) throw std::invalid_argument("gravity must be non-negative");
    double a = total_rest_angle(body);
    double barrier = 2 * body.mass * gravity * body.arm * (1 - std::cos(a));
    return std::sqrt(barrier / (body.transfer_eff * wheel.inertia));
}

double wheel_speed_for_range(const LanderBody& body, double range, double gravity) {
    validate(body);
    if (!(range > 0)) throw std::domain_error("range must be positive");
    if (!(gravity > 0)) throw std::domain_error("gravity must be positive");
    double s2a = std::sin(2 * total_rest_angle(body));
    if (!(s2a > 1e-12))
        throw std::domain_error("rest geometry has no horizontal launch component");
    double el = body.transfer_eff * body.arm;
    return std::sqrt(range * gravity / (el * el * s2a));
}

std::pair<double, double> hop_launch(const LanderBody& body, const ReactionWheel& wheel,
                                     double omega_r, double tau, double gravity) {
    validate(body);
    validate(wheel);
    if (omega_r < 0) throw std::invalid_argument("wheel speed must be non-negative");
    if (!(gravity > 0)) throw std::invalid_argument("gravity must be positive");
    if (!(tau > min_tumble_torque(body, gravity)))
        throw TorqueError("stride torque below the tumble threshold");

    double a = total_rest_angle(body);
    double correction = omega_r == 0 ? 0.0
                                     : body.transfer_eff * wheel.inertia * omega_r * omega_r / tau;
    double launch_angle = a - 0.5 * correction;
    double v = body.transfer_eff * body.arm * omega_r;
    double range = std::sin(2 * a - correction) * v * v / gravity;
    return {launch_angle, range};
}

double brake_torque_for_range(const LanderBody& body, const ReactionWheel& wheel,
                              double range, double gravity, double brake_time) {
    validate(wheel);
    if (!(brake_time > 0)) throw std::invalid_argument("brake time must be positive");
    return wheel.inertia * wheel_speed_for_range(body, range, gravity) / brake_time;
}

namespace {

struct PlanarRecorder {
    HopTrajectory* traj;
    double sample_dt;
    double next_t = 0;

    void row(double t, double x, double z, double vx, double vz, double th, double om,
             bool force = false) {
        double speed = std::hypot(vx, vz);
        traj->max_speed = std::max(traj->max_speed, speed);
        if (!force && t < next_t) return;
        next_t = t + sample_dt;
        TrajectoryRow r{t, {x, 0, z}, {vx, 0, vz}, {0, th, 0}, {0, om, 0}};
        // phase boundaries force a row; keep timestamps strictly increasing
        if (!traj->rows.empty() && t <= traj->rows.back().t)
            traj->rows.back() = r;
        else
            traj->rows.push_back(r);
    }
};

}  // namespace

HybridHopResult hybrid_control_hop(const LanderBody& body, const ReactionWheel& wheel,
                                   const ContactParams& contact, double target_omega,
                                   const HybridHopConfig& cfg) {
    validate(body);
    validate(wheel);
    if (target_omega < 0) throw std::invalid_argument("wheel speed must be non-negative");
    if (target_omega > wheel.max_speed)
        throw SaturationError("commanded wheel speed exceeds the saturation limit");
    if (!(cfg.gravity > 0)) throw std::invalid_argument("gravity must be positive");
    if (!(cfg.dt > 0)) throw std::invalid_argument("dt must be positive");
    if (!(contact.stiffness > 0)) throw std::invalid_argument("contact stiffness must be positive");

    const double g = cfg.gravity;
    const double m = body.mass, l = body.arm;
    const double a = total_rest_angle(body);
    if (!(a > 0)) throw std::invalid_argument("hybrid hop needs a nonzero rest angle");
    const double i_piv = pivot_inertia(body);
    const double i_cm = body.inertia;
    // inelastic pivot handoff: angular momentum about the incoming spike
    const double handoff_keep = (i_cm + m * l * l * std::cos(2 * a)) / i_piv;

    HybridHopResult res;
    PlanarRecorder rec{&res.trajectory, cfg.sample_dt, 0};

    // spin-up is quasi-static: reaction torque stays below the tumble threshold
    // so the body holds its rest pose while the wheel ramps.
    const double tau_min = min_tumble_torque(body, g);
    const double tau_spin = std::min(wheel.max_torque, 0.9 * tau_min);
    double t = (tau_spin > 0 && target_omega > 0) ? wheel.inertia * target_omega / tau_spin : 0.0;

    double pivot_x = 0;    // active spike, world x
    double theta = -a;     // body tilt from vertical; hop travels +x
    double com_x = pivot_x + l * std::sin(theta);
    double com_z = l * std::cos(theta);
    rec.row(0, com_x, com_z, 0, 0, theta, 0, true);

    if (target_omega == 0) {
        rec.row(t, com_x, com_z, 0, 0, theta, 0, true);
        res.trajectory.range = 0;
        return res;
    }

    // impulsive brake: wheel kinetic energy crosses over at transfer_eff
    double omega = target_omega * std::sqrt(body.transfer_eff * wheel.inertia / i_piv);
    res.release_rate = omega;
    rec.row(t, com_x, com_z, l * omega * std::cos(theta), -l * omega * std::sin(theta), theta,
            omega, true);

    const double t_end = t + cfg.t_max;
    int tumbles = 0;
    bool airborne = false;
    double x = 0, z = 0, vx = 0, vz = 0;  // CoM state once off the pivot

    // ---- stride: single-spike pivot dynamics with handoffs ----
    while (!airborne) {
        double acc = m * g * l * std::sin(theta) / i_piv;
        double normal = m * (g - l * (acc * std::sin(theta) + omega * omega * std::cos(theta)));
        if (normal <= 0) {
            airborne = true;
            x = pivot_x + l * std::sin(theta);
            z = l * std::cos(theta);
            vx = l * omega * std::cos(theta);
            vz = -l * omega * std::sin(theta);
            res.launch_speed = l * std::abs(omega);
            res.launch_angle = theta;
            break;
        }
        omega += cfg.dt * acc;
        theta += cfg.dt * omega;
        t += cfg.dt;

        if (theta >= a) {  // next spike strikes the ground
            pivot_x += 2 * l * std::sin(a);
            theta -= 2 * a;
            omega *= handoff_keep;
            ++tumbles;
        }
        if (theta <= -a && omega <= 0) {  // rocked back onto the face
            res.outcome = tumbles > 0 ? HopOutcome::kTumble : HopOutcome::kStuck;
            res.trajectory.range = std::abs(pivot_x);
            rec.row(t, pivot_x + l * std::sin(-a), l * std::cos(a), 0, 0, -a, 0, true);
            return res;
        }
        if (t > t_end) {
            res.outcome = tumbles > 0 ? HopOutcome::kTumble : HopOutcome::kStuck;
            res.trajectory.range = std::abs(pivot_x);
            res.trajectory.settled = false;
            return res;
        }
        rec.row(t, pivot_x + l * std::sin(theta), l * std::cos(theta), l * omega * std::cos(theta),
                -l * omega * std::sin(theta), theta, omega);
    }

    const double liftoff_x = pivot_x;
    rec.row(t, x, z, vx, vz, theta, omega, true);

    // ---- flight: ballistic CoM, constant spin; land on whichever spike
    // swings lowest (spikes sit every 2a around the base) ----
    auto lowest_gap = [&](double th, double zc) {
        return zc - l * std::cos(std::remainder(th, 2 * a));
    };

    bool touchdown = false;
    double h = std::min(cfg.sample_dt, 0.2 / std::max(1.0, std::abs(omega)));
    while (!touchdown) {
        if (cfg.escape_speed > 0 && std::hypot(vx, vz) > cfg.escape_speed) {
            res.outcome = HopOutcome::kEscaped;
            res.trajectory.escaped = true;
            res.trajectory.range = std::abs(x);
            rec.row(t, x, z, vx, vz, theta, omega, true);
            return res;
        }
        if (t > t_end) {
            res.outcome = HopOutcome::kHop;
            res.trajectory.settled = false;
            res.trajectory.range = std::abs(x);
            return res;
        }
        double t1 = t + h;
        double x1 = x + vx * h;
        double z1 = z + vz * h - 0.5 * g * h * h;
        double vz1 = vz - g * h;
        double th1 = theta + omega * h;
        if (lowest_gap(th1, z1) <= 0 && vz1 < 0) {
            // bisect the crossing time within [0, h]
            double lo = 0, hi = h;
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo + hi);
                double zm = z + vz * mid - 0.5 * g * mid * mid;
                double thm = theta + omega * mid;
                (lowest_gap(thm, zm) <= 0 ? hi : lo) = mid;
            }
            x = x + vx * hi;
            z = z + vz * hi - 0.5 * g * hi * hi;
            vz = vz - g * hi;
            theta = theta + omega * hi;
            t += hi;
            touchdown = true;
        } else {
            x = x1;
            z = z1;
            vz = vz1;
            theta = th1;
            t = t1;
        }
        rec.row(t, x, z, vx, vz, theta, omega, touchdown);
    }

    double touch_spike = std::remainder(theta, 2 * a);
    res.trajectory.ballistic_range = std::abs((x - l * std::sin(touch_spike)) - liftoff_x);
    res.outcome = HopOutcome::kHop;

    if (cfg.stop_at_touchdown) {
        res.trajectory.range = std::abs(x - l * std::sin(touch_spike));
        return res;
    }

    // ---- touchdown and settling: spring-damper normals + regularized Coulomb
    // friction on every grounded spike; the rigid body is free to keep
    // tumbling until the contact set pins it ----
    const double c_n = contact.damping < 0 ? 2 * std::sqrt(contact.stiffness * m) : contact.damping;
    double last_contact_x = x - l * std::sin(touch_spike);
    int quiet = 0;
    const int quiet_needed = static_cast<int>(1.0 / cfg.dt);  // one quiet second

    while (t < t_end) {
        double fx = 0, fz = 0, torque = 0;
        double support = 0;
        int j_lo = static_cast<int>(std::floor((-kPi / 2 - theta) / (2 * a)));
        int j_hi = static_cast<int>(std::ceil((kPi / 2 - theta) / (2 * a)));
        for (int j = j_lo; j <= j_hi; ++j) {
            double phi = theta + 2 * a * j;
            double sz = z - l * std::cos(phi);
            if (sz >= 0) continue;
            double sx = x - l * std::sin(phi);
            double vsz = vz + l * std::sin(phi) * omega;
            double vsx = vx - l * std::cos(phi) * omega;
            double fn = std::max(0.0, -contact.stiffness * sz - c_n * vsz);
            // Coulomb friction, impulse-capped: it may stop this step's local
            // sliding but never reverse it (keeps stiff stick contacts stable).
            double arm_t = l * std::cos(phi);
            double m_tan = 1.0 / (1.0 / m + arm_t * arm_t / i_cm);
            double ft = std::clamp(-vsx * m_tan / cfg.dt, -contact.friction * fn,
                                   contact.friction * fn);
            fx += ft;
            fz += fn;
            // generalized torque for theta: the tip sits at -l(sin phi, cos phi)
            // from the CoM and moves along (-l cos phi, l sin phi) per unit theta
            torque += l * std::sin(phi) * fn - l * std::cos(phi) * ft;
            support += fn;
            if (fn > 0) last_contact_x = sx;
        }
        vx += cfg.dt * (fx / m);
        vz += cfg.dt * (fz / m - g);
        omega += cfg.dt * (torque / i_cm);
        x += cfg.dt * vx;
        z += cfg.dt * vz;
        theta += cfg.dt * omega;
        t += cfg.dt;
        rec.row(t, x, z, vx, vz, theta, omega);

        double speed = std::max(std::hypot(vx, vz), l * std::abs(omega));
        if (speed < 1e-5 && support > 0.4 * m * g) {
            if (++quiet >= quiet_needed) break;
        } else {
            quiet = 0;
        }
    }
    res.trajectory.settled = t < t_end;
    res.trajectory.range = std::abs(last_contact_x);
    rec.row(t, x, z, vx, vz, theta, omega, true);
    return res;
}

}  // namespace lander::mobility
