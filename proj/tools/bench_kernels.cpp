// Serial vs OpenMP timings for the two hot kernels: polyhedron field batches
// and the swarm force pass. Also cross-checks that both paths agree bit for
// bit, since the parallel loops must not change the arithmetic.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <vector>

#include "lander/polyhedron_gravity.hpp"
#include "lander/rng.hpp"
#include "lander/shape_model.hpp"
#include "lander/swarm_coverage.hpp"

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <class F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        double t0 = now_s();
        f();
        best = std::min(best, now_s() - t0);
    }
    return best;
}

bool same_bits(double a, double b) {
    return std::memcmp(&a, &b, sizeof(double)) == 0 || (std::isnan(a) && std::isnan(b));
}

}  // namespace

int main(int argc, char** argv) {
    const int n_points = argc > 1 ? std::atoi(argv[1]) : 4000;
    const int n_landers = argc > 2 ? std::atoi(argv[2]) : 512;

    using namespace lander;

    auto shape = gravity::make_icosphere(500.0, 2100.0, 3);
    std::printf("shape: %zu vertices, %zu faces\n", shape.vertices().size(),
                shape.faces().size());

    Rng rng(42);
    std::vector<Vec3> points(n_points);
    for (auto& p : points) {
        double r = rng.uniform(600.0, 2000.0);
        double z = rng.uniform(-1.0, 1.0);
        double phi = rng.uniform(0.0, 6.283185307179586);
        double s = std::sqrt(1.0 - z * z);
        p = {r * s * std::cos(phi), r * s * std::sin(phi), r * z};
    }

    gravity::FieldBatch serial, parallel;
    double ts = time_best_of(3, [&] { serial = gravity::field_batch_serial(shape, points); });
    double tp = time_best_of(3, [&] { parallel = gravity::field_batch_parallel(shape, points); });
    bool match = true;
    for (int i = 0; i < n_points && match; ++i) {
        match = same_bits(serial.samples[i].potential, parallel.samples[i].potential) &&
                same_bits(serial.samples[i].acceleration.x, parallel.samples[i].acceleration.x) &&
                same_bits(serial.samples[i].acceleration.y, parallel.samples[i].acceleration.y) &&
                same_bits(serial.samples[i].acceleration.z, parallel.samples[i].acceleration.z);
    }
    std::printf("gravity batch, %d points: serial %.3f s, parallel %.3f s, speedup %.2fx, %s\n",
                n_points, ts, tp, ts / tp, match ? "bitwise equal" : "MISMATCH");

    swarm::SwarmState state = swarm::random_cluster(n_landers, 30.0, rng);
    swarm::VirtualForceParams params;
    std::vector<Vec2> fs(n_landers), fp(n_landers);
    double ss = time_best_of(3, [&] {
        for (int i = 0; i < n_landers; ++i) fs[i] = swarm::net_force(i, state, params);
    });
    double sp = time_best_of(3, [&] {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int i = 0; i < n_landers; ++i) fp[i] = swarm::net_force(i, state, params);
    });
    bool smatch = true;
    for (int i = 0; i < n_landers && smatch; ++i)
        smatch = same_bits(fs[i].x, fp[i].x) && same_bits(fs[i].y, fp[i].y);
    std::printf("swarm forces, %d landers: serial %.4f s, parallel %.4f s, speedup %.2fx, %s\n",
                n_landers, ss, sp, ss / sp, smatch ? "bitwise equal" : "MISMATCH");

    return (match && smatch) ? 0 : 1;
}
