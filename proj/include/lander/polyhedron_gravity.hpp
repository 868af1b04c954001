#ifndef LANDER_POLYHEDRON_GRAVITY_HPP
#define LANDER_POLYHEDRON_GRAVITY_HPP

#include <vector>

#include "lander/shape_model.hpp"
#include "lander/vec.hpp"

namespace lander::gravity {

struct FieldSample {
    double potential = 0;   // Phi with a = -grad(Phi); negative outside the body
    Vec3 acceleration;      // m/s^2, points toward the body
    bool interior = false;  // winding number marks the point as inside
};

// Exact constant-density polyhedron field at one point. Throws
// SingularityError when the point sits on (or within 1e-9 m of) the surface.
FieldSample field_at(const ShapeModel& shape, const Vec3& point);

// Batch evaluation. The parallel variant spreads points over OpenMP threads;
// per-point arithmetic equals the serial loop exactly, so outputs match bit
// for bit. Singular points are flagged and get NaN fields instead of a throw.
struct FieldBatch {
    std::vector<FieldSample> samples;
    std::vector<char> flagged;  // 1 = singular/invalid sample
};

FieldBatch field_batch_serial(const ShapeModel& shape, const std::vector<Vec3>& points);
FieldBatch field_batch_parallel(const ShapeModel& shape, const std::vector<Vec3>& points);

// Axis-aligned slice map: grid over the shape's bounding box in the two free
// axes, inflated 50%, with `spacing` between samples. fixed_axis 0/1/2 picks
// the held coordinate. Grid is symmetric about the bbox center so symmetric
// bodies produce symmetric maps. Interior and singular points are flagged.
struct PlaneMap {
    std::vector<Vec3> points;  // row-major, nu x nv
    FieldBatch fields;
    int nu = 0, nv = 0;
    int fixed_axis = 1;
    double fixed_value = 0;
};

PlaneMap surface_gravity_map(const ShapeModel& shape, int fixed_axis, double fixed_value,
                             double spacing, bool parallel = true);

// One sample per face, offset outward from the face centroid (true surface
// gravity, e.g. for order-of-magnitude checks against radar shape models).
struct SurfaceSample {
    Vec3 point;
    FieldSample field;
};

std::vector<SurfaceSample> face_gravity_samples(const ShapeModel& shape, double offset);

}  // namespace lander::gravity

#endif
