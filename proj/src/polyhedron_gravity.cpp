#include "lander/polyhedron_gravity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lander/constants.hpp"
#include "lander/errors.hpp"

namespace lander::gravity {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSingularDist = 1e-9;

// Squared distance from p to triangle abc (closest-point walk over the
// triangle's Voronoi regions).
double point_triangle_dist2(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0 && d2 <= 0) return ap.norm2();

    Vec3 bp = p - b;
    double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0 && d4 <= d3) return bp.norm2();

    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) {
        double t = d1 / (d1 - d3);
        return (ap - ab * t).norm2();
    }

    Vec3 cp = p - c;
    double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0 && d5 <= d6) return cp.norm2();

    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) {
        double t = d2 / (d2 - d6);
        return (ap - ac * t).norm2();
    }

    double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
        double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (bp - (c - b) * t).norm2();
    }

    double denom = 1.0 / (va + vb + vc);
    double v = vb * denom, w = vc * denom;
    return (ap - (ab * v + ac * w)).norm2();
}

struct Scratch {
    std::vector<Vec3> rel;     // vertex - point
    std::vector<double> dist;  // |rel|
};

FieldSample field_at_impl(const ShapeModel& shape, const Vec3& p, Scratch& s) {
    const auto& verts = shape.vertices();
    const auto& faces = shape.faces();
    const auto& normals = shape.face_normals();

    const size_t nv = verts.size();
    s.rel.resize(nv);
    s.dist.resize(nv);
    for (size_t i = 0; i < nv; ++i) {
        s.rel[i] = verts[i] - p;
        s.dist[i] = s.rel[i].norm();
    }

    for (const auto& f : faces) {
        double d2 = point_triangle_dist2(p, verts[f[0]], verts[f[1]], verts[f[2]]);
        if (d2 < kSingularDist * kSingularDist)
            throw SingularityError("field point touches the polyhedron surface");
    }

    // Edge sum: L_e weighted quadratic form of the per-edge dyad.
    double u_edge = 0;
    Vec3 g_edge;
    for (const auto& e : shape.edges()) {
        double ra = s.dist[e.a], rb = s.dist[e.b];
        double L = std::log((ra + rb + e.length) / (ra + rb - e.length));
        Vec3 er = e.dyad * s.rel[e.a];
        u_edge += L * dot(s.rel[e.a], er);
        g_edge += L * er;
    }

    // Face sum: signed solid angles (two-argument arctangent form).
    double u_face = 0;
    Vec3 g_face;
    double omega_sum = 0;
    for (size_t fi = 0; fi < faces.size(); ++fi) {
        const auto& f = faces[fi];
        const Vec3 &r1 = s.rel[f[0]], &r2 = s.rel[f[1]], &r3 = s.rel[f[2]];
        double d1 = s.dist[f[0]], d2 = s.dist[f[1]], d3 = s.dist[f[2]];
        double det = dot(r1, cross(r2, r3));
        double den = d1 * d2 * d3 + dot(r1, r2) * d3 + dot(r2, r3) * d1 + dot(r3, r1) * d2;
        double omega = 2.0 * std::atan2(det, den);

        const Vec3& n = normals[fi];
        double nr = dot(n, r1);
        u_face += omega * nr * nr;
        g_face += (omega * nr) * n;  // omega * (n n^T) rel
        omega_sum += omega;
    }

    const double gs = kGravConstant * shape.density();
    FieldSample out;
    out.potential = -0.5 * gs * (u_edge - u_face);       // Phi = -U, zero at infinity
    out.acceleration = gs * (g_face - g_edge);           // attraction = grad U
    out.interior = std::abs(omega_sum) > 2.0 * kPi;      // winding: 4*pi inside, 0 outside
    return out;
}

FieldBatch field_batch(const ShapeModel& shape, const std::vector<Vec3>& points, bool parallel) {
    const long n = static_cast<long>(points.size());
    FieldBatch out;
    out.samples.resize(points.size());
    out.flagged.assign(points.size(), 0);

    if (parallel) {
#pragma omp parallel
        {
            Scratch s;
#pragma omp for schedule(static)
            for (long i = 0; i < n; ++i) {
                try {
                    out.samples[i] = field_at_impl(shape, points[i], s);
                } catch (const SingularityError&) {
                    out.flagged[i] = 1;
                    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
                    out.samples[i] = {nan, {nan, nan, nan}, false};
                }
            }
        }
    } else {
        Scratch s;
        for (long i = 0; i < n; ++i) {
            try {
                out.samples[i] = field_at_impl(shape, points[i], s);
            } catch (const SingularityError&) {
                out.flagged[i] = 1;
                constexpr double nan = std::numeric_limits<double>::quiet_NaN();
                out.samples[i] = {nan, {nan, nan, nan}, false};
            }
        }
    }
    return out;
}

}  // namespace

FieldSample field_at(const ShapeModel& shape, const Vec3& point) {
    Scratch s;
    return field_at_impl(shape, point, s);
}

FieldBatch field_batch_serial(const ShapeModel& shape, const std::vector<Vec3>& points) {
    return field_batch(shape, points, false);
}

FieldBatch field_batch_parallel(const ShapeModel& shape, const std::vector<Vec3>& points) {
    return field_batch(shape, points, true);
}

PlaneMap surface_gravity_map(const ShapeModel& shape, int fixed_axis, double fixed_value,
                             double spacing, bool parallel) {
    if (fixed_axis < 0 || fixed_axis > 2) throw std::invalid_argument("fixed_axis must be 0, 1 or 2");
    if (!(spacing > 0)) throw std::invalid_argument("grid spacing must be positive");

    const int ua = (fixed_axis + 1) % 3, va = (fixed_axis + 2) % 3;
    auto axis_of = [](const Vec3& v, int a) { return a == 0 ? v.x : (a == 1 ? v.y : v.z); };

    // grid symmetric about the bbox center, half-extents inflated 50%
    double cu = 0.5 * (axis_of(shape.bbox_min(), ua) + axis_of(shape.bbox_max(), ua));
    double cv = 0.5 * (axis_of(shape.bbox_min(), va) + axis_of(shape.bbox_max(), va));
    double hu = 0.75 * (axis_of(shape.bbox_max(), ua) - axis_of(shape.bbox_min(), ua));
    double hv = 0.75 * (axis_of(shape.bbox_max(), va) - axis_of(shape.bbox_min(), va));
    const int ku = static_cast<int>(std::floor(hu / spacing));
    const int kv = static_cast<int>(std::floor(hv / spacing));

    PlaneMap map;
    map.nu = 2 * ku + 1;
    map.nv = 2 * kv + 1;
    map.fixed_axis = fixed_axis;
    map.fixed_value = fixed_value;
    map.points.reserve(static_cast<size_t>(map.nu) * map.nv);
    for (int iu = -ku; iu <= ku; ++iu) {
        for (int iv = -kv; iv <= kv; ++iv) {
            double coords[3];
            coords[fixed_axis] = fixed_value;
            coords[ua] = cu + iu * spacing;
            coords[va] = cv + iv * spacing;
            map.points.push_back({coords[0], coords[1], coords[2]});
        }
    }
    map.fields = field_batch(shape, map.points, parallel);
    return map;
}

std::vector<SurfaceSample> face_gravity_samples(const ShapeModel& shape, double offset) {
    if (!(offset > 0)) throw std::invalid_argument("surface offset must be positive");
    std::vector<SurfaceSample> out;
    out.reserve(shape.faces().size());
    Scratch s;
    for (size_t fi = 0; fi < shape.faces().size(); ++fi) {
        const auto& f = shape.faces()[fi];
        Vec3 centroid = (shape.vertices()[f[0]] + shape.vertices()[f[1]] + shape.vertices()[f[2]]) / 3.0;
        Vec3 p = centroid + shape.face_normals()[fi] * offset;
        out.push_back({p, field_at_impl(shape, p, s)});
    }
    return out;
}

}  // namespace lander::gravity
