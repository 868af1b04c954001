#ifndef LANDER_SHAPE_MODEL_HPP
#define LANDER_SHAPE_MODEL_HPP

#include <array>
#include <string>
#include <vector>

#include "lander/vec.hpp"

namespace lander::gravity {

// Closed, outward-oriented triangulated body with uniform density.
// Face/edge dyads for the polyhedron field are precomputed once at build time;
// the model is immutable afterwards, so concurrent field queries are safe.
class ShapeModel {
public:
    struct Edge {
        int a = 0, b = 0;   // vertex indices, a < b
        double length = 0;  // |v_b - v_a|
        Mat3 dyad;          // sum of the two per-face edge dyads
    };

    // Validates closure and orientation; throws TopologyError / OrientationError /
    // std::invalid_argument (density) on bad input.
    ShapeModel(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces, double density);

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& faces() const { return faces_; }
    const std::vector<Vec3>& face_normals() const { return face_normals_; }
    const std::vector<Edge>& edges() const { return edges_; }

    double density() const { return density_; }
    double volume() const { return volume_; }
    double mass() const;
    // Radius of the volume-equivalent sphere; a convenient body-size scale.
    double mean_radius() const;

    Vec3 bbox_min() const { return bbox_min_; }
    Vec3 bbox_max() const { return bbox_max_; }

private:
    std::vector<Vec3> vertices_;
    std::vector<std::array<int, 3>> faces_;
    std::vector<Vec3> face_normals_;
    std::vector<Edge> edges_;
    double density_ = 0;
    double volume_ = 0;
    Vec3 bbox_min_, bbox_max_;
};

// Reads the OBJ subset used for radar shape models: `v x y z` and `f i j k`
// lines (1-based indices), plus blank lines and `#` comments. Anything else is
// a ParseError with the offending line number.
ShapeModel load_shape(const std::string& path, double density);

// Same parser over an in-memory buffer (used by tests and the loader).
ShapeModel parse_shape(const std::string& text, double density, const std::string& origin = "<memory>");

// Signed volume by the divergence theorem; positive for outward orientation.
double signed_volume(const std::vector<Vec3>& vertices, const std::vector<std::array<int, 3>>& faces);

// Synthetic fixtures.
ShapeModel make_cube(double side, double density);
ShapeModel make_icosphere(double radius, double density, int subdivisions);

}  // namespace lander::gravity

#endif
