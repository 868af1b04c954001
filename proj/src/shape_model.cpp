#include "lander/shape_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "lander/errors.hpp"

namespace lander::gravity {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

double signed_volume(const std::vector<Vec3>& vertices, const std::vector<std::array<int, 3>>& faces) {
    double six_v = 0;
    for (const auto& f : faces) {
        const Vec3& a = vertices[f[0]];
        const Vec3& b = vertices[f[1]];
        const Vec3& c = vertices[f[2]];
        six_v += dot(a, cross(b, c));
    }
    return six_v / 6.0;
}

ShapeModel::ShapeModel(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces, double density)
    : vertices_(std::move(vertices)), faces_(std::move(faces)), density_(density) {
    if (!(density_ > 0)) throw std::invalid_argument("shape density must be positive");
    if (vertices_.size() < 4 || faces_.size() < 4)
        throw TopologyError("mesh too small to enclose a volume");

    const int nv = static_cast<int>(vertices_.size());
    for (const auto& f : faces_) {
        for (int k = 0; k < 3; ++k)
            if (f[k] < 0 || f[k] >= nv) throw TopologyError("face references a missing vertex");
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
            throw TopologyError("degenerate face (repeated vertex)");
    }

    face_normals_.reserve(faces_.size());
    for (const auto& f : faces_) {
        Vec3 n = cross(vertices_[f[1]] - vertices_[f[0]], vertices_[f[2]] - vertices_[f[0]]);
        double len = n.norm();
        if (!(len > 0)) throw TopologyError("zero-area face");
        face_normals_.push_back(n / len);
    }

    // Undirected edge map. A watertight oriented mesh visits every edge twice,
    // once per direction; the per-face edge dyads accumulate here as well.
    std::map<std::pair<int, int>, int> edge_index;
    std::vector<int> forward_visits, backward_visits;
    for (size_t fi = 0; fi < faces_.size(); ++fi) {
        const auto& f = faces_[fi];
        const Vec3& n = face_normals_[fi];
        for (int k = 0; k < 3; ++k) {
            int u = f[k], w = f[(k + 1) % 3];
            Vec3 along = vertices_[w] - vertices_[u];
            double len = along.norm();
            if (!(len > 0)) throw TopologyError("zero-length edge");
            auto key = std::minmax(u, w);
            auto [it, fresh] = edge_index.try_emplace(key, static_cast<int>(edges_.size()));
            if (fresh) {
                edges_.push_back({key.first, key.second, len, Mat3{}});
                forward_visits.push_back(0);
                backward_visits.push_back(0);
            }
            Edge& e = edges_[it->second];
            // outward in-plane normal of this edge within face fi
            e.dyad += outer(n, cross(along / len, n));
            (u < w ? forward_visits : backward_visits)[it->second] += 1;
        }
    }
    for (size_t ei = 0; ei < edges_.size(); ++ei) {
        if (forward_visits[ei] != 1 || backward_visits[ei] != 1)
            throw TopologyError("mesh is not closed: an edge is not shared by exactly two "
                                "consistently wound faces");
    }

    volume_ = signed_volume(vertices_, faces_);
    if (!(volume_ > 0))
        throw OrientationError("face normals point inward (signed volume <= 0)");

    bbox_min_ = bbox_max_ = vertices_[0];
    for (const Vec3& v : vertices_) {
        bbox_min_.x = std::min(bbox_min_.x, v.x);
        bbox_min_.y = std::min(bbox_min_.y, v.y);
        bbox_min_.z = std::min(bbox_min_.z, v.z);
        bbox_max_.x = std::max(bbox_max_.x, v.x);
        bbox_max_.y = std::max(bbox_max_.y, v.y);
        bbox_max_.z = std::max(bbox_max_.z, v.z);
    }
}

double ShapeModel::mass() const { return density_ * volume_; }

double ShapeModel::mean_radius() const {
    return std::cbrt(3.0 * volume_ / (4.0 * kPi));
}

ShapeModel parse_shape(const std::string& text, double density, const std::string& origin) {
    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> faces;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& what) {
        throw ParseError(origin + ":" + std::to_string(lineno) + ": " + what);
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);

        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;  // blank

        if (tag == "v") {
            Vec3 v;
            if (!(ls >> v.x >> v.y >> v.z)) fail("vertex line needs three coordinates");
            std::string extra;
            if (ls >> extra) fail("trailing junk on vertex line: '" + extra + "'");
            verts.push_back(v);
        } else if (tag == "f") {
            long a, b, c;
            if (!(ls >> a >> b >> c)) fail("face line needs three vertex indices");
            std::string extra;
            if (ls >> extra) fail("trailing junk on face line: '" + extra + "'");
            for (long idx : {a, b, c})
                if (idx < 1 || idx > static_cast<long>(verts.size()))
                    fail("face index " + std::to_string(idx) + " out of range");
            faces.push_back({static_cast<int>(a - 1), static_cast<int>(b - 1), static_cast<int>(c - 1)});
        } else {
            fail("unsupported directive '" + tag + "' (only v/f lines are accepted)");
        }
    }
    return ShapeModel(std::move(verts), std::move(faces), density);
}

ShapeModel load_shape(const std::string& path, double density) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open shape file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_shape(buf.str(), density, path);
}

ShapeModel make_cube(double side, double density) {
    const double h = side / 2;
    std::vector<Vec3> v = {
        {-h, -h, -h}, {h, -h, -h}, {h, h, -h}, {-h, h, -h},
        {-h, -h, h},  {h, -h, h},  {h, h, h},  {-h, h, h},
    };
    std::vector<std::array<int, 3>> f = {
        {0, 2, 1}, {0, 3, 2},  // -z
        {4, 5, 6}, {4, 6, 7},  // +z
        {0, 1, 5}, {0, 5, 4},  // -y
        {2, 3, 7}, {2, 7, 6},  // +y
        {0, 4, 7}, {0, 7, 3},  // -x
        {1, 2, 6}, {1, 6, 5},  // +x
    };
    return ShapeModel(std::move(v), std::move(f), density);
}

ShapeModel make_icosphere(double radius, double density, int subdivisions) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    std::vector<std::array<int, 3>> f = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
    };
    for (Vec3& p : v) p = normalized(p) * radius;

    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            int idx = static_cast<int>(v.size());
            v.push_back(normalized(v[a] + v[b]) * radius);
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(f.size() * 4);
        for (const auto& t : f) {
            int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        f = std::move(next);
    }
    return ShapeModel(std::move(v), std::move(f), density);
}

}  // namespace lander::gravity
