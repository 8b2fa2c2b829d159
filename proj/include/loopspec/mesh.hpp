// Ring-structured triangulations of a truncated disk around a star-shaped
// loop: the loop is resolved as a mesh-conforming polyline, the radial
// spacing is graded geometrically away from the loop (the bound states decay
// on the scale 1/beta), and no node or quadrature point falls on the flux
// origin.
#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "loopspec/curve.hpp"

namespace loopspec {

struct Mesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::array<int, 2>> gamma_edges;  // consecutive nodes on the loop
    std::vector<int> dirichlet_nodes;             // far boundary
    double far_radius = 0.0;

    int size() const { return static_cast<int>(nodes.size()); }
};

struct MeshControl {
    int n_theta = 96;
    double h0 = 0.0;           // radial spacing at the loop; 0 = auto from beta
    double growth = 1.03;      // geometric grading in the boundary layer
    double layer_extent = 0.0; // half thickness of the fine layer; 0 = auto
    double far_padding = 0.0;  // distance from the loop to the far circle; 0 = auto
    double core_fraction = 0.05;  // innermost ring radius relative to min loop radius

    MeshControl refined(double factor) const {
        MeshControl c = *this;
        c.n_theta = static_cast<int>(std::lround(n_theta * factor));
        c.h0 = h0 / factor;
        c.growth = 1.0 + (growth - 1.0) / factor;
        return c;
    }

    /// Fills the beta-dependent automatic fields so that uniform refinement
    /// acts on concrete values.
    MeshControl resolved(const LoopCurve& curve, double beta) const {
        MeshControl c = *this;
        const double bscale = std::max(beta, 5.0);
        if (c.h0 <= 0.0) c.h0 = std::min(0.02 / bscale, 1e-3 * curve.length());
        if (c.layer_extent <= 0.0) c.layer_extent = 14.0 / bscale;
        if (c.far_padding <= 0.0) c.far_padding = std::max(1.2, 16.0 / bscale);
        return c;
    }
};

namespace mesh_detail {

/// Radius of the (star-shaped) loop along the ray of angle theta, found by
/// bisection on the lifted polar angle of the arc-length parametrization.
inline double ray_radius(const LoopCurve& curve, double theta) {
    const int n = 4 * curve.grid_size();
    const double L = curve.length();
    // lifted angle table
    static thread_local const LoopCurve* cached = nullptr;
    static thread_local std::vector<double> lift;
    if (cached != &curve) {
        lift.assign(static_cast<std::size_t>(n + 1), 0.0);
        double prev = std::atan2(curve.position(0.0).y(), curve.position(0.0).x());
        lift[0] = prev;
        for (int i = 1; i <= n; ++i) {
            const Vec2 p = curve.position(L * i / n);
            double ang = std::atan2(p.y(), p.x());
            while (ang < prev - M_PI) ang += 2.0 * M_PI;
            while (ang > prev + M_PI) ang -= 2.0 * M_PI;
            lift[static_cast<std::size_t>(i)] = ang;
            prev = ang;
        }
        cached = &curve;
    }
    double target = theta;
    while (target < lift[0]) target += 2.0 * M_PI;
    while (target >= lift[0] + 2.0 * M_PI) target -= 2.0 * M_PI;
    int lo = 0, hi = n;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (lift[static_cast<std::size_t>(mid)] <= target) lo = mid;
        else hi = mid;
    }
    double slo = L * lo / n, shi = L * hi / n;
    for (int it = 0; it < 64; ++it) {
        const double sm = 0.5 * (slo + shi);
        const Vec2 p = curve.position(sm);
        double ang = std::atan2(p.y(), p.x());
        // compare against the local lift
        double ref = lift[static_cast<std::size_t>(lo)];
        while (ang < ref - M_PI) ang += 2.0 * M_PI;
        while (ang > ref + M_PI) ang -= 2.0 * M_PI;
        if (ang <= target) slo = sm;
        else shi = sm;
    }
    return curve.position(0.5 * (slo + shi)).norm();
}

}  // namespace mesh_detail

/// Ring mesh generator. Rings follow the loop shape near it, blend to a
/// circle at the far Dirichlet boundary, and shrink proportionally toward a
/// small core polygon that is fan-triangulated without a center node (the
/// flux origin must not carry a degree of freedom).
inline Mesh generate_loop_mesh(const LoopCurve& curve, double beta, const MeshControl& control) {
    if (curve.winding_number_origin() != 1)
        throw std::invalid_argument("generate_loop_mesh: flux origin not enclosed by the loop");
    MeshControl c = control.resolved(curve, beta);
    if (c.n_theta < 24) throw std::invalid_argument("generate_loop_mesh: n_theta too small");

    const int nt = c.n_theta;
    std::vector<double> rho(static_cast<std::size_t>(nt));
    double rho_min = std::numeric_limits<double>::max(), rho_max = 0.0;
    for (int j = 0; j < nt; ++j) {
        rho[static_cast<std::size_t>(j)] = mesh_detail::ray_radius(curve, 2.0 * M_PI * j / nt);
        rho_min = std::min(rho_min, rho[static_cast<std::size_t>(j)]);
        rho_max = std::max(rho_max, rho[static_cast<std::size_t>(j)]);
    }
    const double extent = std::min(c.layer_extent, 0.35 * rho_min);

    // shared distance ladder through the fine layer
    std::vector<double> ladder;
    {
        double d = 0.0, h = c.h0;
        while (d < extent) {
            d += h;
            ladder.push_back(d);
            h *= c.growth;
        }
    }
    // ring radii per ray, inside out
    std::vector<std::vector<double>> rings;  // rings[i][j]
    int loop_ring = -1;
    {
        std::vector<std::vector<double>> inner;  // from the loop inward
        for (double d : ladder) {
            std::vector<double> ring(static_cast<std::size_t>(nt));
            for (int j = 0; j < nt; ++j) ring[static_cast<std::size_t>(j)] = rho[static_cast<std::size_t>(j)] - d;
            inner.push_back(ring);
        }
        // proportional shrink toward the core
        const double r_core = c.core_fraction * rho_min;
        double f = 1.0;
        const double base = 1.0 - ladder.back() / rho_min;
        while (base * f * rho_min > r_core * 1.35) {
            f *= 0.78;
            std::vector<double> ring(static_cast<std::size_t>(nt));
            for (int j = 0; j < nt; ++j)
                ring[static_cast<std::size_t>(j)] = (rho[static_cast<std::size_t>(j)] - ladder.back()) * f;
            inner.push_back(ring);
        }
        for (auto it = inner.rbegin(); it != inner.rend(); ++it) rings.push_back(*it);

        loop_ring = static_cast<int>(rings.size());
        rings.push_back(rho);

        // outward layer
        for (double d : ladder) {
            std::vector<double> ring(static_cast<std::size_t>(nt));
            for (int j = 0; j < nt; ++j) ring[static_cast<std::size_t>(j)] = rho[static_cast<std::size_t>(j)] + d;
            rings.push_back(ring);
        }
        // coarse blend to the far circle, strictly monotone along each ray
        const double r_far = rho_max + c.far_padding;
        std::vector<double> offs;
        double d = ladder.back();
        double h = (ladder.size() > 1 ? ladder.back() - ladder[ladder.size() - 2] : c.h0);
        while (true) {
            const double hn = 1.3 * h;
            if (rho_max + d + hn >= r_far - 0.25 * hn) break;
            h = hn;
            d += h;
            offs.push_back(d);
        }
        const int ko = static_cast<int>(offs.size());
        for (int k = 0; k < ko; ++k) {
            const double w = static_cast<double>(k + 1) / (ko + 1);
            std::vector<double> ring(static_cast<std::size_t>(nt));
            for (int j = 0; j < nt; ++j) {
                const double shaped = rho[static_cast<std::size_t>(j)] + offs[static_cast<std::size_t>(k)];
                const double round = rho_max + offs[static_cast<std::size_t>(k)];
                ring[static_cast<std::size_t>(j)] = (1.0 - w) * shaped + w * round;
            }
            rings.push_back(ring);
        }
        rings.push_back(std::vector<double>(static_cast<std::size_t>(nt), r_far));
    }

    Mesh mesh;
    mesh.far_radius = rings.back()[0];
    const int nrings = static_cast<int>(rings.size());
    mesh.nodes.reserve(static_cast<std::size_t>(nrings * nt));
    for (int i = 0; i < nrings; ++i)
        for (int j = 0; j < nt; ++j) {
            const double th = 2.0 * M_PI * j / nt;
            mesh.nodes.emplace_back(rings[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * std::cos(th),
                                    rings[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * std::sin(th));
        }
    auto id = [nt](int ring, int j) { return ring * nt + (j % nt); };

    // The innermost ring is shifted off-center so that no fan edge (and no
    // edge midpoint, where the area quadrature samples the singular |A|^2)
    // comes close to the flux line; the clearance is verified and the shift
    // direction rotated until it holds.
    double ring0_min = 1e300;
    for (int j = 0; j < nt; ++j)
        ring0_min = std::min(ring0_min, rings[0][static_cast<std::size_t>(j)]);
    {
        bool placed = false;
        for (int attempt = 0; attempt < 32 && !placed; ++attempt) {
            const double ang = 0.37 + 0.21 * attempt;
            const Vec2 off = 0.12 * ring0_min * Vec2(std::cos(ang), std::sin(ang));
            for (int j = 0; j < nt; ++j) {
                const double th = 2.0 * M_PI * j / nt;
                mesh.nodes[static_cast<std::size_t>(j)] =
                    rings[0][static_cast<std::size_t>(j)] * Vec2(std::cos(th), std::sin(th)) + off;
            }
            double clearance = 1e300;
            for (int j = 1; j + 1 < nt; ++j) {
                const Vec2 a = mesh.nodes[static_cast<std::size_t>(id(0, 0))];
                const Vec2 b = mesh.nodes[static_cast<std::size_t>(id(0, j))];
                const Vec2 d = mesh.nodes[static_cast<std::size_t>(id(0, j + 1))];
                for (const Vec2& q : {0.5 * (a + b), 0.5 * (b + d), 0.5 * (d + a)})
                    clearance = std::min(clearance, q.norm());
            }
            placed = clearance > 0.02 * ring0_min;
        }
        if (!placed) throw std::runtime_error("generate_loop_mesh: could not clear the flux origin");
    }

    // core fan over ring 0 from its vertex 0 (no node at the origin)
    for (int j = 1; j + 1 < nt; ++j)
        mesh.triangles.push_back({id(0, 0), id(0, j), id(0, j + 1)});
    // quads between consecutive rings
    for (int i = 0; i + 1 < nrings; ++i)
        for (int j = 0; j < nt; ++j) {
            mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }

    for (int j = 0; j < nt; ++j) mesh.gamma_edges.push_back({id(loop_ring, j), id(loop_ring, j + 1)});
    for (int j = 0; j < nt; ++j) mesh.dirichlet_nodes.push_back(id(nrings - 1, j));
    return mesh;
}

/// Plain-text element list (documented in the README).
inline void write_mesh(const Mesh& mesh, std::ostream& os) {
    os << "loopspec-mesh 1\n";
    os << "nodes " << mesh.nodes.size() << "\n";
    os.precision(17);
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
        os << i << " " << mesh.nodes[i].x() << " " << mesh.nodes[i].y() << "\n";
    os << "triangles " << mesh.triangles.size() << "\n";
    for (const auto& t : mesh.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
    os << "gamma_edges " << mesh.gamma_edges.size() << "\n";
    for (const auto& e : mesh.gamma_edges) os << e[0] << " " << e[1] << "\n";
    os << "dirichlet " << mesh.dirichlet_nodes.size() << "\n";
    for (int i : mesh.dirichlet_nodes) os << i << "\n";
}

inline Mesh read_mesh(std::istream& is) {
    Mesh mesh;
    std::string tag;
    int version = 0;
    is >> tag >> version;
    if (tag != "loopspec-mesh" || version != 1)
        throw std::runtime_error("read_mesh: unrecognized mesh header");
    std::size_t n = 0;
    is >> tag >> n;
    if (tag != "nodes") throw std::runtime_error("read_mesh: expected nodes section");
    mesh.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t idx;
        double x, y;
        is >> idx >> x >> y;
        mesh.nodes[idx] = Vec2(x, y);
    }
    is >> tag >> n;
    if (tag != "triangles") throw std::runtime_error("read_mesh: expected triangles section");
    mesh.triangles.resize(n);
    for (auto& t : mesh.triangles) is >> t[0] >> t[1] >> t[2];
    is >> tag >> n;
    if (tag != "gamma_edges") throw std::runtime_error("read_mesh: expected gamma_edges section");
    mesh.gamma_edges.resize(n);
    for (auto& e : mesh.gamma_edges) is >> e[0] >> e[1];
    is >> tag >> n;
    if (tag != "dirichlet") throw std::runtime_error("read_mesh: expected dirichlet section");
    mesh.dirichlet_nodes.resize(n);
    for (int& i : mesh.dirichlet_nodes) is >> i;
    for (const Vec2& p : mesh.nodes) mesh.far_radius = std::max(mesh.far_radius, p.norm());
    return mesh;
}

}  // namespace loopspec
