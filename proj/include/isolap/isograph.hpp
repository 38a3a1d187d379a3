// Isoradial graphs built from train-track arrangements on the torus.
//
// A periodic graph is specified by a list of track families, each a primitive
// homology class (h, v) with a transversal unit-vector angle alpha_bar. The
// construction realizes the multigrid picture: family i contributes the line
// family <p, n_i> = c_i + Z with integer normal n_i = (-v_i, h_i) and a fixed
// generic offset c_i. Arrangement faces are identified by their ceiling
// coordinates K_i, embedded at sum_i K_i e^{i alpha_i}; rhombi sit at line
// crossings. Faces of even K-sum form the primal graph (or odd, switchable:
// the two parities give dual isoradial graphs). All face bookkeeping is done
// in exact integer arithmetic so vertex identification can never drift.
#pragma once

#include <array>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "isolap/elliptic.hpp"

namespace isolap {

struct TrackSpec {
    int h = 0, v = 0;        // primitive homology of the family
    double alpha_bar = 0.0;  // transversal angle, radians
};

struct BuildOptions {
    double eps = 0.05;        // margin: every rhombus half-angle in (eps, pi/2-eps)
    bool primal_even = true;  // faces of even K-sum carry the primal graph
};

// Construction failures: bad homologies, cyclic-order violations, rhombus
// angle out of margin, degenerate arrangements.
class graph_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One rhombus = one primal edge together with its dual edge. The primal
// endpoints satisfy pos(y) + translate - pos(x) = e^{i alpha} + e^{i beta}
// with beta = alpha + 2 theta, theta in (0, pi/2).
struct RhombusEdge {
    int x = -1, y = -1;  // primal endpoints (fundamental-domain vertex ids)
    int dm = 0, dn = 0;  // y lives in the (dm, dn) translate of the domain
    double theta_bar = 0.0;
    double alpha_bar = 0.0, beta_bar = 0.0;
    int dual_x = -1, dual_y = -1;  // dual endpoints (opposite-parity faces)
    int ddm = 0, ddn = 0;
    int family_a = -1, family_b = -1;  // the two crossing track families
};

// A single closed track curve on the graph torus. A family splits into
// several parallel curves when its lines fall into distinct translation
// classes; all curves of a family share angle and homology.
struct TrainTrack {
    int family = -1;
    double angle_bar = 0.0;
    int h = 0, v = 0;        // homology in the graph translation basis
    std::vector<int> chain;  // edge ids crossed, in order along the curve
};

// Aggregated minimal path: for each needed direction, how many unit steps.
struct MinimalPath {
    std::vector<std::pair<double, int>> steps;  // (angle, count), angle-sorted
    int length = 0;                             // sum of counts
};

struct PeriodicGraph {
    std::vector<TrackSpec> tracks;
    std::vector<double> directions;  // sorted distinct track angles

    std::vector<cplx> vertex_pos;  // primal fundamental-domain faces
    std::vector<cplx> dual_pos;
    std::vector<RhombusEdge> edges;
    // Per primal vertex: (edge id, true if the vertex is the edge's x end).
    std::vector<std::vector<std::pair<int, bool>>> adj;

    std::vector<TrainTrack> track_curves;

    // Graph translation basis in arrangement coordinates and its embedding.
    std::array<long long, 2> basis1{}, basis2{};
    cplx period_x, period_y;
    int px = 0, py = 0;  // half crossing counts of the two basic cycles

    // Exact face coordinates: canonical K-vector per primal vertex, and the
    // per-family shift of K under translation by basis1/basis2.
    std::vector<std::vector<long long>> vertex_K;
    std::vector<long long> shift1, shift2;

    int num_vertices() const { return static_cast<int>(vertex_pos.size()); }
    int degree(int v) const { return static_cast<int>(adj[v].size()); }
    // Half-angles of the rhombi incident to vertex class v.
    std::vector<double> incident_angles(int v) const;

    // Minimal diamond path from vertex class i in translate (mi, ni) to
    // class j in (mj, nj). Throws graph_error if the classes are invalid.
    MinimalPath minimal_path(int i, int mi, int ni, int j, int mj,
                             int nj) const;

    // Newton polygon of the track-curve homologies: vertices of the closed
    // convex walk, starting from (0, 0), counterclockwise.
    std::vector<std::pair<long long, long long>> newton_polygon() const;
};

PeriodicGraph build_periodic_graph(const std::vector<TrackSpec>& tracks,
                                   const BuildOptions& opt = {});

// square, triangular, hexagonal, paper-fig4.
PeriodicGraph preset(const std::string& name);

// Finite patch: copies of the fundamental domain for translates in a box.
// Star-triangle moves operate on patches; vertices touched by a move lose
// their fundamental-domain class (cls = -1) and their mass is thereafter
// derived from the incident edges directly.
struct PatchEdge {
    int a = -1, b = -1;
    double theta_bar = 0.0;
};

struct Patch {
    static constexpr int kFree = -1;     // active, no fundamental-domain class
    static constexpr int kRemoved = -2;  // deleted by a move

    std::vector<cplx> pos;
    std::vector<int> cls;  // fundamental-domain class, kFree, or kRemoved
    std::vector<PatchEdge> edges;
    std::vector<std::vector<int>> adj;  // incident edge ids (dead edges absent)
    std::vector<int> full_degree;       // degree in the infinite graph
    std::map<std::array<int, 3>, int> index;  // (cls, m, n) -> vertex id

    const PeriodicGraph* base = nullptr;

    int find(int cls_id, int m, int n) const;
    bool active(int v) const { return cls[v] != kRemoved; }
    int other(int e, int v) const {
        return edges[e].a == v ? edges[e].b : edges[e].a;
    }
    bool interior(int v) const {
        return static_cast<int>(adj[v].size()) == full_degree[v];
    }
    std::vector<double> incident_angles(int v) const;
};

// All translates (m, n) with |m|, |n| <= radius.
Patch make_patch(const PeriodicGraph& g, int radius);

// Star -> triangle: removes the degree-3 vertex `center`, connecting its
// neighbors pairwise; the edge opposite the old half-angle theta gets
// pi/2 - theta. Requires the three half-angles to sum to pi.
Patch star_to_triangle(const Patch& p, int center);

// Triangle -> star: inverse move on a triangle a, b, c whose half-angles
// sum to pi/2. Returns the new patch; the created center is the last vertex.
Patch triangle_to_star(const Patch& p, int a, int b, int c);

}  // namespace isolap
