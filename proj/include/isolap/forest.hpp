// Rooted spanning forests with elliptic weights.
//
// A rooted spanning forest is an acyclic edge subset together with one
// marked root per connected component; its weight is the product of the
// edge conductances times m^2 over the roots. Equivalently it is a
// spanning tree of the extension G^r in which an extra vertex r joins
// every x through an edge of conductance m^2(x), and the partition
// function is det of the massive Laplacian. The edge/root process is
// determinantal with the transfer impedance kernel, assembled here either
// from a dense finite-volume Green matrix or from the local contour
// formula on periodic graphs. Sampling uses Wilson's algorithm driven by
// the killed walk. Free energy comes in three flavors: the angle-local
// closed form, the log-det Fourier integral, and the Lobachevsky-function
// limit of the massless spanning-tree model.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "isolap/elliptic.hpp"
#include "isolap/isograph.hpp"
#include "isolap/rng.hpp"

namespace isolap {

// Finite weighted graph with killing rates, the target of sampling and of
// the exact small-graph oracles. Parallel edges are allowed and kept
// distinct; self-loops are rejected (they can never enter a forest).
struct MassiveGraph {
    std::vector<std::array<int, 2>> edges;
    std::vector<double> rho;     // conductance per edge
    std::vector<double> mass2;   // killing rate per vertex
    int num_vertices() const { return static_cast<int>(mass2.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }
};

// p-by-q toroidal quotient of a periodic graph. Vertex (cls, a, b) gets id
// cls + classes * (a * q + b); the edge lifted from fundamental edge e in
// cell (a, b) gets id (a * q + b) * |E_1| + e. Requires p, q >= 2 so that
// no lifted edge closes on its own endpoint.
MassiveGraph torus_graph(const PeriodicGraph& g, int p, int q,
                         const EllipticContext& ctx);

// Massive Laplacian of the finite graph, dense.
Eigen::MatrixXd massive_laplacian(const MassiveGraph& g);

// log det of the massive Laplacian = log of the rooted-forest partition
// function. Valid for any size.
double log_partition_determinant(const MassiveGraph& g);

// Exact partition function by scanning all acyclic edge subsets; each
// component contributes the sum of its killing rates (the root choice).
// Throws std::invalid_argument beyond 24 edges.
double partition_enumeration(const MassiveGraph& g);

// Probability, by the same scan, that a forest contains all the given
// edges and that all the given vertices are roots.
double event_enumeration(const MassiveGraph& g,
                         const std::vector<int>& edge_ids,
                         const std::vector<int>& root_ids);

struct ForestSample {
    std::vector<int> edges;      // ids into MassiveGraph::edges
    std::vector<int> roots;      // one vertex per component
    std::vector<int> component;  // vertex -> index into roots
};

// Wilson's algorithm with the killed walk: from each unvisited vertex run
// the walk that crosses an incident edge with probability rho/d and dies
// with probability m^2/d, loop-erase, and graft the branch. Tables are
// precomputed so drawing many samples from one graph is cheap.
class WilsonSampler {
public:
    explicit WilsonSampler(const MassiveGraph& g);
    ForestSample sample(Rng& rng) const;

private:
    const MassiveGraph& g_;
    std::vector<int> offset_;              // per-vertex slice into the tables
    std::vector<double> cumulative_;       // running weight, death excluded
    std::vector<int> step_edge_, step_to_;
    std::vector<double> total_;            // d(x) = sum rho + m^2
};

ForestSample wilson_sample(const MassiveGraph& g, Rng& rng);

// One item of a joint marginal: an oriented edge or a root event.
struct ForestItem {
    enum Kind { kEdge, kRoot };
    Kind kind = kEdge;
    int id = 0;             // edge id (kEdge) or vertex id (kRoot)
    bool reversed = false;  // swap the edge orientation
    static ForestItem edge(int id, bool reversed = false) {
        return {kEdge, id, reversed};
    }
    static ForestItem root(int v) { return {kRoot, v, false}; }
};

// Same, but naming objects of a periodic graph: fundamental-domain edge or
// vertex class translated by (m, n).
struct PeriodicItem {
    ForestItem::Kind kind = ForestItem::kEdge;
    int id = 0;
    int m = 0, n = 0;
    bool reversed = false;
    static PeriodicItem edge(int id, int m = 0, int n = 0,
                             bool reversed = false) {
        return {ForestItem::kEdge, id, m, n, reversed};
    }
    static PeriodicItem root(int cls, int m = 0, int n = 0) {
        return {ForestItem::kRoot, cls, m, n, false};
    }
};

// Transfer impedance kernel: the joint probability of the items is the
// determinant of this matrix. The column weight is the conductance of the
// column edge or the killing rate of the column vertex, so the kernel is
// not symmetric, but H(e,e')/rho(e') is, and principal minors are
// probabilities. Duplicate items throw std::invalid_argument.
Eigen::MatrixXd transfer_impedance(const MassiveGraph& g,
                                   const std::vector<ForestItem>& items);
Eigen::MatrixXd transfer_impedance(const PeriodicGraph& g,
                                   const std::vector<PeriodicItem>& items,
                                   const EllipticContext& ctx);

// det of a kernel block, clamped against harmless negative round-off.
// Throws std::runtime_error below -1e-9: a genuinely negative probability
// means the kernel is inconsistent.
double marginal(const Eigen::MatrixXd& kernel);

// Closed forms for singleton events on the infinite graph.
double edge_probability(double theta_bar, const EllipticContext& ctx);
double root_probability(double mass2, const EllipticContext& ctx);

// Free energy per fundamental domain, minus the growth rate of the
// partition functions on n x n tori.
//
// The closed form is local in the half-angles: |V_1| times an integral
// over a full quarter-period plus one integral per edge. The _alt variant
// is the same value written through integration by parts; keeping both
// exposes the identity as a cheap self-check.
double free_energy_closed(const PeriodicGraph& g, const EllipticContext& ctx);
double free_energy_closed_alt(const PeriodicGraph& g,
                              const EllipticContext& ctx);

// -(2 pi)^-2 integral of log det of the quasiperiodic operator over the
// unit torus, trapezoid-doubled until two refinements agree within tol.
// weight_scale multiplies every conductance and killing rate, which must
// shift the result by -|V_1| log(scale). Throws std::runtime_error if the
// grid refinement does not settle.
double free_energy_fourier(const PeriodicGraph& g, const EllipticContext& ctx,
                           double weight_scale = 1.0, double tol = 1e-8);

// k -> 0 limit: free energy of the spanning-tree model with tan
// conductances, a finite sum of Lobachevsky values over the edges.
double free_energy_critical(const PeriodicGraph& g);

// L(x) = -int_0^x log(2 sin t) dt.
double lobachevsky(double x);

// Twisted entropy: -F minus sum_e 2 H(2 theta_e) log rho(theta_e). Tends
// to zero when the graph degenerates to its flat limit.
double twisted_entropy(const PeriodicGraph& g, const EllipticContext& ctx);

// Least-squares fit of F^k - F^0 against {k^2 log(1/k), k^2} over a grid
// of moduli, probing the leading singular behavior at the flat limit.
struct PhaseFit {
    double coef_klog = 0.0;  // coefficient of k^2 log(1/k)
    double coef_k2 = 0.0;
};
PhaseFit phase_expansion_fit(const PeriodicGraph& g,
                             const std::vector<double>& ks);

}  // namespace isolap
