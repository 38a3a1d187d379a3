// Massive Laplacian operators built from elliptic edge weights.
//
// Every edge of half-angle theta carries conductance sc(theta|k); every
// vertex carries the mass  m^2(x) = sum_j [A(theta_j) - sc(theta_j)]  over
// its incident half-angles, so the diagonal is d(x) = sum_j A(theta_j).
// The operator acts as (Lf)(x) = d(x) f(x) - sum_j sc(theta_j) f(x_j).
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "isolap/elliptic.hpp"
#include "isolap/isograph.hpp"

namespace isolap {

// sc(theta_bar * 2K/pi | k).  theta_bar must lie in (0, pi/2).
double conductance(double theta_bar, const EllipticContext& ctx);

// One mass summand, A(theta) - sc(theta).  Strictly positive for k > 0.
double mass_term(double theta_bar, const EllipticContext& ctx);

// m^2(x) and d(x) from the multiset of incident half-angles.
double vertex_mass(const std::vector<double>& theta_bars,
                   const EllipticContext& ctx);
double vertex_diagonal(const std::vector<double>& theta_bars,
                       const EllipticContext& ctx);

// Operator restricted to the live vertices of a patch, with the killed
// boundary condition: the diagonal keeps the full-graph value d(x), so
// rows of boundary vertices "leak" mass to the deleted outside.  Vertices
// introduced by star-triangle moves must be interior, since their full
// incident-angle set is only known from the patch itself.
struct PatchOperator {
    Eigen::SparseMatrix<double> mat;
    std::vector<int> vertex_of_row;  // row -> patch vertex id
    std::vector<int> row_of_vertex;  // patch vertex id -> row, or -1
};
PatchOperator patch_laplacian(const Patch& p, const EllipticContext& ctx);

// Operator on the p-by-q torus quotient; edges wrap modulo (p, q).
struct TorusOperator {
    Eigen::SparseMatrix<double> mat;
    int classes, p, q;
    int index(int cls, int m, int n) const;
};
TorusOperator torus_laplacian(const PeriodicGraph& g, int p, int q,
                              const EllipticContext& ctx);

// Matrix of the operator on (z,w)-quasiperiodic functions, indexed by the
// fundamental-domain vertices.  An edge from x to the copy of y translated
// by (dm,dn) contributes -rho * z^-dm w^-dn to row x; consequently
// fourier_laplacian(1/z,1/w) is the transpose, and the massive exponential
// with parameter u spans the kernel at (z(u), w(u)).
Eigen::MatrixXcd fourier_laplacian(const PeriodicGraph& g, cplx z, cplx w,
                                   const EllipticContext& ctx);

}  // namespace isolap
