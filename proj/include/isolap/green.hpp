// Massive Green function, four independent ways.
//
//  * green_local: contour integral (k'/4i pi) int e_{(x,y)}(u) du over a
//    vertical period of the u-torus, evaluated by the trapezoid rule.
//    Depends on nothing but the minimal-path step data, so it is local.
//  * green_residue: the same integral collapsed by residues, available
//    when every step angle occurs once (all poles simple).
//  * green_truncated_solve: sparse solve of L G = delta on a patch with
//    killed boundary, radius grown until the value stabilizes.
//  * green_fourier: double Fourier inversion of the quasiperiodic matrix.
//
// All methods require k > 0; the massless Green function diverges.
#pragma once

#include "isolap/elliptic.hpp"
#include "isolap/expfun.hpp"
#include "isolap/isograph.hpp"

namespace isolap {

struct GreenValue {
    double value = 0.0;
    double imag_residual = 0.0;  // |Im| of the contour integral, diagnostic
    int nodes = 0;               // quadrature or grid size actually used
};

// Contour abscissa: the embedded ray angle from x to y in elliptic units,
// nudged to the step-sector midpoint when within 0.05 K of a pole abscissa.
// For x = y any abscissa works and the integrand is 1.
GreenValue green_local_full(const PeriodicGraph& g, int i, int mi, int ni,
                            int j, int mj, int nj, const EllipticContext& ctx);
double green_local(const PeriodicGraph& g, int i, int mi, int ni, int j,
                   int mj, int nj, const EllipticContext& ctx);

// Core evaluator on explicit path data; the graph overloads feed it the
// minimal path. Two calls with equal path data give bit-identical results.
GreenValue green_local_path(const ExpPathData& path, cplx displacement,
                            const EllipticContext& ctx);

// Residue form (k'/2)[ sum_l H(alpha_l + 2K) Res_l + (2K'/pi) e(2iK') ].
// Throws std::domain_error if some step angle has multiplicity > 1.
double green_residue(const PeriodicGraph& g, int i, int mi, int ni, int j,
                     int mj, int nj, const EllipticContext& ctx);

// Green function between the endpoints of one edge with half-angle theta,
// whose rhombus vectors are alpha_bar and alpha_bar + 2 theta_bar, by the
// three closed forms:
//   a = [H(alpha+2K) - H(beta+2K)]/sc(theta) + (k'K'/pi) k'/(dn(a/2)dn(b/2))
//   b = [H(alpha) - H(beta)]/sc(theta) + (K'/pi) dn(alpha/2) dn(beta/2)
//   c = -H(2 theta)/sc(theta) + (K'/pi) dn(theta)
// The three agree; c depends on theta only.
struct NeighborGreen {
    double a, b, c;
};
NeighborGreen green_neighbor(double theta_bar, double alpha_bar,
                             const EllipticContext& ctx);

// Solve on patches of growing radius until two consecutive values differ
// by less than tol; throws std::runtime_error if the cap is reached.
double green_truncated_solve(const PeriodicGraph& g, int i, int mi, int ni,
                             int j, int mj, int nj, const EllipticContext& ctx,
                             double tol = 1e-10);

// (1/4 pi^2) int int e^{-i m phi - i n psi} [Delta(z,w)^{-1}]_{y,x}, the
// Green function between x and the (m,n)-translate of y. Grid size doubles
// until the change drops below tol.
GreenValue green_fourier_full(const PeriodicGraph& g, int x, int y, int m,
                              int n, const EllipticContext& ctx,
                              double tol = 1e-9);
double green_fourier(const PeriodicGraph& g, int x, int y, int m, int n,
                     const EllipticContext& ctx, double tol = 1e-9);

}  // namespace isolap
