// Spectral curve of the quasiperiodic operator: characteristic Laurent
// polynomial, Newton polygon, elliptic parametrization u -> (z(u), w(u)),
// amoeba sampling with its bounded complement component, and adjugate
// diagnostics along the curve.
#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "isolap/elliptic.hpp"
#include "isolap/isograph.hpp"

namespace isolap {

// det of the quasiperiodic operator as a Laurent polynomial: coefficient of
// z^i w^j at c[(i+py)*(2px+1) + (j+px)], i in [-py, py], j in [-px, px].
// Real (the determinant is reciprocal), numerically cleaned.
struct CharPoly {
    int py = 0, px = 0;
    std::vector<double> c;

    double at(int i, int j) const { return c[(i + py) * (2 * px + 1) + j + px]; }
    double& at(int i, int j) { return c[(i + py) * (2 * px + 1) + j + px]; }
    cplx eval(cplx z, cplx w) const;
    cplx eval_dw(cplx z, cplx w) const;  // partial derivative in w
    double max_abs() const;
};

// Coefficients extracted by evaluating the determinant on a roots-of-unity
// grid and inverse DFT. The grid oversizes the expected support; nonzero
// margin coefficients trigger one enlargement, then an error.
CharPoly char_poly(const PeriodicGraph& g, const EllipticContext& ctx);

// Convex hull of the nonzero support (threshold 1e-10 of the max), vertices
// counterclockwise. Matches the track-homology polygon up to translation.
std::vector<std::pair<long long, long long>> support_hull(const CharPoly& p);

// Point of the spectral curve: z(u) = prod_T (i sqrt(k') sc(u_alpha_T))^{v_T}
// over oriented track curves, w(u) with exponents -h_T. Equals the massive
// exponential to the (1,0) and (0,1) translates.
std::pair<cplx, cplx> curve_param(const PeriodicGraph& g, cplx u,
                                  const EllipticContext& ctx);

struct AmoebaSample {
    // Log-images (log|z|, log|w|): scattered torus samples, then the two
    // boundary polylines, images of a midpoint grid on u real (outer, runs
    // through the tentacles) and on u + 2iK' (closed hole boundary).
    std::vector<std::pair<double, double>> scatter;
    std::vector<std::pair<double, double>> outer;
    std::vector<std::pair<double, double>> hole;
    double hole_area = 0.0;
};
AmoebaSample amoeba_sample(const PeriodicGraph& g, const EllipticContext& ctx,
                           int grid);

// Area of the bounded complement component. Primary value: shoelace over a
// dense sampling of the closed boundary curve.
double hole_area(const PeriodicGraph& g, const EllipticContext& ctx);
// Same area as the line integral  oint log|z| d log|w|  along the boundary,
// with the logarithmic derivative evaluated in closed form. Verification
// path for the shoelace value.
double hole_area_quadrature(const PeriodicGraph& g, const EllipticContext& ctx);

// Adjugate of the operator at (z(u), w(u)). On the curve the matrix has
// rank deficiency 1, the adjugate has rank one, and its diagonal is the
// constant g(u) of the curve's holomorphic form.
struct AdjugateDiag {
    Eigen::MatrixXcd adj;
    cplx g = 0.0;          // mean of the diagonal entries
    double max_dev = 0.0;  // max pairwise deviation over the diagonal
    double sv_min = 0.0;   // two smallest singular values of the operator;
    double sv_second = 0.0;  // rank deficiency 1 means only sv_min is tiny
};
AdjugateDiag adjugate_diag(const PeriodicGraph& g, cplx u,
                           const EllipticContext& ctx);

}  // namespace isolap
