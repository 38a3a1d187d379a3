// Large-distance behavior of the Green function. The contour integral
// concentrates at the unique critical point u0 of the rate function chi on
// the step-direction sector, giving
//   G(x,y) ~ k' exp(|x-y| chi(u0)) / (2 sqrt(2 pi |x-y| chi''(u0))),
// and the same rate is the support-function value of the spectral-curve
// amoeba hole in the displacement direction.
#pragma once

#include "isolap/elliptic.hpp"
#include "isolap/expfun.hpp"
#include "isolap/isograph.hpp"

namespace isolap {

struct SaddleData {
    double u0 = 0;          // critical point of chi, inside the step sector
    double chi0 = 0;        // chi(u0) < 0, the per-step log decay rate
    double chi2 = 0;        // chi''(u0) > 0
    double sector_mid = 0;  // midpoint of the step-direction sector
};

// Locates u0 by a bracketed root solve of chi' on [mid - half, mid + half]
// (chi' is negative at the left end and positive at the right), bisection
// then Newton polish; |chi'(u0)| ends below 1e-11. A path with one distinct
// direction has u0 at that angle by oddness. Requires length >= 1 and a
// direction sector narrower than the half-period.
SaddleData saddle_point(const ExpPathData& path, const EllipticContext& ctx);
SaddleData saddle_point(const PeriodicGraph& g, int i, int mi, int ni, int j,
                        int mj, int nj, const EllipticContext& ctx);

double green_asymptotic(const ExpPathData& path, const EllipticContext& ctx);
double green_asymptotic(const PeriodicGraph& g, int i, int mi, int ni, int j,
                        int mj, int nj, const EllipticContext& ctx);

// Support-function value of the amoeba hole: inf over the hole of -r.s with
// r the unit vector along (m,n), sampled on the boundary curve
// s(u) = (log|z(u+2iK')|, log|w(u+2iK')|) and refined by golden section.
// Negative; equals chi(u0) |x-y| / ||(m,n)|| for translates along (m,n).
double rate_from_amoeba(const PeriodicGraph& g, int m, int n,
                        const EllipticContext& ctx);

}  // namespace isolap
