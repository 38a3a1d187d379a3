// The discrete massive exponential and its large-distance rate function.
//
// A diamond-graph path step with direction e^{i alpha_bar} contributes the
// factor  i sqrt(k') sc((u - alpha)/2 | k),  alpha = alpha_bar * 2K/pi.
// The product over a path depends only on the endpoints; we always build it
// from a minimal path, whose step multiset also encodes the zeros (at the
// alpha_j) and poles (at alpha_j + 2K) of the resulting function of u.
#pragma once

#include <vector>

#include "isolap/elliptic.hpp"
#include "isolap/isograph.hpp"

namespace isolap {

struct ExpPathData {
    // Distinct step angles in elliptic units, in [0, 4K), with counts.
    std::vector<std::pair<double, int>> steps;
    int length = 0;          // |x - y| = total step count
    double sector_mid = 0;   // midpoint of the smallest arc holding all steps
    double sector_half = 0;  // its half-width; < K for a valid quasicrystal
};

// Step data between fundamental-domain vertices i at translate (mi,ni) and
// j at (mj,nj); both must be primal, so the length is even.
ExpPathData exp_path(const PeriodicGraph& g, int i, int mi, int ni, int j,
                     int mj, int nj, const EllipticContext& ctx);

// Product of the step factors at u.  Accumulated as a sum of logarithms,
// so arbitrarily long paths neither overflow nor underflow.
cplx mass_exp(const ExpPathData& path, cplx u, const EllipticContext& ctx);

// log of the factor magnitude rate at u + 2iK', averaged per unit length:
// chi(u) = sum_j n_j log( sqrt(k') nd((u-alpha_j)/2) ),  n_j = N_j/|x-y|.
// Governs exponential decay; requires |Im u| < 2K' and length >= 1.
cplx chi(const ExpPathData& path, cplx u, const EllipticContext& ctx);

// d(chi)/du and its derivative, from the closed forms
//   chi'  = (k^2/2) sum_j n_j (sn cn / dn)(u_alpha_j)
//   chi'' = (k^2/4) sum_j n_j (cn^2 - sn^2 + k^2 sn^2 cn^2 / dn^2)(u_alpha_j)
// valid for real u where no factor hits a pole.
double chi_prime(const ExpPathData& path, double u, const EllipticContext& ctx);
double chi_second(const ExpPathData& path, double u,
                  const EllipticContext& ctx);

// Spectral-curve coordinates: z(u) is the exponential from a vertex to its
// copy one period along the first basis vector, w(u) along the second.
cplx spectral_z(const PeriodicGraph& g, cplx u, const EllipticContext& ctx);
cplx spectral_w(const PeriodicGraph& g, cplx u, const EllipticContext& ctx);

}  // namespace isolap
