// Star-triangle moves preserve the rooted-forest measure. This module
// carries the eight local partition identities with their constant ratio,
// the weight identities behind them, the harmonic extension through the
// disappearing center, and the equality of Green functions on patches
// related by one move.
#pragma once

#include <array>
#include <vector>

#include "isolap/elliptic.hpp"
#include "isolap/isograph.hpp"

namespace isolap {

// Local data of one move. The star has a degree-3 center x0 joined to
// x1, x2, x3 through rhombi of elliptic half-angles theta[i] summing to
// 2K; the triangle replaces those edges by x_j x_k with half-angle
// K - theta_i. mass2[i] is the killing rate of x_i on the star side; it
// stands for the rest of the rhombus fan at x_i, which the move leaves
// alone, so any nonnegative value is admissible. `rooted` flags which of
// x1, x2, x3 (bits 0..2) are wired to the root through the rest of the
// graph.
struct StarTriangleCase {
    std::array<double, 3> theta{};
    std::array<double, 3> mass2{};
    unsigned rooted = 0;
};

enum class MoveSide { kStar, kTriangle };

// Killing rate of the center, read off its three-rhombus fan.
double star_center_mass(const std::array<double, 3>& theta,
                        const EllipticContext& ctx);

// Killing rate of x_i on the triangle side: the fan loses theta[i] and
// gains the two opposite triangle half-angles.
double triangle_mass(const StarTriangleCase& c, int i,
                     const EllipticContext& ctx);

// Restricted partition function of the local configurations that extend
// a fixed outside configuration to a forest, under the given boundary
// condition, written out term by term.
double yb_partition(const StarTriangleCase& c, MoveSide side,
                    const EllipticContext& ctx);

// Same quantity from first principles: contract the rooted outer
// vertices into the root and count weighted spanning trees of the local
// picture by the matrix-tree theorem.
double yb_partition_enumerated(const StarTriangleCase& c, MoveSide side,
                               const EllipticContext& ctx);

// C = k' sc(theta1) sc(theta2) sc(theta3): the star-to-triangle ratio of
// the local partition functions, the same for every boundary condition.
double zinv_constant(const std::array<double, 3>& theta,
                     const EllipticContext& ctx);

// Residuals of the two identities tying masses to conductances: `center`
// checks k' rho1 rho2 rho3 = m^2(x0) + rho1 + rho2 + rho3, `outer` the
// worst of the three rewritings of m'^2(x_i) - m^2(x_i) in terms of
// conductances alone.
struct WeightResiduals {
    double center = 0.0;
    double outer = 0.0;
};
WeightResiduals weight_identity_residuals(const std::array<double, 3>& theta,
                                          const EllipticContext& ctx);

// The unique value at the center making a function with the given values
// at x1, x2, x3 massive harmonic at x0.
double harmonic_extension(const StarTriangleCase& c,
                          const std::array<double, 3>& f,
                          const EllipticContext& ctx);

// Max |G_star - G_triangle| over the vertex pairs, both Green functions
// obtained by dense killed-boundary solves. The second patch must be the
// first with one move applied at `center`; pairs must avoid the center.
double green_invariance_check(const Patch& star, const Patch& triangle,
                              int center, const EllipticContext& ctx,
                              const std::vector<std::array<int, 2>>& pairs);

}  // namespace isolap
