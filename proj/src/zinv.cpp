#include "isolap/zinv.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "isolap/laplacian.hpp"

namespace isolap {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate_angles(const std::array<double, 3>& theta,
                     const EllipticContext& ctx, const char* where) {
    for (double t : theta)
        if (!(t > 0.0) || !(t < ctx.K))
            throw std::invalid_argument(
                std::string(where) + ": each half-angle must lie in (0, K)");
    double sum = theta[0] + theta[1] + theta[2];
    if (std::abs(sum - 2.0 * ctx.K) > 1e-9 * ctx.K)
        throw std::invalid_argument(std::string(where) +
                                    ": half-angles must sum to 2K");
}

double reduced(double theta, const EllipticContext& ctx) {
    return theta * kPi / (2.0 * ctx.K);
}

struct MoveWeights {
    std::array<double, 3> rho;    // conductances of the star edges
    std::array<double, 3> rho_c;  // conductances of the triangle edges
    std::array<double, 3> mt;     // masses after the move
    double m0;                    // mass of the center
};

MoveWeights move_weights(const StarTriangleCase& c,
                         const EllipticContext& ctx) {
    MoveWeights w;
    for (int i = 0; i < 3; ++i) {
        w.rho[i] = conductance(reduced(c.theta[i], ctx), ctx);
        w.rho_c[i] = conductance(reduced(ctx.K - c.theta[i], ctx), ctx);
        w.mt[i] = triangle_mass(c, i, ctx);
    }
    w.m0 = star_center_mass(c.theta, ctx);
    return w;
}

// Weighted spanning trees of a small multigraph, with node 0 taken as the
// root of the matrix-tree minor. Self-loops are skipped: contraction can
// produce them and they never sit in a tree.
double tree_partition(int nodes, const std::vector<std::array<int, 2>>& ends,
                      const std::vector<double>& weight) {
    if (nodes <= 1) return 1.0;
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(nodes - 1, nodes - 1);
    for (std::size_t e = 0; e < ends.size(); ++e) {
        auto [a, b] = ends[e];
        if (a == b) continue;
        if (a > 0) l(a - 1, a - 1) += weight[e];
        if (b > 0) l(b - 1, b - 1) += weight[e];
        if (a > 0 && b > 0) {
            l(a - 1, b - 1) -= weight[e];
            l(b - 1, a - 1) -= weight[e];
        }
    }
    return l.determinant();
}

}  // namespace

double star_center_mass(const std::array<double, 3>& theta,
                        const EllipticContext& ctx) {
    validate_angles(theta, ctx, "star_center_mass");
    double m = 0.0;
    for (double t : theta) m += mass_term(reduced(t, ctx), ctx);
    return m;
}

double triangle_mass(const StarTriangleCase& c, int i,
                     const EllipticContext& ctx) {
    validate_angles(c.theta, ctx, "triangle_mass");
    if (i < 0 || i > 2)
        throw std::invalid_argument("triangle_mass: index out of range");
    int j = (i + 1) % 3, k = (i + 2) % 3;
    return c.mass2[i] - mass_term(reduced(c.theta[i], ctx), ctx) +
           mass_term(reduced(ctx.K - c.theta[j], ctx), ctx) +
           mass_term(reduced(ctx.K - c.theta[k], ctx), ctx);
}

double zinv_constant(const std::array<double, 3>& theta,
                     const EllipticContext& ctx) {
    validate_angles(theta, ctx, "zinv_constant");
    double c = ctx.kprime;
    for (double t : theta) c *= conductance(reduced(t, ctx), ctx);
    return c;
}

double yb_partition(const StarTriangleCase& c, MoveSide side,
                    const EllipticContext& ctx) {
    validate_angles(c.theta, ctx, "yb_partition");
    if (c.rooted > 7)
        throw std::invalid_argument("yb_partition: boundary mask out of range");
    MoveWeights w = move_weights(c, ctx);
    const auto& rho = w.rho;
    const auto& rc = w.rho_c;
    const auto& m = c.mass2;
    const auto& mt = w.mt;
    double rho_all = rho[0] + rho[1] + rho[2];
    bool star = side == MoveSide::kStar;

    switch (c.rooted) {
        case 7:
            // All three outer vertices already reach the root: the star
            // only needs to hook up the center, the triangle is done.
            return star ? rho_all + w.m0 : 1.0;
        case 3:
        case 5:
        case 6: {
            int k = c.rooted == 3 ? 2 : (c.rooted == 5 ? 1 : 0);
            int i = (k + 1) % 3, j = (k + 2) % 3;
            if (star)
                return rho[k] * (rho[i] + rho[j]) + w.m0 * rho[k] +
                       m[k] * (rho_all + w.m0);
            return rc[i] + rc[j] + mt[k];
        }
        case 1:
        case 2:
        case 4: {
            int i = c.rooted == 1 ? 0 : (c.rooted == 2 ? 1 : 2);
            int j = (i + 1) % 3, k = (i + 2) % 3;
            if (star)
                return rho[0] * rho[1] * rho[2] + w.m0 * rho[j] * rho[k] +
                       m[j] * rho[k] * (rho[i] + rho[j]) +
                       m[k] * rho[j] * (rho[i] + rho[k]) +
                       w.m0 * (m[k] * rho[j] + m[j] * rho[k]) +
                       m[j] * m[k] * (rho_all + w.m0);
            return rc[1] * rc[2] + rc[0] * rc[2] + rc[0] * rc[1] +
                   mt[j] * (rc[i] + rc[j]) + mt[k] * (rc[i] + rc[k]) +
                   mt[j] * mt[k];
        }
        case 0: {
            if (star) {
                double z = (w.m0 + m[0] + m[1] + m[2]) * rho[0] * rho[1] *
                           rho[2];
                for (int i = 0; i < 3; ++i) {
                    int j = (i + 1) % 3, k = (i + 2) % 3;
                    z += w.m0 * m[i] * rho[j] * rho[k];
                    z += m[j] * m[k] * rho[i] * (rho[j] + rho[k]);
                    z += w.m0 * m[j] * m[k] * rho[i];
                }
                return z + m[0] * m[1] * m[2] * (rho_all + w.m0);
            }
            double z = (mt[0] + mt[1] + mt[2]) *
                       (rc[1] * rc[2] + rc[0] * rc[2] + rc[0] * rc[1]);
            for (int i = 0; i < 3; ++i) {
                int j = (i + 1) % 3, k = (i + 2) % 3;
                z += mt[j] * mt[k] * (rc[j] + rc[k]);
            }
            return z + mt[0] * mt[1] * mt[2];
        }
        default:
            return 0.0;  // unreachable
    }
}

double yb_partition_enumerated(const StarTriangleCase& c, MoveSide side,
                               const EllipticContext& ctx) {
    validate_angles(c.theta, ctx, "yb_partition_enumerated");
    if (c.rooted > 7)
        throw std::invalid_argument(
            "yb_partition_enumerated: boundary mask out of range");
    MoveWeights w = move_weights(c, ctx);

    // Outer vertices already connected to the root collapse into node 0.
    std::array<int, 3> node{};
    int next = 1;
    std::vector<std::array<int, 2>> ends;
    std::vector<double> weight;
    if (side == MoveSide::kStar) {
        int center = next++;
        for (int i = 0; i < 3; ++i)
            node[i] = (c.rooted >> i) & 1 ? 0 : next++;
        for (int i = 0; i < 3; ++i) {
            ends.push_back({center, node[i]});
            weight.push_back(w.rho[i]);
        }
        ends.push_back({center, 0});
        weight.push_back(w.m0);
        for (int i = 0; i < 3; ++i)
            if (node[i] != 0) {
                ends.push_back({node[i], 0});
                weight.push_back(c.mass2[i]);
            }
    } else {
        for (int i = 0; i < 3; ++i)
            node[i] = (c.rooted >> i) & 1 ? 0 : next++;
        for (int i = 0; i < 3; ++i) {
            int j = (i + 1) % 3, k = (i + 2) % 3;
            ends.push_back({node[j], node[k]});
            weight.push_back(w.rho_c[i]);
        }
        for (int i = 0; i < 3; ++i)
            if (node[i] != 0) {
                ends.push_back({node[i], 0});
                weight.push_back(w.mt[i]);
            }
    }
    return tree_partition(next, ends, weight);
}

WeightResiduals weight_identity_residuals(const std::array<double, 3>& theta,
                                          const EllipticContext& ctx) {
    validate_angles(theta, ctx, "weight_identity_residuals");
    StarTriangleCase c{theta, {0.0, 0.0, 0.0}, 0};
    MoveWeights w = move_weights(c, ctx);
    WeightResiduals r;
    r.center = std::abs(ctx.kprime * w.rho[0] * w.rho[1] * w.rho[2] - w.m0 -
                        w.rho[0] - w.rho[1] - w.rho[2]);
    for (int i = 0; i < 3; ++i) {
        int j = (i + 1) % 3, k = (i + 2) % 3;
        double rhs = w.rho[i] - w.rho_c[j] - w.rho_c[k] -
                     ctx.kprime * w.rho_c[j] * w.rho_c[k] * w.rho[i];
        r.outer = std::max(r.outer, std::abs(w.mt[i] - c.mass2[i] - rhs));
    }
    return r;
}

double harmonic_extension(const StarTriangleCase& c,
                          const std::array<double, 3>& f,
                          const EllipticContext& ctx) {
    validate_angles(c.theta, ctx, "harmonic_extension");
    MoveWeights w = move_weights(c, ctx);
    double num = 0.0, den = w.m0;
    for (int i = 0; i < 3; ++i) {
        num += w.rho[i] * f[i];
        den += w.rho[i];
    }
    return num / den;
}

double green_invariance_check(const Patch& star, const Patch& triangle,
                              int center, const EllipticContext& ctx,
                              const std::vector<std::array<int, 2>>& pairs) {
    if (center < 0 || center >= static_cast<int>(star.cls.size()) ||
        star.cls.size() != triangle.cls.size())
        throw std::invalid_argument(
            "green_invariance_check: patches of different shape");
    if (!star.active(center) || star.adj[center].size() != 3 ||
        triangle.active(center))
        throw std::invalid_argument(
            "green_invariance_check: patches do not differ by one move at "
            "the given center");
    for (std::size_t v = 0; v < star.cls.size(); ++v)
        if (static_cast<int>(v) != center &&
            star.active(static_cast<int>(v)) !=
                triangle.active(static_cast<int>(v)))
            throw std::invalid_argument(
                "green_invariance_check: active vertex sets differ away "
                "from the center");

    PatchOperator op_s = patch_laplacian(star, ctx);
    PatchOperator op_t = patch_laplacian(triangle, ctx);
    Eigen::MatrixXd g_s =
        Eigen::MatrixXd(op_s.mat).partialPivLu().inverse();
    Eigen::MatrixXd g_t =
        Eigen::MatrixXd(op_t.mat).partialPivLu().inverse();

    double worst = 0.0;
    for (const auto& [x, y] : pairs) {
        if (x == center || y == center)
            throw std::invalid_argument(
                "green_invariance_check: pairs must avoid the center");
        int rs_x = op_s.row_of_vertex[x], rs_y = op_s.row_of_vertex[y];
        int rt_x = op_t.row_of_vertex[x], rt_y = op_t.row_of_vertex[y];
        if (rs_x < 0 || rs_y < 0 || rt_x < 0 || rt_y < 0)
            throw std::invalid_argument(
                "green_invariance_check: pair vertex missing from a patch");
        worst = std::max(worst,
                         std::abs(g_s(rs_x, rs_y) - g_t(rt_x, rt_y)));
    }
    return worst;
}

}  // namespace isolap
