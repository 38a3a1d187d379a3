#include "isolap/green.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "isolap/laplacian.hpp"

namespace isolap {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_massive(const EllipticContext& ctx, const char* who) {
    if (!(ctx.k > 0.0))
        throw std::domain_error(std::string(who) +
                                ": k must be positive, the massless Green "
                                "function diverges");
}

// Distance between two abscissas on the circle of circumference 4K.
double circ_dist(double a, double b, double circ) {
    double d = std::remainder(a - b, circ);
    return std::abs(d);
}

}  // namespace

GreenValue green_local_path(const ExpPathData& path, cplx displacement,
                            const EllipticContext& ctx) {
    require_massive(ctx, "green_local");
    const double K = ctx.K, Kp = ctx.Kp;
    if (path.length == 0) {
        // Integrand is identically 1; the period integral is exact.
        return {ctx.kprime * Kp / kPi, 0.0, 0};
    }

    // Abscissa of the contour: the embedded ray direction from x to y, which
    // a positive combination of the step directions keeps inside the zero
    // sector. Fall back to the sector midpoint when the ray drifts within
    // 0.05 K of a pole abscissa (possible when the sector is nearly flat).
    double ray = std::arg(displacement);
    if (ray < 0) ray += 2 * kPi;
    double phi = ray * 2.0 * K / kPi;
    double clearance = 4 * K;
    for (const auto& [alpha, cnt] : path.steps) {
        (void)cnt;
        clearance = std::min(clearance, circ_dist(phi, alpha + 2 * K, 4 * K));
    }
    if (clearance < 0.05 * K) phi = path.sector_mid;

    // (k'/4i pi) int_C e(u) du over the upward segment C = phi + i [0, 4K']
    // equals (k'/4 pi) int_0^{4K'} e(phi + i t) dt. The integrand has period
    // 4K' in t and no singularity near the line, so the uniform trapezoid
    // rule converges spectrally; double the node count until stable.
    auto sample_sum = [&](int n, int stride, int offset) {
        // sum of e(phi + i t_a) over a = offset, offset+stride, ... < n
        cplx s = 0.0;
        for (int a = offset; a < n; a += stride)
            s += mass_exp(path, cplx(phi, a * 4 * Kp / n), ctx);
        return s;
    };

    int n = 64;
    cplx acc = sample_sum(n, 1, 0);
    cplx integral = acc * (4 * Kp / n);
    const int cap = 8192;
    while (true) {
        int n2 = 2 * n;
        cplx acc2 = acc + sample_sum(n2, 2, 1);
        cplx next = acc2 * (4 * Kp / n2);
        double change = std::abs(next - integral);
        n = n2;
        acc = acc2;
        std::swap(integral, next);
        if (change <= 1e-10 * std::max(1.0, std::abs(integral))) break;
        if (n >= cap)
            throw std::runtime_error(
                "green_local: contour quadrature did not converge");
    }
    cplx g = ctx.kprime / (4 * kPi) * integral;
    return {g.real(), std::abs(g.imag()), n};
}

GreenValue green_local_full(const PeriodicGraph& g, int i, int mi, int ni,
                            int j, int mj, int nj, const EllipticContext& ctx) {
    ExpPathData path = exp_path(g, i, mi, ni, j, mj, nj, ctx);
    cplx disp = (g.vertex_pos[j] + double(mj) * g.period_x +
                 double(nj) * g.period_y) -
                (g.vertex_pos[i] + double(mi) * g.period_x +
                 double(ni) * g.period_y);
    return green_local_path(path, disp, ctx);
}

double green_local(const PeriodicGraph& g, int i, int mi, int ni, int j,
                   int mj, int nj, const EllipticContext& ctx) {
    return green_local_full(g, i, mi, ni, j, mj, nj, ctx).value;
}

double green_residue(const PeriodicGraph& g, int i, int mi, int ni, int j,
                     int mj, int nj, const EllipticContext& ctx) {
    require_massive(ctx, "green_residue");
    ExpPathData path = exp_path(g, i, mi, ni, j, mj, nj, ctx);
    if (path.length == 0) return ctx.kprime * ctx.Kp / kPi;
    for (const auto& [alpha, cnt] : path.steps) {
        (void)alpha;
        if (cnt != 1)
            throw std::domain_error(
                "green_residue: repeated step direction gives a higher-order "
                "pole; use green_local");
    }

    // Collapse the contour integral onto the poles inside the fundamental
    // rectangle: one simple pole at alpha_l + 2K per step (residue -2/k' for
    // the half-argument sc factor) plus the pole of H at 2iK' with residue
    // 2K'/pi, which picks out e(2iK'). Because H gains 1 per period 4K, each
    // pole must be taken at its representative inside the rectangle actually
    // bounded by the contour, i.e. with the step angle nearest the sector
    // midpoint; the sc factors have period 2K and do not care.
    const double K = ctx.K;
    const cplx isk(0.0, std::sqrt(ctx.kprime));
    cplx sum = 0.0;
    for (size_t l = 0; l < path.steps.size(); ++l) {
        double al = path.sector_mid +
                    std::remainder(path.steps[l].first - path.sector_mid,
                                   4 * K);
        cplx res = isk * (-2.0 / ctx.kprime);
        for (size_t m = 0; m < path.steps.size(); ++m) {
            if (m == l) continue;
            double am = path.steps[m].first;
            res *= isk * jacobi(Jac::sc, cplx((al + 2 * K - am) / 2.0, 0.0),
                                ctx);
        }
        sum += func_H_real(al + 2 * K, ctx) * res;
    }
    sum += (2.0 * ctx.Kp / kPi) * mass_exp(path, cplx(0.0, 2 * ctx.Kp), ctx);
    return 0.5 * ctx.kprime * sum.real();
}

NeighborGreen green_neighbor(double theta_bar, double alpha_bar,
                             const EllipticContext& ctx) {
    require_massive(ctx, "green_neighbor");
    if (!(theta_bar > 0.0) || !(theta_bar < kPi / 2))
        throw std::domain_error(
            "green_neighbor: half-angle must lie in (0, pi/2)");
    const double K = ctx.K, Kp = ctx.Kp, kp = ctx.kprime;
    const double theta = theta_bar * 2.0 * K / kPi;
    const double alpha = alpha_bar * 2.0 * K / kPi;
    const double beta = alpha + 2 * theta;

    const double sct = [&] {
        JacobiTriple t = jacobi_triple(theta, ctx);
        return t.sn / t.cn;
    }();
    const double dna2 = jacobi_triple(alpha / 2, ctx).dn;
    const double dnb2 = jacobi_triple(beta / 2, ctx).dn;

    NeighborGreen out;
    // e_{(x,y)}(2iK') = k' / (dn(alpha/2) dn(beta/2)) for a single edge.
    out.a = (func_H_real(alpha + 2 * K, ctx) -
             func_H_real(beta + 2 * K, ctx)) /
                sct +
            (kp * Kp / kPi) * kp / (dna2 * dnb2);
    out.b = (func_H_real(alpha, ctx) - func_H_real(beta, ctx)) / sct +
            (Kp / kPi) * dna2 * dnb2;
    out.c = -func_H_real(2 * theta, ctx) / sct +
            (Kp / kPi) * jacobi_triple(theta, ctx).dn;
    return out;
}

double green_truncated_solve(const PeriodicGraph& g, int i, int mi, int ni,
                             int j, int mj, int nj, const EllipticContext& ctx,
                             double tol) {
    require_massive(ctx, "green_truncated_solve");
    const int dm = mj - mi, dn = nj - ni;
    const int reach = std::max(std::abs(dm), std::abs(dn));

    double prev = 0.0;
    bool have_prev = false;
    for (int radius = reach + 6; radius <= 60; radius += 6) {
        Patch patch = make_patch(g, radius);
        PatchOperator op = patch_laplacian(patch, ctx);
        int vx = patch.find(i, 0, 0);
        int vy = patch.find(j, dm, dn);
        if (vx < 0 || vy < 0)
            throw std::logic_error("green_truncated_solve: patch misses an "
                                   "endpoint");
        int rx = op.row_of_vertex[vx], ry = op.row_of_vertex[vy];

        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(op.mat);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error(
                "green_truncated_solve: factorization failed");
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(op.mat.rows());
        rhs[rx] = 1.0;
        double val = solver.solve(rhs)[ry];

        if (have_prev && std::abs(val - prev) < tol) return val;
        prev = val;
        have_prev = true;
    }
    throw std::runtime_error(
        "green_truncated_solve: value did not stabilize before the radius "
        "cap; increase the tolerance");
}

GreenValue green_fourier_full(const PeriodicGraph& g, int x, int y, int m,
                              int n, const EllipticContext& ctx, double tol) {
    require_massive(ctx, "green_fourier");
    const int nv = g.num_vertices();
    if (x < 0 || x >= nv || y < 0 || y >= nv)
        throw std::domain_error("green_fourier: vertex index out of range");

    // G(x, y + (m,n)) = (1/4 pi^2) int int e^{-i(m phi + n psi)}
    //                   [Delta(e^{i phi}, e^{i psi})^{-1}]_{y,x} dphi dpsi,
    // by the uniform product rule, doubled until the value stabilizes.
    auto grid_value = [&](int N) {
        cplx sum = 0.0;
        Eigen::VectorXcd e_x = Eigen::VectorXcd::Zero(nv);
        e_x[x] = 1.0;
        for (int a = 0; a < N; ++a) {
            double phi = 2 * kPi * a / N;
            for (int b = 0; b < N; ++b) {
                double psi = 2 * kPi * b / N;
                Eigen::MatrixXcd M = fourier_laplacian(
                    g, std::polar(1.0, phi), std::polar(1.0, psi), ctx);
                Eigen::VectorXcd col = M.partialPivLu().solve(e_x);
                sum += std::polar(1.0, -(m * phi + n * psi)) * col[y];
            }
        }
        return sum / double(N) / double(N);
    };

    int N = 16;
    cplx val = grid_value(N);
    while (true) {
        int N2 = 2 * N;
        cplx next = grid_value(N2);
        double change = std::abs(next - val);
        N = N2;
        val = next;
        if (change <= tol * std::max(1.0, std::abs(val))) break;
        if (N >= 512)
            throw std::runtime_error(
                "green_fourier: Fourier grid did not converge; the modulus "
                "may be too close to zero");
    }
    return {val.real(), std::abs(val.imag()), N};
}

double green_fourier(const PeriodicGraph& g, int x, int y, int m, int n,
                     const EllipticContext& ctx, double tol) {
    return green_fourier_full(g, x, y, m, n, ctx, tol).value;
}

}  // namespace isolap
