#include "isolap/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

#include "isolap/expfun.hpp"

namespace isolap {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

SaddleData saddle_point(const ExpPathData& path, const EllipticContext& ctx) {
    if (!(ctx.k > 0.0))
        throw std::domain_error("saddle_point: k must be positive");
    if (path.length < 1)
        throw std::domain_error("saddle_point: endpoints coincide");
    if (!(path.sector_half < ctx.K))
        throw std::domain_error(
            "saddle_point: step directions span a half-period; the path is "
            "not quasicrystalline");

    const double mid = path.sector_mid;
    double u0;
    if (path.steps.size() == 1) {
        // chi' is odd about the single step angle.
        u0 = path.steps[0].first;
    } else {
        double lo = mid - path.sector_half, hi = mid + path.sector_half;
        double flo = chi_prime(path, lo, ctx), fhi = chi_prime(path, hi, ctx);
        if (!(flo < 0.0) || !(fhi > 0.0))
            throw std::runtime_error(
                "saddle_point: chi' does not change sign over the direction "
                "sector; angle margins too small");
        for (int it = 0; it < 60 && hi - lo > 1e-6; ++it) {
            double c = 0.5 * (lo + hi);
            if (chi_prime(path, c, ctx) < 0.0)
                lo = c;
            else
                hi = c;
        }
        u0 = 0.5 * (lo + hi);
        for (int it = 0; it < 40; ++it) {
            double f = chi_prime(path, u0, ctx);
            double fp = chi_second(path, u0, ctx);
            if (!(fp > 0.0)) break;
            double step = f / fp;
            double next = u0 - step;
            if (next <= mid - path.sector_half || next >= mid + path.sector_half)
                break;
            u0 = next;
            if (std::abs(step) < 1e-13) break;
        }
    }
    SaddleData out;
    out.u0 = u0;
    out.chi0 = chi(path, cplx(u0, 0.0), ctx).real();
    out.chi2 = chi_second(path, u0, ctx);
    out.sector_mid = mid;
    return out;
}

SaddleData saddle_point(const PeriodicGraph& g, int i, int mi, int ni, int j,
                        int mj, int nj, const EllipticContext& ctx) {
    return saddle_point(exp_path(g, i, mi, ni, j, mj, nj, ctx), ctx);
}

double green_asymptotic(const ExpPathData& path, const EllipticContext& ctx) {
    SaddleData s = saddle_point(path, ctx);
    if (!(s.chi2 > 1e-12))
        throw std::domain_error(
            "green_asymptotic: vanishing curvature at the critical point");
    double L = path.length;
    return ctx.kprime / (2.0 * std::sqrt(2.0 * kPi * L * s.chi2)) *
           std::exp(L * s.chi0);
}

double green_asymptotic(const PeriodicGraph& g, int i, int mi, int ni, int j,
                        int mj, int nj, const EllipticContext& ctx) {
    return green_asymptotic(exp_path(g, i, mi, ni, j, mj, nj, ctx), ctx);
}

double rate_from_amoeba(const PeriodicGraph& g, int m, int n,
                        const EllipticContext& ctx) {
    if (!(ctx.k > 0.0))
        throw std::domain_error("rate_from_amoeba: k must be positive");
    if (m == 0 && n == 0)
        throw std::domain_error("rate_from_amoeba: zero direction");
    const double norm = std::hypot(double(m), double(n));
    auto f = [&](double u) {
        cplx shifted(u, 2.0 * ctx.Kp);
        double sz = std::log(std::abs(spectral_z(g, shifted, ctx)));
        double sw = std::log(std::abs(spectral_w(g, shifted, ctx)));
        return -(m * sz + n * sw) / norm;
    };

    // Coarse scan of the closed boundary curve, then golden-section refine.
    const int grid = 2048;
    const double period = 4.0 * ctx.K;
    int best = 0;
    double fbest = f(0.0);
    for (int a = 1; a < grid; ++a) {
        double v = f(period * a / grid);
        if (v < fbest) {
            fbest = v;
            best = a;
        }
    }
    double lo = period * (best - 1) / grid, hi = period * (best + 1) / grid;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > 1e-10) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        }
    }
    return std::min(f1, f2);
}

}  // namespace isolap
