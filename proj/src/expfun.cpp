#include "isolap/expfun.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace isolap {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Smallest closed arc on the circle of circumference 4K containing all step
// angles: complement of the largest cyclic gap.
void fill_sector(ExpPathData& d, double fourK) {
    if (d.steps.empty()) return;
    std::vector<double> a;
    for (auto& [ang, cnt] : d.steps) a.push_back(ang);
    std::sort(a.begin(), a.end());
    double best_gap = fourK + a.front() - a.back();
    double lo = a.back(), hi = a.front() + fourK;
    for (size_t i = 1; i < a.size(); ++i)
        if (a[i] - a[i - 1] > best_gap) {
            best_gap = a[i] - a[i - 1];
            lo = a[i - 1];
            hi = a[i];
        }
    // Arc runs from hi back around to lo.
    double width = fourK - best_gap;
    double mid = hi + width / 2.0;
    if (mid >= fourK) mid -= fourK;
    d.sector_mid = mid;
    d.sector_half = width / 2.0;
}

cplx step_factor_log(cplx u, double alpha, const EllipticContext& ctx) {
    cplx v = (u - alpha) / 2.0;
    cplx s;
    try {
        s = jacobi(Jac::sc, v, ctx);
    } catch (const pole_proximity_error&) {
        // Report in the u coordinate, where the pole sits at alpha + 2K.
        throw pole_proximity_error("mass_exp",
                                   cplx(alpha + 2.0 * ctx.K, 0.0));
    }
    return std::log(cplx(0.0, std::sqrt(ctx.kprime)) * s);
}

}  // namespace

ExpPathData exp_path(const PeriodicGraph& g, int i, int mi, int ni, int j,
                     int mj, int nj, const EllipticContext& ctx) {
    auto mp = g.minimal_path(i, mi, ni, j, mj, nj);
    ExpPathData d;
    d.length = mp.length;
    double scale = 2.0 * ctx.K / kPi;
    for (auto [ang_bar, cnt] : mp.steps) {
        double a = ang_bar;
        while (a < 0) a += 2 * kPi;
        while (a >= 2 * kPi) a -= 2 * kPi;
        d.steps.push_back({a * scale, cnt});
    }
    std::sort(d.steps.begin(), d.steps.end());
    fill_sector(d, 4.0 * ctx.K);
    return d;
}

cplx mass_exp(const ExpPathData& path, cplx u, const EllipticContext& ctx) {
    cplx acc = 0.0;
    for (auto [alpha, cnt] : path.steps)
        acc += (double)cnt * step_factor_log(u, alpha, ctx);
    return std::exp(acc);
}

cplx chi(const ExpPathData& path, cplx u, const EllipticContext& ctx) {
    if (path.length < 1)
        throw std::domain_error("chi needs a path of length >= 1");
    if (std::isfinite(ctx.Kp) && std::abs(u.imag()) >= 2.0 * ctx.Kp)
        throw std::domain_error("chi: |Im u| must stay below 2K'");
    cplx acc = 0.0;
    double root_kp = std::sqrt(ctx.kprime);
    for (auto [alpha, cnt] : path.steps)
        acc += ((double)cnt / path.length) *
               std::log(root_kp * jacobi(Jac::nd, (u - alpha) / 2.0, ctx));
    return acc;
}

double chi_prime(const ExpPathData& path, double u,
                 const EllipticContext& ctx) {
    double acc = 0.0;
    for (auto [alpha, cnt] : path.steps) {
        auto t = jacobi_triple((u - alpha) / 2.0, ctx);
        acc += ((double)cnt / path.length) * t.sn * t.cn / t.dn;
    }
    return 0.5 * ctx.k2 * acc;
}

double chi_second(const ExpPathData& path, double u,
                  const EllipticContext& ctx) {
    double acc = 0.0;
    for (auto [alpha, cnt] : path.steps) {
        auto t = jacobi_triple((u - alpha) / 2.0, ctx);
        double sc2 = t.sn * t.cn / t.dn;
        acc += ((double)cnt / path.length) *
               (t.cn * t.cn - t.sn * t.sn + ctx.k2 * sc2 * sc2);
    }
    return 0.25 * ctx.k2 * acc;
}

cplx spectral_z(const PeriodicGraph& g, cplx u, const EllipticContext& ctx) {
    return mass_exp(exp_path(g, 0, 0, 0, 0, 1, 0, ctx), u, ctx);
}

cplx spectral_w(const PeriodicGraph& g, cplx u, const EllipticContext& ctx) {
    return mass_exp(exp_path(g, 0, 0, 0, 0, 0, 1, ctx), u, ctx);
}

}  // namespace isolap
