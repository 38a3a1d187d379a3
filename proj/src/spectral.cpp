#include "isolap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "isolap/laplacian.hpp"

namespace isolap {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Convex hull of lattice points, counterclockwise (monotone chain).
std::vector<std::pair<long long, long long>> hull_of(
    std::vector<std::pair<long long, long long>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    auto cross = [](const std::pair<long long, long long>& o,
                    const std::pair<long long, long long>& a,
                    const std::pair<long long, long long>& b) {
        return (a.first - o.first) * (b.second - o.second) -
               (a.second - o.second) * (b.first - o.first);
    };
    std::vector<std::pair<long long, long long>> h(2 * pts.size());
    size_t n = 0;
    for (const auto& p : pts) {
        while (n >= 2 && cross(h[n - 2], h[n - 1], p) <= 0) --n;
        h[n++] = p;
    }
    size_t lower = n + 1;
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        while (n >= lower && cross(h[n - 2], h[n - 1], *it) <= 0) --n;
        h[n++] = *it;
    }
    h.resize(n - 1);
    return h;
}

// Exponent of the z-product for one oriented track curve, and of the
// w-product (with opposite sign convention on the horizontal homology).
double track_alpha(const TrainTrack& t, const EllipticContext& ctx) {
    return t.angle_bar * 2.0 * ctx.K / kPi;
}

}  // namespace

cplx CharPoly::eval(cplx z, cplx w) const {
    cplx sum = 0.0;
    for (int i = -py; i <= py; ++i)
        for (int j = -px; j <= px; ++j) {
            double coef = at(i, j);
            if (coef == 0.0) continue;
            sum += coef * std::pow(z, i) * std::pow(w, j);
        }
    return sum;
}

cplx CharPoly::eval_dw(cplx z, cplx w) const {
    cplx sum = 0.0;
    for (int i = -py; i <= py; ++i)
        for (int j = -px; j <= px; ++j) {
            double coef = at(i, j);
            if (coef == 0.0 || j == 0) continue;
            sum += coef * double(j) * std::pow(z, i) * std::pow(w, j - 1);
        }
    return sum;
}

double CharPoly::max_abs() const {
    double m = 0.0;
    for (double v : c) m = std::max(m, std::abs(v));
    return m;
}

CharPoly char_poly(const PeriodicGraph& g, const EllipticContext& ctx) {
    // Sample det on a roots-of-unity grid one larger than the claimed
    // support in each direction so an undershoot shows up as nonzero
    // margin coefficients instead of aliasing silently.
    for (int attempt = 0; attempt < 2; ++attempt) {
        int py = g.py + (attempt + 1), px = g.px + (attempt + 1);
        int nz = 2 * py + 1, nw = 2 * px + 1;
        std::vector<cplx> det(nz * nw);
        for (int a = 0; a < nz; ++a)
            for (int b = 0; b < nw; ++b) {
                cplx z = std::polar(1.0, 2 * kPi * a / nz);
                cplx w = std::polar(1.0, 2 * kPi * b / nw);
                det[a * nw + b] =
                    fourier_laplacian(g, z, w, ctx).determinant();
            }
        CharPoly p;
        p.py = py;
        p.px = px;
        p.c.assign(nz * nw, 0.0);
        double max_imag = 0.0;
        for (int i = -py; i <= py; ++i)
            for (int j = -px; j <= px; ++j) {
                cplx sum = 0.0;
                for (int a = 0; a < nz; ++a)
                    for (int b = 0; b < nw; ++b)
                        sum += det[a * nw + b] *
                               std::polar(1.0, -2 * kPi *
                                                   (double(i) * a / nz +
                                                    double(j) * b / nw));
                sum /= double(nz) * double(nw);
                max_imag = std::max(max_imag, std::abs(sum.imag()));
                p.at(i, j) = sum.real();
            }
        double scale = p.max_abs();
        if (max_imag > 1e-9 * scale)
            throw std::runtime_error(
                "char_poly: determinant coefficients not real");
        // Margin rows/columns beyond the claimed support must vanish.
        double margin = 0.0;
        for (int i = -py; i <= py; ++i)
            for (int j = -px; j <= px; ++j)
                if (std::abs(i) > g.py || std::abs(j) > g.px)
                    margin = std::max(margin, std::abs(p.at(i, j)));
        if (margin > 1e-9 * scale) continue;  // enlarge once and re-check

        CharPoly out;
        out.py = g.py;
        out.px = g.px;
        out.c.assign((2 * g.py + 1) * (2 * g.px + 1), 0.0);
        for (int i = -g.py; i <= g.py; ++i)
            for (int j = -g.px; j <= g.px; ++j) {
                double v = p.at(i, j);
                out.at(i, j) = std::abs(v) < 1e-10 * scale ? 0.0 : v;
            }
        return out;
    }
    throw std::runtime_error(
        "char_poly: support exceeds the track-derived degree bounds");
}

std::vector<std::pair<long long, long long>> support_hull(const CharPoly& p) {
    double scale = p.max_abs();
    std::vector<std::pair<long long, long long>> pts;
    for (int i = -p.py; i <= p.py; ++i)
        for (int j = -p.px; j <= p.px; ++j)
            if (std::abs(p.at(i, j)) > 1e-10 * scale) pts.push_back({i, j});
    return hull_of(std::move(pts));
}

std::pair<cplx, cplx> curve_param(const PeriodicGraph& g, cplx u,
                                  const EllipticContext& ctx) {
    const cplx isk(0.0, std::sqrt(ctx.kprime));
    cplx logz = 0.0, logw = 0.0;
    for (const auto& t : g.track_curves) {
        if (t.v == 0 && t.h == 0) continue;
        cplx v = (u - track_alpha(t, ctx)) / 2.0;
        cplx f = std::log(isk * jacobi(Jac::sc, v, ctx));
        // Stored curves run against the orientation that makes z the
        // quasiperiod of the (1,0) translate, hence the sign flip.
        logz -= double(t.v) * f;
        logw += double(t.h) * f;
    }
    return {std::exp(logz), std::exp(logw)};
}

AmoebaSample amoeba_sample(const PeriodicGraph& g, const EllipticContext& ctx,
                           int grid) {
    if (!(ctx.k > 0.0))
        throw std::domain_error("amoeba_sample: k must be positive");
    if (grid < 8) throw std::domain_error("amoeba_sample: grid too small");
    AmoebaSample out;
    const double perx = 4.0 * ctx.K, pery = 4.0 * ctx.Kp;
    auto log_point = [&](cplx u, std::vector<std::pair<double, double>>& dst) {
        try {
            auto [z, w] = curve_param(g, u, ctx);
            double x = std::log(std::abs(z)), y = std::log(std::abs(w));
            if (std::isfinite(x) && std::isfinite(y)) dst.push_back({x, y});
        } catch (const pole_proximity_error&) {
            // sample point on a zero or pole of the parametrization
        }
    };
    for (int a = 0; a < grid; ++a)
        for (int b = 0; b < grid; ++b)
            log_point(cplx(perx * (a + 0.5) / grid, pery * (b + 0.5) / grid),
                      out.scatter);
    for (int a = 0; a < grid * grid; ++a) {
        double s = perx * (a + 0.5) / (grid * grid);
        log_point(cplx(s, 0.0), out.outer);
        log_point(cplx(s, 2.0 * ctx.Kp), out.hole);
    }
    double area2 = 0.0;
    for (size_t i = 0; i < out.hole.size(); ++i) {
        const auto& p = out.hole[i];
        const auto& q = out.hole[(i + 1) % out.hole.size()];
        area2 += p.first * q.second - q.first * p.second;
    }
    out.hole_area = 0.5 * std::abs(area2);
    return out;
}

double hole_area(const PeriodicGraph& g, const EllipticContext& ctx) {
    if (!(ctx.k > 0.0))
        throw std::domain_error("hole_area: k must be positive");
    // The boundary curve u -> Log psi(u + 2iK') is smooth and closed; a
    // dense midpoint sampling makes the shoelace error quadratic in the
    // step, far below the 1e-6 agreement target.
    const int n = 8192;
    const double per = 4.0 * ctx.K;
    std::vector<std::pair<double, double>> pts;
    pts.reserve(n);
    for (int a = 0; a < n; ++a) {
        auto [z, w] =
            curve_param(g, cplx(per * (a + 0.5) / n, 2.0 * ctx.Kp), ctx);
        pts.push_back({std::log(std::abs(z)), std::log(std::abs(w))});
    }
    double area2 = 0.0;
    for (int a = 0; a < n; ++a) {
        const auto& p = pts[a];
        const auto& q = pts[(a + 1) % n];
        area2 += p.first * q.second - q.first * p.second;
    }
    return 0.5 * std::abs(area2);
}

double hole_area_quadrature(const PeriodicGraph& g,
                            const EllipticContext& ctx) {
    if (!(ctx.k > 0.0))
        throw std::domain_error("hole_area_quadrature: k must be positive");
    // oint x dy with x = log|z(u+2iK')| = sum_T v_T log( sqrt(k') |nd| ) and
    // y' = -sum_T h_T Re[ (log sc)'((u - alpha_T)/2 + iK') ] / 2; the factor
    // 1/2 is the chain rule of the half-argument.
    const double per = 4.0 * ctx.K;
    const int n = 8192;
    double acc = 0.0;
    for (int a = 0; a < n; ++a) {
        double u = per * (a + 0.5) / n;
        double x = 0.0, yp = 0.0;
        for (const auto& t : g.track_curves) {
            double va = (u - track_alpha(t, ctx)) / 2.0;
            JacobiTriple jt = jacobi_triple(va, ctx);
            x += t.v * std::log(std::sqrt(ctx.kprime) / std::abs(jt.dn));
            // (log sc)' = dn/(sn cn); shift the argument by iK'.
            cplx v(va, ctx.Kp);
            cplx dlog = jacobi(Jac::ds, v, ctx) * jacobi(Jac::nc, v, ctx);
            yp -= 0.5 * t.h * dlog.real();
        }
        acc += x * yp;
    }
    return std::abs(acc * per / n);
}

AdjugateDiag adjugate_diag(const PeriodicGraph& g, cplx u,
                           const EllipticContext& ctx) {
    auto [z, w] = curve_param(g, u, ctx);
    Eigen::MatrixXcd M = fourier_laplacian(g, z, w, ctx);
    const int n = g.num_vertices();
    AdjugateDiag out;
    out.adj.resize(n, n);
    if (n == 1) {
        out.adj(0, 0) = 1.0;
    } else {
        Eigen::MatrixXcd minor(n - 1, n - 1);
        for (int r = 0; r < n; ++r)
            for (int cc = 0; cc < n; ++cc) {
                for (int i = 0, mi = 0; i < n; ++i) {
                    if (i == r) continue;
                    for (int j = 0, mj = 0; j < n; ++j) {
                        if (j == cc) continue;
                        minor(mi, mj++) = M(i, j);
                    }
                    ++mi;
                }
                double sign = ((r + cc) % 2 == 0) ? 1.0 : -1.0;
                // adjugate = transpose of the cofactor matrix
                out.adj(cc, r) = sign * minor.determinant();
            }
    }
    cplx mean = 0.0;
    for (int i = 0; i < n; ++i) mean += out.adj(i, i);
    mean /= double(n);
    out.g = mean;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j)
                out.max_dev = std::max(
                    out.max_dev, std::abs(out.adj(i, i) - out.adj(j, j)));
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    const auto& sv = svd.singularValues();
    out.sv_min = sv[n - 1];
    out.sv_second = n >= 2 ? sv[n - 2] : sv[0];
    return out;
}

}  // namespace isolap
