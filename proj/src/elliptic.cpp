#include "isolap/elliptic.hpp"

#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/ellint_2.hpp>
#include <boost/math/special_functions/jacobi_elliptic.hpp>
#include <boost/math/special_functions/jacobi_zeta.hpp>

#include <cmath>
#include <limits>
#include <utility>

namespace isolap {

namespace {

constexpr double kPoleRadius = 1e-10;
constexpr double kPi = 3.14159265358979323846;

// Signed distance of u to the lattice base + 2K*Z + 2iKp*Z (the common pole
// and zero lattice of the degree-one building blocks). Returns the nearest
// lattice point through `nearest`.
double lattice_distance(cplx u, cplx base, double two_a, double two_b,
                        cplx* nearest) {
    double rx = std::remainder(u.real() - base.real(), two_a);
    double ry = u.imag() - base.imag();
    if (std::isfinite(two_b)) ry = std::remainder(ry, two_b);
    if (nearest) *nearest = u - cplx(rx, ry);
    return std::hypot(rx, ry);
}

struct ComplexParts {
    cplx s, c, d;  // numerators of sn, cn, dn over the shared denominator
    double den;
};

// Addition-formula assembly of sn, cn, dn at x+iy from real-argument values
// at modulus k (in x) and k' (in y).
ComplexParts complex_parts(const JacobiTriple& a, const JacobiTriple& b,
                           double k2) {
    ComplexParts p;
    p.den = b.cn * b.cn + k2 * a.sn * a.sn * b.sn * b.sn;
    p.s = cplx(a.sn * b.dn, a.cn * a.dn * b.sn * b.cn);
    p.c = cplx(a.cn * b.cn, -a.sn * a.dn * b.sn * b.dn);
    p.d = cplx(a.dn * b.cn * b.dn, -k2 * a.sn * a.cn * b.sn);
    return p;
}

enum Component { S = 0, C = 1, D = 2, N = 3 };

struct CodeParts {
    Component p, q;
};

CodeParts split_code(Jac f) {
    switch (f) {
        case Jac::sc: return {S, C};
        case Jac::sd: return {S, D};
        case Jac::sn: return {S, N};
        case Jac::cs: return {C, S};
        case Jac::cd: return {C, D};
        case Jac::cn: return {C, N};
        case Jac::ds: return {D, S};
        case Jac::dc: return {D, C};
        case Jac::dn: return {D, N};
        case Jac::ns: return {N, S};
        case Jac::nc: return {N, C};
        case Jac::nd: return {N, D};
    }
    throw std::logic_error("unreachable jacobi code");
}

const char* code_name(Jac f) {
    static const char* names[] = {"sc", "sd", "sn", "cs", "cd", "cn",
                                  "ds", "dc", "dn", "ns", "nc", "nd"};
    return names[static_cast<int>(f)];
}

}  // namespace

EllipticContext complete_integrals(double k) {
    if (!(k >= 0.0) || k >= 1.0 - 1e-12)
        throw std::invalid_argument(
            "complete_integrals: modulus must be in [0, 1-1e-12)");
    EllipticContext ctx;
    ctx.k = k;
    ctx.k2 = k * k;
    ctx.kprime = std::sqrt((1.0 - k) * (1.0 + k));
    ctx.K = boost::math::ellint_1(k);
    ctx.E = boost::math::ellint_2(k);
    if (k == 0.0) {
        ctx.Kp = std::numeric_limits<double>::infinity();
        ctx.Ep = 1.0;
        ctx.q = 0.0;
        return ctx;
    }
    if (ctx.kprime == 1.0) {
        // k below ~1.5e-8: 1-k^2 rounds to 1 and ellint_1(1) overflows.
        // The classical expansion K' = ln(4/k) + O(k^2 ln k) is then exact
        // to working precision, as is E' = 1.
        ctx.Kp = std::log(4.0 / k);
        ctx.Ep = 1.0;
    } else {
        ctx.Kp = boost::math::ellint_1(ctx.kprime);
        ctx.Ep = boost::math::ellint_2(ctx.kprime);
    }
    ctx.q = std::exp(-kPi * ctx.Kp / ctx.K);
    double legendre = ctx.E * ctx.Kp + ctx.Ep * ctx.K - ctx.K * ctx.Kp;
    if (std::abs(legendre - kPi / 2.0) > 1e-12 * (kPi / 2.0))
        throw std::runtime_error("complete_integrals: Legendre residual too large");
    return ctx;
}

cplx reduce_to_torus(cplx u, const EllipticContext& ctx) {
    double x = u.real(), y = u.imag();
    x -= 4.0 * ctx.K * std::floor((x + 2.0 * ctx.K) / (4.0 * ctx.K));
    if (std::isfinite(ctx.Kp))
        y -= 4.0 * ctx.Kp * std::floor((y + 2.0 * ctx.Kp) / (4.0 * ctx.Kp));
    return {x, y};
}

Jac jacobi_code(const std::string& pq) {
    static const std::pair<const char*, Jac> table[] = {
        {"sc", Jac::sc}, {"sd", Jac::sd}, {"sn", Jac::sn}, {"cs", Jac::cs},
        {"cd", Jac::cd}, {"cn", Jac::cn}, {"ds", Jac::ds}, {"dc", Jac::dc},
        {"dn", Jac::dn}, {"ns", Jac::ns}, {"nc", Jac::nc}, {"nd", Jac::nd}};
    for (const auto& [name, code] : table)
        if (pq == name) return code;
    throw std::invalid_argument("jacobi_code: unknown code '" + pq + "'");
}

namespace {
// Boost 1.74 returns a wrong dn exactly at the quarter period (the am = pi/2
// branch). For real arguments dn = +sqrt(1 - k^2 sn^2) holds unconditionally,
// so rebuild dn whenever the returned value violates that identity.
void repair_dn(JacobiTriple& t, double k) {
    double want = (1.0 - t.sn * k) * (1.0 + t.sn * k);
    if (std::abs(t.dn * t.dn - want) > 1e-13) t.dn = std::sqrt(want);
}
}  // namespace

JacobiTriple jacobi_triple(double x, const EllipticContext& ctx) {
    JacobiTriple t;
    t.sn = boost::math::jacobi_elliptic(ctx.k, x, &t.cn, &t.dn);
    repair_dn(t, ctx.k);
    return t;
}

JacobiTriple jacobi_triple_comp(double y, const EllipticContext& ctx) {
    JacobiTriple t;
    t.sn = boost::math::jacobi_elliptic(ctx.kprime, y, &t.cn, &t.dn);
    repair_dn(t, ctx.kprime);
    return t;
}

cplx jacobi(Jac f, cplx u, const EllipticContext& ctx) {
    u = reduce_to_torus(u, ctx);
    auto [p, q] = split_code(f);

    // Poles of p/q sit at the zeros of the q component.
    cplx nearest;
    double dist = std::numeric_limits<double>::infinity();
    switch (q) {
        case S:
            dist = lattice_distance(u, 0.0, 2 * ctx.K, 2 * ctx.Kp, &nearest);
            break;
        case C:
            dist = lattice_distance(u, ctx.K, 2 * ctx.K, 2 * ctx.Kp, &nearest);
            break;
        case D:
            if (std::isfinite(ctx.Kp))  // dn has no zeros at k = 0
                dist = lattice_distance(u, cplx(ctx.K, ctx.Kp), 2 * ctx.K,
                                        2 * ctx.Kp, &nearest);
            break;
        case N:
            // sn, cn, dn themselves have simple poles on the iKp lattice.
            if (std::isfinite(ctx.Kp))
                dist = lattice_distance(u, cplx(0.0, ctx.Kp), 2 * ctx.K,
                                        2 * ctx.Kp, &nearest);
            break;
    }
    if (dist < kPoleRadius)
        throw pole_proximity_error(code_name(f), nearest);

    JacobiTriple a = jacobi_triple(u.real(), ctx);
    JacobiTriple b = jacobi_triple_comp(u.imag(), ctx);
    ComplexParts parts = complex_parts(a, b, ctx.k2);
    auto pick = [&](Component comp) -> cplx {
        switch (comp) {
            case S: return parts.s;
            case C: return parts.c;
            case D: return parts.d;
            case N: return cplx(parts.den, 0.0);
        }
        return {};
    };
    return pick(p) / pick(q);
}

double jacobi_epsilon_real(double x, const EllipticContext& ctx) {
    if (ctx.k == 0.0) return x;
    JacobiTriple t = jacobi_triple(x, ctx);
    double am = std::atan2(t.sn, t.cn);  // any branch works: Z is pi-periodic
    return boost::math::jacobi_zeta(ctx.k, am) + (ctx.E / ctx.K) * x;
}

cplx jacobi_epsilon(cplx u, const EllipticContext& ctx) {
    if (ctx.k == 0.0) return u;  // dn == 1
    cplx acc = 0.0;

    // Quasiperiodic reduction keeps both real evaluations well conditioned.
    double mx = std::floor((u.real() + ctx.K) / (2.0 * ctx.K));
    u -= 2.0 * ctx.K * mx;
    acc += 2.0 * ctx.E * mx;
    double my = std::floor((u.imag() + ctx.Kp) / (2.0 * ctx.Kp));
    u -= cplx(0.0, 2.0 * ctx.Kp * my);
    acc += cplx(0.0, 2.0 * (ctx.Kp - ctx.Ep) * my);

    // The plain addition formula degrades near Im u = +-Kp (spurious
    // divergences that cancel analytically). Step away with the half-period
    // identity eps(v + i*s*Kp) = eps(v) + (cn*dn/sn)(v) + i*s*(Kp - Ep).
    if (std::abs(u.imag()) > 0.5 * ctx.Kp) {
        double s = (u.imag() > 0) ? 1.0 : -1.0;
        cplx v = u - cplx(0.0, s * ctx.Kp);
        JacobiTriple a = jacobi_triple(v.real(), ctx);
        JacobiTriple b = jacobi_triple_comp(v.imag(), ctx);
        ComplexParts parts = complex_parts(a, b, ctx.k2);
        cplx cds = parts.c * parts.d / (parts.s * parts.den);
        return jacobi_epsilon(v, ctx) + cds + cplx(0.0, s * (ctx.Kp - ctx.Ep)) +
               acc;
    }

    double x = u.real(), y = u.imag();
    JacobiTriple a = jacobi_triple(x, ctx);
    JacobiTriple b = jacobi_triple_comp(y, ctx);
    ComplexParts parts = complex_parts(a, b, ctx.k2);
    cplx sn_xy = parts.s / parts.den;
    // eps(iy) through the imaginary transformation, then one addition step.
    double zeta_arg = std::atan2(b.sn, b.cn);
    double eps_comp =
        boost::math::jacobi_zeta(ctx.kprime, zeta_arg) + (ctx.Ep / ctx.Kp) * y;
    cplx eps_iy(0.0, y - eps_comp + b.sn * b.dn / b.cn);
    cplx sn_iy(0.0, b.sn / b.cn);
    return acc + jacobi_epsilon_real(x, ctx) + eps_iy -
           ctx.k2 * a.sn * sn_iy * sn_xy;
}

double func_A_real(double x, const EllipticContext& ctx) {
    cplx nearest;
    if (lattice_distance(x, ctx.K, 2 * ctx.K, 2 * ctx.Kp, &nearest) <
        kPoleRadius)
        throw pole_proximity_error("A", nearest);
    JacobiTriple t = jacobi_triple(x, ctx);
    double sdc = t.sn * t.dn / t.cn;
    return (sdc - jacobi_epsilon_real(x, ctx) + (ctx.E / ctx.K) * x) /
           ctx.kprime;
}

cplx func_A(cplx u, const EllipticContext& ctx) {
    // No torus reduction here: A picks up i*pi/(k'K) per 2iKp step, so
    // folding the argument would silently change the value.
    cplx nearest;
    if (lattice_distance(u, ctx.K, 2 * ctx.K, 2 * ctx.Kp, &nearest) <
        kPoleRadius)
        throw pole_proximity_error("A", nearest);
    if (u.imag() == 0.0) return func_A_real(u.real(), ctx);
    JacobiTriple a = jacobi_triple(u.real(), ctx);
    JacobiTriple b = jacobi_triple_comp(u.imag(), ctx);
    ComplexParts parts = complex_parts(a, b, ctx.k2);
    cplx sdc = parts.s * parts.d / (parts.c * parts.den);
    return (sdc - jacobi_epsilon(u, ctx) + (ctx.E / ctx.K) * u) / ctx.kprime;
}

double func_H_real(double x, const EllipticContext& ctx) {
    if (ctx.k == 0.0) return x / (2.0 * kPi);
    return (ctx.Kp / kPi) * jacobi_epsilon_real(0.5 * x, ctx) +
           (ctx.Ep - ctx.Kp) * x / (2.0 * kPi);
}

cplx func_H(cplx u, const EllipticContext& ctx) {
    if (ctx.k == 0.0) return u / (2.0 * kPi);
    cplx nearest;
    if (lattice_distance(u, cplx(0.0, 2.0 * ctx.Kp), 4 * ctx.K, 4 * ctx.Kp,
                         &nearest) < kPoleRadius)
        throw pole_proximity_error("H", nearest);
    if (u.imag() == 0.0) return func_H_real(u.real(), ctx);
    return (ctx.Kp / kPi) * jacobi_epsilon(0.5 * u, ctx) +
           (ctx.Ep - ctx.Kp) * u / (2.0 * kPi);
}

double func_H_prime_real(double x, const EllipticContext& ctx) {
    if (ctx.k == 0.0) return 1.0 / (2.0 * kPi);
    JacobiTriple t = jacobi_triple(0.5 * x, ctx);
    return (ctx.Kp / (2.0 * kPi)) * t.dn * t.dn +
           (ctx.Ep - ctx.Kp) / (2.0 * kPi);
}

double func_H_nome(double u, const EllipticContext& ctx) {
    if (ctx.k == 0.0) return u / (2.0 * kPi);
    double tb = kPi * u / (4.0 * ctx.K);
    double sum = 0.0;
    double qs = 1.0;
    for (int s = 1; s <= 100000; ++s) {
        qs *= ctx.q;
        double term = qs / (1.0 - qs * qs) * std::sin(2.0 * s * tb);
        sum += term;
        if (qs / (1.0 - qs * qs) < 1e-16) break;
    }
    return tb / kPi + (2.0 * ctx.Kp / ctx.K) * sum;
}

LandenPair landen_ascend(double k) {
    if (!(k >= 0.0) || k >= 1.0)
        throw std::invalid_argument("landen_ascend: modulus must be in [0,1)");
    double kp = std::sqrt((1.0 - k) * (1.0 + k));
    // (2 - k^2 - 2k')/k^2 rewritten without cancellation.
    double ell = (k == 0.0) ? 0.0 : (k * k) / ((1.0 + kp) * (1.0 + kp));
    double mu = (1.0 - ell) / (1.0 + ell);
    return {ell, mu};
}

}  // namespace isolap
