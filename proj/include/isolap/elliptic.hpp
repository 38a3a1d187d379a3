// Jacobi elliptic functions on the complex torus, plus the two derived
// functions A and H that drive the massive-Laplacian weights and the Green
// function integrals. Real arguments go through Boost.Math; complex arguments
// are assembled from real-argument values with the standard addition formulas.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace isolap {

using cplx = std::complex<double>;

// Thrown when an evaluation point is within the pole-exclusion radius
// (1e-10 in lattice distance) of a pole of the requested function.
class pole_proximity_error : public std::runtime_error {
public:
    pole_proximity_error(const std::string& fn, cplx nearest)
        : std::runtime_error(fn + ": evaluation point too close to pole"),
          nearest_(nearest) {}
    cplx nearest_pole() const { return nearest_; }

private:
    cplx nearest_;
};

// Quarter periods and companion constants for a fixed modulus k.
// K, E are the complete integrals at k; Kp, Ep the same at k' = sqrt(1-k^2).
// For k = 0 the complementary integrals degenerate: Kp = +inf, Ep = 1, q = 0.
struct EllipticContext {
    double k = 0.0;
    double k2 = 0.0;      // k^2
    double kprime = 1.0;  // sqrt(1 - k^2)
    double K = 0.0;
    double E = 0.0;
    double Kp = 0.0;
    double Ep = 0.0;
    double q = 0.0;       // nome exp(-pi*Kp/K)
};

// Builds a context. Rejects k outside [0, 1-1e-12). The Legendre relation
// E*Kp + Ep*K - K*Kp = pi/2 is checked to 1e-12 relative for k > 0.
EllipticContext complete_integrals(double k);

// Canonical representative modulo the period lattice 4K*Z + 4iKp*Z:
// real part in [-2K, 2K), imaginary part in [-2Kp, 2Kp).
cplx reduce_to_torus(cplx u, const EllipticContext& ctx);

// The twelve Glaisher quotient codes p/q with p,q in {s,c,d,n}, p != q.
enum class Jac { sc, sd, sn, cs, cd, cn, ds, dc, dn, ns, nc, nd };

// Parses "sc", "nd", ... ; throws std::invalid_argument on anything else.
Jac jacobi_code(const std::string& pq);

// sn, cn, dn at a real argument and the context's own modulus k.
struct JacobiTriple {
    double sn, cn, dn;
};
JacobiTriple jacobi_triple(double x, const EllipticContext& ctx);
// Same but at the complementary modulus k'.
JacobiTriple jacobi_triple_comp(double y, const EllipticContext& ctx);

// General complex evaluation. Throws pole_proximity_error within 1e-10
// (lattice distance) of a pole of the named quotient.
cplx jacobi(Jac f, cplx u, const EllipticContext& ctx);

// Jacobi epsilon, the integral of dn^2 from 0 to u. Quasiperiodic:
// eps(u+2K) = eps(u) + 2E and eps(u+2iKp) = eps(u) + 2i(Kp-Ep); simple poles
// on the lattice translates of iKp. No pole guard: values blow up naturally.
cplx jacobi_epsilon(cplx u, const EllipticContext& ctx);
double jacobi_epsilon_real(double x, const EllipticContext& ctx);

// A(u) = (sn*dn/cn(u) - eps(u) + (E/K)*u) / k'. Odd, 2K-periodic up to the
// documented imaginary jump, poles where cn vanishes (u = K mod 2K).
cplx func_A(cplx u, const EllipticContext& ctx);
double func_A_real(double x, const EllipticContext& ctx);

// H(u) = (Kp/pi)*eps(u/2) + (Ep-Kp)*u/(2*pi). Satisfies H(0) = 0,
// H(u+4K) = H(u)+1 (exactly, via Legendre), H(u+4iKp) = H(u), a simple pole
// of residue 2Kp/pi at 2iKp, and H -> u/(2*pi) as k -> 0.
cplx func_H(cplx u, const EllipticContext& ctx);
double func_H_real(double x, const EllipticContext& ctx);
// dH/du for real arguments: (Kp/(2*pi))*dn^2(u/2) + (Ep-Kp)/(2*pi).
double func_H_prime_real(double x, const EllipticContext& ctx);

// Second evaluation path for real u: the sine series in the nome,
// H(u) = tb/pi + (2Kp/K) * sum_{s>=1} q^s/(1-q^{2s}) * sin(2 s tb),
// with tb = pi*u/(4K). Terms are added until they drop below 1e-16.
double func_H_nome(double u, const EllipticContext& ctx);

// Ascending Landen step: ell = (2 - k^2 - 2k')/k^2, mu = (1-ell)/(1+ell).
// Then (sn*cn/dn)(u|k) = sn((1+mu)u | ell)/(1+mu) and K(k) = (1+ell)K(ell).
struct LandenPair {
    double ell;
    double mu;
};
LandenPair landen_ascend(double k);

}  // namespace isolap
