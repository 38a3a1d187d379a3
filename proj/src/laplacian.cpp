#include "isolap/laplacian.hpp"

#include <stdexcept>

namespace isolap {

namespace {

double angle_units(double theta_bar, const EllipticContext& ctx) {
    if (!(theta_bar > 0.0 && theta_bar < 1.5707963267948966))
        throw std::domain_error("half-angle must lie strictly in (0, pi/2)");
    return theta_bar * 2.0 * ctx.K / 3.14159265358979323846;
}

}  // namespace

double conductance(double theta_bar, const EllipticContext& ctx) {
    auto t = jacobi_triple(angle_units(theta_bar, ctx), ctx);
    return t.sn / t.cn;
}

double mass_term(double theta_bar, const EllipticContext& ctx) {
    double theta = angle_units(theta_bar, ctx);
    auto t = jacobi_triple(theta, ctx);
    return func_A_real(theta, ctx) - t.sn / t.cn;
}

double vertex_mass(const std::vector<double>& theta_bars,
                   const EllipticContext& ctx) {
    double s = 0.0;
    for (double t : theta_bars) s += mass_term(t, ctx);
    return s;
}

double vertex_diagonal(const std::vector<double>& theta_bars,
                       const EllipticContext& ctx) {
    double s = 0.0;
    for (double t : theta_bars)
        s += func_A_real(angle_units(t, ctx), ctx);
    return s;
}

PatchOperator patch_laplacian(const Patch& p, const EllipticContext& ctx) {
    PatchOperator op;
    op.row_of_vertex.assign(p.pos.size(), -1);
    for (int v = 0; v < (int)p.pos.size(); ++v)
        if (p.active(v)) {
            op.row_of_vertex[v] = (int)op.vertex_of_row.size();
            op.vertex_of_row.push_back(v);
        }
    int n = (int)op.vertex_of_row.size();

    std::vector<Eigen::Triplet<double>> trip;
    for (int r = 0; r < n; ++r) {
        int v = op.vertex_of_row[r];
        double diag;
        if (p.cls[v] >= 0) {
            // Base-class vertex: the infinite-graph angle set is known from
            // the unmodified periodic graph even when the patch is clipped.
            diag = vertex_diagonal(p.base->incident_angles(p.cls[v]), ctx);
        } else {
            if (!p.interior(v))
                throw graph_error(
                    "free vertex on the killed boundary: incident angles "
                    "are incomplete");
            diag = vertex_diagonal(p.incident_angles(v), ctx);
        }
        trip.emplace_back(r, r, diag);
        for (int e : p.adj[v]) {
            int u = p.other(e, v);
            trip.emplace_back(r, op.row_of_vertex[u],
                              -conductance(p.edges[e].theta_bar, ctx));
        }
    }
    op.mat.resize(n, n);
    op.mat.setFromTriplets(trip.begin(), trip.end());
    return op;
}

int TorusOperator::index(int cls, int m, int n) const {
    m = ((m % p) + p) % p;
    n = ((n % q) + q) % q;
    return (m * q + n) * classes + cls;
}

TorusOperator torus_laplacian(const PeriodicGraph& g, int p, int q,
                              const EllipticContext& ctx) {
    if (p < 1 || q < 1) throw std::domain_error("torus sides must be >= 1");
    TorusOperator op;
    op.classes = g.num_vertices();
    op.p = p;
    op.q = q;
    int n = op.classes * p * q;

    std::vector<double> diag(op.classes);
    for (int c = 0; c < op.classes; ++c)
        diag[c] = vertex_diagonal(g.incident_angles(c), ctx);

    std::vector<Eigen::Triplet<double>> trip;
    for (int m = 0; m < p; ++m)
        for (int nn = 0; nn < q; ++nn) {
            for (int c = 0; c < op.classes; ++c)
                trip.emplace_back(op.index(c, m, nn), op.index(c, m, nn),
                                  diag[c]);
            for (const auto& e : g.edges) {
                double rho = conductance(e.theta_bar, ctx);
                int a = op.index(e.x, m, nn);
                int b = op.index(e.y, m + e.dm, nn + e.dn);
                trip.emplace_back(a, b, -rho);
                trip.emplace_back(b, a, -rho);
            }
        }
    op.mat.resize(n, n);
    op.mat.setFromTriplets(trip.begin(), trip.end());
    return op;
}

Eigen::MatrixXcd fourier_laplacian(const PeriodicGraph& g, cplx z, cplx w,
                                   const EllipticContext& ctx) {
    if (z == 0.0 || w == 0.0)
        throw std::domain_error("fourier_laplacian requires z, w != 0");
    int n = g.num_vertices();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (int c = 0; c < n; ++c)
        m(c, c) = vertex_diagonal(g.incident_angles(c), ctx);
    for (const auto& e : g.edges) {
        double rho = conductance(e.theta_bar, ctx);
        cplx f = std::pow(z, -e.dm) * std::pow(w, -e.dn);
        m(e.x, e.y) -= rho * f;
        m(e.y, e.x) -= rho / f;
    }
    return m;
}

}  // namespace isolap
