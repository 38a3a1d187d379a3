#include "isolap/forest.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>
#include <tuple>

#include "isolap/green.hpp"
#include "isolap/laplacian.hpp"

namespace isolap {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate_graph(const MassiveGraph& g, const char* where) {
    int n = g.num_vertices();
    if (g.rho.size() != g.edges.size())
        throw std::invalid_argument(std::string(where) +
                                    ": one conductance per edge required");
    for (int e = 0; e < g.num_edges(); ++e) {
        auto [a, b] = g.edges[e];
        if (a < 0 || b < 0 || a >= n || b >= n)
            throw std::invalid_argument(std::string(where) +
                                        ": edge endpoint out of range");
        if (a == b)
            throw std::invalid_argument(std::string(where) +
                                        ": self-loops are not allowed");
        if (!(g.rho[e] > 0))
            throw std::invalid_argument(std::string(where) +
                                        ": conductances must be positive");
    }
    for (double m : g.mass2)
        if (!(m >= 0))
            throw std::invalid_argument(std::string(where) +
                                        ": killing rates must be >= 0");
}

// Union-find with an undo log, so the subset scan can backtrack without
// copying state.
struct RollbackDsu {
    std::vector<int> parent, size;
    std::vector<double> mass;  // killing-rate sum of the component
    std::vector<std::pair<int, int>> log;

    explicit RollbackDsu(const std::vector<double>& mass2)
        : parent(mass2.size()), size(mass2.size(), 1), mass(mass2) {
        for (std::size_t i = 0; i < parent.size(); ++i)
            parent[i] = static_cast<int>(i);
    }
    int find(int x) const {
        while (parent[x] != x) x = parent[x];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size[a] < size[b]) std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
        mass[a] += mass[b];
        log.emplace_back(b, a);
        return true;
    }
    std::size_t mark() const { return log.size(); }
    void rollback(std::size_t m) {
        while (log.size() > m) {
            auto [b, a] = log.back();
            log.pop_back();
            parent[b] = b;
            size[a] -= size[b];
            mass[a] -= mass[b];
        }
    }
};

// Sums, over acyclic supersets of the current partial forest, the product
// of chosen conductances times the root weight of every component. A
// component containing a forced root contributes that vertex's rate
// alone; the root_count bookkeeping rejects merges of two forced roots.
struct ForestScan {
    const MassiveGraph& g;
    RollbackDsu dsu;
    std::vector<int> forced_root;  // per component root: forced vertex or -1

    ForestScan(const MassiveGraph& gr, const std::vector<int>& roots)
        : g(gr), dsu(gr.mass2), forced_root(gr.num_vertices(), -1) {
        for (int v : roots) forced_root[v] = v;
    }

    double leaf() const {
        double w = 1.0;
        for (int x = 0; x < g.num_vertices(); ++x) {
            if (dsu.find(x) != x) continue;
            w *= forced_root[x] >= 0 ? g.mass2[forced_root[x]] : dsu.mass[x];
        }
        return w;
    }

    // Returns false when the edge closes a cycle or joins two forced
    // roots; on success the caller must rollback to undo.
    bool add_edge(int e) {
        int a = dsu.find(g.edges[e][0]), b = dsu.find(g.edges[e][1]);
        if (a == b) return false;
        if (forced_root[a] >= 0 && forced_root[b] >= 0) return false;
        int keep = std::max(forced_root[a], forced_root[b]);
        dsu.unite(a, b);
        forced_root[dsu.find(a)] = keep;
        return true;
    }

    double scan(int e, double rho_prod) {
        if (e == g.num_edges()) return rho_prod * leaf();
        double total = scan(e + 1, rho_prod);  // edge absent
        auto m = dsu.mark();
        // Save both representative slots: whichever side wins the union
        // gets overwritten and must come back on backtrack.
        int a = dsu.find(g.edges[e][0]), b = dsu.find(g.edges[e][1]);
        int ra = forced_root[a], rb = forced_root[b];
        if (add_edge(e)) {
            total += scan(e + 1, rho_prod * g.rho[e]);
            dsu.rollback(m);
            forced_root[a] = ra;
            forced_root[b] = rb;
        }
        return total;
    }
};

double item_weight(const MassiveGraph& g, const ForestItem& it) {
    return it.kind == ForestItem::kEdge ? g.rho[it.id] : g.mass2[it.id];
}

// Oriented endpoints (minus, plus) of an item; a root event collapses to a
// single vertex with a zero second slot flagged by plus < 0.
std::pair<int, int> item_ends(const MassiveGraph& g, const ForestItem& it) {
    if (it.kind == ForestItem::kRoot) return {it.id, -1};
    auto [a, b] = g.edges[it.id];
    return it.reversed ? std::pair<int, int>{b, a} : std::pair<int, int>{a, b};
}

}  // namespace

MassiveGraph torus_graph(const PeriodicGraph& g, int p, int q,
                         const EllipticContext& ctx) {
    if (p < 2 || q < 2)
        throw std::invalid_argument(
            "torus_graph: need p, q >= 2 to avoid self-loops");
    int classes = g.num_vertices();
    MassiveGraph t;
    t.mass2.resize(classes * p * q);
    for (int cls = 0; cls < classes; ++cls) {
        double m2 = vertex_mass(g.incident_angles(cls), ctx);
        for (int a = 0; a < p; ++a)
            for (int b = 0; b < q; ++b) t.mass2[cls + classes * (a * q + b)] = m2;
    }
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < q; ++b)
            for (const RhombusEdge& e : g.edges) {
                int a2 = ((a + e.dm) % p + p) % p;
                int b2 = ((b + e.dn) % q + q) % q;
                t.edges.push_back({e.x + classes * (a * q + b),
                                   e.y + classes * (a2 * q + b2)});
                t.rho.push_back(conductance(e.theta_bar, ctx));
            }
    return t;
}

Eigen::MatrixXd massive_laplacian(const MassiveGraph& g) {
    validate_graph(g, "massive_laplacian");
    int n = g.num_vertices();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int e = 0; e < g.num_edges(); ++e) {
        auto [a, b] = g.edges[e];
        m(a, a) += g.rho[e];
        m(b, b) += g.rho[e];
        m(a, b) -= g.rho[e];
        m(b, a) -= g.rho[e];
    }
    for (int x = 0; x < n; ++x) m(x, x) += g.mass2[x];
    return m;
}

double log_partition_determinant(const MassiveGraph& g) {
    Eigen::LLT<Eigen::MatrixXd> llt(massive_laplacian(g));
    if (llt.info() != Eigen::Success)
        throw std::runtime_error(
            "log_partition_determinant: operator not positive definite");
    double s = 0.0;
    for (int i = 0; i < g.num_vertices(); ++i)
        s += std::log(llt.matrixLLT()(i, i));
    return 2.0 * s;
}

double partition_enumeration(const MassiveGraph& g) {
    validate_graph(g, "partition_enumeration");
    if (g.num_edges() > 24)
        throw std::invalid_argument(
            "partition_enumeration: more than 24 edges");
    ForestScan scan(g, {});
    return scan.scan(0, 1.0);
}

double event_enumeration(const MassiveGraph& g,
                         const std::vector<int>& edge_ids,
                         const std::vector<int>& root_ids) {
    validate_graph(g, "event_enumeration");
    if (g.num_edges() > 24)
        throw std::invalid_argument("event_enumeration: more than 24 edges");
    for (int e : edge_ids)
        if (e < 0 || e >= g.num_edges())
            throw std::invalid_argument("event_enumeration: edge id range");
    for (int v : root_ids)
        if (v < 0 || v >= g.num_vertices())
            throw std::invalid_argument("event_enumeration: vertex id range");
    double z = partition_enumeration(g);

    // Numerator: force the required roots, then scan only the optional
    // edges with the required ones pre-merged.
    ForestScan scan(g, root_ids);
    double rho_prod = 1.0;
    for (int e : edge_ids) {
        if (!scan.add_edge(e)) return 0.0;
        rho_prod *= g.rho[e];
    }
    std::set<int> required(edge_ids.begin(), edge_ids.end());
    MassiveGraph rest;
    rest.mass2 = g.mass2;  // vertices unchanged; only the edge list shrinks
    for (int e = 0; e < g.num_edges(); ++e)
        if (!required.count(e)) {
            rest.edges.push_back(g.edges[e]);
            rest.rho.push_back(g.rho[e]);
        }
    ForestScan inner(rest, {});
    inner.dsu = scan.dsu;
    inner.forced_root = scan.forced_root;
    return rho_prod * inner.scan(0, 1.0) / z;
}

WilsonSampler::WilsonSampler(const MassiveGraph& g) : g_(g) {
    validate_graph(g, "WilsonSampler");
    int n = g.num_vertices();
    offset_.assign(n + 1, 0);
    for (const auto& e : g.edges) {
        ++offset_[e[0] + 1];
        ++offset_[e[1] + 1];
    }
    for (int v = 0; v < n; ++v) offset_[v + 1] += offset_[v];
    cumulative_.resize(offset_[n]);
    step_edge_.resize(offset_[n]);
    step_to_.resize(offset_[n]);
    std::vector<int> fill(offset_.begin(), offset_.end() - 1);
    for (int e = 0; e < g.num_edges(); ++e) {
        auto [a, b] = g.edges[e];
        step_edge_[fill[a]] = e;
        step_to_[fill[a]++] = b;
        step_edge_[fill[b]] = e;
        step_to_[fill[b]++] = a;
    }
    total_.resize(n);
    for (int v = 0; v < n; ++v) {
        double run = 0.0;
        for (int s = offset_[v]; s < offset_[v + 1]; ++s) {
            run += g.rho[step_edge_[s]];
            cumulative_[s] = run;
        }
        total_[v] = run + g.mass2[v];
    }
    // Absorption must be reachable from everywhere, otherwise the walk
    // never terminates.
    std::vector<char> alive(n, 0);
    std::vector<int> stack;
    for (int v = 0; v < n; ++v)
        if (g.mass2[v] > 0) {
            alive[v] = 1;
            stack.push_back(v);
        }
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int s = offset_[v]; s < offset_[v + 1]; ++s)
            if (!alive[step_to_[s]]) {
                alive[step_to_[s]] = 1;
                stack.push_back(step_to_[s]);
            }
    }
    for (int v = 0; v < n; ++v)
        if (!alive[v])
            throw std::invalid_argument(
                "WilsonSampler: a component has no killing at all");
}

ForestSample WilsonSampler::sample(Rng& rng) const {
    int n = g_.num_vertices();
    ForestSample out;
    out.component.assign(n, -1);
    std::vector<int> pos(n, -1);  // index in the current path, or -1
    std::vector<int> path_v, path_e;
    for (int start = 0; start < n; ++start) {
        if (out.component[start] != -1) continue;
        path_v.assign(1, start);
        path_e.clear();
        pos[start] = 0;
        int attach = -1;  // component joined, or a fresh root when -1
        for (;;) {
            int x = path_v.back();
            double t = rng.uniform() * total_[x];
            int lo = offset_[x], hi = offset_[x + 1];
            int s = lo;
            while (s < hi && t >= cumulative_[s]) ++s;
            if (s == hi) {  // killed: x becomes the root of the branch
                attach = -1;
                break;
            }
            int y = step_to_[s];
            if (out.component[y] != -1) {
                path_e.push_back(step_edge_[s]);
                attach = out.component[y];
                break;
            }
            if (pos[y] != -1) {  // loop closed: erase it
                while (static_cast<int>(path_v.size()) > pos[y] + 1) {
                    pos[path_v.back()] = -1;
                    path_v.pop_back();
                    path_e.pop_back();
                }
                continue;
            }
            pos[y] = static_cast<int>(path_v.size());
            path_v.push_back(y);
            path_e.push_back(step_edge_[s]);
        }
        int comp = attach;
        if (comp == -1) {
            comp = static_cast<int>(out.roots.size());
            out.roots.push_back(path_v.back());
        }
        for (int v : path_v) {
            out.component[v] = comp;
            pos[v] = -1;
        }
        out.edges.insert(out.edges.end(), path_e.begin(), path_e.end());
    }
    return out;
}

ForestSample wilson_sample(const MassiveGraph& g, Rng& rng) {
    return WilsonSampler(g).sample(rng);
}

Eigen::MatrixXd transfer_impedance(const MassiveGraph& g,
                                   const std::vector<ForestItem>& items) {
    validate_graph(g, "transfer_impedance");
    std::set<std::pair<int, int>> seen;
    for (const auto& it : items) {
        int cap = it.kind == ForestItem::kEdge ? g.num_edges()
                                               : g.num_vertices();
        if (it.id < 0 || it.id >= cap)
            throw std::invalid_argument("transfer_impedance: item id range");
        if (!seen.insert({it.kind, it.id}).second)
            throw std::invalid_argument("transfer_impedance: duplicate item");
    }
    int n = g.num_vertices();
    Eigen::MatrixXd green =
        Eigen::LLT<Eigen::MatrixXd>(massive_laplacian(g))
            .solve(Eigen::MatrixXd::Identity(n, n));
    int m = static_cast<int>(items.size());
    Eigen::MatrixXd kernel(m, m);
    for (int i = 0; i < m; ++i) {
        auto [am, ap] = item_ends(g, items[i]);
        for (int l = 0; l < m; ++l) {
            auto [bm, bp] = item_ends(g, items[l]);
            double v = green(am, bm);
            if (ap >= 0) v -= green(ap, bm);
            if (bp >= 0) {
                v -= green(am, bp);
                if (ap >= 0) v += green(ap, bp);
            }
            kernel(i, l) = item_weight(g, items[l]) * v;
        }
    }
    return kernel;
}

Eigen::MatrixXd transfer_impedance(const PeriodicGraph& g,
                                   const std::vector<PeriodicItem>& items,
                                   const EllipticContext& ctx) {
    std::set<std::tuple<int, int, int, int>> seen;
    for (const auto& it : items)
        if (!seen.insert({it.kind, it.id, it.m, it.n}).second)
            throw std::invalid_argument("transfer_impedance: duplicate item");

    struct End {
        int cls, m, n;
    };
    auto ends = [&](const PeriodicItem& it) -> std::pair<End, End> {
        if (it.kind == ForestItem::kRoot)
            return {{it.id, it.m, it.n}, {-1, 0, 0}};
        const RhombusEdge& e = g.edges[it.id];
        End minus{e.x, it.m, it.n};
        End plus{e.y, it.m + e.dm, it.n + e.dn};
        if (it.reversed) std::swap(minus, plus);
        return {minus, plus};
    };
    auto weight = [&](const PeriodicItem& it) {
        if (it.kind == ForestItem::kEdge)
            return conductance(g.edges[it.id].theta_bar, ctx);
        return vertex_mass(g.incident_angles(it.id), ctx);
    };
    auto green = [&](const End& a, const End& b) {
        return green_local(g, a.cls, a.m, a.n, b.cls, b.m, b.n, ctx);
    };

    int m = static_cast<int>(items.size());
    Eigen::MatrixXd kernel(m, m);
    for (int i = 0; i < m; ++i) {
        auto [am, ap] = ends(items[i]);
        for (int l = 0; l < m; ++l) {
            auto [bm, bp] = ends(items[l]);
            double v = green(am, bm);
            if (ap.cls >= 0) v -= green(ap, bm);
            if (bp.cls >= 0) {
                v -= green(am, bp);
                if (ap.cls >= 0) v += green(ap, bp);
            }
            kernel(i, l) = weight(items[l]) * v;
        }
    }
    return kernel;
}

double marginal(const Eigen::MatrixXd& kernel) {
    if (kernel.rows() == 0) return 1.0;
    double det = kernel.determinant();
    if (det < -1e-9)
        throw std::runtime_error("marginal: negative probability " +
                                 std::to_string(det));
    return std::max(det, 0.0);
}

double edge_probability(double theta_bar, const EllipticContext& ctx) {
    if (!(theta_bar > 0) || !(theta_bar < kPi / 2))
        throw std::invalid_argument(
            "edge_probability: half-angle outside (0, pi/2)");
    double theta = theta_bar * 2 * ctx.K / kPi;
    JacobiTriple t = jacobi_triple(theta, ctx);
    return 2 * (t.sn / t.cn) * ctx.Kp * (ctx.kprime - t.dn) / kPi +
           2 * func_H_real(2 * theta, ctx);
}

double root_probability(double mass2, const EllipticContext& ctx) {
    return mass2 * ctx.Kp * ctx.kprime / kPi;
}

namespace {

// Integrand of the per-edge free-energy integral. Finite at 0 because H
// vanishes there; blows up like 1/(K - theta) toward the quarter period,
// which never enters since half-angles stay below K.
double f_edge(double theta, const EllipticContext& ctx,
              double (*h)(double, const EllipticContext&)) {
    JacobiTriple t = jacobi_triple(theta, ctx);
    return -2 * h(2 * theta, ctx) * t.dn / (t.sn * t.cn);
}

// Integrand of the per-vertex term. Log-singular at both endpoints.
double s_twist(double theta, const EllipticContext& ctx) {
    JacobiTriple t = jacobi_triple(theta, ctx);
    return -4 * func_H_prime_real(2 * theta, ctx) * std::log(t.sn / t.cn);
}

double integrate(const std::function<double(double)>& f, double a, double b) {
    boost::math::quadrature::tanh_sinh<double> quad;
    return quad.integrate(f, a, b);
}

double vertex_term(const EllipticContext& ctx) {
    return integrate([&](double th) { return s_twist(th, ctx); }, 0.0, ctx.K);
}

double closed_form_value(const PeriodicGraph& g, const EllipticContext& ctx,
                         double (*h)(double, const EllipticContext&)) {
    double f = g.num_vertices() * vertex_term(ctx);
    for (const RhombusEdge& e : g.edges) {
        double theta = e.theta_bar * 2 * ctx.K / kPi;
        f += integrate([&](double th) { return f_edge(th, ctx, h); }, 0.0,
                       theta);
    }
    return f;
}

}  // namespace

double free_energy_closed(const PeriodicGraph& g, const EllipticContext& ctx) {
    if (!(ctx.k > 0))
        throw std::invalid_argument("free_energy_closed: needs k > 0");
    return closed_form_value(g, ctx, func_H_real);
}

double free_energy_closed_alt(const PeriodicGraph& g,
                              const EllipticContext& ctx) {
    if (!(ctx.k > 0))
        throw std::invalid_argument("free_energy_closed_alt: needs k > 0");
    double f = g.num_vertices() * vertex_term(ctx);
    for (const RhombusEdge& e : g.edges) {
        double theta = e.theta_bar * 2 * ctx.K / kPi;
        JacobiTriple t = jacobi_triple(theta, ctx);
        f -= 2 * func_H_real(2 * theta, ctx) * std::log(t.sn / t.cn);
        f -= integrate([&](double th) { return s_twist(th, ctx); }, 0.0, theta);
    }
    return f;
}

double free_energy_fourier(const PeriodicGraph& g, const EllipticContext& ctx,
                           double weight_scale, double tol) {
    if (!(ctx.k > 0))
        throw std::invalid_argument("free_energy_fourier: needs k > 0");
    if (!(weight_scale > 0))
        throw std::invalid_argument("free_energy_fourier: scale must be > 0");
    auto grid_value = [&](int n) {
        double sum = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                cplx z = std::polar(1.0, 2 * kPi * a / n);
                cplx w = std::polar(1.0, 2 * kPi * b / n);
                Eigen::MatrixXcd m = fourier_laplacian(g, z, w, ctx);
                m *= cplx(weight_scale, 0.0);
                sum += std::log(std::abs(m.determinant()));
            }
        return -sum / (double(n) * n);
    };
    double prev = grid_value(8);
    for (int n = 16; n <= 1024; n *= 2) {
        double cur = grid_value(n);
        if (std::abs(cur - prev) < tol) return cur;
        prev = cur;
    }
    throw std::runtime_error("free_energy_fourier: grid did not settle");
}

double lobachevsky(double x) {
    if (x == 0) return 0.0;
    return -integrate([](double t) { return std::log(2 * std::sin(t)); }, 0.0,
                      x);
}

double free_energy_critical(const PeriodicGraph& g) {
    double f = 0.0;
    for (const RhombusEdge& e : g.edges) {
        // Per-edge value is the antiderivative of -(2/pi) t/(sin t cos t)
        // vanishing at t = 0; differentiate to check the signs.
        double tb = e.theta_bar;
        f += -(2 / kPi) * (lobachevsky(tb) + lobachevsky(kPi / 2 - tb)) -
             (2 * tb / kPi) * std::log(std::tan(tb));
    }
    return f;
}

double twisted_entropy(const PeriodicGraph& g, const EllipticContext& ctx) {
    double s = -free_energy_closed(g, ctx);
    for (const RhombusEdge& e : g.edges) {
        double theta = e.theta_bar * 2 * ctx.K / kPi;
        s -= 2 * func_H_real(2 * theta, ctx) *
             std::log(conductance(e.theta_bar, ctx));
    }
    return s;
}

PhaseFit phase_expansion_fit(const PeriodicGraph& g,
                             const std::vector<double>& ks) {
    if (ks.size() < 6)
        throw std::invalid_argument("phase_expansion_fit: need >= 6 moduli");
    for (double k : ks)
        if (!(k > 0) || k > 0.2)
            throw std::invalid_argument(
                "phase_expansion_fit: moduli must lie in (0, 0.2]");
    double f0 = free_energy_critical(g);
    Eigen::MatrixXd design(ks.size(), 2);
    Eigen::VectorXd rhs(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
        double k = ks[i];
        design(i, 0) = k * k * std::log(1 / k);
        design(i, 1) = k * k;
        // The nome series for H keeps full accuracy deep in the small-k
        // regime probed here.
        rhs(i) = closed_form_value(g, complete_integrals(k), func_H_nome) - f0;
    }
    Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
    return {coef(0), coef(1)};
}

}  // namespace isolap
