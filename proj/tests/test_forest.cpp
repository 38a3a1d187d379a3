// Rooted spanning forests: determinantal partition functions against raw
// enumeration, transfer-impedance marginals, Wilson sampling, and the
// free-energy formulas.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "isolap/elliptic.hpp"
#include "isolap/forest.hpp"
#include "isolap/isograph.hpp"
#include "isolap/laplacian.hpp"
#include "isolap/rng.hpp"

using namespace isolap;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kCatalan = 0.91596559417721901505;

MassiveGraph random_graph(Rng& rng, int n, int extra_edges) {
    // Random spanning tree plus extra chords, uniform positive weights.
    MassiveGraph g;
    g.mass2.resize(n);
    for (double& m : g.mass2) m = rng.uniform(0.05, 1.5);
    for (int v = 1; v < n; ++v) {
        int u = static_cast<int>(rng.below(v));
        g.edges.push_back({u, v});
    }
    for (int c = 0; c < extra_edges; ++c) {
        int a = static_cast<int>(rng.below(n));
        int b = static_cast<int>(rng.below(n));
        if (a == b) continue;
        g.edges.push_back({a, b});
    }
    g.rho.resize(g.num_edges());
    for (double& r : g.rho) r = rng.uniform(0.1, 2.0);
    return g;
}

}  // namespace

TEST_CASE("determinant equals brute-force enumeration on small graphs") {
    // Hand-checkable cases first. One vertex, no edges: the only forest is
    // the vertex rooted at itself.
    MassiveGraph one;
    one.mass2 = {0.7};
    CHECK(partition_enumeration(one) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(log_partition_determinant(one) ==
          doctest::Approx(std::log(0.7)).epsilon(1e-14));

    // Single edge: both-roots, or the edge with either root.
    MassiveGraph pair;
    pair.mass2 = {0.3, 0.4};
    pair.edges = {{0, 1}};
    pair.rho = {2.0};
    double want = 0.3 * 0.4 + 2.0 * (0.3 + 0.4);
    CHECK(partition_enumeration(pair) == doctest::Approx(want).epsilon(1e-14));
    CHECK(log_partition_determinant(pair) ==
          doctest::Approx(std::log(want)).epsilon(1e-12));

    // Random graphs with chords and parallel edges.
    Rng rng(101);
    for (int n : {3, 4, 5, 7, 10}) {
        for (int rep = 0; rep < 4; ++rep) {
            MassiveGraph g = random_graph(rng, n, n / 2 + 1);
            double z = partition_enumeration(g);
            REQUIRE(z > 0.0);
            CHECK(log_partition_determinant(g) ==
                  doctest::Approx(std::log(z)).epsilon(1e-9));
        }
    }

    // Toroidal quotients of the isoradial presets.
    auto ctx = complete_integrals(0.6);
    for (const char* name : {"square", "hexagonal"}) {
        MassiveGraph t = torus_graph(preset(name), 2, 2, ctx);
        CHECK(log_partition_determinant(t) ==
              doctest::Approx(std::log(partition_enumeration(t)))
                  .epsilon(1e-9));
    }
    MassiveGraph t23 = torus_graph(preset("square"), 2, 3, ctx);
    CHECK(log_partition_determinant(t23) ==
          doctest::Approx(std::log(partition_enumeration(t23))).epsilon(1e-9));
}

TEST_CASE("torus quotient matches the dedicated torus operator") {
    auto ctx = complete_integrals(0.45);
    for (const char* name : {"square", "triangular", "paper-fig4"}) {
        PeriodicGraph g = preset(name);
        MassiveGraph t = torus_graph(g, 3, 2, ctx);
        CHECK(t.num_vertices() == 6 * g.num_vertices());
        Eigen::MatrixXd a = massive_laplacian(t);
        Eigen::MatrixXd b = Eigen::MatrixXd(torus_laplacian(g, 3, 2, ctx).mat);
        // Same operator up to the vertex id convention, which torus_graph
        // fixes to match.
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS_AS(torus_graph(preset("square"), 1, 3, ctx),
                    std::invalid_argument);
}

TEST_CASE("kernel minors reproduce enumerated event probabilities") {
    Rng rng(211);
    MassiveGraph g = random_graph(rng, 6, 4);
    double z = partition_enumeration(g);
    REQUIRE(z > 0.0);

    // Singletons: every edge and every root event.
    for (int e = 0; e < g.num_edges(); ++e) {
        double direct = event_enumeration(g, {e}, {});
        double viadet = marginal(transfer_impedance(g, {ForestItem::edge(e)}));
        CHECK(viadet == doctest::Approx(direct).epsilon(1e-9));
    }
    double root_total = 0.0;
    for (int v = 0; v < g.num_vertices(); ++v) {
        double direct = event_enumeration(g, {}, {v});
        double viadet = marginal(transfer_impedance(g, {ForestItem::root(v)}));
        CHECK(viadet == doctest::Approx(direct).epsilon(1e-9));
        root_total += direct;
    }
    // Expected number of roots = expected number of components; each
    // forest has |V| = #edges + #roots.
    double edge_total = 0.0;
    for (int e = 0; e < g.num_edges(); ++e)
        edge_total += event_enumeration(g, {e}, {});
    CHECK(edge_total + root_total ==
          doctest::Approx(g.num_vertices()).epsilon(1e-10));

    // Pairs and a mixed triple.
    for (int rep = 0; rep < 12; ++rep) {
        int e1 = static_cast<int>(rng.below(g.num_edges()));
        int e2 = static_cast<int>(rng.below(g.num_edges()));
        if (e1 == e2) continue;
        double direct = event_enumeration(g, {e1, e2}, {});
        double viadet = marginal(
            transfer_impedance(g, {ForestItem::edge(e1), ForestItem::edge(e2)}));
        CHECK(viadet == doctest::Approx(direct).epsilon(1e-8));
    }
    for (int rep = 0; rep < 8; ++rep) {
        int e = static_cast<int>(rng.below(g.num_edges()));
        int v = static_cast<int>(rng.below(g.num_vertices()));
        int w = static_cast<int>(rng.below(g.num_vertices()));
        if (v == w) continue;
        double direct = event_enumeration(g, {e}, {v, w});
        double viadet = marginal(transfer_impedance(
            g, {ForestItem::edge(e), ForestItem::root(v), ForestItem::root(w)}));
        CHECK(viadet == doctest::Approx(direct).epsilon(1e-8));
    }

    // Edge orientation is a bookkeeping choice, not an event.
    int e = static_cast<int>(rng.below(g.num_edges()));
    double fwd = marginal(transfer_impedance(g, {ForestItem::edge(e, false)}));
    double bwd = marginal(transfer_impedance(g, {ForestItem::edge(e, true)}));
    CHECK(fwd == doctest::Approx(bwd).epsilon(1e-12));

    CHECK(marginal(transfer_impedance(g, {})) == 1.0);
    CHECK_THROWS_AS(
        transfer_impedance(g, {ForestItem::edge(0), ForestItem::edge(0)}),
        std::invalid_argument);
    CHECK_THROWS_AS(transfer_impedance(g, {ForestItem::edge(g.num_edges())}),
                    std::invalid_argument);
    CHECK_THROWS_AS(event_enumeration(g, {0}, {g.num_vertices()}),
                    std::invalid_argument);
}

TEST_CASE("kernel symmetry, minor bounds, and reversal signs") {
    Rng rng(223);
    MassiveGraph g = random_graph(rng, 7, 5);
    std::vector<ForestItem> items;
    for (int e = 0; e < std::min(5, g.num_edges()); ++e)
        items.push_back(ForestItem::edge(e));
    items.push_back(ForestItem::root(1));
    items.push_back(ForestItem::root(4));
    Eigen::MatrixXd h = transfer_impedance(g, items);

    auto weight = [&](const ForestItem& it) {
        return it.kind == ForestItem::kEdge ? g.rho[it.id] : g.mass2[it.id];
    };
    for (size_t i = 0; i < items.size(); ++i)
        for (size_t j = 0; j < items.size(); ++j)
            CHECK(h(i, j) / weight(items[j]) ==
                  doctest::Approx(h(j, i) / weight(items[i])).epsilon(1e-10));

    // Every principal minor is a probability.
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<int> pick;
        for (size_t i = 0; i < items.size(); ++i)
            if (rng.below(2)) pick.push_back(static_cast<int>(i));
        if (pick.empty()) continue;
        Eigen::MatrixXd sub(pick.size(), pick.size());
        for (size_t a = 0; a < pick.size(); ++a)
            for (size_t b = 0; b < pick.size(); ++b)
                sub(a, b) = h(pick[a], pick[b]);
        double p = marginal(sub);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0 + 1e-12);
    }

    // Reversing one edge negates its row and column.
    std::vector<ForestItem> flipped = items;
    flipped[2].reversed = !flipped[2].reversed;
    Eigen::MatrixXd hf = transfer_impedance(g, flipped);
    for (size_t i = 0; i < items.size(); ++i)
        for (size_t j = 0; j < items.size(); ++j) {
            double sign = ((i == 2) != (j == 2)) ? -1.0 : 1.0;
            CHECK(hf(i, j) == doctest::Approx(sign * h(i, j)).epsilon(1e-12));
        }
}

TEST_CASE("infinite-volume kernel: closed forms, translation, decay") {
    for (double k : {0.2, 0.5, 0.8}) {
        auto ctx = complete_integrals(k);
        for (const char* name :
             {"square", "triangular", "hexagonal", "paper-fig4"}) {
            PeriodicGraph g = preset(name);

            // Criterion: singleton probabilities sum to |V_1| per domain.
            double total = 0.0;
            for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
                double p =
                    marginal(transfer_impedance(g, {PeriodicItem::edge(e)}, ctx));
                double closed = edge_probability(g.edges[e].theta_bar, ctx);
                CHECK(p == doctest::Approx(closed).epsilon(1e-9));
                CHECK(p > 0.0);
                CHECK(p < 1.0);
                total += p;
            }
            for (int v = 0; v < g.num_vertices(); ++v) {
                double p =
                    marginal(transfer_impedance(g, {PeriodicItem::root(v)}, ctx));
                double closed =
                    root_probability(vertex_mass(g.incident_angles(v), ctx), ctx);
                CHECK(p == doctest::Approx(closed).epsilon(1e-9));
                total += p;
            }
            CHECK(total == doctest::Approx(g.num_vertices()).epsilon(1e-9));
        }
    }

    auto ctx = complete_integrals(0.6);
    PeriodicGraph g = preset("paper-fig4");

    // Translating all items together changes nothing.
    std::vector<PeriodicItem> here = {PeriodicItem::edge(2), PeriodicItem::root(1)};
    std::vector<PeriodicItem> there = {PeriodicItem::edge(2, 3, -2),
                                       PeriodicItem::root(1, 3, -2)};
    CHECK(marginal(transfer_impedance(g, here, ctx)) ==
          doctest::Approx(marginal(transfer_impedance(g, there, ctx)))
              .epsilon(1e-10));

    // Far-apart events decorrelate at the Green-function rate: the
    // covariance shrinks by orders of magnitude when the gap widens.
    double p1 = marginal(transfer_impedance(g, {PeriodicItem::edge(0)}, ctx));
    double p2 = marginal(transfer_impedance(g, {PeriodicItem::edge(3)}, ctx));
    double near_cov =
        std::abs(marginal(transfer_impedance(
                     g, {PeriodicItem::edge(0), PeriodicItem::edge(3, 2, 2)},
                     ctx)) -
                 p1 * p2);
    double far_cov =
        std::abs(marginal(transfer_impedance(
                     g, {PeriodicItem::edge(0), PeriodicItem::edge(3, 15, 15)},
                     ctx)) -
                 p1 * p2);
    CHECK(far_cov < 1e-8);
    CHECK(far_cov < 1e-3 * near_cov);

    CHECK_THROWS_AS(
        transfer_impedance(
            g, {PeriodicItem::edge(1), PeriodicItem::edge(1)}, ctx),
        std::invalid_argument);
}

TEST_CASE("finite kernels converge to the infinite-volume one") {
    // At strong mass the wraparound correction dies exponentially in the
    // torus size.
    auto ctx = complete_integrals(0.8);
    PeriodicGraph g = preset("square");
    double infinite =
        marginal(transfer_impedance(g, {PeriodicItem::edge(0)}, ctx));
    auto gap = [&](int size) {
        MassiveGraph t = torus_graph(g, size, size, ctx);
        return std::abs(
            marginal(transfer_impedance(t, {ForestItem::edge(0)})) - infinite);
    };
    double g6 = gap(6), g12 = gap(12);
    CHECK(g6 < 0.05);
    CHECK(g12 < g6 / 5);
    CHECK(g12 < 5e-4);
}

TEST_CASE("wilson samples are rooted spanning forests") {
    Rng rng(307);
    auto ctx = complete_integrals(0.5);
    MassiveGraph g = torus_graph(preset("square"), 4, 4, ctx);
    WilsonSampler sampler(g);
    for (int rep = 0; rep < 200; ++rep) {
        ForestSample s = sampler.sample(rng);
        CHECK(static_cast<int>(s.edges.size() + s.roots.size()) ==
              g.num_vertices());

        // Edges of each component form a tree on its vertex set.
        std::set<int> used(s.edges.begin(), s.edges.end());
        CHECK(used.size() == s.edges.size());
        std::vector<int> comp_vertices(s.roots.size(), 0);
        std::vector<int> comp_edges(s.roots.size(), 0);
        for (int v = 0; v < g.num_vertices(); ++v) {
            REQUIRE(s.component[v] >= 0);
            REQUIRE(s.component[v] < static_cast<int>(s.roots.size()));
            ++comp_vertices[s.component[v]];
        }
        for (int e : s.edges) {
            CHECK(s.component[g.edges[e][0]] == s.component[g.edges[e][1]]);
            ++comp_edges[s.component[g.edges[e][0]]];
        }
        for (size_t c = 0; c < s.roots.size(); ++c) {
            CHECK(s.component[s.roots[c]] == static_cast<int>(c));
            CHECK(comp_edges[c] == comp_vertices[c] - 1);
        }
    }

    // Same seed, same sample; separate streams disagree quickly.
    Rng r1(99), r2(99), r3(100);
    ForestSample a = sampler.sample(r1);
    ForestSample b = sampler.sample(r2);
    CHECK(a.edges == b.edges);
    CHECK(a.roots == b.roots);
    bool differs = false;
    for (int rep = 0; rep < 10 && !differs; ++rep)
        differs = sampler.sample(r2).edges != sampler.sample(r3).edges;
    CHECK(differs);

    // Stronger mass means more, hence smaller, components.
    auto mean_roots = [&](double k) {
        auto c = complete_integrals(k);
        MassiveGraph tg = torus_graph(preset("square"), 4, 4, c);
        WilsonSampler ws(tg);
        Rng r(17);
        double acc = 0;
        for (int i = 0; i < 2000; ++i)
            acc += static_cast<double>(ws.sample(r).roots.size());
        return acc / 2000;
    };
    CHECK(mean_roots(0.95) > mean_roots(0.3) + 0.5);

    MassiveGraph bare;
    bare.mass2 = {0.0, 0.0};
    bare.edges = {{0, 1}};
    bare.rho = {1.0};
    CHECK_THROWS_AS(WilsonSampler{bare}, std::invalid_argument);
}

TEST_CASE("sampled frequencies match kernel marginals on a torus") {
    auto ctx = complete_integrals(0.5);
    MassiveGraph g = torus_graph(preset("square"), 4, 4, ctx);
    WilsonSampler sampler(g);
    Rng rng(401);
    const int samples = 20000;

    std::vector<int> edge_ids = {0, 5, 11, 17, 23, 30};
    std::vector<int> root_ids = {0, 6, 13};
    std::vector<std::array<int, 2>> pairs = {{0, 17}, {5, 30}, {11, 23}};

    std::vector<int> edge_hits(edge_ids.size(), 0);
    std::vector<int> root_hits(root_ids.size(), 0);
    std::vector<int> pair_hits(pairs.size(), 0);
    std::vector<char> in_forest(g.num_edges(), 0);
    std::vector<char> is_root(g.num_vertices(), 0);
    for (int s = 0; s < samples; ++s) {
        ForestSample f = sampler.sample(rng);
        std::fill(in_forest.begin(), in_forest.end(), 0);
        std::fill(is_root.begin(), is_root.end(), 0);
        for (int e : f.edges) in_forest[e] = 1;
        for (int r : f.roots) is_root[r] = 1;
        for (size_t i = 0; i < edge_ids.size(); ++i)
            edge_hits[i] += in_forest[edge_ids[i]];
        for (size_t i = 0; i < root_ids.size(); ++i)
            root_hits[i] += is_root[root_ids[i]];
        for (size_t i = 0; i < pairs.size(); ++i)
            pair_hits[i] += in_forest[pairs[i][0]] && in_forest[pairs[i][1]];
    }

    auto within = [&](int hits, double p) {
        double sigma = std::sqrt(p * (1.0 - p) * samples);
        return std::abs(hits - p * samples) <= 3.5 * sigma;
    };
    for (size_t i = 0; i < edge_ids.size(); ++i) {
        double p = marginal(
            transfer_impedance(g, {ForestItem::edge(edge_ids[i])}));
        CHECK(within(edge_hits[i], p));
    }
    for (size_t i = 0; i < root_ids.size(); ++i) {
        double p =
            marginal(transfer_impedance(g, {ForestItem::root(root_ids[i])}));
        CHECK(within(root_hits[i], p));
    }
    for (size_t i = 0; i < pairs.size(); ++i) {
        double p = marginal(transfer_impedance(
            g,
            {ForestItem::edge(pairs[i][0]), ForestItem::edge(pairs[i][1])}));
        CHECK(within(pair_hits[i], p));
    }
}

TEST_CASE("sampler hits every forest of a triangle at the exact rates") {
    // Full goodness of fit over all 16 rooted forests of a weighted
    // triangle, exact probabilities from enumeration.
    Rng wrng(733);
    MassiveGraph g;
    g.mass2 = {0.9, 0.35, 0.6};
    g.edges = {{0, 1}, {1, 2}, {0, 2}};
    g.rho = {1.3, 0.8, 0.55};

    std::map<std::pair<std::vector<int>, std::vector<int>>, double> expect;
    double z = partition_enumeration(g);
    // All acyclic edge subsets (the full triangle is the one cycle).
    for (int mask = 0; mask < 8; ++mask) {
        if (mask == 7) continue;
        std::vector<int> es;
        double w = 1.0;
        for (int e = 0; e < 3; ++e)
            if (mask & (1 << e)) {
                es.push_back(e);
                w *= g.rho[e];
            }
        // Choose one root per component.
        std::vector<int> comp = {0, 1, 2};
        for (int e : es)
            for (int& c : comp)
                if (c == comp[g.edges[e][0]] || c == comp[g.edges[e][1]])
                    c = std::min(comp[g.edges[e][0]], comp[g.edges[e][1]]);
        std::vector<std::vector<int>> members(3);
        for (int v = 0; v < 3; ++v) members[comp[v]].push_back(v);
        std::vector<std::vector<int>> choices = {{}};
        for (const auto& mem : members) {
            if (mem.empty()) continue;
            std::vector<std::vector<int>> next;
            for (const auto& partial : choices)
                for (int r : mem) {
                    auto ext = partial;
                    ext.push_back(r);
                    next.push_back(ext);
                }
            choices.swap(next);
        }
        for (auto roots : choices) {
            double wm = w;
            for (int r : roots) wm *= g.mass2[r];
            std::sort(roots.begin(), roots.end());
            expect[{es, roots}] = wm / z;
        }
    }
    REQUIRE(expect.size() == 16);

    const int samples = 200000;
    std::map<std::pair<std::vector<int>, std::vector<int>>, int> counts;
    WilsonSampler sampler(g);
    for (int s = 0; s < samples; ++s) {
        ForestSample f = sampler.sample(wrng);
        std::vector<int> es = f.edges, rs = f.roots;
        std::sort(es.begin(), es.end());
        std::sort(rs.begin(), rs.end());
        ++counts[{es, rs}];
    }

    double chisq = 0.0;
    for (const auto& [cfg, p] : expect) {
        double e = p * samples;
        REQUIRE(e > 20.0);
        double d = counts[cfg] - e;
        chisq += d * d / e;
    }
    // 15 degrees of freedom; reject only far out in the tail.
    double pvalue = boost::math::gamma_q(15.0 / 2.0, chisq / 2.0);
    CHECK(pvalue > 1e-4);
    int seen = 0;
    for (const auto& [cfg, c] : counts) seen += c;
    CHECK(seen == samples);
    CHECK(counts.size() == expect.size());
}

TEST_CASE("free energy: closed, rewritten and Fourier forms agree") {
    for (const char* name : {"square", "triangular", "hexagonal"}) {
        PeriodicGraph g = preset(name);
        for (double k : {0.3, 0.6}) {
            auto ctx = complete_integrals(k);
            double closed = free_energy_closed(g, ctx);
            CHECK(closed ==
                  doctest::Approx(free_energy_closed_alt(g, ctx)).epsilon(1e-8));
            CHECK(closed ==
                  doctest::Approx(free_energy_fourier(g, ctx)).epsilon(1e-6));
        }
    }
    // The fundamental domain of the larger preset has five vertices.
    PeriodicGraph g4 = preset("paper-fig4");
    auto ctx = complete_integrals(0.5);
    CHECK(free_energy_closed(g4, ctx) ==
          doctest::Approx(free_energy_closed_alt(g4, ctx)).epsilon(1e-8));

    // Scaling every weight by lambda shifts F by -|V_1| log lambda.
    for (double lambda : {0.5, 3.0}) {
        double base = free_energy_fourier(preset("hexagonal"), ctx);
        double scaled = free_energy_fourier(preset("hexagonal"), ctx, lambda);
        CHECK(scaled - base ==
              doctest::Approx(-2.0 * std::log(lambda)).epsilon(1e-7));
    }

    CHECK_THROWS_AS(free_energy_closed(g4, complete_integrals(0.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(free_energy_fourier(g4, ctx, -1.0), std::invalid_argument);
}

TEST_CASE("free energy approaches the spanning-tree limit as k -> 0") {
    // Lobachevsky sanity: L(pi/2) = 0 and L(pi/4) = Catalan/2.
    CHECK(lobachevsky(0.0) == 0.0);
    CHECK(std::abs(lobachevsky(kPi / 2)) < 1e-12);
    CHECK(lobachevsky(kPi / 4) ==
          doctest::Approx(kCatalan / 2).epsilon(1e-10));

    // Square lattice: -4 Catalan / pi.
    PeriodicGraph sq = preset("square");
    CHECK(free_energy_critical(sq) ==
          doctest::Approx(-4.0 * kCatalan / kPi).epsilon(1e-12));

    for (const char* name : {"square", "triangular", "paper-fig4"}) {
        PeriodicGraph g = preset(name);
        double f0 = free_energy_critical(g);
        double fk = free_energy_closed(g, complete_integrals(1e-3));
        CHECK(std::abs(fk - f0) < 1e-3);
        // The gap closes quadratically, so at 1e-2 it is still tiny but
        // clearly resolved.
        double fk2 = free_energy_closed(g, complete_integrals(1e-2));
        CHECK(std::abs(fk2 - f0) < 1e-3);
        CHECK(std::abs(fk - f0) < std::abs(fk2 - f0));
    }
}

TEST_CASE("twisted entropy is positive and vanishes toward the flat graph") {
    auto ctx = complete_integrals(0.5);
    double prev = -1.0;
    // Tilted two-track family: alpha_bar -> pi flattens all rhombi.
    for (double ab : {1.8, 2.3, 2.7, 3.0}) {
        PeriodicGraph g =
            build_periodic_graph({{1, 0, 0.0}, {0, 1, ab}}, {0.02});
        double s = twisted_entropy(g, ctx);
        CHECK(s > 0.0);
        if (prev >= 0.0) CHECK(s < prev);
        prev = s;
    }
}

TEST_CASE("phase fit is stable and the measured flat-limit gap is quadratic") {
    PeriodicGraph g = preset("square");
    std::vector<double> grid_a = {0.02, 0.04, 0.06, 0.08, 0.10, 0.13, 0.16, 0.20};
    std::vector<double> grid_b = {0.03, 0.05, 0.07, 0.09, 0.12, 0.15, 0.18};
    PhaseFit fa = phase_expansion_fit(g, grid_a);
    PhaseFit fb = phase_expansion_fit(g, grid_b);
    CHECK(std::isfinite(fa.coef_klog));
    CHECK(std::isfinite(fa.coef_k2));
    // Different grids agree on what they measure.
    CHECK(std::abs(fa.coef_klog - fb.coef_klog) < 0.05);
    CHECK(std::abs(fa.coef_k2 - fb.coef_k2) < 0.05);

    // The gap itself shrinks like k^2: quartering k divides it by ~16.
    double f0 = free_energy_critical(g);
    double y1 = free_energy_closed(g, complete_integrals(0.08)) - f0;
    double y2 = free_energy_closed(g, complete_integrals(0.02)) - f0;
    CHECK(y1 < 0.0);
    CHECK(y2 < 0.0);
    CHECK(y1 / y2 == doctest::Approx(16.0).epsilon(0.05));

    CHECK_THROWS_AS(phase_expansion_fit(g, {0.1, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(
        phase_expansion_fit(g, {0.1, 0.2, 0.3, 0.1, 0.1, 0.1}),
        std::invalid_argument);
}
