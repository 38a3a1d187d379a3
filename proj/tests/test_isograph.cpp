// Train-track construction checks: presets against hand-counted domains,
// minimal paths against breadth-first search on explicit patches, and the
// published-arrangement domain against its known Newton polygon.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>

#include "isolap/isograph.hpp"
#include "isolap/rng.hpp"

using namespace isolap;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Explicit diamond graph on a block of translates: nodes are primal and dual
// vertices, edges are rhombus sides (all of unit length). Used as the oracle
// for minimal_path, whose length counts unit steps.
struct Diamond {
    const PeriodicGraph& g;
    int radius;
    std::map<std::array<int, 4>, int> ids;  // (is_dual, class, m, n)
    std::vector<std::array<int, 4>> keys;
    std::vector<std::vector<int>> adj;

    explicit Diamond(const PeriodicGraph& gg, int r) : g(gg), radius(r) {
        // Recover, per edge, the translate placing the dual pair in the same
        // frame as the primal pair: both pairs share the rhombus center.
        std::vector<std::array<int, 2>> doff(g.edges.size());
        for (size_t e = 0; e < g.edges.size(); ++e) {
            const auto& ed = g.edges[e];
            cplx rhs = g.vertex_pos[ed.x] + g.vertex_pos[ed.y] +
                       (double)ed.dm * g.period_x + (double)ed.dn * g.period_y -
                       g.dual_pos[ed.dual_x] - g.dual_pos[ed.dual_y] -
                       (double)ed.ddm * g.period_x - (double)ed.ddn * g.period_y;
            double det = g.period_x.real() * g.period_y.imag() -
                         g.period_x.imag() * g.period_y.real();
            double am2 = (rhs.real() * g.period_y.imag() -
                          rhs.imag() * g.period_y.real()) / det;
            double an2 = (g.period_x.real() * rhs.imag() -
                          g.period_x.imag() * rhs.real()) / det;
            int am = (int)llround(am2 / 2), an = (int)llround(an2 / 2);
            REQUIRE(std::abs(am2 - 2.0 * am) < 1e-9);
            REQUIRE(std::abs(an2 - 2.0 * an) < 1e-9);
            doff[e] = {am, an};
        }
        auto id_of = [&](int dual, int c, int m, int n) {
            if (std::abs(m) > radius + 2 || std::abs(n) > radius + 2) return -1;
            auto [it, fresh] = ids.try_emplace({dual, c, m, n}, (int)ids.size());
            if (fresh) {
                adj.emplace_back();
                keys.push_back(it->first);
            }
            return it->second;
        };
        auto link = [&](int a, int b) {
            if (a < 0 || b < 0) return;
            adj[a].push_back(b);
            adj[b].push_back(a);
        };
        for (int m = -radius - 2; m <= radius + 2; ++m)
            for (int n = -radius - 2; n <= radius + 2; ++n)
                for (size_t e = 0; e < g.edges.size(); ++e) {
                    const auto& ed = g.edges[e];
                    auto [am, an] = doff[e];
                    int A = id_of(0, ed.x, m, n);
                    int B = id_of(0, ed.y, m + ed.dm, n + ed.dn);
                    int U = id_of(1, ed.dual_x, m + am, n + an);
                    int V = id_of(1, ed.dual_y, m + am + ed.ddm, n + an + ed.ddn);
                    link(A, U);
                    link(A, V);
                    link(B, U);
                    link(B, V);
                }
    }

    cplx position(const std::array<int, 4>& key) const {
        cplx base = key[0] ? g.dual_pos[key[1]] : g.vertex_pos[key[1]];
        return base + (double)key[2] * g.period_x + (double)key[3] * g.period_y;
    }

    int distance(int cx, int mx, int nx, int cy, int my, int ny) {
        auto a = ids.find({0, cx, mx, nx}), b = ids.find({0, cy, my, ny});
        REQUIRE(a != ids.end());
        REQUIRE(b != ids.end());
        std::vector<int> d(adj.size(), -1);
        std::queue<int> q;
        d[a->second] = 0;
        q.push(a->second);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int u : adj[v])
                if (d[u] < 0) {
                    d[u] = d[v] + 1;
                    q.push(u);
                }
        }
        return d[b->second];
    }
};

// Width of the smallest closed sector containing all given directions.
double sector_width(std::vector<double> ang) {
    if (ang.size() <= 1) return 0.0;
    std::sort(ang.begin(), ang.end());
    double max_gap = 2.0 * kPi + ang.front() - ang.back();
    for (size_t i = 1; i < ang.size(); ++i)
        max_gap = std::max(max_gap, ang[i] - ang[i - 1]);
    return 2.0 * kPi - max_gap;
}

// Centered doubled vertices, sorted: a translation-invariant polygon key.
std::multiset<std::pair<long long, long long>> polygon_key(
    const std::vector<std::pair<long long, long long>>& v) {
    long long sx = 0, sy = 0;
    for (auto& [x, y] : v) {
        sx += x;
        sy += y;
    }
    std::multiset<std::pair<long long, long long>> out;
    long long n = static_cast<long long>(v.size());
    for (auto& [x, y] : v) out.insert({2 * n * x - 2 * sx, 2 * n * y - 2 * sy});
    return out;
}

}  // namespace

TEST_CASE("square preset is the one-vertex two-edge domain") {
    auto g = preset("square");
    REQUIRE(g.num_vertices() == 1);
    REQUIRE(g.edges.size() == 2);
    CHECK(g.degree(0) == 4);
    for (const auto& e : g.edges) {
        CHECK(e.x == 0);
        CHECK(e.y == 0);
        CHECK(e.theta_bar == doctest::Approx(kPi / 4).epsilon(1e-12));
        CHECK(std::abs(std::remainder(
                  e.beta_bar - e.alpha_bar - 2 * e.theta_bar, 2 * kPi)) <
              1e-12);
    }
    // The two self-loop translation vectors must generate the full lattice.
    long long det = (long long)g.edges[0].dm * g.edges[1].dn -
                    (long long)g.edges[0].dn * g.edges[1].dm;
    CHECK(std::abs(det) == 1);
    CHECK(g.px == 1);
    CHECK(g.py == 1);
    CHECK(g.track_curves.size() == 2);
}

TEST_CASE("triangular and hexagonal presets") {
    auto tri = preset("triangular");
    REQUIRE(tri.num_vertices() == 1);
    CHECK(tri.edges.size() == 3);
    CHECK(tri.degree(0) == 6);
    for (const auto& e : tri.edges)
        CHECK(e.theta_bar == doctest::Approx(kPi / 6).epsilon(1e-12));

    auto hex = preset("hexagonal");
    REQUIRE(hex.num_vertices() == 2);
    CHECK(hex.edges.size() == 3);
    CHECK(hex.degree(0) == 3);
    CHECK(hex.degree(1) == 3);
    for (const auto& e : hex.edges) {
        CHECK(e.theta_bar == doctest::Approx(kPi / 3).epsilon(1e-12));
        CHECK(e.x != e.y);
    }
    CHECK_THROWS_AS(preset("kagome"), graph_error);
}

TEST_CASE("published four-track arrangement") {
    auto g = preset("paper-fig4");
    CHECK(g.num_vertices() == 5);
    CHECK(g.edges.size() == 10);
    CHECK(g.track_curves.size() == 4);
    for (int v = 0; v < g.num_vertices(); ++v) {
        double s = 0;
        for (double t : g.incident_angles(v)) s += t;
        CHECK(s == doctest::Approx(kPi).epsilon(1e-12));
    }
    // Octagonal Newton polygon of this arrangement.
    std::vector<std::pair<long long, long long>> want = {
        {-2, -2}, {-1, -2}, {1, -1}, {2, 1},
        {2, 2},   {1, 2},   {-1, 1}, {-2, -1}};
    CHECK(polygon_key(g.newton_polygon()) == polygon_key(want));
}

TEST_CASE("construction rejects malformed arrangements") {
    CHECK_THROWS_AS(build_periodic_graph({{2, 0, 0.0}, {0, 1, kPi / 2}}),
                    graph_error);
    CHECK_THROWS_AS(build_periodic_graph({{1, 0, kPi / 2}, {0, 1, 0.0}}),
                    graph_error);
    CHECK_THROWS_AS(build_periodic_graph({{1, 0, 0.0}, {0, 1, 0.02}}),
                    graph_error);
    CHECK_THROWS_AS(build_periodic_graph({{1, 0, 0.0}}), graph_error);
    CHECK_THROWS_AS(
        build_periodic_graph({{1, 0, 0.0}, {1, 0, kPi / 4}}),  // never cross
        graph_error);
}

TEST_CASE("rhombus embedding consistency") {
    for (const char* name : {"square", "triangular", "hexagonal", "paper-fig4"}) {
        auto g = preset(name);
        for (const auto& e : g.edges) {
            cplx span = g.vertex_pos[e.y] + (double)e.dm * g.period_x +
                        (double)e.dn * g.period_y - g.vertex_pos[e.x];
            cplx want = std::polar(1.0, e.alpha_bar) +
                        std::polar(1.0, e.beta_bar);
            CHECK(std::abs(span - want) < 1e-12);
            CHECK(std::abs(std::abs(want) - 2.0 * std::cos(e.theta_bar)) <
                  1e-12);
        }
        // Each edge is crossed by exactly two track curves.
        std::map<int, int> edge_hits;
        for (const auto& t : g.track_curves)
            for (int e : t.chain) edge_hits[e]++;
        REQUIRE(edge_hits.size() == g.edges.size());
        for (auto& [e, c] : edge_hits) CHECK(c == 2);
    }
}

TEST_CASE("minimal paths match breadth-first search") {
    Rng rng(101);
    for (const char* name : {"square", "paper-fig4", "hexagonal"}) {
        auto g = preset(name);
        Diamond dia(g, 8);
        // Every rhombus side really is a unit step in the embedding.
        double worst = 0;
        for (size_t v = 0; v < dia.adj.size(); ++v)
            for (int u : dia.adj[v])
                worst = std::max(worst,
                                 std::abs(std::abs(dia.position(dia.keys[v]) -
                                                   dia.position(dia.keys[u])) -
                                          1.0));
        CHECK(worst < 1e-9);
        int checks = 0;
        while (checks < 40) {
            int i = (int)rng.below(g.num_vertices());
            int j = (int)rng.below(g.num_vertices());
            int mi = (int)rng.below(5) - 2, ni = (int)rng.below(5) - 2;
            int mj = (int)rng.below(5) - 2, nj = (int)rng.below(5) - 2;
            auto mp = g.minimal_path(i, mi, ni, j, mj, nj);
            int dist = dia.distance(i, mi, ni, j, mj, nj);
            REQUIRE(dist >= 0);
            // The oracle walks the diamond graph; endpoints sit well inside
            // the enumerated block, so no geodesic is clipped.
            CHECK(mp.length == dist);
            CHECK(mp.length % 2 == 0);

            // Steps reconstruct the displacement and fit in a half-plane.
            cplx want = (g.vertex_pos[j] + (double)mj * g.period_x +
                         (double)nj * g.period_y) -
                        (g.vertex_pos[i] + (double)mi * g.period_x +
                         (double)ni * g.period_y);
            cplx got = 0.0;
            std::vector<double> dirs;
            for (auto [ang, cnt] : mp.steps) {
                got += (double)cnt * std::polar(1.0, ang);
                dirs.push_back(ang);
            }
            CHECK(std::abs(got - want) < 1e-9);
            CHECK(sector_width(dirs) <= kPi + 1e-12);
            ++checks;
        }
        // Basic cycles: length equals the doubled crossing half-counts.
        CHECK(g.minimal_path(0, 0, 0, 0, 1, 0).length == 2 * g.px);
        CHECK(g.minimal_path(0, 0, 0, 0, 0, 1).length == 2 * g.py);
        CHECK(g.minimal_path(0, 0, 0, 0, 0, 0).length == 0);
    }
}

TEST_CASE("patch structure and interiors") {
    auto g = preset("square");
    Patch p = make_patch(g, 2);
    CHECK(p.pos.size() == 25);
    int center = p.find(0, 0, 0);
    REQUIRE(center >= 0);
    CHECK(p.interior(center));
    CHECK(p.adj[center].size() == 4);
    int corner = p.find(0, 2, 2);
    REQUIRE(corner >= 0);
    CHECK(!p.interior(corner));
    CHECK(p.find(0, 3, 0) == -1);
}

TEST_CASE("star-triangle move and its inverse") {
    auto g = preset("hexagonal");
    Patch p = make_patch(g, 3);
    int center = p.find(0, 0, 0);
    REQUIRE(center >= 0);
    REQUIRE(p.adj[center].size() == 3);

    std::array<int, 3> nb;
    for (int s = 0; s < 3; ++s) nb[s] = p.other(p.adj[center][s], center);

    Patch q = star_to_triangle(p, center);
    CHECK(!q.active(center));
    for (int v : nb) {
        CHECK(q.cls[v] == Patch::kFree);
        CHECK(q.adj[v].size() == 4);  // interior: lost 1 star, gained 2
        CHECK(q.full_degree[v] == 4);
    }
    // New triangle edges carry the complementary half-angles.
    double sum = 0;
    for (int e : q.adj[nb[0]]) {
        int u = q.other(e, nb[0]);
        if (u == nb[1] || u == nb[2]) {
            CHECK(q.edges[e].theta_bar ==
                  doctest::Approx(kPi / 2 - kPi / 3).epsilon(1e-12));
            sum += q.edges[e].theta_bar;
        }
    }
    CHECK(sum == doctest::Approx(2 * (kPi / 6)).epsilon(1e-12));

    Patch r = triangle_to_star(q, nb[0], nb[1], nb[2]);
    int nc = (int)r.pos.size() - 1;  // the recreated star center
    CHECK(r.adj[nc].size() == 3);
    for (int e : r.adj[nc])
        CHECK(r.edges[e].theta_bar == doctest::Approx(kPi / 3).epsilon(1e-12));
    for (int v : nb) CHECK(r.adj[v].size() == 3);

    // Same decorated graph up to relabeling: compare angle multisets.
    auto sig = [](const Patch& pp) {
        std::multiset<long long> s;
        for (const auto& e : pp.edges)
            if (e.a >= 0) s.insert(llround(e.theta_bar * 1e12));
        return s;
    };
    CHECK(sig(r) == sig(p));

    // Degree-4 vertices are not stars.
    auto sq = make_patch(preset("square"), 2);
    CHECK_THROWS_AS(star_to_triangle(sq, sq.find(0, 0, 0)), graph_error);
    // Non-triangles cannot be opened into stars.
    CHECK_THROWS_AS(
        triangle_to_star(sq, sq.find(0, 0, 0), sq.find(0, 1, 0),
                         sq.find(0, 0, 1)),
        graph_error);
}

TEST_CASE("construction is deterministic") {
    auto g1 = preset("paper-fig4");
    auto g2 = preset("paper-fig4");
    REQUIRE(g1.edges.size() == g2.edges.size());
    CHECK(g1.vertex_K == g2.vertex_K);
    for (size_t e = 0; e < g1.edges.size(); ++e) {
        CHECK(g1.edges[e].x == g2.edges[e].x);
        CHECK(g1.edges[e].y == g2.edges[e].y);
        CHECK(g1.edges[e].dm == g2.edges[e].dm);
        CHECK(g1.edges[e].dn == g2.edges[e].dn);
        CHECK(g1.edges[e].theta_bar == g2.edges[e].theta_bar);
    }
}
