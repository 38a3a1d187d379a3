#include "isolap/isograph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace isolap {

namespace {

using i64 = long long;
using i128 = __int128;

constexpr double kPi = 3.14159265358979323846;
// Offsets c_f are rationals r_f / kQ; all face logic is exact in int64.
constexpr i64 kQ = 1 << 20;

double norm_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a < 0) a += 2.0 * kPi;
    return a;
}

i64 cross(i64 ax, i64 ay, i64 bx, i64 by) { return ax * by - ay * bx; }

i64 floordiv(i64 a, i64 b) {
    if (b < 0) {
        a = -a;
        b = -b;
    }
    i64 m = a % b;
    if (m < 0) m += b;
    return (a - m) / b;
}

i64 ceildiv(i64 a, i64 b) {
    if (b < 0) {
        a = -a;
        b = -b;
    }
    return floordiv(a + b - 1, b);
}

double cross2(cplx a, cplx b) {
    return a.real() * b.imag() - a.imag() * b.real();
}

// Column Hermite form of the lattice spanned by columns u, w: returns
// u = (A, Bv), w = (0, C) with A, C > 0 and 0 <= Bv < C, same lattice.
struct Hnf {
    i64 A = 0, Bv = 0, C = 0;
    // Reduce (m, n) to its canonical representative in [0,A) x [0,C).
    std::pair<i64, i64> reduce(i64 m, i64 n) const {
        i64 s = floordiv(m, A);
        m -= s * A;
        n -= s * Bv;
        n -= floordiv(n, C) * C;
        return {m, n};
    }
};

Hnf hnf(i64 ux, i64 uy, i64 wx, i64 wy) {
    while (wx != 0) {
        i64 q = ux / wx;
        ux -= q * wx;
        uy -= q * wy;
        std::swap(ux, wx);
        std::swap(uy, wy);
    }
    if (ux < 0) {
        ux = -ux;
        uy = -uy;
    }
    if (wy < 0) wy = -wy;
    uy -= floordiv(uy, wy) * wy;
    return {ux, uy, wy};
}

struct FracCmp {
    // a1/b1 < a2/b2 with positive denominators.
    static bool less(i64 a1, i64 b1, i64 a2, i64 b2) {
        return (i128)a1 * b2 < (i128)a2 * b1;
    }
};

struct PendingEdge {
    std::vector<i64> kx, ky;  // canonical K of x; K of y in x's chart
    int fam_a, fam_b;
    double theta, alpha, beta;
    std::vector<i64> dx, dy;  // dual pair, same convention
};

}  // namespace

std::vector<double> PeriodicGraph::incident_angles(int v) const {
    std::vector<double> out;
    for (auto [e, at_x] : adj[v]) out.push_back(edges[e].theta_bar);
    return out;
}

PeriodicGraph build_periodic_graph(const std::vector<TrackSpec>& tracks_in,
                                   const BuildOptions& opt) {
    const int F = static_cast<int>(tracks_in.size());
    if (F < 2) throw graph_error("need at least two track families");

    PeriodicGraph g;
    g.tracks = tracks_in;
    for (auto& t : g.tracks) t.alpha_bar = norm_angle(t.alpha_bar);

    i64 sum_h = 0, sum_v = 0, total_cross = 0;
    for (int f = 0; f < F; ++f) {
        const auto& t = g.tracks[f];
        if (t.h == 0 && t.v == 0)
            throw graph_error("track " + std::to_string(f) + ": zero homology");
        if (std::gcd(std::abs(t.h), std::abs(t.v)) != 1)
            throw graph_error("track " + std::to_string(f) +
                              ": homology not primitive");
        sum_h += t.h;
        sum_v += t.v;
    }
    for (int i = 0; i < F; ++i)
        for (int j = i + 1; j < F; ++j) {
            i64 D = cross(g.tracks[i].h, g.tracks[i].v, g.tracks[j].h,
                          g.tracks[j].v);
            total_cross += std::abs(D);
            if (D == 0) continue;
            double s = std::sin(g.tracks[j].alpha_bar - g.tracks[i].alpha_bar);
            if ((D > 0) != (s > 0) || s == 0)
                throw graph_error("tracks " + std::to_string(i) + "," +
                                  std::to_string(j) +
                                  ": angle order inconsistent with homology "
                                  "crossing sign");
        }
    if (total_cross == 0)
        throw graph_error("no two track families cross");

    // Translations preserving face parity: (sum_h) dy - (sum_v) dx even.
    const int a_par = static_cast<int>(((sum_v % 2) + 2) % 2);
    const int b_par = static_cast<int>(((sum_h % 2) + 2) % 2);
    const int index = (a_par == 0 && b_par == 0) ? 1 : 2;
    if (index == 1) {
        g.basis1 = {1, 0};
        g.basis2 = {0, 1};
    } else if (a_par == 1 && b_par == 0) {
        g.basis1 = {2, 0};
        g.basis2 = {0, 1};
    } else if (a_par == 0 && b_par == 1) {
        g.basis1 = {1, 0};
        g.basis2 = {0, 2};
    } else {
        g.basis1 = {1, 1};
        g.basis2 = {-1, 1};
    }

    g.shift1.resize(F);
    g.shift2.resize(F);
    for (int f = 0; f < F; ++f) {
        g.shift1[f] = cross(g.tracks[f].h, g.tracks[f].v, g.basis1[0],
                            g.basis1[1]);
        g.shift2[f] = cross(g.tracks[f].h, g.tracks[f].v, g.basis2[0],
                            g.basis2[1]);
    }

    g.period_x = g.period_y = 0.0;
    for (int f = 0; f < F; ++f) {
        cplx e = std::polar(1.0, g.tracks[f].alpha_bar);
        g.period_x += static_cast<double>(g.shift1[f]) * e;
        g.period_y += static_cast<double>(g.shift2[f]) * e;
    }
    if (cross2(g.period_x, g.period_y) <= 1e-9)
        throw graph_error("arrangement is orientation-degenerate");

    // Pivot pair for canonical face representatives.
    int f1 = -1, f2 = -1;
    for (int i = 0; i < F && f1 < 0; ++i)
        for (int j = i + 1; j < F; ++j)
            if (cross(g.tracks[i].h, g.tracks[i].v, g.tracks[j].h,
                      g.tracks[j].v) != 0) {
                f1 = i;
                f2 = j;
                break;
            }
    const i64 R11 = g.shift1[f1], R12 = g.shift2[f1];
    const i64 R21 = g.shift1[f2], R22 = g.shift2[f2];
    const i64 detR = R11 * R22 - R12 * R21;

    // Returns the translation (s, t) taking K to its canonical chart.
    auto reduce_shift = [&](const std::vector<i64>& K) -> std::pair<i64, i64> {
        i64 s = floordiv(R22 * K[f1] - R12 * K[f2], detR);
        i64 t = floordiv(R11 * K[f2] - R21 * K[f1], detR);
        return {s, t};
    };
    auto apply_shift = [&](std::vector<i64> K, i64 s, i64 t) {
        for (int f = 0; f < F; ++f) K[f] -= s * g.shift1[f] + t * g.shift2[f];
        return K;
    };

    const int primal_bit = opt.primal_even ? 0 : 1;

    struct PairInfo {
        Hnf h;
        std::map<std::pair<i64, i64>, int> rep_to_edge;  // provisional ids
    };
    std::map<std::pair<int, int>, PairInfo> pair_info;

    std::vector<PendingEdge> pend;
    std::vector<i64> offs(F);

    bool ok = false;
    for (int salt = 0; salt < 32 && !ok; ++salt) {
        pend.clear();
        pair_info.clear();
        for (int f = 0; f < F; ++f)
            offs[f] = (618033 * (i64)(f + 1) + 41269 * (i64)(f + 1) * (f + 1) +
                       257003 * (i64)salt) %
                      kQ;

        // Parallel families must not produce coincident lines.
        bool generic = true;
        for (int i = 0; i < F && generic; ++i)
            for (int j = i + 1; j < F && generic; ++j) {
                const auto &ti = g.tracks[i], &tj = g.tracks[j];
                if (cross(ti.h, ti.v, tj.h, tj.v) != 0) continue;
                i64 r = (ti.h == tj.h && ti.v == tj.v) ? offs[i] - offs[j]
                                                       : offs[i] + offs[j];
                if (((r % kQ) + kQ) % kQ == 0) generic = false;
            }

        for (int i = 0; i < F && generic; ++i)
            for (int j = i + 1; j < F && generic; ++j) {
                const auto &ti = g.tracks[i], &tj = g.tracks[j];
                i64 D = cross(ti.h, ti.v, tj.h, tj.v);
                if (D == 0) continue;
                auto& pi = pair_info[{i, j}];
                pi.h = hnf(g.shift1[i], g.shift1[j], g.shift2[i], g.shift2[j]);

                for (i64 m = 0; m < pi.h.A && generic; ++m)
                    for (i64 n = 0; n < pi.h.C && generic; ++n) {
                        // Crossing point p times (D * kQ), exactly.
                        i64 PX = tj.h * (offs[i] + m * kQ) -
                                 ti.h * (offs[j] + n * kQ);
                        i64 PY = tj.v * (offs[i] + m * kQ) -
                                 ti.v * (offs[j] + n * kQ);
                        i64 DEN = D * kQ;
                        i64 sgn = DEN < 0 ? -1 : 1;

                        std::vector<i64> base(F, 0);
                        for (int f = 0; f < F; ++f) {
                            if (f == i || f == j) continue;
                            i64 VG = sgn * (-(i64)g.tracks[f].v * PX +
                                            (i64)g.tracks[f].h * PY -
                                            offs[f] * D);
                            if (VG % (sgn * DEN) == 0) {
                                generic = false;  // line through a crossing
                                break;
                            }
                            base[f] = ceildiv(VG, sgn * DEN);
                        }
                        if (!generic) break;

                        i64 par_base = m + n;
                        for (int f = 0; f < F; ++f) par_base += base[f];
                        // Diagonal {(0,0),(1,1)} has parity par_base mod 2.
                        bool main_diag_primal =
                            ((par_base % 2 + 2) % 2) == primal_bit;

                        auto corner = [&](int si, int sj) {
                            std::vector<i64> K = base;
                            K[i] = m + si;
                            K[j] = n + sj;
                            return K;
                        };

                        auto make_pair_edge = [&](int tail_j, bool primal)
                            -> std::array<std::vector<i64>, 2> {
                            // tail has si = 0; head = opposite corner.
                            return {corner(0, tail_j), corner(1, 1 - tail_j)};
                        };

                        int primal_tail_j = main_diag_primal ? 0 : 1;
                        auto [kx, ky] = make_pair_edge(primal_tail_j, true);
                        auto [dx, dy] = make_pair_edge(1 - primal_tail_j, false);

                        // Geometry: head - tail = e^{i a_i} + s_j e^{i a_j}.
                        double sj = primal_tail_j == 0 ? 1.0 : -1.0;
                        cplx mu = std::polar(1.0, ti.alpha_bar);
                        cplx nu = sj * std::polar(1.0, tj.alpha_bar);
                        double d = std::arg(nu / mu);
                        double alpha, theta;
                        if (d > 0) {
                            alpha = std::arg(mu);
                            theta = d / 2.0;
                        } else {
                            alpha = std::arg(nu);
                            theta = -d / 2.0;
                        }
                        if (!(theta > opt.eps && theta < kPi / 2 - opt.eps))
                            throw graph_error(
                                "tracks " + std::to_string(i) + "," +
                                std::to_string(j) +
                                ": rhombus half-angle outside margin");

                        PendingEdge e;
                        e.fam_a = i;
                        e.fam_b = j;
                        e.theta = theta;
                        e.alpha = norm_angle(alpha);
                        e.beta = norm_angle(alpha + 2.0 * theta);
                        e.kx = kx;
                        e.ky = ky;
                        e.dx = dx;
                        e.dy = dy;
                        pi.rep_to_edge[{m, n}] = static_cast<int>(pend.size());
                        pend.push_back(std::move(e));
                    }
            }
        ok = generic;
    }
    if (!ok) throw graph_error("could not find generic line offsets");

    if ((i64)pend.size() != index * total_cross)
        throw graph_error("internal: crossing count mismatch");

    // Canonicalize faces, then order vertices by K-vector for determinism.
    std::map<std::vector<i64>, int> prim, dual;
    struct RawEdge {
        int x, y, dm, dn, ux, uy, um, un, fa, fb;
        double theta, alpha, beta;
    };
    std::vector<RawEdge> raw(pend.size());
    auto canon = [&](const std::vector<i64>& K, std::map<std::vector<i64>, int>& tab,
                     int& id, i64& s, i64& t) {
        auto [rs, rt] = reduce_shift(K);
        auto kc = apply_shift(K, rs, rt);
        auto it = tab.find(kc);
        if (it == tab.end()) it = tab.emplace(kc, (int)tab.size()).first;
        id = it->second;
        s = rs;
        t = rt;
    };
    for (size_t e = 0; e < pend.size(); ++e) {
        auto& p = pend[e];
        i64 sx, tx, sy, ty, su, tu, sv, tv;
        int xid, yid, uid, vid;
        canon(p.kx, prim, xid, sx, tx);
        canon(apply_shift(p.ky, sx, tx), prim, yid, sy, ty);
        canon(p.dx, dual, uid, su, tu);
        canon(apply_shift(p.dy, su, tu), dual, vid, sv, tv);
        raw[e] = {xid,      yid,      (int)sy,  (int)ty, uid,
                  vid,      (int)sv,  (int)tv,  p.fam_a, p.fam_b,
                  p.theta,  p.alpha,  p.beta};
    }

    if ((i64)(prim.size() + dual.size()) != index * total_cross)
        throw graph_error("internal: face count mismatch");

    // prim/dual are keyed by K-vector, so map iteration order is canonical.
    std::vector<std::vector<i64>> prim_keys(prim.size()), dual_keys(dual.size());
    std::vector<int> prim_order(prim.size()), dual_order(dual.size());
    {
        int r = 0;
        for (auto& [k, v] : prim) {
            prim_order[v] = r;
            prim_keys[r] = k;
            ++r;
        }
        r = 0;
        for (auto& [k, v] : dual) {
            dual_order[v] = r;
            dual_keys[r] = k;
            ++r;
        }
    }
    auto embed = [&](const std::vector<i64>& K) {
        cplx z = 0.0;
        for (int f = 0; f < F; ++f)
            z += static_cast<double>(K[f]) *
                 std::polar(1.0, g.tracks[f].alpha_bar);
        return z;
    };
    g.vertex_K = prim_keys;
    for (auto& k : prim_keys) g.vertex_pos.push_back(embed(k));
    for (auto& k : dual_keys) g.dual_pos.push_back(embed(k));

    // Deterministic edge order, then adjacency.
    std::vector<int> edge_order(raw.size());
    {
        std::vector<int> idx(raw.size());
        for (size_t e = 0; e < raw.size(); ++e) idx[e] = (int)e;
        auto key = [&](int e) {
            const auto& r = raw[e];
            return std::make_tuple(prim_order[r.x], prim_order[r.y], r.dm,
                                   r.dn, r.fa, r.fb);
        };
        std::sort(idx.begin(), idx.end(),
                  [&](int u, int v) { return key(u) < key(v); });
        g.edges.resize(raw.size());
        for (size_t r = 0; r < idx.size(); ++r) {
            const auto& re = raw[idx[r]];
            RhombusEdge e;
            e.x = prim_order[re.x];
            e.y = prim_order[re.y];
            e.dm = re.dm;
            e.dn = re.dn;
            e.theta_bar = re.theta;
            e.alpha_bar = re.alpha;
            e.beta_bar = re.beta;
            e.dual_x = dual_order[re.ux];
            e.dual_y = dual_order[re.uy];
            e.ddm = re.um;
            e.ddn = re.un;
            e.family_a = re.fa;
            e.family_b = re.fb;
            g.edges[r] = e;
            edge_order[idx[r]] = (int)r;
        }
    }
    g.adj.resize(g.vertex_pos.size());
    for (size_t e = 0; e < g.edges.size(); ++e) {
        g.adj[g.edges[e].x].push_back({(int)e, true});
        g.adj[g.edges[e].y].push_back({(int)e, false});
    }

    // Geometric post-checks: unit rhombus sides and full angle sums.
    for (const auto& e : g.edges) {
        cplx span = g.vertex_pos[e.y] + (double)e.dm * g.period_x +
                    (double)e.dn * g.period_y - g.vertex_pos[e.x];
        cplx want = std::polar(1.0, e.alpha_bar) + std::polar(1.0, e.beta_bar);
        if (std::abs(span - want) > 1e-9)
            throw graph_error("internal: rhombus embedding mismatch");
    }
    for (int v = 0; v < g.num_vertices(); ++v) {
        double s = 0;
        for (auto [e, at_x] : g.adj[v]) s += g.edges[e].theta_bar;
        if (std::abs(s - kPi) > 1e-9)
            throw graph_error("internal: half-angles around a vertex do not "
                              "sum to pi");
    }

    // Track curves. Family f: q copies of d_f reach the translation lattice,
    // and its lines fall into g = gcd(shift1, shift2) classes.
    i64 det_b = cross(g.basis1[0], g.basis1[1], g.basis2[0], g.basis2[1]);
    for (int f = 0; f < F; ++f) {
        const auto& tf = g.tracks[f];
        bool in_lattice = ((sum_h * tf.v - sum_v * tf.h) % 2) == 0;
        i64 qf = in_lattice ? 1 : 2;
        i64 gf = std::gcd(std::abs(g.shift1[f]), std::abs(g.shift2[f]));
        if (qf * gf != index)
            throw graph_error("internal: track curve count mismatch");
        i64 hx = qf * tf.h, hy = qf * tf.v;
        i64 hT = cross(hx, hy, g.basis2[0], g.basis2[1]) / det_b;
        i64 vT = cross(g.basis1[0], g.basis1[1], hx, hy) / det_b;

        for (i64 m0 = 0; m0 < gf; ++m0) {
            TrainTrack tt;
            tt.family = f;
            tt.angle_bar = tf.alpha_bar;
            tt.h = (int)hT;
            tt.v = (int)vT;
            // Crossings along line (f, m0), ordered by s = <p, d_f>, one
            // curve period s in [0, L) with L = q |d_f|^2.
            i64 L = qf * (tf.h * (i64)tf.h + tf.v * (i64)tf.v);
            std::vector<std::tuple<i64, i64, int>> hits;  // (s_num, s_den, edge)
            for (int gfam = 0; gfam < F; ++gfam) {
                const auto& tg = g.tracks[gfam];
                i64 D = cross(tf.h, tf.v, tg.h, tg.v);
                if (D == 0) continue;
                int i = std::min(f, gfam), j = std::max(f, gfam);
                auto& pi = pair_info[{i, j}];

                // s(n) is affine in the g-line index n; find the n-window
                // approximately, then filter exactly.
                auto s_of = [&](i64 n) -> std::pair<i64, i64> {
                    i64 mi = (f < gfam) ? m0 : n;
                    i64 ni = (f < gfam) ? n : m0;
                    i64 Dij = (f < gfam) ? D : -D;
                    const auto &tti = g.tracks[i], &ttj = g.tracks[j];
                    i64 PX = ttj.h * (offs[i] + mi * kQ) -
                             tti.h * (offs[j] + ni * kQ);
                    i64 PY = ttj.v * (offs[i] + mi * kQ) -
                             tti.v * (offs[j] + ni * kQ);
                    i64 num = tf.h * PX + tf.v * PY;
                    i64 den = Dij * kQ;
                    if (den < 0) {
                        num = -num;
                        den = -den;
                    }
                    return {num, den};
                };
                auto [n0, d0] = s_of(0);
                auto [n1, d1] = s_of(1);
                double s0 = (double)n0 / (double)d0;
                double slope = (double)n1 / (double)d1 - s0;
                i64 lo = (i64)std::floor(std::min(-s0 / slope,
                                                  ((double)L - s0) / slope)) - 2;
                i64 hi = (i64)std::ceil(std::max(-s0 / slope,
                                                 ((double)L - s0) / slope)) + 2;
                int found = 0;
                for (i64 n = lo; n <= hi; ++n) {
                    auto [num, den] = s_of(n);
                    if (num < 0 || !FracCmp::less(num, den, L, 1)) continue;
                    i64 mm = (f < gfam) ? m0 : n;
                    i64 nn = (f < gfam) ? n : m0;
                    auto rep = pi.h.reduce(mm, nn);
                    hits.push_back({num, den,
                                    edge_order[pi.rep_to_edge.at(rep)]});
                    ++found;
                }
                if (found != qf * std::abs(D))
                    throw graph_error("internal: chain crossing count");
            }
            std::sort(hits.begin(), hits.end(), [](const auto& A, const auto& B) {
                return FracCmp::less(std::get<0>(A), std::get<1>(A),
                                     std::get<0>(B), std::get<1>(B));
            });
            for (auto& [num, den, e] : hits) tt.chain.push_back(e);
            g.track_curves.push_back(std::move(tt));
        }
    }

    i64 sum_v_t = 0, sum_h_t = 0;
    for (const auto& t : g.track_curves) {
        sum_v_t += std::abs(t.v);
        sum_h_t += std::abs(t.h);
    }
    if (sum_v_t % 2 || sum_h_t % 2)
        throw graph_error("internal: odd crossing count for a basic cycle");
    g.px = (int)(sum_v_t / 2);
    g.py = (int)(sum_h_t / 2);

    std::vector<double> dirs;
    for (const auto& t : g.tracks) dirs.push_back(t.alpha_bar);
    std::sort(dirs.begin(), dirs.end());
    dirs.erase(std::unique(dirs.begin(), dirs.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               dirs.end());
    g.directions = dirs;
    return g;
}

MinimalPath PeriodicGraph::minimal_path(int i, int mi, int ni, int j, int mj,
                                        int nj) const {
    if (i < 0 || i >= num_vertices() || j < 0 || j >= num_vertices())
        throw graph_error("minimal_path: vertex class out of range");
    const int F = static_cast<int>(tracks.size());
    MinimalPath out;
    std::vector<std::pair<double, int>> steps;
    for (int f = 0; f < F; ++f) {
        long long d = (vertex_K[j][f] + (long long)mj * shift1[f] +
                       (long long)nj * shift2[f]) -
                      (vertex_K[i][f] + (long long)mi * shift1[f] +
                       (long long)ni * shift2[f]);
        if (d == 0) continue;
        double ang = tracks[f].alpha_bar;
        if (d < 0) {
            ang = norm_angle(ang + kPi);
            d = -d;
        }
        steps.push_back({ang, (int)d});
        out.length += (int)d;
    }
    std::sort(steps.begin(), steps.end());
    // Merge directions shared by distinct families.
    for (auto& s : steps) {
        if (!out.steps.empty() &&
            std::abs(out.steps.back().first - s.first) < 1e-12)
            out.steps.back().second += s.second;
        else
            out.steps.push_back(s);
    }
    return out;
}

std::vector<std::pair<long long, long long>> PeriodicGraph::newton_polygon()
    const {
    struct Half {
        double ang;
        long long h, v;
    };
    std::vector<Half> hs;
    for (const auto& t : track_curves) {
        cplx dir = (double)t.h * period_x + (double)t.v * period_y;
        hs.push_back({norm_angle(std::arg(dir)), t.h, t.v});
        hs.push_back({norm_angle(std::arg(-dir)), -t.h, -t.v});
    }
    std::sort(hs.begin(), hs.end(),
              [](const Half& a, const Half& b) { return a.ang < b.ang; });
    std::vector<std::pair<long long, long long>> verts;
    long long cx = 0, cy = 0;
    for (size_t s = 0; s < hs.size(); ++s) {
        if (s > 0 && std::abs(hs[s].ang - hs[s - 1].ang) < 1e-12) {
            cx += hs[s].h;
            cy += hs[s].v;
            verts.back() = {cx, cy};
            continue;
        }
        cx += hs[s].h;
        cy += hs[s].v;
        verts.push_back({cx, cy});
    }
    if (verts.back() != std::make_pair(0LL, 0LL))
        throw graph_error("internal: Newton polygon does not close");
    verts.pop_back();
    verts.insert(verts.begin(), {0, 0});
    return verts;
}

PeriodicGraph preset(const std::string& name) {
    auto deg = [](double d) { return d * kPi / 180.0; };
    if (name == "square") {
        auto g = build_periodic_graph(
            {{1, 0, 0.0}, {0, 1, kPi / 2}});
        if (g.num_vertices() != 1) throw graph_error("internal: square preset");
        return g;
    }
    if (name == "triangular" || name == "hexagonal") {
        std::vector<TrackSpec> tr = {{1, 0, deg(90)},
                                     {1, 1, deg(150)},
                                     {0, 1, deg(210)}};
        int want = (name == "triangular") ? 1 : 2;
        BuildOptions opt;
        auto g = build_periodic_graph(tr, opt);
        if (g.num_vertices() != want) {
            opt.primal_even = false;
            g = build_periodic_graph(tr, opt);
        }
        if (g.num_vertices() != want)
            throw graph_error("internal: triangular/hexagonal preset");
        return g;
    }
    if (name == "paper-fig4") {
        auto g = build_periodic_graph({{1, 0, deg(100)},
                                       {2, 1, deg(125)},
                                       {1, 2, deg(150)},
                                       {0, 1, deg(175)}});
        if (g.num_vertices() != 5)
            throw graph_error("internal: paper-fig4 preset");
        return g;
    }
    throw graph_error("unknown preset '" + name + "'");
}

int Patch::find(int cls_id, int m, int n) const {
    auto it = index.find({cls_id, m, n});
    return it == index.end() ? -1 : it->second;
}

std::vector<double> Patch::incident_angles(int v) const {
    std::vector<double> out;
    for (int e : adj[v]) out.push_back(edges[e].theta_bar);
    return out;
}

Patch make_patch(const PeriodicGraph& g, int radius) {
    Patch p;
    p.base = &g;
    for (int m = -radius; m <= radius; ++m)
        for (int n = -radius; n <= radius; ++n)
            for (int i = 0; i < g.num_vertices(); ++i) {
                int id = static_cast<int>(p.pos.size());
                p.pos.push_back(g.vertex_pos[i] + (double)m * g.period_x +
                                (double)n * g.period_y);
                p.cls.push_back(i);
                p.full_degree.push_back(g.degree(i));
                p.index[{i, m, n}] = id;
            }
    p.adj.resize(p.pos.size());
    for (int m = -radius; m <= radius; ++m)
        for (int n = -radius; n <= radius; ++n)
            for (const auto& e : g.edges) {
                int tm = m + e.dm, tn = n + e.dn;
                if (std::abs(tm) > radius || std::abs(tn) > radius) continue;
                int a = p.find(e.x, m, n);
                int b = p.find(e.y, tm, tn);
                int id = static_cast<int>(p.edges.size());
                p.edges.push_back({a, b, e.theta_bar});
                p.adj[a].push_back(id);
                p.adj[b].push_back(id);
            }
    return p;
}

namespace {
void drop_edge(Patch& p, int e) {
    for (int v : {p.edges[e].a, p.edges[e].b}) {
        auto& l = p.adj[v];
        l.erase(std::find(l.begin(), l.end(), e));
    }
    p.edges[e].a = p.edges[e].b = -1;
}
int add_edge(Patch& p, int a, int b, double theta) {
    int id = static_cast<int>(p.edges.size());
    p.edges.push_back({a, b, theta});
    p.adj[a].push_back(id);
    p.adj[b].push_back(id);
    return id;
}
}  // namespace

Patch star_to_triangle(const Patch& p0, int center) {
    if (center < 0 || center >= (int)p0.pos.size() ||
        p0.cls[center] == Patch::kRemoved || p0.adj[center].size() != 3)
        throw graph_error("star_to_triangle: site is not a degree-3 vertex");
    Patch p = p0;
    std::array<int, 3> es;
    std::array<int, 3> nb;
    double sum = 0;
    for (int s = 0; s < 3; ++s) {
        es[s] = p.adj[center][s];
        nb[s] = p.other(es[s], center);
        sum += p.edges[es[s]].theta_bar;
    }
    if (nb[0] == nb[1] || nb[1] == nb[2] || nb[0] == nb[2])
        throw graph_error("star_to_triangle: repeated neighbor");
    if (std::abs(sum - kPi) > 1e-9)
        throw graph_error("star_to_triangle: half-angles do not sum to pi");
    std::array<double, 3> th = {p.edges[es[0]].theta_bar,
                                p.edges[es[1]].theta_bar,
                                p.edges[es[2]].theta_bar};
    for (int e : {es[0], es[1], es[2]}) drop_edge(p, e);
    p.cls[center] = Patch::kRemoved;
    for (int s = 0; s < 3; ++s) {
        // Edge opposite neighbor s gets the complementary half-angle.
        add_edge(p, nb[(s + 1) % 3], nb[(s + 2) % 3], kPi / 2 - th[s]);
        p.cls[nb[s]] = Patch::kFree;
        p.full_degree[nb[s]] += 1;
    }
    return p;
}

Patch triangle_to_star(const Patch& p0, int a, int b, int c) {
    auto edge_between = [&](int u, int v) {
        for (int e : p0.adj[u])
            if (p0.other(e, u) == v) return e;
        return -1;
    };
    int eab = edge_between(a, b), ebc = edge_between(b, c),
        eca = edge_between(c, a);
    if (eab < 0 || ebc < 0 || eca < 0)
        throw graph_error("triangle_to_star: vertices do not form a triangle");
    double sum = p0.edges[eab].theta_bar + p0.edges[ebc].theta_bar +
                 p0.edges[eca].theta_bar;
    if (std::abs(sum - kPi / 2) > 1e-9)
        throw graph_error(
            "triangle_to_star: half-angles do not sum to pi/2");
    Patch p = p0;
    double tab = p.edges[eab].theta_bar, tbc = p.edges[ebc].theta_bar,
           tca = p.edges[eca].theta_bar;
    for (int e : {eab, ebc, eca}) drop_edge(p, e);
    int center = static_cast<int>(p.pos.size());
    p.pos.push_back((p.pos[a] + p.pos[b] + p.pos[c]) / 3.0);
    p.cls.push_back(Patch::kFree);
    p.full_degree.push_back(3);
    p.adj.emplace_back();
    add_edge(p, center, c, kPi / 2 - tab);
    add_edge(p, center, a, kPi / 2 - tbc);
    add_edge(p, center, b, kPi / 2 - tca);
    for (int v : {a, b, c}) {
        p.cls[v] = Patch::kFree;
        p.full_degree[v] -= 1;
    }
    return p;
}

}  // namespace isolap
