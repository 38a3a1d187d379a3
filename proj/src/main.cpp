// isolap: command-line front end for the one-parameter family of massive
// Laplacians on isoradial graphs. Subcommands cover Green functions and
// their asymptotics, rooted-forest sampling and marginals, spectral
// curves and amoebas, free energy, and the star-triangle checks.
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "isolap/asymptotics.hpp"
#include "isolap/elliptic.hpp"
#include "isolap/expfun.hpp"
#include "isolap/forest.hpp"
#include "isolap/green.hpp"
#include "isolap/io.hpp"
#include "isolap/isograph.hpp"
#include "isolap/laplacian.hpp"
#include "isolap/rng.hpp"
#include "isolap/spectral.hpp"
#include "isolap/zinv.hpp"

namespace {

using namespace isolap;
namespace fs = std::filesystem;

constexpr double kPi = 3.14159265358979323846;

struct Options {
    std::string preset_name;
    std::string spec_path;
    double k = 0.5;
    double k2 = -1.0;  // set when --k2 is used; overrides k
    std::string out = ".";
    std::uint64_t seed = 1;

    std::vector<std::string> pairs;
    std::string method = "local";
    std::string torus = "8x8";
    int samples = 1;
    int grid = 200;
    int points = 8;
    double kmin = 0.02;
    double kmax = 0.2;
    int trials = 200;
};

double resolve_modulus(const Options& opt) {
    double k = opt.k;
    if (opt.k2 >= 0.0) {
        if (opt.k2 <= 0.0 || opt.k2 >= 1.0)
            throw std::invalid_argument("k^2 must lie in (0, 1)");
        k = std::sqrt(opt.k2);
    }
    if (!(k > 0.0 && k < 1.0))
        throw std::invalid_argument("modulus k must lie in (0, 1)");
    return k;
}

PeriodicGraph resolve_graph(const Options& opt) {
    if (!opt.spec_path.empty()) return load_graph_spec(opt.spec_path);
    return preset(opt.preset_name.empty() ? "square" : opt.preset_name);
}

fs::path resolve_out(const Options& opt) {
    fs::path dir(opt.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::invalid_argument("output directory \"" + opt.out +
                                    "\" is not writable");
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out)
        throw std::invalid_argument("cannot write \"" + path.string() + "\"");
}

// Site syntax: "(m,n)" for vertex class 0 or "(c,m,n)"; a pair is two
// sites joined by a colon.
std::array<int, 3> parse_site(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!std::isspace((unsigned char)c)) t += c;
    if (t.size() < 2 || t.front() != '(' || t.back() != ')')
        throw std::invalid_argument("site \"" + s +
                                    "\" is not of the form (m,n) or (c,m,n)");
    std::vector<int> nums;
    std::stringstream ss(t.substr(1, t.size() - 2));
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        try {
            size_t used = 0;
            nums.push_back(std::stoi(piece, &used));
            if (used != piece.size()) throw std::invalid_argument(piece);
        } catch (const std::exception&) {
            throw std::invalid_argument("site \"" + s +
                                        "\": \"" + piece +
                                        "\" is not an integer");
        }
    }
    if (nums.size() == 2) return {0, nums[0], nums[1]};
    if (nums.size() == 3) return {nums[0], nums[1], nums[2]};
    throw std::invalid_argument("site \"" + s +
                                "\" needs two or three coordinates");
}

struct PairSpec {
    std::array<int, 3> x, y;
    std::string label_x, label_y;
};

PairSpec parse_pair(const std::string& s) {
    size_t colon = s.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("pair \"" + s +
                                    "\" must be site:site");
    PairSpec p;
    p.x = parse_site(s.substr(0, colon));
    p.y = parse_site(s.substr(colon + 1));
    auto label = [](const std::array<int, 3>& a) {
        return "(" + std::to_string(a[0]) + "," + std::to_string(a[1]) + "," +
               std::to_string(a[2]) + ")";
    };
    p.label_x = label(p.x);
    p.label_y = label(p.y);
    return p;
}

std::pair<int, int> parse_torus(const std::string& s) {
    size_t x = s.find('x');
    if (x == std::string::npos)
        throw std::invalid_argument("torus size \"" + s +
                                    "\" must be PxQ, e.g. 8x8");
    try {
        int p = std::stoi(s.substr(0, x));
        int q = std::stoi(s.substr(x + 1));
        return {p, q};
    } catch (const std::exception&) {
        throw std::invalid_argument("torus size \"" + s +
                                    "\" must be PxQ, e.g. 8x8");
    }
}

int run_green(const Options& opt) {
    double k = resolve_modulus(opt);
    PeriodicGraph g = resolve_graph(opt);
    EllipticContext ctx = complete_integrals(k);
    fs::path dir = resolve_out(opt);

    std::vector<std::string> methods;
    if (opt.method == "all")
        methods = {"local", "fourier", "solve"};
    else if (opt.method == "local" || opt.method == "fourier" ||
             opt.method == "solve")
        methods = {opt.method};
    else
        throw std::invalid_argument(
            "method must be local, fourier, solve, or all");

    std::string csv = csv_row(
        {"x", "y", "distance", "method", "value", "imag_residual", "nodes"});
    for (const std::string& spec : opt.pairs) {
        PairSpec p = parse_pair(spec);
        auto [ci, mi, ni] = p.x;
        auto [cj, mj, nj] = p.y;
        int dist = g.minimal_path(ci, mi, ni, cj, mj, nj).length;
        for (const std::string& m : methods) {
            double value = 0.0, resid = 0.0;
            int nodes = 0;
            if (m == "local") {
                GreenValue v = green_local_full(g, ci, mi, ni, cj, mj, nj, ctx);
                value = v.value;
                resid = v.imag_residual;
                nodes = v.nodes;
            } else if (m == "fourier") {
                GreenValue v = green_fourier_full(g, ci, cj, mj - mi, nj - ni,
                                                  ctx);
                value = v.value;
                resid = v.imag_residual;
                nodes = v.nodes;
            } else {
                value = green_truncated_solve(g, ci, mi, ni, cj, mj, nj, ctx);
                resid = 1e-10;  // the stabilization tolerance of the solve
            }
            csv += csv_row({p.label_x, p.label_y, std::to_string(dist), m,
                            fmt(value), fmt(resid), std::to_string(nodes)});
            std::cout << p.label_x << " -> " << p.label_y << "  d=" << dist
                      << "  " << m << "  G = " << fmt(value) << "\n";
        }
    }
    write_file(dir / "green.csv", csv);
    std::cout << "wrote " << (dir / "green.csv").string() << "\n";
    return 0;
}

int run_asymptotics(const Options& opt) {
    double k = resolve_modulus(opt);
    PeriodicGraph g = resolve_graph(opt);
    EllipticContext ctx = complete_integrals(k);
    fs::path dir = resolve_out(opt);

    std::string csv = csv_row({"x", "y", "distance", "method", "value",
                               "green_local", "ratio", "chi_u0", "u0",
                               "chi_second", "amoeba_rate", "saddle_rate"});
    for (const std::string& spec : opt.pairs) {
        PairSpec p = parse_pair(spec);
        auto [ci, mi, ni] = p.x;
        auto [cj, mj, nj] = p.y;
        int dist = g.minimal_path(ci, mi, ni, cj, mj, nj).length;
        SaddleData s = saddle_point(g, ci, mi, ni, cj, mj, nj, ctx);
        double asym = green_asymptotic(g, ci, mi, ni, cj, mj, nj, ctx);
        double exact = green_local(g, ci, mi, ni, cj, mj, nj, ctx);
        double ratio = asym != 0.0 ? exact / asym : 0.0;
        std::string am = "", sr = "";
        int dm = mj - mi, dn = nj - ni;
        if (ci == cj && (dm != 0 || dn != 0)) {
            // Support-function value of the amoeba hole along the
            // displacement; the saddle rate rescaled the same way must
            // reproduce it.
            am = fmt(rate_from_amoeba(g, dm, dn, ctx));
            sr = fmt(s.chi0 * dist / std::hypot(double(dm), double(dn)));
        }
        csv += csv_row({p.label_x, p.label_y, std::to_string(dist),
                        "saddle-point", fmt(asym), fmt(exact), fmt(ratio),
                        fmt(s.chi0), fmt(s.u0), fmt(s.chi2), am, sr});
        std::cout << p.label_x << " -> " << p.label_y << "  d=" << dist
                  << "  asymptotic = " << fmt(asym)
                  << "  exact = " << fmt(exact) << "  ratio = " << fmt(ratio)
                  << "\n";
    }
    write_file(dir / "asymptotics.csv", csv);
    std::cout << "wrote " << (dir / "asymptotics.csv").string() << "\n";
    return 0;
}

int run_sample_forest(const Options& opt) {
    double k = resolve_modulus(opt);
    PeriodicGraph g = resolve_graph(opt);
    EllipticContext ctx = complete_integrals(k);
    fs::path dir = resolve_out(opt);
    auto [p, q] = parse_torus(opt.torus);
    if (opt.samples < 1)
        throw std::invalid_argument("need at least one sample");

    MassiveGraph t = torus_graph(g, p, q, ctx);
    WilsonSampler sampler(t);
    Rng rng(opt.seed);

    nlohmann::ordered_json doc;
    doc["method"] = "wilson-killed-walk";
    doc["torus"] = {{"p", p}, {"q", q}};
    doc["k"] = k;
    doc["seed"] = opt.seed;
    doc["vertices"] = t.num_vertices();
    doc["samples"] = nlohmann::ordered_json::array();
    ForestSample first;
    for (int s = 0; s < opt.samples; ++s) {
        ForestSample f = sampler.sample(rng);
        if (s == 0) first = f;
        nlohmann::ordered_json entry;
        entry["edges"] = nlohmann::ordered_json::array();
        for (int e : f.edges)
            entry["edges"].push_back({t.edges[e][0], t.edges[e][1]});
        entry["roots"] = f.roots;
        entry["components"] = f.roots.size();
        doc["samples"].push_back(entry);
        std::cout << "sample " << s << ": " << f.edges.size() << " edges, "
                  << f.roots.size() << " trees\n";
    }
    write_file(dir / "forest.json", doc.dump(2) + "\n");
    write_file(dir / "forest.svg", forest_svg(g, p, q, first));
    std::cout << "wrote " << (dir / "forest.json").string() << " and "
              << (dir / "forest.svg").string() << "\n";
    return 0;
}

int run_marginals(const Options& opt) {
    double k = resolve_modulus(opt);
    PeriodicGraph g = resolve_graph(opt);
    EllipticContext ctx = complete_integrals(k);
    fs::path dir = resolve_out(opt);

    const std::string method = "transfer-impedance(local-contour)";
    std::string csv = csv_row({"type", "id", "detail", "probability",
                               "closed_form", "method", "gap"});
    double total = 0.0;
    for (int e = 0; e < (int)g.edges.size(); ++e) {
        const RhombusEdge& re = g.edges[e];
        double prob =
            marginal(transfer_impedance(g, {PeriodicItem::edge(e)}, ctx));
        double closed = edge_probability(re.theta_bar, ctx);
        total += prob;
        std::ostringstream detail;
        detail << re.x << "->" << re.y << "@(" << re.dm << "," << re.dn
               << "), theta_bar=" << fmt(re.theta_bar);
        csv += csv_row({"edge", std::to_string(e), detail.str(), fmt(prob),
                        fmt(closed), method, fmt(std::abs(prob - closed))});
    }
    for (int v = 0; v < g.num_vertices(); ++v) {
        double m2 = vertex_mass(g.incident_angles(v), ctx);
        double prob =
            marginal(transfer_impedance(g, {PeriodicItem::root(v)}, ctx));
        double closed = root_probability(m2, ctx);
        total += prob;
        csv += csv_row({"root", std::to_string(v), "mass2=" + fmt(m2),
                        fmt(prob), fmt(closed), method,
                        fmt(std::abs(prob - closed))});
    }
    double target = g.num_vertices();
    csv += csv_row({"sum", "", "edges+roots", fmt(total), fmt(target),
                    method, fmt(std::abs(total - target))});
    write_file(dir / "marginals.csv", csv);
    std::cout << "edge+root probability total " << fmt(total)
              << " (vertices per domain: " << g.num_vertices()
              << ", gap " << fmt(std::abs(total - target)) << ")\n"
              << "wrote " << (dir / "marginals.csv").string() << "\n";
    return 0;
}

int run_amoeba(const Options& opt) {
    double k = resolve_modulus(opt);
    PeriodicGraph g = resolve_graph(opt);
    EllipticContext ctx = complete_integrals(k);
    fs::path dir = resolve_out(opt);
    if (opt.grid < 16) throw std::invalid_argument("grid must be >= 16");

    AmoebaSample a = amoeba_sample(g, ctx, opt.grid);
    double area_q = hole_area_quadrature(g, ctx);

    std::string csv = csv_row({"curve", "index", "log_abs_z", "log_abs_w"});
    for (size_t i = 0; i < a.outer.size(); ++i)
        csv += csv_row({"outer", std::to_string(i), fmt(a.outer[i].first),
                        fmt(a.outer[i].second)});
    for (size_t i = 0; i < a.hole.size(); ++i)
        csv += csv_row({"hole", std::to_string(i), fmt(a.hole[i].first),
                        fmt(a.hole[i].second)});
    write_file(dir / "amoeba.csv", csv);
    write_file(dir / "amoeba.svg", amoeba_svg(a, g.newton_polygon()));

    std::cout << "hole area (boundary shoelace, grid " << opt.grid
              << "): " << fmt(a.hole_area) << "\n"
              << "hole area (closed-form line integral): " << fmt(area_q)
              << "\n"
              << "difference: " << fmt(std::abs(a.hole_area - area_q)) << "\n"
              << "wrote " << (dir / "amoeba.csv").string() << " and "
              << (dir / "amoeba.svg").string() << "\n";
    return 0;
}

int run_spectral(const Options& opt) {
    double k = resolve_modulus(opt);
    PeriodicGraph g = resolve_graph(opt);
    EllipticContext ctx = complete_integrals(k);
    fs::path dir = resolve_out(opt);

    CharPoly p = char_poly(g, ctx);
    double recip = 0.0;
    std::string csv = csv_row({"z_power", "w_power", "coefficient"});
    for (int i = -p.py; i <= p.py; ++i)
        for (int j = -p.px; j <= p.px; ++j) {
            if (p.at(i, j) != 0.0)
                csv += csv_row({std::to_string(i), std::to_string(j),
                                fmt(p.at(i, j))});
            recip = std::max(recip, std::abs(p.at(i, j) - p.at(-i, -j)));
        }
    write_file(dir / "spectral.csv", csv);

    auto tracks_poly = g.newton_polygon();
    auto support_poly = support_hull(p);
    std::string poly = csv_row({"source", "x", "y"});
    for (const auto& [x, y] : tracks_poly)
        poly += csv_row({"tracks", std::to_string(x), std::to_string(y)});
    for (const auto& [x, y] : support_poly)
        poly += csv_row({"support", std::to_string(x), std::to_string(y)});
    write_file(dir / "newton.csv", poly);

    std::cout << "coefficient grid " << (2 * p.py + 1) << " x "
              << (2 * p.px + 1) << ", reciprocity residual " << fmt(recip)
              << "\n"
              << "polygon from tracks: " << tracks_poly.size()
              << " vertices; from support: " << support_poly.size()
              << " vertices; "
              << (tracks_poly == support_poly ? "equal" : "DIFFERENT") << "\n"
              << "wrote " << (dir / "spectral.csv").string() << " and "
              << (dir / "newton.csv").string() << "\n";
    return 0;
}

int run_free_energy(const Options& opt) {
    double k = resolve_modulus(opt);
    PeriodicGraph g = resolve_graph(opt);
    EllipticContext ctx = complete_integrals(k);
    fs::path dir = resolve_out(opt);

    double closed = free_energy_closed(g, ctx);
    double fourier = free_energy_fourier(g, ctx);
    std::string csv = csv_row({"method", "value", "diagnostic"});
    csv += csv_row({"closed-form", fmt(closed),
                    "per-edge quadrature, tol 1e-10"});
    csv += csv_row({"fourier", fmt(fourier), "grid doubled to tol 1e-8"});
    csv += csv_row({"difference", fmt(std::abs(closed - fourier)), ""});
    write_file(dir / "free_energy.csv", csv);

    std::cout << "closed form : " << fmt(closed) << "\n"
              << "fourier     : " << fmt(fourier) << "\n"
              << "difference  : " << fmt(std::abs(closed - fourier)) << "\n"
              << "wrote " << (dir / "free_energy.csv").string() << "\n";
    return 0;
}

int run_phase_scan(const Options& opt) {
    PeriodicGraph g = resolve_graph(opt);
    fs::path dir = resolve_out(opt);
    if (opt.points < 6)
        throw std::invalid_argument("phase scan needs at least 6 moduli");
    if (!(opt.kmin > 0.0 && opt.kmax <= 0.2 && opt.kmin < opt.kmax))
        throw std::invalid_argument(
            "phase scan window must satisfy 0 < kmin < kmax <= 0.2");

    std::vector<double> ks(opt.points);
    for (int i = 0; i < opt.points; ++i)
        ks[i] = opt.kmin * std::pow(opt.kmax / opt.kmin,
                                    double(i) / (opt.points - 1));
    double f0 = free_energy_critical(g);
    std::string csv = csv_row({"k", "free_energy", "flat_limit", "delta"});
    for (double k : ks) {
        double f = free_energy_closed(g, complete_integrals(k));
        csv += csv_row({fmt(k), fmt(f), fmt(f0), fmt(f - f0)});
    }
    PhaseFit fit = phase_expansion_fit(g, ks);
    csv += csv_row({"fit:k2_log_inv_k", fmt(fit.coef_klog), "", ""});
    csv += csv_row({"fit:k2", fmt(fit.coef_k2), "", ""});
    write_file(dir / "phase_scan.csv", csv);

    std::cout << "moduli " << fmt(ks.front()) << " .. " << fmt(ks.back())
              << " (" << opt.points << " points, closed form vs flat limit "
              << fmt(f0) << ")\n"
              << "fit: delta F = " << fmt(fit.coef_klog)
              << " * k^2 log(1/k) + " << fmt(fit.coef_k2) << " * k^2\n"
              << "vertices per fundamental domain: " << g.num_vertices()
              << "\n"
              << "wrote " << (dir / "phase_scan.csv").string() << "\n";
    return 0;
}

int run_check_zinv(const Options& opt) {
    double k = resolve_modulus(opt);
    EllipticContext ctx = complete_integrals(k);
    fs::path dir = resolve_out(opt);
    if (opt.trials < 1) throw std::invalid_argument("need at least one trial");
    Rng rng(opt.seed);

    auto random_case = [&]() {
        StarTriangleCase c;
        double t1, t2, t3;
        do {
            t1 = rng.uniform(0.05, kPi / 2 - 0.05);
            t2 = rng.uniform(0.05, kPi / 2 - 0.05);
            t3 = kPi - t1 - t2;
        } while (t3 < 0.05 || t3 > kPi / 2 - 0.05);
        double s = 2.0 * ctx.K / kPi;
        c.theta = {t1 * s, t2 * s, t3 * s};
        for (double& m : c.mass2) m = rng.uniform(0.0, 2.0);
        return c;
    };

    std::string csv =
        csv_row({"check", "trials", "max_residual", "tolerance", "status"});
    auto report = [&](const std::string& name, int trials, double resid,
                      double tol) {
        bool ok = resid < tol;
        csv += csv_row({name, std::to_string(trials), fmt(resid), fmt(tol),
                        ok ? "pass" : "FAIL"});
        std::cout << name << ": max residual " << fmt(resid) << " (tol "
                  << fmt(tol) << ") " << (ok ? "pass" : "FAIL") << "\n";
        return ok;
    };

    bool all_ok = true;
    for (unsigned rooted = 0; rooted < 8; ++rooted) {
        double worst = 0.0;
        Rng sub(opt.seed + 11 * rooted);
        for (int t = 0; t < opt.trials; ++t) {
            StarTriangleCase c = random_case();
            c.rooted = rooted;
            double zs = yb_partition(c, MoveSide::kStar, ctx);
            double zt = yb_partition(c, MoveSide::kTriangle, ctx);
            double cons = zinv_constant(c.theta, ctx);
            worst = std::max(worst, std::abs(zs - cons * zt) /
                                        std::max(1.0, std::abs(zs)));
        }
        all_ok &= report("partition-identity rooted=" +
                             std::to_string(rooted),
                         opt.trials, worst, 1e-9);
    }
    {
        double worst = 0.0;
        for (int t = 0; t < opt.trials; ++t) {
            StarTriangleCase c = random_case();
            WeightResiduals r = weight_identity_residuals(c.theta, ctx);
            worst = std::max({worst, r.center, r.outer});
        }
        all_ok &= report("weight-identities", opt.trials, worst, 1e-9);
    }
    {
        // Green invariance under one move, on a hexagonal patch (its
        // vertices have degree 3 regardless of the graph option).
        PeriodicGraph hex = preset("hexagonal");
        Patch p = make_patch(hex, 4);
        int center = p.find(0, 0, 0);
        Patch tri = star_to_triangle(p, center);
        std::vector<int> active;
        for (int v = 0; v < (int)p.cls.size(); ++v)
            if (p.active(v) && v != center) active.push_back(v);
        std::vector<std::array<int, 2>> pairs;
        for (int i = 0; i < 10; ++i)
            pairs.push_back({active[rng.below(active.size())],
                             active[rng.below(active.size())]});
        double dev = green_invariance_check(p, tri, center, ctx, pairs);
        all_ok &= report("green-invariance(hexagonal patch)",
                         (int)pairs.size(), dev, 1e-8);
    }
    write_file(dir / "zinv.csv", csv);
    std::cout << "wrote " << (dir / "zinv.csv").string() << "\n";
    return all_ok ? 0 : 1;
}

int run_selftest(const Options& opt) {
    int failures = 0;
    auto report = [&](const std::string& name, double resid, double tol) {
        bool ok = resid < tol;
        if (!ok) ++failures;
        std::cout << (ok ? "pass" : "FAIL") << "  " << name << "  residual "
                  << fmt(resid) << " (tol " << fmt(tol) << ")\n";
    };
    Rng rng(opt.seed);

    {
        EllipticContext ctx = complete_integrals(0.6);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            cplx u(rng.uniform(-2 * ctx.K, 2 * ctx.K),
                   rng.uniform(-0.9 * ctx.Kp, 0.9 * ctx.Kp));
            auto [sn, cn, dn] = jacobi_triple(u, ctx);
            worst = std::max(worst, std::abs(sn * sn + cn * cn - 1.0));
            worst = std::max(worst,
                             std::abs(dn * dn + ctx.k2 * sn * sn - 1.0));
        }
        report("jacobi squared-sum identities", worst, 1e-9);
    }
    {
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            EllipticContext c = complete_integrals(rng.uniform(0.05, 0.95));
            worst = std::max(worst, std::abs(c.E * c.Kp + c.Ep * c.K -
                                             c.K * c.Kp - kPi / 2));
        }
        report("legendre relation", worst, 1e-9);
    }
    {
        EllipticContext ctx = complete_integrals(0.45);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            double u = rng.uniform(-2 * ctx.K, 2 * ctx.K);
            worst = std::max(worst,
                             std::abs(func_H_real(u + 4 * ctx.K, ctx) -
                                      func_H_real(u, ctx) - 1.0));
        }
        report("H quarter-period jump", worst, 1e-9);
    }
    {
        double worst = 0.0;
        EllipticContext ctx = complete_integrals(0.5);
        for (const char* name : {"square", "triangular", "hexagonal"}) {
            PeriodicGraph g = preset(name);
            double target = ctx.kprime * ctx.Kp / kPi;
            worst = std::max(worst, std::abs(green_local(g, 0, 0, 0, 0, 0, 0,
                                                         ctx) -
                                             target));
        }
        report("green diagonal k'K'/pi", worst, 1e-10);
    }
    {
        EllipticContext ctx = complete_integrals(0.5);
        double worst = 0.0;
        for (int i = 1; i <= 8; ++i) {
            NeighborGreen n =
                green_neighbor(i * kPi / 18, 0.3 + 0.1 * i, ctx);
            worst = std::max({worst, std::abs(n.a - n.b), std::abs(n.b - n.c)});
        }
        report("neighbor closed forms agree", worst, 1e-10);
    }
    {
        // Massive harmonicity of the exponential at the base vertex of the
        // square lattice.
        PeriodicGraph g = preset("square");
        EllipticContext ctx = complete_integrals(0.5);
        double worst = 0.0;
        for (int t = 0; t < 10; ++t) {
            cplx u(rng.uniform(0.0, 4 * ctx.K), rng.uniform(0.2, 0.8) * ctx.Kp);
            cplx acc = vertex_diagonal(g.incident_angles(0), ctx) *
                       mass_exp(exp_path(g, 0, 0, 0, 0, 4, 3, ctx), u, ctx);
            for (const auto& [e, is_x] : g.adj[0]) {
                const RhombusEdge& re = g.edges[e];
                int dm = is_x ? re.dm : -re.dm;
                int dn = is_x ? re.dn : -re.dn;
                acc -= conductance(re.theta_bar, ctx) *
                       mass_exp(exp_path(g, 0, dm, dn, 0, 4, 3, ctx), u, ctx);
            }
            worst = std::max(worst, std::abs(acc));
        }
        report("exponential massive harmonicity", worst, 1e-9);
    }
    {
        MassiveGraph g;
        g.mass2 = {0.4, 0.0, 0.7, 0.2, 0.9};
        g.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {1, 3}};
        g.rho = {1.1, 0.6, 0.8, 1.4, 0.5, 0.9};
        double det = std::exp(log_partition_determinant(g));
        double forests = partition_enumeration(g);
        report("forest partition determinant", std::abs(det - forests) / forests,
               1e-9);
    }
    {
        EllipticContext ctx = complete_integrals(0.5);
        PeriodicGraph g = preset("hexagonal");
        double total = 0.0;
        for (const RhombusEdge& e : g.edges)
            total += edge_probability(e.theta_bar, ctx);
        for (int v = 0; v < g.num_vertices(); ++v)
            total += root_probability(vertex_mass(g.incident_angles(v), ctx),
                                      ctx);
        report("edge+root probability sum rule",
               std::abs(total - g.num_vertices()), 1e-9);
    }
    {
        EllipticContext ctx = complete_integrals(0.5);
        PeriodicGraph g = preset("square");
        CharPoly p = char_poly(g, ctx);
        double worst = 0.0;
        for (int t = 0; t < 10; ++t) {
            cplx u(rng.uniform(0.0, 4 * ctx.K), rng.uniform(0.2, 0.8) * ctx.Kp);
            auto [z, w] = curve_param(g, u, ctx);
            worst = std::max(worst, std::abs(p.eval(z, w)) / p.max_abs());
        }
        report("parametrization lies on the curve", worst, 1e-8);
        PeriodicGraph f4 = preset("paper-fig4");
        CharPoly p4 = char_poly(f4, ctx);
        double recip = 0.0;
        for (int i = -p4.py; i <= p4.py; ++i)
            for (int j = -p4.px; j <= p4.px; ++j)
                recip = std::max(recip,
                                 std::abs(p4.at(i, j) - p4.at(-i, -j)));
        report("characteristic polynomial reciprocity", recip, 1e-9);
    }
    {
        EllipticContext ctx = complete_integrals(0.5);
        PeriodicGraph g = preset("square");
        report("free energy closed vs fourier",
               std::abs(free_energy_closed(g, ctx) -
                        free_energy_fourier(g, ctx)),
               1e-6);
        double a1 = hole_area(g, complete_integrals(0.3));
        double a2 = hole_area(g, complete_integrals(0.6));
        report("amoeba hole grows with k", a1 < a2 ? 0.0 : 1.0, 0.5);
    }
    {
        EllipticContext ctx = complete_integrals(0.5);
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            StarTriangleCase c;
            double t1, t2, t3;
            do {
                t1 = rng.uniform(0.05, kPi / 2 - 0.05);
                t2 = rng.uniform(0.05, kPi / 2 - 0.05);
                t3 = kPi - t1 - t2;
            } while (t3 < 0.05 || t3 > kPi / 2 - 0.05);
            double s = 2.0 * ctx.K / kPi;
            c.theta = {t1 * s, t2 * s, t3 * s};
            for (double& m : c.mass2) m = rng.uniform(0.0, 2.0);
            double cons = zinv_constant(c.theta, ctx);
            for (unsigned r = 0; r < 8; ++r) {
                c.rooted = r;
                double zs = yb_partition(c, MoveSide::kStar, ctx);
                double zt = yb_partition(c, MoveSide::kTriangle, ctx);
                worst = std::max(worst, std::abs(zs - cons * zt) /
                                            std::max(1.0, zs));
            }
        }
        report("star-triangle partition identities", worst, 1e-9);
    }

    std::cout << (failures == 0 ? "selftest passed"
                                : "selftest FAILED (" +
                                      std::to_string(failures) + " checks)")
              << "\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Massive Laplacians on isoradial graphs: Green functions, "
        "spanning-forest measures, spectral curves, and free energy."};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* sub, bool needs_k = true) {
        auto* p = sub->add_option("--preset", opt.preset_name,
                                  "Built-in graph: square, triangular, "
                                  "hexagonal, paper-fig4 (default square)");
        auto* s = sub->add_option("--spec", opt.spec_path,
                                  "Graph-spec JSON file");
        p->excludes(s);
        s->excludes(p);
        sub->add_option("--out", opt.out, "Output directory (default .)");
        if (needs_k) {
            auto* k = sub->add_option("--k", opt.k,
                                      "Elliptic modulus in (0,1), default 0.5");
            auto* k2 = sub->add_option("--k2", opt.k2,
                                       "Squared modulus k^2 in (0,1); "
                                       "alternative to --k");
            k->excludes(k2);
            k2->excludes(k);
        }
        return sub;
    };

    auto* green = add_common(app.add_subcommand(
        "green", "Green function values for vertex pairs"));
    green->add_option("--pairs", opt.pairs,
                      "Pairs \"(m,n):(m,n)\" or \"(c,m,n):(c,m,n)\"")
        ->required();
    green->add_option("--method", opt.method,
                      "local (contour), fourier, solve, or all");

    auto* asym = add_common(app.add_subcommand(
        "asymptotics", "Saddle-point decay rates and prefactors"));
    asym->add_option("--pairs", opt.pairs, "Pairs as in green")->required();

    auto* sf = add_common(app.add_subcommand(
        "sample-forest", "Wilson samples of the rooted-forest measure"));
    sf->add_option("--torus", opt.torus, "Torus size PxQ (default 8x8)");
    sf->add_option("--samples", opt.samples, "Number of samples (default 1)");
    sf->add_option("--seed", opt.seed, "RNG seed (default 1)");

    add_common(app.add_subcommand(
        "marginals", "Infinite-volume edge and root probabilities"));

    auto* am = add_common(app.add_subcommand(
        "amoeba", "Amoeba of the spectral curve with hole area"));
    am->add_option("--grid", opt.grid, "Sampling grid size (default 200)");

    add_common(app.add_subcommand(
        "spectral", "Characteristic polynomial and Newton polygon"));

    add_common(app.add_subcommand(
        "free-energy", "Free energy by closed form and Fourier integral"));

    auto* ph = add_common(app.add_subcommand(
                              "phase-scan",
                              "Small-k expansion fit of the free energy"),
                          /*needs_k=*/false);
    ph->add_option("--points", opt.points, "Number of moduli (default 8)");
    ph->add_option("--kmin", opt.kmin, "Smallest modulus (default 0.02)");
    ph->add_option("--kmax", opt.kmax, "Largest modulus (default 0.2)");

    auto* zv = add_common(app.add_subcommand(
        "check-zinv", "Star-triangle partition and Green invariance checks"));
    zv->add_option("--trials", opt.trials, "Random trials per case");
    zv->add_option("--seed", opt.seed, "RNG seed (default 1)");

    auto* st = app.add_subcommand("selftest", "Run the fast invariant suite");
    st->add_option("--seed", opt.seed, "RNG seed (default 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (green->parsed()) return run_green(opt);
        if (asym->parsed()) return run_asymptotics(opt);
        if (sf->parsed()) return run_sample_forest(opt);
        if (app.get_subcommand("marginals")->parsed())
            return run_marginals(opt);
        if (am->parsed()) return run_amoeba(opt);
        if (app.get_subcommand("spectral")->parsed()) return run_spectral(opt);
        if (app.get_subcommand("free-energy")->parsed())
            return run_free_energy(opt);
        if (ph->parsed()) return run_phase_scan(opt);
        if (zv->parsed()) return run_check_zinv(opt);
        if (st->parsed()) return run_selftest(opt);
    } catch (const graph_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const pole_proximity_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "did not converge: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
