#include "isolap/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace isolap {

namespace {

using nlohmann::json;

[[noreturn]] void spec_error(const std::string& what) {
    throw std::invalid_argument("graph spec: " + what);
}

}  // namespace

PeriodicGraph parse_graph_spec(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        spec_error(std::string("not valid JSON (") + e.what() + ")");
    }
    if (!doc.is_object()) spec_error("top level must be an object");
    for (const auto& [key, value] : doc.items())
        if (key != "preset" && key != "tracks")
            spec_error("unknown key \"" + key + "\"");

    if (doc.contains("preset")) {
        if (doc.contains("tracks"))
            spec_error("give either \"preset\" or \"tracks\", not both");
        if (!doc["preset"].is_string())
            spec_error("\"preset\" must be a string");
        return preset(doc["preset"].get<std::string>());
    }
    if (!doc.contains("tracks")) spec_error("missing \"preset\" or \"tracks\"");
    if (!doc["tracks"].is_array() || doc["tracks"].empty())
        spec_error("\"tracks\" must be a nonempty array");

    std::vector<TrackSpec> tracks;
    int index = 0;
    for (const auto& t : doc["tracks"]) {
        std::string at = "tracks[" + std::to_string(index) + "]";
        if (!t.is_object()) spec_error(at + " must be an object");
        for (const std::string key : {"h", "v", "alpha_bar"})
            if (!t.contains(key)) spec_error(at + " missing \"" + key + "\"");
        for (const auto& [key, value] : t.items())
            if (key != "h" && key != "v" && key != "alpha_bar")
                spec_error(at + " has unknown key \"" + key + "\"");
        if (!t["h"].is_number_integer() || !t["v"].is_number_integer())
            spec_error(at + ": \"h\" and \"v\" must be integers");
        if (!t["alpha_bar"].is_number())
            spec_error(at + ": \"alpha_bar\" must be a number");
        TrackSpec s;
        s.h = t["h"].get<int>();
        s.v = t["v"].get<int>();
        s.alpha_bar = t["alpha_bar"].get<double>();
        tracks.push_back(s);
        ++index;
    }
    return build_periodic_graph(tracks);
}

PeriodicGraph load_graph_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) spec_error("cannot open \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph_spec(buf.str());
}

std::string fmt(double v) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string row;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) row += ',';
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\r\n") == std::string::npos) {
            row += f;
        } else {
            row += '"';
            for (char c : f) {
                if (c == '"') row += '"';
                row += c;
            }
            row += '"';
        }
    }
    row += "\r\n";
    return row;
}

Svg::Svg(double xmin, double ymin, double xmax, double ymax, int pixels) {
    double w = std::max(xmax - xmin, 1e-9);
    double h = std::max(ymax - ymin, 1e-9);
    scale_ = pixels / std::max(w, h);
    xmin_ = xmin;
    ymax_ = ymax;
    width_px_ = (int)std::lround(w * scale_);
    height_px_ = (int)std::lround(h * scale_);
}

double Svg::px(double x) const { return (x - xmin_) * scale_; }
double Svg::py(double y) const { return (ymax_ - y) * scale_; }

namespace {
std::string num(double v) {
    // Two decimals are plenty at pixel resolution and keep files small.
    char buf[32];
    snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}
}  // namespace

void Svg::line(double x1, double y1, double x2, double y2,
               const std::string& stroke, double width) {
    body_ += "<line x1=\"" + num(px(x1)) + "\" y1=\"" + num(py(y1)) +
             "\" x2=\"" + num(px(x2)) + "\" y2=\"" + num(py(y2)) +
             "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) +
             "\"/>\n";
}

void Svg::circle(double cx, double cy, double radius_px,
                 const std::string& fill) {
    body_ += "<circle cx=\"" + num(px(cx)) + "\" cy=\"" + num(py(cy)) +
             "\" r=\"" + num(radius_px) + "\" fill=\"" + fill + "\"/>\n";
}

void Svg::polyline(const std::vector<std::pair<double, double>>& pts,
                   const std::string& stroke, double width) {
    if (pts.size() < 2) return;
    body_ += "<polyline fill=\"none\" stroke=\"" + stroke +
             "\" stroke-width=\"" + num(width) + "\" points=\"";
    for (const auto& [x, y] : pts)
        body_ += num(px(x)) + "," + num(py(y)) + " ";
    body_ += "\"/>\n";
}

void Svg::polygon(const std::vector<std::pair<double, double>>& pts,
                  const std::string& fill, const std::string& stroke) {
    if (pts.size() < 3) return;
    body_ += "<polygon fill=\"" + fill + "\" stroke=\"" + stroke +
             "\" points=\"";
    for (const auto& [x, y] : pts)
        body_ += num(px(x)) + "," + num(py(y)) + " ";
    body_ += "\"/>\n";
}

void Svg::text(double x, double y, const std::string& s, int size_px) {
    std::string escaped;
    for (char c : s) {
        if (c == '&')
            escaped += "&amp;";
        else if (c == '<')
            escaped += "&lt;";
        else if (c == '>')
            escaped += "&gt;";
        else
            escaped += c;
    }
    body_ += "<text x=\"" + num(px(x)) + "\" y=\"" + num(py(y)) +
             "\" font-size=\"" + std::to_string(size_px) +
             "\" font-family=\"sans-serif\">" + escaped + "</text>\n";
}

std::string Svg::str() const {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(width_px_) + "\" height=\"" +
           std::to_string(height_px_) + "\" viewBox=\"0 0 " +
           std::to_string(width_px_) + " " + std::to_string(height_px_) +
           "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += body_;
    out += "</svg>\n";
    return out;
}

std::string forest_svg(const PeriodicGraph& g, int p, int q,
                       const ForestSample& sample) {
    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                     "#9467bd", "#ff7f0e", "#8c564b",
                                     "#17becf", "#7f7f7f"};
    int classes = g.num_vertices();
    int fund = (int)g.edges.size();
    auto vertex_xy = [&](int v) {
        int cls = v % classes;
        int cell = v / classes;
        cplx z = g.vertex_pos[cls] + double(cell / q) * g.period_x +
                 double(cell % q) * g.period_y;
        return std::pair<double, double>{z.real(), z.imag()};
    };

    // Window: the p x q block of fundamental domains with one rhombus of
    // slack for ghost endpoints.
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (int a = 0; a <= p; ++a)
        for (int b = 0; b <= q; ++b) {
            cplx z = double(a) * g.period_x + double(b) * g.period_y;
            xmin = std::min(xmin, z.real());
            xmax = std::max(xmax, z.real());
            ymin = std::min(ymin, z.imag());
            ymax = std::max(ymax, z.imag());
        }
    Svg svg(xmin - 1.5, ymin - 1.5, xmax + 1.5, ymax + 1.5, 760);

    for (int eid : sample.edges) {
        const RhombusEdge& e = g.edges[eid % fund];
        int cell = eid / fund;
        int a = cell / q, b = cell % q;
        cplx zx = g.vertex_pos[e.x] + double(a) * g.period_x +
                  double(b) * g.period_y;
        cplx zy = g.vertex_pos[e.y] + double(a + e.dm) * g.period_x +
                  double(b + e.dn) * g.period_y;
        int tail = e.x + classes * (a * q + b);
        const char* color = kPalette[sample.component[tail] % 8];
        svg.line(zx.real(), zx.imag(), zy.real(), zy.imag(), color, 2.2);
    }
    for (int v = 0; v < classes * p * q; ++v) {
        auto [x, y] = vertex_xy(v);
        svg.circle(x, y, 2.2, "#444444");
    }
    for (int r : sample.roots) {
        auto [x, y] = vertex_xy(r);
        svg.circle(x, y, 5.0, kPalette[sample.component[r] % 8]);
    }
    return svg.str();
}

std::string amoeba_svg(
    const AmoebaSample& a,
    const std::vector<std::pair<long long, long long>>& polygon) {
    // Window large enough for the hole and the near part of the tentacles;
    // the scatter's spread (without its far-tentacle tail) sets the scale.
    std::vector<double> mags;
    mags.reserve(a.scatter.size());
    for (const auto& [x, y] : a.scatter)
        mags.push_back(std::max(std::abs(x), std::abs(y)));
    std::sort(mags.begin(), mags.end());
    double r = 1.0;
    if (!mags.empty()) r = std::max(1.0, mags[mags.size() * 92 / 100]);
    Svg svg(-1.15 * r, -1.15 * r, 1.15 * r, 1.15 * r, 720);

    svg.line(-1.15 * r, 0, 1.15 * r, 0, "#dddddd", 1.0);
    svg.line(0, -1.15 * r, 0, 1.15 * r, "#dddddd", 1.0);
    for (const auto& [x, y] : a.scatter) svg.circle(x, y, 1.1, "#b8cbe4");

    // The outer boundary runs off through the tentacles; break the
    // polyline wherever consecutive samples jump.
    std::vector<std::pair<double, double>> run;
    auto flush = [&]() {
        svg.polyline(run, "#1f4e8c", 1.8);
        run.clear();
    };
    for (const auto& pt : a.outer) {
        if (!run.empty()) {
            double d = std::hypot(pt.first - run.back().first,
                                  pt.second - run.back().second);
            if (d > 0.35 * r) flush();
        }
        run.push_back(pt);
    }
    flush();
    std::vector<std::pair<double, double>> hole = a.hole;
    if (!hole.empty()) hole.push_back(hole.front());
    svg.polyline(hole, "#c23b22", 1.8);

    // Newton polygon inset, top-left corner, lattice step 0.09 r.
    if (!polygon.empty()) {
        long long span = 1;
        for (const auto& [x, y] : polygon)
            span = std::max({span, std::llabs(x), std::llabs(y)});
        double cx = -0.86 * r, cy = 0.86 * r, step = 0.18 * r / (double)span;
        std::vector<std::pair<double, double>> corners;
        for (const auto& [x, y] : polygon)
            corners.push_back({cx + step * (double)x, cy + step * (double)y});
        svg.polygon(corners, "#f2e8cf", "#6b6b6b");
        for (long long i = -span; i <= span; ++i)
            for (long long j = -span; j <= span; ++j)
                svg.circle(cx + step * (double)i, cy + step * (double)j, 1.0,
                           "#6b6b6b");
    }
    return svg.str();
}

}  // namespace isolap
