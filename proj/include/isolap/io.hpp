// Artifact plumbing for the command-line driver: graph-spec files, CSV
// rows, and self-contained SVG drawings of forests and amoebas.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "isolap/forest.hpp"
#include "isolap/isograph.hpp"
#include "isolap/spectral.hpp"

namespace isolap {

// Graph-spec JSON: {"preset": "square"} or
// {"tracks": [{"h": 1, "v": 0, "alpha_bar": 0.3}, ...]}.
// Schema problems raise std::invalid_argument naming the offending key or
// array index; geometric invariants are enforced by the graph builder.
PeriodicGraph parse_graph_spec(const std::string& text);
PeriodicGraph load_graph_spec(const std::string& path);

// Shortest decimal that round-trips to the same double, so repeated runs
// emit byte-identical files regardless of locale.
std::string fmt(double v);

// One CSV record per RFC 4180: fields quoted only when they contain a
// comma, quote, or newline; the row ends in CRLF.
std::string csv_row(const std::vector<std::string>& fields);

// Minimal SVG 1.1 accumulator. Construction fixes the world-coordinate
// window (y up); shapes are emitted in pixel space with y flipped.
class Svg {
public:
    Svg(double xmin, double ymin, double xmax, double ymax, int pixels);

    void line(double x1, double y1, double x2, double y2,
              const std::string& stroke, double width);
    void circle(double cx, double cy, double radius_px,
                const std::string& fill);
    void polyline(const std::vector<std::pair<double, double>>& pts,
                  const std::string& stroke, double width);
    void polygon(const std::vector<std::pair<double, double>>& pts,
                 const std::string& fill, const std::string& stroke);
    void text(double x, double y, const std::string& s, int size_px);

    std::string str() const;  // complete document

private:
    double px(double x) const;
    double py(double y) const;
    double scale_ = 1.0;
    double xmin_, ymax_;
    int width_px_, height_px_;
    std::string body_;
};

// Wilson sample on the p x q torus quotient of g, drawn in the plane with
// wrap-around edges running to ghost copies. Components get cycling
// colors; roots are filled disks.
std::string forest_svg(const PeriodicGraph& g, int p, int q,
                       const ForestSample& sample);

// Amoeba picture: sample scatter, the two boundary curves (the outer one
// split at tentacle jumps), and the Newton polygon inset in a corner.
std::string amoeba_svg(
    const AmoebaSample& a,
    const std::vector<std::pair<long long, long long>>& polygon);

}  // namespace isolap
