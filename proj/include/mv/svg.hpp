#ifndef MV_SVG_HPP
#define MV_SVG_HPP

#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mv/navgraph.hpp"
#include "mv/scenario.hpp"

namespace mv {

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string xml_escape(std::string const& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Stable pastel colour per signature string.
inline std::string cell_colour(std::string const& key) {
    std::uint32_t h = 2166136261u;
    for (unsigned char c : key) h = (h ^ c) * 16777619u;
    int const hue = static_cast<int>(h % 360);
    return "hsl(" + std::to_string(hue) + ",60%,78%)";
}

}  // namespace detail

struct PlotOptions {
    double width_px{960.0};
    double metres_to_px_d{14.0};
    double panel_gap_px{28.0};
};

/// Renders the partition of every step as stacked panels (s to the right, d upwards):
/// road, crosswalks, labelled cells, obstacle occupancies, and an optional highlighted trace.
[[nodiscard]] inline std::string plot_svg(Scenario const& sc, NavGraph const& g,
                                          std::optional<Path> const& trace = std::nullopt,
                                          PlotOptions const& opt = {}) {
    using detail::num;
    auto const& road = sc.road;
    double const margin = 40.0;
    double const sx = (opt.width_px - 2 * margin) / (road.s_end - road.s_begin);
    double const panel_h = (road.d_max - road.d_min) * opt.metres_to_px_d;
    int const steps = g.steps();
    double const height = margin + (steps + 1) * (panel_h + opt.panel_gap_px) + margin / 2;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(opt.width_px) << "\" height=\"" << num(height)
       << "\" viewBox=\"0 0 " << num(opt.width_px) << ' ' << num(height) << "\" font-family=\"sans-serif\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (int p = 0; p <= steps; ++p) {
        double const top = margin + p * (panel_h + opt.panel_gap_px);
        auto const x = [&](double s) { return margin + (s - road.s_begin) * sx; };
        auto const y = [&](double d) { return top + (road.d_max - d) * opt.metres_to_px_d; };
        auto const rect = [&](FrenetRect const& r, std::string const& style) {
            os << "<rect x=\"" << num(x(r.s_lo)) << "\" y=\"" << num(y(r.d_hi)) << "\" width=\""
               << num(r.s_length() * sx) << "\" height=\"" << num(r.d_width() * opt.metres_to_px_d) << "\" "
               << style << "/>\n";
        };

        os << "<g id=\"step-" << p << "\">\n";
        os << "<text x=\"" << num(margin) << "\" y=\"" << num(top - 6) << "\" font-size=\"12\">step " << p
           << " (t = " << num(sc.time_at(p)) << " s)</text>\n";
        rect(road.extent(), "fill=\"#d9d9d9\" stroke=\"#555\"");
        for (auto const& iv : road.road_types) {
            if (iv.type == RoadType::pedestrian_crosswalk) {
                rect({iv.s_lo, iv.s_hi, road.d_min, road.d_max}, "fill=\"#f4f4f4\" stroke=\"#999\" stroke-dasharray=\"4 3\"");
            }
        }
        for (VertexId v : g.layer(p)) {
            auto const& c = g.cell(v);
            auto const key = c.signature.str();
            for (auto const& r : c.region.rects()) {
                rect(r, "fill=\"" + detail::cell_colour(key) + "\" fill-opacity=\"0.85\" stroke=\"#666\" stroke-width=\"0.5\"");
            }
            FrenetRect label = c.region.rects().front();
            for (auto const& r : c.region.rects()) {
                if (r.area() > label.area()) label = r;
            }
            os << "<text x=\"" << num(x((label.s_lo + label.s_hi) / 2)) << "\" y=\""
               << num(y((label.d_lo + label.d_hi) / 2) + 4) << "\" font-size=\"10\" text-anchor=\"middle\">"
               << detail::xml_escape(key) << "</text>\n";
        }
        for (auto const& o : sc.obstacles) {
            auto const box = occupancy_at_step(sc, o, p);
            rect(box, "fill=\"#d62728\" fill-opacity=\"0.8\" stroke=\"#7f0000\"");
            os << "<text x=\"" << num(x((box.s_lo + box.s_hi) / 2)) << "\" y=\"" << num(y((box.d_lo + box.d_hi) / 2) + 4)
               << "\" font-size=\"10\" fill=\"white\" text-anchor=\"middle\">" << detail::xml_escape(o.id) << "</text>\n";
        }
        if (trace && static_cast<std::size_t>(p) < trace->size()) {
            for (auto const& r : g.cell((*trace)[static_cast<std::size_t>(p)]).region.rects()) {
                rect(r, "fill=\"none\" stroke=\"#1f4fd6\" stroke-width=\"3\"");
            }
        }
        if (p == 0) {
            os << "<circle cx=\"" << num(x(sc.ego_s0)) << "\" cy=\"" << num(y(sc.ego_d0))
               << "\" r=\"4\" fill=\"#1f4fd6\"/>\n";
        }
        os << "</g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace mv

#endif  // MV_SVG_HPP
