#pragma once

#include <string>
#include <utility>
#include <vector>

namespace bn6 {

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
    bool line = true;  ///< polyline, otherwise markers
    std::string color = "#1f77b4";
    bool dashed = false;
};

struct PlotSpec {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool logx = false;
    bool logy = false;
    std::vector<PlotSeries> series;
};

/// Self-contained SVG text; identical input gives identical bytes.
[[nodiscard]] std::string render_svg(const PlotSpec& spec);

}  // namespace bn6
