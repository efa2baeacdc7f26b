#pragma once

#include <string>
#include <vector>

namespace ingress {

/// One polyline series on an x/y chart; non-finite samples are skipped.
struct PlotSeries {
    std::string label;
    std::string color;  // SVG color
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotPanel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
};

/// Renders stacked line-chart panels as one self-contained SVG document.
std::string render_svg(const std::vector<PlotPanel>& panels);

/// Builds the two mission charts (estimated relative angle vs y-position and
/// opening widths vs y-position) from mission CSV text and writes them as a
/// single SVG file. Missing columns are reported by name via
/// std::runtime_error.
void write_mission_charts(const std::string& csv_text, const std::string& out_path);

}  // namespace ingress
