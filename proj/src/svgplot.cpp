#include "ingress/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ingress {
namespace {

constexpr int kPanelWidth = 680;
constexpr int kPanelHeight = 320;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 130;  // room for the legend
constexpr int kMarginTop = 36;
constexpr int kMarginBottom = 46;

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

struct Bounds {
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool any = false;
};

Bounds data_bounds(const PlotPanel& panel) {
    Bounds b;
    for (const PlotSeries& s : panel.series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!b.any) {
                b.xmin = b.xmax = s.x[i];
                b.ymin = b.ymax = s.y[i];
                b.any = true;
            } else {
                b.xmin = std::min(b.xmin, s.x[i]);
                b.xmax = std::max(b.xmax, s.x[i]);
                b.ymin = std::min(b.ymin, s.y[i]);
                b.ymax = std::max(b.ymax, s.y[i]);
            }
        }
    }
    // Degenerate (empty or single-point) ranges still need nonzero extent.
    if (b.xmax - b.xmin < 1e-12) {
        b.xmin -= 1.0;
        b.xmax += 1.0;
    }
    if (b.ymax - b.ymin < 1e-12) {
        b.ymin -= 1.0;
        b.ymax += 1.0;
    }
    const double xpad = 0.04 * (b.xmax - b.xmin);
    const double ypad = 0.08 * (b.ymax - b.ymin);
    b.xmin -= xpad;
    b.xmax += xpad;
    b.ymin -= ypad;
    b.ymax += ypad;
    return b;
}

void render_panel(std::ostringstream& out, const PlotPanel& panel, int y_offset) {
    const Bounds b = data_bounds(panel);
    const double plot_w = kPanelWidth - kMarginLeft - kMarginRight;
    const double plot_h = kPanelHeight - kMarginTop - kMarginBottom;

    auto sx = [&](double x) { return kMarginLeft + (x - b.xmin) / (b.xmax - b.xmin) * plot_w; };
    auto sy = [&](double y) {
        return y_offset + kMarginTop + plot_h - (y - b.ymin) / (b.ymax - b.ymin) * plot_h;
    };

    out << "<g>\n";
    out << "<rect x=\"" << kMarginLeft << "\" y=\"" << y_offset + kMarginTop << "\" width=\""
        << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"white\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << kPanelWidth / 2 << "\" y=\"" << y_offset + 20
        << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\">"
        << panel.title << "</text>\n";

    // Axis extremes and a zero line when it is in range.
    out << "<text x=\"" << kMarginLeft << "\" y=\"" << y_offset + kMarginTop + plot_h + 16
        << "\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(b.xmin) << "</text>\n";
    out << "<text x=\"" << kMarginLeft + plot_w << "\" y=\""
        << y_offset + kMarginTop + plot_h + 16
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(b.xmax)
        << "</text>\n";
    out << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << sy(b.ymin)
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(b.ymin)
        << "</text>\n";
    out << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << sy(b.ymax) + 10
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(b.ymax)
        << "</text>\n";
    if (b.ymin < 0.0 && b.ymax > 0.0) {
        out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << sy(0.0) << "\" x2=\""
            << kMarginLeft + plot_w << "\" y2=\"" << sy(0.0)
            << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
    }
    out << "<text x=\"" << kPanelWidth / 2 << "\" y=\"" << y_offset + kPanelHeight - 8
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
        << panel.x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << y_offset + kMarginTop + plot_h / 2
        << "\" font-size=\"12\" font-family=\"sans-serif\" transform=\"rotate(-90 16 "
        << y_offset + kMarginTop + plot_h / 2 << ")\" text-anchor=\"middle\">" << panel.y_label
        << "</text>\n";

    int legend_y = y_offset + kMarginTop + 12;
    for (const PlotSeries& s : panel.series) {
        // Polyline broken at non-finite samples; isolated points drawn as dots.
        std::vector<std::pair<double, double>> run;
        auto flush = [&]() {
            if (run.size() == 1) {
                out << "<circle cx=\"" << run[0].first << "\" cy=\"" << run[0].second
                    << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
            } else if (run.size() > 1) {
                out << "<polyline fill=\"none\" stroke=\"" << s.color
                    << "\" stroke-width=\"1.5\" points=\"";
                for (const auto& p : run) out << p.first << "," << p.second << " ";
                out << "\"/>\n";
            }
            run.clear();
        };
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
                run.emplace_back(sx(s.x[i]), sy(s.y[i]));
            else
                flush();
        }
        flush();

        out << "<line x1=\"" << kPanelWidth - kMarginRight + 10 << "\" y1=\"" << legend_y
            << "\" x2=\"" << kPanelWidth - kMarginRight + 28 << "\" y2=\"" << legend_y
            << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << kPanelWidth - kMarginRight + 32 << "\" y=\"" << legend_y + 4
            << "\" font-size=\"11\" font-family=\"sans-serif\">" << s.label << "</text>\n";
        legend_y += 16;
    }
    out << "</g>\n";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) fields.push_back(item);
    return fields;
}

}  // namespace

std::string render_svg(const std::vector<PlotPanel>& panels) {
    const int total_h = kPanelHeight * static_cast<int>(panels.size());
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kPanelWidth << "\" height=\""
        << total_h << "\" viewBox=\"0 0 " << kPanelWidth << " " << total_h << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i)
        render_panel(out, panels[i], static_cast<int>(i) * kPanelHeight);
    out << "</svg>\n";
    return out.str();
}

void write_mission_charts(const std::string& csv_text, const std::string& out_path) {
    std::stringstream ss(csv_text);
    std::string header;
    if (!std::getline(ss, header)) header = "";

    const std::vector<std::string> cols = split_csv_line(header);
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < cols.size(); ++i) index[cols[i]] = static_cast<int>(i);

    const std::vector<std::string> wanted = {"y", "est_psi_deg", "opening_total_px",
                                             "opening_left_px", "opening_right_px"};
    std::string missing;
    for (const std::string& name : wanted) {
        if (!index.count(name)) missing += (missing.empty() ? "" : ", ") + name;
    }
    if (!missing.empty())
        throw std::runtime_error("mission CSV is missing column(s): " + missing);

    std::vector<double> ys, psi, total, left, right;
    std::string line;
    int lineno = 1;
    while (std::getline(ss, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() < cols.size())
            throw std::runtime_error("mission CSV line " + std::to_string(lineno) +
                                     ": wrong field count");
        auto get = [&](const std::string& name) {
            return std::strtod(fields[index[name]].c_str(), nullptr);
        };
        ys.push_back(get("y"));
        psi.push_back(get("est_psi_deg"));
        total.push_back(get("opening_total_px"));
        left.push_back(get("opening_left_px"));
        right.push_back(get("opening_right_px"));
    }

    PlotPanel angle;
    angle.title = "Estimated relative angle vs y-position";
    angle.x_label = "y position (world units)";
    angle.y_label = "relative angle (deg)";
    angle.series.push_back({"est. angle", "#c0392b", ys, psi});

    PlotPanel width;
    width.title = "Opening width vs y-position";
    width.x_label = "y position (world units)";
    width.y_label = "width (px)";
    width.series.push_back({"total", "#2c3e50", ys, total});
    width.series.push_back({"left edge", "#27ae60", ys, left});
    width.series.push_back({"right edge", "#8e44ad", ys, right});

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
    out << render_svg({angle, width});
    if (!out) throw std::runtime_error("write failed: " + out_path);
}

}  // namespace ingress
