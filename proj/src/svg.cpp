#include "spaam/svg.hpp"

#include "spaam/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace spaam {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<PlotSeries>& series) {
    std::size_t total_points = 0;
    for (const auto& s : series) total_points += s.points.size();
    if (total_points == 0) throw InputError("render_line_chart: no data points");

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        for (auto [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (xmax == xmin) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax == ymin) {
        ymin -= 0.5;
        ymax += 0.5;
    }

    const double width = 640, height = 420;
    const double left = 78, right = 24, top = 46, bottom = 56;
    const double pw = width - left - right, ph = height - top - bottom;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

    const int ticks = 5;
    os << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (int i = 0; i <= ticks; ++i) {
        double x = xmin + (xmax - xmin) * i / ticks;
        double y = ymin + (ymax - ymin) * i / ticks;
        os << "<line x1=\"" << sx(x) << "\" y1=\"" << top + ph << "\" x2=\"" << sx(x)
           << "\" y2=\"" << top + ph + 5 << "\" stroke=\"#333\"/>\n";
        os << "<text x=\"" << sx(x) << "\" y=\"" << top + ph + 18
           << "\" text-anchor=\"middle\">" << num(x) << "</text>\n";
        os << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(y) << "\" x2=\"" << left << "\" y2=\""
           << sy(y) << "\" stroke=\"#333\"/>\n";
        os << "<text x=\"" << left - 8 << "\" y=\"" << sy(y) + 4 << "\" text-anchor=\"end\">"
           << num(y) << "</text>\n";
        os << "<line x1=\"" << left << "\" y1=\"" << sy(y) << "\" x2=\"" << left + pw
           << "\" y2=\"" << sy(y) << "\" stroke=\"#eee\"/>\n";
    }
    os << "</g>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 14
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
       << "</text>\n";
    os << "<text x=\"16\" y=\"" << top + ph / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
       << "transform=\"rotate(-90 16 " << top + ph / 2 << ")\">" << y_label << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = kPalette[si % 6];
        std::ostringstream pts;
        for (auto [x, y] : series[si].points) pts << sx(x) << ',' << sy(y) << ' ';
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
           << pts.str() << "\"/>\n";
        for (auto [x, y] : series[si].points) {
            os << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"3\" fill=\"" << color
               << "\"/>\n";
        }
        double ly = top + 16 + 16 * static_cast<double>(si);
        os << "<line x1=\"" << left + pw - 130 << "\" y1=\"" << ly << "\" x2=\""
           << left + pw - 106 << "\" y2=\"" << ly << "\" stroke=\"" << color
           << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << left + pw - 100 << "\" y=\"" << ly + 4
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << series[si].label
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace spaam
