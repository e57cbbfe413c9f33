#include "branchlap/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace branchlap {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

}  // namespace

void svg_line_plot(const std::string& path, const std::string& title, const std::string& xlabel,
                   const std::string& ylabel, bool log_y, const std::vector<PlotSeries>& series) {
    const double W = 760, H = 540;
    const double ml = 80, mr = 160, mt = 50, mb = 60;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        for (size_t i = 0; i < s.x.size(); ++i) {
            const double y = s.y[i];
            if (log_y && y <= 0.0) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            const double ty = log_y ? std::log10(y) : y;
            ymin = std::min(ymin, ty);
            ymax = std::max(ymax, ty);
        }
    }
    if (!(xmin < xmax)) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (!(ymin < ymax)) {
        ymin -= 0.5;
        ymax += 0.5;
    }

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double y) {
        const double t = log_y ? std::log10(y) : y;
        return H - mb - (t - ymin) / (ymax - ymin) * (H - mt - mb);
    };

    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << W / 2 << "' y='28' text-anchor='middle' font-size='16'>" << title
       << "</text>\n";

    // axes box
    os << "<rect x='" << ml << "' y='" << mt << "' width='" << W - ml - mr << "' height='"
       << H - mt - mb << "' fill='none' stroke='black'/>\n";

    const int nticks = 6;
    for (int i = 0; i <= nticks; ++i) {
        const double fx = xmin + (xmax - xmin) * i / nticks;
        const double gx = px(fx);
        os << "<line x1='" << gx << "' y1='" << H - mb << "' x2='" << gx << "' y2='" << H - mb + 5
           << "' stroke='black'/>\n";
        os << "<text x='" << gx << "' y='" << H - mb + 20 << "' text-anchor='middle' font-size='11'>"
           << fmt(fx) << "</text>\n";
        const double fy = ymin + (ymax - ymin) * i / nticks;
        const double gy = H - mb - (fy - ymin) / (ymax - ymin) * (H - mt - mb);
        os << "<line x1='" << ml - 5 << "' y1='" << gy << "' x2='" << ml << "' y2='" << gy
           << "' stroke='black'/>\n";
        os << "<text x='" << ml - 8 << "' y='" << gy + 4 << "' text-anchor='end' font-size='11'>"
           << (log_y ? "1e" + fmt(fy) : fmt(fy)) << "</text>\n";
        os << "<line x1='" << ml << "' y1='" << gy << "' x2='" << W - mr << "' y2='" << gy
           << "' stroke='#dddddd'/>\n";
    }
    os << "<text x='" << (ml + W - mr) / 2 << "' y='" << H - 15
       << "' text-anchor='middle' font-size='13'>" << xlabel << "</text>\n";
    os << "<text x='20' y='" << (mt + H - mb) / 2 << "' text-anchor='middle' font-size='13' "
       << "transform='rotate(-90 20 " << (mt + H - mb) / 2 << ")'>" << ylabel << "</text>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5'";
        if (s.dashed) os << " stroke-dasharray='6,4'";
        os << " points='";
        bool open = false;
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (log_y && s.y[i] <= 0.0) continue;
            os << (open ? " " : "") << px(s.x[i]) << "," << py(s.y[i]);
            open = true;
        }
        os << "'/>\n";
        const double ly = mt + 18 + 18.0 * si;
        os << "<line x1='" << W - mr + 10 << "' y1='" << ly << "' x2='" << W - mr + 40 << "' y2='"
           << ly << "' stroke='" << color << "' stroke-width='1.5'"
           << (s.dashed ? " stroke-dasharray='6,4'" : "") << "/>\n";
        os << "<text x='" << W - mr + 46 << "' y='" << ly + 4 << "' font-size='11'>" << s.label
           << "</text>\n";
    }
    os << "</svg>\n";
}

}  // namespace branchlap
