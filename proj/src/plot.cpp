#include "morl/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "morl/dst.hpp"

namespace morl {

namespace {

const char* kColors[] = {"#1b6ca8", "#c44536", "#3a7d44", "#7d3a9e", "#b8860b", "#2f4f4f"};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

std::string render_front_svg(const std::vector<FrontFile>& fronts,
                             const std::vector<std::string>& labels,
                             const std::vector<std::vector<double>>& oracle_front) {
    require(!fronts.empty() || !oracle_front.empty(), "plot: nothing to draw");
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto grow = [&](double x, double y) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    };
    for (const auto& f : fronts) {
        require(f.num_objectives == 2, "plot: fronts must have exactly two objectives");
        for (const auto& r : f.returns) grow(r[0], r[1]);
    }
    for (const auto& p : oracle_front) grow(p[0], p[1]);

    double xspan = std::max(xmax - xmin, 1e-9);
    double yspan = std::max(ymax - ymin, 1e-9);
    xmin -= 0.05 * xspan;
    xmax += 0.05 * xspan;
    ymin -= 0.05 * yspan;
    ymax += 0.05 * yspan;

    const double w = 640, h = 480, ml = 70, mr = 20, mt = 20, mb = 50;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    os << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
       << h - mb << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
       << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double fx = xmin + (xmax - xmin) * i / 4.0;
        double fy = ymin + (ymax - ymin) * i / 4.0;
        os << "<text x=\"" << px(fx) << "\" y=\"" << h - mb + 18
           << "\" font-size=\"11\" text-anchor=\"middle\">" << num(fx) << "</text>\n";
        os << "<text x=\"" << ml - 6 << "\" y=\"" << py(fy) + 4
           << "\" font-size=\"11\" text-anchor=\"end\">" << num(fy) << "</text>\n";
    }

    if (!oracle_front.empty()) {
        std::vector<std::vector<double>> sorted = oracle_front;
        std::sort(sorted.begin(), sorted.end());
        os << "<polyline fill=\"none\" stroke=\"#999999\" stroke-dasharray=\"4 3\" points=\"";
        for (const auto& p : sorted) os << num(px(p[0])) << "," << num(py(p[1])) << " ";
        os << "\"/>\n";
        for (const auto& p : sorted) {
            double cx = px(p[0]), cy = py(p[1]);
            os << "<path class=\"oracle\" stroke=\"#555555\" d=\"M" << num(cx - 3) << " "
               << num(cy - 3) << " L" << num(cx + 3) << " " << num(cy + 3) << " M"
               << num(cx - 3) << " " << num(cy + 3) << " L" << num(cx + 3) << " "
               << num(cy - 3) << "\"/>\n";
        }
    }

    for (size_t fi = 0; fi < fronts.size(); ++fi) {
        const char* color = kColors[fi % (sizeof(kColors) / sizeof(kColors[0]))];
        for (const auto& r : fronts[fi].returns) {
            os << "<circle class=\"pt\" cx=\"" << num(px(r[0])) << "\" cy=\"" << num(py(r[1]))
               << "\" r=\"3\" fill=\"" << color << "\" fill-opacity=\"0.7\"/>\n";
        }
        if (fi < labels.size()) {
            os << "<text x=\"" << w - mr - 8 << "\" y=\"" << mt + 16 + 16 * fi
               << "\" font-size=\"12\" text-anchor=\"end\" fill=\"" << color << "\">"
               << labels[fi] << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

int cmd_plot(const std::vector<std::string>& front_paths, const std::string& oracle_env,
             double gamma, const std::string& out_path) {
    require(!front_paths.empty(), "plot: no front files given");
    std::vector<FrontFile> fronts;
    std::vector<std::string> labels;
    for (const auto& p : front_paths) {
        FrontFile f = read_front_csv(p);
        require(f.num_objectives == 2,
                "plot: '" + p + "' has " + std::to_string(f.num_objectives) +
                    " objectives; use the metrics command for K > 2");
        fronts.push_back(std::move(f));
        labels.push_back(p);
    }
    std::vector<std::vector<double>> oracle;
    if (oracle_env == "dst") {
        for (const auto& p : true_pareto_front(DstMap::default_map(), gamma))
            oracle.push_back({p.treasure, p.fuel});
    } else if (!oracle_env.empty()) {
        fail("plot: no oracle front available for '" + oracle_env + "'");
    }

    std::string svg = render_front_svg(fronts, labels, oracle);
    std::string tmp = out_path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        require(bool(os), "cannot open '" + tmp + "' for writing");
        os << svg;
    }
    require(std::rename(tmp.c_str(), out_path.c_str()) == 0,
            "cannot move '" + tmp + "' into place");
    return 0;
}

}  // namespace morl
