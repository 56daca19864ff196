#include "latentkit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace latentkit::svg {

namespace {

constexpr const char* generator_comment = "<!-- latentkit svg generator 1 -->\n";

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

const char* palette(std::size_t i) {
    static const char* colors[] = {"#1b6ca8", "#c0392b", "#27ae60", "#8e44ad",
                                   "#d68910", "#16a085", "#7f8c8d", "#2c3e50"};
    return colors[i % (sizeof(colors) / sizeof(colors[0]))];
}

struct Extent {
    double lo = 0, hi = 1;
    double map(double v, double out_lo, double out_hi) const {
        if (hi <= lo) return (out_lo + out_hi) / 2;
        return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
    }
};

// 2D convex hull (monotone chain), used for cluster loops.
std::vector<std::pair<double, double>> convex_hull(std::vector<std::pair<double, double>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;
    auto cross = [](const auto& o, const auto& a, const auto& b) {
        return (a.first - o.first) * (b.second - o.second) -
               (a.second - o.second) * (b.first - o.first);
    };
    std::vector<std::pair<double, double>> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

} // namespace

std::string scree_plot(const Eigen::VectorXd& eigen_full, const Eigen::VectorXd& eigen_reduced) {
    const int width = 640, height = 420, margin = 50;
    std::ostringstream out;
    out << generator_comment;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    const Eigen::Index p = eigen_full.size();
    Extent ex{1.0, static_cast<double>(p)};
    double lo = eigen_full.minCoeff(), hi = eigen_full.maxCoeff();
    if (eigen_reduced.size() > 0) {
        lo = std::min(lo, eigen_reduced.minCoeff());
        hi = std::max(hi, eigen_reduced.maxCoeff());
    }
    lo = std::min(lo, 0.0);
    Extent ey{lo, hi <= lo ? lo + 1 : hi};

    auto px = [&](double i) { return ex.map(i, margin, width - margin); };
    auto py = [&](double v) { return ey.map(v, height - margin, margin); };

    // axes + the conventional unit-eigenvalue rule line
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
        << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
        << height - margin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << fmt(py(1.0)) << "\" x2=\"" << width - margin
        << "\" y2=\"" << fmt(py(1.0)) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    out << "<text x=\"" << width - margin + 4 << "\" y=\"" << fmt(py(1.0) + 4) << "\" font-size=\"11\""
        << " fill=\"#666\">1</text>\n";

    auto series = [&](const Eigen::VectorXd& v, const char* color, const char* label, int ly) {
        if (v.size() == 0) return;
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (Eigen::Index i = 0; i < v.size(); ++i)
            out << fmt(px(static_cast<double>(i + 1))) << "," << fmt(py(v(i))) << " ";
        out << "\"/>\n";
        for (Eigen::Index i = 0; i < v.size(); ++i)
            out << "<circle cx=\"" << fmt(px(static_cast<double>(i + 1))) << "\" cy=\"" << fmt(py(v(i)))
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        out << "<text x=\"" << width - margin - 150 << "\" y=\"" << ly << "\" font-size=\"12\" fill=\""
            << color << "\">" << label << "</text>\n";
    };
    series(eigen_full, palette(0), "full matrix", margin);
    series(eigen_reduced, palette(1), "reduced matrix", margin + 16);

    out << "<text x=\"" << width / 2 - 30 << "\" y=\"" << height - 12
        << "\" font-size=\"12\">factor index</text>\n";
    out << "<text x=\"12\" y=\"" << height / 2 << "\" font-size=\"12\" transform=\"rotate(-90 12 "
        << height / 2 << ")\">eigenvalue</text>\n";
    out << "</svg>\n";
    return out.str();
}

std::string mds_map(const mds::MdsSolution& solution, const std::vector<int>& cluster_labels) {
    const int width = 640, height = 640, margin = 60;
    const Eigen::MatrixXd& x = solution.configuration;
    std::ostringstream out;
    out << generator_comment;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    const double d1lo = x.col(0).minCoeff(), d1hi = x.col(0).maxCoeff();
    double d2lo = 0, d2hi = 0;
    if (x.cols() > 1) {
        d2lo = x.col(1).minCoeff();
        d2hi = x.col(1).maxCoeff();
    }
    const double pad1 = std::max(1e-9, (d1hi - d1lo) * 0.08);
    const double pad2 = std::max(1e-9, (d2hi - d2lo) * 0.08);
    Extent ex{d1lo - pad1, d1hi + pad1};
    Extent ey{d2lo - pad2, d2hi + pad2};
    auto px = [&](double v) { return ex.map(v, margin, width - margin); };
    auto py = [&](double v) { return ey.map(v, height - margin, margin); };

    if (!cluster_labels.empty()) {
        std::map<int, std::vector<std::pair<double, double>>> groups;
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const double cy = x.cols() > 1 ? x(i, 1) : 0.0;
            groups[cluster_labels[static_cast<std::size_t>(i)]].emplace_back(px(x(i, 0)), py(cy));
        }
        for (const auto& [label, pts] : groups) {
            const auto hull = convex_hull(pts);
            if (hull.size() < 2) continue;
            out << "<polygon fill=\"" << palette(static_cast<std::size_t>(label))
                << "\" fill-opacity=\"0.10\" stroke=\"" << palette(static_cast<std::size_t>(label))
                << "\" stroke-dasharray=\"5 4\" points=\"";
            for (const auto& [hx, hy] : hull) out << fmt(hx) << "," << fmt(hy) << " ";
            out << "\"/>\n";
        }
    }

    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double cy = x.cols() > 1 ? x(i, 1) : 0.0;
        const char* color =
            cluster_labels.empty() ? "#333333"
                                   : palette(static_cast<std::size_t>(
                                         cluster_labels[static_cast<std::size_t>(i)]));
        out << "<circle cx=\"" << fmt(px(x(i, 0))) << "\" cy=\"" << fmt(py(cy)) << "\" r=\"4\" fill=\""
            << color << "\"/>\n";
        out << "<text x=\"" << fmt(px(x(i, 0)) + 6) << "\" y=\"" << fmt(py(cy) - 6)
            << "\" font-size=\"11\">" << solution.labels[static_cast<std::size_t>(i)] << "</text>\n";
    }
    out << "<text x=\"" << margin << "\" y=\"24\" font-size=\"12\">stress1="
        << fmt(solution.stress) << (is_missing(solution.rsq) ? "" : " rsq=" + fmt(solution.rsq))
        << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

std::string dendrogram_plot(const cluster::Dendrogram& d) {
    const int width = 640, margin = 50;
    const int p = d.leaves;
    const int height = std::max(240, 30 * p + 2 * margin);
    std::ostringstream out;
    out << generator_comment;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    double max_h = 0;
    for (const auto& m : d.merges) max_h = std::max(max_h, m.height);
    Extent ex{0.0, max_h > 0 ? max_h : 1.0};
    auto px = [&](double h) { return ex.map(h, margin + 120, width - margin); };

    // leaves ordered so merged clusters sit adjacently
    std::vector<double> node_y(static_cast<std::size_t>(p) + d.merges.size(), 0.0);
    std::vector<double> node_x(node_y.size(), px(0));
    {
        // leaf order by walking the merge tree
        std::vector<std::vector<int>> members(node_y.size());
        for (int i = 0; i < p; ++i) members[static_cast<std::size_t>(i)] = {i};
        for (const auto& m : d.merges) {
            auto& tgt = members[static_cast<std::size_t>(m.new_id)];
            tgt = members[static_cast<std::size_t>(m.cluster_a)];
            tgt.insert(tgt.end(), members[static_cast<std::size_t>(m.cluster_b)].begin(),
                       members[static_cast<std::size_t>(m.cluster_b)].end());
        }
        const auto& order = d.merges.empty() ? members[0] : members.back();
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            const double y = margin + (static_cast<double>(pos) + 0.5) *
                                          (height - 2.0 * margin) / static_cast<double>(p);
            node_y[static_cast<std::size_t>(order[pos])] = y;
            out << "<text x=\"" << margin << "\" y=\"" << fmt(y + 4) << "\" font-size=\"11\">"
                << d.labels[static_cast<std::size_t>(order[pos])] << "</text>\n";
        }
    }
    for (const auto& m : d.merges) {
        const double ya = node_y[static_cast<std::size_t>(m.cluster_a)];
        const double yb = node_y[static_cast<std::size_t>(m.cluster_b)];
        const double xa = node_x[static_cast<std::size_t>(m.cluster_a)];
        const double xb = node_x[static_cast<std::size_t>(m.cluster_b)];
        const double xm = px(m.height);
        out << "<path fill=\"none\" stroke=\"#1b6ca8\" d=\"M " << fmt(xa) << " " << fmt(ya) << " H "
            << fmt(xm) << " V " << fmt(yb) << " H " << fmt(xb) << "\"/>\n";
        node_y[static_cast<std::size_t>(m.new_id)] = (ya + yb) / 2.0;
        node_x[static_cast<std::size_t>(m.new_id)] = xm;
    }
    out << "<text x=\"" << margin << "\" y=\"" << height - 14
        << "\" font-size=\"12\">merge height</text>\n";
    out << "</svg>\n";
    return out.str();
}

} // namespace latentkit::svg
