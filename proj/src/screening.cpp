#include "latentkit/screening.hpp"

#include "latentkit/kernels.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "latentkit/distributions.hpp"

namespace latentkit::screening {

const char* to_string(CorrMethod m) {
    switch (m) {
        case CorrMethod::pearson: return "pearson";
        case CorrMethod::spearman: return "spearman";
        case CorrMethod::kendall_tau_b: return "kendall_tau_b";
    }
    return "?";
}

Descriptives item_descriptives(const dataset::ResponseMatrix& m) {
    Descriptives out;
    out.items.reserve(static_cast<std::size_t>(m.p()));
    std::vector<double> x;
    for (Eigen::Index j = 0; j < m.p(); ++j) {
        x.clear();
        for (Eigen::Index i = 0; i < m.n(); ++i) {
            const double v = m.values(i, j);
            if (!is_missing(v)) x.push_back(v);
        }
        ItemDescriptives d;
        d.item = m.item_ids[static_cast<std::size_t>(j)];
        d.n = x.size();
        if (x.size() < 2) {
            if (x.size() == 1) d.mean = x[0];
            out.items.push_back(std::move(d));
            continue;
        }
        const double n = static_cast<double>(x.size());
        const double mean = kernels::sum(x.data(), x.size()) / n;
        double m2 = 0, m3 = 0, m4 = 0;
        for (double v : x) {
            const double c = v - mean;
            m2 += c * c;
            m3 += c * c * c;
            m4 += c * c * c * c;
        }
        m2 /= n;
        m3 /= n;
        m4 /= n;
        d.mean = mean;
        d.sd = std::sqrt(m2 * n / (n - 1.0));
        if (m2 <= 0) {
            d.sd = 0;
            d.constant = true;
            out.items.push_back(std::move(d));
            continue;
        }
        if (x.size() >= 3) {
            const double g1 = m3 / std::pow(m2, 1.5);
            d.skew = g1 * std::sqrt(n * (n - 1.0)) / (n - 2.0);
        }
        if (x.size() >= 4) {
            const double g2 = m4 / (m2 * m2) - 3.0;
            d.kurtosis = ((n + 1.0) * g2 + 6.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0));
        }
        out.items.push_back(std::move(d));
    }
    return out;
}

std::vector<double> midranks(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> rank(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }
    return rank;
}

namespace {

// Pearson r from one-pass sums; NaN when either margin is constant.
double pearson_from_sums(const kernels::BivariateSums& s, std::size_t n) {
    const double dn = static_cast<double>(n);
    const double vx = s.sxx - s.sx * s.sx / dn;
    const double vy = s.syy - s.sy * s.sy / dn;
    if (vx <= 0 || vy <= 0) return missing_value;
    const double cov = s.sxy - s.sx * s.sy / dn;
    return std::clamp(cov / std::sqrt(vx * vy), -1.0, 1.0);
}

} // namespace

double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    long long concordant = 0, discordant = 0, tie_x = 0, tie_y = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[j] - x[i];
            const double dy = y[j] - y[i];
            if (dx == 0 && dy == 0) {
                ++tie_x;
                ++tie_y;
            } else if (dx == 0) {
                ++tie_x;
            } else if (dy == 0) {
                ++tie_y;
            } else if ((dx > 0) == (dy > 0)) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    const double n0 = static_cast<double>(n) * (static_cast<double>(n) - 1.0) / 2.0;
    const double denom = std::sqrt((n0 - static_cast<double>(tie_x)) * (n0 - static_cast<double>(tie_y)));
    if (denom <= 0) return missing_value;
    return static_cast<double>(concordant - discordant) / denom;
}

CorrMatrix correlation_matrix(const dataset::ResponseMatrix& m, CorrMethod method) {
    const Eigen::Index p = m.p();
    CorrMatrix out;
    out.item_ids = m.item_ids;
    out.method = method;
    out.r.setConstant(p, p, missing_value);
    out.pair_n.setZero(p, p);
    out.r.diagonal().setOnes();

    std::vector<double> xs, ys;
    for (Eigen::Index a = 0; a < p; ++a) {
        out.pair_n(a, a) = static_cast<int>((m.values.col(a).array() == m.values.col(a).array()).count());
        for (Eigen::Index b = a + 1; b < p; ++b) {
            xs.clear();
            ys.clear();
            for (Eigen::Index i = 0; i < m.n(); ++i) {
                const double xv = m.values(i, a);
                const double yv = m.values(i, b);
                if (!is_missing(xv) && !is_missing(yv)) {
                    xs.push_back(xv);
                    ys.push_back(yv);
                }
            }
            out.pair_n(a, b) = out.pair_n(b, a) = static_cast<int>(xs.size());
            if (xs.size() < 3) {
                out.flags.push_back("pair (" + out.item_ids[static_cast<std::size_t>(a)] + "," +
                                    out.item_ids[static_cast<std::size_t>(b)] + ") has < 3 complete cases");
                continue;
            }
            double r = missing_value;
            switch (method) {
                case CorrMethod::pearson:
                    r = pearson_from_sums(kernels::bivariate_sums(xs.data(), ys.data(), xs.size()),
                                          xs.size());
                    break;
                case CorrMethod::spearman: {
                    const auto rx = midranks(xs);
                    const auto ry = midranks(ys);
                    r = pearson_from_sums(kernels::bivariate_sums(rx.data(), ry.data(), rx.size()),
                                          rx.size());
                    break;
                }
                case CorrMethod::kendall_tau_b:
                    r = kendall_tau_b(xs, ys);
                    break;
            }
            if (is_missing(r))
                out.flags.push_back("zero-variance pair (" + out.item_ids[static_cast<std::size_t>(a)] +
                                    "," + out.item_ids[static_cast<std::size_t>(b)] + ")");
            out.r(a, b) = out.r(b, a) = r;
        }
    }
    if (p >= 2) {
        int n_min = out.pair_n(0, 1), n_max = out.pair_n(0, 1);
        for (Eigen::Index a = 0; a < p; ++a)
            for (Eigen::Index b = a + 1; b < p; ++b) {
                n_min = std::min(n_min, out.pair_n(a, b));
                n_max = std::max(n_max, out.pair_n(a, b));
            }
        if (n_max > 0 && static_cast<double>(n_max - n_min) > 0.05 * static_cast<double>(n_max))
            out.flags.push_back("pairwise n varies by more than 5% across cells");
    }
    return out;
}

BartlettResult bartlett_sphericity(const Eigen::MatrixXd& r, std::size_t n) {
    const Eigen::Index p = r.rows();
    if (r.cols() != p) fail(errc::domain_error, "correlation matrix must be square");
    if (n <= static_cast<std::size_t>(p)) fail(errc::insufficient_data, "bartlett requires n > p");
    const double det = r.determinant();
    if (!(det > 0)) fail(errc::singular_matrix, "correlation matrix determinant <= 0");
    BartlettResult res;
    const double dn = static_cast<double>(n);
    const double dp = static_cast<double>(p);
    res.chi2 = -(dn - 1.0 - (2.0 * dp + 5.0) / 6.0) * std::log(det);
    if (res.chi2 < 0) res.chi2 = 0; // det can exceed 1 only by rounding
    res.df = dp * (dp - 1.0) / 2.0;
    res.p = dist::chi2_sf(res.chi2, res.df);
    return res;
}

KmoResult kmo(const Eigen::MatrixXd& r) {
    const Eigen::Index p = r.rows();
    if (r.cols() != p || p < 2) fail(errc::domain_error, "correlation matrix must be square, p >= 2");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(r);
    if (!lu.isInvertible()) fail(errc::singular_matrix, "correlation matrix is singular");
    const Eigen::MatrixXd inv = lu.inverse();

    double sum_r2 = 0, sum_q2 = 0;
    Eigen::MatrixXd q(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            if (i == j) continue;
            q(i, j) = -inv(i, j) / std::sqrt(inv(i, i) * inv(j, j));
            sum_r2 += r(i, j) * r(i, j);
            sum_q2 += q(i, j) * q(i, j);
        }
    }
    if (sum_r2 + sum_q2 <= 0) fail(errc::degenerate, "identity correlation matrix: KMO undefined");

    KmoResult res;
    res.overall = sum_r2 / (sum_r2 + sum_q2);
    res.per_item.resize(static_cast<std::size_t>(p));
    for (Eigen::Index i = 0; i < p; ++i) {
        double ri = 0, qi = 0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (i == j) continue;
            ri += r(i, j) * r(i, j);
            qi += q(i, j) * q(i, j);
        }
        res.per_item[static_cast<std::size_t>(i)] = (ri + qi) > 0 ? ri / (ri + qi) : missing_value;
    }
    return res;
}

FactorabilityReport factorability_report(const dataset::ResponseMatrix& m) {
    FactorabilityReport rep;

    const auto desc = item_descriptives(m);
    for (const auto& d : desc.items) {
        if (!is_missing(d.skew) && std::fabs(d.skew) > 2.0) rep.skew_flags.push_back(d.item);
        if (!is_missing(d.kurtosis) && std::fabs(d.kurtosis) > 7.0) rep.kurtosis_flags.push_back(d.item);
    }

    const auto complete = dataset::listwise(m);
    rep.n_used = static_cast<std::size_t>(complete.matrix.n());
    const auto cm = correlation_matrix(complete.matrix, CorrMethod::pearson);

    std::size_t pairs = 0, strong = 0;
    for (Eigen::Index a = 0; a < cm.p(); ++a) {
        for (Eigen::Index b = a + 1; b < cm.p(); ++b) {
            ++pairs;
            const double r = cm.r(a, b);
            if (!is_missing(r) && std::fabs(r) >= 0.3) ++strong;
        }
    }
    rep.share_pairs_abs_r_ge_03 = pairs ? static_cast<double>(strong) / static_cast<double>(pairs) : 0.0;

    const auto bart = bartlett_sphericity(cm.r, rep.n_used);
    rep.bartlett_chi2 = bart.chi2;
    rep.bartlett_df = bart.df;
    rep.bartlett_p = bart.p;

    try {
        const auto k = kmo(cm.r);
        rep.kmo_overall = k.overall;
        rep.kmo_per_item = k.per_item;
    } catch (const Error&) {
        rep.kmo_overall = missing_value;
    }

    rep.factorable = rep.bartlett_p < 0.05 && !is_missing(rep.kmo_overall) && rep.kmo_overall >= 0.5;
    return rep;
}

} // namespace latentkit::screening
