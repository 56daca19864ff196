#include "latentkit/inference.hpp"

#include "latentkit/distributions.hpp"
#include "latentkit/screening.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace latentkit::inference {

namespace {

double mean_of(const std::vector<double>& x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double var_of(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    const double m = mean_of(x);
    double acc = 0;
    for (double v : x) acc += (v - m) * (v - m);
    return acc / (static_cast<double>(x.size()) - 1.0);
}

double directional_p(double stat, double two_sided, Tails tails, double cdf_at_stat) {
    switch (tails) {
        case Tails::two_sided: return two_sided;
        case Tails::less: return cdf_at_stat;
        case Tails::greater: return 1.0 - cdf_at_stat;
    }
    return two_sided;
}

} // namespace

TestResult t_test(const std::vector<double>& a, const std::vector<double>& b, TTestVariant variant,
                  Tails tails) {
    if (a.size() < 2 || b.size() < 2) fail(errc::insufficient_data, "each group needs n >= 2");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ma = mean_of(a), mb = mean_of(b);
    const double va = var_of(a), vb = var_of(b);

    TestResult res;
    res.tails = tails;
    res.effect = ma - mb;
    res.effect_label = "mean_difference";

    double se, df;
    if (variant == TTestVariant::student) {
        res.method = "t_test_student";
        const double pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
        if (pooled <= 0) {
            if (ma == mb) {
                res.statistic = 0;
                res.df = na + nb - 2.0;
                res.p_value = directional_p(0, 1.0, tails, 0.5);
                return res;
            }
            fail(errc::degenerate, "zero pooled variance with unequal means");
        }
        se = std::sqrt(pooled * (1.0 / na + 1.0 / nb));
        df = na + nb - 2.0;
    } else {
        res.method = "t_test_welch";
        const double qa = va / na, qb = vb / nb;
        if (qa + qb <= 0) {
            if (ma == mb) {
                res.statistic = 0;
                res.df = na + nb - 2.0;
                res.p_value = directional_p(0, 1.0, tails, 0.5);
                return res;
            }
            fail(errc::degenerate, "zero variance with unequal means");
        }
        se = std::sqrt(qa + qb);
        df = (qa + qb) * (qa + qb) /
             (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0)); // Satterthwaite
    }
    res.statistic = (ma - mb) / se;
    res.df = df;
    res.p_value = directional_p(res.statistic, dist::t_two_sided_p(res.statistic, df), tails,
                                dist::t_cdf(res.statistic, df));
    return res;
}

TestResult one_way_anova(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) fail(errc::insufficient_data, "ANOVA needs >= 2 groups");
    std::size_t total_n = 0;
    double grand_sum = 0;
    for (const auto& g : groups) {
        if (g.empty()) fail(errc::insufficient_data, "empty group");
        total_n += g.size();
        grand_sum += std::accumulate(g.begin(), g.end(), 0.0);
    }
    const double grand_mean = grand_sum / static_cast<double>(total_n);

    double ss_between = 0, ss_within = 0;
    for (const auto& g : groups) {
        const double m = mean_of(g);
        ss_between += static_cast<double>(g.size()) * (m - grand_mean) * (m - grand_mean);
        for (double v : g) ss_within += (v - m) * (v - m);
    }
    const double df1 = static_cast<double>(groups.size()) - 1.0;
    const double df2 = static_cast<double>(total_n) - static_cast<double>(groups.size());
    if (df2 <= 0) fail(errc::insufficient_data, "no within-group degrees of freedom");

    TestResult res;
    res.method = "one_way_anova";
    res.df = df1;
    res.df2 = df2;
    res.effect_label = "F";
    if (ss_within <= 0) {
        if (ss_between <= 0) fail(errc::degenerate, "all observations identical");
        res.statistic = std::numeric_limits<double>::infinity();
        res.p_value = 0;
        res.effect = res.statistic;
        return res;
    }
    res.statistic = (ss_between / df1) / (ss_within / df2);
    res.effect = res.statistic;
    res.p_value = dist::f_sf(res.statistic, df1, df2);
    return res;
}

TestResult levene(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) fail(errc::insufficient_data, "levene needs >= 2 groups");
    std::vector<std::vector<double>> deviations;
    deviations.reserve(groups.size());
    for (const auto& g : groups) {
        if (g.size() < 2) fail(errc::insufficient_data, "each group needs n >= 2");
        const double m = mean_of(g);
        std::vector<double> d;
        d.reserve(g.size());
        for (double v : g) d.push_back(std::fabs(v - m));
        deviations.push_back(std::move(d));
    }
    TestResult res;
    try {
        res = one_way_anova(deviations);
    } catch (const Error& e) {
        if (e.code() != errc::degenerate) throw;
        // All absolute deviations equal: no evidence of unequal spread.
        res.df = static_cast<double>(groups.size()) - 1.0;
        std::size_t total = 0;
        for (const auto& g : groups) total += g.size();
        res.df2 = static_cast<double>(total) - static_cast<double>(groups.size());
        res.statistic = 0;
        res.p_value = 1;
    }
    res.method = "levene_mean_centered";
    res.effect = res.statistic;
    res.effect_label = "F";
    return res;
}

namespace {

struct RankInfo {
    std::vector<double> ranks;
    double tie_term = 0; // sum of t^3 - t over tie groups
};

RankInfo ranks_with_ties(const std::vector<double>& pooled) {
    RankInfo info;
    info.ranks = screening::midranks(pooled);
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        info.tie_term += t * t * t - t;
        i = j + 1;
    }
    return info;
}

double mw_u_statistic(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto info = ranks_with_ties(pooled);
    double rank_sum_a = 0;
    for (std::size_t i = 0; i < a.size(); ++i) rank_sum_a += info.ranks[i];
    const double na = static_cast<double>(a.size());
    return rank_sum_a - na * (na + 1.0) / 2.0;
}

} // namespace

TestResult mann_whitney(const std::vector<double>& a, const std::vector<double>& b,
                        MannWhitneyMode mode) {
    if (a.empty() || b.empty()) fail(errc::insufficient_data, "each group needs n >= 1");
    const std::size_t na = a.size(), nb = b.size(), n = na + nb;

    TestResult res;
    res.tails = Tails::two_sided;
    res.effect_label = "U";
    const double u_obs = mw_u_statistic(a, b);
    res.effect = u_obs;
    res.statistic = u_obs;

    if (mode == MannWhitneyMode::exact) {
        if (n > 16) fail(errc::config_error, "exact mode limited to n_a + n_b <= 16");
        res.method = "mann_whitney_exact";
        res.df = 0;
        std::vector<double> pooled = a;
        pooled.insert(pooled.end(), b.begin(), b.end());
        // Enumerate every way to label na of the pooled values as group A.
        std::vector<std::size_t> idx(na);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::size_t total = 0, le = 0, ge = 0;
        std::vector<double> ga(na), gb(nb);
        const double eps = 1e-12;
        while (true) {
            ++total;
            std::size_t ai = 0, bi = 0;
            std::size_t next = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (next < na && idx[next] == i) {
                    ga[ai++] = pooled[i];
                    ++next;
                } else {
                    gb[bi++] = pooled[i];
                }
            }
            const double u = mw_u_statistic(ga, gb);
            if (u <= u_obs + eps) ++le;
            if (u >= u_obs - eps) ++ge;
            // next combination
            std::size_t k = na;
            while (k > 0 && idx[k - 1] == n - na + k - 1) --k;
            if (k == 0) break;
            ++idx[k - 1];
            for (std::size_t j = k; j < na; ++j) idx[j] = idx[j - 1] + 1;
        }
        const double p_le = static_cast<double>(le) / static_cast<double>(total);
        const double p_ge = static_cast<double>(ge) / static_cast<double>(total);
        res.p_value = std::min(1.0, 2.0 * std::min(p_le, p_ge));
        return res;
    }

    res.method = "mann_whitney_normal";
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto info = ranks_with_ties(pooled);
    const double dna = static_cast<double>(na), dnb = static_cast<double>(nb), dn = static_cast<double>(n);
    const double mu = dna * dnb / 2.0;
    const double var = dna * dnb / 12.0 * ((dn + 1.0) - info.tie_term / (dn * (dn - 1.0)));
    if (var <= 0) {
        res.p_value = 1.0;
        return res;
    }
    double z = u_obs - mu;
    // Continuity correction toward the mean.
    if (z > 0.5) z -= 0.5;
    else if (z < -0.5) z += 0.5;
    else z = 0.0;
    z /= std::sqrt(var);
    res.statistic = z;
    res.df = 0;
    res.p_value = std::min(1.0, 2.0 * dist::normal_sf(std::fabs(z)));
    return res;
}

TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) fail(errc::insufficient_data, "kruskal-wallis needs >= 2 groups");
    std::vector<double> pooled;
    for (const auto& g : groups) {
        if (g.empty()) fail(errc::insufficient_data, "empty group");
        pooled.insert(pooled.end(), g.begin(), g.end());
    }
    const auto info = ranks_with_ties(pooled);
    const double n = static_cast<double>(pooled.size());

    double h = 0;
    std::size_t offset = 0;
    for (const auto& g : groups) {
        double rank_sum = 0;
        for (std::size_t i = 0; i < g.size(); ++i) rank_sum += info.ranks[offset + i];
        h += rank_sum * rank_sum / static_cast<double>(g.size());
        offset += g.size();
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
    const double tie_correction = 1.0 - info.tie_term / (n * n * n - n);
    if (tie_correction > 0) h /= tie_correction;
    else h = 0; // all observations identical

    TestResult res;
    res.method = "kruskal_wallis";
    res.statistic = h;
    res.effect = h;
    res.effect_label = "H";
    res.df = static_cast<double>(groups.size()) - 1.0;
    res.p_value = h <= 0 ? 1.0 : dist::chi2_sf(h, res.df);
    return res;
}

std::vector<PairwiseResult> posthoc(const std::vector<std::vector<double>>& groups,
                                    PosthocMethod method) {
    if (groups.size() < 2) fail(errc::insufficient_data, "posthoc needs >= 2 groups");
    double ss_within = 0;
    std::size_t total_n = 0;
    for (const auto& g : groups) {
        if (g.size() < 2) fail(errc::insufficient_data, "each group needs n >= 2");
        const double m = mean_of(g);
        for (double v : g) ss_within += (v - m) * (v - m);
        total_n += g.size();
    }
    const double df_err = static_cast<double>(total_n) - static_cast<double>(groups.size());
    const double mse = ss_within / df_err;

    const std::size_t g = groups.size();
    const double m_comparisons = static_cast<double>(g * (g - 1) / 2);
    std::vector<PairwiseResult> out;
    for (std::size_t i = 0; i + 1 < g; ++i) {
        for (std::size_t j = i + 1; j < g; ++j) {
            PairwiseResult pr;
            pr.group_a = static_cast<int>(i);
            pr.group_b = static_cast<int>(j);
            pr.test.method = method == PosthocMethod::lsd ? "posthoc_lsd" : "posthoc_bonferroni";
            pr.test.effect = mean_of(groups[i]) - mean_of(groups[j]);
            pr.test.effect_label = "mean_difference";
            pr.test.df = df_err;
            const double se = std::sqrt(mse * (1.0 / static_cast<double>(groups[i].size()) +
                                               1.0 / static_cast<double>(groups[j].size())));
            if (se <= 0) {
                pr.test.statistic = 0;
                pr.test.p_value = pr.test.effect == 0 ? 1.0 : 0.0;
            } else {
                pr.test.statistic = pr.test.effect / se;
                pr.test.p_value = dist::t_two_sided_p(pr.test.statistic, df_err);
            }
            pr.p_adjusted = method == PosthocMethod::bonferroni
                                ? std::min(1.0, m_comparisons * pr.test.p_value)
                                : pr.test.p_value;
            out.push_back(std::move(pr));
        }
    }
    return out;
}

TestResult correlate(const std::vector<double>& x, const std::vector<double>& y, CorrKind kind) {
    if (x.size() != y.size()) fail(errc::domain_error, "length mismatch");
    if (x.size() < 3) fail(errc::insufficient_data, "correlation needs n >= 3");
    std::vector<double> xs = x, ys = y;
    if (kind == CorrKind::spearman) {
        xs = screening::midranks(xs);
        ys = screening::midranks(ys);
    }
    const double n = static_cast<double>(xs.size());
    const double mx = mean_of(xs), my = mean_of(ys);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx <= 0 || syy <= 0) fail(errc::degenerate, "zero variance");
    const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);

    TestResult res;
    res.method = kind == CorrKind::pearson ? "correlate_pearson" : "correlate_spearman";
    res.effect = r;
    res.effect_label = "r";
    res.df = n - 2.0;
    if (std::fabs(r) >= 1.0) {
        res.statistic = std::copysign(std::numeric_limits<double>::infinity(), r);
        res.p_value = 0;
    } else {
        res.statistic = r * std::sqrt((n - 2.0) / (1.0 - r * r));
        res.p_value = dist::t_two_sided_p(res.statistic, res.df);
    }
    return res;
}

RegressionResult ols(const std::vector<double>& y, const Eigen::MatrixXd& x,
                     const std::vector<std::string>& names) {
    const Eigen::Index n = static_cast<Eigen::Index>(y.size());
    const Eigen::Index k = x.cols();
    if (x.rows() != n) fail(errc::domain_error, "row count mismatch");
    if (n <= k + 1) fail(errc::insufficient_data, "needs n > predictors + 1");

    Eigen::MatrixXd design(n, k + 1);
    design.col(0).setOnes();
    design.rightCols(k) = x;
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    RegressionResult res;
    {
        // Condition number from the R factor's diagonal.
        const Eigen::VectorXd diag = qr.matrixR().diagonal().cwiseAbs();
        const double dmax = diag.maxCoeff();
        const double dmin = diag.minCoeff();
        res.condition_number = dmin > 0 ? dmax / dmin : std::numeric_limits<double>::infinity();
    }
    if (qr.rank() < k + 1)
        fail(errc::collinear, "design matrix rank-deficient (condition number " +
                                  std::to_string(res.condition_number) + ")");

    const Eigen::VectorXd beta = qr.solve(yv);
    const Eigen::VectorXd fitted = design * beta;
    const Eigen::VectorXd resid = yv - fitted;

    const double ss_res = resid.squaredNorm();
    const double ss_tot = (yv.array() - yv.mean()).square().sum();
    if (ss_tot <= 0) fail(errc::degenerate, "response has zero variance");

    const double dn = static_cast<double>(n);
    const double dk = static_cast<double>(k);
    res.n = static_cast<std::size_t>(n);
    res.r2 = 1.0 - ss_res / ss_tot;
    res.adjusted_r2 = 1.0 - (1.0 - res.r2) * (dn - 1.0) / (dn - dk - 1.0);
    res.df1 = dk;
    res.df2 = dn - dk - 1.0;
    const double ms_res = ss_res / res.df2;
    if (ms_res > 0) {
        res.f = ((ss_tot - ss_res) / dk) / ms_res;
        res.f_p = dist::f_sf(res.f, res.df1, res.df2);
    } else {
        res.f = std::numeric_limits<double>::infinity();
        res.f_p = 0;
    }

    const Eigen::MatrixXd xtx_inv =
        (design.transpose() * design).ldlt().solve(Eigen::MatrixXd::Identity(k + 1, k + 1));
    const double sd_y = std::sqrt(ss_tot / (dn - 1.0));
    for (Eigen::Index j = 0; j <= k; ++j) {
        Coefficient c;
        c.name = j == 0 ? "intercept"
                        : (static_cast<std::size_t>(j - 1) < names.size()
                               ? names[static_cast<std::size_t>(j - 1)]
                               : "x" + std::to_string(j));
        c.b = beta(j);
        c.se = std::sqrt(std::max(0.0, ms_res * xtx_inv(j, j)));
        if (j > 0) {
            const double sd_x = std::sqrt(
                (design.col(j).array() - design.col(j).mean()).square().sum() / (dn - 1.0));
            c.beta = c.b * sd_x / sd_y;
        }
        if (c.se > 0) {
            c.t = c.b / c.se;
            c.p = dist::t_two_sided_p(c.t, res.df2);
        } else {
            c.t = 0;
            c.p = c.b == 0 ? 1.0 : 0.0;
        }
        res.coefficients.push_back(std::move(c));
    }
    return res;
}

Interval ci_mean(const std::vector<double>& x, double level) {
    if (x.size() < 2) fail(errc::insufficient_data, "ci_mean needs n >= 2");
    if (!(level > 0 && level < 1)) fail(errc::config_error, "level must lie in (0,1)");
    Interval iv;
    iv.level = level;
    iv.mean = mean_of(x);
    const double sd = std::sqrt(var_of(x));
    const double n = static_cast<double>(x.size());
    const double tq = dist::t_ppf(0.5 + level / 2.0, n - 1.0);
    const double half = tq * sd / std::sqrt(n);
    iv.lo = iv.mean - half;
    iv.hi = iv.mean + half;
    return iv;
}

} // namespace latentkit::inference
