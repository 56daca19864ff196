#include "latentkit/inference.hpp"

#include "latentkit/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace latentkit;
using namespace latentkit::inference;

namespace {

std::vector<double> random_group(CounterRng rng, std::uint64_t stream, std::size_t n, double shift = 0) {
    std::vector<double> v;
    const CounterRng sub = rng.substream(stream);
    for (std::size_t i = 0; i < n; ++i) v.push_back(sub.normal(i) + shift);
    return v;
}

// Independent exact Mann-Whitney oracle: permutes a label vector with
// std::next_permutation and recomputes U from scratch per labelling.
double mw_exact_oracle(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::size_t n = pooled.size(), na = a.size();

    auto u_of = [&](const std::vector<int>& labels) {
        // midranks computed naively
        double r1 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!labels[i]) continue;
            double rank = 1;
            double ties = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                if (pooled[j] < pooled[i]) rank += 1;
                else if (pooled[j] == pooled[i]) ties += 1;
            }
            r1 += rank + ties / 2.0;
        }
        return r1 - static_cast<double>(na) * (static_cast<double>(na) + 1.0) / 2.0;
    };

    std::vector<int> labels(n, 0);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(na), 1);
    std::sort(labels.begin(), labels.end());
    std::vector<int> observed(n, 0);
    std::fill(observed.begin(), observed.begin() + static_cast<std::ptrdiff_t>(na), 1);
    const double u_obs = u_of(observed);

    std::size_t total = 0, le = 0, ge = 0;
    do {
        ++total;
        const double u = u_of(labels);
        if (u <= u_obs + 1e-12) ++le;
        if (u >= u_obs - 1e-12) ++ge;
    } while (std::next_permutation(labels.begin(), labels.end()));
    const double p2 = 2.0 * std::min(static_cast<double>(le), static_cast<double>(ge)) /
                      static_cast<double>(total);
    return std::min(1.0, p2);
}

} // namespace

TEST_CASE("t_test: identical samples and hand pooled arithmetic") {
    const std::vector<double> s{1, 2, 3, 4};
    const auto same = t_test(s, s);
    CHECK(same.statistic == doctest::Approx(0.0));
    CHECK(same.p_value == doctest::Approx(1.0));

    // a={1,2,3}, b={4,5,6}: pooled var 1, se = sqrt(2/3), t = -3/se
    const auto res = t_test({1, 2, 3}, {4, 5, 6});
    CHECK(res.statistic == doctest::Approx(-3.0 / std::sqrt(2.0 / 3.0)).epsilon(1e-12));
    CHECK(res.df == doctest::Approx(4.0));

    const auto swapped = t_test({4, 5, 6}, {1, 2, 3});
    CHECK(swapped.statistic == doctest::Approx(-res.statistic).epsilon(1e-12));
    CHECK(swapped.p_value == doctest::Approx(res.p_value).epsilon(1e-12));
}

TEST_CASE("t_test: degenerate variance handling") {
    CHECK(t_test({2, 2, 2}, {2, 2}).statistic == doctest::Approx(0.0));
    CHECK_THROWS_AS(t_test({2, 2, 2}, {3, 3}), Error);
    CHECK_THROWS_AS(t_test({1}, {2, 3}), Error);
}

TEST_CASE("t_test: welch variant has satterthwaite df") {
    const auto res = t_test({1, 2, 3, 4, 9}, {1.1, 2.1, 2.9, 4.2}, TTestVariant::welch);
    CHECK(res.df > 3.0);
    CHECK(res.df < 7.0);
    CHECK(res.method == "t_test_welch");
}

TEST_CASE("anova: two-group F equals pooled t squared") {
    CounterRng rng(11);
    for (int rep = 0; rep < 100; ++rep) {
        const auto a = random_group(rng, static_cast<std::uint64_t>(rep * 2), 5 + rep % 7);
        const auto b = random_group(rng, static_cast<std::uint64_t>(rep * 2 + 1), 4 + rep % 5, 0.3);
        const auto f = one_way_anova({a, b});
        const auto t = t_test(a, b);
        CHECK(f.statistic == doctest::Approx(t.statistic * t.statistic).epsilon(1e-10));
        CHECK(f.df == doctest::Approx(1.0));
    }
}

TEST_CASE("anova: identical groups give F=0, all-equal data degenerate") {
    const std::vector<double> g{1, 2, 3};
    const auto res = one_way_anova({g, g, g});
    CHECK(res.statistic == doctest::Approx(0.0));
    CHECK(res.p_value == doctest::Approx(1.0));
    CHECK_THROWS_AS(one_way_anova({{2, 2}, {2, 2}}), Error);
}

TEST_CASE("anova: three-group toy against hand sums of squares") {
    // groups {1,2}, {3,5}, {6,10}: grand mean 4.5
    // ss_between = 2(1.5-4.5)^2 + 2(4-4.5)^2 + 2(8-4.5)^2 = 18 + .5 + 24.5 = 43
    // ss_within = .5 + 2 + 8 = 10.5 ; F = (43/2)/(10.5/3)
    const auto res = one_way_anova({{1, 2}, {3, 5}, {6, 10}});
    CHECK(res.statistic == doctest::Approx((43.0 / 2.0) / (10.5 / 3.0)).epsilon(1e-12));
    CHECK(res.df == doctest::Approx(2.0));
    CHECK(res.df2 == doctest::Approx(3.0));
}

TEST_CASE("levene: identical groups, equal-spread shift, hand case") {
    const std::vector<double> g{1, 2, 3, 4};
    CHECK(levene({g, g}).statistic == doctest::Approx(0.0));

    // same spread, shifted mean: absolute deviations identical
    std::vector<double> shifted;
    for (double v : g) shifted.push_back(v + 5.0);
    CHECK(levene({g, shifted}).statistic == doctest::Approx(0.0));

    // hand 2x3: a={0,0,3}, deviations from mean 1: {1,1,2}; b={0,4,5},
    // deviations from mean 3: {3,1,2} -> anova on those
    const auto res = levene({{0, 0, 3}, {0, 4, 5}});
    const auto direct = one_way_anova({{1, 1, 2}, {3, 1, 2}});
    CHECK(res.statistic == doctest::Approx(direct.statistic).epsilon(1e-12));
}

TEST_CASE("mann_whitney: extremes and the published toy p") {
    const auto res = mann_whitney({1, 2}, {3, 4}, MannWhitneyMode::exact);
    CHECK(res.effect == doctest::Approx(0.0)); // all of a below all of b -> U = 0
    CHECK(res.p_value == doctest::Approx(2.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("mann_whitney: exact equals the permutation oracle exhaustively") {
    // every split of pooled n <= 10 with repeated ordinal values
    CounterRng rng(1234);
    int checked = 0;
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t n = 4 + static_cast<std::size_t>(rng.uniform(static_cast<std::uint64_t>(rep)) * 6);
        for (std::size_t na = 1; na < n; ++na) {
            std::vector<double> a, b;
            for (std::size_t i = 0; i < na; ++i)
                a.push_back(std::floor(rng.uniform(rep * 1000 + i) * 4) + 1);
            for (std::size_t i = na; i < n; ++i)
                b.push_back(std::floor(rng.uniform(rep * 1000 + i) * 4) + 1);
            const auto got = mann_whitney(a, b, MannWhitneyMode::exact);
            const double want = mw_exact_oracle(a, b);
            CHECK(got.p_value == doctest::Approx(want).epsilon(1e-12));
            ++checked;
        }
    }
    CHECK(checked > 300);
}

TEST_CASE("mann_whitney: exact and normal approximation agree at n=8/8") {
    CounterRng rng(88);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<double> a, b;
        for (int i = 0; i < 8; ++i) {
            // continuous draws: no ties
            a.push_back(rng.uniform(static_cast<std::uint64_t>(rep * 100 + i)));
            b.push_back(rng.uniform(static_cast<std::uint64_t>(rep * 100 + 50 + i)) + 0.2);
        }
        const auto ex = mann_whitney(a, b, MannWhitneyMode::exact);
        const auto ap = mann_whitney(a, b, MannWhitneyMode::normal_approx);
        CHECK(std::fabs(ex.p_value - ap.p_value) < 0.02);
    }
}

TEST_CASE("kruskal_wallis: all equal, z^2 identity, hand ranks") {
    CHECK(kruskal_wallis({{3, 3}, {3, 3, 3}}).statistic == doctest::Approx(0.0));

    // two groups without ties: H equals the squared MW normal statistic
    // (no continuity correction)
    const std::vector<double> a{1.2, 3.4, 5.1, 7.3};
    const std::vector<double> b{2.2, 4.9, 6.0, 8.8, 9.4};
    const auto kw = kruskal_wallis({a, b});
    // z from U without continuity correction
    const double u = mann_whitney(a, b, MannWhitneyMode::normal_approx).effect;
    const double na = 4, nb = 5, n = 9;
    const double z = (u - na * nb / 2.0) / std::sqrt(na * nb * (n + 1.0) / 12.0);
    CHECK(kw.statistic == doctest::Approx(z * z).epsilon(1e-8));

    // hand ranks: {1,2} vs {3,4}: rank sums 3 and 7,
    // H = 12/(4*5) * (9/2 + 49/2) - 3*5 = 2.4
    CHECK(kruskal_wallis({{1, 2}, {3, 4}}).statistic == doctest::Approx(2.4).epsilon(1e-12));
}

TEST_CASE("posthoc: count, lsd equals raw p, bonferroni clamps") {
    const std::vector<std::vector<double>> groups{{1, 2, 3}, {2, 3, 4}, {5, 6, 7}};
    const auto lsd = posthoc(groups, PosthocMethod::lsd);
    CHECK(lsd.size() == 3); // C(3,2)
    for (const auto& pr : lsd) CHECK(pr.p_adjusted == doctest::Approx(pr.test.p_value));

    const auto bon = posthoc(groups, PosthocMethod::bonferroni);
    for (std::size_t i = 0; i < bon.size(); ++i)
        CHECK(bon[i].p_adjusted ==
              doctest::Approx(std::min(1.0, 3.0 * bon[i].test.p_value)).epsilon(1e-12));
    // bonferroni-adjusted p never sits below the raw p
    for (const auto& pr : bon) CHECK(pr.p_adjusted >= pr.test.p_value);
    // the arithmetic cases
    CHECK(std::min(1.0, 3.0 * 0.01) == doctest::Approx(0.03));
    CHECK(std::min(1.0, 3.0 * 0.5) == doctest::Approx(1.0));
}

TEST_CASE("correlate: perfect lines and rank reversal") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    const auto self = correlate(x, x);
    CHECK(self.effect == doctest::Approx(1.0));
    CHECK(self.p_value == doctest::Approx(0.0));
    CHECK(self.df == doctest::Approx(3.0));

    const std::vector<double> rev{9, 7, 5, 3, 1};
    CHECK(correlate(x, rev, CorrKind::spearman).effect == doctest::Approx(-1.0));

    // toy against the hand formula: r = cov/sqrt(vx vy), t = r sqrt((n-2)/(1-r^2))
    const std::vector<double> y{2, 1, 4, 3, 6};
    const auto res = correlate(x, y);
    const double r = res.effect;
    CHECK(res.statistic == doctest::Approx(r * std::sqrt(3.0 / (1.0 - r * r))).epsilon(1e-12));
    CHECK_THROWS_AS(correlate({1, 1, 1}, {1, 2, 3}), Error);
}

TEST_CASE("ols: single standardized predictor beta equals pearson r") {
    CounterRng rng(314);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 8 + static_cast<std::size_t>(rng.uniform(static_cast<std::uint64_t>(rep)) * 20);
        std::vector<double> x, y;
        const CounterRng sub = rng.substream(static_cast<std::uint64_t>(rep));
        for (std::size_t i = 0; i < n; ++i) {
            x.push_back(sub.normal(2 * i));
            y.push_back(0.6 * x.back() + sub.normal(2 * i + 1));
        }
        Eigen::MatrixXd design(static_cast<Eigen::Index>(n), 1);
        for (std::size_t i = 0; i < n; ++i) design(static_cast<Eigen::Index>(i), 0) = x[i];
        const auto reg = ols(y, design);
        const auto corr = correlate(x, y);
        CHECK(std::fabs(reg.coefficients[1].beta - corr.effect) < 1e-12);
    }
}

TEST_CASE("ols: exact linear response and residual orthogonality") {
    const std::size_t n = 12;
    Eigen::MatrixXd x(n, 2);
    std::vector<double> y(n);
    CounterRng rng(1002);
    for (std::size_t i = 0; i < n; ++i) {
        x(static_cast<Eigen::Index>(i), 0) = rng.normal(3 * i);
        x(static_cast<Eigen::Index>(i), 1) = rng.normal(3 * i + 1);
        y[i] = 2.0 + 1.5 * x(static_cast<Eigen::Index>(i), 0) - 0.5 * x(static_cast<Eigen::Index>(i), 1);
    }
    const auto reg = ols(y, x);
    CHECK(reg.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(reg.coefficients[0].b == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(reg.coefficients[1].b == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(reg.coefficients[2].b == doctest::Approx(-0.5).epsilon(1e-10));

    // noisy case: residuals orthogonal to every predictor
    for (std::size_t i = 0; i < n; ++i) y[i] += rng.normal(7000 + i);
    const auto reg2 = ols(y, x);
    Eigen::VectorXd beta(3);
    for (int j = 0; j < 3; ++j) beta(j) = reg2.coefficients[static_cast<std::size_t>(j)].b;
    Eigen::MatrixXd design(n, 3);
    design.col(0).setOnes();
    design.rightCols(2) = x;
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd resid = yv - design * beta;
    for (int j = 0; j < 3; ++j)
        CHECK(std::fabs(resid.dot(design.col(j))) / static_cast<double>(n) < 1e-8);
    CHECK(reg2.adjusted_r2 <= reg2.r2);
}

TEST_CASE("ols: five-predictor toy against the normal-equations oracle") {
    const std::size_t n = 8;
    Eigen::MatrixXd x(n, 5);
    std::vector<double> y(n);
    CounterRng rng(5);
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < 5; ++j)
            x(static_cast<Eigen::Index>(i), j) = rng.normal(6 * i + static_cast<std::uint64_t>(j));
        y[i] = rng.normal(6 * i + 5);
    }
    const auto reg = ols(y, x);
    // oracle: solve X'X b = X'y directly
    Eigen::MatrixXd design(n, 6);
    design.col(0).setOnes();
    design.rightCols(5) = x;
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd oracle =
        (design.transpose() * design).ldlt().solve(design.transpose() * yv);
    for (int j = 0; j < 6; ++j)
        CHECK(reg.coefficients[static_cast<std::size_t>(j)].b ==
              doctest::Approx(oracle(j)).epsilon(1e-8));
}

TEST_CASE("ols: rank deficiency is collinear") {
    Eigen::MatrixXd x(6, 2);
    for (int i = 0; i < 6; ++i) {
        x(i, 0) = i;
        x(i, 1) = 2.0 * i; // exact linear dependence
    }
    std::vector<double> y{1, 2, 2, 3, 4, 4};
    try {
        ols(y, x);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == errc::collinear);
    }
}

TEST_CASE("ci_mean: zero-width at sd 0, widening with level, hand arithmetic") {
    const auto flat = ci_mean({3, 3, 3});
    CHECK(flat.lo == doctest::Approx(3.0));
    CHECK(flat.hi == doctest::Approx(3.0));

    const std::vector<double> x{2, 4, 4, 5, 7};
    const auto c90 = ci_mean(x, 0.90);
    const auto c95 = ci_mean(x, 0.95);
    const auto c99 = ci_mean(x, 0.99);
    CHECK(c95.hi - c95.lo > c90.hi - c90.lo);
    CHECK(c99.hi - c99.lo > c95.hi - c95.lo);

    // hand: mean 4.4, sd = sqrt(3.3), half-width = t(.975,4) sd/sqrt(5)
    const double sd = std::sqrt(3.3);
    const double half = 2.7764451051977934 * sd / std::sqrt(5.0);
    CHECK(c95.mean == doctest::Approx(4.4));
    CHECK(c95.hi - c95.mean == doctest::Approx(half).epsilon(1e-10));
}

TEST_CASE("inference: frozen cross-validation values from a reference stack") {
    // expected statistics computed with an established statistics library
    // on the same fixed inputs, pinned to double precision
    const std::vector<double> a{2.1, 3.4, 1.9, 4.2, 3.3, 2.8};
    const std::vector<double> b{3.9, 4.4, 3.1, 5.2, 4.8};

    const auto st = t_test(a, b);
    CHECK(st.statistic == doctest::Approx(-2.60402667998898).epsilon(1e-12));
    CHECK(st.p_value == doctest::Approx(0.028549063442).epsilon(1e-9));

    const auto we = t_test(a, b, TTestVariant::welch);
    CHECK(we.statistic == doctest::Approx(-2.61894253913003).epsilon(1e-12));
    CHECK(we.p_value == doctest::Approx(0.0283417118677102).epsilon(1e-9));

    const auto mw = mann_whitney(a, b, MannWhitneyMode::normal_approx);
    CHECK(mw.effect == doctest::Approx(4.0));
    CHECK(mw.p_value == doctest::Approx(0.0552342537180638).epsilon(1e-9));

    const auto kw = kruskal_wallis({a, b});
    CHECK(kw.statistic == doctest::Approx(4.03333333333334).epsilon(1e-10));
    CHECK(kw.p_value == doctest::Approx(0.0446097180249396).epsilon(1e-9));

    const auto lv = levene({{1, 2, 3, 4, 9}, {2, 2.5, 3, 3.5}});
    CHECK(lv.statistic == doctest::Approx(2.72642722865341).epsilon(1e-10));
    CHECK(lv.p_value == doctest::Approx(0.142683207246741).epsilon(1e-9));

    const auto av = one_way_anova({{1, 2, 3}, {2, 4, 5}, {5, 7, 9}});
    CHECK(av.statistic == doctest::Approx(7.95454545454545).epsilon(1e-10));
    CHECK(av.p_value == doctest::Approx(0.0205390654530899).epsilon(1e-9));

    const std::vector<double> cx{1, 2, 3, 4, 5, 6};
    const std::vector<double> cy{2, 1, 4, 3, 7, 5};
    const auto pe = correlate(cx, cy);
    CHECK(pe.effect == doctest::Approx(0.79179465488863).epsilon(1e-12));
    CHECK(pe.p_value == doctest::Approx(0.0605114033627566).epsilon(1e-9));
    const auto sp = correlate(cx, cy, CorrKind::spearman);
    CHECK(sp.effect == doctest::Approx(0.828571428571429).epsilon(1e-12));
    CHECK(sp.p_value == doctest::Approx(0.0415626822157433).epsilon(1e-9));

    Eigen::MatrixXd x(8, 2);
    x << 2.3, 0.4, 1.1, 1.9, 3.3, 2.2, 0.2, 3.1, 2.9, 1.5, 1.7, 0.8, 2.2, 2.6, 0.9, 1.2;
    const std::vector<double> y{3.1, 4.2, 6.5, 5.0, 5.2, 3.3, 6.1, 3.0};
    const auto reg = ols(y, x);
    CHECK(reg.coefficients[0].b == doctest::Approx(0.614405732554604).epsilon(1e-10));
    CHECK(reg.coefficients[1].b == doctest::Approx(0.875039179603992).epsilon(1e-10));
    CHECK(reg.coefficients[2].b == doctest::Approx(1.36563373119306).epsilon(1e-10));
    CHECK(reg.coefficients[0].se == doctest::Approx(0.0727292515187959).epsilon(1e-9));
    CHECK(reg.coefficients[1].p == doctest::Approx(2.46410200447049e-07).epsilon(1e-6));
    CHECK(reg.r2 == doctest::Approx(0.998492900345051).epsilon(1e-12));
    CHECK(reg.adjusted_r2 == doctest::Approx(0.997890060483072).epsilon(1e-12));
}

TEST_CASE("inference: procedures invariant under observation reordering") {
    const std::vector<double> a{3, 1, 4, 1, 5};
    const std::vector<double> b{2, 7, 1, 8};
    std::vector<double> a2 = a, b2 = b;
    std::reverse(a2.begin(), a2.end());
    std::reverse(b2.begin(), b2.end());
    CHECK(t_test(a, b).p_value == doctest::Approx(t_test(a2, b2).p_value).epsilon(1e-14));
    CHECK(mann_whitney(a, b, MannWhitneyMode::exact).p_value ==
          doctest::Approx(mann_whitney(a2, b2, MannWhitneyMode::exact).p_value));
    CHECK(kruskal_wallis({a, b}).statistic ==
          doctest::Approx(kruskal_wallis({a2, b2}).statistic).epsilon(1e-14));
}
