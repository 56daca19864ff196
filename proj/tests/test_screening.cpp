#include "latentkit/screening.hpp"

#include "latentkit/rng.hpp"
#include "latentkit/synth.hpp"

#include <doctest.h>

#include <cmath>

using namespace latentkit;
using namespace latentkit::screening;

namespace {

dataset::ResponseMatrix column_matrix(const std::vector<std::vector<double>>& cols) {
    dataset::ResponseMatrix m;
    const std::size_t n = cols[0].size();
    m.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        m.item_ids.push_back("v" + std::to_string(j + 1));
        for (std::size_t i = 0; i < n; ++i)
            m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cols[j][i];
    }
    for (std::size_t i = 0; i < n; ++i) m.respondent_ids.push_back("r" + std::to_string(i));
    return m;
}

// Exhaustive pair enumeration, the tau-b oracle.
double tau_b_oracle(const std::vector<double>& x, const std::vector<double>& y) {
    long long c = 0, d = 0, tx = 0, ty = 0, txy = 0;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = x[i] - x[j], b = y[i] - y[j];
            if (a == 0 && b == 0) ++txy;
            else if (a == 0) ++tx;
            else if (b == 0) ++ty;
            else if (a * b > 0) ++c;
            else ++d;
        }
    const double n0 = static_cast<double>(n * (n - 1)) / 2.0;
    return (static_cast<double>(c) - static_cast<double>(d)) /
           std::sqrt((n0 - static_cast<double>(tx + txy)) * (n0 - static_cast<double>(ty + txy)));
}

} // namespace

TEST_CASE("descriptives: closed-form hand values") {
    auto m = column_matrix({{1, 2, 3, 4, 5}});
    const auto d = item_descriptives(m);
    CHECK(d.items[0].n == 5);
    CHECK(d.items[0].mean == doctest::Approx(3.0));
    CHECK(d.items[0].sd == doctest::Approx(1.5811388300841898)); // sqrt(2.5)
    CHECK(d.items[0].skew == doctest::Approx(0.0));
}

TEST_CASE("descriptives: constant item and forced asymmetry") {
    auto m = column_matrix({{4, 4, 4, 4}, {1, 1, 1, 5}});
    const auto d = item_descriptives(m);
    CHECK(d.items[0].sd == 0.0);
    CHECK(d.items[0].constant);
    CHECK(is_missing(d.items[0].skew));
    CHECK(d.items[1].skew > 0.0);
}

TEST_CASE("correlation: self, exact reversal, and pair counts") {
    std::vector<double> x{1, 2, 3, 4, 5, 2, 4};
    std::vector<double> rev;
    for (double v : x) rev.push_back(6 - v);
    auto m = column_matrix({x, x, rev});
    for (auto method : {CorrMethod::pearson, CorrMethod::spearman}) {
        const auto cm = correlation_matrix(m, method);
        CHECK(cm.r(0, 1) == doctest::Approx(1.0));
        CHECK(cm.r(0, 2) == doctest::Approx(-1.0));
        CHECK(cm.pair_n(0, 1) == 7);
        CHECK(cm.r(0, 0) == 1.0);
    }
}

TEST_CASE("correlation: tau-b matches the enumeration oracle") {
    const std::vector<double> x{1, 2, 2, 3};
    const std::vector<double> y{1, 2, 3, 3};
    CHECK(kendall_tau_b(x, y) == doctest::Approx(0.8)); // hand count: C=4, D=0, one tie each side
    CHECK(kendall_tau_b(x, y) == doctest::Approx(tau_b_oracle(x, y)));

    CounterRng rng(31);
    for (int rep = 0; rep < 25; ++rep) {
        std::vector<double> a, b;
        const std::size_t n = 4 + static_cast<std::size_t>(rng.uniform(1000 + rep) * 12);
        for (std::size_t i = 0; i < n; ++i) {
            a.push_back(std::floor(rng.uniform(2000 + rep * 100 + i) * 5) + 1);
            b.push_back(std::floor(rng.uniform(3000 + rep * 100 + i) * 5) + 1);
        }
        const double got = kendall_tau_b(a, b);
        const double want = tau_b_oracle(a, b);
        if (std::isnan(want) || std::isnan(got)) {
            CHECK(std::isnan(want) == std::isnan(got));
        } else {
            CHECK(got == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("correlation: tau-b symmetry and self-correlation") {
    const std::vector<double> x{1, 3, 2, 5, 4, 2};
    const std::vector<double> y{2, 2, 1, 4, 5, 3};
    CHECK(kendall_tau_b(x, y) == doctest::Approx(kendall_tau_b(y, x)));
    CHECK(kendall_tau_b(x, x) == doctest::Approx(1.0));
}

TEST_CASE("correlation: pearson invariant under positive affine transform") {
    std::vector<double> x{1, 2, 2, 4, 5, 3};
    std::vector<double> y{2, 1, 3, 3, 5, 4};
    std::vector<double> xt;
    for (double v : x) xt.push_back(2.5 * v + 7.0);
    const auto r1 = correlation_matrix(column_matrix({x, y}), CorrMethod::pearson);
    const auto r2 = correlation_matrix(column_matrix({xt, y}), CorrMethod::pearson);
    CHECK(r1.r(0, 1) == doctest::Approx(r2.r(0, 1)).epsilon(1e-12));
}

TEST_CASE("correlation: spearman equals pearson on midranks") {
    CounterRng rng(77);
    std::vector<double> x, y;
    for (int i = 0; i < 40; ++i) {
        x.push_back(std::floor(rng.uniform(static_cast<std::uint64_t>(i)) * 5) + 1);
        y.push_back(std::floor(rng.uniform(static_cast<std::uint64_t>(100 + i)) * 5) + 1);
    }
    const auto sp = correlation_matrix(column_matrix({x, y}), CorrMethod::spearman);
    const auto pe = correlation_matrix(column_matrix({midranks(x), midranks(y)}), CorrMethod::pearson);
    CHECK(std::fabs(sp.r(0, 1) - pe.r(0, 1)) < 1e-12);
}

TEST_CASE("correlation: zero-variance item flagged missing") {
    auto m = column_matrix({{1, 1, 1, 1}, {1, 2, 3, 4}});
    const auto cm = correlation_matrix(m, CorrMethod::pearson);
    CHECK(is_missing(cm.r(0, 1)));
    CHECK_FALSE(cm.flags.empty());
}

TEST_CASE("correlation: pairwise-complete uses available pairs") {
    auto m = column_matrix({{1, 2, 3, 4, missing_value}, {2, 4, 5, 8, 1}});
    const auto cm = correlation_matrix(m, CorrMethod::pearson);
    CHECK(cm.pair_n(0, 1) == 4);
    CHECK_FALSE(is_missing(cm.r(0, 1)));
}

TEST_CASE("correlation: uneven pairwise n raises the 5% flag") {
    // third column missing in 3 of 20 rows: cell n drops from 20 to 17
    std::vector<double> a, b, c;
    for (int i = 0; i < 20; ++i) {
        a.push_back(1 + i % 5);
        b.push_back(1 + (i * 2) % 5);
        c.push_back(i < 3 ? missing_value : 1 + (i * 3) % 5);
    }
    const auto cm = correlation_matrix(column_matrix({a, b, c}), CorrMethod::pearson);
    bool flagged = false;
    for (const auto& f : cm.flags)
        if (f.find("5%") != std::string::npos) flagged = true;
    CHECK(flagged);
}

TEST_CASE("bartlett: identity, df formula, hand determinant") {
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(4, 4);
    const auto r0 = bartlett_sphericity(eye, 50);
    CHECK(r0.chi2 == doctest::Approx(0.0));
    CHECK(r0.p == doctest::Approx(1.0));

    const Eigen::MatrixXd eye25 = Eigen::MatrixXd::Identity(25, 25);
    CHECK(bartlett_sphericity(eye25, 219).df == doctest::Approx(300.0));

    // 3x3, off-diagonals .5: det = 1 - 3(.25) + 2(.125) = .5 by cofactors
    Eigen::MatrixXd r(3, 3);
    r << 1, .5, .5, .5, 1, .5, .5, .5, 1;
    const auto res = bartlett_sphericity(r, 20);
    const double expected = -(20.0 - 1.0 - (2.0 * 3 + 5.0) / 6.0) * std::log(0.5);
    CHECK(res.chi2 == doctest::Approx(expected).epsilon(1e-12));
    CHECK(res.df == doctest::Approx(3.0));

    Eigen::MatrixXd singular(2, 2);
    singular << 1, 1, 1, 1;
    CHECK_THROWS_AS(bartlett_sphericity(singular, 10), Error);
}

TEST_CASE("bartlett: nonnegative and increasing in n for fixed R") {
    Eigen::MatrixXd r(3, 3);
    r << 1, .3, .2, .3, 1, .4, .2, .4, 1;
    double prev = -1;
    for (std::size_t n : {std::size_t{5}, std::size_t{10}, std::size_t{50}, std::size_t{200}}) {
        const auto res = bartlett_sphericity(r, n);
        CHECK(res.chi2 >= 0.0);
        CHECK(res.chi2 > prev);
        prev = res.chi2;
    }
}

TEST_CASE("kmo: 2x2 forces 0.5, identity degenerate, equicorrelated oracle") {
    Eigen::MatrixXd r2(2, 2);
    r2 << 1, .6, .6, 1;
    CHECK(kmo(r2).overall == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(kmo(Eigen::MatrixXd::Identity(3, 3)), Error);

    // adjugate oracle: R = .5I + .5J has inverse 2I - 0.5J, so every partial
    // correlation is 1/3 and KMO = 1.5/(1.5 + 6/9)
    Eigen::MatrixXd r3(3, 3);
    r3 << 1, .5, .5, .5, 1, .5, .5, .5, 1;
    const auto res = kmo(r3);
    CHECK(res.overall == doctest::Approx(1.5 / (1.5 + 6.0 / 9.0)).epsilon(1e-12));
    for (double msa : res.per_item)
        CHECK(msa == doctest::Approx(0.5 / (0.5 + 2.0 / 9.0)).epsilon(1e-12));
    CHECK(res.overall > 0.0);
    CHECK(res.overall <= 1.0);
}

TEST_CASE("factorability: independent noise is not factorable") {
    CounterRng rng(5150);
    std::vector<std::vector<double>> cols(4);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 60; ++i)
            cols[static_cast<std::size_t>(j)].push_back(
                std::floor(rng.uniform(static_cast<std::uint64_t>(j * 1000 + i)) * 5) + 1);
    const auto rep = factorability_report(column_matrix(cols));
    CHECK(rep.share_pairs_abs_r_ge_03 <= 0.2);
    CHECK_FALSE(rep.factorable);
}

TEST_CASE("factorability: planted factor model is factorable") {
    const auto spec = synth::simple_structure_spec(10, 2, .6, .8, .3, 400, 99);
    const auto m = synth::gen_likert(spec);
    const auto rep = factorability_report(m);
    CHECK(rep.factorable);
    CHECK(rep.bartlett_p < 0.001);
    CHECK(rep.kmo_overall > 0.5);
}

TEST_CASE("factorability: skew threshold flag") {
    std::vector<double> skewed, noise1, noise2;
    CounterRng rng(4242);
    for (int i = 0; i < 39; ++i) skewed.push_back(1);
    skewed.push_back(5); // adjusted skew far above 2
    for (int i = 0; i < 40; ++i) {
        noise1.push_back(std::floor(rng.uniform(static_cast<std::uint64_t>(i)) * 5) + 1);
        noise2.push_back(std::floor(rng.uniform(static_cast<std::uint64_t>(500 + i)) * 5) + 1);
    }
    const auto rep = factorability_report(column_matrix({skewed, noise1, noise2}));
    REQUIRE(rep.skew_flags.size() == 1);
    CHECK(rep.skew_flags[0] == "v1");
}
