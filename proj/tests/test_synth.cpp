#include "latentkit/synth.hpp"

#include "latentkit/efa.hpp"
#include "latentkit/screening.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>

using namespace latentkit;
using namespace latentkit::synth;

TEST_CASE("gen_likert: identical seeds give identical matrices") {
    const auto spec = simple_structure_spec(6, 2, .6, .8, .3, 50, 77);
    const auto a = gen_likert(spec);
    const auto b = gen_likert(spec);
    CHECK(a.values == b.values);
    auto spec2 = spec;
    spec2.seed = 78;
    CHECK(gen_likert(spec2).values != a.values);
}

TEST_CASE("gen_likert: values live on the 1..5 grid") {
    const auto spec = simple_structure_spec(4, 1, .5, .7, 0, 200, 3);
    const auto m = gen_likert(spec);
    for (Eigen::Index i = 0; i < m.n(); ++i)
        for (Eigen::Index j = 0; j < m.p(); ++j) {
            CHECK(m.values(i, j) >= 1.0);
            CHECK(m.values(i, j) <= 5.0);
            CHECK(m.values(i, j) == std::floor(m.values(i, j)));
        }
}

TEST_CASE("gen_likert: zero loadings give uncorrelated items") {
    FactorModelSpec spec;
    spec.loadings = Eigen::MatrixXd::Zero(6, 2);
    spec.phi = Eigen::MatrixXd::Identity(2, 2);
    spec.n = 2000;
    spec.seed = 11;
    const auto m = gen_likert(spec);
    const auto cm = screening::correlation_matrix(m, screening::CorrMethod::pearson);
    for (Eigen::Index i = 0; i < 6; ++i)
        for (Eigen::Index j = i + 1; j < 6; ++j) CHECK(std::fabs(cm.r(i, j)) < 0.07);
}

TEST_CASE("gen_likert: non-positive-definite phi is a domain error") {
    FactorModelSpec spec;
    spec.loadings = Eigen::MatrixXd::Constant(4, 2, 0.5);
    spec.phi.resize(2, 2);
    spec.phi << 1, 1.2, 1.2, 1;
    spec.n = 10;
    try {
        gen_likert(spec);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == errc::domain_error);
    }
}

TEST_CASE("gen_likert: sample correlations approach the implied matrix") {
    const auto spec = simple_structure_spec(8, 2, .6, .8, .3, 10000, 19);
    const Eigen::MatrixXd implied = spec.implied_correlation();
    const auto m = gen_likert(spec);
    const auto cm = screening::correlation_matrix(m, screening::CorrMethod::pearson);
    // discretization attenuates correlations; rank order must survive and
    // the continuous-model pattern must show through
    for (Eigen::Index i = 0; i < 8; ++i)
        for (Eigen::Index j = i + 1; j < 8; ++j) {
            if (implied(i, j) > 0.3) CHECK(cm.r(i, j) > 0.2);
            if (implied(i, j) < 0.05) CHECK(std::fabs(cm.r(i, j)) < 0.15);
        }
}

TEST_CASE("gen_latent: population correlations converge to implied R") {
    const int n = 10000;
    const auto spec = simple_structure_spec(8, 2, .6, .8, .3, n, 23);
    const Eigen::MatrixXd latent = gen_latent(spec);
    const Eigen::MatrixXd implied = spec.implied_correlation();
    // sample correlation matrix of the continuous latents
    Eigen::MatrixXd centered = latent.rowwise() - latent.colwise().mean();
    Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
    Eigen::VectorXd sd = cov.diagonal().array().sqrt();
    double worst = 0;
    for (Eigen::Index i = 0; i < 8; ++i)
        for (Eigen::Index j = 0; j < 8; ++j)
            worst = std::max(worst, std::fabs(cov(i, j) / (sd(i) * sd(j)) - implied(i, j)));
    CHECK(worst < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("discretization preserves the rank-correlation sign structure") {
    const auto spec = simple_structure_spec(10, 2, .6, .8, .3, 5000, 23);
    const auto m = gen_likert(spec);
    const auto cm = screening::correlation_matrix(m, screening::CorrMethod::spearman);
    const Eigen::MatrixXd implied = spec.implied_correlation();
    for (Eigen::Index i = 0; i < 10; ++i)
        for (Eigen::Index j = i + 1; j < 10; ++j) {
            if (implied(i, j) > 0.2) CHECK(cm.r(i, j) > 0.0);
        }
}

TEST_CASE("planted_points: symmetric zero-diagonal output and noise bounds") {
    const auto pp = planted_points(9, 3, 2.0, 0.2, 5);
    CHECK(pp.x_true.rows() == 9);
    CHECK(pp.x_true.cols() == 3);
    pp.delta.validate(); // symmetric, nonnegative, zero diagonal by construction
    for (int i = 0; i < 9; ++i)
        for (int j = i + 1; j < 9; ++j) {
            const double exact = (pp.x_true.row(i) - pp.x_true.row(j)).norm();
            CHECK(pp.delta.delta(i, j) >= exact * 0.8 - 1e-12);
            CHECK(pp.delta.delta(i, j) <= exact * 1.2 + 1e-12);
        }
    CHECK_THROWS_AS(planted_points(3, 3, 1.0, 0.0, 1), Error);
}

TEST_CASE("matched_congruence: permutation and sign resolved") {
    Eigen::MatrixXd planted(6, 2);
    planted << .8, 0, .7, 0, .6, 0, 0, .9, 0, .8, 0, .7;
    Eigen::MatrixXd recovered(6, 2);
    recovered.col(0) = -planted.col(1); // swapped and sign-flipped
    recovered.col(1) = planted.col(0);
    const auto cong = matched_congruence(recovered, planted);
    REQUIRE(cong.size() == 2);
    CHECK(cong[0] == doctest::Approx(1.0));
    CHECK(cong[1] == doctest::Approx(1.0));
}

TEST_CASE("end-to-end: planted 5-factor model recovered through the pipeline") {
    const auto spec = simple_structure_spec(25, 5, .6, .8, .3, 1000, 424242);
    const auto m = gen_likert(spec);
    const auto cm = screening::correlation_matrix(m, screening::CorrMethod::pearson);
    const auto sol = efa::fit(cm.r, 5);
    const auto cong = matched_congruence(sol.pattern, spec.loadings);
    for (double c : cong) CHECK(c >= 0.95);

    const auto assignment = efa::assign_items(sol.pattern, m.item_ids, 0.4);
    const auto planted = planted_membership(spec);
    // map recovered factor -> planted factor through the congruence matching
    Eigen::MatrixXd cmat(5, 5);
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b)
            cmat(a, b) = std::fabs(efa::congruence(sol.pattern.col(a), spec.loadings.col(b)));
    for (std::size_t i = 0; i < assignment.items.size(); ++i) {
        REQUIRE(assignment.items[i].factor >= 0);
        Eigen::Index mapped = 0;
        cmat.row(assignment.items[i].factor).maxCoeff(&mapped);
        CHECK(static_cast<int>(mapped) == planted[i]);
    }
}

TEST_CASE("model spec json round trip") {
    const auto spec = simple_structure_spec(4, 2, .5, .8, .25, 99, 7);
    const auto text = spec.to_json_text();
    // write/read through a temp file
    const std::string path = "/tmp/lk_spec_roundtrip.json";
    {
        std::ofstream out(path);
        out << text;
    }
    const auto back = FactorModelSpec::from_json_file(path);
    CHECK((back.loadings - spec.loadings).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((back.phi - spec.phi).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(back.n == 99);
    CHECK(back.seed == 7);
}
