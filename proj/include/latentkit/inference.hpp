#pragma once

#include "latentkit/common.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace latentkit::inference {

enum class Tails { two_sided, less, greater };

struct TestResult {
    std::string method;
    double statistic = 0;
    double df = 0;
    double df2 = 0; // second df (F tests, Welch pairs store fractional df in df)
    double p_value = 1;
    Tails tails = Tails::two_sided;
    // Effect payload, populated where it applies.
    double effect = 0;          // mean difference, U, H, F, r ...
    std::string effect_label;
};

enum class TTestVariant { student, welch };

TestResult t_test(const std::vector<double>& a, const std::vector<double>& b,
                  TTestVariant variant = TTestVariant::student, Tails tails = Tails::two_sided);

// One-way ANOVA on absolute deviations from group means.
TestResult levene(const std::vector<std::vector<double>>& groups);

TestResult one_way_anova(const std::vector<std::vector<double>>& groups);

enum class MannWhitneyMode { exact, normal_approx };

// U with midranks. Exact mode enumerates every group labelling (total
// n <= 16) and reports the doubled smaller tail, capped at 1; approx mode
// uses the tie-corrected normal with continuity correction.
TestResult mann_whitney(const std::vector<double>& a, const std::vector<double>& b,
                        MannWhitneyMode mode = MannWhitneyMode::normal_approx);

TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

enum class PosthocMethod { lsd, bonferroni };

struct PairwiseResult {
    int group_a = 0;
    int group_b = 0;
    TestResult test;
    double p_adjusted = 1;
};

// Pairwise comparisons with the pooled ANOVA error term; Bonferroni
// multiplies p by the number of comparisons, clamped to 1.
std::vector<PairwiseResult> posthoc(const std::vector<std::vector<double>>& groups,
                                    PosthocMethod method);

enum class CorrKind { pearson, spearman };

TestResult correlate(const std::vector<double>& x, const std::vector<double>& y,
                     CorrKind kind = CorrKind::pearson);

struct Coefficient {
    std::string name;
    double b = 0;
    double se = 0;
    double beta = missing_value; // standardized; NaN for the intercept
    double t = 0;
    double p = 1;
};

struct RegressionResult {
    std::vector<Coefficient> coefficients; // intercept first
    double r2 = 0;
    double adjusted_r2 = 0;
    double f = 0;
    double df1 = 0;
    double df2 = 0;
    double f_p = 1;
    double condition_number = 0;
    std::size_t n = 0;
};

RegressionResult ols(const std::vector<double>& y, const Eigen::MatrixXd& x,
                     const std::vector<std::string>& names = {});

struct Interval {
    double lo = 0, hi = 0;
    double mean = 0;
    double level = 0.95;
};

Interval ci_mean(const std::vector<double>& x, double level = 0.95);

} // namespace latentkit::inference
