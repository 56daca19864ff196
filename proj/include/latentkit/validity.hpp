#pragma once

#include "latentkit/dataset.hpp"
#include "latentkit/inference.hpp"
#include "latentkit/screening.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace latentkit::validity {

// Mean squared loading of a factor's items.
double ave(const std::vector<double>& loadings);

struct FornellLarckerMatrix {
    std::vector<std::string> names;
    // AVE on the diagonal, squared observed correlations below it, squared
    // corrected correlations above it.
    Eigen::MatrixXd cells;
    // pass(i,j): 1 when both AVEs exceed the off-diagonal cell, else 0.
    Eigen::MatrixXi pass;
    bool all_observed_pass = true;
    bool all_corrected_pass = true;
};

FornellLarckerMatrix fornell_larcker(const std::vector<double>& ave_values,
                                     const screening::CorrMatrix& score_corr,
                                     const std::vector<double>& alphas);

enum class Direction { high_greater, low_greater };

enum class Verdict { confirmed, not_distinguished, reversed };

const char* to_string(Verdict v);

struct GroupComparison {
    std::string scale;
    std::size_t n_low = 0, n_high = 0;
    double mean_low = 0, mean_high = 0;
    double sd_low = 0, sd_high = 0;
    inference::Interval ci_low;  // 95% CI of each group mean
    inference::Interval ci_high;
    inference::TestResult t;
    inference::TestResult mann_whitney;
    Verdict verdict = Verdict::not_distinguished;
};

struct KnownGroupsReport {
    Direction direction = Direction::high_greater;
    double alpha = 0.05;
    std::vector<GroupComparison> scales;
};

// Compares every score column between the low and high quartile groups.
KnownGroupsReport known_groups(const dataset::ScoreTable& scores,
                               const std::vector<dataset::GroupLabel>& labels,
                               Direction direction = Direction::high_greater,
                               double alpha = 0.05);

} // namespace latentkit::validity
