#pragma once

#include "latentkit/common.hpp"
#include "latentkit/screening.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace latentkit::reliability {

struct ReliabilityReport {
    double alpha = missing_value;
    double alpha_standardized = missing_value;
    std::size_t k = 0;
    std::size_t n = 0; // complete rows used
    std::vector<std::string> items;
    std::vector<double> alpha_if_deleted;
    std::vector<double> corrected_item_total;
};

// Covariance-form Cronbach's alpha over the complete rows of an n x k item
// block. Throws degenerate when the total score has zero variance.
double cronbach_alpha(const Eigen::MatrixXd& items);

// k r_bar / (1 + (k-1) r_bar); equals the covariance form when the item
// variances are all equal.
double cronbach_alpha_standardized(const Eigen::MatrixXd& items);

std::vector<double> alpha_if_deleted(const Eigen::MatrixXd& items);

// Pearson r of each item against the sum of the remaining items.
std::vector<double> corrected_item_total(const Eigen::MatrixXd& items);

// Full report for a named item subset; incomplete rows are dropped first.
ReliabilityReport analyze(const dataset::ResponseMatrix& m, const std::vector<std::string>& items);

struct Disattenuated {
    double value = missing_value;
    bool overcorrected = false; // |value| > 1
};

// r / sqrt(alpha_a * alpha_b); alphas must lie in (0, 1].
Disattenuated disattenuate(double r_obs, double alpha_a, double alpha_b);

// Alphas on the diagonal, observed correlations below it, corrected
// correlations above it.
struct DisattenuatedMatrix {
    std::vector<std::string> names;
    Eigen::MatrixXd cells;
    std::vector<std::pair<int, int>> overcorrected;
};

DisattenuatedMatrix disattenuated_matrix(const screening::CorrMatrix& score_corr,
                                         const std::vector<double>& alphas);

} // namespace latentkit::reliability
