#pragma once

#include "latentkit/dataset.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace latentkit::screening {

struct ItemDescriptives {
    std::string item;
    std::size_t n = 0;
    double mean = missing_value;
    double sd = missing_value;   // sample, n-1 denominator
    double skew = missing_value; // adjusted Fisher-Pearson
    double kurtosis = missing_value; // excess, bias-adjusted
    bool constant = false;
};

struct Descriptives {
    std::vector<ItemDescriptives> items;
};

enum class CorrMethod { pearson, spearman, kendall_tau_b };

const char* to_string(CorrMethod m);

struct CorrMatrix {
    std::vector<std::string> item_ids;
    Eigen::MatrixXd r;                 // unit diagonal, NaN where undefined
    Eigen::MatrixXi pair_n;            // pairwise-complete counts
    CorrMethod method = CorrMethod::pearson;
    std::vector<std::string> flags;    // zero-variance items, sparse cells

    Eigen::Index p() const { return r.rows(); }
};

struct FactorabilityReport {
    double bartlett_chi2 = 0;
    double bartlett_df = 0;
    double bartlett_p = 1;
    double kmo_overall = missing_value;
    std::vector<double> kmo_per_item;
    double share_pairs_abs_r_ge_03 = 0;
    std::vector<std::string> skew_flags;     // items with |skew| > 2
    std::vector<std::string> kurtosis_flags; // items with |excess kurtosis| > 7
    std::size_t n_used = 0;
    bool factorable = false;
};

Descriptives item_descriptives(const dataset::ResponseMatrix& m);

// Pairwise-complete correlations; cells with < 3 complete pairs or a
// zero-variance margin are missing and flagged.
CorrMatrix correlation_matrix(const dataset::ResponseMatrix& m, CorrMethod method);

// Midranks of the non-missing entries (ties share their average rank).
std::vector<double> midranks(const std::vector<double>& x);

// Tie-corrected Kendall tau-b for two complete columns.
double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y);

struct BartlettResult {
    double chi2 = 0;
    double df = 0;
    double p = 1;
};

// chi2 = -(n - 1 - (2p+5)/6) ln det(R).
BartlettResult bartlett_sphericity(const Eigen::MatrixXd& r, std::size_t n);

struct KmoResult {
    double overall = 0;
    std::vector<double> per_item;
};

KmoResult kmo(const Eigen::MatrixXd& r);

// Listwise Pearson correlations feed Bartlett/KMO; descriptive gates use
// all available values per item.
FactorabilityReport factorability_report(const dataset::ResponseMatrix& m);

} // namespace latentkit::screening
