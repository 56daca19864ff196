#pragma once

#include "latentkit/common.hpp"
#include "latentkit/dataset.hpp"

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

namespace latentkit::efa {

struct FactorSolution {
    int m = 0;
    Eigen::MatrixXd unrotated;   // p x m
    Eigen::MatrixXd pattern;     // p x m
    Eigen::MatrixXd structure;   // p x m, = pattern * phi
    Eigen::MatrixXd phi;         // m x m factor correlations
    Eigen::VectorXd communalities_initial;   // SMC
    Eigen::VectorXd communalities_extracted; // h^2
    Eigen::VectorXd eigen_full;    // p eigenvalues of R, descending
    Eigen::VectorXd eigen_reduced; // p eigenvalues of the reduced matrix
    int iterations = 0;
    bool converged = false;
    bool heywood = false;
    // m > p/3 leaves factors weakly overdetermined.
    bool overdetermination_warning = false;
};

struct RetentionAdvice {
    int kaiser_count = 0;
    Eigen::VectorXd scree_full;
    Eigen::VectorXd scree_reduced;
};

struct ItemAssignment {
    std::string item;
    int factor = -1; // -1 = none
    std::vector<int> salient;
    bool cross_loading = false;
    bool below_threshold = false;
    bool tie = false;
    bool overridden = false;
};

struct AssignmentReport {
    double threshold = 0.4;
    std::vector<ItemAssignment> items;
    // Items grouped per factor, in input order.
    std::vector<std::vector<std::string>> factor_items;
};

// SMC_i = 1 - 1/(R^-1)_ii.
Eigen::VectorXd smc(const Eigen::MatrixXd& r);

struct EigenSpectrum {
    Eigen::VectorXd full;
    Eigen::VectorXd reduced;
};

EigenSpectrum eigen_spectrum(const Eigen::MatrixXd& r,
                             const Eigen::VectorXd& communalities = Eigen::VectorXd());

int kaiser_count(const Eigen::VectorXd& eigen_full);

struct PafOptions {
    double tol = 1e-4;
    int max_iter = 100;
    // Optional custom starting communalities; SMC when empty.
    Eigen::VectorXd init;
};

// Iterated principal-axis extraction on the reduced correlation matrix.
FactorSolution paf_extract(const Eigen::MatrixXd& r, int m, const PafOptions& opts = {});

struct VarimaxResult {
    Eigen::MatrixXd loadings;
    Eigen::MatrixXd rotation; // orthogonal
    bool converged = true;
};

VarimaxResult varimax(const Eigen::MatrixXd& loadings, bool kaiser_normalize = true,
                      double eps = 1e-10, int max_iter = 200);

struct PromaxResult {
    Eigen::MatrixXd pattern;
    Eigen::MatrixXd structure;
    Eigen::MatrixXd phi;
    Eigen::MatrixXd rotation; // total oblique transform from the unrotated loadings
};

PromaxResult promax(const Eigen::MatrixXd& varimax_loadings, const Eigen::MatrixXd& varimax_rotation,
                    double kappa = 4.0);

struct RotatedVariance {
    Eigen::VectorXd v;              // per-factor sum of structure * pattern
    Eigen::VectorXd percent_total;  // 100 v / p
    Eigen::VectorXd percent_common; // 100 v / sum(v)
};

RotatedVariance rotated_variance(const Eigen::MatrixXd& pattern, const Eigen::MatrixXd& structure);

AssignmentReport assign_items(const Eigen::MatrixXd& pattern, const std::vector<std::string>& items,
                              double threshold = 0.4, const std::map<std::string, int>& overrides = {});

// Equal-weight mean over each factor's assigned items.
dataset::ScoreTable factor_scores(const dataset::ResponseMatrix& m, const AssignmentReport& assignment,
                                  const std::vector<std::string>& factor_names = {});

struct EfaOptions {
    PafOptions paf;
    double kappa = 4.0;
    bool sort_by_variance = true; // order factors by rotated variance, descending
};

// PAF + varimax + promax in one call; factors ordered by explained variance.
FactorSolution fit(const Eigen::MatrixXd& r, int m, const EfaOptions& opts = {});

// Tucker's congruence coefficient between two loading columns.
double congruence(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

} // namespace latentkit::efa
