#pragma once

#include "latentkit/common.hpp"
#include "latentkit/screening.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace latentkit::mds {

enum class DissimilarityTransform { one_minus_r, sqrt_two_one_minus_r };

struct Dissimilarity {
    std::vector<std::string> labels;
    Eigen::MatrixXd delta; // symmetric, nonnegative, zero diagonal
    std::string provenance = "external";

    Eigen::Index p() const { return delta.rows(); }
    void validate() const;
};

Dissimilarity corr_to_dissimilarity(const screening::CorrMatrix& r,
                                    DissimilarityTransform t = DissimilarityTransform::one_minus_r);

Dissimilarity from_matrix(Eigen::MatrixXd delta, std::vector<std::string> labels = {});

// Squared Euclidean row distances, the nearest-neighbour clustering input.
Dissimilarity squared_euclidean(const Eigen::MatrixXd& x, std::vector<std::string> labels = {});

struct ClassicalInit {
    Eigen::MatrixXd x;
    bool fallback_random = false; // no positive eigenvalue, seeded random used
};

// Torgerson double centering; deterministic start for the iterative fits.
ClassicalInit classical_init(const Dissimilarity& d, int k, std::uint64_t seed = 0);

// Least-squares monotone non-decreasing fit, pooled weighted means.
std::vector<double> pava(const std::vector<double>& y, const std::vector<double>& weights = {});

double stress1(const std::vector<double>& d, const std::vector<double>& d_hat);
// Squared Pearson correlation between disparities and distances.
double rsq(const std::vector<double>& d_hat, const std::vector<double>& d);

enum class Transform { interval, ordinal };

struct MdsOptions {
    int restarts = 10; // classical init plus restarts-1 random starts
    double tol = 1e-6;
    int max_iter = 500;
    int threads = 1;
};

struct MdsSolution {
    Eigen::MatrixXd configuration; // p x k
    std::vector<std::string> labels;
    std::vector<double> disparities; // pair order (0,1),(0,2),...,(p-2,p-1)
    std::vector<double> distances;
    double stress = 0;
    double rsq = missing_value;
    Transform transform = Transform::ordinal;
    int iterations = 0;
    int restarts_used = 0;
    int best_start = 0; // 0 = classical init
    bool converged = false;
    bool degenerate = false;
    bool stability_warning = false; // p < 4k + 1
    // Interval transform parameters of the reported fit.
    double linear_a = 0, linear_b = 1;
    std::vector<std::string> flags;
};

MdsSolution nonmetric_mds(const Dissimilarity& d, int k, std::uint64_t seed = 0,
                          const MdsOptions& opts = {});

MdsSolution metric_mds(const Dissimilarity& d, int k, std::uint64_t seed = 0,
                       const MdsOptions& opts = {});

// Axes aligned with the principal components of the configuration;
// pairwise distances unchanged.
Eigen::MatrixXd rotate_principal(const Eigen::MatrixXd& x);

struct StressBaseline {
    double mean = 0;
    double sd = 0;
    double p05 = 0; // 5th percentile
    double min = 0;
    double max = 0;
    int trials = 0;
};

// Monte Carlo stress of the ordinal fit on uniform-random dissimilarities.
StressBaseline random_stress_baseline(int p, int k, int trials, std::uint64_t seed,
                                      const MdsOptions& opts = {.restarts = 4});

} // namespace latentkit::mds
