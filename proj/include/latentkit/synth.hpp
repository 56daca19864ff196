#pragma once

#include "latentkit/dataset.hpp"
#include "latentkit/mds.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace latentkit::synth {

// Common-factor population model used to generate Likert data with a known
// planted structure.
struct FactorModelSpec {
    Eigen::MatrixXd loadings;    // p x m
    Eigen::MatrixXd phi;         // m x m, unit diagonal, positive definite
    Eigen::VectorXd uniqueness;  // length p; derived from loadings when empty
    // Per-item thresholds mapping the latent continuum to categories;
    // equal-probability quintiles of the standard normal when empty.
    std::vector<std::vector<double>> thresholds;
    int categories = 5;
    int n = 0;
    std::uint64_t seed = 0;
    bool rescaled = false; // implied diagonal was not 1 and got rescaled

    // Implied population correlation matrix L Phi L' + Psi.
    Eigen::MatrixXd implied_correlation() const;
    // True when the implied diagonal is not 1 and generation rescales items.
    bool needs_rescaling() const;
    static FactorModelSpec from_json_file(const std::string& path);
    std::string to_json_text() const;
};

// Simple-structure spec: p items split evenly over m factors, loadings
// spaced over [load_lo, load_hi], constant phi off-diagonal.
FactorModelSpec simple_structure_spec(int p, int m, double load_lo, double load_hi,
                                      double phi_offdiag, int n, std::uint64_t seed);

// Continuous latent item scores y = L f + e (unit variance per item); the
// discretization below thresholds these into categories.
Eigen::MatrixXd gen_latent(const FactorModelSpec& spec);

// Seed-deterministic Likert matrix from the planted model; identical seed,
// identical output.
dataset::ResponseMatrix gen_likert(const FactorModelSpec& spec);

// Which factor each item was planted on (by max |loading|).
std::vector<int> planted_membership(const FactorModelSpec& spec);

struct PlantedPoints {
    Eigen::MatrixXd x_true; // p x k
    mds::Dissimilarity delta;
};

// Seeded coordinates with exact (optionally noise-perturbed) distances.
PlantedPoints planted_points(int p, int k, double spread, double noise, std::uint64_t seed);

// Best column matching (by total |Tucker congruence|) between recovered and
// planted loadings; returns per-planted-factor congruence magnitudes.
std::vector<double> matched_congruence(const Eigen::MatrixXd& recovered,
                                       const Eigen::MatrixXd& planted);

} // namespace latentkit::synth
