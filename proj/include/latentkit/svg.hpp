#pragma once

#include "latentkit/cluster.hpp"
#include "latentkit/mds.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

// Static SVG plot emitters. Output is deterministic except for the
// generator-version comment on the first line.

namespace latentkit::svg {

std::string scree_plot(const Eigen::VectorXd& eigen_full, const Eigen::VectorXd& eigen_reduced);

// 2D configuration map with item labels; cluster_labels (optional) draws a
// convex loop around each cluster.
std::string mds_map(const mds::MdsSolution& solution, const std::vector<int>& cluster_labels = {});

std::string dendrogram_plot(const cluster::Dendrogram& d);

} // namespace latentkit::svg
