#pragma once

#include "latentkit/mds.hpp"

#include <string>
#include <vector>

namespace latentkit::cluster {

struct Merge {
    int cluster_a = 0; // ids: 0..p-1 leaves, p.. merged clusters
    int cluster_b = 0;
    double height = 0;
    int new_id = 0;
};

struct Dendrogram {
    int leaves = 0;
    std::vector<std::string> labels;
    std::vector<Merge> merges; // exactly leaves - 1
};

enum class Linkage { single, average };

// Agglomerative clustering; inter-cluster distance is the minimum pairwise
// distance (or the mean for the flag-gated average linkage). Ties merge the
// smallest (a, b) id pair.
Dendrogram agglomerate(const mds::Dissimilarity& d, Linkage linkage = Linkage::single);

inline Dendrogram single_linkage(const mds::Dissimilarity& d) {
    return agglomerate(d, Linkage::single);
}

// Labels 0..k-1 from undoing the last k-1 merges, numbered by first
// appearance in leaf order.
std::vector<int> cut(const Dendrogram& dendrogram, int k);

} // namespace latentkit::cluster
