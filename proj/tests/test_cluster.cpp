#include "latentkit/cluster.hpp"

#include "latentkit/rng.hpp"
#include "latentkit/synth.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <map>
#include <set>

using namespace latentkit;
using namespace latentkit::cluster;

namespace {

mds::Dissimilarity tri(double d12, double d13, double d23) {
    Eigen::MatrixXd m(3, 3);
    m << 0, d12, d13, d12, 0, d23, d13, d23, 0;
    return mds::from_matrix(m, {"a", "b", "c"});
}

// O(p^3) oracle recomputing the single-linkage minimum over raw pairs at
// every step.
std::vector<double> single_heights_oracle(const Eigen::MatrixXd& delta) {
    const int p = static_cast<int>(delta.rows());
    std::vector<std::set<int>> clusters;
    for (int i = 0; i < p; ++i) clusters.push_back({i});
    std::vector<double> heights;
    while (clusters.size() > 1) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 1;
        for (std::size_t i = 0; i + 1 < clusters.size(); ++i)
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                double d = std::numeric_limits<double>::infinity();
                for (int a : clusters[i])
                    for (int b : clusters[j]) d = std::min(d, delta(a, b));
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        heights.push_back(best);
        clusters[bi].insert(clusters[bj].begin(), clusters[bj].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    }
    return heights;
}

} // namespace

TEST_CASE("single_linkage: hand trace on three points") {
    const auto d = tri(1, 5, 4);
    const auto dend = single_linkage(d);
    REQUIRE(dend.merges.size() == 2);
    CHECK(dend.merges[0].cluster_a == 0);
    CHECK(dend.merges[0].cluster_b == 1);
    CHECK(dend.merges[0].height == doctest::Approx(1.0));
    CHECK(dend.merges[1].height == doctest::Approx(4.0)); // min(5,4)
    CHECK(dend.merges[1].new_id == 4);
}

TEST_CASE("single_linkage: identical points merge at height zero") {
    Eigen::MatrixXd m(3, 3);
    m << 0, 0, 2, 0, 0, 2, 2, 2, 0;
    const auto dend = single_linkage(mds::from_matrix(m));
    CHECK(dend.merges[0].height == doctest::Approx(0.0));
}

TEST_CASE("single_linkage: heights non-decreasing and equal to the oracle") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        CounterRng rng(seed);
        const int p = 4 + static_cast<int>(rng.uniform(0) * 7);
        Eigen::MatrixXd delta(p, p);
        delta.setZero();
        std::uint64_t c = 1;
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) {
                const double v = rng.uniform(c++, 0.1, 10.0);
                delta(i, j) = delta(j, i) = v;
            }
        const auto dend = single_linkage(mds::from_matrix(delta));
        const auto oracle = single_heights_oracle(delta);
        REQUIRE(dend.merges.size() == oracle.size());
        double prev = -1;
        for (std::size_t s = 0; s < oracle.size(); ++s) {
            CHECK(dend.merges[s].height == doctest::Approx(oracle[s]).epsilon(1e-12));
            CHECK(dend.merges[s].height >= prev);
            prev = dend.merges[s].height;
        }
    }
}

TEST_CASE("cut: extreme levels and the hand example") {
    const auto d = tri(1, 5, 4);
    const auto dend = single_linkage(d);
    const auto all_separate = cut(dend, 3);
    CHECK(std::set<int>(all_separate.begin(), all_separate.end()).size() == 3);
    const auto one = cut(dend, 1);
    CHECK(std::set<int>(one.begin(), one.end()).size() == 1);
    const auto two = cut(dend, 2);
    CHECK(two[0] == two[1]);
    CHECK(two[0] != two[2]);
    CHECK_THROWS_AS(cut(dend, 0), Error);
    CHECK_THROWS_AS(cut(dend, 4), Error);
}

TEST_CASE("cut: k-cut refines the (k-1)-cut") {
    const auto planted = synth::planted_points(12, 2, 3.0, 0.1, 6);
    const auto dend = single_linkage(planted.delta);
    for (int k = 2; k <= 12; ++k) {
        const auto fine = cut(dend, k);
        const auto coarse = cut(dend, k - 1);
        // every fine cluster maps into exactly one coarse cluster
        std::map<int, int> image;
        for (std::size_t i = 0; i < fine.size(); ++i) {
            const auto it = image.find(fine[i]);
            if (it == image.end()) image[fine[i]] = coarse[i];
            else CHECK(it->second == coarse[i]);
        }
    }
}

TEST_CASE("cut: labels invariant under leaf reordering up to relabeling") {
    CounterRng rng(42);
    const int p = 8;
    Eigen::MatrixXd delta(p, p);
    delta.setZero();
    std::uint64_t c = 1;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            const double v = rng.uniform(c++, 0.1, 10.0);
            delta(i, j) = delta(j, i) = v;
        }
    std::vector<int> perm{3, 1, 4, 0, 5, 2, 7, 6};
    Eigen::MatrixXd permuted(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) permuted(i, j) = delta(perm[static_cast<std::size_t>(i)],
                                                           perm[static_cast<std::size_t>(j)]);
    const auto base = cut(single_linkage(mds::from_matrix(delta)), 3);
    const auto moved = cut(single_linkage(mds::from_matrix(permuted)), 3);
    // same partition after mapping leaf i -> perm[i]
    std::map<std::pair<int, int>, bool> agree;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            const bool same_base = base[perm[static_cast<std::size_t>(i)]] ==
                                   base[perm[static_cast<std::size_t>(j)]];
            const bool same_moved = moved[static_cast<std::size_t>(i)] ==
                                    moved[static_cast<std::size_t>(j)];
            CHECK(same_base == same_moved);
        }
}

TEST_CASE("average linkage differs from single on a chained layout") {
    // chain: 0-1 close, 1-2 close, 0-2 far; single chains them early
    Eigen::MatrixXd m(4, 4);
    m << 0, 1, 2, 9, 1, 0, 1, 9, 2, 1, 0, 9, 9, 9, 9, 0;
    const auto single = agglomerate(mds::from_matrix(m), Linkage::single);
    const auto average = agglomerate(mds::from_matrix(m), Linkage::average);
    CHECK(single.merges[2].height <= average.merges[2].height);
}

TEST_CASE("squared-euclidean derivation feeds clustering") {
    Eigen::MatrixXd x(4, 2);
    x << 0, 0, 0, 1, 5, 5, 5, 6.5;
    const auto d = mds::squared_euclidean(x, {"p", "q", "r", "s"});
    CHECK(d.delta(0, 1) == doctest::Approx(1.0));
    CHECK(d.delta(2, 3) == doctest::Approx(2.25));
    const auto labels = cut(single_linkage(d), 2);
    CHECK(labels[0] == labels[1]);
    CHECK(labels[2] == labels[3]);
    CHECK(labels[0] != labels[2]);
}
