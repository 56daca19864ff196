#include "latentkit/cluster.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>

namespace latentkit::cluster {

Dendrogram agglomerate(const mds::Dissimilarity& d, Linkage linkage) {
    d.validate();
    const int p = static_cast<int>(d.p());
    if (p < 2) fail(errc::insufficient_data, "clustering needs >= 2 points");

    Dendrogram out;
    out.leaves = p;
    out.labels = d.labels;

    // active clusters as member lists keyed by cluster id
    std::vector<int> ids;
    std::vector<std::vector<int>> members;
    for (int i = 0; i < p; ++i) {
        ids.push_back(i);
        members.push_back({i});
    }

    auto cluster_distance = [&](const std::vector<int>& a, const std::vector<int>& b) {
        if (linkage == Linkage::single) {
            double best = std::numeric_limits<double>::infinity();
            for (int x : a)
                for (int y : b) best = std::min(best, d.delta(x, y));
            return best;
        }
        double acc = 0;
        for (int x : a)
            for (int y : b) acc += d.delta(x, y);
        return acc / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
    };

    int next_id = p;
    while (ids.size() > 1) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 1;
        for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
            for (std::size_t j = i + 1; j < ids.size(); ++j) {
                const double dist = cluster_distance(members[i], members[j]);
                const auto key = std::minmax(ids[i], ids[j]);
                const auto best_key = std::minmax(ids[bi], ids[bj]);
                if (dist < best || (dist == best && key < best_key)) {
                    best = dist;
                    bi = i;
                    bj = j;
                }
            }
        }
        Merge m;
        m.cluster_a = std::min(ids[bi], ids[bj]);
        m.cluster_b = std::max(ids[bi], ids[bj]);
        m.height = best;
        m.new_id = next_id++;
        out.merges.push_back(m);

        members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
        std::sort(members[bi].begin(), members[bi].end());
        ids[bi] = m.new_id;
        members.erase(members.begin() + static_cast<std::ptrdiff_t>(bj));
        ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(bj));
    }
    return out;
}

std::vector<int> cut(const Dendrogram& dendrogram, int k) {
    const int p = dendrogram.leaves;
    if (k < 1 || k > p) fail(errc::domain_error, "cut level out of range");

    // Union the first p - k merges.
    std::vector<int> parent(static_cast<std::size_t>(p) + dendrogram.merges.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) {
        while (parent[static_cast<std::size_t>(v)] != v) {
            parent[static_cast<std::size_t>(v)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
            v = parent[static_cast<std::size_t>(v)];
        }
        return v;
    };
    for (int s = 0; s < p - k; ++s) {
        const Merge& m = dendrogram.merges[static_cast<std::size_t>(s)];
        parent[static_cast<std::size_t>(find(m.cluster_a))] = m.new_id;
        parent[static_cast<std::size_t>(find(m.cluster_b))] = m.new_id;
    }

    std::vector<int> labels(static_cast<std::size_t>(p), -1);
    std::vector<int> root_label;
    std::vector<int> roots;
    for (int i = 0; i < p; ++i) {
        const int r = find(i);
        int lbl = -1;
        for (std::size_t q = 0; q < roots.size(); ++q)
            if (roots[q] == r) lbl = root_label[q];
        if (lbl < 0) {
            lbl = static_cast<int>(roots.size());
            roots.push_back(r);
            root_label.push_back(lbl);
        }
        labels[static_cast<std::size_t>(i)] = lbl;
    }
    return labels;
}

} // namespace latentkit::cluster
