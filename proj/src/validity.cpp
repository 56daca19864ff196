#include "latentkit/validity.hpp"

#include "latentkit/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace latentkit::validity {

double ave(const std::vector<double>& loadings) {
    if (loadings.empty()) fail(errc::config_error, "AVE over zero loadings");
    double acc = 0;
    for (double l : loadings) acc += l * l;
    return acc / static_cast<double>(loadings.size());
}

FornellLarckerMatrix fornell_larcker(const std::vector<double>& ave_values,
                                     const screening::CorrMatrix& score_corr,
                                     const std::vector<double>& alphas) {
    const Eigen::Index m = score_corr.p();
    if (static_cast<Eigen::Index>(ave_values.size()) != m ||
        static_cast<Eigen::Index>(alphas.size()) != m)
        fail(errc::domain_error, "AVE/alpha counts must match matrix order");

    FornellLarckerMatrix out;
    out.names = score_corr.item_ids;
    out.cells.resize(m, m);
    out.pass.setOnes(m, m);
    for (Eigen::Index i = 0; i < m; ++i) out.cells(i, i) = ave_values[static_cast<std::size_t>(i)];

    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const double r = score_corr.r(i, j);
            const double corrected =
                reliability::disattenuate(r, alphas[static_cast<std::size_t>(i)],
                                          alphas[static_cast<std::size_t>(j)])
                    .value;
            out.cells(j, i) = r * r;                 // observed squared, below
            out.cells(i, j) = corrected * corrected; // corrected squared, above
            const double ave_i = out.cells(i, i);
            const double ave_j = out.cells(j, j);
            const bool obs_ok = ave_i > out.cells(j, i) && ave_j > out.cells(j, i);
            const bool cor_ok = ave_i > out.cells(i, j) && ave_j > out.cells(i, j);
            out.pass(j, i) = obs_ok ? 1 : 0;
            out.pass(i, j) = cor_ok ? 1 : 0;
            out.all_observed_pass = out.all_observed_pass && obs_ok;
            out.all_corrected_pass = out.all_corrected_pass && cor_ok;
        }
    }
    return out;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::confirmed: return "CONFIRMED";
        case Verdict::not_distinguished: return "NOT_DISTINGUISHED";
        case Verdict::reversed: return "REVERSED";
    }
    return "?";
}

KnownGroupsReport known_groups(const dataset::ScoreTable& scores,
                               const std::vector<dataset::GroupLabel>& labels, Direction direction,
                               double alpha) {
    std::unordered_map<std::string, const dataset::GroupLabel*> by_id;
    for (const auto& l : labels) by_id[l.respondent_id] = &l;

    KnownGroupsReport rep;
    rep.direction = direction;
    rep.alpha = alpha;

    for (std::size_t c = 0; c < scores.columns.size(); ++c) {
        std::vector<double> low, high;
        for (Eigen::Index i = 0; i < scores.values.rows(); ++i) {
            const double v = scores.values(i, static_cast<Eigen::Index>(c));
            if (is_missing(v)) continue;
            const auto it = by_id.find(scores.respondent_ids[static_cast<std::size_t>(i)]);
            if (it == by_id.end()) continue;
            if (it->second->low) low.push_back(v);
            if (it->second->high) high.push_back(v);
        }
        if (low.size() < 2 || high.size() < 2)
            fail(errc::insufficient_data, "group size < 2 for " + scores.columns[c]);

        GroupComparison gc;
        gc.scale = scores.columns[c];
        gc.n_low = low.size();
        gc.n_high = high.size();
        auto msd = [](const std::vector<double>& x) {
            const double n = static_cast<double>(x.size());
            double m = 0;
            for (double v : x) m += v;
            m /= n;
            double s2 = 0;
            for (double v : x) s2 += (v - m) * (v - m);
            return std::make_pair(m, std::sqrt(s2 / (n - 1.0)));
        };
        std::tie(gc.mean_low, gc.sd_low) = msd(low);
        std::tie(gc.mean_high, gc.sd_high) = msd(high);
        gc.ci_low = inference::ci_mean(low);
        gc.ci_high = inference::ci_mean(high);

        gc.t = inference::t_test(high, low, inference::TTestVariant::student);
        gc.mann_whitney = inference::mann_whitney(
            high, low,
            high.size() + low.size() <= 16 ? inference::MannWhitneyMode::exact
                                           : inference::MannWhitneyMode::normal_approx);

        const double diff = gc.mean_high - gc.mean_low;
        const double wanted = direction == Direction::high_greater ? 1.0 : -1.0;
        if (gc.t.p_value < alpha)
            gc.verdict = diff * wanted > 0 ? Verdict::confirmed : Verdict::reversed;
        else
            gc.verdict = Verdict::not_distinguished;
        rep.scales.push_back(std::move(gc));
    }
    return rep;
}

} // namespace latentkit::validity
