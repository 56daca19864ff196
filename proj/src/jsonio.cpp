#include "latentkit/jsonio.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>

namespace latentkit::io {

namespace {

json num_or_null(double v) {
    if (is_missing(v)) return nullptr;
    return v;
}

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num_or_null(v(i)));
    return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(num_or_null(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

std::string format_number(double v) {
    if (is_missing(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

json to_json(const dataset::IngestReport& r) {
    json j;
    j["received"] = r.received;
    j["duplicates"] = r.duplicates;
    j["disqualified"] = r.disqualified;
    j["malformed"] = r.malformed;
    j["retained"] = r.retained;
    j["row_errors"] = json::array();
    for (const auto& e : r.row_errors)
        j["row_errors"].push_back({{"row", e.row}, {"message", e.message}});
    j["cell_errors"] = json::array();
    for (const auto& e : r.cell_errors)
        j["cell_errors"].push_back({{"respondent", e.respondent_id},
                                    {"item", e.item_id},
                                    {"raw", e.raw},
                                    {"message", e.message}});
    return j;
}

json to_json(const screening::Descriptives& d) {
    json items = json::array();
    for (const auto& it : d.items) {
        items.push_back({{"item", it.item},
                         {"n", it.n},
                         {"mean", num_or_null(it.mean)},
                         {"sd", num_or_null(it.sd)},
                         {"skew", num_or_null(it.skew)},
                         {"kurtosis", num_or_null(it.kurtosis)},
                         {"constant", it.constant}});
    }
    return json{{"items", std::move(items)}};
}

json to_json(const screening::FactorabilityReport& r) {
    json j;
    j["bartlett"] = {{"chi2", r.bartlett_chi2}, {"df", r.bartlett_df}, {"p", r.bartlett_p}};
    j["kmo_overall"] = num_or_null(r.kmo_overall);
    j["kmo_per_item"] = r.kmo_per_item;
    j["share_pairs_abs_r_ge_0_3"] = r.share_pairs_abs_r_ge_03;
    j["skew_flags"] = r.skew_flags;
    j["kurtosis_flags"] = r.kurtosis_flags;
    j["n_used"] = r.n_used;
    j["verdict"] = r.factorable ? "FACTORABLE" : "NOT_FACTORABLE";
    return j;
}

json to_json(const efa::FactorSolution& s, const std::vector<std::string>& items) {
    json j;
    j["m"] = s.m;
    j["items"] = items;
    j["unrotated"] = matrix_json(s.unrotated);
    j["pattern"] = matrix_json(s.pattern);
    j["structure"] = matrix_json(s.structure);
    j["phi"] = matrix_json(s.phi);
    j["communalities_initial"] = vector_json(s.communalities_initial);
    j["communalities_extracted"] = vector_json(s.communalities_extracted);
    if (s.heywood) {
        // Raw values stay above; the clamped view is what a table would show.
        Eigen::VectorXd clamped = s.communalities_extracted.cwiseMin(1.0);
        j["communalities_clamped"] = vector_json(clamped);
    }
    j["eigen_full"] = vector_json(s.eigen_full);
    j["eigen_reduced"] = vector_json(s.eigen_reduced);
    j["iterations"] = s.iterations;
    j["converged"] = s.converged;
    j["heywood"] = s.heywood;
    j["overdetermination_warning"] = s.overdetermination_warning;
    return j;
}

json to_json(const efa::RetentionAdvice& r) {
    json j;
    j["kaiser_count"] = r.kaiser_count;
    j["scree_full"] = vector_json(r.scree_full);
    j["scree_reduced"] = vector_json(r.scree_reduced);
    return j;
}

json to_json(const efa::AssignmentReport& r) {
    json j;
    j["threshold"] = r.threshold;
    json items = json::array();
    for (const auto& a : r.items) {
        items.push_back({{"item", a.item},
                         {"factor", a.factor < 0 ? json(nullptr) : json(a.factor + 1)},
                         {"salient", a.salient},
                         {"cross_loading", a.cross_loading},
                         {"below_threshold", a.below_threshold},
                         {"tie", a.tie},
                         {"overridden", a.overridden}});
    }
    j["items"] = std::move(items);
    j["factor_items"] = r.factor_items;
    return j;
}

json to_json(const reliability::ReliabilityReport& r) {
    json j;
    j["alpha"] = num_or_null(r.alpha);
    j["alpha_standardized"] = num_or_null(r.alpha_standardized);
    j["k"] = r.k;
    j["n"] = r.n;
    j["items"] = r.items;
    json per = json::array();
    for (std::size_t i = 0; i < r.items.size(); ++i) {
        json e;
        e["item"] = r.items[i];
        e["alpha_if_deleted"] =
            i < r.alpha_if_deleted.size() ? num_or_null(r.alpha_if_deleted[i]) : json(nullptr);
        e["corrected_item_total"] =
            i < r.corrected_item_total.size() ? num_or_null(r.corrected_item_total[i]) : json(nullptr);
        per.push_back(std::move(e));
    }
    j["per_item"] = std::move(per);
    return j;
}

json to_json(const reliability::DisattenuatedMatrix& m) {
    json j;
    j["names"] = m.names;
    j["layout"] = "alphas on diagonal, observed below, corrected above";
    j["cells"] = matrix_json(m.cells);
    json w = json::array();
    for (const auto& [a, b] : m.overcorrected) w.push_back({{"i", a}, {"j", b}});
    j["overcorrected"] = std::move(w);
    return j;
}

json to_json(const validity::FornellLarckerMatrix& m) {
    json j;
    j["names"] = m.names;
    j["layout"] = "AVE on diagonal, observed r^2 below, corrected r^2 above";
    j["cells"] = matrix_json(m.cells);
    json pass = json::array();
    for (Eigen::Index i = 0; i < m.pass.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.pass.cols(); ++c) row.push_back(m.pass(i, c) != 0);
        pass.push_back(std::move(row));
    }
    j["pass"] = std::move(pass);
    j["all_observed_pass"] = m.all_observed_pass;
    j["all_corrected_pass"] = m.all_corrected_pass;
    return j;
}

json to_json(const inference::TestResult& t) {
    json j;
    j["method"] = t.method;
    j["statistic"] = num_or_null(t.statistic);
    j["df"] = t.df;
    if (t.df2 > 0) j["df2"] = t.df2;
    j["p_value"] = t.p_value;
    j["tails"] = t.tails == inference::Tails::two_sided
                     ? "two_sided"
                     : (t.tails == inference::Tails::less ? "less" : "greater");
    j["effect"] = num_or_null(t.effect);
    j["effect_label"] = t.effect_label;
    return j;
}

json to_json(const validity::KnownGroupsReport& r) {
    json j;
    j["direction"] = r.direction == validity::Direction::high_greater ? "high_greater" : "low_greater";
    j["alpha"] = r.alpha;
    json scales = json::array();
    for (const auto& s : r.scales) {
        scales.push_back({{"scale", s.scale},
                          {"n_low", s.n_low},
                          {"n_high", s.n_high},
                          {"mean_low", s.mean_low},
                          {"mean_high", s.mean_high},
                          {"sd_low", s.sd_low},
                          {"sd_high", s.sd_high},
                          {"ci95_low", {{"lo", s.ci_low.lo}, {"hi", s.ci_low.hi}}},
                          {"ci95_high", {{"lo", s.ci_high.lo}, {"hi", s.ci_high.hi}}},
                          {"t_test", to_json(s.t)},
                          {"mann_whitney", to_json(s.mann_whitney)},
                          {"verdict", validity::to_string(s.verdict)}});
    }
    j["scales"] = std::move(scales);
    return j;
}

json to_json(const inference::RegressionResult& r) {
    json j;
    json coefs = json::array();
    for (const auto& c : r.coefficients) {
        coefs.push_back({{"name", c.name},
                         {"b", c.b},
                         {"se", c.se},
                         {"beta", num_or_null(c.beta)},
                         {"t", c.t},
                         {"p", c.p}});
    }
    j["coefficients"] = std::move(coefs);
    j["r2"] = r.r2;
    j["adjusted_r2"] = r.adjusted_r2;
    j["f"] = r.f;
    j["df1"] = r.df1;
    j["df2"] = r.df2;
    j["f_p"] = r.f_p;
    j["condition_number"] = r.condition_number;
    j["n"] = r.n;
    return j;
}

json to_json(const mds::MdsSolution& s) {
    json j;
    j["transform"] = s.transform == mds::Transform::ordinal ? "ordinal" : "interval";
    j["stress1"] = s.stress;
    j["rsq"] = num_or_null(s.rsq);
    j["iterations"] = s.iterations;
    j["restarts_used"] = s.restarts_used;
    j["best_start"] = s.best_start;
    j["converged"] = s.converged;
    j["degenerate"] = s.degenerate;
    j["stability_warning"] = s.stability_warning;
    if (s.transform == mds::Transform::interval)
        j["linear_fit"] = {{"a", s.linear_a}, {"b", s.linear_b}};
    j["flags"] = s.flags;
    j["labels"] = s.labels;
    j["configuration"] = matrix_json(s.configuration);
    j["distances"] = s.distances;
    j["disparities"] = s.disparities;
    return j;
}

json to_json(const mds::StressBaseline& b) {
    return json{{"mean", b.mean},   {"sd", b.sd},   {"p05", b.p05},
                {"min", b.min},     {"max", b.max}, {"trials", b.trials}};
}

json to_json(const cluster::Dendrogram& d) {
    json j;
    j["leaves"] = d.leaves;
    j["labels"] = d.labels;
    json merges = json::array();
    for (const auto& m : d.merges)
        merges.push_back({{"cluster_a", m.cluster_a},
                          {"cluster_b", m.cluster_b},
                          {"height", m.height},
                          {"new_id", m.new_id}});
    j["merges"] = std::move(merges);
    return j;
}

csv::Table scores_csv(const dataset::ScoreTable& t) {
    csv::Table out;
    out.header.push_back("respondent_id");
    for (const auto& c : t.columns) out.header.push_back(c);
    for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
        csv::Row row;
        row.push_back(t.respondent_ids[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < t.values.cols(); ++j)
            row.push_back(format_number(t.values(i, j)));
        out.rows.push_back(std::move(row));
    }
    return out;
}

csv::Table corr_csv(const screening::CorrMatrix& m) {
    csv::Table out;
    out.header.push_back("item");
    for (const auto& id : m.item_ids) out.header.push_back(id);
    for (Eigen::Index i = 0; i < m.p(); ++i) {
        csv::Row row;
        row.push_back(m.item_ids[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < m.p(); ++j) row.push_back(format_number(m.r(i, j)));
        out.rows.push_back(std::move(row));
    }
    return out;
}

csv::Table loadings_csv(const Eigen::MatrixXd& loadings, const std::vector<std::string>& items,
                        const Eigen::VectorXd& communalities) {
    csv::Table out;
    out.header.push_back("item");
    for (Eigen::Index j = 0; j < loadings.cols(); ++j)
        out.header.push_back("factor_" + std::to_string(j + 1));
    if (communalities.size() > 0) out.header.push_back("h2");
    for (Eigen::Index i = 0; i < loadings.rows(); ++i) {
        csv::Row row;
        row.push_back(items[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < loadings.cols(); ++j)
            row.push_back(format_number(loadings(i, j)));
        if (communalities.size() > 0) row.push_back(format_number(communalities(i)));
        out.rows.push_back(std::move(row));
    }
    return out;
}

csv::Table scree_csv(const Eigen::VectorXd& full, const Eigen::VectorXd& reduced) {
    csv::Table out;
    out.header = {"index", "eigenvalue_full", "eigenvalue_reduced"};
    for (Eigen::Index i = 0; i < full.size(); ++i) {
        csv::Row row;
        row.push_back(std::to_string(i + 1));
        row.push_back(format_number(full(i)));
        row.push_back(i < reduced.size() ? format_number(reduced(i)) : "NA");
        out.rows.push_back(std::move(row));
    }
    return out;
}

namespace {

csv::Table matrix_with_roles(const std::vector<std::string>& names, const Eigen::MatrixXd& cells,
                             const std::string& legend) {
    csv::Table out;
    out.header.push_back("name");
    for (const auto& n : names) out.header.push_back(n);
    out.header.push_back("legend");
    for (Eigen::Index i = 0; i < cells.rows(); ++i) {
        csv::Row row;
        row.push_back(names[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < cells.cols(); ++j) row.push_back(format_number(cells(i, j)));
        row.push_back(i == 0 ? legend : "");
        out.rows.push_back(std::move(row));
    }
    return out;
}

} // namespace

csv::Table disattenuated_csv(const reliability::DisattenuatedMatrix& m) {
    return matrix_with_roles(m.names, m.cells,
                             "diagonal=alpha; below=observed r; above=corrected r");
}

csv::Table fornell_larcker_csv(const validity::FornellLarckerMatrix& m) {
    return matrix_with_roles(m.names, m.cells,
                             "diagonal=AVE; below=observed r^2; above=corrected r^2");
}

csv::Table configuration_csv(const mds::MdsSolution& s) {
    csv::Table out;
    out.header.push_back("item");
    for (Eigen::Index c = 0; c < s.configuration.cols(); ++c)
        out.header.push_back("dim" + std::to_string(c + 1));
    for (Eigen::Index i = 0; i < s.configuration.rows(); ++i) {
        csv::Row row;
        row.push_back(s.labels[static_cast<std::size_t>(i)]);
        for (Eigen::Index c = 0; c < s.configuration.cols(); ++c)
            row.push_back(format_number(s.configuration(i, c)));
        out.rows.push_back(std::move(row));
    }
    return out;
}

csv::Table posthoc_csv(const std::vector<inference::PairwiseResult>& rows,
                       const std::vector<std::string>& group_names) {
    csv::Table out;
    out.header = {"group_a", "group_b", "mean_difference", "t", "df", "p", "p_adjusted"};
    auto name = [&](int g) {
        return static_cast<std::size_t>(g) < group_names.size() ? group_names[static_cast<std::size_t>(g)]
                                                                : "group_" + std::to_string(g + 1);
    };
    for (const auto& r : rows) {
        csv::Row row;
        row.push_back(name(r.group_a));
        row.push_back(name(r.group_b));
        row.push_back(format_number(r.test.effect));
        row.push_back(format_number(r.test.statistic));
        row.push_back(format_number(r.test.df));
        row.push_back(format_number(r.test.p_value));
        row.push_back(format_number(r.p_adjusted));
        out.rows.push_back(std::move(row));
    }
    return out;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::io_error, "cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::io_error, "cannot open " + path + " for writing");
    out << text;
}

} // namespace latentkit::io
