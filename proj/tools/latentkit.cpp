// latentkit: scale-development analysis pipeline over Likert survey data.
//
// Subcommands run individual stages (ingest, screen, efa, reliability,
// validity, mds, cluster, compare, regress, synth) or the whole sequence
// (pipeline). Every stage recomputes its inputs from the raw responses and
// codebook, so stage outputs match the pipeline's byte for byte.
//
// Exit codes: 0 success, 1 data/analysis error, 2 configuration error.

#include "latentkit/cluster.hpp"
#include "latentkit/dataset.hpp"
#include "latentkit/efa.hpp"
#include "latentkit/inference.hpp"
#include "latentkit/jsonio.hpp"
#include "latentkit/mds.hpp"
#include "latentkit/reliability.hpp"
#include "latentkit/screening.hpp"
#include "latentkit/svg.hpp"
#include "latentkit/synth.hpp"
#include "latentkit/validity.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace latentkit;

namespace {

struct Config {
    std::string out_dir;
    std::string responses_path;
    std::string codebook_path;
    std::string dedup_key = "respondent_id";
    std::vector<std::string> disqualify_raw; // COL=V1|V2
    std::vector<std::string> items;          // analysis subset; empty = all
    std::uint64_t seed = 0;
    int threads = 1;

    // screen
    std::vector<std::string> corr_methods{"pearson", "kendall"};

    // efa
    int factors = -1; // -1 = auto (kaiser, capped)
    bool factors_given = false;
    int max_factors = 8;
    double kappa = 4.0;
    double threshold = 0.4;
    std::vector<std::string> overrides_raw; // item=factor(1-based)

    // mds
    int dims = 2;
    std::vector<std::string> transforms{"ordinal", "interval"};
    std::vector<std::string> mds_corr{"pearson", "kendall"};
    std::string delta_transform = "one_minus_r";
    int restarts = 10;
    int baseline_trials = 0;

    // cluster
    int cut_k = 0; // 0 = number of subscales
    std::string linkage = "single";

    // compare / regress
    std::string group_by;
    std::vector<std::string> criterion_items;
    std::string regress_y;
    std::vector<std::string> regress_x;

    // synth
    int synth_p = 25, synth_m = 5, synth_n = 1000;
    double load_lo = 0.6, load_hi = 0.8, phi_offdiag = 0.3;
    std::string synth_spec_path;
};

struct Manifest {
    std::vector<std::string> files;
    std::vector<std::string> skipped; // stage: reason

    void add(const std::string& path) { files.push_back(path); }
    void skip(const std::string& stage, const std::string& why) {
        skipped.push_back(stage + ": " + why);
    }
    void write(const std::string& out_dir) const {
        json j;
        j["files"] = files;
        j["skipped"] = skipped;
        io::write_json_file(out_dir + "/manifest.json", j);
    }
};

std::vector<dataset::DisqualifyRule> parse_disqualify(const std::vector<std::string>& raw) {
    std::vector<dataset::DisqualifyRule> rules;
    for (const auto& spec : raw) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0)
            fail(errc::config_error, "disqualify rule must look like COLUMN=V1|V2: " + spec);
        dataset::DisqualifyRule rule;
        rule.column = spec.substr(0, eq);
        std::string values = spec.substr(eq + 1);
        std::size_t start = 0;
        while (true) {
            const auto bar = values.find('|', start);
            rule.allowed.push_back(values.substr(start, bar - start));
            if (bar == std::string::npos) break;
            start = bar + 1;
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

std::map<std::string, int> parse_overrides(const std::vector<std::string>& raw) {
    std::map<std::string, int> out;
    for (const auto& spec : raw) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0)
            fail(errc::config_error, "override must look like ITEM=FACTOR: " + spec);
        const int factor = std::stoi(spec.substr(eq + 1));
        if (factor < 1) fail(errc::config_error, "override factors are 1-based: " + spec);
        out[spec.substr(0, eq)] = factor - 1;
    }
    return out;
}

screening::CorrMethod corr_method_of(const std::string& name) {
    if (name == "pearson") return screening::CorrMethod::pearson;
    if (name == "spearman") return screening::CorrMethod::spearman;
    if (name == "kendall" || name == "kendall_tau_b") return screening::CorrMethod::kendall_tau_b;
    fail(errc::config_error, "unknown correlation method: " + name);
}

// Lazily computed shared analysis state; every stage pulls what it needs so
// single-stage runs and the pipeline produce identical artifacts.
struct Context {
    Config cfg;
    Manifest manifest;

    std::optional<dataset::Codebook> codebook_;
    std::optional<dataset::IngestResult> ingest_;
    std::optional<dataset::ResponseMatrix> scored_;   // reverse-coded, item subset
    std::optional<screening::CorrMatrix> pearson_;    // listwise pearson on the subset
    std::optional<dataset::ResponseMatrix> complete_; // listwise rows of scored_
    std::optional<efa::FactorSolution> efa_;
    std::optional<efa::AssignmentReport> assignment_;
    std::optional<dataset::ScoreTable> factor_scores_;
    int chosen_factors = 0;

    const dataset::Codebook& codebook() {
        if (!codebook_) {
            if (cfg.codebook_path.empty()) fail(errc::config_error, "--codebook is required");
            codebook_ = dataset::Codebook::from_json_file(cfg.codebook_path);
        }
        return *codebook_;
    }

    const dataset::IngestResult& ingested() {
        if (!ingest_) {
            if (cfg.responses_path.empty()) fail(errc::config_error, "--responses is required");
            const auto table = csv::read_file(cfg.responses_path);
            ingest_ = dataset::ingest(table, codebook(), cfg.dedup_key,
                                      parse_disqualify(cfg.disqualify_raw));
        }
        return *ingest_;
    }

    std::vector<std::string> analysis_items() {
        if (!cfg.items.empty()) return cfg.items;
        return codebook().item_ids();
    }

    const dataset::ResponseMatrix& scored() {
        if (!scored_) {
            auto coded = dataset::reverse_code(ingested().matrix, codebook());
            scored_ = coded.select_items(analysis_items());
        }
        return *scored_;
    }

    const dataset::ResponseMatrix& complete() {
        if (!complete_) complete_ = dataset::listwise(scored()).matrix;
        return *complete_;
    }

    const screening::CorrMatrix& pearson() {
        if (!pearson_) pearson_ = screening::correlation_matrix(complete(), screening::CorrMethod::pearson);
        return *pearson_;
    }

    int factor_count() {
        if (chosen_factors > 0) return chosen_factors;
        if (cfg.factors_given) {
            if (cfg.factors < 1) fail(errc::config_error, "--factors must be >= 1");
            chosen_factors = cfg.factors;
        } else {
            const auto spectrum = efa::eigen_spectrum(pearson().r);
            const int kaiser = efa::kaiser_count(spectrum.full);
            chosen_factors = std::max(1, std::min(kaiser, cfg.max_factors));
        }
        return chosen_factors;
    }

    const efa::FactorSolution& efa_solution() {
        if (!efa_) {
            efa::EfaOptions opts;
            opts.kappa = cfg.kappa;
            efa_ = efa::fit(pearson().r, factor_count(), opts);
        }
        return *efa_;
    }

    const efa::AssignmentReport& assignment() {
        if (!assignment_)
            assignment_ = efa::assign_items(efa_solution().pattern, scored().item_ids, cfg.threshold,
                                            parse_overrides(cfg.overrides_raw));
        return *assignment_;
    }

    const dataset::ScoreTable& factor_scores() {
        if (!factor_scores_) factor_scores_ = efa::factor_scores(scored(), assignment());
        return *factor_scores_;
    }

    std::string path(const std::string& name) { return cfg.out_dir + "/" + name; }

    void write_json(const std::string& name, const json& j) {
        io::write_json_file(path(name), j);
        manifest.add(name);
    }
    void write_csv(const std::string& name, const csv::Table& t) {
        csv::write_file(path(name), t);
        manifest.add(name);
    }
    void write_text(const std::string& name, const std::string& text) {
        io::write_text_file(path(name), text);
        manifest.add(name);
    }
};

// ---------------------------------------------------------------- stages

void stage_ingest(Context& ctx) {
    const auto& res = ctx.ingested();
    ctx.write_json("ingest_report.json", io::to_json(res.report));

    // cleaned matrix: retained rows, bounds-checked cells, not reverse-coded
    csv::Table out;
    out.header.push_back(ctx.cfg.dedup_key);
    for (const auto& id : res.matrix.item_ids) out.header.push_back(id);
    for (Eigen::Index i = 0; i < res.matrix.n(); ++i) {
        csv::Row row;
        row.push_back(res.matrix.respondent_ids[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < res.matrix.p(); ++j) {
            const double v = res.matrix.values(i, j);
            row.push_back(is_missing(v) ? "" : io::format_number(v));
        }
        out.rows.push_back(std::move(row));
    }
    ctx.write_csv("responses_clean.csv", out);
    std::cout << "ingest: received " << res.report.received << ", duplicates "
              << res.report.duplicates << ", disqualified " << res.report.disqualified
              << ", retained " << res.report.retained << "\n";
}

void stage_screen(Context& ctx) {
    ctx.write_json("descriptives.json", io::to_json(screening::item_descriptives(ctx.scored())));
    for (const auto& name : ctx.cfg.corr_methods) {
        const auto method = corr_method_of(name);
        const auto cm = method == screening::CorrMethod::pearson
                            ? ctx.pearson()
                            : screening::correlation_matrix(ctx.complete(), method);
        ctx.write_csv("correlation_" + std::string(screening::to_string(method)) + ".csv",
                      io::corr_csv(cm));
    }
    const auto fact = screening::factorability_report(ctx.scored());
    ctx.write_json("factorability.json", io::to_json(fact));
    std::cout << "screen: " << (fact.factorable ? "FACTORABLE" : "NOT_FACTORABLE") << " (KMO "
              << io::format_number(fact.kmo_overall) << ", Bartlett chi2 "
              << io::format_number(fact.bartlett_chi2) << ", p "
              << io::format_number(fact.bartlett_p) << ")\n";
}

void stage_efa(Context& ctx) {
    const auto spectrum = efa::eigen_spectrum(ctx.pearson().r);
    efa::RetentionAdvice advice;
    advice.kaiser_count = efa::kaiser_count(spectrum.full);
    advice.scree_full = spectrum.full;
    advice.scree_reduced = spectrum.reduced;
    ctx.write_json("retention.json", io::to_json(advice));
    ctx.write_csv("scree.csv", io::scree_csv(spectrum.full, spectrum.reduced));
    ctx.write_text("scree.svg", svg::scree_plot(spectrum.full, spectrum.reduced));

    const auto& sol = ctx.efa_solution();
    ctx.write_json("factor_solution.json", io::to_json(sol, ctx.scored().item_ids));
    ctx.write_csv("pattern.csv",
                  io::loadings_csv(sol.pattern, ctx.scored().item_ids, sol.communalities_extracted));
    ctx.write_csv("structure.csv", io::loadings_csv(sol.structure, ctx.scored().item_ids));
    ctx.write_json("assignment.json", io::to_json(ctx.assignment()));
    ctx.write_csv("factor_scores.csv", io::scores_csv(ctx.factor_scores()));
    std::cout << "efa: " << sol.m << " factors (Kaiser count " << advice.kaiser_count << "), "
              << (sol.converged ? "converged" : "not converged") << " in " << sol.iterations
              << " iterations" << (sol.heywood ? ", HEYWOOD case" : "") << "\n";
}

// Reliability over each named subscale, the factor clusters, and the full
// item set; disattenuated matrix over the factor scores.
void stage_reliability(Context& ctx) {
    json reports = json::array();
    const auto& cb = ctx.codebook();
    auto add_report = [&](const std::string& name, const std::vector<std::string>& items) {
        if (items.size() < 2) return;
        json entry;
        entry["scale"] = name;
        entry["report"] = io::to_json(reliability::analyze(ctx.scored(), items));
        reports.push_back(std::move(entry));
    };
    for (const auto& sub : cb.subscales()) {
        auto items = cb.subscale_items(sub);
        std::erase_if(items, [&](const std::string& id) {
            return ctx.scored().item_index(id) < 0;
        });
        add_report("subscale:" + sub, items);
    }
    const auto& factor_items = ctx.assignment().factor_items;
    std::vector<double> factor_alphas;
    for (std::size_t f = 0; f < factor_items.size(); ++f) {
        add_report("factor_" + std::to_string(f + 1), factor_items[f]);
        factor_alphas.push_back(factor_items[f].size() >= 2
                                    ? reliability::analyze(ctx.scored(), factor_items[f]).alpha
                                    : missing_value);
    }
    add_report("overall", ctx.scored().item_ids);
    ctx.write_json("reliability.json", reports);

    // inter-factor correlations with attenuation corrections
    const auto complete_scores = [&] {
        dataset::ResponseMatrix m;
        const auto& scores = ctx.factor_scores();
        m.respondent_ids = scores.respondent_ids;
        m.item_ids = scores.columns;
        m.values = scores.values;
        return m;
    }();
    bool alphas_ok = true;
    for (double a : factor_alphas)
        if (is_missing(a) || a <= 0) alphas_ok = false;
    if (alphas_ok && !factor_alphas.empty()) {
        const auto corr = screening::correlation_matrix(complete_scores,
                                                        screening::CorrMethod::pearson);
        const auto dis = reliability::disattenuated_matrix(corr, factor_alphas);
        ctx.write_json("disattenuated.json", io::to_json(dis));
        ctx.write_csv("disattenuated.csv", io::disattenuated_csv(dis));
    } else {
        ctx.manifest.skip("reliability/disattenuated", "factor alpha unavailable or nonpositive");
    }
    std::cout << "reliability: " << reports.size() << " scales analyzed\n";
}

void stage_validity(Context& ctx) {
    const auto& sol = ctx.efa_solution();
    const auto& factor_items = ctx.assignment().factor_items;

    // AVE per factor from the assigned items' pattern coefficients
    std::vector<double> aves;
    for (std::size_t f = 0; f < factor_items.size(); ++f) {
        std::vector<double> loadings;
        for (const auto& id : factor_items[f]) {
            const int row = ctx.scored().item_index(id);
            loadings.push_back(sol.pattern(row, static_cast<Eigen::Index>(f)));
        }
        aves.push_back(loadings.empty() ? missing_value : validity::ave(loadings));
    }

    std::vector<double> alphas;
    for (const auto& items : factor_items)
        alphas.push_back(items.size() >= 2 ? reliability::analyze(ctx.scored(), items).alpha
                                           : missing_value);

    bool ok = !aves.empty();
    for (std::size_t f = 0; f < aves.size(); ++f)
        if (is_missing(aves[f]) || is_missing(alphas[f]) || alphas[f] <= 0) ok = false;
    if (ok) {
        dataset::ResponseMatrix m;
        const auto& scores = ctx.factor_scores();
        m.respondent_ids = scores.respondent_ids;
        m.item_ids = scores.columns;
        m.values = scores.values;
        const auto corr = screening::correlation_matrix(m, screening::CorrMethod::pearson);
        const auto fl = validity::fornell_larcker(aves, corr, alphas);
        ctx.write_json("fornell_larcker.json", io::to_json(fl));
        ctx.write_csv("fornell_larcker.csv", io::fornell_larcker_csv(fl));
    } else {
        ctx.manifest.skip("validity/fornell_larcker", "factor AVE or alpha unavailable");
    }

    if (!ctx.cfg.criterion_items.empty()) {
        const auto composite =
            dataset::composite_score(dataset::reverse_code(ctx.ingested().matrix, ctx.codebook()),
                                     ctx.codebook(), ctx.cfg.criterion_items, "criterion");
        const auto split = dataset::quartile_classify(composite, "criterion");
        json split_json;
        split_json["q1"] = split.q1;
        split_json["q3"] = split.q3;
        split_json["degenerate"] = split.degenerate;
        json labels = json::array();
        for (const auto& l : split.labels)
            labels.push_back({{"respondent", l.respondent_id},
                              {"group", l.low && l.high ? "LOW_AND_HIGH" : dataset::to_string(l.group)}});
        split_json["labels"] = std::move(labels);
        ctx.write_json("criterion_split.json", split_json);
        const auto kg = validity::known_groups(ctx.factor_scores(), split.labels);
        ctx.write_json("known_groups.json", io::to_json(kg));
    } else {
        ctx.manifest.skip("validity/known_groups", "no --criterion-items given");
    }
    std::cout << "validity: discriminant and known-groups checks written\n";
}

void stage_mds(Context& ctx) {
    mds::MdsOptions opts;
    opts.restarts = ctx.cfg.restarts;
    opts.threads = ctx.cfg.threads;
    const auto delta_kind = ctx.cfg.delta_transform == "sqrt_two_one_minus_r"
                                ? mds::DissimilarityTransform::sqrt_two_one_minus_r
                                : mds::DissimilarityTransform::one_minus_r;

    for (const auto& corr_name : ctx.cfg.mds_corr) {
        const auto method = corr_method_of(corr_name);
        const auto cm = method == screening::CorrMethod::pearson
                            ? ctx.pearson()
                            : screening::correlation_matrix(ctx.complete(), method);
        const auto delta = mds::corr_to_dissimilarity(cm, delta_kind);
        for (const auto& transform : ctx.cfg.transforms) {
            const std::string tag = transform + "_" + std::string(screening::to_string(method));
            const auto sol = transform == "interval"
                                 ? mds::metric_mds(delta, ctx.cfg.dims, ctx.cfg.seed, opts)
                                 : mds::nonmetric_mds(delta, ctx.cfg.dims, ctx.cfg.seed, opts);
            ctx.write_json("mds_" + tag + ".json", io::to_json(sol));
            std::cout << "mds " << tag << ": stress1 " << io::format_number(sol.stress) << ", rsq "
                      << io::format_number(sol.rsq)
                      << (sol.stability_warning ? " (STABILITY_WARNING)" : "") << "\n";
            ctx.write_csv("mds_" + tag + ".csv", io::configuration_csv(sol));
            if (ctx.cfg.dims == 2) {
                std::vector<int> loops;
                const int k = ctx.cfg.cut_k > 0
                                  ? ctx.cfg.cut_k
                                  : std::max<int>(1, static_cast<int>(ctx.codebook().subscales().size()));
                if (k > 1 && k <= static_cast<int>(delta.p())) {
                    const auto dend = cluster::single_linkage(delta);
                    loops = cluster::cut(dend, k);
                }
                ctx.write_text("mds_" + tag + ".svg", svg::mds_map(sol, loops));
            }
        }
    }

    if (ctx.cfg.baseline_trials > 0) {
        mds::MdsOptions bl_opts;
        bl_opts.restarts = 4;
        bl_opts.threads = ctx.cfg.threads;
        const auto bl = mds::random_stress_baseline(static_cast<int>(ctx.scored().p()), ctx.cfg.dims,
                                                    ctx.cfg.baseline_trials, ctx.cfg.seed, bl_opts);
        ctx.write_json("mds_random_baseline.json", io::to_json(bl));
    }
}

void stage_cluster(Context& ctx) {
    const auto delta = mds::corr_to_dissimilarity(ctx.pearson());
    const auto linkage = ctx.cfg.linkage == "average" ? cluster::Linkage::average
                                                      : cluster::Linkage::single;
    const auto dend = cluster::agglomerate(delta, linkage);
    ctx.write_json("dendrogram.json", io::to_json(dend));
    ctx.write_text("dendrogram.svg", svg::dendrogram_plot(dend));

    const int k = ctx.cfg.cut_k > 0
                      ? ctx.cfg.cut_k
                      : std::max<int>(1, static_cast<int>(ctx.codebook().subscales().size()));
    if (k <= dend.leaves) {
        const auto labels = cluster::cut(dend, k);
        json j;
        j["k"] = k;
        json assign = json::array();
        for (std::size_t i = 0; i < labels.size(); ++i)
            assign.push_back({{"item", dend.labels[i]}, {"cluster", labels[i]}});
        j["labels"] = std::move(assign);
        ctx.write_json("clusters.json", j);
    } else {
        ctx.manifest.skip("cluster/cut", "cut level exceeds leaf count");
    }
    std::cout << "cluster: " << dend.merges.size() << " merges, final height "
              << io::format_number(dend.merges.empty() ? 0.0 : dend.merges.back().height) << "\n";
}

// Scores per scale for grouping and regression: factor scores plus the
// criterion composite when configured.
dataset::ScoreTable scores_with_criterion(Context& ctx) {
    dataset::ScoreTable t = ctx.factor_scores();
    if (!ctx.cfg.criterion_items.empty()) {
        const auto composite =
            dataset::composite_score(dataset::reverse_code(ctx.ingested().matrix, ctx.codebook()),
                                     ctx.codebook(), ctx.cfg.criterion_items, "criterion");
        t.columns.push_back("criterion");
        t.values.conservativeResize(Eigen::NoChange, t.values.cols() + 1);
        t.values.col(t.values.cols() - 1) = composite.values.col(0);
    }
    return t;
}

void stage_compare(Context& ctx) {
    if (ctx.cfg.group_by.empty() && ctx.cfg.criterion_items.empty()) {
        ctx.manifest.skip("compare", "needs --group-by or --criterion-items");
        return;
    }
    const auto scores = scores_with_criterion(ctx);

    if (!ctx.cfg.group_by.empty()) {
        // group values come from the raw responses table
        const auto table = csv::read_file(ctx.cfg.responses_path);
        const int gcol = table.column(ctx.cfg.group_by);
        const int kcol = table.column(ctx.cfg.dedup_key);
        if (gcol < 0) fail(errc::config_error, "group column not found: " + ctx.cfg.group_by);
        std::map<std::string, std::string> group_of;
        for (const auto& row : table.rows)
            if (row.size() == table.header.size())
                group_of[row[static_cast<std::size_t>(kcol)]] = row[static_cast<std::size_t>(gcol)];

        json out = json::array();
        for (std::size_t c = 0; c < scores.columns.size(); ++c) {
            std::map<std::string, std::vector<double>> groups;
            for (Eigen::Index i = 0; i < scores.values.rows(); ++i) {
                const double v = scores.values(i, static_cast<Eigen::Index>(c));
                if (is_missing(v)) continue;
                const auto it = group_of.find(scores.respondent_ids[static_cast<std::size_t>(i)]);
                if (it == group_of.end() || it->second.empty()) continue;
                groups[it->second].push_back(v);
            }
            std::vector<std::vector<double>> gv;
            std::vector<std::string> names;
            for (auto& [name, values] : groups)
                if (values.size() >= 2) {
                    names.push_back(name);
                    gv.push_back(std::move(values));
                }
            if (gv.size() < 2) continue;

            json entry;
            entry["scale"] = scores.columns[c];
            entry["groups"] = json::array();
            for (std::size_t g = 0; g < gv.size(); ++g) {
                double mean = 0;
                for (double v : gv[g]) mean += v;
                mean /= static_cast<double>(gv[g].size());
                entry["groups"].push_back(
                    {{"name", names[g]}, {"n", gv[g].size()}, {"mean", mean}});
            }
            entry["levene"] = io::to_json(inference::levene(gv));
            entry["anova"] = io::to_json(inference::one_way_anova(gv));
            entry["kruskal_wallis"] = io::to_json(inference::kruskal_wallis(gv));
            if (gv.size() == 2) {
                entry["t_test"] = io::to_json(inference::t_test(gv[0], gv[1]));
                entry["mann_whitney"] = io::to_json(inference::mann_whitney(
                    gv[0], gv[1],
                    gv[0].size() + gv[1].size() <= 16 ? inference::MannWhitneyMode::exact
                                                      : inference::MannWhitneyMode::normal_approx));
            } else {
                const auto lsd = inference::posthoc(gv, inference::PosthocMethod::lsd);
                const auto bon = inference::posthoc(gv, inference::PosthocMethod::bonferroni);
                json post = json::array();
                for (std::size_t q = 0; q < lsd.size(); ++q) {
                    json pr;
                    pr["group_a"] = names[static_cast<std::size_t>(lsd[q].group_a)];
                    pr["group_b"] = names[static_cast<std::size_t>(lsd[q].group_b)];
                    pr["lsd"] = io::to_json(lsd[q].test);
                    pr["bonferroni_p"] = bon[q].p_adjusted;
                    post.push_back(std::move(pr));
                }
                entry["posthoc"] = std::move(post);
                ctx.write_csv("posthoc_" + scores.columns[c] + ".csv", io::posthoc_csv(lsd, names));
            }
            out.push_back(std::move(entry));
        }
        ctx.write_json("compare_" + ctx.cfg.group_by + ".json", out);
    }

    if (!ctx.cfg.criterion_items.empty()) {
        const auto composite =
            dataset::composite_score(dataset::reverse_code(ctx.ingested().matrix, ctx.codebook()),
                                     ctx.codebook(), ctx.cfg.criterion_items, "criterion");
        const auto split = dataset::quartile_classify(composite, "criterion");
        const auto kg = validity::known_groups(ctx.factor_scores(), split.labels);
        ctx.write_json("compare_quartiles.json", io::to_json(kg));
        for (const auto& s : kg.scales)
            std::cout << "compare " << s.scale << ": " << validity::to_string(s.verdict)
                      << " (t " << io::format_number(s.t.statistic) << ", p "
                      << io::format_number(s.t.p_value) << ")\n";
    }
}

void stage_regress(Context& ctx) {
    if (ctx.cfg.regress_y.empty()) {
        ctx.manifest.skip("regress", "no --regress-y given");
        return;
    }
    const auto scores = scores_with_criterion(ctx);
    auto col_of = [&](const std::string& name) {
        const int c = scores.column_index(name);
        if (c < 0) fail(errc::config_error, "unknown score column: " + name);
        return c;
    };
    const int ycol = col_of(ctx.cfg.regress_y);
    std::vector<std::string> xnames = ctx.cfg.regress_x;
    if (xnames.empty()) {
        for (const auto& c : scores.columns)
            if (c != ctx.cfg.regress_y) xnames.push_back(c);
    }
    std::vector<int> xcols;
    for (const auto& n : xnames) xcols.push_back(col_of(n));

    // listwise over response and predictors
    std::vector<double> y;
    std::vector<std::vector<double>> xs(xcols.size());
    for (Eigen::Index i = 0; i < scores.values.rows(); ++i) {
        bool ok = !is_missing(scores.values(i, ycol));
        for (int c : xcols) ok = ok && !is_missing(scores.values(i, c));
        if (!ok) continue;
        y.push_back(scores.values(i, ycol));
        for (std::size_t q = 0; q < xcols.size(); ++q)
            xs[q].push_back(scores.values(i, xcols[q]));
    }
    Eigen::MatrixXd design(static_cast<Eigen::Index>(y.size()),
                           static_cast<Eigen::Index>(xcols.size()));
    for (std::size_t q = 0; q < xcols.size(); ++q)
        for (std::size_t i = 0; i < y.size(); ++i)
            design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(q)) = xs[q][i];

    const auto reg = inference::ols(y, design, xnames);
    json j = io::to_json(reg);
    j["response"] = ctx.cfg.regress_y;
    ctx.write_json("regression_" + ctx.cfg.regress_y + ".json", j);
    std::cout << "regress " << ctx.cfg.regress_y << ": adjusted R^2 "
              << io::format_number(reg.adjusted_r2) << " (F " << io::format_number(reg.f) << ", p "
              << io::format_number(reg.f_p) << ")\n";
}

void stage_synth(Context& ctx) {
    synth::FactorModelSpec spec;
    if (!ctx.cfg.synth_spec_path.empty()) {
        spec = synth::FactorModelSpec::from_json_file(ctx.cfg.synth_spec_path);
        if (spec.n < 1) fail(errc::config_error, "model spec needs n >= 1");
    } else {
        spec = synth::simple_structure_spec(ctx.cfg.synth_p, ctx.cfg.synth_m, ctx.cfg.load_lo,
                                            ctx.cfg.load_hi, ctx.cfg.phi_offdiag, ctx.cfg.synth_n,
                                            ctx.cfg.seed);
    }
    spec.seed = ctx.cfg.seed;
    const auto m = synth::gen_likert(spec);

    csv::Table out;
    out.header.push_back("respondent_id");
    for (const auto& id : m.item_ids) out.header.push_back(id);
    for (Eigen::Index i = 0; i < m.n(); ++i) {
        csv::Row row;
        row.push_back(m.respondent_ids[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < m.p(); ++j) row.push_back(io::format_number(m.values(i, j)));
        out.rows.push_back(std::move(row));
    }
    ctx.write_csv("responses.csv", out);

    // matching codebook: planted membership becomes the subscale map
    dataset::Codebook cb;
    cb.scale_min = 1;
    cb.scale_max = spec.categories;
    const auto membership = synth::planted_membership(spec);
    for (std::size_t i = 0; i < m.item_ids.size(); ++i) {
        dataset::ItemSpec item;
        item.id = m.item_ids[i];
        item.subscale = "factor_" + std::to_string(membership[i] + 1);
        cb.items.push_back(std::move(item));
    }
    ctx.write_text("codebook.json", cb.to_json_text());
    ctx.write_text("truth.json", spec.to_json_text());
    std::cout << "synth: " << m.n() << " x " << m.p() << " responses written\n";
}

void write_pipeline_report(Context& ctx) {
    json report;
    report["sections"] = json::array();
    auto add_section = [&](const std::string& name, const std::string& file) {
        report["sections"].push_back({{"name", name}, {"file", file}});
    };
    add_section("sample", "ingest_report.json");
    add_section("screening", "factorability.json");
    add_section("communalities", "factor_solution.json");
    add_section("variance_explained", "retention.json");
    add_section("pattern_matrix", "pattern.csv");
    add_section("factor_descriptives", "factor_scores.csv");
    add_section("reliability", "reliability.json");
    add_section("interfactor_correlations", "disattenuated.csv");
    add_section("discriminant_validity", "fornell_larcker.csv");
    add_section("mds", "mds_ordinal_pearson.json");
    add_section("cluster", "dendrogram.json");

    const auto& sol = ctx.efa_solution();
    const auto rv = efa::rotated_variance(sol.pattern, sol.structure);
    json variance = json::array();
    for (int f = 0; f < sol.m; ++f)
        variance.push_back({{"factor", f + 1},
                            {"eigenvalue_full", sol.eigen_full(f)},
                            {"rotated_v", rv.v(f)},
                            {"percent_total", rv.percent_total(f)},
                            {"percent_common", rv.percent_common(f)}});
    report["variance"] = std::move(variance);
    report["kaiser_count"] = efa::kaiser_count(sol.eigen_full);
    report["factors"] = sol.m;
    report["n_complete"] = static_cast<std::size_t>(ctx.complete().n());
    ctx.write_json("report.json", report);

    std::ostringstream md;
    md << "# Pipeline summary\n\n";
    md << "- complete cases: " << ctx.complete().n() << "\n";
    md << "- retained factors: " << sol.m << " (Kaiser count "
       << efa::kaiser_count(sol.eigen_full) << ")\n";
    md << "- converged: " << (sol.converged ? "yes" : "no") << "\n\n";
    md << "| factor | eigenvalue | rotated V | % total | % common |\n";
    md << "|---|---|---|---|---|\n";
    for (int f = 0; f < sol.m; ++f) {
        md << "| " << (f + 1) << " | " << io::format_number(sol.eigen_full(f)) << " | "
           << io::format_number(rv.v(f)) << " | " << io::format_number(rv.percent_total(f))
           << " | " << io::format_number(rv.percent_common(f)) << " |\n";
    }
    md << "\nSee manifest.json for every artifact.\n";
    ctx.write_text("summary.md", md.str());
}

int run_command(const std::string& command, Context& ctx) {
    fs::create_directories(ctx.cfg.out_dir);
    if (command == "ingest") {
        stage_ingest(ctx);
    } else if (command == "screen") {
        stage_screen(ctx);
    } else if (command == "efa") {
        stage_efa(ctx);
    } else if (command == "reliability") {
        stage_reliability(ctx);
    } else if (command == "validity") {
        stage_validity(ctx);
    } else if (command == "mds") {
        stage_mds(ctx);
    } else if (command == "cluster") {
        stage_cluster(ctx);
    } else if (command == "compare") {
        stage_compare(ctx);
    } else if (command == "regress") {
        stage_regress(ctx);
    } else if (command == "synth") {
        stage_synth(ctx);
    } else if (command == "pipeline") {
        stage_ingest(ctx);
        stage_screen(ctx);
        stage_efa(ctx);
        stage_reliability(ctx);
        stage_validity(ctx);
        stage_mds(ctx);
        stage_cluster(ctx);
        stage_compare(ctx);
        stage_regress(ctx);
        write_pipeline_report(ctx);
    } else {
        fail(errc::config_error, "unknown subcommand: " + command);
    }
    ctx.manifest.write(ctx.cfg.out_dir);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"latentkit: Likert scale development and validation pipeline"};
    app.require_subcommand(1);

    Config cfg;
    const char* env_seed = std::getenv("LATENTKIT_SEED");

    auto add_common = [&](CLI::App* sub, bool needs_data) {
        sub->add_option("--out", cfg.out_dir, "output directory")->required();
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--threads", cfg.threads, "worker threads for restarts/Monte Carlo");
        if (needs_data) {
            sub->add_option("--responses", cfg.responses_path, "responses CSV");
            sub->add_option("--codebook", cfg.codebook_path, "codebook JSON");
            sub->add_option("--dedup-key", cfg.dedup_key, "dedup key column");
            sub->add_option("--disqualify", cfg.disqualify_raw,
                            "keep rows where COLUMN=V1|V2 matches (repeatable)");
            sub->add_option("--items", cfg.items, "analysis item subset");
        }
    };

    // Every analysis stage accepts the full shared option set, so a stage
    // run "with identical parameters" reproduces the pipeline's files.
    auto add_analysis = [&](CLI::App* sub) {
        add_common(sub, true);
        sub->add_option("--corr", cfg.corr_methods, "correlation methods to export");
        sub->add_option("--factors", cfg.factors, "factor count (omit for Kaiser rule)")
            ->each([&](const std::string&) { cfg.factors_given = true; });
        sub->add_option("--max-factors", cfg.max_factors, "cap for automatic retention");
        sub->add_option("--kappa", cfg.kappa, "promax exponent");
        sub->add_option("--threshold", cfg.threshold, "salient loading threshold");
        sub->add_option("--override", cfg.overrides_raw, "assignment override ITEM=FACTOR");
        sub->add_option("--dims", cfg.dims, "MDS dimensionality");
        sub->add_option("--transform", cfg.transforms, "MDS transforms: ordinal/interval");
        sub->add_option("--mds-corr", cfg.mds_corr, "MDS similarity inputs");
        sub->add_option("--delta", cfg.delta_transform, "one_minus_r or sqrt_two_one_minus_r");
        sub->add_option("--restarts", cfg.restarts, "MDS restart count");
        sub->add_option("--baseline-trials", cfg.baseline_trials, "random-stress trials");
        sub->add_option("--cut", cfg.cut_k, "cluster cut level (default: subscale count)");
        sub->add_option("--linkage", cfg.linkage, "single (default) or average");
        sub->add_option("--group-by", cfg.group_by, "metadata column with group labels");
        sub->add_option("--criterion-items", cfg.criterion_items, "criterion composite items");
        sub->add_option("--regress-y", cfg.regress_y, "regression response column");
        sub->add_option("--regress-x", cfg.regress_x, "regression predictor columns");
    };

    add_analysis(app.add_subcommand("ingest", "deduplicate, disqualify, bounds-check"));
    add_analysis(app.add_subcommand("screen", "descriptives, correlations, factorability"));
    add_analysis(app.add_subcommand("efa", "principal axis factoring with promax rotation"));
    add_analysis(app.add_subcommand("reliability", "alpha, item-total, disattenuation"));
    add_analysis(app.add_subcommand("validity", "AVE, discriminant matrix, known groups"));
    add_analysis(app.add_subcommand("mds", "metric and non-metric multidimensional scaling"));
    add_analysis(app.add_subcommand("cluster", "hierarchical clustering of items"));
    add_analysis(app.add_subcommand("compare", "group comparisons over scores"));
    add_analysis(app.add_subcommand("regress", "OLS with standardized coefficients"));
    add_analysis(app.add_subcommand("pipeline", "every stage in sequence"));

    auto* c_syn = app.add_subcommand("synth", "generate planted-model Likert data");
    add_common(c_syn, false);
    c_syn->add_option("--spec", cfg.synth_spec_path, "factor model spec JSON");
    c_syn->add_option("--synth-p", cfg.synth_p, "item count");
    c_syn->add_option("--synth-m", cfg.synth_m, "factor count");
    c_syn->add_option("--synth-n", cfg.synth_n, "respondent count");
    c_syn->add_option("--load-lo", cfg.load_lo, "lowest planted loading");
    c_syn->add_option("--load-hi", cfg.load_hi, "highest planted loading");
    c_syn->add_option("--phi", cfg.phi_offdiag, "factor correlation off-diagonal");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (env_seed) cfg.seed = std::strtoull(env_seed, nullptr, 10);

    Context ctx;
    ctx.cfg = cfg;
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run_command(command, ctx);
    } catch (const Error& e) {
        json err;
        err["error"] = to_string(e.code());
        err["message"] = e.what();
        std::cerr << err.dump(2) << "\n";
        // keep partial outputs discoverable
        try {
            if (!cfg.out_dir.empty() && fs::exists(cfg.out_dir)) {
                io::write_json_file(cfg.out_dir + "/error.json", err);
                ctx.manifest.add("error.json");
                ctx.manifest.write(cfg.out_dir);
            }
        } catch (...) {
        }
        return e.code() == errc::config_error ? 2 : 1;
    } catch (const std::exception& e) {
        json err;
        err["error"] = "INTERNAL";
        err["message"] = e.what();
        std::cerr << err.dump(2) << "\n";
        return 1;
    }
}
