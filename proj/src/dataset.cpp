#include "latentkit/dataset.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace latentkit::dataset {

using nlohmann::json;

void Codebook::validate() const {
    if (items.empty()) fail(errc::config_error, "codebook has no items");
    if (scale_min >= scale_max) fail(errc::config_error, "scale_min must be < scale_max");
    std::unordered_set<std::string> seen;
    for (const auto& it : items) {
        if (it.id.empty()) fail(errc::config_error, "item with empty id");
        if (!seen.insert(it.id).second) fail(errc::config_error, "duplicate item id: " + it.id);
    }
}

int Codebook::item_index(const std::string& id) const {
    for (std::size_t i = 0; i < items.size(); ++i)
        if (items[i].id == id) return static_cast<int>(i);
    return -1;
}

std::vector<std::string> Codebook::item_ids() const {
    std::vector<std::string> out;
    out.reserve(items.size());
    for (const auto& it : items) out.push_back(it.id);
    return out;
}

std::vector<std::string> Codebook::subscales() const {
    std::vector<std::string> out;
    for (const auto& it : items)
        if (it.subscale && std::find(out.begin(), out.end(), *it.subscale) == out.end())
            out.push_back(*it.subscale);
    return out;
}

std::vector<std::string> Codebook::subscale_items(const std::string& name) const {
    std::vector<std::string> out;
    for (const auto& it : items)
        if (it.subscale && *it.subscale == name) out.push_back(it.id);
    return out;
}

Codebook Codebook::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(errc::config_error, std::string("codebook JSON: ") + e.what());
    }
    Codebook cb;
    cb.scale_min = j.value("scale_min", 1);
    cb.scale_max = j.value("scale_max", 5);
    if (!j.contains("items") || !j["items"].is_array())
        fail(errc::config_error, "codebook JSON needs an items array");
    for (const auto& ji : j["items"]) {
        ItemSpec it;
        it.id = ji.value("id", "");
        it.text = ji.value("text", "");
        it.reversed = ji.value("reversed", false);
        it.marker = ji.value("marker", false);
        if (ji.contains("subscale") && !ji["subscale"].is_null())
            it.subscale = ji["subscale"].get<std::string>();
        cb.items.push_back(std::move(it));
    }
    cb.validate();
    return cb;
}

Codebook Codebook::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string Codebook::to_json_text() const {
    json j;
    j["scale_min"] = scale_min;
    j["scale_max"] = scale_max;
    j["items"] = json::array();
    for (const auto& it : items) {
        json ji;
        ji["id"] = it.id;
        ji["text"] = it.text;
        ji["reversed"] = it.reversed;
        ji["marker"] = it.marker;
        if (it.subscale) ji["subscale"] = *it.subscale;
        else ji["subscale"] = nullptr;
        j["items"].push_back(std::move(ji));
    }
    return j.dump(2);
}

int ResponseMatrix::item_index(const std::string& id) const {
    for (std::size_t i = 0; i < item_ids.size(); ++i)
        if (item_ids[i] == id) return static_cast<int>(i);
    return -1;
}

ResponseMatrix ResponseMatrix::select_items(const std::vector<std::string>& ids) const {
    ResponseMatrix out;
    out.respondent_ids = respondent_ids;
    out.item_ids = ids;
    out.values.resize(n(), static_cast<Eigen::Index>(ids.size()));
    for (std::size_t j = 0; j < ids.size(); ++j) {
        const int src = item_index(ids[j]);
        if (src < 0) fail(errc::config_error, "unknown item: " + ids[j]);
        out.values.col(static_cast<Eigen::Index>(j)) = values.col(src);
    }
    return out;
}

int ScoreTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<double> ScoreTable::column(const std::string& name) const {
    const int j = column_index(name);
    if (j < 0) fail(errc::config_error, "unknown score column: " + name);
    std::vector<double> out(values.rows());
    for (Eigen::Index i = 0; i < values.rows(); ++i) out[i] = values(i, j);
    return out;
}

const char* to_string(Group g) {
    switch (g) {
        case Group::low: return "LOW";
        case Group::mid: return "MID";
        case Group::high: return "HIGH";
    }
    return "?";
}

namespace {

// Blank cells and a bare NA marker are missing; anything else must parse
// as a number within scale bounds.
bool is_missing_token(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
    return t.empty() || t == "NA" || t == "na" || t == "N/A";
}

} // namespace

IngestResult ingest(const csv::Table& rows, const Codebook& cb, const std::string& dedup_key,
                    const std::vector<DisqualifyRule>& disqualify) {
    cb.validate();
    if (rows.header.empty() && rows.rows.empty()) fail(errc::empty_source, "no input rows");

    const int key_col = rows.column(dedup_key);
    if (key_col < 0) fail(errc::config_error, "dedup key column not found: " + dedup_key);

    std::vector<int> rule_cols;
    for (const auto& rule : disqualify) {
        const int c = rows.column(rule.column);
        if (c < 0) fail(errc::config_error, "disqualify column not found: " + rule.column);
        rule_cols.push_back(c);
    }

    std::vector<int> item_cols;
    for (const auto& it : cb.items) {
        const int c = rows.column(it.id);
        if (c < 0) fail(errc::config_error, "item column not found: " + it.id);
        item_cols.push_back(c);
    }

    IngestResult res;
    IngestReport& rep = res.report;
    rep.received = rows.rows.size();
    if (rep.received == 0) fail(errc::empty_source, "no input rows");

    std::unordered_set<std::string> seen_keys;
    std::vector<std::pair<std::size_t, const csv::Row*>> kept;
    for (std::size_t r = 0; r < rows.rows.size(); ++r) {
        const csv::Row& row = rows.rows[r];
        if (row.size() != rows.header.size()) {
            rep.row_errors.push_back({r + 1, "field count mismatch"});
            ++rep.malformed;
            continue;
        }
        const std::string& key = row[static_cast<std::size_t>(key_col)];
        if (!seen_keys.insert(key).second) {
            ++rep.duplicates;
            continue;
        }
        bool ok = true;
        for (std::size_t k = 0; k < disqualify.size(); ++k) {
            const std::string& v = row[static_cast<std::size_t>(rule_cols[k])];
            const auto& allowed = disqualify[k].allowed;
            if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            ++rep.disqualified;
            continue;
        }
        kept.emplace_back(r, &row);
    }

    rep.retained = kept.size();
    ResponseMatrix& m = res.matrix;
    m.item_ids = cb.item_ids();
    m.values.resize(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(cb.items.size()));
    m.values.setConstant(missing_value);
    m.respondent_ids.reserve(kept.size());

    for (std::size_t i = 0; i < kept.size(); ++i) {
        const csv::Row& row = *kept[i].second;
        const std::string& rid = row[static_cast<std::size_t>(key_col)];
        m.respondent_ids.push_back(rid);
        for (std::size_t j = 0; j < item_cols.size(); ++j) {
            const std::string& raw = row[static_cast<std::size_t>(item_cols[j])];
            if (is_missing_token(raw)) continue;
            double v;
            try {
                std::size_t pos = 0;
                v = std::stod(raw, &pos);
                while (pos < raw.size() && std::isspace(static_cast<unsigned char>(raw[pos]))) ++pos;
                if (pos != raw.size()) throw std::invalid_argument(raw);
            } catch (const std::exception&) {
                rep.cell_errors.push_back({rid, m.item_ids[j], raw, "not a number"});
                continue;
            }
            if (v < cb.scale_min || v > cb.scale_max) {
                rep.cell_errors.push_back({rid, m.item_ids[j], raw, "outside scale bounds"});
                continue;
            }
            m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }
    return res;
}

ResponseMatrix reverse_code(const ResponseMatrix& m, const Codebook& cb) {
    ResponseMatrix out = m;
    const double pivot = static_cast<double>(cb.scale_min) + static_cast<double>(cb.scale_max);
    for (Eigen::Index j = 0; j < out.p(); ++j) {
        const int ci = cb.item_index(out.item_ids[static_cast<std::size_t>(j)]);
        if (ci < 0 || !cb.items[static_cast<std::size_t>(ci)].reversed) continue;
        for (Eigen::Index i = 0; i < out.n(); ++i) {
            const double v = out.values(i, j);
            if (!is_missing(v)) out.values(i, j) = pivot - v;
        }
    }
    return out;
}

ListwiseResult listwise(const ResponseMatrix& m, const std::vector<std::string>& items) {
    std::vector<Eigen::Index> cols;
    if (items.empty()) {
        for (Eigen::Index j = 0; j < m.p(); ++j) cols.push_back(j);
    } else {
        for (const auto& id : items) {
            const int j = m.item_index(id);
            if (j < 0) fail(errc::config_error, "unknown item: " + id);
            cols.push_back(j);
        }
    }
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < m.n(); ++i) {
        bool complete = true;
        for (Eigen::Index j : cols)
            if (is_missing(m.values(i, j))) {
                complete = false;
                break;
            }
        if (complete) keep.push_back(i);
    }
    if (keep.empty()) fail(errc::no_complete_cases, "every row has a missing value in the subset");

    ListwiseResult res;
    res.removed = static_cast<std::size_t>(m.n()) - keep.size();
    res.matrix.item_ids = m.item_ids;
    res.matrix.values.resize(static_cast<Eigen::Index>(keep.size()), m.p());
    res.matrix.respondent_ids.reserve(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        res.matrix.respondent_ids.push_back(m.respondent_ids[static_cast<std::size_t>(keep[i])]);
        res.matrix.values.row(static_cast<Eigen::Index>(i)) = m.values.row(keep[i]);
    }
    return res;
}

namespace {

void aggregate_into(const ResponseMatrix& m, const std::vector<int>& cols, Aggregation agg,
                    Eigen::Ref<Eigen::VectorXd> out) {
    for (Eigen::Index i = 0; i < m.n(); ++i) {
        double acc = 0;
        bool complete = true;
        for (int j : cols) {
            const double v = m.values(i, j);
            if (is_missing(v)) {
                complete = false;
                break;
            }
            acc += v;
        }
        if (!complete) {
            out(i) = missing_value;
        } else {
            out(i) = agg == Aggregation::mean ? acc / static_cast<double>(cols.size()) : acc;
        }
    }
}

} // namespace

ScoreTable subscale_scores(const ResponseMatrix& m, const Codebook& cb, Aggregation agg) {
    const auto names = cb.subscales();
    if (names.empty()) fail(errc::config_error, "codebook defines no subscales");
    ScoreTable t;
    t.respondent_ids = m.respondent_ids;
    t.aggregation = agg;
    t.columns = names;
    t.values.resize(m.n(), static_cast<Eigen::Index>(names.size()));
    for (std::size_t s = 0; s < names.size(); ++s) {
        std::vector<int> cols;
        for (const auto& id : cb.subscale_items(names[s])) {
            const int j = m.item_index(id);
            if (j < 0) fail(errc::config_error, "subscale item missing from matrix: " + id);
            cols.push_back(j);
        }
        if (cols.empty()) fail(errc::config_error, "subscale with zero items: " + names[s]);
        aggregate_into(m, cols, agg, t.values.col(static_cast<Eigen::Index>(s)));
    }
    return t;
}

ScoreTable composite_score(const ResponseMatrix& m, const Codebook& cb,
                           const std::vector<std::string>& item_set, const std::string& name) {
    if (item_set.empty()) fail(errc::config_error, "composite over zero items");
    std::vector<int> cols;
    for (const auto& id : item_set) {
        const int j = m.item_index(id);
        if (j < 0) fail(errc::config_error, "unknown item: " + id);
        if (cb.item_index(id) < 0) fail(errc::config_error, "item not in codebook: " + id);
        cols.push_back(j);
    }
    ScoreTable t;
    t.respondent_ids = m.respondent_ids;
    t.aggregation = Aggregation::sum;
    t.columns = {name};
    t.values.resize(m.n(), 1);
    aggregate_into(m, cols, Aggregation::sum, t.values.col(0));
    return t;
}

double percentile(std::vector<double> v, double q) {
    if (v.empty()) fail(errc::insufficient_data, "percentile of empty set");
    std::sort(v.begin(), v.end());
    const double pos = 1.0 + (static_cast<double>(v.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(pos)) - 1;
    const double frac = pos - std::floor(pos);
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

QuartileSplit quartile_classify(const ScoreTable& scores, const std::string& column) {
    const int j = scores.column_index(column);
    if (j < 0) fail(errc::config_error, "unknown score column: " + column);

    std::vector<std::pair<std::string, double>> present;
    for (Eigen::Index i = 0; i < scores.values.rows(); ++i) {
        const double v = scores.values(i, j);
        if (!is_missing(v)) present.emplace_back(scores.respondent_ids[static_cast<std::size_t>(i)], v);
    }
    if (present.size() < 4) fail(errc::insufficient_data, "quartile split needs >= 4 scores");

    std::vector<double> vals;
    vals.reserve(present.size());
    for (const auto& pr : present) vals.push_back(pr.second);

    QuartileSplit split;
    split.q1 = percentile(vals, 0.25);
    split.q3 = percentile(vals, 0.75);
    for (const auto& [id, v] : present) {
        GroupLabel lab;
        lab.respondent_id = id;
        lab.low = v <= split.q1;
        lab.high = v >= split.q3;
        if (lab.low && lab.high) split.degenerate = true;
        lab.group = lab.low ? Group::low : (lab.high ? Group::high : Group::mid);
        split.labels.push_back(std::move(lab));
    }
    return split;
}

} // namespace latentkit::dataset
