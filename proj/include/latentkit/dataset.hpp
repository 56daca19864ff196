#pragma once

#include "latentkit/common.hpp"
#include "latentkit/csv.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace latentkit::dataset {

struct ItemSpec {
    std::string id;
    std::string text;
    bool reversed = false;
    std::optional<std::string> subscale;
    bool marker = false;
};

struct Codebook {
    std::vector<ItemSpec> items;
    int scale_min = 1;
    int scale_max = 5;

    // Throws config_error when ids collide or the scale bounds are inverted.
    void validate() const;
    int item_index(const std::string& id) const; // -1 if absent
    std::vector<std::string> item_ids() const;
    // Distinct subscale names in first-appearance order.
    std::vector<std::string> subscales() const;
    std::vector<std::string> subscale_items(const std::string& name) const;

    static Codebook from_json_file(const std::string& path);
    static Codebook from_json_text(const std::string& text);
    std::string to_json_text() const;
};

// n respondents x p items; missing cells are NaN.
struct ResponseMatrix {
    std::vector<std::string> respondent_ids;
    std::vector<std::string> item_ids;
    Eigen::MatrixXd values;

    Eigen::Index n() const { return values.rows(); }
    Eigen::Index p() const { return values.cols(); }
    int item_index(const std::string& id) const;
    // Column-subset copy preserving respondent order.
    ResponseMatrix select_items(const std::vector<std::string>& ids) const;
};

enum class Aggregation { mean, sum };

struct ScoreTable {
    std::vector<std::string> respondent_ids;
    std::vector<std::string> columns;
    Eigen::MatrixXd values; // n x #columns, NaN for incomplete rows
    Aggregation aggregation = Aggregation::mean;

    int column_index(const std::string& name) const;
    std::vector<double> column(const std::string& name) const;
};

enum class Group { low, mid, high };

const char* to_string(Group g);

struct GroupLabel {
    std::string respondent_id;
    Group group = Group::mid;
    // A respondent at a degenerate split satisfies both quartile rules.
    bool low = false;
    bool high = false;
};

struct QuartileSplit {
    double q1 = 0, q3 = 0;
    std::vector<GroupLabel> labels; // only respondents with a score
    bool degenerate = false;        // some respondent is both low and high
};

struct RowError {
    std::size_t row = 0; // 1-based data row number
    std::string message;
};

struct CellError {
    std::string respondent_id;
    std::string item_id;
    std::string raw;
    std::string message;
};

struct IngestReport {
    std::size_t received = 0;
    std::size_t duplicates = 0;
    std::size_t disqualified = 0;
    std::size_t malformed = 0;
    std::size_t retained = 0;
    std::vector<RowError> row_errors;
    std::vector<CellError> cell_errors;
};

// Keep a row only when its value in `column` is one of `allowed`.
struct DisqualifyRule {
    std::string column;
    std::vector<std::string> allowed;
};

struct IngestResult {
    ResponseMatrix matrix;
    IngestReport report;
};

// Deduplicates on dedup_key (first occurrence wins), applies the
// disqualification rules, then parses item columns against the codebook
// bounds. Bad cells become missing and are recorded; malformed rows are
// recorded and skipped.
IngestResult ingest(const csv::Table& rows, const Codebook& cb, const std::string& dedup_key,
                    const std::vector<DisqualifyRule>& disqualify);

// v -> scale_min + scale_max - v on reversed items; missing preserved.
ResponseMatrix reverse_code(const ResponseMatrix& m, const Codebook& cb);

struct ListwiseResult {
    ResponseMatrix matrix;
    std::size_t removed = 0;
};

// Drops every row with a missing value among `items` (all items when empty).
ListwiseResult listwise(const ResponseMatrix& m, const std::vector<std::string>& items = {});

// Per-subscale aggregate; respondents missing any constituent item get a
// missing score.
ScoreTable subscale_scores(const ResponseMatrix& m, const Codebook& cb, Aggregation agg);

ScoreTable composite_score(const ResponseMatrix& m, const Codebook& cb,
                           const std::vector<std::string>& item_set,
                           const std::string& name = "composite");

// Q1/Q3 by linear interpolation between order statistics at 1 + (n-1)q.
double percentile(std::vector<double> sorted_values, double q);

QuartileSplit quartile_classify(const ScoreTable& scores, const std::string& column);

} // namespace latentkit::dataset
