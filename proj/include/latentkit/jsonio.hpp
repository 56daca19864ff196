#pragma once

#include "latentkit/cluster.hpp"
#include "latentkit/dataset.hpp"
#include "latentkit/efa.hpp"
#include "latentkit/inference.hpp"
#include "latentkit/mds.hpp"
#include "latentkit/reliability.hpp"
#include "latentkit/screening.hpp"
#include "latentkit/validity.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>

// JSON/CSV emitters for every report type the CLI writes. Missing values
// serialize as JSON null; CSV cells use shortest-roundtrip decimal text.

namespace latentkit::io {

using json = nlohmann::json;

json to_json(const dataset::IngestReport& r);
json to_json(const screening::Descriptives& d);
json to_json(const screening::FactorabilityReport& r);
json to_json(const efa::FactorSolution& s, const std::vector<std::string>& items);
json to_json(const efa::RetentionAdvice& r);
json to_json(const efa::AssignmentReport& r);
json to_json(const reliability::ReliabilityReport& r);
json to_json(const reliability::DisattenuatedMatrix& m);
json to_json(const validity::FornellLarckerMatrix& m);
json to_json(const validity::KnownGroupsReport& r);
json to_json(const inference::TestResult& t);
json to_json(const inference::RegressionResult& r);
json to_json(const mds::MdsSolution& s);
json to_json(const mds::StressBaseline& b);
json to_json(const cluster::Dendrogram& d);

std::string format_number(double v);

csv::Table scores_csv(const dataset::ScoreTable& t);
csv::Table corr_csv(const screening::CorrMatrix& m);
// Items x factors with the communality column, Table-style.
csv::Table loadings_csv(const Eigen::MatrixXd& loadings, const std::vector<std::string>& items,
                        const Eigen::VectorXd& communalities = Eigen::VectorXd());
csv::Table scree_csv(const Eigen::VectorXd& full, const Eigen::VectorXd& reduced);
// Diagonal/lower/upper roles tagged in a legend column.
csv::Table disattenuated_csv(const reliability::DisattenuatedMatrix& m);
csv::Table fornell_larcker_csv(const validity::FornellLarckerMatrix& m);
csv::Table configuration_csv(const mds::MdsSolution& s);
csv::Table posthoc_csv(const std::vector<inference::PairwiseResult>& rows,
                       const std::vector<std::string>& group_names);

void write_json_file(const std::string& path, const json& j);
void write_text_file(const std::string& path, const std::string& text);

} // namespace latentkit::io
