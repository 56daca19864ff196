#include "latentkit/reliability.hpp"

#include "latentkit/kernels.hpp"

#include <cmath>

namespace latentkit::reliability {

namespace {

double sample_variance(const Eigen::VectorXd& x) {
    const double n = static_cast<double>(x.size());
    if (n < 2) return 0.0;
    const double mean = x.mean();
    return (x.array() - mean).square().sum() / (n - 1.0);
}

void require_shape(const Eigen::MatrixXd& items, Eigen::Index min_k) {
    if (items.cols() < min_k)
        fail(errc::insufficient_data, "needs >= " + std::to_string(min_k) + " items");
    if (items.rows() < 3) fail(errc::insufficient_data, "needs >= 3 complete rows");
}

} // namespace

double cronbach_alpha(const Eigen::MatrixXd& items) {
    require_shape(items, 2);
    const double k = static_cast<double>(items.cols());
    double item_var = 0;
    for (Eigen::Index j = 0; j < items.cols(); ++j) item_var += sample_variance(items.col(j));
    const double total_var = sample_variance(items.rowwise().sum());
    if (total_var <= 0) fail(errc::degenerate, "total score has zero variance");
    return k / (k - 1.0) * (1.0 - item_var / total_var);
}

double cronbach_alpha_standardized(const Eigen::MatrixXd& items) {
    require_shape(items, 2);
    const Eigen::Index k = items.cols();
    double rsum = 0;
    std::size_t pairs = 0;
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = a + 1; b < k; ++b) {
            const auto s = kernels::bivariate_sums(items.col(a).data(), items.col(b).data(),
                                                   static_cast<std::size_t>(items.rows()));
            const double n = static_cast<double>(items.rows());
            const double vx = s.sxx - s.sx * s.sx / n;
            const double vy = s.syy - s.sy * s.sy / n;
            if (vx <= 0 || vy <= 0) fail(errc::degenerate, "zero-variance item");
            rsum += (s.sxy - s.sx * s.sy / n) / std::sqrt(vx * vy);
            ++pairs;
        }
    }
    const double rbar = rsum / static_cast<double>(pairs);
    const double dk = static_cast<double>(k);
    return dk * rbar / (1.0 + (dk - 1.0) * rbar);
}

std::vector<double> alpha_if_deleted(const Eigen::MatrixXd& items) {
    require_shape(items, 3);
    const Eigen::Index k = items.cols();
    std::vector<double> out(static_cast<std::size_t>(k));
    Eigen::MatrixXd rest(items.rows(), k - 1);
    for (Eigen::Index drop = 0; drop < k; ++drop) {
        Eigen::Index c = 0;
        for (Eigen::Index j = 0; j < k; ++j)
            if (j != drop) rest.col(c++) = items.col(j);
        out[static_cast<std::size_t>(drop)] = cronbach_alpha(rest);
    }
    return out;
}

std::vector<double> corrected_item_total(const Eigen::MatrixXd& items) {
    require_shape(items, 2);
    const Eigen::Index k = items.cols();
    const Eigen::VectorXd total = items.rowwise().sum();
    std::vector<double> out(static_cast<std::size_t>(k), missing_value);
    for (Eigen::Index j = 0; j < k; ++j) {
        const Eigen::VectorXd rest = total - items.col(j);
        const double vi = sample_variance(items.col(j));
        const double vr = sample_variance(rest);
        if (vi <= 0 || vr <= 0) continue; // zero-variance remainder stays missing
        const double n = static_cast<double>(items.rows());
        const double cov =
            ((items.col(j).array() - items.col(j).mean()) * (rest.array() - rest.mean())).sum() /
            (n - 1.0);
        out[static_cast<std::size_t>(j)] = cov / std::sqrt(vi * vr);
    }
    return out;
}

ReliabilityReport analyze(const dataset::ResponseMatrix& m, const std::vector<std::string>& items) {
    const auto sub = m.select_items(items);
    const auto complete = dataset::listwise(sub);
    ReliabilityReport rep;
    rep.items = items;
    rep.k = items.size();
    rep.n = static_cast<std::size_t>(complete.matrix.n());
    rep.alpha = cronbach_alpha(complete.matrix.values);
    rep.alpha_standardized = cronbach_alpha_standardized(complete.matrix.values);
    if (rep.k >= 3) rep.alpha_if_deleted = alpha_if_deleted(complete.matrix.values);
    rep.corrected_item_total = corrected_item_total(complete.matrix.values);
    return rep;
}

Disattenuated disattenuate(double r_obs, double alpha_a, double alpha_b) {
    if (!(alpha_a > 0 && alpha_a <= 1) || !(alpha_b > 0 && alpha_b <= 1))
        fail(errc::domain_error, "alphas must lie in (0, 1]");
    Disattenuated d;
    d.value = r_obs / std::sqrt(alpha_a * alpha_b);
    d.overcorrected = std::fabs(d.value) > 1.0;
    return d;
}

DisattenuatedMatrix disattenuated_matrix(const screening::CorrMatrix& score_corr,
                                         const std::vector<double>& alphas) {
    const Eigen::Index m = score_corr.p();
    if (static_cast<Eigen::Index>(alphas.size()) != m)
        fail(errc::domain_error, "alpha count must match matrix order");
    DisattenuatedMatrix out;
    out.names = score_corr.item_ids;
    out.cells.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i) out.cells(i, i) = alphas[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const double r = score_corr.r(i, j);
            out.cells(j, i) = r; // observed below the diagonal
            const auto d = disattenuate(r, alphas[static_cast<std::size_t>(i)],
                                        alphas[static_cast<std::size_t>(j)]);
            out.cells(i, j) = d.value; // corrected above
            if (d.overcorrected) out.overcorrected.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
    }
    return out;
}

} // namespace latentkit::reliability
