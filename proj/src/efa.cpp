#include "latentkit/efa.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace latentkit::efa {

namespace {

// Eigenvalues (descending) and matching eigenvectors of a symmetric matrix.
void sym_eigen_desc(const Eigen::MatrixXd& s, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    if (es.info() != Eigen::Success) fail(errc::extraction_failed, "eigendecomposition failed");
    const Eigen::Index p = s.rows();
    values.resize(p);
    vectors.resize(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        values(i) = es.eigenvalues()(p - 1 - i);
        vectors.col(i) = es.eigenvectors().col(p - 1 - i);
    }
}

// Largest-|value| entry of every column made positive.
void fix_column_signs(Eigen::MatrixXd& l) {
    for (Eigen::Index j = 0; j < l.cols(); ++j) {
        Eigen::Index arg = 0;
        l.col(j).cwiseAbs().maxCoeff(&arg);
        if (l(arg, j) < 0) l.col(j) = -l.col(j);
    }
}

} // namespace

Eigen::VectorXd smc(const Eigen::MatrixXd& r) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(r);
    if (!lu.isInvertible()) fail(errc::singular_matrix, "correlation matrix is singular");
    const Eigen::MatrixXd inv = lu.inverse();
    Eigen::VectorXd out(r.rows());
    for (Eigen::Index i = 0; i < r.rows(); ++i) out(i) = 1.0 - 1.0 / inv(i, i);
    return out;
}

EigenSpectrum eigen_spectrum(const Eigen::MatrixXd& r, const Eigen::VectorXd& communalities) {
    EigenSpectrum spec;
    Eigen::MatrixXd vecs;
    sym_eigen_desc(r, spec.full, vecs);
    Eigen::MatrixXd reduced = r;
    if (communalities.size() > 0) {
        if (communalities.size() != r.rows())
            fail(errc::domain_error, "communalities length must match matrix order");
        reduced.diagonal() = communalities;
    } else {
        reduced.diagonal() = smc(r);
    }
    sym_eigen_desc(reduced, spec.reduced, vecs);
    return spec;
}

int kaiser_count(const Eigen::VectorXd& eigen_full) {
    int count = 0;
    for (Eigen::Index i = 0; i < eigen_full.size(); ++i)
        if (eigen_full(i) > 1.0) ++count;
    return count;
}

FactorSolution paf_extract(const Eigen::MatrixXd& r, int m, const PafOptions& opts) {
    const Eigen::Index p = r.rows();
    if (m < 1) fail(errc::config_error, "factor count must be >= 1");
    if (m >= p) fail(errc::config_error, "factor count must be < item count");

    FactorSolution sol;
    sol.m = m;
    sol.overdetermination_warning = 3 * m > p;
    sol.communalities_initial = opts.init.size() > 0 ? opts.init : smc(r);
    if (sol.communalities_initial.size() != p)
        fail(errc::domain_error, "initial communalities length must match matrix order");

    Eigen::VectorXd h = sol.communalities_initial;
    Eigen::MatrixXd reduced = r;
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    Eigen::MatrixXd loadings(p, m);

    sol.converged = false;
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        reduced.diagonal() = h;
        sym_eigen_desc(reduced, values, vectors);
        if (values(0) < 0) fail(errc::extraction_failed, "leading eigenvalue negative");
        for (int j = 0; j < m; ++j) {
            const double lambda = std::max(values(j), 0.0);
            loadings.col(j) = vectors.col(j) * std::sqrt(lambda);
        }
        const Eigen::VectorXd h_new = loadings.rowwise().squaredNorm();
        const double delta = (h_new - h).cwiseAbs().maxCoeff();
        h = h_new;
        if (delta < opts.tol) {
            sol.converged = true;
            ++iter;
            break;
        }
    }
    sol.iterations = iter;
    sol.heywood = (h.array() > 1.0).any();

    fix_column_signs(loadings);
    sol.unrotated = loadings;
    sol.communalities_extracted = h;

    const EigenSpectrum spec = eigen_spectrum(r, h);
    sol.eigen_full = spec.full;
    sol.eigen_reduced = spec.reduced;

    // Until a rotation runs, the solution is orthogonal.
    sol.pattern = loadings;
    sol.phi = Eigen::MatrixXd::Identity(m, m);
    sol.structure = loadings;
    return sol;
}

VarimaxResult varimax(const Eigen::MatrixXd& loadings, bool kaiser_normalize, double eps,
                      int max_iter) {
    const Eigen::Index p = loadings.rows();
    const Eigen::Index m = loadings.cols();
    VarimaxResult res;
    res.rotation = Eigen::MatrixXd::Identity(m, m);
    res.loadings = loadings;
    if (m < 2) return res;

    Eigen::VectorXd norms = Eigen::VectorXd::Ones(p);
    if (kaiser_normalize) {
        norms = loadings.rowwise().norm();
        for (Eigen::Index i = 0; i < p; ++i)
            if (norms(i) <= 0) norms(i) = 1.0;
        res.loadings.array().colwise() /= norms.array();
    }

    auto criterion = [&](const Eigen::MatrixXd& l) {
        double crit = 0;
        for (Eigen::Index j = 0; j < m; ++j) {
            const Eigen::ArrayXd sq = l.col(j).array().square();
            crit += (sq * sq).sum() - sq.sum() * sq.sum() / static_cast<double>(p);
        }
        return crit;
    };

    double crit = criterion(res.loadings);
    res.converged = false;
    for (int sweep = 0; sweep < max_iter; ++sweep) {
        for (Eigen::Index a = 0; a + 1 < m; ++a) {
            for (Eigen::Index b = a + 1; b < m; ++b) {
                // Optimal planar angle for the pair (a, b).
                double u_s = 0, v_s = 0, u2v2 = 0, uv = 0;
                for (Eigen::Index i = 0; i < p; ++i) {
                    const double u = res.loadings(i, a) * res.loadings(i, a) -
                                     res.loadings(i, b) * res.loadings(i, b);
                    const double v = 2.0 * res.loadings(i, a) * res.loadings(i, b);
                    u_s += u;
                    v_s += v;
                    u2v2 += u * u - v * v;
                    uv += u * v;
                }
                const double dp = static_cast<double>(p);
                const double num = 2.0 * (dp * uv - u_s * v_s);
                const double den = dp * u2v2 - (u_s * u_s - v_s * v_s);
                if (std::fabs(num) < 1e-14 && std::fabs(den) < 1e-14) continue;
                const double angle = 0.25 * std::atan2(num, den);
                if (std::fabs(angle) < 1e-12) continue;
                const double c = std::cos(angle), s = std::sin(angle);
                for (Eigen::Index i = 0; i < p; ++i) {
                    const double la = res.loadings(i, a), lb = res.loadings(i, b);
                    res.loadings(i, a) = c * la + s * lb;
                    res.loadings(i, b) = -s * la + c * lb;
                }
                for (Eigen::Index i = 0; i < m; ++i) {
                    const double ta = res.rotation(i, a), tb = res.rotation(i, b);
                    res.rotation(i, a) = c * ta + s * tb;
                    res.rotation(i, b) = -s * ta + c * tb;
                }
            }
        }
        const double next = criterion(res.loadings);
        if (next - crit < eps * std::max(1.0, std::fabs(next))) {
            crit = next;
            res.converged = true;
            break;
        }
        crit = next;
    }

    if (kaiser_normalize) res.loadings.array().colwise() *= norms.array();
    // Sign convention; the rotation picks up the same flips so that
    // loadings == input * rotation keeps holding.
    for (Eigen::Index j = 0; j < m; ++j) {
        Eigen::Index arg = 0;
        res.loadings.col(j).cwiseAbs().maxCoeff(&arg);
        if (res.loadings(arg, j) < 0) {
            res.loadings.col(j) = -res.loadings.col(j);
            res.rotation.col(j) = -res.rotation.col(j);
        }
    }
    return res;
}

PromaxResult promax(const Eigen::MatrixXd& varimax_loadings, const Eigen::MatrixXd& varimax_rotation,
                    double kappa) {
    const Eigen::Index m = varimax_loadings.cols();
    if (kappa < 1.0) fail(errc::config_error, "kappa must be >= 1");
    PromaxResult res;
    if (m < 2) {
        res.pattern = varimax_loadings;
        res.structure = varimax_loadings;
        res.phi = Eigen::MatrixXd::Identity(m, m);
        res.rotation = varimax_rotation;
        return res;
    }

    // Target raises the varimax loadings to |l|^kappa, keeping signs.
    Eigen::MatrixXd target = varimax_loadings.array().abs().pow(kappa) *
                             varimax_loadings.array().sign();

    const Eigen::MatrixXd xtx = varimax_loadings.transpose() * varimax_loadings;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
    if (!lu.isInvertible()) fail(errc::rotation_failed, "normal equations singular");
    Eigen::MatrixXd u = lu.solve(varimax_loadings.transpose() * target);

    Eigen::FullPivLU<Eigen::MatrixXd> lu_utu(u.transpose() * u);
    if (!lu_utu.isInvertible()) fail(errc::rotation_failed, "transform singular");
    // Scale the transform columns so that phi comes out with a unit diagonal.
    const Eigen::VectorXd d = lu_utu.inverse().diagonal();
    for (Eigen::Index j = 0; j < m; ++j) {
        if (!(d(j) > 0)) fail(errc::rotation_failed, "transform scaling failed");
        u.col(j) *= std::sqrt(d(j));
    }

    res.pattern = varimax_loadings * u;
    Eigen::FullPivLU<Eigen::MatrixXd> lu_u(u);
    if (!lu_u.isInvertible()) fail(errc::rotation_failed, "oblique transform singular");
    const Eigen::MatrixXd uinv = lu_u.inverse();
    res.phi = uinv * uinv.transpose();
    res.rotation = varimax_rotation * u;

    // Sign convention on pattern columns; phi flips with the columns.
    Eigen::VectorXd signs = Eigen::VectorXd::Ones(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        Eigen::Index arg = 0;
        res.pattern.col(j).cwiseAbs().maxCoeff(&arg);
        if (res.pattern(arg, j) < 0) signs(j) = -1.0;
    }
    res.pattern = res.pattern * signs.asDiagonal();
    res.rotation = res.rotation * signs.asDiagonal();
    res.phi = signs.asDiagonal() * res.phi * signs.asDiagonal();
    res.structure = res.pattern * res.phi;
    return res;
}

RotatedVariance rotated_variance(const Eigen::MatrixXd& pattern, const Eigen::MatrixXd& structure) {
    if (pattern.rows() != structure.rows() || pattern.cols() != structure.cols())
        fail(errc::domain_error, "pattern/structure shapes differ");
    RotatedVariance rv;
    rv.v = (pattern.array() * structure.array()).colwise().sum();
    const double total = rv.v.sum();
    if (!(total > 0)) fail(errc::degenerate, "total rotated variance not positive");
    rv.percent_total = 100.0 * rv.v / static_cast<double>(pattern.rows());
    rv.percent_common = 100.0 * rv.v / total;
    return rv;
}

AssignmentReport assign_items(const Eigen::MatrixXd& pattern, const std::vector<std::string>& items,
                              double threshold, const std::map<std::string, int>& overrides) {
    if (!(threshold > 0.0 && threshold < 1.0)) fail(errc::config_error, "threshold must be in (0,1)");
    if (static_cast<Eigen::Index>(items.size()) != pattern.rows())
        fail(errc::domain_error, "item list length must match pattern rows");

    AssignmentReport rep;
    rep.threshold = threshold;
    const Eigen::Index m = pattern.cols();
    rep.factor_items.assign(static_cast<std::size_t>(m), {});

    for (Eigen::Index i = 0; i < pattern.rows(); ++i) {
        ItemAssignment a;
        a.item = items[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m; ++j)
            if (std::fabs(pattern(i, j)) >= threshold) a.salient.push_back(static_cast<int>(j));
        a.cross_loading = a.salient.size() >= 2;
        a.below_threshold = a.salient.empty();
        // Max-|pattern| salient factor; on a tie the lowest index wins.
        double best = -1.0;
        for (int j : a.salient) {
            const double mag = std::fabs(pattern(i, j));
            if (mag > best) {
                best = mag;
                a.factor = j;
            } else if (mag == best) {
                a.tie = true;
            }
        }
        const auto ov = overrides.find(a.item);
        if (ov != overrides.end()) {
            if (ov->second < 0 || ov->second >= m) fail(errc::config_error, "override factor out of range");
            a.factor = ov->second;
            a.overridden = true;
        }
        if (a.factor >= 0) rep.factor_items[static_cast<std::size_t>(a.factor)].push_back(a.item);
        rep.items.push_back(std::move(a));
    }
    return rep;
}

dataset::ScoreTable factor_scores(const dataset::ResponseMatrix& m, const AssignmentReport& assignment,
                                  const std::vector<std::string>& factor_names) {
    const std::size_t nf = assignment.factor_items.size();
    dataset::ScoreTable t;
    t.respondent_ids = m.respondent_ids;
    t.aggregation = dataset::Aggregation::mean;
    t.values.resize(m.n(), static_cast<Eigen::Index>(nf));
    for (std::size_t f = 0; f < nf; ++f) {
        t.columns.push_back(f < factor_names.size() ? factor_names[f]
                                                    : "factor_" + std::to_string(f + 1));
        const auto& ids = assignment.factor_items[f];
        if (ids.empty()) {
            t.values.col(static_cast<Eigen::Index>(f)).setConstant(missing_value);
            continue;
        }
        std::vector<int> cols;
        for (const auto& id : ids) {
            const int j = m.item_index(id);
            if (j < 0) fail(errc::config_error, "assigned item missing from matrix: " + id);
            cols.push_back(j);
        }
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
            t.values(i, static_cast<Eigen::Index>(f)) =
                complete ? acc / static_cast<double>(cols.size()) : missing_value;
        }
    }
    return t;
}

FactorSolution fit(const Eigen::MatrixXd& r, int m, const EfaOptions& opts) {
    FactorSolution sol = paf_extract(r, m, opts.paf);
    if (m >= 2) {
        const VarimaxResult vm = varimax(sol.unrotated);
        const PromaxResult pm = promax(vm.loadings, vm.rotation, opts.kappa);
        sol.pattern = pm.pattern;
        sol.structure = pm.structure;
        sol.phi = pm.phi;

        if (opts.sort_by_variance) {
            const RotatedVariance rv = rotated_variance(sol.pattern, sol.structure);
            std::vector<int> order(static_cast<std::size_t>(m));
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](int a, int b) { return rv.v(a) > rv.v(b); });
            Eigen::MatrixXd pat(sol.pattern.rows(), m), phi(m, m);
            for (int j = 0; j < m; ++j) pat.col(j) = sol.pattern.col(order[static_cast<std::size_t>(j)]);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    phi(a, b) = sol.phi(order[static_cast<std::size_t>(a)],
                                        order[static_cast<std::size_t>(b)]);
            sol.pattern = pat;
            sol.phi = phi;
            sol.structure = sol.pattern * sol.phi;
        }
    }
    return sol;
}

double congruence(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double den = std::sqrt(a.squaredNorm() * b.squaredNorm());
    if (!(den > 0)) return 0.0;
    return a.dot(b) / den;
}

} // namespace latentkit::efa
