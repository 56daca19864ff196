#include "latentkit/mds.hpp"

#include "latentkit/kernels.hpp"
#include "latentkit/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <thread>

namespace latentkit::mds {

void Dissimilarity::validate() const {
    if (delta.rows() != delta.cols()) fail(errc::domain_error, "dissimilarity matrix must be square");
    for (Eigen::Index i = 0; i < delta.rows(); ++i) {
        if (delta(i, i) != 0) fail(errc::domain_error, "dissimilarity diagonal must be zero");
        for (Eigen::Index j = i + 1; j < delta.cols(); ++j) {
            if (delta(i, j) < 0) fail(errc::domain_error, "dissimilarities must be nonnegative");
            if (std::fabs(delta(i, j) - delta(j, i)) > 1e-12)
                fail(errc::domain_error, "dissimilarity matrix must be symmetric");
        }
    }
}

Dissimilarity corr_to_dissimilarity(const screening::CorrMatrix& r, DissimilarityTransform t) {
    Dissimilarity d;
    d.labels = r.item_ids;
    d.provenance = to_string(r.method);
    const Eigen::Index p = r.p();
    d.delta.setZero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = i + 1; j < p; ++j) {
            const double rv = r.r(i, j);
            if (is_missing(rv)) fail(errc::domain_error, "correlation cell missing");
            const double delta = t == DissimilarityTransform::one_minus_r
                                     ? 1.0 - rv
                                     : std::sqrt(2.0 * (1.0 - rv));
            d.delta(i, j) = d.delta(j, i) = delta;
        }
    }
    return d;
}

Dissimilarity from_matrix(Eigen::MatrixXd delta, std::vector<std::string> labels) {
    Dissimilarity d;
    d.delta = std::move(delta);
    if (labels.empty())
        for (Eigen::Index i = 0; i < d.delta.rows(); ++i)
            labels.push_back("item_" + std::to_string(i + 1));
    d.labels = std::move(labels);
    d.validate();
    return d;
}

Dissimilarity squared_euclidean(const Eigen::MatrixXd& x, std::vector<std::string> labels) {
    const Eigen::Index p = x.rows();
    Eigen::MatrixXd delta(p, p);
    delta.setZero();
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = i + 1; j < p; ++j) {
            Eigen::RowVectorXd a = x.row(i);
            Eigen::RowVectorXd b = x.row(j);
            delta(i, j) = delta(j, i) =
                kernels::sqdist(a.data(), b.data(), static_cast<std::size_t>(x.cols()));
        }
    }
    return from_matrix(std::move(delta), std::move(labels));
}

ClassicalInit classical_init(const Dissimilarity& d, int k, std::uint64_t seed) {
    d.validate();
    const Eigen::Index p = d.p();
    if (k < 1) fail(errc::config_error, "dimension must be >= 1");
    if (k >= p) fail(errc::dimension_error, "dimension must be < point count");

    const Eigen::MatrixXd sq = d.delta.array().square();
    const Eigen::MatrixXd j =
        Eigen::MatrixXd::Identity(p, p) - Eigen::MatrixXd::Constant(p, p, 1.0 / static_cast<double>(p));
    const Eigen::MatrixXd b = -0.5 * j * sq * j;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    if (es.info() != Eigen::Success) fail(errc::extraction_failed, "eigendecomposition failed");

    ClassicalInit init;
    init.x.resize(p, k);
    bool any_positive = false;
    for (int c = 0; c < k; ++c) {
        const Eigen::Index idx = p - 1 - c;
        const double lambda = es.eigenvalues()(idx);
        if (lambda > 1e-12) any_positive = true;
        init.x.col(c) = es.eigenvectors().col(idx) * std::sqrt(std::max(lambda, 0.0));
    }
    if (!any_positive) {
        init.fallback_random = true;
        const CounterRng rng(seed, 0xc1a55ULL);
        const double scale = d.delta.maxCoeff() > 0 ? d.delta.maxCoeff() : 1.0;
        for (Eigen::Index i = 0; i < p; ++i)
            for (int c = 0; c < k; ++c)
                init.x(i, c) = rng.uniform(static_cast<std::uint64_t>(i * k + c), -scale, scale);
    }
    return init;
}

std::vector<double> pava(const std::vector<double>& y, const std::vector<double>& weights) {
    const std::size_t n = y.size();
    if (!weights.empty() && weights.size() != n) fail(errc::domain_error, "weight length mismatch");
    for (double w : weights)
        if (!(w > 0)) fail(errc::domain_error, "weights must be positive");

    // Stack of blocks (mean, weight, count); violators merge backwards.
    std::vector<double> mean(n), weight(n);
    std::vector<std::size_t> count(n);
    std::size_t top = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mean[top] = y[i];
        weight[top] = weights.empty() ? 1.0 : weights[i];
        count[top] = 1;
        ++top;
        while (top > 1 && mean[top - 2] > mean[top - 1]) {
            const double w = weight[top - 2] + weight[top - 1];
            mean[top - 2] = (mean[top - 2] * weight[top - 2] + mean[top - 1] * weight[top - 1]) / w;
            weight[top - 2] = w;
            count[top - 2] += count[top - 1];
            --top;
        }
    }
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t b = 0; b < top; ++b) out.insert(out.end(), count[b], mean[b]);
    return out;
}

double stress1(const std::vector<double>& d, const std::vector<double>& d_hat) {
    if (d.size() != d_hat.size()) fail(errc::domain_error, "length mismatch");
    double num = 0, den = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double r = d[i] - d_hat[i];
        num += r * r;
        den += d[i] * d[i];
    }
    if (den <= 0) fail(errc::degenerate, "zero distance norm");
    return std::sqrt(num / den);
}

double rsq(const std::vector<double>& d_hat, const std::vector<double>& d) {
    if (d.size() != d_hat.size()) fail(errc::domain_error, "length mismatch");
    const auto s = kernels::bivariate_sums(d_hat.data(), d.data(), d.size());
    const double n = static_cast<double>(d.size());
    const double vx = s.sxx - s.sx * s.sx / n;
    const double vy = s.syy - s.sy * s.sy / n;
    if (vx <= 0 || vy <= 0) fail(errc::degenerate, "constant disparities or distances");
    const double cov = s.sxy - s.sx * s.sy / n;
    return std::min(1.0, cov * cov / (vx * vy));
}

namespace {

struct PairIndex {
    std::vector<int> row, col;
    std::size_t np = 0;
};

PairIndex make_pairs(Eigen::Index p) {
    PairIndex idx;
    idx.np = static_cast<std::size_t>(p) * static_cast<std::size_t>(p - 1) / 2;
    idx.row.reserve(idx.np);
    idx.col.reserve(idx.np);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            idx.row.push_back(i);
            idx.col.push_back(j);
        }
    return idx;
}

void compute_distances(const Eigen::MatrixXd& x, const PairIndex& idx, std::vector<double>& d) {
    const std::size_t k = static_cast<std::size_t>(x.cols());
    // Row-major copy so each point is contiguous for the distance kernel.
    static thread_local std::vector<double> rows;
    rows.assign(static_cast<std::size_t>(x.rows()) * k, 0.0);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index c = 0; c < x.cols(); ++c)
            rows[static_cast<std::size_t>(i) * k + static_cast<std::size_t>(c)] = x(i, c);
    d.resize(idx.np);
    for (std::size_t q = 0; q < idx.np; ++q) {
        const double* a = rows.data() + static_cast<std::size_t>(idx.row[q]) * k;
        const double* b = rows.data() + static_cast<std::size_t>(idx.col[q]) * k;
        d[q] = std::sqrt(kernels::sqdist(a, b, k));
    }
}

// Ordinal transform: isotonic fit of the distances in delta order; ties in
// delta are pre-sorted by current distance (primary approach).
void ordinal_disparities(const std::vector<double>& delta, const std::vector<double>& d,
                         std::vector<std::size_t>& order, std::vector<double>& buf,
                         std::vector<double>& d_hat) {
    const std::size_t np = delta.size();
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (delta[a] != delta[b]) return delta[a] < delta[b];
        if (d[a] != d[b]) return d[a] < d[b];
        return a < b;
    });
    buf.resize(np);
    for (std::size_t q = 0; q < np; ++q) buf[q] = d[order[q]];
    const std::vector<double> fit = pava(buf);
    d_hat.resize(np);
    for (std::size_t q = 0; q < np; ++q) d_hat[order[q]] = fit[q];
}

struct LinearFit {
    double a = 0, b = 1;
};

// Interval transform: least-squares line with positive slope.
LinearFit interval_disparities(const std::vector<double>& delta, const std::vector<double>& d,
                               std::vector<double>& d_hat) {
    const auto s = kernels::bivariate_sums(delta.data(), d.data(), delta.size());
    const double n = static_cast<double>(delta.size());
    const double vx = s.sxx - s.sx * s.sx / n;
    LinearFit fit;
    if (vx <= 0) {
        fit.b = 0;
        fit.a = s.sy / n;
    } else {
        fit.b = (s.sxy - s.sx * s.sy / n) / vx;
        if (fit.b <= 0) fit.b = 1e-12;
        fit.a = (s.sy - fit.b * s.sx) / n;
    }
    d_hat.resize(delta.size());
    for (std::size_t q = 0; q < delta.size(); ++q) d_hat[q] = fit.a + fit.b * delta[q];
    return fit;
}

struct FitState {
    Eigen::MatrixXd x;
    std::vector<double> d, d_hat;
    double stress = 0;
    LinearFit linear;
    int iterations = 0;
    bool converged = false;
};

FitState run_majorization(const Eigen::MatrixXd& x0, const std::vector<double>& delta,
                          const PairIndex& idx, Transform transform, double tol, int max_iter) {
    const Eigen::Index p = x0.rows();
    FitState st;
    st.x = x0;
    std::vector<std::size_t> order(idx.np);
    std::vector<double> buf;
    Eigen::MatrixXd bx(p, st.x.cols());
    Eigen::VectorXd bdiag(p);

    double prev = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iter; ++iter) {
        compute_distances(st.x, idx, st.d);
        if (transform == Transform::ordinal)
            ordinal_disparities(delta, st.d, order, buf, st.d_hat);
        else
            st.linear = interval_disparities(delta, st.d, st.d_hat);

        double num = 0, den = 0;
        for (std::size_t q = 0; q < idx.np; ++q) {
            const double r = st.d[q] - st.d_hat[q];
            num += r * r;
            den += st.d[q] * st.d[q];
        }
        st.stress = den > 0 ? std::sqrt(num / den) : 0.0;
        st.iterations = iter + 1;
        // Relative stress change; the floor lets exact fits drain to zero.
        if (std::fabs(prev - st.stress) < tol * std::max(st.stress, 1e-8)) {
            st.converged = true;
            break;
        }
        prev = st.stress;

        // Guttman transform.
        bx.setZero();
        bdiag.setZero();
        for (std::size_t q = 0; q < idx.np; ++q) {
            const int i = idx.row[q], j = idx.col[q];
            const double w = st.d[q] > 0 ? st.d_hat[q] / st.d[q] : 0.0;
            bdiag(i) += w;
            bdiag(j) += w;
            bx.row(i) -= w * st.x.row(j);
            bx.row(j) -= w * st.x.row(i);
        }
        for (Eigen::Index i = 0; i < p; ++i) bx.row(i) += bdiag(i) * st.x.row(i);
        st.x = bx / static_cast<double>(p);
    }
    // Final distances/disparities for the configuration actually reported.
    compute_distances(st.x, idx, st.d);
    if (transform == Transform::ordinal)
        ordinal_disparities(delta, st.d, order, buf, st.d_hat);
    else
        st.linear = interval_disparities(delta, st.d, st.d_hat);
    double num = 0, den = 0;
    for (std::size_t q = 0; q < idx.np; ++q) {
        const double r = st.d[q] - st.d_hat[q];
        num += r * r;
        den += st.d[q] * st.d[q];
    }
    st.stress = den > 0 ? std::sqrt(num / den) : 0.0;
    return st;
}

// Trivial configurations show up as near-constant distances or as points
// collapsing onto each other (step-function disparities with zero stress).
bool degenerate_spread(const std::vector<double>& d) {
    if (d.empty()) return true;
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    const double dmax = *std::max_element(d.begin(), d.end());
    if (mean <= 0 || dmax <= 0) return true;
    double var = 0;
    for (double v : d) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d.size());
    if (std::sqrt(var) / mean < 1e-3) return true;
    std::size_t coincident = 0;
    for (double v : d)
        if (v < 1e-3 * dmax) ++coincident;
    return static_cast<double>(coincident) >= 0.05 * static_cast<double>(d.size());
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    const int workers = std::min(threads, n);
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

MdsSolution run_mds(const Dissimilarity& diss, int k, std::uint64_t seed, const MdsOptions& opts,
                    Transform transform) {
    diss.validate();
    const Eigen::Index p = diss.p();
    if (p <= k) fail(errc::dimension_error, "needs more points than dimensions");
    if (opts.restarts < 1) fail(errc::config_error, "restarts must be >= 1");

    const PairIndex idx = make_pairs(p);
    std::vector<double> delta(idx.np);
    for (std::size_t q = 0; q < idx.np; ++q) delta[q] = diss.delta(idx.row[q], idx.col[q]);

    const ClassicalInit init = classical_init(diss, k, seed);
    const CounterRng rng(seed, 0x5747a275ULL);

    std::vector<FitState> fits(static_cast<std::size_t>(opts.restarts));
    parallel_for(opts.restarts, opts.threads, [&](int s) {
        Eigen::MatrixXd x0;
        if (s == 0) {
            x0 = init.x;
        } else {
            const CounterRng sub = rng.substream(static_cast<std::uint64_t>(s));
            const double scale = std::max(diss.delta.maxCoeff(), 1e-6);
            x0.resize(p, k);
            for (Eigen::Index i = 0; i < p; ++i)
                for (int c = 0; c < k; ++c)
                    x0(i, c) = sub.uniform(static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(k) +
                                               static_cast<std::uint64_t>(c),
                                           -scale / 2, scale / 2);
        }
        fits[static_cast<std::size_t>(s)] =
            run_majorization(x0, delta, idx, transform, opts.tol, opts.max_iter);
    });

    // Lowest stress wins; degenerate spreads lose to any clean fit; ties go
    // to the earliest start.
    int best = -1;
    bool best_degenerate = true;
    for (int s = 0; s < opts.restarts; ++s) {
        const bool deg = degenerate_spread(fits[static_cast<std::size_t>(s)].d);
        if (best < 0 || (best_degenerate && !deg) ||
            (deg == best_degenerate &&
             fits[static_cast<std::size_t>(s)].stress < fits[static_cast<std::size_t>(best)].stress)) {
            best = s;
            best_degenerate = deg;
        }
    }

    const FitState& win = fits[static_cast<std::size_t>(best)];
    MdsSolution sol;
    sol.configuration = rotate_principal(win.x);
    sol.labels = diss.labels;
    sol.distances = win.d;
    sol.disparities = win.d_hat;
    sol.stress = win.stress;
    sol.transform = transform;
    sol.iterations = win.iterations;
    sol.restarts_used = opts.restarts;
    sol.best_start = best;
    sol.converged = win.converged;
    sol.degenerate = best_degenerate;
    sol.linear_a = win.linear.a;
    sol.linear_b = win.linear.b;
    if (best_degenerate) sol.flags.push_back("DEGENERATE_SOLUTION");
    if (p < 4 * k + 1) {
        sol.stability_warning = true;
        sol.flags.push_back("STABILITY_WARNING");
    }
    if (init.fallback_random) sol.flags.push_back("RANDOM_INIT_FALLBACK");
    try {
        sol.rsq = rsq(sol.disparities, sol.distances);
    } catch (const Error&) {
        sol.rsq = missing_value;
        sol.flags.push_back("RSQ_DEGENERATE");
    }
    return sol;
}

} // namespace

MdsSolution nonmetric_mds(const Dissimilarity& d, int k, std::uint64_t seed, const MdsOptions& opts) {
    return run_mds(d, k, seed, opts, Transform::ordinal);
}

MdsSolution metric_mds(const Dissimilarity& d, int k, std::uint64_t seed, const MdsOptions& opts) {
    return run_mds(d, k, seed, opts, Transform::interval);
}

Eigen::MatrixXd rotate_principal(const Eigen::MatrixXd& x) {
    if (x.rows() == 0) fail(errc::domain_error, "empty configuration");
    Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    if (x.cols() == 1) return centered;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(centered.transpose() * centered);
    if (es.info() != Eigen::Success) fail(errc::extraction_failed, "eigendecomposition failed");
    const Eigen::Index k = x.cols();
    Eigen::MatrixXd v(k, k);
    for (Eigen::Index c = 0; c < k; ++c) v.col(c) = es.eigenvectors().col(k - 1 - c);
    Eigen::MatrixXd out = centered * v;
    for (Eigen::Index c = 0; c < k; ++c) {
        Eigen::Index arg = 0;
        out.col(c).cwiseAbs().maxCoeff(&arg);
        if (out(arg, c) < 0) out.col(c) = -out.col(c);
    }
    return out;
}

StressBaseline random_stress_baseline(int p, int k, int trials, std::uint64_t seed,
                                      const MdsOptions& opts) {
    if (trials < 20) fail(errc::min_trials, "baseline needs >= 20 trials");
    if (p < 2) fail(errc::config_error, "baseline needs p >= 2");

    std::vector<double> stresses(static_cast<std::size_t>(trials));
    const CounterRng rng(seed, 0xba5e11e5ULL);
    parallel_for(trials, opts.threads, [&](int t) {
        const CounterRng sub = rng.substream(static_cast<std::uint64_t>(t));
        Eigen::MatrixXd delta(p, p);
        delta.setZero();
        std::uint64_t c = 0;
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) {
                const double v = sub.uniform(c++, 0.05, 1.0);
                delta(i, j) = delta(j, i) = v;
            }
        Dissimilarity d = from_matrix(std::move(delta));
        d.provenance = "random_baseline";
        const MdsSolution sol = nonmetric_mds(d, k, sub.bits(1u << 20), {.restarts = opts.restarts,
                                                                         .tol = opts.tol,
                                                                         .max_iter = opts.max_iter,
                                                                         .threads = 1});
        stresses[static_cast<std::size_t>(t)] = sol.stress;
    });

    StressBaseline bl;
    bl.trials = trials;
    bl.mean = std::accumulate(stresses.begin(), stresses.end(), 0.0) / static_cast<double>(trials);
    double var = 0;
    for (double s : stresses) var += (s - bl.mean) * (s - bl.mean);
    bl.sd = trials > 1 ? std::sqrt(var / static_cast<double>(trials - 1)) : 0.0;
    std::sort(stresses.begin(), stresses.end());
    bl.min = stresses.front();
    bl.max = stresses.back();
    const double pos = 0.05 * (static_cast<double>(trials) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - std::floor(pos);
    bl.p05 = lo + 1 < stresses.size() ? stresses[lo] + frac * (stresses[lo + 1] - stresses[lo])
                                      : stresses[lo];
    return bl;
}

} // namespace latentkit::mds
