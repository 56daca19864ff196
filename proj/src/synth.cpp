#include "latentkit/synth.hpp"

#include "latentkit/distributions.hpp"
#include "latentkit/efa.hpp"
#include "latentkit/rng.hpp"

#include <Eigen/Cholesky>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace latentkit::synth {

using nlohmann::json;

Eigen::MatrixXd FactorModelSpec::implied_correlation() const {
    Eigen::MatrixXd r = loadings * phi * loadings.transpose();
    if (uniqueness.size() > 0) {
        r += Eigen::MatrixXd(uniqueness.asDiagonal());
    } else {
        for (Eigen::Index i = 0; i < r.rows(); ++i) r(i, i) = 1.0;
    }
    return r;
}

bool FactorModelSpec::needs_rescaling() const {
    const Eigen::MatrixXd common = loadings * phi * loadings.transpose();
    for (Eigen::Index i = 0; i < loadings.rows(); ++i) {
        const double psi = uniqueness.size() > 0 ? uniqueness(i) : 1.0 - common(i, i);
        if (std::fabs(common(i, i) + psi - 1.0) > 1e-9) return true;
    }
    return false;
}

FactorModelSpec simple_structure_spec(int p, int m, double load_lo, double load_hi,
                                      double phi_offdiag, int n, std::uint64_t seed) {
    if (p < m || m < 1) fail(errc::config_error, "needs p >= m >= 1");
    FactorModelSpec spec;
    spec.loadings.setZero(p, m);
    for (int i = 0; i < p; ++i) {
        const int f = i % m;
        const double t = p > 1 ? static_cast<double>(i) / static_cast<double>(p - 1) : 0.0;
        spec.loadings(i, f) = load_lo + (load_hi - load_lo) * t;
    }
    spec.phi = Eigen::MatrixXd::Constant(m, m, phi_offdiag);
    spec.phi.diagonal().setOnes();
    spec.n = n;
    spec.seed = seed;
    return spec;
}

namespace {

std::vector<double> default_thresholds(int categories) {
    std::vector<double> t;
    for (int c = 1; c < categories; ++c)
        t.push_back(dist::normal_ppf(static_cast<double>(c) / static_cast<double>(categories)));
    return t;
}

} // namespace

Eigen::MatrixXd gen_latent(const FactorModelSpec& spec) {
    const Eigen::Index p = spec.loadings.rows();
    const Eigen::Index m = spec.loadings.cols();
    if (p < 1 || m < 1) fail(errc::config_error, "empty loading matrix");
    if (spec.phi.rows() != m || spec.phi.cols() != m)
        fail(errc::domain_error, "phi order must match loading columns");
    if (spec.n < 1) fail(errc::config_error, "n must be >= 1");

    Eigen::LLT<Eigen::MatrixXd> llt(spec.phi);
    if (llt.info() != Eigen::Success)
        fail(errc::domain_error, "factor correlation matrix not positive definite");
    const Eigen::MatrixXd chol = llt.matrixL();

    // Uniqueness defaults to 1 - communality; a non-unit implied diagonal
    // gets rescaled so latent items stay standard normal.
    Eigen::VectorXd psi = spec.uniqueness;
    const Eigen::MatrixXd common = spec.loadings * spec.phi * spec.loadings.transpose();
    if (psi.size() == 0) {
        psi.resize(p);
        for (Eigen::Index i = 0; i < p; ++i) {
            psi(i) = 1.0 - common(i, i);
            if (psi(i) < 0) fail(errc::domain_error, "communality exceeds 1");
        }
    } else if (psi.size() != p) {
        fail(errc::domain_error, "uniqueness length must match item count");
    }
    Eigen::VectorXd item_scale = Eigen::VectorXd::Ones(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        const double total = common(i, i) + psi(i);
        if (std::fabs(total - 1.0) > 1e-9) item_scale(i) = 1.0 / std::sqrt(total);
    }

    const CounterRng factors_rng = CounterRng(spec.seed, 0xfac705ULL);
    const CounterRng unique_rng = CounterRng(spec.seed, 0x0e791caULL);

    Eigen::MatrixXd out(spec.n, p);
    Eigen::VectorXd z(m), f(m);
    for (Eigen::Index r = 0; r < spec.n; ++r) {
        const std::uint64_t base = static_cast<std::uint64_t>(r) * static_cast<std::uint64_t>(m);
        for (Eigen::Index c = 0; c < m; ++c)
            z(c) = factors_rng.normal(base + static_cast<std::uint64_t>(c));
        f = chol * z;
        const std::uint64_t ubase = static_cast<std::uint64_t>(r) * static_cast<std::uint64_t>(p);
        for (Eigen::Index j = 0; j < p; ++j) {
            const double e = unique_rng.normal(ubase + static_cast<std::uint64_t>(j)) *
                             std::sqrt(std::max(psi(j), 0.0));
            out(r, j) = (spec.loadings.row(j).dot(f) + e) * item_scale(j);
        }
    }
    return out;
}

dataset::ResponseMatrix gen_likert(const FactorModelSpec& spec) {
    const Eigen::Index p = spec.loadings.rows();
    const Eigen::MatrixXd latent = gen_latent(spec);

    std::vector<std::vector<double>> thresholds = spec.thresholds;
    if (thresholds.empty())
        thresholds.assign(static_cast<std::size_t>(p), default_thresholds(spec.categories));
    else if (thresholds.size() != static_cast<std::size_t>(p))
        fail(errc::domain_error, "threshold rows must match item count");

    dataset::ResponseMatrix out;
    out.values.resize(spec.n, p);
    out.respondent_ids.reserve(static_cast<std::size_t>(spec.n));
    for (Eigen::Index j = 0; j < p; ++j) out.item_ids.push_back("item_" + std::to_string(j + 1));
    for (Eigen::Index r = 0; r < spec.n; ++r) {
        out.respondent_ids.push_back("synth_" + std::to_string(r + 1));
        for (Eigen::Index j = 0; j < p; ++j) {
            const auto& th = thresholds[static_cast<std::size_t>(j)];
            int cat = 1;
            for (double cut : th)
                if (latent(r, j) > cut) ++cat;
            out.values(r, j) = static_cast<double>(cat);
        }
    }
    return out;
}

std::vector<int> planted_membership(const FactorModelSpec& spec) {
    std::vector<int> out(static_cast<std::size_t>(spec.loadings.rows()));
    for (Eigen::Index i = 0; i < spec.loadings.rows(); ++i) {
        Eigen::Index arg = 0;
        spec.loadings.row(i).cwiseAbs().maxCoeff(&arg);
        out[static_cast<std::size_t>(i)] = static_cast<int>(arg);
    }
    return out;
}

PlantedPoints planted_points(int p, int k, double spread, double noise, std::uint64_t seed) {
    if (p <= k) fail(errc::config_error, "needs p > k");
    PlantedPoints pp;
    pp.x_true.resize(p, k);
    const CounterRng rng(seed, 0x9017751ULL);
    std::uint64_t c = 0;
    for (int i = 0; i < p; ++i)
        for (int d = 0; d < k; ++d) pp.x_true(i, d) = rng.uniform(c++, -spread, spread);

    Eigen::MatrixXd delta(p, p);
    delta.setZero();
    const CounterRng noise_rng = rng.substream(1);
    std::uint64_t nc = 0;
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            double d = (pp.x_true.row(i) - pp.x_true.row(j)).norm();
            if (noise > 0) d *= 1.0 + noise_rng.uniform(nc++, -noise, noise);
            delta(i, j) = delta(j, i) = d;
        }
    }
    pp.delta = mds::from_matrix(std::move(delta));
    pp.delta.provenance = "planted_points";
    return pp;
}

std::vector<double> matched_congruence(const Eigen::MatrixXd& recovered,
                                       const Eigen::MatrixXd& planted) {
    const int m = static_cast<int>(planted.cols());
    if (recovered.cols() != m || recovered.rows() != planted.rows())
        fail(errc::domain_error, "loading shapes differ");
    Eigen::MatrixXd c(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            c(a, b) = std::fabs(efa::congruence(recovered.col(a), planted.col(b)));

    // Exhaustive assignment; factor counts stay tiny.
    std::vector<int> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_total = -1;
    do {
        double total = 0;
        for (int b = 0; b < m; ++b) total += c(perm[static_cast<std::size_t>(b)], b);
        if (total > best_total) {
            best_total = total;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<double> out(static_cast<std::size_t>(m));
    for (int b = 0; b < m; ++b) out[static_cast<std::size_t>(b)] = c(best[static_cast<std::size_t>(b)], b);
    return out;
}

FactorModelSpec FactorModelSpec::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(errc::config_error, std::string("model spec JSON: ") + e.what());
    }
    FactorModelSpec spec;
    const auto& jl = j.at("loadings");
    const int p = static_cast<int>(jl.size());
    if (p == 0) fail(errc::config_error, "loadings must be a non-empty matrix");
    const int m = static_cast<int>(jl[0].size());
    spec.loadings.resize(p, m);
    for (int i = 0; i < p; ++i)
        for (int c = 0; c < m; ++c) spec.loadings(i, c) = jl[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].get<double>();
    spec.phi = Eigen::MatrixXd::Identity(m, m);
    if (j.contains("phi")) {
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                spec.phi(a, b) = j["phi"][static_cast<std::size_t>(a)][static_cast<std::size_t>(b)].get<double>();
    }
    if (j.contains("uniqueness")) {
        spec.uniqueness.resize(p);
        for (int i = 0; i < p; ++i) spec.uniqueness(i) = j["uniqueness"][static_cast<std::size_t>(i)].get<double>();
    }
    if (j.contains("thresholds"))
        spec.thresholds = j["thresholds"].get<std::vector<std::vector<double>>>();
    spec.categories = j.value("categories", 5);
    spec.n = j.value("n", 0);
    spec.seed = j.value("seed", std::uint64_t{0});
    return spec;
}

std::string FactorModelSpec::to_json_text() const {
    json j;
    j["loadings"] = json::array();
    for (Eigen::Index i = 0; i < loadings.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < loadings.cols(); ++c) row.push_back(loadings(i, c));
        j["loadings"].push_back(std::move(row));
    }
    j["phi"] = json::array();
    for (Eigen::Index a = 0; a < phi.rows(); ++a) {
        json row = json::array();
        for (Eigen::Index b = 0; b < phi.cols(); ++b) row.push_back(phi(a, b));
        j["phi"].push_back(std::move(row));
    }
    if (uniqueness.size() > 0) {
        j["uniqueness"] = json::array();
        for (Eigen::Index i = 0; i < uniqueness.size(); ++i) j["uniqueness"].push_back(uniqueness(i));
    }
    if (!thresholds.empty()) j["thresholds"] = thresholds;
    j["categories"] = categories;
    j["n"] = n;
    j["seed"] = seed;
    j["implied_diagonal_rescaled"] = needs_rescaling();
    return j.dump(2);
}

} // namespace latentkit::synth
