#include "sfl/sampling.hpp"

#include <cmath>
#include <stdexcept>

#include "sfl/rng.hpp"
#include "sfl/util.hpp"

namespace sfl {

SampleSet draw_samples(const Domain& domain, int m, std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("draw_samples: need m >= 1");
    rng::Engine eng(seed);
    SampleSet out;
    out.domain = domain;
    out.seed = seed;
    out.points.resize(m, domain.d);
    const double len = domain.axis_length();
    for (int t = 0; t < m; ++t)
        for (int ax = 0; ax < domain.d; ++ax) out.points(t, ax) = len * eng.uniform01();
    return out;
}

SampleSet uniform_grid_samples(const Domain& domain, int per_axis) {
    if (per_axis < 1) throw std::invalid_argument("uniform_grid_samples: need per_axis >= 1");
    double total = 1.0;
    for (int ax = 0; ax < domain.d; ++ax) total *= per_axis;
    if (total > 4e6) throw std::invalid_argument("uniform_grid_samples: grid too large");
    const int m = static_cast<int>(total);
    SampleSet out;
    out.domain = domain;
    out.seed = 0;
    out.points.resize(m, domain.d);
    const double step = domain.axis_length() / per_axis;
    std::vector<int> idx(static_cast<std::size_t>(domain.d), 0);
    for (int t = 0; t < m; ++t) {
        for (int ax = 0; ax < domain.d; ++ax)
            out.points(t, ax) = idx[static_cast<std::size_t>(ax)] * step;
        int ax = domain.d - 1;
        while (ax >= 0 && idx[static_cast<std::size_t>(ax)] == per_axis - 1) {
            idx[static_cast<std::size_t>(ax)] = 0;
            --ax;
        }
        if (ax >= 0) ++idx[static_cast<std::size_t>(ax)];
    }
    return out;
}

int min_samples_for_coherence(double gamma, int N, double eps) {
    if (!(gamma > 0.0) || !(eps > 0.0) || eps >= 1.0 || N < 1)
        throw std::invalid_argument(
            "min_samples_for_coherence: need gamma > 0, 0 < eps < 1, N >= 1");
    const double x = (64.0 / (3.0 * gamma)) * std::log(2.0 * N * static_cast<double>(N) / eps);
    return static_cast<int>(std::floor(x)) + 1;
}

double sample_bound_chaining(int s, int N) {
    if (s < 1 || N < 3)
        throw std::invalid_argument("sample_bound_chaining: need s >= 1, N >= 3");
    const double l4s = std::log(4.0 * s);
    const double lN = std::log(static_cast<double>(N));
    return s * lN * l4s * l4s * (l4s + std::log(lN));
}

double sample_bound_chaining_r(double R, int s, int N) {
    if (!(R > 0.0) || s < 1 || N < 3)
        throw std::invalid_argument("sample_bound_chaining_r: need R > 0, s >= 1, N >= 3");
    const double l4rs = std::log(4.0 * R * s);
    const double lN = std::log(static_cast<double>(N));
    return R * s * lN * l4rs * l4rs * (l4rs + std::log(lN));
}

Eigen::MatrixXd sample_matrix(const Dictionary& dict, const SampleSet& samples) {
    if (samples.domain.d != dict.domain.d || samples.domain.kind != dict.domain.kind)
        throw std::invalid_argument("sample_matrix: sample/dictionary domain mismatch");
    const int m = samples.m();
    Eigen::MatrixXd D(m, dict.N);
    std::vector<double> x(static_cast<std::size_t>(dict.domain.d));
    for (int t = 0; t < m; ++t) {
        for (int ax = 0; ax < dict.domain.d; ++ax) x[static_cast<std::size_t>(ax)] = samples.points(t, ax);
        D.row(t) = dict.eval_all(x).transpose();
    }
    return D;
}

double empirical_norm(std::span<const double> values, double p) {
    if (values.empty()) throw std::invalid_argument("empirical_norm: empty value set");
    if (!(p >= 1.0)) throw std::invalid_argument("empirical_norm: need p >= 1");
    double acc = 0.0;
    for (double v : values) acc += std::pow(std::abs(v), p);
    return std::pow(acc / static_cast<double>(values.size()), 1.0 / p);
}

double mixture_norm(std::span<const double> values_at_samples, double exact_pth_power, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("mixture_norm: need p >= 1");
    if (exact_pth_power < 0.0)
        throw std::invalid_argument("mixture_norm: negative exact norm power");
    const double emp = std::pow(empirical_norm(values_at_samples, p), p);
    return std::pow(0.5 * exact_pth_power + 0.5 * emp, 1.0 / p);
}

namespace {

// exact ||f||_p^p for an in-span f given by coefficients; gamma-orthogonality
// handles p = 2, a Nyquist-safe tensor grid handles p = 1
double exact_pth_power(const Dictionary& dict, const Eigen::VectorXd& coeffs, double p) {
    if (p == 2.0) return dict.gamma * coeffs.squaredNorm();
    const int G = std::max(2 * dict.N, 64);
    const SampleSet grid = uniform_grid_samples(dict.domain, G);
    double acc = 0.0;
    std::vector<double> x(static_cast<std::size_t>(dict.domain.d));
    for (int t = 0; t < grid.m(); ++t) {
        for (int ax = 0; ax < dict.domain.d; ++ax) x[static_cast<std::size_t>(ax)] = grid.points(t, ax);
        acc += std::pow(std::abs(dict.synthesize(coeffs, x)), p);
    }
    return acc / grid.m();
}

}  // namespace

DiscretizationReport check_universal_discretization(const Dictionary& dict,
                                                    const SampleSet& samples, int s, double p,
                                                    int trials, std::uint64_t seed, double C1,
                                                    double C2) {
    if (s < 1 || 2 * s > dict.N)
        throw std::invalid_argument("check_universal_discretization: need 1 <= 2s <= N");
    if (p != 2.0 && p != 1.0)
        throw std::invalid_argument("check_universal_discretization: p must be 1 or 2");
    if (trials < 1) throw std::invalid_argument("check_universal_discretization: trials >= 1");

    const Eigen::MatrixXd D = sample_matrix(dict, samples);
    const int m = samples.m();
    rng::Engine eng(seed);

    DiscretizationReport rep;
    rep.s = s;
    rep.p = p;
    rep.trials = trials;
    rep.C1 = C1;
    rep.C2 = C2;
    rep.worst_lower = std::numeric_limits<double>::infinity();
    rep.worst_upper = 0.0;

    for (int t = 0; t < trials; ++t) {
        const std::vector<int> supp = eng.subset(dict.N, 2 * s);
        Eigen::VectorXd w = Eigen::VectorXd::Zero(dict.N);
        for (int i : supp) w[i] = eng.normal();
        if (w.norm() == 0.0) w[supp.front()] = 1.0;

        const Eigen::VectorXd vals = D * w;
        double emp = 0.0;
        for (int j = 0; j < m; ++j) emp += std::pow(std::abs(vals[j]), p);
        emp /= m;
        const double exact = exact_pth_power(dict, w, p);
        const double ratio = emp / exact;
        rep.worst_lower = std::min(rep.worst_lower, ratio);
        rep.worst_upper = std::max(rep.worst_upper, ratio);
    }
    rep.pass = rep.worst_lower >= C1 && rep.worst_upper <= C2;
    return rep;
}

EigenCheckReport discretization_eigen_check(const Dictionary& dict, const SampleSet& samples,
                                            int s, double C1, double C2,
                                            long long enumeration_cap) {
    if (s < 1 || 2 * s > dict.N)
        throw std::invalid_argument("discretization_eigen_check: need 1 <= 2s <= N");
    const int k = 2 * s;
    const long long count = binomial(dict.N, k);
    if (count > enumeration_cap)
        throw std::invalid_argument(
            "discretization_eigen_check: support enumeration exceeds the cap");

    const Eigen::MatrixXd D = sample_matrix(dict, samples);
    const Eigen::MatrixXd G = (D.transpose() * D) / (dict.gamma * samples.m());

    EigenCheckReport rep;
    rep.min_eig = std::numeric_limits<double>::infinity();
    rep.max_eig = -std::numeric_limits<double>::infinity();

    std::vector<int> supp(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) supp[static_cast<std::size_t>(i)] = i;
    Eigen::MatrixXd sub(k, k);
    while (true) {
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b)
                sub(a, b) = G(supp[static_cast<std::size_t>(a)], supp[static_cast<std::size_t>(b)]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub, Eigen::EigenvaluesOnly);
        rep.min_eig = std::min(rep.min_eig, es.eigenvalues().minCoeff());
        rep.max_eig = std::max(rep.max_eig, es.eigenvalues().maxCoeff());
        ++rep.supports;

        int pos = k - 1;
        while (pos >= 0 && supp[static_cast<std::size_t>(pos)] == dict.N - k + pos) --pos;
        if (pos < 0) break;
        ++supp[static_cast<std::size_t>(pos)];
        for (int q = pos + 1; q < k; ++q)
            supp[static_cast<std::size_t>(q)] = supp[static_cast<std::size_t>(q - 1)] + 1;
    }
    rep.pass = rep.min_eig >= C1 && rep.max_eig <= C2;
    return rep;
}

ColumnEnergyReport column_energy_check(const Dictionary& dict, const SampleSet& samples) {
    const Eigen::MatrixXd D = sample_matrix(dict, samples);
    ColumnEnergyReport rep;
    rep.energies = D.colwise().squaredNorm();
    rep.lo = dict.gamma * samples.m() / 2.0;
    rep.hi = 3.0 * dict.gamma * samples.m() / 2.0;
    rep.pass = true;
    double worst_gap = 0.0;
    for (int i = 0; i < dict.N; ++i) {
        const double e = rep.energies[i];
        const double gap = std::max(rep.lo - e, e - rep.hi);
        if (gap > worst_gap || rep.worst_index < 0) {
            worst_gap = std::max(gap, 0.0);
            rep.worst_index = i;
        }
        if (e < rep.lo || e > rep.hi) rep.pass = false;
    }
    return rep;
}

}  // namespace sfl
