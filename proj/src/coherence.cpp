#include "sfl/coherence.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sfl {

double mutual_coherence(const Eigen::MatrixXd& M) {
    const int N = static_cast<int>(M.cols());
    if (N < 2) return 0.0;
    const Eigen::MatrixXd G = M.transpose() * M;
    for (int i = 0; i < N; ++i)
        if (G(i, i) <= 0.0)
            throw std::invalid_argument("mutual_coherence: zero-norm column " + std::to_string(i));
    double mu = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j)
            mu = std::max(mu, std::abs(G(i, j)) / std::sqrt(G(i, i) * G(j, j)));
    return mu;
}

DesignMatrix build_design_matrix(const Dictionary& dict, const SampleSet& samples) {
    DesignMatrix dm;
    dm.D = sample_matrix(dict, samples);
    dm.L.resize(dict.N);
    for (int i = 0; i < dict.N; ++i) {
        const double energy = dm.D.col(i).squaredNorm();
        if (energy <= 0.0)
            throw std::invalid_argument(
                "build_design_matrix: element " + std::to_string(i) +
                " has zero energy on this sample set");
        dm.L[i] = 1.0 / std::sqrt(energy);
    }
    dm.A = dm.D * dm.L.asDiagonal();
    dm.mu = mutual_coherence(dm.A);
    dm.C_A = dm.A.cwiseAbs().maxCoeff();
    return dm;
}

DesignMatrix design_from_matrix(Eigen::MatrixXd D) {
    DesignMatrix dm;
    dm.D = std::move(D);
    const int N = dm.N();
    dm.L.resize(N);
    for (int i = 0; i < N; ++i) {
        const double energy = dm.D.col(i).squaredNorm();
        if (energy <= 0.0)
            throw std::invalid_argument(
                "design_from_matrix: column " + std::to_string(i) + " has zero energy");
        dm.L[i] = 1.0 / std::sqrt(energy);
    }
    dm.A = dm.D * dm.L.asDiagonal();
    dm.mu = mutual_coherence(dm.A);
    dm.C_A = dm.A.cwiseAbs().maxCoeff();
    return dm;
}

double sparsity_ceiling(double mu) {
    if (mu < 0.0) throw std::invalid_argument("sparsity_ceiling: negative coherence");
    if (mu == 0.0) return std::numeric_limits<double>::infinity();
    return 0.5 * (1.0 + 1.0 / mu);
}

int select_sparsity(double gamma, int m, int N, double eps) {
    if (!(gamma > 0.0) || !(eps > 0.0) || eps >= 1.0 || m < 1 || N < 1)
        throw std::invalid_argument("select_sparsity: need gamma > 0, 0 < eps < 1, m,N >= 1");
    const double logterm = std::log(2.0 * N * static_cast<double>(N) / eps);
    const double val = 0.5 * (1.0 + std::sqrt(3.0 * gamma * m / logterm) / 16.0);
    const int s = static_cast<int>(std::floor(val));
    return std::min(s, N / 2);
}

double coherence_bound(double gamma, int m, int N, double eps) {
    if (!(gamma > 0.0) || !(eps > 0.0) || eps >= 1.0 || m < 1 || N < 1)
        throw std::invalid_argument("coherence_bound: need gamma > 0, 0 < eps < 1, m,N >= 1");
    return 8.0 * std::sqrt(std::log(2.0 * N * static_cast<double>(N) / eps) / (3.0 * gamma * m));
}

RipReport rip_sandwich_check(const Eigen::MatrixXd& A, const Eigen::VectorXd& x, double tol) {
    if (x.size() != A.cols())
        throw std::invalid_argument("rip_sandwich_check: vector length mismatch");
    for (int i = 0; i < A.cols(); ++i) {
        if (std::abs(A.col(i).norm() - 1.0) > 1e-9)
            throw std::invalid_argument(
                "rip_sandwich_check: column " + std::to_string(i) + " is not unit-norm");
    }
    const double xx = x.squaredNorm();
    if (xx == 0.0) throw std::invalid_argument("rip_sandwich_check: zero vector");

    RipReport rep;
    for (int i = 0; i < x.size(); ++i)
        if (x[i] != 0.0) ++rep.s;
    const double mu = mutual_coherence(A);
    rep.ratio = (A * x).squaredNorm() / xx;
    rep.lower = 1.0 - (rep.s - 1) * mu;
    rep.upper = 1.0 + (rep.s - 1) * mu;
    rep.pass = rep.ratio >= rep.lower - tol && rep.ratio <= rep.upper + tol;
    return rep;
}

}  // namespace sfl
