#include "sfl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sfl/util.hpp"

namespace sfl {

namespace {

// least-squares fit on the given columns; minimum-norm when rank deficient
Eigen::VectorXd ls_on_support(const Eigen::MatrixXd& D, const Eigen::VectorXd& y,
                              const std::vector<int>& supp) {
    Eigen::MatrixXd sub(D.rows(), static_cast<Eigen::Index>(supp.size()));
    for (std::size_t a = 0; a < supp.size(); ++a)
        sub.col(static_cast<Eigen::Index>(a)) = D.col(supp[a]);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sub);
    return cod.solve(y);
}

}  // namespace

OracleResult best_s_term_exhaustive(const Eigen::MatrixXd& D, const Eigen::VectorXd& y, int s,
                                    long long enumeration_cap) {
    const int N = static_cast<int>(D.cols());
    const int m = static_cast<int>(D.rows());
    if (y.size() != m) throw std::invalid_argument("best_s_term_exhaustive: length mismatch");
    if (s < 0 || s > N) throw std::invalid_argument("best_s_term_exhaustive: need 0 <= s <= N");

    OracleResult best;
    best.w = Eigen::VectorXd::Zero(N);
    if (s == 0) {
        best.residual = y.norm() / std::sqrt(static_cast<double>(m));
        return best;
    }
    if (binomial(N, s) > enumeration_cap)
        throw std::invalid_argument(
            "best_s_term_exhaustive: support enumeration exceeds the cap; use omp");

    double best_rss = std::numeric_limits<double>::infinity();
    std::vector<int> supp(static_cast<std::size_t>(s));
    std::iota(supp.begin(), supp.end(), 0);
    std::vector<int> best_supp;
    Eigen::VectorXd best_ws;
    while (true) {
        const Eigen::VectorXd ws = ls_on_support(D, y, supp);
        Eigen::VectorXd r = y;
        for (std::size_t a = 0; a < supp.size(); ++a)
            r -= ws[static_cast<Eigen::Index>(a)] * D.col(supp[a]);
        const double rss = r.squaredNorm();
        if (rss < best_rss) {  // strict: lexicographically first support keeps ties
            best_rss = rss;
            best_supp = supp;
            best_ws = ws;
        }

        int pos = s - 1;
        while (pos >= 0 && supp[static_cast<std::size_t>(pos)] == N - s + pos) --pos;
        if (pos < 0) break;
        ++supp[static_cast<std::size_t>(pos)];
        for (int q = pos + 1; q < s; ++q)
            supp[static_cast<std::size_t>(q)] = supp[static_cast<std::size_t>(q - 1)] + 1;
    }

    best.support = best_supp;
    for (std::size_t a = 0; a < best_supp.size(); ++a)
        best.w[best_supp[a]] = best_ws[static_cast<Eigen::Index>(a)];
    best.residual = std::sqrt(best_rss / m);
    return best;
}

OracleResult omp(const Eigen::MatrixXd& D, const Eigen::VectorXd& y, int s) {
    const int N = static_cast<int>(D.cols());
    const int m = static_cast<int>(D.rows());
    if (y.size() != m) throw std::invalid_argument("omp: length mismatch");
    if (s < 0 || s > N) throw std::invalid_argument("omp: need 0 <= s <= N");

    OracleResult res;
    res.w = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd r = y;
    std::vector<int> supp;
    std::vector<bool> used(static_cast<std::size_t>(N), false);
    Eigen::VectorXd ws;

    for (int round = 0; round < s; ++round) {
        int pick = -1;
        double best_corr = 0.0;
        for (int i = 0; i < N; ++i) {
            if (used[static_cast<std::size_t>(i)]) continue;
            const double corr = std::abs(D.col(i).dot(r));
            if (corr > best_corr) {  // strict beats: lowest index keeps ties
                best_corr = corr;
                pick = i;
            }
        }
        if (pick < 0 || best_corr == 0.0) break;
        used[static_cast<std::size_t>(pick)] = true;
        supp.push_back(pick);
        std::sort(supp.begin(), supp.end());
        ws = ls_on_support(D, y, supp);
        r = y;
        for (std::size_t a = 0; a < supp.size(); ++a)
            r -= ws[static_cast<Eigen::Index>(a)] * D.col(supp[a]);
    }

    res.support = supp;
    for (std::size_t a = 0; a < supp.size(); ++a)
        res.w[supp[a]] = ws[static_cast<Eigen::Index>(a)];
    res.residual = r.norm() / std::sqrt(static_cast<double>(m));
    return res;
}

namespace {

std::vector<int> top_s_by_magnitude(const Eigen::VectorXd& c, int s) {
    std::vector<int> idx(static_cast<std::size_t>(c.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return std::abs(c[a]) > std::abs(c[b]);  // stable: index order keeps magnitude ties
    });
    idx.resize(static_cast<std::size_t>(std::min<int>(s, static_cast<int>(c.size()))));
    return idx;
}

}  // namespace

double sigma_s_tail_bound(const SyntheticFunction& f, int s) {
    if (s < 0) throw std::invalid_argument("sigma_s_tail_bound: need s >= 0");
    const auto top = top_s_by_magnitude(f.coeffs, s);
    double total = f.coeffs.lpNorm<1>();
    for (int i : top) total -= std::abs(f.coeffs[i]);
    return std::max(total, 0.0);
}

double sigma_s_l2_exact(const Dictionary& dict, const SyntheticFunction& f, int s) {
    if (s < 0) throw std::invalid_argument("sigma_s_l2_exact: need s >= 0");
    if (f.coeffs.size() != dict.N)
        throw std::invalid_argument("sigma_s_l2_exact: coefficient length mismatch");
    const auto top = top_s_by_magnitude(f.coeffs, s);
    double tail2 = f.coeffs.squaredNorm();
    for (int i : top) tail2 -= f.coeffs[i] * f.coeffs[i];
    return std::sqrt(dict.gamma * std::max(tail2, 0.0));
}

double sigma_bound_a1alpha(double alpha, int s, double dist_inf) {
    if (s < 1) throw std::invalid_argument("sigma_bound_a1alpha: need s >= 1");
    if (dist_inf < 0.0) throw std::invalid_argument("sigma_bound_a1alpha: negative distance");
    return std::pow(static_cast<double>(s), -alpha - 0.5) + dist_inf;
}

double estimator_bound_constant(double p, double C1) {
    if (!(p >= 1.0)) throw std::invalid_argument("estimator_bound_constant: need p >= 1");
    if (!(C1 > 0.0) || C1 > 1.0)
        throw std::invalid_argument("estimator_bound_constant: need 0 < C1 <= 1");
    const double tp = std::pow(2.0, 1.0 / p);
    const double inner = 2.0 * std::pow(1.0 + 1.0 / C1, 1.0 / p);
    return tp * (1.0 + inner) + tp * std::pow(C1, -1.0 / p) * (2.0 + inner);
}

}  // namespace sfl
