#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sfl/dictionary.hpp"

namespace sfl {

struct OracleResult {
    std::vector<int> support;  // sorted
    Eigen::VectorXd w;         // full-length coefficients, zero off support
    double residual = 0.0;     // ((1/m) sum_j r_j^2)^(1/2)
};

// Minimizes ||y - D w||_{2,m} over all supports of size s by enumeration
// (lexicographic order; first minimizer wins ties). Least squares per support
// uses a rank-revealing decomposition, minimum-norm on rank deficiency.
// Errors when C(N, s) exceeds the enumeration cap.
OracleResult best_s_term_exhaustive(const Eigen::MatrixXd& D, const Eigen::VectorXd& y, int s,
                                    long long enumeration_cap = 1000000);

// Orthogonal matching pursuit with full refit per round; correlation ties
// break to the lowest index. Stops early if the residual correlates with
// nothing.
OracleResult omp(const Eigen::MatrixXd& D, const Eigen::VectorXd& y, int s);

// l1 mass of the coefficients outside the top s by magnitude; an upper bound
// for the sup-norm best s-term error of the synthesized function since every
// element has sup-norm <= 1.
double sigma_s_tail_bound(const SyntheticFunction& f, int s);

// Exact L2(nu) best s-term error of an in-span function:
// sqrt(gamma * sum of squared coefficients outside the top s).
double sigma_s_l2_exact(const Dictionary& dict, const SyntheticFunction& f, int s);

// s^(-alpha - 1/2) + dist_inf, the decay certificate for the weighted-l1
// coefficient class.
double sigma_bound_a1alpha(double alpha, int s, double dist_inf = 0.0);

// Constant carrying the one-sided discretization step into a bound on the
// background-measure error of the empirically best s-term approximant:
//   2^(1/p) (1 + 2 (1 + 1/C1)^(1/p)) + 2^(1/p) C1^(-1/p) (2 + 2 (1 + 1/C1)^(1/p)).
double estimator_bound_constant(double p, double C1);

}  // namespace sfl
