#pragma once

#include <Eigen/Dense>

#include "sfl/dictionary.hpp"
#include "sfl/sampling.hpp"

namespace sfl {

// Sampled design with its diagonal column normalizer. A = D * diag(L) has
// unit Euclidean columns; mu and C_A are measured on A.
struct DesignMatrix {
    Eigen::MatrixXd D;  // m x N raw sample values u_i(xi_t)
    Eigen::VectorXd L;  // 1/sqrt(column energy), length N
    Eigen::MatrixXd A;  // normalized design D * diag(L)
    double mu = 0.0;    // mutual coherence of A
    double C_A = 0.0;   // max absolute entry of A

    int m() const { return static_cast<int>(D.rows()); }
    int N() const { return static_cast<int>(D.cols()); }
};

// Errors with the offending element index if a column has zero energy.
DesignMatrix build_design_matrix(const Dictionary& dict, const SampleSet& samples);

// Wraps an arbitrary raw matrix as a design (synthetic experiments).
DesignMatrix design_from_matrix(Eigen::MatrixXd D);

// max_{i != j} |a_i . a_j| / (||a_i|| ||a_j||); 0 when N < 2.
double mutual_coherence(const Eigen::MatrixXd& M);

// Admissible sparsity ceiling (1 + 1/mu) / 2; +inf at mu = 0.
double sparsity_ceiling(double mu);

// floor(0.5 * (1 + (1/16) sqrt(3 gamma m / log(2 N^2 / eps)))) capped at
// floor(N/2); can legitimately return 0 near the minimal sample count.
int select_sparsity(double gamma, int m, int N, double eps);

// High-probability coherence level 8 * sqrt(log(2 N^2 / eps) / (3 gamma m)).
double coherence_bound(double gamma, int m, int N, double eps);

struct RipReport {
    double ratio = 0.0;  // ||A x||^2 / ||x||^2
    double lower = 0.0;  // 1 - (s-1) mu
    double upper = 0.0;  // 1 + (s-1) mu
    int s = 0;
    bool pass = false;
};

// Coherence-based restricted isometry sandwich for one s-sparse vector on a
// column-normalized matrix (contract error otherwise). Tolerance 1e-9.
RipReport rip_sandwich_check(const Eigen::MatrixXd& A, const Eigen::VectorXd& x,
                             double tol = 1e-9);

}  // namespace sfl
