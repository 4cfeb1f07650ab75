#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sfl/coherence.hpp"
#include "sfl/dictionary.hpp"

namespace sfl {

// Worst-case l1-error recursion and the analytic thresholds it induces:
//   rho = 2*mu*s - mu,  B_0 = s*B,  B_{k+1} = rho*B_k + 2*s*C_A*delta,
//   theta_k = mu*B_k + C_A*delta.
struct ThresholdSchedule {
    double mu = 0.0;
    int s = 0;
    double B = 0.0;      // bound on the l-infinity norm of the target code
    double delta = 0.0;  // bound on the l1 norm of the residual term
    double C_A = 0.0;
    double rho = 0.0;
    bool contractive = false;
    std::vector<double> Bk;     // length J+1
    std::vector<double> theta;  // length J+1; iterations consume theta[0..J-1]
};

ThresholdSchedule make_schedule(double mu, int s, double B, double delta, double C_A, int J);

// s*B*rho^J + 2*s*delta*sum_{i=0..J} rho^i, the certified l1 error after J
// iterations under the schedule's hypotheses.
double encoder_error_bound(double mu, int s, double B, double delta, int J);

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double alpha);

struct SparseCode {
    Eigen::VectorXd w;         // code in original coordinates
    std::vector<int> support;  // sorted indices of nonzero entries
    int s = 0;                 // declared budget
};

struct IterateTrace {
    // entry k describes the state x^(k); l1_error and outside_ref are filled
    // when a reference target is supplied
    std::vector<int> support_size;   // length J+1
    std::vector<double> l1_error;    // length J+1 or empty
    std::vector<int> outside_ref;    // entries off the reference support above
                                     // a 1e-12 * B_0 dust floor (threshold ties
                                     // broken by rounding do not count)
    std::vector<double> theta_used;  // length J
};

struct EncodeResult {
    SparseCode code;
    Eigen::VectorXd x;  // final iterate in normalized coordinates
    ThresholdSchedule schedule;
    IterateTrace trace;
};

// Thresholded gradient iteration x <- T_theta(x + A^T (y - A x)) on a
// column-normalized matrix, x^(0) = 0, run for J steps.
EncodeResult encode_normalized(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                               const ThresholdSchedule& sched, int J,
                               const Eigen::VectorXd* x_ref = nullptr);

// Full encoder on a sampled design: normalizes, iterates, and returns the
// code mapped back through L. Refuses inadmissible sparsity (s >= ceiling)
// and non-contractive schedules unless force is set.
EncodeResult encode(const DesignMatrix& design, const Eigen::VectorXd& y, int s, double B,
                    double delta, int J, bool force = false,
                    const Eigen::VectorXd* x_ref = nullptr);

// Evaluates the decoded function sum_i w_i u_i at a point.
double reconstruct_eval(const Dictionary& dict, const SparseCode& code,
                        std::span<const double> x);

// Exact L2(nu) distance between two in-span coefficient vectors,
// sqrt(gamma) * ||c1 - c2||_2.
double in_span_l2_distance(const Dictionary& dict, const Eigen::VectorXd& c1,
                           const Eigen::VectorXd& c2);

}  // namespace sfl
