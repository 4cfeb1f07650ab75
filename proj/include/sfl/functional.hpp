#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sfl/coherence.hpp"
#include "sfl/dictionary.hpp"
#include "sfl/sampling.hpp"
#include "sfl/sparse_coding.hpp"

namespace sfl {

// Hoelder functional on the function class, evaluated exactly through
// dictionary coefficients. Shipped kinds certify exponent beta and Hoelder
// constant <= 1 by construction.
struct Functional {
    enum class Kind { L2Norm, InnerProduct, ScalarCompose };

    Kind kind = Kind::L2Norm;
    double beta = 1.0;
    Eigen::VectorXd g_coeffs;             // pairing element (empty for L2Norm)
    std::function<double(double)> outer;  // ScalarCompose only
    double value_at_zero = 0.0;           // P(0)

    // P(sum_i w_i u_i) via gamma-orthogonality
    double eval_coeffs(const Dictionary& dict, const Eigen::VectorXd& w) const;
};

// ||f||_{L2(nu)}; beta = 1, constant 1 by the triangle inequality.
Functional make_l2norm();

// f -> <f, g>_{L2(nu)}; g is rescaled to unit L2 norm when larger, keeping
// the Hoelder constant at most 1.
Functional make_inner_product(const Dictionary& dict, Eigen::VectorXd g_coeffs);

// f -> outer(<f, g>) with outer beta-Hoelder of constant <= 1 (caller
// certifies; outer_at_zero = outer(<0,g>) = outer(0)).
Functional make_scalar_compose(const Dictionary& dict, Eigen::VectorXd g_coeffs,
                               std::function<double(double)> outer, double beta);

// Quadrature-route evaluation used by the dual-route consistency check: the
// functional applied to the pointwise-synthesized function on a tensor grid.
double eval_functional_by_quadrature(const Functional& F, const Dictionary& dict,
                                     const Eigen::VectorXd& w, int per_axis_grid);

struct ConsistencyReport {
    double max_gap = 0.0;
    bool pass = false;
};

// Compares coefficient-route and quadrature-route values on random in-span
// functions.
ConsistencyReport functional_consistency_check(const Functional& F, const Dictionary& dict,
                                               int trials, std::uint64_t seed,
                                               double tol = 1e-9);

// Modulus-of-continuity transfer constants between code space and function
// space on a design satisfying the two-sided discretization property:
//   upper: C1^(-1/p) m^(-1/p) ||L^-1||_2 max{1, m^(1/p - 1/2)} sqrt(1 + (2s-1) mu)
//   lower: sqrt(1 - (2s-1) mu) / (m^(1/p) C2^(1/p) ||L||_2 max{1, m^(1/2 - 1/p)})
struct ModulusConstants {
    double upper = 0.0;
    double lower = 0.0;
};

// Throws domain_error when (2s-1) mu >= 1 (lower constant undefined).
ModulusConstants modulus_constants(const DesignMatrix& design, int s, double p, double C1,
                                   double C2);

// Closed-form constants of the recovery guarantee, assembled from measured
// design quantities. Field comments give the formulas; provenance labels mark
// each value as measured or closed-form.
struct TheoreticalConstants {
    double mu = 0.0;
    double c0 = 0.0;            // max_i L_ii
    double rho = 0.0;           // 2 mu s - mu
    double decay_rate = 0.0;    // -ln rho
    double code_l1_gain = 0.0;  // 2 s sum_{i=0..J} rho^i
    double code_sup_scale = 0.0;     // 6 c0 B m s N^(1 - 1/p)
    double code_delta_scale = 0.0;   // c0 * code_l1_gain * 2^(1/p) m N^(1 - 1/p)
    double recon_decay_coeff = 0.0;  // 12 C1^(-1/p) norm_equiv m^(1 - 1/p) B s
    double recon_sigma_coeff = 0.0;  // 2^(1 + 1/p) code_l1_gain C1^(-1/p) norm_equiv m^(1 - 1/p) + estimator_constant
    double estimator_constant = 0.0;  // from estimator_bound_constant(p, C1)
    double norm_equiv = 0.0;          // max{1, m^(1/p - 1/2)}
    double code_box = 0.0;      // code_sup_scale + code_delta_scale * B + 6 B m c0
    double modulus_upper = 0.0;
    double modulus_lower = 0.0;      // NaN when (2s-1) mu >= 1
    double functional_sup = 0.0;     // |P(0)| + (N * code_box)^beta
    double decoder_constant = 0.0;   // (modulus_upper^beta + functional_sup) (1 + 2^beta code_box^beta)
    std::map<std::string, std::string> provenance;
};

TheoreticalConstants theoretical_constants(double p, int m, double B, int s, int N,
                                           const DesignMatrix& design, int J, double C1,
                                           double beta = 1.0, double value_at_zero = 0.0,
                                           double C2 = 2.25);

struct PipelineOptions {
    int s = 1;
    int J = 30;
    // schedule sup bound: class route 6*B*m, or the measured reference code
    enum class BMode { ClassSup, Oracle } b_mode = BMode::ClassSup;
    // residual budget: tail-surrogate route 2^(1/p) m sigma_s, measured
    // reference residual, zero (exactly sparse truths; the hypothesis check
    // accepts residuals at the numerical floor, 1e-10 relative), or a caller
    // value
    enum class DeltaMode { TailSurrogate, Oracle, Zero, Explicit } delta_mode =
        DeltaMode::TailSurrogate;
    double explicit_delta = 0.0;
    int taylor_cells = 0;  // 0 = exact composition decoder; else even cell count
    double p = 2.0;
    double C1 = 0.25, C2 = 2.25;
    long long enumeration_cap = 1000000;
};

struct PipelineReport {
    int m = 0, N = 0, s = 0, J = 0;
    double mu = 0.0, sbar = 0.0, rho = 0.0, C_A = 0.0;
    double B_class = 0.0, B_sched = 0.0, delta_used = 0.0;
    double sigma_l1 = 0.0, sigma_l2 = 0.0;
    bool contractive = false, admissible = false, b_ok = false, delta_ok = false,
         ud_ok = false, valid = false;
    double ud_min_eig = 0.0, ud_max_eig = 0.0;
    std::vector<int> support;
    double measured_l2_error = 0.0;       // ||f - f_s||_{L2(nu)}, exact in-span
    double measured_l1_code_error = 0.0;  // ||x^J - x_ref||_1, normalized coords
    double tracking_bound = 0.0;          // B_J of the schedule
    bool tracking_ok = false;             // every iterate within its B_k
    double oracle_residual_l1 = 0.0;      // ||y - D w_ref||_1
    double P_true = 0.0, P_hat = 0.0;
    double holder_gap = 0.0;   // |P_true - P_hat|
    double holder_rhs = 0.0;   // measured_l2_error^beta
    double certified_bound = 0.0;  // estimator + encoder chain with the run's schedule
    double composite_rhs = 0.0;    // recon_decay_coeff rho^J + recon_sigma_coeff sigma_l1
    double taylor_value = 0.0, taylor_gap = 0.0, taylor_bound = 0.0;  // decoder != exact
    bool code_in_box = true;
    std::vector<double> trace_l1_error;   // iterate distance to the reference, length J+1
    std::vector<int> trace_support_size;  // length J+1
    std::vector<double> trace_theta;      // thresholds consumed, length J
    std::vector<double> schedule_Bk;      // certificate radii, length J+1
    TheoreticalConstants constants;
};

// Sample -> encode -> reconstruct -> evaluate, with every hypothesis of the
// guarantee machine-checked and both measured and certified errors reported.
PipelineReport evaluate_pipeline(const Functional& P, const Dictionary& dict,
                                 const SampleSet& samples, const SyntheticFunction& f,
                                 const PipelineOptions& opt);

struct RatePoint {
    double param = 0.0;
    double mean_value = 0.0;
    double std_value = 0.0;
    double bound = 0.0;
};

struct RateTable {
    std::string axis;  // "s", "J", or "m"
    std::vector<RatePoint> points;
    double slope = 0.0;
    double slope_reference = 0.0;
    int window_lo = 0, window_hi = 0;  // inclusive indices used by the fit
};

// Best 2s-term L2 error of weighted-l1 class draws against s^(-alpha-1/2);
// slope fitted in log-log coordinates.
RateTable rate_sweep_sigma(const Dictionary& dict, double alpha, const std::vector<int>& s_list,
                           int trials, std::uint64_t seed);

// Mean l1 iteration error on exactly sparse noiseless truths versus the
// certified geometric decay; slope fitted in log-linear coordinates over the
// pre-plateau window.
RateTable rate_sweep_iterations(const DesignMatrix& design, int s,
                                const std::vector<int>& J_list, int trials, std::uint64_t seed);

// Mean realized coherence of random sample draws against the closed-form
// high-probability level, per sample count.
RateTable rate_sweep_samples(const Dictionary& dict, double eps, const std::vector<int>& m_list,
                             int trials, std::uint64_t seed, int workers = 1);

}  // namespace sfl
