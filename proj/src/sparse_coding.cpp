#include "sfl/sparse_coding.hpp"

#include <cmath>
#include <stdexcept>

namespace sfl {

ThresholdSchedule make_schedule(double mu, int s, double B, double delta, double C_A, int J) {
    if (mu < 0.0) throw std::invalid_argument("make_schedule: negative coherence");
    if (s < 1) throw std::invalid_argument("make_schedule: need s >= 1");
    if (B < 0.0 || delta < 0.0 || C_A < 0.0)
        throw std::invalid_argument("make_schedule: B, delta, C_A must be nonnegative");
    if (J < 0) throw std::invalid_argument("make_schedule: need J >= 0");

    ThresholdSchedule sc;
    sc.mu = mu;
    sc.s = s;
    sc.B = B;
    sc.delta = delta;
    sc.C_A = C_A;
    sc.rho = 2.0 * mu * s - mu;
    sc.contractive = sc.rho < 1.0;
    sc.Bk.resize(static_cast<std::size_t>(J) + 1);
    sc.theta.resize(static_cast<std::size_t>(J) + 1);
    const double inject = 2.0 * s * C_A * delta;
    double Bk = s * B;
    for (int k = 0; k <= J; ++k) {
        sc.Bk[static_cast<std::size_t>(k)] = Bk;
        sc.theta[static_cast<std::size_t>(k)] = mu * Bk + C_A * delta;
        Bk = sc.rho * Bk + inject;
    }
    return sc;
}

double encoder_error_bound(double mu, int s, double B, double delta, int J) {
    if (mu < 0.0 || s < 1 || B < 0.0 || delta < 0.0 || J < 0)
        throw std::invalid_argument("encoder_error_bound: invalid arguments");
    const double rho = 2.0 * mu * s - mu;
    double geom = 0.0, p = 1.0, rhoJ = 1.0;
    for (int i = 0; i <= J; ++i) {
        geom += p;
        rhoJ = p;
        p *= rho;
    }
    return s * B * rhoJ + 2.0 * s * delta * geom;
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double alpha) {
    if (alpha < 0.0) throw std::invalid_argument("soft_threshold: negative threshold");
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v[i]) - alpha;
        out[i] = mag > 0.0 ? (v[i] > 0.0 ? mag : -mag) : 0.0;
    }
    return out;
}

namespace {

int count_nonzero(const Eigen::VectorXd& v) {
    int n = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (v[i] != 0.0) ++n;
    return n;
}

}  // namespace

EncodeResult encode_normalized(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                               const ThresholdSchedule& sched, int J,
                               const Eigen::VectorXd* x_ref) {
    if (y.size() != A.rows())
        throw std::invalid_argument("encode_normalized: sample vector length mismatch");
    if (!y.allFinite())
        throw std::invalid_argument("encode_normalized: non-finite sample values");
    if (static_cast<int>(sched.theta.size()) < J + 1)
        throw std::invalid_argument("encode_normalized: schedule shorter than J");

    EncodeResult res;
    res.schedule = sched;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(A.cols());

    // coordinates off the reference support can sit exactly at the threshold
    // (the s = 1 recursion is tight there), so rounding may leave values a few
    // ulp above it; anything under the dust floor is a tie, not an escape
    const double dust = 1e-12 * std::max(1.0, sched.Bk.empty() ? 0.0 : sched.Bk[0]);
    auto record = [&](const Eigen::VectorXd& xk) {
        res.trace.support_size.push_back(count_nonzero(xk));
        if (x_ref) {
            res.trace.l1_error.push_back((xk - *x_ref).lpNorm<1>());
            int off = 0;
            for (Eigen::Index i = 0; i < xk.size(); ++i)
                if (std::abs(xk[i]) > dust && (*x_ref)[i] == 0.0) ++off;
            res.trace.outside_ref.push_back(off);
        }
    };
    record(x);
    for (int k = 0; k < J; ++k) {
        const double th = sched.theta[static_cast<std::size_t>(k)];
        x = soft_threshold(x + A.transpose() * (y - A * x), th);
        res.trace.theta_used.push_back(th);
        record(x);
    }
    res.x = std::move(x);
    return res;
}

EncodeResult encode(const DesignMatrix& design, const Eigen::VectorXd& y, int s, double B,
                    double delta, int J, bool force, const Eigen::VectorXd* x_ref) {
    if (s < 1) throw std::invalid_argument("encode: need s >= 1");
    const double ceiling = sparsity_ceiling(design.mu);
    if (!(s < ceiling))
        throw std::invalid_argument("encode: sparsity exceeds the admissible ceiling");

    const ThresholdSchedule sched = make_schedule(design.mu, s, B, delta, design.C_A, J);
    if (!sched.contractive && !force)
        throw std::invalid_argument(
            "encode: non-contractive schedule (rho >= 1); pass force to run anyway");

    EncodeResult res = encode_normalized(design.A, y, sched, J, x_ref);
    res.code.s = s;
    res.code.w = design.L.asDiagonal() * res.x;
    for (int i = 0; i < res.code.w.size(); ++i)
        if (res.code.w[i] != 0.0) res.code.support.push_back(i);
    return res;
}

double reconstruct_eval(const Dictionary& dict, const SparseCode& code,
                        std::span<const double> x) {
    double v = 0.0;
    for (int i : code.support) v += code.w[i] * dict.eval(i, x);
    return v;
}

double in_span_l2_distance(const Dictionary& dict, const Eigen::VectorXd& c1,
                           const Eigen::VectorXd& c2) {
    if (c1.size() != c2.size() || c1.size() != dict.N)
        throw std::invalid_argument("in_span_l2_distance: coefficient length mismatch");
    return std::sqrt(dict.gamma) * (c1 - c2).norm();
}

}  // namespace sfl
