#include "sfl/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sfl/oracle.hpp"
#include "sfl/rng.hpp"
#include "sfl/taylor.hpp"
#include "sfl/util.hpp"

namespace sfl {

double Functional::eval_coeffs(const Dictionary& dict, const Eigen::VectorXd& w) const {
    if (w.size() != dict.N)
        throw std::invalid_argument("functional: coefficient length does not match the dictionary");
    switch (kind) {
        case Kind::L2Norm:
            return std::sqrt(dict.gamma) * w.norm();
        case Kind::InnerProduct:
            return dict.gamma * g_coeffs.dot(w);
        case Kind::ScalarCompose:
            return outer(dict.gamma * g_coeffs.dot(w));
    }
    throw std::logic_error("functional: unknown kind");
}

Functional make_l2norm() {
    Functional F;
    F.kind = Functional::Kind::L2Norm;
    F.beta = 1.0;
    F.value_at_zero = 0.0;
    return F;
}

namespace {

Eigen::VectorXd unit_ball_projected(const Dictionary& dict, Eigen::VectorXd g) {
    if (g.size() != dict.N)
        throw std::invalid_argument("pairing element length does not match the dictionary");
    const double norm = std::sqrt(dict.gamma) * g.norm();
    if (norm > 1.0) g /= norm;
    return g;
}

// C(n, k) as a double, good enough for comparing against an enumeration cap
double support_count(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

}  // namespace

Functional make_inner_product(const Dictionary& dict, Eigen::VectorXd g_coeffs) {
    Functional F;
    F.kind = Functional::Kind::InnerProduct;
    F.beta = 1.0;
    F.g_coeffs = unit_ball_projected(dict, std::move(g_coeffs));
    F.value_at_zero = 0.0;
    return F;
}

Functional make_scalar_compose(const Dictionary& dict, Eigen::VectorXd g_coeffs,
                               std::function<double(double)> outer, double beta) {
    if (!outer) throw std::invalid_argument("scalar composition needs an outer map");
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("Hoelder exponent must lie in (0, 1]");
    Functional F;
    F.kind = Functional::Kind::ScalarCompose;
    F.beta = beta;
    F.g_coeffs = unit_ball_projected(dict, std::move(g_coeffs));
    F.outer = std::move(outer);
    F.value_at_zero = F.outer(0.0);
    return F;
}

double eval_functional_by_quadrature(const Functional& F, const Dictionary& dict,
                                     const Eigen::VectorXd& w, int per_axis_grid) {
    if (per_axis_grid < 1) throw std::invalid_argument("quadrature grid needs >= 1 point per axis");
    const int d = dict.domain.d;
    const double total = std::pow(static_cast<double>(per_axis_grid), d);
    if (total > 4e6) throw std::invalid_argument("quadrature grid too large");
    const long long npts = static_cast<long long>(std::llround(total));

    std::vector<double> x(d, 0.0);
    std::vector<int> idx(d, 0);
    double acc = 0.0;
    for (long long t = 0; t < npts; ++t) {
        for (int a = 0; a < d; ++a) x[a] = static_cast<double>(idx[a]) / per_axis_grid;
        const double fv = dict.synthesize(w, x);
        if (F.kind == Functional::Kind::L2Norm) {
            acc += fv * fv;
        } else {
            acc += fv * dict.synthesize(F.g_coeffs, x);
        }
        for (int a = d - 1; a >= 0; --a) {
            if (++idx[a] < per_axis_grid) break;
            idx[a] = 0;
        }
    }
    const double mean = acc / static_cast<double>(npts);
    switch (F.kind) {
        case Functional::Kind::L2Norm:
            return std::sqrt(std::max(0.0, mean));
        case Functional::Kind::InnerProduct:
            return mean;
        case Functional::Kind::ScalarCompose:
            return F.outer(mean);
    }
    throw std::logic_error("functional: unknown kind");
}

ConsistencyReport functional_consistency_check(const Functional& F, const Dictionary& dict,
                                               int trials, std::uint64_t seed, double tol) {
    if (trials < 1) throw std::invalid_argument("consistency check needs >= 1 trial");
    // one grid point past the exactness threshold for products of elements
    const int grid = std::max(2 * dict.max_freq + 2, 2);
    ConsistencyReport rep;
    for (int t = 0; t < trials; ++t) {
        rng::Engine eng(rng::derive_seed(seed, static_cast<std::uint64_t>(t)));
        Eigen::VectorXd w(dict.N);
        for (int i = 0; i < dict.N; ++i) w[i] = eng.normal();
        const double a = F.eval_coeffs(dict, w);
        const double b = eval_functional_by_quadrature(F, dict, w, grid);
        rep.max_gap = std::max(rep.max_gap, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
    rep.pass = rep.max_gap <= tol;
    return rep;
}

ModulusConstants modulus_constants(const DesignMatrix& design, int s, double p, double C1,
                                   double C2) {
    if (s < 1) throw std::invalid_argument("modulus transfer needs s >= 1");
    if (!(p >= 1.0)) throw std::invalid_argument("modulus transfer needs p >= 1");
    if (!(C1 > 0.0) || !(C2 > 0.0))
        throw std::invalid_argument("discretization constants must be positive");
    const double m = design.m();
    const double mu = design.mu;
    const double t = (2.0 * s - 1.0) * mu;
    const double ip = 1.0 / p;
    ModulusConstants mc;
    mc.upper = std::pow(C1, -ip) * std::pow(m, -ip) * (1.0 / design.L.minCoeff()) *
               std::max(1.0, std::pow(m, ip - 0.5)) * std::sqrt(1.0 + t);
    if (t >= 1.0)
        throw std::domain_error("modulus lower constant undefined: (2s-1) * coherence >= 1");
    mc.lower = std::sqrt(1.0 - t) / (std::pow(m, ip) * std::pow(C2, ip) * design.L.maxCoeff() *
                                     std::max(1.0, std::pow(m, 0.5 - ip)));
    return mc;
}

TheoreticalConstants theoretical_constants(double p, int m, double B, int s, int N,
                                           const DesignMatrix& design, int J, double C1,
                                           double beta, double value_at_zero, double C2) {
    if (!(p >= 1.0)) throw std::invalid_argument("constants need p >= 1");
    if (m < 1 || s < 1 || N < 1 || J < 0) throw std::invalid_argument("constants need m, s, N >= 1 and J >= 0");
    if (!(C1 > 0.0) || !(C2 > 0.0))
        throw std::invalid_argument("discretization constants must be positive");
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("Hoelder exponent must lie in (0, 1]");
    if (!(B >= 0.0)) throw std::invalid_argument("class bound must be nonnegative");

    TheoreticalConstants tc;
    tc.mu = design.mu;
    tc.c0 = design.L.maxCoeff();
    tc.rho = 2.0 * tc.mu * s - tc.mu;
    tc.decay_rate =
        tc.rho > 0.0 ? -std::log(tc.rho) : std::numeric_limits<double>::infinity();

    double geom = 0.0, pw = 1.0;
    for (int i = 0; i <= J; ++i) {
        geom += pw;
        pw *= tc.rho;
    }
    tc.code_l1_gain = 2.0 * s * geom;

    const double ip = 1.0 / p;
    const double md = static_cast<double>(m);
    const double Nd = static_cast<double>(N);
    tc.norm_equiv = std::max(1.0, std::pow(md, ip - 0.5));
    tc.estimator_constant = estimator_bound_constant(p, C1);

    const double Npow = std::pow(Nd, 1.0 - ip);
    const double mpow = std::pow(md, 1.0 - ip);
    const double c1pow = std::pow(C1, -ip);
    tc.code_sup_scale = 6.0 * tc.c0 * B * md * s * Npow;
    tc.code_delta_scale = tc.c0 * tc.code_l1_gain * std::pow(2.0, ip) * md * Npow;
    tc.recon_decay_coeff = 12.0 * c1pow * tc.norm_equiv * mpow * B * s;
    tc.recon_sigma_coeff =
        std::pow(2.0, 1.0 + ip) * tc.code_l1_gain * c1pow * tc.norm_equiv * mpow +
        tc.estimator_constant;
    tc.code_box = tc.code_sup_scale + tc.code_delta_scale * B + 6.0 * B * md * tc.c0;

    const double t = (2.0 * s - 1.0) * tc.mu;
    tc.modulus_upper = c1pow * std::pow(md, -ip) * (1.0 / design.L.minCoeff()) * tc.norm_equiv *
                       std::sqrt(1.0 + t);
    if (t < 1.0) {
        tc.modulus_lower = std::sqrt(1.0 - t) / (std::pow(md, ip) * std::pow(C2, ip) * tc.c0 *
                                                 std::max(1.0, std::pow(md, 0.5 - ip)));
    } else {
        tc.modulus_lower = std::numeric_limits<double>::quiet_NaN();
    }

    tc.functional_sup = std::abs(value_at_zero) + std::pow(Nd * tc.code_box, beta);
    tc.decoder_constant = (std::pow(tc.modulus_upper, beta) + tc.functional_sup) *
                          (1.0 + std::pow(2.0, beta) * std::pow(tc.code_box, beta));

    tc.provenance["mu"] = "measured: mutual coherence of the normalized design";
    tc.provenance["c0"] = "measured: largest column normalizer";
    tc.provenance["modulus_lower"] =
        t < 1.0 ? "closed form" : "undefined on this design: (2s-1) * coherence >= 1";
    tc.provenance["default"] =
        "closed form from p, m, B, s, N, J, C1, C2, beta and the measured pair";
    return tc;
}

PipelineReport evaluate_pipeline(const Functional& P, const Dictionary& dict,
                                 const SampleSet& samples, const SyntheticFunction& f,
                                 const PipelineOptions& opt) {
    if (opt.s < 1) throw std::invalid_argument("pipeline: sparsity budget must be >= 1");
    if (opt.J < 0) throw std::invalid_argument("pipeline: iteration count must be >= 0");
    if (f.coeffs.size() != dict.N)
        throw std::invalid_argument("pipeline: function does not live on this dictionary");

    PipelineReport rep;
    const DesignMatrix design = build_design_matrix(dict, samples);
    const int m = design.m(), N = design.N();
    rep.m = m;
    rep.N = N;
    rep.s = opt.s;
    rep.J = opt.J;
    rep.mu = design.mu;
    rep.C_A = design.C_A;
    rep.sbar = sparsity_ceiling(rep.mu);
    rep.admissible = static_cast<double>(opt.s) < rep.sbar;

    const Eigen::VectorXd ytilde = design.D * f.coeffs;
    rep.sigma_l1 = sigma_s_tail_bound(f, opt.s);
    rep.sigma_l2 = sigma_s_l2_exact(dict, f, opt.s);

    const OracleResult ref = best_s_term_exhaustive(design.D, ytilde, opt.s, opt.enumeration_cap);
    const Eigen::VectorXd x_ref = ref.w.cwiseQuotient(design.L);
    const Eigen::VectorXd r_ref = ytilde - design.D * ref.w;
    rep.oracle_residual_l1 = r_ref.lpNorm<1>();

    rep.B_class = 6.0 * f.B * m;
    double B_sched = rep.B_class;
    if (opt.b_mode == PipelineOptions::BMode::Oracle)
        B_sched = x_ref.lpNorm<Eigen::Infinity>();
    rep.B_sched = B_sched;

    double delta = 0.0;
    switch (opt.delta_mode) {
        case PipelineOptions::DeltaMode::TailSurrogate:
            delta = std::pow(2.0, 1.0 / opt.p) * m * rep.sigma_l1;
            break;
        case PipelineOptions::DeltaMode::Oracle:
            delta = rep.oracle_residual_l1;
            break;
        case PipelineOptions::DeltaMode::Zero:
            delta = 0.0;
            break;
        case PipelineOptions::DeltaMode::Explicit:
            delta = opt.explicit_delta;
            break;
    }
    rep.delta_used = delta;
    rep.b_ok = x_ref.lpNorm<Eigen::Infinity>() <= B_sched;
    if (opt.delta_mode == PipelineOptions::DeltaMode::Zero) {
        // the caller asserts an exactly sparse truth; the least-squares
        // residual then sits at the numerical floor, not at literal zero
        rep.delta_ok =
            rep.oracle_residual_l1 <= 1e-10 * std::max(1.0, ytilde.lpNorm<1>());
    } else {
        rep.delta_ok = rep.oracle_residual_l1 <= delta;
    }

    // discretization certificate on 2s-sparse span elements: exhaustive
    // eigenvalue route when the support count is enumerable at p = 2, random
    // probes otherwise
    const int twos = std::min(2 * opt.s, N);
    if (opt.p == 2.0 &&
        support_count(N, twos) <= static_cast<double>(opt.enumeration_cap) * 1.0000001) {
        const EigenCheckReport er =
            discretization_eigen_check(dict, samples, opt.s, opt.C1, opt.C2, opt.enumeration_cap);
        rep.ud_min_eig = er.min_eig;
        rep.ud_max_eig = er.max_eig;
        rep.ud_ok = er.pass;
    } else {
        const DiscretizationReport dr =
            check_universal_discretization(dict, samples, opt.s, opt.p, 200,
                                           rng::derive_seed(samples.seed, 0x75d1u), opt.C1, opt.C2);
        rep.ud_min_eig = dr.worst_lower;
        rep.ud_max_eig = dr.worst_upper;
        rep.ud_ok = dr.pass;
    }

    const ThresholdSchedule sched =
        make_schedule(rep.mu, opt.s, B_sched, delta, design.C_A, opt.J);
    rep.rho = sched.rho;
    rep.contractive = sched.contractive;
    const EncodeResult enc = encode_normalized(design.A, ytilde, sched, opt.J, &x_ref);
    const Eigen::VectorXd w_code = design.L.cwiseProduct(enc.x);

    // same dust floor as IterateTrace::outside_ref: threshold ties broken by
    // rounding leave ~ulp-size entries that are not support in any real sense
    const double support_dust = 1e-12 * std::max(1.0, sched.Bk.empty() ? 0.0 : sched.Bk[0]);
    for (int i = 0; i < N; ++i)
        if (std::abs(enc.x[i]) > support_dust) rep.support.push_back(i);
    rep.measured_l2_error = in_span_l2_distance(dict, f.coeffs, w_code);
    rep.measured_l1_code_error = (enc.x - x_ref).lpNorm<1>();
    rep.tracking_bound = sched.Bk[opt.J];
    rep.tracking_ok = true;
    for (int k = 0; k <= opt.J; ++k)
        if (enc.trace.l1_error[k] > sched.Bk[k]) rep.tracking_ok = false;
    rep.trace_l1_error = enc.trace.l1_error;
    rep.trace_support_size = enc.trace.support_size;
    rep.trace_theta = enc.trace.theta_used;
    rep.schedule_Bk = sched.Bk;
    rep.valid = rep.admissible && rep.contractive && rep.b_ok && rep.delta_ok && rep.ud_ok;

    rep.constants = theoretical_constants(opt.p, m, f.B, opt.s, N, design, opt.J, opt.C1, P.beta,
                                          P.value_at_zero, opt.C2);
    rep.certified_bound =
        rep.constants.estimator_constant * rep.sigma_l1 +
        2.0 * std::pow(opt.C1, -1.0 / opt.p) * std::pow(static_cast<double>(m), -1.0 / opt.p) *
            rep.constants.norm_equiv * encoder_error_bound(rep.mu, opt.s, B_sched, delta, opt.J);
    rep.composite_rhs = rep.constants.recon_decay_coeff * std::pow(rep.rho, opt.J) +
                        rep.constants.recon_sigma_coeff * rep.sigma_l1;

    rep.P_true = P.eval_coeffs(dict, f.coeffs);
    rep.P_hat = P.eval_coeffs(dict, w_code);
    rep.holder_gap = std::abs(rep.P_true - rep.P_hat);
    rep.holder_rhs = std::pow(rep.measured_l2_error, P.beta);

    if (opt.taylor_cells > 0) {
        if (opt.taylor_cells % 2 != 0)
            throw std::invalid_argument("pipeline: decoder cell count must be even");
        const double Bbar = rep.constants.code_box;
        rep.code_in_box = w_code.lpNorm<Eigen::Infinity>() <= Bbar;
        std::vector<double> zstar(N);
        for (int i = 0; i < N; ++i) zstar[i] = w_code[i] / (2.0 * Bbar);
        const auto ghat = [&](std::span<const double> z) {
            Eigen::VectorXd wz(N);
            for (int i = 0; i < N; ++i) wz[i] = 2.0 * Bbar * z[i];
            return P.eval_coeffs(dict, wz);
        };
        rep.taylor_value = localized_value_r0(ghat, opt.taylor_cells, zstar);
        rep.taylor_gap = std::abs(rep.taylor_value - rep.P_hat);
        rep.taylor_bound =
            rep.constants.decoder_constant * taylor_error_bound(N, 0, P.beta, opt.taylor_cells);
    }
    return rep;
}

namespace {

void finish_points(RateTable& rt, const std::vector<double>& params,
                   const std::vector<double>& acc, const std::vector<double>& acc2,
                   const std::vector<double>& bounds, int trials) {
    const int n = static_cast<int>(params.size());
    rt.points.resize(n);
    for (int i = 0; i < n; ++i) {
        const double mean = acc[i] / trials;
        const double var = std::max(0.0, acc2[i] / trials - mean * mean);
        rt.points[i] = {params[i], mean, std::sqrt(var), bounds[i]};
    }
}

// fits log(mean) against xs over the indices whose mean sits above the float
// noise floor relative to the largest mean
void fit_log_window(RateTable& rt, const std::vector<double>& xs) {
    double top = 0.0;
    for (const auto& pt : rt.points) top = std::max(top, pt.mean_value);
    const double floor_level = top * 1e-13;
    std::vector<double> fx, fy;
    rt.window_lo = -1;
    rt.window_hi = -1;
    for (int i = 0; i < static_cast<int>(rt.points.size()); ++i) {
        const double v = rt.points[i].mean_value;
        if (v > floor_level && v > 0.0) {
            fx.push_back(xs[i]);
            fy.push_back(std::log(v));
            if (rt.window_lo < 0) rt.window_lo = i;
            rt.window_hi = i;
        }
    }
    if (fx.size() >= 2) {
        rt.slope = fit_line(fx, fy).first;
    } else {
        rt.slope = std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace

RateTable rate_sweep_sigma(const Dictionary& dict, double alpha, const std::vector<int>& s_list,
                           int trials, std::uint64_t seed) {
    if (s_list.empty()) throw std::invalid_argument("sigma sweep needs a nonempty s list");
    for (int s : s_list)
        if (s < 1) throw std::invalid_argument("sigma sweep needs s >= 1");
    if (trials < 1) throw std::invalid_argument("sigma sweep needs >= 1 trial");

    const int n = static_cast<int>(s_list.size());
    std::vector<double> acc(n, 0.0), acc2(n, 0.0), params(n), bounds(n);
    for (int t = 0; t < trials; ++t) {
        const SyntheticFunction f =
            sample_a1_alpha(dict, alpha, rng::derive_seed(seed, static_cast<std::uint64_t>(t)));
        for (int i = 0; i < n; ++i) {
            const double v = sigma_s_l2_exact(dict, f, 2 * s_list[i]);
            acc[i] += v;
            acc2[i] += v * v;
        }
    }
    RateTable rt;
    rt.axis = "s";
    for (int i = 0; i < n; ++i) {
        params[i] = s_list[i];
        bounds[i] = sigma_bound_a1alpha(alpha, s_list[i]);
    }
    finish_points(rt, params, acc, acc2, bounds, trials);
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = std::log(params[i]);
    fit_log_window(rt, xs);
    rt.slope_reference = -(alpha + 0.5);
    return rt;
}

RateTable rate_sweep_iterations(const DesignMatrix& design, int s,
                                const std::vector<int>& J_list, int trials, std::uint64_t seed) {
    if (J_list.empty()) throw std::invalid_argument("iteration sweep needs a nonempty J list");
    for (int J : J_list)
        if (J < 0) throw std::invalid_argument("iteration sweep needs J >= 0");
    if (s < 1) throw std::invalid_argument("iteration sweep needs s >= 1");
    if (trials < 1) throw std::invalid_argument("iteration sweep needs >= 1 trial");
    if (!(static_cast<double>(s) < sparsity_ceiling(design.mu)))
        throw std::invalid_argument(
            "iteration sweep needs an admissible sparsity for the measured coherence");

    const int N = design.N();
    const int Jmax = *std::max_element(J_list.begin(), J_list.end());
    const ThresholdSchedule sched = make_schedule(design.mu, s, 1.0, 0.0, design.C_A, Jmax);

    const int n = static_cast<int>(J_list.size());
    std::vector<double> acc(n, 0.0), acc2(n, 0.0), params(n), bounds(n);
    for (int t = 0; t < trials; ++t) {
        rng::Engine eng(rng::derive_seed(seed, static_cast<std::uint64_t>(t)));
        const std::vector<int> supp = eng.subset(N, s);
        Eigen::VectorXd xstar = Eigen::VectorXd::Zero(N);
        for (int i : supp) xstar[i] = eng.sign() * eng.uniform(0.5, 1.0);
        const Eigen::VectorXd y = design.A * xstar;
        const EncodeResult enc = encode_normalized(design.A, y, sched, Jmax, &xstar);
        for (int i = 0; i < n; ++i) {
            const double v = enc.trace.l1_error[J_list[i]];
            acc[i] += v;
            acc2[i] += v * v;
        }
    }
    RateTable rt;
    rt.axis = "J";
    for (int i = 0; i < n; ++i) {
        params[i] = J_list[i];
        bounds[i] = sched.Bk[J_list[i]];
    }
    finish_points(rt, params, acc, acc2, bounds, trials);
    fit_log_window(rt, params);
    rt.slope_reference =
        sched.rho > 0.0 ? std::log(sched.rho) : -std::numeric_limits<double>::infinity();
    return rt;
}

RateTable rate_sweep_samples(const Dictionary& dict, double eps, const std::vector<int>& m_list,
                             int trials, std::uint64_t seed, int workers) {
    if (m_list.empty()) throw std::invalid_argument("sample sweep needs a nonempty m list");
    for (int m : m_list)
        if (m < 2) throw std::invalid_argument("sample sweep needs m >= 2");
    if (trials < 1) throw std::invalid_argument("sample sweep needs >= 1 trial");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("sample sweep needs eps in (0, 1)");

    const int n = static_cast<int>(m_list.size());
    std::vector<double> acc(n, 0.0), acc2(n, 0.0), params(n), bounds(n);
    for (int i = 0; i < n; ++i) {
        const int m = m_list[i];
        std::vector<double> mus(trials, 0.0);
        parallel_trials(trials, workers, [&](int t) {
            const std::uint64_t stream =
                (static_cast<std::uint64_t>(i) << 32) ^ static_cast<std::uint64_t>(t);
            const SampleSet ss = draw_samples(dict.domain, m, rng::derive_seed(seed, stream));
            mus[t] = build_design_matrix(dict, ss).mu;
        });
        for (double v : mus) {
            acc[i] += v;
            acc2[i] += v * v;
        }
        params[i] = m;
        bounds[i] = coherence_bound(dict.gamma, m, dict.N, eps);
    }
    RateTable rt;
    rt.axis = "m";
    finish_points(rt, params, acc, acc2, bounds, trials);
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = std::log(params[i]);
    fit_log_window(rt, xs);
    rt.slope_reference = -0.5;
    return rt;
}

}  // namespace sfl
