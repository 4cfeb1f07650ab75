#include "sfl/runner.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <stdexcept>

#include "sfl/coherence.hpp"
#include "sfl/dictionary.hpp"
#include "sfl/functional.hpp"
#include "sfl/oracle.hpp"
#include "sfl/rng.hpp"
#include "sfl/sampling.hpp"
#include "sfl/sparse_coding.hpp"
#include "sfl/taylor.hpp"
#include "sfl/util.hpp"
#include "sfl/version.hpp"

namespace sfl::runner {
namespace {

using io::Csv;
using io::json;

// Typed, schema-checked access to a JSON config object. Every key must be
// read (or allowed) before finish(); leftovers raise a naming error.
class ConfigView {
  public:
    ConfigView(const json& j, std::string ctx, bool top_level = false)
        : j_(j), ctx_(std::move(ctx)) {
        if (!j_.is_object()) throw std::runtime_error(ctx_ + ": expected a JSON object");
        if (top_level) {
            seen_.insert("schema_version");
            seen_.insert("subcommand");
        }
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    int geti(const std::string& key, int def) {
        const json* p = find(key);
        if (!p) return def;
        if (!p->is_number_integer()) fail(key, "an integer");
        return p->get<int>();
    }

    double getd(const std::string& key, double def) {
        const json* p = find(key);
        if (!p) return def;
        if (!p->is_number()) fail(key, "a number");
        return p->get<double>();
    }

    bool getb(const std::string& key, bool def) {
        const json* p = find(key);
        if (!p) return def;
        if (!p->is_boolean()) fail(key, "a boolean");
        return p->get<bool>();
    }

    std::string gets(const std::string& key, const std::string& def) {
        const json* p = find(key);
        if (!p) return def;
        if (!p->is_string()) fail(key, "a string");
        return p->get<std::string>();
    }

    std::uint64_t get_seed(std::uint64_t def) {
        const json* p = find("seed");
        if (!p) return def;
        return seed_value(p);
    }

    std::uint64_t require_seed() {
        const json* p = find("seed");
        if (!p)
            throw std::runtime_error(ctx_ +
                                     ": field 'seed' is required for study subcommands "
                                     "(set it in the config or pass --seed)");
        return seed_value(p);
    }

    std::vector<int> get_int_list(const std::string& key, std::vector<int> def) {
        const json* p = find(key);
        if (!p) return def;
        if (!p->is_array()) fail(key, "an array of integers");
        std::vector<int> out;
        for (const auto& e : *p) {
            if (!e.is_number_integer()) fail(key, "an array of integers");
            out.push_back(e.get<int>());
        }
        return out;
    }

    json get_obj(const std::string& key) {
        const json* p = find(key);
        if (!p) return json::object();
        if (!p->is_object()) fail(key, "an object");
        return *p;
    }

    // raw value for keys whose type the caller validates itself
    json get_any(const std::string& key, json def) {
        const json* p = find(key);
        return p ? *p : def;
    }

    void finish() const {
        for (const auto& item : j_.items())
            if (!seen_.count(item.key()))
                throw std::runtime_error(ctx_ + ": unknown config field '" + item.key() + "'");
    }

  private:
    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& want) const {
        throw std::runtime_error(ctx_ + ": field '" + key + "' must be " + want);
    }

    std::uint64_t seed_value(const json* p) const {
        if (p->is_number_unsigned()) return p->get<std::uint64_t>();
        if (p->is_number_integer() && p->get<std::int64_t>() >= 0)
            return static_cast<std::uint64_t>(p->get<std::int64_t>());
        throw std::runtime_error(ctx_ + ": field 'seed' must be a nonnegative integer");
    }

    const json& j_;
    std::string ctx_;
    std::set<std::string> seen_;
};

Dictionary dict_from(ConfigView& cv, int def_d, int def_max_freq) {
    const int d = cv.geti("d", def_d);
    const int max_freq = cv.geti("max_freq", def_max_freq);
    const std::string kind = cv.gets("domain", "cube");
    if (d < 1) throw std::runtime_error("field 'd' must be >= 1");
    if (max_freq < 1) throw std::runtime_error("field 'max_freq' must be >= 1");
    DomainKind dk = DomainKind::Cube;
    if (kind == "torus")
        dk = DomainKind::Torus;
    else if (kind != "cube")
        throw std::runtime_error("field 'domain' must be 'cube' or 'torus'");
    return make_trig_dictionary(dk, d, max_freq);
}

int positive(ConfigView& cv, const std::string& key, int def) {
    const int v = cv.geti(key, def);
    if (v < 1) throw std::runtime_error("field '" + key + "' must be >= 1");
    return v;
}

int resolve_workers(ConfigView& cv) {
    const int w = cv.geti("workers", 0);
    return w > 0 ? w : default_workers();
}

double resolve_eps(ConfigView& cv) {
    const double eps = cv.getd("eps", 0.1);
    if (!(eps > 0.0 && eps < 1.0)) throw std::runtime_error("field 'eps' must lie in (0, 1)");
    return eps;
}

int auto_m(const Dictionary& dict, int m_cfg, double eps, int oversample) {
    if (m_cfg > 0) return m_cfg;
    return oversample * min_samples_for_coherence(dict.gamma, dict.N, eps);
}

SyntheticFunction class_function(const Dictionary& dict, const json& spec, std::uint64_t seed,
                                 const std::string& ctx) {
    ConfigView cv(spec, ctx);
    const std::string type = cv.gets("type", "a1alpha");
    if (type == "a1alpha") {
        const double alpha = cv.getd("alpha", 2.0);
        if (!(alpha > 0.0)) throw std::runtime_error(ctx + ": field 'alpha' must be > 0");
        cv.finish();
        return sample_a1_alpha(dict, alpha, seed);
    }
    if (type == "mixed") {
        const double a = cv.getd("a", 2.0);
        const double b = cv.getd("b", 0.0);
        int max_level = cv.geti("max_level", 0);
        if (max_level <= 0) {
            max_level = 0;
            while ((1 << (max_level + 1)) - 1 <= dict.max_freq) ++max_level;
            if (max_level == 0)
                throw std::runtime_error(ctx + ": dictionary too small for a mixed class");
        }
        cv.finish();
        return sample_mixed_smoothness(dict, a, b, max_level, seed);
    }
    throw std::runtime_error(ctx + ": unknown class type '" + type + "' (a1alpha | mixed)");
}

Eigen::VectorXd pairing_vector(const Dictionary& dict, const json& g, const std::string& ctx) {
    if (g.is_string()) {
        if (g.get<std::string>() == "uniform") return Eigen::VectorXd::Ones(dict.N);
        throw std::runtime_error(ctx + ": field 'g' must be 'uniform' or an array of numbers");
    }
    if (!g.is_array())
        throw std::runtime_error(ctx + ": field 'g' must be 'uniform' or an array of numbers");
    if (static_cast<int>(g.size()) != dict.N)
        throw std::runtime_error(ctx + ": field 'g' must have one entry per dictionary element (" +
                                 std::to_string(dict.N) + ")");
    Eigen::VectorXd v(dict.N);
    for (int i = 0; i < dict.N; ++i) {
        if (!g[i].is_number())
            throw std::runtime_error(ctx + ": field 'g' must contain numbers only");
        v[i] = g[i].get<double>();
    }
    return v;
}

Functional functional_from(const Dictionary& dict, const json& spec, const std::string& ctx) {
    ConfigView cv(spec, ctx);
    const std::string type = cv.gets("type", "l2norm");
    if (type == "l2norm") {
        cv.finish();
        return make_l2norm();
    }
    if (type == "inner_product") {
        const json garr = cv.get_any("g", json("uniform"));
        cv.finish();
        return make_inner_product(dict, pairing_vector(dict, garr, ctx));
    }
    if (type == "scalar_compose") {
        const json garr = cv.get_any("g", json("uniform"));
        const std::string outer = cv.gets("outer", "abs_pow");
        const double beta = cv.getd("beta", 0.5);
        cv.finish();
        if (outer == "abs_pow") {
            return make_scalar_compose(
                dict, pairing_vector(dict, garr, ctx),
                [beta](double t) { return std::pow(std::abs(t), beta); }, beta);
        }
        if (outer == "cos") {
            if (beta != 1.0)
                throw std::runtime_error(ctx + ": outer 'cos' requires beta = 1");
            return make_scalar_compose(dict, pairing_vector(dict, garr, ctx),
                                       [](double t) { return std::cos(t); }, 1.0);
        }
        throw std::runtime_error(ctx + ": unknown outer '" + outer + "' (abs_pow | cos)");
    }
    throw std::runtime_error(ctx + ": unknown functional type '" + type +
                             "' (l2norm | inner_product | scalar_compose)");
}

json meta_base(const std::string& sub, const json& resolved_config) {
    json meta;
    meta["library_version"] = kVersion;
    meta["subcommand"] = sub;
    meta["config"] = resolved_config;
    return meta;
}

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(v[i]);
    }
    return out;
}

std::string out_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

json constants_to_json(const TheoreticalConstants& tc) {
    json j;
    j["mu"] = tc.mu;
    j["c0"] = tc.c0;
    j["rho"] = tc.rho;
    j["decay_rate"] = tc.decay_rate;
    j["code_l1_gain"] = tc.code_l1_gain;
    j["code_sup_scale"] = tc.code_sup_scale;
    j["code_delta_scale"] = tc.code_delta_scale;
    j["recon_decay_coeff"] = tc.recon_decay_coeff;
    j["recon_sigma_coeff"] = tc.recon_sigma_coeff;
    j["estimator_constant"] = tc.estimator_constant;
    j["norm_equiv"] = tc.norm_equiv;
    j["code_box"] = tc.code_box;
    j["modulus_upper"] = tc.modulus_upper;
    j["modulus_lower"] = tc.modulus_lower;
    j["functional_sup"] = tc.functional_sup;
    j["decoder_constant"] = tc.decoder_constant;
    j["provenance"] = tc.provenance;
    return j;
}

json report_to_json(const PipelineReport& r) {
    json j;
    j["m"] = r.m;
    j["N"] = r.N;
    j["s"] = r.s;
    j["J"] = r.J;
    j["mu"] = r.mu;
    j["sbar"] = r.sbar;
    j["rho"] = r.rho;
    j["C_A"] = r.C_A;
    j["B_class"] = r.B_class;
    j["B_sched"] = r.B_sched;
    j["delta_used"] = r.delta_used;
    j["sigma_l1"] = r.sigma_l1;
    j["sigma_l2"] = r.sigma_l2;
    j["contractive"] = r.contractive;
    j["admissible"] = r.admissible;
    j["b_ok"] = r.b_ok;
    j["delta_ok"] = r.delta_ok;
    j["ud_ok"] = r.ud_ok;
    j["valid"] = r.valid;
    j["ud_min_eig"] = r.ud_min_eig;
    j["ud_max_eig"] = r.ud_max_eig;
    j["support"] = r.support;
    j["measured_l2_error"] = r.measured_l2_error;
    j["measured_l1_code_error"] = r.measured_l1_code_error;
    j["tracking_bound"] = r.tracking_bound;
    j["tracking_ok"] = r.tracking_ok;
    j["oracle_residual_l1"] = r.oracle_residual_l1;
    j["P_true"] = r.P_true;
    j["P_hat"] = r.P_hat;
    j["holder_gap"] = r.holder_gap;
    j["holder_rhs"] = r.holder_rhs;
    j["certified_bound"] = r.certified_bound;
    j["composite_rhs"] = r.composite_rhs;
    j["taylor_value"] = r.taylor_value;
    j["taylor_gap"] = r.taylor_gap;
    j["taylor_bound"] = r.taylor_bound;
    j["code_in_box"] = r.code_in_box;
    j["trace"] = {{"l1_error", r.trace_l1_error},
                  {"support_size", r.trace_support_size},
                  {"theta", r.trace_theta},
                  {"schedule_Bk", r.schedule_Bk}};
    j["constants"] = constants_to_json(r.constants);
    return j;
}

// ---------------------------------------------------------------- subcommands

void sub_coherence_study(const json& cfg, const std::string& out) {
    ConfigView cv(cfg, "coherence-study", true);
    const Dictionary dict = dict_from(cv, 1, 16);
    const double eps = resolve_eps(cv);
    const int m = auto_m(dict, cv.geti("m", 0), eps, 1);
    const int trials = positive(cv, "trials", 100);
    const int workers = resolve_workers(cv);
    const std::uint64_t seed = cv.require_seed();
    cv.finish();

    const double mu_bound = coherence_bound(dict.gamma, m, dict.N, eps);
    const int s_selected = select_sparsity(dict.gamma, m, dict.N, eps);

    struct Row {
        std::uint64_t seed = 0;
        double mu = 0, emin = 0, emax = 0, sbar = 0;
        bool mu_ok = false, e_ok = false;
    };
    std::vector<Row> rows(trials);
    parallel_trials(trials, workers, [&](int t) {
        const std::uint64_t ts = rng::derive_seed(seed, static_cast<std::uint64_t>(t));
        const SampleSet ss = draw_samples(dict.domain, m, ts);
        const DesignMatrix dm = build_design_matrix(dict, ss);
        const ColumnEnergyReport er = column_energy_check(dict, ss);
        rows[t] = {ts,         dm.mu, er.energies.minCoeff(), er.energies.maxCoeff(),
                   sparsity_ceiling(dm.mu), dm.mu <= mu_bound, er.pass};
    });

    Csv csv({"trial", "seed", "m", "N", "mu", "mu_bound", "mu_ok", "energy_min", "energy_max",
             "energy_ok", "s_selected", "sbar"});
    int mu_pass = 0, e_pass = 0, joint = 0;
    for (int t = 0; t < trials; ++t) {
        const Row& r = rows[t];
        mu_pass += r.mu_ok;
        e_pass += r.e_ok;
        joint += r.mu_ok && r.e_ok;
        csv.cell(t).cell(r.seed).cell(m).cell(dict.N).cell(r.mu).cell(mu_bound).cell(r.mu_ok)
            .cell(r.emin).cell(r.emax).cell(r.e_ok).cell(s_selected).cell(r.sbar);
        csv.end_row();
    }
    csv.write(out_path(out, "coherence-study.csv"));

    json meta = meta_base("coherence-study", cfg);
    meta["resolved"] = {{"m", m},
                        {"N", dict.N},
                        {"gamma", dict.gamma},
                        {"mu_bound", mu_bound},
                        {"s_selected", s_selected},
                        {"workers", workers}};
    meta["summary"] = {{"trials", trials},
                       {"mu_pass_fraction", double(mu_pass) / trials},
                       {"energy_pass_fraction", double(e_pass) / trials},
                       {"joint_pass_fraction", double(joint) / trials}};
    io::write_json_file(out_path(out, "coherence-study_meta.json"), meta);
}

void sub_discretize_study(const json& cfg, const std::string& out) {
    ConfigView cv(cfg, "discretize-study", true);
    const Dictionary dict = dict_from(cv, 1, 16);
    const double eps = resolve_eps(cv);
    const int m = auto_m(dict, cv.geti("m", 0), eps, 1);
    int s = cv.geti("s", 0);
    if (s <= 0) s = std::max(1, select_sparsity(dict.gamma, m, dict.N, eps));
    const double p = cv.getd("p", 2.0);
    if (!(p >= 1.0)) throw std::runtime_error("field 'p' must be >= 1");
    const int probes = positive(cv, "probes", 100);
    const int trials = positive(cv, "trials", 50);
    const bool eigen = cv.getb("eigen", false);
    const double C1 = cv.getd("C1", 0.25);
    const double C2 = cv.getd("C2", 2.25);
    const int workers = resolve_workers(cv);
    const std::uint64_t seed = cv.require_seed();
    cv.finish();

    struct Row {
        std::uint64_t seed = 0;
        DiscretizationReport dr;
        EigenCheckReport er;
    };
    std::vector<Row> rows(trials);
    parallel_trials(trials, workers, [&](int t) {
        const std::uint64_t ts = rng::derive_seed(seed, static_cast<std::uint64_t>(t));
        const SampleSet ss = draw_samples(dict.domain, m, ts);
        rows[t].seed = ts;
        rows[t].dr = check_universal_discretization(dict, ss, s, p, probes,
                                                    rng::derive_seed(ts, 0x9e37u), C1, C2);
        if (eigen) rows[t].er = discretization_eigen_check(dict, ss, s, C1, C2);
    });

    std::vector<std::string> header = {"trial", "seed",        "m",           "N",
                                       "s",     "worst_lower", "worst_upper", "pass"};
    if (eigen) {
        header.push_back("min_eig");
        header.push_back("max_eig");
        header.push_back("eigen_pass");
    }
    Csv csv(header);
    int pass = 0, eigen_pass = 0;
    for (int t = 0; t < trials; ++t) {
        const Row& r = rows[t];
        pass += r.dr.pass;
        csv.cell(t).cell(r.seed).cell(m).cell(dict.N).cell(s).cell(r.dr.worst_lower)
            .cell(r.dr.worst_upper).cell(r.dr.pass);
        if (eigen) {
            eigen_pass += r.er.pass;
            csv.cell(r.er.min_eig).cell(r.er.max_eig).cell(r.er.pass);
        }
        csv.end_row();
    }
    csv.write(out_path(out, "discretize-study.csv"));

    json meta = meta_base("discretize-study", cfg);
    meta["resolved"] = {{"m", m}, {"N", dict.N}, {"s", s}, {"workers", workers}};
    json summary = {{"trials", trials}, {"pass_fraction", double(pass) / trials}};
    if (eigen) summary["eigen_pass_fraction"] = double(eigen_pass) / trials;
    meta["summary"] = summary;
    io::write_json_file(out_path(out, "discretize-study_meta.json"), meta);
}

PipelineOptions pipeline_options_from(ConfigView& cv, const std::string& ctx) {
    PipelineOptions opt;
    opt.s = positive(cv, "s", 2);
    opt.J = cv.geti("J", 30);
    if (opt.J < 0) throw std::runtime_error(ctx + ": field 'J' must be >= 0");
    const std::string bm = cv.gets("b_mode", "class");
    if (bm == "class")
        opt.b_mode = PipelineOptions::BMode::ClassSup;
    else if (bm == "oracle")
        opt.b_mode = PipelineOptions::BMode::Oracle;
    else
        throw std::runtime_error(ctx + ": field 'b_mode' must be 'class' or 'oracle'");
    const std::string dm = cv.gets("delta_mode", "tail");
    if (dm == "tail")
        opt.delta_mode = PipelineOptions::DeltaMode::TailSurrogate;
    else if (dm == "oracle")
        opt.delta_mode = PipelineOptions::DeltaMode::Oracle;
    else if (dm == "zero")
        opt.delta_mode = PipelineOptions::DeltaMode::Zero;
    else if (dm == "explicit")
        opt.delta_mode = PipelineOptions::DeltaMode::Explicit;
    else
        throw std::runtime_error(
            ctx + ": field 'delta_mode' must be 'tail', 'oracle', 'zero', or 'explicit'");
    opt.explicit_delta = cv.getd("delta", 0.0);
    opt.taylor_cells = cv.geti("taylor_cells", 0);
    opt.p = cv.getd("p", 2.0);
    if (!(opt.p >= 1.0)) throw std::runtime_error(ctx + ": field 'p' must be >= 1");
    opt.C1 = cv.getd("C1", 0.25);
    opt.C2 = cv.getd("C2", 2.25);
    return opt;
}

void sub_recover(const json& cfg, const std::string& out) {
    ConfigView cv(cfg, "recover", true);
    const Dictionary dict = dict_from(cv, 1, 7);
    const double eps = resolve_eps(cv);
    const int m = auto_m(dict, cv.geti("m", 0), eps, 4);
    PipelineOptions opt = pipeline_options_from(cv, "recover");
    const json cls = cv.get_obj("class");
    const std::uint64_t seed = cv.get_seed(0);
    cv.finish();

    const SyntheticFunction f = class_function(dict, cls, rng::derive_seed(seed, 0), "recover class");
    const SampleSet ss = draw_samples(dict.domain, m, rng::derive_seed(seed, 1));
    const PipelineReport rep = evaluate_pipeline(make_l2norm(), dict, ss, f, opt);

    Csv csv({"k", "theta", "l1_error", "support_size", "bound"});
    for (int k = 0; k <= opt.J; ++k) {
        csv.cell(k);
        if (k < opt.J)
            csv.cell(rep.trace_theta[k]);
        else
            csv.cell("");
        csv.cell(rep.trace_l1_error[k]).cell(rep.trace_support_size[k]).cell(rep.schedule_Bk[k]);
        csv.end_row();
    }
    csv.write(out_path(out, "recover.csv"));
    io::write_json_file(out_path(out, "recover_report.json"), report_to_json(rep));

    json meta = meta_base("recover", cfg);
    meta["resolved"] = {{"m", m}, {"N", dict.N}};
    meta["summary"] = {{"valid", rep.valid},
                       {"tracking_ok", rep.tracking_ok},
                       {"measured_l2_error", rep.measured_l2_error},
                       {"certified_bound", rep.certified_bound}};
    io::write_json_file(out_path(out, "recover_meta.json"), meta);
}

void sub_oracle(const json& cfg, const std::string& out) {
    ConfigView cv(cfg, "oracle", true);
    const Dictionary dict = dict_from(cv, 1, 7);
    const int s = positive(cv, "s", 3);
    const int trials = positive(cv, "trials", 50);
    const double alpha = cv.getd("alpha", 2.0);
    const std::uint64_t seed = cv.get_seed(0);
    cv.finish();

    // full uniform periodic grid: one point per frequency slot, which makes
    // the sampled columns exactly orthogonal
    const int per_axis = 2 * dict.max_freq + 1;
    const SampleSet grid = uniform_grid_samples(dict.domain, per_axis);
    const Eigen::MatrixXd D = sample_matrix(dict, grid);

    Csv csv({"trial", "method", "support", "residual", "matches_top_coefficients"});
    int top_match = 0, supp_match = 0;
    double worst_gap = 0.0;
    for (int t = 0; t < trials; ++t) {
        const SyntheticFunction f =
            sample_a1_alpha(dict, alpha, rng::derive_seed(seed, static_cast<std::uint64_t>(t)));
        const Eigen::VectorXd y = D * f.coeffs;
        const OracleResult ex = best_s_term_exhaustive(D, y, s);
        const OracleResult om = omp(D, y, s);

        std::vector<int> order(dict.N);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return std::abs(f.coeffs[a]) > std::abs(f.coeffs[b]);
        });
        std::vector<int> top(order.begin(), order.begin() + s);
        std::sort(top.begin(), top.end());

        const bool ex_top = ex.support == top;
        const bool om_top = om.support == top;
        top_match += ex_top;
        supp_match += ex.support == om.support;
        worst_gap = std::max(worst_gap, ex.residual - om.residual);

        csv.cell(t).cell("exhaustive").cell(join_ints(ex.support)).cell(ex.residual).cell(ex_top);
        csv.end_row();
        csv.cell(t).cell("omp").cell(join_ints(om.support)).cell(om.residual).cell(om_top);
        csv.end_row();
    }
    csv.write(out_path(out, "oracle.csv"));

    json meta = meta_base("oracle", cfg);
    meta["resolved"] = {{"N", dict.N}, {"m", grid.m()}, {"grid_per_axis", per_axis}};
    meta["summary"] = {{"trials", trials},
                       {"exhaustive_matches_top_fraction", double(top_match) / trials},
                       {"same_support_fraction", double(supp_match) / trials},
                       {"worst_exhaustive_minus_omp_residual", worst_gap}};
    io::write_json_file(out_path(out, "oracle_meta.json"), meta);
}

// sum of a few cosine waves scaled so the euclidean gradient norm stays <= 1
ScalarField random_lipschitz_field(int d, rng::Engine& eng, int waves, int max_wave_freq) {
    struct Wave {
        std::vector<double> n;
        double amp, phase, freq_norm;
    };
    auto data = std::make_shared<std::vector<Wave>>();
    double amp_total = 0.0;
    for (int j = 0; j < waves; ++j) {
        Wave w;
        w.n.resize(d);
        double nn = 0.0;
        while (nn == 0.0) {
            nn = 0.0;
            for (int a = 0; a < d; ++a) {
                w.n[a] = static_cast<double>(eng.uniform_int(-max_wave_freq, max_wave_freq));
                nn += w.n[a] * w.n[a];
            }
        }
        w.freq_norm = std::sqrt(nn);
        w.amp = eng.sign() * eng.uniform(0.5, 1.0);
        w.phase = eng.uniform(0.0, 2.0 * M_PI);
        amp_total += std::abs(w.amp);
        data->push_back(w);
    }
    for (Wave& w : *data) w.amp /= amp_total;

    ScalarField f;
    f.value = [data](std::span<const double> x) {
        double acc = 0.0;
        for (const Wave& w : *data) {
            double arg = w.phase;
            for (std::size_t a = 0; a < x.size(); ++a) arg += 2.0 * M_PI * w.n[a] * x[a];
            acc += w.amp * std::cos(arg) / (2.0 * M_PI * w.freq_norm);
        }
        return acc;
    };
    return f;
}

void sub_taylor_check(const json& cfg, const std::string& out) {
    ConfigView cv(cfg, "taylor-check", true);
    const std::vector<int> d_list = cv.get_int_list("d_list", {1, 2, 3});
    const std::vector<int> cells_list = cv.get_int_list("cells_list", {4, 8, 16});
    const int r = cv.geti("r", 0);
    if (r != 0)
        throw std::runtime_error(
            "taylor-check: only the value route (r = 0) is wired here; higher orders need a "
            "derivative oracle and run through the library API");
    const double beta = cv.getd("beta", 1.0);
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::runtime_error("field 'beta' must lie in (0, 1]");
    const int s = positive(cv, "s", 2);
    const int trials = positive(cv, "trials", 20);
    const int grid_per_axis = positive(cv, "grid_per_axis", 7);
    if (grid_per_axis < 2) throw std::runtime_error("field 'grid_per_axis' must be >= 2");
    const int partition_grid = positive(cv, "partition_grid", 400);
    const std::uint64_t seed = cv.get_seed(0);
    cv.finish();

    Csv csv({"d", "r", "beta", "cells", "trial", "sup_error", "error_bound", "active_cells",
             "cells_bound", "partition_deviation"});
    double worst_ratio = 0.0, worst_partition = 0.0;
    bool all_within = true;
    for (int d : d_list) {
        if (d < 1) throw std::runtime_error("field 'd_list' must contain values >= 1");
        const int s_eff = std::min(s, d);
        for (int cells : cells_list) {
            if (cells < 1) throw std::runtime_error("field 'cells_list' must contain values >= 1");
            const PartitionReport pr = partition_check(cells, d, partition_grid);
            worst_partition = std::max(worst_partition, pr.max_deviation);
            const double bound = taylor_error_bound(d, 0, beta, cells);
            const double cells_bound = active_cells_bound(d, cells, s_eff);
            for (int t = 0; t < trials; ++t) {
                const std::uint64_t stream =
                    (static_cast<std::uint64_t>(d) << 40) ^
                    (static_cast<std::uint64_t>(cells) << 20) ^ static_cast<std::uint64_t>(t);
                rng::Engine eng(rng::derive_seed(seed, stream));
                const ScalarField field = random_lipschitz_field(d, eng, 3, 3);
                const TaylorApproximant approx(field, 0, beta, cells, d, s_eff);

                // sup over the s-sparse union of coordinate planes: every
                // support subset, tensor grid on the active axes
                double sup_err = 0.0;
                std::vector<int> mask(d, 0);
                for (int pick = 0; pick <= s_eff; ++pick) {
                    std::vector<int> comb(pick);
                    std::iota(comb.begin(), comb.end(), 0);
                    while (true) {
                        const long long pts = static_cast<long long>(
                            std::llround(std::pow(grid_per_axis, pick)));
                        std::vector<int> gi(pick, 0);
                        for (long long q = 0; q < pts; ++q) {
                            std::vector<double> x(d, 0.0);
                            for (int a = 0; a < pick; ++a)
                                x[comb[a]] = -0.5 + double(gi[a]) / (grid_per_axis - 1);
                            sup_err = std::max(
                                sup_err, std::abs(field.value(x) - approx.eval(x)));
                            for (int a = pick - 1; a >= 0; --a) {
                                if (++gi[a] < grid_per_axis) break;
                                gi[a] = 0;
                            }
                        }
                        int i = pick - 1;
                        while (i >= 0 && comb[i] == d - pick + i) --i;
                        if (i < 0) break;
                        ++comb[i];
                        for (int jj = i + 1; jj < pick; ++jj) comb[jj] = comb[jj - 1] + 1;
                    }
                }
                const long long active = static_cast<long long>(approx.cells().size());
                worst_ratio = std::max(worst_ratio, sup_err / bound);
                if (sup_err > bound || double(active) > cells_bound) all_within = false;
                csv.cell(d).cell(0).cell(beta).cell(cells).cell(t).cell(sup_err).cell(bound)
                    .cell(active).cell(cells_bound).cell(pr.max_deviation);
                csv.end_row();
            }
        }
    }
    csv.write(out_path(out, "taylor-check.csv"));

    json meta = meta_base("taylor-check", cfg);
    meta["summary"] = {{"worst_error_over_bound", worst_ratio},
                       {"worst_partition_deviation", worst_partition},
                       {"all_within_bound", all_within}};
    io::write_json_file(out_path(out, "taylor-check_meta.json"), meta);
}

void sub_pipeline(const json& cfg, const std::string& out) {
    ConfigView cv(cfg, "pipeline", true);
    const Dictionary dict = dict_from(cv, 1, 7);
    const double eps = resolve_eps(cv);
    const int m = auto_m(dict, cv.geti("m", 0), eps, 4);
    PipelineOptions opt = pipeline_options_from(cv, "pipeline");
    const json cls = cv.get_obj("class");
    const json fspec = cv.get_obj("functional");
    const int trials = positive(cv, "trials", 20);
    const std::uint64_t seed = cv.get_seed(0);
    cv.finish();

    const Functional F = functional_from(dict, fspec, "pipeline functional");

    Csv csv({"trial",      "m",          "N",
             "s",          "J",          "mu",
             "rho",        "sbar",       "valid",
             "admissible", "contractive","b_ok",
             "delta_ok",   "ud_ok",      "tracking_ok",
             "sigma_l1",   "sigma_l2",   "B_sched",
             "delta_used", "measured_l2_error", "measured_l1_code_error",
             "certified_bound", "composite_rhs", "P_true",
             "P_hat",      "holder_gap", "holder_rhs",
             "taylor_cells", "taylor_value", "taylor_gap",
             "taylor_bound", "support"});
    json reports = json::array();
    int valid_count = 0, holder_ok = 0, certified_ok = 0, composite_ok = 0;
    for (int t = 0; t < trials; ++t) {
        const SyntheticFunction f = class_function(
            dict, cls, rng::derive_seed(seed, 2 * static_cast<std::uint64_t>(t)), "pipeline class");
        const SampleSet ss =
            draw_samples(dict.domain, m, rng::derive_seed(seed, 2 * static_cast<std::uint64_t>(t) + 1));
        const PipelineReport rep = evaluate_pipeline(F, dict, ss, f, opt);

        valid_count += rep.valid;
        holder_ok += rep.holder_gap <= rep.holder_rhs + 1e-10;
        if (rep.valid) {
            certified_ok += rep.measured_l2_error <= rep.certified_bound;
            composite_ok += rep.measured_l2_error <= rep.composite_rhs;
        }
        csv.cell(t).cell(rep.m).cell(rep.N).cell(rep.s).cell(rep.J).cell(rep.mu).cell(rep.rho)
            .cell(rep.sbar).cell(rep.valid).cell(rep.admissible).cell(rep.contractive)
            .cell(rep.b_ok).cell(rep.delta_ok).cell(rep.ud_ok).cell(rep.tracking_ok)
            .cell(rep.sigma_l1).cell(rep.sigma_l2).cell(rep.B_sched).cell(rep.delta_used)
            .cell(rep.measured_l2_error).cell(rep.measured_l1_code_error)
            .cell(rep.certified_bound).cell(rep.composite_rhs).cell(rep.P_true).cell(rep.P_hat)
            .cell(rep.holder_gap).cell(rep.holder_rhs).cell(opt.taylor_cells)
            .cell(rep.taylor_value).cell(rep.taylor_gap).cell(rep.taylor_bound)
            .cell(join_ints(rep.support));
        csv.end_row();
        reports.push_back(report_to_json(rep));
    }
    csv.write(out_path(out, "pipeline.csv"));
    io::write_json_file(out_path(out, "pipeline_reports.json"), reports);

    json meta = meta_base("pipeline", cfg);
    meta["resolved"] = {{"m", m}, {"N", dict.N}};
    meta["summary"] = {{"trials", trials},
                       {"valid_fraction", double(valid_count) / trials},
                       {"holder_ok_fraction", double(holder_ok) / trials},
                       {"certified_ok_count_valid", certified_ok},
                       {"composite_ok_count_valid", composite_ok}};
    io::write_json_file(out_path(out, "pipeline_meta.json"), meta);
}

void write_rate_table(const RateTable& rt, const std::string& path) {
    Csv csv({"param", "mean_error", "std_error", "bound", "slope_window"});
    for (int i = 0; i < static_cast<int>(rt.points.size()); ++i) {
        const RatePoint& p = rt.points[i];
        const bool in_window = rt.window_lo >= 0 && i >= rt.window_lo && i <= rt.window_hi;
        csv.cell(p.param).cell(p.mean_value).cell(p.std_value).cell(p.bound).cell(in_window);
        csv.end_row();
    }
    csv.write(path);
}

json rate_summary(const RateTable& rt) {
    return {{"axis", rt.axis},
            {"slope", rt.slope},
            {"slope_reference", rt.slope_reference},
            {"window_lo", rt.window_lo},
            {"window_hi", rt.window_hi}};
}

void sub_rates(const json& cfg, const std::string& out) {
    ConfigView cv(cfg, "rates", true);
    const Dictionary dict = dict_from(cv, 1, 16);
    const double eps = resolve_eps(cv);
    const double alpha = cv.getd("alpha", 2.0);
    const int trials = positive(cv, "trials", 50);
    const int workers = resolve_workers(cv);
    const std::uint64_t seed = cv.require_seed();

    std::vector<std::string> axes = {"s", "J", "m"};
    const json axes_cfg = cv.get_any("axes", json());
    if (!axes_cfg.is_null()) {
        if (!axes_cfg.is_array())
            throw std::runtime_error("rates: field 'axes' must be an array of strings");
        axes.clear();
        for (const auto& e : axes_cfg) {
            if (!e.is_string())
                throw std::runtime_error("rates: field 'axes' must be an array of strings");
            axes.push_back(e.get<std::string>());
        }
    }
    const std::vector<int> s_list = cv.get_int_list("s_list", {1, 2, 3, 4, 6, 8, 10});
    std::vector<int> J_default;
    for (int J = 0; J <= 30; J += 3) J_default.push_back(J);
    const std::vector<int> J_list = cv.get_int_list("J_list", J_default);
    const std::vector<int> m_list = cv.get_int_list("m_list", {64, 128, 256, 512, 1024});
    const int s_for_J = positive(cv, "s_for_iterations", 2);
    const int m_for_J = auto_m(dict, cv.geti("m_for_iterations", 0), eps, 4);
    cv.finish();

    json meta = meta_base("rates", cfg);
    meta["resolved"] = {{"N", dict.N}, {"m_for_iterations", m_for_J}, {"workers", workers}};
    json summary = json::object();
    for (const std::string& axis : axes) {
        if (axis == "s") {
            const RateTable rt = rate_sweep_sigma(dict, alpha, s_list, trials,
                                                  rng::derive_seed(seed, 1));
            write_rate_table(rt, out_path(out, "rates_s.csv"));
            summary["s"] = rate_summary(rt);
        } else if (axis == "J") {
            const SampleSet ss = draw_samples(dict.domain, m_for_J, rng::derive_seed(seed, 2));
            const DesignMatrix dm = build_design_matrix(dict, ss);
            const RateTable rt = rate_sweep_iterations(dm, s_for_J, J_list, trials,
                                                       rng::derive_seed(seed, 3));
            write_rate_table(rt, out_path(out, "rates_J.csv"));
            json js = rate_summary(rt);
            js["mu"] = dm.mu;
            summary["J"] = js;
        } else if (axis == "m") {
            const RateTable rt = rate_sweep_samples(dict, eps, m_list, trials,
                                                    rng::derive_seed(seed, 4), workers);
            write_rate_table(rt, out_path(out, "rates_m.csv"));
            summary["m"] = rate_summary(rt);
        } else {
            throw std::runtime_error("rates: unknown axis '" + axis + "' (s | J | m)");
        }
    }
    meta["summary"] = summary;
    io::write_json_file(out_path(out, "rates_meta.json"), meta);
}

using SubFn = void (*)(const json&, const std::string&);

const std::vector<std::pair<std::string, SubFn>>& dispatch_table() {
    static const std::vector<std::pair<std::string, SubFn>> table = {
        {"coherence-study", &sub_coherence_study},
        {"discretize-study", &sub_discretize_study},
        {"recover", &sub_recover},
        {"oracle", &sub_oracle},
        {"taylor-check", &sub_taylor_check},
        {"pipeline", &sub_pipeline},
        {"rates", &sub_rates},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, fn] : dispatch_table()) out.push_back(name);
        return out;
    }();
    return names;
}

io::json resolve_config(const std::string& config_path, const io::json& flag_overrides) {
    json base;
    if (config_path.empty()) {
        base = json{{"schema_version", 1}};
    } else {
        base = io::load_json_file(config_path);
        if (!base.is_object())
            throw std::runtime_error("config file must contain a JSON object: " + config_path);
    }
    for (const auto& item : flag_overrides.items()) base[item.key()] = item.value();
    return base;
}

int run(const std::string& subcommand, const io::json& config, const std::string& out_dir) {
    if (!config.is_object()) throw std::runtime_error("config must be a JSON object");
    if (!config.contains("schema_version"))
        throw std::runtime_error("config missing field 'schema_version' (expected 1)");
    if (!(config.at("schema_version") == 1))
        throw std::runtime_error("unsupported schema_version (expected 1)");
    if (config.contains("subcommand")) {
        if (!config.at("subcommand").is_string() ||
            config.at("subcommand").get<std::string>() != subcommand)
            throw std::runtime_error("config field 'subcommand' does not match '" + subcommand +
                                     "'");
    }
    const std::string out = out_dir.empty() ? std::string(".") : out_dir;
    std::filesystem::create_directories(out);
    for (const auto& [name, fn] : dispatch_table()) {
        if (name == subcommand) {
            fn(config, out);
            return 0;
        }
    }
    std::string names;
    for (const auto& [name, fn] : dispatch_table()) {
        if (!names.empty()) names += ", ";
        names += name;
    }
    throw std::runtime_error("unknown subcommand '" + subcommand + "' (expected one of: " + names +
                             ")");
}

}  // namespace sfl::runner
