#include "sfl/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sfl/rng.hpp"

namespace sfl {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

}  // namespace

double Domain::axis_length() const {
    return kind == DomainKind::Cube ? 1.0 : kTwoPi;
}

int TrigElement::total_freq() const {
    return std::accumulate(freq.begin(), freq.end(), 0);
}

double Dictionary::eval(int i, std::span<const double> x) const {
    if (i < 0 || i >= N) throw std::out_of_range("Dictionary::eval: element index");
    if (static_cast<int>(x.size()) != domain.d)
        throw std::invalid_argument("Dictionary::eval: point dimension mismatch");
    const TrigElement& el = elements[static_cast<std::size_t>(i)];
    // angular factor: cube elements oscillate as 2*pi*k*x, torus as k*x
    const double omega = domain.kind == DomainKind::Cube ? kTwoPi : 1.0;
    double v = 1.0;
    for (int ax = 0; ax < domain.d; ++ax) {
        const int k = el.freq[static_cast<std::size_t>(ax)];
        if (k == 0) {
            v *= kInvSqrt2;
        } else {
            const double phi = omega * k * x[static_cast<std::size_t>(ax)];
            v *= el.phase[static_cast<std::size_t>(ax)] ? std::sin(phi) : std::cos(phi);
        }
    }
    return v;
}

Eigen::VectorXd Dictionary::eval_all(std::span<const double> x) const {
    Eigen::VectorXd out(N);
    for (int i = 0; i < N; ++i) out[i] = eval(i, x);
    return out;
}

double Dictionary::synthesize(const Eigen::VectorXd& coeffs, std::span<const double> x) const {
    if (coeffs.size() != N)
        throw std::invalid_argument("Dictionary::synthesize: coefficient length mismatch");
    return coeffs.dot(eval_all(x));
}

Dictionary make_trig_dictionary(DomainKind kind, int d, int max_freq) {
    if (d < 1) throw std::invalid_argument("make_trig_dictionary: need d >= 1");
    if (max_freq < 0) throw std::invalid_argument("make_trig_dictionary: need max_freq >= 0");

    Dictionary dict;
    dict.domain = {kind, d};
    dict.max_freq = max_freq;
    dict.gamma = std::pow(0.5, d);

    // all frequency vectors in {0..max_freq}^d, odometer order (lexicographic)
    std::vector<int> k(static_cast<std::size_t>(d), 0);
    while (true) {
        // all phase assignments over the nonzero axes, cos (=0) first
        std::vector<int> osc;
        for (int ax = 0; ax < d; ++ax)
            if (k[static_cast<std::size_t>(ax)] > 0) osc.push_back(ax);
        const int nosc = static_cast<int>(osc.size());
        for (int mask = 0; mask < (1 << nosc); ++mask) {
            TrigElement el;
            el.freq = k;
            el.phase.assign(static_cast<std::size_t>(d), 0);
            // bit b of mask controls osc[b]; lexicographic order over the
            // phase vector means the earliest oscillating axis is the most
            // significant digit
            for (int b = 0; b < nosc; ++b) {
                if (mask & (1 << (nosc - 1 - b)))
                    el.phase[static_cast<std::size_t>(osc[static_cast<std::size_t>(b)])] = 1;
            }
            dict.elements.push_back(std::move(el));
        }
        int ax = d - 1;
        while (ax >= 0 && k[static_cast<std::size_t>(ax)] == max_freq) {
            k[static_cast<std::size_t>(ax)] = 0;
            --ax;
        }
        if (ax < 0) break;
        ++k[static_cast<std::size_t>(ax)];
    }

    std::stable_sort(dict.elements.begin(), dict.elements.end(),
                     [](const TrigElement& a, const TrigElement& b) {
                         const int ta = a.total_freq(), tb = b.total_freq();
                         if (ta != tb) return ta < tb;
                         if (a.freq != b.freq) return a.freq < b.freq;
                         return a.phase < b.phase;
                     });
    dict.N = static_cast<int>(dict.elements.size());
    return dict;
}

GramReport gram_check(const Dictionary& dict, int grid_resolution, double tol) {
    if (grid_resolution < 2 * dict.N)
        throw std::invalid_argument(
            "gram_check: grid resolution below the Nyquist-safe floor 2N");
    const int d = dict.domain.d;
    const int G = grid_resolution;
    const double step = dict.domain.axis_length() / G;
    const double npts = std::pow(static_cast<double>(G), d);

    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dict.N, dict.N);
    std::vector<double> x(static_cast<std::size_t>(d), 0.0);
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    while (true) {
        for (int ax = 0; ax < d; ++ax) x[static_cast<std::size_t>(ax)] = idx[static_cast<std::size_t>(ax)] * step;
        const Eigen::VectorXd u = dict.eval_all(x);
        gram.selfadjointView<Eigen::Lower>().rankUpdate(u);
        int ax = d - 1;
        while (ax >= 0 && idx[static_cast<std::size_t>(ax)] == G - 1) {
            idx[static_cast<std::size_t>(ax)] = 0;
            --ax;
        }
        if (ax < 0) break;
        ++idx[static_cast<std::size_t>(ax)];
    }
    gram /= npts;

    GramReport rep;
    rep.gamma = dict.gamma;
    for (int i = 0; i < dict.N; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double target = i == j ? dict.gamma : 0.0;
            rep.max_error = std::max(rep.max_error, std::abs(gram(i, j) - target));
        }
    }
    rep.pass = rep.max_error <= tol;
    return rep;
}

double SyntheticFunction::eval(const Dictionary& dict, std::span<const double> x) const {
    return dict.synthesize(coeffs, x);
}

void normalize_a1_alpha(Eigen::VectorXd& coeffs, double alpha) {
    double mass = 0.0;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i)
        mass += std::abs(coeffs[i]) * std::pow(static_cast<double>(i + 1), alpha);
    if (mass == 0.0)
        throw std::invalid_argument("normalize_a1_alpha: all-zero coefficient vector");
    coeffs /= mass;
}

SyntheticFunction sample_a1_alpha(const Dictionary& dict, double alpha, std::uint64_t seed) {
    rng::Engine eng(seed);
    SyntheticFunction f;
    f.tag = SyntheticFunction::Tag::A1Alpha;
    f.alpha = alpha;
    f.seed = seed;
    f.coeffs.resize(dict.N);
    for (int i = 0; i < dict.N; ++i) {
        const double mag = std::pow(static_cast<double>(i + 1), -alpha - 1.0) * eng.uniform(0.5, 1.5);
        f.coeffs[i] = eng.sign() * mag;
    }
    normalize_a1_alpha(f.coeffs, alpha);
    f.B = f.coeffs.lpNorm<1>();
    return f;
}

int mixed_level(const TrigElement& el) {
    int j = 0;
    for (int k : el.freq) {
        if (k > 0) j += static_cast<int>(std::floor(std::log2(static_cast<double>(k)))) + 1;
    }
    return j;
}

SyntheticFunction sample_mixed_smoothness(const Dictionary& dict, double a, double b,
                                          int max_level, std::uint64_t seed) {
    if (max_level < 0)
        throw std::invalid_argument("sample_mixed_smoothness: need max_level >= 0");
    const long long need = (1LL << max_level) - 1;
    if (need > dict.max_freq)
        throw std::out_of_range(
            "sample_mixed_smoothness: max_level exceeds the dictionary frequency range");

    rng::Engine eng(seed);
    SyntheticFunction f;
    f.tag = SyntheticFunction::Tag::MixedSmooth;
    f.a = a;
    f.b = b;
    f.max_level = max_level;
    f.seed = seed;
    f.coeffs = Eigen::VectorXd::Zero(dict.N);

    const int d = dict.domain.d;
    std::vector<std::vector<int>> blocks(static_cast<std::size_t>(max_level) + 1);
    for (int i = 0; i < dict.N; ++i) {
        const int j = mixed_level(dict.elements[static_cast<std::size_t>(i)]);
        if (j <= max_level) blocks[static_cast<std::size_t>(j)].push_back(i);
    }

    for (int j = 0; j <= max_level; ++j) {
        const double jbar = std::max(j, 1);
        const double target = std::pow(2.0, -a * j) * std::pow(jbar, (d - 1) * b);
        f.block_mass_target.push_back(target);
        const auto& blk = blocks[static_cast<std::size_t>(j)];
        if (blk.empty())
            throw std::logic_error("sample_mixed_smoothness: empty dyadic block");
        double raw = 0.0;
        std::vector<double> draw(blk.size());
        for (std::size_t t = 0; t < blk.size(); ++t) {
            draw[t] = eng.sign() * eng.uniform(0.5, 1.5);
            raw += std::abs(draw[t]);
        }
        double got = 0.0;
        for (std::size_t t = 0; t < blk.size(); ++t) {
            f.coeffs[blk[t]] = draw[t] * (target / raw);
            got += std::abs(f.coeffs[blk[t]]);
        }
        f.block_mass_prescale.push_back(got);
    }

    const double mass = f.coeffs.lpNorm<1>();
    if (mass > 1.0) {
        f.global_scale = 1.0 / mass;
        f.coeffs *= f.global_scale;
    }
    f.B = f.coeffs.lpNorm<1>();
    return f;
}

SyntheticFunction sample_mixed_smoothness(int d, double a, double b, int max_level,
                                          std::uint64_t seed) {
    const int max_freq = static_cast<int>((1LL << max_level) - 1);
    const Dictionary dict = make_trig_dictionary(DomainKind::Cube, d, std::max(max_freq, 0));
    return sample_mixed_smoothness(dict, a, b, max_level, seed);
}

}  // namespace sfl
