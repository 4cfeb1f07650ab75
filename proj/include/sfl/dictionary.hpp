#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sfl {

enum class DomainKind {
    Cube,   // [0,1]^d with Lebesgue measure
    Torus,  // [0,2pi]^d with normalized measure dx/(2pi)^d
};

struct Domain {
    DomainKind kind = DomainKind::Cube;
    int d = 1;

    double axis_length() const;
};

// One tensor product trig element. Per axis: frequency k_i >= 0 and, for
// k_i >= 1, a phase flag (0 = cos, 1 = sin). A zero-frequency axis contributes
// the constant factor 1/sqrt(2), so every element has sup-norm <= 1 and the
// system satisfies <u_i, u_j> = gamma * delta_ij with gamma = 2^-d.
struct TrigElement {
    std::vector<int> freq;
    std::vector<std::uint8_t> phase;

    int total_freq() const;
};

struct Dictionary {
    Domain domain;
    int N = 0;
    int max_freq = 0;
    double gamma = 1.0;
    std::vector<TrigElement> elements;

    double eval(int i, std::span<const double> x) const;
    Eigen::VectorXd eval_all(std::span<const double> x) const;
    double synthesize(const Eigen::VectorXd& coeffs, std::span<const double> x) const;
};

// Elements ordered by nondecreasing total frequency, ties broken by
// lexicographic frequency vector, then cos before sin per axis.
Dictionary make_trig_dictionary(DomainKind kind, int d, int max_freq);

struct GramReport {
    double gamma = 0.0;
    double max_error = 0.0;  // max over pairs of |<u_i,u_j> - gamma*delta_ij|
    bool pass = false;
};

// Verifies near-orthogonality on a uniform tensor grid (exact quadrature for
// the trig family when the per-axis resolution clears twice the bandwidth).
GramReport gram_check(const Dictionary& dict, int grid_resolution, double tol);

struct SyntheticFunction {
    enum class Tag { A1Alpha, MixedSmooth, Custom };

    Tag tag = Tag::Custom;
    double alpha = 0.0;       // A1Alpha: weighted-l1 exponent
    double a = 0.0;           // MixedSmooth: smoothness
    double b = 0.0;           // MixedSmooth: logarithmic exponent
    int max_level = 0;        // MixedSmooth: largest dyadic mixed level
    std::uint64_t seed = 0;
    Eigen::VectorXd coeffs;
    double B = 0.0;           // certified sup-norm bound, sum_i |c_i|

    // MixedSmooth bookkeeping: per-level l1 masses before the global rescale,
    // the targets they were matched to, and the applied global factor.
    std::vector<double> block_mass_prescale;
    std::vector<double> block_mass_target;
    double global_scale = 1.0;

    double eval(const Dictionary& dict, std::span<const double> x) const;
};

// Random member of {sum c_i u_i : sum |c_i| i^alpha <= 1} (1-based index
// weights): uniform signs, magnitudes proportional to i^-(alpha+1) with
// mild jitter, then exact renormalization of the weighted l1 mass to 1.
SyntheticFunction sample_a1_alpha(const Dictionary& dict, double alpha, std::uint64_t seed);

// Divides coeffs by sum_i |c_i| i^alpha in place; errors on an all-zero input.
void normalize_a1_alpha(Eigen::VectorXd& coeffs, double alpha);

// Dyadic mixed level of a frequency vector: sum over axes of
// (0 if k_i = 0 else floor(log2 k_i) + 1).
int mixed_level(const TrigElement& el);

// Random member of the dyadic mixed-smoothness class: per level j <= max_level
// the absolute coefficient mass over the level-j block is set to exactly
// 2^(-a j) * max(j,1)^((d-1) b), then a global rescale (recorded) keeps B <= 1.
SyntheticFunction sample_mixed_smoothness(const Dictionary& dict, double a, double b,
                                          int max_level, std::uint64_t seed);
SyntheticFunction sample_mixed_smoothness(int d, double a, double b, int max_level,
                                          std::uint64_t seed);

}  // namespace sfl
