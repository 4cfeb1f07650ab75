#pragma once

#include <functional>
#include <map>
#include <span>
#include <vector>

namespace sfl {

// Piecewise-linear bump h(x; m/N) on [-1/2, 1/2]: plateau of value 1 within
// 1/(3N) of the center -1/2 + m/N, linear ramps of slope +-3N out to 2/(3N),
// zero beyond. The family {h(.; m/N)}_{m=0..N} sums to 1 on the interval.
double bump(double x, int m, int N);

struct PartitionReport {
    double max_deviation = 0.0;
    bool pass = false;
};

// Checks sum_m h_m = 1 on a tensor grid over [-1/2, 1/2]^d.
PartitionReport partition_check(int N, int d, int per_axis_grid, double tol = 1e-12);

using MultiIndex = std::vector<int>;

// Cells whose bump support touches the union of s-sparse coordinate
// hyperplanes, sorted lexicographically. Errors when the enumeration bound
// C(d, s) * (N+1)^s exceeds the cap.
std::vector<MultiIndex> active_cells(int d, int N, int s, long long enumeration_cap = 1000000);

// Counting bound 2^d * (N+1)^s * C(d, s) for the active cell set.
double active_cells_bound(int d, int N, int s);

// 2^d * (d^r / r!) * (d/N)^(r + beta): sup-norm error of the localized Taylor
// approximant on the sparse set, for unit Hoelder seminorm fields.
double taylor_error_bound(int d, int r, double beta, int N);

// Scalar field with an optional derivative oracle. deriv(n, x) returns the
// mixed partial of multi-order n at x; required only when r >= 1.
struct ScalarField {
    std::function<double(std::span<const double>)> value;
    std::function<double(const MultiIndex&, std::span<const double>)> deriv;
};

class TaylorApproximant {
public:
    // Builds sum_{m in Lambda} h_m * P_m where P_m is the degree-r Taylor
    // polynomial of f at the cell center.
    TaylorApproximant(const ScalarField& f, int r, double beta, int N, int d, int s,
                      long long enumeration_cap = 1000000);

    double eval(std::span<const double> x) const;
    const std::vector<MultiIndex>& cells() const { return cells_; }
    double error_bound() const { return error_bound_; }  // unit-seminorm fields
    int dims() const { return d_; }

private:
    int d_, N_, r_, s_;
    double beta_;
    double error_bound_;
    std::vector<MultiIndex> orders_;              // Taylor multi-orders, ||n||_1 <= r
    std::vector<double> factorials_;              // n! per order
    std::vector<MultiIndex> cells_;               // Lambda, sorted
    std::map<MultiIndex, std::vector<double>> coeffs_;  // cell -> d^n f(center)/n!
};

// Lazy localized evaluation for r = 0 in high ambient dimension: evaluates
// sum over the cells active at x of h_m(x) * g(center_m), fetching g values
// on demand. Intended for s-sparse x with even N, where a zero coordinate
// activates exactly the central plateau cell and the sum touches at most
// 2^(number of nonzero coordinates) cells.
double localized_value_r0(const std::function<double(std::span<const double>)>& g, int N,
                          std::span<const double> x, int max_active_cells = 4096);

// g(z) = f(2B z) together with the Hoelder norm inflation factor 1 + (2B)^beta
// incurred by mapping [-B, B]^d onto [-1/2, 1/2]^d.
struct RescaledField {
    ScalarField g;
    double B = 0.0;
    double beta = 1.0;
    double inflation = 0.0;
};

RescaledField rescale_to_unit_cube(const ScalarField& f, double B, double beta);

}  // namespace sfl
