#include "sfl/taylor.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "sfl/util.hpp"

namespace sfl {

double bump(double x, int m, int N) {
    if (N < 1 || m < 0 || m > N) throw std::invalid_argument("bump: need N >= 1, 0 <= m <= N");
    const double center = -0.5 + static_cast<double>(m) / N;
    const double t = std::abs(x - center);
    const double plateau = 1.0 / (3.0 * N);
    const double edge = 2.0 / (3.0 * N);
    if (t <= plateau) return 1.0;
    if (t >= edge) return 0.0;
    return 3.0 * N * (edge - t);
}

PartitionReport partition_check(int N, int d, int per_axis_grid, double tol) {
    if (N < 1 || d < 1 || per_axis_grid < 2)
        throw std::invalid_argument("partition_check: need N >= 1, d >= 1, grid >= 2");
    // the tensor-product sum factorizes into per-axis sums, so the extreme
    // deviation over the grid is a product of per-axis extremes
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < per_axis_grid; ++t) {
        const double x = -0.5 + static_cast<double>(t) / (per_axis_grid - 1);
        double sum = 0.0;
        for (int m = 0; m <= N; ++m) sum += bump(x, m, N);
        lo = std::min(lo, sum);
        hi = std::max(hi, sum);
    }
    double plo = 1.0, phi = 1.0;
    for (int ax = 0; ax < d; ++ax) {
        plo *= lo;
        phi *= hi;
    }
    PartitionReport rep;
    rep.max_deviation = std::max(std::abs(phi - 1.0), std::abs(plo - 1.0));
    rep.pass = rep.max_deviation <= tol;
    return rep;
}

namespace {

// integer cell indices whose bump support covers the origin of one axis
std::vector<int> zero_active_indices(int N) {
    std::vector<int> out;
    for (int m = 0; m <= N; ++m) {
        // |m/N - 1/2| < 2/(3N)  <=>  |2m - N| < 4/3  <=>  |2m - N| <= 1
        if (std::abs(2 * m - N) <= 1) out.push_back(m);
    }
    return out;
}

}  // namespace

std::vector<MultiIndex> active_cells(int d, int N, int s, long long enumeration_cap) {
    if (d < 1 || N < 1 || s < 0 || s > d)
        throw std::invalid_argument("active_cells: need d >= 1, N >= 1, 0 <= s <= d");
    double work = static_cast<double>(binomial(d, s));
    for (int i = 0; i < s; ++i) work *= N + 1;
    if (work > static_cast<double>(enumeration_cap))
        throw std::invalid_argument("active_cells: enumeration exceeds the cap");

    const std::vector<int> zero_set = zero_active_indices(N);
    std::set<MultiIndex> cells;

    std::vector<int> gamma(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) gamma[static_cast<std::size_t>(i)] = i;
    while (true) {
        // odometer over the choices: free axes run 0..N, the rest over zero_set
        std::vector<int> choice_count(static_cast<std::size_t>(d)), choice(static_cast<std::size_t>(d), 0);
        std::vector<bool> free_axis(static_cast<std::size_t>(d), false);
        for (int i : gamma) free_axis[static_cast<std::size_t>(i)] = true;
        for (int ax = 0; ax < d; ++ax)
            choice_count[static_cast<std::size_t>(ax)] =
                free_axis[static_cast<std::size_t>(ax)] ? N + 1 : static_cast<int>(zero_set.size());
        while (true) {
            MultiIndex cell(static_cast<std::size_t>(d));
            for (int ax = 0; ax < d; ++ax) {
                const int c = choice[static_cast<std::size_t>(ax)];
                cell[static_cast<std::size_t>(ax)] =
                    free_axis[static_cast<std::size_t>(ax)] ? c : zero_set[static_cast<std::size_t>(c)];
            }
            cells.insert(std::move(cell));
            int ax = d - 1;
            while (ax >= 0 && choice[static_cast<std::size_t>(ax)] == choice_count[static_cast<std::size_t>(ax)] - 1) {
                choice[static_cast<std::size_t>(ax)] = 0;
                --ax;
            }
            if (ax < 0) break;
            ++choice[static_cast<std::size_t>(ax)];
        }

        if (s == 0) break;
        int pos = s - 1;
        while (pos >= 0 && gamma[static_cast<std::size_t>(pos)] == d - s + pos) --pos;
        if (pos < 0) break;
        ++gamma[static_cast<std::size_t>(pos)];
        for (int q = pos + 1; q < s; ++q)
            gamma[static_cast<std::size_t>(q)] = gamma[static_cast<std::size_t>(q - 1)] + 1;
    }
    return {cells.begin(), cells.end()};
}

double active_cells_bound(int d, int N, int s) {
    if (d < 1 || N < 1 || s < 0 || s > d)
        throw std::invalid_argument("active_cells_bound: need d >= 1, N >= 1, 0 <= s <= d");
    double out = static_cast<double>(binomial(d, s)) * std::pow(2.0, d);
    for (int i = 0; i < s; ++i) out *= N + 1;
    return out;
}

double taylor_error_bound(int d, int r, double beta, int N) {
    if (d < 1 || r < 0 || N < 1 || !(beta > 0.0) || beta > 1.0)
        throw std::invalid_argument("taylor_error_bound: need d,N >= 1, r >= 0, 0 < beta <= 1");
    double rfact = 1.0;
    for (int i = 2; i <= r; ++i) rfact *= i;
    return std::pow(2.0, d) * std::pow(static_cast<double>(d), r) / rfact *
           std::pow(static_cast<double>(d) / N, r + beta);
}

namespace {

// bump indices active at one axis coordinate, with their values
void axis_actives(double x, int N, std::vector<std::pair<int, double>>& out) {
    out.clear();
    const int q = static_cast<int>(std::floor((x + 0.5) * N + 0.5));
    for (int m = std::max(q - 1, 0); m <= std::min(q + 1, N); ++m) {
        const double h = bump(x, m, N);
        if (h > 0.0) out.emplace_back(m, h);
    }
}

void taylor_orders(int d, int r, MultiIndex& cur, int axis, int used,
                   std::vector<MultiIndex>& out) {
    if (axis == d) {
        out.push_back(cur);
        return;
    }
    for (int n = 0; n + used <= r; ++n) {
        cur[static_cast<std::size_t>(axis)] = n;
        taylor_orders(d, r, cur, axis + 1, used + n, out);
    }
    cur[static_cast<std::size_t>(axis)] = 0;
}

}  // namespace

TaylorApproximant::TaylorApproximant(const ScalarField& f, int r, double beta, int N, int d,
                                     int s, long long enumeration_cap)
    : d_(d), N_(N), r_(r), s_(s), beta_(beta) {
    if (!f.value) throw std::invalid_argument("TaylorApproximant: field has no value oracle");
    if (r >= 1 && !f.deriv)
        throw std::invalid_argument(
            "TaylorApproximant: derivative oracle required for order r >= 1");
    error_bound_ = taylor_error_bound(d, r, beta, N);

    MultiIndex cur(static_cast<std::size_t>(d), 0);
    taylor_orders(d, r, cur, 0, 0, orders_);
    factorials_.reserve(orders_.size());
    for (const auto& n : orders_) {
        double fact = 1.0;
        for (int ni : n)
            for (int i = 2; i <= ni; ++i) fact *= i;
        factorials_.push_back(fact);
    }

    cells_ = active_cells(d, N, s, enumeration_cap);
    std::vector<double> center(static_cast<std::size_t>(d));
    for (const auto& cell : cells_) {
        for (int ax = 0; ax < d; ++ax)
            center[static_cast<std::size_t>(ax)] = -0.5 + static_cast<double>(cell[static_cast<std::size_t>(ax)]) / N;
        std::vector<double> cf(orders_.size());
        for (std::size_t oi = 0; oi < orders_.size(); ++oi) {
            const auto& n = orders_[oi];
            int total = 0;
            for (int ni : n) total += ni;
            const double dval = total == 0 ? f.value(center) : f.deriv(n, center);
            cf[oi] = dval / factorials_[oi];
        }
        coeffs_.emplace(cell, std::move(cf));
    }
}

double TaylorApproximant::eval(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != d_)
        throw std::invalid_argument("TaylorApproximant::eval: dimension mismatch");
    std::vector<std::vector<std::pair<int, double>>> act(static_cast<std::size_t>(d_));
    for (int ax = 0; ax < d_; ++ax)
        axis_actives(x[static_cast<std::size_t>(ax)], N_, act[static_cast<std::size_t>(ax)]);

    double total = 0.0;
    std::vector<int> pick(static_cast<std::size_t>(d_), 0);
    MultiIndex cell(static_cast<std::size_t>(d_));
    while (true) {
        double h = 1.0;
        for (int ax = 0; ax < d_; ++ax) {
            const auto& [m, hv] = act[static_cast<std::size_t>(ax)][static_cast<std::size_t>(pick[static_cast<std::size_t>(ax)])];
            cell[static_cast<std::size_t>(ax)] = m;
            h *= hv;
        }
        const auto it = coeffs_.find(cell);
        if (it != coeffs_.end()) {
            // Taylor polynomial at the cell center
            double p = 0.0;
            for (std::size_t oi = 0; oi < orders_.size(); ++oi) {
                double mono = 1.0;
                for (int ax = 0; ax < d_; ++ax) {
                    const int n = orders_[oi][static_cast<std::size_t>(ax)];
                    if (n == 0) continue;
                    const double dx = x[static_cast<std::size_t>(ax)] -
                                      (-0.5 + static_cast<double>(cell[static_cast<std::size_t>(ax)]) / N_);
                    for (int rep = 0; rep < n; ++rep) mono *= dx;
                }
                p += it->second[oi] * mono;
            }
            total += h * p;
        }
        int ax = d_ - 1;
        while (ax >= 0 && pick[static_cast<std::size_t>(ax)] ==
                              static_cast<int>(act[static_cast<std::size_t>(ax)].size()) - 1) {
            pick[static_cast<std::size_t>(ax)] = 0;
            --ax;
        }
        if (ax < 0) break;
        ++pick[static_cast<std::size_t>(ax)];
    }
    return total;
}

double localized_value_r0(const std::function<double(std::span<const double>)>& g, int N,
                          std::span<const double> x, int max_active_cells) {
    const int d = static_cast<int>(x.size());
    if (d < 1) throw std::invalid_argument("localized_value_r0: empty point");
    std::vector<std::vector<std::pair<int, double>>> act(static_cast<std::size_t>(d));
    double cells = 1.0;
    for (int ax = 0; ax < d; ++ax) {
        axis_actives(x[static_cast<std::size_t>(ax)], N, act[static_cast<std::size_t>(ax)]);
        cells *= static_cast<double>(act[static_cast<std::size_t>(ax)].size());
        if (cells > static_cast<double>(max_active_cells))
            throw std::invalid_argument(
                "localized_value_r0: too many active cells; use an even cell count and a "
                "sparse evaluation point");
    }

    double total = 0.0;
    std::vector<int> pick(static_cast<std::size_t>(d), 0);
    std::vector<double> center(static_cast<std::size_t>(d));
    while (true) {
        double h = 1.0;
        for (int ax = 0; ax < d; ++ax) {
            const auto& [m, hv] = act[static_cast<std::size_t>(ax)][static_cast<std::size_t>(pick[static_cast<std::size_t>(ax)])];
            center[static_cast<std::size_t>(ax)] = -0.5 + static_cast<double>(m) / N;
            h *= hv;
        }
        total += h * g(center);
        int ax = d - 1;
        while (ax >= 0 && pick[static_cast<std::size_t>(ax)] ==
                              static_cast<int>(act[static_cast<std::size_t>(ax)].size()) - 1) {
            pick[static_cast<std::size_t>(ax)] = 0;
            --ax;
        }
        if (ax < 0) break;
        ++pick[static_cast<std::size_t>(ax)];
    }
    return total;
}

RescaledField rescale_to_unit_cube(const ScalarField& f, double B, double beta) {
    if (!(B > 0.0)) throw std::invalid_argument("rescale_to_unit_cube: need B > 0");
    if (!(beta > 0.0) || beta > 1.0)
        throw std::invalid_argument("rescale_to_unit_cube: need 0 < beta <= 1");
    RescaledField out;
    out.B = B;
    out.beta = beta;
    out.inflation = 1.0 + std::pow(2.0 * B, beta);
    const auto value = f.value;
    const auto deriv = f.deriv;
    const double scale = 2.0 * B;
    out.g.value = [value, scale](std::span<const double> z) {
        std::vector<double> y(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) y[i] = scale * z[i];
        return value(y);
    };
    if (deriv) {
        out.g.deriv = [deriv, scale](const MultiIndex& n, std::span<const double> z) {
            std::vector<double> y(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) y[i] = scale * z[i];
            int total = 0;
            for (int ni : n) total += ni;
            return std::pow(scale, total) * deriv(n, y);
        };
    }
    return out;
}

}  // namespace sfl
