#include "boselab/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "boselab/errors.hpp"

namespace boselab {

namespace {

constexpr double pi = std::numbers::pi;

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

// Composite Simpson of fn over [a, b] with n intervals (n rounded up to even).
template <typename F>
double simpson(F&& fn, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = fn(a) + fn(b);
    for (int i = 1; i < n; ++i) s += fn(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace

Potential Potential::square_well(double depth, double radius) {
    if (depth < 0) throw std::invalid_argument("Potential::square_well: depth must be >= 0");
    if (radius <= 0) throw std::invalid_argument("Potential::square_well: radius must be > 0");
    Potential p;
    p.kind_ = Kind::square_well;
    p.depth_ = depth;
    p.radius_ = radius;
    return p;
}

Potential Potential::scaled(double lambda, Potential inner) {
    if (lambda < 0) throw std::invalid_argument("Potential::scaled: lambda must be >= 0");
    Potential p;
    p.kind_ = Kind::scaled;
    p.lambda_ = lambda;
    p.radius_ = inner.radius();
    p.inner_ = std::make_shared<Potential>(std::move(inner));
    return p;
}

Potential Potential::tabulated(std::vector<double> r, std::vector<double> v, double radius) {
    if (r.size() != v.size() || r.size() < 2)
        throw std::invalid_argument("Potential::tabulated: need matching grids with >= 2 points");
    if (radius <= 0) throw std::invalid_argument("Potential::tabulated: radius must be > 0");
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!std::isfinite(r[i]) || !std::isfinite(v[i]) || v[i] < 0)
            throw std::invalid_argument("Potential::tabulated: values must be finite and >= 0");
        if (i > 0 && r[i] <= r[i - 1])
            throw std::invalid_argument("Potential::tabulated: radial grid must be increasing");
    }
    Potential p;
    p.kind_ = Kind::tabulated;
    p.radius_ = radius;
    p.grid_r_ = std::move(r);
    p.grid_v_ = std::move(v);
    return p;
}

double Potential::operator()(double r) const {
    if (r > radius_) return 0.0;
    switch (kind_) {
    case Kind::square_well:
        return depth_;
    case Kind::scaled:
        return lambda_ * (*inner_)(r);
    case Kind::tabulated: {
        if (r <= grid_r_.front()) return grid_v_.front();
        if (r >= grid_r_.back()) return grid_v_.back();
        auto it = std::upper_bound(grid_r_.begin(), grid_r_.end(), r);
        const std::size_t i = static_cast<std::size_t>(it - grid_r_.begin());
        const double t = (r - grid_r_[i - 1]) / (grid_r_[i] - grid_r_[i - 1]);
        return grid_v_[i - 1] + t * (grid_v_[i] - grid_v_[i - 1]);
    }
    }
    return 0.0;
}

double ScatteringSolution::f_at(double r) const {
    if (grid.empty()) throw std::invalid_argument("ScatteringSolution::f_at: empty grid");
    if (r <= grid.front()) return f.front();
    if (r >= grid.back()) return f.back();
    auto it = std::upper_bound(grid.begin(), grid.end(), r);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin());
    const double t = (r - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return f[i - 1] + t * (f[i] - f[i - 1]);
}

namespace {

struct RadialState {
    double u, v; // u and u'
};

// RK4 for u'' = (1/2) V u on [0, R] with n uniform steps.
RadialState integrate_core(const Potential& pot, double R, int n) {
    const double h = R / n;
    RadialState s{0.0, 1.0};
    auto rhs = [&](double r, const RadialState& y) {
        return RadialState{y.v, 0.5 * pot(r) * y.u};
    };
    for (int i = 0; i < n; ++i) {
        const double r = i * h;
        const RadialState k1 = rhs(r, s);
        const RadialState k2 = rhs(r + h / 2, {s.u + h / 2 * k1.u, s.v + h / 2 * k1.v});
        const RadialState k3 = rhs(r + h / 2, {s.u + h / 2 * k2.u, s.v + h / 2 * k2.v});
        const RadialState k4 = rhs(r + h, {s.u + h * k3.u, s.v + h * k3.v});
        s.u += h / 6 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u);
        s.v += h / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
    }
    return s;
}

} // namespace

ScatteringSolution solve_zero_energy(const Potential& pot, double r_max, double tol) {
    const double R = pot.radius();
    if (r_max <= R) throw std::invalid_argument("solve_zero_energy: r_max must exceed the support radius");
    if (tol <= 0) throw std::invalid_argument("solve_zero_energy: tol must be > 0");

    int n = 2000;
    RadialState end = integrate_core(pot, R, n);
    double a_prev = R - end.u / end.v;
    double defect = INFINITY;
    for (int iter = 0; iter < 6; ++iter) {
        n *= 2;
        end = integrate_core(pot, R, n);
        const double a_new = R - end.u / end.v;
        defect = std::abs(a_new - a_prev);
        a_prev = a_new;
        if (defect <= tol / 10) break;
    }
    if (!(defect <= tol) || !std::isfinite(a_prev))
        throw numeric_error("solve_zero_energy: no convergence, defect estimate " +
                            std::to_string(defect));

    ScatteringSolution sol;
    sol.support_radius = R;
    sol.residual = defect;
    const double a = a_prev;
    sol.a_asymptotic = a;

    // Rebuild the profile at the final resolution, normalized so u = r - a
    // outside the support.
    const double scale = 1.0 / end.v;
    const double h = R / n;
    sol.grid.reserve(static_cast<std::size_t>(n) + 130);
    sol.u.reserve(sol.grid.capacity());
    RadialState s{0.0, 1.0};
    sol.grid.push_back(0.0);
    sol.u.push_back(0.0);
    auto rhs = [&](double r, const RadialState& y) {
        return RadialState{y.v, 0.5 * pot(r) * y.u};
    };
    for (int i = 0; i < n; ++i) {
        const double r = i * h;
        const RadialState k1 = rhs(r, s);
        const RadialState k2 = rhs(r + h / 2, {s.u + h / 2 * k1.u, s.v + h / 2 * k1.v});
        const RadialState k3 = rhs(r + h / 2, {s.u + h / 2 * k2.u, s.v + h / 2 * k2.v});
        const RadialState k4 = rhs(r + h, {s.u + h * k3.u, s.v + h * k3.v});
        s.u += h / 6 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u);
        s.v += h / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
        sol.grid.push_back((i + 1) * h);
        sol.u.push_back(s.u * scale);
    }
    // Exact linear continuation beyond the support.
    const int n_out = 128;
    const double h_out = (r_max - R) / n_out;
    for (int i = 1; i <= n_out; ++i) {
        const double r = R + i * h_out;
        sol.grid.push_back(r);
        sol.u.push_back(r - a);
    }
    sol.f.resize(sol.u.size());
    sol.f[0] = scale; // r -> 0 limit of u/r with u'(0) = 1
    for (std::size_t i = 1; i < sol.u.size(); ++i) sol.f[i] = sol.u[i] / sol.grid[i];

    // a from the potential-weighted integral: a = (1/2) int r V u dr, Simpson
    // on the core grid (even interval count by construction).
    {
        double sum = sol.grid[0] * pot(sol.grid[0]) * sol.u[0] +
                     R * pot(R) * sol.u[static_cast<std::size_t>(n)];
        for (int i = 1; i < n; ++i) {
            const double r = i * h;
            sum += r * pot(r) * sol.u[static_cast<std::size_t>(i)] * (i % 2 ? 4.0 : 2.0);
        }
        sol.a_integral = 0.5 * sum * h / 3.0;
    }
    return sol;
}

double fourier_transform_radial(const Potential& pot, double p_abs) {
    if (p_abs < 0) throw std::invalid_argument("fourier_transform_radial: p_abs must be >= 0");
    const double R = pot.radius();
    const int n = std::max(512, 16 * static_cast<int>(std::ceil(p_abs * R / pi)));
    const double val = 4.0 * pi *
        simpson([&](double r) { return r * r * pot(r) * sinc(p_abs * r); }, 0.0, R, n);
    if (!std::isfinite(val)) throw numeric_error("fourier_transform_radial: non-finite result");
    return val;
}

BornTerms born_terms(const Potential& pot, const ShellTable& shells, double tail_tol) {
    BornTerms out;
    out.a0 = fourier_transform_radial(pot, 0.0) / (8.0 * pi);

    // Second Born term as the momentum integral -(16 pi)^-1 (2 pi)^-3
    // int Vhat(p)^2 / p^2 d^3p, radial quadrature with an analytic p^-4 tail
    // bound.  The radial integrand 4 pi Vhat(p)^2 is smooth through p = 0.
    const double R = pot.radius();
    const double p_cut_cont = std::max(200.0, 60.0 * pi / R);
    const int n_cont = std::max(4000, static_cast<int>(std::ceil(p_cut_cont * R / pi)) * 24);
    const double integral =
        simpson([&](double p) {
            const double vh = fourier_transform_radial(pot, p);
            return 4.0 * pi * vh * vh;
        }, 0.0, p_cut_cont, n_cont);

    // Shell-cutoff tail estimates use the high-momentum envelope |Vhat| p^2 <= K.
    double K = 0.0;
    {
        const int probes = 8;
        for (int i = 0; i < probes; ++i) {
            const double p = p_cut_cont * (0.6 + 0.4 * i / (probes - 1));
            K = std::max(K, std::abs(fourier_transform_radial(pot, p)) * p * p);
        }
    }
    const double tail_cont = 4.0 * pi * K * K / (2.0 * 3.0 * p_cut_cont * p_cut_cont * p_cut_cont);
    out.a1 = -integral / (16.0 * pi * std::pow(two_pi, 3));
    out.a1_tail_bound = 2.0 * tail_cont / (16.0 * pi * std::pow(two_pi, 3));

    const auto box = lattice_sum(
        [&](const Shell& s) {
            const double p = s.p_abs();
            const double vh = fourier_transform_radial(pot, p);
            return vh * vh / (p * p);
        },
        shells);
    out.a1_box = -box.value / (16.0 * pi);
    const double p_cut_box = two_pi * std::sqrt(static_cast<double>(shells.n_max()));
    // summand envelope K^2/p^6, lattice point density (2 pi)^-3
    out.a1_box_tail_bound = 2.0 * (4.0 * pi / std::pow(two_pi, 3)) * K * K /
                            (2.0 * 3.0 * std::pow(p_cut_box, 3) * 16.0 * pi);
    out.tail_ok = out.a1_tail_bound <= tail_tol && out.a1_box_tail_bound <= tail_tol;
    return out;
}

double EtaTable::at(int norm_sq_int) const {
    auto it = values.find(norm_sq_int);
    if (it == values.end())
        throw std::invalid_argument("EtaTable::at: no coefficient for shell |n|^2 = " +
                                    std::to_string(norm_sq_int));
    return it->second;
}

EtaTable eta_coefficients(const ScatteringSolution& sol, int N, const ShellTable& shells) {
    if (N < 1) throw std::invalid_argument("eta_coefficients: N must be >= 1");
    if (!(sol.residual <= 1e-6))
        throw std::invalid_argument("eta_coefficients: scattering solution residual too large");

    const double R = sol.support_radius;
    const double a = sol.a_asymptotic;
    EtaTable table;
    table.N = N;

    for (const Shell& s : shells.shells()) {
        const double p = s.p_abs();
        // Core piece over the support, plus the closed-form 1/r far tail of
        // 1 - f(N .).
        const double core = (R > 0)
            ? simpson([&](double r) { return r * (1.0 - sol.f_at(r)) * std::sin(p * r / N); },
                      0.0, R, 4096)
            : 0.0;
        const double eta = -(4.0 * pi / (p * N)) * core - 4.0 * pi * a * std::cos(p * R / N) / (p * p);
        table.values[s.norm_sq_int] = eta;
        table.decay_constant = std::max(table.decay_constant, std::abs(eta) * p * p);
    }
    return table;
}

void write_scattering_csv(std::ostream& os, const ScatteringSolution& sol) {
    os << "r,u,f\n";
    for (std::size_t i = 0; i < sol.grid.size(); ++i)
        os << sol.grid[i] << ',' << sol.u[i] << ',' << sol.f[i] << '\n';
}

} // namespace boselab
