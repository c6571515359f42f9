#include "boselab/formulas.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "boselab/errors.hpp"

namespace boselab {

namespace {
constexpr double pi = std::numbers::pi;
}

DispersionModel DispersionModel::gross_pitaevskii(double a) {
    if (a < 0) throw std::invalid_argument("DispersionModel: scattering length must be >= 0");
    DispersionModel m;
    m.variant = Variant::gross_pitaevskii;
    m.a = a;
    return m;
}

DispersionModel DispersionModel::mean_field(std::function<double(double)> v_hat) {
    DispersionModel m;
    m.variant = Variant::mean_field;
    m.v_hat = std::move(v_hat);
    return m;
}

double DispersionModel::energy(int norm_sq_int) const {
    const double p_sq = two_pi * two_pi * norm_sq_int;
    switch (variant) {
    case Variant::free:
        return p_sq;
    case Variant::gross_pitaevskii:
        return std::sqrt(p_sq * p_sq + 16.0 * pi * a * p_sq);
    case Variant::mean_field: {
        const double vh = v_hat ? v_hat(std::sqrt(p_sq)) : 0.0;
        const double rad = p_sq * p_sq + 2.0 * vh * p_sq;
        if (rad < 0)
            throw numeric_error("DispersionModel: negative radicand in mean-field dispersion");
        return std::sqrt(rad);
    }
    }
    return 0.0;
}

double dispersion(const DispersionModel& model, const Shell& shell) {
    if (shell.norm_sq_int < 1)
        throw std::invalid_argument("dispersion: shell norm must be >= 1");
    return model.energy(shell.norm_sq_int);
}

QuadDiagonalization quad_diagonalize(double A, double B) {
    if (!(A > std::abs(B)))
        throw std::domain_error("quad_diagonalize: requires A > |B|");
    QuadDiagonalization d;
    d.A = A;
    d.B = B;
    d.eps = std::sqrt(A * A - B * B);
    d.tau = 0.5 * std::atanh(-B / A);
    d.ground_shift = d.eps - A;
    return d;
}

std::vector<double> e_lambda_partial_sums(int m_max) {
    if (m_max < 1) throw std::invalid_argument("e_lambda_partial_sums: m_max must be >= 1");
    // Bucket every octant-reduced point by its max coordinate, then prefix-sum.
    std::vector<double> bucket(static_cast<std::size_t>(m_max) + 1, 0.0);
    std::vector<double> comp(bucket.size(), 0.0);
    for (int x = 0; x <= m_max; ++x)
        for (int y = 0; y <= m_max; ++y)
            for (int z = 0; z <= m_max; ++z) {
                if (x == 0 && y == 0 && z == 0) continue;
                const int n2 = x * x + y * y + z * z;
                const double weight = (x > 0 ? 2.0 : 1.0) * (y > 0 ? 2.0 : 1.0) * (z > 0 ? 2.0 : 1.0);
                const double term = weight * std::cos(std::sqrt(static_cast<double>(n2))) / n2;
                const std::size_t m = static_cast<std::size_t>(std::max(x, std::max(y, z)));
                const double yk = term - comp[m];
                const double t = bucket[m] + yk;
                comp[m] = (t - bucket[m]) - yk;
                bucket[m] = t;
            }
    std::vector<double> sums(static_cast<std::size_t>(m_max));
    double acc = 0.0;
    for (int m = 1; m <= m_max; ++m) {
        acc += bucket[static_cast<std::size_t>(m)];
        sums[static_cast<std::size_t>(m) - 1] = acc;
    }
    return sums;
}

namespace {

// Iterated pairwise averaging; each pass damps an oscillation of frequency w
// by |cos(w/2)|.  Returns the last surviving element.
double averaged_limit(const std::vector<double>& sums, int m_max) {
    std::vector<double> s(sums.begin(), sums.begin() + m_max);
    int k = std::max(m_max - 20, (2 * m_max) / 3);
    k = std::min(k, m_max - 2);
    for (int i = 0; i < k; ++i)
        for (std::size_t j = 0; j + 1 < s.size(); ++j) s[j] = 0.5 * (s[j] + s[j + 1]);
    return s[static_cast<std::size_t>(m_max - k) - 1];
}

} // namespace

ELambdaResult e_lambda(int m_max, ELambdaScheme scheme) {
    if (m_max < 20) throw std::invalid_argument("e_lambda: m_max must be >= 20");
    const std::vector<double> sums = e_lambda_partial_sums(m_max);

    ELambdaResult res;
    const double t_full = averaged_limit(sums, m_max);
    const double t_three_quarters = averaged_limit(sums, (3 * m_max) / 4);
    switch (scheme) {
    case ELambdaScheme::cube_cutoff_average: {
        res.value = 2.0 - t_full;
        res.error_estimate = std::abs(t_full - t_three_quarters);
        break;
    }
    case ELambdaScheme::richardson: {
        const double t_half = averaged_limit(sums, m_max / 2);
        const double extrap = t_full + (t_full - t_half) / 3.0; // leading 1/M^2 error
        res.value = 2.0 - extrap;
        res.error_estimate = std::abs(extrap - t_full);
        break;
    }
    }
    if (!std::isfinite(res.value)) throw numeric_error("e_lambda: non-finite value");
    return res;
}

ELambdaResult e_lambda_certified(int m_max) {
    const ELambdaResult avg = e_lambda(m_max, ELambdaScheme::cube_cutoff_average);
    const ELambdaResult rich = e_lambda(m_max, ELambdaScheme::richardson);
    const double spread = std::abs(avg.value - rich.value);
    const double budget = 10.0 * (avg.error_estimate + rich.error_estimate + 1e-12);
    if (spread > budget)
        throw numeric_error("e_lambda: schemes disagree by " + std::to_string(spread) +
                            " beyond 10x their error estimates");
    ELambdaResult res;
    res.value = avg.value;
    res.error_estimate = std::max(spread, avg.error_estimate);
    return res;
}

double correction_summand(double a, double p_sq) {
    if (a == 0.0) return 0.0;
    const double g = 8.0 * pi * a;
    const double root = std::sqrt(p_sq * p_sq + 2.0 * g * p_sq);
    // p^2 + g - root rewritten to avoid cancellation at large p.
    return g * g / (p_sq + g + root) - g * g / (2.0 * p_sq);
}

CorrectionSum correction_sum(double a, const ShellTable& shells) {
    if (a < 0) throw std::invalid_argument("correction_sum: scattering length must be >= 0");
    if (shells.shells().empty()) throw std::invalid_argument("correction_sum: empty shell table");

    CorrectionSum out;
    const auto sum = lattice_sum(
        [&](const Shell& s) { return correction_summand(a, s.p_sq()); }, shells);
    out.value = -0.5 * sum.value;
    const double g = 8.0 * pi * a;
    const double p_cut = two_pi * std::sqrt(static_cast<double>(shells.n_max()));
    // |summand| ~ g^3/(2 p^4) beyond the cutoff, point density (2 pi)^-3.
    out.tail_bound = 1.5 * 0.5 * (g * g * g / 2.0) * (4.0 * pi / std::pow(two_pi, 3)) / p_cut;
    return out;
}

EnergyBreakdown ground_state_energy(int N, double a, double e_lambda_value,
                                    const CorrectionSum& correction) {
    if (N < 2) throw std::invalid_argument("ground_state_energy: N must be >= 2");
    if (a < 0) throw std::invalid_argument("ground_state_energy: scattering length must be >= 0");
    EnergyBreakdown e;
    e.term_main = 4.0 * pi * (N - 1) * a;
    e.term_boundary = e_lambda_value * a * a;
    e.term_correction = correction.value;
    e.total = e.term_main + e.term_boundary + e.term_correction;
    e.tail_bound = correction.tail_bound;
    return e;
}

} // namespace boselab
