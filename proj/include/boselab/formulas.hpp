#ifndef BOSELAB_FORMULAS_HPP
#define BOSELAB_FORMULAS_HPP

#include <functional>

#include "boselab/lattice.hpp"

namespace boselab {

// Excitation dispersion law evaluated on shells.  p^2 is always computed
// from the exact integer norm.
struct DispersionModel {
    enum class Variant { free, gross_pitaevskii, mean_field };

    Variant variant = Variant::free;
    double a = 0.0;                          // gross_pitaevskii only
    std::function<double(double)> v_hat;     // mean_field only, argument |p|

    static DispersionModel free_model() { return {}; }
    static DispersionModel gross_pitaevskii(double a);
    static DispersionModel mean_field(std::function<double(double)> v_hat);

    double energy(int norm_sq_int) const;
};

double dispersion(const DispersionModel& model, const Shell& shell);

// Two-mode Bogoliubov algebra for A (a+*a+ + a-*a-) + B (a+*a-* + h.c.).
struct QuadDiagonalization {
    double A = 0.0;
    double B = 0.0;
    double tau = 0.0;          // tanh(2 tau) = -B/A
    double eps = 0.0;          // sqrt(A^2 - B^2)
    double ground_shift = 0.0; // eps - A per mode pair
};

QuadDiagonalization quad_diagonalize(double A, double B);

enum class ELambdaScheme { cube_cutoff_average, richardson };

struct ELambdaResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

// Finite-box boundary constant 2 - lim_M sum over 0 != p in Z^3 with
// |p_i| <= M of cos(|p|)/p^2.  The limit is taken over cube-shaped partial
// sums; cube_cutoff_average damps the oscillation by iterated consecutive
// averaging, richardson additionally extrapolates in the cutoff.
ELambdaResult e_lambda(int m_max, ELambdaScheme scheme);

// Runs both schemes and raises numeric_error if they disagree beyond 10x
// their combined error estimate.
ELambdaResult e_lambda_certified(int m_max);

// Cube partial sums S_1..S_m_max of the defining series (before the 2 - ...).
std::vector<double> e_lambda_partial_sums(int m_max);

struct CorrectionSum {
    double value = 0.0;
    double tail_bound = 0.0;
};

// Order-one correction -(1/2) sum over nonzero lattice momenta of
// [p^2 + 8 pi a - sqrt(p^4 + 16 pi a p^2) - (8 pi a)^2/(2 p^2)].
CorrectionSum correction_sum(double a, const ShellTable& shells);

// One summand of the correction series, per lattice vector, in the
// cancellation-free form.
double correction_summand(double a, double p_sq);

struct EnergyBreakdown {
    double term_main = 0.0;       // 4 pi (N-1) a
    double term_boundary = 0.0;   // e_box * a^2
    double term_correction = 0.0;
    double total = 0.0;
    double tail_bound = 0.0;
};

EnergyBreakdown ground_state_energy(int N, double a, double e_lambda_value,
                                    const CorrectionSum& correction);

} // namespace boselab

#endif
