#ifndef BOSELAB_SCATTERING_HPP
#define BOSELAB_SCATTERING_HPP

#include <map>
#include <memory>
#include <vector>

#include "boselab/lattice.hpp"

namespace boselab {

// Radial, non-negative, compactly supported interaction.  A scaled potential
// wraps an inner one; tabulated values are interpolated linearly.
class Potential {
public:
    enum class Kind { square_well, scaled, tabulated };

    static Potential square_well(double depth, double radius);
    static Potential scaled(double lambda, Potential inner);
    static Potential tabulated(std::vector<double> r, std::vector<double> v, double radius);

    double operator()(double r) const; // V(r), zero outside the support
    double radius() const { return radius_; }
    Kind kind() const { return kind_; }

private:
    Potential() = default;
    Kind kind_ = Kind::square_well;
    double depth_ = 0.0;
    double radius_ = 0.0;
    double lambda_ = 1.0;
    std::shared_ptr<const Potential> inner_;
    std::vector<double> grid_r_, grid_v_;
};

struct ScatteringSolution {
    std::vector<double> grid; // 0 = r_0 < ... < r_K = r_max
    std::vector<double> u;    // u = r f, normalized so u(r) = r - a outside the support
    std::vector<double> f;    // u/r with the r->0 limit at the origin
    double a_integral = 0.0;  // from the potential-weighted integral of f
    double a_asymptotic = 0.0; // from the large-r slope matching
    double residual = 0.0;    // step-doubling defect estimate
    double support_radius = 0.0;

    double f_at(double r) const; // linear interpolation on the grid
};

// Integrates -u'' + (1/2) V u = 0 with u(0) = 0 outward, then matches to the
// exact linear form beyond the support.  Both scattering-length extractions
// are populated; residual must come out below tol.
ScatteringSolution solve_zero_energy(const Potential& pot, double r_max, double tol);

// Radial Fourier transform (4*pi/|p|) int r V(r) sin(|p| r) dr, continuous at
// p = 0.
double fourier_transform_radial(const Potential& pot, double p_abs);

struct BornTerms {
    double a0 = 0.0;
    double a1 = 0.0;                // continuum momentum integral
    double a1_box = 0.0;            // finite-box sum over the supplied shells
    double a1_tail_bound = 0.0;     // continuum quadrature tail
    double a1_box_tail_bound = 0.0; // shell-cutoff tail of the box sum
    bool tail_ok = true;            // both tails below the requested tolerance
};

// First two Born terms.  a0 = Vhat(0)/(8 pi).  a1 is the continuum second
// Born term -(16 pi)^-1 (2 pi)^-3 int Vhat(p)^2/p^2 d^3p, which is the
// coefficient of lambda^2 in the expansion of the scattering length; a1_box
// is the finite-box analogue -(16 pi)^-1 sum over nonzero lattice momenta of
// Vhat(p)^2/p^2, evaluated on the supplied shell table.
BornTerms born_terms(const Potential& pot, const ShellTable& shells, double tail_tol = 1e-6);

struct EtaTable {
    int N = 0;
    std::map<int, double> values;  // shell |n|^2 -> eta
    double decay_constant = 0.0;   // max |eta| * p^2 over tabulated shells

    double at(int norm_sq_int) const;
};

// Pair-correlation coefficients eta_p = -N * what(p) where w = 1 - f(N .)
// and what is its radial transform, with the 1/r far tail integrated in
// closed form.
EtaTable eta_coefficients(const ScatteringSolution& sol, int N, const ShellTable& shells);

void write_scattering_csv(std::ostream& os, const ScatteringSolution& sol);

} // namespace boselab

#endif
