#ifndef BOSELAB_SPECTRUM_HPP
#define BOSELAB_SPECTRUM_HPP

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "boselab/formulas.hpp"
#include "boselab/lattice.hpp"

namespace boselab {

// One excitation-spectrum eigenvalue with its exact combinatorial
// multiplicity and a representative shell occupation.
struct SpectrumLine {
    double energy = 0.0;
    std::uint64_t multiplicity = 0;
    std::vector<std::pair<int, int>> composition; // (shell |n|^2, total occupation)
    bool proximity_warning = false; // a distinct line lies suspiciously close
};

struct SpectrumRequest {
    DispersionModel model;
    double zeta = 0.0; // inclusive threshold on the total energy
    const ShellTable* shells = nullptr;
};

// All eigenvalues sum over shells of m_s E_s <= zeta with exact
// multiplicities.  Lines are merged on the exact integer energy key for the
// free model and on identical shell composition otherwise; multiplicities
// are products of per-shell mode compositions C(m+d-1, d-1).
std::vector<SpectrumLine> enumerate_spectrum(const SpectrumRequest& req);

// Direct enumeration over an explicit mode list; the oracle for
// enumerate_spectrum on small instances.
std::vector<SpectrumLine> brute_force_spectrum(const DispersionModel& model,
                                               const std::vector<LatticeVector>& modes,
                                               double zeta);

std::uint64_t binomial_checked(std::uint64_t n, std::uint64_t k);

void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumLine>& lines);

} // namespace boselab

#endif
