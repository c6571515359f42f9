#ifndef BOSELAB_LATTICE_HPP
#define BOSELAB_LATTICE_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace boselab {

inline constexpr double two_pi = 6.28318530717958647692528676655900577;

// Integer label n of a momentum p = 2*pi*n on the dual lattice of the unit
// box.  All shell identities are decided in exact integer arithmetic.
struct LatticeVector {
    std::array<int, 3> n{0, 0, 0};

    int norm_sq_int() const { return n[0] * n[0] + n[1] * n[1] + n[2] * n[2]; }
    double p_sq() const { return two_pi * two_pi * norm_sq_int(); }
    double p_abs() const;
    bool is_zero() const { return n[0] == 0 && n[1] == 0 && n[2] == 0; }

    LatticeVector operator-() const { return {{-n[0], -n[1], -n[2]}}; }
    LatticeVector operator+(const LatticeVector& o) const {
        return {{n[0] + o.n[0], n[1] + o.n[1], n[2] + o.n[2]}};
    }
    LatticeVector operator-(const LatticeVector& o) const {
        return {{n[0] - o.n[0], n[1] - o.n[1], n[2] - o.n[2]}};
    }
    friend bool operator==(const LatticeVector&, const LatticeVector&) = default;
    friend auto operator<=>(const LatticeVector&, const LatticeVector&) = default;
};

// All nonzero lattice vectors sharing one integer norm |n|^2.  Degeneracy is
// zero exactly for integers of the form 4^a(8b+7).
struct Shell {
    int norm_sq_int = 0;
    std::int64_t degeneracy = 0;
    std::vector<LatticeVector> representatives; // complete unless capped at build time

    double p_sq() const { return two_pi * two_pi * norm_sq_int; }
    double p_abs() const;
};

// Complete ordered list of shells with 1 <= |n|^2 <= n_max.  Immutable.
class ShellTable {
public:
    static ShellTable build(int n_max, std::size_t representative_cap = 64);

    int n_max() const { return n_max_; }
    const std::vector<Shell>& shells() const { return shells_; }
    const Shell& shell(int norm_sq_int) const; // 1-based by norm value

private:
    int n_max_ = 0;
    std::vector<Shell> shells_;
};

struct LatticeSumResult {
    double value = 0.0;
    std::vector<double> partial_sums; // after each shell, ascending norm
};

// Sum of degeneracy * summand(shell) over shells with norm <= n_max, in fixed
// ascending-norm order with Kahan-compensated accumulation.  Bit-identical
// across runs; a non-finite summand raises numeric_error naming the shell.
LatticeSumResult lattice_sum(const std::function<double(const Shell&)>& summand,
                             const ShellTable& table, int n_max = -1);

void write_shell_csv(std::ostream& os, const ShellTable& table);

} // namespace boselab

#endif
