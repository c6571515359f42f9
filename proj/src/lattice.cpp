#include "boselab/lattice.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "boselab/errors.hpp"

namespace boselab {

double LatticeVector::p_abs() const { return two_pi * std::sqrt(static_cast<double>(norm_sq_int())); }

double Shell::p_abs() const { return two_pi * std::sqrt(static_cast<double>(norm_sq_int)); }

ShellTable ShellTable::build(int n_max, std::size_t representative_cap) {
    if (n_max < 1) throw std::invalid_argument("ShellTable::build: n_max must be >= 1");

    ShellTable table;
    table.n_max_ = n_max;
    table.shells_.resize(static_cast<std::size_t>(n_max));
    for (int k = 1; k <= n_max; ++k) table.shells_[k - 1].norm_sq_int = k;

    const int limit = static_cast<int>(std::sqrt(static_cast<double>(n_max))) + 1;
    for (int x = -limit; x <= limit; ++x)
        for (int y = -limit; y <= limit; ++y)
            for (int z = -limit; z <= limit; ++z) {
                const int k = x * x + y * y + z * z;
                if (k < 1 || k > n_max) continue;
                Shell& s = table.shells_[k - 1];
                ++s.degeneracy;
                if (s.representatives.size() < representative_cap)
                    s.representatives.push_back({{x, y, z}});
            }
    return table;
}

const Shell& ShellTable::shell(int norm_sq_int) const {
    if (norm_sq_int < 1 || norm_sq_int > n_max_)
        throw std::invalid_argument("ShellTable::shell: norm out of range");
    return shells_[static_cast<std::size_t>(norm_sq_int) - 1];
}

LatticeSumResult lattice_sum(const std::function<double(const Shell&)>& summand,
                             const ShellTable& table, int n_max) {
    if (n_max < 0) n_max = table.n_max();
    if (n_max > table.n_max())
        throw std::invalid_argument("lattice_sum: n_max exceeds table depth");

    LatticeSumResult res;
    res.partial_sums.reserve(static_cast<std::size_t>(n_max));
    double sum = 0.0, comp = 0.0; // Kahan accumulator
    for (const Shell& s : table.shells()) {
        if (s.norm_sq_int > n_max) break;
        const double f = summand(s);
        if (!std::isfinite(f))
            throw numeric_error("lattice_sum: non-finite summand at shell |n|^2 = " +
                                std::to_string(s.norm_sq_int));
        const double term = static_cast<double>(s.degeneracy) * f;
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        res.partial_sums.push_back(sum);
    }
    res.value = sum;
    return res;
}

void write_shell_csv(std::ostream& os, const ShellTable& table) {
    os << "norm_sq_int,degeneracy\n";
    for (const Shell& s : table.shells())
        os << s.norm_sq_int << ',' << s.degeneracy << '\n';
}

} // namespace boselab
