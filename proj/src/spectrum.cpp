#include "boselab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include "boselab/errors.hpp"

namespace boselab {

std::uint64_t binomial_checked(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > UINT64_MAX) throw resource_error("binomial_checked: multiplicity overflow");
    }
    return static_cast<std::uint64_t>(r);
}

namespace {

using Composition = std::vector<std::pair<int, int>>;

struct LineAccumulator {
    // Free-model lines merge on the exact integer energy key; otherwise each
    // distinct shell composition is its own line.
    bool integer_keyed = false;
    std::map<std::int64_t, SpectrumLine> by_key;
    std::map<Composition, SpectrumLine> by_comp;

    void add(double energy, std::int64_t key, const Composition& comp, std::uint64_t mult) {
        if (integer_keyed) {
            auto [it, fresh] = by_key.try_emplace(key);
            SpectrumLine& line = it->second;
            if (fresh) {
                line.energy = energy;
                line.composition = comp;
                line.multiplicity = mult;
            } else {
                const unsigned __int128 m =
                    static_cast<unsigned __int128>(line.multiplicity) + mult;
                if (m > UINT64_MAX) throw resource_error("spectrum: multiplicity overflow");
                line.multiplicity = static_cast<std::uint64_t>(m);
            }
        } else {
            auto [it, fresh] = by_comp.try_emplace(comp);
            SpectrumLine& line = it->second;
            if (fresh) {
                line.energy = energy;
                line.composition = comp;
                line.multiplicity = mult;
            } else {
                const unsigned __int128 m =
                    static_cast<unsigned __int128>(line.multiplicity) + mult;
                if (m > UINT64_MAX) throw resource_error("spectrum: multiplicity overflow");
                line.multiplicity = static_cast<std::uint64_t>(m);
            }
        }
    }

    std::vector<SpectrumLine> finish() {
        std::vector<SpectrumLine> lines;
        if (integer_keyed)
            for (auto& [k, line] : by_key) lines.push_back(std::move(line));
        else
            for (auto& [c, line] : by_comp) lines.push_back(std::move(line));
        std::stable_sort(lines.begin(), lines.end(),
                         [](const SpectrumLine& x, const SpectrumLine& y) {
                             return x.energy < y.energy;
                         });
        if (!integer_keyed) {
            for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
                const double e0 = lines[i].energy, e1 = lines[i + 1].energy;
                if (std::abs(e1 - e0) <= 1e-9 * std::max(1.0, std::abs(e1))) {
                    lines[i].proximity_warning = true;
                    lines[i + 1].proximity_warning = true;
                }
            }
        }
        return lines;
    }
};

} // namespace

std::vector<SpectrumLine> enumerate_spectrum(const SpectrumRequest& req) {
    if (!req.shells) throw std::invalid_argument("enumerate_spectrum: missing shell table");
    if (!(req.zeta > 0)) throw std::invalid_argument("enumerate_spectrum: zeta must be > 0");
    const ShellTable& table = *req.shells;
    if (req.model.energy(table.n_max()) <= req.zeta)
        throw std::invalid_argument(
            "enumerate_spectrum: shell table too shallow for the requested threshold");

    struct Entry {
        int norm = 0;
        std::int64_t degeneracy = 0;
        double energy = 0.0;
    };
    std::vector<Entry> entries;
    for (const Shell& s : table.shells()) {
        if (s.degeneracy == 0) continue;
        const double e = req.model.energy(s.norm_sq_int);
        if (e <= req.zeta) entries.push_back({s.norm_sq_int, s.degeneracy, e});
    }
    // Cheapest remaining single quantum, for pruning when the dispersion is
    // not monotone in the shell norm.
    std::vector<double> suffix_min(entries.size() + 1, INFINITY);
    for (std::size_t i = entries.size(); i-- > 0;)
        suffix_min[i] = std::min(entries[i].energy, suffix_min[i + 1]);

    LineAccumulator acc;
    acc.integer_keyed = (req.model.variant == DispersionModel::Variant::free);

    Composition comp;
    std::int64_t key = 0;
    double energy = 0.0;
    std::uint64_t mult = 1;

    std::function<void(std::size_t)> walk = [&](std::size_t i) {
        if (i == entries.size()) {
            acc.add(energy, key, comp, mult);
            return;
        }
        if (suffix_min[i] > req.zeta - energy + 1e-12 * std::max(1.0, req.zeta)) {
            acc.add(energy, key, comp, mult);
            return;
        }
        const Entry& s = entries[i];
        const std::uint64_t d = static_cast<std::uint64_t>(s.degeneracy);
        walk(i + 1); // m = 0
        const double saved_energy = energy;
        const std::int64_t saved_key = key;
        const std::uint64_t saved_mult = mult;
        for (int m = 1;; ++m) {
            const double e = saved_energy + m * s.energy;
            if (e > req.zeta * (1.0 + 1e-12)) break;
            energy = e;
            key = saved_key + static_cast<std::int64_t>(m) * s.norm;
            const std::uint64_t shell_mult =
                binomial_checked(static_cast<std::uint64_t>(m) + d - 1, d - 1);
            const unsigned __int128 total =
                static_cast<unsigned __int128>(saved_mult) * shell_mult;
            if (total > UINT64_MAX) throw resource_error("enumerate_spectrum: multiplicity overflow");
            mult = static_cast<std::uint64_t>(total);
            comp.emplace_back(s.norm, m);
            walk(i + 1);
            comp.pop_back();
        }
        energy = saved_energy;
        key = saved_key;
        mult = saved_mult;
    };
    walk(0);
    return acc.finish();
}

std::vector<SpectrumLine> brute_force_spectrum(const DispersionModel& model,
                                               const std::vector<LatticeVector>& modes,
                                               double zeta) {
    for (const LatticeVector& m : modes)
        if (m.is_zero())
            throw std::invalid_argument("brute_force_spectrum: zero mode not allowed");

    std::vector<double> energies(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) energies[i] = model.energy(modes[i].norm_sq_int());

    LineAccumulator acc;
    acc.integer_keyed = (model.variant == DispersionModel::Variant::free);

    std::vector<int> occ(modes.size(), 0);
    std::uint64_t visited = 0;
    constexpr std::uint64_t state_cap = 100000000;

    std::function<void(std::size_t, double)> walk = [&](std::size_t i, double energy) {
        if (i == modes.size()) {
            if (++visited > state_cap)
                throw resource_error("brute_force_spectrum: search space exceeds cap");
            std::map<int, int> shell_occ;
            std::int64_t key = 0;
            for (std::size_t j = 0; j < modes.size(); ++j)
                if (occ[j] > 0) {
                    shell_occ[modes[j].norm_sq_int()] += occ[j];
                    key += static_cast<std::int64_t>(occ[j]) * modes[j].norm_sq_int();
                }
            Composition comp(shell_occ.begin(), shell_occ.end());
            acc.add(energy, key, comp, 1);
            return;
        }
        for (int m = 0;; ++m) {
            const double e = energy + m * energies[i];
            if (e > zeta * (1.0 + 1e-12)) break;
            occ[i] = m;
            walk(i + 1, e);
        }
        occ[i] = 0;
    };
    walk(0, 0.0);
    return acc.finish();
}

void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumLine>& lines) {
    os << "energy,multiplicity,composition\n";
    for (const SpectrumLine& line : lines) {
        os << line.energy << ',' << line.multiplicity << ',';
        for (std::size_t i = 0; i < line.composition.size(); ++i) {
            if (i) os << ';';
            os << line.composition[i].first << 'x' << line.composition[i].second;
        }
        os << '\n';
    }
}

} // namespace boselab
