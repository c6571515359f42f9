// Acceptance gate: one PASS/FAIL line per criterion, exit = number of failures.
// argv[1] = path to the boselab CLI binary (used by the determinism criterion).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "boselab/fock.hpp"
#include "boselab/formulas.hpp"
#include "boselab/lattice.hpp"
#include "boselab/scattering.hpp"
#include "boselab/spectrum.hpp"

using namespace boselab;

namespace {

constexpr double pi = std::numbers::pi;
int failures = 0;

void verdict(int id, bool ok, const std::string& what) {
    std::printf("%s: criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- criterion 1
void scattering_closed_form() {
    const auto t0 = std::chrono::steady_clock::now();
    const Potential pot = Potential::square_well(2.0, 1.0);
    const ScatteringSolution sol = solve_zero_energy(pot, 8.0, 1e-10);
    const double exact = 1.0 - std::tanh(1.0);
    const double rel_i = std::abs(sol.a_integral - exact) / exact;
    const double rel_s = std::abs(sol.a_asymptotic - exact) / exact;
    const double cross = std::abs(sol.a_integral - sol.a_asymptotic);
    const double dt = seconds_since(t0);
    std::ostringstream msg;
    msg << "square well a vs 1-tanh(1): rel err " << rel_i << " (integral), " << rel_s
        << " (asymptotic), cross " << cross << ", " << dt << " s";
    verdict(1, rel_i <= 1e-8 && rel_s <= 1e-8 && cross <= 1e-6 && dt < 1.0, msg.str());
}

// ---------------------------------------------------------------- criterion 2
void born_remainder_slope() {
    const auto t0 = std::chrono::steady_clock::now();
    const Potential base = Potential::square_well(2.0, 1.0);
    const ShellTable shells = ShellTable::build(40);
    const BornTerms born = born_terms(base, shells);
    std::vector<double> lx, ly;
    for (int k = 4; k <= 10; ++k) {
        const double lambda = std::ldexp(1.0, -k);
        const ScatteringSolution sol =
            solve_zero_energy(Potential::scaled(lambda, base), 4.0, 1e-13);
        const double rem = std::abs(sol.a_integral - lambda * born.a0 - lambda * lambda * born.a1);
        lx.push_back(std::log(lambda));
        ly.push_back(std::log(rem));
    }
    // least-squares slope of log remainder vs log lambda
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(lx.size());
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double dt = seconds_since(t0);
    std::ostringstream msg;
    msg << "Born remainder log-log slope " << slope << " (a0 = " << born.a0 << ", a1 = " << born.a1
        << "), " << dt << " s";
    verdict(2, slope >= 2.7 && std::abs(born.a0 - 1.0 / 3.0) < 1e-9 && dt < 10.0, msg.str());
}

// ---------------------------------------------------------------- criterion 3
void e_lambda_schemes() {
    const auto t0 = std::chrono::steady_clock::now();
    const ELambdaResult avg = e_lambda(200, ELambdaScheme::cube_cutoff_average);
    const ELambdaResult rich = e_lambda(200, ELambdaScheme::richardson);
    const double spread = std::abs(avg.value - rich.value);
    const double pinned = 10.413632917587; // regression constant from the first oracle run
    const double drift = std::abs(avg.value - pinned);
    const double dt = seconds_since(t0);
    std::ostringstream msg;
    msg << "e_Lambda schemes " << avg.value << " / " << rich.value << ", spread " << spread
        << ", drift from pinned value " << drift << ", " << dt << " s";
    verdict(3, spread <= 1e-3 && drift <= 1e-4 && dt < 60.0, msg.str());
}

// ---------------------------------------------------------------- criterion 4
void correction_asymptote() {
    const double a = 0.1;
    const double g = 8.0 * pi * a;
    bool ratio_ok = true;
    for (int shell = 51; shell <= 100; ++shell) {
        const double p_sq = two_pi * two_pi * shell;
        const double asym = -(g * g * g) / (2.0 * p_sq * p_sq);
        const double ratio = correction_summand(a, p_sq) / asym;
        ratio_ok = ratio_ok && std::abs(ratio - 1.0) <= 0.01;
    }
    bool tail_ok = true;
    const std::vector<int> cuts = {20, 30, 45, 60, 90};
    std::vector<CorrectionSum> sums;
    std::vector<ShellTable> tables;
    for (int c : cuts) tables.push_back(ShellTable::build(c));
    for (const auto& t : tables) sums.push_back(correction_sum(a, t));
    for (std::size_t i = 0; i < cuts.size(); ++i)
        for (std::size_t j = i + 1; j < cuts.size(); ++j)
            tail_ok = tail_ok && std::abs(sums[j].value - sums[i].value) <= sums[i].tail_bound;
    std::ostringstream msg;
    msg << "correction summand asymptote within 1% beyond shell 50 (" << (ratio_ok ? "yes" : "no")
        << "), tail bound covers all nested cutoffs (" << (tail_ok ? "yes" : "no") << ")";
    verdict(4, ratio_ok && tail_ok, msg.str());
}

// ---------------------------------------------------------------- criterion 5
struct PairingResult {
    double ground_err, gap_err;
};

PairingResult pairing_errors(int cap) {
    const LatticeVector e1{{1, 0, 0}};
    const ModeSet pair = ModeSet::from_vectors({e1, -e1});
    const FockBasis basis = FockBasis::build(pair, cap, Sector::excitation_truncated);
    const Eigen::MatrixXd ap = ladder_op(basis, e1, Ladder::a).m;
    const Eigen::MatrixXd am = ladder_op(basis, -e1, Ladder::a).m;
    OperatorMatrix h(basis);
    h.m = 2.0 * (ap.transpose() * ap + am.transpose() * am) +
          1.0 * (ap.transpose() * am.transpose() + am * ap);
    const SpectrumResult s = exact_spectrum(h, 2);
    const double root3 = std::sqrt(3.0);
    return {std::abs(s.eigenvalues[0] - (root3 - 2.0)),
            std::abs(s.eigenvalues[1] - s.eigenvalues[0] - root3)};
}

void bogoliubov_two_mode() {
    const PairingResult r20 = pairing_errors(20);
    const PairingResult r40 = pairing_errors(40);
    const QuadDiagonalization d = quad_diagonalize(2.0, 1.0);
    const bool closed = std::abs(d.ground_shift - (std::sqrt(3.0) - 2.0)) < 1e-14 &&
                        std::abs(d.eps - std::sqrt(3.0)) < 1e-14;
    const bool converges = r40.ground_err <= r20.ground_err && r40.gap_err <= r20.gap_err;
    std::ostringstream msg;
    msg << "two-mode pairing (A=2,B=1): ground err " << r20.ground_err << " -> " << r40.ground_err
        << ", gap err " << r20.gap_err << " -> " << r40.gap_err << " under cap doubling";
    verdict(5, r20.ground_err <= 1e-6 && r20.gap_err <= 1e-6 && converges && closed, msg.str());
}

// ---------------------------------------------------------------- criterion 6
void spectrum_oracle() {
    const ShellTable shells = ShellTable::build(12);
    std::size_t total_lines = 0;
    bool all_equal = true;
    bool collision_seen = false;
    for (double zeta_mult : {1.5, 2.5, 3.5, 4.2, 5.2, 6.5, 8.0, 9.5}) {
        for (int variant = 0; variant < 2; ++variant) {
            SpectrumRequest req;
            req.model = variant == 0 ? DispersionModel::free_model()
                                     : DispersionModel::gross_pitaevskii(1.0 - std::tanh(1.0));
            req.shells = &shells;
            req.zeta = zeta_mult * req.model.energy(1);
            std::vector<LatticeVector> modes;
            for (int x = -4; x <= 4; ++x)
                for (int y = -4; y <= 4; ++y)
                    for (int z = -4; z <= 4; ++z) {
                        const LatticeVector v{{x, y, z}};
                        const int n2 = v.norm_sq_int();
                        if (n2 >= 1 && req.model.energy(n2) <= req.zeta) modes.push_back(v);
                    }
            const auto fast = enumerate_spectrum(req);
            const auto brute = brute_force_spectrum(req.model, modes, req.zeta);
            total_lines += fast.size();
            bool same = fast.size() == brute.size();
            for (std::size_t i = 0; same && i < fast.size(); ++i)
                same = std::abs(fast[i].energy - brute[i].energy) <= 1e-9 &&
                       fast[i].multiplicity == brute[i].multiplicity;
            all_equal = all_equal && same;
            if (variant == 0 && zeta_mult > 2.0)
                for (const auto& line : fast)
                    if (std::abs(line.energy - 2.0 * two_pi * two_pi) < 1e-9)
                        collision_seen = collision_seen || line.multiplicity == 33;
        }
    }
    std::ostringstream msg;
    msg << "enumerate vs brute force: " << total_lines << " lines across 16 configurations, "
        << (all_equal ? "all multisets equal" : "MISMATCH") << ", shell-1/shell-2 collision mult 33 "
        << (collision_seen ? "seen" : "missing");
    verdict(6, all_equal && collision_seen && total_lines >= 200, msg.str());
}

// ---------------------------------------------------------------- criterion 7
void excitation_map_identities() {
    const int N = 4;
    const LatticeVector e1{{1, 0, 0}}, e2{{0, 1, 0}}, zero{};
    const ModeSet modes = ModeSet::from_vectors({zero, e1, -e1, e2});
    const FockBasis full = FockBasis::build(modes, N, Sector::fixed_total);
    const FockBasis plus =
        FockBasis::build(modes.without_zero(), N, Sector::excitation_truncated);
    const ExcitationMap map = excitation_map(full, plus);
    const Eigen::MatrixXd& u = map.u;
    const Eigen::Index dim = static_cast<Eigen::Index>(plus.dim());

    Eigen::MatrixXd sqrt_dep = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t i = 0; i < plus.dim(); ++i)
        sqrt_dep(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
            std::sqrt(static_cast<double>(N - plus.excitation_count(i)));

    const double d1 = (u * hop_op(full, zero, zero).m * u.transpose() -
                       (N * Eigen::MatrixXd::Identity(dim, dim) - excitation_number_op(plus).m))
                          .cwiseAbs()
                          .maxCoeff();
    const double d2 = (u * hop_op(full, e1, zero).m * u.transpose() -
                       ladder_op(plus, e1, Ladder::a_dag).m * sqrt_dep)
                          .cwiseAbs()
                          .maxCoeff();
    const double d3 = (u * hop_op(full, zero, e1).m * u.transpose() -
                       sqrt_dep * ladder_op(plus, e1, Ladder::a).m)
                          .cwiseAbs()
                          .maxCoeff();
    const double d4 = (u * hop_op(full, e1, e2).m * u.transpose() -
                       ladder_op(plus, e1, Ladder::a_dag).m * ladder_op(plus, e2, Ladder::a).m)
                          .cwiseAbs()
                          .maxCoeff();

    const Potential pot = Potential::square_well(2.0, 1.0);
    const HamiltonianResult ham = build_hamiltonian(pot, N, full);
    std::vector<int> condensate(modes.size(), 0);
    condensate[0] = N;
    const std::size_t vac = *full.index_of(condensate);
    const double vacuum =
        ham.op.m(static_cast<Eigen::Index>(vac), static_cast<Eigen::Index>(vac));
    const double expected = (N - 1) * fourier_transform_radial(pot, 0.0) / 2.0; // = 4 pi
    const double dv = std::abs(vacuum - expected);
    const double dpi = std::abs(expected - 4.0 * pi);

    std::ostringstream msg;
    msg << "substitution-rule defects " << d1 << ", " << d2 << ", " << d3 << ", " << d4
        << "; vacuum energy defect " << dv << " against (N-1)Vhat(0)/2 = 4 pi (" << dpi << ")";
    verdict(7, d1 <= 1e-12 && d2 <= 1e-12 && d3 <= 1e-12 && d4 <= 1e-12 && dv <= 1e-10 &&
                   dpi <= 1e-10,
            msg.str());
}

// ---------------------------------------------------------------- criterion 8
void unitary_pipeline() {
    const int N = 3;
    const LatticeVector e1{{1, 0, 0}}, e2{{0, 1, 0}}, zero{};
    const LatticeVector e12 = e1 + e2;
    const ModeSet modes = ModeSet::from_vectors({zero, e1, -e1, e2, -e2, e12, -e12});
    const FockBasis full = FockBasis::build(modes, N, Sector::fixed_total);
    const FockBasis plus =
        FockBasis::build(modes.without_zero(), N, Sector::excitation_truncated);
    const ExcitationMap map = excitation_map(full, plus);
    const Potential pot = Potential::square_well(2.0, 1.0);
    const HamiltonianResult ham = build_hamiltonian(pot, N, full);
    OperatorMatrix h(plus);
    h.m = map.u * ham.op.m * map.u.transpose();
    const SpectrumResult base = exact_spectrum(h, plus.dim());

    double worst_drift = 0.0;
    double worst_anti = 0.0;
    for (auto kind : {GeneratorSpec::Kind::b_eta, GeneratorSpec::Kind::b_tau,
                      GeneratorSpec::Kind::cubic_a, GeneratorSpec::Kind::cubic_atilde}) {
        GeneratorSpec spec;
        spec.kind = kind;
        spec.coeff = {{1, 0.06}, {2, 0.025}};
        if (kind == GeneratorSpec::Kind::cubic_a || kind == GeneratorSpec::Kind::cubic_atilde) {
            spec.high_min_norm_sq = 2;
            spec.low_max_norm_sq = 1;
        }
        const OperatorMatrix g = build_generator(spec, plus, N);
        worst_anti = std::max(worst_anti, g.anti_hermiticity_defect());
        const ConjugationResult conj = conjugate(h, g, ConjugationMethod::exact_expm);
        const SpectrumResult rotated = exact_spectrum(conj.h, plus.dim());
        for (std::size_t i = 0; i < plus.dim(); ++i)
            worst_drift = std::max(worst_drift,
                                   std::abs(rotated.eigenvalues[i] - base.eigenvalues[i]));
    }

    const auto [f, gloc] = localization_ops(2.0, plus);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(f.m.rows(), f.m.cols());
    const double unity_defect = (f.m * f.m + gloc.m * gloc.m - id).cwiseAbs().maxCoeff();

    std::ostringstream msg;
    msg << "all four generator kinds: max eigenvalue drift " << worst_drift
        << " under exact conjugation, anti-hermiticity defect " << worst_anti
        << ", f_M^2 + g_M^2 - 1 defect " << unity_defect;
    verdict(8, worst_drift <= 1e-8 && worst_anti <= 1e-12 && unity_defect <= 1e-12, msg.str());
}

// ---------------------------------------------------------------- criterion 9
void phonon_linearity() {
    const double p = two_pi;
    double prev = INFINITY;
    bool monotone = true, above = true;
    double last = 0.0;
    for (int k = 1; k <= 6; ++k) {
        const double a = std::pow(10.0, k);
        const DispersionModel gp = DispersionModel::gross_pitaevskii(a);
        const double ratio = gp.energy(1) / (p * std::sqrt(16.0 * pi * a));
        above = above && ratio >= 1.0;
        monotone = monotone && ratio < prev;
        prev = ratio;
        last = ratio;
    }
    std::ostringstream msg;
    msg << "E_gp(p)/(|p| sqrt(16 pi a)) decreases to " << last
        << " from above over 6 decades of a in the phonon direction p^2/(16 pi a) -> 0";
    verdict(9, monotone && above && std::abs(last - 1.0) <= 1e-6, msg.str());
}

// --------------------------------------------------------------- criterion 10
std::string run_cli(const std::string& cli, const std::string& args, const std::string& out_file,
                    bool& ok) {
    const std::string cmd = "\"" + cli + "\" " + args + " > " + out_file + " 2>/dev/null";
    ok = std::system(cmd.c_str()) == 0;
    std::ifstream in(out_file, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    // exclude the wall-time line from the byte comparison
    std::string filtered, line;
    std::istringstream is(buf.str());
    while (std::getline(is, line))
        if (line.find("wall_time") == std::string::npos) filtered += line + "\n";
    return filtered;
}

void determinism(const char* cli_path) {
    if (!cli_path) {
        verdict(10, false, "no CLI path supplied on the command line");
        return;
    }
    const std::string cfg_path = "acceptance_tmp.cfg";
    {
        std::ofstream cfg(cfg_path);
        cfg << "[potential]\nkind = square_well\ndepth = 2\nradius = 1\n"
            << "[run]\nn = 100\n[lattice]\nn_max = 40\n";
    }
    bool ok1 = false, ok2 = false, ok3 = false;
    const std::string scatter1 =
        run_cli(cli_path, "scattering --config " + cfg_path + " --threads 1", "acc_out1.json", ok1);
    const std::string scatter4 =
        run_cli(cli_path, "scattering --config " + cfg_path + " --threads 4", "acc_out2.json", ok2);
    const std::string energy1 =
        run_cli(cli_path, "energy --config " + cfg_path + " --threads 1", "acc_out3.json", ok3);
    bool ok4 = false;
    const std::string energy4 =
        run_cli(cli_path, "energy --config " + cfg_path + " --threads 4", "acc_out4.json", ok4);

    const bool bytes_equal = scatter1 == scatter4 && energy1 == energy4;
    const bool values_present = scatter1.find("0.2384058") != std::string::npos &&
                                scatter1.find("0.333333") != std::string::npos;
    std::ostringstream msg;
    msg << "CLI byte-identical across --threads {1,4} for scattering and energy ("
        << (bytes_equal ? "yes" : "no") << "), reference values present ("
        << (values_present ? "yes" : "no") << ")";
    verdict(10, ok1 && ok2 && ok3 && ok4 && bytes_equal && values_present && !scatter1.empty(),
            msg.str());
}

} // namespace

int main(int argc, char** argv) {
    scattering_closed_form();
    born_remainder_slope();
    e_lambda_schemes();
    correction_asymptote();
    bogoliubov_two_mode();
    spectrum_oracle();
    excitation_map_identities();
    unitary_pipeline();
    phonon_linearity();
    determinism(argc > 1 ? argv[1] : nullptr);
    std::printf("%d/10 criteria passed\n", 10 - failures);
    return failures;
}
