#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "boselab/config.hpp"
#include "boselab/errors.hpp"
#include "boselab/fock.hpp"
#include "boselab/formulas.hpp"
#include "boselab/lattice.hpp"
#include "boselab/scattering.hpp"
#include "boselab/spectrum.hpp"

using nlohmann::ordered_json;
using namespace boselab;

namespace {

constexpr const char* version = "boselab 1.0.0";

struct Options {
    std::string config_path;
    std::string out_path;
    bool csv = false;
    int threads = 1;
    std::optional<std::uint64_t> seed;
};

RunConfig load_config(const Options& opt) {
    if (opt.config_path.empty())
        throw config_error("this command requires --config <path>");
    std::ifstream in(opt.config_path);
    if (!in) throw config_error("cannot open config file '" + opt.config_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    RunConfig cfg = parse_config(buf.str());
    if (opt.seed) cfg.seed = *opt.seed;
    return cfg;
}

DispersionModel make_model(const RunConfig& cfg, const Potential& pot, double a) {
    if (cfg.dispersion == "free") return DispersionModel::free_model();
    if (cfg.dispersion == "gross_pitaevskii") return DispersionModel::gross_pitaevskii(a);
    Potential copy = pot;
    return DispersionModel::mean_field(
        [copy](double p_abs) { return fourier_transform_radial(copy, p_abs); });
}

double chosen_coupling(const RunConfig& cfg, const ScatteringSolution& sol, const BornTerms& born,
                       std::string& label) {
    if (cfg.coupling == "scattering") {
        label = "a from the zero-energy scattering solution, 8*pi*a = int V f";
        return sol.a_integral;
    }
    if (cfg.coupling == "born") {
        label = "a0 + a1: first two Born terms, a0 = Vhat(0)/(8*pi), "
                "a1 = -(16*pi)^-1 (2*pi)^-3 int Vhat(p)^2/p^2 d^3p";
        return born.a0 + born.a1;
    }
    label = "a0 = Vhat(0)/(8*pi): leading potential-transform substitution";
    return born.a0;
}

int run_scattering(const Options& opt, const RunConfig& cfg, ordered_json& rep,
                   std::string& csv_out) {
    const Potential pot = build_potential(cfg);
    const ScatteringSolution sol = solve_zero_energy(pot, cfg.r_max, cfg.tol);
    const ShellTable shells = ShellTable::build(cfg.n_max);
    const BornTerms born = born_terms(pot, shells);
    const EtaTable eta = eta_coefficients(sol, cfg.n, shells);

    ordered_json res;
    res["equation"] = "-u'' + (1/2) V u = 0, u = r f, f -> 1 at infinity";
    res["a"] = {{"value", sol.a_integral},
                {"formula", "8*pi*a = int V(x) f(x) dx"},
                {"error_estimate", sol.residual}};
    res["a_asymptotic"] = {{"value", sol.a_asymptotic},
                           {"formula", "u(r) = r - a beyond the support"},
                           {"error_estimate", std::abs(sol.a_integral - sol.a_asymptotic)}};
    res["born"] = {
        {"a0", {{"value", born.a0}, {"formula", "a0 = Vhat(0)/(8*pi)"}}},
        {"a1",
         {{"value", born.a1},
          {"formula", "a1 = -(16*pi)^-1 (2*pi)^-3 int Vhat(p)^2/p^2 d^3p"},
          {"error_estimate", born.a1_tail_bound}}},
        {"a1_box",
         {{"value", born.a1_box},
          {"formula", "a1_box = -(16*pi)^-1 sum_{0 != p in 2*pi*Z^3} Vhat(p)^2/p^2"},
          {"error_estimate", born.a1_box_tail_bound}}},
        {"tail_ok", born.tail_ok}};
    res["eta_decay_constant"] = {{"value", eta.decay_constant},
                                 {"formula", "max over shells of |eta_p| * p^2"}};
    rep["results"] = res;

    std::ostringstream csv;
    write_scattering_csv(csv, sol);
    csv_out = csv.str();
    (void)opt;
    return 0;
}

int run_constants(const Options& opt, const RunConfig& cfg, ordered_json& rep,
                  std::string& csv_out) {
    const ELambdaResult avg = e_lambda(cfg.e_lambda_m_max, ELambdaScheme::cube_cutoff_average);
    const ELambdaResult rich = e_lambda(cfg.e_lambda_m_max, ELambdaScheme::richardson);
    const ELambdaResult cert = e_lambda_certified(cfg.e_lambda_m_max);

    ordered_json res;
    res["equation"] = "e_Lambda = 2 - lim_{M->inf} sum_{0 != n in Z^3, |n_i| <= M} cos(|n|)/n^2";
    res["cube_cutoff_average"] = {{"value", avg.value}, {"error_estimate", avg.error_estimate}};
    res["richardson"] = {{"value", rich.value}, {"error_estimate", rich.error_estimate}};
    res["certified"] = {{"value", cert.value}, {"error_estimate", cert.error_estimate}};
    rep["results"] = res;

    std::ostringstream csv;
    csv << "scheme,value,error_estimate\n";
    csv << "cube_cutoff_average," << avg.value << ',' << avg.error_estimate << '\n';
    csv << "richardson," << rich.value << ',' << rich.error_estimate << '\n';
    csv << "certified," << cert.value << ',' << cert.error_estimate << '\n';
    csv_out = csv.str();
    (void)opt;
    return 0;
}

int run_energy(const Options& opt, const RunConfig& cfg, ordered_json& rep, std::string& csv_out) {
    const Potential pot = build_potential(cfg);
    const ScatteringSolution sol = solve_zero_energy(pot, cfg.r_max, cfg.tol);
    const ShellTable shells = ShellTable::build(cfg.n_max);
    const BornTerms born = born_terms(pot, shells);

    std::string label;
    const double a = chosen_coupling(cfg, sol, born, label);
    const ELambdaResult el = e_lambda_certified(cfg.e_lambda_m_max);
    const CorrectionSum corr = correction_sum(a, shells);
    const EnergyBreakdown eb = ground_state_energy(cfg.n, a, el.value, corr);

    ordered_json res;
    res["equation"] =
        "E_N = 4*pi*(N-1)*a + e_Lambda*a^2 - (1/2) sum_{0 != p} [p^2 + 8*pi*a "
        "- sqrt(p^4 + 16*pi*a*p^2) - (8*pi*a)^2/(2*p^2)]";
    res["coupling_used"] = label;
    res["a"] = a;
    res["e_lambda"] = {{"value", el.value}, {"error_estimate", el.error_estimate}};
    res["term_main"] = {{"value", eb.term_main}, {"formula", "4*pi*(N-1)*a"}};
    res["term_boundary"] = {{"value", eb.term_boundary}, {"formula", "e_Lambda*a^2"}};
    res["term_correction"] = {{"value", eb.term_correction},
                              {"formula", "-(1/2) lattice sum of the correction summand"},
                              {"error_estimate", eb.tail_bound}};
    res["total"] = {{"value", eb.total}, {"error_estimate", eb.tail_bound + el.error_estimate}};
    rep["results"] = res;

    std::ostringstream csv;
    csv << "term,value\n";
    csv << "term_main," << eb.term_main << '\n';
    csv << "term_boundary," << eb.term_boundary << '\n';
    csv << "term_correction," << eb.term_correction << '\n';
    csv << "total," << eb.total << '\n';
    csv_out = csv.str();
    (void)opt;
    return 0;
}

int run_spectrum(const Options& opt, const RunConfig& cfg, ordered_json& rep,
                 std::string& csv_out) {
    const ShellTable shells = ShellTable::build(cfg.n_max);
    double a = 0.0;
    Potential pot = Potential::square_well(1.0, 1.0);
    if (cfg.dispersion != "free") {
        pot = build_potential(cfg);
        if (cfg.dispersion == "gross_pitaevskii") {
            const ScatteringSolution sol = solve_zero_energy(pot, cfg.r_max, cfg.tol);
            a = sol.a_integral;
        }
    }
    SpectrumRequest req;
    req.model = make_model(cfg, pot, a);
    req.zeta = cfg.zeta;
    req.shells = &shells;
    const std::vector<SpectrumLine> lines = enumerate_spectrum(req);

    ordered_json res;
    res["equation"] = "eigenvalues sum_p n_p E(p) <= zeta; "
                      "E(p) = sqrt(p^4 + 16*pi*a*p^2) in the interacting model";
    res["a"] = a;
    res["zeta"] = cfg.zeta;
    res["line_count"] = lines.size();
    ordered_json table = ordered_json::array();
    for (const SpectrumLine& line : lines) {
        ordered_json l;
        l["energy"] = line.energy;
        l["multiplicity"] = line.multiplicity;
        ordered_json comp = ordered_json::array();
        for (auto [norm, occ] : line.composition) comp.push_back({{"shell", norm}, {"occ", occ}});
        l["composition"] = comp;
        if (line.proximity_warning) l["proximity_warning"] = true;
        table.push_back(l);
    }
    res["lines"] = table;
    rep["results"] = res;

    std::ostringstream csv;
    write_spectrum_csv(csv, lines);
    csv_out = csv.str();
    (void)opt;
    return 0;
}

int run_simulate(const Options& opt, const RunConfig& cfg, ordered_json& rep,
                 std::string& csv_out) {
    const Potential pot = build_potential(cfg);
    const int N = cfg.fock_n;
    const std::size_t cap = static_cast<std::size_t>(cfg.dim_cap);

    const ModeSet modes = ModeSet::from_shells(cfg.max_norm_sq, true);
    const FockBasis full = FockBasis::build(modes, N, Sector::fixed_total, cap);
    const FockBasis plus =
        FockBasis::build(modes.without_zero(), N, Sector::excitation_truncated, cap);
    const HamiltonianResult ham = build_hamiltonian(pot, N, full);
    const ExcitationMap map = excitation_map(full, plus);

    // vacuum of excitations = all N particles in the zero mode
    std::vector<int> condensate(modes.size(), 0);
    condensate[0] = N;
    const std::size_t vac = *full.index_of(condensate);
    const double vacuum_energy =
        ham.op.m(static_cast<Eigen::Index>(vac), static_cast<Eigen::Index>(vac));
    const double vhat0 = fourier_transform_radial(pot, 0.0);

    OperatorMatrix h_plus(plus);
    h_plus.m = map.u * ham.op.m * map.u.transpose();

    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(cfg.k_eigenvalues),
                                                plus.dim());
    const SpectrumResult base_spec = exact_spectrum(h_plus, k);

    ordered_json res;
    res["equation"] = "H = sum_p p^2 a*_p a_p + (2N)^-1 sum_{p,q,r} Vhat(r/N) "
                      "a*_{p+r} a*_q a_p a_{q+r}";
    res["n"] = N;
    res["modes"] = modes.size();
    res["dim_fixed_total"] = full.dim();
    res["dim_excitation"] = plus.dim();
    res["dropped_terms"] = ham.dropped_terms;
    res["hermiticity_defect"] = ham.op.hermiticity_defect();
    res["vacuum_energy"] = {{"value", vacuum_energy},
                            {"formula", "<cond| H |cond> = (N-1)*Vhat(0)/2"},
                            {"expected", (N - 1) * vhat0 / 2.0},
                            {"error_estimate", std::abs(vacuum_energy - (N - 1) * vhat0 / 2.0)}};

    ordered_json spec0 = ordered_json::array();
    for (std::size_t i = 0; i < k; ++i)
        spec0.push_back({{"eigenvalue", base_spec.eigenvalues[i]},
                         {"residual", base_spec.residuals[i]}});
    res["spectrum"] = spec0;

    if (cfg.generator != "none") {
        const ScatteringSolution sol = solve_zero_energy(pot, cfg.r_max, cfg.tol);
        const ShellTable small = ShellTable::build(cfg.max_norm_sq);
        const EtaTable eta = eta_coefficients(sol, N, small);

        GeneratorSpec gspec;
        gspec.kind = cfg.generator == "b_eta"    ? GeneratorSpec::Kind::b_eta
                     : cfg.generator == "b_tau"  ? GeneratorSpec::Kind::b_tau
                     : cfg.generator == "cubic_a" ? GeneratorSpec::Kind::cubic_a
                                                  : GeneratorSpec::Kind::cubic_atilde;
        gspec.coeff = eta.values;
        gspec.high_min_norm_sq = cfg.high_min_norm_sq;
        gspec.low_max_norm_sq = cfg.low_max_norm_sq;
        gspec.pref = cfg.b_prefactor == "inv_n" ? BPrefactor::inv_n : BPrefactor::inv_sqrt_n;
        const OperatorMatrix g = build_generator(gspec, plus, N);

        const ConjugationMethod method = cfg.conjugation == "truncated_bch"
                                             ? ConjugationMethod::truncated_bch
                                             : ConjugationMethod::exact_expm;
        const ConjugationResult conj = conjugate(h_plus, g, method, cfg.bch_order);
        const SpectrumResult conj_spec = exact_spectrum(conj.h, k);
        double drift = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            drift = std::max(drift,
                             std::abs(conj_spec.eigenvalues[i] - base_spec.eigenvalues[i]));
        ordered_json cj;
        cj["generator"] = cfg.generator;
        cj["method"] = cfg.conjugation;
        cj["anti_hermiticity_defect"] = g.anti_hermiticity_defect();
        cj["spectrum_drift"] = drift;
        if (method == ConjugationMethod::truncated_bch) cj["bch_remainder"] = conj.bch_remainder;
        ordered_json spec1 = ordered_json::array();
        for (std::size_t i = 0; i < k; ++i)
            spec1.push_back({{"eigenvalue", conj_spec.eigenvalues[i]},
                             {"residual", conj_spec.residuals[i]}});
        cj["spectrum"] = spec1;
        res["conjugation"] = cj;
    }

    if (cfg.random_states > 0) {
        // unitarity and depletion identity <psi| U* N_plus U |psi> = <psi| (N - a*_0 a_0) |psi>
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> gauss;
        const Eigen::MatrixXd nplus_full =
            map.u.transpose() * excitation_number_op(plus).m * map.u;
        const Eigen::MatrixXd n0 = hop_op(full, modes.modes()[0], modes.modes()[0]).m;
        double max_unitary = 0.0, max_identity = 0.0;
        for (int t = 0; t < cfg.random_states; ++t) {
            Eigen::VectorXd psi(static_cast<Eigen::Index>(full.dim()));
            for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = gauss(rng);
            psi.normalize();
            max_unitary =
                std::max(max_unitary, (map.u.transpose() * (map.u * psi) - psi).norm());
            const double lhs = psi.dot(nplus_full * psi);
            const double rhs = N - psi.dot(n0 * psi);
            max_identity = std::max(max_identity, std::abs(lhs - rhs));
        }
        res["random_state_checks"] = {
            {"states", cfg.random_states},
            {"seed", cfg.seed},
            {"max_unitarity_defect", max_unitary},
            {"max_depletion_identity_defect", max_identity},
            {"formula", "<psi| U* N_+ U |psi> = N - <psi| a*_0 a_0 |psi>"}};
    }
    rep["results"] = res;

    std::ostringstream csv;
    csv << "index,eigenvalue,residual\n";
    for (std::size_t i = 0; i < k; ++i)
        csv << i << ',' << base_spec.eigenvalues[i] << ',' << base_spec.residuals[i] << '\n';
    csv_out = csv.str();
    (void)opt;
    return 0;
}

void emit(const Options& opt, const ordered_json& rep, const std::string& csv) {
    std::string text;
    if (opt.csv) {
        text = csv;
    } else {
        text = rep.dump(2);
        text += '\n';
    }
    if (!opt.out_path.empty()) {
        std::ofstream out(opt.out_path, std::ios::binary);
        if (!out) throw config_error("cannot open output file '" + opt.out_path + "'");
        out << text;
    } else {
        std::cout << text;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"boselab: Bogoliubov theory of the dilute Bose gas in a unit box"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    app.add_option("--config", opt.config_path, "sectioned key = value config file");
    app.add_flag("--csv", opt.csv, "emit CSV instead of the JSON report");
    app.add_option("--out", opt.out_path, "write output to this path instead of stdout");
    app.add_option("--threads", opt.threads, "thread budget for the linear algebra backend");
    std::uint64_t seed_val = 0;
    auto* seed_opt = app.add_option("--seed", seed_val, "seed for random test states");

    CLI::App* cmd_scattering = app.add_subcommand("scattering", "zero-energy scattering and Born terms");
    CLI::App* cmd_constants = app.add_subcommand("constants", "the boundary constant e_Lambda");
    CLI::App* cmd_energy = app.add_subcommand("energy", "ground-state energy breakdown");
    CLI::App* cmd_spectrum = app.add_subcommand("spectrum", "excitation spectrum below a threshold");
    CLI::App* cmd_simulate = app.add_subcommand("simulate", "truncated Fock-space pipeline");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (seed_opt->count()) opt.seed = seed_val;
    Eigen::setNbThreads(opt.threads);

    const auto t0 = std::chrono::steady_clock::now();
    try {
        RunConfig cfg;
        std::string command;
        if (cmd_scattering->parsed()) command = "scattering";
        else if (cmd_constants->parsed()) command = "constants";
        else if (cmd_energy->parsed()) command = "energy";
        else if (cmd_spectrum->parsed()) command = "spectrum";
        else command = "simulate";

        if (command == "constants" && opt.config_path.empty()) {
            cfg.potential_kind = "square_well"; // unused by this command
            cfg.depth = 1.0;
            cfg.radius = 1.0;
        } else {
            cfg = load_config(opt);
        }

        ordered_json rep;
        rep["command"] = command;
        rep["version"] = version;
        rep["inputs"] = emit_effective_config(cfg);

        std::string csv;
        if (command == "scattering") run_scattering(opt, cfg, rep, csv);
        else if (command == "constants") run_constants(opt, cfg, rep, csv);
        else if (command == "energy") run_energy(opt, cfg, rep, csv);
        else if (command == "spectrum") run_spectrum(opt, cfg, rep, csv);
        else run_simulate(opt, cfg, rep, csv);

        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep["wall_time_s"] = wall;
        emit(opt, rep, csv);
        return 0;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const resource_error& e) {
        std::cerr << "resource error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
