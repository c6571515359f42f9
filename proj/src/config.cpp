#include "boselab/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace boselab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& v, int line) {
    std::size_t used = 0;
    double x;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        throw config_error(line, "expected a number, got '" + v + "'");
    }
    if (used != v.size()) throw config_error(line, "trailing characters in number '" + v + "'");
    return x;
}

std::int64_t parse_int(const std::string& v, int line) {
    std::size_t used = 0;
    long long x;
    try {
        x = std::stoll(v, &used);
    } catch (const std::exception&) {
        throw config_error(line, "expected an integer, got '" + v + "'");
    }
    if (used != v.size()) throw config_error(line, "trailing characters in integer '" + v + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& v, int line) {
    std::size_t used = 0;
    unsigned long long x;
    try {
        x = std::stoull(v, &used);
    } catch (const std::exception&) {
        throw config_error(line, "expected an unsigned integer, got '" + v + "'");
    }
    if (used != v.size()) throw config_error(line, "trailing characters in integer '" + v + "'");
    return x;
}

void check_choice(const std::string& v, std::initializer_list<const char*> allowed,
                  const std::string& key, int line) {
    for (const char* c : allowed)
        if (v == c) return;
    std::string msg = key + " must be one of {";
    bool first = true;
    for (const char* c : allowed) {
        if (!first) msg += ", ";
        msg += c;
        first = false;
    }
    throw config_error(line, msg + "}, got '" + v + "'");
}

void validate(const RunConfig& c) {
    if (c.potential_kind.empty())
        throw config_error("missing required field potential.kind");
    if (c.potential_kind == "square_well") {
        if (!(c.depth > 0)) throw config_error("potential.depth must be > 0");
        if (!(c.radius > 0)) throw config_error("potential.radius must be > 0");
    } else if (c.potential_kind == "tabulated") {
        if (c.grid_file.empty()) throw config_error("missing required field potential.file");
    }
    if (!(c.lambda > 0)) throw config_error("potential.lambda must be > 0");
    if (c.n < 2) throw config_error("run.n must be >= 2");
    if (!(c.r_max > 0)) throw config_error("scattering.r_max must be > 0");
    if (!(c.tol > 0)) throw config_error("scattering.tol must be > 0");
    if (c.n_max < 1) throw config_error("lattice.n_max must be >= 1");
    if (c.e_lambda_m_max < 20) throw config_error("energy.e_lambda_m_max must be >= 20");
    if (!(c.zeta > 0)) throw config_error("spectrum.zeta must be > 0");
    if (c.fock_n < 1) throw config_error("fock.n must be >= 1");
    if (c.max_norm_sq < 1) throw config_error("fock.max_norm_sq must be >= 1");
    if (c.k_eigenvalues < 1) throw config_error("fock.k must be >= 1");
    if (c.bch_order < 1) throw config_error("fock.bch_order must be >= 1");
    if (c.high_min_norm_sq < 1) throw config_error("fock.high_min_norm_sq must be >= 1");
    if (c.low_max_norm_sq < 1) throw config_error("fock.low_max_norm_sq must be >= 1");
    if (c.dim_cap < 1) throw config_error("fock.dim_cap must be >= 1");
    if (c.random_states < 0) throw config_error("fock.random_states must be >= 0");
}

} // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw config_error(line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            static const char* known[] = {"potential", "run",  "scattering", "lattice",
                                          "energy",    "spectrum", "fock",   "output"};
            bool ok = false;
            for (const char* k : known) ok = ok || section == k;
            if (!ok) throw config_error(line, "unknown section [" + section + "]");
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) throw config_error(line, "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (key.empty()) throw config_error(line, "empty key");
        if (section.empty()) throw config_error(line, "key '" + key + "' outside any section");

        const std::string full = section + "." + key;
        if (full == "potential.kind") {
            check_choice(val, {"square_well", "tabulated"}, full, line);
            c.potential_kind = val;
        } else if (full == "potential.depth") {
            c.depth = parse_double(val, line);
        } else if (full == "potential.radius") {
            c.radius = parse_double(val, line);
        } else if (full == "potential.lambda") {
            c.lambda = parse_double(val, line);
        } else if (full == "potential.file") {
            c.grid_file = val;
        } else if (full == "run.n") {
            c.n = static_cast<int>(parse_int(val, line));
        } else if (full == "run.seed") {
            c.seed = parse_u64(val, line);
        } else if (full == "scattering.r_max") {
            c.r_max = parse_double(val, line);
        } else if (full == "scattering.tol") {
            c.tol = parse_double(val, line);
        } else if (full == "lattice.n_max") {
            c.n_max = static_cast<int>(parse_int(val, line));
        } else if (full == "energy.e_lambda_m_max") {
            c.e_lambda_m_max = static_cast<int>(parse_int(val, line));
        } else if (full == "energy.coupling") {
            check_choice(val, {"scattering", "born", "potential"}, full, line);
            c.coupling = val;
        } else if (full == "spectrum.zeta") {
            c.zeta = parse_double(val, line);
        } else if (full == "spectrum.dispersion") {
            check_choice(val, {"free", "gross_pitaevskii", "mean_field"}, full, line);
            c.dispersion = val;
        } else if (full == "fock.n") {
            c.fock_n = static_cast<int>(parse_int(val, line));
        } else if (full == "fock.max_norm_sq") {
            c.max_norm_sq = static_cast<int>(parse_int(val, line));
        } else if (full == "fock.k") {
            c.k_eigenvalues = static_cast<int>(parse_int(val, line));
        } else if (full == "fock.generator") {
            check_choice(val, {"none", "b_eta", "b_tau", "cubic_a", "cubic_atilde"}, full, line);
            c.generator = val;
        } else if (full == "fock.b_prefactor") {
            check_choice(val, {"inv_sqrt_n", "inv_n"}, full, line);
            c.b_prefactor = val;
        } else if (full == "fock.conjugation") {
            check_choice(val, {"exact_expm", "truncated_bch"}, full, line);
            c.conjugation = val;
        } else if (full == "fock.bch_order") {
            c.bch_order = static_cast<int>(parse_int(val, line));
        } else if (full == "fock.high_min_norm_sq") {
            c.high_min_norm_sq = static_cast<int>(parse_int(val, line));
        } else if (full == "fock.low_max_norm_sq") {
            c.low_max_norm_sq = static_cast<int>(parse_int(val, line));
        } else if (full == "fock.dim_cap") {
            c.dim_cap = parse_int(val, line);
        } else if (full == "fock.random_states") {
            c.random_states = static_cast<int>(parse_int(val, line));
        } else if (full == "output.format") {
            check_choice(val, {"json", "csv"}, full, line);
            c.format = val;
        } else {
            throw config_error(line, "unknown key '" + full + "'");
        }
    }
    validate(c);
    return c;
}

std::string emit_effective_config(const RunConfig& c) {
    std::ostringstream out;
    auto num = [](double x) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    out << "[potential]\n";
    out << "kind = " << c.potential_kind << '\n';
    if (c.potential_kind == "tabulated") out << "file = " << c.grid_file << '\n';
    out << "depth = " << num(c.depth) << '\n';
    out << "radius = " << num(c.radius) << '\n';
    out << "lambda = " << num(c.lambda) << '\n';
    out << "\n[run]\n";
    out << "n = " << c.n << '\n';
    out << "seed = " << c.seed << '\n';
    out << "\n[scattering]\n";
    out << "r_max = " << num(c.r_max) << '\n';
    out << "tol = " << num(c.tol) << '\n';
    out << "\n[lattice]\n";
    out << "n_max = " << c.n_max << '\n';
    out << "\n[energy]\n";
    out << "e_lambda_m_max = " << c.e_lambda_m_max << '\n';
    out << "coupling = " << c.coupling << '\n';
    out << "\n[spectrum]\n";
    out << "zeta = " << num(c.zeta) << '\n';
    out << "dispersion = " << c.dispersion << '\n';
    out << "\n[fock]\n";
    out << "n = " << c.fock_n << '\n';
    out << "max_norm_sq = " << c.max_norm_sq << '\n';
    out << "k = " << c.k_eigenvalues << '\n';
    out << "generator = " << c.generator << '\n';
    out << "b_prefactor = " << c.b_prefactor << '\n';
    out << "conjugation = " << c.conjugation << '\n';
    out << "bch_order = " << c.bch_order << '\n';
    out << "high_min_norm_sq = " << c.high_min_norm_sq << '\n';
    out << "low_max_norm_sq = " << c.low_max_norm_sq << '\n';
    out << "dim_cap = " << c.dim_cap << '\n';
    out << "random_states = " << c.random_states << '\n';
    out << "\n[output]\n";
    out << "format = " << c.format << '\n';
    return out.str();
}

Potential build_potential(const RunConfig& c) {
    Potential base = [&] {
        if (c.potential_kind == "square_well") return Potential::square_well(c.depth, c.radius);
        // tabulated: two-column text r v
        std::ifstream in(c.grid_file);
        if (!in) throw config_error("cannot open potential grid file '" + c.grid_file + "'");
        std::vector<double> r, v;
        double x, y;
        while (in >> x >> y) {
            r.push_back(x);
            v.push_back(y);
        }
        if (r.size() < 2) throw config_error("potential grid file needs at least two rows");
        const double support = r.back();
        return Potential::tabulated(std::move(r), std::move(v), support);
    }();
    if (c.lambda != 1.0) return Potential::scaled(c.lambda, std::move(base));
    return base;
}

} // namespace boselab
