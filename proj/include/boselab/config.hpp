#ifndef BOSELAB_CONFIG_HPP
#define BOSELAB_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include "boselab/scattering.hpp"

namespace boselab {

// Validation failure in the config text; the message carries the line number.
class config_error : public std::invalid_argument {
public:
    config_error(int line, const std::string& what)
        : std::invalid_argument("config line " + std::to_string(line) + ": " + what),
          line_(line) {}
    explicit config_error(const std::string& what)
        : std::invalid_argument("config: " + what), line_(0) {}
    int line() const { return line_; }

private:
    int line_;
};

// Flat view of the sectioned key = value run configuration; every field has a
// default except the potential, which must be supplied.
struct RunConfig {
    // [potential]
    std::string potential_kind; // square_well | tabulated
    double depth = 0.0;
    double radius = 0.0;
    double lambda = 1.0;
    std::string grid_file;

    // [run]
    int n = 100;
    std::uint64_t seed = 0;

    // [scattering]
    double r_max = 10.0;
    double tol = 1e-10;

    // [lattice]
    int n_max = 60;

    // [energy]
    int e_lambda_m_max = 200;
    std::string coupling = "scattering"; // scattering | born | potential

    // [spectrum]
    double zeta = 40.0;
    std::string dispersion = "gross_pitaevskii"; // free | gross_pitaevskii | mean_field

    // [fock]
    int fock_n = 4;
    int max_norm_sq = 1;
    int k_eigenvalues = 6;
    std::string generator = "b_eta"; // none | b_eta | b_tau | cubic_a | cubic_atilde
    std::string b_prefactor = "inv_sqrt_n"; // inv_sqrt_n | inv_n
    std::string conjugation = "exact_expm"; // exact_expm | truncated_bch
    int bch_order = 6;
    int high_min_norm_sq = 1;
    int low_max_norm_sq = 1 << 30;
    std::int64_t dim_cap = 200000;
    int random_states = 3;

    // [output]
    std::string format = "json"; // json | csv

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Parses the sectioned key = value text; unknown sections or keys and type
// mismatches raise config_error with the offending line number.
RunConfig parse_config(const std::string& text);

// Serializes every field; parse_config(emit_effective_config(c)) == c.
std::string emit_effective_config(const RunConfig& c);

// Instantiates the configured potential, loading a grid file if needed.
Potential build_potential(const RunConfig& c);

} // namespace boselab

#endif
