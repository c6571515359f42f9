#ifndef BOSELAB_FOCK_HPP
#define BOSELAB_FOCK_HPP

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "boselab/lattice.hpp"
#include "boselab/scattering.hpp"

namespace boselab {

// Ordered list of modes; the zero mode, when present, sits at index 0.
class ModeSet {
public:
    static ModeSet from_vectors(std::vector<LatticeVector> modes);
    // All lattice vectors with 1 <= |n|^2 <= max_norm_sq, optionally preceded
    // by the zero mode.
    static ModeSet from_shells(int max_norm_sq, bool include_zero);

    const std::vector<LatticeVector>& modes() const { return modes_; }
    std::size_t size() const { return modes_.size(); }
    bool has_zero_mode() const { return !modes_.empty() && modes_[0].is_zero(); }
    bool closed_under_negation() const;
    std::optional<std::size_t> index_of(const LatticeVector& v) const;
    // Same set with the zero mode removed.
    ModeSet without_zero() const;

private:
    std::vector<LatticeVector> modes_;
    std::map<LatticeVector, std::size_t> index_;
};

enum class Sector {
    fixed_total,          // sum of occupations = N, zero mode included
    excitation_truncated, // nonzero modes only, sum of occupations <= N
};

// Occupation-number basis in lexicographic order.
class FockBasis {
public:
    static FockBasis build(ModeSet modes, int N, Sector sector, std::size_t dim_cap = 200000);

    const ModeSet& mode_set() const { return modes_; }
    Sector sector() const { return sector_; }
    int particle_number() const { return N_; }
    std::size_t dim() const { return states_.size(); }
    const std::vector<int>& occ(std::size_t i) const { return states_[i]; }
    std::optional<std::size_t> index_of(const std::vector<int>& occ) const;
    // Number of excited particles in state i (occupations outside the zero mode).
    int excitation_count(std::size_t i) const;

private:
    ModeSet modes_;
    Sector sector_ = Sector::excitation_truncated;
    int N_ = 0;
    std::vector<std::vector<int>> states_;
    std::map<std::vector<int>, std::size_t> index_;
};

// Dense real operator on a Fock basis.  All operators built here are real.
struct OperatorMatrix {
    const FockBasis* basis = nullptr;
    Eigen::MatrixXd m;

    OperatorMatrix() = default;
    explicit OperatorMatrix(const FockBasis& b)
        : basis(&b), m(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(b.dim()),
                                             static_cast<Eigen::Index>(b.dim()))) {}

    double hermiticity_defect() const;      // ||M - M^T||_max
    double anti_hermiticity_defect() const; // ||M + M^T||_max
};

enum class Ladder { a, a_dag, b, b_dag };
enum class BPrefactor { inv_sqrt_n, inv_n }; // 1/sqrt(N) (default) or the strict 1/N

OperatorMatrix ladder_op(const FockBasis& basis, const LatticeVector& mode, Ladder flavor,
                         BPrefactor pref = BPrefactor::inv_sqrt_n);

// a*_p a_q; the only a-level bilinear representable on a fixed_total basis.
OperatorMatrix hop_op(const FockBasis& basis, const LatticeVector& p, const LatticeVector& q);

// Diagonal excitation-number operator.
OperatorMatrix excitation_number_op(const FockBasis& basis);

struct HamiltonianResult {
    OperatorMatrix op;
    std::int64_t dropped_terms = 0; // interaction terms leaving the mode set
};

// Second-quantized Hamiltonian sum p^2 a*_p a_p + (2N)^-1 sum Vhat(r/N)
// a*_{p+r} a*_q a_p a_{q+r}, restricted to the mode set.
HamiltonianResult build_hamiltonian(const Potential& pot, int N, const FockBasis& basis);

// Basis isomorphism between the N-particle sector and the excitation space:
// drops the zero-mode occupation.
struct ExcitationMap {
    const FockBasis* full = nullptr; // fixed_total, zero mode present
    const FockBasis* plus = nullptr; // excitation_truncated, same nonzero modes
    Eigen::MatrixXd u;               // dim_plus x dim_full permutation
};

ExcitationMap excitation_map(const FockBasis& full, const FockBasis& plus);

struct GeneratorSpec {
    enum class Kind { b_eta, b_tau, cubic_a, cubic_atilde };

    Kind kind = Kind::b_eta;
    std::map<int, double> coeff;     // shell |n|^2 -> eta or tau
    int high_min_norm_sq = 1;        // high-momentum set: |n|^2 >= this
    int low_max_norm_sq = 1 << 30;   // low-momentum set: |n|^2 <= this
    Ladder level = Ladder::b;        // b (default) or a ladder operators for the
                                     // quadratic kinds
    BPrefactor pref = BPrefactor::inv_sqrt_n;
};

// Anti-hermitian generator of the requested kind on the excitation basis.
OperatorMatrix build_generator(const GeneratorSpec& spec, const FockBasis& basis, int N);

// Cubic interaction term with pair-correlation dressing, hermitian.
OperatorMatrix build_cubic_cn(const FockBasis& basis, int N, const Potential& pot,
                              const EtaTable& eta,
                              BPrefactor pref = BPrefactor::inv_sqrt_n);

// Smooth partition profile: 1 below 1/2, 0 above 1, with f^2 + g^2 = 1.
double localization_profile(double x);
std::pair<OperatorMatrix, OperatorMatrix> localization_ops(double M, const FockBasis& basis);

enum class ConjugationMethod { exact_expm, truncated_bch };

struct ConjugationResult {
    OperatorMatrix h;
    double bch_remainder = 0.0; // norm of the first dropped commutator term
};

// e^{-G} H e^{G} for anti-hermitian G.
ConjugationResult conjugate(const OperatorMatrix& H, const OperatorMatrix& G,
                            ConjugationMethod method, int bch_order = 6,
                            std::size_t expm_dim_cap = 4096);

struct SpectrumResult {
    std::vector<double> eigenvalues; // k lowest, ascending
    std::vector<double> residuals;   // ||H v - lambda v||
};

SpectrumResult exact_spectrum(const OperatorMatrix& H, std::size_t k);

// Documented sparse triplet export: JSON header then "row col value" lines.
void write_operator(std::ostream& header, std::ostream& triplets, const OperatorMatrix& op,
                    double drop_below = 0.0);

} // namespace boselab

#endif
