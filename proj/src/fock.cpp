#include "boselab/fock.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "boselab/errors.hpp"

namespace boselab {

namespace {

std::uint64_t stars_and_bars(int n, int k) {
    // C(n + k - 1, k - 1) without overflow for desk-scale sizes
    unsigned __int128 r = 1;
    const int kk = k - 1;
    for (int i = 1; i <= kk; ++i) r = r * (n + i) / i;
    if (r > UINT64_MAX) throw resource_error("basis dimension overflow");
    return static_cast<std::uint64_t>(r);
}

} // namespace

ModeSet ModeSet::from_vectors(std::vector<LatticeVector> modes) {
    ModeSet set;
    // zero mode, when present, goes first
    std::stable_sort(modes.begin(), modes.end(), [](const LatticeVector& x, const LatticeVector& y) {
        return x.is_zero() && !y.is_zero();
    });
    set.modes_ = std::move(modes);
    for (std::size_t i = 0; i < set.modes_.size(); ++i) {
        if (!set.index_.emplace(set.modes_[i], i).second)
            throw std::invalid_argument("ModeSet: duplicate mode");
    }
    return set;
}

ModeSet ModeSet::from_shells(int max_norm_sq, bool include_zero) {
    if (max_norm_sq < 1) throw std::invalid_argument("ModeSet::from_shells: max_norm_sq must be >= 1");
    std::vector<LatticeVector> modes;
    if (include_zero) modes.push_back({});
    const int limit = static_cast<int>(std::sqrt(static_cast<double>(max_norm_sq))) + 1;
    std::vector<LatticeVector> nonzero;
    for (int x = -limit; x <= limit; ++x)
        for (int y = -limit; y <= limit; ++y)
            for (int z = -limit; z <= limit; ++z) {
                const int k = x * x + y * y + z * z;
                if (k >= 1 && k <= max_norm_sq) nonzero.push_back({{x, y, z}});
            }
    std::sort(nonzero.begin(), nonzero.end(), [](const LatticeVector& u, const LatticeVector& v) {
        if (u.norm_sq_int() != v.norm_sq_int()) return u.norm_sq_int() < v.norm_sq_int();
        return u.n < v.n;
    });
    modes.insert(modes.end(), nonzero.begin(), nonzero.end());
    return from_vectors(std::move(modes));
}

bool ModeSet::closed_under_negation() const {
    for (const LatticeVector& m : modes_)
        if (!index_.count(-m)) return false;
    return true;
}

std::optional<std::size_t> ModeSet::index_of(const LatticeVector& v) const {
    auto it = index_.find(v);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

ModeSet ModeSet::without_zero() const {
    std::vector<LatticeVector> rest;
    for (const LatticeVector& m : modes_)
        if (!m.is_zero()) rest.push_back(m);
    return from_vectors(std::move(rest));
}

FockBasis FockBasis::build(ModeSet modes, int N, Sector sector, std::size_t dim_cap) {
    if (N < 1) throw std::invalid_argument("FockBasis::build: N must be >= 1");
    if (sector == Sector::fixed_total && !modes.has_zero_mode())
        throw std::invalid_argument("FockBasis::build: fixed_total sector requires the zero mode");
    if (sector == Sector::excitation_truncated && modes.has_zero_mode())
        throw std::invalid_argument("FockBasis::build: excitation sector excludes the zero mode");

    const int k = static_cast<int>(modes.size());
    const std::uint64_t expected = (sector == Sector::fixed_total)
        ? stars_and_bars(N, k)
        : stars_and_bars(N, k + 1); // occupations summing to <= N
    if (expected > dim_cap)
        throw resource_error("FockBasis::build: dimension " + std::to_string(expected) +
                             " exceeds cap " + std::to_string(dim_cap));

    FockBasis basis;
    basis.modes_ = std::move(modes);
    basis.sector_ = sector;
    basis.N_ = N;

    std::vector<int> occ(static_cast<std::size_t>(std::max(k, 1)), 0);
    std::function<void(int, int)> walk = [&](int pos, int used) {
        if (pos == k) {
            if (sector == Sector::excitation_truncated || used == N) {
                if (k == 0) occ.clear();
                basis.index_.emplace(occ, basis.states_.size());
                basis.states_.push_back(occ);
            }
            return;
        }
        const int cap = N - used;
        for (int m = 0; m <= cap; ++m) {
            occ[static_cast<std::size_t>(pos)] = m;
            walk(pos + 1, used + m);
        }
        occ[static_cast<std::size_t>(pos)] = 0;
    };
    if (k == 0) {
        basis.states_.push_back({});
        basis.index_.emplace(std::vector<int>{}, 0);
    } else {
        walk(0, 0);
    }
    if (k > 0 && basis.states_.size() != expected)
        throw numeric_error("FockBasis::build: dimension mismatch against the combinatorial count");
    return basis;
}

std::optional<std::size_t> FockBasis::index_of(const std::vector<int>& occ) const {
    auto it = index_.find(occ);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

int FockBasis::excitation_count(std::size_t i) const {
    const std::vector<int>& o = states_[i];
    if (sector_ == Sector::fixed_total) return N_ - (o.empty() ? 0 : o[0]);
    int s = 0;
    for (int v : o) s += v;
    return s;
}

double OperatorMatrix::hermiticity_defect() const {
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

double OperatorMatrix::anti_hermiticity_defect() const {
    return (m + m.transpose()).cwiseAbs().maxCoeff();
}

OperatorMatrix ladder_op(const FockBasis& basis, const LatticeVector& mode, Ladder flavor,
                         BPrefactor pref) {
    const auto idx = basis.mode_set().index_of(mode);
    if (!idx) throw std::invalid_argument("ladder_op: mode not in basis");
    const bool modified = (flavor == Ladder::b || flavor == Ladder::b_dag);
    if (modified && basis.sector() != Sector::excitation_truncated)
        throw std::invalid_argument("ladder_op: b flavors require the excitation sector");
    const std::size_t mi = *idx;
    const int N = basis.particle_number();
    const double scale = !modified ? 1.0
        : (pref == BPrefactor::inv_sqrt_n ? 1.0 / std::sqrt(static_cast<double>(N))
                                          : 1.0 / static_cast<double>(N));

    OperatorMatrix lower(basis); // a_p or b_p; daggered flavors transpose at the end
    std::vector<int> target;
    for (std::size_t i = 0; i < basis.dim(); ++i) {
        const std::vector<int>& occ = basis.occ(i);
        if (occ[mi] == 0) continue;
        target = occ;
        --target[mi];
        const auto j = basis.index_of(target);
        if (!j) continue; // out of the truncated sector
        double amp = std::sqrt(static_cast<double>(occ[mi]));
        if (modified) {
            const int n_plus_after = basis.excitation_count(*j);
            amp *= scale * std::sqrt(static_cast<double>(N - n_plus_after));
        }
        lower.m(static_cast<Eigen::Index>(*j), static_cast<Eigen::Index>(i)) = amp;
    }
    if (flavor == Ladder::a || flavor == Ladder::b) return lower;
    OperatorMatrix raise(basis);
    raise.m = lower.m.transpose();
    return raise;
}

OperatorMatrix hop_op(const FockBasis& basis, const LatticeVector& p, const LatticeVector& q) {
    const auto pi_ = basis.mode_set().index_of(p);
    const auto qi_ = basis.mode_set().index_of(q);
    if (!pi_ || !qi_) throw std::invalid_argument("hop_op: mode not in basis");
    OperatorMatrix out(basis);
    std::vector<int> target;
    for (std::size_t i = 0; i < basis.dim(); ++i) {
        const std::vector<int>& occ = basis.occ(i);
        if (occ[*qi_] == 0) continue;
        target = occ;
        double amp = std::sqrt(static_cast<double>(target[*qi_]));
        --target[*qi_];
        amp *= std::sqrt(static_cast<double>(target[*pi_] + 1));
        ++target[*pi_];
        const auto j = basis.index_of(target);
        if (!j) continue;
        out.m(static_cast<Eigen::Index>(*j), static_cast<Eigen::Index>(i)) += amp;
    }
    return out;
}

OperatorMatrix excitation_number_op(const FockBasis& basis) {
    OperatorMatrix out(basis);
    for (std::size_t i = 0; i < basis.dim(); ++i)
        out.m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
            static_cast<double>(basis.excitation_count(i));
    return out;
}

HamiltonianResult build_hamiltonian(const Potential& pot, int N, const FockBasis& basis) {
    if (basis.sector() != Sector::fixed_total)
        throw std::invalid_argument("build_hamiltonian: fixed_total basis required");
    if (basis.particle_number() != N)
        throw std::invalid_argument("build_hamiltonian: basis built for a different N");

    const auto& modes = basis.mode_set().modes();
    const std::size_t k = modes.size();

    HamiltonianResult res{OperatorMatrix(basis), 0};
    Eigen::MatrixXd& H = res.op.m;

    // kinetic term
    for (std::size_t i = 0; i < basis.dim(); ++i) {
        double e = 0.0;
        const std::vector<int>& occ = basis.occ(i);
        for (std::size_t mi = 0; mi < k; ++mi) e += occ[mi] * modes[mi].p_sq();
        H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += e;
    }

    // momentum transfers realizable inside the mode set
    std::set<LatticeVector> transfers;
    for (const LatticeVector& m1 : modes)
        for (const LatticeVector& m2 : modes) transfers.insert(m1 - m2);

    std::map<int, double> vhat_cache; // |r|^2 -> Vhat(|r|/N)
    auto vhat = [&](const LatticeVector& r) {
        auto [it, fresh] = vhat_cache.try_emplace(r.norm_sq_int(), 0.0);
        if (fresh) it->second = fourier_transform_radial(pot, r.p_abs() / N);
        return it->second;
    };

    struct Term {
        std::size_t pr, q, p, qr; // a*_{p+r} a*_q a_p a_{q+r}
        double coeff;
    };
    std::vector<Term> terms;
    for (std::size_t ip = 0; ip < k; ++ip)
        for (std::size_t iq = 0; iq < k; ++iq)
            for (const LatticeVector& r : transfers) {
                const auto ipr = basis.mode_set().index_of(modes[ip] + r);
                const auto iqr = basis.mode_set().index_of(modes[iq] + r);
                if (!ipr || !iqr) {
                    ++res.dropped_terms;
                    continue;
                }
                terms.push_back({*ipr, iq, ip, *iqr, vhat(r) / (2.0 * N)});
            }

    std::vector<int> occ;
    for (std::size_t i = 0; i < basis.dim(); ++i) {
        for (const Term& t : terms) {
            occ = basis.occ(i);
            double amp = t.coeff;
            if (occ[t.qr] == 0) continue;
            amp *= std::sqrt(static_cast<double>(occ[t.qr]));
            --occ[t.qr];
            if (occ[t.p] == 0) continue;
            amp *= std::sqrt(static_cast<double>(occ[t.p]));
            --occ[t.p];
            amp *= std::sqrt(static_cast<double>(occ[t.q] + 1));
            ++occ[t.q];
            amp *= std::sqrt(static_cast<double>(occ[t.pr] + 1));
            ++occ[t.pr];
            const auto j = basis.index_of(occ);
            if (!j) throw numeric_error("build_hamiltonian: particle number not conserved");
            H(static_cast<Eigen::Index>(*j), static_cast<Eigen::Index>(i)) += amp;
        }
    }
    return res;
}

ExcitationMap excitation_map(const FockBasis& full, const FockBasis& plus) {
    if (full.sector() != Sector::fixed_total || plus.sector() != Sector::excitation_truncated)
        throw std::invalid_argument("excitation_map: sector mismatch");
    if (full.particle_number() != plus.particle_number())
        throw std::invalid_argument("excitation_map: particle numbers differ");
    const ModeSet rest = full.mode_set().without_zero();
    if (rest.modes() != plus.mode_set().modes())
        throw std::invalid_argument("excitation_map: nonzero mode sets differ");
    if (full.dim() != plus.dim())
        throw std::invalid_argument("excitation_map: dimensions differ");

    ExcitationMap map;
    map.full = &full;
    map.plus = &plus;
    map.u = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(plus.dim()),
                                  static_cast<Eigen::Index>(full.dim()));
    for (std::size_t i = 0; i < full.dim(); ++i) {
        const std::vector<int>& occ = full.occ(i);
        const std::vector<int> rest_occ(occ.begin() + 1, occ.end());
        const auto j = plus.index_of(rest_occ);
        if (!j) throw numeric_error("excitation_map: missing excitation state");
        map.u(static_cast<Eigen::Index>(*j), static_cast<Eigen::Index>(i)) = 1.0;
    }
    return map;
}

namespace {

double coeff_for(const std::map<int, double>& coeff, int norm_sq) {
    auto it = coeff.find(norm_sq);
    if (it == coeff.end())
        throw std::invalid_argument("build_generator: missing coefficient for shell |n|^2 = " +
                                    std::to_string(norm_sq));
    return it->second;
}

} // namespace

OperatorMatrix build_generator(const GeneratorSpec& spec, const FockBasis& basis, int N) {
    if (basis.sector() != Sector::excitation_truncated)
        throw std::invalid_argument("build_generator: excitation basis required");
    if (!basis.mode_set().closed_under_negation())
        throw std::invalid_argument("build_generator: mode set must be closed under p -> -p");

    const auto& modes = basis.mode_set().modes();
    using Kind = GeneratorSpec::Kind;

    std::map<std::pair<std::size_t, int>, Eigen::MatrixXd> cache;
    auto op = [&](const LatticeVector& mode, Ladder flavor) -> const Eigen::MatrixXd& {
        const std::size_t mi = *basis.mode_set().index_of(mode);
        auto key = std::make_pair(mi, static_cast<int>(flavor));
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, ladder_op(basis, mode, flavor, spec.pref).m).first;
        return it->second;
    };

    const Eigen::Index dim = static_cast<Eigen::Index>(basis.dim());
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(dim, dim);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(N));

    switch (spec.kind) {
    case Kind::b_eta:
    case Kind::b_tau: {
        const Ladder raise = (spec.level == Ladder::a || spec.level == Ladder::a_dag)
            ? Ladder::a_dag : Ladder::b_dag;
        for (const LatticeVector& q : modes) {
            const int n2 = q.norm_sq_int();
            if (n2 < spec.high_min_norm_sq || n2 > spec.low_max_norm_sq) continue;
            const double c = coeff_for(spec.coeff, n2);
            x += 0.5 * c * (op(q, raise) * op(-q, raise));
        }
        break;
    }
    case Kind::cubic_a: {
        for (const LatticeVector& r : modes) {
            if (r.norm_sq_int() < spec.high_min_norm_sq) continue;
            const double eta_r = coeff_for(spec.coeff, r.norm_sq_int());
            for (const LatticeVector& v : modes) {
                if (v.norm_sq_int() > spec.low_max_norm_sq) continue;
                const LatticeVector rv = r + v;
                if (rv.is_zero()) continue;
                if (!basis.mode_set().index_of(rv)) continue;
                x += inv_sqrt_n * eta_r *
                     (op(rv, Ladder::b_dag) * op(-r, Ladder::a_dag) * op(v, Ladder::a));
            }
        }
        break;
    }
    case Kind::cubic_atilde: {
        for (const LatticeVector& r : modes) {
            if (r.norm_sq_int() < spec.high_min_norm_sq) continue;
            const double eta_r = coeff_for(spec.coeff, r.norm_sq_int());
            for (const LatticeVector& v : modes) {
                if (v.norm_sq_int() > spec.low_max_norm_sq) continue;
                const LatticeVector rv = r + v;
                if (rv.is_zero()) continue;
                if (!basis.mode_set().index_of(rv)) continue;
                const double eta_v = coeff_for(spec.coeff, v.norm_sq_int());
                x += inv_sqrt_n * eta_r *
                     (op(rv, Ladder::b_dag) * op(-r, Ladder::b_dag) *
                      (std::sinh(eta_v) * op(-v, Ladder::b_dag) +
                       std::cosh(eta_v) * op(v, Ladder::b)));
            }
        }
        break;
    }
    }

    OperatorMatrix g(basis);
    g.m = x - x.transpose();
    return g;
}

OperatorMatrix build_cubic_cn(const FockBasis& basis, int N, const Potential& pot,
                              const EtaTable& eta, BPrefactor pref) {
    if (basis.sector() != Sector::excitation_truncated)
        throw std::invalid_argument("build_cubic_cn: excitation basis required");
    if (!basis.mode_set().closed_under_negation())
        throw std::invalid_argument("build_cubic_cn: mode set must be closed under p -> -p");

    const auto& modes = basis.mode_set().modes();
    std::map<std::pair<std::size_t, int>, Eigen::MatrixXd> cache;
    auto op = [&](const LatticeVector& mode, Ladder flavor) -> const Eigen::MatrixXd& {
        const std::size_t mi = *basis.mode_set().index_of(mode);
        auto key = std::make_pair(mi, static_cast<int>(flavor));
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, ladder_op(basis, mode, flavor, pref).m).first;
        return it->second;
    };

    std::map<int, double> vhat_cache;
    auto vhat = [&](const LatticeVector& p) {
        auto [it, fresh] = vhat_cache.try_emplace(p.norm_sq_int(), 0.0);
        if (fresh) it->second = fourier_transform_radial(pot, p.p_abs() / N);
        return it->second;
    };

    const Eigen::Index dim = static_cast<Eigen::Index>(basis.dim());
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(dim, dim);
    for (const LatticeVector& p : modes) {
        for (const LatticeVector& q : modes) {
            if (q == -p) continue;
            const LatticeVector pq = p + q;
            if (!basis.mode_set().index_of(pq)) continue;
            const double eta_q = eta.at(q.norm_sq_int());
            x += vhat(p) * (op(pq, Ladder::b_dag) * op(-p, Ladder::b_dag) *
                            (std::cosh(eta_q) * op(q, Ladder::b) +
                             std::sinh(eta_q) * op(-q, Ladder::b_dag)));
        }
    }
    OperatorMatrix h(basis);
    h.m = (x + x.transpose()) / std::sqrt(static_cast<double>(N));
    return h;
}

double localization_profile(double x) {
    if (x <= 0.5) return 1.0;
    if (x >= 1.0) return 0.0;
    const double t = 2.0 * (x - 0.5);
    const double s0 = std::exp(-1.0 / (1.0 - t));
    const double s1 = std::exp(-1.0 / t);
    return std::sqrt(s0 / (s0 + s1));
}

std::pair<OperatorMatrix, OperatorMatrix> localization_ops(double M, const FockBasis& basis) {
    if (!(M > 0)) throw std::invalid_argument("localization_ops: M must be > 0");
    OperatorMatrix f(basis), g(basis);
    for (std::size_t i = 0; i < basis.dim(); ++i) {
        const double x = basis.excitation_count(i) / M;
        const double fv = localization_profile(x);
        f.m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = fv;
        g.m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
            std::sqrt(std::max(0.0, 1.0 - fv * fv));
    }
    return {std::move(f), std::move(g)};
}

ConjugationResult conjugate(const OperatorMatrix& H, const OperatorMatrix& G,
                            ConjugationMethod method, int bch_order,
                            std::size_t expm_dim_cap) {
    if (H.basis != G.basis) throw std::invalid_argument("conjugate: operators on different bases");
    const double scale = 1.0 + G.m.cwiseAbs().maxCoeff();
    if (G.anti_hermiticity_defect() > 1e-10 * scale)
        throw std::invalid_argument("conjugate: generator is not anti-hermitian");

    ConjugationResult res;
    res.h = OperatorMatrix(*H.basis);
    if (method == ConjugationMethod::exact_expm) {
        if (H.basis->dim() > expm_dim_cap)
            throw resource_error("conjugate: dimension exceeds the dense expm cap; "
                                 "use truncated_bch");
        const Eigen::MatrixXd e = G.m.exp(); // scaling-and-squaring Pade
        res.h.m = e.transpose() * H.m * e;
        return res;
    }
    if (bch_order < 1) throw std::invalid_argument("conjugate: bch_order must be >= 1");
    Eigen::MatrixXd acc = H.m;
    Eigen::MatrixXd c = H.m;
    double fact = 1.0;
    for (int k = 1; k <= bch_order; ++k) {
        c = c * G.m - G.m * c;
        fact *= k;
        acc += c / fact;
    }
    const Eigen::MatrixXd next = c * G.m - G.m * c;
    res.bch_remainder = next.norm() / (fact * (bch_order + 1));
    res.h.m = std::move(acc);
    return res;
}

SpectrumResult exact_spectrum(const OperatorMatrix& H, std::size_t k) {
    if (k > H.basis->dim()) throw std::invalid_argument("exact_spectrum: k exceeds dimension");
    const double scale = 1.0 + H.m.cwiseAbs().maxCoeff();
    if (H.hermiticity_defect() > 1e-9 * scale)
        throw std::invalid_argument("exact_spectrum: operator is not hermitian");

    const Eigen::MatrixXd sym = 0.5 * (H.m + H.m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) throw numeric_error("exact_spectrum: eigensolver failure");

    SpectrumResult out;
    out.eigenvalues.reserve(k);
    out.residuals.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double lambda = solver.eigenvalues()(static_cast<Eigen::Index>(i));
        const Eigen::VectorXd v = solver.eigenvectors().col(static_cast<Eigen::Index>(i));
        out.eigenvalues.push_back(lambda);
        out.residuals.push_back((sym * v - lambda * v).norm());
    }
    return out;
}

void write_operator(std::ostream& header, std::ostream& triplets, const OperatorMatrix& op,
                    double drop_below) {
    std::int64_t nnz = 0;
    for (Eigen::Index i = 0; i < op.m.rows(); ++i)
        for (Eigen::Index j = 0; j < op.m.cols(); ++j)
            if (std::abs(op.m(i, j)) > drop_below) ++nnz;

    nlohmann::ordered_json meta;
    meta["format"] = "triplet row col value, zero-based";
    meta["dim"] = op.basis ? op.basis->dim() : static_cast<std::size_t>(op.m.rows());
    if (op.basis) {
        meta["sector"] = op.basis->sector() == Sector::fixed_total ? "fixed_total"
                                                                   : "excitation_truncated";
        meta["particle_number"] = op.basis->particle_number();
        meta["modes"] = op.basis->mode_set().size();
    }
    meta["hermiticity_defect"] = op.hermiticity_defect();
    meta["nnz"] = nnz;
    header << meta.dump(2) << '\n';

    triplets.precision(17);
    for (Eigen::Index i = 0; i < op.m.rows(); ++i)
        for (Eigen::Index j = 0; j < op.m.cols(); ++j)
            if (std::abs(op.m(i, j)) > drop_below)
                triplets << i << ' ' << j << ' ' << op.m(i, j) << '\n';
}

} // namespace boselab
