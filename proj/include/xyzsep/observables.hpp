#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "xyzsep/common.hpp"
#include "xyzsep/hilbert.hpp"
#include "xyzsep/lattice.hpp"

namespace xyzsep {

/// Reduced density matrix over a subset of sites, in the subset's product
/// basis (lowest kept site is the fastest digit).
struct ReducedState {
    std::vector<int> sites;
    std::vector<int> dims;
    Eigen::MatrixXcd rho;

    Eigen::VectorXd eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
        return es.eigenvalues();  // ascending
    }
    double purity() const { return (rho * rho).trace().real(); }
};

inline ReducedState partial_trace(const QuantumState& st, std::vector<int> keep) {
    std::sort(keep.begin(), keep.end());
    const int n = st.basis.n_sites();
    if (keep.empty()) throw ModelError("partial trace needs a nonempty site subset");
    if (static_cast<int>(keep.size()) >= n) throw ModelError("partial trace needs a proper subset of sites");
    for (std::size_t t = 0; t < keep.size(); ++t) {
        if (keep[t] < 0 || keep[t] >= n) throw ModelError("partial trace site out of range");
        if (t > 0 && keep[t] == keep[t - 1]) throw ModelError("partial trace sites must be distinct");
    }
    std::vector<int> is_kept(n, -1);
    for (std::size_t t = 0; t < keep.size(); ++t) is_kept[keep[t]] = static_cast<int>(t);

    std::size_t dk = 1, de = 1;
    std::vector<std::size_t> kstride(keep.size()), estride;
    std::vector<int> esites;
    for (int i = 0; i < n; ++i) {
        if (is_kept[i] >= 0) {
            kstride[is_kept[i]] = dk;
            dk *= st.basis.dims[i];
        } else {
            esites.push_back(i);
            estride.push_back(de);
            de *= st.basis.dims[i];
        }
    }

    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dk, de);
    std::vector<int> dig;
    for (std::size_t idx = 0; idx < st.basis.dim; ++idx) {
        st.basis.decode(idx, dig);
        std::size_t ik = 0, ie = 0;
        for (std::size_t t = 0; t < keep.size(); ++t) ik += dig[keep[t]] * kstride[t];
        for (std::size_t t = 0; t < esites.size(); ++t) ie += dig[esites[t]] * estride[t];
        M(static_cast<Eigen::Index>(ik), static_cast<Eigen::Index>(ie)) = st.amp[static_cast<Eigen::Index>(idx)];
    }
    ReducedState out;
    out.sites = keep;
    for (int i : keep) out.dims.push_back(st.basis.dims[i]);
    out.rho = M * M.adjoint();
    return out;
}

/// Density matrix of the whole system as a ReducedState (pair concurrence of
/// a two-site system acts on this).
inline ReducedState full_density(const QuantumState& st) {
    ReducedState out;
    out.dims = st.basis.dims;
    for (int i = 0; i < st.basis.n_sites(); ++i) out.sites.push_back(i);
    out.rho = st.amp * st.amp.adjoint();
    return out;
}

/// Pair density matrix: the partial trace for n > 2, the full state for n = 2.
inline ReducedState pair_density(const QuantumState& st, int i, int j) {
    if (st.basis.n_sites() == 2) return full_density(st);
    return partial_trace(st, {i, j});
}

/// Linear entropy S2 = 2 (1 - tr rho^2); zero for pure states.
inline double linear_entropy(const ReducedState& r) { return 2.0 * (1.0 - r.purity()); }

inline double site_magnetization_z(const QuantumState& st, int site) {
    if (site < 0 || site >= st.basis.n_sites()) throw ModelError("site out of range");
    double m = 0;
    std::vector<int> dig;
    for (std::size_t idx = 0; idx < st.basis.dim; ++idx) {
        const double w = std::norm(st.amp[static_cast<Eigen::Index>(idx)]);
        if (w == 0.0) continue;
        st.basis.decode(idx, dig);
        m += w * st.basis.m_value(site, dig[site]);
    }
    return m;
}

inline double total_magnetization_z(const QuantumState& st) {
    double m = 0;
    std::vector<int> dig;
    for (std::size_t idx = 0; idx < st.basis.dim; ++idx) {
        const double w = std::norm(st.amp[static_cast<Eigen::Index>(idx)]);
        if (w == 0.0) continue;
        st.basis.decode(idx, dig);
        for (int i = 0; i < st.basis.n_sites(); ++i) m += w * st.basis.m_value(i, dig[i]);
    }
    return m;
}

/// Two-qubit concurrence by the standard spin-flip construction
/// C = max(0, l1 - l2 - l3 - l4), l_i the sorted square roots of the
/// eigenvalues of rho (YxY) rho* (YxY).
inline double wootters_concurrence(const Eigen::Matrix4cd& rho) {
    Eigen::Matrix4d F = Eigen::Matrix4d::Zero();
    F(0, 3) = F(3, 0) = -1.0;
    F(1, 2) = F(2, 1) = 1.0;
    const Eigen::Matrix4cd R = rho * F.cast<Complex>() * rho.conjugate() * F.cast<Complex>();
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(R, false);
    std::array<double, 4> lam{};
    for (int i = 0; i < 4; ++i) lam[i] = std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
    std::sort(lam.begin(), lam.end(), std::greater<double>());
    return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

namespace detail {
/// Isometry onto the rank-2 support of a single-site reduced state (the two
/// dominant eigenvectors). Any orthonormal basis of the support gives the
/// same concurrence, the map being a local unitary choice.
inline Eigen::MatrixXcd support_isometry(const Eigen::MatrixXcd& rho_site, double rank_tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_site);
    const Eigen::Index d = rho_site.rows();
    for (Eigen::Index t = 0; t + 2 < d; ++t)
        if (es.eigenvalues()(t) > rank_tol)
            throw NumericsError("reduced state has rank > 2; the effective-qubit map does not apply");
    Eigen::MatrixXcd W(d, 2);
    W.col(0) = es.eigenvectors().col(d - 1);
    W.col(1) = es.eigenvectors().col(d - 2);
    return W;
}
}  // namespace detail

/// Pair concurrence: the two-qubit value for spin-1/2 pairs; for higher spins
/// a rank-2 pair state is mapped onto the 2-dimensional local supports and the
/// two-qubit concurrence is evaluated there. Rank > 2 inputs are rejected.
inline double concurrence(const ReducedState& pair, double rank_tol = 1e-8) {
    if (pair.sites.size() != 2) throw ModelError("concurrence needs a two-site reduced state");
    const int d1 = pair.dims[0], d2 = pair.dims[1];
    if (d1 == 2 && d2 == 2) return wootters_concurrence(Eigen::Matrix4cd(pair.rho));

    const auto ev = pair.eigenvalues();
    for (Eigen::Index t = 0; t + 2 < ev.size(); ++t)
        if (ev(t) > rank_tol) throw NumericsError("pair state has rank > 2; the effective-qubit map does not apply");

    Eigen::MatrixXcd r1 = Eigen::MatrixXcd::Zero(d1, d1), r2 = Eigen::MatrixXcd::Zero(d2, d2);
    for (int a = 0; a < d1; ++a)
        for (int b = 0; b < d1; ++b)
            for (int c = 0; c < d2; ++c) r1(a, b) += pair.rho(a + d1 * c, b + d1 * c);
    for (int c = 0; c < d2; ++c)
        for (int d = 0; d < d2; ++d)
            for (int a = 0; a < d1; ++a) r2(c, d) += pair.rho(a + d1 * c, a + d1 * d);

    const Eigen::MatrixXcd W1 = detail::support_isometry(r1, rank_tol);
    const Eigen::MatrixXcd W2 = detail::support_isometry(r2, rank_tol);
    Eigen::MatrixXcd K(d1 * d2, 4);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int k1 = 0; k1 < d1; ++k1)
                for (int k2 = 0; k2 < d2; ++k2) K(k1 + d1 * k2, a + 2 * b) = W1(k1, a) * W2(k2, b);
    Eigen::Matrix4cd rq = K.adjoint() * pair.rho * K;
    const double tr = rq.trace().real();
    if (std::abs(tr - 1.0) > 1e-6)
        throw NumericsError("pair state leaks outside the rank-2 local supports; effective-qubit map rejected");
    rq /= tr;
    return wootters_concurrence(rq);
}

// ---------------------------------------------------------------------------
// Closed-form side limits at factorization, from the parity-restored states
// (|T> +- |-T>)/sqrt(2(1 +- O)) with O = prod_i cos^{2s} theta_i.
// ---------------------------------------------------------------------------

/// O = <-T|T> = prod_i cos^{2s}(theta_i).
inline double factorized_overlap(const std::vector<double>& theta, double s) {
    const int twos = twice_spin(s);
    double o = 1.0;
    for (double t : theta) o *= int_pow(std::cos(t), twos);
    return o;
}

/// Complementary overlap gamma_i = prod_{j != i} cos^{2s}(theta_j).
inline double complementary_overlap(const std::vector<double>& theta, double s, int skip) {
    const int twos = twice_spin(s);
    double o = 1.0;
    for (std::size_t t = 0; t < theta.size(); ++t)
        if (static_cast<int>(t) != skip) o *= int_pow(std::cos(theta[t]), twos);
    return o;
}

inline double complementary_overlap2(const std::vector<double>& theta, double s, int skip_a, int skip_b) {
    const int twos = twice_spin(s);
    double o = 1.0;
    for (std::size_t t = 0; t < theta.size(); ++t)
        if (static_cast<int>(t) != skip_a && static_cast<int>(t) != skip_b) o *= int_pow(std::cos(theta[t]), twos);
    return o;
}

namespace detail {
inline void check_parity_sign(int parity) {
    if (parity != +1 && parity != -1) throw ModelError("parity must be +1 or -1");
}
}  // namespace detail

/// Side limit of <S_i^z> in the parity-projected state:
///   s (cos t_i +- gamma_i cos^{2s-1} t_i) / (1 +- O).
inline double side_limit_magnetization(const std::vector<double>& theta, double s, int i, int parity) {
    detail::check_parity_sign(parity);
    const int twos = twice_spin(s);
    const double O = factorized_overlap(theta, s);
    const double g = complementary_overlap(theta, s, i);
    const double c = std::cos(theta[i]);
    return s * (c + parity * g * int_pow(c, twos - 1)) / (1.0 + parity * O);
}

/// The two nonzero eigenvalues {p_+, p_-} of the single-site reduced state of
/// the parity-projected GS: p_nu = (1 + nu cos^{2s} t_i)(1 +- nu gamma_i)/(2(1 +- O)).
inline std::array<double, 2> side_limit_site_spectrum(const std::vector<double>& theta, double s, int i, int parity) {
    detail::check_parity_sign(parity);
    const int twos = twice_spin(s);
    const double O = factorized_overlap(theta, s);
    const double g = complementary_overlap(theta, s, i);
    const double c2s = int_pow(std::cos(theta[i]), twos);
    std::array<double, 2> p{};
    for (int t = 0; t < 2; ++t) {
        const int nu = t == 0 ? +1 : -1;
        p[t] = (1.0 + nu * c2s) * (1.0 + parity * nu * g) / (2.0 * (1.0 + parity * O));
    }
    return p;
}

/// Pair analog: eigenvalues of the two-site reduced state, with
/// cos^{2s} t_i -> cos^{2s} t_i cos^{2s} t_j and gamma_i -> gamma_ij.
inline std::array<double, 2> side_limit_pair_spectrum(const std::vector<double>& theta, double s, int i, int j,
                                                      int parity) {
    detail::check_parity_sign(parity);
    const int twos = twice_spin(s);
    const double O = factorized_overlap(theta, s);
    const double g = complementary_overlap2(theta, s, i, j);
    const double cc = int_pow(std::cos(theta[i]), twos) * int_pow(std::cos(theta[j]), twos);
    std::array<double, 2> p{};
    for (int t = 0; t < 2; ++t) {
        const int nu = t == 0 ? +1 : -1;
        p[t] = (1.0 + nu * cc) * (1.0 + parity * nu * g) / (2.0 * (1.0 + parity * O));
    }
    return p;
}

/// Side limit of the single-site linear entropy:
///   (1 - cos^{4s} t_i)(1 - gamma_i^2)/(1 +- O)^2  (= 4 p_+ p_-).
inline double side_limit_linear_entropy(const std::vector<double>& theta, double s, int i, int parity) {
    detail::check_parity_sign(parity);
    const int twos = twice_spin(s);
    const double O = factorized_overlap(theta, s);
    const double g = complementary_overlap(theta, s, i);
    const double c4s = int_pow(std::cos(theta[i]), 2 * twos);
    const double d = 1.0 + parity * O;
    return (1.0 - c4s) * (1.0 - g * g) / (d * d);
}

/// Side limit of the pair concurrence, independent of the spin separation:
///   gamma_ij sqrt((1 - cos^{4s} t_i)(1 - cos^{4s} t_j)) / (1 +- O).
inline double side_limit_concurrence(const std::vector<double>& theta, double s, int i, int j, int parity) {
    detail::check_parity_sign(parity);
    const int twos = twice_spin(s);
    const double O = factorized_overlap(theta, s);
    const double g = complementary_overlap2(theta, s, i, j);
    const double ci = int_pow(std::cos(theta[i]), 2 * twos);
    const double cj = int_pow(std::cos(theta[j]), 2 * twos);
    return g * std::sqrt(std::max(0.0, (1.0 - ci) * (1.0 - cj))) / (1.0 + parity * O);
}

/// All pairwise side-limit concurrences. For an alternating state only three
/// distinct values occur, keyed by sublattice membership of the pair.
struct ConcurrenceMap {
    Eigen::MatrixXd pairwise;  // symmetric, zero diagonal
    double c_aa = 0, c_bb = 0, c_ab = 0;
};

inline ConcurrenceMap side_limit_concurrence_map(const SpinLattice& lat, const std::vector<double>& theta, double s,
                                                 int parity) {
    if (static_cast<int>(theta.size()) != lat.n_sites) throw ModelError("angle list must have one entry per site");
    ConcurrenceMap out;
    const int n = lat.n_sites;
    out.pairwise = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double c = side_limit_concurrence(theta, s, i, j, parity);
            out.pairwise(i, j) = out.pairwise(j, i) = c;
        }
    const auto color = bipartite_coloring(lat);
    int a0 = -1, b0 = -1;
    for (int i = 0; i < n; ++i) {
        if (color[i] == 0 && a0 < 0) a0 = i;
        if (color[i] == 1 && b0 < 0) b0 = i;
    }
    int a1 = -1, b1 = -1;
    for (int i = 0; i < n; ++i) {
        if (color[i] == 0 && i != a0 && a1 < 0) a1 = i;
        if (color[i] == 1 && i != b0 && b1 < 0) b1 = i;
    }
    if (a0 >= 0 && a1 >= 0) out.c_aa = out.pairwise(a0, a1);
    if (b0 >= 0 && b1 >= 0) out.c_bb = out.pairwise(b0, b1);
    if (a0 >= 0 && b0 >= 0) out.c_ab = out.pairwise(a0, b0);
    return out;
}

}  // namespace xyzsep
