#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <functional>
#include <ostream>
#include <vector>

#include "xyzsep/common.hpp"
#include "xyzsep/lattice.hpp"

namespace xyzsep {

using Complex = std::complex<double>;

/// Tensor-product magnetization basis with mixed-radix indexing, site 0
/// fastest. Digit k at site i encodes m = s_i - k, so digit 0 is the maximally
/// aligned state and the parity exponent sum_i (s_i - m_i) is the digit sum.
struct SpinBasis {
    static constexpr std::size_t kDefaultDimCap = std::size_t{1} << 20;

    std::vector<int> twos;            // 2 s_i per site
    std::vector<int> dims;            // 2 s_i + 1
    std::vector<std::size_t> stride;  // little-endian strides
    std::size_t dim = 1;

    SpinBasis() = default;
    SpinBasis(int n, double s, std::size_t dim_cap = kDefaultDimCap)
        : SpinBasis(std::vector<double>(static_cast<std::size_t>(n), s), dim_cap) {}
    explicit SpinBasis(const std::vector<double>& spins, std::size_t dim_cap = kDefaultDimCap) {
        if (spins.empty()) throw ModelError("basis needs at least one site");
        for (double s : spins) {
            const int t = twice_spin(s);
            twos.push_back(t);
            dims.push_back(t + 1);
        }
        stride.resize(spins.size());
        for (std::size_t i = 0; i < spins.size(); ++i) {
            stride[i] = dim;
            if (dim > dim_cap / dims[i]) throw ModelError("Hilbert space dimension exceeds the configured cap");
            dim *= dims[i];
        }
    }

    int n_sites() const { return static_cast<int>(dims.size()); }
    double spin(int site) const { return 0.5 * twos[site]; }

    void decode(std::size_t idx, std::vector<int>& k) const {
        k.resize(dims.size());
        for (std::size_t i = 0; i < dims.size(); ++i) {
            k[i] = static_cast<int>(idx % dims[i]);
            idx /= dims[i];
        }
    }
    std::size_t encode(const std::vector<int>& k) const {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < dims.size(); ++i) idx += static_cast<std::size_t>(k[i]) * stride[i];
        return idx;
    }
    double m_value(int site, int digit) const { return 0.5 * twos[site] - digit; }

    int digit_sum(std::size_t idx) const {
        int s = 0;
        for (std::size_t i = 0; i < dims.size(); ++i) {
            s += static_cast<int>(idx % dims[i]);
            idx /= dims[i];
        }
        return s;
    }
    /// Parity eigenvalue (-1)^{sum_i (s_i - m_i)} of a basis state.
    int parity(std::size_t idx) const { return digit_sum(idx) % 2 == 0 ? +1 : -1; }
};

/// Complex amplitude vector over a SpinBasis.
struct QuantumState {
    SpinBasis basis;
    Eigen::VectorXcd amp;

    double norm() const { return amp.norm(); }
};

inline Complex overlap(const QuantumState& a, const QuantumState& b) { return a.amp.dot(b.amp); }

namespace detail {
inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int t = 1; t <= k; ++t) r = r * (n - k + t) / t;
    return r;
}
}  // namespace detail

/// Spin-coherent state of one site: amplitudes
///   sqrt(C(2s, s-m)) cos^{s+m}(theta/2) sin^{s-m}(theta/2) e^{-i phi m}
/// over m = s..-s (digit order).
inline Eigen::VectorXcd coherent_site_state(int twos, double theta, double phi) {
    const int d = twos + 1;
    Eigen::VectorXcd v(d);
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    for (int k = 0; k < d; ++k) {
        const double m = 0.5 * twos - k;
        const double a = std::sqrt(detail::binomial(twos, k)) * int_pow(c, twos - k) * int_pow(s, k);
        v[k] = a * std::exp(Complex(0.0, -phi * m));
    }
    return v;
}

/// Normalized product state |theta_1 phi_1, theta_2 phi_2, ...>; satisfies
/// <S_i> = s_i (sin t cos p, sin t sin p, cos t).
inline QuantumState coherent_product_state(const SpinBasis& basis, const std::vector<double>& theta,
                                           const std::vector<double>& phi) {
    const int n = basis.n_sites();
    if (static_cast<int>(theta.size()) != n || static_cast<int>(phi.size()) != n)
        throw ModelError("angle lists must have one entry per site");
    Eigen::VectorXcd amp = Eigen::VectorXcd::Ones(1);
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXcd v = coherent_site_state(basis.twos[i], theta[i], phi[i]);
        Eigen::VectorXcd next(amp.size() * v.size());
        for (Eigen::Index k = 0; k < v.size(); ++k) next.segment(k * amp.size(), amp.size()) = v[k] * amp;
        amp.swap(next);
    }
    QuantumState st;
    st.basis = basis;
    st.amp = std::move(amp);
    return st;
}

inline QuantumState coherent_product_state(const SpinBasis& basis, const std::vector<double>& theta) {
    return coherent_product_state(basis, theta, std::vector<double>(theta.size(), 0.0));
}

/// Definite-parity projection (1 + sign P)/2 of a state, renormalized.
/// At factorization this produces the two crossing entangled eigenstates
/// (|T> +- |-T>)/sqrt(2(1 +- <-T|T>)).
inline QuantumState parity_project(const QuantumState& in, int sign) {
    if (sign != +1 && sign != -1) throw ModelError("parity sign must be +1 or -1");
    QuantumState out;
    out.basis = in.basis;
    out.amp = Eigen::VectorXcd::Zero(in.amp.size());
    double norm2 = 0;
    for (Eigen::Index idx = 0; idx < in.amp.size(); ++idx) {
        if (in.basis.parity(static_cast<std::size_t>(idx)) == sign) {
            out.amp[idx] = in.amp[idx];
            norm2 += std::norm(in.amp[idx]);
        }
    }
    if (norm2 < 1e-24)
        throw NumericsError(std::string("parity projection annihilated the state (sign ") +
                            (sign > 0 ? "+1)" : "-1)"));
    out.amp /= std::sqrt(norm2);
    return out;
}

/// XYZ Hamiltonian over a SpinBasis, dense below a dimension threshold and
/// sparse above it. Entries are real (fields along z, real couplings) and the
/// matrix is symmetric by construction.
struct Hamiltonian {
    SpinBasis basis;
    bool dense = true;
    Eigen::MatrixXd dmat;
    Eigen::SparseMatrix<double> smat;
    double max_abs = 0;  // max |entry|

    // model metadata
    std::vector<Edge> edges;
    Couplings base;
    std::vector<double> scaled_fields;
    std::vector<double> physical_fields;
    double reference_spin = 0.5;

    std::size_t dim() const { return basis.dim; }

    Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return dense ? (dmat * v).eval() : (smat * v).eval(); }
    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const {
        if (dense) return dmat * v;
        Eigen::VectorXcd out = smat.cast<Complex>() * v;
        return out;
    }

    void for_each_entry(const std::function<void(std::size_t, std::size_t, double)>& f) const {
        if (dense) {
            for (Eigen::Index c = 0; c < dmat.cols(); ++c)
                for (Eigen::Index r = 0; r < dmat.rows(); ++r)
                    if (dmat(r, c) != 0.0) f(static_cast<std::size_t>(r), static_cast<std::size_t>(c), dmat(r, c));
        } else {
            for (int c = 0; c < smat.outerSize(); ++c)
                for (Eigen::SparseMatrix<double>::InnerIterator it(smat, c); it; ++it)
                    f(static_cast<std::size_t>(it.row()), static_cast<std::size_t>(it.col()), it.value());
        }
    }
};

struct BuildOptions {
    std::size_t dense_threshold = 4096;
    std::size_t dim_cap = SpinBasis::kDefaultDimCap;
};

namespace detail {

/// Core assembly. Physical couplings per edge are r_e * base * s_ref/(s_i s_j)
/// and physical fields s_ref * h_i / s_i, so the scaled problem (fields h_i,
/// couplings r_e * base) is spin independent. For uniform spin s_ref = s this
/// is J = j/s at fields h_i.
inline Hamiltonian assemble_hamiltonian(const std::vector<double>& spins, const std::vector<Edge>& edges,
                                        const Couplings& base, double s_ref, const std::vector<double>& h_scaled,
                                        const BuildOptions& opt) {
    SpinBasis basis(spins, opt.dim_cap);
    const int n = basis.n_sites();
    if (static_cast<int>(h_scaled.size()) != n) throw ModelError("field list must have one entry per site");

    Hamiltonian H;
    H.basis = basis;
    H.edges = edges;
    H.base = base;
    H.scaled_fields = h_scaled;
    H.reference_spin = s_ref;
    H.physical_fields.resize(n);
    for (int i = 0; i < n; ++i) H.physical_fields[i] = s_ref * h_scaled[i] / basis.spin(i);

    // ladder amplitude tables: raise[i][k] for S_i^+ on digit k (k -> k-1)
    std::vector<std::vector<double>> raise(n), lower(n);
    for (int i = 0; i < n; ++i) {
        const double s = basis.spin(i);
        raise[i].assign(basis.dims[i], 0.0);
        lower[i].assign(basis.dims[i], 0.0);
        for (int k = 0; k < basis.dims[i]; ++k) {
            const double m = basis.m_value(i, k);
            if (k >= 1) raise[i][k] = std::sqrt(s * (s + 1) - m * (m + 1));
            if (k + 1 < basis.dims[i]) lower[i][k] = std::sqrt(s * (s + 1) - m * (m - 1));
        }
    }

    struct EdgeCoef {
        int i, j;
        double jp, jm, jz;  // (Jx+Jy)/4, (Jx-Jy)/4, Jz
    };
    std::vector<EdgeCoef> ec;
    for (const auto& e : edges) {
        const double f = e.r * s_ref / (basis.spin(e.i) * basis.spin(e.j));
        const double Jx = f * base.jx, Jy = f * base.jy, Jz = f * base.jz;
        ec.push_back({e.i, e.j, 0.25 * (Jx + Jy), 0.25 * (Jx - Jy), Jz});
    }

    H.dense = basis.dim <= opt.dense_threshold;
    std::vector<Eigen::Triplet<double>> trip;
    if (H.dense)
        H.dmat = Eigen::MatrixXd::Zero(basis.dim, basis.dim);
    else
        trip.reserve(basis.dim * (1 + 4 * edges.size()));
    auto add = [&](std::size_t r, std::size_t c, double v) {
        if (v == 0.0) return;
        if (H.dense)
            H.dmat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) += v;
        else
            trip.emplace_back(static_cast<int>(r), static_cast<int>(c), v);
    };

    std::vector<int> k;
    for (std::size_t idx = 0; idx < basis.dim; ++idx) {
        basis.decode(idx, k);
        double diag = 0;
        for (int i = 0; i < n; ++i) diag -= H.physical_fields[i] * basis.m_value(i, k[i]);
        for (const auto& e : ec) diag -= e.jz * basis.m_value(e.i, k[e.i]) * basis.m_value(e.j, k[e.j]);
        add(idx, idx, diag);
        for (const auto& e : ec) {
            const int ki = k[e.i], kj = k[e.j];
            // S_i^+ S_j^-
            if (ki >= 1 && kj + 1 < basis.dims[e.j])
                add(idx - basis.stride[e.i] + basis.stride[e.j], idx, -e.jp * raise[e.i][ki] * lower[e.j][kj]);
            // S_i^- S_j^+
            if (kj >= 1 && ki + 1 < basis.dims[e.i])
                add(idx + basis.stride[e.i] - basis.stride[e.j], idx, -e.jp * lower[e.i][ki] * raise[e.j][kj]);
            // S_i^+ S_j^+
            if (ki >= 1 && kj >= 1)
                add(idx - basis.stride[e.i] - basis.stride[e.j], idx, -e.jm * raise[e.i][ki] * raise[e.j][kj]);
            // S_i^- S_j^-
            if (ki + 1 < basis.dims[e.i] && kj + 1 < basis.dims[e.j])
                add(idx + basis.stride[e.i] + basis.stride[e.j], idx, -e.jm * lower[e.i][ki] * lower[e.j][kj]);
        }
    }
    if (!H.dense) {
        H.smat.resize(static_cast<Eigen::Index>(basis.dim), static_cast<Eigen::Index>(basis.dim));
        H.smat.setFromTriplets(trip.begin(), trip.end());
    }
    H.max_abs = 0;
    H.for_each_entry([&](std::size_t, std::size_t, double v) { H.max_abs = std::max(H.max_abs, std::abs(v)); });
    return H;
}

}  // namespace detail

/// H = -sum_i h^i S_i^z - sum_{i<j} sum_mu (j_mu^{ij}/s) S_i^mu S_j^mu at
/// uniform spin s, with the transverse part assembled through the ladder
/// decomposition -j_+(S+S- + S-S+) - j_-(S+S+ + S-S-), j_+- = (jx +- jy)/4.
inline Hamiltonian build_hamiltonian(const SpinLattice& lat, const FieldAssignment& fields, double s,
                                     const BuildOptions& opt = {}) {
    validate_lattice(lat);
    return detail::assemble_hamiltonian(std::vector<double>(lat.n_sites, s), lat.edges, lat.base, s, fields.values,
                                        opt);
}

/// Same, taking the per-site spins stored in the lattice. A two-site system
/// may carry distinct spins; the reference scale is then sqrt(s1 s2).
inline Hamiltonian build_hamiltonian(const SpinLattice& lat, const FieldAssignment& fields,
                                     const BuildOptions& opt = {}) {
    validate_lattice(lat);
    double s_ref = lat.spin.front();
    if (lat.n_sites == 2 && lat.spin[0] != lat.spin[1]) s_ref = std::sqrt(lat.spin[0] * lat.spin[1]);
    return detail::assemble_hamiltonian(lat.spin, lat.edges, lat.base, s_ref, fields.values, opt);
}

/// Two-site system with (possibly distinct) spins s1, s2 at scaled fields
/// (h1, h2) and couplings j: J = s_ref j/(s1 s2), physical h^i = s_ref h_i/s_i.
inline Hamiltonian build_pair_hamiltonian(double s1, double s2, double h1, double h2, const Couplings& j,
                                          double reference_spin = 0.0, const BuildOptions& opt = {}) {
    const double s_ref = reference_spin > 0 ? reference_spin : std::sqrt(s1 * s2);
    std::vector<Edge> edges{Edge{0, 1, 1.0}};
    return detail::assemble_hamiltonian({s1, s2}, edges, j, s_ref, {h1, h2}, opt);
}

/// Debug dump: one line per basis state, "index,m_1,...,m_n,re,im".
inline void dump_state_csv(const QuantumState& st, std::ostream& os) {
    std::vector<int> k;
    for (std::size_t idx = 0; idx < st.basis.dim; ++idx) {
        st.basis.decode(idx, k);
        os << idx;
        for (int i = 0; i < st.basis.n_sites(); ++i) os << ',' << st.basis.m_value(i, k[i]);
        os << ',' << st.amp[static_cast<Eigen::Index>(idx)].real() << ',' << st.amp[static_cast<Eigen::Index>(idx)].imag()
           << '\n';
    }
}

}  // namespace xyzsep
