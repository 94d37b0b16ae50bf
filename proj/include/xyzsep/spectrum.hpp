#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "xyzsep/common.hpp"
#include "xyzsep/factorization.hpp"
#include "xyzsep/hilbert.hpp"

namespace xyzsep {

struct SolveOptions {
    std::size_t dense_threshold = 4096;  // sector dimension above which the solver goes iterative
    int lanczos_max_iter = 600;
    double lanczos_tol = 1e-12;
    double degeneracy_rel_tol = kDegeneracyTol;  // relative to max(1, max|H|)
};

/// Lowest eigenpairs per S_z-parity sector. Eigenvectors are embedded back
/// into the full space (zero outside their sector), so they are exact parity
/// eigenstates by construction.
struct ParitySpectrum {
    std::vector<double> even, odd;  // ascending, k lowest per sector
    std::vector<Eigen::VectorXd> even_vectors, odd_vectors;
    double h_max_abs = 0;

    double e_min() const { return std::min(even.front(), odd.front()); }
    /// E-_min - E+_min
    double gap() const { return odd.front() - even.front(); }
    double degeneracy_tol(double rel = kDegeneracyTol) const { return rel * std::max(1.0, h_max_abs); }
    /// +1 / -1 for a nondegenerate GS, 0 when |gap| is below tolerance.
    int gs_parity(double rel_tol = kDegeneracyTol) const {
        if (std::abs(gap()) < degeneracy_tol(rel_tol)) return 0;
        return gap() > 0 ? +1 : -1;
    }
};

namespace detail {

struct LanczosOut {
    std::vector<double> values;
    std::vector<Eigen::VectorXd> vectors;
    bool converged = false;
    int iterations = 0;
    std::vector<double> residual_norms;
};

/// Lanczos with full reorthogonalization for the k lowest eigenpairs of a
/// sparse symmetric matrix. Deterministic (fixed-seed start vector).
inline LanczosOut lanczos_lowest(const Eigen::SparseMatrix<double>& A, int k, double tol, int max_iter) {
    const Eigen::Index n = A.rows();
    k = std::min<int>(k, static_cast<int>(n));
    max_iter = std::min<int>(std::max(max_iter, 2 * k + 10), static_cast<int>(n));

    std::mt19937 rng(0x9e3779b9u);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd v = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return gauss(rng); });
    v.normalize();

    std::vector<Eigen::VectorXd> V{v};
    std::vector<double> alpha, beta;
    LanczosOut out;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    for (int m = 1; m <= max_iter; ++m) {
        Eigen::VectorXd w = A * V.back();
        if (V.size() >= 2) w -= beta.back() * V[V.size() - 2];
        const double a = V.back().dot(w);
        alpha.push_back(a);
        w -= a * V.back();
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& u : V) w -= u.dot(w) * u;
        const double b = w.norm();

        // Ritz values/residual estimates from the tridiagonal matrix.
        const int msz = static_cast<int>(alpha.size());
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(msz, msz);
        for (int i = 0; i < msz; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < msz) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        tri.compute(T);
        const double scale = std::max(1.0, std::abs(tri.eigenvalues().cwiseAbs().maxCoeff()));
        bool ok = msz >= k;
        out.residual_norms.assign(k, 0.0);
        for (int i = 0; i < k && ok; ++i) {
            const double res = msz >= k ? std::abs(b * tri.eigenvectors()(msz - 1, i)) : 1.0;
            out.residual_norms[i] = res;
            if (res > tol * scale) ok = false;
        }
        out.iterations = m;
        if (ok || b < 1e-14 * scale || m == max_iter) {
            out.converged = ok || b < 1e-14 * scale;
            const int kk = std::min(k, msz);
            for (int i = 0; i < kk; ++i) {
                out.values.push_back(tri.eigenvalues()(i));
                Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
                for (int t = 0; t < msz; ++t) y += tri.eigenvectors()(t, i) * V[t];
                y.normalize();
                out.vectors.push_back(std::move(y));
            }
            return out;
        }
        beta.push_back(b);
        V.push_back(w / b);
    }
    return out;
}

}  // namespace detail

/// Diagonalize H restricted to each parity sector: dense full solve up to the
/// dense threshold, Lanczos above it. Returns the k lowest pairs per sector.
inline ParitySpectrum parity_block_spectrum(const Hamiltonian& H, int k, const SolveOptions& opt = {},
                                            bool with_vectors = true) {
    const std::size_t dim = H.dim();
    std::vector<std::size_t> sector_of(dim);
    std::array<std::vector<std::size_t>, 2> idx;  // [0] even, [1] odd
    std::vector<std::size_t> pos(dim);
    for (std::size_t g = 0; g < dim; ++g) {
        const int sect = H.basis.parity(g) > 0 ? 0 : 1;
        sector_of[g] = sect;
        pos[g] = idx[sect].size();
        idx[sect].push_back(g);
    }

    ParitySpectrum out;
    out.h_max_abs = H.max_abs;
    for (int sect = 0; sect < 2; ++sect) {
        const auto& ids = idx[sect];
        const std::size_t d = ids.size();
        if (d == 0) throw NumericsError("empty parity sector");
        auto& vals = sect == 0 ? out.even : out.odd;
        auto& vecs = sect == 0 ? out.even_vectors : out.odd_vectors;
        const int kk = std::min<int>(k, static_cast<int>(d));

        if (d <= opt.dense_threshold) {
            Eigen::MatrixXd B = Eigen::MatrixXd::Zero(d, d);
            H.for_each_entry([&](std::size_t r, std::size_t c, double v) {
                if (sector_of[r] == static_cast<std::size_t>(sect) && sector_of[c] == static_cast<std::size_t>(sect))
                    B(static_cast<Eigen::Index>(pos[r]), static_cast<Eigen::Index>(pos[c])) += v;
            });
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
            es.compute(B, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
            for (int i = 0; i < kk; ++i) {
                vals.push_back(es.eigenvalues()(i));
                if (with_vectors) {
                    Eigen::VectorXd full = Eigen::VectorXd::Zero(dim);
                    for (std::size_t t = 0; t < d; ++t)
                        full[static_cast<Eigen::Index>(ids[t])] = es.eigenvectors()(static_cast<Eigen::Index>(t), i);
                    vecs.push_back(std::move(full));
                }
            }
        } else {
            std::vector<Eigen::Triplet<double>> trip;
            H.for_each_entry([&](std::size_t r, std::size_t c, double v) {
                if (sector_of[r] == static_cast<std::size_t>(sect) && sector_of[c] == static_cast<std::size_t>(sect))
                    trip.emplace_back(static_cast<int>(pos[r]), static_cast<int>(pos[c]), v);
            });
            Eigen::SparseMatrix<double> B(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
            B.setFromTriplets(trip.begin(), trip.end());
            auto lz = detail::lanczos_lowest(B, kk, opt.lanczos_tol, opt.lanczos_max_iter);
            if (!lz.converged) {
                std::string msg = "Lanczos did not converge; residual norms:";
                for (double r : lz.residual_norms) msg += " " + std::to_string(r);
                throw NumericsError(msg);
            }
            for (int i = 0; i < kk; ++i) {
                vals.push_back(lz.values[i]);
                if (with_vectors) {
                    Eigen::VectorXd full = Eigen::VectorXd::Zero(dim);
                    for (std::size_t t = 0; t < d; ++t)
                        full[static_cast<Eigen::Index>(ids[t])] = lz.vectors[i][static_cast<Eigen::Index>(t)];
                    vecs.push_back(std::move(full));
                }
            }
        }
    }
    return out;
}

/// GS parity of the lattice at the given fields: +1, -1, or 0 when the two
/// parity sectors are degenerate within tolerance.
inline int gs_parity(const SpinLattice& lat, const FieldAssignment& fields, double s, const SolveOptions& opt = {}) {
    const Hamiltonian H = build_hamiltonian(lat, fields, s, BuildOptions{opt.dense_threshold});
    const auto sp = parity_block_spectrum(H, 1, opt, false);
    return sp.gs_parity(opt.degeneracy_rel_tol);
}

/// Verification that an analytic product state is an exact (ground) eigenstate.
struct VerifyReport {
    double e_theta = 0;      // <T|H|T>
    double e_min = 0;        // lowest eigenvalue over both sectors
    double residual = 0;     // ||H|T> - E|T>|| / |E|
    double energy_diff = 0;  // e_theta - e_min
    double gap = 0;          // E-_min - E+_min
    double overlap_plus = 0, overlap_minus = 0;  // |<Psi+-|v+->| against the crossing eigenvectors
    bool is_eigenstate = false;
    bool is_ground_state = false;
};

inline VerifyReport verify_factorized_gs(const SpinLattice& lat, const FieldAssignment& fields, double s,
                                         const std::vector<double>& theta, const SolveOptions& opt = {}) {
    const Hamiltonian H = build_hamiltonian(lat, fields, s, BuildOptions{opt.dense_threshold});
    const QuantumState T = coherent_product_state(H.basis, theta);
    const Eigen::VectorXcd HT = H.apply(T.amp);
    VerifyReport rep;
    rep.e_theta = T.amp.dot(HT).real();
    rep.residual = (HT - rep.e_theta * T.amp).norm() / std::max(1e-300, std::abs(rep.e_theta));

    const auto sp = parity_block_spectrum(H, 1, opt, true);
    rep.e_min = sp.e_min();
    rep.energy_diff = rep.e_theta - rep.e_min;
    rep.gap = sp.gap();

    auto proj_overlap = [&](int sign, const Eigen::VectorXd& v) {
        try {
            const QuantumState P = parity_project(T, sign);
            return std::abs(P.amp.dot(v.cast<Complex>()));
        } catch (const NumericsError&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    rep.overlap_plus = proj_overlap(+1, sp.even_vectors.front());
    rep.overlap_minus = proj_overlap(-1, sp.odd_vectors.front());

    const double tol = sp.degeneracy_tol(opt.degeneracy_rel_tol);
    rep.is_eigenstate = rep.residual < 1e-9;
    rep.is_ground_state = rep.energy_diff < tol && rep.energy_diff > -tol;
    return rep;
}

/// Sign-uniformity classification of the ground eigenvector(s): with
/// |jy| < jx on every link all off-diagonal entries of H are <= 0, so a GS
/// representative with single-sign components exists in each parity sector.
struct SignStructureReport {
    bool uniform = true;
    bool degenerate = false;
    double worst_negative = 0;  // most negative component after the sign fix (0 if none)
};

inline SignStructureReport gs_sign_structure(const Hamiltonian& H, const SolveOptions& opt = {}) {
    for (const auto& e : H.edges) {
        if (e.r <= 0) continue;
        if (!(std::abs(H.base.jy) < H.base.jx))
            throw ModelError("sign-structure argument requires |jy| < jx on all links");
    }
    const auto sp = parity_block_spectrum(H, 1, opt, true);
    SignStructureReport rep;
    rep.degenerate = std::abs(sp.gap()) < sp.degeneracy_tol(opt.degeneracy_rel_tol);

    auto classify = [&](const Eigen::VectorXd& v) {
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        const double sgn = v[imax] >= 0 ? 1.0 : -1.0;
        const double tol = 1e-10 * std::abs(v[imax]);
        double worst = 0;
        for (Eigen::Index t = 0; t < v.size(); ++t) {
            const double x = sgn * v[t];
            if (x < -tol) worst = std::min(worst, x);
        }
        if (worst < 0) {
            rep.uniform = false;
            rep.worst_negative = std::min(rep.worst_negative, worst);
        }
    };
    if (rep.degenerate) {
        classify(sp.even_vectors.front());
        classify(sp.odd_vectors.front());
    } else {
        classify(sp.gap() > 0 ? sp.even_vectors.front() : sp.odd_vectors.front());
    }
    return rep;
}

/// Parametrized field configuration t -> h^i(t).
using FieldPath = std::function<FieldAssignment(double)>;

/// Linear segment in the alternating-field plane: (h1, h2) from a to b.
inline FieldPath alternating_segment(const SpinLattice& lat, double h1_a, double h2_a, double h1_b, double h2_b) {
    const auto color = bipartite_coloring(lat);
    const auto r = coordination_numbers(lat);
    const int n = lat.n_sites;
    return [=](double t) {
        FieldAssignment f;
        f.pattern = FieldAssignment::Pattern::Alternating;
        f.h1 = h1_a + t * (h1_b - h1_a);
        f.h2 = h2_a + t * (h2_b - h2_a);
        f.values.resize(n);
        for (int i = 0; i < n; ++i) f.values[i] = r[i] * (color[i] == 0 ? f.h1 : f.h2);
        return f;
    };
}

/// Linear segment between two explicit per-site field configurations.
inline FieldPath explicit_segment(std::vector<double> a, std::vector<double> b) {
    if (a.size() != b.size()) throw ModelError("field segments must have equal lengths");
    return [a = std::move(a), b = std::move(b)](double t) {
        std::vector<double> v(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i] + t * (b[i] - a[i]);
        return explicit_fields(std::move(v));
    };
}

/// Parameters t in [t0, t1] where the GS parity changes along the path,
/// refined by bisection on the signed parity gap.
inline std::vector<double> crossing_locator(const SpinLattice& lat, double s, const FieldPath& path, double t0,
                                            double t1, int samples = 200, const SolveOptions& opt = {},
                                            double t_tol = 1e-10) {
    if (samples < 2) throw ModelError("crossing search needs at least 2 samples");
    auto gap_at = [&](double t) {
        const Hamiltonian H = build_hamiltonian(lat, path(t), s, BuildOptions{opt.dense_threshold});
        return parity_block_spectrum(H, 1, opt, false).gap();
    };
    std::vector<double> crossings;
    double tp = t0, gp = gap_at(t0);
    for (int i = 1; i <= samples; ++i) {
        const double t = t0 + (t1 - t0) * i / samples;
        const double g = gap_at(t);
        if (gp == 0.0) {
            crossings.push_back(tp);
        } else if (g != 0.0 && (g > 0) != (gp > 0)) {
            double a = tp, b = t, ga = gp;
            while (b - a > t_tol) {
                const double m = 0.5 * (a + b);
                const double gm = gap_at(m);
                if (gm == 0.0) {
                    a = b = m;
                    break;
                }
                if ((gm > 0) == (ga > 0)) {
                    a = m;
                    ga = gm;
                } else {
                    b = m;
                }
            }
            crossings.push_back(0.5 * (a + b));
        }
        tp = t;
        gp = g;
    }
    if (gp == 0.0) crossings.push_back(tp);
    return crossings;
}

}  // namespace xyzsep
