#pragma once

#include <Eigen/Dense>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "xyzsep/common.hpp"
#include "xyzsep/factorization.hpp"
#include "xyzsep/hilbert.hpp"
#include "xyzsep/observables.hpp"
#include "xyzsep/spectrum.hpp"

namespace xyzsep {

struct GridSpec {
    double h1_lo = -2, h1_hi = 2;
    double h2_lo = -2, h2_hi = 2;
    int n1 = 200, n2 = 200;

    void validate() const {
        if (n1 < 2 || n2 < 2) throw ModelError("grid needs at least 2 points per axis");
        if (!(h1_lo < h1_hi) || !(h2_lo < h2_hi)) throw ModelError("grid ranges must be increasing");
    }
    double h1_at(int i) const { return h1_lo + (h1_hi - h1_lo) * i / (n1 - 1); }
    double h2_at(int j) const { return h2_lo + (h2_hi - h2_lo) * j / (n2 - 1); }
    double cell_h2() const { return (h2_hi - h2_lo) / (n2 - 1); }
};

namespace detail {

inline std::string fmt_double(double v) {
    std::array<char, 32> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), p);
}

/// Run fn(row, worker) over rows [0, n_rows) with a deterministic strided
/// partition; results must be written to row-indexed slots.
inline void parallel_rows(int n_rows, int threads, const std::function<void(int, int)>& fn) {
    int T = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (T < 1) T = 1;
    T = std::min(T, n_rows);
    if (T == 1) {
        for (int r = 0; r < n_rows; ++r) fn(r, 0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(T);
    for (int w = 0; w < T; ++w)
        pool.emplace_back([w, T, n_rows, &fn] {
            for (int r = w; r < n_rows; r += T) fn(r, w);
        });
    for (auto& t : pool) t.join();
}

}  // namespace detail

/// Per-cell parity solver for alternating-field scans. The coupling part of
/// each parity block is assembled once; a field point only shifts the block
/// diagonal through the two sublattice magnetization profiles. Sector minima
/// come from a short Lanczos run on the sparse block (dense fallback), which
/// keeps large grids cheap.
class AlternatingGapSolver {
  public:
    AlternatingGapSolver(const SpinLattice& lat, double s, const SolveOptions& opt = {}) : opt_(opt) {
        const auto color = bipartite_coloring(lat);
        const auto r = coordination_numbers(lat);
        FieldAssignment zero;
        zero.values.assign(lat.n_sites, 0.0);
        const Hamiltonian H = build_hamiltonian(lat, zero, s, BuildOptions{opt.dense_threshold});
        if (!H.dense) throw ModelError("alternating-field scan supports dense dimensions only");
        j_max_abs_ = H.max_abs;

        std::vector<std::size_t> pos(H.dim());
        std::array<std::vector<std::size_t>, 2> ids;
        for (std::size_t g = 0; g < H.dim(); ++g) {
            const int sect = H.basis.parity(g) > 0 ? 0 : 1;
            pos[g] = ids[sect].size();
            ids[sect].push_back(g);
        }
        std::vector<int> dig;
        for (int sect = 0; sect < 2; ++sect) {
            const auto& I = ids[sect];
            const Eigen::Index d = static_cast<Eigen::Index>(I.size());
            blocks_[sect].resize(d, d);
            for (Eigen::Index a = 0; a < d; ++a)
                for (Eigen::Index b = 0; b < d; ++b)
                    blocks_[sect](a, b) = H.dmat(static_cast<Eigen::Index>(I[a]), static_cast<Eigen::Index>(I[b]));
            sparse_[sect] = blocks_[sect].sparseView();
            sparse_[sect].makeCompressed();
            sparse_ld_[sect] = sparse_[sect].cast<long double>();
            diag_a_[sect].resize(d);
            diag_b_[sect].resize(d);
            for (Eigen::Index t = 0; t < d; ++t) {
                H.basis.decode(I[t], dig);
                double sa = 0, sb = 0;
                for (int i = 0; i < lat.n_sites; ++i)
                    (color[i] == 0 ? sa : sb) += r[i] * H.basis.m_value(i, dig[i]);
                diag_a_[sect](t) = sa;
                diag_b_[sect](t) = sb;
            }
            field_scale_ = std::max({field_scale_, diag_a_[sect].cwiseAbs().maxCoeff(),
                                     diag_b_[sect].cwiseAbs().maxCoeff()});
        }
    }

    using LongVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

    struct Workspace {
        Eigen::VectorXd diag, w;
        std::vector<Eigen::VectorXd> lanczos;
        std::array<Eigen::VectorXd, 2> warm;  // previous GS vector per sector
        Eigen::MatrixXd m;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        LongVec diag_ld, w_ld;
        std::vector<LongVec> lanczos_ld;
    };

    /// (E+_min, E-_min) at the alternating field point (h1, h2).
    std::pair<double, double> sector_minima(double h1, double h2, Workspace& ws) const {
        std::array<double, 2> e{};
        for (int sect = 0; sect < 2; ++sect) {
            ws.diag = -h1 * diag_a_[sect] - h2 * diag_b_[sect];
            const double scale = std::max(1.0, j_max_abs_ + ws.diag.cwiseAbs().maxCoeff());
            const Eigen::Index d = blocks_[sect].rows();
            if (d <= 32) {
                ws.m = blocks_[sect];
                ws.m.diagonal() += ws.diag;
                ws.es.compute(ws.m, Eigen::EigenvaluesOnly);
                e[sect] = ws.es.eigenvalues()(0);
                continue;
            }
            const auto lowest = lanczos_min(sect, ws, scale);
            if (lowest) {
                e[sect] = *lowest;
            } else {
                ws.m = blocks_[sect];
                ws.m.diagonal() += ws.diag;
                ws.es.compute(ws.m, Eigen::ComputeEigenvectors);
                e[sect] = ws.es.eigenvalues()(0);
                ws.warm[sect] = ws.es.eigenvectors().col(0);
            }
        }
        return {e[0], e[1]};
    }

    double gap(double h1, double h2, Workspace& ws) const {
        const auto [ep, em] = sector_minima(h1, h2, ws);
        return em - ep;
    }

    /// Gap with extended-precision refinement when the double-precision value
    /// sits at the roundoff floor (used by transition-line continuation near
    /// points where many curves coalesce).
    double gap_refined(double h1, double h2, Workspace& ws) const {
        const double g = gap(h1, h2, ws);
        const double scale = std::max(1.0, j_max_abs_ + (std::abs(h1) + std::abs(h2)) * field_scale_);
        if (std::abs(g) > 2e-14 * scale) return g;
        long double e[2];
        for (int sect = 0; sect < 2; ++sect) {
            ws.diag_ld = (-h1 * diag_a_[sect] - h2 * diag_b_[sect]).cast<long double>();
            const auto lowest = lanczos_min_ld(sect, ws, static_cast<long double>(scale));
            if (!lowest) return g;  // keep the double-precision value
            e[sect] = *lowest;
        }
        return static_cast<double>(e[1] - e[0]);
    }

    /// GS parity at (h1, h2): +1, -1, or 0 within the degeneracy tolerance.
    int parity(double h1, double h2, Workspace& ws) const {
        const double g = gap(h1, h2, ws);
        if (std::abs(g) < degeneracy_tol(h1, h2)) return 0;
        return g > 0 ? +1 : -1;
    }

    double degeneracy_tol(double h1, double h2) const {
        const double scale = std::max(1.0, j_max_abs_ + (std::abs(h1) + std::abs(h2)) * field_scale_);
        return opt_.degeneracy_rel_tol * scale;
    }

  private:
    /// Smallest eigenvalue of block + diag via Lanczos with full
    /// reorthogonalization, warm-started from the previous cell's ground
    /// vector (cells along a scan row vary smoothly, so a handful of
    /// iterations suffice). Returns nothing when unconverged; the caller then
    /// falls back to the dense solver and reseeds the warm vector.
    std::optional<double> lanczos_min(int sect, Workspace& ws, double scale) const {
        const Eigen::SparseMatrix<double>& A = sparse_[sect];
        const Eigen::Index d = A.rows();
        const int max_m = static_cast<int>(std::min<Eigen::Index>(d, 120));
        auto& V = ws.lanczos;
        V.clear();
        if (ws.warm[sect].size() == d) {
            V.emplace_back(ws.warm[sect]);
        } else {
            Eigen::VectorXd v0 = Eigen::VectorXd::Constant(d, 1.0 / std::sqrt(double(d)));
            for (Eigen::Index t = 0; t < d; ++t) v0[t] += 1e-3 * std::sin(0.7 * double(t) + 0.3);
            v0.normalize();
            V.push_back(std::move(v0));
        }
        std::vector<double> alpha, beta;
        const double tol = 1e-13;
        Eigen::VectorXd& w = ws.w;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        for (int m = 1; m <= max_m; ++m) {
            w = A * V.back() + ws.diag.cwiseProduct(V.back());
            if (V.size() >= 2) w -= beta.back() * V[V.size() - 2];
            const double a = V.back().dot(w);
            alpha.push_back(a);
            w -= a * V.back();
            for (const auto& u : V) w -= u.dot(w) * u;
            const double b = w.norm();
            const int msz = static_cast<int>(alpha.size());
            const bool invariant = b < 1e-13 * scale;
            const bool check = invariant || msz <= 24 || msz % 4 == 0 || m == max_m;
            if (check) {
                Eigen::MatrixXd T = Eigen::MatrixXd::Zero(msz, msz);
                for (int i = 0; i < msz; ++i) {
                    T(i, i) = alpha[i];
                    if (i + 1 < msz) T(i, i + 1) = T(i + 1, i) = beta[i];
                }
                tri.compute(T);
                const double res = std::abs(b * tri.eigenvectors()(msz - 1, 0));
                if (res <= tol * scale || invariant) {
                    ws.warm[sect].resize(d);
                    ws.warm[sect].setZero();
                    for (int t = 0; t < msz; ++t) ws.warm[sect] += tri.eigenvectors()(t, 0) * V[t];
                    ws.warm[sect].normalize();
                    return tri.eigenvalues()(0);
                }
            }
            if (m == max_m) break;
            beta.push_back(b);
            V.push_back(w / b);
        }
        ws.warm[sect].resize(0);
        return std::nullopt;
    }

    /// Extended-precision Lanczos for the sector minimum, warm-started from
    /// the double-precision ground vector.
    std::optional<long double> lanczos_min_ld(int sect, Workspace& ws, long double scale) const {
        const Eigen::SparseMatrix<long double>& A = sparse_ld_[sect];
        const Eigen::Index d = A.rows();
        const int max_m = static_cast<int>(std::min<Eigen::Index>(d, 160));
        auto& V = ws.lanczos_ld;
        V.clear();
        if (ws.warm[sect].size() == d) {
            V.emplace_back(ws.warm[sect].cast<long double>());
            V[0].normalize();
        } else {
            LongVec v0 = LongVec::Constant(d, 1.0L / std::sqrt((long double)d));
            for (Eigen::Index t = 0; t < d; ++t) v0[t] += 1e-3L * std::sin(0.7L * (long double)t + 0.3L);
            v0.normalize();
            V.push_back(std::move(v0));
        }
        std::vector<long double> alpha, beta;
        const long double tol = 1e-17L;
        LongVec& w = ws.w_ld;
        using LongMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
        Eigen::SelfAdjointEigenSolver<LongMat> tri;
        for (int m = 1; m <= max_m; ++m) {
            w = A * V.back() + ws.diag_ld.cwiseProduct(V.back());
            if (V.size() >= 2) w -= beta.back() * V[V.size() - 2];
            const long double a = V.back().dot(w);
            alpha.push_back(a);
            w -= a * V.back();
            for (const auto& u : V) w -= u.dot(w) * u;
            const long double b = w.norm();
            const int msz = static_cast<int>(alpha.size());
            const bool invariant = b < 1e-18L * scale;
            if (invariant || msz <= 30 || msz % 4 == 0 || m == max_m) {
                LongMat T = LongMat::Zero(msz, msz);
                for (int i = 0; i < msz; ++i) {
                    T(i, i) = alpha[i];
                    if (i + 1 < msz) T(i, i + 1) = T(i + 1, i) = beta[i];
                }
                tri.compute(T);
                const long double res = std::abs(b * tri.eigenvectors()(msz - 1, 0));
                if (res <= tol * scale || invariant) return tri.eigenvalues()(0);
            }
            if (m == max_m) break;
            beta.push_back(b);
            V.push_back(w / b);
        }
        return std::nullopt;
    }

    SolveOptions opt_;
    std::array<Eigen::MatrixXd, 2> blocks_;  // [0] even, [1] odd
    std::array<Eigen::SparseMatrix<double>, 2> sparse_;
    std::array<Eigen::SparseMatrix<long double>, 2> sparse_ld_;
    std::array<Eigen::VectorXd, 2> diag_a_, diag_b_;
    double j_max_abs_ = 0;
    double field_scale_ = 0;
};

struct ParityDiagram {
    GridSpec grid;
    std::vector<std::int8_t> parity;  // row-major, h1 outer: index = i * n2 + j
    std::vector<std::vector<std::array<double, 2>>> polylines;
    std::vector<std::array<double, 3>> analytic_curve;  // (h1, h2, curve residual)

    std::int8_t at(int i, int j) const { return parity[static_cast<std::size_t>(i) * grid.n2 + j]; }
};

/// GS parity over an (h1, h2) alternating-field grid, with transition points
/// refined along each grid row by bisection and chained into polylines, plus
/// samples of the analytic factorization curve inside the window.
inline ParityDiagram scan_parity(const SpinLattice& lat, double s, const GridSpec& grid, int threads = 0,
                                 const SolveOptions& opt = {}, double refine_tol = 1e-8) {
    grid.validate();
    const AlternatingGapSolver solver(lat, s, opt);

    ParityDiagram out;
    out.grid = grid;
    out.parity.assign(static_cast<std::size_t>(grid.n1) * grid.n2, 0);
    // Raw signed gaps: the parity map thresholds them, but crossing extraction
    // tracks their sign directly so transition lines stay connected through
    // near-degenerate regions (the gap sign is meaningful well below the
    // degeneracy tolerance).
    std::vector<double> gaps(out.parity.size(), 0.0);
    std::vector<std::vector<std::array<double, 2>>> row_pts(grid.n1), col_pts(grid.n2);

    auto bisect = [&](double lo, double hi, double ga, const std::function<double(double)>& g) {
        while (hi - lo > refine_tol) {
            const double m = 0.5 * (lo + hi);
            const double gm = g(m);
            if (gm == 0.0) return m;
            if ((gm > 0) == (ga > 0)) {
                lo = m;
                ga = gm;
            } else {
                hi = m;
            }
        }
        return 0.5 * (lo + hi);
    };

    const int T = threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    std::vector<AlternatingGapSolver::Workspace> ws(std::max(1, std::min(T, std::max(grid.n1, grid.n2))));
    detail::parallel_rows(grid.n1, threads, [&](int i, int w) {
        auto& work = ws[w];
        work.warm[0].resize(0);  // row-local warm starts keep results
        work.warm[1].resize(0);  // independent of the thread partition
        const double h1 = grid.h1_at(i);
        for (int j = 0; j < grid.n2; ++j) {
            const double g = solver.gap(h1, grid.h2_at(j), work);
            gaps[static_cast<std::size_t>(i) * grid.n2 + j] = g;
            out.parity[static_cast<std::size_t>(i) * grid.n2 + j] =
                std::abs(g) < solver.degeneracy_tol(h1, grid.h2_at(j)) ? 0 : (g > 0 ? +1 : -1);
        }
        for (int j = 0; j + 1 < grid.n2; ++j) {
            const double ga = gaps[static_cast<std::size_t>(i) * grid.n2 + j];
            const double gb = gaps[static_cast<std::size_t>(i) * grid.n2 + j + 1];
            if (ga == 0.0 || gb == 0.0 || (ga > 0) == (gb > 0)) continue;
            const double h2 = bisect(grid.h2_at(j), grid.h2_at(j + 1), ga,
                                     [&](double x) { return solver.gap(h1, x, work); });
            row_pts[i].push_back({h1, h2});
        }
    });
    // column pass (catches curve segments running parallel to the h2 axis)
    detail::parallel_rows(grid.n2, threads, [&](int j, int w) {
        auto& work = ws[w];
        work.warm[0].resize(0);
        work.warm[1].resize(0);
        const double h2 = grid.h2_at(j);
        for (int i = 0; i + 1 < grid.n1; ++i) {
            const double ga = gaps[static_cast<std::size_t>(i) * grid.n2 + j];
            const double gb = gaps[static_cast<std::size_t>(i + 1) * grid.n2 + j];
            if (ga == 0.0 || gb == 0.0 || (ga > 0) == (gb > 0)) continue;
            const double h1 = bisect(grid.h1_at(i), grid.h1_at(i + 1), ga,
                                     [&](double x) { return solver.gap(x, h2, work); });
            col_pts[j].push_back({h1, h2});
        }
    });

    // Assemble polylines by tracking each transition line from a detected
    // crossing: predictor-corrector steps along the local tangent, with the
    // crossing re-located by bisection along the normal at every step. The
    // tracker walks through regions where the wedge between opposite-parity
    // sectors is narrower than a grid cell (e.g. near the origin when all
    // curves meet there), which grid scanning alone cannot resolve.
    std::vector<std::array<double, 2>> pts;
    for (auto& v : row_pts) pts.insert(pts.end(), v.begin(), v.end());
    for (auto& v : col_pts) pts.insert(pts.end(), v.begin(), v.end());
    const double cell1 = (grid.h1_hi - grid.h1_lo) / (grid.n1 - 1);
    const double cell_max = std::max(cell1, grid.cell_h2());
    const double track_step = 0.9 * cell_max;
    std::vector<char> claimed(pts.size(), 0);
    auto claim_near = [&](const std::array<double, 2>& q) {
        for (std::size_t t = 0; t < pts.size(); ++t)
            if (!claimed[t] && std::hypot(pts[t][0] - q[0], pts[t][1] - q[1]) <= 0.75 * cell_max) claimed[t] = 1;
    };
    auto in_grid = [&](double x, double y) {
        return x >= grid.h1_lo && x <= grid.h1_hi && y >= grid.h2_lo && y <= grid.h2_hi;
    };
    AlternatingGapSolver::Workspace track_ws;  // fresh state: tracking result is partition independent
    auto& work0 = track_ws;

    struct March {
        std::vector<std::array<double, 2>> path;
        bool looped = false;
    };
    auto march = [&](std::array<double, 2> cur, double dx, double dy) {
        March out_m;
        std::vector<std::array<double, 2>>& path = out_m.path;
        const std::array<double, 2> start = cur;
        double step = track_step;
        const int max_steps = 4 * (grid.n1 + grid.n2);
        long evals = 0;
        const long eval_budget = 60L * (grid.n1 + grid.n2);
        auto gap_at = [&](double x, double y) {
            ++evals;
            return solver.gap_refined(x, y, work0);
        };
        int rescues = 0;
        for (int it = 0; it < 8 * max_steps && static_cast<int>(path.size()) < max_steps; ++it) {
            if (evals > eval_budget) break;
            if (step < 4 * refine_tol) {
                // Re-acquire the line with a ring probe around the last point:
                // handles kinks and junctions where the normal-probe prediction
                // drifts off its sliver.
                if (++rescues > 24) break;
                bool ok = false;
                for (double radius = track_step; radius >= 16 * refine_tol && !ok; radius *= 0.5) {
                    constexpr int M = 24;
                    std::array<double, M + 1> gv{};
                    for (int k = 0; k <= M; ++k) {
                        const double a = 2.0 * M_PI * k / M;
                        const double x = cur[0] + radius * std::cos(a), y = cur[1] + radius * std::sin(a);
                        gv[k] = in_grid(x, y) ? gap_at(x, y) : 0.0;
                    }
                    double best_dot = 0.25;
                    std::array<double, 2> best_q{};
                    for (int k = 0; k < M; ++k) {
                        if (gv[k] == 0.0 || gv[k + 1] == 0.0 || (gv[k] > 0) == (gv[k + 1] > 0)) continue;
                        double alo = 2.0 * M_PI * k / M, ahi = 2.0 * M_PI * (k + 1) / M, glo = gv[k];
                        while ((ahi - alo) * radius > refine_tol) {
                            const double am = 0.5 * (alo + ahi);
                            const double gm = gap_at(cur[0] + radius * std::cos(am), cur[1] + radius * std::sin(am));
                            if (gm == 0.0) break;
                            if ((gm > 0) == (glo > 0)) {
                                alo = am;
                                glo = gm;
                            } else {
                                ahi = am;
                            }
                        }
                        const double am = 0.5 * (alo + ahi);
                        const std::array<double, 2> q{cur[0] + radius * std::cos(am), cur[1] + radius * std::sin(am)};
                        const double dq = ((q[0] - cur[0]) * dx + (q[1] - cur[1]) * dy) / radius;
                        if (dq > best_dot) {
                            best_dot = dq;
                            best_q = q;
                            ok = true;
                        }
                    }
                    if (ok) {
                        const double adv = std::hypot(best_q[0] - cur[0], best_q[1] - cur[1]);
                        dx = (best_q[0] - cur[0]) / adv;
                        dy = (best_q[1] - cur[1]) / adv;
                        cur = best_q;
                        path.push_back(cur);
                        claim_near(cur);
                        step = std::max(radius, 16 * refine_tol);
                    }
                }
                if (!ok) break;
                continue;
            }
            const double px = cur[0] + step * dx, py = cur[1] + step * dy;
            if (!in_grid(px, py)) break;
            const double nx = -dy, ny = dx;
            const double w = 0.4 * step;
            const double ga = gap_at(px - w * nx, py - w * ny);
            const double gb = gap_at(px + w * nx, py + w * ny);
            if (ga == 0.0 || gb == 0.0 || (ga > 0) == (gb > 0)) {
                step *= 0.5;  // lost the line: shorten and retry
                continue;
            }
            double lo = -w, hi = +w, glo = ga;
            while (hi - lo > refine_tol) {
                const double mid = 0.5 * (lo + hi);
                const double gm = gap_at(px + mid * nx, py + mid * ny);
                if (gm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((gm > 0) == (glo > 0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            const double t = 0.5 * (lo + hi);
            const std::array<double, 2> q{px + t * nx, py + t * ny};
            const double adv = std::hypot(q[0] - cur[0], q[1] - cur[1]);
            if (adv < 2 * refine_tol) break;
            dx = (q[0] - cur[0]) / adv;
            dy = (q[1] - cur[1]) / adv;
            cur = q;
            if (path.empty() || std::hypot(q[0] - path.back()[0], q[1] - path.back()[1]) >= 0.05 * track_step) {
                path.push_back(q);
                claim_near(q);
            }
            step = std::min(track_step, 1.5 * step);  // recover after transient shrinks
            if (path.size() > 12 && std::hypot(cur[0] - start[0], cur[1] - start[1]) < 0.9 * track_step) {
                path.push_back(start);  // closed transition loop
                out_m.looped = true;
                break;
            }
        }
        return out_m;
    };

    std::vector<std::vector<std::array<double, 2>>> tracks;
    for (std::size_t seed = 0; seed < pts.size(); ++seed) {
        if (claimed[seed]) continue;
        const auto p0 = pts[seed];
        claimed[seed] = 1;
        // tangent from the gap gradient (the line is a level set of the gap)
        const double d = 0.25 * cell_max;
        const double gx = solver.gap_refined(p0[0] + d, p0[1], work0) - solver.gap_refined(p0[0] - d, p0[1], work0);
        const double gy = solver.gap_refined(p0[0], p0[1] + d, work0) - solver.gap_refined(p0[0], p0[1] - d, work0);
        const double gn = std::hypot(gx, gy);
        if (gn < 1e-300) {
            tracks.push_back({p0});
            continue;
        }
        const double tx = -gy / gn, ty = gx / gn;
        claim_near(p0);
        const auto fwd = march(p0, tx, ty);
        if (fwd.looped) {
            std::vector<std::array<double, 2>> path{p0};
            path.insert(path.end(), fwd.path.begin(), fwd.path.end());
            tracks.push_back(std::move(path));
            continue;
        }
        const auto bwd = march(p0, -tx, -ty);
        std::vector<std::array<double, 2>> path(bwd.path.rbegin(), bwd.path.rend());
        path.push_back(p0);
        path.insert(path.end(), fwd.path.begin(), fwd.path.end());
        tracks.push_back(std::move(path));
    }
    // drop tracks that only retrace already-kept lines
    std::vector<std::size_t> order(tracks.size());
    for (std::size_t t = 0; t < tracks.size(); ++t) order[t] = t;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return tracks[a].size() != tracks[b].size() ? tracks[a].size() > tracks[b].size() : a < b;
    });
    std::vector<std::array<double, 2>> kept_pts;
    for (std::size_t t : order) {
        const auto& cand = tracks[t];
        std::size_t covered = 0;
        for (const auto& q : cand) {
            for (const auto& r : kept_pts)
                if (std::hypot(q[0] - r[0], q[1] - r[1]) <= 0.75 * cell_max) {
                    ++covered;
                    break;
                }
        }
        if (!kept_pts.empty() && covered >= (95 * cand.size() + 99) / 100) continue;
        kept_pts.insert(kept_pts.end(), cand.begin(), cand.end());
        out.polylines.push_back(cand);
    }

    // analytic curve overlay
    try {
        for (int i = 0; i < grid.n1; ++i) {
            const double h1 = grid.h1_at(i);
            for (double h2 : curve_points_h2(h1, lat.base)) {
                if (h2 < grid.h2_lo || h2 > grid.h2_hi) continue;
                const auto canon = canonicalize(lat.base);
                const double res = curve_residual(h1, canon.map_h2_to_canonical(h2), canon.j);
                out.analytic_curve.push_back({h1, h2, res});
            }
        }
    } catch (const ModelError&) {
        // degenerate anisotropy: no analytic curve to overlay
    }
    return out;
}

enum class ObservableKind { Magnetization, Concurrence, Entropy };

struct ObservableSelector {
    ObservableKind kind = ObservableKind::Magnetization;
    int i = 0, j = 1;  // sites for Concurrence (i, j) / Entropy (i)
};

struct SideLimitSample {
    double h1, h2;
    double minus_limit, plus_limit;
};

struct SweepSurface {
    GridSpec grid;
    std::vector<double> value;           // row-major, h1 outer
    std::vector<std::uint8_t> degenerate;  // cell flagged when parity sectors are degenerate
    std::vector<SideLimitSample> side_limits;
};

/// Observable surface over the grid from the numerical GS (negative-parity
/// eigenvector at degeneracies, flagged), with companion closed-form side
/// limits sampled along the factorization curve.
inline SweepSurface scan_observable(const SpinLattice& lat, double s, const GridSpec& grid,
                                    const ObservableSelector& sel, int threads = 0, const SolveOptions& opt = {}) {
    grid.validate();
    if (sel.kind == ObservableKind::Entropy && (sel.i < 0 || sel.i >= lat.n_sites))
        throw ModelError("entropy site out of range");
    if (sel.kind == ObservableKind::Concurrence &&
        (sel.i < 0 || sel.j < 0 || sel.i >= lat.n_sites || sel.j >= lat.n_sites || sel.i == sel.j))
        throw ModelError("concurrence sites invalid");

    SweepSurface out;
    out.grid = grid;
    out.value.assign(static_cast<std::size_t>(grid.n1) * grid.n2, 0.0);
    out.degenerate.assign(out.value.size(), 0);

    detail::parallel_rows(grid.n1, threads, [&](int i, int) {
        const double h1 = grid.h1_at(i);
        for (int j = 0; j < grid.n2; ++j) {
            const FieldAssignment f = alternating_fields(lat, h1, grid.h2_at(j));
            const Hamiltonian H = build_hamiltonian(lat, f, s, BuildOptions{opt.dense_threshold});
            const auto sp = parity_block_spectrum(H, 1, opt, true);
            const bool degen = std::abs(sp.gap()) < sp.degeneracy_tol(opt.degeneracy_rel_tol);
            const Eigen::VectorXd& v =
                degen ? sp.odd_vectors.front()
                      : (sp.gap() > 0 ? sp.even_vectors.front() : sp.odd_vectors.front());
            QuantumState gs;
            gs.basis = H.basis;
            gs.amp = v.cast<Complex>();
            double val = std::numeric_limits<double>::quiet_NaN();
            switch (sel.kind) {
                case ObservableKind::Magnetization:
                    val = total_magnetization_z(gs);
                    break;
                case ObservableKind::Entropy:
                    val = linear_entropy(partial_trace(gs, {sel.i}));
                    break;
                case ObservableKind::Concurrence:
                    try {
                        val = concurrence(pair_density(gs, sel.i, sel.j));
                    } catch (const NumericsError&) {
                        val = std::numeric_limits<double>::quiet_NaN();
                    }
                    break;
            }
            out.value[static_cast<std::size_t>(i) * grid.n2 + j] = val;
            out.degenerate[static_cast<std::size_t>(i) * grid.n2 + j] = degen ? 1 : 0;
        }
    });

    // closed-form side limits along the factorization curve inside the window
    try {
        for (int i = 0; i < grid.n1; ++i) {
            const double h1 = grid.h1_at(i);
            for (double h2 : curve_points_h2(h1, lat.base)) {
                if (h2 < grid.h2_lo || h2 > grid.h2_hi) continue;
                const auto [t1, t2] = factorized_angles(h1, h2, lat.base);
                const auto theta = alternating_angles(lat, t1, t2);
                SideLimitSample smp{h1, h2, 0, 0};
                for (int parity : {-1, +1}) {
                    double v = 0;
                    switch (sel.kind) {
                        case ObservableKind::Magnetization:
                            for (int t = 0; t < lat.n_sites; ++t) v += side_limit_magnetization(theta, s, t, parity);
                            break;
                        case ObservableKind::Entropy:
                            v = side_limit_linear_entropy(theta, s, sel.i, parity);
                            break;
                        case ObservableKind::Concurrence:
                            v = side_limit_concurrence(theta, s, sel.i, sel.j, parity);
                            break;
                    }
                    (parity < 0 ? smp.minus_limit : smp.plus_limit) = v;
                }
                out.side_limits.push_back(smp);
            }
        }
    } catch (const ModelError&) {
    } catch (const NumericsError&) {
    }
    return out;
}

/// Number of GS parity changes along a field path.
inline int count_transitions(const SpinLattice& lat, double s, const FieldPath& path, double t0 = 0.0, double t1 = 1.0,
                             int samples = 200, const SolveOptions& opt = {}) {
    return static_cast<int>(crossing_locator(lat, s, path, t0, t1, samples, opt).size());
}

inline void write_parity_csv(const ParityDiagram& d, std::ostream& os) {
    os << "h1,h2,value\n";
    for (int i = 0; i < d.grid.n1; ++i)
        for (int j = 0; j < d.grid.n2; ++j)
            os << detail::fmt_double(d.grid.h1_at(i)) << ',' << detail::fmt_double(d.grid.h2_at(j)) << ','
               << static_cast<int>(d.at(i, j)) << '\n';
}

inline void write_surface_csv(const SweepSurface& sfc, std::ostream& os) {
    os << "h1,h2,value\n";
    for (int i = 0; i < sfc.grid.n1; ++i)
        for (int j = 0; j < sfc.grid.n2; ++j)
            os << detail::fmt_double(sfc.grid.h1_at(i)) << ',' << detail::fmt_double(sfc.grid.h2_at(j)) << ','
               << detail::fmt_double(sfc.value[static_cast<std::size_t>(i) * sfc.grid.n2 + j]) << '\n';
}

inline void write_side_limits_csv(const SweepSurface& sfc, std::ostream& os) {
    os << "h1,h2,minus_limit,plus_limit\n";
    for (const auto& s : sfc.side_limits)
        os << detail::fmt_double(s.h1) << ',' << detail::fmt_double(s.h2) << ',' << detail::fmt_double(s.minus_limit)
           << ',' << detail::fmt_double(s.plus_limit) << '\n';
}

inline void write_polylines_csv(const ParityDiagram& d, std::ostream& os) {
    os << "polyline,h1,h2\n";
    for (std::size_t p = 0; p < d.polylines.size(); ++p)
        for (const auto& pt : d.polylines[p])
            os << p << ',' << detail::fmt_double(pt[0]) << ',' << detail::fmt_double(pt[1]) << '\n';
}

inline void write_curve_overlay_csv(const ParityDiagram& d, std::ostream& os) {
    os << "h1,h2,residual\n";
    for (const auto& pt : d.analytic_curve)
        os << detail::fmt_double(pt[0]) << ',' << detail::fmt_double(pt[1]) << ',' << detail::fmt_double(pt[2]) << '\n';
}

}  // namespace xyzsep
