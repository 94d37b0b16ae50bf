#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xyzsep/common.hpp"
#include "xyzsep/lattice.hpp"

namespace xyzsep {

/// Residual of the ground-state factorization condition
///   sqrt((h1-h2)^2 + (jx+jy)^2) - sqrt((h1+h2)^2 + (jx-jy)^2) - 2 jz.
/// Zero exactly on the factorizing curve in the (h1, h2) field plane.
inline double curve_residual(double h1, double h2, const Couplings& j) {
    const double a = std::hypot(h1 - h2, j.jx + j.jy);
    const double b = std::hypot(h1 + h2, j.jx - j.jy);
    return a - b - 2.0 * j.jz;
}

enum class Branch { right, left };
enum class Sector { upper, lower };

/// Couplings mapped to the frame jx > 0, 0 <= jy < jx in which the closed-form
/// results are derived, together with the local rotations that get there.
/// Swapping x/y or rotating jx < 0 away moves the transverse axes, so the
/// factorized angles then refer to the canonical frame; the jy sign flip stays
/// within the phi = 0 family and just mirrors h2 and theta2.
struct CanonicalCouplings {
    Couplings j;
    bool swapped_xy = false;   // x <-> y axes exchanged
    bool rotated_jx = false;   // pi rotation about z on one sublattice (jx, jy negated)
    bool flipped_jy = false;   // pi rotation about x on one sublattice (jy, jz negated, h2 -> -h2)

    double map_h2_from_canonical(double h2) const { return flipped_jy ? -h2 : h2; }
    double map_h2_to_canonical(double h2) const { return flipped_jy ? -h2 : h2; }
    double map_theta2_from_canonical(double t2) const { return flipped_jy ? M_PI - t2 : t2; }
};

inline CanonicalCouplings canonicalize(const Couplings& j) {
    CanonicalCouplings c;
    c.j = j;
    if (std::abs(c.j.jy) > std::abs(c.j.jx)) {
        std::swap(c.j.jx, c.j.jy);
        c.swapped_xy = true;
    }
    if (c.j.jx < 0) {
        c.j.jx = -c.j.jx;
        c.j.jy = -c.j.jy;
        c.rotated_jx = true;
    }
    if (c.j.jy < 0) {
        c.j.jy = -c.j.jy;
        c.j.jz = -c.j.jz;
        c.flipped_jy = true;
    }
    return c;
}

namespace detail {

inline double coupling_scale(const Couplings& j) { return std::max({1.0, std::abs(j.jx), std::abs(j.jy), std::abs(j.jz)}); }

/// Flip jy < 0 into the canonical frame; reject jx <= |jy| and jx < 0, which
/// would require rotating the transverse axes (outside the phi = 0 family).
inline CanonicalCouplings require_curve_frame(const Couplings& j) {
    const double scale = coupling_scale(j);
    if (std::abs(std::abs(j.jx) - std::abs(j.jy)) <= 1e-12 * scale)
        throw ModelError("degenerate anisotropy |jy| == |jx|: the factorization curve is not defined");
    if (std::abs(j.jy) > std::abs(j.jx))
        throw ModelError("couplings must satisfy |jy| < |jx|; swap the x and y axes first (see canonicalize)");
    if (j.jx < 0)
        throw ModelError("couplings must have jx > 0; rotate one sublattice by pi about z first (see canonicalize)");
    return canonicalize(j);
}

inline bool on_curve(double h1, double h2, const Couplings& j, double tol = kCurveTol) {
    const auto c = require_curve_frame(j);
    const double r = curve_residual(h1, c.map_h2_to_canonical(h2), c.j);
    return std::abs(r) <= tol * std::max(1.0, std::abs(c.j.jx));
}

/// Branch membership in the canonical frame. For jz <= jy each curve keeps a
/// fixed sign of h1 + h2; for jz > jy the curves live at opposite-sign fields
/// and keep a fixed sign of h1 - h2 instead (h1 + h2 crosses zero at the
/// vertex there).
inline Branch branch_in_canonical(double h1, double h2, const Couplings& cj) {
    const double key = (cj.jz > cj.jy) ? (h1 - h2) : (h1 + h2);
    return key >= 0 ? Branch::right : Branch::left;
}

struct CurveFn {
    double h1, A, B, jz;
    double operator()(double h2) const { return std::hypot(h1 - h2, A) - std::hypot(h1 + h2, B) - 2.0 * jz; }
    double deriv(double h2) const {
        return (h2 - h1) / std::hypot(h1 - h2, A) - (h1 + h2) / std::hypot(h1 + h2, B);
    }
};

inline double polish_root(const CurveFn& f, double seed, double scale) {
    double x = seed;
    double fx = f(x);
    for (int it = 0; it < 80 && std::abs(fx) > 1e-16 * scale; ++it) {
        const double d = f.deriv(x);
        if (!std::isfinite(d) || std::abs(d) < 1e-18) break;
        const double x2 = x - fx / d;
        if (!std::isfinite(x2)) break;
        const double fx2 = f(x2);
        if (std::abs(fx2) >= std::abs(fx)) break;  // stagnated (double root or roundoff floor)
        x = x2;
        fx = fx2;
    }
    return x;
}

}  // namespace detail

/// All real curve points with the given h1, for both branches, obtained from
/// the closed quadratic form of the squared curve equation. Each candidate is
/// polished on the unsquared equation and sign-filtered against it, which
/// drops the squaring artifacts (they correspond to excited-state crossings).
inline std::vector<double> curve_points_h2(double h1, const Couplings& j_in) {
    const auto canon = detail::require_curve_frame(j_in);
    const Couplings& j = canon.j;
    const double A = j.jx + j.jy, B = j.jx - j.jy;
    const double scale = std::max({1.0, std::abs(h1), detail::coupling_scale(j)});
    const detail::CurveFn f{h1, A, B, j.jz};

    std::vector<double> seeds;
    if (std::abs(j.jz) < 1e-14 * scale) {
        // jz = 0: the curve is the hyperbola h1 h2 = jx jy.
        if (std::abs(h1) > 1e-14 * scale) seeds.push_back(j.jx * j.jy / h1);
    } else {
        // (h1^2 - jz^2) h2^2 - 2 jx jy h1 h2 + (jx jy - jz^2)^2 - jz^2 (h1^2 + B^2) = 0
        const double C = j.jx * j.jy - j.jz * j.jz;
        const double a = h1 * h1 - j.jz * j.jz;
        const double b = -2.0 * j.jx * j.jy * h1;
        const double c = C * C - j.jz * j.jz * (h1 * h1 + B * B);
        const double amax = std::max({std::abs(a), std::abs(b), std::abs(c)});
        if (amax == 0) return {};
        if (std::abs(a) <= 1e-14 * amax) {
            if (std::abs(b) > 1e-14 * amax) seeds.push_back(-c / b);
        } else {
            const double disc = b * b - 4.0 * a * c;
            if (disc >= 0) {
                const double sq = std::sqrt(disc);
                const double q = -0.5 * (b + (b >= 0 ? sq : -sq));
                if (q != 0) {
                    seeds.push_back(q / a);
                    seeds.push_back(c / q);
                } else {
                    seeds.push_back(0.0);
                }
            }
        }
    }

    std::vector<double> roots;
    for (double seed : seeds) {
        if (!std::isfinite(seed)) continue;
        const double x = detail::polish_root(f, seed, scale);
        const double fscale = std::max(scale, std::abs(x));
        if (std::abs(f(x)) > 1e-10 * fscale) continue;  // squaring artifact
        bool dup = false;
        for (double r : roots)
            if (std::abs(r - x) <= 1e-10 * fscale) dup = true;
        if (!dup) roots.push_back(canon.map_h2_from_canonical(x));
    }
    return roots;
}

/// The factorizing field h2 paired with h1 on the requested branch of the
/// curve, or nothing when no real solution exists there (e.g. |h1| below
/// sqrt(jz^2 - jy^2) for jz > jy >= 0). For jz > jy a single h1 can meet the
/// curve twice; the sector selector picks between the two values, ordered by
/// h2 (upper = larger).
inline std::optional<double> solve_h2(double h1, const Couplings& j, Branch branch, Sector sector = Sector::upper) {
    const auto canon = detail::require_curve_frame(j);
    std::vector<double> on_branch;
    for (double h2 : curve_points_h2(h1, j)) {
        const double h2c = canon.map_h2_to_canonical(h2);
        const double key = (canon.j.jz > canon.j.jy) ? (h1 - h2c) : (h1 + h2c);
        const double tol = 1e-12 * std::max(1.0, std::abs(h1) + std::abs(h2c));
        if (std::abs(key) <= tol || (key > 0) == (branch == Branch::right)) on_branch.push_back(h2);
    }
    if (on_branch.empty()) return std::nullopt;
    std::sort(on_branch.begin(), on_branch.end(), std::greater<double>());
    if (sector == Sector::upper) return on_branch.front();
    if (on_branch.size() < 2) return std::nullopt;
    return on_branch.back();
}

/// Vertex of the factorizing curves: the on-curve point closest to the origin.
/// Uniform fields for jz < jy, opposite fields for jz > jy, the origin itself
/// in the critical jz = jy case.
struct CurveVertex {
    double h1 = 0, h2 = 0, eps = 0;
};

inline CurveVertex vertex(const Couplings& j_in) {
    const auto canon = detail::require_curve_frame(j_in);
    const Couplings& j = canon.j;
    CurveVertex v;
    if (j.jz < j.jy) {
        v.h1 = std::sqrt((j.jx - j.jz) * (j.jy - j.jz));
        v.h2 = v.h1;
        v.eps = -(j.jx + j.jy - j.jz);
    } else if (j.jz > j.jy) {
        v.h1 = std::sqrt((j.jz - j.jy) * (j.jz + j.jx));
        v.h2 = -v.h1;
        v.eps = -(j.jx + j.jz - j.jy);
    } else {
        v.h1 = v.h2 = 0.0;
        v.eps = -j.jx;
    }
    v.h2 = canon.map_h2_from_canonical(v.h2);
    return v;
}

/// Scaled pair energy at an on-curve point, by three equivalent closed forms:
///   halfsum : -(sqrt((h1-h2)^2+(jx+jy)^2) + sqrt((h1+h2)^2+(jx-jy)^2)) / 2
///   sqrt    : -sqrt(h1^2 + h2^2 + jx^2 + jy^2 - jz^2)
///   product : -(jx jy - h1 h2)/jz            (jz != 0 only)
/// The forms must agree on-curve; eps <= -|jz| always holds for the GS branch.
struct PairEnergy {
    double eps = 0;  // adopted value (sqrt form)
    double form_halfsum = 0;
    double form_sqrt = 0;
    std::optional<double> form_product;
    double resid_halfsum_sqrt = 0;
    std::optional<double> resid_sqrt_product;
};

inline PairEnergy pair_energy(double h1, double h2, const Couplings& j, double tol = kCurveTol) {
    if (!detail::on_curve(h1, h2, j, tol)) throw ModelError("fields are not on the factorization curve");
    PairEnergy e;
    e.form_halfsum = -0.5 * (std::hypot(h1 - h2, j.jx + j.jy) + std::hypot(h1 + h2, j.jx - j.jy));
    const double rad = h1 * h1 + h2 * h2 + j.jx * j.jx + j.jy * j.jy - j.jz * j.jz;
    if (rad < 0) throw NumericsError("inconsistent on-curve point: negative radicand in the pair energy");
    e.form_sqrt = -std::sqrt(rad);
    e.eps = e.form_sqrt;
    e.resid_halfsum_sqrt = e.form_halfsum - e.form_sqrt;
    const double escale = std::max(1.0, std::abs(e.form_sqrt));
    if (std::abs(j.jz) > 1e-12 * detail::coupling_scale(j)) {
        e.form_product = -(j.jx * j.jy - h1 * h2) / j.jz;
        e.resid_sqrt_product = e.form_sqrt - *e.form_product;
        if (std::abs(*e.resid_sqrt_product) > kEnergyFormTol * escale)
            throw NumericsError("pair energy forms disagree beyond tolerance (inconsistent inputs)");
    }
    if (std::abs(e.resid_halfsum_sqrt) > kEnergyFormTol * escale)
        throw NumericsError("pair energy forms disagree beyond tolerance (inconsistent inputs)");
    if (e.eps + std::abs(j.jz) > 1e-10 * escale)
        throw NumericsError("pair energy violates eps <= -|jz|: not a ground-state curve point");
    return e;
}

/// Angles (theta1, theta2) in (0, pi) of the factorized ground state at an
/// on-curve point, from cos^2(theta_i) = (h_i^2+jy^2-jz^2)/(h_i^2+jx^2-jz^2)
/// with the cosine signs fixed so the three pair equations hold.
inline std::pair<double, double> factorized_angles(double h1, double h2, const Couplings& j_in, double tol = kCurveTol) {
    const auto canon = detail::require_curve_frame(j_in);
    const Couplings& j = canon.j;
    const double h2c = canon.map_h2_to_canonical(h2);
    if (std::abs(curve_residual(h1, h2c, j)) > tol * std::max(1.0, std::abs(j.jx)))
        throw ModelError("fields are not on the factorization curve");

    const double jy2z = j.jy * j.jy - j.jz * j.jz;
    const double jx2z = j.jx * j.jx - j.jz * j.jz;
    std::array<double, 2> h{h1, h2c};
    std::array<double, 2> cosv{}, sinv{};
    for (int i = 0; i < 2; ++i) {
        const double den = h[i] * h[i] + jx2z;
        if (den <= 0) throw NumericsError("inconsistent inputs: cos^2 theta is undefined at this point");
        double q = (h[i] * h[i] + jy2z) / den;
        if (q < -1e-12 || q > 1.0 - 1e-15)
            throw NumericsError("inconsistent inputs: cos^2 theta outside [0,1) (curve equation not satisfied)");
        q = std::max(q, 0.0);
        cosv[i] = std::sqrt(q);
        sinv[i] = std::sqrt(1.0 - q);
    }

    // Resolve cosine signs against the pair equations, same-sign angle pair.
    const double scale = std::max({1.0, std::abs(j.jx), std::abs(h1), std::abs(h2c)});
    double best = std::numeric_limits<double>::infinity();
    std::array<double, 2> bestc{};
    for (int s1 : {+1, -1})
        for (int s2 : {+1, -1}) {
            const double c1 = s1 * cosv[0], c2 = s2 * cosv[1];
            const double r_jy = j.jy - (j.jx * c1 * c2 + j.jz * sinv[0] * sinv[1]);
            const double r_h1 = h1 * sinv[0] - (j.jx * c1 * sinv[1] - j.jz * sinv[0] * c2);
            const double r_h2 = h2c * sinv[1] - (j.jx * c2 * sinv[0] - j.jz * sinv[1] * c1);
            const double resid = std::max({std::abs(r_jy), std::abs(r_h1), std::abs(r_h2)});
            if (resid < best) {
                best = resid;
                bestc = {c1, c2};
            }
        }
    if (best > kAngleTol * scale)
        throw NumericsError("no cosine sign assignment satisfies the pair equations at this point");
    double t1 = std::acos(std::clamp(bestc[0], -1.0, 1.0));
    double t2 = std::acos(std::clamp(bestc[1], -1.0, 1.0));
    return {t1, canon.map_theta2_from_canonical(t2)};
}

/// A fully resolved point of the factorizing curve with consistency diagnostics.
struct FactorizationPoint {
    double h1 = 0, h2 = 0;
    double theta1 = 0, theta2 = 0;
    double phi1 = 0, phi2 = 0;  // zero throughout the alternating-solution family
    double eps = 0;
    Branch branch = Branch::right;
    std::map<std::string, double> residuals;
};

inline FactorizationPoint factorization_point(double h1, double h2, const Couplings& j, double tol = kCurveTol) {
    const auto canon = detail::require_curve_frame(j);
    FactorizationPoint p;
    p.h1 = h1;
    p.h2 = h2;
    std::tie(p.theta1, p.theta2) = factorized_angles(h1, h2, j, tol);
    const PairEnergy e = pair_energy(h1, h2, j, tol);
    p.eps = e.eps;
    const double h2c = canon.map_h2_to_canonical(h2);
    p.branch = detail::branch_in_canonical(h1, h2c, canon.j);

    const double c1 = std::cos(p.theta1), s1 = std::sin(p.theta1);
    const double c2 = std::cos(p.theta2), s2 = std::sin(p.theta2);
    p.residuals["curve"] = curve_residual(h1, h2c, canon.j);
    p.residuals["energy_halfsum_sqrt"] = e.resid_halfsum_sqrt;
    if (e.resid_sqrt_product) p.residuals["energy_sqrt_product"] = *e.resid_sqrt_product;
    p.residuals["pair_coupling"] = j.jy - (j.jx * c1 * c2 + j.jz * s1 * s2);
    p.residuals["pair_field_1"] = h1 * s1 - (j.jx * c1 * s2 - j.jz * s1 * c2);
    p.residuals["pair_field_2"] = h2 * s2 - (j.jx * c2 * s1 - j.jz * s2 * c1);
    p.residuals["gs_bound"] = std::max(0.0, p.eps + std::abs(j.jz));
    return p;
}

/// Solve for h2 on the requested branch/sector and assemble the full point.
inline std::optional<FactorizationPoint> solve_point(double h1, const Couplings& j, Branch branch,
                                                     Sector sector = Sector::upper, double tol = kCurveTol) {
    const auto h2 = solve_h2(h1, j, branch, sector);
    if (!h2) return std::nullopt;
    return factorization_point(h1, *h2, j, tol);
}

/// Residuals of the general separability equations for an arbitrary product
/// state {theta_i, phi_i} under the given fields. All residuals vanish iff the
/// product state is an exact eigenstate. Couplings are the scaled per-edge
/// values r_ij * j (spin independent).
struct SeparabilityResiduals {
    struct EdgeResidual {
        int i, j;
        double coupling;        // jx/jy/jz balance across the edge
        double coupling_phase;  // transverse-phase counterpart
    };
    struct SiteResidual {
        int i;
        double field;  // theta stationarity: determines the factorizing field
        double phase;  // phi stationarity
    };
    std::vector<EdgeResidual> edge;
    std::vector<SiteResidual> site;

    double max_abs() const {
        double m = 0;
        for (const auto& e : edge) m = std::max({m, std::abs(e.coupling), std::abs(e.coupling_phase)});
        for (const auto& s : site) m = std::max({m, std::abs(s.field), std::abs(s.phase)});
        return m;
    }
};

inline SeparabilityResiduals separability_residuals(const SpinLattice& lat, const std::vector<double>& theta,
                                                    const std::vector<double>& phi, const FieldAssignment& fields) {
    validate_lattice(lat);
    const int n = lat.n_sites;
    if (static_cast<int>(theta.size()) != n || static_cast<int>(phi.size()) != n)
        throw ModelError("angle lists must have one entry per site");
    if (static_cast<int>(fields.values.size()) != n) throw ModelError("field list must have one entry per site");

    std::vector<double> ct(n), st(n), cp(n), sp(n);
    for (int i = 0; i < n; ++i) {
        ct[i] = std::cos(theta[i]);
        st[i] = std::sin(theta[i]);
        cp[i] = std::cos(phi[i]);
        sp[i] = std::sin(phi[i]);
    }

    SeparabilityResiduals out;
    for (const auto& e : lat.edges) {
        const int i = e.i, j = e.j;
        const double jx = e.r * lat.base.jx, jy = e.r * lat.base.jy, jz = e.r * lat.base.jz;
        const double ra = jx * (ct[i] * cp[i] * ct[j] * cp[j] - sp[i] * sp[j]) + jz * st[i] * st[j] -
                          jy * (cp[i] * cp[j] - ct[i] * sp[i] * ct[j] * sp[j]);
        const double rb = jx * (ct[i] * cp[i] * sp[j] + sp[i] * ct[j] * cp[j]) -
                          jy * (ct[i] * sp[i] * cp[j] + cp[i] * ct[j] * sp[j]);
        out.edge.push_back({i, j, ra, rb});
    }
    const auto adj = lat.adjacency();
    for (int i = 0; i < n; ++i) {
        double sum_a = 0, sum_b = 0;
        for (auto [j, r] : adj[i]) {
            const double jx = r * lat.base.jx, jy = r * lat.base.jy, jz = r * lat.base.jz;
            sum_a += ct[i] * st[j] * (jx * cp[i] * cp[j] + jy * sp[i] * sp[j]) - jz * st[i] * ct[j];
            sum_b += st[j] * (jx * sp[i] * cp[j] - jy * cp[i] * sp[j]);
        }
        out.site.push_back({i, fields.values[i] * st[i] - sum_a, sum_b});
    }
    return out;
}

/// Per-site angles for the alternating pattern (theta1 on sublattice A).
inline std::vector<double> alternating_angles(const SpinLattice& lat, double theta1, double theta2) {
    const auto color = bipartite_coloring(lat);
    std::vector<double> theta(lat.n_sites);
    for (int i = 0; i < lat.n_sites; ++i) theta[i] = color[i] == 0 ? theta1 : theta2;
    return theta;
}

/// Factorization data induced on a general graph by per-site angles: the
/// required per-edge jy, the partial fields h^{ij} and the total site fields,
/// plus the total energy E = s * sum of per-edge pair energies.
struct GraphFactorization {
    struct EdgeData {
        int i, j;
        double jy_required;    // jx^e cos(ti) cos(tj) + jz^e sin(ti) sin(tj)
        double h_ij, h_ji;     // partial fields at i due to j and vice versa
        double curve_residual; // pair curve equation on the partial fields
        double eps;            // scaled pair energy of the edge
        bool gs_ok;            // |jy_required| < jx^e (ground-state status possible)
    };
    std::vector<EdgeData> edges;
    std::vector<double> site_fields;
    std::vector<double> theta;
    double total_energy = 0;
    double max_curve_residual = 0;
};

inline GraphFactorization graph_factorization(const SpinLattice& lat, const std::vector<double>& theta) {
    validate_lattice(lat);
    if (static_cast<int>(theta.size()) != lat.n_sites) throw ModelError("angle list must have one entry per site");
    const double s = lat.uniform_spin();
    std::vector<double> ct(lat.n_sites), st(lat.n_sites);
    for (int i = 0; i < lat.n_sites; ++i) {
        ct[i] = std::cos(theta[i]);
        st[i] = std::sin(theta[i]);
        if (std::abs(st[i]) < 1e-12)
            throw ModelError("sin(theta) vanishes at site " + std::to_string(i + 1) + "; partial fields are singular");
    }

    GraphFactorization g;
    g.theta = theta;
    g.site_fields.assign(lat.n_sites, 0.0);
    double eps_sum = 0;
    for (const auto& e : lat.edges) {
        const double jx = e.r * lat.base.jx, jz = e.r * lat.base.jz;
        GraphFactorization::EdgeData d;
        d.i = e.i;
        d.j = e.j;
        d.jy_required = jx * ct[e.i] * ct[e.j] + jz * st[e.i] * st[e.j];
        d.h_ij = jx * ct[e.i] * st[e.j] / st[e.i] - jz * ct[e.j];
        d.h_ji = jx * ct[e.j] * st[e.i] / st[e.j] - jz * ct[e.i];
        d.gs_ok = std::abs(d.jy_required) < jx;
        d.curve_residual = curve_residual(d.h_ij, d.h_ji, Couplings{jx, d.jy_required, jz});
        // pure angle form of the pair energy (exact for any angles)
        d.eps = -jx * (st[e.i] * st[e.i] + st[e.j] * st[e.j] - st[e.i] * st[e.i] * st[e.j] * st[e.j]) /
                    (st[e.i] * st[e.j]) +
                jz * ct[e.i] * ct[e.j];
        g.site_fields[e.i] += d.h_ij;
        g.site_fields[e.j] += d.h_ji;
        eps_sum += d.eps;
        g.max_curve_residual = std::max(g.max_curve_residual, std::abs(d.curve_residual));
        g.edges.push_back(d);
    }
    g.total_energy = s * eps_sum;
    return g;
}

/// First-order splitting of the two crossing parity levels for field
/// deviations delta_h off the factorizing curve:
///   2 s O/(1 - O^2) * sum_i sin^2(theta_i)/cos(theta_i) * delta_h_i,
/// with O the overlap of the two factorized states, prod_i cos^{2s}(theta_i).
inline double energy_splitting_estimate(const std::vector<double>& theta, double s,
                                        const std::vector<double>& delta_h) {
    if (theta.size() != delta_h.size()) throw ModelError("theta and delta_h must have equal lengths");
    const int twos = twice_spin(s);
    double overlap = 1.0;
    for (double t : theta) {
        if (std::abs(std::cos(t)) < 1e-9)
            throw NumericsError("splitting estimate singular: theta = pi/2 at some site");
        overlap *= int_pow(std::cos(t), twos);
    }
    double sum = 0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double c = std::cos(theta[i]), sn = std::sin(theta[i]);
        sum += sn * sn / c * delta_h[i];
    }
    return 2.0 * s * overlap / (1.0 - overlap * overlap) * sum;
}

}  // namespace xyzsep
