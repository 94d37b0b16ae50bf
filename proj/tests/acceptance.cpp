// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. All tolerances are fixed here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "xyzsep/xyzsep.hpp"

using namespace xyzsep;

namespace {

int g_failures = 0;

struct Criterion {
    std::string name;
    bool ok = true;
    double worst = 0;  // largest deviation seen, for the report line
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    explicit Criterion(std::string n) : name(std::move(n)) {}
    void require(bool cond, double deviation = 0) {
        worst = std::max(worst, std::abs(deviation));
        if (!cond) ok = false;
    }
    void check_dev(double deviation, double tol) { require(std::abs(deviation) <= tol, deviation); }
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); }
    void finish(double time_limit_s = 0) {
        const double t = seconds();
        if (time_limit_s > 0 && t > time_limit_s) ok = false;
        std::printf("%s criterion %s (max dev %.3e, %.1f s)\n", ok ? "PASS" : "FAIL", name.c_str(), worst, t);
        std::fflush(stdout);
        if (!ok) ++g_failures;
    }
};

const Couplings kSets[4] = {{1, 0.5, -0.25}, {1, 0.5, 0.25}, {1, 0.5, 0.5}, {1, 0.5, 0.75}};

std::vector<FactorizationPoint> curve_sample(const Couplings& j, int per_branch) {
    std::vector<FactorizationPoint> pts;
    double lo = -j.jz + 0.05;
    bool two_sectors = j.jz > j.jy;
    if (two_sectors) lo = std::sqrt(j.jz * j.jz - j.jy * j.jy) + 0.01;
    const double hi = 3.0;
    for (int b = 0; b < 2; ++b) {
        const Branch br = b == 0 ? Branch::right : Branch::left;
        const double sgn = b == 0 ? 1.0 : -1.0;
        int added = 0;
        for (int t = 0; t < 4 * per_branch && added < per_branch; ++t) {
            const double h1 = sgn * (lo + (hi - lo) * t / (2.0 * per_branch));
            const Sector sec = (two_sectors && t % 2 == 1) ? Sector::lower : Sector::upper;
            auto pt = solve_point(h1, j, br, sec);
            if (!pt) continue;
            if (std::abs(pt->h2) > 25) continue;  // keep clear of the asymptotic blowup
            pts.push_back(*pt);
            ++added;
        }
    }
    return pts;
}

double product_residual(const Hamiltonian& H, const std::vector<double>& theta, double* e_out = nullptr) {
    auto st = coherent_product_state(H.basis, theta);
    const Eigen::VectorXcd Ht = H.apply(st.amp);
    const double e = st.amp.dot(Ht).real();
    if (e_out) *e_out = e;
    return (Ht - e * st.amp).norm();
}

void criterion1() {
    Criterion c("1 (spin-1/2 pair spectrum oracle, 1000 random draws)");
    std::mt19937 rng(20260810);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int rep = 0; rep < 1000; ++rep) {
        const double h1 = u(rng), h2 = u(rng);
        const Couplings j{u(rng), u(rng), u(rng)};
        auto pair = build_chain(2, false, j);
        auto H = build_hamiltonian(pair, explicit_fields({h1, h2}), 0.5);
        auto sp = parity_block_spectrum(H, 2);
        const double rp = std::hypot(h1 + h2, j.jx - j.jy), rm = std::hypot(h1 - h2, j.jx + j.jy);
        c.check_dev(sp.even[0] - 0.5 * (-rp - j.jz), 1e-12);
        c.check_dev(sp.even[1] - 0.5 * (rp - j.jz), 1e-12);
        c.check_dev(sp.odd[0] - 0.5 * (-rm + j.jz), 1e-12);
        c.check_dev(sp.odd[1] - 0.5 * (rm + j.jz), 1e-12);
        for (int nu_idx = 0; nu_idx < 2; ++nu_idx) {
            const double nu = nu_idx == 0 ? -1.0 : +1.0;
            const auto& vp = sp.even_vectors[nu_idx];
            c.check_dev(std::atan(vp[3] / vp[0]) - std::atan(-(nu * rp + (h1 + h2)) / (j.jx - j.jy)), 1e-10);
            const auto& vm = sp.odd_vectors[nu_idx];
            c.check_dev(std::atan(vm[2] / vm[1]) - std::atan(-(nu * rm + (h1 - h2)) / (j.jx + j.jy)), 1e-10);
        }
    }
    c.finish();
}

void criterion2() {
    Criterion c("2 (curve correctness, 100 points per branch, 4 coupling sets)");
    for (const auto& j : kSets) {
        const auto pts = curve_sample(j, 100);
        c.require(pts.size() == 200);
        auto pair = build_chain(2, false, j);
        for (const auto& pt : pts) {
            auto H = build_hamiltonian(pair, explicit_fields({pt.h1, pt.h2}), 0.5);
            auto sp = parity_block_spectrum(H, 1, {}, false);
            c.check_dev(sp.gap(), 1e-10);
            c.check_dev(product_residual(H, {pt.theta1, pt.theta2}), 1e-10);
            const auto e = pair_energy(pt.h1, pt.h2, j);
            c.check_dev(e.form_halfsum - e.form_sqrt, 1e-12);
            if (e.form_product) c.check_dev(e.form_sqrt - *e.form_product, 1e-12);
        }
    }
    c.finish(5.0);
}

void criterion3() {
    Criterion c("3 (spin independence at s = 1 and s = 3/2)");
    for (const auto& j : kSets) {
        const auto pts = curve_sample(j, 100);
        for (double s : {1.0, 1.5}) {
            auto pair = build_chain(2, false, j, s);
            for (const auto& pt : pts) {
                auto H = build_hamiltonian(pair, explicit_fields({pt.h1, pt.h2}), s);
                auto sp = parity_block_spectrum(H, 1, {}, false);
                c.check_dev(sp.gap(), 1e-10);
                c.check_dev(product_residual(H, {pt.theta1, pt.theta2}), 1e-10);
            }
        }
    }
    c.finish(10.0);
}

void criterion4() {
    Criterion c("4 (special-case identities: XY, XXZ limit, single-field point)");
    // XY hyperbola
    const Couplings xy{1, 0.5, 0};
    for (int t = 0; t < 100; ++t) {
        const double h1 = 0.15 + 3.0 * t / 100.0;
        auto h2 = solve_h2(h1, xy, Branch::right);
        c.require(h2.has_value());
        if (h2) c.check_dev(h1 * *h2 - xy.jx * xy.jy, 1e-12);
    }
    // XXZ limit
    const Couplings xxz{1, 1 - 1e-6, 0.3};
    for (int t = 0; t < 50; ++t) {
        const double h1 = 0.2 + 2.0 * t / 50.0;
        auto h2 = solve_h2(h1, xxz, Branch::right);
        c.require(h2.has_value());
        if (h2) c.check_dev((h1 + xxz.jz) * (*h2 + xxz.jz) - xxz.jx * xxz.jx, 1e-4);
        auto h2l = solve_h2(-h1, xxz, Branch::left);
        c.require(h2l.has_value());
        if (h2l) c.check_dev((-h1 - xxz.jz) * (*h2l - xxz.jz) - xxz.jx * xxz.jx, 1e-4);
    }
    // single-field crossing of (1, 0.5, 0.25)
    const Couplings a{1, 0.5, 0.25};
    const double h1s = std::sqrt((a.jx * a.jx - a.jz * a.jz) * (a.jy * a.jy - a.jz * a.jz)) / a.jz;
    c.check_dev(h1s - 1.6770510, 1e-7);
    c.check_dev(std::sqrt(h1s * h1s + 2.25) - std::sqrt(h1s * h1s + 0.25) - 0.5, 1e-12);
    auto h2s = solve_h2(h1s, a, Branch::right);
    c.require(h2s.has_value());
    if (h2s) c.check_dev(*h2s, 1e-9);
    c.finish();
}

void criterion5() {
    Criterion c("5 (arrays: n=8 cyclic and n=4 open chains at factorization)");
    const Couplings j{1, 0.5, 0.25};
    auto chain8 = build_chain(8, true, j);
    auto chain4 = build_chain(4, false, j);
    const auto pts = curve_sample(j, 10);  // 20 points across the two branches
    c.require(pts.size() == 20);
    for (const auto& pt : pts) {
        {
            auto H = build_hamiltonian(chain8, alternating_fields(chain8, pt.h1, pt.h2), 0.5);
            auto theta = alternating_angles(chain8, pt.theta1, pt.theta2);
            auto sp = parity_block_spectrum(H, 1, {}, false);
            c.check_dev(sp.gap(), 1e-9);
            c.check_dev(product_residual(H, theta), 1e-9);
            c.check_dev(sp.e_min() - 8 * 0.5 * pt.eps, 1e-10);
        }
        {
            auto H = build_hamiltonian(chain4, alternating_fields(chain4, pt.h1, pt.h2), 0.5);
            auto sp = parity_block_spectrum(H, 1, {}, false);
            c.check_dev(sp.e_min() - 3 * 0.5 * pt.eps, 1e-10);
        }
    }
    c.finish(30.0);
}

void criterion6() {
    Criterion c("6 (parity diagrams, 200x200, transition counts, origin meeting)");
    const int threads = std::max(1u, std::thread::hardware_concurrency());
    GridSpec grid;
    grid.h1_lo = grid.h2_lo = -2;
    grid.h1_hi = grid.h2_hi = 2;
    grid.n1 = grid.n2 = 200;
    const double cell = std::hypot(4.0 / 199, 4.0 / 199);

    for (double jz : {0.25, 0.5, 0.75}) {
        const Couplings j{1, 0.5, jz};
        auto pair = build_chain(2, false, j);
        auto dpair = scan_parity(pair, 1.0, grid, threads);
        c.require(!dpair.polylines.empty());
        auto chain = build_chain(8, true, j);
        auto dchain = scan_parity(chain, 0.5, grid, threads);
        c.require(!dchain.polylines.empty());
        if (jz == 0.5) {
            // all transition lines meet at the origin
            for (const auto* d : {&dpair, &dchain})
                for (const auto& pl : d->polylines) {
                    double dmin = 1e9;
                    for (const auto& q : pl) dmin = std::min(dmin, std::hypot(q[0], q[1]));
                    c.require(dmin <= cell, dmin);
                }
        }
    }
    // transition counts along generic rays: 2s per sector for the pair,
    // n s per half-line for the chain
    {
        auto pair25 = build_chain(2, false, kSets[1]);
        c.require(count_transitions(pair25, 1.0, alternating_segment(pair25, 0, 0, 2, 2), 0, 1, 150) == 2);
        auto pair75 = build_chain(2, false, kSets[3]);
        c.require(count_transitions(pair75, 1.0, alternating_segment(pair75, 0, 0, 2, -2), 0, 1, 150) == 2);
        auto chain25 = build_chain(8, true, kSets[1]);
        c.require(count_transitions(chain25, 0.5, alternating_segment(chain25, 0, 0, 3, 1.26), 0, 1, 220) == 4);
        auto chain75 = build_chain(8, true, kSets[3]);
        c.require(count_transitions(chain75, 0.5, alternating_segment(chain75, 0, 0, 3, -2.31), 0, 1, 220) == 4);
    }
    c.finish(300.0);
}

void criterion7() {
    Criterion c("7 (observable side limits at the factorizing curve)");
    const Couplings j{1, 0.5, 0.25};
    auto pair = build_chain(2, false, j);
    const auto pts = curve_sample(j, 10);
    c.require(pts.size() == 20);
    const double d = 1e-6;
    for (const auto& pt : pts) {
        const std::vector<double> theta{pt.theta1, pt.theta2};
        // displace along the field-plane normal, one evaluation per side
        const double g1 = (curve_residual(pt.h1 + d, pt.h2, j) - curve_residual(pt.h1 - d, pt.h2, j)) / (2 * d);
        const double g2 = (curve_residual(pt.h1, pt.h2 + d, j) - curve_residual(pt.h1, pt.h2 - d, j)) / (2 * d);
        const double gn = std::hypot(g1, g2);
        for (double sgn : {+1.0, -1.0}) {
            auto H = build_hamiltonian(
                pair, explicit_fields({pt.h1 + sgn * d * g1 / gn, pt.h2 + sgn * d * g2 / gn}), 0.5);
            auto sp = parity_block_spectrum(H, 1);
            const int parity = sp.gap() > 0 ? +1 : -1;
            QuantumState gs;
            gs.basis = H.basis;
            gs.amp = (parity > 0 ? sp.even_vectors[0] : sp.odd_vectors[0]).cast<Complex>();
            const double m_ana =
                side_limit_magnetization(theta, 0.5, 0, parity) + side_limit_magnetization(theta, 0.5, 1, parity);
            c.check_dev(total_magnetization_z(gs) - m_ana, 1e-5);
            c.check_dev(concurrence(full_density(gs)) - side_limit_concurrence(theta, 0.5, 0, 1, parity), 1e-5);
        }
        // the pair's negative-parity magnetization vanishes identically
        const double m_minus =
            side_limit_magnetization(theta, 0.5, 0, -1) + side_limit_magnetization(theta, 0.5, 1, -1);
        c.check_dev(m_minus, 1e-14);
    }
    // C_- = 1 at the uniform vertex (jz < jy)
    {
        auto v = vertex(j);
        auto vp = factorization_point(v.h1, v.h2, j);
        c.check_dev(side_limit_concurrence({vp.theta1, vp.theta2}, 0.5, 0, 1, -1) - 1.0, 1e-12);
        SpinBasis basis(2, 0.5);
        auto psi = parity_project(coherent_product_state(basis, {vp.theta1, vp.theta2}), -1);
        c.check_dev(concurrence(full_density(psi)) - 1.0, 1e-10);
    }
    // n=8 chain: third-neighbor concurrence equals first-neighbor at factorization
    {
        auto chain = build_chain(8, true, j);
        auto pt = solve_point(1.0, j, Branch::right);
        c.require(pt.has_value());
        auto theta = alternating_angles(chain, pt->theta1, pt->theta2);
        SpinBasis basis(8, 0.5);
        for (int parity : {+1, -1}) {
            auto psi = parity_project(coherent_product_state(basis, theta), parity);
            const double c14 = concurrence(partial_trace(psi, {0, 3}));
            const double c12 = concurrence(partial_trace(psi, {0, 1}));
            c.check_dev(c14 - c12, 1e-10);
            c.check_dev(c14 - side_limit_concurrence(theta, 0.5, 0, 3, parity), 1e-10);
        }
    }
    c.finish();
}

void criterion8() {
    Criterion c("8 (sign uniformity and the energy-splitting estimate)");
    // GS sign uniformity across the tested models with |jy| < jx
    for (const auto& j : kSets) {
        auto pair = build_chain(2, false, j);
        auto Hp = build_hamiltonian(pair, explicit_fields({0.37, -0.61}), 0.5);
        c.require(gs_sign_structure(Hp).uniform);
        auto chain = build_chain(4, false, j);
        auto Hc = build_hamiltonian(chain, alternating_fields(chain, 0.42, 0.13), 0.5);
        c.require(gs_sign_structure(Hc).uniform);
    }
    // degenerate on-curve case: both crossing eigenvectors single-signed
    {
        const Couplings j{1, 0.5, 0.25};
        auto pt = solve_point(0.9, j, Branch::right);
        c.require(pt.has_value());
        auto chain = build_chain(4, false, j);
        auto H = build_hamiltonian(chain, alternating_fields(chain, pt->h1, pt->h2), 0.5);
        auto rep = gs_sign_structure(H);
        c.require(rep.degenerate && rep.uniform);
    }
    // splitting estimate vs the exact parity gap at dh = 1e-4
    const double dh = 1e-4;
    {
        const Couplings j{1, 0.5, 0.25};
        auto pair = build_chain(2, false, j);
        for (const auto& pt : curve_sample(j, 6)) {
            if (std::abs(std::cos(pt.theta1)) < 0.2 || std::abs(std::cos(pt.theta2)) < 0.2) continue;
            const std::vector<double> theta{pt.theta1, pt.theta2};
            const double est = energy_splitting_estimate(theta, 0.5, {dh, dh});
            auto H = build_hamiltonian(pair, explicit_fields({pt.h1 + dh, pt.h2 + dh}), 0.5);
            const double exact = parity_block_spectrum(H, 1, {}, false).gap();
            c.check_dev((est - exact) / exact, 1e-2);
        }
        // array version: n=4 open chain with per-site deviations
        auto chain = build_chain(4, false, j);
        auto pt = solve_point(1.1, j, Branch::right);
        c.require(pt.has_value());
        auto theta = alternating_angles(chain, pt->theta1, pt->theta2);
        if (std::abs(std::cos(pt->theta1)) > 0.2 && std::abs(std::cos(pt->theta2)) > 0.2) {
            auto f = alternating_fields(chain, pt->h1, pt->h2);
            std::vector<double> deltas(4, dh);
            for (int i = 0; i < 4; ++i) f.values[i] += deltas[i];
            const double est = energy_splitting_estimate(theta, 0.5, deltas);
            auto H = build_hamiltonian(chain, f, 0.5);
            const double exact = parity_block_spectrum(H, 1, {}, false).gap();
            c.check_dev((est - exact) / exact, 1e-2);
        }
    }
    c.finish();
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    if (g_failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", g_failures);
    return g_failures;
}
