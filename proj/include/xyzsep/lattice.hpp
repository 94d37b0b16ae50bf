#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "xyzsep/common.hpp"

namespace xyzsep {

/// Undirected coupling link between sites i < j with relative strength r >= 0.
/// The edge couplings are j_mu^{ij} = r * j_mu (fixed anisotropy ratio).
struct Edge {
    int i = 0;
    int j = 0;
    double r = 1.0;
};

/// Field configuration over the sites of a lattice, either explicit values or
/// generated from an alternating (h1, h2) sublattice pattern h^i = r_i * h_{1(2)}.
struct FieldAssignment {
    enum class Pattern { Explicit, Alternating };
    std::vector<double> values;
    Pattern pattern = Pattern::Explicit;
    double h1 = 0.0;  // set when pattern == Alternating
    double h2 = 0.0;
};

/// Array of spin-s sites coupled by XYZ links. Immutable after construction;
/// safe for concurrent reads.
struct SpinLattice {
    int n_sites = 0;
    std::vector<double> spin;  // per site; distinct values only allowed for n == 2
    std::vector<Edge> edges;
    Couplings base;            // (jx, jy, jz); per-edge couplings are r * base
    bool cyclic = false;

    double uniform_spin() const {
        for (double s : spin)
            if (s != spin.front()) throw ModelError("lattice has non-uniform spins");
        return spin.front();
    }

    std::vector<std::vector<std::pair<int, double>>> adjacency() const {
        std::vector<std::vector<std::pair<int, double>>> adj(n_sites);
        for (const auto& e : edges) {
            adj[e.i].emplace_back(e.j, e.r);
            adj[e.j].emplace_back(e.i, e.r);
        }
        return adj;
    }
};

inline void validate_lattice(const SpinLattice& lat) {
    if (lat.n_sites < 1) throw ModelError("lattice needs at least one site");
    if (static_cast<int>(lat.spin.size()) != lat.n_sites) throw ModelError("spin list length mismatch");
    for (double s : lat.spin) twice_spin(s);
    if (lat.n_sites > 2) {
        for (double s : lat.spin)
            if (s != lat.spin.front())
                throw ModelError("distinct spins per site are only supported for a two-site system");
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& e : lat.edges) {
        if (e.i < 0 || e.j < 0 || e.i >= lat.n_sites || e.j >= lat.n_sites) throw ModelError("edge site out of range");
        if (e.i == e.j) throw ModelError("self-edges are not allowed");
        if (e.r < 0) throw ModelError("edge strength must be >= 0");
        auto key = std::minmax(e.i, e.j);
        if (!seen.insert(key).second) throw ModelError("duplicate edge");
    }
}

namespace detail {
inline Edge make_edge(int a, int b, double r = 1.0) {
    Edge e;
    e.i = std::min(a, b);
    e.j = std::max(a, b);
    e.r = r;
    return e;
}
}  // namespace detail

/// Open or cyclic chain of n spins with first-neighbor couplings, r = 1.
/// Cyclic closure requires n even so that the two-sublattice pattern closes.
inline SpinLattice build_chain(int n, bool cyclic, const Couplings& j, double spin = 0.5) {
    if (n < 2) throw ModelError("chain needs n >= 2");
    if (cyclic && n % 2 != 0) throw ModelError("cyclic chain requires even n (alternating pattern impossible)");
    SpinLattice lat;
    lat.n_sites = n;
    lat.spin.assign(n, spin);
    lat.base = j;
    lat.cyclic = cyclic;
    for (int i = 0; i + 1 < n; ++i) lat.edges.push_back(detail::make_edge(i, i + 1));
    if (cyclic) lat.edges.push_back(detail::make_edge(n - 1, 0));
    validate_lattice(lat);
    return lat;
}

/// Open m x l grid with first-neighbor couplings. Optional per-row horizontal
/// ratios and a rung ratio support ladders with direction-dependent couplings;
/// defaults give r = 1 everywhere. Site (a, b) maps to index a*l + b.
inline SpinLattice build_square_lattice(int m, int l, const Couplings& j, double spin = 0.5,
                                        const std::vector<double>& row_ratios = {}, double rung_ratio = 1.0) {
    if (m < 2 || l < 2) throw ModelError("square lattice needs m, l >= 2");
    if (!row_ratios.empty() && static_cast<int>(row_ratios.size()) != m)
        throw ModelError("row_ratios must have one entry per row");
    SpinLattice lat;
    lat.n_sites = m * l;
    lat.spin.assign(lat.n_sites, spin);
    lat.base = j;
    auto id = [l](int a, int b) { return a * l + b; };
    for (int a = 0; a < m; ++a) {
        const double rh = row_ratios.empty() ? 1.0 : row_ratios[a];
        for (int b = 0; b + 1 < l; ++b) lat.edges.push_back(detail::make_edge(id(a, b), id(a, b + 1), rh));
    }
    for (int a = 0; a + 1 < m; ++a)
        for (int b = 0; b < l; ++b) lat.edges.push_back(detail::make_edge(id(a, b), id(a + 1, b), rung_ratio));
    validate_lattice(lat);
    return lat;
}

/// Open m x l x k cubic lattice with first-neighbor couplings, r = 1.
inline SpinLattice build_cubic_lattice(int m, int l, int k, const Couplings& j, double spin = 0.5) {
    if (m < 2 || l < 2 || k < 2) throw ModelError("cubic lattice needs m, l, k >= 2");
    SpinLattice lat;
    lat.n_sites = m * l * k;
    lat.spin.assign(lat.n_sites, spin);
    lat.base = j;
    auto id = [l, k](int a, int b, int c) { return (a * l + b) * k + c; };
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < l; ++b)
            for (int c = 0; c < k; ++c) {
                if (a + 1 < m) lat.edges.push_back(detail::make_edge(id(a, b, c), id(a + 1, b, c)));
                if (b + 1 < l) lat.edges.push_back(detail::make_edge(id(a, b, c), id(a, b + 1, c)));
                if (c + 1 < k) lat.edges.push_back(detail::make_edge(id(a, b, c), id(a, b, c + 1)));
            }
    validate_lattice(lat);
    return lat;
}

/// Coordination numbers r_i = sum_j r_ij. Integer-valued for unit-strength
/// lattices; real in general (direction-dependent ratios).
inline std::vector<double> coordination_numbers(const SpinLattice& lat) {
    std::vector<double> r(lat.n_sites, 0.0);
    for (const auto& e : lat.edges) {
        r[e.i] += e.r;
        r[e.j] += e.r;
    }
    return r;
}

/// Total number of coupling links N = (1/2) sum_i r_i.
inline double link_count(const SpinLattice& lat) {
    double n = 0.0;
    for (const auto& e : lat.edges) n += e.r;
    return n;
}

/// Two-coloring of the coupling graph: 0 = sublattice A, 1 = sublattice B.
/// The lowest-index site of each connected component is colored A, so site 1
/// (grid site (1,1)) always lands on A. Throws for non-bipartite graphs.
inline std::vector<int> bipartite_coloring(const SpinLattice& lat) {
    const auto adj = lat.adjacency();
    std::vector<int> color(lat.n_sites, -1);
    std::vector<int> stack;
    for (int s0 = 0; s0 < lat.n_sites; ++s0) {
        if (color[s0] != -1) continue;
        color[s0] = 0;
        stack.push_back(s0);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (auto [w, r] : adj[v]) {
                (void)r;
                if (color[w] == -1) {
                    color[w] = 1 - color[v];
                    stack.push_back(w);
                } else if (color[w] == color[v]) {
                    throw ModelError("graph is not bipartite; alternating fields are not defined");
                }
            }
        }
    }
    return color;
}

/// Alternating field pattern h^i = r_i * h1 on sublattice A and r_i * h2 on B.
inline FieldAssignment alternating_fields(const SpinLattice& lat, double h1, double h2) {
    const auto color = bipartite_coloring(lat);
    const auto r = coordination_numbers(lat);
    FieldAssignment f;
    f.pattern = FieldAssignment::Pattern::Alternating;
    f.h1 = h1;
    f.h2 = h2;
    f.values.resize(lat.n_sites);
    for (int i = 0; i < lat.n_sites; ++i) f.values[i] = r[i] * (color[i] == 0 ? h1 : h2);
    return f;
}

/// Explicit field values, one per site.
inline FieldAssignment explicit_fields(std::vector<double> values) {
    FieldAssignment f;
    f.values = std::move(values);
    return f;
}

}  // namespace xyzsep
