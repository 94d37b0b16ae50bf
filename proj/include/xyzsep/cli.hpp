#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xyzsep/factorization.hpp"
#include "xyzsep/model_io.hpp"
#include "xyzsep/observables.hpp"
#include "xyzsep/spectrum.hpp"
#include "xyzsep/sweep.hpp"

namespace xyzsep::cli {

namespace detail {

inline std::vector<double> parse_range(const std::string& spec) {
    double start = 0, stop = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ss(spec);
    if (!(ss >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || step == 0)
        throw ModelError("range must be start:stop:step with step != 0, got \"" + spec + "\"");
    if ((stop - start) * step < 0) throw ModelError("range step has the wrong sign: \"" + spec + "\"");
    std::vector<double> out;
    const double guard = std::abs(step) * 1e-9;
    for (int k = 0;; ++k) {
        const double v = start + k * step;
        if (step > 0 ? v > stop + guard : v < stop - guard) break;
        out.push_back(v);
    }
    return out;
}

inline std::pair<double, double> parse_span(const std::string& spec) {
    double lo = 0, hi = 0;
    char c = 0;
    std::istringstream ss(spec);
    if (!(ss >> lo >> c >> hi) || c != ':' || !(lo < hi)) throw ModelError("span must be lo:hi with lo < hi");
    return {lo, hi};
}

inline std::vector<double> parse_list(const std::string& spec) {
    std::vector<double> out;
    std::istringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw ModelError("empty number list");
    return out;
}

inline std::string resolve_path(const std::string& path) {
    if (path.empty() || path == "-" || path.front() == '/') return path;
    if (const char* dir = std::getenv("XYZSEP_OUTDIR"); dir && *dir) return std::string(dir) + "/" + path;
    return path;
}

class Output {
  public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") {
            os_ = &std::cout;
        } else {
            const std::string p = resolve_path(path);
            file_ = std::make_unique<std::ofstream>(p);
            if (!*file_) throw ModelError("cannot open output file: " + p);
            os_ = file_.get();
        }
    }
    std::ostream& stream() { return *os_; }

  private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_ = nullptr;
};

inline double model_spin(const ModelFile& m, double s_override) {
    if (s_override > 0) return s_override;
    return m.lattice.uniform_spin();
}

inline FieldAssignment model_fields(const ModelFile& m) {
    if (!m.fields) throw ModelError("model file has no field configuration");
    return *m.fields;
}

inline ObservableSelector parse_observable(const std::string& spec) {
    ObservableSelector sel;
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    if (kind == "magnetization") {
        sel.kind = ObservableKind::Magnetization;
        return sel;
    }
    if (kind == "entropy") {
        sel.kind = ObservableKind::Entropy;
        if (colon == std::string::npos) throw ModelError("entropy selector needs a site: entropy:i");
        sel.i = std::stoi(spec.substr(colon + 1)) - 1;
        return sel;
    }
    if (kind == "concurrence") {
        sel.kind = ObservableKind::Concurrence;
        if (colon == std::string::npos) throw ModelError("concurrence selector needs sites: concurrence:i,j");
        const auto ij = parse_list(spec.substr(colon + 1));
        if (ij.size() != 2) throw ModelError("concurrence selector needs exactly two sites");
        sel.i = static_cast<int>(ij[0]) - 1;
        sel.j = static_cast<int>(ij[1]) - 1;
        return sel;
    }
    throw ModelError("unknown observable \"" + spec + "\" (magnetization | concurrence:i,j | entropy:i)");
}

}  // namespace detail

/// Front end. Returns 0 on success, 1 on validation errors, 2 on numerical
/// failures; diagnostics go to stderr as JSON.
inline int run(const std::vector<std::string>& args) {
    CLI::App app{"Ground-state factorization, parity diagrams and entanglement observables for finite XYZ spin arrays"};
    app.require_subcommand(1);

    // ---- curve ----
    struct {
        double jx = 1, jy = 0, jz = 0;
        std::string h1_range;
        std::string branch = "right", sector = "upper";
        double curve_tol = kCurveTol;
        std::string out = "-";
    } curve_cfg;
    auto* curve = app.add_subcommand("curve", "Sweep the factorization curve h2(h1) with angles and energy");
    curve->add_option("--jx", curve_cfg.jx, "coupling jx")->required();
    curve->add_option("--jy", curve_cfg.jy, "coupling jy")->required();
    curve->add_option("--jz", curve_cfg.jz, "coupling jz")->required();
    curve->add_option("--h1", curve_cfg.h1_range, "h1 values, start:stop:step")->required();
    curve->add_option("--branch", curve_cfg.branch, "curve branch: right | left");
    curve->add_option("--sector", curve_cfg.sector, "curve sector for jz > jy: upper | lower");
    curve->add_option("--curve-tol", curve_cfg.curve_tol, "on-curve acceptance tolerance");
    curve->add_option("--out,-o", curve_cfg.out, "output CSV path (default stdout)");

    // ---- vertex ----
    struct {
        double jx = 1, jy = 0, jz = 0;
        std::string out = "-";
    } vertex_cfg;
    auto* vert = app.add_subcommand("vertex", "Vertex of the factorization curves (closest point to the origin)");
    vert->add_option("--jx", vertex_cfg.jx)->required();
    vert->add_option("--jy", vertex_cfg.jy)->required();
    vert->add_option("--jz", vertex_cfg.jz)->required();
    vert->add_option("--out,-o", vertex_cfg.out);

    // ---- verify ----
    struct {
        std::string model;
        double s = 0;
        std::string theta_list;
        double theta1 = -1, theta2 = -1;
        bool from_fields = false;
        double curve_tol = kCurveTol;
        std::string dump_state;
        std::string out = "-";
    } verify_cfg;
    auto* verify = app.add_subcommand("verify", "Check a product state against exact diagonalization");
    verify->add_option("--model,-m", verify_cfg.model, "model JSON path")->required();
    verify->add_option("--s", verify_cfg.s, "spin override");
    verify->add_option("--theta", verify_cfg.theta_list, "per-site angles, comma separated");
    verify->add_option("--theta1", verify_cfg.theta1, "sublattice-A angle");
    verify->add_option("--theta2", verify_cfg.theta2, "sublattice-B angle");
    verify->add_flag("--from-fields", verify_cfg.from_fields,
                     "derive angles from the model's alternating (h1, h2) on the curve");
    verify->add_option("--curve-tol", verify_cfg.curve_tol, "on-curve acceptance tolerance");
    verify->add_option("--dump-state", verify_cfg.dump_state, "write the product state as CSV");
    verify->add_option("--out,-o", verify_cfg.out);

    // ---- diagram ----
    struct {
        std::string model;
        double s = 0;
        int grid = 200;
        std::string h1_span = "-2:2", h2_span = "-2:2";
        std::string out;
        std::string polylines, curve_overlay;
        int threads = 0;
    } diagram_cfg;
    auto* diagram = app.add_subcommand("diagram", "GS parity diagram over the (h1, h2) alternating-field plane");
    diagram->add_option("--model,-m", diagram_cfg.model)->required();
    diagram->add_option("--s", diagram_cfg.s, "spin override");
    diagram->add_option("--grid", diagram_cfg.grid, "points per axis");
    diagram->add_option("--h1", diagram_cfg.h1_span, "h1 range lo:hi");
    diagram->add_option("--h2", diagram_cfg.h2_span, "h2 range lo:hi");
    diagram->add_option("--out,-o", diagram_cfg.out, "grid CSV path")->required();
    diagram->add_option("--polylines", diagram_cfg.polylines, "also write transition polylines CSV");
    diagram->add_option("--curve", diagram_cfg.curve_overlay, "also write analytic curve overlay CSV");
    diagram->add_option("--threads,-j", diagram_cfg.threads, "worker threads (0 = hardware)");

    // ---- sweep ----
    struct {
        std::string model;
        double s = 0;
        int grid = 100;
        std::string h1_span = "-2:2", h2_span = "-2:2";
        std::string observable = "magnetization";
        std::string out;
        std::string side_limits;
        int threads = 0;
    } sweep_cfg;
    auto* sweep = app.add_subcommand("sweep", "Observable surface over the field plane");
    sweep->add_option("--model,-m", sweep_cfg.model)->required();
    sweep->add_option("--s", sweep_cfg.s, "spin override");
    sweep->add_option("--grid", sweep_cfg.grid);
    sweep->add_option("--h1", sweep_cfg.h1_span);
    sweep->add_option("--h2", sweep_cfg.h2_span);
    sweep->add_option("--observable", sweep_cfg.observable, "magnetization | concurrence:i,j | entropy:i");
    sweep->add_option("--out,-o", sweep_cfg.out)->required();
    sweep->add_option("--side-limits", sweep_cfg.side_limits, "also write closed-form side limits CSV");
    sweep->add_option("--threads,-j", sweep_cfg.threads);

    // ---- observables ----
    struct {
        std::string model;
        double s = 0;
        double h1 = 0, h2 = 0;
        bool have_point = false;
        bool side_limits = false;
        double curve_tol = kCurveTol;
        std::string out = "-";
    } obs_cfg;
    auto* obs = app.add_subcommand("observables", "Magnetization, entropies and concurrences at one field point");
    obs->add_option("--model,-m", obs_cfg.model)->required();
    obs->add_option("--s", obs_cfg.s, "spin override");
    auto* oh1 = obs->add_option("--h1", obs_cfg.h1, "alternating field h1");
    auto* oh2 = obs->add_option("--h2", obs_cfg.h2, "alternating field h2");
    oh1->needs(oh2);
    oh2->needs(oh1);
    obs->add_flag("--side-limits", obs_cfg.side_limits, "add closed-form side limits (requires an on-curve point)");
    obs->add_option("--curve-tol", obs_cfg.curve_tol, "on-curve acceptance tolerance");
    obs->add_option("--out,-o", obs_cfg.out);

    // ---- count ----
    struct {
        std::string model;
        double s = 0;
        std::string from = "0,0", to;
        int samples = 200;
        std::string out = "-";
    } count_cfg;
    auto* count = app.add_subcommand("count", "Count GS parity transitions along a field-plane ray");
    count->add_option("--model,-m", count_cfg.model)->required();
    count->add_option("--s", count_cfg.s, "spin override");
    count->add_option("--from", count_cfg.from, "ray start \"h1,h2\"");
    count->add_option("--to", count_cfg.to, "ray end \"h1,h2\"")->required();
    count->add_option("--samples", count_cfg.samples, "initial samples along the ray");
    count->add_option("--out,-o", count_cfg.out);

    // ---- model ----
    struct {
        std::string type = "chain";
        int n = 2, m = 2, l = 2, k = 2;
        bool cyclic = false;
        double spin = 0.5;
        double jx = 1, jy = 0, jz = 0;
        std::string alternating;
        std::string fields;
        std::string out;
    } model_cfg;
    auto* model = app.add_subcommand("model", "Emit a model JSON file for a standard lattice");
    model->add_option("--type", model_cfg.type, "chain | square | cubic");
    model->add_option("--n", model_cfg.n, "chain length");
    model->add_flag("--cyclic", model_cfg.cyclic, "close the chain (n even)");
    model->add_option("--m", model_cfg.m, "rows");
    model->add_option("--l", model_cfg.l, "columns");
    model->add_option("--k", model_cfg.k, "layers (cubic)");
    model->add_option("--spin", model_cfg.spin, "spin per site");
    model->add_option("--jx", model_cfg.jx)->required();
    model->add_option("--jy", model_cfg.jy)->required();
    model->add_option("--jz", model_cfg.jz)->required();
    model->add_option("--alternating", model_cfg.alternating, "alternating fields \"h1,h2\"");
    model->add_option("--fields", model_cfg.fields, "explicit fields \"v1,v2,...\"");
    model->add_option("--out,-o", model_cfg.out, "model JSON path")->required();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        nlohmann::json err{{"error", "validation"}, {"message", e.what()}};
        std::cerr << err.dump() << '\n';
        return 1;
    }

    try {
        if (curve->parsed()) {
            const Couplings j{curve_cfg.jx, curve_cfg.jy, curve_cfg.jz};
            const Branch br = curve_cfg.branch == "left" ? Branch::left : Branch::right;
            if (curve_cfg.branch != "left" && curve_cfg.branch != "right")
                throw ModelError("branch must be right or left");
            const Sector sec = curve_cfg.sector == "lower" ? Sector::lower : Sector::upper;
            if (curve_cfg.sector != "lower" && curve_cfg.sector != "upper")
                throw ModelError("sector must be upper or lower");
            xyzsep::detail::require_curve_frame(j);  // fail fast on degenerate anisotropy
            if (!(curve_cfg.curve_tol > 0)) throw ModelError("tolerances must be positive");
            detail::Output out(curve_cfg.out);
            auto fmt = [](double v) { return xyzsep::detail::fmt_double(v); };
            out.stream() << "h1,h2,theta1,theta2,eps,residual_halfsum_sqrt,residual_sqrt_product\n";
            std::size_t rows = 0;
            for (double h1 : detail::parse_range(curve_cfg.h1_range)) {
                const auto pt = solve_point(h1, j, br, sec, curve_cfg.curve_tol);
                if (!pt) continue;
                const PairEnergy e = pair_energy(pt->h1, pt->h2, j, curve_cfg.curve_tol);
                out.stream() << fmt(pt->h1) << ',' << fmt(pt->h2) << ',' << fmt(pt->theta1) << ',' << fmt(pt->theta2)
                             << ',' << fmt(pt->eps) << ',' << fmt(e.resid_halfsum_sqrt) << ',';
                if (e.resid_sqrt_product) out.stream() << fmt(*e.resid_sqrt_product);
                out.stream() << '\n';
                ++rows;
            }
            if (rows == 0) std::cerr << R"({"warning":"no curve points in the requested h1 range"})" << '\n';
            return 0;
        }

        if (vert->parsed()) {
            const Couplings j{vertex_cfg.jx, vertex_cfg.jy, vertex_cfg.jz};
            const CurveVertex v = vertex(j);
            const auto [t1, t2] = factorized_angles(v.h1, v.h2, j);
            nlohmann::json o{{"h1", v.h1}, {"h2", v.h2}, {"eps", v.eps}, {"theta1", t1}, {"theta2", t2}};
            detail::Output out(vertex_cfg.out);
            out.stream() << o.dump(2) << '\n';
            return 0;
        }

        if (verify->parsed()) {
            const ModelFile m = load_model(detail::resolve_path(verify_cfg.model));
            const double s = detail::model_spin(m, verify_cfg.s);
            const FieldAssignment fields = detail::model_fields(m);
            std::vector<double> theta;
            if (!verify_cfg.theta_list.empty()) {
                theta = detail::parse_list(verify_cfg.theta_list);
                if (static_cast<int>(theta.size()) != m.lattice.n_sites)
                    throw ModelError("--theta needs one angle per site");
            } else if (verify_cfg.theta1 >= 0 && verify_cfg.theta2 >= 0) {
                theta = alternating_angles(m.lattice, verify_cfg.theta1, verify_cfg.theta2);
            } else {
                if (!(verify_cfg.curve_tol > 0)) throw ModelError("tolerances must be positive");
                if (fields.pattern != FieldAssignment::Pattern::Alternating)
                    throw ModelError("angles not given and the model fields are not an alternating pattern");
                const auto [t1, t2] = factorized_angles(fields.h1, fields.h2, m.lattice.base, verify_cfg.curve_tol);
                theta = alternating_angles(m.lattice, t1, t2);
            }
            const VerifyReport rep = verify_factorized_gs(m.lattice, fields, s, theta);
            if (!verify_cfg.dump_state.empty()) {
                const SpinBasis basis(m.lattice.n_sites, s);
                detail::Output dump(verify_cfg.dump_state);
                dump_state_csv(coherent_product_state(basis, theta), dump.stream());
            }
            nlohmann::json o{{"residual", rep.residual},
                             {"energy_diff", rep.energy_diff},
                             {"gap", rep.gap},
                             {"projection_overlaps", {rep.overlap_plus, rep.overlap_minus}},
                             {"e_theta", rep.e_theta},
                             {"e_min", rep.e_min},
                             {"is_eigenstate", rep.is_eigenstate},
                             {"is_ground_state", rep.is_ground_state}};
            detail::Output out(verify_cfg.out);
            out.stream() << o.dump(2) << '\n';
            return 0;
        }

        if (diagram->parsed()) {
            const ModelFile m = load_model(detail::resolve_path(diagram_cfg.model));
            const double s = detail::model_spin(m, diagram_cfg.s);
            GridSpec grid;
            std::tie(grid.h1_lo, grid.h1_hi) = detail::parse_span(diagram_cfg.h1_span);
            std::tie(grid.h2_lo, grid.h2_hi) = detail::parse_span(diagram_cfg.h2_span);
            grid.n1 = grid.n2 = diagram_cfg.grid;
            const ParityDiagram d = scan_parity(m.lattice, s, grid, diagram_cfg.threads);
            {
                detail::Output out(diagram_cfg.out);
                write_parity_csv(d, out.stream());
            }
            if (!diagram_cfg.polylines.empty()) {
                detail::Output out(diagram_cfg.polylines);
                write_polylines_csv(d, out.stream());
            }
            if (!diagram_cfg.curve_overlay.empty()) {
                detail::Output out(diagram_cfg.curve_overlay);
                write_curve_overlay_csv(d, out.stream());
            }
            return 0;
        }

        if (sweep->parsed()) {
            const ModelFile m = load_model(detail::resolve_path(sweep_cfg.model));
            const double s = detail::model_spin(m, sweep_cfg.s);
            GridSpec grid;
            std::tie(grid.h1_lo, grid.h1_hi) = detail::parse_span(sweep_cfg.h1_span);
            std::tie(grid.h2_lo, grid.h2_hi) = detail::parse_span(sweep_cfg.h2_span);
            grid.n1 = grid.n2 = sweep_cfg.grid;
            const ObservableSelector sel = detail::parse_observable(sweep_cfg.observable);
            const SweepSurface sfc = scan_observable(m.lattice, s, grid, sel, sweep_cfg.threads);
            {
                detail::Output out(sweep_cfg.out);
                write_surface_csv(sfc, out.stream());
            }
            if (!sweep_cfg.side_limits.empty()) {
                detail::Output out(sweep_cfg.side_limits);
                write_side_limits_csv(sfc, out.stream());
            }
            return 0;
        }

        if (obs->parsed()) {
            const ModelFile m = load_model(detail::resolve_path(obs_cfg.model));
            const double s = detail::model_spin(m, obs_cfg.s);
            obs_cfg.have_point = oh1->count() > 0;
            const FieldAssignment fields =
                obs_cfg.have_point ? alternating_fields(m.lattice, obs_cfg.h1, obs_cfg.h2) : detail::model_fields(m);
            const Hamiltonian H = build_hamiltonian(m.lattice, fields, s);
            const auto sp = parity_block_spectrum(H, 1);
            const bool degen = std::abs(sp.gap()) < sp.degeneracy_tol();
            const Eigen::VectorXd& v =
                degen ? sp.odd_vectors.front() : (sp.gap() > 0 ? sp.even_vectors.front() : sp.odd_vectors.front());
            QuantumState gs;
            gs.basis = H.basis;
            gs.amp = v.cast<Complex>();

            nlohmann::json o;
            if (fields.pattern == FieldAssignment::Pattern::Alternating) {
                o["h1"] = fields.h1;
                o["h2"] = fields.h2;
            }
            o["fields"] = fields.values;
            o["gs_parity"] = degen ? 0 : (sp.gap() > 0 ? +1 : -1);
            o["degenerate"] = degen;
            o["e_min"] = sp.e_min();
            nlohmann::json mag = nlohmann::json::array(), ent = nlohmann::json::array();
            for (int i = 0; i < m.lattice.n_sites; ++i) {
                mag.push_back(site_magnetization_z(gs, i));
                ent.push_back(linear_entropy(partial_trace(gs, {i})));
            }
            o["magnetization"] = mag;
            o["total_magnetization"] = total_magnetization_z(gs);
            o["linear_entropy"] = ent;
            nlohmann::json conc = nlohmann::json::object();
            for (int i = 0; i < m.lattice.n_sites; ++i)
                for (int j = i + 1; j < m.lattice.n_sites; ++j) {
                    const std::string key = std::to_string(i + 1) + "," + std::to_string(j + 1);
                    try {
                        conc[key] = concurrence(pair_density(gs, i, j));
                    } catch (const NumericsError&) {
                        conc[key] = nullptr;
                    }
                }
            o["concurrence"] = conc;

            if (obs_cfg.side_limits) {
                if (!(obs_cfg.curve_tol > 0)) throw ModelError("tolerances must be positive");
                if (fields.pattern != FieldAssignment::Pattern::Alternating)
                    throw ModelError("--side-limits needs an alternating field point");
                const auto [t1, t2] = factorized_angles(fields.h1, fields.h2, m.lattice.base, obs_cfg.curve_tol);
                const auto theta = alternating_angles(m.lattice, t1, t2);
                nlohmann::json sl;
                for (int parity : {+1, -1}) {
                    const std::string tag = parity > 0 ? "plus" : "minus";
                    nlohmann::json mg = nlohmann::json::array(), en = nlohmann::json::array();
                    double mtot = 0;
                    for (int i = 0; i < m.lattice.n_sites; ++i) {
                        const double mi = side_limit_magnetization(theta, s, i, parity);
                        mg.push_back(mi);
                        mtot += mi;
                        en.push_back(side_limit_linear_entropy(theta, s, i, parity));
                    }
                    nlohmann::json cc = nlohmann::json::object();
                    for (int i = 0; i < m.lattice.n_sites; ++i)
                        for (int j = i + 1; j < m.lattice.n_sites; ++j)
                            cc[std::to_string(i + 1) + "," + std::to_string(j + 1)] =
                                side_limit_concurrence(theta, s, i, j, parity);
                    sl[tag] = {{"magnetization", mg},
                               {"total_magnetization", mtot},
                               {"linear_entropy", en},
                               {"concurrence", cc}};
                }
                sl["theta1"] = t1;
                sl["theta2"] = t2;
                o["side_limits"] = sl;
            }
            detail::Output out(obs_cfg.out);
            out.stream() << o.dump(2) << '\n';
            return 0;
        }

        if (count->parsed()) {
            const ModelFile m = load_model(detail::resolve_path(count_cfg.model));
            const double s = detail::model_spin(m, count_cfg.s);
            const auto from = detail::parse_list(count_cfg.from);
            const auto to = detail::parse_list(count_cfg.to);
            if (from.size() != 2 || to.size() != 2) throw ModelError("--from/--to need \"h1,h2\"");
            const FieldPath path = alternating_segment(m.lattice, from[0], from[1], to[0], to[1]);
            const auto ts = crossing_locator(m.lattice, s, path, 0.0, 1.0, count_cfg.samples);
            nlohmann::json pts = nlohmann::json::array();
            for (double t : ts)
                pts.push_back({from[0] + t * (to[0] - from[0]), from[1] + t * (to[1] - from[1])});
            nlohmann::json o{{"transitions", ts.size()}, {"parameters", ts}, {"points", pts}};
            detail::Output out(count_cfg.out);
            out.stream() << o.dump(2) << '\n';
            return 0;
        }

        if (model->parsed()) {
            const Couplings j{model_cfg.jx, model_cfg.jy, model_cfg.jz};
            SpinLattice lat;
            if (model_cfg.type == "chain")
                lat = build_chain(model_cfg.n, model_cfg.cyclic, j, model_cfg.spin);
            else if (model_cfg.type == "square")
                lat = build_square_lattice(model_cfg.m, model_cfg.l, j, model_cfg.spin);
            else if (model_cfg.type == "cubic")
                lat = build_cubic_lattice(model_cfg.m, model_cfg.l, model_cfg.k, j, model_cfg.spin);
            else
                throw ModelError("unknown lattice type \"" + model_cfg.type + "\"");
            std::optional<FieldAssignment> fields;
            if (!model_cfg.alternating.empty()) {
                const auto hh = detail::parse_list(model_cfg.alternating);
                if (hh.size() != 2) throw ModelError("--alternating needs \"h1,h2\"");
                fields = alternating_fields(lat, hh[0], hh[1]);
            } else if (!model_cfg.fields.empty()) {
                auto vals = detail::parse_list(model_cfg.fields);
                if (static_cast<int>(vals.size()) != lat.n_sites) throw ModelError("--fields needs one value per site");
                fields = explicit_fields(std::move(vals));
            }
            save_model(detail::resolve_path(model_cfg.out), lat, fields);
            return 0;
        }
    } catch (const ModelError& e) {
        nlohmann::json err{{"error", "validation"}, {"message", e.what()}};
        std::cerr << err.dump() << '\n';
        return 1;
    } catch (const NumericsError& e) {
        nlohmann::json err{{"error", "numerical"}, {"message", e.what()}};
        std::cerr << err.dump() << '\n';
        return 2;
    }
    return 1;
}

inline int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace xyzsep::cli
