// Command-line front end: monodromy, Duistermaat-Heckman, Bohr-Sommerfeld and
// affine-transport experiments with machine-readable JSON/CSV output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ffmono/affine.hpp"
#include "ffmono/bs.hpp"
#include "ffmono/dh.hpp"
#include "ffmono/errors.hpp"
#include "ffmono/lattice.hpp"
#include "ffmono/models.hpp"
#include "ffmono/monodromy.hpp"
#include "ffmono/version.hpp"

using json = nlohmann::ordered_json;
using namespace ffmono;

namespace {

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

std::vector<Vec2> parse_points(const std::string& s) {
    std::vector<Vec2> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
        const auto v = parse_doubles(item);
        if (v.size() != 2) throw invalid_config("expected x,y pairs separated by ';'");
        out.push_back({v[0], v[1]});
    }
    return out;
}

json mat_json(const Mat2i& m) {
    return json::array({json::array({m.m[0][0], m.m[0][1]}),
                        json::array({m.m[1][0], m.m[1][1]})});
}

json mat_json(const Mat3i& m) {
    json rows = json::array();
    for (int i = 0; i < 3; ++i)
        rows.push_back(json::array({m.m[i][0], m.m[i][1], m.m[i][2]}));
    return rows;
}

Mat2i parse_mat2(const std::string& s) {
    const auto v = parse_doubles(s);
    if (v.size() != 4) throw invalid_config("matrix must be a11,a12,a21,a22");
    Mat2i m;
    for (int i = 0; i < 4; ++i) {
        const double r = std::round(v[i]);
        if (std::fabs(v[i] - r) > 1e-9) throw invalid_config("matrix entries must be integers");
        m.m[i / 2][i % 2] = static_cast<long long>(r);
    }
    return m;
}

void atomic_write(const std::string& path, const std::string& payload) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw invalid_config("cannot open output file " + tmp);
        out << payload;
    }
    std::filesystem::rename(tmp, path);
}

// Shared model-selection flags.
struct SystemFlags {
    std::string system = "pendulum";
    std::string potential;
    double R = 0.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--system", system, "model: pendulum or linear")
            ->default_val("pendulum");
        cmd->add_option("--potential", potential,
                        "pendulum potential coefficients a0,a1,... (V = sum a_i z^i)");
        cmd->add_option("--R", R, "modified pendulum parameter: V = z - z^2/(2R)");
    }

    std::unique_ptr<ModelSystem> build() const {
        if (system == "linear") return linear_focus_focus_model();
        if (system != "pendulum") throw invalid_config("unknown system " + system);
        if (R != 0.0 && !potential.empty())
            throw invalid_config("--potential and --R are mutually exclusive");
        if (R != 0.0) return pendulum_system(modified_pendulum_potential(R));
        if (!potential.empty())
            return pendulum_system(PendulumPotential(parse_doubles(potential)));
        return pendulum_system(PendulumPotential({0.0, 1.0}));
    }

    json config() const {
        json c;
        c["system"] = system;
        if (!potential.empty()) c["potential"] = parse_doubles(potential);
        if (R != 0.0) c["R"] = R;
        return c;
    }
};

struct Output {
    std::string out_path;
    std::string trace_path;

    void attach(CLI::App* cmd) {
        cmd->add_option("--out", out_path, "write the JSON result document here");
        cmd->add_option("--trace", trace_path, "write the CSV trace here");
    }

    void emit(const json& doc) const {
        const std::string payload = doc.dump(2) + "\n";
        if (out_path.empty())
            std::cout << payload;
        else
            atomic_write(out_path, payload);
    }
};

json document(const std::string& experiment, const json& config, const json& result,
              const json& diagnostics, std::uint64_t seed = 0) {
    json doc;
    doc["schema_version"] = 1;
    doc["config"] = config;
    doc["config"]["experiment"] = experiment;
    doc["result"] = result;
    doc["diagnostics"] = diagnostics;
    doc["provenance"]["seed"] = seed;
    doc["provenance"]["version"] = ffmono::version;
    return doc;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"focus-focus monodromy toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI/TOML file");

    // ---- monodromy ------------------------------------------------------
    auto* mono = app.add_subcommand("monodromy",
                                    "period-lattice continuation around a loop");
    SystemFlags mono_sys;
    Output mono_out;
    std::vector<double> center{1.0, 0.0};
    double radius = 0.3, start_angle = 0.0, margin = 1e-3, quad_tol = 1e-10,
           snap = 1e-3;
    int points = 64, orientation = 1;
    std::string polygon;
    bool serial = false;
    mono_sys.attach(mono);
    mono_out.attach(mono);
    mono->add_option("--center", center, "loop center h,j")->expected(2)->delimiter(',');
    mono->add_option("--radius", radius, "circle radius");
    mono->add_option("--points", points, "number of base samples");
    mono->add_option("--orientation", orientation, "+1 (ccw) or -1 (cw)");
    mono->add_option("--start-angle", start_angle, "circle start angle (radians)");
    mono->add_option("--polygon", polygon, "polygon loop vertices x,y;x,y;... (overrides circle)");
    mono->add_option("--margin", margin, "minimum distance to the critical set");
    mono->add_option("--quad-tol", quad_tol, "quadrature tolerance");
    mono->add_option("--snap", snap, "integer snap tolerance");
    mono->add_flag("--serial", serial, "disable the parallel sample kernel");

    // ---- monodromy-nh ---------------------------------------------------
    auto* nh = app.add_subcommand("monodromy-nh", "signed focus-focus count calculator");
    Output nh_out;
    std::string signs_arg;
    nh_out.attach(nh);
    nh->add_option("--signs", signs_arg, "comma list of + / - signs")->required();

    // ---- compose --------------------------------------------------------
    auto* comp = app.add_subcommand("compose", "compose two loop matrices (b after a)");
    Output comp_out;
    std::string mat_a, mat_b, basis_a = "cli", basis_b = "cli";
    comp_out.attach(comp);
    comp->add_option("--matrix-a", mat_a, "a11,a12,a21,a22")->required();
    comp->add_option("--matrix-b", mat_b, "a11,a12,a21,a22")->required();
    comp->add_option("--basis-a", basis_a, "basis id of loop a");
    comp->add_option("--basis-b", basis_b, "basis id of loop b");

    // ---- embed3 ---------------------------------------------------------
    auto* emb = app.add_subcommand("embed3", "embed a 2x2 matrix as a 3-DOF monodromy");
    Output emb_out;
    std::string emb_mat;
    emb_out.attach(emb);
    emb->add_option("--matrix", emb_mat, "a11,a12,a21,a22")->required();

    // ---- dh --------------------------------------------------------------
    auto* dh = app.add_subcommand("dh", "Duistermaat-Heckman reduced-volume profile");
    SystemFlags dh_sys;
    Output dh_out;
    double energy_cap = 1.5, c_max = 0.1;
    double energy_floor = std::nan("");
    int dh_samples = 41;
    long long mc_samples = 0, dh_k = -1;
    std::uint64_t seed = 20020301;
    bool dh_serial = false;
    dh_sys.attach(dh);
    dh_out.attach(dh);
    dh->add_option("--energy-cap", energy_cap, "localization window top E");
    dh->add_option("--energy-floor", energy_floor, "window floor (default per model)");
    dh->add_option("--c-max", c_max, "momentum half-range");
    dh->add_option("--samples", dh_samples, "odd number of c samples");
    dh->add_option("--mc-samples", mc_samples, "Monte Carlo cross-estimator samples");
    dh->add_option("--seed", seed, "Monte Carlo seed");
    dh->add_option("--k", dh_k, "expected count for the residual check");
    dh->add_flag("--serial", dh_serial, "disable parallel kernels");

    // ---- bs ---------------------------------------------------------------
    auto* bs = app.add_subcommand("bs", "Bohr-Sommerfeld lattice and defect");
    SystemFlags bs_sys;
    Output bs_out;
    double hbar = 0.05, exclusion = 0.07;
    std::vector<double> grid{0.55, 1.45, -0.4, 0.4};
    std::vector<double> bs_center{1.0, 0.0};
    double bs_radius = 0.0;
    int bs_points = 96, f1_nodes = 96;
    bool bs_serial = false;
    bs_sys.attach(bs);
    bs_out.attach(bs);
    bs->add_option("--hbar", hbar, "quantum of action");
    bs->add_option("--grid", grid, "f1_min,f1_max,f2_min,f2_max")->expected(4)->delimiter(',');
    bs->add_option("--exclusion", exclusion, "radius kept clear around critical values");
    bs->add_option("--nodes", f1_nodes, "scan nodes per quantized line");
    bs->add_option("--defect-center", bs_center, "defect loop center h,j")
        ->expected(2)->delimiter(',');
    bs->add_option("--defect-radius", bs_radius, "defect loop radius (0 = no defect)");
    bs->add_option("--defect-points", bs_points, "defect loop samples");
    bs->add_flag("--serial", bs_serial, "disable parallel kernels");

    // ---- affine -----------------------------------------------------------
    auto* aff = app.add_subcommand("affine", "integral-affine cut-plane transport");
    Output aff_out;
    long long aff_k = 1;
    int winding = 1;
    std::string aff_loop;
    aff_out.attach(aff);
    aff->add_option("--k", aff_k, "number of focus-focus points")->required();
    aff->add_option("--winding", winding, "winding number of the standard loop");
    aff->add_option("--loop", aff_loop, "explicit loop x,y;x,y;... (overrides winding)");

    // ---- classify ----------------------------------------------------------
    auto* cls = app.add_subcommand("classify", "local classification of a singular point");
    SystemFlags cls_sys;
    Output cls_out;
    std::string pole = "north", point_arg;
    bool fd_only = false;
    cls_sys.attach(cls);
    cls_out.attach(cls);
    cls->add_option("--pole", pole, "pendulum pole: north or south");
    cls->add_option("--point", point_arg, "chart:c0,c1,c2,c3 (overrides --pole)");
    cls->add_flag("--finite-differences", fd_only, "ignore model-supplied Hessians");

    // ---- census -------------------------------------------------------------
    auto* cen = app.add_subcommand("census", "singular points on the fiber over a value");
    SystemFlags cen_sys;
    Output cen_out;
    std::vector<double> cen_value{1.0, 0.0};
    cen_sys.attach(cen);
    cen_out.attach(cen);
    cen->add_option("--value", cen_value, "critical value h,j")->expected(2)->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // command-line problems are validation failures
    }

    if (mono->parsed()) {
        auto system = mono_sys.build();
        ValueLoop loop;
        if (!polygon.empty()) {
            loop = ValueLoop::polygon(parse_points(polygon), std::max(1, points / 4),
                                      orientation);
            loop.target = {center[0], center[1]};
        } else {
            loop = ValueLoop::circle({center[0], center[1]}, radius, points, orientation);
            if (start_angle != 0.0) {
                for (auto& s : loop.samples) {
                    const double dx = s.x - center[0], dy = s.y - center[1];
                    s = {center[0] + dx * std::cos(start_angle) - dy * std::sin(start_angle),
                         center[1] + dx * std::sin(start_angle) + dy * std::cos(start_angle)};
                }
            }
        }
        ContinuationOptions opts;
        opts.lattice.margin = margin;
        opts.lattice.quad_tol = quad_tol;
        opts.integer_snap = snap;
        opts.exec = serial ? Exec::serial : Exec::parallel;
        const ContinuationResult res = continue_lattice(*system, loop, opts);

        json config = mono_sys.config();
        config["center"] = center;
        config["radius"] = radius;
        config["points"] = points;
        config["orientation"] = orientation;
        config["margin"] = margin;
        config["quad_tol"] = quad_tol;
        config["snap"] = snap;
        json result;
        result["matrix"] = mat_json(res.matrix.entries);
        result["k"] = res.k;
        result["basis_note"] = res.matrix.basis_note;
        json diag;
        diag["subdivision_depth"] = res.subdivision_depth;
        diag["quadrature_calls"] = res.quadrature_calls;
        diag["tolerances_met"] = true;
        mono_out.emit(document("monodromy", config, result, diag));
        if (!mono_out.trace_path.empty()) write_trace_csv(mono_out.trace_path, res.trace);
        return 0;
    }

    if (nh->parsed()) {
        std::vector<int> signs;
        for (char ch : signs_arg) {
            if (ch == '+') signs.push_back(+1);
            else if (ch == '-') signs.push_back(-1);
            else if (ch != ',' && ch != ' ')
                throw invalid_config("--signs expects a comma list of + and -");
        }
        const MonodromyMatrix m = monodromy_signed(signs);
        json config, result;
        config["signs"] = signs;
        result["matrix"] = mat_json(m.entries);
        nh_out.emit(document("monodromy-nh", config, result, json::object()));
        return 0;
    }

    if (comp->parsed()) {
        const MonodromyMatrix a{parse_mat2(mat_a), basis_a};
        const MonodromyMatrix b{parse_mat2(mat_b), basis_b};
        const MonodromyMatrix m = compose_loops(a, b);
        json config, result;
        config["matrix_a"] = mat_json(a.entries);
        config["matrix_b"] = mat_json(b.entries);
        result["matrix"] = mat_json(m.entries);
        comp_out.emit(document("compose", config, result, json::object()));
        return 0;
    }

    if (emb->parsed()) {
        const Mat2i m2 = parse_mat2(emb_mat);
        json config, result;
        config["matrix"] = mat_json(m2);
        result["matrix"] = mat_json(embed_3dof(m2));
        emb_out.emit(document("embed3", config, result, json::object()));
        return 0;
    }

    if (dh->parsed()) {
        auto system = dh_sys.build();
        DHParams params;
        params.energy_cap = energy_cap;
        if (!std::isnan(energy_floor)) params.energy_floor = energy_floor;
        params.c_max = c_max;
        params.samples = dh_samples;
        params.mc_samples = mc_samples;
        params.seed = seed;
        params.exec = dh_serial ? Exec::serial : Exec::parallel;
        const DHProfile prof = dh_profile(*system, params);

        json config = dh_sys.config();
        config["energy_cap"] = energy_cap;
        config["energy_floor"] = prof.energy_floor;
        config["c_max"] = c_max;
        config["samples"] = dh_samples;
        config["mc_samples"] = mc_samples;
        json result;
        result["k_fitted"] = prof.k_fitted;
        result["jump"] = prof.jump;
        result["slope_pos"] = prof.slope_pos;
        result["slope_neg"] = prof.slope_neg;
        result["normalization"] = prof.normalization;
        if (dh_k >= 0) {
            const DHCheckReport chk = dh_check(prof, dh_k);
            result["k"] = dh_k;
            result["residual_max"] = chk.residual_max;
            result["jump_vs_k"] = chk.jump_vs_k;
        }
        json diag;
        diag["tolerances_met"] = true;
        dh_out.emit(document("dh", config, result, diag, seed));
        if (!dh_out.trace_path.empty()) {
            std::ostringstream csv;
            csv << "c,V,estimator,stderr\n";
            csv.precision(17);
            for (const auto& s : prof.samples) {
                csv << s.c << ',' << s.v << ",quadrature," << s.v_err << '\n';
                if (mc_samples > 0)
                    csv << s.c << ',' << s.v_mc << ",monte-carlo," << s.v_mc_err << '\n';
            }
            atomic_write(dh_out.trace_path, csv.str());
        }
        return 0;
    }

    if (bs->parsed()) {
        auto system = bs_sys.build();
        BSGrid g;
        g.f1_min = grid[0];
        g.f1_max = grid[1];
        g.f2_min = grid[2];
        g.f2_max = grid[3];
        g.exclusion = exclusion;
        g.f1_nodes = f1_nodes;
        const BSLattice lat = bs_lattice(*system, hbar, g, 1e-9,
                                         bs_serial ? Exec::serial : Exec::parallel);
        json config = bs_sys.config();
        config["hbar"] = hbar;
        config["grid"] = grid;
        config["exclusion"] = exclusion;
        json result;
        result["points"] = lat.base_values.size();
        if (bs_radius > 0.0) {
            const auto loop = ValueLoop::circle({bs_center[0], bs_center[1]}, bs_radius,
                                                bs_points, +1);
            result["defect"] = lattice_defect(lat, loop);
            config["defect_center"] = bs_center;
            config["defect_radius"] = bs_radius;
        }
        bs_out.emit(document("bs", config, result, json::object()));
        if (!bs_out.trace_path.empty()) {
            std::ostringstream csv;
            csv << "I1,I2,F1,F2\n";
            csv.precision(17);
            for (std::size_t i = 0; i < lat.actions.size(); ++i)
                csv << lat.actions[i].x << ',' << lat.actions[i].y << ','
                    << lat.base_values[i].x << ',' << lat.base_values[i].y << '\n';
            atomic_write(bs_out.trace_path, csv.str());
        }
        return 0;
    }

    if (aff->parsed()) {
        const AffineComplex complex = cut_plane_model(aff_k);
        std::vector<Vec2> loop;
        if (!aff_loop.empty())
            loop = parse_points(aff_loop);
        else
            loop = standard_affine_loop(complex, winding);
        const MonodromyMatrix m = affine_transport(complex, loop);
        json config, result;
        config["k"] = aff_k;
        config["winding"] = winding;
        json charts = json::array();
        for (const auto& ch : complex.charts)
            charts.push_back({{"label", ch.label},
                              {"from", {ch.from.x, ch.from.y}},
                              {"to", {ch.to.x, ch.to.y}}});
        json transitions = json::array();
        for (const auto& t : complex.transitions)
            transitions.push_back({{"from", t.from_chart},
                                   {"to", t.to_chart},
                                   {"matrix", mat_json(t.map)}});
        result["matrix"] = mat_json(m.entries);
        result["complex"] = {{"charts", charts},
                             {"cuts", {{complex.cut_from.x, complex.cut_from.y},
                                       {complex.cut_to.x, complex.cut_to.y}}},
                             {"matrices", transitions}};
        aff_out.emit(document("affine", config, result, json::object()));
        return 0;
    }

    if (cls->parsed()) {
        auto system = cls_sys.build();
        PhasePoint p;
        if (!point_arg.empty()) {
            const auto colon = point_arg.find(':');
            if (colon == std::string::npos)
                throw invalid_config("--point expects chart:c0,c1,c2,c3");
            p.chart = std::stoi(point_arg.substr(0, colon));
            const auto v = parse_doubles(point_arg.substr(colon + 1));
            if (v.size() != 4) throw invalid_config("--point expects 4 coordinates");
            for (int i = 0; i < 4; ++i) p.coords[i] = v[i];
        } else {
            p.chart = (pole == "south") ? PendulumModel::south : PendulumModel::north;
            if (cls_sys.system == "linear") p.chart = 0;
        }
        ClassifyOptions copts;
        copts.use_exact_hessians = !fd_only;
        const SingularPointReport rep = classify_singular_point(*system, p, copts);
        json config = cls_sys.config();
        config["chart"] = p.chart;
        config["point"] = p.coords;
        json result;
        const char* names[] = {"nondegenerate-focus-focus", "degenerate",
                               "other-nondegenerate"};
        result["classification"] = names[static_cast<int>(rep.classification)];
        result["quadratic_coefficients"] = {rep.a, rep.b, rep.c, rep.d};
        result["det_ab_cd"] = rep.det_ab_cd;
        if (rep.weights)
            result["weights"] = {rep.weights->first, rep.weights->second};
        cls_out.emit(document("classify", config, result, json::object()));
        return 0;
    }

    if (cen->parsed()) {
        auto system = cen_sys.build();
        const FiberCensus census =
            singular_fiber_census(*system, {cen_value[0], cen_value[1]});
        json config = cen_sys.config();
        config["value"] = cen_value;
        json result;
        result["k"] = census.k;
        result["signs"] = census.signs;
        cen_out.emit(document("census", config, result, json::object()));
        return 0;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const validation_error& e) {
        nlohmann::ordered_json err{{"error", {{"code", e.code()}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        nlohmann::ordered_json err{{"error", {{"code", e.code()}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 3;
    } catch (const std::exception& e) {
        nlohmann::ordered_json err{
            {"error", {{"code", "Internal"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 4;
    }
}
