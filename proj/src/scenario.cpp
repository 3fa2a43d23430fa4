#include "scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "diagnostics.hpp"
#include "field_io.hpp"
#include "norms.hpp"
#include "operators.hpp"

namespace bsq {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double x, const char* spec = "%.17g") {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

std::string fmt9(double x) { return fmt(x, "%.9e"); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t x = seed ^ (salt * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct Diagnostics {
    std::vector<std::string> msgs;
    void add(const std::string& m) { msgs.push_back(m); }
    void require(bool ok, const std::string& m) {
        if (!ok) add(m);
    }
};

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& where,
                         Diagnostics& diag) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const auto& k : allowed)
            if (it.key() == k) known = true;
        if (!known) diag.add(where + ": unknown key '" + it.key() + "' (strict mode)");
    }
}

double get_number(const json& obj, const char* key, double fallback, Diagnostics& diag, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) {
        diag.add(where + "." + key + ": expected a number");
        return fallback;
    }
    return obj[key].get<double>();
}

ForceSpec parse_force(const json& obj, const std::string& where, double default_r, double default_s,
                      std::uint64_t default_seed, Diagnostics& diag) {
    reject_unknown_keys(obj, {"amplitude", "radius_r", "sobolev_exponent_s", "seed", "spectrum_shape",
                              "envelope_beta"},
                        where, diag);
    ForceSpec spec;
    spec.amplitude = get_number(obj, "amplitude", 0.0, diag, where);
    spec.radius_r = get_number(obj, "radius_r", default_r, diag, where);
    spec.sobolev_exponent_s = get_number(obj, "sobolev_exponent_s", default_s, diag, where);
    spec.envelope_beta = get_number(obj, "envelope_beta", 2.0, diag, where);
    spec.seed = obj.contains("seed") ? obj["seed"].get<std::uint64_t>() : default_seed;
    if (obj.contains("spectrum_shape")) {
        try {
            spec.spectrum_shape = spectrum_shape_from_string(obj["spectrum_shape"].get<std::string>());
        } catch (const Error& e) {
            diag.add(where + ".spectrum_shape: " + e.what());
        }
    }
    if (spec.amplitude < 0.0) diag.add(where + ".amplitude: must be nonnegative");
    if (!(spec.radius_r > 0.0)) diag.add(where + ".radius_r: must be positive");
    return spec;
}

json force_to_json(const ForceSpec& spec) {
    json j;
    j["amplitude"] = spec.amplitude;
    j["radius_r"] = spec.radius_r;
    j["sobolev_exponent_s"] = spec.sobolev_exponent_s;
    j["seed"] = spec.seed;
    j["spectrum_shape"] = to_string(spec.spectrum_shape);
    j["envelope_beta"] = spec.envelope_beta;
    return j;
}

struct ChannelRule {
    const char* key;
    double default_s;
    std::uint64_t salt;
    bool required;
    bool forbidden;
};

std::vector<ChannelRule> channel_rules(Scenario sc) {
    const bool nonhom = sc == Scenario::nonhomogeneous;
    const bool hom = sc == Scenario::homogeneous;
    const bool ns = sc == Scenario::navier_stokes;
    const bool liou = sc == Scenario::liouville_decay;
    return {
        {"f", -1.0, 1, nonhom || ns, hom || liou},
        {"g", -1.0, 2, nonhom, hom || ns || liou},
        {"gvec", 0.5, 3, nonhom || hom || liou, ns},
        {"u0", 1.0, 4, liou, nonhom || ns},
        {"theta0", 1.0, 5, liou, nonhom || ns},
    };
}

} // namespace

Scenario scenario_from_string(const std::string& s) {
    if (s == "nonhomogeneous") return Scenario::nonhomogeneous;
    if (s == "homogeneous") return Scenario::homogeneous;
    if (s == "navier-stokes") return Scenario::navier_stokes;
    if (s == "liouville-decay") return Scenario::liouville_decay;
    throw Error(ErrorCode::config_error, "unknown scenario '" + s + "'");
}

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::nonhomogeneous: return "nonhomogeneous";
        case Scenario::homogeneous: return "homogeneous";
        case Scenario::navier_stokes: return "navier-stokes";
        case Scenario::liouville_decay: return "liouville-decay";
    }
    return "nonhomogeneous";
}

ScenarioConfig validate_config(const std::string& json_text) {
    Diagnostics diag;
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what(), {e.what()});
    }
    if (!root.is_object()) throw ConfigError("config root must be a JSON object", {"root: not an object"});

    reject_unknown_keys(root, {"scenario", "box", "gevrey_r", "seed", "output_dir", "forces", "stationary",
                               "evolution"},
                        "config", diag);

    ScenarioConfig cfg;
    if (!root.contains("scenario")) {
        diag.add("scenario: required");
    } else {
        try {
            cfg.scenario = scenario_from_string(root["scenario"].get<std::string>());
        } catch (const Error& e) {
            diag.add(std::string("scenario: ") + e.what());
        }
    }

    if (root.contains("box")) {
        const json& b = root["box"];
        reject_unknown_keys(b, {"period_L", "resolution_N", "dealias_fraction"}, "box", diag);
        cfg.box.period_L = get_number(b, "period_L", cfg.box.period_L, diag, "box");
        if (b.contains("resolution_N")) cfg.box.resolution_N = b["resolution_N"].get<int>();
        cfg.box.dealias_fraction = get_number(b, "dealias_fraction", cfg.box.dealias_fraction, diag, "box");
    }
    try {
        cfg.box.validate();
    } catch (const Error& e) {
        diag.add(std::string("box: ") + e.what());
    }

    cfg.gevrey_r = get_number(root, "gevrey_r", 1.0, diag, "config");
    if (!(cfg.gevrey_r > 0.0)) diag.add("gevrey_r: must be positive");
    if (root.contains("seed")) cfg.seed = root["seed"].get<std::uint64_t>();
    if (root.contains("output_dir")) cfg.output_dir = root["output_dir"].get<std::string>();

    const json forces = root.contains("forces") ? root["forces"] : json::object();
    if (!forces.is_object()) {
        diag.add("forces: must be an object");
    } else {
        std::vector<std::string> allowed;
        for (const auto& rule : channel_rules(cfg.scenario)) allowed.push_back(rule.key);
        // Unknown channel names are reported as unknown keys; channels known
        // to other scenarios get the clearer conflict message below.
        for (auto it = forces.begin(); it != forces.end(); ++it) {
            bool any_scenario = false;
            for (const char* k : {"f", "g", "gvec", "u0", "theta0"})
                if (it.key() == k) any_scenario = true;
            if (!any_scenario) diag.add("forces: unknown key '" + it.key() + "' (strict mode)");
        }
        for (const auto& rule : channel_rules(cfg.scenario)) {
            const bool present = forces.contains(rule.key);
            if (present && rule.forbidden) {
                diag.add(std::string("forces.") + rule.key + ": forbidden in scenario '" +
                         to_string(cfg.scenario) + "'");
                continue;
            }
            if (!present) {
                if (rule.required)
                    diag.add(std::string("forces.") + rule.key + ": required in scenario '" +
                             to_string(cfg.scenario) + "'");
                continue;
            }
            const ForceSpec spec = parse_force(forces[rule.key], std::string("forces.") + rule.key,
                                               cfg.gevrey_r, rule.default_s, derive_seed(cfg.seed, rule.salt),
                                               diag);
            if (std::string(rule.key) == "f") cfg.f = spec;
            else if (std::string(rule.key) == "g") cfg.g = spec;
            else if (std::string(rule.key) == "gvec") cfg.gvec = spec;
            else if (std::string(rule.key) == "u0") cfg.u0 = spec;
            else cfg.theta0 = spec;
        }
        // Optional initial data for the homogeneous scenario.
        if (cfg.scenario == Scenario::homogeneous) {
            for (const char* k : {"u0", "theta0"}) {
                if (!forces.contains(k)) {
                    ForceSpec zero;
                    zero.amplitude = 0.0;
                    zero.radius_r = cfg.gevrey_r;
                    zero.sobolev_exponent_s = 1.0;
                    zero.seed = derive_seed(cfg.seed, std::string(k) == "u0" ? 4 : 5);
                    if (std::string(k) == "u0") {
                        if (!cfg.u0) cfg.u0 = zero;
                    } else if (!cfg.theta0) {
                        cfg.theta0 = zero;
                    }
                }
            }
        }
    }

    if (root.contains("stationary")) {
        const json& s = root["stationary"];
        reject_unknown_keys(s, {"damping_alpha", "tol_residual", "max_iters"}, "stationary", diag);
        cfg.stationary.damping_alpha = get_number(s, "damping_alpha", 1.0, diag, "stationary");
        cfg.stationary.tol_residual = get_number(s, "tol_residual", 1e-12, diag, "stationary");
        if (s.contains("max_iters")) cfg.stationary.max_iters = s["max_iters"].get<int>();
        try {
            cfg.stationary.validate();
        } catch (const Error& e) {
            diag.add(std::string("stationary: ") + e.what());
        }
    }

    if (root.contains("evolution")) {
        const json& e = root["evolution"];
        reject_unknown_keys(e, {"steps", "calibration_C", "liouville_t_end", "liouville_steps",
                                "liouville_sample_every"},
                            "evolution", diag);
        if (e.contains("steps")) cfg.evolution.steps = e["steps"].get<int>();
        cfg.evolution.calibration_C = get_number(e, "calibration_C", 1.0, diag, "evolution");
        cfg.evolution.liouville_t_end = get_number(e, "liouville_t_end", 5500.0, diag, "evolution");
        if (e.contains("liouville_steps")) cfg.evolution.liouville_steps = e["liouville_steps"].get<int>();
        if (e.contains("liouville_sample_every"))
            cfg.evolution.liouville_sample_every = e["liouville_sample_every"].get<int>();
        if (cfg.evolution.steps < 2) diag.add("evolution.steps: must be >= 2");
        if (!(cfg.evolution.calibration_C > 0.0)) diag.add("evolution.calibration_C: must be positive");
        if (cfg.evolution.liouville_steps < 1) diag.add("evolution.liouville_steps: must be >= 1");
        if (cfg.evolution.liouville_sample_every < 1)
            diag.add("evolution.liouville_sample_every: must be >= 1");
    }

    if (!diag.msgs.empty()) {
        std::string joined = "invalid configuration:";
        for (const auto& m : diag.msgs) joined += "\n  - " + m;
        throw ConfigError(joined, diag.msgs);
    }
    return cfg;
}

std::string config_echo_json(const ScenarioConfig& cfg) {
    json j;
    j["scenario"] = to_string(cfg.scenario);
    j["box"] = {{"period_L", cfg.box.period_L},
                {"resolution_N", cfg.box.resolution_N},
                {"dealias_fraction", cfg.box.dealias_fraction}};
    j["gevrey_r"] = cfg.gevrey_r;
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir;
    json forces = json::object();
    if (cfg.f) forces["f"] = force_to_json(*cfg.f);
    if (cfg.g) forces["g"] = force_to_json(*cfg.g);
    if (cfg.gvec) forces["gvec"] = force_to_json(*cfg.gvec);
    if (cfg.u0) forces["u0"] = force_to_json(*cfg.u0);
    if (cfg.theta0) forces["theta0"] = force_to_json(*cfg.theta0);
    j["forces"] = forces;
    j["stationary"] = {{"damping_alpha", cfg.stationary.damping_alpha},
                       {"tol_residual", cfg.stationary.tol_residual},
                       {"max_iters", cfg.stationary.max_iters}};
    j["evolution"] = {{"steps", cfg.evolution.steps},
                      {"calibration_C", cfg.evolution.calibration_C},
                      {"liouville_t_end", cfg.evolution.liouville_t_end},
                      {"liouville_steps", cfg.evolution.liouville_steps},
                      {"liouville_sample_every", cfg.evolution.liouville_sample_every}};
    return j.dump(2) + "\n";
}

std::string format_check_line(const CheckLine& line) {
    const char* tag = line.status == CheckStatus::pass     ? "PASS"
                      : line.status == CheckStatus::fail   ? "FAIL"
                                                           : "RECORDED";
    return std::string(tag) + " " + line.name + (line.detail.empty() ? "" : "  " + line.detail);
}

double control_gevrey_measured_ratio(const VectorField& f, const ScalarField& g, double r, int t_points) {
    const double fg = gevrey_norm(f, -1.0, r);
    const double gg = gevrey_norm(g, -1.0, r);
    const double denom = std::sqrt(fg * fg + gg * gg);
    if (denom == 0.0) return 0.0;
    double sup = 0.0;
    for (int i = 0; i < t_points; ++i) {
        const double t = std::pow(10.0, -4.0 + 4.0 * static_cast<double>(i) / (t_points - 1));
        const double w = (2.0 * r / 3.0) * std::sqrt(t);
        const double num_f = gevrey_norm(f, 1.0, w);
        const double num_g = gevrey_norm(g, 1.0, w);
        sup = std::max(sup, std::sqrt(num_f * num_f + num_g * num_g) / denom);
    }
    return sup;
}

namespace {

class ArtifactWriter {
  public:
    explicit ArtifactWriter(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

    std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }

    void text(const std::string& name, const std::string& content) const {
        std::ofstream os(path(name), std::ios::binary);
        if (!os) throw Error(ErrorCode::io_error, "cannot write artifact '" + name + "'");
        os << content;
    }

    void json_file(const std::string& name, const json& j) const { text(name, j.dump(2) + "\n"); }

  private:
    std::string dir_;
};

json constants_to_json(const ExistenceConstants& c) {
    return json{{"delta0", c.delta0},
                {"eta0", c.eta0},
                {"T0", c.T0},
                {"delta1", c.delta1},
                {"eta1", c.eta1},
                {"T1", c.T1},
                {"rho", c.rho},
                {"calibration_C", c.calibration_C},
                {"radius_r", c.radius_r},
                {"mode", c.mode == T1Mode::homogeneous ? "homogeneous" : "nonhomogeneous-uniform"}};
}

json gevrey_report_to_json(const GevreyReport& rep) {
    json annuli = json::array();
    for (const auto& row : rep.liouville.table)
        annuli.push_back({{"k", row.k},
                          {"sup_u", row.sup_u},
                          {"sup_theta", row.sup_theta},
                          {"weighted", row.weighted},
                          {"i1_summand", row.i1_summand}});
    return json{{"measured_radius_u", rep.measured_radius_u},
                {"measured_radius_theta", rep.measured_radius_theta},
                {"r_squared_u", rep.r_squared_u},
                {"r_squared_theta", rep.r_squared_theta},
                {"guaranteed_rho", rep.guaranteed_rho},
                {"liouville_indicator", rep.liouville.indicator},
                {"annulus_table", annuli},
                {"besov_theta", rep.besov_theta},
                {"besov_u_max", rep.besov_u_max},
                {"improved_sobolev_theta", rep.improved_sobolev_theta},
                {"fourier_l1", rep.fourier_l1},
                {"sup_norm", rep.sup_norm}};
}

void write_shell_csv(const ArtifactWriter& out, const GevreyReport& rep) {
    std::string csv = "field,shell_center,xi_argmax,max_abs\n";
    for (const auto& s : rep.shell_data_u)
        csv += "u," + fmt(s.xi_center) + "," + fmt(s.xi_argmax) + "," + fmt(s.max_abs) + "\n";
    for (const auto& s : rep.shell_data_theta)
        csv += "theta," + fmt(s.xi_center) + "," + fmt(s.xi_argmax) + "," + fmt(s.max_abs) + "\n";
    out.text("shell_data.csv", csv);
}

void write_annulus_csv(const ArtifactWriter& out, const GevreyReport& rep) {
    std::string csv = "k,sup_u,sup_theta,weighted,i1_summand\n";
    for (const auto& row : rep.liouville.table)
        csv += std::to_string(row.k) + "," + fmt(row.sup_u) + "," + fmt(row.sup_theta) + "," +
               fmt(row.weighted) + "," + fmt(row.i1_summand) + "\n";
    out.text("annulus_table.csv", csv);
}

void write_stationary_csv(const ArtifactWriter& out, const StationaryResult& res) {
    std::string csv = "iter,du_H1,dtheta_H1,res_m,res_h\n";
    for (const auto& rec : res.history)
        csv += std::to_string(rec.iter) + "," + fmt(rec.du_h1) + "," + fmt(rec.dtheta_h1) + "," +
               fmt(rec.res_momentum) + "," + fmt(rec.res_heat) + "\n";
    out.text("stationary_history.csv", csv);
}

void write_trajectory_csv(const ArtifactWriter& out, const Trajectory& traj, double r) {
    std::string csv = "t,u_H1,theta_H1,gevrey_weighted_H1\n";
    for (int m = 0; m < traj.grid.num_nodes(); ++m) {
        const double t = traj.grid.node(m);
        const double w = (2.0 * r / 3.0) * std::sqrt(t);
        const double gw = gevrey_norm(traj.v[m], 1.0, w) + gevrey_norm(traj.th[m], 1.0, w);
        csv += fmt(t) + "," + fmt(h1_norm(traj.v[m])) + "," + fmt(h1_norm(traj.th[m])) + "," + fmt(gw) + "\n";
    }
    out.text("trajectory_norms.csv", csv);
}

struct CheckCollector {
    std::vector<CheckLine>& checks;
    bool& ok;

    void pass_fail(const std::string& name, bool good, const std::string& detail) {
        checks.push_back({name, good ? CheckStatus::pass : CheckStatus::fail, detail});
        if (!good) ok = false;
    }
    void recorded(const std::string& name, const std::string& detail) {
        checks.push_back({name, CheckStatus::recorded, detail});
    }
};

/// Shared pipeline of the nonhomogeneous and navier-stokes scenarios (the
/// latter runs the same coupled solver with the theta channel zeroed).
void run_stationary_pipeline(const ScenarioConfig& cfg, const ArtifactWriter& out, CheckCollector& cc,
                             std::string& failing_stage) {
    const BoxSpec& box = cfg.box;
    const bool ns = cfg.scenario == Scenario::navier_stokes;

    const VectorField f = make_gevrey_vector(*cfg.f, box, /*divergence_free=*/true);
    ForceSpec zero_spec;
    zero_spec.amplitude = 0.0;
    zero_spec.radius_r = cfg.gevrey_r;
    const ScalarField g = ns ? ScalarField(box) : make_gevrey_scalar(*cfg.g, box);
    const VectorField gvec = ns ? VectorField(box) : make_gevrey_vector(*cfg.gvec, box, false);
    save_field(f, out.path("f.field"));
    if (!ns) {
        save_field(g, out.path("g.field"));
        save_field(gvec, out.path("gvec.field"));
    }

    StationaryResult res;
    try {
        res = solve_stationary(f, g, gvec, cfg.stationary);
    } catch (const NonConvergence& e) {
        failing_stage = "stationary";
        cc.pass_fail("stationary-converged", false, e.what());
        return;
    }
    write_stationary_csv(out, res);
    save_field(res.u, out.path("u.field"));
    save_field(res.theta, out.path("theta.field"));
    save_field(res.pressure_u, out.path("pressure_u.field"));
    save_field(res.pressure_theta, out.path("pressure_theta.field"));
    cc.pass_fail("stationary-converged", true,
                 "iters=" + std::to_string(res.iterations) + " update=" + fmt9(res.final_update_norm));
    cc.pass_fail("divergence-free", res.max_divergence_defect <= 1e-12 * std::max(max_abs_coeff(res.u), 1e-300),
                 "max_defect=" + fmt9(res.max_divergence_defect));

    const EnergyReport& en = res.energy;
    out.json_file("energy_report.json", json{{"ratio_u", en.ratio_u},
                                             {"ratio_theta", en.ratio_theta},
                                             {"ratio_pressure_u", en.ratio_pressure_u},
                                             {"ratio_pressure_theta", en.ratio_pressure_theta},
                                             {"u_h1", en.u_h1},
                                             {"theta_h1", en.theta_h1},
                                             {"f_hm1", en.f_hm1},
                                             {"g_hm1", en.g_hm1},
                                             {"gvec_l32", en.gvec_l32},
                                             {"gvec_h12", en.gvec_h12}});
    cc.pass_fail("theta-energy-constant-1", en.ratio_theta <= 1.0 + 1e-8, "ratio=" + fmt9(en.ratio_theta));
    cc.recorded("u-energy-ratio", "ratio=" + fmt9(en.ratio_u));
    cc.recorded("pressure-ratios",
                "P_u=" + fmt9(en.ratio_pressure_u) + " P_theta=" + fmt9(en.ratio_pressure_theta));

    const auto [rm, rh] = pde_residual(res.u, res.theta, res.pressure_u + res.pressure_theta, f, g, gvec);
    const double data_scale = en.f_hm1 + en.g_hm1 + 1e-300;
    cc.pass_fail("pde-residual", rm <= 10.0 * cfg.stationary.tol_residual * data_scale &&
                                     rh <= 10.0 * cfg.stationary.tol_residual * data_scale,
                 "res_m=" + fmt9(rm) + " res_h=" + fmt9(rh));

    ExistenceConstants constants;
    try {
        constants = compute_T1(res.u, res.theta, f, g, gvec, cfg.gevrey_r, cfg.evolution.calibration_C,
                               T1Mode::nonhomogeneous_uniform);
    } catch (const Error& e) {
        failing_stage = "constants";
        cc.pass_fail("existence-constants", false, e.what());
        return;
    }
    out.json_file("constants.json", constants_to_json(constants));
    cc.recorded("existence-constants",
                "T0=" + fmt9(constants.T0) + " T1=" + fmt9(constants.T1) + " rho=" + fmt9(constants.rho));

    const double cg_ratio = control_gevrey_measured_ratio(f, g, cfg.gevrey_r);
    const double cg_bound = control_gevrey_constant(cfg.gevrey_r) * (1.0 + 1e-6);
    cc.pass_fail("control-gevrey-bound", cg_ratio <= cg_bound,
                 "ratio=" + fmt9(cg_ratio) + " C_r=" + fmt9(control_gevrey_constant(cfg.gevrey_r)));

    PicardResult run;
    try {
        run = picard_mild_solve(res.u, res.theta, f, g, gvec, constants.T1, cfg.evolution.steps, 1e-12,
                                cfg.evolution.calibration_C);
    } catch (const Error& e) {
        failing_stage = "evolution";
        cc.pass_fail("stationary-drift", false, e.what());
        return;
    }
    write_trajectory_csv(out, run.traj, cfg.gevrey_r);
    const double base = h1_norm(res.u) + h1_norm(res.theta);
    double drift = 0.0;
    for (int m = 0; m < run.traj.grid.num_nodes(); ++m)
        drift = std::max(drift, (h1_norm(run.traj.v[m] - res.u) + h1_norm(run.traj.th[m] - res.theta)) /
                                    std::max(base, 1e-300));
    cc.pass_fail("stationary-drift", drift <= 1e-6, "drift=" + fmt9(drift));
    cc.pass_fail("picard-ball", true,
                 "iterates=" + std::to_string(run.iterations) + " E_T=" + fmt9(run.final_norm) +
                     " 3delta0=" + fmt9(3.0 * run.delta0));

    double weighted = 0.0;
    for (int m = 0; m < run.traj.grid.num_nodes(); ++m) {
        const double w = (2.0 * cfg.gevrey_r / 3.0) * std::sqrt(run.traj.grid.node(m));
        weighted = std::max(weighted, gevrey_norm(run.traj.v[m], 1.0, w) + gevrey_norm(run.traj.th[m], 1.0, w));
    }
    cc.pass_fail("gevrey-weighted-bound", weighted <= 3.0 * constants.delta1 + 1e-300,
                 "sup=" + fmt9(weighted) + " 3delta1=" + fmt9(3.0 * constants.delta1));

    const GevreyReport rep = build_gevrey_report(res.u, res.theta, constants);
    out.json_file("gevrey_report.json", gevrey_report_to_json(rep));
    write_shell_csv(out, rep);
    write_annulus_csv(out, rep);

    double min_radius = rep.measured_radius_u;
    double min_r2 = rep.r_squared_u;
    if (max_abs_coeff(res.theta) > 0.0) {
        min_radius = std::min(min_radius, rep.measured_radius_theta);
        min_r2 = std::min(min_r2, rep.r_squared_theta);
    }
    cc.pass_fail("gevrey-radius", min_radius >= constants.rho && min_r2 >= 0.99,
                 "measured=" + fmt9(min_radius) + " rho=" + fmt9(constants.rho) + " R2=" + fmt9(min_r2));
    cc.pass_fail("fourier-chain", rep.sup_norm <= rep.fourier_l1 * (1.0 + 1e-12),
                 "l1=" + fmt9(rep.fourier_l1) + " sup=" + fmt9(rep.sup_norm));
    cc.recorded("wsp-norms", "W1_6=" + fmt9(wsp_norm(res.theta, 1.0, 6.0)) +
                                 " W2_6=" + fmt9(wsp_norm(res.theta, 2.0, 6.0)));

    if (ns) {
        cc.pass_fail("ns-theta-zero", max_abs_coeff(res.theta) == 0.0,
                     "max_theta=" + fmt9(max_abs_coeff(res.theta)));
    }
}

void run_homogeneous_pipeline(const ScenarioConfig& cfg, const ArtifactWriter& out, CheckCollector& cc,
                              std::string& failing_stage) {
    const BoxSpec& box = cfg.box;
    const VectorField gvec = make_gevrey_vector(*cfg.gvec, box, false);
    const VectorField u0 = make_gevrey_vector(*cfg.u0, box, true);
    const ScalarField theta0 = make_gevrey_scalar(*cfg.theta0, box);
    save_field(gvec, out.path("gvec.field"));
    save_field(u0, out.path("u0.field"));
    save_field(theta0, out.path("theta0.field"));

    // The homogeneous stationary iteration from (0,0) with f = g = 0 stays at
    // the zero solution: one map application confirms the fixed point.
    const VectorField zf(box);
    const ScalarField zg(box);
    StationaryResult zres;
    try {
        zres = solve_stationary(zf, zg, gvec, cfg.stationary);
    } catch (const NonConvergence& e) {
        failing_stage = "stationary";
        cc.pass_fail("stationary-zero", false, e.what());
        return;
    }
    cc.pass_fail("stationary-zero",
                 zres.iterations == 1 && h1_norm(zres.u) == 0.0 && h1_norm(zres.theta) == 0.0,
                 "iters=" + std::to_string(zres.iterations) + " norm=" + fmt9(h1_norm(zres.u) + h1_norm(zres.theta)));

    ExistenceConstants constants;
    try {
        constants = compute_T1(u0, theta0, zf, zg, gvec, cfg.gevrey_r, cfg.evolution.calibration_C,
                               T1Mode::homogeneous);
    } catch (const Error& e) {
        failing_stage = "constants";
        cc.pass_fail("existence-constants", false, e.what());
        return;
    }
    out.json_file("constants.json", constants_to_json(constants));
    cc.recorded("existence-constants",
                "T0=" + fmt9(constants.T0) + " T1=" + fmt9(constants.T1) + " rho=" + fmt9(constants.rho));

    PicardResult run;
    try {
        run = picard_mild_solve(u0, theta0, zf, zg, gvec, constants.T1, cfg.evolution.steps, 1e-10,
                                cfg.evolution.calibration_C);
    } catch (const Error& e) {
        failing_stage = "evolution";
        cc.pass_fail("picard-ball", false, e.what());
        return;
    }
    write_trajectory_csv(out, run.traj, cfg.gevrey_r);
    cc.pass_fail("picard-ball", true,
                 "iterates=" + std::to_string(run.iterations) + " E_T=" + fmt9(run.final_norm) +
                     " 3delta0=" + fmt9(3.0 * run.delta0));

    double weighted = 0.0;
    for (int m = 0; m < run.traj.grid.num_nodes(); ++m) {
        const double w = (2.0 * cfg.gevrey_r / 3.0) * std::sqrt(run.traj.grid.node(m));
        weighted = std::max(weighted, gevrey_norm(run.traj.v[m], 1.0, w) + gevrey_norm(run.traj.th[m], 1.0, w));
    }
    cc.pass_fail("gevrey-weighted-bound", std::isfinite(weighted) && weighted <= 3.0 * constants.delta1 + 1e-300,
                 "sup=" + fmt9(weighted) + " 3delta1=" + fmt9(3.0 * constants.delta1));

    const int last = run.traj.grid.num_nodes() - 1;
    save_field(run.traj.v[last], out.path("u_T1.field"));
    save_field(run.traj.th[last], out.path("theta_T1.field"));
    const GevreyReport rep = build_gevrey_report(run.traj.v[last], run.traj.th[last], constants);
    out.json_file("gevrey_report.json", gevrey_report_to_json(rep));
    write_shell_csv(out, rep);
    write_annulus_csv(out, rep);
    cc.recorded("liouville-indicator", "value=" + fmt9(rep.liouville.indicator));
}

void run_liouville_pipeline(const ScenarioConfig& cfg, const ArtifactWriter& out, CheckCollector& cc,
                            std::string& failing_stage) {
    const BoxSpec& box = cfg.box;
    const VectorField gvec = make_gevrey_vector(*cfg.gvec, box, false);
    VectorField u = make_gevrey_vector(*cfg.u0, box, true);
    ScalarField theta = make_gevrey_scalar(*cfg.theta0, box);
    save_field(gvec, out.path("gvec.field"));
    save_field(u, out.path("u0.field"));
    save_field(theta, out.path("theta0.field"));

    auto sample_row = [&](double t, const VectorField& v, const ScalarField& th) {
        const double ind = liouville_indicator(v, th).indicator;
        double besov_u = 0.0;
        for (int d = 0; d < 3; ++d) besov_u = std::max(besov_u, besov_norm(v.comp[d]).value);
        const double besov_t = max_abs_coeff(th) > 0.0 ? besov_norm(th).value : 0.0;
        return std::make_tuple(ind, besov_t, besov_u, h1_norm(v), h1_norm(th),
                               fmt(t) + "," + fmt(ind) + "," + fmt(besov_t) + "," + fmt(besov_u) + "," +
                                   fmt(h1_norm(v)) + "," + fmt(h1_norm(th)) + "\n");
    };

    std::string csv = "t,liouville_indicator,besov_theta,besov_u_max,u_H1,theta_H1\n";
    auto [ind0, besov_t0, besov_u0, uh0, th0n, row0] = sample_row(0.0, u, theta);
    csv += row0;

    std::vector<double> indicator_series{ind0};
    const int every = cfg.evolution.liouville_sample_every;
    int step = 0;
    try {
        evolve_homogeneous_etd(u, theta, gvec, 0.0, cfg.evolution.liouville_t_end,
                               cfg.evolution.liouville_steps,
                               [&](double t, const VectorField& v, const ScalarField& th) {
                                   ++step;
                                   if (step % every != 0 && step != cfg.evolution.liouville_steps) return;
                                   auto [ind, bt, bu, uh, thn, row] = sample_row(t, v, th);
                                   csv += row;
                                   indicator_series.push_back(ind);
                               });
    } catch (const Error& e) {
        failing_stage = "evolution";
        cc.pass_fail("liouville-decay-indicator", false, e.what());
        out.text("liouville_series.csv", csv);
        return;
    }
    out.text("liouville_series.csv", csv);
    save_field(u, out.path("u_final.field"));
    save_field(theta, out.path("theta_final.field"));

    auto [ind1, besov_t1, besov_u1, uh1, th1n, row1] = sample_row(cfg.evolution.liouville_t_end, u, theta);

    const double h1_initial = uh0 + th0n, h1_final = uh1 + th1n;
    const double besov_initial = std::max(besov_t0, besov_u0), besov_final = std::max(besov_t1, besov_u1);
    cc.pass_fail("liouville-decay-indicator", ind1 <= 1e-8 * ind0 + 1e-300,
                 "initial=" + fmt9(ind0) + " final=" + fmt9(ind1));
    cc.pass_fail("liouville-decay-besov", besov_final <= 1e-8 * besov_initial + 1e-300,
                 "initial=" + fmt9(besov_initial) + " final=" + fmt9(besov_final));
    cc.pass_fail("liouville-decay-h1", h1_final <= 1e-8 * h1_initial + 1e-300,
                 "initial=" + fmt9(h1_initial) + " final=" + fmt9(h1_final));

    bool monotone = true;
    const std::size_t start = indicator_series.size() / 4;
    for (std::size_t i = start + 1; i < indicator_series.size(); ++i)
        if (indicator_series[i] > indicator_series[i - 1] * (1.0 + 1e-6) + 1e-12 * ind0) monotone = false;
    cc.pass_fail("liouville-monotone", monotone, "beyond-transient nonincreasing");
}

} // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& cfg) {
    ScenarioOutcome outcome;
    outcome.scenario = to_string(cfg.scenario);
    outcome.output_dir = cfg.output_dir;
    const ArtifactWriter out(cfg.output_dir);
    out.text("config_echo.json", config_echo_json(cfg));

    CheckCollector cc{outcome.checks, outcome.ok};
    switch (cfg.scenario) {
        case Scenario::nonhomogeneous:
        case Scenario::navier_stokes:
            run_stationary_pipeline(cfg, out, cc, outcome.failing_stage);
            break;
        case Scenario::homogeneous:
            run_homogeneous_pipeline(cfg, out, cc, outcome.failing_stage);
            break;
        case Scenario::liouville_decay:
            run_liouville_pipeline(cfg, out, cc, outcome.failing_stage);
            break;
    }
    if (!outcome.failing_stage.empty()) outcome.ok = false;

    json checks = json::array();
    for (const auto& c : outcome.checks)
        checks.push_back({{"name", c.name},
                          {"status", c.status == CheckStatus::pass     ? "PASS"
                                     : c.status == CheckStatus::fail   ? "FAIL"
                                                                       : "RECORDED"},
                          {"detail", c.detail}});
    out.json_file("summary.json", json{{"scenario", to_string(cfg.scenario)},
                                       {"ok", outcome.ok},
                                       {"failing_stage", outcome.failing_stage},
                                       {"checks", checks}});
    return outcome;
}

} // namespace bsq
