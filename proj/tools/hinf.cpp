// hinf: scenarios, no-signalling checks, marginal LP, witness points, pipeline, sweeps, search.
// Exit status: 0 = ran and the answer is "yes" (verdict true, violation certified, witness
// found, table no-signalling), 1 = ran and the answer is "no", 2 = bad input or domain error.
#include "hinf/behavior.hpp"
#include "hinf/locality_lp.hpp"
#include "hinf/rational.hpp"
#include "hinf/scenario.hpp"
#include "hinf/search.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace hinf;

namespace {

struct ScenarioArgs {
    std::string preset = "fig2b";
    std::string config;
    std::optional<double> d, eps, v, c;
    std::string behavior = "cached";
    unsigned seed = 1;

    void add(CLI::App* app) {
        app->add_option("--preset", preset, "fig1b | fig2b | fig3c | fig3d");
        app->add_option("--config", config, "INI scenario file (overrides --preset)");
        app->add_option("--d", d, "inter-party distance");
        app->add_option("--eps", eps, "fig2b time offset");
        app->add_option("--v", v, "fig1b influence speed / fig3 device speed");
        app->add_option("--c", c, "speed of light");
        app->add_option("--behavior", behavior,
                        "cached | local | setup:PATH | table:PATH | pair:ABD,ACD");
        app->add_option("--seed", seed, "seed for --behavior local");
    }

    Scenario build() const {
        Scenario s;
        if (!config.empty()) {
            s = load_scenario_config(config);
        } else {
            std::map<std::string, double> p;
            if (d) p["d"] = *d;
            if (eps) p["eps"] = *eps;
            if (v) p["v"] = *v;
            if (c) p["c"] = *c;
            s = build_preset(preset, p);
        }
        if (!config.empty() && behavior == "cached") return s;
        s.behavior = parse_behavior(behavior, seed);
        return s;
    }

    static BehaviorSource parse_behavior(const std::string& b, unsigned seed) {
        if (b == "cached") return cached_quantum_behavior();
        if (b == "local") return local_behavior(seed);
        auto colon = b.find(':');
        std::string kind = b.substr(0, colon), arg = colon == std::string::npos ? "" : b.substr(colon + 1);
        if (kind == "setup") return setup_behavior(load_setup(arg), arg);
        if (kind == "table") return table_behavior(load_table(arg), arg);
        if (kind == "pair") {
            auto comma = arg.find(',');
            if (comma == std::string::npos) throw std::invalid_argument("pair:ABD,ACD expected");
            return pair_behavior(load_table(arg.substr(0, comma)), load_table(arg.substr(comma + 1)), arg);
        }
        throw std::invalid_argument("unknown behavior '" + b + "'");
    }
};

void print_events(const Scenario& s) {
    std::cout << "scenario " << s.name << "\nmodel " << describe(s.model) << "\nc " << s.c << "\nbehavior "
              << s.behavior.label << "\npair " << s.pair_under_test.first << ' ' << s.pair_under_test.second << '\n';
    for (const auto& e : s.events)
        std::cout << "event " << e.label << "  x=(" << e.position[0] << ", " << e.position[1] << ", "
                  << e.position[2] << ")  t=" << e.time << '\n';
    if (const auto* m = std::get_if<MultiSim>(&s.model.variant))
        for (const auto& [k, u] : m->device_velocities)
            std::cout << "velocity " << k << " (" << u.velocity[0] << ", " << u.velocity[1] << ", "
                      << u.velocity[2] << ")\n";
    for (const auto& w : s.warnings) std::cout << "warning " << w << '\n';
}

// "name=a:b:n" (n evenly spaced points, inclusive) or "name=x,y,z"
std::pair<std::string, std::vector<double>> parse_axis(const std::string& arg) {
    auto eq = arg.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("axis '" + arg + "' needs name=values");
    std::string name = arg.substr(0, eq), rest = arg.substr(eq + 1);
    std::vector<double> vals;
    if (rest.find(':') != std::string::npos) {
        std::replace(rest.begin(), rest.end(), ':', ' ');
        std::istringstream is(rest);
        double a, b;
        int n;
        if (!(is >> a >> b >> n) || n < 1) throw std::invalid_argument("axis '" + arg + "' needs a:b:n");
        for (int i = 0; i < n; ++i) vals.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    } else {
        std::replace(rest.begin(), rest.end(), ',', ' ');
        std::istringstream is(rest);
        double x;
        while (is >> x) vals.push_back(x);
        if (vals.empty()) throw std::invalid_argument("axis '" + arg + "' has no values");
    }
    return {name, vals};
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hidden-influence refutation toolkit"};
    app.require_subcommand(1);

    auto* sc = app.add_subcommand("scenario", "build a preset or config scenario and print it");
    ScenarioArgs sc_args;
    sc_args.add(sc);

    auto* ns = app.add_subcommand("check-ns", "no-signalling check of a behavior table");
    std::string ns_table;
    double ns_tol = 1e-10;
    ns->add_option("table", ns_table, "table file")->required();
    ns->add_option("--tol", ns_tol, "tolerance (0 = exact for exact tables)");

    auto* dc = app.add_subcommand("decompose", "marginal LP: hidden-influence decomposition or certificate");
    std::string dc_table, dc_abd, dc_acd, dc_cert, dc_weights;
    long dc_den = 1000000;
    dc->add_option("--table", dc_table, "four-party table (A,B,C,D)");
    dc->add_option("--abd", dc_abd, "ABD marginal");
    dc->add_option("--acd", dc_acd, "ACD marginal");
    dc->add_option("--denominator", dc_den, "rationalization denominator");
    dc->add_option("--certificate", dc_cert, "write the certificate here when infeasible");
    dc->add_option("--reconstruct", dc_weights, "write the reconstructed four-party table when feasible");

    auto* wt = app.add_subcommand("witness", "witness points A' and D' of a scenario");
    ScenarioArgs wt_args;
    wt_args.add(wt);

    auto* pl = app.add_subcommand("pipeline", "run the full refutation pipeline");
    ScenarioArgs pl_args;
    pl_args.add(pl);
    std::string pl_json;
    bool pl_json_stdout = false;
    pl->add_option("--json", pl_json, "also write the JSON report here");
    pl->add_flag("--json-stdout", pl_json_stdout, "print the JSON report instead of text");

    auto* sw = app.add_subcommand("sweep", "pipeline over a parameter grid, delimited table output");
    std::string sw_preset = "fig2b", sw_out, sw_behavior = "cached";
    std::vector<std::string> sw_axes, sw_fixed;
    unsigned sw_workers = 0, sw_seed = 1;
    std::string sw_delim_arg = ",";
    sw->add_option("--preset", sw_preset, "fig1b | fig2b | fig3c | fig3d");
    sw->add_option("--axis", sw_axes, "name=a:b:n or name=x,y,...")->required();
    sw->add_option("--fixed", sw_fixed, "name=value");
    sw->add_option("--behavior", sw_behavior, "as for pipeline");
    sw->add_option("--seed", sw_seed, "seed for --behavior local");
    sw->add_option("--workers", sw_workers, "threads (0 = all cores)");
    sw->add_option("--delimiter", sw_delim_arg, "column delimiter, one character or \\t / tab");
    sw->add_option("--out", sw_out, "output file (default stdout)");

    auto* se = app.add_subcommand("search", "seesaw search for quantum marginals the LP rejects");
    SearchOptions se_opt;
    std::string se_family = "general", se_guide, se_setup, se_cert;
    se->add_option("--family", se_family, "product | ghz | general");
    se->add_option("--restarts", se_opt.restarts, "random restarts");
    se->add_option("--sweeps", se_opt.sweeps, "seesaw sweeps per restart");
    se->add_option("--seed", se_opt.seed, "seed");
    se->add_option("--guide", se_guide, "guide expression (default: data/guide_facet.txt)");
    se->add_option("--setup-out", se_setup, "write the best setup here");
    se->add_option("--certificate-out", se_cert, "write the LP certificate of the best setup here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*sc) {
            print_events(sc_args.build());
            return 0;
        }
        if (*ns) {
            auto P = load_table(ns_table);
            auto r = check_no_signalling(P, ns_tol);
            std::cout << (r.pass ? "no-signalling: pass" : "no-signalling: FAIL") << "  max discrepancy "
                      << r.max_discrepancy << "  normalization error " << normalization_error(P) << '\n';
            for (const auto& v : r.violations)
                std::cout << "  party " << v.party << " settings " << v.setting_a << " vs " << v.setting_b
                          << "  magnitude " << v.magnitude << "  " << v.context << '\n';
            return r.pass ? 0 : 1;
        }
        if (*dc) {
            LpOptions o;
            o.denominator = dc_den;
            FeasibilityResult r;
            if (!dc_table.empty()) r = decompose_locally(load_table(dc_table), o);
            else if (!dc_abd.empty() && !dc_acd.empty()) r = decompose_locally(load_table(dc_abd), load_table(dc_acd), o);
            else throw std::invalid_argument("give --table or both --abd and --acd");
            std::cout << "rounding error (L1) " << r.rounding_error << '\n';
            if (r.status == LpStatus::Feasible) {
                std::cout << "feasible: a hidden-influence decomposition exists\n";
                if (!dc_weights.empty()) save_table(dc_weights, reconstruct_full_distribution(r));
                return 1;
            }
            std::cout << "infeasible\ncertificate value " << to_string(r.certificate_value) << "\nbound "
                      << to_string(r.bound) << "\nmargin " << to_string(r.margin) << " (" << r.margin.get_d()
                      << ")\nlocal deterministic max " << to_string(r.local_max) << "\ncertified "
                      << (r.certified ? "yes" : "no") << '\n';
            if (!dc_cert.empty()) {
                std::ofstream out(dc_cert);
                write_expression(out, extract_certificate(r));
            }
            return r.certified ? 0 : 1;
        }
        if (*wt) {
            Scenario s = wt_args.build();
            validate(s);
            const Event& B = find_event(s.events, "B");
            const Event& C = find_event(s.events, "C");
            bool all = true;
            for (auto [apex, other, name] : {std::tuple{"A", "D", "A'"}, std::tuple{"D", "A", "D'"}}) {
                const Event& X = find_event(s.events, apex);
                WitnessQuery q{{X, B, C}, {find_event(s.events, other)}, std::make_pair(B, C), s.c};
                auto p = find_witness_point(q);
                if (!p) {
                    std::cout << name << " none\n";
                    all = false;
                    continue;
                }
                auto md = min_witness_distance(q, X.position);
                std::cout << name << " (" << p->position[0] << ", " << p->position[1] << ", " << p->position[2]
                          << ") t=" << p->time << "  min distance from " << apex << " "
                          << std::setprecision(12) << md.value_or(0) << std::setprecision(6) << '\n';
            }
            if (s.name == "fig2b")
                std::cout << "closed form 2ec(d-ec)/(d-4ec) = "
                          << witness_bound_fig2(s.parameters.at("d"), s.parameters.at("eps"), s.c) << '\n';
            if (s.name == "fig3c" || s.name == "fig3d")
                std::cout << "closed form dv(4sqrt3c-3v)/(4c(c-sqrt3v)) = "
                          << witness_bound_fig3(s.parameters.at("d"), s.parameters.at("v"), s.c) << '\n';
            return all ? 0 : 1;
        }
        if (*pl) {
            Report r = run_pipeline(pl_args.build());
            if (pl_json_stdout) std::cout << report_json(r) << '\n';
            else write_report_text(std::cout, r);
            if (!pl_json.empty()) write_file(pl_json, report_json(r) + "\n");
            return r.ftl_verdict ? 0 : 1;
        }
        if (*sw) {
            SweepGrid g;
            g.preset = sw_preset;
            for (const auto& a : sw_axes) g.axes.push_back(parse_axis(a));
            for (const auto& f : sw_fixed) {
                auto [k, vals] = parse_axis(f);
                if (vals.size() != 1) throw std::invalid_argument("--fixed takes one value");
                g.fixed[k] = vals[0];
            }
            if (sw_behavior != "cached") g.behavior = ScenarioArgs::parse_behavior(sw_behavior, sw_seed);
            auto rows = sweep(g, {}, sw_workers);
            char sw_delim = sw_delim_arg == "\\t" || sw_delim_arg == "tab" ? '\t' : sw_delim_arg.size() == 1 ? sw_delim_arg[0] : 0;
            if (!sw_delim) throw std::invalid_argument("--delimiter needs one character");
            if (sw_out.empty()) write_sweep_csv(std::cout, g, rows, sw_delim);
            else {
                std::ofstream out(sw_out);
                write_sweep_csv(out, g, rows, sw_delim);
            }
            bool all = true;
            for (const auto& r : rows) all = all && r.report && r.report->ftl_verdict;
            return all ? 0 : 1;
        }
        if (*se) {
            se_opt.family = parse_family(se_family);
            BellExpression guide = load_expression(se_guide.empty() ? data_dir() + "/guide_facet.txt" : se_guide);
            guide.bound = hidden_influence_max(guide, LpShape{});
            auto res = violation_search(lp_search_oracle(guide), se_opt);
            std::cout << "family " << to_string(se_opt.family) << "  restarts " << res.restarts_run
                      << "  best restart " << res.best_restart << "\nguide value " << std::setprecision(12)
                      << res.guide_value << " (hidden-influence max " << to_string(guide.bound) << ")\nmargin "
                      << res.margin << '\n';
            if (!se_setup.empty()) {
                std::ofstream out(se_setup);
                write_setup(out, res.setup);
            }
            if (!se_cert.empty()) {
                auto P = born_rule(res.setup);
                auto r = decompose_locally(P);
                if (r.status != LpStatus::Infeasible) throw std::runtime_error("best setup is LP-feasible, no certificate");
                std::ofstream out(se_cert);
                write_expression(out, extract_certificate(r));
            }
            return res.margin > 0 ? 0 : 1;
        }
    } catch (const PipelineError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
