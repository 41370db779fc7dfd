#include "hinf/scenario.hpp"
#include "hinf/rational.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#ifndef HINF_DEFAULT_DATA_DIR
#define HINF_DEFAULT_DATA_DIR "data"
#endif

namespace hinf {

namespace {

std::string num(double x) {
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return os.str();
}

std::vector<double> numbers(const std::string& s, const std::string& what) {
    std::istringstream is(s);
    std::vector<double> v;
    double x;
    while (is >> x) v.push_back(x);
    if (!is.eof()) throw std::invalid_argument("bad number list for " + what + ": '" + s + "'");
    return v;
}

} // namespace

void validate(const Scenario& s) {
    if (!(s.c > 0) || !std::isfinite(s.c)) throw DomainError("c must be positive and finite");
    std::set<std::string> seen;
    for (const auto& e : s.events) {
        if (!seen.insert(e.label).second) throw DomainError("duplicate event label " + e.label);
        for (double x : e.position)
            if (!std::isfinite(x)) throw DomainError("non-finite position for " + e.label);
        if (!std::isfinite(e.time)) throw DomainError("non-finite time for " + e.label);
    }
    for (const char* l : {"A", "B", "C", "D"})
        if (!seen.count(l)) throw DomainError(std::string("scenario lacks party ") + l);
    if (!seen.count(s.pair_under_test.first) || !seen.count(s.pair_under_test.second))
        throw DomainError("pair under test is not among the events");
    validate(s.model, s.c);
    if (const auto* m = std::get_if<MultiSim>(&s.model.variant))
        for (const auto& e : s.events)
            if (!m->device_velocities.count(e.label)) throw DomainError("no device velocity for " + e.label);
}

std::string data_dir() {
    if (const char* env = std::getenv("HINF_DATA_DIR"); env && *env) return env;
    return HINF_DEFAULT_DATA_DIR;
}

BehaviorSource setup_behavior(const QuantumSetup& s, std::string label) {
    validate(s);
    BehaviorSource b;
    b.kind = BehaviorSource::Kind::Quantum;
    b.label = std::move(label);
    b.setup = s;
    return b;
}

BehaviorSource cached_quantum_behavior() {
    return setup_behavior(load_setup(data_dir() + "/cached_setup.txt"), "cached-quantum");
}

BehaviorSource table_behavior(const BehaviorTable& P, std::string label) {
    if (P.n_parties() != 4) throw std::invalid_argument("behavior table must have four parties");
    BehaviorSource b;
    b.kind = BehaviorSource::Kind::Table;
    b.label = std::move(label);
    b.table = P;
    return b;
}

BehaviorSource pair_behavior(const BehaviorTable& abd, const BehaviorTable& acd, std::string label) {
    BehaviorSource b;
    b.kind = BehaviorSource::Kind::MarginalPair;
    b.label = std::move(label);
    b.abd = abd;
    b.acd = acd;
    return b;
}

BehaviorSource local_behavior(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> bit(0, 1), wt(1, 5);
    BehaviorTable P({2, 2, 2, 2}, {2, 2, 2, 2}, true);
    std::vector<mpq_class> acc(P.size(), mpq_class(0));
    const int K = 4;
    std::vector<int> w(K);
    int total = 0;
    for (auto& x : w) total += (x = wt(rng));
    for (int k = 0; k < K; ++k) {
        mpq_class wk(w[k], total);
        wk.canonicalize();
        int f[4][2];
        for (auto& party : f)
            for (auto& o : party) o = bit(rng);
        for (size_t si = 0; si < P.setting_tuples(); ++si) {
            auto s = P.setting_tuple(si);
            acc[P.index({f[0][s[0]], f[1][s[1]], f[2][s[2]], f[3][s[3]]}, s)] += wk;
        }
    }
    for (size_t i = 0; i < P.size(); ++i) P.set(i, acc[i]);
    return table_behavior(P, "local(seed=" + std::to_string(seed) + ")");
}

Scenario build_fig2b(double d, double eps, double c) {
    if (!(d > 0) || !(eps > 0) || !(c > 0)) throw DomainError("fig2b needs d > 0, eps > 0, c > 0");
    if (!(d > 4 * eps * c)) throw DomainError("fig2b needs d > 4 eps c");
    Scenario s;
    s.name = "fig2b";
    s.c = c;
    double h = std::sqrt(3.0) * d / 2;
    s.events = {{"A", {0, 0, 0}, -2 * eps}, {"B", {d / 2, h, 0}, 0}, {"C", {d / 2, -h, 0}, 0}, {"D", {d, 0, 0}, -eps}};
    s.model.variant = FiniteDistance{d};
    s.behavior = cached_quantum_behavior();
    s.parameters = {{"d", d}, {"eps", eps}, {"c", c}};
    return s;
}

Scenario build_fig3(double d, double v, double c, MultiSimKind kind) {
    if (!(d > 0) || !(c > 0)) throw DomainError("fig3 needs d > 0, c > 0");
    if (!(v > 0) || !(v < c / std::sqrt(3.0))) throw DomainError("fig3 needs 0 < v < c/sqrt(3)");
    Scenario s;
    s.name = kind == MultiSimKind::PastDependent ? "fig3c" : "fig3d";
    s.c = c;
    double h = std::sqrt(3.0) * d / 2;
    double t = -std::sqrt(3.0) * v * d / (2 * c * c);
    s.events = {{"A", {0, 0, 0}, t}, {"B", {d / 2, h, 0}, 0}, {"C", {d / 2, -h, 0}, 0}, {"D", {d, 0, 0}, t}};
    // B sits at +y, C at -y: receding means B moves to +y and C to -y
    double sb = kind == MultiSimKind::PastDependent ? v : -v;
    MultiSim m;
    m.kind = kind;
    m.device_velocities = {{"A", {}}, {"B", {{0, sb, 0}}}, {"C", {{0, -sb, 0}}}, {"D", {}}};
    s.model.variant = m;
    s.behavior = cached_quantum_behavior();
    s.parameters = {{"d", d}, {"v", v}, {"c", c}};
    return s;
}

Scenario build_fig1b(double v, double c, double d) {
    if (!(c > 0) || !(d > 0)) throw DomainError("fig1b needs c > 0, d > 0");
    if (!(v > 0) || !std::isfinite(v)) throw DomainError("fig1b needs a finite positive v");
    Scenario s;
    s.name = "fig1b";
    s.c = c;
    double k = v / c;
    if (k <= 1) {
        s.warnings.push_back("v <= c: hidden influences no faster than light; geometry built as for v = 2c");
        k = 2;
    }
    // lengths in units of d, times in units of length / c
    double q = d;
    double h = q * 0.5 * std::min(1.0, std::sqrt(k * k - 1));
    double td = 0.5 * (std::hypot(q, h) / k + q);
    double p = 2 * std::max((k * td + q) / (k - 1), h / std::sqrt(k * k - 1));
    double lo = std::max(td + (p + q) / k, std::hypot(p, h) / k);
    double ta = 0.5 * (lo + p);
    s.events = {{"A", {-p, 0, 0}, -ta / c}, {"B", {0, h, 0}, 0}, {"C", {0, -h, 0}, 0}, {"D", {q, 0, 0}, -td / c}};
    s.model.variant = VCausal{v};
    s.behavior = cached_quantum_behavior();
    s.parameters = {{"v", v}, {"c", c}, {"d", d}};
    return s;
}

std::pair<BehaviorTable, BehaviorTable> marginal_pair(const BehaviorSource& b) {
    switch (b.kind) {
    case BehaviorSource::Kind::Quantum: {
        if (!b.setup) throw std::invalid_argument("quantum behavior without a setup");
        auto P = born_rule(*b.setup);
        if (P.n_parties() != 4) throw std::invalid_argument("quantum setup must have four qubits");
        return {marginalize(P, {0, 1, 3}), marginalize(P, {0, 2, 3})};
    }
    case BehaviorSource::Kind::Table:
        if (!b.table) throw std::invalid_argument("table behavior without a table");
        return {marginalize(*b.table, {0, 1, 3}), marginalize(*b.table, {0, 2, 3})};
    case BehaviorSource::Kind::MarginalPair:
        if (!b.abd || !b.acd) throw std::invalid_argument("marginal pair incomplete");
        return {*b.abd, *b.acd};
    }
    throw std::logic_error("behavior kind");
}

namespace {

Report run_common(const Scenario& s, const FeasibilityResult* given, const PipelineOptions& opt) {
    Report r;
    r.scenario = s.name;
    r.parameters = s.parameters;
    r.behavior = s.behavior.label;
    for (const auto& w : s.warnings) r.diagnostics.push_back("[build] warning: " + w);
    try {
        validate(s);
    } catch (const std::exception& e) {
        throw PipelineError("scenario", e.what());
    }
    r.model = describe(s.model);
    if (s.pair_under_test != std::make_pair(std::string("B"), std::string("C")) &&
        s.pair_under_test != std::make_pair(std::string("C"), std::string("B")))
        throw PipelineError("scenario", "the marginal LP tests the (B,C) pair only");

    try {
        r.locality_applies = locality_condition_applies(s.model, s.events, s.pair_under_test, s.c);
        auto g = influence_graph(s.model, s.events, s.c);
        std::string edges;
        for (const auto& [a, b] : g.edges) edges += " " + a + "->" + b;
        r.diagnostics.push_back("[locality] edges:" + (edges.empty() ? std::string(" none") : edges));
        r.diagnostics.push_back(std::string("[locality] (B,C) ") +
                                (r.locality_applies ? "disconnected, conditional locality binds" : "connected"));
    } catch (const std::exception& e) {
        throw PipelineError("locality", e.what());
    }

    FeasibilityResult lp;
    if (given) {
        lp = *given;
        r.diagnostics.push_back("[decompose] reused LP verdict for behavior " + s.behavior.label);
    } else {
        std::pair<BehaviorTable, BehaviorTable> m;
        try {
            m = marginal_pair(s.behavior);
        } catch (const std::exception& e) {
            throw PipelineError("behavior", e.what());
        }
        r.diagnostics.push_back("[behavior] ABD/ACD marginals from " + s.behavior.label);
        try {
            lp = decompose_locally(m.first, m.second, opt.lp);
        } catch (const std::exception& e) {
            throw PipelineError("decompose", e.what());
        }
    }
    r.lp_status = lp.status;
    if (lp.status == LpStatus::Infeasible) {
        r.margin = lp.margin.get_d();
        r.rounding_error = lp.rounding_error;
        r.certified = lp.certified;
        r.diagnostics.push_back("[decompose] infeasible, certificate value " + to_string(lp.certificate_value) +
                                " bound " + to_string(lp.bound) + " margin " + num(r.margin) +
                                " rounding error " + num(r.rounding_error));
    } else {
        r.rounding_error = lp.rounding_error;
        r.diagnostics.push_back("[decompose] feasible, hidden-influence decomposition exists");
    }

    const Event& A = find_event(s.events, "A");
    const Event& B = find_event(s.events, "B");
    const Event& C = find_event(s.events, "C");
    const Event& D = find_event(s.events, "D");
    auto witness = [&](const Event& apex, const Event& other, const char* name) -> std::optional<WitnessReport> {
        WitnessQuery q{{apex, B, C}, {other}, std::make_pair(B, C), s.c};
        try {
            auto p = find_witness_point(q, opt.witness);
            if (!p) {
                r.diagnostics.push_back(std::string("[witness] no ") + name + " found");
                return std::nullopt;
            }
            WitnessReport w;
            w.point = *p;
            w.point.label = name;
            w.min_distance = min_witness_distance(q, apex.position, opt.witness).value_or(norm(p->position - apex.position));
            r.diagnostics.push_back(std::string("[witness] ") + name + " at (" + num(p->position[0]) + ", " +
                                    num(p->position[1]) + ", " + num(p->position[2]) + ") t=" + num(p->time) +
                                    ", closest locus point " + num(w.min_distance) + " from " + apex.label);
            return w;
        } catch (const WitnessDomainError& e) {
            r.diagnostics.push_back(std::string("[witness] ") + name + " search domain problem: " + e.what());
            return std::nullopt;
        } catch (const std::exception& e) {
            throw PipelineError(std::string("witness ") + name, e.what());
        }
    };
    r.a_prime = witness(A, D, "A'");
    r.d_prime = witness(D, A, "D'");

    r.ftl_verdict = r.locality_applies && r.lp_status == LpStatus::Infeasible && r.certified && r.a_prime && r.d_prime;
    std::string why;
    if (!r.locality_applies) why += " locality does not bind;";
    if (r.lp_status != LpStatus::Infeasible) why += " marginals admit a hidden-influence model;";
    else if (!r.certified) why += " margin does not exceed the rounding bound;";
    if (!r.a_prime) why += " no A';";
    if (!r.d_prime) why += " no D';";
    r.diagnostics.push_back(std::string("[verdict] ") + (r.ftl_verdict ? "faster-than-light signalling" : "no verdict:" + why));
    return r;
}

} // namespace

Report run_pipeline(const Scenario& s, const PipelineOptions& opt) { return run_common(s, nullptr, opt); }

Report run_pipeline(const Scenario& s, const FeasibilityResult& lp, const PipelineOptions& opt) {
    return run_common(s, &lp, opt);
}

void write_report_text(std::ostream& os, const Report& r) {
    os << "scenario: " << r.scenario << '\n';
    os << "parameters:";
    for (const auto& [k, v] : r.parameters) os << ' ' << k << '=' << num(v);
    os << "\nmodel: " << r.model << "\nbehavior: " << r.behavior << '\n';
    os << "locality_applies: " << (r.locality_applies ? "true" : "false") << '\n';
    os << "lp_status: " << (!r.lp_status ? "none" : *r.lp_status == LpStatus::Feasible ? "feasible" : "infeasible") << '\n';
    os << "margin: " << num(r.margin) << "\nrounding_error: " << num(r.rounding_error) << '\n';
    os << "certified: " << (r.certified ? "true" : "false") << '\n';
    for (auto [name, w] : {std::pair{"a_prime", &r.a_prime}, std::pair{"d_prime", &r.d_prime}}) {
        os << name << ": ";
        if (!*w) os << "none\n";
        else {
            const auto& p = (*w)->point;
            os << '(' << num(p.position[0]) << ", " << num(p.position[1]) << ", " << num(p.position[2])
               << ") t=" << num(p.time) << " min_distance=" << num((*w)->min_distance) << '\n';
        }
    }
    os << "ftl_verdict: " << (r.ftl_verdict ? "true" : "false") << "\ndiagnostics:\n";
    for (const auto& d : r.diagnostics) os << "  " << d << '\n';
}

std::string report_json(const Report& r) {
    nlohmann::ordered_json j;
    j["scenario"] = r.scenario;
    j["parameters"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.parameters) j["parameters"][k] = v;
    j["model"] = r.model;
    j["behavior"] = r.behavior;
    j["locality_applies"] = r.locality_applies;
    if (r.lp_status) j["lp_status"] = *r.lp_status == LpStatus::Feasible ? "feasible" : "infeasible";
    else j["lp_status"] = nullptr;
    j["margin"] = r.margin;
    j["rounding_error"] = r.rounding_error;
    j["certified"] = r.certified;
    for (auto [name, w] : {std::pair{"witness_a_prime", &r.a_prime}, std::pair{"witness_d_prime", &r.d_prime}}) {
        if (!*w) {
            j[name] = nullptr;
            continue;
        }
        const auto& p = (*w)->point;
        j[name] = {{"position", {p.position[0], p.position[1], p.position[2]}},
                   {"time", p.time},
                   {"min_distance", (*w)->min_distance}};
    }
    j["ftl_verdict"] = r.ftl_verdict;
    j["diagnostics"] = r.diagnostics;
    return j.dump(2);
}

Scenario build_preset(const std::string& preset, const std::map<std::string, double>& params) {
    std::map<std::string, double> p = params;
    auto take = [&](const char* k, double def) {
        auto it = p.find(k);
        double v = it == p.end() ? def : it->second;
        if (it != p.end()) p.erase(it);
        return v;
    };
    Scenario s;
    if (preset == "fig2b") {
        double d = take("d", 1), eps = take("eps", 0.1), c = take("c", 1);
        s = build_fig2b(d, eps, c);
    } else if (preset == "fig3c" || preset == "fig3d") {
        double d = take("d", 1), v = take("v", 0.1), c = take("c", 1);
        s = build_fig3(d, v, c, preset == "fig3c" ? MultiSimKind::PastDependent : MultiSimKind::FutureInforming);
    } else if (preset == "fig1b") {
        double v = take("v", 2), c = take("c", 1), d = take("d", 1);
        s = build_fig1b(v, c, d);
    } else {
        throw std::invalid_argument("unknown preset '" + preset + "' (fig1b, fig2b, fig3c, fig3d)");
    }
    if (!p.empty()) throw std::invalid_argument("parameter '" + p.begin()->first + "' does not apply to " + preset);
    return s;
}

namespace {

namespace pt = boost::property_tree;

std::optional<std::string> get(const pt::ptree& t, const std::string& path) {
    auto v = t.get_optional<std::string>(pt::ptree::path_type(path, '/'));
    if (!v) return std::nullopt;
    return *v;
}

Scenario from_tree(const pt::ptree& t) {
    std::string preset = get(t, "scenario/preset").value_or("custom");
    std::map<std::string, double> params;
    if (auto sec = t.get_child_optional("scenario"))
        for (const auto& [k, v] : *sec) {
            if (k == "preset" || k == "name") continue;
            params[k] = std::stod(v.data());
        }
    Scenario s;
    if (preset == "custom") {
        s.name = "custom";
        s.c = params.count("c") ? params["c"] : 1.0;
        s.parameters = params;
        s.behavior = cached_quantum_behavior();
    } else {
        s = build_preset(preset, params);
    }
    if (auto n = get(t, "scenario/name")) s.name = *n;

    if (auto ev = t.get_child_optional("events")) {
        for (const auto& [label, v] : *ev) {
            auto x = numbers(v.data(), "event " + label);
            if (x.size() != 4) throw std::invalid_argument("event " + label + " needs 'x y z t'");
            Event e{label, {x[0], x[1], x[2]}, x[3]};
            bool replaced = false;
            for (auto& old : s.events)
                if (old.label == label) old = e, replaced = true;
            if (!replaced) s.events.push_back(e);
        }
    }
    if (auto m = t.get_child_optional("model")) {
        std::string kind = m->get<std::string>("kind", "");
        if (kind == "v-causal") s.model.variant = VCausal{m->get<double>("v")};
        else if (kind == "finite-distance") s.model.variant = FiniteDistance{m->get<double>("d")};
        else if (kind == "past-dependent" || kind == "future-informing") {
            MultiSim ms;
            ms.kind = kind == "past-dependent" ? MultiSimKind::PastDependent : MultiSimKind::FutureInforming;
            if (const auto* old = std::get_if<MultiSim>(&s.model.variant)) ms.device_velocities = old->device_velocities;
            s.model.variant = ms;
        } else if (!kind.empty()) {
            throw std::invalid_argument("unknown model kind '" + kind + "'");
        }
        auto* ms = std::get_if<MultiSim>(&s.model.variant);
        for (const auto& [k, v] : *m) {
            if (k.rfind("velocity.", 0) != 0) continue;
            if (!ms) throw std::invalid_argument("device velocities only apply to multisimultaneity models");
            auto u = numbers(v.data(), k);
            if (u.size() != 3) throw std::invalid_argument(k + " needs 'ux uy uz'");
            ms->device_velocities[k.substr(9)] = FrameVelocity{{u[0], u[1], u[2]}};
        }
    }
    if (auto b = t.get_child_optional("behavior")) {
        std::string src = b->get<std::string>("source", "cached");
        if (src == "cached") s.behavior = cached_quantum_behavior();
        else if (src == "local") s.behavior = local_behavior(b->get<unsigned>("seed", 1));
        else if (src == "setup") s.behavior = setup_behavior(load_setup(b->get<std::string>("path")), b->get<std::string>("path"));
        else if (src == "table") s.behavior = table_behavior(load_table(b->get<std::string>("path")), b->get<std::string>("path"));
        else if (src == "pair")
            s.behavior = pair_behavior(load_table(b->get<std::string>("abd")), load_table(b->get<std::string>("acd")),
                                       b->get<std::string>("abd") + "+" + b->get<std::string>("acd"));
        else throw std::invalid_argument("unknown behavior source '" + src + "'");
    }
    if (auto p = get(t, "pair/parties")) {
        std::istringstream is(*p);
        std::string a, b;
        if (!(is >> a >> b)) throw std::invalid_argument("pair/parties needs two labels");
        s.pair_under_test = {a, b};
    }
    if (preset == "custom" && s.model.variant.index() == 0 && !t.get_child_optional("model"))
        throw std::invalid_argument("custom scenario needs a [model] section");
    return s;
}

} // namespace

Scenario scenario_from_config_text(const std::string& text) {
    std::istringstream is(text);
    pt::ptree t;
    try {
        pt::read_ini(is, t);
    } catch (const pt::ini_parser_error& e) {
        throw FormatError(std::string("config: ") + e.what());
    }
    return from_tree(t);
}

Scenario load_scenario_config(const std::string& path) {
    pt::ptree t;
    try {
        pt::read_ini(path, t);
    } catch (const pt::ini_parser_error& e) {
        throw FormatError(std::string("config: ") + e.what());
    }
    return from_tree(t);
}

std::vector<SweepRow> sweep(const SweepGrid& grid, const PipelineOptions& opt, unsigned workers) {
    size_t total = 1;
    for (const auto& [name, vals] : grid.axes) {
        if (vals.empty()) throw std::invalid_argument("empty sweep axis " + name);
        total *= vals.size();
    }
    std::vector<SweepRow> rows(total);
    std::vector<std::optional<Scenario>> built(total);
    for (size_t i = 0; i < total; ++i) {
        rows[i].index = i;
        rows[i].parameters = grid.fixed;
        size_t rem = i;
        for (size_t a = grid.axes.size(); a-- > 0;) {
            const auto& vals = grid.axes[a].second;
            rows[i].parameters[grid.axes[a].first] = vals[rem % vals.size()];
            rem /= vals.size();
        }
        try {
            built[i] = build_preset(grid.preset, rows[i].parameters);
            if (grid.behavior) built[i]->behavior = *grid.behavior;
        } catch (const std::exception& e) {
            rows[i].error = std::string("build: ") + e.what();
        }
    }
    // every row shares the behavior, so one LP serves the whole grid
    std::optional<FeasibilityResult> lp;
    std::string lp_error;
    for (size_t i = 0; i < total && !lp && lp_error.empty(); ++i) {
        if (!built[i]) continue;
        try {
            auto m = marginal_pair(built[i]->behavior);
            lp = decompose_locally(m.first, m.second, opt.lp);
        } catch (const std::exception& e) {
            lp_error = std::string("decompose: ") + e.what();
        }
    }
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t i; (i = next++) < total;) {
            if (!built[i]) continue;
            if (!lp) {
                rows[i].error = lp_error;
                continue;
            }
            try {
                rows[i].report = run_pipeline(*built[i], *lp, opt);
            } catch (const std::exception& e) {
                rows[i].error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return rows;
}

void write_sweep_csv(std::ostream& os, const SweepGrid& grid, const std::vector<SweepRow>& rows, char delim) {
    std::vector<std::string> params;
    for (const auto& [k, v] : grid.fixed) params.push_back(k);
    for (const auto& a : grid.axes)
        if (!grid.fixed.count(a.first)) params.push_back(a.first);
    os << "index";
    for (const auto& p : params) os << delim << p;
    os << delim << "locality_applies" << delim << "lp_status" << delim << "margin" << delim << "a_prime_distance"
       << delim << "d_prime_distance" << delim << "ftl_verdict" << delim << "error\n";
    for (const auto& r : rows) {
        os << r.index;
        for (const auto& p : params) os << delim << num(r.parameters.at(p));
        if (r.report) {
            const Report& x = *r.report;
            os << delim << (x.locality_applies ? "true" : "false") << delim
               << (x.lp_status == LpStatus::Infeasible ? "infeasible" : "feasible") << delim << num(x.margin) << delim
               << (x.a_prime ? num(x.a_prime->min_distance) : "") << delim
               << (x.d_prime ? num(x.d_prime->min_distance) : "") << delim << (x.ftl_verdict ? "true" : "false")
               << delim << '\n';
        } else {
            std::string err = r.error;
            for (char& ch : err)
                if (ch == delim || ch == '\n') ch = ';';
            os << delim << delim << delim << delim << delim << delim << "false" << delim << err << '\n';
        }
    }
}

} // namespace hinf
