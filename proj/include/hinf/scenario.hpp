#pragma once

#include "hinf/behavior.hpp"
#include "hinf/influence.hpp"
#include "hinf/locality_lp.hpp"
#include "hinf/spacetime.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hinf {

struct BehaviorSource {
    enum class Kind { Quantum, Table, MarginalPair };
    Kind kind = Kind::Quantum;
    std::string label;                // "cached-quantum", "local(seed=3)", a path, ...
    std::optional<QuantumSetup> setup;
    std::optional<BehaviorTable> table; // four parties A,B,C,D
    std::optional<BehaviorTable> abd, acd;
};

struct Scenario {
    std::string name;
    std::vector<Event> events;
    ModelSpec model;
    double c = 1;
    BehaviorSource behavior;
    std::pair<std::string, std::string> pair_under_test{"B", "C"};
    std::map<std::string, double> parameters; // builder inputs, echoed in reports
    std::vector<std::string> warnings;
};

void validate(const Scenario& s);

// Data directory holding the cached quantum setup; HINF_DATA_DIR in the environment overrides.
std::string data_dir();
BehaviorSource cached_quantum_behavior();
// random mixture of deterministic four-party strategies, exact rationals
BehaviorSource local_behavior(unsigned seed = 1);
BehaviorSource setup_behavior(const QuantumSetup& s, std::string label);
BehaviorSource table_behavior(const BehaviorTable& P, std::string label);
BehaviorSource pair_behavior(const BehaviorTable& abd, const BehaviorTable& acd, std::string label);

Scenario build_fig2b(double d, double eps, double c);
Scenario build_fig3(double d, double v, double c, MultiSimKind kind);
// planar realization: B, C at (0, +-h) at t = 0, A and D on the x axis early enough to sit in
// the past v-cones of both. v <= c is accepted with a warning (geometry built for v = 2c).
Scenario build_fig1b(double v, double c, double d = 1.0);

struct WitnessReport {
    Event point;
    double min_distance = 0; // from the apex party (A for A', D for D') over the witness locus
};

struct Report {
    std::string scenario;
    std::map<std::string, double> parameters;
    std::string model;
    std::string behavior;
    bool locality_applies = false;
    std::optional<LpStatus> lp_status;
    double margin = 0;
    double rounding_error = 0;
    bool certified = false;
    std::optional<WitnessReport> a_prime, d_prime;
    bool ftl_verdict = false;
    std::vector<std::string> diagnostics;
};

class PipelineError : public std::runtime_error {
public:
    PipelineError(std::string step, const std::string& what)
        : std::runtime_error("step '" + step + "': " + what), step_(std::move(step)) {}
    const std::string& step() const { return step_; }

private:
    std::string step_;
};

struct PipelineOptions {
    LpOptions lp;
    WitnessOptions witness;
};

// ABD and ACD marginals for a scenario's behavior source
std::pair<BehaviorTable, BehaviorTable> marginal_pair(const BehaviorSource& b);

Report run_pipeline(const Scenario& s, const PipelineOptions& opt = {});
// same, with the LP verdict supplied (sweeps reuse one LP across geometry points)
Report run_pipeline(const Scenario& s, const FeasibilityResult& lp, const PipelineOptions& opt = {});

void write_report_text(std::ostream& os, const Report& r);
std::string report_json(const Report& r);

// INI-style configuration: [scenario] preset/d/eps/v/c/kind/name, [model], [events], [behavior], [pair]
Scenario load_scenario_config(const std::string& path);
Scenario scenario_from_config_text(const std::string& text);
Scenario build_preset(const std::string& preset, const std::map<std::string, double>& params);

struct SweepGrid {
    std::string preset;
    std::vector<std::pair<std::string, std::vector<double>>> axes; // cartesian product, last axis fastest
    std::map<std::string, double> fixed;
    std::optional<BehaviorSource> behavior; // default: the preset's own
};

struct SweepRow {
    size_t index = 0;
    std::map<std::string, double> parameters;
    std::optional<Report> report;
    std::string error;
};

std::vector<SweepRow> sweep(const SweepGrid& grid, const PipelineOptions& opt = {}, unsigned workers = 0);
void write_sweep_csv(std::ostream& os, const SweepGrid& grid, const std::vector<SweepRow>& rows, char delim = ',');

} // namespace hinf
