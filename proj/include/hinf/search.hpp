#pragma once

#include "hinf/behavior.hpp"

#include <cstdint>
#include <functional>
#include <optional>

namespace hinf {

// GHZ: the state is fixed to (|0..0> + |1..1>)/sqrt2, only axes move.
enum class StateFamily { Product, GHZ, General };

StateFamily parse_family(const std::string& s);
std::string to_string(StateFamily f);

struct SearchOptions {
    StateFamily family = StateFamily::General;
    int n_qubits = 4;
    int settings = 2;
    int restarts = 20;
    int sweeps = 60;
    std::uint64_t seed = 1;
};

// margin: positive means certified infeasible. guide: a linear functional steering the
// seesaw; without one the search does plain coordinate ascent on margin.
struct SearchOracle {
    std::function<double(const BehaviorTable&)> margin;
    std::optional<BellExpression> guide;
};

// decompose_locally on the ABD/ACD marginals
SearchOracle lp_search_oracle(std::optional<BellExpression> guide = std::nullopt);

struct SearchResult {
    QuantumSetup setup;
    double margin = 0;
    double guide_value = 0;
    int best_restart = -1;
    int restarts_run = 0;
};

SearchResult violation_search(const SearchOracle& oracle, const SearchOptions& opt);

// guide expression spread over a full n-party table (missing parties summed out,
// their settings averaged)
std::vector<double> full_functional(const BellExpression& e, const std::vector<int>& settings,
                                    const std::vector<int>& outcomes);

// one seesaw pass from a given start; exposed for tests
QuantumSetup seesaw(const std::vector<double>& F, QuantumSetup start, StateFamily family, int sweeps);

} // namespace hinf
