#pragma once

#include "hinf/behavior.hpp"

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <vector>

namespace hinf {

// Sizes of the four-party scenario seen through the ABD / ACD marginals.
struct LpShape {
    int sA = 2, sB = 2, sC = 2, sD = 2;
    int oA = 2, oB = 2, oC = 2, oD = 2;
    int b_strategies() const;
    int c_strategies() const;
    int strategies() const { return b_strategies() * c_strategies(); }
    int variables() const { return oA * oD * sA * sD * strategies(); }
    int var(int a, int d, int x, int w, int lambda) const {
        return (((a * oD + d) * sA + x) * sD + w) * strategies() + lambda;
    }
    int b_of(int lambda, int y) const; // B's outcome for setting y under pair lambda
    int c_of(int lambda, int z) const;
    bool operator==(const LpShape& o) const;
};

// lambda = (B strategy, C strategy); strategy maps each setting to an outcome
struct StrategyPair {
    std::vector<int> b_strategy;
    std::vector<int> c_strategy;
};
StrategyPair strategy_pair(const LpShape& s, int lambda);

enum class LpStatus { Feasible, Infeasible };

struct FeasibilityResult {
    LpStatus status = LpStatus::Feasible;
    LpShape shape;
    BehaviorTable abd, acd;          // exact marginals the LP actually saw
    std::vector<mpq_class> weights;  // indexed by LpShape::var, when feasible
    std::optional<BellExpression> certificate;
    mpq_class certificate_value;     // on the input pair
    mpq_class bound;                 // max over all hidden-influence-compatible pairs
    mpq_class local_max;             // max over deterministic four-party strategies
    mpq_class margin;                // certificate_value - bound
    double rounding_error = 0;       // L1 distance between given and rationalized marginals
    double coef_max = 1;
    bool certified = false;          // infeasible and margin > rounding_error * coef_max
    bool float_basis_verified = true;
};

struct LpOptions {
    long denominator = 1000000;
    double ns_tol = 1e-9;
    double reconcile_tol = 1e-9;
    bool need_bound = true; // solve the bound LP for certificates
};

class InconsistentMarginals : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// P_abd over parties (A,B,D), P_acd over (A,C,D)
FeasibilityResult decompose_locally(const BehaviorTable& P_abd, const BehaviorTable& P_acd, const LpOptions& opt = {});
// convenience: marginals of a four-party (A,B,C,D) table
FeasibilityResult decompose_locally(const BehaviorTable& P_abcd, const LpOptions& opt = {});

BellExpression extract_certificate(const FeasibilityResult& r);
BehaviorTable reconstruct_full_distribution(const FeasibilityResult& r);

// Two parties, binary settings and outcomes: exact no-signalling plus the eight CHSH facets.
bool brute_force_local_check(const BehaviorTable& P_bc);

struct RationalizedPair {
    BehaviorTable abd, acd;
    double l1_error = 0;
};
RationalizedPair rationalize_pair(const BehaviorTable& P_abd, const BehaviorTable& P_acd, const LpOptions& opt = {});

// exact max of an ABD/ACD expression over all hidden-influence-compatible marginal pairs
mpq_class hidden_influence_max(const BellExpression& e, const LpShape& s);

// maximum of the certificate over the 2^... deterministic four-party strategies
mpq_class local_deterministic_max(const BellExpression& e, const LpShape& s);
std::vector<BehaviorTable> deterministic_marginal_pair(const LpShape& s, const std::vector<int>& fa,
                                                       const std::vector<int>& fb, const std::vector<int>& fc,
                                                       const std::vector<int>& fd);

// Smallest t with m - u in t (HI - u), u the uniform pair, HI the hidden-influence-compatible
// pairs; t > 1 iff infeasible. The dual is a facet-like functional f with f.(h - u) <= 1 on HI,
// returned as an expression whose bound is 1 + f.u.
struct GaugeResult {
    mpq_class gauge;
    BellExpression facet;
    mpq_class value; // facet on the input pair
};
GaugeResult gauge_certificate(const BehaviorTable& P_abd, const BehaviorTable& P_acd, const LpOptions& opt = {});

// signed score for searches: certified margin minus rounding bound, 0 when feasible
double lp_oracle_margin(const BehaviorTable& P_abcd);

} // namespace hinf
