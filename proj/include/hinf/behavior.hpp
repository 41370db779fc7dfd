#pragma once

#include "hinf/spacetime.hpp"

#include <gmpxx.h>

#include <complex>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hinf {

// P(outcomes | settings) for n parties. Tuples are mixed-radix with party 0 most significant;
// flat index = setting_index * outcome_tuples + outcome_index.
class BehaviorTable {
public:
    BehaviorTable() = default;
    BehaviorTable(std::vector<int> settings, std::vector<int> outcomes, bool exact);

    int n_parties() const { return static_cast<int>(settings_.size()); }
    const std::vector<int>& settings() const { return settings_; }
    const std::vector<int>& outcomes() const { return outcomes_; }
    size_t setting_tuples() const { return n_set_; }
    size_t outcome_tuples() const { return n_out_; }
    size_t size() const { return n_set_ * n_out_; }
    bool exact() const { return exact_; }

    size_t setting_index(const std::vector<int>& s) const;
    size_t outcome_index(const std::vector<int>& o) const;
    std::vector<int> setting_tuple(size_t si) const;
    std::vector<int> outcome_tuple(size_t oi) const;
    size_t index(const std::vector<int>& o, const std::vector<int>& s) const {
        return setting_index(s) * n_out_ + outcome_index(o);
    }

    double p(size_t i) const { return p_[i]; }
    const mpq_class& q(size_t i) const;
    double at(const std::vector<int>& o, const std::vector<int>& s) const { return p_[index(o, s)]; }

    void set(size_t i, double v);
    void set(size_t i, const mpq_class& v);

    const std::vector<double>& values() const { return p_; }
    const std::vector<mpq_class>& exact_values() const;

    bool same_shape(const BehaviorTable& o) const {
        return settings_ == o.settings_ && outcomes_ == o.outcomes_;
    }

private:
    std::vector<int> settings_, outcomes_;
    size_t n_set_ = 0, n_out_ = 0;
    bool exact_ = false;
    std::vector<double> p_;
    std::vector<mpq_class> q_;
};

bool operator==(const BehaviorTable& a, const BehaviorTable& b);

struct SignallingViolation {
    int party = 0;
    int setting_a = 0, setting_b = 0;       // the party's two settings compared
    std::vector<int> other_settings;         // settings of the remaining parties, in party order
    std::vector<int> other_outcomes;
    double magnitude = 0;
    std::string context;
};

struct NoSignallingReport {
    bool pass = true;
    double max_discrepancy = 0;
    std::vector<SignallingViolation> violations; // worst first
};

// tol = 0 on an exact table means exact equality
NoSignallingReport check_no_signalling(const BehaviorTable& P, double tol, size_t keep_worst = 16);

double normalization_error(const BehaviorTable& P);
double min_probability(const BehaviorTable& P);

class SignallingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// keep lists party indices in the order wanted for the output table
BehaviorTable marginalize(const BehaviorTable& P, const std::vector<int>& keep, double tol = 1e-9);

struct QuantumSetup {
    int n_qubits = 0;
    std::vector<std::complex<double>> state;
    std::vector<std::vector<Vec3>> axes; // [party][setting] Bloch axis; outcome 0 is the +1 eigenvector
};

void validate(const QuantumSetup& s);
BehaviorTable born_rule(const QuantumSetup& s);

// single-qubit basis change whose rows are <+n| and <-n|
std::array<std::complex<double>, 4> measurement_basis(const Vec3& axis);

struct BellTerm {
    int scope = 0;
    std::vector<int> outcomes;
    std::vector<int> settings;
    mpq_class coef;
};

struct BellExpression {
    std::vector<std::vector<int>> scope;
    std::vector<BellTerm> terms;
    mpq_class bound;
    std::string normalization = "none";
};

class ScopeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

double evaluate_bell_expression(const BellExpression& e, const BehaviorTable& P);
mpq_class evaluate_bell_expression_exact(const BellExpression& e, const BehaviorTable& P);
// tables[i] is the behavior of scope[i], already marginalized
double evaluate_on_marginals(const BellExpression& e, const std::vector<BehaviorTable>& tables);
mpq_class evaluate_on_marginals_exact(const BellExpression& e, const std::vector<BehaviorTable>& tables);

BellExpression chsh_expression(int party_a, int party_b);

// Rounds to the grid 1/den entrywise and repairs normalization on the largest entry.
struct Rationalized {
    BehaviorTable table;
    double l1_error = 0;
};
Rationalized rationalize_entrywise(const BehaviorTable& P, long den);
BehaviorTable to_exact(const BehaviorTable& P); // exact copy of the doubles (binary expansion)

// Full correlator expansion of a binary table; index by subset mask then settings of the subset.
std::vector<double> correlators(const BehaviorTable& P, unsigned mask, bool average_others = true);

// text formats; exact tables round-trip losslessly
void write_table(std::ostream& os, const BehaviorTable& P);
BehaviorTable read_table(std::istream& is);
BehaviorTable load_table(const std::string& path);
void save_table(const std::string& path, const BehaviorTable& P);

void write_setup(std::ostream& os, const QuantumSetup& s);
QuantumSetup read_setup(std::istream& is);
QuantumSetup load_setup(const std::string& path);

void write_expression(std::ostream& os, const BellExpression& e);
BellExpression read_expression(std::istream& is);
BellExpression load_expression(const std::string& path);

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace hinf
