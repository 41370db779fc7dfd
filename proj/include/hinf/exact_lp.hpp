#pragma once

#include <gmpxx.h>

#include <vector>

namespace hinf::lp {

// Ax = b, x >= 0, dense row-major A.
struct Problem {
    int m = 0, n = 0;
    std::vector<mpq_class> A, b, c;
    const mpq_class& a(int i, int j) const { return A[static_cast<size_t>(i) * n + j]; }
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
    Status status = Status::Infeasible;
    std::vector<mpq_class> x;   // primal point when feasible
    mpq_class value;            // c.x at optimum
    std::vector<mpq_class> y;   // optimal duals, or a Farkas ray (y.A <= 0, y.b > 0) when infeasible
    std::vector<int> basis;
    bool float_basis_verified = false; // false means the exact simplex had to take over
    int exact_pivots = 0;
};

// Feasibility only; c is ignored.
Solution feasibility(const Problem& p);
// max c.x
Solution maximize(const Problem& p);

// Indices of a maximal independent subset of rows (exact elimination).
std::vector<int> independent_rows(const Problem& p);
Problem select_rows(const Problem& p, const std::vector<int>& rows);

} // namespace hinf::lp
