#include "hinf/locality_lp.hpp"
#include "hinf/exact_lp.hpp"
#include "hinf/rational.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace hinf {

namespace {

int ipow(int b, int e) {
    int r = 1;
    while (e-- > 0) r *= b;
    return r;
}

} // namespace

int LpShape::b_strategies() const { return ipow(oB, sB); }
int LpShape::c_strategies() const { return ipow(oC, sC); }

int LpShape::b_of(int lambda, int y) const {
    int beta = lambda / c_strategies();
    return (beta / ipow(oB, sB - 1 - y)) % oB;
}

int LpShape::c_of(int lambda, int z) const {
    int gamma = lambda % c_strategies();
    return (gamma / ipow(oC, sC - 1 - z)) % oC;
}

bool LpShape::operator==(const LpShape& o) const {
    return sA == o.sA && sB == o.sB && sC == o.sC && sD == o.sD && oA == o.oA && oB == o.oB && oC == o.oC &&
           oD == o.oD;
}

StrategyPair strategy_pair(const LpShape& s, int lambda) {
    StrategyPair p;
    for (int y = 0; y < s.sB; ++y) p.b_strategy.push_back(s.b_of(lambda, y));
    for (int z = 0; z < s.sC; ++z) p.c_strategy.push_back(s.c_of(lambda, z));
    return p;
}

namespace {

using Key = std::array<int, 8>;

Key key_of(const LpShape& s) { return {s.sA, s.sB, s.sC, s.sD, s.oA, s.oB, s.oC, s.oD}; }

// Integer constraint rows shared by every instance of one shape.
struct System {
    LpShape shape;
    int n_abd = 0, n_acd = 0;
    lp::Problem marg_ns;            // ABD rows, ACD rows, no-signalling rows (b left empty)
    std::vector<int> marg_ns_rows;  // independent subset
    lp::Problem bound_sys;          // no-signalling rows + one normalization row per (x,w)
    std::vector<int> bound_rows;
    lp::Problem bound_reduced;
    lp::Problem gauge_sys;          // marginal rows, no-signalling rows, normalization rows; last column t
    std::vector<int> gauge_rows;
    std::vector<mpq_class> uniform; // uniform marginal pair
};

BehaviorTable abd_template(const LpShape& s) { return BehaviorTable({s.sA, s.sB, s.sD}, {s.oA, s.oB, s.oD}, true); }
BehaviorTable acd_template(const LpShape& s) { return BehaviorTable({s.sA, s.sC, s.sD}, {s.oA, s.oC, s.oD}, true); }

std::vector<std::vector<mpq_class>> ns_rows(const LpShape& s) {
    std::vector<std::vector<mpq_class>> rows;
    int n = s.variables(), L = s.strategies();
    auto add_q = [&](std::vector<mpq_class>& r, int a, int b, int c, int d, int x, int y, int z, int w, int sign) {
        for (int l = 0; l < L; ++l)
            if (s.b_of(l, y) == b && s.c_of(l, z) == c) r[s.var(a, d, x, w, l)] += sign;
    };
    for (int b = 0; b < s.oB; ++b)
        for (int c = 0; c < s.oC; ++c)
            for (int d = 0; d < s.oD; ++d)
                for (int y = 0; y < s.sB; ++y)
                    for (int z = 0; z < s.sC; ++z)
                        for (int w = 0; w < s.sD; ++w)
                            for (int x1 = 1; x1 < s.sA; ++x1) {
                                std::vector<mpq_class> r(n, mpq_class(0));
                                for (int a = 0; a < s.oA; ++a) {
                                    add_q(r, a, b, c, d, 0, y, z, w, 1);
                                    add_q(r, a, b, c, d, x1, y, z, w, -1);
                                }
                                rows.push_back(std::move(r));
                            }
    for (int a = 0; a < s.oA; ++a)
        for (int b = 0; b < s.oB; ++b)
            for (int c = 0; c < s.oC; ++c)
                for (int x = 0; x < s.sA; ++x)
                    for (int y = 0; y < s.sB; ++y)
                        for (int z = 0; z < s.sC; ++z)
                            for (int w1 = 1; w1 < s.sD; ++w1) {
                                std::vector<mpq_class> r(n, mpq_class(0));
                                for (int d = 0; d < s.oD; ++d) {
                                    add_q(r, a, b, c, d, x, y, z, 0, 1);
                                    add_q(r, a, b, c, d, x, y, z, w1, -1);
                                }
                                rows.push_back(std::move(r));
                            }
    return rows;
}

std::shared_ptr<const System> build_system(const LpShape& s) {
    auto sys = std::make_shared<System>();
    sys->shape = s;
    int n = s.variables(), L = s.strategies();
    auto abd = abd_template(s), acd = acd_template(s);
    sys->n_abd = static_cast<int>(abd.size());
    sys->n_acd = static_cast<int>(acd.size());
    std::vector<std::vector<mpq_class>> rows;
    for (size_t i = 0; i < abd.size(); ++i) {
        auto st = abd.setting_tuple(i / abd.outcome_tuples());
        auto ot = abd.outcome_tuple(i % abd.outcome_tuples());
        std::vector<mpq_class> r(n, mpq_class(0));
        for (int l = 0; l < L; ++l)
            if (s.b_of(l, st[1]) == ot[1]) r[s.var(ot[0], ot[2], st[0], st[2], l)] = 1;
        rows.push_back(std::move(r));
    }
    for (size_t i = 0; i < acd.size(); ++i) {
        auto st = acd.setting_tuple(i / acd.outcome_tuples());
        auto ot = acd.outcome_tuple(i % acd.outcome_tuples());
        std::vector<mpq_class> r(n, mpq_class(0));
        for (int l = 0; l < L; ++l)
            if (s.c_of(l, st[1]) == ot[1]) r[s.var(ot[0], ot[2], st[0], st[2], l)] = 1;
        rows.push_back(std::move(r));
    }
    auto ns = ns_rows(s);
    auto pack = [n](const std::vector<std::vector<mpq_class>>& rs) {
        lp::Problem p;
        p.m = static_cast<int>(rs.size());
        p.n = n;
        for (const auto& r : rs) p.A.insert(p.A.end(), r.begin(), r.end());
        p.b.assign(p.m, mpq_class(0));
        return p;
    };
    auto all = rows;
    all.insert(all.end(), ns.begin(), ns.end());
    sys->marg_ns = pack(all);
    sys->marg_ns_rows = lp::independent_rows(sys->marg_ns);

    auto brows = ns;
    for (int x = 0; x < s.sA; ++x)
        for (int w = 0; w < s.sD; ++w) {
            std::vector<mpq_class> r(n, mpq_class(0));
            for (int a = 0; a < s.oA; ++a)
                for (int d = 0; d < s.oD; ++d)
                    for (int l = 0; l < L; ++l) r[s.var(a, d, x, w, l)] = 1;
            brows.push_back(std::move(r));
        }
    sys->bound_sys = pack(brows);
    for (size_t i = ns.size(); i < brows.size(); ++i) sys->bound_sys.b[i] = 1;
    sys->bound_rows = lp::independent_rows(sys->bound_sys);
    sys->bound_reduced = lp::select_rows(sys->bound_sys, sys->bound_rows);

    int n_marg = sys->n_abd + sys->n_acd;
    for (int r = 0; r < n_marg; ++r)
        sys->uniform.push_back(mpq_class(1, r < sys->n_abd ? s.oA * s.oB * s.oD : s.oA * s.oC * s.oD));
    lp::Problem& g = sys->gauge_sys;
    int m_ns = static_cast<int>(ns.size()), m_norm = s.sA * s.sD;
    g.m = n_marg + m_ns + m_norm;
    g.n = n + 1;
    g.A.assign(static_cast<size_t>(g.m) * g.n, mpq_class(0));
    for (int r = 0; r < n_marg + m_ns; ++r) {
        const auto& src = r < n_marg ? rows[r] : ns[r - n_marg];
        for (int j = 0; j < n; ++j) g.A[static_cast<size_t>(r) * g.n + j] = src[j];
        if (r < n_marg) g.A[static_cast<size_t>(r) * g.n + n] = -sys->uniform[r];
    }
    for (int k = 0; k < m_norm; ++k) {
        int r = n_marg + m_ns + k;
        for (int j = 0; j < n; ++j) g.A[static_cast<size_t>(r) * g.n + j] = brows[m_ns + k][j];
        g.A[static_cast<size_t>(r) * g.n + n] = -1;
    }
    g.b.assign(g.m, mpq_class(0));
    sys->gauge_rows = lp::independent_rows(g);
    return sys;
}

std::shared_ptr<const System> system_for(const LpShape& s) {
    static std::mutex mu;
    static std::map<Key, std::shared_ptr<const System>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto k = key_of(s);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    auto sys = build_system(s);
    cache[k] = sys;
    return sys;
}

LpShape shape_of(const BehaviorTable& abd, const BehaviorTable& acd) {
    if (abd.n_parties() != 3 || acd.n_parties() != 3) throw std::invalid_argument("marginals must be tripartite");
    if (abd.settings()[0] != acd.settings()[0] || abd.settings()[2] != acd.settings()[2] ||
        abd.outcomes()[0] != acd.outcomes()[0] || abd.outcomes()[2] != acd.outcomes()[2])
        throw InconsistentMarginals("A/D settings or outcomes differ between the marginals");
    LpShape s;
    s.sA = abd.settings()[0];
    s.sB = abd.settings()[1];
    s.sC = acd.settings()[1];
    s.sD = abd.settings()[2];
    s.oA = abd.outcomes()[0];
    s.oB = abd.outcomes()[1];
    s.oC = acd.outcomes()[1];
    s.oD = abd.outcomes()[2];
    return s;
}

bool binary(const BehaviorTable& P) {
    for (int o : P.outcomes())
        if (o != 2) return false;
    return true;
}

// E_mask(settings of mask parties) for a 3-party binary table
struct Corr {
    std::array<std::vector<double>, 8> E;
};

Corr corr_of(const BehaviorTable& P) {
    Corr c;
    c.E[0] = {1.0};
    for (unsigned m = 1; m < 8; ++m) c.E[m] = correlators(P, m, true);
    return c;
}

size_t sub_index(const BehaviorTable& P, unsigned mask, const std::vector<int>& s) {
    size_t i = 0;
    for (int k = 0; k < 3; ++k)
        if (mask & (1u << (2 - k))) i = i * P.settings()[k] + s[k];
    return i;
}

bool from_correlators(const BehaviorTable& shape, const Corr& c, double shrink, long grid, BehaviorTable& out) {
    std::array<std::vector<mpq_class>, 8> Q;
    Q[0] = {mpq_class(1)};
    for (unsigned m = 1; m < 8; ++m)
        for (double e : c.E[m]) Q[m].push_back(round_to_grid(e * shrink, grid));
    out = BehaviorTable(shape.settings(), shape.outcomes(), true);
    for (size_t si = 0; si < out.setting_tuples(); ++si) {
        auto s = out.setting_tuple(si);
        for (size_t oi = 0; oi < 8; ++oi) {
            mpq_class p = 0;
            for (unsigned m = 0; m < 8; ++m) {
                const mpq_class& e = Q[m][m == 0 ? 0 : sub_index(out, m, s)];
                if (__builtin_popcount(static_cast<unsigned>(oi) & m) & 1) p -= e;
                else p += e;
            }
            p /= 8;
            if (sgn(p) < 0) return false;
            out.set(si * 8 + oi, p);
        }
    }
    return true;
}

void require_ns(const BehaviorTable& P, double tol, const char* name) {
    auto r = check_no_signalling(P, P.exact() ? 0.0 : tol, 1);
    if (!r.pass)
        throw SignallingError(std::string(name) + " marginal signals: " + r.violations.front().context);
}

} // namespace

RationalizedPair rationalize_pair(const BehaviorTable& P_abd, const BehaviorTable& P_acd, const LpOptions& opt) {
    shape_of(P_abd, P_acd);
    require_ns(P_abd, opt.ns_tol, "ABD");
    require_ns(P_acd, opt.ns_tol, "ACD");
    if (P_abd.exact() && P_acd.exact()) {
        if (marginalize(P_abd, {0, 2}) != marginalize(P_acd, {0, 2}))
            throw InconsistentMarginals("Alice-Dave marginals of the two tables differ");
        return {P_abd, P_acd, 0.0};
    }
    auto ad1 = marginalize(P_abd, {0, 2}, opt.ns_tol), ad2 = marginalize(P_acd, {0, 2}, opt.ns_tol);
    double gap = 0;
    for (size_t i = 0; i < ad1.size(); ++i) gap = std::max(gap, std::abs(ad1.p(i) - ad2.p(i)));
    if (gap > opt.reconcile_tol) throw InconsistentMarginals("Alice-Dave marginals differ by more than the reconcile tolerance");
    RationalizedPair out;
    if (binary(P_abd) && binary(P_acd) && opt.denominator % 8 == 0) {
        Corr c1 = corr_of(P_abd), c2 = corr_of(P_acd);
        for (unsigned m : {1u, 4u, 5u})
            for (size_t i = 0; i < c1.E[m].size(); ++i) c1.E[m][i] = c2.E[m][i] = 0.5 * (c1.E[m][i] + c2.E[m][i]);
        long grid = opt.denominator / 8;
        double eta = 0;
        while (true) {
            if (from_correlators(P_abd, c1, 1 - eta, grid, out.abd) && from_correlators(P_acd, c2, 1 - eta, grid, out.acd))
                break;
            eta = eta == 0 ? 1.0 / opt.denominator : eta * 2;
            if (eta >= 1) eta = 1;
        }
    } else {
        out.abd = rationalize_entrywise(P_abd, opt.denominator).table;
        out.acd = rationalize_entrywise(P_acd, opt.denominator).table;
        if (marginalize(out.abd, {0, 2}) != marginalize(out.acd, {0, 2}))
            throw InconsistentMarginals("entrywise rounding broke Alice-Dave consistency");
    }
    for (size_t i = 0; i < P_abd.size(); ++i) out.l1_error += std::abs(out.abd.p(i) - P_abd.p(i));
    for (size_t i = 0; i < P_acd.size(); ++i) out.l1_error += std::abs(out.acd.p(i) - P_acd.p(i));
    // exact reference values make the error exact zero for exactly representable input
    if (P_abd.exact() && P_acd.exact()) out.l1_error = 0;
    return out;
}

std::vector<BehaviorTable> deterministic_marginal_pair(const LpShape& s, const std::vector<int>& fa,
                                                       const std::vector<int>& fb, const std::vector<int>& fc,
                                                       const std::vector<int>& fd) {
    auto abd = abd_template(s), acd = acd_template(s);
    for (int x = 0; x < s.sA; ++x)
        for (int w = 0; w < s.sD; ++w) {
            for (int y = 0; y < s.sB; ++y) abd.set(abd.index({fa[x], fb[y], fd[w]}, {x, y, w}), mpq_class(1));
            for (int z = 0; z < s.sC; ++z) acd.set(acd.index({fa[x], fc[z], fd[w]}, {x, z, w}), mpq_class(1));
        }
    return {abd, acd};
}

mpq_class local_deterministic_max(const BellExpression& e, const LpShape& s) {
    auto all = [](int out, int set) {
        std::vector<std::vector<int>> fs;
        std::vector<int> f(set, 0);
        while (true) {
            fs.push_back(f);
            int k = set - 1;
            while (k >= 0 && ++f[k] == out) f[k--] = 0;
            if (k < 0) break;
        }
        return fs;
    };
    auto FA = all(s.oA, s.sA), FB = all(s.oB, s.sB), FC = all(s.oC, s.sC), FD = all(s.oD, s.sD);
    std::optional<mpq_class> best;
    for (const auto& fa : FA)
        for (const auto& fb : FB)
            for (const auto& fc : FC)
                for (const auto& fd : FD) {
                    mpq_class v = 0;
                    for (const auto& t : e.terms) {
                        const auto& o = t.outcomes;
                        const auto& st = t.settings;
                        bool mid = t.scope == 0 ? fb[st[1]] == o[1] : fc[st[1]] == o[1];
                        if (fa[st[0]] == o[0] && mid && fd[st[2]] == o[2]) v += t.coef;
                    }
                    if (!best || v > *best) best = v;
                }
    return *best;
}

mpq_class hidden_influence_max(const BellExpression& e, const LpShape& shape) {
    if (e.scope != std::vector<std::vector<int>>{{0, 1, 3}, {0, 2, 3}})
        throw ScopeError("expression must be scoped on (A,B,D) and (A,C,D)");
    auto sys = system_for(shape);
    auto abd = abd_template(shape), acd = acd_template(shape);
    lp::Problem bp = sys->bound_reduced;
    bp.c.assign(bp.n, mpq_class(0));
    for (const auto& t : e.terms) {
        int r = t.scope == 0 ? static_cast<int>(abd.index(t.outcomes, t.settings))
                             : sys->n_abd + static_cast<int>(acd.index(t.outcomes, t.settings));
        for (int j = 0; j < bp.n; ++j)
            if (sgn(sys->marg_ns.a(r, j)) != 0) bp.c[j] += t.coef * sys->marg_ns.a(r, j);
    }
    auto bs = lp::maximize(bp);
    if (bs.status != lp::Status::Optimal) throw std::logic_error("bound LP did not solve");
    return bs.value;
}

FeasibilityResult decompose_locally(const BehaviorTable& P_abd, const BehaviorTable& P_acd, const LpOptions& opt) {
    LpShape shape = shape_of(P_abd, P_acd);
    auto rp = rationalize_pair(P_abd, P_acd, opt);
    auto sys = system_for(shape);

    FeasibilityResult res;
    res.shape = shape;
    res.abd = rp.abd;
    res.acd = rp.acd;
    res.rounding_error = rp.l1_error;

    std::vector<mpq_class> b_full(sys->marg_ns.m, mpq_class(0));
    for (int i = 0; i < sys->n_abd; ++i) b_full[i] = rp.abd.q(i);
    for (int i = 0; i < sys->n_acd; ++i) b_full[sys->n_abd + i] = rp.acd.q(i);
    lp::Problem p = lp::select_rows(sys->marg_ns, sys->marg_ns_rows);
    for (size_t k = 0; k < sys->marg_ns_rows.size(); ++k) p.b[k] = b_full[sys->marg_ns_rows[k]];

    auto sol = lp::feasibility(p);
    res.float_basis_verified = sol.float_basis_verified;
    if (sol.status != lp::Status::Infeasible) {
        res.status = LpStatus::Feasible;
        res.weights = sol.x;
        return res;
    }
    res.status = LpStatus::Infeasible;
    int n_marg = sys->n_abd + sys->n_acd;
    std::vector<mpq_class> u(n_marg, mpq_class(0));
    for (size_t k = 0; k < sys->marg_ns_rows.size(); ++k)
        if (sys->marg_ns_rows[k] < n_marg) u[sys->marg_ns_rows[k]] = sol.y[k];
    mpq_class scale = 0;
    for (const auto& v : u) scale = std::max(scale, mpq_class(abs(v)));
    for (auto& v : u) v /= scale;

    BellExpression cert;
    cert.scope = {{0, 1, 3}, {0, 2, 3}};
    cert.normalization = "hidden-influence-max";
    for (int r = 0; r < n_marg; ++r) {
        if (sgn(u[r]) == 0) continue;
        const BehaviorTable& t = r < sys->n_abd ? rp.abd : rp.acd;
        size_t i = r < sys->n_abd ? r : r - sys->n_abd;
        cert.terms.push_back({r < sys->n_abd ? 0 : 1, t.outcome_tuple(i % t.outcome_tuples()),
                              t.setting_tuple(i / t.outcome_tuples()), u[r]});
    }
    res.certificate_value = 0;
    for (int r = 0; r < n_marg; ++r) res.certificate_value += u[r] * b_full[r];

    if (opt.need_bound) {
        res.bound = hidden_influence_max(cert, shape);
    } else {
        res.bound = 0; // the Farkas functional is non-positive on the whole cone
        cert.normalization = "farkas-cone";
    }
    cert.bound = res.bound;
    res.margin = res.certificate_value - res.bound;
    res.local_max = local_deterministic_max(cert, shape);
    res.coef_max = 1.0;
    res.certified = sgn(res.margin) > 0 && res.margin.get_d() > res.rounding_error * res.coef_max;
    res.certificate = std::move(cert);
    return res;
}

FeasibilityResult decompose_locally(const BehaviorTable& P, const LpOptions& opt) {
    if (P.n_parties() != 4) throw std::invalid_argument("four-party table expected");
    return decompose_locally(marginalize(P, {0, 1, 3}, opt.ns_tol), marginalize(P, {0, 2, 3}, opt.ns_tol), opt);
}

BellExpression extract_certificate(const FeasibilityResult& r) {
    if (r.status != LpStatus::Infeasible || !r.certificate)
        throw std::logic_error("no certificate: the instance is feasible");
    return *r.certificate;
}

BehaviorTable reconstruct_full_distribution(const FeasibilityResult& r) {
    if (r.status != LpStatus::Feasible) throw std::logic_error("no decomposition: the instance is infeasible");
    const LpShape& s = r.shape;
    BehaviorTable Q({s.sA, s.sB, s.sC, s.sD}, {s.oA, s.oB, s.oC, s.oD}, true);
    std::vector<mpq_class> acc(Q.size(), mpq_class(0));
    int L = s.strategies();
    for (int a = 0; a < s.oA; ++a)
        for (int d = 0; d < s.oD; ++d)
            for (int x = 0; x < s.sA; ++x)
                for (int w = 0; w < s.sD; ++w)
                    for (int l = 0; l < L; ++l) {
                        const mpq_class& wt = r.weights[s.var(a, d, x, w, l)];
                        if (sgn(wt) == 0) continue;
                        for (int y = 0; y < s.sB; ++y)
                            for (int z = 0; z < s.sC; ++z)
                                acc[Q.index({a, s.b_of(l, y), s.c_of(l, z), d}, {x, y, z, w})] += wt;
                    }
    for (size_t i = 0; i < Q.size(); ++i) Q.set(i, acc[i]);
    return Q;
}

bool brute_force_local_check(const BehaviorTable& P) {
    if (P.n_parties() != 2 || P.settings() != std::vector<int>{2, 2} || P.outcomes() != std::vector<int>{2, 2})
        throw std::invalid_argument("brute-force check needs a 2x2x2x2 table");
    BehaviorTable E = to_exact(P);
    double tol = P.exact() ? 0.0 : 1e-12;
    if (!check_no_signalling(E, 0.0, 1).pass) {
        if (tol == 0 || check_no_signalling(P, tol, 1).max_discrepancy > tol) return false;
    }
    mpq_class corr[2][2];
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            corr[x][y] = 0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const mpq_class& p = E.q(E.index({a, b}, {x, y}));
                    if (a ^ b) corr[x][y] -= p;
                    else corr[x][y] += p;
                }
        }
    mpq_class slack = tol == 0 ? mpq_class(0) : mpq_class(1, 1000000000000L);
    for (int al = 0; al < 2; ++al)
        for (int be = 0; be < 2; ++be)
            for (int ga = 0; ga < 2; ++ga) {
                mpq_class s = 0;
                for (int x = 0; x < 2; ++x)
                    for (int y = 0; y < 2; ++y) {
                        int sign = ((x & y) ^ (al & x) ^ (be & y) ^ ga) ? -1 : 1;
                        s += sign * corr[x][y];
                    }
                if (s > 2 + slack) return false;
            }
    return true;
}

GaugeResult gauge_certificate(const BehaviorTable& P_abd, const BehaviorTable& P_acd, const LpOptions& opt) {
    LpShape shape = shape_of(P_abd, P_acd);
    auto rp = rationalize_pair(P_abd, P_acd, opt);
    auto sys = system_for(shape);
    int n_marg = sys->n_abd + sys->n_acd;
    std::vector<mpq_class> m(n_marg);
    for (int i = 0; i < sys->n_abd; ++i) m[i] = rp.abd.q(i);
    for (int i = 0; i < sys->n_acd; ++i) m[sys->n_abd + i] = rp.acd.q(i);

    lp::Problem p = lp::select_rows(sys->gauge_sys, sys->gauge_rows);
    for (size_t k = 0; k < sys->gauge_rows.size(); ++k) {
        int r = sys->gauge_rows[k];
        p.b[k] = r < n_marg ? mpq_class(m[r] - sys->uniform[r]) : mpq_class(0);
    }
    p.c.assign(p.n, mpq_class(0));
    p.c[p.n - 1] = -1;
    auto sol = lp::maximize(p);
    if (sol.status != lp::Status::Optimal) throw std::logic_error("gauge LP did not solve");

    GaugeResult g;
    g.gauge = -sol.value;
    std::vector<mpq_class> f(n_marg, mpq_class(0));
    for (size_t k = 0; k < sys->gauge_rows.size(); ++k)
        if (sys->gauge_rows[k] < n_marg) f[sys->gauge_rows[k]] = -sol.y[k];
    g.facet.scope = {{0, 1, 3}, {0, 2, 3}};
    g.facet.normalization = "gauge-uniform";
    g.facet.bound = 1;
    g.value = 0;
    for (int r = 0; r < n_marg; ++r) {
        g.facet.bound += f[r] * sys->uniform[r];
        g.value += f[r] * m[r];
        if (sgn(f[r]) == 0) continue;
        const BehaviorTable& t = r < sys->n_abd ? rp.abd : rp.acd;
        size_t i = r < sys->n_abd ? r : r - sys->n_abd;
        g.facet.terms.push_back({r < sys->n_abd ? 0 : 1, t.outcome_tuple(i % t.outcome_tuples()),
                                 t.setting_tuple(i / t.outcome_tuples()), f[r]});
    }
    return g;
}

double lp_oracle_margin(const BehaviorTable& P) {
    auto r = decompose_locally(P);
    if (r.status == LpStatus::Feasible) return 0.0;
    return r.margin.get_d() - r.rounding_error * r.coef_max;
}

} // namespace hinf
