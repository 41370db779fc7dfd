#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hinf/locality_lp.hpp"
#include "hinf/scenario.hpp"

#include <random>

using namespace hinf;

namespace {

const std::vector<int> two4{2, 2, 2, 2}, two3{2, 2, 2};

// deterministic 4-party table from response functions f[party][setting]
BehaviorTable det4(const int f[4][2]) {
    BehaviorTable P(two4, two4, true);
    for (size_t si = 0; si < P.setting_tuples(); ++si) {
        auto s = P.setting_tuple(si);
        P.set(P.index({f[0][s[0]], f[1][s[1]], f[2][s[2]], f[3][s[3]]}, s), mpq_class(1));
    }
    return P;
}

BehaviorTable random_local(std::mt19937& rng, int k) {
    std::uniform_int_distribution<int> bit(0, 1), wt(1, 9);
    std::vector<mpq_class> acc(16 * 16, 0);
    std::vector<int> w(k);
    int total = 0;
    for (auto& x : w) total += (x = wt(rng));
    BehaviorTable P(two4, two4, true);
    for (int j = 0; j < k; ++j) {
        int f[4][2];
        for (auto& p : f)
            for (auto& o : p) o = bit(rng);
        auto D = det4(f);
        mpq_class c(w[j], total);
        c.canonicalize();
        for (size_t i = 0; i < D.size(); ++i) acc[i] += c * D.q(i);
    }
    for (size_t i = 0; i < P.size(); ++i) P.set(i, acc[i]);
    return P;
}

// P(ad|xw) times a PR box between B and C in every block. A block-dependent orientation
// would let A's setting steer the B-C box, so one orientation per table.
BehaviorTable pr_blocks(std::mt19937& rng) {
    auto AD = random_local(rng, 3);
    auto ad = marginalize(AD, {0, 3});
    int f = std::uniform_int_distribution<int>(0, 1)(rng);
    BehaviorTable P(two4, two4, true);
    for (size_t si = 0; si < P.setting_tuples(); ++si) {
        auto s = P.setting_tuple(si);
        for (size_t oi = 0; oi < P.outcome_tuples(); ++oi) {
            auto o = P.outcome_tuple(oi);
            bool pr = ((o[1] ^ o[2]) ^ f) == (s[1] & s[2]);
            P.set(P.index(o, s), pr ? ad.q(ad.index({o[0], o[3]}, {s[0], s[3]})) / 2 : mpq_class(0));
        }
    }
    return P;
}

// ABD = PR(A,B) with D = 0, ACD = PR(A,C) with D = 0
std::pair<BehaviorTable, BehaviorTable> monogamy_pair() {
    BehaviorTable abd(two3, two3, true), acd(two3, two3, true);
    for (size_t si = 0; si < abd.setting_tuples(); ++si) {
        auto s = abd.setting_tuple(si);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                mpq_class v = ((a ^ b) == (s[0] & s[1])) ? mpq_class(1, 2) : mpq_class(0);
                abd.set(abd.index({a, b, 0}, s), v);
                acd.set(acd.index({a, b, 0}, s), v);
            }
    }
    return {abd, acd};
}

// B-C block of a 4-party table conditioned on (a, d, x, w), unnormalized weights dropped
std::optional<BehaviorTable> bc_block(const BehaviorTable& Q, int a, int d, int x, int w) {
    BehaviorTable B({2, 2}, {2, 2}, true);
    mpq_class mass = 0;
    for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) mass += Q.q(Q.index({a, b, c, d}, {x, 0, 0, w}));
    if (mass == 0) return std::nullopt;
    for (int y = 0; y < 2; ++y)
        for (int z = 0; z < 2; ++z)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c) B.set(B.index({b, c}, {y, z}), Q.q(Q.index({a, b, c, d}, {x, y, z, w})) / mass);
    return B;
}

void check_certificate(const FeasibilityResult& r) {
    REQUIRE(r.status == LpStatus::Infeasible);
    auto cert = extract_certificate(r);
    mpq_class cmax = 0;
    for (const auto& t : cert.terms) cmax = std::max(cmax, mpq_class(abs(t.coef)));
    CHECK(cmax == 1);
    // every deterministic strategy, marginals taken by hand
    int count = 0;
    for (int m = 0; m < 256; ++m) {
        int f[4][2];
        for (int p = 0; p < 4; ++p)
            for (int s = 0; s < 2; ++s) f[p][s] = (m >> (2 * p + s)) & 1;
        auto D = det4(f);
        mpq_class v = evaluate_on_marginals_exact(cert, {marginalize(D, {0, 1, 3}), marginalize(D, {0, 2, 3})});
        CHECK(v <= cert.bound);
        ++count;
    }
    CHECK(count == 256);
    CHECK(local_deterministic_max(cert, r.shape) <= r.bound);
    CHECK(r.local_max <= r.bound);
    mpq_class on_input = evaluate_on_marginals_exact(cert, {r.abd, r.acd});
    CHECK(on_input == r.certificate_value);
    CHECK(on_input - cert.bound == r.margin);
    CHECK(r.margin > 0);
}

} // namespace

TEST_CASE("shape indexing") {
    LpShape s;
    CHECK(s.strategies() == 16);
    CHECK(s.variables() == 256);
    std::set<int> seen;
    for (int a = 0; a < 2; ++a)
        for (int d = 0; d < 2; ++d)
            for (int x = 0; x < 2; ++x)
                for (int w = 0; w < 2; ++w)
                    for (int l = 0; l < 16; ++l) seen.insert(s.var(a, d, x, w, l));
    CHECK(seen.size() == 256);
    for (int l = 0; l < 16; ++l) {
        auto sp = strategy_pair(s, l);
        for (int y = 0; y < 2; ++y) CHECK(s.b_of(l, y) == sp.b_strategy[y]);
        for (int z = 0; z < 2; ++z) CHECK(s.c_of(l, z) == sp.c_strategy[z]);
    }
}

TEST_CASE("deterministic strategies are feasible") {
    for (int m = 0; m < 256; m += 7) {
        int f[4][2];
        for (int p = 0; p < 4; ++p)
            for (int s = 0; s < 2; ++s) f[p][s] = (m >> (2 * p + s)) & 1;
        auto r = decompose_locally(det4(f));
        CHECK(r.status == LpStatus::Feasible);
        CHECK_THROWS_AS(extract_certificate(r), std::logic_error);
    }
}

TEST_CASE("random local models decompose and reconstruct exactly") {
    std::mt19937 rng(31);
    for (int t = 0; t < 25; ++t) {
        auto P = random_local(rng, 2 + t % 5);
        auto r = decompose_locally(P);
        REQUIRE(r.status == LpStatus::Feasible);
        CHECK(r.rounding_error == 0);
        auto Q = reconstruct_full_distribution(r);
        REQUIRE(Q.exact());
        CHECK(marginalize(Q, {0, 1, 3}) == marginalize(P, {0, 1, 3}));
        CHECK(marginalize(Q, {0, 2, 3}) == marginalize(P, {0, 2, 3}));
        CHECK(check_no_signalling(Q, 0).pass);
        for (int a = 0; a < 2; ++a)
            for (int d = 0; d < 2; ++d)
                for (int x = 0; x < 2; ++x)
                    for (int w = 0; w < 2; ++w)
                        if (auto B = bc_block(Q, a, d, x, w)) CHECK(brute_force_local_check(*B));
        for (const auto& wv : r.weights) CHECK(wv >= 0);
    }
}

TEST_CASE("block-wise PR constructions have local ABD/ACD marginals") {
    // the PR blocks are individually nonlocal but have uniform B and C marginals,
    // so the product extension reproduces ABD and ACD
    std::mt19937 rng(5);
    for (int t = 0; t < 10; ++t) {
        auto P = pr_blocks(rng);
        CHECK(check_no_signalling(P, 0).pass);
        int nonlocal = 0;
        for (int a = 0; a < 2; ++a)
            for (int d = 0; d < 2; ++d)
                for (int x = 0; x < 2; ++x)
                    for (int w = 0; w < 2; ++w)
                        if (auto B = bc_block(P, a, d, x, w)) nonlocal += !brute_force_local_check(*B);
        CHECK(nonlocal > 0);
        CHECK(decompose_locally(P).status == LpStatus::Feasible);
    }
}

TEST_CASE("brute-force CHSH check") {
    BehaviorTable pr({2, 2}, {2, 2}, true), u({2, 2}, {2, 2}, true);
    for (size_t i = 0; i < pr.size(); ++i) u.set(i, mpq_class(1, 4));
    for (int y = 0; y < 2; ++y)
        for (int z = 0; z < 2; ++z)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c)
                    pr.set(pr.index({b, c}, {y, z}), ((b ^ c) == (y & z)) ? mpq_class(1, 2) : mpq_class(0));
    CHECK_FALSE(brute_force_local_check(pr));
    CHECK(brute_force_local_check(u));
    // 1/2 PR + 1/2 noise saturates CHSH = 2 exactly
    BehaviorTable mix({2, 2}, {2, 2}, true);
    for (size_t i = 0; i < pr.size(); ++i) mix.set(i, (pr.q(i) + u.q(i)) / 2);
    CHECK(brute_force_local_check(mix));
    CHECK_THROWS(brute_force_local_check(BehaviorTable({3, 2}, {2, 2}, true)));
}

TEST_CASE("monogamy pair is infeasible with a sound certificate") {
    auto [abd, acd] = monogamy_pair();
    auto r = decompose_locally(abd, acd);
    check_certificate(r);
    CHECK(r.certified);
    CHECK_THROWS_AS(reconstruct_full_distribution(r), std::logic_error);
}

TEST_CASE("seed box is infeasible, gauge 9/7") {
    auto box = load_table(data_dir() + "/seed_box.txt");
    REQUIRE(box.exact());
    CHECK(check_no_signalling(box, 0).pass);
    auto r = decompose_locally(box);
    check_certificate(r);
    auto g = gauge_certificate(marginalize(box, {0, 1, 3}), marginalize(box, {0, 2, 3}));
    CHECK(g.gauge == mpq_class(9, 7));
    CHECK(g.value > g.facet.bound);
    CHECK(hidden_influence_max(g.facet, r.shape) == g.facet.bound);
}

TEST_CASE("gauge of a local pair is at most 1") {
    std::mt19937 rng(2);
    auto P = random_local(rng, 4);
    auto g = gauge_certificate(marginalize(P, {0, 1, 3}), marginalize(P, {0, 2, 3}));
    CHECK(g.gauge <= 1);
}

TEST_CASE("hidden-influence maximum of CHSH-type scoped expressions") {
    LpShape s;
    BellExpression e;
    e.scope = {{0, 1, 3}, {0, 2, 3}};
    // A-B CHSH inside ABD: A may steer B freely, so PR-level 4 is reachable
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int w = 0; w < 2; ++w)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        for (int d = 0; d < 2; ++d) {
                            int sign = ((x & y) ? -1 : 1) * ((a ^ b) ? -1 : 1);
                            mpq_class c(sign, 2);
                            c.canonicalize();
                            e.terms.push_back({0, {a, b, d}, {x, y, w}, c});
                        }
    CHECK(hidden_influence_max(e, s) == 4);
    CHECK(local_deterministic_max(e, s) == 2);
    BellExpression bad;
    bad.scope = {{0, 1, 2}};
    CHECK_THROWS_AS(hidden_influence_max(bad, s), ScopeError);
}

TEST_CASE("input validation") {
    std::mt19937 rng(3);
    auto P = random_local(rng, 3), R = random_local(rng, 3);
    // A-D marginals disagree
    CHECK_THROWS_AS(decompose_locally(marginalize(P, {0, 1, 3}), marginalize(R, {0, 2, 3})), InconsistentMarginals);
    // signalling ABD
    auto abd = marginalize(P, {0, 1, 3});
    abd.set(abd.index({0, 0, 0}, {0, 1, 0}), abd.q(abd.index({0, 0, 0}, {0, 1, 0})) + mpq_class(1, 10));
    abd.set(abd.index({1, 0, 0}, {0, 1, 0}), abd.q(abd.index({1, 0, 0}, {0, 1, 0})) - mpq_class(1, 10));
    if (abd.q(abd.index({1, 0, 0}, {0, 1, 0})) >= 0) CHECK_THROWS(decompose_locally(abd, marginalize(P, {0, 2, 3})));
    CHECK_THROWS_AS(decompose_locally(BehaviorTable({2, 2}, {2, 2}, true), BehaviorTable({2, 2}, {2, 2}, true)),
                    std::invalid_argument);
}

TEST_CASE("rationalization of float marginals") {
    auto cached = cached_quantum_behavior();
    REQUIRE(cached.setup);
    auto P = born_rule(*cached.setup);
    auto rp = rationalize_pair(marginalize(P, {0, 1, 3}), marginalize(P, {0, 2, 3}));
    CHECK(rp.abd.exact());
    CHECK(rp.l1_error > 0);
    CHECK(rp.l1_error < 1e-4);
    for (const auto* t : {&rp.abd, &rp.acd}) {
        CHECK(check_no_signalling(*t, 0).pass);
        for (size_t i = 0; i < t->size(); ++i) {
            CHECK(t->q(i) >= 0);
            CHECK(mpz_class(1000000) % t->q(i).get_den() == 0);
        }
    }
    CHECK(marginalize(rp.abd, {0, 2}) == marginalize(rp.acd, {0, 2}));

    auto r = decompose_locally(P);
    CHECK(r.status == LpStatus::Infeasible);
    CHECK(r.certified);
    CHECK(r.margin.get_d() > r.rounding_error * r.coef_max);
    CHECK(lp_oracle_margin(P) > 0);
}
