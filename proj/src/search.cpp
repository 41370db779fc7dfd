#include "hinf/search.hpp"
#include "hinf/locality_lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace hinf {

using cd = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

StateFamily parse_family(const std::string& s) {
    if (s == "product") return StateFamily::Product;
    if (s == "ghz") return StateFamily::GHZ;
    if (s == "general") return StateFamily::General;
    throw std::invalid_argument("unknown state family '" + s + "' (product, ghz, general)");
}

std::string to_string(StateFamily f) {
    switch (f) {
    case StateFamily::Product: return "product";
    case StateFamily::GHZ: return "ghz";
    case StateFamily::General: return "general";
    }
    return "?";
}

SearchOracle lp_search_oracle(std::optional<BellExpression> guide) {
    return {[](const BehaviorTable& P) { return lp_oracle_margin(P); }, std::move(guide)};
}

std::vector<double> full_functional(const BellExpression& e, const std::vector<int>& settings,
                                    const std::vector<int>& outcomes) {
    BehaviorTable shape(settings, outcomes, false);
    int n = shape.n_parties();
    std::vector<double> other(e.scope.size(), 1.0);
    for (size_t k = 0; k < e.scope.size(); ++k) {
        for (int p : e.scope[k])
            if (p < 0 || p >= n) throw ScopeError("scope party out of range");
        for (int p = 0; p < n; ++p)
            if (std::find(e.scope[k].begin(), e.scope[k].end(), p) == e.scope[k].end()) other[k] *= settings[p];
    }
    std::vector<double> F(shape.size(), 0.0);
    for (size_t i = 0; i < shape.size(); ++i) {
        auto s = shape.setting_tuple(i / shape.outcome_tuples());
        auto o = shape.outcome_tuple(i % shape.outcome_tuples());
        for (const auto& t : e.terms) {
            const auto& sc = e.scope[t.scope];
            bool match = true;
            for (size_t j = 0; j < sc.size() && match; ++j)
                match = s[sc[j]] == t.settings[j] && o[sc[j]] == t.outcomes[j];
            if (match) F[i] += t.coef.get_d() / other[t.scope];
        }
    }
    return F;
}

namespace {

Mat2 projector(const Vec3& n, int o) {
    double sg = o == 0 ? 1.0 : -1.0;
    Mat2 P;
    P << 0.5 * (1 + sg * n[2]), 0.5 * sg * cd(n[0], -n[1]), 0.5 * sg * cd(n[0], n[1]), 0.5 * (1 - sg * n[2]);
    return P;
}

void apply_1q(std::vector<cd>& v, int n, int k, const Mat2& M) {
    size_t bit = size_t(1) << (n - 1 - k);
    for (size_t i = 0; i < v.size(); ++i) {
        if (i & bit) continue;
        cd a = v[i], b = v[i | bit];
        v[i] = M(0, 0) * a + M(0, 1) * b;
        v[i | bit] = M(1, 0) * a + M(1, 1) * b;
    }
}

Mat2 reduced(const std::vector<cd>& phi, int n, int k) {
    size_t bit = size_t(1) << (n - 1 - k);
    Mat2 r = Mat2::Zero();
    for (size_t i = 0; i < phi.size(); ++i) {
        if (i & bit) continue;
        cd f0 = phi[i], f1 = phi[i | bit];
        r(0, 0) += f0 * std::conj(f0);
        r(0, 1) += f0 * std::conj(f1);
        r(1, 0) += f1 * std::conj(f0);
        r(1, 1) += f1 * std::conj(f1);
    }
    return r;
}

double functional_value(const std::vector<double>& F, const QuantumSetup& s) {
    auto P = born_rule(s);
    double v = 0;
    for (size_t i = 0; i < F.size(); ++i) v += F[i] * P.p(i);
    return v;
}

Vec3 axis_from(const Mat2& X, const Vec3& keep) {
    Vec3 r{2 * X(1, 0).real(), 2 * X(1, 0).imag(), (X(0, 0) - X(1, 1)).real()};
    double nr = norm(r);
    if (nr < 1e-14) return keep;
    return {r[0] / nr, r[1] / nr, r[2] / nr};
}

struct Layout {
    BehaviorTable shape;
    int n;
    explicit Layout(const QuantumSetup& s)
        : shape(std::vector<int>(s.n_qubits, static_cast<int>(s.axes[0].size())), std::vector<int>(s.n_qubits, 2),
                false),
          n(s.n_qubits) {}
};

void update_axes(const std::vector<double>& F, QuantumSetup& s, const Layout& L, int k) {
    int ns = static_cast<int>(s.axes[k].size());
    std::vector<std::array<Mat2, 2>> G(ns, {Mat2::Zero(), Mat2::Zero()});
    for (size_t i = 0; i < L.shape.size(); ++i) {
        if (F[i] == 0) continue;
        auto st = L.shape.setting_tuple(i / L.shape.outcome_tuples());
        auto ot = L.shape.outcome_tuple(i % L.shape.outcome_tuples());
        std::vector<cd> phi = s.state;
        for (int j = 0; j < L.n; ++j)
            if (j != k) apply_1q(phi, L.n, j, projector(s.axes[j][st[j]], ot[j]));
        G[st[k]][ot[k]] += F[i] * reduced(phi, L.n, k);
    }
    for (int x = 0; x < ns; ++x) s.axes[k][x] = axis_from(G[x][0] - G[x][1], s.axes[k][x]);
}

// top eigenvector of sum_i F_i * (tensor of projectors)
void update_general(const std::vector<double>& F, QuantumSetup& s, const Layout& L) {
    size_t dim = s.state.size();
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(dim, dim);
    for (size_t i = 0; i < L.shape.size(); ++i) {
        if (F[i] == 0) continue;
        auto st = L.shape.setting_tuple(i / L.shape.outcome_tuples());
        auto ot = L.shape.outcome_tuple(i % L.shape.outcome_tuples());
        Eigen::MatrixXcd K = Eigen::MatrixXcd::Ones(1, 1);
        for (int j = 0; j < L.n; ++j) {
            Mat2 P = projector(s.axes[j][st[j]], ot[j]);
            Eigen::MatrixXcd N(K.rows() * 2, K.cols() * 2);
            // K (x) P keeps party 0 most significant
            for (Eigen::Index r = 0; r < K.rows(); ++r)
                for (Eigen::Index c = 0; c < K.cols(); ++c)
                    for (int a = 0; a < 2; ++a)
                        for (int b = 0; b < 2; ++b) N(2 * r + a, 2 * c + b) = K(r, c) * P(a, b);
            K = std::move(N);
        }
        B += F[i] * K;
    }
    B = 0.5 * (B + B.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(B);
    auto v = es.eigenvectors().col(dim - 1);
    for (size_t i = 0; i < dim; ++i) s.state[i] = v(i);
}

void update_product(const std::vector<double>& F, std::vector<std::array<cd, 2>>& q, QuantumSetup& s,
                    const Layout& L) {
    for (int k = 0; k < L.n; ++k) {
        Mat2 E = Mat2::Zero();
        for (size_t i = 0; i < L.shape.size(); ++i) {
            if (F[i] == 0) continue;
            auto st = L.shape.setting_tuple(i / L.shape.outcome_tuples());
            auto ot = L.shape.outcome_tuple(i % L.shape.outcome_tuples());
            cd w = F[i];
            for (int j = 0; j < L.n; ++j) {
                if (j == k) continue;
                Mat2 P = projector(s.axes[j][st[j]], ot[j]);
                Eigen::Vector2cd v(q[j][0], q[j][1]);
                w *= (v.adjoint() * P * v)(0, 0);
            }
            E += w * projector(s.axes[k][st[k]], ot[k]);
        }
        E = 0.5 * (E + E.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Mat2> es(E);
        q[k] = {es.eigenvectors()(0, 1), es.eigenvectors()(1, 1)};
    }
    for (size_t i = 0; i < s.state.size(); ++i) {
        cd a = 1;
        for (int j = 0; j < L.n; ++j) a *= q[j][(i >> (L.n - 1 - j)) & 1];
        s.state[i] = a;
    }
}

std::vector<std::array<cd, 2>> product_factors(const QuantumSetup& s) {
    // assumes a product state; reads each factor off the reduced state
    std::vector<std::array<cd, 2>> q(s.n_qubits);
    for (int k = 0; k < s.n_qubits; ++k) {
        Eigen::SelfAdjointEigenSolver<Mat2> es(reduced(s.state, s.n_qubits, k));
        q[k] = {es.eigenvectors()(0, 1), es.eigenvectors()(1, 1)};
    }
    return q;
}

Vec3 random_axis(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vec3 v{g(rng), g(rng), g(rng)};
    double nv = norm(v);
    return {v[0] / nv, v[1] / nv, v[2] / nv};
}

QuantumSetup random_setup(const SearchOptions& opt, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    QuantumSetup s;
    s.n_qubits = opt.n_qubits;
    size_t dim = size_t(1) << opt.n_qubits;
    s.state.assign(dim, cd(0));
    switch (opt.family) {
    case StateFamily::GHZ:
        s.state[0] = s.state[dim - 1] = 1 / std::sqrt(2.0);
        break;
    case StateFamily::Product: {
        std::vector<std::array<cd, 2>> q(opt.n_qubits);
        for (auto& f : q) {
            cd a(g(rng), g(rng)), b(g(rng), g(rng));
            double nn = std::sqrt(std::norm(a) + std::norm(b));
            f = {a / nn, b / nn};
        }
        for (size_t i = 0; i < dim; ++i) {
            cd a = 1;
            for (int j = 0; j < opt.n_qubits; ++j) a *= q[j][(i >> (opt.n_qubits - 1 - j)) & 1];
            s.state[i] = a;
        }
        break;
    }
    case StateFamily::General: {
        double nn = 0;
        for (auto& a : s.state) {
            a = cd(g(rng), g(rng));
            nn += std::norm(a);
        }
        for (auto& a : s.state) a /= std::sqrt(nn);
        break;
    }
    }
    s.axes.assign(opt.n_qubits, {});
    for (auto& p : s.axes)
        for (int x = 0; x < opt.settings; ++x) p.push_back(random_axis(rng));
    return s;
}

// margin-only ascent over axis angles, for oracles without a guide
QuantumSetup ascend_margin(const SearchOracle& o, QuantumSetup s, int sweeps, double& best) {
    best = o.margin(born_rule(s));
    double step = 0.5;
    for (int it = 0; it < sweeps && step > 1e-4; ++it) {
        bool moved = false;
        for (auto& party : s.axes)
            for (auto& ax : party)
                for (int c = 0; c < 3; ++c)
                    for (double sg : {1.0, -1.0}) {
                        Vec3 keep = ax;
                        Vec3 t = ax;
                        t[c] += sg * step;
                        double nt = norm(t);
                        ax = {t[0] / nt, t[1] / nt, t[2] / nt};
                        double m = o.margin(born_rule(s));
                        if (m > best) {
                            best = m;
                            moved = true;
                        } else {
                            ax = keep;
                        }
                    }
        if (!moved) step *= 0.5;
    }
    return s;
}

} // namespace

QuantumSetup seesaw(const std::vector<double>& F, QuantumSetup s, StateFamily family, int sweeps) {
    validate(s);
    Layout L(s);
    if (F.size() != L.shape.size()) throw std::invalid_argument("functional size does not match the setup");
    std::vector<std::array<cd, 2>> q;
    if (family == StateFamily::Product) q = product_factors(s);
    double prev = functional_value(F, s);
    for (int it = 0; it < sweeps; ++it) {
        if (family == StateFamily::General) update_general(F, s, L);
        else if (family == StateFamily::Product) update_product(F, q, s, L);
        for (int k = 0; k < L.n; ++k) update_axes(F, s, L, k);
        double v = functional_value(F, s);
        if (v < prev + 1e-12) break;
        prev = v;
    }
    return s;
}

SearchResult violation_search(const SearchOracle& oracle, const SearchOptions& opt) {
    if (opt.n_qubits < 1 || opt.settings < 1 || opt.restarts < 1) throw std::invalid_argument("empty search");
    SearchResult best;
    best.margin = -std::numeric_limits<double>::infinity();
    std::vector<double> F;
    if (oracle.guide) {
        F = full_functional(*oracle.guide, std::vector<int>(opt.n_qubits, opt.settings),
                            std::vector<int>(opt.n_qubits, 2));
    }
    for (int r = 0; r < opt.restarts; ++r) {
        std::mt19937_64 rng(opt.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(r));
        QuantumSetup s = random_setup(opt, rng);
        double m = 0, gv = 0;
        if (oracle.guide) {
            s = seesaw(F, s, opt.family, opt.sweeps);
            gv = functional_value(F, s);
            m = oracle.margin(born_rule(s));
        } else {
            s = ascend_margin(oracle, s, opt.sweeps, m);
        }
        ++best.restarts_run;
        if (m > best.margin || (m == best.margin && gv > best.guide_value)) {
            best.margin = m;
            best.guide_value = gv;
            best.setup = s;
            best.best_restart = r;
        }
    }
    return best;
}

} // namespace hinf
