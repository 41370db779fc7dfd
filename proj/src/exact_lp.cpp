#include "hinf/exact_lp.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace hinf::lp {

namespace {

constexpr double kRc = 1e-10;    // reduced-cost tolerance
constexpr double kPiv = 1e-9;    // smallest usable pivot
constexpr double kInfeas = 1e-9; // phase-one residual regarded as positive

// Sign-normalized copy so that b >= 0; sign[i] records the flip.
struct Normalized {
    int m, n;
    std::vector<int> sign;
    std::vector<mpq_class> A, b;
    std::vector<double> Ad, bd;
};

Normalized normalize(const Problem& p) {
    Normalized z{p.m, p.n, std::vector<int>(p.m, 1), p.A, p.b, {}, {}};
    for (int i = 0; i < p.m; ++i)
        if (sgn(p.b[i]) < 0) {
            z.sign[i] = -1;
            z.b[i] = -z.b[i];
            for (int j = 0; j < p.n; ++j) z.A[static_cast<size_t>(i) * p.n + j] = -z.A[static_cast<size_t>(i) * p.n + j];
        }
    z.Ad.resize(z.A.size());
    z.bd.resize(z.b.size());
    for (size_t k = 0; k < z.A.size(); ++k) z.Ad[k] = z.A[k].get_d();
    for (size_t k = 0; k < z.b.size(); ++k) z.bd[k] = z.b[k].get_d();
    return z;
}

// Dense floating tableau; columns: n structural, m artificial, rhs.
class FloatSimplex {
public:
    explicit FloatSimplex(const Normalized& z) : m_(z.m), n_(z.n), w_(z.n + z.m + 1), T_(static_cast<size_t>(z.m) * w_, 0.0) {
        basis_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < n_; ++j) at(i, j) = z.Ad[static_cast<size_t>(i) * n_ + j];
            at(i, n_ + i) = 1.0;
            at(i, w_ - 1) = z.bd[i];
            basis_[i] = n_ + i;
        }
    }

    // returns false when unbounded
    bool optimize(const std::vector<double>& cost, bool allow_artificial) {
        std::vector<double> rc(w_ - 1);
        auto reprice = [&] {
            for (int j = 0; j < w_ - 1; ++j) {
                double s = cost[j];
                for (int i = 0; i < m_; ++i) s -= cost[basis_[i]] * at(i, j);
                rc[j] = s;
            }
        };
        reprice();
        int degenerate = 0;
        bool bland = false;
        long cap = 50L * (m_ + n_) + 1000;
        for (long it = 0; it < cap; ++it) {
            int enter = -1;
            double bestv = kRc;
            for (int j = 0; j < w_ - 1; ++j) {
                if (!allow_artificial && j >= n_) break;
                if (rc[j] > bestv) {
                    enter = j;
                    if (bland) break;
                    bestv = rc[j];
                }
            }
            if (enter < 0) return true;
            int leave = -1;
            double ratio = 0;
            for (int i = 0; i < m_; ++i) {
                double a = at(i, enter);
                if (a <= kPiv) continue;
                double r = at(i, w_ - 1) / a;
                if (leave < 0 || r < ratio - 1e-14 || (std::abs(r - ratio) <= 1e-14 && basis_[i] < basis_[leave])) {
                    leave = i;
                    ratio = r;
                }
            }
            if (leave < 0) return false;
            if (ratio <= 1e-13) {
                if (++degenerate > 50) bland = true;
            } else degenerate = 0;
            pivot(leave, enter);
            if (it % 64 == 63) reprice();
            else {
                double f = rc[enter];
                for (int j = 0; j < w_ - 1; ++j) rc[j] -= f * at(leave, j);
            }
        }
        return true;
    }

    // move artificials out of the basis where a structural pivot exists
    void drive_out_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < n_) continue;
            int best = -1;
            double bv = kPiv;
            for (int j = 0; j < n_; ++j)
                if (std::abs(at(i, j)) > bv) {
                    bv = std::abs(at(i, j));
                    best = j;
                }
            if (best >= 0) pivot(i, best);
        }
    }

    double artificial_sum() const {
        double s = 0;
        for (int i = 0; i < m_; ++i)
            if (basis_[i] >= n_) s += std::max(0.0, T_[static_cast<size_t>(i) * w_ + w_ - 1]);
        return s;
    }

    const std::vector<int>& basis() const { return basis_; }

private:
    double& at(int i, int j) { return T_[static_cast<size_t>(i) * w_ + j]; }
    double at(int i, int j) const { return T_[static_cast<size_t>(i) * w_ + j]; }

    void pivot(int r, int c) {
        double pv = at(r, c);
        for (int j = 0; j < w_; ++j) at(r, j) /= pv;
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            double f = at(i, c);
            if (f == 0.0) continue;
            for (int j = 0; j < w_; ++j) at(i, j) -= f * at(r, j);
        }
        basis_[r] = c;
    }

    int m_, n_, w_;
    std::vector<double> T_;
    std::vector<int> basis_;
};

// column j of [A | I]
void column(const Normalized& z, int j, std::vector<mpq_class>& out) {
    out.assign(z.m, mpq_class(0));
    if (j < z.n)
        for (int i = 0; i < z.m; ++i) out[i] = z.A[static_cast<size_t>(i) * z.n + j];
    else out[j - z.n] = 1;
}

// Solve M x = v (or M^T x = v) exactly; M given by its columns.
std::optional<std::vector<mpq_class>> solve(const std::vector<std::vector<mpq_class>>& cols, std::vector<mpq_class> v,
                                            bool transpose) {
    size_t m = cols.size();
    std::vector<mpq_class> M(m * m);
    for (size_t j = 0; j < m; ++j)
        for (size_t i = 0; i < m; ++i) {
            if (transpose) M[j * m + i] = cols[j][i];
            else M[i * m + j] = cols[j][i];
        }
    std::vector<size_t> perm(m);
    for (size_t k = 0; k < m; ++k) {
        size_t piv = m;
        for (size_t i = k; i < m; ++i)
            if (sgn(M[i * m + k]) != 0) {
                piv = i;
                break;
            }
        if (piv == m) return std::nullopt;
        if (piv != k) {
            for (size_t j = k; j < m; ++j) std::swap(M[k * m + j], M[piv * m + j]);
            std::swap(v[k], v[piv]);
        }
        mpq_class inv = 1 / M[k * m + k];
        for (size_t i = k + 1; i < m; ++i) {
            if (sgn(M[i * m + k]) == 0) continue;
            mpq_class f = M[i * m + k] * inv;
            for (size_t j = k + 1; j < m; ++j)
                if (sgn(M[k * m + j]) != 0) M[i * m + j] -= f * M[k * m + j];
            M[i * m + k] = 0;
            if (sgn(v[k]) != 0) v[i] -= f * v[k];
        }
    }
    std::vector<mpq_class> x(m);
    for (size_t k = m; k-- > 0;) {
        mpq_class s = v[k];
        for (size_t j = k + 1; j < m; ++j)
            if (sgn(M[k * m + j]) != 0) s -= M[k * m + j] * x[j];
        x[k] = s / M[k * m + k];
    }
    return x;
}

mpq_class dot_col(const Normalized& z, const std::vector<mpq_class>& y, int j) {
    mpq_class s = 0;
    for (int i = 0; i < z.m; ++i) {
        const mpq_class& a = z.A[static_cast<size_t>(i) * z.n + j];
        if (sgn(a) != 0) s += y[i] * a;
    }
    return s;
}

std::vector<mpq_class> unflip(const Normalized& z, std::vector<mpq_class> y) {
    for (int i = 0; i < z.m; ++i)
        if (z.sign[i] < 0) y[i] = -y[i];
    return y;
}

struct Exact {
    std::vector<std::vector<mpq_class>> cols;
    std::optional<std::vector<mpq_class>> xB;
};

Exact basis_solve(const Normalized& z, const std::vector<int>& basis) {
    Exact e;
    e.cols.resize(z.m);
    for (int i = 0; i < z.m; ++i) column(z, basis[i], e.cols[i]);
    e.xB = solve(e.cols, z.b, false);
    return e;
}

// Exact tableau simplex with Bland's rule; used when the floating basis does not verify.
class RationalSimplex {
public:
    explicit RationalSimplex(const Normalized& z) : z_(z), m_(z.m), n_(z.n), w_(z.n + z.m + 1) {
        T_.assign(static_cast<size_t>(m_) * w_, mpq_class(0));
        basis_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < n_; ++j) at(i, j) = z.A[static_cast<size_t>(i) * n_ + j];
            at(i, n_ + i) = 1;
            at(i, w_ - 1) = z.b[i];
            basis_[i] = n_ + i;
        }
    }

    bool optimize(const std::vector<mpq_class>& cost, bool allow_artificial) {
        while (true) {
            int enter = -1;
            for (int j = 0; j < (allow_artificial ? w_ - 1 : n_); ++j) {
                mpq_class r = cost[j];
                for (int i = 0; i < m_; ++i)
                    if (sgn(at(i, j)) != 0 && sgn(cost[basis_[i]]) != 0) r -= cost[basis_[i]] * at(i, j);
                if (sgn(r) > 0) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;
            int leave = -1;
            mpq_class ratio;
            for (int i = 0; i < m_; ++i) {
                if (sgn(at(i, enter)) <= 0) continue;
                mpq_class r = at(i, w_ - 1) / at(i, enter);
                if (leave < 0 || r < ratio || (r == ratio && basis_[i] < basis_[leave])) {
                    leave = i;
                    ratio = r;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
    }

    void drive_out_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < n_) continue;
            for (int j = 0; j < n_; ++j)
                if (sgn(at(i, j)) != 0) {
                    pivot(i, j);
                    break;
                }
        }
    }

    mpq_class artificial_sum() const {
        mpq_class s = 0;
        for (int i = 0; i < m_; ++i)
            if (basis_[i] >= n_) s += T_[static_cast<size_t>(i) * w_ + w_ - 1];
        return s;
    }

    // y_i = sum_r cost[B_r] * (B^-1)_{r,i}; B^-1 sits in the artificial columns
    std::vector<mpq_class> duals(const std::vector<mpq_class>& cost) const {
        std::vector<mpq_class> y(m_, mpq_class(0));
        for (int i = 0; i < m_; ++i)
            for (int r = 0; r < m_; ++r)
                if (sgn(cost[basis_[r]]) != 0) y[i] += cost[basis_[r]] * T_[static_cast<size_t>(r) * w_ + n_ + i];
        return y;
    }

    std::vector<mpq_class> primal() const {
        std::vector<mpq_class> x(n_, mpq_class(0));
        for (int i = 0; i < m_; ++i)
            if (basis_[i] < n_) x[basis_[i]] = T_[static_cast<size_t>(i) * w_ + w_ - 1];
        return x;
    }

    const std::vector<int>& basis() const { return basis_; }
    int pivots() const { return pivots_; }

private:
    mpq_class& at(int i, int j) { return T_[static_cast<size_t>(i) * w_ + j]; }
    const mpq_class& at(int i, int j) const { return T_[static_cast<size_t>(i) * w_ + j]; }

    void pivot(int r, int c) {
        mpq_class inv = 1 / at(r, c);
        for (int j = 0; j < w_; ++j)
            if (sgn(at(r, j)) != 0) at(r, j) *= inv;
        for (int i = 0; i < m_; ++i) {
            if (i == r || sgn(at(i, c)) == 0) continue;
            mpq_class f = at(i, c);
            for (int j = 0; j < w_; ++j)
                if (sgn(at(r, j)) != 0) at(i, j) -= f * at(r, j);
        }
        basis_[r] = c;
        ++pivots_;
    }

    const Normalized& z_;
    int m_, n_, w_;
    std::vector<mpq_class> T_;
    std::vector<int> basis_;
    int pivots_ = 0;
};

std::vector<double> phase_one_cost(int m, int n) {
    std::vector<double> c(n + m, 0.0);
    for (int i = 0; i < m; ++i) c[n + i] = -1.0;
    return c;
}

std::vector<mpq_class> phase_one_cost_q(int m, int n) {
    std::vector<mpq_class> c(n + m, mpq_class(0));
    for (int i = 0; i < m; ++i) c[n + i] = -1;
    return c;
}

// Farkas ray from a phase-one basis; verified exactly or nullopt.
std::optional<std::vector<mpq_class>> verified_farkas(const Normalized& z, const Exact& e, const std::vector<int>& basis) {
    std::vector<mpq_class> cB(z.m);
    for (int i = 0; i < z.m; ++i) cB[i] = basis[i] >= z.n ? mpq_class(-1) : mpq_class(0);
    auto yhat = solve(e.cols, cB, true);
    if (!yhat) return std::nullopt;
    std::vector<mpq_class> yf(z.m);
    for (int i = 0; i < z.m; ++i) yf[i] = -(*yhat)[i];
    mpq_class yb = 0;
    for (int i = 0; i < z.m; ++i) yb += yf[i] * z.b[i];
    if (sgn(yb) <= 0) return std::nullopt;
    for (int j = 0; j < z.n; ++j)
        if (sgn(dot_col(z, yf, j)) > 0) return std::nullopt;
    return yf;
}

Solution exact_fallback(const Normalized& z, const std::vector<mpq_class>* cost) {
    Solution s;
    RationalSimplex rs(z);
    rs.optimize(phase_one_cost_q(z.m, z.n), true);
    if (sgn(rs.artificial_sum()) > 0) {
        auto yhat = rs.duals(phase_one_cost_q(z.m, z.n));
        for (auto& v : yhat) v = -v;
        s.status = Status::Infeasible;
        s.y = unflip(z, yhat);
        s.basis = rs.basis();
        s.exact_pivots = rs.pivots();
        return s;
    }
    rs.drive_out_artificials();
    std::vector<mpq_class> c(z.n + z.m, mpq_class(0));
    if (cost)
        for (int j = 0; j < z.n; ++j) c[j] = (*cost)[j];
    bool bounded = cost ? rs.optimize(c, false) : true;
    s.status = bounded ? Status::Optimal : Status::Unbounded;
    s.x = rs.primal();
    s.basis = rs.basis();
    s.exact_pivots = rs.pivots();
    s.value = 0;
    if (cost)
        for (int j = 0; j < z.n; ++j) s.value += (*cost)[j] * s.x[j];
    s.y = unflip(z, rs.duals(c));
    return s;
}

Solution run(const Problem& p, const std::vector<mpq_class>* cost) {
    if (static_cast<int>(p.A.size()) != p.m * p.n || static_cast<int>(p.b.size()) != p.m)
        throw std::invalid_argument("LP dimensions");
    Normalized z = normalize(p);
    FloatSimplex fs(z);
    fs.optimize(phase_one_cost(z.m, z.n), true);
    double resid = fs.artificial_sum();
    double scale = 1.0;
    for (double v : z.bd) scale = std::max(scale, std::abs(v));
    if (resid > kInfeas * scale) {
        Exact e = basis_solve(z, fs.basis());
        if (auto y = verified_farkas(z, e, fs.basis())) {
            Solution s;
            s.status = Status::Infeasible;
            s.y = unflip(z, *y);
            s.basis = fs.basis();
            s.float_basis_verified = true;
            return s;
        }
        return exact_fallback(z, cost);
    }
    fs.drive_out_artificials();
    bool bounded = true;
    if (cost) {
        std::vector<double> c(z.n + z.m, 0.0);
        for (int j = 0; j < z.n; ++j) c[j] = (*cost)[j].get_d();
        bounded = fs.optimize(c, false);
    }
    if (!bounded) return exact_fallback(z, cost);
    const auto& basis = fs.basis();
    Exact e = basis_solve(z, basis);
    if (!e.xB) return exact_fallback(z, cost);
    Solution s;
    s.x.assign(z.n, mpq_class(0));
    for (int i = 0; i < z.m; ++i) {
        const mpq_class& v = (*e.xB)[i];
        if (sgn(v) < 0) return exact_fallback(z, cost);
        if (basis[i] >= z.n) {
            if (sgn(v) != 0) return exact_fallback(z, cost);
        } else s.x[basis[i]] = v;
    }
    s.status = Status::Optimal;
    s.basis = basis;
    s.value = 0;
    if (cost) {
        std::vector<mpq_class> cB(z.m, mpq_class(0));
        for (int i = 0; i < z.m; ++i)
            if (basis[i] < z.n) cB[i] = (*cost)[basis[i]];
        auto yhat = solve(e.cols, cB, true);
        if (!yhat) return exact_fallback(z, cost);
        for (int j = 0; j < z.n; ++j)
            if ((*cost)[j] - dot_col(z, *yhat, j) > 0) return exact_fallback(z, cost);
        for (int j = 0; j < z.n; ++j) s.value += (*cost)[j] * s.x[j];
        s.y = unflip(z, *yhat);
    }
    s.float_basis_verified = true;
    return s;
}

} // namespace

Solution feasibility(const Problem& p) { return run(p, nullptr); }

Solution maximize(const Problem& p) {
    if (static_cast<int>(p.c.size()) != p.n) throw std::invalid_argument("objective size");
    return run(p, &p.c);
}

std::vector<int> independent_rows(const Problem& p) {
    // eliminate on a working copy, keeping original row ids of the pivot rows
    std::vector<std::vector<mpq_class>> rows(p.m);
    for (int i = 0; i < p.m; ++i) rows[i].assign(p.A.begin() + static_cast<long>(i) * p.n, p.A.begin() + static_cast<long>(i + 1) * p.n);
    std::vector<int> chosen;
    std::vector<std::pair<int, int>> pivots; // (row id, column)
    for (int i = 0; i < p.m; ++i) {
        auto& r = rows[i];
        for (auto [pr, pc] : pivots) {
            if (sgn(r[pc]) == 0) continue;
            mpq_class f = r[pc] / rows[pr][pc];
            for (int j = 0; j < p.n; ++j)
                if (sgn(rows[pr][j]) != 0) r[j] -= f * rows[pr][j];
        }
        int col = -1;
        for (int j = 0; j < p.n; ++j)
            if (sgn(r[j]) != 0) {
                col = j;
                break;
            }
        if (col >= 0) {
            chosen.push_back(i);
            pivots.push_back({i, col});
        }
    }
    return chosen;
}

Problem select_rows(const Problem& p, const std::vector<int>& rows) {
    Problem q;
    q.m = static_cast<int>(rows.size());
    q.n = p.n;
    q.c = p.c;
    q.A.reserve(static_cast<size_t>(q.m) * q.n);
    for (int r : rows) {
        for (int j = 0; j < p.n; ++j) q.A.push_back(p.a(r, j));
        q.b.push_back(p.b[r]);
    }
    return q;
}

} // namespace hinf::lp
