#include "hinf/behavior.hpp"
#include "hinf/rational.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

namespace hinf {

BehaviorTable::BehaviorTable(std::vector<int> settings, std::vector<int> outcomes, bool exact)
    : settings_(std::move(settings)), outcomes_(std::move(outcomes)), exact_(exact) {
    if (settings_.size() != outcomes_.size() || settings_.empty())
        throw std::invalid_argument("settings/outcomes arity mismatch");
    n_set_ = n_out_ = 1;
    for (size_t k = 0; k < settings_.size(); ++k) {
        if (settings_[k] < 1 || outcomes_[k] < 1) throw std::invalid_argument("empty setting or outcome set");
        n_set_ *= settings_[k];
        n_out_ *= outcomes_[k];
    }
    p_.assign(n_set_ * n_out_, 0.0);
    if (exact_) q_.assign(n_set_ * n_out_, mpq_class(0));
}

size_t BehaviorTable::setting_index(const std::vector<int>& s) const {
    size_t i = 0;
    for (size_t k = 0; k < settings_.size(); ++k) {
        if (s[k] < 0 || s[k] >= settings_[k]) throw std::out_of_range("setting out of range");
        i = i * settings_[k] + s[k];
    }
    return i;
}

size_t BehaviorTable::outcome_index(const std::vector<int>& o) const {
    size_t i = 0;
    for (size_t k = 0; k < outcomes_.size(); ++k) {
        if (o[k] < 0 || o[k] >= outcomes_[k]) throw std::out_of_range("outcome out of range");
        i = i * outcomes_[k] + o[k];
    }
    return i;
}

std::vector<int> BehaviorTable::setting_tuple(size_t si) const {
    std::vector<int> s(settings_.size());
    for (size_t k = settings_.size(); k-- > 0;) {
        s[k] = static_cast<int>(si % settings_[k]);
        si /= settings_[k];
    }
    return s;
}

std::vector<int> BehaviorTable::outcome_tuple(size_t oi) const {
    std::vector<int> o(outcomes_.size());
    for (size_t k = outcomes_.size(); k-- > 0;) {
        o[k] = static_cast<int>(oi % outcomes_[k]);
        oi /= outcomes_[k];
    }
    return o;
}

const mpq_class& BehaviorTable::q(size_t i) const {
    if (!exact_) throw std::logic_error("table is not exact");
    return q_[i];
}

const std::vector<mpq_class>& BehaviorTable::exact_values() const {
    if (!exact_) throw std::logic_error("table is not exact");
    return q_;
}

void BehaviorTable::set(size_t i, double v) {
    if (exact_) throw std::logic_error("exact table needs a rational value");
    p_[i] = v;
}

void BehaviorTable::set(size_t i, const mpq_class& v) {
    if (exact_) {
        q_[i] = v;
        q_[i].canonicalize();
    }
    p_[i] = v.get_d();
}

bool operator==(const BehaviorTable& a, const BehaviorTable& b) {
    if (!a.same_shape(b) || a.exact() != b.exact()) return false;
    if (a.exact()) return a.exact_values() == b.exact_values();
    return a.values() == b.values();
}

namespace {

// iterate all tuples of a mixed radix
bool next_tuple(std::vector<int>& t, const std::vector<int>& radix) {
    for (size_t k = t.size(); k-- > 0;) {
        if (++t[k] < radix[k]) return true;
        t[k] = 0;
    }
    return false;
}

std::string join(const std::vector<int>& v) {
    std::string s;
    for (int x : v) s += std::to_string(x);
    return s;
}

} // namespace

NoSignallingReport check_no_signalling(const BehaviorTable& P, double tol, size_t keep_worst) {
    NoSignallingReport rep;
    int n = P.n_parties();
    const auto& S = P.settings();
    const auto& O = P.outcomes();
    for (int k = 0; k < n; ++k) {
        std::vector<int> rs, ro;
        for (int j = 0; j < n; ++j)
            if (j != k) {
                rs.push_back(S[j]);
                ro.push_back(O[j]);
            }
        std::vector<int> os(rs.size(), 0);
        do {
            std::vector<int> oo(ro.size(), 0);
            do {
                std::vector<int> s(n), o(n);
                for (int j = 0, r = 0; j < n; ++j)
                    if (j != k) {
                        s[j] = os[r];
                        o[j] = oo[r];
                        ++r;
                    }
                std::vector<double> md(S[k], 0.0);
                std::vector<mpq_class> mq(P.exact() ? S[k] : 0);
                for (int sk = 0; sk < S[k]; ++sk) {
                    s[k] = sk;
                    for (int ok = 0; ok < O[k]; ++ok) {
                        o[k] = ok;
                        size_t i = P.index(o, s);
                        md[sk] += P.p(i);
                        if (P.exact()) mq[sk] += P.q(i);
                    }
                }
                for (int a = 0; a < S[k]; ++a)
                    for (int b = a + 1; b < S[k]; ++b) {
                        double mag;
                        bool differs;
                        if (P.exact()) {
                            mpq_class diff = abs(mq[a] - mq[b]);
                            mag = diff.get_d();
                            differs = tol == 0 ? diff != 0 : mag > tol;
                        } else {
                            mag = std::abs(md[a] - md[b]);
                            differs = mag > tol;
                        }
                        rep.max_discrepancy = std::max(rep.max_discrepancy, mag);
                        if (!differs) continue;
                        rep.pass = false;
                        SignallingViolation v;
                        v.party = k;
                        v.setting_a = a;
                        v.setting_b = b;
                        v.other_settings = os;
                        v.other_outcomes = oo;
                        v.magnitude = mag;
                        std::ostringstream ctx;
                        ctx << "party " << k << " settings " << a << " vs " << b << "; others settings " << join(os)
                            << " outcomes " << join(oo);
                        v.context = ctx.str();
                        rep.violations.push_back(std::move(v));
                    }
            } while (next_tuple(oo, ro));
        } while (next_tuple(os, rs));
    }
    std::stable_sort(rep.violations.begin(), rep.violations.end(),
                     [](const auto& x, const auto& y) { return x.magnitude > y.magnitude; });
    if (rep.violations.size() > keep_worst) rep.violations.resize(keep_worst);
    return rep;
}

double normalization_error(const BehaviorTable& P) {
    double worst = 0;
    for (size_t si = 0; si < P.setting_tuples(); ++si) {
        double s = 0;
        for (size_t oi = 0; oi < P.outcome_tuples(); ++oi) s += P.p(si * P.outcome_tuples() + oi);
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

double min_probability(const BehaviorTable& P) {
    return *std::min_element(P.values().begin(), P.values().end());
}

BehaviorTable marginalize(const BehaviorTable& P, const std::vector<int>& keep, double tol) {
    int n = P.n_parties();
    std::vector<bool> kept(n, false);
    for (int k : keep) {
        if (k < 0 || k >= n || kept[k]) throw std::invalid_argument("bad party subset");
        kept[k] = true;
    }
    auto ns = check_no_signalling(P, P.exact() ? 0.0 : tol);
    for (const auto& v : ns.violations)
        if (!kept[v.party]) {
            std::ostringstream os;
            os << "cannot drop signalling party " << v.party << " (" << v.context << ", magnitude " << v.magnitude
               << ")";
            throw SignallingError(os.str());
        }
    std::vector<int> S, O;
    for (int k : keep) {
        S.push_back(P.settings()[k]);
        O.push_back(P.outcomes()[k]);
    }
    BehaviorTable M(S, O, P.exact());
    std::vector<mpq_class> acc(P.exact() ? M.size() : 0);
    std::vector<double> accd(M.size(), 0.0);
    std::vector<int> s(n, 0), sk(keep.size()), ok(keep.size());
    for (size_t msi = 0; msi < M.setting_tuples(); ++msi) {
        auto ms = M.setting_tuple(msi);
        std::fill(s.begin(), s.end(), 0);
        for (size_t r = 0; r < keep.size(); ++r) s[keep[r]] = ms[r];
        size_t si = P.setting_index(s);
        for (size_t oi = 0; oi < P.outcome_tuples(); ++oi) {
            auto o = P.outcome_tuple(oi);
            for (size_t r = 0; r < keep.size(); ++r) ok[r] = o[keep[r]];
            size_t mi = msi * M.outcome_tuples() + M.outcome_index(ok);
            size_t pi = si * P.outcome_tuples() + oi;
            if (P.exact()) acc[mi] += P.q(pi);
            else accd[mi] += P.p(pi);
        }
    }
    for (size_t i = 0; i < M.size(); ++i) {
        if (P.exact()) M.set(i, acc[i]);
        else M.set(i, accd[i]);
    }
    return M;
}

void validate(const QuantumSetup& s) {
    if (s.n_qubits < 1 || s.n_qubits > 20) throw std::invalid_argument("qubit count out of range");
    if (s.state.size() != (size_t(1) << s.n_qubits)) throw std::invalid_argument("state dimension mismatch");
    if (static_cast<int>(s.axes.size()) != s.n_qubits) throw std::invalid_argument("one axis list per party");
    double nrm = 0;
    for (auto a : s.state) nrm += std::norm(a);
    if (std::abs(nrm - 1.0) > 1e-12) throw std::invalid_argument("state is not normalized");
    for (const auto& per : s.axes) {
        if (per.empty()) throw std::invalid_argument("party without settings");
        for (const auto& ax : per)
            if (std::abs(norm(ax) - 1.0) > 1e-12) throw std::invalid_argument("Bloch axis is not a unit vector");
    }
}

std::array<std::complex<double>, 4> measurement_basis(const Vec3& n) {
    double th = std::acos(std::clamp(n[2], -1.0, 1.0));
    double ph = std::atan2(n[1], n[0]);
    std::complex<double> e = std::polar(1.0, ph);
    double c = std::cos(th / 2), s = std::sin(th / 2);
    // |+n> = (c, e s), |-n> = (s, -e c); rows are the conjugated kets
    return {c, std::conj(e) * s, s, -std::conj(e) * c};
}

BehaviorTable born_rule(const QuantumSetup& setup) {
    validate(setup);
    int n = setup.n_qubits;
    std::vector<int> S(n), O(n, 2);
    for (int k = 0; k < n; ++k) S[k] = static_cast<int>(setup.axes[k].size());
    BehaviorTable P(S, O, false);
    size_t dim = setup.state.size();
    std::vector<std::complex<double>> psi(dim);
    for (size_t si = 0; si < P.setting_tuples(); ++si) {
        auto s = P.setting_tuple(si);
        psi = setup.state;
        for (int k = 0; k < n; ++k) {
            auto U = measurement_basis(setup.axes[k][s[k]]);
            size_t stride = size_t(1) << (n - 1 - k);
            for (size_t i = 0; i < dim; ++i) {
                if (i & stride) continue;
                auto a0 = psi[i], a1 = psi[i | stride];
                psi[i] = U[0] * a0 + U[1] * a1;
                psi[i | stride] = U[2] * a0 + U[3] * a1;
            }
        }
        // basis index bits coincide with the outcome tuple (party 0 most significant)
        for (size_t oi = 0; oi < dim; ++oi) P.set(si * dim + oi, std::norm(psi[oi]));
    }
    return P;
}

namespace {

void check_scope(const BellExpression& e, int n_parties) {
    for (const auto& sc : e.scope)
        for (int k : sc)
            if (k < 0 || k >= n_parties) throw ScopeError("expression scope exceeds the table's parties");
    for (const auto& t : e.terms)
        if (t.scope < 0 || t.scope >= static_cast<int>(e.scope.size()))
            throw ScopeError("term refers to a missing scope entry");
}

std::vector<BehaviorTable> scope_marginals(const BellExpression& e, const BehaviorTable& P) {
    check_scope(e, P.n_parties());
    std::vector<BehaviorTable> out;
    for (const auto& sc : e.scope) out.push_back(marginalize(P, sc));
    return out;
}

size_t term_index(const BellTerm& t, const BehaviorTable& M) {
    if (t.outcomes.size() != static_cast<size_t>(M.n_parties()) || t.settings.size() != t.outcomes.size())
        throw ScopeError("term arity does not match its scope");
    try {
        return M.index(t.outcomes, t.settings);
    } catch (const std::out_of_range&) {
        throw ScopeError("term outcome/setting outside the table");
    }
}

} // namespace

double evaluate_on_marginals(const BellExpression& e, const std::vector<BehaviorTable>& tables) {
    if (tables.size() != e.scope.size()) throw ScopeError("one table per scope entry expected");
    double v = 0;
    for (const auto& t : e.terms) v += t.coef.get_d() * tables[t.scope].p(term_index(t, tables[t.scope]));
    return v;
}

mpq_class evaluate_on_marginals_exact(const BellExpression& e, const std::vector<BehaviorTable>& tables) {
    if (tables.size() != e.scope.size()) throw ScopeError("one table per scope entry expected");
    mpq_class v = 0;
    for (const auto& t : e.terms) v += t.coef * tables[t.scope].q(term_index(t, tables[t.scope]));
    return v;
}

double evaluate_bell_expression(const BellExpression& e, const BehaviorTable& P) {
    return evaluate_on_marginals(e, scope_marginals(e, P));
}

mpq_class evaluate_bell_expression_exact(const BellExpression& e, const BehaviorTable& P) {
    return evaluate_on_marginals_exact(e, scope_marginals(e, P));
}

BellExpression chsh_expression(int a, int b) {
    BellExpression e;
    e.scope = {{a, b}};
    e.bound = 2;
    e.normalization = "chsh";
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int oa = 0; oa < 2; ++oa)
                for (int ob = 0; ob < 2; ++ob) {
                    int sign = ((x & y) ? -1 : 1) * ((oa ^ ob) ? -1 : 1);
                    e.terms.push_back({0, {oa, ob}, {x, y}, mpq_class(sign)});
                }
    return e;
}

Rationalized rationalize_entrywise(const BehaviorTable& P, long den) {
    Rationalized r{BehaviorTable(P.settings(), P.outcomes(), true), 0.0};
    size_t no = P.outcome_tuples();
    for (size_t si = 0; si < P.setting_tuples(); ++si) {
        mpq_class sum = 0;
        size_t big = si * no;
        for (size_t oi = 0; oi < no; ++oi) {
            size_t i = si * no + oi;
            mpq_class q = round_to_grid(std::max(0.0, P.p(i)), den);
            r.table.set(i, q);
            sum += q;
            if (P.p(i) > P.p(big)) big = i;
        }
        mpq_class fixed = r.table.q(big) + (1 - sum);
        if (fixed < 0) throw std::runtime_error("cannot repair normalization");
        r.table.set(big, fixed);
    }
    for (size_t i = 0; i < P.size(); ++i) r.l1_error += std::abs(r.table.q(i).get_d() - P.p(i));
    return r;
}

BehaviorTable to_exact(const BehaviorTable& P) {
    if (P.exact()) return P;
    BehaviorTable E(P.settings(), P.outcomes(), true);
    for (size_t i = 0; i < P.size(); ++i) E.set(i, mpq_class(P.p(i)));
    return E;
}

std::vector<double> correlators(const BehaviorTable& P, unsigned mask, bool average_others) {
    int n = P.n_parties();
    for (int k = 0; k < n; ++k)
        if (P.outcomes()[k] != 2) throw std::invalid_argument("correlators need binary outcomes");
    std::vector<int> sub;
    for (int k = 0; k < n; ++k)
        if (mask & (1u << (n - 1 - k))) sub.push_back(k);
    size_t count = 1;
    for (int k : sub) count *= P.settings()[k];
    std::vector<double> E(count, 0.0), W(count, 0.0);
    for (size_t si = 0; si < P.setting_tuples(); ++si) {
        auto s = P.setting_tuple(si);
        bool others_zero = true;
        size_t ci = 0;
        for (int k = 0; k < n; ++k) {
            bool in = mask & (1u << (n - 1 - k));
            if (!in && s[k] != 0) others_zero = false;
        }
        if (!average_others && !others_zero) continue;
        for (int k : sub) ci = ci * P.settings()[k] + s[k];
        for (size_t oi = 0; oi < P.outcome_tuples(); ++oi) {
            unsigned parity = __builtin_popcount(static_cast<unsigned>(oi) & mask) & 1u;
            E[ci] += (parity ? -1.0 : 1.0) * P.p(si * P.outcome_tuples() + oi);
        }
        W[ci] += 1.0;
    }
    for (size_t i = 0; i < count; ++i) E[i] /= W[i];
    return E;
}

namespace {

std::vector<std::string> split_bar(const std::string& line) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : line) {
        if (ch == '|') {
            parts.push_back(cur);
            cur.clear();
        } else cur += ch;
    }
    parts.push_back(cur);
    return parts;
}

std::vector<int> ints(const std::string& s) {
    std::istringstream is(s);
    std::vector<int> v;
    int x;
    while (is >> x) v.push_back(x);
    return v;
}

bool content_line(std::istream& is, std::string& line) {
    while (std::getline(is, line)) {
        auto h = line.find('#');
        if (h != std::string::npos) line = line.substr(0, h);
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
}

std::string fmt_double(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    return in;
}

} // namespace

void write_table(std::ostream& os, const BehaviorTable& P) {
    os << "behavior\nparties " << P.n_parties() << "\nsettings";
    for (int s : P.settings()) os << ' ' << s;
    os << "\noutcomes";
    for (int o : P.outcomes()) os << ' ' << o;
    os << "\nexact " << (P.exact() ? 1 : 0) << "\n# settings | outcomes | probability\n";
    for (size_t si = 0; si < P.setting_tuples(); ++si) {
        auto s = P.setting_tuple(si);
        for (size_t oi = 0; oi < P.outcome_tuples(); ++oi) {
            auto o = P.outcome_tuple(oi);
            size_t i = si * P.outcome_tuples() + oi;
            for (int x : s) os << x << ' ';
            os << "|";
            for (int x : o) os << ' ' << x;
            os << " | " << (P.exact() ? to_string(P.q(i)) : fmt_double(P.p(i))) << '\n';
        }
    }
}

BehaviorTable read_table(std::istream& is) {
    std::string line;
    if (!content_line(is, line) || line.find("behavior") == std::string::npos)
        throw FormatError("missing 'behavior' header");
    std::map<std::string, std::string> head;
    for (int i = 0; i < 4; ++i) {
        if (!content_line(is, line)) throw FormatError("truncated header");
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        std::string rest;
        std::getline(ls, rest);
        head[key] = rest;
    }
    auto S = ints(head["settings"]), O = ints(head["outcomes"]);
    int n = ints(head["parties"]).empty() ? -1 : ints(head["parties"])[0];
    if (n < 1 || static_cast<int>(S.size()) != n || static_cast<int>(O.size()) != n)
        throw FormatError("inconsistent table header");
    bool exact = !ints(head["exact"]).empty() && ints(head["exact"])[0] == 1;
    BehaviorTable P(S, O, exact);
    std::vector<bool> seen(P.size(), false);
    while (content_line(is, line)) {
        auto parts = split_bar(line);
        if (parts.size() != 3) throw FormatError("bad row: " + line);
        auto s = ints(parts[0]), o = ints(parts[1]);
        if (static_cast<int>(s.size()) != n || static_cast<int>(o.size()) != n) throw FormatError("bad row: " + line);
        size_t i;
        try {
            i = P.index(o, s);
        } catch (const std::out_of_range&) {
            throw FormatError("row out of range: " + line);
        }
        std::string val = parts[2];
        val.erase(std::remove_if(val.begin(), val.end(), ::isspace), val.end());
        if (exact) P.set(i, parse_rational(val));
        else P.set(i, std::stod(val));
        seen[i] = true;
    }
    return P;
}

BehaviorTable load_table(const std::string& path) {
    auto in = open_in(path);
    return read_table(in);
}

void save_table(const std::string& path, const BehaviorTable& P) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path);
    write_table(out, P);
}

void write_setup(std::ostream& os, const QuantumSetup& s) {
    os << "setup\nqubits " << s.n_qubits << '\n';
    for (size_t i = 0; i < s.state.size(); ++i)
        os << "amp " << i << ' ' << fmt_double(s.state[i].real()) << ' ' << fmt_double(s.state[i].imag()) << '\n';
    for (size_t k = 0; k < s.axes.size(); ++k)
        for (size_t j = 0; j < s.axes[k].size(); ++j)
            os << "axis " << k << ' ' << j << ' ' << fmt_double(s.axes[k][j][0]) << ' ' << fmt_double(s.axes[k][j][1])
               << ' ' << fmt_double(s.axes[k][j][2]) << '\n';
}

QuantumSetup read_setup(std::istream& is) {
    std::string line;
    if (!content_line(is, line) || line.find("setup") == std::string::npos) throw FormatError("missing 'setup' header");
    QuantumSetup s;
    while (content_line(is, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "qubits") {
            ls >> s.n_qubits;
            if (s.n_qubits < 1 || s.n_qubits > 20) throw FormatError("bad qubit count");
            s.state.assign(size_t(1) << s.n_qubits, 0.0);
            s.axes.assign(s.n_qubits, {});
        } else if (key == "amp") {
            size_t i;
            std::string re, im;
            ls >> i >> re >> im;
            if (!ls || i >= s.state.size()) throw FormatError("bad amplitude: " + line);
            s.state[i] = {std::stod(re), std::stod(im)};
        } else if (key == "axis") {
            size_t k, j;
            std::string x, y, z;
            ls >> k >> j >> x >> y >> z;
            if (!ls || k >= s.axes.size()) throw FormatError("bad axis: " + line);
            if (s.axes[k].size() <= j) s.axes[k].resize(j + 1);
            s.axes[k][j] = {std::stod(x), std::stod(y), std::stod(z)};
        } else throw FormatError("unknown key " + key);
    }
    validate(s);
    return s;
}

QuantumSetup load_setup(const std::string& path) {
    auto in = open_in(path);
    return read_setup(in);
}

void write_expression(std::ostream& os, const BellExpression& e) {
    os << "expression\nnormalization " << e.normalization << "\nbound " << to_string(e.bound) << '\n';
    for (const auto& sc : e.scope) {
        os << "scope";
        for (int k : sc) os << ' ' << k;
        os << '\n';
    }
    for (const auto& t : e.terms) {
        os << "term " << t.scope << " |";
        for (int o : t.outcomes) os << ' ' << o;
        os << " |";
        for (int s : t.settings) os << ' ' << s;
        os << " | " << to_string(t.coef) << '\n';
    }
}

BellExpression read_expression(std::istream& is) {
    std::string line;
    if (!content_line(is, line) || line.find("expression") == std::string::npos)
        throw FormatError("missing 'expression' header");
    BellExpression e;
    while (content_line(is, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        std::string rest;
        std::getline(ls, rest);
        if (key == "normalization") {
            std::istringstream rs(rest);
            rs >> e.normalization;
        } else if (key == "bound") e.bound = parse_rational(rest);
        else if (key == "scope") e.scope.push_back(ints(rest));
        else if (key == "term") {
            auto parts = split_bar(rest);
            if (parts.size() != 4) throw FormatError("bad term: " + line);
            auto sc = ints(parts[0]);
            if (sc.size() != 1) throw FormatError("bad term scope: " + line);
            e.terms.push_back({sc[0], ints(parts[1]), ints(parts[2]), parse_rational(parts[3])});
        } else throw FormatError("unknown key " + key);
    }
    return e;
}

BellExpression load_expression(const std::string& path) {
    auto in = open_in(path);
    return read_expression(in);
}

} // namespace hinf
