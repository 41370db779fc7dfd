#include "hinf/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace hinf {

Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

std::string to_string(TimeOrder o) {
    switch (o) {
    case TimeOrder::Past: return "past";
    case TimeOrder::Simultaneous: return "simultaneous";
    case TimeOrder::Future: return "future";
    }
    return "?";
}

namespace {

bool finite(const Event& e) {
    return std::isfinite(e.time) && std::isfinite(e.position[0]) && std::isfinite(e.position[1]) &&
           std::isfinite(e.position[2]);
}

} // namespace

bool in_future_lightcone(const Event& candidate, const Event& apex, double c, Tolerance tol) {
    if (!(c > 0)) throw DomainError("c must be positive");
    double dt = candidate.time - apex.time;
    double dx = norm(candidate.position - apex.position);
    double slack = tol.rel * (std::abs(c * dt) + dx + std::abs(c * candidate.time) + std::abs(c * apex.time));
    if (c * dt < -slack) return false;
    return dx <= c * dt + slack;
}

TimeOrder frame_time_order(const Event& reference, const Event& other, const FrameVelocity& u, double c,
                           Tolerance tol) {
    if (!(c > 0)) throw DomainError("c must be positive");
    if (norm(u.velocity) >= c) throw DomainError("frame speed must be below c");
    Vec3 dx = other.position - reference.position;
    double dt = other.time - reference.time;
    double shift = dot(u.velocity, dx) / (c * c);
    double s = dt - shift;
    double scale = std::abs(dt) + std::abs(shift) + std::abs(other.time) + std::abs(reference.time);
    if (std::abs(s) <= tol.rel * scale) return TimeOrder::Simultaneous;
    return s < 0 ? TimeOrder::Past : TimeOrder::Future;
}

namespace {

struct Domain {
    Vec3 origin;
    std::vector<Vec3> basis;
    Vec3 at(const std::vector<double>& t) const {
        Vec3 p = origin;
        for (size_t i = 0; i < basis.size(); ++i) p = p + t[i] * basis[i];
        return p;
    }
};

double arrival(const Vec3& p, const Event& e, double c) { return e.time + norm(p - e.position) / c; }

struct Geometry {
    const WitnessQuery& q;
    double strict;

    double latest_included(const Vec3& p) const {
        double t = -std::numeric_limits<double>::infinity();
        for (const auto& e : q.included) t = std::max(t, arrival(p, e, q.c));
        return t;
    }
    double earliest_excluded(const Vec3& p) const {
        double t = std::numeric_limits<double>::infinity();
        for (const auto& e : q.excluded) t = std::min(t, arrival(p, e, q.c));
        return t;
    }
    bool feasible(const Vec3& p) const {
        if (q.excluded.empty()) return true;
        double a = latest_included(p), b = earliest_excluded(p);
        return b - a > strict * (1.0 + std::abs(a) + std::abs(b));
    }
};

Domain make_domain(const WitnessQuery& q) {
    Domain dom;
    if (q.equidistant_pair) {
        const auto& [p1, p2] = *q.equidistant_pair;
        Vec3 n = p2.position - p1.position;
        double len = norm(n);
        if (!(len > 0)) throw WitnessDomainError("equidistant pair is coincident in space");
        n = (1.0 / len) * n;
        dom.origin = 0.5 * (p1.position + p2.position);
        // coordinate axis least aligned with the normal, projected into the plane
        int k = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(n[i]) < std::abs(n[k])) k = i;
        Vec3 ax{0, 0, 0};
        ax[k] = 1.0;
        Vec3 e1 = ax - dot(ax, n) * n;
        e1 = (1.0 / norm(e1)) * e1;
        Vec3 e2 = cross(n, e1);
        // prefer e1 spanning the scenario plane (z = 0) when the normal lies in it
        if (std::abs(n[2]) < 1e-15) {
            e1 = cross({0, 0, 1}, n);
            e1 = (1.0 / norm(e1)) * e1;
            e2 = {0, 0, 1};
        }
        dom.basis = {e1, e2};
    } else {
        Vec3 o{0, 0, 0};
        for (const auto& e : q.included) o = o + e.position;
        dom.origin = (1.0 / q.included.size()) * o;
        dom.basis = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    }
    return dom;
}

double domain_radius(const WitnessQuery& q, const Domain& dom) {
    double spread = 0, tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
    auto visit = [&](const Event& e) {
        spread = std::max(spread, norm(e.position - dom.origin));
        tmin = std::min(tmin, e.time);
        tmax = std::max(tmax, e.time);
    };
    for (const auto& e : q.included) visit(e);
    for (const auto& e : q.excluded) visit(e);
    double r = 2.0 * (spread + q.c * (tmax - tmin));
    return r > 0 ? r : 1.0;
}

void validate(const WitnessQuery& q) {
    if (q.included.empty()) throw DomainError("witness search needs at least one included event");
    if (!(q.c > 0) || !std::isfinite(q.c)) throw WitnessDomainError("c must be positive and finite");
    for (const auto& e : q.included)
        if (!finite(e)) throw WitnessDomainError("non-finite event " + e.label);
    for (const auto& e : q.excluded)
        if (!finite(e)) throw WitnessDomainError("non-finite event " + e.label);
}

struct Best {
    bool found = false;
    std::vector<double> t;
    double obj = 0, tie = 0;
};

using Objective = std::function<std::pair<double, double>(const Vec3&)>;

bool better(double o, double t, const Best& b) {
    if (!b.found) return true;
    double eps = 1e-12 * (1.0 + std::abs(o) + std::abs(b.obj));
    if (o < b.obj - eps) return true;
    if (o > b.obj + eps) return false;
    return t < b.tie;
}

void scan(const Domain& dom, const Geometry& g, const Objective& f, const std::vector<double>& centre,
          double half, int n, Best& best) {
    size_t dim = dom.basis.size();
    std::vector<int> idx(dim, 0);
    std::vector<double> t(dim);
    double step = n > 1 ? 2.0 * half / (n - 1) : 0.0;
    while (true) {
        for (size_t i = 0; i < dim; ++i) t[i] = centre[i] - half + step * idx[i];
        Vec3 p = dom.at(t);
        if (g.feasible(p)) {
            auto [o, tie] = f(p);
            if (better(o, tie, best)) best = {true, t, o, tie};
        }
        size_t k = 0;
        while (k < dim && ++idx[k] == n) idx[k++] = 0;
        if (k == dim) break;
    }
}

std::vector<double> coords_of(const Domain& dom, const Vec3& p) {
    std::vector<double> t(dom.basis.size());
    for (size_t i = 0; i < t.size(); ++i) t[i] = dot(p - dom.origin, dom.basis[i]);
    return t;
}

Best minimise(const WitnessQuery& q, const WitnessOptions& opt, const Objective& f, double& radius_out,
              const Domain& dom) {
    Geometry g{q, opt.strict};
    double radius = domain_radius(q, dom);
    size_t dim = dom.basis.size();
    int coarse = dim == 2 ? opt.coarse : std::max(11, opt.coarse / 4);
    int fine = dim == 2 ? opt.fine : std::max(9, opt.fine / 3);
    Best best;
    for (int grow = 0; grow <= opt.max_domain_growth && !best.found; ++grow) {
        scan(dom, g, f, std::vector<double>(dim, 0.0), radius, coarse, best);
        if (!best.found) radius *= 4;
    }
    radius_out = radius;
    // event positions lying in the domain are exact candidates
    for (const auto& e : q.included) {
        auto t = coords_of(dom, e.position);
        if (norm(dom.at(t) - e.position) > 1e-12 * (1 + norm(e.position))) continue;
        if (!g.feasible(e.position)) continue;
        auto [o, tie] = f(e.position);
        if (better(o, tie, best)) best = {true, t, o, tie};
    }
    if (!best.found) return best;
    double half = 2.0 * radius / (coarse - 1) * 2.0;
    while (half > opt.coord_tol) {
        std::vector<double> centre = best.t;
        scan(dom, g, f, centre, half, fine, best);
        half /= 4.0;
    }
    for (double ti : best.t)
        if (std::abs(ti) > radius * (1 - 1e-9))
            throw WitnessDomainError("witness region reaches the edge of the search domain");
    return best;
}

} // namespace

bool is_witness_location(const WitnessQuery& q, const Vec3& p, double strict) {
    Geometry g{q, strict};
    return g.feasible(p);
}

std::optional<Event> find_witness_point(const WitnessQuery& q, const WitnessOptions& opt) {
    validate(q);
    if (q.included.size() == 1 && q.excluded.empty() && !q.equidistant_pair) {
        Event e = q.included.front();
        return e;
    }
    Domain dom = make_domain(q);
    Geometry g{q, opt.strict};
    Vec3 centroid{0, 0, 0};
    const auto& ref = q.excluded.empty() ? q.included : q.excluded;
    for (const auto& e : ref) centroid = centroid + e.position;
    centroid = (1.0 / ref.size()) * centroid;
    Objective f = [&](const Vec3& p) { return std::make_pair(g.latest_included(p), norm(p - centroid)); };
    double radius = 0;
    Best b = minimise(q, opt, f, radius, dom);
    if (!b.found) return std::nullopt;
    Event w;
    w.label = "witness";
    w.position = dom.at(b.t);
    w.time = g.latest_included(w.position);
    return w;
}

std::optional<double> min_witness_distance(const WitnessQuery& q, const Vec3& from, const WitnessOptions& opt) {
    validate(q);
    Domain dom = make_domain(q);
    Geometry g{q, 0.0};
    Vec3 base = dom.at(coords_of(dom, from));
    double offset2 = dot(from - base, from - base);
    Objective f = [&](const Vec3& p) { return std::make_pair(norm(p - from), 0.0); };
    double radius = 0;
    Best b = minimise(q, opt, f, radius, dom);
    if (!b.found) return std::nullopt;
    Vec3 p = dom.at(b.t);
    if (g.feasible(base)) return std::sqrt(offset2);
    // the region is open; bisect the in-plane ray from the foot point to its boundary
    Vec3 dir = p - base;
    double hi = norm(dir);
    dir = (1.0 / hi) * dir;
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
        double mid = 0.5 * (lo + hi);
        if (g.feasible(base + mid * dir)) hi = mid;
        else lo = mid;
    }
    return std::sqrt(offset2 + hi * hi);
}

double witness_bound_fig2(double d, double eps, double c) {
    if (!(c > 0)) throw DomainError("c must be positive");
    if (eps < 0) throw DomainError("eps must be non-negative");
    if (!(d > 4 * eps * c)) throw DomainError("requires d > 4 eps c");
    double ec = eps * c;
    return 2 * ec * (d - ec) / (d - 4 * ec);
}

double witness_bound_fig3(double d, double v, double c) {
    if (!(c > 0)) throw DomainError("c must be positive");
    if (v < 0) throw DomainError("v must be non-negative");
    const double r3 = std::sqrt(3.0);
    if (!(v < c / r3)) throw DomainError("requires v < c / sqrt(3)");
    return d * v * (4 * r3 * c - 3 * v) / (4 * c * (c - r3 * v));
}

} // namespace hinf
