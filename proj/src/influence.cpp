#include "hinf/influence.hpp"

#include <cmath>
#include <deque>
#include <sstream>

namespace hinf {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

const FrameVelocity& velocity_of(const MultiSim& m, const std::string& label) {
    auto it = m.device_velocities.find(label);
    if (it == m.device_velocities.end()) throw DomainError("no device velocity for party " + label);
    return it->second;
}

} // namespace

std::string describe(const ModelSpec& m) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const VCausal& v) { os << "v-causal(v=" << v.v << ")"; },
                   [&](const FiniteDistance& f) { os << "finite-distance(d=" << f.d << ")"; },
                   [&](const MultiSim& s) {
                       os << (s.kind == MultiSimKind::PastDependent ? "multisim-past" : "multisim-future");
                   },
               },
               m.variant);
    return os.str();
}

void validate(const ModelSpec& m, double c) {
    std::visit(overloaded{
                   [&](const VCausal& v) {
                       if (!(v.v > 0) || !std::isfinite(v.v)) throw DomainError("v-causal speed must be finite and positive");
                   },
                   [&](const FiniteDistance& f) {
                       if (!(f.d > 0) || !std::isfinite(f.d)) throw DomainError("critical distance must be positive");
                   },
                   [&](const MultiSim& s) {
                       for (const auto& [label, u] : s.device_velocities)
                           if (!(norm(u.velocity) < c)) throw DomainError("device speed of " + label + " must be below c");
                   },
               },
               m.variant);
}

bool InfluenceGraph::reaches(const std::string& from, const std::string& to) const {
    std::set<std::string> seen{from};
    std::deque<std::string> queue{from};
    while (!queue.empty()) {
        auto cur = queue.front();
        queue.pop_front();
        for (auto it = edges.lower_bound({cur, std::string()}); it != edges.end() && it->first == cur; ++it) {
            if (it->second == to) return true;
            if (seen.insert(it->second).second) queue.push_back(it->second);
        }
    }
    return false;
}

bool can_influence(const ModelSpec& model, const Event& source, const Event& target, double c, Tolerance tol) {
    double dt = target.time - source.time;
    double dx = norm(target.position - source.position);
    double tscale = std::abs(source.time) + std::abs(target.time) + std::abs(dt);
    return std::visit(overloaded{
                          [&](const VCausal& m) {
                              if (dt < -tol.rel * tscale) return false;
                              double slack = tol.rel * (dx + m.v * tscale);
                              return dx <= m.v * dt + slack;
                          },
                          [&](const FiniteDistance& m) {
                              if (dt < -tol.rel * tscale) return false;
                              return dx <= m.d * (1.0 + tol.rel);
                          },
                          [&](const MultiSim& m) {
                              if (m.kind == MultiSimKind::PastDependent)
                                  return frame_time_order(target, source, velocity_of(m, target.label), c, tol) ==
                                         TimeOrder::Past;
                              return frame_time_order(source, target, velocity_of(m, source.label), c, tol) ==
                                     TimeOrder::Future;
                          },
                      },
                      model.variant);
}

InfluenceGraph influence_graph(const ModelSpec& model, const std::vector<Event>& events, double c, Tolerance tol) {
    InfluenceGraph g;
    std::set<std::string> labels;
    for (const auto& e : events) {
        if (!labels.insert(e.label).second) throw DomainError("duplicate event label " + e.label);
        g.nodes.push_back(e.label);
    }
    for (const auto& s : events)
        for (const auto& t : events)
            if (&s != &t && can_influence(model, s, t, c, tol)) g.edges.insert({s.label, t.label});
    return g;
}

bool pair_disconnected(const InfluenceGraph& g, const std::string& p, const std::string& q) {
    return !g.reaches(p, q) && !g.reaches(q, p);
}

bool locality_condition_applies(const ModelSpec& model, const std::vector<Event>& events,
                                const std::pair<std::string, std::string>& pair, double c, Tolerance tol) {
    find_event(events, pair.first);
    find_event(events, pair.second);
    return pair_disconnected(influence_graph(model, events, c, tol), pair.first, pair.second);
}

std::vector<Event> postpone(const std::vector<Event>& events, const std::string& party, double delay) {
    if (delay < 0) throw DomainError("delay must be non-negative");
    find_event(events, party);
    auto out = events;
    for (auto& e : out)
        if (e.label == party) e.time += delay;
    return out;
}

const Event& find_event(const std::vector<Event>& events, const std::string& label) {
    for (const auto& e : events)
        if (e.label == label) return e;
    throw DomainError("unknown party " + label);
}

} // namespace hinf
