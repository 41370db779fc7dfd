#pragma once

#include "hinf/spacetime.hpp"

#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace hinf {

struct VCausal {
    double v = 2.0;
};

struct FiniteDistance {
    double d = 1.0;
};

enum class MultiSimKind { PastDependent, FutureInforming };

struct MultiSim {
    MultiSimKind kind = MultiSimKind::PastDependent;
    std::map<std::string, FrameVelocity> device_velocities;
};

struct ModelSpec {
    std::variant<VCausal, FiniteDistance, MultiSim> variant;
};

std::string describe(const ModelSpec& m);
void validate(const ModelSpec& m, double c);

struct InfluenceGraph {
    std::vector<std::string> nodes;
    std::set<std::pair<std::string, std::string>> edges;

    bool has_edge(const std::string& a, const std::string& b) const { return edges.count({a, b}) > 0; }
    bool reaches(const std::string& from, const std::string& to) const;
};

bool can_influence(const ModelSpec& model, const Event& source, const Event& target, double c,
                   Tolerance tol = {});

InfluenceGraph influence_graph(const ModelSpec& model, const std::vector<Event>& events, double c,
                               Tolerance tol = {});

bool pair_disconnected(const InfluenceGraph& g, const std::string& p, const std::string& q);

bool locality_condition_applies(const ModelSpec& model, const std::vector<Event>& events,
                                const std::pair<std::string, std::string>& pair, double c, Tolerance tol = {});

std::vector<Event> postpone(const std::vector<Event>& events, const std::string& party, double delay);

const Event& find_event(const std::vector<Event>& events, const std::string& label);

} // namespace hinf
