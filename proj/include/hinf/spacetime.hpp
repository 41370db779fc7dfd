#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hinf {

using Vec3 = std::array<double, 3>;

Vec3 operator+(const Vec3& a, const Vec3& b);
Vec3 operator-(const Vec3& a, const Vec3& b);
Vec3 operator*(double s, const Vec3& a);
double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);
Vec3 cross(const Vec3& a, const Vec3& b);

struct Event {
    std::string label;
    Vec3 position{0.0, 0.0, 0.0};
    double time = 0.0;
};

struct FrameVelocity {
    Vec3 velocity{0.0, 0.0, 0.0};
};

class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Relative slack applied to inclusive boundaries (lightcones, simultaneity).
struct Tolerance {
    double rel = 1e-12;
};

enum class TimeOrder { Past, Simultaneous, Future };
std::string to_string(TimeOrder o);

bool in_future_lightcone(const Event& candidate, const Event& apex, double c, Tolerance tol = {});

// sign of the boosted time of `other` relative to `reference` in the frame moving at u
TimeOrder frame_time_order(const Event& reference, const Event& other, const FrameVelocity& u,
                           double c, Tolerance tol = {});

struct WitnessQuery {
    std::vector<Event> included;
    std::vector<Event> excluded;
    std::optional<std::pair<Event, Event>> equidistant_pair;
    double c = 1.0;
};

struct WitnessOptions {
    int coarse = 161;        // grid points per axis, first pass
    int fine = 41;           // grid points per axis, zoom passes
    double coord_tol = 1e-9; // stop zooming below this half-width
    double strict = 1e-12;   // required gap to the excluded cones (relative)
    int max_domain_growth = 3;
};

// Unbounded or degenerate search domain; distinct from "no witness".
class WitnessDomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Earliest point inside every included cone and strictly outside every excluded cone.
std::optional<Event> find_witness_point(const WitnessQuery& q, const WitnessOptions& opt = {});

// Infimum of |P - from| over the witness region (the region is open, the value is its boundary).
std::optional<double> min_witness_distance(const WitnessQuery& q, const Vec3& from,
                                           const WitnessOptions& opt = {});

// True iff p is a witness location for q (an event at p exists at some time).
bool is_witness_location(const WitnessQuery& q, const Vec3& p, double strict = 1e-12);

double witness_bound_fig2(double d, double eps, double c);
double witness_bound_fig3(double d, double v, double c);

} // namespace hinf
