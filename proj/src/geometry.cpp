#include "beamgraph/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "beamgraph/errors.hpp"

namespace beamgraph {

double normalize_angle(double deg) {
    double r = std::fmod(deg, 360.0);
    if (r < 0.0) {
        r += 360.0;
    }
    // fmod of a tiny negative value can round up to exactly 360.
    return r >= 360.0 ? 0.0 : r;
}

double circular_distance(double a, double b) {
    const double d = std::fmod(std::abs(normalize_angle(a) - normalize_angle(b)), 360.0);
    return std::min(d, 360.0 - d);
}

double angle_of_departure(const GnbSite& gnb, Vec2 target) {
    const double dx = target.x - gnb.position.x;
    const double dy = target.y - gnb.position.y;
    if (dx == 0.0 && dy == 0.0) {
        throw GeometryError("angle of departure undefined: target coincides with gNB " + std::to_string(gnb.id));
    }
    return normalize_angle(std::atan2(dy, dx) * 180.0 / std::numbers::pi);
}

bool covers(const BeamCandidate& beam, double theta) {
    return circular_distance(theta, beam.direction) <= beam.width / 2.0;
}

bool conflicts(const BeamCandidate& a, const BeamCandidate& b) {
    return a.gnb_id == b.gnb_id && circular_distance(a.direction, b.direction) < (a.width + b.width) / 2.0;
}

}  // namespace beamgraph
