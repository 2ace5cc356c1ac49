#pragma once

#include "beamgraph/scenario.hpp"

namespace beamgraph {

// A potential beam at one gNB. Angles are degrees in the global frame:
// 0 deg along +x, counter-clockwise positive.
struct BeamCandidate {
    int gnb_id = 0;
    double direction = 0.0;  // [0, 360)
    double width = 0.0;      // half-power beamwidth, > 0

    friend bool operator==(const BeamCandidate&, const BeamCandidate&) = default;
};

// Maps any finite angle into [0, 360).
double normalize_angle(double deg);

// Shortest angular separation, in [0, 180].
double circular_distance(double a, double b);

// Bearing from the gNB to `target`. Throws GeometryError for coincident points.
double angle_of_departure(const GnbSite& gnb, Vec2 target);

bool covers(const BeamCandidate& beam, double theta);

// Same-gNB beams whose main lobes overlap. Touching beams are allowed.
bool conflicts(const BeamCandidate& a, const BeamCandidate& b);

}  // namespace beamgraph
