#pragma once

#include <string_view>

namespace ctt::testing {

// Three courses, two rooms, two days of three periods. c0 and c2 share a
// teacher; c1 sits in both curricula, so the conflict graph is a triangle.
inline constexpr std::string_view kToyInstance = R"(Name: toy
Courses: 3
Rooms: 2
Days: 2
Periods_per_day: 3
Curricula: 2
Constraints: 2

COURSES:
c0 t0 2 2 14
c1 t1 2 1 25
c2 t0 1 1 8

ROOMS:
rA	10
rB	30

CURRICULA:
q0  2 c0 c1
q1  2 c1 c2

UNAVAILABILITY_CONSTRAINTS:
c1 0 0
c2 1 2

END.
)";

// The toy instance without curricula.
inline constexpr std::string_view kPlainInstance = R"(Name: plain
Courses: 3
Rooms: 2
Days: 2
Periods_per_day: 3
Curricula: 0
Constraints: 2

COURSES:
c0 t0 2 2 14
c1 t1 2 1 25
c2 t0 1 1 8

ROOMS:
rA	10
rB	30

CURRICULA:

UNAVAILABILITY_CONSTRAINTS:
c1 0 0
c2 1 2

END.
)";

// Feasible on both. Penalties (4, 0, 3, 1) on the toy instance and
// (4, 0, 0, 1) on the plain one.
inline constexpr std::string_view kToySolution = R"(c0 rA 0 0
c0 rB 1 0
c1 rB 0 2
c1 rB 1 1
c2 rA 0 1
)";

}  // namespace ctt::testing
