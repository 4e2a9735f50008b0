#pragma once

// Exact geometric predicates. A floating-point evaluation is accepted when it
// clears a forward error bound; otherwise the sign is recomputed in rational
// arithmetic. All functions return -1, 0 or +1.

namespace geowalk::predicates {

/// Sign of the orientation determinant of (a, b, c): +1 counterclockwise.
int orient2d(const double* a, const double* b, const double* c);

/// +1 if d lies strictly inside the circle through a, b, c (given in
/// counterclockwise order), 0 if cocircular, -1 outside.
int incircle(const double* a, const double* b, const double* c, const double* d);

/// Sign of (p - x).(p - y); negative iff p lies strictly inside the ball with
/// diameter [x, y].
int diametral(const double* x, const double* y, const double* p, int dim);

/// Sign of |a - b|^2 - |c - e|^2.
int compare_sq_dist(const double* a, const double* b, const double* c, const double* e, int dim);

/// Sign of |a - b|^2 - r2 where r2 is an exact double.
int compare_sq_dist_value(const double* a, const double* b, double r2, int dim);

}  // namespace geowalk::predicates
