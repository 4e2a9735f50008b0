#include "geowalk/predicates.hpp"

#include <gmpxx.h>

#include <cmath>
#include <limits>

namespace geowalk::predicates {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon() * 0.5;
constexpr double kCcwBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIccBound = (10.0 + 96.0 * kEps) * kEps;

int sign(double v) { return (v > 0.0) - (v < 0.0); }
int sign(const mpq_class& v) { return sgn(v); }

double dot_bound(int dim) { return (2.0 * dim + 8.0) * kEps; }

}  // namespace

int orient2d(const double* a, const double* b, const double* c) {
    const double l = (a[0] - c[0]) * (b[1] - c[1]);
    const double r = (a[1] - c[1]) * (b[0] - c[0]);
    const double det = l - r;
    const double bound = kCcwBound * (std::fabs(l) + std::fabs(r));
    if (det > bound || -det > bound) return sign(det);
    const mpq_class ax(a[0]), ay(a[1]), bx(b[0]), by(b[1]), cx(c[0]), cy(c[1]);
    return sign(mpq_class((ax - cx) * (by - cy) - (ay - cy) * (bx - cx)));
}

int incircle(const double* a, const double* b, const double* c, const double* d) {
    const double adx = a[0] - d[0], ady = a[1] - d[1];
    const double bdx = b[0] - d[0], bdy = b[1] - d[1];
    const double cdx = c[0] - d[0], cdy = c[1] - d[1];

    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const double alift = adx * adx + ady * ady;
    const double cdxady = cdx * ady, adxcdy = adx * cdy;
    const double blift = bdx * bdx + bdy * bdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady;
    const double clift = cdx * cdx + cdy * cdy;

    const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    const double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift +
                             (std::fabs(cdxady) + std::fabs(adxcdy)) * blift +
                             (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
    const double bound = kIccBound * permanent;
    if (det > bound || -det > bound) return sign(det);

    const mpq_class qdx(d[0]), qdy(d[1]);
    const mpq_class ax = mpq_class(a[0]) - qdx, ay = mpq_class(a[1]) - qdy;
    const mpq_class bx = mpq_class(b[0]) - qdx, by = mpq_class(b[1]) - qdy;
    const mpq_class cx = mpq_class(c[0]) - qdx, cy = mpq_class(c[1]) - qdy;
    const mpq_class al = ax * ax + ay * ay, bl = bx * bx + by * by, cl = cx * cx + cy * cy;
    return sign(mpq_class(al * (bx * cy - cx * by) + bl * (cx * ay - ax * cy) + cl * (ax * by - bx * ay)));
}

int diametral(const double* x, const double* y, const double* p, int dim) {
    double s = 0.0, mag = 0.0;
    for (int k = 0; k < dim; ++k) {
        const double t = (p[k] - x[k]) * (p[k] - y[k]);
        s += t;
        mag += std::fabs(t);
    }
    const double bound = dot_bound(dim) * mag;
    if (s > bound || -s > bound) return sign(s);
    mpq_class acc(0);
    for (int k = 0; k < dim; ++k) acc += (mpq_class(p[k]) - x[k]) * (mpq_class(p[k]) - y[k]);
    return sign(acc);
}

int compare_sq_dist(const double* a, const double* b, const double* c, const double* e, int dim) {
    double s1 = 0.0, s2 = 0.0;
    for (int k = 0; k < dim; ++k) {
        const double u = a[k] - b[k];
        const double v = c[k] - e[k];
        s1 += u * u;
        s2 += v * v;
    }
    const double diff = s1 - s2;
    const double bound = dot_bound(dim) * (s1 + s2);
    if (diff > bound || -diff > bound) return sign(diff);
    mpq_class acc(0);
    for (int k = 0; k < dim; ++k) {
        const mpq_class u = mpq_class(a[k]) - b[k];
        const mpq_class v = mpq_class(c[k]) - e[k];
        acc += u * u - v * v;
    }
    return sign(acc);
}

int compare_sq_dist_value(const double* a, const double* b, double r2, int dim) {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) {
        const double u = a[k] - b[k];
        s += u * u;
    }
    const double diff = s - r2;
    const double bound = dot_bound(dim) * (s + std::fabs(r2));
    if (diff > bound || -diff > bound) return sign(diff);
    mpq_class acc(0);
    for (int k = 0; k < dim; ++k) {
        const mpq_class u = mpq_class(a[k]) - b[k];
        acc += u * u;
    }
    return sign(mpq_class(acc - r2));
}

}  // namespace geowalk::predicates
