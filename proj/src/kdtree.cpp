#include "geowalk/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "geowalk/predicates.hpp"
#include "geowalk/simd/kernels.hpp"

namespace geowalk {

KdTree::KdTree(const double* coords, std::size_t n, int dim, std::size_t leaf_size)
    : coords_(coords), dim_(dim), leaf_size_(std::max<std::size_t>(leaf_size, 1)), perm_(n) {
    std::iota(perm_.begin(), perm_.end(), std::uint32_t{0});
    if (n == 0) return;
    nodes_.reserve(2 * n / leaf_size_ + 2);
    build(0, static_cast<std::uint32_t>(n));
    soa_.resize(static_cast<std::size_t>(dim) * n);
    for (std::size_t p = 0; p < n; ++p)
        for (int k = 0; k < dim; ++k) soa_[static_cast<std::size_t>(k) * n + p] = coords[perm_[p] * static_cast<std::size_t>(dim) + k];
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({begin, end});
    const std::size_t base = bbox_.size();
    bbox_.resize(base + 2 * static_cast<std::size_t>(dim_));
    double* lo = &bbox_[base];
    double* hi = lo + dim_;
    std::fill(lo, lo + dim_, std::numeric_limits<double>::infinity());
    std::fill(hi, hi + dim_, -std::numeric_limits<double>::infinity());
    for (std::uint32_t p = begin; p < end; ++p) {
        const double* x = coords_ + perm_[p] * static_cast<std::size_t>(dim_);
        for (int k = 0; k < dim_; ++k) {
            lo[k] = std::min(lo[k], x[k]);
            hi[k] = std::max(hi[k], x[k]);
        }
    }
    if (end - begin <= leaf_size_) return id;
    int axis = 0;
    for (int k = 1; k < dim_; ++k)
        if (hi[k] - lo[k] > hi[axis] - lo[axis]) axis = k;
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         const double xa = coords_[a * static_cast<std::size_t>(dim_) + axis];
                         const double xb = coords_[b * static_cast<std::size_t>(dim_) + axis];
                         return xa < xb || (xa == xb && a < b);
                     });
    const std::int32_t l = build(begin, mid);
    const std::int32_t r = build(mid, end);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
}

double KdTree::box_sq_distance(std::int32_t node, const double* q) const {
    const double* lo = &bbox_[static_cast<std::size_t>(node) * 2 * dim_];
    const double* hi = lo + dim_;
    double s = 0.0;
    for (int k = 0; k < dim_; ++k) {
        double t = 0.0;
        if (q[k] < lo[k]) t = lo[k] - q[k];
        else if (q[k] > hi[k]) t = q[k] - hi[k];
        s += t * t;
    }
    return s;
}

void KdTree::radius_query(const double* q, double r2, std::vector<std::uint32_t>& out) const {
    if (nodes_.empty()) return;
    const auto& kern = simd::active_kernels();
    const std::size_t n = perm_.size();
    double buf[64];
    std::int32_t stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const std::int32_t id = stack[--top];
        // Slack so that the bound never prunes a point the leaf test would accept.
        if (box_sq_distance(id, q) > r2 * (1.0 + 1e-12)) continue;
        const Node& nd = nodes_[id];
        if (nd.left < 0) {
            for (std::uint32_t p = nd.begin; p < nd.end; p += 64) {
                const std::size_t m = std::min<std::size_t>(64, nd.end - p);
                kern.sq_distances(soa_.data() + p, n, m, dim_, q, buf);
                for (std::size_t j = 0; j < m; ++j)
                    if (buf[j] <= r2) out.push_back(perm_[p + j]);
            }
        } else {
            stack[top++] = nd.left;
            stack[top++] = nd.right;
        }
    }
}

void KdTree::box_query(const double* lo, const double* hi, std::vector<std::uint32_t>& out) const {
    if (nodes_.empty()) return;
    std::int32_t stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const std::int32_t id = stack[--top];
        const double* blo = &bbox_[static_cast<std::size_t>(id) * 2 * dim_];
        const double* bhi = blo + dim_;
        bool disjoint = false, inside = true;
        for (int k = 0; k < dim_; ++k) {
            if (bhi[k] < lo[k] || blo[k] > hi[k]) disjoint = true;
            if (blo[k] < lo[k] || bhi[k] > hi[k]) inside = false;
        }
        if (disjoint) continue;
        const Node& nd = nodes_[id];
        if (inside) {
            for (std::uint32_t p = nd.begin; p < nd.end; ++p) out.push_back(perm_[p]);
        } else if (nd.left < 0) {
            for (std::uint32_t p = nd.begin; p < nd.end; ++p) {
                const double* x = coords_ + perm_[p] * static_cast<std::size_t>(dim_);
                bool in = true;
                for (int k = 0; k < dim_ && in; ++k) in = x[k] >= lo[k] && x[k] <= hi[k];
                if (in) out.push_back(perm_[p]);
            }
        } else {
            stack[top++] = nd.left;
            stack[top++] = nd.right;
        }
    }
}

std::size_t KdTree::nearest(const double* q) const {
    if (nodes_.empty()) return std::numeric_limits<std::size_t>::max();
    const auto& kern = simd::active_kernels();
    const std::size_t n = perm_.size();
    double best = std::numeric_limits<double>::infinity();
    double buf[64];
    std::int32_t stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const std::int32_t id = stack[--top];
        if (box_sq_distance(id, q) > best) continue;
        const Node& nd = nodes_[id];
        if (nd.left < 0) {
            for (std::uint32_t p = nd.begin; p < nd.end; p += 64) {
                const std::size_t m = std::min<std::size_t>(64, nd.end - p);
                kern.sq_distances(soa_.data() + p, n, m, dim_, q, buf);
                for (std::size_t j = 0; j < m; ++j) best = std::min(best, buf[j]);
            }
        } else {
            // Visit the closer child first.
            const double dl = box_sq_distance(nd.left, q);
            const double dr = box_sq_distance(nd.right, q);
            if (dl <= dr) {
                stack[top++] = nd.right;
                stack[top++] = nd.left;
            } else {
                stack[top++] = nd.left;
                stack[top++] = nd.right;
            }
        }
    }
    std::vector<std::uint32_t> cand;
    radius_query(q, best * (1.0 + 1e-12) + std::numeric_limits<double>::min(), cand);
    std::uint32_t arg = cand.front();
    for (std::size_t c = 1; c < cand.size(); ++c) {
        const std::uint32_t i = cand[c];
        const int s = predicates::compare_sq_dist(coords_ + i * static_cast<std::size_t>(dim_), q,
                                                  coords_ + arg * static_cast<std::size_t>(dim_), q, dim_);
        if (s < 0 || (s == 0 && i < arg)) arg = i;
    }
    return arg;
}

}  // namespace geowalk
