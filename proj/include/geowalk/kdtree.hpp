#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace geowalk {

/// Static kd-tree over a row-major coordinate array. Leaves keep their
/// points in structure-of-arrays layout for the SIMD distance kernel.
class KdTree {
public:
    KdTree() = default;
    KdTree(const double* coords, std::size_t n, int dim, std::size_t leaf_size = 16);

    std::size_t size() const { return perm_.size(); }
    int dim() const { return dim_; }

    /// Appends the indices whose floating-point squared distance to q is <= r2.
    /// Callers needing exact answers pass a slightly inflated r2 and refine.
    void radius_query(const double* q, double r2, std::vector<std::uint32_t>& out) const;

    /// Appends the indices inside the closed box [lo, hi].
    void box_query(const double* lo, const double* hi, std::vector<std::uint32_t>& out) const;

    /// Exact nearest point to q (exact distance comparison; ties go to the lowest index).
    std::size_t nearest(const double* q) const;

private:
    struct Node {
        std::uint32_t begin, end;
        std::int32_t left = -1, right = -1;
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end);
    double box_sq_distance(std::int32_t node, const double* q) const;

    const double* coords_ = nullptr;
    int dim_ = 0;
    std::size_t leaf_size_ = 16;
    std::vector<std::uint32_t> perm_;
    std::vector<double> soa_;        // dim rows of length n, in perm_ order
    std::vector<Node> nodes_;
    std::vector<double> bbox_;       // per node: lo[dim], hi[dim]
};

}  // namespace geowalk
