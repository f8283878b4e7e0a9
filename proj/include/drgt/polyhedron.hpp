#pragma once

// Polyhedral sets {v : W v <= h} over flattened payoff space, with membership
// testing and brute-force vertex enumeration (basis enumeration over row
// subsets). Sized for desk-scale fixtures, not large instances.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "drgt/errors.hpp"

namespace drgt {

inline constexpr double kPolyTol = 1e-9;

struct Polyhedron {
    Eigen::MatrixXd W;  // rows x dim
    Eigen::VectorXd h;  // rows

    Polyhedron() = default;
    Polyhedron(Eigen::MatrixXd w, Eigen::VectorXd rhs) : W(std::move(w)), h(std::move(rhs)) {
        if (W.rows() != h.size()) throw DimensionError("Polyhedron: W row count != h length");
    }

    Eigen::Index rows() const { return W.rows(); }
    Eigen::Index dim() const { return W.cols(); }
};

inline bool contains(const Polyhedron& poly, const Eigen::VectorXd& v, double tol = kPolyTol) {
    if (poly.rows() == 0) return true;  // vacuous
    if (v.size() != poly.dim()) throw DimensionError("contains: vector dimension mismatch");
    return ((poly.W * v - poly.h).array() <= tol).all();
}

inline bool contains(const Polyhedron& poly, const std::vector<double>& v, double tol = kPolyTol) {
    return contains(poly, Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())),
                    tol);
}

// Cheap LP-free necessary condition for boundedness: after dropping zero
// rows, every coordinate must appear with a positive coefficient in some row
// and a negative coefficient in some other row. Sets that fail this have an
// unbounded coordinate direction.
inline bool is_bounded_heuristic(const Polyhedron& poly, double tol = 1e-12) {
    const Eigen::Index d = poly.dim();
    if (poly.rows() == 0) return d == 0;
    std::vector<bool> has_upper(d, false), has_lower(d, false);
    for (Eigen::Index r = 0; r < poly.rows(); ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            const double w = poly.W(r, c);
            if (w > tol) has_upper[c] = true;
            else if (w < -tol) has_lower[c] = true;
        }
    }
    for (Eigen::Index c = 0; c < d; ++c)
        if (!has_upper[c] || !has_lower[c]) return false;
    return true;
}

inline void require_bounded(const Polyhedron& poly, const char* where) {
    if (!is_bounded_heuristic(poly))
        throw InputError(std::string(where) + ": polyhedron fails the boundedness check "
                                              "(a coordinate lacks an upper or lower supporting row)");
}

// All basic feasible vertices: for every dim-subset of rows with invertible
// submatrix, solve the square system and keep solutions feasible everywhere.
// Numerically singular bases are skipped; duplicates merged at dedup_tol.
inline std::vector<Eigen::VectorXd> vertex_enumerate(const Polyhedron& poly, double feas_tol = kPolyTol,
                                                     double dedup_tol = kPolyTol) {
    const Eigen::Index d = poly.dim();
    const Eigen::Index m = poly.rows();
    if (d > 12 || m > 64) throw InputError("vertex_enumerate: instance exceeds desk scale (D<=12, m<=64)");
    require_bounded(poly, "vertex_enumerate");
    if (m < d) throw InputError("vertex_enumerate: fewer rows than dimensions, set cannot be bounded");

    std::vector<Eigen::VectorXd> vertices;
    std::vector<int> pick(d);
    for (Eigen::Index i = 0; i < d; ++i) pick[i] = static_cast<int>(i);

    Eigen::MatrixXd sub(d, d);
    Eigen::VectorXd rhs(d);
    while (true) {
        for (Eigen::Index i = 0; i < d; ++i) {
            sub.row(i) = poly.W.row(pick[i]);
            rhs(i) = poly.h(pick[i]);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
        if (lu.isInvertible()) {
            Eigen::VectorXd x = lu.solve(rhs);
            if (x.allFinite() && contains(poly, x, feas_tol)) {
                bool dup = false;
                for (const auto& v : vertices)
                    if ((v - x).norm() <= dedup_tol) {
                        dup = true;
                        break;
                    }
                if (!dup) vertices.push_back(std::move(x));
            }
        }
        // next d-combination of {0..m-1}, lexicographic
        Eigen::Index i = d - 1;
        while (i >= 0 && pick[i] == static_cast<int>(m - d + i)) --i;
        if (i < 0) break;
        ++pick[i];
        for (Eigen::Index k = i + 1; k < d; ++k) pick[k] = pick[k - 1] + 1;
    }
    if (vertices.empty()) throw EmptySetError("vertex_enumerate: polyhedron is empty");
    return vertices;
}

}  // namespace drgt
