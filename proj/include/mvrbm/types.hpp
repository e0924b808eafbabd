#ifndef MVRBM_TYPES_HPP
#define MVRBM_TYPES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "mvrbm/errors.hpp"

namespace mvrbm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Visible I x J, hidden K x L.
struct LayerShape {
    Index visible_rows = 0;  // I
    Index visible_cols = 0;  // J
    Index hidden_rows = 0;   // K
    Index hidden_cols = 0;   // L

    void validate() const {
        if (visible_rows < 1 || visible_cols < 1 || hidden_rows < 1 || hidden_cols < 1)
            throw UsageError("LayerShape: all dimensions must be >= 1");
    }
};

inline std::string shape_str(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

inline void require_shape(const Matrix& m, Index rows, Index cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols)
        throw DimensionError(std::string(name) + " is " + shape_str(m) + ", expected " +
                             std::to_string(rows) + "x" + std::to_string(cols));
}

inline bool is_binary(const Matrix& m) {
    return ((m.array() == 0.0) || (m.array() == 1.0)).all();
}

inline bool in_unit_interval(const Matrix& m) {
    return (m.array() >= 0.0).all() && (m.array() <= 1.0).all();
}

// Logistic function, numerically stable for any finite input and clamped to
// stay strictly inside (0, 1). The clamp floor is far above the subnormal
// range so downstream matrix products never hit slow denormal arithmetic.
inline double sigmoid(double x) {
    double s;
    if (x >= 0.0) {
        s = 1.0 / (1.0 + std::exp(-x));
    } else {
        const double e = std::exp(x);
        s = e / (1.0 + e);
    }
    constexpr double lo = 1e-15;
    constexpr double hi = 1.0 - 1e-15;
    return s < lo ? lo : (s > hi ? hi : s);
}

inline Matrix sigmoid(const Matrix& m) {
    return m.unaryExpr([](double x) { return sigmoid(x); });
}

// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace mvrbm

#endif
