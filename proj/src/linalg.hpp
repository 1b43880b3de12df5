#pragma once

#include <cstddef>

// Row-major float parameter blocks with double accumulation.

namespace logstamp::detail {

// y += W x, W is rows x cols
inline void matvec_acc(const float* w, const double* x, int rows, int cols, double* y) {
    for (int i = 0; i < rows; ++i) {
        const float* row = w + static_cast<std::size_t>(i) * static_cast<std::size_t>(cols);
        double acc = 0.0;
        for (int j = 0; j < cols; ++j) acc += static_cast<double>(row[j]) * x[j];
        y[i] += acc;
    }
}

// y += W^T g, W is rows x cols, g has length rows, y has length cols
inline void matvec_t_acc(const float* w, const double* g, int rows, int cols, double* y) {
    for (int i = 0; i < rows; ++i) {
        const float* row = w + static_cast<std::size_t>(i) * static_cast<std::size_t>(cols);
        const double gi = g[i];
        if (gi == 0.0) continue;
        for (int j = 0; j < cols; ++j) y[j] += static_cast<double>(row[j]) * gi;
    }
}

// dW += g x^T, dW is rows x cols
inline void outer_acc(double* dw, const double* g, const double* x, int rows, int cols) {
    for (int i = 0; i < rows; ++i) {
        double* row = dw + static_cast<std::size_t>(i) * static_cast<std::size_t>(cols);
        const double gi = g[i];
        if (gi == 0.0) continue;
        for (int j = 0; j < cols; ++j) row[j] += gi * x[j];
    }
}

inline double dot_fd(const float* a, const double* b, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += static_cast<double>(a[i]) * b[i];
    return acc;
}

} // namespace logstamp::detail
