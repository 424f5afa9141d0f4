#pragma once

// Small fixed-dimension linear algebra, error types and a fork-join helper
// shared by every basset component. Dimension is a compile-time template
// parameter; only N = 2 fields ship but nothing below assumes it.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace basset {

template <std::size_t N>
using Vec = std::array<double, N>;

// Row-major: M[i][j] multiplies component j of a vector into component i.
template <std::size_t N>
using Mat = std::array<std::array<double, N>, N>;

template <std::size_t N>
constexpr Vec<N> zero_vec() {
    Vec<N> v{};
    return v;
}

template <std::size_t N>
constexpr Mat<N> zero_mat() {
    Mat<N> m{};
    return m;
}

template <std::size_t N>
inline Vec<N> operator+(const Vec<N>& a, const Vec<N>& b) {
    Vec<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + b[i];
    return r;
}

template <std::size_t N>
inline Vec<N> operator-(const Vec<N>& a, const Vec<N>& b) {
    Vec<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] - b[i];
    return r;
}

template <std::size_t N>
inline Vec<N> operator*(double s, const Vec<N>& a) {
    Vec<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = s * a[i];
    return r;
}

template <std::size_t N>
inline Vec<N>& operator+=(Vec<N>& a, const Vec<N>& b) {
    for (std::size_t i = 0; i < N; ++i) a[i] += b[i];
    return a;
}

template <std::size_t N>
inline double dot(const Vec<N>& a, const Vec<N>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
    return s;
}

template <std::size_t N>
inline double norm(const Vec<N>& a) {
    return std::sqrt(dot(a, a));
}

template <std::size_t N>
inline Vec<N> matvec(const Mat<N>& m, const Vec<N>& v) {
    Vec<N> r{};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) r[i] += m[i][j] * v[j];
    return r;
}

template <std::size_t N>
inline Mat<N> operator+(const Mat<N>& a, const Mat<N>& b) {
    Mat<N> r;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) r[i][j] = a[i][j] + b[i][j];
    return r;
}

template <std::size_t N>
inline Mat<N> operator*(double s, const Mat<N>& a) {
    Mat<N> r;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) r[i][j] = s * a[i][j];
    return r;
}

inline double frobenius_sq_2(const Mat<2>& m) {
    return m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1];
}

// Spectral norm (largest singular value). The 2x2 case is closed form; it is
// the operator norm used for the L_M bound.
template <std::size_t N>
inline double spectral_norm(const Mat<N>& m) {
    if constexpr (N == 2) {
        const double f = frobenius_sq_2(m);
        const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        const double disc = f * f - 4.0 * det * det;
        const double root = std::sqrt(std::max(0.0, disc));
        return std::sqrt(0.5 * (f + root));
    } else {
        // Power iteration on M^T M; adequate for the small fixed sizes here.
        Vec<N> v{};
        v[0] = 1.0;
        double lam = 0.0;
        for (int it = 0; it < 200; ++it) {
            Vec<N> mv = matvec(m, v);
            Vec<N> u{};
            for (std::size_t i = 0; i < N; ++i)
                for (std::size_t j = 0; j < N; ++j) u[j] += m[i][j] * mv[i];
            const double nu = norm(u);
            if (nu == 0.0) return 0.0;
            for (std::size_t i = 0; i < N; ++i) v[i] = u[i] / nu;
            lam = nu;
        }
        return std::sqrt(lam);
    }
}

// Solve (a I + B) x = rhs for small N. Gaussian elimination with partial
// pivoting; N is 2 in practice so this is a handful of flops.
template <std::size_t N>
inline Vec<N> solve_shifted(double a, const Mat<N>& B, const Vec<N>& rhs) {
    Mat<N> A = B;
    for (std::size_t i = 0; i < N; ++i) A[i][i] += a;
    Vec<N> b = rhs;
    std::array<std::size_t, N> piv;
    for (std::size_t i = 0; i < N; ++i) piv[i] = i;
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t best = col;
        for (std::size_t r = col + 1; r < N; ++r)
            if (std::abs(A[r][col]) > std::abs(A[best][col])) best = r;
        if (best != col) {
            std::swap(A[best], A[col]);
            std::swap(b[best], b[col]);
        }
        const double p = A[col][col];
        if (p == 0.0) throw std::runtime_error("solve_shifted: singular system");
        for (std::size_t r = col + 1; r < N; ++r) {
            const double f = A[r][col] / p;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < N; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    Vec<N> x{};
    for (std::size_t i = N; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < N; ++j) s -= A[i][j] * x[j];
        x[i] = s / A[i][i];
    }
    return x;
}

// ---------------------------------------------------------------------------
// Error types

// Invalid physical or numerical input; what() names the offending field.
struct ValidationError : std::invalid_argument {
    explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

// A capability the caller requested is not provided by the object at hand
// (e.g. Faxen terms from a field lacking third derivatives).
struct CapabilityError : std::logic_error {
    explicit CapabilityError(const std::string& msg) : std::logic_error(msg) {}
};

// Fixed-point closure failed to converge at a time step.
struct StepFailureError : std::runtime_error {
    std::size_t node;
    StepFailureError(const std::string& msg, std::size_t node_index)
        : std::runtime_error(msg + " at node " + std::to_string(node_index)), node(node_index) {}
};

// Non-finite state encountered during integration.
struct BlowUpError : std::runtime_error {
    std::size_t node;
    BlowUpError(const std::string& msg, std::size_t node_index)
        : std::runtime_error(msg + " at node " + std::to_string(node_index)), node(node_index) {}
};

// A numerical oracle could not certify its own accuracy.
struct OracleFailureError : std::runtime_error {
    explicit OracleFailureError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// Fork-join over an index range. Deterministic chunking; results must be
// combined by the caller in index order if bit reproducibility matters.

inline unsigned resolve_thread_count(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t, std::size_t)>& body) {
    threads = resolve_thread_count(threads);
    if (n == 0) return;
    if (threads <= 1 || n == 1) {
        body(0, n);
        return;
    }
    const std::size_t nchunk = std::min<std::size_t>(threads, n);
    const std::size_t per = (n + nchunk - 1) / nchunk;
    std::vector<std::thread> pool;
    pool.reserve(nchunk);
    for (std::size_t c = 0; c < nchunk; ++c) {
        const std::size_t lo = c * per;
        const std::size_t hi = std::min(n, lo + per);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace basset
