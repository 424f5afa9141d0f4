#pragma once

// Velocity-field abstraction and the double-gyre benchmark flow.
//
// A field reports, at (x, t), the jet of derivatives the particle model
// consumes: u, grad u, partial_t u, and (when available) lap u, grad lap u,
// partial_t lap u. Material derivatives are assembled downstream. All
// double-gyre entries are exact closed-form differentiations of the stream
// function; the expressions are globally defined, so evaluation outside the
// nominal box is the analytic extension (the solver records domain exit
// instead of failing).

#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "basset/common.hpp"
#include "basset/params.hpp"

namespace basset {

template <std::size_t N>
struct Box {
    Vec<N> lo = zero_vec<N>();
    Vec<N> hi = zero_vec<N>();

    bool contains(const Vec<N>& x) const {
        for (std::size_t i = 0; i < N; ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }
};

// Everything a field can report at one (x, t).
template <std::size_t N>
struct FlowJet {
    Vec<N> u = zero_vec<N>();
    Mat<N> grad_u = zero_mat<N>();  // [i][j] = d u_i / d x_j
    Vec<N> u_t = zero_vec<N>();
    // Third-order block; meaningful only when the field has_third_order().
    Vec<N> lap_u = zero_vec<N>();
    Mat<N> grad_lap_u = zero_mat<N>();
    Vec<N> lap_u_t = zero_vec<N>();
};

template <std::size_t N>
class FlowField {
public:
    virtual ~FlowField() = default;

    virtual FlowJet<N> jet(const Vec<N>& x, double t, bool third_order) const = 0;
    virtual bool has_third_order() const = 0;
    virtual Box<N> domain() const = 0;
    // Temporal period, or nullopt for aperiodic/steady fields.
    virtual std::optional<double> period() const = 0;

    // Domain-checked evaluation; the solver itself uses the unchecked jet.
    FlowJet<N> eval_checked(const Vec<N>& x, double t, bool third_order) const {
        const Box<N> box = domain();
        for (std::size_t i = 0; i < N; ++i)
            if (x[i] < box.lo[i] || x[i] > box.hi[i])
                throw DomainError("flow: coordinate " + std::to_string(i) + " = " +
                                  std::to_string(x[i]) + " outside domain [" +
                                  std::to_string(box.lo[i]) + ", " + std::to_string(box.hi[i]) +
                                  "]");
        return jet(x, t, third_order);
    }
};

// Identically-zero velocity field. With it the particle model reduces to the
// pure relaxation equation, for which the kernel gives the exact solution.
template <std::size_t N>
class FrozenField final : public FlowField<N> {
public:
    FlowJet<N> jet(const Vec<N>&, double, bool) const override { return {}; }
    bool has_third_order() const override { return true; }
    Box<N> domain() const override {
        Box<N> b;
        for (std::size_t i = 0; i < N; ++i) {
            b.lo[i] = -1e300;
            b.hi[i] = 1e300;
        }
        return b;
    }
    std::optional<double> period() const override { return std::nullopt; }
};

// Stream function H(x,y,t) = A sin(pi f(x,t)) sin(pi y) with
// f(x,t) = a(t) x^2 + b(t) x, a = alpha sin(omega t), b = 1 - 2a, on
// [0,2] x [0,1]; u = (-dH/dy, dH/dx).
class DoubleGyre final : public FlowField<2> {
public:
    DoubleGyre(double amplitude, double omega, double alpha)
        : A_(amplitude), omega_(omega), alpha_(alpha) {
        if (!std::isfinite(amplitude) || !std::isfinite(omega) || !std::isfinite(alpha))
            throw ValidationError("double_gyre: parameters must be finite");
    }

    double amplitude() const { return A_; }
    double omega() const { return omega_; }
    double alpha() const { return alpha_; }

    bool has_third_order() const override { return true; }

    Box<2> domain() const override { return Box<2>{{0.0, 0.0}, {2.0, 1.0}}; }

    std::optional<double> period() const override {
        if (omega_ == 0.0) return std::nullopt;
        return 2.0 * M_PI / std::abs(omega_);
    }

    FlowJet<2> jet(const Vec<2>& x, double t, bool third_order) const override {
        const double P = M_PI;
        const double a = alpha_ * std::sin(omega_ * t);
        const double ad = alpha_ * omega_ * std::cos(omega_ * t);  // da/dt
        const double b = 1.0 - 2.0 * a;

        const double f = a * x[0] * x[0] + b * x[0];
        const double fx = 2.0 * a * x[0] + b;
        const double fxx = 2.0 * a;
        const double ft = ad * (x[0] * x[0] - 2.0 * x[0]);  // db/dt = -2 da/dt
        const double fxt = ad * (2.0 * x[0] - 2.0);
        const double fxxt = 2.0 * ad;

        const double sf = std::sin(P * f);
        const double cf = std::cos(P * f);
        const double sy = std::sin(P * x[1]);
        const double cy = std::cos(P * x[1]);
        const double AP = A_ * P;
        const double AP2 = AP * P;

        FlowJet<2> out;
        out.u[0] = -AP * sf * cy;
        out.u[1] = AP * cf * sy * fx;

        out.grad_u[0][0] = -AP2 * cf * fx * cy;
        out.grad_u[0][1] = AP2 * sf * sy;
        out.grad_u[1][0] = AP * sy * (fxx * cf - P * fx * fx * sf);
        out.grad_u[1][1] = AP2 * cf * cy * fx;

        out.u_t[0] = -AP2 * cf * ft * cy;
        out.u_t[1] = AP * sy * (cf * fxt - P * sf * ft * fx);

        if (third_order) {
            const double fx2 = fx * fx;
            // lap u = (A pi^2 cy G1, A pi^2 sy G2)
            const double G1 = P * sf * (fx2 + 1.0) - fxx * cf;
            const double G2 = -3.0 * fx * fxx * sf - P * fx * cf * (fx2 + 1.0);
            out.lap_u[0] = AP2 * cy * G1;
            out.lap_u[1] = AP2 * sy * G2;

            const double G1x = P * P * cf * fx * (fx2 + 1.0) + 3.0 * P * sf * fx * fxx;
            const double G2x = -3.0 * fxx * fxx * sf + P * P * fx2 * sf * (fx2 + 1.0) -
                               P * fxx * cf * (6.0 * fx2 + 1.0);
            out.grad_lap_u[0][0] = AP2 * cy * G1x;
            out.grad_lap_u[0][1] = -AP2 * P * sy * G1;
            out.grad_lap_u[1][0] = AP2 * sy * G2x;
            out.grad_lap_u[1][1] = AP2 * P * cy * G2;

            const double G1t = P * P * cf * ft * (fx2 + 1.0) + 2.0 * P * sf * fx * fxt +
                               P * sf * fxx * ft - fxxt * cf;
            const double G2t = -3.0 * (fxt * fxx + fx * fxxt) * sf -
                               3.0 * P * fx * fxx * ft * cf - P * fxt * cf * (fx2 + 1.0) +
                               P * P * fx * ft * sf * (fx2 + 1.0) -
                               2.0 * P * fx2 * fxt * cf;
            out.lap_u_t[0] = AP2 * cy * G1t;
            out.lap_u_t[1] = AP2 * sy * G2t;
        }
        return out;
    }

private:
    double A_;
    double omega_;
    double alpha_;
};

// The fields the rescaled particle equation is driven by:
//   A_u = u + (gamma/(6 mu)) lap u
//   B_u = (3R/2 - 1)(Du/Dt - g) + (R/20 - 1/6) gamma mu^{-1} D(lap u)/Dt
//         - (gamma/(6 mu)) M_u lap u
//   M_u = grad u + (gamma/(6 mu)) grad lap u
// with the Faxen (lap u) terms dropped entirely when faxen is off.
template <std::size_t N>
class DerivedFields {
public:
    struct Terms {
        Vec<N> A = zero_vec<N>();
        Vec<N> B = zero_vec<N>();
        Mat<N> M = zero_mat<N>();
    };

    DerivedFields(const FlowField<N>& field, const ParticleParams<N>& params, bool faxen)
        : field_(&field), params_(params), faxen_(faxen) {
        if (faxen && !field.has_third_order())
            throw CapabilityError(
                "derived_fields: Faxen terms need third-order field derivatives");
    }

    const FlowField<N>& field() const { return *field_; }
    const ParticleParams<N>& params() const { return params_; }
    bool faxen() const { return faxen_; }

    Terms eval(const Vec<N>& x, double t) const {
        const FlowJet<N> j = field_->jet(x, t, faxen_);
        Terms out;
        const double coef = buoyancy_coefficient(params_.R);
        const Vec<N> du_dt = j.u_t + matvec(j.grad_u, j.u);
        if (!faxen_) {
            out.A = j.u;
            out.M = j.grad_u;
            for (std::size_t i = 0; i < N; ++i)
                out.B[i] = coef * (du_dt[i] - params_.g_scaled[i]);
            return out;
        }
        const double c = params_.gamma * params_.eps / 6.0;
        const double c2 = (params_.R / 20.0 - 1.0 / 6.0) * params_.gamma * params_.eps;
        out.A = j.u + c * j.lap_u;
        out.M = j.grad_u + c * j.grad_lap_u;
        const Vec<N> dlap_dt = j.lap_u_t + matvec(j.grad_u, j.lap_u);
        const Vec<N> m_lap = matvec(out.M, j.lap_u);
        for (std::size_t i = 0; i < N; ++i)
            out.B[i] = coef * (du_dt[i] - params_.g_scaled[i]) + c2 * dlap_dt[i] - c * m_lap[i];
        return out;
    }

    // v = w + A_u along a trajectory, for both Faxen settings.
    Vec<N> carrier_velocity(const Vec<N>& x, double t) const { return eval(x, t).A; }

private:
    const FlowField<N>* field_;
    ParticleParams<N> params_;
    bool faxen_;
};

template <std::size_t N>
DerivedFields<N> derived_fields(const FlowField<N>& field, const ParticleParams<N>& params,
                                bool faxen) {
    return DerivedFields<N>(field, params, faxen);
}

// ---------------------------------------------------------------------------
// Empirical bound constants over a space-time sample grid.

// Matrix norm used for L_M. Any norm dominating the induced 2-norm yields a
// valid bound constant; frobenius is what reproduces the published double
// gyre value (the sup sits at a rotation-dominated corner where the two
// singular values coincide, so frobenius exceeds spectral by sqrt(2) there).
enum class MatrixNorm { frobenius, spectral };

struct BoundsGrid {
    std::size_t nx = 801;
    std::size_t ny = 401;
    std::size_t nt = 128;
    // Time horizon for aperiodic fields; periodic fields sample one period.
    double time_horizon = 1.0;
    // Stride of the coarser sub-grid used for the Lipschitz constant and the
    // finite-difference step for its spatial gradients.
    std::size_t lc_stride = 4;
    double fd_step = 1e-5;
    // Relative change between refinement levels beyond which a warning is
    // attached to the result.
    double refine_tol = 5e-3;
    MatrixNorm m_norm = MatrixNorm::frobenius;
};

struct FieldBounds {
    double L_A = 0.0;
    double L_B = 0.0;
    double L_M = 0.0;
    std::optional<double> L_c;
    // Richardson-style deltas between the two finest grids, per constant.
    double delta_L_A = 0.0;
    double delta_L_B = 0.0;
    double delta_L_M = 0.0;
    // Provenance.
    std::size_t nx = 0, ny = 0, nt = 0;
    bool faxen = false;
    double R = 0.0;
    MatrixNorm m_norm = MatrixNorm::frobenius;
    std::vector<std::string> warnings;
};

namespace detail {

struct BoundScan {
    double L_A = 0.0;
    double L_B = 0.0;
    double L_M = 0.0;
};

inline BoundScan scan_bounds(const DerivedFields<2>& fields, const Box<2>& box,
                             const std::vector<double>& times, std::size_t nx, std::size_t ny,
                             MatrixNorm mn, unsigned threads) {
    const double dx = (box.hi[0] - box.lo[0]) / static_cast<double>(nx - 1);
    const double dy = (box.hi[1] - box.lo[1]) / static_cast<double>(ny - 1);
    BoundScan total;
    std::mutex merge;

    // Max-reduction is order independent, so the merge order does not affect
    // the result.
    parallel_for(nx, threads, [&](std::size_t lo, std::size_t hi) {
        BoundScan local;
        for (std::size_t ix = lo; ix < hi; ++ix) {
            const double x = box.lo[0] + ix * dx;
            for (std::size_t iy = 0; iy < ny; ++iy) {
                const double y = box.lo[1] + iy * dy;
                for (double t : times) {
                    const auto terms = fields.eval({x, y}, t);
                    local.L_A = std::max(local.L_A, norm(terms.A));
                    local.L_B = std::max(local.L_B, norm(terms.B));
                    const double m = mn == MatrixNorm::frobenius
                                         ? std::sqrt(frobenius_sq_2(terms.M))
                                         : spectral_norm(terms.M);
                    local.L_M = std::max(local.L_M, m);
                }
            }
        }
        std::lock_guard<std::mutex> lock(merge);
        total.L_A = std::max(total.L_A, local.L_A);
        total.L_B = std::max(total.L_B, local.L_B);
        total.L_M = std::max(total.L_M, local.L_M);
    });
    return total;
}

// Lipschitz estimate: max over a coarser grid of the spatial-gradient norms
// of A_u, B_u and M_u, gradients taken by central differences.
inline double scan_lipschitz(const DerivedFields<2>& fields, const Box<2>& box,
                             const std::vector<double>& times, std::size_t nx, std::size_t ny,
                             double h, unsigned threads) {
    const double dx = (box.hi[0] - box.lo[0]) / static_cast<double>(nx - 1);
    const double dy = (box.hi[1] - box.lo[1]) / static_cast<double>(ny - 1);
    double result = 0.0;
    std::mutex merge;

    parallel_for(nx, threads, [&](std::size_t lo, std::size_t hi) {
        double local = 0.0;
        for (std::size_t ix = lo; ix < hi; ++ix) {
            const double x = box.lo[0] + ix * dx;
            for (std::size_t iy = 0; iy < ny; ++iy) {
                const double y = box.lo[1] + iy * dy;
                for (double t : times) {
                    const auto xp = fields.eval({x + h, y}, t);
                    const auto xm = fields.eval({x - h, y}, t);
                    const auto yp = fields.eval({x, y + h}, t);
                    const auto ym = fields.eval({x, y - h}, t);
                    const double inv2h = 0.5 / h;
                    Mat<2> gradA, gradB;
                    double gradM_sq = 0.0;
                    for (std::size_t i = 0; i < 2; ++i) {
                        gradA[i][0] = (xp.A[i] - xm.A[i]) * inv2h;
                        gradA[i][1] = (yp.A[i] - ym.A[i]) * inv2h;
                        gradB[i][0] = (xp.B[i] - xm.B[i]) * inv2h;
                        gradB[i][1] = (yp.B[i] - ym.B[i]) * inv2h;
                        for (std::size_t jdx = 0; jdx < 2; ++jdx) {
                            const double mx = (xp.M[i][jdx] - xm.M[i][jdx]) * inv2h;
                            const double my = (yp.M[i][jdx] - ym.M[i][jdx]) * inv2h;
                            gradM_sq += mx * mx + my * my;
                        }
                    }
                    local = std::max({local, spectral_norm(gradA), spectral_norm(gradB),
                                      std::sqrt(gradM_sq)});
                }
            }
        }
        std::lock_guard<std::mutex> lock(merge);
        result = std::max(result, local);
    });
    return result;
}

inline std::vector<double> sample_times(const FlowField<2>& field, std::size_t nt,
                                        double horizon) {
    std::vector<double> times(nt);
    const auto p = field.period();
    const double span = p ? *p : horizon;
    for (std::size_t i = 0; i < nt; ++i)
        times[i] = span * static_cast<double>(i) / static_cast<double>(nt);
    return times;
}

}  // namespace detail

// Exhaustive grid scan at the requested resolution plus one coarser level;
// the delta between the two is reported, and exceeding grid.refine_tol
// attaches a warning rather than failing.
inline FieldBounds estimate_bounds(const DerivedFields<2>& fields, const BoundsGrid& grid,
                                   unsigned threads = 0) {
    if (grid.nx < 3 || grid.ny < 3 || grid.nt < 1)
        throw ValidationError("estimate_bounds: grid resolution must be positive");
    if (!fields.field().period() && !(grid.time_horizon > 0.0))
        throw ValidationError(
            "estimate_bounds: aperiodic field needs a positive time horizon");

    const Box<2> box = fields.field().domain();
    const auto times_fine = detail::sample_times(fields.field(), grid.nt, grid.time_horizon);
    const auto times_coarse =
        detail::sample_times(fields.field(), std::max<std::size_t>(1, grid.nt / 2),
                             grid.time_horizon);

    const std::size_t cx = grid.nx / 2 + 1;
    const std::size_t cy = grid.ny / 2 + 1;
    const auto fine =
        detail::scan_bounds(fields, box, times_fine, grid.nx, grid.ny, grid.m_norm, threads);
    const auto coarse =
        detail::scan_bounds(fields, box, times_coarse, cx, cy, grid.m_norm, threads);

    FieldBounds out;
    out.L_A = fine.L_A;
    out.L_B = fine.L_B;
    out.L_M = fine.L_M;
    out.delta_L_A = fine.L_A - coarse.L_A;
    out.delta_L_B = fine.L_B - coarse.L_B;
    out.delta_L_M = fine.L_M - coarse.L_M;
    out.nx = grid.nx;
    out.ny = grid.ny;
    out.nt = grid.nt;
    out.faxen = fields.faxen();
    out.R = fields.params().R;
    out.m_norm = grid.m_norm;

    const std::size_t lx = std::max<std::size_t>(2, grid.nx / grid.lc_stride);
    const std::size_t ly = std::max<std::size_t>(2, grid.ny / grid.lc_stride);
    const std::size_t lt = std::max<std::size_t>(1, grid.nt / grid.lc_stride);
    const auto times_lc = detail::sample_times(fields.field(), lt, grid.time_horizon);
    out.L_c = detail::scan_lipschitz(fields, box, times_lc, lx, ly, grid.fd_step, threads);

    auto check = [&](const char* name, double delta, double value) {
        const double rel = std::abs(delta) / std::max(value, 1e-30);
        if (rel > grid.refine_tol)
            out.warnings.push_back(std::string(name) + " refinement delta " +
                                   std::to_string(rel) + " exceeds tolerance " +
                                   std::to_string(grid.refine_tol));
    };
    check("L_A", out.delta_L_A, out.L_A);
    if (out.L_B > 0.0) check("L_B", out.delta_L_B, out.L_B);
    check("L_M", out.delta_L_M, out.L_M);
    return out;
}

}  // namespace basset
