#pragma once
// Dormand-Prince 5(4) with PI step control and the classic 4th-order dense
// output. Header-only, templated on the (small, fixed) state dimension.
// The observer sees every accepted step and can halt the run; event location
// happens outside, on the dense polynomial.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>

namespace lem::ode {

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
using Rhs = std::function<void(double r, const State<N>& y, State<N>& dy)>;

enum class Status { reached_end, halted, step_underflow, max_steps };
enum class Control { go_on, stop };

// one accepted step with its continuous extension
template <std::size_t N>
struct DenseStep {
    double r0 = 0, h = 0;
    State<N> y0{}, y1{};
    std::array<State<N>, 5> rc{};   // rcont1..rcont5

    double r1() const { return r0 + h; }

    State<N> eval(double r) const {
        double s = (r - r0) / h, s1 = 1.0 - s;
        State<N> y;
        for (std::size_t i = 0; i < N; ++i) {
            double inner = rc[2][i] + s * (rc[3][i] + s1 * rc[4][i]);
            y[i] = rc[0][i] + s * (rc[1][i] + s1 * inner);
        }
        return y;
    }
    State<N> eval_deriv(double r) const {
        double s = (r - r0) / h;
        State<N> dy;
        for (std::size_t i = 0; i < N; ++i) {
            double inner = rc[2][i] + s * (rc[3][i] + (1.0 - s) * rc[4][i]);
            double dinner = rc[3][i] + (1.0 - 2.0 * s) * rc[4][i];
            dy[i] = (rc[1][i] + (1.0 - 2.0 * s) * inner + s * (1.0 - s) * dinner) / h;
        }
        return dy;
    }
};

template <std::size_t N>
struct RunResult {
    Status status = Status::reached_end;
    double r = 0;
    State<N> y{};
    std::size_t n_steps = 0, n_rejected = 0;
};

template <std::size_t N>
class Dopri5 {
  public:
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_underflow = 1e-14;     // floor relative to max(1, |r|)
    std::size_t max_steps = 4'000'000;

    explicit Dopri5(Rhs<N> f) : f_(std::move(f)) {}

    RunResult<N> integrate(double r0, State<N> y0, double r_end,
                           const std::function<Control(const DenseStep<N>&)>& observer) const {
        RunResult<N> res;
        double r = r0;
        State<N> y = y0, k1;
        f_(r, y, k1);
        double h = initial_step(r, y, k1, r_end);
        double facold = 1e-4;
        std::array<State<N>, 7> k;
        k[0] = k1;

        while (r < r_end) {
            if (res.n_steps + res.n_rejected >= max_steps) {
                res.status = Status::max_steps;
                break;
            }
            h = std::min(h, r_end - r);
            if (h < h_underflow * std::max(1.0, std::abs(r))) {
                res.status = Status::step_underflow;
                break;
            }

            State<N> yt, y1;
            for (std::size_t s = 1; s < 6; ++s) {
                for (std::size_t i = 0; i < N; ++i) {
                    double acc = 0;
                    for (std::size_t j = 0; j < s; ++j) acc += A[s][j] * k[j][i];
                    yt[i] = y[i] + h * acc;
                }
                f_(r + C[s] * h, yt, k[s]);
            }
            for (std::size_t i = 0; i < N; ++i) {
                double acc = 0;
                for (std::size_t j = 0; j < 6; ++j) acc += A[6][j] * k[j][i];
                y1[i] = y[i] + h * acc;   // row 7 of A equals b: FSAL
            }
            f_(r + h, y1, k[6]);

            double err = 0;
            for (std::size_t i = 0; i < N; ++i) {
                double e = 0;
                for (std::size_t j = 0; j < 7; ++j) e += E[j] * k[j][i];
                double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
                double q = h * e / sc;
                err += q * q;
            }
            err = std::sqrt(err / N);

            double fac11 = std::pow(std::max(err, 1e-30), 0.17);
            if (err <= 1.0) {
                DenseStep<N> step;
                step.r0 = r;
                step.h = h;
                step.y0 = y;
                step.y1 = y1;
                for (std::size_t i = 0; i < N; ++i) {
                    double dy = y1[i] - y[i];
                    double bspl = h * k[0][i] - dy;
                    step.rc[0][i] = y[i];
                    step.rc[1][i] = dy;
                    step.rc[2][i] = bspl;
                    step.rc[3][i] = dy - h * k[6][i] - bspl;
                    step.rc[4][i] = h * (D[0] * k[0][i] + D[1] * k[2][i] + D[2] * k[3][i] +
                                         D[3] * k[4][i] + D[4] * k[5][i] + D[5] * k[6][i]);
                }
                r += h;
                y = y1;
                k[0] = k[6];
                ++res.n_steps;

                facold = std::max(err, 1e-4);
                double fac = fac11 / std::pow(facold, 0.04) / 0.9;
                fac = std::clamp(fac, 0.1, 5.0);
                h = h / fac;

                if (observer(step) == Control::stop) {
                    res.status = Status::halted;
                    res.r = r;
                    res.y = y;
                    return res;
                }
            } else {
                ++res.n_rejected;
                double fac = std::min(5.0, fac11 / 0.9);
                h = h / std::max(fac, 1.25);
            }
        }
        if (r >= r_end) res.status = Status::reached_end;
        res.r = r;
        res.y = y;
        return res;
    }

  private:
    Rhs<N> f_;

    double initial_step(double r0, const State<N>& y0, const State<N>& f0, double r_end) const {
        double d0 = 0, d1 = 0;
        for (std::size_t i = 0; i < N; ++i) {
            double sc = atol + rtol * std::abs(y0[i]);
            d0 += (y0[i] / sc) * (y0[i] / sc);
            d1 += (f0[i] / sc) * (f0[i] / sc);
        }
        d0 = std::sqrt(d0 / N);
        d1 = std::sqrt(d1 / N);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, (r_end - r0) * 0.5);

        State<N> y1, f1;
        for (std::size_t i = 0; i < N; ++i) y1[i] = y0[i] + h0 * f0[i];
        f_(r0 + h0, y1, f1);
        double d2 = 0;
        for (std::size_t i = 0; i < N; ++i) {
            double sc = atol + rtol * std::abs(y0[i]);
            double df = (f1[i] - f0[i]) / sc;
            d2 += df * df;
        }
        d2 = std::sqrt(d2 / N) / h0;

        double dm = std::max(d1, d2);
        double h1 = (dm <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                  : std::pow(0.01 / dm, 0.2);
        return std::min({100.0 * h0, h1, r_end - r0});
    }

    static constexpr std::array<double, 7> C{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static constexpr std::array<std::array<double, 6>, 7> A{{
        {0, 0, 0, 0, 0, 0},
        {1.0 / 5, 0, 0, 0, 0, 0},
        {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
        {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
        {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
    }};
    // b(5th) - b(4th)
    static constexpr std::array<double, 7> E{71.0 / 57600, 0, -71.0 / 16695, 71.0 / 1920,
                                             -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
    // dense-output weights (stages 1,3,4,5,6,7)
    static constexpr std::array<double, 6> D{
        -12715105075.0 / 11282082432.0, 87487479700.0 / 32700410799.0,
        -10690763975.0 / 1880347072.0,  701980252875.0 / 199316789632.0,
        -1453857185.0 / 822651844.0,    69997945.0 / 29380423.0};
};

}  // namespace lem::ode
