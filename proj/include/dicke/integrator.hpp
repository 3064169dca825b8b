// integrator.hpp — Adaptive embedded Dormand–Prince 5(4) stepping

#pragma once

#include <algorithm>
#include <cmath>

#include "dicke/types.hpp"

namespace dicke {

// Local error is controlled per unit time: a step of size h is accepted when
// ||err||_inf <= tol * h * max(1, ||y||_inf).
template <class Vec>
class Dopri5 {
  public:
    explicit Dopri5(double tol = 1e-10) : tol_(tol) {}

    double tol() const { return tol_; }
    void set_tol(double t) { tol_ = t; }

    // Advances y from t0 to t1 (t1 >= t0), reusing the step size across calls.
    template <class Rhs>
    void advance(Rhs&& f, Vec& y, double t0, double t1) {
        double t = t0;
        if (h_ <= 0.0) h_ = initial_step(f, y, t0);
        while (t < t1) {
            double h = std::min(h_, t1 - t);
            for (;;) {
                const double err = attempt(f, y, t, h);
                const double scale = tol_ * h * std::max(1.0, y_norm_);
                if (err <= scale) {
                    t += h;
                    y = y_next_;
                    const double grow =
                        err > 0.0 ? 0.9 * std::pow(scale / err, 0.2) : 5.0;
                    h_ = h * std::clamp(grow, 0.2, 5.0);
                    break;
                }
                h *= std::clamp(0.9 * std::pow(scale / err, 0.2), 0.1, 0.9);
                if (h < min_step_)
                    throw StepUnderflowError("Dopri5: step size underflow");
            }
        }
    }

  private:
    template <class Rhs>
    double initial_step(Rhs&& f, const Vec& y, double t) {
        const Vec d = f(t, y);
        const double dnorm = d.cwiseAbs().maxCoeff();
        return std::clamp(0.01 * std::max(1.0, y.cwiseAbs().maxCoeff()) /
                              std::max(dnorm, 1e-12),
                          1e-8, 0.1);
    }

    // One trial step; returns the inf-norm error estimate and fills y_next_.
    template <class Rhs>
    double attempt(Rhs&& f, const Vec& y, double t, double h) {
        const Vec k1 = f(t, y);
        const Vec k2 = f(t + h / 5.0, Vec(y + h * (1.0 / 5.0) * k1));
        const Vec k3 = f(t + 3.0 * h / 10.0, Vec(y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2)));
        const Vec k4 = f(t + 4.0 * h / 5.0,
                         Vec(y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3)));
        const Vec k5 =
            f(t + 8.0 * h / 9.0,
              Vec(y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                           64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4)));
        const Vec k6 = f(t + h, Vec(y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                                             46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                                             5103.0 / 18656.0 * k5)));
        y_next_ = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                           2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
        const Vec k7 = f(t + h, y_next_);
        const Vec err = h * ((35.0 / 384.0 - 5179.0 / 57600.0) * k1 +
                             (500.0 / 1113.0 - 7571.0 / 16695.0) * k3 +
                             (125.0 / 192.0 - 393.0 / 640.0) * k4 +
                             (-2187.0 / 6784.0 + 92097.0 / 339200.0) * k5 +
                             (11.0 / 84.0 - 187.0 / 2100.0) * k6 - (1.0 / 40.0) * k7);
        y_norm_ = y_next_.cwiseAbs().maxCoeff();
        return err.cwiseAbs().maxCoeff();
    }

    double tol_;
    double h_ = 0.0;
    double min_step_ = 1e-12;
    Vec y_next_;
    double y_norm_ = 0.0;
};

}  // namespace dicke
