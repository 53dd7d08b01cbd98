#pragma once
// Cubic Hermite tables: C^1 interpolation through (x, value, derivative)
// nodes. Used for integral caches (where the integrand is the exact
// derivative) and for trajectory / profile resampling.

#include <cstddef>
#include <functional>
#include <vector>

namespace lem::interp {

class HermiteTable {
  public:
    HermiteTable() = default;
    HermiteTable(std::vector<double> x, std::vector<double> v, std::vector<double> d);

    double value(double x) const;
    double deriv(double x) const;    // derivative of the interpolant
    double second(double x) const;   // second derivative of the local cubic

    bool empty() const { return x_.empty(); }
    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }
    std::size_t size() const { return x_.size(); }
    const std::vector<double>& nodes() const { return x_; }
    const std::vector<double>& values() const { return v_; }
    const std::vector<double>& derivs() const { return d_; }

  private:
    std::vector<double> x_, v_, d_;
    std::size_t locate(double x) const;
};

// cache of F(x) = F(a) + int_a^x f, with f used as the exact Hermite
// derivative; nodes are placed by adaptive bisection until the mid-interval
// Simpson refinement changes each cell integral by < tol*(|I|+1)*cell/(b-a)
HermiteTable integral_table(const std::function<double(double)>& f,
                            double a, double b, double f0 = 0.0,
                            double tol = 1e-12, int max_depth = 40);

}  // namespace lem::interp
