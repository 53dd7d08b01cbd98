#include "lem/model.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>

#include "lem/fit.hpp"
#include "lem/ode.hpp"
#include "lem/quadrature.hpp"

namespace lem::manifold {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> log_grid(double lo, double hi, int count) {
    std::vector<double> g(count);
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < count; ++i)
        g[i] = std::exp(llo + (lhi - llo) * i / double(count - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::string fmt_params(const std::map<std::string, double>& p,
                       const std::map<std::string, std::string>& t) {
    std::string out;
    for (const auto& [k, v] : t) out += (out.empty() ? "" : ", ") + k + "=" + v;
    char buf[64];
    for (const auto& [k, v] : p) {
        std::snprintf(buf, sizeof buf, "%g", v);
        out += (out.empty() ? "" : ", ") + k + "=" + buf;
    }
    return out;
}

class Euclidean final : public Profile {
  public:
    Jet eval(double r) const override { return {r, 1.0, 0.0}; }
    double log_deriv(double r) const override { return 1.0 / r; }
    Family family() const override { return Family::euclidean; }
    std::optional<double> alpha() const override { return 1.0; }
    std::optional<double> kappa() const override { return 1.0; }
};

class Hyperbolic final : public Profile {
  public:
    Jet eval(double r) const override { return {std::sinh(r), std::cosh(r), std::sinh(r)}; }
    double log_deriv(double r) const override { return 1.0 / std::tanh(r); }
    Family family() const override { return Family::hyperbolic; }
    Growth growth() const override { return Growth::exponential; }
};

class ShiftedPower final : public Profile {
  public:
    explicit ShiftedPower(double alpha) : a_(alpha) {
        if (!(alpha >= 1.0)) throw std::invalid_argument("shifted_power: alpha must be >= 1");
    }
    Jet eval(double r) const override {
        double psi = std::expm1(a_ * std::log1p(r)) / a_;
        double dpsi = std::pow(1.0 + r, a_ - 1.0);
        double ddpsi = (a_ - 1.0) * std::pow(1.0 + r, a_ - 2.0);
        return {psi, dpsi, ddpsi};
    }
    Family family() const override { return Family::shifted_power; }
    std::optional<double> alpha() const override { return a_; }
    std::optional<double> kappa() const override { return 1.0 / a_; }
    std::map<std::string, double> params() const override { return {{"alpha", a_}}; }

  private:
    double a_;
};

// psi(r) = r * exp((alpha-1) * H(r)), H = int_0^r h, with
// h(s) = (s - f(s)) / (s (s + (alpha-1) f(s))); then
// psi'/psi = alpha / (r + (alpha-1) f(r)) exactly.
class FFamily final : public Profile {
  public:
    FFamily(Family tag, double alpha, std::string f_name, double f_scale)
        : tag_(tag), a_(alpha), fname_(std::move(f_name)), fscale_(f_scale) {
        if (!(a_ >= 1.0)) throw std::invalid_argument("f_family: alpha must be >= 1");
        if (fname_ == "arctan") {
            f_ = [](double s) { return std::atan(s); };
            df_ = [](double s) { return 1.0 / (1.0 + s * s); };
            f_inf_ = std::atan(kInf);
        } else if (fname_ == "tanh") {
            f_ = [](double s) { return std::tanh(s); };
            df_ = [](double s) { double t = std::tanh(s); return 1.0 - t * t; };
            f_inf_ = 1.0;
        } else if (fname_ == "saturating") {
            if (!(fscale_ > 0)) throw std::invalid_argument("f_family: f_scale must be positive");
            double R0 = fscale_;
            f_ = [R0](double s) {
                return s <= R0 ? s : R0 * (1.0 + std::tanh((s - R0) / R0));
            };
            df_ = [R0](double s) {
                if (s <= R0) return 1.0;
                double t = std::tanh((s - R0) / R0);
                return 1.0 - t * t;
            };
            f_inf_ = 2.0 * R0;
        } else {
            throw std::invalid_argument("f_family: unknown f '" + fname_ + "'");
        }
        if (a_ > 1.0) {
            auto h = [this](double s) { return h_of(s); };
            H_ = interp::integral_table(h, 0.0, kTableEnd, 0.0, 1e-12, 40);
            double H_end = H_.value(kTableEnd);
            kappa_ = std::exp((a_ - 1.0) * (H_end - std::log(kTableEnd) - a_ * f_inf_ / kTableEnd));
        } else {
            kappa_ = 1.0;
        }
    }

    Jet eval(double r) const override {
        if (r == 0.0) return {0.0, 1.0, 0.0};
        double psi;
        if (a_ == 1.0) {
            psi = r;
        } else if (r <= kTableEnd) {
            psi = r * std::exp((a_ - 1.0) * H_.value(r));
        } else {
            double psi_end = kTableEnd * std::exp((a_ - 1.0) * H_.value(kTableEnd));
            psi = psi_end * std::pow(r / kTableEnd, a_);
        }
        double g = a_ / (r + (a_ - 1.0) * f_(r));
        double dpsi = psi * g;
        double ddpsi = psi * g * g * ((a_ - 1.0) / a_) * (1.0 - df_(r));
        return {psi, dpsi, ddpsi};
    }
    double log_deriv(double r) const override { return a_ / (r + (a_ - 1.0) * f_(r)); }
    Family family() const override { return tag_; }
    std::optional<double> alpha() const override { return a_; }
    std::optional<double> kappa() const override { return kappa_; }
    std::map<std::string, double> params() const override {
        std::map<std::string, double> p{{"alpha", a_}};
        if (fname_ == "saturating") p["f_scale"] = fscale_;
        return p;
    }
    std::map<std::string, std::string> text_params() const override {
        if (tag_ == Family::f_family) return {{"f", fname_}};
        return {};
    }

  private:
    static constexpr double kTableEnd = 3.0e4;
    Family tag_;
    double a_;
    std::string fname_;
    double fscale_;
    std::function<double(double)> f_, df_;
    double f_inf_ = 0, kappa_ = 1;
    interp::HermiteTable H_;

    double h_of(double s) const {
        if (s == 0.0) return 0.0;
        double f = f_(s);
        return (s - f) / (s * (s + (a_ - 1.0) * f));
    }
};

class PiecewiseSinhPower final : public Profile {
  public:
    PiecewiseSinhPower(double alpha, double r_bar, double r_tilde, double kappa)
        : a_(alpha), rb_(r_bar), rt_(r_tilde), k_(kappa) {
        if (!(a_ >= 1.0)) throw std::invalid_argument("piecewise_sinh_power: alpha must be >= 1");
        if (!(rb_ > 0) || !(rt_ < rb_))
            throw std::invalid_argument("piecewise_sinh_power: need r_tilde < r_bar, r_bar > 0");
        if (k_ <= 0) k_ = std::sinh(rb_) / std::pow(rb_ - rt_, a_);
    }
    Jet eval(double r) const override {
        if (r <= rb_) return {std::sinh(r), std::cosh(r), std::sinh(r)};
        double t = r - rt_;
        return {k_ * std::pow(t, a_), k_ * a_ * std::pow(t, a_ - 1.0),
                k_ * a_ * (a_ - 1.0) * std::pow(t, a_ - 2.0)};
    }
    double log_deriv(double r) const override {
        return r <= rb_ ? 1.0 / std::tanh(r) : a_ / (r - rt_);
    }
    Family family() const override { return Family::piecewise_sinh_power; }
    std::optional<double> alpha() const override { return a_; }
    std::optional<double> kappa() const override { return k_; }
    std::map<std::string, double> params() const override {
        return {{"alpha", a_}, {"r_bar", rb_}, {"r_tilde", rt_}, {"kappa", k_}};
    }

  private:
    double a_, rb_, rt_, k_;
};

// psi'/psi = (1 + (alpha-1) S(t)) / r on the blend, S the cubic smoothstep;
// the log-derivative integral has the closed form below, so the blend needs
// no quadrature.
class LinearPower final : public Profile {
  public:
    LinearPower(double alpha, double r_switch) : a_(alpha), R_(r_switch) {
        if (!(a_ >= 1.0)) throw std::invalid_argument("linear_power: alpha must be >= 1");
        if (!(R_ > 0)) throw std::invalid_argument("linear_power: r_switch must be positive");
        k_ = std::pow(2.0 * R_, 1.0 - a_) * std::exp((a_ - 1.0) * blend_integral(1.0));
    }
    Jet eval(double r) const override {
        if (r <= R_) return {r, 1.0, 0.0};
        if (r >= 2.0 * R_) {
            return {k_ * std::pow(r, a_), k_ * a_ * std::pow(r, a_ - 1.0),
                    k_ * a_ * (a_ - 1.0) * std::pow(r, a_ - 2.0)};
        }
        double t = (r - R_) / R_;
        double S = t * t * (3.0 - 2.0 * t), dS = 6.0 * t * (1.0 - t);
        double psi = r * std::exp((a_ - 1.0) * blend_integral(t));
        double g = (1.0 + (a_ - 1.0) * S) / r;
        double gp = (a_ - 1.0) * dS / (r * R_) - (1.0 + (a_ - 1.0) * S) / (r * r);
        return {psi, psi * g, psi * (g * g + gp)};
    }
    double log_deriv(double r) const override {
        if (r <= R_) return 1.0 / r;
        if (r >= 2.0 * R_) return a_ / r;
        double t = (r - R_) / R_;
        return (1.0 + (a_ - 1.0) * t * t * (3.0 - 2.0 * t)) / r;
    }
    Family family() const override { return Family::comparison; }
    std::optional<double> alpha() const override { return a_; }
    std::optional<double> kappa() const override { return k_; }
    std::map<std::string, double> params() const override {
        return {{"alpha", a_}, {"r_switch", R_}, {"kappa", k_}};
    }

  private:
    double a_, R_, k_;
    // int_0^t S(u)/(1+u) du = -2t^3/3 + 5t^2/2 - 5t + 5 log(1+t)
    static double blend_integral(double t) {
        return -2.0 * t * t * t / 3.0 + 2.5 * t * t - 5.0 * t + 5.0 * std::log1p(t);
    }
};

class Tabulated final : public Profile {
  public:
    Tabulated(std::vector<double> r, std::vector<double> psi, std::vector<double> dpsi,
              std::vector<double> ddpsi, std::optional<double> alpha, std::optional<double> kappa)
        : psi_(r, psi, dpsi), dpsi_(std::move(r), std::move(dpsi), std::move(ddpsi)),
          alpha_(alpha), kappa_(kappa) {
        if (!alpha_) estimate_tail();
    }
    Jet eval(double r) const override {
        double back = psi_.x_back();
        if (r > back && alpha_) {
            double psi_end = psi_.values().back();
            double s = psi_end * std::pow(r / back, *alpha_);
            return {s, *alpha_ * s / r, *alpha_ * (*alpha_ - 1.0) * s / (r * r)};
        }
        return {psi_.value(r), dpsi_.value(r), dpsi_.deriv(r)};
    }
    Family family() const override { return Family::tabulated; }
    std::optional<double> alpha() const override { return alpha_; }
    std::optional<double> kappa() const override { return kappa_; }
    std::map<std::string, double> params() const override {
        std::map<std::string, double> p{{"n_nodes", double(psi_.size())},
                                        {"r_max", psi_.x_back()}};
        if (alpha_) p["alpha"] = *alpha_;
        if (kappa_) p["kappa"] = *kappa_;
        return p;
    }

  private:
    interp::HermiteTable psi_, dpsi_;
    std::optional<double> alpha_, kappa_;

    void estimate_tail() {
        const auto& x = psi_.nodes();
        const auto& v = psi_.values();
        std::vector<double> tx, tv;
        double lo = psi_.x_back() / 10.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] >= lo && x[i] > 0 && v[i] > 0) {
                tx.push_back(x[i]);
                tv.push_back(v[i]);
            }
        if (tx.size() < 8) return;
        try {
            auto f = fit::loglog(tx, tv);
            alpha_ = f.slope;
            kappa_ = std::exp(f.intercept);
        } catch (const std::invalid_argument&) {
        }
    }
};

// psi'' = G psi, G flat then linear then Q/r^2; integrated once at
// construction, evaluated from Hermite tables, extended past the table by the
// fitted two-term power form (exact there since G = Q/r^2).
class ComparisonPsi final : public Profile {
  public:
    ComparisonPsi(double Q, double r_o, double K, double table_end,
                  interp::HermiteTable psi, interp::HermiteTable dpsi,
                  double s_plus, double s_minus, double a1, double a2)
        : Q_(Q), ro_(r_o), K_(K), end_(table_end), psi_(std::move(psi)),
          dpsi_(std::move(dpsi)), sp_(s_plus), sm_(s_minus), a1_(a1), a2_(a2) {}

    double G(double r) const {
        if (r <= ro_) return K_;
        double Gout = Q_ / (4.0 * ro_ * ro_);
        if (r <= 2.0 * ro_) return K_ + (Gout - K_) * (r - ro_) / ro_;
        return Q_ / (r * r);
    }
    Jet eval(double r) const override {
        if (r <= 1e-8) return {r + K_ * r * r * r / 6.0, 1.0 + K_ * r * r / 2.0, K_ * r};
        if (r <= end_) {
            double psi = psi_.value(r);
            return {psi, dpsi_.value(r), G(r) * psi};
        }
        double p1 = a1_ * std::pow(r, sp_), p2 = a2_ * std::pow(r, sm_);
        return {p1 + p2, (sp_ * p1 + sm_ * p2) / r,
                (sp_ * (sp_ - 1.0) * p1 + sm_ * (sm_ - 1.0) * p2) / (r * r)};
    }
    Family family() const override { return Family::comparison; }
    std::optional<double> alpha() const override { return sp_; }
    std::optional<double> kappa() const override { return a1_; }
    std::map<std::string, double> params() const override {
        return {{"Q", Q_},       {"r_o", ro_},     {"K", K_},  {"s_plus", sp_},
                {"s_minus", sm_}, {"a1", a1_},      {"a2", a2_}};
    }

  private:
    double Q_, ro_, K_, end_;
    interp::HermiteTable psi_, dpsi_;
    double sp_, sm_, a1_, a2_;
};

}  // namespace

double Profile::log_deriv(double r) const {
    Jet j = eval(r);
    return j.dpsi / j.psi;
}

std::string Profile::describe() const {
    std::string body = fmt_params(params(), text_params());
    return family_name(family()) + (body.empty() ? "" : "(" + body + ")");
}

std::string family_name(Family f) {
    switch (f) {
        case Family::euclidean: return "euclidean";
        case Family::hyperbolic: return "hyperbolic";
        case Family::shifted_power: return "shifted_power";
        case Family::arctan_family: return "arctan_family";
        case Family::f_family: return "f_family";
        case Family::piecewise_sinh_power: return "piecewise_sinh_power";
        case Family::comparison: return "comparison";
        case Family::tabulated: return "tabulated";
    }
    throw std::invalid_argument("family_name: bad enum value");
}

Family family_from_name(const std::string& name) {
    for (Family f : {Family::euclidean, Family::hyperbolic, Family::shifted_power,
                     Family::arctan_family, Family::f_family, Family::piecewise_sinh_power,
                     Family::comparison, Family::tabulated})
        if (family_name(f) == name) return f;
    throw std::invalid_argument("unknown profile family '" + name + "'");
}

ProfilePtr make_euclidean() { return std::make_shared<Euclidean>(); }
ProfilePtr make_hyperbolic() { return std::make_shared<Hyperbolic>(); }
ProfilePtr make_shifted_power(double alpha) { return std::make_shared<ShiftedPower>(alpha); }
ProfilePtr make_arctan_profile(double alpha) {
    return std::make_shared<FFamily>(Family::arctan_family, alpha, "arctan", 1.0);
}
ProfilePtr make_f_profile(double alpha, const std::string& f_name, double f_scale) {
    return std::make_shared<FFamily>(Family::f_family, alpha, f_name, f_scale);
}
ProfilePtr make_piecewise_sinh_power(double alpha, double r_bar, double r_tilde, double kappa) {
    return std::make_shared<PiecewiseSinhPower>(alpha, r_bar, r_tilde, kappa);
}
ProfilePtr make_linear_power(double alpha, double r_switch) {
    return std::make_shared<LinearPower>(alpha, r_switch);
}
ProfilePtr make_tabulated(std::vector<double> r, std::vector<double> psi,
                          std::vector<double> dpsi, std::vector<double> ddpsi,
                          std::optional<double> alpha, std::optional<double> kappa) {
    return std::make_shared<Tabulated>(std::move(r), std::move(psi), std::move(dpsi),
                                       std::move(ddpsi), alpha, kappa);
}

ProfilePtr tabulate(const Profile& p, double r_dense_end, double dr_dense,
                    double r_max, int per_decade) {
    if (!(0 < dr_dense && dr_dense <= r_dense_end && r_dense_end < r_max))
        throw std::invalid_argument("tabulate: need 0 < dr_dense <= r_dense_end < r_max");
    std::vector<double> r;
    for (double x = 0.0; x < r_dense_end - 0.5 * dr_dense; x += dr_dense) r.push_back(x);
    int n_log = std::max(2, int(std::ceil(per_decade * std::log10(r_max / r_dense_end))) + 1);
    for (double x : log_grid(r_dense_end, r_max, n_log)) r.push_back(x);
    std::vector<double> psi(r.size()), dpsi(r.size()), ddpsi(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        Jet j = p.eval(r[i]);
        psi[i] = j.psi;
        dpsi[i] = j.dpsi;
        ddpsi[i] = j.ddpsi;
    }
    return make_tabulated(std::move(r), std::move(psi), std::move(dpsi), std::move(ddpsi),
                          p.alpha(), p.kappa());
}

Exponents critical_exponents(int n, double alpha) {
    if (n < 2) throw std::invalid_argument("critical_exponents: dimension n must be >= 2");
    double beta = alpha * (n - 1);
    if (beta <= 1.0 + 1e-9)
        throw std::invalid_argument("critical_exponents: alpha*(n-1) must exceed 1");
    Exponents e;
    e.two_tilde = (beta + 1.0) / (beta - 1.0);
    e.two_star_alpha = 2.0 * e.two_tilde;
    e.two_star = (n > 2) ? 2.0 * n / (n - 2.0) : kInf;
    return e;
}

std::string regime_name(RegimeLabel l) {
    switch (l) {
        case RegimeLabel::strongly_subcritical: return "strongly_subcritical";
        case RegimeLabel::intermediate: return "intermediate";
        case RegimeLabel::intermediate_critical: return "intermediate_critical";
        case RegimeLabel::slightly_subcritical: return "slightly_subcritical";
        case RegimeLabel::at_or_above_sobolev_critical: return "at_or_above_sobolev_critical";
    }
    throw std::invalid_argument("regime_name: bad enum value");
}

Regime classify_regime(int n, double alpha, double q) {
    if (!(q > 1.0)) throw std::invalid_argument("classify_regime: exponent q must exceed 1");
    Exponents e = critical_exponents(n, alpha);
    Regime out;
    out.t_strong = e.two_tilde;
    out.t_intermediate = e.two_star_alpha - 1.0;
    out.t_sobolev = e.two_star - 1.0;
    auto near = [](double a, double b) {
        return std::isfinite(b) && std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
    };
    if (q <= out.t_strong || near(q, out.t_strong))
        out.label = RegimeLabel::strongly_subcritical;
    else if (near(q, out.t_intermediate))
        out.label = RegimeLabel::intermediate_critical;
    else if (q < out.t_intermediate)
        out.label = RegimeLabel::intermediate;
    else if (q < out.t_sobolev && !near(q, out.t_sobolev))
        out.label = RegimeLabel::slightly_subcritical;
    else
        out.label = RegimeLabel::at_or_above_sobolev_critical;
    return out;
}

Curvature curvature(const Profile& p, int n, double r) {
    if (!(r > 0)) throw std::invalid_argument("curvature: r must be positive");
    Jet j = p.eval(r);
    Curvature c;
    c.sectional = -j.ddpsi / j.psi;
    c.ricci = (n - 1) * c.sectional;
    return c;
}

double volume(const Profile& p, int n, double R, double rel_tol) {
    if (n < 2 || !(R > 0)) throw std::invalid_argument("volume: need n >= 2 and R > 0");
    return quadrature::integrate([&](double s) { return std::pow(p.eval(s).psi, n - 1); },
                                 0.0, R, rel_tol);
}

ConditionReport check_rate_bound(const Profile& p, int n, double q, double r_max, int grid_pts) {
    if (!(q > 1.0) || n < 2 || !(r_max > 0))
        throw std::invalid_argument("check_rate_bound: need q > 1, n >= 2, r_max > 0");
    double bound = 0.5 + 1.0 / (q + 1.0);
    ConditionReport rep;
    rep.condition = "rate_bound";
    // analytic pole limit of the multiplier
    rep.margin = bound - double(n - 1) / n;
    rep.worst_r = 0.0;

    std::vector<double> grid = log_grid(std::min(1e-4, 1e-4 * r_max), r_max, grid_pts);
    grid.insert(grid.begin(), 0.0);
    auto wt = [&](double s) { return std::pow(p.eval(s).psi, n - 1); };
    std::vector<double> vol = quadrature::cumulative(wt, grid);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double r = grid[i];
        Jet j = p.eval(r);
        double lhs = (n - 1) * j.dpsi * vol[i] / std::pow(j.psi, n);
        double m = bound - lhs;
        if (m < rep.margin) {
            rep.margin = m;
            rep.worst_r = r;
        }
    }
    rep.holds = rep.margin >= -1e-12;
    return rep;
}

ConditionReport check_root_concavity(const Profile& p, double r_max, int grid_pts) {
    auto alpha = p.alpha();
    if (!alpha || p.growth() == Growth::exponential)
        throw std::invalid_argument(
            "check_root_concavity: profile must declare a polynomial growth rate alpha");
    double a = *alpha;
    ConditionReport rep;
    rep.condition = "root_concavity";
    rep.margin = kInf;
    for (double r : log_grid(std::min(1e-4, 1e-4 * r_max), r_max, grid_pts)) {
        Jet j = p.eval(r);
        double m = ((a - 1.0) / a) * j.dpsi * j.dpsi - j.psi * j.ddpsi;
        if (m < rep.margin) {
            rep.margin = m;
            rep.worst_r = r;
        }
    }
    rep.holds = rep.margin >= -1e-12;
    return rep;
}

ComparisonProfile make_comparison(double Q, double r_o, double K, double fit_r_max) {
    if (!(Q > 0) || !(r_o > 0))
        throw std::invalid_argument("make_comparison: need Q > 0 and r_o > 0");
    if (!(fit_r_max > 8.0 * r_o))
        throw std::invalid_argument("make_comparison: fit_r_max must exceed 8*r_o");
    double Gout = Q / (4.0 * r_o * r_o);
    auto G = [=](double r) {
        if (r <= r_o) return K;
        if (r <= 2.0 * r_o) return K + (Gout - K) * (r - r_o) / r_o;
        return Q / (r * r);
    };
    lem::ode::Dopri5<2> solver([&](double r, const lem::ode::State<2>& y,
                                   lem::ode::State<2>& dy) {
        dy[0] = y[1];
        dy[1] = G(r) * y[0];
    });
    solver.rtol = 1e-12;
    solver.atol = 1e-16;

    std::vector<double> xs, vs, ds;
    double r0 = 1e-8;
    lem::ode::State<2> y{r0 + K * r0 * r0 * r0 / 6.0, 1.0 + K * r0 * r0 / 2.0};
    xs.push_back(r0);
    vs.push_back(y[0]);
    ds.push_back(y[1]);
    auto record = [&](const lem::ode::DenseStep<2>& st) {
        double cap = std::max(0.02 * std::max(st.r0, 0.01 * r_o), 1e-7);
        int m = std::max(1, int(std::ceil(st.h / cap)));
        for (int j = 1; j <= m; ++j) {
            double r = st.r0 + st.h * j / m;
            auto yj = (j == m) ? st.y1 : st.eval(r);
            xs.push_back(r);
            vs.push_back(yj[0]);
            ds.push_back(yj[1]);
        }
        return lem::ode::Control::go_on;
    };
    double cur = r0;
    for (double stop : {r_o, 2.0 * r_o, fit_r_max}) {
        auto res = solver.integrate(cur, y, stop, record);
        if (res.status != lem::ode::Status::reached_end)
            throw std::runtime_error("make_comparison: integration of psi'' = G psi failed");
        cur = res.r;
        y = res.y;
    }

    ComparisonProfile out;
    double root = std::sqrt(1.0 + 4.0 * Q);
    out.s_plus = 0.5 * (1.0 + root);
    out.s_minus = 0.5 * (1.0 - root);
    double w_lo = std::max(2.0 * r_o, 0.05 * fit_r_max);
    std::vector<double> fx, fy;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (xs[i] > w_lo) {
            fx.push_back(xs[i]);
            fy.push_back(vs[i]);
        }
    if (fx.size() < 8) throw std::runtime_error("make_comparison: tail fit window too thin");
    auto fit = fit::power_pair(fx, fy, out.s_plus, out.s_minus);
    if (!(fit.a1 > 0)) throw std::runtime_error("make_comparison: leading tail coefficient not positive");
    out.a1 = fit.a1;
    out.a2 = fit.a2;
    out.rel_residual = fit.rel_residual;

    interp::HermiteTable psi_tab(xs, vs, ds);
    std::vector<double> dd(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) dd[i] = G(xs[i]) * vs[i];
    interp::HermiteTable dpsi_tab(std::move(xs), std::move(ds), std::move(dd));
    out.profile = std::make_shared<ComparisonPsi>(Q, r_o, K, fit_r_max, std::move(psi_tab),
                                                  std::move(dpsi_tab), out.s_plus, out.s_minus,
                                                  out.a1, out.a2);
    return out;
}

ValidationReport validate_profile(const Profile& p, double r_max, double tol) {
    ValidationReport rep;
    double h = 1e-4;
    Jet jh = p.eval(h);
    rep.pole_defect = std::abs(jh.psi / h - 1.0 - 0.5 * jh.ddpsi * h);
    rep.pole_ok = rep.pole_defect < tol;

    rep.positive_ok = true;
    for (double r : log_grid(1e-6, r_max, 512))
        if (!(p.eval(r).psi > 0)) {
            rep.positive_ok = false;
            break;
        }

    rep.alpha_ok = true;
    rep.tail_defect = 0.0;
    if (p.growth() == Growth::polynomial && p.alpha()) {
        double a = *p.alpha();
        for (double r : {0.25 * r_max, 0.5 * r_max, r_max}) {
            double d = std::abs(p.log_deriv(r) * r - a) / a;
            rep.tail_defect = std::max(rep.tail_defect, d);
        }
        rep.alpha_ok = rep.tail_defect < 0.02;
    }
    return rep;
}

}  // namespace lem::manifold
