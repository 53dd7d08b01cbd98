#pragma once
// Radial weight profiles psi (model functions): psi(0)=0, psi'(0)=1, psi>0.
// A profile yields (psi, psi', psi'') jets, a numerically stable psi'/psi,
// and declared or estimated tail data psi ~ kappa * r^alpha. On top of the
// profiles: critical exponents, regime classification, curvature, volume,
// and the two structural condition checkers that drive the monotonicity and
// non-existence experiments.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lem/interp.hpp"

namespace lem::manifold {

enum class Family {
    euclidean,
    hyperbolic,
    shifted_power,
    arctan_family,
    f_family,
    piecewise_sinh_power,
    comparison,
    tabulated,
};
std::string family_name(Family f);
Family family_from_name(const std::string& name);

enum class Growth { polynomial, exponential };

struct Jet {
    double psi = 0, dpsi = 0, ddpsi = 0;
};

class Profile {
  public:
    virtual ~Profile() = default;
    virtual Jet eval(double r) const = 0;
    // psi'/psi without overflow (hyperbolic: coth)
    virtual double log_deriv(double r) const;
    virtual Family family() const = 0;
    virtual Growth growth() const { return Growth::polynomial; }
    virtual std::optional<double> alpha() const { return std::nullopt; }
    virtual std::optional<double> kappa() const { return std::nullopt; }
    // named scalar parameters for manifests / serialization
    virtual std::map<std::string, double> params() const { return {}; }
    virtual std::map<std::string, std::string> text_params() const { return {}; }
    virtual std::string describe() const;
};

using ProfilePtr = std::shared_ptr<const Profile>;

ProfilePtr make_euclidean();
ProfilePtr make_hyperbolic();
ProfilePtr make_shifted_power(double alpha);
ProfilePtr make_arctan_profile(double alpha);
// f_name in {"arctan", "tanh", "saturating"}; f_scale is the saturation
// radius for "saturating" (ignored otherwise)
ProfilePtr make_f_profile(double alpha, const std::string& f_name, double f_scale = 1.0);
// sinh core then kappa*(r - r_tilde)^alpha; kappa <= 0 means "choose kappa
// so the pieces match at r_bar" (the glued Lipschitz shape)
ProfilePtr make_piecewise_sinh_power(double alpha, double r_bar, double r_tilde, double kappa = 0.0);
// linear core r on [0, r_switch], smooth exponent blend on [r_switch, 2 r_switch],
// exact power kappa*r^alpha beyond
ProfilePtr make_linear_power(double alpha, double r_switch);
ProfilePtr make_tabulated(std::vector<double> r, std::vector<double> psi,
                          std::vector<double> dpsi, std::vector<double> ddpsi,
                          std::optional<double> alpha = std::nullopt,
                          std::optional<double> kappa = std::nullopt);

// tabulate any profile onto a grid (dense linear segment then log-spaced)
ProfilePtr tabulate(const Profile& p, double r_dense_end, double dr_dense,
                    double r_max, int per_decade = 256);

struct Exponents {
    double two_tilde = 0;       // (alpha(n-1)+1)/(alpha(n-1)-1)
    double two_star_alpha = 0;  // 2 * two_tilde
    double two_star = 0;        // 2n/(n-2), +inf when n = 2
};
Exponents critical_exponents(int n, double alpha);

enum class RegimeLabel {
    strongly_subcritical,
    intermediate,
    intermediate_critical,
    slightly_subcritical,
    at_or_above_sobolev_critical,
};
std::string regime_name(RegimeLabel l);

struct Regime {
    RegimeLabel label;
    // q-space thresholds: two_tilde, two_star_alpha - 1, two_star - 1
    double t_strong, t_intermediate, t_sobolev;
};
Regime classify_regime(int n, double alpha, double q);

struct Curvature {
    double sectional = 0, ricci = 0;
};
Curvature curvature(const Profile& p, int n, double r);

double volume(const Profile& p, int n, double R, double rel_tol = 1e-10);

struct ConditionReport {
    std::string condition;
    bool holds = false;
    double margin = 0;    // min over the grid of (bound - value); >= 0 means satisfied
    double worst_r = 0;   // radius attaining the minimum (0 encodes the pole limit)
};

// nonnegativity of the Pohozaev-derivative multiplier:
// (n-1) psi' psi^{-n} int_0^r psi^{n-1} <= 1/2 + 1/(q+1) on [0, r_max];
// the pole limit (n-1)/n is checked analytically
ConditionReport check_rate_bound(const Profile& p, int n, double q, double r_max,
                                 int grid_pts = 4096);
// concavity of psi^(1/alpha): psi*psi'' <= ((alpha-1)/alpha) psi'^2;
// implies the rate bound for q <= two_star_alpha - 1
ConditionReport check_root_concavity(const Profile& p, double r_max, int grid_pts = 4096);

// curvature-comparison profile: psi'' = G(r) psi with G flat (K) on [0,r_o],
// linear bridge on (r_o, 2r_o), Q/r^2 beyond; the tail is validated against
// a1 r^{s+} + a2 r^{s-}, s± = (1 ± sqrt(1+4Q))/2
struct ComparisonProfile {
    ProfilePtr profile;
    double s_plus = 0, s_minus = 0;
    double a1 = 0, a2 = 0;
    double rel_residual = 0;
};
ComparisonProfile make_comparison(double Q, double r_o, double K, double fit_r_max = 2000.0);

struct ValidationReport {
    bool pole_ok = false;       // psi(h)/h -> 1 at the pole (curvature-corrected)
    bool positive_ok = false;   // psi > 0 on the sampled grid
    bool alpha_ok = false;      // psi' r / psi approaches the declared alpha (if any)
    double pole_defect = 0, tail_defect = 0;
};
ValidationReport validate_profile(const Profile& p, double r_max = 1e4, double tol = 1e-6);

}  // namespace lem::manifold
