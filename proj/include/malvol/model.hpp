#pragma once
// =============================================================================
// Model parameters and assumption checks
//
// OU-driven volatility (simulated under the minimal martingale measure):
//   dS_t = r S_t dt + sigma(Y_t) S_t dW_t
//   dY_t = -alpha Y_t dt + k dW~_t
//
// CIR variance (Heston without correlation):
//   dS_t = r S_t dt + sqrt(Z_t) S_t dW_t
//   dZ_t = (b - Z_t) dt + k sqrt(Z_t) dW~_t
//
// W and W~ are independent. The objective drift mu is carried for
// documentation only; every computation in this library runs under Q.
// =============================================================================

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace malvol {

struct OUParams {
    double alpha = 0.0;  ///< mean-reversion rate
    double k_ou = 0.0;   ///< diffusion coefficient of Y
    double y0 = 0.0;
    double s0 = 0.0;
    double r = 0.0;
    double mu = 0.0;     ///< objective drift, unused under Q
    double T = 0.0;
};

struct CIRParams {
    double b = 0.0;      ///< long-run variance
    double k_cir = 0.0;  ///< vol-of-vol
    double z0 = 0.0;
    double s0 = 0.0;
    double r = 0.0;
    double mu = 0.0;
    double T = 0.0;
};

/// Volatility function sigma(.) with its first two derivatives.
///
/// lower_bound_c is the constant with sigma(x) >= c for all x; q_growth and
/// l_growth witness sigma(x) <= q (1 + |x|^l).
struct VolFunctionSpec {
    std::string name;
    std::function<double(double)> eval_sigma;
    std::function<double(double)> eval_sigma_prime;
    std::function<double(double)> eval_sigma_second;
    double lower_bound_c = 0.0;
    double q_growth = 0.0;
    int l_growth = 1;
    std::vector<double> family_params;

    double sigma(double x) const { return eval_sigma(x); }
    double sigma_prime(double x) const { return eval_sigma_prime(x); }
    double sigma_second(double x) const { return eval_sigma_second(x); }

    /// nu(x) = sigma(x) sigma'(x)
    double nu(double x) const { return sigma(x) * sigma_prime(x); }

    /// nu'(x) = sigma'(x)^2 + sigma(x) sigma''(x)
    double nu_prime(double x) const {
        const double sp = sigma_prime(x);
        return sp * sp + sigma(x) * sigma_second(x);
    }
};

/// sigma(x) = c + m (x + sqrt(x^2 + 1)).
///
/// Bounded below by c, strictly increasing, smooth, linear growth.
/// Throws Error(InvalidArgument) unless c > 0 and m > 0.
VolFunctionSpec reference_vol_family(double c, double m);

struct Contract {
    double strike = 0.0;
    double maturity = 0.0;
};

enum class Violation {
    NonPositiveAlpha,
    NonPositiveK,
    NonPositiveLowerBound,
    NonPositiveMaturity,
    NonPositiveSpot,
    NegativeRate,
    NonFiniteParameter,
    SigmaBelowLowerBound,
    NonPositiveSigmaPrime,
    NonFiniteNu,
    NonPositiveB,
    NonPositiveZ0,
    FellerViolation,
    DensityConditionViolation,
    NegativeStrike,
};

/// Machine-parseable code, e.g. "E_DENSITY_CONDITION".
std::string_view violation_code(Violation v) noexcept;

/// Code followed by a short human-readable description.
std::string violation_line(Violation v);

/// Checks sigma >= c > 0, sigma' > 0 and finiteness of nu, nu' at one point.
std::optional<Violation> check_vol_point(const VolFunctionSpec& vol, double x);

/// Probe grid used by validation: 1001 equally spaced points on [-10, 10].
std::vector<double> vol_probe_grid();

struct OUValidation;
struct CIRValidation;

/// Total: every input maps to a model or a nonempty violation list.
OUValidation validate_ou(const OUParams& params, const VolFunctionSpec& vol);

/// Accepted iff k^2 < 2b; with density_mode additionally 6k^2 < b.
CIRValidation validate_cir(const CIRParams& params, bool density_mode);

class ValidatedOUModel {
public:
    const OUParams& params() const noexcept { return params_; }
    const VolFunctionSpec& vol() const noexcept { return vol_; }

private:
    ValidatedOUModel(OUParams p, VolFunctionSpec v) : params_(p), vol_(std::move(v)) {}
    friend OUValidation validate_ou(const OUParams&, const VolFunctionSpec&);

    OUParams params_;
    VolFunctionSpec vol_;
};

class ValidatedCIRModel {
public:
    const CIRParams& params() const noexcept { return params_; }
    bool density_mode() const noexcept { return density_mode_; }

    /// q = b/2 - k^2/8, the coefficient of int ds/Z_s in the CIR derivative flow.
    double q() const noexcept { return params_.b / 2.0 - params_.k_cir * params_.k_cir / 8.0; }

private:
    ValidatedCIRModel(CIRParams p, bool density) : params_(p), density_mode_(density) {}
    friend CIRValidation validate_cir(const CIRParams&, bool);

    CIRParams params_;
    bool density_mode_;
};

struct OUValidation {
    std::optional<ValidatedOUModel> model;
    std::vector<Violation> violations;

    bool ok() const noexcept { return model.has_value(); }
};

struct CIRValidation {
    std::optional<ValidatedCIRModel> model;
    std::vector<Violation> violations;

    bool ok() const noexcept { return model.has_value(); }
};

std::vector<Violation> validate_contract(const Contract& contract);

}  // namespace malvol
