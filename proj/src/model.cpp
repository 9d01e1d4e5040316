#include "malvol/model.hpp"

#include <cmath>

#include "malvol/error.hpp"

namespace malvol {

VolFunctionSpec reference_vol_family(double c, double m) {
    if (!(c > 0.0) || !(m > 0.0) || !std::isfinite(c) || !std::isfinite(m)) {
        throw Error(ErrorCode::InvalidArgument,
                    "reference vol family requires c > 0 and m > 0 (NonPositiveParameter)");
    }
    VolFunctionSpec spec;
    spec.name = "reference";
    spec.eval_sigma = [c, m](double x) { return c + m * (x + std::sqrt(x * x + 1.0)); };
    spec.eval_sigma_prime = [m](double x) { return m * (1.0 + x / std::sqrt(x * x + 1.0)); };
    spec.eval_sigma_second = [m](double x) {
        const double s = x * x + 1.0;
        return m / (s * std::sqrt(s));
    };
    spec.lower_bound_c = c;
    // c + m(x + sqrt(x^2+1)) <= c + m(2|x| + 1) <= (c + 2m)(1 + |x|)
    spec.q_growth = c + 2.0 * m;
    spec.l_growth = 1;
    spec.family_params = {c, m};
    return spec;
}

std::string_view violation_code(Violation v) noexcept {
    switch (v) {
        case Violation::NonPositiveAlpha: return "E_NONPOSITIVE_ALPHA";
        case Violation::NonPositiveK: return "E_NONPOSITIVE_K";
        case Violation::NonPositiveLowerBound: return "E_NONPOSITIVE_LOWER_BOUND";
        case Violation::NonPositiveMaturity: return "E_NONPOSITIVE_MATURITY";
        case Violation::NonPositiveSpot: return "E_NONPOSITIVE_SPOT";
        case Violation::NegativeRate: return "E_NEGATIVE_RATE";
        case Violation::NonFiniteParameter: return "E_NONFINITE_PARAMETER";
        case Violation::SigmaBelowLowerBound: return "E_SIGMA_BELOW_BOUND";
        case Violation::NonPositiveSigmaPrime: return "E_NONPOSITIVE_SIGMA_PRIME";
        case Violation::NonFiniteNu: return "E_NONFINITE_NU";
        case Violation::NonPositiveB: return "E_NONPOSITIVE_B";
        case Violation::NonPositiveZ0: return "E_NONPOSITIVE_Z0";
        case Violation::FellerViolation: return "E_FELLER";
        case Violation::DensityConditionViolation: return "E_DENSITY_CONDITION";
        case Violation::NegativeStrike: return "E_NEGATIVE_STRIKE";
    }
    return "E_UNKNOWN";
}

std::string violation_line(Violation v) {
    std::string_view detail;
    switch (v) {
        case Violation::NonPositiveAlpha: detail = "alpha <= 0"; break;
        case Violation::NonPositiveK: detail = "k <= 0"; break;
        case Violation::NonPositiveLowerBound: detail = "c <= 0"; break;
        case Violation::NonPositiveMaturity: detail = "T <= 0"; break;
        case Violation::NonPositiveSpot: detail = "s0 <= 0"; break;
        case Violation::NegativeRate: detail = "r < 0"; break;
        case Violation::NonFiniteParameter: detail = "parameter is not finite"; break;
        case Violation::SigmaBelowLowerBound: detail = "sigma(x) < c on probe grid"; break;
        case Violation::NonPositiveSigmaPrime: detail = "sigma'(x) <= 0 on probe grid"; break;
        case Violation::NonFiniteNu: detail = "nu or nu' not finite on probe grid"; break;
        case Violation::NonPositiveB: detail = "b <= 0"; break;
        case Violation::NonPositiveZ0: detail = "z0 <= 0"; break;
        case Violation::FellerViolation: detail = "k^2 >= 2*b"; break;
        case Violation::DensityConditionViolation: detail = "6*k^2 >= b"; break;
        case Violation::NegativeStrike: detail = "K < 0"; break;
    }
    std::string line(violation_code(v));
    line += ' ';
    line += detail;
    return line;
}

std::optional<Violation> check_vol_point(const VolFunctionSpec& vol, double x) {
    const double s = vol.sigma(x);
    const double sp = vol.sigma_prime(x);
    if (!(s >= vol.lower_bound_c)) return Violation::SigmaBelowLowerBound;
    if (!(sp > 0.0)) return Violation::NonPositiveSigmaPrime;
    const double nu = vol.nu(x);
    const double nup = vol.nu_prime(x);
    if (!std::isfinite(nu) || !std::isfinite(nup)) return Violation::NonFiniteNu;
    return std::nullopt;
}

std::vector<double> vol_probe_grid() {
    constexpr int kPoints = 1001;
    std::vector<double> xs(kPoints);
    for (int i = 0; i < kPoints; ++i) xs[i] = -10.0 + 20.0 * i / (kPoints - 1);
    return xs;
}

namespace {

void add_unique(std::vector<Violation>& out, Violation v) {
    for (Violation existing : out) {
        if (existing == v) return;
    }
    out.push_back(v);
}

}  // namespace

OUValidation validate_ou(const OUParams& p, const VolFunctionSpec& vol) {
    OUValidation result;
    auto& v = result.violations;
    for (double x : {p.alpha, p.k_ou, p.y0, p.s0, p.r, p.mu, p.T}) {
        if (!std::isfinite(x)) add_unique(v, Violation::NonFiniteParameter);
    }
    if (!(p.alpha > 0.0)) add_unique(v, Violation::NonPositiveAlpha);
    if (!(p.k_ou > 0.0)) add_unique(v, Violation::NonPositiveK);
    if (!(p.T > 0.0)) add_unique(v, Violation::NonPositiveMaturity);
    if (!(p.s0 > 0.0)) add_unique(v, Violation::NonPositiveSpot);
    if (!(p.r >= 0.0)) add_unique(v, Violation::NegativeRate);
    if (!(vol.lower_bound_c > 0.0)) add_unique(v, Violation::NonPositiveLowerBound);

    if (vol.eval_sigma && vol.eval_sigma_prime && vol.eval_sigma_second) {
        std::vector<double> probe = vol_probe_grid();
        if (std::isfinite(p.y0)) probe.push_back(p.y0);
        for (double x : probe) {
            if (auto bad = check_vol_point(vol, x)) add_unique(v, *bad);
        }
    } else {
        add_unique(v, Violation::NonFiniteNu);
    }

    if (v.empty()) result.model = ValidatedOUModel(p, vol);
    return result;
}

CIRValidation validate_cir(const CIRParams& p, bool density_mode) {
    CIRValidation result;
    auto& v = result.violations;
    for (double x : {p.b, p.k_cir, p.z0, p.s0, p.r, p.mu, p.T}) {
        if (!std::isfinite(x)) add_unique(v, Violation::NonFiniteParameter);
    }
    if (!(p.b > 0.0)) add_unique(v, Violation::NonPositiveB);
    if (!(p.k_cir > 0.0)) add_unique(v, Violation::NonPositiveK);
    if (!(p.z0 > 0.0)) add_unique(v, Violation::NonPositiveZ0);
    if (!(p.T > 0.0)) add_unique(v, Violation::NonPositiveMaturity);
    if (!(p.s0 > 0.0)) add_unique(v, Violation::NonPositiveSpot);
    if (!(p.r >= 0.0)) add_unique(v, Violation::NegativeRate);

    const double k2 = p.k_cir * p.k_cir;
    if (!(k2 < 2.0 * p.b)) add_unique(v, Violation::FellerViolation);
    if (density_mode && !(6.0 * k2 < p.b)) add_unique(v, Violation::DensityConditionViolation);

    if (v.empty()) result.model = ValidatedCIRModel(p, density_mode);
    return result;
}

std::vector<Violation> validate_contract(const Contract& contract) {
    std::vector<Violation> v;
    if (!std::isfinite(contract.strike) || !std::isfinite(contract.maturity)) {
        v.push_back(Violation::NonFiniteParameter);
    }
    if (!(contract.strike >= 0.0)) v.push_back(Violation::NegativeStrike);
    if (!(contract.maturity > 0.0)) v.push_back(Violation::NonPositiveMaturity);
    return v;
}

}  // namespace malvol
