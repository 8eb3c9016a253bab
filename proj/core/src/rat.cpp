#include "fpend/rat.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "fpend/errors.hpp"

namespace fpend {

double quantized_action(int n, double hbar) {
    if (n < 0) throw std::invalid_argument("quantized_action: n must be >= 0");
    return hbar * (n + 0.5);
}

double unperturbed_energy(int n, const ResonanceData& res, double hbar) {
    if (res.effective_mass <= 0.0)
        throw std::invalid_argument("unperturbed_energy: m0 must be > 0");
    double d = quantized_action(n, hbar) - res.action_center;
    return d * d / (2.0 * res.effective_mass);
}

int chain_length(const ResonanceData& res, double chaos_border_action, double hbar) {
    if (chaos_border_action <= 0.5 * hbar)
        throw std::invalid_argument("chain_length: chaos border below the ground action");
    int k = 1;
    while (quantized_action(k * res.ell, hbar) <= chaos_border_action) ++k;
    return k;
}

double effective_coupling(const ResonanceData& res, double chaos_border_action, double hbar) {
    int kc = chain_length(res, chaos_border_action, hbar);
    double e0 = unperturbed_energy(0, res, hbar);
    double v = res.coupling;
    for (int k = 1; k < kc; ++k) {
        double gap = e0 - unperturbed_energy(k * res.ell, res, hbar);
        if (gap == 0.0)
            throw PoleAtDegeneracy("effective_coupling: E_0 degenerate with a chain rung");
        v *= res.coupling / gap;
    }
    return v;
}

double effective_coupling_two_step(const ResonanceData& res_a, const ResonanceData& res_b,
                                   double hbar) {
    if (quantized_action(res_a.ell, hbar) >= res_b.action_center)
        throw InvalidRegime("effective_coupling_two_step: first excited rung lies beyond "
                            "the partner resonance");
    double gap = unperturbed_energy(0, res_a, hbar) - unperturbed_energy(res_a.ell, res_a, hbar);
    if (gap == 0.0)
        throw PoleAtDegeneracy("effective_coupling_two_step: degenerate rung");
    return res_a.coupling / gap * res_b.coupling;
}

double two_step_boundary_inv_hbar(const ResonanceData& res_a, const ResonanceData& res_b) {
    // I_{ell_a} = hbar (ell_a + 1/2) = I0_b
    return (res_a.ell + 0.5) / res_b.action_center;
}

std::vector<double> perturbed_central_state(const ResonanceData& res,
                                            double chaos_border_action, double hbar) {
    int kc = chain_length(res, chaos_border_action, hbar);
    double e0 = unperturbed_energy(0, res, hbar);
    std::vector<double> coeff(kc, 1.0);
    for (int k = 1; k < kc; ++k) {
        double gap = e0 - unperturbed_energy(k * res.ell, res, hbar);
        if (gap == 0.0)
            throw PoleAtDegeneracy("perturbed_central_state: degenerate rung");
        coeff[k] = coeff[k - 1] * res.coupling / gap;
    }
    return coeff;
}

SplittingScale mean_splitting(double v_eff, double hbar) {
    SplittingScale s;
    s.mean = kTau * v_eff * v_eff / hbar;
    s.band_lo = s.mean * std::exp(-kPi / 2.0);
    s.band_hi = s.mean * std::exp(kPi / 2.0);
    return s;
}

double cauchy_splitting_pdf(double x, double scale) {
    if (x < 0.0 || scale <= 0.0)
        throw std::invalid_argument("cauchy_splitting_pdf: x >= 0 and scale > 0 required");
    return (2.0 / kPi) * scale / (x * x + scale * scale);
}

LogMoments cauchy_log_moments(double scale) {
    if (scale <= 0.0) throw std::invalid_argument("cauchy_log_moments: scale > 0 required");
    return {std::log(scale), kPi * kPi / 4.0};
}

LogMoments cauchy_log_moments_quadrature(double scale) {
    if (scale <= 0.0) throw std::invalid_argument("cauchy_log_moments: scale > 0 required");
    // substitute x = scale e^u: the density becomes sech(u)/pi du, so the
    // integrand decays exponentially on both sides
    using boost::math::quadrature::gauss_kronrod;
    auto density = [](double u) { return 1.0 / (kPi * std::cosh(u)); };
    double mean = gauss_kronrod<double, 31>::integrate(
        [&](double u) { return (std::log(scale) + u) * density(u); }, -45.0, 45.0, 12, 1e-12);
    double var = gauss_kronrod<double, 31>::integrate(
        [&](double u) { return u * u * density(u); }, -45.0, 45.0, 12, 1e-12);
    return {mean, var};
}

PnEstimate pn_splitting_estimate(double island_area, double hbar, double omega_prefactor) {
    if (island_area <= 0.0 || hbar <= 0.0)
        throw std::invalid_argument("pn_splitting_estimate: area and hbar must be > 0");
    PnEstimate est;
    est.n_states = island_area / (kTau * hbar);
    const double n = est.n_states;
    if (n > 3.0) {
        est.branch = PnBranch::Asymptotic;
        est.value = hbar * omega_prefactor / (16.0 * kPi * n * n * n) *
                    std::exp(-2.0 * (1.0 - std::log(2.0)) * n);
    } else {
        est.branch = PnBranch::IncompleteGamma;
        est.value = hbar * omega_prefactor * boost::math::tgamma(2.0 * n, 4.0 * n) /
                    boost::math::tgamma(2.0 * n + 1.0);
    }
    return est;
}

}  // namespace fpend
