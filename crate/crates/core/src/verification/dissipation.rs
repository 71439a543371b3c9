use crate::constitutive::Constitutive;
use crate::error::Result;
use crate::kinematics::{stress_power, MaterialState, ReferentialRates, ReferentialState, SpatialRates};

/// The five terms of the reduced dissipation inequality. Spatially:
/// `ρψ̇ + ρηθ̇ − τ·∇v + q·g/θ + ρπ·Ėᴹ`; referentially:
/// `ρ_Rψ̇ + ρ_Rηθ̇ − S·Ḟ + Q·G/θ + ℙ·Ẇ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DissipationTerms {
    pub free_energy_rate: f64,
    pub entropy: f64,
    pub power: f64,
    pub heat: f64,
    pub polarization: f64,
}

impl DissipationTerms {
    /// Left-hand side of the inequality.
    pub fn total(&self) -> f64 {
        self.free_energy_rate + self.entropy - self.power + self.heat + self.polarization
    }

    /// Largest term magnitude.
    pub fn scale(&self) -> f64 {
        [self.free_energy_rate, self.entropy, self.power, self.heat, self.polarization]
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

pub fn dissipation_terms_spatial<M: Constitutive>(
    m: &M,
    state: &MaterialState,
    rates: &SpatialRates,
) -> Result<DissipationTerms> {
    state.validate()?;
    let rho = m.rho_r() / state.jacobian();
    let psi_dot = m.free_energy(&state.with_rates(rates))?.deriv;
    let eta = m.entropy(state)?;
    let tau = m.cauchy_stress(state)?;
    let pi = m.polarization_per_mass(state)?;
    let q = m.heat_flux(state)?;
    Ok(DissipationTerms {
        free_energy_rate: rho * psi_dot,
        entropy: rho * eta * rates.theta_dot,
        power: stress_power(&tau, &state.f, &rates.f_dot)?,
        heat: q.dot(&state.g) / state.theta,
        polarization: rho * pi.dot(&rates.em_dot),
    })
}

/// `ρ(ψ̇ + ηθ̇) − τ·∇v + q·g/θ + ρπ·Ėᴹ`, with `ψ̇` by exact chain rule.
pub fn dissipation_residual_spatial<M: Constitutive>(m: &M, state: &MaterialState, rates: &SpatialRates) -> Result<f64> {
    Ok(dissipation_terms_spatial(m, state, rates)?.total())
}

pub fn dissipation_terms_referential<M: Constitutive>(
    m: &M,
    state: &ReferentialState,
    rates: &ReferentialRates,
) -> Result<DissipationTerms> {
    state.validate()?;
    let rho_r = m.rho_r();
    let psi_dot = m.free_energy_referential(&state.with_rates(rates))?.deriv;
    let eta = m.referential_entropy(state)?;
    let s = m.nominal_stress(state)?;
    let p_ref = m.referential_polarization_per_mass(state)?.scale(rho_r);
    let q_ref = m.referential_heat_flux(state)?;
    Ok(DissipationTerms {
        free_energy_rate: rho_r * psi_dot,
        entropy: rho_r * eta * rates.theta_dot,
        power: s.ddot(&rates.f_dot),
        heat: q_ref.dot(&state.g_ref) / state.theta,
        polarization: p_ref.dot(&rates.w_dot),
    })
}

/// `ρ_R(ψ̇ + ηθ̇) − S·Ḟ + Q·G/θ + ℙ·Ẇ`.
pub fn dissipation_residual_referential<M: Constitutive>(
    m: &M,
    state: &ReferentialState,
    rates: &ReferentialRates,
) -> Result<f64> {
    Ok(dissipation_terms_referential(m, state, rates)?.total())
}
