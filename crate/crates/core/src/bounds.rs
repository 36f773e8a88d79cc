//! Three-term 2-Wasserstein error bounds for LS-SGLD.
//!
//! Convex case:
//!
//! ```text
//! W₂ ≤ (2γ₁Kη²βdω²/B)^{1/2} + [8γ₂Kη²(K+1)βdη]^{1/2}
//!      + [2λ(βf(0) + log Λ)]^{1/2} · exp(−c₀Kη/(2βλ))
//! ```
//!
//! Dissipative (nonconvex) case, with `Γ̄ = (3/2 + 2(b + d/β))^{1/2}` and
//! `I = γ₁βdω²Kη/B + 2γ₂M²dKη²`:
//!
//! ```text
//! W₂ ≤ Γ̄(Kη)^{1/2} [I^{1/2} + I^{1/4}] + (same exponential term)
//! ```
//!
//! The convex SGLD specialization (`A_σ = I`) carries no `β` in the first
//! term and `β⁻¹` in the second; [`convex_bound_corollary_form`] evaluates
//! that arrangement with the LS constants kept in place.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::smoothing::LaplacianOperator;

/// Constants entering the bounds. `c0`, `gamma1`, `gamma2` depend on `A_σ`;
/// the rest describe the target and the run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    /// Iterations `K`.
    pub k: usize,
    pub eta: f64,
    pub beta: f64,
    pub d: usize,
    /// Stochastic-gradient noise scale `ω`.
    pub omega: f64,
    pub batch_size: usize,
    /// Log-Sobolev constant `λ`.
    pub lambda_sobolev: f64,
    pub c0: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// `βf(0) + log Λ`.
    pub f0_beta_log_lambda: f64,
    /// Dissipativity offset `b` (nonconvex bound only).
    pub b_dissip: f64,
    /// Gradient Lipschitz constant `M` (nonconvex bound only).
    pub m_smooth: f64,
}

/// The bound split into its three contributions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundBreakdown {
    pub stochastic_term: f64,
    pub discretization_term: f64,
    pub ergodicity_term: f64,
    pub total: f64,
}

impl BoundBreakdown {
    fn new(stochastic_term: f64, discretization_term: f64, ergodicity_term: f64) -> Self {
        Self {
            stochastic_term,
            discretization_term,
            ergodicity_term,
            total: stochastic_term + discretization_term + ergodicity_term,
        }
    }
}

impl BoundInputs {
    /// Replaces `c0`, `gamma1`, `gamma2` by the conservative values implied by
    /// `op`: `c0 = ‖A_σ‖⁻¹`, `γ₁ = ‖A_σ‖⁻²`, `γ₂ = d⁻¹ Σ λ_j⁻¹`. Also sets `d`.
    pub fn with_operator_constants(mut self, op: &LaplacianOperator) -> Self {
        let norm = op.spectral_norm();
        self.c0 = norm.recip();
        self.gamma1 = norm.powi(-2);
        self.gamma2 = op.gamma2();
        self.d = op.dim();
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(name, format!("must be positive and finite, found {v}")))
            }
        };
        let nonnegative = |name: &'static str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(invalid(name, format!("must be nonnegative and finite, found {v}")))
            }
        };
        let unit = |name: &'static str, v: f64| {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(invalid(name, format!("must lie in (0, 1], found {v}")))
            }
        };
        if self.k == 0 {
            return Err(invalid("k", "must be at least 1"));
        }
        if self.d == 0 {
            return Err(invalid("d", "must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(invalid("batch_size", "must be at least 1"));
        }
        positive("eta", self.eta)?;
        positive("beta", self.beta)?;
        positive("lambda_sobolev", self.lambda_sobolev)?;
        nonnegative("omega", self.omega)?;
        nonnegative("f0_beta_log_lambda", self.f0_beta_log_lambda)?;
        nonnegative("b_dissip", self.b_dissip)?;
        nonnegative("m_smooth", self.m_smooth)?;
        unit("c0", self.c0)?;
        unit("gamma1", self.gamma1)?;
        unit("gamma2", self.gamma2)
    }

    fn ergodicity(&self) -> f64 {
        let k_eta = self.k as f64 * self.eta;
        (2.0 * self.lambda_sobolev * self.f0_beta_log_lambda).sqrt()
            * (-self.c0 * k_eta / (2.0 * self.beta * self.lambda_sobolev)).exp()
    }
}

/// The convex bound in the form shown in the module docs.
pub fn convex_bound(inp: &BoundInputs) -> Result<BoundBreakdown> {
    inp.validate()?;
    let k = inp.k as f64;
    let d = inp.d as f64;
    let eta = inp.eta;
    let stochastic =
        (2.0 * inp.gamma1 * k * eta * eta * inp.beta * d * inp.omega * inp.omega / inp.batch_size as f64).sqrt();
    let discretization = (8.0 * inp.gamma2 * k * eta * eta * (k + 1.0) * inp.beta * d * eta).sqrt();
    Ok(BoundBreakdown::new(stochastic, discretization, inp.ergodicity()))
}

/// The convex bound with the SGLD specialization's `β` placement: no `β` in
/// the stochastic term and `β⁻¹` in the discretization term.
pub fn convex_bound_corollary_form(inp: &BoundInputs) -> Result<BoundBreakdown> {
    inp.validate()?;
    let k = inp.k as f64;
    let d = inp.d as f64;
    let eta = inp.eta;
    let stochastic = (2.0 * inp.gamma1 * k * eta * eta * d * inp.omega * inp.omega / inp.batch_size as f64).sqrt();
    let discretization = (8.0 * inp.gamma2 * k * eta * eta * (k + 1.0) * d * eta / inp.beta).sqrt();
    Ok(BoundBreakdown::new(stochastic, discretization, inp.ergodicity()))
}

/// The dissipative bound. The bracket `Γ̄(Kη)^{1/2}[I^{1/2} + I^{1/4}]` mixes
/// gradient noise and discretization inside one root, so it is reported whole
/// as `discretization_term` with `stochastic_term = 0`.
pub fn nonconvex_bound(inp: &BoundInputs) -> Result<BoundBreakdown> {
    inp.validate()?;
    let k_eta = inp.k as f64 * inp.eta;
    let d = inp.d as f64;
    let gamma_bar = (1.5 + 2.0 * (inp.b_dissip + d / inp.beta)).sqrt();
    let inner = inp.gamma1 * inp.beta * d * inp.omega * inp.omega * k_eta / inp.batch_size as f64
        + 2.0 * inp.gamma2 * inp.m_smooth * inp.m_smooth * d * k_eta * inp.eta;
    let bracket = gamma_bar * k_eta.sqrt() * (inner.sqrt() + inner.sqrt().sqrt());
    Ok(BoundBreakdown::new(0.0, bracket, inp.ergodicity()))
}
