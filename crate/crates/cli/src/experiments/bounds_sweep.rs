//! Bound breakdowns over `σ` with operator-derived constants.

use anyhow::Result;
use serde::Serialize;

use lssgld::bounds::convex_bound_corollary_form;
use lssgld::{convex_bound, nonconvex_bound, BoundBreakdown, BoundInputs, LaplacianOperator};

use crate::config::BoundsParams;
use crate::output::ArtifactWriter;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundForm {
    Convex,
    ConvexCorollary,
    Nonconvex,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub form: BoundForm,
    pub sigma: f64,
    pub c0: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub stochastic_term: f64,
    pub discretization_term: f64,
    pub ergodicity_term: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsResult {
    pub rows: Vec<BoundRow>,
}

impl BoundsResult {
    /// Rows of one form, in sweep order.
    pub fn form(&self, form: BoundForm) -> Vec<&BoundRow> {
        self.rows.iter().filter(|r| r.form == form).collect()
    }
}

/// Inputs with unit operator constants; the sweep overwrites them per `σ`.
pub fn base_inputs(p: &BoundsParams) -> BoundInputs {
    BoundInputs {
        k: p.k,
        eta: p.eta,
        beta: p.beta,
        d: p.d,
        omega: p.omega,
        batch_size: p.batch_size,
        lambda_sobolev: p.lambda_sobolev,
        c0: 1.0,
        gamma1: 1.0,
        gamma2: 1.0,
        f0_beta_log_lambda: p.f0_beta_log_lambda,
        b_dissip: p.b_dissip,
        m_smooth: p.m_smooth,
    }
}

pub fn compute(p: &BoundsParams) -> Result<BoundsResult> {
    let base = base_inputs(p);
    let mut rows = Vec::new();
    for form in [BoundForm::Convex, BoundForm::ConvexCorollary, BoundForm::Nonconvex] {
        for &sigma in &p.sigmas {
            let op = LaplacianOperator::build(p.d, sigma)?;
            let inp = base.with_operator_constants(&op);
            let b: BoundBreakdown = match form {
                BoundForm::Convex => convex_bound(&inp)?,
                BoundForm::ConvexCorollary => convex_bound_corollary_form(&inp)?,
                BoundForm::Nonconvex => nonconvex_bound(&inp)?,
            };
            rows.push(BoundRow {
                form,
                sigma,
                c0: inp.c0,
                gamma1: inp.gamma1,
                gamma2: inp.gamma2,
                stochastic_term: b.stochastic_term,
                discretization_term: b.discretization_term,
                ergodicity_term: b.ergodicity_term,
                total: b.total,
            });
        }
    }
    Ok(BoundsResult { rows })
}

pub fn write(r: &BoundsResult, out: &mut ArtifactWriter) -> Result<()> {
    out.write_rows("bounds.csv", &r.rows)?;
    Ok(())
}
