use std::io::Write;

use crate::error::Result;

use super::spec::SamplerSpec;

/// Recorded iterates of one chain.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleChain {
    /// The spec the chain was run with.
    pub spec: SamplerSpec,
    pub dim: usize,
    /// Post-burn-in, thinned iterates in order.
    pub samples: Vec<Vec<f64>>,
    /// Iteration index `k` of each recorded `x_k`.
    pub steps: Vec<usize>,
    /// Step size of the update that produced each recorded iterate.
    pub etas: Vec<f64>,
    /// Accepted proposals, for Metropolis chains.
    pub accepted: Option<usize>,
}

impl SampleChain {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.spec.seed
    }

    pub fn burn_in(&self) -> usize {
        self.spec.burn_in
    }

    pub fn acceptance_rate(&self) -> Option<f64> {
        self.accepted.map(|a| a as f64 / self.spec.iterations as f64)
    }

    /// Coordinate `j` of every recorded sample.
    pub fn coordinate(&self, j: usize) -> Vec<f64> {
        self.samples.iter().map(|x| x[j]).collect()
    }

    /// Writes `step,eta,x_0,…,x_{d−1}` rows. Floats use the shortest
    /// round-tripping representation, so equal chains give equal bytes.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["step".to_string(), "eta".to_string()];
        header.extend((0..self.dim).map(|j| format!("x_{j}")));
        out.write_record(&header)?;
        let mut record = Vec::with_capacity(self.dim + 2);
        for ((x, step), eta) in self.samples.iter().zip(&self.steps).zip(&self.etas) {
            record.clear();
            record.push(step.to_string());
            record.push(eta.to_string());
            record.extend(x.iter().map(f64::to_string));
            out.write_record(&record)?;
        }
        out.flush()?;
        Ok(())
    }
}
