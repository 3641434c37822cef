//! Desk-scale integration of the DeTurck graph flow in two reductions,
//! with monitors for `𝔪(t)`, `λ` and discrete evolution residuals.

pub mod equivariant;
pub mod reduction;
pub mod run;
pub mod torus;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use equivariant::EquivariantFlowState;
pub use reduction::reduction_oracle;
pub use run::{run, Background, FlowCase, FlowConfig, FlowOutcome, InitialData, Preset};
pub use torus::TorusFlowState;

/// Default CFL number in `dt ≤ cfl·h²/(2m)`.
pub const DEFAULT_CFL: f64 = 0.4;

/// Abort once a singular value exceeds this.
pub const LAMBDA_GUARD: f64 = 50.0;

/// Abort once the induced metric's condition number exceeds this.
pub const CONDITION_GUARD: f64 = 1e6;

/// Monitor samples of one run. All columns have equal length.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FlowSeries {
    pub times: Vec<f64>,
    pub m_of_t: Vec<f64>,
    pub lambda_max: Vec<f64>,
    pub max_product: Vec<f64>,
    pub residual: Vec<f64>,
    pub scale_m: Vec<f64>,
    pub scale_n: Vec<f64>,
}

/// One row of a [`FlowSeries`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub m_of_t: f64,
    pub lambda_max: f64,
    pub max_product: f64,
    pub residual: f64,
    pub scale_m: f64,
    pub scale_n: f64,
}

pub const CSV_HEADER: &str = "t,m_of_t,lambda_max,max_product,residual,scaleM,scaleN";

impl FlowSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Appends a sample; times must stay strictly increasing.
    pub fn push(&mut self, s: Sample) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if !(s.t > last) {
                return Err(Error::OutOfRange(format!(
                    "sample time {} does not exceed {last}",
                    s.t
                )));
            }
        }
        self.times.push(s.t);
        self.m_of_t.push(s.m_of_t);
        self.lambda_max.push(s.lambda_max);
        self.max_product.push(s.max_product);
        self.residual.push(s.residual);
        self.scale_m.push(s.scale_m);
        self.scale_n.push(s.scale_n);
        Ok(())
    }

    /// CSV with a fixed header; numbers use the shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for k in 0..self.len() {
            let row = [
                self.times[k],
                self.m_of_t[k],
                self.lambda_max[k],
                self.max_product[k],
                self.residual[k],
                self.scale_m[k],
                self.scale_n[k],
            ];
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Largest drop `max_k (w_k − w_{k+1})` of `w_k = e^{a t_k} 𝔪(t_k)`; `≤ 0` means nondecreasing.
    pub fn worst_drop(&self, a: f64) -> f64 {
        let w: Vec<f64> = self
            .times
            .iter()
            .zip(&self.m_of_t)
            .map(|(t, m)| (a * t).exp() * m)
            .collect();
        w.windows(2)
            .map(|p| p[0] - p[1])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest `a ≥ 0` making `e^{at}𝔪(t)` nondecreasing over the samples,
    /// or `None` when some sample has `𝔪 ≤ 0` after a drop.
    pub fn smallest_monotone_rate(&self) -> Option<f64> {
        let mut a = 0.0_f64;
        for k in 0..self.len().saturating_sub(1) {
            let (m0, m1) = (self.m_of_t[k], self.m_of_t[k + 1]);
            if m1 >= m0 {
                continue;
            }
            if m1 <= 0.0 || m0 <= 0.0 {
                return None;
            }
            a = a.max((m0 / m1).ln() / (self.times[k + 1] - self.times[k]));
        }
        Some(a)
    }
}
