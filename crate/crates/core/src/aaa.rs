//! Greedy adaptive barycentric fitting of SISO data.
//!
//! Both variants add the worst-approximated sample as a new support node in each step and
//! then fit the weights on the remaining samples:
//!
//! * classic: weights span the (numerical) null space of the Loewner matrix `ℒ`, giving a
//!   proper type `(j-1, j-1)` rational function;
//! * strictly proper: weights solve `ℒ ω = -f` in the least-squares sense, giving the
//!   denominator `1 + Σ ω_k/(s - z_k)` and a type `(j-1, j)` function.

use crate::barycentric::{eval_barycentric, BarycentricForm, BarycentricModel};
use crate::dataset::FrequencyDataset;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AaaVariant {
    Classic,
    StrictlyProper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Absolute,
    /// Absolute error divided by `max |f|` over all samples.
    Relative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AaaConfig {
    pub tol: f64,
    /// Cap on the rational degree: `max_order + 1` support points for the classic variant,
    /// `max_order` for the strictly proper one.
    pub max_order: usize,
    pub variant: AaaVariant,
    pub error_kind: ErrorKind,
    /// Take the conjugate partner of a complex support point in the same step.
    pub conjugate_pairs: bool,
}

impl Default for AaaConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_order: 100,
            variant: AaaVariant::Classic,
            error_kind: ErrorKind::Relative,
            conjugate_pairs: true,
        }
    }
}

impl AaaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Validation(format!("AAA tolerance must be positive, got {}", self.tol)));
        }
        if self.max_order == 0 {
            return Err(Error::Validation("AAA max_order must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct AaaFit {
    /// Best model seen. With no support points the classic model is the constant initial
    /// guess carried on a single node; the strictly proper one is identically zero.
    pub model: BarycentricModel,
    /// Sample indices used as support nodes, in selection order.
    pub support: Vec<usize>,
    /// Error of `model` over the non-support samples.
    pub error: f64,
    /// Max error over the non-support samples at every iteration, starting with the initial model.
    pub history: Vec<f64>,
    pub converged: bool,
    /// Some least-squares solve was rank deficient (strictly proper variant).
    pub rank_deficient: bool,
}

/// Classic AAA. The variant field of `cfg` is ignored.
pub fn aaa_fit(d: &FrequencyDataset, cfg: &AaaConfig) -> Result<AaaFit> {
    run(d, cfg, AaaVariant::Classic)
}

/// Strictly proper AAA. The variant field of `cfg` is ignored.
pub fn aaa_fit_strictly_proper(d: &FrequencyDataset, cfg: &AaaConfig) -> Result<AaaFit> {
    run(d, cfg, AaaVariant::StrictlyProper)
}

/// Dispatches on `cfg.variant`.
pub fn fit(d: &FrequencyDataset, cfg: &AaaConfig) -> Result<AaaFit> {
    run(d, cfg, cfg.variant)
}

fn loewner(z: &[C64], f: &[C64], rows: &[usize], cols: &[usize]) -> CMat {
    CMat::from_fn(rows.len(), cols.len(), |i, k| {
        let (a, b) = (rows[i], cols[k]);
        (f[a] - f[b]) / (z[a] - z[b])
    })
}

fn run(d: &FrequencyDataset, cfg: &AaaConfig, variant: AaaVariant) -> Result<AaaFit> {
    cfg.validate()?;
    if !d.is_siso() {
        return Err(Error::Validation("AAA fits SISO data only".into()));
    }
    if d.len() < 2 {
        return Err(Error::Validation(format!("AAA needs at least 2 samples, got {}", d.len())));
    }
    let z = d.points().to_vec();
    let f = d.siso_values()?;
    let n = z.len();
    let fmax = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let scale = match cfg.error_kind {
        ErrorKind::Relative if fmax > 0.0 => fmax,
        _ => 1.0,
    };
    let cap = match variant {
        AaaVariant::Classic => cfg.max_order + 1,
        AaaVariant::StrictlyProper => cfg.max_order,
    };

    let mut model = match variant {
        AaaVariant::Classic => {
            let mean = f.iter().sum::<C64>() / n as f64;
            BarycentricModel::siso(vec![z[0]], vec![mean], vec![linalg::real(1.0)], BarycentricForm::Proper)?
        }
        AaaVariant::StrictlyProper => {
            BarycentricModel::with_dims(1, 1, Vec::new(), Vec::new(), Vec::new(), BarycentricForm::StrictlyProper)?
        }
    };
    let mut support: Vec<usize> = Vec::new();
    let mut in_support = vec![false; n];
    let mut history = Vec::new();
    let mut rank_deficient = false;
    let mut best: Option<(f64, BarycentricModel, Vec<usize>)> = None;

    loop {
        // errors over the residual set; the constant start carries a node that is not support
        let mut worst = (0.0_f64, usize::MAX);
        for i in (0..n).filter(|&i| !in_support[i]) {
            let e = if support.is_empty() && variant == AaaVariant::Classic {
                (f[i] - model.values[0][(0, 0)]).norm()
            } else {
                match eval_barycentric(&model, z[i]) {
                    Ok(v) => (f[i] - v[(0, 0)]).norm(),
                    Err(_) => f64::INFINITY,
                }
            } / scale;
            if e > worst.0 || worst.1 == usize::MAX {
                worst = (e, i);
            }
        }
        let err = worst.0;
        history.push(err);
        if best.as_ref().is_none_or(|b| err < b.0) {
            best = Some((err, model.clone(), support.clone()));
        }
        if worst.1 == usize::MAX {
            // every sample is a support node
            break;
        }
        // guard of the loop and the check on the newly selected point coincide
        if err <= cfg.tol {
            let (_, model, support) = best.expect("best model");
            return Ok(AaaFit { model, support, error: err, history, converged: true, rank_deficient });
        }
        let pick = worst.1;
        let mut add = vec![pick];
        if cfg.conjugate_pairs && z[pick].im != 0.0 {
            if let Some(j) = d.conjugate_partner(pick).filter(|&j| !in_support[j]) {
                add.push(j);
            }
        }
        if support.len() + add.len() > cap {
            break;
        }
        for &i in &add {
            in_support[i] = true;
            support.push(i);
        }
        let rest: Vec<usize> = (0..n).filter(|&i| !in_support[i]).collect();
        if rest.is_empty() {
            log::warn!("AAA consumed every sample as a support node");
            break;
        }
        let l = loewner(&z, &f, &rest, &support);
        let weights: Vec<C64> = match variant {
            AaaVariant::Classic => linalg::smallest_right_singular_vector(&l).iter().copied().collect(),
            AaaVariant::StrictlyProper => {
                let rhs = CMat::from_fn(rest.len(), 1, |i, _| -f[rest[i]]);
                let ls = linalg::lstsq(&l, &rhs);
                rank_deficient |= ls.rank_deficient;
                ls.x.column(0).iter().copied().collect()
            }
        };
        let form = match variant {
            AaaVariant::Classic => BarycentricForm::Proper,
            AaaVariant::StrictlyProper => BarycentricForm::StrictlyProper,
        };
        model = BarycentricModel::siso(
            support.iter().map(|&i| z[i]).collect(),
            support.iter().map(|&i| f[i]).collect(),
            weights,
            form,
        )?;
    }
    let (error, model, support) = best.expect("best model");
    Ok(AaaFit { model, support, error, history, converged: false, rank_deficient })
}
