//! Pole placement in barycentric coordinates (SISO).
//!
//! For nodes `λ_j` with values `h_j` and prescribed poles `ζ_i`, the weights of the strictly
//! proper barycentric model solve `𝒞 ŵ = -1` with the Cauchy matrix
//! `𝒞_(i,j) = 1/(ζ_i - λ_j)`; then `Â = Λ - ŵ 1ᵀ` has exactly the eigenvalues `ζ_i` while
//! the model still interpolates every `h_j`.
//!
//! Poles come either from the user ([`lfpp_fit`]) or from the most dominant eigenvalues of
//! a Loewner surrogate ([`lfapp_fit`]).

use crate::barycentric::{BarycentricForm, BarycentricModel, StateSpaceModel, TransferFunction};
use crate::cur::{is_paired, select_nodes, PointPostprocess};
use crate::dataset::FrequencyDataset;
use crate::error::{Error, Result};
use crate::linalg::{self, pencil_eigen, CMat, C64};
use crate::loewner::{loewner_svd_fit, Truncation};

/// Cauchy condition number above which placement is refused.
pub const MAX_CAUCHY_COND: f64 = 1e14;

/// Eigenvalues with `|Re α| < ZERO_REAL_PART` have no finite dominance.
pub const ZERO_REAL_PART: f64 = 1e-12;

/// `𝒞_(i,j) = 1/(ζ_i - λ_j)`.
pub fn cauchy_matrix(poles: &[C64], nodes: &[C64]) -> CMat {
    CMat::from_fn(poles.len(), nodes.len(), |i, j| (poles[i] - nodes[j]).inv())
}

#[derive(Debug, Clone)]
pub struct Placement {
    pub model: BarycentricModel,
    /// 2-norm condition number of the Cauchy matrix.
    pub cauchy_cond: f64,
}

fn check_distinct(v: &[C64], what: &str) -> Result<()> {
    for i in 0..v.len() {
        for j in 0..i {
            if (v[i] - v[j]).norm() <= 1e-14 * (1.0 + v[i].norm()) {
                return Err(Error::Validation(format!("{what} {} appears twice", v[i])));
            }
        }
    }
    Ok(())
}

/// Strictly proper barycentric model on `nodes` with poles exactly at `poles`.
pub fn place_poles(nodes: &[C64], values: &[C64], poles: &[C64]) -> Result<Placement> {
    let k = nodes.len();
    if k == 0 {
        return Err(Error::Validation("pole placement needs at least one node".into()));
    }
    if poles.len() != k || values.len() != k {
        return Err(Error::Validation(format!(
            "{k} nodes need {k} values and {k} poles, got {} and {}",
            values.len(),
            poles.len()
        )));
    }
    check_distinct(nodes, "node")?;
    check_distinct(poles, "pole")?;
    for (i, &z) in poles.iter().enumerate() {
        for (j, &l) in nodes.iter().enumerate() {
            if (z - l).norm() <= 1e-14 * (1.0 + l.norm()) {
                return Err(Error::NodeCollision { i, j, left: z, right: l });
            }
        }
    }
    let c = cauchy_matrix(poles, nodes);
    let cond = linalg::cond2(&c);
    if !(cond <= MAX_CAUCHY_COND) {
        return Err(Error::IllConditioned { cond, poles: poles.to_vec(), nodes: nodes.to_vec() });
    }
    let rhs = CMat::from_element(k, 1, linalg::real(-1.0));
    let w = linalg::solve(&c, &rhs)
        .ok_or_else(|| Error::IllConditioned { cond, poles: poles.to_vec(), nodes: nodes.to_vec() })?;
    let model = BarycentricModel::siso(
        nodes.to_vec(),
        values.to_vec(),
        w.column(0).iter().copied().collect(),
        BarycentricForm::StrictlyProper,
    )?;
    Ok(Placement { model, cauchy_cond: cond })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceEntry {
    pub eigenvalue: C64,
    pub dominance: f64,
    pub stable: bool,
}

/// Finite eigenvalues sorted by descending dominance
/// `d_i = ‖C x_i α_i y_iᴴ B‖₂ / |Re α_i|` with `Yᴴ E X = I`.
#[derive(Debug, Clone, Default)]
pub struct DominanceTable {
    pub entries: Vec<DominanceEntry>,
    /// Eigenvalues left out because their real part is (numerically) zero.
    pub excluded: Vec<C64>,
    /// Number of infinite eigenvalues of the pencil.
    pub infinite: usize,
}

pub fn dominance(mdl: &StateSpaceModel) -> Result<DominanceTable> {
    let eg = pencil_eigen(&mdl.a, mdl.e.as_ref())?;
    let mut table = DominanceTable { infinite: eg.infinite, ..Default::default() };
    for (i, &alpha) in eg.values.iter().enumerate() {
        if alpha.re.abs() < ZERO_REAL_PART {
            log::warn!("eigenvalue {alpha} has zero real part; excluded from dominance ranking");
            table.excluded.push(alpha);
            continue;
        }
        // C x α yᴴ B is rank one: its 2-norm is |α| ‖C x‖ ‖yᴴ B‖
        let cx = (&mdl.c * eg.right.column(i)).norm();
        let yb = (eg.left_h.row(i) * &mdl.b).norm();
        let d = cx * alpha.norm() * yb / alpha.re.abs();
        table.entries.push(DominanceEntry { eigenvalue: alpha, dominance: d, stable: alpha.re < 0.0 });
    }
    table.entries.sort_by(|a, b| b.dominance.total_cmp(&a.dominance));
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub enum LfappMode {
    /// Most dominant eigenvalues of the Loewner surrogate, nodes from CUR selection.
    Auto,
    /// Eigenvalues nearest to the marked peak frequencies (rad/s); nodes at the sample of
    /// smallest `|H|` between consecutive enforced pole frequencies.
    Modified { peaks: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LfappOptions {
    pub stable_only: bool,
    pub mode: LfappMode,
    /// Truncation of the Loewner surrogate that supplies the candidate poles.
    pub truncation: Truncation,
    /// Node selection for the automatic mode.
    pub points: PointPostprocess,
}

impl Default for LfappOptions {
    fn default() -> Self {
        Self {
            stable_only: true,
            mode: LfappMode::Auto,
            truncation: Truncation::Tolerance(1e-10),
            points: PointPostprocess::MergedAlternate,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PolePlacementFit {
    pub model: BarycentricModel,
    pub poles: Vec<C64>,
    pub nodes: Vec<C64>,
    pub cauchy_cond: f64,
    /// Order of the Loewner surrogate used for pole candidates or node values, if any.
    pub surrogate_order: Option<usize>,
    /// Loewner singular values `[L Ls]` of that surrogate.
    pub surrogate_singular_values: Vec<f64>,
    pub dominance: Option<DominanceTable>,
    pub warnings: Vec<String>,
}

/// Relative threshold under which an eigenvalue counts as real.
const REAL_TOL: f64 = 1e-8;

fn is_real_eig(a: C64) -> bool {
    a.im.abs() <= REAL_TOL * a.norm().max(f64::MIN_POSITIVE)
}

/// Picks `k` poles in table order. With `paired`, complex eigenvalues enter together with
/// their exact conjugate and real ones as exact reals.
fn pick_dominant(table: &DominanceTable, k: usize, stable_only: bool, paired: bool) -> Result<Vec<C64>> {
    let candidates: Vec<C64> = table
        .entries
        .iter()
        .filter(|e| !stable_only || e.stable)
        .map(|e| e.eigenvalue)
        .collect();
    let mut poles: Vec<C64> = Vec::with_capacity(k);
    let near = |a: C64, b: C64| (a - b).norm() <= 1e-6 * (1.0 + a.norm());
    for &a in &candidates {
        if poles.len() == k {
            break;
        }
        if !paired {
            poles.push(a);
            continue;
        }
        if poles.iter().any(|&p| near(p, a) || near(p, a.conj())) {
            continue;
        }
        if is_real_eig(a) {
            poles.push(C64::new(a.re, 0.0));
        } else if poles.len() + 2 <= k {
            let upper = if a.im > 0.0 { a } else { a.conj() };
            poles.push(upper);
            poles.push(upper.conj());
        }
    }
    if poles.len() < k {
        let available = if paired {
            // count what a pairing-respecting choice could reach
            let mut n = 0;
            let mut seen: Vec<C64> = Vec::new();
            for &a in &candidates {
                if seen.iter().any(|&p| near(p, a) || near(p, a.conj())) {
                    continue;
                }
                seen.push(a);
                n += if is_real_eig(a) { 1 } else { 2 };
            }
            n
        } else {
            candidates.len()
        };
        return Err(Error::NotEnoughPoles { requested: k, available });
    }
    Ok(poles)
}

fn siso_check(d: &FrequencyDataset) -> Result<()> {
    if !d.is_siso() {
        return Err(Error::Validation("pole placement is implemented for SISO data only".into()));
    }
    Ok(())
}

fn node_values(d: &FrequencyDataset, nodes: &[C64]) -> Result<Vec<C64>> {
    nodes
        .iter()
        .map(|&z| {
            d.find_point(z)
                .map(|i| d.values()[i][(0, 0)])
                .ok_or_else(|| Error::Validation(format!("node {z} is not a sample point")))
        })
        .collect()
}

/// Automatic pole placement.
///
/// The candidate poles are the eigenvalues of a truncated Loewner model of the data. In
/// the automatic mode the `k` most dominant ones are used (only stable ones with
/// `stable_only`) and the nodes come from CUR selection. On conjugate-closed data poles and
/// nodes are conjugate-closed, so `k` must be even when nodes are complex.
pub fn lfapp_fit(d: &FrequencyDataset, k: usize, opts: &LfappOptions) -> Result<PolePlacementFit> {
    siso_check(d)?;
    if k == 0 {
        return Err(Error::Validation("number of poles must be >= 1".into()));
    }
    let paired = is_paired(d);
    let surrogate = loewner_svd_fit(d, opts.truncation)?;
    let mut warnings = surrogate.warnings.clone();
    let table = dominance(&surrogate.model)?;
    if !table.excluded.is_empty() {
        warnings.push(format!("{} eigenvalues with zero real part excluded", table.excluded.len()));
    }
    let (poles, nodes) = match &opts.mode {
        LfappMode::Auto => {
            let poles = pick_dominant(&table, k, opts.stable_only, paired)?;
            let (nodes, w) = select_nodes(d, k, opts.points)?;
            warnings.extend(w);
            (poles, nodes)
        }
        LfappMode::Modified { peaks } => modified_selection(d, &table, k, peaks, opts.stable_only, paired)?,
    };
    let values = node_values(d, &nodes)?;
    let placed = place_poles(&nodes, &values, &poles)?;
    Ok(PolePlacementFit {
        model: placed.model,
        poles,
        nodes,
        cauchy_cond: placed.cauchy_cond,
        surrogate_order: Some(surrogate.order),
        surrogate_singular_values: surrogate.row_singular_values,
        dominance: Some(table),
        warnings,
    })
}

fn modified_selection(
    d: &FrequencyDataset,
    table: &DominanceTable,
    k: usize,
    peaks: &[f64],
    stable_only: bool,
    paired: bool,
) -> Result<(Vec<C64>, Vec<C64>)> {
    if peaks.is_empty() {
        return Err(Error::Validation("modified mode needs at least one peak frequency".into()));
    }
    let per_peak = if paired { 2 } else { 1 };
    if k != per_peak * peaks.len() {
        return Err(Error::Validation(format!(
            "{} peaks fix {} poles, but k = {k}",
            peaks.len(),
            per_peak * peaks.len()
        )));
    }
    let candidates: Vec<C64> = table
        .entries
        .iter()
        .map(|e| e.eigenvalue)
        .filter(|a| !stable_only || a.re < 0.0)
        .filter(|a| !paired || a.im > 0.0 && !is_real_eig(*a))
        .collect();
    let mut chosen: Vec<C64> = Vec::new();
    for &w in peaks {
        let best = candidates
            .iter()
            .copied()
            .filter(|a| !chosen.contains(a))
            .min_by(|a, b| (a.im - w).abs().total_cmp(&(b.im - w).abs()))
            .ok_or(Error::NotEnoughPoles { requested: k, available: per_peak * chosen.len() })?;
        chosen.push(best);
    }
    let poles: Vec<C64> = if paired { chosen.iter().flat_map(|&a| [a, a.conj()]).collect() } else { chosen.clone() };

    // nodes: smallest |H| between consecutive enforced pole frequencies, then above the last
    let mut freqs: Vec<f64> = chosen.iter().map(|a| a.im).collect();
    freqs.sort_by(f64::total_cmp);
    let usable: Vec<usize> = (0..d.len()).filter(|&i| !paired || d.points()[i].im > 0.0).collect();
    let argmin_in = |lo: f64, hi: f64| {
        usable
            .iter()
            .copied()
            .filter(|&i| {
                let w = d.points()[i].im;
                w > lo && w < hi
            })
            .min_by(|&a, &b| d.values()[a][(0, 0)].norm().total_cmp(&d.values()[b][(0, 0)].norm()))
    };
    let mut picks = Vec::with_capacity(freqs.len());
    for win in freqs.windows(2) {
        let i = argmin_in(win[0], win[1]).ok_or_else(|| {
            Error::Validation(format!("no sample between pole frequencies {} and {}", win[0], win[1]))
        })?;
        picks.push(i);
    }
    let last = *freqs.last().expect("nonempty");
    let first = freqs[0];
    let tail = argmin_in(last, f64::INFINITY)
        .or_else(|| argmin_in(f64::NEG_INFINITY, first))
        .ok_or_else(|| Error::Validation("no sample outside the enforced pole frequencies".into()))?;
    picks.push(tail);
    let mut nodes: Vec<C64> = Vec::new();
    for i in picks {
        let z = d.points()[i];
        nodes.push(z);
        if paired {
            nodes.push(z.conj());
        }
    }
    Ok((poles, nodes))
}

/// Orders a list as adjacent conjugate pairs, adding missing conjugates of non-real
/// entries. Real entries stay single.
pub fn conjugate_pair_up(list: &[C64]) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::with_capacity(2 * list.len());
    let near = |a: C64, b: C64| (a - b).norm() <= 1e-13 * (1.0 + a.norm());
    for &z in list {
        if out.iter().any(|&o| near(o, z)) {
            continue;
        }
        out.push(z);
        if z.im != 0.0 {
            out.push(z.conj());
        }
    }
    out
}

/// Pole placement with user-given nodes and poles.
///
/// Node values come from the data when a node is a sample point, otherwise from a
/// truncated Loewner model of the data. On conjugate-closed data both lists are completed
/// to conjugate pairs.
pub fn lfpp_fit(d: &FrequencyDataset, nodes: &[C64], poles: &[C64], trunc: Truncation) -> Result<PolePlacementFit> {
    siso_check(d)?;
    let (nodes, poles) = if is_paired(d) {
        (conjugate_pair_up(nodes), conjugate_pair_up(poles))
    } else {
        (nodes.to_vec(), poles.to_vec())
    };
    let mut surrogate = None;
    let mut values = Vec::with_capacity(nodes.len());
    for &z in &nodes {
        let v = match d.find_point(z) {
            Some(i) => d.values()[i][(0, 0)],
            None => {
                if surrogate.is_none() {
                    surrogate = Some(loewner_svd_fit(d, trunc)?);
                }
                surrogate.as_ref().expect("surrogate").model.eval(z)?[(0, 0)]
            }
        };
        values.push(v);
    }
    let placed = place_poles(&nodes, &values, &poles)?;
    Ok(PolePlacementFit {
        model: placed.model,
        poles,
        nodes,
        cauchy_cond: placed.cauchy_cond,
        surrogate_order: surrogate.as_ref().map(|s| s.order),
        surrogate_singular_values: surrogate.map(|s| s.row_singular_values).unwrap_or_default(),
        dominance: None,
        warnings: Vec::new(),
    })
}

/// Projection-based pole placement that needs the full model. Used as a reference for
/// [`place_poles`].
pub mod oracle {
    use super::*;
    use crate::barycentric::MAX_EVAL_COND;

    fn resolvent(mdl: &StateSpaceModel, s: C64, rhs: &CMat) -> Result<CMat> {
        let pencil = mdl.e_matrix() * s - &mdl.a;
        linalg::solve_checked(&pencil, rhs, MAX_EVAL_COND).map_err(|cond| Error::Evaluation { s, cond })
    }

    /// `V = [(λ_j E - A)⁻¹ B]`, `C_ζ` a null row vector of `V`, `Wᴴ` with rows
    /// `C_ζ (ζ_i E - A)⁻¹`; returns `(WᴴEV, WᴴAV, WᴴB, CV)`.
    pub fn intrusive_pole_placement(mdl: &StateSpaceModel, nodes: &[C64], poles: &[C64]) -> Result<StateSpaceModel> {
        if mdl.b.ncols() != 1 || mdl.c.nrows() != 1 {
            return Err(Error::Validation("intrusive placement is SISO only".into()));
        }
        let (n, k) = (mdl.order(), nodes.len());
        if poles.len() != k || k == 0 {
            return Err(Error::Validation("need as many poles as nodes".into()));
        }
        if k >= n {
            return Err(Error::Validation(format!("{k} nodes leave no null vector in a model of order {n}")));
        }
        let mut v = CMat::zeros(n, k);
        for (j, &l) in nodes.iter().enumerate() {
            v.set_column(j, &resolvent(mdl, l, &mdl.b)?.column(0));
        }
        let null = linalg::smallest_right_singular_vector(&v.transpose());
        let c_zeta = CMat::from_row_slice(1, n, null.as_slice());
        if (&c_zeta * &v).norm() > 1e-10 * v.norm() {
            return Err(Error::Numerical("no row vector annihilates the node resolvents".into()));
        }
        let e = mdl.e_matrix();
        let mut wh = CMat::zeros(k, n);
        for (i, &z) in poles.iter().enumerate() {
            // row C_ζ (ζ E - A)⁻¹ = ((ζ E - A)ᵀ⁻¹ C_ζᵀ)ᵀ
            let pencil = &e * z - &mdl.a;
            let row = linalg::solve_checked(&pencil.transpose(), &c_zeta.transpose(), MAX_EVAL_COND)
                .map_err(|cond| Error::Evaluation { s: z, cond })?;
            wh.set_row(i, &row.transpose().row(0));
        }
        StateSpaceModel::new(Some(&wh * &e * &v), &wh * &mdl.a * &v, &wh * &mdl.b, &mdl.c * &v)
    }
}
