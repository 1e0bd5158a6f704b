//! Loewner and shifted Loewner matrices from partitioned data, and the resulting
//! interpolatory descriptor models (unprocessed or SVD-projected).
//!
//! MIMO data populate the matrices block-wise with full `p x m` blocks, so block `(i, j)`
//! of the Loewner matrix is `(v_i - w_j)/(μ_i - λ_j)`.

use nalgebra::DMatrix;

use crate::barycentric::{check_conjugate_pairs, realification_matrix, StateSpaceModel};
use crate::dataset::FrequencyDataset;
use crate::error::{Error, Result};
use crate::linalg::{self, kron_identity, real, CMat, C64};

/// Default relative tolerance for the numerical rank of exact data.
pub const DEFAULT_RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionScheme {
    /// Conjugate pairs travel as units; units alternate between the left and right sets.
    Alternate,
    /// First half of the units to the left set, the rest to the right.
    HalfHalf,
    /// Explicit disjoint index sets covering the dataset.
    Custom { left: Vec<usize>, right: Vec<usize> },
}

/// Left data `(μ_i, v_i)` and right data `(λ_j, w_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub left_points: Vec<C64>,
    pub left_values: Vec<CMat>,
    pub right_points: Vec<C64>,
    pub right_values: Vec<CMat>,
    pub left_indices: Vec<usize>,
    pub right_indices: Vec<usize>,
}

impl Partition {
    pub fn from_indices(d: &FrequencyDataset, left: Vec<usize>, right: Vec<usize>) -> Result<Self> {
        let n = d.len();
        let mut seen = vec![false; n];
        for &i in left.iter().chain(&right) {
            if i >= n {
                return Err(Error::Validation(format!("partition index {i} out of range (n = {n})")));
            }
            if seen[i] {
                return Err(Error::Validation(format!("partition index {i} used twice")));
            }
            seen[i] = true;
        }
        if left.is_empty() || right.is_empty() {
            return Err(Error::Validation("both partition sides must be nonempty".into()));
        }
        Ok(Self {
            left_points: left.iter().map(|&i| d.points()[i]).collect(),
            left_values: left.iter().map(|&i| d.values()[i].clone()).collect(),
            right_points: right.iter().map(|&i| d.points()[i]).collect(),
            right_values: right.iter().map(|&i| d.values()[i].clone()).collect(),
            left_indices: left,
            right_indices: right,
        })
    }
}

/// Groups sample indices into units: a conjugate pair `(i, partner)` or a single index.
pub(crate) fn conjugate_units(d: &FrequencyDataset) -> Vec<Vec<usize>> {
    let mut used = vec![false; d.len()];
    let mut units = Vec::new();
    for i in 0..d.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut unit = vec![i];
        if let Some(j) = d.conjugate_partner(i).filter(|&j| !used[j]) {
            used[j] = true;
            // upper half-plane member first
            if d.points()[i].im > 0.0 {
                unit.push(j);
            } else {
                unit.insert(0, j);
            }
        }
        units.push(unit);
    }
    units
}

/// Splits a dataset into left and right data. Odd splits give the extra unit to the left.
pub fn partition(d: &FrequencyDataset, scheme: &PartitionScheme) -> Result<Partition> {
    if d.len() < 2 {
        return Err(Error::Validation(format!("need at least 2 samples to partition, got {}", d.len())));
    }
    let (left, right) = match scheme {
        PartitionScheme::Custom { left, right } => {
            if left.len() + right.len() != d.len() {
                return Err(Error::Validation("custom partition must cover the dataset".into()));
            }
            (left.clone(), right.clone())
        }
        PartitionScheme::Alternate => {
            let units = conjugate_units(d);
            let mut left = Vec::new();
            let mut right = Vec::new();
            for (u, unit) in units.into_iter().enumerate() {
                if u % 2 == 0 {
                    left.extend(unit);
                } else {
                    right.extend(unit);
                }
            }
            (left, right)
        }
        PartitionScheme::HalfHalf => {
            let units = conjugate_units(d);
            let split = units.len().div_ceil(2);
            let left = units[..split].concat();
            let right = units[split..].concat();
            (left, right)
        }
    };
    if right.is_empty() {
        return Err(Error::Validation("partition leaves the right set empty (a single conjugate pair?)".into()));
    }
    Partition::from_indices(d, left, right)
}

/// Block Loewner pencil with its data matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct LoewnerPencil {
    /// `q p x k m`
    pub loewner: CMat,
    /// `q p x k m`
    pub shifted: CMat,
    /// Stacked left values, `q p x m`.
    pub v: CMat,
    /// Concatenated right values, `p x k m`.
    pub w: CMat,
    pub left_points: Vec<C64>,
    pub right_points: Vec<C64>,
    pub outputs: usize,
    pub inputs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SylvesterResiduals {
    /// `‖M L - L Λ - V 1ᵀ + 1 W‖ / scale`
    pub loewner: f64,
    /// `‖M Ls - Ls Λ - M V 1ᵀ + 1 W Λ‖ / scale`
    pub shifted: f64,
    /// `‖Ls - L Λ - V 1ᵀ‖ / scale`
    pub relation: f64,
}

impl SylvesterResiduals {
    pub fn max(&self) -> f64 {
        self.loewner.max(self.shifted).max(self.relation)
    }
}

impl LoewnerPencil {
    pub fn left_count(&self) -> usize {
        self.left_points.len()
    }

    pub fn right_count(&self) -> usize {
        self.right_points.len()
    }

    fn diag_blocks(points: &[C64], block: usize) -> CMat {
        kron_identity(&CMat::from_diagonal(&nalgebra::DVector::from_vec(points.to_vec())), block)
    }

    fn ones(n: usize, block: usize, row: bool) -> CMat {
        let o = if row { CMat::from_element(1, n, real(1.0)) } else { CMat::from_element(n, 1, real(1.0)) };
        kron_identity(&o, block)
    }

    /// Relative residuals of the Sylvester identities satisfied by `(L, Ls)`.
    pub fn sylvester_residuals(&self) -> SylvesterResiduals {
        let (p, m) = (self.outputs, self.inputs);
        let mm = Self::diag_blocks(&self.left_points, p);
        let lam = Self::diag_blocks(&self.right_points, m);
        let ones_row = Self::ones(self.right_count(), m, true);
        let ones_col = Self::ones(self.left_count(), p, false);
        let v1 = &self.v * &ones_row;
        let w1 = &ones_col * &self.w;
        let (l, ls) = (&self.loewner, &self.shifted);
        let node_scale = linalg::norm2(&mm).max(linalg::norm2(&lam));

        let r1 = &mm * l - l * &lam - &v1 + &w1;
        let s1 = l.norm() * node_scale + v1.norm() + w1.norm();
        let mv1 = &mm * &v1;
        let w1l = &w1 * &lam;
        let r2 = &mm * ls - ls * &lam - &mv1 + &w1l;
        let s2 = ls.norm() * node_scale + mv1.norm() + w1l.norm();
        let r3 = ls - l * &lam - &v1;
        let s3 = ls.norm() + l.norm() * node_scale + v1.norm();
        let rel = |r: &CMat, s: f64| if s > 0.0 { r.norm() / s } else { r.norm() };
        SylvesterResiduals { loewner: rel(&r1, s1), shifted: rel(&r2, s2), relation: rel(&r3, s3) }
    }

    /// Real-valued pencil `(J_μ L J_λᴴ, J_μ Ls J_λᴴ, J_μ V, W J_λᴴ)`; both node sets must be
    /// arranged as adjacent conjugate pairs.
    pub fn realify(&self) -> Result<LoewnerPencil> {
        check_conjugate_pairs(&self.left_points)?;
        check_conjugate_pairs(&self.right_points)?;
        let jl = realification_matrix(self.left_count() / 2, self.outputs);
        let jr = realification_matrix(self.right_count() / 2, self.inputs);
        let jrh = jr.adjoint();
        let parts = [&jl * &self.loewner * &jrh, &jl * &self.shifted * &jrh, &jl * &self.v, &self.w * &jrh];
        let scale = parts.iter().map(|m| m.iter().map(|v| v.norm()).fold(0.0, f64::max)).fold(1.0, f64::max);
        let residue = parts.iter().map(linalg::max_imag).fold(0.0, f64::max);
        if residue > 1e-10 * scale {
            return Err(Error::ImaginaryResidue { residue });
        }
        let [l, ls, v, w] = parts.map(|m| m.map(|z| real(z.re)));
        Ok(LoewnerPencil { loewner: l, shifted: ls, v, w, ..self.clone() })
    }

    pub fn is_real(&self) -> bool {
        [&self.loewner, &self.shifted, &self.v, &self.w].iter().all(|m| m.iter().all(|z| z.im == 0.0))
    }
}

/// Assembles the block Loewner pencil.
pub fn build_pencil(part: &Partition) -> Result<LoewnerPencil> {
    let q = part.left_points.len();
    let k = part.right_points.len();
    if q == 0 || k == 0 {
        return Err(Error::Validation("empty partition side".into()));
    }
    let (p, m) = part.left_values[0].shape();
    if part.left_values.iter().chain(&part.right_values).any(|v| v.shape() != (p, m)) {
        return Err(Error::Validation("inconsistent block dimensions".into()));
    }
    for (i, &mu) in part.left_points.iter().enumerate() {
        for (j, &la) in part.right_points.iter().enumerate() {
            if (mu - la).norm() <= 1e-14 * (1.0 + mu.norm()) {
                return Err(Error::NodeCollision { i, j, left: mu, right: la });
            }
        }
    }
    let mut l = CMat::zeros(q * p, k * m);
    let mut ls = CMat::zeros(q * p, k * m);
    let mut v = CMat::zeros(q * p, m);
    let mut w = CMat::zeros(p, k * m);
    for i in 0..q {
        v.view_mut((i * p, 0), (p, m)).copy_from(&part.left_values[i]);
    }
    for j in 0..k {
        w.view_mut((0, j * m), (p, m)).copy_from(&part.right_values[j]);
    }
    for i in 0..q {
        let (mu, vi) = (part.left_points[i], &part.left_values[i]);
        for j in 0..k {
            let (la, wj) = (part.right_points[j], &part.right_values[j]);
            let d = (mu - la).inv();
            let block = (vi - wj) * d;
            let sblock = (vi * mu - wj * la) * d;
            l.view_mut((i * p, j * m), (p, m)).copy_from(&block);
            ls.view_mut((i * p, j * m), (p, m)).copy_from(&sblock);
        }
    }
    Ok(LoewnerPencil {
        loewner: l,
        shifted: ls,
        v,
        w,
        left_points: part.left_points.clone(),
        right_points: part.right_points.clone(),
        outputs: p,
        inputs: m,
    })
}

/// `E = -L, A = -Ls, B = V, C = W` for a square, regular pencil.
pub fn unprocessed_model(pen: &LoewnerPencil) -> Result<StateSpaceModel> {
    let (rows, cols) = pen.loewner.shape();
    if rows != cols {
        return Err(Error::Validation(format!(
            "unprocessed model needs a square pencil, got {rows}x{cols}; use SVD truncation"
        )));
    }
    // regularity probe: s L - Ls must be invertible somewhere
    let scale = pen
        .left_points
        .iter()
        .chain(&pen.right_points)
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(1.0);
    let probes = [C64::new(0.31, 0.77), C64::new(-0.53, 1.21), C64::new(0.11, -0.43)];
    let regular = probes.iter().any(|&z| {
        let s = z * scale;
        linalg::cond2(&(&pen.loewner * s - &pen.shifted)) < 1e13
    });
    if !regular {
        return Err(Error::SingularPencil);
    }
    StateSpaceModel::new(Some(-&pen.loewner), -&pen.shifted, pen.v.clone(), pen.w.clone())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    Order(usize),
    /// Keep singular values `>= τ σ_max`.
    Tolerance(f64),
}

/// Projected Loewner model together with its rank diagnostics.
#[derive(Debug, Clone)]
pub struct TruncatedModel {
    pub model: StateSpaceModel,
    pub order: usize,
    /// Singular values of `[L Ls]`.
    pub row_singular_values: Vec<f64>,
    /// Singular values of `[L; Ls]`.
    pub col_singular_values: Vec<f64>,
    /// Numerical ranks of the two augmented matrices at the rank tolerance.
    pub row_rank: usize,
    pub col_rank: usize,
    /// Set when a requested order exceeded the numerical rank and was reduced.
    pub clamped: bool,
    pub warnings: Vec<String>,
}

/// Number of singular values `>= tol · σ_max` (input sorted descending).
pub fn numerical_rank(sv: &[f64], tol: f64) -> usize {
    let Some(&smax) = sv.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    sv.iter().take_while(|&&s| s >= tol * smax).count()
}

fn bases(m: &CMat, r: usize, is_real: bool) -> (CMat, CMat, Vec<f64>) {
    if is_real {
        let re: DMatrix<f64> = m.map(|z| z.re);
        let svd = nalgebra::SVD::new(re, true, true);
        let u = svd.u.expect("u");
        let vt = svd.v_t.expect("v");
        let r = r.min(u.ncols());
        let left = u.columns(0, r).map(real);
        let right = vt.rows(0, r).transpose().map(real);
        (left, right, svd.singular_values.iter().copied().collect())
    } else {
        linalg::svd_bases(m, r)
    }
}

/// SVD-projected model `Ẽ = -XᴴLY, Ã = -XᴴLsY, B̃ = XᴴV, C̃ = WY` with `X` the leading left
/// singular vectors of `[L Ls]` and `Y` the leading right singular vectors of `[L; Ls]`.
///
/// With a tolerance the order is the smaller of the two numerical ranks. A requested order
/// above the numerical rank (at [`DEFAULT_RANK_TOL`]) is clamped with a warning.
pub fn truncated_model(pen: &LoewnerPencil, trunc: Truncation) -> Result<TruncatedModel> {
    let (rows, cols) = pen.loewner.shape();
    let is_real = pen.is_real();
    let mut row_aug = CMat::zeros(rows, 2 * cols);
    row_aug.view_mut((0, 0), (rows, cols)).copy_from(&pen.loewner);
    row_aug.view_mut((0, cols), (rows, cols)).copy_from(&pen.shifted);
    let mut col_aug = CMat::zeros(2 * rows, cols);
    col_aug.view_mut((0, 0), (rows, cols)).copy_from(&pen.loewner);
    col_aug.view_mut((rows, 0), (rows, cols)).copy_from(&pen.shifted);

    let max_r = rows.min(cols);
    let (left_all, _, row_sv) = bases(&row_aug, max_r, is_real);
    let (_, right_all, col_sv) = bases(&col_aug, max_r, is_real);

    let mut warnings = Vec::new();
    let mut clamped = false;
    let (order, row_rank, col_rank) = match trunc {
        Truncation::Tolerance(tau) => {
            if !(tau > 0.0) {
                return Err(Error::Validation(format!("tolerance must be positive, got {tau}")));
            }
            let r1 = numerical_rank(&row_sv, tau);
            let r2 = numerical_rank(&col_sv, tau);
            if r1 != r2 {
                warnings.push(format!("augmented ranks disagree ([L Ls]: {r1}, [L; Ls]: {r2}); using {}", r1.min(r2)));
            }
            (r1.min(r2).min(max_r), r1, r2)
        }
        Truncation::Order(r) => {
            if r == 0 {
                return Err(Error::Validation("truncation order must be >= 1".into()));
            }
            let r1 = numerical_rank(&row_sv, DEFAULT_RANK_TOL);
            let r2 = numerical_rank(&col_sv, DEFAULT_RANK_TOL);
            let limit = r1.min(r2).min(max_r).max(1);
            if r > limit {
                let msg = format!("requested order {r} exceeds numerical rank {limit}; clamped");
                log::warn!("{msg}");
                warnings.push(msg);
                clamped = true;
            }
            (r.min(limit), r1, r2)
        }
    };
    if order == 0 {
        return Err(Error::Numerical("numerical rank is zero; nothing to project".into()));
    }
    let x = left_all.columns(0, order).into_owned();
    let y = right_all.columns(0, order).into_owned();
    let xh = x.adjoint();
    let e = -(&xh * &pen.loewner * &y);
    let a = -(&xh * &pen.shifted * &y);
    let b = &xh * &pen.v;
    let c = &pen.w * &y;
    let mut model = StateSpaceModel::new(Some(e), a, b, c)?;
    if is_real {
        model = crate::barycentric::zero_imaginary(model)?;
    }
    Ok(TruncatedModel {
        model,
        order,
        row_singular_values: row_sv,
        col_singular_values: col_sv,
        row_rank,
        col_rank,
        clamped,
        warnings,
    })
}

/// Loewner-SVD surrogate of a dataset: alternate partition, real-valued pencil when both
/// point sets come in conjugate pairs, then SVD truncation.
pub fn loewner_svd_fit(d: &FrequencyDataset, trunc: Truncation) -> Result<TruncatedModel> {
    let pen = build_pencil(&partition(d, &PartitionScheme::Alternate)?)?;
    let pairs_up = check_conjugate_pairs(&pen.left_points).is_ok() && check_conjugate_pairs(&pen.right_points).is_ok();
    let pen = if pairs_up { pen.realify()? } else { pen };
    truncated_model(&pen, trunc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barycentric::eval_state_space;
    use crate::dataset::{generate_synthetic, logspace};
    use crate::linalg::c64;

    fn first_order_data(points: &[f64]) -> FrequencyDataset {
        let pts: Vec<C64> = points.iter().map(|&x| real(x)).collect();
        let vals = pts.iter().map(|&s| (s + 1.0).inv()).collect();
        FrequencyDataset::siso(pts, vals).unwrap()
    }

    #[test]
    fn partition_counts() {
        let d = first_order_data(&[1.0, 2.0, 3.0, 4.0]);
        let p = partition(&d, &PartitionScheme::Alternate).unwrap();
        assert_eq!((p.left_points.len(), p.right_points.len()), (2, 2));
        let d = first_order_data(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let p = partition(&d, &PartitionScheme::HalfHalf).unwrap();
        assert_eq!((p.left_points.len(), p.right_points.len()), (3, 2));
    }

    #[test]
    fn alternate_keeps_conjugate_pairs_together() {
        let pts: Vec<C64> = [1.0, 2.0, 3.0, 4.0].iter().map(|&w| c64(0.0, w)).collect();
        let vals = pts.iter().map(|&s| (s + 1.0).inv()).collect();
        let d = FrequencyDataset::siso(pts, vals).unwrap().conjugate_close().unwrap();
        assert_eq!(d.len(), 8);
        let p = partition(&d, &PartitionScheme::Alternate).unwrap();
        for side in [&p.left_indices, &p.right_indices] {
            let sub = d.select(side).unwrap();
            assert!(sub.is_conjugate_closed());
            check_conjugate_pairs(sub.points()).unwrap();
        }
    }

    #[test]
    fn partition_errors() {
        let d = first_order_data(&[1.0]);
        assert!(partition(&d, &PartitionScheme::Alternate).is_err());
        let d = first_order_data(&[1.0, 2.0, 3.0]);
        let bad = PartitionScheme::Custom { left: vec![0, 1], right: vec![1] };
        assert!(partition(&d, &bad).is_err());
        let ok = PartitionScheme::Custom { left: vec![2], right: vec![0, 1] };
        assert_eq!(partition(&d, &ok).unwrap().left_points, vec![real(3.0)]);
    }

    #[test]
    fn one_by_one_pencil() {
        // μ = 1 (v = 1/2), λ = 2 (w = 1/3): L = -1/6, Ls = 1/6
        let d = first_order_data(&[1.0, 2.0]);
        let pen = build_pencil(&partition(&d, &PartitionScheme::Alternate).unwrap()).unwrap();
        assert!((pen.loewner[(0, 0)] - real(-1.0 / 6.0)).norm() < 1e-16);
        assert!((pen.shifted[(0, 0)] - real(1.0 / 6.0)).norm() < 1e-16);
        let m = unprocessed_model(&pen).unwrap();
        let h0 = eval_state_space(&m, real(0.0)).unwrap()[(0, 0)];
        assert!((h0 - real(1.0)).norm() < 1e-14);
        let h1 = eval_state_space(&m, real(1.0)).unwrap()[(0, 0)];
        assert!((h1 - real(0.5)).norm() < 1e-14);
    }

    #[test]
    fn constant_data_gives_zero_loewner() {
        let c = c64(2.0, -1.0);
        let pts: Vec<C64> = (1..=6).map(|k| c64(0.0, k as f64)).collect();
        let d = FrequencyDataset::siso(pts.clone(), vec![c; 6]).unwrap();
        let pen = build_pencil(&partition(&d, &PartitionScheme::Alternate).unwrap()).unwrap();
        assert!(pen.loewner.iter().all(|z| *z == real(0.0)));
        let t = truncated_model(&pen, Truncation::Order(1)).unwrap();
        for &s in &pts {
            let h = eval_state_space(&t.model, s).unwrap()[(0, 0)];
            assert!((h - c).norm() <= 1e-10 * c.norm());
        }
    }

    #[test]
    fn relation_residual_small() {
        let d = first_order_data(&[1.0, 2.0, 3.0, 4.0]);
        let part = PartitionScheme::Custom { left: vec![0, 2], right: vec![1, 3] };
        let pen = build_pencil(&partition(&d, &part).unwrap()).unwrap();
        assert_eq!(pen.left_points, vec![real(1.0), real(3.0)]);
        let lam = CMat::from_diagonal(&nalgebra::DVector::from_vec(pen.right_points.clone()));
        let r = &pen.shifted - &pen.loewner * lam - &pen.v * CMat::from_element(1, 2, real(1.0));
        assert!(r.norm() < 1e-14);
        assert!(pen.sylvester_residuals().max() < 1e-14);
    }

    #[test]
    fn node_collision_reported() {
        let part = Partition {
            left_points: vec![real(1.0)],
            left_values: vec![linalg::scalar(real(1.0))],
            right_points: vec![real(1.0)],
            right_values: vec![linalg::scalar(real(2.0))],
            left_indices: vec![0],
            right_indices: vec![1],
        };
        assert!(matches!(build_pencil(&part), Err(Error::NodeCollision { i: 0, j: 0, .. })));
    }

    #[test]
    fn order_two_exact_recovery() {
        let grid = [0.5, 1.0, 2.0, 4.0];
        let (d, sys) = generate_synthetic(2, 1, 1, &grid, 3).unwrap();
        let pen = build_pencil(&partition(&d, &PartitionScheme::Alternate).unwrap()).unwrap();
        let m = unprocessed_model(&pen).unwrap();
        for &w in &logspace(0.05, 50.0, 50) {
            let s = c64(0.0, w * 1.013);
            let h = eval_state_space(&sys, s).unwrap();
            let hh = eval_state_space(&m, s).unwrap();
            assert!(linalg::rel_diff(&h, &hh) < 1e-8);
        }
    }

    #[test]
    fn singular_pencil_detected() {
        let grid = logspace(0.1, 10.0, 12);
        let (d, _) = generate_synthetic(2, 1, 1, &grid, 3).unwrap();
        let pen = build_pencil(&partition(&d, &PartitionScheme::Alternate).unwrap()).unwrap();
        assert!(matches!(unprocessed_model(&pen), Err(Error::SingularPencil)));
    }

    #[test]
    fn tolerance_reveals_order() {
        let grid = logspace(0.1, 10.0, 40);
        let (d, _) = generate_synthetic(3, 1, 1, &grid, 8).unwrap();
        let pen = build_pencil(&partition(&d, &PartitionScheme::Alternate).unwrap()).unwrap();
        let t = truncated_model(&pen, Truncation::Tolerance(1e-10)).unwrap();
        assert_eq!(t.order, 3);
        let t = truncated_model(&pen, Truncation::Order(7)).unwrap();
        assert!(t.clamped);
        assert_eq!(t.order, 3);
    }

    #[test]
    fn real_pencil_gives_real_model() {
        let grid = logspace(0.1, 10.0, 20);
        let (d, sys) = generate_synthetic(4, 1, 1, &grid, 2).unwrap();
        let d = d.conjugate_close().unwrap();
        let pen = build_pencil(&partition(&d, &PartitionScheme::Alternate).unwrap()).unwrap();
        let rpen = pen.realify().unwrap();
        assert!(rpen.is_real());
        let t = truncated_model(&rpen, Truncation::Order(4)).unwrap();
        assert!(t.model.real);
        let s = c64(0.0, 1.7);
        let h = eval_state_space(&sys, s).unwrap();
        assert!(linalg::rel_diff(&h, &eval_state_space(&t.model, s).unwrap()) < 1e-8);
    }
}
