//! CUR/DEIM interpolation-point selection and least-squares Loewner fitting.
//!
//! The plain Loewner matrix of the data is approximated by `Č Ǔ Ř`, where `Č` and `Ř` are
//! column/row subsets picked by DEIM on its leading singular vectors. The selected rows and
//! columns point back to sample points, which become the nodes of a strictly proper
//! barycentric model. The weights are then fit on all remaining samples.

use crate::barycentric::{BarycentricForm, BarycentricModel};
use crate::dataset::FrequencyDataset;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};
use crate::loewner::{build_pencil, numerical_rank, partition, LoewnerPencil, PartitionScheme, DEFAULT_RANK_TOL};

/// How the selected rows/columns turn into interpolation nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PointPostprocess {
    /// Left points `μ` of the selected rows.
    LeftOnly,
    /// Right points `λ` of the selected columns.
    RightOnly,
    /// Selected `λ` and `μ` concatenated, sorted by imaginary then real part, every other
    /// entry starting with the first.
    #[default]
    MergedAlternate,
}

#[derive(Debug, Clone)]
pub struct CurResult {
    pub row_indices: Vec<usize>,
    pub col_indices: Vec<usize>,
    pub c: CMat,
    pub u: CMat,
    pub r: CMat,
    /// Sample points behind the selected rows (empty for a plain matrix decomposition).
    pub left_points: Vec<C64>,
    /// Sample points behind the selected columns (empty for a plain matrix decomposition).
    pub right_points: Vec<C64>,
    pub warnings: Vec<String>,
}

impl CurResult {
    pub fn reconstruct(&self) -> CMat {
        &self.c * &self.u * &self.r
    }
}

/// DEIM indices of the columns of `basis`. Ties go to the smallest index.
pub fn deim(basis: &CMat) -> Vec<usize> {
    let argmax = |v: &[f64]| {
        let mut best = 0;
        for (i, &x) in v.iter().enumerate() {
            if x > v[best] {
                best = i;
            }
        }
        best
    };
    let mut idx = Vec::with_capacity(basis.ncols());
    for j in 0..basis.ncols() {
        let u = basis.column(j).into_owned();
        let res = if idx.is_empty() {
            u
        } else {
            let prev = basis.columns(0, j).into_owned();
            let sub = CMat::from_fn(idx.len(), j, |a, b| prev[(idx[a], b)]);
            let rhs = CMat::from_fn(idx.len(), 1, |a, _| u[idx[a]]);
            let coef = linalg::solve(&sub, &rhs).unwrap_or_else(|| linalg::lstsq(&sub, &rhs).x);
            u - (&prev * coef).column(0)
        };
        let mags: Vec<f64> = res.iter().map(|z| z.norm()).collect();
        idx.push(argmax(&mags));
    }
    idx
}

/// Rank-`k` CUR factorization with DEIM-selected rows and columns and
/// `U = Č⁺ M Ř⁺` (least-squares solves, no explicit pseudo-inverse).
pub fn cur_decompose(mtx: &CMat, k: usize) -> Result<CurResult> {
    let (rows, cols) = mtx.shape();
    if k == 0 || k > rows.min(cols) {
        return Err(Error::Validation(format!("CUR rank {k} must lie in 1..={}", rows.min(cols))));
    }
    let (left, right, sv) = linalg::svd_bases(mtx, k);
    let mut warnings = Vec::new();
    let rank = numerical_rank(&sv, DEFAULT_RANK_TOL);
    if k > rank {
        let msg = format!("CUR rank {k} exceeds numerical rank {rank}; reconstruction may be inaccurate");
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let row_indices = deim(&left);
    let col_indices = deim(&right);
    let c = CMat::from_fn(rows, k, |i, j| mtx[(i, col_indices[j])]);
    let r = CMat::from_fn(k, cols, |i, j| mtx[(row_indices[i], j)]);
    let cm = linalg::lstsq(&c, mtx).x;
    let u = linalg::lstsq(&r.adjoint(), &cm.adjoint()).x.adjoint();
    Ok(CurResult { row_indices, col_indices, c, u, r, left_points: Vec::new(), right_points: Vec::new(), warnings })
}

fn dedup_in_order(points: impl IntoIterator<Item = C64>) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::new();
    for z in points {
        if !out.contains(&z) {
            out.push(z);
        }
    }
    out
}

fn sort_points(v: &mut [C64]) {
    v.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
}

fn postprocess(cur: &CurResult, pp: PointPostprocess, k: usize) -> Vec<C64> {
    let mu = dedup_in_order(cur.left_points.iter().copied());
    let la = dedup_in_order(cur.right_points.iter().copied());
    match pp {
        PointPostprocess::LeftOnly => mu.into_iter().take(k).collect(),
        PointPostprocess::RightOnly => la.into_iter().take(k).collect(),
        PointPostprocess::MergedAlternate => {
            let mut all: Vec<C64> = la.iter().chain(&mu).copied().collect();
            sort_points(&mut all);
            let picked: Vec<C64> = dedup_in_order(all.into_iter().step_by(2));
            if picked.len() <= k {
                return picked;
            }
            // keep the k picks selected earliest by DEIM
            let priority = |z: &C64| {
                let a = cur.right_points.iter().position(|w| w == z).unwrap_or(usize::MAX);
                let b = cur.left_points.iter().position(|w| w == z).unwrap_or(usize::MAX);
                a.min(b)
            };
            let mut ranked = picked.clone();
            ranked.sort_by_key(priority);
            ranked.truncate(k);
            picked.into_iter().filter(|z| ranked.contains(z)).collect()
        }
    }
}

/// Interpolation nodes `ν` (k points) and the residual points `χ` (all other pencil points).
///
/// CUR runs on the plain Loewner matrix. For MIMO pencils several selected rows may map to
/// the same sample; the CUR rank is then raised until `k` distinct nodes are available.
pub fn select_points(pen: &LoewnerPencil, k: usize, pp: PointPostprocess) -> Result<(Vec<C64>, Vec<C64>, CurResult)> {
    let (p, m) = (pen.outputs, pen.inputs);
    let all: Vec<C64> = pen.left_points.iter().chain(&pen.right_points).copied().collect();
    if k == 0 {
        return Err(Error::Validation("number of interpolation points must be >= 1".into()));
    }
    if k >= all.len() {
        return Err(Error::Validation(format!(
            "k = {k} leaves no residual points among {} samples",
            all.len()
        )));
    }
    let max_rank = pen.loewner.nrows().min(pen.loewner.ncols());
    let mut last = None;
    for rank in k.min(max_rank)..=max_rank {
        let mut cur = cur_decompose(&pen.loewner, rank)?;
        cur.left_points = cur.row_indices.iter().map(|&i| pen.left_points[i / p]).collect();
        cur.right_points = cur.col_indices.iter().map(|&j| pen.right_points[j / m]).collect();
        let nodes = postprocess(&cur, pp, k);
        if nodes.len() >= k {
            let chi = all.iter().copied().filter(|z| !nodes.contains(z)).collect();
            return Ok((nodes, chi, cur));
        }
        last = Some(nodes.len());
    }
    Err(Error::Validation(format!(
        "point selection produced only {} distinct nodes, {k} requested",
        last.unwrap_or(0)
    )))
}

/// Linearized least-squares weights: minimizes
/// `‖Σ_i (H(χ_j) - H(ν_i))/(χ_j - ν_i) W_i + H(χ_j)‖` over all residual samples `χ_j`.
#[derive(Debug, Clone)]
pub struct LsWeights {
    pub weights: Vec<CMat>,
    pub rank_deficient: bool,
}

pub fn mimo_ls_weights(
    nodes: &[C64],
    node_values: &[CMat],
    residual_points: &[C64],
    residual_values: &[CMat],
) -> Result<LsWeights> {
    let k = nodes.len();
    let n = residual_points.len();
    if k == 0 || n == 0 {
        return Err(Error::Validation(format!("least-squares weights need nodes and residual samples ({k}, {n})")));
    }
    if node_values.len() != k || residual_values.len() != n {
        return Err(Error::Validation("point/value count mismatch".into()));
    }
    let (p, m) = node_values[0].shape();
    let mut l = CMat::zeros(n * p, k * m);
    let mut rhs = CMat::zeros(n * p, m);
    for j in 0..n {
        let (x, hx) = (residual_points[j], &residual_values[j]);
        rhs.view_mut((j * p, 0), (p, m)).copy_from(&(-hx));
        for i in 0..k {
            let d = x - nodes[i];
            if d.norm() == 0.0 {
                return Err(Error::NodeCollision { i: j, j: i, left: x, right: nodes[i] });
            }
            let block = (hx - &node_values[i]) / d;
            l.view_mut((j * p, i * m), (p, m)).copy_from(&block);
        }
    }
    let ls = linalg::lstsq(&l, &rhs);
    if ls.rank_deficient {
        log::warn!("least-squares Loewner system is rank deficient (rank {} of {})", ls.rank, k * m);
    }
    let weights = (0..k).map(|i| ls.x.rows(i * m, m).into_owned()).collect();
    Ok(LsWeights { weights, rank_deficient: ls.rank_deficient })
}

#[derive(Debug, Clone)]
pub struct LsLoewnerFit {
    pub model: BarycentricModel,
    /// Residual points used in the least-squares solve.
    pub residual_points: Vec<C64>,
    pub rank_deficient: bool,
    pub warnings: Vec<String>,
}

/// Strictly proper barycentric fit on explicit nodes (which must be sample points); every
/// other sample enters the least-squares solve.
pub fn ls_loewner_fit_nodes(d: &FrequencyDataset, nodes: &[C64]) -> Result<LsLoewnerFit> {
    let mut node_idx = Vec::with_capacity(nodes.len());
    for &z in nodes {
        let i = d.find_point(z).ok_or_else(|| Error::Validation(format!("node {z} is not a sample point")))?;
        if node_idx.contains(&i) {
            return Err(Error::Validation(format!("node {z} given twice")));
        }
        node_idx.push(i);
    }
    let rest: Vec<usize> = (0..d.len()).filter(|i| !node_idx.contains(i)).collect();
    if rest.is_empty() {
        return Err(Error::Validation("every sample is a node; no residual samples left".into()));
    }
    let node_points: Vec<C64> = node_idx.iter().map(|&i| d.points()[i]).collect();
    let node_values: Vec<CMat> = node_idx.iter().map(|&i| d.values()[i].clone()).collect();
    let res_points: Vec<C64> = rest.iter().map(|&i| d.points()[i]).collect();
    let res_values: Vec<CMat> = rest.iter().map(|&i| d.values()[i].clone()).collect();
    let w = mimo_ls_weights(&node_points, &node_values, &res_points, &res_values)?;
    let model = BarycentricModel::new(node_points, node_values, w.weights, BarycentricForm::StrictlyProper)?;
    Ok(LsLoewnerFit { model, residual_points: res_points, rank_deficient: w.rank_deficient, warnings: Vec::new() })
}

/// Interpolation nodes chosen by CUR on the Loewner matrix of the data (alternate
/// partition).
///
/// On conjugate-closed data the selection runs on the upper half-plane samples only and the
/// conjugate of every selected node follows it, so `k` must be even and the nodes come in
/// adjacent conjugate pairs. Real-axis samples are then never selected.
pub fn select_nodes(d: &FrequencyDataset, k: usize, pp: PointPostprocess) -> Result<(Vec<C64>, Vec<String>)> {
    if k == 0 || k >= d.len() {
        return Err(Error::Validation(format!("need 1 <= k < {} samples, got k = {k}", d.len())));
    }
    let paired = is_paired(d);
    let (sel_data, k_sel) = if paired {
        if !k.is_multiple_of(2) {
            return Err(Error::Validation(format!(
                "conjugate-closed data needs an even number of nodes, got {k}"
            )));
        }
        let upper: Vec<usize> = (0..d.len()).filter(|&i| d.points()[i].im > 0.0).collect();
        (d.select(&upper)?, k / 2)
    } else {
        (d.clone(), k)
    };
    let pen = build_pencil(&partition(&sel_data, &PartitionScheme::Alternate)?)?;
    let (mut nodes, _, cur) = select_points(&pen, k_sel, pp)?;
    if paired {
        nodes = nodes.into_iter().flat_map(|z| [z, z.conj()]).collect();
    }
    Ok((nodes, cur.warnings))
}

/// Conjugate-closed data with at least one sample off the real axis.
pub fn is_paired(d: &FrequencyDataset) -> bool {
    d.is_conjugate_closed() && d.points().iter().any(|z| z.im != 0.0)
}

/// Full least-squares Loewner pipeline: [`select_nodes`] followed by the least-squares
/// weight solve over all remaining samples.
pub fn ls_loewner_fit(d: &FrequencyDataset, k: usize, pp: PointPostprocess) -> Result<LsLoewnerFit> {
    let (nodes, warnings) = select_nodes(d, k, pp)?;
    let mut fit = ls_loewner_fit_nodes(d, &nodes)?;
    fit.warnings = warnings;
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barycentric::eval_barycentric;
    use crate::linalg::{c64, real};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat(rows: &[&[f64]]) -> CMat {
        CMat::from_fn(rows.len(), rows[0].len(), |i, j| real(rows[i][j]))
    }

    #[test]
    fn rank_one_exact() {
        let m = mat(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let cur = cur_decompose(&m, 1).unwrap();
        assert!((&m - cur.reconstruct()).norm() <= 1e-14);
    }

    #[test]
    fn identity_exact() {
        let m = CMat::identity(3, 3);
        let cur = cur_decompose(&m, 3).unwrap();
        assert_eq!((&m - cur.reconstruct()).norm(), 0.0);
        let mut rows = cur.row_indices.clone();
        rows.sort();
        assert_eq!(rows, vec![0, 1, 2]);
    }

    #[test]
    fn random_rank_five() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut g = |r, c| CMat::from_fn(r, c, |_, _| c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let m = g(50, 5) * g(5, 50);
        let cur = cur_decompose(&m, 5).unwrap();
        assert!(cur.warnings.is_empty());
        assert!((&m - cur.reconstruct()).norm() <= 1e-10 * m.norm());
        let cur = cur_decompose(&m, 7).unwrap();
        assert_eq!(cur.warnings.len(), 1);
    }

    #[test]
    fn deim_tie_breaks_low() {
        let b = CMat::from_element(4, 1, real(0.5));
        assert_eq!(deim(&b), vec![0]);
    }

    #[test]
    fn merged_alternate_rule() {
        let cur = CurResult {
            row_indices: vec![0, 1],
            col_indices: vec![0, 1],
            c: CMat::zeros(0, 0),
            u: CMat::zeros(0, 0),
            r: CMat::zeros(0, 0),
            left_points: vec![c64(0.0, 3.0), c64(0.0, 1.0)],
            right_points: vec![c64(0.0, 4.0), c64(0.0, 2.0)],
            warnings: Vec::new(),
        };
        assert_eq!(postprocess(&cur, PointPostprocess::MergedAlternate, 2), vec![c64(0.0, 1.0), c64(0.0, 3.0)]);
        assert_eq!(postprocess(&cur, PointPostprocess::LeftOnly, 2), vec![c64(0.0, 3.0), c64(0.0, 1.0)]);
        assert_eq!(postprocess(&cur, PointPostprocess::RightOnly, 1), vec![c64(0.0, 4.0)]);
    }

    fn first_order(n: usize) -> FrequencyDataset {
        let pts: Vec<C64> = crate::dataset::logspace(0.1, 10.0, n).into_iter().map(|w| c64(0.0, w)).collect();
        let vals = pts.iter().map(|&s| (s + 1.0).inv()).collect();
        FrequencyDataset::siso(pts, vals).unwrap()
    }

    #[test]
    fn left_only_nodes_are_left_points() {
        let d = first_order(10);
        let pen = build_pencil(&partition(&d, &PartitionScheme::Alternate).unwrap()).unwrap();
        let (nu, chi, _) = select_points(&pen, 2, PointPostprocess::LeftOnly).unwrap();
        assert!(nu.iter().all(|z| pen.left_points.contains(z)));
        assert_eq!(nu.len() + chi.len(), 10);
    }

    #[test]
    fn all_points_rejected() {
        let d = first_order(4);
        let pen = build_pencil(&partition(&d, &PartitionScheme::Alternate).unwrap()).unwrap();
        assert!(select_points(&pen, 4, PointPostprocess::MergedAlternate).is_err());
        assert!(ls_loewner_fit(&d, 4, PointPostprocess::MergedAlternate).is_err());
    }

    #[test]
    fn first_order_ls_fit() {
        let d = first_order(10);
        let fit = ls_loewner_fit(&d, 1, PointPostprocess::MergedAlternate).unwrap();
        for (s, h) in d.points().iter().zip(d.values()) {
            let v = eval_barycentric(&fit.model, *s).unwrap();
            assert!((&v - h).norm() <= 1e-10);
        }
    }

    #[test]
    fn noisy_constant_interpolates_nodes() {
        let pts: Vec<C64> = (1..=8).map(|k| c64(0.0, k as f64)).collect();
        let d = FrequencyDataset::siso(pts.clone(), vec![real(2.0); 8])
            .unwrap()
            .add_noise(&crate::dataset::NoiseSpec::new(0.01, 3))
            .unwrap();
        let fit = ls_loewner_fit(&d, 2, PointPostprocess::MergedAlternate).unwrap();
        let mut resid = 0.0_f64;
        for (s, h) in d.points().iter().zip(d.values()) {
            let v = eval_barycentric(&fit.model, *s).unwrap();
            if fit.model.nodes.contains(s) {
                assert!((&v - h).norm() <= 1e-12 * h.norm());
            } else {
                resid = resid.max((&v - h).norm());
            }
        }
        assert!(resid > 0.0);
    }

    #[test]
    fn conjugate_closed_nodes_pair_up() {
        let d = first_order(12).conjugate_close().unwrap();
        let fit = ls_loewner_fit(&d, 2, PointPostprocess::MergedAlternate).unwrap();
        crate::barycentric::check_conjugate_pairs(&fit.model.nodes).unwrap();
        assert!(ls_loewner_fit(&d, 3, PointPostprocess::MergedAlternate).is_err());
    }
}
