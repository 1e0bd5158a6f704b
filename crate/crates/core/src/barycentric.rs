//! One-sided barycentric realizations and their evaluation.
//!
//! A strictly proper barycentric model on nodes `λ_i` with node values `H(λ_i)` (p x m) and
//! weight blocks `W_i` (m x m) has the transfer function
//!
//! ```text
//! Ĥ(s) = (Σ H(λ_i) W_i / (s - λ_i)) (I_m + Σ W_i / (s - λ_i))^{-1}
//! ```
//!
//! and the state-space realization of order `r = k m`
//!
//! ```text
//! Ĉ = [H(λ_1) ... H(λ_k)],  B̂ = [W_1; ...; W_k],  Â = diag(λ) ⊗ I_m - B̂ (1ᵀ ⊗ I_m).
//! ```
//!
//! The three evaluation routes (barycentric sum, linear solve on the realization, and the
//! Woodbury-reduced form `Ĉ Λ_s⁻¹ B̂ (I + R Λ_s⁻¹ B̂)⁻¹`) agree away from nodes and poles.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c64, cond2, kron_identity, real, solve, CMat, C64, I};
use crate::serde_complex::{matrix_to_rows, rows_to_matrix, Pair};

/// Condition number above which `sE - A` (or the barycentric denominator) counts as singular.
pub const MAX_EVAL_COND: f64 = 1e14;

/// Relative distance under which an evaluation point is treated as a node.
pub const NODE_TOL: f64 = 1e-14;

/// Anything with a `p x m` transfer function.
pub trait TransferFunction {
    fn eval(&self, s: C64) -> Result<CMat>;
    fn inputs(&self) -> usize;
    fn outputs(&self) -> usize;
    /// Interpolation nodes, if the model has any.
    fn nodes(&self) -> Vec<C64> {
        Vec::new()
    }
}

/// Descriptor realization `(E, A, B, C)`; `e == None` stands for the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceModel {
    pub e: Option<CMat>,
    pub a: CMat,
    pub b: CMat,
    pub c: CMat,
    /// Set when every entry is known to be real (imaginary parts exactly zero).
    pub real: bool,
}

impl StateSpaceModel {
    pub fn new(e: Option<CMat>, a: CMat, b: CMat, c: CMat) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Validation(format!("A must be square, got {:?}", a.shape())));
        }
        if let Some(e) = &e {
            if e.shape() != (n, n) {
                return Err(Error::Validation(format!("E is {:?}, expected {n}x{n}", e.shape())));
            }
        }
        if b.nrows() != n || c.ncols() != n {
            return Err(Error::Validation(format!(
                "inconsistent dimensions: A {n}x{n}, B {:?}, C {:?}",
                b.shape(),
                c.shape()
            )));
        }
        let is_real = [Some(&a), Some(&b), Some(&c), e.as_ref()]
            .into_iter()
            .flatten()
            .all(|m| m.iter().all(|v| v.im == 0.0));
        Ok(Self { e, a, b, c, real: is_real })
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn e_matrix(&self) -> CMat {
        self.e.clone().unwrap_or_else(|| CMat::identity(self.order(), self.order()))
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(&StateSpaceFile::from(self))?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let f: StateSpaceFile = serde_json::from_str(text)?;
        f.try_into()
    }
}

impl TransferFunction for StateSpaceModel {
    fn eval(&self, s: C64) -> Result<CMat> {
        eval_state_space(self, s)
    }
    fn inputs(&self) -> usize {
        self.b.ncols()
    }
    fn outputs(&self) -> usize {
        self.c.nrows()
    }
}

#[derive(Serialize, Deserialize)]
struct StateSpaceFile {
    #[serde(rename = "E", skip_serializing_if = "Option::is_none", default)]
    e: Option<Vec<Vec<Pair>>>,
    #[serde(rename = "A")]
    a: Vec<Vec<Pair>>,
    #[serde(rename = "B")]
    b: Vec<Vec<Pair>>,
    #[serde(rename = "C")]
    c: Vec<Vec<Pair>>,
}

impl From<&StateSpaceModel> for StateSpaceFile {
    fn from(m: &StateSpaceModel) -> Self {
        let e = m.e.as_ref().filter(|e| **e != CMat::identity(e.nrows(), e.ncols()));
        Self {
            e: e.map(matrix_to_rows),
            a: matrix_to_rows(&m.a),
            b: matrix_to_rows(&m.b),
            c: matrix_to_rows(&m.c),
        }
    }
}

impl TryFrom<StateSpaceFile> for StateSpaceModel {
    type Error = Error;
    fn try_from(f: StateSpaceFile) -> Result<Self> {
        let conv = |rows: &[Vec<Pair>], what: &str| rows_to_matrix(rows, what).map_err(Error::Validation);
        let a = conv(&f.a, "A")?;
        let n = a.nrows();
        let mut b = conv(&f.b, "B")?;
        let mut c = conv(&f.c, "C")?;
        // zero-width matrices serialize as [] / [[],...]; restore their shapes
        if f.b.is_empty() {
            b = CMat::zeros(n, 0);
        }
        if f.c.first().is_some_and(Vec::is_empty) {
            c = CMat::zeros(f.c.len(), n);
        }
        let e = f.e.as_deref().map(|e| conv(e, "E")).transpose()?;
        StateSpaceModel::new(e, a, b, c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BarycentricForm {
    /// Denominator `I_m + Σ W_i/(s - λ_i)`.
    StrictlyProper,
    /// Classic AAA form `Σ ω_i f_i/(s - λ_i) / Σ ω_i/(s - λ_i)` (SISO only).
    Proper,
}

/// Nodes, node values and weight blocks of a barycentric rational model.
#[derive(Debug, Clone, PartialEq)]
pub struct BarycentricModel {
    pub nodes: Vec<C64>,
    pub values: Vec<CMat>,
    pub weights: Vec<CMat>,
    pub form: BarycentricForm,
    outputs: usize,
    inputs: usize,
}

impl BarycentricModel {
    pub fn new(nodes: Vec<C64>, values: Vec<CMat>, weights: Vec<CMat>, form: BarycentricForm) -> Result<Self> {
        let Some(first) = values.first() else {
            return Err(Error::Validation("barycentric model without nodes needs explicit dimensions".into()));
        };
        let (p, m) = first.shape();
        Self::with_dims(p, m, nodes, values, weights, form)
    }

    pub fn with_dims(
        outputs: usize,
        inputs: usize,
        nodes: Vec<C64>,
        values: Vec<CMat>,
        weights: Vec<CMat>,
        form: BarycentricForm,
    ) -> Result<Self> {
        let k = nodes.len();
        if values.len() != k || weights.len() != k {
            return Err(Error::Validation(format!(
                "{k} nodes, {} values, {} weights",
                values.len(),
                weights.len()
            )));
        }
        if values.iter().any(|v| v.shape() != (outputs, inputs)) {
            return Err(Error::Validation(format!("node values must be {outputs}x{inputs}")));
        }
        if weights.iter().any(|w| w.shape() != (inputs, inputs)) {
            return Err(Error::Validation(format!("weights must be {inputs}x{inputs}")));
        }
        if form == BarycentricForm::Proper && (inputs != 1 || outputs != 1) {
            return Err(Error::Validation("proper barycentric form is SISO only".into()));
        }
        for i in 0..k {
            for j in 0..i {
                if nodes[i] == nodes[j] {
                    return Err(Error::Validation(format!("duplicate node {}", nodes[i])));
                }
            }
        }
        Ok(Self { nodes, values, weights, form, outputs, inputs })
    }

    /// SISO constructor from scalar values and weights.
    pub fn siso(nodes: Vec<C64>, values: Vec<C64>, weights: Vec<C64>, form: BarycentricForm) -> Result<Self> {
        Self::with_dims(
            1,
            1,
            nodes,
            values.into_iter().map(linalg::scalar).collect(),
            weights.into_iter().map(linalg::scalar).collect(),
            form,
        )
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// State dimension of the realization, `k m` (plus one for the proper form).
    pub fn order(&self) -> usize {
        match self.form {
            BarycentricForm::StrictlyProper => self.len() * self.inputs,
            BarycentricForm::Proper => self.len() + 1,
        }
    }

    /// Node index when `s` is within the node-proximity threshold.
    pub fn node_index(&self, s: C64) -> Option<usize> {
        self.nodes.iter().position(|&l| (s - l).norm() <= NODE_TOL * (1.0 + l.norm()))
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(&BarycentricFile::from(self))?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let f: BarycentricFile = serde_json::from_str(text)?;
        f.try_into()
    }
}

impl TransferFunction for BarycentricModel {
    fn eval(&self, s: C64) -> Result<CMat> {
        eval_barycentric(self, s)
    }
    fn inputs(&self) -> usize {
        self.inputs
    }
    fn outputs(&self) -> usize {
        self.outputs
    }
    fn nodes(&self) -> Vec<C64> {
        self.nodes.clone()
    }
}

#[derive(Serialize, Deserialize)]
struct BarycentricFile {
    #[serde(with = "crate::serde_complex::complex_vec")]
    nodes: Vec<C64>,
    values: Vec<Vec<Vec<Pair>>>,
    weights: Vec<Vec<Vec<Pair>>>,
    form: BarycentricForm,
    #[serde(default)]
    p: Option<usize>,
    #[serde(default)]
    m: Option<usize>,
}

impl From<&BarycentricModel> for BarycentricFile {
    fn from(b: &BarycentricModel) -> Self {
        Self {
            nodes: b.nodes.clone(),
            values: b.values.iter().map(matrix_to_rows).collect(),
            weights: b.weights.iter().map(matrix_to_rows).collect(),
            form: b.form,
            p: Some(b.outputs),
            m: Some(b.inputs),
        }
    }
}

impl TryFrom<BarycentricFile> for BarycentricModel {
    type Error = Error;
    fn try_from(f: BarycentricFile) -> Result<Self> {
        let conv = |m: &Vec<Vec<Pair>>| rows_to_matrix(m, "block").map_err(Error::Validation);
        let values = f.values.iter().map(conv).collect::<Result<Vec<_>>>()?;
        let weights = f.weights.iter().map(conv).collect::<Result<Vec<_>>>()?;
        let p = f.p.or_else(|| values.first().map(|v| v.nrows())).unwrap_or(1);
        let m = f.m.or_else(|| values.first().map(|v| v.ncols())).unwrap_or(1);
        BarycentricModel::with_dims(p, m, f.nodes, values, weights, f.form)
    }
}

/// Either kind of model, as stored in model files.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    StateSpace(StateSpaceModel),
    Barycentric(BarycentricModel),
}

impl Model {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        if value.get("nodes").is_some() {
            Ok(Model::Barycentric(BarycentricFile::deserialize(value)?.try_into()?))
        } else {
            Ok(Model::StateSpace(StateSpaceFile::deserialize(value)?.try_into()?))
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        match self {
            Model::StateSpace(m) => serde_json::to_writer(&mut w, &StateSpaceFile::from(m))?,
            Model::Barycentric(m) => serde_json::to_writer(&mut w, &BarycentricFile::from(m))?,
        }
        w.flush()?;
        Ok(())
    }

    /// State-space form (realizing barycentric models on the fly).
    pub fn state_space(&self) -> Result<StateSpaceModel> {
        match self {
            Model::StateSpace(m) => Ok(m.clone()),
            Model::Barycentric(b) => match b.form {
                BarycentricForm::StrictlyProper => realize(b),
                BarycentricForm::Proper => realize_proper(b),
            },
        }
    }
}

impl TransferFunction for Model {
    fn eval(&self, s: C64) -> Result<CMat> {
        match self {
            Model::StateSpace(m) => m.eval(s),
            Model::Barycentric(m) => m.eval(s),
        }
    }
    fn inputs(&self) -> usize {
        match self {
            Model::StateSpace(m) => m.inputs(),
            Model::Barycentric(m) => m.inputs(),
        }
    }
    fn outputs(&self) -> usize {
        match self {
            Model::StateSpace(m) => m.outputs(),
            Model::Barycentric(m) => m.outputs(),
        }
    }
    fn nodes(&self) -> Vec<C64> {
        match self {
            Model::StateSpace(_) => Vec::new(),
            Model::Barycentric(m) => m.nodes(),
        }
    }
}

/// State-space realization `(Â, B̂, Ĉ)` of a strictly proper barycentric model.
pub fn realize(b: &BarycentricModel) -> Result<StateSpaceModel> {
    if b.form != BarycentricForm::StrictlyProper {
        return Err(Error::Validation("realize expects a strictly proper model; use realize_proper".into()));
    }
    let (k, m, p) = (b.len(), b.inputs, b.outputs);
    let r = k * m;
    let mut c = CMat::zeros(p, r);
    let mut bh = CMat::zeros(r, m);
    for i in 0..k {
        c.view_mut((0, i * m), (p, m)).copy_from(&b.values[i]);
        bh.view_mut((i * m, 0), (m, m)).copy_from(&b.weights[i]);
    }
    let lambda = CMat::from_diagonal(&nalgebra::DVector::from_vec(b.nodes.clone()));
    let ones_row = CMat::from_element(1, k, real(1.0));
    let a = kron_identity(&lambda, m) - &bh * kron_identity(&ones_row, m);
    StateSpaceModel::new(None, a, bh, c)
}

/// Descriptor realization of the proper (classic AAA) form, of order `k + 1`:
///
/// ```text
/// E = diag(I_k, 0),  A = [[Λ, 1], [-ωᵀ, 0]],  B = [0; 1],  C = [(ω∘f)ᵀ, 0].
/// ```
pub fn realize_proper(b: &BarycentricModel) -> Result<StateSpaceModel> {
    if b.form != BarycentricForm::Proper {
        return Err(Error::Validation("realize_proper expects the proper form".into()));
    }
    let k = b.len();
    let mut e = CMat::identity(k + 1, k + 1);
    e[(k, k)] = real(0.0);
    let mut a = CMat::zeros(k + 1, k + 1);
    let mut bm = CMat::zeros(k + 1, 1);
    let mut c = CMat::zeros(1, k + 1);
    for i in 0..k {
        let w = b.weights[i][(0, 0)];
        a[(i, i)] = b.nodes[i];
        a[(i, k)] = real(1.0);
        a[(k, i)] = -w;
        c[(0, i)] = w * b.values[i][(0, 0)];
    }
    bm[(k, 0)] = real(1.0);
    StateSpaceModel::new(Some(e), a, bm, c)
}

/// `C (sE - A)^{-1} B` through a linear solve.
pub fn eval_state_space(mdl: &StateSpaceModel, s: C64) -> Result<CMat> {
    let n = mdl.order();
    let mut pencil = -&mdl.a;
    match &mdl.e {
        Some(e) => pencil += e * s,
        None => {
            for i in 0..n {
                pencil[(i, i)] += s;
            }
        }
    }
    let x = linalg::solve_checked(&pencil, &mdl.b, MAX_EVAL_COND).map_err(|cond| Error::Evaluation { s, cond })?;
    Ok(&mdl.c * x)
}

/// Barycentric evaluation; returns the node value when `s` sits on a node.
pub fn eval_barycentric(b: &BarycentricModel, s: C64) -> Result<CMat> {
    if let Some(i) = b.node_index(s) {
        return Ok(b.values[i].clone());
    }
    let (p, m) = (b.outputs, b.inputs);
    match b.form {
        BarycentricForm::StrictlyProper => {
            let mut num = CMat::zeros(p, m);
            let mut den = CMat::identity(m, m);
            for i in 0..b.len() {
                let q = (s - b.nodes[i]).inv();
                num += &b.values[i] * &b.weights[i] * q;
                den += &b.weights[i] * q;
            }
            right_divide(&num, &den, s)
        }
        BarycentricForm::Proper => {
            let mut num = C64::new(0.0, 0.0);
            let mut den = C64::new(0.0, 0.0);
            let mut scale = 0.0;
            for i in 0..b.len() {
                let t = b.weights[i][(0, 0)] / (s - b.nodes[i]);
                num += t * b.values[i][(0, 0)];
                den += t;
                scale += t.norm();
            }
            if den.norm() <= 1e-14 * scale || scale == 0.0 {
                return Err(Error::Evaluation { s, cond: f64::INFINITY });
            }
            Ok(linalg::scalar(num / den))
        }
    }
}

/// `num · den⁻¹`, erroring on a (numerically) singular denominator.
fn right_divide(num: &CMat, den: &CMat, s: C64) -> Result<CMat> {
    if den.nrows() == 1 {
        let d = den[(0, 0)];
        if d.norm() == 0.0 || !d.norm().is_finite() {
            return Err(Error::Evaluation { s, cond: f64::INFINITY });
        }
        return Ok(num / d);
    }
    let cond = cond2(den);
    if !(cond <= MAX_EVAL_COND) {
        return Err(Error::Evaluation { s, cond });
    }
    let xt = solve(&den.transpose(), &num.transpose()).ok_or(Error::Evaluation { s, cond })?;
    Ok(xt.transpose())
}

/// Woodbury-reduced evaluation `Ĉ Λ_s⁻¹ B̂ (I_m + R Λ_s⁻¹ B̂)⁻¹` with `Λ_s = sI - Λ ⊗ I_m`
/// and `R = 1ᵀ ⊗ I_m`, assembled from the realization matrices.
pub fn eval_woodbury(b: &BarycentricModel, s: C64) -> Result<CMat> {
    if b.form != BarycentricForm::StrictlyProper {
        return Err(Error::Validation("Woodbury evaluation needs the strictly proper form".into()));
    }
    if let Some(i) = b.node_index(s) {
        return Err(Error::Validation(format!("s = {s} coincides with node {i}")));
    }
    let (k, m, p) = (b.len(), b.inputs, b.outputs);
    let r = k * m;
    let mut c_hat = CMat::zeros(p, r);
    let mut b_hat = CMat::zeros(r, m);
    for i in 0..k {
        c_hat.view_mut((0, i * m), (p, m)).copy_from(&b.values[i]);
        b_hat.view_mut((i * m, 0), (m, m)).copy_from(&b.weights[i]);
    }
    let r_mat = kron_identity(&CMat::from_element(1, k, real(1.0)), m);
    // Λ_s is diagonal: Λ_s⁻¹ B̂ scales block rows
    let mut g = b_hat;
    for i in 0..k {
        let q = (s - b.nodes[i]).inv();
        let mut rows = g.rows_mut(i * m, m);
        rows *= q;
    }
    let x = &r_mat * &g;
    let den = CMat::identity(m, m) + x;
    let num = c_hat * g;
    right_divide(&num, &den, s)
}

/// Unitary pairing transform `J = I_ℓ ⊗ (1/√2)[[I_b, I_b], [-iI_b, iI_b]]` of size `2ℓb`.
pub fn realification_matrix(pairs: usize, block: usize) -> CMat {
    let h = FRAC_1_SQRT_2;
    let mut j = CMat::zeros(2 * pairs * block, 2 * pairs * block);
    for l in 0..pairs {
        let o = 2 * l * block;
        for d in 0..block {
            j[(o + d, o + d)] = real(h);
            j[(o + d, o + block + d)] = real(h);
            j[(o + block + d, o + d)] = c64(0.0, -h);
            j[(o + block + d, o + block + d)] = I * h;
        }
    }
    j
}

/// Checks that `nodes` is arranged as adjacent conjugate pairs `(λ, conj λ)`.
pub fn check_conjugate_pairs(nodes: &[C64]) -> Result<()> {
    if !nodes.len().is_multiple_of(2) {
        return Err(Error::Validation(format!("realification needs an even node count, got {}", nodes.len())));
    }
    for (l, pair) in nodes.chunks(2).enumerate() {
        let tol = 1e-13 * (1.0 + pair[0].norm());
        if (pair[1] - pair[0].conj()).norm() > tol || pair[0].im == 0.0 {
            return Err(Error::Validation(format!(
                "nodes {} and {} (pair {l}) are not a conjugate pair",
                pair[0], pair[1]
            )));
        }
    }
    Ok(())
}

/// `(J A Jᴴ, J B, C Jᴴ)` (and `J E Jᴴ`) without zeroing imaginary parts. `extra` trailing
/// states are left untouched (used by the proper-form descriptor realization).
pub fn realify_unchecked(mdl: &StateSpaceModel, nodes: &[C64], extra: usize) -> Result<StateSpaceModel> {
    check_conjugate_pairs(nodes)?;
    let k = nodes.len();
    let paired = mdl.order().checked_sub(extra).filter(|n| *n > 0 && n % k == 0).ok_or_else(|| {
        Error::Validation(format!("model order {} does not split over {k} nodes", mdl.order()))
    })?;
    let block = paired / k;
    let mut j = CMat::identity(mdl.order(), mdl.order());
    j.view_mut((0, 0), (paired, paired)).copy_from(&realification_matrix(k / 2, block));
    let jh = j.adjoint();
    let e = mdl.e.as_ref().map(|e| &j * e * &jh);
    StateSpaceModel::new(e, &j * &mdl.a * &jh, &j * &mdl.b, &mdl.c * &jh)
}

/// Largest imaginary part over the model matrices.
pub fn imaginary_residue(mdl: &StateSpaceModel) -> f64 {
    [Some(&mdl.a), Some(&mdl.b), Some(&mdl.c), mdl.e.as_ref()]
        .into_iter()
        .flatten()
        .map(linalg::max_imag)
        .fold(0.0, f64::max)
}

/// Real realization of a model built on conjugate-paired nodes.
///
/// Imaginary parts left by the transform must stay below `1e-10` (relative to the largest
/// entry when that exceeds one); they are then set to zero.
pub fn realify(mdl: &StateSpaceModel, nodes: &[C64]) -> Result<StateSpaceModel> {
    realify_with_extra(mdl, nodes, 0)
}

pub fn realify_with_extra(mdl: &StateSpaceModel, nodes: &[C64], extra: usize) -> Result<StateSpaceModel> {
    let t = realify_unchecked(mdl, nodes, extra)?;
    zero_imaginary(t)
}

/// Drops imaginary parts after checking they are roundoff.
pub(crate) fn zero_imaginary(t: StateSpaceModel) -> Result<StateSpaceModel> {
    let scale = [Some(&t.a), Some(&t.b), Some(&t.c), t.e.as_ref()]
        .into_iter()
        .flatten()
        .map(|m| m.iter().map(|v| v.norm()).fold(0.0, f64::max))
        .fold(1.0, f64::max);
    let residue = imaginary_residue(&t);
    if residue > 1e-10 * scale {
        return Err(Error::ImaginaryResidue { residue });
    }
    let strip = |m: &CMat| m.map(|v| real(v.re));
    StateSpaceModel::new(t.e.as_ref().map(strip), strip(&t.a), strip(&t.b), strip(&t.c))
}
