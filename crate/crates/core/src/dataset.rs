//! Frequency-response datasets: storage, CSV/JSON I/O, conjugate closure, multiplicative
//! noise and synthetic benchmark generation.
//!
//! Values are `p x m` complex blocks. In both file formats a block is flattened
//! column-major over `(output, input)`, i.e. `(1,1), (2,1), ..., (p,1), (1,2), ...`.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::barycentric::{StateSpaceModel, TransferFunction};
use crate::error::{Error, Result};
use crate::linalg::{c64, real, CMat, C64};
use crate::serde_complex::{from_pair, to_pair, Pair};

/// Relative tolerance used when matching a point with its conjugate.
const POINT_MATCH_TOL: f64 = 1e-13;
/// Relative tolerance for `H(conj s) == conj(H(s))`.
const CONJ_VALUE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Csv,
    Json,
}

impl FileFormat {
    /// Guess from the file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(FileFormat::Csv),
            "json" => Some(FileFormat::Json),
            _ => None,
        }
    }
}

/// Sampled transfer-function data `{(s_i, H(s_i))}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyDataset {
    points: Vec<C64>,
    values: Vec<CMat>,
    outputs: usize,
    inputs: usize,
}

impl FrequencyDataset {
    pub fn new(points: Vec<C64>, values: Vec<CMat>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::NoSamples);
        }
        if points.len() != values.len() {
            return Err(Error::Validation(format!(
                "{} points but {} values",
                points.len(),
                values.len()
            )));
        }
        let (outputs, inputs) = values[0].shape();
        if outputs == 0 || inputs == 0 {
            return Err(Error::Validation("empty response block".into()));
        }
        if let Some(i) = values.iter().position(|v| v.shape() != (outputs, inputs)) {
            return Err(Error::Format {
                row: i,
                msg: format!("block is {:?}, expected {outputs}x{inputs}", values[i].shape()),
            });
        }
        if let Some(i) = points.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Format { row: i, msg: "non-finite sample point".into() });
        }
        for i in 0..points.len() {
            for j in 0..i {
                if points[i] == points[j] {
                    return Err(Error::Validation(format!(
                        "duplicate sample point {} (indices {j} and {i})",
                        points[i]
                    )));
                }
            }
        }
        Ok(Self { points, values, outputs, inputs })
    }

    pub fn siso(points: Vec<C64>, values: Vec<C64>) -> Result<Self> {
        Self::new(points, values.into_iter().map(crate::linalg::scalar).collect())
    }

    /// Samples a transfer function at the given points.
    pub fn sample<F>(points: Vec<C64>, mut f: F) -> Result<Self>
    where
        F: FnMut(C64) -> Result<CMat>,
    {
        let values = points.iter().map(|&s| f(s)).collect::<Result<Vec<_>>>()?;
        Self::new(points, values)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn values(&self) -> &[CMat] {
        &self.values
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn is_siso(&self) -> bool {
        self.inputs == 1 && self.outputs == 1
    }

    /// Scalar values of a SISO dataset.
    pub fn siso_values(&self) -> Result<Vec<C64>> {
        if !self.is_siso() {
            return Err(Error::Validation(format!(
                "expected SISO data, got {}x{}",
                self.outputs, self.inputs
            )));
        }
        Ok(self.values.iter().map(|v| v[(0, 0)]).collect())
    }

    /// Sub-dataset with the given indices, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let points = indices.iter().map(|&i| self.points[i]).collect();
        let values = indices.iter().map(|&i| self.values[i].clone()).collect();
        Self::new(points, values)
    }

    /// Index of a sample point within relative tolerance.
    pub fn find_point(&self, s: C64) -> Option<usize> {
        let tol = POINT_MATCH_TOL * (1.0 + s.norm());
        self.points.iter().position(|&z| (z - s).norm() <= tol)
    }

    /// Index of the conjugate partner of sample `i` (`None` for real points or missing
    /// partners).
    pub fn conjugate_partner(&self, i: usize) -> Option<usize> {
        let s = self.points[i];
        if s.im == 0.0 {
            return None;
        }
        self.find_point(s.conj()).filter(|&j| j != i)
    }

    /// True when every point off the real axis has its conjugate with the conjugate value.
    pub fn is_conjugate_closed(&self) -> bool {
        (0..self.len()).all(|i| {
            if self.points[i].im == 0.0 {
                return true;
            }
            match self.conjugate_partner(i) {
                Some(j) => conj_consistent(&self.values[i], &self.values[j]),
                None => false,
            }
        })
    }

    /// Adds `(conj s, conj H(s))` for every sample whose partner is missing. Added samples
    /// are placed right after their partner; existing samples keep their order and values.
    pub fn conjugate_close(&self) -> Result<Self> {
        if let Some(s) = self.points.iter().find(|z| z.re < 0.0) {
            return Err(Error::Validation(format!(
                "point {s} lies in the open left half-plane; conjugate closure expects imaginary-axis data"
            )));
        }
        let mut points = Vec::with_capacity(2 * self.len());
        let mut values = Vec::with_capacity(2 * self.len());
        for i in 0..self.len() {
            points.push(self.points[i]);
            values.push(self.values[i].clone());
            if self.points[i].im == 0.0 {
                continue;
            }
            match self.conjugate_partner(i) {
                Some(j) => {
                    if !conj_consistent(&self.values[i], &self.values[j]) {
                        return Err(Error::ConjugateInconsistency { s: self.points[i] });
                    }
                }
                None => {
                    points.push(self.points[i].conj());
                    values.push(self.values[i].map(|v| v.conj()));
                }
            }
        }
        Self::new(points, values)
    }

    /// Multiplicative complex-normal perturbation `H(s_i) (1 + Z_i)`.
    ///
    /// Real and imaginary parts of `Z_i` are independent normals with variance `σ²/2` each,
    /// shifted by the complex mean. Samples in the lower half-plane whose conjugate partner
    /// is present receive the conjugate of the partner's perturbed value, so conjugate-closed
    /// data stays conjugate-closed. Draws happen in dataset order.
    pub fn add_noise(&self, spec: &NoiseSpec) -> Result<Self> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let normal = Normal::new(0.0, (spec.variance / 2.0).sqrt())
            .map_err(|e| Error::Validation(format!("noise distribution: {e}")))?;
        let mut values = self.values.clone();
        let mut mirrored = Vec::new();
        for i in 0..self.len() {
            if self.points[i].im < 0.0 {
                if let Some(j) = self.conjugate_partner(i) {
                    mirrored.push((i, j));
                    continue;
                }
            }
            let z = spec.mean + c64(normal.sample(&mut rng), normal.sample(&mut rng));
            let factor = real(1.0) + z;
            values[i] = self.values[i].map(|v| v * factor);
        }
        for (i, j) in mirrored {
            values[i] = values[j].map(|v| v.conj());
        }
        Self::new(self.points.clone(), values)
    }

    /// Multiplies every point by `2π` (frequencies given in Hz).
    pub fn scale_points(&self, factor: f64) -> Result<Self> {
        Self::new(self.points.iter().map(|z| z * factor).collect(), self.values.clone())
    }

    pub fn load(path: impl AsRef<Path>, format: Option<FileFormat>, hz: bool) -> Result<Self> {
        let path = path.as_ref();
        let format = format
            .or_else(|| FileFormat::from_path(path))
            .ok_or_else(|| Error::Validation(format!("cannot infer format of {}", path.display())))?;
        let reader = BufReader::new(File::open(path)?);
        match format {
            FileFormat::Csv => Self::read_csv(reader, hz),
            FileFormat::Json => Self::read_json(reader, hz),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>, format: Option<FileFormat>) -> Result<()> {
        let path = path.as_ref();
        let format = format.or_else(|| FileFormat::from_path(path)).unwrap_or(FileFormat::Json);
        let mut w = BufWriter::new(File::create(path)?);
        match format {
            FileFormat::Csv => self.write_csv(&mut w)?,
            FileFormat::Json => self.write_json(&mut w)?,
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, hz: bool) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers().map_err(|e| Error::Format { row: 0, msg: e.to_string() })?.clone();
        if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
            return Err(Error::NoSamples);
        }
        let (outputs, inputs) = parse_csv_header(&header)?;
        let scale = if hz { 2.0 * PI } else { 1.0 };
        let mut points = Vec::new();
        let mut values = Vec::new();
        for (k, record) in rdr.records().enumerate() {
            let row = k + 1;
            let record = record.map_err(|e| Error::Format { row, msg: e.to_string() })?;
            if record.len() != header.len() {
                return Err(Error::Format {
                    row,
                    msg: format!("expected {} fields, found {}", header.len(), record.len()),
                });
            }
            let nums = record
                .iter()
                .map(|f| f.parse::<f64>().map_err(|e| Error::Format { row, msg: format!("'{f}': {e}") }))
                .collect::<Result<Vec<f64>>>()?;
            points.push(c64(0.0, nums[0] * scale));
            values.push(CMat::from_fn(outputs, inputs, |i, j| {
                let col = 1 + 2 * (j * outputs + i);
                c64(nums[col], nums[col + 1])
            }));
        }
        Self::new(points, values)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        if let Some(s) = self.points.iter().find(|z| z.re != 0.0) {
            return Err(Error::Validation(format!(
                "CSV stores imaginary-axis samples only; found s = {s}"
            )));
        }
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["omega".to_string()];
        for j in 0..self.inputs {
            for i in 0..self.outputs {
                header.push(format!("re_{}_{}", i + 1, j + 1));
                header.push(format!("im_{}_{}", i + 1, j + 1));
            }
        }
        w.write_record(&header).map_err(csv_io)?;
        for (s, h) in self.points.iter().zip(&self.values) {
            let mut rec = vec![fmt_f64(s.im)];
            for j in 0..self.inputs {
                for i in 0..self.outputs {
                    rec.push(fmt_f64(h[(i, j)].re));
                    rec.push(fmt_f64(h[(i, j)].im));
                }
            }
            w.write_record(&rec).map_err(csv_io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_json<R: Read>(reader: R, hz: bool) -> Result<Self> {
        let file: DatasetFile = serde_json::from_reader(reader)?;
        if file.samples.is_empty() {
            return Err(Error::NoSamples);
        }
        let scale = if hz { 2.0 * PI } else { 1.0 };
        let mut points = Vec::with_capacity(file.samples.len());
        let mut values = Vec::with_capacity(file.samples.len());
        for (row, sample) in file.samples.iter().enumerate() {
            if sample.h.len() != file.p * file.m {
                return Err(Error::Format {
                    row,
                    msg: format!("expected {} entries in H, found {}", file.p * file.m, sample.h.len()),
                });
            }
            points.push(from_pair(sample.s) * scale);
            values.push(CMat::from_fn(file.p, file.m, |i, j| from_pair(sample.h[j * file.p + i])));
        }
        Self::new(points, values)
    }

    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        let file = DatasetFile {
            m: self.inputs,
            p: self.outputs,
            samples: self
                .points
                .iter()
                .zip(&self.values)
                .map(|(s, h)| SampleFile {
                    s: to_pair(*s),
                    // column-major flattening, same as nalgebra's storage
                    h: h.iter().copied().map(to_pair).collect(),
                })
                .collect(),
        };
        serde_json::to_writer(writer, &file)?;
        Ok(())
    }
}

fn conj_consistent(a: &CMat, b: &CMat) -> bool {
    let diff = (b - a.map(|v| v.conj())).norm();
    diff <= CONJ_VALUE_TOL * (1.0 + a.norm())
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// 17 significant digits; enough to round-trip any f64.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_csv_header(header: &csv::StringRecord) -> Result<(usize, usize)> {
    let bad = |msg: String| Error::Format { row: 0, msg };
    if &header[0] != "omega" {
        return Err(bad(format!("first column must be 'omega', found '{}'", &header[0])));
    }
    let n = header.len() - 1;
    if n == 0 || !n.is_multiple_of(2) {
        return Err(bad("expected pairs of re_i_j,im_i_j columns".into()));
    }
    let last = &header[header.len() - 1];
    let mut parts = last.split('_');
    let (Some("im"), Some(p), Some(m), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
        return Err(bad(format!("cannot parse dimensions from column '{last}'")));
    };
    let p: usize = p.parse().map_err(|_| bad(format!("bad output index in '{last}'")))?;
    let m: usize = m.parse().map_err(|_| bad(format!("bad input index in '{last}'")))?;
    if p * m * 2 != n {
        return Err(bad(format!("{n} value columns do not match {p}x{m} blocks")));
    }
    let mut col = 1;
    for j in 1..=m {
        for i in 1..=p {
            for part in ["re", "im"] {
                let expected = format!("{part}_{i}_{j}");
                if header[col] != expected {
                    return Err(bad(format!("column {col} is '{}', expected '{expected}'", &header[col])));
                }
                col += 1;
            }
        }
    }
    Ok((p, m))
}

#[derive(Serialize, Deserialize)]
struct DatasetFile {
    m: usize,
    p: usize,
    samples: Vec<SampleFile>,
}

#[derive(Serialize, Deserialize)]
struct SampleFile {
    s: Pair,
    #[serde(rename = "H")]
    h: Vec<Pair>,
}

/// Parameters of the multiplicative complex-normal noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(with = "crate::serde_complex::complex")]
    pub mean: C64,
    /// Total variance σ² of `Z` (split evenly between real and imaginary parts).
    pub variance: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(variance: f64, seed: u64) -> Self {
        Self { mean: real(0.0), variance, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.variance >= 0.0 && self.variance.is_finite()) {
            return Err(Error::Validation(format!("noise variance must be >= 0, got {}", self.variance)));
        }
        if !(self.mean.re.is_finite() && self.mean.im.is_finite()) {
            return Err(Error::Validation("noise mean must be finite".into()));
        }
        Ok(())
    }
}

/// Options for [`generate_synthetic_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticOptions {
    /// Range of damping ratios for the oscillatory modes.
    pub damping: (f64, f64),
}

impl Default for SyntheticOptions {
    fn default() -> Self {
        Self { damping: (0.02, 0.15) }
    }
}

/// Random stable real LTI model of the given order and its exact samples `H(iω)` on the grid.
pub fn generate_synthetic(
    order: usize,
    inputs: usize,
    outputs: usize,
    grid: &[f64],
    seed: u64,
) -> Result<(FrequencyDataset, StateSpaceModel)> {
    generate_synthetic_with(order, inputs, outputs, grid, seed, SyntheticOptions::default())
}

/// Like [`generate_synthetic`] with explicit options.
///
/// The state matrix is block diagonal: 2x2 blocks `[[-ζω, ω_d], [-ω_d, -ζω]]` for
/// oscillatory modes and a `1x1` block for the leftover real pole when the order is odd.
/// Mode frequencies are log-uniform over the positive span of the grid.
pub fn generate_synthetic_with(
    order: usize,
    inputs: usize,
    outputs: usize,
    grid: &[f64],
    seed: u64,
    opts: SyntheticOptions,
) -> Result<(FrequencyDataset, StateSpaceModel)> {
    if order == 0 || inputs == 0 || outputs == 0 {
        return Err(Error::Validation("order, inputs and outputs must be >= 1".into()));
    }
    if grid.is_empty() {
        return Err(Error::NoSamples);
    }
    let (zmin, zmax) = opts.damping;
    if !(zmin > 0.0 && zmax >= zmin && zmax < 1.0) {
        return Err(Error::Validation("damping range must satisfy 0 < min <= max < 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positive: Vec<f64> = grid.iter().map(|w| w.abs()).filter(|w| *w > 0.0).collect();
    let (wlo, whi) = if positive.is_empty() {
        (0.1, 10.0)
    } else {
        let lo = positive.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = positive.iter().copied().fold(0.0, f64::max);
        if hi > lo {
            (lo, hi)
        } else {
            (lo / 10.0, lo * 10.0)
        }
    };
    let log_freq = Uniform::new_inclusive(wlo.ln(), whi.ln()).map_err(|e| Error::Validation(e.to_string()))?;
    let damping = Uniform::new_inclusive(zmin, zmax).map_err(|e| Error::Validation(e.to_string()))?;
    let gauss = Normal::new(0.0, 1.0).expect("unit normal");

    let mut a = CMat::zeros(order, order);
    let mut k = 0;
    while k + 1 < order {
        let w = log_freq.sample(&mut rng).exp();
        let zeta: f64 = damping.sample(&mut rng);
        let sigma = -zeta * w;
        let wd = w * (1.0 - zeta * zeta).sqrt();
        a[(k, k)] = real(sigma);
        a[(k + 1, k + 1)] = real(sigma);
        a[(k, k + 1)] = real(wd);
        a[(k + 1, k)] = real(-wd);
        k += 2;
    }
    if k < order {
        a[(k, k)] = real(-log_freq.sample(&mut rng).exp());
    }
    let b = CMat::from_fn(order, inputs, |_, _| real(gauss.sample(&mut rng)));
    let c = CMat::from_fn(outputs, order, |_, _| real(gauss.sample(&mut rng)));
    let model = StateSpaceModel::new(None, a, b, c)?;
    let points: Vec<C64> = grid.iter().map(|&w| c64(0.0, w)).collect();
    let data = FrequencyDataset::sample(points, |s| model.eval(s))?;
    Ok((data, model))
}

/// `n` logarithmically spaced values in `[lo, hi]`.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
        }
    }
}

/// `n` linearly spaced values in `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I;

    fn first_order() -> FrequencyDataset {
        let pts: Vec<C64> = [1.0, 2.0, 5.0].iter().map(|&w| c64(0.0, w)).collect();
        let vals = pts.iter().map(|&s| (s + 1.0).inv()).collect();
        FrequencyDataset::siso(pts, vals).unwrap()
    }

    #[test]
    fn csv_single_row() {
        // H(s) = 1/(s+1) at s = i: 1/(1+i) = 0.5 - 0.5i
        let text = "omega,re_1_1,im_1_1\n1,0.5,-0.5\n";
        let d = FrequencyDataset::read_csv(text.as_bytes(), false).unwrap();
        assert_eq!(d.len(), 1);
        assert!(d.is_siso());
        assert_eq!(d.points()[0], c64(0.0, 1.0));
        let expected = (I + 1.0).inv();
        assert!((d.values()[0][(0, 0)] - expected).norm() < 1e-15);
    }

    #[test]
    fn csv_empty_file_is_no_samples() {
        let err = FrequencyDataset::read_csv("".as_bytes(), false).unwrap_err();
        assert!(matches!(err, Error::NoSamples), "{err}");
        let err = FrequencyDataset::read_csv("omega,re_1_1,im_1_1\n".as_bytes(), false).unwrap_err();
        assert!(matches!(err, Error::NoSamples), "{err}");
        assert_eq!(err.to_string(), "no samples");
    }

    #[test]
    fn csv_malformed_row_reports_index() {
        let text = "omega,re_1_1,im_1_1\n1,0.5,-0.5\n2,abc,0\n";
        match FrequencyDataset::read_csv(text.as_bytes(), false).unwrap_err() {
            Error::Format { row, .. } => assert_eq!(row, 2),
            e => panic!("unexpected {e}"),
        }
        let text = "omega,re_1_1,im_1_1\n1,0.5\n";
        assert!(FrequencyDataset::read_csv(text.as_bytes(), false).is_err());
    }

    #[test]
    fn duplicate_points_rejected() {
        let text = "omega,re_1_1,im_1_1\n1,0.5,-0.5\n1,0.5,-0.5\n";
        let err = FrequencyDataset::read_csv(text.as_bytes(), false).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn csv_hz_scaling() {
        let text = "omega,re_1_1,im_1_1\n1,0.5,-0.5\n";
        let d = FrequencyDataset::read_csv(text.as_bytes(), true).unwrap();
        assert!((d.points()[0].im - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn json_mimo_iss_shape() {
        let grid = logspace(0.1, 100.0, 400);
        let (d, _) = generate_synthetic(8, 3, 3, &grid, 1).unwrap();
        let mut buf = Vec::new();
        d.write_json(&mut buf).unwrap();
        let back = FrequencyDataset::read_json(buf.as_slice(), false).unwrap();
        assert_eq!(back.len(), 400);
        assert_eq!((back.outputs(), back.inputs()), (3, 3));
        assert_eq!(back, d);
    }

    #[test]
    fn csv_mimo_column_major_roundtrip() {
        let grid = [0.5, 1.5, 3.0];
        let (d, _) = generate_synthetic(3, 2, 3, &grid, 4).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("omega,re_1_1,im_1_1,re_2_1,im_2_1,re_3_1,im_3_1,re_1_2"));
        let back = FrequencyDataset::read_csv(buf.as_slice(), false).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn conjugate_close_adds_mirror() {
        let d = FrequencyDataset::siso(vec![c64(0.0, 1.0)], vec![c64(0.5, -0.5)]).unwrap();
        let c = d.conjugate_close().unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.points()[1], c64(0.0, -1.0));
        assert_eq!(c.values()[1][(0, 0)], c64(0.5, 0.5));
        assert!(c.is_conjugate_closed());
    }

    #[test]
    fn conjugate_close_real_point_unchanged() {
        let d = FrequencyDataset::siso(vec![c64(0.0, 0.0)], vec![c64(1.0, 0.0)]).unwrap();
        assert_eq!(d.conjugate_close().unwrap(), d);
    }

    #[test]
    fn conjugate_close_idempotent() {
        let c = first_order().conjugate_close().unwrap();
        assert_eq!(c.conjugate_close().unwrap(), c);
        assert_eq!(c.len(), 6);
    }

    #[test]
    fn conjugate_close_detects_inconsistency() {
        let d = FrequencyDataset::siso(vec![c64(0.0, 1.0), c64(0.0, -1.0)], vec![c64(0.5, -0.5), c64(0.5, -0.5)])
            .unwrap();
        assert!(matches!(d.conjugate_close(), Err(Error::ConjugateInconsistency { .. })));
    }

    #[test]
    fn conjugate_close_rejects_left_half_plane() {
        let d = FrequencyDataset::siso(vec![c64(-1.0, 1.0)], vec![c64(1.0, 0.0)]).unwrap();
        assert!(matches!(d.conjugate_close(), Err(Error::Validation(_))));
    }

    #[test]
    fn zero_noise_is_identity() {
        let d = first_order();
        let n = d.add_noise(&NoiseSpec::new(0.0, 3)).unwrap();
        assert_eq!(n, d);
    }

    #[test]
    fn noise_is_deterministic() {
        let d = first_order().conjugate_close().unwrap();
        let spec = NoiseSpec::new(0.15, 7);
        let a = d.add_noise(&spec).unwrap();
        let b = d.add_noise(&spec).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, d);
        assert!(a.is_conjugate_closed());
        let other = d.add_noise(&NoiseSpec::new(0.15, 8)).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn noise_variance_monte_carlo() {
        let grid = linspace(1.0, 1000.0, 1000);
        let pts: Vec<C64> = grid.iter().map(|&w| c64(0.0, w)).collect();
        let ones = vec![real(1.0); pts.len()];
        let d = FrequencyDataset::siso(pts, ones).unwrap();
        let n = d.add_noise(&NoiseSpec::new(0.25, 42)).unwrap();
        // values are 1 + Z_i
        let mean_sq: f64 = n.values().iter().map(|v| (v[(0, 0)] - 1.0).norm_sqr()).sum::<f64>() / 1000.0;
        assert!((mean_sq - 0.25).abs() <= 0.2 * 0.25, "E|Z|^2 = {mean_sq}");
    }

    #[test]
    fn negative_variance_rejected() {
        assert!(first_order().add_noise(&NoiseSpec::new(-1.0, 0)).is_err());
    }

    #[test]
    fn synthetic_first_order_matches_scalar_formula() {
        let grid = logspace(0.1, 10.0, 25);
        let (d, m) = generate_synthetic(1, 1, 1, &grid, 9).unwrap();
        let (a, b, c) = (m.a[(0, 0)], m.b[(0, 0)], m.c[(0, 0)]);
        for (s, h) in d.points().iter().zip(d.values()) {
            let direct = c * b / (s - a);
            assert!((h[(0, 0)] - direct).norm() <= 1e-14 * direct.norm());
        }
    }

    #[test]
    fn synthetic_single_point() {
        let (d, _) = generate_synthetic(1, 1, 1, &[2.0], 0).unwrap();
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn synthetic_high_order_is_stable_and_conjugate_symmetric() {
        let grid = logspace(0.1, 100.0, 200);
        let (d, m) = generate_synthetic(30, 1, 1, &grid, 5).unwrap();
        let eg = crate::linalg::eig(&m.a).unwrap();
        assert!(eg.values.iter().all(|v| v.re < 0.0));
        for &s in &d.points()[..5] {
            let h = m.eval(s).unwrap();
            let hc = m.eval(s.conj()).unwrap();
            assert!((hc - h.map(|v| v.conj())).norm() < 1e-12 * h.norm());
        }
    }
}
