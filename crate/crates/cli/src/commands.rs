use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use loewner_rom::aaa::{self, AaaConfig, AaaVariant};
use loewner_rom::barycentric::{realify_with_extra, BarycentricForm, Model};
use loewner_rom::dataset::{generate_synthetic_with, SyntheticOptions};
use loewner_rom::linalg::c64;
use loewner_rom::loewner::loewner_svd_fit;
use loewner_rom::metrics::pointwise_errors_with_nodes;
use loewner_rom::{
    lfapp_fit, lfpp_fit, linf_error, ls_loewner_fit, pole_report, BarycentricModel, FitReport, FrequencyDataset,
    LfappMode, LfappOptions, NoiseSpec, PointPostprocess, StateSpaceModel, TransferFunction, Truncation, C64,
};
use serde_json::json;

use crate::parse;
use crate::{EvalArgs, FitArgs, FitOptions, Method, NoiseArgs, Points, PolesArgs, SweepArgs, SynthArgs};

/// Error reported as `{"error": kind, "message": ...}` on stderr with exit code 1 (numerical)
/// or 2 (usage).
#[derive(Debug)]
pub struct CliError {
    code: u8,
    kind: String,
    message: String,
}

impl CliError {
    pub fn usage(kind: &str, message: impl Into<String>) -> Self {
        Self { code: 2, kind: kind.into(), message: message.into() }
    }

    pub fn report(&self) -> ExitCode {
        eprintln!("{}", json!({ "error": self.kind, "message": self.message }));
        ExitCode::from(self.code)
    }
}

impl From<loewner_rom::Error> for CliError {
    fn from(e: loewner_rom::Error) -> Self {
        Self { code: if e.is_usage() { 2 } else { 1 }, kind: e.kind().into(), message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        loewner_rom::Error::Io(e).into()
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn arg_err(message: String) -> CliError {
    CliError::usage("usage", message)
}

impl From<Points> for PointPostprocess {
    fn from(p: Points) -> Self {
        match p {
            Points::Left => PointPostprocess::LeftOnly,
            Points::Right => PointPostprocess::RightOnly,
            Points::Merged => PointPostprocess::MergedAlternate,
        }
    }
}

/// Data used for fitting: closed under conjugation when `real` is set and that is possible.
fn fitting_data(d: &FrequencyDataset, real: bool, warnings: &mut Vec<String>) -> FrequencyDataset {
    if !real || d.is_conjugate_closed() {
        return d.clone();
    }
    match d.conjugate_close() {
        Ok(c) => c,
        Err(e) => {
            warnings.push(format!("data cannot be closed under conjugation ({e}); fitting a complex model"));
            d.clone()
        }
    }
}

struct Fitted {
    model: Model,
    state_space: StateSpaceModel,
    nodes: Vec<C64>,
    loewner_singular_values: Vec<f64>,
    cauchy_cond: Option<f64>,
    rank_deficient: bool,
    converged: Option<bool>,
    warnings: Vec<String>,
}

impl Fitted {
    fn state_space(model: StateSpaceModel) -> Self {
        Self {
            model: Model::StateSpace(model.clone()),
            state_space: model,
            nodes: Vec::new(),
            loewner_singular_values: Vec::new(),
            cauchy_cond: None,
            rank_deficient: false,
            converged: None,
            warnings: Vec::new(),
        }
    }

    /// Realifies a barycentric model on conjugate-paired nodes when `real` is set; otherwise
    /// (or when the nodes are not paired) the barycentric form itself is kept.
    fn barycentric(b: BarycentricModel, real: bool) -> Result<Self> {
        let complex = Model::Barycentric(b.clone());
        let ss = complex.state_space()?;
        let extra = usize::from(b.form == BarycentricForm::Proper);
        let (model, state_space, warning) = if !real {
            (complex, ss, None)
        } else {
            match realify_with_extra(&ss, &b.nodes, extra) {
                Ok(r) => (Model::StateSpace(r.clone()), r, None),
                Err(e) => (complex, ss, Some(format!("model kept in complex barycentric form: {e}"))),
            }
        };
        let mut f = Self::state_space(state_space);
        f.model = model;
        f.nodes = b.nodes;
        f.warnings.extend(warning);
        Ok(f)
    }
}

fn truncation(opts: &FitOptions, default: Option<Truncation>) -> Result<Truncation> {
    match (opts.order, opts.tol) {
        (Some(_), Some(_)) => Err(arg_err("give either --order or --tol, not both".into())),
        (Some(r), None) => Ok(Truncation::Order(r)),
        (None, Some(t)) => Ok(Truncation::Tolerance(t)),
        (None, None) => default.ok_or_else(|| arg_err("this method needs --order or --tol".into())),
    }
}

fn nodes_for_order(d: &FrequencyDataset, r: usize) -> Result<usize> {
    let m = d.inputs();
    if r == 0 || !r.is_multiple_of(m) {
        return Err(arg_err(format!("order {r} is not a positive multiple of the input count {m}")));
    }
    Ok(r / m)
}

fn list_arg(value: &Option<String>, flag: &str) -> Result<Vec<C64>> {
    let text = value.as_deref().ok_or_else(|| arg_err(format!("lfpp needs {flag}")))?;
    parse::complex_list(text).map_err(arg_err)
}

fn run_method(method: Method, d: &FrequencyDataset, opts: &FitOptions, hz: bool) -> Result<Fitted> {
    let real = opts.real;
    let fitted = match method {
        Method::LoewnerSvd => {
            let t = loewner_svd_fit(d, truncation(opts, None)?)?;
            let mut f = Fitted::state_space(t.model);
            f.loewner_singular_values = t.row_singular_values;
            f.warnings = t.warnings;
            f
        }
        Method::LsLoewner => {
            let r = opts.order.ok_or_else(|| arg_err("ls-loewner needs --order".into()))?;
            let fit = ls_loewner_fit(d, nodes_for_order(d, r)?, opts.points.into())?;
            let mut f = Fitted::barycentric(fit.model, real)?;
            f.rank_deficient = fit.rank_deficient;
            f.warnings.extend(fit.warnings);
            f
        }
        Method::Aaa | Method::AaaSp => {
            let defaults = AaaConfig::default();
            let cfg = AaaConfig {
                tol: opts.tol.unwrap_or(defaults.tol),
                max_order: opts.order.unwrap_or(defaults.max_order),
                variant: if method == Method::Aaa { AaaVariant::Classic } else { AaaVariant::StrictlyProper },
                conjugate_pairs: real && d.is_conjugate_closed(),
                ..defaults
            };
            let fit = aaa::fit(d, &cfg)?;
            let mut f = Fitted::barycentric(fit.model, real)?;
            f.rank_deficient = fit.rank_deficient;
            f.converged = Some(fit.converged);
            if !fit.converged {
                f.warnings.push(format!("AAA stopped at the order cap with error {:e}", fit.error));
            }
            f
        }
        Method::Lfpp => {
            let poles = list_arg(&opts.poles, "--poles")?;
            let nodes = list_arg(&opts.nodes, "--nodes")?;
            let fit = lfpp_fit(d, &nodes, &poles, truncation(opts, Some(Truncation::Tolerance(1e-10)))?)?;
            placement(fit, real)?
        }
        Method::Lfapp => {
            let mut lf = LfappOptions { stable_only: opts.stable_only, points: opts.points.into(), ..Default::default() };
            if let Some(t) = opts.tol {
                lf.truncation = Truncation::Tolerance(t);
            }
            let k = match &opts.peaks {
                Some(text) => {
                    let peaks: Vec<f64> =
                        parse::real_list(text).map_err(arg_err)?.into_iter().map(|w| parse::to_rad(w, hz)).collect();
                    let per_peak = if loewner_rom::cur::is_paired(d) { 2 } else { 1 };
                    let k = opts.order.unwrap_or(per_peak * peaks.len());
                    lf.mode = LfappMode::Modified { peaks };
                    k
                }
                None => opts.order.ok_or_else(|| arg_err("lfapp needs --order or --peaks".into()))?,
            };
            placement(lfapp_fit(d, k, &lf)?, real)?
        }
    };
    Ok(fitted)
}

fn placement(fit: loewner_rom::PolePlacementFit, real: bool) -> Result<Fitted> {
    let mut f = Fitted::barycentric(fit.model, real)?;
    f.cauchy_cond = Some(fit.cauchy_cond);
    f.loewner_singular_values = fit.surrogate_singular_values;
    f.warnings.extend(fit.warnings);
    Ok(f)
}

fn report_path(output: &Path) -> PathBuf {
    output.with_extension("report.json")
}

pub fn fit(a: FitArgs) -> Result<String> {
    let data = FrequencyDataset::load(&a.data.input, None, a.data.hz)?;
    let mut warnings = Vec::new();
    let train = fitting_data(&data, a.opts.real, &mut warnings);
    let mut f = run_method(a.method, &train, &a.opts, a.data.hz)?;
    warnings.append(&mut f.warnings);

    let mut report = FitReport::new(a.method.name(), &data, &f.model, &f.state_space, &f.nodes)?;
    report.loewner_singular_values = f.loewner_singular_values;
    report.cauchy_cond = f.cauchy_cond;
    report.rank_deficient = f.rank_deficient;
    report.converged = f.converged;
    report.warnings = warnings;

    f.model.save(&a.output)?;
    let report_file = a.report.unwrap_or_else(|| report_path(&a.output));
    report.save_json(&report_file)?;
    if let Some(path) = &a.errors {
        report.write_csv(BufWriter::new(File::create(path)?), false)?;
    }
    Ok(format!(
        "{}: order {}, epsilon {:.6e}, {} unstable poles, {} warnings -> {}",
        a.method.name(),
        report.order,
        report.epsilon,
        report.poles.unstable_count(),
        report.warnings.len(),
        a.output.display()
    ))
}

/// ε of `method` at order `r` against `d`.
fn sweep_point(method: Method, d: &FrequencyDataset, r: usize, points: Points) -> Result<f64> {
    let model: Box<dyn TransferFunction> = match method {
        Method::LoewnerSvd => Box::new(loewner_svd_fit(d, Truncation::Order(r))?.model),
        Method::LsLoewner => Box::new(ls_loewner_fit(d, nodes_for_order(d, r)?, points.into())?.model),
        Method::Aaa | Method::AaaSp => {
            let cfg = AaaConfig {
                tol: f64::EPSILON,
                max_order: r,
                variant: if method == Method::Aaa { AaaVariant::Classic } else { AaaVariant::StrictlyProper },
                conjugate_pairs: d.is_conjugate_closed(),
                ..AaaConfig::default()
            };
            Box::new(aaa::fit(d, &cfg)?.model)
        }
        Method::Lfapp => {
            let opts = LfappOptions { points: points.into(), ..LfappOptions::default() };
            Box::new(lfapp_fit(d, r, &opts)?.model)
        }
        Method::Lfpp => return Err(arg_err("lfpp needs explicit poles and cannot be swept".into())),
    };
    Ok(linf_error(d, model.as_ref())?)
}

pub fn sweep(a: SweepArgs) -> Result<String> {
    if a.methods.contains(&Method::Lfpp) {
        return Err(arg_err("lfpp needs explicit poles and cannot be swept".into()));
    }
    let data = FrequencyDataset::load(&a.data.input, None, a.data.hz)?;
    let mut warnings = Vec::new();
    let train = fitting_data(&data, a.real, &mut warnings);
    let m = data.inputs();
    let orders: Vec<usize> =
        parse::usize_list(&a.orders).map_err(arg_err)?.into_iter().filter(|r| *r > 0 && r % m == 0).collect();
    if orders.is_empty() {
        return Err(arg_err(format!("no order in '{}' is a positive multiple of {m}", a.orders)));
    }
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(&a.output)?));
    let csv_err = |e: csv::Error| CliError::from(std::io::Error::other(e));
    w.write_record(["method", "r", "epsilon"]).map_err(csv_err)?;
    let mut failed = 0;
    for &method in &a.methods {
        for &r in &orders {
            let eps = sweep_point(method, &train, r, a.points).unwrap_or_else(|e| {
                log::warn!("{} at r = {r}: {}", method.name(), e.message);
                failed += 1;
                f64::NAN
            });
            w.write_record([method.name().to_string(), r.to_string(), format!("{eps:.16e}")]).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(format!(
        "sweep: {} rows ({failed} failed), {} warnings -> {}",
        orders.len() * a.methods.len(),
        warnings.len(),
        a.output.display()
    ))
}

pub fn noise(a: NoiseArgs) -> Result<String> {
    let data = FrequencyDataset::load(&a.input, None, false)?;
    let mean = parse::complex(&a.mean).map_err(arg_err)?;
    let spec = NoiseSpec { mean, variance: a.sigma2, seed: a.seed };
    let noisy = data.add_noise(&spec)?;
    noisy.save(&a.output, None)?;
    Ok(format!("noise: sigma2 {}, seed {}, {} samples -> {}", a.sigma2, a.seed, noisy.len(), a.output.display()))
}

pub fn eval(a: EvalArgs) -> Result<String> {
    let model = Model::load(&a.model)?;
    let reference = match &a.input {
        Some(path) => Some(FrequencyDataset::load(path, None, a.hz)?),
        None => None,
    };
    let points: Vec<C64> = match (&reference, &a.grid) {
        (Some(d), _) => d.points().to_vec(),
        (None, Some(g)) => {
            parse::real_list(g).map_err(arg_err)?.into_iter().map(|w| c64(0.0, parse::to_rad(w, a.hz))).collect()
        }
        (None, None) => return Err(arg_err("eval needs --grid or --input".into())),
    };
    let errors = match &reference {
        Some(d) => Some(pointwise_errors_with_nodes(d, &model, &model.nodes())?),
        None => None,
    };
    let (p, m) = (model.outputs(), model.inputs());
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(&a.output)?));
    let csv_err = |e: csv::Error| CliError::from(std::io::Error::other(e));
    let mut header = vec!["omega".to_string()];
    for j in 0..m {
        for i in 0..p {
            header.push(format!("re_{}_{}", i + 1, j + 1));
            header.push(format!("im_{}_{}", i + 1, j + 1));
        }
    }
    if errors.is_some() {
        header.extend(["abs_err".into(), "rel_err".into()]);
    }
    w.write_record(&header).map_err(csv_err)?;
    for (k, &s) in points.iter().enumerate() {
        let h = model.eval(s)?;
        let mut rec = vec![format!("{:.16e}", s.im)];
        for j in 0..m {
            for i in 0..p {
                rec.push(format!("{:.16e}", h[(i, j)].re));
                rec.push(format!("{:.16e}", h[(i, j)].im));
            }
        }
        if let Some(errs) = &errors {
            rec.push(format!("{:.16e}", errs[k].abs_err));
            rec.push(format!("{:.16e}", errs[k].rel_err));
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(format!("eval: {} points -> {}", points.len(), a.output.display()))
}

pub fn poles(a: PolesArgs) -> Result<String> {
    let model = Model::load(&a.model)?;
    let rep = pole_report(&model.state_space()?, a.dominance)?;
    let summary = format!(
        "poles: {} finite, {} unstable, {} infinite",
        rep.poles.len(),
        rep.unstable_count(),
        rep.infinite
    );
    match &a.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            serde_json::to_writer_pretty(&mut w, &rep).map_err(loewner_rom::Error::from)?;
            w.flush()?;
            Ok(format!("{summary} -> {}", path.display()))
        }
        None => Ok(serde_json::to_string(&rep).map_err(loewner_rom::Error::from)?),
    }
}

pub fn synth(a: SynthArgs) -> Result<String> {
    let grid: Vec<f64> = parse::real_list(&a.grid).map_err(arg_err)?.into_iter().map(|w| parse::to_rad(w, a.hz)).collect();
    let damping = parse::real_list(&a.damping).map_err(arg_err)?;
    let [lo, hi] = damping[..] else {
        return Err(arg_err(format!("--damping needs two values, got '{}'", a.damping)));
    };
    let opts = SyntheticOptions { damping: (lo, hi) };
    let (data, sys) = generate_synthetic_with(a.order, a.inputs, a.outputs, &grid, a.seed, opts)?;
    data.save(&a.output, None)?;
    if let Some(path) = &a.model_output {
        Model::StateSpace(sys).save(path)?;
    }
    Ok(format!("synth: order {}, {} samples, seed {} -> {}", a.order, data.len(), a.seed, a.output.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_path_replaces_extension() {
        assert_eq!(report_path(Path::new("out/m.json")), PathBuf::from("out/m.report.json"));
    }

    #[test]
    fn library_errors_map_to_exit_codes() {
        let usage: CliError = loewner_rom::Error::Validation("x".into()).into();
        assert_eq!((usage.code, usage.kind.as_str()), (2, "validation"));
        let numeric: CliError = loewner_rom::Error::SingularPencil.into();
        assert_eq!((numeric.code, numeric.kind.as_str()), (1, "singular_pencil"));
    }
}
