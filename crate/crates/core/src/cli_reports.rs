//! Batch runs: a JSON config in, a JSON report (and optional CSV dumps) out.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::darboux::{builtin_n5_laguerre, darboux_verify_seq, hermite_a_factorization};
use crate::diff_operators::{build_bispectral_operator, eigencheck};
use crate::error::{Error, Result};
use crate::irreducibility::{all_ratios_irrational, order_zero_symmetries, try_reduce_2x2, try_reduce_3x3_w1w3};
use crate::mvop::{Backend, MVOPSequence, EXACT_N_MAX};
use crate::mat::Mat;
use crate::scalar_families::{ScalarFamily, ScalarWeightSpec};
use crate::weight::WeightSpec;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Float,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Orth,
    Norm,
    Recurrence,
    Eigen,
    Darboux,
    Det,
    Reduce,
    Symmetries,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::Orth,
        Check::Norm,
        Check::Recurrence,
        Check::Eigen,
        Check::Darboux,
        Check::Det,
        Check::Reduce,
        Check::Symmetries,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Orth => "orth",
            Check::Norm => "norm",
            Check::Recurrence => "recurrence",
            Check::Eigen => "eigen",
            Check::Darboux => "darboux",
            Check::Det => "det",
            Check::Reduce => "reduce",
            Check::Symmetries => "symmetries",
        }
    }
}

fn default_n_max() -> usize {
    12
}

fn default_tol() -> f64 {
    1e-9
}

fn default_checks() -> Vec<Check> {
    vec![Check::Orth, Check::Norm]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub size: usize,
    pub a: Vec<f64>,
    pub weights: Vec<ScalarWeightSpec>,
    #[serde(default)]
    pub backend: BackendKind,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_checks")]
    pub checks: Vec<Check>,
    /// Where the JSON report goes; stdout when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Directory for `q_<n>.csv` and `norm_<n>.csv`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_dir: Option<PathBuf>,
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

impl RunConfig {
    pub fn new(spec: &WeightSpec, checks: Vec<Check>) -> Self {
        RunConfig {
            size: spec.size,
            a: spec.a.clone(),
            weights: spec.weights.clone(),
            backend: BackendKind::Float,
            n_max: default_n_max(),
            tol: default_tol(),
            checks,
            out: None,
            csv_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(config_err)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn spec(&self) -> WeightSpec {
        WeightSpec { size: self.size, a: self.a.clone(), weights: self.weights.clone() }
    }

    /// Schema-level checks plus whether each requested check applies to the spec.
    pub fn validate(&self) -> Result<()> {
        let spec = self.spec();
        spec.validate().map_err(config_err)?;
        if !(self.tol > 0.0) {
            return Err(config_err(format!("tol must be positive, got {}", self.tol)));
        }
        if self.backend == BackendKind::Exact && self.n_max > EXACT_N_MAX {
            return Err(config_err(format!("the exact backend stops at n_max = {EXACT_N_MAX}")));
        }
        for c in &self.checks {
            let pointwise = matches!(c, Check::Eigen | Check::Reduce | Check::Symmetries | Check::Darboux);
            if pointwise && !spec.all_classical() {
                return Err(config_err(format!("check {} needs classical scalar weights", c.name())));
            }
            if *c == Check::Darboux && darboux_kind(&spec).is_none() {
                return Err(config_err(
                    "check darboux knows the five-slot Laguerre chain and all-Hermite(0) weights only",
                ));
            }
        }
        Ok(())
    }
}

enum DarbouxKind {
    LaguerreFive(f64),
    Hermite,
}

fn darboux_kind(spec: &WeightSpec) -> Option<DarbouxKind> {
    let unit = spec.weights.iter().all(|w| w.scale == 1.0);
    if !unit {
        return None;
    }
    if spec.weights.iter().all(|w| w.family == ScalarFamily::Hermite { b: 0.0 }) {
        return Some(DarbouxKind::Hermite);
    }
    if spec.size != 5 {
        return None;
    }
    let ScalarFamily::Laguerre { alpha } = spec.weights[0].family else { return None };
    let chain = [0.0, 0.0, 1.0, 1.0, 2.0]
        .iter()
        .zip(&spec.weights)
        .all(|(s, w)| w.family == ScalarFamily::Laguerre { alpha: alpha + s });
    chain.then_some(DarbouxKind::LaguerreFive(alpha))
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: Check,
    pub pass: bool,
    pub worst_residual: Option<f64>,
    pub tol: f64,
    pub details: Value,
    pub error: Option<String>,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub spec: WeightSpec,
    pub backend: BackendKind,
    pub n_max: usize,
    pub tol: f64,
    pub checks: Vec<CheckReport>,
    pub wall_time_s: f64,
    pub pass: bool,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn failed(&self) -> Vec<Check> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.check).collect()
    }
}

/// Runs every requested check, writes the report and CSV dumps when paths
/// are set. A check that errors is reported as failed, with the message.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let start = Instant::now();
    let checks = match config.backend {
        BackendKind::Float => run_backend::<f64>(config)?,
        BackendKind::Exact => run_backend::<BigRational>(config)?,
    };
    let pass = checks.iter().all(|c| c.pass);
    let report = RunReport {
        spec: config.spec(),
        backend: config.backend,
        n_max: config.n_max,
        tol: config.tol,
        checks,
        wall_time_s: start.elapsed().as_secs_f64(),
        pass,
    };
    if let Some(out) = &config.out {
        std::fs::write(out, report.to_json())?;
    }
    Ok(report)
}

fn run_backend<T: Backend>(config: &RunConfig) -> Result<Vec<CheckReport>> {
    let spec = config.spec();
    let seq = MVOPSequence::<T>::new(&spec, config.n_max).map_err(config_err)?;
    if let Some(dir) = &config.csv_dir {
        write_csv(&seq, dir)?;
    }
    Ok(config
        .checks
        .par_iter()
        .map(|&c| {
            let start = Instant::now();
            let outcome = run_check(&seq, c, config.tol);
            let wall_time_s = start.elapsed().as_secs_f64();
            match outcome {
                Ok((pass, worst_residual, details)) => {
                    CheckReport { check: c, pass, worst_residual, tol: config.tol, details, error: None, wall_time_s }
                }
                Err(e) => CheckReport {
                    check: c,
                    pass: false,
                    worst_residual: None,
                    tol: config.tol,
                    details: Value::Null,
                    error: Some(e.to_string()),
                    wall_time_s,
                },
            }
        })
        .collect())
}

fn write_csv<T: Backend>(seq: &MVOPSequence<T>, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for n in 0..=seq.n_max() {
        std::fs::write(dir.join(format!("q_{n}.csv")), seq.build_q(n)?.to_csv())?;
        let norm = crate::matrix_poly::MatrixPolynomial::constant(seq.squared_norm_q(n)?);
        std::fs::write(dir.join(format!("norm_{n}.csv")), norm.to_csv())?;
    }
    Ok(())
}

type Outcome = Result<(bool, Option<f64>, Value)>;

fn run_check<T: Backend>(seq: &MVOPSequence<T>, check: Check, tol: f64) -> Outcome {
    let spec = seq.spec();
    let n_max = seq.n_max();
    match check {
        Check::Orth => {
            let r = seq.verify_orthogonality(n_max, tol)?;
            Ok((r.pass, Some(r.worst_scaled()), json!({ "worst": r.worst, "pairs": r.pairs.len() })))
        }
        Check::Norm => {
            let res = seq.norm_residuals(n_max)?;
            let worst = res.iter().cloned().fold(0.0, f64::max);
            Ok((worst <= tol, Some(worst), json!({ "residuals": res })))
        }
        Check::Recurrence => {
            let rows: Vec<(usize, f64, f64)> = (0..n_max)
                .into_par_iter()
                .map(|n| {
                    let p = seq.three_term_coefficients(n)?;
                    let e = seq.three_term_by_elimination(n)?;
                    let scale = p.a.max_norm().max(p.b.max_norm()).max(p.c.max_norm()).max(1.0);
                    let gap = [(&p.a - &e.a), (&p.b - &e.b), (&p.c - &e.c)]
                        .iter()
                        .map(Mat::max_norm)
                        .fold(0.0, f64::max)
                        / scale;
                    Ok((n, p.residual, gap))
                })
                .collect::<Result<_>>()?;
            let worst = rows.iter().map(|r| r.1.max(r.2)).fold(0.0, f64::max);
            let details: Vec<Value> =
                rows.iter().map(|(n, r, g)| json!({ "n": n, "residual": r, "projection_vs_elimination": g })).collect();
            Ok((worst <= tol, Some(worst), Value::Array(details)))
        }
        Check::Eigen => {
            let (d, lambda) = build_bispectral_operator::<T>(spec)?;
            let r = eigencheck(seq, &d, &lambda, n_max, tol)?;
            let shifts: Vec<Value> =
                lambda.slots.iter().map(|s| json!({ "quadratic": s.quadratic() })).collect();
            Ok((r.pass, Some(r.worst), json!({ "operator": d.to_json(), "eigenvalues": shifts, "report": r })))
        }
        Check::Darboux => {
            let d1 = match darboux_kind(spec) {
                Some(DarbouxKind::LaguerreFive(alpha)) => {
                    let a: [f64; 4] = spec.a.clone().try_into().expect("five slots");
                    builtin_n5_laguerre::<T>(alpha, a)?.d1
                }
                Some(DarbouxKind::Hermite) => hermite_a_factorization::<T>(spec)?.d1,
                None => return Err(Error::Check("no Darboux factorization for this spec".into())),
            };
            let r = darboux_verify_seq(seq, &d1, n_max, tol)?;
            Ok((r.pass, Some(r.worst), json!({ "d1": d1.to_json(), "report": r })))
        }
        Check::Det => {
            let rows: Vec<(usize, f64)> = (0..=n_max)
                .map(|n| {
                    let d = seq.leading_coeff_det(n)?;
                    let scale = d.det_k.magnitude().max(1.0);
                    let gap = (d.det_continuant.clone() - d.det_k.clone())
                        .magnitude()
                        .max((d.det_direct - d.det_k).magnitude());
                    Ok((n, gap / scale))
                })
                .collect::<Result<_>>()?;
            let worst = rows.iter().map(|r| r.1).fold(0.0, f64::max);
            Ok((worst <= tol, Some(worst), json!(rows.iter().map(|r| json!({"n": r.0, "residual": r.1})).collect::<Vec<_>>())))
        }
        Check::Reduce => reduce_check(spec, tol),
        Check::Symmetries => {
            let n = spec.size;
            let sp = order_zero_symmetries(spec, 3 * n * n + 20)?;
            Ok((sp.validated, Some(sp.validation_residual), serde_json::to_value(&sp)?))
        }
    }
}

fn reduce_check(spec: &WeightSpec, tol: f64) -> Outcome {
    let irrational = all_ratios_irrational(spec);
    match spec.size {
        2 => Ok(match try_reduce_2x2(spec)? {
            Some(r) => {
                let worst = r.off_diagonal.max(r.diagonal_error);
                (worst <= tol, Some(worst), json!({ "reducible": true, "reduction": r }))
            }
            None => (true, None, json!({ "reducible": false, "ratios_irrational": irrational })),
        }),
        3 if spec.weights[0] == spec.weights[2] => {
            let r = try_reduce_3x3_w1w3(spec)?;
            Ok((r.residual <= tol, Some(r.residual), json!({ "reducible": true, "reduction": r })))
        }
        _ => Ok((
            true,
            None,
            json!({
                "reducible": if irrational == Some(true) { json!(false) } else { Value::Null },
                "ratios_irrational": irrational,
            }),
        )),
    }
}

/// JSON Schema of [`RunConfig`].
pub fn schema() -> Value {
    let num = json!({ "type": "number" });
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "mvop run config",
        "type": "object",
        "required": ["size", "a", "weights"],
        "additionalProperties": false,
        "properties": {
            "size": { "type": "integer", "minimum": 2 },
            "a": { "type": "array", "items": num, "description": "size - 1 nonzero off-diagonal parameters" },
            "weights": {
                "type": "array",
                "items": {
                    "oneOf": [
                        { "type": "object", "required": ["family", "b"],
                          "properties": { "family": { "const": "hermite" }, "b": num, "scale": num } },
                        { "type": "object", "required": ["family", "alpha"],
                          "properties": { "family": { "const": "laguerre" }, "alpha": num, "scale": num } },
                        { "type": "object", "required": ["family", "alpha", "beta"],
                          "properties": { "family": { "const": "jacobi" }, "alpha": num, "beta": num, "scale": num } },
                        { "type": "object", "required": ["family", "moments", "support"],
                          "properties": {
                              "family": { "const": "custom" },
                              "moments": { "type": "array", "items": num },
                              "support": { "type": "array", "minItems": 2, "maxItems": 2,
                                           "items": { "type": ["number", "null"] } },
                              "scale": num } }
                    ]
                }
            },
            "backend": { "enum": ["float", "exact"], "default": "float" },
            "n_max": { "type": "integer", "minimum": 0, "default": default_n_max() },
            "tol": { "type": "number", "exclusiveMinimum": 0, "default": default_tol() },
            "checks": {
                "type": "array",
                "items": { "enum": Check::ALL.iter().map(|c| c.name()).collect::<Vec<_>>() },
                "default": ["orth", "norm"]
            },
            "out": { "type": "string" },
            "csv_dir": { "type": "string" }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_families::ScalarWeightSpec as S;

    fn laguerre_cfg() -> RunConfig {
        let spec = WeightSpec::new(vec![2.0], vec![S::laguerre(0.0), S::laguerre(0.5)]).unwrap();
        RunConfig::new(&spec, vec![Check::Orth, Check::Eigen])
    }

    #[test]
    fn laguerre_run_passes() {
        let r = run(&laguerre_cfg()).unwrap();
        assert!(r.pass, "{}", r.to_json());
        assert_eq!(r.checks.len(), 2);
    }

    #[test]
    fn zero_a_is_config_error() {
        let text = r#"{"size":2,"a":[0],"weights":[{"family":"hermite","b":0},{"family":"hermite","b":1}]}"#;
        assert!(matches!(RunConfig::from_json(text), Err(Error::Config(_))));
        assert!(matches!(RunConfig::from_json(r#"{"size":2}"#), Err(Error::Config(_))));
    }

    #[test]
    fn jacobi_reduce_reports_roots() {
        let spec = WeightSpec::new(vec![1.0], vec![S::jacobi(1.5, 0.5), S::jacobi(0.5, -0.5)]).unwrap();
        let r = run(&RunConfig::new(&spec, vec![Check::Reduce])).unwrap();
        assert!(r.pass);
        let red = &r.checks[0].details["reduction"];
        assert!((red["b"].as_f64().unwrap() + 1.0).abs() < 1e-9);
        assert!((red["c"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert!(red["m"].is_array());
    }

    #[test]
    fn round_trip() {
        let mut cfg = laguerre_cfg();
        cfg.backend = BackendKind::Exact;
        cfg.csv_dir = Some("dumps".into());
        assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn inapplicable_checks_rejected() {
        let spec = WeightSpec::new(vec![1.0], vec![S::laguerre(0.0), S::laguerre(0.5)]).unwrap();
        let cfg = RunConfig::new(&spec, vec![Check::Darboux]);
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let mut exact = RunConfig::new(&spec, vec![Check::Orth]);
        exact.backend = BackendKind::Exact;
        exact.n_max = 13;
        assert!(matches!(exact.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn schema_lists_checks() {
        let s = schema();
        assert_eq!(s["properties"]["checks"]["items"]["enum"].as_array().unwrap().len(), 8);
    }
}
