//! Method dispatch, metric rows and reproducible synthetic sweeps.
//!
//! A sweep runs every `(method, ratio, trial)` cell of an [`ExperimentSpec`]
//! in that nested order. Each `(ratio, trial)` pair owns a truth tensor and a
//! mask drawn from seeds derived from the spec seed, so all methods in a cell
//! see the same problem and reruns are bit-identical. Rows reach the caller's
//! sink as soon as they are computed; [`run_sweep_csv`] appends them to a CSV
//! file and skips cells already present there, which makes long sweeps
//! resumable.
//!
//! Reported times cover the solver call only: synthesis, masking and metric
//! evaluation happen outside the timed region.

use std::collections::HashSet;
use std::fmt;
use std::fs::OpenOptions;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::admm::{solve_admm, AdmmConfig, StopRule};
use crate::cur::{tccur, IcurcConfig};
use crate::error::{Error, Result};
use crate::metrics::{psnr, relative_error};
use crate::regularizer::Regularizer;
use crate::rng::derive_seed;
use crate::sampling::{project, random_tubal_mask, TubalMask};
use crate::synth::synth_low_tubal_rank;
use crate::tensor::Tensor3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Tnn,
    Tl12,
    Tccur,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Tnn, Method::Tl12, Method::Tccur];

    pub fn name(self) -> &'static str {
        match self {
            Method::Tnn => "tnn",
            Method::Tl12 => "tl12",
            Method::Tccur => "tccur",
        }
    }

    pub fn regularizer(self) -> Option<Regularizer> {
        match self {
            Method::Tnn => Some(Regularizer::Tnn),
            Method::Tl12 => Some(Regularizer::Tl12),
            Method::Tccur => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tnn" => Ok(Method::Tnn),
            "tl12" => Ok(Method::Tl12),
            "tccur" => Ok(Method::Tccur),
            _ => Err(Error::invalid(format!(
                "unknown method `{s}` (expected tnn, tl12 or tccur)"
            ))),
        }
    }
}

/// Settings for every method; only the part matching the chosen method is
/// used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub admm: AdmmConfig,
    pub cur: IcurcConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            admm: AdmmConfig::default(),
            cur: IcurcConfig::new(1, 1, 1),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solved {
    pub estimate: Tensor3,
    pub iters: usize,
    pub converged: bool,
    pub time_s: f64,
}

/// Runs one method on `y` and times the solver call.
pub fn solve(method: Method, y: &Tensor3, mask: &TubalMask, cfg: &SolverConfig) -> Result<Solved> {
    match method.regularizer() {
        Some(reg) => {
            let admm = AdmmConfig {
                regularizer: reg,
                ..cfg.admm.clone()
            };
            let start = Instant::now();
            let (estimate, st) = solve_admm(y, mask, &admm, None)?;
            Ok(Solved {
                estimate,
                iters: st.iter,
                converged: st.converged,
                time_s: start.elapsed().as_secs_f64(),
            })
        }
        None => {
            let start = Instant::now();
            let res = tccur(y, mask, &cfg.cur)?;
            let time_s = start.elapsed().as_secs_f64();
            Ok(Solved {
                iters: res.max_iters(),
                converged: res.converged.iter().all(|&c| c),
                estimate: res.estimate,
                time_s,
            })
        }
    }
}

/// One result line. `re` and `psnr` are empty for failed runs; `psnr` is
/// `inf` for an exact recovery.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub method: Method,
    pub ratio: f64,
    pub trial: usize,
    pub re: Option<f64>,
    pub psnr: Option<f64>,
    pub time_s: f64,
    pub iters: usize,
}

impl MetricRow {
    pub fn failed(&self) -> bool {
        self.re.is_none()
    }

    fn key(&self) -> (Method, u64, usize) {
        (self.method, self.ratio.to_bits(), self.trial)
    }
}

pub const CSV_HEADER: &str = "method,ratio,trial,re,psnr,time_s,iters";

fn default_max_iters() -> usize {
    500
}

fn default_tol() -> f64 {
    1e-6
}

fn default_rho() -> f64 {
    1e-2
}

fn default_lambda() -> f64 {
    1.0
}

/// JSON description of a synthetic sweep.
///
/// All methods stop when the relative error on the observed tubes drops
/// below `tol` (for TCCUR: its strip residual), or after `max_iters`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub dims: [usize; 3],
    pub rank: usize,
    pub ratios: Vec<f64>,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default)]
    pub core_rows: Option<usize>,
    #[serde(default)]
    pub core_cols: Option<usize>,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(text)
            .map_err(|e| Error::invalid(format!("experiment spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        ExperimentSpec::from_json(&text).map_err(|e| Error::Malformed {
            path: path.to_owned(),
            reason: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let [n1, n2, n3] = self.dims;
        if n1 == 0 || n2 == 0 || n3 == 0 {
            return Err(Error::invalid("dims must be positive"));
        }
        if self.rank == 0 || self.rank > n1.min(n2) {
            return Err(Error::invalid(format!(
                "rank {} outside 1..={}",
                self.rank,
                n1.min(n2)
            )));
        }
        if self.ratios.is_empty() || self.ratios.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
            return Err(Error::invalid(
                "ratios must be a nonempty list of values in (0, 1]",
            ));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("methods must not be empty"));
        }
        self.solver_config(0).admm.validate()?;
        self.solver_config(0).cur.validate(n1, n2)
    }

    /// Solver settings for one cell; `cur_seed` drives TCCUR's index draws.
    pub fn solver_config(&self, cur_seed: u64) -> SolverConfig {
        let [n1, n2, _] = self.dims;
        let admm = AdmmConfig {
            rho: self.rho,
            lambda_weight: self.lambda,
            max_iters: self.max_iters,
            tol: self.tol,
            stop: StopRule::ObservedResidual,
            ..Default::default()
        };
        let mut cur = IcurcConfig::new(self.rank, n1, n2);
        cur.eps = self.tol;
        cur.max_iters = self.max_iters;
        cur.seed = cur_seed;
        if let Some(r) = self.core_rows {
            cur.row_count = r;
        }
        if let Some(c) = self.core_cols {
            cur.col_count = c;
        }
        SolverConfig { admm, cur }
    }

    /// Seeds for the truth, mask and TCCUR draws of one `(ratio, trial)`.
    pub fn cell_seeds(&self, ratio: f64, trial: usize) -> [u64; 3] {
        let base = [ratio.to_bits(), trial as u64];
        [0, 1, 2].map(|tag| derive_seed(self.seed, &[tag, base[0], base[1]]))
    }

    /// Truth, mask and observations for one `(ratio, trial)`.
    pub fn problem(&self, ratio: f64, trial: usize) -> Result<(Tensor3, TubalMask, Tensor3)> {
        let [n1, n2, n3] = self.dims;
        let [truth_seed, mask_seed, _] = self.cell_seeds(ratio, trial);
        let truth = synth_low_tubal_rank(n1, n2, n3, self.rank, truth_seed)?;
        let mask = random_tubal_mask(n1, n2, ratio, mask_seed)?;
        let y = project(&truth, &mask)?;
        Ok((truth, mask, y))
    }

    pub fn cell_count(&self) -> usize {
        self.methods.len() * self.ratios.len() * self.trials
    }
}

/// Runs one cell. Solver and problem-generation failures become a failed
/// row rather than an error.
pub fn run_cell(spec: &ExperimentSpec, method: Method, ratio: f64, trial: usize) -> MetricRow {
    let mut row = MetricRow {
        method,
        ratio,
        trial,
        re: None,
        psnr: None,
        time_s: 0.0,
        iters: 0,
    };
    let outcome = spec.problem(ratio, trial).and_then(|(truth, mask, y)| {
        let cfg = spec.solver_config(spec.cell_seeds(ratio, trial)[2]);
        let solved = solve(method, &y, &mask, &cfg)?;
        Ok((
            relative_error(&solved.estimate, &truth)?,
            psnr(&solved.estimate, &truth)?,
            solved,
        ))
    });
    if let Ok((re, p, solved)) = outcome {
        row.re = Some(re);
        row.psnr = Some(p);
        row.time_s = solved.time_s;
        row.iters = solved.iters;
    }
    row
}

/// Runs every cell not in `skip`, in `(method, ratio, trial)` order, passing
/// each row to `sink` before starting the next.
pub fn run_sweep_with<F>(
    spec: &ExperimentSpec,
    skip: &HashSet<(Method, u64, usize)>,
    mut sink: F,
) -> Result<Vec<MetricRow>>
where
    F: FnMut(&MetricRow) -> Result<()>,
{
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.cell_count());
    for &method in &spec.methods {
        for &ratio in &spec.ratios {
            for trial in 0..spec.trials {
                if skip.contains(&(method, ratio.to_bits(), trial)) {
                    continue;
                }
                let row = run_cell(spec, method, ratio, trial);
                sink(&row)?;
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

pub fn run_sweep(spec: &ExperimentSpec) -> Result<Vec<MetricRow>> {
    run_sweep_with(spec, &HashSet::new(), |_| Ok(()))
}

pub fn read_rows(path: &Path) -> Result<Vec<MetricRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut rows = Vec::new();
    for rec in reader.deserialize() {
        rows.push(rec.map_err(|e| csv_error(path, e))?);
    }
    Ok(rows)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Malformed {
            path: path.to_owned(),
            reason: format!("{other:?}"),
        },
    }
}

pub fn rows_to_csv(rows: &[MetricRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("flush to vec")).expect("csv is utf-8")
}

/// Appends the rows of `spec` to `path`, skipping cells that already have a
/// successful row there. Returns only the newly computed rows.
pub fn run_sweep_csv(spec: &ExperimentSpec, path: &Path) -> Result<Vec<MetricRow>> {
    spec.validate()?;
    let existing = if path.exists() {
        read_rows(path)?
    } else {
        Vec::new()
    };
    let skip: HashSet<_> = existing
        .iter()
        .filter(|r| !r.failed())
        .map(MetricRow::key)
        .collect();
    let fresh = !path.exists() || std::fs::metadata(path)?.len() == 0;
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(fresh)
        .from_writer(file);
    run_sweep_with(spec, &skip, |row| {
        w.serialize(row).map_err(|e| csv_error(path, e))?;
        w.flush()?;
        Ok(())
    })
}

/// Median of the finite values, `None` when there are none.
pub fn median(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let mut v: Vec<f64> = values.into_iter().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ExperimentSpec {
        ExperimentSpec::from_json(
            r#"{"dims": [20, 20, 4], "rank": 1, "ratios": [0.7, 1.0], "trials": 2,
                "methods": ["tnn", "tl12", "tccur"], "seed": 7}"#,
        )
        .unwrap()
    }

    #[test]
    fn spec_defaults_and_validation() {
        let s = spec();
        assert_eq!(s.tol, 1e-6);
        assert_eq!(s.rho, 1e-2);
        assert_eq!(ExperimentSpec::from_json(&s.to_json()).unwrap(), s);
        for bad in [
            r#"{"dims": [4,4,2], "rank": 1, "ratios": [0.0], "trials": 1, "methods": ["tnn"], "seed": 0}"#,
            r#"{"dims": [4,4,2], "rank": 1, "ratios": [1.2], "trials": 1, "methods": ["tnn"], "seed": 0}"#,
            r#"{"dims": [4,4,2], "rank": 1, "ratios": [0.5], "trials": 0, "methods": ["tnn"], "seed": 0}"#,
            r#"{"dims": [4,4,2], "rank": 5, "ratios": [0.5], "trials": 1, "methods": ["tnn"], "seed": 0}"#,
            r#"{"dims": [4,4,2], "rank": 1, "ratios": [0.5], "trials": 1, "methods": ["pca"], "seed": 0}"#,
            r#"{"dims": [4,4,2], "rank": 1, "ratios": [0.5], "trials": 1, "methods": ["tnn"], "seed": 0, "typo": 1}"#,
        ] {
            assert!(ExperimentSpec::from_json(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn full_observation_is_exact_and_order_is_fixed() {
        let s = spec();
        let rows = run_sweep(&s).unwrap();
        assert_eq!(rows.len(), s.cell_count());
        let keys: Vec<_> = rows
            .iter()
            .map(|r| (r.method, r.ratio.to_bits(), r.trial))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        for r in rows.iter().filter(|r| r.ratio == 1.0) {
            assert!(r.re.unwrap() < 1e-12, "{r:?}");
        }
        for r in rows.iter().filter(|r| r.ratio < 1.0) {
            assert!(r.re.unwrap() < 1e-2, "{r:?}");
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let s = spec();
        let a: Vec<_> = run_sweep(&s).unwrap().into_iter().map(|r| r.re).collect();
        let b: Vec<_> = run_sweep(&s).unwrap().into_iter().map(|r| r.re).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn methods_in_a_cell_share_the_problem() {
        let s = spec();
        let (t1, m1, _) = s.problem(0.7, 1).unwrap();
        let (t2, m2, _) = s.problem(0.7, 1).unwrap();
        assert_eq!((t1.clone(), m1.clone()), (t2, m2));
        let (t3, m3, _) = s.problem(0.7, 0).unwrap();
        assert_ne!(t1, t3);
        assert_ne!(m1, m3);
    }

    #[test]
    fn failed_cells_become_failed_rows() {
        let mut s = spec();
        s.ratios = vec![0.001];
        s.methods = vec![Method::Tnn];
        s.trials = 1;
        let rows = run_sweep(&s).unwrap();
        assert!(rows[0].failed());
        let csv = rows_to_csv(&rows);
        assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
        assert!(csv.lines().nth(1).unwrap().starts_with("tnn,0.001,0,,,"));
    }

    #[test]
    fn csv_sweep_resumes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        let mut s = spec();
        s.methods = vec![Method::Tccur];
        s.trials = 1;
        let first = run_sweep_csv(&s, &path).unwrap();
        assert_eq!(first.len(), 2);
        s.trials = 3;
        let second = run_sweep_csv(&s, &path).unwrap();
        assert_eq!(second.len(), 4);
        assert!(second.iter().all(|r| r.trial >= 1));
        let all = read_rows(&path).unwrap();
        assert_eq!(all.len(), 6);
        let fresh = run_sweep(&s).unwrap();
        for r in &fresh {
            let stored = all.iter().find(|a| a.key() == r.key()).unwrap();
            assert_eq!(stored.re, r.re);
        }
        assert_eq!(
            std::fs::read_to_string(&path)
                .unwrap()
                .matches("method,")
                .count(),
            1
        );
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("x".parse::<Method>().is_err());
    }

    #[test]
    fn median_cases() {
        assert_eq!(median([3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median([4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median([f64::NAN]), None);
    }
}
