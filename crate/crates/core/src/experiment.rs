//! Randomized comparison of the three solvers on noisy RB systems.
//!
//! Each trial draws `F` with standard normal components, a standard normal
//! real `X0` and `G = F X0`, then contaminates a subset of `[F, G]` with
//! correlated uniform noise `E = scale * (rand(m, w) * rand(w, w))`. Every RB
//! component of a noisy block receives the same real slice of `E`. The mixed,
//! total and ordinary least squares solutions are compared against `X0`.

use std::collections::hash_map::DefaultHasher;
use std::fs;
use std::hash::{Hash, Hasher};
use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::RbMatrix;
use crate::plot;
use crate::solve::{self, MtlsProblem, SolvabilityReport, SolveOptions};

/// Which blocks of the system receive noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NoiseCase {
    /// Case 1: the noisy columns `A_b` and the right-hand side.
    RhsAndSubset,
    /// Case 2: every column of `A` and the right-hand side.
    AllColumns,
    /// Case 3: the right-hand side only.
    RhsOnly,
}

impl NoiseCase {
    pub const ALL: [NoiseCase; 3] = [
        NoiseCase::RhsAndSubset,
        NoiseCase::AllColumns,
        NoiseCase::RhsOnly,
    ];

    pub fn number(self) -> u8 {
        match self {
            NoiseCase::RhsAndSubset => 1,
            NoiseCase::AllColumns => 2,
            NoiseCase::RhsOnly => 3,
        }
    }

    pub fn from_number(k: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.number() == k)
    }

    /// Number of noise columns drawn for this case.
    pub fn noise_width(self, n: usize, n1: usize, d: usize) -> usize {
        match self {
            NoiseCase::RhsAndSubset => n - n1 + d,
            NoiseCase::AllColumns => n + d,
            NoiseCase::RhsOnly => d,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub m_values: Vec<usize>,
    pub n: usize,
    pub n1: usize,
    pub d: usize,
    pub trials: usize,
    pub noise_scale: f64,
    pub case: NoiseCase,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            m_values: vec![90, 110, 130, 150],
            n: 50,
            n1: 20,
            d: 35,
            trials: 20,
            noise_scale: 0.01,
            case: NoiseCase::RhsAndSubset,
            seed: 42,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidProblem(msg));
        if self.m_values.is_empty() {
            return bad("no row counts given".into());
        }
        if self.n == 0 || self.d == 0 {
            return bad(format!(
                "n = {} and d = {} must be positive",
                self.n, self.d
            ));
        }
        if let Some(m) = self.m_values.iter().find(|&&m| m < self.n + self.d) {
            return bad(format!("m = {m} is below n + d = {}", self.n + self.d));
        }
        if self.n1 > self.n {
            return bad(format!("n1 = {} exceeds n = {}", self.n1, self.n));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.noise_scale.is_finite() && self.noise_scale >= 0.0) {
            return bad(format!(
                "noise scale {} must be finite and nonnegative",
                self.noise_scale
            ));
        }
        Ok(())
    }
}

/// A generated system together with the noiseless solution `X0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub problem: MtlsProblem,
    pub x0: DMatrix<f64>,
}

/// Per-trial seed from the run seed, the row count and the trial index.
pub fn trial_seed(seed: u64, m: usize, trial: usize) -> u64 {
    let mut s = splitmix64(seed);
    s = splitmix64(s ^ m as u64);
    splitmix64(s ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn normal_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_iterator(
        rows,
        cols,
        (0..rows * cols).map(|_| rng.sample::<f64, _>(StandardNormal)),
    )
}

fn uniform_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_iterator(rows, cols, (0..rows * cols).map(|_| rng.random::<f64>()))
}

fn replicate(x: DMatrix<f64>) -> RbMatrix {
    RbMatrix::from_parts(x.clone(), x.clone(), x.clone(), x).expect("equal shapes")
}

/// Draws one noisy system with `m` rows from `seed`.
pub fn generate_instance(cfg: &ExperimentConfig, m: usize, seed: u64) -> Result<Instance> {
    cfg.validate()?;
    let (n, n1, d) = (cfg.n, cfg.n1, cfg.d);
    let n2 = n - n1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let f_parts: [DMatrix<f64>; 4] = std::array::from_fn(|_| normal_matrix(m, n, &mut rng));
    let [f0, f1, f2, f3] = f_parts;
    let f = RbMatrix::from_parts(f0, f1, f2, f3)?;
    let x0 = normal_matrix(n, d, &mut rng);
    let g = f.mul_real(&x0)?;

    let w = cfg.case.noise_width(n, n1, d);
    let mix = uniform_matrix(w, w, &mut rng);
    let e = uniform_matrix(m, w, &mut rng) * mix * cfg.noise_scale;
    let slice = |start: usize, len: usize| replicate(e.columns(start, len).into_owned());

    let (da, db, dg) = match cfg.case {
        NoiseCase::RhsAndSubset => (RbMatrix::zeros(m, n1), slice(0, n2), slice(n2, d)),
        NoiseCase::AllColumns => (slice(0, n1), slice(n1, n2), slice(n, d)),
        NoiseCase::RhsOnly => (RbMatrix::zeros(m, n1), RbMatrix::zeros(m, n2), slice(0, d)),
    };
    let a = f.add(&da.hstack(&db)?)?;
    let b = g.add(&dg)?;
    Ok(Instance {
        problem: MtlsProblem::new(a, b, n1)?,
        x0,
    })
}

/// Hash of the system data, used to check that every solver sees the same instance.
pub fn instance_digest(p: &MtlsProblem) -> u64 {
    let mut h = DefaultHasher::new();
    for mat in [p.a(), p.b()] {
        mat.shape().hash(&mut h);
        for part in mat.parts() {
            for v in part.iter() {
                v.to_bits().hash(&mut h);
            }
        }
    }
    h.finish()
}

/// Outcome of one trial. `errors` is `None` when any solver failed.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub m: usize,
    pub case: NoiseCase,
    pub trial: usize,
    /// `[||X_mtls - X0||_F, ||X_tls - X0||_F, ||X_ls - X0||_F]`.
    pub errors: Option<[f64; 3]>,
    pub diagnostics: [Option<SolvabilityReport>; 3],
    pub failure: Option<String>,
}

/// Solves one instance with all three methods.
pub fn run_trial(cfg: &ExperimentConfig, m: usize, trial: usize) -> Result<TrialResult> {
    let inst = generate_instance(cfg, m, trial_seed(cfg.seed, m, trial))?;
    let opts = SolveOptions {
        recover_corrections: false,
        ..Default::default()
    };
    let digest = instance_digest(&inst.problem);

    let splits = [cfg.n1, 0, cfg.n];
    let mut errors = [0.0; 3];
    let mut diagnostics = [None; 3];
    let mut failure = None;
    for (k, &n1) in splits.iter().enumerate() {
        let p = inst.problem.with_split(n1)?;
        assert_eq!(
            instance_digest(&p),
            digest,
            "solvers must see the same instance"
        );
        let outcome = match k {
            0 => solve::solve_mtls(&p, &opts),
            1 => solve::solve_tls(&p, &opts),
            _ => solve::solve_ls(&p, &opts),
        };
        match outcome {
            Ok(s) => {
                errors[k] = (&s.x - &inst.x0).norm();
                diagnostics[k] = Some(s.diagnostics);
            }
            Err(e) => {
                if let Error::NonUnique { report, .. } = &e {
                    diagnostics[k] = Some(*report);
                }
                failure.get_or_insert_with(|| format!("{}: {e}", ["mtls", "tls", "ls"][k]));
            }
        }
    }
    Ok(TrialResult {
        m,
        case: cfg.case,
        trial,
        errors: failure.is_none().then_some(errors),
        diagnostics,
        failure,
    })
}

/// Mean errors over the trials for one row count.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub m: usize,
    pub case: NoiseCase,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub skipped: usize,
}

impl ExperimentRow {
    pub fn means(&self) -> [f64; 3] {
        [self.eps1, self.eps2, self.eps3]
    }
}

fn jobs(cfg: &ExperimentConfig) -> Vec<(usize, usize)> {
    let mut ms = cfg.m_values.clone();
    ms.sort_unstable();
    ms.dedup();
    ms.into_iter()
        .flat_map(|m| (0..cfg.trials).map(move |t| (m, t)))
        .collect()
}

/// Averages trial results; input must be ordered by `(m, trial)`.
fn aggregate(case: NoiseCase, results: &[TrialResult]) -> Vec<ExperimentRow> {
    let mut rows: Vec<ExperimentRow> = Vec::new();
    for chunk in results.chunk_by(|a, b| a.m == b.m) {
        let ok: Vec<[f64; 3]> = chunk.iter().filter_map(|r| r.errors).collect();
        let mean = |k: usize| ok.iter().map(|e| e[k]).sum::<f64>() / ok.len() as f64;
        rows.push(ExperimentRow {
            m: chunk[0].m,
            case,
            eps1: mean(0),
            eps2: mean(1),
            eps3: mean(2),
            skipped: chunk.len() - ok.len(),
        });
    }
    rows
}

/// Runs every trial of `cfg` on the current thread.
pub fn run_experiment_sequential(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    cfg.validate()?;
    let results = jobs(cfg)
        .into_iter()
        .map(|(m, t)| run_trial(cfg, m, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(cfg.case, &results))
}

/// Runs the trials of `cfg` on the rayon pool. The output is identical to
/// [`run_experiment_sequential`].
#[cfg(feature = "parallel")]
pub fn run_experiment_parallel(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    use rayon::prelude::*;

    cfg.validate()?;
    let results = jobs(cfg)
        .into_par_iter()
        .map(|(m, t)| run_trial(cfg, m, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(cfg.case, &results))
}

/// Runs the experiment, in parallel when the `parallel` feature is enabled.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    #[cfg(feature = "parallel")]
    {
        run_experiment_parallel(cfg)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_experiment_sequential(cfg)
    }
}

pub const CSV_HEADER: &str = "m,case,eps1,eps2,eps3,skipped";

pub fn results_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.m,
            r.case.number(),
            r.eps1,
            r.eps2,
            r.eps3,
            r.skipped
        ));
    }
    out
}

pub fn parse_results_csv(text: &str) -> Result<Vec<ExperimentRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header `{CSV_HEADER}`"),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: i + 1, msg };
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 6 {
            return Err(err(format!("expected 6 fields, found {}", f.len())));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| err(format!("bad number `{s}`: {e}")))
        };
        let case = f[1]
            .parse::<u8>()
            .ok()
            .and_then(NoiseCase::from_number)
            .ok_or_else(|| err(format!("bad case `{}`", f[1])))?;
        rows.push(ExperimentRow {
            m: f[0].parse().map_err(|e| err(format!("bad m: {e}")))?,
            case,
            eps1: num(f[2])?,
            eps2: num(f[3])?,
            eps3: num(f[4])?,
            skipped: f[5]
                .parse()
                .map_err(|e| err(format!("bad skipped count: {e}")))?,
        });
    }
    Ok(rows)
}

/// Writes `results.csv` and one `caseN.svg` chart per case into `out_dir`.
pub fn emit_outputs(rows: &[ExperimentRow], out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    if rows.is_empty() {
        return Err(Error::InvalidProblem("no results to write".into()));
    }
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir)?;
    let csv_path = dir.join("results.csv");
    fs::File::create(&csv_path)?.write_all(results_csv(rows).as_bytes())?;
    let mut written = vec![csv_path];

    let mut cases: Vec<NoiseCase> = rows.iter().map(|r| r.case).collect();
    cases.sort_unstable();
    cases.dedup();
    for case in cases {
        let subset: Vec<ExperimentRow> = rows.iter().filter(|r| r.case == case).cloned().collect();
        let path = dir.join(format!("case{}.svg", case.number()));
        fs::write(&path, plot::error_chart(case, &subset))?;
        written.push(path);
    }
    Ok(written)
}
