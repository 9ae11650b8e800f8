//! Random two-qubit states from the 16-parameter `W' = B²/Tr B²` construction,
//! Monte Carlo extremes of Bell operators, and angle sweeps.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{normalized, CMatrix, HermitianMatrix, C64};
use crate::polytope::{classical_range, enumerate_vertices, rational_to_f64, EventStructure, Inequality};
use crate::qops::{self, bell_operator, to_bell_basis, BellOperator, DensityMatrix};
use crate::schedule::AngleSchedule;
use crate::spectra::{self, cardano_eigenvalues, o33_block_decompose};

/// Name of the distribution drawn for `b₁..b₁₆`, recorded in run metadata.
pub const DISTRIBUTION: &str = "standard-normal";

const CHUNK: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityParams {
    pub b: [f64; 16],
}

impl DensityParams {
    /// `Σ_{i≤4} b_i² + 2 Σ_{j≥5} b_j²`, which equals `Tr B²`.
    pub fn normalization(&self) -> f64 {
        let b = &self.b;
        b[..4].iter().map(|x| x * x).sum::<f64>() + 2.0 * b[4..].iter().map(|x| x * x).sum::<f64>()
    }

    /// The Hermitian matrix `B`.
    pub fn matrix(&self) -> CMatrix {
        let b = &self.b;
        let z = |re: f64, im: f64| C64::new(re, im);
        CMatrix::from_rows([
            [z(b[0], 0.0), z(b[4], b[5]), z(b[10], b[11]), z(b[14], b[15])],
            [z(b[4], -b[5]), z(b[1], 0.0), z(b[6], b[7]), z(b[12], b[13])],
            [z(b[10], -b[11]), z(b[6], -b[7]), z(b[2], 0.0), z(b[8], b[9])],
            [z(b[14], -b[15]), z(b[12], -b[13]), z(b[8], -b[9]), z(b[3], 0.0)],
        ])
    }
}

pub fn density_from_params(p: &DensityParams) -> Result<DensityMatrix> {
    let norm = p.normalization();
    if !norm.is_finite() || norm <= 0.0 {
        return Err(Error::invalid("density parameters must be finite and not all zero"));
    }
    let b = p.matrix();
    let w = (&b * &b).scale(1.0 / norm);
    Ok(DensityMatrix::new_unchecked(HermitianMatrix::symmetrized(&w)))
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Generator for sample `index` of `stream` (a grid point), independent of
/// evaluation order.
pub fn sample_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix(splitmix(splitmix(seed) ^ stream) ^ index))
}

pub fn sample_params(seed: u64, stream: u64, index: u64) -> DensityParams {
    let mut rng = sample_rng(seed, stream, index);
    let mut b = [0.0; 16];
    b.iter_mut().for_each(|x| *x = rng.sample(StandardNormal));
    DensityParams { b }
}

/// `n` random density matrices, reproducible from `seed`.
pub fn sample_states(n: usize, seed: u64) -> impl Iterator<Item = DensityMatrix> {
    (0..n as u64).map(move |i| density_from_params(&sample_params(seed, 0, i)).expect("normal draws are nonzero"))
}

/// Extremes of `Tr[W' O]` over a batch of random states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampledExtremes {
    pub min: f64,
    pub max: f64,
    /// Sample index attaining `max` (lowest on ties).
    pub argmax: u64,
}

impl SampledExtremes {
    fn merge(self, other: SampledExtremes) -> SampledExtremes {
        SampledExtremes {
            min: self.min.min(other.min),
            max: if other.max > self.max { other.max } else { self.max },
            argmax: if other.max > self.max {
                other.argmax
            } else {
                self.argmax
            },
        }
    }
}

/// Returns `None` for `n == 0`. Operators in the Bell basis are evaluated on
/// the state rotated into that basis.
pub fn sampled_extremes(o: &BellOperator, n: usize, seed: u64, stream: u64, exec: Exec) -> Option<SampledExtremes> {
    if n == 0 {
        return None;
    }
    let op = computational(o);
    let chunks = n.div_ceil(CHUNK);
    exec.map(chunks, |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(n);
        let mut acc = SampledExtremes {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            argmax: lo as u64,
        };
        for i in lo as u64..hi as u64 {
            let w = density_from_params(&sample_params(seed, stream, i)).expect("normal draws are nonzero");
            let v = qops::trace_of_product(w.matrix().matrix(), op.matrix()).re;
            acc = acc.merge(SampledExtremes {
                min: v,
                max: v,
                argmax: i,
            });
        }
        acc
    })
    .into_iter()
    .reduce(SampledExtremes::merge)
}

fn computational(o: &BellOperator) -> HermitianMatrix {
    match o.basis {
        qops::Basis::Computational => o.matrix.clone(),
        qops::Basis::Bell => o.matrix.conjugate_by(&qops::bell_basis_unitary().adjoint()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolishOptions {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_iters: usize,
    /// Consecutive rejected moves before the step is halved.
    pub patience: usize,
}

impl Default for PolishOptions {
    fn default() -> Self {
        PolishOptions {
            initial_step: 0.1,
            min_step: 1e-10,
            max_iters: 200_000,
            patience: 20,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Polished {
    pub value: f64,
    pub state: Vec<C64>,
    pub iterations: usize,
}

/// Gradient-free ascent of `<ψ|O|ψ>` over pure states starting from `start`:
/// random complex Gaussian moves, accepted when they improve, step halved
/// after `patience` consecutive failures.
pub fn polish_pure_state(o: &BellOperator, start: &[C64], seed: u64, opts: PolishOptions) -> Polished {
    let h = computational(o);
    let mut rng = sample_rng(seed, u64::MAX, 0);
    let mut psi = normalized(start);
    let mut value = h.expectation(&psi);
    let mut step = opts.initial_step;
    let mut fails = 0;
    let mut iterations = 0;
    while iterations < opts.max_iters && step >= opts.min_step {
        iterations += 1;
        let trial: Vec<C64> = psi
            .iter()
            .map(|z| {
                let (re, im): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
                z + C64::new(re, im) * step
            })
            .collect();
        let trial = normalized(&trial);
        let v = h.expectation(&trial);
        if v > value {
            psi = trial;
            value = v;
            fails = 0;
        } else {
            fails += 1;
            if fails == opts.patience {
                step *= 0.5;
                fails = 0;
            }
        }
    }
    Polished {
        value,
        state: psi,
        iterations,
    }
}

/// Best sampled state, its top eigenvector, then [`polish_pure_state`].
pub fn polished_max(o: &BellOperator, n: usize, seed: u64, stream: u64, exec: Exec) -> Result<Option<Polished>> {
    let Some(ext) = sampled_extremes(o, n, seed, stream, exec) else {
        return Ok(None);
    };
    let w = density_from_params(&sample_params(seed, stream, ext.argmax))?;
    let top = spectra::eigen(w.matrix())?.eigenvectors.pop().unwrap();
    Ok(Some(polish_pure_state(
        o,
        &top,
        seed ^ stream,
        PolishOptions::default(),
    )))
}

/// `n` points from `lo` to `hi` inclusive.
pub fn theta_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid("grid needs a finite range and at least one point"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|k| if k == n - 1 { hi } else { lo + step * k as f64 })
        .collect())
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub ineq: Inequality,
    pub structure: EventStructure,
    pub schedule: AngleSchedule,
    pub grid: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    pub exec: Exec,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub theta: f64,
    pub analytic_min: f64,
    pub analytic_max: f64,
    pub sampled_min: Option<f64>,
    pub sampled_max: Option<f64>,
    pub classical_min: f64,
    pub classical_max: f64,
    pub n_samples: usize,
    pub seed: u64,
}

pub fn sweep(cfg: &SweepConfig) -> Result<Vec<SweepResult>> {
    if cfg.grid.is_empty() {
        return Err(Error::invalid("empty sweep grid"));
    }
    cfg.ineq.validate_for(&cfg.structure)?;
    let vertices = enumerate_vertices(&cfg.structure)?;
    let (cmin, cmax) = classical_range(&cfg.ineq, &cfg.structure, &vertices)?;
    let (classical_min, classical_max) = (rational_to_f64(cmin), rational_to_f64(cmax));

    cfg.exec
        .map(cfg.grid.len(), |g| -> Result<SweepResult> {
            let theta = cfg.grid[g];
            let o = bell_operator(&cfg.ineq, &cfg.schedule.angles_at(theta), &cfg.structure)?;
            let s = spectra::eigen(&o.matrix)?;
            let sampled = sampled_extremes(&o, cfg.n_samples, cfg.seed, g as u64, cfg.exec);
            Ok(SweepResult {
                theta,
                analytic_min: s.min(),
                analytic_max: s.max(),
                sampled_min: sampled.map(|x| x.min),
                sampled_max: sampled.map(|x| x.max),
                classical_min,
                classical_max,
                n_samples: cfg.n_samples,
                seed: cfg.seed,
            })
        })
        .into_iter()
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenMethod {
    /// Bell-basis block `o1 ⊕ o3`, roots ordered `[o1, λ₂, λ₃, λ₄]`.
    Cardano,
    /// Numerical spectrum, ascending.
    Numeric,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenRow {
    pub theta: f64,
    pub lambdas: Vec<f64>,
}

/// Eigenvalue curves along a schedule. Uses the block/Cardano route when the
/// Bell-basis operator splits as `1 ⊕ 3` at every grid point, and the numeric
/// solver otherwise.
pub fn eigencurves(
    ineq: &Inequality,
    structure: &EventStructure,
    schedule: &AngleSchedule,
    grid: &[f64],
    exec: Exec,
) -> Result<(EigenMethod, Vec<EigenRow>)> {
    let ops = exec
        .map_slice(grid, |&t| bell_operator(ineq, &schedule.angles_at(t), structure))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let blocks: Option<Vec<_>> = ops
        .iter()
        .map(|o| to_bell_basis(o).ok().and_then(|b| o33_block_decompose(&b).ok()))
        .collect();
    if let Some(blocks) = blocks {
        let rows = grid
            .iter()
            .zip(blocks)
            .map(|(&theta, (o1, o3))| {
                let mut lambdas = vec![o1];
                lambdas.extend(cardano_eigenvalues(&o3));
                EigenRow { theta, lambdas }
            })
            .collect();
        return Ok((EigenMethod::Cardano, rows));
    }
    let rows = exec
        .map(grid.len(), |k| {
            spectra::eigen(&ops[k].matrix).map(|s| EigenRow {
                theta: grid[k],
                lambdas: s.eigenvalues,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok((EigenMethod::Numeric, rows))
}

/// Locale-independent rendering rounded to 12 significant digits.
pub fn fmt_sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let r: f64 = format!("{x:.11e}").parse().unwrap();
    if r == 0.0 {
        "0".into()
    } else if (1e-5..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "theta",
        "analytic_min",
        "analytic_max",
        "sampled_min",
        "sampled_max",
        "classical_min",
        "classical_max",
        "n_samples",
        "seed",
    ])?;
    let opt = |x: Option<f64>| x.map(fmt_sig12).unwrap_or_default();
    for r in rows {
        w.write_record([
            fmt_sig12(r.theta),
            fmt_sig12(r.analytic_min),
            fmt_sig12(r.analytic_max),
            opt(r.sampled_min),
            opt(r.sampled_max),
            fmt_sig12(r.classical_min),
            fmt_sig12(r.classical_max),
            r.n_samples.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_eigencurves_csv<W: Write>(rows: &[EigenRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let width = rows.first().map_or(4, |r| r.lambdas.len());
    let mut header = vec!["theta".to_string()];
    header.extend((1..=width).map(|k| format!("lambda{k}")));
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![fmt_sig12(r.theta)];
        rec.extend(r.lambdas.iter().map(|&x| fmt_sig12(x)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
