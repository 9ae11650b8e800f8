//! Command-line front end. Every command writes JSON, CSV or a plain table;
//! sweeps also write a manifest from which the output can be reproduced.

mod manifest;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

pub use manifest::{sha256_hex, RunManifest};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::C64;
use crate::polytope::{
    enumerate_vertices, hull_facets, verify_facet, EventStructure, HullBudget, Inequality, Polytope,
};
use crate::presets;
use crate::qops::{bell_operator, to_bell_basis, Basis, BellOperator};
use crate::sampling::{self, fmt_sig12, EigenMethod, SweepConfig};
use crate::schedule::{parse_angles, parse_scalar, AngleSchedule};
use crate::spectra::{self, quantum_bound};
use crate::states::{self, PureState};

#[derive(Parser, Debug)]
#[command(
    name = "bell-bounds",
    version,
    about = "Bell-type inequalities and their quantum bounds"
)]
pub struct Cli {
    /// Run without worker threads.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Vertices, facets and facet checks of correlation polytopes.
    Polytope {
        #[command(subcommand)]
        cmd: PolytopeCmd,
    },
    /// Bell operator construction.
    Operator {
        #[command(subcommand)]
        cmd: OperatorCmd,
    },
    /// Eigenvalues of a Bell operator.
    Spectrum {
        #[command(flatten)]
        op: OperatorArgs,
        /// Print the full spectrum as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Classical range, quantum extremes and the maximally violating state.
    Bound {
        #[command(flatten)]
        op: OperatorArgs,
    },
    /// Bounds along an angle schedule, written as CSV with a manifest sidecar.
    Sweep(SweepArgs),
    /// Pure-state analysis.
    State {
        #[command(subcommand)]
        cmd: StateCmd,
    },
    /// Re-run a sweep from its manifest and compare checksums.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum PolytopeCmd {
    /// All 0/1 vertices in binary counting order.
    Vertices {
        #[arg(long)]
        structure: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Complete facet list.
    Facets {
        #[arg(long)]
        structure: String,
        #[arg(long, default_value_t = HullBudget::default().max_dim)]
        max_dim: usize,
        #[arg(long, default_value_t = HullBudget::default().max_vertices)]
        max_vertices: usize,
        #[arg(long, default_value_t = HullBudget::default().max_rays)]
        max_rays: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check an inequality against every vertex.
    Verify {
        #[arg(long)]
        structure: Option<String>,
        #[arg(long)]
        ineq: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum OperatorCmd {
    /// Build the operator and print it as JSON.
    Build {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct OperatorArgs {
    /// Structure JSON file or `builtin:single|ch|3x3`. Defaults to the
    /// structure of a built-in inequality.
    #[arg(long)]
    pub structure: Option<String>,
    /// Inequality JSON file or `builtin:trivial|ch|ch-printed|i33`.
    #[arg(long)]
    pub ineq: String,
    /// Fixed angles, e.g. `a=0,b=pi/2,c=pi/4,d=3pi/4`.
    #[arg(long)]
    pub angles: String,
    /// Express the operator in the Bell basis.
    #[arg(long)]
    pub bell: bool,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SweepArgs {
    #[arg(long)]
    pub structure: Option<String>,
    #[arg(long)]
    pub ineq: String,
    /// Angles as affine functions of t, e.g. `a=0,b=2t,c=t,d=3t`.
    #[arg(long)]
    pub schedule: String,
    /// `lo:hi:n`; ends may use `pi`.
    #[arg(long, default_value = "0:pi:101")]
    pub grid: String,
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Write eigenvalue curves (`theta,lambda1..`) instead of bounds.
    #[arg(long)]
    pub eigencurves: bool,
}

#[derive(Subcommand, Debug)]
pub enum StateCmd {
    /// Schmidt decomposition and entanglement.
    Analyze {
        /// JSON file, inline JSON, `builtin:singlet|psi-max|phi+|psi+|psi-|phi-`
        /// or `family:THETA`.
        #[arg(long)]
        state: String,
        #[arg(long)]
        json: bool,
    },
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };
    match cli.command {
        Command::Polytope { cmd } => polytope_cmd(cmd, exec),
        Command::Operator {
            cmd: OperatorCmd::Build { op, out },
        } => {
            let o = build_operator(&op)?;
            emit(out.as_deref(), &to_json(&o)?)
        }
        Command::Spectrum { op, json } => spectrum_cmd(&op, json),
        Command::Bound { op } => bound_cmd(&op),
        Command::Sweep(args) => sweep_cmd(&args, exec),
        Command::State {
            cmd: StateCmd::Analyze { state, json },
        } => state_cmd(&state, json),
        Command::Replay { manifest } => replay_cmd(&manifest, exec),
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_input(spec: &str) -> Result<String> {
    fs::read_to_string(spec).map_err(|e| Error::invalid(format!("cannot read {spec}: {e}")))
}

fn load_structure(spec: Option<&str>, ineq_spec: &str) -> Result<EventStructure> {
    match spec {
        Some(s) => match s.strip_prefix("builtin:") {
            Some(name) => presets::structure_by_name(name),
            None => serde_json::from_str(&read_input(s)?).map_err(|e| Error::invalid(format!("{s}: {e}"))),
        },
        None => match ineq_spec.strip_prefix("builtin:") {
            Some("trivial") => Ok(presets::single_direction()),
            Some("ch" | "ch-printed") => Ok(presets::clauser_horne()),
            Some("i33") => Ok(presets::three_by_three()),
            _ => Err(Error::invalid("--structure is required for this inequality")),
        },
    }
}

fn load_ineq(spec: &str) -> Result<Inequality> {
    match spec.strip_prefix("builtin:") {
        Some(name) => presets::inequality_by_name(name),
        None => serde_json::from_str(&read_input(spec)?).map_err(|e| Error::invalid(format!("{spec}: {e}"))),
    }
}

fn polytope_cmd(cmd: PolytopeCmd, exec: Exec) -> Result<()> {
    match cmd {
        PolytopeCmd::Vertices { structure, out } => {
            let s = load_structure(Some(&structure), "")?;
            let v = enumerate_vertices(&s)?;
            let keys: Vec<String> = s.term_keys().iter().map(ToString::to_string).collect();
            emit(out.as_deref(), &to_json(&json!({ "keys": keys, "vertices": v }))?)
        }
        PolytopeCmd::Facets {
            structure,
            max_dim,
            max_vertices,
            max_rays,
            out,
        } => {
            let s = load_structure(Some(&structure), "")?;
            let v = enumerate_vertices(&s)?;
            let budget = HullBudget {
                max_dim,
                max_vertices,
                max_rays,
                exec,
            };
            let facets = hull_facets(&s, &v, &budget)?;
            eprintln!("{} facets", facets.len());
            emit(
                out.as_deref(),
                &to_json(&json!({ "count": facets.len(), "facets": facets }))?,
            )
        }
        PolytopeCmd::Verify { structure, ineq, out } => {
            let s = load_structure(structure.as_deref(), &ineq)?;
            let i = load_ineq(&ineq)?;
            let v = enumerate_vertices(&s)?;
            emit(out.as_deref(), &to_json(&verify_facet(&i, &s, &v)?)?)
        }
    }
}

fn build_operator(op: &OperatorArgs) -> Result<BellOperator> {
    let s = load_structure(op.structure.as_deref(), &op.ineq)?;
    let i = load_ineq(&op.ineq)?;
    let o = bell_operator(&i, &parse_angles(&op.angles)?, &s)?;
    if op.bell {
        to_bell_basis(&o)
    } else {
        Ok(o)
    }
}

fn spectrum_cmd(op: &OperatorArgs, json: bool) -> Result<()> {
    let o = build_operator(op)?;
    let s = spectra::eigen(&o.matrix)?;
    if json {
        return emit(None, &to_json(&s)?);
    }
    let mut t = String::new();
    writeln!(t, "k  eigenvalue").unwrap();
    for (k, l) in s.eigenvalues.iter().enumerate() {
        writeln!(t, "{}  {}", k + 1, fmt_sig12(*l)).unwrap();
    }
    writeln!(t, "residual {}", fmt_sig12(s.residual)).unwrap();
    for r in &s.degenerate {
        writeln!(t, "degenerate {}..{}", r.start + 1, r.end).unwrap();
    }
    emit(None, &t)
}

/// Amplitudes below this print as zero in tables.
const DISPLAY_CHOP: f64 = 1e-14;

fn fmt_complex(z: C64) -> String {
    let chop = |x: f64| if x.abs() < DISPLAY_CHOP { 0.0 } else { x };
    let z = C64::new(chop(z.re), chop(z.im));
    let im = fmt_sig12(z.im.abs());
    let sign = if z.im < 0.0 && im != "0" { '-' } else { '+' };
    format!("{}{}{}i", fmt_sig12(z.re), sign, im)
}

const COMPUTATIONAL_LABELS: [&str; 4] = ["|00>", "|01>", "|10>", "|11>"];
const BELL_LABELS: [&str; 4] = ["|phi+>", "|psi+>", "|psi->", "|phi->"];

fn labels(b: Basis) -> [&'static str; 4] {
    match b {
        Basis::Computational => COMPUTATIONAL_LABELS,
        Basis::Bell => BELL_LABELS,
    }
}

fn bound_cmd(op: &OperatorArgs) -> Result<()> {
    let s = load_structure(op.structure.as_deref(), &op.ineq)?;
    let i = load_ineq(&op.ineq)?;
    let p = Polytope::new(s)?;
    let (cmin, cmax) = p.classical_range(&i)?;
    let o = build_operator(op)?;
    let b = quantum_bound(&o)?;
    let psi = PureState::normalized(&b.argmax_state, b.basis)?;
    let schmidt = states::schmidt(&psi)?;

    let mut t = String::new();
    writeln!(t, "inequality     {i}").unwrap();
    writeln!(t, "classical      [{cmin}, {cmax}]").unwrap();
    writeln!(t, "lambda_min     {}", fmt_sig12(b.lambda_min)).unwrap();
    writeln!(t, "lambda_max     {}", fmt_sig12(b.lambda_max)).unwrap();
    writeln!(t, "norm           {}", fmt_sig12(b.norm)).unwrap();
    writeln!(t, "multiplicity   {}", b.multiplicity).unwrap();
    writeln!(
        t,
        "argmax state ({})",
        if b.basis == Basis::Bell {
            "bell"
        } else {
            "computational"
        }
    )
    .unwrap();
    for (label, z) in labels(b.basis).iter().zip(psi.amplitudes()) {
        writeln!(t, "  {label:<7} {}", fmt_complex(*z)).unwrap();
    }
    writeln!(
        t,
        "schmidt        {} {}",
        fmt_sig12(schmidt.coefficients[0]),
        fmt_sig12(schmidt.coefficients[1])
    )
    .unwrap();
    writeln!(t, "entanglement   {}", fmt_sig12(states::entanglement(&psi)?)).unwrap();
    if b.multiplicity > 1 {
        let e = states::eigenspace_entanglement(&o)?;
        writeln!(
            t,
            "eigenspace entanglement range [{}, {}]",
            fmt_sig12(e.min),
            fmt_sig12(e.max)
        )
        .unwrap();
    }
    emit(None, &t)
}

/// `lo:hi:n` with `lo` and `hi` constant expressions.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(Error::invalid(format!("grid {spec:?} is not lo:hi:n")));
    };
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| Error::invalid(format!("grid size {n:?} is not a count")))?;
    sampling::theta_grid(parse_scalar(lo)?, parse_scalar(hi)?, n)
}

/// CSV bytes for a sweep and, for eigencurves, the method used.
pub fn sweep_output(args: &SweepArgs, exec: Exec) -> Result<(Vec<u8>, Option<EigenMethod>)> {
    let structure = load_structure(args.structure.as_deref(), &args.ineq)?;
    let ineq = load_ineq(&args.ineq)?;
    let schedule: AngleSchedule = args.schedule.parse()?;
    let grid = parse_grid(&args.grid)?;
    let mut buf = Vec::new();
    if args.eigencurves {
        let (method, rows) = sampling::eigencurves(&ineq, &structure, &schedule, &grid, exec)?;
        sampling::write_eigencurves_csv(&rows, &mut buf)?;
        return Ok((buf, Some(method)));
    }
    let cfg = SweepConfig {
        ineq,
        structure,
        schedule,
        grid,
        n_samples: args.samples,
        seed: args.seed,
        exec,
    };
    let rows = sampling::sweep(&cfg)?;
    sampling::write_sweep_csv(&rows, &mut buf)?;
    Ok((buf, None))
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn sweep_cmd(args: &SweepArgs, exec: Exec) -> Result<()> {
    let (bytes, method) = sweep_output(args, exec)?;
    fs::write(&args.out, &bytes)?;
    let m = RunManifest::for_sweep(args, method, &bytes);
    let mpath = manifest_path(&args.out);
    fs::write(&mpath, to_json(&m)?)?;
    eprintln!(
        "wrote {} rows to {} (sha256 {}), manifest {}",
        bytes.iter().filter(|&&b| b == b'\n').count().saturating_sub(1),
        args.out.display(),
        m.output.sha256,
        mpath.display()
    );
    Ok(())
}

fn replay_cmd(path: &Path, exec: Exec) -> Result<()> {
    let m: RunManifest = serde_json::from_str(&read_input(&path.to_string_lossy())?)?;
    if m.command != "sweep" {
        return Err(Error::invalid(format!("cannot replay command {:?}", m.command)));
    }
    let (bytes, _) = sweep_output(&m.arguments, exec)?;
    let got = sha256_hex(&bytes);
    if got != m.output.sha256 {
        return Err(Error::numeric(format!(
            "checksum mismatch: manifest {}, replay {got}",
            m.output.sha256
        )));
    }
    println!("reproduced {} (sha256 {got})", m.output.path);
    Ok(())
}

fn load_state(spec: &str) -> Result<PureState> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return match name {
            "singlet" | "psi-" => Ok(states::singlet()),
            "phi+" => Ok(states::bell_state(0)),
            "psi+" => Ok(states::bell_state(1)),
            "phi-" => Ok(states::bell_state(3)),
            "psi-max" => Ok(states::psi_max_33()),
            _ => Err(Error::invalid(format!("unknown built-in state {name:?}"))),
        };
    }
    if let Some(theta) = spec.strip_prefix("family:") {
        return Ok(states::max_violation_family(crate::qops::Angle::new(parse_scalar(
            theta,
        )?)?));
    }
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        read_input(spec)?
    };
    serde_json::from_str(&text).map_err(|e| Error::invalid(format!("state: {e}")))
}

fn state_cmd(spec: &str, json: bool) -> Result<()> {
    let psi = load_state(spec)?;
    let schmidt = states::schmidt(&psi)?;
    let ent = states::entanglement(&psi)?;
    if json {
        return emit(
            None,
            &to_json(&json!({
                "state": psi.with_canonical_phase(),
                "schmidt": schmidt,
                "entanglement": ent,
            }))?,
        );
    }
    let comp = psi.to_computational().with_canonical_phase();
    let mut t = String::new();
    writeln!(t, "state (computational)").unwrap();
    for (label, z) in COMPUTATIONAL_LABELS.iter().zip(comp.amplitudes()) {
        writeln!(t, "  {label:<7} {}", fmt_complex(*z)).unwrap();
    }
    for k in 0..2 {
        writeln!(
            t,
            "schmidt {}  {}  left ({}, {})  right ({}, {})",
            k + 1,
            fmt_sig12(schmidt.coefficients[k]),
            fmt_complex(schmidt.left_basis[k][0]),
            fmt_complex(schmidt.left_basis[k][1]),
            fmt_complex(schmidt.right_basis[k][0]),
            fmt_complex(schmidt.right_basis[k][1]),
        )
        .unwrap();
    }
    writeln!(t, "entanglement {}", fmt_sig12(ent)).unwrap();
    emit(None, &t)
}
