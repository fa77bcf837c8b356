mod grid;
mod table;

use std::fmt;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dicke_core::eigen::{locate_critical, sweep_eigenfrequencies, BranchPoint};
use dicke_core::error::DickeError;
use dicke_core::exec::{Execution, PARALLEL_ENV};
use dicke_core::model::{
    alt_coupling_renorm, bath_condensate_density, derive_phase, AltCouplingParams, BathSpec, ModelParams, Port,
    SweepAxis,
};
use dicke_core::scattering::io::{write_csv, SpectrumDocument};
use dicke_core::scattering::{sweep_spectrum, SweepOptions};
use dicke_core::squeezing::{quadrature_variance, two_mode_variance, vacuum_variance, QuadratureSpec};

use grid::{linspace, RangeArg, SweepArg};
use table::{Cell, Table};

#[derive(Parser, Debug)]
#[command(name = "dicke", version, about = "Spectra, reflection maps and condensates of the open Dicke model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Complex eigenfrequencies of the lower and upper branch.
    Eigen {
        #[command(flatten)]
        model: ModelArgs,
        /// Sweep as axis:start:stop:points, axis one of g, ratio.
        #[arg(long)]
        sweep: Option<SweepArg>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Reflection coefficient S11 over a sweep and probe grid.
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "g:0:0.7:400")]
        sweep: SweepArg,
        /// Probe frequencies as start:stop:points, start > 0.
        #[arg(long, default_value = "0.01:1.8:2000")]
        probe: RangeArg,
        /// On a ratio sweep, scale the matter damping with omega_b.
        #[arg(long)]
        linear_gamma_b: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Phase data, condensates and bath condensate densities.
    Condensates {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        sweep: Option<SweepArg>,
        /// Frequency at which the bath densities are reported.
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Critical coupling located from the damping-free constant term.
    Critical {
        #[command(flatten)]
        model: ModelArgs,
        /// Bisection bracket lo:hi; defaults to 0:(omega_a + omega_b).
        #[arg(long)]
        bracket: Option<String>,
        /// Also write the value to this file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Vacuum quadrature variance of the output field over the angle phi.
    Squeeze {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long, default_value_t = 64)]
        phi_points: usize,
        /// Mixing angle between the two output ports.
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        /// Relative phase of the port-b output.
        #[arg(long, default_value_t = 0.0)]
        psi: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Renormalization for a position-type bath coupling.
    Altcoupling {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0.0)]
        f_a0: f64,
        #[arg(long, default_value_t = 0.0)]
        f_b0: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    #[arg(long, default_value_t = 1.0)]
    omega_a: f64,
    /// Defaults to 1.
    #[arg(long)]
    omega_b: Option<f64>,
    /// Defaults to 0.
    #[arg(long)]
    g: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    gamma_a: f64,
    #[arg(long, default_value_t = 0.1)]
    gamma_b: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    s_a: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    s_b: f64,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Output file; defaults to <command>.<format> in the working directory.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Add a phase column to CSV output.
    #[arg(long)]
    include_phase_labels: bool,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, env = PARALLEL_ENV)]
    parallel: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

impl OutputArgs {
    fn execution(&self) -> Execution {
        self.parallel.map_or(Execution::Parallel, Execution::with_workers)
    }

    fn path(&self, command: &str) -> PathBuf {
        self.output.clone().unwrap_or_else(|| PathBuf::from(format!("{command}.{}", self.format)))
    }
}

enum Failure {
    Usage(String),
    Numerical(String),
    Io { path: PathBuf, err: io::Error },
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io { .. } => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "invalid input: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Io { path, err } => write!(f, "{}: {err}", path.display()),
        }
    }
}

impl From<DickeError> for Failure {
    fn from(e: DickeError) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type Outcome = Result<String, Failure>;

impl ModelArgs {
    /// Rejects a fixed value for the quantity the sweep varies.
    fn check_sweep(&self, sweep: Option<&SweepArg>) -> Result<(), Failure> {
        match sweep.map(|s| s.axis) {
            Some(SweepAxis::Coupling) if self.g.is_some() => {
                Err(Failure::Usage("--g conflicts with a g sweep".into()))
            }
            Some(SweepAxis::Ratio) if self.omega_b.is_some() => {
                Err(Failure::Usage("--omega-b conflicts with a ratio sweep".into()))
            }
            _ => Ok(()),
        }
    }

    fn params(&self) -> Result<ModelParams, Failure> {
        let bath_a = BathSpec::new(self.gamma_a, self.s_a)?;
        let bath_b = BathSpec::new(self.gamma_b, self.s_b)?;
        Ok(ModelParams::new(self.omega_a, self.omega_b.unwrap_or(1.0), self.g.unwrap_or(0.0), bath_a, bath_b)?)
    }

    fn meta(&self) -> String {
        format!(
            "omega_a={} omega_b={} g={} gamma_a={} s_a={} gamma_b={} s_b={}",
            self.omega_a,
            self.omega_b.unwrap_or(1.0),
            self.g.unwrap_or(0.0),
            self.gamma_a,
            self.s_a,
            self.gamma_b,
            self.s_b
        )
    }
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), Failure> {
    let io_err = |err| Failure::Io {
        path: path.to_path_buf(),
        err,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io_err)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644)).map_err(io_err)?;
    }
    {
        let mut w = BufWriter::new(tmp.as_file());
        body(&mut w).map_err(io_err)?;
        w.flush().map_err(io_err)?;
    }
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn emit_table(table: &Table, out: &OutputArgs, command: &str) -> Result<PathBuf, Failure> {
    let path = out.path(command);
    match out.format {
        Format::Csv => write_atomic(&path, |w| table.write_csv(w))?,
        Format::Json => {
            let text = table.to_json().map_err(|e| Failure::Usage(e.to_string()))?;
            write_atomic(&path, |w| writeln!(w, "{text}"))?
        }
    }
    Ok(path)
}

fn sweep_values(model: &ModelArgs, sweep: Option<&SweepArg>) -> (SweepAxis, Vec<f64>) {
    match sweep {
        Some(s) => (s.axis, s.range.values()),
        None => (SweepAxis::Coupling, vec![model.g.unwrap_or(0.0)]),
    }
}

fn run_eigen(model: &ModelArgs, sweep: Option<&SweepArg>, out: &OutputArgs) -> Outcome {
    model.check_sweep(sweep)?;
    let template = model.params()?;
    let (axis, values) = sweep_values(model, sweep);
    let points: Vec<BranchPoint> = sweep_eigenfrequencies(&template, axis, &values, out.execution())?;

    let mut columns = vec![axis.label(), "re_lower", "im_lower", "re_upper", "im_upper", "gap_flag"];
    if out.include_phase_labels {
        columns.push("phase");
    }
    let mut table = Table::new(columns, vec![format!("command=eigen axis={axis}"), model.meta()]);
    for p in &points {
        let (lo, up) = (p.lower(), p.upper());
        let mut row = vec![p.value.into(), lo.re.into(), lo.im.into(), up.re.into(), up.im.into(), p.is_gap().into()];
        if out.include_phase_labels {
            row.push(Cell::Text(p.phase.to_string()));
        }
        table.push(row);
    }
    let path = emit_table(&table, out, "eigen")?;
    let gaps = points.iter().filter(|p| p.is_gap()).count();
    Ok(format!("{} rows, {} columns, {gaps} gap points -> {}", table.rows.len(), table.columns.len(), path.display()))
}

fn run_spectrum(
    model: &ModelArgs,
    sweep: &SweepArg,
    probe: &RangeArg,
    linear_gamma_b: bool,
    out: &OutputArgs,
) -> Outcome {
    model.check_sweep(Some(sweep))?;
    if linear_gamma_b && sweep.axis != SweepAxis::Ratio {
        return Err(Failure::Usage("--linear-gamma-b applies only to a ratio sweep".into()));
    }
    if probe.start <= 0.0 {
        return Err(Failure::Usage("probe frequencies must be > 0".into()));
    }
    let template = model.params()?;
    let options = SweepOptions {
        linear_gamma_b,
        execution: out.execution(),
    };
    let grid = sweep_spectrum(&template, sweep.axis, &sweep.range.values(), &probe.values(), options)?;
    let path = out.path("spectrum");
    match out.format {
        Format::Csv => {
            let meta = vec![
                "command=spectrum".to_string(),
                model.meta(),
                format!("linear_gamma_b={linear_gamma_b}"),
            ];
            write_atomic(&path, |w| write_csv(w, &grid, &meta, out.include_phase_labels))?
        }
        Format::Json => {
            let text = SpectrumDocument::from(&grid).to_json().map_err(|e| Failure::Usage(e.to_string()))?;
            write_atomic(&path, |w| writeln!(w, "{text}"))?
        }
    }
    Ok(format!("{} rows, {} columns -> {}", grid.rows(), grid.cols(), path.display()))
}

fn run_condensates(model: &ModelArgs, sweep: Option<&SweepArg>, omega: f64, out: &OutputArgs) -> Outcome {
    model.check_sweep(sweep)?;
    let template = model.params()?;
    let (axis, values) = sweep_values(model, sweep);
    let columns = vec![
        axis.label(),
        "lambda",
        "phase",
        "alpha_per_n",
        "beta_per_n",
        "omega_b_tilde",
        "g_tilde",
        "d_term",
        "gamma_b_tilde_amp",
        "sigma_a",
        "sigma_b",
    ];
    let mut table = Table::new(columns, vec![format!("command=condensates axis={axis} omega={omega}"), model.meta()]);
    for &v in &values {
        let p = axis.apply(&template, v, false)?;
        let d = derive_phase(&p);
        table.push(vec![
            v.into(),
            d.lambda.into(),
            Cell::Text(d.phase.to_string()),
            d.alpha_per_n.into(),
            d.beta_per_n.into(),
            d.omega_b_tilde.into(),
            d.g_tilde.into(),
            d.d_term.into(),
            d.gamma_b_tilde_amp.into(),
            bath_condensate_density(&p, Port::A, omega)?.into(),
            bath_condensate_density(&p, Port::B, omega)?.into(),
        ]);
    }
    let path = emit_table(&table, out, "condensates")?;
    Ok(format!("{} rows, {} columns -> {}", table.rows.len(), table.columns.len(), path.display()))
}

fn run_critical(model: &ModelArgs, bracket: Option<&str>, output: Option<&Path>) -> Outcome {
    let params = model.params()?;
    let (lo, hi) = match bracket {
        None => (0.0, params.omega_a() + params.omega_b()),
        Some(text) => {
            let parts: Vec<&str> = text.split(':').collect();
            let parsed: Vec<f64> = parts.iter().filter_map(|s| s.trim().parse().ok()).collect();
            match parsed[..] {
                [lo, hi] if parts.len() == 2 && lo < hi => (lo, hi),
                _ => return Err(Failure::Usage(format!("bad bracket {text:?}, expected lo:hi"))),
            }
        }
    };
    let g_star = locate_critical(&params, lo, hi)?;
    let text = format!("{g_star:.12}");
    if let Some(path) = output {
        write_atomic(path, |w| writeln!(w, "{text}"))?;
    }
    Ok(text)
}

fn run_squeeze(model: &ModelArgs, omega: f64, phi_points: usize, theta: f64, psi: f64, out: &OutputArgs) -> Outcome {
    let params = model.params()?;
    if phi_points < 2 {
        return Err(Failure::Usage("--phi-points must be at least 2".into()));
    }
    let step = std::f64::consts::TAU / phi_points as f64;
    let phis: Vec<f64> = linspace(0.0, step * (phi_points - 1) as f64, phi_points);
    let mut table = Table::new(
        vec!["phi", "single_mode", "two_mode", "vacuum"],
        vec![format!("command=squeeze omega={omega} theta={theta} psi={psi}"), model.meta()],
    );
    let mut spread = (f64::INFINITY, f64::NEG_INFINITY);
    for phi in phis {
        let single = quadrature_variance(&params, &QuadratureSpec::single(phi, omega)?)?;
        let two = two_mode_variance(&params, &QuadratureSpec::new(phi, theta, psi, omega)?)?;
        spread = (spread.0.min(two), spread.1.max(two));
        table.push(vec![phi.into(), single.into(), two.into(), vacuum_variance(omega).into()]);
    }
    let path = emit_table(&table, out, "squeeze")?;
    Ok(format!(
        "{} rows, {} columns, variance spread {:.3e} -> {}",
        table.rows.len(),
        table.columns.len(),
        spread.1 - spread.0,
        path.display()
    ))
}

fn run_altcoupling(model: &ModelArgs, f_a0: f64, f_b0: f64, out: &OutputArgs) -> Outcome {
    let params = model.params()?;
    let r = alt_coupling_renorm(&params, &AltCouplingParams::new(f_a0, f_b0)?);
    let mut table = Table::new(
        vec!["f_a0", "f_b0", "omega_a_prime", "omega_b_prime", "g_prime", "g_c_prime", "abnormal_a", "abnormal_b"],
        vec!["command=altcoupling".into(), model.meta()],
    );
    table.push(vec![
        f_a0.into(),
        f_b0.into(),
        r.omega_a_prime.into(),
        r.omega_b_prime.into(),
        r.g_prime.into(),
        r.g_c_prime.into(),
        r.abnormal_a.into(),
        r.abnormal_b.into(),
    ]);
    let path = emit_table(&table, out, "altcoupling")?;
    let gc = r.g_c_prime.map_or("undefined (abnormal phase)".to_string(), |v| format!("{v:.12}"));
    Ok(format!("g_c' = {gc} -> {}", path.display()))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Eigen { model, sweep, out } => run_eigen(model, sweep.as_ref(), out),
        Command::Spectrum {
            model,
            sweep,
            probe,
            linear_gamma_b,
            out,
        } => run_spectrum(model, sweep, probe, *linear_gamma_b, out),
        Command::Condensates {
            model,
            sweep,
            omega,
            out,
        } => run_condensates(model, sweep.as_ref(), *omega, out),
        Command::Critical {
            model,
            bracket,
            output,
        } => run_critical(model, bracket.as_deref(), output.as_deref()),
        Command::Squeeze {
            model,
            omega,
            phi_points,
            theta,
            psi,
            out,
        } => run_squeeze(model, *omega, *phi_points, *theta, *psi, out),
        Command::Altcoupling { model, f_a0, f_b0, out } => run_altcoupling(model, *f_a0, *f_b0, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let started = Instant::now();
    match run(&cli) {
        Ok(summary) => {
            if matches!(cli.command, Command::Critical { .. }) {
                println!("{summary}");
            } else {
                println!("{summary} in {:.3} s", started.elapsed().as_secs_f64());
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("dicke: {f}");
            ExitCode::from(f.code())
        }
    }
}
