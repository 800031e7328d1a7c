use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use geozero::error::Error;
use geozero::geometry::analyze;
use geozero::ltisim::{overshoot, step_response, DEFAULT_DT, DEFAULT_HORIZON};
use geozero::zerocancel::{run_pipeline, InputSelection};
use geozero::TolerancePolicy;
use geozero_cli::report::{analysis_report, attach_cancellation, render_text, RunReport};
use geozero_cli::sysfile::SystemFile;
use geozero_cli::{audit, Failure, EXIT_VERIFICATION};

#[derive(Parser)]
#[command(
    name = "geozero",
    version,
    about = "Geometric analysis of linear state-space models and synthesis of \
             zero-cancelling feedforward compensators"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Rank-decision tolerance for all subspace computations
    #[arg(long, global = true, env = "GEOZERO_TOL_RANK")]
    tol_rank: Option<f64>,

    /// Residual tolerance for equality checks
    #[arg(long, global = true)]
    tol_eq: Option<f64>,

    /// Half-width of the strip around the imaginary axis inside which a zero
    /// counts as neither stable nor unstable
    #[arg(long, global = true)]
    margin: Option<f64>,

    /// Report format on standard output
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Structural analysis: subspace dimensions, invariant zeros by phase,
    /// reachability and right invertibility
    Analyze {
        /// System file (JSON)
        path: PathBuf,
    },

    /// Synthesize the minimal feedforward compensator cancelling the
    /// minimum-phase invariant zeros, and write the equivalent cascade
    Cancel {
        /// System file (JSON)
        path: PathBuf,

        /// Input channels kept for direct plant access (1-based, comma
        /// separated); all channels when omitted
        #[arg(long, value_delimiter = ',')]
        select: Option<Vec<usize>>,

        /// Directory receiving compensator.json, cascade.json, report.json
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },

    /// Unit-step response as CSV plus an overshoot summary per output
    Simulate {
        /// System file (JSON); compensator and cascade files are accepted
        path: PathBuf,

        /// Input channel to step (1-based)
        #[arg(long, default_value_t = 1)]
        input: usize,

        /// Simulation horizon in seconds
        #[arg(long, default_value_t = DEFAULT_HORIZON)]
        tf: f64,

        /// Sample period in seconds
        #[arg(long, default_value_t = DEFAULT_DT)]
        dt: f64,

        /// CSV destination; standard output when omitted (summary then goes
        /// to standard error)
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Re-check a plant/compensator/cascade triple: Markov-parameter
    /// equivalence, the zero-set law, and the preservation verdicts
    Verify {
        /// Plant system file
        original: PathBuf,
        /// Compensator system file
        compensator: PathBuf,
        /// Cascade system file
        cascade: PathBuf,
    },
}

fn tolerance_policy(cli: &Cli) -> Result<TolerancePolicy, Failure> {
    let mut tol = TolerancePolicy::default();
    for (flag, slot, value) in [
        ("--tol-rank", &mut tol.rank_tol, cli.tol_rank),
        ("--tol-eq", &mut tol.eq_tol, cli.tol_eq),
        ("--margin", &mut tol.stability_margin, cli.margin),
    ] {
        if let Some(v) = value {
            if !v.is_finite() || v <= 0.0 {
                return Err(Failure::validation(format!(
                    "{flag} must be a positive number, got {v}"
                )));
            }
            *slot = v;
        }
    }
    Ok(tol)
}

fn print_report(report: &RunReport, format: Format) {
    match format {
        Format::Text => print!("{}", render_text(report)),
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(report).expect("report serialization"))
        }
    }
}

fn derived_name(base: &Option<String>, role: &str) -> Option<String> {
    Some(match base {
        Some(name) => format!("{name} {role}"),
        None => role.to_string(),
    })
}

fn cmd_analyze(path: &PathBuf, tol: &TolerancePolicy, format: Format) -> Result<(), Failure> {
    let file = SystemFile::load(path)?;
    let sys = file.to_plant(tol)?;
    let analysis = analyze(&sys, tol).map_err(Failure::from)?;
    let report = analysis_report(file.name.clone(), sys.dims(), &analysis, tol);
    print_report(&report, format);
    Ok(())
}

fn cmd_cancel(
    path: &PathBuf,
    select: &Option<Vec<usize>>,
    out_dir: &PathBuf,
    tol: &TolerancePolicy,
    format: Format,
) -> Result<(), Failure> {
    let file = SystemFile::load(path)?;
    let sys = file.to_plant(tol)?;
    let m = sys.input_dim();
    let sel = match select {
        Some(kept) => InputSelection::new(kept.clone(), m).map_err(Failure::from)?,
        None => InputSelection::all(m),
    };
    let outcome = run_pipeline(&sys, &sel, None, None, tol).map_err(Failure::from)?;

    let mut report = analysis_report(file.name.clone(), sys.dims(), &outcome.analysis, tol);
    attach_cancellation(&mut report, &outcome.report, &sel);

    std::fs::create_dir_all(out_dir).map_err(|err| {
        Failure::validation(format!("cannot create {}: {err}", out_dir.display()))
    })?;
    let comp = &outcome.compensator;
    SystemFile::from_parts(
        derived_name(&file.name, "compensator"),
        &comp.af,
        &comp.bf,
        &comp.cf,
        &comp.df,
    )
    .save(&out_dir.join("compensator.json"))?;
    let casc = &outcome.cascade;
    SystemFile::from_parts(
        derived_name(&file.name, "cascade"),
        &casc.ae,
        &casc.be,
        &casc.ce,
        &casc.de,
    )
    .save(&out_dir.join("cascade.json"))?;
    let report_json = format!(
        "{}\n",
        serde_json::to_string_pretty(&report).expect("report serialization")
    );
    std::fs::write(out_dir.join("report.json"), report_json).map_err(|err| {
        Failure::validation(format!("cannot write report.json: {err}"))
    })?;

    print_report(&report, format);
    eprintln!(
        "wrote compensator.json, cascade.json, report.json to {}",
        out_dir.display()
    );
    Ok(())
}

fn overshoot_summary(traj: &geozero::ltisim::Trajectory) -> String {
    let mut s = String::new();
    for j in 1..=traj.output_count() {
        let line = match overshoot(traj, j) {
            Ok(v) => format!("overshoot y{j}: {v:.4}"),
            Err(Error::NonSettling { variation }) => {
                format!("overshoot y{j}: not settled (tail variation {variation:.2e})")
            }
            Err(Error::ZeroFinalValue) => {
                format!("overshoot y{j}: undefined (zero final value)")
            }
            Err(other) => format!("overshoot y{j}: unavailable ({other})"),
        };
        s.push_str(&line);
        s.push('\n');
    }
    s
}

fn cmd_simulate(
    path: &PathBuf,
    input: usize,
    tf: f64,
    dt: f64,
    out: &Option<PathBuf>,
) -> Result<(), Failure> {
    let file = SystemFile::load(path)?;
    // No rank gate here: simulating a synthesized compensator or cascade is
    // the point of the command.
    let sys = file.to_quadruple()?;
    let traj = step_response(&sys, input, tf, dt).map_err(Failure::from)?;
    let summary = overshoot_summary(&traj);
    match out {
        Some(csv_path) => {
            std::fs::write(csv_path, traj.to_csv()).map_err(|err| {
                Failure::validation(format!("cannot write {}: {err}", csv_path.display()))
            })?;
            print!("{summary}");
        }
        None => {
            print!("{}", traj.to_csv());
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn cmd_verify(
    original: &PathBuf,
    compensator: &PathBuf,
    cascade: &PathBuf,
    tol: &TolerancePolicy,
) -> Result<(), Failure> {
    let plant = SystemFile::load(original)?.to_plant(tol)?;
    let comp = SystemFile::load(compensator)?.to_quadruple()?;
    let casc = SystemFile::load(cascade)?.to_quadruple()?;
    let outcome = audit::verify_triple(&plant, &comp, &casc, tol)?;
    for check in &outcome.checks {
        if check.pass {
            println!("{}: pass", check.label);
        } else {
            println!("{}: fail — {}", check.label, check.detail);
        }
    }
    match outcome.first_failure() {
        None => Ok(()),
        Some(failing) => Err(Failure {
            code: EXIT_VERIFICATION,
            message: format!("verification failed: {}", failing.label),
        }),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let tol = tolerance_policy(cli)?;
    match &cli.command {
        Cmd::Analyze { path } => cmd_analyze(path, &tol, cli.format),
        Cmd::Cancel { path, select, out } => cmd_cancel(path, select, out, &tol, cli.format),
        Cmd::Simulate {
            path,
            input,
            tf,
            dt,
            out,
        } => cmd_simulate(path, *input, *tf, *dt, out),
        Cmd::Verify {
            original,
            compensator,
            cascade,
        } => cmd_verify(original, compensator, cascade, &tol),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version are successes; anything else is a usage
            // problem and lands on the validation exit code.
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 1u8,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code as u8)
        }
    }
}
