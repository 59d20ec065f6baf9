use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use squaremodel::diagrams::search::count_fulfillments;
use squaremodel::diagrams::{
    find_fulfillments, fulfillment_bound, ownership, parity_defects, reduction_pairs, stats, validate,
    AbstractDiagram, SearchOptions,
};
use squaremodel::harness::{analyze, reproduction_bundle, sweep, write_csv, HarnessError, SweepConfig};
use squaremodel::randgraph::{estimate_threshold, GraphProperty};
use squaremodel::{sample_presentation, Density, Model, Presentation};

#[derive(Parser)]
#[command(name = "squaremodel", version, about = "Random groups in the square model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a presentation.
    Sample {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: Density,
        #[arg(long, default_value = "positive")]
        model: Model,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every detector and the abelianization cross-check.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Where a reproduction bundle goes on a cross-check failure.
        #[arg(long, default_value = ".")]
        bundle_dir: PathBuf,
    },
    /// Monte Carlo sweep over an (n, d) grid, written as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// `-` for stdout.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = ".")]
        bundle_dir: PathBuf,
    },
    /// Threshold rate of G(n, n^{delta-1}).
    Graphsim {
        #[arg(long)]
        mode: GraphProperty,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check, fulfill or bound an abstract diagram.
    Diagram(DiagramArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "action")]
struct DiagramAction {
    #[arg(long, value_name = "FILE")]
    check: Option<PathBuf>,
    #[arg(long, value_name = "FILE", requires = "presentation")]
    fulfill: Option<PathBuf>,
    #[arg(long, value_name = "FILE", requires_all = ["n", "d"])]
    bound: Option<PathBuf>,
}

#[derive(Args)]
struct DiagramArgs {
    #[command(flatten)]
    action: DiagramAction,
    #[arg(long, value_name = "FILE")]
    presentation: Option<PathBuf>,
    /// Stop after this many fulfillments.
    #[arg(long)]
    max: Option<usize>,
    /// Count fulfillments without listing them.
    #[arg(long)]
    count: bool,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long, default_value = "positive")]
    model: Model,
}

/// A detector disagreed with the abelianization oracle.
#[derive(Debug)]
struct CrossCheckFailed(String);

impl std::fmt::Display for CrossCheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CrossCheckFailed {}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_presentation(path: &Path) -> Result<Presentation> {
    Presentation::from_text(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn read_diagram(path: &Path) -> Result<AbstractDiagram> {
    AbstractDiagram::from_text(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn save_bundle(dir: &Path, seed: u64, bundle: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("repro-{seed}.pres"));
    fs::write(&path, bundle)?;
    Ok(path)
}

fn run(cli: Cli) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Sample { n, d, model, seed, out: path } => {
            let text = sample_presentation(n, &d, model, seed)?.to_text();
            match path {
                Some(p) => fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => out.write_all(text.as_bytes())?,
            }
        }
        Command::Analyze { input, format, bundle_dir } => {
            let p = read_presentation(&input)?;
            let report = analyze(&p);
            match format {
                Format::Text => out.write_all(report.to_text().as_bytes())?,
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
            }
            if !report.is_consistent() {
                let path = save_bundle(&bundle_dir, p.seed(), &reproduction_bundle(&p, &report.violations))?;
                return Err(CrossCheckFailed(format!(
                    "{}; reproduction bundle written to {}",
                    report.violations[0],
                    path.display()
                ))
                .into());
            }
        }
        Command::Sweep { config, out: path, bundle_dir } => {
            let cfg = SweepConfig::from_toml(&read(&config)?)?;
            let rows = match sweep(&cfg) {
                Ok(rows) => rows,
                Err(HarnessError::CrossCheck { n, d, trial, violation, bundle }) => {
                    let seed = squaremodel::harness::cell_trial_seed(cfg.seed, n, &d.parse()?, trial);
                    let file = save_bundle(&bundle_dir, seed, &bundle)?;
                    return Err(CrossCheckFailed(format!(
                        "n={n} d={d} trial={trial}: {violation}; reproduction bundle written to {}",
                        file.display()
                    ))
                    .into());
                }
                Err(e) => return Err(e.into()),
            };
            if path.as_os_str() == "-" {
                write_csv(&rows, &mut out)?;
            } else {
                let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                write_csv(&rows, io::BufWriter::new(file))?;
            }
        }
        Command::Graphsim { mode, n, delta, trials, seed } => {
            if trials == 0 {
                bail!("--trials must be at least 1");
            }
            let rate = estimate_threshold(n, delta, trials, mode, seed)?;
            writeln!(out, "{n},{delta},{trials},{rate}")?;
        }
        Command::Diagram(args) => diagram(args, &mut out)?,
    }
    Ok(())
}

fn diagram(args: DiagramArgs, out: &mut impl Write) -> Result<()> {
    if let Some(path) = &args.action.check {
        let d = read_diagram(path)?;
        let defects = validate(&d);
        let st = stats(&d);
        writeln!(
            out,
            "faces={} edges={} boundary={} fixed={} vertices={} internal_vertices={}",
            st.faces, st.edges, st.boundary, st.fixed, st.vertices, st.internal_vertices
        )?;
        let pairs = reduction_pairs(&d);
        if pairs.is_empty() {
            writeln!(out, "reduced: yes")?;
        } else {
            writeln!(out, "reduced: no pairs={pairs:?}")?;
        }
        writeln!(out, "parity_defects: {}", parity_defects(&d).len())?;
        if let Ok(own) = ownership(&d) {
            writeln!(out, "delta_sum: {}", own.delta_sum())?;
        }
        if defects.is_empty() {
            writeln!(out, "valid: yes")?;
        } else {
            for defect in &defects {
                writeln!(out, "defect: {defect}")?;
            }
            bail!("{} is not a valid disc diagram", path.display());
        }
    } else if let Some(path) = &args.action.fulfill {
        let d = read_diagram(path)?;
        let p = read_presentation(args.presentation.as_deref().expect("required by clap"))?;
        let opts = SearchOptions { max_results: args.max, ..Default::default() };
        if args.count {
            writeln!(out, "fulfillments: {}", count_fulfillments(&d, p.relators(), opts))?;
            return Ok(());
        }
        let found = find_fulfillments(&d, p.relators(), opts);
        writeln!(out, "fulfillments: {}", found.len())?;
        for f in &found {
            let classes: Vec<String> = f.classes.iter().map(|(c, r)| format!("{c}={r}")).collect();
            writeln!(out, "{}", classes.join(" "))?;
        }
    } else if let Some(path) = &args.action.bound {
        let d = read_diagram(path)?;
        let (n, dens) = (args.n.expect("required by clap"), args.d.expect("required by clap"));
        if !(dens > 0.0 && dens < 1.0) {
            bail!("--d must lie in (0, 1)");
        }
        let st = stats(&d);
        if st.faces == 0 {
            bail!("diagram has no faces");
        }
        let b = fulfillment_bound(&st, n, dens, args.model);
        writeln!(
            out,
            "exponent={} base={} bound={} vacuous={}",
            b.exponent, b.base, b.value, b.vacuous
        )?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<CrossCheckFailed>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
