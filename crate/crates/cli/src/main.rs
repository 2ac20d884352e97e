use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cocircuit_core::bounds::{Analysis, ConjectureReport};
use cocircuit_core::chirotope::VectorConfiguration;
use cocircuit_core::enumerate::{read_database, write_database, Catalog};
use cocircuit_core::extension::{perturb_to_uniform, Side, StepKind};
use cocircuit_core::matroid::{check_cocircuit_axioms, MatroidJson};
use cocircuit_core::{Chirotope, CocircuitGraph, OrientedMatroid, SignVector};
use cocircuit_cli::batch::{parse_checks, run_batch, BatchOptions, Check, LineRange};
use cocircuit_cli::report::{self, Format};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "cocircuit", version, about = "Cocircuit graphs of oriented matroids: diameters and bound checks")]
struct Cli {
    /// Output format: text, json or csv.
    #[arg(long, global = true, default_value = "text")]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// Where a single instance comes from.
#[derive(Args, Clone)]
struct Source {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    /// Chirotope string in lexicographic order of r-subsets.
    #[arg(long)]
    chirotope: Option<String>,
    /// Database file with one chirotope per line (needs --n and --r).
    #[arg(long)]
    db: Option<PathBuf>,
    /// Line of --db to read (1-based); defaults to the first instance.
    #[arg(long)]
    line: Option<usize>,
    /// JSON file {"n", "r", "cocircuits"}.
    #[arg(long)]
    matroid: Option<PathBuf>,
    /// CSV file with one integer column vector per line.
    #[arg(long)]
    vectors: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Hirsch,
    TopePath,
    Crabbed,
    Bounds,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Plus,
    Minus,
}

#[derive(Subcommand)]
enum Command {
    /// Check the cocircuit axioms (every line of --db unless --line is given).
    Validate {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        lenient: bool,
    },
    /// List the signed cocircuits.
    Cocircuits {
        #[command(flatten)]
        src: Source,
    },
    /// List the signed circuits of a uniform chirotope.
    Circuits {
        #[command(flatten)]
        src: Source,
    },
    /// Emit the cocircuit graph.
    Graph {
        #[command(flatten)]
        src: Source,
        #[arg(long, value_enum, default_value = "dot")]
        emit: Emit,
    },
    /// Diameter with a witness pair and the eccentricity histogram.
    Diameter {
        #[command(flatten)]
        src: Source,
    },
    /// Graph distance between two cocircuits.
    Distance {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        x: SignVector,
        #[arg(long)]
        y: SignVector,
    },
    /// Check conjectured bounds on one instance.
    Check {
        #[arg(value_enum)]
        which: Which,
        #[command(flatten)]
        src: Source,
    },
    /// Perturb a degenerate matroid into a uniform one, step by step.
    Perturb {
        #[command(flatten)]
        src: Source,
        #[arg(long, value_enum, default_value = "plus")]
        side: SideArg,
    },
    /// Chirotope of a vector configuration.
    Realize {
        #[command(flatten)]
        src: Source,
    },
    /// Run checks over a whole database.
    Batch {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        /// Comma-separated: axioms, hirsch, tope_path, crabbed, bounds, invariants, all.
        #[arg(long, default_value = "all")]
        checks: String,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        lenient: bool,
        /// Inclusive 1-based line range, e.g. 100-199.
        #[arg(long)]
        lines: Option<LineRange>,
        /// Resume from / periodically save progress to this file.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Include one row per instance in JSON output (always on for CSV).
        #[arg(long)]
        rows: bool,
        /// Record wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Write one representative per isomorphism class of uniform oriented matroids.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
    },
}

struct Loaded {
    chi: Option<Chirotope>,
    m: OrientedMatroid,
}

impl Source {
    fn sources(&self) -> usize {
        [self.chirotope.is_some(), self.db.is_some(), self.matroid.is_some(), self.vectors.is_some()].iter().filter(|&&b| b).count()
    }

    fn nr(&self) -> Result<(usize, usize)> {
        match (self.n, self.r) {
            (Some(n), Some(r)) => Ok((n, r)),
            _ => bail!("--n and --r are required with --chirotope and --db"),
        }
    }

    fn chirotope(&self) -> Result<Option<Chirotope>> {
        if let Some(text) = &self.chirotope {
            let (n, r) = self.nr()?;
            return Ok(Some(Chirotope::parse(text, n, r)?));
        }
        if let Some(path) = &self.db {
            let (n, r) = self.nr()?;
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            for (line, parsed) in read_database(BufReader::new(file), n, r) {
                if self.line.is_none_or(|l| l == line) {
                    return Ok(Some(parsed.with_context(|| format!("line {line}"))?));
                }
            }
            bail!("no instance at the requested line of {}", path.display());
        }
        if let Some(path) = &self.vectors {
            return Ok(Some(Chirotope::from_vectors(&self.config(path)?)?));
        }
        Ok(None)
    }

    fn config(&self, path: &Path) -> Result<VectorConfiguration> {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        Ok(VectorConfiguration::from_csv(file)?)
    }

    fn load(&self) -> Result<Loaded> {
        if self.sources() != 1 {
            bail!("give exactly one of --chirotope, --db, --matroid, --vectors");
        }
        if let Some(path) = &self.matroid {
            let mut text = String::new();
            File::open(path).with_context(|| format!("opening {}", path.display()))?.read_to_string(&mut text)?;
            let json: MatroidJson = serde_json::from_str(&text).context("parsing matroid JSON")?;
            return Ok(Loaded { chi: None, m: OrientedMatroid::from_json(json)? });
        }
        if let Some(path) = &self.vectors {
            let config = self.config(path)?;
            let chi = Chirotope::from_vectors(&config)?;
            let m = OrientedMatroid::build(config.cocircuits(), config.len(), Some(config.rank()))?;
            return Ok(Loaded { chi: Some(chi), m });
        }
        let chi = self.chirotope()?.expect("one source given");
        let m = if chi.is_uniform() {
            OrientedMatroid::from_chirotope(&chi)?
        } else {
            OrientedMatroid::build(chi.cocircuits_general(), chi.n(), Some(chi.rank()))?
        };
        Ok(Loaded { chi: Some(chi), m })
    }
}

struct Output {
    format: Format,
    sink: Box<dyn Write>,
}

impl Output {
    fn line(&mut self, s: impl AsRef<str>) -> Result<()> {
        writeln!(self.sink, "{}", s.as_ref())?;
        Ok(())
    }

    fn json<T: Serialize>(&mut self, value: &T) -> Result<()> {
        let s = serde_json::to_string_pretty(value)?;
        self.line(s)
    }

    fn vectors(&mut self, n: usize, r: usize, vs: &[SignVector]) -> Result<()> {
        match self.format {
            Format::Json => self.json(&MatroidJson { n, r, cocircuits: vs.to_vec() }),
            _ => vs.iter().try_for_each(|v| self.line(v.to_string())),
        }
    }
}

fn print_reports(out: &mut Output, reports: &[ConjectureReport]) -> Result<()> {
    match out.format {
        Format::Json => out.json(&reports),
        Format::Csv => {
            out.line("conjecture,holds,diameter,bound,pairs_checked,pairs_vacuous,witnesses")?;
            for r in reports {
                out.line(format!(
                    "{},{},{},{},{},{},{}",
                    r.conjecture.id(),
                    r.holds,
                    r.diameter,
                    r.bound,
                    r.pairs_checked,
                    r.pairs_vacuous,
                    r.witnesses.len()
                ))?;
            }
            Ok(())
        }
        Format::Text => {
            for r in reports {
                let verdict = if r.holds { "holds" } else { "VIOLATED" };
                out.line(format!(
                    "{}: {verdict} (diameter {}, {} pairs checked, {} vacuous)",
                    r.conjecture.id(),
                    r.diameter,
                    r.pairs_checked,
                    r.pairs_vacuous
                ))?;
                for w in r.witnesses.iter().take(16) {
                    let bound = w.bound.map_or("none".to_string(), |b| b.to_string());
                    out.line(format!("  {} {} d={} bound={bound}", w.x, w.y, w.d))?;
                }
            }
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let sink: Box<dyn Write> = match &cli.out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut out = Output { format: cli.format, sink };
    let ok = match cli.command {
        Command::Validate { src, lenient } => validate(&mut out, &src, lenient)?,
        Command::Cocircuits { src } => {
            let l = src.load()?;
            out.vectors(l.m.n(), l.m.rank(), l.m.cocircuits())?;
            true
        }
        Command::Circuits { src } => {
            let l = src.load()?;
            let chi = l.chi.context("circuits need a chirotope source")?;
            out.vectors(chi.n(), chi.rank(), &chi.circuits()?)?;
            true
        }
        Command::Graph { src, emit } => {
            let l = src.load()?;
            let g = CocircuitGraph::new(&l.m);
            match emit {
                Emit::Dot => out.line(g.to_dot().trim_end())?,
                Emit::Json => out.json(&g.to_edge_list())?,
            }
            true
        }
        Command::Diameter { src } => {
            let l = src.load()?;
            let rep = CocircuitGraph::new(&l.m).diameter();
            match out.format {
                Format::Json => out.json(&rep)?,
                _ => {
                    out.line(format!("diameter {}", rep.diameter))?;
                    if let Some((x, y)) = rep.witness {
                        out.line(format!("witness {x} {y}"))?;
                    }
                    out.line(format!("max non-antipodal distance {}", rep.max_non_antipodal))?;
                    for (e, k) in &rep.eccentricity_histogram {
                        out.line(format!("eccentricity {e}: {k} vertices"))?;
                    }
                }
            }
            true
        }
        Command::Distance { src, x, y } => {
            let l = src.load()?;
            let d = CocircuitGraph::new(&l.m).distance(&x, &y)?;
            match out.format {
                Format::Json => out.json(&serde_json::json!({ "x": x, "y": y, "distance": d }))?,
                _ => out.line(d.to_string())?,
            }
            true
        }
        Command::Check { which, src } => {
            let l = src.load()?;
            let a = Analysis::new(&l.m)?;
            let mut reports = Vec::new();
            if matches!(which, Which::Hirsch | Which::All) {
                let (h, s) = a.check_hirsch("instance");
                reports.extend([h, s]);
            }
            if matches!(which, Which::TopePath | Which::All) {
                reports.push(a.check_tope_path("instance")?);
            }
            if matches!(which, Which::Crabbed | Which::All) {
                reports.push(a.check_crabbed("instance"));
            }
            if matches!(which, Which::Bounds | Which::All) {
                reports.push(a.check_pair_bounds("instance"));
            }
            print_reports(&mut out, &reports)?;
            reports.iter().all(|r| r.holds)
        }
        Command::Perturb { src, side } => {
            let l = src.load()?;
            let (simple, kept) = l.m.simplify()?;
            let side = match side {
                SideArg::Plus => Side::Plus,
                SideArg::Minus => Side::Minus,
            };
            let p = perturb_to_uniform(&simple, side)?;
            match out.format {
                Format::Json => out.json(&serde_json::json!({
                    "kept_elements": kept,
                    "steps": p.steps,
                    "result": p.result.to_json(),
                }))?,
                _ => {
                    out.line(format!("simplified to {} elements (kept {kept:?})", simple.n()))?;
                    for s in &p.steps {
                        out.line(format!(
                            "{} perturbation of {} at element {}: diameter {} -> {}, non-bases {} -> {}",
                            match s.kind {
                                StepKind::Local => "local",
                                StepKind::Lexicographic => "lexicographic",
                            },
                            s.cocircuit,
                            s.element,
                            s.diameter_before,
                            s.diameter_after,
                            s.non_bases_before,
                            s.non_bases_after
                        ))?;
                    }
                    let d = CocircuitGraph::new(&p.result).diameter().diameter;
                    out.line(format!("uniform result: n = {}, r = {}, diameter {d}", p.result.n(), p.result.rank()))?;
                }
            }
            true
        }
        Command::Realize { src } => {
            let chi = src.load()?.chi.context("realize needs a vector or chirotope source")?;
            match out.format {
                Format::Json => out.json(&serde_json::json!({
                    "n": chi.n(),
                    "r": chi.rank(),
                    "uniform": chi.is_uniform(),
                    "chirotope": chi.to_string(),
                }))?,
                _ => {
                    out.line(format!("n = {}, r = {}, uniform = {}", chi.n(), chi.rank(), chi.is_uniform()))?;
                    out.line(chi.to_string())?;
                }
            }
            true
        }
        Command::Batch { db, n, r, checks, jobs, lenient, lines, checkpoint, rows, timing } => {
            let checks: BTreeSet<Check> = parse_checks(&checks).map_err(anyhow::Error::msg)?;
            let opts = BatchOptions {
                checks,
                jobs,
                lenient,
                lines,
                checkpoint,
                keep_rows: rows || out.format == Format::Csv,
                timing,
                ..Default::default()
            };
            let file = File::open(&db).with_context(|| format!("opening {}", db.display()))?;
            let rep = run_batch(read_database(BufReader::new(file), n, r), n, r, &opts)?;
            out.line(report::render(&rep, out.format).trim_end())?;
            rep.all_passed()
        }
        Command::Enumerate { n, r } => {
            let classes = Catalog::default().classes(n, r)?;
            write_database(&mut out.sink, &classes)?;
            true
        }
    };
    out.sink.flush()?;
    Ok(ok)
}

fn validate(out: &mut Output, src: &Source, lenient: bool) -> Result<bool> {
    if let (Some(db), None) = (&src.db, src.line) {
        let (n, r) = src.nr()?;
        let opts = BatchOptions { checks: [Check::Axioms].into(), lenient, ..Default::default() };
        let file = File::open(db).with_context(|| format!("opening {}", db.display()))?;
        let rep = run_batch(read_database(BufReader::new(file), n, r), n, r, &opts)?;
        out.line(report::render(&rep, out.format).trim_end())?;
        return Ok(rep.all_passed());
    }
    match src.load() {
        Ok(l) => {
            let rep = check_cocircuit_axioms(l.m.cocircuits());
            match out.format {
                Format::Json => out.json(&serde_json::json!({
                    "valid": rep.passed,
                    "n": l.m.n(),
                    "r": l.m.rank(),
                    "uniform": l.m.is_uniform(),
                    "cocircuits": l.m.cocircuits().len(),
                }))?,
                _ => out.line(format!(
                    "valid: n = {}, r = {}, uniform = {}, {} cocircuits",
                    l.m.n(),
                    l.m.rank(),
                    l.m.is_uniform(),
                    l.m.cocircuits().len()
                ))?,
            }
            Ok(rep.passed)
        }
        Err(e) => match e.downcast_ref::<cocircuit_core::Error>() {
            Some(cocircuit_core::Error::AxiomViolation(rep)) => {
                out.line(format!("invalid: {rep}"))?;
                Ok(false)
            }
            _ => Err(e),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
