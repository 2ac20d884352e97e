//! Batch verification over a database of chirotopes.
//!
//! Instances are read in chunks, checked in parallel on a dedicated thread
//! pool and merged back in line order, so output does not depend on the
//! number of workers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use cocircuit_core::bounds::{finschi_bound, improved_diameter_bound, Analysis, Conjecture, ConjectureReport, Witness};
use cocircuit_core::properties::check_invariants;
use cocircuit_core::{Chirotope, Error, OrientedMatroid, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Instances handed to the pool at once.
const CHUNK: usize = 4096;
/// Default checkpoint interval, in instances.
pub const CHECKPOINT_EVERY: usize = 100_000;
/// Witnesses kept per failing report.
const MAX_WITNESSES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Axioms,
    Hirsch,
    TopePath,
    Crabbed,
    Bounds,
    Invariants,
}

impl Check {
    pub const ALL: [Check; 6] = [Check::Axioms, Check::Hirsch, Check::TopePath, Check::Crabbed, Check::Bounds, Check::Invariants];

    pub fn name(self) -> &'static str {
        match self {
            Check::Axioms => "axioms",
            Check::Hirsch => "hirsch",
            Check::TopePath => "tope_path",
            Check::Crabbed => "crabbed",
            Check::Bounds => "bounds",
            Check::Invariants => "invariants",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Check, String> {
        let key = s.trim().replace('-', "_");
        Check::ALL.into_iter().find(|c| c.name() == key).ok_or_else(|| format!("unknown check {s:?}"))
    }
}

/// Comma-separated check names; `all` selects every check.
pub fn parse_checks(s: &str) -> std::result::Result<BTreeSet<Check>, String> {
    let mut out = BTreeSet::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        if part.trim() == "all" {
            out.extend(Check::ALL);
        } else {
            out.insert(part.parse()?);
        }
    }
    if out.is_empty() {
        return Err("no checks selected".into());
    }
    Ok(out)
}

/// Inclusive range of 1-based line numbers, written `A-B`, `A-` or `-B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineRange {
    pub first: usize,
    pub last: usize,
}

impl LineRange {
    pub fn contains(&self, line: usize) -> bool {
        (self.first..=self.last).contains(&line)
    }
}

impl FromStr for LineRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<LineRange, String> {
        let (a, b) = s.split_once('-').ok_or_else(|| format!("expected A-B, got {s:?}"))?;
        let num = |t: &str, default: usize| -> std::result::Result<usize, String> {
            if t.trim().is_empty() {
                Ok(default)
            } else {
                t.trim().parse().map_err(|e| format!("bad line number {t:?}: {e}"))
            }
        };
        let range = LineRange { first: num(a, 1)?, last: num(b, usize::MAX)? };
        if range.first == 0 || range.first > range.last {
            return Err(format!("empty line range {s:?}"));
        }
        Ok(range)
    }
}

#[derive(Clone, Debug)]
pub struct BatchOptions {
    pub checks: BTreeSet<Check>,
    /// Worker threads; 0 uses rayon's default.
    pub jobs: usize,
    /// Record malformed lines and keep going instead of aborting.
    pub lenient: bool,
    pub lines: Option<LineRange>,
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_every: usize,
    /// Keep one row per instance (needed for CSV output).
    pub keep_rows: bool,
    /// Record wall-clock timing in the report.
    pub timing: bool,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions {
            checks: Check::ALL.into_iter().collect(),
            jobs: 0,
            lenient: false,
            lines: None,
            checkpoint: None,
            checkpoint_every: CHECKPOINT_EVERY,
            keep_rows: true,
            timing: false,
        }
    }
}

/// Per-instance outcome. `results` only has entries for checks that ran.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRow {
    pub line: usize,
    pub n: usize,
    pub r: usize,
    pub diameter: Option<u32>,
    pub max_non_antipodal: Option<u32>,
    pub results: BTreeMap<Check, bool>,
    /// Conformal pairs the crabbed restriction disconnects.
    pub crabbed_disconnected: usize,
    /// Conformal pairs whose crabbed distance exceeds the graph distance.
    pub crabbed_longer: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl InstanceRow {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.results.values().all(|&ok| ok)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_ms: f64,
    pub per_instance_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub n: usize,
    pub r: usize,
    pub checks: Vec<Check>,
    pub instances: usize,
    pub passed: BTreeMap<Check, usize>,
    pub failed: BTreeMap<Check, usize>,
    pub max_diameter: Option<u32>,
    /// Instances with at least one crabbed-disconnected conformal pair.
    pub crabbed_disconnected_instances: usize,
    pub errors: Vec<LineError>,
    /// Failing reports with portable witnesses (truncated).
    pub violations: Vec<ConjectureReport>,
    #[serde(default)]
    pub rows: Vec<InstanceRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl BatchReport {
    pub fn new(n: usize, r: usize, checks: &BTreeSet<Check>) -> BatchReport {
        BatchReport {
            n,
            r,
            checks: checks.iter().copied().collect(),
            instances: 0,
            passed: checks.iter().map(|&c| (c, 0)).collect(),
            failed: checks.iter().map(|&c| (c, 0)).collect(),
            max_diameter: None,
            crabbed_disconnected_instances: 0,
            errors: Vec::new(),
            violations: Vec::new(),
            rows: Vec::new(),
            timing: None,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.errors.is_empty() && self.failed.values().all(|&k| k == 0)
    }

    fn absorb(&mut self, outcome: Outcome, keep_rows: bool) {
        let Outcome { row, reports } = outcome;
        self.instances += 1;
        for (check, &ok) in &row.results {
            *if ok { self.passed.entry(*check) } else { self.failed.entry(*check) }.or_default() += 1;
        }
        if let Some(d) = row.diameter {
            self.max_diameter = Some(self.max_diameter.map_or(d, |m| m.max(d)));
        }
        if row.crabbed_disconnected > 0 {
            self.crabbed_disconnected_instances += 1;
        }
        if let Some(e) = &row.error {
            self.errors.push(LineError { line: row.line, message: e.clone() });
        }
        self.violations.extend(reports);
        if keep_rows {
            self.rows.push(row);
        }
    }
}

/// Saved progress: everything before `next_line` is already in `report`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub next_line: usize,
    pub report: BatchReport,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Option<Checkpoint>> {
        match fs::read_to_string(path) {
            Ok(text) => serde_json::from_str(&text)
                .map(Some)
                .map_err(|e| Error::InvalidInput(format!("checkpoint {}: {e}", path.display()))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(Error::Io(e)),
        }
    }

    /// Write to a sibling file first so an interrupted run never leaves a
    /// truncated checkpoint behind.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        let text = serde_json::to_string(self).map_err(|e| Error::InvalidInput(e.to_string()))?;
        fs::write(&tmp, text)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

struct Outcome {
    row: InstanceRow,
    reports: Vec<ConjectureReport>,
}

fn trimmed(mut rep: ConjectureReport) -> ConjectureReport {
    rep.witnesses.truncate(MAX_WITNESSES);
    rep
}

/// Run the selected checks on one chirotope.
pub fn check_instance(chi: &Chirotope, line: usize, checks: &BTreeSet<Check>) -> (InstanceRow, Vec<ConjectureReport>) {
    let o = run_instance(chi, line, checks);
    (o.row, o.reports)
}

fn run_instance(chi: &Chirotope, line: usize, checks: &BTreeSet<Check>) -> Outcome {
    let (n, r) = (chi.n(), chi.rank());
    let mut row = InstanceRow {
        line,
        n,
        r,
        diameter: None,
        max_non_antipodal: None,
        results: BTreeMap::new(),
        crabbed_disconnected: 0,
        crabbed_longer: 0,
        error: None,
    };
    let mut reports = Vec::new();
    let m = match OrientedMatroid::from_chirotope(chi) {
        Ok(m) => m,
        Err(e) => {
            if checks.contains(&Check::Axioms) && matches!(e, Error::AxiomViolation(_)) {
                row.results.insert(Check::Axioms, false);
            }
            row.error = Some(e.to_string());
            return Outcome { row, reports };
        }
    };
    if checks.contains(&Check::Axioms) {
        row.results.insert(Check::Axioms, true);
    }
    let analysis = match Analysis::new_sequential(&m) {
        Ok(a) => a,
        Err(e) => {
            row.error = Some(e.to_string());
            return Outcome { row, reports };
        }
    };
    let instance = line.to_string();
    let diameter = analysis.diameter();
    row.diameter = Some(diameter);

    if checks.contains(&Check::Hirsch) {
        let (hirsch, strict) = analysis.check_hirsch(&instance);
        row.max_non_antipodal = Some(max_non_antipodal(&analysis));
        row.results.insert(Check::Hirsch, hirsch.holds && strict.holds);
        reports.extend([hirsch, strict].into_iter().filter(|rep| !rep.holds).map(trimmed));
    }
    if checks.contains(&Check::TopePath) {
        match analysis.check_tope_path(&instance) {
            Ok(rep) => {
                row.results.insert(Check::TopePath, rep.holds);
                if !rep.holds {
                    reports.push(trimmed(rep));
                }
            }
            Err(e) => {
                row.results.insert(Check::TopePath, false);
                row.error = Some(e.to_string());
            }
        }
    }
    if checks.contains(&Check::Crabbed) {
        let rep = analysis.check_crabbed(&instance);
        row.crabbed_disconnected = rep.witnesses.iter().filter(|w| w.bound.is_none()).count();
        row.crabbed_longer = rep.witnesses.len() - row.crabbed_disconnected;
        row.results.insert(Check::Crabbed, rep.holds);
        if !rep.holds {
            reports.push(trimmed(rep));
        }
    }
    if checks.contains(&Check::Bounds) {
        let mut rep = analysis.check_pair_bounds(&instance);
        if r >= 2 {
            let fb = finschi_bound(n, r).expect("valid rank");
            if diameter > fb {
                rep.witnesses.push(diameter_witness(&analysis, diameter, fb, "diameter above the general upper bound"));
            }
        }
        if r >= 4 && n - r >= 2 {
            let ib = improved_diameter_bound(n, r).expect("valid rank");
            if diameter > ib {
                rep.witnesses.push(diameter_witness(&analysis, diameter, ib, "diameter above the improved upper bound"));
            }
        }
        rep.holds = rep.witnesses.is_empty();
        row.results.insert(Check::Bounds, rep.holds);
        if !rep.holds {
            reports.push(trimmed(rep));
        }
    }
    if checks.contains(&Check::Invariants) && r >= 2 {
        match check_invariants(chi, &analysis, &instance) {
            Ok(rep) => {
                row.results.insert(Check::Invariants, rep.holds());
                if !rep.holds() {
                    row.error = Some(rep.violations.join("; "));
                }
            }
            Err(e) => {
                row.results.insert(Check::Invariants, false);
                row.error = Some(e.to_string());
            }
        }
    }
    Outcome { row, reports }
}

fn max_non_antipodal(a: &Analysis<'_>) -> u32 {
    let g = a.graph();
    let mut best = 0;
    for (i, row) in a.distances().iter().enumerate() {
        for (j, &d) in row.iter().enumerate().skip(i + 1) {
            if g.antipode(i) != Some(j) {
                best = best.max(d);
            }
        }
    }
    best
}

fn diameter_witness(a: &Analysis<'_>, diameter: u32, bound: u32, reason: &str) -> Witness {
    let g = a.graph();
    let (i, j) = a
        .distances()
        .iter()
        .enumerate()
        .find_map(|(i, row)| row.iter().position(|&d| d == diameter).map(|j| (i, j)))
        .unwrap_or((0, 0));
    Witness { x: g.vertices()[i], y: g.vertices()[j], d: diameter, bound: Some(bound), reason: Some(reason.into()) }
}

/// Check every instance from `source`, an iterator of `(line, chirotope)`
/// items as produced by `read_database`.
pub fn run_batch<I>(source: I, n: usize, r: usize, opts: &BatchOptions) -> Result<BatchReport>
where
    I: IntoIterator<Item = (usize, Result<Chirotope>)>,
{
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;

    let (mut report, resume_at) = match opts.checkpoint.as_deref().map(Checkpoint::load).transpose()?.flatten() {
        Some(cp) => {
            if (cp.report.n, cp.report.r) != (n, r) || cp.report.checks != opts.checks.iter().copied().collect::<Vec<_>>() {
                return Err(Error::InvalidInput("checkpoint was written for a different run".into()));
            }
            (cp.report, cp.next_line)
        }
        None => (BatchReport::new(n, r, &opts.checks), 0),
    };
    let resumed_with = report.instances;
    let mut since_checkpoint = 0;
    let mut last_line = resume_at.saturating_sub(1);

    let mut items = source.into_iter().filter(|(line, _)| *line >= resume_at && opts.lines.is_none_or(|lr| lr.contains(*line)));
    let mut chunk: Vec<(usize, Chirotope)> = Vec::with_capacity(CHUNK);
    loop {
        chunk.clear();
        for (line, parsed) in items.by_ref() {
            last_line = line;
            match parsed {
                Ok(chi) if (chi.n(), chi.rank()) == (n, r) => chunk.push((line, chi)),
                Ok(chi) => {
                    let msg = format!("expected n={n} r={r}, found n={} r={}", chi.n(), chi.rank());
                    malformed(&mut report, opts, line, msg)?;
                }
                Err(e) => malformed(&mut report, opts, line, e.to_string())?,
            }
            if chunk.len() == CHUNK {
                break;
            }
        }
        if chunk.is_empty() {
            break;
        }
        let outcomes: Vec<Outcome> = pool.install(|| chunk.par_iter().map(|(line, chi)| run_instance(chi, *line, &opts.checks)).collect());
        since_checkpoint += outcomes.len();
        for o in outcomes {
            report.absorb(o, opts.keep_rows);
        }
        if let Some(path) = &opts.checkpoint {
            if since_checkpoint >= opts.checkpoint_every {
                Checkpoint { next_line: last_line + 1, report: report.clone() }.save(path)?;
                since_checkpoint = 0;
            }
        }
    }
    if let Some(path) = &opts.checkpoint {
        Checkpoint { next_line: last_line + 1, report: report.clone() }.save(path)?;
    }
    if opts.timing {
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let done = (report.instances - resumed_with).max(1);
        report.timing = Some(Timing { wall_ms, per_instance_ms: wall_ms / done as f64 });
    }
    Ok(report)
}

fn malformed(report: &mut BatchReport, opts: &BatchOptions, line: usize, message: String) -> Result<()> {
    if !opts.lenient {
        return Err(Error::InvalidInput(format!("line {line}: {message}")));
    }
    report.errors.push(LineError { line, message });
    Ok(())
}

/// Ids of the conjecture reports a check can produce.
pub fn conjectures_of(check: Check) -> &'static [Conjecture] {
    match check {
        Check::Hirsch => &[Conjecture::HirschOm, Conjecture::NonantipodalStrict],
        Check::TopePath => &[Conjecture::TopePath],
        Check::Crabbed => &[Conjecture::CrabbedShortest],
        Check::Bounds => &[Conjecture::PairBounds],
        Check::Axioms | Check::Invariants => &[],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_check_lists() {
        assert_eq!(parse_checks("all").unwrap().len(), 6);
        let s = parse_checks("hirsch,tope-path").unwrap();
        assert!(s.contains(&Check::TopePath) && s.contains(&Check::Hirsch) && s.len() == 2);
        assert!(parse_checks("nope").is_err());
        assert!(parse_checks("").is_err());
    }

    #[test]
    fn parse_line_ranges() {
        assert_eq!("3-7".parse::<LineRange>().unwrap(), LineRange { first: 3, last: 7 });
        assert_eq!("5-".parse::<LineRange>().unwrap().last, usize::MAX);
        assert_eq!("-4".parse::<LineRange>().unwrap().first, 1);
        assert!("7-3".parse::<LineRange>().is_err());
        assert!("0-3".parse::<LineRange>().is_err());
        assert!("x".parse::<LineRange>().is_err());
    }

    #[test]
    fn alternating_instance_passes_everything() {
        let chi = Chirotope::alternating(6, 3).unwrap();
        let (row, reports) = check_instance(&chi, 1, &Check::ALL.into_iter().collect());
        assert!(row.passed(), "{row:?}");
        assert!(reports.is_empty());
        assert_eq!(row.diameter, Some(5));
        assert_eq!(row.max_non_antipodal, Some(4));
        assert_eq!(row.results.len(), 6);
    }

    #[test]
    fn malformed_lines_strict_and_lenient() {
        let good = Chirotope::alternating(4, 2).unwrap();
        let src = || vec![(1, Ok(good.clone())), (2, Chirotope::parse("++", 4, 2)), (3, Ok(good.clone()))];
        let strict = BatchOptions { jobs: 1, ..Default::default() };
        let err = run_batch(src(), 4, 2, &strict).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let lenient = BatchOptions { jobs: 1, lenient: true, ..Default::default() };
        let rep = run_batch(src(), 4, 2, &lenient).unwrap();
        assert_eq!(rep.instances, 2);
        assert_eq!(rep.errors.len(), 1);
        assert!(!rep.all_passed());
    }

    #[test]
    fn line_range_filters() {
        let chi = Chirotope::alternating(5, 2).unwrap();
        let src = (1..=10).map(|i| (i, Ok(chi.clone())));
        let opts = BatchOptions { jobs: 1, lines: Some("4-6".parse().unwrap()), ..Default::default() };
        let rep = run_batch(src, 5, 2, &opts).unwrap();
        assert_eq!(rep.rows.iter().map(|r| r.line).collect::<Vec<_>>(), vec![4, 5, 6]);
    }

    #[test]
    fn checkpoint_resume_matches_single_run() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.json");
        let chi = Chirotope::alternating(6, 3).unwrap();
        let all: Vec<(usize, Result<Chirotope>)> = (1..=12).map(|i| (i, Ok(chi.reorient(i as u64 % 8)))).collect();
        let clone_src = |k: usize| all.iter().take(k).map(|(l, c)| (*l, Ok(c.as_ref().unwrap().clone()))).collect::<Vec<_>>();
        let opts = BatchOptions { jobs: 1, checkpoint: Some(path.clone()), checkpoint_every: 1, ..Default::default() };
        // an interrupted run that stopped after 5 lines
        run_batch(clone_src(5), 6, 3, &opts).unwrap();
        let resumed = run_batch(clone_src(12), 6, 3, &opts).unwrap();
        let fresh = run_batch(clone_src(12), 6, 3, &BatchOptions { jobs: 1, ..Default::default() }).unwrap();
        assert_eq!(resumed, fresh);
        assert_eq!(resumed.instances, 12);
    }
}
