//! Diameter bounds and conjecture checkers.
//!
//! Checkers never trust cached reports: distances come from a fresh BFS
//! matrix held by an [`Analysis`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{crabbed_distance_idx, CocircuitGraph, UNREACHABLE};
use crate::matroid::OrientedMatroid;
use crate::sign::{ElementSet, SignVector};

fn uniform_shape(x: &SignVector, n: usize, r: usize) -> Result<()> {
    if x.len() != n || r == 0 || x.zeros().len() != r - 1 {
        return Err(Error::InvalidInput(format!("{x} is not a cocircuit of a uniform rank {r} matroid on {n} elements")));
    }
    Ok(())
}

/// `n - r + 2` for antipodal pairs, `|S(X,Y)| + |X0 \ Y0|` otherwise.
pub fn pair_lower_bound(x: &SignVector, y: &SignVector, n: usize, r: usize) -> Result<u32> {
    uniform_shape(x, n, r)?;
    uniform_shape(y, n, r)?;
    if *y == x.negate() {
        return Ok((n - r + 2) as u32);
    }
    Ok((x.separation_unchecked(y).len() + x.zeros().difference(y.zeros()).len()) as u32)
}

fn half_sum(n: usize, r: usize, from: usize, to: usize) -> u32 {
    (from..=to).map(|k| ((n - r - k) / 2 + 1) as u32).sum()
}

/// `n - r + 2 + sum_{k=1}^{min(r-2, n-r)} (floor((n-r-k)/2) + 1)`.
pub fn finschi_bound(n: usize, r: usize) -> Result<u32> {
    if r < 2 || r > n {
        return Err(Error::BadRank { n, r });
    }
    Ok((n - r + 2) as u32 + half_sum(n, r, 1, (r - 2).min(n - r)))
}

/// Per-pair bound for `X != -Y` with `l = |X0 \ Y0|`:
/// `n - r + 1 + sum_{k=2}^{l-1} (floor((n-r-k)/2) + 1)`.
pub fn improved_pair_bound(n: usize, r: usize, l: usize) -> Result<u32> {
    if r < 1 || r > n {
        return Err(Error::BadRank { n, r });
    }
    if l < 1 || l > (r - 1).min(n - r + 1) {
        return Err(Error::InvalidInput(format!("|X0 \\ Y0| = {l} out of range for n = {n}, r = {r}")));
    }
    let to = l - 1;
    Ok((n - r + 1) as u32 + if to >= 2 { half_sum(n, r, 2, to) } else { 0 })
}

/// Diameter bound for `r >= 4`, `n - r >= 2`:
/// `n - r + 1 + sum_{k=2}^{min(r-2, n-r)} (floor((n-r-k)/2) + 1)`.
pub fn improved_diameter_bound(n: usize, r: usize) -> Result<u32> {
    if r < 4 || r > n || n - r < 2 {
        return Err(Error::BadRank { n, r });
    }
    Ok((n - r + 1) as u32 + half_sum(n, r, 2, (r - 2).min(n - r)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conjecture {
    HirschOm,
    NonantipodalStrict,
    TopePath,
    CrabbedShortest,
    PairBounds,
}

impl Conjecture {
    pub fn id(self) -> &'static str {
        match self {
            Conjecture::HirschOm => "hirsch_om",
            Conjecture::NonantipodalStrict => "nonantipodal_strict",
            Conjecture::TopePath => "tope_path",
            Conjecture::CrabbedShortest => "crabbed_shortest",
            Conjecture::PairBounds => "pair_bounds",
        }
    }
}

/// A pair that violates a check, with its BFS distance and the value it was
/// compared against (`None` when that value does not exist, e.g. a
/// disconnected crabbed restriction).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Witness {
    pub x: SignVector,
    pub y: SignVector,
    pub d: u32,
    pub bound: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub instance: String,
    pub conjecture: Conjecture,
    pub holds: bool,
    pub diameter: u32,
    pub bound: u32,
    pub witnesses: Vec<Witness>,
    pub pairs_checked: usize,
    /// Pairs outside the scope of the statement (no common tope).
    pub pairs_vacuous: usize,
}

impl ConjectureReport {
    fn new(instance: &str, conjecture: Conjecture, diameter: u32, bound: u32, mut witnesses: Vec<Witness>) -> Self {
        witnesses.sort();
        ConjectureReport {
            instance: instance.to_string(),
            conjecture,
            holds: witnesses.is_empty(),
            diameter,
            bound,
            witnesses,
            pairs_checked: 0,
            pairs_vacuous: 0,
        }
    }
}

/// A uniform matroid with its cocircuit graph and all-pairs BFS distances.
pub struct Analysis<'a> {
    m: &'a OrientedMatroid,
    graph: CocircuitGraph,
    dist: Vec<Vec<u32>>,
}

impl<'a> Analysis<'a> {
    pub fn new(m: &'a OrientedMatroid) -> Result<Analysis<'a>> {
        if !m.is_uniform() {
            return Err(Error::NotUniform);
        }
        let graph = CocircuitGraph::new(m);
        let dist = graph.all_pairs();
        Ok(Analysis { m, graph, dist })
    }

    /// Like [`Analysis::new`] but with one BFS after another, for callers
    /// that already parallelize across instances.
    pub fn new_sequential(m: &'a OrientedMatroid) -> Result<Analysis<'a>> {
        if !m.is_uniform() {
            return Err(Error::NotUniform);
        }
        let graph = CocircuitGraph::new(m);
        let dist = graph.all_pairs_sequential();
        Ok(Analysis { m, graph, dist })
    }

    pub fn matroid(&self) -> &OrientedMatroid {
        self.m
    }

    pub fn graph(&self) -> &CocircuitGraph {
        &self.graph
    }

    pub fn distances(&self) -> &[Vec<u32>] {
        &self.dist
    }

    pub fn diameter(&self) -> u32 {
        self.dist.iter().flatten().copied().filter(|&d| d != UNREACHABLE).max().unwrap_or(0)
    }

    fn vertex(&self, i: usize) -> SignVector {
        self.graph.vertices()[i]
    }

    fn conformal(&self, i: usize, j: usize) -> bool {
        self.vertex(i).separation_unchecked(&self.vertex(j)).is_empty()
    }

    /// The diameter bound `n - r + 2` and the strict bound `n - r + 1` for
    /// non-antipodal pairs. The first report also flags a diameter below
    /// `n - r + 2`, which would contradict the antipodal distance.
    pub fn check_hirsch(&self, instance: &str) -> (ConjectureReport, ConjectureReport) {
        let (n, r) = (self.m.n(), self.m.rank());
        let hirsch = (n - r + 2) as u32;
        let diameter = self.diameter();
        let mut over = Vec::new();
        let mut strict = Vec::new();
        let mut pairs = 0;
        for i in 0..self.dist.len() {
            for j in i + 1..self.dist.len() {
                pairs += 1;
                let d = self.dist[i][j];
                if d == UNREACHABLE || d > hirsch {
                    over.push(Witness { x: self.vertex(i), y: self.vertex(j), d, bound: Some(hirsch), reason: None });
                }
                if self.graph.antipode(i) != Some(j) && d > hirsch - 1 {
                    strict.push(Witness { x: self.vertex(i), y: self.vertex(j), d, bound: Some(hirsch - 1), reason: None });
                }
            }
        }
        if diameter < hirsch {
            over.push(Witness {
                x: self.vertex(0),
                y: self.vertex(0).negate(),
                d: diameter,
                bound: Some(hirsch),
                reason: Some("diameter below n-r+2".into()),
            });
        }
        let mut a = ConjectureReport::new(instance, Conjecture::HirschOm, diameter, hirsch, over);
        a.pairs_checked = pairs;
        let mut b = ConjectureReport::new(instance, Conjecture::NonantipodalStrict, diameter, hirsch - 1, strict);
        b.pairs_checked = pairs - self.dist.len() / 2;
        (a, b)
    }

    /// For every conformal pair, some common tope realizes the distance.
    pub fn check_tope_path(&self, instance: &str) -> Result<ConjectureReport> {
        let v = self.dist.len();
        let mut best = vec![vec![UNREACHABLE; v]; v];
        for t in self.m.topes()? {
            let members: Vec<usize> = (0..v).filter(|&i| self.vertex(i).conforms_unchecked(&t)).collect();
            let mut inside = vec![false; v];
            for &i in &members {
                inside[i] = true;
            }
            for &i in &members {
                let d = self.graph.bfs(i, |w| inside[w]);
                for &j in &members {
                    best[i][j] = best[i][j].min(d[j]);
                }
            }
        }
        let mut witnesses = Vec::new();
        let (mut checked, mut vacuous) = (0, 0);
        for i in 0..v {
            for j in i + 1..v {
                if !self.conformal(i, j) {
                    vacuous += 1;
                    continue;
                }
                checked += 1;
                if best[i][j] != self.dist[i][j] {
                    let bound = (best[i][j] != UNREACHABLE).then_some(best[i][j]);
                    witnesses.push(Witness { x: self.vertex(i), y: self.vertex(j), d: self.dist[i][j], bound, reason: None });
                }
            }
        }
        let mut report = ConjectureReport::new(instance, Conjecture::TopePath, self.diameter(), 0, witnesses);
        report.pairs_checked = checked;
        report.pairs_vacuous = vacuous;
        Ok(report)
    }

    /// For every conformal pair, a shortest crabbed path is a shortest path.
    /// Witnesses with `bound: None` are pairs the crabbed restriction
    /// disconnects.
    pub fn check_crabbed(&self, instance: &str) -> ConjectureReport {
        let v = self.dist.len();
        let mut witnesses = Vec::new();
        let (mut checked, mut vacuous) = (0, 0);
        for i in 0..v {
            for j in i + 1..v {
                if !self.conformal(i, j) {
                    vacuous += 1;
                    continue;
                }
                checked += 1;
                let c = crabbed_distance_idx(&self.graph, i, j);
                if c != Some(self.dist[i][j]) {
                    witnesses.push(Witness { x: self.vertex(i), y: self.vertex(j), d: self.dist[i][j], bound: c, reason: None });
                }
            }
        }
        let mut report = ConjectureReport::new(instance, Conjecture::CrabbedShortest, self.diameter(), 0, witnesses);
        report.pairs_checked = checked;
        report.pairs_vacuous = vacuous;
        report
    }

    /// Per-pair distance bounds: the lower bound (with equality when
    /// `|X0 \ Y0| <= 1`), `n - r + 1` when `|X0 \ Y0| = 2`, and the
    /// improved per-pair upper bound, all for `X != -Y`; `n - r + 2` for
    /// antipodal pairs.
    pub fn check_pair_bounds(&self, instance: &str) -> ConjectureReport {
        let (n, r) = (self.m.n(), self.m.rank());
        let v = self.dist.len();
        let mut witnesses = Vec::new();
        let mut checked = 0;
        for i in 0..v {
            for j in i + 1..v {
                checked += 1;
                let (x, y) = (self.vertex(i), self.vertex(j));
                let d = self.dist[i][j];
                let mut fail = |bound: u32, reason: &str| {
                    witnesses.push(Witness { x, y, d, bound: Some(bound), reason: Some(reason.to_string()) });
                };
                let lower = pair_lower_bound(&x, &y, n, r).expect("uniform cocircuits");
                if self.graph.antipode(i) == Some(j) {
                    if d != lower {
                        fail(lower, "antipodal distance");
                    }
                    continue;
                }
                let l = x.zeros().difference(y.zeros()).len();
                if d < lower {
                    fail(lower, "lower bound");
                }
                if l <= 1 && d != lower {
                    fail(lower, "lower bound equality");
                }
                if l == 2 && d > (n - r + 1) as u32 {
                    fail((n - r + 1) as u32, "two-zero bound");
                }
                let upper = improved_pair_bound(n, r, l).expect("l in range for uniform cocircuits");
                if d > upper {
                    fail(upper, "improved pair bound");
                }
            }
        }
        let mut report = ConjectureReport::new(instance, Conjecture::PairBounds, self.diameter(), 0, witnesses);
        report.pairs_checked = checked;
        report
    }

    /// Contraction by `X0 ∩ Y0` has the expected size and does not shrink
    /// the distance between the restrictions of `X` and `Y`.
    pub fn check_corank_reduction(&self, x: &SignVector, y: &SignVector) -> Result<bool> {
        let (i, j) = (
            self.graph.index_of(x).ok_or_else(|| Error::VertexNotFound(x.to_string()))?,
            self.graph.index_of(y).ok_or_else(|| Error::VertexNotFound(y.to_string()))?,
        );
        if self.graph.antipode(i) == Some(j) {
            return Err(Error::Precondition("X = -Y".into()));
        }
        let a = x.zeros().intersection(y.zeros());
        let c = self.m.contract(a)?;
        if c.n() != self.m.n() - a.len() || c.rank() != self.m.rank() - a.len() {
            return Ok(false);
        }
        let keep = ElementSet::full(self.m.n()).difference(a);
        let g = CocircuitGraph::new(&c);
        let d_contracted = g.distance(&x.restrict(keep)?, &y.restrict(keep)?)?;
        Ok(self.dist[i][j] <= d_contracted)
    }
}

pub fn check_conjecture_hirsch(m: &OrientedMatroid, instance: &str) -> Result<(ConjectureReport, ConjectureReport)> {
    Ok(Analysis::new(m)?.check_hirsch(instance))
}

pub fn check_conjecture_tope_path(m: &OrientedMatroid, instance: &str) -> Result<ConjectureReport> {
    Analysis::new(m)?.check_tope_path(instance)
}

pub fn check_conjecture_crabbed(m: &OrientedMatroid, instance: &str) -> Result<ConjectureReport> {
    Ok(Analysis::new(m)?.check_crabbed(instance))
}

pub fn check_corank_reduction(m: &OrientedMatroid, x: &SignVector, y: &SignVector) -> Result<bool> {
    Analysis::new(m)?.check_corank_reduction(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chirotope::Chirotope;

    fn sv(s: &str) -> SignVector {
        s.parse().unwrap()
    }

    fn alt(n: usize, r: usize) -> OrientedMatroid {
        OrientedMatroid::from_chirotope(&Chirotope::alternating(n, r).unwrap()).unwrap()
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(pair_lower_bound(&sv("00++"), &sv("00--"), 4, 3).unwrap(), 3);
        assert_eq!(pair_lower_bound(&sv("00++"), &sv("0+0-"), 4, 3).unwrap(), 2);
        assert_eq!(pair_lower_bound(&sv("00++"), &sv("00++"), 4, 3).unwrap(), 0);
        assert!(pair_lower_bound(&sv("0+++"), &sv("00++"), 4, 3).is_err());
    }

    #[test]
    fn finschi_values() {
        assert_eq!(finschi_bound(7, 4).unwrap(), 8);
        assert_eq!(finschi_bound(5, 5).unwrap(), 2);
        for n in 2..20 {
            assert_eq!(finschi_bound(n, 2).unwrap(), n as u32);
            assert_eq!(finschi_bound(n, n).unwrap(), 2);
        }
        assert!(finschi_bound(3, 1).is_err());
        assert!(finschi_bound(3, 4).is_err());
    }

    #[test]
    fn improved_values() {
        assert_eq!(improved_diameter_bound(7, 4).unwrap(), 5);
        assert!(improved_diameter_bound(7, 4).unwrap() < finschi_bound(7, 4).unwrap());
        for n in 3..16 {
            for r in 2..n {
                for l in 1..=2.min((r - 1).min(n - r + 1)) {
                    assert_eq!(improved_pair_bound(n, r, l).unwrap(), (n - r + 1) as u32);
                }
            }
        }
        for n in 6..=16 {
            for r in 4..=n - 2 {
                assert!(improved_diameter_bound(n, r).unwrap() <= finschi_bound(n, r).unwrap());
            }
        }
        assert!(improved_diameter_bound(5, 4).is_err());
        assert!(improved_pair_bound(7, 4, 0).is_err());
        assert!(improved_pair_bound(7, 4, 4).is_err());
    }

    #[test]
    fn checkers_on_alternating() {
        let m = alt(4, 3);
        let (h, s) = check_conjecture_hirsch(&m, "alt").unwrap();
        assert!(h.holds && s.holds);
        assert_eq!((h.diameter, h.bound, s.bound), (3, 3, 2));
        let t = check_conjecture_tope_path(&m, "alt").unwrap();
        assert!(t.holds);
        assert!(t.pairs_vacuous > 0);
        assert_eq!(t.pairs_checked + t.pairs_vacuous, 66);
        assert!(check_conjecture_crabbed(&m, "alt").unwrap().holds);
        let a = Analysis::new(&m).unwrap();
        assert!(a.check_pair_bounds("alt").holds);

        let r2 = alt(6, 2);
        let (h, _) = check_conjecture_hirsch(&r2, "r2").unwrap();
        assert_eq!(h.diameter, 6);
    }

    #[test]
    fn corank_reduction() {
        let m = alt(6, 3);
        let a = Analysis::new(&m).unwrap();
        let verts = m.cocircuits();
        let mut tried = 0;
        for x in verts {
            for y in verts {
                if *y == x.negate() {
                    continue;
                }
                assert!(a.check_corank_reduction(x, y).unwrap(), "{x} {y}");
                if x.zeros().intersection(y.zeros()).len() == 1 {
                    tried += 1;
                }
            }
        }
        assert!(tried > 0);
        assert!(a.check_corank_reduction(&verts[0], &verts[0].negate()).is_err());
    }

    #[test]
    fn report_json_schema() {
        let (h, _) = check_conjecture_hirsch(&alt(5, 3), "x").unwrap();
        let v: serde_json::Value = serde_json::to_value(&h).unwrap();
        for key in ["instance", "conjecture", "holds", "diameter", "bound", "witnesses"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["conjecture"], "hirsch_om");
    }
}
