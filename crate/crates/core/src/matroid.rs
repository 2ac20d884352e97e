//! The [`OrientedMatroid`] aggregate, built from a set of signed cocircuits.
//!
//! Construction verifies the cocircuit axioms (CC0)-(CC3) and determines the
//! rank. Derived structure (covectors, the flat lattice of the underlying
//! matroid) is computed lazily, at most once, and is read-only afterwards.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::chirotope::Chirotope;
use crate::combi::binomial;
use crate::error::{Error, Result};
use crate::sign::{ElementSet, SignVector, MAX_ELEMENTS};

/// Covector enumeration is refused beyond this many elements.
pub const COVECTOR_GUARD: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axiom {
    CC0,
    CC1,
    CC2,
    CC3,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub witnesses: Vec<SignVector>,
    /// Element involved, for CC3.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub passed: bool,
    pub violations: Vec<AxiomViolation>,
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed {
            return f.write_str("all axioms hold");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .take(4)
            .map(|v| {
                let w: Vec<String> = v.witnesses.iter().map(|x| x.to_string()).collect();
                format!("{:?} [{}]", v.axiom, w.join(", "))
            })
            .collect();
        write!(f, "{} violation(s): {}", self.violations.len(), parts.join("; "))
    }
}

/// Check (CC0)-(CC3) on a set of equal-length sign vectors. Duplicates are
/// ignored.
pub fn check_cocircuit_axioms(cocircuits: &[SignVector]) -> AxiomReport {
    let mut set: Vec<SignVector> = cocircuits.to_vec();
    set.sort_unstable();
    set.dedup();
    let members: HashSet<SignVector> = set.iter().copied().collect();
    let mut violations = Vec::new();

    for x in &set {
        if x.is_zero() {
            violations.push(AxiomViolation { axiom: Axiom::CC0, witnesses: vec![*x], element: None });
        }
        if !members.contains(&x.negate()) {
            violations.push(AxiomViolation { axiom: Axiom::CC1, witnesses: vec![*x], element: None });
        }
    }

    for (i, x) in set.iter().enumerate() {
        for y in &set[i + 1..] {
            let (sx, sy) = (x.support(), y.support());
            let comparable = sx.is_subset(sy) || sy.is_subset(sx);
            if comparable && *y != x.negate() {
                violations.push(AxiomViolation { axiom: Axiom::CC2, witnesses: vec![*x, *y], element: None });
            }
        }
    }

    // candidates for eliminating e are the vectors vanishing at e
    let n = set.first().map_or(0, SignVector::len);
    let mut vanishing: Vec<Vec<(u64, u64)>> = vec![Vec::new(); n];
    for z in &set {
        for e in z.zeros().iter() {
            vanishing[e].push((z.positive().bits(), z.negative().bits()));
        }
    }
    // With CC1 in place, Z eliminates (X, Y) iff -Z eliminates (-X, -Y), so
    // pairs made of two non-canonical vectors need no separate check.
    let symmetric = violations.iter().all(|v| v.axiom != Axiom::CC1);
    for (i, x) in set.iter().enumerate() {
        for y in &set[i + 1..] {
            if symmetric && !x.is_canonical() && !y.is_canonical() {
                continue;
            }
            let sep = x.separation_unchecked(y);
            if sep.is_empty() || *y == x.negate() {
                continue;
            }
            let pos = x.positive().union(y.positive()).bits();
            let neg = x.negative().union(y.negative()).bits();
            for e in sep.iter() {
                if !vanishing[e].iter().any(|&(zp, zn)| zp & !pos == 0 && zn & !neg == 0) {
                    violations.push(AxiomViolation { axiom: Axiom::CC3, witnesses: vec![*x, *y], element: Some(e) });
                }
            }
        }
    }

    AxiomReport { passed: violations.is_empty(), violations }
}

/// Flats of the underlying matroid: hyperplanes (complements of cocircuit
/// supports) closed under intersection, with the corank of each flat.
#[derive(Clone, Debug)]
struct FlatLattice {
    hyperplanes: Vec<u64>,
    corank: HashMap<u64, usize>,
    full: u64,
}

impl FlatLattice {
    fn new(n: usize, cocircuits: &[SignVector]) -> FlatLattice {
        let full = ElementSet::full(n).bits();
        let mut hyperplanes: Vec<u64> = cocircuits.iter().map(|x| full & !x.support().bits()).collect();
        hyperplanes.sort_unstable();
        hyperplanes.dedup();

        let mut flats: HashSet<u64> = HashSet::new();
        flats.insert(full);
        let mut queue: VecDeque<u64> = VecDeque::new();
        for &h in &hyperplanes {
            if flats.insert(h) {
                queue.push_back(h);
            }
        }
        while let Some(f) = queue.pop_front() {
            for &h in &hyperplanes {
                let g = f & h;
                if flats.insert(g) {
                    queue.push_back(g);
                }
            }
        }

        let mut by_size: Vec<u64> = flats.into_iter().collect();
        by_size.sort_unstable_by_key(|f| std::cmp::Reverse(f.count_ones()));
        let mut corank: HashMap<u64, usize> = HashMap::with_capacity(by_size.len());
        for (i, &f) in by_size.iter().enumerate() {
            let best = by_size[..i]
                .iter()
                .filter(|&&g| g != f && f & !g == 0)
                .map(|g| corank[g] + 1)
                .max()
                .unwrap_or(0);
            corank.insert(f, best);
        }
        FlatLattice { hyperplanes, corank, full }
    }

    fn closure(&self, a: u64) -> u64 {
        self.hyperplanes.iter().filter(|&&h| a & !h == 0).fold(self.full, |acc, &h| acc & h)
    }

    /// Longest chain from the closure of the empty set up to the full set.
    fn total_rank(&self) -> usize {
        self.corank[&self.closure(0)]
    }
}

#[derive(Clone)]
pub struct OrientedMatroid {
    n: usize,
    r: usize,
    cocircuits: Vec<SignVector>,
    index: HashMap<SignVector, usize>,
    uniform: bool,
    covectors: OnceLock<Vec<SignVector>>,
    flats: OnceLock<FlatLattice>,
}

impl fmt::Debug for OrientedMatroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrientedMatroid")
            .field("n", &self.n)
            .field("r", &self.r)
            .field("cocircuits", &self.cocircuits.len())
            .field("uniform", &self.uniform)
            .finish()
    }
}

impl PartialEq for OrientedMatroid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.r == other.r && self.cocircuits == other.cocircuits
    }
}

impl Eq for OrientedMatroid {}

/// Interchange form: `{"n": .., "r": .., "cocircuits": ["+0-", ..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatroidJson {
    pub n: usize,
    pub r: usize,
    pub cocircuits: Vec<SignVector>,
}

impl OrientedMatroid {
    /// Validate the cocircuit axioms and determine the rank.
    ///
    /// The rank comes from `rank_hint` when given (and is checked against the
    /// computed value); otherwise it is `|X0| + 1` for uniform sets and the
    /// height of the flat lattice in general.
    pub fn build(cocircuits: Vec<SignVector>, n: usize, rank_hint: Option<usize>) -> Result<OrientedMatroid> {
        if n > MAX_ELEMENTS {
            return Err(Error::TooManyElements { n, max: MAX_ELEMENTS });
        }
        if let Some(x) = cocircuits.iter().find(|x| x.len() != n) {
            return Err(Error::LengthMismatch { left: x.len(), right: n });
        }
        let report = check_cocircuit_axioms(&cocircuits);
        if !report.passed {
            return Err(Error::AxiomViolation(Box::new(report)));
        }
        OrientedMatroid::assemble(cocircuits, n, rank_hint)
    }

    /// Cocircuits of a uniform chirotope, validated like [`OrientedMatroid::build`].
    pub fn from_chirotope(chi: &Chirotope) -> Result<OrientedMatroid> {
        OrientedMatroid::build(chi.cocircuits()?, chi.n(), Some(chi.rank()))
    }

    fn assemble(mut cocircuits: Vec<SignVector>, n: usize, rank_hint: Option<usize>) -> Result<OrientedMatroid> {
        cocircuits.sort_unstable();
        cocircuits.dedup();
        let mut om = OrientedMatroid {
            n,
            r: 0,
            index: cocircuits.iter().enumerate().map(|(i, x)| (*x, i)).collect(),
            cocircuits,
            uniform: false,
            covectors: OnceLock::new(),
            flats: OnceLock::new(),
        };
        let computed = om.computed_rank();
        if let Some(hint) = rank_hint {
            if hint != computed {
                return Err(Error::RankMismatch { hint, computed });
            }
        }
        om.r = computed;
        om.uniform = computed >= 1 && om.cocircuits.iter().all(|x| x.zeros().len() == computed - 1);
        Ok(om)
    }

    fn computed_rank(&self) -> usize {
        if self.cocircuits.is_empty() {
            return 0;
        }
        let k = self.cocircuits[0].zeros().len();
        let same = self.cocircuits.iter().all(|x| x.zeros().len() == k);
        let loops = self.loops();
        // every k-subset is a zero set: the uniform matroid of rank k + 1
        if same && loops.is_empty() && self.cocircuits.len() as u64 == 2 * binomial(self.n, k) {
            return k + 1;
        }
        self.flat_lattice().total_rank()
    }

    fn flat_lattice(&self) -> &FlatLattice {
        self.flats.get_or_init(|| FlatLattice::new(self.n, &self.cocircuits))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    /// Cocircuits in canonical (string) order.
    pub fn cocircuits(&self) -> &[SignVector] {
        &self.cocircuits
    }

    pub fn cocircuit_index(&self, x: &SignVector) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    pub fn to_json(&self) -> MatroidJson {
        MatroidJson { n: self.n, r: self.r, cocircuits: self.cocircuits.clone() }
    }

    pub fn from_json(json: MatroidJson) -> Result<OrientedMatroid> {
        OrientedMatroid::build(json.cocircuits, json.n, Some(json.r))
    }

    /// Elements that are zero in every cocircuit.
    pub fn loops(&self) -> ElementSet {
        let support = self.cocircuits.iter().fold(ElementSet::EMPTY, |acc, x| acc.union(x.support()));
        ElementSet::full(self.n).difference(support)
    }

    /// Elements `e` for which `{e}` is the support of a cocircuit, i.e. the
    /// elements contained in every basis.
    pub fn coloops(&self) -> ElementSet {
        self.cocircuits.iter().filter(|x| x.support().len() == 1).map(|x| x.support()).fold(ElementSet::EMPTY, ElementSet::union)
    }

    /// Classes (of size at least two) of non-loop elements whose cocircuit
    /// columns agree or are opposite.
    pub fn parallel_classes(&self) -> Vec<ElementSet> {
        let loops = self.loops();
        let column = |e: usize| -> Vec<i8> { self.cocircuits.iter().map(|x| x.get(e).to_i8()).collect() };
        let mut classes: Vec<(Vec<i8>, ElementSet)> = Vec::new();
        for e in (0..self.n).filter(|&e| !loops.contains(e)) {
            let col = column(e);
            let neg: Vec<i8> = col.iter().map(|v| -v).collect();
            match classes.iter_mut().find(|(c, _)| *c == col || *c == neg) {
                Some((_, set)) => set.insert(e),
                None => classes.push((col, ElementSet::singleton(e))),
            }
        }
        classes.into_iter().map(|(_, s)| s).filter(|s| s.len() > 1).collect()
    }

    /// Delete loops and all but the smallest member of every parallel class.
    /// Returns the simplified matroid and the original labels it keeps.
    pub fn simplify(&self) -> Result<(OrientedMatroid, Vec<usize>)> {
        let mut drop = self.loops();
        for class in self.parallel_classes() {
            drop = drop.union(ElementSet(class.bits() & !(1u64 << class.first().unwrap_or(0))));
        }
        let kept: Vec<usize> = (0..self.n).filter(|&e| !drop.contains(e)).collect();
        Ok((self.delete(drop)?, kept))
    }

    /// Underlying-matroid rank of a set of elements.
    pub fn rank_of_set(&self, a: ElementSet) -> usize {
        if self.uniform {
            return a.len().min(self.r);
        }
        let lattice = self.flat_lattice();
        self.r - lattice.corank[&lattice.closure(a.bits())]
    }

    /// All covectors: the zero vector and every composition of cocircuits.
    pub fn covectors(&self) -> Result<&[SignVector]> {
        if self.n > COVECTOR_GUARD {
            return Err(Error::TooLarge(format!("covector enumeration needs n <= {COVECTOR_GUARD}, got {}", self.n)));
        }
        Ok(self.covectors.get_or_init(|| {
            let mut seen: HashSet<SignVector> = HashSet::new();
            let mut queue: VecDeque<SignVector> = VecDeque::new();
            let zero = SignVector::zero(self.n);
            seen.insert(zero);
            queue.push_back(zero);
            while let Some(z) = queue.pop_front() {
                for x in &self.cocircuits {
                    let c = z.compose_unchecked(x);
                    if seen.insert(c) {
                        queue.push_back(c);
                    }
                }
            }
            let mut all: Vec<SignVector> = seen.into_iter().collect();
            all.sort_unstable();
            all
        }))
    }

    /// Covectors of maximal support.
    pub fn topes(&self) -> Result<Vec<SignVector>> {
        let covectors = self.covectors()?;
        let max = covectors.iter().map(|x| x.support().len()).max().unwrap_or(0);
        Ok(covectors.iter().filter(|x| x.support().len() == max).copied().collect())
    }

    pub fn is_tope(&self, t: &SignVector) -> Result<bool> {
        let full = ElementSet::full(self.n).difference(self.loops());
        if t.len() != self.n || t.support() != full {
            return Ok(false);
        }
        Ok(self.covectors()?.binary_search(t).is_ok())
    }

    /// Cocircuits conformal to the tope `t`.
    pub fn tope_vertices(&self, t: &SignVector) -> Result<Vec<SignVector>> {
        if !self.is_tope(t)? {
            return Err(Error::NotATope(t.to_string()));
        }
        Ok(self.cocircuits.iter().filter(|x| x.conforms_unchecked(t)).copied().collect())
    }

    /// `r - rank(Z0)` for a covector `Z`.
    pub fn covector_rank(&self, z: &SignVector) -> Result<usize> {
        if z.len() != self.n || self.covectors()?.binary_search(z).is_err() {
            return Err(Error::NotACovector(z.to_string()));
        }
        Ok(self.covector_rank_unchecked(z))
    }

    pub(crate) fn covector_rank_unchecked(&self, z: &SignVector) -> usize {
        self.r - self.rank_of_set(z.zeros())
    }

    /// One less than the number of elements in a longest chain of covectors,
    /// which must equal the rank.
    pub fn check_rank(&self) -> Result<bool> {
        let covectors = self.covectors()?;
        let mut order: Vec<&SignVector> = covectors.iter().collect();
        order.sort_by_key(|x| x.support().len());
        let mut height: Vec<usize> = vec![0; order.len()];
        for i in 0..order.len() {
            for j in 0..i {
                if order[j] != order[i] && order[j].conforms_unchecked(order[i]) {
                    height[i] = height[i].max(height[j] + 1);
                }
            }
        }
        Ok(height.into_iter().max().unwrap_or(0) == self.r)
    }

    /// The colines of a uniform matroid: for every `(r-2)`-subset `S`, the
    /// cocircuits vanishing on `S` in the cyclic order of the cycle they
    /// induce in the cocircuit graph.
    pub fn colines(&self) -> Result<Vec<Coline>> {
        if !self.uniform {
            return Err(Error::NotUniform);
        }
        if self.r < 2 {
            return Ok(Vec::new());
        }
        let expected = 2 * (self.n - self.r + 2);
        let mut out = Vec::new();
        for s in crate::combi::lex_subsets(self.n, self.r - 2) {
            let s = ElementSet(s);
            let members: Vec<SignVector> = self.cocircuits.iter().filter(|x| s.is_subset(x.zeros())).copied().collect();
            let cycle = cycle_order(&members).ok_or_else(|| {
                Error::InvalidInput(format!("cocircuits vanishing on {s:?} do not form a cycle"))
            })?;
            if cycle.len() != expected {
                return Err(Error::InvalidInput(format!(
                    "coline on {s:?} has {} cocircuits, expected {expected}",
                    cycle.len()
                )));
            }
            out.push(Coline { zero_set: s, cycle });
        }
        Ok(out)
    }

    /// `M / A`: cocircuits vanishing on `A`, restricted to the other elements.
    pub fn contract(&self, a: ElementSet) -> Result<OrientedMatroid> {
        self.check_subset(a)?;
        let keep = ElementSet::full(self.n).difference(a);
        let cocircuits: Vec<SignVector> = self
            .cocircuits
            .iter()
            .filter(|x| a.is_subset(x.zeros()))
            .map(|x| x.restrict(keep))
            .collect::<Result<_>>()?;
        let rank = self.r - self.rank_of_set(a);
        OrientedMatroid::build(cocircuits, keep.len(), Some(rank))
    }

    /// `M \ A`: support-minimal nonzero restrictions of cocircuits.
    pub fn delete(&self, a: ElementSet) -> Result<OrientedMatroid> {
        self.check_subset(a)?;
        let keep = ElementSet::full(self.n).difference(a);
        let mut restricted: Vec<SignVector> =
            self.cocircuits.iter().map(|x| x.restrict(keep)).filter(|x| x.as_ref().map_or(true, |x| !x.is_zero())).collect::<Result<_>>()?;
        restricted.sort_unstable();
        restricted.dedup();
        let cocircuits = support_minimal(&restricted);
        let rank = self.rank_of_set(keep);
        OrientedMatroid::build(cocircuits, keep.len(), Some(rank))
    }

    fn check_subset(&self, a: ElementSet) -> Result<()> {
        if !a.is_subset(ElementSet::full(self.n)) {
            return Err(Error::InvalidInput(format!("{a:?} is not a subset of the {} elements", self.n)));
        }
        Ok(())
    }

    /// Check that the zero sets of the vertices of tope `t` form a
    /// `(r-1)`-dimensional abstract polytope: equal cardinality, every
    /// `(d-1)`-set in none or exactly two vertices, and face connectivity.
    pub fn check_abstract_polytope(&self, t: &SignVector) -> Result<bool> {
        if !self.uniform {
            return Err(Error::NotUniform);
        }
        let vertices = self.tope_vertices(t)?;
        let d = self.r - 1;
        let zero_sets: Vec<ElementSet> = vertices.iter().map(|x| x.zeros()).collect();
        if zero_sets.iter().any(|z| z.len() != d) {
            return Ok(false);
        }
        if d == 0 {
            return Ok(zero_sets.len() == 2);
        }
        let mut ridge_count: HashMap<u64, usize> = HashMap::new();
        for z in &zero_sets {
            for e in z.iter() {
                *ridge_count.entry(z.bits() & !(1u64 << e)).or_default() += 1;
            }
        }
        if ridge_count.values().any(|&c| c != 2) {
            return Ok(false);
        }
        let adjacent = |a: ElementSet, b: ElementSet| a != b && a.intersection(b).len() == d - 1;
        for (i, &x) in zero_sets.iter().enumerate() {
            for &y in &zero_sets[i + 1..] {
                let common = x.intersection(y);
                let allowed: Vec<ElementSet> = zero_sets.iter().copied().filter(|z| common.is_subset(*z)).collect();
                let mut seen = vec![false; allowed.len()];
                let start = allowed.iter().position(|&z| z == x).expect("x is allowed");
                seen[start] = true;
                let mut stack = vec![start];
                while let Some(i) = stack.pop() {
                    for j in 0..allowed.len() {
                        if !seen[j] && adjacent(allowed[i], allowed[j]) {
                            seen[j] = true;
                            stack.push(j);
                        }
                    }
                }
                if !allowed.iter().zip(&seen).any(|(&z, &s)| z == y && s) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// A coline: cocircuits vanishing on `zero_set`, in cyclic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coline {
    pub zero_set: ElementSet,
    pub cycle: Vec<SignVector>,
}

/// Order vectors that pairwise share a zero set into their cycle, where two
/// vectors are adjacent iff they are distinct and not separated.
pub(crate) fn cycle_order(members: &[SignVector]) -> Option<Vec<SignVector>> {
    let neighbors: Vec<Vec<usize>> = members
        .iter()
        .map(|x| {
            (0..members.len())
                .filter(|&j| members[j] != *x && x.separation_unchecked(&members[j]).is_empty())
                .collect()
        })
        .collect();
    if members.len() < 3 || neighbors.iter().any(|nb| nb.len() != 2) {
        return None;
    }
    let mut cycle = vec![0usize];
    let mut prev = 0usize;
    let mut cur = neighbors[0][0];
    while cur != 0 {
        cycle.push(cur);
        let next = if neighbors[cur][0] == prev { neighbors[cur][1] } else { neighbors[cur][0] };
        prev = cur;
        cur = next;
        if cycle.len() > members.len() {
            return None;
        }
    }
    (cycle.len() == members.len()).then(|| cycle.into_iter().map(|i| members[i]).collect())
}

/// Vectors whose support contains no other vector's support strictly.
pub(crate) fn support_minimal(vectors: &[SignVector]) -> Vec<SignVector> {
    vectors
        .iter()
        .filter(|x| {
            let s = x.support();
            !vectors.iter().any(|y| y.support() != s && y.support().is_subset(s))
        })
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chirotope::VectorConfiguration;

    fn sv(s: &str) -> SignVector {
        s.parse().unwrap()
    }

    fn svs(list: &[&str]) -> Vec<SignVector> {
        list.iter().map(|s| sv(s)).collect()
    }

    fn alt(n: usize, r: usize) -> OrientedMatroid {
        OrientedMatroid::from_chirotope(&Chirotope::alternating(n, r).unwrap()).unwrap()
    }

    fn from_vectors(v: Vec<Vec<i64>>) -> OrientedMatroid {
        let config = VectorConfiguration::new(v).unwrap();
        OrientedMatroid::build(config.cocircuits(), config.len(), None).unwrap()
    }

    #[test]
    fn build_alternating() {
        let m = alt(4, 3);
        assert_eq!((m.n(), m.rank(), m.cocircuits().len()), (4, 3, 12));
        assert!(m.is_uniform());
        let m2 = OrientedMatroid::build(m.cocircuits().to_vec(), 4, None).unwrap();
        assert_eq!(m2.rank(), 3);
        assert!(matches!(
            OrientedMatroid::build(m.cocircuits().to_vec(), 4, Some(2)),
            Err(Error::RankMismatch { hint: 2, computed: 3 })
        ));
    }

    #[test]
    fn axiom_failures() {
        let r = check_cocircuit_axioms(&svs(&["+0", "0+"]));
        assert!(!r.passed);
        assert!(r.violations.iter().all(|v| v.axiom == Axiom::CC1));
        let r = check_cocircuit_axioms(&svs(&["++", "--", "+0", "-0"]));
        assert!(r.violations.iter().any(|v| v.axiom == Axiom::CC2));
        let r = check_cocircuit_axioms(&svs(&["00", "+0", "-0"]));
        assert!(r.violations.iter().any(|v| v.axiom == Axiom::CC0));

        let mut broken = alt(4, 3).cocircuits().to_vec();
        broken.retain(|x| *x != sv("00++"));
        let r = check_cocircuit_axioms(&broken);
        assert!(r.violations.iter().any(|v| v.axiom == Axiom::CC1 && v.witnesses == vec![sv("00--")]));
        assert!(matches!(OrientedMatroid::build(broken, 4, None), Err(Error::AxiomViolation(_))));
    }

    #[test]
    fn cc3_violation_detected() {
        // two crossing lines plus a point missing from the elimination
        let r = check_cocircuit_axioms(&svs(&["+-", "-+", "++", "--"]));
        assert!(r.violations.iter().any(|v| v.axiom == Axiom::CC3));
        assert!(check_cocircuit_axioms(&svs(&["0+", "0-", "+0", "-0"])).passed);
    }

    #[test]
    fn structure_queries() {
        let m = alt(4, 3);
        assert!(m.loops().is_empty() && m.coloops().is_empty() && m.parallel_classes().is_empty());

        let par = from_vectors(vec![vec![1, 0], vec![0, 1], vec![2, 0]]);
        assert_eq!(par.parallel_classes(), vec![ElementSet::from_iter([0, 2])]);
        let (simple, kept) = par.simplify().unwrap();
        assert_eq!(kept, vec![0, 1]);
        assert_eq!((simple.n(), simple.rank()), (2, 2));

        let coord = OrientedMatroid::build(svs(&["0+", "0-", "+0", "-0"]), 2, None).unwrap();
        assert!(coord.coloops().bits() == 0b11 && coord.loops().is_empty());

        let one = OrientedMatroid::build(svs(&["+0", "-0"]), 2, None).unwrap();
        assert_eq!(one.rank(), 1);
        assert_eq!(one.loops(), ElementSet::singleton(1));
        assert_eq!(one.coloops(), ElementSet::singleton(0));
    }

    #[test]
    fn covectors_and_topes() {
        let coord = OrientedMatroid::build(svs(&["0+", "0-", "+0", "-0"]), 2, None).unwrap();
        assert_eq!(coord.covectors().unwrap().len(), 9);

        let m = alt(4, 3);
        let cov = m.covectors().unwrap();
        assert!(m.cocircuits().iter().all(|x| cov.contains(x)));
        assert!(cov.contains(&SignVector::zero(4)));
        assert_eq!(m.topes().unwrap().len(), 14);
        let mut v = m.tope_vertices(&sv("++++")).unwrap();
        v.sort();
        let mut expected = svs(&["00++", "0++0", "++00", "+00+"]);
        expected.sort();
        assert_eq!(v, expected);
        assert!(matches!(m.tope_vertices(&sv("+-+-")), Err(Error::NotATope(_))));
        assert!(m.check_rank().unwrap());
    }

    #[test]
    fn covector_ranks() {
        let m = alt(4, 3);
        assert_eq!(m.covector_rank(&sv("00++")).unwrap(), 1);
        assert_eq!(m.covector_rank(&sv("++++")).unwrap(), 3);
        assert_eq!(m.covector_rank(&sv("0+++")).unwrap(), 2);
        assert!(m.covector_rank(&sv("0+-+")).is_err());
    }

    #[test]
    fn colines_examples() {
        let m = alt(4, 3);
        let colines = m.colines().unwrap();
        assert_eq!(colines.len(), 4);
        assert!(colines.iter().all(|c| c.cycle.len() == 6));
        let m2 = alt(5, 2);
        let c2 = m2.colines().unwrap();
        assert_eq!((c2.len(), c2[0].cycle.len()), (1, 10));
        let m3 = alt(6, 3);
        let c3 = m3.colines().unwrap();
        assert_eq!(c3.len(), 6);
        assert!(c3.iter().all(|c| c.cycle.len() == 10));
    }

    #[test]
    fn minors() {
        let m = alt(4, 3);
        let c = m.contract(ElementSet::singleton(0)).unwrap();
        assert_eq!((c.n(), c.rank(), c.cocircuits().len()), (3, 2, 6));
        assert_eq!(c.colines().unwrap()[0].cycle.len(), 6);
        let d = m.delete(ElementSet::singleton(3)).unwrap();
        assert_eq!(d, alt(3, 3));
        assert_eq!(m.contract(ElementSet::EMPTY).unwrap(), m);
        assert_eq!(m.delete(ElementSet::EMPTY).unwrap(), m);
    }

    #[test]
    fn minors_match_covector_definition() {
        let m = from_vectors(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0], vec![1, -1, 2]]);
        let cov = m.covectors().unwrap().to_vec();
        for a in 0u64..32 {
            let a = ElementSet(a);
            let keep = ElementSet::full(5).difference(a);
            let restricted: Vec<SignVector> = cov.iter().map(|x| x.restrict(keep).unwrap()).filter(|x| !x.is_zero()).collect();
            let mut del = support_minimal(&restricted);
            del.sort();
            del.dedup();
            assert_eq!(m.delete(a).unwrap().cocircuits(), &del[..], "delete {a:?}");
            let zero_on_a: Vec<SignVector> = cov
                .iter()
                .filter(|x| a.is_subset(x.zeros()))
                .map(|x| x.restrict(keep).unwrap())
                .filter(|x| !x.is_zero())
                .collect();
            let mut con = support_minimal(&zero_on_a);
            con.sort();
            con.dedup();
            assert_eq!(m.contract(a).unwrap().cocircuits(), &con[..], "contract {a:?}");
        }
    }

    #[test]
    fn general_rank_from_flats() {
        let m = from_vectors(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0]]);
        assert_eq!(m.rank(), 3);
        assert!(!m.is_uniform());
        assert_eq!(m.rank_of_set(ElementSet::from_iter([0, 1, 3])), 2);
        assert_eq!(m.rank_of_set(ElementSet::from_iter([0, 2])), 2);
        assert!(m.check_rank().unwrap());
    }

    #[test]
    fn abstract_polytope_on_topes() {
        let m = alt(4, 3);
        assert!(m.check_abstract_polytope(&sv("++++")).unwrap());
        for t in m.topes().unwrap() {
            assert!(m.check_abstract_polytope(&t).unwrap());
        }
        let r2 = alt(4, 2);
        let t = r2.topes().unwrap()[0];
        assert_eq!(r2.tope_vertices(&t).unwrap().len(), 2);
        assert!(r2.check_abstract_polytope(&t).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let m = alt(5, 3);
        let text = serde_json::to_string(&m.to_json()).unwrap();
        let back = OrientedMatroid::from_json(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
