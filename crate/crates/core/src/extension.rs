//! Single-element extensions through localizations, and local perturbation
//! of degenerate cocircuits.

use serde::{Deserialize, Serialize};

use crate::combi::lex_subsets;
use crate::error::{Error, Result};
use crate::graph::CocircuitGraph;
use crate::matroid::OrientedMatroid;
use crate::sign::{ElementSet, Sign, SignVector};

/// A sign on every cocircuit of `base`, aligned with `base.cocircuits()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Localization {
    base: OrientedMatroid,
    values: Vec<Sign>,
}

impl Localization {
    /// Checks `sigma(-Y) = -sigma(Y)`.
    pub fn new(base: OrientedMatroid, values: Vec<Sign>) -> Result<Localization> {
        if values.len() != base.cocircuits().len() {
            return Err(Error::BadLength { expected: base.cocircuits().len(), found: values.len() });
        }
        for (i, y) in base.cocircuits().iter().enumerate() {
            let j = base.cocircuit_index(&y.negate()).expect("cocircuit set is symmetric");
            if values[j] != -values[i] {
                return Err(Error::Precondition(format!("localization is not antisymmetric at {y}")));
            }
        }
        Ok(Localization { base, values })
    }

    pub fn from_fn(base: OrientedMatroid, f: impl Fn(&SignVector) -> Sign) -> Result<Localization> {
        let values = base.cocircuits().iter().map(f).collect();
        Localization::new(base, values)
    }

    pub fn base(&self) -> &OrientedMatroid {
        &self.base
    }

    pub fn values(&self) -> &[Sign] {
        &self.values
    }

    pub fn get(&self, y: &SignVector) -> Option<Sign> {
        self.base.cocircuit_index(y).map(|i| self.values[i])
    }

    /// Set `sigma(y) = s` and `sigma(-y) = -s`.
    pub fn set(&mut self, y: &SignVector, s: Sign) -> Result<()> {
        let i = self.base.cocircuit_index(y).ok_or_else(|| Error::VertexNotFound(y.to_string()))?;
        let j = self.base.cocircuit_index(&y.negate()).expect("cocircuit set is symmetric");
        self.values[i] = s;
        self.values[j] = -s;
        Ok(())
    }
}

/// `M \ f` together with the localization `sigma_f` describing how `f`
/// extends it back to `M`.
pub fn localization_of_deletion(m: &OrientedMatroid, f: usize) -> Result<Localization> {
    if f >= m.n() {
        return Err(Error::ElementOutOfRange { element: f, n: m.n() });
    }
    if m.coloops().contains(f) {
        return Err(Error::Precondition(format!("element {f} is a coloop")));
    }
    let base = m.delete(ElementSet::singleton(f))?;
    let keep = ElementSet::full(m.n()).difference(ElementSet::singleton(f));
    let mut values = vec![None; base.cocircuits().len()];
    for x in m.cocircuits() {
        let y = x.restrict(keep)?;
        if let Some(i) = base.cocircuit_index(&y) {
            let s = x.get(f);
            match values[i] {
                None => values[i] = Some(s),
                Some(t) if t != s => {
                    return Err(Error::InvalidInput(format!("cocircuit {y} of the deletion lifts ambiguously")));
                }
                _ => {}
            }
        }
    }
    let values = values
        .into_iter()
        .zip(base.cocircuits())
        .map(|(v, y)| v.ok_or_else(|| Error::InvalidInput(format!("cocircuit {y} of the deletion has no lift"))))
        .collect::<Result<Vec<Sign>>>()?;
    Localization::new(base, values)
}

/// The single-element extension determined by `sigma`, with the new element
/// appended last.
pub fn extend(sigma: &Localization) -> Result<OrientedMatroid> {
    extend_at(sigma, sigma.base.n())
}

/// As [`extend`], with the new element inserted at index `pos`.
pub fn extend_at(sigma: &Localization, pos: usize) -> Result<OrientedMatroid> {
    let base = &sigma.base;
    if pos > base.n() {
        return Err(Error::ElementOutOfRange { element: pos, n: base.n() + 1 });
    }
    let cocircuits = base.cocircuits();
    let mut out: Vec<SignVector> = cocircuits.iter().zip(&sigma.values).map(|(y, &s)| y.insert_element(pos, s)).collect();
    for (i, y1) in cocircuits.iter().enumerate() {
        if sigma.values[i] != Sign::Plus {
            continue;
        }
        for (j, y2) in cocircuits.iter().enumerate() {
            if sigma.values[j] != Sign::Minus || !y1.separation_unchecked(y2).is_empty() {
                continue;
            }
            let z = y1.compose_unchecked(y2);
            if base.covector_rank_unchecked(&z) == 2 {
                out.push(z.insert_element(pos, Sign::Zero));
            }
        }
    }
    match OrientedMatroid::build(out, base.n() + 1, Some(base.rank())) {
        Ok(m) => Ok(m),
        Err(Error::AxiomViolation(report)) => Err(Error::InvalidExtension(report.to_string())),
        Err(Error::RankMismatch { hint, computed }) => {
            Err(Error::InvalidExtension(format!("rank changed from {hint} to {computed}")))
        }
        Err(e) => Err(e),
    }
}

/// Which side of the perturbed element the degenerate cocircuit is pushed to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    #[default]
    Plus,
    Minus,
}

impl Side {
    fn sign(self) -> Sign {
        match self {
            Side::Plus => Sign::Plus,
            Side::Minus => Sign::Minus,
        }
    }
}

pub fn is_degenerate(m: &OrientedMatroid, w: &SignVector) -> bool {
    m.rank() >= 1 && w.zeros().len() > m.rank() - 1
}

/// `sum over cocircuits W of max(0, |W0| - (r - 1))`.
pub fn degeneracy(m: &OrientedMatroid) -> usize {
    let base = m.rank().saturating_sub(1);
    m.cocircuits().iter().map(|w| w.zeros().len().saturating_sub(base)).sum()
}

/// Local perturbation of `m` at the degenerate cocircuit `w` through element
/// `f` in `W0`: the localization of `m \ f` with `sigma(W') = side` and
/// `sigma(-W') = -side`, `W'` the restriction of `w`. Labels are preserved.
///
/// This is an extension only when no coline through `W'` is entirely zero
/// under `sigma_f` (see [`local_perturbation_applies`]); otherwise the
/// result fails validation with [`Error::InvalidExtension`].
pub fn local_perturbation(m: &OrientedMatroid, w: &SignVector, f: usize, side: Side) -> Result<OrientedMatroid> {
    check_perturbation_input(m, w, f)?;
    let mut sigma = localization_of_deletion(m, f)?;
    let keep = ElementSet::full(m.n()).difference(ElementSet::singleton(f));
    let wbar = w.restrict(keep)?;
    sigma.set(&wbar, side.sign())?;
    extend_at(&sigma, f)
}

fn check_perturbation_input(m: &OrientedMatroid, w: &SignVector, f: usize) -> Result<()> {
    if m.cocircuit_index(w).is_none() {
        return Err(Error::VertexNotFound(w.to_string()));
    }
    if !is_degenerate(m, w) {
        return Err(Error::Precondition(format!("{w} is not degenerate")));
    }
    if f >= m.n() || !w.zeros().contains(f) {
        return Err(Error::Precondition(format!("element {f} is not a zero of {w}")));
    }
    if !spans_without(m, w, f) {
        return Err(Error::Precondition(format!("{w} restricted away from {f} is not a cocircuit of the deletion")));
    }
    Ok(())
}

/// `W0 \ f` still spans the hyperplane, i.e. `f` lies on a circuit inside
/// `W0`. Then `f` is no coloop and `W` restricts to a cocircuit of `m \ f`.
fn spans_without(m: &OrientedMatroid, w: &SignVector, f: usize) -> bool {
    let mut rest = w.zeros();
    rest.remove(f);
    m.rank_of_set(rest) + 1 == m.rank()
}

/// Whether [`local_perturbation`] at `(w, f)` yields an oriented matroid.
///
/// On a coline the only localization with more than one antipodal pair of
/// zeros is the zero one, and resetting a single pair breaks it. So the
/// perturbation applies iff no other cocircuit `U` with `U(f) = 0` meets
/// `w` in a flat of rank `r - 2` away from `f`.
pub fn local_perturbation_applies(m: &OrientedMatroid, w: &SignVector, f: usize) -> bool {
    let r = m.rank();
    if !is_degenerate(m, w) || !w.zeros().contains(f) || !spans_without(m, w, f) {
        return false;
    }
    let neg = w.negate();
    m.cocircuits().iter().all(|u| {
        if u.get(f) != Sign::Zero || u == w || *u == neg {
            return true;
        }
        let mut common = u.zeros().intersection(w.zeros());
        common.remove(f);
        m.rank_of_set(common) + 2 != r
    })
}

/// Generic perturbation of `f`: the lexicographic extension
/// `[f^+, a_1^s, a_2^s, ..]` of `m` over all other elements in index order,
/// with `f` then deleted and the new element put in its place. Cocircuits
/// with `f` nonzero keep their sign; the rest take `s` times their first
/// nonzero entry, with `s` chosen so that `w` lands on `side`.
///
/// Used when `f` lies in a degenerate flat of rank below `r - 1`, which no
/// single-cocircuit change can resolve.
pub fn lexicographic_perturbation(m: &OrientedMatroid, w: &SignVector, f: usize, side: Side) -> Result<OrientedMatroid> {
    check_perturbation_input(m, w, f)?;
    let sigma = localization_of_deletion(m, f)?;
    let keep = ElementSet::full(m.n()).difference(ElementSet::singleton(f));
    let first = |y: &SignVector| (0..y.len()).map(|i| y.get(i)).find(|s| !s.is_zero()).unwrap_or(Sign::Zero);
    let flip = first(&w.restrict(keep)?) != side.sign();
    let base = sigma.base().clone();
    let values = base
        .cocircuits()
        .iter()
        .zip(sigma.values())
        .map(|(y, &v)| if v.is_zero() { first(y).flip_if(flip) } else { v })
        .collect();
    extend_at(&Localization::new(base, values)?, f)
}

/// Number of `r`-subsets that are not bases; zero exactly for uniform
/// matroids.
pub fn non_bases(m: &OrientedMatroid) -> usize {
    if m.is_uniform() {
        return 0;
    }
    let r = m.rank();
    lex_subsets(m.n(), r).into_iter().filter(|&a| m.rank_of_set(ElementSet(a)) < r).count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Local,
    Lexicographic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationStep {
    pub kind: StepKind,
    pub cocircuit: SignVector,
    pub element: usize,
    pub diameter_before: u32,
    pub diameter_after: u32,
    pub degeneracy_before: usize,
    pub degeneracy_after: usize,
    pub non_bases_before: usize,
    pub non_bases_after: usize,
}

#[derive(Clone, Debug)]
pub struct Perturbation {
    pub result: OrientedMatroid,
    pub steps: Vec<PerturbationStep>,
}

/// Repeatedly perturb until the result is uniform. Each step takes the
/// first degenerate cocircuit `W` (string order) and zero `f` (ascending)
/// with `f` on a circuit inside `W0`, at which [`local_perturbation`] applies; if there is none, the first
/// pair is perturbed lexicographically instead. After every step the
/// diameter must not have dropped and the number of non-bases must have
/// dropped.
pub fn perturb_to_uniform(m: &OrientedMatroid, side: Side) -> Result<Perturbation> {
    let mut current = m.clone();
    let mut steps = Vec::new();
    let mut diameter = CocircuitGraph::new(&current).diameter().diameter;
    let mut dependent = non_bases(&current);
    while dependent > 0 {
        let candidates: Vec<(SignVector, usize)> = current
            .cocircuits()
            .iter()
            .filter(|w| is_degenerate(&current, w))
            .flat_map(|w| w.zeros().iter().map(move |f| (*w, f)))
            .filter(|(w, f)| spans_without(&current, w, *f))
            .collect();
        let Some(&fallback) = candidates.first() else {
            return Err(Error::Precondition("no degenerate cocircuit has a dependent zero".into()));
        };
        let (kind, (w, f)) = match candidates.iter().find(|(w, f)| local_perturbation_applies(&current, w, *f)) {
            Some(&pair) => (StepKind::Local, pair),
            None => (StepKind::Lexicographic, fallback),
        };
        let next = match kind {
            StepKind::Local => local_perturbation(&current, &w, f, side)?,
            StepKind::Lexicographic => lexicographic_perturbation(&current, &w, f, side)?,
        };
        let next_dependent = non_bases(&next);
        let next_diameter = CocircuitGraph::new(&next).diameter().diameter;
        if next_diameter < diameter {
            return Err(Error::MonotonicityViolated { before: diameter, after: next_diameter });
        }
        if next_dependent >= dependent {
            return Err(Error::InvalidExtension(format!(
                "non-bases did not decrease ({dependent} -> {next_dependent}) perturbing {w} at {f}"
            )));
        }
        steps.push(PerturbationStep {
            kind,
            cocircuit: w,
            element: f,
            diameter_before: diameter,
            diameter_after: next_diameter,
            degeneracy_before: degeneracy(&current),
            degeneracy_after: degeneracy(&next),
            non_bases_before: dependent,
            non_bases_after: next_dependent,
        });
        diameter = next_diameter;
        dependent = next_dependent;
        current = next;
    }
    Ok(Perturbation { result: current, steps })
}
