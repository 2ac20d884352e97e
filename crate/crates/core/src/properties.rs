//! Structural invariants every uniform oriented matroid must satisfy,
//! checked on one instance at a time.

use serde::{Deserialize, Serialize};

use crate::bounds::Analysis;
use crate::chirotope::Chirotope;
use crate::combi::binomial;
use crate::error::{Error, Result};
use crate::matroid::check_cocircuit_axioms;
use crate::sign::SignVector;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub instance: String,
    pub checks: usize,
    pub violations: Vec<String>,
}

impl InvariantReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    fn expect(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(msg());
        }
    }
}

/// Two sign vectors are orthogonal if their supports are disjoint or their
/// products take both signs.
pub fn orthogonal(c: &SignVector, d: &SignVector) -> bool {
    let agree = c.positive().intersection(d.positive()).union(c.negative().intersection(d.negative()));
    let differ = c.separation_unchecked(d);
    (agree.is_empty() && differ.is_empty()) || (!agree.is_empty() && !differ.is_empty())
}

/// Run the invariant suite on `chi` and its already-built analysis.
pub fn check_invariants(chi: &Chirotope, a: &Analysis<'_>, instance: &str) -> Result<InvariantReport> {
    let m = a.matroid();
    let g = a.graph();
    let (n, r) = (m.n(), m.rank());
    if r < 2 {
        return Err(Error::Precondition(format!("invariant suite needs rank at least 2, got {r}")));
    }
    let mut rep = InvariantReport { instance: instance.to_string(), ..Default::default() };

    let axioms = check_cocircuit_axioms(m.cocircuits());
    rep.expect(axioms.passed, || format!("cocircuit axioms: {axioms}"));

    let count = 2 * binomial(n, r - 1) as usize;
    rep.expect(m.cocircuits().len() == count, || format!("{} cocircuits, expected {count}", m.cocircuits().len()));

    let bad_degree = (0..g.vertex_count()).find(|&i| g.degree(i) != 2 * (r - 1));
    rep.expect(bad_degree.is_none(), || {
        let i = bad_degree.unwrap_or(0);
        format!("vertex {} has degree {}, expected {}", g.vertices()[i], g.degree(i), 2 * (r - 1))
    });

    match m.colines() {
        Ok(colines) => {
            let expected = if r >= 2 { binomial(n, r - 2) as usize } else { 0 };
            rep.expect(colines.len() == expected, || format!("{} colines, expected {expected}", colines.len()));
            let len = 2 * (n - r + 2);
            let bad = colines.iter().find(|c| c.cycle.len() != len);
            rep.expect(bad.is_none(), || {
                let c = bad.expect("set");
                format!("coline on zero set {:?} has {} cocircuits, expected {len}", c.zero_set, c.cycle.len())
            });
        }
        Err(e) => rep.expect(false, || format!("colines: {e}")),
    }

    let topes = m.topes()?.len();
    let expected_topes: u64 = 2 * (0..r).map(|i| binomial(n - 1, i)).sum::<u64>();
    rep.expect(topes as u64 == expected_topes, || format!("{topes} topes, expected {expected_topes}"));

    let bounds = a.check_pair_bounds(instance);
    rep.checks += bounds.pairs_checked;
    for w in bounds.witnesses.iter().take(16) {
        rep.violations.push(format!(
            "{}: d({}, {}) = {} against {:?}",
            w.reason.as_deref().unwrap_or("bound"),
            w.x,
            w.y,
            w.d,
            w.bound
        ));
    }

    let circuits = chi.circuits()?;
    let circuit_count = 2 * binomial(n, r + 1) as usize;
    rep.expect(circuits.len() == circuit_count, || format!("{} circuits, expected {circuit_count}", circuits.len()));
    let mut bad = None;
    'outer: for c in &circuits {
        for d in m.cocircuits() {
            if !orthogonal(c, d) {
                bad = Some((*c, *d));
                break 'outer;
            }
        }
    }
    rep.expect(bad.is_none(), || {
        let (c, d) = bad.expect("set");
        format!("circuit {c} not orthogonal to cocircuit {d}")
    });

    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::OrientedMatroid;

    #[test]
    fn orthogonality_examples() {
        let sv = |s: &str| s.parse::<SignVector>().unwrap();
        assert!(orthogonal(&sv("+-+-"), &sv("00++")));
        assert!(orthogonal(&sv("++00"), &sv("00++")));
        assert!(!orthogonal(&sv("++00"), &sv("+000")));
    }

    #[test]
    fn alternating_instances_pass() {
        for (n, r) in [(4, 3), (5, 2), (6, 3), (7, 4), (6, 6)] {
            let chi = Chirotope::alternating(n, r).unwrap();
            let m = OrientedMatroid::from_chirotope(&chi).unwrap();
            let a = Analysis::new(&m).unwrap();
            let rep = check_invariants(&chi, &a, "alt").unwrap();
            assert!(rep.holds(), "({n},{r}): {:?}", rep.violations);
        }
    }

    #[test]
    fn rank_one_rejected() {
        let chi = Chirotope::alternating(4, 1).unwrap();
        let m = OrientedMatroid::from_chirotope(&chi).unwrap();
        let a = Analysis::new(&m).unwrap();
        assert!(check_invariants(&chi, &a, "r1").is_err());
    }

    #[test]
    fn wrong_circuits_detected() {
        let chi = Chirotope::alternating(5, 3).unwrap();
        let other = chi.reorient(1);
        let m = OrientedMatroid::from_chirotope(&other).unwrap();
        let a = Analysis::new(&m).unwrap();
        let rep = check_invariants(&chi, &a, "mixed").unwrap();
        assert!(rep.violations.iter().any(|v| v.contains("orthogonal")));
    }
}
