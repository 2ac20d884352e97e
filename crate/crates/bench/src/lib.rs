//! Fixtures shared by the benchmarks.

use cocircuit_core::enumerate::Catalog;
use cocircuit_core::Chirotope;

/// A few non-alternating instances of the given size, from enumeration.
pub fn sample(n: usize, r: usize, k: usize) -> Vec<Chirotope> {
    let classes = Catalog::default().classes(n, r).expect("enumerable size");
    let step = (classes.len() / k.max(1)).max(1);
    classes.into_iter().step_by(step).take(k).collect()
}
