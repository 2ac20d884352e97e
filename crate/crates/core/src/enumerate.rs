//! Generation of uniform chirotopes up to relabeling, reorientation and
//! global sign: one representative per isomorphism class, in the text
//! format of the standard catalogues (one `+`/`-` string per line, bases in
//! lexicographic order).
//!
//! Classes on `n` elements are the uniform single-element extensions of the
//! classes on `n - 1` elements, deduplicated by a canonical form; ranks above
//! `n / 2` come from duality.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::chirotope::Chirotope;
use crate::combi::{binomial, colex_subsets, lex_rank, lex_subsets};
use crate::error::{Error, Result};
use crate::matroid::OrientedMatroid;
use crate::sign::{Sign, SignVector};

/// Largest ground set accepted by the canonical form.
pub const CANON_MAX_N: usize = 16;

/// Per-`(n, r)` tables for the canonical form.
#[derive(Clone, Debug)]
pub struct Canonicalizer {
    n: usize,
    r: usize,
    /// r-subsets of the new labels in colex order.
    colex: Vec<u64>,
    /// Label positions of each colex subset, ascending.
    members: Vec<Vec<u8>>,
    /// `block_end[d]` = number of subsets inside `{0..d-1}` = `C(d, r)`.
    block_end: Vec<usize>,
    /// For each colex index: `None` if its reorientation form is a pivot,
    /// else the colex indices of the pivots whose forms sum to it.
    deps: Vec<Option<Vec<u32>>>,
    /// Lexicographic position of each colex subset.
    lex_pos: Vec<usize>,
}

impl Canonicalizer {
    pub fn new(n: usize, r: usize) -> Result<Canonicalizer> {
        if n > CANON_MAX_N {
            return Err(Error::TooManyElements { n, max: CANON_MAX_N });
        }
        if r == 0 || r > n {
            return Err(Error::BadRank { n, r });
        }
        let colex: Vec<u64> = colex_subsets(n, r).collect();
        let members = colex.iter().map(|&m| (0..n as u8).filter(|&e| m >> e & 1 == 1).collect()).collect();
        let block_end = (0..=n).map(|d| binomial(d, r) as usize).collect();

        // Flipping element e toggles every subset containing it; the global
        // sign toggles all. A subset's value is free iff its form
        // g + sum_{e in B} s_e is independent of the earlier ones.
        let mut basis: Vec<(u64, u64)> = Vec::new(); // (reduced form, pivot ordinals)
        let mut pivots: Vec<u32> = Vec::new();
        let mut deps = Vec::with_capacity(colex.len());
        for (i, &m) in colex.iter().enumerate() {
            let mut form = 1 | m << 1;
            let mut combo = 0u64;
            for &(f, c) in &basis {
                let lead = 63 - f.leading_zeros();
                if form >> lead & 1 == 1 {
                    form ^= f;
                    combo ^= c;
                }
            }
            if form == 0 {
                deps.push(Some((0..pivots.len()).filter(|&k| combo >> k & 1 == 1).map(|k| pivots[k]).collect()));
            } else {
                combo ^= 1 << pivots.len();
                pivots.push(i as u32);
                basis.push((form, combo));
                basis.sort_unstable_by_key(|row| row.0.leading_zeros());
                deps.push(None);
            }
        }
        let lex_pos = colex.iter().map(|&m| lex_rank(m, n)).collect();
        Ok(Canonicalizer { n, r, colex, members, block_end, deps, lex_pos })
    }

    /// The lexicographically largest (`+` above `-`) chirotope string in the
    /// orbit of `chi`, among labelings compatible with an isomorphism-invariant
    /// ordered partition of the elements.
    pub fn canonical(&self, chi: &Chirotope) -> Result<Chirotope> {
        if chi.n() != self.n || chi.rank() != self.r {
            return Err(Error::BadRank { n: chi.n(), r: chi.rank() });
        }
        if !chi.is_uniform() {
            return Err(Error::NotUniform);
        }
        let mut val = vec![0i8; 1 << self.n];
        for (m, s) in lex_subsets(self.n, self.r).into_iter().zip(chi.values()) {
            val[m as usize] = s.to_i8();
        }
        let cells = element_partition(&val, self.n, self.r);
        let mut allowed = Vec::with_capacity(self.n);
        for cell in &cells {
            let mask = cell.iter().fold(0u64, |a, &e| a | 1 << e);
            allowed.extend(std::iter::repeat(mask).take(cell.len()));
        }
        let total = self.colex.len();
        let mut search = Search {
            ctx: self,
            val: &val,
            allowed,
            inv: vec![0; self.n],
            t: vec![0; total],
            c: vec![0; total],
            best: Vec::new(),
        };
        search.dfs(0, 0);
        let mut values = vec![Sign::Zero; total];
        for (i, &v) in search.best.iter().enumerate() {
            values[self.lex_pos[i]] = Sign::from_i64(v as i64);
        }
        Chirotope::new(self.n, self.r, values)
    }
}

struct Search<'a> {
    ctx: &'a Canonicalizer,
    val: &'a [i8],
    allowed: Vec<u64>,
    inv: Vec<usize>,
    t: Vec<i8>,
    c: Vec<i8>,
    best: Vec<i8>,
}

impl Search<'_> {
    fn dfs(&mut self, d: usize, used: u64) {
        let ctx = self.ctx;
        if d == ctx.n {
            if self.best.is_empty() || self.c > self.best {
                self.best.clone_from(&self.c);
            }
            return;
        }
        let (start, end) = (ctx.block_end[d], ctx.block_end[d + 1]);
        let mut choices = self.allowed[d] & !used;
        while choices != 0 {
            let e = choices.trailing_zeros() as usize;
            choices &= choices - 1;
            self.inv[d] = e;
            for i in start..end {
                let mut mask = 0u64;
                let mut odd = false;
                let labels = &ctx.members[i];
                for (k, &b) in labels.iter().enumerate() {
                    let o = self.inv[b as usize];
                    mask |= 1 << o;
                    for &b2 in &labels[k + 1..] {
                        odd ^= self.inv[b2 as usize] < o;
                    }
                }
                let t = self.val[mask as usize];
                self.t[i] = if odd { -t } else { t };
                self.c[i] = match &ctx.deps[i] {
                    None => 1,
                    Some(ps) => ps.iter().fold(self.t[i], |acc, &p| acc * self.t[p as usize]),
                };
            }
            if self.best.is_empty() || self.c[..end] >= self.best[..end] {
                self.dfs(d + 1, used | 1 << e);
            }
        }
    }
}

/// Whether basis `b` (a mask) spans a simplicial cell: every other element
/// `d` leaves the same cell of the arrangement of `b` uncut, i.e. the
/// circuits on `b + d`, normalized at `d`, agree on `b` up to sign.
fn is_mutation(val: &[i8], n: usize, b: u64) -> bool {
    let mut reference: Option<u64> = None;
    for d in (0..n).filter(|&d| b >> d & 1 == 0) {
        let support = b | 1 << d;
        // C_{c_i} = (-1)^i chi(support \ c_i); record the sign pattern on b
        // relative to C_d as a bitmask of elements where they differ
        let mut signs: [i8; 64] = [0; 64];
        let mut i = 0;
        for c in 0..n {
            if support >> c & 1 == 1 {
                let v = val[(support & !(1 << c)) as usize];
                signs[c] = if i % 2 == 0 { v } else { -v };
                i += 1;
            }
        }
        let mut pattern = 0u64;
        for c in 0..n {
            if b >> c & 1 == 1 && signs[c] != signs[d] {
                pattern |= 1 << c;
            }
        }
        // d avoids an antipodal pair of cells: compare up to sign
        if pattern & b & b.wrapping_neg() != 0 {
            pattern ^= b;
        }
        match reference {
            None => reference = Some(pattern),
            Some(p) if p != pattern => return false,
            _ => {}
        }
    }
    true
}

/// Ordered partition of the elements by colour refinement on the hypergraph
/// of mutations. Cells are sorted by colour, colours by their signatures, so
/// the result commutes with relabeling and is unchanged by reorientation.
fn element_partition(val: &[i8], n: usize, r: usize) -> Vec<Vec<usize>> {
    let mutations: Vec<u64> = colex_subsets(n, r).filter(|&b| is_mutation(val, n, b)).collect();
    let mut colour = vec![0usize; n];
    let mut classes = 1;
    loop {
        let signatures: Vec<(usize, Vec<Vec<usize>>)> = (0..n)
            .map(|e| {
                let mut around: Vec<Vec<usize>> = mutations
                    .iter()
                    .filter(|&&b| b >> e & 1 == 1)
                    .map(|&b| {
                        let mut cs: Vec<usize> = (0..n).filter(|&x| x != e && b >> x & 1 == 1).map(|x| colour[x]).collect();
                        cs.sort_unstable();
                        cs
                    })
                    .collect();
                around.sort_unstable();
                (colour[e], around)
            })
            .collect();
        let mut distinct: Vec<&(usize, Vec<Vec<usize>>)> = signatures.iter().collect();
        distinct.sort();
        distinct.dedup();
        let next: Vec<usize> = signatures.iter().map(|s| distinct.binary_search(&s).expect("present")).collect();
        let count = distinct.len();
        colour = next;
        if count == classes {
            break;
        }
        classes = count;
    }
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for e in 0..n {
        cells[colour[e]].push(e);
    }
    cells
}

pub fn canonical_form(chi: &Chirotope) -> Result<Chirotope> {
    Canonicalizer::new(chi.n(), chi.rank())?.canonical(chi)
}

/// Every uniform single-element extension of the uniform chirotope `chi`,
/// the new element appended last, up to reorienting it (its sign on the
/// first hyperplane is fixed).
///
/// A sign assignment on cocircuits extends iff on every coline it changes
/// sign at most once along half of the cycle.
pub fn uniform_extensions(chi: &Chirotope) -> Result<Vec<Chirotope>> {
    let (n, r) = (chi.n(), chi.rank());
    if !chi.is_uniform() {
        return Err(Error::NotUniform);
    }
    if n + 1 > CANON_MAX_N {
        return Err(Error::TooManyElements { n: n + 1, max: CANON_MAX_N });
    }
    let hyperplanes = lex_subsets(n, r - 1);
    let var_of: HashMap<u64, usize> = hyperplanes.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let reference: Vec<SignVector> = hyperplanes.iter().map(|&a| chi.hyperplane_cocircuit(a)).collect();

    // each constraint: half a coline, as (variable, orientation) pairs
    let mut constraints: Vec<Vec<(usize, i8)>> = Vec::new();
    if r >= 2 {
        let m = OrientedMatroid::from_chirotope(chi)?;
        for coline in m.colines()? {
            let half = coline.cycle.len() / 2;
            constraints.push(
                coline.cycle[..half]
                    .iter()
                    .map(|y| {
                        let v = var_of[&y.zeros().bits()];
                        (v, if *y == reference[v] { 1 } else { -1 })
                    })
                    .collect(),
            );
        }
    }
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); hyperplanes.len()];
    for (k, c) in constraints.iter().enumerate() {
        for &(v, _) in c {
            touching[v].push(k);
        }
    }

    let mut solutions = Vec::new();
    let mut assign = vec![0i8; hyperplanes.len()];
    assign[0] = 1;
    extend_search(1, &mut assign, &constraints, &touching, &mut solutions);

    let parity: i8 = if (r - 1) % 2 == 1 { -1 } else { 1 };
    let new_bases = lex_subsets(n + 1, r);
    Ok(solutions
        .into_iter()
        .map(|sigma| {
            let values = new_bases
                .iter()
                .map(|&b| {
                    if b >> n & 1 == 0 {
                        chi.value_of_mask(b)
                    } else {
                        Sign::from_i64((parity * sigma[var_of[&(b & !(1 << n))]]) as i64)
                    }
                })
                .collect();
            Chirotope::new(n + 1, r, values).expect("uniform extension")
        })
        .collect())
}

fn consistent(c: &[(usize, i8)], assign: &[i8]) -> bool {
    let mut last = 0i8;
    let mut changes = 0;
    for &(v, o) in c {
        let s = assign[v] * o;
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            changes += 1;
            if changes > 1 {
                return false;
            }
        }
        last = s;
    }
    true
}

fn extend_search(
    v: usize,
    assign: &mut Vec<i8>,
    constraints: &[Vec<(usize, i8)>],
    touching: &[Vec<usize>],
    out: &mut Vec<Vec<i8>>,
) {
    if v == assign.len() {
        out.push(assign.clone());
        return;
    }
    for s in [1i8, -1] {
        assign[v] = s;
        if touching[v].iter().all(|&k| consistent(&constraints[k], assign)) {
            extend_search(v + 1, assign, constraints, touching, out);
        }
    }
    assign[v] = 0;
}

/// One representative chirotope per isomorphism class of uniform oriented
/// matroids of rank `r` on `n` elements, sorted by string.
pub fn enumerate_classes(n: usize, r: usize) -> Result<Vec<Chirotope>> {
    Catalog::default().classes(n, r)
}

/// Memoized class lists, so that several `(n, r)` share their recursion.
#[derive(Default)]
pub struct Catalog {
    memo: HashMap<(usize, usize), Vec<Chirotope>>,
}

impl Catalog {
    pub fn classes(&mut self, n: usize, r: usize) -> Result<Vec<Chirotope>> {
        if let Some(v) = self.memo.get(&(n, r)) {
            return Ok(v.clone());
        }
        if r == 0 || r > n || n > CANON_MAX_N {
            return Err(Error::BadRank { n, r });
        }
        let classes = if r == n || r == 1 {
            vec![Chirotope::new(n, r, vec![Sign::Plus; binomial(n, r) as usize])?]
        } else if 2 * r > n {
            let canon = Canonicalizer::new(n, r)?;
            let duals = self.classes(n, n - r)?;
            dedup(duals.par_iter().map(|c| canon.canonical(&c.dual())).collect::<Result<Vec<_>>>()?)
        } else {
            let canon = Canonicalizer::new(n, r)?;
            let bases = self.classes(n - 1, r)?;
            let found: Vec<Vec<Chirotope>> = bases
                .par_iter()
                .map(|b| -> Result<Vec<Chirotope>> {
                    let mut seen = HashSet::new();
                    let mut out = Vec::new();
                    for ext in uniform_extensions(b)? {
                        let c = canon.canonical(&ext)?;
                        if seen.insert(c.values().to_vec()) {
                            out.push(c);
                        }
                    }
                    Ok(out)
                })
                .collect::<Result<_>>()?;
            dedup(found.into_iter().flatten().collect())
        };
        self.memo.insert((n, r), classes.clone());
        Ok(classes)
    }
}

fn dedup(mut v: Vec<Chirotope>) -> Vec<Chirotope> {
    v.sort_by_cached_key(|c| c.to_string());
    v.dedup_by(|a, b| a.values() == b.values());
    v
}

/// Write one chirotope string per line.
pub fn write_database<W: Write>(mut w: W, classes: &[Chirotope]) -> Result<()> {
    for c in classes {
        writeln!(w, "{c}")?;
    }
    Ok(())
}

/// Read a database stream: one chirotope string per line, blank lines and
/// `#` comments skipped. Each item carries its 1-based line number.
pub fn read_database<R: BufRead>(reader: R, n: usize, r: usize) -> impl Iterator<Item = (usize, Result<Chirotope>)> {
    reader.lines().enumerate().filter_map(move |(i, line)| {
        let line = match line {
            Ok(l) => l,
            Err(e) => return Some((i + 1, Err(Error::Io(e)))),
        };
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            return None;
        }
        Some((i + 1, Chirotope::parse(text, n, r)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::check_cocircuit_axioms;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};

    #[test]
    fn canonical_is_orbit_invariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for (n, r) in [(6, 3), (7, 3), (7, 4), (8, 3), (6, 2)] {
            let chi = Chirotope::alternating(n, r).unwrap();
            let canon = Canonicalizer::new(n, r).unwrap();
            let c0 = canon.canonical(&chi).unwrap();
            for _ in 0..20 {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                let mut other = chi.relabel(&perm).unwrap().reorient(rng.gen::<u64>() & ((1 << n) - 1));
                if rng.gen() {
                    other = other.negate();
                }
                assert_eq!(canon.canonical(&other).unwrap(), c0);
            }
        }
    }

    #[test]
    fn canonical_is_in_the_orbit() {
        let chi = Chirotope::alternating(6, 3).unwrap();
        let c = canonical_form(&chi).unwrap();
        // same class: the cocircuit graphs have the same size and the form is a valid OM
        let m = OrientedMatroid::from_chirotope(&c).unwrap();
        assert_eq!(m.cocircuits().len(), 30);
        assert_eq!(c.values()[0], Sign::Plus);
    }

    #[test]
    fn extensions_are_oriented_matroids() {
        for (n, r) in [(4, 3), (5, 3), (5, 2), (5, 4)] {
            let chi = Chirotope::alternating(n, r).unwrap();
            let exts = uniform_extensions(&chi).unwrap();
            assert!(!exts.is_empty());
            for e in &exts {
                let cocircuits = e.cocircuits().unwrap();
                assert!(check_cocircuit_axioms(&cocircuits).passed, "{e}");
                assert_eq!(&e.values()[..], &extend_prefix(&chi, e)[..]);
            }
        }
    }

    /// Values of `e` on bases avoiding the new element must equal `chi`.
    fn extend_prefix(chi: &Chirotope, e: &Chirotope) -> Vec<Sign> {
        let n = chi.n();
        lex_subsets(n + 1, chi.rank())
            .into_iter()
            .zip(e.values())
            .map(|(b, &v)| if b >> n & 1 == 0 { chi.value_of_mask(b) } else { v })
            .collect()
    }

    #[test]
    fn rank_two_extensions_count() {
        // a new point can go into any of the 2n gaps, up to its own reorientation: n choices
        for n in 2..7 {
            let chi = Chirotope::alternating(n, 2).unwrap();
            assert_eq!(uniform_extensions(&chi).unwrap().len(), n);
        }
    }

    #[test]
    fn small_class_counts() {
        let expected = [
            ((3, 2), 1),
            ((4, 2), 1),
            ((5, 2), 1),
            ((4, 3), 1),
            ((5, 3), 1),
            ((6, 3), 4),
            ((7, 3), 11),
            ((5, 4), 1),
            ((6, 4), 1),
            ((7, 4), 11),
            ((6, 5), 1),
            ((7, 5), 1),
            ((7, 6), 1),
            ((7, 7), 1),
        ];
        for ((n, r), count) in expected {
            assert_eq!(enumerate_classes(n, r).unwrap().len(), count, "({n},{r})");
        }
    }

    #[test]
    fn database_round_trip() {
        let classes = enumerate_classes(6, 3).unwrap();
        let mut buf = Vec::new();
        write_database(&mut buf, &classes).unwrap();
        let text = format!("# comment\n{}\n", String::from_utf8(buf).unwrap());
        let back: Vec<Chirotope> = read_database(text.as_bytes(), 6, 3).map(|(_, c)| c.unwrap()).collect();
        assert_eq!(back, classes);
        let bad: Vec<_> = read_database("+++\n".as_bytes(), 6, 3).collect();
        assert_eq!(bad[0].0, 1);
        assert!(bad[0].1.is_err());
    }
}
