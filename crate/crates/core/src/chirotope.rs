//! Chirotopes (basis orientations), their text encoding, and the generation
//! of signed cocircuits and circuits from them.
//!
//! A chirotope of rank `r` on `n` elements stores one sign per sorted
//! `r`-subset of `{0..n-1}`, in lexicographic order of the subsets. That order
//! is also the on-disk format: the `k`-th character of a database line is the
//! sign of the `k`-th subset.

use std::fmt;
use std::io::Read;

use itertools::Itertools;
use num_traits::Signed;

use crate::combi::{binomial, lex_rank, lex_subsets};
use crate::error::{Error, Result};
use crate::exact::{det_sign, kernel_line};
use crate::sign::{low_mask, Sign, SignVector, MAX_ELEMENTS};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Chirotope {
    n: usize,
    r: usize,
    values: Vec<Sign>,
}

impl Chirotope {
    /// Build from the lexicographically ordered values.
    pub fn new(n: usize, r: usize, values: Vec<Sign>) -> Result<Chirotope> {
        if n > MAX_ELEMENTS {
            return Err(Error::TooManyElements { n, max: MAX_ELEMENTS });
        }
        if r > n {
            return Err(Error::BadRank { n, r });
        }
        let expected = binomial(n, r) as usize;
        if values.len() != expected {
            return Err(Error::BadLength { expected, found: values.len() });
        }
        if values.iter().all(|s| s.is_zero()) {
            return Err(Error::IdenticallyZero);
        }
        Ok(Chirotope { n, r, values })
    }

    /// Parse a database line: one of `+`, `-`, `0` per sorted `r`-subset.
    pub fn parse(text: &str, n: usize, r: usize) -> Result<Chirotope> {
        let values = text
            .trim_end_matches(['\r', '\n'])
            .chars()
            .enumerate()
            .map(|(i, c)| Sign::from_char(c).ok_or(Error::BadCharacter { position: i, found: c }))
            .collect::<Result<Vec<_>>>()?;
        Chirotope::new(n, r, values)
    }

    /// The alternating chirotope: every sorted basis positive. It is the
    /// chirotope of `n` points on the moment curve in rank `r`.
    pub fn alternating(n: usize, r: usize) -> Result<Chirotope> {
        Chirotope::new(n, r, vec![Sign::Plus; binomial(n, r) as usize])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn values(&self) -> &[Sign] {
        &self.values
    }

    pub fn is_uniform(&self) -> bool {
        self.values.iter().all(|s| !s.is_zero())
    }

    /// Value on a sorted subset given as a bit mask of exactly `r` elements.
    #[inline]
    pub fn value_of_mask(&self, mask: u64) -> Sign {
        debug_assert_eq!(mask.count_ones() as usize, self.r);
        self.values[lex_rank(mask, self.n)]
    }

    /// Alternating extension to arbitrary tuples: zero on a repeated element,
    /// otherwise the stored value times the sign of the sorting permutation.
    pub fn eval(&self, tuple: &[usize]) -> Result<Sign> {
        if tuple.len() != self.r {
            return Err(Error::BadLength { expected: self.r, found: tuple.len() });
        }
        let mut mask = 0u64;
        let mut odd = false;
        for &e in tuple {
            if e >= self.n {
                return Err(Error::ElementOutOfRange { element: e, n: self.n });
            }
            if mask >> e & 1 == 1 {
                return Ok(Sign::Zero);
            }
            // inversions contributed by e: earlier elements that are larger
            odd ^= (mask >> e).count_ones() % 2 == 1;
            mask |= 1 << e;
        }
        Ok(self.value_of_mask(mask).flip_if(odd))
    }

    /// `chi(i, a_1, .., a_{r-1})` for a sorted `(r-1)`-subset `a` not containing `i`.
    #[inline]
    fn eval_prefixed(&self, i: usize, a: u64) -> Sign {
        let odd = (a & low_mask(i)).count_ones() % 2 == 1;
        self.value_of_mask(a | 1 << i).flip_if(odd)
    }

    /// Signed cocircuits of a uniform chirotope: for every `(r-1)`-subset `A`
    /// the vector `X_i = chi(i, A)` and its negation. The result is sorted and
    /// has exactly `2 C(n, r-1)` members.
    pub fn cocircuits(&self) -> Result<Vec<SignVector>> {
        if !self.is_uniform() {
            return Err(Error::NotUniform);
        }
        Ok(self.cocircuits_unchecked())
    }

    pub(crate) fn cocircuits_unchecked(&self) -> Vec<SignVector> {
        if self.r == 0 {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(2 * binomial(self.n, self.r - 1) as usize);
        for a in crate::combi::colex_subsets(self.n, self.r - 1) {
            let x = self.hyperplane_cocircuit(a);
            if !x.is_zero() {
                out.push(x);
                out.push(x.negate());
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The vector `(chi(i, A))_i` for an `(r-1)`-subset `A`: zero on `A`, and
    /// when `A` is independent the signed cocircuit of the hyperplane it spans.
    pub fn hyperplane_cocircuit(&self, a: u64) -> SignVector {
        let mut plus = 0u64;
        let mut minus = 0u64;
        for i in 0..self.n {
            if a >> i & 1 == 1 {
                continue;
            }
            match self.eval_prefixed(i, a) {
                Sign::Plus => plus |= 1 << i,
                Sign::Minus => minus |= 1 << i,
                Sign::Zero => {}
            }
        }
        SignVector::from_masks_unchecked(self.n, plus, minus)
    }

    /// Cocircuits of an arbitrary (possibly non-uniform) chirotope: the
    /// nonzero vectors `(chi(i, A))_i` over independent `(r-1)`-subsets,
    /// deduplicated.
    pub fn cocircuits_general(&self) -> Vec<SignVector> {
        self.cocircuits_unchecked()
    }

    /// Signed circuits of a uniform chirotope: for every `(r+1)`-subset
    /// `b_1 < .. < b_{r+1}`, the vector with `C_{b_i} = (-1)^i chi(B \ b_i)`
    /// and its negation.
    pub fn circuits(&self) -> Result<Vec<SignVector>> {
        if !self.is_uniform() {
            return Err(Error::NotUniform);
        }
        let mut out = Vec::new();
        for b in lex_subsets(self.n, self.r + 1) {
            let mut c = SignVector::zero(self.n);
            let mut rest = b;
            let mut i = 1usize;
            while rest != 0 {
                let e = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                c.set(e, self.value_of_mask(b & !(1 << e)).flip_if(i % 2 == 1));
                i += 1;
            }
            let c = c.canonical();
            out.push(c);
            out.push(c.negate());
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Dual chirotope of rank `n - r`: `chi*(B') = chi(B) sgn(B', B)` with `B`
    /// the complement of `B'` and `(B', B)` read as a permutation of `0..n`.
    pub fn dual(&self) -> Chirotope {
        let full = low_mask(self.n);
        let values = lex_subsets(self.n, self.n - self.r)
            .into_iter()
            .map(|bp| {
                let b = full & !bp;
                // inversions of (B', B): pairs b' in B', b in B with b < b'
                let inversions: u32 = ElementBits(bp).map(|e| (b & low_mask(e)).count_ones()).sum();
                self.value_of_mask(b).flip_if(inversions % 2 == 1)
            })
            .collect();
        Chirotope { n: self.n, r: self.n - self.r, values }
    }

    /// Chirotope of a vector configuration by exact determinant signs.
    pub fn from_vectors(config: &VectorConfiguration) -> Result<Chirotope> {
        let n = config.len();
        let r = config.rank();
        let values = lex_subsets(n, r)
            .into_iter()
            .map(|m| {
                let cols: Vec<&Vec<i64>> = ElementBits(m).map(|e| &config.vectors[e]).collect();
                // det of the matrix with these columns = det of its transpose
                let rows: Vec<Vec<i64>> = cols.iter().map(|c| c.to_vec()).collect();
                det_sign(&rows)
            })
            .collect::<Vec<_>>();
        if values.iter().all(|s| s.is_zero()) {
            return Err(Error::RankDeficient);
        }
        Chirotope::new(n, r, values)
    }

    /// Relabel elements: element `perm[e]` of the result is element `e` here.
    pub fn relabel(&self, perm: &[usize]) -> Result<Chirotope> {
        if perm.len() != self.n || !perm.iter().all_unique() || perm.iter().any(|&p| p >= self.n) {
            return Err(Error::InvalidInput(format!("{perm:?} is not a permutation of 0..{}", self.n)));
        }
        let mut inverse = vec![0; self.n];
        for (e, &p) in perm.iter().enumerate() {
            inverse[p] = e;
        }
        let values = lex_subsets(self.n, self.r)
            .into_iter()
            .map(|m| {
                let tuple: Vec<usize> = ElementBits(m).map(|e| inverse[e]).collect();
                self.eval(&tuple).expect("in range")
            })
            .collect();
        Chirotope::new(self.n, self.r, values)
    }

    /// Reverse the orientation of every element in `flip`.
    pub fn reorient(&self, flip: u64) -> Chirotope {
        let values = lex_subsets(self.n, self.r)
            .into_iter()
            .zip(&self.values)
            .map(|(m, &s)| s.flip_if((m & flip).count_ones() % 2 == 1))
            .collect();
        Chirotope { n: self.n, r: self.r, values }
    }

    /// Global sign flip (same oriented matroid).
    pub fn negate(&self) -> Chirotope {
        Chirotope { n: self.n, r: self.r, values: self.values.iter().map(|&s| -s).collect() }
    }
}

impl fmt::Display for Chirotope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.values.iter().map(|s| s.to_char()).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Chirotope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chirotope(n={}, r={}, \"{self}\")", self.n, self.r)
    }
}

/// Bits of a mask in increasing order.
pub(crate) struct ElementBits(pub u64);

impl Iterator for ElementBits {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(e)
    }
}

/// `n` column vectors in `Z^r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorConfiguration {
    r: usize,
    vectors: Vec<Vec<i64>>,
}

impl VectorConfiguration {
    /// Vectors must share a dimension `r >= 1`, and some `r` of them must be
    /// linearly independent.
    pub fn new(vectors: Vec<Vec<i64>>) -> Result<VectorConfiguration> {
        let r = vectors.first().map(Vec::len).ok_or_else(|| Error::InvalidInput("empty vector configuration".into()))?;
        if r == 0 || vectors.iter().any(|v| v.len() != r) {
            return Err(Error::InvalidInput("vectors must share a positive dimension".into()));
        }
        if vectors.len() > MAX_ELEMENTS {
            return Err(Error::TooManyElements { n: vectors.len(), max: MAX_ELEMENTS });
        }
        if vectors.len() < r {
            return Err(Error::RankDeficient);
        }
        let config = VectorConfiguration { r, vectors };
        // full rank iff some maximal minor is nonzero; checked lazily by
        // from_vectors, but reject the obvious case early
        if !config.is_full_rank() {
            return Err(Error::RankDeficient);
        }
        Ok(config)
    }

    fn is_full_rank(&self) -> bool {
        lex_subsets(self.len(), self.r).into_iter().any(|m| {
            let rows: Vec<Vec<i64>> = ElementBits(m).map(|e| self.vectors[e].clone()).collect();
            !det_sign(&rows).is_zero()
        })
    }

    /// CSV: one column vector per line, integer entries.
    pub fn from_csv<R: Read>(reader: R) -> Result<VectorConfiguration> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .flexible(true)
            .from_reader(reader);
        let mut vectors = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let v = record
                .iter()
                .map(|f| f.parse::<i64>().map_err(|e| Error::InvalidInput(format!("bad integer {f:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            vectors.push(v);
        }
        VectorConfiguration::new(vectors)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn vectors(&self) -> &[Vec<i64>] {
        &self.vectors
    }

    /// Signed cocircuits computed directly from the vectors, without going
    /// through a chirotope: for every `(r-1)`-subset spanning a hyperplane,
    /// take an integer normal `c` and record `sign(c . v_i)`. Works for
    /// non-uniform configurations.
    pub fn cocircuits(&self) -> Vec<SignVector> {
        let n = self.len();
        let mut out = Vec::new();
        for a in lex_subsets(n, self.r - 1) {
            let rows: Vec<Vec<i64>> = ElementBits(a).map(|e| self.vectors[e].clone()).collect();
            let Some(normal) = kernel_line(&rows, self.r) else {
                continue;
            };
            let mut x = SignVector::zero(n);
            for (i, v) in self.vectors.iter().enumerate() {
                let dot: num_bigint::BigInt = v.iter().zip(&normal).map(|(&a, b)| num_bigint::BigInt::from(a) * b).sum();
                let s = if dot.is_positive() {
                    Sign::Plus
                } else if dot.is_negative() {
                    Sign::Minus
                } else {
                    Sign::Zero
                };
                x.set(i, s);
            }
            if !x.is_zero() {
                out.push(x.canonical());
                out.push(x.canonical().negate());
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}
