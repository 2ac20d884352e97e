//! Signs, element sets and sign vectors.
//!
//! A [`SignVector`] over `n <= 64` elements is stored as two disjoint bit
//! masks, one for the positive entries and one for the negative entries.
//! Element `e` (0-based) lives in bit `e`. Every operation that the rest of
//! the crate leans on in its inner loops (separation, composition,
//! conformality) is a handful of word-wide bit operations.
//!
//! The textual form writes element 0 leftmost using the ASCII alphabet
//! `+`, `-`, `0`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest ground set a [`SignVector`] can hold.
pub const MAX_ELEMENTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

impl Sign {
    pub fn from_char(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            '0' => Some(Sign::Zero),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
            Sign::Zero => '0',
        }
    }

    pub fn from_i64(v: i64) -> Sign {
        match v.cmp(&0) {
            Ordering::Less => Sign::Minus,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Plus,
        }
    }

    pub fn to_i8(self) -> i8 {
        match self {
            Sign::Minus => -1,
            Sign::Zero => 0,
            Sign::Plus => 1,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }

    /// Product of two signs.
    pub fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Plus,
            _ => Sign::Minus,
        }
    }

    /// `self` if `odd` is false, `-self` otherwise.
    pub fn flip_if(self, odd: bool) -> Sign {
        if odd {
            -self
        } else {
            self
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
            Sign::Zero => Sign::Zero,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A subset of the ground set `{0, .., n-1}`, as a bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet(pub u64);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> ElementSet {
        ElementSet(low_mask(n))
    }

    pub fn singleton(e: usize) -> ElementSet {
        ElementSet(1u64 << e)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, e: usize) -> bool {
        e < 64 && self.0 >> e & 1 == 1
    }

    pub fn insert(&mut self, e: usize) {
        self.0 |= 1u64 << e;
    }

    pub fn remove(&mut self, e: usize) {
        self.0 &= !(1u64 << e);
    }

    pub fn union(self, other: ElementSet) -> ElementSet {
        ElementSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ElementSet) -> ElementSet {
        ElementSet(self.0 & other.0)
    }

    pub fn difference(self, other: ElementSet) -> ElementSet {
        ElementSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: ElementSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest element, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Elements in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let e = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(e)
            }
        })
    }
}

impl FromIterator<usize> for ElementSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = ElementSet::EMPTY;
        for e in iter {
            s.insert(e);
        }
        s
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// An assignment of signs to the elements `{0, .., n-1}`.
///
/// Ordering is lexicographic on the canonical string, with `'+' < '-' < '0'`
/// (their ASCII order), so sorting a vertex list by `Ord` matches sorting
/// by the rendered strings.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignVector {
    n: u8,
    plus: u64,
    minus: u64,
}

impl SignVector {
    pub fn zero(n: usize) -> SignVector {
        assert!(n <= MAX_ELEMENTS, "sign vectors hold at most {MAX_ELEMENTS} elements");
        SignVector { n: n as u8, plus: 0, minus: 0 }
    }

    /// Build from the positive and negative element sets.
    pub fn from_parts(n: usize, plus: ElementSet, minus: ElementSet) -> Result<SignVector> {
        if n > MAX_ELEMENTS {
            return Err(Error::TooManyElements { n, max: MAX_ELEMENTS });
        }
        let mask = low_mask(n);
        if plus.0 & minus.0 != 0 || (plus.0 | minus.0) & !mask != 0 {
            return Err(Error::InvalidInput(format!(
                "plus {plus:?} and minus {minus:?} must be disjoint subsets of {n} elements"
            )));
        }
        Ok(SignVector { n: n as u8, plus: plus.0, minus: minus.0 })
    }

    pub(crate) fn from_masks_unchecked(n: usize, plus: u64, minus: u64) -> SignVector {
        debug_assert!(plus & minus == 0);
        SignVector { n: n as u8, plus, minus }
    }

    pub fn from_signs(signs: &[Sign]) -> Result<SignVector> {
        if signs.len() > MAX_ELEMENTS {
            return Err(Error::TooManyElements { n: signs.len(), max: MAX_ELEMENTS });
        }
        let mut v = SignVector::zero(signs.len());
        for (e, &s) in signs.iter().enumerate() {
            v.set(e, s);
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, e: usize) -> Sign {
        debug_assert!(e < self.len());
        if self.plus >> e & 1 == 1 {
            Sign::Plus
        } else if self.minus >> e & 1 == 1 {
            Sign::Minus
        } else {
            Sign::Zero
        }
    }

    pub fn set(&mut self, e: usize, s: Sign) {
        assert!(e < self.len(), "element {e} out of range for length {}", self.n);
        let bit = 1u64 << e;
        self.plus &= !bit;
        self.minus &= !bit;
        match s {
            Sign::Plus => self.plus |= bit,
            Sign::Minus => self.minus |= bit,
            Sign::Zero => {}
        }
    }

    pub fn signs(&self) -> impl Iterator<Item = Sign> + '_ {
        (0..self.len()).map(move |e| self.get(e))
    }

    pub fn positive(&self) -> ElementSet {
        ElementSet(self.plus)
    }

    pub fn negative(&self) -> ElementSet {
        ElementSet(self.minus)
    }

    pub fn zeros(&self) -> ElementSet {
        ElementSet(low_mask(self.len()) & !(self.plus | self.minus))
    }

    pub fn support(&self) -> ElementSet {
        ElementSet(self.plus | self.minus)
    }

    pub fn is_zero(&self) -> bool {
        self.plus | self.minus == 0
    }

    pub fn negate(&self) -> SignVector {
        SignVector { n: self.n, plus: self.minus, minus: self.plus }
    }

    fn check_len(&self, other: &SignVector) -> Result<()> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { left: self.len(), right: other.len() });
        }
        Ok(())
    }

    /// Separation set `(X+ ∩ Y-) ∪ (X- ∩ Y+)`.
    pub fn separation(&self, other: &SignVector) -> Result<ElementSet> {
        self.check_len(other)?;
        Ok(self.separation_unchecked(other))
    }

    #[inline]
    pub(crate) fn separation_unchecked(&self, other: &SignVector) -> ElementSet {
        ElementSet((self.plus & other.minus) | (self.minus & other.plus))
    }

    /// Composition: the entries of `self` where nonzero, else those of `other`.
    pub fn compose(&self, other: &SignVector) -> Result<SignVector> {
        self.check_len(other)?;
        Ok(self.compose_unchecked(other))
    }

    #[inline]
    pub(crate) fn compose_unchecked(&self, other: &SignVector) -> SignVector {
        let free = !(self.plus | self.minus);
        SignVector {
            n: self.n,
            plus: self.plus | (other.plus & free),
            minus: self.minus | (other.minus & free),
        }
    }

    /// `self <= other` in the conformal order: `X+ ⊆ T+` and `X- ⊆ T-`.
    pub fn conforms(&self, other: &SignVector) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.conforms_unchecked(other))
    }

    #[inline]
    pub(crate) fn conforms_unchecked(&self, other: &SignVector) -> bool {
        self.plus & !other.plus == 0 && self.minus & !other.minus == 0
    }

    /// Project onto `keep`, re-indexing the kept elements in increasing order.
    pub fn restrict(&self, keep: ElementSet) -> Result<SignVector> {
        if !keep.is_subset(ElementSet::full(self.len())) {
            return Err(Error::InvalidInput(format!(
                "restriction set {keep:?} is not a subset of the {} elements",
                self.n
            )));
        }
        let mut out = SignVector::zero(keep.len());
        for (i, e) in keep.iter().enumerate() {
            out.set(i, self.get(e));
        }
        Ok(out)
    }

    /// Drop element `e`, shifting later elements down by one.
    pub fn delete_element(&self, e: usize) -> SignVector {
        assert!(e < self.len());
        let lo = low_mask(e);
        let squeeze = |m: u64| (m & lo) | ((m >> 1) & !lo);
        SignVector { n: self.n - 1, plus: squeeze(self.plus), minus: squeeze(self.minus) }
    }

    /// Insert a new element at position `e` carrying sign `s`, shifting later
    /// elements up by one.
    pub fn insert_element(&self, e: usize, s: Sign) -> SignVector {
        assert!(e <= self.len() && self.len() < MAX_ELEMENTS);
        let lo = low_mask(e);
        let spread = |m: u64| (m & lo) | ((m & !lo) << 1);
        let mut out = SignVector { n: self.n + 1, plus: spread(self.plus), minus: spread(self.minus) };
        out.set(e, s);
        out
    }

    /// The representative of `{X, -X}` whose first nonzero entry is `+`.
    pub fn canonical(&self) -> SignVector {
        if self.is_canonical() {
            *self
        } else {
            self.negate()
        }
    }

    /// True when the first nonzero entry is `+` (or the vector is zero).
    pub fn is_canonical(&self) -> bool {
        let s = self.plus | self.minus;
        s == 0 || self.plus & (s & s.wrapping_neg()) != 0
    }
}

impl Neg for SignVector {
    type Output = SignVector;

    fn neg(self) -> SignVector {
        self.negate()
    }
}

fn char_rank(v: &SignVector, e: usize) -> u8 {
    match v.get(e) {
        Sign::Plus => 0,
        Sign::Minus => 1,
        Sign::Zero => 2,
    }
}

impl Ord for SignVector {
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = (self.plus ^ other.plus) | (self.minus ^ other.minus);
        let common = self.n.min(other.n) as usize;
        let diff = diff & low_mask(common);
        if diff == 0 {
            return self.n.cmp(&other.n);
        }
        let e = diff.trailing_zeros() as usize;
        char_rank(self, e).cmp(&char_rank(other, e))
    }
}

impl PartialOrd for SignVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.signs().map(Sign::to_char).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignVector(\"{self}\")")
    }
}

impl FromStr for SignVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<SignVector> {
        let signs = s
            .chars()
            .enumerate()
            .map(|(i, c)| Sign::from_char(c).ok_or(Error::BadCharacter { position: i, found: c }))
            .collect::<Result<Vec<_>>>()?;
        SignVector::from_signs(&signs)
    }
}

impl Serialize for SignVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SignVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sv(s: &str) -> SignVector {
        s.parse().unwrap()
    }

    fn set(es: &[usize]) -> ElementSet {
        es.iter().copied().collect()
    }

    #[test]
    fn negate_examples() {
        assert_eq!(sv("00++").negate(), sv("00--"));
        assert_eq!(sv("0000").negate(), sv("0000"));
        assert_eq!(sv("+-0+").negate(), sv("-+0-"));
    }

    #[test]
    fn separation_examples() {
        assert_eq!(sv("00++").separation(&sv("0+0-")).unwrap(), set(&[3]));
        let x = sv("00++");
        assert_eq!(x.separation(&x.negate()).unwrap(), set(&[2, 3]));
        assert_eq!(x.separation(&x.negate()).unwrap(), x.support());
        assert!(sv("+0+0").separation(&sv("0+0+")).unwrap().is_empty());
        assert!(matches!(sv("+0").separation(&sv("+00")), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn compose_examples() {
        assert_eq!(sv("00++").compose(&sv("0+0-")).unwrap(), sv("0+++"));
        assert_eq!(sv("0000").compose(&sv("-+0+")).unwrap(), sv("-+0+"));
        assert_eq!(sv("+-00").compose(&sv("-+--")).unwrap(), sv("+---"));
        assert!(sv("+").compose(&sv("++")).is_err());
    }

    #[test]
    fn conforms_examples() {
        assert!(sv("00++").conforms(&sv("++++")).unwrap());
        assert!(!sv("00++").conforms(&sv("+++-")).unwrap());
        assert!(sv("0000").conforms(&sv("-+0-")).unwrap());
    }

    #[test]
    fn restrict_examples() {
        assert_eq!(sv("0-0+").restrict(set(&[1, 2, 3])).unwrap(), sv("-0+"));
        assert_eq!(sv("++++").restrict(ElementSet::EMPTY).unwrap().len(), 0);
        assert_eq!(sv("0-0+").restrict(set(&[0, 2])).unwrap(), sv("00"));
        assert!(sv("0-0+").restrict(set(&[4])).is_err());
    }

    #[test]
    fn insert_and_delete_element() {
        let x = sv("+-0+");
        assert_eq!(x.delete_element(1), sv("+0+"));
        assert_eq!(x.delete_element(1).insert_element(1, Sign::Minus), x);
        assert_eq!(x.insert_element(4, Sign::Zero), sv("+-0+0"));
        assert_eq!(x.insert_element(0, Sign::Plus), sv("++-0+"));
    }

    #[test]
    fn bad_character_rejected() {
        assert!(matches!("+x0".parse::<SignVector>(), Err(Error::BadCharacter { position: 1, found: 'x' })));
    }

    #[test]
    fn ordering_matches_string_order() {
        let mut v: Vec<SignVector> = ["0+-", "-0+", "+00", "00+", "+-0", "0-+"].iter().map(|s| sv(s)).collect();
        let mut strings: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        v.sort();
        strings.sort();
        assert_eq!(v.iter().map(|x| x.to_string()).collect::<Vec<_>>(), strings);
    }

    #[test]
    fn canonical_representative() {
        assert_eq!(sv("0-+").canonical(), sv("0+-"));
        assert_eq!(sv("0+-").canonical(), sv("0+-"));
        assert!(sv("000").is_canonical());
    }

    fn arb_vector(n: usize) -> impl Strategy<Value = SignVector> {
        proptest::collection::vec(prop_oneof![Just(Sign::Plus), Just(Sign::Minus), Just(Sign::Zero)], n)
            .prop_map(|s| SignVector::from_signs(&s).unwrap())
    }

    fn arb_triple() -> impl Strategy<Value = (SignVector, SignVector, SignVector)> {
        (0usize..12).prop_flat_map(|n| (arb_vector(n), arb_vector(n), arb_vector(n)))
    }

    proptest! {
        #[test]
        fn algebra_laws((x, y, z) in arb_triple()) {
            prop_assert_eq!(x.negate().negate(), x);
            let s = x.separation(&y).unwrap();
            prop_assert_eq!(s, y.separation(&x).unwrap());
            prop_assert_eq!(s, x.negate().separation(&y.negate()).unwrap());

            let xy = x.compose(&y).unwrap();
            prop_assert_eq!(xy.compose(&z).unwrap(), x.compose(&y.compose(&z).unwrap()).unwrap());
            prop_assert_eq!(x.compose(&x).unwrap(), x);
            prop_assert_eq!(xy.support(), x.support().union(y.support()));
            prop_assert!(x.conforms(&xy).unwrap());
            prop_assert_eq!(s.is_empty(), xy == y.compose(&x).unwrap());

            prop_assert!(x.positive().intersection(x.negative()).is_empty());
            prop_assert_eq!(x.positive().len() + x.negative().len() + x.zeros().len(), x.len());

            let parsed: SignVector = x.to_string().parse().unwrap();
            prop_assert_eq!(parsed, x);
        }
    }
}
