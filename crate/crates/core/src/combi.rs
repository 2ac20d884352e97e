//! Binomial coefficients and subset indexing.

use std::sync::OnceLock;

const TABLE: usize = 65;

fn table() -> &'static [[u64; TABLE]; TABLE] {
    static T: OnceLock<Box<[[u64; TABLE]; TABLE]>> = OnceLock::new();
    T.get_or_init(|| {
        let mut t = Box::new([[0u64; TABLE]; TABLE]);
        for n in 0..TABLE {
            t[n][0] = 1;
            for k in 1..=n {
                t[n][k] = t[n - 1][k - 1].saturating_add(if k < n { t[n - 1][k] } else { 0 });
            }
        }
        t
    })
}

/// `C(n, k)`, zero when `k > n`. Saturates at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n || n >= TABLE {
        if k > n {
            return 0;
        }
        let k = k.min(n - k);
        let mut acc: u128 = 1;
        for i in 0..k {
            acc = acc * (n - i) as u128 / (i + 1) as u128;
            if acc > u64::MAX as u128 {
                return u64::MAX;
            }
        }
        return acc as u64;
    }
    table()[n][k]
}

/// Position of the `k`-subset `mask` of `{0..n-1}` in the lexicographic
/// order of sorted `k`-subsets (for n = 4, k = 3: 012, 013, 023, 123).
///
/// Reflecting `e -> n-1-e` turns lexicographic order into reversed
/// colexicographic order, whose rank is `sum C(c_i, i+1)`.
#[inline]
pub fn lex_rank(mask: u64, n: usize) -> usize {
    let k = mask.count_ones() as usize;
    let t = table();
    let mut colex = 0u64;
    // reflected elements, listed in increasing order, come from the original
    // elements in decreasing order
    let mut bits = mask;
    let mut i = k;
    while bits != 0 {
        let e = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        i -= 1;
        colex += t[n - 1 - e][i + 1];
    }
    (t[n][k] - 1 - colex) as usize
}

/// Sorted `k`-subsets of `{0..n-1}` as bit masks, in lexicographic order.
pub fn lex_subsets(n: usize, k: usize) -> Vec<u64> {
    use itertools::Itertools;
    (0..n)
        .combinations(k)
        .map(|c| c.into_iter().fold(0u64, |m, e| m | 1 << e))
        .collect()
}

/// Iterate the `k`-subsets of `{0..n-1}` as masks in colexicographic order.
pub fn colex_subsets(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let limit = if n >= 64 { u64::MAX } else { 1u64 << n };
    let mut next = if k > n {
        None
    } else if k == 0 {
        Some(0u64)
    } else {
        Some((1u64 << k) - 1)
    };
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let nx = (((r ^ cur) >> 2) / c) | r;
            (r != 0 && nx < limit).then_some(nx)
        };
        Some(cur)
    })
}
