//! Exact integer linear algebra for the sign path: determinant signs and
//! one-dimensional kernels. No floating point anywhere.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::sign::Sign;

/// Sign of the determinant of a square integer matrix (rows given).
///
/// Fraction-free (Bareiss) elimination in `i128`; on overflow the same
/// elimination is redone with big integers.
pub fn det_sign(rows: &[Vec<i64>]) -> Sign {
    let n = rows.len();
    debug_assert!(rows.iter().all(|r| r.len() == n));
    if n == 0 {
        return Sign::Plus;
    }
    let m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    match bareiss_i128(m) {
        Some(s) => s,
        None => {
            let m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            bareiss_big(m)
        }
    }
}

fn bareiss_i128(mut m: Vec<Vec<i128>>) -> Option<Sign> {
    let n = m.len();
    let mut negate = false;
    let mut prev: i128 = 1;
    for k in 0..n {
        if m[k][k] == 0 {
            let swap = (k + 1..n).find(|&i| m[i][k] != 0)?;
            m.swap(k, swap);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = m[i][j].checked_mul(m[k][k])?;
                let b = m[i][k].checked_mul(m[k][j])?;
                m[i][j] = a.checked_sub(b)? / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    Some(Sign::from_i64(m[n - 1][n - 1].signum() as i64).flip_if(negate))
}

fn bareiss_big(mut m: Vec<Vec<BigInt>>) -> Sign {
    let n = m.len();
    let mut negate = false;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(swap) => {
                    m.swap(k, swap);
                    negate = !negate;
                }
                None => return Sign::Zero,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let last = &m[n - 1][n - 1];
    let s = if last.is_zero() {
        Sign::Zero
    } else if last.is_positive() {
        Sign::Plus
    } else {
        Sign::Minus
    };
    s.flip_if(negate)
}

/// Integer generator of the kernel of `rows` (each of length `cols`) when
/// that kernel is one-dimensional; `None` otherwise.
///
/// Row reduction over the integers (each step multiplies through rather
/// than dividing), then back substitution with a common denominator.
pub fn kernel_line(rows: &[Vec<i64>], cols: usize) -> Option<Vec<BigInt>> {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let a = m[row][col].clone();
                let b = m[i][col].clone();
                for j in 0..cols {
                    let v = &m[i][j] * &a - &m[row][j] * &b;
                    m[i][j] = v;
                }
                let g = m[i].iter().fold(BigInt::zero(), |g, x| num_integer_gcd(&g, x));
                if !g.is_zero() {
                    for x in m[i].iter_mut() {
                        *x = &*x / &g;
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    if pivots.len() + 1 != cols {
        return None;
    }
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    // x_free = prod of pivot entries; each pivot variable solves its row
    let denom = pivots.iter().enumerate().fold(BigInt::from(1), |acc, (i, &c)| acc * &m[i][c]);
    let mut x = vec![BigInt::zero(); cols];
    x[free] = denom.clone();
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = -(&m[i][free] * &denom) / &m[i][c];
    }
    let g = x.iter().fold(BigInt::zero(), |g, v| num_integer_gcd(&g, v));
    if !g.is_zero() {
        for v in x.iter_mut() {
            *v = &*v / &g;
        }
    }
    Some(x)
}

fn num_integer_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let t = &a % &b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cofactor_det(m: &[Vec<i64>]) -> i128 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect()).collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] as i128 * cofactor_det(&minor)
            })
            .sum()
    }

    #[test]
    fn vandermonde_positive() {
        // columns (1, t, t^2) for t = 0, 1, 2
        let rows = vec![vec![1, 1, 1], vec![0, 1, 2], vec![0, 1, 4]];
        assert_eq!(det_sign(&rows), Sign::Plus);
    }

    #[test]
    fn singular_is_zero() {
        let rows = vec![vec![1, 0, 1], vec![0, 1, 1], vec![0, 0, 0]];
        assert_eq!(det_sign(&rows), Sign::Zero);
        let rows = vec![vec![0, 0], vec![0, 5]];
        assert_eq!(det_sign(&rows), Sign::Zero);
    }

    #[test]
    fn matches_cofactor_expansion() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let n = rng.gen_range(1..6);
            let m: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect()).collect();
            assert_eq!(det_sign(&m), Sign::from_i64(cofactor_det(&m).signum() as i64), "{m:?}");
        }
    }

    #[test]
    fn overflow_falls_back_to_big_integers() {
        let big = 1i64 << 40;
        let m: Vec<Vec<i64>> = (0..6).map(|i| (0..6).map(|j| if i == j { big } else { (i * 7 + j) as i64 }).collect()).collect();
        assert_eq!(det_sign(&m), Sign::Plus);
    }

    #[test]
    fn kernel_of_plane() {
        let k = kernel_line(&[vec![1, 0, 0], vec![0, 1, 0]], 3).unwrap();
        assert!(k[0].is_zero() && k[1].is_zero() && !k[2].is_zero());
        let k = kernel_line(&[vec![1, 2, 3], vec![4, 5, 6]], 3).unwrap();
        let rows = [[1i64, 2, 3], [4, 5, 6]];
        for r in rows {
            let dot: BigInt = r.iter().zip(&k).map(|(&a, b)| BigInt::from(a) * b).sum();
            assert!(dot.is_zero());
        }
        assert!(kernel_line(&[vec![1, 2, 3], vec![2, 4, 6]], 3).is_none());
    }
}
