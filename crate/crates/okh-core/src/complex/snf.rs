//! Smith normal form and integer linear solving over arbitrary-precision
//! integers. Dense, with smallest-magnitude pivoting to keep entry growth
//! in check; intended for the modest block sizes left after chain reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal, the diagonal
/// entries positive and each dividing the next.
pub struct Snf {
    pub rows: usize,
    pub cols: usize,
    /// Nonzero diagonal entries, length = rank.
    pub diag: Vec<BigInt>,
    pub left: Vec<Vec<BigInt>>,
    pub right: Vec<Vec<BigInt>>,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// Rank after reduction mod a prime.
    pub fn rank_mod(&self, p: u32) -> usize {
        let p = BigInt::from(p);
        self.diag.iter().filter(|d| !(*d % &p).is_zero()).count()
    }

    /// Diagonal entries exceeding one, i.e. the torsion of the cokernel.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diag.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    /// Basis of the integer kernel of `A`: the trailing columns of `V`.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        (self.rank()..self.cols)
            .map(|j| (0..self.cols).map(|i| self.right[i][j].clone()).collect())
            .collect()
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

/// Computes the Smith normal form of `a` (consumed).
pub fn smith(mut a: Vec<Vec<BigInt>>, cols: usize) -> Snf {
    let rows = a.len();
    debug_assert!(a.iter().all(|r| r.len() == cols));
    let mut left = identity(rows);
    let mut right = identity(cols);
    let mut t = 0usize;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j].is_zero() {
                    continue;
                }
                if pivot
                    .map(|(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                    .unwrap_or(true)
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        left.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut right, t, pj);

        // clear the pivot row and column by rounded division; repeat until
        // clean, since remainders can reappear
        let mut dirty = true;
        while dirty {
            dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = rounded_div(&a[i][t], &a[t][t]);
                if !q.is_zero() {
                    row_sub(&mut a, i, t, &q);
                    row_sub(&mut left, i, t, &q);
                }
                if !a[i][t].is_zero() {
                    // remainder smaller than pivot: promote it
                    a.swap(t, i);
                    left.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = rounded_div(&a[t][j], &a[t][t]);
                if !q.is_zero() {
                    col_sub(&mut a, j, t, &q);
                    col_sub(&mut right, j, t, &q);
                }
                if !a[t][j].is_zero() {
                    swap_cols(&mut a, t, j);
                    swap_cols(&mut right, t, j);
                    dirty = true;
                }
            }
        }

        // force divisibility into the remaining block
        let mut fixed = true;
        'divis: for i in t + 1..rows {
            for j in t + 1..cols {
                if !(&a[i][j] % &a[t][t]).is_zero() {
                    // fold the offending row in and redo this pivot
                    let one = BigInt::from(-1);
                    row_sub(&mut a, t, i, &one);
                    row_sub(&mut left, t, i, &one);
                    fixed = false;
                    break 'divis;
                }
            }
        }
        if fixed {
            if a[t][t].is_negative() {
                negate_row(&mut a, t);
                negate_row(&mut left, t);
            }
            t += 1;
        }
    }
    let diag = (0..t).map(|i| a[i][i].clone()).collect();
    Snf {
        rows,
        cols,
        diag,
        left,
        right,
    }
}

/// One integral solution of `A x = b`, or `None` when none exists.
/// `snf` must come from `smith(A)`.
pub fn solve(snf: &Snf, b: &[BigInt]) -> Option<Vec<BigInt>> {
    debug_assert_eq!(b.len(), snf.rows);
    // c = U b; need diag[i] | c[i] and c zero past the rank
    let mut y = vec![BigInt::zero(); snf.cols];
    for i in 0..snf.rows {
        let mut c = BigInt::zero();
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() && !snf.left[i][j].is_zero() {
                c += &snf.left[i][j] * bj;
            }
        }
        if i < snf.diag.len() {
            let (q, r) = c.div_rem(&snf.diag[i]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !c.is_zero() {
            return None;
        }
    }
    // x = V y
    let x = (0..snf.cols)
        .map(|i| {
            let mut s = BigInt::zero();
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() {
                    s += &snf.right[i][j] * yj;
                }
            }
            s
        })
        .collect();
    Some(x)
}

/// Division rounding to nearest, which keeps remainders at most half the
/// divisor and so tames coefficient growth.
fn rounded_div(n: &BigInt, d: &BigInt) -> BigInt {
    let (mut q, r) = n.div_rem(d);
    if r.abs() * 2 > d.abs() {
        if (r.is_negative()) == (d.is_negative()) {
            q += 1;
        } else {
            q -= 1;
        }
    }
    q
}

fn row_sub(a: &mut [Vec<BigInt>], i: usize, t: usize, q: &BigInt) {
    let (src, dst) = if t < i {
        let (lo, hi) = a.split_at_mut(i);
        (&lo[t], &mut hi[0])
    } else {
        let (lo, hi) = a.split_at_mut(t);
        (&hi[0], &mut lo[i])
    };
    for (d, s) in dst.iter_mut().zip(src.iter()) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

fn col_sub(a: &mut [Vec<BigInt>], j: usize, t: usize, q: &BigInt) {
    for row in a.iter_mut() {
        if !row[t].is_zero() {
            let sub = q * &row[t];
            row[j] -= sub;
        }
    }
}

fn swap_cols(a: &mut [Vec<BigInt>], i: usize, j: usize) {
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

fn negate_row(a: &mut [Vec<BigInt>], i: usize) {
    for v in a[i].iter_mut() {
        let neg = -std::mem::take(v);
        *v = neg;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn to_big(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
        m.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    fn check_transforms(orig: &[Vec<BigInt>], s: &Snf) {
        // U * A * V must be diagonal with the reported entries
        for i in 0..s.rows {
            for j in 0..s.cols {
                let mut v = BigInt::zero();
                for k in 0..s.rows {
                    for l in 0..s.cols {
                        if !s.left[i][k].is_zero() && !orig[k][l].is_zero() {
                            v += &s.left[i][k] * &orig[k][l] * &s.right[l][j];
                        }
                    }
                }
                let want = if i == j && i < s.diag.len() {
                    s.diag[i].clone()
                } else {
                    BigInt::zero()
                };
                assert_eq!(v, want, "entry ({i},{j})");
            }
        }
        for w in s.diag.windows(2) {
            assert!((&w[1] % &w[0]).is_zero(), "divisibility chain");
        }
        assert!(s.diag.iter().all(|d| d.is_positive()));
    }

    #[test]
    fn small_known_form() {
        let m = to_big(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let s = smith(m.clone(), 3);
        check_transforms(&m, &s);
        assert_eq!(
            s.diag,
            vec![BigInt::from(2), BigInt::from(2), BigInt::from(156)]
        );
    }

    #[test]
    fn rank_deficient_matrix() {
        let m = to_big(&[vec![1, 2], vec![2, 4], vec![3, 6]]);
        let s = smith(m.clone(), 2);
        check_transforms(&m, &s);
        assert_eq!(s.rank(), 1);
        assert_eq!(s.kernel_basis().len(), 1);
        let k = &s.kernel_basis()[0];
        assert!((&k[0] + &k[1] * BigInt::from(2)).is_zero());
    }

    #[test]
    fn torsion_and_mod_p_ranks() {
        let m = to_big(&[vec![2, 0], vec![0, 6]]);
        let s = smith(m.clone(), 2);
        check_transforms(&m, &s);
        assert_eq!(s.torsion(), vec![BigInt::from(2), BigInt::from(6)]);
        assert_eq!(s.rank_mod(2), 0);
        assert_eq!(s.rank_mod(3), 1);
        assert_eq!(s.rank_mod(5), 2);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = to_big(&[vec![2, 0], vec![0, 3]]);
        let s = smith(m.clone(), 2);
        let x = solve(&s, &[BigInt::from(4), BigInt::from(9)]).unwrap();
        assert_eq!(x, vec![BigInt::from(2), BigInt::from(3)]);
        assert!(solve(&s, &[BigInt::from(1), BigInt::from(3)]).is_none());
    }

    #[test]
    fn randomized_transform_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xBEEF);
        for _ in 0..40 {
            let rows = rng.gen_range(1..6);
            let cols = rng.gen_range(1..6);
            let m: Vec<Vec<BigInt>> = (0..rows)
                .map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(-9i64..=9))).collect())
                .collect();
            let s = smith(m.clone(), cols);
            check_transforms(&m, &s);
            // solving A x = A * (1,1,...,1) must succeed
            let b: Vec<BigInt> = (0..rows)
                .map(|i| (0..cols).map(|j| m[i][j].clone()).sum())
                .collect();
            let x = solve(&s, &b).expect("consistent by construction");
            for i in 0..rows {
                let got: BigInt = (0..cols).map(|j| &m[i][j] * &x[j]).sum();
                assert_eq!(got, b[i]);
            }
        }
    }
}
