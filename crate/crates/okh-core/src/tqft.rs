//! The chronological TQFT on circles: free k-modules with one odd
//! generator per circle and the maps assigned to elementary surfaces.
//!
//! A module for c circles has rank 2^c with basis the square-free
//! monomials in generators R_0..R_{c-1}, encoded as bitmasks and kept in
//! ascending index order. The defining relations R_i R_i = 0 and
//! R_i R_j = pi R_j R_i make every reordering cost a power of pi equal to
//! the number of transpositions; every map here reduces to that rule.

use std::collections::BTreeMap;

use crate::ring::RingElem;

/// Bitmask monomial: bit i set means generator R_i is present.
pub type Monomial = u32;

/// Quantum degree of a basis monomial among `circles` circles.
pub fn monomial_q(circles: usize, m: Monomial) -> i32 {
    circles as i32 - 2 * m.count_ones() as i32
}

/// Parity (superdegree) of a basis monomial.
pub fn monomial_super(m: Monomial) -> u8 {
    (m.count_ones() & 1) as u8
}

/// Sparse matrix over k with deterministic column storage.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatrixK {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<u32, RingElem>>,
}

impl MatrixK {
    pub fn zero(rows: usize, cols: usize) -> MatrixK {
        MatrixK { rows, cols, data: vec![BTreeMap::new(); cols] }
    }

    pub fn identity(n: usize) -> MatrixK {
        let mut m = MatrixK::zero(n, n);
        for i in 0..n {
            m.data[i].insert(i as u32, RingElem::ONE);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, row: u32, col: u32) -> RingElem {
        self.data[col as usize]
            .get(&row)
            .copied()
            .unwrap_or(RingElem::ZERO)
    }

    pub fn set(&mut self, row: u32, col: u32, v: RingElem) {
        debug_assert!((row as usize) < self.rows && (col as usize) < self.cols);
        if v.is_zero() {
            self.data[col as usize].remove(&row);
        } else {
            self.data[col as usize].insert(row, v);
        }
    }

    pub fn add_to(&mut self, row: u32, col: u32, v: RingElem) {
        let cur = self.entry(row, col);
        self.set(row, col, cur + v);
    }

    pub fn col(&self, col: u32) -> impl Iterator<Item = (u32, RingElem)> + '_ {
        self.data[col as usize].iter().map(|(&r, &v)| (r, v))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_empty())
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().map(|c| c.len()).sum()
    }

    /// Matrix product self * rhs (apply rhs first).
    pub fn mul(&self, rhs: &MatrixK) -> MatrixK {
        assert_eq!(self.cols, rhs.rows, "composition shape mismatch");
        let mut out = MatrixK::zero(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            for (&k, &b) in &rhs.data[j] {
                for (&i, &a) in &self.data[k as usize] {
                    out.add_to(i, j as u32, a * b);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &MatrixK) -> MatrixK {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols);
        let mut out = self.clone();
        for j in 0..rhs.cols {
            for (&i, &v) in &rhs.data[j] {
                out.add_to(i, j as u32, v);
            }
        }
        out
    }

    pub fn sub(&self, rhs: &MatrixK) -> MatrixK {
        self.add(&rhs.scale(-RingElem::ONE))
    }

    pub fn scale(&self, s: RingElem) -> MatrixK {
        let mut out = MatrixK::zero(self.rows, self.cols);
        for j in 0..self.cols {
            for (&i, &v) in &self.data[j] {
                out.set(i, j as u32, v * s);
            }
        }
        out
    }

    pub fn neg(&self) -> MatrixK {
        self.scale(-RingElem::ONE)
    }

    pub fn transpose(&self) -> MatrixK {
        let mut out = MatrixK::zero(self.cols, self.rows);
        for j in 0..self.cols {
            for (&i, &v) in &self.data[j] {
                out.set(j as u32, i, v);
            }
        }
        out
    }

    /// Inverse of a square matrix with exactly one invertible entry per row
    /// and per column (a unit-weighted permutation). Every unit squares to
    /// one, so the inverse is the transpose with the same entries. Returns
    /// `None` when the matrix is not of that shape.
    pub fn unit_monomial_inverse(&self) -> Option<MatrixK> {
        if self.rows != self.cols {
            return None;
        }
        let mut seen_row = vec![false; self.rows as usize];
        let mut out = MatrixK::zero(self.rows, self.cols);
        for j in 0..self.cols {
            let mut hits = self.data[j].iter();
            let (&i, &v) = hits.next()?;
            if hits.next().is_some()
                || !crate::ring::RingElem::UNITS.contains(&v)
                || seen_row[i as usize]
            {
                return None;
            }
            seen_row[i as usize] = true;
            out.set(j as u32, i, v);
        }
        Some(out)
    }

    pub fn apply(&self, v: &BTreeMap<u32, RingElem>) -> BTreeMap<u32, RingElem> {
        let mut out: BTreeMap<u32, RingElem> = BTreeMap::new();
        for (&j, &x) in v {
            for (&i, &a) in &self.data[j as usize] {
                let e = out.entry(i).or_insert(RingElem::ZERO);
                *e = *e + a * x;
                if e.is_zero() {
                    out.remove(&i);
                }
            }
        }
        out
    }

    /// Integer matrix at pi = +1 or -1, as sparse columns.
    pub fn specialize(&self, pi: crate::ring::PiValue) -> Vec<BTreeMap<u32, i64>> {
        self.data
            .iter()
            .map(|col| {
                col.iter()
                    .filter_map(|(&i, &v)| {
                        let s = v.specialize(pi);
                        (s != 0).then_some((i, s))
                    })
                    .collect()
            })
            .collect()
    }
}

/// Number of transpositions needed to interleave: pairs (i, j) with i in
/// `m`, j fixed, i < j is counted by `below`.
fn below(m: Monomial, j: u32) -> u32 {
    (m & ((1u32 << j) - 1)).count_ones()
}

/// The map induced by sending circle i to circle `f[i]`. Bits are relabeled
/// and re-sorted, each transposition contributing a factor pi; two circles
/// landing on the same target kill the monomial (R^2 = 0), which is exactly
/// the merge rule. With `f` injective this is a birth-or-permutation.
pub fn relabel_matrix(src_circles: usize, dst_circles: usize, f: &[u32]) -> MatrixK {
    assert_eq!(f.len(), src_circles);
    assert!(f.iter().all(|&t| (t as usize) < dst_circles));
    let mut out = MatrixK::zero(1 << dst_circles, 1 << src_circles);
    for m in 0u32..(1u32 << src_circles) {
        let mut image: Monomial = 0;
        let mut inversions = 0u32;
        let mut dead = false;
        for i in 0..src_circles as u32 {
            if m & (1 << i) == 0 {
                continue;
            }
            let t = f[i as usize];
            if image & (1 << t) != 0 {
                dead = true;
                break;
            }
            // Bits already placed above t must hop over R_t.
            inversions += (image >> t).count_ones() - (image >> t & 1);
            image |= 1 << t;
        }
        if !dead {
            out.set(image, m, RingElem::pi_pow(inversions as i64));
        }
    }
    out
}

/// Left multiplication by R_j.
pub fn lambda(circles: usize, j: u32) -> MatrixK {
    let mut out = MatrixK::zero(1 << circles, 1 << circles);
    for m in 0u32..(1u32 << circles) {
        if m & (1 << j) != 0 {
            continue;
        }
        out.set(m | (1 << j), m, RingElem::pi_pow(below(m, j) as i64));
    }
    out
}

/// Contraction dual to `lambda`: delta(lambda(x)) = x exactly, and
/// delta kills monomials not containing R_j. Output keeps the circle
/// count; compose with a relabel to forget the circle.
pub fn delta(circles: usize, j: u32) -> MatrixK {
    let mut out = MatrixK::zero(1 << circles, 1 << circles);
    for m in 0u32..(1u32 << circles) {
        if m & (1 << j) == 0 {
            continue;
        }
        let rest = m & !(1 << j);
        out.set(rest, m, RingElem::pi_pow(below(rest, j) as i64));
    }
    out
}

/// Saddle merging two circles: relabel with f(u) = f(v).
pub fn merge_matrix(src_circles: usize, dst_circles: usize, f: &[u32]) -> MatrixK {
    relabel_matrix(src_circles, dst_circles, f)
}

/// Saddle splitting circle u into r1 (right of the crossing's arrow) and
/// r2: x maps to (R_r1 + pi R_r2) * x with u relabeled to either side;
/// both relabel choices give the same matrix.
pub fn split_matrix(
    src_circles: usize,
    dst_circles: usize,
    f: &[u32],
    r1: u32,
    r2: u32,
) -> MatrixK {
    let factor = lambda(dst_circles, r1).add(&lambda(dst_circles, r2).scale(RingElem::PI));
    factor.mul(&relabel_matrix(src_circles, dst_circles, f))
}

/// A circle appears: injective relabel into the larger module.
pub fn birth_matrix(src_circles: usize, dst_circles: usize, f: &[u32]) -> MatrixK {
    let m = relabel_matrix(src_circles, dst_circles, f);
    debug_assert_eq!(dst_circles, src_circles + 1);
    m
}

/// Circle j dies: monomials without R_j vanish, R_j is contracted away
/// and the remaining circles relabel along `f` (f[j] is ignored).
pub fn death_matrix(src_circles: usize, dst_circles: usize, j: u32, f: &[u32]) -> MatrixK {
    assert_eq!(dst_circles + 1, src_circles);
    let mut out = MatrixK::zero(1 << dst_circles, 1 << src_circles);
    for m in 0u32..(1u32 << src_circles) {
        if m & (1 << j) == 0 {
            continue;
        }
        let rest = m & !(1 << j);
        let t = below(rest, j);
        let mut image: Monomial = 0;
        let mut inversions = t;
        let mut dead = false;
        for i in 0..src_circles as u32 {
            if rest & (1 << i) == 0 {
                continue;
            }
            let target = f[i as usize];
            debug_assert!((target as usize) < dst_circles);
            if image & (1 << target) != 0 {
                dead = true;
                break;
            }
            inversions += (image >> target).count_ones() - (image >> target & 1);
            image |= 1 << target;
        }
        if !dead {
            out.set(image, m, RingElem::pi_pow(inversions as i64));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::PiValue;

    const ONE: RingElem = RingElem::ONE;
    const PI: RingElem = RingElem::PI;

    #[test]
    fn anticommutation_is_built_in() {
        // Swapping two circles sends R_0 R_1 to pi R_0 R_1.
        let swap = relabel_matrix(2, 2, &[1, 0]);
        assert_eq!(swap.entry(0b11, 0b11), PI);
        assert_eq!(swap.entry(0b10, 0b01), ONE);
        assert_eq!(swap.entry(0b01, 0b10), ONE);
        assert_eq!(swap.entry(0b00, 0b00), ONE);
    }

    #[test]
    fn delta_inverts_lambda_exactly() {
        for c in 1..=4usize {
            for j in 0..c as u32 {
                let composite = delta(c, j).mul(&lambda(c, j));
                // Identity on monomials without R_j; lambda kills the rest.
                for m in 0u32..(1 << c) {
                    if m & (1 << j) == 0 {
                        assert_eq!(composite.entry(m, m), ONE);
                    }
                }
                assert_eq!(composite.nonzero_count(), 1 << (c - 1));
            }
        }
    }

    #[test]
    fn square_zero() {
        let l = lambda(3, 1);
        assert!(l.mul(&l).is_zero());
    }

    #[test]
    fn split_relabel_choice_is_immaterial() {
        // One spectator circle to exercise the pi bookkeeping.
        let via_r1 = split_matrix(2, 3, &[0, 2], 0, 1);
        let via_r2 = split_matrix(2, 3, &[1, 2], 0, 1);
        assert_eq!(via_r1, via_r2);
    }

    #[test]
    fn handle_multiplies_by_one_plus_pi_times_r() {
        // Split a circle and merge it back: the even shadow of this map is
        // multiplication by 2X, and here it is (1 + pi) R.
        let split = split_matrix(1, 2, &[0], 0, 1);
        let merge = merge_matrix(2, 1, &[0, 0]);
        let handle = merge.mul(&split);
        let expected = lambda(1, 0).scale(ONE + PI);
        assert_eq!(handle, expected);
    }

    #[test]
    fn sphere_vanishes() {
        let birth = birth_matrix(0, 1, &[]);
        let death = death_matrix(1, 0, 0, &[0]);
        assert!(death.mul(&birth).is_zero());
    }

    #[test]
    fn degrees_shift_correctly() {
        // Merge: quantum degree -1. Split: -1. Birth: +1. Death: +1.
        let checks: Vec<(MatrixK, usize, usize, i32)> = vec![
            (merge_matrix(2, 1, &[0, 0]), 2, 1, -1),
            (split_matrix(1, 2, &[0], 0, 1), 1, 2, -1),
            (birth_matrix(1, 2, &[0]), 1, 2, 1),
            (death_matrix(2, 1, 0, &[0, 0]), 2, 1, 1),
        ];
        for (m, src_c, dst_c, want) in checks {
            for col in 0..m.cols() as u32 {
                for (row, v) in m.col(col) {
                    assert!(!v.is_zero());
                    let shift =
                        monomial_q(dst_c, row) - monomial_q(src_c, col);
                    assert_eq!(shift, want);
                }
            }
        }
    }

    #[test]
    fn even_specialization_is_frobenius() {
        // At pi = +1 the split is the usual coproduct x -> x R' + R x''.
        let split = split_matrix(1, 2, &[0], 0, 1);
        let d = split.specialize(PiValue::Plus);
        // 1 -> R_0 + R_1, R -> R_0 R_1.
        assert_eq!(d[0].get(&0b01), Some(&1));
        assert_eq!(d[0].get(&0b10), Some(&1));
        assert_eq!(d[1].get(&0b11), Some(&1));
    }

    #[test]
    fn death_contracts_with_sign_bookkeeping() {
        // Three circles, kill the middle one.
        let death = death_matrix(3, 2, 1, &[0, 9, 1]);
        // R_1 -> 1.
        assert_eq!(death.entry(0b00, 0b010), ONE);
        // R_0 R_1 -> pi^1 R_0 (R_1 hops over R_0).
        assert_eq!(death.entry(0b01, 0b011), PI);
        // R_1 R_2 -> R_2 with no hop.
        assert_eq!(death.entry(0b10, 0b110), ONE);
        // Monomials without R_1 die.
        assert!(death.col(0b001).next().is_none());
        assert!(death.col(0b100).next().is_none());
    }
}
