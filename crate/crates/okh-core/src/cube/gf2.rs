//! Dense bit-packed linear algebra over GF(2), sized for sign-assignment
//! systems (hundreds of variables, hundreds of equations).

/// One linear system `A x = b` over GF(2) with up to two simultaneous
/// right-hand sides sharing the coefficient matrix.
pub struct System {
    n_vars: usize,
    words: usize,
    /// Each row is `words` coefficient limbs followed by one RHS limb
    /// (bit 0 = first rhs, bit 1 = second rhs).
    rows: Vec<Vec<u64>>,
}

impl System {
    pub fn new(n_vars: usize) -> Self {
        System {
            n_vars,
            words: n_vars / 64 + 1,
            rows: Vec::new(),
        }
    }

    /// Adds the equation `sum of x[cols] = rhs0, rhs1`. Repeated columns
    /// cancel, as GF(2) addition demands.
    pub fn add_equation(&mut self, cols: &[usize], rhs0: bool, rhs1: bool) {
        let mut row = vec![0u64; self.words + 1];
        for &c in cols {
            debug_assert!(c < self.n_vars);
            row[c / 64] ^= 1u64 << (c % 64);
        }
        let mut rhs = 0u64;
        if rhs0 {
            rhs |= 1;
        }
        if rhs1 {
            rhs |= 2;
        }
        row[self.words] = rhs;
        self.rows.push(row);
    }

    /// Gauss-Jordan elimination. Returns one solution per right-hand side
    /// with every free variable set to zero, or `None` if inconsistent.
    pub fn solve(mut self) -> Option<(Vec<bool>, Vec<bool>)> {
        let words = self.words;
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (col, row)
        let mut rank = 0usize;
        for col in 0..self.n_vars {
            let (w, bit) = (col / 64, 1u64 << (col % 64));
            let Some(p) = (rank..self.rows.len()).find(|&r| self.rows[r][w] & bit != 0) else {
                continue;
            };
            self.rows.swap(rank, p);
            let pivot = self.rows[rank].clone();
            for (r, row) in self.rows.iter_mut().enumerate() {
                if r != rank && row[w] & bit != 0 {
                    for k in 0..=words {
                        row[k] ^= pivot[k];
                    }
                }
            }
            pivots.push((col, rank));
            rank += 1;
        }
        // inconsistency: a zero coefficient row with nonzero rhs
        for row in &self.rows[rank..] {
            if row[..words].iter().all(|&w| w == 0) && row[words] != 0 {
                return None;
            }
        }
        let mut x0 = vec![false; self.n_vars];
        let mut x1 = vec![false; self.n_vars];
        // full reduction means each pivot row reads off its variable directly
        for &(col, row) in &pivots {
            let rhs = self.rows[row][words];
            x0[col] = rhs & 1 != 0;
            x1[col] = rhs & 2 != 0;
        }
        Some((x0, x1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_small_system() {
        // x0 + x1 = 1 ; x1 + x2 = 0 ; x0 + x2 = 1
        let mut sys = System::new(3);
        sys.add_equation(&[0, 1], true, false);
        sys.add_equation(&[1, 2], false, false);
        sys.add_equation(&[0, 2], true, false);
        let (x0, x1) = sys.solve().expect("consistent");
        assert_eq!(x0[0] ^ x0[1], true);
        assert_eq!(x0[1] ^ x0[2], false);
        assert_eq!(x0[0] ^ x0[2], true);
        assert!(x1.iter().all(|&b| !b));
    }

    #[test]
    fn reports_inconsistency() {
        let mut sys = System::new(2);
        sys.add_equation(&[0, 1], true, false);
        sys.add_equation(&[0, 1], false, false);
        assert!(sys.solve().is_none());
    }

    #[test]
    fn free_variables_default_to_zero() {
        let mut sys = System::new(4);
        sys.add_equation(&[0], true, true);
        let (x0, x1) = sys.solve().unwrap();
        assert_eq!(x0, vec![true, false, false, false]);
        assert_eq!(x1, vec![true, false, false, false]);
    }

    #[test]
    fn duplicate_columns_cancel() {
        let mut sys = System::new(2);
        sys.add_equation(&[0, 0, 1], true, false);
        let (x0, _) = sys.solve().unwrap();
        assert!(x0[1]);
        assert!(!x0[0]);
    }
}
