//! Homology of graded complexes after specializing the ring variable to
//! plus or minus one, over several coefficient systems, plus the linear
//! algebra for comparing chain maps up to homotopy and a unit.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::reduce::reduce;
use super::snf::{self, Snf};
use super::{ChainComplex, ChainMap};
use crate::ring::{PiValue, RingElem};
use crate::tqft::MatrixK;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coeff {
    Z,
    Q,
    F2,
    F3,
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Coeff::Z => "Z",
            Coeff::Q => "Q",
            Coeff::F2 => "F2",
            Coeff::F3 => "F3",
        };
        f.write_str(s)
    }
}

/// One nonzero bigraded homology group: free rank plus elementary divisors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyRow {
    pub deg: i32,
    pub q: i32,
    pub free: usize,
    pub torsion: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HomologyTable {
    pub rows: Vec<HomologyRow>,
}

impl HomologyTable {
    pub fn total_rank(&self) -> usize {
        self.rows.iter().map(|r| r.free).sum()
    }

    pub fn has_torsion(&self) -> bool {
        self.rows.iter().any(|r| !r.torsion.is_empty())
    }

    pub fn rank_at(&self, deg: i32, q: i32) -> usize {
        self.rows
            .iter()
            .find(|r| r.deg == deg && r.q == q)
            .map_or(0, |r| r.free)
    }

    /// Graded Euler characteristic: coefficient of q^j is the alternating
    /// sum of free ranks. Torsion does not contribute.
    pub fn graded_euler(&self) -> BTreeMap<i32, i64> {
        let mut out = BTreeMap::new();
        for r in &self.rows {
            let sign = if r.deg.rem_euclid(2) == 0 { 1 } else { -1 };
            let e = out.entry(r.q).or_insert(0i64);
            *e += sign * r.free as i64;
            if *e == 0 {
                out.remove(&r.q);
            }
        }
        out
    }
}

impl fmt::Display for HomologyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows.is_empty() {
            return writeln!(f, "(zero)");
        }
        for r in &self.rows {
            write!(f, "i={:>3} q={:>4}  Z^{}", r.deg, r.q, r.free)?;
            for t in &r.torsion {
                write!(f, " + Z/{t}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Dense integer block of the differential leaving `slot`, restricted to
/// generators of quantum degree `q` (and all super degrees).
fn int_block(c: &ChainComplex, slot: usize, q: i32, pi: PiValue) -> (Vec<Vec<BigInt>>, usize) {
    let src: Vec<u32> = (0..c.dim(slot) as u32)
        .filter(|&i| c.gens(slot)[i as usize].q == q)
        .collect();
    if slot + 1 >= c.n_slots() {
        return (vec![], src.len());
    }
    let tgt: Vec<u32> = (0..c.dim(slot + 1) as u32)
        .filter(|&i| c.gens(slot + 1)[i as usize].q == q)
        .collect();
    let tgt_local: BTreeMap<u32, usize> =
        tgt.iter().enumerate().map(|(l, &o)| (o, l)).collect();
    let d = c.diff(slot);
    let mut rows = vec![vec![BigInt::zero(); src.len()]; tgt.len()];
    for (j, &col) in src.iter().enumerate() {
        for (row, v) in d.col(col) {
            if let Some(&i) = tgt_local.get(&row) {
                rows[i][j] = BigInt::from(v.specialize(pi));
            }
        }
    }
    (rows, src.len())
}

/// Bigraded homology of `c` specialized at `pi`, over the chosen
/// coefficients. Rows are sorted by degree then quantum grading; zero
/// groups are omitted.
pub fn homology(c: &ChainComplex, pi: PiValue, coeff: Coeff) -> HomologyTable {
    let mut qs: Vec<i32> = Vec::new();
    for t in 0..c.n_slots() {
        for g in c.gens(t) {
            if let Err(at) = qs.binary_search(&g.q) {
                qs.insert(at, g.q);
            }
        }
    }
    // one snf per graded block of the differential; every coefficient
    // system reads off the same form
    let mut forms: BTreeMap<(usize, i32), (Snf, usize)> = BTreeMap::new();
    for t in 0..c.n_slots() {
        for &q in &qs {
            let (block, dim) = int_block(c, t, q, pi);
            forms.insert((t, q), (snf::smith(block, dim), dim));
        }
    }
    let mut rows = Vec::new();
    for t in 0..c.n_slots() {
        let deg = c.deg_of(t);
        for &q in &qs {
            let (out_snf, dim) = &forms[&(t, q)];
            if *dim == 0 {
                continue;
            }
            let in_snf = if t == 0 { None } else { forms.get(&(t - 1, q)).map(|(s, _)| s) };
            let (rank_in, rank_out, torsion) = match coeff {
                Coeff::Z | Coeff::Q => (
                    in_snf.map_or(0, Snf::rank),
                    out_snf.rank(),
                    if coeff == Coeff::Z {
                        in_snf.map_or(Vec::new(), Snf::torsion)
                    } else {
                        Vec::new()
                    },
                ),
                Coeff::F2 | Coeff::F3 => {
                    let p = if coeff == Coeff::F2 { 2 } else { 3 };
                    (
                        in_snf.map_or(0, |s| s.rank_mod(p)),
                        out_snf.rank_mod(p),
                        Vec::new(),
                    )
                }
            };
            let free = *dim - rank_out - rank_in;
            if free > 0 || !torsion.is_empty() {
                rows.push(HomologyRow {
                    deg,
                    q,
                    free,
                    torsion,
                });
            }
        }
    }
    HomologyTable { rows }
}

/// True when the matrix has an inverse over the ground ring, equivalent to
/// being invertible over the integers at both specializations.
pub fn is_invertible_over_k(m: &MatrixK) -> bool {
    if m.rows() != m.cols() {
        return false;
    }
    for pi in [PiValue::Plus, PiValue::Minus] {
        let cols = m.specialize(pi);
        let mut rows = vec![vec![BigInt::zero(); m.cols()]; m.rows()];
        for (j, col) in cols.iter().enumerate() {
            for (&i, &v) in col {
                rows[i as usize][j] = BigInt::from(v);
            }
        }
        let s = snf::smith(rows, m.cols());
        if s.rank() != m.rows() || !s.torsion().is_empty() {
            return false;
        }
    }
    true
}

/// Searches for a unit `u` with `f - u g = d h + h d` for some homotopy.
/// Both maps must be chain maps between the given complexes; the search
/// reduces both complexes first and solves one integer linear system per
/// candidate unit.
pub fn homotopic_up_to_unit(
    f: &ChainMap,
    g: &ChainMap,
    src: &ChainComplex,
    tgt: &ChainComplex,
) -> Option<RingElem> {
    homotopy_up_to_unit(f, g, src, tgt).map(|(u, _)| u)
}

/// Like [`homotopic_up_to_unit`], but also returns the homotopy witness on
/// the original complexes: the matrix stored at `deg` maps source degree
/// `deg` into target degree `deg - 1`, at full chain-group dimensions.
pub fn homotopy_up_to_unit(
    f: &ChainMap,
    g: &ChainMap,
    src: &ChainComplex,
    tgt: &ChainComplex,
) -> Option<(RingElem, BTreeMap<i32, MatrixK>)> {
    let rs = reduce(src);
    let rt = reduce(tgt);
    let fr = rt.retr.compose(&f.compose(&rs.incl));
    let gr = rt.retr.compose(&g.compose(&rs.incl));
    let (s, t) = (&rs.complex, &rt.complex);

    // unknowns: entries of h_deg: s^deg -> t^(deg-1), both components of k
    let mut layout: BTreeMap<i32, (usize, usize, usize)> = BTreeMap::new(); // deg -> (offset, rows, cols)
    let mut n_vars = 0usize;
    for deg in s.min_deg()..=s.max_deg() {
        let rows = t.dim_at(deg - 1);
        let cols = s.dim_at(deg);
        if rows * cols > 0 {
            layout.insert(deg, (n_vars, rows, cols));
            n_vars += 2 * rows * cols;
        }
    }
    let var =
        |layout: &BTreeMap<i32, (usize, usize, usize)>, deg: i32, r: usize, c: usize, b: usize| {
            let (off, rows, _) = layout[&deg];
            off + 2 * (c * rows + r) + b
        };

    // assemble equations d h + h d = rhs, one pair per (deg, row, col)
    struct Eq {
        cols: Vec<(usize, i64)>,
        at: (i32, usize, usize, usize),
    }
    let mut eqs: Vec<Eq> = Vec::new();
    let lo = s.min_deg().min(t.min_deg());
    let hi = s.max_deg().max(t.max_deg());
    for deg in lo..=hi {
        let rows = t.dim_at(deg);
        let cols = s.dim_at(deg);
        if rows * cols == 0 {
            continue;
        }
        let dt = t.diff_at(deg - 1); // t^(deg-1) -> t^deg
        let ds = s.diff_at(deg); // s^deg -> s^(deg+1)
        for r in 0..rows {
            for c in 0..cols {
                for b in 0..2usize {
                    let mut lin: Vec<(usize, i64)> = Vec::new();
                    // (d_t h_deg)[r][c]: sum over m of dt[r][m] h[m][c]
                    if layout.contains_key(&deg) {
                        for m in 0..t.dim_at(deg - 1) {
                            let v = dt.entry(r as u32, m as u32);
                            if v.is_zero() {
                                continue;
                            }
                            // k-product components: (a x_a + b x_b, a x_b + b x_a)
                            let (va, vb) = (v.a, v.b);
                            if va != 0 {
                                lin.push((var(&layout, deg, m, c, b), va));
                            }
                            if vb != 0 {
                                lin.push((var(&layout, deg, m, c, 1 - b), vb));
                            }
                        }
                    }
                    // (h_(deg+1) d_s)[r][c]: sum over m of h[r][m] ds[m][c]
                    if layout.contains_key(&(deg + 1)) {
                        for m in 0..s.dim_at(deg + 1) {
                            let v = ds.entry(m as u32, c as u32);
                            if v.is_zero() {
                                continue;
                            }
                            if v.a != 0 {
                                lin.push((var(&layout, deg + 1, r, m, b), v.a));
                            }
                            if v.b != 0 {
                                lin.push((var(&layout, deg + 1, r, m, 1 - b), v.b));
                            }
                        }
                    }
                    eqs.push(Eq {
                        cols: lin,
                        at: (deg, r, c, b),
                    });
                }
            }
        }
    }
    let mut mat = vec![vec![BigInt::zero(); n_vars]; eqs.len()];
    for (i, eq) in eqs.iter().enumerate() {
        for &(j, v) in &eq.cols {
            mat[i][j] += BigInt::from(v);
        }
    }
    let solved = snf::smith(mat, n_vars);
    for u in RingElem::UNITS {
        let mut b = Vec::with_capacity(eqs.len());
        for eq in &eqs {
            let (deg, r, c, bit) = eq.at;
            let rhs = map_entry(&fr, deg, r, c) - u * map_entry(&gr, deg, r, c);
            b.push(BigInt::from(if bit == 0 { rhs.a } else { rhs.b }));
        }
        if let Some(xs) = snf::solve(&solved, &b) {
            // read the reduced homotopy out of the solution vector
            let mut hbar: BTreeMap<i32, MatrixK> = BTreeMap::new();
            for (&deg, &(off, rows, cols)) in &layout {
                let mut m = MatrixK::zero(rows, cols);
                for c in 0..cols {
                    for r in 0..rows {
                        let a = big_to_i64(&xs[off + 2 * (c * rows + r)]);
                        let bb = big_to_i64(&xs[off + 2 * (c * rows + r) + 1]);
                        if a != 0 || bb != 0 {
                            m.set(r as u32, c as u32, RingElem { a, b: bb });
                        }
                    }
                }
                hbar.insert(deg, m);
            }
            let h = lift_homotopy(f, g, u, &hbar, &rs, &rt, src, tgt);
            assert!(
                homotopy_residual_is_zero(f, g, u, &h, src, tgt),
                "lifted homotopy fails to witness the found unit"
            );
            return Some((u, h));
        }
    }
    None
}

fn big_to_i64(x: &BigInt) -> i64 {
    use num_traits::ToPrimitive;
    x.to_i64().expect("homotopy entry exceeds i64")
}

/// Transfers a homotopy found on the reduced complexes back to the
/// originals: with `1 - i r = d h + h d` on each side and
/// `fr - u gr = d hbar + hbar d` reduced, the combination
/// `h_t f + i r_t f h_s - u (h_t g + i r_t g h_s) + i hbar r_s`
/// witnesses `f - u g` on the originals.
#[allow(clippy::too_many_arguments)]
fn lift_homotopy(
    f: &ChainMap,
    g: &ChainMap,
    u: RingElem,
    hbar: &BTreeMap<i32, MatrixK>,
    rs: &super::reduce::Reduction,
    rt: &super::reduce::Reduction,
    src: &ChainComplex,
    tgt: &ChainComplex,
) -> BTreeMap<i32, MatrixK> {
    let mut out = BTreeMap::new();
    for deg in src.min_deg()..=src.max_deg() {
        let (rows, cols) = (tgt.dim_at(deg - 1), src.dim_at(deg));
        if rows * cols == 0 {
            continue;
        }
        let fd = f.component(deg, src, tgt);
        let gd = g.component(deg, src, tgt);
        let ht = rt.h_at(deg, tgt);
        let hs = rs.h_at(deg, src);
        let it = rt.incl.component(deg - 1, &rt.complex, tgt);
        let rtm = rt.retr.component(deg - 1, tgt, &rt.complex);
        let rsm = rs.retr.component(deg, src, &rs.complex);
        let fprev = f.component(deg - 1, src, tgt);
        let gprev = g.component(deg - 1, src, tgt);
        let hb = hbar.get(&deg).cloned().unwrap_or_else(|| {
            MatrixK::zero(rt.complex.dim_at(deg - 1), rs.complex.dim_at(deg))
        });

        let through = |m: &MatrixK| it.mul(&rtm.mul(m)); // project to the deformation retract
        let mut h = ht.mul(&fd).add(&through(&fprev).mul(&hs));
        let hg = ht.mul(&gd).add(&through(&gprev).mul(&hs));
        h = h.sub(&hg.scale(u));
        h = h.add(&it.mul(&hb.mul(&rsm)));
        if !h.is_zero() {
            out.insert(deg, h);
        }
    }
    out
}

/// Checks `f - u g = d h + h d` degreewise at full dimensions.
fn homotopy_residual_is_zero(
    f: &ChainMap,
    g: &ChainMap,
    u: RingElem,
    h: &BTreeMap<i32, MatrixK>,
    src: &ChainComplex,
    tgt: &ChainComplex,
) -> bool {
    let h_at = |deg: i32| {
        h.get(&deg)
            .cloned()
            .unwrap_or_else(|| MatrixK::zero(tgt.dim_at(deg - 1), src.dim_at(deg)))
    };
    let lo = src.min_deg().min(tgt.min_deg()) - 1;
    let hi = src.max_deg().max(tgt.max_deg()) + 1;
    for deg in lo..=hi {
        if tgt.dim_at(deg) * src.dim_at(deg) == 0 {
            continue;
        }
        let want = f
            .component(deg, src, tgt)
            .sub(&g.component(deg, src, tgt).scale(u));
        let have = tgt
            .diff_at(deg - 1)
            .mul(&h_at(deg))
            .add(&h_at(deg + 1).mul(&src.diff_at(deg)));
        if !want.sub(&have).is_zero() {
            return false;
        }
    }
    true
}

fn map_entry(m: &ChainMap, deg: i32, r: usize, c: usize) -> RingElem {
    m.at(deg)
        .map_or(RingElem::ZERO, |mm| mm.entry(r as u32, c as u32))
}

/// Integer matrices of the map induced on free homology, one per
/// homological degree (all quantum degrees together), at the given
/// specialization. Rows are target free generators in a basis fixed by the
/// target complex alone, so maps of the same complexes compare entrywise.
pub fn induced_on_free_homology(
    f: &ChainMap,
    src: &ChainComplex,
    tgt: &ChainComplex,
    pi: PiValue,
) -> BTreeMap<i32, Vec<Vec<BigInt>>> {
    let mut out = BTreeMap::new();
    let lo = src.min_deg().min(tgt.min_deg());
    let hi = src.max_deg().max(tgt.max_deg());
    for deg in lo..=hi {
        let sb = FreeHomologyBasis::at(src, deg, pi);
        let tb = FreeHomologyBasis::at(tgt, deg, pi);
        if sb.free_rank == 0 || tb.free_rank == 0 {
            if sb.free_rank > 0 || tb.free_rank > 0 {
                out.insert(deg, vec![vec![BigInt::zero(); sb.free_rank]; tb.free_rank]);
            }
            continue;
        }
        let fm = f.component(deg, src, tgt);
        let mut cols = Vec::new();
        for cycle in &sb.free_reps {
            // push the representative through f, entrywise over the integers
            let mut img = vec![BigInt::zero(); tgt.dim_at(deg)];
            for (i, c) in cycle.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (row, v) in fm.col(i as u32) {
                    img[row as usize] += BigInt::from(v.specialize(pi)) * c;
                }
            }
            cols.push(tb.project(&img));
        }
        // transpose into a rows-first matrix
        let m: Vec<Vec<BigInt>> = (0..tb.free_rank)
            .map(|r| cols.iter().map(|c| c[r].clone()).collect())
            .collect();
        out.insert(deg, m);
    }
    out
}

/// Cycle representatives and the projection onto the free part of the
/// homology at one degree.
struct FreeHomologyBasis {
    free_rank: usize,
    /// Chain-level cycles representing the free quotient basis.
    free_reps: Vec<Vec<BigInt>>,
    /// Rows that map kernel coordinates onto free quotient coordinates.
    proj: Vec<Vec<BigInt>>,
    /// Solver for expressing an arbitrary cycle in the kernel basis.
    kernel_solver: Snf,
}

impl FreeHomologyBasis {
    fn at(c: &ChainComplex, deg: i32, pi: PiValue) -> FreeHomologyBasis {
        let dim = c.dim_at(deg);
        let d_out = dense_int(&c.diff_at(deg), pi);
        let s_out = snf::smith(d_out, dim);
        let cycles = s_out.kernel_basis();
        let z = cycles.len();
        if z == 0 {
            return FreeHomologyBasis {
                free_rank: 0,
                free_reps: Vec::new(),
                proj: Vec::new(),
                kernel_solver: s_out,
            };
        }
        // kernel matrix: dim x z, columns are the cycles
        let kmat: Vec<Vec<BigInt>> = (0..dim)
            .map(|i| (0..z).map(|j| cycles[j][i].clone()).collect())
            .collect();
        let ksolve = snf::smith(kmat, z);
        // boundaries in kernel coordinates
        let d_in = dense_int(&c.diff_at(deg - 1), pi);
        let prev = c.dim_at(deg - 1);
        let mut rel_cols: Vec<Vec<BigInt>> = Vec::new();
        for j in 0..prev {
            let bdry: Vec<BigInt> = (0..dim).map(|i| d_in[i][j].clone()).collect();
            let coords = snf::solve(&ksolve, &bdry).expect("boundaries are cycles");
            rel_cols.push(coords);
        }
        let rel: Vec<Vec<BigInt>> = (0..z)
            .map(|i| rel_cols.iter().map(|c| c[i].clone()).collect())
            .collect();
        let s_rel = snf::smith(rel, prev);
        // the row transform puts the relations in diagonal position: the
        // quotient is free exactly in the transformed coordinates past the
        // relation rank
        let rank = s_rel.rank();
        let proj: Vec<Vec<BigInt>> = (rank..z).map(|i| s_rel.left[i].clone()).collect();
        // representatives: preimages of the free coordinate vectors under
        // the row transform, pushed back to chain level
        let u_solve = snf::smith(s_rel.left.clone(), z);
        let mut free_reps = Vec::with_capacity(z - rank);
        for i in rank..z {
            let mut e = vec![BigInt::zero(); z];
            e[i] = BigInt::from(1);
            let x = snf::solve(&u_solve, &e).expect("row transform is unimodular");
            let mut chain = vec![BigInt::zero(); dim];
            for (j, coef) in x.iter().enumerate() {
                if coef.is_zero() {
                    continue;
                }
                for (row, chain_v) in chain.iter_mut().enumerate() {
                    *chain_v += &cycles[j][row] * coef;
                }
            }
            free_reps.push(chain);
        }
        FreeHomologyBasis {
            free_rank: z - rank,
            free_reps,
            proj,
            kernel_solver: ksolve,
        }
    }

    /// Free-part coordinates of an arbitrary cycle vector.
    fn project(&self, cycle: &[BigInt]) -> Vec<BigInt> {
        let coords = snf::solve(&self.kernel_solver, cycle).expect("input must be a cycle");
        self.proj
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&coords)
                    .map(|(a, b)| a * b)
                    .sum::<BigInt>()
            })
            .collect()
    }
}

fn dense_int(m: &MatrixK, pi: PiValue) -> Vec<Vec<BigInt>> {
    let cols = m.specialize(pi);
    let mut rows = vec![vec![BigInt::zero(); m.cols()]; m.rows()];
    for (j, col) in cols.iter().enumerate() {
        for (&i, &v) in col {
            rows[i as usize][j] = BigInt::from(v);
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::KhComplex;
    use crate::cube::LadybugMode;
    use crate::diagram::build;

    fn table(d: crate::diagram::Diagram, pi: PiValue, coeff: Coeff) -> HomologyTable {
        let c = KhComplex::new(d, LadybugMode::TypeY).unwrap().into_complex();
        homology(&c, pi, coeff)
    }

    fn row(deg: i32, q: i32, free: usize, torsion: &[i64]) -> HomologyRow {
        HomologyRow {
            deg,
            q,
            free,
            torsion: torsion.iter().map(|&t| BigInt::from(t)).collect(),
        }
    }

    #[test]
    fn unknot_homology() {
        for pi in [PiValue::Plus, PiValue::Minus] {
            let t = table(build::unknot(), pi, Coeff::Z);
            assert_eq!(t.rows, vec![row(0, -1, 1, &[]), row(0, 1, 1, &[])]);
        }
    }

    #[test]
    fn even_positive_hopf_homology() {
        let t = table(build::hopf(true), PiValue::Plus, Coeff::Z);
        assert_eq!(
            t.rows,
            vec![
                row(0, 0, 1, &[]),
                row(0, 2, 1, &[]),
                row(2, 4, 1, &[]),
                row(2, 6, 1, &[]),
            ]
        );
    }

    #[test]
    fn even_positive_trefoil_homology() {
        let t = table(build::trefoil(true), PiValue::Plus, Coeff::Z);
        assert_eq!(
            t.rows,
            vec![
                row(0, 1, 1, &[]),
                row(0, 3, 1, &[]),
                row(2, 5, 1, &[]),
                row(3, 7, 0, &[2]),
                row(3, 9, 1, &[]),
            ]
        );
    }

    #[test]
    fn odd_trefoil_is_torsion_free_with_matching_euler() {
        let even = table(build::trefoil(true), PiValue::Plus, Coeff::Z);
        let odd = table(build::trefoil(true), PiValue::Minus, Coeff::Z);
        assert!(!odd.has_torsion());
        assert_eq!(even.graded_euler(), odd.graded_euler());
    }

    #[test]
    fn mod_two_ranks_agree_between_theories() {
        for d in [build::trefoil(true), build::figure_eight(), build::hopf(false)] {
            let c = KhComplex::new(d, LadybugMode::TypeY).unwrap().into_complex();
            let even = homology(&c, PiValue::Plus, Coeff::F2);
            let odd = homology(&c, PiValue::Minus, Coeff::F2);
            assert_eq!(even.rows, odd.rows);
        }
    }

    #[test]
    fn homology_survives_reduction() {
        let c = KhComplex::new(build::figure_eight(), LadybugMode::TypeY)
            .unwrap()
            .into_complex();
        let red = reduce(&c);
        for pi in [PiValue::Plus, PiValue::Minus] {
            for coeff in [Coeff::Z, Coeff::Q, Coeff::F2, Coeff::F3] {
                assert_eq!(
                    homology(&c, pi, coeff).rows,
                    homology(&red.complex, pi, coeff).rows,
                    "pi={pi:?} coeff={coeff:?}"
                );
            }
        }
    }

    #[test]
    fn identity_induces_identity_on_free_homology() {
        let c = KhComplex::new(build::trefoil(true), LadybugMode::TypeY)
            .unwrap()
            .into_complex();
        let id = ChainMap::identity(&c);
        let ind = induced_on_free_homology(&id, &c, &c, PiValue::Minus);
        let t = homology(&c, PiValue::Minus, Coeff::Z);
        for (deg, m) in &ind {
            let rank: usize = t.rows.iter().filter(|r| r.deg == *deg).map(|r| r.free).sum();
            assert_eq!(m.len(), rank, "square at degree {deg}");
            for (i, mrow) in m.iter().enumerate() {
                for (j, v) in mrow.iter().enumerate() {
                    let want = i64::from(i == j);
                    assert_eq!(v, &BigInt::from(want), "entry ({i},{j}) at {deg}");
                }
            }
        }
    }

    #[test]
    fn homotopic_detects_identity_and_scaled_identity() {
        let c = KhComplex::new(build::hopf(true), LadybugMode::TypeY)
            .unwrap()
            .into_complex();
        let id = ChainMap::identity(&c);
        let pi_id = id.scale(RingElem::PI);
        assert_eq!(homotopic_up_to_unit(&id, &id, &c, &c), Some(RingElem::ONE));
        assert_eq!(
            homotopic_up_to_unit(&id, &pi_id, &c, &c),
            Some(RingElem::PI)
        );
        // the zero map is not homotopic to the identity on a non-acyclic
        // complex, whatever the unit
        let zero = ChainMap::zero();
        assert_eq!(homotopic_up_to_unit(&id, &zero, &c, &c), None);
    }

    #[test]
    fn homotopy_witness_is_recovered() {
        let c = KhComplex::new(build::trefoil(true), LadybugMode::TypeY)
            .unwrap()
            .into_complex();
        // a deliberately messy degree-lowering map s
        let mut s: BTreeMap<i32, MatrixK> = BTreeMap::new();
        for deg in c.min_deg()..=c.max_deg() {
            let (rows, cols) = (c.dim_at(deg - 1), c.dim_at(deg));
            if rows * cols == 0 {
                continue;
            }
            let mut m = MatrixK::zero(rows, cols);
            for i in 0..rows.min(cols) {
                m.set(i as u32, i as u32, RingElem::new((i % 3) as i64 - 1, (i % 2) as i64));
            }
            m.set(0, (cols - 1) as u32, RingElem::PI);
            s.insert(deg, m);
        }
        let s_at = |deg: i32| {
            s.get(&deg)
                .cloned()
                .unwrap_or_else(|| MatrixK::zero(c.dim_at(deg - 1), c.dim_at(deg)))
        };
        // f = id + d s + s d is chain-homotopic to the identity via s
        let mut maps = BTreeMap::new();
        for deg in c.min_deg()..=c.max_deg() {
            let n = c.dim_at(deg);
            if n == 0 {
                continue;
            }
            let m = MatrixK::identity(n)
                .add(&c.diff_at(deg - 1).mul(&s_at(deg)))
                .add(&s_at(deg + 1).mul(&c.diff_at(deg)));
            maps.insert(deg, m);
        }
        let f = ChainMap::from_parts(maps);
        assert!(f.is_chain_map(&c, &c));
        assert_ne!(f, ChainMap::identity(&c), "perturbation must be visible");

        let (u, h) = homotopy_up_to_unit(&f, &ChainMap::identity(&c), &c, &c)
            .expect("perturbed identity is homotopic to the identity");
        assert_eq!(u, RingElem::ONE);
        assert!(
            homotopy_residual_is_zero(&f, &ChainMap::identity(&c), u, &h, &c, &c),
            "returned witness solves the homotopy equation"
        );
    }

    #[test]
    fn invertibility_over_the_ring() {
        assert!(is_invertible_over_k(&MatrixK::identity(3)));
        let mut m = MatrixK::identity(2);
        m.set(0, 1, RingElem::PI);
        assert!(is_invertible_over_k(&m));
        let mut half_dead = MatrixK::identity(2);
        half_dead.set(1, 1, RingElem::new(1, 1)); // 1 + pi vanishes at -1
        assert!(!is_invertible_over_k(&half_dead));
    }
}
