//! Chain complexes of free modules over the ground ring, chain maps between
//! them, and the assembly of a link diagram's homology complex from its
//! signed resolution cube.
//!
//! Generators carry a quantum grading and a shifted super grading; the
//! differential preserves both, which is asserted during assembly and
//! relied on by the grading-split homology computation.

pub mod homology;
pub mod reduce;
pub mod snf;

use std::collections::BTreeMap;

use crate::cube::{Cube, CubeError, LadybugMode, SignAssignment};
use crate::diagram::resolve::Resolution;
use crate::diagram::Diagram;
use crate::ring::RingElem;
use crate::tqft::{monomial_q, monomial_super, MatrixK, Monomial};

/// One free-module basis element with its gradings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Generator {
    pub q: i32,
    /// Shifted super degree in {0, 1}; preserved by the differential.
    pub sdeg: u8,
}

/// A bounded complex of free modules. Slot `t` holds homological degree
/// `min_deg + t`; `diffs[t]` maps slot `t` to slot `t + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainComplex {
    min_deg: i32,
    gens: Vec<Vec<Generator>>,
    diffs: Vec<MatrixK>,
}

impl ChainComplex {
    pub fn new(min_deg: i32, gens: Vec<Vec<Generator>>, diffs: Vec<MatrixK>) -> ChainComplex {
        assert_eq!(diffs.len() + 1, gens.len().max(1), "one differential per adjacent pair");
        for (t, d) in diffs.iter().enumerate() {
            assert_eq!(d.cols(), gens[t].len(), "differential source dim");
            assert_eq!(d.rows(), gens[t + 1].len(), "differential target dim");
        }
        ChainComplex { min_deg, gens, diffs }
    }

    /// The empty complex.
    pub fn empty() -> ChainComplex {
        ChainComplex { min_deg: 0, gens: vec![Vec::new()], diffs: Vec::new() }
    }

    pub fn min_deg(&self) -> i32 {
        self.min_deg
    }

    pub fn max_deg(&self) -> i32 {
        self.min_deg + self.gens.len() as i32 - 1
    }

    pub fn n_slots(&self) -> usize {
        self.gens.len()
    }

    pub fn dim(&self, slot: usize) -> usize {
        self.gens.get(slot).map_or(0, |g| g.len())
    }

    pub fn dim_at(&self, deg: i32) -> usize {
        self.slot_of(deg).map_or(0, |t| self.dim(t))
    }

    pub fn total_dim(&self) -> usize {
        self.gens.iter().map(|g| g.len()).sum()
    }

    pub fn gens(&self, slot: usize) -> &[Generator] {
        &self.gens[slot]
    }

    pub fn gens_at(&self, deg: i32) -> &[Generator] {
        static EMPTY: [Generator; 0] = [];
        self.slot_of(deg).map_or(&EMPTY[..], |t| &self.gens[t])
    }

    pub fn slot_of(&self, deg: i32) -> Option<usize> {
        let t = deg - self.min_deg;
        (0..self.gens.len() as i32).contains(&t).then_some(t as usize)
    }

    pub fn deg_of(&self, slot: usize) -> i32 {
        self.min_deg + slot as i32
    }

    pub fn diff(&self, slot: usize) -> &MatrixK {
        &self.diffs[slot]
    }

    /// Differential leaving homological degree `deg`, zero-shaped when the
    /// complex has nothing there.
    pub fn diff_at(&self, deg: i32) -> MatrixK {
        match self.slot_of(deg) {
            Some(t) if t < self.diffs.len() => self.diffs[t].clone(),
            Some(t) => MatrixK::zero(0, self.dim(t)),
            None => MatrixK::zero(self.dim_at(deg + 1), 0),
        }
    }

    pub fn d_squared_is_zero(&self) -> bool {
        self.diffs
            .windows(2)
            .all(|w| w[1].mul(&w[0]).is_zero())
    }

    /// Every nonzero differential entry must connect generators of equal
    /// quantum and super degree.
    pub fn is_homogeneous(&self) -> bool {
        self.diffs.iter().enumerate().all(|(t, d)| {
            (0..d.cols() as u32).all(|col| {
                d.col(col).all(|(row, _)| {
                    let src = self.gens[t][col as usize];
                    let tgt = self.gens[t + 1][row as usize];
                    src.q == tgt.q && src.sdeg == tgt.sdeg
                })
            })
        })
    }

    /// Degreewise direct sum, self's generators listed first.
    pub fn direct_sum(&self, other: &ChainComplex) -> ChainComplex {
        let min = self.min_deg.min(other.min_deg);
        let max = self.max_deg().max(other.max_deg());
        let mut gens = Vec::new();
        let mut diffs = Vec::new();
        for deg in min..=max {
            let mut g = self.gens_at(deg).to_vec();
            g.extend_from_slice(other.gens_at(deg));
            gens.push(g);
        }
        for deg in min..max {
            let (a, b) = (self.diff_at(deg), other.diff_at(deg));
            let rows = self.dim_at(deg + 1) + other.dim_at(deg + 1);
            let cols = self.dim_at(deg) + other.dim_at(deg);
            let mut m = MatrixK::zero(rows, cols);
            let (ro, co) = (self.dim_at(deg + 1) as u32, self.dim_at(deg) as u32);
            for col in 0..a.cols() as u32 {
                for (row, v) in a.col(col) {
                    m.set(row, col, v);
                }
            }
            for col in 0..b.cols() as u32 {
                for (row, v) in b.col(col) {
                    m.set(ro + row, co + col, v);
                }
            }
            diffs.push(m);
        }
        ChainComplex::new(min, gens, diffs)
    }

    /// The same complex with every homological degree moved by `delta`.
    pub fn shifted(&self, delta: i32) -> ChainComplex {
        ChainComplex {
            min_deg: self.min_deg + delta,
            gens: self.gens.clone(),
            diffs: self.diffs.clone(),
        }
    }
}

/// A degree-zero chain map, stored as its nonzero degree components.
/// Matrices are target-dimension by source-dimension.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ChainMap {
    maps: BTreeMap<i32, MatrixK>,
}

impl ChainMap {
    pub fn zero() -> ChainMap {
        ChainMap::default()
    }

    pub fn identity(c: &ChainComplex) -> ChainMap {
        let mut maps = BTreeMap::new();
        for t in 0..c.n_slots() {
            if c.dim(t) > 0 {
                maps.insert(c.deg_of(t), MatrixK::identity(c.dim(t)));
            }
        }
        ChainMap { maps }
    }

    pub fn from_parts(maps: BTreeMap<i32, MatrixK>) -> ChainMap {
        ChainMap { maps }
    }

    pub fn insert(&mut self, deg: i32, m: MatrixK) {
        if !m.is_zero() || (m.rows() > 0 && m.cols() > 0) {
            self.maps.insert(deg, m);
        }
    }

    pub fn at(&self, deg: i32) -> Option<&MatrixK> {
        self.maps.get(&deg)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.maps.keys().copied()
    }

    pub fn parts(&self) -> &BTreeMap<i32, MatrixK> {
        &self.maps
    }

    /// The same components stored under keys moved by `delta`.
    pub fn rekeyed(&self, delta: i32) -> ChainMap {
        ChainMap {
            maps: self.maps.iter().map(|(&d, m)| (d + delta, m.clone())).collect(),
        }
    }

    /// self after rhs: both indexed by homological degree.
    pub fn compose(&self, rhs: &ChainMap) -> ChainMap {
        let mut maps = BTreeMap::new();
        for (&deg, inner) in &rhs.maps {
            if let Some(outer) = self.maps.get(&deg) {
                maps.insert(deg, outer.mul(inner));
            }
        }
        ChainMap { maps }
    }

    pub fn add(&self, rhs: &ChainMap) -> ChainMap {
        let mut maps = self.maps.clone();
        for (&deg, m) in &rhs.maps {
            match maps.get_mut(&deg) {
                Some(have) => *have = have.add(m),
                None => {
                    maps.insert(deg, m.clone());
                }
            }
        }
        ChainMap { maps }
    }

    pub fn sub(&self, rhs: &ChainMap) -> ChainMap {
        self.add(&rhs.scale(-RingElem::ONE))
    }

    pub fn scale(&self, s: RingElem) -> ChainMap {
        ChainMap {
            maps: self.maps.iter().map(|(&d, m)| (d, m.scale(s))).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.maps.values().all(MatrixK::is_zero)
    }

    /// Verifies the chain map square `tgt.d * F = F * src.d` in every degree
    /// and that component shapes match the two complexes.
    pub fn is_chain_map(&self, src: &ChainComplex, tgt: &ChainComplex) -> bool {
        for (&deg, m) in &self.maps {
            if m.is_zero() {
                continue;
            }
            if m.cols() != src.dim_at(deg) || m.rows() != tgt.dim_at(deg) {
                return false;
            }
        }
        let lo = src.min_deg.min(tgt.min_deg) - 1;
        let hi = src.max_deg().max(tgt.max_deg()) + 1;
        for deg in lo..=hi {
            let f_here = self.component(deg, src, tgt);
            let f_next = self.component(deg + 1, src, tgt);
            let lhs = tgt.diff_at(deg).mul(&f_here);
            let rhs = f_next.mul(&src.diff_at(deg));
            if lhs != rhs {
                return false;
            }
        }
        true
    }

    /// The degree component as a correctly shaped matrix, zero if absent.
    pub fn component(&self, deg: i32, src: &ChainComplex, tgt: &ChainComplex) -> MatrixK {
        match self.maps.get(&deg) {
            Some(m) => m.clone(),
            None => MatrixK::zero(tgt.dim_at(deg), src.dim_at(deg)),
        }
    }

    /// Finds a unit `u` with `self = u * other` degreewise, if one exists.
    pub fn equal_up_to_unit(&self, other: &ChainMap) -> Option<RingElem> {
        let degs: std::collections::BTreeSet<i32> = self
            .maps
            .keys()
            .chain(other.maps.keys())
            .copied()
            .collect();
        'units: for u in RingElem::UNITS {
            for &d in &degs {
                let ok = match (self.maps.get(&d), other.maps.get(&d)) {
                    (Some(a), Some(b)) => *a == b.scale(u),
                    (Some(a), None) => a.is_zero(),
                    (None, Some(b)) => b.is_zero(),
                    (None, None) => true,
                };
                if !ok {
                    continue 'units;
                }
            }
            return Some(u);
        }
        None
    }
}

/// Mapping cone of `f: src -> tgt`: degree `d` holds `src` at `d + 1` next
/// to `tgt` at `d`, with differential `(x, y) -> (-d x, f x + d y)`.
/// Generator gradings are carried over unchanged from their origins.
pub fn cone(f: &ChainMap, src: &ChainComplex, tgt: &ChainComplex) -> ChainComplex {
    let min = (src.min_deg - 1).min(tgt.min_deg);
    let max = (src.max_deg() - 1).max(tgt.max_deg());
    let mut gens = Vec::new();
    let mut diffs = Vec::new();
    for deg in min..=max {
        let mut g = src.gens_at(deg + 1).to_vec();
        g.extend_from_slice(tgt.gens_at(deg));
        gens.push(g);
    }
    for deg in min..max {
        let ds = src.diff_at(deg + 1);
        let dt = tgt.diff_at(deg);
        let fm = f.component(deg + 1, src, tgt);
        let rows = src.dim_at(deg + 2) + tgt.dim_at(deg + 1);
        let cols = src.dim_at(deg + 1) + tgt.dim_at(deg);
        let (ro, co) = (src.dim_at(deg + 2) as u32, src.dim_at(deg + 1) as u32);
        let mut m = MatrixK::zero(rows, cols);
        for col in 0..ds.cols() as u32 {
            for (row, v) in ds.col(col) {
                m.set(row, col, -v);
            }
        }
        for col in 0..fm.cols() as u32 {
            for (row, v) in fm.col(col) {
                m.set(ro + row, col, v);
            }
        }
        for col in 0..dt.cols() as u32 {
            for (row, v) in dt.col(col) {
                m.set(ro + row, co + col, v);
            }
        }
        diffs.push(m);
    }
    ChainComplex::new(min, gens, diffs)
}

/// The homology complex of a link diagram: its cube, the sign assignment in
/// force, the assembled complex, and the generator layout needed to build
/// chain maps level by level.
pub struct KhComplex {
    cube: Cube,
    signs: SignAssignment,
    complex: ChainComplex,
    offsets: Vec<u32>,
}

impl KhComplex {
    pub fn new(diagram: Diagram, mode: LadybugMode) -> Result<KhComplex, CubeError> {
        let cube = Cube::new(diagram, mode)?;
        let signs = cube.solve_signs()?;
        Ok(KhComplex::with_signs(cube, signs))
    }

    /// Assembles the complex for an already signed cube. The homological
    /// span is `-n_minus .. n_plus`; generator order within a degree is by
    /// vertex bits ascending, then monomial ascending.
    pub fn with_signs(cube: Cube, signs: SignAssignment) -> KhComplex {
        let n = cube.n();
        let d = cube.diagram();
        let (n_plus, n_minus) = d.signs();
        let q_shift = n_plus as i32 - 2 * n_minus as i32;
        let mut offsets = vec![0u32; 1 << n];
        let mut dims = vec![0u32; n + 1];
        let mut gens: Vec<Vec<Generator>> = vec![Vec::new(); n + 1];
        for bits in 0..1u32 << n {
            let alpha = Resolution(bits);
            let w = alpha.weight() as usize;
            offsets[bits as usize] = dims[w];
            let rd = cube.resolved(alpha);
            let c = rd.circle_count();
            dims[w] += 1u32 << c;
            let shift = d.super_shift(alpha, rd);
            for m in 0..1u32 << c {
                gens[w].push(Generator {
                    q: monomial_q(c, m) + w as i32 + q_shift,
                    sdeg: ((monomial_super(m) as i32 + shift).rem_euclid(2)) as u8,
                });
            }
        }
        let mut diffs: Vec<MatrixK> = (0..n)
            .map(|w| MatrixK::zero(dims[w + 1] as usize, dims[w] as usize))
            .collect();
        for (alpha, i) in cube.edge_ids() {
            let w = alpha.weight() as usize;
            let beta = alpha.with_bit(i, 1);
            let eps = signs.eps(&cube, alpha, i);
            let (src_off, tgt_off) = (offsets[alpha.0 as usize], offsets[beta.0 as usize]);
            let edge = cube.edge(alpha, i);
            for col in 0..edge.map.cols() as u32 {
                for (row, v) in edge.map.col(col) {
                    diffs[w].add_to(tgt_off + row, src_off + col, eps * v);
                }
            }
        }
        let complex = ChainComplex::new(-(n_minus as i32), gens, diffs);
        debug_assert!(complex.is_homogeneous(), "gradings must be preserved");
        KhComplex { cube, signs, complex, offsets }
    }

    pub fn cube(&self) -> &Cube {
        &self.cube
    }

    pub fn signs(&self) -> &SignAssignment {
        &self.signs
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn into_complex(self) -> ChainComplex {
        self.complex
    }

    /// Homological degree of a vertex's generators.
    pub fn degree_of(&self, alpha: Resolution) -> i32 {
        self.complex.min_deg + alpha.weight() as i32
    }

    /// Index of generator `(alpha, m)` within its degree slot.
    pub fn gen_index(&self, alpha: Resolution, m: Monomial) -> u32 {
        self.offsets[alpha.0 as usize] + m
    }

    /// Inverse of `gen_index`: which vertex and monomial a degree-slot
    /// index refers to.
    pub fn gen_decode(&self, deg: i32, idx: u32) -> (Resolution, Monomial) {
        let n = self.cube.n();
        let w = (deg - self.complex.min_deg) as u32;
        let mut best: Option<Resolution> = None;
        for bits in 0..1u32 << n {
            let alpha = Resolution(bits);
            if alpha.weight() == w && self.offsets[bits as usize] <= idx {
                // offsets grow with bits inside a weight class, so the last
                // vertex whose offset does not exceed idx owns it
                best = Some(alpha);
            }
        }
        let alpha = best.expect("index within the degree slot");
        (alpha, idx - self.offsets[alpha.0 as usize])
    }

    /// All vertices of the cube in the fixed generator order used by
    /// `with_signs`: ascending bits within each weight class.
    pub fn vertices_of_degree(&self, deg: i32) -> Vec<Resolution> {
        let n = self.cube.n();
        let w = deg - self.complex.min_deg;
        (0..1u32 << n)
            .map(Resolution)
            .filter(|a| a.weight() as i32 == w)
            .collect()
    }
}
