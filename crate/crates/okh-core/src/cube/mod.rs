//! The resolution hypercube of a link diagram.
//!
//! Vertices carry the resolved diagrams, edges carry unsigned saddle maps
//! between the associated modules, and two-dimensional faces are classified
//! by how their two edge compositions compare. A global sign assignment
//! turning the cube into a chain complex is found by solving a linear system
//! over GF(2), optionally seeded with prescribed values on some edges.

mod gf2;

use std::collections::BTreeMap;
use std::fmt;

use crate::diagram::resolve::{CircleKey, Resolution, ResolvedDiagram};
use crate::diagram::{ArrowKind, Diagram};
use crate::ring::RingElem;
use crate::tqft::{merge_matrix, split_matrix, MatrixK};

/// Which of the two self-consistent sign conventions to use on the
/// one-circle faces that commute both on the nose and up to `pi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LadybugMode {
    TypeX,
    #[default]
    TypeY,
}

/// Classification of a square face by the relation between its two
/// composite edge maps and, for the ambiguous one-circle configuration,
/// by the chirality of the two chords.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceType {
    /// The two compositions agree exactly.
    C,
    /// The two compositions differ by `pi`.
    Pi,
    /// One-circle face, chords in the orientation-independent class X.
    X,
    /// One-circle face, chords in the class Y.
    Y,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CubeError {
    #[error("face at base {base} over crossings {i},{j} fits no commutation class")]
    UnclassifiableFace { base: String, i: usize, j: usize },
    #[error("sign system has no solution with the given seeds")]
    SignSystemInconsistent,
    #[error("seed value {0:?} is not a unit")]
    SeedNotAUnit(RingElem),
    #[error("the two assignments do not differ by a vertex rescaling")]
    NotCoboundary,
    #[error("diagram has {0} crossings, which exceeds the cube limit")]
    TooLarge(usize),
    #[error(
        "diagram is not drawable on a sphere: switching crossing {i} at \
         resolution {base} changes the circle count by {delta}"
    )]
    NotPlanar { base: String, i: usize, delta: i32 },
}

/// How an edge's saddle acts on the circles at its source vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// Circles `u` and `v` at the source fuse into `w` at the target.
    Merge { u: u32, v: u32, w: u32 },
    /// Circle `u` divides into `r1` (right of the arrow) and `r2`.
    Split { u: u32, r1: u32, r2: u32 },
}

/// One cube edge: the unsigned module map plus its combinatorial shape.
pub struct EdgeInfo {
    pub kind: EdgeKind,
    pub map: MatrixK,
}

/// A square face, identified by its minimal vertex and the two crossing
/// indices that vary across it. Always `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct FaceId {
    pub base: Resolution,
    pub i: usize,
    pub j: usize,
}

/// A unit on every edge of the cube. Indexed by `edge_id`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignAssignment {
    eps: Vec<RingElem>,
}

impl SignAssignment {
    pub fn eps(&self, cube: &Cube, base: Resolution, i: usize) -> RingElem {
        self.eps[cube.edge_id(base, i)]
    }

    /// Raw per-edge access for callers that track edge ids themselves.
    pub fn eps_by_id(&self, id: usize) -> RingElem {
        self.eps[id]
    }
}

pub struct Cube {
    diagram: Diagram,
    n: usize,
    mode: LadybugMode,
    resolved: Vec<ResolvedDiagram>,
    edges: Vec<Option<EdgeInfo>>,
    face_types: Vec<Option<FaceType>>,
}

impl fmt::Debug for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cube")
            .field("n", &self.n)
            .field("mode", &self.mode)
            .finish_non_exhaustive()
    }
}

/// Hard cap on cube dimension; above this the vertex tables alone are
/// unreasonable for the intended interactive scale.
const MAX_CROSSINGS: usize = 20;

impl Cube {
    pub fn new(diagram: Diagram, mode: LadybugMode) -> Result<Cube, CubeError> {
        let n = diagram.n_crossings();
        if n > MAX_CROSSINGS {
            return Err(CubeError::TooLarge(n));
        }
        let resolved: Vec<ResolvedDiagram> = (0..1u32 << n)
            .map(|bits| diagram.resolve(Resolution(bits)))
            .collect();
        // A sphere-drawable diagram changes its circle count by exactly one
        // whenever a single crossing's smoothing flips; anything else means
        // the combinatorial data has no planar realization.
        for bits in 0..1u32 << n {
            for i in 0..n {
                if bits >> i & 1 == 1 {
                    continue;
                }
                let a = resolved[bits as usize].circle_count() as i32;
                let b = resolved[(bits | (1 << i)) as usize].circle_count() as i32;
                if (a - b).abs() != 1 {
                    return Err(CubeError::NotPlanar {
                        base: Resolution(bits).display(n),
                        i,
                        delta: b - a,
                    });
                }
            }
        }
        let mut cube = Cube {
            diagram,
            n,
            mode,
            resolved,
            edges: Vec::new(),
            face_types: Vec::new(),
        };
        let stride = n.max(1);
        let edges: Vec<Option<EdgeInfo>> = (0..(1usize << n) * stride)
            .map(|id| {
                let (base, i) = (Resolution((id / stride) as u32), id % stride);
                (n > 0 && base.bit(i) == 0).then(|| cube.build_edge(base, i))
            })
            .collect();
        cube.edges = edges;
        cube.face_types = vec![None; (1usize << n) * stride * stride];
        for f in cube.face_ids() {
            let t = cube.classify_face(f)?;
            let slot = cube.face_slot(f);
            cube.face_types[slot] = Some(t);
        }
        Ok(cube)
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> LadybugMode {
        self.mode
    }

    pub fn resolved(&self, r: Resolution) -> &ResolvedDiagram {
        &self.resolved[r.0 as usize]
    }

    /// Dense index of the edge leaving `base` along crossing `i`.
    /// Ascending ids sort edges lexicographically by (base, i), the order
    /// the sign solver fixes its free variables in.
    pub fn edge_id(&self, base: Resolution, i: usize) -> usize {
        debug_assert!(i < self.n && base.bit(i) == 0);
        base.0 as usize * self.n + i
    }

    pub fn edge(&self, base: Resolution, i: usize) -> &EdgeInfo {
        self.edges[self.edge_id(base, i)]
            .as_ref()
            .expect("edge exists: bit i clear at base")
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = (Resolution, usize)> + '_ {
        (0..1u32 << self.n).flat_map(move |bits| {
            let base = Resolution(bits);
            (0..self.n)
                .filter(move |&i| base.bit(i) == 0)
                .map(move |i| (base, i))
        })
    }

    pub fn face_ids(&self) -> Vec<FaceId> {
        let mut out = Vec::new();
        for bits in 0..1u32 << self.n {
            let base = Resolution(bits);
            for i in 0..self.n {
                if base.bit(i) == 1 {
                    continue;
                }
                for j in i + 1..self.n {
                    if base.bit(j) == 0 {
                        out.push(FaceId { base, i, j });
                    }
                }
            }
        }
        out
    }

    fn face_slot(&self, f: FaceId) -> usize {
        (f.base.0 as usize * self.n + f.i) * self.n + f.j
    }

    pub fn face_type(&self, f: FaceId) -> FaceType {
        self.face_types[self.face_slot(f)].expect("face classified at build")
    }

    /// Maps each source circle to the target circle inheriting its strands.
    /// Valid for spectators and for merging circles; a splitting circle has
    /// no single image and must be overridden by the caller.
    fn circle_image(&self, src: &ResolvedDiagram, dst: &ResolvedDiagram, x: u32) -> u32 {
        let c = &src.circles[x as usize];
        match c.key {
            CircleKey::Loop(_) => dst
                .circle_of_key(c.key)
                .expect("free loop survives every resolution change"),
            CircleKey::Arc(_) => {
                dst.arc_pos(c.arcs[0])
                    .expect("arcs persist across resolutions")
                    .0
            }
        }
    }

    fn build_edge(&self, base: Resolution, i: usize) -> EdgeInfo {
        let target = base.with_bit(i, 1);
        let src = &self.resolved[base.0 as usize];
        let dst = &self.resolved[target.0 as usize];
        let u = src.corner(i as u32, 0).circle;
        let v = src.corner(i as u32, 1).circle;
        if u != v {
            let f: Vec<u32> = (0..src.circle_count() as u32)
                .map(|x| self.circle_image(src, dst, x))
                .collect();
            let w = f[u as usize];
            debug_assert_eq!(w, f[v as usize], "both merging circles land together");
            EdgeInfo {
                kind: EdgeKind::Merge { u, v, w },
                map: merge_matrix(src.circle_count(), dst.circle_count(), &f),
            }
        } else {
            // the two target-side corner arcs distinguish the offspring;
            // which is right of the arrow depends on the arrow flavor
            let d0 = dst.corner(i as u32, 0).circle;
            let d1 = dst.corner(i as u32, 1).circle;
            debug_assert_ne!(d0, d1, "a split produces two distinct circles");
            let (r1, r2) = match self.diagram.crossings()[i].arrow {
                ArrowKind::Single => (d1, d0),
                ArrowKind::Double => (d0, d1),
            };
            let f: Vec<u32> = (0..src.circle_count() as u32)
                .map(|x| {
                    if x == u {
                        r1
                    } else {
                        self.circle_image(src, dst, x)
                    }
                })
                .collect();
            EdgeInfo {
                kind: EdgeKind::Split { u, r1, r2 },
                map: split_matrix(src.circle_count(), dst.circle_count(), &f, r1, r2),
            }
        }
    }

    /// Composite along `i` then `j`, and along `j` then `i`.
    fn face_composites(&self, f: FaceId) -> (MatrixK, MatrixK) {
        let FaceId { base, i, j } = f;
        let bi = base.with_bit(i, 1);
        let bj = base.with_bit(j, 1);
        let m1 = self.edge(bi, j).map.mul(&self.edge(base, i).map);
        let m2 = self.edge(bj, i).map.mul(&self.edge(base, j).map);
        (m1, m2)
    }

    fn classify_face(&self, f: FaceId) -> Result<FaceType, CubeError> {
        let (m1, m2) = self.face_composites(f);
        let agree = m1 == m2;
        let agree_pi = m1 == m2.scale(RingElem::PI);
        match (agree, agree_pi) {
            (true, false) => Ok(FaceType::C),
            (false, true) => Ok(FaceType::Pi),
            (true, true) => self.ladybug_class(f),
            (false, false) => Err(CubeError::UnclassifiableFace {
                base: f.base.display(self.n),
                i: f.i,
                j: f.j,
            }),
        }
    }

    /// Orientation-independent chirality bit for the one-circle face.
    ///
    /// At the face's base vertex both crossings are chords of a single
    /// circle with interleaved feet. Normalize the traversal so that the
    /// channel of crossing `i`'s tail visit lies on the left; the class is
    /// decided by whether the first `j`-visit after that point is `j`'s
    /// tail or its head. Reversing the ambient traversal flips channel
    /// sides and walk direction together, so the answer is intrinsic.
    fn ladybug_class(&self, f: FaceId) -> Result<FaceType, CubeError> {
        let rd = &self.resolved[f.base.0 as usize];
        let tail_corner = |c: usize| match self.diagram.crossings()[c].arrow {
            ArrowKind::Single => 0u8,
            ArrowKind::Double => 1u8,
        };
        let unclassifiable = || CubeError::UnclassifiableFace {
            base: f.base.display(self.n),
            i: f.i,
            j: f.j,
        };
        let ti = rd.corner(f.i as u32, tail_corner(f.i));
        let tj = rd.corner(f.j as u32, tail_corner(f.j));
        let hi = rd.corner(f.i as u32, 1 - tail_corner(f.i));
        let hj = rd.corner(f.j as u32, 1 - tail_corner(f.j));
        if ti.circle != tj.circle || ti.circle != hi.circle || ti.circle != hj.circle {
            return Err(unclassifiable());
        }
        let circle = &rd.circles[ti.circle as usize];
        let len = circle.visits.len();
        let forward = circle.visits[ti.visit as usize].channel_left();
        let mut pos = ti.visit as usize;
        let first_is_tail = loop {
            pos = if forward {
                (pos + 1) % len
            } else {
                (pos + len - 1) % len
            };
            if pos == tj.visit as usize {
                break true;
            }
            if pos == hj.visit as usize {
                break false;
            }
            if pos == ti.visit as usize {
                return Err(unclassifiable());
            }
        };
        // one fixed global convention; the mode chooses which class carries
        // the extra pi in the face relation, not how classes are named
        Ok(if first_is_tail {
            FaceType::X
        } else {
            FaceType::Y
        })
    }

    /// The unit `sigma` with `M1 = sigma * M2` on this face, where `M1`
    /// composes the lower crossing first.
    pub fn face_sigma(&self, f: FaceId) -> RingElem {
        match (self.mode, self.face_type(f)) {
            (_, FaceType::C) => RingElem::ONE,
            (_, FaceType::Pi) => RingElem::PI,
            (LadybugMode::TypeY, FaceType::X) | (LadybugMode::TypeX, FaceType::Y) => RingElem::ONE,
            (LadybugMode::TypeY, FaceType::Y) | (LadybugMode::TypeX, FaceType::X) => RingElem::PI,
        }
    }

    /// Checks that `sigma` is a cocycle: over every 3-dimensional subcube
    /// the product of the six face units is 1. A failure here means no
    /// consistent sign assignment can exist.
    pub fn sigma_cocycle_ok(&self) -> bool {
        for bits in 0..1u32 << self.n {
            let base = Resolution(bits);
            for i in 0..self.n {
                for j in i + 1..self.n {
                    for k in j + 1..self.n {
                        if base.bit(i) == 1 || base.bit(j) == 1 || base.bit(k) == 1 {
                            continue;
                        }
                        let faces = [
                            FaceId { base, i, j },
                            FaceId { base, i, j: k },
                            FaceId { base, i: j, j: k },
                            FaceId {
                                base: base.with_bit(k, 1),
                                i,
                                j,
                            },
                            FaceId {
                                base: base.with_bit(j, 1),
                                i,
                                j: k,
                            },
                            FaceId {
                                base: base.with_bit(i, 1),
                                i: j,
                                j: k,
                            },
                        ];
                        let prod = faces
                            .iter()
                            .fold(RingElem::ONE, |acc, &f| acc * self.face_sigma(f));
                        if prod != RingElem::ONE {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Solves for edge units making every face anticommute:
    /// `eps2 eps1 M1 + eps4 eps3 M2 = 0`. Free variables take the value 1,
    /// chosen in ascending edge id order.
    pub fn solve_signs(&self) -> Result<SignAssignment, CubeError> {
        self.solve_signs_seeded(&BTreeMap::new())
    }

    /// Same, with the units of the given edges prescribed. Seeds must be
    /// units; an unsatisfiable seeded system is reported, not patched.
    pub fn solve_signs_seeded(
        &self,
        fixed: &BTreeMap<usize, RingElem>,
    ) -> Result<SignAssignment, CubeError> {
        // compact variable indices for the non-seeded edges, in edge id order
        let mut var_of_edge: BTreeMap<usize, usize> = BTreeMap::new();
        for (base, i) in self.edge_ids() {
            let id = self.edge_id(base, i);
            if !fixed.contains_key(&id) {
                let next = var_of_edge.len();
                var_of_edge.insert(id, next);
            }
        }
        let mut seed_bits: BTreeMap<usize, (bool, bool)> = BTreeMap::new();
        for (&id, &val) in fixed {
            seed_bits.insert(id, unit_bits(val).ok_or(CubeError::SeedNotAUnit(val))?);
        }
        let mut sys = gf2::System::new(var_of_edge.len());
        for f in self.face_ids() {
            let FaceId { base, i, j } = f;
            let ids = [
                self.edge_id(base, i),
                self.edge_id(base.with_bit(i, 1), j),
                self.edge_id(base, j),
                self.edge_id(base.with_bit(j, 1), i),
            ];
            // product of the four units must be -sigma
            let (mut rhs_sign, mut rhs_pi) = (true, self.face_sigma(f) == RingElem::PI);
            let mut cols = Vec::with_capacity(4);
            for id in ids {
                match var_of_edge.get(&id) {
                    Some(&v) => cols.push(v),
                    None => {
                        let (s, p) = seed_bits[&id];
                        rhs_sign ^= s;
                        rhs_pi ^= p;
                    }
                }
            }
            sys.add_equation(&cols, rhs_sign, rhs_pi);
        }
        let (xs, ys) = sys.solve().ok_or(CubeError::SignSystemInconsistent)?;
        let mut eps = vec![RingElem::ONE; self.edges.len().max(1)];
        for (&id, &var) in &var_of_edge {
            eps[id] = unit_from_bits(xs[var], ys[var]);
        }
        for (&id, &val) in fixed {
            eps[id] = val;
        }
        Ok(SignAssignment { eps })
    }

    /// Direct check that the assignment squares the differential to zero on
    /// every face, at the level of matrices. Independent of classification.
    pub fn validate_signs(&self, sa: &SignAssignment) -> bool {
        for f in self.face_ids() {
            let FaceId { base, i, j } = f;
            let (m1, m2) = self.face_composites(f);
            let c1 = sa.eps(self, base, i) * sa.eps(self, base.with_bit(i, 1), j);
            let c2 = sa.eps(self, base, j) * sa.eps(self, base.with_bit(j, 1), i);
            if !m1.scale(c1).add(&m2.scale(c2)).is_zero() {
                return false;
            }
        }
        true
    }

    /// Expresses one valid assignment as the other multiplied through a
    /// vertex rescaling: returns `eta` with
    /// `eta(target) * eps1(e) = eps2(e) * eta(source)` for every edge `e`.
    /// Fails if the two differ by something other than a coboundary.
    pub fn transition_cochain(
        &self,
        eps1: &SignAssignment,
        eps2: &SignAssignment,
    ) -> Result<Vec<RingElem>, CubeError> {
        // all units square to 1, so each ratio is a plain product
        let ratios: Vec<RingElem> = (0..self.n << self.n)
            .map(|id| eps1.eps_by_id(id) * eps2.eps_by_id(id))
            .collect();
        self.vertex_cochain(&ratios)
    }

    /// Finds a unit 0-cochain `eta` with `eta[tgt] * eta[src] = ratio[edge]`
    /// for every edge, normalized by `eta[0] = 1`, or reports that the given
    /// edge ratios are not a coboundary. `ratios` is indexed by edge id.
    pub fn vertex_cochain(&self, ratios: &[RingElem]) -> Result<Vec<RingElem>, CubeError> {
        let verts = 1usize << self.n;
        let mut eta: Vec<Option<RingElem>> = vec![None; verts];
        eta[0] = Some(RingElem::ONE);
        let mut queue = std::collections::VecDeque::from([Resolution(0)]);
        while let Some(at) = queue.pop_front() {
            let here = eta[at.0 as usize].expect("queued vertices are set");
            for i in 0..self.n {
                // walk both directions so every vertex is reached from 0
                let (lo, next) = if at.bit(i) == 1 {
                    (at.with_bit(i, 0), at.with_bit(i, 0))
                } else {
                    (at, at.with_bit(i, 1))
                };
                let id = self.edge_id(lo, i);
                let val = here * ratios[id];
                match eta[next.0 as usize] {
                    None => {
                        eta[next.0 as usize] = Some(val);
                        queue.push_back(next);
                    }
                    Some(seen) if seen == val => {}
                    Some(_) => return Err(CubeError::NotCoboundary),
                }
            }
        }
        Ok(eta.into_iter().map(|v| v.expect("cube connected")).collect())
    }
}

/// Decomposes a unit as `(-1)^s * pi^p`, if it is one.
fn unit_bits(u: RingElem) -> Option<(bool, bool)> {
    match (u.a, u.b) {
        (1, 0) => Some((false, false)),
        (-1, 0) => Some((true, false)),
        (0, 1) => Some((false, true)),
        (0, -1) => Some((true, true)),
        _ => None,
    }
}

fn unit_from_bits(sign: bool, pi: bool) -> RingElem {
    match (sign, pi) {
        (false, false) => RingElem::ONE,
        (true, false) => -RingElem::ONE,
        (false, true) => RingElem::PI,
        (true, true) => -RingElem::PI,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::build;

    fn full_check(d: Diagram, mode: LadybugMode) -> (Cube, SignAssignment) {
        let cube = Cube::new(d, mode).expect("cube builds");
        assert!(cube.sigma_cocycle_ok(), "sigma must be a cocycle");
        let sa = cube.solve_signs().expect("sign system solvable");
        assert!(cube.validate_signs(&sa), "faces must anticommute");
        (cube, sa)
    }

    #[test]
    fn trefoil_cube_signs_work_in_both_modes() {
        for mode in [LadybugMode::TypeY, LadybugMode::TypeX] {
            full_check(build::trefoil(true), mode);
            full_check(build::trefoil(false), mode);
        }
    }

    #[test]
    fn hopf_and_figure_eight_cubes_sign_consistently() {
        full_check(build::hopf(true), LadybugMode::TypeY);
        full_check(build::hopf(false), LadybugMode::TypeY);
        full_check(build::figure_eight(), LadybugMode::TypeY);
        full_check(build::figure_eight(), LadybugMode::TypeX);
    }

    #[test]
    fn twist_knots_have_both_one_circle_classes() {
        // parallel twist regions produce the interleaved-chord squares that
        // torus braids on two strands never do
        for mode in [LadybugMode::TypeY, LadybugMode::TypeX] {
            let d = build::two_bridge(&[3, 2]).unwrap();
            let (cube, _) = full_check(d, mode);
            let (mut seen_x, mut seen_y) = (false, false);
            for f in cube.face_ids() {
                let t = cube.face_type(f);
                if !matches!(t, FaceType::X | FaceType::Y) {
                    continue;
                }
                seen_x |= t == FaceType::X;
                seen_y |= t == FaceType::Y;
                // such a face really does sit on a single circle
                let rd = cube.resolved(f.base);
                let c = rd.corner(f.i as u32, 0).circle;
                for (cr, corner) in [(f.i, 1u8), (f.j, 0), (f.j, 1)] {
                    assert_eq!(rd.corner(cr as u32, corner).circle, c);
                }
            }
            assert!(seen_x && seen_y, "both chirality classes occur");
        }
    }

    #[test]
    fn one_circle_rich_cubes_sign_consistently() {
        // these carry dozens of interleaved-chord faces, so a wrong
        // chirality bit would wreck the cocycle condition checked inside
        full_check(build::two_bridge(&[3, 1, 2]).unwrap(), LadybugMode::TypeY);
        full_check(build::two_bridge(&[2, 1, 1, 2]).unwrap(), LadybugMode::TypeX);
    }

    #[test]
    fn arrow_flip_changes_split_sides() {
        let d = build::trefoil(true);
        let flipped = d.with_arrow_flipped(1);
        let (c1, _) = full_check(d, LadybugMode::TypeY);
        let (c2, _) = full_check(flipped, LadybugMode::TypeY);
        // the flipped crossing's split edges exchange their offspring roles
        let mut differ = false;
        for (base, i) in c1.edge_ids() {
            if i != 1 {
                continue;
            }
            if let (EdgeKind::Split { r1: a, .. }, EdgeKind::Split { r1: b, .. }) =
                (c1.edge(base, i).kind, c2.edge(base, i).kind)
            {
                if a != b {
                    differ = true;
                }
            }
        }
        assert!(differ, "flipping an arrow must exchange some split side");
    }

    #[test]
    fn seeded_solve_respects_seeds() {
        let d = build::hopf(true);
        let cube = Cube::new(d, LadybugMode::TypeY).unwrap();
        let free = cube.solve_signs().unwrap();
        // re-solve pinning one edge to the opposite of its free value
        let (base, i) = cube.edge_ids().next().unwrap();
        let id = cube.edge_id(base, i);
        let pinned = -free.eps_by_id(id);
        let mut fixed = BTreeMap::new();
        fixed.insert(id, pinned);
        let sa = cube.solve_signs_seeded(&fixed).unwrap();
        assert_eq!(sa.eps_by_id(id), pinned);
        assert!(cube.validate_signs(&sa));
    }

    #[test]
    fn two_solutions_differ_by_a_coboundary() {
        let d = build::trefoil(true);
        let cube = Cube::new(d, LadybugMode::TypeY).unwrap();
        let sa1 = cube.solve_signs().unwrap();
        let (base, i) = cube.edge_ids().nth(3).unwrap();
        let id = cube.edge_id(base, i);
        let mut fixed = BTreeMap::new();
        fixed.insert(id, sa1.eps_by_id(id) * RingElem::PI);
        let sa2 = cube.solve_signs_seeded(&fixed).unwrap();
        assert!(cube.validate_signs(&sa2));
        let eta = cube.transition_cochain(&sa1, &sa2).expect("coboundary");
        // spot-check the defining relation on every edge
        for (b, k) in cube.edge_ids() {
            let t = b.with_bit(k, 1);
            let lhs = eta[t.0 as usize] * sa1.eps(&cube, b, k);
            let rhs = sa2.eps(&cube, b, k) * eta[b.0 as usize];
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn unknot_cube_is_trivial() {
        let cube = Cube::new(build::unknot(), LadybugMode::TypeY).unwrap();
        assert_eq!(cube.n(), 0);
        assert!(cube.face_ids().is_empty());
        let sa = cube.solve_signs().unwrap();
        assert!(cube.validate_signs(&sa));
    }

    #[test]
    fn modes_differ_only_on_one_circle_faces() {
        let d = build::figure_eight();
        let cy = Cube::new(d.clone(), LadybugMode::TypeY).unwrap();
        let cx = Cube::new(d, LadybugMode::TypeX).unwrap();
        for f in cy.face_ids() {
            assert_eq!(cy.face_type(f), cx.face_type(f));
            match cy.face_type(f) {
                FaceType::C | FaceType::Pi => {
                    assert_eq!(cy.face_sigma(f), cx.face_sigma(f));
                }
                FaceType::X | FaceType::Y => {
                    assert_eq!(cy.face_sigma(f), cx.face_sigma(f) * RingElem::PI);
                }
            }
        }
    }
}
