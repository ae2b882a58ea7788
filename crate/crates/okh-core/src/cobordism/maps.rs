//! Chain maps induced by elementary cobordisms — births, deaths, and
//! saddles — together with the vertexwise transport machinery that the
//! Reidemeister move equivalences reuse.
//!
//! Every builder takes the canonical complex of the source diagram,
//! produces the canonical complex of the rewritten diagram, and returns a
//! verified chain map between them. Maps that change the writhe carry an
//! explicit homological-degree shift.

use std::collections::{BTreeMap, VecDeque};

use super::rewrite;
use super::CobordismError;
use crate::complex::{ChainComplex, ChainMap, KhComplex};
use crate::cube::Cube;
use crate::diagram::resolve::CircleKey;
use crate::diagram::{Resolution, ResolvedDiagram};
use crate::ring::RingElem;
use crate::tqft::{self, MatrixK};

type Label = u32;

/// A chain map together with the homological-degree shift it induces:
/// the component stored at `deg` maps source degree `deg` into target
/// degree `deg + shift`.
#[derive(Clone, Debug)]
pub struct ShiftedChainMap {
    pub map: ChainMap,
    pub shift: i32,
}

impl ShiftedChainMap {
    pub fn plain(map: ChainMap) -> ShiftedChainMap {
        ShiftedChainMap { map, shift: 0 }
    }

    /// Composition `self after rhs`, accounting for both shifts.
    pub fn after(&self, rhs: &ShiftedChainMap) -> ShiftedChainMap {
        let mut maps = BTreeMap::new();
        for d in rhs.map.degrees() {
            if let Some(outer) = self.map.at(d + rhs.shift) {
                maps.insert(d, outer.mul(rhs.map.at(d).expect("keyed degree")));
            }
        }
        ShiftedChainMap {
            map: ChainMap::from_parts(maps),
            shift: self.shift + rhs.shift,
        }
    }

    /// True when the components square with the differentials of `src`
    /// and `tgt` after aligning degrees by the shift.
    pub fn is_chain_map(&self, src: &ChainComplex, tgt: &ChainComplex) -> bool {
        self.map.is_chain_map(src, &tgt.shifted(-self.shift))
    }

    /// The quantum-degree shift read off any nonzero entry, if one exists.
    pub fn q_shift(&self, src: &ChainComplex, tgt: &ChainComplex) -> Option<i32> {
        for (&d, m) in self.map.parts() {
            for col in 0..m.cols() as u32 {
                if let Some((row, _)) = m.col(col).next() {
                    let s = src.gens_at(d)[col as usize];
                    let t = tgt.gens_at(d + self.shift)[row as usize];
                    return Some(t.q - s.q);
                }
            }
        }
        None
    }
}

/// A rewritten diagram's canonical complex together with the induced map
/// from the source complex into it.
pub struct InducedMap {
    pub dst: KhComplex,
    pub map: ShiftedChainMap,
}

/// Bits of `alpha` with `bit` spliced in at position `k`.
pub(crate) fn embed_bits(alpha: u32, bit: u8, k: usize) -> u32 {
    (alpha & ((1u32 << k) - 1)) | (u32::from(bit) << k) | ((alpha >> k) << (k + 1))
}

/// The sub-block of `m` with `nr` rows starting at `r0` and `nc` columns
/// starting at `c0`.
pub(crate) fn sub_block(m: &MatrixK, r0: u32, nr: usize, c0: u32, nc: usize) -> MatrixK {
    let mut out = MatrixK::zero(nr, nc);
    for c in 0..nc {
        for (row, v) in m.col(c0 + c as u32) {
            if row >= r0 && ((row - r0) as usize) < nr {
                out.set(row - r0, c as u32, v);
            }
        }
    }
    out
}

/// The unit `u` with `p == u * q`, if any; `Ok(None)` when both matrices
/// are zero and the ratio is unconstrained.
pub(crate) fn unit_ratio(p: &MatrixK, q: &MatrixK) -> Result<Option<RingElem>, CobordismError> {
    if p.is_zero() && q.is_zero() {
        return Ok(None);
    }
    for u in RingElem::UNITS {
        if *p == q.scale(u) {
            return Ok(Some(u));
        }
    }
    Err(CobordismError::UnitComparisonFailed(
        "blocks are not unit-proportional",
    ))
}

/// Positions in `big` of the circles of `small`, matched through a key
/// translation. A translated arc key may name any arc on the target
/// circle, not only its least one.
pub(crate) fn circle_positions(
    small: &ResolvedDiagram,
    big: &ResolvedDiagram,
    to_big: impl Fn(CircleKey) -> CircleKey,
) -> Result<Vec<u32>, CobordismError> {
    small
        .keys()
        .into_iter()
        .map(|k| {
            let bk = to_big(k);
            match bk {
                CircleKey::Arc(a) => big.arc_pos(a).map(|(c, _)| c),
                CircleKey::Loop(_) => big.circle_of_key(bk),
            }
            .ok_or_else(|| {
                CobordismError::ShapeMismatch(format!("no circle matches key {bk:?}"))
            })
        })
        .collect()
}

/// Key translator for diagrams produced by fusing arcs away: fused arcs
/// keep a representative label, demoted loops name the arcs they swallowed.
pub(crate) fn fused_key(
    demoted: &BTreeMap<Label, std::collections::BTreeSet<Label>>,
) -> impl Fn(CircleKey) -> CircleKey + '_ {
    move |k| match k {
        CircleKey::Arc(a) => CircleKey::Arc(a),
        CircleKey::Loop(l) => match demoted.get(&l).and_then(|s| s.iter().next()) {
            Some(&a) => CircleKey::Arc(a),
            None => CircleKey::Loop(l),
        },
    }
}

/// One unscaled block of a prospective vertexwise chain map: `mat` sends
/// the source span starting at `src_start` inside the degree-`deg` slot of
/// the source complex to the target span starting at `dst_start`.
pub(crate) struct VBlock {
    pub deg: i32,
    pub src_start: u32,
    pub dst_start: u32,
    pub mat: MatrixK,
}

/// All edges of the `n`-dimensional cube on vertex bit-sets.
pub(crate) fn cube_edges(n: usize) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for alpha in 0u32..(1 << n) {
        for i in 0..n {
            if alpha & (1 << i) == 0 {
                out.push((alpha, alpha | (1 << i)));
            }
        }
    }
    out
}

/// Lays the scaled blocks into degree matrices sized by the complexes.
fn assemble_blocks<'a>(
    src: &ChainComplex,
    dst: &ChainComplex,
    blocks: impl Iterator<Item = (&'a VBlock, RingElem)>,
) -> ChainMap {
    let mut parts: BTreeMap<i32, MatrixK> = BTreeMap::new();
    for (b, c) in blocks {
        let m = parts
            .entry(b.deg)
            .or_insert_with(|| MatrixK::zero(dst.dim_at(b.deg), src.dim_at(b.deg)));
        for col in 0..b.mat.cols() as u32 {
            for (row, v) in b.mat.col(col) {
                m.set(b.dst_start + row, b.src_start + col, c * v);
            }
        }
    }
    ChainMap::from_parts(parts)
}

/// Scales the given vertex blocks by units so that they assemble into a
/// chain map `src -> dst`. With blocks `B` and the signed differentials
/// `D`, each edge forces `c_upper (B_upper D_src) = c_lower (D_dst
/// B_lower)`; scalars propagate from the least block key and the final
/// assembly is verified against both differentials.
pub(crate) fn scale_blocks_to_chain_map(
    src: &ChainComplex,
    dst: &ChainComplex,
    blocks: &BTreeMap<u32, VBlock>,
    edges: &[(u32, u32)],
) -> Result<ChainMap, CobordismError> {
    let mut adj: BTreeMap<u32, Vec<(u32, RingElem)>> = BTreeMap::new();
    for &(x, y) in edges {
        let bx = &blocks[&x];
        let by = &blocks[&y];
        debug_assert_eq!(by.deg, bx.deg + 1, "edge must raise the degree by one");
        let ds = sub_block(
            &src.diff_at(bx.deg),
            by.src_start,
            by.mat.cols(),
            bx.src_start,
            bx.mat.cols(),
        );
        let dd = sub_block(
            &dst.diff_at(bx.deg),
            by.dst_start,
            by.mat.rows(),
            bx.dst_start,
            bx.mat.rows(),
        );
        let p = by.mat.mul(&ds);
        let q = dd.mul(&bx.mat);
        // p = r q forces c_y r = c_x, and units are self-inverse
        if let Some(r) = unit_ratio(&p, &q)? {
            adj.entry(x).or_default().push((y, r));
            adj.entry(y).or_default().push((x, r));
        }
    }
    let mut scalars: BTreeMap<u32, RingElem> = BTreeMap::new();
    let mut queue: VecDeque<u32> = VecDeque::new();
    if let Some((&first, _)) = blocks.iter().next() {
        scalars.insert(first, RingElem::ONE);
        queue.push_back(first);
    }
    while let Some(v) = queue.pop_front() {
        let cv = scalars[&v];
        for &(w, r) in adj.get(&v).into_iter().flatten() {
            let want = cv * r;
            match scalars.get(&w) {
                Some(&have) if have != want => {
                    return Err(CobordismError::NotAChainMap(
                        "vertex scalars are inconsistent around a face",
                    ));
                }
                Some(_) => {}
                None => {
                    scalars.insert(w, want);
                    queue.push_back(w);
                }
            }
        }
    }
    let f = assemble_blocks(
        src,
        dst,
        blocks
            .iter()
            .map(|(k, b)| (b, scalars.get(k).copied().unwrap_or(RingElem::ONE))),
    );
    if !f.is_chain_map(src, dst) {
        return Err(CobordismError::NotAChainMap(
            "scaled blocks do not commute with the differentials",
        ));
    }
    Ok(f)
}

/// The chain map induced by adding a disjoint circle next to the diagram:
/// each resolution module includes into the enlarged one on the monomials
/// that do not touch the new circle. Returns the new loop's label with the
/// map; quantum degree rises by one, homological degree is unchanged.
pub fn birth_chain(src: &KhComplex) -> Result<(Label, InducedMap), CobordismError> {
    let (out, label) = rewrite::birth(src.cube().diagram());
    let dst = KhComplex::new(out, src.cube().mode())?;
    let n = src.cube().n();
    let mut blocks = BTreeMap::new();
    for alpha in Resolution::all(n) {
        let srd = src.cube().resolved(alpha);
        let drd = dst.cube().resolved(alpha);
        let f = circle_positions(srd, drd, |k| k)?;
        blocks.insert(
            alpha.0,
            VBlock {
                deg: src.degree_of(alpha),
                src_start: src.gen_index(alpha, 0),
                dst_start: dst.gen_index(alpha, 0),
                mat: tqft::relabel_matrix(srd.circle_count(), drd.circle_count(), &f),
            },
        );
    }
    let map = scale_blocks_to_chain_map(src.complex(), dst.complex(), &blocks, &cube_edges(n))?;
    Ok((
        label,
        InducedMap {
            dst,
            map: ShiftedChainMap::plain(map),
        },
    ))
}

/// The chain map induced by capping off the free loop `circle`: monomials
/// not covering the dying circle are killed, the rest contract, and each
/// vertex carries the parity of its super-degree shift so that the blocks
/// commute with the differentials.
pub fn death_chain(src: &KhComplex, circle: Label) -> Result<InducedMap, CobordismError> {
    let d = src.cube().diagram();
    let out = rewrite::death(d, circle)?;
    let dst = KhComplex::new(out, src.cube().mode())?;
    let n = src.cube().n();
    let mut blocks = BTreeMap::new();
    for alpha in Resolution::all(n) {
        let srd = src.cube().resolved(alpha);
        let drd = dst.cube().resolved(alpha);
        let j = srd
            .circle_of_key(CircleKey::Loop(circle))
            .ok_or_else(|| CobordismError::BadSite(format!("loop {circle} has no circle")))?;
        let mut f = vec![0u32; srd.circle_count()];
        for (i, k) in srd.keys().into_iter().enumerate() {
            if i as u32 == j {
                continue;
            }
            f[i] = match k {
                CircleKey::Arc(a) => drd.arc_pos(a).map(|(c, _)| c),
                CircleKey::Loop(_) => drd.circle_of_key(k),
            }
            .ok_or_else(|| CobordismError::ShapeMismatch(format!("lost circle key {k:?}")))?;
        }
        let shift = d.super_shift(alpha, srd);
        let mat = tqft::death_matrix(srd.circle_count(), drd.circle_count(), j, &f)
            .scale(RingElem::pi_pow(i64::from(shift)));
        blocks.insert(
            alpha.0,
            VBlock {
                deg: src.degree_of(alpha),
                src_start: src.gen_index(alpha, 0),
                dst_start: dst.gen_index(alpha, 0),
                mat,
            },
        );
    }
    let map = assemble_blocks(
        src.complex(),
        dst.complex(),
        blocks.values().map(|b| (b, RingElem::ONE)),
    );
    if !map.is_chain_map(src.complex(), dst.complex()) {
        return Err(CobordismError::NotAChainMap("death blocks"));
    }
    Ok(InducedMap {
        dst,
        map: ShiftedChainMap::plain(map),
    })
}

/// The chain map induced by oriented surgery along a band between sites
/// `p` and `q`. The band is adjoined as an extra crossing whose two facets
/// are the input and the output; both canonical sign assignments are
/// transported onto the facets, the band signs are solved to make the
/// enlarged cube anticommute, and the band edges — twisted by the source
/// degree parity — become the map. Homological degree moves by the change
/// in the negative crossing count.
pub fn saddle_chain(src: &KhComplex, p: Label, q: Label) -> Result<InducedMap, CobordismError> {
    let d = src.cube().diagram();
    let sd = rewrite::saddle(d, p, q)?;
    let mode = src.cube().mode();
    let dst = KhComplex::new(sd.output.clone(), mode)?;
    let star_cube = Cube::new(sd.star.clone(), mode)?;
    let band = sd.band;
    let n = src.cube().n();
    debug_assert_eq!(band, n, "band crossing is adjoined last");

    // relabel matrices from each facet's canonical modules into the star
    let mut w = [
        vec![MatrixK::zero(0, 0); 1 << n],
        vec![MatrixK::zero(0, 0); 1 << n],
    ];
    let mut seeds: BTreeMap<usize, RingElem> = BTreeMap::new();
    for facet in 0..2u8 {
        let kh = if facet == 0 { src } else { &dst };
        let lmap = if facet == 0 {
            &sd.input_map
        } else {
            &sd.output_map
        };
        for alpha in Resolution::all(n) {
            let small = kh.cube().resolved(alpha);
            let star_rd = star_cube.resolved(Resolution(embed_bits(alpha.0, facet, band)));
            let f = circle_positions(small, star_rd, |k| lmap.resolve(k))?;
            w[facet as usize][alpha.0 as usize] =
                tqft::relabel_matrix(small.circle_count(), star_rd.circle_count(), &f);
        }
        // seed the star's facet edges with the transported canonical signs
        for (alpha, i) in kh.cube().edge_ids() {
            let beta = alpha.with_bit(i, 1);
            let big = Resolution(embed_bits(alpha.0, facet, band));
            let p_side = w[facet as usize][beta.0 as usize].mul(&kh.cube().edge(alpha, i).map);
            let q_side = star_cube
                .edge(big, i)
                .map
                .mul(&w[facet as usize][alpha.0 as usize]);
            let r = unit_ratio(&p_side, &q_side)?
                .ok_or(CobordismError::SeedNotExtendable)?;
            let eps = kh.signs().eps(kh.cube(), alpha, i);
            seeds.insert(star_cube.edge_id(big, i), eps * r);
        }
    }
    let star_signs = star_cube
        .solve_signs_seeded(&seeds)
        .map_err(|_| CobordismError::SeedNotExtendable)?;

    // band edges, twisted by the source degree parity, form the map
    let mut blocks = BTreeMap::new();
    for alpha in Resolution::all(n) {
        let big = Resolution(embed_bits(alpha.0, 0, band));
        let w1_inv = w[1][alpha.0 as usize]
            .unit_monomial_inverse()
            .ok_or(CobordismError::ShapeMismatch(
                "facet relabel is not invertible".into(),
            ))?;
        let eps = star_signs.eps(&star_cube, big, band);
        let deg = src.degree_of(alpha);
        let twist = if deg.rem_euclid(2) == 1 {
            -RingElem::ONE
        } else {
            RingElem::ONE
        };
        let mat = w1_inv
            .mul(&star_cube.edge(big, band).map)
            .mul(&w[0][alpha.0 as usize])
            .scale(eps * twist);
        blocks.insert(
            alpha.0,
            VBlock {
                deg,
                src_start: src.gen_index(alpha, 0),
                dst_start: dst.gen_index(alpha, 0),
                mat,
            },
        );
    }
    let shift = dst.degree_of(Resolution(0)) - src.degree_of(Resolution(0));
    let aligned = dst.complex().shifted(-shift);
    let map = assemble_blocks(
        src.complex(),
        &aligned,
        blocks.values().map(|b| (b, RingElem::ONE)),
    );
    if !map.is_chain_map(src.complex(), &aligned) {
        return Err(CobordismError::NotAChainMap("saddle blocks"));
    }
    Ok(InducedMap {
        dst,
        map: ShiftedChainMap { map, shift },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::LadybugMode;
    use crate::diagram::{build, Diagram};

    fn kh(d: Diagram) -> KhComplex {
        KhComplex::new(d, LadybugMode::TypeY).expect("canonical complex")
    }

    #[test]
    fn birth_then_merge_is_the_identity_tube() {
        let src = kh(build::unknot());
        let (label, b) = birth_chain(&src).expect("birth");
        let s = saddle_chain(&b.dst, 0, label).expect("merge saddle");
        let tube = s.map.after(&b.map);
        assert_eq!(tube.shift, 0);
        assert_eq!(
            tube.map.equal_up_to_unit(&ChainMap::identity(src.complex())),
            Some(RingElem::ONE)
        );
    }

    #[test]
    fn pinch_then_cap_is_the_identity_up_to_a_unit() {
        let src = kh(build::unknot());
        let s = saddle_chain(&src, 0, 0).expect("pinch");
        let loops: Vec<u32> = s.dst.cube().diagram().free_loops().to_vec();
        assert_eq!(loops.len(), 2);
        for &l in &loops {
            let cap = death_chain(&s.dst, l).expect("cap");
            let comp = cap.map.after(&s.map);
            assert_eq!(comp.shift, 0);
            assert!(
                comp.map
                    .equal_up_to_unit(&ChainMap::identity(src.complex()))
                    .is_some(),
                "pinch then cap {l} is a unit times the identity"
            );
        }
    }

    #[test]
    fn sphere_evaluates_to_zero() {
        for d in [build::unknot(), build::trefoil(true)] {
            let src = kh(d);
            let (label, b) = birth_chain(&src).expect("birth");
            let cap = death_chain(&b.dst, label).expect("death");
            let sphere = cap.map.after(&b.map);
            assert!(sphere.map.is_zero(), "birth then death of the same circle");
        }
    }

    #[test]
    fn knot_saddle_is_a_verified_chain_map() {
        let src = kh(build::trefoil(true));
        let s = saddle_chain(&src, 0, 1).expect("saddle across the closure bigon");
        // the surgered diagram keeps all three crossings
        assert_eq!(s.dst.cube().n(), 3);
        assert!(!s.map.map.is_zero());
        let (neg_src, neg_dst) = (
            src.cube().diagram().signs().1,
            s.dst.cube().diagram().signs().1,
        );
        assert_eq!(s.map.shift, neg_src as i32 - neg_dst as i32);
        // already asserted inside the builder, but state the contract here
        assert!(s.map.is_chain_map(src.complex(), s.dst.complex()));
    }

    #[test]
    fn head_swap_saddle_merges_a_hopf_link_into_a_knot() {
        let src = kh(build::hopf(true));
        let s = saddle_chain(&src, 1, 3).expect("fusion site between the components");
        assert_eq!(s.dst.cube().diagram().component_count(), 1);
        assert!(!s.map.map.is_zero());
        assert!(s.map.is_chain_map(src.complex(), s.dst.complex()));
        // an oriented merge keeps every crossing sign, so no degree shift
        assert_eq!(s.map.shift, 0);
        assert_eq!(s.map.q_shift(src.complex(), s.dst.complex()), Some(-1));
    }

    #[test]
    fn birth_commutes_over_a_real_cube() {
        let src = kh(build::trefoil(true));
        let (_, b) = birth_chain(&src).expect("birth");
        assert!(b.map.is_chain_map(src.complex(), b.dst.complex()));
        let q = b.map.q_shift(src.complex(), b.dst.complex());
        assert_eq!(q, Some(1));
    }

    #[test]
    fn death_q_shift_is_plus_one() {
        let src = kh(build::unknot());
        let (label, b) = birth_chain(&src).expect("birth");
        let cap = death_chain(&b.dst, 0).expect("cap the other circle");
        assert_eq!(cap.map.q_shift(b.dst.complex(), cap.dst.complex()), Some(1));
        let _ = label;
    }
}
