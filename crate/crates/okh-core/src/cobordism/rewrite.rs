//! Diagram surgery for movie events. Every rewrite returns the new diagram
//! together with the bookkeeping (fresh labels, crossing positions, label
//! correspondences) that the chain-map builders consume.
//!
//! Label policy: fresh arc and loop labels are allocated from
//! `Diagram::next_label()`; an arc that keeps its tail keeps its label, and
//! arcs fused through a removed crossing inherit the smallest member label.
//! This keeps labels stable along strands, which the circle matchers rely
//! on.

use std::collections::{BTreeMap, BTreeSet};

use super::CobordismError;
use crate::diagram::resolve::CircleKey;
use crate::diagram::{through_partner, ArrowKind, Diagram, Endpoint};

type Label = u32;
type Tuple = ([Label; 4], ArrowKind);

/// How the labels of a smaller diagram sit inside a bigger one. Arcs not
/// listed map to the big arc with the same label; loops not listed map to
/// the big loop with the same label.
#[derive(Debug, Clone, Default)]
pub struct LabelMap {
    pub arc: BTreeMap<Label, Label>,
    /// Small free loops that appear as arc-bearing circles on the big side.
    pub loop_to_arc: BTreeMap<Label, Label>,
}

impl LabelMap {
    /// The big-side key that the small-side circle key should land on.
    pub fn resolve(&self, key: CircleKey) -> CircleKey {
        match key {
            CircleKey::Arc(a) => CircleKey::Arc(self.arc.get(&a).copied().unwrap_or(a)),
            CircleKey::Loop(l) => match self.loop_to_arc.get(&l) {
                Some(&a) => CircleKey::Arc(a),
                None => CircleKey::Loop(l),
            },
        }
    }
}

fn bad(site: impl Into<String>) -> CobordismError {
    CobordismError::BadSite(site.into())
}

/// Head endpoints of every arc of a diagram, keyed by label.
pub fn head_pins(d: &Diagram) -> BTreeMap<Label, Endpoint> {
    d.arc_labels()
        .iter()
        .map(|&a| (a, d.arc_endpoints(a).expect("own label")[1]))
        .collect()
}

pub(crate) fn tuples_of(d: &Diagram) -> Vec<Tuple> {
    d.crossings().iter().map(|c| (c.slots, c.arrow)).collect()
}

/// Walks the closed curves of a raw crossing list and assigns each arc a
/// head endpoint. Each curve is oriented to honor the vote of its smallest
/// voted arc; unvoted curves take the walk's own deterministic direction.
/// Votes that lose to a smaller anchor on the same curve are overridden,
/// which is exactly what happens to a strand whose orientation a saddle
/// reverses.
fn walk_heads(
    crossings: &[Tuple],
    votes: &BTreeMap<Label, Endpoint>,
) -> Result<BTreeMap<Label, Endpoint>, CobordismError> {
    let mut occ: BTreeMap<Label, Vec<Endpoint>> = BTreeMap::new();
    for (ci, (slots, _)) in crossings.iter().enumerate() {
        for (si, &arc) in slots.iter().enumerate() {
            occ.entry(arc)
                .or_default()
                .push(Endpoint { crossing: ci as u32, slot: si as u8 });
        }
    }
    for (arc, eps) in &occ {
        if eps.len() != 2 {
            return Err(bad(format!("arc {arc} has {} crossing slots", eps.len())));
        }
    }
    let other = |arc: Label, ep: Endpoint| {
        let es = &occ[&arc];
        if es[0] == ep {
            es[1]
        } else {
            es[0]
        }
    };
    let mut head_of: BTreeMap<Label, Endpoint> = BTreeMap::new();
    let mut seen: BTreeSet<Label> = BTreeSet::new();
    let starts: Vec<Label> = occ.keys().copied().collect();
    for start in starts {
        if seen.contains(&start) {
            continue;
        }
        let first_head = occ[&start][1];
        let mut curve: Vec<(Label, Endpoint)> = Vec::new();
        let (mut cur, mut head) = (start, first_head);
        loop {
            curve.push((cur, head));
            seen.insert(cur);
            let exit = Endpoint {
                crossing: head.crossing,
                slot: through_partner(head.slot),
            };
            let next = crossings[exit.crossing as usize].0[exit.slot as usize];
            let next_head = other(next, exit);
            cur = next;
            head = next_head;
            if cur == start && head == first_head {
                break;
            }
        }
        let flip = curve
            .iter()
            .filter_map(|&(a, h)| votes.get(&a).map(|&want| (a, h, want)))
            .min_by_key(|&(a, _, _)| a)
            .is_some_and(|(_, h, want)| h != want);
        for (a, h) in curve {
            head_of.insert(a, if flip { other(a, h) } else { h });
        }
    }
    Ok(head_of)
}

/// Builds a diagram from raw surgery output. Curves whose orientation the
/// surgery could not preserve are re-oriented by `walk_heads`; crossings
/// whose under-strand then runs backwards are re-read from the opposite
/// under-arc (tuple rotated by two, arrow flipped), which preserves their
/// resolutions and geometry while flipping their oriented sign.
fn assemble(
    mut crossings: Vec<Tuple>,
    free_loops: Vec<Label>,
    votes: &BTreeMap<Label, Endpoint>,
) -> Result<Diagram, CobordismError> {
    if crossings.is_empty() {
        return Diagram::new(Vec::new(), free_loops, None).map_err(Into::into);
    }
    let head_of = walk_heads(&crossings, votes)?;
    let mut rotated = vec![false; crossings.len()];
    for (ci, cr) in crossings.iter_mut().enumerate() {
        let c = ci as u32;
        let into_slot =
            |arc: Label, slot: u8| head_of[&arc] == Endpoint { crossing: c, slot };
        if into_slot(cr.0[0], 0) {
            continue;
        }
        if into_slot(cr.0[2], 2) {
            cr.0.rotate_left(2);
            cr.1 = cr.1.flipped();
            rotated[ci] = true;
        } else {
            return Err(CobordismError::ShapeMismatch(format!(
                "crossing {ci}: under-strand direction is inconsistent"
            )));
        }
    }
    let pins: BTreeMap<Label, Endpoint> = head_of
        .into_iter()
        .map(|(a, ep)| {
            let slot = if rotated[ep.crossing as usize] {
                (ep.slot + 2) % 4
            } else {
                ep.slot
            };
            (a, Endpoint { crossing: ep.crossing, slot })
        })
        .collect();
    Diagram::with_head_pins(crossings, free_loops, &pins).map_err(Into::into)
}

/// The outcome of deleting crossings and fusing the arcs that met them.
struct Fusion {
    /// Surviving crossings in order, dead ones removed, labels fused.
    tuples: Vec<Tuple>,
    /// Old free loops plus circles demoted by the fusion.
    loops: Vec<Label>,
    /// Direction votes for surviving arcs, in new crossing indices.
    votes: BTreeMap<Label, Endpoint>,
    /// Fused arc -> all old arcs it swallowed (itself included). Arcs
    /// untouched by the fusion have no entry.
    ancestors: BTreeMap<Label, BTreeSet<Label>>,
    /// Demoted loop -> the old arcs forming that circle.
    demoted: BTreeMap<Label, BTreeSet<Label>>,
}

/// Deletes the `dead` crossings and reconnects the arcs that met them:
/// each `join` welds two endpoint positions at dead crossings. A fused arc
/// keeps the smallest member label; chains that close up become free
/// loops. Direction votes favor each class's smallest member whose head
/// survives.
fn fuse_through(
    d: &Diagram,
    dead: &BTreeSet<u32>,
    joins: &[[Endpoint; 2]],
) -> Result<Fusion, CobordismError> {
    let occupant = |ep: Endpoint| d.crossings()[ep.crossing as usize].slots[ep.slot as usize];
    for j in joins {
        for ep in j {
            if !dead.contains(&ep.crossing) {
                return Err(bad(format!(
                    "join endpoint at live crossing {}",
                    ep.crossing
                )));
            }
        }
    }
    let mut parent: BTreeMap<Label, Label> = BTreeMap::new();
    fn find(parent: &mut BTreeMap<Label, Label>, x: Label) -> Label {
        let p = *parent.entry(x).or_insert(x);
        if p == x {
            return x;
        }
        let r = find(parent, p);
        parent.insert(x, r);
        r
    }
    for j in joins {
        let (a, b) = (occupant(j[0]), occupant(j[1]));
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        let keep = ra.min(rb);
        parent.insert(ra, keep);
        parent.insert(rb, keep);
    }
    let members: Vec<Label> = parent.keys().copied().collect();
    let mut classes: BTreeMap<Label, BTreeSet<Label>> = BTreeMap::new();
    for m in members {
        let root = find(&mut parent, m);
        classes.entry(root).or_default().insert(m);
    }
    let root_of = |parent: &mut BTreeMap<Label, Label>, x: Label| {
        if parent.contains_key(&x) {
            find(parent, x)
        } else {
            x
        }
    };

    let dead_sorted: Vec<u32> = dead.iter().copied().collect();
    let shift = |ep: Endpoint| Endpoint {
        crossing: ep.crossing - dead_sorted.iter().filter(|&&k| k < ep.crossing).count() as u32,
        slot: ep.slot,
    };
    let mut tuples: Vec<Tuple> = Vec::new();
    for (ci, c) in d.crossings().iter().enumerate() {
        if dead.contains(&(ci as u32)) {
            continue;
        }
        let slots = c.slots.map(|s| root_of(&mut parent, s));
        tuples.push((slots, c.arrow));
    }
    let still_used: BTreeSet<Label> = tuples.iter().flat_map(|t| t.0.iter().copied()).collect();

    let mut loops = d.free_loops().to_vec();
    let mut ancestors = BTreeMap::new();
    let mut demoted = BTreeMap::new();
    for (root, members) in classes {
        if still_used.contains(&root) {
            ancestors.insert(root, members);
        } else {
            loops.push(root);
            demoted.insert(root, members);
        }
    }

    let mut votes: BTreeMap<Label, Endpoint> = BTreeMap::new();
    for &a in d.arc_labels() {
        let head = d.arc_endpoints(a)?[1];
        if dead.contains(&head.crossing) {
            continue;
        }
        let root = root_of(&mut parent, a);
        if still_used.contains(&root) {
            votes.entry(root).or_insert(shift(head));
        }
    }
    Ok(Fusion { tuples, loops, votes, ancestors, demoted })
}

/// Renames arcs and free loops, keeping the geometry: labels not listed
/// stay themselves. The rename must remain injective on the diagram.
pub fn relabel(d: &Diagram, rename: &BTreeMap<Label, Label>) -> Result<Diagram, CobordismError> {
    let get = |a: Label| rename.get(&a).copied().unwrap_or(a);
    let mut seen = BTreeSet::new();
    for &a in d.arc_labels().iter().chain(d.free_loops()) {
        if !seen.insert(get(a)) {
            return Err(bad(format!("relabeling collides at label {}", get(a))));
        }
    }
    let tuples: Vec<Tuple> = d
        .crossings()
        .iter()
        .map(|c| (c.slots.map(get), c.arrow))
        .collect();
    let loops: Vec<Label> = d.free_loops().iter().map(|&l| get(l)).collect();
    let pins: BTreeMap<Label, Endpoint> = head_pins(d)
        .into_iter()
        .map(|(a, ep)| (get(a), ep))
        .collect();
    Ok(Diagram::with_head_pins(tuples, loops, &pins)?)
}

/// A circle is born: the diagram gains a fresh free loop.
pub fn birth(d: &Diagram) -> (Diagram, Label) {
    let label = d.next_label();
    let mut loops = d.free_loops().to_vec();
    loops.push(label);
    let out = Diagram::with_head_pins(tuples_of(d), loops, &head_pins(d))
        .expect("adding a free loop preserves validity");
    (out, label)
}

/// A crossingless circle dies.
pub fn death(d: &Diagram, circle: Label) -> Result<Diagram, CobordismError> {
    if !d.has_loop(circle) {
        return Err(bad(format!("no free loop labeled {circle}")));
    }
    let loops: Vec<Label> = d.free_loops().iter().copied().filter(|&l| l != circle).collect();
    Ok(Diagram::with_head_pins(tuples_of(d), loops, &head_pins(d))
        .expect("removing a free loop preserves validity"))
}

/// A saddle between two sites.
#[derive(Debug, Clone)]
pub struct SaddleData {
    /// The input diagram with one extra crossing (the band) whose
    /// 0-resolution restores the input and whose 1-resolution is the
    /// surgered output.
    pub star: Diagram,
    /// The surgered diagram.
    pub output: Diagram,
    /// Index of the band crossing in `star` (always last).
    pub band: usize,
    /// Labels of the input diagram embedded into `star`.
    pub input_map: LabelMap,
    /// Labels of `output` embedded into `star`.
    pub output_map: LabelMap,
}

/// Attaches a band between sites `p` and `q` (arc or free-loop labels; the
/// two may coincide, which pinches that strand or circle). A band between
/// two distinct arcs must run inside a face of the diagram, and the face
/// dictates how the cut strands reconnect: a face traveling both arcs in
/// the same direction swaps their head halves (orientations survive),
/// while a face traveling them oppositely fuses tail to tail and head to
/// head, after which part of the strand is re-oriented. Free-loop sites
/// carry no face data and are taken on the caller's word.
pub fn saddle(d: &Diagram, p: Label, q: Label) -> Result<SaddleData, CobordismError> {
    let p_arc = d.has_arc(p);
    let q_arc = d.has_arc(q);
    if !(p_arc || d.has_loop(p)) || !(q_arc || d.has_loop(q)) {
        return Err(bad(format!("saddle site ({p}, {q}) not in diagram")));
    }
    let mut tuples = tuples_of(d);
    let mut loops: Vec<Label> = d.free_loops().to_vec();
    let mut votes = head_pins(d);
    let mut input_map = LabelMap::default();
    let mut output_map = LabelMap::default();
    let band = tuples.len();
    let n = band as u32;
    let mut next = d.next_label();
    let mut alloc = move || {
        next += 1;
        next - 1
    };

    // The band tuple, case by case. Its 0-resolution joins slots {0,1} and
    // {2,3}, restoring the input sites; its 1-resolution joins {1,2} and
    // {3,0}, performing the surgery. The output diagram is built directly
    // on the input's labels.
    let band_tuple: [Label; 4];
    let output: Diagram;
    match (p_arc, q_arc, p == q) {
        (true, true, false) => {
            let hp = d.arc_endpoints(p)?[1];
            let hq = d.arc_endpoints(q)?[1];
            let tq = d.arc_endpoints(q)?[0];
            // Scan the faces both arcs border. Walking a face keeps it on
            // the left, so two occurrences with equal along-the-arrow
            // flags mean a band in that face glues each head half to the
            // other site's tail half; unequal flags mean the band glues
            // like halves together. When both kinds of face exist, the
            // orientation-preserving swap wins.
            let mut same_dir = false;
            let mut opp_dir = false;
            for face in d.faces() {
                let p_along: Vec<bool> = face
                    .iter()
                    .filter(|da| da.arc == p)
                    .map(|da| da.into == hp)
                    .collect();
                for da in face.iter().filter(|da| da.arc == q) {
                    let q_along = da.into == hq;
                    same_dir |= p_along.iter().any(|&a| a == q_along);
                    opp_dir |= p_along.iter().any(|&a| a != q_along);
                }
            }
            if same_dir {
                let p_out = alloc();
                let q_out = alloc();
                tuples[hp.crossing as usize].0[hp.slot as usize] = p_out;
                tuples[hq.crossing as usize].0[hq.slot as usize] = q_out;
                band_tuple = [p, p_out, q, q_out];
                votes.insert(p, Endpoint { crossing: n, slot: 0 });
                votes.insert(p_out, hp);
                votes.insert(q, Endpoint { crossing: n, slot: 2 });
                votes.insert(q_out, hq);
                // Output: the head halves swap partners; p runs from its
                // old tail to q's old head, q from its old tail to p's
                // old head. Every strand keeps its direction.
                let mut out_tuples = tuples_of(d);
                out_tuples[hp.crossing as usize].0[hp.slot as usize] = q;
                out_tuples[hq.crossing as usize].0[hq.slot as usize] = p;
                let mut pins = head_pins(d);
                pins.insert(p, hq);
                pins.insert(q, hp);
                output = Diagram::with_head_pins(out_tuples, loops.clone(), &pins)?;
            } else if opp_dir {
                let p_out = alloc();
                let q_out = alloc();
                let fused_head = alloc();
                tuples[hp.crossing as usize].0[hp.slot as usize] = p_out;
                tuples[hq.crossing as usize].0[hq.slot as usize] = q_out;
                band_tuple = [p, p_out, q_out, q];
                votes.insert(p, Endpoint { crossing: n, slot: 0 });
                votes.insert(p_out, hp);
                votes.insert(q, Endpoint { crossing: n, slot: 3 });
                votes.insert(q_out, hq);
                // Output: the tail halves fuse into one arc that keeps
                // label p; the head halves fuse into a fresh arc. One of
                // the two glued runs flows against the other, so the
                // output is re-walked and partially re-oriented.
                let mut out_tuples = tuples_of(d);
                out_tuples[tq.crossing as usize].0[tq.slot as usize] = p;
                out_tuples[hp.crossing as usize].0[hp.slot as usize] = fused_head;
                out_tuples[hq.crossing as usize].0[hq.slot as usize] = fused_head;
                let mut out_votes = head_pins(d);
                out_votes.remove(&q);
                out_votes.insert(p, tq);
                out_votes.insert(fused_head, hq);
                output = assemble(out_tuples, loops.clone(), &out_votes)?;
                output_map.arc.insert(fused_head, p_out);
            } else {
                return Err(bad(format!("arcs {p} and {q} do not cobound a face")));
            }
        }
        (true, true, true) => {
            // Pinch one arc: the tail half keeps p, the middle hangs
            // between band slots 1 and 2, the last half runs to the old
            // head.
            let hp = d.arc_endpoints(p)?[1];
            let mid = alloc();
            let last = alloc();
            tuples[hp.crossing as usize].0[hp.slot as usize] = last;
            band_tuple = [p, mid, mid, last];
            votes.insert(p, Endpoint { crossing: n, slot: 0 });
            votes.insert(mid, Endpoint { crossing: n, slot: 1 });
            votes.insert(last, hp);
            // Output: the strand is unchanged; the pinched-off middle
            // leaves as a circle named after the star's middle arc.
            let mut out_loops = loops.clone();
            out_loops.push(mid);
            output_map.loop_to_arc.insert(mid, mid);
            output = Diagram::with_head_pins(tuples_of(d), out_loops, &head_pins(d))?;
        }
        (true, false, false) => {
            // Arc p absorbs circle q.
            let hp = d.arc_endpoints(p)?[1];
            let p_out = alloc();
            let a = alloc();
            tuples[hp.crossing as usize].0[hp.slot as usize] = p_out;
            loops.retain(|&l| l != q);
            input_map.loop_to_arc.insert(q, a);
            band_tuple = [p, p_out, a, a];
            votes.insert(p, Endpoint { crossing: n, slot: 0 });
            votes.insert(p_out, hp);
            votes.insert(a, Endpoint { crossing: n, slot: 3 });
            let out_loops: Vec<Label> =
                d.free_loops().iter().copied().filter(|&l| l != q).collect();
            output = Diagram::with_head_pins(tuples_of(d), out_loops, &head_pins(d))?;
        }
        (false, true, false) => {
            // Circle p is absorbed by arc q.
            let hq = d.arc_endpoints(q)?[1];
            let a = alloc();
            let q_out = alloc();
            tuples[hq.crossing as usize].0[hq.slot as usize] = q_out;
            loops.retain(|&l| l != p);
            input_map.loop_to_arc.insert(p, a);
            band_tuple = [a, a, q, q_out];
            votes.insert(q, Endpoint { crossing: n, slot: 2 });
            votes.insert(q_out, hq);
            let out_loops: Vec<Label> =
                d.free_loops().iter().copied().filter(|&l| l != p).collect();
            output = Diagram::with_head_pins(tuples_of(d), out_loops, &head_pins(d))?;
        }
        (false, false, true) => {
            // Pinch one circle into two.
            let a = alloc();
            let b = alloc();
            loops.retain(|&l| l != p);
            input_map.loop_to_arc.insert(p, a);
            band_tuple = [a, b, b, a];
            votes.insert(a, Endpoint { crossing: n, slot: 0 });
            votes.insert(b, Endpoint { crossing: n, slot: 1 });
            // Output: circle p splits; one circle keeps p, the other is
            // fresh and corresponds to the star's arc b.
            let mut out_loops = d.free_loops().to_vec();
            out_loops.push(b);
            output_map.loop_to_arc.insert(p, a);
            output_map.loop_to_arc.insert(b, b);
            output = Diagram::with_head_pins(tuples_of(d), out_loops, &head_pins(d))?;
        }
        (false, false, false) => {
            // Merge two circles; the smaller label survives.
            let a = alloc();
            let b = alloc();
            loops.retain(|&l| l != p && l != q);
            input_map.loop_to_arc.insert(p, a);
            input_map.loop_to_arc.insert(q, b);
            band_tuple = [a, a, b, b];
            votes.insert(a, Endpoint { crossing: n, slot: 0 });
            let keep = p.min(q);
            let out_loops: Vec<Label> = d
                .free_loops()
                .iter()
                .copied()
                .filter(|&l| l != p.max(q))
                .collect();
            output_map
                .loop_to_arc
                .insert(keep, if keep == p { a } else { b });
            output = Diagram::with_head_pins(tuples_of(d), out_loops, &head_pins(d))?;
        }
        (true, false, true) | (false, true, true) => {
            unreachable!("one label cannot be both an arc and a loop")
        }
    }
    tuples.push((band_tuple, ArrowKind::Single));
    let star = assemble(tuples, loops, &votes)?;
    Ok(SaddleData { star, output, band, input_map, output_map })
}

/// A kink added by a first move.
#[derive(Debug, Clone)]
pub struct R1Data {
    pub output: Diagram,
    /// Index of the kink crossing (last).
    pub kink: usize,
    /// The arc that runs around the kink loop.
    pub loop_arc: Label,
    /// Writhe change, +1 or -1.
    pub sign: i8,
    /// Labels of the input diagram embedded into the kink-free facets.
    pub input_map: LabelMap,
}

/// Adds a kink of the given sign on arc or free loop `p`.
pub fn r1_do(d: &Diagram, p: Label, sign: i8) -> Result<R1Data, CobordismError> {
    if sign != 1 && sign != -1 {
        return Err(bad(format!("kink sign must be +1 or -1, got {sign}")));
    }
    let mut input_map = LabelMap::default();
    let mut tuples = tuples_of(d);
    let mut loops = d.free_loops().to_vec();
    let mut pins = head_pins(d);
    let fresh = d.next_label();
    let k = tuples.len() as u32;
    let ell = fresh;
    if d.has_loop(p) {
        // The circle becomes a one-crossing diagram on arcs (ell, a).
        let a = fresh + 1;
        loops.retain(|&l| l != p);
        input_map.loop_to_arc.insert(p, a);
        if sign == 1 {
            tuples.push(([ell, ell, a, a], ArrowKind::Single));
            pins.insert(ell, Endpoint { crossing: k, slot: 0 });
            pins.insert(a, Endpoint { crossing: k, slot: 3 });
        } else {
            tuples.push(([a, ell, ell, a], ArrowKind::Single));
            pins.insert(a, Endpoint { crossing: k, slot: 0 });
            pins.insert(ell, Endpoint { crossing: k, slot: 1 });
        }
    } else if d.has_arc(p) {
        let l2 = fresh + 1;
        let hp = d.arc_endpoints(p)?[1];
        tuples[hp.crossing as usize].0[hp.slot as usize] = l2;
        pins.insert(l2, hp);
        if sign == 1 {
            tuples.push(([ell, ell, l2, p], ArrowKind::Single));
            pins.insert(ell, Endpoint { crossing: k, slot: 0 });
            pins.insert(p, Endpoint { crossing: k, slot: 3 });
        } else {
            tuples.push(([p, ell, ell, l2], ArrowKind::Single));
            pins.insert(p, Endpoint { crossing: k, slot: 0 });
            pins.insert(ell, Endpoint { crossing: k, slot: 1 });
        }
    } else {
        return Err(bad(format!("kink site {p} not in diagram")));
    }
    let output = Diagram::with_head_pins(tuples, loops, &pins)?;
    debug_assert_eq!(output.crossings()[k as usize].sign, sign, "kink template sign");
    Ok(R1Data { output, kink: k as usize, loop_arc: ell, sign, input_map })
}

/// A kink removed by a first move.
#[derive(Debug, Clone)]
pub struct R1UndoData {
    pub output: Diagram,
    /// Index of the removed kink crossing in the input diagram.
    pub kink: usize,
    pub loop_arc: Label,
    pub sign: i8,
    /// Fused output arc -> input arcs it swallowed.
    pub ancestors: BTreeMap<Label, BTreeSet<Label>>,
    /// Output loops that were arc-bearing circles of the input.
    pub demoted: BTreeMap<Label, BTreeSet<Label>>,
}

/// Removes the kink whose loop is bounded by arc `ell` (an arc occupying
/// two adjacent slots of one crossing).
pub fn r1_undo(d: &Diagram, ell: Label) -> Result<R1UndoData, CobordismError> {
    if !d.has_arc(ell) {
        return Err(bad(format!("kink loop arc {ell} not in diagram")));
    }
    let [e0, e1] = d.arc_endpoints(ell)?;
    if e0.crossing != e1.crossing {
        return Err(bad(format!("arc {ell} does not close a kink")));
    }
    let kk = e0.crossing;
    if (e0.slot + 2) % 4 == e1.slot {
        return Err(bad(format!("arc {ell} runs straight through its crossing")));
    }
    let sign = d.crossings()[kk as usize].sign;
    let dead = BTreeSet::from([kk]);
    let ep = |slot: u8| Endpoint { crossing: kk, slot };
    let joins = [[ep(0), ep(2)], [ep(1), ep(3)]];
    let f = fuse_through(d, &dead, &joins)?;
    let output = assemble(f.tuples, f.loops, &f.votes)?;
    Ok(R1UndoData {
        output,
        kink: kk as usize,
        loop_arc: ell,
        sign,
        ancestors: f.ancestors,
        demoted: f.demoted,
    })
}

/// Which side of the under strand the finger pushes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum R2Side {
    #[default]
    Left,
    Right,
}

/// Relative orientation of the two strands in the finger picture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum R2Pattern {
    #[default]
    Parallel,
    Antiparallel,
}

/// A second move performed.
#[derive(Debug, Clone)]
pub struct R2Data {
    pub output: Diagram,
    /// The two new crossings, in order along the under strand.
    pub lo: usize,
    pub hi: usize,
    /// The bigon arcs: the over-strand middle and under-strand middle.
    pub over_mid: Label,
    pub under_mid: Label,
    /// Labels of the input diagram embedded into the bigon-free facets.
    pub input_map: LabelMap,
}

/// Pushes strand `over` across strand `under`, creating one positive and
/// one negative crossing. `side` and `pattern` pick the planar variant;
/// the induced homology map is variant-independent, the diagram is not.
/// Whether a variant is planar at the chosen site is the caller's duty.
pub fn r2_do(
    d: &Diagram,
    over: Label,
    under: Label,
    side: R2Side,
    pattern: R2Pattern,
) -> Result<R2Data, CobordismError> {
    if over == under {
        return Err(bad("a strand cannot slide across itself in a second move"));
    }
    let site_ok = |l: Label| d.has_arc(l) || d.has_loop(l);
    if !site_ok(over) || !site_ok(under) {
        return Err(bad(format!("second-move site ({over}, {under}) not in diagram")));
    }
    let mut input_map = LabelMap::default();
    let mut tuples = tuples_of(d);
    let mut loops = d.free_loops().to_vec();
    let mut pins = head_pins(d);
    let lo = tuples.len();
    let hi = lo + 1;

    // Split each strand into (first, mid, last) along its direction; a
    // circle site contributes one outer arc serving as both first and
    // last.
    let mut next = d.next_label();
    let mut alloc = move || {
        next += 1;
        next - 1
    };
    let mut split = |site: Label,
                     tuples: &mut Vec<Tuple>,
                     loops: &mut Vec<Label>,
                     pins: &mut BTreeMap<Label, Endpoint>,
                     input_map: &mut LabelMap|
     -> (Label, Label, Label) {
        if d.has_loop(site) {
            loops.retain(|&l| l != site);
            let a = alloc();
            let mid = alloc();
            input_map.loop_to_arc.insert(site, a);
            (a, mid, a)
        } else {
            let mid = alloc();
            let last = alloc();
            let head = d.arc_endpoints(site).expect("checked")[1];
            tuples[head.crossing as usize].0[head.slot as usize] = last;
            pins.insert(last, head);
            pins.remove(&site);
            (site, mid, last)
        }
    };
    let (u1, umid, u3) = split(over, &mut tuples, &mut loops, &mut pins, &mut input_map);
    let (v1, vmid, v3) = split(under, &mut tuples, &mut loops, &mut pins, &mut input_map);
    drop(split);

    let (lo32, hi32) = (lo as u32, hi as u32);
    let at = |crossing: u32, slot: u8| Endpoint { crossing, slot };
    let (clo, chi) = match (side, pattern) {
        (R2Side::Left, R2Pattern::Parallel) => {
            pins.insert(v1, at(lo32, 0));
            pins.insert(u1, at(lo32, 3));
            pins.insert(umid, at(hi32, 1));
            pins.insert(vmid, at(hi32, 0));
            ([v1, umid, vmid, u1], [vmid, umid, v3, u3])
        }
        (R2Side::Right, R2Pattern::Parallel) => {
            pins.insert(v1, at(lo32, 0));
            pins.insert(u1, at(lo32, 1));
            pins.insert(umid, at(hi32, 3));
            pins.insert(vmid, at(hi32, 0));
            ([v1, u1, vmid, umid], [vmid, u3, v3, umid])
        }
        (R2Side::Left, R2Pattern::Antiparallel) => {
            pins.insert(v1, at(lo32, 0));
            pins.insert(u1, at(hi32, 3));
            pins.insert(umid, at(lo32, 1));
            pins.insert(vmid, at(hi32, 0));
            ([v1, umid, vmid, u3], [vmid, umid, v3, u1])
        }
        (R2Side::Right, R2Pattern::Antiparallel) => {
            pins.insert(v1, at(lo32, 0));
            pins.insert(u1, at(hi32, 1));
            pins.insert(umid, at(lo32, 3));
            pins.insert(vmid, at(hi32, 0));
            ([v1, u3, vmid, umid], [vmid, u1, v3, umid])
        }
    };
    tuples.push((clo, ArrowKind::Single));
    tuples.push((chi, ArrowKind::Single));
    let output = Diagram::with_head_pins(tuples, loops, &pins)?;
    debug_assert_eq!(
        i32::from(output.crossings()[lo].sign) + i32::from(output.crossings()[hi].sign),
        0,
        "a second move adds one crossing of each sign"
    );
    Ok(R2Data { output, lo, hi, over_mid: umid, under_mid: vmid, input_map })
}

/// A second move undone.
#[derive(Debug, Clone)]
pub struct R2UndoData {
    pub output: Diagram,
    /// The two removed crossings, ascending.
    pub removed: [usize; 2],
    pub over_mid: Label,
    pub under_mid: Label,
    /// Fused output arc -> input arcs it swallowed.
    pub ancestors: BTreeMap<Label, BTreeSet<Label>>,
    /// Output loops that were arc-bearing circles of the input.
    pub demoted: BTreeMap<Label, BTreeSet<Label>>,
}

/// Cancels the bigon bounded by arcs `s1` and `s2`: one must pass over
/// both shared crossings and the other under both.
pub fn r2_undo(d: &Diagram, s1: Label, s2: Label) -> Result<R2UndoData, CobordismError> {
    if !d.has_arc(s1) || !d.has_arc(s2) || s1 == s2 {
        return Err(bad(format!("bigon arcs ({s1}, {s2}) not usable")));
    }
    let [a0, a1] = d.arc_endpoints(s1)?;
    let [b0, b1] = d.arc_endpoints(s2)?;
    let cs: BTreeSet<u32> = [a0.crossing, a1.crossing, b0.crossing, b1.crossing]
        .into_iter()
        .collect();
    if cs.len() != 2 || a0.crossing == a1.crossing || b0.crossing == b1.crossing {
        return Err(bad(format!("arcs {s1}, {s2} do not join two distinct crossings")));
    }
    let mut it = cs.iter().copied();
    let (k1, k2) = (it.next().expect("two"), it.next().expect("two"));
    let over_at = |a: Label, k: u32| {
        let [e0, e1] = d.arc_endpoints(a).expect("checked");
        let ep = if e0.crossing == k { e0 } else { e1 };
        ep.slot % 2 == 1
    };
    let (over_mid, under_mid) =
        match (over_at(s1, k1), over_at(s1, k2), over_at(s2, k1), over_at(s2, k2)) {
            (true, true, false, false) => (s1, s2),
            (false, false, true, true) => (s2, s1),
            _ => {
                return Err(bad(format!(
                    "arcs {s1}, {s2} do not bound a cancellable bigon"
                )))
            }
        };
    // An over-over/under-under pair can still wrap the wrong way: the two
    // middle arcs then form a clasp that no sphere diagram realizes as an
    // empty bigon. A genuine bigon turns opposite corners at its two ends.
    let slot_at = |a: Label, k: u32| {
        let [e0, e1] = d.arc_endpoints(a).expect("checked");
        (if e0.crossing == k { e0 } else { e1 }).slot
    };
    let corner = |k: u32| (4 + slot_at(over_mid, k) - slot_at(under_mid, k)) % 4;
    if corner(k1) == corner(k2) {
        return Err(bad(format!(
            "arcs {s1}, {s2} wrap as a clasp, not an empty bigon"
        )));
    }
    let dead: BTreeSet<u32> = cs;
    let ep = |crossing: u32, slot: u8| Endpoint { crossing, slot };
    let joins = [
        [ep(k1, 0), ep(k1, 2)],
        [ep(k1, 1), ep(k1, 3)],
        [ep(k2, 0), ep(k2, 2)],
        [ep(k2, 1), ep(k2, 3)],
    ];
    let f = fuse_through(d, &dead, &joins)?;
    let output = assemble(f.tuples, f.loops, &f.votes)?;
    let (klo, khi) = (k1.min(k2) as usize, k1.max(k2) as usize);
    Ok(R2UndoData {
        output,
        removed: [klo, khi],
        over_mid,
        under_mid,
        ancestors: f.ancestors,
        demoted: f.demoted,
    })
}

/// A third move.
#[derive(Debug, Clone)]
pub struct R3Data {
    pub output: Diagram,
    /// The three crossings around the triangle, ascending.
    pub crossings: [usize; 3],
    /// The crossing between the two strands that pass over the lowest
    /// strand; the move slides it across that strand. Computing the move
    /// on `output` finds the same index.
    pub moving: usize,
    /// The triangle arcs.
    pub sides: [Label; 3],
}

/// Slides the triangle bounded by arcs `t1, t2, t3` through a third move.
/// Each crossing keeps its index, strand pair, arrow, and sign; the
/// triangle arcs move to the far side of their opposite crossings.
/// Involutive.
pub fn r3(d: &Diagram, sides: [Label; 3]) -> Result<R3Data, CobordismError> {
    for &t in &sides {
        if !d.has_arc(t) {
            return Err(bad(format!("triangle arc {t} not in diagram")));
        }
    }
    if sides[0] == sides[1] || sides[1] == sides[2] || sides[0] == sides[2] {
        return Err(bad("triangle arcs must be distinct"));
    }
    // The three crossings, each met by exactly two of the triangle arcs.
    let mut by_crossing: BTreeMap<u32, Vec<Label>> = BTreeMap::new();
    for &t in &sides {
        let [e0, e1] = d.arc_endpoints(t)?;
        if e0.crossing == e1.crossing {
            return Err(bad(format!("triangle arc {t} closes a kink")));
        }
        by_crossing.entry(e0.crossing).or_default().push(t);
        by_crossing.entry(e1.crossing).or_default().push(t);
    }
    if by_crossing.len() != 3 || by_crossing.values().any(|v| v.len() != 2) {
        return Err(bad("triangle arcs do not pairwise join three crossings"));
    }
    let ks: Vec<u32> = by_crossing.keys().copied().collect();

    // Strand bookkeeping at a crossing: the under strand enters at slot 0
    // and leaves at slot 2; the over strand's direction is read off heads.
    let strand_slots = |k: u32| -> Result<[(u8, u8); 2], CobordismError> {
        let slots = d.crossings()[k as usize].slots;
        let head_at = |s: u8| {
            d.arc_endpoints(slots[s as usize]).expect("valid")[1]
                == Endpoint { crossing: k, slot: s }
        };
        let over = if head_at(1) {
            (1u8, 3u8)
        } else if head_at(3) {
            (3u8, 1u8)
        } else {
            return Err(CobordismError::ShapeMismatch(format!(
                "crossing {k}: over strand has no head"
            )));
        };
        Ok([(0, 2), over])
    };

    // The over/under relation on the three strands must be a total order:
    // one triangle arc passes over at both its crossings, one under at
    // both, one mixed. A cyclic pattern admits no third move.
    let over_count = |t: Label| -> u32 {
        d.arc_endpoints(t)
            .expect("checked")
            .iter()
            .map(|ep| u32::from(ep.slot % 2 == 1))
            .sum()
    };
    let counts: BTreeSet<u32> = sides.iter().map(|&t| over_count(t)).collect();
    if counts != BTreeSet::from([0, 1, 2]) {
        return Err(bad("triangle over/under pattern is cyclic; no third move applies"));
    }
    let lowest = *sides
        .iter()
        .find(|&&t| over_count(t) == 0)
        .expect("counts checked");
    let moving = *by_crossing
        .iter()
        .find(|(_, arcs)| !arcs.contains(&lowest))
        .map(|(k, _)| k)
        .expect("one crossing avoids the lowest strand");

    let old: Vec<Tuple> = tuples_of(d);
    let mut new = old.clone();
    let is_side = |a: Label| sides.contains(&a);
    for &k in &ks {
        for (s_in, s_out) in strand_slots(k)? {
            let a_in = old[k as usize].0[s_in as usize];
            let a_out = old[k as usize].0[s_out as usize];
            let (t, downstream) = if is_side(a_out) {
                (a_out, true)
            } else if is_side(a_in) {
                (a_in, false)
            } else {
                return Err(bad(format!("crossing {k}: strand misses the triangle")));
            };
            // The strand's other triangle crossing, and the strand segment
            // on the far side of it.
            let [e0, e1] = d.arc_endpoints(t)?;
            let far = if e0.crossing == k { e1 } else { e0 };
            let w = old[far.crossing as usize].0[through_partner(far.slot) as usize];
            if downstream {
                new[k as usize].0[s_in as usize] = t;
                new[k as usize].0[s_out as usize] = w;
            } else {
                new[k as usize].0[s_out as usize] = t;
                new[k as usize].0[s_in as usize] = w;
            }
        }
    }
    // Strand directions survive; the in-slot occupants carry the pins.
    let mut pins = head_pins(d);
    pins.retain(|_, ep| !ks.contains(&ep.crossing));
    for &k in &ks {
        for (s_in, _) in strand_slots(k)? {
            let arc = new[k as usize].0[s_in as usize];
            pins.insert(arc, Endpoint { crossing: k, slot: s_in });
        }
    }
    let output = Diagram::with_head_pins(new, d.free_loops().to_vec(), &pins)?;
    for &k in &ks {
        debug_assert_eq!(
            output.crossings()[k as usize].sign,
            d.crossings()[k as usize].sign,
            "third move preserves crossing signs"
        );
    }
    let mut crossings = [ks[0] as usize, ks[1] as usize, ks[2] as usize];
    crossings.sort_unstable();
    Ok(R3Data { output, crossings, moving: moving as usize, sides })
}

/// A crossing smoothed away, splitting a complex along one cube direction.
#[derive(Debug, Clone)]
pub struct SmoothData {
    pub output: Diagram,
    /// The removed crossing's index in the input.
    pub removed: usize,
    /// Fused output arc -> input arcs it swallowed (itself included);
    /// untouched arcs have no entry.
    pub ancestors: BTreeMap<Label, BTreeSet<Label>>,
    /// Output free loops that were arc-bearing before smoothing, with
    /// their input arcs.
    pub demoted: BTreeMap<Label, BTreeSet<Label>>,
}

/// Replaces crossing `k` by its `bit`-smoothing.
pub fn smooth(d: &Diagram, k: usize, bit: u8) -> Result<SmoothData, CobordismError> {
    if k >= d.n_crossings() {
        return Err(bad(format!("no crossing {k}")));
    }
    let kk = k as u32;
    let ep = |slot: u8| Endpoint { crossing: kk, slot };
    let joins = if bit == 0 {
        [[ep(0), ep(1)], [ep(2), ep(3)]]
    } else {
        [[ep(1), ep(2)], [ep(3), ep(0)]]
    };
    let dead = BTreeSet::from([kk]);
    let f = fuse_through(d, &dead, &joins)?;
    let output = assemble(f.tuples, f.loops, &f.votes)?;
    Ok(SmoothData { output, removed: k, ancestors: f.ancestors, demoted: f.demoted })
}

/// Renames arcs and loops by a bijection; labels absent from the map stay.
pub fn isotopy_relabel(
    d: &Diagram,
    map: &BTreeMap<Label, Label>,
) -> Result<Diagram, CobordismError> {
    let rename = |l: Label| map.get(&l).copied().unwrap_or(l);
    for from in map.keys() {
        if !d.has_arc(*from) && !d.has_loop(*from) {
            return Err(bad(format!("relabeling source {from} not in diagram")));
        }
    }
    let mut targets = BTreeSet::new();
    let all: Vec<Label> = d.arc_labels().iter().chain(d.free_loops()).copied().collect();
    for &l in &all {
        if !targets.insert(rename(l)) {
            return Err(bad(format!("relabeling collides at {}", rename(l))));
        }
    }
    let tuples: Vec<Tuple> = d
        .crossings()
        .iter()
        .map(|c| (c.slots.map(rename), c.arrow))
        .collect();
    let loops: Vec<Label> = d.free_loops().iter().map(|&l| rename(l)).collect();
    let pins: BTreeMap<Label, Endpoint> = head_pins(d)
        .into_iter()
        .map(|(a, ep)| (rename(a), ep))
        .collect();
    Diagram::with_head_pins(tuples, loops, &pins).map_err(Into::into)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::build;
    use crate::diagram::resolve::Resolution;

    /// Closure of the 3-strand braid s1 s2 s1 with an explicit triangle on
    /// arcs 4, 5, 6. The all-over component {1, 5} needs a declared
    /// orientation.
    fn triangle_diagram() -> Diagram {
        Diagram::new(
            vec![
                ([2, 5, 4, 1], ArrowKind::Single),
                ([3, 1, 6, 5], ArrowKind::Single),
                ([6, 2, 3, 4], ArrowKind::Single),
            ],
            Vec::new(),
            Some(&[vec![1, 5]]),
        )
        .unwrap()
    }

    #[test]
    fn birth_then_death_round_trip() {
        let d = build::trefoil(true);
        let (with_circle, l) = birth(&d);
        assert_eq!(with_circle.free_loops(), &[l]);
        assert_eq!(with_circle.component_count(), d.component_count() + 1);
        let back = death(&with_circle, l).unwrap();
        assert_eq!(back.crossings(), d.crossings());
        assert_eq!(back.free_loops(), d.free_loops());
    }

    #[test]
    fn death_needs_a_loop() {
        let d = build::trefoil(true);
        assert!(matches!(death(&d, 99), Err(CobordismError::BadSite(_))));
    }

    /// Every crossing flip in a diagram drawn in the plane changes the
    /// resolved circle count by exactly one.
    fn check_planar(d: &Diagram) {
        let n = d.n_crossings();
        for alpha in 0..1u32 << n {
            let c = d.resolve(Resolution(alpha)).circle_count();
            for i in 0..n {
                let c2 = d.resolve(Resolution(alpha ^ (1 << i))).circle_count();
                assert_eq!(
                    c.abs_diff(c2),
                    1,
                    "flip of crossing {i} at {alpha} is degenerate"
                );
            }
        }
    }

    /// The band diagram's 0-resolutions must mirror the input and its
    /// 1-resolutions the output, circle count by circle count, and both
    /// new diagrams must still be drawable in the plane.
    fn check_star(s: &SaddleData, input: &Diagram) {
        let n = input.n_crossings();
        assert_eq!(s.star.n_crossings(), n + 1);
        assert_eq!(s.output.n_crossings(), n);
        for alpha in 0..1u32 << n {
            assert_eq!(
                s.star.resolve(Resolution(alpha)).circle_count(),
                input.resolve(Resolution(alpha)).circle_count(),
                "input facet at {alpha}"
            );
            assert_eq!(
                s.star.resolve(Resolution(alpha | 1 << n)).circle_count(),
                s.output.resolve(Resolution(alpha)).circle_count(),
                "output facet at {alpha}"
            );
        }
        check_planar(&s.star);
        check_planar(&s.output);
    }

    #[test]
    fn saddle_pinches_one_circle_into_two() {
        let d = build::unknot();
        let p = d.free_loops()[0];
        let s = saddle(&d, p, p).unwrap();
        assert_eq!(s.output.free_loops().len(), 2);
        assert_eq!(s.output.component_count(), 2);
        check_star(&s, &d);
    }

    #[test]
    fn saddle_merges_two_circles() {
        let d = build::unlink(2);
        let s = saddle(&d, 0, 1).unwrap();
        assert_eq!(s.output.free_loops(), &[0]);
        check_star(&s, &d);
    }

    #[test]
    fn saddle_pinches_the_parallel_closure_strands_of_a_knot() {
        let d = build::trefoil(true);
        // The outer face travels closure arcs 0 and 1 in opposite
        // directions, so the band fuses tails to tails and heads to
        // heads: the braid closure becomes the plat closure, a single
        // unknotted component whose braid-side orientation reversed.
        let s = saddle(&d, 0, 1).unwrap();
        assert_eq!(s.output.component_count(), 1);
        assert_eq!(s.output.n_crossings(), 3);
        assert!(s.output.arc_labels().contains(&0));
        assert!(!s.output.arc_labels().contains(&1));
        check_star(&s, &d);
    }

    #[test]
    fn saddle_swaps_heads_when_a_face_runs_both_arcs_the_same_way() {
        let d = build::hopf(true);
        // A face travels arcs 1 and 3 both against their arrows, so the
        // band joins each head half to the other tail half and the two
        // components merge with every orientation intact.
        let s = saddle(&d, 1, 3).unwrap();
        assert_eq!(s.output.component_count(), 1);
        assert_eq!(s.output.writhe(), d.writhe());
        check_star(&s, &d);
    }

    #[test]
    fn saddle_rejects_a_band_that_cannot_lie_in_a_face() {
        let d = build::trefoil(true);
        // arcs 1 and 4 never border a common face
        assert!(saddle(&d, 1, 4).is_err());
    }

    #[test]
    fn saddle_pinching_one_arc_adds_a_circle() {
        let d = build::trefoil(true);
        let s = saddle(&d, 1, 1).unwrap();
        assert_eq!(s.output.component_count(), 2);
        assert_eq!(s.output.free_loops().len(), 1);
        check_star(&s, &d);
    }

    #[test]
    fn saddle_absorbs_a_circle_into_an_arc() {
        let d = build::trefoil(true);
        let (with_circle, l) = birth(&d);
        for (p, q) in [(4, l), (l, 4)] {
            let s = saddle(&with_circle, p, q).unwrap();
            assert_eq!(s.output.component_count(), 1);
            assert!(s.output.free_loops().is_empty());
            check_star(&s, &with_circle);
        }
    }

    #[test]
    fn r1_round_trip_restores_diagram() {
        let d = build::trefoil(true);
        for sign in [1i8, -1] {
            let kinked = r1_do(&d, 1, sign).unwrap();
            assert_eq!(kinked.output.n_crossings(), 4);
            assert_eq!(kinked.output.writhe(), d.writhe() + i32::from(sign));
            let undone = r1_undo(&kinked.output, kinked.loop_arc).unwrap();
            assert_eq!(undone.sign, sign);
            assert_eq!(undone.output.crossings(), d.crossings());
            assert_eq!(undone.output.free_loops(), d.free_loops());
        }
    }

    #[test]
    fn r1_on_a_circle_and_back() {
        let d = build::unknot();
        let p = d.free_loops()[0];
        for sign in [1i8, -1] {
            let kinked = r1_do(&d, p, sign).unwrap();
            assert_eq!(kinked.output.n_crossings(), 1);
            assert_eq!(kinked.output.component_count(), 1);
            assert_eq!(kinked.output.writhe(), i32::from(sign));
            let undone = r1_undo(&kinked.output, kinked.loop_arc).unwrap();
            assert_eq!(undone.output.n_crossings(), 0);
            assert_eq!(undone.output.free_loops().len(), 1);
        }
    }

    #[test]
    fn r1_undo_rejects_a_strand_arc() {
        let d = build::trefoil(true);
        assert!(matches!(r1_undo(&d, 1), Err(CobordismError::BadSite(_))));
    }

    #[test]
    fn r2_round_trip_restores_diagram() {
        let d = build::trefoil(true);
        for side in [R2Side::Left, R2Side::Right] {
            for pattern in [R2Pattern::Parallel, R2Pattern::Antiparallel] {
                let done = r2_do(&d, 1, 4, side, pattern).unwrap();
                assert_eq!(done.output.n_crossings(), 5);
                assert_eq!(done.output.writhe(), d.writhe());
                let undone = r2_undo(&done.output, done.over_mid, done.under_mid).unwrap();
                assert_eq!(undone.output.crossings(), d.crossings());
                assert_eq!(undone.output.free_loops(), d.free_loops());
            }
        }
    }

    #[test]
    fn r2_on_two_circles_and_back() {
        let d = build::unlink(2);
        let done = r2_do(&d, 0, 1, R2Side::Left, R2Pattern::Parallel).unwrap();
        assert_eq!(done.output.n_crossings(), 2);
        assert_eq!(done.output.component_count(), 2);
        assert_eq!(done.output.writhe(), 0);
        let undone = r2_undo(&done.output, done.over_mid, done.under_mid).unwrap();
        assert_eq!(undone.output.n_crossings(), 0);
        assert_eq!(undone.output.free_loops().len(), 2);
    }

    #[test]
    fn r2_undo_rejects_a_clasp() {
        let d = build::hopf(true);
        assert!(matches!(r2_undo(&d, 1, 3), Err(CobordismError::BadSite(_))));
    }

    #[test]
    fn r3_matches_the_hand_computed_slide() {
        let d = triangle_diagram();
        let moved = r3(&d, [4, 5, 6]).unwrap();
        assert_eq!(moved.moving, 0);
        let got: Vec<[u32; 4]> = moved.output.crossings().iter().map(|c| c.slots).collect();
        assert_eq!(got, vec![[4, 1, 2, 5], [6, 5, 3, 1], [3, 4, 6, 2]]);
        for k in 0..3 {
            assert_eq!(moved.output.crossings()[k].sign, d.crossings()[k].sign);
        }
    }

    #[test]
    fn r3_is_involutive() {
        let d = triangle_diagram();
        let moved = r3(&d, [4, 5, 6]).unwrap();
        assert_ne!(moved.output.crossings(), d.crossings());
        let back = r3(&moved.output, [4, 5, 6]).unwrap();
        assert_eq!(back.output.crossings(), d.crossings());
        assert_eq!(back.moving, moved.moving);
    }

    #[test]
    fn smoothing_matches_resolution_circles() {
        for d in [build::hopf(true), build::trefoil(false), build::figure_eight()] {
            let n = d.n_crossings();
            for k in 0..n {
                for bit in [0u8, 1] {
                    let sm = smooth(&d, k, bit).unwrap();
                    for rest in 0..1u32 << (n - 1) {
                        let full = (rest & ((1 << k) - 1))
                            | (u32::from(bit) << k)
                            | ((rest >> k) << (k + 1));
                        assert_eq!(
                            d.resolve(Resolution(full)).circle_count(),
                            sm.output.resolve(Resolution(rest)).circle_count(),
                            "k={k} bit={bit} rest={rest}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn smoothing_the_triangle_example_gives_known_facets() {
        let d = triangle_diagram();
        let sm = smooth(&d, 0, 0).unwrap();
        let got: Vec<[u32; 4]> = sm.output.crossings().iter().map(|c| c.slots).collect();
        assert_eq!(got, vec![[3, 1, 6, 2], [6, 2, 3, 1]]);
        assert_eq!(sm.ancestors[&1], BTreeSet::from([1, 4]));
        assert_eq!(sm.ancestors[&2], BTreeSet::from([2, 5]));
        assert!(sm.demoted.is_empty());
    }

    #[test]
    fn smoothing_a_kink_demotes_the_loop() {
        let d = build::kink(true);
        let sm = smooth(&d, 0, 0).unwrap();
        assert_eq!(sm.output.n_crossings(), 0);
        assert_eq!(sm.output.free_loops().len(), 2);
        assert_eq!(sm.demoted.len(), 2);
    }

    #[test]
    fn relabel_round_trip() {
        let d = build::figure_eight();
        let fwd: BTreeMap<u32, u32> =
            d.arc_labels().iter().map(|&a| (a, a + 100)).collect();
        let renamed = isotopy_relabel(&d, &fwd).unwrap();
        let back: BTreeMap<u32, u32> = fwd.iter().map(|(&a, &b)| (b, a)).collect();
        let restored = isotopy_relabel(&renamed, &back).unwrap();
        assert_eq!(restored.crossings(), d.crossings());
    }

    #[test]
    fn relabel_rejects_collisions() {
        let d = build::trefoil(true);
        let map = BTreeMap::from([(0u32, 1u32)]);
        assert!(matches!(
            isotopy_relabel(&d, &map),
            Err(CobordismError::BadSite(_))
        ));
    }
}
