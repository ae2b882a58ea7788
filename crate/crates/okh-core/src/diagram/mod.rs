//! Planar link diagrams from PD codes.
//!
//! A crossing `X(a,b,c,d)` lists four arc labels counterclockwise starting
//! at the incoming under-strand, so the under-strand runs a -> c and the
//! over-strand occupies slots b, d. Orientations are propagated from the
//! under-strand constraints; a component that never passes under must be
//! oriented explicitly. Each crossing additionally carries an arrow (one
//! of two transverse orientations), the extra local datum the odd theory
//! needs.

pub mod parse;
pub mod resolve;
pub mod build;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use resolve::{Circle, CircleKey, CornerLoc, Resolution, ResolvedDiagram};

pub type ArcLabel = u32;
pub type LoopLabel = u32;

/// The two transverse orientations a crossing can carry.
///
/// `Single` puts the arrow tail on the resolution arc containing slot 0
/// (the {a,b} arc of the 0-resolution); `Double` swaps tail and head.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum ArrowKind {
    Single,
    Double,
}

impl ArrowKind {
    pub fn flipped(self) -> ArrowKind {
        match self {
            ArrowKind::Single => ArrowKind::Double,
            ArrowKind::Double => ArrowKind::Single,
        }
    }
}

/// One end of an arc: a slot of a crossing.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Endpoint {
    pub crossing: u32,
    pub slot: u8,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Crossing {
    /// Arc labels at slots 0..4, counterclockwise from the incoming
    /// under-strand.
    pub slots: [ArcLabel; 4],
    pub arrow: ArrowKind,
    /// +1 or -1 once orientations are fixed.
    pub sign: i8,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("arc {0} occurs {1} times, expected exactly 2")]
    BadArcCount(ArcLabel, usize),
    #[error("strand orientations cannot be propagated consistently")]
    OrientationInconsistent,
    #[error("component orientation is ambiguous; list it under `components`")]
    OrientationAmbiguous,
    #[error("declared component does not match the diagram's strands")]
    BadComponent,
    #[error("duplicate label {0}")]
    DuplicateLabel(u32),
    #[error("unknown arc {0}")]
    UnknownArc(ArcLabel),
    #[error("unknown loop {0}")]
    UnknownLoop(LoopLabel),
    #[error("parse error: {0}")]
    Parse(String),
}

/// An oriented link diagram. Arcs keep their public labels; free loops are
/// crossingless circles with labels of their own.
#[derive(Clone, Debug)]
pub struct Diagram {
    crossings: Vec<Crossing>,
    free_loops: Vec<LoopLabel>,
    /// Dense arc index -> label, ascending by label.
    arcs: Vec<ArcLabel>,
    arc_index: BTreeMap<ArcLabel, u32>,
    /// Per arc index: [tail endpoint, head endpoint]. The arc flows out of
    /// its tail crossing and into its head crossing.
    endpoints: Vec<[Endpoint; 2]>,
    /// Arc-index cycles in travel order, one per arc-bearing component.
    components: Vec<Vec<u32>>,
}

impl Diagram {
    /// Build and validate a diagram. `declared` optionally pins component
    /// orientations: each entry lists a component's arc labels in travel
    /// order. For a two-arc component travel order fixes no direction; the
    /// first listed arc is then taken to flow out of its lexicographically
    /// smallest (crossing, slot) endpoint.
    pub fn new(
        crossings: Vec<([ArcLabel; 4], ArrowKind)>,
        free_loops: Vec<LoopLabel>,
        declared: Option<&[Vec<ArcLabel>]>,
    ) -> Result<Diagram, DiagramError> {
        let mut d = Diagram::raw(crossings, free_loops)?;
        let (hard, soft) = match declared {
            Some(decl) => d.pins_from_declared(decl)?,
            None => (BTreeMap::new(), BTreeMap::new()),
        };
        d.orient(&hard, &soft)?;
        d.compute_signs();
        Ok(d)
    }

    /// Build with explicit head pins: `pins[arc]` is the endpoint the arc
    /// must flow into. Any subset that disambiguates every over-only
    /// component will do. Used by the movie rewriter, which knows the
    /// intended direction of every arc it creates.
    pub fn with_head_pins(
        crossings: Vec<([ArcLabel; 4], ArrowKind)>,
        free_loops: Vec<LoopLabel>,
        pins: &BTreeMap<ArcLabel, Endpoint>,
    ) -> Result<Diagram, DiagramError> {
        let mut d = Diagram::raw(crossings, free_loops)?;
        let mut by_idx = BTreeMap::new();
        for (&label, &ep) in pins {
            let idx = d.arc_idx(label)?;
            if !d.endpoints[idx as usize].contains(&ep) {
                return Err(DiagramError::BadComponent);
            }
            by_idx.insert(idx, ep);
        }
        d.orient(&by_idx, &BTreeMap::new())?;
        d.compute_signs();
        Ok(d)
    }

    fn raw(
        crossings: Vec<([ArcLabel; 4], ArrowKind)>,
        free_loops: Vec<LoopLabel>,
    ) -> Result<Diagram, DiagramError> {
        {
            let mut seen = BTreeSet::new();
            for &l in &free_loops {
                if !seen.insert(l) {
                    return Err(DiagramError::DuplicateLabel(l));
                }
            }
        }

        let mut occurrences: BTreeMap<ArcLabel, Vec<Endpoint>> = BTreeMap::new();
        for (ci, (slots, _)) in crossings.iter().enumerate() {
            for (si, &arc) in slots.iter().enumerate() {
                occurrences.entry(arc).or_default().push(Endpoint {
                    crossing: ci as u32,
                    slot: si as u8,
                });
            }
        }
        for (&arc, eps) in &occurrences {
            if eps.len() != 2 {
                return Err(DiagramError::BadArcCount(arc, eps.len()));
            }
        }

        let arcs: Vec<ArcLabel> = occurrences.keys().copied().collect();
        let arc_index: BTreeMap<ArcLabel, u32> =
            arcs.iter().enumerate().map(|(i, &a)| (a, i as u32)).collect();
        let endpoints: Vec<[Endpoint; 2]> = arcs
            .iter()
            .map(|a| {
                let eps = &occurrences[a];
                [eps[0], eps[1]]
            })
            .collect();

        Ok(Diagram {
            crossings: crossings
                .into_iter()
                .map(|(slots, arrow)| Crossing { slots, arrow, sign: 0 })
                .collect(),
            free_loops,
            arcs,
            arc_index,
            endpoints,
            components: Vec::new(),
        })
    }

    /// Turn declared travel orders into head pins (arc index -> endpoint).
    /// Hard pins come from unambiguous order transitions and must agree
    /// with propagation; soft pins are tie-breakers for components whose
    /// order fixes no direction, consulted only when nothing else does.
    #[allow(clippy::type_complexity)]
    fn pins_from_declared(
        &self,
        declared: &[Vec<ArcLabel>],
    ) -> Result<(BTreeMap<u32, Endpoint>, BTreeMap<u32, Endpoint>), DiagramError> {
        let mut pins = BTreeMap::new();
        let mut soft = BTreeMap::new();
        for comp in declared {
            // A singleton listing a free loop is allowed and carries no
            // orientation data.
            if let [only] = comp[..] {
                if !self.arc_index.contains_key(&only) && self.free_loops.contains(&only) {
                    continue;
                }
            }
            let idxs: Vec<u32> = comp
                .iter()
                .map(|l| self.arc_idx(*l))
                .collect::<Result<_, _>>()?;
            if idxs.is_empty() {
                continue;
            }
            let mut derived_any = false;
            let n = idxs.len();
            for k in 0..n {
                let x = idxs[k];
                let y = idxs[(k + 1) % n];
                if x == y {
                    continue;
                }
                // The transition x -> y passes through a crossing where x
                // ends and y starts. Pin only when the site is unique.
                let mut candidates = Vec::new();
                for &ex in &self.endpoints[x as usize] {
                    let partner = Endpoint {
                        crossing: ex.crossing,
                        slot: through_partner(ex.slot),
                    };
                    if self.endpoints[y as usize].contains(&partner) {
                        candidates.push(ex);
                    }
                }
                match candidates.len() {
                    0 => return Err(DiagramError::BadComponent),
                    1 => {
                        let prev = pins.insert(x, candidates[0]);
                        if prev.is_some_and(|p| p != candidates[0]) {
                            return Err(DiagramError::BadComponent);
                        }
                        derived_any = true;
                    }
                    _ => {}
                }
            }
            if !derived_any {
                // One- or two-arc cycle: anchor on the first arc.
                let first = idxs[0];
                let [e0, e1] = self.endpoints[first as usize];
                let head = if e0 < e1 { e1 } else { e0 };
                soft.insert(first, head);
            }
        }
        Ok((pins, soft))
    }

    /// Walk the underlying curves and fix arc directions. `pins` maps arc
    /// index -> required head endpoint; `soft` pins break ties only.
    fn orient(
        &mut self,
        pins: &BTreeMap<u32, Endpoint>,
        soft: &BTreeMap<u32, Endpoint>,
    ) -> Result<(), DiagramError> {
        let n_arcs = self.arcs.len();
        let mut visited = vec![false; n_arcs];
        let mut components = Vec::new();

        for start in 0..n_arcs {
            if visited[start] {
                continue;
            }
            // Walk the component. forward_ep[k] marks the endpoint of arc
            // cycle[k] the walk runs into.
            let mut cycle: Vec<u32> = Vec::new();
            let mut forward_ep: Vec<usize> = Vec::new();
            let mut arc = start as u32;
            let mut fwd = 1usize;
            loop {
                visited[arc as usize] = true;
                cycle.push(arc);
                forward_ep.push(fwd);
                let ep = self.endpoints[arc as usize][fwd];
                let partner = through_partner(ep.slot);
                let next_label = self.crossings[ep.crossing as usize].slots[partner as usize];
                let next_arc = self.arc_index[&next_label];
                let enter = Endpoint { crossing: ep.crossing, slot: partner };
                let next_fwd =
                    if self.endpoints[next_arc as usize][0] == enter { 1 } else { 0 };
                if next_arc == start as u32 && next_fwd == 1 {
                    break;
                }
                arc = next_arc;
                fwd = next_fwd;
            }

            // Votes: arriving at slot 0 or departing from slot 2 means the
            // walk agrees with the under-strand's direction.
            let mut vote: Option<bool> = None;
            let mut tally = |v: bool| -> Result<(), DiagramError> {
                match vote {
                    None => {
                        vote = Some(v);
                        Ok(())
                    }
                    Some(prev) if prev == v => Ok(()),
                    Some(_) => Err(DiagramError::OrientationInconsistent),
                }
            };
            for (k, &a) in cycle.iter().enumerate() {
                let arrive = self.endpoints[a as usize][forward_ep[k]];
                match arrive.slot {
                    0 => tally(true)?,
                    2 => tally(false)?,
                    _ => {}
                }
                let depart = self.endpoints[a as usize][1 - forward_ep[k]];
                match depart.slot {
                    0 => tally(false)?,
                    2 => tally(true)?,
                    _ => {}
                }
                if let Some(&head) = pins.get(&a) {
                    tally(head == arrive)?;
                }
            }
            if vote.is_none() {
                for (k, &a) in cycle.iter().enumerate() {
                    if let Some(&head) = soft.get(&a) {
                        vote = Some(head == self.endpoints[a as usize][forward_ep[k]]);
                        break;
                    }
                }
            }

            let aligned = vote.ok_or(DiagramError::OrientationAmbiguous)?;
            let (cycle, forward_ep) = if aligned {
                (cycle, forward_ep)
            } else {
                let mut c = cycle;
                let mut f = forward_ep;
                c.reverse();
                f.reverse();
                for x in &mut f {
                    *x = 1 - *x;
                }
                (c, f)
            };
            for (k, &a) in cycle.iter().enumerate() {
                if forward_ep[k] == 0 {
                    self.endpoints[a as usize].swap(0, 1);
                }
            }
            components.push(cycle);
        }
        self.components = components;
        Ok(())
    }

    fn compute_signs(&mut self) {
        for ci in 0..self.crossings.len() {
            let b_arc = self.arc_index[&self.crossings[ci].slots[1]];
            // Positive iff the over-strand flows slot 3 -> slot 1.
            let tail_at_b = self.endpoints[b_arc as usize][0]
                == Endpoint { crossing: ci as u32, slot: 1 };
            self.crossings[ci].sign = if tail_at_b { 1 } else { -1 };
        }
    }

    fn arc_idx(&self, label: ArcLabel) -> Result<u32, DiagramError> {
        self.arc_index
            .get(&label)
            .copied()
            .ok_or(DiagramError::UnknownArc(label))
    }

    pub fn n_crossings(&self) -> usize {
        self.crossings.len()
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn free_loops(&self) -> &[LoopLabel] {
        &self.free_loops
    }

    pub fn arc_labels(&self) -> &[ArcLabel] {
        &self.arcs
    }

    pub fn has_arc(&self, label: ArcLabel) -> bool {
        self.arc_index.contains_key(&label)
    }

    pub fn has_loop(&self, label: LoopLabel) -> bool {
        self.free_loops.contains(&label)
    }

    /// [tail, head] endpoints of an arc.
    pub fn arc_endpoints(&self, label: ArcLabel) -> Result<[Endpoint; 2], DiagramError> {
        Ok(self.endpoints[self.arc_idx(label)? as usize])
    }

    /// Number of link components, free loops included.
    pub fn component_count(&self) -> usize {
        self.components.len() + self.free_loops.len()
    }

    /// Arc-bearing components as label cycles in travel order.
    pub fn components(&self) -> Vec<Vec<ArcLabel>> {
        self.components
            .iter()
            .map(|c| c.iter().map(|&i| self.arcs[i as usize]).collect())
            .collect()
    }

    pub fn signs(&self) -> (u32, u32) {
        let pos = self.crossings.iter().filter(|c| c.sign > 0).count() as u32;
        (pos, self.crossings.len() as u32 - pos)
    }

    pub fn writhe(&self) -> i32 {
        let (p, n) = self.signs();
        p as i32 - n as i32
    }

    pub fn arrows(&self) -> Vec<ArrowKind> {
        self.crossings.iter().map(|c| c.arrow).collect()
    }

    /// Same diagram with one crossing's arrow flipped.
    pub fn with_arrow_flipped(&self, crossing: usize) -> Diagram {
        let mut d = self.clone();
        d.crossings[crossing].arrow = d.crossings[crossing].arrow.flipped();
        d
    }

    pub fn with_arrows(&self, arrows: &[ArrowKind]) -> Diagram {
        let mut d = self.clone();
        for (c, &a) in d.crossings.iter_mut().zip(arrows) {
            c.arrow = a;
        }
        d
    }

    /// First label unused by arcs and loops; rewrites allocate from here.
    /// Arcs and loops share one label space so provenance stays unambiguous.
    pub fn next_label(&self) -> u32 {
        let a = self.arcs.iter().copied().max().map_or(0, |m| m + 1);
        let l = self.free_loops.iter().copied().max().map_or(0, |m| m + 1);
        a.max(l)
    }

    /// Faces of the underlying 4-valent planar graph, as cycles of directed
    /// arc sides. Each face is traced keeping it on the left: arriving at a
    /// crossing through slot s, the boundary departs from slot s-1 (mod 4).
    /// Free loops touch no crossings and are not listed.
    pub fn faces(&self) -> Vec<Vec<DirectedArc>> {
        let mut seen = BTreeSet::new();
        let mut faces = Vec::new();
        for ci in 0..self.crossings.len() {
            for slot in 0..4u8 {
                if seen.contains(&(ci as u32, slot)) {
                    continue;
                }
                let mut face = Vec::new();
                let mut cur = Endpoint { crossing: ci as u32, slot };
                loop {
                    if !seen.insert((cur.crossing, cur.slot)) {
                        break;
                    }
                    let arc_here =
                        self.crossings[cur.crossing as usize].slots[cur.slot as usize];
                    face.push(DirectedArc { arc: arc_here, into: cur });
                    let depart_slot = (cur.slot + 3) % 4;
                    let depart_arc =
                        self.crossings[cur.crossing as usize].slots[depart_slot as usize];
                    let idx = self.arc_index[&depart_arc] as usize;
                    let from = Endpoint { crossing: cur.crossing, slot: depart_slot };
                    let [e0, e1] = self.endpoints[idx];
                    cur = if e0 == from { e1 } else { e0 };
                }
                faces.push(face);
            }
        }
        faces
    }
}

/// An arc traversed toward the given endpoint; used in face boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DirectedArc {
    pub arc: ArcLabel,
    pub into: Endpoint,
}

/// Strand continuation inside a crossing: under 0<->2, over 1<->3.
pub fn through_partner(slot: u8) -> u8 {
    (slot + 2) % 4
}
