//! Resolutions of a diagram and the circles they produce.
//!
//! The 0-resolution of `X(a,b,c,d)` joins slots {0,1} and {2,3}; the
//! 1-resolution joins {1,2} and {3,0}. Corner 0 of a resolved crossing is
//! the smoothing arc containing slot 0, corner 1 the other; the saddle
//! channel of the crossing sits between the two corners.

use std::collections::BTreeMap;
use std::fmt;

use super::{ArcLabel, Diagram, Endpoint, LoopLabel};

/// A vertex of the resolution cube: bit i is crossing i's resolution.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Resolution(pub u32);

impl Resolution {
    pub fn bit(self, i: usize) -> u8 {
        ((self.0 >> i) & 1) as u8
    }

    pub fn with_bit(self, i: usize, v: u8) -> Resolution {
        let mask = 1u32 << i;
        Resolution(if v == 0 { self.0 & !mask } else { self.0 | mask })
    }

    /// Homological weight: number of 1-resolved crossings.
    pub fn weight(self) -> u32 {
        self.0.count_ones()
    }

    pub fn all(n: usize) -> impl Iterator<Item = Resolution> {
        (0u32..(1u32 << n)).map(Resolution)
    }

    pub fn display(self, n: usize) -> String {
        (0..n).map(|i| char::from(b'0' + self.bit(i))).collect()
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:b}", self.0)
    }
}

/// Smoothing continuation at a resolved crossing.
pub fn smoothing_partner(res_bit: u8, slot: u8) -> u8 {
    match (res_bit, slot) {
        (0, 0) => 1,
        (0, 1) => 0,
        (0, 2) => 3,
        (0, 3) => 2,
        (1, 0) => 3,
        (1, 1) => 2,
        (1, 2) => 1,
        (1, 3) => 0,
        _ => unreachable!("slot out of range"),
    }
}

/// One pass of a circle through a resolved crossing: the circle enters at
/// `enter`, rides the smoothing arc, and leaves at `exit`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CircleVisit {
    pub crossing: u32,
    pub enter: u8,
    pub exit: u8,
}

impl CircleVisit {
    /// Which smoothing arc this visit rides: 0 if it contains slot 0.
    pub fn corner(&self) -> u8 {
        u8::from(self.enter != 0 && self.exit != 0)
    }

    /// True when the crossing's saddle channel lies to the left of travel.
    pub fn channel_left(&self) -> bool {
        self.exit == (self.enter + 1) % 4
    }
}

/// Deterministic circle name: the smallest arc label on it, or the loop
/// label for a crossingless circle. Arc-bearing circles sort first.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum CircleKey {
    Arc(ArcLabel),
    Loop(LoopLabel),
}

#[derive(Clone, Debug)]
pub struct Circle {
    pub key: CircleKey,
    /// Arcs in traversal order; arcs[k] runs into visits[k]. Empty for a
    /// free loop.
    pub arcs: Vec<ArcLabel>,
    pub visits: Vec<CircleVisit>,
}

/// Where a crossing's corner lies: circle index and visit index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CornerLoc {
    pub circle: u32,
    pub visit: u32,
}

#[derive(Clone, Debug)]
pub struct ResolvedDiagram {
    /// Sorted by key: arc circles ascending, then loops ascending.
    pub circles: Vec<Circle>,
    /// Per crossing: locations of corner 0 and corner 1.
    pub corner_loc: Vec<[CornerLoc; 2]>,
    arc_pos: BTreeMap<ArcLabel, (u32, u32)>,
}

impl ResolvedDiagram {
    pub fn circle_count(&self) -> usize {
        self.circles.len()
    }

    /// Circle index and traversal position of an arc.
    pub fn arc_pos(&self, arc: ArcLabel) -> Option<(u32, u32)> {
        self.arc_pos.get(&arc).copied()
    }

    pub fn circle_of_key(&self, key: CircleKey) -> Option<u32> {
        self.circles
            .binary_search_by(|c| c.key.cmp(&key))
            .ok()
            .map(|i| i as u32)
    }

    pub fn keys(&self) -> Vec<CircleKey> {
        self.circles.iter().map(|c| c.key).collect()
    }

    pub fn corner(&self, crossing: u32, corner: u8) -> CornerLoc {
        self.corner_loc[crossing as usize][corner as usize]
    }

    pub fn visit(&self, loc: CornerLoc) -> CircleVisit {
        self.circles[loc.circle as usize].visits[loc.visit as usize]
    }
}

impl Diagram {
    /// Circles of one cube vertex.
    pub fn resolve(&self, res: Resolution) -> ResolvedDiagram {
        let n_arcs = self.arcs.len();
        let mut visited = vec![false; n_arcs];
        let mut circles: Vec<Circle> = Vec::new();

        for start in 0..n_arcs {
            if visited[start] {
                continue;
            }
            let start_label = self.arcs[start];
            // Travel toward the arc's head first; direction is a
            // convention, consumers must not depend on it.
            let start_arrive = self.endpoints[start][1];
            let mut arcs = Vec::new();
            let mut visits = Vec::new();
            let mut label = start_label;
            let mut arrive = start_arrive;
            loop {
                let idx = self.arc_index[&label] as usize;
                visited[idx] = true;
                arcs.push(label);
                let bit = res.bit(arrive.crossing as usize);
                let exit = smoothing_partner(bit, arrive.slot);
                visits.push(CircleVisit {
                    crossing: arrive.crossing,
                    enter: arrive.slot,
                    exit,
                });
                let next_label =
                    self.crossings[arrive.crossing as usize].slots[exit as usize];
                let from = Endpoint { crossing: arrive.crossing, slot: exit };
                let [e0, e1] = self.endpoints[self.arc_index[&next_label] as usize];
                let next_arrive = if e0 == from { e1 } else { e0 };
                if next_label == start_label && next_arrive == start_arrive {
                    break;
                }
                label = next_label;
                arrive = next_arrive;
            }
            let key = CircleKey::Arc(arcs.iter().copied().min().expect("nonempty circle"));
            circles.push(Circle { key, arcs, visits });
        }

        for &l in &self.free_loops {
            circles.push(Circle { key: CircleKey::Loop(l), arcs: vec![], visits: vec![] });
        }
        circles.sort_by_key(|c| c.key);

        let mut arc_pos = BTreeMap::new();
        let mut corner_loc =
            vec![[CornerLoc { circle: u32::MAX, visit: u32::MAX }; 2]; self.crossings.len()];
        for (ci, circle) in circles.iter().enumerate() {
            for (k, &a) in circle.arcs.iter().enumerate() {
                arc_pos.insert(a, (ci as u32, k as u32));
            }
            for (k, v) in circle.visits.iter().enumerate() {
                corner_loc[v.crossing as usize][v.corner() as usize] =
                    CornerLoc { circle: ci as u32, visit: k as u32 };
            }
        }
        debug_assert!(corner_loc
            .iter()
            .all(|pair| pair.iter().all(|l| l.circle != u32::MAX)));

        ResolvedDiagram { circles, corner_loc, arc_pos }
    }

    /// Superdegree shift of a vertex: half of
    /// (circles + weight + n+ - 2n- - components). The numerator is always
    /// even for diagrams of oriented links.
    pub fn super_shift(&self, res: Resolution, resolved: &ResolvedDiagram) -> i32 {
        let (p, n) = self.signs();
        let num = resolved.circle_count() as i32 + res.weight() as i32 + p as i32
            - 2 * n as i32
            - self.component_count() as i32;
        assert!(num.rem_euclid(2) == 0, "superdegree shift must be integral");
        num.div_euclid(2)
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse_pd;
    use super::*;

    #[test]
    fn kink_circle_counts() {
        let d = parse_pd("PD[X(1,1,2,2)]").unwrap();
        assert_eq!(d.resolve(Resolution(0)).circle_count(), 2);
        assert_eq!(d.resolve(Resolution(1)).circle_count(), 1);
    }

    #[test]
    fn hopf_circle_counts() {
        let d = parse_pd("PD[X(1,4,2,3),X(3,2,4,1)]").unwrap();
        let counts: Vec<usize> = Resolution::all(2)
            .map(|r| d.resolve(r).circle_count())
            .collect();
        assert_eq!(counts, vec![2, 1, 1, 2]);
    }

    #[test]
    fn kink_one_smoothing_channel_sides() {
        // The single circle of the 1-smoothing passes the crossing twice
        // with the channel on the same side both times.
        let d = parse_pd("PD[X(1,1,2,2)]").unwrap();
        let r = d.resolve(Resolution(1));
        assert_eq!(r.circle_count(), 1);
        let sides: Vec<bool> =
            r.circles[0].visits.iter().map(|v| v.channel_left()).collect();
        assert_eq!(sides.len(), 2);
        assert_eq!(sides[0], sides[1]);
    }

    #[test]
    fn corners_cover_every_crossing() {
        let d = parse_pd("PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]").unwrap();
        for res in Resolution::all(3) {
            let r = d.resolve(res);
            for c in 0..3u32 {
                for corner in 0..2u8 {
                    let loc = r.corner(c, corner);
                    let v = r.visit(loc);
                    assert_eq!(v.crossing, c);
                    assert_eq!(v.corner(), corner);
                }
            }
        }
    }

    #[test]
    fn free_loops_become_circles() {
        let d = super::super::Diagram::new(vec![], vec![3, 7], None).unwrap();
        let r = d.resolve(Resolution(0));
        assert_eq!(r.circle_count(), 2);
        assert_eq!(r.keys(), vec![CircleKey::Loop(3), CircleKey::Loop(7)]);
    }

    #[test]
    fn super_shift_integral_on_knots() {
        let d = parse_pd("PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]").unwrap();
        for res in Resolution::all(3) {
            let r = d.resolve(res);
            let _ = d.super_shift(res, &r);
        }
    }
}
