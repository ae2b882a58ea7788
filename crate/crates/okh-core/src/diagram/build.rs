//! Diagram constructors: braid closures, twist tangles, small standards.

use std::collections::BTreeMap;

use super::{through_partner, ArcLabel, ArrowKind, Diagram, DiagramError, Endpoint};

/// Closure of a braid word on `strands` strands, all oriented upward.
/// Letter +j (1-based) crosses positions j-1 and j with the left strand
/// passing over; -j passes the left strand under.
pub fn braid_closure(strands: usize, word: &[i32]) -> Result<Diagram, DiagramError> {
    assert!(strands >= 1);
    let mut current: Vec<ArcLabel> = (0..strands as u32).collect();
    let mut fresh = strands as u32;
    let mut crossings: Vec<([ArcLabel; 4], ArrowKind)> = Vec::new();
    let mut pins: BTreeMap<ArcLabel, Endpoint> = BTreeMap::new();

    for &letter in word {
        assert!(letter != 0, "braid letters are nonzero");
        let j = letter.unsigned_abs() as usize;
        assert!(
            (1..strands).contains(&j),
            "letter {letter} needs strand positions {j} and {}",
            j + 1
        );
        let (u, v) = (current[j - 1], current[j]);
        let nl = fresh;
        let nr = fresh + 1;
        fresh += 2;
        let ci = crossings.len() as u32;
        if letter > 0 {
            // Right strand goes under toward the upper left. Slots run
            // counterclockwise from the incoming under-strand:
            // SE, NE, NW, SW.
            crossings.push(([v, nr, nl, u], ArrowKind::Single));
            pins.insert(v, Endpoint { crossing: ci, slot: 0 });
            pins.insert(u, Endpoint { crossing: ci, slot: 3 });
        } else {
            // Left strand goes under toward the upper right: SW, SE, NE, NW.
            crossings.push(([u, v, nr, nl], ArrowKind::Single));
            pins.insert(u, Endpoint { crossing: ci, slot: 0 });
            pins.insert(v, Endpoint { crossing: ci, slot: 1 });
        }
        current[j - 1] = nl;
        current[j] = nr;
    }

    // Close up: the top of position i rejoins its bottom label i.
    let mut free_loops = Vec::new();
    for i in 0..strands {
        let bottom = i as u32;
        let top = current[i];
        if top == bottom {
            free_loops.push(bottom);
            continue;
        }
        for (slots, _) in &mut crossings {
            for s in slots.iter_mut() {
                if *s == top {
                    *s = bottom;
                }
            }
        }
        pins.remove(&top);
    }

    Diagram::with_head_pins(crossings, free_loops, &pins)
}

/// Orient crossing tuples whose slot 0 was chosen provisionally: walk the
/// underlying curves, pick a direction per component, and rotate by two
/// slots any tuple whose under-strand runs against it. Arrows stay
/// `Single`; rotation would otherwise flip them.
pub(crate) fn from_unoriented(tuples: Vec<[ArcLabel; 4]>) -> Result<Diagram, DiagramError> {
    let mut occ: BTreeMap<ArcLabel, Vec<Endpoint>> = BTreeMap::new();
    for (ci, slots) in tuples.iter().enumerate() {
        for (si, &a) in slots.iter().enumerate() {
            occ.entry(a)
                .or_default()
                .push(Endpoint { crossing: ci as u32, slot: si as u8 });
        }
    }
    for (&a, eps) in &occ {
        if eps.len() != 2 {
            return Err(DiagramError::BadArcCount(a, eps.len()));
        }
    }

    // Walk each underlying curve once, recording the head every arc gets.
    let mut heads: BTreeMap<ArcLabel, Endpoint> = BTreeMap::new();
    for &start in occ.keys() {
        if heads.contains_key(&start) {
            continue;
        }
        let mut label = start;
        let mut arrive = occ[&start][1];
        loop {
            heads.insert(label, arrive);
            let exit = through_partner(arrive.slot);
            let next = tuples[arrive.crossing as usize][exit as usize];
            let from = Endpoint { crossing: arrive.crossing, slot: exit };
            let eps = &occ[&next];
            let next_arrive = if eps[0] == from { eps[1] } else { eps[0] };
            if next == start {
                break;
            }
            label = next;
            arrive = next_arrive;
        }
    }

    // A tuple is aligned when the arc at slot 0 flows into it there.
    let mut rotated = vec![false; tuples.len()];
    let crossings: Vec<([ArcLabel; 4], ArrowKind)> = tuples
        .into_iter()
        .enumerate()
        .map(|(ci, slots)| {
            let aligned = heads[&slots[0]] == Endpoint { crossing: ci as u32, slot: 0 };
            if aligned {
                (slots, ArrowKind::Single)
            } else {
                rotated[ci] = true;
                ([slots[2], slots[3], slots[0], slots[1]], ArrowKind::Single)
            }
        })
        .collect();

    let pins: BTreeMap<ArcLabel, Endpoint> = heads
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

    Diagram::with_head_pins(crossings, vec![], &pins)
}

/// Twist-tangle diagram of a continued fraction [a1, a2, ...]: a1 twists
/// on the east side of the trivial tangle, a2 on the south side,
/// alternating, then the closure joining the north ends and the south
/// ends. Every entry must be positive; the result is an alternating
/// diagram of the corresponding two-bridge link.
pub fn two_bridge(fractions: &[u32]) -> Result<Diagram, DiagramError> {
    assert!(!fractions.is_empty());
    assert!(fractions.iter().all(|&a| a >= 1), "twist counts must be positive");

    // Open tangle ends.
    let (nw, mut ne, mut sw, mut se) = (0u32, 0u32, 1u32, 1u32);
    let mut fresh = 2u32;
    let mut tuples: Vec<[ArcLabel; 4]> = Vec::new();

    for (block, &count) in fractions.iter().enumerate() {
        for _ in 0..count {
            let a = fresh;
            let b = fresh + 1;
            fresh += 2;
            if block % 2 == 0 {
                // East twist: new crossing to the right of the tangle; its
                // west legs take the old NE/SE ends. The SW-NE strand goes
                // under. Slots (provisional): SW, SE, NE, NW.
                tuples.push([se, b, a, ne]);
                ne = a;
                se = b;
            } else {
                // South twist below the tangle; north legs take the old
                // SW/SE ends, the NW-SE strand goes under.
                // Slots (provisional): NW, SW, SE, NE.
                tuples.push([sw, a, b, se]);
                sw = a;
                se = b;
            }
        }
    }

    // Close against the axis of the last twist block: after a horizontal
    // block join north ends and south ends, after a vertical block join
    // west ends and east ends. At least one east twist happened, so all
    // four ends are distinct open arcs.
    let merge = |keep: u32, gone: u32, tuples: &mut Vec<[ArcLabel; 4]>| {
        debug_assert_ne!(keep, gone);
        for t in tuples.iter_mut() {
            for s in t.iter_mut() {
                if *s == gone {
                    *s = keep;
                }
            }
        }
    };
    if fractions.len() % 2 == 1 {
        merge(nw, ne, &mut tuples);
        merge(sw, se, &mut tuples);
    } else {
        merge(nw, sw, &mut tuples);
        merge(ne, se, &mut tuples);
    }

    from_unoriented(tuples)
}

pub fn unknot() -> Diagram {
    Diagram::new(vec![], vec![0], None).expect("unknot")
}

pub fn unlink(components: u32) -> Diagram {
    Diagram::new(vec![], (0..components).collect(), None).expect("unlink")
}

/// One-crossing unknot diagram of the given writhe.
pub fn kink(positive: bool) -> Diagram {
    let code = if positive { [1, 1, 2, 2] } else { [1, 2, 2, 1] };
    Diagram::new(vec![(code, ArrowKind::Single)], vec![], None).expect("kink")
}

pub fn hopf(positive: bool) -> Diagram {
    let s = if positive { 1 } else { -1 };
    braid_closure(2, &[s, s]).expect("hopf")
}

pub fn trefoil(positive: bool) -> Diagram {
    let s = if positive { 1 } else { -1 };
    braid_closure(2, &[s, s, s]).expect("trefoil")
}

pub fn figure_eight() -> Diagram {
    braid_closure(3, &[1, -2, 1, -2]).expect("figure eight")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn braid_standards() {
        assert_eq!(trefoil(true).signs(), (3, 0));
        assert_eq!(trefoil(false).signs(), (0, 3));
        assert_eq!(trefoil(true).component_count(), 1);
        assert_eq!(hopf(true).signs(), (2, 0));
        assert_eq!(hopf(true).component_count(), 2);
        assert_eq!(figure_eight().signs(), (2, 2));
        assert_eq!(figure_eight().component_count(), 1);
    }

    #[test]
    fn kinks() {
        assert_eq!(kink(true).signs(), (1, 0));
        assert_eq!(kink(false).signs(), (0, 1));
    }

    #[test]
    fn untouched_strand_closes_to_a_loop() {
        let d = braid_closure(3, &[1, 1]).unwrap();
        assert_eq!(d.component_count(), 3); // hopf plus a split unknot
        assert_eq!(d.free_loops().len(), 1);
    }

    #[test]
    fn two_bridge_shapes() {
        let t = two_bridge(&[3]).unwrap();
        assert_eq!(t.n_crossings(), 3);
        assert_eq!(t.component_count(), 1);
        let (p, n) = t.signs();
        assert!(p == 3 || n == 3); // torus closure is alternating yet here uniform

        let f8 = two_bridge(&[2, 2]).unwrap();
        assert_eq!(f8.n_crossings(), 4);
        assert_eq!(f8.component_count(), 1);

        let hopf2 = two_bridge(&[2]).unwrap();
        assert_eq!(hopf2.component_count(), 2);

        let big = two_bridge(&[2, 1, 1, 1, 2]).unwrap();
        assert_eq!(big.n_crossings(), 7);
        assert_eq!(big.component_count(), 1);
    }

    #[test]
    fn one_twist_is_an_unknot_kink() {
        let d = two_bridge(&[1]).unwrap();
        assert_eq!(d.n_crossings(), 1);
        assert_eq!(d.component_count(), 1);
    }

    #[test]
    fn unoriented_fixup_keeps_shape() {
        // Trefoil tuples with two of them rotated out of convention.
        let d = from_unoriented(vec![
            [2, 5, 3, 6], // rotation of [3,6,2,5]... any consistent choice
            [4, 1, 5, 2],
            [6, 3, 1, 4],
        ])
        .unwrap();
        assert_eq!(d.component_count(), 1);
        assert_eq!(d.writhe().abs(), 3);
    }
}
