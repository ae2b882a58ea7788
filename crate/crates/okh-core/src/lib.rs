//! Link homology over the ring k = Z[pi]/(pi^2 - 1).
//!
//! Setting pi = -1 specializes to odd Khovanov homology, pi = +1 to the
//! even theory. The crate computes both from planar diagrams, builds the
//! chain maps induced by elementary link cobordisms and movies of diagrams,
//! and ships a verification harness for the structural identities the
//! construction relies on (commutativity types of cube faces, sign
//! assignments, movie-move relations).

pub mod cobordism;
pub mod complex;
pub mod cube;
pub mod diagram;
pub mod ring;
pub mod tqft;

pub use diagram::{Diagram, Resolution, ResolvedDiagram};
pub use ring::RingElem;
