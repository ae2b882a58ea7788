//! Link cobordisms as movies: elementary diagram rewrites (births, deaths,
//! saddles, the three move types), the chain maps each rewrite induces on
//! homology complexes, and sequential compilation of whole movie scripts.

pub mod maps;
pub mod moves;
pub mod rewrite;

use std::fmt;

use crate::complex::reduce::ElimError;
use crate::cube::CubeError;
use crate::diagram::DiagramError;

/// Everything that can go wrong while rewriting diagrams or building the
/// induced chain maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CobordismError {
    /// The named site does not exist in the diagram or does not have the
    /// shape the event requires.
    BadSite(String),
    /// A movie's endpoints do not match what the caller demanded.
    WrongEndpoints(String),
    /// Two objects that must be structurally parallel (circle systems,
    /// generator layouts, cube shapes) fail to correspond.
    ShapeMismatch(String),
    /// A constructed map failed its chain-map verification.
    NotAChainMap(&'static str),
    /// A constructed map failed to be the claimed (homotopy) equivalence.
    NotAnEquivalence(&'static str),
    /// Facet-prescribed edge units could not be extended over the larger
    /// cube.
    SeedNotExtendable,
    /// The two mapping cones that a move must identify do not match.
    ConeMismatch(&'static str),
    /// Two maps that must agree up to an invertible scalar do not.
    UnitComparisonFailed(&'static str),
    Diagram(DiagramError),
    Cube(CubeError),
    Elim(ElimError),
}

impl fmt::Display for CobordismError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CobordismError::BadSite(s) => write!(f, "bad site: {s}"),
            CobordismError::WrongEndpoints(s) => write!(f, "wrong endpoints: {s}"),
            CobordismError::ShapeMismatch(s) => write!(f, "shape mismatch: {s}"),
            CobordismError::NotAChainMap(s) => write!(f, "not a chain map: {s}"),
            CobordismError::NotAnEquivalence(s) => write!(f, "not an equivalence: {s}"),
            CobordismError::SeedNotExtendable => {
                write!(f, "facet sign seeds do not extend over the cube")
            }
            CobordismError::ConeMismatch(s) => write!(f, "cone mismatch: {s}"),
            CobordismError::UnitComparisonFailed(s) => {
                write!(f, "unit comparison failed: {s}")
            }
            CobordismError::Diagram(e) => write!(f, "diagram error: {e}"),
            CobordismError::Cube(e) => write!(f, "cube error: {e}"),
            CobordismError::Elim(e) => write!(f, "elimination error: {e}"),
        }
    }
}

impl std::error::Error for CobordismError {}

impl From<DiagramError> for CobordismError {
    fn from(e: DiagramError) -> Self {
        CobordismError::Diagram(e)
    }
}

impl From<CubeError> for CobordismError {
    fn from(e: CubeError) -> Self {
        CobordismError::Cube(e)
    }
}

impl From<ElimError> for CobordismError {
    fn from(e: ElimError) -> Self {
        CobordismError::Elim(e)
    }
}
