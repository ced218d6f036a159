use thiserror::Error;

use crate::complex::Face;

/// Errors raised by constructions and operator assembly.
///
/// Theorem checks never fail through this type; they return reports with
/// a `holds` flag instead.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("dimension {dim} out of range: {reason}")]
    DimensionOutOfRange { dim: isize, reason: String },

    #[error("invalid weight {weight} on face {face}")]
    InvalidWeight { face: Face, weight: f64 },

    #[error("explicit weights do not cover face {0}")]
    MissingWeight(Face),

    #[error("image of {face} repeats a vertex, not a bijection")]
    NotABijection { face: Face },

    #[error("decoration does not cover incidence ({face}, {cofacet})")]
    MissingIncidence { face: Face, cofacet: Face },

    #[error("no voltage on edge ({0}, {1})")]
    MissingVoltage(usize, usize),

    #[error("cocycle condition fails on 2-face {0}")]
    CocycleViolation(Face),

    #[error("covering violation: {0}")]
    Covering(#[from] CoveringViolation),

    #[error("voltage group closure exceeded bound {0}")]
    GroupTooLarge(usize),

    #[error(
        "representation decomposition failed: residual {residual:e} after {attempts} attempts"
    )]
    DecompositionFailed { residual: f64, attempts: usize },

    #[error("voltage group is not abelian")]
    NonAbelian,

    #[error("voltage group does not act transitively (disconnected lift)")]
    NotTransitive,

    #[error("fold count must be {expected}, got {got}")]
    WrongFold { expected: usize, got: usize },

    #[error("weight ratio hypothesis fails at ({face}, {cofacet})")]
    WeightRatio { face: Face, cofacet: Face },

    #[error("eigensolver did not converge")]
    EigenFailure,
}

/// A violated covering axiom, with a witness face.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoveringViolation {
    #[error("covering complex is not connected ({components} components)")]
    Disconnected { components: usize },

    #[error("vertex {0} of the cover has no image")]
    UnmappedVertex(usize),

    #[error("image of {face} is not a face of the base")]
    NotSimplicial { face: Face },

    #[error("{face} is not mapped bijectively onto its image")]
    NotBijectiveOnFace { face: Face },

    #[error("fiber over {base} is not a disjoint union: {first} and {second} intersect")]
    FiberOverlap {
        base: Face,
        first: Face,
        second: Face,
    },

    #[error("{face} over {base} has no lift of cofacet {base_cofacet}")]
    StrongLiftMissing {
        face: Face,
        base: Face,
        base_cofacet: Face,
    },

    #[error("fiber over {base} has {size} faces, expected {expected}")]
    FiberSize {
        base: Face,
        size: usize,
        expected: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
