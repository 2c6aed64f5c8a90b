//! The Hilbert metric on bounded convex polytopes.
//!
//! The crate computes the Hilbert metric of a bounded convex polytope by
//! several independent formulas, together with the objects built on top of
//! it: Finsler norms, metric balls and their volume growth, isometric
//! embeddings into polyhedrally normed spaces and a bi-Lipschitz chart onto
//! the dual space.
//!
//! | module | contents |
//! |--------|----------|
//! | [`polytope`] | H- and V-representations, conversions, chords |
//! | [`faces`] | face lattice |
//! | [`metric`] | cross-ratio, facet (Birkhoff) and polygon (Alexander) distances, Finsler norm |
//! | [`embedding`] | simplex log-embedding, simplex-section lift, polytope embedding |
//! | [`bilipschitz`] | Bernig's map, distortion and Finsler comparison experiments |
//! | [`volume`] | metric balls, Busemann / Holmes-Thompson volume, growth fits, ray divergence |
//! | [`output`] | CSV / JSON / SVG writers with reproducibility headers |
//! | [`sampling`] | seeded generators and direction sets |

pub mod bilipschitz;
pub mod embedding;
pub mod error;
pub mod faces;
pub(crate) mod linalg;
pub mod metric;
pub mod output;
pub mod polytope;
pub mod sampling;
pub mod volume;

pub use error::{GeomError, Result};
pub use polytope::{AffineFunctional, Chord, HRep, Point, PolytopeFile, VRep, Vector, TOL};
