//! Modeling and analysis toolkit for beamformed relay networks under 1-2-1
//! scheduling: a link is live only while transmitter and receiver beams
//! face each other, so relays forward on one incoming and one outgoing edge
//! per slot while the endpoints drive up to M beams.
//!
//! The crate computes exact capacity bounds against a passive K-edge
//! wiretapper, constructs MDS-key coding schemes that meet them, verifies
//! perfect secrecy against every wiretap subset by exact linear algebra
//! (cross-checked by an exhaustive mutual-information oracle), and solves
//! the non-uniform diamond time-allocation program with an exact rational
//! simplex.

pub mod adversary;
pub mod bounds;
pub mod coding;
pub mod diamond;
pub mod entropy;
pub mod field;
pub mod netmodel;
pub mod paths;
pub mod rng;
pub mod subsets;
