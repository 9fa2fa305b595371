//! Eavesdropper modeling and secrecy verification.
//!
//! A wiretapper reads a fixed K-edge subset for the whole period and knows
//! the scheme (matrices, schedule, slot order) but not the key values. Her
//! view of one symbol position is the affine map Z = A W + B X with W the
//! message packets and X the uniformly random base keys. Perfect secrecy
//! I(W; Z) = 0 holds exactly when the column space of A lies inside the
//! column space of B, i.e. rank([A | B]) = rank(B): every message-driven
//! shift of the transcript is already a key-driven one.
//!
//! [`verify_all_subsets`] runs that rank check over every K-subset of the
//! network's edges in colex order, so a reported witness is reproducible.
//! [`mutual_information_oracle`] recomputes I(W; Z) for GF(2) schemes by
//! exhaustive enumeration of all message/key assignments; it is the
//! independent ground truth the rank check is tested against.

use crate::coding::CodingScheme;
use crate::field::{Field, Matrix, Symbol};
use crate::netmodel::EdgeId;
use crate::subsets::{binomial, colex_subsets};
use thiserror::Error;

/// Refuse exhaustive subset verification beyond this many subsets.
pub const MAX_SUBSETS: u128 = 10_000_000;

/// Refuse the exhaustive oracle beyond this many message + key symbols.
pub const MAX_ORACLE_SYMBOLS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdversaryError {
    #[error("unknown edge id {0}")]
    BadEdgeId(EdgeId),
    #[error("duplicate edge id {0} in wiretap set")]
    DuplicateEdge(EdgeId),
    #[error("{subsets} subsets of size {k} exceed the enumeration limit {limit}")]
    SubsetBlowup {
        subsets: u128,
        k: usize,
        limit: u128,
    },
    #[error("the exhaustive oracle requires a GF(2) scheme")]
    NotBinaryField,
    #[error("{symbols} message+key symbols exceed the exhaustive limit {limit}")]
    TooLargeForExhaustive { symbols: usize, limit: usize },
}

/// The K edges Eve reads; ids are distinct and sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSubset {
    edges: Vec<EdgeId>,
}

impl EdgeSubset {
    pub fn new(
        edge_count: usize,
        edges: impl IntoIterator<Item = EdgeId>,
    ) -> Result<EdgeSubset, AdversaryError> {
        let mut edges: Vec<EdgeId> = edges.into_iter().collect();
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0] == w[1] {
                return Err(AdversaryError::DuplicateEdge(w[0]));
            }
        }
        if let Some(&bad) = edges.iter().find(|&&e| e >= edge_count) {
            return Err(AdversaryError::BadEdgeId(bad));
        }
        Ok(EdgeSubset { edges })
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.binary_search(&e).is_ok()
    }
}

impl std::fmt::Display for EdgeSubset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ids: Vec<String> = self.edges.iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", ids.join(","))
    }
}

/// One packet Eve sees: coded packet `packet` crossing wiretapped edge
/// `edge` in slot `slot`. A packet crossing two wiretapped edges of its
/// path produces two (redundant) observations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Observation {
    pub slot: usize,
    pub edge: EdgeId,
    pub packet: usize,
}

/// Eve's view over one period as an affine map: row r of
/// `[msg_coeffs | key_coeffs]` gives the coefficients of observation r in
/// the messages and the base keys.
#[derive(Clone, Debug)]
pub struct Transcript {
    pub observations: Vec<Observation>,
    pub msg_coeffs: Matrix,
    pub key_coeffs: Matrix,
}

/// Collects every coded packet routed through a wiretapped edge during one
/// period, in (slot, path-edge) order.
pub fn observe(scheme: &CodingScheme, subset: &EdgeSubset) -> Result<Transcript, AdversaryError> {
    let edge_count = scheme.network.edges().len();
    if let Some(&bad) = subset.edges().iter().find(|&&e| e >= edge_count) {
        return Err(AdversaryError::BadEdgeId(bad));
    }
    let mut observations = Vec::new();
    for (slot, entries) in scheme.slot_map.iter().enumerate() {
        for entry in entries {
            for &edge in &scheme.paths.paths[entry.path].edges {
                if subset.contains(edge) {
                    observations.push(Observation {
                        slot,
                        edge,
                        packet: entry.packet,
                    });
                }
            }
        }
    }
    let spec = scheme.field();
    let rows = observations.len();
    let num_messages = scheme.num_messages();
    let num_keys = scheme.num_keys();
    let mut msg_coeffs = Matrix::zero(spec, rows, num_messages);
    let mut key_coeffs = Matrix::zero(spec, rows, num_keys);
    for (r, obs) in observations.iter().enumerate() {
        if obs.packet < num_messages {
            msg_coeffs.set(r, obs.packet, Symbol(1));
        }
        for j in 0..num_keys {
            key_coeffs.set(r, j, scheme.mds.matrix.get(j, obs.packet));
        }
    }
    Ok(Transcript {
        observations,
        msg_coeffs,
        key_coeffs,
    })
}

/// Message dimensions leaked to `subset`: rank([A | B]) - rank(B). Zero
/// means perfect secrecy.
pub fn leaked_dimension(
    scheme: &CodingScheme,
    subset: &EdgeSubset,
) -> Result<usize, AdversaryError> {
    let transcript = observe(scheme, subset)?;
    let field = Field::new(scheme.field());
    let b_rank = field.rank(&transcript.key_coeffs);
    let ab = transcript
        .msg_coeffs
        .hstack(&transcript.key_coeffs)
        .expect("transcript matrices share field and rows");
    Ok(field.rank(&ab) - b_rank)
}

/// True iff the subset learns nothing: I(W; Z) = 0 for Z = A W + B X with
/// uniform keys X, tested as rank([A | B]) = rank(B).
pub fn check_perfect_secrecy(
    scheme: &CodingScheme,
    subset: &EdgeSubset,
) -> Result<bool, AdversaryError> {
    Ok(leaked_dimension(scheme, subset)? == 0)
}

/// Outcome of checking every K-subset; `witness` is the colex-first
/// insecure subset when one exists.
#[derive(Clone, Debug)]
pub struct SecrecyVerdict {
    pub secure: bool,
    pub witness: Option<EdgeSubset>,
    pub leaked_dimension: usize,
}

/// Runs the perfect-secrecy check over all K-subsets of network edges in
/// colex order, stopping at the first failure.
pub fn verify_all_subsets(
    scheme: &CodingScheme,
    k: usize,
) -> Result<SecrecyVerdict, AdversaryError> {
    let edge_count = scheme.network.edges().len();
    let subsets = binomial(edge_count, k);
    if subsets > MAX_SUBSETS {
        return Err(AdversaryError::SubsetBlowup {
            subsets,
            k,
            limit: MAX_SUBSETS,
        });
    }
    for edges in colex_subsets(edge_count, k) {
        let subset = EdgeSubset::new(edge_count, edges).expect("enumerated ids are valid");
        let leaked = leaked_dimension(scheme, &subset)?;
        if leaked > 0 {
            return Ok(SecrecyVerdict {
                secure: false,
                witness: Some(subset),
                leaked_dimension: leaked,
            });
        }
    }
    Ok(SecrecyVerdict {
        secure: true,
        witness: None,
        leaked_dimension: 0,
    })
}

/// Exact I(W; Z) in bits for a GF(2) scheme, by enumerating every
/// message/key assignment and building the joint distribution. Checks one
/// symbol position; linearity makes all positions identical. Ground truth
/// for [`check_perfect_secrecy`], tractable up to 20 total packets.
pub fn mutual_information_oracle(
    scheme: &CodingScheme,
    subset: &EdgeSubset,
) -> Result<f64, AdversaryError> {
    if scheme.field().degree() != 1 {
        return Err(AdversaryError::NotBinaryField);
    }
    let m = scheme.num_messages();
    let k = scheme.num_keys();
    if m + k > MAX_ORACLE_SYMBOLS {
        return Err(AdversaryError::TooLargeForExhaustive {
            symbols: m + k,
            limit: MAX_ORACLE_SYMBOLS,
        });
    }
    let transcript = observe(scheme, subset)?;
    let rows = transcript.observations.len();
    if rows > 63 {
        return Err(AdversaryError::TooLargeForExhaustive {
            symbols: rows,
            limit: 63,
        });
    }

    // Precompute each observation row as a bitmask over (messages, keys).
    let mut msg_masks = vec![0u32; rows];
    let mut key_masks = vec![0u32; rows];
    for r in 0..rows {
        for c in 0..m {
            if transcript.msg_coeffs.get(r, c).0 == 1 {
                msg_masks[r] |= 1 << c;
            }
        }
        for c in 0..k {
            if transcript.key_coeffs.get(r, c).0 == 1 {
                key_masks[r] |= 1 << c;
            }
        }
    }

    let mut joint: std::collections::HashMap<(u32, u64), u64> = std::collections::HashMap::new();
    let mut z_marginal: std::collections::HashMap<u64, u64> = std::collections::HashMap::new();
    for w in 0u32..(1 << m) {
        for x in 0u32..(1 << k) {
            let mut z = 0u64;
            for r in 0..rows {
                let bit = ((msg_masks[r] & w).count_ones() + (key_masks[r] & x).count_ones()) & 1;
                z |= (bit as u64) << r;
            }
            *joint.entry((w, z)).or_insert(0) += 1;
            *z_marginal.entry(z).or_insert(0) += 1;
        }
    }

    let total = (1u64 << (m + k)) as f64;
    let p_w = 1.0 / (1u64 << m) as f64;
    let mut info = 0.0;
    for (&(_, z), &count) in &joint {
        let p_wz = count as f64 / total;
        let p_z = z_marginal[&z] as f64 / total;
        info += p_wz * (p_wz / (p_w * p_z)).log2();
    }
    Ok(info)
}
