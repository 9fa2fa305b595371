//! Closed-form capacity values for unit-capacity 1-2-1 networks: the
//! unsecure capacity min(M, H_v), the achievable secure rates
//! 1 - K/H_e (one beam) and min(M, H_v)(1 - K/H_v) (multiple beams), and
//! the converse min(M, H_e)(1 - K/H_e).
//!
//! All values are exact rationals and clamp at zero once the wiretap budget
//! reaches the relevant path count. The two bounds coincide (and the report
//! is flagged exact) whenever M = 1 or H_e = H_v.

use crate::netmodel::{rat_int, Network, Rat};
use crate::paths::{max_edge_disjoint, max_vertex_disjoint};
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("edge {0} does not have unit capacity")]
    NonUnitCapacity(usize),
}

/// Which achievability construction applies to a network/budget pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeTag {
    M1Scheme,
    MGt1Scheme,
    None,
}

/// Aggregated capacity analysis of one network under a K-edge wiretapper.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapacityReport {
    pub h_e: usize,
    pub h_v: usize,
    pub unsecure: Rat,
    pub secure_lower: Rat,
    pub secure_upper: Rat,
    /// True when the lower and upper bounds coincide, i.e. the secure
    /// capacity is known exactly.
    pub exact: bool,
    pub scheme: SchemeTag,
}

fn require_unit(net: &Network) -> Result<(), BoundsError> {
    let one = rat_int(1);
    match net.edges().iter().position(|e| e.capacity != one) {
        Some(id) => Err(BoundsError::NonUnitCapacity(id)),
        None => Ok(()),
    }
}

fn clamp_zero(r: Rat) -> Rat {
    if r < Rat::zero() {
        Rat::zero()
    } else {
        r
    }
}

fn lower_from_counts(beams: usize, h_e: usize, h_v: usize, k: usize) -> Rat {
    if beams == 1 {
        if h_e == 0 {
            return Rat::zero();
        }
        clamp_zero(rat_int(1) - Rat::new(k.into(), h_e.into()))
    } else {
        if h_v == 0 {
            return Rat::zero();
        }
        let m_hat = rat_int(beams.min(h_v) as i64);
        clamp_zero(m_hat * (rat_int(1) - Rat::new(k.into(), h_v.into())))
    }
}

fn upper_from_counts(beams: usize, h_e: usize, k: usize) -> Rat {
    if h_e == 0 {
        return Rat::zero();
    }
    let m_cap = rat_int(beams.min(h_e) as i64);
    clamp_zero(m_cap * (rat_int(1) - Rat::new(k.into(), h_e.into())))
}

/// Capacity with no eavesdropper: min(M, H_v).
pub fn unsecure_capacity(net: &Network) -> Result<Rat, BoundsError> {
    require_unit(net)?;
    let h_v = max_vertex_disjoint(net).len();
    Ok(rat_int(net.beams().min(h_v) as i64))
}

/// Achievable secure rate: 1 - K/H_e for M = 1, min(M, H_v)(1 - K/H_v)
/// otherwise, clamped at zero.
pub fn secure_lower_bound(net: &Network, k: usize) -> Result<Rat, BoundsError> {
    require_unit(net)?;
    let h_e = max_edge_disjoint(net).len();
    let h_v = max_vertex_disjoint(net).len();
    Ok(lower_from_counts(net.beams(), h_e, h_v, k))
}

/// Converse: min(M, H_e)(1 - K/H_e), clamped at zero.
pub fn secure_upper_bound(net: &Network, k: usize) -> Result<Rat, BoundsError> {
    require_unit(net)?;
    let h_e = max_edge_disjoint(net).len();
    Ok(upper_from_counts(net.beams(), h_e, k))
}

/// Runs the full analysis once: path counts, all three values, exactness
/// flag and applicable scheme tag.
pub fn capacity_report(net: &Network, k: usize) -> Result<CapacityReport, BoundsError> {
    require_unit(net)?;
    let h_e = max_edge_disjoint(net).len();
    let h_v = max_vertex_disjoint(net).len();
    let beams = net.beams();
    let unsecure = rat_int(beams.min(h_v) as i64);
    let secure_lower = lower_from_counts(beams, h_e, h_v, k);
    let secure_upper = upper_from_counts(beams, h_e, k);
    let exact = secure_lower == secure_upper;
    let scheme = if h_e == 0 {
        SchemeTag::None
    } else if beams == 1 {
        if k < h_e {
            SchemeTag::M1Scheme
        } else {
            SchemeTag::None
        }
    } else if k < h_v {
        SchemeTag::MGt1Scheme
    } else {
        SchemeTag::None
    };
    Ok(CapacityReport {
        h_e,
        h_v,
        unsecure,
        secure_lower,
        secure_upper,
        exact,
        scheme,
    })
}
