//! Secure-capacity program for the non-uniform diamond (one beam, N relays
//! with per-path capacities C_i): choose time fractions f_i >= 0 summing to
//! one to maximize
//!
//! ```text
//!   sum_i f_i C_i  -  max_{|S|=K} sum_{i in S} f_i C_i ,
//! ```
//!
//! i.e. total throughput minus whatever the K worst-placed wiretaps soak
//! up. The program is solved exactly as a rational LP (epigraph variable t
//! for the inner max, one constraint per K-subset, simplex with Bland's
//! rule), with a deterministic lexicographic tie-break among optimal
//! allocations. A prefix-equalization heuristic reproduces the optimum on
//! every instance seen so far but the LP remains the contract.
//!
//! [`diamond_schedule`] turns an allocation into a concrete coding scheme:
//! the period is the smallest horizon making every slot count and packet
//! count integral, the heaviest K paths' budget carries the pure-key
//! packets, and the result is re-verified against every K-subset.

use crate::adversary::verify_all_subsets;
use crate::coding::{build_mds, CodingError, CodingScheme, SchemeMode, SlotEntry};
use crate::field::Field;
use crate::netmodel::{diamond_network, rat_int, NetError, Rat};
use crate::paths::{Disjointness, Path, PathSet};
use crate::subsets::{binomial, colex_subsets};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Refuse LPs with more subset constraints than this.
pub const MAX_SUBSET_CONSTRAINTS: u128 = 100_000;

/// Refuse schedules longer than this many slots.
pub const MAX_PERIOD: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiamondError {
    #[error("need at least one relay capacity")]
    EmptyCaps,
    #[error("capacity {0} is negative")]
    NegativeCapacity(usize),
    #[error("wiretap budget {k} exceeds the {relays} relay paths")]
    KTooLarge { k: usize, relays: usize },
    #[error("{subsets} subset constraints exceed the limit {limit}")]
    Blowup { subsets: u128, limit: u128 },
    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),
    #[error("schedule period {period} exceeds the limit {limit}")]
    PeriodTooLarge { period: u128, limit: u128 },
    #[error("constructed schedule failed secrecy verification (witness {witness})")]
    SecrecyFailure { witness: String },
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// Time split over the relay paths and the secure rate it achieves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Allocation {
    pub fractions: Vec<Rat>,
    pub value: Rat,
}

/// The exact objective at a feasible point: total carried packets minus the
/// heaviest K-subset load, per network use.
pub fn objective(caps: &[Rat], fractions: &[Rat], k: usize) -> Rat {
    assert_eq!(caps.len(), fractions.len());
    let mut loads: Vec<Rat> = caps
        .iter()
        .zip(fractions)
        .map(|(c, f)| c.clone() * f.clone())
        .collect();
    let total: Rat = loads.iter().cloned().sum();
    loads.sort_by(|a, b| b.cmp(a));
    let eavesdropped: Rat = loads.into_iter().take(k).sum();
    total - eavesdropped
}

// ---------------------------------------------------------------------------
// Exact rational LP
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct LpConstraint {
    pub coeffs: Vec<Rat>,
    pub relation: Relation,
    pub rhs: Rat,
}

/// Maximize `objective . x` subject to the constraints and `x >= 0`.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub objective: Vec<Rat>,
    pub constraints: Vec<LpConstraint>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rat>, value: Rat },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rat>>, // m rows of n_total coefficients
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    n_total: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v /= inv.clone();
        }
        self.rhs[row] /= inv;
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let factor = self.rows[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for c in 0..self.n_total {
                let delta = factor.clone() * self.rows[row][c].clone();
                self.rows[r][c] -= delta;
            }
            let delta = factor * self.rhs[row].clone();
            self.rhs[r] -= delta;
        }
        self.basis[row] = col;
    }

    /// Reduced profit c_j - z_j for every column under cost vector `costs`.
    fn reduced(&self, costs: &[Rat]) -> Vec<Rat> {
        let mut out = costs.to_vec();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = costs[b].clone();
            if cb.is_zero() {
                continue;
            }
            for c in 0..self.n_total {
                let delta = cb.clone() * self.rows[r][c].clone();
                out[c] -= delta;
            }
        }
        out
    }

    /// Bland's rule simplex loop: entering column is the lowest-index one
    /// with positive reduced profit, leaving row has the lowest-index basic
    /// variable among minimum ratios. Returns false on unboundedness.
    fn optimize(&mut self, costs: &[Rat], banned: &[bool]) -> bool {
        loop {
            let reduced = self.reduced(costs);
            let entering = (0..self.n_total).find(|&j| !banned[j] && reduced[j] > Rat::zero());
            let Some(col) = entering else { return true };
            let mut leaving: Option<(usize, Rat)> = None;
            for r in 0..self.rows.len() {
                if self.rows[r][col] <= Rat::zero() {
                    continue;
                }
                let ratio = self.rhs[r].clone() / self.rows[r][col].clone();
                match &leaving {
                    None => leaving = Some((r, ratio)),
                    Some((best_r, best)) => {
                        if ratio < *best || (ratio == *best && self.basis[r] < self.basis[*best_r])
                        {
                            leaving = Some((r, ratio));
                        }
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return false;
            };
            self.pivot(row, col);
        }
    }
}

/// Exact two-phase primal simplex over rationals with Bland's anti-cycling
/// rule; decision variables are implicitly nonnegative.
pub fn solve_lp_exact(problem: &LpProblem) -> LpOutcome {
    let n_struct = problem.objective.len();
    for c in &problem.constraints {
        assert_eq!(c.coeffs.len(), n_struct, "constraint arity mismatch");
    }

    // Normalize to nonnegative right-hand sides.
    let mut rows_in: Vec<(Vec<Rat>, Relation, Rat)> = problem
        .constraints
        .iter()
        .map(|c| (c.coeffs.clone(), c.relation, c.rhs.clone()))
        .collect();
    for (coeffs, rel, rhs) in rows_in.iter_mut() {
        if rhs.is_negative() {
            for v in coeffs.iter_mut() {
                *v = -v.clone();
            }
            *rhs = -rhs.clone();
            *rel = match *rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let n_slack = rows_in
        .iter()
        .filter(|(_, rel, _)| matches!(rel, Relation::Le | Relation::Ge))
        .count();
    let n_art = rows_in
        .iter()
        .filter(|(_, rel, _)| matches!(rel, Relation::Ge | Relation::Eq))
        .count();
    let n_total = n_struct + n_slack + n_art;
    let artificial_start = n_struct + n_slack;

    let mut rows = Vec::with_capacity(rows_in.len());
    let mut rhs = Vec::with_capacity(rows_in.len());
    let mut basis = Vec::with_capacity(rows_in.len());
    let mut next_slack = n_struct;
    let mut next_art = artificial_start;
    for (coeffs, rel, b) in rows_in {
        let mut row = vec![Rat::zero(); n_total];
        row[..n_struct].clone_from_slice(&coeffs);
        match rel {
            Relation::Le => {
                row[next_slack] = Rat::one();
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -Rat::one();
                next_slack += 1;
                row[next_art] = Rat::one();
                basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = Rat::one();
                basis.push(next_art);
                next_art += 1;
            }
        }
        rows.push(row);
        rhs.push(b);
    }

    let mut tableau = Tableau {
        rows,
        rhs,
        basis,
        n_total,
    };
    let no_ban = vec![false; n_total];

    // Phase 1: drive the artificial variables to zero.
    if n_art > 0 {
        let mut phase1 = vec![Rat::zero(); n_total];
        for c in artificial_start..n_total {
            phase1[c] = -Rat::one();
        }
        let bounded = tableau.optimize(&phase1, &no_ban);
        assert!(bounded, "phase-1 objective is bounded by construction");
        let infeasibility: Rat = tableau
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= artificial_start)
            .map(|(r, _)| tableau.rhs[r].clone())
            .sum();
        if !infeasibility.is_zero() {
            return LpOutcome::Infeasible;
        }
        // Pivot lingering zero-valued artificials out of the basis.
        let mut r = 0;
        while r < tableau.rows.len() {
            if tableau.basis[r] >= artificial_start {
                let col = (0..artificial_start).find(|&c| !tableau.rows[r][c].is_zero());
                match col {
                    Some(c) => tableau.pivot(r, c),
                    None => {
                        // Redundant row.
                        tableau.rows.remove(r);
                        tableau.rhs.remove(r);
                        tableau.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    // Phase 2: the real objective, artificial columns locked out.
    let mut costs = vec![Rat::zero(); n_total];
    costs[..n_struct].clone_from_slice(&problem.objective);
    let mut banned = vec![false; n_total];
    for b in banned.iter_mut().skip(artificial_start) {
        *b = true;
    }
    if !tableau.optimize(&costs, &banned) {
        return LpOutcome::Unbounded;
    }

    let mut x = vec![Rat::zero(); n_struct];
    for (r, &b) in tableau.basis.iter().enumerate() {
        if b < n_struct {
            x[b] = tableau.rhs[r].clone();
        }
    }
    let value: Rat = problem
        .objective
        .iter()
        .zip(&x)
        .map(|(c, v)| c.clone() * v.clone())
        .sum();
    LpOutcome::Optimal { x, value }
}

// ---------------------------------------------------------------------------
// The capacity program
// ---------------------------------------------------------------------------

fn validate_caps(caps: &[Rat]) -> Result<(), DiamondError> {
    if caps.is_empty() {
        return Err(DiamondError::EmptyCaps);
    }
    if let Some(i) = caps.iter().position(|c| c.is_negative()) {
        return Err(DiamondError::NegativeCapacity(i));
    }
    Ok(())
}

/// Variables f_0..f_{N-1} plus the epigraph variable t at index N:
/// maximize sum C_i f_i - t subject to sum f_i = 1 and, for every
/// K-subset S, sum_{i in S} C_i f_i <= t.
pub fn eq_capacity_problem(caps: &[Rat], k: usize) -> LpProblem {
    let n = caps.len();
    let mut objective: Vec<Rat> = caps.to_vec();
    objective.push(-Rat::one());

    let mut constraints = Vec::new();
    let mut ones = vec![Rat::one(); n];
    ones.push(Rat::zero());
    constraints.push(LpConstraint {
        coeffs: ones,
        relation: Relation::Eq,
        rhs: Rat::one(),
    });
    for subset in colex_subsets(n, k) {
        let mut coeffs = vec![Rat::zero(); n + 1];
        for i in subset {
            coeffs[i] = caps[i].clone();
        }
        coeffs[n] = -Rat::one();
        constraints.push(LpConstraint {
            coeffs,
            relation: Relation::Le,
            rhs: Rat::zero(),
        });
    }
    LpProblem {
        objective,
        constraints,
    }
}

fn expect_optimal(outcome: LpOutcome) -> (Vec<Rat>, Rat) {
    match outcome {
        LpOutcome::Optimal { x, value } => (x, value),
        other => panic!("capacity LP must have an optimum, got {other:?}"),
    }
}

/// Exact optimum of the diamond secure-capacity program. Ties among optimal
/// allocations are broken by lexicographically maximizing the fractions of
/// the highest-capacity paths first, so the output is deterministic.
pub fn diamond_capacity(caps: &[Rat], k: usize) -> Result<Allocation, DiamondError> {
    validate_caps(caps)?;
    let n = caps.len();
    if k > n {
        return Err(DiamondError::KTooLarge { k, relays: n });
    }
    let subsets = binomial(n, k);
    if subsets > MAX_SUBSET_CONSTRAINTS {
        return Err(DiamondError::Blowup {
            subsets,
            limit: MAX_SUBSET_CONSTRAINTS,
        });
    }

    let base = eq_capacity_problem(caps, k);
    let (_, value) = expect_optimal(solve_lp_exact(&base));

    // Lexicographic refinement at fixed optimal value.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| caps[b].cmp(&caps[a]).then(a.cmp(&b)));
    let mut refined = base;
    let mut value_row = refined.objective.clone();
    refined.constraints.push(LpConstraint {
        coeffs: std::mem::take(&mut value_row),
        relation: Relation::Ge,
        rhs: value.clone(),
    });
    let mut fractions = vec![Rat::zero(); n];
    for &j in &order {
        let mut target = vec![Rat::zero(); n + 1];
        target[j] = Rat::one();
        let problem = LpProblem {
            objective: target,
            constraints: refined.constraints.clone(),
        };
        let (_, best_j) = expect_optimal(solve_lp_exact(&problem));
        let mut fix = vec![Rat::zero(); n + 1];
        fix[j] = Rat::one();
        refined.constraints.push(LpConstraint {
            coeffs: fix,
            relation: Relation::Eq,
            rhs: best_j.clone(),
        });
        fractions[j] = best_j;
    }

    let recomputed = objective(caps, &fractions, k);
    debug_assert_eq!(recomputed, value, "tie-break must preserve the optimum");
    Ok(Allocation {
        fractions,
        value: recomputed,
    })
}

/// Objective value of the uniform split f_i = 1/N.
pub fn equal_split_rate(caps: &[Rat], k: usize) -> Result<Rat, DiamondError> {
    validate_caps(caps)?;
    let n = caps.len() as i64;
    let uniform = vec![Rat::new(1.into(), n.into()); caps.len()];
    Ok(objective(caps, &uniform, k))
}

/// Candidate-support search: equalize the per-path load f_i C_i = g over
/// the m highest-capacity paths for each m > K (so g = 1 / sum of the
/// prefix's inverse capacities, rate (m - K) g) and keep the best. Matches
/// the LP optimum on every instance tested; the LP stays authoritative.
pub fn equalization_heuristic(caps: &[Rat], k: usize) -> Result<Allocation, DiamondError> {
    validate_caps(caps)?;
    let n = caps.len();
    if k >= n {
        return Err(DiamondError::KTooLarge { k, relays: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| caps[b].cmp(&caps[a]).then(a.cmp(&b)));

    let mut best: Option<(Rat, Vec<Rat>)> = None;
    let mut inv_sum = Rat::zero();
    for m in 1..=n {
        let idx = order[m - 1];
        if caps[idx].is_zero() {
            break; // zero-capacity paths cannot carry an equal share
        }
        inv_sum += caps[idx].recip();
        if m <= k {
            continue;
        }
        let g = inv_sum.clone().recip();
        let rate = rat_int((m - k) as i64) * g.clone();
        let better = match &best {
            None => true,
            Some((cur, _)) => rate > *cur,
        };
        if better {
            let mut fractions = vec![Rat::zero(); n];
            for &i in order.iter().take(m) {
                fractions[i] = g.clone() / caps[i].clone();
            }
            best = Some((rate, fractions));
        }
    }
    let (_, fractions) = best.unwrap_or_else(|| {
        // All usable prefixes were wiretapped away; any split rates zero.
        let mut fractions = vec![Rat::zero(); n];
        fractions[0] = Rat::one();
        (Rat::zero(), fractions)
    });
    let value = objective(caps, &fractions, k);
    Ok(Allocation { fractions, value })
}

// ---------------------------------------------------------------------------
// Schedule synthesis
// ---------------------------------------------------------------------------

fn rat_floor_usize(r: &Rat) -> usize {
    use num_traits::ToPrimitive;
    r.floor()
        .to_integer()
        .to_usize()
        .expect("schedule quantities fit usize")
}

/// Integral realization of an allocation: the slot and packet budget per
/// path over one period, before any field material is drawn.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchedulePlan {
    pub period: usize,
    pub slots_per_path: Vec<usize>,
    pub loads: Vec<usize>,
    pub num_keys: usize,
    pub num_coded: usize,
}

impl SchedulePlan {
    pub fn num_messages(&self) -> usize {
        self.num_coded - self.num_keys
    }
}

/// Quantizes an allocation: period n = least horizon making every n f_i
/// and n f_i C_i integral, path i active in n f_i slots carrying n f_i C_i
/// packets, key budget = the K heaviest path loads.
pub fn plan_schedule(
    caps: &[Rat],
    k: usize,
    alloc: &Allocation,
) -> Result<SchedulePlan, DiamondError> {
    validate_caps(caps)?;
    let n = caps.len();
    if k > n {
        return Err(DiamondError::KTooLarge { k, relays: n });
    }
    if alloc.fractions.len() != n {
        return Err(DiamondError::InvalidAllocation(format!(
            "{} fractions for {} paths",
            alloc.fractions.len(),
            n
        )));
    }
    if alloc.fractions.iter().any(|f| f.is_negative()) {
        return Err(DiamondError::InvalidAllocation("negative fraction".into()));
    }
    let total: Rat = alloc.fractions.iter().cloned().sum();
    if !total.is_one() {
        return Err(DiamondError::InvalidAllocation(
            "fractions must sum to 1".into(),
        ));
    }
    let recomputed = objective(caps, &alloc.fractions, k);
    if recomputed != alloc.value {
        return Err(DiamondError::InvalidAllocation(format!(
            "stated value {} differs from recomputed {}",
            alloc.value, recomputed
        )));
    }

    // Period: lcm of the denominators of every f_i and f_i C_i.
    let mut period_int = num_bigint::BigInt::one();
    for (f, c) in alloc.fractions.iter().zip(caps) {
        period_int = period_int.lcm(f.denom());
        period_int = period_int.lcm((f.clone() * c.clone()).denom());
    }
    use num_traits::ToPrimitive;
    let period_u128 = period_int.to_u128().unwrap_or(u128::MAX);
    if period_u128 > MAX_PERIOD {
        return Err(DiamondError::PeriodTooLarge {
            period: period_u128,
            limit: MAX_PERIOD,
        });
    }
    let period = period_u128 as usize;
    let period_rat = Rat::from_integer(period_int);

    let slots_per_path: Vec<usize> = alloc
        .fractions
        .iter()
        .map(|f| rat_floor_usize(&(f.clone() * period_rat.clone())))
        .collect();
    let loads: Vec<usize> = alloc
        .fractions
        .iter()
        .zip(caps)
        .map(|(f, c)| rat_floor_usize(&(f.clone() * c.clone() * period_rat.clone())))
        .collect();
    let num_coded: usize = loads.iter().sum();
    // Keys cover the worst K-subset, which for per-path loads is just the
    // K largest loads.
    let mut by_load: Vec<usize> = (0..n).collect();
    by_load.sort_by(|&a, &b| loads[b].cmp(&loads[a]).then(a.cmp(&b)));
    let num_keys: usize = by_load.iter().take(k).map(|&i| loads[i]).sum();
    Ok(SchedulePlan {
        period,
        slots_per_path,
        loads,
        num_keys,
        num_coded,
    })
}

/// Realizes an allocation as a coding scheme on the diamond network per
/// [`plan_schedule`], with the pure-key packets assigned to the K
/// most-loaded paths' budget. The result is verified secure against every
/// K-subset before it is returned.
pub fn diamond_schedule(
    caps: &[Rat],
    k: usize,
    alloc: &Allocation,
    field: &Field,
    packet_len: usize,
) -> Result<CodingScheme, DiamondError> {
    let plan = plan_schedule(caps, k, alloc)?;
    let n = caps.len();
    let period = plan.period;
    let slots_per_path = &plan.slots_per_path;
    let loads = &plan.loads;
    let num_coded = plan.num_coded;
    let num_keys = plan.num_keys;
    let num_messages = plan.num_messages();
    let mut by_load: Vec<usize> = (0..n).collect();
    by_load.sort_by(|&a, &b| loads[b].cmp(&loads[a]).then(a.cmp(&b)));
    let key_paths: std::collections::BTreeSet<usize> = by_load.iter().take(k).copied().collect();

    let network = diamond_network(caps)?;
    let mut path_objs = Vec::with_capacity(n);
    for i in 0..n {
        path_objs.push(Path::new(&network, vec![i, n + i]).expect("diamond path"));
    }
    let paths = PathSet::new(&network, path_objs, Disjointness::VertexDisjoint)
        .expect("diamond paths are vertex-disjoint");

    // Path-major slots; per-slot packet counts follow the cumulative
    // capacity quota floor(j C_i) - floor((j-1) C_i). Slots where the
    // quota stalls (fractional capacities) hold the beam idle.
    let mut slot_map: Vec<Vec<SlotEntry>> = Vec::with_capacity(period);
    let mut idle_paths: Vec<Vec<usize>> = Vec::with_capacity(period);
    let mut msg_counter = 0usize;
    let mut key_counter = num_messages;
    for i in 0..n {
        let mut delivered = 0usize;
        for j in 1..=slots_per_path[i] {
            let quota = rat_floor_usize(&(caps[i].clone() * rat_int(j as i64)));
            let count = quota - delivered;
            delivered = quota;
            let mut entries = Vec::with_capacity(count);
            for _ in 0..count {
                let packet = if key_paths.contains(&i) {
                    let p = key_counter;
                    key_counter += 1;
                    p
                } else {
                    let p = msg_counter;
                    msg_counter += 1;
                    p
                };
                entries.push(SlotEntry { path: i, packet });
            }
            idle_paths.push(if entries.is_empty() {
                vec![i]
            } else {
                Vec::new()
            });
            slot_map.push(entries);
        }
        debug_assert_eq!(delivered, loads[i]);
    }
    debug_assert_eq!(msg_counter, num_messages);
    debug_assert_eq!(key_counter, num_coded);

    let mds = build_mds(num_keys, num_coded, field)?;
    let scheme = CodingScheme::new(
        network,
        paths,
        mds,
        slot_map,
        idle_paths,
        packet_len,
        SchemeMode::DiamondNonUniform,
    )?;

    let verdict = verify_all_subsets(&scheme, k)
        .map_err(|e| DiamondError::InvalidAllocation(e.to_string()))?;
    if !verdict.secure {
        return Err(DiamondError::SecrecyFailure {
            witness: verdict.witness.map(|w| w.to_string()).unwrap_or_default(),
        });
    }
    Ok(scheme)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::rat;
    use crate::rng::SplitMix64;

    fn caps_3221() -> Vec<Rat> {
        vec![rat_int(3), rat_int(2), rat_int(2), rat_int(1)]
    }

    #[test]
    fn lp_single_variable() {
        let p = LpProblem {
            objective: vec![Rat::one()],
            constraints: vec![LpConstraint {
                coeffs: vec![Rat::one()],
                relation: Relation::Le,
                rhs: Rat::one(),
            }],
        };
        assert_eq!(
            solve_lp_exact(&p),
            LpOutcome::Optimal {
                x: vec![Rat::one()],
                value: Rat::one()
            }
        );
    }

    #[test]
    fn lp_infeasible_and_unbounded() {
        let infeasible = LpProblem {
            objective: vec![Rat::one()],
            constraints: vec![
                LpConstraint {
                    coeffs: vec![Rat::one()],
                    relation: Relation::Le,
                    rhs: Rat::one(),
                },
                LpConstraint {
                    coeffs: vec![Rat::one()],
                    relation: Relation::Ge,
                    rhs: rat_int(2),
                },
            ],
        };
        assert_eq!(solve_lp_exact(&infeasible), LpOutcome::Infeasible);

        let unbounded = LpProblem {
            objective: vec![Rat::one()],
            constraints: vec![LpConstraint {
                coeffs: vec![Rat::one()],
                relation: Relation::Ge,
                rhs: Rat::zero(),
            }],
        };
        assert_eq!(solve_lp_exact(&unbounded), LpOutcome::Unbounded);
    }

    #[test]
    fn lp_two_variable_vertex() {
        // max x + y, x + 2y <= 4, 3x + y <= 6 -> optimum (8/5, 6/5), 14/5.
        let p = LpProblem {
            objective: vec![Rat::one(), Rat::one()],
            constraints: vec![
                LpConstraint {
                    coeffs: vec![Rat::one(), rat_int(2)],
                    relation: Relation::Le,
                    rhs: rat_int(4),
                },
                LpConstraint {
                    coeffs: vec![rat_int(3), Rat::one()],
                    relation: Relation::Le,
                    rhs: rat_int(6),
                },
            ],
        };
        match solve_lp_exact(&p) {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, rat(14, 5));
                assert_eq!(x, vec![rat(8, 5), rat(6, 5)]);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn lp_negative_rhs_normalization() {
        // max x s.t. -x <= -2, x <= 5 (i.e. x >= 2) -> 5.
        let p = LpProblem {
            objective: vec![Rat::one()],
            constraints: vec![
                LpConstraint {
                    coeffs: vec![-Rat::one()],
                    relation: Relation::Le,
                    rhs: rat_int(-2),
                },
                LpConstraint {
                    coeffs: vec![Rat::one()],
                    relation: Relation::Le,
                    rhs: rat_int(5),
                },
            ],
        };
        match solve_lp_exact(&p) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat_int(5)),
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn capacity_lp_reference_instance() {
        let p = eq_capacity_problem(&caps_3221(), 1);
        match solve_lp_exact(&p) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat(3, 2)),
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn reference_capacity_and_tie_break() {
        let alloc = diamond_capacity(&caps_3221(), 1).unwrap();
        assert_eq!(alloc.value, rat(3, 2));
        assert_eq!(
            alloc.fractions,
            vec![rat(1, 4), rat(3, 8), rat(3, 8), rat_int(0)]
        );
    }

    #[test]
    fn uniform_caps_closed_form() {
        for n in 1..7usize {
            for k in 0..=n {
                for c in [rat_int(1), rat(3, 2), rat_int(4)] {
                    let caps = vec![c.clone(); n];
                    let alloc = diamond_capacity(&caps, k).unwrap();
                    let expected = c * rat_int((n - k) as i64) / rat_int(n as i64);
                    assert_eq!(alloc.value, expected, "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn no_eavesdropper_concentrates_on_best_path() {
        let alloc = diamond_capacity(&[rat_int(2), rat_int(5), rat_int(3)], 0).unwrap();
        assert_eq!(alloc.value, rat_int(5));
        assert_eq!(alloc.fractions, vec![rat_int(0), rat_int(1), rat_int(0)]);
    }

    #[test]
    fn full_wiretap_gives_zero() {
        let alloc = diamond_capacity(&[rat_int(2)], 1).unwrap();
        assert_eq!(alloc.value, rat_int(0));
        assert!(diamond_capacity(&[rat_int(2)], 2).is_err());
    }

    #[test]
    fn guard_rails() {
        assert!(matches!(
            diamond_capacity(&[], 0),
            Err(DiamondError::EmptyCaps)
        ));
        assert!(matches!(
            diamond_capacity(&[rat_int(-1)], 0),
            Err(DiamondError::NegativeCapacity(0))
        ));
        let many = vec![rat_int(1); 25];
        assert!(matches!(
            diamond_capacity(&many, 12),
            Err(DiamondError::Blowup { .. })
        ));
    }

    #[test]
    fn equal_split_values() {
        assert_eq!(equal_split_rate(&caps_3221(), 1).unwrap(), rat(5, 4));
        assert_eq!(
            equal_split_rate(&[rat_int(1), rat_int(1)], 1).unwrap(),
            rat(1, 2)
        );
        // Symmetric caps: uniform split is optimal.
        let caps = vec![rat(5, 3); 4];
        assert_eq!(
            equal_split_rate(&caps, 2).unwrap(),
            diamond_capacity(&caps, 2).unwrap().value
        );
    }

    #[test]
    fn heuristic_reference_instance() {
        let alloc = equalization_heuristic(&caps_3221(), 1).unwrap();
        // Prefix of the three fat paths, equalized load g = 3/4.
        assert_eq!(alloc.value, rat(3, 2));
        assert_eq!(
            alloc.fractions,
            vec![rat(1, 4), rat(3, 8), rat(3, 8), rat_int(0)]
        );
    }

    #[test]
    fn heuristic_equal_caps_full_support() {
        let caps = vec![rat_int(2); 5];
        let alloc = equalization_heuristic(&caps, 2).unwrap();
        assert!(alloc.fractions.iter().all(|f| *f == rat(1, 5)));
        assert_eq!(alloc.value, diamond_capacity(&caps, 2).unwrap().value);
    }

    #[test]
    fn heuristic_matches_lp_on_random_instances() {
        let mut rng = SplitMix64::new(2024);
        for _ in 0..120 {
            let n = 2 + rng.below(5) as usize;
            let caps: Vec<Rat> = (0..n)
                .map(|_| rat(1 + rng.below(12) as i64, 1 + rng.below(4) as i64))
                .collect();
            let k = rng.below(n as u64) as usize;
            let lp = expect_optimal(solve_lp_exact(&eq_capacity_problem(&caps, k))).1;
            let heuristic = equalization_heuristic(&caps, k).unwrap();
            assert_eq!(heuristic.value, lp, "caps {caps:?} k={k}");
        }
    }

    #[test]
    fn lp_dominates_random_feasible_points() {
        let mut rng = SplitMix64::new(4048);
        for (caps, k) in [
            (caps_3221(), 1usize),
            (vec![rat(7, 3), rat_int(1), rat(5, 2)], 2),
            (
                vec![rat_int(4), rat_int(4), rat_int(1), rat_int(1), rat_int(2)],
                1,
            ),
        ] {
            let best = diamond_capacity(&caps, k).unwrap().value;
            for _ in 0..10_000 {
                // Exactly feasible rational point: positive integers
                // normalized by their sum.
                let raw: Vec<i64> = caps.iter().map(|_| 1 + rng.below(64) as i64).collect();
                let total: i64 = raw.iter().sum();
                let f: Vec<Rat> = raw.iter().map(|&x| rat(x, total)).collect();
                let value = objective(&caps, &f, k);
                assert!(value <= best, "feasible point beats the optimum: {f:?}");
            }
        }
    }

    #[test]
    fn schedule_reference_instance() {
        let caps = caps_3221();
        let alloc = diamond_capacity(&caps, 1).unwrap();
        let field = Field::standard(8).unwrap();
        let scheme = diamond_schedule(&caps, 1, &alloc, &field, 4).unwrap();
        assert_eq!(scheme.period(), 8);
        assert_eq!(scheme.num_coded(), 18);
        assert_eq!(scheme.num_keys(), 6);
        assert_eq!(scheme.num_messages(), 12);
        assert_eq!(scheme.rate(), rat(3, 2));
        assert_eq!(scheme.rate(), alloc.value);
        // Slots per path: 2, 3, 3, 0.
        let mut per_path = vec![0usize; 4];
        for entries in &scheme.slot_map {
            if let Some(first) = entries.first() {
                per_path[first.path] += 1;
            }
        }
        assert_eq!(per_path, vec![2, 3, 3, 0]);
    }

    #[test]
    fn schedule_unit_caps_reduces_to_cyclic_routing() {
        let caps = vec![rat_int(1); 4];
        let alloc = diamond_capacity(&caps, 1).unwrap();
        let field = Field::standard(8).unwrap();
        let scheme = diamond_schedule(&caps, 1, &alloc, &field, 1).unwrap();
        assert_eq!(scheme.period(), 4);
        assert_eq!(scheme.num_keys(), 1);
        assert_eq!(scheme.num_messages(), 3);
        assert_eq!(scheme.rate(), rat(3, 4));
    }

    #[test]
    fn schedule_no_eavesdropper_routes_best_path() {
        let caps = vec![rat_int(2), rat_int(5)];
        let alloc = diamond_capacity(&caps, 0).unwrap();
        let field = Field::standard(8).unwrap();
        let scheme = diamond_schedule(&caps, 0, &alloc, &field, 1).unwrap();
        assert_eq!(scheme.period(), 1);
        assert_eq!(scheme.num_keys(), 0);
        assert_eq!(scheme.num_messages(), 5);
        assert_eq!(scheme.rate(), rat_int(5));
    }

    #[test]
    fn schedule_rejects_bogus_allocations() {
        let caps = caps_3221();
        let field = Field::standard(8).unwrap();
        let bad = Allocation {
            fractions: vec![rat(1, 2); 4],
            value: rat_int(1),
        };
        assert!(matches!(
            diamond_schedule(&caps, 1, &bad, &field, 1),
            Err(DiamondError::InvalidAllocation(_))
        ));
        let wrong_value = Allocation {
            fractions: vec![rat(1, 4), rat(3, 8), rat(3, 8), rat_int(0)],
            value: rat_int(9),
        };
        assert!(matches!(
            diamond_schedule(&caps, 1, &wrong_value, &field, 1),
            Err(DiamondError::InvalidAllocation(_))
        ));
    }

    #[test]
    fn fractional_caps_idle_uses_serialize_as_dashes() {
        let caps = vec![rat(1, 2), rat(1, 2)];
        let alloc = diamond_capacity(&caps, 1).unwrap();
        let field = Field::standard(8).unwrap();
        let scheme = diamond_schedule(&caps, 1, &alloc, &field, 1).unwrap();
        let mut rng = SplitMix64::new(12);
        let messages = crate::coding::random_messages(&scheme, &mut rng);
        let (schedule, _) = crate::coding::encode(&scheme, &messages, 3).unwrap();
        let dump = schedule.serialize();
        assert!(
            dump.lines().any(|l| l.ends_with("payload -")),
            "no idle lines in:\n{dump}"
        );
        for line in dump.lines() {
            assert_eq!(line.split_whitespace().count(), 6, "malformed line {line}");
        }
    }

    #[test]
    fn fractional_caps_schedule_is_valid() {
        let caps = vec![rat(3, 2), rat(1, 2)];
        let alloc = diamond_capacity(&caps, 1).unwrap();
        let field = Field::standard(8).unwrap();
        let scheme = diamond_schedule(&caps, 1, &alloc, &field, 2).unwrap();
        assert_eq!(scheme.rate(), alloc.value);
        // Round-trips through encode/decode like any other scheme.
        let mut rng = SplitMix64::new(8);
        let messages = crate::coding::random_messages(&scheme, &mut rng);
        let (schedule, _) = crate::coding::encode(&scheme, &messages, 17).unwrap();
        schedule.validate(&scheme.network).unwrap();
        assert_eq!(crate::coding::decode(&scheme, &schedule).unwrap(), messages);
    }
}
