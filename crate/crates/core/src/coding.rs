//! MDS-key achievability schemes and their 1-2-1 schedules.
//!
//! All schemes share one shape: draw k random key packets, expand them with
//! a k x n MDS matrix into n coded packets X_1..X_n, add message packets to
//! the first n - k of them,
//!
//! ```text
//!   T_i = W_i + X_i   for i <= n - k,
//!   T_i = X_i         otherwise,
//! ```
//!
//! and ship each T_i along one path in one slot. Any eavesdropper seeing at
//! most k of the T_i observes combinations masked by linearly independent
//! key mixes, while the receiver cancels the keys from the k pure-key
//! packets and recovers the messages.
//!
//! Three builders instantiate the shape:
//! - [`scheme_m1`]: one beam, cycles the H_e edge-disjoint paths, one path
//!   per slot, k = K.
//! - [`scheme_mgt1`]: M beams, activates a different min(M, H_v)-subset of
//!   the vertex-disjoint paths per slot, enumerated in colex order.
//! - the diamond module builds non-uniform schedules on top of the same
//!   machinery.
//!
//! A packet is `packet_len` field symbols; each symbol position rides the
//! same linear map, so secrecy and decodability are position-independent.

use crate::field::{
    Field, FieldError, FieldSpec, Matrix, Symbol, SUPPORTED_DEGREES, VERIFY_BUDGET,
};
use crate::netmodel::{rat_int, validate_link_state, EdgeId, LinkState, Network, Rat};
use crate::paths::{max_edge_disjoint, max_vertex_disjoint, PathSet};
use crate::rng::SplitMix64;
use crate::subsets::{binomial, colex_subsets, random_subset};
use std::collections::BTreeMap;
use thiserror::Error;

/// Refuse subset-enumeration schedules beyond this many slots.
pub const MAX_SCHEME_SLOTS: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodingError {
    #[error("edge {0} does not have unit capacity")]
    NonUnitCapacity(EdgeId),
    #[error("scheme requires beams = {expected}, network has {found}")]
    BeamMismatch { expected: usize, found: usize },
    #[error("wiretap budget {k} must be below the path count {limit} (zero-rate scheme refused)")]
    KTooLarge { k: usize, limit: usize },
    #[error("field of order {order} too small: need at least {needed} elements")]
    FieldTooSmall { order: u32, needed: usize },
    #[error("schedule would need {subsets} subset slots (limit {limit})")]
    CombinatorialBlowup { subsets: u128, limit: u128 },
    #[error("invalid MDS shape: {k} rows by {n} columns")]
    BadMdsShape { k: usize, n: usize },
    #[error("expected {expected} message packets, got {got}")]
    WrongMessageCount { expected: usize, got: usize },
    #[error("expected packets of {expected} symbols, got {got}")]
    WrongPacketLen { expected: usize, got: usize },
    #[error("incomplete transcript: {0}")]
    IncompleteTranscript(String),
    #[error("key recovery system is inconsistent (corrupted transcript)")]
    InconsistentSystem,
    #[error("schedule does not match the scheme: {0}")]
    ScheduleMismatch(String),
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn require_unit(net: &Network) -> Result<(), CodingError> {
    let one = rat_int(1);
    match net.edges().iter().position(|e| e.capacity != one) {
        Some(id) => Err(CodingError::NonUnitCapacity(id)),
        None => Ok(()),
    }
}

/// k x n matrix in which every k columns are linearly independent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MdsMatrix {
    pub matrix: Matrix,
}

impl MdsMatrix {
    /// Key-packet count (rows).
    pub fn k(&self) -> usize {
        self.matrix.rows()
    }

    /// Coded-packet count (columns).
    pub fn n(&self) -> usize {
        self.matrix.cols()
    }

    /// Wraps a matrix without checking the MDS property. Meant for
    /// adversarial or degenerate constructions (e.g. deliberately broken
    /// key material in secrecy tests).
    pub fn unchecked(matrix: Matrix) -> MdsMatrix {
        MdsMatrix { matrix }
    }

    /// Checks that every k columns are linearly independent, spending at
    /// most `budget` field multiplications: exhaustively over all column
    /// subsets when that fits, by seeded random sampling when it does not,
    /// and by the Vandermonde structure (distinct nonzero evaluation
    /// points, rows equal to their powers) when even single rank
    /// computations blow the budget.
    pub fn verify(&self, field: &Field, budget: usize) -> bool {
        let k = self.k();
        let n = self.n();
        if k == 0 {
            return true;
        }
        if k > n {
            return false;
        }
        let per_check = k.saturating_mul(k).saturating_mul(k).max(1);
        let affordable = (budget / per_check) as u128;
        let total = binomial(n, k);
        if total <= 10_000 && total <= affordable {
            return colex_subsets(n, k).all(|cols| self.columns_independent(field, &cols));
        }
        if affordable >= 2 {
            let samples = affordable.min(1000) as usize;
            let mut rng = SplitMix64::new(0x6D64_735F);
            return (0..samples)
                .all(|_| self.columns_independent(field, &random_subset(&mut rng, n, k)));
        }
        self.verify_structurally(field)
    }

    fn columns_independent(&self, field: &Field, cols: &[usize]) -> bool {
        field.rank(&self.matrix.select_columns(cols)) == cols.len()
    }

    fn verify_structurally(&self, field: &Field) -> bool {
        let k = self.k();
        let n = self.n();
        if k == n {
            return self.matrix == Matrix::identity(self.matrix.spec(), n);
        }
        // Row 0 all ones, row 1 the evaluation points (distinct, nonzero),
        // row r the r-th powers.
        if (0..n).any(|j| self.matrix.get(0, j) != Symbol(1)) {
            return false;
        }
        if k == 1 {
            return true;
        }
        let points: Vec<Symbol> = (0..n).map(|j| self.matrix.get(1, j)).collect();
        let mut seen = std::collections::HashSet::new();
        for p in &points {
            if p.0 == 0 || !seen.insert(p.0) {
                return false;
            }
        }
        for r in 2..k {
            for j in 0..n {
                if self.matrix.get(r, j) != field.mul(self.matrix.get(r - 1, j), points[j]) {
                    return false;
                }
            }
        }
        true
    }
}

/// Builds the k x n MDS expansion matrix: a Vandermonde matrix on n
/// distinct nonzero field points (requiring field order q >= n + 1). The
/// degenerate shapes need no point set and work over any field: k = 0 is
/// empty, k = 1 is the all-ones row, k = n is the identity.
pub fn build_mds(k: usize, n: usize, field: &Field) -> Result<MdsMatrix, CodingError> {
    if k > n {
        return Err(CodingError::BadMdsShape { k, n });
    }
    let spec = field.spec();
    let matrix = if k == 0 {
        Matrix::zero(spec, 0, n)
    } else if k == n {
        Matrix::identity(spec, n)
    } else if k == 1 {
        Matrix::from_fn(spec, 1, n, |_, _| Symbol(1))
    } else {
        if (field.order() as usize) < n + 1 {
            return Err(CodingError::FieldTooSmall {
                order: field.order(),
                needed: n + 1,
            });
        }
        let points: Vec<Symbol> = (0..n).map(|j| Symbol(j as u16 + 1)).collect();
        let mut m = Matrix::zero(spec, k, n);
        for (j, &p) in points.iter().enumerate() {
            let mut acc = Symbol(1);
            for r in 0..k {
                m.set(r, j, acc);
                acc = field.mul(acc, p);
            }
        }
        m
    };
    let mds = MdsMatrix { matrix };
    assert!(
        mds.verify(field, VERIFY_BUDGET),
        "constructed matrix failed the MDS check"
    );
    Ok(mds)
}

/// Smallest supported field with q >= num_coded + 1, the order the
/// Vandermonde construction needs.
pub fn auto_field_spec(num_coded: usize) -> Result<FieldSpec, CodingError> {
    for &m in SUPPORTED_DEGREES {
        let order = 1u32 << m;
        if order as usize > num_coded {
            return Ok(FieldSpec::standard(m).expect("standard spec"));
        }
    }
    Err(CodingError::FieldTooSmall {
        order: 1 << 16,
        needed: num_coded + 1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeMode {
    M1,
    MGt1,
    DiamondNonUniform,
}

/// One packet transmission: path `path` carries coded packet `packet` in
/// the slot this entry belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlotEntry {
    pub path: usize,
    pub packet: usize,
}

/// Packet counts and period of a multi-beam scheme on H_v vertex-disjoint
/// paths: period C(H_v, m_hat) subset slots, m_hat = min(M, H_v) fresh
/// packets per slot, K * C(H_v - 1, m_hat - 1) of them pure keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchemeCounts {
    pub num_keys: usize,
    pub num_coded: usize,
    pub period: usize,
}

pub fn mgt1_counts(h_v: usize, beams: usize, k: usize) -> SchemeCounts {
    assert!(h_v >= 1 && beams >= 1);
    let m_hat = beams.min(h_v);
    let period = binomial(h_v, m_hat) as usize;
    SchemeCounts {
        num_keys: k * binomial(h_v - 1, m_hat - 1) as usize,
        num_coded: m_hat * period,
        period,
    }
}

/// A complete linear scheme: which packet rides which path in which slot,
/// and how key packets expand into the coded stream.
///
/// `idle_paths[slot]` lists paths whose beams are held in that slot without
/// a packet completing there. That only happens on fractional-capacity
/// edges (a C = 1/2 link needs two uses per packet); the idle uses count
/// toward the capacity budget, and an eavesdropper on an idle edge sees
/// nothing because no packet completes.
#[derive(Clone, Debug)]
pub struct CodingScheme {
    pub network: Network,
    pub paths: PathSet,
    pub packet_len: usize,
    pub mds: MdsMatrix,
    pub slot_map: Vec<Vec<SlotEntry>>,
    pub idle_paths: Vec<Vec<usize>>,
    pub mode: SchemeMode,
}

impl CodingScheme {
    /// Validates the scheme invariants: the MDS shape matches the packet
    /// counts, every coded packet is scheduled exactly once, every slot
    /// satisfies the 1-2-1 constraints, and no edge ever exceeds its
    /// cumulative capacity budget.
    pub fn new(
        network: Network,
        paths: PathSet,
        mds: MdsMatrix,
        slot_map: Vec<Vec<SlotEntry>>,
        idle_paths: Vec<Vec<usize>>,
        packet_len: usize,
        mode: SchemeMode,
    ) -> Result<CodingScheme, CodingError> {
        if packet_len == 0 {
            return Err(CodingError::InvalidScheme(
                "packet_len must be at least 1".into(),
            ));
        }
        if slot_map.is_empty() {
            return Err(CodingError::InvalidScheme(
                "scheme needs at least one slot".into(),
            ));
        }
        if idle_paths.len() != slot_map.len() {
            return Err(CodingError::InvalidScheme(
                "idle_paths must cover exactly the scheduled slots".into(),
            ));
        }
        let num_coded = mds.n();
        let mut seen = vec![false; num_coded];
        for (entries, idle) in slot_map.iter().zip(&idle_paths) {
            for e in entries {
                if e.path >= paths.len() {
                    return Err(CodingError::InvalidScheme(format!(
                        "slot entry references unknown path {}",
                        e.path
                    )));
                }
                if e.packet >= num_coded || seen[e.packet] {
                    return Err(CodingError::InvalidScheme(format!(
                        "coded packet {} must be scheduled exactly once",
                        e.packet
                    )));
                }
                seen[e.packet] = true;
            }
            for &p in idle {
                if p >= paths.len() {
                    return Err(CodingError::InvalidScheme(format!(
                        "idle slot references unknown path {p}"
                    )));
                }
                if entries.iter().any(|e| e.path == p) {
                    return Err(CodingError::InvalidScheme(format!(
                        "path {p} cannot be both idle and carrying in one slot"
                    )));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(CodingError::InvalidScheme(
                "some coded packets are never scheduled".into(),
            ));
        }
        let scheme = CodingScheme {
            network,
            paths,
            packet_len,
            mds,
            slot_map,
            idle_paths,
            mode,
        };
        for slot in 0..scheme.period() {
            validate_link_state(&scheme.network, &scheme.link_state(slot))
                .map_err(|v| CodingError::InvalidScheme(format!("slot {slot}: {v}")))?;
        }
        scheme.check_capacity_budget()?;
        Ok(scheme)
    }

    /// Convenience constructor for the common case with no idle uses.
    pub fn new_fully_loaded(
        network: Network,
        paths: PathSet,
        mds: MdsMatrix,
        slot_map: Vec<Vec<SlotEntry>>,
        packet_len: usize,
        mode: SchemeMode,
    ) -> Result<CodingScheme, CodingError> {
        let idle = vec![Vec::new(); slot_map.len()];
        CodingScheme::new(network, paths, mds, slot_map, idle, packet_len, mode)
    }

    // Cumulative packet count on each edge must stay within uses * capacity
    // after every slot in which the edge is active (idle uses included).
    // For unit capacities this is the plain one-packet-per-use rule; for
    // fractional capacities it is the rate constraint integrated over time.
    fn check_capacity_budget(&self) -> Result<(), CodingError> {
        let mut uses = vec![0i64; self.network.edges().len()];
        let mut packets = vec![0i64; self.network.edges().len()];
        for slot in 0..self.period() {
            let per_edge = self.slot_edge_packets(slot);
            for &edge in &self.link_state(slot).active {
                uses[edge] += 1;
                packets[edge] += per_edge.get(&edge).map_or(0, |list| list.len() as i64);
                let budget = self.network.edge(edge).capacity.clone() * rat_int(uses[edge]);
                if Rat::from_integer(packets[edge].into()) > budget {
                    return Err(CodingError::InvalidScheme(format!(
                        "edge {edge} exceeds its capacity budget by slot {slot}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> FieldSpec {
        self.mds.matrix.spec()
    }

    pub fn num_keys(&self) -> usize {
        self.mds.k()
    }

    pub fn num_coded(&self) -> usize {
        self.mds.n()
    }

    pub fn num_messages(&self) -> usize {
        self.num_coded() - self.num_keys()
    }

    pub fn period(&self) -> usize {
        self.slot_map.len()
    }

    /// Message packets delivered per network use, as an exact rational.
    pub fn rate(&self) -> Rat {
        Rat::new(self.num_messages().into(), self.period().into())
    }

    /// Active edges of one slot: the union of the slot's carrying and idle
    /// path edges.
    pub fn link_state(&self, slot: usize) -> LinkState {
        let mut edges = Vec::new();
        for entry in &self.slot_map[slot] {
            edges.extend(self.paths.paths[entry.path].edges.iter().copied());
        }
        for &p in &self.idle_paths[slot] {
            edges.extend(self.paths.paths[p].edges.iter().copied());
        }
        LinkState::new(slot, edges)
    }

    /// Packets crossing each edge in one slot, ascending per edge.
    pub fn slot_edge_packets(&self, slot: usize) -> BTreeMap<EdgeId, Vec<usize>> {
        let mut map: BTreeMap<EdgeId, Vec<usize>> = BTreeMap::new();
        for entry in &self.slot_map[slot] {
            for &e in &self.paths.paths[entry.path].edges {
                map.entry(e).or_default().push(entry.packet);
            }
        }
        for list in map.values_mut() {
            list.sort_unstable();
        }
        map
    }
}

/// One-beam scheme: K keys expanded over the H_e edge-disjoint paths, one
/// path and one coded packet per slot, period H_e, rate 1 - K/H_e.
pub fn scheme_m1(
    net: &Network,
    k: usize,
    field: &Field,
    packet_len: usize,
) -> Result<CodingScheme, CodingError> {
    require_unit(net)?;
    if net.beams() != 1 {
        return Err(CodingError::BeamMismatch {
            expected: 1,
            found: net.beams(),
        });
    }
    let paths = max_edge_disjoint(net);
    let h_e = paths.len();
    if k >= h_e {
        return Err(CodingError::KTooLarge { k, limit: h_e });
    }
    let mds = build_mds(k, h_e, field)?;
    let slot_map = (0..h_e)
        .map(|i| vec![SlotEntry { path: i, packet: i }])
        .collect();
    CodingScheme::new_fully_loaded(
        net.clone(),
        paths,
        mds,
        slot_map,
        packet_len,
        SchemeMode::M1,
    )
}

/// Multi-beam scheme on the H_v vertex-disjoint paths: every slot activates
/// a different min(M, H_v)-subset (colex order) carrying that many fresh
/// coded packets; rate min(M, H_v)(1 - K/H_v).
pub fn scheme_mgt1(
    net: &Network,
    k: usize,
    field: &Field,
    packet_len: usize,
) -> Result<CodingScheme, CodingError> {
    require_unit(net)?;
    let paths = max_vertex_disjoint(net);
    let h_v = paths.len();
    if k >= h_v {
        return Err(CodingError::KTooLarge { k, limit: h_v });
    }
    let m_hat = net.beams().min(h_v);
    let slots = binomial(h_v, m_hat);
    if slots > MAX_SCHEME_SLOTS {
        return Err(CodingError::CombinatorialBlowup {
            subsets: slots,
            limit: MAX_SCHEME_SLOTS,
        });
    }
    let counts = mgt1_counts(h_v, net.beams(), k);
    let mds = build_mds(counts.num_keys, counts.num_coded, field)?;
    let mut slot_map = Vec::with_capacity(counts.period);
    let mut next_packet = 0;
    for subset in colex_subsets(h_v, m_hat) {
        let entries = subset
            .into_iter()
            .map(|path| {
                let entry = SlotEntry {
                    path,
                    packet: next_packet,
                };
                next_packet += 1;
                entry
            })
            .collect();
        slot_map.push(entries);
    }
    CodingScheme::new_fully_loaded(
        net.clone(),
        paths,
        mds,
        slot_map,
        packet_len,
        SchemeMode::MGt1,
    )
}

/// Plain routing at the no-eavesdropper capacity: one slot activating
/// min(M, H_v) vertex-disjoint paths, each carrying one placeholder packet.
pub fn scheme_unsecure(net: &Network) -> Result<Schedule, CodingError> {
    require_unit(net)?;
    let paths = max_vertex_disjoint(net);
    let active = net.beams().min(paths.len());
    let mut edges = Vec::new();
    let mut payloads = Vec::new();
    for path in paths.paths.iter().take(active) {
        for &e in &path.edges {
            edges.push(e);
            payloads.push((e, vec![Symbol(0)]));
        }
    }
    payloads.sort_by_key(|&(e, _)| e);
    let schedule = Schedule {
        field: FieldSpec::standard(1).expect("standard spec"),
        packet_len: 1,
        slots: vec![ScheduleSlot {
            state: LinkState::new(0, edges),
            payloads,
        }],
    };
    schedule.validate(net)?;
    Ok(schedule)
}

pub type Packet = Vec<Symbol>;

/// Per-slot link state plus the symbols carried on each active edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleSlot {
    pub state: LinkState,
    pub payloads: Vec<(EdgeId, Vec<Symbol>)>,
}

impl ScheduleSlot {
    pub fn payload(&self, edge: EdgeId) -> Option<&[Symbol]> {
        self.payloads
            .iter()
            .find(|&&(e, _)| e == edge)
            .map(|(_, p)| p.as_slice())
    }
}

/// A fully materialized transmission: one period of slots with payloads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub field: FieldSpec,
    pub packet_len: usize,
    pub slots: Vec<ScheduleSlot>,
}

impl Schedule {
    pub fn period(&self) -> usize {
        self.slots.len()
    }

    /// Checks 1-2-1 validity of every slot and the cumulative capacity
    /// budget of every edge (payloads count in packets of `packet_len`
    /// symbols).
    pub fn validate(&self, net: &Network) -> Result<(), CodingError> {
        let mut uses = vec![0i64; net.edges().len()];
        let mut packets = vec![0i64; net.edges().len()];
        for slot in &self.slots {
            validate_link_state(net, &slot.state).map_err(|v| {
                CodingError::InvalidScheme(format!("slot {}: {v}", slot.state.slot))
            })?;
            for (edge, payload) in &slot.payloads {
                if !slot.state.active.contains(edge) {
                    return Err(CodingError::InvalidScheme(format!(
                        "payload on inactive edge {edge}"
                    )));
                }
                if payload.len() % self.packet_len != 0 {
                    return Err(CodingError::WrongPacketLen {
                        expected: self.packet_len,
                        got: payload.len(),
                    });
                }
                uses[*edge] += 1;
                packets[*edge] += (payload.len() / self.packet_len) as i64;
                let budget = net.edge(*edge).capacity.clone() * rat_int(uses[*edge]);
                if Rat::from_integer(packets[*edge].into()) > budget {
                    return Err(CodingError::InvalidScheme(format!(
                        "edge {edge} exceeds its capacity budget"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Line-based dump: `slot <t> edge <id> payload <hex symbols>`, slots
    /// then edges ascending, fixed-width hex per symbol. An idle use
    /// (edge held active with no packet completing) is written as `-`.
    pub fn serialize(&self) -> String {
        let width = self.field.hex_width();
        let mut out = String::new();
        for slot in &self.slots {
            for (edge, payload) in &slot.payloads {
                out.push_str(&format!("slot {} edge {} payload ", slot.state.slot, edge));
                if payload.is_empty() {
                    out.push('-');
                }
                for sym in payload {
                    out.push_str(&format!("{:0width$x}", sym.0, width = width));
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Expands seeded keys through the MDS matrix, adds the messages and lays
/// the coded packets onto the schedule. Returns the schedule together with
/// the drawn key packets.
pub fn encode(
    scheme: &CodingScheme,
    messages: &[Packet],
    seed: u64,
) -> Result<(Schedule, Vec<Packet>), CodingError> {
    if messages.len() != scheme.num_messages() {
        return Err(CodingError::WrongMessageCount {
            expected: scheme.num_messages(),
            got: messages.len(),
        });
    }
    let field = Field::new(scheme.field());
    for m in messages {
        if m.len() != scheme.packet_len {
            return Err(CodingError::WrongPacketLen {
                expected: scheme.packet_len,
                got: m.len(),
            });
        }
        for &s in m {
            if !field.contains(s) {
                return Err(CodingError::Field(FieldError::ValueOutOfRange {
                    value: s.0 as u32,
                    order: field.order(),
                }));
            }
        }
    }

    let mut rng = SplitMix64::new(seed);
    let keys: Vec<Packet> = (0..scheme.num_keys())
        .map(|_| {
            (0..scheme.packet_len)
                .map(|_| field.random(&mut rng))
                .collect()
        })
        .collect();

    // X_i = sum_j mds[j][i] * key_j, T_i = X_i (+ W_i on message packets).
    let mut coded: Vec<Packet> = Vec::with_capacity(scheme.num_coded());
    for i in 0..scheme.num_coded() {
        let mut packet = vec![Symbol(0); scheme.packet_len];
        for (j, key) in keys.iter().enumerate() {
            let coeff = scheme.mds.matrix.get(j, i);
            if coeff.0 == 0 {
                continue;
            }
            for (pos, slot) in packet.iter_mut().enumerate() {
                *slot = field.add(*slot, field.mul(coeff, key[pos]));
            }
        }
        if i < scheme.num_messages() {
            for (pos, slot) in packet.iter_mut().enumerate() {
                *slot = field.add(*slot, messages[i][pos]);
            }
        }
        coded.push(packet);
    }

    let mut slots = Vec::with_capacity(scheme.period());
    for slot in 0..scheme.period() {
        let per_edge = scheme.slot_edge_packets(slot);
        let state = scheme.link_state(slot);
        // Idle-active edges get an explicit empty payload so receivers and
        // auditors can account for the spent network use.
        let payloads = state
            .active
            .iter()
            .map(|&edge| {
                let mut payload = Vec::new();
                if let Some(list) = per_edge.get(&edge) {
                    payload.reserve(list.len() * scheme.packet_len);
                    for &packet in list {
                        payload.extend_from_slice(&coded[packet]);
                    }
                }
                (edge, payload)
            })
            .collect();
        slots.push(ScheduleSlot { state, payloads });
    }
    let schedule = Schedule {
        field: scheme.field(),
        packet_len: scheme.packet_len,
        slots,
    };
    debug_assert!(schedule.validate(&scheme.network).is_ok());
    Ok((schedule, keys))
}

/// Recovers the message packets from a received schedule: reads each coded
/// packet off the final edge of its path, solves for the base keys from the
/// pure-key packets (their MDS columns are invertible), re-expands and
/// cancels. Exact inverse of [`encode`].
pub fn decode(scheme: &CodingScheme, received: &Schedule) -> Result<Vec<Packet>, CodingError> {
    if received.field != scheme.field() || received.packet_len != scheme.packet_len {
        return Err(CodingError::ScheduleMismatch(
            "field or packet length differs from the scheme".into(),
        ));
    }
    if received.period() != scheme.period() {
        return Err(CodingError::IncompleteTranscript(format!(
            "expected {} slots, got {}",
            scheme.period(),
            received.period()
        )));
    }
    let field = Field::new(scheme.field());
    let plen = scheme.packet_len;

    let mut coded: Vec<Option<Packet>> = vec![None; scheme.num_coded()];
    for slot in 0..scheme.period() {
        let per_edge = scheme.slot_edge_packets(slot);
        for entry in &scheme.slot_map[slot] {
            let last_edge = *scheme.paths.paths[entry.path].edges.last().unwrap();
            let expected = &per_edge[&last_edge];
            let offset = expected
                .iter()
                .position(|&p| p == entry.packet)
                .expect("scheduled packet crosses its own path");
            let payload = received.slots[slot].payload(last_edge).ok_or_else(|| {
                CodingError::IncompleteTranscript(format!(
                    "slot {slot} carries nothing on edge {last_edge}"
                ))
            })?;
            if payload.len() != expected.len() * plen {
                return Err(CodingError::IncompleteTranscript(format!(
                    "slot {slot} edge {last_edge}: expected {} symbols, got {}",
                    expected.len() * plen,
                    payload.len()
                )));
            }
            coded[entry.packet] = Some(payload[offset * plen..(offset + 1) * plen].to_vec());
        }
    }
    let coded: Vec<Packet> = coded
        .into_iter()
        .map(|p| p.expect("every packet is scheduled once"))
        .collect();

    let num_keys = scheme.num_keys();
    let num_messages = scheme.num_messages();
    let mut keys: Vec<Packet> = vec![vec![Symbol(0); plen]; num_keys];
    if num_keys > 0 {
        let pure: Vec<usize> = (num_messages..scheme.num_coded()).collect();
        // Rows of the system are the pure-key packets: sum_j G[j][i] k_j = T_i.
        let system = scheme.mds.matrix.select_columns(&pure).transpose();
        for pos in 0..plen {
            let rhs: Vec<Symbol> = pure.iter().map(|&i| coded[i][pos]).collect();
            let solved = field
                .solve(&system, &rhs)
                .ok_or(CodingError::InconsistentSystem)?;
            for (j, key) in keys.iter_mut().enumerate() {
                key[pos] = solved[j];
            }
        }
    }

    let mut messages = Vec::with_capacity(num_messages);
    for i in 0..num_messages {
        let mut w = coded[i].clone();
        for (j, key) in keys.iter().enumerate() {
            let coeff = scheme.mds.matrix.get(j, i);
            if coeff.0 == 0 {
                continue;
            }
            for (pos, slot) in w.iter_mut().enumerate() {
                *slot = field.sub(*slot, field.mul(coeff, key[pos]));
            }
        }
        messages.push(w);
    }
    Ok(messages)
}

/// Random message block of the right shape for `scheme`, for simulations.
pub fn random_messages(scheme: &CodingScheme, rng: &mut SplitMix64) -> Vec<Packet> {
    let field = Field::new(scheme.field());
    (0..scheme.num_messages())
        .map(|_| (0..scheme.packet_len).map(|_| field.random(rng)).collect())
        .collect()
}
