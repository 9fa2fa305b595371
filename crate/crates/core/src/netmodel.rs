//! The 1-2-1 network data model: a DAG with rational edge capacities, a
//! beam budget M for the endpoints, per-slot link-state validation against
//! the 1-2-1 constraints, and the on-disk file format.
//!
//! Capacities are exact rationals end-to-end; a capacity of c means an edge
//! carries up to c packets per network use. In every slot an intermediate
//! node may listen on at most one incoming edge and transmit on at most one
//! outgoing edge; only the source and the destination may drive up to M
//! edges at once.
//!
//! Validated networks never contain a direct source-to-destination edge:
//! the constructor splices a virtual relay into any such edge, which keeps
//! both the edge- and vertex-disjoint path counts intact and lets the
//! vertex-cut machinery avoid special cases.

use crate::rng::SplitMix64;
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;
use thiserror::Error;

pub type NodeId = usize;
pub type EdgeId = usize;

/// Exact rational used for capacities, time fractions and rate values.
pub type Rat = num_rational::BigRational;

/// Rational from an integer pair; `d` must be nonzero.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Parses "p" or "p/q".
pub fn parse_rat(token: &str) -> Result<Rat, String> {
    let (num, den) = match token.split_once('/') {
        Some((n, d)) => (n, d),
        None => (token, "1"),
    };
    let n: num_bigint::BigInt = num
        .parse()
        .map_err(|_| format!("malformed rational '{token}'"))?;
    let d: num_bigint::BigInt = den
        .parse()
        .map_err(|_| format!("malformed rational '{token}'"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in '{token}'"));
    }
    Ok(Rat::new(n, d))
}

/// Renders "p" or "p/q" in lowest terms.
pub fn format_rat(r: &Rat) -> String {
    if r.denom() == &num_bigint::BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid network: {0}")]
    Validation(String),
}

fn validation(msg: impl Into<String>) -> NetError {
    NetError::Validation(msg.into())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub tail: NodeId,
    pub head: NodeId,
    pub capacity: Rat,
}

/// Immutable, validated 1-2-1 network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    node_count: usize,
    source: NodeId,
    destination: NodeId,
    beams: usize,
    edges: Vec<Edge>,
}

impl Network {
    /// Validates and normalizes a network. Edge ids follow the input order;
    /// any direct source-to-destination edge is split through a fresh
    /// virtual relay (the second half is appended after all input edges).
    pub fn new(
        node_count: usize,
        source: NodeId,
        destination: NodeId,
        beams: usize,
        edges: Vec<Edge>,
    ) -> Result<Network, NetError> {
        if source >= node_count || destination >= node_count {
            return Err(validation("source or sink id out of range"));
        }
        if source == destination {
            return Err(validation("source equals sink"));
        }
        if beams == 0 {
            return Err(validation("beam count must be at least 1"));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.tail >= node_count || e.head >= node_count {
                return Err(validation(format!("edge {i} references an unknown node")));
            }
            if e.tail == e.head {
                return Err(validation(format!("edge {i} is a self-loop")));
            }
            if e.capacity.is_negative() {
                return Err(validation(format!("edge {i} has negative capacity")));
            }
            if e.head == source {
                return Err(validation(format!("edge {i} enters the source")));
            }
            if e.tail == destination {
                return Err(validation(format!("edge {i} leaves the sink")));
            }
        }
        let mut net = Network {
            node_count,
            source,
            destination,
            beams,
            edges,
        };
        net.split_direct_edges();
        net.check_acyclic()?;
        Ok(net)
    }

    fn split_direct_edges(&mut self) {
        let direct: Vec<EdgeId> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.tail == self.source && e.head == self.destination)
            .map(|(i, _)| i)
            .collect();
        for id in direct {
            let relay = self.node_count;
            self.node_count += 1;
            let cap = self.edges[id].capacity.clone();
            self.edges[id].head = relay;
            self.edges.push(Edge {
                tail: relay,
                head: self.destination,
                capacity: cap,
            });
        }
    }

    fn check_acyclic(&self) -> Result<(), NetError> {
        let mut indeg = vec![0usize; self.node_count];
        for e in &self.edges {
            indeg[e.head] += 1;
        }
        let mut queue: Vec<NodeId> = (0..self.node_count).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop() {
            seen += 1;
            for e in &self.edges {
                if e.tail == v {
                    indeg[e.head] -= 1;
                    if indeg[e.head] == 0 {
                        queue.push(e.head);
                    }
                }
            }
        }
        if seen == self.node_count {
            Ok(())
        } else {
            Err(validation("network contains a cycle"))
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn destination(&self) -> NodeId {
        self.destination
    }

    pub fn beams(&self) -> usize {
        self.beams
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    /// Same topology with a different beam budget.
    pub fn with_beams(&self, beams: usize) -> Result<Network, NetError> {
        if beams == 0 {
            return Err(validation("beam count must be at least 1"));
        }
        let mut net = self.clone();
        net.beams = beams;
        Ok(net)
    }

    pub fn has_unit_capacities(&self) -> bool {
        let one = rat_int(1);
        self.edges.iter().all(|e| e.capacity == one)
    }

    /// Canonical file-format rendering; `parse_network` inverts it.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("nodes {}\n", self.node_count));
        out.push_str(&format!("source {}\n", self.source));
        out.push_str(&format!("sink {}\n", self.destination));
        out.push_str(&format!("beams {}\n", self.beams));
        for e in &self.edges {
            out.push_str(&format!(
                "edge {} {} {}\n",
                e.tail,
                e.head,
                format_rat(&e.capacity)
            ));
        }
        out
    }

    /// FNV-1a content hash of the canonical serialization.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.serialize().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }
}

/// Parses the line-based network file format:
///
/// ```text
/// nodes <int>
/// source <node-id>
/// sink <node-id>
/// beams <int M>
/// edge <tail> <head> <cap>    # cap is "p" or "p/q", nonnegative
/// ```
///
/// `#` starts a comment; unknown directives are errors; edges get ids
/// 0, 1, 2, ... in file order.
pub fn parse_network(text: &str) -> Result<Network, NetError> {
    let mut nodes: Option<usize> = None;
    let mut source: Option<usize> = None;
    let mut sink: Option<usize> = None;
    let mut beams: Option<usize> = None;
    let mut edges: Vec<Edge> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let parse_err = |reason: String| NetError::Parse {
            line: line_no,
            reason,
        };
        let parse_usize = |tok: &str| -> Result<usize, NetError> {
            tok.parse::<usize>()
                .map_err(|_| parse_err(format!("expected an integer, got '{tok}'")))
        };
        let set_once = |slot: &mut Option<usize>, name: &str, value: usize| {
            if slot.is_some() {
                Err(parse_err(format!("duplicate '{name}' directive")))
            } else {
                *slot = Some(value);
                Ok(())
            }
        };
        match tokens[0] {
            "nodes" | "source" | "sink" | "beams" => {
                if tokens.len() != 2 {
                    return Err(parse_err(format!("'{}' takes one argument", tokens[0])));
                }
                let value = parse_usize(tokens[1])?;
                match tokens[0] {
                    "nodes" => set_once(&mut nodes, "nodes", value)?,
                    "source" => set_once(&mut source, "source", value)?,
                    "sink" => set_once(&mut sink, "sink", value)?,
                    _ => set_once(&mut beams, "beams", value)?,
                }
            }
            "edge" => {
                if tokens.len() != 4 {
                    return Err(parse_err("'edge' takes tail, head and capacity".into()));
                }
                let tail = parse_usize(tokens[1])?;
                let head = parse_usize(tokens[2])?;
                if tail == head {
                    return Err(parse_err(format!("self-loop on node {tail}")));
                }
                let capacity = parse_rat(tokens[3]).map_err(parse_err)?;
                edges.push(Edge {
                    tail,
                    head,
                    capacity,
                });
            }
            other => {
                return Err(parse_err(format!("unknown directive '{other}'")));
            }
        }
    }

    let nodes = nodes.ok_or_else(|| validation("missing 'nodes' directive"))?;
    let source = source.ok_or_else(|| validation("missing 'source' directive"))?;
    let sink = sink.ok_or_else(|| validation("missing 'sink' directive"))?;
    let beams = beams.ok_or_else(|| validation("missing 'beams' directive"))?;
    Network::new(nodes, source, sink, beams, edges)
}

/// N-relay diamond: source 0, relays 1..=N, sink N+1, one beam. Edge ids
/// 0..N are source->relay_i, ids N..2N are relay_i->sink, both with the
/// path capacity `caps[i]`.
pub fn diamond_network(caps: &[Rat]) -> Result<Network, NetError> {
    if caps.is_empty() {
        return Err(validation("diamond needs at least one relay"));
    }
    let n = caps.len();
    let mut edges = Vec::with_capacity(2 * n);
    for (i, c) in caps.iter().enumerate() {
        edges.push(Edge {
            tail: 0,
            head: i + 1,
            capacity: c.clone(),
        });
    }
    for (i, c) in caps.iter().enumerate() {
        edges.push(Edge {
            tail: i + 1,
            head: n + 1,
            capacity: c.clone(),
        });
    }
    Network::new(n + 2, 0, n + 1, 1, edges)
}

/// Unit-capacity diamond with N relays, the uniform-capacity benchmark.
pub fn unit_diamond(n: usize, beams: usize) -> Result<Network, NetError> {
    diamond_network(&vec![rat_int(1); n])?.with_beams(beams)
}

/// Random unit-capacity DAG for simulations and randomized tests. Node 0 is
/// the source, `node_count - 1` the sink, and edges only go forward in node
/// order, so the result is always a valid network (a direct source-sink
/// edge, if drawn, is split by the constructor). Connectivity is up to the
/// caller to check.
pub fn random_unit_dag(
    rng: &mut SplitMix64,
    node_count: usize,
    edge_percent: u32,
    beams: usize,
) -> Network {
    assert!(node_count >= 2);
    let mut edges = Vec::new();
    for tail in 0..node_count - 1 {
        for head in (tail + 1)..node_count {
            if head == node_count - 1 && tail == 0 && node_count > 2 {
                // Keep the generator biased toward relayed paths.
                continue;
            }
            if rng.below(100) < edge_percent as u64 {
                edges.push(Edge {
                    tail,
                    head,
                    capacity: rat_int(1),
                });
            }
        }
    }
    Network::new(node_count, 0, node_count - 1, beams, edges)
        .expect("generated DAG is valid by construction")
}

/// The eavesdropper's budget: she reads K edges of her choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WiretapModel {
    pub k: usize,
}

impl WiretapModel {
    pub fn new(net: &Network, k: usize) -> Result<WiretapModel, NetError> {
        if k > net.edges().len() {
            return Err(validation(format!(
                "wiretap budget {k} exceeds the {} edges of the network",
                net.edges().len()
            )));
        }
        Ok(WiretapModel { k })
    }
}

/// Set of simultaneously active edges in one slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkState {
    pub slot: usize,
    pub active: BTreeSet<EdgeId>,
}

impl LinkState {
    pub fn new(slot: usize, edges: impl IntoIterator<Item = EdgeId>) -> LinkState {
        LinkState {
            slot,
            active: edges.into_iter().collect(),
        }
    }
}

/// A violated 1-2-1 constraint, naming the offending node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    BadEdgeId(EdgeId),
    RelayFanIn { node: NodeId, degree: usize },
    RelayFanOut { node: NodeId, degree: usize },
    SourceBeams { used: usize, beams: usize },
    DestinationBeams { used: usize, beams: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::BadEdgeId(e) => write!(f, "unknown edge id {e}"),
            Violation::RelayFanIn { node, degree } => {
                write!(f, "node {node} listens on {degree} edges (max 1)")
            }
            Violation::RelayFanOut { node, degree } => {
                write!(f, "node {node} transmits on {degree} edges (max 1)")
            }
            Violation::SourceBeams { used, beams } => {
                write!(f, "source drives {used} edges with {beams} beams")
            }
            Violation::DestinationBeams { used, beams } => {
                write!(f, "destination receives on {used} edges with {beams} beams")
            }
        }
    }
}

/// Checks the four 1-2-1 constraints for one slot: intermediate nodes use
/// at most one incoming and one outgoing active edge; source and
/// destination at most M.
pub fn validate_link_state(net: &Network, state: &LinkState) -> Result<(), Violation> {
    let mut in_deg = vec![0usize; net.node_count()];
    let mut out_deg = vec![0usize; net.node_count()];
    for &id in &state.active {
        if id >= net.edges().len() {
            return Err(Violation::BadEdgeId(id));
        }
        let e = net.edge(id);
        out_deg[e.tail] += 1;
        in_deg[e.head] += 1;
    }
    for v in 0..net.node_count() {
        if v == net.source() {
            if out_deg[v] > net.beams() {
                return Err(Violation::SourceBeams {
                    used: out_deg[v],
                    beams: net.beams(),
                });
            }
        } else if v == net.destination() {
            if in_deg[v] > net.beams() {
                return Err(Violation::DestinationBeams {
                    used: in_deg[v],
                    beams: net.beams(),
                });
            }
        } else {
            if in_deg[v] > 1 {
                return Err(Violation::RelayFanIn {
                    node: v,
                    degree: in_deg[v],
                });
            }
            if out_deg[v] > 1 {
                return Err(Violation::RelayFanOut {
                    node: v,
                    degree: out_deg[v],
                });
            }
        }
    }
    Ok(())
}
