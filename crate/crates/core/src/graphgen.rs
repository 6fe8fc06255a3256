//! Sampling finite LDPC factor graphs.
//!
//! Three constructions: the configuration model (uniform random matching of
//! degree sockets), protograph lifting (M copies with per-bundle random
//! permutations), and the random spatially coupled chain (variables at
//! positions 1..L connect to checks within a window of w positions to the
//! right).
//!
//! Graphs are socket-level multigraphs; duplicate edges are kept. Exporting
//! a parity-check view reduces duplicates mod 2 and flags that the reduction
//! happened.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensemble::DegreeDistribution;
use crate::rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("variable sockets ({var_sockets}) are not an integer multiple of the check degree structure")]
    SocketMismatch { var_sockets: f64 },
    #[error("degree fractions for n = {n} cannot be realized with integer node counts")]
    UnrealizableDegrees { n: usize },
    #[error("coupled socket matching failed after {attempts} attempts")]
    MatchingInfeasible { attempts: usize },
    #[error("lift factor must be at least 1, got {0}")]
    InvalidLift(usize),
    #[error("coupled window must satisfy 1 <= w <= L, got w = {w}, L = {l}")]
    BadWindow { w: usize, l: usize },
    #[error("per-position variable sockets ({m} * {dl}) must be divisible by d_r = {dr}")]
    IndivisibleSockets { m: usize, dl: u32, dr: u32 },
}

/// Spatial position indices for a coupled graph, 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Positions {
    pub vars: Vec<u32>,
    pub checks: Vec<u32>,
}

/// A bipartite multigraph between variable and check nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorGraph {
    pub n_vars: usize,
    pub n_checks: usize,
    /// (variable index, check index) pairs; duplicates allowed.
    pub edges: Vec<(u32, u32)>,
    /// Present for spatially coupled graphs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Positions>,
    /// Coupling window, when the graph came from the coupled construction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
}

/// Mod-2 reduced parity-check view of a factor graph.
#[derive(Debug, Clone)]
pub struct ParityCheckView {
    /// Sorted distinct variable indices per check, duplicates cancelled.
    pub rows: Vec<Vec<u32>>,
    /// True when at least one duplicate edge was cancelled.
    pub reduced: bool,
}

impl FactorGraph {
    pub fn var_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n_vars];
        for &(v, _) in &self.edges {
            deg[v as usize] += 1;
        }
        deg
    }

    pub fn check_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n_checks];
        for &(_, c) in &self.edges {
            deg[c as usize] += 1;
        }
        deg
    }

    /// Per-check adjacency lists at socket level (duplicates kept).
    pub fn check_adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n_checks];
        for &(v, c) in &self.edges {
            adj[c as usize].push(v);
        }
        adj
    }

    /// Per-variable adjacency lists at socket level (duplicates kept).
    pub fn var_adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n_vars];
        for &(v, c) in &self.edges {
            adj[v as usize].push(c);
        }
        adj
    }

    /// Parity-check matrix rows over GF(2): duplicate edges cancel mod 2.
    pub fn parity_check(&self) -> ParityCheckView {
        let mut reduced = false;
        let rows = self
            .check_adjacency()
            .into_iter()
            .map(|mut vars| {
                vars.sort_unstable();
                let mut out = Vec::with_capacity(vars.len());
                let mut i = 0;
                while i < vars.len() {
                    let mut run = 1;
                    while i + run < vars.len() && vars[i + run] == vars[i] {
                        run += 1;
                    }
                    if run % 2 == 1 {
                        out.push(vars[i]);
                    }
                    if run > 1 {
                        reduced = true;
                    }
                    i += run;
                }
                out
            })
            .collect();
        ParityCheckView { rows, reduced }
    }

    /// Plain-text adjacency form used by fixtures: a header line followed by
    /// one `v<i>: c c c` line per variable.
    pub fn to_adjacency_text(&self) -> String {
        let mut out = format!("vars {} checks {}\n", self.n_vars, self.n_checks);
        for (v, checks) in self.var_adjacency().iter().enumerate() {
            out.push_str(&format!("v{v}:"));
            for c in checks {
                out.push_str(&format!(" {c}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_adjacency_text(text: &str) -> Result<Self, String> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or("empty graph text")?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "vars" || parts[2] != "checks" {
            return Err(format!("bad header {header:?}"));
        }
        let n_vars: usize = parts[1].parse().map_err(|e| format!("{e}"))?;
        let n_checks: usize = parts[3].parse().map_err(|e| format!("{e}"))?;
        let mut edges = Vec::new();
        for line in lines {
            let (head, rest) = line.split_once(':').ok_or_else(|| format!("bad line {line:?}"))?;
            let v: u32 = head.trim().trim_start_matches('v').parse().map_err(|e| format!("{e}"))?;
            for tok in rest.split_whitespace() {
                let c: u32 = tok.parse().map_err(|e| format!("{e}"))?;
                edges.push((v, c));
            }
        }
        Ok(FactorGraph { n_vars, n_checks, edges, positions: None, window: None })
    }
}

/// Largest-remainder apportionment of `n` nodes over degree fractions.
/// Ties on the fractional part break toward the smaller degree.
pub fn apportion_degrees(
    coeffs: &std::collections::BTreeMap<u32, f64>,
    n: usize,
) -> Vec<(u32, usize)> {
    let mut counts: Vec<(u32, usize, f64)> = coeffs
        .iter()
        .map(|(&d, &c)| {
            let quota = c * n as f64;
            (d, quota.floor() as usize, quota - quota.floor())
        })
        .collect();
    let assigned: usize = counts.iter().map(|&(_, c, _)| c).sum();
    let mut leftover = n - assigned;
    // Stable order: remainder descending, then degree ascending.
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| {
        counts[b].2.total_cmp(&counts[a].2).then(counts[a].0.cmp(&counts[b].0))
    });
    for idx in order {
        if leftover == 0 {
            break;
        }
        counts[idx].1 += 1;
        leftover -= 1;
    }
    counts.into_iter().map(|(d, c, _)| (d, c)).collect()
}

fn shuffled<T>(mut items: Vec<T>, rng: &mut rng::ChaCha8Rng) -> Vec<T> {
    use rand::seq::SliceRandom;
    items.shuffle(rng);
    items
}

/// Samples from the configuration model: degree sockets on both sides are
/// matched through a uniformly random permutation.
pub fn sample_configuration(
    dd: &DegreeDistribution,
    n_vars: usize,
    rng_seed: u64,
) -> Result<FactorGraph, GraphError> {
    let var_counts = apportion_degrees(dd.var_node_coeffs(), n_vars);
    let var_sockets_total: usize = var_counts.iter().map(|&(d, c)| d as usize * c).sum();

    // The exact socket count must be reachable on the check side.
    let avg_check = dd.avg_check_degree();
    let m_float = var_sockets_total as f64 / avg_check;
    let n_checks = m_float.round() as usize;
    if n_checks == 0 {
        return Err(GraphError::SocketMismatch { var_sockets: var_sockets_total as f64 });
    }
    let mut check_counts = apportion_degrees(dd.check_node_coeffs(), n_checks);
    let mut check_sockets_total: usize =
        check_counts.iter().map(|&(d, c)| d as usize * c).sum();

    // Largest-remainder counts may miss the socket total by a few; shift
    // nodes between adjacent degree classes to close the gap.
    let degrees: Vec<u32> = check_counts.iter().map(|&(d, _)| d).collect();
    let mut fixup_budget = 4 * degrees.len() * (dd.avg_check_degree() as usize + 1) + 16;
    while check_sockets_total != var_sockets_total && fixup_budget > 0 {
        fixup_budget -= 1;
        let need_more = check_sockets_total < var_sockets_total;
        let mut moved = false;
        'outer: for i in 0..check_counts.len() {
            for j in 0..check_counts.len() {
                if i == j || check_counts[j].1 == 0 {
                    continue;
                }
                let delta = check_counts[i].0 as isize - check_counts[j].0 as isize;
                if (need_more && delta > 0) || (!need_more && delta < 0) {
                    let gap = (var_sockets_total as isize - check_sockets_total as isize).abs();
                    if delta.abs() <= gap {
                        check_counts[j].1 -= 1;
                        check_counts[i].1 += 1;
                        check_sockets_total =
                            (check_sockets_total as isize + delta) as usize;
                        moved = true;
                        break 'outer;
                    }
                }
            }
        }
        if !moved {
            break;
        }
    }
    if check_sockets_total != var_sockets_total {
        return Err(GraphError::UnrealizableDegrees { n: n_vars });
    }

    // Lay out sockets, shuffle one side, zip.
    let mut var_of_socket = Vec::with_capacity(var_sockets_total);
    let mut node = 0u32;
    for &(d, count) in &var_counts {
        for _ in 0..count {
            for _ in 0..d {
                var_of_socket.push(node);
            }
            node += 1;
        }
    }
    let mut check_of_socket = Vec::with_capacity(var_sockets_total);
    let mut node = 0u32;
    for &(d, count) in &check_counts {
        for _ in 0..count {
            for _ in 0..d {
                check_of_socket.push(node);
            }
            node += 1;
        }
    }
    let mut r = rng::from_seed(rng_seed);
    let check_of_socket = shuffled(check_of_socket, &mut r);
    let edges = var_of_socket.into_iter().zip(check_of_socket).collect();
    Ok(FactorGraph { n_vars, n_checks, edges, positions: None, window: None })
}

/// Lifts a protograph M-fold: every node becomes M copies and every
/// proto-edge becomes a bundle of M edges wired through an independent
/// uniform permutation.
pub fn lift_protograph(
    proto: &FactorGraph,
    m: usize,
    rng_seed: u64,
) -> Result<FactorGraph, GraphError> {
    if m < 1 {
        return Err(GraphError::InvalidLift(m));
    }
    let mut r = rng::from_seed(rng_seed);
    let mut edges = Vec::with_capacity(proto.edges.len() * m);
    for &(v, c) in &proto.edges {
        let perm = shuffled((0..m as u32).collect(), &mut r);
        for (copy, &target) in perm.iter().enumerate() {
            edges.push((v * m as u32 + copy as u32, c * m as u32 + target));
        }
    }
    Ok(FactorGraph {
        n_vars: proto.n_vars * m,
        n_checks: proto.n_checks * m,
        edges,
        positions: None,
        window: None,
    })
}

/// Samples the random spatially coupled (d_l, d_r) chain: `m_vars` variables
/// at each position 1..=L, check positions 1..=L+w-1, and every variable
/// socket at position i matched to a random free check socket at a position
/// uniform over {i, ..., i+w-1}. Checks near the chain ends keep unfilled
/// sockets, which is where the decoder's extra knowledge comes from.
pub fn sample_coupled(
    dl: u32,
    dr: u32,
    chain_len: usize,
    w: usize,
    m_vars: usize,
    rng_seed: u64,
) -> Result<FactorGraph, GraphError> {
    if w < 1 || w > chain_len {
        return Err(GraphError::BadWindow { w, l: chain_len });
    }
    if (m_vars * dl as usize) % dr as usize != 0 {
        return Err(GraphError::IndivisibleSockets { m: m_vars, dl, dr });
    }
    let checks_per_pos = m_vars * dl as usize / dr as usize;
    let n_check_pos = chain_len + w - 1;
    let n_vars = chain_len * m_vars;
    let n_checks = n_check_pos * checks_per_pos;
    let sockets_per_pos = m_vars * dl as usize;

    use rand::Rng;
    const MAX_ATTEMPTS: usize = 50;
    for attempt in 0..MAX_ATTEMPTS {
        let mut r = rng::stream(rng_seed, attempt as u64);
        // Free check sockets per position, pre-shuffled.
        let mut free: Vec<Vec<u32>> = (0..n_check_pos)
            .map(|p| {
                let base = (p * checks_per_pos) as u32;
                let sockets: Vec<u32> = (0..sockets_per_pos)
                    .map(|s| base + (s % checks_per_pos) as u32)
                    .collect();
                shuffled(sockets, &mut r)
            })
            .collect();

        // Variable sockets in position order. Left-to-right placement keeps
        // every upcoming window supplied: by the time position i is
        // reached, only the w-1 preceding positions can have spent sockets
        // inside i's window, leaving at least one position's worth free.
        // A shuffled global order instead saturates the tight interior and
        // dead-ends almost surely at these sizes.
        let var_sockets: Vec<(u32, usize)> = (0..n_vars as u32)
            .flat_map(|v| {
                let pos = v as usize / m_vars; // 0-based position
                std::iter::repeat((v, pos)).take(dl as usize)
            })
            .collect();

        let mut edges = Vec::with_capacity(n_vars * dl as usize);
        let mut dead_end = false;
        for (v, pos) in var_sockets {
            let available: Vec<usize> =
                (pos..pos + w).filter(|&p| !free[p].is_empty()).collect();
            if available.is_empty() {
                dead_end = true;
                break;
            }
            let p = available[r.random_range(0..available.len())];
            let c = free[p].pop().unwrap();
            edges.push((v, c));
        }
        if dead_end {
            continue;
        }
        edges.sort_unstable();
        let positions = Positions {
            vars: (0..n_vars).map(|v| (v / m_vars + 1) as u32).collect(),
            checks: (0..n_checks).map(|c| (c / checks_per_pos + 1) as u32).collect(),
        };
        return Ok(FactorGraph {
            n_vars,
            n_checks,
            edges,
            positions: Some(positions),
            window: Some(w),
        });
    }
    Err(GraphError::MatchingInfeasible { attempts: MAX_ATTEMPTS })
}
