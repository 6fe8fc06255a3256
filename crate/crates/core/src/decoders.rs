//! Erasure decoders on finite factor graphs.
//!
//! Three decoders with a strict pecking order on the BEC:
//!
//! - [`bp_decode`]: flooding belief propagation. A check-to-variable message
//!   is known exactly when all other incoming variable messages are known
//!   (its value is their XOR); a variable-to-check message is known when the
//!   channel output or any other incoming check message is. Messages only
//!   ever go from unknown to known, so the fixed point does not depend on
//!   the schedule.
//! - [`peel_decode`]: repeatedly resolves a check with exactly one
//!   unresolved edge. Reaches the same erased set as BP.
//! - [`map_decode`]: exact bit-MAP via GF(2) elimination on the erased
//!   columns; resolves a bit exactly when its value is constant across the
//!   solution space. Never worse than BP.

use thiserror::Error;

use crate::channel::Symbol;
use crate::gf2::BitMatrix;
use crate::graphgen::FactorGraph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecodeError {
    #[error("received length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("parity system is inconsistent; input is not a BEC output of a codeword")]
    InconsistentSystem,
}

/// Outcome of a decoding attempt. Residual erasures are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub word: Vec<Symbol>,
    pub iterations: usize,
    pub resolved_count: usize,
}

impl DecodeResult {
    pub fn erased_set(&self) -> Vec<usize> {
        self.word
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.is_erased().then_some(i))
            .collect()
    }

    pub fn fully_decoded(&self) -> bool {
        self.resolved_count == self.word.len()
    }
}

fn check_len(graph: &FactorGraph, received: &[Symbol]) -> Result<(), DecodeError> {
    if received.len() != graph.n_vars {
        return Err(DecodeError::LengthMismatch { expected: graph.n_vars, got: received.len() });
    }
    Ok(())
}

fn result_from(word: Vec<Symbol>, iterations: usize) -> DecodeResult {
    let resolved_count = word.iter().filter(|s| !s.is_erased()).count();
    DecodeResult { word, iterations, resolved_count }
}

/// Flooding BP until a fixed point or `max_iters` rounds. `iterations`
/// counts rounds that added knowledge.
pub fn bp_decode(
    graph: &FactorGraph,
    received: &[Symbol],
    max_iters: usize,
) -> Result<DecodeResult, DecodeError> {
    check_len(graph, received)?;
    let n_edges = graph.edges.len();

    // Edge-indexed adjacency.
    let mut check_edges: Vec<Vec<usize>> = vec![Vec::new(); graph.n_checks];
    let mut var_edges: Vec<Vec<usize>> = vec![Vec::new(); graph.n_vars];
    for (e, &(v, c)) in graph.edges.iter().enumerate() {
        check_edges[c as usize].push(e);
        var_edges[v as usize].push(e);
    }

    let mut var_to_check: Vec<Symbol> =
        graph.edges.iter().map(|&(v, _)| received[v as usize]).collect();
    let mut check_to_var: Vec<Symbol> = vec![Symbol::Erased; n_edges];
    let mut word: Vec<Symbol> = received.to_vec();
    let mut iterations = 0;

    for _ in 0..max_iters {
        // Check side: XOR of all other incoming messages.
        let mut new_c2v = check_to_var.clone();
        for edges in &check_edges {
            // One pass: total XOR and erasure count, then exclude self.
            let mut erased = 0usize;
            let mut erased_edge = usize::MAX;
            let mut total = false;
            for &e in edges {
                match var_to_check[e].bit() {
                    Some(b) => total ^= b,
                    None => {
                        erased += 1;
                        erased_edge = e;
                    }
                }
            }
            for &e in edges {
                new_c2v[e] = match (erased, var_to_check[e].bit()) {
                    (0, Some(b)) => Symbol::from_bit(total ^ b),
                    (1, None) if erased_edge == e => Symbol::from_bit(total),
                    _ => new_c2v[e],
                };
            }
        }

        // Variable side: channel or any other incoming check message.
        let mut resolved_any = false;
        let mut messages_changed = false;
        for (v, edges) in var_edges.iter().enumerate() {
            let mut known: Option<bool> = received[v].bit();
            for &e in edges {
                if known.is_some() {
                    break;
                }
                known = new_c2v[e].bit();
            }
            if word[v].is_erased() {
                if let Some(b) = known {
                    word[v] = Symbol::from_bit(b);
                    resolved_any = true;
                }
            }
            for &e in edges {
                if var_to_check[e].is_erased() {
                    // Extrinsic: use channel or any check message on another edge.
                    let mut val: Option<bool> = received[v].bit();
                    for &other in edges {
                        if val.is_some() {
                            break;
                        }
                        if other != e {
                            val = new_c2v[other].bit();
                        }
                    }
                    if let Some(b) = val {
                        var_to_check[e] = Symbol::from_bit(b);
                        messages_changed = true;
                    }
                }
            }
        }
        let c2v_changed = new_c2v
            .iter()
            .zip(&check_to_var)
            .any(|(a, b)| a.is_erased() != b.is_erased());
        check_to_var = new_c2v;
        if resolved_any {
            iterations += 1;
        }
        if !(resolved_any || messages_changed || c2v_changed) {
            break;
        }
    }
    Ok(result_from(word, iterations))
}

/// Peeling: while some check has exactly one unresolved edge, resolve that
/// variable by parity and remove both from the residual graph. `iterations`
/// counts resolved variables.
pub fn peel_decode(graph: &FactorGraph, received: &[Symbol]) -> Result<DecodeResult, DecodeError> {
    check_len(graph, received)?;
    let check_adj = graph.check_adjacency();
    let mut word: Vec<Symbol> = received.to_vec();

    // Per-check bookkeeping over unresolved edges.
    let mut unresolved_edges: Vec<usize> = vec![0; graph.n_checks];
    let mut parity: Vec<bool> = vec![false; graph.n_checks];
    let mut var_checks: Vec<Vec<usize>> = vec![Vec::new(); graph.n_vars];
    for (c, vars) in check_adj.iter().enumerate() {
        for &v in vars {
            match word[v as usize].bit() {
                Some(b) => parity[c] ^= b,
                None => {
                    unresolved_edges[c] += 1;
                    var_checks[v as usize].push(c);
                }
            }
        }
    }

    let mut queue: Vec<usize> =
        (0..graph.n_checks).filter(|&c| unresolved_edges[c] == 1).collect();
    let mut steps = 0;
    while let Some(c) = queue.pop() {
        if unresolved_edges[c] != 1 {
            continue; // stale entry
        }
        let &v = check_adj[c]
            .iter()
            .find(|&&v| word[v as usize].is_erased())
            .expect("an unresolved edge exists");
        let value = parity[c];
        word[v as usize] = Symbol::from_bit(value);
        steps += 1;
        // Remove v's edges; var_checks holds one entry per unresolved edge.
        for &c2 in &var_checks[v as usize] {
            unresolved_edges[c2] -= 1;
            if value {
                parity[c2] ^= true;
            }
            if unresolved_edges[c2] == 1 {
                queue.push(c2);
            }
        }
        var_checks[v as usize].clear();
    }
    Ok(result_from(word, steps))
}

/// Exact bit-MAP decoding by Gauss-Jordan elimination over the erased
/// columns of the mod-2 reduced parity-check matrix.
pub fn map_decode(graph: &FactorGraph, received: &[Symbol]) -> Result<DecodeResult, DecodeError> {
    check_len(graph, received)?;
    let h = graph.parity_check();
    let erased: Vec<usize> = (0..graph.n_vars).filter(|&v| received[v].is_erased()).collect();
    if erased.is_empty() {
        return Ok(result_from(received.to_vec(), 0));
    }
    let col_of: std::collections::HashMap<usize, usize> =
        erased.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    // Augmented system over erased columns; RHS = XOR of known bits per row.
    let mut m = BitMatrix::zero(h.rows.len(), erased.len() + 1);
    for (r, row) in h.rows.iter().enumerate() {
        for &v in row {
            match received[v as usize].bit() {
                Some(true) => m.flip(r, erased.len()),
                Some(false) => {}
                None => m.flip(r, col_of[&(v as usize)]),
            }
        }
    }
    let pivots = m.reduce(erased.len());

    // Inconsistency: a zero row with RHS 1.
    for r in pivots.len()..m.rows() {
        if m.get(r, erased.len()) && m.row_is_unit(r, erased.len(), usize::MAX) {
            return Err(DecodeError::InconsistentSystem);
        }
    }

    let mut word = received.to_vec();
    for (rank, &col) in pivots.iter().enumerate() {
        // Determined exactly when the pivot row touches no free column.
        if m.row_is_unit(rank, erased.len(), col) {
            word[erased[col]] = Symbol::from_bit(m.get(rank, erased.len()));
        }
    }
    Ok(result_from(word, 1))
}

/// Samples a uniformly random codeword of the graph's code by assigning the
/// free variables of the GF(2) system at random and back-substituting.
pub fn random_codeword(graph: &FactorGraph, rng_seed: u64) -> Vec<bool> {
    use rand::Rng;
    let h = graph.parity_check();
    let n = graph.n_vars;
    let mut m = BitMatrix::zero(h.rows.len(), n);
    for (r, row) in h.rows.iter().enumerate() {
        for &v in row {
            m.flip(r, v as usize);
        }
    }
    let pivots = m.reduce(n);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut rng = crate::rng::from_seed(rng_seed);
    let mut word = vec![false; n];
    for v in 0..n {
        if !pivot_set.contains(&v) {
            word[v] = rng.random();
        }
    }
    for (rank, &col) in pivots.iter().enumerate() {
        let mut acc = false;
        for c in 0..n {
            if c != col && m.get(rank, c) && word[c] {
                acc ^= true;
            }
        }
        word[col] = acc;
    }
    word
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{transmit, Word};
    use crate::ensemble::DegreeDistribution;
    use crate::graphgen::sample_configuration;
    use crate::rng::derive_seed;

    fn single_check() -> FactorGraph {
        FactorGraph {
            n_vars: 3,
            n_checks: 1,
            edges: vec![(0, 0), (1, 0), (2, 0)],
            positions: None,
            window: None,
        }
    }

    #[test]
    fn no_erasures_is_identity_for_all_decoders() {
        let g = single_check();
        let rx = vec![Symbol::One, Symbol::One, Symbol::Zero];
        for result in [
            bp_decode(&g, &rx, 100).unwrap(),
            peel_decode(&g, &rx).unwrap(),
            map_decode(&g, &rx).unwrap(),
        ] {
            assert_eq!(result.word, rx);
            assert!(result.fully_decoded());
        }
        assert_eq!(bp_decode(&g, &rx, 100).unwrap().iterations, 0);
    }

    #[test]
    fn parity_forcing_resolves_single_erasure() {
        let g = single_check();
        let rx = vec![Symbol::One, Symbol::Zero, Symbol::Erased];
        for result in [
            bp_decode(&g, &rx, 100).unwrap(),
            peel_decode(&g, &rx).unwrap(),
            map_decode(&g, &rx).unwrap(),
        ] {
            assert_eq!(result.word[2], Symbol::One);
            assert!(result.fully_decoded());
        }
    }

    #[test]
    fn stopping_set_freezes_peeling() {
        // Two checks, each seeing both erased variables: no degree-one check.
        let g = FactorGraph {
            n_vars: 2,
            n_checks: 2,
            edges: vec![(0, 0), (1, 0), (0, 1), (1, 1)],
            positions: None,
            window: None,
        };
        let rx = vec![Symbol::Erased, Symbol::Erased];
        let peel = peel_decode(&g, &rx).unwrap();
        assert_eq!(peel.erased_set(), vec![0, 1]);
        assert_eq!(peel.iterations, 0);
        let bp = bp_decode(&g, &rx, 100).unwrap();
        assert_eq!(bp.erased_set(), vec![0, 1]);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let g = single_check();
        let rx = vec![Symbol::Zero; 2];
        assert!(matches!(bp_decode(&g, &rx, 10), Err(DecodeError::LengthMismatch { .. })));
        assert!(matches!(peel_decode(&g, &rx), Err(DecodeError::LengthMismatch { .. })));
        assert!(matches!(map_decode(&g, &rx), Err(DecodeError::LengthMismatch { .. })));
    }

    #[test]
    fn peeling_equals_bp_on_random_instances() {
        let dd = DegreeDistribution::regular(3, 6).unwrap();
        for trial in 0..100u64 {
            let g = sample_configuration(&dd, 256, derive_seed(900, trial)).unwrap();
            let rx = transmit(&Word::zero(256), 0.45, derive_seed(901, trial));
            let bp = bp_decode(&g, &rx, 10_000).unwrap();
            let peel = peel_decode(&g, &rx).unwrap();
            assert_eq!(bp.erased_set(), peel.erased_set(), "trial {trial}");
        }
    }

    #[test]
    fn map_dominates_bp_on_random_instances() {
        let dd = DegreeDistribution::regular(3, 6).unwrap();
        for trial in 0..100u64 {
            let g = sample_configuration(&dd, 64, derive_seed(910, trial)).unwrap();
            let rx = transmit(&Word::zero(64), 0.45, derive_seed(911, trial));
            let bp = bp_decode(&g, &rx, 10_000).unwrap();
            let map = map_decode(&g, &rx).unwrap();
            let bp_set: std::collections::HashSet<usize> = bp.erased_set().into_iter().collect();
            for v in map.erased_set() {
                assert!(bp_set.contains(&v), "MAP left {v} erased but BP resolved it");
            }
            if bp.fully_decoded() {
                assert!(map.fully_decoded());
            }
        }
    }

    #[test]
    fn decoders_never_miscorrect_random_codewords() {
        let dd = DegreeDistribution::regular(3, 6).unwrap();
        for trial in 0..20u64 {
            let g = sample_configuration(&dd, 128, derive_seed(920, trial)).unwrap();
            let cw = random_codeword(&g, derive_seed(921, trial));
            // Sanity: it satisfies every check.
            for row in g.parity_check().rows {
                let parity = row.iter().fold(false, |acc, &v| acc ^ cw[v as usize]);
                assert!(!parity);
            }
            let word = Word::from_bits(cw.clone());
            let rx = transmit(&word, 0.4, derive_seed(922, trial));
            for result in [
                bp_decode(&g, &rx, 10_000).unwrap(),
                peel_decode(&g, &rx).unwrap(),
                map_decode(&g, &rx).unwrap(),
            ] {
                for (i, s) in result.word.iter().enumerate() {
                    if let Some(b) = s.bit() {
                        assert_eq!(b, cw[i], "bit {i} miscorrected");
                    }
                }
            }
        }
    }

    #[test]
    fn bp_iteration_count_is_bounded_and_monotone() {
        let dd = DegreeDistribution::regular(3, 6).unwrap();
        for trial in 0..20u64 {
            let n = 256;
            let g = sample_configuration(&dd, n, derive_seed(930, trial)).unwrap();
            let rx = transmit(&Word::zero(n), 0.42, derive_seed(931, trial));
            // Monotonicity: the resolved count after k rounds grows with k
            // and reaches the fixed point within n rounds.
            let mut last = 0;
            let full = bp_decode(&g, &rx, n + 1).unwrap();
            assert!(full.iterations <= n);
            let mut k = 1;
            loop {
                let partial = bp_decode(&g, &rx, k).unwrap();
                assert!(partial.resolved_count >= last);
                last = partial.resolved_count;
                if partial.resolved_count == full.resolved_count {
                    break;
                }
                k += 1;
                assert!(k <= n + 1, "fixed point not reached in n rounds");
            }
        }
    }

    #[test]
    fn duplicate_edges_are_handled_consistently() {
        // Check 0 carries a double edge to v0, so on the socket graph it can
        // never feed v0 or v1 while v0 is erased; over GF(2) the double edge
        // cancels and the reduced row pins v1 directly. MAP then resolves
        // everything through check 1 while BP and peeling stay stuck.
        let g = FactorGraph {
            n_vars: 2,
            n_checks: 2,
            edges: vec![(0, 0), (0, 0), (1, 0), (0, 1), (1, 1)],
            positions: None,
            window: None,
        };
        let rx = vec![Symbol::Erased, Symbol::Erased];
        let bp = bp_decode(&g, &rx, 100).unwrap();
        let peel = peel_decode(&g, &rx).unwrap();
        let map = map_decode(&g, &rx).unwrap();
        assert_eq!(bp.erased_set(), peel.erased_set());
        assert_eq!(bp.erased_set(), vec![0, 1]);
        assert!(map.fully_decoded());
        assert_eq!(map.word, vec![Symbol::Zero, Symbol::Zero]);
    }
}
