//! Signed interaction graphs, structural balance, and signed monotonicity.
//!
//! An edge `j -> i` with sign `+`/`-` records that `f_i` is globally
//! nondecreasing/nonincreasing in `x_j`. The graph is structurally balanced
//! when the vertices split into two classes with positive edges inside and
//! negative edges across — equivalently, when every cycle of the underlying
//! undirected signed graph has an even number of negative edges. A balanced
//! graph yields a signature `sigma` under which all rates are signed
//! monotone; a frustrated one yields a witness cycle of odd negative
//! parity.

use crate::network::{Network, State};
use crate::rate_expr::Sign;
use crate::sim::signed_le;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeSign {
    Positive,
    Negative,
}

/// A regulation edge: component `from` regulates the birth rate of `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub sign: EdgeSign,
}

#[derive(Debug, Clone, Serialize)]
pub struct SignedGraph {
    pub n: usize,
    pub edges: Vec<Edge>,
    /// Dependencies whose direction the sign calculus could not certify.
    pub nonmonotone_edges: Vec<(usize, usize)>,
}

/// Balance decision: either a signature or a frustrated cycle.
#[derive(Debug, Clone, Serialize)]
pub struct BalanceResult {
    pub balanced: bool,
    /// Signature with the lowest-indexed vertex of each connected part set
    /// to +1; `None` when frustrated.
    pub sigma: Option<Vec<i8>>,
    /// A cycle with an odd number of negative edges; `None` when balanced.
    pub witness: Option<Vec<Edge>>,
}

#[derive(Debug, Error)]
pub enum SignedGraphError {
    #[error("edges without certified monotone direction block the balance check: {0:?}")]
    NonMonotone(Vec<(usize, usize)>),
}

/// Read the interaction graph off the rate expressions: an edge `j -> i`
/// exists wherever `f_i` depends on `x_j`, signed by the sign calculus.
pub fn extract_signed_graph(net: &Network) -> SignedGraph {
    let n = net.n();
    let mut edges = Vec::new();
    let mut nonmonotone = Vec::new();
    for (i, rate) in net.rates.iter().enumerate() {
        let signs = rate.monotonicity();
        for (j, sign) in signs.signs.iter().enumerate() {
            match sign {
                Sign::Zero => {}
                Sign::Inc => edges.push(Edge {
                    from: j,
                    to: i,
                    sign: EdgeSign::Positive,
                }),
                Sign::Dec => edges.push(Edge {
                    from: j,
                    to: i,
                    sign: EdgeSign::Negative,
                }),
                Sign::Unknown => nonmonotone.push((j, i)),
            }
        }
    }
    SignedGraph {
        n,
        edges,
        nonmonotone_edges: nonmonotone,
    }
}

/// Decide structural balance over the underlying undirected signed graph by
/// parity union-find: each edge constrains `sigma_from * sigma_to` to its
/// sign; the first contradiction yields a frustrated cycle assembled from
/// previously accepted edges.
pub fn check_structural_balance(g: &SignedGraph) -> Result<BalanceResult, SignedGraphError> {
    if !g.nonmonotone_edges.is_empty() {
        return Err(SignedGraphError::NonMonotone(g.nonmonotone_edges.clone()));
    }
    let n = g.n;
    let mut parent: Vec<usize> = (0..n).collect();
    // parity[v]: 0 if sigma_v agrees with its representative, 1 if flipped
    let mut parity: Vec<u8> = vec![0; n];
    let mut accepted: Vec<Edge> = Vec::new();

    fn find(parent: &mut [usize], parity: &mut [u8], v: usize) -> (usize, u8) {
        if parent[v] == v {
            return (v, 0);
        }
        let (root, p) = find(parent, parity, parent[v]);
        parent[v] = root;
        parity[v] ^= p;
        (root, parity[v])
    }

    for e in &g.edges {
        let need = match e.sign {
            EdgeSign::Positive => 0u8,
            EdgeSign::Negative => 1u8,
        };
        let (ra, pa) = find(&mut parent, &mut parity, e.from);
        let (rb, pb) = find(&mut parent, &mut parity, e.to);
        if ra == rb {
            if pa ^ pb != need {
                // frustrated: close the cycle through accepted edges
                let path = edge_path(n, &accepted, e.from, e.to)
                    .expect("conflicting endpoints are connected");
                let mut cycle = path;
                cycle.push(*e);
                let negatives = cycle
                    .iter()
                    .filter(|c| c.sign == EdgeSign::Negative)
                    .count();
                debug_assert_eq!(negatives % 2, 1);
                return Ok(BalanceResult {
                    balanced: false,
                    sigma: None,
                    witness: Some(cycle),
                });
            }
            accepted.push(*e); // consistent chord
        } else {
            // attach ra under rb with the parity that satisfies the edge
            parent[ra] = rb;
            parity[ra] = pa ^ pb ^ need;
            accepted.push(*e);
        }
    }

    // canonical signature: +1 at the lowest-indexed vertex of each part
    let mut sigma = vec![0i8; n];
    let mut root_anchor_parity: Vec<Option<u8>> = vec![None; n];
    for v in 0..n {
        let (root, p) = find(&mut parent, &mut parity, v);
        let anchor = root_anchor_parity[root].get_or_insert(p);
        sigma[v] = if p == *anchor { 1 } else { -1 };
    }
    Ok(BalanceResult {
        balanced: true,
        sigma: Some(sigma),
        witness: None,
    })
}

/// Undirected BFS path between two vertices through the given edges.
fn edge_path(n: usize, edges: &[Edge], from: usize, to: usize) -> Option<Vec<Edge>> {
    let mut adj: Vec<Vec<(usize, Edge)>> = vec![Vec::new(); n];
    for e in edges {
        adj[e.from].push((e.to, *e));
        adj[e.to].push((e.from, *e));
    }
    let mut prev: Vec<Option<(usize, Edge)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    seen[from] = true;
    queue.push_back(from);
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = Vec::new();
            let mut cur = to;
            while cur != from {
                let (p, e) = prev[cur].unwrap();
                path.push(e);
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        for &(w, e) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some((v, e));
                queue.push_back(w);
            }
        }
    }
    None
}

/// Sampled check of signed monotonicity: draw ordered pairs `x <=_sigma y`
/// in the box and return the worst value of
/// `sigma_i (f_i(x_{-i}) - f_i(y_{-i}))` over samples and components.
/// Nonpositive means no violation was found.
pub fn verify_signed_monotonicity(
    net: &Network,
    sigma: &[i8],
    sample_box: &[u32],
    n_samples: usize,
) -> Result<f64, crate::rate_expr::EvalError> {
    use rand::{Rng, SeedableRng};
    let n = net.n();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x0bdeb10c);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..n_samples {
        let mut x = vec![0u32; n];
        let mut y = vec![0u32; n];
        for k in 0..n {
            let a = rng.gen_range(0..=sample_box[k]);
            if sigma[k] >= 0 {
                x[k] = a;
                y[k] = rng.gen_range(a..=sample_box[k]);
            } else {
                x[k] = a;
                y[k] = rng.gen_range(0..=a);
            }
        }
        debug_assert!(signed_le(sigma, &State(x.clone()), &State(y.clone())));
        for i in 0..n {
            let fx = net.rates[i].eval(&x)?;
            let fy = net.rates[i].eval(&y)?;
            worst = worst.max(sigma[i] as f64 * (fx - fy));
        }
    }
    Ok(worst)
}

/// DOT rendering with `sign` edge attributes.
pub fn to_dot(g: &SignedGraph) -> String {
    let mut out = String::from("digraph interactions {\n");
    for v in 0..g.n {
        out.push_str(&format!("  x{};\n", v + 1));
    }
    for e in &g.edges {
        let sign = match e.sign {
            EdgeSign::Positive => "+",
            EdgeSign::Negative => "-",
        };
        out.push_str(&format!(
            "  x{} -> x{} [sign=\"{}\"];\n",
            e.from + 1,
            e.to + 1,
            sign
        ));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn balanced_three_node() -> Network {
        Network::from_parts(
            "balanced-three-node",
            vec![1.0, 1.0, 1.0],
            &[
                "1 + 4*hill_rep(x3, 2, 2)",
                "1 + 4*hill_rep(x1, 2, 2) + 2*hill_act(x3, 2, 2)",
                "1 + 3*hill_act(x2, 2, 2)",
            ],
        )
        .unwrap()
    }

    fn repressilator() -> Network {
        Network::from_parts(
            "repressilator",
            vec![1.0, 1.0, 1.0],
            &[
                "1 + 8*hill_rep(x3, 4, 2)",
                "1 + 8*hill_rep(x1, 4, 2)",
                "1 + 8*hill_rep(x2, 4, 2)",
            ],
        )
        .unwrap()
    }

    #[test]
    fn extracts_three_node_example_edges() {
        let g = extract_signed_graph(&balanced_three_node());
        let mut edges: Vec<(usize, usize, EdgeSign)> =
            g.edges.iter().map(|e| (e.from + 1, e.to + 1, e.sign)).collect();
        edges.sort_by_key(|&(f, t, _)| (f, t));
        assert_eq!(
            edges,
            vec![
                (1, 2, EdgeSign::Negative),
                (2, 3, EdgeSign::Positive),
                (3, 1, EdgeSign::Negative),
                (3, 2, EdgeSign::Positive),
            ]
        );
        assert!(g.nonmonotone_edges.is_empty());
    }

    #[test]
    fn repressilator_is_a_negative_three_cycle() {
        let g = extract_signed_graph(&repressilator());
        assert_eq!(g.edges.len(), 3);
        assert!(g.edges.iter().all(|e| e.sign == EdgeSign::Negative));
    }

    #[test]
    fn constant_rates_have_empty_graph() {
        let net = Network::from_parts("c", vec![1.0, 1.0, 1.0], &["1", "2", "3"]).unwrap();
        let g = extract_signed_graph(&net);
        assert!(g.edges.is_empty());
        let res = check_structural_balance(&g).unwrap();
        assert!(res.balanced);
        assert_eq!(res.sigma.unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn three_node_example_is_balanced_with_expected_signature() {
        let g = extract_signed_graph(&balanced_three_node());
        let res = check_structural_balance(&g).unwrap();
        assert!(res.balanced);
        assert_eq!(res.sigma.unwrap(), vec![1, -1, -1]);
    }

    #[test]
    fn repressilator_is_frustrated_with_odd_witness() {
        let g = extract_signed_graph(&repressilator());
        let res = check_structural_balance(&g).unwrap();
        assert!(!res.balanced);
        let witness = res.witness.unwrap();
        assert_eq!(witness.len(), 3);
        let negatives = witness
            .iter()
            .filter(|e| e.sign == EdgeSign::Negative)
            .count();
        assert_eq!(negatives % 2, 1);
    }

    #[test]
    fn two_cycle_with_mixed_signs_is_frustrated() {
        let net = Network::from_parts(
            "mixed-two-cycle",
            vec![1.0, 1.0],
            &["1 + hill_act(x2, 2, 1)", "1 + hill_rep(x1, 2, 1)"],
        )
        .unwrap();
        let g = extract_signed_graph(&net);
        let res = check_structural_balance(&g).unwrap();
        assert!(!res.balanced);
        let witness = res.witness.unwrap();
        assert_eq!(witness.len(), 2);
    }

    #[test]
    fn unknown_direction_blocks_balance() {
        let net = Network::from_parts(
            "odd",
            vec![1.0, 1.0],
            &["x2 + hill_rep(x2, 1, 1)", "1"],
        )
        .unwrap();
        let g = extract_signed_graph(&net);
        assert_eq!(g.nonmonotone_edges, vec![(1, 0)]);
        assert!(matches!(
            check_structural_balance(&g),
            Err(SignedGraphError::NonMonotone(_))
        ));
    }

    #[test]
    fn mutual_repression_signature() {
        let net =
            Network::from_parts("mr", vec![1.0, 1.0], &["1+5/(1+x2)", "1+5/(1+x1)"]).unwrap();
        let g = extract_signed_graph(&net);
        let res = check_structural_balance(&g).unwrap();
        assert!(res.balanced);
        assert_eq!(res.sigma.unwrap(), vec![1, -1]);
    }

    #[test]
    fn monotonicity_verifier_agrees_with_balance() {
        let net = balanced_three_node();
        let worst =
            verify_signed_monotonicity(&net, &[1, -1, -1], &[30, 30, 30], 10_000).unwrap();
        assert!(worst <= 0.0, "violation {worst}");
        // global flip is also valid
        let worst =
            verify_signed_monotonicity(&net, &[-1, 1, 1], &[30, 30, 30], 10_000).unwrap();
        assert!(worst <= 0.0);
    }

    #[test]
    fn monotonicity_verifier_finds_repressilator_violation() {
        let net = repressilator();
        let worst =
            verify_signed_monotonicity(&net, &[1, -1, -1], &[30, 30, 30], 10_000).unwrap();
        assert!(worst > 0.0, "a violation pair must exist");
    }

    #[test]
    fn constant_network_never_violates() {
        let net = Network::from_parts("c", vec![1.0, 1.0], &["2", "3"]).unwrap();
        let worst = verify_signed_monotonicity(&net, &[1, -1], &[20, 20], 1000).unwrap();
        assert_eq!(worst, 0.0);
    }

    #[test]
    fn dot_export_mentions_signs() {
        let g = extract_signed_graph(&repressilator());
        let dot = to_dot(&g);
        assert!(dot.contains("x3 -> x1 [sign=\"-\"]"));
    }
}
