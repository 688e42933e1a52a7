//! Uniquely `K_r`-saturated graphs without a dominating vertex.
//!
//! The search runs over the 2-connected graphs that contain no `K_r` and in
//! which adding any non-edge creates at most one `K_r`. Both conditions
//! survive ear deletion, so the family is closed under the default
//! canonical deletion and any violation prunes the node.

use crate::engine::Family;
use crate::error::{ConfigError, GraphError};
use crate::graph::{low_mask, Bits, Graph, CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SatConfig {
    pub r: usize,
    pub max_n: usize,
    /// Prune every node that has a dominating vertex.
    pub prune_dominating: bool,
}

impl SatConfig {
    pub fn new(r: usize, max_n: usize) -> Result<Self, ConfigError> {
        if r < 3 {
            return Err(ConfigError::CliqueSize(r));
        }
        if !(3..=CAP).contains(&max_n) {
            return Err(ConfigError::MaxVertices(max_n));
        }
        Ok(SatConfig {
            r,
            max_n,
            prune_dominating: true,
        })
    }

    pub fn with_dominating_prune(mut self, on: bool) -> Self {
        self.prune_dominating = on;
        self
    }
}

/// Number of `k`-cliques inside `cand`, counting stops at `cap`.
fn count_cliques(g: &Graph, cand: u16, k: usize, cap: usize) -> usize {
    if k == 0 {
        return 1;
    }
    if (cand.count_ones() as usize) < k {
        return 0;
    }
    let mut total = 0;
    for v in Bits(cand) {
        // Only extend with higher-indexed vertices so each clique counts once.
        let rest = cand & g.neighbors(v) & !low_mask(v + 1);
        total += count_cliques(g, rest, k - 1, cap - total);
        if total >= cap {
            break;
        }
    }
    total
}

fn completions_capped(g: &Graph, u: usize, v: usize, r: usize, cap: usize) -> usize {
    let common = g.neighbors(u) & g.neighbors(v);
    count_cliques(g, common, r - 2, cap)
}

/// Number of copies of `K_r` in `g + uv` that use the new edge `uv`: the
/// `(r-2)`-cliques in the common neighbourhood of `u` and `v`.
pub fn count_kr_completions(g: &Graph, u: usize, v: usize, r: usize) -> Result<usize, GraphError> {
    for w in [u, v] {
        if w >= g.n() {
            return Err(GraphError::VertexOutOfRange { vertex: w, n: g.n() });
        }
    }
    if u == v || g.has_edge(u, v) {
        return Err(GraphError::NotANonEdge { u, v });
    }
    Ok(completions_capped(g, u, v, r.max(2), usize::MAX))
}

pub fn has_clique(g: &Graph, r: usize) -> bool {
    count_cliques(g, g.vertex_mask(), r, 1) > 0
}

pub fn has_dominating_vertex(g: &Graph) -> bool {
    let n = g.n();
    (0..n).any(|v| g.degree(v) + 1 == n)
}

/// No `K_r`, and every non-edge completes at most one `K_r`.
pub fn is_member_u(g: &Graph, r: usize) -> bool {
    !has_clique(g, r) && g.non_edges().all(|(u, v)| completions_capped(g, u, v, r, 2) <= 1)
}

/// No `K_r`, and every non-edge completes exactly one `K_r`.
pub fn is_uniquely_saturated(g: &Graph, r: usize) -> bool {
    !has_clique(g, r) && g.non_edges().all(|(u, v)| completions_capped(g, u, v, r, 2) == 1)
}

fn subsets_of_size(pool: &[usize], k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(pool: &[usize], k: usize, chosen: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if chosen.len() == k {
            f(chosen);
            return;
        }
        for (i, &v) in pool.iter().enumerate() {
            if pool.len() - i < k - chosen.len() {
                break;
            }
            chosen.push(v);
            rec(&pool[i + 1..], k, chosen, f);
            chosen.pop();
        }
    }
    rec(pool, k, &mut Vec::with_capacity(k), f);
}

fn is_clique(g: &Graph, vs: &[usize]) -> bool {
    vs.iter().enumerate().all(|(i, &a)| vs[i + 1..].iter().all(|&b| g.has_edge(a, b)))
}

/// Independent check of unique saturation: for every non-edge, count the
/// `r`-subsets of `g + uv` that span a clique, directly.
pub fn verify_uniquely_saturated(g: &Graph, r: usize) -> bool {
    let all: Vec<usize> = (0..g.n()).collect();
    let mut free = true;
    subsets_of_size(&all, r, &mut |s| free &= !is_clique(g, s));
    if !free {
        return false;
    }
    g.non_edges().all(|(u, v)| {
        let h = g.with_edge(u, v).expect("vertices in range");
        let mut copies = 0;
        subsets_of_size(&all, r, &mut |s| {
            if s.contains(&u) && s.contains(&v) && is_clique(&h, s) {
                copies += 1;
            }
        });
        copies == 1
    })
}

/// Whether removing any `k - 1` vertices leaves a connected graph on at
/// least two vertices. Brute force over vertex subsets.
pub fn is_k_connected(g: &Graph, k: usize) -> bool {
    let n = g.n();
    if n <= k {
        return false;
    }
    let all: Vec<usize> = (0..n).collect();
    let mut ok = true;
    for size in 0..k {
        subsets_of_size(&all, size, &mut |s| {
            if ok {
                let removed = s.iter().fold(0u16, |m, &v| m | 1 << v);
                ok = connected_within(g, g.vertex_mask() & !removed);
            }
        });
    }
    ok
}

fn connected_within(g: &Graph, alive: u16) -> bool {
    if alive == 0 {
        return false;
    }
    let mut seen = 1u16 << alive.trailing_zeros();
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0;
        for v in Bits(frontier) {
            next |= g.neighbors(v) & alive;
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen == alive
}

/// The search family for uniquely `K_r`-saturated graphs with no dominating
/// vertex.
#[derive(Clone, Debug)]
pub struct UniquelySaturated {
    cfg: SatConfig,
}

impl UniquelySaturated {
    pub fn new(cfg: SatConfig) -> Self {
        UniquelySaturated { cfg }
    }

    pub fn config(&self) -> &SatConfig {
        &self.cfg
    }
}

impl Family for UniquelySaturated {
    type Tally = ();

    fn name(&self) -> &str {
        "uniquely-saturated"
    }

    fn max_vertices(&self) -> usize {
        self.cfg.max_n
    }

    fn is_member(&self, g: &Graph) -> bool {
        is_member_u(g, self.cfg.r)
    }

    fn prune(&self, g: &Graph) -> bool {
        (self.cfg.prune_dominating && has_dominating_vertex(g)) || !is_member_u(g, self.cfg.r)
    }

    fn is_solution(&self, g: &Graph) -> bool {
        !has_dominating_vertex(g) && is_uniquely_saturated(g, self.cfg.r)
    }
}

/// Structural summary of a solution: degrees, regularity, dominating
/// vertex, and how many non-edges complete 0, 1 or 2+ copies of `K_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationReport {
    pub degrees: Vec<usize>,
    pub regular: bool,
    pub dominating: bool,
    pub completions: [usize; 3],
}

pub fn saturation_report(g: &Graph, r: usize) -> SaturationReport {
    let mut completions = [0; 3];
    for (u, v) in g.non_edges() {
        completions[completions_capped(g, u, v, r, 2)] += 1;
    }
    SaturationReport {
        degrees: g.degree_sequence(),
        regular: g.is_regular(),
        dominating: has_dominating_vertex(g),
        completions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn book(spine: usize, pages: usize) -> Graph {
        let n = spine + pages;
        let mut edges = Vec::new();
        for s in 0..spine {
            for t in s + 1..n {
                edges.push((s, t));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn completions_examples() {
        let c7 = Graph::cycle(7).complement();
        for (u, v) in c7.non_edges() {
            assert_eq!(count_kr_completions(&c7, u, v, 4).unwrap(), 1);
        }
        let b = book(2, 3);
        assert_eq!(count_kr_completions(&b, 2, 3, 4).unwrap(), 1);
        let c5 = Graph::cycle(5);
        for (u, v) in c5.non_edges() {
            assert_eq!(count_kr_completions(&c5, u, v, 3).unwrap(), 1);
        }
        assert_eq!(
            count_kr_completions(&c5, 0, 1, 3),
            Err(GraphError::NotANonEdge { u: 0, v: 1 })
        );
    }

    #[test]
    fn membership_examples() {
        assert!(!is_member_u(&Graph::complete(4), 4));
        assert!(is_member_u(&Graph::cycle(6), 4));
        assert!(is_member_u(&Graph::cycle(7).complement(), 4));
    }

    #[test]
    fn dominating_examples() {
        assert!(has_dominating_vertex(&book(2, 3)));
        assert!(!has_dominating_vertex(&Graph::cycle(7).complement()));
        assert!(has_dominating_vertex(&Graph::cycle(3)));
    }

    #[test]
    fn unique_saturation_examples() {
        assert!(is_uniquely_saturated(&Graph::cycle(9).complement(), 5));
        assert!(!is_uniquely_saturated(&Graph::cycle(6), 4));
        assert!(is_uniquely_saturated(&Graph::cycle(7).complement(), 4));
        assert!(is_uniquely_saturated(&book(2, 4), 4));
    }

    #[test]
    fn verifier_agrees_on_examples() {
        for (g, r) in [
            (Graph::cycle(9).complement(), 5),
            (Graph::cycle(7).complement(), 4),
            (Graph::cycle(6), 4),
            (book(3, 3), 5),
            (Graph::cycle(5), 3),
            (Graph::complete(4), 4),
        ] {
            assert_eq!(verify_uniquely_saturated(&g, r), is_uniquely_saturated(&g, r), "{g:?} r={r}");
        }
    }

    #[test]
    fn connectivity_brute_force() {
        assert!(is_k_connected(&Graph::cycle(5), 2));
        assert!(!is_k_connected(&Graph::cycle(5), 3));
        assert!(is_k_connected(&Graph::cycle(7).complement(), 2));
        assert!(is_k_connected(&Graph::complete(5), 4));
        assert!(!is_k_connected(&Graph::path(4), 2));
    }

    #[test]
    fn config_rejects_small_r() {
        assert_eq!(SatConfig::new(2, 8), Err(ConfigError::CliqueSize(2)));
    }
}
