//! Edge reconstruction search over sparse 2-connected graphs.
//!
//! The family holds the 2-connected graphs on at most `N` vertices with at
//! most `1 + floor(log2 N!)` edges. Denser graphs are edge reconstructible by
//! a counting argument, so only this family needs checking. Graphs that are
//! detectably edge reconstructible use the default canonical deletion. The
//! rest pick their deletion from the edge deck, so that two graphs with the
//! same deck share a parent; their decks are then compared among siblings.

use std::collections::HashMap;

use crate::canon::{canonical_key, CanonKey};
use crate::engine::{DeletionChoice, DeletionContext, DeletionTag, Family, Node, Tally};
use crate::error::ConfigError;
use crate::graph::{Bits, Ear, Graph, CAP};

/// `1 + floor(log2 N!)`, the bit length of `N!`.
pub fn edge_bound(n: usize) -> usize {
    // 16! < 2^45, so u64 is exact for every supported N.
    let fact: u64 = (1..=n as u64).product();
    (u64::BITS - fact.leading_zeros()) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReconConfig {
    pub max_n: usize,
    pub edge_bound: usize,
}

impl ReconConfig {
    pub fn new(max_n: usize) -> Result<Self, ConfigError> {
        if !(3..=CAP).contains(&max_n) {
            return Err(ConfigError::MaxVertices(max_n));
        }
        Ok(ReconConfig {
            max_n,
            edge_bound: edge_bound(max_n),
        })
    }
}

/// Sorted canonical keys of the edge-deleted subgraphs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeDeck {
    cards: Vec<CanonKey>,
}

impl EdgeDeck {
    pub fn cards(&self) -> &[CanonKey] {
        &self.cards
    }

    pub fn len(&self) -> usize {
        self.cards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cards.is_empty()
    }

    /// Number of distinct cards.
    pub fn distinct(&self) -> usize {
        let mut d = self.cards.clone();
        d.dedup();
        d.len()
    }
}

fn card(g: &Graph, u: usize, v: usize) -> CanonKey {
    let mut h = *g;
    h.delete_edge(u, v);
    canonical_key(&h)
}

pub fn edge_deck(g: &Graph) -> EdgeDeck {
    let mut cards: Vec<CanonKey> = g.edges().map(|(u, v)| card(g, u, v)).collect();
    cards.sort_unstable();
    EdgeDeck { cards }
}

/// Whether `g` (2-connected) meets one of three sufficient conditions for
/// edge reconstructibility: it is regular, it has an ear with two or more
/// internal vertices, or some branch vertex meets only non-trivial ears.
pub fn detectably_reconstructible(g: &Graph) -> bool {
    if g.is_regular() {
        return true;
    }
    let branch = g.branch_mask();
    let low = g.vertex_mask() & !branch;
    // An edge between two degree-2 vertices lies inside a long ear.
    Bits(low).any(|v| g.neighbors(v) & low != 0) || Bits(branch).any(|v| g.neighbors(v) & branch == 0)
}

fn degree_pair(g: &Graph, ear: &Ear) -> (usize, usize) {
    let (a, b) = (g.degree(ear.x()), g.degree(ear.y()));
    (a.min(b), a.max(b))
}

/// The card an ear of order at most one contributes to the deletion rule:
/// `g - e` for a trivial ear, the lesser of its two edge-deleted cards for
/// an ear of order one.
fn ear_card(g: &Graph, ear: &Ear) -> CanonKey {
    match ear.order() {
        0 => card(g, ear.x(), ear.y()),
        1 => {
            let mid = ear.internal().next().expect("order one");
            card(g, ear.x(), mid).min(card(g, mid, ear.y()))
        }
        r => panic!("deck deletion needs an ear of order at most 1, got {r}"),
    }
}

/// Candidates that survive the endpoint-degree filter: among the given ears,
/// those whose endpoint-degree pair is least frequent, ties going to the
/// lexicographically smaller pair.
fn degree_filtered<'a>(g: &Graph, candidates: &'a [Ear]) -> Vec<&'a Ear> {
    let mut freq: HashMap<(usize, usize), usize> = HashMap::new();
    for ear in candidates {
        *freq.entry(degree_pair(g, ear)).or_default() += 1;
    }
    let pick = freq
        .into_iter()
        .min_by_key(|&(pair, count)| (count, pair))
        .map(|(pair, _)| pair)
        .expect("candidates are non-empty");
    candidates.iter().filter(|e| degree_pair(g, e) == pick).collect()
}

fn deck_choices(g: &Graph, candidates: &[Ear]) -> Vec<DeletionChoice> {
    let filtered = degree_filtered(g, candidates);
    let keyed: Vec<(CanonKey, &Ear)> = filtered.into_iter().map(|e| (ear_card(g, e), e)).collect();
    let least = keyed.iter().map(|(k, _)| *k).min().expect("non-empty");
    keyed
        .into_iter()
        .filter(|(k, _)| *k == least)
        .map(|(k, e)| DeletionChoice {
            x: e.x(),
            y: e.y(),
            order: e.order(),
            tag: DeletionTag::Card(k),
        })
        .collect()
}

/// The deck-based canonical deletions of a graph that is not detectably
/// reconstructible. Every returned ear is accepted as canonical: ears that
/// are not automorphic can still leave isomorphic cards. `None` when no ear
/// is deletable.
pub fn canonical_delete_recon<F: Family + ?Sized>(g: &Graph, fam: &F) -> Option<Vec<DeletionChoice>> {
    let ctx = DeletionContext::new(g, fam)?;
    Some(deck_choices(g, ctx.candidates()))
}

/// Pair counts surviving each comparison stage, and the collisions found.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Comparison {
    /// Pairs with equal degree sequences, equal per-card degree sequences,
    /// and equal decks.
    pub stage_pairs: [u64; 3],
    pub collisions: Vec<(Graph, Graph)>,
}

fn pairs_in_groups<K: std::hash::Hash + Eq>(keys: impl Iterator<Item = K>) -> (u64, HashMap<K, Vec<usize>>) {
    let mut groups: HashMap<K, Vec<usize>> = HashMap::new();
    for (i, k) in keys.enumerate() {
        groups.entry(k).or_default().push(i);
    }
    let pairs = groups.values().map(|v| (v.len() * (v.len() - 1) / 2) as u64).sum();
    (pairs, groups)
}

/// Sorted degree-sequence keys of the edge-deleted subgraphs; a function of
/// the deck alone.
fn card_degree_keys(g: &Graph) -> Vec<u128> {
    let mut keys: Vec<u128> = g
        .edges()
        .map(|(u, v)| {
            let mut h = *g;
            h.delete_edge(u, v);
            h.degree_histogram_key()
        })
        .collect();
    keys.sort_unstable();
    keys
}

/// Compare pairwise the graphs of one bucket, which must be pairwise
/// non-isomorphic. Each stage only looks at pairs that passed the one
/// before. Pairs with equal decks are collisions.
pub fn compare_siblings(bucket: &[Graph]) -> Comparison {
    let mut out = Comparison::default();
    if bucket.len() < 2 {
        return out;
    }
    let (p1, groups1) = pairs_in_groups(bucket.iter().map(|g| (g.n(), g.m(), g.degree_histogram_key())));
    out.stage_pairs[0] = p1;
    for group in groups1.values().filter(|v| v.len() > 1) {
        let (p2, groups2) = pairs_in_groups(group.iter().map(|&i| card_degree_keys(&bucket[i])));
        out.stage_pairs[1] += p2;
        for group2 in groups2.values().filter(|v| v.len() > 1) {
            let members: Vec<usize> = group2.iter().map(|&j| group[j]).collect();
            let (p3, groups3) = pairs_in_groups(members.iter().map(|&i| edge_deck(&bucket[i])));
            out.stage_pairs[2] += p3;
            for same in groups3.values().filter(|v| v.len() > 1) {
                for (a, &i) in same.iter().enumerate() {
                    for &j in &same[a + 1..] {
                        out.collisions.push((bucket[members[i]], bucket[members[j]]));
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReconTally {
    /// Children accepted before duplicates were removed.
    pub raw_children: u64,
    /// Accepted children that repeated a sibling's isomorphism class.
    pub duplicates: u64,
    pub detectable: u64,
    /// Children that went into a comparison bucket.
    pub compared: u64,
    pub stage_pairs: [u64; 3],
    pub collisions: Vec<(Graph, Graph)>,
}

impl Tally for ReconTally {
    fn merge(&mut self, other: Self) {
        self.raw_children += other.raw_children;
        self.duplicates += other.duplicates;
        self.detectable += other.detectable;
        self.compared += other.compared;
        for (a, b) in self.stage_pairs.iter_mut().zip(other.stage_pairs) {
            *a += b;
        }
        self.collisions.extend(other.collisions);
    }
}

/// The family of sparse 2-connected graphs, searched for edge-deck
/// collisions.
#[derive(Clone, Debug)]
pub struct EdgeReconstruction {
    cfg: ReconConfig,
}

impl EdgeReconstruction {
    pub fn new(cfg: ReconConfig) -> Self {
        EdgeReconstruction { cfg }
    }

    pub fn config(&self) -> &ReconConfig {
        &self.cfg
    }
}

impl Family for EdgeReconstruction {
    type Tally = ReconTally;

    fn name(&self) -> &str {
        "edge-reconstruction"
    }

    fn max_vertices(&self) -> usize {
        self.cfg.max_n
    }

    fn is_member(&self, g: &Graph) -> bool {
        g.n() <= self.cfg.max_n && g.m() <= self.cfg.edge_bound
    }

    /// The reported count of the family is the graphs with exactly `N`
    /// vertices; smaller graphs are visited but not counted.
    fn is_solution(&self, g: &Graph) -> bool {
        g.n() == self.cfg.max_n
    }

    fn is_canonical_ear(&self, ctx: &mut DeletionContext<'_>, ear: &Ear) -> bool {
        let g = *ctx.graph();
        if detectably_reconstructible(&g) {
            return ctx.default_is_canonical(ear);
        }
        if ear.order() != ctx.order() {
            return false;
        }
        let pair = degree_pair(&g, ear);
        let filtered = degree_filtered(&g, ctx.candidates());
        if degree_pair(&g, filtered[0]) != pair {
            return false;
        }
        if filtered.len() == 1 {
            return true;
        }
        let mine = ear_card(&g, ear);
        filtered.iter().all(|e| e.endpoints() == ear.endpoints() || ear_card(&g, e) >= mine)
    }

    fn on_siblings(&self, _parent: &Graph, children: &mut Vec<Node>, owned: bool, tally: &mut ReconTally) {
        let raw = children.len() as u64;
        let mut seen: HashMap<CanonKey, ()> = HashMap::new();
        let mut bucket = Vec::new();
        let mut detectable = 0;
        children.retain_mut(|node| {
            if detectably_reconstructible(&node.graph) {
                detectable += 1;
                return true;
            }
            let key = node.canon().form.key();
            if seen.insert(key, ()).is_some() {
                return false;
            }
            bucket.push(node.graph);
            true
        });
        if !owned {
            return;
        }
        tally.raw_children += raw;
        tally.duplicates += raw - children.len() as u64;
        tally.detectable += detectable;
        tally.compared += bucket.len() as u64;
        let cmp = compare_siblings(&bucket);
        for (a, b) in tally.stage_pairs.iter_mut().zip(cmp.stage_pairs) {
            *a += b;
        }
        tally.collisions.extend(cmp.collisions);
    }
}
