//! Canonical ear augmentation search.
//!
//! A [`Family`] describes a deletion-closed family of 2-connected graphs. The
//! search starts from each cycle, augments by one ear per (vertex-pair orbit,
//! order), and keeps a child only if the ear just added is equivalent, under
//! the child's automorphism group, to the child's canonical deletion. Every
//! isomorphism class in the family is then visited exactly once, without
//! storing previously seen graphs.

use crate::canon::{canonize, Canon, PairOrbits};
use crate::error::ConfigError;
use crate::graph::{Ear, Graph};

/// Per-worker statistics a family accumulates during a search.
pub trait Tally: Default + Send {
    fn merge(&mut self, other: Self);
}

impl Tally for () {
    fn merge(&mut self, _other: Self) {}
}

/// A search node: a graph plus what is already known about it.
#[derive(Clone, Debug)]
pub struct Node {
    pub graph: Graph,
    /// Canonical form and automorphisms, when acceptance had to compute them.
    pub canon: Option<Canon>,
    /// Order of the ear that produced this node; `None` for root cycles.
    pub ear_order: Option<usize>,
}

impl Node {
    pub fn root(graph: Graph) -> Self {
        Node {
            graph,
            canon: None,
            ear_order: None,
        }
    }

    pub fn canon(&mut self) -> &Canon {
        self.canon.get_or_insert_with(|| canonize(&self.graph))
    }
}

/// A deletion-closed family of 2-connected graphs on at most
/// [`max_vertices`](Family::max_vertices) vertices.
pub trait Family: Sync {
    type Tally: Tally;

    fn name(&self) -> &str;

    fn max_vertices(&self) -> usize;

    /// Cycle lengths the search starts from.
    fn root_cycles(&self) -> Vec<usize> {
        (3..=self.max_vertices()).collect()
    }

    /// Augmentations outside the family are discarded before the canonical
    /// deletion is consulted.
    fn is_member(&self, _g: &Graph) -> bool {
        true
    }

    /// Stop at this node: no solution is reachable below it.
    fn prune(&self, _g: &Graph) -> bool {
        false
    }

    fn is_solution(&self, g: &Graph) -> bool;

    /// Whether `g - ear` stays in the family, beyond 2-connectivity.
    fn deletion_filter(&self, _g: &Graph, _ear: &Ear) -> bool {
        true
    }

    /// Whether `ear` (a minimum-order deletable ear of `ctx.graph()`) is the
    /// canonical deletion up to automorphism. Override to replace the default
    /// rule of least canonical endpoint label.
    fn is_canonical_ear(&self, ctx: &mut DeletionContext<'_>, ear: &Ear) -> bool {
        ctx.default_is_canonical(ear)
    }

    /// Called with the accepted children of one node before they are
    /// searched. `owned` is false when another job also sees this node and
    /// is responsible for recording it.
    fn on_siblings(&self, _parent: &Graph, _children: &mut Vec<Node>, _owned: bool, _tally: &mut Self::Tally) {}
}

/// Tie-break key of a chosen deletion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DeletionTag {
    /// `min(n*pi(x) + pi(y), n*pi(y) + pi(x))` under the canonical labelling.
    Label(usize),
    /// Least canonical card of the ear's edge-deleted subgraphs.
    Card(crate::canon::CanonKey),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DeletionChoice {
    pub x: usize,
    pub y: usize,
    pub order: usize,
    pub tag: DeletionTag,
}

impl DeletionChoice {
    pub fn endpoints(&self) -> (usize, usize) {
        (self.x.min(self.y), self.x.max(self.y))
    }
}

/// The deletable ears of minimum order in a graph, with the graph's
/// canonical form computed on demand.
pub struct DeletionContext<'g> {
    graph: &'g Graph,
    order: usize,
    candidates: Vec<Ear>,
    canon: Option<Canon>,
}

fn is_deletable<F: Family + ?Sized>(fam: &F, g: &Graph, ear: &Ear) -> bool {
    fam.deletion_filter(g, ear) && g.remove_ear(ear).is_two_connected()
}

impl<'g> DeletionContext<'g> {
    /// Collect the minimum-order deletable ears. `None` when no ear is
    /// deletable (cycles, or a dead node of the family).
    pub fn new<F: Family + ?Sized>(g: &'g Graph, fam: &F) -> Option<Self> {
        Self::bounded(g, fam, usize::MAX)
    }

    /// Like [`new`](Self::new) but gives up as soon as a deletable ear of
    /// order below `at_least` exists.
    fn bounded<F: Family + ?Sized>(g: &'g Graph, fam: &F, at_least: usize) -> Option<Self> {
        let mut ears = g.enumerate_ears();
        ears.sort_by_key(Ear::order);
        let mut candidates = Vec::new();
        let mut order = usize::MAX;
        for ear in ears {
            if ear.order() > order {
                break;
            }
            if is_deletable(fam, g, &ear) {
                if ear.order() < at_least && at_least != usize::MAX {
                    return None;
                }
                order = ear.order();
                candidates.push(ear);
            }
        }
        if candidates.is_empty() {
            return None;
        }
        Some(DeletionContext {
            graph: g,
            order,
            candidates,
            canon: None,
        })
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn candidates(&self) -> &[Ear] {
        &self.candidates
    }

    pub fn canon(&mut self) -> &Canon {
        self.canon.get_or_insert_with(|| canonize(self.graph))
    }

    pub fn into_canon(self) -> Option<Canon> {
        self.canon
    }

    /// The least-label candidate under the canonical labelling.
    pub fn default_choice(&mut self) -> DeletionChoice {
        let n = self.graph.n();
        let graph = self.graph;
        let form = &self.canon.get_or_insert_with(|| canonize(graph)).form;
        let label = |e: &Ear| {
            let (px, py) = (form.label(e.x()), form.label(e.y()));
            (n * px + py).min(n * py + px)
        };
        let best = self
            .candidates
            .iter()
            .min_by_key(|e| label(e))
            .expect("context has candidates");
        DeletionChoice {
            x: best.x(),
            y: best.y(),
            order: best.order(),
            tag: DeletionTag::Label(label(best)),
        }
    }

    /// Whether `ear` is equivalent to [`default_choice`](Self::default_choice)
    /// under the automorphism group.
    pub fn default_is_canonical(&mut self, ear: &Ear) -> bool {
        let pair = ear.endpoints();
        if ear.order() != self.order {
            return false;
        }
        // Ears of one order between the same endpoints are interchangeable.
        if self.candidates.iter().all(|c| c.endpoints() == pair) {
            return true;
        }
        let choice = self.default_choice();
        choice.endpoints() == pair
            || self
                .canon()
                .automorphisms
                .same_pair_orbit(pair, choice.endpoints())
    }
}

/// The canonical deletion of `g` in `fam` by the default rule: minimum
/// order, then least canonical endpoint label. `None` for cycles and for
/// graphs with no deletable ear.
pub fn default_canonical_delete<F: Family + ?Sized>(g: &Graph, fam: &F) -> Option<DeletionChoice> {
    DeletionContext::new(g, fam).map(|mut ctx| ctx.default_choice())
}

/// One `(pair-orbit representative, order)` per distinct augmentation of
/// `g` within `max_n` vertices, in representative order then increasing
/// order. Order 0 is skipped on existing edges.
pub fn orbit_augmentations(g: &Graph, orbits: &PairOrbits, max_n: usize) -> Vec<((usize, usize), usize)> {
    let room = max_n.saturating_sub(g.n());
    let mut out = Vec::new();
    for &(x, y) in orbits.representatives() {
        let lowest = if g.has_edge(x, y) { 1 } else { 0 };
        for r in lowest..=room {
            out.push(((x, y), r));
        }
    }
    out
}

/// Acceptance test for a child built by adding `ear` to its parent. On
/// acceptance returns the child's canonical data if it was computed.
pub(crate) fn try_accept<F: Family + ?Sized>(fam: &F, child: &Graph, ear: &Ear) -> Option<Option<Canon>> {
    if !fam.deletion_filter(child, ear) {
        return None;
    }
    let mut ctx = DeletionContext::bounded(child, fam, ear.order())?;
    if ctx.order() != ear.order() {
        return None;
    }
    if fam.is_canonical_ear(&mut ctx, ear) {
        Some(ctx.into_canon())
    } else {
        None
    }
}

/// Whether the augmentation `ear` of `child`'s parent is canonical, so that
/// the search keeps `child`.
pub fn accept_child<F: Family + ?Sized>(fam: &F, child: &Graph, ear: &Ear) -> bool {
    try_accept(fam, child, ear).is_some()
}

/// Deterministic work split: the accepted nodes at `split_depth` (root
/// cycles are depth 0) are numbered in search order and a job keeps those
/// congruent to `residue` modulo `modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JobSpec {
    /// Restrict to the root cycle of this length.
    pub root: Option<usize>,
    pub split_depth: usize,
    pub modulus: usize,
    pub residue: usize,
}

impl JobSpec {
    pub fn new(residue: usize, modulus: usize, split_depth: usize) -> Result<Self, ConfigError> {
        let job = JobSpec {
            root: None,
            split_depth,
            modulus,
            residue,
        };
        job.validate()?;
        Ok(job)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.modulus == 0 {
            return Err(ConfigError::JobModulus);
        }
        if self.residue >= self.modulus {
            return Err(ConfigError::JobResidue {
                residue: self.residue,
                modulus: self.modulus,
            });
        }
        Ok(())
    }
}

/// Search effort counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    /// Nodes expanded (not pruned).
    pub nodes: u64,
    pub pruned: u64,
    /// Augmentations attempted.
    pub augmentations: u64,
    /// Augmentations accepted as canonical.
    pub accepted: u64,
    pub solutions: u64,
}

impl Counters {
    pub fn merge(&mut self, other: &Counters) {
        self.nodes += other.nodes;
        self.pruned += other.pruned;
        self.augmentations += other.augmentations;
        self.accepted += other.accepted;
        self.solutions += other.solutions;
    }
}

#[derive(Debug, Default)]
pub struct RunStats<T> {
    pub counters: Counters,
    pub tally: T,
}

struct Walker<'a, F: Family, S> {
    fam: &'a F,
    max_n: usize,
    job: Option<JobSpec>,
    split_index: u64,
    counters: Counters,
    tally: F::Tally,
    sink: S,
}

impl<F: Family, S: FnMut(&Graph)> Walker<'_, F, S> {
    fn owns(&self, depth: usize) -> bool {
        match self.job {
            Some(job) if depth < job.split_depth => job.residue == 0,
            _ => true,
        }
    }

    /// Whether the job keeps the next node at `depth`.
    fn claim(&mut self, depth: usize) -> bool {
        match self.job {
            Some(job) if depth == job.split_depth => {
                let idx = self.split_index;
                self.split_index += 1;
                idx % job.modulus as u64 == job.residue as u64
            }
            _ => true,
        }
    }

    fn visit(&mut self, mut node: Node, depth: usize) {
        let owned = self.owns(depth);
        let g = node.graph;
        if self.fam.prune(&g) {
            if owned {
                self.counters.pruned += 1;
            }
            return;
        }
        if owned {
            self.counters.nodes += 1;
            if self.fam.is_solution(&g) {
                self.counters.solutions += 1;
                (self.sink)(&g);
            }
        }

        let n = g.n();
        if n == self.max_n && g.m() == n * (n - 1) / 2 {
            return;
        }
        let orbits = PairOrbits::from_generators(n, node.canon().automorphisms.gens());
        let mut children = Vec::new();
        for ((x, y), r) in orbit_augmentations(&g, &orbits, self.max_n) {
            if owned {
                self.counters.augmentations += 1;
            }
            let child = g.augment_unchecked(x, y, r);
            if !self.fam.is_member(&child) {
                continue;
            }
            let internal: Vec<usize> = (n..n + r).collect();
            let ear = Ear::new(x, y, &internal);
            if let Some(canon) = try_accept(self.fam, &child, &ear) {
                if owned {
                    self.counters.accepted += 1;
                }
                children.push(Node {
                    graph: child,
                    canon,
                    ear_order: Some(r),
                });
            }
        }
        drop(orbits);
        node.canon = None;
        self.fam.on_siblings(&g, &mut children, owned, &mut self.tally);
        for child in children {
            if self.claim(depth + 1) {
                self.visit(child, depth + 1);
            }
        }
    }
}

/// Search the subtree rooted at `root`, which must be a member of `fam`.
pub fn search<F: Family>(fam: &F, root: &Graph, sink: impl FnMut(&Graph)) -> RunStats<F::Tally> {
    let mut walker = Walker {
        fam,
        max_n: fam.max_vertices(),
        job: None,
        split_index: 0,
        counters: Counters::default(),
        tally: F::Tally::default(),
        sink,
    };
    walker.visit(Node::root(*root), 0);
    RunStats {
        counters: walker.counters,
        tally: walker.tally,
    }
}

/// Search the whole family from every root cycle, or the part of it
/// selected by `job`.
pub fn run<F: Family>(fam: &F, job: Option<JobSpec>, sink: impl FnMut(&Graph)) -> Result<RunStats<F::Tally>, ConfigError> {
    if let Some(job) = &job {
        job.validate()?;
    }
    let mut walker = Walker {
        fam,
        max_n: fam.max_vertices(),
        job,
        split_index: 0,
        counters: Counters::default(),
        tally: F::Tally::default(),
        sink,
    };
    for k in fam.root_cycles() {
        if job.and_then(|j| j.root).is_some_and(|want| want != k) {
            continue;
        }
        let root = Graph::cycle(k);
        if !fam.is_member(&root) || !walker.claim(0) {
            continue;
        }
        walker.visit(Node::root(root), 0);
    }
    Ok(RunStats {
        counters: walker.counters,
        tally: walker.tally,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_key;
    use std::collections::HashSet;

    /// All 2-connected graphs on at most `max_n` vertices.
    struct AllTwoConnected(usize);

    impl Family for AllTwoConnected {
        type Tally = ();
        fn name(&self) -> &str {
            "all"
        }
        fn max_vertices(&self) -> usize {
            self.0
        }
        fn is_solution(&self, _g: &Graph) -> bool {
            true
        }
    }

    fn diamond() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)]).unwrap()
    }

    fn theta() -> Graph {
        Graph::from_edges(5, &[(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1)]).unwrap()
    }

    fn collect(max_n: usize) -> Vec<Graph> {
        let mut out = Vec::new();
        run(&AllTwoConnected(max_n), None, |g| out.push(*g)).unwrap();
        out
    }

    #[test]
    fn canonical_delete_examples() {
        let fam = AllTwoConnected(8);
        let k4 = default_canonical_delete(&Graph::complete(4), &fam).unwrap();
        assert_eq!(k4.order, 0);
        let t = default_canonical_delete(&theta(), &fam).unwrap();
        assert_eq!(t.order, 1);
        assert!(default_canonical_delete(&Graph::cycle(6), &fam).is_none());
    }

    #[test]
    fn canonical_delete_is_label_invariant() {
        let fam = AllTwoConnected(10);
        let g = Graph::cycle(7).augment_unchecked(0, 3, 1).augment_unchecked(1, 5, 0).augment_unchecked(2, 7, 0);
        let base = {
            let mut ctx = DeletionContext::new(&g, &fam).unwrap();
            let c = ctx.default_choice();
            let ear = ctx.candidates().iter().find(|e| e.endpoints() == c.endpoints()).unwrap().clone();
            canonical_key(&g.remove_ear(&ear))
        };
        let n = g.n();
        for shift in 1..n {
            let p: Vec<usize> = (0..n).map(|v| (v * 3 + shift) % n).collect();
            let h = g.permuted(&p);
            let mut ctx = DeletionContext::new(&h, &fam).unwrap();
            let c = ctx.default_choice();
            let ear = ctx.candidates().iter().find(|e| e.endpoints() == c.endpoints()).unwrap().clone();
            assert_eq!(canonical_key(&h.remove_ear(&ear)), base);
        }
    }

    #[test]
    fn orbit_augmentation_counts() {
        let orbits = |g: &Graph| crate::canon::vertex_pair_orbits(g);
        let c4 = Graph::cycle(4);
        assert_eq!(orbit_augmentations(&c4, &orbits(&c4), 5).len(), 3);
        let k4 = Graph::complete(4);
        assert!(orbit_augmentations(&k4, &orbits(&k4), 4).is_empty());
        let c3 = Graph::cycle(3);
        assert_eq!(orbit_augmentations(&c3, &orbits(&c3), 4), vec![((0, 1), 1)]);
    }

    #[test]
    fn diamond_has_one_canonical_parent() {
        let fam = AllTwoConnected(4);
        // From C4 by a chord.
        let from_c4 = Graph::cycle(4).augment_unchecked(0, 2, 0);
        assert!(accept_child(&fam, &from_c4, &Ear::new(0, 2, &[])));
        // From C3 by an order-1 ear: a trivial ear is deletable, so rejected.
        let from_c3 = Graph::cycle(3).augment_unchecked(0, 1, 1);
        assert!(!accept_child(&fam, &from_c3, &Ear::new(0, 1, &[3])));
        assert_eq!(canonical_key(&from_c4), canonical_key(&from_c3));
    }

    #[test]
    fn k4_generated_once_from_diamond() {
        let d = diamond();
        let orbits = crate::canon::vertex_pair_orbits(&d);
        let accepted = orbit_augmentations(&d, &orbits, 4)
            .into_iter()
            .filter(|&((x, y), r)| accept_child(&AllTwoConnected(4), &d.augment_unchecked(x, y, r), &Ear::new(x, y, &[])))
            .count();
        assert_eq!(accepted, 1);
    }

    #[test]
    fn small_counts() {
        assert_eq!(collect(3).len(), 1);
        assert_eq!(collect(4).len(), 1 + 3);
        let five = collect(5);
        assert_eq!(five.iter().filter(|g| g.n() == 5).count(), 10);
    }

    #[test]
    fn output_is_isomorph_free_and_parents_close() {
        let fam = AllTwoConnected(7);
        let all = collect(7);
        let keys: HashSet<_> = all.iter().map(canonical_key).collect();
        assert_eq!(keys.len(), all.len());
        for g in &all {
            if let Some(choice) = default_canonical_delete(g, &fam) {
                let ctx = DeletionContext::new(g, &fam).unwrap();
                let ear = ctx.candidates().iter().find(|e| e.endpoints() == choice.endpoints()).unwrap();
                assert!(keys.contains(&canonical_key(&g.remove_ear(ear))));
            }
        }
    }

    #[test]
    fn job_split_is_a_partition() {
        let fam = AllTwoConnected(6);
        let mut whole = Vec::new();
        run(&fam, None, |g| whole.push(canonical_key(g))).unwrap();
        whole.sort();
        for modulus in [1, 2, 3, 5] {
            for depth in 0..3 {
                let mut parts = Vec::new();
                for residue in 0..modulus {
                    let job = JobSpec::new(residue, modulus, depth).unwrap();
                    run(&fam, Some(job), |g| parts.push(canonical_key(g))).unwrap();
                }
                parts.sort();
                assert_eq!(parts, whole, "modulus {modulus} depth {depth}");
            }
        }
    }

    #[test]
    fn invalid_job_rejected() {
        assert_eq!(JobSpec::new(4, 4, 1), Err(ConfigError::JobResidue { residue: 4, modulus: 4 }));
        assert_eq!(JobSpec::new(0, 0, 1), Err(ConfigError::JobModulus));
    }
}
