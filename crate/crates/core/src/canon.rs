//! Canonical labelling, automorphism generators and vertex-pair orbits.
//!
//! The labelling is computed by individualization-refinement: vertices are
//! first partitioned by degree, the ordered partition is refined to an
//! equitable one by neighbour counts, and the search branches on the first
//! smallest non-singleton cell. Every discrete leaf yields a relabelled
//! adjacency string; the canonical leaf is the least `(trace, string)` pair
//! where the trace is a hash of the refinement history along the path.
//! Leaves with equal strings give automorphisms, which prune the search.

use std::cmp::Ordering;

use crate::graph::{low_mask, Bits, Graph, CAP};

/// A vertex permutation; entry `v` is the image of `v`.
pub type Perm = [u8; CAP];

fn identity() -> Perm {
    let mut p = [0u8; CAP];
    for (i, x) in p.iter_mut().enumerate() {
        *x = i as u8;
    }
    p
}

/// Label-invariant certificate of an isomorphism class.
///
/// Two graphs have equal keys exactly when they are isomorphic. Keys are
/// totally ordered (vertex count first) so they can be sorted and compared
/// as canonical strings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonKey {
    n: u8,
    bits: u128,
}

impl CanonKey {
    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Rebuild the canonically labelled graph this key describes.
    pub fn to_graph(&self) -> Graph {
        let n = self.n();
        let mut rows = [0u16; CAP];
        let mut rest = self.bits;
        // Rows were appended in increasing order; peel them off from the back.
        for j in (1..n).rev() {
            let row = (rest & ((1u128 << j) - 1)) as u16;
            rest >>= j;
            rows[j] |= row;
            for i in Bits(row) {
                rows[i] |= 1 << j;
            }
        }
        Graph::from_rows(n, &rows)
    }
}

/// A canonical labelling of one graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    key: CanonKey,
    perm: Perm,
}

impl CanonicalForm {
    pub fn key(&self) -> CanonKey {
        self.key
    }

    /// Canonical label of vertex `v`.
    #[inline]
    pub fn label(&self, v: usize) -> usize {
        self.perm[v] as usize
    }

    /// The canonical labelling `v -> label(v)`.
    pub fn perm(&self) -> &[u8] {
        &self.perm[..self.key.n()]
    }

    /// The canonically relabelled graph.
    pub fn canonical_graph(&self) -> Graph {
        self.key.to_graph()
    }

    /// Packed upper-triangle adjacency of the canonical graph (graph6 bytes).
    pub fn bytes(&self) -> Vec<u8> {
        crate::graph6::encode(&self.canonical_graph()).into_bytes()
    }
}

/// Generators of the automorphism group of a graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AutomorphismGens {
    n: usize,
    gens: Vec<Perm>,
}

impl AutomorphismGens {
    pub fn new(n: usize, gens: Vec<Perm>) -> Self {
        AutomorphismGens { n, gens }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gens(&self) -> &[Perm] {
        &self.gens
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Order of the generated group, by closure. Intended for small groups.
    pub fn group_order(&self) -> usize {
        let n = self.n;
        let id = identity();
        let mut seen = std::collections::HashSet::new();
        seen.insert(id);
        let mut frontier = vec![id];
        while let Some(p) = frontier.pop() {
            for g in &self.gens {
                let mut q = id;
                for v in 0..n {
                    q[v] = g[p[v] as usize];
                }
                if seen.insert(q) {
                    frontier.push(q);
                }
            }
        }
        seen.len()
    }

    /// Whether some product of generators maps pair `a` onto pair `b`.
    pub fn same_pair_orbit(&self, a: (usize, usize), b: (usize, usize)) -> bool {
        let norm = |(x, y): (usize, usize)| (x.min(y), x.max(y));
        let (a, b) = (norm(a), norm(b));
        if a == b {
            return true;
        }
        if self.gens.is_empty() {
            return false;
        }
        let mut seen = [0u16; CAP];
        seen[a.0] |= 1 << a.1;
        let mut stack = vec![a];
        while let Some((x, y)) = stack.pop() {
            for g in &self.gens {
                let img = norm((g[x] as usize, g[y] as usize));
                if img == b {
                    return true;
                }
                if seen[img.0] >> img.1 & 1 == 0 {
                    seen[img.0] |= 1 << img.1;
                    stack.push(img);
                }
            }
        }
        false
    }
}

/// Canonical form together with automorphism generators; both come out of
/// the same search.
#[derive(Clone, Debug)]
pub struct Canon {
    pub form: CanonicalForm,
    pub automorphisms: AutomorphismGens,
}

pub fn canonize(g: &Graph) -> Canon {
    Searcher::new(g).run()
}

pub fn canonical_form(g: &Graph) -> CanonicalForm {
    canonize(g).form
}

pub fn canonical_key(g: &Graph) -> CanonKey {
    canonize(g).form.key
}

pub fn automorphism_generators(g: &Graph) -> AutomorphismGens {
    canonize(g).automorphisms
}

pub fn vertex_pair_orbits(g: &Graph) -> PairOrbits {
    PairOrbits::from_generators(g.n(), automorphism_generators(g).gens())
}

/// Disjoint sets over a small index range.
#[derive(Clone, Debug)]
pub(crate) struct DisjointSet {
    parent: Vec<u8>,
}

impl DisjointSet {
    pub(crate) fn new(len: usize) -> Self {
        DisjointSet {
            parent: (0..len).map(|i| i as u8).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] as usize != i {
            let up = self.parent[i] as usize;
            self.parent[i] = self.parent[up];
            i = up;
        }
        i
    }

    /// Merge two classes; the smaller index becomes the root.
    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.parent[hi] = lo as u8;
        }
    }
}

#[inline]
fn pair_index(x: usize, y: usize) -> usize {
    let (a, b) = (x.min(y), x.max(y));
    b * (b - 1) / 2 + a
}

/// Orbits of unordered vertex pairs under an automorphism group.
#[derive(Clone, Debug)]
pub struct PairOrbits {
    n: usize,
    orbit_id: Vec<u8>,
    reps: Vec<(usize, usize)>,
}

impl PairOrbits {
    pub fn from_generators(n: usize, gens: &[Perm]) -> Self {
        let total = n * n.saturating_sub(1) / 2;
        let mut sets = DisjointSet::new(total);
        for g in gens {
            for y in 1..n {
                for x in 0..y {
                    sets.union(pair_index(x, y), pair_index(g[x] as usize, g[y] as usize));
                }
            }
        }
        let mut orbit_id = vec![u8::MAX; total];
        let mut root_id = vec![u8::MAX; total];
        let mut reps = Vec::new();
        // Representatives are the lexicographically first pairs of each orbit.
        for x in 0..n {
            for y in x + 1..n {
                let idx = pair_index(x, y);
                let root = sets.find(idx);
                if root_id[root] == u8::MAX {
                    root_id[root] = reps.len() as u8;
                    reps.push((x, y));
                }
                orbit_id[idx] = root_id[root];
            }
        }
        PairOrbits { n, orbit_id, reps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// One pair per orbit, in lexicographic order of the representatives.
    pub fn representatives(&self) -> &[(usize, usize)] {
        &self.reps
    }

    pub fn orbit_of(&self, x: usize, y: usize) -> usize {
        self.orbit_id[pair_index(x, y)] as usize
    }

    pub fn orbit_size(&self, orbit: usize) -> usize {
        self.orbit_id.iter().filter(|&&o| o as usize == orbit).count()
    }
}

// ---------------------------------------------------------------------------
// Individualization-refinement search
// ---------------------------------------------------------------------------

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;

#[inline]
fn mix(h: u64, x: u64) -> u64 {
    (h ^ x).wrapping_mul(0x0000_0100_0000_01b3)
}

/// Ordered partition of the vertices: `lab` lists vertices by position and
/// bit `p` of `starts` marks the first position of a cell.
#[derive(Clone, Copy)]
struct Partition {
    lab: [u8; CAP],
    starts: u16,
    n: u8,
}

impl Partition {
    #[inline]
    fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    fn cell_end(&self, s: usize) -> usize {
        let rest = self.starts & !low_mask(s + 1);
        if rest == 0 {
            self.n()
        } else {
            rest.trailing_zeros() as usize
        }
    }

    #[inline]
    fn cell_mask(&self, s: usize, e: usize) -> u16 {
        self.lab[s..e].iter().fold(0, |m, &v| m | 1 << v)
    }

    #[inline]
    fn is_discrete(&self) -> bool {
        self.starts.count_ones() as usize == self.n()
    }

    /// Degree-ordered initial partition.
    fn by_degree(g: &Graph) -> Self {
        let n = g.n();
        let mut lab = [0u8; CAP];
        let mut deg = [0u8; CAP];
        for v in 0..n {
            lab[v] = v as u8;
            deg[v] = g.degree(v) as u8;
        }
        lab[..n].sort_by_key(|&v| deg[v as usize]);
        let mut starts = if n > 0 { 1u16 } else { 0 };
        for p in 1..n {
            if deg[lab[p] as usize] != deg[lab[p - 1] as usize] {
                starts |= 1 << p;
            }
        }
        Partition {
            lab,
            starts,
            n: n as u8,
        }
    }

    /// Refine to the coarsest equitable partition below this one, using the
    /// cells starting at the positions in `queue` as initial splitters.
    /// Returns a hash of the splitting history.
    fn refine(&mut self, g: &Graph, mut queue: u16) -> u64 {
        let n = self.n();
        let mut trace = FNV_OFFSET;
        let mut counts = [0u8; CAP];
        while queue != 0 && !self.is_discrete() {
            let s = queue.trailing_zeros() as usize;
            queue &= queue - 1;
            let splitter = self.cell_mask(s, self.cell_end(s));
            let mut c = 0;
            while c < n {
                let e = self.cell_end(c);
                if e - c > 1 {
                    let mut uniform = true;
                    for p in c..e {
                        counts[p] = (g.neighbors(self.lab[p] as usize) & splitter).count_ones() as u8;
                        uniform &= counts[p] == counts[c];
                    }
                    if !uniform {
                        // Insertion sort of the cell by count.
                        for p in c + 1..e {
                            let (v, k) = (self.lab[p], counts[p]);
                            let mut q = p;
                            while q > c && counts[q - 1] > k {
                                self.lab[q] = self.lab[q - 1];
                                counts[q] = counts[q - 1];
                                q -= 1;
                            }
                            self.lab[q] = v;
                            counts[q] = k;
                        }
                        trace = mix(trace, (s as u64) << 8 | c as u64);
                        queue |= 1 << c;
                        let mut frag = c;
                        for p in c + 1..=e {
                            if p == e || counts[p] != counts[p - 1] {
                                trace = mix(trace, (counts[frag] as u64) << 8 | (p - frag) as u64);
                                if p < e {
                                    self.starts |= 1 << p;
                                    queue |= 1 << p;
                                }
                                frag = p;
                            }
                        }
                    }
                }
                c = e;
            }
        }
        mix(trace, self.starts.count_ones() as u64)
    }

    /// Split `v` off the front of its cell. Returns the cell's start.
    fn individualize(&mut self, v: usize) -> usize {
        let pos = self.lab[..self.n()].iter().position(|&w| w as usize == v).expect("vertex in partition");
        let s = (self.starts & low_mask(pos + 1)).ilog2() as usize;
        self.lab.swap(s, pos);
        self.starts |= 1 << (s + 1);
        s
    }

    /// Adjacency string of the graph relabelled by position.
    fn leaf_key(&self, g: &Graph) -> u128 {
        let n = self.n();
        let mut inv = [0u8; CAP];
        for (p, &v) in self.lab[..n].iter().enumerate() {
            inv[v as usize] = p as u8;
        }
        let mut key = 0u128;
        for j in 1..n {
            let mut row = 0u16;
            for w in Bits(g.neighbors(self.lab[j] as usize)) {
                row |= 1 << inv[w];
            }
            key = key << j | (row & low_mask(j)) as u128;
        }
        key
    }
}

#[derive(Clone)]
struct Leaf {
    key: u128,
    lab: [u8; CAP],
    path: [u8; CAP],
    depth: usize,
    traces: [u64; CAP + 1],
}

struct Searcher<'a> {
    g: &'a Graph,
    first: Option<Leaf>,
    best: Option<Leaf>,
    best_version: u32,
    gens: Vec<Perm>,
    path: [u8; CAP],
    traces: [u64; CAP + 1],
}

impl<'a> Searcher<'a> {
    fn new(g: &'a Graph) -> Self {
        Searcher {
            g,
            first: None,
            best: None,
            best_version: 0,
            gens: Vec::new(),
            path: [0; CAP],
            traces: [0; CAP + 1],
        }
    }

    fn run(mut self) -> Canon {
        let g = self.g;
        let n = g.n();
        let mut root = Partition::by_degree(g);
        let queue = root.starts;
        let trace = root.refine(g, queue);
        self.visit(root, 0, trace, true, Ordering::Equal);

        let best = self.best.expect("search reaches a leaf");
        let mut perm = identity();
        for (p, &v) in best.lab[..n].iter().enumerate() {
            perm[v as usize] = p as u8;
        }
        Canon {
            form: CanonicalForm {
                key: CanonKey {
                    n: n as u8,
                    bits: best.key,
                },
                perm,
            },
            automorphisms: AutomorphismGens::new(n, self.gens),
        }
    }

    fn record_leaf(&self, part: &Partition, key: u128, depth: usize) -> Leaf {
        Leaf {
            key,
            lab: part.lab,
            path: self.path,
            depth,
            traces: self.traces,
        }
    }

    /// Map the vertices of `from` position-wise onto `to`; an automorphism
    /// whenever both leaves have the same key.
    fn add_automorphism(&mut self, from: &[u8; CAP], to: &[u8; CAP]) {
        let n = self.g.n();
        let mut gamma = identity();
        for p in 0..n {
            gamma[from[p] as usize] = to[p];
        }
        if gamma != identity() && !self.gens.contains(&gamma) {
            self.gens.push(gamma);
        }
    }

    fn common_prefix(a: &[u8; CAP], b: &[u8; CAP], depth: usize) -> usize {
        (0..depth).take_while(|&i| a[i] == b[i]).count()
    }

    /// Whether `v` is the least vertex of its orbit under the automorphisms
    /// found so far that fix the current path pointwise.
    fn is_orbit_min(&self, v: usize, level: usize) -> bool {
        let n = self.g.n();
        let mut sets = DisjointSet::new(n);
        let prefix = &self.path[..level];
        let mut any = false;
        for g in &self.gens {
            if prefix.iter().all(|&w| g[w as usize] == w) {
                any = true;
                for (u, &img) in g.iter().enumerate().take(n) {
                    sets.union(u, img as usize);
                }
            }
        }
        !any || sets.find(v) == v
    }

    fn visit(
        &mut self,
        part: Partition,
        level: usize,
        trace: u64,
        eq_first: bool,
        cmp_best: Ordering,
    ) -> Option<usize> {
        self.traces[level] = trace;
        let eq_first = eq_first
            && match &self.first {
                None => true,
                Some(f) => f.depth >= level && f.traces[level] == trace,
            };
        let cmp_best = match (&self.best, cmp_best) {
            (Some(b), Ordering::Equal) => {
                if b.depth >= level {
                    trace.cmp(&b.traces[level])
                } else {
                    Ordering::Greater
                }
            }
            (_, c) => c,
        };
        if !eq_first && cmp_best == Ordering::Greater {
            return None;
        }

        if part.is_discrete() {
            let key = part.leaf_key(self.g);
            let Some(first) = &self.first else {
                let leaf = self.record_leaf(&part, key, level);
                self.first = Some(leaf.clone());
                self.best = Some(leaf);
                self.best_version += 1;
                return None;
            };
            if eq_first && key == first.key {
                let (lab, path) = (first.lab, first.path);
                self.add_automorphism(&lab, &part.lab);
                return Some(Self::common_prefix(&path, &self.path, level));
            }
            let best = self.best.as_ref().expect("best set with first");
            let verdict = match cmp_best {
                Ordering::Equal => key.cmp(&best.key),
                c => c,
            };
            match verdict {
                Ordering::Less => {
                    self.best = Some(self.record_leaf(&part, key, level));
                    self.best_version += 1;
                }
                Ordering::Equal => {
                    let (lab, path) = (best.lab, best.path);
                    self.add_automorphism(&lab, &part.lab);
                    return Some(Self::common_prefix(&path, &self.path, level));
                }
                Ordering::Greater => {}
            }
            return None;
        }

        // Target: first smallest non-singleton cell.
        let n = part.n();
        let (mut target, mut target_len) = (0, usize::MAX);
        let mut c = 0;
        while c < n {
            let e = part.cell_end(c);
            if e - c > 1 && e - c < target_len {
                target = c;
                target_len = e - c;
            }
            c = e;
        }
        let cell = part.cell_mask(target, target + target_len);
        let entry_version = self.best_version;
        for v in Bits(cell) {
            if !self.is_orbit_min(v, level) {
                continue;
            }
            let mut child = part;
            let s = child.individualize(v);
            let t = child.refine(self.g, 1 << s);
            self.path[level] = v as u8;
            // A new best found below this node shares this node's prefix.
            let cmp_here = if self.best_version != entry_version {
                Ordering::Equal
            } else {
                cmp_best
            };
            if let Some(back) = self.visit(child, level + 1, t, eq_first, cmp_here) {
                if back < level {
                    return Some(back);
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diamond() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)]).unwrap()
    }

    fn all_graphs(n: usize) -> Vec<Graph> {
        let pairs: Vec<(usize, usize)> = Graph::complete(n).edges().collect();
        (0u32..1 << pairs.len())
            .map(|mask| {
                let edges: Vec<_> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                Graph::from_edges(n, &edges).unwrap()
            })
            .collect()
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        fn rec(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
            if prefix.len() == n {
                out.push(prefix.clone());
                return;
            }
            for v in 0..n {
                if !prefix.contains(&v) {
                    prefix.push(v);
                    rec(prefix, n, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), n, &mut out);
        out
    }

    fn brute_aut_order(g: &Graph) -> usize {
        permutations(g.n()).iter().filter(|p| g.permuted(p) == *g).count()
    }

    #[test]
    fn four_vertex_classes() {
        let keys: std::collections::HashSet<_> = all_graphs(4).iter().map(canonical_key).collect();
        assert_eq!(keys.len(), 11);
        let two_conn: std::collections::HashSet<_> = all_graphs(4)
            .iter()
            .filter(|g| g.is_two_connected())
            .map(canonical_key)
            .collect();
        assert_eq!(two_conn.len(), 3);
    }

    #[test]
    fn key_is_invariant_and_perm_reproduces_it() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for g in [Graph::cycle(7), diamond(), Graph::cycle(9).complement(), Graph::path(6)] {
            let form = canonical_form(&g);
            let relabelled = g.permuted(&form.perm().iter().map(|&p| p as usize).collect::<Vec<_>>());
            assert_eq!(relabelled, form.canonical_graph());
            for _ in 0..20 {
                let mut p: Vec<usize> = (0..g.n()).collect();
                p.shuffle(&mut rng);
                assert_eq!(canonical_key(&g.permuted(&p)), form.key());
            }
        }
    }

    #[test]
    fn group_orders() {
        assert_eq!(automorphism_generators(&Graph::cycle(5)).group_order(), 10);
        assert_eq!(automorphism_generators(&Graph::complete(4)).group_order(), 24);
        assert_eq!(automorphism_generators(&diamond()).group_order(), 4);
        assert_eq!(brute_aut_order(&diamond()), 4);
        assert_eq!(automorphism_generators(&Graph::complete(9)).group_order(), 362_880);
    }

    #[test]
    fn group_order_matches_brute_force_on_five_vertices() {
        for g in all_graphs(5).iter().step_by(3) {
            let gens = automorphism_generators(g);
            for p in gens.gens() {
                let p: Vec<usize> = p[..5].iter().map(|&x| x as usize).collect();
                assert_eq!(g.permuted(&p), *g);
            }
            assert_eq!(gens.group_order(), brute_aut_order(g), "{g:?}");
        }
    }

    #[test]
    fn pair_orbit_examples() {
        let c4 = vertex_pair_orbits(&Graph::cycle(4));
        assert_eq!(c4.len(), 2);
        assert_ne!(c4.orbit_of(0, 1), c4.orbit_of(0, 2));
        assert_eq!(vertex_pair_orbits(&Graph::complete(4)).len(), 1);
        let d = vertex_pair_orbits(&diamond());
        assert_eq!(d.len(), 3);
        // Vertices 0 and 2 have degree 3.
        assert_eq!(d.orbit_size(d.orbit_of(0, 2)), 1);
        assert_eq!(d.orbit_size(d.orbit_of(0, 1)), 4);
        assert_eq!(d.orbit_size(d.orbit_of(1, 3)), 1);
    }

    #[test]
    fn key_round_trips_through_graph() {
        let g = Graph::cycle(8).augment_unchecked(0, 4, 1);
        let form = canonical_form(&g);
        assert_eq!(canonical_key(&form.canonical_graph()), form.key());
    }
}
