//! Small simple graphs stored as adjacency bit rows, plus the ear operations
//! the generator is built on.

use std::fmt;

use arrayvec::ArrayVec;

use crate::error::GraphError;

/// Maximum number of vertices a [`Graph`] can hold.
pub const CAP: usize = 16;

/// Iterator over the set bits of a vertex mask, lowest first.
#[derive(Clone, Copy, Debug)]
pub struct Bits(pub u16);

impl Iterator for Bits {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let k = self.0.count_ones() as usize;
        (k, Some(k))
    }
}

impl ExactSizeIterator for Bits {}

#[inline]
pub(crate) fn low_mask(n: usize) -> u16 {
    if n >= 16 {
        u16::MAX
    } else {
        (1u16 << n) - 1
    }
}

/// An undirected simple graph on at most [`CAP`] vertices.
///
/// Vertices are `0..n`. Row `v` of the adjacency holds the neighbours of `v`
/// as a bit mask. Values are `Copy`; every operation returns a new graph.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Graph {
    n: u8,
    m: u8,
    adj: [u16; CAP],
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    ///
    /// Panics if `n > CAP`.
    pub fn empty(n: usize) -> Self {
        assert!(n <= CAP, "graph on {n} vertices exceeds capacity {CAP}");
        Graph {
            n: n as u8,
            m: 0,
            adj: [0; CAP],
        }
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        let mut g = Self::empty(n);
        for v in 0..n {
            g.insert_edge(v, (v + 1) % n);
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.insert_edge(u, v);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Self::empty(n);
        for v in 1..n {
            g.insert_edge(v - 1, v);
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n > CAP {
            return Err(GraphError::CapacityExceeded(n));
        }
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            g.check_vertex(u)?;
            g.check_vertex(v)?;
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !g.has_edge(u, v) {
                g.insert_edge(u, v);
            }
        }
        Ok(g)
    }

    /// Build from raw adjacency rows. Rows must be symmetric and loop-free.
    pub(crate) fn from_rows(n: usize, rows: &[u16]) -> Self {
        let mut adj = [0u16; CAP];
        adj[..n].copy_from_slice(&rows[..n]);
        let m = adj[..n].iter().map(|r| r.count_ones()).sum::<u32>() / 2;
        Graph {
            n: n as u8,
            m: m as u8,
            adj,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Number of edges.
    #[inline]
    pub fn m(&self) -> usize {
        self.m as usize
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    /// Neighbourhood of `v` as a bit mask.
    #[inline]
    pub fn neighbors(&self, v: usize) -> u16 {
        self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    /// Mask with one bit per vertex.
    #[inline]
    pub fn vertex_mask(&self) -> u16 {
        low_mask(self.n())
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| Bits(self.adj[u] & !low_mask(u + 1)).map(move |v| (u, v)))
    }

    pub fn non_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let all = self.vertex_mask();
        (0..self.n())
            .flat_map(move |u| Bits(!self.adj[u] & all & !low_mask(u + 1)).map(move |v| (u, v)))
    }

    pub fn is_regular(&self) -> bool {
        let n = self.n();
        n == 0 || (1..n).all(|v| self.degree(v) == self.degree(0))
    }

    /// Degrees in non-increasing order.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = (0..self.n()).map(|v| self.degree(v)).collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }

    /// Degree histogram packed one byte per degree value.
    ///
    /// Equal keys exactly when the sorted degree sequences are equal.
    pub fn degree_histogram_key(&self) -> u128 {
        let mut key = 0u128;
        for v in 0..self.n() {
            key += 1u128 << (8 * self.degree(v));
        }
        key
    }

    pub fn complement(&self) -> Self {
        let all = self.vertex_mask();
        let mut rows = [0u16; CAP];
        for (v, row) in rows.iter_mut().enumerate().take(self.n()) {
            *row = !self.adj[v] & all & !(1 << v);
        }
        Self::from_rows(self.n(), &rows)
    }

    /// Relabel vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n();
        assert_eq!(perm.len(), n, "permutation length must equal vertex count");
        let mut rows = [0u16; CAP];
        for u in 0..n {
            let mut row = 0u16;
            for v in Bits(self.adj[u]) {
                row |= 1 << perm[v];
            }
            rows[perm[u]] = row;
        }
        Self::from_rows(n, &rows)
    }

    pub fn with_edge(&self, u: usize, v: usize) -> Result<Self, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        let mut g = *self;
        if !g.has_edge(u, v) {
            g.insert_edge(u, v);
        }
        Ok(g)
    }

    pub fn without_edge(&self, u: usize, v: usize) -> Result<Self, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let mut g = *self;
        if g.has_edge(u, v) {
            g.delete_edge(u, v);
        }
        Ok(g)
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                n: self.n(),
            })
        }
    }

    #[inline]
    pub(crate) fn insert_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v && !self.has_edge(u, v));
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
        self.m += 1;
    }

    #[inline]
    pub(crate) fn delete_edge(&mut self, u: usize, v: usize) {
        debug_assert!(self.has_edge(u, v));
        self.adj[u] &= !(1 << v);
        self.adj[v] &= !(1 << u);
        self.m -= 1;
    }

    /// Remove the vertices in `mask`, shifting higher indices down.
    pub(crate) fn remove_vertices(&self, mask: u16) -> Self {
        let n = self.n();
        let keep = self.vertex_mask() & !mask;
        let k = keep.count_ones() as usize;
        let mut rows = [0u16; CAP];
        if keep == low_mask(k) {
            // Removed vertices are the top indices: plain truncation.
            for (v, row) in rows.iter_mut().enumerate().take(k) {
                *row = self.adj[v] & keep;
            }
        } else {
            let mut slot = 0;
            for v in Bits(keep) {
                rows[slot] = compress(self.adj[v], keep);
                slot += 1;
            }
            debug_assert!(slot <= n);
        }
        Self::from_rows(k, &rows)
    }

    /// True iff the graph has at least 3 vertices, is connected and has no
    /// cut vertex. Uses an iterative low-point DFS.
    pub fn is_two_connected(&self) -> bool {
        let n = self.n();
        if n < 3 {
            return false;
        }
        const UNSEEN: u8 = u8::MAX;
        let mut disc = [UNSEEN; CAP];
        let mut low = [0u8; CAP];
        let mut parent = [UNSEEN; CAP];
        let mut pending = [0u16; CAP];
        let mut stack = [0u8; CAP];
        let mut sp = 1;
        let mut time = 1u8;
        let mut root_children = 0;
        disc[0] = 0;
        pending[0] = self.adj[0];

        while sp > 0 {
            let v = stack[sp - 1] as usize;
            if pending[v] != 0 {
                let w = pending[v].trailing_zeros() as usize;
                pending[v] &= pending[v] - 1;
                if disc[w] == UNSEEN {
                    parent[w] = v as u8;
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    pending[w] = self.adj[w];
                    stack[sp] = w as u8;
                    sp += 1;
                    if v == 0 {
                        root_children += 1;
                    }
                } else if w as u8 != parent[v] {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                sp -= 1;
                let p = parent[v];
                if p != UNSEEN {
                    let p = p as usize;
                    low[p] = low[p].min(low[v]);
                    if p != 0 && low[v] >= disc[p] {
                        return false;
                    }
                }
            }
        }
        time as usize == n && root_children < 2
    }

    /// Vertices of degree at least three.
    pub fn branch_mask(&self) -> u16 {
        let mut mask = 0u16;
        for v in 0..self.n() {
            if self.adj[v].count_ones() >= 3 {
                mask |= 1 << v;
            }
        }
        mask
    }

    /// Every ear of the graph: each maximal chain of degree-2 vertices between
    /// branch vertices, and each edge joining two branch vertices. Cycles have
    /// no branch vertices and yield nothing.
    ///
    /// Internal vertices are listed from the lower endpoint towards the higher.
    pub fn enumerate_ears(&self) -> Vec<Ear> {
        let branch = self.branch_mask();
        let mut ears = Vec::new();
        for x in Bits(branch) {
            for first in Bits(self.adj[x]) {
                if let Some(ear) = self.walk_ear(branch, x, first) {
                    let keep = match ear.y.cmp(&ear.x) {
                        std::cmp::Ordering::Greater => true,
                        std::cmp::Ordering::Less => false,
                        // A closed chain only occurs in separable graphs.
                        std::cmp::Ordering::Equal => ear.internal.first() < ear.internal.last(),
                    };
                    if keep {
                        ears.push(ear);
                    }
                }
            }
        }
        ears
    }

    fn walk_ear(&self, branch: u16, x: usize, first: usize) -> Option<Ear> {
        let mut internal = ArrayVec::new();
        let mut prev = x;
        let mut cur = first;
        while branch >> cur & 1 == 0 {
            internal.push(cur as u8);
            let next = self.adj[cur] & !(1 << prev);
            if next.count_ones() != 1 {
                // Pendant or isolated chain: not an ear.
                return None;
            }
            prev = cur;
            cur = next.trailing_zeros() as usize;
            if internal.len() >= CAP {
                return None;
            }
        }
        Some(Ear {
            x: x as u8,
            y: cur as u8,
            internal,
        })
    }

    /// Delete an ear: its internal vertices, or the edge itself for a
    /// trivial ear. Surviving vertices keep their relative order.
    pub fn ear_delete(&self, ear: &Ear) -> Result<Self, GraphError> {
        if !self.is_ear(ear) {
            return Err(GraphError::NotAnEar);
        }
        Ok(self.remove_ear(ear))
    }

    pub(crate) fn remove_ear(&self, ear: &Ear) -> Self {
        if ear.internal.is_empty() {
            let mut g = *self;
            g.delete_edge(ear.x(), ear.y());
            g
        } else {
            self.remove_vertices(ear.internal_mask())
        }
    }

    /// Whether `ear` is an ear of this graph as stated: branch endpoints,
    /// degree-2 internal vertices, consecutive vertices adjacent.
    pub fn is_ear(&self, ear: &Ear) -> bool {
        let n = self.n();
        let (x, y) = (ear.x(), ear.y());
        if x >= n || y >= n || x == y || self.degree(x) < 3 || self.degree(y) < 3 {
            return false;
        }
        let mut prev = x;
        for &w in &ear.internal {
            let w = w as usize;
            if w >= n || w == x || w == y || self.degree(w) != 2 || !self.has_edge(prev, w) {
                return false;
            }
            prev = w;
        }
        self.has_edge(prev, y) && ear.internal_mask().count_ones() as usize == ear.internal.len()
    }

    /// Append a path of `order` new vertices between `x` and `y`; an order-0
    /// ear is the edge `xy`.
    pub fn ear_augment(&self, x: usize, y: usize, order: usize) -> Result<Self, GraphError> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        if x == y {
            return Err(GraphError::SameVertex(x));
        }
        if order == 0 && self.has_edge(x, y) {
            return Err(GraphError::EdgeExists { x, y });
        }
        if self.n() + order > CAP {
            return Err(GraphError::CapacityExceeded(self.n() + order));
        }
        Ok(self.augment_unchecked(x, y, order))
    }

    pub(crate) fn augment_unchecked(&self, x: usize, y: usize, order: usize) -> Self {
        let mut g = *self;
        let base = self.n();
        g.n += order as u8;
        let mut prev = x;
        for w in base..base + order {
            g.insert_edge(prev, w);
            prev = w;
        }
        g.insert_edge(prev, y);
        g
    }
}

/// Gather the bits of `row` selected by `keep` into the low positions.
#[inline]
fn compress(row: u16, keep: u16) -> u16 {
    let mut out = 0u16;
    for (slot, v) in Bits(keep).enumerate() {
        out |= (row >> v & 1) << slot;
    }
    out
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges=[", self.n)?;
        for (i, (u, v)) in self.edges().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{u}-{v}")?;
        }
        write!(f, "])")
    }
}

/// A path between two branch vertices whose internal vertices have degree 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ear {
    x: u8,
    y: u8,
    internal: ArrayVec<u8, CAP>,
}

impl Ear {
    pub fn new(x: usize, y: usize, internal: &[usize]) -> Self {
        Ear {
            x: x as u8,
            y: y as u8,
            internal: internal.iter().map(|&v| v as u8).collect(),
        }
    }

    #[inline]
    pub fn x(&self) -> usize {
        self.x as usize
    }

    #[inline]
    pub fn y(&self) -> usize {
        self.y as usize
    }

    /// Endpoints as an ordered pair `(min, max)`.
    #[inline]
    pub fn endpoints(&self) -> (usize, usize) {
        let (a, b) = (self.x(), self.y());
        (a.min(b), a.max(b))
    }

    /// Number of internal vertices.
    #[inline]
    pub fn order(&self) -> usize {
        self.internal.len()
    }

    #[inline]
    pub fn is_trivial(&self) -> bool {
        self.internal.is_empty()
    }

    pub fn internal(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.internal.iter().map(|&v| v as usize)
    }

    pub fn internal_mask(&self) -> u16 {
        self.internal.iter().fold(0, |m, &v| m | 1 << v)
    }

    /// The path's edges, from `x` to `y`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.order() + 1);
        let mut prev = self.x();
        for w in self.internal() {
            out.push((prev, w));
            prev = w;
        }
        out.push((prev, self.y()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)]).unwrap()
    }

    fn theta() -> Graph {
        // Branch vertices 0 and 1, three paths through 2, 3, 4.
        Graph::from_edges(5, &[(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1)]).unwrap()
    }

    fn brute_two_connected(g: &Graph) -> bool {
        fn connected(g: &Graph, alive: u16) -> bool {
            if alive == 0 {
                return true;
            }
            let start = alive.trailing_zeros() as usize;
            let mut seen = 1u16 << start;
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
        let all = g.vertex_mask();
        g.n() >= 3 && connected(g, all) && (0..g.n()).all(|v| connected(g, all & !(1 << v)))
    }

    #[test]
    fn two_connectivity_small_cases() {
        assert!(Graph::cycle(4).is_two_connected());
        assert!(!Graph::path(4).is_two_connected());
        let bowtie = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]).unwrap();
        assert!(!bowtie.is_two_connected());
        assert!(!Graph::complete(2).is_two_connected());
        assert!(Graph::complete(3).is_two_connected());
    }

    #[test]
    fn two_connectivity_matches_brute_force_up_to_seven() {
        for n in 0..=6 {
            let pairs: Vec<(usize, usize)> = Graph::complete(n).edges().collect();
            for mask in 0u32..1 << pairs.len() {
                let edges: Vec<_> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                let g = Graph::from_edges(n, &edges).unwrap();
                assert_eq!(g.is_two_connected(), brute_two_connected(&g), "{g:?}");
            }
        }
        // n = 7 has 2^21 labelled graphs; a strided sample keeps this quick.
        let pairs: Vec<(usize, usize)> = Graph::complete(7).edges().collect();
        for mask in (0u32..1 << 21).step_by(97) {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let g = Graph::from_edges(7, &edges).unwrap();
            assert_eq!(g.is_two_connected(), brute_two_connected(&g), "{g:?}");
        }
    }

    #[test]
    fn ears_of_cycle_and_complete() {
        assert!(Graph::cycle(5).enumerate_ears().is_empty());
        let ears = Graph::complete(4).enumerate_ears();
        assert_eq!(ears.len(), 6);
        assert!(ears.iter().all(Ear::is_trivial));
    }

    #[test]
    fn theta_has_three_order_one_ears() {
        let ears = theta().enumerate_ears();
        assert_eq!(ears.len(), 3);
        assert!(ears.iter().all(|e| e.order() == 1 && e.endpoints() == (0, 1)));
    }

    #[test]
    fn ears_partition_the_edges() {
        let g = Graph::cycle(6).augment_unchecked(0, 3, 2).augment_unchecked(1, 6, 0);
        let mut covered = 0usize;
        let mut seen = std::collections::HashSet::new();
        for ear in g.enumerate_ears() {
            for (u, v) in ear.edges() {
                assert!(seen.insert((u.min(v), u.max(v))), "edge covered twice");
                covered += 1;
            }
        }
        assert_eq!(covered, g.m());
    }

    #[test]
    fn delete_theta_ear_gives_four_cycle() {
        let g = theta();
        let ear = &g.enumerate_ears()[0];
        let h = g.ear_delete(ear).unwrap();
        assert_eq!(h.n(), 4);
        assert_eq!(h.degree_sequence(), vec![2, 2, 2, 2]);
        assert!(h.is_two_connected());
    }

    #[test]
    fn delete_trivial_ear_of_k4_gives_diamond() {
        let g = Graph::complete(4);
        let h = g.ear_delete(&Ear::new(0, 1, &[])).unwrap();
        assert_eq!(h.degree_sequence(), diamond().degree_sequence());
        assert_eq!(h.m(), 5);
    }

    #[test]
    fn ear_delete_rejects_non_ears() {
        let g = diamond();
        // Vertex 1 has degree 2, so 0-1 is not an ear between branch vertices.
        assert_eq!(g.ear_delete(&Ear::new(0, 1, &[])), Err(GraphError::NotAnEar));
        assert_eq!(Graph::cycle(4).ear_delete(&Ear::new(0, 2, &[1])), Err(GraphError::NotAnEar));
    }

    #[test]
    fn augment_examples() {
        let d = Graph::cycle(4).ear_augment(0, 2, 0).unwrap();
        assert_eq!(d.degree_sequence(), vec![3, 3, 2, 2]);
        let t = Graph::cycle(3).ear_augment(0, 1, 1).unwrap();
        assert_eq!(t.n(), 4);
        assert_eq!(t.m(), 5);
        assert_eq!(t.degree_sequence(), vec![3, 3, 2, 2]);
        assert_eq!(
            Graph::cycle(4).ear_augment(0, 1, 0),
            Err(GraphError::EdgeExists { x: 0, y: 1 })
        );
        assert_eq!(
            Graph::cycle(15).ear_augment(0, 5, 2),
            Err(GraphError::CapacityExceeded(17))
        );
        assert_eq!(Graph::cycle(4).ear_augment(1, 1, 2), Err(GraphError::SameVertex(1)));
    }

    #[test]
    fn augment_then_delete_round_trips() {
        let g = diamond();
        for (x, y, r) in [(1, 3, 0), (1, 3, 2), (0, 2, 1), (1, 2, 3)] {
            let h = g.ear_augment(x, y, r).unwrap();
            let ear = Ear::new(x, y, &(g.n()..g.n() + r).collect::<Vec<_>>());
            assert_eq!(h.ear_delete(&ear).unwrap(), g);
        }
    }

    #[test]
    fn degree_sequences() {
        assert_eq!(Graph::complete(4).degree_sequence(), vec![3, 3, 3, 3]);
        assert_eq!(Graph::cycle(5).degree_sequence(), vec![2; 5]);
        assert_eq!(diamond().degree_sequence(), vec![3, 3, 2, 2]);
    }

    #[test]
    fn vertex_removal_compacts() {
        let g = Graph::path(5);
        let h = g.remove_vertices(1 << 2);
        assert_eq!(h.n(), 4);
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn complement_of_c5_is_c5_shaped() {
        let c = Graph::cycle(5).complement();
        assert_eq!(c.m(), 5);
        assert!(c.is_regular());
        assert!(c.is_two_connected());
    }
}
