//! Heaps of pieces in Cartier–Foata canonical form.
//!
//! A [`Heap`] is stored as one representative of its labelled-poset
//! isomorphism class: vertices are numbered layer by layer along the
//! Cartier–Foata factorization, and inside a layer by alphabet order of their
//! labels. Two heaps are equal exactly when their label sequences agree.

use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::structure::{escape, ConcurrencyStructure, Piece};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Range;
use std::sync::Arc;

#[derive(Clone)]
pub struct Heap {
    structure: Arc<ConcurrencyStructure>,
    labels: Vec<Piece>,
    below: Vec<VertexSet>,
    above: Vec<VertexSet>,
    // Layer j is layer_starts[j]..layer_starts[j + 1].
    layer_starts: Vec<usize>,
}

/// One factor `T_i` of the Cartier–Foata factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrivialFactor {
    pub vertices: Vec<usize>,
    pub labels: Vec<Piece>,
}

impl Heap {
    pub fn empty(structure: Arc<ConcurrencyStructure>) -> Heap {
        Heap {
            structure,
            labels: Vec::new(),
            below: Vec::new(),
            above: Vec::new(),
            layer_starts: vec![0],
        }
    }

    /// The heap `a_1 ∘ a_2 ∘ … ∘ a_r` of singleton heaps.
    pub fn from_word(structure: Arc<ConcurrencyStructure>, word: &[Piece]) -> Result<Heap> {
        for (i, p) in word.iter().enumerate() {
            if p.index() >= structure.len() {
                return Err(Error::UnknownLetter {
                    name: format!("#{}", p.index()),
                    position: i + 1,
                });
            }
        }
        let labels = word.to_vec();
        let s = structure.clone();
        Ok(Heap::build(structure, labels, |i, j| {
            s.concurrent(word[i], word[j])
        }))
    }

    /// Parses a whitespace-separated word and builds its heap.
    pub fn parse(structure: &Arc<ConcurrencyStructure>, word: &str) -> Result<Heap> {
        let w = structure.parse_word(word)?;
        Heap::from_word(structure.clone(), &w)
    }

    /// Builds a heap from labels listed along a linear extension, where
    /// `related(i, j)` (for `i < j`) is the generating relation whose
    /// transitive closure is the order.
    fn build(
        structure: Arc<ConcurrencyStructure>,
        labels: Vec<Piece>,
        related: impl Fn(usize, usize) -> bool,
    ) -> Heap {
        let n = labels.len();
        let mut below: Vec<VertexSet> = Vec::with_capacity(n);
        let mut height = vec![0usize; n];
        for j in 0..n {
            let mut b = VertexSet::with_capacity(n);
            let mut h = 0;
            for i in 0..j {
                if related(i, j) {
                    b.insert(i);
                    b.union_with(&below[i]);
                    h = h.max(height[i] + 1);
                }
            }
            below.push(b);
            height[j] = h;
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (height[v], labels[v]));
        let mut new_of = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            new_of[old] = new;
        }
        let new_labels: Vec<Piece> = order.iter().map(|&o| labels[o]).collect();
        let new_below: Vec<VertexSet> = order
            .iter()
            .map(|&o| VertexSet::from_iter_with_capacity(n, below[o].iter().map(|x| new_of[x])))
            .collect();
        let mut above = vec![VertexSet::with_capacity(n); n];
        for (y, b) in new_below.iter().enumerate() {
            for x in b.iter() {
                above[x].insert(y);
            }
        }
        let mut layer_starts = vec![0];
        for k in 1..n {
            if height[order[k]] != height[order[k - 1]] {
                layer_starts.push(k);
            }
        }
        if n > 0 {
            layer_starts.push(n);
        }

        let heap = Heap {
            structure,
            labels: new_labels,
            below: new_below,
            above,
            layer_starts,
        };
        debug_assert!(heap.satisfies_axioms(), "heap axioms violated: {heap:?}");
        heap
    }

    pub fn structure(&self) -> &Arc<ConcurrencyStructure> {
        &self.structure
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: usize) -> Piece {
        self.labels[v]
    }

    /// Labels in canonical vertex order; this is the canonical word.
    pub fn labels(&self) -> &[Piece] {
        &self.labels
    }

    pub fn canonical_word(&self) -> Vec<Piece> {
        self.labels.clone()
    }

    /// Canonical word as space-separated piece names.
    pub fn word_string(&self) -> String {
        self.structure.format_word(&self.labels)
    }

    /// `x < y` in the heap order.
    #[inline]
    pub fn less(&self, x: usize, y: usize) -> bool {
        self.below[y].contains(x)
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        x == y || self.less(x, y) || self.less(y, x)
    }

    /// Strict down-set of `v`.
    pub fn below(&self, v: usize) -> &VertexSet {
        &self.below[v]
    }

    /// Strict up-set of `v`.
    pub fn above(&self, v: usize) -> &VertexSet {
        &self.above[v]
    }

    /// Open interval `{w : x < w < y}`.
    pub fn interval(&self, x: usize, y: usize) -> VertexSet {
        self.above[x].intersection(&self.below[y])
    }

    pub fn vertex_set(&self) -> VertexSet {
        VertexSet::full(self.len())
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.len() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                len: self.len(),
            })
        }
    }

    /// Minimal vertices; also the first Cartier–Foata layer.
    pub fn minimal(&self) -> VertexSet {
        VertexSet::from_iter_with_capacity(
            self.len(),
            (0..self.len()).filter(|&v| self.below[v].is_empty()),
        )
    }

    pub fn maximal(&self) -> VertexSet {
        VertexSet::from_iter_with_capacity(
            self.len(),
            (0..self.len()).filter(|&v| self.above[v].is_empty()),
        )
    }

    /// A heap is trivial when its order relation is empty.
    pub fn is_trivial(&self) -> bool {
        self.layer_starts.len() <= 2
    }

    pub fn num_layers(&self) -> usize {
        self.layer_starts.len() - 1
    }

    pub fn layers(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        self.layer_starts.windows(2).map(|w| w[0]..w[1])
    }

    /// Index of the Cartier–Foata layer containing `v`.
    pub fn layer_of(&self, v: usize) -> usize {
        self.layer_starts.partition_point(|&s| s <= v) - 1
    }

    /// The unique factorization into trivial heaps `T_1 ∘ … ∘ T_p`.
    pub fn factorize(&self) -> Vec<TrivialFactor> {
        self.layers()
            .map(|r| TrivialFactor {
                labels: self.labels[r.clone()].to_vec(),
                vertices: r.collect(),
            })
            .collect()
    }

    fn same_structure(&self, other: &Heap) -> bool {
        Arc::ptr_eq(&self.structure, &other.structure) || *self.structure == *other.structure
    }

    /// The composition `self ∘ other`: `other` is placed on top of `self`.
    pub fn compose(&self, other: &Heap) -> Result<Heap> {
        if !self.same_structure(other) {
            return Err(Error::StructureMismatch);
        }
        let n = self.len();
        let labels: Vec<Piece> = self.labels.iter().chain(&other.labels).copied().collect();
        let s = &self.structure;
        Ok(Heap::build(self.structure.clone(), labels.clone(), |i, j| {
            match (i < n, j < n) {
                (true, true) => self.less(i, j),
                (false, false) => other.less(i - n, j - n),
                (true, false) => s.concurrent(labels[i], labels[j]),
                (false, true) => false,
            }
        }))
    }

    /// The subheap on `vertices`: its order is the transitive closure of
    /// `a ≤ b` with concurrent labels, restricted to the subset.
    pub fn subheap(&self, vertices: &[usize]) -> Result<Heap> {
        let mut set = VertexSet::with_capacity(self.len());
        for &v in vertices {
            self.check_vertex(v)?;
            set.insert(v);
        }
        Ok(self.subheap_of_set(&set))
    }

    pub fn subheap_of_set(&self, set: &VertexSet) -> Heap {
        // Canonical order is a linear extension, so ascending order is too.
        let verts: Vec<usize> = set.iter().filter(|&v| v < self.len()).collect();
        let labels: Vec<Piece> = verts.iter().map(|&v| self.labels[v]).collect();
        let s = &self.structure;
        Heap::build(self.structure.clone(), labels.clone(), |i, j| {
            self.less(verts[i], verts[j]) && s.concurrent(labels[i], labels[j])
        })
    }

    /// `E(v)`: the subheap with vertex `v` removed.
    pub fn delete_vertex(&self, v: usize) -> Result<Heap> {
        self.check_vertex(v)?;
        Ok(self.subheap_of_set(&self.vertex_set().without(v)))
    }

    /// The opposite heap `E*`, with the order reversed.
    pub fn opposite(&self) -> Heap {
        let n = self.len();
        let labels: Vec<Piece> = self.labels.iter().rev().copied().collect();
        Heap::build(self.structure.clone(), labels, |i, j| {
            self.less(n - 1 - j, n - 1 - i)
        })
    }

    /// The double `T_p ∘ … ∘ T_2 ∘ T_1 ∘ T_2 ∘ … ∘ T_p`.
    pub fn double(&self) -> Heap {
        let layers: Vec<Range<usize>> = self.layers().collect();
        let mut word = Vec::with_capacity(2 * self.len());
        for r in layers.iter().rev() {
            word.extend_from_slice(&self.labels[r.clone()]);
        }
        for r in layers.iter().skip(1) {
            word.extend_from_slice(&self.labels[r.clone()]);
        }
        Heap::from_word(self.structure.clone(), &word).expect("labels from the same structure")
    }

    /// The canonical inclusion of this heap into a structure containing its
    /// pieces (by name) as a full substructure.
    pub fn embed(&self, target: &Arc<ConcurrencyStructure>) -> Result<Heap> {
        let word = self.translate_labels(target, 0..self.len())?;
        let n = self.len();
        for i in 0..n {
            for j in i + 1..n {
                let here = self.structure.concurrent(self.labels[i], self.labels[j]);
                if here != target.concurrent(word[i], word[j]) {
                    return Err(Error::StructureMismatch);
                }
            }
        }
        Heap::from_word(target.clone(), &word)
    }

    /// The heap over `target` formed by the vertices whose piece names occur
    /// in `target`. When `target` is a union of connected components of this
    /// heap's concurrency graph, this is the factor `E_i` of the disjoint
    /// union decomposition.
    pub fn project(&self, target: &Arc<ConcurrencyStructure>) -> Result<Heap> {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&v| target.piece(self.structure.name(self.labels[v])).is_some())
            .collect();
        let sub = self.subheap(&keep)?;
        let word = sub.translate_labels(target, 0..sub.len())?;
        let heap = Heap::from_word(target.clone(), &word)?;
        Ok(heap)
    }

    fn translate_labels(
        &self,
        target: &ConcurrencyStructure,
        range: Range<usize>,
    ) -> Result<Vec<Piece>> {
        range
            .map(|v| word_piece(target, &self.structure, self.labels[v]))
            .collect()
    }

    /// Cartier–Foata form with parenthesized factors, e.g. `(1 3)(2)(1 3)`.
    /// The empty heap renders as `1`.
    pub fn cf_string(&self) -> String {
        if self.is_empty() {
            return "1".to_string();
        }
        self.layers()
            .map(|r| format!("({})", self.structure.format_word(&self.labels[r])))
            .collect()
    }

    /// Covering pairs `(x, y)` of the order: `x < y` with nothing between.
    pub fn covering_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for y in 0..self.len() {
            for x in self.below[y].iter() {
                if !self.above[x].intersects(&self.below[y]) {
                    out.push((x, y));
                }
            }
        }
        out.sort();
        out
    }

    /// Graphviz rendering of the Hasse diagram; edges point upward.
    pub fn to_dot(&self) -> String {
        let id = |v: usize| format!("{}:{}", v, escape(self.structure.name(self.labels[v])));
        let mut out = String::from("digraph heap {\n  rankdir=BT;\n");
        for v in 0..self.len() {
            out.push_str(&format!("  \"{}\";\n", id(v)));
        }
        for (x, y) in self.covering_pairs() {
            out.push_str(&format!("  \"{}\" -> \"{}\";\n", id(x), id(y)));
        }
        out.push_str("}\n");
        out
    }

    /// Checks both heap axioms and the layer invariant against the stored
    /// order. Used in debug assertions.
    pub fn satisfies_axioms(&self) -> bool {
        let n = self.len();
        let s = &self.structure;
        // Axiom 1: concurrent labels force comparability.
        for a in 0..n {
            for b in a + 1..n {
                if s.concurrent(self.labels[a], self.labels[b]) && !self.comparable(a, b) {
                    return false;
                }
            }
        }
        // Axiom 2: the order is the closure of its concurrent part.
        let mut closure: Vec<VertexSet> = Vec::with_capacity(n);
        for j in 0..n {
            let mut b = VertexSet::with_capacity(n);
            for i in 0..j {
                if self.less(i, j) && s.concurrent(self.labels[i], self.labels[j]) {
                    b.insert(i);
                    b.union_with(&closure[i]);
                }
            }
            if b != self.below[j] {
                return false;
            }
            closure.push(b);
        }
        // Layers: T_1 minimal, each later vertex covers something one layer down.
        for v in 0..n {
            let l = self.layer_of(v);
            let ok = if l == 0 {
                self.below[v].is_empty()
            } else {
                self.below[v].iter().any(|u| self.layer_of(u) == l - 1)
                    && self.below[v].iter().all(|u| self.layer_of(u) < l)
            };
            if !ok {
                return false;
            }
        }
        true
    }
}

fn word_piece(target: &ConcurrencyStructure, from: &ConcurrencyStructure, p: Piece) -> Result<Piece> {
    let name = from.name(p);
    target.piece(name).ok_or_else(|| Error::UnknownLetter {
        name: name.to_string(),
        position: 0,
    })
}

/// Equality of heaps as labelled-poset isomorphism classes.
pub fn heaps_equal(e: &Heap, f: &Heap) -> Result<bool> {
    if !e.same_structure(f) {
        return Err(Error::StructureMismatch);
    }
    Ok(e.labels == f.labels)
}

impl PartialEq for Heap {
    fn eq(&self, other: &Heap) -> bool {
        self.labels == other.labels && self.same_structure(other)
    }
}

impl Eq for Heap {}

impl Hash for Heap {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.labels.hash(state);
    }
}

impl fmt::Debug for Heap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Heap({})", self.cf_string())
    }
}

impl fmt::Display for Heap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cf_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a_n(n: usize) -> Arc<ConcurrencyStructure> {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Arc::new(ConcurrencyStructure::from_edges(n, &edges))
    }

    fn h(s: &Arc<ConcurrencyStructure>, w: &str) -> Heap {
        Heap::parse(s, w).unwrap()
    }

    // Vertices of the 5-vertex example heap: a,b = bottom 1,3; c = 2; d,e = top 1,3.
    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;
    const D: usize = 3;
    const E: usize = 4;

    #[test]
    fn example_heap_from_word() {
        let s = a_n(3);
        let e = h(&s, "1 3 2 1 3");
        assert_eq!(e.word_string(), "1 3 2 1 3");
        assert_eq!(e.minimal().iter().collect::<Vec<_>>(), vec![A, B]);
        assert!(e.less(A, C) && e.less(B, C) && e.less(C, D) && e.less(C, E));
        assert!(e.less(A, D) && e.less(B, E) && e.less(A, E));
        assert!(!e.comparable(A, B) && !e.comparable(D, E));
        assert_eq!(e.covering_pairs(), vec![(A, C), (B, C), (C, D), (C, E)]);
    }

    #[test]
    fn empty_word_gives_empty_heap() {
        let s = a_n(3);
        let e = Heap::from_word(s.clone(), &[]).unwrap();
        assert!(e.is_empty());
        assert_eq!(e, Heap::empty(s));
        assert!(e.canonical_word().is_empty());
        assert_eq!(e.cf_string(), "1");
    }

    #[test]
    fn commuting_letters_give_equal_heaps() {
        let s = a_n(3);
        assert_eq!(h(&s, "1 3 2"), h(&s, "3 1 2"));
        assert_ne!(h(&s, "1 2"), h(&s, "2 1"));
    }

    #[test]
    fn compose_examples() {
        let s = a_n(3);
        let e = h(&s, "1 3 2");
        let f = h(&s, "1 3");
        assert_eq!(e.compose(&f).unwrap(), h(&s, "1 3 2 1 3"));
        assert_eq!(e.compose(&Heap::empty(s.clone())).unwrap(), e);
        let t = h(&s, "1").compose(&h(&s, "3")).unwrap();
        assert_eq!(t.len(), 2);
        assert!(!t.comparable(0, 1));
        assert!(t.is_trivial());
    }

    #[test]
    fn compose_rejects_other_structures() {
        let e = h(&a_n(3), "1");
        let f = h(&a_n(2), "1");
        assert_eq!(e.compose(&f).unwrap_err(), Error::StructureMismatch);
        assert_eq!(heaps_equal(&e, &f).unwrap_err(), Error::StructureMismatch);
    }

    #[test]
    fn subheap_examples() {
        let s = a_n(3);
        let e = h(&s, "1 3 2 1 3");
        // {a, b, e}: b < e survives through reflexivity, a is isolated.
        let f = e.subheap(&[A, B, E]).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.word_string(), "1 3 3");
        assert!(f.less(1, 2));
        assert!(!f.comparable(0, 1) && !f.comparable(0, 2));
        assert_eq!(e.subheap(&[A, B, C, D, E]).unwrap(), e);
        assert!(e.subheap(&[]).unwrap().is_empty());
        assert!(matches!(
            e.subheap(&[7]),
            Err(Error::VertexOutOfRange { vertex: 7, len: 5 })
        ));
    }

    #[test]
    fn delete_vertex_examples() {
        let s = a_n(3);
        let e = h(&s, "1 3 2 1 3");
        let f = e.delete_vertex(C).unwrap();
        // a < d and b < e only.
        assert_eq!(f.word_string(), "1 3 1 3");
        assert_eq!(f.covering_pairs(), vec![(0, 2), (1, 3)]);

        let one = h(&s, "2");
        assert!(one.delete_vertex(0).unwrap().is_empty());

        let s2 = a_n(2);
        let g = h(&s2, "1 2 1");
        assert_eq!(g.delete_vertex(1).unwrap(), h(&s2, "1 1"));
        assert!(g.delete_vertex(3).is_err());
    }

    #[test]
    fn factorize_examples() {
        let s = a_n(3);
        let e = h(&s, "1 3 2 1 3");
        let labels: Vec<String> = e
            .factorize()
            .iter()
            .map(|t| s.format_word(&t.labels))
            .collect();
        assert_eq!(labels, vec!["1 3", "2", "1 3"]);
        assert_eq!(e.factorize()[0].vertices, vec![A, B]);
        assert_eq!(h(&s, "1 3").factorize().len(), 1);
        let s2 = a_n(2);
        let g = h(&s2, "1 2 1");
        assert_eq!(g.cf_string(), "(1)(2)(1)");
    }

    #[test]
    fn opposite_examples() {
        let s = a_n(3);
        let e = h(&s, "1 3 2 1 3");
        assert_eq!(e.opposite().cf_string(), "(1 3)(2)(1 3)");
        assert_eq!(e.opposite().opposite(), e);
        let t = h(&s, "1 3");
        assert_eq!(t.opposite(), t);
        let s2 = a_n(2);
        assert_eq!(h(&s2, "1 2").opposite(), h(&s2, "2 1"));
    }

    #[test]
    fn double_examples() {
        let s = a_n(3);
        let e = h(&s, "1 3 2 1 3");
        let d = e.double();
        assert_eq!(d.len(), 8);
        assert_eq!(d.word_string(), "1 3 2 1 3 2 1 3");
        let t = h(&s, "1 3");
        assert_eq!(t.double(), t);
        let s2 = a_n(2);
        assert_eq!(h(&s2, "1 2").double(), h(&s2, "2 1 2"));
    }

    #[test]
    fn canonical_word_examples() {
        let s = a_n(3);
        assert_eq!(h(&s, "3 1 2").word_string(), "1 3 2");
        assert_eq!(h(&s, "1 2 1").word_string(), "1 2 1");
        assert!(heaps_equal(&h(&s, "3 1 2"), &h(&s, "1 3 2")).unwrap());
    }

    #[test]
    fn embed_and_project() {
        let full = a_n(4);
        let sub = Arc::new(full.induced(&[Piece::new(0), Piece::new(1)]));
        let e = h(&sub, "1 2 1");
        let big = e.embed(&full).unwrap();
        assert_eq!(big, h(&full, "1 2 1"));
        assert_eq!(big.project(&sub).unwrap(), e);
        // A non-full substructure cannot be embedded.
        let fake = Arc::new(ConcurrencyStructure::new::<_, &str>(&["1", "2"], &[]).unwrap());
        assert!(h(&fake, "1 2").embed(&full).is_err());
    }

    #[test]
    fn dot_output() {
        let s = a_n(2);
        let dot = h(&s, "1 2").to_dot();
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("\"0:1\" -> \"1:2\""));
    }
}
