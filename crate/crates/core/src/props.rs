//! Descent sets, balanced convex chains, and properties P1 and P2.

use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::heap::Heap;
use serde::Serialize;
use std::collections::HashMap;

/// Minimal (`left`) and maximal (`right`) vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentSets {
    pub left: VertexSet,
    pub right: VertexSet,
}

pub fn descents(e: &Heap) -> DescentSets {
    DescentSets {
        left: e.minimal(),
        right: e.maximal(),
    }
}

/// A convex chain `x_1 < … < x_t` with `ε(x_1) = ε(x_t)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BalancedConvexChain {
    vertices: Vec<usize>,
}

impl BalancedConvexChain {
    /// Validates that `vertices` is a balanced convex chain of `e`.
    pub fn new(e: &Heap, vertices: Vec<usize>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidChain("a chain needs at least two vertices".into()));
        }
        for &v in &vertices {
            e.check_vertex(v)?;
        }
        for w in vertices.windows(2) {
            if !e.less(w[0], w[1]) {
                return Err(Error::InvalidChain(format!(
                    "vertices {} and {} are not increasing",
                    w[0], w[1]
                )));
            }
        }
        let (first, last) = (vertices[0], vertices[vertices.len() - 1]);
        if e.label(first) != e.label(last) {
            return Err(Error::InvalidChain("endpoints carry different labels".into()));
        }
        let interior = VertexSet::from_iter_with_capacity(
            e.len(),
            vertices[1..vertices.len() - 1].iter().copied(),
        );
        if e.interval(first, last) != interior {
            return Err(Error::InvalidChain("chain is not convex".into()));
        }
        Ok(BalancedConvexChain { vertices })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn first(&self) -> usize {
        self.vertices[0]
    }

    pub fn last(&self) -> usize {
        self.vertices[self.vertices.len() - 1]
    }
}

/// All balanced convex chains of length `2..=max_length`, in lexicographic
/// vertex order.
///
/// A convex chain's interior is exactly the open interval between its
/// endpoints, so the chains are found by scanning same-label pairs whose
/// interval is totally ordered.
pub fn balanced_convex_chains(e: &Heap, max_length: usize) -> Vec<BalancedConvexChain> {
    let mut out = Vec::new();
    for x in 0..e.len() {
        for z in e.above(x).iter() {
            if e.label(x) != e.label(z) {
                continue;
            }
            let interval = e.interval(x, z);
            if interval.len() + 2 > max_length {
                continue;
            }
            let inner: Vec<usize> = interval.iter().collect();
            // Canonical order is a linear extension, so a chain is sorted.
            if inner.windows(2).all(|w| e.less(w[0], w[1])) {
                let mut vertices = Vec::with_capacity(inner.len() + 2);
                vertices.push(x);
                vertices.extend(inner);
                vertices.push(z);
                out.push(BalancedConvexChain { vertices });
            }
        }
    }
    out.sort();
    out
}

/// Property P2: no balanced convex chains of length 2 or 3. Equivalently,
/// every pair `x < z` with equal labels has at least two vertices strictly
/// between them.
pub fn has_p2(e: &Heap) -> bool {
    for x in 0..e.len() {
        for z in e.above(x).iter() {
            if e.label(x) == e.label(z) && e.above(x).intersection_len(e.below(z)) < 2 {
                return false;
            }
        }
    }
    true
}

/// The contraction `E/c`: the subheap omitting `x_2, …, x_t`.
pub fn contract(e: &Heap, chain: &BalancedConvexChain) -> Result<Heap> {
    // Re-validate: the chain may come from another heap.
    let chain = BalancedConvexChain::new(e, chain.vertices.clone())?;
    let mut keep = e.vertex_set();
    for &v in &chain.vertices[1..] {
        keep.remove(v);
    }
    Ok(e.subheap_of_set(&keep))
}

/// Which of `E(a) ≺⁺ E` and `E(a) ≺⁻ E` hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Exposure {
    pub plus: bool,
    pub minus: bool,
}

impl Exposure {
    pub fn is_none(self) -> bool {
        !self.plus && !self.minus
    }
}

pub fn exposes(e: &Heap, a: usize) -> Result<Exposure> {
    e.check_vertex(a)?;
    let all = e.vertex_set();
    Ok(Exposure {
        plus: exposes_in(e, &all, a, Side::Plus),
        minus: exposes_in(e, &all, a, Side::Minus),
    })
}

/// Direction of a dismantling step: removal of a minimal (`Minus`) or
/// maximal (`Plus`) vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Minus,
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Removal {
    pub vertex: usize,
    pub side: Side,
}

// Every subheap reached by removing extremal vertices carries the restricted
// order of `e`, so the search runs on vertex subsets of `e` directly.
fn is_extremal_in(e: &Heap, s: &VertexSet, a: usize, side: Side) -> bool {
    match side {
        Side::Minus => !e.below(a).intersects(s),
        Side::Plus => !e.above(a).intersects(s),
    }
}

fn exposes_in(e: &Heap, s: &VertexSet, a: usize, side: Side) -> bool {
    if !s.contains(a) || !is_extremal_in(e, s, a, side) {
        return false;
    }
    let neighbours = match side {
        Side::Minus => e.above(a),
        Side::Plus => e.below(a),
    };
    neighbours.iter().any(|b| {
        if !s.contains(b) || e.label(b) == e.label(a) {
            return false;
        }
        let toward_a = match side {
            Side::Minus => e.below(b),
            Side::Plus => e.above(b),
        };
        // b becomes extremal exactly when a was its only neighbour on that side.
        toward_a.intersection_len(s) == 1
    })
}

fn is_trivial_in(e: &Heap, s: &VertexSet) -> bool {
    s.iter().all(|v| !e.below(v).intersects(s))
}

struct Dismantler<'a> {
    heap: &'a Heap,
    // None: not dismantlable; Some(None): trivial; Some(Some(r)): step taken.
    memo: HashMap<VertexSet, Option<Option<Removal>>>,
}

impl Dismantler<'_> {
    fn solve(&mut self, s: &VertexSet) -> bool {
        if let Some(r) = self.memo.get(s) {
            return r.is_some();
        }
        let e = self.heap;
        let result = if is_trivial_in(e, s) {
            Some(None)
        } else {
            let mut found = None;
            'sides: for side in [Side::Minus, Side::Plus] {
                for a in s.iter() {
                    if exposes_in(e, s, a, side) && self.solve(&s.without(a)) {
                        found = Some(Removal { vertex: a, side });
                        break 'sides;
                    }
                }
            }
            found.map(Some)
        };
        let ok = result.is_some();
        self.memo.insert(s.clone(), result);
        ok
    }
}

/// Searches for a dismantling of `e`: a sequence of removals, each exposing
/// a new extremal vertex with a different label, ending at a trivial heap.
/// Returns the removals in order (starting from `e`) or `None` if `e` does
/// not have property P1.
pub fn dismantle(e: &Heap) -> Option<Vec<Removal>> {
    let mut search = Dismantler {
        heap: e,
        memo: HashMap::new(),
    };
    let mut s = e.vertex_set();
    if !search.solve(&s) {
        return None;
    }
    let mut steps = Vec::new();
    while let Some(Some(Some(r))) = search.memo.get(&s) {
        steps.push(*r);
        s.remove(r.vertex);
    }
    Some(steps)
}

/// Property P1 (dismantlability).
pub fn has_p1(e: &Heap) -> bool {
    dismantle(e).is_some()
}

/// Replays a dismantling on actual subheaps, checking each step with
/// [`exposes`]. Vertex indices in `steps` refer to the original heap.
pub fn replay_dismantling(e: &Heap, steps: &[Removal]) -> bool {
    let mut current = e.clone();
    // original index of each vertex of `current`
    let mut origin: Vec<usize> = (0..e.len()).collect();
    for step in steps {
        let Some(pos) = origin.iter().position(|&o| o == step.vertex) else {
            return false;
        };
        let Ok(x) = exposes(&current, pos) else {
            return false;
        };
        let ok = match step.side {
            Side::Minus => x.minus,
            Side::Plus => x.plus,
        };
        if !ok {
            return false;
        }
        // Keep track of where surviving vertices land after canonicalization.
        let next = current.delete_vertex(pos).expect("checked above");
        origin = relabel_after_delete(&current, &next, &origin, pos);
        current = next;
    }
    current.is_trivial()
}

// Removing an extremal vertex keeps the order on the rest, so surviving
// vertices keep their layer-and-label sort key up to layer shifts; match
// them by (label, occurrence rank).
fn relabel_after_delete(old: &Heap, new: &Heap, origin: &[usize], removed: usize) -> Vec<usize> {
    let survivors: Vec<usize> = (0..old.len()).filter(|&v| v != removed).collect();
    let mut by_label: HashMap<_, Vec<usize>> = HashMap::new();
    for &v in &survivors {
        by_label.entry(old.label(v)).or_default().push(origin[v]);
    }
    let mut taken: HashMap<_, usize> = HashMap::new();
    (0..new.len())
        .map(|v| {
            let l = new.label(v);
            let k = taken.entry(l).or_insert(0);
            let o = by_label[&l][*k];
            *k += 1;
            o
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::ConcurrencyStructure;
    use std::sync::Arc;

    fn a_n(n: usize) -> Arc<ConcurrencyStructure> {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Arc::new(ConcurrencyStructure::from_edges(n, &edges))
    }

    // K4 with the edge {1, 3} removed.
    fn fig2_left() -> Arc<ConcurrencyStructure> {
        Arc::new(ConcurrencyStructure::from_edges(
            4,
            &[(0, 1), (0, 3), (1, 2), (1, 3), (2, 3)],
        ))
    }

    fn h(s: &Arc<ConcurrencyStructure>, w: &str) -> Heap {
        Heap::parse(s, w).unwrap()
    }

    fn set(v: &[usize]) -> Vec<usize> {
        v.to_vec()
    }

    #[test]
    fn descents_examples() {
        let s = a_n(3);
        let d = descents(&h(&s, "1 3 2 1 3"));
        assert_eq!(d.left.iter().collect::<Vec<_>>(), set(&[0, 1]));
        assert_eq!(d.right.iter().collect::<Vec<_>>(), set(&[3, 4]));
        let t = descents(&h(&s, "1 3"));
        assert_eq!(t.left, t.right);
        assert_eq!(t.left.len(), 2);
        let s2 = a_n(2);
        let c = descents(&h(&s2, "1 2 1"));
        assert_eq!(c.left.iter().collect::<Vec<_>>(), set(&[0]));
        assert_eq!(c.right.iter().collect::<Vec<_>>(), set(&[2]));
    }

    #[test]
    fn chains_of_example_heap() {
        let s = a_n(3);
        let chains = balanced_convex_chains(&h(&s, "1 3 2 1 3"), 3);
        let v: Vec<&[usize]> = chains.iter().map(|c| c.vertices()).collect();
        assert_eq!(v, vec![&[0, 2, 3][..], &[1, 2, 4][..]]);
    }

    #[test]
    fn chains_small_cases() {
        let s2 = a_n(2);
        let c = balanced_convex_chains(&h(&s2, "1 1"), 3);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].vertices(), &[0, 1]);
        let f = fig2_left();
        assert!(balanced_convex_chains(&h(&f, "1 3 2 4 1 3"), 3).is_empty());
    }

    #[test]
    fn longer_chains_when_asked() {
        let s2 = a_n(2);
        let e = h(&s2, "1 2 2 1");
        assert!(balanced_convex_chains(&e, 3).iter().all(|c| c.len() == 2));
        assert!(balanced_convex_chains(&e, 4).iter().any(|c| c.len() == 4));
    }

    #[test]
    fn p2_examples() {
        let s = a_n(3);
        assert!(!has_p2(&h(&s, "1 3 2 1 3")));
        assert!(has_p2(&h(&s, "1 3")));
        assert!(has_p2(&h(&fig2_left(), "1 3 2 4 1 3")));
    }

    #[test]
    fn contract_examples() {
        let s = a_n(3);
        let e = h(&s, "1 3 2 1 3");
        let c = BalancedConvexChain::new(&e, vec![0, 2, 3]).unwrap();
        let f = contract(&e, &c).unwrap();
        assert_eq!(f, e.subheap(&[0, 1, 4]).unwrap());

        let s2 = a_n(2);
        let e = h(&s2, "1 1");
        let c = BalancedConvexChain::new(&e, vec![0, 1]).unwrap();
        assert_eq!(contract(&e, &c).unwrap(), h(&s2, "1"));

        let e = h(&s2, "1 2 1");
        let c = BalancedConvexChain::new(&e, vec![0, 1, 2]).unwrap();
        assert_eq!(contract(&e, &c).unwrap(), h(&s2, "1"));
    }

    #[test]
    fn invalid_chains_are_rejected() {
        let s = a_n(3);
        let e = h(&s, "1 3 2 1 3");
        assert!(BalancedConvexChain::new(&e, vec![0, 2]).is_err()); // unbalanced
        assert!(BalancedConvexChain::new(&e, vec![0, 3]).is_err()); // not convex
        assert!(BalancedConvexChain::new(&e, vec![3, 0]).is_err()); // decreasing
        assert!(BalancedConvexChain::new(&e, vec![0, 9]).is_err());
        assert!(BalancedConvexChain::new(&e, vec![0]).is_err());
    }

    #[test]
    fn exposes_examples() {
        let s2 = a_n(2);
        let e = h(&s2, "1 2");
        assert_eq!(exposes(&e, 1).unwrap(), Exposure { plus: true, minus: false });
        // Removing the bottom vertex exposes the top one too.
        assert_eq!(exposes(&e, 0).unwrap(), Exposure { plus: false, minus: true });

        let s = a_n(3);
        let t = h(&s, "1 3");
        assert!(exposes(&t, 0).unwrap().is_none());
        assert!(exposes(&t, 1).unwrap().is_none());

        let w = h(&fig2_left(), "1 3 2 4 1 3");
        for v in 0..w.len() {
            assert!(exposes(&w, v).unwrap().is_none(), "vertex {v}");
        }
        assert!(exposes(&w, 6).is_err());
    }

    #[test]
    fn exposes_minus_from_a_branching_bottom() {
        let s3 = a_n(3);
        let f = h(&s3, "2 1 3");
        let x = exposes(&f, 0).unwrap();
        assert!(x.minus && !x.plus);
        let top = exposes(&f, 1).unwrap();
        // Removing one of two tops leaves 2 covered by the other.
        assert!(top.is_none());
    }

    #[test]
    fn p1_examples() {
        let s = a_n(3);
        assert!(has_p1(&h(&s, "1 3")));
        assert!(has_p1(&Heap::empty(s.clone())));
        assert!(!has_p1(&h(&fig2_left(), "1 3 2 4 1 3")));
        let e = h(&s, "2 1 3 2");
        let steps = dismantle(&e).unwrap();
        assert!(replay_dismantling(&e, &steps));
    }

    #[test]
    fn p2_agrees_with_chain_scan() {
        let s = a_n(3);
        for w in ["1 1", "1 2 1", "1 2 3 2 1", "2 1 3 2", "1 3 2 1 3"] {
            let e = h(&s, w);
            assert_eq!(has_p2(&e), balanced_convex_chains(&e, 3).is_empty(), "{w}");
        }
    }

    // Oracle for P1 on actual subheaps. Maximal vertices carry distinct
    // labels and stay maximal when another maximal vertex goes, so a new
    // differently-labelled maximal vertex shows up as a new label.
    fn p1_oracle(e: &Heap, memo: &mut HashMap<Vec<crate::structure::Piece>, bool>) -> bool {
        if let Some(&r) = memo.get(e.labels()) {
            return r;
        }
        let labels_of = |h: &Heap, set: VertexSet| -> Vec<_> {
            let mut l: Vec<_> = set.iter().map(|v| h.label(v)).collect();
            l.sort();
            l
        };
        let result = e.is_trivial()
            || (0..e.len()).any(|a| {
                let f = e.delete_vertex(a).unwrap();
                let fresh = |old: Vec<_>, new: Vec<_>| new.iter().any(|l| !old.contains(l));
                let plus = e.maximal().contains(a) && fresh(labels_of(e, e.maximal()), labels_of(&f, f.maximal()));
                let minus = e.minimal().contains(a) && fresh(labels_of(e, e.minimal()), labels_of(&f, f.minimal()));
                (plus || minus) && p1_oracle(&f, memo)
            });
        memo.insert(e.labels().to_vec(), result);
        result
    }

    fn structures() -> Vec<Arc<ConcurrencyStructure>> {
        vec![
            a_n(3),
            a_n(4),
            fig2_left(),
            Arc::new(ConcurrencyStructure::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])),
        ]
    }

    proptest::proptest! {
        #[test]
        fn p1_matches_subheap_oracle(which in 0usize..4, raw in proptest::collection::vec(0usize..4, 0..10)) {
            let s = &structures()[which];
            let word: Vec<_> = raw.iter().map(|&i| crate::structure::Piece::new(i % s.len())).collect();
            let e = Heap::from_word(s.clone(), &word).unwrap();
            proptest::prop_assert_eq!(has_p1(&e), p1_oracle(&e, &mut HashMap::new()));
            if let Some(steps) = dismantle(&e) {
                proptest::prop_assert!(replay_dismantling(&e, &steps));
            }
        }

        #[test]
        fn p2_matches_chain_scan(which in 0usize..4, raw in proptest::collection::vec(0usize..4, 0..10)) {
            let s = &structures()[which];
            let word: Vec<_> = raw.iter().map(|&i| crate::structure::Piece::new(i % s.len())).collect();
            let e = Heap::from_word(s.clone(), &word).unwrap();
            proptest::prop_assert_eq!(has_p2(&e), balanced_convex_chains(&e, 3).is_empty());
        }
    }

    #[test]
    fn stuck_heap_in_a4() {
        // (1 3)(2)(3)(2 4): every extremal removal leaves the neighbour
        // below or above it covered by a second vertex.
        let e = h(&a_n(4), "1 3 2 3 2 4");
        assert!((0..e.len()).all(|a| exposes(&e, a).unwrap().is_none()));
        assert!(!has_p1(&e));
        assert!(!p1_oracle(&e, &mut HashMap::new()));
    }
}
