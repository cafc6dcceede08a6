//! Exhaustive enumeration of heaps and theorem-level verification suites.
//!
//! Heaps are enumerated as Cartier–Foata factor sequences, so every heap up
//! to the size bound appears exactly once. Checks run in parallel; the
//! report aggregates commutative counters and a sorted violation list, so
//! its contents do not depend on scheduling.

use crate::classify::{classify_component, connected_components, witness_nonregular};
use crate::error::{Error, Result};
use crate::heap::Heap;
use crate::linalg::{boundary_map, is_acyclic, kernel_dim, FieldChoice};
use crate::props::{exposes, has_p1, has_p2};
use crate::structure::{ConcurrencyStructure, Piece};
use crate::tl::{deletion_test, tl_reduce};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

/// Enumeration is limited to structures whose pieces fit in a bit mask.
pub const MAX_ENUMERATION_PIECES: usize = 64;

#[derive(Debug, Clone)]
pub struct EnumerationSpec {
    pub structure: Arc<ConcurrencyStructure>,
    pub max_vertices: usize,
    /// At most this many heaps of each size are yielded.
    pub per_size_cap: Option<u64>,
    pub time_budget: Option<Duration>,
    pub field: FieldChoice,
}

impl EnumerationSpec {
    pub fn new(structure: Arc<ConcurrencyStructure>, max_vertices: usize) -> EnumerationSpec {
        EnumerationSpec {
            structure,
            max_vertices,
            per_size_cap: None,
            time_budget: None,
            field: FieldChoice::Rational,
        }
    }

    pub fn with_per_size_cap(mut self, cap: u64) -> Self {
        self.per_size_cap = Some(cap);
        self
    }

    pub fn with_time_budget(mut self, budget: Duration) -> Self {
        self.time_budget = Some(budget);
        self
    }

    pub fn with_field(mut self, field: FieldChoice) -> Self {
        self.field = field;
        self
    }
}

/// Depth-first stream of heaps in Cartier–Foata order.
pub struct HeapEnumerator {
    structure: Arc<ConcurrencyStructure>,
    max: usize,
    cap: Option<u64>,
    deadline: Option<Instant>,
    p2_only: bool,
    // Nonempty sets of pairwise non-concurrent pieces, as masks and words.
    layers: Vec<(u64, Vec<Piece>)>,
    // Pieces concurrent to some piece of the mask's layer, per layer index.
    reach: Vec<u64>,
    stack: Vec<(Vec<Piece>, Option<usize>)>,
    yielded: Vec<u64>,
    truncated: Arc<AtomicBool>,
}

impl HeapEnumerator {
    fn new(spec: &EnumerationSpec, p2_only: bool) -> Result<HeapEnumerator> {
        let s = &spec.structure;
        if s.len() > MAX_ENUMERATION_PIECES {
            return Err(Error::Precondition(format!(
                "enumeration supports at most {MAX_ENUMERATION_PIECES} pieces, structure has {}",
                s.len()
            )));
        }
        let conc_mask: Vec<u64> = s
            .pieces()
            .map(|a| s.pieces().filter(|&b| s.concurrent(a, b)).fold(0, |m, b| m | 1 << b.index()))
            .collect();
        let mut layers = Vec::new();
        independent_sets(&conc_mask, 0, 0, &mut layers);
        layers.sort_by(|a: &(u64, Vec<Piece>), b| a.1.cmp(&b.1));
        let reach = layers
            .iter()
            .map(|(_, w)| w.iter().fold(0, |m, p| m | conc_mask[p.index()]))
            .collect();
        Ok(HeapEnumerator {
            structure: s.clone(),
            max: spec.max_vertices,
            cap: spec.per_size_cap,
            deadline: spec.time_budget.map(|b| Instant::now() + b),
            p2_only,
            layers,
            reach,
            stack: vec![(Vec::new(), None)],
            yielded: vec![0; spec.max_vertices + 1],
            truncated: Arc::new(AtomicBool::new(false)),
        })
    }

    /// Set once the cap or the time budget cut the stream short.
    pub fn truncated_flag(&self) -> Arc<AtomicBool> {
        self.truncated.clone()
    }
}

fn independent_sets(conc: &[u64], from: usize, chosen: u64, out: &mut Vec<(u64, Vec<Piece>)>) {
    for p in from..conc.len() {
        if conc[p] & chosen == 0 {
            let mask = chosen | 1 << p;
            let word = (0..conc.len()).filter(|i| mask >> i & 1 == 1).map(Piece::new).collect();
            out.push((mask, word));
            independent_sets(conc, p + 1, mask, out);
        }
    }
}

impl Iterator for HeapEnumerator {
    type Item = Heap;

    fn next(&mut self) -> Option<Heap> {
        while let Some((word, last)) = self.stack.pop() {
            if self.deadline.is_some_and(|d| Instant::now() >= d) {
                self.truncated.store(true, Ordering::Relaxed);
                self.stack.clear();
                return None;
            }
            let heap = Heap::from_word(self.structure.clone(), &word).expect("pieces of this structure");
            if self.p2_only && !has_p2(&heap) {
                continue;
            }
            // Children in reverse so that the smallest layer is visited first.
            for (i, (mask, layer)) in self.layers.iter().enumerate().rev() {
                let fits = word.len() + layer.len() <= self.max;
                if fits && last.is_none_or(|l| mask & !self.reach[l] == 0) {
                    let mut w = word.clone();
                    w.extend_from_slice(layer);
                    self.stack.push((w, Some(i)));
                }
            }
            let n = word.len();
            if self.cap.is_some_and(|c| self.yielded[n] >= c) {
                self.truncated.store(true, Ordering::Relaxed);
                continue;
            }
            self.yielded[n] += 1;
            return Some(heap);
        }
        None
    }
}

/// Every heap with at most `max_vertices` vertices, each exactly once.
pub fn enumerate_heaps(spec: &EnumerationSpec) -> Result<HeapEnumerator> {
    HeapEnumerator::new(spec, false)
}

/// Every heap with property P2 and at most `max_vertices` vertices. Deleting
/// the top Cartier–Foata layer keeps P2, so non-P2 prefixes are pruned.
pub fn enumerate_p2_heaps(spec: &EnumerationSpec) -> Result<HeapEnumerator> {
    HeapEnumerator::new(spec, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Universal,
    Regularity,
    Kernel,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub kind: String,
    pub word: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub structure: String,
    pub suite: Suite,
    pub field: String,
    pub max_vertices: usize,
    /// `heaps_per_size[n]` heaps with `n` vertices were checked.
    pub heaps_per_size: Vec<u64>,
    pub counters: BTreeMap<String, u64>,
    pub violations: Vec<Violation>,
    pub truncated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<RegularityVerdict>,
    /// Excluded from serialization so reports are reproducible byte for byte.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn heaps_checked(&self) -> u64 {
        self.heaps_per_size.iter().sum()
    }

    pub fn counter(&self, name: &str) -> u64 {
        self.counters.get(name).copied().unwrap_or(0)
    }
}

/// What the regularity suite concluded about the structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegularityVerdict {
    pub classified_r: bool,
    pub families: Vec<String>,
    /// Smallest P2-but-not-P1 heap found by enumeration.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Default)]
struct Tally {
    per_size: Vec<u64>,
    counters: BTreeMap<&'static str, u64>,
    violations: Vec<Violation>,
    // Smallest heap (by size, then canonical word) offered as evidence.
    evidence: Option<(usize, String)>,
}

impl Tally {
    fn count(&mut self, name: &'static str) {
        *self.counters.entry(name).or_insert(0) += 1;
    }

    fn violate(&mut self, kind: &str, heap: &Heap) {
        self.violations.push(Violation {
            kind: kind.to_string(),
            word: heap.word_string(),
        });
    }

    fn offer(&mut self, heap: &Heap) {
        let key = (heap.len(), heap.word_string());
        if self.evidence.as_ref().is_none_or(|best| key < *best) {
            self.evidence = Some(key);
        }
    }

    fn saw(&mut self, heap: &Heap) {
        if self.per_size.len() <= heap.len() {
            self.per_size.resize(heap.len() + 1, 0);
        }
        self.per_size[heap.len()] += 1;
    }

    fn merge(mut self, other: Tally) -> Tally {
        if self.per_size.len() < other.per_size.len() {
            self.per_size.resize(other.per_size.len(), 0);
        }
        for (i, c) in other.per_size.into_iter().enumerate() {
            self.per_size[i] += c;
        }
        for (k, v) in other.counters {
            *self.counters.entry(k).or_insert(0) += v;
        }
        self.violations.extend(other.violations);
        self.evidence = match (self.evidence, other.evidence) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Short identifier of a structure, e.g. `pieces 1 2 3; conc 1-2 2-3`.
pub fn structure_id(s: &ConcurrencyStructure) -> String {
    let pairs: Vec<String> = s
        .concurrent_pairs()
        .iter()
        .map(|&(a, b)| format!("{}-{}", s.name(a), s.name(b)))
        .collect();
    format!("pieces {}; conc {}", s.names().join(" "), pairs.join(" "))
}

fn run(
    spec: &EnumerationSpec,
    suite: Suite,
    heaps: HeapEnumerator,
    check: impl Fn(&Heap, &mut Tally) + Sync,
) -> (VerificationReport, Option<String>) {
    let start = Instant::now();
    let truncated = heaps.truncated_flag();
    let tally = heaps
        .par_bridge()
        .fold(Tally::default, |mut t, heap| {
            t.saw(&heap);
            check(&heap, &mut t);
            t
        })
        .reduce(Tally::default, Tally::merge);
    let mut violations = tally.violations;
    violations.sort();
    let mut per_size = tally.per_size;
    per_size.resize(spec.max_vertices + 1, 0);
    let report = VerificationReport {
        structure: structure_id(&spec.structure),
        suite,
        field: spec.field.to_string(),
        max_vertices: spec.max_vertices,
        heaps_per_size: per_size,
        counters: tally.counters.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        violations,
        truncated: truncated.load(Ordering::Relaxed),
        verdict: None,
        wall_time: start.elapsed(),
    };
    (report, tally.evidence.map(|(_, w)| w))
}

fn strongly_acyclic_given(e: &Heap, acyclic: bool, field: FieldChoice) -> bool {
    acyclic && (0..e.len()).all(|v| is_acyclic(&e.delete_vertex(v).expect("in range"), field))
}

/// Strong acyclicity implies P2, and P1 implies acyclicity, for every heap.
pub fn check_universal_implications(spec: &EnumerationSpec) -> Result<VerificationReport> {
    let field = spec.field;
    Ok(run(spec, Suite::Universal, enumerate_heaps(spec)?, |e, t| {
        let p2 = has_p2(e);
        let p1 = has_p1(e);
        let acyclic = is_acyclic(e, field);
        let strong = strongly_acyclic_given(e, acyclic, field);
        for (name, holds) in [("p2", p2), ("p1", p1), ("acyclic", acyclic), ("strongly_acyclic", strong)] {
            if holds {
                t.count(name);
            }
        }
        if strong && !p2 {
            t.violate("strongly-acyclic-without-p2", e);
        }
        if p1 && !acyclic {
            t.violate("p1-without-acyclic", e);
        }
    })
    .0)
}

/// On structures classified R: every heap satisfies P2 ⇒ P1, P2 ⇔ strongly
/// acyclic, P1 ⇔ acyclic, and every deletion from a P2 heap reduces to a
/// basis monomial without δ. On other structures: a P2-but-not-P1 heap is
/// searched for within the bound and the classifier's witness is verified.
pub fn check_regularity(spec: &EnumerationSpec) -> Result<VerificationReport> {
    let s = &spec.structure;
    let families: Vec<String> = connected_components(s)
        .iter()
        .map(|c| classify_component(&c.structure).map(|t| t.to_string()))
        .collect::<Result<_>>()?;
    let classified_r = crate::classify::has_property_r(s);
    let field = spec.field;

    let (mut report, evidence) = if classified_r {
        run(spec, Suite::Regularity, enumerate_heaps(spec)?, |e, t| {
            let p2 = has_p2(e);
            let p1 = has_p1(e);
            let acyclic = is_acyclic(e, field);
            let strong = strongly_acyclic_given(e, acyclic, field);
            if p2 {
                t.count("p2");
            }
            if p2 && !p1 {
                t.violate("p2-without-p1", e);
            }
            if p2 != strong {
                t.violate(if p2 { "p2-not-strongly-acyclic" } else { "strongly-acyclic-without-p2" }, e);
            }
            if p1 != acyclic {
                t.violate(if p1 { "p1-not-acyclic" } else { "acyclic-without-p1" }, e);
            }
            if p2 {
                let outcomes = deletion_test(e).expect("heap has P2");
                if outcomes.iter().all(|o| o.is_basis()) {
                    t.count("deletions_basis");
                } else {
                    t.violate("deletion-with-delta", e);
                }
            }
        })
    } else {
        run(spec, Suite::Regularity, enumerate_p2_heaps(spec)?, |e, t| {
            t.count("p2");
            if has_p1(e) {
                return;
            }
            t.count("p2_not_p1");
            t.offer(e);
            // The double keeps P2 whenever no minimal vertex exposes a
            // neighbour; without that hypothesis it can lose it.
            let minus = (0..e.len()).any(|a| exposes(e, a).expect("in range").minus);
            match (has_p2(&e.double()), minus) {
                (true, _) => t.count("double_p2"),
                (false, true) => t.count("double_not_p2_minus_exposed"),
                (false, false) => t.violate("double-without-p2", e),
            }
        })
    };

    let mut verdict = RegularityVerdict {
        classified_r,
        families,
        counterexample: evidence,
        witness: None,
    };
    if !classified_r {
        match witness_nonregular(s) {
            Ok(Some(w)) => verdict.witness = Some(w.heap.word_string()),
            Ok(None) => unreachable!("structure classified non-R"),
            Err(err) => report.violations.push(Violation {
                kind: format!("witness-failed: {err}"),
                word: String::new(),
            }),
        }
    }
    report.verdict = Some(verdict);
    Ok(report)
}

/// `dim ker ∂(H) = m + dim ker ∂(G)` where `H` reduces to `δ^m · G`.
pub fn check_kernel_identity(spec: &EnumerationSpec) -> Result<VerificationReport> {
    let field = spec.field;
    Ok(run(spec, Suite::Kernel, enumerate_heaps(spec)?, |e, t| {
        let r = tl_reduce(e);
        let lhs = kernel_dim(&boundary_map(e), field);
        let rhs = r.delta_exponent as usize + kernel_dim(&boundary_map(&r.basis), field);
        if r.delta_exponent > 0 {
            t.count("reducible");
        }
        if lhs != rhs {
            t.violate("kernel-identity", e);
        }
    })
    .0)
}

pub fn run_suite(spec: &EnumerationSpec, suite: Suite) -> Result<VerificationReport> {
    match suite {
        Suite::Universal => check_universal_implications(spec),
        Suite::Regularity => check_regularity(spec),
        Suite::Kernel => check_kernel_identity(spec),
    }
}

/// All `2^(n choose 2)` graphs on the pieces `1..=n`.
pub fn labelled_graphs(n: usize) -> impl Iterator<Item = Arc<ConcurrencyStructure>> {
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    (0u64..1 << slots.len()).map(move |bits| {
        let edges: Vec<(usize, usize)> = slots
            .iter()
            .enumerate()
            .filter(|(k, _)| bits >> k & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        Arc::new(ConcurrencyStructure::from_edges(n, &edges))
    })
}

pub fn connected_labelled_graphs(n: usize) -> impl Iterator<Item = Arc<ConcurrencyStructure>> {
    labelled_graphs(n).filter(|s| connected_components(s).len() == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Arc<ConcurrencyStructure> {
        Arc::new(ConcurrencyStructure::from_edges(n, edges))
    }

    fn words(spec: &EnumerationSpec) -> Vec<String> {
        enumerate_heaps(spec).unwrap().map(|h| h.word_string()).collect()
    }

    #[test]
    fn enumeration_small_cases() {
        let a2 = graph(2, &[(0, 1)]);
        assert_eq!(words(&EnumerationSpec::new(a2, 2)).len(), 7);
        let free = graph(2, &[]);
        let mut w = words(&EnumerationSpec::new(free, 2));
        w.sort();
        assert_eq!(w, vec!["", "1", "1 1", "1 2", "2", "2 2"]);
        assert_eq!(words(&EnumerationSpec::new(graph(3, &[(0, 1)]), 0)), vec![""]);
    }

    #[test]
    fn p2_enumeration_is_a_filter() {
        let s = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let spec = EnumerationSpec::new(s, 7);
        let all: Vec<Heap> = enumerate_heaps(&spec).unwrap().filter(has_p2).collect();
        let pruned: Vec<Heap> = enumerate_p2_heaps(&spec).unwrap().collect();
        assert_eq!(all, pruned);
    }

    #[test]
    fn cap_and_budget_truncate() {
        let s = graph(3, &[(0, 1), (1, 2)]);
        let e = enumerate_heaps(&EnumerationSpec::new(s.clone(), 5).with_per_size_cap(2)).unwrap();
        let flag = e.truncated_flag();
        let got: Vec<Heap> = e.collect();
        assert_eq!(got.len(), 1 + 2 * 5);
        assert!(flag.load(Ordering::Relaxed));

        let e = enumerate_heaps(&EnumerationSpec::new(s, 5).with_time_budget(Duration::ZERO)).unwrap();
        let flag = e.truncated_flag();
        assert_eq!(e.count(), 0);
        assert!(flag.load(Ordering::Relaxed));
    }

    #[test]
    fn suites_on_small_structures() {
        let a3 = graph(3, &[(0, 1), (1, 2)]);
        let r = check_universal_implications(&EnumerationSpec::new(a3.clone(), 5)).unwrap();
        assert!(r.passed() && !r.truncated);
        let r = check_regularity(&EnumerationSpec::new(a3.clone(), 5)).unwrap();
        assert!(r.passed());
        assert!(r.verdict.unwrap().classified_r);
        let r = check_kernel_identity(&EnumerationSpec::new(a3, 5)).unwrap();
        assert!(r.passed());
        assert!(r.counter("reducible") > 0);

        let empty = graph(0, &[]);
        let r = check_universal_implications(&EnumerationSpec::new(empty, 4)).unwrap();
        assert_eq!(r.heaps_checked(), 1);
    }

    #[test]
    fn regularity_finds_even_cycle_witness() {
        let c4 = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let r = check_regularity(&EnumerationSpec::new(c4, 4)).unwrap();
        assert!(r.passed());
        let v = r.verdict.unwrap();
        assert!(!v.classified_r);
        assert_eq!(v.counterexample.as_deref(), Some("1 3 2 4"));
        assert_eq!(v.witness.as_deref(), Some("1 3 2 4"));
    }

    #[test]
    fn doubles_of_non_p1_heaps() {
        let c4 = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let r = check_regularity(&EnumerationSpec::new(c4, 8)).unwrap();
        assert!(r.passed());
        assert!(r.counter("double_p2") > 0);
        // (1)(2 4)(1 3) is among these.
        assert!(r.counter("double_not_p2_minus_exposed") > 0);
        assert_eq!(
            r.counter("p2_not_p1"),
            r.counter("double_p2") + r.counter("double_not_p2_minus_exposed")
        );
    }

    #[test]
    fn graph_generators() {
        assert_eq!(labelled_graphs(4).count(), 64);
        assert_eq!(connected_labelled_graphs(4).count(), 38);
        assert_eq!(connected_labelled_graphs(3).count(), 4);
    }
}
