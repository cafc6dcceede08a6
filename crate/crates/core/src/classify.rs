//! Recognition of concurrency graphs with property R and construction of
//! P2-but-not-P1 witnesses for the others.

use crate::error::{Error, Result};
use crate::heap::Heap;
use crate::props::{has_p1, has_p2};
use crate::structure::{ConcurrencyStructure, Piece};
use serde::Serialize;
use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonRegularReason {
    TriangleNotComplete,
    EvenCycle,
    CircuitNotCycle,
    TwoBranchPoints,
    ValencyAtLeastFour,
    ContainsGamma133,
    ContainsGamma223,
}

impl fmt::Display for NonRegularReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NonRegularReason::TriangleNotComplete => "contains a triangle but is not complete",
            NonRegularReason::EvenCycle => "even cycle",
            NonRegularReason::CircuitNotCycle => "contains a circuit but is not a cycle",
            NonRegularReason::TwoBranchPoints => "two branch points",
            NonRegularReason::ValencyAtLeastFour => "vertex of valency at least 4",
            NonRegularReason::ContainsGamma133 => "contains Gamma(1,3,3)",
            NonRegularReason::ContainsGamma223 => "contains Gamma(2,2,3)",
        })
    }
}

/// Family of a connected concurrency graph. Parameters count vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FamilyTag {
    Complete(usize),
    PathA(usize),
    TypeD(usize),
    TypeE(usize),
    OddCycleAffineA(usize),
    AffineE6,
    NonR {
        reason: NonRegularReason,
        /// Pieces of a forbidden full subgraph.
        substructure: Vec<String>,
    },
}

impl FamilyTag {
    pub fn has_r(&self) -> bool {
        !matches!(self, FamilyTag::NonR { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilyTag::Complete(_) => "Complete",
            FamilyTag::PathA(_) => "PathA",
            FamilyTag::TypeD(_) => "TypeD",
            FamilyTag::TypeE(_) => "TypeE",
            FamilyTag::OddCycleAffineA(_) => "OddCycleAffineA",
            FamilyTag::AffineE6 => "AffineE6",
            FamilyTag::NonR { .. } => "NonR",
        }
    }

    pub fn params(&self) -> Vec<usize> {
        match *self {
            FamilyTag::Complete(n)
            | FamilyTag::PathA(n)
            | FamilyTag::TypeD(n)
            | FamilyTag::TypeE(n)
            | FamilyTag::OddCycleAffineA(n) => vec![n],
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyTag::AffineE6 => f.write_str("AffineE6"),
            FamilyTag::NonR { reason, .. } => write!(f, "NonR({reason})"),
            tag => write!(f, "{}({})", tag.name(), tag.params()[0]),
        }
    }
}

/// A tree with one vertex of valency 3 and arms of lengths `p ≤ q ≤ r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaPqr {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub center: Piece,
    /// Arms as paths leaving the center, shortest first.
    pub arms: [Vec<Piece>; 3],
}

/// A connected component as a full substructure.
#[derive(Debug, Clone)]
pub struct Component {
    /// Pieces of the parent structure, in alphabet order.
    pub pieces: Vec<Piece>,
    pub structure: Arc<ConcurrencyStructure>,
}

#[derive(Debug, Clone)]
pub struct WitnessCertificate {
    pub reason: NonRegularReason,
    pub heap: Heap,
    pub has_p2: bool,
    pub has_p1: bool,
}

// Simple graph on 0..n, adjacency lists sorted.
struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    fn of(s: &ConcurrencyStructure) -> Graph {
        let n = s.len();
        let adj = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| s.adjacent(Piece::new(i), Piece::new(j)))
                    .collect()
            })
            .collect();
        Graph { adj }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    fn valency(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Components in order of their smallest vertex.
    fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Shortest path from `from` to `to` avoiding `blocked`, ties broken
    /// toward smaller vertices.
    fn shortest_path(&self, from: usize, to: usize, blocked: &[usize]) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.len()];
        let mut seen = vec![false; self.len()];
        for &b in blocked {
            seen[b] = true;
        }
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    fn has_triangle(&self) -> bool {
        (0..self.len()).any(|a| {
            self.adj[a]
                .iter()
                .any(|&b| b > a && self.adj[b].iter().any(|&c| c > b && self.adjacent(a, c)))
        })
    }

    /// Arm leaving `center` through `first`, following valency-2 vertices.
    fn arm(&self, center: usize, first: usize) -> Vec<usize> {
        let mut arm = vec![first];
        let (mut prev, mut cur) = (center, first);
        while self.valency(cur) == 2 {
            let next = if self.adj[cur][0] == prev {
                self.adj[cur][1]
            } else {
                self.adj[cur][0]
            };
            arm.push(next);
            prev = cur;
            cur = next;
        }
        arm
    }
}

pub fn connected_components(s: &ConcurrencyStructure) -> Vec<Component> {
    Graph::of(s)
        .components()
        .into_iter()
        .map(|c| {
            let pieces: Vec<Piece> = c.into_iter().map(Piece::new).collect();
            Component {
                structure: Arc::new(s.induced(&pieces)),
                pieces,
            }
        })
        .collect()
}

fn check_connected(g: &Graph) -> Result<()> {
    match g.components().len() {
        0 => Err(Error::EmptyStructure),
        1 => Ok(()),
        _ => Err(Error::NotConnected),
    }
}

/// Recognizes `Γ(p, q, r)`: a tree with exactly one vertex of valency 3 and
/// none higher.
pub fn gamma_pqr(s: &ConcurrencyStructure) -> Option<GammaPqr> {
    let g = Graph::of(s);
    if g.len() == 0 || g.components().len() != 1 || g.num_edges() + 1 != g.len() {
        return None;
    }
    let branch: Vec<usize> = (0..g.len()).filter(|&v| g.valency(v) >= 3).collect();
    let [c] = branch[..] else { return None };
    if g.valency(c) != 3 {
        return None;
    }
    let mut arms: Vec<Vec<usize>> = g.adj[c].iter().map(|&f| g.arm(c, f)).collect();
    arms.sort_by_key(|a| (a.len(), a[0]));
    let to_pieces = |a: &Vec<usize>| a.iter().copied().map(Piece::new).collect::<Vec<_>>();
    Some(GammaPqr {
        p: arms[0].len(),
        q: arms[1].len(),
        r: arms[2].len(),
        center: Piece::new(c),
        arms: [to_pieces(&arms[0]), to_pieces(&arms[1]), to_pieces(&arms[2])],
    })
}

fn reason_of(s: &ConcurrencyStructure, g: &Graph) -> std::result::Result<FamilyTag, NonRegularReason> {
    let n = g.len();
    if g.num_edges() == n * (n - 1) / 2 {
        return Ok(FamilyTag::Complete(n));
    }
    if (0..n).all(|v| g.valency(v) == 2) {
        return if n % 2 == 1 {
            Ok(FamilyTag::OddCycleAffineA(n))
        } else {
            Err(NonRegularReason::EvenCycle)
        };
    }
    if g.num_edges() + 1 == n {
        let branch: Vec<usize> = (0..n).filter(|&v| g.valency(v) >= 3).collect();
        return match branch[..] {
            [] => Ok(FamilyTag::PathA(n)),
            [c] if g.valency(c) >= 4 => Err(NonRegularReason::ValencyAtLeastFour),
            [_] => {
                let t = gamma_pqr(s).expect("tree with one valency-3 vertex");
                match (t.p, t.q, t.r) {
                    (1, 1, r) => Ok(FamilyTag::TypeD(r + 3)),
                    (1, 2, r) => Ok(FamilyTag::TypeE(r + 4)),
                    (2, 2, 2) => Ok(FamilyTag::AffineE6),
                    (_, q, _) if q >= 3 => Err(NonRegularReason::ContainsGamma133),
                    _ => Err(NonRegularReason::ContainsGamma223),
                }
            }
            _ => Err(NonRegularReason::TwoBranchPoints),
        };
    }
    if g.has_triangle() {
        Err(NonRegularReason::TriangleNotComplete)
    } else {
        Err(NonRegularReason::CircuitNotCycle)
    }
}

/// Classifies a connected, nonempty concurrency graph.
pub fn classify_component(s: &ConcurrencyStructure) -> Result<FamilyTag> {
    let g = Graph::of(s);
    check_connected(&g)?;
    match reason_of(s, &g) {
        Ok(tag) => Ok(tag),
        Err(reason) => {
            let mut substructure: Vec<usize> = candidates(s, &g, reason)
                .into_iter()
                .next()
                .unwrap_or_default();
            substructure.sort_unstable();
            substructure.dedup();
            Ok(FamilyTag::NonR {
                reason,
                substructure: substructure
                    .into_iter()
                    .map(|v| s.name(Piece::new(v)).to_string())
                    .collect(),
            })
        }
    }
}

/// Property R: every connected component is complete or in the list of
/// regular families. The empty graph has property R.
pub fn has_property_r(s: &ConcurrencyStructure) -> bool {
    connected_components(s).iter().all(|c| {
        classify_component(&c.structure)
            .expect("components are connected and nonempty")
            .has_r()
    })
}

/// Witness words for a non-R component, in order of preference.
fn candidates(s: &ConcurrencyStructure, g: &Graph, reason: NonRegularReason) -> Vec<Vec<usize>> {
    let _ = s;
    let n = g.len();
    let mut out = Vec::new();
    match reason {
        NonRegularReason::TriangleNotComplete => {
            for q in quadruples(n) {
                let edges: Vec<(usize, usize)> = pairs(&q).filter(|&(a, b)| g.adjacent(a, b)).collect();
                let deg = |v: usize| edges.iter().filter(|&&(a, b)| a == v || b == v).count();
                match edges.len() {
                    // K4 minus an edge: the missing pair commutes.
                    5 => {
                        let (u, v) = pairs(&q).find(|&(a, b)| !g.adjacent(a, b)).unwrap();
                        let rest: Vec<usize> = q.iter().copied().filter(|&w| w != u && w != v).collect();
                        for (w, z) in [(rest[0], rest[1]), (rest[1], rest[0])] {
                            out.push(vec![u, v, w, z, u, v]);
                        }
                    }
                    // Triangle with a pendant vertex.
                    4 if q.iter().any(|&v| deg(v) == 1) => {
                        let p = *q.iter().find(|&&v| deg(v) == 1).unwrap();
                        let hub = *q.iter().find(|&&v| deg(v) == 3).unwrap();
                        let rest: Vec<usize> = q.iter().copied().filter(|&w| w != p && w != hub).collect();
                        for (a, b) in [(rest[0], rest[1]), (rest[1], rest[0])] {
                            out.push(vec![p, b, hub, a, b, hub, p, a]);
                        }
                    }
                    _ => {}
                }
            }
        }
        NonRegularReason::EvenCycle => {
            let mut cycle = vec![0];
            let mut prev = usize::MAX;
            let mut cur = 0;
            loop {
                let next = *g.adj[cur].iter().find(|&&w| w != prev).unwrap();
                if next == 0 {
                    break;
                }
                cycle.push(next);
                prev = cur;
                cur = next;
            }
            let mut word: Vec<usize> = cycle.iter().step_by(2).copied().collect();
            word.extend(cycle.iter().skip(1).step_by(2));
            out.push(word);
        }
        NonRegularReason::CircuitNotCycle => {
            // (x g_k)(g_1)(g_2)...(g_k)(g_1)(x g_2) for a cycle g_1..g_k and
            // x off the cycle adjacent to g_1.
            let mut found = Vec::new();
            for x in 0..n {
                for &g1 in &g.adj[x] {
                    for (i, &u) in g.adj[g1].iter().enumerate() {
                        for &v in &g.adj[g1][i + 1..] {
                            if u == x || v == x {
                                continue;
                            }
                            for (a, b) in [(u, v), (v, u)] {
                                if let Some(path) = g.shortest_path(a, b, &[x, g1]) {
                                    let mut cycle = vec![g1];
                                    cycle.extend(path);
                                    let touching = cycle.iter().filter(|&&c| g.adjacent(x, c)).count();
                                    found.push((touching, cycle.len(), x, cycle));
                                }
                            }
                        }
                    }
                }
            }
            found.sort();
            for (_, _, x, cycle) in found {
                let k = cycle.len();
                let mut word = vec![x, cycle[k - 1]];
                word.extend(&cycle);
                word.extend([cycle[0], x, cycle[1]]);
                out.push(word);
            }
        }
        NonRegularReason::TwoBranchPoints => {
            let branch: Vec<usize> = (0..n).filter(|&v| g.valency(v) >= 3).collect();
            let mut paths: Vec<Vec<usize>> = Vec::new();
            for (i, &c) in branch.iter().enumerate() {
                for &d in &branch[i + 1..] {
                    if let Some(p) = g.shortest_path(c, d, &[]) {
                        paths.push(p);
                    }
                }
            }
            paths.sort_by_key(|p| (p.len(), p.clone()));
            for path in paths {
                let k = path.len();
                let xs: Vec<usize> = g.adj[path[0]].iter().copied().filter(|&w| w != path[1]).collect();
                let ys: Vec<usize> = g.adj[path[k - 1]].iter().copied().filter(|&w| w != path[k - 2]).collect();
                let mut word = vec![xs[0], xs[1]];
                word.extend(&path);
                word.extend([ys[0], ys[1]]);
                out.push(word);
            }
        }
        NonRegularReason::ValencyAtLeastFour => {
            for c in (0..n).filter(|&v| g.valency(v) >= 4) {
                let x = &g.adj[c];
                out.push(vec![x[0], x[1], c, x[2], x[3]]);
            }
        }
        NonRegularReason::ContainsGamma133 | NonRegularReason::ContainsGamma223 => {
            let Some(t) = gamma_pqr(s) else { return out };
            let arm = |i: usize, j: usize| t.arms[i][j].index();
            let c = t.center.index();
            for (qi, ri) in [(1, 2), (2, 1)] {
                if reason == NonRegularReason::ContainsGamma133 {
                    // Path a-b-c-d-e-f-g with x on d.
                    let (a, b, cc, d) = (arm(qi, 2), arm(qi, 1), arm(qi, 0), c);
                    let (e, f, gg) = (arm(ri, 0), arm(ri, 1), arm(ri, 2));
                    let x = arm(0, 0);
                    out.push(vec![a, cc, x, b, d, cc, e, d, f, x, e, gg]);
                } else {
                    // Center c with arms c-d-e, c-f-g and c-b-a-x.
                    let (pi, qi) = (qi - 1, 2 - qi);
                    let (d, e) = (arm(pi, 0), arm(pi, 1));
                    let (f, gg) = (arm(qi, 0), arm(qi, 1));
                    let (b, a, x) = (arm(2, 0), arm(2, 1), arm(2, 2));
                    out.push(vec![
                        x, b, f, a, c, b, d, c, e, d, f, c, gg, b, f, a, c, x, b, d,
                    ]);
                }
            }
        }
    }
    out
}

fn quadruples(n: usize) -> impl Iterator<Item = [usize; 4]> {
    (0..n).flat_map(move |a| {
        (a + 1..n).flat_map(move |b| {
            (b + 1..n).flat_map(move |c| (c + 1..n).map(move |d| [a, b, c, d]))
        })
    })
}

fn pairs(q: &[usize; 4]) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..4).flat_map(move |i| (i + 1..4).map(move |j| (q[i], q[j])))
}

fn certify(reason: NonRegularReason, heap: Heap) -> Option<WitnessCertificate> {
    let p2 = has_p2(&heap);
    let p1 = p2 && has_p1(&heap);
    (p2 && !p1).then_some(WitnessCertificate {
        reason,
        heap,
        has_p2: p2,
        has_p1: p1,
    })
}

/// Builds and verifies a P2-but-not-P1 heap for a non-R component, embedded
/// into `full` by the canonical inclusion.
pub fn witness_for_component(
    component: &Arc<ConcurrencyStructure>,
    full: &Arc<ConcurrencyStructure>,
) -> Result<WitnessCertificate> {
    let g = Graph::of(component);
    check_connected(&g)?;
    let reason = match reason_of(component, &g) {
        Ok(tag) => {
            return Err(Error::Precondition(format!(
                "component is {tag}, which has property R"
            )))
        }
        Err(reason) => reason,
    };
    let tried = candidates(component, &g, reason);
    for word in &tried {
        let pieces: Vec<Piece> = word.iter().copied().map(Piece::new).collect();
        let local = Heap::from_word(component.clone(), &pieces)?;
        if certify(reason, local.clone()).is_none() {
            log::debug!("candidate {} rejected", local.word_string());
            continue;
        }
        let embedded = local.embed(full)?;
        return certify(reason, embedded.clone()).ok_or_else(|| {
            Error::WitnessVerification(format!(
                "{} lost P2 or gained P1 under embedding",
                embedded.word_string()
            ))
        });
    }
    Err(Error::WitnessVerification(format!(
        "no candidate for `{reason}` has P2 but not P1 ({} tried)",
        tried.len()
    )))
}

/// A witness for the first non-R component, or `None` if the structure has
/// property R.
pub fn witness_nonregular(s: &Arc<ConcurrencyStructure>) -> Result<Option<WitnessCertificate>> {
    for c in connected_components(s) {
        if !classify_component(&c.structure)?.has_r() {
            return witness_for_component(&c.structure, s).map(Some);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Arc<ConcurrencyStructure> {
        Arc::new(ConcurrencyStructure::from_edges(n, edges))
    }

    fn path(n: usize) -> Vec<(usize, usize)> {
        (1..n).map(|i| (i - 1, i)).collect()
    }

    fn cycle(n: usize) -> Vec<(usize, usize)> {
        let mut e = path(n);
        e.push((n - 1, 0));
        e
    }

    fn complete(n: usize) -> Vec<(usize, usize)> {
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
    }

    // Center 0, arms of the given lengths.
    fn gamma(p: usize, q: usize, r: usize) -> Arc<ConcurrencyStructure> {
        let mut edges = Vec::new();
        let mut next = 1;
        for len in [p, q, r] {
            let mut prev = 0;
            for _ in 0..len {
                edges.push((prev, next));
                prev = next;
                next += 1;
            }
        }
        graph(next, &edges)
    }

    fn tag(s: &ConcurrencyStructure) -> FamilyTag {
        classify_component(s).unwrap()
    }

    fn reason(s: &ConcurrencyStructure) -> Option<NonRegularReason> {
        match tag(s) {
            FamilyTag::NonR { reason, .. } => Some(reason),
            _ => None,
        }
    }

    #[test]
    fn components() {
        assert_eq!(connected_components(&graph(3, &path(3))).len(), 1);
        assert_eq!(connected_components(&graph(2, &[])).len(), 2);
        let s = graph(5, &[(0, 1), (2, 3), (3, 4), (2, 4)]);
        let comps = connected_components(&s);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].structure.concurrent_pairs().len(), 1);
        assert_eq!(comps[1].structure.concurrent_pairs().len(), 3);
        assert_eq!(comps[1].structure.names(), &["3", "4", "5"]);
    }

    #[test]
    fn regular_families() {
        assert_eq!(tag(&graph(1, &[])), FamilyTag::Complete(1));
        assert_eq!(tag(&graph(3, &complete(3))), FamilyTag::Complete(3));
        assert_eq!(tag(&graph(4, &path(4))), FamilyTag::PathA(4));
        assert_eq!(tag(&graph(5, &cycle(5))), FamilyTag::OddCycleAffineA(5));
        assert_eq!(tag(&gamma(1, 1, 1)), FamilyTag::TypeD(4));
        assert_eq!(tag(&gamma(1, 1, 4)), FamilyTag::TypeD(7));
        assert_eq!(tag(&gamma(1, 2, 2)), FamilyTag::TypeE(6));
        assert_eq!(tag(&gamma(1, 2, 5)), FamilyTag::TypeE(9));
        assert_eq!(tag(&gamma(2, 2, 2)), FamilyTag::AffineE6);
        assert!(has_property_r(&graph(4, &complete(4))));
        assert!(has_property_r(&graph(0, &[])));
    }

    #[test]
    fn non_regular_reasons() {
        use NonRegularReason::*;
        assert_eq!(reason(&graph(4, &cycle(4))), Some(EvenCycle));
        assert_eq!(reason(&gamma(1, 3, 3)), Some(ContainsGamma133));
        assert_eq!(reason(&gamma(3, 3, 3)), Some(ContainsGamma133));
        assert_eq!(reason(&gamma(2, 2, 3)), Some(ContainsGamma223));
        let star = graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(reason(&star), Some(ValencyAtLeastFour));
        let two = graph(6, &[(0, 1), (0, 2), (0, 3), (3, 4), (3, 5)]);
        assert_eq!(reason(&two), Some(TwoBranchPoints));
        let fig2_left = graph(4, &[(0, 1), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(reason(&fig2_left), Some(TriangleNotComplete));
        let square_tail = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)]);
        assert_eq!(reason(&square_tail), Some(CircuitNotCycle));
        assert!(!has_property_r(&star));
    }

    #[test]
    fn classify_rejects_bad_input() {
        assert_eq!(classify_component(&graph(0, &[])), Err(Error::EmptyStructure));
        assert_eq!(classify_component(&graph(2, &[])), Err(Error::NotConnected));
    }

    #[test]
    fn gamma_recognition() {
        let t = gamma_pqr(&gamma(2, 1, 3)).unwrap();
        assert_eq!((t.p, t.q, t.r), (1, 2, 3));
        assert_eq!(t.center, Piece::new(0));
        assert!(gamma_pqr(&graph(4, &path(4))).is_none());
        assert!(gamma_pqr(&graph(4, &cycle(4))).is_none());
    }

    fn witness_word(s: &Arc<ConcurrencyStructure>) -> String {
        let w = witness_nonregular(s).unwrap().unwrap();
        assert!(w.has_p2 && !w.has_p1);
        w.heap.word_string()
    }

    #[test]
    fn witnesses_match_known_words() {
        let fig2_left = graph(4, &[(0, 1), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(witness_word(&fig2_left), "1 3 2 4 1 3");
        let c4 = graph(4, &cycle(4));
        assert_eq!(witness_word(&c4), "1 3 2 4");
        let star = graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(witness_word(&star), "2 3 1 4 5");
        // Center 1; (acx)(bd)(ce)(df)(xeg) with d = 1, x = 2, c b a = 3 4 5, e f g = 6 7 8.
        assert_eq!(witness_word(&gamma(1, 3, 3)), "2 3 5 1 4 3 6 1 7 2 6 8");
        // (xbf)(ac)(bd)(ce)(df)(cg)(bf)(ac)(xbd) with c = 1, d e = 2 3, f g = 4 5, b a x = 6 7 8.
        assert_eq!(
            witness_word(&gamma(2, 2, 3)),
            "4 6 8 1 7 2 6 1 3 2 4 1 5 4 6 1 7 2 6 8"
        );
    }

    #[test]
    fn witnesses_verify_for_every_reason() {
        let fig2_right = graph(4, &[(0, 1), (1, 2), (2, 3), (1, 3)]);
        let square_tail = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)]);
        let k23 = graph(5, &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]);
        let two = graph(6, &[(0, 1), (0, 2), (0, 3), (3, 4), (3, 5)]);
        for s in [
            fig2_right,
            square_tail,
            k23,
            two,
            graph(6, &cycle(6)),
            gamma(1, 3, 3),
            gamma(2, 2, 3),
            gamma(2, 3, 4),
        ] {
            let w = witness_nonregular(&s).unwrap().unwrap();
            assert!(w.has_p2 && !w.has_p1, "{s:?}");
            assert!(has_p2(&w.heap) && !has_p1(&w.heap));
        }
    }

    #[test]
    fn witness_embeds_into_larger_structure() {
        // A 4-cycle next to a path: the witness lives on the full structure.
        let s = graph(6, &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 5)]);
        let w = witness_nonregular(&s).unwrap().unwrap();
        assert!(Arc::ptr_eq(w.heap.structure(), &s));
        assert!(witness_nonregular(&graph(3, &path(3))).unwrap().is_none());
        let comps = connected_components(&graph(3, &path(3)));
        assert!(matches!(
            witness_for_component(&comps[0].structure, &graph(3, &path(3))),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn nonr_tag_names_forbidden_pieces() {
        let s = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)]);
        match tag(&s) {
            FamilyTag::NonR { substructure, .. } => assert_eq!(substructure.len(), 5),
            t => panic!("unexpected {t}"),
        }
        assert_eq!(tag(&gamma(2, 2, 2)).to_string(), "AffineE6");
        assert_eq!(tag(&graph(4, &path(4))).to_string(), "PathA(4)");
    }
}
