//! Normal forms `δ^m · G` in the generalized Temperley–Lieb algebra.
//!
//! Only δ-powers ever appear as coefficients when a single heap is reduced,
//! so a monomial is just an exponent and a P2 heap.

use crate::error::{Error, Result};
use crate::heap::Heap;
use crate::props::{balanced_convex_chains, contract, has_p2, BalancedConvexChain};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TlMonomial {
    pub delta_exponent: u32,
    pub basis: Heap,
}

impl fmt::Display for TlMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "delta^{} * {}", self.delta_exponent, self.basis.cf_string())
    }
}

// A chain the reduction may contract, and whether it contributes a factor δ.
fn applicable(e: &Heap, c: &BalancedConvexChain) -> Option<bool> {
    match c.len() {
        2 => Some(true),
        3 if e.label(c.vertices()[0]) != e.label(c.vertices()[1]) => Some(false),
        _ => None,
    }
}

/// Reduces `e` to `δ^m · G` with `G` a P2 heap. Length-2 chains are
/// contracted first, each contributing one factor δ; then length-3 chains
/// `x < y < z` with `ε(x) ≠ ε(y)`. Ties go to the lexicographically first
/// chain.
pub fn tl_reduce(e: &Heap) -> TlMonomial {
    reduce_by(e, |e, chains| {
        chains
            .iter()
            .find(|c| c.len() == 2)
            .or_else(|| chains.iter().find(|c| applicable(e, c).is_some()))
            .cloned()
    })
}

/// As [`tl_reduce`], but each step contracts a uniformly random applicable
/// chain. The result must not depend on the choices.
pub fn tl_reduce_random<R: Rng + ?Sized>(e: &Heap, rng: &mut R) -> TlMonomial {
    reduce_by(e, |e, chains| {
        let usable: Vec<&BalancedConvexChain> =
            chains.iter().filter(|c| applicable(e, c).is_some()).collect();
        usable.choose(rng).map(|c| (*c).clone())
    })
}

fn reduce_by(
    e: &Heap,
    mut pick: impl FnMut(&Heap, &[BalancedConvexChain]) -> Option<BalancedConvexChain>,
) -> TlMonomial {
    let mut g = e.clone();
    let mut m = 0;
    loop {
        let chains = balanced_convex_chains(&g, 3);
        let Some(chain) = pick(&g, &chains) else {
            debug_assert!(has_p2(&g));
            return TlMonomial {
                delta_exponent: m,
                basis: g,
            };
        };
        if applicable(&g, &chain) == Some(true) {
            m += 1;
        }
        g = contract(&g, &chain).expect("chain found in this heap");
    }
}

/// Heaps with property P2 are exactly the monomial basis elements.
pub fn is_monomial_basis_element(e: &Heap) -> bool {
    has_p2(e)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeletionOutcome {
    pub vertex: usize,
    pub delta_exponent: u32,
    pub basis_word: String,
}

impl DeletionOutcome {
    /// The deletion lands on a basis monomial with no δ factor.
    pub fn is_basis(&self) -> bool {
        self.delta_exponent == 0
    }
}

/// Reduces `E(a)` for every vertex `a` of a P2 heap.
pub fn deletion_test(e: &Heap) -> Result<Vec<DeletionOutcome>> {
    if !has_p2(e) {
        return Err(Error::Precondition(format!(
            "deletion test needs a heap with property P2, got {}",
            e.cf_string()
        )));
    }
    Ok((0..e.len())
        .map(|a| {
            let r = tl_reduce(&e.delete_vertex(a).expect("vertex in range"));
            DeletionOutcome {
                vertex: a,
                delta_exponent: r.delta_exponent,
                basis_word: r.basis.word_string(),
            }
        })
        .collect())
}
