//! The boundary map `∂ : C_1 → C_0` of a heap and (strong) acyclicity.
//!
//! Ranks are computed exactly: fraction-free (Bareiss) elimination over the
//! integers for characteristic 0, plain Gaussian elimination for prime
//! fields.

use crate::error::{Error, Result};
use crate::heap::Heap;
use num_bigint::BigInt;
use num_traits::{CheckedMul, CheckedSub, One, Zero};
use std::fmt;
use std::ops::Div;

/// Matrix of `∂` in the bases `V_0` (vertices, rows) and `V_1` (edges,
/// columns).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMap {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    // column-major: columns[e][v]
    columns: Vec<Vec<u8>>,
}

impl BoundaryMap {
    /// Number of rows (`|V_0|`).
    pub fn num_vertices(&self) -> usize {
        self.vertices
    }

    /// Edges `(x, y)` in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn entry(&self, vertex: usize, edge: usize) -> u8 {
        self.columns[edge][vertex]
    }

    pub fn column(&self, edge: usize) -> &[u8] {
        &self.columns[edge]
    }

    /// Row-major matrix.
    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.vertices)
            .map(|v| self.columns.iter().map(|c| c[v]).collect())
            .collect()
    }

    /// Plain-text dump: `#` header lines naming the edges, then one line of
    /// space-separated entries per vertex.
    pub fn to_text(&self) -> String {
        let mut out = format!("# {} vertices x {} edges\n", self.vertices, self.edges.len());
        let edges: Vec<String> = self.edges.iter().map(|(x, y)| format!("({x},{y})")).collect();
        out.push_str(&format!("# edges: {}\n", edges.join(" ")));
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

/// The field `k` over which kernels are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FieldChoice {
    #[default]
    Rational,
    Prime(u64),
}

impl FieldChoice {
    /// Field of the given characteristic: 0 for the rationals, otherwise a
    /// prime.
    pub fn with_characteristic(p: u64) -> Result<FieldChoice> {
        match p {
            0 => Ok(FieldChoice::Rational),
            p if is_prime(p) => Ok(FieldChoice::Prime(p)),
            p => Err(Error::NotPrime(p)),
        }
    }

    pub fn characteristic(self) -> u64 {
        match self {
            FieldChoice::Rational => 0,
            FieldChoice::Prime(p) => p,
        }
    }
}

impl fmt::Display for FieldChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldChoice::Rational => write!(f, "Q"),
            FieldChoice::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn boundary_map(e: &Heap) -> BoundaryMap {
    let s = e.structure();
    let n = e.len();
    let mut edges = Vec::new();
    let mut columns = Vec::new();
    for x in 0..n {
        let lx = e.label(x);
        for y in e.above(x).iter() {
            if e.label(y) != lx {
                continue;
            }
            let interval = e.interval(x, y);
            if interval.iter().any(|z| e.label(z) == lx) {
                continue;
            }
            let mut col = vec![0u8; n];
            for w in interval.iter() {
                if s.concurrent(e.label(w), lx) {
                    col[w] = 1;
                }
            }
            edges.push((x, y));
            columns.push(col);
        }
    }
    BoundaryMap {
        vertices: n,
        edges,
        columns,
    }
}

/// `dim ker ∂ = |V_1| − rank ∂`.
pub fn kernel_dim(bmap: &BoundaryMap, field: FieldChoice) -> usize {
    bmap.edges.len() - rank(&bmap.columns, field)
}

pub fn is_acyclic(e: &Heap, field: FieldChoice) -> bool {
    kernel_dim(&boundary_map(e), field) == 0
}

/// Acyclic, and `E(v)` acyclic for every vertex `v`.
pub fn is_strongly_acyclic(e: &Heap, field: FieldChoice) -> bool {
    is_acyclic(e, field)
        && (0..e.len()).all(|v| is_acyclic(&e.delete_vertex(v).expect("vertex in range"), field))
}

/// Rank of a 0/1 matrix given as a list of vectors (rank is the same for rows
/// or columns).
pub fn rank(vectors: &[Vec<u8>], field: FieldChoice) -> usize {
    match field {
        FieldChoice::Rational => rank_rational(vectors),
        FieldChoice::Prime(p) => rank_mod_p(vectors, p),
    }
}

fn rank_rational(vectors: &[Vec<u8>]) -> usize {
    let small: Vec<Vec<i128>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| x as i128).collect())
        .collect();
    if let Some(r) = bareiss_rank(small) {
        return r;
    }
    let big: Vec<Vec<BigInt>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    bareiss_rank(big).expect("big integers do not overflow")
}

/// Fraction-free elimination. Every intermediate entry is a minor of the
/// input, so each division is exact. Returns `None` on overflow.
fn bareiss_rank<T>(mut m: Vec<Vec<T>>) -> Option<usize>
where
    T: Clone + Zero + One + CheckedMul + CheckedSub + Div<Output = T>,
{
    let rows = m.len();
    let Some(cols) = m.first().map(Vec::len) else {
        return Some(0);
    };
    let mut rank = 0;
    let mut prev = T::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let (top, rest) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in rest.iter_mut() {
            for c in col + 1..cols {
                let a = pivot_row[col].checked_mul(&row[c])?;
                let b = row[col].checked_mul(&pivot_row[c])?;
                row[c] = a.checked_sub(&b)? / prev.clone();
            }
            row[col] = T::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    Some(rank)
}

fn rank_mod_p(vectors: &[Vec<u8>], p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| x as u64 % p).collect())
        .collect();
    let rows = m.len();
    let Some(cols) = m.first().map(Vec::len) else {
        return 0;
    };
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = pow_mod(m[rank][col], p - 2, p);
        for c in col..cols {
            m[rank][c] = mul(m[rank][c], inv);
        }
        for r in 0..rows {
            if r != rank && m[r][col] != 0 {
                let f = m[r][col];
                for c in col..cols {
                    let sub = mul(f, m[rank][c]);
                    m[r][c] = (m[r][c] + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    r
}
