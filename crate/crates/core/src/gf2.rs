//! Linear algebra over GF(2) on net incidence matrices.
//!
//! The incidence matrix of a k-net of order `n` has one row per point and one
//! column per line; column `class * n + i` is line `i` of that class. A line
//! set is a relation when its columns sum to zero.

use std::fmt;

use crate::error::{Error, Result};
use crate::netcore::{ColumnSum, Line, Net};
use crate::pointset::PointSet;

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, idx: I) -> Self {
        let mut v = BitVector::zeros(len);
        for i in idx {
            v.set(i, true);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        if v {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .position(|&w| w != 0)
            .map(|i| i * 64 + self.words[i].trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Dense row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        BitMatrix {
            n_rows,
            n_cols,
            rows: vec![BitVector::zeros(n_cols); n_rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(n_cols: usize, rows: Vec<BitVector>) -> Self {
        assert!(rows.iter().all(|r| r.len() == n_cols));
        BitMatrix {
            n_rows: rows.len(),
            n_cols,
            rows,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.rows[r].set(c, v)
    }

    pub fn row(&self, r: usize) -> &BitVector {
        &self.rows[r]
    }

    pub fn column(&self, c: usize) -> BitVector {
        BitVector::from_indices(self.n_rows, (0..self.n_rows).filter(|&r| self.get(r, c)))
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut top = 0;
        for col in 0..self.n_cols {
            let Some(found) = (top..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(top, found);
            let pivot = rows[top].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != top && row.get(col) {
                    row.xor_assign(&pivot);
                }
            }
            pivots.push(col);
            top += 1;
            if top == rows.len() {
                break;
            }
        }
        (BitMatrix::from_rows(self.n_cols, rows), pivots)
    }

    /// Multiplies by a column vector.
    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        BitVector::from_indices(
            self.n_rows,
            (0..self.n_rows).filter(|&r| {
                self.rows[r]
                    .words
                    .iter()
                    .zip(&v.words)
                    .map(|(a, b)| (a & b).count_ones())
                    .sum::<u32>()
                    % 2
                    == 1
            }),
        )
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{r:?}")?;
        }
        Ok(())
    }
}

pub fn rank(m: &BitMatrix) -> usize {
    m.rref().1.len()
}

/// Basis of `{x : m x = 0}`, one vector per free column, in column order.
pub fn null_space_basis(m: &BitMatrix) -> Vec<BitVector> {
    let (r, pivots) = m.rref();
    let mut is_pivot = vec![false; m.n_cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..m.n_cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = BitVector::zeros(m.n_cols);
            v.set(free, true);
            for (i, &p) in pivots.iter().enumerate() {
                if r.get(i, free) {
                    v.set(p, true);
                }
            }
            v
        })
        .collect()
}

/// One solution of `m x = b`, if any; free variables are zero.
pub fn solve(m: &BitMatrix, b: &BitVector) -> Option<BitVector> {
    let nc = m.n_cols;
    let rows = (0..m.n_rows)
        .map(|r| {
            let mut row = BitVector::from_indices(nc + 1, m.rows[r].ones());
            row.set(nc, b.get(r));
            row
        })
        .collect();
    let (red, pivots) = BitMatrix::from_rows(nc + 1, rows).rref();
    if pivots.last() == Some(&nc) {
        return None;
    }
    let mut x = BitVector::zeros(nc);
    for (i, &p) in pivots.iter().enumerate() {
        x.set(p, red.get(i, nc));
    }
    Some(x)
}

/// Rows are points, columns are lines.
pub fn incidence_matrix(net: &Net) -> BitMatrix {
    let n = net.order();
    let k = net.class_count();
    let mut m = BitMatrix::zeros(n * n, n * k);
    for c in 0..k {
        for (i, l) in net.class(c).iter().enumerate() {
            for p in l.iter() {
                m.set(p, c * n + i, true);
            }
        }
    }
    m
}

/// GF(2) rank of the incidence matrix.
pub fn dimension(net: &Net) -> usize {
    rank(&incidence_matrix(net))
}

/// Independent relations beyond the `k - 1` trivial ones.
pub fn nontrivial_relation_count(net: &Net) -> usize {
    let n = net.order();
    let k = net.class_count();
    n * k - dimension(net) - (k - 1)
}

/// The trivial relations `Π_0 ∪ Π_i` for `i = 1..k`.
pub fn trivial_relations(net: &Net) -> Vec<BitVector> {
    let n = net.order();
    let k = net.class_count();
    let len = n * k;
    (1..k)
        .map(|i| BitVector::from_indices(len, (0..n).chain(i * n..(i + 1) * n)))
        .collect()
}

/// Relations completing the trivial ones to a basis of the null space.
///
/// The trivial relations are reduced first; null vectors that stay
/// independent of them are kept, so the result has size
/// [`nontrivial_relation_count`].
pub fn nontrivial_relation_basis(net: &Net) -> Vec<BitVector> {
    let m = incidence_matrix(net);
    let mut echelon: Vec<(usize, BitVector)> = Vec::new();
    let reduce = |mut v: BitVector, echelon: &mut Vec<(usize, BitVector)>| -> Option<BitVector> {
        for (p, row) in echelon.iter() {
            if v.get(*p) {
                v.xor_assign(row);
            }
        }
        let p = v.first_one()?;
        echelon.push((p, v.clone()));
        Some(v)
    };
    for t in trivial_relations(net) {
        reduce(t, &mut echelon);
    }
    null_space_basis(&m)
        .into_iter()
        .filter_map(|v| reduce(v.clone(), &mut echelon).map(|_| v))
        .collect()
}

/// Iterates XOR combinations of a basis in Gray-code order, starting with
/// zero, stopping after `cap` vectors.
pub struct SpanIter<'a> {
    basis: &'a [BitVector],
    current: BitVector,
    step: u64,
    remaining: u64,
}

pub fn span<'a>(basis: &'a [BitVector], len: usize, cap: u64) -> SpanIter<'a> {
    let total = if basis.len() >= 64 {
        u64::MAX
    } else {
        1u64 << basis.len()
    };
    SpanIter {
        basis,
        current: BitVector::zeros(len),
        step: 0,
        remaining: total.min(cap),
    }
}

impl Iterator for SpanIter<'_> {
    type Item = BitVector;

    fn next(&mut self) -> Option<BitVector> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        if self.step > 0 {
            let flip = self.step.trailing_zeros() as usize;
            self.current.xor_assign(&self.basis[flip]);
        }
        self.step += 1;
        Some(self.current.clone())
    }
}

/// Per-class weights of a relation or odd relation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationType {
    pub weights: Vec<usize>,
    pub odd: bool,
}

impl RelationType {
    pub fn new(weights: Vec<usize>, odd: bool) -> Self {
        RelationType { weights, odd }
    }

    /// Weights in ascending order.
    pub fn sorted(&self) -> RelationType {
        let mut w = self.weights.clone();
        w.sort_unstable();
        RelationType::new(w, self.odd)
    }
}

/// Compact notation such as `2^3 4^2 6`, weights ascending, zeros omitted.
impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.sorted();
        let mut parts = Vec::new();
        let mut i = 0;
        while i < s.weights.len() {
            let w = s.weights[i];
            let run = s.weights[i..].iter().take_while(|&&x| x == w).count();
            if w > 0 {
                parts.push(if run == 1 {
                    w.to_string()
                } else {
                    format!("{w}^{run}")
                });
            }
            i += run;
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        f.write_str(&parts.join(" "))?;
        if self.odd {
            f.write_str(" (odd)")?;
        }
        Ok(())
    }
}

/// A set of lines of a net whose incidence columns sum to zero or to all-ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    /// Bit `class * n + i` marks line `i` of `class`.
    pub lines: BitVector,
}

impl Relation {
    pub fn lines_of(&self, net: &Net) -> Vec<Line> {
        self.lines.ones().map(|i| net.line_at(i)).collect()
    }

    pub fn from_lines(net: &Net, lines: &[Line]) -> Result<Self> {
        let len = net.order() * net.class_count();
        let mut v = BitVector::zeros(len);
        for l in lines {
            let i = net
                .line_index(l)
                .ok_or_else(|| Error::InvalidNet(format!("line {:?} not in net", l.points)))?;
            v.set(i, true);
        }
        Ok(Relation { lines: v })
    }

    pub fn column_sum(&self, net: &Net) -> ColumnSum {
        let sum = self
            .lines
            .ones()
            .fold(PointSet::EMPTY, |acc, i| acc.xor(net.line_at(i).points));
        let n = net.order();
        if sum.is_empty() {
            ColumnSum::Zero
        } else if sum == PointSet::full(n * n) {
            ColumnSum::Ones
        } else {
            ColumnSum::Neither
        }
    }
}

pub fn relation_type_of(rel: &Relation, net: &Net) -> Result<RelationType> {
    let odd = match rel.column_sum(net) {
        ColumnSum::Zero => false,
        ColumnSum::Ones => true,
        ColumnSum::Neither => return Err(Error::NotARelation),
    };
    let n = net.order();
    let weights = (0..net.class_count())
        .map(|c| (c * n..(c + 1) * n).filter(|&i| rel.lines.get(i)).count())
        .collect();
    Ok(RelationType { weights, odd })
}

/// Lexicographically least sorted weight tuple over complementation of every
/// even-sized subset of classes (`λ -> n - λ`). The odd flag is unchanged.
pub fn normalize_type(t: &RelationType, n: usize) -> RelationType {
    let k = t.weights.len();
    assert!(k < 32, "too many classes");
    let mut best: Option<Vec<usize>> = None;
    for mask in 0u32..1 << k {
        if mask.count_ones() % 2 == 1 {
            continue;
        }
        let mut w: Vec<usize> = t
            .weights
            .iter()
            .enumerate()
            .map(|(i, &x)| if mask >> i & 1 == 1 { n - x } else { x })
            .collect();
        w.sort_unstable();
        if best.as_ref().is_none_or(|b| w < *b) {
            best = Some(w);
        }
    }
    RelationType::new(best.unwrap_or_default(), t.odd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::{mols_to_net, MolsList};
    use proptest::prelude::*;

    fn cayley(n: usize, op: impl Fn(usize, usize) -> usize) -> Net {
        let sq = (0..n * n).map(|p| op(p / n, p % n) as u8).collect();
        mols_to_net(&MolsList::new(n, vec![sq]).unwrap()).unwrap()
    }

    #[test]
    fn rank_small() {
        assert_eq!(rank(&BitMatrix::zeros(5, 5)), 0);
        assert_eq!(rank(&BitMatrix::identity(7)), 7);
        assert!(null_space_basis(&BitMatrix::identity(4)).is_empty());
        let mut one = BitMatrix::zeros(1, 2);
        one.set(0, 0, true);
        one.set(0, 1, true);
        let ns = null_space_basis(&one);
        assert_eq!(ns, vec![BitVector::from_indices(2, [0, 1])]);
    }

    #[test]
    fn klein_has_more_relations_than_cyclic() {
        let z4 = cayley(4, |a, b| (a + b) % 4);
        let klein = cayley(4, |a, b| a ^ b);
        assert!(dimension(&klein) < dimension(&z4));
        assert!(dimension(&z4) <= 4 * 3 - 3 + 1);
    }

    #[test]
    fn trivial_relations_are_null() {
        let net = cayley(5, |a, b| (a + 2 * b) % 5);
        let m = incidence_matrix(&net);
        for t in trivial_relations(&net) {
            assert!(m.mul_vec(&t).is_zero());
        }
        assert_eq!(nontrivial_relation_basis(&net).len(), nontrivial_relation_count(&net));
    }

    #[test]
    fn union_of_two_classes() {
        let net = cayley(4, |a, b| (a + b) % 4);
        let rel = Relation {
            lines: trivial_relations(&net)[0].clone(),
        };
        let t = relation_type_of(&rel, &net).unwrap();
        assert_eq!(t, RelationType::new(vec![4, 4, 0], false));
        let empty = Relation {
            lines: BitVector::zeros(12),
        };
        assert_eq!(relation_type_of(&empty, &net).unwrap().weights, vec![0, 0, 0]);
        let single = Relation {
            lines: BitVector::from_indices(12, [0]),
        };
        assert_eq!(relation_type_of(&single, &net), Err(Error::NotARelation));
    }

    #[test]
    fn normalization_examples() {
        let a = normalize_type(&RelationType::new(vec![2, 2, 2, 4, 4, 6], false), 10);
        let b = normalize_type(&RelationType::new(vec![2, 4, 4, 6, 8, 8], false), 10);
        assert_eq!(a, b);
        assert_eq!(a.weights, vec![2, 2, 2, 4, 4, 6]);
        let f = normalize_type(&RelationType::new(vec![4; 4], false), 10);
        assert_eq!(f.weights, vec![4; 4]);
        assert_eq!(f.to_string(), "4^4");
    }

    #[test]
    fn span_enumerates_all_combinations() {
        let basis = vec![
            BitVector::from_indices(4, [0]),
            BitVector::from_indices(4, [1]),
            BitVector::from_indices(4, [2, 3]),
        ];
        let mut all: Vec<BitVector> = span(&basis, 4, u64::MAX).collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 8);
        assert_eq!(span(&basis, 4, 3).count(), 3);
    }

    fn arb_matrix() -> impl Strategy<Value = BitMatrix> {
        (1usize..12, 1usize..12).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), r).prop_map(
                move |rows| {
                    let rows = rows
                        .into_iter()
                        .map(|bits| {
                            BitVector::from_indices(c, bits.iter().enumerate().filter(|x| *x.1).map(|x| x.0))
                        })
                        .collect();
                    BitMatrix::from_rows(c, rows)
                },
            )
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in arb_matrix()) {
            let ns = null_space_basis(&m);
            prop_assert_eq!(ns.len() + rank(&m), m.n_cols());
            for v in &ns {
                prop_assert!(m.mul_vec(v).is_zero());
            }
        }

        #[test]
        fn normalize_is_idempotent_and_coset_constant(
            w in proptest::collection::vec(0usize..=10, 2..7),
            mask in any::<u32>(),
            odd in any::<bool>(),
        ) {
            let t = RelationType::new(w.clone(), odd);
            let nt = normalize_type(&t, 10);
            prop_assert_eq!(normalize_type(&nt, 10), nt.clone());
            let mut m = mask & ((1 << w.len()) - 1);
            if m.count_ones() % 2 == 1 {
                m &= m - 1;
            }
            let flipped: Vec<usize> = w.iter().enumerate()
                .map(|(i, &x)| if m >> i & 1 == 1 { 10 - x } else { x })
                .collect();
            prop_assert_eq!(normalize_type(&RelationType::new(flipped, odd), 10), nt);
        }
    }
}
