//! Dense matrices over Z/p with exact rank, kernel and streaming rank.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf::{FieldElement, Modulus};

/// Below this many touched entries per pivot step, elimination stays on one thread.
const PAR_THRESHOLD: usize = 1 << 15;

#[derive(Clone, PartialEq, Eq)]
pub struct FMatrix {
    rows: usize,
    cols: usize,
    modulus: Modulus,
    data: Vec<u32>,
}

impl fmt::Debug for FMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FMatrix {}x{} over {}", self.rows, self.cols, self.modulus)?;
        for i in 0..self.rows.min(12) {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl FMatrix {
    pub fn zeros(rows: usize, cols: usize, modulus: Modulus) -> Self {
        FMatrix { rows, cols, modulus, data: vec![0; rows * cols] }
    }

    pub fn identity(k: usize, modulus: Modulus) -> Self {
        let mut m = Self::zeros(k, k, modulus);
        for i in 0..k {
            m.data[i * k + i] = 1 % modulus.p();
        }
        m
    }

    /// Row-major entries, reduced mod p.
    pub fn from_values(rows: usize, cols: usize, modulus: Modulus, values: &[i64]) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!("{} entries for a {rows}x{cols} matrix", values.len())));
        }
        let data = values.iter().map(|&v| modulus.from_i64(v).value()).collect();
        Ok(FMatrix { rows, cols, modulus, data })
    }

    pub fn from_rows(rows: &[Vec<FieldElement>], cols: usize, modulus: Modulus) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::ShapeMismatch(format!("row of length {} in a {cols}-column matrix", r.len())));
            }
            data.extend(r.iter().map(|c| c.value()));
        }
        Ok(FMatrix { rows: rows.len(), cols, modulus, data })
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, modulus: Modulus, data: Vec<u32>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        FMatrix { rows, cols, modulus, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        FieldElement::from_reduced(self.data[i * self.cols + j])
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.data[i * self.cols + j] = v.value() % self.modulus.p();
    }

    pub fn row(&self, i: usize) -> Vec<FieldElement> {
        self.raw_row(i).iter().map(|&v| FieldElement::from_reduced(v)).collect()
    }

    pub(crate) fn raw_row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> FMatrix {
        let mut t = Self::zeros(self.cols, self.rows, self.modulus);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn mul(&self, other: &FMatrix) -> Result<FMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let m = self.modulus;
        let p = m.p() as u64;
        let mut out = Self::zeros(self.rows, other.cols, m);
        out.data.par_chunks_mut(other.cols.max(1)).enumerate().for_each(|(i, out_row)| {
            let mut acc = vec![0u64; other.cols];
            for (k, &a) in self.raw_row(i).iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (slot, &b) in acc.iter_mut().zip(other.raw_row(k)) {
                    *slot = (*slot + a as u64 * b as u64) % p;
                }
            }
            for (o, a) in out_row.iter_mut().zip(acc) {
                *o = a as u32;
            }
        });
        Ok(out)
    }

    /// Horizontal concatenation.
    pub fn hstack(blocks: &[FMatrix]) -> Result<FMatrix> {
        let first = blocks.first().ok_or_else(|| Error::ShapeMismatch("no blocks".into()))?;
        let rows = first.rows;
        if let Some(b) = blocks.iter().find(|b| b.rows != rows) {
            return Err(Error::ShapeMismatch(format!("block with {} rows, expected {rows}", b.rows)));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for b in blocks {
                data.extend_from_slice(b.raw_row(i));
            }
        }
        Ok(FMatrix { rows, cols, modulus: first.modulus, data })
    }

    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> FMatrix {
        let mut out = Self::zeros(self.rows, self.cols, self.modulus);
        for (i, &pi) in row_perm.iter().enumerate() {
            for (j, &pj) in col_perm.iter().enumerate() {
                out.data[i * self.cols + j] = self.data[pi * self.cols + pj];
            }
        }
        out
    }

    pub fn scale_row(&mut self, i: usize, c: FieldElement) {
        let m = self.modulus;
        let cols = self.cols;
        for v in &mut self.data[i * cols..(i + 1) * cols] {
            *v = m.mul_raw(*v, c.value());
        }
    }

    /// Gaussian elimination in place; returns the pivot columns. With
    /// `reduced`, entries above each pivot are cleared too (RREF).
    fn eliminate(&mut self, reduced: bool) -> Vec<usize> {
        let m = self.modulus;
        let p = m.p() as u64;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| self.data[r * cols + col] != 0) else {
                continue;
            };
            if pr != row {
                for j in col..cols {
                    self.data.swap(pr * cols + j, row * cols + j);
                }
            }
            let inv = m.inv_raw(self.data[row * cols + col]).expect("pivot is nonzero");
            for v in &mut self.data[row * cols + col..(row + 1) * cols] {
                *v = m.mul_raw(*v, inv);
            }
            let pivot: Vec<u64> = self.data[row * cols + col..(row + 1) * cols].iter().map(|&v| v as u64).collect();
            let start = if reduced { 0 } else { row + 1 };
            let update = |r: usize, target: &mut [u32]| {
                if r == row {
                    return;
                }
                let f = target[col] as u64;
                if f == 0 {
                    return;
                }
                let nf = p - f;
                for (t, &pv) in target[col..].iter_mut().zip(&pivot) {
                    *t = ((*t as u64 + nf * pv) % p) as u32;
                }
            };
            let region = &mut self.data[start * cols..];
            if (self.rows - start) * (cols - col) >= PAR_THRESHOLD {
                region.par_chunks_mut(cols).enumerate().for_each(|(k, t)| update(start + k, t));
            } else {
                region.chunks_mut(cols).enumerate().for_each(|(k, t)| update(start + k, t));
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        // Eliminate along the shorter side.
        let mut work = if self.rows > self.cols { self.transpose() } else { self.clone() };
        work.eliminate(false).len()
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (FMatrix, Vec<usize>) {
        let mut work = self.clone();
        let pivots = work.eliminate(true);
        (work, pivots)
    }

    /// Columns span the right kernel.
    pub fn kernel_basis(&self) -> FMatrix {
        let m = self.modulus;
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut k = Self::zeros(self.cols, free.len(), m);
        for (j, &fc) in free.iter().enumerate() {
            k.data[fc * free.len() + j] = 1 % m.p();
            for (i, &pc) in pivots.iter().enumerate() {
                k.data[pc * free.len() + j] = m.neg_raw(r.data[i * self.cols + fc]);
            }
        }
        k
    }

    pub fn determinant(&self) -> Result<FieldElement> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch(format!("determinant of a {}x{} matrix", self.rows, self.cols)));
        }
        let m = self.modulus;
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1 % m.p();
        for col in 0..n {
            let Some(pr) = (col..n).find(|&r| a[r * n + col] != 0) else {
                return Ok(FieldElement::ZERO);
            };
            if pr != col {
                for j in 0..n {
                    a.swap(pr * n + j, col * n + j);
                }
                det = m.neg_raw(det);
            }
            let pv = a[col * n + col];
            det = m.mul_raw(det, pv);
            let inv = m.inv_raw(pv)?;
            for r in col + 1..n {
                let f = m.mul_raw(a[r * n + col], inv);
                if f == 0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] = m.sub_raw(a[r * n + j], m.mul_raw(f, a[col * n + j]));
                }
            }
        }
        Ok(FieldElement::from_reduced(det))
    }

    /// Space-separated residues, one row per line, after a `rows cols p` header.
    pub fn to_dump(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows, self.cols, self.modulus.p());
        for i in 0..self.rows {
            let line: Vec<String> = self.raw_row(i).iter().map(u32::to_string).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

pub fn rank(m: &FMatrix) -> usize {
    m.rank()
}

pub fn kernel_basis(m: &FMatrix) -> FMatrix {
    m.kernel_basis()
}

/// Incremental row-echelon basis of vectors of a fixed length.
#[derive(Debug, Clone)]
pub struct RankAccumulator {
    len: usize,
    modulus: Modulus,
    basis: Vec<(usize, Vec<u32>)>,
    scratch: Vec<u64>,
}

impl RankAccumulator {
    pub fn new(len: usize, modulus: Modulus) -> Self {
        RankAccumulator { len, modulus, basis: Vec::new(), scratch: vec![0; len] }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        debug_assert_eq!(v.len(), self.len);
        if self.basis.len() == self.len {
            return false;
        }
        let m = self.modulus;
        let p = m.p() as u64;
        for (s, &x) in self.scratch.iter_mut().zip(v) {
            *s = x as u64;
        }
        for (pivot, b) in &self.basis {
            let f = self.scratch[*pivot];
            if f == 0 {
                continue;
            }
            let nf = p - f;
            for (s, &bv) in self.scratch.iter_mut().zip(b) {
                *s = (*s + nf * bv as u64) % p;
            }
        }
        let Some(pivot) = self.scratch.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = m.inv_raw(self.scratch[pivot] as u32).expect("nonzero") as u64;
        let row = self.scratch.iter().map(|&x| (x * inv % p) as u32).collect();
        self.basis.push((pivot, row));
        true
    }
}

/// Outcome of [`rank_lower_bound_streaming`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamedRank {
    pub rank: usize,
    pub blocks_consumed: usize,
}

/// Rank of the horizontal concatenation of `blocks`, computed column by
/// column. Stops pulling blocks once `target` (or the row count) is reached.
pub fn rank_lower_bound_streaming<I>(blocks: I, target: Option<usize>) -> Result<StreamedRank>
where
    I: IntoIterator<Item = FMatrix>,
{
    let mut acc: Option<RankAccumulator> = None;
    let mut consumed = 0;
    for block in blocks {
        let a = acc.get_or_insert_with(|| RankAccumulator::new(block.rows, block.modulus));
        if block.rows != a.len() {
            return Err(Error::ShapeMismatch(format!("block with {} rows after blocks with {}", block.rows, a.len())));
        }
        consumed += 1;
        let t = block.transpose();
        for j in 0..t.rows {
            a.insert(t.raw_row(j));
        }
        let cap = target.unwrap_or(a.len()).min(a.len());
        if a.rank() >= cap {
            break;
        }
    }
    Ok(StreamedRank { rank: acc.map_or(0, |a| a.rank()), blocks_consumed: consumed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p101() -> Modulus {
        Modulus::new(101).unwrap()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, rank_cap: usize) -> FMatrix {
        // product of rows x k and k x cols factors, so rank <= k
        let m = p101();
        let k = rank_cap;
        let a: Vec<i64> = (0..rows * k).map(|_| rng.gen_range(0..101)).collect();
        let b: Vec<i64> = (0..k * cols).map(|_| rng.gen_range(0..101)).collect();
        FMatrix::from_values(rows, k, m, &a).unwrap().mul(&FMatrix::from_values(k, cols, m, &b).unwrap()).unwrap()
    }

    #[test]
    fn rank_examples() {
        let m = p101();
        assert_eq!(FMatrix::identity(5, m).rank(), 5);
        assert_eq!(FMatrix::zeros(4, 7, m).rank(), 0);
        assert_eq!(FMatrix::from_values(2, 2, m, &[1, 2, 2, 4]).unwrap().rank(), 1);
        assert_eq!(FMatrix::zeros(0, 3, m).rank(), 0);
    }

    #[test]
    fn kernel_examples() {
        let m = p101();
        assert_eq!(FMatrix::identity(4, m).kernel_basis().cols(), 0);
        let k = FMatrix::zeros(2, 3, m).kernel_basis();
        assert_eq!((k.rows(), k.cols(), k.rank()), (3, 3, 3));
        let k = FMatrix::from_values(1, 2, m, &[1, 1]).unwrap().kernel_basis();
        assert_eq!(k.cols(), 1);
        assert_eq!(m.add(k.get(0, 0), k.get(1, 0)), FieldElement::ZERO);
        assert!(!k.get(0, 0).is_zero());
    }

    #[test]
    fn streaming_examples() {
        let m = p101();
        let i2 = FMatrix::identity(2, m);
        assert_eq!(rank_lower_bound_streaming([i2.clone(), i2.clone()], None).unwrap().rank, 2);
        let s = rank_lower_bound_streaming([FMatrix::zeros(3, 1, m), FMatrix::identity(3, m)], Some(3)).unwrap();
        assert_eq!(s, StreamedRank { rank: 3, blocks_consumed: 2 });
        let s = rank_lower_bound_streaming([i2.clone(), i2.clone(), i2.clone()], Some(2)).unwrap();
        assert_eq!(s.blocks_consumed, 1);
        let bad = rank_lower_bound_streaming([FMatrix::zeros(2, 1, m), FMatrix::identity(3, m)], None);
        assert!(matches!(bad, Err(Error::ShapeMismatch(_))));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 6, 9, 4);
        assert_eq!(rank_lower_bound_streaming([a.clone()], None).unwrap().rank, a.rank());
    }

    #[test]
    fn determinant_small() {
        let m = p101();
        let a = FMatrix::from_values(2, 2, m, &[1, 2, 3, 4]).unwrap();
        assert_eq!(a.determinant().unwrap(), m.from_i64(-2));
        let b = FMatrix::from_values(2, 2, m, &[0, 1, 1, 0]).unwrap();
        assert_eq!(b.determinant().unwrap(), m.from_i64(-1));
    }

    #[test]
    fn parallel_path_matches_rank_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(&mut rng, 300, 280, 250);
        assert_eq!(a.rank(), 250);
        assert_eq!(a.transpose().rank(), 250);
    }

    proptest! {
        #[test]
        fn rank_nullity_and_transpose(seed in any::<u64>(), rows in 1usize..12, cols in 1usize..12, k in 0usize..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, rows, cols, k);
            let r = a.rank();
            prop_assert!(r <= k.min(rows).min(cols));
            prop_assert_eq!(r, a.transpose().rank());
            let ker = a.kernel_basis();
            prop_assert_eq!(ker.cols() + r, cols);
            prop_assert!(a.mul(&ker).unwrap().is_zero());
            prop_assert_eq!(ker.rank(), ker.cols());
        }

        #[test]
        fn rank_invariant_under_permutation_and_scaling(seed in any::<u64>(), rows in 1usize..10, cols in 1usize..10, k in 0usize..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, rows, cols, k);
            let mut rp: Vec<usize> = (0..rows).collect();
            let mut cp: Vec<usize> = (0..cols).collect();
            rp.shuffle(&mut rng);
            cp.shuffle(&mut rng);
            let mut b = a.permute(&rp, &cp);
            let i = rng.gen_range(0..rows);
            b.scale_row(i, FieldElement::from_reduced(rng.gen_range(1..101)));
            prop_assert_eq!(a.rank(), b.rank());
        }

        #[test]
        fn streaming_is_monotone_and_exact(seed in any::<u64>(), rows in 1usize..8, nblocks in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let blocks: Vec<FMatrix> = (0..nblocks).map(|_| {
                let c = rng.gen_range(1..5);
                let k = rng.gen_range(0..4);
                random_matrix(&mut rng, rows, c, k)
            }).collect();
            let mut last = 0;
            for t in 1..=nblocks {
                let s = rank_lower_bound_streaming(blocks[..t].to_vec(), None).unwrap();
                prop_assert!(s.rank >= last);
                last = s.rank;
            }
            prop_assert_eq!(last, FMatrix::hstack(&blocks).unwrap().rank());
        }
    }
}
