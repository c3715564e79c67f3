//! Catalecticant matrices under the coefficient pairing.
//!
//! `Cat_i(f)` sends a dual form `D` of degree `i` to `D f`, of degree
//! `d - i`. In monomial bases its entry at `(x^g, x^b)` is the coefficient
//! of `x^(g + b)` in `f`, so `Cat_{d-i}(f)` is the transpose of `Cat_i(f)`
//! and the middle one is symmetric.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::FMatrix;
use crate::poly::{pair, GradedBasis, HomogeneousPoly};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalecticant {
    pub source_degree: usize,
    pub target_degree: usize,
    pub matrix: FMatrix,
}

impl Catalecticant {
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }
}

pub fn catalecticant(f: &HomogeneousPoly, i: usize) -> Result<Catalecticant> {
    let d = f.degree();
    if i > d {
        return Err(Error::DegreeMismatch { expected: d, found: i });
    }
    let n = f.n();
    let rows = GradedBasis::shared(n, i);
    let cols = GradedBasis::shared(n, d - i);
    let full = GradedBasis::shared(n, d);
    let coeffs = f.coeff_vector(&full)?;
    let table = rows.product_table(&cols, &full);
    let data = table.into_iter().map(|pos| coeffs[pos].value()).collect();
    Ok(Catalecticant {
        source_degree: i,
        target_degree: d - i,
        matrix: FMatrix::from_raw(rows.len(), cols.len(), f.modulus(), data),
    })
}

pub fn middle_catalecticant(f: &HomogeneousPoly) -> Result<Catalecticant> {
    if f.degree() % 2 == 1 {
        return Err(Error::OddDegree(f.degree()));
    }
    catalecticant(f, f.degree() / 2)
}

/// Rank of `Cat_{d/2}(f)`. Below `N = C(n + d/2, n)` exactly on the
/// catalecticant hypersurface, the dual variety of the squares.
pub fn middle_cat_rank(f: &HomogeneousPoly) -> Result<usize> {
    Ok(middle_catalecticant(f)?.rank())
}

/// For a functional `h` vanishing on `I_d = Σ f_i S^{d/2}`: the `f_i` lie in
/// the kernel of `Cat_{d/2}(h)` and its rank is at most `N - r`.
pub fn containment_check(f_list: &[HomogeneousPoly], h: &HomogeneousPoly) -> Result<bool> {
    let first = f_list.first().ok_or_else(|| Error::InvalidParams("empty list of forms".into()))?;
    let k = first.degree();
    if h.degree() != 2 * k {
        return Err(Error::DegreeMismatch { expected: 2 * k, found: h.degree() });
    }
    let half = GradedBasis::shared(first.n(), k);
    for f in f_list {
        for t in half.monomials() {
            let ft = f.mul(&HomogeneousPoly::monomial(f.n(), f.modulus(), t.exponents(), 1)?)?;
            if !pair(h, &ft)?.is_zero() {
                return Err(Error::NotApolar);
            }
        }
    }
    let cat = middle_catalecticant(h)?;
    let rows = f_list.iter().map(|f| f.coeff_vector(&half)).collect::<Result<Vec<_>>>()?;
    let fm = FMatrix::from_rows(&rows, half.len(), h.modulus())?;
    let annihilates = fm.mul(&cat.matrix)?.is_zero();
    Ok(annihilates && cat.rank() + f_list.len() <= half.len())
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalecticantReport {
    pub n: usize,
    pub d: usize,
    pub p: u32,
    pub i: usize,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub full_rank: bool,
}

pub fn catalecticant_report(f: &HomogeneousPoly, i: usize) -> Result<(CatalecticantReport, Catalecticant)> {
    let cat = catalecticant(f, i)?;
    let rank = cat.rank();
    let (rows, cols) = (cat.matrix.rows(), cat.matrix.cols());
    let report = CatalecticantReport {
        n: f.n(),
        d: f.degree(),
        p: f.modulus().p(),
        i,
        rows,
        cols,
        rank,
        full_rank: rank == rows.min(cols),
    };
    Ok((report, cat))
}
