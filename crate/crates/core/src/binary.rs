//! Two-square decompositions of binary forms and the orthogonal Gram invariant.
//!
//! A binary form with linear factors `l_1 ... l_d` splits as
//! `((P_A + P_B)/2)^2 + (i (P_A - P_B)/2)^2` for every partition of the
//! factors into halves `A`, `B`, where `P_A` is the product over `A` and
//! `i^2 = -1`. Swapping `A` and `B` only flips a sign, so the partitions give
//! `C(d-1, d/2)` decompositions, one per `O(2)`-orbit for general factors.
//!
//! `O(r)` acts on a decomposition `(f_1, ..., f_r)` by `f_i -> Σ_j m_ij f_j`
//! and fixes `Σ_i v_i v_i^T`, `v_i` the coefficient vector of `f_i`. Unequal
//! invariants therefore certify distinct orbits; equal ones prove nothing.

use itertools::Itertools;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{FieldElement, Modulus};
use crate::linalg::FMatrix;
use crate::poly::{GradedBasis, HomogeneousPoly};
use crate::seed::{digest, trial_rng};

/// `f = Σ f_i^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub summands: Vec<HomogeneousPoly>,
}

impl Decomposition {
    pub fn new(summands: Vec<HomogeneousPoly>) -> Result<Self> {
        crate::secant::check_forms(&summands)?;
        Ok(Decomposition { summands })
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn modulus(&self) -> Modulus {
        self.summands[0].modulus()
    }

    fn half_basis(&self) -> std::sync::Arc<GradedBasis> {
        let f = &self.summands[0];
        GradedBasis::shared(f.n(), f.degree())
    }

    /// `r x N` matrix of coefficient vectors.
    pub fn coefficient_matrix(&self) -> FMatrix {
        let basis = self.half_basis();
        let rows: Vec<_> = self.summands.iter().map(|f| f.coeff_vector(&basis).expect("same space")).collect();
        FMatrix::from_rows(&rows, basis.len(), self.modulus()).expect("uniform rows")
    }

    /// Expands `Σ f_i^2`.
    pub fn expand(&self) -> HomogeneousPoly {
        let mut terms = self.summands.iter().map(HomogeneousPoly::square);
        let first = terms.next().expect("nonempty decomposition");
        terms.fold(first, |acc, t| acc.add(&t).expect("same space"))
    }

    /// `f_i -> Σ_j m_ij f_j`.
    pub fn transform(&self, m: &FMatrix) -> Result<Decomposition> {
        if m.rows() != self.len() || m.cols() != self.len() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix acting on {} summands",
                m.rows(),
                m.cols(),
                self.len()
            )));
        }
        let basis = self.half_basis();
        let summands = (0..m.rows())
            .map(|i| {
                let zero = HomogeneousPoly::zero(basis.clone(), self.modulus());
                self.summands.iter().enumerate().try_fold(zero, |acc, (j, f)| acc.add(&f.scale(m.get(i, j))))
            })
            .collect::<Result<_>>()?;
        Ok(Decomposition { summands })
    }
}

/// `a x + b y`.
pub fn linear_factor(a: i64, b: i64, modulus: Modulus) -> HomogeneousPoly {
    HomogeneousPoly::from_terms(1, 1, modulus, &[(vec![1, 0], a), (vec![0, 1], b)]).expect("binary linear form")
}

/// Factors are nonzero and pairwise non-proportional.
pub fn factors_are_general(factors: &[HomogeneousPoly]) -> bool {
    let m = match factors.first() {
        Some(f) => f.modulus(),
        None => return true,
    };
    let cs: Vec<(FieldElement, FieldElement)> = factors.iter().map(|l| (l.coeffs()[0], l.coeffs()[1])).collect();
    cs.iter().all(|&(a, b)| !(a.is_zero() && b.is_zero()))
        && cs.iter().tuple_combinations().all(|(&(a, b), &(c, d))| !m.sub(m.mul(a, d), m.mul(b, c)).is_zero())
}

#[derive(Debug, Clone)]
pub struct OrbitEntry {
    /// Indices of the factors in `A`; always contains factor 0.
    pub subset: Vec<usize>,
    pub decomposition: Decomposition,
}

#[derive(Debug, Clone)]
pub struct OrbitEnumeration {
    pub entries: Vec<OrbitEntry>,
    /// False when some factors are zero or proportional; the orbit count is
    /// then not guaranteed.
    pub factors_general: bool,
}

impl OrbitEnumeration {
    pub fn decompositions(&self) -> impl Iterator<Item = &Decomposition> {
        self.entries.iter().map(|e| &e.decomposition)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn product<'a>(factors: impl Iterator<Item = &'a HomogeneousPoly>, modulus: Modulus) -> Result<HomogeneousPoly> {
    let one = HomogeneousPoly::monomial(1, modulus, &[0, 0], 1)?;
    factors.into_iter().try_fold(one, |acc, l| acc.mul(l))
}

/// One two-square decomposition per unordered split of the `d` factors.
pub fn orbit_decompositions(factors: &[HomogeneousPoly]) -> Result<OrbitEnumeration> {
    let d = factors.len();
    if d % 2 == 1 {
        return Err(Error::OddDegree(d));
    }
    if d == 0 {
        return Err(Error::InvalidParams("no factors given".into()));
    }
    crate::secant::check_forms(factors)?;
    if factors[0].n() != 1 || factors[0].degree() != 1 {
        return Err(Error::InvalidParams("factors must be linear binary forms".into()));
    }
    let m = factors[0].modulus();
    let i = m.sqrt_minus_one()?;
    let half = m.inv(m.elem(2))?;
    let half_i = m.mul(half, i);

    let entries = (1..d)
        .combinations(d / 2 - 1)
        .map(|rest| {
            let mut in_a = vec![false; d];
            in_a[0] = true;
            for &k in &rest {
                in_a[k] = true;
            }
            let pa = product(factors.iter().zip(&in_a).filter(|(_, &a)| a).map(|(l, _)| l), m)?;
            let pb = product(factors.iter().zip(&in_a).filter(|(_, &a)| !a).map(|(l, _)| l), m)?;
            let p = pa.add(&pb)?.scale(half);
            let q = pa.sub(&pb)?.scale(half_i);
            let subset = (0..d).filter(|&k| in_a[k]).collect();
            Ok(OrbitEntry { subset, decomposition: Decomposition { summands: vec![p, q] } })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OrbitEnumeration { entries, factors_general: factors_are_general(factors) })
}

pub fn verify_decomposition(f: &HomogeneousPoly, dec: &Decomposition) -> Result<bool> {
    let k = dec.summands.first().ok_or_else(|| Error::InvalidParams("empty decomposition".into()))?.degree();
    if 2 * k != f.degree() {
        return Err(Error::DegreeMismatch { expected: f.degree(), found: 2 * k });
    }
    if f.n() != dec.summands[0].n() {
        return Err(Error::ArityMismatch(f.n() + 1, dec.summands[0].n() + 1));
    }
    Ok(dec.expand() == *f)
}

/// `Σ v_i v_i^T` over the summands' coefficient vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramInvariant {
    pub matrix: FMatrix,
}

impl GramInvariant {
    /// Stable digest of the entries, for listings.
    pub fn hash(&self) -> u64 {
        let m = &self.matrix;
        digest((0..m.rows()).flat_map(|i| (0..m.cols()).map(move |j| m.get(i, j).value())))
    }
}

pub fn gram_invariant(dec: &Decomposition) -> GramInvariant {
    let v = dec.coefficient_matrix();
    GramInvariant { matrix: v.transpose().mul(&v).expect("conformable") }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrbitComparison {
    CertifiedDistinct,
    PossiblySame,
}

pub fn distinct_orbits(a: &Decomposition, b: &Decomposition) -> Result<OrbitComparison> {
    for dec in [a, b] {
        if dec.coefficient_matrix().rank() < dec.len() {
            return Err(Error::DependentInput);
        }
    }
    let (fa, fb) = (&a.summands[0], &b.summands[0]);
    if fa.n() != fb.n() {
        return Err(Error::ArityMismatch(fa.n() + 1, fb.n() + 1));
    }
    if fa.degree() != fb.degree() {
        return Err(Error::DegreeMismatch { expected: fa.degree(), found: fb.degree() });
    }
    if gram_invariant(a) == gram_invariant(b) {
        Ok(OrbitComparison::PossiblySame)
    } else {
        Ok(OrbitComparison::CertifiedDistinct)
    }
}

/// A random `r x r` matrix with `M M^T = I`: a product of `r^2` random
/// reflections `I - 2 v v^T / (v^T v)` and a random diagonal of signs.
pub fn random_orthogonal(r: usize, modulus: Modulus, seed: u64) -> Result<FMatrix> {
    let p = modulus.p();
    if p == 2 {
        return Err(Error::InvalidParams("orthogonal reflections need an odd modulus".into()));
    }
    let mut rng = trial_rng(seed, 0);
    let mut m = FMatrix::identity(r, modulus);
    let two = modulus.elem(2);
    for _ in 0..r * r {
        let (v, norm) = loop {
            let v: Vec<FieldElement> = (0..r).map(|_| modulus.elem(rng.gen_range(0..p) as u64)).collect();
            let norm = v.iter().fold(FieldElement::ZERO, |acc, &x| modulus.add(acc, modulus.mul(x, x)));
            if !norm.is_zero() {
                break (v, norm);
            }
        };
        let c = modulus.div(two, norm)?;
        let mut refl = FMatrix::identity(r, modulus);
        for a in 0..r {
            for b in 0..r {
                let sub = modulus.mul(c, modulus.mul(v[a], v[b]));
                refl.set(a, b, modulus.sub(refl.get(a, b), sub));
            }
        }
        m = refl.mul(&m)?;
    }
    for i in 0..r {
        if rng.gen_bool(0.5) {
            m.scale_row(i, modulus.from_i64(-1));
        }
    }
    Ok(m)
}
