//! Homogeneous polynomials in `n + 1` variables over Z/p.
//!
//! Forms of a fixed degree are dense coefficient vectors relative to a
//! [`GradedBasis`]. The default order is graded-lexicographic: within a
//! degree, monomials are sorted by descending exponent of `x0`, then `x1`,
//! and so on, so `basis(1, 2) = [x0^2, x0 x1, x1^2]`.
//!
//! Dual forms (differential operators) live in the same coefficient space.
//! The pairing is the multinomial-free one: `(x^g)^v` applied to `x^b` is
//! `x^(b - g)` when `b >= g` componentwise and zero otherwise.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldElement, Modulus};

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// An exponent vector of length `n + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "x{i}")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Ordered basis of the monomials of one total degree.
#[derive(Debug, Clone)]
pub struct GradedBasis {
    n: usize,
    degree: usize,
    monomials: Vec<Monomial>,
    index: HashMap<Vec<u32>, usize>,
}

fn push_grlex(prefix: &mut Vec<u32>, vars_left: usize, deg_left: u32, out: &mut Vec<Monomial>) {
    if vars_left == 1 {
        prefix.push(deg_left);
        out.push(Monomial(prefix.clone()));
        prefix.pop();
        return;
    }
    for e in (0..=deg_left).rev() {
        prefix.push(e);
        push_grlex(prefix, vars_left - 1, deg_left - e, out);
        prefix.pop();
    }
}

impl GradedBasis {
    /// Basis of degree-`degree` monomials in `n + 1` variables, graded-lex order.
    pub fn new(n: usize, degree: usize) -> Self {
        let mut monomials = Vec::with_capacity(binomial(n + degree, n));
        push_grlex(&mut Vec::with_capacity(n + 1), n + 1, degree as u32, &mut monomials);
        Self::build(n, degree, monomials)
    }

    /// Basis with a caller-chosen order. The list must contain every
    /// monomial of the degree exactly once.
    pub fn from_monomials(n: usize, degree: usize, monomials: Vec<Monomial>) -> Result<Self> {
        let expected = binomial(n + degree, n);
        if monomials.len() != expected {
            return Err(Error::ShapeMismatch(format!("{} monomials given, basis has {expected}", monomials.len())));
        }
        for m in &monomials {
            if m.nvars() != n + 1 {
                return Err(Error::ArityMismatch(m.nvars(), n + 1));
            }
            if m.degree() != degree {
                return Err(Error::DegreeMismatch { expected: degree, found: m.degree() });
            }
        }
        let basis = Self::build(n, degree, monomials);
        if basis.index.len() != expected {
            return Err(Error::ShapeMismatch("repeated monomial in basis".into()));
        }
        Ok(basis)
    }

    fn build(n: usize, degree: usize, monomials: Vec<Monomial>) -> Self {
        let index = monomials.iter().enumerate().map(|(i, m)| (m.0.clone(), i)).collect();
        GradedBasis { n, degree, monomials, index }
    }

    /// Shared graded-lex basis, built once per `(n, degree)`.
    pub fn shared(n: usize, degree: usize) -> Arc<GradedBasis> {
        type Cache = Mutex<HashMap<(usize, usize), Arc<GradedBasis>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard.entry((n, degree)).or_insert_with(|| Arc::new(GradedBasis::new(n, degree))).clone()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn monomial(&self, i: usize) -> &Monomial {
        &self.monomials[i]
    }

    pub fn position(&self, exponents: &[u32]) -> Option<usize> {
        self.index.get(exponents).copied()
    }

    /// `table[a * other.len() + b]` is the position in `target` of
    /// `self[a] * other[b]`.
    pub fn product_table(&self, other: &GradedBasis, target: &GradedBasis) -> Vec<usize> {
        debug_assert_eq!(self.degree + other.degree, target.degree);
        let mut buf = vec![0u32; self.n + 1];
        let mut table = Vec::with_capacity(self.len() * other.len());
        for a in &self.monomials {
            for b in &other.monomials {
                for (k, slot) in buf.iter_mut().enumerate() {
                    *slot = a.0[k] + b.0[k];
                }
                table.push(target.position(&buf).expect("product lies in target degree"));
            }
        }
        table
    }

    fn same_as(&self, other: &GradedBasis) -> bool {
        std::ptr::eq(self, other)
            || (self.n == other.n && self.degree == other.degree && self.monomials == other.monomials)
    }
}

pub fn monomial_basis(n: usize, d: usize) -> Arc<GradedBasis> {
    GradedBasis::shared(n, d)
}

/// A form of fixed degree: coefficients relative to a basis.
#[derive(Debug, Clone)]
pub struct HomogeneousPoly {
    basis: Arc<GradedBasis>,
    modulus: Modulus,
    coeffs: Vec<FieldElement>,
}

impl PartialEq for HomogeneousPoly {
    fn eq(&self, other: &Self) -> bool {
        if self.modulus != other.modulus || self.n() != other.n() || self.degree() != other.degree() {
            return false;
        }
        if self.basis.same_as(&other.basis) {
            return self.coeffs == other.coeffs;
        }
        self.basis.monomials.iter().zip(&self.coeffs).all(|(m, &c)| other.coeff(m) == c)
    }
}

impl Eq for HomogeneousPoly {}

impl HomogeneousPoly {
    pub fn zero(basis: Arc<GradedBasis>, modulus: Modulus) -> Self {
        let coeffs = vec![FieldElement::ZERO; basis.len()];
        HomogeneousPoly { basis, modulus, coeffs }
    }

    pub fn from_coeffs(basis: Arc<GradedBasis>, modulus: Modulus, coeffs: Vec<FieldElement>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for a basis of size {}",
                coeffs.len(),
                basis.len()
            )));
        }
        Ok(HomogeneousPoly { basis, modulus, coeffs })
    }

    /// Builds a form from raw residues, reducing each mod p.
    pub fn from_values(basis: Arc<GradedBasis>, modulus: Modulus, values: &[i64]) -> Result<Self> {
        let coeffs = values.iter().map(|&v| modulus.from_i64(v)).collect();
        Self::from_coeffs(basis, modulus, coeffs)
    }

    /// `c * x^exponents` in the shared graded-lex basis.
    pub fn monomial(n: usize, modulus: Modulus, exponents: &[u32], c: i64) -> Result<Self> {
        if exponents.len() != n + 1 {
            return Err(Error::ArityMismatch(exponents.len(), n + 1));
        }
        let degree = exponents.iter().map(|&e| e as usize).sum();
        let mut f = Self::zero(GradedBasis::shared(n, degree), modulus);
        let pos = f.basis.position(exponents).expect("monomial of basis degree");
        f.coeffs[pos] = modulus.from_i64(c);
        Ok(f)
    }

    /// Sum of `c * x^e` terms in the shared graded-lex basis of degree `degree`.
    pub fn from_terms(n: usize, degree: usize, modulus: Modulus, terms: &[(Vec<u32>, i64)]) -> Result<Self> {
        let mut f = Self::zero(GradedBasis::shared(n, degree), modulus);
        for (exp, c) in terms {
            if exp.len() != n + 1 {
                return Err(Error::ArityMismatch(exp.len(), n + 1));
            }
            let deg: usize = exp.iter().map(|&e| e as usize).sum();
            if deg != degree {
                return Err(Error::DegreeMismatch { expected: degree, found: deg });
            }
            let pos = f.basis.position(exp).expect("monomial of basis degree");
            f.coeffs[pos] = modulus.add(f.coeffs[pos], modulus.from_i64(*c));
        }
        Ok(f)
    }

    /// Dense form with i.i.d. uniform coefficients.
    pub fn random<R: Rng + ?Sized>(basis: Arc<GradedBasis>, modulus: Modulus, rng: &mut R) -> Self {
        let coeffs = (0..basis.len()).map(|_| FieldElement::from_reduced(rng.gen_range(0..modulus.p()))).collect();
        HomogeneousPoly { basis, modulus, coeffs }
    }

    pub fn basis(&self) -> &Arc<GradedBasis> {
        &self.basis
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn n(&self) -> usize {
        self.basis.n
    }

    pub fn degree(&self) -> usize {
        self.basis.degree
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, m: &Monomial) -> FieldElement {
        self.basis.position(&m.0).map_or(FieldElement::ZERO, |i| self.coeffs[i])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Iterator over `(monomial, coefficient)` with nonzero coefficient.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, FieldElement)> + '_ {
        self.basis.monomials.iter().zip(&self.coeffs).filter(|(_, c)| !c.is_zero()).map(|(m, &c)| (m, c))
    }

    fn check_compatible(&self, other: &HomogeneousPoly) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::ArityMismatch(self.n() + 1, other.n() + 1));
        }
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus.p(), other.modulus.p()));
        }
        Ok(())
    }

    /// Re-expresses the form in `basis`.
    pub fn coeff_vector(&self, basis: &GradedBasis) -> Result<Vec<FieldElement>> {
        if basis.degree != self.degree() {
            return Err(Error::DegreeMismatch { expected: basis.degree, found: self.degree() });
        }
        if basis.n != self.n() {
            return Err(Error::ArityMismatch(basis.n + 1, self.n() + 1));
        }
        if self.basis.same_as(basis) {
            return Ok(self.coeffs.clone());
        }
        Ok(basis.monomials.iter().map(|m| self.coeff(m)).collect())
    }

    /// Same form, stored relative to `basis`.
    pub fn rebase(&self, basis: Arc<GradedBasis>) -> Result<Self> {
        let coeffs = self.coeff_vector(&basis)?;
        Ok(HomogeneousPoly { basis, modulus: self.modulus, coeffs })
    }

    pub fn add(&self, other: &HomogeneousPoly) -> Result<Self> {
        self.combine(other, |m, a, b| m.add(a, b))
    }

    pub fn sub(&self, other: &HomogeneousPoly) -> Result<Self> {
        self.combine(other, |m, a, b| m.sub(a, b))
    }

    fn combine(
        &self,
        other: &HomogeneousPoly,
        op: impl Fn(Modulus, FieldElement, FieldElement) -> FieldElement,
    ) -> Result<Self> {
        self.check_compatible(other)?;
        let rhs = other.coeff_vector(&self.basis)?;
        let coeffs = self.coeffs.iter().zip(rhs).map(|(&a, b)| op(self.modulus, a, b)).collect();
        Ok(HomogeneousPoly { basis: self.basis.clone(), modulus: self.modulus, coeffs })
    }

    pub fn scale(&self, c: FieldElement) -> Self {
        let m = self.modulus;
        HomogeneousPoly {
            basis: self.basis.clone(),
            modulus: m,
            coeffs: self.coeffs.iter().map(|&a| m.mul(a, c)).collect(),
        }
    }

    /// Product of two forms; the result uses the shared graded-lex basis.
    pub fn mul(&self, other: &HomogeneousPoly) -> Result<Self> {
        self.check_compatible(other)?;
        let m = self.modulus;
        let target = GradedBasis::shared(self.n(), self.degree() + other.degree());
        let mut out = vec![0u32; target.len()];
        let mut buf = vec![0u32; self.n() + 1];
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                for (k, slot) in buf.iter_mut().enumerate() {
                    *slot = a.0[k] + b.0[k];
                }
                let pos = target.position(&buf).expect("product degree");
                out[pos] = m.add_raw(out[pos], m.mul_raw(ca.value(), cb.value()));
            }
        }
        Ok(HomogeneousPoly {
            basis: target,
            modulus: m,
            coeffs: out.into_iter().map(FieldElement::from_reduced).collect(),
        })
    }

    pub fn square(&self) -> Self {
        self.mul(self).expect("self-compatible")
    }
}

pub fn poly_mul(f: &HomogeneousPoly, g: &HomogeneousPoly) -> Result<HomogeneousPoly> {
    f.mul(g)
}

pub fn coeff_vector(f: &HomogeneousPoly, basis: &GradedBasis) -> Result<Vec<FieldElement>> {
    f.coeff_vector(basis)
}

/// Applies the dual form `dual` (degree i) to `f` (degree d), giving a form of degree d - i.
pub fn contract(dual: &HomogeneousPoly, f: &HomogeneousPoly) -> Result<HomogeneousPoly> {
    dual.check_compatible(f)?;
    let (i, d) = (dual.degree(), f.degree());
    if i > d {
        return Err(Error::DegreeMismatch { expected: d, found: i });
    }
    let m = f.modulus;
    let target = GradedBasis::shared(f.n(), d - i);
    let mut out = vec![0u32; target.len()];
    let mut buf = vec![0u32; f.n() + 1];
    for (g, cg) in dual.terms() {
        for (beta, slot) in target.monomials.iter().zip(out.iter_mut()) {
            for (k, e) in buf.iter_mut().enumerate() {
                *e = g.0[k] + beta.0[k];
            }
            let cf = f.basis.position(&buf).map_or(FieldElement::ZERO, |k| f.coeffs[k]);
            if !cf.is_zero() {
                *slot = m.add_raw(*slot, m.mul_raw(cg.value(), cf.value()));
            }
        }
    }
    Ok(HomogeneousPoly { basis: target, modulus: m, coeffs: out.into_iter().map(FieldElement::from_reduced).collect() })
}

/// Scalar pairing of a dual form with a form of the same degree.
pub fn pair(dual: &HomogeneousPoly, f: &HomogeneousPoly) -> Result<FieldElement> {
    if dual.degree() != f.degree() {
        return Err(Error::DegreeMismatch { expected: f.degree(), found: dual.degree() });
    }
    Ok(contract(dual, f)?.coeffs[0])
}

impl fmt::Display for HomogeneousPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (mono, c) in self.terms() {
            let c = self.modulus.to_signed(c);
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c < 0 { '-' } else { '+' })?;
            }
            first = false;
            let a = c.unsigned_abs();
            if a != 1 || mono.degree() == 0 {
                write!(f, "{a}")?;
                if mono.degree() > 0 {
                    write!(f, "*")?;
                }
            }
            if mono.degree() > 0 {
                write!(f, "{mono}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub c: i64,
}

/// On-disk polynomial: `{"n": .., "d": .., "p": .., "terms": [{"exp": [..], "c": ..}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyJson {
    pub n: usize,
    pub d: usize,
    pub p: u32,
    pub terms: Vec<TermJson>,
}

impl PolyJson {
    pub fn to_poly(&self) -> Result<HomogeneousPoly> {
        let modulus = Modulus::new(self.p)?;
        let terms: Vec<_> = self.terms.iter().map(|t| (t.exp.clone(), t.c)).collect();
        HomogeneousPoly::from_terms(self.n, self.d, modulus, &terms)
    }

    pub fn from_poly(f: &HomogeneousPoly) -> Self {
        PolyJson {
            n: f.n(),
            d: f.degree(),
            p: f.modulus().p(),
            terms: f.terms().map(|(m, c)| TermJson { exp: m.0.clone(), c: c.value() as i64 }).collect(),
        }
    }
}

pub fn parse_poly_json(text: &str) -> Result<HomogeneousPoly> {
    let raw: PolyJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    raw.to_poly()
}
