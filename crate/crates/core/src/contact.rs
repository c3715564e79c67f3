//! Tangential contact loci and `O(r)`-identifiability certificates.
//!
//! For forms `f_1, ..., f_r` of degree `k = d/2`, let `I_d` be the span of
//! the products `f_i * t_j` and `H_1, ..., H_m` a basis of the functionals
//! vanishing on it. A square `g^2` is tangentially in contact with `I_d`
//! exactly when `H_p(g * t) = 0` for every `p` and every degree-`k` form
//! `t`; this is a linear system in `g` whose matrix stacks the Hessians
//! `(H_p(t_i t_j))_{ij}` side by side. The contact locus always contains
//! the span of the `f_i`, so its dimension is at least `r`, and it equals
//! `r` exactly when the stacked Hessian has rank `N - r`.
//!
//! When `I_d` has the expected dimension `rN - C(r, 2)` and the contact
//! locus has dimension `r` at a random point over Z/p, semicontinuity lifts
//! both facts to a general point over C, and the secant variety is
//! generically `O(r)`-identifiable. As with dimension reports, a failure is
//! only `Inconclusive`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldElement, Modulus};
use crate::linalg::{rank_lower_bound_streaming, FMatrix, RankAccumulator};
use crate::poly::{GradedBasis, HomogeneousPoly};
use crate::secant::{check_forms, terracini_matrix_in, DimensionReport, DimensionVerdict, SecantParams};
use crate::seed::trial_rng;

/// Draws of the random combination before falling back to the full stack.
pub const COMBINATION_ATTEMPTS: usize = 3;

pub const SMOOTH_POINT_HYPOTHESIS: &str = "f = Σ f_i² is a smooth point of σ_r(Sq_{d,n})";
pub const EXPECTED_DIMENSION_HYPOTHESIS: &str = "σ_r(Sq_{d,n}) has the expected dimension rN − C(r,2)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum HessianMode {
    /// Rank of one random combination `Σ λ_p H_p`; a lower bound for the stacked rank.
    #[default]
    #[serde(rename = "combo")]
    RandomCombination,
    /// Exact rank of all `m` blocks side by side.
    #[serde(rename = "full")]
    FullStack,
}

impl fmt::Display for HessianMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HessianMode::RandomCombination => "combo",
            HessianMode::FullStack => "full",
        })
    }
}

impl std::str::FromStr for HessianMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "combo" => Ok(HessianMode::RandomCombination),
            "full" => Ok(HessianMode::FullStack),
            other => Err(Error::InvalidParams(format!("unknown hessian mode {other:?}"))),
        }
    }
}

/// `I_d`, its annihilator, and a complement of `<f_1, ..., f_r>` in `S^{d/2}`.
#[derive(Debug, Clone)]
pub struct ContactData {
    params: SecantParams,
    modulus: Modulus,
    f_list: Vec<HomogeneousPoly>,
    terracini_rank: usize,
    hyperplanes: Vec<HomogeneousPoly>,
    complement: Vec<HomogeneousPoly>,
    /// `half_table[a * N + b]`: position of `t_a * t_b` in the degree-`d` basis.
    half_table: Vec<usize>,
}

fn coefficient_rows(f_list: &[HomogeneousPoly], basis: &GradedBasis) -> Result<FMatrix> {
    let rows = f_list.iter().map(|f| f.coeff_vector(basis)).collect::<Result<Vec<_>>>()?;
    FMatrix::from_rows(&rows, basis.len(), f_list[0].modulus())
}

/// Columns of `m` as forms in `basis`.
fn columns_as_forms(m: &FMatrix, basis: &std::sync::Arc<GradedBasis>) -> Vec<HomogeneousPoly> {
    (0..m.cols())
        .map(|j| HomogeneousPoly::from_coeffs(basis.clone(), m.modulus(), m.column(j)).expect("column length"))
        .collect()
}

impl ContactData {
    pub fn new(f_list: &[HomogeneousPoly]) -> Result<Self> {
        check_forms(f_list)?;
        let first = &f_list[0];
        let (n, k, modulus) = (first.n(), first.degree(), first.modulus());
        let params = SecantParams::new(n, 2 * k, f_list.len())?;
        let half = GradedBasis::shared(n, k);
        let full = GradedBasis::shared(n, 2 * k);

        let coeffs = coefficient_rows(f_list, &half)?;
        if coeffs.rank() < f_list.len() {
            return Err(Error::DependentInput);
        }
        let f_list: Vec<HomogeneousPoly> = f_list.iter().map(|f| f.rebase(half.clone())).collect::<Result<_>>()?;

        let terracini = terracini_matrix_in(&f_list, &half, &full)?;
        let kernel = terracini.kernel_basis();
        let terracini_rank = full.len() - kernel.cols();
        let hyperplanes = columns_as_forms(&kernel, &full);
        let complement = complement_basis(&f_list)?;
        let half_table = half.product_table(&half, &full);
        Ok(ContactData { params, modulus, f_list, terracini_rank, hyperplanes, complement, half_table })
    }

    pub fn params(&self) -> SecantParams {
        self.params
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn forms(&self) -> &[HomogeneousPoly] {
        &self.f_list
    }

    pub fn terracini_rank(&self) -> usize {
        self.terracini_rank
    }

    pub fn hyperplanes(&self) -> &[HomogeneousPoly] {
        &self.hyperplanes
    }

    pub fn complement(&self) -> &[HomogeneousPoly] {
        &self.complement
    }

    pub fn m(&self) -> usize {
        self.hyperplanes.len()
    }

    /// `N - r`, the largest possible stacked Hessian rank.
    pub fn target_rank(&self) -> usize {
        self.params.half_dim() - self.params.r
    }

    /// `(H(t_a t_b))` in the monomial basis of `S^{d/2}`. This is also the
    /// middle catalecticant of `H`.
    pub fn monomial_hessian(&self, h: &HomogeneousPoly) -> FMatrix {
        let nh = self.params.half_dim();
        let hv = h.coeffs();
        let data = self.half_table.iter().map(|&pos| hv[pos].value()).collect();
        FMatrix::from_raw(nh, nh, self.modulus, data)
    }

    /// `(H(b_i b_j))` for the forms `b_i` (all of degree `d/2`).
    pub fn hessian_in(&self, h: &HomogeneousPoly, forms: &[HomogeneousPoly]) -> FMatrix {
        let half = GradedBasis::shared(self.params.n, self.params.half_degree());
        let b = coefficient_rows(forms, &half).expect("forms of degree d/2");
        let c = self.monomial_hessian(h);
        b.mul(&c).and_then(|bc| bc.mul(&b.transpose())).expect("conformable")
    }

    /// Hessian of `H` on the complement `s_{r+1}, ..., s_N`.
    pub fn complement_hessian(&self, h: &HomogeneousPoly) -> FMatrix {
        self.hessian_in(h, &self.complement)
    }

    /// `Σ λ_p H_p`.
    pub fn combine_hyperplanes(&self, lambdas: &[FieldElement]) -> HomogeneousPoly {
        let full = GradedBasis::shared(self.params.n, self.params.d);
        let mut acc = HomogeneousPoly::zero(full, self.modulus);
        for (h, &l) in self.hyperplanes.iter().zip(lambdas) {
            acc = acc.add(&h.scale(l)).expect("same space");
        }
        acc
    }

    fn combination_rank<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let lambdas: Vec<FieldElement> =
            (0..self.m()).map(|_| self.modulus.elem(rng.gen_range(0..self.modulus.p()) as u64)).collect();
        self.complement_hessian(&self.combine_hyperplanes(&lambdas)).rank()
    }

    fn full_stack_rank(&self) -> usize {
        let blocks = self.hyperplanes.iter().map(|h| self.complement_hessian(h));
        rank_lower_bound_streaming(blocks, Some(self.target_rank())).expect("blocks share the complement size").rank
    }

    /// Certificate path: random combinations first, exact stack if they all fall short.
    fn certifying_rank<R: Rng + ?Sized>(&self, mode: HessianMode, rng: &mut R) -> usize {
        if self.m() == 0 || self.target_rank() == 0 {
            return 0;
        }
        if mode == HessianMode::RandomCombination {
            for _ in 0..COMBINATION_ATTEMPTS {
                let r = self.combination_rank(rng);
                if r == self.target_rank() {
                    return r;
                }
            }
        }
        self.full_stack_rank()
    }
}

/// Basis of the functionals annihilating `I_d`, as dual forms of degree `d`.
pub fn hyperplane_basis(f_list: &[HomogeneousPoly]) -> Result<Vec<HomogeneousPoly>> {
    Ok(ContactData::new(f_list)?.hyperplanes)
}

/// `N - r` forms completing `f_list` to a basis of `S^{d/2}`.
///
/// Tries the orthogonal complement under the coefficient pairing first; over
/// Z/p that span can meet `<f_i>`, in which case monomials are added greedily.
pub fn complement_basis(f_list: &[HomogeneousPoly]) -> Result<Vec<HomogeneousPoly>> {
    check_forms(f_list)?;
    let first = &f_list[0];
    let half = GradedBasis::shared(first.n(), first.degree());
    let nh = half.len();
    let coeffs = coefficient_rows(f_list, &half)?;
    if coeffs.rank() < f_list.len() {
        return Err(Error::DependentInput);
    }
    let orth = coeffs.kernel_basis();
    let mut acc = RankAccumulator::new(nh, first.modulus());
    for i in 0..coeffs.rows() {
        acc.insert(coeffs.raw_row(i));
    }
    let orth_t = orth.transpose();
    let independent = (0..orth_t.rows()).all(|j| acc.insert(orth_t.raw_row(j)));
    if independent && acc.rank() == nh {
        return Ok(columns_as_forms(&orth, &half));
    }

    let mut acc = RankAccumulator::new(nh, first.modulus());
    for i in 0..coeffs.rows() {
        acc.insert(coeffs.raw_row(i));
    }
    let mut out = Vec::with_capacity(nh - f_list.len());
    let mut unit = vec![0u32; nh];
    for (a, mono) in half.monomials().iter().enumerate() {
        unit[a] = 1;
        if acc.insert(&unit) {
            out.push(HomogeneousPoly::monomial(first.n(), first.modulus(), mono.exponents(), 1)?);
        }
        unit[a] = 0;
    }
    Ok(out)
}

/// Rank of the stacked complement Hessians. `RandomCombination` uses one
/// combination drawn from `seed`; `FullStack` is exact.
pub fn stacked_hessian_rank(contact: &ContactData, mode: HessianMode, seed: u64) -> usize {
    if contact.m() == 0 || contact.target_rank() == 0 {
        return 0;
    }
    match mode {
        HessianMode::RandomCombination => contact.combination_rank(&mut trial_rng(seed, 0)),
        HessianMode::FullStack => contact.full_stack_rank(),
    }
}

/// `N` minus the stacked Hessian rank: the affine dimension of the contact
/// locus (an upper bound in `RandomCombination` mode).
pub fn contact_locus_dim(contact: &ContactData, mode: HessianMode, seed: u64) -> usize {
    contact.params.half_dim() - stacked_hessian_rank(contact, mode, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateMode {
    Generic,
    Specific,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdentifiabilityVerdict {
    Certified,
    Inconclusive,
}

impl fmt::Display for IdentifiabilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IdentifiabilityVerdict::Certified => "Certified",
            IdentifiabilityVerdict::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentifiabilityCertificate {
    pub n: usize,
    pub d: usize,
    pub r: usize,
    pub p: u32,
    pub seed: u64,
    pub mode: CertificateMode,
    pub trials: usize,
    pub terracini_rank: usize,
    pub expected_dim: usize,
    pub hessian_rank: usize,
    pub target_rank: usize,
    pub hessian_mode: HessianMode,
    pub verdict: IdentifiabilityVerdict,
    pub unchecked_hypotheses: Vec<String>,
}

impl IdentifiabilityCertificate {
    pub fn params(&self) -> SecantParams {
        SecantParams { n: self.n, d: self.d, r: self.r }
    }

    pub fn terracini_ok(&self) -> bool {
        self.terracini_rank == self.expected_dim
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == IdentifiabilityVerdict::Certified
    }

    fn drop_expected_dimension(&mut self) -> bool {
        let before = self.unchecked_hypotheses.len();
        self.unchecked_hypotheses.retain(|h| h != EXPECTED_DIMENSION_HYPOTHESIS);
        before != self.unchecked_hypotheses.len()
    }

    /// Removes the expected-dimension hypothesis of a specific certificate
    /// when `generic` certifies the same `(n, d, r)`.
    pub fn discharge_with_generic(&mut self, generic: &IdentifiabilityCertificate) -> bool {
        generic.mode == CertificateMode::Generic
            && generic.is_certified()
            && generic.params() == self.params()
            && self.drop_expected_dimension()
    }

    /// Same, from a dimension report; only a non-filling certified report applies.
    pub fn discharge_with_dimension(&mut self, report: &DimensionReport) -> bool {
        report.verdict == DimensionVerdict::NonDefectiveCertified
            && report.params() == self.params()
            && report.observed_rank == self.expected_dim
            && self.drop_expected_dimension()
    }
}

fn evaluate(contact: &ContactData, mode: HessianMode, rng: &mut impl Rng) -> (usize, usize, bool) {
    let params = contact.params();
    let terracini_ok = contact.terracini_rank == params.expected_dim();
    let hessian = if terracini_ok { contact.certifying_rank(mode, rng) } else { 0 };
    (contact.terracini_rank, hessian, terracini_ok && hessian == contact.target_rank())
}

/// Generic identifiability of `sigma_r` via random samples.
pub fn generic_identifiability(
    params: &SecantParams,
    modulus: Modulus,
    seed: u64,
    trials: usize,
    mode: HessianMode,
) -> Result<IdentifiabilityCertificate> {
    if !params.is_subgeneric() {
        return Err(Error::NotSubgeneric { n: params.n, d: params.d, r: params.r });
    }
    generic_identifiability_unchecked(params, modulus, seed, trials, mode)
}

/// [`generic_identifiability`] without the subgeneric-rank guard. For a
/// filling `r` there are no hyperplanes and the verdict is `Inconclusive`.
pub fn generic_identifiability_unchecked(
    params: &SecantParams,
    modulus: Modulus,
    seed: u64,
    trials: usize,
    mode: HessianMode,
) -> Result<IdentifiabilityCertificate> {
    modulus.check_degree(params.d)?;
    if trials == 0 {
        return Err(Error::InvalidParams("at least one trial is required".into()));
    }
    let basis = GradedBasis::shared(params.n, params.half_degree());
    let mut best = (0usize, 0usize);
    let mut certified = false;
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let forms: Vec<_> = (0..params.r).map(|_| HomogeneousPoly::random(basis.clone(), modulus, &mut rng)).collect();
        let contact = match ContactData::new(&forms) {
            Ok(c) => c,
            Err(Error::DependentInput) => continue,
            Err(e) => return Err(e),
        };
        let (tr, hr, ok) = evaluate(&contact, mode, &mut rng);
        best = best.max((tr, hr));
        if ok {
            best = (tr, hr);
            certified = true;
            break;
        }
    }
    Ok(IdentifiabilityCertificate {
        n: params.n,
        d: params.d,
        r: params.r,
        p: modulus.p(),
        seed,
        mode: CertificateMode::Generic,
        trials,
        terracini_rank: best.0,
        expected_dim: params.expected_dim(),
        hessian_rank: best.1,
        target_rank: params.half_dim() - params.r,
        hessian_mode: mode,
        verdict: if certified { IdentifiabilityVerdict::Certified } else { IdentifiabilityVerdict::Inconclusive },
        unchecked_hypotheses: Vec::new(),
    })
}

/// Identifiability of the specific form `Σ f_i²`. A `Certified` verdict is
/// conditional on the listed hypotheses.
pub fn specific_identifiability(
    f_list: &[HomogeneousPoly],
    mode: HessianMode,
    seed: u64,
) -> Result<IdentifiabilityCertificate> {
    check_forms(f_list)?;
    let modulus = f_list[0].modulus();
    modulus.check_degree(2 * f_list[0].degree())?;
    let contact = ContactData::new(f_list)?;
    let params = contact.params();
    let (tr, hr, ok) = evaluate(&contact, mode, &mut trial_rng(seed, 0));
    Ok(IdentifiabilityCertificate {
        n: params.n,
        d: params.d,
        r: params.r,
        p: modulus.p(),
        seed,
        mode: CertificateMode::Specific,
        trials: 1,
        terracini_rank: tr,
        expected_dim: params.expected_dim(),
        hessian_rank: hr,
        target_rank: contact.target_rank(),
        hessian_mode: mode,
        verdict: if ok { IdentifiabilityVerdict::Certified } else { IdentifiabilityVerdict::Inconclusive },
        unchecked_hypotheses: vec![SMOOTH_POINT_HYPOTHESIS.to_string(), EXPECTED_DIMENSION_HYPOTHESIS.to_string()],
    })
}
