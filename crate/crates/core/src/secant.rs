//! Dimension theory of the secant varieties of the variety of squares.
//!
//! `sigma_r` is the closure of the sums `f_1^2 + ... + f_r^2` with
//! `deg f_i = d/2`. By Terracini, its tangent space at a general point is
//! the degree-`d` piece `I_d = f_1 S^{d/2} + ... + f_r S^{d/2}`, so its
//! dimension is the rank of the matrix whose rows are the products
//! `f_i * t_j`. The `O(r)` symmetry of the decomposition makes the
//! expected dimension `r N - C(r, 2)` with `N = C(d/2 + n, n)`.
//!
//! Sampled ranks are one-sided certificates: a rank observed over Z/p at a
//! special point is a lower bound for the generic rank in characteristic 0.
//! A maximal rank therefore certifies non-defectivity; anything else is
//! reported as inconclusive, never as defective.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::Modulus;
use crate::linalg::FMatrix;
use crate::poly::{binomial, GradedBasis, HomogeneousPoly};
use crate::seed::trial_rng;

pub const DEFAULT_TRIALS: usize = 3;

/// `(n, d, r)`: `n + 1` variables, even degree `d`, `r` squares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SecantParams {
    pub n: usize,
    pub d: usize,
    pub r: usize,
}

impl SecantParams {
    pub fn new(n: usize, d: usize, r: usize) -> Result<Self> {
        if d % 2 == 1 {
            return Err(Error::OddDegree(d));
        }
        if d < 2 {
            return Err(Error::InvalidParams(format!("degree must be at least 2, got {d}")));
        }
        if n < 1 {
            return Err(Error::InvalidParams("need at least two variables (n >= 1)".into()));
        }
        let half_dim = binomial(d / 2 + n, n);
        if r < 1 || r > half_dim {
            return Err(Error::InvalidParams(format!("r = {r} outside 1..={half_dim}")));
        }
        Ok(SecantParams { n, d, r })
    }

    pub fn half_degree(&self) -> usize {
        self.d / 2
    }

    /// `N = dim S^{d/2}`.
    pub fn half_dim(&self) -> usize {
        binomial(self.d / 2 + self.n, self.n)
    }

    pub fn ambient_dim(&self) -> usize {
        binomial(self.d + self.n, self.n)
    }

    pub fn expected_dim(&self) -> usize {
        self.r * self.half_dim() - binomial(self.r, 2)
    }

    /// `min(expected, ambient)`: the rank a general Terracini matrix should reach.
    pub fn target_dim(&self) -> usize {
        self.expected_dim().min(self.ambient_dim())
    }

    /// Whether `sigma_r` is expected to be a proper subvariety.
    pub fn is_subgeneric(&self) -> bool {
        self.expected_dim() < self.ambient_dim()
    }
}

impl fmt::Display for SecantParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} d={} r={}", self.n, self.d, self.r)
    }
}

pub fn expected_dim(params: &SecantParams) -> Result<usize> {
    if params.d % 2 == 1 {
        return Err(Error::OddDegree(params.d));
    }
    Ok(params.expected_dim())
}

/// Least `r` whose expected dimension reaches `C(d + n, n)`.
pub fn generic_rank(d: usize, n: usize) -> Result<usize> {
    if d % 2 == 1 {
        return Err(Error::OddDegree(d));
    }
    if d == 0 {
        return Ok(1);
    }
    let half = binomial(d / 2 + n, n);
    let ambient = binomial(d + n, n);
    Ok((1..=half).find(|&r| r * half - binomial(r, 2) >= ambient).unwrap_or(half))
}

pub(crate) fn check_forms(f_list: &[HomogeneousPoly]) -> Result<()> {
    let first = f_list.first().ok_or_else(|| Error::InvalidParams("empty list of forms".into()))?;
    for f in &f_list[1..] {
        if f.n() != first.n() {
            return Err(Error::ArityMismatch(first.n() + 1, f.n() + 1));
        }
        if f.degree() != first.degree() {
            return Err(Error::DegreeMismatch { expected: first.degree(), found: f.degree() });
        }
        if f.modulus() != first.modulus() {
            return Err(Error::ModulusMismatch(first.modulus().p(), f.modulus().p()));
        }
    }
    Ok(())
}

/// Matrix whose row `(i, j)` is the coefficient vector of `f_i * t_j`,
/// with `t_j` the graded-lex basis of degree `d/2` and columns the
/// graded-lex basis of degree `d`.
pub fn terracini_matrix(f_list: &[HomogeneousPoly]) -> Result<FMatrix> {
    check_forms(f_list)?;
    let (n, k) = (f_list[0].n(), f_list[0].degree());
    terracini_matrix_in(f_list, &GradedBasis::shared(n, k), &GradedBasis::shared(n, 2 * k))
}

/// [`terracini_matrix`] with explicit bases for the multipliers `t_j` and the columns.
pub fn terracini_matrix_in(f_list: &[HomogeneousPoly], t_basis: &GradedBasis, target: &GradedBasis) -> Result<FMatrix> {
    check_forms(f_list)?;
    let first = &f_list[0];
    let (n, k, m) = (first.n(), first.degree(), first.modulus());
    if t_basis.n() != n || target.n() != n {
        return Err(Error::ArityMismatch(n + 1, t_basis.n().max(target.n()) + 1));
    }
    if t_basis.degree() != k || target.degree() != 2 * k {
        return Err(Error::DegreeMismatch { expected: k, found: t_basis.degree() });
    }
    let cols = target.len();
    let nt = t_basis.len();
    let mut data = vec![0u32; f_list.len() * nt * cols];
    for (i, f) in f_list.iter().enumerate() {
        let table = f.basis().product_table(t_basis, target);
        for (a, c) in f.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for j in 0..nt {
                data[(i * nt + j) * cols + table[a * nt + j]] = c.value();
            }
        }
    }
    Ok(FMatrix::from_raw(f_list.len() * nt, cols, m, data))
}

/// Dense random forms of degree `d/2` for one trial.
pub fn sample_forms(params: &SecantParams, modulus: Modulus, seed: u64, trial: usize) -> Vec<HomogeneousPoly> {
    let basis: Arc<GradedBasis> = GradedBasis::shared(params.n, params.half_degree());
    let mut rng = trial_rng(seed, trial);
    (0..params.r).map(|_| HomogeneousPoly::random(basis.clone(), modulus, &mut rng)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DimensionVerdict {
    NonDefectiveCertified,
    Inconclusive,
}

impl fmt::Display for DimensionVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DimensionVerdict::NonDefectiveCertified => "NonDefectiveCertified",
            DimensionVerdict::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub n: usize,
    pub d: usize,
    pub r: usize,
    pub p: u32,
    pub seed: u64,
    pub trials: usize,
    pub observed_rank: usize,
    pub expected_dim: usize,
    pub ambient_dim: usize,
    pub verdict: DimensionVerdict,
}

impl DimensionReport {
    pub fn params(&self) -> SecantParams {
        SecantParams { n: self.n, d: self.d, r: self.r }
    }
}

/// Maximum Terracini rank over `trials` random samples, stopping at the first maximal one.
pub fn secant_dim_sample(params: &SecantParams, modulus: Modulus, seed: u64, trials: usize) -> Result<DimensionReport> {
    modulus.check_degree(params.d)?;
    if trials == 0 {
        return Err(Error::InvalidParams("at least one trial is required".into()));
    }
    let target = params.target_dim();
    let mut best = 0;
    for t in 0..trials {
        let forms = sample_forms(params, modulus, seed, t);
        best = best.max(terracini_matrix(&forms)?.rank());
        if best == target {
            break;
        }
    }
    let verdict = if best == target { DimensionVerdict::NonDefectiveCertified } else { DimensionVerdict::Inconclusive };
    Ok(DimensionReport {
        n: params.n,
        d: params.d,
        r: params.r,
        p: modulus.p(),
        seed,
        trials,
        observed_rank: best,
        expected_dim: params.expected_dim(),
        ambient_dim: params.ambient_dim(),
        verdict,
    })
}

/// Result of a closed-form sufficient condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundCheck {
    Holds,
    Fails,
    /// The bound needs `r >= n + 2`.
    NotApplicable,
}

impl BoundCheck {
    pub fn holds(self) -> bool {
        self == BoundCheck::Holds
    }
}

/// `r (d/2 + 1) <= n d + b` with `b = min(n, r - n - 2)`; sufficient for non-defectivity.
pub fn bdp_bound_check(n: usize, r: usize, d: usize) -> BoundCheck {
    if r < n + 2 {
        return BoundCheck::NotApplicable;
    }
    let b = n.min(r - n - 2);
    // doubled to stay integral for odd d
    if r * (d + 2) <= 2 * (n * d + b) {
        BoundCheck::Holds
    } else {
        BoundCheck::Fails
    }
}

/// `r <= 2n - (2/d)(n + 2)`, compared exactly.
pub fn bop2_bound_check(n: usize, r: usize, d: usize) -> bool {
    if d == 0 {
        return false;
    }
    let (n, r, d) = (n as i128, r as i128, d as i128);
    r * d <= 2 * n * d - 2 * (n + 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::FMatrix;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p101() -> Modulus {
        Modulus::new(101).unwrap()
    }

    fn params(n: usize, d: usize, r: usize) -> SecantParams {
        SecantParams::new(n, d, r).unwrap()
    }

    #[test]
    fn params_validation() {
        assert_eq!(SecantParams::new(2, 5, 2), Err(Error::OddDegree(5)));
        assert!(matches!(SecantParams::new(0, 4, 1), Err(Error::InvalidParams(_))));
        assert!(matches!(SecantParams::new(2, 4, 0), Err(Error::InvalidParams(_))));
        assert!(matches!(SecantParams::new(2, 4, 7), Err(Error::InvalidParams(_))));
        assert!(SecantParams::new(2, 4, 6).is_ok());
    }

    #[test]
    fn expected_dim_examples() {
        assert_eq!(params(2, 4, 1).expected_dim(), 6);
        assert_eq!(params(2, 4, 3).expected_dim(), 15);
        assert_eq!(params(2, 4, 3).ambient_dim(), 15);
        for d in (2..=20).step_by(2) {
            let p = params(1, d, 2);
            assert_eq!(p.expected_dim(), d + 1);
            assert_eq!(p.ambient_dim(), d + 1);
        }
    }

    #[test]
    fn generic_rank_examples() {
        for n in 1..=20 {
            assert_eq!(generic_rank(2, n).unwrap(), n + 1);
        }
        assert_eq!(generic_rank(4, 2).unwrap(), 3);
        assert_eq!(generic_rank(4, 3).unwrap(), 5);
        assert_eq!(generic_rank(5, 3), Err(Error::OddDegree(5)));
        for n in 1..=6 {
            for d in (2..=20).step_by(2) {
                assert!(generic_rank(d, n).unwrap() <= 1 << n, "d={d} n={n}");
            }
        }
    }

    #[test]
    fn quadric_expected_dim_matches_symmetric_rank_varieties() {
        for n in 1..=10 {
            for r in 1..=n + 1 {
                let classical = binomial(n + 2, 2) - binomial(n + 2 - r, 2);
                assert_eq!(params(n, 2, r).expected_dim(), classical, "n={n} r={r}");
            }
        }
    }

    #[test]
    fn terracini_examples() {
        let m = p101();
        for d in [2usize, 4, 6] {
            let f = HomogeneousPoly::monomial(2, m, &[(d / 2) as u32, 0, 0], 1).unwrap();
            assert_eq!(terracini_matrix(&[f]).unwrap().rank(), binomial(d / 2 + 2, 2));
        }
        let fermat: Vec<_> = (0..3)
            .map(|i| {
                let mut e = [0u32; 3];
                e[i] = 3;
                HomogeneousPoly::monomial(2, m, &e, 1).unwrap()
            })
            .collect();
        let t = terracini_matrix(&fermat).unwrap();
        assert_eq!((t.rows(), t.cols()), (30, 28));
        assert_eq!(t.rank(), 27);
        let forms = sample_forms(&params(2, 4, 3), m, 0, 0);
        assert_eq!(terracini_matrix(&forms).unwrap().rank(), 15);
    }

    #[test]
    fn terracini_rejects_mixed_degrees() {
        let m = p101();
        let a = HomogeneousPoly::monomial(2, m, &[1, 0, 0], 1).unwrap();
        let b = HomogeneousPoly::monomial(2, m, &[2, 0, 0], 1).unwrap();
        assert!(matches!(terracini_matrix(&[a, b]), Err(Error::DegreeMismatch { .. })));
    }

    #[test]
    fn dimension_samples() {
        let m = p101();
        let r = secant_dim_sample(&params(2, 6, 3), m, 0, 3).unwrap();
        assert_eq!((r.observed_rank, r.verdict), (27, DimensionVerdict::NonDefectiveCertified));
        let r = secant_dim_sample(&params(3, 4, 5), m, 0, 3).unwrap();
        assert_eq!((r.observed_rank, r.ambient_dim, r.verdict), (35, 35, DimensionVerdict::NonDefectiveCertified));
        let r = secant_dim_sample(&params(1, 4, 2), m, 0, 3).unwrap();
        assert_eq!((r.observed_rank, r.verdict), (5, DimensionVerdict::NonDefectiveCertified));
        let small = Modulus::new(5).unwrap();
        assert_eq!(secant_dim_sample(&params(2, 6, 2), small, 0, 3), Err(Error::BadModulus { p: 5, d: 6 }));
    }

    #[test]
    fn dimension_report_json_fields() {
        let r = secant_dim_sample(&params(1, 4, 2), p101(), 9, 3).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            ["ambient_dim", "d", "expected_dim", "n", "observed_rank", "p", "r", "seed", "trials", "verdict"]
        );
        assert_eq!(v["verdict"], "NonDefectiveCertified");
    }

    #[test]
    fn bdp_examples() {
        assert_eq!(bdp_bound_check(4, 7, 12), BoundCheck::Holds);
        assert_eq!(bdp_bound_check(4, 7, 10), BoundCheck::Fails);
        assert_eq!(bdp_bound_check(6, 9, 6), BoundCheck::Holds);
        assert_eq!(bdp_bound_check(4, 5, 12), BoundCheck::NotApplicable);
    }

    #[test]
    fn bop2_examples() {
        assert!(!bop2_bound_check(5, 7, 4));
        assert!(bop2_bound_check(5, 6, 14));
        assert!(bop2_bound_check(2, 1, 4));
    }

    proptest! {
        #[test]
        fn terracini_rank_invariant_under_basis_change(seed in any::<u64>(), n in 1usize..4, half in 1usize..3, r in 1usize..4) {
            let d = 2 * half;
            let m = p101();
            let p = SecantParams::new(n, d, r.min(binomial(half + n, n))).unwrap();
            let forms = sample_forms(&p, m, seed, 0);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5);
            let a: Vec<i64> = (0..p.r * p.r).map(|_| rng.gen_range(0..101)).collect();
            let a = FMatrix::from_values(p.r, p.r, m, &a).unwrap();
            prop_assume!(a.rank() == p.r);
            let mixed: Vec<HomogeneousPoly> = (0..p.r).map(|i| {
                let mut acc = HomogeneousPoly::zero(forms[0].basis().clone(), m);
                for (j, f) in forms.iter().enumerate() {
                    acc = acc.add(&f.scale(a.get(i, j))).unwrap();
                }
                acc
            }).collect();
            prop_assert_eq!(terracini_matrix(&forms).unwrap().rank(), terracini_matrix(&mixed).unwrap().rank());
        }

        #[test]
        fn observed_rank_never_exceeds_target(seed in any::<u64>(), n in 1usize..4, half in 1usize..3, r in 1usize..6) {
            let p = SecantParams::new(n, 2 * half, r.min(binomial(half + n, n))).unwrap();
            let rep = secant_dim_sample(&p, p101(), seed, 1).unwrap();
            prop_assert!(rep.observed_rank <= p.target_dim());
        }
    }
}
