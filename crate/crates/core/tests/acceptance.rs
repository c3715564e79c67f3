//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sosident::binary::{linear_factor, OrbitComparison};
use sosident::contact::{ContactData, HessianMode, IdentifiabilityVerdict};
use sosident::poly::binomial;
use sosident::secant::{sample_forms, terracini_matrix_in, BoundCheck, DimensionVerdict};
use sosident::{
    bdp_bound_check, bop2_bound_check, containment_check, contract, distinct_orbits, generic_identifiability,
    generic_rank, gram_invariant, middle_cat_rank, orbit_decompositions, random_orthogonal, secant_dim_sample,
    specific_identifiability, terracini_matrix, verify_decomposition, Decomposition, FMatrix, GradedBasis,
    HomogeneousPoly, Modulus, SecantParams,
};

type Outcome = Result<String, String>;

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn p101() -> Modulus {
    Modulus::new(101).unwrap()
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn timed_case(
    limit: Duration,
    label: &str,
    slowest: &mut Duration,
    f: impl FnOnce() -> Result<(), String>,
) -> Result<(), String> {
    let start = Instant::now();
    f().map_err(|e| format!("{label}: {e}"))?;
    let t = start.elapsed();
    *slowest = (*slowest).max(t);
    ensure!(t <= limit, "{label} took {t:.2?}, limit {limit:?}");
    Ok(())
}

fn formulas() -> Outcome {
    for n in 1..=20 {
        let g = ok(generic_rank(2, n))?;
        ensure!(g == n + 1, "generic_rank(d=2, n={n}) = {g}, want {}", n + 1);
    }
    let g = ok(generic_rank(4, 2))?;
    ensure!(g == 3, "generic_rank(d=4, n=2) = {g}, want 3");
    let e = ok(SecantParams::new(2, 4, 2))?.expected_dim();
    ensure!(e == 11, "expected_dim(n=2, d=4, r=2) = {e}, want 11");
    Ok("d=2 gives n+1 for n <= 20; (d=4, n=2) gives 3".into())
}

fn fermat() -> Outcome {
    let m = p101();
    let forms: Vec<_> = (0..3)
        .map(|i| {
            let mut e = [0u32; 3];
            e[i] = 3;
            HomogeneousPoly::monomial(2, m, &e, 1).unwrap()
        })
        .collect();
    let contact = ok(ContactData::new(&forms))?;
    ensure!(contact.terracini_rank() == 27, "Terracini rank {}", contact.terracini_rank());
    ensure!(contact.m() == 1, "{} hyperplanes", contact.m());
    let h = &contact.hyperplanes()[0];
    let support: Vec<_> = h.terms().filter(|(_, c)| !c.is_zero()).map(|(mono, _)| mono.exponents().to_vec()).collect();
    ensure!(support == [vec![2, 2, 2]], "hyperplane support {support:?}");
    for mode in [HessianMode::RandomCombination, HessianMode::FullStack] {
        let cert = ok(specific_identifiability(&forms, mode, 0))?;
        ensure!(cert.hessian_rank == 7 && cert.target_rank == 7, "{mode:?}: Hessian rank {}", cert.hessian_rank);
        ensure!(cert.verdict == IdentifiabilityVerdict::Certified, "{mode:?}: {:?}", cert.verdict);
    }
    Ok("rank 27, H = x^2 y^2 z^2, Hessian rank 7, Certified".into())
}

fn identifiability_grid() -> Outcome {
    let mut grid = Vec::new();
    grid.extend([4, 6, 8, 10].map(|d| (2, d)));
    grid.extend([4, 6, 8].map(|d| (3, d)));
    grid.extend((3..=8).map(|n| (n, 4)));
    grid.extend((3..=5).map(|n| (n, 6)));
    let mut cases = 0;
    let mut slowest = Duration::ZERO;
    for (n, d) in grid {
        for r in 1.. {
            let params = ok(SecantParams::new(n, d, r))?;
            if !params.is_subgeneric() {
                break;
            }
            timed_case(Duration::from_secs(60), &params.to_string(), &mut slowest, || {
                let cert = ok(generic_identifiability(&params, p101(), 0, 3, HessianMode::RandomCombination))?;
                ensure!(
                    cert.is_certified(),
                    "Inconclusive (Terracini {}/{}, Hessian {}/{})",
                    cert.terracini_rank,
                    cert.expected_dim,
                    cert.hessian_rank,
                    cert.target_rank
                );
                Ok(())
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} cases Certified, slowest {slowest:.2?}"))
}

fn dimension_grid() -> Outcome {
    let mut grid: Vec<(usize, usize, Option<usize>)> = Vec::new();
    grid.extend((4..=12).step_by(2).map(|d| (2, d, None)));
    grid.extend((4..=10).step_by(2).map(|d| (3, d, None)));
    grid.extend((3..=10).map(|n| (n, 4, None)));
    for n in 3..=6 {
        grid.extend([4, 6].map(|d| (n, d, Some(n + 2))));
    }
    let mut cases = 0;
    let mut slowest = Duration::ZERO;
    for (n, d, cap) in grid {
        let rg = ok(generic_rank(d, n))?;
        for r in 1..=cap.map_or(rg, |c| c.min(rg)) {
            let params = ok(SecantParams::new(n, d, r))?;
            timed_case(Duration::from_secs(120), &params.to_string(), &mut slowest, || {
                let rep = ok(secant_dim_sample(&params, p101(), 0, 3))?;
                ensure!(
                    rep.verdict == DimensionVerdict::NonDefectiveCertified,
                    "Inconclusive (observed {}, expected {}, ambient {})",
                    rep.observed_rank,
                    rep.expected_dim,
                    rep.ambient_dim
                );
                Ok(())
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} cases NonDefectiveCertified, slowest {slowest:.2?}"))
}

fn binary_orbits() -> Outcome {
    let m = p101();
    let mut counts = Vec::new();
    for d in [2usize, 4, 6, 8] {
        let want = binomial(d - 1, d / 2);
        let mut passed = false;
        let mut last = String::new();
        for attempt in 0..=3u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 * d as u64 + attempt);
            let factors: Vec<_> =
                (0..d).map(|_| linear_factor(rng.gen_range(0..101), rng.gen_range(0..101), m)).collect();
            let f = factors.iter().skip(1).fold(factors[0].clone(), |acc, l| acc.mul(l).unwrap());
            let orbits = ok(orbit_decompositions(&factors))?;
            ensure!(orbits.len() == want, "d={d}: {} decompositions, want {want}", orbits.len());
            for dec in orbits.decompositions() {
                ensure!(ok(verify_decomposition(&f, dec))?, "d={d}: a decomposition does not expand to f");
            }
            if !orbits.factors_general {
                last = "factors not general".into();
                continue;
            }
            let decs: Vec<&Decomposition> = orbits.decompositions().collect();
            let mut collision = false;
            for i in 0..decs.len() {
                for j in i + 1..decs.len() {
                    collision |= ok(distinct_orbits(decs[i], decs[j]))? == OrbitComparison::PossiblySame;
                }
            }
            if collision {
                last = "Gram invariants collide".into();
                continue;
            }
            passed = true;
            break;
        }
        ensure!(passed, "d={d}: {last} after 3 retries");
        counts.push(want);
    }
    Ok(format!("counts {counts:?}, all pairs CertifiedDistinct"))
}

fn bounds() -> Outcome {
    let lines = [(4, 7, 12), (5, 8, 7), (5, 9, 14), (6, 9, 6), (6, 10, 8), (6, 11, 16)];
    for (n, r, d) in lines {
        for dd in d..=d + 40 {
            ensure!(bdp_bound_check(n, r, dd) == BoundCheck::Holds, "(n={n}, r={r}, d={dd}) should hold");
        }
        ensure!(bdp_bound_check(n, r, d - 2) == BoundCheck::Fails, "(n={n}, r={r}, d={}) should fail", d - 2);
    }
    ensure!(bdp_bound_check(4, 5, 12) == BoundCheck::NotApplicable, "r < n + 2 must be NotApplicable");

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let (n, r, d) = (rng.gen_range(1..=20i64), rng.gen_range(1..=40i64), rng.gen_range(2..=40i64));
        let rhs = Ratio::from_integer(2 * n) - Ratio::new(2, d) * Ratio::from_integer(n + 2);
        let want = Ratio::from_integer(r) <= rhs;
        let got = bop2_bound_check(n as usize, r as usize, d as usize);
        ensure!(got == want, "bop2 (n={n}, r={r}, d={d}): {got}, rational oracle {want}");
    }
    Ok("six BDP lines exact at threshold; BOP2 agrees on 100 random triples".into())
}

fn containment() -> Outcome {
    let m = p101();
    let mut hyperplanes = 0;
    for inst in 0..50u64 {
        let r = 1 + (inst % 3) as usize;
        let params = ok(SecantParams::new(2, 6, r))?;
        let forms = sample_forms(&params, m, 7000 + inst, 0);
        let contact = ok(ContactData::new(&forms))?;
        let mut rng = ChaCha8Rng::seed_from_u64(inst);
        let lambdas: Vec<_> = (0..contact.m()).map(|_| m.elem(rng.gen_range(0..101))).collect();
        let mut hs = contact.hyperplanes().to_vec();
        hs.push(contact.combine_hyperplanes(&lambdas));
        for h in &hs {
            let rank = ok(middle_cat_rank(h))?;
            ensure!(rank <= params.half_dim() - r, "instance {inst}: Cat rank {rank} > N - r");
            for f in &forms {
                ensure!(ok(contract(f, h))?.is_zero(), "instance {inst}: Cat(H) does not annihilate f");
            }
            ensure!(ok(containment_check(&forms, h))?, "instance {inst}: containment_check rejected H");
            hyperplanes += 1;
        }
    }
    Ok(format!("50 instances, {hyperplanes} hyperplanes, zero violations"))
}

fn shuffled_basis(n: usize, deg: usize, rng: &mut ChaCha8Rng) -> GradedBasis {
    let mut monos = GradedBasis::new(n, deg).monomials().to_vec();
    monos.shuffle(rng);
    GradedBasis::from_monomials(n, deg, monos).unwrap()
}

fn invariants() -> Outcome {
    let m = p101();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..200u64 {
        let r = rng.gen_range(2..=5);
        let params = ok(SecantParams::new(4, 4, r))?;
        let forms = sample_forms(&params, m, 8000 + trial, 0);
        let contact = ok(ContactData::new(&forms))?;
        let lambdas: Vec<_> = (0..contact.m()).map(|_| m.elem(rng.gen_range(0..101))).collect();
        let h = contact.combine_hyperplanes(&lambdas);

        ensure!(contact.monomial_hessian(&h).is_symmetric(), "trial {trial}: monomial Hessian not symmetric");
        ensure!(contact.complement_hessian(&h).is_symmetric(), "trial {trial}: complement Hessian not symmetric");

        let mut full = contact.forms().to_vec();
        full.extend_from_slice(contact.complement());
        let hess = contact.hessian_in(&h, &full);
        for i in 0..r {
            ensure!(hess.row(i).iter().all(|c| c.is_zero()), "trial {trial}: row of f_{i} does not vanish");
        }

        let half = shuffled_basis(4, 2, &mut rng);
        let target = shuffled_basis(4, 4, &mut rng);
        let mut order: Vec<_> = forms.clone();
        order.shuffle(&mut rng);
        let shuffled = ok(terracini_matrix_in(&order, &half, &target))?.rank();
        let plain = ok(terracini_matrix(&forms))?.rank();
        ensure!(shuffled == plain, "trial {trial}: rank {shuffled} in shuffled bases, {plain} in graded-lex");

        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=3);
        let basis = GradedBasis::shared(n, k);
        let dec =
            ok(Decomposition::new((0..r).map(|_| HomogeneousPoly::random(basis.clone(), m, &mut rng)).collect()))?;
        let q = ok(random_orthogonal(r, m, 9000 + trial))?;
        ensure!(ok(q.mul(&q.transpose()))? == FMatrix::identity(r, m), "trial {trial}: Q Q^T != I");
        let moved = ok(dec.transform(&q))?;
        ensure!(gram_invariant(&moved) == gram_invariant(&dec), "trial {trial}: Gram invariant moved under O({r})");
        ensure!(ok(verify_decomposition(&dec.expand(), &moved))?, "trial {trial}: O({r}) changed Σ f_i^2");
    }
    Ok("Hessian symmetry, vanishing f-rows, order invariance, Gram and O(r) identities: 200 trials each".into())
}

fn quadrics() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for n in 1..=8 {
        for r in 1..=n + 1 {
            let params = ok(SecantParams::new(n, 2, r))?;
            let rep = ok(secant_dim_sample(&params, p101(), 0, 3))?;
            let formula = r * (n + 1) - binomial(r, 2);
            let classical = binomial(n + 2, 2) - binomial(n + 2 - r, 2);
            ensure!(formula == classical, "n={n} r={r}: {formula} vs classical {classical}");
            ensure!(rep.observed_rank == formula, "n={n} r={r}: sampled rank {} != {formula}", rep.observed_rank);
            cases += 1;
        }
    }
    let t = start.elapsed();
    ensure!(t <= Duration::from_secs(5), "took {t:.2?}");
    Ok(format!("{cases} cases, {t:.2?}"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("formulas", formulas, Some(Duration::from_secs(1))),
        ("fermat", fermat, Some(Duration::from_secs(1))),
        ("identifiability grid", identifiability_grid, None),
        ("dimension grid", dimension_grid, None),
        ("binary orbit counts", binary_orbits, None),
        ("bound checks", bounds, Some(Duration::from_secs(1))),
        ("containment", containment, None),
        ("invariants", invariants, None),
        ("quadrics", quadrics, Some(Duration::from_secs(5))),
    ];
    let mut failures = 0;
    for (i, (name, run, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let t = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, limit) {
            if t > limit {
                outcome = Err(format!("took {t:.2?}, limit {limit:?}"));
            }
        }
        match outcome {
            Ok(msg) => println!("PASS {} {name}: {msg} [{t:.2?}]", i + 1),
            Err(msg) => {
                failures += 1;
                println!("FAIL {} {name}: {msg} [{t:.2?}]", i + 1);
            }
        }
    }
    println!("{} of 9 criteria passed", 9 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
