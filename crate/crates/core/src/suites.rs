//! Exhaustive and seeded-random property suites at desk scale.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::discrepancy::{
    hybrid_bound_certificate, prefix_reduction_bound, star_discrepancy_exact, PointSetD,
};
use crate::error::{Error, Result};
use crate::gfpoly::{gcd, irreducibles, monic_of_degree, nonzero_below, PrimeModulus, Poly};
use crate::plattice::{
    sublattice_affine, sublattice_enumerate, sublattice_indices, LatticeConfig, SubLatticeSpec,
};
use crate::search::{average_merit_check, count_k1_k2, hybrid_point_set, CountMode};
use crate::seqgen::{box_to_residue_classes, halton_point, residue_classes_measure, HaltonConfig, ResidueClass, SigmaBijection};
use crate::walsh::{
    character_sum, count_low_valuation, dual_test_matrix, dual_test_valuation, lemma2_bound_dyadic, rho_sum,
    rho_sum_dyadic, walsh_indices, CharacterMagnitude, RhoSumMode, WalshIndex,
};
use crate::Rational;

pub const SUITES: [&str; 9] = [
    "lemma1",
    "lemma2",
    "lemma3",
    "lemma4",
    "lemma6",
    "dichotomy",
    "averaging",
    "counting",
    "certificate",
];

/// Seed for the randomized suites.
pub const SUITE_SEED: u64 = 0x5eed_2024;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: String,
    pub params: String,
    pub checked: u64,
    pub failures: u64,
    pub first_counterexample: Option<String>,
}

impl SuiteReport {
    fn new(name: &str, params: &str) -> Self {
        SuiteReport { name: name.into(), params: params.into(), checked: 0, failures: 0, first_counterexample: None }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checked > 0
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.first_counterexample.is_none() {
                self.first_counterexample = Some(describe());
            }
        }
    }

    fn merge(&mut self, other: SuiteReport) {
        self.checked += other.checked;
        self.failures += other.failures;
        if self.first_counterexample.is_none() {
            self.first_counterexample = other.first_counterexample;
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "pass ({}) checked={}", self.params, self.checked)
        } else {
            write!(f, "FAIL ({}) checked={} failures={}", self.params, self.checked, self.failures)?;
            if let Some(c) = &self.first_counterexample {
                write!(f, " first counterexample: {c}")?;
            }
            Ok(())
        }
    }
}

pub fn run_suite(name: &str) -> Result<SuiteReport> {
    match name {
        "lemma1" => lemma1(),
        "lemma2" => lemma2(4, 2),
        "lemma3" => lemma3(),
        "lemma4" => lemma4(6),
        "lemma6" => lemma6(),
        "dichotomy" => dichotomy(200, SUITE_SEED),
        "averaging" => averaging(4, 2),
        "counting" => counting(3),
        "certificate" => certificate(4),
        other => Err(Error::InvalidArgument(format!(
            "unknown suite {other:?}; expected one of {}",
            SUITES.join(", ")
        ))),
    }
}

fn field(p: u64) -> PrimeModulus {
    PrimeModulus::new(p).expect("small prime")
}

/// Box membership of Halton points against the residue-class decomposition,
/// plus disjointness and the measure identity.
pub fn lemma1() -> Result<SuiteReport> {
    let p = field(2);
    let mut report = SuiteReport::new("lemma1", "p=2, bases (X, X+1) and (X, X^2+X+1) with a permuted digit map, l_i≤2, n<256");
    let x = Poly::x(p);
    let x1 = Poly::parse("X+1", p)?;
    let x2 = Poly::parse("X^2+X+1", p)?;
    let configs = vec![
        HaltonConfig::new(p, vec![x.clone(), x1])?,
        HaltonConfig::with_sigmas(
            p,
            vec![x.clone(), x2],
            vec![SigmaBijection::identity(p, 1)?, SigmaBijection::new(p, 2, vec![0, 3, 1, 2])?],
        )?,
    ];
    for cfg in &configs {
        let degrees = cfg.degrees();
        let points = (0..256u64).map(|n| halton_point(n, cfg)).collect::<Result<Vec<_>>>()?;
        for l1 in 0..=2u32 {
            for l2 in 0..=2u32 {
                let full1 = 1u64 << (degrees[0] * l1);
                let full2 = 1u64 << (degrees[1] * l2);
                for v1 in 1..=full1 {
                    for v2 in 1..=full2 {
                        let classes = box_to_residue_classes(cfg, &[l1, l2], &[v1, v2])?;
                        let corner = [Rational::new(v1 as i128, full1 as i128), Rational::new(v2 as i128, full2 as i128)];
                        let expected_measure = corner[0] * corner[1];
                        report.record(residue_classes_measure(&classes) == expected_measure, || {
                            format!("measure mismatch for levels ({l1},{l2}) numerators ({v1},{v2})")
                        });
                        for (n, pt) in points.iter().enumerate() {
                            let inside = pt.iter().zip(&corner).all(|(c, v)| c.to_rational() < *v);
                            let hits = classes.iter().filter(|c| c.contains_index(n as u64)).count();
                            report.record(hits <= 1 && inside == (hits == 1), || {
                                format!("n={n}, levels ({l1},{l2}), numerators ({v1},{v2}): inside={inside}, classes hit={hits}")
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

fn lemma2_moduli(p: PrimeModulus) -> Result<Vec<Poly>> {
    ["1", "X", "X+1", "X^2+1"].iter().map(|s| Poly::parse(s, p)).collect()
}

fn all_tuples(p: PrimeModulus, m: u32, t: usize) -> Vec<Vec<Poly>> {
    let single: Vec<Poly> = nonzero_below(p, m).collect();
    let mut out = vec![vec![]];
    for _ in 0..t {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Poly>| {
                single.iter().map(move |q| {
                    let mut v = prefix.clone();
                    v.push(q.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// Exact `L·D*_L` of every sub-lattice against the Walsh bound, over all
/// irreducible `p(X)` of degree `m ≤ max_m`, `q ∈ (G*)^t`, and block/class pairs.
pub fn lemma2(max_m: u32, max_t: usize) -> Result<SuiteReport> {
    let p = field(2);
    let params = format!("p=2, m≤{max_m}, t≤{max_t}, B∈{{1, X, X+1, (X+1)^2}}");
    let mut jobs = Vec::new();
    for m in 1..=max_m {
        for px in irreducibles(p, m as usize) {
            for t in 1..=max_t {
                for q in all_tuples(p, m, t) {
                    jobs.push((px.clone(), q));
                }
            }
        }
    }
    let moduli = lemma2_moduli(p)?;
    let parts = jobs
        .into_par_iter()
        .map(|(px, q)| -> Result<SuiteReport> {
            let mut report = SuiteReport::new("lemma2", "");
            let cfg = LatticeConfig::new(px.clone(), q.clone())?;
            let m = cfg.m();
            for b in &moduli {
                let deg_b = b.degree().unwrap_or(0) as u32;
                if deg_b > m || !gcd(b, &px)?.is_one() {
                    continue;
                }
                for u in deg_b..=m {
                    let d = u - deg_b;
                    let bound = lemma2_bound_dyadic(b, d, &cfg)?;
                    let block = 1u64 << u;
                    for residue in nonzero_below(p, deg_b).chain(std::iter::once(Poly::zero(p))) {
                        let class = ResidueClass::new(b.clone(), residue)?;
                        for start in (0..cfg.size()).step_by(block as usize) {
                            let spec = SubLatticeSpec::new(u, start, class.clone())?;
                            let pts = sublattice_enumerate(&spec, &cfg)?;
                            let len = pts.len() as i128;
                            let set = PointSetD::new(cfg.dim(), p, pts)?;
                            let exact = star_discrepancy_exact(&set)? * Rational::from_integer(len);
                            report.record(exact <= bound, || {
                                format!("p(X)={px}, q={q:?}, B={b}, class={class}, u={u}, block={start}: L*D*={exact} > bound {bound}")
                            });
                        }
                    }
                }
            }
            Ok(report)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = SuiteReport::new("lemma2", &params);
    for part in parts {
        report.merge(part);
    }
    Ok(report)
}

/// Closed form of `Σ ρ_wal` against direct summation.
pub fn lemma3() -> Result<SuiteReport> {
    lemma3_for(&[2, 3, 5])
}

pub fn lemma3_for(primes: &[u64]) -> Result<SuiteReport> {
    let list = primes.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
    let mut report = SuiteReport::new("lemma3", &format!("p∈{{{list}}}, m≤3, t≤3"));
    for &pv in primes {
        let p = field(pv);
        for m in 1..=3u32 {
            for t in 1..=3usize {
                if pv == 2 {
                    let closed = rho_sum_dyadic(m, t, RhoSumMode::Closed)?;
                    let direct = rho_sum_dyadic(m, t, RhoSumMode::Direct)?;
                    report.record(closed == direct, || format!("p=2, m={m}, t={t}: {closed} != {direct}"));
                } else {
                    let closed = rho_sum(p, m, t, RhoSumMode::Closed)?;
                    let direct = rho_sum(p, m, t, RhoSumMode::Direct)?;
                    report.record((closed - direct).abs() <= 1e-9 * closed.abs().max(1.0), || {
                        format!("p={pv}, m={m}, t={t}: closed {closed} vs direct {direct}")
                    });
                }
            }
        }
    }
    Ok(report)
}

/// `#{a ∈ G* : ν(a/p(X)) < −u} = p^{m−u} − 1` for every irreducible `p(X)`.
pub fn lemma4(max_m: u32) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("lemma4", &format!("p∈{{2,3}}, 0≤u≤m≤{max_m}"));
    for pv in [2u64, 3] {
        let p = field(pv);
        for m in 1..=max_m {
            for px in irreducibles(p, m as usize) {
                for u in 0..=m {
                    let count = count_low_valuation(&px, u)?;
                    let expected = p.pow_checked(m - u, "p^(m-u)")? - 1;
                    report.record(count == expected, || format!("p(X)={px}, u={u}: {count} != {expected}"));
                }
            }
        }
    }
    Ok(report)
}

/// Sub-lattice enumeration against the affine digit description.
pub fn lemma6() -> Result<SuiteReport> {
    let mut report = SuiteReport::new("lemma6", "p=2 m≤4 t≤2; p=3 m≤2 t≤2");
    for (pv, max_m) in [(2u64, 4u32), (3, 2)] {
        let p = field(pv);
        for m in 1..=max_m {
            let Some(px) = irreducibles(p, m as usize).next() else { continue };
            for t in 1..=2usize {
                for q in all_tuples(p, m, t) {
                    let cfg = LatticeConfig::new(px.clone(), q.clone())?;
                    for u in 0..=m {
                        for deg_b in 0..=u.min(2) {
                            for b in monic_of_degree(p, deg_b as usize) {
                                if !gcd(&b, &px)?.is_one() {
                                    continue;
                                }
                                let block = p.pow_checked(u, "block")?;
                                let residue = Poly::from_int(cfg.size() % p.pow_checked(deg_b, "res")?.max(1), p).rem(&b)?;
                                let class = ResidueClass::new(b.clone(), residue)?;
                                for start in (0..cfg.size()).step_by(block as usize) {
                                    let spec = SubLatticeSpec::new(u, start, class.clone())?;
                                    let indices = sublattice_indices(&spec, &cfg)?;
                                    let mut direct = sublattice_enumerate(&spec, &cfg)?;
                                    let mut affine = sublattice_affine(&spec, &cfg)?.points()?;
                                    direct.sort();
                                    affine.sort();
                                    let in_range = indices
                                        .iter()
                                        .all(|&n| n >= start && n < start + block && class.contains_index(n));
                                    let size_ok = indices.len() as u64 == p.pow_checked(spec.d(), "p^d")?;
                                    report.record(direct == affine && in_range && size_ok, || {
                                        format!("p(X)={px}, q={q:?}, B={b}, u={u}, block={start}")
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

fn random_poly_below(p: PrimeModulus, m: u32, rng: &mut ChaCha8Rng) -> Poly {
    let coeffs: Vec<u64> = (0..m).map(|_| rng.gen_range(0..u64::from(p.get()))).collect();
    Poly::from_coeffs_reduced(p, &coeffs)
}

/// One random draw of `(p(X), q, spec, k)` for the dichotomy check.
pub fn random_dichotomy_case(rng: &mut ChaCha8Rng) -> Result<(LatticeConfig, SubLatticeSpec, WalshIndex)> {
    let p = field(*[2u64, 3].choose(rng).expect("nonempty"));
    let max_m = if p.get() == 2 { 5 } else { 3 };
    let m = rng.gen_range(1..=max_m);
    let t = rng.gen_range(1..=2usize);
    let irr: Vec<Poly> = irreducibles(p, m as usize).collect();
    let px = irr.choose(rng).expect("irreducibles exist").clone();
    let q = (0..t)
        .map(|_| loop {
            let c = random_poly_below(p, m, rng);
            if !c.is_zero() {
                break c;
            }
        })
        .collect();
    let cfg = LatticeConfig::new(px.clone(), q)?;
    let u = rng.gen_range(0..=m);
    let b = loop {
        let deg = rng.gen_range(0..=u);
        let b = &Poly::monomial(p, deg as usize, 1) + &random_poly_below(p, deg, rng);
        if gcd(&b, &px)?.is_one() {
            break b;
        }
    };
    let residue = random_poly_below(p, b.degree().unwrap_or(0) as u32, rng);
    let blocks = cfg.size() / p.pow_checked(u, "block")?;
    let start = rng.gen_range(0..blocks) * p.pow_checked(u, "block")?;
    let spec = SubLatticeSpec::new(u, start, ResidueClass::new(b, residue)?)?;
    let k = loop {
        let comps: Vec<u64> = (0..t).map(|_| rng.gen_range(0..cfg.size())).collect();
        if comps.iter().any(|&c| c != 0) {
            break WalshIndex::new(comps, p, m)?;
        }
    };
    Ok((cfg, spec, k))
}

/// Character sums are `0` or of modulus `p^d`, and the full case matches both
/// dual tests.
pub fn dichotomy(cases: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("dichotomy", &format!("{cases} random cases, p∈{{2,3}}, m≤5, t≤2, seed={seed}"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let (cfg, spec, k) = random_dichotomy_case(&mut rng)?;
        let full_size = cfg.modulus().pow_checked(spec.d(), "p^d")?;
        let magnitude = character_sum(&spec, &cfg, &k)?.magnitude();
        let full = match magnitude {
            CharacterMagnitude::Full(n) => n == full_size,
            CharacterMagnitude::Zero => false,
            CharacterMagnitude::Other => {
                report.record(false, || format!("sum neither 0 nor p^d: p(X)={}, k={:?}", cfg.px(), k.components()));
                continue;
            }
        };
        let matrix = dual_test_matrix(&spec, &cfg, &k)?;
        let val = dual_test_valuation(&spec, &cfg, &k)?;
        report.record(full == matrix && matrix == val, || {
            format!(
                "p(X)={}, q={:?}, class={}, u={}, block={}, k={:?}: full={full}, matrix={matrix}, valuation={val}",
                cfg.px(),
                cfg.generators(),
                spec.class(),
                spec.u(),
                spec.block_start(),
                k.components()
            )
        });
    }
    Ok(report)
}

/// Empirical mean of the Walsh bound against the averaging bound.
pub fn averaging(max_m: u32, max_t: usize) -> Result<SuiteReport> {
    let p = field(2);
    let mut report = SuiteReport::new("averaging", &format!("p=2, m≤{max_m}, t≤{max_t}, B∈{{1, X+1, (X+1)^2}}, u=m"));
    let moduli: Vec<Poly> = ["1", "X+1", "X^2+1"].iter().map(|s| Poly::parse(s, p)).collect::<Result<_>>()?;
    for m in 1..=max_m {
        for px in irreducibles(p, m as usize) {
            for b in &moduli {
                if b.degree().unwrap_or(0) as u32 > m || !gcd(b, &px)?.is_one() {
                    continue;
                }
                for t in 1..=max_t {
                    let r = average_merit_check(b, m, &px, t)?;
                    report.record(r.holds, || {
                        format!("p(X)={px}, B={b}, t={t}: {} > {}", r.empirical, r.theoretical)
                    });
                }
            }
        }
    }
    Ok(report)
}

/// `K1`/`K2` bounds for every nonzero Walsh index, modulus and `d`.
pub fn counting(max_m: u32) -> Result<SuiteReport> {
    let p = field(2);
    let mut report = SuiteReport::new("counting", &format!("p=2, m≤{max_m}, general t≤2, Korobov t≤3"));
    for m in 1..=max_m {
        for px in irreducibles(p, m as usize) {
            let moduli: Vec<Poly> = (0..=m as usize)
                .flat_map(|deg| monic_of_degree(p, deg))
                .filter(|b| gcd(b, &px).map(|g| g.is_one()).unwrap_or(false))
                .collect();
            for (mode, max_t) in [(CountMode::General, 2usize), (CountMode::Korobov, 3)] {
                for t in 1..=max_t {
                    for k in walsh_indices(p, m, t)?.filter(|k| !k.is_zero()) {
                        for b in &moduli {
                            let deg_b = b.degree().unwrap_or(0) as u32;
                            for d in 0..=(m - deg_b) {
                                let r = count_k1_k2(&k, b, &px, t, d, mode)?;
                                report.record(r.holds && r.dual_count == r.k1 + r.k2, || {
                                    format!(
                                        "{mode:?}, p(X)={px}, t={t}, k={:?}, B={b}, d={d}: K1={}, K2={}",
                                        k.components(),
                                        r.k1,
                                        r.k2
                                    )
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Halton configuration with a single degree-one base coprime to `p(X)`.
pub fn coprime_linear_base(px: &Poly) -> Result<HaltonConfig> {
    let p = px.modulus();
    let x = Poly::x(p);
    let base = if gcd(&x, px)?.is_one() { x } else { Poly::parse("X+1", p)? };
    HaltonConfig::new(p, vec![base])
}

/// Certificate totals against exact prefix discrepancies of `(x_n, y_n)`
/// and of the anchored set.
pub fn certificate(max_m: u32) -> Result<SuiteReport> {
    let p = field(2);
    let mut jobs = Vec::new();
    for m in 1..=max_m {
        for px in irreducibles(p, m as usize) {
            for s in 0..=1usize {
                for q in nonzero_below(p, m) {
                    jobs.push((px.clone(), s, q));
                }
            }
        }
    }
    let parts = jobs
        .into_par_iter()
        .map(|(px, s, q)| -> Result<SuiteReport> {
            let mut report = SuiteReport::new("certificate", "");
            let halton = if s == 0 { HaltonConfig::new(p, vec![])? } else { coprime_linear_base(&px)? };
            let lattice = LatticeConfig::new(px.clone(), vec![q.clone()])?;
            let cert = hybrid_bound_certificate(lattice.m(), &halton, &lattice)?;
            let total = cert.total;
            let full = hybrid_point_set(&halton, &lattice)?;
            let inner = full.drop_leading(1);
            for n in 1..=inner.len() {
                let nd = star_discrepancy_exact(&inner.prefix(n))? * Rational::from_integer(n as i128);
                report.record(rational_le_f64(&nd, total), || {
                    format!("p(X)={px}, s={s}, q={q}: prefix {n} has Ñ·D*={nd} > {total}")
                });
            }
            let n = full.len() as i128;
            let nd = star_discrepancy_exact(&full)? * Rational::from_integer(n);
            report.record(rational_le_f64(&nd, total), || {
                format!("p(X)={px}, s={s}, q={q}: anchored N·D*={nd} > {total}")
            });
            let reduction = prefix_reduction_bound(&full)?;
            report.record(reduction >= nd, || {
                format!("p(X)={px}, s={s}, q={q}: prefix reduction {reduction} < N·D* {nd}")
            });
            Ok(report)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = SuiteReport::new("certificate", &format!("p=2, m≤{max_m}, s∈{{0,1}}, t=1, all q"));
    for part in parts {
        report.merge(part);
    }
    Ok(report)
}

/// `r ≤ x`, decided exactly against `x` rounded down to a multiple of
/// `2^-40`; never claims `r ≤ x` when it is false.
pub fn rational_le_f64(r: &Rational, x: f64) -> bool {
    const SCALE: f64 = (1u64 << 40) as f64;
    if !x.is_finite() {
        return x > 0.0;
    }
    let floor = Rational::new((x * SCALE).floor() as i128, 1i128 << 40);
    *r <= floor
}
