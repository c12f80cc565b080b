//! Exhaustive generator search ranked by certificate merit, plus the
//! averaging and counting checks behind the existence results.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::discrepancy::{
    hybrid_bound_certificate, star_discrepancy_exact_with_budget, Certificate, LevelRecord, PointSetD,
    DEFAULT_ORACLE_BUDGET,
};
use crate::error::{Error, Result};
use crate::gfpoly::{gcd, nonzero_below, valuation, Poly};
use crate::plattice::{korobov_qvec, plattice_point_laurent, LatticeConfig};
use crate::seqgen::{BasePRational, HaltonConfig};
use crate::walsh::{lemma2_bound_for, WalshIndex};

/// Default cap on the number of candidates a search may certify.
pub const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000;

/// A generator tuple, optionally produced from a Korobov generator `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidate {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<Poly>,
    pub q: Vec<Poly>,
}

impl Candidate {
    /// Integer encoding used for tie-breaking: `g` for Korobov candidates,
    /// otherwise the components of `q`.
    pub fn encoding(&self) -> Vec<u64> {
        let enc = |p: &Poly| p.to_int().unwrap_or(u64::MAX);
        match &self.g {
            Some(g) => vec![enc(g)],
            None => self.q.iter().map(enc).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeritReport {
    pub candidate: Candidate,
    pub merit: f64,
    pub certificate: Certificate,
    pub rank: usize,
}

fn space_size(px: &Poly, t: usize) -> Result<u64> {
    let m = px.degree().ok_or(Error::ConstantPolynomial)? as u32;
    let per = px.modulus().pow_checked(m, "candidate space")? - 1;
    per.checked_pow(t as u32).ok_or(Error::Overflow("candidate space"))
}

/// All of `(G*_{p,m})^t` in ascending lexicographic encoding.
fn tuples(px: &Poly, t: usize) -> Result<Vec<Vec<Poly>>> {
    let m = px.degree().ok_or(Error::ConstantPolynomial)? as u32;
    let single: Vec<Poly> = nonzero_below(px.modulus(), m).collect();
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
    Ok(out)
}

fn check_budget(size: u64, budget: u64, hint: &'static str) -> Result<()> {
    if size > budget {
        return Err(Error::BudgetExceeded {
            what: "candidate space",
            needed: u128::from(size),
            budget: u128::from(budget),
            hint,
        });
    }
    Ok(())
}

fn certify_all(m: u32, halton: &HaltonConfig, px: &Poly, candidates: Vec<Candidate>) -> Result<Vec<MeritReport>> {
    let mut reports = candidates
        .into_par_iter()
        .map(|candidate| {
            let lattice = LatticeConfig::new(px.clone(), candidate.q.clone())?;
            let certificate = hybrid_bound_certificate(m, halton, &lattice)?;
            Ok(MeritReport { candidate, merit: certificate.total, certificate, rank: 0 })
        })
        .collect::<Result<Vec<_>>>()?;
    reports.sort_by(compare_reports);
    for (i, r) in reports.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    Ok(reports)
}

fn check_px(m: u32, halton: &HaltonConfig, px: &Poly) -> Result<()> {
    if px.degree() != Some(m as usize) {
        return Err(Error::Config(format!("p(X) = {px} does not have degree m = {m}")));
    }
    for b in halton.bases() {
        if !gcd(b, px)?.is_one() {
            return Err(Error::NotCoprime(format!("base {b} and {px}")));
        }
    }
    Ok(())
}

pub fn search_exhaustive(m: u32, t: usize, halton: &HaltonConfig, px: &Poly) -> Result<Vec<MeritReport>> {
    search_exhaustive_with_budget(m, t, halton, px, DEFAULT_SEARCH_BUDGET)
}

/// Certifies every `q ∈ (G*_{p,m})^t` and sorts by `(merit, encoding)`.
pub fn search_exhaustive_with_budget(
    m: u32,
    t: usize,
    halton: &HaltonConfig,
    px: &Poly,
    budget: u64,
) -> Result<Vec<MeritReport>> {
    check_px(m, halton, px)?;
    if t == 0 {
        return Err(Error::InvalidArgument("t must be at least 1".into()));
    }
    check_budget(space_size(px, t)?, budget, "try the Korobov search")?;
    let candidates = tuples(px, t)?.into_iter().map(|q| Candidate { g: None, q }).collect();
    certify_all(m, halton, px, candidates)
}

pub fn search_korobov(m: u32, t: usize, halton: &HaltonConfig, px: &Poly) -> Result<Vec<MeritReport>> {
    search_korobov_with_budget(m, t, halton, px, DEFAULT_SEARCH_BUDGET)
}

/// Certifies `(g, g², ..., g^t) mod p(X)` for every `g ∈ G*_{p,m}`.
pub fn search_korobov_with_budget(
    m: u32,
    t: usize,
    halton: &HaltonConfig,
    px: &Poly,
    budget: u64,
) -> Result<Vec<MeritReport>> {
    check_px(m, halton, px)?;
    if t == 0 {
        return Err(Error::InvalidArgument("t must be at least 1".into()));
    }
    check_budget(space_size(px, 1)?, budget, "lower m")?;
    let candidates = nonzero_below(px.modulus(), m)
        .map(|g| Ok(Candidate { q: korobov_qvec(&g, t, px)?, g: Some(g) }))
        .collect::<Result<Vec<_>>>()?;
    certify_all(m, halton, px, candidates)
}

pub fn mean_merit(reports: &[MeritReport]) -> f64 {
    reports.iter().map(|r| r.merit).sum::<f64>() / reports.len() as f64
}

/// `best ≤ mean`, allowing for rounding in the mean.
pub fn best_within_average(reports: &[MeritReport]) -> bool {
    match reports.first() {
        None => false,
        Some(best) => {
            let avg = mean_merit(reports);
            best.merit <= avg + avg.abs() * reports.len() as f64 * f64::EPSILON
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub rank: usize,
    pub candidate: Candidate,
    pub merit: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BestEntry {
    pub candidate: Candidate,
    pub merit: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReport {
    pub mode: String,
    pub p: u32,
    pub m: u32,
    pub t: usize,
    pub s: usize,
    pub bases: Vec<Poly>,
    #[serde(rename = "pX")]
    pub px: Poly,
    #[serde(rename = "candidateCount")]
    pub candidate_count: usize,
    pub best: BestEntry,
    pub average: f64,
    #[serde(rename = "bestWithinAverage")]
    pub best_within_average: bool,
    pub table: Vec<TableRow>,
    #[serde(rename = "perLevel")]
    pub per_level: Vec<LevelRecord>,
}

impl SearchReport {
    pub fn new(mode: &str, t: usize, halton: &HaltonConfig, px: &Poly, reports: &[MeritReport]) -> Result<Self> {
        let best = reports
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty candidate space".into()))?;
        Ok(SearchReport {
            mode: mode.to_string(),
            p: px.modulus().get(),
            m: px.degree().unwrap_or(0) as u32,
            t,
            s: halton.dim(),
            bases: halton.bases().to_vec(),
            px: px.clone(),
            candidate_count: reports.len(),
            best: BestEntry { candidate: best.candidate.clone(), merit: best.merit },
            average: mean_merit(reports),
            best_within_average: best_within_average(reports),
            table: reports
                .iter()
                .take(10)
                .map(|r| TableRow { rank: r.rank, candidate: r.candidate.clone(), merit: r.merit })
                .collect(),
            per_level: best.certificate.per_level.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    General,
    Korobov,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub mode: CountMode,
    pub k1: u64,
    pub k2: u64,
    /// Candidates passing the dual test; always `k1 + k2`.
    #[serde(rename = "dualCount")]
    pub dual_count: u64,
    #[serde(rename = "k1Bound")]
    pub k1_bound: u64,
    /// Bound on `K1 + K2` (general) or on `K2` (Korobov).
    #[serde(rename = "secondBound")]
    pub second_bound: u64,
    /// `(p^m − 1)^{t−1}` in general mode, the nominal value of `K1`.
    #[serde(rename = "k1Nominal")]
    pub k1_nominal: Option<u64>,
    pub holds: bool,
}

/// Counts generator candidates for which `k` is a dual index of the class
/// modulus `B` at sub-lattice size `p^d`: `K1` with `Σ k_i q_i ≡ 0`, `K2` the
/// remaining ones with `ν({k·q·B / p(X)}) < −d`.
pub fn count_k1_k2(k: &WalshIndex, b: &Poly, px: &Poly, t: usize, d: u32, mode: CountMode) -> Result<CountReport> {
    if k.is_zero() {
        return Err(Error::InvalidArgument("k = 0 is not in the dual index set".into()));
    }
    if k.components().len() != t {
        return Err(Error::DimensionMismatch { expected: t, got: k.components().len() });
    }
    let p = px.modulus();
    let m = px.degree().ok_or(Error::ConstantPolynomial)? as u32;
    if !gcd(b, px)?.is_one() {
        return Err(Error::NotCoprime(format!("{b} and {px}")));
    }
    let deg_b = b.degree().ok_or(Error::ZeroDivisor)? as u32;
    if deg_b + d > m {
        return Err(Error::Config(format!("deg B + d = {} exceeds m = {m}", deg_b + d)));
    }
    let ks = k.polys(p);
    let classify = |q: &[Poly]| -> Result<(bool, bool)> {
        let mut sum = Poly::zero(p);
        for (ki, qi) in ks.iter().zip(q) {
            sum = &sum + &ki.mul_mod(qi, px)?;
        }
        let sum = sum.rem(px)?;
        let w = sum.mul_mod(b, px)?;
        Ok((sum.is_zero(), valuation(&w, px)?.below(-i64::from(d))))
    };
    let candidates: Vec<Vec<Poly>> = match mode {
        CountMode::General => {
            check_budget(space_size(px, t)?, DEFAULT_SEARCH_BUDGET, "lower m or t")?;
            tuples(px, t)?
        }
        CountMode::Korobov => nonzero_below(p, m)
            .map(|g| korobov_qvec(&g, t, px))
            .collect::<Result<_>>()?,
    };
    let (mut k1, mut k2) = (0u64, 0u64);
    for q in &candidates {
        match classify(q)? {
            (true, _) => k1 += 1,
            (false, true) => k2 += 1,
            _ => {}
        }
    }
    let pm1 = p.pow_checked(m, "p^m")? - 1;
    let pmd = p.pow_checked(m - d, "p^(m-d)")?;
    let (k1_bound, second_bound, k1_nominal, holds) = match mode {
        CountMode::General => {
            let base = pm1.pow(t as u32 - 1);
            let second = base * pmd;
            (base, second, Some(base), k1 <= base && k1 + k2 <= second)
        }
        CountMode::Korobov => {
            let second = t as u64 * (pmd - 1);
            (t as u64, second, None, k1 <= t as u64 && k2 <= second)
        }
    };
    Ok(CountReport { mode, k1, k2, dual_count: k1 + k2, k1_bound, second_bound, k1_nominal, holds })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AverageReport {
    pub count: u64,
    pub empirical: f64,
    pub theoretical: f64,
    pub holds: bool,
}

/// `t + p^m/(p^m−1) · (1 + m(p²−1)/(3p))^t`.
pub fn averaging_bound(p: u32, m: u32, t: usize) -> f64 {
    let pf = f64::from(p);
    let pm = pf.powi(m as i32);
    t as f64 + pm / (pm - 1.0) * (1.0 + f64::from(m) * (pf * pf - 1.0) / (3.0 * pf)).powi(t as i32)
}

/// Mean of the Walsh bound for `(B, d = u − deg B)` over all `q ∈ (G*_{p,m})^t`.
pub fn average_merit_check(b: &Poly, u: u32, px: &Poly, t: usize) -> Result<AverageReport> {
    let m = px.degree().ok_or(Error::ConstantPolynomial)? as u32;
    let deg_b = b.degree().ok_or(Error::ZeroDivisor)? as u32;
    if deg_b > u || u > m {
        return Err(Error::Config(format!("need deg B <= u <= m, got deg B = {deg_b}, u = {u}, m = {m}")));
    }
    if !gcd(b, px)?.is_one() {
        return Err(Error::NotCoprime(format!("{b} and {px}")));
    }
    check_budget(space_size(px, t)?, DEFAULT_SEARCH_BUDGET, "lower m or t")?;
    let bounds = tuples(px, t)?
        .into_par_iter()
        .map(|q| lemma2_bound_for(b, u - deg_b, &LatticeConfig::new(px.clone(), q)?))
        .collect::<Result<Vec<f64>>>()?;
    let count = bounds.len() as u64;
    let empirical = bounds.iter().sum::<f64>() / count as f64;
    let theoretical = averaging_bound(px.modulus().get(), m, t);
    Ok(AverageReport { count, empirical, theoretical, holds: empirical <= theoretical + 1e-9 })
}

/// Anchored set `(n/p^m, y_n)` over the lattice, optionally prefixed by
/// Halton coordinates.
pub fn hybrid_point_set(halton: &HaltonConfig, lattice: &LatticeConfig) -> Result<PointSetD> {
    let p = lattice.modulus();
    let m = lattice.m();
    let points = (0..lattice.size())
        .map(|n| crate::seqgen::hybrid_point(n, m, halton, lattice))
        .collect::<Result<Vec<_>>>()?;
    PointSetD::new(1 + halton.dim() + lattice.dim(), p, points)
}

/// `max_Ñ Ñ·D*_Ñ` over all prefixes of `points`.
pub fn max_prefix_discrepancy(points: &PointSetD, budget: u64) -> Result<crate::Rational> {
    let values = crate::discrepancy::prefix_discrepancies(points, budget)?;
    values
        .into_iter()
        .max()
        .ok_or_else(|| Error::InvalidArgument("empty point set".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NegativeControlReport {
    pub g: Poly,
    #[serde(rename = "controlTuple")]
    pub control_tuple: Vec<Poly>,
    #[serde(rename = "controlMerit")]
    pub control_merit: f64,
    #[serde(rename = "controlPrefixMax")]
    pub control_prefix_max: String,
    #[serde(rename = "korobovTuple")]
    pub korobov_tuple: Vec<Poly>,
    #[serde(rename = "korobovMerit")]
    pub korobov_merit: f64,
    #[serde(rename = "korobovPrefixMax")]
    pub korobov_prefix_max: String,
    /// Control prefix maximum over the Korobov prefix maximum.
    pub ratio: f64,
    /// `N·D*_N` of the two-coordinate set `(n/p^m, P(1, p(X))_n)`.
    #[serde(rename = "pairNDstar")]
    pub pair_n_dstar: String,
    #[serde(rename = "pairWitnessHolds")]
    pub pair_witness_holds: bool,
}

/// Compares the tuple `(1, g, ..., g^{t−1})` against the Korobov tuple of the
/// best Korobov generator `g`, with no Halton coordinates.
pub fn negative_control(m: u32, t: usize, px: &Poly) -> Result<NegativeControlReport> {
    let p = px.modulus();
    let halton = HaltonConfig::new(p, vec![])?;
    let best = search_korobov(m, t, &halton, px)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::InvalidArgument("empty Korobov space".into()))?;
    let g = best.candidate.g.clone().expect("Korobov candidate");
    let mut control_tuple = vec![Poly::one(p)];
    control_tuple.extend(korobov_qvec(&g, t, px)?.into_iter().take(t - 1));
    let control = LatticeConfig::new(px.clone(), control_tuple.clone())?;
    let control_merit = hybrid_bound_certificate(m, &halton, &control)?.total;
    let korobov = LatticeConfig::new(px.clone(), best.candidate.q.clone())?;

    let control_max = max_prefix_discrepancy(&hybrid_point_set(&halton, &control)?, DEFAULT_ORACLE_BUDGET)?;
    let korobov_max = max_prefix_discrepancy(&hybrid_point_set(&halton, &korobov)?, DEFAULT_ORACLE_BUDGET)?;

    let one = LatticeConfig::new(px.clone(), vec![Poly::one(p)])?;
    let n = one.size();
    let pair = (0..n)
        .map(|i| {
            let mut pt = vec![BasePRational::new(i, m, p)?];
            pt.extend(plattice_point_laurent(i, &one)?);
            Ok(pt)
        })
        .collect::<Result<Vec<_>>>()?;
    let pair = PointSetD::new(2, p, pair)?;
    let pair_nd = star_discrepancy_exact_with_budget(&pair, DEFAULT_ORACLE_BUDGET)?
        * crate::Rational::from_integer(n as i128);
    let to_f = |r: &crate::Rational| *r.numer() as f64 / *r.denom() as f64;
    Ok(NegativeControlReport {
        g,
        control_tuple,
        control_merit,
        control_prefix_max: control_max.to_string(),
        korobov_tuple: best.candidate.q.clone(),
        korobov_merit: best.merit,
        korobov_prefix_max: korobov_max.to_string(),
        ratio: to_f(&control_max) / to_f(&korobov_max),
        pair_witness_holds: pair_nd >= crate::Rational::new(n as i128, 4),
        pair_n_dstar: pair_nd.to_string(),
    })
}

/// Orders reports by `(merit, encoding)`.
pub fn compare_reports(a: &MeritReport, b: &MeritReport) -> Ordering {
    a.merit
        .total_cmp(&b.merit)
        .then_with(|| a.candidate.encoding().cmp(&b.candidate.encoding()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfpoly::PrimeModulus;

    fn two() -> PrimeModulus {
        PrimeModulus::new(2).unwrap()
    }

    fn poly(text: &str) -> Poly {
        Poly::parse(text, two()).unwrap()
    }

    fn no_halton() -> HaltonConfig {
        HaltonConfig::new(two(), vec![]).unwrap()
    }

    #[test]
    fn exhaustive_small() {
        let px = poly("X^2+X+1");
        let reports = search_exhaustive(2, 1, &no_halton(), &px).unwrap();
        assert_eq!(reports.len(), 3);
        assert!(reports.windows(2).all(|w| compare_reports(&w[0], &w[1]) != Ordering::Greater));
        assert!(best_within_average(&reports));
        assert_eq!(reports.iter().map(|r| r.rank).collect::<Vec<_>>(), vec![1, 2, 3]);

        let single = search_exhaustive(1, 1, &no_halton(), &poly("X+1")).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].candidate.q, vec![poly("1")]);
    }

    #[test]
    fn korobov_candidates() {
        let px = poly("X^2+X+1");
        let reports = search_korobov(2, 2, &no_halton(), &px).unwrap();
        let mut tuples: Vec<Vec<String>> = reports
            .iter()
            .map(|r| r.candidate.q.iter().map(|q| q.to_string()).collect())
            .collect();
        tuples.sort();
        assert_eq!(tuples, vec![vec!["1", "1"], vec!["X", "X+1"], vec!["X+1", "X"]]);
        assert!(best_within_average(&reports));
    }

    #[test]
    fn counting_examples() {
        let px = poly("X^2+X+1");
        let k = WalshIndex::new(vec![1, 0], two(), 2).unwrap();
        let general = count_k1_k2(&k, &Poly::one(two()), &px, 2, 1, CountMode::General).unwrap();
        assert_eq!(general.k1, 0);
        assert!(general.holds);
        let k = WalshIndex::new(vec![1, 1], two(), 2).unwrap();
        let korobov = count_k1_k2(&k, &Poly::one(two()), &px, 2, 1, CountMode::Korobov).unwrap();
        assert_eq!(korobov.k1, 1);
        assert!(korobov.holds);
        let zero = WalshIndex::zero(2);
        assert!(count_k1_k2(&zero, &Poly::one(two()), &px, 2, 1, CountMode::General).is_err());
    }

    #[test]
    fn averaging_examples() {
        let px = poly("X^2+X+1");
        let r = average_merit_check(&Poly::one(two()), 2, &px, 1).unwrap();
        assert_eq!(r.count, 3);
        assert!((r.theoretical - 11.0 / 3.0).abs() < 1e-12);
        assert!(r.holds);
        let px3 = poly("X^3+X+1");
        let r = average_merit_check(&poly("X+1"), 3, &px3, 2).unwrap();
        assert_eq!(r.count, 49);
        assert!((r.theoretical - (2.0 + 8.0 / 7.0 * 6.25)).abs() < 1e-12);
        assert!(r.holds);
    }

    #[test]
    fn report_json_fields() {
        let px = poly("X^2+X+1");
        let halton = no_halton();
        let reports = search_exhaustive(2, 1, &halton, &px).unwrap();
        let json = SearchReport::new("exhaustive", 1, &halton, &px, &reports).unwrap().to_json();
        for key in ["\"p\"", "\"pX\"", "\"candidateCount\"", "\"best\"", "\"average\"", "\"table\"", "\"perLevel\""] {
            assert!(json.contains(key), "{key} missing");
        }
    }
}
