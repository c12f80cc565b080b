//! Computable upper bound on `Ñ·D*_Ñ` for every prefix of the hybrid set
//! `(x_n, y_n)`, assembled level by level from block, residue-class and
//! Walsh-sum estimates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gfpoly::{gcd, Poly};
use crate::plattice::LatticeConfig;
use crate::seqgen::HaltonConfig;
use crate::walsh::lemma2_bound_for;

/// Contribution of one modulus shape `B = ∏ b_i^{j_i}` at one level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeRecord {
    pub exponents: Vec<u32>,
    #[serde(rename = "degB")]
    pub deg_b: u32,
    /// `u − deg B`, absent when the class holds at most one point of the block.
    pub d: Option<u32>,
    #[serde(rename = "multiplicityBound")]
    pub multiplicity_bound: u64,
    #[serde(rename = "classBound")]
    pub class_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub u: u32,
    pub value: f64,
    /// Error from snapping Halton box edges to the level grid.
    #[serde(rename = "approximationTerm")]
    pub approximation_term: u64,
    pub shapes: Vec<ShapeRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub p: u32,
    pub m: u32,
    pub total: f64,
    #[serde(rename = "perLevel")]
    pub per_level: Vec<LevelRecord>,
}

impl Certificate {
    /// Sum of the level values before the final rounding guard.
    pub fn raw_total(&self) -> f64 {
        let p = f64::from(self.p);
        let top = self.per_level.last().map_or(0.0, |l| l.value);
        let lower: f64 = self.per_level[..self.per_level.len() - 1].iter().map(|l| l.value).sum();
        1.0 + top + (p - 1.0) * lower
    }
}

/// All shapes `(j_1, ..., j_s)` with `0 ≤ j_i ≤ f_i`, lexicographic.
fn shapes(limits: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &f in limits {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=f).map(move |j| {
                    let mut v = prefix.clone();
                    v.push(j);
                    v
                })
            })
            .collect();
    }
    out
}

fn shape_record(
    u: u32,
    exps: Vec<u32>,
    halton: &HaltonConfig,
    lattice: &LatticeConfig,
) -> Result<ShapeRecord> {
    let p = lattice.modulus();
    let degrees = halton.degrees();
    let deg_b: u32 = exps.iter().zip(&degrees).map(|(j, e)| j * e).sum();
    let multiplicity_bound = exps
        .iter()
        .zip(&degrees)
        .filter(|(&j, _)| j > 0)
        .try_fold(1u64, |acc, (_, &e)| {
            let digits = p.pow_checked(e, "digit count")? - 1;
            acc.checked_mul(digits).ok_or(Error::Overflow("shape multiplicity"))
        })?;
    if deg_b > u {
        return Ok(ShapeRecord { exponents: exps, deg_b, d: None, multiplicity_bound, class_bound: 1.0 });
    }
    let mut b = Poly::one(p);
    for (base, &j) in halton.bases().iter().zip(&exps) {
        for _ in 0..j {
            b = &b * base;
        }
    }
    let d = u - deg_b;
    let class_bound = lemma2_bound_for(&b, d, lattice)?;
    Ok(ShapeRecord { exponents: exps, deg_b, d: Some(d), multiplicity_bound, class_bound })
}

/// Rigorous bound `1 + PerLevel(m) + (p−1)·Σ_{u<m} PerLevel(u)` on
/// `Ñ·D*_Ñ` of the `(x_n, y_n)` prefixes, `Ñ ≤ p^m`, and hence of the
/// anchored hybrid set.
pub fn hybrid_bound_certificate(m: u32, halton: &HaltonConfig, lattice: &LatticeConfig) -> Result<Certificate> {
    let p = lattice.modulus();
    if halton.modulus() != p {
        return Err(Error::FieldMismatch(p.get(), halton.modulus().get()));
    }
    if lattice.m() != m {
        return Err(Error::Config(format!("lattice modulus has degree {} but m = {m}", lattice.m())));
    }
    for b in halton.bases() {
        if !gcd(b, lattice.px())?.is_one() {
            return Err(Error::NotCoprime(format!("base {b} and {}", lattice.px())));
        }
    }
    let degrees = halton.degrees();
    let s = halton.dim() as u64;

    let tasks: Vec<(u32, Vec<u32>)> = (1..=m)
        .flat_map(|u| {
            let limits: Vec<u32> = degrees.iter().map(|&e| u.div_ceil(e)).collect();
            shapes(&limits).into_iter().map(move |sh| (u, sh))
        })
        .collect();
    let records: Vec<(u32, ShapeRecord)> = tasks
        .into_par_iter()
        .map(|(u, sh)| shape_record(u, sh, halton, lattice).map(|r| (u, r)))
        .collect::<Result<_>>()?;

    let mut per_level = vec![LevelRecord { u: 0, value: 1.0, approximation_term: 0, shapes: vec![] }];
    for u in 1..=m {
        let shapes: Vec<ShapeRecord> = records
            .iter()
            .filter(|(lu, _)| *lu == u)
            .map(|(_, r)| r.clone())
            .collect();
        let value = s as f64
            + shapes
                .iter()
                .map(|r| r.multiplicity_bound as f64 * r.class_bound)
                .sum::<f64>();
        per_level.push(LevelRecord { u, value, approximation_term: s, shapes });
    }

    let mut cert = Certificate { p: p.get(), m, total: 0.0, per_level };
    let raw = cert.raw_total();
    let terms = records.len() as f64 + f64::from(m) + 2.0;
    cert.total = raw + raw * terms * f64::EPSILON;
    Ok(cert)
}
