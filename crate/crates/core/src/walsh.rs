//! Base-p Walsh functions, the `ρ_wal` weights, exact character sums over
//! sub-lattices and the dual-space tests that decide them.

use std::f64::consts::PI;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gfpoly::{gcd, nonzero_below, valuation, PrimeModulus, Poly};
use crate::plattice::{int_digits, sublattice_affine, sublattice_enumerate, LatticeConfig, SubLatticeSpec};
use crate::seqgen::BasePRational;
use crate::Rational;

/// A Walsh index `k = (k_1, ..., k_t)` with `0 <= k_i < p^m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WalshIndex {
    components: Vec<u64>,
}

impl WalshIndex {
    pub fn new(components: Vec<u64>, p: PrimeModulus, m: u32) -> Result<Self> {
        let limit = p.pow_checked(m, "Walsh index range")?;
        if let Some(&bad) = components.iter().find(|&&k| k >= limit) {
            return Err(Error::IndexOutOfRange { index: bad, limit });
        }
        Ok(WalshIndex { components })
    }

    pub fn zero(t: usize) -> Self {
        WalshIndex { components: vec![0; t] }
    }

    pub fn components(&self) -> &[u64] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|&k| k == 0)
    }

    /// `k(X)`: one polynomial per component.
    pub fn polys(&self, p: PrimeModulus) -> Vec<Poly> {
        self.components.iter().map(|&k| Poly::from_int(k, p)).collect()
    }
}

/// All of `Δ_m` in ascending lexicographic order (first component most significant).
pub fn walsh_indices(p: PrimeModulus, m: u32, t: usize) -> Result<impl Iterator<Item = WalshIndex>> {
    let per = p.pow_checked(m, "Walsh index range")?;
    let total = per
        .checked_pow(t as u32)
        .ok_or(Error::Overflow("Walsh index count"))?;
    Ok((0..total).map(move |mut code| {
        let mut components = vec![0u64; t];
        for slot in components.iter_mut().rev() {
            *slot = code % per;
            code /= per;
        }
        WalshIndex { components }
    }))
}

/// Exponent `a` with `wal_k(x) = e(a/p)`: `Σ_j k_j x_j mod p` over base-p digits.
pub fn walsh_exponent(k: u64, x: &BasePRational) -> u32 {
    let p = x.modulus();
    let base = u64::from(p.get());
    let mut acc = 0u32;
    let mut rest = k;
    let mut j = 0u32;
    while rest > 0 && j < x.exponent() {
        let kj = (rest % base) as u32;
        acc = p.add(acc, p.mul(kj, x.digit(j)));
        rest /= base;
        j += 1;
    }
    acc
}

fn top_digit(k: u64, p: PrimeModulus) -> (u32, u64) {
    let base = u64::from(p.get());
    let mut g = 0u32;
    let mut rest = k;
    while rest >= base {
        rest /= base;
        g += 1;
    }
    (g, rest)
}

/// `ρ_wal(k)`: 1 for `k = 0`, else `1 / (p^{g+1} sin(π k_g / p))` where
/// `p^g <= k < p^{g+1}` and `k_g` is the leading digit.
pub fn rho_wal(k: u64, p: PrimeModulus) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let (g, kg) = top_digit(k, p);
    let scale = f64::from(p.get()).powi(g as i32 + 1);
    if p.get() == 2 {
        return 1.0 / scale;
    }
    1.0 / (scale * (PI * kg as f64 / f64::from(p.get())).sin())
}

/// Exact `ρ_wal(k)` for `p = 2`: `2^{-(g+1)}`.
pub fn rho_wal_dyadic(k: u64) -> Rational {
    if k == 0 {
        return Rational::one();
    }
    let g = 63 - k.leading_zeros();
    Rational::new(1, 1i128 << (g + 1))
}

pub fn rho_wal_vec(k: &WalshIndex, p: PrimeModulus) -> f64 {
    k.components.iter().map(|&c| rho_wal(c, p)).product()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhoSumMode {
    /// `(1 + m(p^2 - 1)/(3p))^t`.
    Closed,
    /// Literal summation over `Δ_m`.
    Direct,
}

/// `Σ_{k ∈ Δ_m} ρ_wal(k)`.
pub fn rho_sum(p: PrimeModulus, m: u32, t: usize, mode: RhoSumMode) -> Result<f64> {
    match mode {
        RhoSumMode::Closed => {
            let pf = f64::from(p.get());
            Ok((1.0 + f64::from(m) * (pf * pf - 1.0) / (3.0 * pf)).powi(t as i32))
        }
        RhoSumMode::Direct => {
            let per = p.pow_checked(m, "Walsh index range")?;
            let weights: Vec<f64> = (0..per).map(|k| rho_wal(k, p)).collect();
            Ok(walsh_indices(p, m, t)?
                .map(|k| k.components.iter().map(|&c| weights[c as usize]).product::<f64>())
                .sum())
        }
    }
}

/// Exact `Σ_{k ∈ Δ_m} ρ_wal(k)` for `p = 2`.
pub fn rho_sum_dyadic(m: u32, t: usize, mode: RhoSumMode) -> Result<Rational> {
    match mode {
        RhoSumMode::Closed => {
            let base = Rational::one() + Rational::new(i128::from(m), 2);
            Ok((0..t).fold(Rational::one(), |acc, _| acc * base))
        }
        RhoSumMode::Direct => {
            let two = PrimeModulus::new(2)?;
            let per = two.pow_checked(m, "Walsh index range")?;
            let weights: Vec<Rational> = (0..per).map(rho_wal_dyadic).collect();
            let mut acc = Rational::zero();
            for k in walsh_indices(two, m, t)? {
                acc += k
                    .components
                    .iter()
                    .fold(Rational::one(), |w, &c| w * weights[c as usize]);
            }
            Ok(acc)
        }
    }
}

/// Exponent histogram of a character sum: `counts[a]` summands equal `e(a/p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterAccumulator {
    counts: Vec<u64>,
}

/// Exact magnitude classes of a character sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharacterMagnitude {
    /// All summands share one exponent: `|sum|` equals the number of summands.
    Full(u64),
    /// Every exponent occurs equally often: the sum vanishes.
    Zero,
    /// Anything else (never produced by a sub-lattice sum).
    Other,
}

impl CharacterAccumulator {
    pub fn new(p: PrimeModulus) -> Self {
        CharacterAccumulator { counts: vec![0; p.get() as usize] }
    }

    pub fn push(&mut self, exponent: u32) {
        self.counts[exponent as usize] += 1;
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// The sum equals the real number `total`.
    pub fn is_real_full(&self) -> bool {
        self.counts[0] == self.total()
    }

    pub fn magnitude(&self) -> CharacterMagnitude {
        let total = self.total();
        if self.counts.iter().any(|&c| c == total) {
            CharacterMagnitude::Full(total)
        } else if self.counts.iter().all(|&c| c == self.counts[0]) {
            CharacterMagnitude::Zero
        } else {
            CharacterMagnitude::Other
        }
    }
}

fn check_index(k: &WalshIndex, cfg: &LatticeConfig) -> Result<()> {
    if k.components.len() != cfg.dim() {
        return Err(Error::DimensionMismatch { expected: cfg.dim(), got: k.components.len() });
    }
    let limit = cfg.size();
    if let Some(&bad) = k.components.iter().find(|&&c| c >= limit) {
        return Err(Error::IndexOutOfRange { index: bad, limit });
    }
    Ok(())
}

/// `Σ_l wal_k(y_{n_l})` over the sub-lattice, held as an exponent histogram.
pub fn character_sum(spec: &SubLatticeSpec, cfg: &LatticeConfig, k: &WalshIndex) -> Result<CharacterAccumulator> {
    check_index(k, cfg)?;
    let p = cfg.modulus();
    let mut acc = CharacterAccumulator::new(p);
    for point in sublattice_enumerate(spec, cfg)? {
        let e = k
            .components
            .iter()
            .zip(&point)
            .fold(0u32, |a, (&ki, y)| p.add(a, walsh_exponent(ki, y)));
        acc.push(e);
    }
    Ok(acc)
}

/// `C_{1,d}^T k_1 + ... + C_{t,d}^T k_t = 0` in `F_p^d`.
pub fn dual_test_matrix(spec: &SubLatticeSpec, cfg: &LatticeConfig, k: &WalshIndex) -> Result<bool> {
    check_index(k, cfg)?;
    let p = cfg.modulus();
    let m = cfg.m() as usize;
    let affine = sublattice_affine(spec, cfg)?;
    let mut acc = vec![0u32; spec.d() as usize];
    for (c, &ki) in affine.matrices().iter().zip(&k.components) {
        for (a, v) in acc.iter_mut().zip(c.apply_transpose(&int_digits(ki, p, m))) {
            *a = p.add(*a, v);
        }
    }
    Ok(acc.iter().all(|&v| v == 0))
}

/// `ν({k(X)·q(X)·B(X) / p(X)}) < -d`.
pub fn dual_test_valuation(spec: &SubLatticeSpec, cfg: &LatticeConfig, k: &WalshIndex) -> Result<bool> {
    check_index(k, cfg)?;
    dual_condition(&k.polys(cfg.modulus()), spec.class().modulus(), spec.d(), cfg)
}

/// Valuation form of the dual condition for explicit `k(X)`, `B` and `d`.
pub fn dual_condition(k: &[Poly], b: &Poly, d: u32, cfg: &LatticeConfig) -> Result<bool> {
    let p = cfg.modulus();
    let px = cfg.px();
    let mut s = Poly::zero(p);
    for (ki, q) in k.iter().zip(cfg.generators()) {
        s = &s + &(ki * q);
    }
    let w = s.mul_mod(b, px)?;
    Ok(valuation(&w, px)?.below(-i64::from(d)))
}

/// `#{a ∈ G*_{p,m} : ν(a / p(X)) < -u}` by exhaustive count.
pub fn count_low_valuation(px: &Poly, u: u32) -> Result<u64> {
    let m = px.degree().ok_or(Error::ConstantPolynomial)? as u32;
    if u > m {
        return Err(Error::InvalidArgument(format!("u = {u} exceeds deg p(X) = {m}")));
    }
    let mut count = 0;
    for a in nonzero_below(px.modulus(), m) {
        if valuation(&a, px)?.below(-i64::from(u)) {
            count += 1;
        }
    }
    Ok(count)
}

/// Walsh indices in `Δ*_m` satisfying the dual condition for `(B, d)`, in
/// ascending order, each with its component polynomials' contributions
/// precomputed per coordinate.
struct DualScan {
    p: PrimeModulus,
    per: u64,
    t: usize,
    // coeffs of k(X)·q_i·B mod p(X), per coordinate i and k < p^m
    images: Vec<Vec<Vec<u32>>>,
    cutoff: usize,
}

impl DualScan {
    fn new(b: &Poly, d: u32, cfg: &LatticeConfig) -> Result<Self> {
        let p = cfg.modulus();
        let m = cfg.m();
        if b.modulus() != p {
            return Err(Error::FieldMismatch(p.get(), b.modulus().get()));
        }
        if !gcd(b, cfg.px())?.is_one() {
            return Err(Error::NotCoprime(format!("{b} and {}", cfg.px())));
        }
        let deg_b = b.degree().unwrap_or(0) as u32;
        if deg_b + d > m {
            return Err(Error::Config(format!("deg B + d = {} exceeds m = {m}", deg_b + d)));
        }
        let per = cfg.size();
        let images = cfg
            .generators()
            .iter()
            .map(|q| -> Result<Vec<Vec<u32>>> {
                let w = q.mul_mod(b, cfg.px())?;
                (0..per)
                    .map(|k| {
                        let img = Poly::from_int(k, p).mul_mod(&w, cfg.px())?;
                        let mut c = img.coeffs().to_vec();
                        c.resize(m as usize, 0);
                        Ok(c)
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        Ok(DualScan { p, per, t: cfg.dim(), images, cutoff: (m - d) as usize })
    }

    /// Calls `visit` with the components of every dual index, ascending.
    fn for_each(&self, mut visit: impl FnMut(&[u64])) -> Result<()> {
        let total = self
            .per
            .checked_pow(self.t as u32)
            .ok_or(Error::Overflow("Walsh index count"))?;
        let m = self.images.first().map_or(0, |v| v.first().map_or(0, Vec::len));
        let mut k = vec![0u64; self.t];
        let mut sum = vec![0u32; m];
        for code in 1..total {
            let mut c = code;
            for slot in k.iter_mut().rev() {
                *slot = c % self.per;
                c /= self.per;
            }
            sum.iter_mut().for_each(|s| *s = 0);
            for (img, &ki) in self.images.iter().zip(&k) {
                for (s, &v) in sum.iter_mut().zip(&img[ki as usize]) {
                    *s = self.p.add(*s, v);
                }
            }
            if sum[self.cutoff..].iter().all(|&v| v == 0) {
                visit(&k);
            }
        }
        Ok(())
    }
}

/// Dual indices `k ∈ Δ*_m` with `ν({k(X) q(X) B(X) / p(X)}) < -d`.
pub fn dual_indices(b: &Poly, d: u32, cfg: &LatticeConfig) -> Result<Vec<WalshIndex>> {
    let scan = DualScan::new(b, d, cfg)?;
    let mut out = Vec::new();
    scan.for_each(|k| out.push(WalshIndex { components: k.to_vec() }))?;
    Ok(out)
}

/// Walsh bound on `L·D*_L` of the sub-lattice: `t p^{d-m} + p^d Σ_{dual k} ρ_wal(k)`,
/// capped at the trivial bound `p^d`.
pub fn lemma2_bound(spec: &SubLatticeSpec, cfg: &LatticeConfig) -> Result<f64> {
    spec.validate_for(cfg)?;
    lemma2_bound_for(spec.class().modulus(), spec.d(), cfg)
}

/// [`lemma2_bound`] for a class modulus `B` and `d = u - deg B`; residues and
/// block position do not enter the bound.
pub fn lemma2_bound_for(b: &Poly, d: u32, cfg: &LatticeConfig) -> Result<f64> {
    let scan = DualScan::new(b, d, cfg)?;
    let p = cfg.modulus();
    let weights: Vec<f64> = (0..scan.per).map(|k| rho_wal(k, p)).collect();
    let mut dual_sum = 0.0f64;
    scan.for_each(|k| dual_sum += k.iter().map(|&c| weights[c as usize]).product::<f64>())?;
    let pf = f64::from(p.get());
    let ld = pf.powi(d as i32);
    let bound = cfg.dim() as f64 * pf.powi(d as i32 - cfg.m() as i32) + ld * dual_sum;
    Ok(bound.min(ld))
}

/// Exact [`lemma2_bound_for`] for `p = 2`.
pub fn lemma2_bound_dyadic(b: &Poly, d: u32, cfg: &LatticeConfig) -> Result<Rational> {
    if cfg.modulus().get() != 2 {
        return Err(Error::InvalidArgument("dyadic bound requires p = 2".into()));
    }
    let scan = DualScan::new(b, d, cfg)?;
    let weights: Vec<Rational> = (0..scan.per).map(rho_wal_dyadic).collect();
    let mut dual_sum = Rational::zero();
    scan.for_each(|k| {
        dual_sum += k.iter().fold(Rational::one(), |w, &c| w * weights[c as usize]);
    })?;
    let ld = Rational::from_integer(1i128 << d);
    let bound = Rational::new(cfg.dim() as i128, 1i128 << cfg.m()) * ld + ld * dual_sum;
    Ok(bound.min(ld))
}
