//! Radical inverses, Halton-type sequences over F_p[X], the correspondence
//! between elementary boxes and residue classes, and hybrid point assembly.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gfpoly::{gcd, PrimeModulus, Poly};
use crate::plattice::{plattice_point_laurent, LatticeConfig};
use crate::Rational;

/// An exact coordinate `numerator / p^exponent` in `[0, 1)`.
///
/// Equality, ordering and hashing are by value, so `2/4` equals `1/2`.
#[derive(Clone, Copy)]
pub struct BasePRational {
    numerator: u64,
    exponent: u32,
    p: PrimeModulus,
}

impl BasePRational {
    pub fn new(numerator: u64, exponent: u32, p: PrimeModulus) -> Result<Self> {
        let den = p.pow_checked(exponent, "coordinate denominator")?;
        if numerator >= den {
            return Err(Error::InvalidArgument(format!(
                "coordinate {numerator}/{den} is not in [0, 1)"
            )));
        }
        Ok(BasePRational { numerator, exponent, p })
    }

    pub fn zero(p: PrimeModulus) -> Self {
        BasePRational { numerator: 0, exponent: 0, p }
    }

    /// `Σ digits[j] · p^{-(j+1)}` for base-p digits.
    pub fn from_digits(digits: &[u32], p: PrimeModulus) -> Result<Self> {
        let base = u64::from(p.get());
        let mut numerator = 0u64;
        for &d in digits {
            numerator = numerator
                .checked_mul(base)
                .and_then(|v| v.checked_add(u64::from(d)))
                .ok_or(Error::Overflow("digit expansion"))?;
        }
        BasePRational::new(numerator, digits.len() as u32, p)
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn denominator(&self) -> u64 {
        self.p.pow(self.exponent).expect("validated at construction")
    }

    /// The `j`-th base-p digit after the point (`j = 0` is the most significant).
    pub fn digit(&self, j: u32) -> u32 {
        if j >= self.exponent {
            return 0;
        }
        let shift = self.p.pow(self.exponent - 1 - j).expect("validated");
        ((self.numerator / shift) % u64::from(self.p.get())) as u32
    }

    /// Numerator over the larger denominator `p^exponent`.
    pub fn scaled_to(&self, exponent: u32) -> u128 {
        assert!(exponent >= self.exponent, "cannot scale {self} down to p^{exponent}");
        let factor = u128::from(self.p.pow(exponent - self.exponent).expect("denominator overflow"));
        u128::from(self.numerator) * factor
    }

    /// Same value with the smallest exponent.
    pub fn reduced(&self) -> Self {
        let base = u64::from(self.p.get());
        let (mut num, mut exp) = (self.numerator, self.exponent);
        while exp > 0 && num % base == 0 {
            num /= base;
            exp -= 1;
        }
        BasePRational { numerator: num, exponent: exp, p: self.p }
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(i128::from(self.numerator), i128::from(self.denominator()))
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator() as f64
    }

    fn cross(&self, other: &Self) -> (u128, u128) {
        let e = self.exponent.max(other.exponent);
        (self.scaled_to(e), other.scaled_to(e))
    }
}

impl PartialEq for BasePRational {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.cross(other);
        self.p == other.p && a == b
    }
}

impl Eq for BasePRational {}

impl Hash for BasePRational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        let r = self.reduced();
        r.p.hash(state);
        r.numerator.hash(state);
        r.exponent.hash(state);
    }
}

impl PartialOrd for BasePRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BasePRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = self.cross(other);
        a.cmp(&b)
    }
}

impl fmt::Display for BasePRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator())
    }
}

impl fmt::Debug for BasePRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}^{}", self.numerator, self.p, self.exponent)
    }
}

/// Classical radical inverse of `n` in integer base `b`.
pub fn radical_inverse_int(n: u64, b: u64) -> Result<Rational> {
    if b < 2 {
        return Err(Error::InvalidArgument(format!("radical inverse base {b} < 2")));
    }
    let base = i128::from(b);
    let (mut num, mut den) = (0i128, 1i128);
    let mut rest = n;
    while rest > 0 {
        let digit = i128::from(rest % b);
        rest /= b;
        num = num.checked_mul(base).ok_or(Error::Overflow("radical inverse"))? + digit;
        den = den.checked_mul(base).ok_or(Error::Overflow("radical inverse"))?;
    }
    Ok(Rational::new(num, den))
}

/// Digit bijection `σ` from polynomials of degree `< e` (by integer
/// encoding) to `{0, ..., p^e - 1}`, fixing zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaBijection {
    p: PrimeModulus,
    e: u32,
    table: Vec<u64>,
    inverse: Vec<u64>,
}

impl SigmaBijection {
    /// Coefficient evaluation `σ(Σ ρ_j X^j) = Σ ρ_j p^j`.
    pub fn identity(p: PrimeModulus, e: u32) -> Result<Self> {
        let size = p.pow_checked(e, "digit alphabet")?;
        Self::new(p, e, (0..size).collect())
    }

    pub fn new(p: PrimeModulus, e: u32, table: Vec<u64>) -> Result<Self> {
        if e == 0 {
            return Err(Error::Config("digit degree bound must be positive".into()));
        }
        let size = p.pow_checked(e, "digit alphabet")?;
        if table.len() as u64 != size {
            return Err(Error::Config(format!(
                "sigma table has {} entries, expected {size}",
                table.len()
            )));
        }
        if table[0] != 0 {
            return Err(Error::Config("sigma must map 0 to 0".into()));
        }
        let mut inverse = vec![u64::MAX; table.len()];
        for (rho, &v) in table.iter().enumerate() {
            if v >= size || inverse[v as usize] != u64::MAX {
                return Err(Error::Config("sigma table is not a bijection".into()));
            }
            inverse[v as usize] = rho as u64;
        }
        Ok(SigmaBijection { p, e, table, inverse })
    }

    pub fn degree_bound(&self) -> u32 {
        self.e
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn apply(&self, rho: &Poly) -> u64 {
        let idx = rho.to_int().expect("digit polynomial");
        self.table[idx as usize]
    }

    /// `σ^{-1}(v)` as a polynomial of degree `< e`.
    pub fn invert(&self, v: u64) -> Poly {
        Poly::from_int(self.inverse[v as usize], self.p)
    }
}

/// Bases and digit maps of a Halton-type sequence over F_p[X].
#[derive(Clone, Debug)]
pub struct HaltonConfig {
    p: PrimeModulus,
    bases: Vec<Poly>,
    sigmas: Vec<SigmaBijection>,
}

impl HaltonConfig {
    /// Bases with the default coefficient-evaluation digit maps.
    pub fn new(p: PrimeModulus, bases: Vec<Poly>) -> Result<Self> {
        let sigmas = bases
            .iter()
            .map(|b| SigmaBijection::identity(p, b.degree().unwrap_or(0).max(1) as u32))
            .collect::<Result<Vec<_>>>()?;
        Self::with_sigmas(p, bases, sigmas)
    }

    pub fn with_sigmas(p: PrimeModulus, bases: Vec<Poly>, sigmas: Vec<SigmaBijection>) -> Result<Self> {
        if sigmas.len() != bases.len() {
            return Err(Error::Config(format!(
                "{} bases but {} digit maps",
                bases.len(),
                sigmas.len()
            )));
        }
        for (b, sigma) in bases.iter().zip(&sigmas) {
            if b.modulus() != p {
                return Err(Error::FieldMismatch(p.get(), b.modulus().get()));
            }
            if b.is_constant() || !b.is_monic() {
                return Err(Error::Config(format!("base {b} must be monic and nonconstant")));
            }
            if sigma.e as usize != b.degree().unwrap_or(0) || sigma.p != p {
                return Err(Error::Config(format!("digit map does not match base {b}")));
            }
        }
        for (i, a) in bases.iter().enumerate() {
            for b in &bases[i + 1..] {
                if !gcd(a, b)?.is_one() {
                    return Err(Error::NotCoprime(format!("bases {a} and {b} are not coprime")));
                }
            }
        }
        Ok(HaltonConfig { p, bases, sigmas })
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn bases(&self) -> &[Poly] {
        &self.bases
    }

    pub fn sigmas(&self) -> &[SigmaBijection] {
        &self.sigmas
    }

    /// Number of Halton coordinates `s`.
    pub fn dim(&self) -> usize {
        self.bases.len()
    }

    /// Base degrees `e_1, ..., e_s`.
    pub fn degrees(&self) -> Vec<u32> {
        self.bases.iter().map(|b| b.degree().unwrap_or(0) as u32).collect()
    }
}

/// `φ_{b(X)}(n(X))`: expand `n(X)` in base `b(X)` and map digits through `σ`.
pub fn radical_inverse_poly(n: u64, base: &Poly, sigma: &SigmaBijection) -> Result<BasePRational> {
    let p = base.modulus();
    let e = match base.degree() {
        Some(e) if e >= 1 && base.is_monic() => e as u32,
        _ => return Err(Error::Config(format!("base {base} must be monic and nonconstant"))),
    };
    if sigma.e != e || sigma.p != p {
        return Err(Error::Config("digit map does not match base".into()));
    }
    let digit_base = p.pow_checked(e, "digit alphabet")?;
    let mut cur = Poly::from_int(n, p);
    let mut numerator = 0u64;
    let mut exponent = 0u32;
    while !cur.is_zero() {
        let (q, rho) = cur.divmod(base)?;
        numerator = numerator
            .checked_mul(digit_base)
            .and_then(|v| v.checked_add(sigma.apply(&rho)))
            .ok_or(Error::Overflow("radical inverse"))?;
        exponent += e;
        cur = q;
    }
    BasePRational::new(numerator, exponent, p)
}

/// The `n`-th point of the Halton-type sequence.
pub fn halton_point(n: u64, cfg: &HaltonConfig) -> Result<Vec<BasePRational>> {
    cfg.bases
        .iter()
        .zip(&cfg.sigmas)
        .map(|(b, sigma)| radical_inverse_poly(n, b, sigma))
        .collect()
}

/// The set `{n : n(X) ≡ residue (mod modulus)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResidueClass {
    modulus: Poly,
    residue: Poly,
}

impl ResidueClass {
    pub fn new(modulus: Poly, residue: Poly) -> Result<Self> {
        if modulus.is_zero() || !modulus.is_monic() {
            return Err(Error::Config(format!("class modulus {modulus} must be monic")));
        }
        if modulus.modulus() != residue.modulus() {
            return Err(Error::FieldMismatch(modulus.modulus().get(), residue.modulus().get()));
        }
        if residue.len() > modulus.degree().unwrap_or(0) {
            return Err(Error::Config(format!(
                "residue {residue} must have degree below that of {modulus}"
            )));
        }
        Ok(ResidueClass { modulus, residue })
    }

    /// The class of all polynomials (modulus 1).
    pub fn everything(p: PrimeModulus) -> Self {
        ResidueClass { modulus: Poly::one(p), residue: Poly::zero(p) }
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn residue(&self) -> &Poly {
        &self.residue
    }

    pub fn contains(&self, n: &Poly) -> bool {
        n.rem(&self.modulus).expect("nonzero modulus") == self.residue
    }

    pub fn contains_index(&self, n: u64) -> bool {
        self.contains(&Poly::from_int(n, self.modulus.modulus()))
    }

    /// Intersection with a class of coprime modulus (Chinese remaindering).
    pub fn intersect(&self, other: &ResidueClass) -> Result<ResidueClass> {
        let (b1, b2) = (&self.modulus, &other.modulus);
        let diff = &other.residue - &self.residue;
        let lift = diff.mul_mod(&b1.rem(b2)?.inverse_mod(b2)?, b2)?;
        let modulus = b1 * b2;
        let residue = (&self.residue + &(b1 * &lift)).rem(&modulus)?;
        Ok(ResidueClass { modulus, residue })
    }

    fn sort_key(&self) -> (usize, u64, u64) {
        (
            self.modulus.degree().unwrap_or(0),
            self.residue.to_int().unwrap_or(u64::MAX),
            self.modulus.to_int().unwrap_or(u64::MAX),
        )
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.residue, self.modulus)
    }
}

/// Residue classes in one coordinate for the box `[0, v / p^{e·l})`.
fn classes_for_dimension(base: &Poly, sigma: &SigmaBijection, level: u32, v: u64) -> Result<Vec<ResidueClass>> {
    let p = base.modulus();
    let digit_base = p.pow_checked(sigma.e, "digit alphabet")?;
    let full = digit_base
        .checked_pow(level)
        .ok_or(Error::Overflow("box resolution"))?;
    if v < 1 || v > full {
        return Err(Error::InvalidArgument(format!("box numerator {v} not in [1, {full}]")));
    }
    if v == full {
        return Ok(vec![ResidueClass::everything(p)]);
    }
    // Base-p^e digits of v, most significant first.
    let mut digits = vec![0u64; level as usize];
    let mut rest = v;
    for slot in digits.iter_mut().rev() {
        *slot = rest % digit_base;
        rest /= digit_base;
    }
    let mut classes = Vec::new();
    let mut prefix = Poly::zero(p);
    let mut power = Poly::one(p);
    for &vj in &digits {
        for a in 0..vj {
            let residue = &prefix + &(&power * &sigma.invert(a));
            classes.push(ResidueClass { modulus: &power * base, residue });
        }
        prefix = &prefix + &(&power * &sigma.invert(vj));
        power = &power * base;
    }
    Ok(classes)
}

/// Decomposes `{n : x_n ∈ ∏ [0, v_i p^{-e_i l_i})}` into disjoint residue
/// classes, ordered by (modulus degree, residue encoding, modulus encoding).
pub fn box_to_residue_classes(cfg: &HaltonConfig, levels: &[u32], numerators: &[u64]) -> Result<Vec<ResidueClass>> {
    if levels.len() != cfg.dim() || numerators.len() != cfg.dim() {
        return Err(Error::DimensionMismatch {
            expected: cfg.dim(),
            got: levels.len().min(numerators.len()),
        });
    }
    let mut acc = vec![ResidueClass::everything(cfg.p)];
    for i in 0..cfg.dim() {
        let dim_classes = classes_for_dimension(&cfg.bases[i], &cfg.sigmas[i], levels[i], numerators[i])?;
        let mut next = Vec::with_capacity(acc.len() * dim_classes.len());
        for a in &acc {
            for c in &dim_classes {
                next.push(a.intersect(c)?);
            }
        }
        acc = next;
    }
    acc.sort_by_key(ResidueClass::sort_key);
    Ok(acc)
}

/// `Σ_k p^{-deg B_k}`, the asymptotic density of a disjoint union of classes.
pub fn residue_classes_measure(classes: &[ResidueClass]) -> Rational {
    classes.iter().fold(Rational::zero(), |acc, c| {
        let p = i128::from(c.modulus.modulus().get());
        let deg = c.modulus.degree().unwrap_or(0) as u32;
        acc + Rational::new(1, p.pow(deg))
    })
}

/// `(n/p^m, x_n, y_n)`: anchor, Halton-type and polynomial lattice coordinates.
pub fn hybrid_point(n: u64, m: u32, cfg: &HaltonConfig, lattice: &LatticeConfig) -> Result<Vec<BasePRational>> {
    if lattice.m() != m {
        return Err(Error::Config(format!(
            "lattice modulus has degree {}, expected {m}",
            lattice.m()
        )));
    }
    if cfg.p != lattice.modulus() {
        return Err(Error::FieldMismatch(cfg.p.get(), lattice.modulus().get()));
    }
    let count = cfg.p.pow_checked(m, "point count")?;
    if n >= count {
        return Err(Error::IndexOutOfRange { index: n, limit: count });
    }
    let mut point = Vec::with_capacity(1 + cfg.dim() + lattice.dim());
    point.push(BasePRational::new(n, m, cfg.p)?);
    point.extend(halton_point(n, cfg)?);
    point.extend(plattice_point_laurent(n, lattice)?);
    Ok(point)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn poly(text: &str, p: u64) -> Poly {
        Poly::parse(text, f(p)).unwrap()
    }

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn integer_radical_inverse() {
        assert_eq!(radical_inverse_int(1, 2).unwrap(), q(1, 2));
        assert_eq!(radical_inverse_int(3, 2).unwrap(), q(3, 4));
        assert_eq!(radical_inverse_int(5, 3).unwrap(), q(7, 9));
        assert_eq!(radical_inverse_int(6, 2).unwrap(), q(3, 8));
        assert_eq!(radical_inverse_int(0, 10).unwrap(), q(0, 1));
        assert!(radical_inverse_int(3, 1).is_err());
    }

    #[test]
    fn polynomial_radical_inverse() {
        let sigma2 = SigmaBijection::identity(f(2), 2).unwrap();
        let sigma1 = SigmaBijection::identity(f(2), 1).unwrap();
        let v = radical_inverse_poly(4, &poly("X^2+X+1", 2), &sigma2).unwrap();
        assert_eq!(v.to_rational(), q(13, 16));
        assert_eq!(radical_inverse_poly(0, &poly("X", 2), &sigma1).unwrap().to_rational(), q(0, 1));
        assert_eq!(radical_inverse_poly(2, &poly("X+1", 2), &sigma1).unwrap().to_rational(), q(3, 4));
        // base X reproduces the classical base-p radical inverse
        for n in 0..200u64 {
            let a = radical_inverse_poly(n, &poly("X", 3), &SigmaBijection::identity(f(3), 1).unwrap()).unwrap();
            assert_eq!(a.to_rational(), radical_inverse_int(n, 3).unwrap());
        }
    }

    #[test]
    fn radical_inverse_exponent_bound() {
        let base = poly("X^2+X+1", 2);
        let sigma = SigmaBijection::identity(f(2), 2).unwrap();
        for m in 1..=9u32 {
            for n in 0..2u64.pow(m) {
                let v = radical_inverse_poly(n, &base, &sigma).unwrap();
                assert!(v.exponent() <= 2 * m.div_ceil(2));
            }
        }
    }

    #[test]
    fn sigma_validation() {
        assert!(SigmaBijection::new(f(2), 1, vec![1, 0]).is_err());
        assert!(SigmaBijection::new(f(2), 2, vec![0, 1, 1, 2]).is_err());
        assert!(SigmaBijection::new(f(2), 2, vec![0, 1, 2]).is_err());
        let s = SigmaBijection::new(f(3), 1, vec![0, 2, 1]).unwrap();
        assert_eq!(s.apply(&poly("2", 3)), 1);
        assert_eq!(s.invert(2), poly("1", 3));
    }

    #[test]
    fn halton_points() {
        let cfg = HaltonConfig::new(f(2), vec![poly("X", 2), poly("X+1", 2)]).unwrap();
        let pt = halton_point(3, &cfg).unwrap();
        assert_eq!(pt[0].to_rational(), q(3, 4));
        assert_eq!(pt[1].to_rational(), q(1, 4));
        assert!(halton_point(0, &cfg).unwrap().iter().all(|c| c.numerator() == 0));
        let one = HaltonConfig::new(f(2), vec![poly("X", 2)]).unwrap();
        assert_eq!(halton_point(1, &one).unwrap()[0].to_rational(), q(1, 2));
    }

    #[test]
    fn halton_config_validation() {
        assert!(HaltonConfig::new(f(2), vec![poly("X^2+1", 2), poly("X+1", 2)]).is_err());
        assert!(HaltonConfig::new(f(2), vec![poly("1", 2)]).is_err());
        assert!(HaltonConfig::new(f(3), vec![poly("2X+1", 3)]).is_err());
        assert!(HaltonConfig::new(f(2), vec![]).is_ok());
    }

    #[test]
    fn box_decomposition_examples() {
        let cfg = HaltonConfig::new(f(2), vec![poly("X", 2)]).unwrap();
        let c = box_to_residue_classes(&cfg, &[1], &[1]).unwrap();
        assert_eq!(c, vec![ResidueClass::new(poly("X", 2), Poly::zero(f(2))).unwrap()]);
        let c = box_to_residue_classes(&cfg, &[1], &[2]).unwrap();
        assert_eq!(c, vec![ResidueClass::everything(f(2))]);
        let c = box_to_residue_classes(&cfg, &[2], &[3]).unwrap();
        assert_eq!(
            c,
            vec![
                ResidueClass::new(poly("X", 2), Poly::zero(f(2))).unwrap(),
                ResidueClass::new(poly("X^2", 2), poly("1", 2)).unwrap(),
            ]
        );
        assert!(box_to_residue_classes(&cfg, &[2], &[0]).is_err());
        assert!(box_to_residue_classes(&cfg, &[2], &[5]).is_err());
        assert!(box_to_residue_classes(&cfg, &[2, 1], &[1, 1]).is_err());
    }

    #[test]
    fn measure_examples() {
        let cfg = HaltonConfig::new(f(2), vec![poly("X", 2)]).unwrap();
        let c = box_to_residue_classes(&cfg, &[2], &[3]).unwrap();
        assert_eq!(residue_classes_measure(&c), q(3, 4));
        assert_eq!(residue_classes_measure(&[ResidueClass::everything(f(2))]), q(1, 1));
        assert_eq!(residue_classes_measure(&[]), q(0, 1));
    }

    #[test]
    fn crt_intersection() {
        let a = ResidueClass::new(poly("X", 2), poly("1", 2)).unwrap();
        let b = ResidueClass::new(poly("X^2+1", 2), poly("X", 2)).unwrap();
        let c = a.intersect(&b).unwrap();
        for n in 0..64u64 {
            let np = Poly::from_int(n, f(2));
            assert_eq!(c.contains(&np), a.contains(&np) && b.contains(&np));
        }
    }

    #[test]
    fn base_p_rational_value_semantics() {
        let a = BasePRational::new(2, 2, f(2)).unwrap();
        let b = BasePRational::new(1, 1, f(2)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "2/4");
        assert_eq!(a.reduced().to_string(), "1/2");
        assert!(BasePRational::new(4, 2, f(2)).is_err());
        let c = BasePRational::new(5, 2, f(3)).unwrap();
        assert_eq!((c.digit(0), c.digit(1), c.digit(2)), (1, 2, 0));
        assert!(BasePRational::from_digits(&[1, 0, 1], f(2)).unwrap() == BasePRational::new(5, 3, f(2)).unwrap());
    }
}
