//! Arithmetic in F_p, F_p[X] and truncated Laurent series in F_p((X^{-1})).
//!
//! Polynomials keep their coefficients reduced to `[0, p)` in ascending
//! order with no trailing zeros, so structural equality is field equality.
//! The zero polynomial has no degree ([`Poly::degree`] returns `None`).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A prime `p`, checked by trial division at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeModulus(u32);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 || p > u64::from(u32::MAX) {
            return Err(Error::NotPrime(p));
        }
        let mut d = 2u64;
        while d * d <= p {
            if p % d == 0 {
                return Err(Error::NotPrime(p));
            }
            d += 1;
        }
        Ok(PrimeModulus(p as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((u64::from(a) + u64::from(b)) % u64::from(self.0)) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((u64::from(a) + u64::from(self.0) - u64::from(b)) % u64::from(self.0)) as u32
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((u64::from(a) * u64::from(b)) % u64::from(self.0)) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    /// Multiplicative inverse of a nonzero residue (Fermat).
    pub fn inv(self, a: u32) -> Result<u32> {
        if a % self.0 == 0 {
            return Err(Error::ZeroDivisor);
        }
        let mut base = u64::from(a % self.0);
        let modulus = u64::from(self.0);
        let mut e = modulus - 2;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % modulus;
            }
            base = base * base % modulus;
            e >>= 1;
        }
        Ok(acc as u32)
    }

    /// `p^e`, or `None` on `u64` overflow.
    pub fn pow(self, e: u32) -> Option<u64> {
        u64::from(self.0).checked_pow(e)
    }

    /// `p^e`, with an error naming the computation on overflow.
    pub fn pow_checked(self, e: u32, what: &'static str) -> Result<u64> {
        self.pow(e).ok_or(Error::Overflow(what))
    }
}

impl TryFrom<u64> for PrimeModulus {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        PrimeModulus::new(p)
    }
}

impl From<PrimeModulus> for u64 {
    fn from(p: PrimeModulus) -> u64 {
        u64::from(p.0)
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element of F_p[X].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    p: PrimeModulus,
    coeffs: Vec<u32>,
}

impl Poly {
    pub fn zero(p: PrimeModulus) -> Self {
        Poly { p, coeffs: Vec::new() }
    }

    pub fn one(p: PrimeModulus) -> Self {
        Poly { p, coeffs: vec![1] }
    }

    /// The indeterminate `X`.
    pub fn x(p: PrimeModulus) -> Self {
        Poly::monomial(p, 1, 1)
    }

    /// `c·X^degree` with `c` reduced mod p.
    pub fn monomial(p: PrimeModulus, degree: usize, c: u32) -> Self {
        let c = c % p.get();
        if c == 0 {
            return Poly::zero(p);
        }
        let mut coeffs = vec![0; degree + 1];
        coeffs[degree] = c;
        Poly { p, coeffs }
    }

    /// Builds a polynomial from ascending coefficients, rejecting entries `>= p`.
    pub fn from_coeffs(p: PrimeModulus, coeffs: &[u64]) -> Result<Self> {
        if let Some(pos) = coeffs.iter().position(|&c| c >= u64::from(p.get())) {
            return Err(Error::InvalidArgument(format!(
                "coefficient {} at power {} is not a residue mod {}",
                coeffs[pos], pos, p
            )));
        }
        Ok(Self::from_residues(p, coeffs.iter().map(|&c| c as u32).collect()))
    }

    /// Builds a polynomial from ascending coefficients, reducing them mod p.
    pub fn from_coeffs_reduced(p: PrimeModulus, coeffs: &[u64]) -> Self {
        let m = u64::from(p.get());
        Self::from_residues(p, coeffs.iter().map(|&c| (c % m) as u32).collect())
    }

    fn from_residues(p: PrimeModulus, mut coeffs: Vec<u32>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { p, coeffs }
    }

    /// The polynomial whose coefficients are the base-p digits of `n`.
    pub fn from_int(n: u64, p: PrimeModulus) -> Self {
        let base = u64::from(p.get());
        let mut coeffs = Vec::new();
        let mut rest = n;
        while rest > 0 {
            coeffs.push((rest % base) as u32);
            rest /= base;
        }
        Poly { p, coeffs }
    }

    /// Evaluates the coefficients at `p`, the inverse of [`Poly::from_int`].
    pub fn to_int(&self) -> Result<u64> {
        let base = u64::from(self.p.get());
        let mut acc: u64 = 0;
        for &c in self.coeffs.iter().rev() {
            if c >= self.p.get() {
                return Err(Error::InvalidArgument(format!(
                    "coefficient {c} is not a residue mod {}",
                    self.p
                )));
            }
            acc = acc
                .checked_mul(base)
                .and_then(|v| v.checked_add(u64::from(c)))
                .ok_or(Error::Overflow("polynomial to integer"))?;
        }
        Ok(acc)
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    #[inline]
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// Coefficient of `X^i` (zero past the degree).
    #[inline]
    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// Degree, or `None` for the zero polynomial.
    #[inline]
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Number of stored coefficients: `degree + 1`, or 0 for the zero polynomial.
    #[inline]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    fn check_field(&self, other: &Poly) {
        assert!(
            self.p == other.p,
            "polynomials over different fields (p={} and p={})",
            self.p,
            other.p
        );
    }

    fn same_field(&self, other: &Poly) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.p.get(), other.p.get()))
        }
    }

    pub fn scale(&self, c: u32) -> Poly {
        let c = c % self.p.get();
        if c == 0 {
            return Poly::zero(self.p);
        }
        let coeffs = self.coeffs.iter().map(|&a| self.p.mul(a, c)).collect();
        Poly::from_residues(self.p, coeffs)
    }

    /// Multiplication by `X^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { p: self.p, coeffs }
    }

    /// Scales to a monic polynomial (zero stays zero).
    pub fn monic(&self) -> Poly {
        match self.coeffs.last() {
            None | Some(1) => self.clone(),
            Some(&lead) => self.scale(self.p.inv(lead).expect("nonzero leading coefficient")),
        }
    }

    /// Euclidean division: `self = q·divisor + r` with `deg r < deg divisor`.
    pub fn divmod(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        self.same_field(divisor)?;
        let dd = divisor.degree().ok_or(Error::ZeroDivisor)?;
        let p = self.p;
        if self.coeffs.len() <= dd {
            return Ok((Poly::zero(p), self.clone()));
        }
        let lead_inv = p.inv(divisor.leading())?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u32; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = p.mul(rem[i + dd], lead_inv);
            quot[i] = c;
            if c != 0 {
                for (j, &b) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] = p.sub(rem[i + j], p.mul(c, b));
                }
            }
        }
        rem.truncate(dd);
        Ok((Poly::from_residues(p, quot), Poly::from_residues(p, rem)))
    }

    pub fn rem(&self, modulus: &Poly) -> Result<Poly> {
        Ok(self.divmod(modulus)?.1)
    }

    pub fn mul_mod(&self, other: &Poly, modulus: &Poly) -> Result<Poly> {
        (self * other).rem(modulus)
    }

    pub fn pow_mod(&self, mut e: u64, modulus: &Poly) -> Result<Poly> {
        let mut base = self.rem(modulus)?;
        let mut acc = Poly::one(self.p).rem(modulus)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, modulus)?;
            }
            base = base.mul_mod(&base, modulus)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Inverse of `self` modulo `modulus`; fails when they share a factor.
    pub fn inverse_mod(&self, modulus: &Poly) -> Result<Poly> {
        let (g, s, _) = ext_gcd(self, modulus)?;
        if !g.is_one() {
            return Err(Error::NotCoprime(format!("{self} and {modulus}")));
        }
        s.rem(modulus)
    }

    /// True iff no monic polynomial of degree `1..=deg/2` divides `self`.
    pub fn is_irreducible(&self) -> Result<bool> {
        let deg = match self.degree() {
            Some(d) if d >= 1 => d,
            _ => return Err(Error::ConstantPolynomial),
        };
        for k in 1..=deg / 2 {
            for candidate in monic_of_degree(self.p, k) {
                if self.rem(&candidate)?.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Parses `"X^2+X+1"` (case-insensitive, optional spaces, optional `*`)
    /// or the ascending list form `"[1,1,1]"`.
    pub fn parse(text: &str, p: PrimeModulus) -> Result<Poly> {
        Parser { src: text.as_bytes(), pos: 0, p }.parse()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("X")?,
                (1, c) => write!(f, "{c}X")?,
                (i, 1) => write!(f, "X^{i}")?,
                (i, c) => write!(f, "{c}X^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[F_{}]({})", self.p, self)
    }
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.check_field(rhs);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.p.add(self.coeff(i), rhs.coeff(i))).collect();
        Poly::from_residues(self.p, coeffs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.check_field(rhs);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.p.sub(self.coeff(i), rhs.coeff(i))).collect();
        Poly::from_residues(self.p, coeffs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let coeffs = self.coeffs.iter().map(|&c| self.p.neg(c)).collect();
        Poly::from_residues(self.p, coeffs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.check_field(rhs);
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.p);
        }
        let p = u64::from(self.p.get());
        let mut acc = vec![0u64; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                acc[i + j] = (acc[i + j] + u64::from(a) * u64::from(b)) % p;
            }
        }
        Poly::from_residues(self.p, acc.into_iter().map(|c| c as u32).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Monic greatest common divisor. Fails when both arguments are zero.
pub fn gcd(a: &Poly, b: &Poly) -> Result<Poly> {
    a.same_field(b)?;
    if a.is_zero() && b.is_zero() {
        return Err(Error::InvalidArgument("gcd(0, 0) is undefined".into()));
    }
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_zero() {
        let r = x.rem(&y)?;
        x = y;
        y = r;
    }
    Ok(x.monic())
}

/// Extended Euclid: returns `(g, s, t)` with `g = s·a + t·b`, `g` monic.
pub fn ext_gcd(a: &Poly, b: &Poly) -> Result<(Poly, Poly, Poly)> {
    a.same_field(b)?;
    if a.is_zero() && b.is_zero() {
        return Err(Error::InvalidArgument("gcd(0, 0) is undefined".into()));
    }
    let p = a.p;
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Poly::one(p), Poly::zero(p));
    let (mut t0, mut t1) = (Poly::zero(p), Poly::one(p));
    while !r1.is_zero() {
        let (q, r) = r0.divmod(&r1)?;
        r0 = std::mem::replace(&mut r1, r);
        let s = &s0 - &(&q * &s1);
        s0 = std::mem::replace(&mut s1, s);
        let t = &t0 - &(&q * &t1);
        t0 = std::mem::replace(&mut t1, t);
    }
    let c = p.inv(r0.leading())?;
    Ok((r0.scale(c), s0.scale(c), t0.scale(c)))
}

/// All monic polynomials of exact degree `d`, in ascending integer encoding.
pub fn monic_of_degree(p: PrimeModulus, d: usize) -> impl Iterator<Item = Poly> {
    let count = p.pow(d as u32).expect("degree too large to enumerate");
    let lead = count;
    (0..count).map(move |low| Poly::from_int(lead + low, p))
}

/// `G*_{p,m}`: the nonzero polynomials of degree `< m`, ascending by encoding.
pub fn nonzero_below(p: PrimeModulus, m: u32) -> impl Iterator<Item = Poly> {
    let count = p.pow(m).expect("degree too large to enumerate");
    (1..count).map(move |n| Poly::from_int(n, p))
}

/// Monic irreducible polynomials of degree `d`, ascending by encoding.
pub fn irreducibles(p: PrimeModulus, d: usize) -> impl Iterator<Item = Poly> {
    monic_of_degree(p, d).filter(|f| f.is_irreducible().unwrap_or(false))
}

/// Degree valuation of a rational function: `deg(num) - deg(den)`, or
/// `NegInfinity` for a zero numerator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    NegInfinity,
    Finite(i64),
}

impl Valuation {
    /// `self < -d`.
    pub fn below(self, bound: i64) -> bool {
        self < Valuation::Finite(bound)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::NegInfinity => f.write_str("-inf"),
            Valuation::Finite(v) => write!(f, "{v}"),
        }
    }
}

pub fn valuation(numerator: &Poly, denominator: &Poly) -> Result<Valuation> {
    numerator.same_field(denominator)?;
    let dd = denominator.degree().ok_or(Error::ZeroDivisor)?;
    Ok(match numerator.degree() {
        None => Valuation::NegInfinity,
        Some(dn) => Valuation::Finite(dn as i64 - dd as i64),
    })
}

/// The coefficients `a_1, ..., a_T` of `X^{-1}, ..., X^{-T}` in a fractional part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPrefix {
    p: PrimeModulus,
    coeffs: Vec<u32>,
}

impl LaurentPrefix {
    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    /// `a_1, ..., a_T` (index 0 holds `a_1`).
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// `a_j` for `1 <= j <= T`.
    pub fn get(&self, j: usize) -> u32 {
        self.coeffs[j - 1]
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the first nonzero coefficient, if any within the prefix.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0).map(|i| i + 1)
    }
}

/// First `terms` Laurent coefficients of `{numerator / denominator}`.
pub fn laurent_expand(numerator: &Poly, denominator: &Poly, terms: usize) -> Result<LaurentPrefix> {
    if terms < 1 {
        return Err(Error::InvalidArgument("Laurent prefix length must be >= 1".into()));
    }
    numerator.same_field(denominator)?;
    let dd = denominator.degree().ok_or(Error::ZeroDivisor)?;
    let p = numerator.p;
    let mut coeffs = Vec::with_capacity(terms);
    if dd == 0 {
        coeffs.resize(terms, 0);
        return Ok(LaurentPrefix { p, coeffs });
    }
    let lead_inv = p.inv(denominator.leading())?;
    // Dense remainder of length dd + 1, kept with degree <= dd after each shift.
    let rem = numerator.rem(denominator)?;
    let mut cur = vec![0u32; dd + 1];
    cur[..rem.coeffs.len()].copy_from_slice(&rem.coeffs);
    for _ in 0..terms {
        cur.rotate_right(1);
        let a = p.mul(cur[dd], lead_inv);
        coeffs.push(a);
        if a != 0 {
            for (j, &b) in denominator.coeffs.iter().enumerate() {
                cur[j] = p.sub(cur[j], p.mul(a, b));
            }
        }
        debug_assert_eq!(cur[dd], 0);
    }
    Ok(LaurentPrefix { p, coeffs })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    p: PrimeModulus,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            self.pos = start;
            return self.err("expected a number");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        digits.parse::<u64>().map_err(|_| Error::Parse { pos: start, msg: "number too large".into() })
    }

    fn residue(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        let c = self.number()?;
        if c >= u64::from(self.p.get()) {
            return Err(Error::Parse {
                pos: start,
                msg: format!("coefficient {c} is not a residue mod {}", self.p),
            });
        }
        Ok(c as u32)
    }

    fn parse(mut self) -> Result<Poly> {
        let poly = match self.peek() {
            None => return self.err("empty polynomial"),
            Some(b'[') => self.list()?,
            Some(_) => self.terms()?,
        };
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        Ok(poly)
    }

    fn list(&mut self) -> Result<Poly> {
        self.pos += 1;
        let mut coeffs = Vec::new();
        if self.peek() == Some(b']') {
            self.pos += 1;
            return Ok(Poly::zero(self.p));
        }
        loop {
            coeffs.push(self.residue()?);
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b']') => {
                    self.pos += 1;
                    break;
                }
                _ => return self.err("expected ',' or ']'"),
            }
        }
        Ok(Poly::from_residues(self.p, coeffs))
    }

    fn terms(&mut self) -> Result<Poly> {
        let mut acc: Vec<u32> = Vec::new();
        loop {
            let (deg, c) = self.term()?;
            if acc.len() <= deg {
                acc.resize(deg + 1, 0);
            }
            acc[deg] = self.p.add(acc[deg], c);
            match self.peek() {
                Some(b'+') => self.pos += 1,
                _ => break,
            }
        }
        Ok(Poly::from_residues(self.p, acc))
    }

    fn term(&mut self) -> Result<(usize, u32)> {
        let coeff = match self.peek() {
            Some(b) if b.is_ascii_digit() => Some(self.residue()?),
            Some(b'x' | b'X') => None,
            _ => return self.err("expected a coefficient or X"),
        };
        if coeff.is_some() && self.peek() == Some(b'*') {
            self.pos += 1;
            if !matches!(self.peek(), Some(b'x' | b'X')) {
                return self.err("expected X after '*'");
            }
        }
        if matches!(self.peek(), Some(b'x' | b'X')) {
            self.pos += 1;
            let deg = if self.peek() == Some(b'^') {
                self.pos += 1;
                let d = self.number()?;
                usize::try_from(d).ok().filter(|&d| d <= 4096).ok_or(Error::Parse {
                    pos: self.pos,
                    msg: "exponent too large".into(),
                })?
            } else {
                1
            };
            Ok((deg, coeff.unwrap_or(1)))
        } else {
            Ok((0, coeff.expect("constant term")))
        }
    }
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

    #[test]
    fn primes() {
        assert!(PrimeModulus::new(2).is_ok());
        assert!(PrimeModulus::new(97).is_ok());
        assert_eq!(PrimeModulus::new(1), Err(Error::NotPrime(1)));
        assert_eq!(PrimeModulus::new(9), Err(Error::NotPrime(9)));
        assert_eq!(f(7).inv(3).unwrap(), 5);
        assert_eq!(f(7).inv(0), Err(Error::ZeroDivisor));
    }

    #[test]
    fn divmod_examples() {
        let (q, r) = poly("X^3+X+1", 2).divmod(&poly("X^2+1", 2)).unwrap();
        assert_eq!((q, r), (poly("X", 2), poly("1", 2)));
        let (q, r) = Poly::zero(f(2)).divmod(&poly("X", 2)).unwrap();
        assert!(q.is_zero() && r.is_zero());
        let (q, r) = poly("X^2+X+1", 2).divmod(&Poly::one(f(2))).unwrap();
        assert_eq!(q, poly("X^2+X+1", 2));
        assert!(r.is_zero());
        assert_eq!(poly("X", 2).divmod(&Poly::zero(f(2))), Err(Error::ZeroDivisor));
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(&poly("X^2+1", 2), &poly("X+1", 2)).unwrap(), poly("X+1", 2));
        assert!(gcd(&poly("X", 2), &poly("X+1", 2)).unwrap().is_one());
        assert!(gcd(&poly("2X^2+X", 3), &Poly::one(f(3))).unwrap().is_one());
        assert!(gcd(&Poly::zero(f(3)), &Poly::zero(f(3))).is_err());
        // monic output over F_3
        assert_eq!(gcd(&poly("2X+2", 3), &poly("X^2+2X+1", 3)).unwrap(), poly("X+1", 3));
    }

    #[test]
    fn ext_gcd_identity() {
        let a = poly("X^4+X+1", 2);
        let b = poly("X^2+X", 2);
        let (g, s, t) = ext_gcd(&a, &b).unwrap();
        assert_eq!(&(&s * &a) + &(&t * &b), g);
        let inv = poly("X+1", 3).inverse_mod(&poly("X^2+1", 3)).unwrap();
        assert!(inv.mul_mod(&poly("X+1", 3), &poly("X^2+1", 3)).unwrap().is_one());
        assert!(matches!(poly("X+1", 2).inverse_mod(&poly("X^2+1", 2)), Err(Error::NotCoprime(_))));
    }

    #[test]
    fn irreducibility() {
        assert!(poly("X^2+X+1", 2).is_irreducible().unwrap());
        assert!(!poly("X^2+1", 2).is_irreducible().unwrap());
        assert!(poly("X", 2).is_irreducible().unwrap());
        assert_eq!(Poly::one(f(2)).is_irreducible(), Err(Error::ConstantPolynomial));
        // Known counts of monic irreducibles: (p^d - p)/d for prime d.
        assert_eq!(irreducibles(f(2), 3).count(), 2);
        assert_eq!(irreducibles(f(2), 4).count(), 3);
        assert_eq!(irreducibles(f(3), 2).count(), 3);
        assert_eq!(irreducibles(f(2), 5).count(), 6);
    }

    #[test]
    fn int_bijection() {
        assert_eq!(Poly::from_int(6, f(2)), poly("X^2+X", 2));
        assert!(Poly::from_int(0, f(3)).is_zero());
        assert_eq!(Poly::from_int(5, f(3)), poly("X+2", 3));
        assert_eq!(poly("X+2", 3).to_int().unwrap(), 5);
        for n in 0..3u64.pow(12) {
            if n % 997 == 0 {
                assert_eq!(Poly::from_int(n, f(3)).to_int().unwrap(), n);
            }
        }
    }

    #[test]
    fn laurent_examples() {
        let den = poly("X^2+X+1", 2);
        let a = laurent_expand(&Poly::one(f(2)), &den, 6).unwrap();
        assert_eq!(a.coeffs(), &[0, 1, 1, 0, 1, 1]);
        let b = laurent_expand(&poly("X", 2), &den, 6).unwrap();
        assert_eq!(b.coeffs(), &[1, 1, 0, 1, 1, 0]);
        let z = laurent_expand(&Poly::zero(f(2)), &den, 4).unwrap();
        assert_eq!(z.coeffs(), &[0, 0, 0, 0]);
        assert!(laurent_expand(&Poly::one(f(2)), &den, 0).is_err());
        assert_eq!(laurent_expand(&Poly::one(f(2)), &Poly::zero(f(2)), 3), Err(Error::ZeroDivisor));
        // numerator of higher degree is reduced first
        let c = laurent_expand(&poly("X^3+X+1", 2), &den, 6).unwrap();
        assert_eq!(c, b);
    }

    #[test]
    fn valuation_examples() {
        let den = poly("X^2+X+1", 2);
        assert_eq!(valuation(&poly("X", 2), &den).unwrap(), Valuation::Finite(-1));
        assert_eq!(valuation(&Poly::zero(f(2)), &den).unwrap(), Valuation::NegInfinity);
        assert_eq!(valuation(&poly("X^2+1", 2), &den).unwrap(), Valuation::Finite(0));
        assert_eq!(valuation(&den, &Poly::zero(f(2))), Err(Error::ZeroDivisor));
        assert!(Valuation::NegInfinity.below(-100));
        assert!(Valuation::Finite(-3).below(-2));
        assert!(!Valuation::Finite(-2).below(-2));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(poly("x^2 + x + 1", 2).coeffs(), &[1, 1, 1]);
        assert_eq!(poly("[0,1]", 3), Poly::x(f(3)));
        assert_eq!(Poly::from_coeffs(f(2), &[1, 0, 1]).unwrap().to_string(), "X^2+1");
        assert_eq!(Poly::zero(f(2)).to_string(), "0");
        assert_eq!(Poly::one(f(5)).to_string(), "1");
        assert_eq!(poly("2*X^3 + 2x + 1", 3).to_string(), "2X^3+2X+1");
        assert_eq!(poly("[ ]", 3), Poly::zero(f(3)));
        assert_eq!(poly("0", 3), Poly::zero(f(3)));
        for bad in ["", "X^", "X+", "2X^2", "[1,2", "X*X", "X^2+X+1 junk", "3"] {
            let err = Poly::parse(bad, f(2));
            assert!(matches!(err, Err(Error::Parse { .. })), "{bad:?} parsed as {err:?}");
        }
        match Poly::parse("X+5", f(3)) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("{other:?}"),
        }
    }
}
