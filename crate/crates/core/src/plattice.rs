//! Polynomial lattice point sets `P(q(X), p(X))`, their generating
//! matrices, Korobov-type generators and aligned sub-lattices.

use crate::error::{Error, Result};
use crate::gfpoly::{gcd, laurent_expand, LaurentPrefix, PrimeModulus, Poly};
use crate::seqgen::{BasePRational, ResidueClass};

/// A monic irreducible modulus `p(X)` of degree `m` and nonzero generators
/// `q_1, ..., q_t` of degree `< m`.
#[derive(Clone, Debug)]
pub struct LatticeConfig {
    p: PrimeModulus,
    px: Poly,
    generators: Vec<Poly>,
    // {q_i / p(X)} to 2m-1 terms, shared by the Hankel matrices.
    prefixes: Vec<LaurentPrefix>,
}

impl LatticeConfig {
    pub fn new(px: Poly, generators: Vec<Poly>) -> Result<Self> {
        let p = px.modulus();
        let m = match px.degree() {
            Some(m) if m >= 1 => m,
            _ => return Err(Error::ConstantPolynomial),
        };
        if !px.is_monic() {
            return Err(Error::Config(format!("lattice modulus {px} must be monic")));
        }
        if !px.is_irreducible()? {
            return Err(Error::Reducible(px.to_string()));
        }
        let mut prefixes = Vec::with_capacity(generators.len());
        for q in &generators {
            if q.modulus() != p {
                return Err(Error::FieldMismatch(p.get(), q.modulus().get()));
            }
            if q.is_zero() {
                return Err(Error::Config("zero generator polynomial".into()));
            }
            if q.len() > m {
                return Err(Error::Config(format!("generator {q} must have degree < {m}")));
            }
            prefixes.push(laurent_expand(q, &px, 2 * m - 1)?);
        }
        Ok(LatticeConfig { p, px, generators, prefixes })
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    /// The lattice modulus `p(X)`.
    pub fn px(&self) -> &Poly {
        &self.px
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    /// Degree `m` of `p(X)`.
    pub fn m(&self) -> u32 {
        self.px.degree().expect("nonconstant modulus") as u32
    }

    /// Number of lattice coordinates `t`.
    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    /// `p^m`.
    pub fn size(&self) -> u64 {
        self.p.pow(self.m()).expect("lattice size fits u64")
    }

    fn check_index(&self, n: u64) -> Result<()> {
        let size = self.p.pow_checked(self.m(), "lattice size")?;
        if n >= size {
            return Err(Error::IndexOutOfRange { index: n, limit: size });
        }
        Ok(())
    }
}

/// The `n`-th lattice point from the truncated expansions of `{n(X) q_i(X) / p(X)}`.
pub fn plattice_point_laurent(n: u64, cfg: &LatticeConfig) -> Result<Vec<BasePRational>> {
    cfg.check_index(n)?;
    let nx = Poly::from_int(n, cfg.p);
    let m = cfg.m() as usize;
    cfg.generators
        .iter()
        .map(|q| {
            let prefix = laurent_expand(&(&nx * q), &cfg.px, m)?;
            BasePRational::from_digits(prefix.coeffs(), cfg.p)
        })
        .collect()
}

/// Hankel matrix `C[r][c] = a_{r+c+1}` of the expansion of `{q_i / p(X)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingMatrix {
    p: PrimeModulus,
    entries: Vec<Vec<u32>>,
}

impl GeneratingMatrix {
    fn from_prefix(prefix: &LaurentPrefix, rows: usize, cols: usize) -> Self {
        let entries = (0..rows)
            .map(|r| (0..cols).map(|c| prefix.coeffs()[r + c]).collect())
            .collect();
        GeneratingMatrix { p: prefix.modulus(), entries }
    }

    pub fn entries(&self) -> &[Vec<u32>] {
        &self.entries
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    /// Matrix-vector product over F_p; `digits` may be shorter than the column count.
    pub fn apply(&self, digits: &[u32]) -> Vec<u32> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .zip(digits)
                    .fold(0u32, |acc, (&a, &b)| self.p.add(acc, self.p.mul(a, b)))
            })
            .collect()
    }

    /// Transposed product `C^T k` over F_p.
    pub fn apply_transpose(&self, digits: &[u32]) -> Vec<u32> {
        let cols = self.entries.first().map_or(0, Vec::len);
        let mut out = vec![0u32; cols];
        for (row, &k) in self.entries.iter().zip(digits) {
            if k == 0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(row) {
                *o = self.p.add(*o, self.p.mul(a, k));
            }
        }
        out
    }
}

pub fn build_generating_matrix(q: &Poly, px: &Poly) -> Result<GeneratingMatrix> {
    let m = match px.degree() {
        Some(m) if m >= 1 => m,
        _ => return Err(Error::ConstantPolynomial),
    };
    if q.len() > m {
        return Err(Error::Config(format!("generator {q} must have degree < {m}")));
    }
    let prefix = laurent_expand(q, px, 2 * m - 1)?;
    Ok(GeneratingMatrix::from_prefix(&prefix, m, m))
}

impl LatticeConfig {
    /// Generating matrices `C_1, ..., C_t` (from the cached prefixes).
    pub fn generating_matrices(&self) -> Vec<GeneratingMatrix> {
        let m = self.m() as usize;
        self.prefixes
            .iter()
            .map(|a| GeneratingMatrix::from_prefix(a, m, m))
            .collect()
    }
}

/// Base-p digits `n_0, ..., n_{len-1}` of `n`, least significant first.
pub(crate) fn int_digits(n: u64, p: PrimeModulus, len: usize) -> Vec<u32> {
    let base = u64::from(p.get());
    let mut rest = n;
    (0..len)
        .map(|_| {
            let d = (rest % base) as u32;
            rest /= base;
            d
        })
        .collect()
}

/// The `n`-th lattice point from `C_i · (n_0, ..., n_{m-1})^T`.
pub fn plattice_point_matrix(n: u64, matrices: &[GeneratingMatrix]) -> Result<Vec<BasePRational>> {
    let Some(first) = matrices.first() else {
        return Ok(Vec::new());
    };
    let p = first.p;
    let m = first.rows();
    let size = p.pow_checked(m as u32, "lattice size")?;
    if n >= size {
        return Err(Error::IndexOutOfRange { index: n, limit: size });
    }
    let digits = int_digits(n, p, m);
    matrices
        .iter()
        .map(|c| BasePRational::from_digits(&c.apply(&digits), p))
        .collect()
}

/// Korobov generators `(g, g^2, ..., g^t)` reduced modulo `p(X)`.
pub fn korobov_qvec(g: &Poly, t: usize, px: &Poly) -> Result<Vec<Poly>> {
    if g.is_zero() {
        return Err(Error::Config("Korobov generator g must be nonzero".into()));
    }
    let m = px.degree().ok_or(Error::ZeroDivisor)?;
    if g.len() > m {
        return Err(Error::Config(format!("Korobov generator {g} must have degree < {m}")));
    }
    let mut out = Vec::with_capacity(t);
    let mut power = Poly::one(g.modulus());
    for _ in 0..t {
        power = power.mul_mod(g, px)?;
        out.push(power.clone());
    }
    Ok(out)
}

/// An aligned block `[block_start, block_start + p^u)` intersected with a
/// residue class `n(X) ≡ R (mod B)`, `deg B <= u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubLatticeSpec {
    u: u32,
    block_start: u64,
    class: ResidueClass,
}

impl SubLatticeSpec {
    pub fn new(u: u32, block_start: u64, class: ResidueClass) -> Result<Self> {
        let p = class.modulus().modulus();
        let block = p.pow_checked(u, "block length")?;
        if block_start % block != 0 {
            return Err(Error::Config(format!(
                "block start {block_start} is not a multiple of p^{u}"
            )));
        }
        let deg_b = class.modulus().degree().unwrap_or(0) as u32;
        if deg_b > u {
            return Err(Error::Config(format!(
                "class modulus degree {deg_b} exceeds block level {u}"
            )));
        }
        Ok(SubLatticeSpec { u, block_start, class })
    }

    pub fn u(&self) -> u32 {
        self.u
    }

    pub fn block_start(&self) -> u64 {
        self.block_start
    }

    pub fn class(&self) -> &ResidueClass {
        &self.class
    }

    /// `d = u - deg B`; the sub-lattice has `p^d` points.
    pub fn d(&self) -> u32 {
        self.u - self.class.modulus().degree().unwrap_or(0) as u32
    }

    fn prime(&self) -> PrimeModulus {
        self.class.modulus().modulus()
    }

    /// The fixed polynomial `C(X)` with `k(X) = l(X) + X^d C(X)` for every
    /// `n(X) = k(X) B(X) + R(X)` in the block.
    pub fn block_quotient(&self) -> Poly {
        let p = self.prime();
        let block = p.pow(self.u).expect("validated");
        let b = self.class.modulus();
        let k = Poly::from_int(self.block_start / block, p);
        let (c, _) = k
            .shift(b.degree().unwrap_or(0))
            .divmod(b)
            .expect("monic modulus");
        c
    }

    /// `X^d C(X) B(X) + R(X)`: the index polynomial at `l = 0`.
    pub fn shift_poly(&self) -> Poly {
        let b = self.class.modulus();
        &(&self.block_quotient().shift(self.d() as usize) * b) + self.class.residue()
    }

    pub(crate) fn validate_for(&self, cfg: &LatticeConfig) -> Result<()> {
        if self.prime() != cfg.p {
            return Err(Error::FieldMismatch(cfg.p.get(), self.prime().get()));
        }
        if self.u > cfg.m() {
            return Err(Error::Config(format!(
                "block level {} exceeds lattice degree {}",
                self.u,
                cfg.m()
            )));
        }
        let block = cfg.p.pow(self.u).expect("u <= m");
        if self.block_start + block > cfg.size() {
            return Err(Error::IndexOutOfRange { index: self.block_start, limit: cfg.size() });
        }
        if !gcd(self.class.modulus(), &cfg.px)?.is_one() {
            return Err(Error::NotCoprime(format!(
                "{} and {}",
                self.class.modulus(),
                cfg.px
            )));
        }
        Ok(())
    }
}

/// Indices `n` of the sub-lattice, ascending, by direct enumeration of the block.
pub fn sublattice_indices(spec: &SubLatticeSpec, cfg: &LatticeConfig) -> Result<Vec<u64>> {
    spec.validate_for(cfg)?;
    let block = cfg.p.pow(spec.u).expect("u <= m");
    Ok((spec.block_start..spec.block_start + block)
        .filter(|&n| spec.class.contains_index(n))
        .collect())
}

/// The sub-lattice points `{y_n : n in block, n(X) ≡ R (mod B)}` in ascending `n`.
pub fn sublattice_enumerate(spec: &SubLatticeSpec, cfg: &LatticeConfig) -> Result<Vec<Vec<BasePRational>>> {
    sublattice_indices(spec, cfg)?
        .into_iter()
        .map(|n| plattice_point_laurent(n, cfg))
        .collect()
}

/// Affine digit map `y^{(i)}_l = C_{i,d} l + r^{(i)}` over `l ∈ F_p^d`.
#[derive(Clone, Debug)]
pub struct AffineSubLattice {
    p: PrimeModulus,
    d: u32,
    matrices: Vec<GeneratingMatrix>,
    shifts: Vec<Vec<u32>>,
}

impl AffineSubLattice {
    pub fn d(&self) -> u32 {
        self.d
    }

    /// `C_{i,d}`: `m × d`, the first `d` columns of the Hankel matrix of `{B q_i / p(X)}`.
    pub fn matrices(&self) -> &[GeneratingMatrix] {
        &self.matrices
    }

    /// `r^{(i)}`: the `m`-prefix of `{(X^d C B + R) q_i / p(X)}`.
    pub fn shifts(&self) -> &[Vec<u32>] {
        &self.shifts
    }

    /// Digit vectors of the `l`-th point, one per coordinate.
    pub fn digits(&self, l: u64) -> Vec<Vec<u32>> {
        let ld = int_digits(l, self.p, self.d as usize);
        self.matrices
            .iter()
            .zip(&self.shifts)
            .map(|(c, r)| {
                c.apply(&ld)
                    .iter()
                    .zip(r)
                    .map(|(&a, &b)| self.p.add(a, b))
                    .collect()
            })
            .collect()
    }

    /// All `p^d` points, ordered by the integer encoding of `l`.
    pub fn points(&self) -> Result<Vec<Vec<BasePRational>>> {
        let count = self.p.pow_checked(self.d, "sub-lattice size")?;
        (0..count)
            .map(|l| {
                self.digits(l)
                    .iter()
                    .map(|u| BasePRational::from_digits(u, self.p))
                    .collect()
            })
            .collect()
    }
}

pub fn sublattice_affine(spec: &SubLatticeSpec, cfg: &LatticeConfig) -> Result<AffineSubLattice> {
    spec.validate_for(cfg)?;
    let m = cfg.m() as usize;
    let d = spec.d() as usize;
    let b = spec.class.modulus();
    let shift = spec.shift_poly();
    let mut matrices = Vec::with_capacity(cfg.dim());
    let mut shifts = Vec::with_capacity(cfg.dim());
    for q in &cfg.generators {
        let a = laurent_expand(&(b * q), &cfg.px, m + d.max(1) - 1)?;
        matrices.push(GeneratingMatrix::from_prefix(&a, m, d));
        shifts.push(laurent_expand(&(&shift * q), &cfg.px, m)?.coeffs().to_vec());
    }
    Ok(AffineSubLattice { p: cfg.p, d: spec.d(), matrices, shifts })
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

    fn values(points: &[BasePRational]) -> Vec<String> {
        points.iter().map(|c| c.reduced().to_string()).collect()
    }

    fn lattice_x() -> LatticeConfig {
        LatticeConfig::new(poly("X^2+X+1", 2), vec![poly("X", 2)]).unwrap()
    }

    #[test]
    fn laurent_points() {
        let cfg = lattice_x();
        assert_eq!(values(&plattice_point_laurent(1, &cfg).unwrap()), ["3/4"]);
        assert_eq!(values(&plattice_point_laurent(0, &cfg).unwrap()), ["0/1"]);
        assert_eq!(values(&plattice_point_laurent(2, &cfg).unwrap()), ["1/2"]);
        assert_eq!(values(&plattice_point_laurent(3, &cfg).unwrap()), ["1/4"]);
        assert!(matches!(
            plattice_point_laurent(4, &cfg),
            Err(Error::IndexOutOfRange { index: 4, limit: 4 })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(matches!(
            LatticeConfig::new(poly("X^2+1", 2), vec![poly("X", 2)]),
            Err(Error::Reducible(_))
        ));
        assert!(LatticeConfig::new(poly("X^2+X+1", 2), vec![Poly::zero(f(2))]).is_err());
        assert!(LatticeConfig::new(poly("X^2+X+1", 2), vec![poly("X^2", 2)]).is_err());
        assert!(LatticeConfig::new(poly("2X^2+X+1", 3), vec![poly("X", 3)]).is_err());
    }

    #[test]
    fn generating_matrix_examples() {
        let px = poly("X^2+X+1", 2);
        let c = build_generating_matrix(&poly("X", 2), &px).unwrap();
        assert_eq!(c.entries(), &[vec![1, 1], vec![1, 0]]);
        let c1 = build_generating_matrix(&Poly::one(f(2)), &px).unwrap();
        assert_eq!(c1.entries(), &[vec![0, 1], vec![1, 1]]);
        // 1/(X^3+X+1) = X^-3 + X^-5 + ... over F_2: prefix (0,0,1,0,1)
        let c3 = build_generating_matrix(&Poly::one(f(2)), &poly("X^3+X+1", 2)).unwrap();
        assert_eq!(c3.entries(), &[vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 1]]);
    }

    #[test]
    fn matrix_points() {
        let cfg = lattice_x();
        let mats = cfg.generating_matrices();
        assert_eq!(values(&plattice_point_matrix(1, &mats).unwrap()), ["3/4"]);
        assert_eq!(values(&plattice_point_matrix(0, &mats).unwrap()), ["0/1"]);
        assert_eq!(values(&plattice_point_matrix(3, &mats).unwrap()), ["1/4"]);
        assert!(plattice_point_matrix(4, &mats).is_err());
    }

    #[test]
    fn korobov_examples() {
        let px = poly("X^2+X+1", 2);
        assert_eq!(korobov_qvec(&poly("X", 2), 2, &px).unwrap(), vec![poly("X", 2), poly("X+1", 2)]);
        assert_eq!(korobov_qvec(&poly("1", 2), 3, &px).unwrap(), vec![poly("1", 2); 3]);
        assert_eq!(korobov_qvec(&poly("X+1", 2), 2, &px).unwrap(), vec![poly("X+1", 2), poly("X", 2)]);
        assert!(korobov_qvec(&Poly::zero(f(2)), 2, &px).is_err());
    }

    #[test]
    fn sublattice_examples() {
        let cfg = lattice_x();
        let full = SubLatticeSpec::new(2, 0, ResidueClass::everything(f(2))).unwrap();
        assert_eq!(sublattice_enumerate(&full, &cfg).unwrap().len(), 4);
        let even = SubLatticeSpec::new(2, 0, ResidueClass::new(poly("X", 2), Poly::zero(f(2))).unwrap()).unwrap();
        let pts: Vec<_> = sublattice_enumerate(&even, &cfg).unwrap().into_iter().flatten().collect();
        assert_eq!(values(&pts), ["0/1", "1/2"]);
        let odd = SubLatticeSpec::new(2, 0, ResidueClass::new(poly("X", 2), poly("1", 2)).unwrap()).unwrap();
        let pts: Vec<_> = sublattice_enumerate(&odd, &cfg).unwrap().into_iter().flatten().collect();
        assert_eq!(values(&pts), ["3/4", "1/4"]);
        let bad = SubLatticeSpec::new(2, 0, ResidueClass::new(poly("X^2+X+1", 2), Poly::zero(f(2))).unwrap()).unwrap();
        assert!(matches!(sublattice_enumerate(&bad, &cfg), Err(Error::NotCoprime(_))));
        assert!(SubLatticeSpec::new(2, 2, ResidueClass::everything(f(2))).is_err());
        assert!(SubLatticeSpec::new(0, 0, ResidueClass::new(poly("X", 2), Poly::zero(f(2))).unwrap()).is_err());
    }

    #[test]
    fn affine_examples() {
        let cfg = lattice_x();
        let even = SubLatticeSpec::new(2, 0, ResidueClass::new(poly("X", 2), Poly::zero(f(2))).unwrap()).unwrap();
        let aff = sublattice_affine(&even, &cfg).unwrap();
        let pts: Vec<_> = aff.points().unwrap().into_iter().flatten().collect();
        assert_eq!(values(&pts), ["0/1", "1/2"]);
        let full = SubLatticeSpec::new(2, 0, ResidueClass::everything(f(2))).unwrap();
        let aff = sublattice_affine(&full, &cfg).unwrap();
        assert_eq!(aff.shifts(), &[vec![0, 0]]);
        let mut a: Vec<_> = aff.points().unwrap();
        let mut b = sublattice_enumerate(&full, &cfg).unwrap();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        // d = 0: a single point, the shift alone
        let single = SubLatticeSpec::new(1, 2, ResidueClass::new(poly("X", 2), Poly::zero(f(2))).unwrap()).unwrap();
        let aff = sublattice_affine(&single, &cfg).unwrap();
        assert_eq!(aff.d(), 0);
        assert_eq!(aff.points().unwrap(), sublattice_enumerate(&single, &cfg).unwrap());
    }

    #[test]
    fn block_quotient_reproduces_block() {
        let p = f(3);
        let b = poly("X^2+1", 3);
        for block_start in [0u64, 9, 18, 27, 72] {
            for r in 0..9u64 {
                let class = ResidueClass::new(b.clone(), Poly::from_int(r, p)).unwrap();
                let spec = SubLatticeSpec::new(2, block_start, class).unwrap();
                let n = spec.shift_poly().to_int().unwrap();
                assert!(n >= block_start && n < block_start + 9, "start {block_start} r {r} n {n}");
            }
        }
    }
}
