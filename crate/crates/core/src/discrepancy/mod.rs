//! Exact star discrepancy of finite point sets with base-p rational
//! coordinates, plus the superposition and prefix-reduction bounds.
//!
//! Coordinates are rescaled per dimension to integers over a common
//! denominator `p^{L_j}`, so every comparison and every local discrepancy
//! is evaluated in exact integer arithmetic.

mod certificate;
pub mod pointfile;

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gfpoly::PrimeModulus;
use crate::seqgen::BasePRational;
use crate::Rational;

pub use certificate::{hybrid_bound_certificate, Certificate, LevelRecord, ShapeRecord};

/// Largest supported dimension for the exact oracle.
pub const MAX_EXACT_DIM: usize = 4;

/// Default cap on corner-cell evaluations for [`star_discrepancy_exact`].
pub const DEFAULT_ORACLE_BUDGET: u64 = 100_000_000;

/// A finite point set in `[0, 1)^dim` over a common prime `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSetD {
    dim: usize,
    p: PrimeModulus,
    points: Vec<Vec<BasePRational>>,
}

impl PointSetD {
    pub fn new(dim: usize, p: PrimeModulus, points: Vec<Vec<BasePRational>>) -> Result<Self> {
        for pt in &points {
            if pt.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: pt.len() });
            }
            if let Some(c) = pt.iter().find(|c| c.modulus() != p) {
                return Err(Error::FieldMismatch(p.get(), c.modulus().get()));
            }
        }
        Ok(PointSetD { dim, p, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn points(&self) -> &[Vec<BasePRational>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The first `n` points.
    pub fn prefix(&self, n: usize) -> PointSetD {
        PointSetD { dim: self.dim, p: self.p, points: self.points[..n.min(self.len())].to_vec() }
    }

    /// Keeps coordinates `from..` of every point.
    pub fn drop_leading(&self, from: usize) -> PointSetD {
        PointSetD {
            dim: self.dim.saturating_sub(from),
            p: self.p,
            points: self.points.iter().map(|pt| pt[from.min(pt.len())..].to_vec()).collect(),
        }
    }
}

fn check_corner(points: &PointSetD, corner: &[Rational]) -> Result<()> {
    if corner.len() != points.dim {
        return Err(Error::DimensionMismatch { expected: points.dim, got: corner.len() });
    }
    if corner.iter().any(|c| *c <= Rational::zero() || *c > Rational::from_integer(1)) {
        return Err(Error::InvalidArgument("corner coordinates must lie in (0, 1]".into()));
    }
    Ok(())
}

/// `#{n : z_n ∈ ∏ [0, corner_i)}`.
pub fn counting_function(points: &PointSetD, corner: &[Rational]) -> Result<u64> {
    check_corner(points, corner)?;
    Ok(points
        .points
        .iter()
        .filter(|pt| pt.iter().zip(corner).all(|(x, c)| x.to_rational() < *c))
        .count() as u64)
}

/// `#{n : z_n ∈ ∏ [0, corner_i]}` (closed upper faces).
pub fn counting_function_closed(points: &PointSetD, corner: &[Rational]) -> Result<u64> {
    if corner.len() != points.dim {
        return Err(Error::DimensionMismatch { expected: points.dim, got: corner.len() });
    }
    Ok(points
        .points
        .iter()
        .filter(|pt| pt.iter().zip(corner).all(|(x, c)| x.to_rational() <= *c))
        .count() as u64)
}

/// Points rescaled to integers over per-dimension denominators.
struct Scaled {
    n: usize,
    dens: Vec<u128>,
    // coords[i][j]: point i, dimension j
    coords: Vec<Vec<u128>>,
    denom_product: u128,
}

impl Scaled {
    fn new(points: &PointSetD) -> Result<Self> {
        let exps: Vec<u32> = (0..points.dim)
            .map(|j| points.points.iter().map(|pt| pt[j].exponent()).max().unwrap_or(0))
            .collect();
        let dens = exps
            .iter()
            .map(|&e| points.p.pow_checked(e, "coordinate denominator").map(u128::from))
            .collect::<Result<Vec<_>>>()?;
        let denom_product = dens
            .iter()
            .try_fold(1u128, |acc, &d| acc.checked_mul(d))
            .and_then(|d| d.checked_mul(points.len() as u128 + 1))
            .filter(|&v| v < (1u128 << 120))
            .ok_or(Error::Overflow("discrepancy denominator"))?
            / (points.len() as u128 + 1);
        let coords = points
            .points
            .iter()
            .map(|pt| pt.iter().zip(&exps).map(|(x, &e)| x.scaled_to(e)).collect())
            .collect();
        Ok(Scaled { n: points.len(), dens, coords, denom_product })
    }

    fn grid(&self, j: usize) -> Vec<u128> {
        let mut g: Vec<u128> = self.coords.iter().map(|c| c[j]).collect();
        g.push(self.dens[j]);
        g.sort_unstable();
        g.dedup();
        g
    }
}

/// Evaluation cost of the critical-corner sweep: `N · ∏_{j < dim-1} |Γ_j|`.
fn sweep_cost(grids: &[Vec<u128>], n: usize) -> u128 {
    let prefix: u128 = grids[..grids.len() - 1].iter().map(|g| g.len() as u128).product();
    prefix.saturating_mul(n.max(1) as u128)
}

struct Sweep<'a> {
    s: &'a Scaled,
    grids: &'a [Vec<u128>],
    last: usize,
}

impl Sweep<'_> {
    /// Max over corners of `max(N·vol − A_open·D, A_closed·D − N·vol)` in units of `1/(N·D)`.
    fn run(&self, level: usize, open: &[usize], closed: &[usize], vol: u128) -> i128 {
        let n = self.s.n as i128;
        let dprod = self.s.denom_product as i128;
        if level == self.last {
            // open/closed are sorted by the last coordinate
            let (mut io, mut ic) = (0usize, 0usize);
            let mut best = i128::MIN;
            for &c in &self.grids[level] {
                while io < open.len() && self.s.coords[open[io]][level] < c {
                    io += 1;
                }
                while ic < closed.len() && self.s.coords[closed[ic]][level] <= c {
                    ic += 1;
                }
                let v = (vol * c) as i128 * n;
                best = best.max(v - io as i128 * dprod).max(ic as i128 * dprod - v);
            }
            return best;
        }
        let mut best = i128::MIN;
        let mut o = Vec::with_capacity(open.len());
        let mut cl = Vec::with_capacity(closed.len());
        for &c in &self.grids[level] {
            o.clear();
            cl.clear();
            o.extend(open.iter().copied().filter(|&i| self.s.coords[i][level] < c));
            cl.extend(closed.iter().copied().filter(|&i| self.s.coords[i][level] <= c));
            best = best.max(self.run(level + 1, &o, &cl, vol * c));
        }
        best
    }
}

/// Exact star discrepancy with the default oracle budget.
pub fn star_discrepancy_exact(points: &PointSetD) -> Result<Rational> {
    star_discrepancy_exact_with_budget(points, DEFAULT_ORACLE_BUDGET)
}

/// Exact `D*_N` by sweeping the critical-corner grid: per dimension the
/// distinct coordinate values together with 1. Each corner is scored by
/// `vol − A_open/N` and `A_closed/N − vol`.
pub fn star_discrepancy_exact_with_budget(points: &PointSetD, budget: u64) -> Result<Rational> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty point set".into()));
    }
    if points.dim == 0 {
        return Err(Error::InvalidArgument("point set has dimension 0".into()));
    }
    if points.dim > MAX_EXACT_DIM {
        return Err(Error::BudgetExceeded {
            what: "exact star discrepancy dimension",
            needed: points.dim as u128,
            budget: MAX_EXACT_DIM as u128,
            hint: "use the certificate bound instead",
        });
    }
    let s = Scaled::new(points)?;
    let grids: Vec<Vec<u128>> = (0..points.dim).map(|j| s.grid(j)).collect();
    let cost = sweep_cost(&grids, s.n);
    if cost > u128::from(budget) {
        return Err(Error::BudgetExceeded {
            what: "exact star discrepancy",
            needed: cost,
            budget: u128::from(budget),
            hint: "use the 1-D fast path, fewer points, or the certificate bound",
        });
    }
    let last = points.dim - 1;
    let mut order: Vec<usize> = (0..s.n).collect();
    order.sort_by_key(|&i| s.coords[i][last]);
    let sweep = Sweep { s: &s, grids: &grids, last };
    let best = if last == 0 {
        sweep.run(0, &order, &order, 1)
    } else {
        grids[0]
            .par_iter()
            .map(|&c| {
                let o: Vec<usize> = order.iter().copied().filter(|&i| s.coords[i][0] < c).collect();
                let cl: Vec<usize> = order.iter().copied().filter(|&i| s.coords[i][0] <= c).collect();
                sweep.run(1, &o, &cl, c)
            })
            .max()
            .expect("grid contains 1")
    };
    Ok(Rational::new(best, s.n as i128 * s.denom_product as i128))
}

/// One-dimensional `D*_N = max_i max(i/N − x_(i), x_(i) − (i−1)/N)` over sorted points.
pub fn star_discrepancy_1d(points: &PointSetD) -> Result<Rational> {
    if points.dim != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: points.dim });
    }
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty point set".into()));
    }
    let mut xs: Vec<Rational> = points.points.iter().map(|pt| pt[0].to_rational()).collect();
    xs.sort();
    let n = xs.len() as i128;
    Ok(xs
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let i = i as i128 + 1;
            let above = Rational::new(i, n) - x;
            let below = x - Rational::new(i - 1, n);
            above.max(below)
        })
        .max()
        .expect("nonempty"))
}

/// `Σ N_i D*_{N_i}`, an upper bound on `N D*_N` of the superposition.
pub fn superposition_bound(parts: &[(u64, Rational)]) -> Rational {
    parts
        .iter()
        .fold(Rational::zero(), |acc, (n, d)| acc + Rational::from_integer(i128::from(*n)) * d)
}

/// `Ñ · D*_Ñ` of every prefix `Ñ = 1, ..., N`, in order.
pub fn prefix_discrepancies(points: &PointSetD, budget: u64) -> Result<Vec<Rational>> {
    (1..=points.len())
        .map(|n| {
            let prefix = points.prefix(n);
            let d = if points.dim == 1 {
                star_discrepancy_1d(&prefix)?
            } else {
                star_discrepancy_exact_with_budget(&prefix, budget)?
            };
            Ok(d * Rational::from_integer(n as i128))
        })
        .collect()
}

/// For anchored points `(n/N, w_n)`: `max_Ñ Ñ·D*_Ñ(w_0..w_{Ñ-1}) + 1 >= N·D*_N`.
pub fn prefix_reduction_bound(points: &PointSetD) -> Result<Rational> {
    prefix_reduction_bound_with_budget(points, DEFAULT_ORACLE_BUDGET)
}

pub fn prefix_reduction_bound_with_budget(points: &PointSetD, budget: u64) -> Result<Rational> {
    if points.dim < 2 {
        return Err(Error::InvalidArgument("anchored point set needs at least 2 coordinates".into()));
    }
    let n = points.len() as i128;
    for (i, pt) in points.points.iter().enumerate() {
        if pt[0].to_rational() != Rational::new(i as i128, n) {
            return Err(Error::InvalidArgument(format!(
                "point {i} is not anchored: first coordinate {} != {i}/{n}",
                pt[0]
            )));
        }
    }
    let rest = points.drop_leading(1);
    let best = prefix_discrepancies(&rest, budget)?
        .into_iter()
        .max()
        .unwrap_or_else(Rational::zero);
    Ok(best + Rational::from_integer(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> PrimeModulus {
        PrimeModulus::new(2).unwrap()
    }

    fn set1d(vals: &[(u64, u32)]) -> PointSetD {
        let pts = vals
            .iter()
            .map(|&(a, e)| vec![BasePRational::new(a, e, two()).unwrap()])
            .collect();
        PointSetD::new(1, two(), pts).unwrap()
    }

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn exact_examples() {
        assert_eq!(star_discrepancy_exact(&set1d(&[(0, 0)])).unwrap(), q(1, 1));
        assert_eq!(star_discrepancy_exact(&set1d(&[(1, 2), (3, 2)])).unwrap(), q(1, 4));
        let four = set1d(&[(0, 2), (1, 2), (2, 2), (3, 2)]);
        assert_eq!(star_discrepancy_exact(&four).unwrap(), q(1, 4));
    }

    #[test]
    fn one_dimensional_examples() {
        assert_eq!(star_discrepancy_1d(&set1d(&[(0, 0), (1, 1)])).unwrap(), q(1, 2));
        assert_eq!(star_discrepancy_1d(&set1d(&[(1, 1)])).unwrap(), q(1, 2));
        assert_eq!(star_discrepancy_1d(&set1d(&[(0, 0)])).unwrap(), q(1, 1));
        let empty = PointSetD::new(1, two(), vec![]).unwrap();
        assert!(star_discrepancy_1d(&empty).is_err());
        assert!(star_discrepancy_exact(&empty).is_err());
    }

    #[test]
    fn counting() {
        let pts = set1d(&[(0, 0), (1, 1)]);
        assert_eq!(counting_function(&pts, &[q(1, 1)]).unwrap(), 2);
        assert_eq!(counting_function(&pts, &[q(1, 2)]).unwrap(), 1);
        assert_eq!(counting_function_closed(&pts, &[q(1, 2)]).unwrap(), 2);
        let origin = PointSetD::new(2, two(), vec![vec![BasePRational::zero(two()); 2]]).unwrap();
        assert_eq!(counting_function(&origin, &[q(1, 2), q(1, 2)]).unwrap(), 1);
        assert!(counting_function(&origin, &[q(1, 2)]).is_err());
        assert!(counting_function(&origin, &[q(0, 1), q(1, 2)]).is_err());
    }

    #[test]
    fn two_dimensional_single_point() {
        // the closed box [0,1/2]^2 holds the point with volume 1/4
        let pt = vec![BasePRational::new(1, 1, two()).unwrap(); 2];
        let set = PointSetD::new(2, two(), vec![pt]).unwrap();
        assert_eq!(star_discrepancy_exact(&set).unwrap(), q(3, 4));
    }

    #[test]
    fn superposition() {
        assert_eq!(superposition_bound(&[(3, q(1, 3))]), q(1, 1));
        assert_eq!(superposition_bound(&[(2, q(1, 2)), (2, q(1, 4))]), q(3, 2));
        assert_eq!(superposition_bound(&[]), q(0, 1));
    }

    #[test]
    fn prefix_reduction() {
        let w = BasePRational::new(1, 2, two()).unwrap();
        let single = PointSetD::new(2, two(), vec![vec![BasePRational::zero(two()), w]]).unwrap();
        // D*_1({1/4}) = 3/4
        assert_eq!(prefix_reduction_bound(&single).unwrap(), q(7, 4));
        let skewed = PointSetD::new(2, two(), vec![vec![w, w]]).unwrap();
        assert!(prefix_reduction_bound(&skewed).is_err());
    }

    #[test]
    fn budget_and_dimension_limits() {
        let pts: Vec<_> = (0..16u64)
            .map(|n| vec![BasePRational::new(n, 4, two()).unwrap(); 3])
            .collect();
        let set = PointSetD::new(3, two(), pts).unwrap();
        assert!(matches!(
            star_discrepancy_exact_with_budget(&set, 10),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(star_discrepancy_exact_with_budget(&set, 1_000_000).is_ok());
        let wide = PointSetD::new(5, two(), vec![vec![BasePRational::zero(two()); 5]]).unwrap();
        assert!(matches!(star_discrepancy_exact(&wide), Err(Error::BudgetExceeded { .. })));
    }
}
