//! Plain-text point files: `# key=value` header lines followed by one
//! point per line, coordinates separated by spaces.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gfpoly::PrimeModulus;
use crate::seqgen::BasePRational;

use super::PointSetD;

pub const DEFAULT_PRECISION: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoordFormat {
    /// Canonical `a/p^L` tokens printed as `numerator/denominator`.
    Rational,
    /// Fixed-point decimals rounded to nearest.
    Decimal { precision: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointFile {
    pub header: Vec<(String, String)>,
    pub points: PointSetD,
}

impl PointFile {
    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Decimal expansion of `x` with `precision` fractional digits, ties rounded up.
pub fn format_decimal(x: &BasePRational, precision: u32) -> Result<String> {
    let scale = 10u128.checked_pow(precision).ok_or(Error::Overflow("decimal precision"))?;
    let den = u128::from(x.denominator());
    let scaled = u128::from(x.numerator())
        .checked_mul(scale)
        .and_then(|v| v.checked_mul(2))
        .ok_or(Error::Overflow("decimal rendering"))?;
    let rounded = (scaled / den + 1) / 2;
    let int = rounded / scale;
    let frac = rounded % scale;
    if precision == 0 {
        return Ok(int.to_string());
    }
    Ok(format!("{int}.{frac:0width$}", width = precision as usize))
}

pub fn format_coord(x: &BasePRational, format: CoordFormat) -> Result<String> {
    match format {
        CoordFormat::Rational => Ok(x.to_string()),
        CoordFormat::Decimal { precision } => format_decimal(x, precision),
    }
}

/// Renders the standard header (`p`, `m`, `dim`, `count`) followed by
/// `extra` entries and the points.
pub fn write_points(
    points: &PointSetD,
    m: Option<u32>,
    extra: &[(&str, String)],
    format: CoordFormat,
) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "# p={}", points.modulus().get()).ok();
    if let Some(m) = m {
        writeln!(out, "# m={m}").ok();
    }
    writeln!(out, "# dim={}", points.dim()).ok();
    writeln!(out, "# count={}", points.len()).ok();
    for (k, v) in extra {
        writeln!(out, "# {k}={v}").ok();
    }
    for pt in points.points() {
        let coords = pt.iter().map(|x| format_coord(x, format)).collect::<Result<Vec<_>>>()?;
        writeln!(out, "{}", coords.join(" ")).ok();
    }
    Ok(out)
}

fn parse_u64(text: &str, pos: usize) -> Result<u64> {
    text.parse::<u64>()
        .map_err(|_| Error::Parse { pos, msg: format!("expected an unsigned integer, found {text:?}") })
}

/// Reads `a/b` (b a power of p), `a/p^L`, an integer `0`, or an exact decimal.
pub fn parse_coord(token: &str, p: PrimeModulus, pos: usize) -> Result<BasePRational> {
    let bad = |msg: String| Error::Parse { pos, msg };
    if let Some((num, den)) = token.split_once('/') {
        let a = parse_u64(num, pos)?;
        let exponent = if let Some((base, exp)) = den.split_once('^') {
            if parse_u64(base, pos)? != u64::from(p.get()) {
                return Err(bad(format!("denominator base in {token:?} is not p = {}", p.get())));
            }
            u32::try_from(parse_u64(exp, pos)?).map_err(|_| bad(format!("exponent too large in {token:?}")))?
        } else {
            power_exponent(parse_u64(den, pos)?, p)
                .ok_or_else(|| bad(format!("denominator of {token:?} is not a power of {}", p.get())))?
        };
        return BasePRational::new(a, exponent, p).map_err(|e| bad(e.to_string()));
    }
    if let Some((int, frac)) = token.split_once('.') {
        if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad(format!("malformed decimal {token:?}")));
        }
        let digits = format!("{int}{frac}");
        let num = digits
            .parse::<u128>()
            .map_err(|_| bad(format!("malformed decimal {token:?}")))?;
        let scale = 10u128
            .checked_pow(frac.len() as u32)
            .ok_or_else(|| bad(format!("too many digits in {token:?}")))?;
        return decimal_to_base_p(num, scale, p)
            .ok_or_else(|| bad(format!("{token:?} is not exactly a/{}^L", p.get())));
    }
    match parse_u64(token, pos)? {
        0 => Ok(BasePRational::zero(p)),
        _ => Err(bad(format!("coordinate {token:?} is outside [0, 1)"))),
    }
}

fn power_exponent(mut den: u64, p: PrimeModulus) -> Option<u32> {
    let p = u64::from(p.get());
    let mut e = 0;
    while den > 1 {
        if den % p != 0 {
            return None;
        }
        den /= p;
        e += 1;
    }
    (den == 1).then_some(e)
}

fn decimal_to_base_p(num: u128, scale: u128, p: PrimeModulus) -> Option<BasePRational> {
    let g = num_integer_gcd(num, scale);
    let (num, mut den) = (num / g, scale / g);
    let pp = u128::from(p.get());
    let mut e = 0u32;
    while den > 1 {
        if den % pp != 0 {
            return None;
        }
        den /= pp;
        e += 1;
    }
    BasePRational::new(u64::try_from(num).ok()?, e, p).ok()
}

fn num_integer_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Parses a point file. `p` and `dim` must be present in the header; a
/// `count` entry, when present, must match the number of point lines.
pub fn parse_points(text: &str) -> Result<PointFile> {
    let mut header = Vec::new();
    let mut body = Vec::new();
    let mut offset = 0usize;
    for line in text.lines() {
        let start = offset;
        offset += line.len() + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some((k, v)) = rest.trim().split_once('=') {
                header.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        body.push((start, trimmed));
    }
    let lookup = |key: &str| header.iter().find(|(k, _)| k == key).map(|(_, v): &(String, String)| v.clone());
    let p_text = lookup("p").ok_or(Error::Parse { pos: 0, msg: "missing header entry p".into() })?;
    let p = PrimeModulus::new(parse_u64(&p_text, 0)?)?;
    let dim = lookup("dim")
        .map(|d| parse_u64(&d, 0))
        .transpose()?
        .map(|d| d as usize)
        .or_else(|| body.first().map(|(_, l)| l.split_whitespace().count()))
        .unwrap_or(0);
    let mut points = Vec::with_capacity(body.len());
    for (start, line) in body {
        let pt = line
            .split_whitespace()
            .map(|tok| parse_coord(tok, p, start))
            .collect::<Result<Vec<_>>>()?;
        if pt.len() != dim {
            return Err(Error::Parse {
                pos: start,
                msg: format!("expected {dim} coordinates, found {}", pt.len()),
            });
        }
        points.push(pt);
    }
    if let Some(count) = lookup("count") {
        let count = parse_u64(&count, 0)? as usize;
        if count != points.len() {
            return Err(Error::Parse { pos: 0, msg: format!("header count={count} but {} points", points.len()) });
        }
    }
    Ok(PointFile { header, points: PointSetD::new(dim, p, points)? })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn coordinate_tokens() {
        let two = f(2);
        assert_eq!(parse_coord("3/4", two, 0).unwrap(), BasePRational::new(3, 2, two).unwrap());
        assert_eq!(parse_coord("3/2^2", two, 0).unwrap(), BasePRational::new(3, 2, two).unwrap());
        assert_eq!(parse_coord("0", two, 0).unwrap(), BasePRational::zero(two));
        assert_eq!(parse_coord("0.375", two, 0).unwrap(), BasePRational::new(3, 3, two).unwrap());
        assert!(parse_coord("0.1", two, 0).is_err());
        assert!(parse_coord("1/3", two, 0).is_err());
        assert!(parse_coord("4/4", two, 0).is_err());
        assert!(parse_coord("1", two, 0).is_err());
        assert_eq!(parse_coord("2/9", f(3), 0).unwrap().to_string(), "2/9");
    }

    #[test]
    fn decimal_rounding() {
        let three = f(3);
        let third = BasePRational::new(1, 1, three).unwrap();
        assert_eq!(format_decimal(&third, 4).unwrap(), "0.3333");
        let two_thirds = BasePRational::new(2, 1, three).unwrap();
        assert_eq!(format_decimal(&two_thirds, 4).unwrap(), "0.6667");
        let eighth = BasePRational::new(1, 3, f(2)).unwrap();
        assert_eq!(format_decimal(&eighth, 2).unwrap(), "0.13");
        assert_eq!(format_decimal(&eighth, DEFAULT_PRECISION).unwrap(), "0.125000000000");
    }

    #[test]
    fn round_trip() {
        let two = f(2);
        let pts = vec![
            vec![BasePRational::zero(two), BasePRational::new(3, 2, two).unwrap()],
            vec![BasePRational::new(1, 1, two).unwrap(), BasePRational::new(1, 2, two).unwrap()],
        ];
        let set = PointSetD::new(2, two, pts).unwrap();
        let text = write_points(&set, Some(2), &[("kind", "test".into())], CoordFormat::Rational).unwrap();
        assert!(text.starts_with("# p=2\n# m=2\n# dim=2\n# count=2\n# kind=test\n0/1 3/4\n"));
        let back = parse_points(&text).unwrap();
        assert_eq!(back.points, set);
        assert_eq!(back.header_value("kind"), Some("test"));
        let dec = write_points(&set, None, &[], CoordFormat::Decimal { precision: 3 }).unwrap();
        assert_eq!(parse_points(&dec).unwrap().points, set);
    }

    #[test]
    fn header_errors() {
        assert!(parse_points("0/1\n").is_err());
        assert!(parse_points("# p=2\n# dim=1\n# count=2\n0/1\n").is_err());
        assert!(parse_points("# p=2\n# dim=2\n0/1\n").is_err());
        assert!(parse_points("# p=4\n# dim=1\n0/1\n").is_err());
    }
}
