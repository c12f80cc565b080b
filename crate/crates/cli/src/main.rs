use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use polyhybrid::discrepancy::pointfile::{parse_points, write_points, CoordFormat, DEFAULT_PRECISION};
use polyhybrid::discrepancy::{
    prefix_discrepancies, prefix_reduction_bound_with_budget, star_discrepancy_1d,
    star_discrepancy_exact_with_budget, PointSetD, DEFAULT_ORACLE_BUDGET,
};
use polyhybrid::plattice::plattice_point_laurent;
use polyhybrid::search::{
    hybrid_point_set, search_exhaustive_with_budget, search_korobov_with_budget, SearchReport,
    DEFAULT_SEARCH_BUDGET,
};
use polyhybrid::seqgen::{halton_point, hybrid_point};
use polyhybrid::suites::run_suite;
use polyhybrid::{
    hybrid_bound_certificate, korobov_qvec, Error, ErrorKind, HaltonConfig, LatticeConfig, Poly,
    PrimeModulus, Rational,
};

const EXIT_USAGE: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_CHECK_FAILED: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "polyhybrid", version, about = "Hybrid Halton / polynomial lattice point sets over F_p")]
struct Cli {
    /// Worker threads for parallel evaluation (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a point set and write it as a point file.
    Gen {
        kind: GenKind,
        #[command(flatten)]
        params: GenParams,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exact star discrepancy, prefix discrepancies, or the certificate bound.
    Disc {
        mode: DiscMode,
        /// Read points from this file instead of generating them.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Point kind to generate when no input file is given.
        #[arg(long, value_enum, default_value = "hybrid")]
        kind: GenKind,
        #[command(flatten)]
        params: GenParams,
        /// Cap on corner-cell evaluations of the exact oracle.
        #[arg(long, env = "POLYHYBRID_ORACLE_BUDGET", default_value_t = DEFAULT_ORACLE_BUDGET)]
        budget: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Rank generator candidates by certificate merit.
    Search {
        mode: SearchMode,
        #[command(flatten)]
        params: GenParams,
        /// Cap on the number of candidates.
        #[arg(long, env = "POLYHYBRID_SEARCH_BUDGET", default_value_t = DEFAULT_SEARCH_BUDGET)]
        budget: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run a property suite (lemma1, lemma2, lemma3, lemma4, lemma6, dichotomy, averaging, counting, certificate).
    Verify { suite: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Halton,
    Plattice,
    Korobov,
    Hybrid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DiscMode {
    Exact,
    Prefix,
    Certificate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SearchMode {
    Exhaustive,
    Korobov,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Rational,
    Decimal,
}

#[derive(Args, Debug, Clone)]
struct GenParams {
    /// Field characteristic.
    #[arg(long, default_value_t = 2)]
    p: u64,
    /// Irreducible lattice modulus p(X); its degree is m.
    #[arg(long)]
    px: Option<String>,
    /// Comma-separated Halton bases, e.g. "X,X+1".
    #[arg(long)]
    bases: Option<String>,
    /// Comma-separated lattice generators q_1,...,q_t.
    #[arg(long)]
    q: Option<String>,
    /// Korobov generator g.
    #[arg(long)]
    g: Option<String>,
    /// Lattice dimension for Korobov points and searches.
    #[arg(long, default_value_t = 1)]
    t: usize,
    /// Number of Halton points.
    #[arg(long)]
    count: Option<u64>,
    /// Emit only the point with this index.
    #[arg(long)]
    n: Option<u64>,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Coordinate format; rational is canonical.
    #[arg(long, value_enum, default_value = "rational")]
    format: Format,
    /// Fractional digits for decimal output.
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: u32,
    /// Write to this file (atomically) instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl OutputArgs {
    fn coord_format(&self) -> CoordFormat {
        match self.format {
            Format::Rational => CoordFormat::Rational,
            Format::Decimal => CoordFormat::Decimal { precision: self.precision },
        }
    }
}

enum Failure {
    Lib(Error),
    Usage(String),
    Io(std::io::Error),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Splits on commas outside `[...]`.
fn split_list(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

impl GenParams {
    fn field(&self) -> CliResult<PrimeModulus> {
        Ok(PrimeModulus::new(self.p)?)
    }

    fn px(&self) -> CliResult<Poly> {
        let text = self.px.as_deref().ok_or_else(|| Failure::Usage("--px is required".into()))?;
        Ok(Poly::parse(text, self.field()?)?)
    }

    fn poly_list(&self, text: Option<&str>) -> CliResult<Vec<Poly>> {
        let p = self.field()?;
        match text {
            None => Ok(vec![]),
            Some(t) => split_list(t).iter().map(|s| Poly::parse(s, p).map_err(Failure::from)).collect(),
        }
    }

    fn halton(&self) -> CliResult<HaltonConfig> {
        Ok(HaltonConfig::new(self.field()?, self.poly_list(self.bases.as_deref())?)?)
    }

    fn lattice(&self) -> CliResult<LatticeConfig> {
        let q = self.poly_list(self.q.as_deref())?;
        if q.is_empty() {
            return Err(Failure::Usage("--q is required".into()));
        }
        Ok(LatticeConfig::new(self.px()?, q)?)
    }

    fn korobov_lattice(&self) -> CliResult<LatticeConfig> {
        let px = self.px()?;
        let g_text = self.g.as_deref().ok_or_else(|| Failure::Usage("--g is required".into()))?;
        let g = Poly::parse(g_text, self.field()?)?;
        let q = korobov_qvec(&g, self.t, &px)?;
        Ok(LatticeConfig::new(px, q)?)
    }

    fn indices(&self, size: u64) -> CliResult<Vec<u64>> {
        match self.n {
            Some(n) if n >= size => Err(Error::IndexOutOfRange { index: n, limit: size }.into()),
            Some(n) => Ok(vec![n]),
            None => Ok((0..size).collect()),
        }
    }
}

/// Builds the requested point set together with its lattice degree, if any.
fn generate(kind: GenKind, params: &GenParams) -> CliResult<(PointSetD, Option<u32>)> {
    let p = params.field()?;
    match kind {
        GenKind::Halton => {
            let cfg = params.halton()?;
            if cfg.dim() == 0 {
                return Err(Failure::Usage("--bases is required".into()));
            }
            let count = params.count.unwrap_or(1);
            let indices = match params.n {
                Some(n) => vec![n],
                None => (0..count).collect(),
            };
            let points = indices.iter().map(|&n| halton_point(n, &cfg)).collect::<Result<Vec<_>, _>>()?;
            Ok((PointSetD::new(cfg.dim(), p, points)?, None))
        }
        GenKind::Plattice | GenKind::Korobov => {
            let lattice = if kind == GenKind::Plattice { params.lattice()? } else { params.korobov_lattice()? };
            let points = params
                .indices(lattice.size())?
                .into_iter()
                .map(|n| plattice_point_laurent(n, &lattice))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((PointSetD::new(lattice.dim(), p, points)?, Some(lattice.m())))
        }
        GenKind::Hybrid => {
            let halton = params.halton()?;
            let lattice = if params.g.is_some() { params.korobov_lattice()? } else { params.lattice()? };
            let m = lattice.m();
            let set = match params.n {
                None => hybrid_point_set(&halton, &lattice)?,
                Some(n) => PointSetD::new(1 + halton.dim() + lattice.dim(), p, vec![hybrid_point(n, m, &halton, &lattice)?])?,
            };
            Ok((set, Some(m)))
        }
    }
}

fn kind_name(kind: GenKind) -> &'static str {
    match kind {
        GenKind::Halton => "halton",
        GenKind::Plattice => "plattice",
        GenKind::Korobov => "korobov",
        GenKind::Hybrid => "hybrid",
    }
}

fn emit(out: &OutputArgs, text: &str) -> CliResult<()> {
    match &out.output {
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Some(path) => write_atomically(path, text),
    }
}

fn write_atomically(path: &Path, text: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Failure::Io(e.error))?;
    Ok(())
}

fn decimal(r: &Rational, precision: u32) -> String {
    let neg = *r.numer() < 0;
    let num = r.numer().unsigned_abs();
    let den = r.denom().unsigned_abs();
    let scale = 10u128.pow(precision);
    let rounded = (num * scale * 2 / den + 1) / 2;
    let sign = if neg { "-" } else { "" };
    if precision == 0 {
        return format!("{sign}{rounded}");
    }
    format!("{sign}{}.{:0w$}", rounded / scale, rounded % scale, w = precision as usize)
}

fn header_extras(kind: GenKind, params: &GenParams) -> Vec<(&'static str, String)> {
    let mut extra = vec![("kind", kind_name(kind).to_string())];
    if let Some(px) = &params.px {
        extra.push(("pX", px.clone()));
    }
    if let Some(b) = &params.bases {
        extra.push(("bases", b.clone()));
    }
    if let Some(q) = &params.q {
        extra.push(("q", q.clone()));
    }
    if let Some(g) = &params.g {
        extra.push(("g", g.clone()));
        extra.push(("t", params.t.to_string()));
    }
    extra
}

fn cmd_gen(kind: GenKind, params: &GenParams, out: &OutputArgs) -> CliResult<()> {
    let (set, m) = generate(kind, params)?;
    let text = write_points(&set, m, &header_extras(kind, params), out.coord_format())?;
    emit(out, &text)
}

fn load_points(input: Option<&Path>, kind: GenKind, params: &GenParams) -> CliResult<PointSetD> {
    match input {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            Ok(parse_points(&text)?.points)
        }
        None => Ok(generate(kind, params)?.0),
    }
}

fn exact_dstar(set: &PointSetD, budget: u64) -> CliResult<Rational> {
    if set.dim() == 1 {
        Ok(star_discrepancy_1d(set)?)
    } else {
        Ok(star_discrepancy_exact_with_budget(set, budget)?)
    }
}

fn is_anchored(set: &PointSetD) -> bool {
    let n = set.len() as i128;
    set.dim() >= 2
        && set
            .points()
            .iter()
            .enumerate()
            .all(|(i, pt)| pt[0].to_rational() == Rational::new(i as i128, n))
}

fn cmd_disc(
    mode: DiscMode,
    input: Option<&Path>,
    kind: GenKind,
    params: &GenParams,
    budget: u64,
    out: &OutputArgs,
) -> CliResult<()> {
    let precision = out.precision;
    let mut text = String::new();
    match mode {
        DiscMode::Exact => {
            let set = load_points(input, kind, params)?;
            let d = exact_dstar(&set, budget)?;
            let nd = d * Rational::from_integer(set.len() as i128);
            text.push_str(&format!("points={}\ndim={}\n", set.len(), set.dim()));
            text.push_str(&format!("dstar={d}\ndstar_decimal={}\n", decimal(&d, precision)));
            text.push_str(&format!("n_dstar={nd}\n"));
        }
        DiscMode::Prefix => {
            let set = load_points(input, kind, params)?;
            let values = prefix_discrepancies(&set, budget)?;
            for (i, v) in values.iter().enumerate() {
                text.push_str(&format!("prefix={} n_dstar={v} decimal={}\n", i + 1, decimal(v, precision)));
            }
            if let Some(max) = values.iter().max() {
                text.push_str(&format!("max_n_dstar={max}\n"));
            }
            if is_anchored(&set) {
                let bound = prefix_reduction_bound_with_budget(&set, budget)?;
                text.push_str(&format!("prefix_reduction_bound={bound}\n"));
            }
        }
        DiscMode::Certificate => {
            let halton = params.halton()?;
            let lattice = if params.g.is_some() { params.korobov_lattice()? } else { params.lattice()? };
            let cert = hybrid_bound_certificate(lattice.m(), &halton, &lattice)?;
            text.push_str(&format!("p={} m={} s={} t={}\n", cert.p, cert.m, halton.dim(), lattice.dim()));
            text.push_str("u\tvalue\tapprox\tshapes\n");
            for level in &cert.per_level {
                text.push_str(&format!(
                    "{}\t{:.6}\t{}\t{}\n",
                    level.u,
                    level.value,
                    level.approximation_term,
                    level.shapes.len()
                ));
                for sh in &level.shapes {
                    let d = sh.d.map_or_else(|| "-".to_string(), |d| d.to_string());
                    text.push_str(&format!(
                        "\tshape={:?} degB={} d={d} W={} classBound={:.6}\n",
                        sh.exponents, sh.deg_b, sh.multiplicity_bound, sh.class_bound
                    ));
                }
            }
            text.push_str(&format!("total={:.6}\n", cert.total));
            let set = hybrid_point_set(&halton, &lattice)?;
            match star_discrepancy_exact_with_budget(&set, budget) {
                Ok(d) => {
                    let nd = d * Rational::from_integer(set.len() as i128);
                    text.push_str(&format!("n_dstar_exact={nd}\nn_dstar_exact_decimal={}\n", decimal(&nd, precision)));
                }
                Err(Error::BudgetExceeded { .. }) => text.push_str("n_dstar_exact=skipped (oracle budget)\n"),
                Err(e) => return Err(e.into()),
            }
        }
    }
    emit(out, &text)
}

fn cmd_search(mode: SearchMode, params: &GenParams, budget: u64, out: &OutputArgs) -> CliResult<()> {
    let halton = params.halton()?;
    let px = params.px()?;
    let m = px.degree().ok_or(Error::ConstantPolynomial)? as u32;
    let (name, reports) = match mode {
        SearchMode::Exhaustive => ("exhaustive", search_exhaustive_with_budget(m, params.t, &halton, &px, budget)?),
        SearchMode::Korobov => ("korobov", search_korobov_with_budget(m, params.t, &halton, &px, budget)?),
    };
    let report = SearchReport::new(name, params.t, &halton, &px, &reports)?;
    let mut json = report.to_json();
    json.push('\n');
    emit(out, &json)?;
    if report.best_within_average {
        Ok(())
    } else {
        Err(Failure::Check("best merit exceeds the average merit".into()))
    }
}

fn cmd_verify(suite: &str) -> CliResult<()> {
    let report = run_suite(suite)?;
    println!("{suite}: {report}");
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check(format!("suite {suite} failed")))
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Failure::Usage("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Gen { kind, params, out } => cmd_gen(kind, &params, &out),
        Command::Disc { mode, input, kind, params, budget, out } => {
            cmd_disc(mode, input.as_deref(), kind, &params, budget, &out)
        }
        Command::Search { mode, params, budget, out } => cmd_search(mode, &params, budget, &out),
        Command::Verify { suite } => cmd_verify(&suite),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Usage => EXIT_USAGE,
                ErrorKind::Precondition => EXIT_PRECONDITION,
                ErrorKind::Budget => EXIT_BUDGET,
            })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(EXIT_CHECK_FAILED)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use polyhybrid::BasePRational;

    #[test]
    fn list_splitting() {
        assert_eq!(split_list("X, X+1"), vec!["X", "X+1"]);
        assert_eq!(split_list("[1,1],X"), vec!["[1,1]", "X"]);
        assert!(split_list("").is_empty());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal(&Rational::new(1, 4), 3), "0.250");
        assert_eq!(decimal(&Rational::new(2, 3), 4), "0.6667");
        assert_eq!(decimal(&Rational::new(5, 4), 0), "1");
    }

    #[test]
    fn clap_definition() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn anchored_detection() {
        let p = PrimeModulus::new(2).unwrap();
        let pts = (0..2u64)
            .map(|n| vec![BasePRational::new(n, 1, p).unwrap(), BasePRational::zero(p)])
            .collect();
        assert!(is_anchored(&PointSetD::new(2, p, pts).unwrap()));
    }
}
