//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so every line is printed; exits nonzero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polyhybrid::discrepancy::{star_discrepancy_1d, star_discrepancy_exact, PointSetD};
use polyhybrid::gfpoly::{irreducibles, nonzero_below};
use polyhybrid::plattice::{plattice_point_laurent, plattice_point_matrix, sublattice_enumerate};
use polyhybrid::search::{hybrid_point_set, negative_control, search_exhaustive};
use polyhybrid::suites::{self, SuiteReport, SUITE_SEED};
use polyhybrid::walsh::lemma2_bound_dyadic;
use polyhybrid::{BasePRational, HaltonConfig, LatticeConfig, Poly, PrimeModulus, Rational, ResidueClass, SubLatticeSpec};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn from_suite(r: SuiteReport) -> Self {
        Outcome { pass: r.passed(), detail: r.to_string() }
    }
}

fn field(p: u64) -> PrimeModulus {
    PrimeModulus::new(p).unwrap()
}

fn construction_paths() -> Outcome {
    let mut checked = 0u64;
    for pv in [2u64, 3] {
        let p = field(pv);
        for m in 1..=5u32 {
            for px in irreducibles(p, m as usize) {
                for q in nonzero_below(p, m) {
                    let cfg = LatticeConfig::new(px.clone(), vec![q.clone()]).unwrap();
                    let mats = cfg.generating_matrices();
                    for n in 0..cfg.size() {
                        let a = plattice_point_laurent(n, &cfg).unwrap();
                        let b = plattice_point_matrix(n, &mats).unwrap();
                        let equal = a.iter().zip(&b).all(|(x, y)| x.to_rational() == y.to_rational());
                        if !equal || a.len() != b.len() {
                            return Outcome {
                                pass: false,
                                detail: format!("p(X)={px}, q={q}, n={n}: {a:?} vs {b:?}"),
                            };
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    Outcome { pass: checked > 0, detail: format!("{checked} points over all irreducible p(X), p∈{{2,3}}, m≤5") }
}

fn lemma2_soundness() -> Outcome {
    let r = suites::lemma2(4, 2).unwrap();
    let p = field(2);
    let cfg = LatticeConfig::new(Poly::parse("X^2+X+1", p).unwrap(), vec![Poly::x(p)]).unwrap();
    let one = Poly::one(p);
    let bound = lemma2_bound_dyadic(&one, 2, &cfg).unwrap();
    let spec = SubLatticeSpec::new(2, 0, ResidueClass::new(one, Poly::zero(p)).unwrap()).unwrap();
    let set = PointSetD::new(1, p, sublattice_enumerate(&spec, &cfg).unwrap()).unwrap();
    let exact = star_discrepancy_exact(&set).unwrap() * Rational::from_integer(4);
    let tight = bound == Rational::from_integer(1) && exact == Rational::from_integer(1);
    Outcome {
        pass: r.passed() && tight,
        detail: format!("{r}; tight case bound={bound}, 4·D*_4={exact}"),
    }
}

fn envelope() -> Outcome {
    let p = field(2);
    let mut rows = Vec::new();
    for m in 2..=8u32 {
        let px = irreducibles(p, m as usize).next().unwrap();
        let halton = HaltonConfig::new(p, vec![Poly::x(p)]).unwrap();
        let best = search_exhaustive(m, 1, &halton, &px).unwrap().remove(0);
        let lattice = LatticeConfig::new(px.clone(), best.candidate.q.clone()).unwrap();
        let set = hybrid_point_set(&halton, &lattice).unwrap();
        let n = set.len() as f64;
        let nd = star_discrepancy_exact(&set).unwrap() * Rational::from_integer(set.len() as i128);
        let ndf = *nd.numer() as f64 / *nd.denom() as f64;
        let normalized = ndf / n.ln().powi(3);
        rows.push((m, px, best.candidate.q[0].clone(), best.merit, nd, normalized));
    }
    println!("    m  p(X)            q                 merit        N·D*_N     N·D*/(ln N)^3");
    for (m, px, q, merit, nd, norm) in &rows {
        println!("    {m}  {:<14}  {:<16}  {merit:>10.3}  {:>10}  {norm:.6}", px.to_string(), q.to_string(), nd.to_string());
    }
    let small = rows.iter().filter(|r| r.0 <= 4).map(|r| r.5).fold(0.0f64, f64::max);
    let worst = rows.iter().filter(|r| r.0 >= 5).map(|r| r.5).fold(0.0f64, f64::max);
    Outcome {
        pass: worst <= 2.0 * small,
        detail: format!("max m∈5..8 = {worst:.6}, 2×max m∈2..4 = {:.6}", 2.0 * small),
    }
}

fn negative_control_check() -> Outcome {
    let p = field(2);
    let px = irreducibles(p, 4).next().unwrap();
    let r = negative_control(4, 2, &px).unwrap();
    Outcome {
        pass: r.pair_witness_holds,
        detail: format!(
            "pair (n/16, P(1,p(X))) N·D*={} (need ≥ 4); control {:?} prefix max {} vs Korobov g={} prefix max {}, ratio {:.3} (documented, {} 4×); merits {:.3} vs {:.3}",
            r.pair_n_dstar,
            r.control_tuple.iter().map(ToString::to_string).collect::<Vec<_>>(),
            r.control_prefix_max,
            r.g,
            r.korobov_prefix_max,
            r.ratio,
            if r.ratio >= 4.0 { "meets" } else { "below" },
            r.control_merit,
            r.korobov_merit,
        ),
    }
}

fn random_set(rng: &mut ChaCha8Rng) -> PointSetD {
    let p = field(if rng.gen_bool(0.5) { 2 } else { 3 });
    let n = rng.gen_range(1..=64);
    let points = (0..n)
        .map(|_| {
            let e = rng.gen_range(0..=5u32);
            let den = u64::from(p.get()).pow(e);
            vec![BasePRational::new(rng.gen_range(0..den), e, p).unwrap()]
        })
        .collect();
    PointSetD::new(1, p, points).unwrap()
}

fn run_cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_polyhybrid")).args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn oracle_and_determinism() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    for i in 0..200 {
        let set = random_set(&mut rng);
        let a = star_discrepancy_1d(&set).unwrap();
        let b = star_discrepancy_exact(&set).unwrap();
        if a != b {
            return Outcome { pass: false, detail: format!("random set {i}: sorted {a} vs grid {b}") };
        }
    }
    let commands: [&[&str]; 3] = [
        &["gen", "hybrid", "--px", "X^4+X+1", "--bases", "X", "--q", "X^3+X"],
        &["disc", "exact", "--px", "X^4+X+1", "--bases", "X", "--q", "X^3+X"],
        &["search", "exhaustive", "--px", "X^3+X+1", "--bases", "X", "--t", "2"],
    ];
    for cmd in commands {
        let mut outputs = Vec::new();
        for workers in ["1", "4", "1", "4"] {
            let mut args = vec!["--workers", workers];
            args.extend_from_slice(cmd);
            outputs.push(run_cli(&args));
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            return Outcome { pass: false, detail: format!("{cmd:?} differs across runs/worker counts") };
        }
    }
    Outcome { pass: true, detail: "200 random 1-D sets agree; 3 commands byte-identical for workers {1,4} ×2".into() }
}

fn main() {
    let criteria: Vec<(u32, &str, Duration, Box<dyn Fn() -> Outcome>)> = vec![
        (1, "construction-path equivalence", Duration::from_secs(30), Box::new(construction_paths)),
        (2, "box/residue-class equivalence", Duration::from_secs(30), Box::new(|| Outcome::from_suite(suites::lemma1().unwrap()))),
        (3, "Walsh dichotomy", Duration::from_secs(60), Box::new(|| Outcome::from_suite(suites::dichotomy(200, SUITE_SEED).unwrap()))),
        (4, "Walsh weight sum closed form", Duration::from_secs(60), Box::new(|| Outcome::from_suite(suites::lemma3().unwrap()))),
        (5, "sub-lattice Walsh bound soundness", Duration::from_secs(300), Box::new(lemma2_soundness)),
        (6, "low-valuation count", Duration::from_secs(5), Box::new(|| Outcome::from_suite(suites::lemma4(6).unwrap()))),
        (7, "K1/K2 counting bounds", Duration::from_secs(300), Box::new(|| Outcome::from_suite(suites::counting(3).unwrap()))),
        (8, "averaging bound", Duration::from_secs(300), Box::new(|| Outcome::from_suite(suites::averaging(4, 2).unwrap()))),
        (9, "certificate soundness", Duration::from_secs(600), Box::new(|| Outcome::from_suite(suites::certificate(4).unwrap()))),
        (10, "desk-scale envelope", Duration::from_secs(1800), Box::new(envelope)),
        (11, "negative control", Duration::from_secs(300), Box::new(negative_control_check)),
        (12, "oracle self-consistency and CLI determinism", Duration::from_secs(60), Box::new(oracle_and_determinism)),
    ];
    let mut failed = Vec::new();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let pass = outcome.pass && elapsed <= limit;
        println!(
            "criterion {id:>2} [{name}]: {} ({:.2}s, limit {}s) {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs(),
            outcome.detail
        );
        if !pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 12 criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
