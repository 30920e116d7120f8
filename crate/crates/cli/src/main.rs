use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use tandem_core::closed_forms::{
    baxter_b, dangulation_sequence, exact_p1_endpoint, lgv_qnk, marked_qnk_tilde, tutte_a,
};
use tandem_core::oracle::{count_walks, CountQuery, Endpoint};
use tandem_core::sampler::{
    rng_from_seed, sample_excursion_p1, sample_excursion_windowed, HalfplaneSampler,
};
use tandem_core::series::{
    a_i_and_q11, invariant_identity, oned_y, q0b_constant_term, q0b_x0, w_series, y1_series,
    OneDWeights, TSeries,
};
use tandem_core::stochastics::{
    harmonic_v, kappa, kappa_bipolar, normalize_weights, StepDistribution,
};
use tandem_core::verify::{self, Suite, VerifyOptions};
use tandem_core::{
    phi, phi_inverse, rho_on_walks, sigma_on_walks, Error, MarkedBipolarOrientation, Region,
    Result, TandemWalk, ValidationReport, WeightSpec,
};

#[derive(Parser)]
#[command(
    name = "tandem",
    version,
    about = "Tandem walks, bipolar orientations and their enumeration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact weighted count of walks by dynamic programming.
    Count(CountArgs),
    /// Coefficients of a generating function, as exact rationals.
    Series(SeriesArgs),
    /// Closed-form counting formulas.
    ClosedForm {
        #[command(subcommand)]
        which: ClosedForm,
    },
    /// The KMSW bijection and the two involutions.
    Bijection {
        #[command(subcommand)]
        op: BijectionOp,
    },
    /// Check that a map is a valid marked bipolar orientation.
    Validate {
        #[arg(long = "in", default_value = "-")]
        input: PathBuf,
    },
    /// Random walks.
    Sample {
        #[arg(value_enum)]
        kind: SampleKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Face weights w_0,...,w_p (SE weight 1), normalized to a zero-drift law.
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        w: Vec<f64>,
        /// Output file; the extension picks the format (.json, .svg or .dot).
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Asymptotic constants for walks or bipolar orientations.
    Asymptotics(AsymptoticsArgs),
    /// The discrete harmonic function V(a,b).
    Harmonic {
        /// Use the single-level law with z_p > 0 only.
        #[arg(long, conflicts_with = "z")]
        p: Option<usize>,
        /// Explicit law z, z_0, ..., z_p (rationals such as 1/3).
        #[arg(long, value_delimiter = ',')]
        z: Option<Vec<String>>,
        #[arg(long, default_value_t = 0)]
        a: usize,
        #[arg(long, default_value_t = 0)]
        b: usize,
    },
    /// Run the acceptance criteria.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: SuiteArg,
        /// Reduced scale; reports are marked as such.
        #[arg(long)]
        fast: bool,
        /// Series order for the series criteria.
        #[arg(long)]
        order: Option<i32>,
    },
    /// Draw a walk as SVG or a map as Graphviz DOT.
    Render {
        #[arg(long = "in", default_value = "-")]
        input: PathBuf,
        #[arg(long, conflicts_with = "dot")]
        svg: bool,
        #[arg(long)]
        dot: bool,
        /// Embedding of the walk, for --svg.
        #[arg(long, value_parser = parse_point, default_value = "0,0")]
        start: (i64, i64),
    },
}

#[derive(Args)]
struct CountArgs {
    /// Largest level; defaults to the length of --z minus one.
    #[arg(long)]
    p: Option<usize>,
    /// Face weights z_0,...,z_p (rationals).
    #[arg(long, value_delimiter = ',', required = true)]
    z: Vec<String>,
    #[arg(long, value_parser = parse_point)]
    from: (i64, i64),
    /// End point, or "any".
    #[arg(long, default_value = "any")]
    to: String,
    #[arg(long)]
    len: usize,
    #[arg(long, value_enum, default_value = "quadrant")]
    region: RegionArg,
    /// Only walks with exactly these numbers of face steps per level.
    #[arg(long, value_delimiter = ',')]
    refine: Option<Vec<usize>>,
}

#[derive(Args)]
struct SeriesArgs {
    #[arg(long, value_enum)]
    formula: Formula,
    #[arg(long, default_value_t = 10)]
    order: i32,
    /// Face weights z_0,...,z_p (rationals); SE weight is 1.
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    z: Vec<String>,
    /// Weights w_{-1},w_0,...,w_p for the one-dimensional formulas.
    #[arg(long, value_delimiter = ',')]
    w: Option<Vec<i64>>,
    #[arg(long, default_value_t = 0)]
    a: u32,
    #[arg(long, default_value_t = 0)]
    b: u32,
    #[arg(long, default_value_t = 0)]
    c: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum Formula {
    Q0bX0,
    Q0bCt,
    Q11,
    W,
    Y1,
    Oned,
    Invariant,
}

#[derive(Subcommand)]
enum ClosedForm {
    /// Rooted planar triangulations, a(k).
    Tutte {
        #[arg(long)]
        k: u64,
    },
    /// Bipolar orientations with n edges, b(n).
    Baxter {
        #[arg(long)]
        n: u64,
    },
    /// The d-angulation recurrence for p = 1, 2, 3, at index k.
    Dang {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        k: u64,
    },
    /// The path-triple determinant q_{n,k}(a,b,c,d).
    Lgv {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        k: i64,
        /// a,b,c,d
        #[arg(long, value_delimiter = ',', num_args = 1, default_value = "0,0,0,0")]
        sig: Vec<i64>,
        /// Count marked orientations (the inclusion-exclusion over four determinants).
        #[arg(long)]
        marked: bool,
    },
    /// Uniform p = 1 quadrant walks from the origin to (i,j).
    P1Endpoint {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        i: u64,
        #[arg(long)]
        j: u64,
    },
}

#[derive(Subcommand)]
enum BijectionOp {
    /// Walk to marked bipolar orientation.
    Phi {
        #[arg(long = "in", default_value = "-")]
        input: PathBuf,
    },
    /// Marked bipolar orientation to walk.
    PhiInverse {
        #[arg(long = "in", default_value = "-")]
        input: PathBuf,
    },
    /// σ, on a map or on a walk.
    Sigma {
        #[arg(long = "in", default_value = "-")]
        input: PathBuf,
    },
    /// ρ, on a map or on a walk.
    Rho {
        #[arg(long = "in", default_value = "-")]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleKind {
    Halfplane,
    Quadrant,
    ExcursionP1,
    ExcursionWindow,
}

#[derive(Args)]
struct AsymptoticsArgs {
    /// Allowed inner face degrees of bipolar orientations.
    #[arg(long, value_delimiter = ',', conflicts_with = "w")]
    omega: Option<Vec<u32>>,
    /// Face weights w_0,...,w_p for walks.
    #[arg(long, value_delimiter = ',')]
    w: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    a: usize,
    #[arg(long, default_value_t = 0)]
    b: usize,
    #[arg(long, default_value_t = 0)]
    c: usize,
    #[arg(long, default_value_t = 0)]
    d: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegionArg {
    Quadrant,
    UpperHalfplane,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Bijection,
    Series,
    Asymptotics,
    Sampler,
    All,
}

fn parse_point(s: &str) -> std::result::Result<(i64, i64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected x,y, got {s:?}"))?;
    let p = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

fn parse_rational(s: &str) -> Result<BigRational> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|_| Error::Usage(format!("not a rational: {s:?}")))
}

fn parse_rationals(v: &[String]) -> Result<Vec<BigRational>> {
    v.iter().map(|s| parse_rational(s)).collect()
}

fn rat(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A float rounded to 15 significant digits.
fn float15(x: f64) -> Value {
    let rounded: f64 = format!("{x:.14e}").parse().unwrap_or(x);
    json!(rounded)
}

fn read_input(path: &Path) -> Result<String> {
    let mut s = String::new();
    if path == Path::new("-") {
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Usage(format!("stdin: {e}")))?;
    } else {
        s = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("{}: {e}", path.display())))?;
    }
    Ok(s)
}

fn parse_walk(s: &str) -> Result<TandemWalk> {
    serde_json::from_str(s).map_err(|e| Error::Usage(format!("walk JSON: {e}")))
}

fn parse_map(s: &str) -> Result<MarkedBipolarOrientation> {
    serde_json::from_str(s).map_err(|e| Error::Usage(format!("map JSON: {e}")))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn weight_spec(p: Option<usize>, z: &[String]) -> Result<WeightSpec> {
    let z = parse_rationals(z)?;
    if let Some(p) = p {
        if z.len() != p + 1 {
            return Err(Error::Usage(format!(
                "--p {p} needs {} weights, got {}",
                p + 1,
                z.len()
            )));
        }
    }
    WeightSpec::new(z)
}

fn run_count(args: CountArgs) -> Result<String> {
    let spec = weight_spec(args.p, &args.z)?;
    let end = if args.to == "any" {
        Endpoint::Any
    } else {
        let (x, y) = parse_point(&args.to).map_err(Error::Usage)?;
        Endpoint::Point(x, y)
    };
    let region = match args.region {
        RegionArg::Quadrant => Region::Quadrant,
        RegionArg::UpperHalfplane => Region::UpperHalfplane,
        RegionArg::None => Region::None,
    };
    let mut q = CountQuery::new(spec, args.from, end, args.len, region);
    q.refine = args.refine;
    Ok(rat(&count_walks(&q)))
}

fn scalars_json(v: &[BigRational]) -> String {
    to_json(&v.iter().map(rat).collect::<Vec<_>>())
}

/// Coefficients of t^0..t^order, each a polynomial in x given as {exponent: rational}.
fn x_series_json(s: &TSeries) -> String {
    let coeffs: Vec<Value> = (0..=s.order())
        .map(|n| {
            let mut m = serde_json::Map::new();
            for (e, c) in s.coeff(n).terms() {
                m.insert(e[0].to_string(), json!(rat(c)));
            }
            Value::Object(m)
        })
        .collect();
    to_json(&coeffs)
}

fn run_series(args: SeriesArgs) -> Result<String> {
    let spec = || weight_spec(None, &args.z);
    let n = args.order;
    if n < 0 {
        return Err(Error::Usage("--order must be nonnegative".into()));
    }
    Ok(match args.formula {
        Formula::Q0bX0 => {
            let s = q0b_x0(&spec()?, args.b, n)?;
            scalars_json(
                &(0..=n)
                    .map(|k| s.coeff(k).coeff([args.c as i32, 0]))
                    .collect::<Vec<_>>(),
            )
        }
        Formula::Q0bCt => scalars_json(&q0b_constant_term(&spec()?, args.b, args.c, n)?),
        Formula::Q11 => scalars_json(&a_i_and_q11(&spec()?, args.a, args.b, n)?.scalars()),
        Formula::W => scalars_json(&w_series(&spec()?, n)?.scalars()),
        Formula::Y1 => x_series_json(&y1_series(&spec()?, n, true)?),
        Formula::Oned => {
            let w = args
                .w
                .ok_or_else(|| Error::Usage("--w is required for oned".into()))?;
            if w.len() < 2 {
                return Err(Error::Usage("--w needs w_{-1} and at least w_0".into()));
            }
            scalars_json(&oned_y(&OneDWeights::from_ints(&w), n).scalars())
        }
        Formula::Invariant => {
            let z = parse_rationals(&args.z)?;
            let (z, zr) = z
                .split_first()
                .ok_or_else(|| Error::Usage("--z needs z, z_0, ..., z_p".into()))?;
            scalars_json(&invariant_identity(z, zr, n as usize)?)
        }
    })
}

fn run_closed_form(which: ClosedForm) -> Result<String> {
    Ok(match which {
        ClosedForm::Tutte { k } => tutte_a(k).to_string(),
        ClosedForm::Baxter { n } => baxter_b(n)?.to_string(),
        ClosedForm::Dang { p, k } => dangulation_sequence(p, k)?[k as usize].to_string(),
        ClosedForm::Lgv { n, k, sig, marked } => {
            let [a, b, c, d] = sig[..] else {
                return Err(Error::Usage("--sig takes a,b,c,d".into()));
            };
            if marked {
                marked_qnk_tilde(n, k, a, b, c, d)
            } else {
                lgv_qnk(n, k, a, b, c, d)
            }
            .to_string()
        }
        ClosedForm::P1Endpoint { n, i, j } => exact_p1_endpoint(n, i, j).to_string(),
    })
}

fn run_bijection(op: BijectionOp) -> Result<String> {
    Ok(match op {
        BijectionOp::Phi { input } => to_json(&phi(&parse_walk(&read_input(&input)?)?)),
        BijectionOp::PhiInverse { input } => {
            to_json(&phi_inverse(&parse_map(&read_input(&input)?)?)?)
        }
        BijectionOp::Sigma { ref input } | BijectionOp::Rho { ref input } => {
            let is_sigma = matches!(op, BijectionOp::Sigma { .. });
            let text = read_input(input)?;
            if let Ok(w) = serde_json::from_str::<TandemWalk>(&text) {
                to_json(&if is_sigma {
                    sigma_on_walks(&w)
                } else {
                    rho_on_walks(&w)
                })
            } else {
                let o = parse_map(&text)?;
                to_json(&if is_sigma { o.sigma()? } else { o.rho()? })
            }
        }
    })
}

fn run_validate(input: &Path) -> Result<String> {
    let o = parse_map(&read_input(input)?)?;
    match o.validate()? {
        ValidationReport::Pass => {
            let c = o.checked()?;
            Ok(to_json(&json!({
                "valid": true,
                "signature": c.signature(),
                "faces": c.census(),
            })))
        }
        ValidationReport::Fail(v) => Err(Error::Invalid(v.to_string())),
    }
}

fn emit_walk(w: &TandemWalk, emit: Option<&Path>) -> Result<String> {
    let Some(path) = emit else {
        return Ok(to_json(w));
    };
    let body = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => to_json(w) + "\n",
        Some("svg") => w.to_svg((0, 0)),
        Some("dot") => phi(w).to_dot(),
        _ => {
            return Err(Error::Usage(format!(
                "{}: use a .json, .svg or .dot file",
                path.display()
            )))
        }
    };
    std::fs::write(path, body).map_err(|e| Error::Domain(format!("{}: {e}", path.display())))?;
    Ok(format!("wrote {}", path.display()))
}

fn run_sample(
    kind: SampleKind,
    n: usize,
    seed: u64,
    w: &[f64],
    emit: Option<&Path>,
) -> Result<String> {
    let dist = || -> Result<StepDistribution<f64>> { Ok(normalize_weights(w)?.dist) };
    let walk = match kind {
        SampleKind::Halfplane => {
            HalfplaneSampler::new(&dist()?)?.sample(n, &mut rng_from_seed(seed))
        }
        SampleKind::Quadrant => {
            HalfplaneSampler::new(&dist()?)?.sample_quadrant(n, &mut rng_from_seed(seed))
        }
        SampleKind::ExcursionP1 => sample_excursion_p1(n, seed)?,
        SampleKind::ExcursionWindow => {
            let s = sample_excursion_windowed(&dist()?, n, seed)?;
            eprintln!(
                "m={} midpoint={:?} retries={} rejections={} restarts={}",
                s.m, s.midpoint, s.retries, s.rejections, s.restarts
            );
            s.walk
        }
    };
    emit_walk(&walk, emit)
}

fn run_asymptotics(args: AsymptoticsArgs) -> Result<String> {
    let profile = match (&args.omega, &args.w) {
        (Some(omega), _) => kappa_bipolar(omega, args.b, args.c)?,
        (None, Some(w)) => kappa(w, args.a, args.b, args.c, args.d)?,
        (None, None) => return Err(Error::Usage("give --omega or --w".into())),
    };
    Ok(to_json(&json!({
        "iota": profile.iota,
        "alpha": float15(profile.alpha),
        "gamma": float15(profile.gamma),
        "sigma2": float15(profile.sigma2),
        "kappa": float15(profile.kappa),
    })))
}

fn run_harmonic(p: Option<usize>, z: Option<Vec<String>>, a: usize, b: usize) -> Result<String> {
    let dist = match (p, z) {
        (_, Some(z)) => {
            let z = parse_rationals(&z)?;
            let (z, zr) = z
                .split_first()
                .ok_or_else(|| Error::Usage("--z needs z, z_0, ..., z_p".into()))?;
            StepDistribution::new(z.clone(), zr.to_vec())?
        }
        (p, None) => StepDistribution::single_level(p.unwrap_or(1))?,
    };
    let v = harmonic_v(&dist, a, b)?;
    Ok(to_json(&json!({
        "a": a,
        "b": b,
        "sigma_v": rat(&v.rational_part),
        "sigma2": rat(&v.sigma2),
        "v": float15(v.to_f64()),
    })))
}

fn run_verify(suite: SuiteArg, fast: bool, order: Option<i32>) -> Result<(String, bool)> {
    let suite = match suite {
        SuiteArg::Bijection => Suite::Bijection,
        SuiteArg::Series => Suite::Series,
        SuiteArg::Asymptotics => Suite::Asymptotics,
        SuiteArg::Sampler => Suite::Sampler,
        SuiteArg::All => Suite::All,
    };
    let mut opts = if fast {
        VerifyOptions::fast()
    } else {
        VerifyOptions::full()
    };
    if let Some(o) = order {
        opts.order = o;
    }
    let reports = verify::run(suite, &opts);
    let ok = reports.iter().all(|r| r.passed);
    Ok((
        to_json(&json!({ "passed": ok, "options": opts, "criteria": reports })),
        ok,
    ))
}

fn run_render(input: &Path, svg: bool, dot: bool, start: (i64, i64)) -> Result<String> {
    let text = read_input(input)?;
    if svg {
        Ok(parse_walk(&text)?.to_svg(start))
    } else if dot {
        // A walk is drawn through its orientation.
        match serde_json::from_str::<TandemWalk>(&text) {
            Ok(w) => Ok(phi(&w).to_dot()),
            Err(_) => Ok(parse_map(&text)?.to_dot()),
        }
    } else {
        Err(Error::Usage("give --svg or --dot".into()))
    }
}

fn dispatch(cli: Cli) -> Result<(String, bool)> {
    let out = match cli.command {
        Command::Count(args) => run_count(args)?,
        Command::Series(args) => run_series(args)?,
        Command::ClosedForm { which } => run_closed_form(which)?,
        Command::Bijection { op } => run_bijection(op)?,
        Command::Validate { input } => run_validate(&input)?,
        Command::Sample {
            kind,
            n,
            seed,
            w,
            emit,
        } => run_sample(kind, n, seed, &w, emit.as_deref())?,
        Command::Asymptotics(args) => run_asymptotics(args)?,
        Command::Harmonic { p, z, a, b } => run_harmonic(p, z, a, b)?,
        Command::Verify { suite, fast, order } => return run_verify(suite, fast, order),
        Command::Render {
            input,
            svg,
            dot,
            start,
        } => run_render(&input, svg, dot, start)?,
    };
    Ok((out, true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok((out, ok)) => {
            println!("{}", out.trim_end());
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::Usage(_)) { 2 } else { 1 })
        }
    }
}
