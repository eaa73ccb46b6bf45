use clap::{Args, Parser, Subcommand, ValueEnum};
use mono_cli::error::{CliError, Context, EXIT_OK};
use mono_cli::experiment::{self, ExperimentSpec};
use mono_core::colourings::{congruence_colouring, extremal_colouring, lift_colouring, random_colouring, LiftMode};
use mono_core::counting::{count_brute, count_convolution};
use mono_core::equations::classify;
use mono_core::harmonic::{
    build_majorant, gauss_bound, gauss_sum, majorant_fourier, mixed_moment, quadratic_bohr_set, Frequency,
};
use mono_core::search::{config_to_bad_solution, hindman_search};
use mono_core::{Colouring, CountQuery, DiagonalEquation, WeightedSet};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Partition regularity of diagonal quadratic equations: classification,
/// exact counting, colourings, exponential sums and experiments.
#[derive(Parser)]
#[command(name = "mono", version)]
struct Cli {
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide partition regularity of a1 x1^2 + ... + as xs^2 = b1 y1 + ... + bt yt.
    Classify(EquationArgs),
    /// Count solutions over [N], or monochromatic solutions per colour class.
    Count(CountArgs),
    #[command(subcommand)]
    Colouring(ColouringCmd),
    #[command(subcommand)]
    Expsum(ExpsumCmd),
    /// Quadratic Bohr set {x in [N] : c | x, ||theta W x^2/c|| <= eta, ||beta x/c|| <= eta}.
    Bohr(BohrArgs),
    /// Monochromatic {x, y, x + y, xy} and the solutions they induce.
    Hindman(HindmanArgs),
    #[command(subcommand)]
    Experiment(ExperimentCmd),
}

#[derive(Args)]
struct EquationArgs {
    /// Quadratic coefficients, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    quad: Vec<i64>,
    /// Linear coefficients, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lin: Vec<i64>,
}

impl EquationArgs {
    fn equation(&self) -> Result<DiagonalEquation, CliError> {
        DiagonalEquation::new(self.quad.clone(), self.lin.clone()).context(|| "equation".into())
    }
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    eq: EquationArgs,
    /// Count over [N].
    #[arg(long, conflicts_with = "colouring", required_unless_present = "colouring")]
    n: Option<u64>,
    /// Count monochromatic solutions per class of this colouring file.
    #[arg(long)]
    colouring: Option<PathBuf>,
    /// Print every colour class, not just the largest count.
    #[arg(long)]
    per_colour: bool,
    /// `both` runs enumeration and convolution and fails with exit 4 if they differ.
    #[arg(long, value_enum, default_value = "conv")]
    engine: Engine,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum Engine {
    Brute,
    Conv,
    Both,
}

fn count_with(
    engine: Engine,
    eq: &DiagonalEquation,
    set: &WeightedSet,
    what: impl Fn() -> String,
) -> Result<u128, CliError> {
    if set.is_empty() {
        return Ok(0);
    }
    let q = CountQuery::uniform(eq, set).context(&what)?;
    let conv = || count_convolution(&q).context(&what);
    let brute = || count_brute(&q).context(&what);
    match engine {
        Engine::Conv => conv(),
        Engine::Brute => brute(),
        Engine::Both => {
            let (c, b) = (conv()?, brute()?);
            if c != b {
                return Err(invariant(format!("{}: convolution gave {c}, enumeration {b}", what())));
            }
            Ok(c)
        }
    }
}

#[derive(Subcommand)]
enum ColouringCmd {
    /// Generate a colouring of [N].
    Gen {
        #[arg(long, value_enum)]
        kind: Family,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        r: u32,
        /// Required for random colourings.
        #[arg(long)]
        seed: Option<u64>,
        /// Congruence modulus (defaults to r; the colouring then has this many colours).
        #[arg(long = "mod")]
        modulus: Option<u32>,
        /// Output file (stdout if absent).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Lift a colouring of [n] to a larger domain.
    Lift {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "halving")]
        mode: LiftKind,
        /// Modular lift: m gets the colour of b m / a when a | m.
        #[arg(long, required_if_eq("mode", "modular"))]
        a: Option<u64>,
        #[arg(long, required_if_eq("mode", "modular"))]
        b: Option<u64>,
        /// Size of the lifted domain.
        #[arg(long)]
        target: Option<u64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Extremal,
    Congruence,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LiftKind {
    Halving,
    Modular,
}

#[derive(Subcommand)]
enum ExpsumCmd {
    /// Normalised Gauss sum (1/q) sum_x e((a x^2 + b x)/q) and its bound.
    Gauss {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        b: i64,
    },
    /// Fourier transform of the W-tricked square majorant on the grid k/M.
    Majorant {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        w: u64,
        #[arg(long, default_value_t = 1)]
        xi: u64,
        /// Grid size M.
        #[arg(long)]
        grid: usize,
        /// CSV output (stdout if absent).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exact even moment of an exponential sum.
    Moment {
        #[arg(long, value_enum, default_value = "mixed-quad-lin")]
        kind: MomentKind,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        w: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MomentKind {
    /// sum over (N/2, N] of e(alpha W x^2) times sum over (N/2, N] of e(alpha y).
    MixedQuadLin,
}

#[derive(Args)]
struct BohrArgs {
    #[arg(long)]
    n: u64,
    /// Quadratic frequencies, as p/q or decimals, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    theta: Vec<Frequency>,
    /// Linear frequencies (default: theta).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    beta: Option<Vec<Frequency>>,
    #[arg(long)]
    eta: f64,
    #[arg(long, default_value_t = 1)]
    c: u64,
    #[arg(long, default_value_t = 1)]
    w: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct HindmanArgs {
    #[arg(long)]
    colouring: PathBuf,
    /// Lift the colouring before searching.
    #[arg(long, value_enum)]
    lift: Option<HindmanLift>,
    /// Search {x, y, x + y, xy} inside [limit] (default: the colouring's N).
    #[arg(long)]
    limit: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum HindmanLift {
    Halving,
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Run a JSON experiment spec and write its artifacts.
    Run {
        spec: PathBuf,
        /// Override the output directory named in the spec file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(()) => ExitCode::from(EXIT_OK as u8),
        Err(e) => {
            let code = e.exit_code();
            if json {
                println!("{}", json!({ "error": e.to_string(), "exit_code": code }));
            }
            eprintln!("error: {e}");
            ExitCode::from(code as u8)
        }
    }
}

fn emit(json: bool, value: serde_json::Value, text: impl FnOnce() -> String) {
    if json {
        println!("{value}");
    } else {
        print!("{}", text());
    }
}

fn load_colouring(path: &Path) -> Result<Colouring, CliError> {
    Colouring::load(path).context(|| format!("reading {}", path.display()))
}

fn save_colouring(c: &Colouring, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(p) => c.save(p).context(|| format!("writing {}", p.display())),
        None => {
            print!("{}", c.to_text());
            Ok(())
        }
    }
}

fn csv_out(output: Option<&Path>) -> Result<csv::Writer<Box<dyn std::io::Write>>, CliError> {
    let sink: Box<dyn std::io::Write> = match output {
        Some(p) => {
            Box::new(std::fs::File::create(p).map_err(|e| CliError::io(format!("creating {}", p.display()), e))?)
        }
        None => Box::new(std::io::stdout()),
    };
    Ok(csv::Writer::from_writer(sink))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let json = cli.json;
    match cli.cmd {
        Command::Classify(args) => {
            let eq = args.equation()?;
            let v = classify(&eq).context(|| format!("classifying {eq}"))?;
            emit(json, json!({ "equation": eq.to_string(), "verdict": v }), || {
                let mut s = format!("{eq}\nstatus: {:?}\njustification: {:?}\n", v.status, v.justification);
                if let Some(w) = &v.witness {
                    s += &format!("witness: {:?} indices {:?}\n", w.side, w.indices);
                }
                s
            });
        }
        Command::Count(args) => {
            let eq = args.eq.equation()?;
            let engine = args.engine;
            if let Some(n) = args.n {
                let set = WeightedSet::interval(1, n).context(|| format!("N = {n}"))?;
                let count = count_with(engine, &eq, &set, || format!("N = {n}"))?;
                emit(
                    json,
                    json!({ "equation": eq.to_string(), "n": n, "engine": engine, "count": count.to_string() }),
                    || format!("{count}\n"),
                );
            } else {
                let path = args.colouring.expect("clap enforces --n or --colouring");
                let c = load_colouring(&path)?;
                let per_colour = c
                    .classes()
                    .into_iter()
                    .enumerate()
                    .map(|(j, class)| {
                        let set = WeightedSet::from_elements(class).context(|| format!("colour {}", j + 1))?;
                        count_with(engine, &eq, &set, || format!("colour {}, N = {}", j + 1, c.n()))
                    })
                    .collect::<Result<Vec<u128>, _>>()?;
                // lowest colour on ties
                let (argmax, max) = per_colour
                    .iter()
                    .enumerate()
                    .fold((0, 0), |best, (j, &v)| if v > best.1 { (j, v) } else { best });
                let per: Vec<String> = per_colour.iter().map(|c| c.to_string()).collect();
                emit(
                    json,
                    json!({
                        "equation": eq.to_string(), "n": c.n(), "r": c.r(), "engine": engine,
                        "per_colour": per, "argmax": argmax + 1, "max": max.to_string(),
                    }),
                    || {
                        let mut s = String::new();
                        if args.per_colour {
                            s += "colour  count\n";
                            for (j, v) in per.iter().enumerate() {
                                s += &format!("{:>6}  {v}\n", j + 1);
                            }
                        }
                        s += &format!("max: colour {} with {max}\n", argmax + 1);
                        s
                    },
                );
            }
        }
        Command::Colouring(ColouringCmd::Gen {
            kind,
            n,
            r,
            seed,
            modulus,
            output,
        }) => {
            if modulus.is_some_and(|m| m != r) && !matches!(kind, Family::Congruence) {
                return Err(CliError::Usage("--mod only applies to congruence colourings".into()));
            }
            let c = match kind {
                Family::Extremal => extremal_colouring(n, r),
                Family::Congruence => congruence_colouring(n, modulus.unwrap_or(r)),
                Family::Random => {
                    let seed = seed.ok_or_else(|| CliError::Usage("random colourings need --seed".into()))?;
                    random_colouring(n, r, seed)
                }
            }
            .context(|| format!("N = {n}, r = {r}"))?;
            save_colouring(&c, output.as_deref())?;
            if output.is_some() {
                emit(
                    json,
                    json!({ "n": c.n(), "r": c.r(), "class_sizes": c.class_sizes() }),
                    String::new,
                );
            }
        }
        Command::Colouring(ColouringCmd::Lift {
            input,
            mode,
            a,
            b,
            target,
            output,
        }) => {
            let c = load_colouring(&input)?;
            let mode = match mode {
                LiftKind::Halving => LiftMode::Halving,
                LiftKind::Modular => LiftMode::Modular {
                    a: a.expect("clap requires --a"),
                    b: b.expect("clap requires --b"),
                },
            };
            let l = lift_colouring(&c, mode, target).context(|| format!("lifting {}", input.display()))?;
            save_colouring(&l, output.as_deref())?;
            if output.is_some() {
                emit(
                    json,
                    json!({ "n": l.n(), "r": l.r(), "class_sizes": l.class_sizes() }),
                    String::new,
                );
            }
        }
        Command::Expsum(ExpsumCmd::Gauss { q, a, b }) => {
            let g = gauss_sum(q, a as i128, b as i128).context(|| format!("q = {q}"))?;
            let bound = gauss_bound(q, a as i128).sqrt();
            emit(
                json,
                json!({ "q": q, "a": a, "b": b, "re": g.re, "im": g.im, "abs": g.norm(), "bound": bound }),
                || {
                    format!(
                        "{:.12} {:+.12}i  |S| = {:.12}  bound {:.12}\n",
                        g.re,
                        g.im,
                        g.norm(),
                        bound
                    )
                },
            );
        }
        Command::Expsum(ExpsumCmd::Majorant { n, w, xi, grid, output }) => {
            let nu = build_majorant(n, w, xi).context(|| format!("N = {n}, W = {w}, xi = {xi}"))?;
            let g = majorant_fourier(&nu, grid).context(|| format!("grid {grid}"))?;
            let mut out = csv_out(output.as_deref())?;
            out.write_record(["k", "alpha", "re", "im", "abs"])?;
            for (k, v) in g.values().iter().enumerate() {
                out.write_record(&[
                    k.to_string(),
                    format!("{:e}", k as f64 / grid as f64),
                    format!("{:e}", v.re),
                    format!("{:e}", v.im),
                    format!("{:e}", v.norm()),
                ])?;
            }
            out.flush().map_err(|e| CliError::io("writing CSV", e))?;
            if output.is_some() {
                emit(
                    json,
                    json!({ "l1": nu.l1().to_string(), "support": nu.support().len(), "sup": g.sup() }),
                    || format!("l1 {}  support {}  sup {:e}\n", nu.l1(), nu.support().len(), g.sup()),
                );
            }
        }
        Command::Expsum(ExpsumCmd::Moment {
            kind: MomentKind::MixedQuadLin,
            p,
            n,
            w,
        }) => {
            let m = mixed_moment(n, w, p).context(|| format!("N = {n}, W = {w}, p = {p}"))?;
            emit(
                json,
                json!({ "kind": "mixed-quad-lin", "p": p, "n": n, "w": w, "moment": m.to_string() }),
                || format!("{m}\n"),
            );
        }
        Command::Bohr(args) => {
            let set = quadratic_bohr_set(args.n, &args.theta, args.beta.as_deref(), args.eta, args.c, args.w)
                .context(|| format!("N = {}", args.n))?;
            if let Some(p) = &args.output {
                let mut out = csv_out(Some(p))?;
                out.write_record(["x"])?;
                for x in &set {
                    out.write_record([x.to_string()])?;
                }
                out.flush().map_err(|e| CliError::io("writing CSV", e))?;
            }
            emit(json, json!({ "n": args.n, "size": set.len(), "elements": set }), || {
                let shown: Vec<String> = set.iter().take(20).map(|x| x.to_string()).collect();
                let more = if set.len() > 20 { " ..." } else { "" };
                format!("size {}: {}{more}\n", set.len(), shown.join(" "))
            });
        }
        Command::Hindman(args) => {
            let mut c = load_colouring(&args.colouring)?;
            if let Some(HindmanLift::Halving) = args.lift {
                c = lift_colouring(&c, LiftMode::Halving, None).context(|| "halving lift".into())?;
            }
            let limit = args.limit.unwrap_or(c.n());
            let configs = hindman_search(&c, limit).context(|| format!("limit {limit}"))?;
            let rows: Vec<serde_json::Value> = configs
                .iter()
                .map(|cfg| {
                    let bad = config_to_bad_solution(cfg).ok();
                    json!({ "config": cfg, "values": cfg.values(), "solution": bad })
                })
                .collect();
            emit(
                json,
                json!({ "n": c.n(), "r": c.r(), "limit": limit, "configs": rows }),
                || {
                    let mut s = format!("{} monochromatic configurations in [{limit}]\n", configs.len());
                    for cfg in &configs {
                        let [x, y, sum, prod] = cfg.values();
                        s += &format!("colour {}: {{{x}, {y}, {sum}, {prod}}}", cfg.colour);
                        if let Ok(b) = config_to_bad_solution(cfg) {
                            s += &format!("  ->  {}^2 - {}^2 = {}^2 + {}", b.x1, b.x2, b.y, b.z);
                        }
                        s.push('\n');
                    }
                    s
                },
            );
        }
        Command::Experiment(ExperimentCmd::Run { spec, output }) => {
            let text =
                std::fs::read_to_string(&spec).map_err(|e| CliError::io(format!("reading {}", spec.display()), e))?;
            let mut parsed = ExperimentSpec::from_json(&text)?;
            if let Some(dir) = output {
                parsed.set_output(dir);
            }
            let summary = experiment::run(&parsed)?;
            let dir = parsed.output().display().to_string();
            emit(json, json!({ "output": dir, "summary": summary }), || {
                let mut s = format!("{} rows written to {dir}\n", summary.rows);
                for f in &summary.fits {
                    s += &format!("{}: slope {:.4}\n", f.series, f.slope);
                }
                s
            });
        }
    }
    Ok(())
}

fn invariant(msg: String) -> CliError {
    CliError::Core {
        context: "cross-check".into(),
        source: mono_core::Error::Invariant(msg),
    }
}
