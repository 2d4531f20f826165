use std::fs;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use fexpand::algebraic::{hensel_root, AlgebraicSpec};
use fexpand::automata::Dfao;
use fexpand::beta::{beta_automaton, bridge, d_beta, d_beta_rational, BetaContext, BetaDigitsFile};
use fexpand::christol::{decode, encode_with, ore_form, span_christol};
use fexpand::corpus::{self, RunConfig};
use fexpand::expand::{
    detect_period_bounded, detect_period_exact, expand, expand_from, lemma21_witness, property_a_check,
};
use fexpand::expr::parse_ratfunc;
use fexpand::residue::{
    check_complete, is_additively_closed, shift_system, span_system, span_system_prime, twist_system, BaseContext,
    Element, Model, ResidueSystem,
};
use fexpand::{Field, LaurentStream, Orientation};

#[derive(Parser)]
#[command(name = "fexpand", version, about = "Digit expansions over F_q(z), exact periodicity and Christol automata")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Characteristic p of F_q.
    #[arg(long, global = true, default_value_t = 2)]
    p: u32,
    /// Extension degree m (q = p^m).
    #[arg(long, global = true, default_value_t = 1)]
    m: u32,
    /// Coefficients of the defining polynomial of F_q over F_p, ascending.
    #[arg(long, global = true, value_delimiter = ',')]
    modulus: Option<Vec<u32>>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Verification precision.
    #[arg(long, global = true)]
    precision: Option<usize>,
    /// State / remainder cap.
    #[arg(long, global = true)]
    cap: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Greedy digits of x with respect to (Γ, π).
    Expand {
        #[command(flatten)]
        x: XArgs,
        #[command(flatten)]
        sys: SysArgs,
        #[arg(short = 'n', default_value_t = 16)]
        n: usize,
        /// Start index (default min(0, floor(v(x)/e))).
        #[arg(long, allow_hyphen_values = true)]
        start: Option<i64>,
    },
    /// Eventual periodicity of the digit sequence.
    Period {
        #[command(flatten)]
        x: XArgs,
        #[command(flatten)]
        sys: SysArgs,
        /// Exact detection by repeated remainders (rational x, property A).
        #[arg(long, conflicts_with = "bounded")]
        exact: bool,
        /// Bounded search on a digit prefix.
        #[arg(long)]
        bounded: bool,
        #[arg(long, default_value_t = 4096)]
        nmax: usize,
        #[arg(long, default_value_t = 64)]
        lmax: usize,
    },
    /// Whether every rational x has an eventually periodic expansion.
    PropertyA {
        #[command(flatten)]
        sys: SysArgs,
    },
    /// A rational element with a non-periodic expansion.
    Witness {
        #[command(flatten)]
        sys: SysArgs,
        #[arg(short = 'n', default_value_t = 16)]
        n: usize,
    },
    /// Residue systems.
    Residue {
        #[command(subcommand)]
        cmd: ResidueCmd,
    },
    /// Algebraic series and automata.
    Christol {
        #[command(subcommand)]
        cmd: ChristolCmd,
    },
    /// β-expansions in F_q((1/z)).
    Beta {
        #[command(subcommand)]
        cmd: BetaCmd,
    },
    /// The reproducible test corpus.
    Corpus {
        #[command(subcommand)]
        cmd: CorpusCmd,
    },
}

#[derive(Subcommand)]
enum ResidueCmd {
    /// Completeness and additive closure of Γ.
    Check {
        #[command(flatten)]
        sys: SysArgs,
    },
    /// Γ = span of generators.
    Span {
        #[arg(long)]
        pi: String,
        #[arg(long, default_value = "vz")]
        model: String,
        /// Comma-separated generators.
        #[arg(long)]
        gens: String,
        /// Span over F_p instead of F_q.
        #[arg(long)]
        prime: bool,
    },
    /// (1 − π^L)Γ.
    Twist {
        #[command(flatten)]
        sys: SysArgs,
        #[arg(long)]
        l: u32,
    },
    /// Γ + ξ.
    Shift {
        #[command(flatten)]
        sys: SysArgs,
        #[arg(long)]
        xi: String,
    },
}

#[derive(Subcommand)]
enum ChristolCmd {
    /// Automaton for the coefficients of an algebraic series in F_q[[z]].
    Encode {
        #[command(flatten)]
        x: XArgs,
    },
    /// Algebraic relation for the series of an automaton.
    Decode {
        /// DFAO file.
        #[arg(long)]
        dfao: String,
        #[arg(long, default_value_t = 16)]
        max_degree: usize,
    },
    /// Automaton for the digits of an algebraic x over an F_p-span Γ.
    Span {
        #[command(flatten)]
        x: XArgs,
        #[command(flatten)]
        sys: SysArgs,
        #[arg(short = 'n', default_value_t = 16)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum BetaCmd {
    /// Digits a_1, …, a_N of d_β(x).
    Digits {
        #[command(flatten)]
        b: BetaArgs,
        #[arg(short = 'n', default_value_t = 16)]
        n: usize,
    },
    /// Automaton for n ↦ a_n.
    Automaton {
        #[command(flatten)]
        b: BetaArgs,
        #[arg(short = 'n', default_value_t = 512)]
        n: usize,
    },
    /// The (Γ_d, 1/β)-expansion corresponding to d_β(x).
    Bridge {
        #[command(flatten)]
        b: BetaArgs,
        #[arg(short = 'n', default_value_t = 16)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum CorpusCmd {
    /// Runs the acceptance criteria.
    Run {
        #[arg(long, default_value_t = RunConfig::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = RunConfig::default().samples)]
        samples: usize,
        /// Comma-separated criterion numbers.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

#[derive(Args)]
struct XArgs {
    /// x as a rational expression in z.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// x as a root of R(z, w) = 0.
    #[arg(long)]
    x_relation: Option<String>,
    /// Seed selecting the root.
    #[arg(long)]
    x_seed: Option<String>,
    /// x as a JSON specification file.
    #[arg(long)]
    x_spec: Option<String>,
}

#[derive(Args)]
struct SysArgs {
    #[arg(long)]
    pi: Option<String>,
    /// vz, vdeg or vp:<P>.
    #[arg(long, default_value = "vz")]
    model: String,
    /// span:g1,g2 | pspan:g1,g2 | list:r1,r2,... | system file.
    #[arg(long)]
    gamma: Option<String>,
}

#[derive(Args)]
struct BetaArgs {
    /// β as a rational expression in z.
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    beta_relation: Option<String>,
    #[arg(long)]
    beta_seed: Option<String>,
    /// x ∈ F_q[[1/z]] as a rational expression.
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    x_relation: Option<String>,
    #[arg(long)]
    x_seed: Option<String>,
}

/// Malformed input: exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Usage(msg.into()))
}

struct Ctx {
    field: Field,
    json: bool,
    precision: Option<usize>,
    cap: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let parse = e.chain().any(|c| {
                c.is::<Usage>()
                    || matches!(
                        c.downcast_ref::<fexpand::Error>(),
                        Some(fexpand::Error::Parse { .. } | fexpand::Error::Json(_))
                    )
                    || c.is::<serde_json::Error>()
            });
            ExitCode::from(if parse { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let g = cli.global;
    let field = Field::new(g.p, g.m, g.modulus)?;
    let cx = Ctx { field, json: g.json, precision: g.precision, cap: g.cap };
    match cli.cmd {
        Cmd::Expand { x, sys, n, start } => cmd_expand(&cx, &x, &sys, n, start),
        Cmd::Period { x, sys, exact, bounded, nmax, lmax } => cmd_period(&cx, &x, &sys, exact || !bounded, nmax, lmax),
        Cmd::PropertyA { sys } => cmd_property_a(&cx, &sys),
        Cmd::Witness { sys, n } => cmd_witness(&cx, &sys, n),
        Cmd::Residue { cmd } => cmd_residue(&cx, cmd),
        Cmd::Christol { cmd } => cmd_christol(&cx, cmd),
        Cmd::Beta { cmd } => cmd_beta(&cx, cmd),
        Cmd::Corpus { cmd: CorpusCmd::Run { seed, samples, only } } => {
            let config =
                RunConfig { seed, samples, cap: cx.cap.unwrap_or(RunConfig::default().cap), ..RunConfig::default() };
            let report = corpus::run(&config, &only);
            if cx.json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("{report}");
            }
            Ok(())
        }
    }
}

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {path}"))
}

fn context(cx: &Ctx, sys: &SysArgs) -> Result<BaseContext> {
    let pi = sys.pi.as_deref().ok_or_else(|| usage("--pi is required"))?;
    let model = Model::parse(&sys.model, &cx.field)?;
    Ok(BaseContext::rational(model, parse_ratfunc(pi, &cx.field)?)?)
}

fn list(s: &str, f: &Field) -> Result<Vec<Element>> {
    s.split(',').map(|g| Ok(Element::Rat(parse_ratfunc(g.trim(), f)?))).collect()
}

fn system(cx: &Ctx, sys: &SysArgs) -> Result<ResidueSystem> {
    let gamma = sys.gamma.as_deref().ok_or_else(|| usage("--gamma is required"))?;
    if let Some(g) = gamma.strip_prefix("span:") {
        return Ok(span_system(&list(g, &cx.field)?, context(cx, sys)?)?);
    }
    if let Some(g) = gamma.strip_prefix("pspan:") {
        return Ok(span_system_prime(&list(g, &cx.field)?, context(cx, sys)?)?);
    }
    if let Some(g) = gamma.strip_prefix("list:") {
        return Ok(ResidueSystem::new(context(cx, sys)?, list(g, &cx.field)?)?);
    }
    Ok(ResidueSystem::from_json(&read(gamma)?, Some(&cx.field))?)
}

fn orientation_of(model: &str) -> Orientation {
    if model.trim() == "vdeg" {
        Orientation::Descending
    } else {
        Orientation::Ascending
    }
}

fn spec_of(cx: &Ctx, x: &XArgs, orient: Orientation) -> Result<Option<AlgebraicSpec>> {
    if let Some(path) = &x.x_spec {
        return Ok(Some(AlgebraicSpec::from_json(&read(path)?, Some(&cx.field))?));
    }
    if let Some(r) = &x.x_relation {
        return Ok(Some(AlgebraicSpec::parse(r, x.x_seed.as_deref(), &cx.field, orient)?));
    }
    Ok(None)
}

fn element(cx: &Ctx, x: &XArgs, orient: Orientation) -> Result<Element> {
    if let Some(e) = &x.x {
        return Ok(Element::Rat(parse_ratfunc(e, &cx.field)?));
    }
    match spec_of(cx, x, orient)? {
        Some(spec) => match spec.as_rational() {
            Some(r) => Ok(Element::Rat(r)),
            None => Ok(Element::stream(hensel_root(&spec)?, format!("root of {}", spec.r))),
        },
        None => Err(usage("one of --x, --x-relation or --x-spec is required")),
    }
}

fn cmd_expand(cx: &Ctx, x: &XArgs, sys: &SysArgs, n: usize, start: Option<i64>) -> Result<()> {
    let g = system(cx, sys)?;
    let xe = element(cx, x, orientation_of(&sys.model))?;
    let d = match start {
        Some(m) => expand_from(&xe, &g, m)?,
        None => expand(&xe, &g)?,
    };
    if cx.json {
        println!("{}", serde_json::to_string(&d.to_file(n)?)?);
    } else {
        for e in d.digit_elements(n)? {
            println!("{e}");
        }
    }
    Ok(())
}

fn cmd_period(cx: &Ctx, x: &XArgs, sys: &SysArgs, exact: bool, nmax: usize, lmax: usize) -> Result<()> {
    let g = system(cx, sys)?;
    let xe = element(cx, x, orientation_of(&sys.model))?;
    let cert = if exact {
        let r = xe.as_rat().ok_or_else(|| anyhow!("exact detection needs a rational x"))?;
        detect_period_exact(r, &g, cx.cap.unwrap_or(fexpand::expand::DEFAULT_STATE_CAP))?
    } else {
        detect_period_bounded(&expand(&xe, &g)?, nmax, lmax)?
    };
    if cx.json {
        println!("{}", serde_json::to_string(&cert)?);
    } else {
        println!("{cert}");
    }
    Ok(())
}

fn cmd_property_a(cx: &Ctx, sys: &SysArgs) -> Result<()> {
    let ctx = context(cx, sys)?;
    let gamma = match sys.gamma {
        Some(_) => system(cx, sys)?.reps().to_vec(),
        None => Vec::new(),
    };
    let pa = property_a_check(&ctx, &gamma);
    if cx.json {
        println!("{}", serde_json::to_string(&pa)?);
    } else {
        println!("{pa}");
    }
    Ok(())
}

fn cmd_witness(cx: &Ctx, sys: &SysArgs, n: usize) -> Result<()> {
    let g = system(cx, sys)?;
    let w = lemma21_witness(&g)?;
    let d = expand(&Element::Rat(w.clone()), &g)?;
    if cx.json {
        println!("{}", json!({ "x": w.to_string(), "expansion": d.to_file(n)? }));
    } else {
        println!("x = {w}");
        for e in d.digit_elements(n)? {
            println!("{e}");
        }
    }
    Ok(())
}

fn print_system(cx: &Ctx, g: &ResidueSystem) -> Result<()> {
    if cx.json {
        println!("{}", g.to_json()?);
    } else {
        for r in g.reps() {
            println!("{r}");
        }
    }
    Ok(())
}

fn cmd_residue(cx: &Ctx, cmd: ResidueCmd) -> Result<()> {
    match cmd {
        ResidueCmd::Check { sys } => {
            let g = system(cx, &sys)?;
            let complete = check_complete(g.reps(), g.ctx())?;
            let closed = g.rational_reps().map(|r| is_additively_closed(&r));
            if cx.json {
                println!("{}", json!({ "size": g.len(), "complete": complete, "additively_closed": closed }));
            } else {
                println!("size: {}", g.len());
                println!("complete: {complete}");
                match closed {
                    Some(c) => println!("additively closed: {c}"),
                    None => println!("additively closed: unknown (stream digits)"),
                }
            }
            Ok(())
        }
        ResidueCmd::Span { pi, model, gens, prime } => {
            let sys = SysArgs { pi: Some(pi), model, gamma: None };
            let ctx = context(cx, &sys)?;
            let gens = list(&gens, &cx.field)?;
            let g = if prime { span_system_prime(&gens, ctx)? } else { span_system(&gens, ctx)? };
            print_system(cx, &g)
        }
        ResidueCmd::Twist { sys, l } => print_system(cx, &twist_system(&system(cx, &sys)?, l)?),
        ResidueCmd::Shift { sys, xi } => {
            let xi = Element::Rat(parse_ratfunc(&xi, &cx.field)?);
            print_system(cx, &shift_system(&system(cx, &sys)?, &xi)?)
        }
    }
}

fn cmd_christol(cx: &Ctx, cmd: ChristolCmd) -> Result<()> {
    let check = cx.precision.unwrap_or(fexpand::christol::DEFAULT_VERIFY);
    match cmd {
        ChristolCmd::Encode { x } => {
            let spec = match (&x.x, spec_of(cx, &x, Orientation::Ascending)?) {
                (Some(e), _) => AlgebraicSpec::rational(&parse_ratfunc(e, &cx.field)?, Orientation::Ascending),
                (None, Some(s)) => s,
                (None, None) => return Err(usage("one of --x, --x-relation or --x-spec is required")),
            };
            let ore = ore_form(&spec, check)?;
            let m = encode_with(&spec, &ore, check)?;
            if cx.json {
                println!("{}", m.to_json());
            } else {
                println!("ore form: {ore} = 0");
                println!("states: {}", m.len());
                println!("{}", m.to_json());
            }
            Ok(())
        }
        ChristolCmd::Decode { dfao, max_degree } => {
            let m = Dfao::from_json(&read(&dfao)?)?;
            let rep = decode(&m, &cx.field, max_degree, check)?;
            if cx.json {
                println!(
                    "{}",
                    json!({ "relation": rep.bipoly.to_string(), "additive": rep.relation.to_string(), "verified_to": rep.verified_to })
                );
            } else {
                println!("{rep}");
            }
            Ok(())
        }
        ChristolCmd::Span { x, sys, n } => {
            let g = system(cx, &sys)?;
            let xe = element(cx, &x, orientation_of(&sys.model))?;
            let sc = span_christol(&xe, &g, check.max(n))?;
            if cx.json {
                println!(
                    "{}",
                    json!({ "start": sc.expansion.start(), "dfao": sc.dfao, "expansion": sc.expansion.to_file(n)? })
                );
            } else {
                println!("start: {}", sc.expansion.start());
                for (i, c) in sc.components.iter().enumerate() {
                    println!("component {i}: {} = 0 ({} states)", c.relation, c.dfao.len());
                }
                println!("states: {}", sc.dfao.len());
                for e in sc.expansion.digit_elements(n)? {
                    println!("{e}");
                }
            }
            Ok(())
        }
    }
}

fn beta_context(cx: &Ctx, b: &BetaArgs) -> Result<BetaContext> {
    if let Some(r) = &b.beta_relation {
        let spec = AlgebraicSpec::parse(r, b.beta_seed.as_deref(), &cx.field, Orientation::Descending)?;
        return Ok(BetaContext::from_spec(&spec)?);
    }
    let e = b.beta.as_deref().ok_or_else(|| usage("one of --beta or --beta-relation is required"))?;
    let r = parse_ratfunc(e, &cx.field)?;
    Ok(BetaContext::from_spec(&AlgebraicSpec::rational(&r, Orientation::Descending))?)
}

fn beta_x(cx: &Ctx, b: &BetaArgs) -> Result<AlgebraicSpec> {
    if let Some(r) = &b.x_relation {
        return Ok(AlgebraicSpec::parse(r, b.x_seed.as_deref(), &cx.field, Orientation::Descending)?);
    }
    let e = b.x.as_deref().ok_or_else(|| usage("one of --x or --x-relation is required"))?;
    Ok(AlgebraicSpec::rational(&parse_ratfunc(e, &cx.field)?, Orientation::Descending))
}

fn cmd_beta(cx: &Ctx, cmd: BetaCmd) -> Result<()> {
    match cmd {
        BetaCmd::Digits { b, n } => {
            let ctx = beta_context(cx, &b)?;
            let x = beta_x(cx, &b)?;
            let e = match x.as_rational() {
                Some(r) => d_beta_rational(&r, &ctx, n)?,
                None => d_beta(&hensel_root(&x)?, &ctx, n)?,
            };
            if cx.json {
                println!("{}", serde_json::to_string(&BetaDigitsFile::from(&e))?);
            } else {
                print!("{e}");
            }
            Ok(())
        }
        BetaCmd::Automaton { b, n } => {
            let ctx = beta_context(cx, &b)?;
            let m = beta_automaton(&beta_x(cx, &b)?, &ctx, n)?;
            if cx.json {
                println!("{}", m.dfao.to_json());
            } else {
                println!("deg beta: {}", m.d);
                println!("states: {}", m.dfao.len());
                println!("outputs: code(a) = sum of code(c_i)*q^i for a = sum c_i z^i");
                println!("{}", m.dfao.to_json());
            }
            Ok(())
        }
        BetaCmd::Bridge { b, n } => {
            let ctx = beta_context(cx, &b)?;
            let x: LaurentStream = hensel_root(&beta_x(cx, &b)?)?;
            let br = bridge(&x, &ctx, n)?;
            let digits: Vec<String> = br.expansion.digit_elements(n)?.iter().map(|e| e.to_string()).collect();
            if cx.json {
                println!("{}", json!({ "d": ctx.d(), "correction": br.correction.0, "digits": digits }));
            } else {
                println!(
                    "expanding beta*x/z^{} - {}*z over Γ_{} with pi = 1/beta",
                    ctx.d() - 1,
                    br.correction.0,
                    ctx.d()
                );
                for d in digits {
                    println!("{d}");
                }
            }
            Ok(())
        }
    }
}
