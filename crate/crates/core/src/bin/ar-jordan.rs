use std::fmt::Write as _;
use std::process::ExitCode;

use ar_jordan::classifier::{
    benson_constraint, carlson_indecomposability, carlson_type_set, endo_trivial, format_type_set, sl2_family_types,
    BensonCheck, Descriptor, ModuleSize, Sl2Family,
};
use ar_jordan::component::{build_cartan_pair, tube_profile, Component, ComponentSpec};
use ar_jordan::jordan::{dominance_compare, restrict};
use ar_jordan::oracle::{self, jordan_type_of, pi_point_sweep, pi_point_sweep_type};
use ar_jordan::quiver::{minimal_additive_function, Generator, TreeClass, VertexFunction, WindowSpec};
use ar_jordan::{DominanceConvention, Error, JordanType};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "ar-jordan",
    version,
    about = "Jordan types along stable Auslander-Reiten components"
)]
struct Cli {
    /// Characteristic / block-size bound.
    #[arg(long, global = true)]
    p: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for quasi-length grids.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Statistics and operations on Jordan types.
    #[command(subcommand)]
    Jt(JtCmd),
    /// Propagate a component profile over a quasi-length range.
    Component(ComponentArgs),
    /// Build a matrix model and compare its Jordan type with the formula.
    Oracle(OracleArgs),
    /// Translation-quiver windows and additive functions.
    #[command(subcommand)]
    Quiver(QuiverCmd),
    /// Carlson-module and endo-trivial rule engine.
    Classify(ClassifyArgs),
}

#[derive(Subcommand)]
enum JtCmd {
    Dim(JtArg),
    Ker(JtAtArg),
    Image(JtAtArg),
    Psi(JtAtArg),
    Stable(JtArg),
    Syzygy(JtArg),
    /// Type of `t^j` on a single block `[i]` or on a whole type.
    Restrict {
        #[arg(long, conflicts_with = "jt")]
        i: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        jt: Option<String>,
        #[arg(long)]
        j: usize,
    },
    Dominance {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, value_enum, default_value_t = Convention::Image)]
        convention: Convention,
    },
}

#[derive(Args)]
struct JtArg {
    #[arg(long, allow_hyphen_values = true)]
    jt: String,
}

#[derive(Args)]
struct JtAtArg {
    #[arg(long, allow_hyphen_values = true)]
    jt: String,
    #[arg(long)]
    m: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    /// Image dimensions of powers of t.
    Image,
    Cfp,
}

#[derive(Args)]
struct ComponentArgs {
    /// Path to a JSON spec, inline JSON, or the built-in name `heisenberg`.
    #[arg(long)]
    spec: String,
    #[arg(long, default_value_t = 1)]
    ql_min: u64,
    #[arg(long, default_value_t = 5)]
    ql_max: u64,
    /// Recover the quasi-simple relative projective multiplicities.
    #[arg(long)]
    solve: bool,
}

#[derive(Args)]
struct OracleArgs {
    /// heisenberg, abelian-alpha, abelian-beta, ga2, ga2-alpha, sl2s-e, sl2s-f,
    /// simple-e, simple-f, block, sweep or model.
    name: String,
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    base_block: Option<usize>,
    /// JSON model (path or inline) for `model`.
    #[arg(long)]
    model: Option<String>,
    /// Number of random conjugations to test.
    #[arg(long)]
    fuzz: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum QuiverCmd {
    /// Draw a window, optionally checking a vertex function.
    Window {
        /// Window spec JSON (path or inline).
        #[arg(long)]
        spec: String,
        /// `ql`, `const:C`, `affine:S:B` or `values:v0,v1,...`.
        #[arg(long)]
        check_additive: Option<String>,
    },
    /// Admissibility of the group generated by `tau^k`.
    Admissible {
        #[arg(long)]
        spec: String,
        #[arg(long, allow_hyphen_values = true)]
        tau_power: i64,
    },
    /// Minimal additive function of a tree class.
    Minimal {
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 8)]
        span: usize,
    },
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct ClassifyArgs {
    /// Descriptor JSON (path or inline).
    #[arg(long)]
    descriptor: Option<String>,
    #[command(subcommand)]
    sub: Option<ClassifyCmd>,
}

#[derive(Subcommand)]
enum ClassifyCmd {
    /// Endo-triviality of a set of types separated by `;`.
    Endo {
        #[arg(long, allow_hyphen_values = true)]
        types: String,
    },
    /// Check a constant type `[i] + n[p]` against the `i in {1, p-1}` constraint.
    Benson {
        #[arg(long, allow_hyphen_values = true)]
        jt: String,
        #[arg(long)]
        cx2: bool,
    },
    /// Predicted types for the SL(2) families.
    Sl2 {
        #[arg(long, default_value = "SL2_1")]
        family: String,
        #[arg(long)]
        i: usize,
        #[arg(long, default_value_t = 0)]
        pi_dim: u64,
        #[arg(long, conflicts_with = "ql")]
        dim: Option<u64>,
        #[arg(long)]
        ql: Option<u64>,
    },
}

enum Failure {
    Parse(String),
    Validation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_parse() {
            Failure::Parse(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Parse(format!("bad JSON: {e}"))
    }
}

type Out = Result<String, Failure>;

struct Ctx {
    p: Option<usize>,
    format: Option<Format>,
    jobs: usize,
}

impl Ctx {
    fn p(&self) -> Result<usize, Failure> {
        self.p.ok_or_else(|| Failure::Parse("--p is required".into()))
    }

    /// Checks `--p`, when given, against the modulus of an input object.
    fn agree(&self, p: usize) -> Result<(), Failure> {
        match self.p {
            Some(q) if q != p => Err(Error::ModulusMismatch(q, p).into()),
            _ => Ok(()),
        }
    }

    fn json(&self) -> bool {
        self.format == Some(Format::Json)
    }

    fn fmt_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

fn read_input(arg: &str) -> Result<String, Failure> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::Parse(format!("cannot read {arg}: {e}")))
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn jt_value(jt: &JordanType) -> Value {
    json!({ "type": jt, "text": jt.to_string() })
}

fn big_value(n: &BigUint) -> Value {
    match u64::try_from(n) {
        Ok(v) => json!(v),
        Err(_) => json!(n.to_string()),
    }
}

fn run_jt(ctx: &Ctx, cmd: &JtCmd) -> Out {
    let p = ctx.p()?;
    let parse = |s: &str| JordanType::parse(p, s);
    let number = |label: &str, n: BigUint| {
        if ctx.json() {
            to_json(&json!({ label: big_value(&n) }))
        } else {
            format!("{n}\n")
        }
    };
    let jt_out = |jt: JordanType| {
        if ctx.json() {
            to_json(&jt_value(&jt))
        } else {
            format!("{jt:#}\n")
        }
    };
    Ok(match cmd {
        JtCmd::Dim(a) => number("dim", parse(&a.jt)?.dimension()),
        JtCmd::Ker(a) => number("ker", parse(&a.jt)?.ker_dim(a.m)?),
        JtCmd::Image(a) => number("image", parse(&a.jt)?.image_dim(a.m)?),
        JtCmd::Psi(a) => number("psi", parse(&a.jt)?.psi(a.m)?),
        JtCmd::Stable(a) => jt_out(parse(&a.jt)?.stable_part()),
        JtCmd::Syzygy(a) => jt_out(parse(&a.jt)?.syzygy()),
        JtCmd::Restrict { i, jt, j } => match (i, jt) {
            (Some(i), None) => jt_out(restrict(*i, *j, p)?),
            (None, Some(t)) => jt_out(parse(t)?.restrict_type(*j)?),
            _ => return Err(Failure::Parse("restrict needs exactly one of --i and --jt".into())),
        },
        JtCmd::Dominance { a, b, convention } => {
            let conv = match convention {
                Convention::Image => DominanceConvention::PaperOrder,
                Convention::Cfp => DominanceConvention::CfpOrder,
            };
            let r = dominance_compare(&parse(a)?, &parse(b)?, conv)?;
            if ctx.json() {
                to_json(&json!({ "result": r.to_string() }))
            } else {
                format!("{r}\n")
            }
        }
    })
}

fn heisenberg_spec(p: usize) -> Result<Component, Failure> {
    let seed = jordan_type_of(&oracle::heisenberg_model(p)?);
    let mut n = vec![BigUint::from(0u8); p - 1];
    n[0] = BigUint::from(1u8);
    Ok(Component::Tube(tube_profile(&seed, &n, &build_cartan_pair(p)?, true)?))
}

fn run_component(ctx: &Ctx, args: &ComponentArgs) -> Out {
    let (p, component) = if args.spec == "heisenberg" {
        let p = ctx.p()?;
        (p, heisenberg_spec(p)?)
    } else {
        let spec: ComponentSpec = serde_json::from_str(&read_input(&args.spec)?)?;
        ctx.agree(spec.p)?;
        (spec.p, spec.build()?)
    };
    if let Component::Tube(profile) = &component {
        profile.validate()?;
    }
    if args.ql_min == 0 || args.ql_min > args.ql_max {
        return Err(Failure::Parse("need 1 <= ql-min <= ql-max".into()));
    }
    let qls: Vec<u64> = (args.ql_min..=args.ql_max).collect();
    let types = eval_grid(&component, &qls, ctx.jobs)?;
    let rows = component.rows().min(p);
    let solved = if args.solve { Some(component.solve()?) } else { None };

    if ctx.json() {
        let table: Vec<Value> = qls
            .iter()
            .zip(&types)
            .map(|(q, t)| {
                let alpha: Vec<Value> = (1..=rows).map(|i| big_value(&t.multiplicity(i))).collect();
                json!({ "ql": q, "alpha": alpha, "text": t.to_string() })
            })
            .collect();
        let mut out = json!({ "p": p, "rows": table });
        if let Some(s) = &solved {
            out["solve"] = json!({
                "n": s.n.iter().map(big_value).collect::<Vec<_>>(),
                "locally_split": s.locally_split,
                "inferred_tp": s.inferred_tp,
            });
        }
        return Ok(to_json(&out));
    }
    let mut out = String::from("ql\ti\talpha\n");
    for (q, t) in qls.iter().zip(&types) {
        for i in 1..=rows {
            writeln!(out, "{q}\t{i}\t{}", t.multiplicity(i)).unwrap();
        }
    }
    if let Some(s) = solved {
        let n: Vec<_> = s.n.iter().map(ToString::to_string).collect();
        writeln!(out, "n = ({})", n.join(",")).unwrap();
        if s.locally_split {
            out.push_str("locally split\n");
        }
    }
    Ok(out)
}

/// Evaluates the component on each quasi-length, splitting the grid across
/// `jobs` threads; results come back in input order.
fn eval_grid(component: &Component, qls: &[u64], jobs: usize) -> Result<Vec<JordanType>, Error> {
    let chunk = qls.len().div_ceil(jobs.max(1)).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = qls
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|&q| component.at(q)).collect::<Result<Vec<_>, _>>()))
            .collect();
        let mut out = Vec::with_capacity(qls.len());
        for h in handles {
            out.extend(h.join().expect("worker panicked")?);
        }
        Ok(out)
    })
}

fn need(v: Option<usize>, flag: &str) -> Result<usize, Failure> {
    v.ok_or_else(|| Failure::Parse(format!("--{flag} is required")))
}

fn run_oracle(ctx: &Ctx, args: &OracleArgs) -> Out {
    use oracle::*;
    if args.name == "sweep" {
        return run_sweep(ctx, args);
    }
    let (model, expected) = if args.name == "model" {
        let text = read_input(
            args.model
                .as_deref()
                .ok_or_else(|| Failure::Parse("--model is required".into()))?,
        )?;
        let spec: ModelSpec = serde_json::from_str(&text)?;
        ctx.agree(spec.p as usize)?;
        (spec.build()?, None)
    } else {
        let p = ctx.p()?;
        let parse = |s: String| JordanType::parse(p, &s);
        let (model, expected) = match args.name.as_str() {
            "heisenberg" => {
                let text: Vec<_> = (1..p).map(|l| format!("2[{l}]")).chain([format!("[{p}]")]).collect();
                (heisenberg_model(p)?, parse(text.join("+"))?)
            }
            "abelian-alpha" => (abelian_rank2_models(p)?.0, parse(format!("{p}[1]"))?),
            "abelian-beta" => (abelian_rank2_models(p)?.1, parse(format!("{}[1]+[2]", p - 2))?),
            "ga2-alpha" => (ga2_model(p)?.0, parse(format!("{p}[1]"))?),
            "ga2" => (ga2_model(p)?.1, restrict(p, 2, p)?),
            "sl2s-e" => {
                let i = need(args.i, "i")?;
                (sl2s_models(p, i)?.0, parse(format!("[{i}]+[{}]", p - i))?)
            }
            "sl2s-f" => (sl2s_models(p, need(args.i, "i")?)?.1, parse(format!("[{p}]"))?),
            "simple-e" | "simple-f" => {
                let n = need(args.n, "n")?;
                let (e, f) = sl2_simple_models(p, n)?;
                (if args.name == "simple-e" { e } else { f }, parse(format!("[{n}]"))?)
            }
            "block" => {
                let (i, j) = (need(args.i, "i")?, need(args.j, "j")?);
                let model = jordan_block(p, i)?.power(j)?;
                let expected = restrict(i, j, p)?;
                (model, expected)
            }
            other => return Err(Failure::Parse(format!("unknown model {other:?}"))),
        };
        (model, Some(expected))
    };
    let found = jordan_type_of(&model);
    let pass = expected.as_ref().map(|e| found.same_blocks(e));
    let fuzz = args
        .fuzz
        .map(|trials| conjugation_fuzz(&model, trials, args.seed))
        .transpose()?;
    let fuzz_ok = fuzz.as_ref().is_none_or(|r| r.failures == 0);

    let out = if ctx.json() {
        let mut v = json!({ "model": args.name, "dim": model.dim(), "found": jt_value(&found) });
        if let Some(e) = &expected {
            v["expected"] = jt_value(e);
            v["pass"] = json!(pass == Some(true));
        }
        if let Some(r) = &fuzz {
            v["fuzz"] = json!({ "trials": r.trials, "failures": r.failures });
        }
        to_json(&v)
    } else {
        let mut out = match (pass, &expected) {
            (Some(true), _) => format!("{found} PASS\n"),
            (Some(false), Some(e)) => format!("{found} FAIL (expected {e})\n"),
            _ => format!("{found}\n"),
        };
        if let Some(r) = &fuzz {
            let verdict = if r.failures == 0 { "PASS" } else { "FAIL" };
            writeln!(out, "fuzz {} trials, {} failures {verdict}", r.trials, r.failures).unwrap();
        }
        out
    };
    if pass == Some(false) || !fuzz_ok {
        print!("{out}");
        return Err(Failure::Validation("oracle disagrees with the formula".into()));
    }
    Ok(out)
}

fn run_sweep(ctx: &Ctx, args: &OracleArgs) -> Out {
    let p = ctx.p()?;
    let n = need(args.base_block, "base-block")?;
    let model = oracle::jordan_block(p, n)?;
    let model = oracle::NilpotentModel::new(p as u64, model.matrix().clone())?;
    let swept = pi_point_sweep(&model)?;
    let formula = pi_point_sweep_type(&JordanType::block(p, n)?)?;
    let pass = swept == formula;
    let out = if ctx.json() {
        let types: Vec<Value> = swept.iter().map(jt_value).collect();
        to_json(&json!({ "base_block": n, "types": types, "count": swept.len(), "pass": pass }))
    } else {
        let mut out = String::new();
        for t in &swept {
            writeln!(out, "{t}").unwrap();
        }
        writeln!(
            out,
            "{} distinct types {}",
            swept.len(),
            if pass { "PASS" } else { "FAIL" }
        )
        .unwrap();
        out
    };
    if !pass {
        print!("{out}");
        return Err(Failure::Validation("sweep disagrees with the formula".into()));
    }
    Ok(out)
}

/// Parses `ql`, `const:C`, `affine:S:B` or `values:v0,v1,...`.
fn vertex_function<'w>(w: &'w ar_jordan::quiver::QuiverWindow, text: &str) -> Result<VertexFunction<'w>, Failure> {
    let bad = || Failure::Parse(format!("bad function {text:?}"));
    let num = |s: &str| s.trim().parse::<i64>().map_err(|_| bad());
    let (head, rest) = text.split_once(':').unwrap_or((text, ""));
    let affine = |s: i64, b: i64| -> Result<VertexFunction<'w>, Failure> {
        let values = (0..w.vertices().len())
            .map(|v| {
                let q = w
                    .ql(v)
                    .ok_or_else(|| Failure::Validation("window has no quasi-lengths".into()))?;
                u64::try_from(s * q as i64 + b)
                    .map_err(|_| Failure::Validation(format!("function is negative at quasi-length {q}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VertexFunction::new(w, values)?)
    };
    match head {
        "ql" if rest.is_empty() => affine(1, 0),
        "const" => {
            let c = u64::try_from(num(rest)?).map_err(|_| bad())?;
            Ok(VertexFunction::from_fn(w, |_| c))
        }
        "affine" => {
            let (s, b) = rest.split_once(':').ok_or_else(bad)?;
            affine(num(s)?, num(b)?)
        }
        "values" => {
            let values = rest
                .split(',')
                .map(|s| s.trim().parse::<u64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(VertexFunction::new(w, values)?)
        }
        _ => Err(bad()),
    }
}

fn window_from(spec: &str) -> Result<ar_jordan::quiver::QuiverWindow, Failure> {
    let spec: WindowSpec = serde_json::from_str(&read_input(spec)?)?;
    Ok(spec.build()?)
}

fn run_quiver(ctx: &Ctx, cmd: &QuiverCmd) -> Out {
    match cmd {
        QuiverCmd::Window { spec, check_additive } => {
            let w = window_from(spec)?;
            let f = check_additive.as_deref().map(|t| vertex_function(&w, t)).transpose()?;
            match ctx.fmt_or(Format::Dot) {
                Format::Dot => Ok(w.to_dot(f.as_ref())),
                Format::Json => {
                    let mut v = json!({
                        "vertices": w.vertices().iter().map(ToString::to_string).collect::<Vec<_>>(),
                        "arrows": w.arrows().len(),
                    });
                    if let Some(f) = &f {
                        v["report"] = serde_json::to_value(f.classify()).expect("serializable");
                    }
                    Ok(to_json(&v))
                }
                Format::Tsv => {
                    let Some(f) = f else {
                        let mut out = String::from("vertex\tinterior\tql\n");
                        for (i, v) in w.vertices().iter().enumerate() {
                            let ql = w.ql(i).map_or("-".into(), |q| q.to_string());
                            writeln!(out, "{v}\t{}\t{ql}", w.is_interior(i)).unwrap();
                        }
                        return Ok(out);
                    };
                    let mut out = String::from("vertex\tlhs\trhs\tstatus\n");
                    for c in f.checks() {
                        let status = if c.lhs == c.rhs { "PASS" } else { "FAIL" };
                        writeln!(out, "{}\t{}\t{}\t{status}", w.vertices()[c.vertex], c.lhs, c.rhs).unwrap();
                    }
                    let r = f.classify();
                    writeln!(
                        out,
                        "subadditive={} additive={} level={:?}",
                        r.is_subadditive, r.is_additive, r.eventual_level
                    )
                    .unwrap();
                    Ok(out)
                }
            }
        }
        QuiverCmd::Admissible { spec, tau_power } => {
            let w = window_from(spec)?;
            let a = w.check_admissible(&Generator::TauPower(*tau_power))?;
            if ctx.json() {
                return Ok(to_json(&json!({
                    "admissible": a.admissible,
                    "tested": a.tested,
                    "violation": a.violation.map(|(x, y)| [x.to_string(), y.to_string()]),
                })));
            }
            Ok(match a.violation {
                None => format!("admissible ({} vertices tested)\n", a.tested),
                Some((x, y)) => format!("not admissible: {x} and {y}\n"),
            })
        }
        QuiverCmd::Minimal { class, span } => {
            let tc: TreeClass = class.parse()?;
            let m = minimal_additive_function(&tc, *span)?;
            let image = m.image_size.map_or("unbounded".to_string(), |n| n.to_string());
            match ctx.fmt_or(Format::Tsv) {
                Format::Dot => Ok(m.graph.to_dot(Some(&m.values))),
                Format::Json => Ok(to_json(&m)),
                Format::Tsv => {
                    let mut out = String::from("node\tvalue\n");
                    for (label, v) in m.graph.labels.iter().zip(&m.values) {
                        writeln!(out, "{label}\t{v}").unwrap();
                    }
                    writeln!(out, "{} labeled nodes, image size {image}", m.values.len()).unwrap();
                    Ok(out)
                }
            }
        }
    }
}

fn run_classify(ctx: &Ctx, args: &ClassifyArgs) -> Out {
    match (&args.sub, &args.descriptor) {
        (None, Some(d)) => {
            let desc: Descriptor = serde_json::from_str(&read_input(d)?)?;
            ctx.agree(desc.p as usize)?;
            let types = carlson_type_set(&desc)?;
            let verdict = carlson_indecomposability(&desc)?;
            if ctx.json() {
                let types: Vec<_> = types.iter().map(ToString::to_string).collect();
                return Ok(to_json(&json!({ "types": types, "verdict": verdict })));
            }
            let mut out = format!("{} ; {}", format_type_set(&types), verdict.kind);
            if let Some(rule) = &verdict.rule {
                write!(out, " ; {rule}").unwrap();
            }
            out.push('\n');
            Ok(out)
        }
        (Some(ClassifyCmd::Endo { types }), None) => {
            let p = ctx.p()?;
            let set = types
                .split(';')
                .map(|s| JordanType::parse(p, s.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            let ok = endo_trivial(&set)?;
            Ok(if ctx.json() {
                to_json(&json!({ "endo_trivial": ok }))
            } else {
                format!("{ok}\n")
            })
        }
        (Some(ClassifyCmd::Benson { jt, cx2 }), None) => {
            let jt = JordanType::parse(ctx.p()?, jt)?;
            let text = match benson_constraint(&jt, *cx2)? {
                BensonCheck::Ok => "ok".to_string(),
                BensonCheck::Violation { i } => format!("violation: stable block [{i}]"),
                BensonCheck::OkWithCaveat { caveat, .. } => format!("ok with caveat: {caveat}"),
            };
            Ok(if ctx.json() {
                to_json(&json!({ "result": text }))
            } else {
                text + "\n"
            })
        }
        (
            Some(ClassifyCmd::Sl2 {
                family,
                i,
                pi_dim,
                dim,
                ql,
            }),
            None,
        ) => {
            let family: Sl2Family = family.parse()?;
            let size = match (dim, ql) {
                (Some(d), None) => ModuleSize::Dim((*d).into()),
                (None, Some(q)) => ModuleSize::Ql((*q).into()),
                _ => return Err(Failure::Parse("give exactly one of --dim and --ql".into())),
            };
            let set = sl2_family_types(ctx.p()?, family, *i, *pi_dim, &size)?;
            if ctx.json() {
                return Ok(to_json(&set.iter().map(jt_value).collect::<Vec<_>>()));
            }
            let items: Vec<_> = set.iter().map(ToString::to_string).collect();
            Ok(format!("{{{}}}\n", items.join(", ")))
        }
        _ => Err(Failure::Parse("classify needs --descriptor or a subcommand".into())),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let ctx = Ctx {
        p: cli.p,
        format: cli.format,
        jobs: cli.jobs,
    };
    let result = match &cli.command {
        Command::Jt(cmd) => run_jt(&ctx, cmd),
        Command::Component(args) => run_component(&ctx, args),
        Command::Oracle(args) => run_oracle(&ctx, args),
        Command::Quiver(cmd) => run_quiver(&ctx, cmd),
        Command::Classify(args) => run_classify(&ctx, args),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
