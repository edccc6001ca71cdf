use std::path::Path;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use lcsa::cend::{GeneralizedScalar, GroupSpec};
use lcsa::frontend::{self, Program};
use lcsa::hilbert::{rationality_probe, series};
use lcsa::solver::{solve, solve_interior};
use lcsa::verify::{summary_table, verify_many};
use lcsa::{
    Algebra, DegreeBound, EquationKind, HilbertWindow, InteriorKind, Morphism, Outcome, Parity, PropositionId,
    Rational, Twist, VerifyParams,
};

#[derive(Parser, Debug)]
#[command(name = "lcsa", version, about = "Derivation spaces of Lie conformal superalgebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the axioms of an algebra.
    Check(Common),
    /// Solve for a derivation-type space.
    Solve(Common),
    /// Solve for generalized derivations with their companion maps.
    SolveGder(Common),
    /// Solve one piece of an interior of CDer over the group generated by --sigma.
    Interior(Common),
    /// Hilbert series of an interior over a power window.
    Hilbert(Common),
    /// Run structural property checks.
    Verify(Common),
    /// Run every task declared in a file.
    Report(Common),
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Source file, or `builtin:NAME`.
    file: String,
    /// Algebra to use when the file declares several.
    #[arg(long)]
    algebra: Option<String>,
    /// Degree bound in d.
    #[arg(long)]
    dp: Option<u32>,
    /// Degree bound in the spectral variable.
    #[arg(long)]
    dl: Option<u32>,
    /// even, odd or both.
    #[arg(long)]
    parity: Option<String>,
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    sigma_prime: Option<String>,
    /// Comma-separated triple, e.g. 1,2,3.
    #[arg(long, allow_hyphen_values = true)]
    abg: Option<String>,
    /// Proposition identifier or `all`.
    #[arg(long)]
    prop: Option<String>,
    /// kmin,kmax.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// plus, minus or star.
    #[arg(long)]
    interior: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    power: Option<i64>,
    #[arg(long)]
    l0: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Reject twisting maps that are not automorphisms.
    #[arg(long)]
    strict_auto: bool,
    /// Emit JSON.
    #[arg(long)]
    json: bool,
}

/// Usage problems exit with 2; everything else is a pass/fail verdict.
enum Failure {
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Res<T> = Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Res<T> {
    Err(Failure::Usage(msg.into()))
}

struct RunResult {
    json: Value,
    text: String,
    pass: bool,
}

fn default_bound() -> Res<(u32, u32)> {
    match std::env::var("LCSA_DEFAULT_BOUND") {
        Ok(s) => {
            let parts: Vec<&str> = s.split(',').map(str::trim).collect();
            match parts.as_slice() {
                [a, b] => Ok((a.parse()?, b.parse()?)),
                [a] => {
                    let v = a.parse()?;
                    Ok((v, v))
                }
                _ => usage(format!("LCSA_DEFAULT_BOUND must be `dp,dl`, got `{s}`")),
            }
        }
        Err(_) => Ok((2, 2)),
    }
}

fn bound(o: &Common) -> Res<DegreeBound> {
    let (dp, dl) = default_bound()?;
    Ok(DegreeBound::new(o.dp.unwrap_or(dp), o.dl.unwrap_or(dl)))
}

fn parities(o: &Common) -> Res<Vec<Parity>> {
    match o.parity.as_deref().unwrap_or("both") {
        "even" => Ok(vec![Parity::Even]),
        "odd" => Ok(vec![Parity::Odd]),
        "both" => Ok(vec![Parity::Even, Parity::Odd]),
        other => usage(format!("unknown parity `{other}`")),
    }
}

fn rational(s: &str) -> Res<Rational> {
    Rational::from_str(s.trim()).map_err(|_| Failure::Usage(format!("`{s}` is not a rational number")))
}

fn triple(s: &str) -> Res<[Rational; 3]> {
    let v: Vec<Rational> = s.split(',').map(rational).collect::<Res<_>>()?;
    match <[Rational; 3]>::try_from(v) {
        Ok(t) => Ok(t),
        Err(_) => usage(format!("--abg needs three values, got `{s}`")),
    }
}

/// Algebra source: a parsed file or a built-in.
struct Source {
    program: Program,
}

fn load(file: &str) -> Res<Source> {
    if let Some(name) = file.strip_prefix("builtin:") {
        let alg = Algebra::builtin(name)?;
        return Ok(Source {
            program: Program {
                algebras: vec![alg],
                ..Program::default()
            },
        });
    }
    let text = std::fs::read_to_string(Path::new(file)).map_err(|e| Failure::Usage(format!("{file}: {e}")))?;
    match frontend::load(&text) {
        Ok(program) => Ok(Source { program }),
        Err(diags) => {
            let msgs: Vec<String> = diags.iter().map(|d| format!("{file}:{d}")).collect();
            usage(msgs.join("\n"))
        }
    }
}

impl Source {
    fn algebra(&self, name: Option<&str>) -> Res<&Algebra> {
        match name {
            Some(n) => match self.program.algebra(n) {
                Some(a) => Ok(a),
                None => usage(format!("no algebra named `{n}`")),
            },
            None => match self.program.algebras.first() {
                Some(a) => Ok(a),
                None => usage("the file declares no algebra"),
            },
        }
    }

    fn morphism(&self, alg: &Algebra, name: Option<&str>) -> Res<Morphism> {
        let name = name.unwrap_or("id");
        match self.program.morphism(alg, name) {
            Some(m) => Ok(m),
            None => usage(format!("no map named `{name}` on `{}`", alg.name())),
        }
    }
}

fn twist(alg: &Algebra, m: Morphism, strict: bool) -> Res<Twist> {
    if m.is_automorphism(alg) {
        Ok(Twist::Strict(m))
    } else if strict {
        usage(format!("`{}` is not an automorphism (--strict-auto)", m.name()))
    } else {
        Ok(Twist::Generalized(GeneralizedScalar(m)))
    }
}

fn kind(src: &Source, alg: &Algebra, o: &Common) -> Res<EquationKind> {
    let k = o.kind.as_deref().unwrap_or("der").to_ascii_lowercase().replace('-', "_");
    Ok(match k.as_str() {
        "der" => EquationKind::Der,
        "sigma_tau" => EquationKind::SigmaTau(
            twist(alg, src.morphism(alg, o.sigma.as_deref())?, o.strict_auto)?,
            twist(alg, src.morphism(alg, o.tau.as_deref())?, o.strict_auto)?,
        ),
        "abg" => {
            let [a, b, g] = triple(o.abg.as_deref().unwrap_or("1,1,1"))?;
            EquationKind::Abg(a, b, g)
        }
        "gder" => EquationKind::GDer,
        "qder" => EquationKind::QDer,
        "centroid" => EquationKind::Centroid,
        "qcentroid" | "qc" => EquationKind::QCentroid,
        "zder" => EquationKind::ZDer,
        other => return usage(format!("unknown kind `{other}`")),
    })
}

fn check(src: &Source, o: &Common) -> Res<RunResult> {
    let alg = src.algebra(o.algebra.as_deref())?;
    let r = alg.check_axioms();
    let mut text = format!("{}: {}\n", alg.name(), if r.passed { "axioms hold" } else { "axioms fail" });
    for v in &r.violations {
        text.push_str(&format!("  {} at ({}): {}\n", v.axiom, v.witness.join(", "), v.residual.join(", ")));
    }
    let mut maps = Vec::new();
    for m in src.program.maps_on(alg.name()) {
        let h = m.morphism.check_homomorphism(alg);
        text.push_str(&format!(
            "  map {}: {}\n",
            m.name,
            if h.is_homomorphism { "homomorphism" } else { "not a homomorphism" }
        ));
        maps.push(json!({"name": m.name, "homomorphism": serde_json::to_value(&h)?}));
    }
    Ok(RunResult {
        json: json!({"algebra": alg.name(), "axioms": serde_json::to_value(&r)?, "maps": maps}),
        text,
        pass: r.passed,
    })
}

fn solve_cmd(src: &Source, o: &Common, gder: bool) -> Res<RunResult> {
    let alg = src.algebra(o.algebra.as_deref())?;
    let k = if gder { EquationKind::GDer } else { kind(src, alg, o)? };
    let b = bound(o)?;
    let mut out = Vec::new();
    let mut text = String::new();
    let mut pass = true;
    for p in parities(o)? {
        let s = solve(alg, &k, p, b)?;
        pass &= s.residual_check();
        text.push_str(&format!(
            "{} {} {} at {}: dim {} over Q, {} generators over Q[d], rank at bound {}\n",
            alg.name(),
            k.label(),
            p,
            b,
            s.dim(),
            s.generator_indices().len(),
            s.rank_at_bound()
        ));
        for f in s.basis() {
            text.push_str(&format!("  {:?}\n", f.render()));
        }
        out.push(s.to_json());
    }
    Ok(RunResult {
        json: json!({"algebra": alg.name(), "spaces": out}),
        text,
        pass,
    })
}

fn interior_kind(o: &Common) -> Res<InteriorKind> {
    let s = o.interior.as_deref().unwrap_or("star");
    InteriorKind::parse(s).ok_or_else(|| Failure::Usage(format!("unknown interior `{s}`")))
}

fn interior_cmd(src: &Source, o: &Common) -> Res<RunResult> {
    let alg = src.algebra(o.algebra.as_deref())?;
    let sigma = src.morphism(alg, o.sigma.as_deref())?;
    let group = GroupSpec::cyclic(alg, &sigma)?;
    let ik = interior_kind(o)?;
    let k = o.power.unwrap_or(1);
    let b = bound(o)?;
    let mut out = Vec::new();
    let mut text = String::new();
    let mut pass = true;
    for p in parities(o)? {
        let s = solve_interior(alg, &group, k, ik, p, b)?;
        pass &= s.residual_check();
        text.push_str(&format!("{} {} at {}: dim {}, rank at bound {}\n", alg.name(), s.label(), b, s.dim(), s.rank_at_bound()));
        out.push(s.to_json());
    }
    Ok(RunResult {
        json: json!({"algebra": alg.name(), "sigma": sigma.name(), "power": k, "spaces": out}),
        text,
        pass,
    })
}

fn window(o: &Common) -> Res<(i64, i64)> {
    let s = o.window.as_deref().unwrap_or("-3,3");
    let v: Vec<i64> = s.split(',').map(|t| t.trim().parse::<i64>()).collect::<Result<_, _>>()?;
    match v.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => usage(format!("--window needs kmin,kmax, got `{s}`")),
    }
}

fn hilbert_cmd(src: &Source, o: &Common) -> Res<RunResult> {
    let alg = src.algebra(o.algebra.as_deref())?;
    let sigma = src.morphism(alg, o.sigma.as_deref())?;
    let (lo, hi) = window(o)?;
    let w = HilbertWindow::new(lo, hi, bound(o)?, interior_kind(o)?)?;
    let r = series(alg, &sigma, &w)?;
    let mut json = r.to_json();
    json["algebra"] = json!(alg.name());
    json["sigma"] = json!(sigma.name());
    let mut text = format!(
        "{} sigma={} interior={} ranks {:?} order {} verdict {}\n",
        alg.name(),
        sigma.name(),
        w.interior.as_str(),
        r.ranks(),
        r.order.map_or("infinite at window".to_string(), |n| n.to_string()),
        r.verdict()
    );
    if let Some(l0) = o.l0.or(r.order) {
        let q = rationality_probe(&r, l0)?;
        let qj = q.to_json();
        text.push_str(&format!("rationality (l0 = {l0}): {}\n", q.verdict()));
        if let Some(cf) = qj["closed_form"].as_str() {
            text.push_str(&format!("closed form: {cf}\n"));
        }
        json["closed_form"] = qj["closed_form"].clone();
        json["rationality"] = qj;
    }
    Ok(RunResult { json, text, pass: true })
}

fn verify_cmd(src: &Source, o: &Common) -> Res<RunResult> {
    let alg = src.algebra(o.algebra.as_deref())?;
    let mut p = VerifyParams::identity(alg, bound(o)?);
    p.sigma = src.morphism(alg, o.sigma.as_deref())?;
    p.tau = src.morphism(alg, o.tau.as_deref())?;
    p.sigma_prime = src.morphism(alg, o.sigma_prime.as_deref())?;
    if let Some(t) = &o.abg {
        p.abg = triple(t)?;
    }
    if let Some(d) = &o.delta {
        p.delta = rational(d)?;
    }
    if let Some(a) = &o.alpha {
        p.alpha = rational(a)?;
    }
    if o.strict_auto {
        for m in [&p.sigma, &p.tau, &p.sigma_prime] {
            twist(alg, m.clone(), true)?;
        }
    }
    let ids: Vec<PropositionId> = match o.prop.as_deref() {
        None | Some("all") => PropositionId::ALL.to_vec(),
        Some(list) => list
            .split(',')
            .map(|s| PropositionId::parse(s).ok_or_else(|| Failure::Usage(format!("unknown proposition `{s}`"))))
            .collect::<Res<_>>()?,
    };
    let reports = verify_many(&ids, alg, &p)?;
    let pass = reports.iter().all(|r| r.outcome != Outcome::Fail);
    Ok(RunResult {
        json: Value::Array(reports.iter().map(|r| r.to_json()).collect()),
        text: summary_table(&reports),
        pass,
    })
}

/// Flags equivalent to a task's options.
fn task_options(t: &frontend::Task, file: &str) -> Res<Common> {
    let num = |k: &str| -> Res<Option<u32>> { Ok(t.text(k).map(|s| s.parse()).transpose()?) };
    Ok(Common {
        file: file.to_string(),
        algebra: Some(t.algebra.clone()),
        dp: num("dp")?,
        dl: num("dl")?,
        parity: t.text("parity"),
        kind: t.text("kind"),
        sigma: t.text("sigma"),
        tau: t.text("tau"),
        sigma_prime: t.text("sigma_prime"),
        abg: t.text("abg"),
        prop: t.text("prop"),
        window: t.text("window"),
        interior: t.text("interior"),
        power: t.text("power").map(|s| s.parse()).transpose()?,
        l0: t.text("l0").map(|s| s.parse()).transpose()?,
        delta: t.text("delta"),
        alpha: t.text("alpha"),
        strict_auto: t.text("strict_auto").is_some_and(|s| s == "true"),
        json: true,
    })
}

fn dispatch(command: &str, src: &Source, o: &Common) -> Res<RunResult> {
    match command {
        "check" => check(src, o),
        "solve" => solve_cmd(src, o, false),
        "solve_gder" | "solve-gder" => solve_cmd(src, o, true),
        "interior" => interior_cmd(src, o),
        "hilbert" => hilbert_cmd(src, o),
        "verify" => verify_cmd(src, o),
        other => usage(format!("unknown command `{other}`")),
    }
}

fn report(src: &Source, o: &Common) -> Res<RunResult> {
    if src.program.tasks.is_empty() {
        return usage("the file declares no task");
    }
    let mut out = Vec::new();
    let mut text = String::new();
    let mut pass = true;
    for t in &src.program.tasks {
        let opts = task_options(t, &o.file)?;
        let r = dispatch(&t.command, src, &opts)?;
        pass &= r.pass;
        text.push_str(&format!("task {} ({}): {}\n", t.name, t.command, if r.pass { "pass" } else { "fail" }));
        out.push(json!({"task": t.name, "command": t.command, "pass": r.pass, "result": r.json}));
    }
    Ok(RunResult {
        json: Value::Array(out),
        text,
        pass,
    })
}

fn run(cli: Cli) -> Res<(RunResult, bool)> {
    let (name, o) = match &cli.command {
        Command::Check(o) => ("check", o),
        Command::Solve(o) => ("solve", o),
        Command::SolveGder(o) => ("solve_gder", o),
        Command::Interior(o) => ("interior", o),
        Command::Hilbert(o) => ("hilbert", o),
        Command::Verify(o) => ("verify", o),
        Command::Report(o) => ("report", o),
    };
    let src = load(&o.file)?;
    let out = if name == "report" { report(&src, o)? } else { dispatch(name, &src, o)? };
    Ok((out, o.json))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let is_verify = matches!(cli.command, Command::Verify(_));
    match run(cli) {
        Ok((out, json)) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable"));
                if is_verify {
                    eprint!("{}", out.text);
                }
            } else {
                print!("{}", out.text);
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
