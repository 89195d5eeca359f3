//! Command line parsing and dispatch.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use vinf_core::potential::{dirichlet, DiscreteMeasure, ValuationTree};
use vinf_core::puiseux::{log_laplacian, logplus_laplacian};
use vinf_core::richness::{chi_of, classify, matrix_alpha, Delta};
use vinf_core::polyfinder::find_positive;
use vinf_core::valuations::{compare, meet, Valuation};
use vinf_exact::{parse_rational, rat_str, ExtRational, Poly2, Rational};

use crate::algebraize::{algebraize, AdelicBranch, AlgebraizeInput, AlgebraizeReport};
use crate::error::{CliError, Result};
use crate::oracle::oracle_check;
use crate::places::Place;
use crate::scenario::{to_canonical_json, Scenario};

pub const DEFAULT_MAX_DEGREE: u32 = 6;
const ORACLE_DEPTH: usize = 8;

#[derive(Debug, Parser)]
#[command(name = "vinf", version, about = "Valuations centered at infinity on the affine plane")]
pub struct Cli {
    /// Scenario file (JSON, "format": 1).
    #[arg(short = 'f', long = "file", global = true)]
    pub file: Option<String>,
    /// Degree bound for witness searches.
    #[arg(long, global = true)]
    pub max_degree: Option<u32>,
    /// Expansion order for branches at infinity.
    #[arg(long, global = true)]
    pub precision_cap: Option<u32>,
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 100)]
    pub count: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Skewness of the named valuations (all when none are given).
    Skewness { names: Vec<String> },
    /// Thinness of the named valuations.
    Thinness { names: Vec<String> },
    /// Meet of two valuations and their relative position.
    Meet { a: String, b: String },
    /// Value of a valuation on polynomials (names or literals).
    Eval {
        valuation: String,
        #[arg(required = true)]
        polynomials: Vec<String>,
    },
    /// The matrix of skewnesses of pairwise meets.
    Matrix { names: Vec<String> },
    /// The determinant invariant χ of a set of valuations.
    Chi { names: Vec<String> },
    /// Transcendence degree classification of a set of valuations.
    Classify { names: Vec<String> },
    /// A polynomial positive on every named valuation.
    FindPositive { names: Vec<String> },
    /// Laplacian of log⁺|P|.
    Laplacian { polynomial: String },
    /// Laplacian of log|P|.
    LogLaplacian { polynomial: String },
    /// Dirichlet pairing of two measures; a polynomial stands for the
    /// Laplacian of log⁺|P|.
    Dirichlet { a: String, b: String },
    /// Random clusters checked against an independent intersection oracle.
    OracleCheck,
    /// Curve through rational points from the scenario's branches.
    Algebraize,
    /// The scenario in canonical form.
    Canonical,
}

#[derive(Debug)]
pub struct Report {
    pub text: String,
    pub json: Value,
    pub code: i32,
}

impl Report {
    fn ok(text: String, json: Value) -> Report {
        Report { text, json, code: 0 }
    }

    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            serde_json::to_string_pretty(&self.json).expect("reports serialize") + "\n"
        } else {
            self.text.clone()
        }
    }
}

fn ext(x: &ExtRational) -> String {
    x.to_string()
}

fn measure_json(mu: &DiscreteMeasure<Valuation>) -> Value {
    Value::Array(mu.atoms().iter().map(|(v, m)| json!({ "at": v.to_string(), "mass": rat_str(m) })).collect())
}

fn measure_text(out: &mut String, mu: &DiscreteMeasure<Valuation>) {
    for (v, m) in mu.atoms() {
        let _ = writeln!(out, "  {} at {}", rat_str(m), v);
    }
}

struct Ctx {
    scenario: Option<Scenario>,
    max_degree: u32,
    precision_cap: Option<u32>,
}

impl Ctx {
    fn scenario(&self) -> Result<&Scenario> {
        self.scenario.as_ref().ok_or_else(|| CliError::Input("this command needs a scenario file (-f)".into()))
    }

    fn set(&self, names: &[String]) -> Result<(Vec<String>, Vec<Valuation>)> {
        let pairs = self.scenario()?.valuation_set(names)?;
        if pairs.is_empty() {
            return Err(CliError::Input("the scenario defines no valuations".into()));
        }
        Ok(pairs.into_iter().unzip())
    }

    fn measure(&self, arg: &str) -> Result<DiscreteMeasure<Valuation>> {
        let sc = self.scenario()?;
        if let Ok(mu) = sc.measure(arg) {
            return Ok(mu.clone());
        }
        Ok(logplus_laplacian(&sc.polynomial(arg)?, self.precision_cap)?)
    }
}

fn per_valuation(ctx: &Ctx, names: &[String], label: &str, f: impl Fn(&Valuation) -> Result<ExtRational>) -> Result<Report> {
    let (names, vals) = ctx.set(names)?;
    let mut text = String::new();
    let mut map = serde_json::Map::new();
    for (n, v) in names.iter().zip(&vals) {
        let x = f(v)?;
        let _ = writeln!(text, "{label}({n}) = {x}");
        map.insert(n.clone(), Value::String(ext(&x)));
    }
    Ok(Report::ok(text, json!({ label: map })))
}

fn verdict(chi: &ExtRational) -> &'static str {
    if chi.signum() > 0 {
        "rich"
    } else {
        "not rich"
    }
}

fn cmd_classify(ctx: &Ctx, names: &[String]) -> Result<Report> {
    let (names, vals) = ctx.set(names)?;
    let c = classify(&vals, ctx.max_degree)?;
    let mut t = String::new();
    let _ = writeln!(t, "delta={}", c.delta);
    let _ = writeln!(t, "chi = {}", c.chi);
    let kept: Vec<&String> = c.reduction.kept.iter().map(|&i| &names[i]).collect();
    let _ = writeln!(t, "reduced set: {}", kept.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "));
    if let Some(p) = &c.witness_positive {
        let _ = writeln!(t, "positive witness: {p}");
    }
    if let Some(p) = &c.witness_nonneg {
        let _ = writeln!(t, "nonnegative witness: {p}");
    }
    if let Some(phi) = &c.kernel_function {
        let _ = writeln!(t, "kernel measure:");
        measure_text(&mut t, phi);
    }
    if let Some(a) = &c.thinness_integral {
        let _ = writeln!(t, "thinness integral = {a}");
    }
    if c.delta == Delta::Unknown || (c.delta == Delta::Two && c.witness_positive.is_none()) {
        let _ = writeln!(t, "note: witness searches stop at degree {}; a miss is not a proof", ctx.max_degree);
    }
    for n in &c.notes {
        let _ = writeln!(t, "note: {n}");
    }
    let j = json!({
        "delta": c.delta.to_string(),
        "chi": ext(&c.chi),
        "reduced": kept,
        "witness_positive": c.witness_positive.as_ref().map(|p| p.to_string()),
        "witness_nonnegative": c.witness_nonneg.as_ref().map(|p| p.to_string()),
        "kernel_measure": c.kernel_function.as_ref().map(measure_json),
        "thinness_integral": c.thinness_integral.as_ref().map(ext),
        "max_degree": ctx.max_degree,
        "notes": c.notes,
    });
    Ok(Report::ok(t, j))
}

fn cmd_find_positive(ctx: &Ctx, names: &[String]) -> Result<Report> {
    let (names, vals) = ctx.set(names)?;
    match find_positive(&vals, ctx.max_degree)? {
        Some(p) => {
            let mut t = format!("witness: {p}\n");
            let mut values = serde_json::Map::new();
            for (n, v) in names.iter().zip(&vals) {
                let x = v.evaluate(&p)?;
                let _ = writeln!(t, "  {n}(P) = {x}");
                values.insert(n.clone(), Value::String(ext(&x)));
            }
            Ok(Report::ok(t, json!({ "witness": p.to_string(), "values": values })))
        }
        None => {
            let t = format!(
                "not found up to degree {}; this bounds the search only and proves nothing\n",
                ctx.max_degree
            );
            Ok(Report::ok(t, json!({ "witness": null, "max_degree": ctx.max_degree })))
        }
    }
}

fn cmd_matrix(ctx: &Ctx, names: &[String]) -> Result<Report> {
    let (names, vals) = ctx.set(names)?;
    let m = matrix_alpha(&vals)?;
    let rows: Vec<Vec<String>> = (0..m.size()).map(|i| (0..m.size()).map(|j| ext(m.get(i, j))).collect()).collect();
    let width = rows.iter().flatten().chain(names.iter()).map(|s| s.len()).max().unwrap_or(1);
    let mut t = format!("{:>width$}", "");
    for n in &names {
        let _ = write!(t, "  {n:>width$}");
    }
    t.push('\n');
    for (n, row) in names.iter().zip(&rows) {
        let _ = write!(t, "{n:>width$}");
        for x in row {
            let _ = write!(t, "  {x:>width$}");
        }
        t.push('\n');
    }
    Ok(Report::ok(t, json!({ "names": names, "matrix": rows })))
}

fn cmd_meet(ctx: &Ctx, a: &str, b: &str) -> Result<Report> {
    let sc = ctx.scenario()?;
    let (va, vb) = (sc.valuation(a)?, sc.valuation(b)?);
    let w = meet(va, vb)?;
    let c = compare(va, vb)?;
    let alpha = w.skewness()?;
    let t = format!("meet = {w}\nskewness = {alpha}\n{a} vs {b}: {c}\n");
    Ok(Report::ok(t, json!({ "meet": w.to_string(), "skewness": ext(&alpha), "comparison": c.to_string() })))
}

fn cmd_eval(ctx: &Ctx, name: &str, polys: &[String]) -> Result<Report> {
    let sc = ctx.scenario()?;
    let v = sc.valuation(name)?;
    let mut t = String::new();
    let mut map = serde_json::Map::new();
    for arg in polys {
        let p = sc.polynomial(arg)?;
        let x = match ctx.precision_cap {
            Some(cap) => v.evaluate_with_cap(&p, cap)?,
            None => v.evaluate(&p)?,
        };
        let _ = writeln!(t, "{name}({p}) = {x}");
        map.insert(arg.clone(), Value::String(ext(&x)));
    }
    Ok(Report::ok(t, json!({ "valuation": name, "values": map })))
}

fn cmd_laplacian(ctx: &Ctx, arg: &str, plus: bool) -> Result<Report> {
    let p = ctx.scenario.as_ref().map_or_else(|| Ok(Poly2::parse(arg)?), |sc| sc.polynomial(arg))?;
    let mu = if plus { logplus_laplacian(&p, ctx.precision_cap)? } else { log_laplacian(&p, ctx.precision_cap)? };
    let label = if plus { "log+" } else { "log" };
    let mut t = format!("Laplacian of {label}|{p}|, total mass {}:\n", rat_str(&mu.total_mass()));
    measure_text(&mut t, &mu);
    Ok(Report::ok(t, json!({ "polynomial": p.to_string(), "kind": label, "atoms": measure_json(&mu) })))
}

fn cmd_dirichlet(ctx: &Ctx, a: &str, b: &str) -> Result<Report> {
    let (ma, mb) = (ctx.measure(a)?, ctx.measure(b)?);
    let x = dirichlet(&ValuationTree, &ma, &mb)?;
    Ok(Report::ok(format!("<{a}, {b}> = {x}\n"), json!({ "a": a, "b": b, "pairing": ext(&x) })))
}

fn cmd_oracle(seed: u64, count: usize) -> Result<Report> {
    let r = oracle_check(seed, count, ORACLE_DEPTH)?;
    let mut t = String::new();
    let _ = writeln!(t, "{}/{} α-consistency", r.alpha_consistent, r.clusters);
    let _ = writeln!(t, "{}/{} pairing consistency", r.pair_consistent, r.clusters);
    let _ = writeln!(t, "{}/{} thinness monotonicity", r.thinness_monotone, r.clusters);
    let _ = writeln!(t, "{} nodes, {} pairs, seed {seed}", r.nodes, r.pairs);
    for f in &r.failures {
        let _ = writeln!(t, "FAIL {f}");
    }
    let j = json!({
        "seed": seed,
        "clusters": r.clusters,
        "nodes": r.nodes,
        "pairs": r.pairs,
        "alpha_consistent": r.alpha_consistent,
        "pair_consistent": r.pair_consistent,
        "thinness_monotone": r.thinness_monotone,
        "failures": r.failures,
    });
    Ok(Report { text: t, json: j, code: if r.all_passed() { 0 } else { 1 } })
}

/// The algebraization input described by a scenario.
pub fn algebraize_input(sc: &Scenario, max_degree: Option<u32>, order: Option<u32>) -> Result<AlgebraizeInput> {
    let spec = sc.file.algebraize.as_ref().ok_or_else(|| CliError::Input("the scenario has no \"algebraize\" section".into()))?;
    let q = |s: &str| parse_rational(s).map_err(CliError::from);
    let mut branches = Vec::new();
    for b in &spec.branches {
        let Valuation::Curve(branch) = sc.valuation(&b.valuation)? else {
            return Err(CliError::Input(format!("{:?} is not a curve valuation", b.valuation)));
        };
        let mut radii = BTreeMap::new();
        for r in &b.radii {
            radii.insert(Place::parse(&r.place)?, q(&r.radius)?);
        }
        branches.push(AdelicBranch { name: b.valuation.clone(), branch: (**branch).clone(), radii });
    }
    let mut bounds = BTreeMap::new();
    for b in &spec.bounds {
        bounds.insert(Place::parse(&b.place)?, q(&b.bound)?);
    }
    let points = spec.points.iter().map(|(x, y)| Ok((q(x)?, q(y)?))).collect::<Result<Vec<_>>>()?;
    let max_degree = max_degree.or(spec.max_degree).or(sc.file.options.max_degree).unwrap_or(DEFAULT_MAX_DEGREE);
    Ok(AlgebraizeInput { branches, bounds, points, max_degree, order })
}

fn point_str(p: &(Rational, Rational)) -> String {
    format!("({}, {})", rat_str(&p.0), rat_str(&p.1))
}

pub fn algebraize_report(input: &AlgebraizeInput, rep: &AlgebraizeReport) -> Report {
    let mut t = String::new();
    let values: Vec<String> = rep.values.iter().map(rat_str).collect();
    let _ = writeln!(t, "witness P = {}", rep.witness);
    let _ = writeln!(t, "T = {{{}}}", values.join(", "));
    let _ = writeln!(t, "curve: {} = 0", rep.curve);
    let accepted = rep.points.iter().filter(|p| p.accepted).count();
    let _ = writeln!(t, "points: {accepted} of {} pass the hypothesis check and lie on the curve", rep.points.len());
    let mut points_json = Vec::new();
    for p in &rep.points {
        let status = if p.accepted { "kept" } else { "excluded" };
        let value = p.value.as_ref().map(|v| format!(", P = {}", rat_str(v))).unwrap_or_default();
        let _ = writeln!(t, "  {} {status}{value}", point_str(&p.point));
        let mut checks_json = Vec::new();
        for c in &p.checks {
            let members: Vec<String> = c.memberships.iter().map(|(n, m)| format!("{n}: {}", m.label())).collect();
            let _ = writeln!(
                t,
                "    at {}: |x| = {}, |y| = {}, B = {}{}; {}",
                c.place,
                rat_str(&c.abs_x),
                rat_str(&c.abs_y),
                rat_str(&c.bound),
                if c.within_bound { " (within)" } else { "" },
                members.join(", ")
            );
            checks_json.push(json!({
                "place": c.place.to_string(),
                "abs_x": rat_str(&c.abs_x),
                "abs_y": rat_str(&c.abs_y),
                "bound": rat_str(&c.bound),
                "within_bound": c.within_bound,
                "branches": c.memberships.iter().map(|(n, m)| json!({
                    "branch": n, "verdict": m.label(), "reason": m.reason()
                })).collect::<Vec<_>>(),
            }));
        }
        points_json.push(json!({
            "point": [rat_str(&p.point.0), rat_str(&p.point.1)],
            "kept": p.accepted,
            "value": p.value.as_ref().map(rat_str),
            "places": checks_json,
        }));
    }
    let mut matches_json = Vec::new();
    if rep.branch_matches.is_empty() {
        let _ = writeln!(t, "branch match: vacuous (the curve has no branches at infinity)");
    }
    for b in &rep.branch_matches {
        let verdict = match &b.matched {
            Some((n, how)) => format!("matches {n} ({how})"),
            None => "matches no input branch".to_string(),
        };
        let _ = writeln!(t, "branch {}: {verdict}", b.branch);
        matches_json.push(json!({
            "branch": b.branch.to_string(),
            "matched": b.matched.as_ref().map(|(n, _)| n.clone()),
            "agreement": b.matched.as_ref().map(|(_, h)| h.clone()),
        }));
    }
    if !rep.branch_matches.is_empty() {
        let _ = writeln!(t, "branch match: {}", if rep.all_branches_match() { "confirmed" } else { "partial" });
    }
    let declared: Vec<String> = {
        let mut ps: Vec<Place> = input.bounds.keys().copied().collect();
        for b in &input.branches {
            ps.extend(b.radii.keys().copied());
        }
        ps.sort();
        ps.dedup();
        ps.iter().map(|p| p.to_string()).collect()
    };
    let _ = writeln!(
        t,
        "places checked: inf, declared [{}], and primes in denominators; other places have integral coordinates within B = 1",
        declared.join(", ")
    );
    for n in &rep.notes {
        let _ = writeln!(t, "note: {n}");
    }
    let j = json!({
        "witness": rep.witness.to_string(),
        "values": values,
        "curve": rep.curve.to_string(),
        "points": points_json,
        "branch_matches": matches_json,
        "branch_match_confirmed": rep.all_branches_match(),
        "declared_places": declared,
        "max_degree": input.max_degree,
        "notes": rep.notes,
    });
    Report::ok(t, j)
}

fn cmd_algebraize(ctx: &Ctx, cli_degree: Option<u32>) -> Result<Report> {
    let input = algebraize_input(ctx.scenario()?, cli_degree, ctx.precision_cap)?;
    let rep = algebraize(&input)?;
    Ok(algebraize_report(&input, &rep))
}

pub fn execute(cli: &Cli) -> Result<Report> {
    let scenario = cli.file.as_deref().map(Scenario::load).transpose()?;
    let opts = scenario.as_ref().map(|s| s.file.options.clone()).unwrap_or_default();
    let max_degree = cli.max_degree.or(opts.max_degree).unwrap_or(DEFAULT_MAX_DEGREE);
    if max_degree == 0 {
        return Err(CliError::Input("--max-degree must be at least 1".into()));
    }
    let ctx = Ctx { scenario, max_degree, precision_cap: cli.precision_cap.or(opts.precision_cap) };
    match &cli.command {
        Command::Skewness { names } => per_valuation(&ctx, names, "skewness", |v| Ok(v.skewness()?)),
        Command::Thinness { names } => per_valuation(&ctx, names, "thinness", |v| Ok(v.thinness()?)),
        Command::Meet { a, b } => cmd_meet(&ctx, a, b),
        Command::Eval { valuation, polynomials } => cmd_eval(&ctx, valuation, polynomials),
        Command::Matrix { names } => cmd_matrix(&ctx, names),
        Command::Chi { names } => {
            let (names, vals) = ctx.set(names)?;
            let chi = chi_of(&vals)?;
            let t = format!("chi = {chi}\nverdict: {}\n", verdict(&chi));
            Ok(Report::ok(t, json!({ "set": names, "chi": ext(&chi), "verdict": verdict(&chi) })))
        }
        Command::Classify { names } => cmd_classify(&ctx, names),
        Command::FindPositive { names } => cmd_find_positive(&ctx, names),
        Command::Laplacian { polynomial } => cmd_laplacian(&ctx, polynomial, true),
        Command::LogLaplacian { polynomial } => cmd_laplacian(&ctx, polynomial, false),
        Command::Dirichlet { a, b } => cmd_dirichlet(&ctx, a, b),
        Command::OracleCheck => cmd_oracle(cli.seed, cli.count),
        Command::Algebraize => cmd_algebraize(&ctx, cli.max_degree),
        Command::Canonical => {
            let text = to_canonical_json(&ctx.scenario()?.file)? + "\n";
            let j: Value = serde_json::from_str(&text).map_err(|e| CliError::Internal(e.to_string()))?;
            Ok(Report::ok(text, j))
        }
    }
}

/// Outcome of one invocation: exit code, standard output, standard error.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok(r) => Outcome { code: r.code, stdout: r.render(cli.json), stderr: String::new() },
        Err(e) => {
            let stdout = if cli.json {
                serde_json::to_string_pretty(&json!({ "error": e.to_string(), "exit_code": e.exit_code() })).unwrap() + "\n"
            } else {
                String::new()
            };
            Outcome { code: e.exit_code(), stdout, stderr: format!("error: {e}\n") }
        }
    }
}
