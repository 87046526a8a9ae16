//! Command-line front end. Every command produces a [`Report`]; `--json`
//! prints it as JSON, otherwise its text lines are printed.
//!
//! Exit codes: 0 success (or a pair check that holds), 3 pair check fails,
//! 4 pair check undecided, 1 malformed input, 2 a spec violating the
//! group invariants, 5 a replayed expectation not met.

use std::path::Path;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::catalog::{self, CatalogEntry, Expect};
use crate::chartype;
use crate::endoring::{self, EndModule};
use crate::error::Error;
use crate::group::{Element, FRGroup};
use crate::linalg::{self, QMat};
use crate::oracle;
use crate::primesym::ClassKey;
use crate::qmath;
use crate::spec::{self, GroupSpec};
use crate::transit::{self, Flag, Property, RegionReport, Verdict};

#[derive(Parser, Debug)]
#[command(name = "tfag", version, about = "Exact computations with finite-rank torsion-free abelian groups")]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Validate a group spec and print its canonical form.
    Build { spec: String },
    /// Characteristic of an element.
    Chi { spec: String, element: String },
    /// Height of an element at a class or a concrete prime.
    Height {
        spec: String,
        element: String,
        #[arg(long)]
        class: Option<String>,
        #[arg(long)]
        prime: Option<u64>,
    },
    /// Canonical type of an element.
    Type { spec: String, element: String },
    /// Endomorphism module.
    EndRing { spec: String },
    /// Pair check: full, krylov, trans or weak.
    Check {
        property: String,
        spec: String,
        x: String,
        y: String,
        #[arg(long, default_value_t = 3)]
        bound: u64,
    },
    /// Sampled region classification.
    Classify {
        spec: String,
        #[arg(long, default_value_t = 30)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        bound: u64,
    },
    /// Replay a catalog entry or claim.
    Paper {
        name: String,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        bound: u64,
    },
    /// Brute-force cross-checks on a realized copy: `end` or `height`.
    Oracle {
        mode: String,
        spec: String,
        element: Option<String>,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long, default_value_t = 8)]
        kmax: u64,
        #[arg(long, default_value_t = 2)]
        num: u64,
        #[arg(long, default_value_t = 1)]
        den: u64,
        #[arg(long, default_value_t = 2)]
        per_family: usize,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub inputs_digest: String,
    pub results: Value,
    pub scope: String,
    pub seed: Option<u64>,
    pub version: String,
    #[serde(skip)]
    pub text: Vec<String>,
}

/// Failure with its exit code.
struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(1, e.to_string())
    }
}

/// Spec errors: malformed JSON is 1, a well-formed spec breaking a group invariant is 2.
fn spec_fail(e: Error) -> Fail {
    let code = match e {
        Error::Parse(_) => 1,
        _ => 2,
    };
    Fail(code, e.to_string())
}

struct Ctx {
    hasher: Sha256,
}

impl Ctx {
    fn read(&mut self, path: &str) -> Result<String, Fail> {
        let text = std::fs::read_to_string(path).map_err(|e| Fail(1, format!("cannot read {path}: {e}")))?;
        self.hasher.update(path.as_bytes());
        self.hasher.update(text.as_bytes());
        Ok(text)
    }

    fn spec(&mut self, path: &str) -> Result<GroupSpec, Fail> {
        let text = self.read(path)?;
        spec::parse_spec(&text).map_err(spec_fail)
    }

    /// A literal, a JSON file, or the name of an element of the spec.
    fn element(&mut self, arg: &str, s: &GroupSpec) -> Result<Element, Fail> {
        if let Some((_, x)) = s.elements.iter().find(|(n, _)| n == arg) {
            self.hasher.update(arg.as_bytes());
            return Ok(x.clone());
        }
        if Path::new(arg).is_file() {
            let text = self.read(arg)?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Fail(1, format!("invalid JSON in {arg}: {e}")))?;
            return Ok(spec::parse_element_json(&v, &s.group)?);
        }
        self.hasher.update(arg.as_bytes());
        Ok(spec::parse_element(arg, &s.group)?)
    }
}

fn rows_json(m: &QMat) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(|x| json!(qmath::fmt_rational(x))).collect()))
            .collect(),
    )
}

pub fn end_module_json(e: &EndModule) -> Value {
    let gens: Vec<Value> = e
        .generators
        .iter()
        .map(|g| json!({ "matrix": rows_json(&g.matrix), "kappa": spec::characteristic_json(&g.kappa) }))
        .collect();
    json!({ "rank": e.rank, "presentation_exact": e.presentation_exact, "generators": gens })
}

pub fn verdict_json(v: &Verdict) -> Value {
    match v {
        Verdict::Holds(m) => match m.as_rational() {
            Some(r) => json!({ "verdict": "holds", "witness": rows_json(&r) }),
            None => json!({ "verdict": "holds", "witness": linalg::fmt_lmat(m) }),
        },
        Verdict::Fails(c) => json!({ "verdict": "fails", "certificate": c.to_string() }),
        Verdict::Unknown(b) => json!({ "verdict": "unknown", "reason": b }),
        Verdict::Vacuous(why) => json!({ "verdict": "vacuous", "reason": why }),
    }
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Holds(m) => format!("Holds, witness {}", linalg::fmt_lmat(m)),
        Verdict::Fails(c) => format!("Fails: {c}"),
        Verdict::Unknown(b) => format!("Unknown: {b}"),
        Verdict::Vacuous(why) => format!("Vacuous: {why}"),
    }
}

fn flag_json(f: &Flag) -> Value {
    let status = match f {
        Flag::HoldsOnSample { .. } => "holds_on_sample",
        Flag::Refuted { .. } => "refuted",
        Flag::Unknown => "unknown",
    };
    json!({ "status": status, "scope": f.scope() })
}

pub fn region_json(r: &RegionReport) -> Value {
    let flags: serde_json::Map<String, Value> = r.flags.iter().map(|(p, f)| (p.name().to_string(), flag_json(f))).collect();
    let records: Vec<Value> = r
        .records
        .iter()
        .map(|rec| {
            json!({
                "property": rec.property.name(),
                "x": rec.x.to_string(),
                "y": rec.y.to_string(),
                "verdict": rec.verdict.label(),
            })
        })
        .collect();
    json!({ "flags": flags, "region": r.region, "violations": r.violations, "records": records })
}

fn region_text(r: &RegionReport, out: &mut Vec<String>) {
    for (p, f) in &r.flags {
        out.push(format!("{}: {}", p.name(), f.scope()));
    }
    match r.region {
        Some(k) => out.push(format!("region {k}")),
        None => out.push("region undetermined".into()),
    }
    for v in &r.violations {
        out.push(format!("violation: {v}"));
    }
}

struct Outcome {
    code: i32,
    results: Value,
    scope: String,
    seed: Option<u64>,
    text: Vec<String>,
}

impl Outcome {
    fn exact(results: Value, text: Vec<String>) -> Self {
        Outcome {
            code: 0,
            results,
            scope: "exact".into(),
            seed: None,
            text,
        }
    }
}

fn element_heights(g: &FRGroup, x: &Element) -> Result<Value, Fail> {
    let chi = g.characteristic_of(x)?;
    Ok(spec::characteristic_json(&chi))
}

fn cmd_height(g: &FRGroup, x: &Element, class: Option<&str>, prime: Option<u64>) -> Result<Outcome, Fail> {
    let h = match (class, prime) {
        (_, Some(p)) => g.height_at_prime(x, p)?,
        (Some(c), None) => g.height(x, &g.registry().parse_key(c)?)?,
        (None, None) => g.height(x, &ClassKey::Rest)?,
    };
    let where_ = prime
        .map(|p| p.to_string())
        .or(class.map(String::from))
        .unwrap_or_else(|| "rest".into());
    Ok(Outcome::exact(
        json!({ "at": where_, "height": h.to_string() }),
        vec![format!("height at {where_}: {h}")],
    ))
}

fn check_code(v: &Verdict) -> i32 {
    match v {
        Verdict::Holds(_) | Verdict::Vacuous(_) => 0,
        Verdict::Fails(_) => 3,
        Verdict::Unknown(_) => 4,
    }
}

/// Replays the witnesses of a catalog entry and its region.
fn replay_entry(e: &CatalogEntry, seed: u64, samples: usize, bound: u64) -> Result<(bool, Value, Vec<String>), Fail> {
    let mut ok = true;
    let mut text = vec![format!("{}: group {} of rank {}", e.name, e.group.name(), e.group.rank())];
    let mut ws = Vec::new();
    for w in &e.witnesses {
        let v = transit::check_pair(&e.group, w.property, &w.x, &w.y, bound)?;
        let met = match w.expected {
            Expect::Holds => v.is_holds(),
            Expect::Fails => v.is_fails(),
        };
        ok &= met;
        text.push(format!(
            "{} {} ({}, {}) -> {} [{}]",
            if met { "ok  " } else { "MISS" },
            w.property.name(),
            w.x,
            w.y,
            verdict_text(&v),
            w.claim
        ));
        ws.push(json!({
            "property": w.property.name(),
            "x": w.x.to_string(),
            "y": w.y.to_string(),
            "expected": match w.expected { Expect::Holds => "holds", Expect::Fails => "fails" },
            "result": verdict_json(&v),
            "met": met,
            "claim": w.claim,
        }));
    }
    let r = e.classify(seed, samples, bound)?;
    let region_ok = r.region == Some(e.expected_region) && r.violations.is_empty();
    ok &= region_ok;
    region_text(&r, &mut text);
    text.push(format!(
        "expected region {} over {}: {}",
        e.expected_region,
        e.scope(),
        if region_ok { "ok" } else { "MISS" }
    ));
    Ok((
        ok,
        json!({
            "entry": e.name,
            "witnesses": ws,
            "classification": region_json(&r),
            "expected_region": e.expected_region,
            "scope": e.scope(),
        }),
        text,
    ))
}

fn claim_a() -> Result<(bool, Value, Vec<String>), Fail> {
    let e = catalog::example3_default()?;
    let chi = e.group.characteristic_of(e.element("a1").expect("a1"))?;
    let ok = chi.is_zero();
    Ok((
        ok,
        json!({ "chi_a1": spec::characteristic_json(&chi) }),
        vec![format!("chi(a1) = {chi}")],
    ))
}

fn claim_b() -> Result<(bool, Value, Vec<String>), Fail> {
    let e = catalog::example3_default()?;
    let g = &e.group;
    let k = e.elements.len();
    let types: Vec<_> = (1..=k)
        .map(|i| g.type_of_element(e.element(&format!("a{i}")).expect("line")))
        .collect::<Result<_, _>>()?;
    let mut ok = true;
    let mut text = Vec::new();
    for i in 1..k {
        for j in 1..k {
            if i != j && !chartype::incomparable(&types[i], &types[j])? {
                ok = false;
                text.push(format!("a{} and a{} have comparable types", i + 1, j + 1));
            }
        }
        let below = chartype::type_le(&types[0], &types[i])? && !chartype::type_le(&types[i], &types[0])?;
        if !below {
            ok = false;
            text.push(format!("type of a1 is not strictly below that of a{}", i + 1));
        }
    }
    text.push(format!(
        "types of a2..a{k} pairwise incomparable, all strictly above the type of a1: {}",
        if ok { "yes" } else { "no" }
    ));
    Ok((ok, json!({ "pairwise_incomparable_and_above_a1": ok }), text))
}

fn claim_c() -> Result<(bool, Value, Vec<String>), Fail> {
    let e = catalog::example3_default()?;
    let m = endoring::end_ring(&e.group);
    let ok = m.is_integer_scalars();
    let mut text = vec![if ok {
        "End(G) = Z·I".to_string()
    } else {
        "End(G) is not Z·I".to_string()
    }];
    text.extend(m.to_string().lines().map(String::from));
    Ok((ok, end_module_json(&m), text))
}

fn thm15(bound: u64) -> Result<(bool, Value, Vec<String>), Fail> {
    let e = catalog::theorem15_group()?;
    let single = endoring::end_ring(&e.group);
    let (sq, x, y) = catalog::theorem15_square_witness(&e)?;
    let square = endoring::end_ring(&sq);
    let (cx, cy) = (sq.characteristic_of(&x)?, sq.characteristic_of(&y)?);
    let v = transit::check_pair_krylov(&sq, &x, &y)?;
    let block_scalar = square.generators.len() == 4
        && square.matrices().iter().all(|m| {
            let n = e.group.rank();
            (0..2 * n).all(|i| (0..2 * n).all(|j| i % n == j % n || m[(i, j)] == qmath::q(0)))
        });
    let ok = single.is_integer_scalars() && block_scalar && cx.is_zero() && cy.is_zero() && v.is_fails();
    let _ = bound;
    let text = vec![
        format!("End(G) = Z·I: {}", single.is_integer_scalars()),
        format!("End(G+G) has {} generators, block scalar: {block_scalar}", square.generators.len()),
        format!("chi(x) = {cx}, chi(y) = {cy}"),
        format!("krylov ({x}, {y}) -> {}", verdict_text(&v)),
    ];
    Ok((
        ok,
        json!({ "end_single": end_module_json(&single), "end_square": end_module_json(&square), "krylov": verdict_json(&v) }),
        text,
    ))
}

fn venn(seed: u64, samples: usize, bound: u64) -> Result<(bool, Value, Vec<String>), Fail> {
    let mut violations = Vec::new();
    let mut checked = 0usize;
    for e in catalog::all()? {
        let s = transit::Sampler::new(seed, samples);
        for (x, y) in s.pairs(&e.group, Property::Krylov) {
            violations.extend(transit::venn_check_pair(&e.group, &x, &y, bound)?);
            checked += 1;
        }
    }
    let ok = violations.is_empty();
    let text = vec![format!("{checked} pairs checked, {} violations", violations.len())];
    Ok((ok, json!({ "pairs": checked, "violations": violations }), text))
}

fn cmd_paper(name: &str, seed: u64, samples: usize, bound: u64) -> Result<Outcome, Fail> {
    let entry = |n: &str| catalog::by_name(n);
    let (ok, results, text) = match name {
        "ex1" => replay_entry(&entry("example1")?, seed, samples, bound)?,
        "ex3" => replay_entry(&entry("example3")?, seed, samples, bound)?,
        "ex5" => replay_entry(&entry("example5")?, seed, samples, bound)?,
        "ex6" => {
            let e = entry("example6")?;
            let (mut ok, mut res, mut text) = replay_entry(&e, seed, samples, bound)?;
            let (a, b) = catalog::example6_mutual_endomorphisms();
            let mutual = endoring::is_endomorphism(&e.group, &a)? && endoring::is_endomorphism(&e.group, &b)?;
            ok &= mutual;
            text.push(format!(
                "mutual endomorphisms {} and {} verified: {mutual}",
                linalg::fmt_mat(&a),
                linalg::fmt_mat(&b)
            ));
            res["mutual_endomorphisms"] = json!(mutual);
            (ok, res, text)
        }
        "compl" => replay_entry(&entry("complementary")?, seed, samples, bound)?,
        "composed" => replay_entry(&entry("composed")?, seed, samples, bound)?,
        "thm15" => thm15(bound)?,
        "venn" => venn(seed, samples, bound)?,
        "claimA" => claim_a()?,
        "claimB" => claim_b()?,
        "claimC" => claim_c()?,
        _ => return Err(Fail(1, format!("unknown replay `{name}`"))),
    };
    let scope = match name {
        "claimA" | "claimB" | "claimC" | "thm15" => "exact".to_string(),
        _ => format!("exact witnesses; flags sampled over {samples} pairs per property"),
    };
    let mut text = text;
    text.push(if ok {
        "all expectations met".into()
    } else {
        "EXPECTATION NOT MET".into()
    });
    Ok(Outcome {
        code: if ok { 0 } else { 5 },
        results: json!({ "name": name, "passed": ok, "details": results }),
        scope,
        seed: Some(seed),
        text,
    })
}

fn realized(g: &FRGroup, per_family: usize) -> Result<FRGroup, Fail> {
    let g = if g.registry().families().next().is_some() {
        oracle::realize_families(g, per_family)?
    } else {
        g.clone()
    };
    if g.local(&ClassKey::Rest).is_identity() {
        Ok(g)
    } else {
        let primes: Vec<u64> = [11u64, 13, 17]
            .into_iter()
            .filter(|p| !g.registry().used_primes().contains(p))
            .collect();
        Ok(oracle::approximate_rest(&g, &primes)?)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_oracle(
    ctx: &mut Ctx,
    mode: &str,
    s: &GroupSpec,
    element: Option<&str>,
    prime: Option<u64>,
    kmax: u64,
    num: u64,
    den: u64,
    per_family: usize,
) -> Result<Outcome, Fail> {
    let g = realized(&s.group, per_family)?;
    let r = oracle::RealizedGroup::from_group(&g)?;
    match mode {
        "end" => {
            let brute = oracle::brute_force_end(&r, num, den, oracle::DEFAULT_BUDGET)?;
            let symbolic = oracle::symbolic_end_in_box(&g, num, den, oracle::DEFAULT_BUDGET)?;
            let agree = brute == symbolic;
            let mut text = vec![format!(
                "{} endomorphisms in the box (entries a/d, |a| <= {num}, d <= {den})",
                brute.len()
            )];
            text.extend(brute.iter().take(20).map(linalg::fmt_mat));
            text.push(format!("symbolic module agrees: {agree}"));
            let results = json!({
                "realized_primes": r.primes(),
                "box": { "num": num, "den": den },
                "brute_force": brute.iter().map(rows_json).collect::<Vec<_>>(),
                "agrees": agree,
            });
            Ok(Outcome {
                code: if agree { 0 } else { 5 },
                results,
                scope: "exact within the box".into(),
                seed: None,
                text,
            })
        }
        "height" => {
            let arg = element.ok_or_else(|| Fail(1, "oracle height needs an element".into()))?;
            let x = ctx.element(arg, s)?;
            let rat = x
                .rational_coords()
                .ok_or_else(|| Fail(1, "oracle heights need a rational element".into()))?;
            let primes: Vec<u64> = match prime {
                Some(p) => vec![p],
                None => r.primes().into_iter().collect(),
            };
            let mut agree = true;
            let mut rows = Vec::new();
            let mut text = Vec::new();
            for p in primes {
                let b = oracle::brute_force_height(&r, &rat, p, kmax)?;
                let sym = g.height_at_prime(&x, p)?;
                let a = b.agrees_with(sym);
                agree &= a;
                let bs = match b {
                    oracle::HeightBound::Exact(k) => k.to_string(),
                    oracle::HeightBound::AtLeast(k) => format!(">= {k}"),
                };
                text.push(format!(
                    "p = {p}: brute force {bs}, symbolic {sym}{}",
                    if a { "" } else { "  MISMATCH" }
                ));
                rows.push(json!({ "prime": p, "brute_force": bs, "symbolic": sym.to_string(), "agrees": a }));
            }
            Ok(Outcome {
                code: if agree { 0 } else { 5 },
                results: json!({ "heights": rows, "agrees": agree }),
                scope: "exact".into(),
                seed: None,
                text,
            })
        }
        _ => Err(Fail(1, format!("unknown oracle mode `{mode}`"))),
    }
}

fn dispatch(cli: &Cli, ctx: &mut Ctx) -> Result<Outcome, Fail> {
    match &cli.cmd {
        Cmd::Build { spec: path } => {
            let s = ctx.spec(path)?;
            let text = spec::emit_spec(&s);
            Ok(Outcome::exact(spec::spec_json(&s), vec![text.trim_end().to_string()]))
        }
        Cmd::Chi { spec: path, element } => {
            let s = ctx.spec(path)?;
            let x = ctx.element(element, &s)?;
            let chi = s.group.characteristic_of(&x)?;
            Ok(Outcome::exact(element_heights(&s.group, &x)?, vec![format!("chi{x} = {chi}")]))
        }
        Cmd::Height {
            spec: path,
            element,
            class,
            prime,
        } => {
            let s = ctx.spec(path)?;
            let x = ctx.element(element, &s)?;
            cmd_height(&s.group, &x, class.as_deref(), *prime)
        }
        Cmd::Type { spec: path, element } => {
            let s = ctx.spec(path)?;
            let x = ctx.element(element, &s)?;
            let t = s.group.type_of_element(&x)?;
            Ok(Outcome::exact(
                spec::characteristic_json(t.canonical()),
                vec![format!("type{x} = [{}]", t.canonical())],
            ))
        }
        Cmd::EndRing { spec: path } => {
            let s = ctx.spec(path)?;
            let m = endoring::end_ring(&s.group);
            let mut text: Vec<String> = m.to_string().lines().map(String::from).collect();
            if !m.presentation_exact {
                text.push("coefficient characteristics are lower bounds; membership is exact".into());
            }
            Ok(Outcome::exact(end_module_json(&m), text))
        }
        Cmd::Check {
            property,
            spec: path,
            x,
            y,
            bound,
        } => {
            let p = Property::parse(property)?;
            let s = ctx.spec(path)?;
            let (x, y) = (ctx.element(x, &s)?, ctx.element(y, &s)?);
            let v = transit::check_pair(&s.group, p, &x, &y, *bound)?;
            let scope = match &v {
                Verdict::Unknown(b) => format!("undecided: {b}"),
                _ => "exact".into(),
            };
            Ok(Outcome {
                code: check_code(&v),
                results: verdict_json(&v),
                scope,
                seed: None,
                text: vec![verdict_text(&v)],
            })
        }
        Cmd::Classify {
            spec: path,
            samples,
            seed,
            bound,
        } => {
            let s = ctx.spec(path)?;
            let sampler = transit::Sampler::new(*seed, *samples);
            let witnesses: Vec<(Element, Element, Property)> = vec![];
            let r = transit::classify(&s.group, &sampler, *bound, &witnesses)?;
            let mut text = Vec::new();
            region_text(&r, &mut text);
            let code = if r.violations.is_empty() { 0 } else { 5 };
            Ok(Outcome {
                code,
                results: region_json(&r),
                scope: format!("{samples} sampled pairs per property"),
                seed: Some(*seed),
                text,
            })
        }
        Cmd::Paper {
            name,
            samples,
            seed,
            bound,
        } => cmd_paper(name, *seed, *samples, *bound),
        Cmd::Oracle {
            mode,
            spec: path,
            element,
            prime,
            kmax,
            num,
            den,
            per_family,
        } => {
            let s = ctx.spec(path)?;
            cmd_oracle(ctx, mode, &s, element.as_deref(), *prime, *kmax, *num, *den, *per_family)
        }
    }
}

/// Runs a command line (without the program name).
pub fn run(argv: &[String]) -> (i32, Report) {
    let mut report = Report {
        command: argv.to_vec(),
        inputs_digest: String::new(),
        results: Value::Null,
        scope: String::new(),
        seed: None,
        version: env!("CARGO_PKG_VERSION").to_string(),
        text: vec![],
    };
    let cli = match Cli::try_parse_from(std::iter::once("tfag".to_string()).chain(argv.iter().cloned())) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            report.text = vec![e.to_string()];
            report.results = json!({ "error": e.to_string() });
            return (code, report);
        }
    };
    let mut ctx = Ctx { hasher: Sha256::new() };
    let outcome = dispatch(&cli, &mut ctx);
    report.inputs_digest = ctx.hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    match outcome {
        Ok(o) => {
            report.results = o.results;
            report.scope = o.scope;
            report.seed = o.seed;
            report.text = o.text;
            (o.code, report)
        }
        Err(Fail(code, msg)) => {
            report.results = json!({ "error": msg });
            report.text = vec![format!("error: {msg}")];
            (code, report)
        }
    }
}

fn wants_json(argv: &[String]) -> bool {
    argv.iter().any(|a| a == "--json")
}

pub fn main_with(argv: &[String]) -> i32 {
    use std::io::Write;
    let (code, report) = run(argv);
    let out = if wants_json(argv) { serde_json::to_string_pretty(&report).expect("serializable") } else { report.text.join("\n") };
    let _ = if wants_json(argv) || !(code == 1 || code == 2) {
        writeln!(std::io::stdout(), "{out}")
    } else {
        writeln!(std::io::stderr(), "{out}")
    };
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_exit_codes() {
        assert_eq!(
            check_code(&Verdict::Holds(crate::linalg::LMat::from_rational(&QMat::identity(1)))),
            0
        );
        assert_eq!(check_code(&Verdict::Unknown("bound".into())), 4);
        assert_eq!(check_code(&Verdict::Vacuous("no endomorphisms".into())), 0);
    }
}
