//! Command-line front end: session configuration, the computation commands
//! and the property suite.

use crate::exact::{fmt_rat, parse_rat, rint, Rat, Scalar};
use crate::invmap::{check_depth_bound, exponent_gate, q_xr, InvariantSystem};
use crate::mpfilt::{affine_root_spaces, jump_set, mp_quotient, residues, ApartmentPoint, TwistedLoopDatum, Window};
use crate::rootdata::CartanType;
use crate::sample::Sampler;
use crate::strata::{align_lift, deepening_lp, deepening_program, destabilize, exp_ad, unstable_test, verify_basecase};
use crate::vinberg::{build_grading, f_embed, parse_literal, GradedAlgebra, GradedElement, LoopElement};
use crate::{Error, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::sync::Arc;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;
pub const EXIT_FAILED: i32 = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    #[serde(rename = "type")]
    pub cartan_type: String,
    pub rank: usize,
    pub twist: String,
    pub n: u32,
    /// Coordinates of `x` as "p/q" strings, one per orbit of simple nodes.
    pub x: Vec<String>,
    pub r: String,
    pub seed: u64,
    pub samples: usize,
    /// Defaults to `r + 2`.
    pub depth_cap: Option<String>,
    /// Graded element literal (JSON) for `qmap` and `destabilize`.
    pub element: Option<String>,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            cartan_type: "A".into(),
            rank: 1,
            twist: "id".into(),
            n: 1,
            x: vec![],
            r: "0".into(),
            seed: 0,
            samples: 32,
            depth_cap: None,
            element: None,
        }
    }
}

/// A validated configuration.
pub struct Session {
    pub config: SessionConfig,
    pub d: Arc<TwistedLoopDatum>,
    pub x: ApartmentPoint,
    pub r: Rat,
    pub depth_cap: Rat,
}

impl SessionConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn open(&self) -> Result<Session> {
        let t = CartanType::parse(&self.cartan_type)?;
        let d = Arc::new(TwistedLoopDatum::build(t, self.rank, &self.twist, self.n)?);
        let m = d.restricted_torus_rank;
        let x = if self.x.is_empty() {
            ApartmentPoint::origin(m)
        } else {
            if self.x.len() != m {
                return Err(Error::ConfigParse(format!("x has {} coordinates, expected {m}", self.x.len())));
            }
            ApartmentPoint::new(self.x.iter().map(|s| parse_rat(s)).collect::<Result<_>>()?)
        };
        let r = parse_rat(&self.r)?;
        let depth_cap = match &self.depth_cap {
            Some(s) => parse_rat(s)?,
            None => &r + rint(2),
        };
        Ok(Session { config: self.clone(), d, x, r, depth_cap })
    }

    /// Stable key used to order suite results.
    pub fn key(&self) -> String {
        let tw = if self.twist == "id" { String::new() } else { format!("^{}{}", self.n, self.twist) };
        format!("{}{}{} x=[{}]", self.cartan_type, self.rank, tw, self.x.join(","))
    }
}

#[derive(Parser, Debug)]
#[command(name = "loopgrade", version, about = "Exact filtration quotients, gradings and strata of twisted loop algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML session file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long = "type", global = true)]
    pub cartan_type: Option<String>,
    #[arg(long, global = true)]
    pub rank: Option<usize>,
    #[arg(long, global = true)]
    pub twist: Option<String>,
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Comma-separated rationals, e.g. "1/2,0".
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub r: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long = "depth-cap", global = true)]
    pub depth_cap: Option<String>,
    /// Graded element as a JSON list of {alpha, level, basis_index, coeff}.
    #[arg(long, global = true)]
    pub element: Option<String>,
    /// Write the JSON report here and print a table instead.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Dump k_{x,r}/k_{x,r+}.
    Quotient,
    /// Jumps of the filtration at x in [r, r+1).
    Jumps,
    /// Dimensions of the graded pieces at x.
    Grade,
    /// Invariant map of a graded element.
    Qmap,
    /// Strata of h_r with labels.
    Strata,
    /// Destabilizing point for an unstable element.
    Destabilize,
    /// Deepening linear program at (x, r).
    Deepen,
    /// Base-case checks on sampled strata.
    VerifyBasecase,
    /// Property suite over the default configurations.
    Suite,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Quotient => "quotient",
            Command::Jumps => "jumps",
            Command::Grade => "grade",
            Command::Qmap => "qmap",
            Command::Strata => "strata",
            Command::Destabilize => "destabilize",
            Command::Deepen => "deepen",
            Command::VerifyBasecase => "verify-basecase",
            Command::Suite => "suite",
        }
    }
}

impl Cli {
    pub fn session_config(&self) -> Result<SessionConfig> {
        let mut c = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::ConfigParse(format!("{}: {e}", p.display())))?;
                SessionConfig::from_toml(&text)?
            }
            None => SessionConfig::default(),
        };
        if let Some(v) = &self.cartan_type {
            c.cartan_type = v.clone();
        }
        if let Some(v) = self.rank {
            c.rank = v;
        }
        if let Some(v) = &self.twist {
            c.twist = v.clone();
        }
        if let Some(v) = self.n {
            c.n = v;
        }
        if let Some(v) = &self.x {
            c.x = v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        }
        if let Some(v) = &self.r {
            c.r = v.clone();
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.samples {
            c.samples = v;
        }
        if let Some(v) = &self.depth_cap {
            c.depth_cap = Some(v.clone());
        }
        if let Some(v) = &self.element {
            c.element = Some(v.clone());
        }
        Ok(c)
    }
}

/// Outcome of a command: the report and whether every check passed.
pub struct Report {
    pub document: Value,
    pub passed: bool,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ConfigParse(_) | Error::NotADiagramSymmetry(_) | Error::BadExponent(..) => EXIT_CONFIG,
        Error::UnsupportedType(_) | Error::UnsupportedTypeForInvariants(_) => EXIT_UNSUPPORTED,
        _ => EXIT_FAILED,
    }
}

fn element_of(s: &Session, ga: &GradedAlgebra) -> Result<GradedElement> {
    match &s.config.element {
        Some(text) => {
            let v: Value = serde_json::from_str(text).map_err(|e| Error::ConfigParse(format!("element: {e}")))?;
            ga.element_from_literal(&s.r, &parse_literal(&v)?)
        }
        None => {
            let q = ga.quotient(&s.r);
            Ok(ga.element(&s.r, Sampler::new(s.config.seed).vector(q.total_dim)))
        }
    }
}

pub fn run(command: Command, config: &SessionConfig) -> Result<Report> {
    if command == Command::Suite {
        let (result, passed) = suite(&default_matrix(config.seed, config.samples))?;
        return Ok(Report { document: json!({"command": "suite", "config": config.to_json(), "result": result}), passed });
    }
    let s = config.open()?;
    let d = &s.d;
    let mut passed = true;
    let result = match command {
        Command::Quotient => mp_quotient(d, &s.x, &s.r).to_json(&d.datum),
        Command::Jumps => {
            let j = jump_set(d, &s.x, &Window::half_open(s.r.clone(), &s.r + rint(1)));
            json!({"jumps": j.iter().map(fmt_rat).collect::<Vec<_>>()})
        }
        Command::Grade => {
            let ga = build_grading(d.clone(), &s.x);
            json!({"components": ga.component_dims().iter().map(|(j, n)| json!({"j": fmt_rat(j), "dim": n})).collect::<Vec<_>>()})
        }
        Command::Qmap => {
            let ga = build_grading(d.clone(), &s.x);
            let inv = InvariantSystem::new(&d.datum)?;
            let z = element_of(&s, &ga)?;
            let q = q_xr(d, &inv, &z)?;
            json!({
                "element": z.to_literal(),
                "rendered": z.render(d),
                "degrees": inv.degrees,
                "experimental": inv.experimental,
                "q": q.to_json(),
                "unstable": q.is_zero(),
            })
        }
        Command::Strata | Command::VerifyBasecase => {
            let ga = build_grading(d.clone(), &s.x);
            let inv = InvariantSystem::new(&d.datum)?;
            let rep = verify_basecase(&ga, &inv, &s.r, s.config.samples, s.config.seed)?;
            passed = rep.passed();
            rep.to_json(d)
        }
        Command::Destabilize => {
            let ga = build_grading(d.clone(), &s.x);
            let z = element_of(&s, &ga)?;
            let y = destabilize(&ga, &z)?;
            json!({"element": z.to_literal(), "y": y.to_strings()})
        }
        Command::Deepen => {
            let (v, y) = deepening_lp(d, &s.x, &s.r)?;
            json!({"s": fmt_rat(&v), "y": y.to_strings(), "program": deepening_program(d, &s.x, &s.r).to_json()})
        }
        Command::Suite => unreachable!(),
    };
    Ok(Report {
        document: json!({"command": command.name(), "config": config.to_json(), "datum": d.label(), "result": result, "passed": passed}),
        passed,
    })
}

/// Configurations exercised by `suite`.
pub fn default_matrix(seed: u64, samples: usize) -> Vec<SessionConfig> {
    let mk = |t: &str, rank: usize, twist: &str, n: u32, x: &[&str]| SessionConfig {
        cartan_type: t.into(),
        rank,
        twist: twist.into(),
        n,
        x: x.iter().map(|s| s.to_string()).collect(),
        seed,
        samples,
        ..SessionConfig::default()
    };
    vec![
        mk("A", 1, "id", 1, &["0"]),
        mk("A", 1, "id", 1, &["1/4"]),
        mk("A", 1, "id", 1, &["1/2"]),
        mk("A", 2, "id", 1, &["0", "0"]),
        mk("A", 2, "id", 1, &["1/3", "1/3"]),
        mk("C", 2, "id", 1, &["1/4", "1/4"]),
        mk("G", 2, "id", 1, &["0", "0"]),
        mk("A", 2, "swap", 2, &["0"]),
    ]
}

fn sample_loop(s: &mut Sampler, d: &TwistedLoopDatum, x: &ApartmentPoint, r: &Rat) -> LoopElement {
    let mut v = LoopElement::zero();
    for sp in affine_root_spaces(d, &Window::closed(r - rint(3), r + rint(3))) {
        let val = sp.value(x);
        if val < *r || val > r + rint(1) || s.coin() {
            continue;
        }
        for b in &sp.basis {
            v = v.add(&LoopElement::monomial(sp.level.clone(), b.scale(&s.scalar())));
        }
    }
    v
}

/// Runs the module properties on one configuration. Each entry is
/// (property, passed, detail).
pub fn suite_config(c: &SessionConfig) -> Result<Vec<(String, bool, String)>> {
    let s = c.open()?;
    let d = &s.d;
    let ga = build_grading(d.clone(), &s.x);
    let inv = InvariantSystem::new(&d.datum)?;
    let mut smp = Sampler::new(c.seed);
    let mut out = vec![];
    let jumps = residues(d, &s.x);

    // Commutation of basis brackets.
    let mut ok = true;
    for r1 in &jumps {
        for r2 in &jumps {
            let (a, b) = (ga.quotient(r1), ga.quotient(r2));
            let target = ga.quotient(&(r1 + r2));
            let tv = target.basis_vectors(d.dim());
            for x in a.basis() {
                for y in b.basis() {
                    let br = d.datum.bracket(x, y);
                    ok &= crate::linalg::span_contains(&tv, &[br.to_dense(d.dim())], d.dim());
                }
            }
        }
    }
    out.push(("commutation".into(), ok, format!("{} jumps", jumps.len())));

    // Depth bound.
    let mut ok = true;
    let mut n = 0;
    for r in &jumps {
        for _ in 0..c.samples.div_ceil(jumps.len().max(1)) {
            let v = sample_loop(&mut smp, d, &s.x, r);
            ok &= check_depth_bound(d, &inv, &s.x, r, &v)?;
            n += 1;
        }
    }
    out.push(("depth bound".into(), ok, format!("{n} samples")));

    // Nilpotent, unstable and zero fiber agree; Jordan identities.
    let mut tri = true;
    let mut jor = true;
    for r in &jumps {
        let q = ga.quotient(r);
        for _ in 0..c.samples {
            let z = ga.element(r, smp.vector(q.total_dim));
            tri &= unstable_test(&ga, &inv, &z).is_ok();
            let (ss, nil) = ga.jordan_decompose(&z)?;
            jor &= ss.add(&nil).coords == z.coords
                && ga.is_semisimple(&ss)
                && ga.is_nilpotent(&nil)
                && d.datum.bracket(&ss.to_lie(), &nil.to_lie()).is_zero();
        }
    }
    out.push(("triple agreement".into(), tri, String::new()));
    out.push(("jordan".into(), jor, String::new()));

    // Bad denominators force nilpotence.
    let mut ok = true;
    for r in &jumps {
        if exponent_gate(d, r) {
            continue;
        }
        let q = ga.quotient(r);
        for i in 0..q.total_dim {
            let mut v = vec![Scalar::zero(); q.total_dim];
            v[i] = Scalar::one();
            ok &= ga.is_nilpotent(&ga.element(r, v));
        }
        for _ in 0..c.samples {
            ok &= ga.is_nilpotent(&ga.element(r, smp.vector(q.total_dim)));
        }
    }
    out.push(("bad denominators".into(), ok, String::new()));

    // Deepening never loses depth.
    let mut ok = true;
    for r in &jumps {
        ok &= deepening_lp(d, &s.x, r)?.0 >= *r;
    }
    out.push(("deepening".into(), ok, String::new()));

    // Destabilizing points for unstable root vectors.
    let mut ok = true;
    for r in &jumps {
        let q = ga.quotient(r);
        for (i, (sp, _)) in q.positions().iter().enumerate() {
            if q.spaces[*sp].alpha.iter().all(|a| *a == 0) {
                continue;
            }
            let mut v = vec![Scalar::zero(); q.total_dim];
            v[i] = Scalar::one();
            let z = ga.element(r, v);
            match destabilize(&ga, &z) {
                Ok(y) => ok &= crate::mpfilt::sandwich_test(d, &s.x, &y, r),
                Err(Error::NeedsConjugation) => {}
                Err(e) => return Err(e),
            }
        }
    }
    out.push(("destabilize".into(), ok, String::new()));

    // Alignment of conjugated lifts of Cartan elements.
    let mut ok = true;
    for r in &jumps {
        let cs = ga.cartan_subspace(r)?;
        if cs.basis.is_empty() {
            continue;
        }
        let mut z = ga.zero(r);
        for b in &cs.basis {
            z = z.add(&b.scale(&smp.nonzero_scalar()));
        }
        let cap = r + rint(2);
        let w = sample_loop(&mut smp, d, &s.x, &(r + rint(1)));
        let g1 = exp_ad(d, &s.x, &w, &f_embed(&z), &cap);
        let g = align_lift(&ga, &z, &g1, &cap)?;
        ok &= g.bracket(d, &f_embed(&z)).truncate(d, &s.x, &(&cap + r)).is_zero();
    }
    out.push(("alignment".into(), ok, String::new()));

    // Base-case checks.
    let mut ok = true;
    let mut strata = 0;
    for r in &jumps {
        let rep = verify_basecase(&ga, &inv, r, c.samples.min(16), c.seed)?;
        ok &= rep.passed();
        strata += rep.strata.len();
    }
    out.push(("basecase".into(), ok, format!("{strata} strata")));
    Ok(out)
}

pub fn suite(configs: &[SessionConfig]) -> Result<(Value, bool)> {
    let mut results: Vec<(String, Result<Vec<(String, bool, String)>>)> =
        configs.par_iter().map(|c| (c.key(), suite_config(c))).collect();
    results.sort_by(|a, b| a.0.cmp(&b.0));
    let mut all = true;
    let mut rows = vec![];
    for (key, res) in results {
        match res {
            Ok(checks) => {
                let ok = checks.iter().all(|c| c.1);
                all &= ok;
                rows.push(json!({
                    "config": key,
                    "passed": ok,
                    "checks": checks.iter().map(|(n, p, det)| json!({"name": n, "passed": p, "detail": det})).collect::<Vec<_>>(),
                }));
            }
            Err(e) => {
                all = false;
                rows.push(json!({"config": key, "passed": false, "error": e.to_string()}));
            }
        }
    }
    Ok((json!({"configs": rows, "passed": all}), all))
}

/// Plain-text view of a report.
pub fn table(doc: &Value) -> String {
    let mut out = format!("{}: {}\n", doc["command"].as_str().unwrap_or("?"), if doc["passed"] == json!(false) { "FAILED" } else { "ok" });
    let res = &doc["result"];
    if let Some(strata) = res["strata"].as_array() {
        for s in strata {
            out += &format!("  {:<32} count {:>4}  checks {}\n", s["label"]["name"].as_str().unwrap_or(""), s["count"], s["checks"]);
        }
    } else if let Some(cfgs) = res["configs"].as_array() {
        for c in cfgs {
            out += &format!("  {:<24} {}\n", c["config"].as_str().unwrap_or(""), if c["passed"] == json!(true) { "pass" } else { "FAIL" });
        }
    } else if let Some(obj) = res.as_object() {
        for (k, v) in obj {
            if k != "program" && k != "spaces" {
                out += &format!("  {k}: {v}\n");
            }
        }
    }
    out
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    let config = match cli.session_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let mut report = match run(cli.command, &config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if cli.command == Command::Suite {
        report.document["passed"] = json!(report.passed);
    }
    let text = serde_json::to_string_pretty(&report.document).expect("report serializes");
    match &cli.json {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text + "\n") {
                eprintln!("error: {}: {e}", p.display());
                return EXIT_CONFIG;
            }
            print!("{}", table(&report.document));
        }
        None => println!("{text}"),
    }
    if report.passed {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}
