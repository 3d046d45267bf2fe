//! Experiment driver behind the `pencil-lab` binary. Every command returns its
//! output text and an exit code, so the binary, the C ABI and the tests share it.

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fano::{contains_pn, even_profile_sets, expected_class_size, fano_set, geometric_genus, partition_by_profile};
use crate::fixtures::{fixture, FIXTURE_NAMES};
use crate::grouplaw::{f2_infty, verify_group_shadow, verify_two_actions, GroupLaw, DEFAULT_SAMPLES};
use crate::quadrics::{ClassTag, Lambda, Pencil, PencilJson};
use crate::reduction::{full_delta, odd_reduction_report};
use crate::stab::{build_stab, orbit_report, Flavor};

pub const MAX_N: usize = 7;
pub const MAX_Q: u32 = 2401;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_SIZE: i32 = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Parser, Debug, Clone)]
#[command(name = "pencil-lab", version, about = "Isotropic subspaces of quadric pencils over finite fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Generic / regular / non-regular, with root multiplicities.
    Classify(CommonArgs),
    /// Profile class counts against 2^r/2^a.
    Count(CommonArgs),
    /// Every applicable structural check.
    Verify(CommonArgs),
    /// d/f-reduction checks (odd N) or the delta_v chain (even N).
    Reduce(CommonArgs),
    /// Lists the built-in fixtures.
    Fixtures(CommonArgs),
    /// Torsor checks: simple transitivity (odd N) or the divisor-action axioms (even N).
    VerifyTorsor(CommonArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Pencil as a JSON file path or an inline JSON object.
    #[arg(long, conflicts_with = "fixture")]
    pub pencil: Option<String>,
    /// Built-in fixture name (see `fixtures`).
    #[arg(long)]
    pub fixture: Option<String>,
    /// Field order for fixtures.
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Skip the size guard (N <= 7, q <= 2401).
    #[arg(long)]
    pub force: bool,
    /// For `reduce` on even pencils: print only the (alpha, m, fiber) chain.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::SizeGuard(_) => EXIT_SIZE,
        _ => EXIT_INVALID,
    }
}

/// Reads the pencil from `--pencil` (file or inline JSON) or `--fixture`.
pub fn load_pencil(a: &CommonArgs) -> Result<(String, Pencil)> {
    match (&a.pencil, &a.fixture) {
        (Some(src), None) => {
            let text = if src.trim_start().starts_with('{') {
                src.clone()
            } else {
                std::fs::read_to_string(PathBuf::from(src)).map_err(|e| Error::InvalidInput(format!("cannot read {src}: {e}")))?
            };
            let pj: PencilJson = serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("bad pencil JSON: {e}")))?;
            Ok(("input".into(), pj.to_pencil()?))
        }
        (None, Some(name)) => Ok((name.clone(), fixture(name, a.q)?.pencil)),
        (None, None) => Err(Error::InvalidInput("give --pencil or --fixture".into())),
        (Some(_), Some(_)) => Err(Error::InvalidInput("--pencil and --fixture are exclusive".into())),
    }
}

pub fn size_guard(p: &Pencil, force: bool) -> Result<()> {
    if !force && (p.n() > MAX_N || p.field().q() > MAX_Q) {
        return Err(Error::SizeGuard(format!("N = {}, q = {} (limits N <= {MAX_N}, q <= {MAX_Q}; use --force)", p.n(), p.field().q())));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct CountRow {
    pub profile: String,
    pub a: usize,
    pub count: usize,
    pub expected: u64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub check: String,
    pub pass: bool,
    pub witness: Value,
}

impl Check {
    fn new(name: &str, pass: bool, witness: Value) -> Check {
        Check { check: name.into(), pass, witness }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    for r in rows {
        w.serialize(r).map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?).map_err(|e| Error::InvalidInput(e.to_string()))
}

fn outcome(output: String, pass: bool) -> Outcome {
    Outcome { output, code: if pass { EXIT_PASS } else { EXIT_FAIL } }
}

pub fn run(cli: &Cli) -> Outcome {
    let res = match &cli.command {
        Command::Fixtures(a) => cmd_fixtures(a),
        Command::Classify(a) => with_pencil(a, cmd_classify),
        Command::Count(a) => with_pencil(a, cmd_count),
        Command::Verify(a) => with_pencil(a, cmd_verify),
        Command::Reduce(a) => with_pencil(a, cmd_reduce),
        Command::VerifyTorsor(a) => with_pencil(a, cmd_verify_torsor),
    };
    res.unwrap_or_else(|e| Outcome { output: format!("error: {e}\n"), code: exit_code_for(&e) })
}

fn with_pencil(a: &CommonArgs, f: fn(&CommonArgs, &str, &Pencil) -> Result<Outcome>) -> Result<Outcome> {
    let (name, p) = load_pencil(a)?;
    size_guard(&p, a.force)?;
    f(a, &name, &p)
}

pub fn cmd_fixtures(a: &CommonArgs) -> Result<Outcome> {
    #[derive(Serialize)]
    struct Row {
        name: String,
        n: usize,
        q: u32,
        shape: String,
        description: String,
    }
    let rows: Vec<Row> = FIXTURE_NAMES
        .iter()
        .map(|name| {
            let fx = fixture(name, a.q)?;
            Ok(Row {
                name: fx.name,
                n: fx.pencil.n(),
                q: fx.pencil.field().q(),
                shape: fx.shape.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" "),
                description: fx.description,
            })
        })
        .collect::<Result<_>>()?;
    let out = match a.format {
        Format::Json => to_json(&rows),
        Format::Csv => to_csv(&rows)?,
    };
    Ok(outcome(out, true))
}

pub fn cmd_classify(a: &CommonArgs, name: &str, p: &Pencil) -> Result<Outcome> {
    let c = p.classify()?;
    let roots = c.f.roots();
    let split = roots.iter().map(|r| r.1).sum::<usize>() == c.f.degree().unwrap_or(0);
    let mults: Vec<usize> = roots.iter().map(|r| r.1).collect();
    let tag = match c.tag {
        ClassTag::Generic => "Generic",
        ClassTag::RegularNonGeneric => "RegularNonGeneric",
        ClassTag::NonRegular => "NonRegular",
    };
    let v = json!({
        "pencil": name,
        "n_total": p.n(),
        "q": p.field().q(),
        "class": tag,
        "multiplicities": mults,
        "roots": roots.iter().map(|r| p.field().fmt_elem(r.0)).collect::<Vec<_>>(),
        "splits": split,
        "disc_square": c.disc_square,
    });
    let out = match a.format {
        Format::Json => to_json(&v),
        Format::Csv => format!("pencil,n_total,q,class,multiplicities\n{name},{},{},{tag},{}\n", p.n(), p.field().q(), mults.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ")),
    };
    Ok(outcome(out, true))
}

/// Count rows: profile classes for odd N, starred classes for even N.
pub fn count_rows(p: &Pencil) -> Result<Vec<CountRow>> {
    let ed = p.eigendata()?;
    let r = ed.r();
    let mut rows = vec![];
    if p.n() % 2 == 1 {
        for (key, pts) in partition_by_profile(p)? {
            let expected = expected_class_size(r, &key);
            rows.push(CountRow { profile: key.label(), a: key.a, count: pts.len(), expected, pass: pts.len() as u64 == expected });
        }
    } else {
        let y0 = p.q1().maximal_isotropic();
        let sets = even_profile_sets(p, &y0)?;
        for (key, pts) in &sets.starred {
            let count = pts.iter().map(|pt| &pt.x).collect::<BTreeSet<_>>().len();
            let expected = expected_class_size(r, key);
            rows.push(CountRow { profile: key.label(), a: key.a, count, expected, pass: count as u64 == expected });
        }
    }
    Ok(rows)
}

pub fn cmd_count(a: &CommonArgs, name: &str, p: &Pencil) -> Result<Outcome> {
    let rows = count_rows(p)?;
    let pass = !rows.is_empty() && rows.iter().all(|r| r.pass);
    let out = match a.format {
        Format::Csv => to_csv(&rows)?,
        Format::Json => to_json(&json!({ "pencil": name, "rows": rows, "pass": pass })),
    };
    Ok(outcome(out, pass))
}

fn odd_checks(p: &Pencil) -> Result<Vec<Check>> {
    let mut checks = vec![];
    let class = p.classify()?;
    let classes = partition_by_profile(p)?;
    let t = p.self_adjoint_t()?;
    let ed = p.eigendata()?;
    let g = build_stab(&t, &ed, &p.q1(), Flavor::PO)?;
    checks.push(Check::new("stab_product_rule", g.check_product_rule()?, json!({ "order": g.order() })));
    let r = ed.r();
    for (key, pts) in &classes {
        let s: BTreeSet<_> = pts.iter().map(|pt| pt.x.clone()).collect();
        let expected_size = expected_class_size(r, key);
        let rep = orbit_report(&g, &s, |_| Some(1usize << key.a))?;
        let transitive = rep.orbits.len() == 1;
        checks.push(Check::new(
            &format!("class_{}", key.label()),
            rep.pass && transitive && s.len() as u64 == expected_size,
            json!({ "size": s.len(), "expected": expected_size, "orbits": rep.orbits }),
        ));
    }
    if class.tag == ClassTag::RegularNonGeneric {
        let rep = odd_reduction_report(p)?;
        checks.push(Check::new("reduction", rep.pass, serde_json::to_value(&rep).expect("serializable")));
    }
    Ok(checks)
}

fn even_checks(p: &Pencil, samples: usize, seed: u64, warnings: &mut Vec<String>) -> Result<Vec<Check>> {
    let mut checks = vec![];
    // a cone point at infinity makes A1 singular; then only the group-law checks apply
    let has_t = p.self_adjoint_t().is_ok();
    if has_t {
        let ed = p.eigendata()?;
        let pn = contains_pn(p)?;
        let all_even = ed.roots.iter().all(|r| r.1 % 2 == 0);
        checks.push(Check::new("contains_pn_dichotomy", pn.is_some() == all_even, json!({ "present": pn.is_some(), "all_even": all_even })));
        if geometric_genus(&ed) < 0 {
            warnings.push("p_g = -1: group-law checks skipped".into());
            return Ok(checks);
        }
        for row in count_rows(p)? {
            checks.push(Check::new(&format!("count_{}", row.profile), row.pass, json!({ "count": row.count, "expected": row.expected })));
        }
    } else {
        warnings.push("A1 is singular: checks through T = A1^-1 A2 skipped".into());
    }
    let gl = GroupLaw::new(p)?;
    let f_set = fano_set(p);
    let shadow = verify_group_shadow(&gl, &f_set, samples, seed)?;
    for c in shadow.checks {
        checks.push(Check::new(&c.name, c.pass, json!({ "tested": c.tested, "failures": c.failures, "witness": c.witness })));
    }
    match f2_infty(&gl, &f_set) {
        Ok(rep) => {
            checks.push(Check::new("f2_infty_characterizations", rep.agree, json!({ "size": rep.by_fixed_point.len(), "kind": rep.kind })));
            let two = verify_two_actions(&gl, &f_set)?;
            checks.push(Check::new("two_actions", two.pass, serde_json::to_value(&two).expect("serializable")));
        }
        Err(Error::NoBasePoint) => warnings.push("no rational distinguished point at infinity: F[2] checks skipped".into()),
        Err(e) => return Err(e),
    }
    if has_t && p.classify()?.tag != ClassTag::Generic {
        let (rep, _) = full_delta(p)?;
        checks.push(Check::new("full_delta", rep.pass, serde_json::to_value(&rep).expect("serializable")));
    }
    Ok(checks)
}

fn checks_outcome(a: &CommonArgs, name: &str, checks: Vec<Check>, warnings: Vec<String>) -> Result<Outcome> {
    let pass = checks.iter().all(|c| c.pass);
    let out = match a.format {
        Format::Json => to_json(&json!({ "pencil": name, "checks": checks, "warnings": warnings, "pass": pass })),
        Format::Csv => {
            #[derive(Serialize)]
            struct Row<'a> {
                check: &'a str,
                pass: bool,
            }
            to_csv(&checks.iter().map(|c| Row { check: &c.check, pass: c.pass }).collect::<Vec<_>>())?
        }
    };
    Ok(outcome(out, pass))
}

pub fn cmd_verify(a: &CommonArgs, name: &str, p: &Pencil) -> Result<Outcome> {
    let mut warnings = vec![];
    let checks = if p.n() % 2 == 1 { odd_checks(p)? } else { even_checks(p, a.samples, a.seed, &mut warnings)? };
    checks_outcome(a, name, checks, warnings)
}

pub fn cmd_verify_torsor(a: &CommonArgs, name: &str, p: &Pencil) -> Result<Outcome> {
    let mut checks = vec![];
    if p.n() % 2 == 1 {
        let class = p.classify()?;
        if class.tag != ClassTag::Generic {
            return Err(Error::NotGeneric("the torsor check needs a generic odd pencil".into()));
        }
        let t = p.self_adjoint_t()?;
        let ed = p.eigendata()?;
        let g = build_stab(&t, &ed, &p.q1(), Flavor::PO)?;
        let s = crate::fano::enumerate_common_isotropic(p, (p.n() - 1) / 2);
        let rep = orbit_report(&g, &s, |_| Some(1))?;
        checks.push(Check::new("product_rule", g.check_product_rule()?, json!({ "order": g.order() })));
        checks.push(Check::new("simply_transitive", rep.simply_transitive() && g.order() == s.len(), json!({ "orbits": rep.orbits, "set_size": s.len() })));
    } else {
        if p.self_adjoint_t().is_ok() && geometric_genus(&p.eigendata()?) < 0 {
            return Err(Error::ReducibleCurve);
        }
        let gl = GroupLaw::new(p)?;
        let f_set = fano_set(p);
        for c in verify_group_shadow(&gl, &f_set, a.samples, a.seed)?.checks {
            checks.push(Check::new(&c.name, c.pass, json!({ "tested": c.tested, "failures": c.failures, "witness": c.witness })));
        }
    }
    checks_outcome(a, name, checks, vec![])
}

pub fn cmd_reduce(a: &CommonArgs, name: &str, p: &Pencil) -> Result<Outcome> {
    if p.n() % 2 == 1 {
        let rep = odd_reduction_report(p)?;
        return Ok(outcome(to_json(&json!({ "pencil": name, "report": rep })), rep.pass));
    }
    let (rep, core) = full_delta(p)?;
    let v = if a.trace {
        serde_json::to_value(&rep.steps).expect("serializable")
    } else {
        json!({ "pencil": name, "report": rep, "core_classification": format!("{:?}", core.classify()?.tag) })
    };
    Ok(outcome(to_json(&v), rep.pass))
}

/// Lambda as printed in reports.
pub fn lambda_label(p: &Pencil, l: Lambda) -> String {
    match l {
        Lambda::Affine(x) => p.field().fmt_elem(x),
        Lambda::Infinity => "inf".into(),
    }
}
