//! Report builders behind the `sqzlift` command line: each command turns an instance into a
//! versioned JSON report or a diagnostic with an exit code.

use std::path::Path;

use serde_json::{json, Value};
use sqzlift_core::algebra::{FiniteAlgebra, SectionChoice};
use sqzlift_core::exactlin::{AbGroup, Int};
use sqzlift_core::instance::{Instance, InstanceError};
use sqzlift_core::modcx::{tensor_complex, TensorProduct};
use sqzlift_core::nullpair::{
    is_beta_divisible, is_beta_torsion_connective, pair_from_lift, phi_localization_vanishes, ColaxPair, NullPairError,
};
use sqzlift_core::obstruction::{
    adams_graded, classify_lifts, lift_differentials, obstruction_cocycle, section_invariant, solve_null_homotopies,
    tor_check, verify_fiber_sequence, LiftReport, ObstructionError,
};
use sqzlift_core::oracle::{brute_force_lifts, oracle_ext, OracleError};
use sqzlift_core::resolve::{free_resolution, hyper_ext, tor_group, Resolution, ResolveError, Strategy};

pub const SCHEMA_VERSION: u32 = 1;

const DEFAULT_LENGTH: usize = 4;
const DEFAULT_BUDGET: usize = 16;
const CLASS_CAP: usize = 256;
const TOWER_LEVELS: usize = 3;
const TOWER_THROUGH: i64 = 2;
const TOWER_LENGTH: usize = 2;

pub struct Params {
    pub resolution_length: Option<usize>,
    pub budget: Option<usize>,
    pub section: Option<u64>,
    pub max_degree: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params { resolution_length: None, budget: None, section: None, max_degree: 2 }
    }
}

pub struct Outcome {
    pub report: Value,
    /// False when a mathematical check failed.
    pub ok: bool,
}

#[derive(Debug)]
pub enum Failure {
    Malformed { path: String, message: String },
    Exhausted(String),
    Inconsistent(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Inconsistent(_) => 2,
            Failure::Exhausted(_) => 3,
            Failure::Malformed { .. } => 4,
        }
    }

    pub fn diagnostic(&self, command: Option<&str>) -> Value {
        let error = match self {
            Failure::Malformed { path, message } => json!({"kind": "malformed_input", "path": path, "message": message}),
            Failure::Exhausted(m) => json!({"kind": "exhausted", "message": m}),
            Failure::Inconsistent(m) => json!({"kind": "mathematical_failure", "message": m}),
        };
        json!({"schema_version": SCHEMA_VERSION, "command": command, "error": error})
    }
}

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Self {
        match e {
            InstanceError::Invalid { path, message } => Failure::Malformed { path, message },
            InstanceError::Io(path, e) => Failure::Malformed { path, message: e.to_string() },
            InstanceError::Parse(e) => Failure::Malformed { path: "toml".into(), message: e.to_string() },
        }
    }
}

impl From<ResolveError> for Failure {
    fn from(e: ResolveError) -> Self {
        match e {
            ResolveError::NeedLongerResolution { .. } => Failure::Exhausted(e.to_string()),
            ResolveError::NotAModule => Failure::Malformed { path: "module".into(), message: e.to_string() },
            _ => Failure::Inconsistent(e.to_string()),
        }
    }
}

impl From<ObstructionError> for Failure {
    fn from(e: ObstructionError) -> Self {
        match e {
            ObstructionError::Resolve(e) => e.into(),
            ObstructionError::Undecided(_) | ObstructionError::Precondition(_) => Failure::Exhausted(e.to_string()),
            _ => Failure::Inconsistent(e.to_string()),
        }
    }
}

impl From<NullPairError> for Failure {
    fn from(e: NullPairError) -> Self {
        match e {
            NullPairError::Obstruction(e) => e.into(),
            _ => Failure::Inconsistent(e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::BudgetExceeded { .. } | OracleError::UncertifiedResolution(_) => Failure::Exhausted(e.to_string()),
            OracleError::Unsupported(_) => Failure::Malformed { path: "instance".into(), message: e.to_string() },
            OracleError::Internal(_) => Failure::Inconsistent(e.to_string()),
        }
    }
}

impl From<sqzlift_core::modcx::ModError> for Failure {
    fn from(e: sqzlift_core::modcx::ModError) -> Self {
        Failure::Inconsistent(e.to_string())
    }
}

struct Ctx {
    inst: Instance,
    length: usize,
    budget: usize,
    section: Option<u64>,
    max_degree: usize,
}

impl Ctx {
    fn resolution(&self, length: usize) -> Result<Resolution, Failure> {
        Ok(free_resolution(&self.inst.input, length, Strategy::Greedy)?)
    }

    fn module(&self, command: &str) -> Result<&sqzlift_core::modcx::FinModule, Failure> {
        self.inst.module().ok_or_else(|| Failure::Malformed {
            path: "complex".into(),
            message: format!("`{command}` needs a module input"),
        })
    }

    fn header(&self, command: &str) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "instance": self.inst.name,
            "parameters": {
                "resolution_length": self.length,
                "budget": self.budget,
                "section": self.section.map_or(json!("canonical"), |s| json!(s)),
            },
        })
    }
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn ring_summary(a: &FiniteAlgebra) -> Value {
    json!({
        "rank": a.rank(),
        "order": a.order().map(|o| o.to_string()),
        "group": AbGroup::from_moduli(a.moduli()),
    })
}

fn small(x: Option<Int>) -> Value {
    match x {
        Some(v) => match u64::try_from(&v) {
            Ok(n) => json!(n),
            Err(_) => json!(v.to_string()),
        },
        None => Value::Null,
    }
}

fn class_string(coords: &[Int]) -> String {
    if coords.iter().all(|c| c == &Int::from(0)) {
        return "0".into();
    }
    let parts: Vec<String> = coords.iter().map(ToString::to_string).collect();
    if parts.len() == 1 {
        parts[0].clone()
    } else {
        format!("({})", parts.join(", "))
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports are plain JSON")
}

pub const COMMANDS: &[&str] = &["check", "resolve", "ext", "tor", "obstruct", "lifts", "verify", "oracle", "torsor"];

/// Runs `command` on an instance file.
pub fn run(command: &str, path: &Path, params: &Params) -> Result<Outcome, Failure> {
    run_instance(command, Instance::from_path(path)?, params)
}

/// Runs `command` on instance TOML text.
pub fn run_toml(command: &str, text: &str, params: &Params) -> Result<Outcome, Failure> {
    run_instance(command, Instance::from_toml(text)?, params)
}

pub fn run_instance(command: &str, mut inst: Instance, params: &Params) -> Result<Outcome, Failure> {
    if let Some(seed) = params.section {
        inst = inst.with_section(SectionChoice::Seeded(seed));
    }
    let ctx = Ctx {
        length: params.resolution_length.or(inst.options.resolution_length).unwrap_or(DEFAULT_LENGTH),
        budget: params.budget.or(inst.options.budget).unwrap_or(DEFAULT_BUDGET),
        section: params.section,
        max_degree: params.max_degree,
        inst,
    };
    let (body, ok) = match command {
        "check" => (check(&ctx), true),
        "resolve" => (resolve(&ctx)?, true),
        "ext" => (ext(&ctx)?, true),
        "tor" => (tor(&ctx)?, true),
        "obstruct" => (obstruct(&ctx)?, true),
        "lifts" => lifts(&ctx)?,
        "verify" => verify(&ctx)?,
        "oracle" => (oracle(&ctx)?, true),
        "torsor" => torsor(&ctx)?,
        other => return Err(Failure::Malformed { path: "arguments".into(), message: format!("unknown command {other}") }),
    };
    Ok(Outcome { report: merge(ctx.header(command), merge(body, json!({"ok": ok}))), ok })
}

fn check(ctx: &Ctx) -> Value {
    let d = &ctx.inst.datum;
    let x = &ctx.inst.input;
    json!({
        "ring": ring_summary(d.r()),
        "quotient": ring_summary(d.s()),
        "kernel": {"group": AbGroup::from_moduli(d.j().moduli()), "square_zero": true},
        "section": {"ring_map": d.section_is_ring_map()},
        "input": {
            "bounds": [x.lo(), x.hi()],
            "terms": (x.lo()..=x.hi()).map(|k| x.term(k).group()).collect::<Vec<_>>(),
            "homology": x.homology_summary(),
        },
    })
}

fn resolve(ctx: &Ctx) -> Result<Value, Failure> {
    let res = ctx.resolution(ctx.length)?;
    Ok(json!({
        "bounds": [res.lo(), res.hi()],
        "ranks": res.ranks(),
        "certificate": to_value(res.certificate()),
        "exact_through": res.exact_through(),
    }))
}

fn ext(ctx: &Ctx) -> Result<Value, Failure> {
    let d = &ctx.inst.datum;
    let x = &ctx.inst.input;
    let res = ctx.resolution(ctx.length.max(ctx.max_degree + 1))?;
    let jx = tensor_complex(d.j(), x)?;
    let mut degrees = Vec::new();
    for i in 0..=ctx.max_degree as i64 {
        degrees.push(json!({
            "degree": i,
            "self": hyper_ext(&res, x, i)?.group(),
            "kernel": hyper_ext(&res, &jx, i)?.group(),
        }));
    }
    Ok(json!({"ext": degrees}))
}

fn tor(ctx: &Ctx) -> Result<Value, Failure> {
    let d = &ctx.inst.datum;
    let x = &ctx.inst.input;
    let res = ctx.resolution(ctx.length.max(ctx.max_degree + 2))?;
    let mut degrees = Vec::new();
    for i in x.lo()..=x.hi() + ctx.max_degree as i64 {
        degrees.push(json!({"degree": i, "group": tor_group(d.j(), &res, i)?}));
    }
    Ok(json!({"tor": degrees, "vanishing": to_value(&tor_check(d, &res))}))
}

fn obstruct(ctx: &Ctx) -> Result<Value, Failure> {
    let d = &ctx.inst.datum;
    let res = ctx.resolution(ctx.length)?;
    let ob = obstruction_cocycle(&lift_differentials(d, &res)?)?;
    let vanishes = match solve_null_homotopies(&ob) {
        Ok(_) => true,
        Err(ObstructionError::NoSolution) => false,
        Err(e) => return Err(e.into()),
    };
    Ok(json!({
        "ext2_group": ob.ext2_group(),
        "ext2_class": class_string(ob.class()),
        "vanishes": vanishes,
        "classical": ob.classical().map(to_value),
        "tor": to_value(&tor_check(d, &res)),
    }))
}

fn lift_summary(rep: &LiftReport) -> Value {
    json!({
        "classes": rep.class_count(),
        "ext1_order": small(rep.ext1.as_ref().and_then(AbGroup::order)),
        "torsor_ok": rep.torsor.as_ref().map(|t| t.ok()),
        "witness": rep.witness.is_some(),
    })
}

fn lifts(ctx: &Ctx) -> Result<(Value, bool), Failure> {
    let rep = classify_lifts(&ctx.inst.datum, &ctx.inst.input, ctx.length, CLASS_CAP)?;
    let ok = rep.torsor.as_ref().is_none_or(|t| t.ok());
    Ok((merge(lift_summary(&rep), json!({"report": to_value(&rep)})), ok))
}

fn verify(ctx: &Ctx) -> Result<(Value, bool), Failure> {
    let d = &ctx.inst.datum;
    let x = &ctx.inst.input;
    let rep = classify_lifts(d, x, ctx.length, CLASS_CAP)?;
    let connective = (x.lo()..0).all(|k| x.homology(k).module.is_zero_module());
    let mut ok = true;
    let mut lifts = Vec::new();
    for (index, c) in rep.classes.iter().chain(&rep.witness).enumerate() {
        let fiber = verify_fiber_sequence(&c.lift)?;
        let tower = adams_graded(&c.lift, TOWER_LEVELS, TOWER_THROUGH, TOWER_LENGTH)?;
        let pair = pair_from_lift(d, &c.lift)?;
        let back = pair.lift()?;
        let cx = c.lift.complex();
        let round_trip = (cx.lo() + 1..=cx.hi()).all(|k| back.complex().diff_matrix(k) == cx.diff_matrix(k));
        let divisible = is_beta_divisible(&pair)?;
        let torsion = if connective { Some(is_beta_torsion_connective(&pair)?.torsion) } else { None };
        let divisible_ok = !divisible || x.is_acyclic();
        ok &= fiber.ok() && tower.ok() && round_trip && divisible_ok && torsion != Some(false);
        lifts.push(json!({
            "index": index,
            "fiber_sequence": fiber.ok(),
            "non_split": fiber.non_split,
            "tower": tower.ok(),
            "pair_round_trip": round_trip,
            "divisible": divisible,
            "torsion": torsion,
        }));
    }
    let res = ctx.resolution(ctx.length)?;
    let other = if ctx.section.is_some() { SectionChoice::Canonical } else { SectionChoice::Seeded(1) };
    let section = section_invariant(d, &res, other)?;
    let ob = obstruction_cocycle(&lift_differentials(d, &res)?)?;
    let localization = phi_localization_vanishes(&ColaxPair::from_obstruction(&ob)?)?;
    ok &= section && localization.vanishes();
    let body = json!({
        "lifts": lifts,
        "section_invariant": section,
        "localization": to_value(&localization),
        "summary": lift_summary(&rep),
    });
    Ok((body, ok))
}

fn oracle(ctx: &Ctx) -> Result<Value, Failure> {
    let m = ctx.module("oracle")?;
    let d = &ctx.inst.datum;
    let found = brute_force_lifts(d, m, ctx.budget)?;
    let t = TensorProduct::new(d.j(), m)?.module().clone();
    let mut ext = Vec::new();
    for i in 0..=ctx.max_degree {
        ext.push(json!({"degree": i, "kernel": oracle_ext(m.algebra(), m, &t, i)?}));
    }
    Ok(json!({
        "lifts": to_value(&found),
        "iso_classes": found.iso_classes(),
        "pair_count": found.pair_count(),
        "complete": found.complete(),
        "ext": ext,
    }))
}

fn torsor(ctx: &Ctx) -> Result<(Value, bool), Failure> {
    let m = ctx.module("torsor")?;
    let d = &ctx.inst.datum;
    let rep = classify_lifts(d, &ctx.inst.input, ctx.length, CLASS_CAP)?;
    let found = brute_force_lifts(d, m, ctx.budget)?;
    let (agree, scope) = match found.nonzero_tor {
        None => {
            let torsor_ok = rep.torsor.as_ref().is_none_or(|t| t.ok());
            (rep.obstructed != found.exists() && rep.class_count() == found.pair_count() && torsor_ok, "all")
        }
        // Only discrete lifts are visible to the search; it must not see one the solver rules out.
        Some(i) => (!(found.exists() && rep.obstructed) && rep.tor.nonzero.contains(&(i as i64)), "discrete"),
    };
    let body = json!({
        "solver": lift_summary(&rep),
        "obstructed": rep.obstructed,
        "oracle": {
            "exists": found.exists(),
            "iso_classes": found.iso_classes(),
            "pair_count": found.pair_count(),
            "nonzero_tor": found.nonzero_tor,
            "scope": scope,
        },
        "agree": agree,
    });
    Ok((body, agree))
}
