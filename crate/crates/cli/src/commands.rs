use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use qplanar::expr::{DiagramExpr, DiagramField, Evaluator};
use qplanar::generators::{verify_thm1, Status};
use qplanar::identities::{verify_appendix, IdentityId, SweepSpec};
use qplanar::module::{decompose, flat, fusion_power, image_spectrum, Rep, Summand};
use qplanar::morphisms::{morphism, verify_morphisms, phi_neg, phi_pos, MorphismSpec, Pos};
use qplanar::operator::{BasisState, OperatorJson};
use qplanar::projections::{iso_map, proj_neg_pair, proj_pos, rules_for, verify_iso, verify_projection, ProjectionBundle};
use qplanar::{GenericField, Mode, QField, RootField, Scalar};

use crate::args::{Format, Global, MethodArg, ModeArg, MorphismName, Object, SignArg, Suite};
use crate::output::{emit, to_json, Cache, SCHEMA};
use crate::CliError;

const MAX_P: u32 = 12;
const MAX_DECOMPOSE: usize = 10;
const MAX_Z: usize = 12;

/// Validated global settings.
#[derive(Debug)]
pub struct RunConfig {
    pub p: u32,
    pub mode: Mode,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub trust_cache: bool,
}

impl RunConfig {
    pub fn from_args(g: &Global) -> Result<RunConfig, CliError> {
        if !(2..=MAX_P).contains(&g.p) {
            return Err(CliError::Config(format!("--p must lie in 2..={MAX_P}, got {}", g.p)));
        }
        if g.threads == Some(0) {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        Ok(RunConfig {
            p: g.p,
            mode: match g.mode {
                ModeArg::Generic => Mode::Generic,
                ModeArg::Root => Mode::Root(g.p),
            },
            format: g.format,
            out: g.out.clone(),
            cache: g.cache.clone(),
            trust_cache: g.trust_cache,
        })
    }

    fn root(&self, what: &str) -> Result<RootField, CliError> {
        match self.mode {
            Mode::Root(p) => Ok(RootField::new(p)),
            Mode::Generic => Err(CliError::Config(format!("{what} needs --mode root"))),
        }
    }

    fn write(&self, json: &impl Serialize, text: impl FnOnce() -> String) -> Result<(), CliError> {
        let body = match self.format {
            Format::Json => to_json(json)?,
            Format::Text => text(),
        };
        emit(self.out.as_deref(), &body)
    }
}

// ---------------------------------------------------------------- verify

struct SuiteOutcome {
    name: &'static str,
    passed: bool,
    results: Value,
    lines: Vec<String>,
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

/// Parses "1-16" or "1,4,13-16".
pub fn parse_ranges(s: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::Config(format!("cannot read relation list {s:?}"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u32, u32) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() || out.iter().any(|r| !(1..=16).contains(r)) {
        return Err(CliError::Config(format!("relations must lie in 1..=16, got {s:?}")));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn suite_thm1(f: &RootField, relations: &str, n: Option<usize>) -> Result<SuiteOutcome, CliError> {
    let rels = parse_ranges(relations)?;
    let reports = verify_thm1(f, &rels, n)?;
    let lines = reports
        .iter()
        .map(|r| {
            let mut l = format!("relation {:>2} on {} strands: {}", r.relation, r.strands, mark(r.status == Status::Pass));
            if let Some(w) = &r.witness {
                l.push_str(&format!(" ({}; {} -> {}: {} vs {})", w.context, w.input, w.output, w.lhs, w.rhs));
            }
            l
        })
        .collect();
    Ok(SuiteOutcome {
        name: "thm1",
        passed: reports.iter().all(|r| r.status == Status::Pass),
        results: serde_json::to_value(&reports).map_err(qplanar::Error::from)?,
        lines,
    })
}

fn suite_projections(f: &RootField) -> Result<SuiteOutcome, CliError> {
    let p = f.p();
    let mut results = Vec::new();
    let mut lines = Vec::new();
    let mut passed = true;
    for i in 1..p {
        for (bundle, phi) in [(proj_pos(f, i)?, phi_pos(f, i)?), (proj_neg_pair(f, i)?, phi_neg(f, i)?)] {
            let report = verify_projection(f, &bundle, Some(&phi))?;
            passed &= report.passed();
            lines.push(format!(
                "projection i={i} sign={} on {} strands: rank {} {}",
                bundle.sign,
                bundle.strands,
                report.rank,
                mark(report.passed())
            ));
            results.push(json!({"i": i, "sign": bundle.sign, "strands": bundle.strands, "report": report}));
        }
    }
    for rule in rules_for(p) {
        let ok = verify_iso(&iso_map(f, rule)?);
        passed &= ok;
        lines.push(format!("isomorphism {rule:?}: {}", mark(ok)));
        results.push(json!({"isomorphism": rule, "passed": ok}));
    }
    Ok(SuiteOutcome { name: "projections", passed, results: Value::Array(results), lines })
}

fn suite_morphisms(f: &RootField) -> Result<SuiteOutcome, CliError> {
    let mut results = Vec::new();
    let mut lines = Vec::new();
    let mut passed = true;
    for i in 1..f.p() {
        let checks = verify_morphisms(f, i)?;
        for c in &checks {
            passed &= c.passed;
            lines.push(format!("i={i} {}: {}", c.name, mark(c.passed)));
        }
        results.push(json!({"i": i, "checks": checks}));
    }
    Ok(SuiteOutcome { name: "morphisms", passed, results: Value::Array(results), lines })
}

fn suite_appendix(p: u32, ids: Option<&str>, max_z: Option<usize>) -> Result<SuiteOutcome, CliError> {
    let mut spec = SweepSpec::new(p);
    if let Some(ids) = ids {
        spec.ids = ids.split(',').map(|s| IdentityId::parse(s.trim())).collect::<Result<_, _>>().map_err(|e| CliError::Config(e.to_string()))?;
    }
    if let Some(z) = max_z {
        if !(1..=MAX_Z).contains(&z) {
            return Err(CliError::Config(format!("--max-z must lie in 1..={MAX_Z}, got {z}")));
        }
        spec.max_z = z;
        spec.max_xi = z;
    }
    let reports = verify_appendix(&spec)?;
    let lines = reports
        .iter()
        .map(|r| {
            let mut l = format!("{:<4} {:>6} cases: {}", r.id.to_string(), r.cases, mark(r.passed));
            if let Some(w) = &r.witness {
                l.push_str(&format!(" ({w})"));
            }
            l
        })
        .collect();
    Ok(SuiteOutcome {
        name: "appendix",
        passed: reports.iter().all(|r| r.passed),
        results: serde_json::to_value(&reports).map_err(qplanar::Error::from)?,
        lines,
    })
}

pub fn cmd_verify(cfg: &RunConfig, suite: &Suite) -> Result<bool, CliError> {
    let f = cfg.root("verification")?;
    let outcomes = match suite {
        Suite::Thm1 { relations, n } => vec![suite_thm1(&f, relations, *n)?],
        Suite::Projections => vec![suite_projections(&f)?],
        Suite::Morphisms => vec![suite_morphisms(&f)?],
        Suite::Appendix { ids, max_z } => vec![suite_appendix(cfg.p, ids.as_deref(), *max_z)?],
        Suite::All => vec![
            suite_thm1(&f, "1-16", None)?,
            suite_projections(&f)?,
            suite_morphisms(&f)?,
            suite_appendix(cfg.p, None, None)?,
        ],
    };
    let passed = outcomes.iter().all(|o| o.passed);
    let json = json!({
        "schema": SCHEMA,
        "p": cfg.p,
        "passed": passed,
        "suites": outcomes.iter().map(|o| json!({"suite": o.name, "passed": o.passed, "results": o.results})).collect::<Vec<_>>(),
    });
    cfg.write(&json, || {
        let mut s = String::new();
        for o in &outcomes {
            s.push_str(&format!("== {} (p={}): {}\n", o.name, cfg.p, mark(o.passed)));
            for l in &o.lines {
                s.push_str(&format!("  {l}\n"));
            }
        }
        s
    })?;
    Ok(passed)
}

// ---------------------------------------------------------------- compute

/// The document written by `compute`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComputePayload {
    pub schema: String,
    pub object: String,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization: Option<Scalar>,
    pub operator: OperatorJson,
}

impl ComputePayload {
    fn new(object: String, mode: Mode, operator: OperatorJson) -> Self {
        let (mode_name, p) = match mode {
            Mode::Generic => ("generic".to_string(), None),
            Mode::Root(p) => ("root".to_string(), Some(p)),
        };
        ComputePayload {
            schema: SCHEMA.into(),
            object,
            mode: mode_name,
            p,
            rank: None,
            spectrum: None,
            method: None,
            normalization: None,
            operator,
        }
    }

    pub fn render_text(&self) -> String {
        let op = &self.operator;
        let mut s = format!("{} [{}", self.object, self.mode);
        if let Some(p) = self.p {
            s.push_str(&format!(", p={p}"));
        }
        s.push_str(&format!("]: {} -> {} strands\n", op.m, op.n));
        if let Some(r) = self.rank {
            s.push_str(&format!("rank {r}\n"));
        }
        if let Some(sp) = &self.spectrum {
            s.push_str(&format!("K exponents {sp:?}\n"));
        }
        if let Some(c) = &self.normalization {
            s.push_str(&format!("normalization {c}\n"));
        }
        for b in &op.blocks {
            for (r, c, v) in &b.entries {
                let x = BasisState::unrank(op.m, b.k, *c);
                let y = BasisState::unrank(op.n, b.k2, *r);
                s.push_str(&format!("  {x} -> {y}: {v}\n"));
            }
        }
        s
    }
}

fn expr_payload<F: DiagramField>(field: F, e: &DiagramExpr) -> Result<ComputePayload, CliError> {
    let mode = field.mode();
    let op = Evaluator::new(field.clone()).eval(e)?;
    Ok(ComputePayload::new(e.to_string(), mode, op.to_json(&field)))
}

fn diagram(cfg: &RunConfig, e: &DiagramExpr) -> Result<ComputePayload, CliError> {
    match cfg.mode {
        Mode::Generic => expr_payload(GenericField, e),
        Mode::Root(p) => expr_payload(RootField::new(p), e),
    }
}

fn projection(f: &RootField, i: u32, sign: SignArg, method: MethodArg) -> Result<ComputePayload, CliError> {
    if method == MethodArg::Closed {
        return Err(CliError::Config("only the descent construction is available".into()));
    }
    let bundle: ProjectionBundle = match sign {
        SignArg::Plus => proj_pos(f, i)?,
        SignArg::Minus => proj_neg_pair(f, i)?,
    };
    let rep = Rep::tensor_power(f, bundle.strands);
    let mut out = ComputePayload::new(format!("projection(i={i},sign={})", bundle.sign), f.mode(), bundle.proj.to_json(f));
    out.rank = Some(bundle.proj.rank());
    out.spectrum = Some(image_spectrum(&rep, &flat(&bundle.proj)));
    out.method = Some("descent".into());
    Ok(out)
}

fn morphism_spec(name: MorphismName, i: u32, j: Option<u8>, pos: Option<&str>) -> Result<MorphismSpec, CliError> {
    let variant = || -> Result<(u8, Pos), CliError> {
        let j = j.ok_or_else(|| CliError::Config("variants need --j 1|2".into()))?;
        if !(1..=2).contains(&j) {
            return Err(CliError::Config(format!("--j must be 1 or 2, got {j}")));
        }
        let pos = pos.ok_or_else(|| CliError::Config("variants need --pos l|u".into()))?;
        Ok((j, Pos::parse(pos).map_err(|e| CliError::Config(e.to_string()))?))
    };
    Ok(match name {
        MorphismName::Theta => MorphismSpec::Theta { i },
        MorphismName::Gamma => MorphismSpec::Gamma { i },
        MorphismName::Phi => MorphismSpec::Phi { i },
        MorphismName::PhiNeg => MorphismSpec::PhiNeg { i },
        MorphismName::ThetaVar => {
            let (j, pos) = variant()?;
            MorphismSpec::ThetaVar { i, j, pos }
        }
        MorphismName::GammaVar => {
            let (j, pos) = variant()?;
            MorphismSpec::GammaVar { i, j, pos }
        }
    })
}

fn cache_key(cfg: &RunConfig, object: &Object) -> String {
    let mode = cfg.mode.to_string();
    match object {
        Object::Jw { n } => format!("{mode}|{}", DiagramExpr::Jw(*n)),
        Object::Alpha => format!("{mode}|alpha"),
        Object::Beta => format!("{mode}|beta"),
        Object::Expr { expr } => match DiagramExpr::parse(expr) {
            Ok(e) => format!("{mode}|{e}"),
            Err(_) => format!("{mode}|{expr}"),
        },
        other => format!("{mode}|{other:?}"),
    }
}

fn compute(cfg: &RunConfig, object: &Object) -> Result<ComputePayload, CliError> {
    let w = 2 * cfg.p as usize - 1;
    match object {
        Object::Jw { n } => diagram(cfg, &DiagramExpr::Jw(*n)),
        Object::Alpha => {
            cfg.root("alpha")?;
            diagram(cfg, &DiagramExpr::Alpha(1, w))
        }
        Object::Beta => {
            cfg.root("beta")?;
            diagram(cfg, &DiagramExpr::Beta(1, w))
        }
        Object::Expr { expr } => {
            let e = DiagramExpr::parse(expr)?;
            diagram(cfg, &e)
        }
        Object::Projection { i, sign, method } => projection(&cfg.root("projections")?, *i, *sign, *method),
        Object::Morphism { name, i, j, pos } => {
            let f = cfg.root("morphisms")?;
            let spec = morphism_spec(*name, *i, *j, pos.as_deref())?;
            let b = morphism(&f, spec)?;
            let mut out = ComputePayload::new(spec.label(), f.mode(), b.op.to_json(&f));
            out.object = format!("{}(i={})", spec.label(), b.i);
            out.normalization = Some(b.normalization);
            Ok(out)
        }
    }
}

pub fn cmd_compute(cfg: &RunConfig, object: &Object) -> Result<bool, CliError> {
    let cache = cfg.cache.as_deref().map(Cache::open).transpose()?;
    let key = cache_key(cfg, object);
    let cached: Option<ComputePayload> = cache.as_ref().and_then(|c| c.get(&key)).and_then(|s| serde_json::from_str(&s).ok());
    let payload = match cached {
        Some(hit) if cfg.trust_cache => hit,
        hit => {
            let fresh = compute(cfg, object)?;
            if let Some(c) = &cache {
                if hit.as_ref().is_some_and(|h| *h != fresh) {
                    eprintln!("warning: cached value for {} was stale and has been replaced", fresh.object);
                }
                c.put(&key, &to_json(&fresh)?)?;
            }
            fresh
        }
    };
    cfg.write(&payload, || payload.render_text())?;
    Ok(true)
}

// ---------------------------------------------------------------- decompose

#[derive(Serialize)]
struct Line {
    module: String,
    multiplicity: usize,
}

fn lines(s: &[Summand]) -> Vec<Line> {
    s.iter().map(|x| Line { module: x.module.to_string(), multiplicity: x.multiplicity }).collect()
}

pub fn cmd_decompose(cfg: &RunConfig, n: usize) -> Result<bool, CliError> {
    let f = cfg.root("decompose")?;
    if !(1..=MAX_DECOMPOSE).contains(&n) {
        return Err(CliError::Config(format!("--n must lie in 1..={MAX_DECOMPOSE}, got {n}")));
    }
    let found = decompose(&Rep::tensor_power(&f, n))?;
    let expected = fusion_power(cfg.p, n);
    let matches = found == expected;
    let json = json!({
        "schema": SCHEMA,
        "p": cfg.p,
        "n": n,
        "summands": lines(&found),
        "fusion": lines(&expected),
        "matches_fusion": matches,
    });
    cfg.write(&json, || {
        let mut s = format!("X^(x){n} at p={}:\n", cfg.p);
        for l in lines(&found) {
            s.push_str(&format!("  {:<6} {}\n", l.module, l.multiplicity));
        }
        s.push_str(&format!("fusion rules: {}\n", if matches { "agree" } else { "DISAGREE" }));
        s
    })?;
    Ok(matches)
}
