//! Line-oriented scenario files.
//!
//! ```text
//! # comment
//! prime 3
//! ground char_p                 # or: ground char_p a c d | ground closed 0
//! variables d c t               # innermost first
//! generator xL as 2*d^-1        # Artin–Schreier root; `root` for a p-th root
//! algebra A = [d^-1 - c^-1, t)
//! task example73 part=1
//! chain
//!   variables d c
//!   generator xL as 2*d^-1 - c^-1
//!   start [c^-1, d^-1)
//!   step SLOT1-ADD -> [c^-1 - 2*d^-1, d^-1) + 2*[d^-1, d^-1)
//!   step AS-SHIFT term=1 witness=-xL -> 0
//! end
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use abrd_core::brauer::{RewriteChain, RewriteStep, Rule, SymbolSum};
use abrd_core::element::FormalElement;
use abrd_core::fieldtower::{adjoin_artin_schreier, adjoin_pth_root, FieldTower, GroundField};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ScenarioError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug)]
pub struct Task {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub prime: Option<u32>,
    pub tower: Option<FieldTower>,
    pub algebras: Vec<(String, SymbolSum)>,
    pub task: Task,
    pub chain: Option<RewriteChain>,
}

impl Scenario {
    pub fn algebra(&self, name: &str) -> Option<&SymbolSum> {
        self.algebras.iter().find(|(n, _)| n == name).map(|(_, a)| a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum GenKind {
    ArtinSchreier,
    Root,
}

#[derive(Default)]
struct TowerDraft {
    ground: Option<GroundField>,
    variables: Option<Vec<String>>,
    generators: Vec<(usize, String, GenKind, String, usize)>,
}

struct Line<'a> {
    no: usize,
    text: &'a str,
}

impl Line<'_> {
    fn err(&self, col: usize, msg: impl fmt::Display) -> ScenarioError {
        ScenarioError { line: self.no, col, msg: msg.to_string() }
    }

    /// Column (1-based) where `sub`, a slice of this line, begins.
    fn col_of(&self, sub: &str) -> usize {
        let off = (sub.as_ptr() as usize).saturating_sub(self.text.as_ptr() as usize);
        off.min(self.text.len()) + 1
    }
}

fn core_err(line: &Line<'_>, start: usize, e: abrd_core::Error) -> ScenarioError {
    match e {
        abrd_core::Error::Parse { col, msg } => line.err(start + col - 1, msg),
        other => line.err(start, other),
    }
}

fn strip_comment(s: &str) -> &str {
    s.split('#').next().unwrap_or("")
}

fn build_tower(prime: u32, draft: &TowerDraft, lines: &[Line<'_>], at: &Line<'_>) -> Result<FieldTower, ScenarioError> {
    let ground = draft.ground.clone().unwrap_or_else(|| GroundField::char_p(prime, &[]));
    let vars = draft.variables.as_ref().ok_or_else(|| at.err(1, "missing `variables`"))?;
    let refs: Vec<&str> = vars.iter().map(String::as_str).collect();
    let mut t = FieldTower::new(prime, ground, &refs).map_err(|e| at.err(1, e))?;
    for (li, name, kind, rhs, col) in &draft.generators {
        let line = &lines[*li];
        let e = t.element(rhs).map_err(|e| core_err(line, *col, e))?;
        let spec = t.full();
        let r = match kind {
            GenKind::ArtinSchreier => adjoin_artin_schreier(&t, name, &e, spec),
            GenKind::Root => adjoin_pth_root(&t, name, &e, spec),
        };
        t = r.map_err(|e| line.err(*col, e))?.0;
    }
    Ok(t)
}

fn parse_ground(line: &Line<'_>, rest: &str, prime: u32) -> Result<GroundField, ScenarioError> {
    let mut it = rest.split_whitespace();
    match it.next() {
        Some("char_p") => {
            let consts: Vec<&str> = it.collect();
            Ok(GroundField::char_p(prime, &consts))
        }
        Some("closed") => {
            let c = it
                .next()
                .ok_or_else(|| line.err(line.col_of(rest), "`closed` needs a characteristic"))?;
            let c: u32 = c.parse().map_err(|_| line.err(line.col_of(rest), format!("bad characteristic `{c}`")))?;
            if let Some(x) = it.next() {
                return Err(line.err(line.col_of(rest), format!("unexpected `{x}`")));
            }
            Ok(GroundField::algebraically_closed(c))
        }
        other => Err(line.err(line.col_of(rest), format!("unknown ground kind {other:?}"))),
    }
}

fn parse_generator(
    line: &Line<'_>,
    rest: &str,
) -> Result<(String, GenKind, String, usize), ScenarioError> {
    let mut parts = rest.trim_start().splitn(3, char::is_whitespace);
    let name = parts.next().filter(|s| !s.is_empty()).ok_or_else(|| line.err(line.col_of(rest), "generator needs a name"))?;
    let kind = match parts.next() {
        Some("as") => GenKind::ArtinSchreier,
        Some("root") => GenKind::Root,
        other => return Err(line.err(line.col_of(rest), format!("expected `as` or `root`, found {other:?}"))),
    };
    let rhs = parts.next().unwrap_or("").trim();
    if rhs.is_empty() {
        return Err(line.err(line.text.len() + 1, "generator needs a right-hand side"));
    }
    Ok((name.to_string(), kind, rhs.to_string(), line.col_of(rhs)))
}

fn parse_sum(p: u32, line: &Line<'_>, text: &str) -> Result<SymbolSum, ScenarioError> {
    let text = text.trim();
    SymbolSum::parse(p, text).map_err(|e| core_err(line, line.col_of(text), e))
}

fn parse_step(p: u32, line: &Line<'_>, rest: &str) -> Result<RewriteStep, ScenarioError> {
    let (head, after) = rest
        .split_once("->")
        .ok_or_else(|| line.err(line.col_of(rest), "step needs `-> RESULT`"))?;
    let after = parse_sum(p, line, after)?;
    let mut toks = head.split_whitespace();
    let rule_name = toks.next().ok_or_else(|| line.err(line.col_of(rest), "step needs a rule"))?;
    let rule = Rule::from_name(rule_name)
        .ok_or_else(|| line.err(line.col_of(rest), format!("unknown rule `{rule_name}`")))?;
    let mut step = RewriteStep::new(rule, after);
    let mut fields: Vec<(String, String)> = Vec::new();
    for tok in toks {
        match tok.split_once('=') {
            Some((k, v)) if ["term", "witness", "factor"].contains(&k) => fields.push((k.into(), v.into())),
            _ => match fields.last_mut() {
                Some((k, v)) if k != "term" => {
                    v.push(' ');
                    v.push_str(tok);
                }
                _ => return Err(line.err(line.col_of(rest), format!("unexpected `{tok}` in step"))),
            },
        }
    }
    for (k, v) in fields {
        match k.as_str() {
            "term" => {
                let t: usize = v.parse().map_err(|_| line.err(line.col_of(rest), format!("bad term index `{v}`")))?;
                step = step.on(t);
            }
            "witness" => step = step.witness(FormalElement::parse(p, &v).map_err(|e| core_err(line, line.col_of(rest), e))?),
            _ => step = step.factor(FormalElement::parse(p, &v).map_err(|e| core_err(line, line.col_of(rest), e))?),
        }
    }
    Ok(step)
}

pub fn parse_scenario(src: &str) -> Result<Scenario, ScenarioError> {
    let lines: Vec<Line<'_>> = src.lines().enumerate().map(|(i, t)| Line { no: i + 1, text: t }).collect();
    let mut prime = None;
    let mut top = TowerDraft::default();
    let mut algebras: Vec<(String, SymbolSum)> = Vec::new();
    let mut task: Option<Task> = None;
    let mut chain: Option<RewriteChain> = None;
    let mut i = 0;
    let need_p = |prime: Option<u32>, line: &Line<'_>| prime.ok_or_else(|| line.err(1, "`prime` must come first"));
    while i < lines.len() {
        let line = &lines[i];
        let body = strip_comment(line.text);
        let trimmed = body.trim_start();
        i += 1;
        if trimmed.trim().is_empty() {
            continue;
        }
        let (kw, rest) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed.trim_end(), ""));
        let rest_start = &body[body.len() - rest.len()..];
        match kw {
            "prime" => {
                if prime.is_some() {
                    return Err(line.err(1, "duplicate `prime`"));
                }
                let p: u32 = rest.trim().parse().map_err(|_| line.err(line.col_of(rest_start), format!("bad prime `{}`", rest.trim())))?;
                abrd_core::fp::check_prime(p).map_err(|e| line.err(line.col_of(rest_start), e))?;
                prime = Some(p);
            }
            "ground" => top.ground = Some(parse_ground(line, rest_start, need_p(prime, line)?)?),
            "variables" => {
                if top.variables.is_some() {
                    return Err(line.err(1, "duplicate `variables`"));
                }
                top.variables = Some(rest.split_whitespace().map(String::from).collect());
            }
            "generator" => {
                let (n, k, r, c) = parse_generator(line, rest_start)?;
                top.generators.push((i - 1, n, k, r, c));
            }
            "algebra" => {
                let p = need_p(prime, line)?;
                let (name, def) = rest
                    .split_once('=')
                    .ok_or_else(|| line.err(line.col_of(rest_start), "expected `algebra NAME = SYMBOLS`"))?;
                let name = name.trim();
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(line.err(line.col_of(rest_start), format!("bad algebra name `{name}`")));
                }
                if algebras.iter().any(|(n, _)| n == name) {
                    return Err(line.err(line.col_of(rest_start), format!("duplicate algebra `{name}`")));
                }
                let col = line.col_of(def.trim());
                let sum = parse_sum(p, line, def)?;
                if sum.is_empty() {
                    return Err(line.err(col, format!("algebra `{name}` is empty")));
                }
                algebras.push((name.to_string(), sum));
            }
            "task" => {
                if task.is_some() {
                    return Err(line.err(1, "duplicate `task`"));
                }
                let mut toks = rest.split_whitespace();
                let name = toks.next().ok_or_else(|| line.err(line.col_of(rest_start), "task needs a name"))?;
                let mut params = BTreeMap::new();
                for t in toks {
                    let (k, v) = t
                        .split_once('=')
                        .ok_or_else(|| line.err(line.col_of(rest_start), format!("expected key=value, found `{t}`")))?;
                    params.insert(k.to_string(), v.to_string());
                }
                task = Some(Task { name: name.to_string(), params });
            }
            "chain" => {
                let p = need_p(prime, line)?;
                if chain.is_some() {
                    return Err(line.err(1, "duplicate `chain`"));
                }
                let open = line;
                let mut draft = TowerDraft { ground: top.ground.clone(), ..Default::default() };
                let mut start: Option<SymbolSum> = None;
                let mut steps = Vec::new();
                let mut closed = false;
                while i < lines.len() {
                    let l = &lines[i];
                    i += 1;
                    let b = strip_comment(l.text);
                    let t = b.trim_start();
                    if t.trim().is_empty() {
                        continue;
                    }
                    let (k, r) = t.split_once(char::is_whitespace).unwrap_or((t.trim_end(), ""));
                    let rs = &b[b.len() - r.len()..];
                    match k {
                        "end" => {
                            closed = true;
                            break;
                        }
                        "variables" => draft.variables = Some(r.split_whitespace().map(String::from).collect()),
                        "generator" => {
                            let (n, kind, rhs, c) = parse_generator(l, rs)?;
                            draft.generators.push((i - 1, n, kind, rhs, c));
                        }
                        "start" => start = Some(parse_sum(p, l, r)?),
                        "step" => steps.push(parse_step(p, l, rs)?),
                        other => return Err(l.err(b.len() - t.len() + 1, format!("unknown chain field `{other}`"))),
                    }
                }
                if !closed {
                    return Err(open.err(1, "`chain` without `end`"));
                }
                if draft.variables.is_none() {
                    draft.variables = top.variables.clone();
                }
                let tower = build_tower(p, &draft, &lines, open)?;
                let start = start.ok_or_else(|| open.err(1, "chain needs `start`"))?;
                let mut c = RewriteChain::new(tower, start);
                for s in steps {
                    c = c.then(s);
                }
                chain = Some(c);
            }
            other => return Err(line.err(body.len() - trimmed.len() + 1, format!("unknown field `{other}`"))),
        }
    }
    let last = lines.last().map_or(Line { no: 1, text: "" }, |l| Line { no: l.no, text: l.text });
    let task = task.ok_or_else(|| last.err(1, "missing `task`"))?;
    let tower = match (prime, top.variables.is_some()) {
        (Some(p), true) => Some(build_tower(p, &top, &lines, &last)?),
        (None, true) => return Err(last.err(1, "`variables` without `prime`")),
        _ => None,
    };
    Ok(Scenario { prime, tower, algebras, task, chain })
}

pub fn load_scenario(path: &Path) -> anyhow::Result<Scenario> {
    let src = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    parse_scenario(&src).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}
