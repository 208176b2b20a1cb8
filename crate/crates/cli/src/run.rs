use std::path::PathBuf;
use std::time::Instant;

use abrd_core::brauer::ChainVerdict;
use abrd_core::theorems::{self, Example73Scenario, Outcome, Prop71Toggle, Verdict};
use abrd_core::valdiv::{chain_division, CertStatus};
use clap::{Parser, Subcommand, ValueEnum};

use crate::report::{emit_report, Format, Report};
use crate::scenario::{load_scenario, Scenario};

pub const DEFAULT_MAX_WORK: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    Shift,
    ValueGroups,
    NoCommonSplitting,
    Counts,
    CharNotP,
    Prop71,
    Lemma72,
    Example73,
    ChainCheck,
    CustomScenario,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Toggle {
    Division,
    Split,
}

#[derive(Debug, Parser)]
#[command(name = "verify", version, about = "Exact verifiers for symbol algebras over iterated Laurent series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub p: Option<u32>,
    #[arg(long, global = true)]
    pub i: Option<usize>,
    #[arg(long, global = true)]
    pub part: Option<u8>,
    /// Residue hypothesis for prop71; both directions when absent.
    #[arg(long, global = true, value_enum)]
    pub toggle: Option<Toggle>,
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_WORK)]
    pub max_work: u128,
    /// Include wall-clock timing in the report.
    #[arg(long, global = true)]
    pub timing: bool,
}

/// A verifier invocation with all inputs resolved.
#[derive(Clone, Debug, Default)]
pub struct Request {
    pub task: String,
    pub n: Option<usize>,
    pub p: Option<u32>,
    pub i: Option<usize>,
    pub part: Option<u8>,
    pub toggle: Option<Prop71Toggle>,
    pub algebra: Option<String>,
    pub scenario: Option<Scenario>,
    pub max_work: u128,
}

fn need<T: Copy>(x: Option<T>, flag: &str, task: &str) -> anyhow::Result<T> {
    x.ok_or_else(|| anyhow::anyhow!("{task} needs --{flag}"))
}

fn check_work(work: u128, max: u128) -> anyhow::Result<()> {
    if work > max {
        anyhow::bail!("work {work} exceeds --max-work {max}");
    }
    Ok(())
}

fn pow(p: u32, e: usize) -> u128 {
    (p as u128).checked_pow(e as u32).unwrap_or(u128::MAX)
}

fn example73_from(s: &Scenario, part: u8, p: u32) -> anyhow::Result<Example73Scenario> {
    let mut base = theorems::example73_scenario(part, p)?;
    if let Some(t) = &s.tower {
        base.tower = t.clone();
    }
    let one = |name: &str| -> anyhow::Result<Option<abrd_core::SymbolTerm>> {
        match s.algebra(name) {
            None => Ok(None),
            Some(a) => match a.terms() {
                [(1, t)] => Ok(Some(t.clone())),
                _ => anyhow::bail!("algebra {name} must be a single symbol"),
            },
        }
    };
    if let Some(a) = one("A")? {
        base.a = a;
    }
    if let Some(b) = one("B")? {
        base.b = b;
    }
    if let Some(c) = one("C")? {
        base.c = c;
    }
    if let Some(ch) = &s.chain {
        base.split_chain = ch.clone();
    }
    Ok(base)
}

fn chain_check(s: &Scenario) -> anyhow::Result<Verdict> {
    let chain = s.chain.as_ref().ok_or_else(|| anyhow::anyhow!("chain-check needs a `chain` block"))?;
    let mut v = Verdict::new("chain-check").param("p", chain.tower.prime);
    v.put("tower", chain.tower.to_string());
    v.put("start", chain.start.to_string());
    v.put("end", chain.end().to_string());
    v.put("steps", chain.steps.len());
    v.put("proves_split", chain.proves_split());
    for (k, st) in chain.steps.iter().enumerate() {
        v.info(st.rule.name(), format!("step {}: -> {}", k + 1, st.after));
    }
    let verdict = chain.check();
    let ok = verdict.is_verified();
    v.step("kernel", format!("{verdict:?}"), ok);
    Ok(v.finish(match verdict {
        ChainVerdict::Verified => Outcome::Verified,
        ChainVerdict::Rejected { .. } => Outcome::Refuted,
    }))
}

fn division(s: &Scenario, name: &str) -> anyhow::Result<Verdict> {
    let tower = s.tower.as_ref().ok_or_else(|| anyhow::anyhow!("division needs `variables`"))?;
    let a = s.algebra(name).ok_or_else(|| anyhow::anyhow!("no algebra named {name}"))?;
    let mut v = Verdict::new("division").param("algebra", name).param("p", tower.prime);
    v.put("symbols", a.to_string());
    v.put("tower", tower.to_string());
    let cert = chain_division(tower, a);
    if let Some((peel, depth, index, res)) = cert.top_peel() {
        v.put("top", format!("{peel:?} peel at depth {depth}: |Γ_D/Γ_F| = {index}, [D̄:F̄] = {res}"));
    }
    v.step("chain_division", format!("{:?} by {:?}", cert.status, cert.rule), cert.is_certified());
    let outcome = match cert.status {
        CertStatus::Certified => Outcome::Verified,
        CertStatus::Refuted => Outcome::Refuted,
        CertStatus::NotCertified => Outcome::Inconclusive,
    };
    v.certificates.push(cert);
    Ok(v.finish(outcome))
}

/// Runs one verifier. Errors are input errors (exit 3).
pub fn run_request(r: &Request) -> anyhow::Result<Verdict> {
    let t = r.task.as_str();
    let v = match t {
        "shift" => {
            let n = need(r.n, "n", t)?;
            theorems::verify_shift_lemma(n, need(r.p, "p", t)?, need(r.i, "i", t)?)?
        }
        "value-groups" => theorems::verify_value_groups(need(r.n, "n", t)?, need(r.p, "p", t)?)?,
        "no-common-splitting" => {
            let (n, p) = (need(r.n, "n", t)?, need(r.p, "p", t)?);
            check_work(pow(p, 2 * n.saturating_sub(1)), r.max_work)?;
            theorems::verify_no_common_splitting(n, p)?
        }
        "counts" => {
            let ns: Vec<usize> = r.n.map_or_else(|| (2..=6).collect(), |n| vec![n]);
            let ps: Vec<u32> = r.p.map_or_else(|| vec![2, 3, 5, 7], |p| vec![p]);
            theorems::verify_count_identities(&ns, &ps)?
        }
        "char-not-p" => {
            let (n, p) = (need(r.n, "n", t)?, need(r.p, "p", t)?);
            check_work(pow(p, n * n.saturating_sub(2)), r.max_work)?;
            theorems::verify_char_not_p(n, p)?
        }
        "prop71" => theorems::verify_prop71(need(r.part, "part", t)?, need(r.p, "p", t)?, r.toggle)?,
        "lemma72" => theorems::verify_lemma72(need(r.part, "part", t)?, need(r.p, "p", t)?)?,
        "example73" => {
            let (part, p) = (need(r.part, "part", t)?, need(r.p, "p", t)?);
            match &r.scenario {
                Some(s) => theorems::verify_example73_with(&example73_from(s, part, p)?)?,
                None => theorems::verify_example73(part, p)?,
            }
        }
        "chain-check" => chain_check(r.scenario.as_ref().ok_or_else(|| anyhow::anyhow!("chain-check needs --scenario"))?)?,
        "division" => {
            let s = r.scenario.as_ref().ok_or_else(|| anyhow::anyhow!("division needs a scenario"))?;
            division(s, r.algebra.as_deref().unwrap_or("A"))?
        }
        other => anyhow::bail!("unknown task `{other}`"),
    };
    Ok(v)
}

fn parse_param<T: std::str::FromStr>(s: &Scenario, key: &str) -> anyhow::Result<Option<T>> {
    s.task
        .params
        .get(key)
        .map(|v| v.parse::<T>().map_err(|_| anyhow::anyhow!("bad value `{v}` for {key}")))
        .transpose()
}

/// Resolves a scenario's `task` line into a request.
pub fn request_from_scenario(s: Scenario, max_work: u128) -> anyhow::Result<Request> {
    const KEYS: [&str; 6] = ["n", "i", "part", "toggle", "algebra", "p"];
    if let Some(k) = s.task.params.keys().find(|k| !KEYS.contains(&k.as_str())) {
        anyhow::bail!("unknown task parameter `{k}`");
    }
    let toggle = match s.task.params.get("toggle").map(String::as_str) {
        None => None,
        Some("division") => Some(Prop71Toggle::Division),
        Some("split") => Some(Prop71Toggle::Split),
        Some(x) => anyhow::bail!("bad toggle `{x}`"),
    };
    let p = match (parse_param::<u32>(&s, "p")?, s.prime) {
        (Some(a), Some(b)) if a != b => anyhow::bail!("task p={a} disagrees with prime {b}"),
        (a, b) => a.or(b),
    };
    Ok(Request {
        task: s.task.name.clone(),
        n: parse_param(&s, "n")?,
        p,
        i: parse_param(&s, "i")?,
        part: parse_param(&s, "part")?,
        toggle,
        algebra: s.task.params.get("algebra").cloned(),
        max_work,
        scenario: Some(s),
    })
}

fn command_name(c: Command) -> &'static str {
    match c {
        Command::Shift => "shift",
        Command::ValueGroups => "value-groups",
        Command::NoCommonSplitting => "no-common-splitting",
        Command::Counts => "counts",
        Command::CharNotP => "char-not-p",
        Command::Prop71 => "prop71",
        Command::Lemma72 => "lemma72",
        Command::Example73 => "example73",
        Command::ChainCheck => "chain-check",
        Command::CustomScenario => "custom-scenario",
    }
}

pub fn request_from_cli(cli: &Cli) -> anyhow::Result<Request> {
    let scenario = cli.scenario.as_deref().map(load_scenario).transpose()?;
    if cli.command == Command::CustomScenario {
        let s = scenario.ok_or_else(|| anyhow::anyhow!("custom-scenario needs --scenario"))?;
        return request_from_scenario(s, cli.max_work);
    }
    Ok(Request {
        task: command_name(cli.command).to_string(),
        n: cli.n,
        p: cli.p,
        i: cli.i,
        part: cli.part,
        toggle: cli.toggle.map(|t| match t {
            Toggle::Division => Prop71Toggle::Division,
            Toggle::Split => Prop71Toggle::Split,
        }),
        algebra: None,
        scenario,
        max_work: cli.max_work,
    })
}

/// Runs the request on a pool of `jobs` workers (the global pool when `None`).
pub fn execute(req: &Request, jobs: Option<usize>, timing: bool) -> anyhow::Result<Report> {
    let start = Instant::now();
    let verdict = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()?
            .install(|| run_request(req))?,
        None => run_request(req)?,
    };
    Ok(Report::from_verdict(verdict, timing.then(|| start.elapsed().as_millis())))
}

/// Full command-line behaviour; returns the process exit code.
pub fn run_cli(args: impl IntoIterator<Item = std::ffi::OsString>, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let sink: &mut dyn std::io::Write = if code == 0 { stdout } else { stderr };
            let _ = write!(sink, "{e}");
            return code;
        }
    };
    let result = request_from_cli(&cli).and_then(|r| execute(&r, cli.jobs, cli.timing));
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            return 3;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::File::create(path).and_then(|mut f| emit_report(&report, cli.format, &mut f)),
        None => emit_report(&report, cli.format, stdout),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write report: {e}");
        return 3;
    }
    report.exit_code
}
