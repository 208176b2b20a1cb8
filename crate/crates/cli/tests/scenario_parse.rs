use abrd_cli::{parse_scenario, ScenarioError};

fn err(src: &str) -> ScenarioError {
    parse_scenario(src).expect_err("should not parse")
}

#[test]
fn minimal_task() {
    let s = parse_scenario("prime 3\ntask shift n=3 i=2\n").unwrap();
    assert_eq!(s.prime, Some(3));
    assert_eq!(s.task.name, "shift");
    assert_eq!(s.task.params["n"], "3");
    assert!(s.tower.is_none());
}

#[test]
fn comments_and_blank_lines() {
    let s = parse_scenario("# header\n\nprime 5   # trailing\n\ntask counts\n").unwrap();
    assert_eq!(s.prime, Some(5));
}

#[test]
fn algebras_and_tower() {
    let src = "prime 3\nground char_p\nvariables a1 a2 a3\nalgebra A = [a3^-1, a1) + [a1^-1, a2)\ntask division algebra=A\n";
    let s = parse_scenario(src).unwrap();
    assert_eq!(s.tower.as_ref().unwrap().variables.len(), 3);
    assert_eq!(s.algebra("A").unwrap().terms().len(), 2);
    assert!(s.algebra("B").is_none());
}

#[test]
fn missing_task() {
    let e = err("prime 3\n");
    assert!(e.msg.contains("task"), "{e}");
}

#[test]
fn unknown_field_points_at_keyword() {
    let e = err("prime 3\n  frobnicate 1\ntask counts\n");
    assert_eq!((e.line, e.col), (2, 3));
}

#[test]
fn bad_symbol_column() {
    // reported where the `)` is missing
    let e = err("prime 3\nvariables a b\nalgebra A = [a, b\ntask division\n");
    assert_eq!(e.line, 3);
    assert_eq!(e.col, 18, "{e}");
}

#[test]
fn prime_must_be_prime() {
    let e = err("prime 4\ntask counts\n");
    assert_eq!(e.line, 1);
}

#[test]
fn prime_before_algebra() {
    let e = err("algebra A = [a, b)\nprime 3\ntask counts\n");
    assert_eq!(e.line, 1);
}

#[test]
fn unknown_rule_in_chain() {
    let src = "prime 3\nvariables d c\nchain\n  start [d, c)\n  step TELEPORT -> 0\nend\ntask chain-check\n";
    let e = err(src);
    assert_eq!(e.line, 5);
    assert!(e.msg.contains("TELEPORT"));
}

#[test]
fn unterminated_chain() {
    let e = err("prime 3\nvariables d c\nchain\n  start [d, c)\ntask chain-check\n");
    assert!(e.msg.contains("end") || e.msg.contains("unknown chain field"), "{e}");
}

#[test]
fn generator_needs_rhs() {
    let e = err("prime 3\nvariables d c\ngenerator w root\ntask counts\n");
    assert_eq!(e.line, 3);
}

#[test]
fn closed_ground() {
    let s = parse_scenario("prime 3\nground closed 0\nvariables a b\ntask counts\n").unwrap();
    assert!(s.tower.unwrap().ground.algebraically_closed);
}
