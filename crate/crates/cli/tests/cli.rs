use std::process::{Command, Output};

use pcompletion::abelian::TameGroup;
use pcompletion::unstable::FormalSpace;

fn pcomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcomp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value_after<'a>(out: &'a str, prefix: &str) -> &'a str {
    out.lines()
        .find_map(|l| l.strip_prefix(prefix))
        .unwrap_or_else(|| panic!("no line starting with {prefix:?} in\n{out}"))
}

#[test]
fn li_of_prufer() {
    let o = pcomp(&["li", "--prime", "2", "Prufer(2)"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(value_after(&out, "L0 = "), "0");
    assert_eq!(value_after(&out, "L1 = "), "Zp(2)");
    assert!(out.contains("provenance: "));
}

#[test]
fn em_of_prufer() {
    let o = pcomp(&["em", "--prime", "2", "K(Prufer(2),3)"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let c: FormalSpace = value_after(&out, "completion = ").parse().unwrap();
    assert_eq!(c, "K(Zp(2), 4)".parse().unwrap());
    // both ends are printed even when the middle is determined
    assert!(out.contains("degree 4: 0 -> 0 -> Zp(2) -> Zp(2) -> 0"), "{out}");
}

#[test]
fn multiplication_by_three_is_a_two_equivalence() {
    let o = pcomp(&["peq", "--prime", "2", "--map", "3: Z -> Z"]);
    assert!(o.status.success());
    assert_eq!(value_after(&stdout(&o), "p-equivalence: "), "true");
    let o = pcomp(&["peq", "--prime", "3", "--map", "3: Z -> Z"]);
    assert_eq!(value_after(&stdout(&o), "p-equivalence: "), "false");
}

#[test]
fn group_output_reparses() {
    let o = pcomp(&["li", "--prime", "3", "Z/18 + Prufer(3)^2 + Z[1/2] + Q + Zp(3)"]);
    let out = stdout(&o);
    for key in ["L0 = ", "L1 = "] {
        let g: TameGroup = value_after(&out, key).parse().unwrap();
        assert_eq!(g.to_string(), value_after(&out, key));
    }
    assert_eq!(value_after(&out, "L0 = "), "Z/9 + Zp(3)^2");
}

#[test]
fn engines_agree_and_report_provenance() {
    let o = pcomp(&[
        "complete",
        "--engine",
        "all",
        "degrees 0..1; rank 0 = 2; rank 1 = 1; d 1 = [4; 6];",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.matches("provenance: ").count(), 2);
    assert!(out.contains("engines agree: true"), "{out}");
    assert!(out.contains("pi_0 = Z/2 + Zp(2)"), "{out}");
}

#[test]
fn json_lines() {
    let o = pcomp(&["--format", "json", "li", "Prufer(2)"]);
    for line in stdout(&o).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.get("kind").is_some());
    }
}

#[test]
fn input_file() {
    let dir = std::env::temp_dir().join(format!("pcomp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("f.txt");
    std::fs::write(
        &path,
        "elements a b\nleq a b\nsection a = 0: Z/2\nsection b = 0: Z/4 + Prufer(2)\nrestrict b a 0: 0->0\n",
    )
    .unwrap();
    let o = pcomp(&["presheaf", "--input", path.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("section b = 0: Z/4; 1: Zp(2)"), "{out}");
    assert!(out.contains("L1 sectionwise: pass"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    let parse = pcomp(&["li", "Z/"]);
    assert_eq!(parse.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&parse.stderr).contains("position 2"));
    let not_complex = pcomp(&[
        "complete",
        "degrees 0..2; rank 0 = 1; rank 1 = 1; rank 2 = 1; d 1 = [1]; d 2 = [1];",
    ]);
    assert_eq!(not_complex.status.code(), Some(2));
    // three stages cannot certify a Z_p pattern
    let budget = pcomp(&[
        "complete",
        "--engine",
        "tower",
        "--stages",
        "3",
        "degrees 0..0; rank 0 = 1;",
    ]);
    assert_eq!(budget.status.code(), Some(3));
    assert_eq!(pcomp(&["li", "--prime", "4", "Z"]).status.code(), Some(2));
    let help = stdout(&pcomp(&["--help"]));
    for code in ["0 ", "1 ", "2 ", "3 ", "4 "] {
        assert!(help.contains(&format!("  {code}")), "{help}");
    }
}

#[test]
fn postnikov_check_passes() {
    let o = pcomp(&[
        "postnikov-check",
        "--prime",
        "3",
        "K(Z/9 + Prufer(3), 2) x K(Q, 4) x K(Z, 5)",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("postnikov limit: pass"));
}

#[test]
fn suite_selection_and_listing() {
    let list = stdout(&pcomp(&["suite", "--list"]));
    assert_eq!(list.lines().count(), 9);
    let o = pcomp(&["suite", "--seed", "7", "--check", "prufer-shift"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("PASS prufer-shift"));
    assert_eq!(pcomp(&["suite", "--check", "nope"]).status.code(), Some(2));
}
