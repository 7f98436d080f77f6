use std::path::PathBuf;
use std::process::{Command, Output};

fn pso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pso")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn golden_json_files() {
    for (args, file) in [
        (&["--json", "check", "D - x"][..], "check_generator.json"),
        (&["--json", "lclm", "D + t", "D + 2*t"][..], "lclm_example.json"),
        (&["--json", "classify", "--upto", "4"][..], "classify_upto4.json"),
    ] {
        let out = pso(args);
        assert!(out.status.success());
        assert_eq!(stdout(&out), golden(file), "{file}");
    }
}

#[test]
fn text_outputs() {
    let out = pso(&["check", "D - x"]);
    assert_eq!(stdout(&out), "member: true\nresidual: 0\ncofactor: 1\nremainder: 0\n");
    assert_eq!(stdout(&pso(&["lclm", "D + t", "D + 2*t"])), "t*D^2 + (3*t^2 - 1)*D + 2*t^3\n");
    assert_eq!(stdout(&pso(&["mul", "D - x", "x + D"])), "D^2 - x^2 + 1\n");
    assert_eq!(stdout(&pso(&["hermite", "3"])), "x^3 - 3*x\n");
    assert_eq!(stdout(&pso(&["fourier", "D - x"])), "i*D + i*t\n");
    assert_eq!(stdout(&pso(&["check", "-x + D"])), stdout(&pso(&["check", "D - x"])));
    let classify = stdout(&pso(&["classify", "--upto", "4"]));
    let verdicts: Vec<&str> = classify.lines().skip(1).map(|l| l.split_whitespace().nth(1).unwrap()).collect();
    assert_eq!(verdicts, ["true", "true", "true", "false"]);
}

#[test]
fn exit_codes_and_error_lines() {
    let ok = pso(&["check", "x*D"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).starts_with("member: false"));

    let non_member = pso(&["basis", "x"]);
    assert_eq!(non_member.status.code(), Some(2));
    let err = String::from_utf8(non_member.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(&err).unwrap();
    assert_eq!(v["error"], "math");

    let parse = pso(&["check", "D +"]);
    assert_eq!(parse.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&parse.stderr).unwrap();
    assert_eq!((v["error"].as_str(), v["line"].as_u64(), v["column"].as_u64()), (Some("parse"), Some(1), Some(4)));

    assert_eq!(pso(&["check", "t + D"]).status.code(), Some(1));
    assert_eq!(pso(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(pso(&["mixture", "--sigma2", "1,1"]).status.code(), Some(1));
    assert_eq!(pso(&["--help"]).status.code(), Some(0));
}

#[test]
fn random_is_deterministic() {
    let a = pso(&["--json", "random", "--seed", "42", "--member"]);
    let b = pso(&["--json", "random", "--seed", "42", "--member"]);
    assert_eq!(a.stdout, b.stdout);
    let op: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let text = op["text"].as_str().unwrap().to_string();
    assert!(stdout(&pso(&["check", &text])).starts_with("member: true"));
}

#[test]
fn verify_and_mixture_reports() {
    let v: serde_json::Value =
        serde_json::from_slice(&pso(&["--json", "verify", "D - x", "--dist", "gaussian(mu=1,sigma2=1)"]).stdout).unwrap();
    assert_eq!(v["pass"], false);
    assert!(v["max"].as_f64().unwrap() >= 0.5);

    let m: serde_json::Value =
        serde_json::from_slice(&pso(&["--json", "mixture", "--sigma2", "1,2", "--weights", "3/10,7/10"]).stdout).unwrap();
    assert_eq!(m["text"], "2*D^3 - 3*x*D^2 + x^2*D - x");
    assert_eq!(m["report"]["exact_polynomials_zero"], true);
    assert_eq!(m["report"]["suite_pass"], true);

    let i: serde_json::Value = serde_json::from_slice(&pso(&["--json", "intersect", "--with", "semicircle"]).stdout).unwrap();
    assert_eq!(i["member"], true);
    for r in i["reports"].as_array().unwrap() {
        assert_eq!(r["exact_polynomials_zero"], true);
        assert_eq!(r["suite_pass"], true);
    }
}

#[test]
fn precision_environment_variable_sets_nodes() {
    let out = Command::new(env!("CARGO_BIN_EXE_pso"))
        .args(["--json", "verify", "D - x"])
        .env("PSO_PRECISION", "16")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["nodes"], 16);
    let flag: serde_json::Value =
        serde_json::from_slice(&pso(&["--json", "verify", "D - x", "--nodes", "32"]).stdout).unwrap();
    assert_eq!(flag["nodes"], 32);
    assert_eq!(pso(&["verify", "D - x", "--nodes", "4"]).status.code(), Some(1));
}

#[test]
fn families() {
    assert_eq!(stdout(&pso(&["family", "rodriguez", "--params", "m=3"])), "D^3 + 3*D - x^3\n");
    assert_eq!(stdout(&pso(&["family", "xpow", "--params", "n=2"])), "x^2*D - x^3 + 2*x\n");
    assert_eq!(stdout(&pso(&["family", "basis", "--params", "k=0,t=1"])), "D - x\n");
    assert_eq!(pso(&["family", "s"]).status.code(), Some(1));
}
