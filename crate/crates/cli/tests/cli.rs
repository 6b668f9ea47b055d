use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};
use tempfile::TempDir;

fn spec(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name)
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn icsi(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_icsi")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Writes an edited copy of a bundled spec into `dir`.
fn variant(dir: &TempDir, name: &str, edit: impl FnOnce(&mut Value)) -> PathBuf {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(spec(name)).unwrap()).unwrap();
    edit(&mut v);
    let path = dir.path().join(format!("edited_{name}"));
    std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    path
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| {
        assert!(!l.ends_with(','), "trailing delimiter in {l:?}");
        l.split(',').map(str::to_string).collect()
    });
    (header, rows.collect())
}

fn bit_source_with_entropy(h: f64) -> Value {
    let p = icsi::fixtures::bernoulli_with_entropy(h).unwrap();
    json!([[1.0 - p, 0.0], [0.0, p]])
}

#[test]
fn info_reports_xor_channel_conditions() {
    let r = icsi(&["info", p(&spec("xor_corollary2.json"))]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("channel: Z-IC"));
    assert!(r.stdout.contains("condition1: true"));
    assert!(r.stdout.contains("tau: 1.0000000"));
    assert!(r.stdout.contains("H(U2)      = 0.8000000"));
}

#[test]
fn info_unary_entropies_are_zero() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("info.csv");
    let r = icsi(&["info", p(&spec("unary.json")), "--csv", p(&csv)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (header, rows) = read_csv(&csv);
    assert_eq!(header, ["quantity", "value"]);
    let entropies: Vec<_> = rows.iter().filter(|r| r[0].starts_with("H(")).collect();
    assert_eq!(entropies.len(), 6);
    assert!(entropies.iter().all(|r| r[1].parse::<f64>().unwrap() == 0.0), "{entropies:?}");
}

#[test]
fn malformed_row_is_named() {
    let dir = TempDir::new().unwrap();
    let bad = variant(&dir, "xor_corollary2.json", |v| {
        v["channel"]["p_y1_given_x1"]["rows"][1] = json!([0.0, 0.9]);
    });
    let r = icsi(&["info", p(&bad)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("channel.p_y1_given_x1.rows[1]"), "{}", r.stderr);
    assert!(r.stderr.contains("0.9"), "{}", r.stderr);
}

#[test]
fn unknown_alphabet_and_missing_file_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = variant(&dir, "xor_corollary2.json", |v| {
        v["sources"][0]["u"] = json!("NOPE");
    });
    let r = icsi(&["info", p(&bad)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("NOPE"), "{}", r.stderr);
    assert_eq!(icsi(&["info", p(&dir.path().join("absent.json"))]).code, 2);
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(icsi(&["check", p(&garbage), "--theorem", "c2"]).code, 2);
}

#[test]
fn check_xor_zero_margin_is_infeasible() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("m.csv");
    let r = icsi(&["check", p(&spec("xor_corollary2.json")), "--theorem", "c2", "--eps", "1e-9", "--csv", p(&csv)]);
    assert_eq!(r.code, 1, "{}", r.stderr);
    assert!(r.stdout.contains("binding: H(U1) < I(X1;Y1)"));
    let (header, rows) = read_csv(&csv);
    assert_eq!(header, ["condition", "margin"]);
    let m: Vec<f64> = rows.iter().map(|r| r.last().unwrap().parse().unwrap()).collect();
    for (got, want) in m.iter().zip([0.0, 0.2, 0.2]) {
        assert!((got - want).abs() < 1e-9, "{m:?}");
    }
}

#[test]
fn check_xor_partial_entropy_is_feasible() {
    let dir = TempDir::new().unwrap();
    let f = variant(&dir, "xor_corollary2.json", |v| {
        v["sources"][0]["p_uv"] = bit_source_with_entropy(0.9);
    });
    let r = icsi(&["check", p(&f), "--theorem", "c2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("min margin: 0.1000000"), "{}", r.stdout);
}

#[test]
fn check_theorem1_with_full_side_information() {
    let dir = TempDir::new().unwrap();
    let f = variant(&dir, "orthogonal_separation.json", |v| {
        for k in 0..2 {
            v["sources"][k]["p_uv"] = json!([[0.5, 0.0], [0.0, 0.5]]);
        }
    });
    let r = icsi(&["check", p(&f), "--theorem", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("min margin: 1.0000000"), "{}", r.stdout);
    // Without side information the margin drops to 1 - H(U|V).
    let r = icsi(&["check", p(&spec("orthogonal_separation.json")), "--theorem", "1"]);
    assert!(r.stdout.contains("min margin: 0.5310044"), "{}", r.stdout);
}

#[test]
fn check_without_scheme_exits_2() {
    let r = icsi(&["check", p(&spec("orthogonal_separation.json")), "--theorem", "2"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("aux"), "{}", r.stderr);
}

/// Vertices of `{x >= 0 : A x <= b}` in three dimensions by solving every
/// triple of tight constraints.
fn brute_vertices(rows: &[([f64; 3], f64)]) -> Vec<[f64; 3]> {
    let mut all: Vec<([f64; 3], f64)> = rows.to_vec();
    for i in 0..3 {
        let mut a = [0.0; 3];
        a[i] = -1.0;
        all.push((a, 0.0));
    }
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let mut out: Vec<[f64; 3]> = Vec::new();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            for k in j + 1..all.len() {
                let m = [all[i].0, all[j].0, all[k].0];
                let d = det(m);
                if d.abs() < 1e-12 {
                    continue;
                }
                let b = [all[i].1, all[j].1, all[k].1];
                let mut x = [0.0; 3];
                for c in 0..3 {
                    let mut mc = m;
                    for r in 0..3 {
                        mc[r][c] = b[r];
                    }
                    x[c] = det(mc) / d;
                }
                let ok = all.iter().all(|(a, bb)| a.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= bb + 1e-9);
                if ok && !out.iter().any(|y| y.iter().zip(&x).all(|(p, q)| (p - q).abs() < 1e-9)) {
                    out.push(x);
                }
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

#[test]
fn lemma2_vertices_match_brute_force() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("v.csv");
    let r = icsi(&["region", p(&spec("xor_corollary2.json")), "--region", "lemma2", "--out", p(&csv)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (header, rows) = read_csv(&csv);
    assert_eq!(header, ["R1s", "R1p", "R2p"]);
    let got: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|x| x.parse().unwrap()).collect()).collect();
    let want = brute_vertices(&[([1.0, 1.0, 0.0], 1.0), ([0.0, 0.0, 1.0], 1.0), ([0.0, 1.0, 1.0], 1.0)]);
    assert_eq!(got.len(), want.len(), "{got:?}");
    for (g, w) in got.iter().zip(&want) {
        assert!(g.iter().zip(w).all(|(a, b)| (a - b).abs() < 1e-9), "{got:?} vs {want:?}");
    }
}

#[test]
fn zero_region_is_the_origin() {
    let dir = TempDir::new().unwrap();
    let f = variant(&dir, "xor_corollary2.json", |v| {
        for a in v["alphabets"].as_array_mut().unwrap() {
            if a["name"] == "Y1" || a["name"] == "Y2" {
                *a = json!({ "name": a["name"], "size": 1 });
            }
        }
        v["channel"]["p_y1_given_x1"]["rows"] = json!([[1.0], [1.0]]);
        v["channel"]["p_y2_given_x1x2"]["rows"] = json!([[1.0], [1.0], [1.0], [1.0]]);
    });
    let csv = dir.path().join("v.csv");
    let r = icsi(&["region", p(&f), "--region", "lemma2", "--out", p(&csv)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), "R1s,R1p,R2p\n0,0,0\n");
}

#[test]
fn unknown_region_exits_2() {
    assert_eq!(icsi(&["region", p(&spec("xor_corollary2.json")), "--region", "hk"]).code, 2);
}

#[test]
fn searched_scheme_reloads_to_identical_margins() {
    let dir = TempDir::new().unwrap();
    let (best, a, b) = (dir.path().join("best.json"), dir.path().join("a.csv"), dir.path().join("b.csv"));
    let r = icsi(&[
        "search",
        p(&spec("xor_feasible.json")),
        "--seed",
        "3",
        "--out",
        p(&best),
        "--csv",
        p(&a),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = icsi(&["check", p(&best), "--theorem", "2", "--csv", p(&b)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let (_, rows) = read_csv(&a);
    let min = rows.iter().map(|r| r.last().unwrap().parse::<f64>().unwrap()).fold(f64::INFINITY, f64::min);
    assert!(min >= 0.15, "{min}");
}

#[test]
fn search_exit_codes_follow_feasibility() {
    let dir = TempDir::new().unwrap();
    let constant = variant(&dir, "xor_infeasible.json", |v| {
        for k in 0..2 {
            v["sources"][k]["p_uv"] = json!([[1.0], [0.0]]);
        }
    });
    let r = icsi(&["search", p(&constant), "--restarts", "1", "--iterations", "20"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = icsi(&["search", p(&spec("xor_infeasible.json")), "--target", "c1", "--seed", "1", "--iterations", "200"]);
    assert_eq!(r.code, 1, "{}", r.stderr);
}

#[test]
fn noiseless_simulation_is_error_free() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("sim.csv");
    let r = icsi(&["simulate", p(&spec("noiseless_copy.json")), "--out", p(&csv)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(
        std::fs::read_to_string(&csv).unwrap(),
        "n,trials,errors_rx1,errors_rx2,p_err,ci_halfwidth\n8,1000,0,0,0,0\n"
    );
}

#[test]
fn infeasible_simulation_errs() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("sim.csv");
    let r = icsi(&["simulate", p(&spec("xor_infeasible.json")), "--trials", "100", "--out", p(&csv)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (_, rows) = read_csv(&csv);
    assert_eq!(rows.len(), 1);
    assert!(rows[0][4].parse::<f64>().unwrap() >= 0.3, "{rows:?}");
}

#[test]
fn simulate_accepts_several_blocklengths() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("sim.csv");
    let r = icsi(&["simulate", p(&spec("slepian_wolf.json")), "--n", "20,40", "--trials", "50", "--csv", p(&csv)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (_, rows) = read_csv(&csv);
    assert_eq!(rows.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(), ["20", "40"]);
}

#[test]
fn fm_verify_exit_codes() {
    assert_eq!(icsi(&["fm-verify", p(&spec("unary.json")), "--instantiations", "1"]).code, 0);
    let r = icsi(&["fm-verify", p(&spec("unary.json")), "--instantiations", "1", "--corrupt", "0.5"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("0/1 instances agree"));
    let r = icsi(&["fm-verify", p(&spec("xor_corollary2.json")), "--instantiations", "100"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
}
