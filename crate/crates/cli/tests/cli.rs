use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relcoulomb")).args(args).output().expect("binary runs")
}

fn json_of(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn spectrum_csv_has_stable_header_and_exact_levels() {
    let out = run(&["spectrum", "--alpha", "0.3", "--dim", "3", "--n-max", "4", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["n", "l", "n_r", "n_eff", "e_exact", "e_pert2", "e_pert4", "defect"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 10);
    let ground: f64 = rows[0][4].parse().unwrap();
    assert!((ground - 0.9f64.sqrt()).abs() < 1e-15);
    let second: f64 = rows[1][4].parse().unwrap();
    assert!((second - 1.9 / 3.7f64.sqrt()).abs() < 1e-15);
}

#[test]
fn green_json_round_trips_with_three_routes() {
    let doc = json_of(&[
        "green", "--alpha", "0.1", "--dim", "3", "--l", "0", "--energy", "0.5", "--rb", "2", "--ra", "1", "--route", "all",
    ]);
    assert_eq!(doc["meta"]["command"], "green");
    assert_eq!(doc["meta"]["config"]["common"]["seed"], 42);
    let rows = doc["results"].as_array().unwrap();
    let routes: Vec<&str> = rows.iter().map(|r| r["route"].as_str().unwrap()).collect();
    assert_eq!(routes, ["closed", "integral", "series"]);
    let closed = num(&rows[0]["value"]);
    for r in &rows[1..] {
        assert!((num(&r["value"]) - closed).abs() < 1e-8 * closed);
        assert!(num(&r["err_est"]) >= 0.0);
    }
    assert_eq!(rows[2]["terms_used"], 25);
    // Shortest round-trip decimals: re-serializing gives the same text.
    let text = serde_json::to_string(&doc).unwrap();
    let again: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(again, doc);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = run(&["verify", "--samples", "5", "--seed", "7", "-o", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let other = dir.path().join("c.json");
    run(&["verify", "--samples", "5", "--seed", "8", "-o", other.to_str().unwrap()]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&other).unwrap());
}

#[test]
fn verify_reports_every_identity() {
    let doc = json_of(&["verify", "--suite", "all", "--samples", "10", "--seed", "7"]);
    let rows = doc["results"].as_array().unwrap();
    assert_eq!(rows.len(), 7 + 20);
    for r in rows {
        assert_eq!(r["passed"], true, "{r}");
    }
    let first = &rows[0];
    assert_eq!(first["check"], "PseudotimeKernel");
    assert!(first["worst_sample"]["params"]["kappa"].is_number());
}

#[test]
fn wavefunction_tables() {
    let doc = json_of(&["bound-wf", "--alpha", "0.3", "--dim", "3", "--n", "3", "--l", "0", "--points", "400"]);
    assert!((num(&doc["summary"]["norm"]) - 1.0).abs() < 1e-6);
    let vals: Vec<f64> = doc["results"].as_array().unwrap().iter().map(|r| num(&r["radial"])).collect();
    let nodes = vals.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
    assert_eq!(nodes, 2);

    let doc = json_of(&["continuum-wf", "--alpha", "0.1", "--dim", "3", "--k", "1.5", "--l", "0", "--points", "10"]);
    for r in doc["results"].as_array().unwrap() {
        let m = num(&r["re"]).hypot(num(&r["im"]));
        assert!((m - num(&r["modulus"])).abs() <= 1e-14 * m.max(1.0));
    }
}

#[test]
fn residues_series_and_disc() {
    let doc = json_of(&["residues", "--alpha", "0.3", "--dim", "3", "--n", "1", "--l", "0"]);
    assert_eq!(doc["results"].as_array().unwrap().len(), 16);
    assert!(num(&doc["summary"]["rank1_max_rel"]) < 1e-6);

    let doc = json_of(&["series", "--alpha", "0.1", "--dim", "3", "--l", "0", "--energy", "0.5", "--rb", "2", "--ra", "1"]);
    assert!(num(&doc["summary"]["rel_diff_closed"]) < 1e-6);
    assert_eq!(doc["results"].as_array().unwrap().len(), 25);

    let doc = json_of(&["disc", "--alpha", "0.1", "--dim", "3", "--l", "0", "--energy", "1.2", "--rb", "2", "--ra", "1"]);
    let row = &doc["results"][0];
    assert!((num(&row["route_a_im"]) - 2.0182626632).abs() < 1e-9);
    assert!(num(&row["rel_diff_sign_flipped"]) < 1e-8);
}

#[test]
fn si_units_scale_energy_and_length_columns() {
    let nat = json_of(&["green", "--alpha", "0.1", "--dim", "3", "--l", "0", "--energy", "0.5", "--rb", "2", "--ra", "1"]);
    let si = json_of(&[
        "green", "--alpha", "0.1", "--dim", "3", "--l", "0", "--energy", "0.5", "--rb", "2", "--ra", "1", "--units", "si",
    ]);
    let (n, s) = (&nat["results"][0], &si["results"][0]);
    assert!((num(&s["energy"]) / num(&n["energy"]) - 8.1871057769e-14).abs() < 1e-26);
    assert!((num(&s["r_b"]) / num(&n["r_b"]) - 3.8615926796e-13).abs() < 1e-25);
    assert_eq!(s["value"], n["value"]);
}

#[test]
fn exit_codes() {
    // Critical coupling: the only channel requested is unphysical.
    let out = run(&["spectrum", "--alpha", "0.1", "--dim", "2", "--n-max", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("critical coupling"));
    // Series and integral routes are invalid above the first pole in nu.
    let out = run(&["green", "--alpha", "0.3", "--dim", "3", "--l", "0", "--energy", "0.96", "--rb", "2", "--ra", "1", "--route", "integral"]);
    assert_eq!(out.status.code(), Some(1));
    // Unknown flag.
    assert_eq!(run(&["spectrum", "--bogus"]).status.code(), Some(1));
    // Kummer argument far outside the working range.
    let out = run(&["residues", "--alpha", "0.3", "--dim", "3", "--n", "1", "--l", "0", "--radii", "1000,3000"]);
    assert_eq!(out.status.code(), Some(2));
    // Unwritable output path.
    let out = run(&["spectrum", "--alpha", "0.3", "--dim", "3", "--n-max", "2", "-o", "/nonexistent/dir/x.json"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
