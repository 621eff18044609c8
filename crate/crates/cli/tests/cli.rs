use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;

use rdsquare::records::{validate_line, HitRecord, ReportLine};

fn rdsquare(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdsquare"))
        .args(args)
        .current_dir(dir)
        .env_remove("RDSQUARE_WORKERS")
        .env_remove("RDSQUARE_CHECKPOINT")
        .env_remove("RDSQUARE_OUTPUT")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn summary(o: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(o).lines().last().unwrap()).unwrap()
}

#[test]
fn sweep_counts_every_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = rdsquare(&["search", "--z-max", "50", "--min-count", "4"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let s = summary(&o);
    assert_eq!(s["points_scanned"], 45_525);
    assert_eq!(s["points_covered"], 45_525);
    assert_eq!(s["hits"], 0);

    let o = rdsquare(&["search", "--z-max", "50", "--min-count", "4", "--symmetry"], dir.path());
    let s = summary(&o);
    assert_eq!(s["points_covered"], 45_525);
    assert!(s["points_scanned"].as_u64().unwrap() < 45_525 / 6);
}

#[test]
fn diagonal_has_no_three_distance_points() {
    let dir = tempfile::tempdir().unwrap();
    let o = rdsquare(&["search", "--z-max", "20", "--min-count", "3", "--filter", "diagonal"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 2);
    assert_eq!(summary(&o)["hits"], 0);
}

#[test]
fn every_line_matches_a_schema() {
    let dir = tempfile::tempdir().unwrap();
    let runs: &[&[&str]] = &[
        &["--self-check", "search", "--z-max", "30", "--min-count", "3"],
        &["--self-check", "triples", "--max-hyp", "100"],
        &["--self-check", "three-distance", "--max-hyp", "100"],
        &["--self-check", "descent", "--family", "5", "--bound", "50"],
        &["--self-check", "forced-k", "--mode", "ratio", "--n", "5", "--bound", "50"],
        &["--self-check", "primes", "--limit", "100"],
        &["--self-check", "heuristic", "--mode", "sampled", "--trials", "1000"],
    ];
    for args in runs {
        let o = rdsquare(args, dir.path());
        assert!(matches!(o.status.code(), Some(0 | 10)), "{args:?}: {}", stderr(&o));
        let text = stdout(&o);
        let mut lines = text.lines();
        assert!(matches!(validate_line(lines.next().unwrap()), Ok(ReportLine::Header(_))));
        for line in lines {
            validate_line(line).unwrap_or_else(|e| panic!("{args:?}: {line}: {e}"));
        }
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let usage = rdsquare(&["search", "--z-min", "0", "--z-max", "5"], dir.path());
    assert_eq!(usage.status.code(), Some(2));
    assert!(usage.stdout.is_empty());
    let usage = rdsquare(&["descent", "--family", "1", "--bound", "0"], dir.path());
    assert_eq!(usage.status.code(), Some(2));
    assert!(stderr(&usage).contains("--bound"));

    let refused = rdsquare(&["search", "--z-max", "100", "--budget", "1000"], dir.path());
    assert_eq!(refused.status.code(), Some(3));
    assert!(stderr(&refused).contains("budget"), "{}", stderr(&refused));

    let found = rdsquare(&["descent", "--family", "5", "--bound", "10"], dir.path());
    assert_eq!(found.status.code(), Some(10));
    assert_eq!(summary(&found)["theorem_family"], true);
    let untheorized = rdsquare(&["descent", "--family", "6", "--bound", "100"], dir.path());
    assert_eq!(untheorized.status.code(), Some(0));
    assert_eq!(summary(&untheorized)["theorem_family"], false);

    let over = rdsquare(&["heuristic", "--magnitudes", "100,200,5000"], dir.path());
    assert_eq!(over.status.code(), Some(3));
}

#[test]
fn environment_fallbacks() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_rdsquare"))
        .args(["search", "--z-max", "12", "--min-count", "3", "--filter", "edge"])
        .env("RDSQUARE_OUTPUT", "csv")
        .env("RDSQUARE_WORKERS", "3")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().collect();
    assert!(lines[0].starts_with("# {\"config\""));
    assert_eq!(lines[1], "z,x,y,sq_dists,roots,count,tags");
    assert_eq!(lines[2], "4,0,1,1;9;25;17,1;3;5;,3,on_edge");
    assert!(lines.last().unwrap().starts_with("# {\"summary\":\"search\""));

    let bad = Command::new(env!("CARGO_BIN_EXE_rdsquare"))
        .args(["primes", "--limit", "10"])
        .env("RDSQUARE_WORKERS", "0")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn checkpoint_resume_matches_one_shot() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("run.ckpt");
    let ck = ck.to_str().unwrap();
    let base = ["search", "--z-max", "50", "--min-count", "3"];
    let one_shot = rdsquare(&base, dir.path());

    let mut first = vec!["--checkpoint", ck];
    first.extend(base);
    first.extend(["--stop-after-z", "30"]);
    let o = rdsquare(&first, dir.path());
    assert_eq!(o.status.code(), Some(130));
    let lines = fs::read_to_string(ck).unwrap().lines().count();
    assert_eq!(lines, 31, "header plus one record per finished z");

    // A crash mid-write leaves a partial line behind.
    let mut f = fs::OpenOptions::new().append(true).open(ck).unwrap();
    f.write_all(br#"{"z_done":31,"hits":[{"z":31"#).unwrap();
    drop(f);

    let mut resume = vec!["--workers", "4", "--checkpoint", ck];
    resume.extend(base);
    let o = rdsquare(&resume, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(o.stdout, one_shot.stdout);
    assert!(stderr(&o).contains("truncated"));
    assert!(fs::read_to_string(ck).unwrap().ends_with("{\"complete\":true}\n"));
}

#[test]
fn checkpoint_refusals() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("run.ckpt");
    let ck = ck.to_str().unwrap();
    let o = rdsquare(&["--checkpoint", ck, "search", "--z-max", "10", "--min-count", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0));

    let other = rdsquare(&["--checkpoint", ck, "search", "--z-max", "11", "--min-count", "3"], dir.path());
    assert_eq!(other.status.code(), Some(3));
    let err = stderr(&other);
    assert!(err.contains("z_max=10") && err.contains("z_max=11"), "{err}");

    // Tamper with a stored hit: the distances no longer match the point.
    let text = fs::read_to_string(ck).unwrap();
    let forged = text.replacen("\"x\":3,\"y\":0", "\"x\":2,\"y\":0", 1);
    assert_ne!(forged, text);
    fs::write(ck, forged).unwrap();
    let o = rdsquare(&["--checkpoint", ck, "search", "--z-max", "10", "--min-count", "3"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("does not match"), "{}", stderr(&o));

    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[2] = "{not json".into();
    fs::write(ck, lines.join("\n") + "\n").unwrap();
    let o = rdsquare(&["--checkpoint", ck, "search", "--z-max", "10", "--min-count", "3"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let offset = text.lines().take(2).map(|l| l.len() + 1).sum::<usize>();
    assert!(stderr(&o).contains(&format!("byte offset {offset}")), "{}", stderr(&o));
}

#[test]
fn empty_checkpoint_starts_fresh() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("run.ckpt");
    fs::write(&ck, "").unwrap();
    let o = rdsquare(&["--checkpoint", ck.to_str().unwrap(), "search", "--z-max", "8"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("starting fresh"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hit_records_round_trip(z in 1i64..100_000, xf in -1.0f64..2.0, yf in -1.0f64..2.0) {
        let x = (z as f64 * xf) as i64;
        let y = (z as f64 * yf) as i64;
        let rec = HitRecord::from(&rdsquare_core::classify_point(z, x, y).unwrap());
        let line = serde_json::to_string(&rec).unwrap();
        match validate_line(&line) {
            Ok(ReportLine::Hit(back)) => prop_assert_eq!(back, rec),
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn canonical_string_ignores_worker_count(z_max in 1i64..10_000, workers in 1u16..64, min_count in 1u8..=4) {
        let z = z_max.to_string();
        let w = workers.to_string();
        let m = min_count.to_string();
        let a = rdsquare::parse_config(["rdsquare", "search", "--z-max", z.as_str(), "--min-count", m.as_str()]).unwrap();
        let b = rdsquare::parse_config(["rdsquare", "--workers", w.as_str(), "search", "--z-max", z.as_str(), "--min-count", m.as_str()]).unwrap();
        prop_assert_eq!(a.canonical(), b.canonical());
    }
}
