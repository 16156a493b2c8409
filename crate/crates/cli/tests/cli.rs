use std::path::{Path, PathBuf};

use proptest::prelude::*;
use twinch_cli::{cli_main, exit, parse_config, serialize_config, TRACE_HEADER};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn invoke(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("twinch").chain(args.iter().copied());
    let code = cli_main(argv, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn staged_simulation_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.csv");
    let cfg = config("winch_then_twist.toml");
    let r = invoke(&["simulate", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(r.code, exit::OK, "{}", r.stderr);
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), TRACE_HEADER.join(","));
    let last: Vec<f64> = lines
        .last()
        .unwrap()
        .split(',')
        .filter(|c| !c.is_empty())
        .map(|c| c.parse().unwrap())
        .collect();
    let dx_mm = last[TRACE_HEADER.iter().position(|h| h.starts_with("dX")).unwrap()];
    // twisting adds to the wound stroke
    assert!(dx_mm > 90.56 + 1.0, "{dx_mm}");
}

#[test]
fn every_bundled_config_runs() {
    for (cmd, name) in [
        ("simulate", "winch_then_twist.toml"),
        ("simulate", "velocity_control.toml"),
        ("sweep", "twist_velocity_sweep.toml"),
        ("sweep", "winch_velocity_sweep.toml"),
        ("force", "force_grid.toml"),
        ("ratio", "ratio_map.toml"),
    ] {
        let cfg = config(name);
        let r = invoke(&[cmd, cfg.to_str().unwrap()]);
        assert_eq!(r.code, exit::OK, "{cmd} {name}: {}", r.stderr);
        assert!(r.stdout.lines().count() > 1, "{cmd} {name}");
        for cell in r.stdout.lines().skip(1).flat_map(|l| l.split(',')) {
            if !cell.is_empty() {
                assert!(cell.parse::<f64>().unwrap().is_finite());
            }
        }
    }
}

#[test]
fn force_summary_reports_crossover() {
    let cfg = config("force_grid.toml");
    let r = invoke(&["force", cfg.to_str().unwrap()]);
    assert_eq!(r.code, exit::OK);
    assert_eq!(r.stderr.matches("twisting overtakes winching at").count(), 4, "{}", r.stderr);
}

#[test]
fn outputs_are_byte_identical() {
    for (cmd, name) in [
        ("simulate", "velocity_control.toml"),
        ("ratio", "ratio_map.toml"),
    ] {
        let cfg = config(name);
        let a = invoke(&[cmd, cfg.to_str().unwrap()]);
        let b = invoke(&[cmd, cfg.to_str().unwrap()]);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.stderr, b.stderr);
    }
}

#[test]
fn usage_errors() {
    assert_eq!(invoke(&["launch"]).code, exit::USAGE);
    assert_eq!(invoke(&[]).code, exit::USAGE);
    assert_eq!(invoke(&["simulate"]).code, exit::USAGE);
}

#[test]
fn missing_file_is_io_error() {
    let r = invoke(&["simulate", "/nonexistent/run.toml"]);
    assert_eq!(r.code, exit::IO);
    assert!(!r.stderr.is_empty());
}

#[test]
fn malformed_config_is_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "[string]\nlength = 0.5\nradius = \"1 mm\"\n");
    let r = invoke(&["simulate", path.to_str().unwrap()]);
    assert_eq!(r.code, exit::PARSE);
    assert!(r.stderr.contains("line 2"), "{}", r.stderr);
}

#[test]
fn invalid_value_is_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "[string]\nlength = \"500 mm\"\n\n[winch]\nradius = \"5 mm\"\nfriction = 1.5\n\n[[phase]]\nduration = \"1 s\"\nhold = true\n",
    );
    let r = invoke(&["simulate", path.to_str().unwrap()]);
    assert_eq!(r.code, exit::VALIDATION, "{}", r.stderr);
}

#[test]
fn rigid_force_query_is_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "[string]\nlength = \"300 mm\"\nstiffness = \"rigid\"\n\n[winch]\nradius = \"5 mm\"\n\n[force]\nlength = \"300 mm\"\ntwist_from = \"0 rad\"\ntwist_to = \"10 rad\"\ntwist_steps = 3\ntorque_from = \"0.1 N*m\"\ntorque_to = \"0.1 N*m\"\ntorque_steps = 1\n",
    );
    let r = invoke(&["force", path.to_str().unwrap()]);
    assert_eq!(r.code, exit::DOMAIN, "{}", r.stderr);
}

#[test]
fn overtwist_keeps_partial_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "[string]\nlength = \"500 mm\"\nstiffness = \"rigid\"\n\n[winch]\nradius = \"5 mm\"\n\n[sim]\ndt = \"10 ms\"\n\n[[phase]]\nduration = \"10 s\"\ntwist_rate = \"40 rad/s\"\n",
    );
    let out = dir.path().join("trace.csv");
    let r = invoke(&["simulate", path.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(r.code, exit::DOMAIN, "{}", r.stderr);
    let csv = std::fs::read_to_string(out).unwrap();
    assert!(csv.lines().count() > 2);
}

#[test]
fn unwritable_output_is_io_error() {
    let cfg = config("winch_velocity_sweep.toml");
    let r = invoke(&["sweep", cfg.to_str().unwrap(), "-o", "/nonexistent/dir/out.csv"]);
    assert_eq!(r.code, exit::IO);
}

fn quantity(v: f64, unit: &str) -> String {
    format!("\"{v:?} {unit}\"")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn config_roundtrips(
        length in 0.1f64..2.0,
        radius in 1e-4f64..3e-3,
        stiffness in prop::option::of(1e3f64..1e7),
        r_w in 1e-3f64..2e-2,
        mu in 0.0f64..0.99,
        counts in (1u32..5, 1u32..5),
        ratios in (0.5f64..10.0, 0.5f64..10.0),
        dt in 1e-5f64..1e-2,
        durations in prop::collection::vec(0.01f64..5.0, 1..4),
        rate in -10.0f64..10.0,
    ) {
        let stiffness = stiffness.map_or("\"rigid\"".to_string(), |k| quantity(k, "N/m"));
        let mut text = format!(
            "[string]\nlength = {}\nradius = {}\nstiffness = {stiffness}\n\n\
             [winch]\nradius = {}\nfriction = {mu:?}\n\n\
             [gears]\nbevel_count = {}\nbevel_ratio = {:?}\nturret_count = {}\nturret_ratio = {:?}\n\n\
             [sim]\ndt = {}\n",
            quantity(length, "m"),
            quantity(radius, "m"),
            quantity(r_w, "m"),
            counts.0, ratios.0, counts.1, ratios.1,
            quantity(dt, "s"),
        );
        for d in &durations {
            text += &format!("\n[[phase]]\nduration = {}\ntwist_rate = {}\n", quantity(*d, "s"), quantity(rate, "rad/s"));
        }
        let cfg = parse_config(&text).unwrap();
        let again = parse_config(&serialize_config(&cfg)).unwrap();
        prop_assert_eq!(&cfg, &again);
        prop_assert_eq!(cfg.params.unloaded_length, length);
        prop_assert_eq!(cfg.winch.winch_radius, r_w);
    }
}
