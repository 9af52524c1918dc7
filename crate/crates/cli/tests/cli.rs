use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const FIXTURE: &str = "slot,gs_id,shell,sat_index
0,0,A,23
0,0,B,41
0,1,A,46
0,1,B,41
1,0,A,69
1,0,B,82
1,1,A,46
1,1,B,41
";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shellroute"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn field<'a>(line: &'a str, key: &str) -> &'a str {
    let start = line.find(&format!("{key}=")).unwrap() + key.len() + 1;
    let rest = &line[start..];
    // gs_sequence is last and space separated
    if key == "gs_sequence" {
        rest.trim_end()
    } else {
        rest.split_whitespace().next().unwrap()
    }
}

const SMALL_SCENARIO: &str = r#"
n_slots = 3

[shell_a]
shell_id = "a"
n_planes = 6
sats_per_plane = 8
altitude_km = ALT
inclination_deg = INC

[shell_b]
shell_id = "b"
n_planes = 6
sats_per_plane = 8
altitude_km = 1200.0
inclination_deg = INC

[[ground_stations]]
gs_id = 0
name = "site"
lat_deg = LAT
lon_deg = 0.0
"#;

fn scenario(alt: &str, inc: &str, lat: &str) -> String {
    SMALL_SCENARIO
        .replace("ALT", alt)
        .replace("INC", inc)
        .replace("LAT", lat)
}

#[test]
fn gen_trace_from_preset() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.csv");
    let o = run(&["gen-trace", "--preset", "starlink_oneweb", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("slots=60"));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("slot,gs_id,shell,sat_index\n"));
}

#[test]
fn negative_altitude_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, scenario("-550.0", "53.0", "10.0")).unwrap();
    let o = run(&["gen-trace", "--config", p(&cfg), "--out", p(&dir.path().join("t.csv"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("shell_a.altitude_km"), "{}", stderr(&o));
}

#[test]
fn polar_station_with_equatorial_shells_is_unroutable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("polar.toml");
    fs::write(&cfg, scenario("550.0", "0.0", "89.0")).unwrap();
    let o = run(&["gen-trace", "--config", p(&cfg), "--out", p(&dir.path().join("t.csv"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("slot 0"), "{}", stderr(&o));
}

#[test]
fn solve_fixture_and_degenerate_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("fixture.csv");
    fs::write(&trace, FIXTURE).unwrap();
    let csv = dir.path().join("slots.csv");
    let t = p(&trace);

    let o = run(&["solve", "--trace", t, "--src", "0", "--dst", "0", "--out", p(&csv)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let line = stdout(&o);
    assert_eq!(field(&line, "cumulative_irc"), "6.000000");
    assert_eq!(field(&line, "gs_sequence"), "0 1");
    let rows = fs::read_to_string(&csv).unwrap();
    assert_eq!(
        rows,
        "slot,gs_selected,hops,delta_isl,switching_rate,cumulative_irc\n\
         0,0,4,0,0.000000,2.000000\n\
         1,1,6,2,0.500000,6.000000\n"
    );

    let dp = run(&["solve", "--trace", t, "--src", "0", "--dst", "0", "--alpha", "1"]);
    let mh = run(&["solve", "--trace", t, "--src", "0", "--dst", "0", "--strategy", "min-hop"]);
    assert_eq!(
        field(&stdout(&dp), "gs_sequence"),
        field(&stdout(&mh), "gs_sequence")
    );
}

#[test]
fn unknown_strategy_lists_valid_values() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("fixture.csv");
    fs::write(&trace, FIXTURE).unwrap();
    let o = run(&["solve", "--trace", p(&trace), "--src", "0", "--dst", "0", "--strategy", "greedy"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    for s in ["dp-irc", "min-hop", "adaptive"] {
        assert!(err.contains(s), "{err}");
    }
}

#[test]
fn malformed_trace_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("broken.csv");
    fs::write(&trace, "slot,gs_id,shell,sat_index\n0,0,A,23\n0,0,C,41\n").unwrap();
    let o = run(&["solve", "--trace", p(&trace), "--src", "0", "--dst", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn campaign_subsets_and_rerun_from_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("campaign.toml");
    fs::write(
        &cfg,
        "preset = \"starlink_oneweb\"\n\
         pairs = [[1, 159], [40, 7]]\n\
         gs_subset_sizes = [165, 110, 55]\n\
         subset_seed = 4\n",
    )
    .unwrap();
    let first = dir.path().join("first");
    let o = run(&["campaign", "--config", p(&cfg), "--out-dir", p(&first), "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let agg = fs::read_to_string(first.join("aggregate.csv")).unwrap();
    let rows: Vec<&str> = agg.lines().skip(1).collect();
    assert_eq!(rows.len(), 9);
    for k in ["165", "110", "55"] {
        let n = rows
            .iter()
            .filter(|r| r.split(',').nth(1) == Some(k))
            .count();
        assert_eq!(n, 3, "gs_count {k}");
    }

    let second = dir.path().join("second");
    let o = run(&[
        "campaign",
        "--config",
        p(&first.join("manifest.json")),
        "--out-dir",
        p(&second),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["slots.csv", "pairs.csv", "aggregate.csv", "manifest.json"] {
        assert_eq!(
            fs::read(first.join(f)).unwrap(),
            fs::read(second.join(f)).unwrap(),
            "{f}"
        );
    }
}
