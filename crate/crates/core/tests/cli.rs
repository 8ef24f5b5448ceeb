use serde_json::Value;
use std::process::{Command, Output};

fn conic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conic"))
        .args(args)
        .env_remove("CONIC_WIDE")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn eval_grid_has_requested_rows() {
    let out = stdout(&conic(&[
        "eval", "--m", "1/2", "--rho-min", "0", "--rho-max", "10", "--steps", "5", "--format", "csv",
    ]));
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["rho", "phi1", "phi2"]);
    assert_eq!(rows.len(), 5);
    let rhos: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(rhos, [0.0, 2.5, 5.0, 7.5, 10.0]);
    assert!(out.ends_with('\n') && !out.contains('\r'));
}

#[test]
fn integer_m_is_a_parse_error() {
    let out = conic(&["eval", "--m", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("half-odd"));
}

#[test]
fn negative_m_swaps_components_at_origin() {
    let out = stdout(&conic(&["eval", "--m", "-1/2", "--rho-max", "1", "--steps", "2"]));
    let (_, rows) = csv_rows(&out);
    assert_eq!(rows[0][1], "0");
    let a1 = (std::f64::consts::PI / 3.0).sqrt();
    assert!((rows[0][2].parse::<f64>().unwrap() - a1).abs() < 1e-9);
}

#[test]
fn json_and_csv_agree() {
    let args = ["eval", "--m", "3/2", "--rho-min", "0.5", "--rho-max", "12", "--steps", "24"];
    let csv = stdout(&conic(&[&args[..], &["--format", "csv"]].concat()));
    let json = stdout(&conic(&[&args[..], &["--format", "json"]].concat()));
    let (header, rows) = csv_rows(&csv);
    let parsed: Value = serde_json::from_str(&json).unwrap();
    let objs = parsed.as_array().unwrap();
    assert_eq!(objs.len(), rows.len());
    for (obj, row) in objs.iter().zip(&rows) {
        let keys: Vec<&String> = obj.as_object().unwrap().keys().collect();
        assert_eq!(keys, header.iter().collect::<Vec<_>>());
        for (name, cell) in header.iter().zip(row) {
            assert_eq!(obj[name].as_f64().unwrap(), cell.parse::<f64>().unwrap());
        }
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["eval", "--m", "-5/2", "--rho-min", "0", "--rho-max", "15", "--steps", "61"];
    assert_eq!(conic(&args).stdout, conic(&args).stdout);
    let g = ["g", "--m", "3/2", "--format", "json"];
    assert_eq!(conic(&g).stdout, conic(&g).stdout);
}

#[test]
fn g_reports_value_and_error_fields() {
    let (header, rows) = csv_rows(&stdout(&conic(&["g", "--m", "1/2"])));
    assert_eq!(header, ["m", "value", "error", "tail_bound", "rho_max"]);
    assert_eq!(rows[0][0], "1/2");
    let g: f64 = rows[0][1].parse().unwrap();
    assert!((g - 0.961).abs() <= 0.002);
    for cell in &rows[0][2..] {
        assert!(cell.parse::<f64>().unwrap().is_finite());
    }
}

#[test]
fn electronic_period_of_parabolic_cone_is_pi() {
    let (header, rows) = csv_rows(&stdout(&conic(&["te", "--potential", "parabolic-cone:a=1"])));
    assert_eq!(header.last().unwrap(), "t_e");
    assert_eq!(rows[0].last().unwrap(), "3.141592654");
}

#[test]
fn electronic_period_from_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e1.txt");
    let table: String = (0..=40)
        .map(|i| {
            let r = 1.2 * i as f64 / 40.0 - 0.1;
            format!("{r} {}\n", -r * (1.0 - r))
        })
        .collect();
    std::fs::write(&path, format!("# r E1\n{table}")).unwrap();
    let spec = format!("file:{}", path.display());
    let (_, rows) = csv_rows(&stdout(&conic(&["te", "--potential", &spec])));
    let te: f64 = rows[0][2].parse().unwrap();
    assert!((te - std::f64::consts::PI).abs() < 1e-2, "{te}");
}

#[test]
fn zeeman_row() {
    let out = stdout(&conic(&[
        "zeeman", "--m", "1/2", "--mass-ratio", "1e6", "--field", "1", "--te", "1",
    ]));
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["m", "M", "B", "T_e", "delta_E"]);
    let de: f64 = rows[0][4].parse().unwrap();
    assert!((de - 0.0961847).abs() < 1e-6, "{de}");

    let out = stdout(&conic(&[
        "zeeman", "--m", "-1/2", "--mass-ratio", "1e6", "--field", "2",
        "--potential", "vee:depth=1,width=2", "--g", "-0.5",
    ]));
    let (_, rows) = csv_rows(&out);
    assert_eq!(rows[0][3], "4");
    assert_eq!(rows[0][4], "-0.025");
}

#[test]
fn figure_file_tracks_the_asymptote() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig.csv");
    let out = conic(&["figure", "--m", "1/2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["rho", "phi1", "phi2", "asym1", "asym2"]);
    assert_eq!(rows.len(), 1000);
    let num = |s: &String| s.parse::<f64>().unwrap();
    let mut late_gap = 0.0f64;
    let mut early_gap = 0.0f64;
    for row in &rows {
        let rho = num(&row[0]);
        if rho < 0.5 {
            assert!(row[3].is_empty() && row[4].is_empty());
            continue;
        }
        let (p1, p2, a1) = (num(&row[1]), num(&row[2]), num(&row[3]));
        let envelope = rho.powf(-0.75);
        if rho >= 8.0 {
            assert!((p1 + p2).abs() <= 0.05 * envelope, "rho {rho}");
        }
        if (1.0..3.0).contains(&rho) {
            early_gap = early_gap.max((p1 - a1).abs());
        }
        if rho >= 6.0 {
            late_gap = late_gap.max((p1 - a1).abs());
        }
    }
    assert!(late_gap < 1e-3 && late_gap < 0.1 * early_gap, "{late_gap} {early_gap}");
}

#[test]
fn figure_components_vanish_at_origin_for_higher_m() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig.json");
    let out = conic(&["figure", "--m", "3/2", "--out", path.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v[0]["phi1"].as_f64(), Some(0.0));
    assert_eq!(v[0]["phi2"].as_f64(), Some(0.0));
    assert!(v[0]["asym1"].is_null());
}

#[test]
fn check_passes() {
    let out = conic(&["check"]);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
}

#[test]
fn error_kinds_map_to_exit_codes() {
    let code = |args: &[&str]| conic(args).status.code();
    assert_eq!(code(&["te", "--potential", "cone:a=1"]), Some(2));
    assert_eq!(code(&["g", "--m", "1"]), Some(2));
    assert_eq!(code(&["eval", "--m", "1/2", "--rho-min", "5", "--rho-max", "1"]), Some(3));
    assert_eq!(code(&["eval", "--m", "1/2", "--steps", "1"]), Some(3));
    assert_eq!(code(&["g", "--m", "1/2", "--tol", "1"]), Some(3));
    assert_eq!(code(&["te", "--potential", "parabolic-cone:a=1", "--tol", "1e-300"]), Some(4));
    let figure = conic(&["figure", "--m", "1/2", "--out", "/nonexistent-dir/fig.csv"]);
    assert_eq!(figure.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&figure.stderr).contains("/nonexistent-dir/fig.csv"));
}
