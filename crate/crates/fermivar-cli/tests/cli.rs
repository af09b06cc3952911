//! End-to-end behaviour of the `fermivar` binary: exit codes, artifacts,
//! CSV layout and reproducibility.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fermivar_cli::config::{ExperimentConfig, ExperimentKind, Parameters, SchwingerParams};
use fermivar_cli::record::{ResultRecord, Status, Verdict};
use proptest::prelude::*;
use tempfile::TempDir;

fn fermivar(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fermivar"))
        .args(args)
        .current_dir(dir)
        .env_remove(fermivar_cli::OUTPUT_ENV)
        .output()
        .expect("the binary starts")
}

/// Writes `text` as `config.toml` in a fresh directory and runs `experiment`
/// on it with output into `out/`.
fn run_config(experiment: &str, text: &str) -> (TempDir, Output) {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("config.toml"), text).unwrap();
    let output = fermivar(&[experiment, "--config", "config.toml", "--output", "out"], dir.path());
    (dir, output)
}

fn record(dir: &Path) -> ResultRecord {
    serde_json::from_slice(&fs::read(dir.join("out/results.json")).unwrap()).unwrap()
}

fn csv_rows(path: PathBuf) -> (Vec<String>, Vec<csv::StringRecord>) {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let headers = reader.headers().unwrap().iter().map(str::to_string).collect();
    let rows = reader.records().map(Result::unwrap).collect();
    (headers, rows)
}

const SMALL_SELFTEST: &str =
    "experiment = \"selftest\"\nseed = 3\n[parameters]\ngaussian_cases = 20\nnorm_cases = 2\nproperty_cases = 5\n";

#[test]
fn selftest_passes_and_writes_its_artifacts() {
    let (dir, output) = run_config("selftest", SMALL_SELFTEST);
    assert_eq!(output.status.code(), Some(0), "{}", String::from_utf8_lossy(&output.stderr));
    let out = dir.path().join("out");
    for file in ["results.json", "metadata.json", "selftest.csv"] {
        assert!(out.join(file).is_file(), "{file} missing");
    }
    let rec = record(dir.path());
    assert_eq!(rec.schema_version, 1);
    assert_eq!(rec.status, Status::Pass);
    assert_eq!(rec.artifacts, ["selftest.csv"]);
    assert!(rec.metrics.iter().all(|m| m.verdict == Verdict::Pass && m.bound.is_some()));
    assert_eq!(rec.input_hash.len(), 64);
    let metadata: serde_json::Value = serde_json::from_slice(&fs::read(out.join("metadata.json")).unwrap()).unwrap();
    assert!(metadata["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    assert_eq!(metadata["input_hash"], rec.input_hash.as_str());
}

#[test]
fn malformed_configurations_exit_four_without_artifacts() {
    let cases = [
        ("selftest", "experiment = \"selftest\"\nseed = \n"),
        ("selftest", "experiment = \"selftest\"\nseed = 1\nflavour = 2\n"),
        ("vacuum", "experiment = \"vacuum\"\nseed = 1\n[parameters]\nsite = [2]\n"),
        ("vacuum", "experiment = \"vacuum\"\nseed = 1\n[parameters]\nlambda = 0.0\n"),
        ("schwinger", "experiment = \"schwinger\"\nseed = 1\n[parameters]\nxi = [-1.0]\n"),
        ("poincare", "experiment = \"vacuum\"\nseed = 1\n"),
        ("selftest", "experiment = \"cosmology\"\nseed = 1\n"),
    ];
    for (experiment, text) in cases {
        let (dir, output) = run_config(experiment, text);
        assert_eq!(output.status.code(), Some(4), "{text}: {}", String::from_utf8_lossy(&output.stderr));
        assert!(!dir.path().join("out").exists(), "{text}: artifacts written");
        assert!(!output.stderr.is_empty());
    }
}

#[test]
fn missing_file_and_bad_usage_exit_four() {
    let dir = TempDir::new().unwrap();
    let missing = fermivar(&["selftest", "--config", "absent.toml", "--output", "out"], dir.path());
    assert_eq!(missing.status.code(), Some(4));
    let unknown = fermivar(&["astrology", "--config", "absent.toml"], dir.path());
    assert_eq!(unknown.status.code(), Some(4));
    let no_config = fermivar(&["selftest"], dir.path());
    assert_eq!(no_config.status.code(), Some(4));
    assert_eq!(fermivar(&["--help"], dir.path()).status.code(), Some(0));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn schwinger_sweep_table_meets_the_exponential_law() {
    let text = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/schwinger.toml")).unwrap();
    let (dir, output) = run_config("schwinger", &text);
    assert_eq!(output.status.code(), Some(0), "{}", String::from_utf8_lossy(&output.stdout));
    let (headers, rows) = csv_rows(dir.path().join("out/schwinger.csv"));
    for column in ["xi", "beta_sq_numeric", "beta_sq_analytic", "rel_err"] {
        assert!(headers.iter().any(|h| h == column), "{column} missing from {headers:?}");
    }
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    assert_eq!(rows.len(), 6);
    for (k, row) in rows.iter().enumerate() {
        let xi: f64 = row[col("xi")].parse().unwrap();
        let numeric: f64 = row[col("beta_sq_numeric")].parse().unwrap();
        let rel_err: f64 = row[col("rel_err")].parse().unwrap();
        assert!((xi - (k + 1) as f64).abs() < 1e-12);
        assert!(rel_err <= 0.02, "xi={xi}: {rel_err}");
        assert!((numeric / (-std::f64::consts::PI * xi).exp() - 1.0).abs() <= 0.02);
    }
    let bytes = fs::read(dir.path().join("out/schwinger.csv")).unwrap();
    assert!(!bytes.contains(&b'\r'));
    assert!(bytes.ends_with(b"\n"));
}

#[test]
fn empty_grid_gives_a_header_only_table() {
    let (dir, output) =
        run_config("schwinger", "experiment = \"schwinger\"\nseed = 1\n[parameters]\nxi = []\np_perp = []\n");
    assert_eq!(output.status.code(), Some(0), "{}", String::from_utf8_lossy(&output.stdout));
    let text = fs::read_to_string(dir.path().join("out/schwinger.csv")).unwrap();
    assert_eq!(text, "p_x,p_y,xi,beta_sq_numeric,beta_sq_analytic,rel_err,drift,pz_spread,normal_defect\n");
}

#[test]
fn poincare_report_columns_and_verdict_failure() {
    let (dir, output) = run_config("poincare", "experiment = \"poincare\"\nseed = 1\n");
    // The [K,H] − iP defect is zero on two sites, so it cannot decrease from there.
    assert_eq!(output.status.code(), Some(3));
    let rec = record(dir.path());
    assert_eq!(rec.status, Status::VerdictFailure);
    let failing: Vec<&str> = rec.failing_metrics().map(|m| m.name.as_str()).collect();
    assert_eq!(failing, ["boost_hamiltonian_monotone"]);
    let (headers, rows) = csv_rows(dir.path().join("out/poincare.csv"));
    assert_eq!(&headers[..5], ["relation", "sites", "defect", "tolerance", "verdict"]);
    assert!(rows.iter().any(|r| &r[4] == "NOT-REALIZED"));
    assert!(rows.iter().filter(|r| &r[5] == "a" || &r[5] == "b").all(|r| &r[4] == "PASS"));
}

#[test]
fn identical_configurations_give_identical_records() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("config.toml"), SMALL_SELFTEST).unwrap();
    let a = fermivar(&["selftest", "--config", "config.toml", "--output", "a"], dir.path());
    let b = fermivar(&["selftest", "--config", "config.toml", "--output", "b"], dir.path());
    assert_eq!((a.status.code(), b.status.code()), (Some(0), Some(0)));
    let bytes = |sub: &str| fs::read(dir.path().join(sub).join("results.json")).unwrap();
    assert_eq!(bytes("a"), bytes("b"));
    assert_eq!(
        fs::read(dir.path().join("a/selftest.csv")).unwrap(),
        fs::read(dir.path().join("b/selftest.csv")).unwrap()
    );
}

#[test]
fn output_directory_precedence() {
    let dir = TempDir::new().unwrap();
    let text = SMALL_SELFTEST.replace("seed = 3\n", "seed = 3\noutput_dir = \"from_config\"\n");
    fs::write(dir.path().join("config.toml"), text).unwrap();
    let run = |extra: &[&str], env: Option<&str>| {
        let mut args = vec!["selftest", "--config", "config.toml"];
        args.extend_from_slice(extra);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_fermivar"));
        cmd.args(&args).current_dir(dir.path()).env_remove(fermivar_cli::OUTPUT_ENV);
        if let Some(value) = env {
            cmd.env(fermivar_cli::OUTPUT_ENV, value);
        }
        assert_eq!(cmd.output().unwrap().status.code(), Some(0));
    };
    run(&[], None);
    assert!(dir.path().join("from_config/results.json").is_file());
    run(&[], Some("from_env"));
    assert!(dir.path().join("from_env/results.json").is_file());
    run(&["--output", "from_flag"], Some("from_env2"));
    assert!(dir.path().join("from_flag/results.json").is_file());
    assert!(!dir.path().join("from_env2").exists());
}

#[test]
fn shipped_configurations_parse() {
    for kind in ExperimentKind::ALL {
        let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{}.toml", kind.name()));
        let config = ExperimentConfig::load(&path).unwrap();
        assert_eq!(config.experiment, kind);
    }
}

fn arb_schwinger() -> impl Strategy<Value = SchwingerParams> {
    // ξ = (m² + p⊥²)/|eE| cannot be smaller than m²/|eE|.
    (0.2f64..3.0, 0.2f64..3.0, prop::collection::vec(0.0f64..8.0, 0..5), 1e-3f64..0.1).prop_map(
        |(mass, e_field, extra, dt)| {
            let floor = mass * mass / e_field;
            SchwingerParams { mass, e_field, xi: extra.iter().map(|x| floor + x).collect(), dt, ..Default::default() }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn configurations_round_trip(seed in any::<u64>(), kind in prop::sample::select(ExperimentKind::ALL.to_vec()), threads in prop::option::of(1usize..64)) {
        let mut config = ExperimentConfig::defaults(kind, seed);
        config.threads = threads;
        let back = ExperimentConfig::parse(&config.to_toml()).unwrap();
        prop_assert_eq!(back, config);
    }

    #[test]
    fn schwinger_parameters_round_trip(seed in 0u64..1000, params in arb_schwinger()) {
        let mut config = ExperimentConfig::defaults(ExperimentKind::Schwinger, seed);
        config.parameters = Parameters::Schwinger(params);
        let back = ExperimentConfig::parse(&config.to_toml()).unwrap();
        prop_assert_eq!(back, config);
    }
}
