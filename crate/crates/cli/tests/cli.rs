use std::path::Path;
use std::process::{Command, Output};

use psequiv::equivalence::PseCertificate;
use psequiv::io::{
    from_toml_document, monfg_from_toml, read_summary_csv, read_trajectory_csv, ContinuousDocument, RunSummary,
    CERTIFICATE_SCHEMA, CONTINUOUS_SCHEMA, RUN_SUMMARY_SCHEMA,
};

fn psequiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psequiv")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn small_run(out: &Path, seed: &str) -> Output {
    psequiv(&[
        "run-fp",
        "--game",
        "polynomial",
        "--iterations",
        "20",
        "--trials",
        "4",
        "--seed",
        seed,
        "--grid",
        "201",
        "--out",
        out.to_str().unwrap(),
    ])
}

#[test]
fn run_fp_writes_parseable_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = small_run(dir.path(), "3");
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let summary: RunSummary = from_toml_document(RUN_SUMMARY_SCHEMA, &read(&dir.path().join("summary.toml"))).unwrap();
    assert_eq!((summary.game.as_str(), summary.trials, summary.iterations, summary.seed), ("polynomial", 4, 20, 3));
    assert_eq!(summary.players.len(), 2);
    assert_eq!(summary.best_response.grid_points_per_dim, 201);

    let rows = read_trajectory_csv(std::fs::File::open(dir.path().join("trajectories.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 4 * 20 * 2);
    assert!(rows.iter().all(|r| r.mapped.len() == 1 && (-1.0..=1.0).contains(&r.mapped[0])));
    let per_iteration = read_summary_csv(std::fs::File::open(dir.path().join("summary.csv")).unwrap()).unwrap();
    assert_eq!(per_iteration.len(), 20 * 2);
    assert!(per_iteration.iter().all(|s| s.trials == 4));
}

#[test]
fn run_fp_is_reproducible_for_a_seed() {
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for (dir, seed) in [(&a, "11"), (&b, "11"), (&c, "12")] {
        assert_eq!(code(&small_run(dir.path(), seed)), 0);
    }
    let csv = |d: &tempfile::TempDir| std::fs::read(d.path().join("trajectories.csv")).unwrap();
    assert_eq!(csv(&a), csv(&b));
    assert_ne!(csv(&a), csv(&c));
}

#[test]
fn run_fp_flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let config = dir.path().join("experiment.toml");
    std::fs::write(
        &config,
        format!(
            "game = \"polynomial\"\niterations = 30\ntrials = 5\nseed = 9\ngrid = 101\nout = {:?}\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let run = psequiv(&["run-fp", "--config", config.to_str().unwrap(), "--trials", "2"]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let summary: RunSummary = from_toml_document(RUN_SUMMARY_SCHEMA, &read(&out.join("summary.toml"))).unwrap();
    assert_eq!((summary.trials, summary.iterations, summary.seed), (2, 30, 9));
    assert_eq!(summary.best_response.grid_points_per_dim, 101);
}

#[test]
fn run_fp_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&psequiv(&["run-fp", "--game", "no-such-game", "--out", out])), 2);
    assert_eq!(code(&psequiv(&["run-fp", "--game", "polynomial", "--p-min", "2", "--out", out])), 2);
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "game = \"polynomial\"\nunknown_key = 1\n").unwrap();
    assert_eq!(code(&psequiv(&["run-fp", "--config", config.to_str().unwrap(), "--out", out])), 2);
}

#[test]
fn transform_continuous_to_monfg_is_certified() {
    let dir = tempfile::tempdir().unwrap();
    let out = psequiv(&["transform", "--game", "polynomial", "--to", "monfg", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let game = monfg_from_toml(&read(&dir.path().join("monfg.toml"))).unwrap();
    assert_eq!(game.action_counts(), &[2, 2]);
    let cert: PseCertificate =
        from_toml_document(CERTIFICATE_SCHEMA, &read(&dir.path().join("certificate.toml"))).unwrap();
    assert!(cert.passed && cert.max_utility_gap <= 1e-8 && cert.n_samples == 1000);
}

#[test]
fn transform_monfg_to_continuous_is_certified() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        psequiv(&["transform", "--game", "balanced-2x2", "--to", "continuous", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc: ContinuousDocument =
        from_toml_document(CONTINUOUS_SCHEMA, &read(&dir.path().join("continuous.toml"))).unwrap();
    assert_eq!(doc.strategy_sets.len(), 2);
    let cert: PseCertificate =
        from_toml_document(CERTIFICATE_SCHEMA, &read(&dir.path().join("certificate.toml"))).unwrap();
    assert!(cert.passed);
}

#[test]
fn transform_with_injected_fault_fails_its_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = psequiv(&["transform", "--game", "polynomial", "--to", "monfg", "--out", d, "--inject-fault", "1e-3"]);
    assert_eq!(code(&out), 1);
    let cert: PseCertificate =
        from_toml_document(CERTIFICATE_SCHEMA, &read(&dir.path().join("certificate.toml"))).unwrap();
    assert!(!cert.passed && cert.max_utility_gap > 1e-8);
}

#[test]
fn transform_rejects_a_model_that_is_already_the_target() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&psequiv(&["transform", "--game", "polynomial", "--to", "continuous", "--out", d])), 2);
    assert_eq!(code(&psequiv(&["transform", "--game", "identity-2x2", "--to", "monfg", "--out", d])), 2);
}

#[test]
fn verify_accepts_known_equilibria() {
    let x = 16f64.powf(-1.0 / 3.0);
    let strategy = format!("{x};{}", 1.0 / (4.0 * x));
    assert_eq!(code(&psequiv(&["verify", "--game", "polynomial", "--strategy", &strategy])), 0);
    let table = psequiv(&["verify", "--game", "bertrand-restricted", "--strategy", "22.9884;22.9884", "--eps", "0.1"]);
    assert_eq!(code(&table), 0, "{}", String::from_utf8_lossy(&table.stdout));
    assert_eq!(code(&psequiv(&["verify", "--game", "balanced-2x2", "--strategy", "1,0;1,0"])), 0);
}

#[test]
fn verify_rejects_non_equilibria_and_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.toml");
    let out = psequiv(&["verify", "--game", "polynomial", "--strategy", "0;0", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    assert!(read(&report).contains("passed = false"));
    assert_eq!(code(&psequiv(&["verify", "--game", "polynomial", "--strategy", "0.4"])), 2);
    assert_eq!(code(&psequiv(&["verify", "--game", "polynomial", "--strategy", "abc;0.3"])), 2);
    assert_eq!(code(&psequiv(&["verify", "--game", "polynomial", "--strategy", "5;0.3"])), 2);
}

#[test]
fn list_games_names_the_catalog() {
    let out = psequiv(&["list-games"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in psequiv::catalog::CATALOG_NAMES {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}
