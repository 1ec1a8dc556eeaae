use usol_core::harness::config::Profile;
use usol_core::harness::{experiment, experiments_for, run_experiment, ExperimentConfig, EXPERIMENTS, SUBCOMMANDS};

#[test]
fn config_file_round_trip() {
    let cfg = ExperimentConfig::parse(
        "# comment\ndim = 4\nsignature_k = 2\ngrid = 32 # trailing\nprofile = full\ntol.slope = 0.05\nseed = 9\n",
    )
    .unwrap();
    assert_eq!((cfg.dim, cfg.k, cfg.grid, cfg.seed), (4, 2, Some(32), 9));
    assert_eq!(cfg.profile, Profile::Full);
    assert_eq!(cfg.tol("slope", 1.0), 0.05);
    assert_eq!(cfg.tol("cone", 0.1), 0.1);
    cfg.validate().unwrap();
    let echo = cfg.echo();
    assert!(echo.contains(&("dim".to_string(), "4".to_string())));
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(ExperimentConfig::parse("dim 3").is_err());
    assert!(ExperimentConfig::parse("colour = red").is_err());
    assert!(ExperimentConfig::parse("grid = many").is_err());
    for text in ["dim = 2", "signature_k = 3", "grid = 24", "box = -1", "tol.identity = 0", "pair = 3/2,0"] {
        let bad = ExperimentConfig::parse(text).and_then(|c| c.validate());
        assert!(bad.is_err(), "{text}");
    }
}

#[test]
fn subcommands_cover_the_registry() {
    let all = experiments_for("all").unwrap();
    assert_eq!(all.len(), EXPERIMENTS.len());
    for sub in SUBCOMMANDS {
        assert!(!experiments_for(sub).unwrap().is_empty(), "{sub}");
    }
    for e in EXPERIMENTS {
        assert!(SUBCOMMANDS.contains(&e.subcommand));
    }
    let names: Vec<_> = experiments_for("pv-check").unwrap().iter().map(|e| e.name).collect();
    assert_eq!(names, ["pv", "abc"]);
    assert!(experiments_for("nope").is_err());
    assert!(experiment("nope").is_err());
}

#[test]
fn verdicts_recompute_from_the_csv() {
    let cfg = ExperimentConfig::default();
    for name in ["region", "dyadic", "pv", "abc", "polar", "normest"] {
        let report = run_experiment(experiment(name).unwrap(), &cfg).unwrap();
        assert!(report.passed(), "{name}: {}", report.summary());
        let text = report.csv_string().unwrap();
        let again = report.recheck(&text).unwrap();
        assert_eq!(again.len(), report.outcomes.len());
        for (a, b) in again.iter().zip(&report.outcomes) {
            assert_eq!(a.pass, b.pass, "{name}/{}", a.name);
            assert!((a.observed - b.observed).abs() <= 1e-12 * b.observed.abs().max(1e-300), "{name}/{}", a.name);
        }
        let mut svg = Vec::new();
        report.write_svg(&mut svg).unwrap();
        assert!(String::from_utf8(svg).unwrap().starts_with("<svg"));
    }
}

#[test]
fn csv_is_byte_identical_across_runs() {
    let cfg = ExperimentConfig { seed: 17, ..Default::default() };
    for name in ["abc", "normest"] {
        let a = run_experiment(experiment(name).unwrap(), &cfg).unwrap().csv_string().unwrap();
        let b = run_experiment(experiment(name).unwrap(), &cfg).unwrap().csv_string().unwrap();
        assert_eq!(a, b, "{name}");
    }
}
