//! Acceptance suite: one PASS/FAIL line per criterion, then a single assertion.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use anisohit_cli::{emit_csv, run_pipeline, ExperimentConfig, Pipeline, ReportRow};

fn config(name: &str) -> ExperimentConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name);
    ExperimentConfig::from_file(&path).unwrap()
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

struct Run {
    rows: Vec<ReportRow>,
    elapsed: Duration,
}

fn run(pipeline: Pipeline, cfg: &ExperimentConfig) -> Run {
    let start = Instant::now();
    let rows = run_pipeline(pipeline, cfg).unwrap_or_else(|e| panic!("{}: {e}", pipeline.name()));
    Run {
        rows,
        elapsed: start.elapsed(),
    }
}

/// Rows whose experiment label is one of `labels`; `None` takes every row.
fn select<'a>(run: &'a Run, labels: Option<&[&str]>) -> Vec<&'a ReportRow> {
    run.rows
        .iter()
        .filter(|r| labels.is_none_or(|l| l.contains(&r.experiment.as_str())))
        .collect()
}

struct Verdict {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn judge(
    id: u32,
    title: &'static str,
    rows: &[&ReportRow],
    elapsed: Duration,
    budget_s: f64,
) -> Verdict {
    let checked: Vec<_> = rows
        .iter()
        .filter(|r| r.check != anisohit_cli::Check::Info)
        .collect();
    let failed: Vec<_> = checked.iter().filter(|r| !r.pass()).collect();
    let in_time = elapsed.as_secs_f64() <= budget_s;
    let mut detail = format!(
        "{}/{} checks, {:.2} s of {budget_s} s",
        checked.len() - failed.len(),
        checked.len(),
        elapsed.as_secs_f64()
    );
    for r in failed.iter().take(3) {
        detail.push_str(&format!(
            "; failed {} [{}] observed {}",
            r.experiment, r.params, r.observed
        ));
    }
    Verdict {
        id,
        title,
        pass: !checked.is_empty() && failed.is_empty() && in_time,
        detail,
    }
}

fn report(v: &Verdict) {
    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "criterion {:>2} {:<36} {} ({})",
        v.id,
        v.title,
        if v.pass { "PASS" } else { "FAIL" },
        v.detail
    )
    .unwrap();
}

fn rerun_binary(pipeline: Pipeline, conf: &str, out: &Path) -> Vec<u8> {
    let status = Command::new(env!("CARGO_BIN_EXE_anisohit"))
        .arg(pipeline.name())
        .arg("--config")
        .arg(config_path(conf))
        .arg("--out")
        .arg(out)
        .arg("--quiet")
        .env("ANISOHIT_THREADS", "1")
        .status()
        .expect("binary runs");
    assert!(status.code().is_some_and(|c| c <= 1), "{status:?}");
    std::fs::read(out.join(format!("{}.csv", pipeline.name()))).unwrap()
}

#[test]
fn acceptance_criteria() {
    let mut verdicts = vec![];
    let mut record = |v: Verdict| {
        report(&v);
        verdicts.push(v);
    };

    let scaling = config("scaling.conf");
    let r = run(Pipeline::VarianceScaling, &scaling);
    record(judge(
        1,
        "variance scaling",
        &select(&r, None),
        r.elapsed,
        5.0,
    ));

    let r = run(Pipeline::Rates, &scaling);
    record(judge(
        2,
        "temporal rate",
        &select(&r, Some(&["temporal-slope"])),
        r.elapsed,
        30.0,
    ));
    record(judge(
        3,
        "spatial rate and critical log model",
        &select(&r, Some(&["spatial-slope", "spatial-log-residual-ratio"])),
        r.elapsed,
        60.0,
    ));

    let r = run(Pipeline::MetricEquivalence, &scaling);
    record(judge(
        4,
        "metric equivalence",
        &select(&r, None),
        r.elapsed,
        120.0,
    ));

    let r = run(Pipeline::GaugeCheck, &config("gauges.conf"));
    record(judge(
        5,
        "Lambert W residual and bounds",
        &select(&r, Some(&["lambert-residual", "lambert-sandwich"])),
        r.elapsed,
        1.0,
    ));
    record(judge(
        6,
        "closed forms and growth limit",
        &select(&r, Some(&["v-closed-form", "growth-limit"])),
        r.elapsed,
        10.0,
    ));

    let potential = config("potential.conf");
    let r = run(Pipeline::Capacity, &potential);
    record(judge(
        7,
        "capacity properties",
        &select(&r, None),
        r.elapsed,
        60.0,
    ));
    let r = run(Pipeline::Hausdorff, &potential);
    record(judge(
        8,
        "Hausdorff premeasure",
        &select(&r, None),
        r.elapsed,
        10.0,
    ));

    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    std::fs::create_dir_all(&first).unwrap();
    std::fs::create_dir_all(&second).unwrap();

    let small_ball = run(Pipeline::SmallBall, &config("small_ball.conf"));
    emit_csv(&small_ball.rows, &first.join("small-ball.csv")).unwrap();
    record(judge(
        9,
        "small-ball slope",
        &select(
            &small_ball,
            Some(&["small-ball-slope", "small-ball-bracket"]),
        ),
        small_ball.elapsed,
        900.0,
    ));

    let polarity = run(Pipeline::Polarity, &config("polarity.conf"));
    emit_csv(&polarity.rows, &first.join("polarity.csv")).unwrap();
    record(judge(
        10,
        "polarity",
        &select(
            &polarity,
            Some(&[
                "point-hit-trend",
                "nonpolar-power-config",
                "gauge-polar-points",
            ]),
        ),
        polarity.elapsed,
        600.0,
    ));

    let start = Instant::now();
    let mut same = true;
    let mut detail = vec![];
    for (pipeline, conf) in [
        (Pipeline::SmallBall, "small_ball.conf"),
        (Pipeline::Polarity, "polarity.conf"),
    ] {
        let again = rerun_binary(pipeline, conf, &second);
        let before = std::fs::read(first.join(format!("{}.csv", pipeline.name()))).unwrap();
        let equal = again == before;
        same &= equal;
        detail.push(format!(
            "{} {} bytes {}",
            pipeline.name(),
            before.len(),
            if equal { "identical" } else { "differ" }
        ));
    }
    record(Verdict {
        id: 11,
        title: "determinism of Monte Carlo reports",
        pass: same,
        detail: format!(
            "{}, {:.1} s",
            detail.join(", "),
            start.elapsed().as_secs_f64()
        ),
    });

    let failed: Vec<u32> = verdicts.iter().filter(|v| !v.pass).map(|v| v.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
