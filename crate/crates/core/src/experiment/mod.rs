//! Config-driven experiment runs and parameter sweeps.

mod config;
mod plot;

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::Value;

pub use config::{ExperimentConfig, FamilyConfig, OutputConfig, ScheduleConfig};
pub use plot::render_svg;

use crate::bbm::{convergence_study, ConvergenceReport, Limit, Study, StudyOptions, Verdict};
use crate::error::{Error, Result};
use crate::field::sample;
use crate::geometry::sample_quadrature;

/// Exit status of a finished run.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: ConvergenceReport,
    pub exit_code: i32,
    /// Set when the verdict contradicts the config's expectation.
    pub mismatch: Option<String>,
    pub report_path: PathBuf,
}

/// Maps a verdict to an exit status: inconclusive is 2, a verdict that
/// contradicts `expect` is 1, anything else 0.
pub fn exit_code(verdict: Verdict, expect: Option<Verdict>) -> (i32, Option<String>) {
    if verdict == Verdict::Inconclusive {
        return (EXIT_INCONCLUSIVE, None);
    }
    match expect {
        Some(e) if e != verdict => (
            EXIT_ERROR,
            Some(format!("verdict {} does not match expected {}", verdict_name(verdict), verdict_name(e))),
        ),
        _ => (EXIT_OK, None),
    }
}

fn verdict_name(v: Verdict) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

/// Runs the convergence study of `cfg` and writes the report, the series CSV
/// and the plot under `out_dir`.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome> {
    cfg.validate()?;
    let grid = Arc::new(sample_quadrature(&cfg.domain, cfg.h, cfg.scheme)?);
    let field = sample(&cfg.function, &grid)?;
    let family = cfg.family()?;
    let schedule = cfg.schedule.resolve()?;
    let study = Study {
        field: &field,
        p: cfg.p,
        spec: &cfg.space,
        family: &family,
        domain: &cfg.domain,
        schedule: &schedule,
        mode: cfg.mode,
    };
    let opts = StudyOptions {
        stride: cfg.stride,
        tolerance: cfg.tolerance,
        check_routes: cfg.check_routes,
        ..StudyOptions::default()
    };
    let report = convergence_study(&study, &opts)?;

    fs::create_dir_all(out_dir)?;
    let report_path = out_dir.join(&cfg.output.report);
    fs::write(&report_path, report.to_json()?)?;
    report.write_series_csv(fs::File::create(out_dir.join(&cfg.output.series))?)?;
    fs::write(out_dir.join(&cfg.output.plot), render_svg(&report))?;

    let (exit_code, mismatch) = exit_code(report.verdict, cfg.expect);
    Ok(RunOutcome {
        report,
        exit_code,
        mismatch,
        report_path,
    })
}

/// One `key.path=v1|v2|...` sweep axis. Values are read as JSON where
/// possible and as bare strings otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Override {
    pub path: Vec<String>,
    pub values: Vec<Value>,
}

impl std::str::FromStr for Override {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (key, vals) = s.split_once('=').ok_or_else(|| Error::Config {
            field: s.to_string(),
            message: "override must look like key.path=v1|v2".into(),
        })?;
        let path: Vec<String> = key.trim().split('.').map(str::to_string).collect();
        if path.iter().any(String::is_empty) {
            return Err(Error::Config {
                field: key.to_string(),
                message: "empty key segment".into(),
            });
        }
        let values = vals
            .split('|')
            .map(|v| serde_json::from_str(v.trim()).unwrap_or_else(|_| Value::String(v.trim().to_string())))
            .collect();
        Ok(Override { path, values })
    }
}

impl Override {
    fn key(&self) -> String {
        self.path.join(".")
    }
}

fn set_path(root: &mut Value, path: &[String], value: Value) -> Result<()> {
    let key = path.join(".");
    let not_found = || Error::Config {
        field: key.clone(),
        message: "no such config key".into(),
    };
    let (last, parents) = path.split_last().ok_or_else(not_found)?;
    let mut node = root;
    for seg in parents {
        node = node.get_mut(seg.as_str()).ok_or_else(not_found)?;
    }
    // absent optional keys may be set as long as the parent record exists;
    // unknown names are rejected when the result is deserialized
    node.as_object_mut().ok_or_else(not_found)?.insert(last.clone(), value);
    Ok(())
}

/// One row of `summary.csv`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SweepRow {
    pub run: String,
    pub overrides: String,
    pub verdict: String,
    pub extrapolated_limit: String,
    pub target: String,
    pub relative_error: String,
    pub exit_code: i32,
    pub error: String,
}

/// The Cartesian product of the override axes applied to `base`, in
/// row-major order (last axis fastest). No axes gives the base alone.
pub fn expand(base: &ExperimentConfig, overrides: &[Override]) -> Result<Vec<(String, ExperimentConfig)>> {
    let base_value = serde_json::to_value(base)?;
    let mut combos: Vec<(Vec<String>, Value)> = vec![(Vec::new(), base_value)];
    for o in overrides {
        if o.values.is_empty() {
            return Err(Error::Config {
                field: o.key(),
                message: "no values".into(),
            });
        }
        let mut next = Vec::with_capacity(combos.len() * o.values.len());
        for (labels, v) in &combos {
            for val in &o.values {
                let mut v = v.clone();
                set_path(&mut v, &o.path, val.clone())?;
                let mut labels = labels.clone();
                labels.push(format!("{}={}", o.key(), val));
                next.push((labels, v));
            }
        }
        combos = next;
    }
    combos
        .into_iter()
        .map(|(labels, v)| {
            let label = labels.join(";");
            let cfg: ExperimentConfig = serde_json::from_value(v).map_err(|e| Error::Config {
                field: if label.is_empty() { "config".into() } else { label.clone() },
                message: e.to_string(),
            })?;
            Ok((label, cfg))
        })
        .collect()
}

/// Runs every combination with at most `jobs` runs in flight, each in its own
/// `run-NNN` directory under `out_dir`, and writes `summary.csv`.
pub fn sweep(base: &ExperimentConfig, overrides: &[Override], out_dir: &Path, jobs: usize) -> Result<Vec<SweepRow>> {
    let runs = expand(base, overrides)?;
    for (label, cfg) in &runs {
        cfg.validate().map_err(|e| match e {
            Error::Config { field, message } if !label.is_empty() => Error::Config {
                field,
                message: format!("{message} (in {label})"),
            },
            e => e,
        })?;
    }
    fs::create_dir_all(out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config {
            field: "jobs".into(),
            message: e.to_string(),
        })?;
    let rows: Vec<SweepRow> = pool.install(|| {
        runs.par_iter()
            .enumerate()
            .map(|(i, (label, cfg))| {
                let name = format!("run-{i:03}");
                let dir = out_dir.join(&name);
                let outcome = fs::create_dir_all(&dir)
                    .map_err(Error::from)
                    .and_then(|_| fs::write(dir.join("config.toml"), cfg.to_toml()).map_err(Error::from))
                    .and_then(|_| run(cfg, &dir));
                row(name, label.clone(), outcome)
            })
            .collect()
    });
    let mut w = csv::Writer::from_path(out_dir.join("summary.csv"))?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(rows)
}

fn row(run: String, overrides: String, outcome: Result<RunOutcome>) -> SweepRow {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    match outcome {
        Ok(o) => SweepRow {
            run,
            overrides,
            verdict: verdict_name(o.report.verdict),
            extrapolated_limit: match o.report.extrapolated_limit {
                Some(Limit::Finite(x)) => x.to_string(),
                Some(Limit::Marker(_)) => "diverging".into(),
                None => String::new(),
            },
            target: opt(o.report.target),
            relative_error: opt(o.report.relative_error),
            exit_code: o.exit_code,
            error: o.mismatch.unwrap_or_default(),
        },
        Err(e) => SweepRow {
            run,
            overrides,
            verdict: String::new(),
            extrapolated_limit: String::new(),
            target: String::new(),
            relative_error: String::new(),
            exit_code: EXIT_ERROR,
            error: e.to_string(),
        },
    }
}

/// Overall status of a sweep: 1 if any run failed, else 2 if any was
/// inconclusive, else 0.
pub fn sweep_exit_code(rows: &[SweepRow]) -> i32 {
    if rows.iter().any(|r| r.exit_code == EXIT_ERROR) {
        EXIT_ERROR
    } else if rows.iter().any(|r| r.exit_code == EXIT_INCONCLUSIVE) {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig::from_toml(
            r#"
p = 2.0
h = 0.01
[domain]
kind = "interval"
a = 0.0
b = 1.0
[function]
kind = "linear"
v = [1.0]
[space]
kind = "lebesgue"
q = 2.0
[family]
kind = "bump"
[schedule]
nu_start = 0.2
ratio = 0.5
count = 5
"#,
        )
        .unwrap()
    }

    #[test]
    fn override_parsing() {
        let o: Override = "p=1|2".parse().unwrap();
        assert_eq!(o.path, vec!["p"]);
        assert_eq!(o.values, vec![Value::from(1), Value::from(2)]);
        let o: Override = "mode=rdati|gagliardo".parse().unwrap();
        assert_eq!(o.values[1], Value::String("gagliardo".into()));
        let o: Override = r#"space={"kind":"lorentz","r":2,"tau":2}"#.parse().unwrap();
        assert_eq!(o.values.len(), 1);
        assert!("p".parse::<Override>().is_err());
    }

    #[test]
    fn expansion() {
        let b = base();
        assert_eq!(expand(&b, &[]).unwrap(), vec![(String::new(), b.clone())]);
        let o1: Override = "p=1|2".parse().unwrap();
        let o2: Override = "space.q=2|3|4".parse().unwrap();
        let runs = expand(&b, &[o1, o2]).unwrap();
        assert_eq!(runs.len(), 6);
        assert_eq!(runs[0].0, "p=1;space.q=2");
        assert_eq!(runs[5].1.p, 2.0);
        let bad: Override = "nope.x=1".parse().unwrap();
        assert!(expand(&b, &[bad]).is_err());
        let typo: Override = "pp=1".parse().unwrap();
        assert!(expand(&b, &[typo]).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(Verdict::Member, None).0, 0);
        assert_eq!(exit_code(Verdict::Member, Some(Verdict::Member)).0, 0);
        assert_eq!(exit_code(Verdict::NonMember, Some(Verdict::Member)).0, 1);
        assert_eq!(exit_code(Verdict::Inconclusive, Some(Verdict::Member)).0, 2);
    }
}
