//! Text formats: dataset CSV input, scenario and sampler TOML, and the CSV
//! and JSON outputs.
//!
//! All floats are written with 17 significant digits so that files round
//! trip exactly.

use std::io::Write;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::gibbs::{ChainConfig, Draw, PosteriorDraws, PosteriorSummary};
use crate::rank::{Dataset, Label};
use crate::simulate::{LatentModel, Missingness, Scenario, StudyReport, Transform};
use crate::trinormal::SurfacePoint;

/// Formats `v` with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Parses a dataset with header `measurement,label`.
///
/// Labels are the integers 0, 1, 2 (verified classes) and 3 (unverified).
/// Errors carry the 1-based line number of the offending row.
pub fn parse_dataset_csv(text: &str) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| csv_error(e, 1))?;
    if headers.len() != 2 || &headers[0] != "measurement" || &headers[1] != "label" {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `measurement,label`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut s = Vec::new();
    let mut l = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(e, 0))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 fields, found {}", rec.len()),
            });
        }
        let v: f64 = rec[0].parse().map_err(|_| Error::Parse {
            line,
            message: format!("measurement `{}` is not a number", &rec[0]),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                line,
                message: format!("measurement `{}` is not finite", &rec[0]),
            });
        }
        let label = rec[1]
            .parse::<u8>()
            .ok()
            .and_then(Label::from_code)
            .ok_or_else(|| Error::Parse {
                line,
                message: format!("label `{}` is not one of 0, 1, 2, 3", &rec[1]),
            })?;
        s.push(v);
        l.push(label);
    }
    if s.len() < 3 {
        return Err(Error::InsufficientData(format!("need at least 3 rows, found {}", s.len())));
    }
    Dataset::new(s, l)
}

fn csv_error(e: csv::Error, fallback: usize) -> Error {
    let line = e.position().map_or(fallback, |p| p.line() as usize);
    Error::Parse { line, message: e.to_string() }
}

pub fn write_dataset_csv<W: Write>(mut w: W, d: &Dataset) -> Result<()> {
    writeln!(w, "measurement,label")?;
    for (s, l) in d.s.iter().zip(&d.l) {
        writeln!(w, "{},{}", fmt_f64(*s), l.code())?;
    }
    Ok(())
}

/// On-disk scenario schema: the scenario fields plus an optional
/// `[chain]` table.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    group_sizes: [usize; 3],
    latent: LatentModel,
    #[serde(default)]
    transform: Transform,
    #[serde(default)]
    missingness: Missingness,
    #[serde(default = "default_replicates")]
    replicates: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    chain: ChainConfig,
}

fn default_replicates() -> usize {
    20
}

/// Names the field a TOML error refers to, taken from the first
/// backquoted token of the message when there is one.
fn toml_error(e: toml::de::Error) -> Error {
    let msg = e.message().trim().to_string();
    let key = msg
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "<document>".to_string());
    Error::Config { key, message: msg }
}

/// Parses a scenario file, validating both the scenario and its sampler
/// settings.
pub fn parse_scenario_toml(text: &str) -> Result<(Scenario, ChainConfig)> {
    let f: ScenarioFile = toml::from_str(text).map_err(toml_error)?;
    let sc = Scenario {
        group_sizes: f.group_sizes,
        latent: f.latent,
        transform: f.transform,
        missingness: f.missingness,
        replicates: f.replicates,
        seed: f.seed,
    };
    sc.validate()?;
    f.chain.validate().map_err(|e| match e {
        Error::Config { key, message } => Error::Config { key: format!("chain.{key}"), message },
        e => e,
    })?;
    Ok((sc, f.chain))
}

/// Parses standalone sampler settings; omitted keys take their defaults.
pub fn parse_chain_config_toml(text: &str) -> Result<ChainConfig> {
    let cfg: ChainConfig = toml::from_str(text).map_err(toml_error)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn write_surface_csv<W: Write>(mut w: W, grid: &[SurfacePoint]) -> Result<()> {
    writeln!(w, "x,y,z")?;
    for p in grid {
        writeln!(w, "{},{},{}", fmt_f64(p.x), fmt_f64(p.y), fmt_f64(p.z))?;
    }
    Ok(())
}

/// Writes every recorded iteration of one chain, burn-in rows first.
pub fn write_trace_csv<W: Write>(mut w: W, draws: &PosteriorDraws) -> Result<()> {
    writeln!(w, "iter,mu1,sigma1,mu2,sigma2,a,b,c,d,lambda0,lambda1,lambda2,vus,burnin")?;
    let row = |w: &mut W, d: &Draw, burn: u8| -> Result<()> {
        let vals = [
            d.params.mu1,
            d.params.sigma1,
            d.params.mu2,
            d.params.sigma2,
            d.surface.a,
            d.surface.b,
            d.surface.c,
            d.surface.d,
            d.lambda[0],
            d.lambda[1],
            d.lambda[2],
            d.vus,
        ];
        write!(w, "{}", d.iter)?;
        for v in vals {
            write!(w, ",{}", fmt_f64(v))?;
        }
        writeln!(w, ",{burn}")?;
        Ok(())
    };
    for d in &draws.burn_in {
        row(&mut w, d, 1)?;
    }
    for d in &draws.draws {
        row(&mut w, d, 0)?;
    }
    Ok(())
}

pub fn write_report_csv<W: Write>(mut w: W, rep: &StudyReport) -> Result<()> {
    writeln!(w, "estimand,bias,bias_mcse,mse,mse_mcse,replicates,failures")?;
    for r in &rep.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.estimand,
            fmt_f64(r.bias),
            fmt_f64(r.bias_mcse),
            fmt_f64(r.mse),
            fmt_f64(r.mse_mcse),
            r.replicates,
            r.failures
        )?;
    }
    Ok(())
}

/// Human-readable study report.
pub fn format_report_text(rep: &StudyReport) -> String {
    let mut out = format!(
        "replicates: {}  failures: {}  mean verified fraction: {:.4}\n",
        rep.replicates, rep.failures, rep.mean_verified_fraction
    );
    out.push_str(&format!(
        "{:<8} {:>10} {:>10} {:>10} {:>10}\n",
        "estimand", "bias", "(mcse)", "mse", "(mcse)"
    ));
    for r in &rep.rows {
        out.push_str(&format!(
            "{:<8} {:>10.5} {:>10.5} {:>10.5} {:>10.5}\n",
            r.estimand, r.bias, r.bias_mcse, r.mse, r.mse_mcse
        ));
    }
    for (i, m) in &rep.failure_messages {
        out.push_str(&format!("replicate {i} failed: {m}\n"));
    }
    out
}

/// `summary.json` contents.
pub fn summary_json(summary: &PosteriorSummary, n_unverified: usize, n_tied: usize, seed: u64) -> Result<String> {
    let mut v = serde_json::to_value(summary).map_err(|e| Error::Io(e.to_string()))?;
    let obj = v.as_object_mut().expect("summary serializes to an object");
    obj.insert("n_unverified".into(), n_unverified.into());
    obj.insert("n_tied".into(), n_tied.into());
    obj.insert("seed".into(), seed.into());
    serde_json::to_string_pretty(&v).map_err(|e| Error::Io(e.to_string()))
}
