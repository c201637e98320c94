use std::path::Path;

use log::info;
use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::experiment::run_experiment;
use super::plot::{emit_plot, PlotKind};
use super::record::{RunRecord, SweepSummary};
use crate::error::{Error, Result};

/// Cartesian product of the axis values, first axis slowest.
pub fn sweep_points(cfg: &ExperimentConfig) -> Result<Vec<Vec<f64>>> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::invalid("sweep", "required for kind `sweep`"))?;
    let mut points = vec![Vec::new()];
    for ax in &sweep.axes {
        let vals = ax.values();
        points = points
            .into_iter()
            .flat_map(|p| {
                vals.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    Ok(points)
}

fn tag<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|j| j.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn num(v: Option<f64>) -> String {
    v.map(crate::rd_sim::io::fmt_f64).unwrap_or_default()
}

const FIXED_COLUMNS: &[&str] = &[
    "status",
    "regime",
    "case_tag",
    "c1",
    "c2",
    "c3",
    "hat_c_nlp",
    "c1_measured",
    "c2_measured",
    "c3_measured",
    "zero_set_speed",
    "message",
];

fn row(k: usize, values: &[f64], res: &Result<RunRecord>) -> Vec<String> {
    let mut r = vec![k.to_string()];
    r.extend(values.iter().map(|&v| crate::rd_sim::io::fmt_f64(v)));
    let rec = match res {
        Ok(rec) => rec,
        Err(e) => {
            r.push("error".into());
            r.extend(std::iter::repeat_n(String::new(), FIXED_COLUMNS.len() - 2));
            r.push(e.to_string());
            return r;
        }
    };
    r.push(if rec.pass { "pass" } else { "fail" }.into());
    let rep = rec.report.as_ref();
    r.push(rep.map(|x| tag(&x.regime)).unwrap_or_default());
    r.push(rep.and_then(|x| x.case_tag).map(|c| tag(&c)).unwrap_or_default());
    r.push(num(rep.map(|x| x.c1)));
    r.push(num(rep.and_then(|x| x.c2)));
    r.push(num(rep.and_then(|x| x.c3)));
    r.push(num(rep.and_then(|x| x.hat_c_nlp)));
    for name in ["v_right", "u_right", "v_left"] {
        r.push(num(rec.measured.iter().find(|m| m.name == name).map(|m| m.measured)));
    }
    r.push(num(rec.hj.as_ref().map(|h| h.zero_set_speed)));
    r.push(String::new());
    r
}

/// Runs every sweep point in parallel, each into its own `point_NNNN`
/// directory, then writes the index `sweep.csv`.
///
/// A failing point is recorded in the index and does not stop the others.
pub(crate) fn run_sweep(
    cfg: &ExperimentConfig,
    rec: &mut RunRecord,
    dir: Option<&Path>,
) -> Result<()> {
    let sweep = cfg.sweep.as_ref().expect("validated");
    let points = sweep_points(cfg)?;
    info!("sweep of {} {} points", points.len(), sweep.base.as_str());
    let results: Vec<Result<RunRecord>> = points
        .par_iter()
        .enumerate()
        .map(|(k, values)| {
            let mut c = cfg.clone();
            c.kind = sweep.base;
            c.sweep = None;
            c.output_dir = dir.map(|d| d.join(format!("point_{k:04}")));
            for (ax, &v) in sweep.axes.iter().zip(values) {
                c = c.with_param(&ax.param, v)?;
            }
            run_experiment(&c)
        })
        .collect();

    let mut headers: Vec<String> = vec!["point".into()];
    headers.extend(sweep.axes.iter().map(|a| a.param.clone()));
    headers.extend(FIXED_COLUMNS.iter().map(|s| s.to_string()));
    let rows: Vec<Vec<String>> = results
        .iter()
        .enumerate()
        .map(|(k, r)| row(k, &points[k], r))
        .collect();

    rec.sweep = Some(SweepSummary {
        points: points.len(),
        failed: results.iter().filter(|r| matches!(r, Ok(x) if !x.pass)).count(),
        errored: results.iter().filter(|r| r.is_err()).count(),
    });

    if let Some(dir) = dir {
        let path = dir.join("sweep.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(&headers)?;
        for r in &rows {
            w.write_record(r)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        rec.artifacts.push("sweep.csv".into());
        emit_plot(&path, PlotKind::SpeedCurve, &dir.join("speed_curve.svg"))?;
        rec.artifacts.push("speed_curve.svg".into());
        for (k, r) in results.iter().enumerate() {
            if r.is_ok() {
                rec.artifacts.push(format!("point_{k:04}/report.json"));
            }
        }
    }
    Ok(())
}
