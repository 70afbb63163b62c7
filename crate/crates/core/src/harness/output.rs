//! CSV and SVG writers for experiment reports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::ExperimentConfig;
use super::experiment::{fmt, MetricSeries, Report};
use crate::error::Result;

/// `algorithm,trial,activation,mae`, one row per trial and checkpoint.
pub fn trials_csv(report: &Report) -> String {
    let mut s = String::from("algorithm,trial,activation,mae\n");
    for ser in &report.series {
        for (t, vals) in ser.per_trial.iter().enumerate() {
            for (c, v) in ser.checkpoints.iter().zip(vals) {
                let _ = writeln!(s, "{},{t},{c},{}", ser.name, fmt(*v));
            }
        }
    }
    s
}

/// Mean and standard deviation per checkpoint.
pub fn summary_csv(report: &Report) -> String {
    let mut s = String::from("algorithm,activation,mae_mean,mae_std,diverged_trials\n");
    for ser in &report.series {
        let div = ser.diverged.iter().filter(|&&d| d).count();
        for c in 0..ser.checkpoints.len() {
            let _ = writeln!(s, "{},{},{},{},{div}", ser.name, ser.checkpoints[c], fmt(ser.mean[c]), fmt(ser.std[c]));
        }
    }
    s
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// Mean curves with a one-standard-deviation band on a log y axis.
pub fn svg(report: &Report) -> String {
    let (w, h, pad) = (800.0, 500.0, 60.0);
    let series: Vec<&MetricSeries> = report.series.iter().filter(|s| s.checkpoints.len() > 1).collect();
    let mut out = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">\n");
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    if series.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let floor = 1e-12;
    let x_max = series.iter().map(|s| *s.checkpoints.last().unwrap() as f64).fold(1.0, f64::max);
    let lo = series.iter().flat_map(|s| s.mean.iter().zip(&s.std).map(|(m, d)| (m - d).max(floor))).fold(f64::INFINITY, f64::min);
    let hi = series.iter().flat_map(|s| s.mean.iter().zip(&s.std).map(|(m, d)| (m + d).max(floor))).fold(floor, f64::max);
    let (ly0, ly1) = (lo.log10(), hi.log10().max(lo.log10() + 1e-9));
    let px = |x: f64| pad + (w - 2.0 * pad) * x / x_max;
    let py = |y: f64| h - pad - (h - 2.0 * pad) * (y.max(floor).log10() - ly0) / (ly1 - ly0);

    let _ = writeln!(out, "<line x1=\"{pad}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>", h - pad, w - pad, h - pad);
    let _ = writeln!(out, "<line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{}\" stroke=\"black\"/>", h - pad);
    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", w / 2.0, h - 15.0, report.x_label);
    let _ = writeln!(out, "<text x=\"{pad}\" y=\"{}\" font-size=\"11\">{:.1e}</text>", pad - 5.0, hi);
    let _ = writeln!(out, "<text x=\"{pad}\" y=\"{}\" font-size=\"11\">{:.1e}</text>", h - pad + 15.0, lo);

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let upper: Vec<String> =
            s.checkpoints.iter().zip(s.mean.iter().zip(&s.std)).map(|(&c, (m, d))| format!("{:.2},{:.2}", px(c as f64), py(m + d))).collect();
        let lower: Vec<String> = s
            .checkpoints
            .iter()
            .zip(s.mean.iter().zip(&s.std))
            .rev()
            .map(|(&c, (m, d))| format!("{:.2},{:.2}", px(c as f64), py(m - d)))
            .collect();
        let _ = writeln!(out, "<polygon points=\"{} {}\" fill=\"{color}\" fill-opacity=\"0.15\" stroke=\"none\"/>", upper.join(" "), lower.join(" "));
        let line: Vec<String> = s.checkpoints.iter().zip(&s.mean).map(|(&c, m)| format!("{:.2},{:.2}", px(c as f64), py(*m))).collect();
        let _ = writeln!(out, "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>", line.join(" "));
        let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" fill=\"{color}\" font-size=\"12\">{}</text>", w - pad - 150.0, pad + 15.0 * i as f64, s.name);
    }
    out.push_str("</svg>\n");
    out
}

/// Writes every artefact of `report` into `dir` and returns the paths.
pub fn write_report(report: &Report, cfg: &ExperimentConfig, dir: &Path, with_svg: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let cmd = report.command.name();
    let mut files: Vec<(String, String)> = vec![(format!("{cmd}_config.json"), cfg.to_json()?)];
    if !report.series.is_empty() {
        files.push((format!("{cmd}_trials.csv"), trials_csv(report)));
        files.push((format!("{cmd}_summary.csv"), summary_csv(report)));
        if with_svg {
            files.push((format!("{cmd}.svg"), svg(report)));
        }
    }
    for t in &report.tables {
        files.push((format!("{cmd}_{}.csv", t.name), t.to_csv()));
    }
    let mut paths = Vec::new();
    for (name, body) in files {
        let p = dir.join(name);
        fs::write(&p, body)?;
        paths.push(p);
    }
    Ok(paths)
}
