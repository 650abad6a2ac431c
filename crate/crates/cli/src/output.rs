use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Analysis,
    Simulation,
}

impl Source {
    fn as_str(self) -> &'static str {
        match self {
            Source::Analysis => "analysis",
            Source::Simulation => "simulation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub x: f64,
    pub algorithm: String,
    pub source: Source,
    pub value: f64,
    /// 95% interval; simulation rows only.
    pub ci: Option<(f64, f64)>,
}

pub const CSV_HEADER: &str = "x,algorithm,source,value,ci_low,ci_high";

/// Formats `v` with 6 significant digits, switching to exponent notation
/// outside `[1e-4, 1e6)`.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.5e}");
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        format!("{v:.decimals$}")
    } else {
        sci
    }
}

pub fn write_csv<W: Write>(rows: &[Row], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        let (lo, hi) = match r.ci {
            Some((lo, hi)) => (fmt_sig(lo), fmt_sig(hi)),
            None => (String::new(), String::new()),
        };
        writeln!(
            out,
            "{},{},{},{},{lo},{hi}",
            fmt_sig(r.x),
            r.algorithm,
            r.source.as_str(),
            fmt_sig(r.value)
        )?;
    }
    Ok(())
}

/// Gnuplot script drawing one series per (algorithm, source) pair found in
/// `rows`: lines for analysis, error bars for simulation.
pub fn gnuplot_script(csv_name: &str, png_name: &str, x_label: &str, y_label: &str, rows: &[Row]) -> String {
    let mut series: Vec<(&str, Source)> = Vec::new();
    for r in rows {
        if !series.contains(&(r.algorithm.as_str(), r.source)) {
            series.push((r.algorithm.as_str(), r.source));
        }
    }
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set terminal pngcairo size 900,600");
    let _ = writeln!(s, "set output '{png_name}'");
    let _ = writeln!(s, "set xlabel '{x_label}'");
    let _ = writeln!(s, "set ylabel '{y_label}'");
    let _ = writeln!(s, "set key outside right");
    let _ = writeln!(s, "set grid");
    let plots: Vec<String> = series
        .iter()
        .map(|(algo, src)| {
            let filter = format!("< grep ',{algo},{},' {csv_name}", src.as_str());
            match src {
                Source::Analysis => format!("\"{filter}\" using 1:4 with lines lw 2 title '{algo} analysis'"),
                Source::Simulation => {
                    format!("\"{filter}\" using 1:4:5:6 with yerrorlinespoints title '{algo} simulation'")
                }
            }
        })
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}

/// Paths of the artifacts of one experiment run.
pub struct Artifacts {
    pub csv: PathBuf,
    pub plot: PathBuf,
    pub manifest: PathBuf,
}

impl Artifacts {
    pub fn new(dir: &Path, experiment: &str) -> Self {
        Self {
            csv: dir.join(format!("{experiment}.csv")),
            plot: dir.join(format!("{experiment}.gp")),
            manifest: dir.join(format!("{experiment}.manifest.json")),
        }
    }
}
