use std::fmt::Write as _;
use std::path::Path;

use posterior_lab::diagnostics::{Param, Trajectory};
use posterior_lab::harness::read_trajectory_csv;

use crate::{CliError, PlotArgs};

type Result<T> = std::result::Result<T, CliError>;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 200.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;
const TICKS: usize = 5;

/// One line, optionally with a shaded `[lower, upper]` band.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub band: Option<(Vec<f64>, Vec<f64>)>,
}

/// A plain column, or a bracketed stem drawn as its midpoint over a band.
fn series_from(table: &Trajectory, name: &str, label: String) -> Option<Series> {
    let x: Vec<f64> = table.grid.iter().map(|&n| n as f64).collect();
    if let Some(j) = table.column_index(name) {
        let y = table.rows.iter().map(|r| r[j]).collect();
        return Some(Series {
            label,
            x,
            y,
            band: None,
        });
    }
    let lo = table.column_index(&format!("{name}.lower"))?;
    let hi = table.column_index(&format!("{name}.upper"))?;
    let lower: Vec<f64> = table.rows.iter().map(|r| r[lo]).collect();
    let upper: Vec<f64> = table.rows.iter().map(|r| r[hi]).collect();
    let y = lower.iter().zip(&upper).map(|(a, b)| 0.5 * (a + b)).collect();
    Some(Series {
        label,
        x,
        y,
        band: Some((lower, upper)),
    })
}

#[derive(Debug, Clone, Copy)]
struct Axis {
    log: bool,
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool, px_lo: f64, px_hi: f64) -> Option<Axis> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter_map(|v| transform(v, log)) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if lo > hi {
            return None;
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        Some(Axis {
            log,
            lo,
            hi,
            px_lo,
            px_hi,
        })
    }

    fn map(&self, v: f64) -> Option<f64> {
        let t = transform(v, self.log)?;
        Some(self.px_lo + (t - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo))
    }

    /// Tick positions in data units.
    fn ticks(&self) -> Vec<f64> {
        (0..TICKS)
            .map(|k| {
                let t = self.lo + (self.hi - self.lo) * k as f64 / (TICKS - 1) as f64;
                if self.log {
                    10f64.powf(t)
                } else {
                    t
                }
            })
            .collect()
    }
}

fn transform(v: f64, log: bool) -> Option<f64> {
    match (v.is_finite(), log) {
        (false, _) => None,
        (true, false) => Some(v),
        (true, true) if v > 0.0 => Some(v.log10()),
        _ => None,
    }
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e4).contains(&a) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Reference line with the label shown in the legend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefLine {
    pub value: Param,
}

pub struct Layout {
    pub width: f64,
    pub height: f64,
    pub log_x: bool,
    pub log_y: bool,
    pub title: Option<String>,
}

pub fn render(series: &[Series], reflines: &[RefLine], layout: &Layout) -> Result<String> {
    let (w, h) = (layout.width, layout.height);
    let (left, right) = (MARGIN_LEFT, w - MARGIN_RIGHT);
    let (top, bottom) = (MARGIN_TOP, h - MARGIN_BOTTOM);
    if right <= left || bottom <= top {
        return Err(CliError::Usage(format!("plot size {w}x{h} is too small")));
    }
    let xs = series.iter().flat_map(|s| s.x.iter().copied());
    let xa = Axis::fit(xs, layout.log_x, left, right).ok_or_else(|| CliError::Usage("no plottable x values".into()))?;
    let ys = series
        .iter()
        .flat_map(|s| {
            let band = s.band.iter().flat_map(|(a, b)| a.iter().chain(b));
            s.y.iter().chain(band).copied()
        })
        .chain(reflines.iter().map(|r| r.value.get()));
    // y grows downwards in SVG
    let ya = Axis::fit(ys, layout.log_y, bottom, top).ok_or_else(|| CliError::Usage("no plottable y values".into()))?;
    for r in reflines {
        if ya.map(r.value.get()).is_none() {
            return Err(CliError::Usage(format!(
                "reference line {} cannot be drawn on this axis",
                r.value
            )));
        }
    }

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
    if let Some(t) = &layout.title {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            (left + right) / 2.0,
            escape(t)
        );
    }

    // axes and ticks
    let _ = writeln!(out, r#"<g class="axes" stroke="black" stroke-width="1">"#);
    let _ = writeln!(
        out,
        r#"<line x1="{left:.2}" y1="{bottom:.2}" x2="{right:.2}" y2="{bottom:.2}"/>"#
    );
    let _ = writeln!(
        out,
        r#"<line x1="{left:.2}" y1="{top:.2}" x2="{left:.2}" y2="{bottom:.2}"/>"#
    );
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g class="ticks">"#);
    for t in xa.ticks() {
        let px = xa.map(t).unwrap_or(left);
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{bottom:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            bottom + 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            bottom + 18.0,
            tick_label(t)
        );
    }
    for t in ya.ticks() {
        let py = ya.map(t).unwrap_or(bottom);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{left:.2}" y2="{py:.2}" stroke="black"/>"#,
            left - 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 8.0,
            py + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">n</text>"#,
        (left + right) / 2.0,
        h - 10.0
    );

    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if let Some((lo, hi)) = &s.band {
            let mut upper = Vec::new();
            let mut lower = Vec::new();
            for i in 0..s.x.len() {
                if let (Some(px), Some(a), Some(b)) = (xa.map(s.x[i]), ya.map(lo[i]), ya.map(hi[i])) {
                    upper.push(format!("{px:.2},{b:.2}"));
                    lower.push(format!("{px:.2},{a:.2}"));
                }
            }
            lower.reverse();
            upper.extend(lower);
            let _ = writeln!(
                out,
                r#"<polygon class="band" points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
                upper.join(" ")
            );
        }
        let pts: Vec<String> =
            s.x.iter()
                .zip(&s.y)
                .filter_map(|(&x, &y)| Some(format!("{:.2},{:.2}", xa.map(x)?, ya.map(y)?)))
                .collect();
        let _ = writeln!(
            out,
            r#"<polyline class="series" points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
    }

    for r in reflines {
        let py = ya.map(r.value.get()).unwrap_or(bottom);
        let _ = writeln!(
            out,
            r#"<line class="refline" x1="{left:.2}" y1="{py:.2}" x2="{right:.2}" y2="{py:.2}" stroke="gray" stroke-dasharray="6 4"/>"#
        );
    }

    // legend
    let lx = right + 15.0;
    let _ = writeln!(out, r#"<g class="legend">"#);
    let mut ly = top + 10.0;
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="3"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(&s.label)
        );
        ly += 18.0;
    }
    for r in reflines {
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="gray" stroke-dasharray="6 4"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">y = {}</text>"#,
            lx + 26.0,
            ly + 4.0,
            r.value
        );
        ly += 18.0;
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    Ok(out)
}

fn label_for(path: &Path, column: &str, many_inputs: bool) -> String {
    if many_inputs {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        format!("{stem}: {column}")
    } else {
        column.to_string()
    }
}

pub fn plot(a: PlotArgs) -> Result<()> {
    let reflines = a
        .reflines
        .iter()
        .map(|r| {
            r.parse::<Param>()
                .ok()
                .filter(|p| p.get().is_finite())
                .map(|value| RefLine { value })
                .ok_or_else(|| CliError::Usage(format!("cannot parse reference line `{r}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let many = a.inputs.len() > 1;
    let mut series = Vec::new();
    for path in &a.inputs {
        let table = read_trajectory_csv(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if table.rows.is_empty() {
            return Err(CliError::Usage(format!("{}: trajectory is empty", path.display())));
        }
        for col in &a.columns {
            let s = series_from(&table, col, label_for(path, col, many))
                .ok_or_else(|| CliError::Usage(format!("{}: no column `{col}`", path.display())))?;
            series.push(s);
        }
    }
    let layout = Layout {
        width: a.width as f64,
        height: a.height as f64,
        log_x: a.log_x,
        log_y: a.log_y,
        title: a.title.clone(),
    };
    let svg = render(&series, &reflines, &layout)?;
    if let Some(parent) = a.out.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(&a.out, svg)?;
    log::info!("wrote {}", a.out.display());
    Ok(())
}
