//! CSV and SVG emitters for series trajectories.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use qdsim_core::dynamics::Trajectory;

use crate::error::{CliError, Result};

fn columns_of<'a, S>(traj: &'a Trajectory<S>, columns: &[String]) -> Result<Vec<&'a [f64]>> {
    if traj.is_empty() {
        return Err(CliError::Output("empty trajectory".into()));
    }
    columns
        .iter()
        .map(|c| traj.series(c).ok_or_else(|| CliError::Output(format!("no series `{c}`"))))
        .collect()
}

/// Writes `t,<columns...>` rows with 17 significant digits and LF endings.
pub fn write_csv<S>(traj: &Trajectory<S>, columns: &[String], w: &mut impl Write) -> Result<()> {
    let data = columns_of(traj, columns)?;
    let mut text = String::with_capacity(traj.len() * 24 * (columns.len() + 1));
    text.push('t');
    for c in columns {
        text.push(',');
        text.push_str(c);
    }
    text.push('\n');
    for (i, t) in traj.times().iter().enumerate() {
        write!(text, "{t:.16e}").expect("writing to a String");
        for col in &data {
            write!(text, ",{:.16e}", col[i]).expect("writing to a String");
        }
        text.push('\n');
    }
    w.write_all(text.as_bytes())
        .map_err(|e| CliError::Output(format!("writing CSV: {e}")))
}

pub fn emit_csv<S>(traj: &Trajectory<S>, columns: &[String], path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_csv(traj, columns, &mut buf)?;
    fs::write(path, buf).map_err(CliError::io(path))
}

/// What to draw in an SVG line plot.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub columns: Vec<String>,
    pub x_label: String,
    /// Logarithmic time axis; samples with `t ≤ 0` are dropped.
    pub log_t: bool,
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 44.0;
const BOTTOM: f64 = 56.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Step of roughly `span/5` from the 1–2–5 sequence.
fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let f = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    f * mag
}

fn linear_ticks(lo: f64, hi: f64) -> Vec<(f64, String)> {
    let step = nice_step(hi - lo);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last)
        .map(|k| {
            let v = k as f64 * step;
            (v, format!("{:.*}", decimals, if v == 0.0 { 0.0 } else { v }))
        })
        .collect()
}

fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// Renders a static line plot. Deterministic for a given input.
pub fn render_svg<S>(traj: &Trajectory<S>, spec: &PlotSpec) -> Result<String> {
    let data = columns_of(traj, &spec.columns)?;
    let keep: Vec<usize> = (0..traj.len()).filter(|&i| !spec.log_t || traj.times()[i] > 0.0).collect();
    if keep.len() < traj.len() {
        log::warn!(
            "log time axis: dropped {} sample(s) with t <= 0",
            traj.len() - keep.len()
        );
    }
    if keep.is_empty() {
        return Err(CliError::Output("no samples with t > 0 for a logarithmic axis".into()));
    }
    let xs: Vec<f64> = keep
        .iter()
        .map(|&i| if spec.log_t { traj.times()[i].log10() } else { traj.times()[i] })
        .collect();
    let (x_lo, x_hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let (x_lo, x_hi) = if x_hi > x_lo { (x_lo, x_hi) } else { (x_lo - 0.5, x_hi + 0.5) };
    let (y_lo, y_hi) = data
        .iter()
        .flat_map(|col| keep.iter().map(move |&i| col[i]))
        .filter(|y| y.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
    if !y_lo.is_finite() {
        return Err(CliError::Output("no finite values to plot".into()));
    }
    let (y_lo, y_hi) = padded_range(y_lo, y_hi);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&spec.title)
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#333"/>"##
    );

    let x_ticks: Vec<(f64, String)> = if spec.log_t {
        (x_lo.ceil() as i64..=x_hi.floor() as i64).map(|k| (k as f64, format!("1e{k}"))).collect()
    } else {
        linear_ticks(x_lo, x_hi)
    };
    for (x, label) in &x_ticks {
        let px = sx(*x);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{TOP}" stroke="#ddd"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP + plot_h,
            TOP + plot_h + 18.0,
            escape(label)
        );
    }
    for (y, label) in linear_ticks(y_lo, y_hi) {
        let py = sy(y);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            py + 4.0,
            escape(&label)
        );
    }
    let x_label = if spec.log_t { format!("{} (log scale)", spec.x_label) } else { spec.x_label.clone() };
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 14.0,
        escape(&x_label)
    );

    for (k, (name, col)) in spec.columns.iter().zip(&data).enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let mut points = String::new();
        for (x, &i) in xs.iter().zip(&keep) {
            if col[i].is_finite() {
                let _ = write!(points, "{:.2},{:.2} ", sx(*x), sy(col[i]));
            }
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            points.trim_end()
        );
        let ly = TOP + 14.0 + 20.0 * k as f64;
        let lx = LEFT + plot_w + 14.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 22.0,
            lx + 28.0,
            ly + 4.0,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_svg<S>(traj: &Trajectory<S>, spec: &PlotSpec, path: &Path) -> Result<()> {
    let svg = render_svg(traj, spec)?;
    fs::write(path, svg).map_err(CliError::io(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize) -> Trajectory<()> {
        let mut t = Trajectory::new();
        for i in 0..n {
            t.push(i as f64 * 0.5, ()).unwrap();
        }
        t.insert_series("a", (0..n).map(|i| i as f64 / 3.0).collect()).unwrap();
        t
    }

    #[test]
    fn test_three_samples_give_four_lines() {
        let mut buf = Vec::new();
        write_csv(&sample(3), &["a".to_string()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(!text.contains('\r'));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,a");
        assert_eq!(lines[2], "5.0000000000000000e-1,3.3333333333333331e-1");
        // Full precision: values read back exactly.
        let v: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v, 1.0 / 3.0);
    }

    #[test]
    fn test_empty_trajectory_is_an_error() {
        let t: Trajectory<()> = Trajectory::new();
        assert!(write_csv(&t, &[], &mut Vec::new()).is_err());
        let spec = PlotSpec {
            title: "x".into(),
            columns: vec![],
            x_label: "t".into(),
            log_t: false,
        };
        assert!(render_svg(&t, &spec).is_err());
        assert!(write_csv(&sample(2), &["b".to_string()], &mut Vec::new()).is_err());
    }

    #[test]
    fn test_log_axis_drops_origin() {
        let spec = PlotSpec {
            title: "a <b>".into(),
            columns: vec!["a".into()],
            x_label: "t".into(),
            log_t: true,
        };
        let svg = render_svg(&sample(5), &spec).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("a &lt;b&gt;"));
        let points = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(points.split(' ').count(), 4);
        assert!(render_svg(&sample(1), &spec).is_err());
    }

    #[test]
    fn test_ticks() {
        assert_eq!(nice_step(10.0), 2.0);
        let t = linear_ticks(-0.05, 1.05);
        assert_eq!(t.first().unwrap().1, "0.0");
        assert_eq!(t.last().unwrap().1, "1.0");
    }
}
