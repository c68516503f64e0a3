//! Minimal SVG rendering of the CSV artifacts.

use std::fmt::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::{write_text, CsvTable};

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e"];

/// Plot kinds recognized from CSV headers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    Bifurcation,
    Sweep,
    Histogram,
    Trace,
    Spectrum,
    Classes,
    Regression,
    States,
}

pub fn detect_schema(header: &[String]) -> Result<PlotKind> {
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    let has = |c: &str| h.contains(&c);
    Ok(match h.as_slice() {
        ["param", "extremum_value"] => PlotKind::Bifurcation,
        ["t", "v_cd", "v_l"] => PlotKind::Trace,
        ["freq_hz", "magnitude"] => PlotKind::Spectrum,
        ["x", "y", "class"] => PlotKind::Classes,
        ["x", "y_teacher"] => PlotKind::Regression,
        _ if has("r_ohms") && has("v_center") && has("mean_nmse") => PlotKind::Sweep,
        ["case", ..] if has("nmse") => PlotKind::Histogram,
        ["t", rest @ ..] if !rest.is_empty() && rest.iter().all(|c| c.starts_with("ch_")) => PlotKind::States,
        _ => return Err(Error::UnknownSchema(header.join(","))),
    })
}

struct Axes {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    left: f64,
    top: f64,
    width: f64,
    height: f64,
}

impl Axes {
    fn fit(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let (x0, x1) = padded_range(xs);
        let (y0, y1) = padded_range(ys);
        Axes {
            x0,
            x1,
            y0,
            y1,
            left: LEFT,
            top: TOP,
            width: W - LEFT - RIGHT,
            height: H - TOP - BOTTOM,
        }
    }

    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x0) / (self.x1 - self.x0) * self.width
    }

    fn py(&self, y: f64) -> f64 {
        self.top + self.height - (y - self.y0) / (self.y1 - self.y0) * self.height
    }

    fn draw(&self, svg: &mut String, title: &str, xlabel: &str, ylabel: &str) {
        let (l, t, w, h) = (self.left, self.top, self.width, self.height);
        let _ = write!(
            svg,
            r#"<rect x="{l}" y="{t}" width="{w}" height="{h}" fill="none" stroke="black"/>"#
        );
        for v in ticks(self.x0, self.x1) {
            let x = self.px(v);
            let _ = write!(
                svg,
                r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{y1:.2}" stroke="black"/><text x="{x:.2}" y="{ty:.2}" font-size="11" text-anchor="middle">{v}</text>"#,
                y0 = t + h,
                y1 = t + h + 5.0,
                ty = t + h + 18.0,
                v = tick_label(v)
            );
        }
        for v in ticks(self.y0, self.y1) {
            let y = self.py(v);
            let _ = write!(
                svg,
                r#"<line x1="{x0:.2}" y1="{y:.2}" x2="{l:.2}" y2="{y:.2}" stroke="black"/><text x="{tx:.2}" y="{yy:.2}" font-size="11" text-anchor="end">{v}</text>"#,
                x0 = l - 5.0,
                tx = l - 8.0,
                yy = y + 4.0,
                v = tick_label(v)
            );
        }
        let _ = write!(
            svg,
            r#"<text x="{cx:.2}" y="18" font-size="14" text-anchor="middle">{title}</text><text x="{cx:.2}" y="{by:.2}" font-size="12" text-anchor="middle">{xlabel}</text><text x="16" y="{cy:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {cy:.2})">{ylabel}</text>"#,
            cx = l + w / 2.0,
            by = H - 10.0,
            cy = t + h / 2.0,
        );
    }
}

fn padded_range(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        let d = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - d, hi + d);
    }
    let pad = 0.03 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Round tick positions with a 1-2-5 step, about six per axis.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e5).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn open(extra_meta: &str) -> String {
    format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}"><metadata>{extra_meta}</metadata><rect width="100%" height="100%" fill="white"/>"#
    )
}

fn scatter(svg: &mut String, ax: &Axes, pts: &[(f64, f64)], color: &str, r: f64) {
    for &(x, y) in pts.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
        let _ = write!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{color}"/>"#,
            ax.px(x),
            ax.py(y)
        );
    }
}

fn polyline(svg: &mut String, ax: &Axes, xs: &[f64], ys: &[f64], color: &str) {
    let pts: Vec<String> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|(&x, &y)| format!("{:.2},{:.2}", ax.px(x), ax.py(y)))
        .collect();
    let _ = write!(
        svg,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1"/>"#,
        pts.join(" ")
    );
}

fn legend(svg: &mut String, names: &[&str]) {
    for (i, n) in names.iter().enumerate() {
        let y = TOP + 14.0 + 16.0 * i as f64;
        let x = W - RIGHT - 110.0;
        let _ = write!(
            svg,
            r#"<rect x="{x}" y="{:.1}" width="10" height="10" fill="{}"/><text x="{:.1}" y="{:.1}" font-size="11">{n}</text>"#,
            y - 9.0,
            PALETTE[i % PALETTE.len()],
            x + 14.0,
            y
        );
    }
}

/// Blue-to-yellow ramp for `t` in `[0, 1]`.
fn ramp(t: f64) -> String {
    let stops = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let t = t.clamp(0.0, 1.0) * (stops.len() - 1) as f64;
    let i = (t.floor() as usize).min(stops.len() - 2);
    let f = t - i as f64;
    let (a, b) = (stops[i], stops[i + 1]);
    format!(
        "rgb({:.0},{:.0},{:.0})",
        a.0 + f * (b.0 - a.0),
        a.1 + f * (b.1 - a.1),
        a.2 + f * (b.2 - a.2)
    )
}

fn col(t: &CsvTable, name: &str) -> Vec<f64> {
    t.column(name).unwrap_or_default()
}

fn sorted_unique(xs: &[f64]) -> Vec<f64> {
    let mut u = xs.to_vec();
    u.sort_by(f64::total_cmp);
    u.dedup();
    u
}

fn heatmap(t: &CsvTable) -> String {
    let masks: Vec<Option<f64>> = match t.column("n_mask") {
        Some(m) => sorted_unique(&m).into_iter().map(Some).collect(),
        None => vec![None],
    };
    let r = col(t, "r_ohms");
    let v = col(t, "v_center");
    let z = col(t, "mean_nmse");
    let uniq = sorted_unique;
    let (rs, vs) = (uniq(&r), uniq(&v));
    let (zmin, zmax) = z
        .iter()
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let panel_h = H;
    let total_h = panel_h * masks.len() as f64;
    let mut svg = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{total_h}" viewBox="0 0 {W} {total_h}"><metadata>{{"zmin":{zmin},"zmax":{zmax}}}</metadata><rect width="100%" height="100%" fill="white"/>"#
    );
    let mask_col = t.column("n_mask");
    for (p, m) in masks.iter().enumerate() {
        let _ = write!(svg, r#"<g transform="translate(0 {:.1})">"#, p as f64 * panel_h);
        let half_r = if rs.len() > 1 { 0.5 * (rs[1] - rs[0]) } else { 1.0 };
        let half_v = if vs.len() > 1 { 0.5 * (vs[1] - vs[0]) } else { 0.05 };
        let ax = Axes::fit(
            [rs[0] - half_r, rs[rs.len() - 1] + half_r].into_iter(),
            [vs[0] - half_v, vs[vs.len() - 1] + half_v].into_iter(),
        );
        let ax = Axes {
            width: W - LEFT - RIGHT - 60.0,
            ..ax
        };
        for k in 0..z.len() {
            if let (Some(mc), Some(m)) = (&mask_col, m) {
                if mc[k] != *m {
                    continue;
                }
            }
            let i = rs.iter().position(|&x| x == r[k]).unwrap_or(0);
            let j = vs.iter().position(|&x| x == v[k]).unwrap_or(0);
            let x0 = ax.px(rs[i] - half_r);
            let x1 = ax.px(rs[i] + half_r);
            let y0 = ax.py(vs[j] + half_v);
            let y1 = ax.py(vs[j] - half_v);
            let fill = if z[k].is_finite() {
                ramp(if zmax > zmin {
                    (z[k] - zmin) / (zmax - zmin)
                } else {
                    0.5
                })
            } else {
                "#bbbbbb".into()
            };
            let _ = write!(
                svg,
                r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="{fill}"><title>{}</title></rect>"#,
                x1 - x0,
                y1 - y0,
                z[k]
            );
        }
        let title = match m {
            Some(m) => format!("Mean NMSE, n_mask = {m}"),
            None => "Mean NMSE".to_string(),
        };
        ax.draw(&mut svg, &title, "R_variable (ohm)", "input window centre (V)");
        let bar_x = W - RIGHT - 40.0;
        for s in 0..20 {
            let f = s as f64 / 19.0;
            let y = TOP + (1.0 - f) * (ax.height - ax.height / 20.0);
            let _ = write!(
                svg,
                r#"<rect x="{bar_x}" y="{y:.2}" width="14" height="{:.2}" fill="{}"/>"#,
                ax.height / 20.0 + 0.5,
                ramp(f)
            );
        }
        let _ = write!(
            svg,
            r#"<text x="{bar_x}" y="{:.1}" font-size="10">{}</text><text x="{bar_x}" y="{:.1}" font-size="10">{}</text></g>"#,
            TOP - 4.0,
            tick_label(zmax),
            TOP + ax.height + 12.0,
            tick_label(zmin)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Ten equal bins from zero to the largest score.
pub fn histogram_bins(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let hi = values.iter().copied().filter(|x| x.is_finite()).fold(0.0, f64::max);
    let hi = if hi > 0.0 { hi } else { 1.0 };
    let n = 10;
    let edges: Vec<f64> = (0..=n).map(|i| hi * i as f64 / n as f64).collect();
    let mut counts = vec![0; n];
    for &v in values.iter().filter(|x| x.is_finite()) {
        let b = ((v / hi * n as f64) as usize).min(n - 1);
        counts[b] += 1;
    }
    (edges, counts)
}

fn histogram(t: &CsvTable) -> String {
    let nmse = col(t, "nmse");
    let (edges, counts) = histogram_bins(&nmse);
    let meta = serde_json::json!({ "bin_edges": edges, "counts": counts }).to_string();
    let mut svg = open(&meta);
    let top = counts.iter().copied().max().unwrap_or(1) as f64;
    let ax = Axes::fit([edges[0], edges[edges.len() - 1]].into_iter(), [0.0, top].into_iter());
    for (i, c) in counts.iter().enumerate() {
        let x0 = ax.px(edges[i]);
        let x1 = ax.px(edges[i + 1]);
        let y = ax.py(*c as f64);
        let _ = write!(
            svg,
            r##"<rect x="{x0:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="#1f77b4" stroke="white"/>"##,
            x1 - x0,
            ax.py(0.0) - y
        );
    }
    ax.draw(&mut svg, "Validation NMSE", "NMSE", "cases");
    svg.push_str("</svg>\n");
    svg
}

fn lines(t: &CsvTable, x: &str, ys: &[&str], title: &str, ylabel: &str) -> String {
    let xs = col(t, x);
    let series: Vec<Vec<f64>> = ys.iter().map(|c| col(t, c)).collect();
    let mut svg = open("");
    let ax = Axes::fit(xs.iter().copied(), series.iter().flatten().copied());
    for (i, s) in series.iter().enumerate() {
        polyline(&mut svg, &ax, &xs, s, PALETTE[i % PALETTE.len()]);
    }
    ax.draw(&mut svg, title, x, ylabel);
    if ys.len() > 1 {
        legend(&mut svg, ys);
    }
    svg.push_str("</svg>\n");
    svg
}

/// Render CSV text as an SVG document.
pub fn render_plot(csv: &str) -> Result<String> {
    let t = CsvTable::parse(csv)?;
    let kind = detect_schema(&t.header)?;
    Ok(match kind {
        PlotKind::Bifurcation => {
            let pts: Vec<(f64, f64)> = t.rows.iter().map(|r| (r[0], r[1])).collect();
            let mut svg = open("");
            let ax = Axes::fit(pts.iter().map(|p| p.0), pts.iter().map(|p| p.1));
            scatter(&mut svg, &ax, &pts, PALETTE[0], 1.2);
            ax.draw(&mut svg, "Bifurcation diagram", "parameter", "extremum (V)");
            svg.push_str("</svg>\n");
            svg
        }
        PlotKind::Sweep => heatmap(&t),
        PlotKind::Histogram => histogram(&t),
        PlotKind::Trace => lines(&t, "t", &["v_cd", "v_l"], "Tap voltages", "V"),
        PlotKind::Spectrum => lines(&t, "freq_hz", &["magnitude"], "Spectrum", "|X(f)|"),
        PlotKind::Regression => lines(&t, "x", &["y_teacher"], "Teacher", "y"),
        PlotKind::States => {
            let chans: Vec<&str> = t.header[1..].iter().take(4).map(String::as_str).collect();
            lines(&t, "t", &chans, "Demultiplexed channels", "V")
        }
        PlotKind::Classes => {
            let mut svg = open("");
            let ax = Axes::fit(t.rows.iter().map(|r| r[0]), t.rows.iter().map(|r| r[1]));
            for class in [0usize, 1] {
                let pts: Vec<(f64, f64)> = t
                    .rows
                    .iter()
                    .filter(|r| r[2] as usize == class)
                    .map(|r| (r[0], r[1]))
                    .collect();
                scatter(&mut svg, &ax, &pts, PALETTE[class], 2.0);
            }
            ax.draw(&mut svg, "Classes", "x", "y");
            legend(&mut svg, &["class 0", "class 1"]);
            svg.push_str("</svg>\n");
            svg
        }
    })
}

pub fn render_plot_file(csv_path: &Path, svg_path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(csv_path).map_err(|e| Error::io(csv_path, e))?;
    write_text(svg_path, &render_plot(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schemas() {
        let h = |s: &str| s.split(',').map(String::from).collect::<Vec<_>>();
        assert_eq!(
            detect_schema(&h("param,extremum_value")).unwrap(),
            PlotKind::Bifurcation
        );
        assert_eq!(detect_schema(&h("r_ohms,v_center,mean_nmse")).unwrap(), PlotKind::Sweep);
        assert_eq!(
            detect_schema(&h("n_mask,r_ohms,v_center,mean_nmse")).unwrap(),
            PlotKind::Sweep
        );
        assert_eq!(
            detect_schema(&h("case,target_0,estimate_0,nmse,zero_target")).unwrap(),
            PlotKind::Histogram
        );
        assert_eq!(detect_schema(&h("t,ch_0,ch_1")).unwrap(), PlotKind::States);
        assert!(matches!(detect_schema(&h("a,b")), Err(Error::UnknownSchema(_))));
    }

    #[test]
    fn histogram_metadata() {
        let csv = "case,target_0,estimate_0,nmse,zero_target\n0,1,1,0.0,0\n1,1,1.1,0.01,0\n2,1,2,1.0,0\n";
        let svg = render_plot(csv).unwrap();
        assert!(svg.contains(r#""bin_edges":[0.0,0.1"#));
        assert!(svg.contains(r#""counts":[2,0,0,0,0,0,0,0,0,1]"#));
    }

    #[test]
    fn renders_every_kind() {
        for csv in [
            "param,extremum_value\n1,0.5\n1,-0.5\n2,0.1\n",
            "r_ohms,v_center,mean_nmse\n1600,0.4,0.2\n1600,0.6,NaN\n1680,0.4,0.1\n1680,0.6,0.3\n",
            "t,v_cd,v_l\n0,0,1\n1,1,0\n",
            "freq_hz,magnitude\n0,1\n10,3\n",
            "x,y,class\n0,0,1\n2,0,0\n",
        ] {
            let svg = render_plot(csv).unwrap();
            assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        }
    }

    #[test]
    fn tick_steps() {
        assert_eq!(ticks(0.0, 1.0), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
    }
}
