//! Minimal SVG charts.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 56.0;
const PALETTE: [&str; 8] = ["#1b6ca8", "#d1495b", "#edae49", "#00798c", "#66a182", "#8d6a9f", "#30638e", "#a23b72"];

pub fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x.0) / (self.x.1 - self.x.0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y.0) / (self.y.1 - self.y.0) * (H - 2.0 * PAD)
    }

    fn open(&self, title: &str, xlabel: &str, ylabel: &str) -> String {
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" font-family=\"sans-serif\" font-size=\"12\">\n\
<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n\
<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n\
<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n\
<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
            W / 2.0,
            escape(title),
            W - 2.0 * PAD,
            H - 2.0 * PAD,
            W / 2.0,
            H - 14.0,
            escape(xlabel),
            H / 2.0,
            H / 2.0,
            escape(ylabel)
        );
        for (v, anchor) in [(self.x.0, "start"), (self.x.1, "end")] {
            let _ = writeln!(s, "<text x=\"{:.1}\" y=\"{}\" text-anchor=\"{anchor}\">{v:.3}</text>", self.px(v), H - PAD + 16.0);
        }
        for v in [self.y.0, self.y.1] {
            let _ = writeln!(s, "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{v:.3}</text>", PAD - 4.0, self.py(v) + 4.0);
        }
        s
    }
}

/// Points are `(x, y, series)`.
pub fn scatter(title: &str, xlabel: &str, ylabel: &str, points: &[(f64, f64, usize)]) -> String {
    let frame = Frame {
        x: range(points.iter().map(|p| p.0)),
        y: range(points.iter().map(|p| p.1)),
    };
    let mut s = frame.open(title, xlabel, ylabel);
    for &(x, y, series) in points {
        let _ = writeln!(
            s,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{}\" fill-opacity=\"0.7\"/>",
            frame.px(x),
            frame.py(y),
            color(series)
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn bars(title: &str, ylabel: &str, bars: &[(String, f64)]) -> String {
    let frame = Frame {
        x: (0.0, bars.len().max(1) as f64),
        y: range(bars.iter().map(|b| b.1).chain([0.0])),
    };
    let mut s = frame.open(title, "", ylabel);
    for (i, (label, v)) in bars.iter().enumerate() {
        let (x0, x1) = (frame.px(i as f64 + 0.15), frame.px(i as f64 + 0.85));
        let (y0, y1) = (frame.py(v.max(0.0)), frame.py(0.0f64.min(*v)));
        let _ = writeln!(
            s,
            "<rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
            x1 - x0,
            (y1 - y0).max(0.5),
            color(i)
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            (x0 + x1) / 2.0,
            H - PAD + 30.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// One polyline per curve, coloured by group.
pub fn curves(title: &str, grid: &[f64], lines: &[(usize, &[f64])]) -> String {
    let frame = Frame {
        x: range(grid.iter().copied()),
        y: (0.0, 1.05),
    };
    let mut s = frame.open(title, "h", "P_GS");
    for &(group, ys) in lines {
        let pts: Vec<String> = grid
            .iter()
            .zip(ys)
            .map(|(&x, &y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
            .collect();
        let _ = writeln!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-opacity=\"0.6\"/>",
            pts.join(" "),
            color(group)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Force-directed drawing; nodes coloured by energy rank, `highlight` drawn larger.
pub fn network(title: &str, nodes: &[(u64, f64)], edges: &[(usize, usize, u64)], highlight: &[u64]) -> String {
    let n = nodes.len();
    let mut pos: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let a = i as f64 / n.max(1) as f64 * std::f64::consts::TAU;
            (a.cos(), a.sin())
        })
        .collect();
    let k = (4.0 / n.max(1) as f64).sqrt();
    let mut temp = 0.1;
    for _ in 0..300 {
        let mut disp = vec![(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (dx, dy) = (pos[i].0 - pos[j].0, pos[i].1 - pos[j].1);
                let d = (dx * dx + dy * dy).sqrt().max(1e-6);
                let f = k * k / d;
                disp[i].0 += dx / d * f;
                disp[i].1 += dy / d * f;
            }
        }
        for &(a, b, _) in edges {
            let (dx, dy) = (pos[a].0 - pos[b].0, pos[a].1 - pos[b].1);
            let d = (dx * dx + dy * dy).sqrt().max(1e-6);
            let f = d * d / k;
            disp[a].0 -= dx / d * f;
            disp[a].1 -= dy / d * f;
            disp[b].0 += dx / d * f;
            disp[b].1 += dy / d * f;
        }
        for (p, d) in pos.iter_mut().zip(&disp) {
            let len = (d.0 * d.0 + d.1 * d.1).sqrt().max(1e-12);
            p.0 += d.0 / len * len.min(temp);
            p.1 += d.1 / len * len.min(temp);
        }
        temp *= 0.985;
    }
    let frame = Frame {
        x: range(pos.iter().map(|p| p.0)),
        y: range(pos.iter().map(|p| p.1)),
    };
    let mut s = frame.open(title, "", "");
    let max_mult = edges.iter().map(|e| e.2).max().unwrap_or(1) as f64;
    for &(a, b, m) in edges {
        let _ = writeln!(
            s,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#888\" stroke-width=\"{:.2}\"/>",
            frame.px(pos[a].0),
            frame.py(pos[a].1),
            frame.px(pos[b].0),
            frame.py(pos[b].1),
            0.5 + 3.0 * m as f64 / max_mult
        );
    }
    let mut energies: Vec<f64> = nodes.iter().map(|n| n.1).collect();
    energies.sort_by(f64::total_cmp);
    energies.dedup();
    for (i, &(state, e)) in nodes.iter().enumerate() {
        let rank = energies.iter().position(|&x| x == e).unwrap_or(0);
        let r = if highlight.contains(&state) { 7.0 } else { 4.0 };
        let _ = writeln!(
            s,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{r}\" fill=\"{}\"><title>{state} (E = {e})</title></circle>",
            frame.px(pos[i].0),
            frame.py(pos[i].1),
            color(rank)
        );
    }
    s.push_str("</svg>\n");
    s
}
