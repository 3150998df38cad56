//! Dots and lines in the (degree, filtration) plane, with SVG and TikZ
//! emitters. Degree increases from right to left.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use kuengine_core::ass::SpectralSequenceRun;
use kuengine_core::chart::{Chart, Dot, EdgeKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DotStyle {
    Solid,
    Dashed,
    Killed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrawDot {
    pub degree: i64,
    pub s: u32,
    pub label: String,
    pub style: DotStyle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LineKind {
    V,
    H0,
    Exotic,
    Differential { r: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrawLine {
    pub from: usize,
    pub to: usize,
    #[serde(flatten)]
    pub kind: LineKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Drawing {
    pub title: String,
    pub window: [i64; 2],
    pub dots: Vec<DrawDot>,
    pub lines: Vec<DrawLine>,
}

fn in_window(n: i64, w: [i64; 2]) -> bool {
    n >= w[0] && n <= w[1]
}

impl Drawing {
    /// The dots of `chart` with degree in `window`, v-lines between
    /// neighbouring levels and the p-edges whose ends are both drawn. Dots
    /// whose (degree, filtration, label) also occur in `minus` are solid and
    /// the rest dashed; without `minus` all are solid.
    pub fn from_chart(chart: &Chart, title: &str, window: [i64; 2], minus: Option<&Chart>) -> Self {
        let keep: Option<BTreeSet<(i64, u32, String)>> = minus.map(|m| {
            m.towers()
                .iter()
                .enumerate()
                .flat_map(|(t, tw)| (0..tw.height).map(move |a| Dot::new(t, a)))
                .map(|d| (m.dot_degree(d), m.dot_filtration(d), m.describe(d)))
                .collect()
        });
        let mut d = Drawing { title: title.to_string(), window, dots: Vec::new(), lines: Vec::new() };
        let mut index: BTreeMap<Dot, usize> = BTreeMap::new();
        for (t, tw) in chart.towers().iter().enumerate() {
            let mut prev: Option<usize> = None;
            for a in 0..tw.height {
                let dot = Dot::new(t, a);
                let n = chart.dot_degree(dot);
                if !in_window(n, window) {
                    prev = None;
                    continue;
                }
                let s = chart.dot_filtration(dot);
                let label = chart.describe(dot);
                let style = match &keep {
                    Some(k) if !k.contains(&(n, s, label.clone())) => DotStyle::Dashed,
                    _ => DotStyle::Solid,
                };
                let i = d.dots.len();
                d.dots.push(DrawDot { degree: n, s, label, style });
                index.insert(dot, i);
                if let Some(j) = prev {
                    d.lines.push(DrawLine { from: j, to: i, kind: LineKind::V });
                }
                prev = Some(i);
            }
        }
        for e in chart.edges() {
            let Some(&from) = index.get(&e.src) else { continue };
            for t in &e.dst {
                if let Some(&to) = index.get(&t.dot) {
                    let kind = match t.kind {
                        EdgeKind::H0 => LineKind::H0,
                        EdgeKind::Exotic => LineKind::Exotic,
                    };
                    d.lines.push(DrawLine { from, to, kind });
                }
            }
        }
        d
    }

    /// E_2 classes of the run's page in `window` and filtration `<= s_max`,
    /// those killed by a differential marked, with a line from each killed
    /// source to its target.
    pub fn from_run(run: &SpectralSequenceRun, title: &str, window: [i64; 2], s_max: u32) -> Self {
        let page = &run.e_infinity;
        let p = page.prime();
        let vd = p.v_degree();
        let (_, _, page_s) = page.window();
        let mut d = Drawing { title: title.to_string(), window, dots: Vec::new(), lines: Vec::new() };
        let mut index: BTreeMap<(usize, u32), usize> = BTreeMap::new();
        let mut killed: BTreeSet<(usize, u32)> = BTreeSet::new();
        for diff in &run.differentials {
            for b in 0..=page_s {
                let (src, tgt) = ((diff.source, b), (diff.target, b + diff.shift));
                if !page.is_alive(src.0, src.1) && !page.is_alive(tgt.0, tgt.1) {
                    killed.insert(src);
                    killed.insert(tgt);
                }
            }
        }
        for (ti, t) in page.towers().iter().enumerate() {
            let mut prev: Option<usize> = None;
            for b in 0..=page_s {
                let n = t.degree - vd * b as i64;
                let s = t.filtration + b;
                let exists = t.height.is_none_or(|h| b < h);
                let shown = page.is_alive(ti, b) || killed.contains(&(ti, b));
                if !exists || s > s_max || !in_window(n, window) || !shown {
                    prev = None;
                    continue;
                }
                let i = d.dots.len();
                d.dots.push(DrawDot {
                    degree: n,
                    s,
                    label: t.label(p, b),
                    style: if page.is_alive(ti, b) { DotStyle::Solid } else { DotStyle::Killed },
                });
                index.insert((ti, b), i);
                if let Some(j) = prev {
                    d.lines.push(DrawLine { from: j, to: i, kind: LineKind::V });
                }
                prev = Some(i);
            }
        }
        for diff in &run.differentials {
            for b in 0..=page_s {
                let src = (diff.source, b);
                let tgt = (diff.target, b + diff.shift);
                if let (Some(&from), Some(&to)) = (index.get(&src), index.get(&tgt)) {
                    if killed.contains(&src) && killed.contains(&tgt) {
                        d.lines.push(DrawLine { from, to, kind: LineKind::Differential { r: diff.r } });
                    }
                }
            }
        }
        d
    }

    fn s_max(&self) -> u32 {
        self.dots.iter().map(|d| d.s).max().unwrap_or(0)
    }

    /// Position of each dot in chart units, dots sharing a bidegree spread
    /// horizontally.
    fn layout(&self) -> Vec<(f64, f64)> {
        let mut groups: BTreeMap<(i64, u32), Vec<usize>> = BTreeMap::new();
        for (i, d) in self.dots.iter().enumerate() {
            groups.entry((d.degree, d.s)).or_default().push(i);
        }
        let widest = groups.values().map(Vec::len).max().unwrap_or(1) as f64;
        let spread = (0.8 / widest).min(0.22);
        let mut pos = vec![(0.0, 0.0); self.dots.len()];
        for ((n, s), ids) in groups {
            let m = ids.len() as f64;
            for (k, i) in ids.into_iter().enumerate() {
                let off = (k as f64 - (m - 1.0) / 2.0) * spread;
                pos[i] = ((self.window[1] - n) as f64 + off, s as f64);
            }
        }
        pos
    }

    fn widest(&self) -> usize {
        let mut groups: BTreeMap<(i64, u32), usize> = BTreeMap::new();
        for d in &self.dots {
            *groups.entry((d.degree, d.s)).or_insert(0) += 1;
        }
        groups.into_values().max().unwrap_or(1)
    }

    pub fn to_svg(&self) -> String {
        let sx = 18f64.max(7.0 * self.widest() as f64);
        const SY: f64 = 18.0;
        const PAD: f64 = 36.0;
        let width = (self.window[1] - self.window[0]) as f64 * sx + 2.0 * PAD;
        let top = self.s_max() as f64;
        let height = top * SY + 2.0 * PAD;
        let at = |(x, y): (f64, f64)| (PAD + x * sx, PAD + (top - y) * SY);
        let pos = self.layout();
        let mut o = String::new();
        let _ = writeln!(
            o,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1}" height="{height:.1}" viewBox="0 0 {width:.1} {height:.1}">"#
        );
        let _ = writeln!(o, "<title>{}</title>", xml_escape(&self.title));
        let _ = writeln!(o, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let axis_y = PAD + top * SY + 14.0;
        let step = tick_step(self.window[1] - self.window[0]);
        let first = self.window[0].div_euclid(step) * step;
        let mut n = first;
        while n <= self.window[1] {
            if n >= self.window[0] {
                let x = PAD + (self.window[1] - n) as f64 * sx;
                let _ =
                    writeln!(o, r#"<text x="{x:.1}" y="{axis_y:.1}" font-size="9" text-anchor="middle">{n}</text>"#);
            }
            n += step;
        }
        for s in 0..=self.s_max() {
            let (_, y) = at((0.0, s as f64));
            let _ = writeln!(
                o,
                r#"<text x="{:.1}" y="{:.1}" font-size="9" text-anchor="end">{s}</text>"#,
                PAD - 12.0,
                y + 3.0
            );
        }
        for l in &self.lines {
            let (x1, y1) = at(pos[l.from]);
            let (x2, y2) = at(pos[l.to]);
            let (color, extra) = match l.kind {
                LineKind::V => ("#555555", ""),
                LineKind::H0 => ("#000000", ""),
                LineKind::Exotic => ("#d62728", ""),
                LineKind::Differential { .. } => ("#1f5fbf", r#" stroke-dasharray="3,2""#),
            };
            let _ = writeln!(
                o,
                r#"<line x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}" stroke="{color}" stroke-width="1"{extra}/>"#
            );
        }
        for (d, &p) in self.dots.iter().zip(&pos) {
            let (x, y) = at(p);
            let style = match d.style {
                DotStyle::Solid => r#"fill="black""#,
                DotStyle::Dashed => r#"fill="white" stroke="black" stroke-dasharray="1.5,1""#,
                DotStyle::Killed => r##"fill="white" stroke="#888888""##,
            };
            let _ = writeln!(
                o,
                r#"<circle cx="{x:.1}" cy="{y:.1}" r="2.6" {style}><title>{} ({}, {})</title></circle>"#,
                xml_escape(&d.label),
                d.degree,
                d.s
            );
        }
        o.push_str("</svg>\n");
        o
    }

    pub fn to_tikz(&self) -> String {
        let pos = self.layout();
        let mut o = String::new();
        let _ = writeln!(o, "% {}", self.title);
        o.push_str("\\begin{tikzpicture}[x=0.35cm,y=0.35cm]\n");
        let step = tick_step(self.window[1] - self.window[0]);
        let mut n = self.window[0].div_euclid(step) * step;
        while n <= self.window[1] {
            if n >= self.window[0] {
                let _ = writeln!(o, "\\node[font=\\tiny] at ({}, -1) {{{n}}};", self.window[1] - n);
            }
            n += step;
        }
        for l in &self.lines {
            let (x1, y1) = pos[l.from];
            let (x2, y2) = pos[l.to];
            let opts = match l.kind {
                LineKind::V => "gray",
                LineKind::H0 => "black",
                LineKind::Exotic => "red",
                LineKind::Differential { .. } => "blue, dashed",
            };
            let _ = writeln!(o, "\\draw[{opts}] ({x1:.2}, {y1:.2}) -- ({x2:.2}, {y2:.2});");
        }
        for (d, &(x, y)) in self.dots.iter().zip(&pos) {
            let cmd = match d.style {
                DotStyle::Solid => "\\fill",
                DotStyle::Dashed => "\\draw[densely dotted, fill=white]",
                DotStyle::Killed => "\\draw[gray, fill=white]",
            };
            let _ = writeln!(o, "{cmd} ({x:.2}, {y:.2}) circle (0.12); % {}", d.label);
        }
        o.push_str("\\end{tikzpicture}\n");
        o
    }
}

fn tick_step(span: i64) -> i64 {
    match span {
        ..=40 => 2,
        41..=120 => 10,
        _ => 20,
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
