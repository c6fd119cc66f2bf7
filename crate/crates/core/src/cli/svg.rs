//! Deterministic SVG for rank-2 complexes, weightings and stratifications.

use std::collections::BTreeMap;
use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::CliError;
use crate::kweight::{KWeighting, Stratification};
use crate::lattice::{Rat, RatVector};
use crate::polyhedral::{PolyhedralComplex, Polyhedron};

pub enum RenderInput<'a> {
    Complex(&'a PolyhedralComplex),
    Weighted(&'a KWeighting),
    Strata(&'a Stratification),
}

/// Axis-aligned box [x0,x1] × [y0,y1].
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub x0: Rat,
    pub y0: Rat,
    pub x1: Rat,
    pub y1: Rat,
}

impl Window {
    pub fn parse(s: &str) -> Result<Window, CliError> {
        let parts: Vec<Rat> = s
            .split(',')
            .map(|p| p.trim().parse::<Rat>().map_err(|_| CliError::Input(format!("bad window coordinate {p:?}"))))
            .collect::<Result<_, _>>()?;
        if parts.len() != 4 || parts[0] >= parts[2] || parts[1] >= parts[3] {
            return Err(CliError::Input("window must be x0,y0,x1,y1 with x0<x1, y0<y1".into()));
        }
        Ok(Window { x0: parts[0].clone(), y0: parts[1].clone(), x1: parts[2].clone(), y1: parts[3].clone() })
    }

    /// Vertices of the complex padded by one unit (so rays stay visible).
    fn around(g: &PolyhedralComplex) -> Window {
        let pts: Vec<&RatVector> = g.cells().iter().flat_map(|c| c.poly.vertices()).collect();
        let one = Rat::from_integer(BigInt::from(1));
        if pts.is_empty() {
            return Window { x0: -one.clone(), y0: -one.clone(), x1: one.clone(), y1: one };
        }
        let min = |i: usize| pts.iter().map(|p| p.entries[i].clone()).min().unwrap();
        let max = |i: usize| pts.iter().map(|p| p.entries[i].clone()).max().unwrap();
        Window { x0: min(0) - &one, y0: min(1) - &one, x1: max(0) + &one, y1: max(1) + &one }
    }

    fn polygon(&self) -> Polyhedron {
        let c = |x: &Rat, y: &Rat| RatVector::new(vec![x.clone(), y.clone()]);
        Polyhedron::new(
            2,
            vec![c(&self.x0, &self.y0), c(&self.x1, &self.y0), c(&self.x0, &self.y1), c(&self.x1, &self.y1)],
            vec![],
        )
        .expect("nonempty box")
    }
}

const SIZE: f64 = 400.0;
const PALETTE: [&str; 8] = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948", "#b07aa1", "#9c755f"];

fn color_for(w: &BigInt, classes: &BTreeMap<BigInt, usize>) -> &'static str {
    if w.is_zero() {
        return "#dddddd";
    }
    PALETTE[classes[w] % PALETTE.len()]
}

fn fmt(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Counterclockwise order of a convex polygon's vertices.
fn ccw(vs: &[RatVector]) -> Vec<RatVector> {
    let n = Rat::from_integer(BigInt::from(vs.len()));
    let cx: Rat = vs.iter().map(|v| v.entries[0].clone()).sum::<Rat>() / &n;
    let cy: Rat = vs.iter().map(|v| v.entries[1].clone()).sum::<Rat>() / &n;
    let mut out = vs.to_vec();
    out.sort_by(|a, b| {
        let (ax, ay) = (&a.entries[0] - &cx, &a.entries[1] - &cy);
        let (bx, by) = (&b.entries[0] - &cx, &b.entries[1] - &cy);
        let half = |x: &Rat, y: &Rat| if y.is_positive() || (y.is_zero() && x.is_positive()) { 0 } else { 1 };
        half(&ax, &ay).cmp(&half(&bx, &by)).then_with(|| {
            let cross = &ax * &by - &ay * &bx;
            Rat::zero().cmp(&cross)
        })
    });
    out
}

pub fn render_svg(input: RenderInput, window: Option<&Window>) -> Result<String, CliError> {
    let (g, labels, strata): (&PolyhedralComplex, Option<Vec<BigInt>>, Option<&Stratification>) = match input {
        RenderInput::Complex(g) => (g, None, None),
        RenderInput::Weighted(k) => (k.complex(), Some(k.weights().to_vec()), None),
        RenderInput::Strata(s) => (s.complex(), Some((0..s.complex().len()).map(|c| s.weight(s.stratum_of(c)).clone()).collect()), Some(s)),
    };
    if g.rank() != 2 {
        return Err(CliError::UnsupportedRank(g.rank()));
    }
    let win = window.cloned().unwrap_or_else(|| Window::around(g));
    let bx = win.polygon();
    let w = (&win.x1 - &win.x0).to_f64().unwrap();
    let h = (&win.y1 - &win.y0).to_f64().unwrap();
    let scale = SIZE / w.max(h);
    let (x0, y1) = (win.x0.to_f64().unwrap(), win.y1.to_f64().unwrap());
    let px = |p: &RatVector| (fmt((p.entries[0].to_f64().unwrap() - x0) * scale), fmt((y1 - p.entries[1].to_f64().unwrap()) * scale));

    let mut classes: BTreeMap<BigInt, usize> = BTreeMap::new();
    if let Some(l) = &labels {
        for x in l.iter().filter(|x| !x.is_zero()) {
            let n = classes.len();
            classes.entry(x.clone()).or_insert(n);
        }
    }
    // one label per stratum, placed on its highest-dimensional first cell
    let labelled: Vec<bool> = match strata {
        Some(s) => {
            let mut out = vec![false; g.len()];
            for cells in s.strata() {
                let best = cells.iter().copied().max_by_key(|&c| (g.cell_dim(c), std::cmp::Reverse(c))).unwrap();
                out[best] = true;
            }
            out
        }
        None => vec![labels.is_some(); g.len()],
    };

    let mut out = String::new();
    let (cw, ch) = (fmt(w * scale), fmt(h * scale));
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{cw}" height="{ch}" viewBox="0 0 {cw} {ch}">"#).unwrap();
    let mut text = String::new();
    for dim in (0..=2).rev() {
        for i in (0..g.len()).filter(|&i| g.cell_dim(i) == dim) {
            let Some(clip) = g.poly(i).intersection(&bx) else { continue };
            let wt = labels.as_ref().map(|l| l[i].clone()).unwrap_or_default();
            let color = if labels.is_some() { color_for(&wt, &classes) } else { "#333333" };
            let id = g.id(i);
            match (dim, clip.dim()) {
                (2, 2) => {
                    let pts: Vec<String> = ccw(clip.vertices()).iter().map(|p| {
                        let (a, b) = px(p);
                        format!("{a},{b}")
                    }).collect();
                    writeln!(out, r#"<polygon data-cell="{id}" points="{}" fill="{color}" fill-opacity="0.35" stroke="none"/>"#, pts.join(" ")).unwrap();
                }
                (1, 1) => {
                    let vs = clip.vertices();
                    let ((a, b), (c, d)) = (px(&vs[0]), px(&vs[vs.len() - 1]));
                    writeln!(out, r#"<line data-cell="{id}" x1="{a}" y1="{b}" x2="{c}" y2="{d}" stroke="{color}" stroke-width="2"/>"#).unwrap();
                }
                (0, 0) => {
                    let (a, b) = px(&clip.vertices()[0]);
                    writeln!(out, r#"<circle data-cell="{id}" cx="{a}" cy="{b}" r="3" fill="{color}"/>"#).unwrap();
                }
                _ => continue,
            }
            if labelled[i] {
                let (a, b) = px(&clip.relint_point());
                writeln!(text, r#"<text x="{a}" y="{b}" font-size="12" font-family="sans-serif">{wt}</text>"#).unwrap();
            }
        }
    }
    out.push_str(&text);
    out.push_str("</svg>\n");
    Ok(out)
}
