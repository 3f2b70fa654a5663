//! SVG pictures of the image of the state space inside the probability
//! simplex over phase points. Only images of dimension at most two are
//! drawn; the projection basis is built from image edges in vertex order so
//! the output is deterministic.

use std::fmt::Write as _;

use num_traits::ToPrimitive;

use wignerlab_core::exact::{sub, RationalMatrix};
use wignerlab_core::geometry::{Shape, StateSpace};
use wignerlab_core::wigner::WignerRep;

const SIZE: f64 = 800.0;
const MARGIN: f64 = 60.0;
const BALL_SAMPLES: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub enum Plot {
    Svg(String),
    /// The image has this many dimensions, more than a plane can show.
    TooManyDimensions(usize),
}

type Point = (f64, f64);

fn to_f64(values: &[wignerlab_core::exact::Rational]) -> Vec<f64> {
    values.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Adds `v` to an orthonormal basis when it is not already spanned.
fn extend(basis: &mut Vec<Vec<f64>>, v: &[f64]) {
    let mut r = v.to_vec();
    for b in basis.iter() {
        let c = dot(&r, b);
        r.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
    }
    let n = dot(&r, &r).sqrt();
    if n > 1e-9 {
        basis.push(r.into_iter().map(|x| x / n).collect());
    }
}

/// Sutherland–Hodgman clipping against `a·p + c >= 0`.
fn clip(polygon: &[Point], a: Point, c: f64) -> Vec<Point> {
    let side = |p: &Point| a.0 * p.0 + a.1 * p.1 + c;
    let mut out = Vec::new();
    for i in 0..polygon.len() {
        let (p, q) = (polygon[i], polygon[(i + 1) % polygon.len()]);
        let (sp, sq) = (side(&p), side(&q));
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp >= 0.0) != (sq >= 0.0) {
            let t = sp / (sp - sq);
            out.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
        }
    }
    out
}

/// Convex hull by the monotone chain, counter-clockwise.
fn hull(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort_by(|p, q| p.partial_cmp(q).expect("finite coordinates"));
    pts.dedup_by(|p, q| (p.0 - q.0).abs() < 1e-12 && (p.1 - q.1).abs() < 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Point, a: Point, b: Point| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Affine dimension of the image of the state space.
pub fn image_dimension(w: &WignerRep, space: &StateSpace) -> usize {
    let images = w.images(space.frame().points());
    let diffs: Vec<Vec<_>> = images[1..].iter().map(|p| sub(p, &images[0])).collect();
    RationalMatrix::from_rows(images[0].len(), &diffs).rank()
}

fn cell_label(w: &WignerRep, cell: usize) -> String {
    let (a, b) = (w.obs_a(), w.obs_b());
    format!("{},{}", a.outcomes()[cell / w.cols()], b.outcomes()[cell % w.cols()])
}

pub fn render(w: &WignerRep, space: &StateSpace, title: &str) -> Plot {
    let dim = image_dimension(w, space);
    if dim > 2 {
        return Plot::TooManyDimensions(dim);
    }
    let n = w.rows() * w.cols();
    let anchor_points: Vec<Vec<wignerlab_core::exact::Rational>> = match space.shape() {
        Shape::Polytope { vertices } => vertices.clone(),
        Shape::Ball { .. } => space.frame().points().to_vec(),
    };
    let images: Vec<Vec<f64>> = w.images(&anchor_points).iter().map(|p| to_f64(p)).collect();
    let origin = images[0].clone();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for p in &images[1..] {
        let d: Vec<f64> = p.iter().zip(&origin).map(|(x, y)| x - y).collect();
        extend(&mut basis, &d);
    }
    for j in 1..n {
        if basis.len() >= 2 {
            break;
        }
        let mut d = vec![0.0; n];
        d[j] = 1.0;
        d[0] = -1.0;
        extend(&mut basis, &d);
    }
    while basis.len() < 2 {
        basis.push(vec![0.0; n]);
    }
    let project = |p: &[f64]| -> Point {
        let d: Vec<f64> = p.iter().zip(&origin).map(|(x, y)| x - y).collect();
        (dot(&d, &basis[0]), dot(&d, &basis[1]))
    };

    // The slice of the simplex: o + s·u + t·v with every coordinate >= 0.
    let big = 4.0 * (n as f64).sqrt();
    let mut slice = vec![(-big, -big), (big, -big), (big, big), (-big, big)];
    for i in 0..n {
        slice = clip(&slice, (basis[0][i], basis[1][i]), origin[i]);
    }

    let image: Vec<Point> = match space.shape() {
        Shape::Polytope { .. } => hull(&images.iter().map(|p| project(p)).collect::<Vec<_>>()),
        Shape::Ball { center, radius } => {
            // Coefficients of the two projected coordinates in x.
            let grid = w.grid();
            let coeff = |u: &[f64]| -> Vec<f64> {
                (0..space.ambient_dim())
                    .map(|j| (0..n).map(|c| u[c] * grid[c].linear[j].to_f64().unwrap_or(0.0)).sum())
                    .collect()
            };
            let (cu, cv) = (coeff(&basis[0]), coeff(&basis[1]));
            let c = project(&to_f64(&w.evaluate_unchecked(center).into_entries()));
            let r = radius.to_f64().unwrap_or(0.0);
            (0..BALL_SAMPLES)
                .map(|k| {
                    let theta = 2.0 * std::f64::consts::PI * k as f64 / BALL_SAMPLES as f64;
                    let (e0, e1) = (theta.cos(), theta.sin());
                    let dir: Vec<f64> = cu.iter().zip(&cv).map(|(a, b)| e0 * a + e1 * b).collect();
                    let len = dot(&dir, &dir).sqrt();
                    if len < 1e-12 {
                        return c;
                    }
                    (c.0 + r * dot(&dir, &cu) / len, c.1 + r * dot(&dir, &cv) / len)
                })
                .collect()
        }
    };
    let deltas: Vec<Point> = (0..n)
        .map(|cell| {
            let mut d = vec![0.0; n];
            d[cell] = 1.0;
            project(&d)
        })
        .collect();

    let all: Vec<&Point> = slice.iter().chain(&image).chain(&deltas).collect();
    let (mut lo, mut hi) = ((f64::INFINITY, f64::INFINITY), (f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in &all {
        lo = (lo.0.min(p.0), lo.1.min(p.1));
        hi = (hi.0.max(p.0), hi.1.max(p.1));
    }
    let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-9);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let screen = |p: &Point| -> Point { (MARGIN + (p.0 - lo.0) * scale, SIZE - MARGIN - (p.1 - lo.1) * scale) };
    let path = |pts: &[Point]| -> String {
        pts.iter()
            .map(|p| {
                let s = screen(p);
                format!("{:.4},{:.4}", s.0, s.1)
            })
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(svg, "<title>{}</title>", escape(title));
    let _ = writeln!(svg, "<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<polygon class=\"simplex\" points=\"{}\" fill=\"#eef2f7\" stroke=\"#8899aa\"/>",
        path(&slice)
    );
    if image.len() >= 3 {
        let _ = writeln!(
            svg,
            "<polygon class=\"image\" points=\"{}\" fill=\"#4477aa\" fill-opacity=\"0.35\" stroke=\"#224466\"/>",
            path(&image)
        );
    } else if image.len() == 2 {
        let _ = writeln!(svg, "<polyline class=\"image\" points=\"{}\" stroke=\"#224466\" stroke-width=\"3\"/>", path(&image));
    } else if let Some(p) = image.first() {
        let s = screen(p);
        let _ = writeln!(svg, "<circle class=\"image\" cx=\"{:.4}\" cy=\"{:.4}\" r=\"6\" fill=\"#224466\"/>", s.0, s.1);
    }
    for (cell, d) in deltas.iter().enumerate() {
        let s = screen(d);
        let _ = writeln!(svg, "<circle class=\"delta\" cx=\"{:.4}\" cy=\"{:.4}\" r=\"4\" fill=\"#333333\"/>", s.0, s.1);
        let _ = writeln!(
            svg,
            "<text x=\"{:.4}\" y=\"{:.4}\" font-size=\"14\" font-family=\"sans-serif\">{}</text>",
            s.0 + 6.0,
            s.1 - 6.0,
            escape(&cell_label(w, cell))
        );
    }
    if let Shape::Polytope { vertices } = space.shape() {
        for (v, p) in vertices.iter().zip(&images) {
            let class = if w.evaluate_unchecked(v).is_nonnegative() { "vertex" } else { "outside" };
            let fill = if class == "vertex" { "#224466" } else { "#cc3311" };
            let s = screen(&project(p));
            let _ = writeln!(
                svg,
                "<circle class=\"{class}\" cx=\"{:.4}\" cy=\"{:.4}\" r=\"5\" fill=\"{fill}\"/>",
                s.0, s.1
            );
        }
    }
    svg.push_str("</svg>\n");
    Plot::Svg(svg)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
