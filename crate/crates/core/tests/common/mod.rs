//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use latentprobe::graphcut::{grid_edges, EnergyModel, Label};
use latentprobe::recon::Point;

/// Energy computed straight from the model accessors.
pub fn energy(model: &EnergyModel, labels: &[Label]) -> f64 {
    let mut e: f64 = labels
        .iter()
        .enumerate()
        .map(|(p, &l)| model.unary(p, l))
        .sum();
    let (w, h) = model.dims();
    for (i, (p, q)) in grid_edges(w, h).into_iter().enumerate() {
        e += model.pairwise(i, labels[p], labels[q]);
    }
    e
}

/// Exhaustive minimum over all `L^n` labelings: `(energy, labeling)`, the
/// first minimum in lexicographic order.
pub fn brute_force(model: &EnergyModel) -> (f64, Vec<Label>) {
    let n = model.num_pixels();
    let l = model.num_labels();
    let total = l.pow(n as u32);
    let mut best = (f64::INFINITY, Vec::new());
    let mut labels = vec![0 as Label; n];
    for code in 0..total {
        let mut c = code;
        for slot in labels.iter_mut().rev() {
            *slot = (c % l) as Label;
            c /= l;
        }
        let e = energy(model, &labels);
        if e < best.0 {
            best = (e, labels.clone());
        }
    }
    best
}

fn perpendicular(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return ((p.x - a.x).powi(2) + (p.y - a.y).powi(2)).sqrt();
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    ((p.x - a.x - t * dx).powi(2) + (p.y - a.y - t * dy).powi(2)).sqrt()
}

/// Textbook recursive Douglas-Peucker on an open chain: splits at the first
/// farthest point when it lies strictly beyond `tol`.
pub fn dp_recursive(points: &[Point], tol: f64) -> Vec<usize> {
    fn rec(points: &[Point], lo: usize, hi: usize, tol: f64, keep: &mut Vec<usize>) {
        let mut best = (0.0, lo);
        for i in lo + 1..hi {
            let d = perpendicular(points[i], points[lo], points[hi]);
            if d > best.0 {
                best = (d, i);
            }
        }
        if best.0 > tol {
            rec(points, lo, best.1, tol, keep);
            keep.push(best.1);
            rec(points, best.1, hi, tol, keep);
        }
    }
    if points.len() < 2 {
        return (0..points.len()).collect();
    }
    let mut keep = vec![0];
    rec(points, 0, points.len() - 1, tol, &mut keep);
    keep.push(points.len() - 1);
    keep
}

/// Largest distance from any dropped point to the kept segment spanning it.
pub fn max_deviation(points: &[Point], kept: &[usize]) -> f64 {
    kept.windows(2)
        .flat_map(|w| (w[0] + 1..w[1]).map(move |i| (i, w[0], w[1])))
        .map(|(i, a, b)| perpendicular(points[i], points[a], points[b]))
        .fold(0.0, f64::max)
}
