//! Douglas-Peucker simplification for open chains and closed rings.

use super::polygon::{segment_distance, signed_area, Point, Polygon};

/// Indices of the vertices of an open chain retained at tolerance `tol`.
///
/// Endpoints are always kept. A span is split at its first vertex of maximal
/// distance to the segment joining the span's endpoints whenever that distance
/// exceeds `tol`.
pub fn simplify_chain_indices(points: &[Point], tol: f64) -> Vec<usize> {
    let n = points.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut keep = vec![false; n];
    keep[0] = true;
    keep[n - 1] = true;
    let mut spans = vec![(0usize, n - 1)];
    while let Some((first, last)) = spans.pop() {
        if last <= first + 1 {
            continue;
        }
        let (a, b) = (points[first], points[last]);
        let mut best = (first, -1.0f64);
        for (i, &p) in points.iter().enumerate().take(last).skip(first + 1) {
            let d = segment_distance(p, a, b);
            if d > best.1 {
                best = (i, d);
            }
        }
        if best.1 > tol {
            keep[best.0] = true;
            spans.push((best.0, last));
            spans.push((first, best.0));
        }
    }
    (0..n).filter(|&i| keep[i]).collect()
}

pub fn simplify_chain(points: &[Point], tol: f64) -> Vec<Point> {
    simplify_chain_indices(points, tol)
        .into_iter()
        .map(|i| points[i])
        .collect()
}

/// First pair `(i, j)`, `i < j`, of mutually farthest vertices.
fn farthest_pair(v: &[Point]) -> (usize, usize) {
    let mut best = (0, 1, -1.0f64);
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let d = v[i].dist2(v[j]);
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    (best.0, best.1)
}

/// Simplifies a closed ring.
///
/// The ring is split at its two mutually farthest vertices into two open
/// chains that are simplified independently. Retained vertices keep their
/// original cyclic order and ring orientation. If fewer than three vertices
/// survive, the maximal-area triangle over the input vertices is returned.
pub fn douglas_peucker(poly: &Polygon, tol: f64) -> Polygon {
    let v = poly.vertices();
    let n = v.len();
    if n <= 3 {
        return poly.clone();
    }
    let (i, j) = farthest_pair(v);
    let mut keep = vec![false; n];
    let forward: Vec<usize> = (i..=j).collect();
    let backward: Vec<usize> = (j..n).chain(0..=i).collect();
    for chain in [forward, backward] {
        let pts: Vec<Point> = chain.iter().map(|&k| v[k]).collect();
        for k in simplify_chain_indices(&pts, tol) {
            keep[chain[k]] = true;
        }
    }
    let mut kept: Vec<usize> = (0..n).filter(|&k| keep[k]).collect();
    if kept.len() < 3 {
        kept = max_area_triangle(v);
    }
    Polygon::new(kept.into_iter().map(|k| v[k]).collect(), poly.kind())
        .expect("subset of a valid ring with distinct consecutive vertices")
}

/// Indices (ascending) of the largest-area triangle; its corners lie on the
/// convex hull, so only hull vertices are searched.
fn max_area_triangle(v: &[Point]) -> Vec<usize> {
    let hull = convex_hull(v);
    let cand: &[usize] = if hull.len() >= 3 { &hull } else { &[0, 1, 2] };
    let mut best = ([cand[0], cand[1], cand[2]], -1.0f64);
    for a in 0..cand.len() {
        for b in a + 1..cand.len() {
            for c in b + 1..cand.len() {
                let tri = [v[cand[a]], v[cand[b]], v[cand[c]]];
                let area = signed_area(&tri).abs();
                if area > best.1 {
                    best = ([cand[a], cand[b], cand[c]], area);
                }
            }
        }
    }
    let mut idx = best.0.to_vec();
    idx.sort_unstable();
    idx
}

/// Andrew's monotone chain; returns vertex indices without collinear points.
fn convex_hull(v: &[Point]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| {
        v[a].x
            .total_cmp(&v[b].x)
            .then(v[a].y.total_cmp(&v[b].y))
            .then(a.cmp(&b))
    });
    order.dedup_by(|a, b| v[*a] == v[*b]);
    if order.len() < 3 {
        return order;
    }
    let cross = |o: Point, a: Point, b: Point| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    let mut hull: Vec<usize> = Vec::with_capacity(2 * order.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(order.iter())
        } else {
            Box::new(order.iter().rev())
        };
        for &k in iter {
            while hull.len() >= start + 2
                && cross(v[hull[hull.len() - 2]], v[hull[hull.len() - 1]], v[k]) <= 0.0
            {
                hull.pop();
            }
            hull.push(k);
        }
        hull.pop();
    }
    hull
}
