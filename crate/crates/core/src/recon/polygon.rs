use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist2(self, other: Point) -> f64 {
        (self.x - other.x).powi(2) + (self.y - other.y).powi(2)
    }
}

/// Distance from `p` to the closed segment `a-b`.
pub fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.dist2(a).sqrt();
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.dist2(Point::new(a.x + t * dx, a.y + t * dy)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingKind {
    /// Counter-clockwise (positive shoelace area).
    Outer,
    /// Clockwise.
    Hole,
}

/// Closed ring; the closing edge from the last vertex back to the first is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
    kind: RingKind,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>, kind: RingKind) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidValue(format!(
                "ring needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        let n = vertices.len();
        if (0..n).any(|i| vertices[i] == vertices[(i + 1) % n]) {
            return Err(Error::InvalidValue("ring has consecutive duplicate vertices".into()));
        }
        Ok(Polygon { vertices, kind })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn kind(&self) -> RingKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Shoelace area, positive for counter-clockwise rings.
    pub fn signed_area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    /// Edges as `(start, end)` pairs including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }
}

pub(crate) fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a.x * b.y - b.x * a.y
        })
        .sum::<f64>()
}

/// Outer ring of one building with its holes.
#[derive(Debug, Clone, PartialEq)]
pub struct Footprint {
    pub outer: Polygon,
    pub holes: Vec<Polygon>,
}

impl Footprint {
    pub fn rings(&self) -> impl Iterator<Item = &Polygon> {
        std::iter::once(&self.outer).chain(self.holes.iter())
    }

    pub fn vertex_count(&self) -> usize {
        self.rings().map(Polygon::len).sum()
    }
}
