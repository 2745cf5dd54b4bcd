//! Boundary tracing on the pixel-corner lattice.
//!
//! Every pixel side separating the component from the outside becomes a unit
//! edge oriented with the component on its right-hand side in image
//! coordinates (y down), which makes outer rings counter-clockwise by the
//! shoelace sign and holes clockwise. Edges are then chained into rings.
//! Where two component pixels touch only at a corner, the chain turns left so
//! that diagonal neighbors stay on one ring, matching 8-connectivity.

use super::components::Component;
use super::polygon::{signed_area, Footprint, Point, Polygon, RingKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dir {
    East,
    South,
    West,
    North,
}

impl Dir {
    fn step(self) -> (i64, i64) {
        match self {
            Dir::East => (1, 0),
            Dir::South => (0, 1),
            Dir::West => (-1, 0),
            Dir::North => (0, -1),
        }
    }

    /// Preference when leaving a vertex after arriving along `self`:
    /// left turn, straight, right turn.
    fn preference(self) -> [Dir; 3] {
        match self {
            Dir::East => [Dir::North, Dir::East, Dir::South],
            Dir::South => [Dir::East, Dir::South, Dir::West],
            Dir::West => [Dir::South, Dir::West, Dir::North],
            Dir::North => [Dir::West, Dir::North, Dir::East],
        }
    }
}

/// Outgoing unit edges per lattice vertex of the padded bounding box.
struct EdgeTable {
    // vertex grid is (w + 1) x (h + 1) over the bbox, origin at (ox, oy)
    w: usize,
    ox: i64,
    oy: i64,
    out: Vec<[Option<Dir>; 2]>,
    used: Vec<[bool; 2]>,
}

impl EdgeTable {
    fn vertex(&self, x: i64, y: i64) -> usize {
        ((y - self.oy) as usize) * (self.w + 1) + (x - self.ox) as usize
    }

    fn push(&mut self, x: i64, y: i64, dir: Dir) {
        let v = self.vertex(x, y);
        let slot = if self.out[v][0].is_none() { 0 } else { 1 };
        debug_assert!(self.out[v][slot].is_none());
        self.out[v][slot] = Some(dir);
    }

    fn coords(&self, v: usize) -> (i64, i64) {
        (
            (v % (self.w + 1)) as i64 + self.ox,
            (v / (self.w + 1)) as i64 + self.oy,
        )
    }
}

/// Traces the outer ring and hole rings of a nonempty component.
pub fn trace_boundary(component: &Component) -> Footprint {
    assert!(!component.pixels.is_empty(), "cannot trace an empty component");
    let b = component.bbox;
    let (bw, bh) = (b.width(), b.height());
    let mut inside = vec![false; bw * bh];
    for &(x, y) in &component.pixels {
        inside[(y - b.min_y) * bw + (x - b.min_x)] = true;
    }
    let is_in = |x: i64, y: i64| -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < bw
            && (y as usize) < bh
            && inside[y as usize * bw + x as usize]
    };

    let mut table = EdgeTable {
        w: bw,
        ox: b.min_x as i64,
        oy: b.min_y as i64,
        out: vec![[None, None]; (bw + 1) * (bh + 1)],
        used: vec![[false, false]; (bw + 1) * (bh + 1)],
    };
    for ly in 0..bh as i64 {
        for lx in 0..bw as i64 {
            if !is_in(lx, ly) {
                continue;
            }
            let (x, y) = (lx + table.ox, ly + table.oy);
            if !is_in(lx, ly - 1) {
                table.push(x, y, Dir::East);
            }
            if !is_in(lx + 1, ly) {
                table.push(x + 1, y, Dir::South);
            }
            if !is_in(lx, ly + 1) {
                table.push(x + 1, y + 1, Dir::West);
            }
            if !is_in(lx - 1, ly) {
                table.push(x, y + 1, Dir::North);
            }
        }
    }

    let mut rings: Vec<Vec<Point>> = Vec::new();
    for start in 0..table.out.len() {
        for slot in 0..2 {
            if table.out[start][slot].is_none() || table.used[start][slot] {
                continue;
            }
            rings.push(walk(&mut table, start, slot));
        }
    }

    let mut outer = None;
    let mut holes = Vec::new();
    for ring in rings {
        let ring = elide_collinear(ring);
        let area = signed_area(&ring);
        if area > 0.0 {
            debug_assert!(outer.is_none(), "8-connected component has one outer ring");
            outer = Some(Polygon::new(ring, RingKind::Outer).expect("lattice ring is valid"));
        } else {
            holes.push(Polygon::new(ring, RingKind::Hole).expect("lattice ring is valid"));
        }
    }
    Footprint {
        outer: outer.expect("nonempty component has an outer ring"),
        holes,
    }
}

fn walk(table: &mut EdgeTable, start: usize, start_slot: usize) -> Vec<Point> {
    let mut ring = Vec::new();
    let mut v = start;
    let mut slot = start_slot;
    loop {
        table.used[v][slot] = true;
        let dir = table.out[v][slot].expect("slot holds an edge");
        let (x, y) = table.coords(v);
        ring.push(Point::new(x as f64, y as f64));
        let (dx, dy) = dir.step();
        let next = table.vertex(x + dx, y + dy);

        let mut chosen = None;
        for want in dir.preference() {
            for s in 0..2 {
                if table.out[next][s] != Some(want) {
                    continue;
                }
                let closes = next == start && s == start_slot;
                if !table.used[next][s] || closes {
                    chosen = Some((s, closes));
                    break;
                }
            }
            if chosen.is_some() {
                break;
            }
        }
        match chosen {
            Some((_, true)) | None => return ring,
            Some((s, false)) => {
                v = next;
                slot = s;
            }
        }
    }
}

fn elide_collinear(ring: Vec<Point>) -> Vec<Point> {
    let n = ring.len();
    (0..n)
        .filter(|&i| {
            let (a, b, c) = (ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]);
            (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x) != 0.0
        })
        .map(|i| ring[i])
        .collect()
}
