use std::collections::VecDeque;

use crate::raster::{BinaryMask, Raster};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundingBox {
    pub min_x: usize,
    pub min_y: usize,
    /// Inclusive.
    pub max_x: usize,
    /// Inclusive.
    pub max_y: usize,
}

impl BoundingBox {
    pub fn width(&self) -> usize {
        self.max_x - self.min_x + 1
    }

    pub fn height(&self) -> usize {
        self.max_y - self.min_y + 1
    }
}

/// One 8-connected foreground region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub id: usize,
    /// `(x, y)` pixels in row-major order.
    pub pixels: Vec<(usize, usize)>,
    pub bbox: BoundingBox,
}

impl Component {
    pub fn area(&self) -> usize {
        self.pixels.len()
    }

    /// Mask of this component alone at full image size.
    pub fn to_mask(&self, width: usize, height: usize) -> BinaryMask {
        let mut mask = BinaryMask::empty(width, height);
        for &(x, y) in &self.pixels {
            mask.set(x, y, true);
        }
        mask
    }
}

#[derive(Debug, Clone)]
pub struct BuildingSet {
    pub components: Vec<Component>,
    /// `0` for background, `id + 1` for pixels of component `id`.
    pub ids: Raster<u32>,
}

impl BuildingSet {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component_at(&self, x: usize, y: usize) -> Option<usize> {
        match self.ids.get(x, y) {
            0 => None,
            id => Some(id as usize - 1),
        }
    }
}

/// 8-connected foreground components, numbered by their first pixel in
/// row-major order.
pub fn connected_components(mask: &BinaryMask) -> BuildingSet {
    let (w, h) = mask.dims();
    let mut ids = Raster::filled(w, h, 0u32);
    let mut components = Vec::new();
    let mut queue = VecDeque::new();

    for y0 in 0..h {
        for x0 in 0..w {
            if !mask.get(x0, y0) || ids.get(x0, y0) != 0 {
                continue;
            }
            let id = components.len();
            let tag = id as u32 + 1;
            ids.set(x0, y0, tag);
            queue.push_back((x0, y0));
            let mut pixels = Vec::new();
            while let Some((x, y)) = queue.pop_front() {
                pixels.push((x, y));
                for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
                    for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                        if mask.get(nx, ny) && ids.get(nx, ny) == 0 {
                            ids.set(nx, ny, tag);
                            queue.push_back((nx, ny));
                        }
                    }
                }
            }
            pixels.sort_unstable_by_key(|&(x, y)| (y, x));
            let bbox = pixels.iter().fold(
                BoundingBox {
                    min_x: usize::MAX,
                    min_y: usize::MAX,
                    max_x: 0,
                    max_y: 0,
                },
                |b, &(x, y)| BoundingBox {
                    min_x: b.min_x.min(x),
                    min_y: b.min_y.min(y),
                    max_x: b.max_x.max(x),
                    max_y: b.max_y.max(y),
                },
            );
            components.push(Component { id, pixels, bbox });
        }
    }
    BuildingSet { components, ids }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(rows: &[&str]) -> BinaryMask {
        let h = rows.len();
        let w = rows[0].len();
        BinaryMask::from_fn(w, h, |x, y| rows[y].as_bytes()[x] == b'#')
    }

    #[test]
    fn empty_mask_has_no_components() {
        assert!(connected_components(&BinaryMask::empty(4, 4)).is_empty());
    }

    #[test]
    fn diagonal_pixels_join() {
        let set = connected_components(&mask(&["#.", ".#"]));
        assert_eq!(set.len(), 1);
        assert_eq!(set.components[0].pixels, vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn zero_column_separates_blocks() {
        let set = connected_components(&mask(&["##.##", "##.##"]));
        assert_eq!(set.len(), 2);
        assert_eq!(set.components[0].bbox.max_x, 1);
        assert_eq!(set.components[1].bbox.min_x, 3);
        assert_eq!(set.component_at(4, 1), Some(1));
        assert_eq!(set.component_at(2, 0), None);
    }
}
