//! 8-connected component labelling and hand selection.
//!
//! Labelling is the classic two-pass scheme: provisional labels are assigned in
//! raster order while equivalences are merged in a union-find forest, then a
//! second pass rewrites every pixel with a dense id numbered by first appearance.

use serde::{Deserialize, Serialize};

use crate::image::{BBox, BinarySilhouette, Point};

/// Per-pixel component ids (`0` = background) plus per-component statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledRegions {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    components: Vec<Component>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Component {
    pub id: u32,
    pub size: usize,
    pub bbox: BBox,
}

impl LabeledRegions {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Component id at `p`, `0` for background or out of bounds.
    pub fn label_at(&self, p: Point) -> u32 {
        if p.row < 0 || p.col < 0 || p.row as usize >= self.height || p.col as usize >= self.width {
            return 0;
        }
        self.labels[p.row as usize * self.width + p.col as usize]
    }

    /// Components ordered by id; `components()[i].id == i + 1`.
    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component_sizes(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.size).collect()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Mask holding only the pixels of component `id`.
    pub fn component_mask(&self, id: u32) -> BinarySilhouette {
        self.mask_of(&[id])
    }

    /// Mask holding the pixels of every listed component.
    pub fn mask_of(&self, ids: &[u32]) -> BinarySilhouette {
        let mut mask = BinarySilhouette::new(self.width, self.height);
        for &id in ids {
            let Some(c) = id.checked_sub(1).and_then(|i| self.components.get(i as usize)) else {
                continue;
            };
            for row in c.bbox.min_row..=c.bbox.max_row {
                for col in c.bbox.min_col..=c.bbox.max_col {
                    let p = Point::new(row, col);
                    if self.label_at(p) == id {
                        mask.set(p, true);
                    }
                }
            }
        }
        mask
    }
}

struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    fn new() -> Self {
        // slot 0 is the background and never merged
        Self { parent: vec![0] }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        lo
    }
}

/// Labels the 8-connected foreground components of `mask`.
pub fn label_components(mask: &BinarySilhouette) -> LabeledRegions {
    let (w, h) = (mask.width(), mask.height());
    let bits = mask.bits();
    let mut provisional = vec![0u32; w * h];
    let mut sets = DisjointSet::new();

    for row in 0..h {
        for col in 0..w {
            let i = row * w + col;
            if bits[i] == 0 {
                continue;
            }
            // already-visited neighbours: W, NW, N, NE
            let mut label = 0u32;
            let mut visit = |n: u32, sets: &mut DisjointSet| {
                if n != 0 {
                    label = if label == 0 { sets.find(n) } else { sets.union(label, n) };
                }
            };
            if col > 0 {
                visit(provisional[i - 1], &mut sets);
            }
            if row > 0 {
                let up = i - w;
                if col > 0 {
                    visit(provisional[up - 1], &mut sets);
                }
                visit(provisional[up], &mut sets);
                if col + 1 < w {
                    visit(provisional[up + 1], &mut sets);
                }
            }
            provisional[i] = if label == 0 { sets.make() } else { label };
        }
    }

    let mut dense = vec![0u32; sets.parent.len()];
    let mut components: Vec<Component> = Vec::new();
    for row in 0..h {
        for col in 0..w {
            let i = row * w + col;
            if provisional[i] == 0 {
                continue;
            }
            let root = sets.find(provisional[i]);
            if dense[root as usize] == 0 {
                let id = components.len() as u32 + 1;
                dense[root as usize] = id;
                let p = Point::new(row as i32, col as i32);
                components.push(Component { id, size: 0, bbox: BBox::from_point(p) });
            }
            let id = dense[root as usize];
            provisional[i] = id;
            let c = &mut components[id as usize - 1];
            c.size += 1;
            c.bbox.include(Point::new(row as i32, col as i32));
        }
    }

    LabeledRegions { width: w, height: h, labels: provisional, components }
}

/// One retained hand BLOB. `ordinal` 0 is the hand whose leftmost pixel is further left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandRegion {
    pub id: u32,
    pub pixel_count: usize,
    pub bbox: BBox,
    pub leftmost_col: i32,
    pub ordinal: u8,
}

/// Minimum hand size at the 240x230 baseline resolution.
pub const BASELINE_MIN_HAND_PIXELS: usize = 200;

/// Scales [`BASELINE_MIN_HAND_PIXELS`] by image area.
pub fn scaled_min_size(width: usize, height: usize) -> usize {
    let scale = (width * height) as f64 / (crate::BASELINE_WIDTH * crate::BASELINE_HEIGHT) as f64;
    ((BASELINE_MIN_HAND_PIXELS as f64 * scale).round() as usize).max(1)
}

/// Keeps at most the two largest components with at least `min_size` pixels and
/// orders them left-first.
///
/// Size ties are broken towards the smaller leftmost column; ordering ties on the
/// leftmost column go to the smaller topmost row.
pub fn select_hands(regions: &LabeledRegions, min_size: usize) -> Vec<HandRegion> {
    let min_size = min_size.max(1);
    let spatial_key = |c: &Component| (c.bbox.min_col, c.bbox.min_row, c.id);

    let mut kept: Vec<&Component> = regions.components.iter().filter(|c| c.size >= min_size).collect();
    kept.sort_by(|a, b| b.size.cmp(&a.size).then_with(|| spatial_key(a).cmp(&spatial_key(b))));
    kept.truncate(2);
    kept.sort_by_key(|c| spatial_key(c));

    kept.into_iter()
        .enumerate()
        .map(|(ordinal, c)| HandRegion {
            id: c.id,
            pixel_count: c.size,
            bbox: c.bbox,
            leftmost_col: c.bbox.min_col,
            ordinal: ordinal as u8,
        })
        .collect()
}
