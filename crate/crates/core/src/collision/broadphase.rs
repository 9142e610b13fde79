use super::geometry::Aabb;

/// Uniform spatial hash over axis-aligned boxes. Returns every pair of
/// overlapping boxes that share at least one cell, sorted and deduplicated.
pub fn spatial_hash_pairs(boxes: &[Aabb], cell: f64) -> Vec<(usize, usize)> {
    assert!(cell > 0.0, "cell size must be positive");
    let inv = 1.0 / cell;
    let key = |x: f64| (x * inv).floor() as i64;
    // (cell, box) entries, grouped by sorting instead of hashing.
    let mut entries: Vec<((i64, i64, i64), u32)> = Vec::with_capacity(boxes.len() * 8);
    for (i, b) in boxes.iter().enumerate() {
        let lo = [key(b.min.x), key(b.min.y), key(b.min.z)];
        let hi = [key(b.max.x), key(b.max.y), key(b.max.z)];
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                for z in lo[2]..=hi[2] {
                    entries.push(((x, y, z), i as u32));
                }
            }
        }
    }
    entries.sort_unstable();
    let mut pairs = Vec::new();
    for group in entries.chunk_by(|a, b| a.0 == b.0) {
        let cell_key = group[0].0;
        for (n, &(_, a)) in group.iter().enumerate() {
            for &(_, b) in &group[n + 1..] {
                let (a, b) = (a as usize, b as usize);
                if !boxes[a].overlaps(&boxes[b]) {
                    continue;
                }
                // Report each pair once: in the cell holding the low corner
                // of the boxes' intersection.
                let lo = boxes[a].min.sup(&boxes[b].min);
                if (key(lo.x), key(lo.y), key(lo.z)) == cell_key {
                    pairs.push((a.min(b), a.max(b)));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

/// Cell size for a set of boxes: the mean box extent, but never below
/// `min_cell`.
pub fn cell_size(boxes: &[Aabb], min_cell: f64) -> f64 {
    if boxes.is_empty() {
        return min_cell;
    }
    let mean = boxes.iter().map(|b| (b.max - b.min).max()).sum::<f64>() / boxes.len() as f64;
    mean.max(min_cell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::vec3;

    #[test]
    fn overlapping_boxes_pair_up() {
        let boxes = [
            Aabb { min: vec3(0.0, 0.0, 0.0), max: vec3(1.0, 1.0, 1.0) },
            Aabb { min: vec3(0.5, 0.5, 0.5), max: vec3(2.0, 2.0, 2.0) },
            Aabb { min: vec3(5.0, 5.0, 5.0), max: vec3(6.0, 6.0, 6.0) },
        ];
        assert_eq!(spatial_hash_pairs(&boxes, 0.7), vec![(0, 1)]);
    }
}
