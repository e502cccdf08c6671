//! Nearest-seed partition of the frequency plane.
//!
//! Distances are Euclidean on centered coordinates (with both aliases of a
//! Nyquist coordinate considered), compared as exact integer squared
//! distances. Only one bin of each mate pair is labeled by
//! search; its mate receives the paired cell, so the partition is centrally
//! symmetric by construction.

use crate::error::{EvwError, Result};
use crate::grid::{centered_coord, mate, Dims, FreqIndex};
use crate::scalespace::SeedSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionLabels {
    dims: Dims,
    /// Cell id per bin, unshifted row-major order.
    pub labels: Vec<usize>,
    /// Seed of each cell; cell ids are positions in this list.
    pub seed_of: Vec<FreqIndex>,
    /// Centrally-symmetric partner of each cell (itself for self-mate seeds).
    pub pair_of: Vec<usize>,
    pub dc_cell: usize,
}

impl PartitionLabels {
    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn num_cells(&self) -> usize {
        self.seed_of.len()
    }

    pub fn label(&self, idx: FreqIndex) -> usize {
        self.labels[self.dims.index(idx)]
    }

    /// Cell groups `{c, pair_of(c)}`, the scaling group (holding `dc_cell`)
    /// first, the rest ordered by smallest member id.
    pub fn pair_classes(&self) -> Vec<Vec<usize>> {
        let mut classes: Vec<Vec<usize>> = (0..self.num_cells())
            .filter(|&c| c <= self.pair_of[c])
            .map(|c| {
                if self.pair_of[c] == c {
                    vec![c]
                } else {
                    vec![c, self.pair_of[c]]
                }
            })
            .collect();
        let dc_class = classes
            .iter()
            .position(|cls| cls.contains(&self.dc_cell))
            .expect("dc cell belongs to a class");
        let scaling = classes.remove(dc_class);
        classes.insert(0, scaling);
        classes
    }

    /// Membership mask of the union of `cell` and its paired cell.
    pub fn class_mask(&self, cell: usize) -> Vec<bool> {
        let partner = self.pair_of[cell];
        self.labels
            .iter()
            .map(|&l| l == cell || l == partner)
            .collect()
    }

    /// Cell of each bin's class representative (smallest id in the pair).
    pub fn class_labels(&self) -> Vec<usize> {
        self.labels
            .iter()
            .map(|&l| l.min(self.pair_of[l]))
            .collect()
    }
}

/// Axis offset between centered coordinates. A coordinate on the Nyquist
/// line of an even axis stands for both `+n/2` and `-n/2`; the nearer alias
/// is used.
fn axis_offset(a: usize, b: usize, n: usize) -> i64 {
    let delta = (centered_coord(a, n) - centered_coord(b, n)).abs();
    let on_nyquist = 2 * a == n || 2 * b == n;
    if on_nyquist {
        delta.min(n as i64 - delta)
    } else {
        delta
    }
}

pub(crate) fn squared_distance(dims: Dims, a: FreqIndex, b: FreqIndex) -> i64 {
    axis_offset(a.k, b.k, dims.height).pow(2) + axis_offset(a.l, b.l, dims.width).pow(2)
}

/// Nearest cell among `candidates`, smallest id on ties.
fn nearest(dims: Dims, bin: FreqIndex, seeds: &[FreqIndex], candidates: &[usize]) -> usize {
    let mut best = (i64::MAX, usize::MAX);
    for &c in candidates {
        let d = squared_distance(dims, bin, seeds[c]);
        if (d, c) < best {
            best = (d, c);
        }
    }
    best.1
}

/// Fill `pair_of` from the seeds: cell `c` pairs with the cell seeded at
/// `mate(seed_of(c))`.
pub fn pair_symmetric_cells(mut labels: PartitionLabels) -> Result<PartitionLabels> {
    labels.pair_of = pairing(labels.dims, &labels.seed_of)?;
    Ok(labels)
}

fn pairing(dims: Dims, seed_of: &[FreqIndex]) -> Result<Vec<usize>> {
    seed_of
        .iter()
        .map(|&s| {
            let m = mate(s, dims);
            seed_of.iter().position(|&t| t == m).ok_or_else(|| {
                EvwError::Internal(format!(
                    "seed ({}, {}) has no mate seed at ({}, {})",
                    s.k, s.l, m.k, m.l
                ))
            })
        })
        .collect()
}

/// Voronoi labels for a mate-closed seed set.
///
/// Of each mate pair, the bin whose centered coordinates are
/// lexicographically larger takes its nearest seed (smallest cell id on
/// ties); the other bin takes the paired cell. A self-mate bin can only be
/// consistent with a self-paired cell, so it takes the nearest self-paired
/// seed when one exists, and the nearest seed otherwise.
pub fn label_grid(seeds: &SeedSet, dims: Dims) -> Result<PartitionLabels> {
    if seeds.is_empty() {
        return Err(EvwError::invalid("empty seed set"));
    }
    let mut seed_of = seeds.seeds.clone();
    seed_of.sort();
    seed_of.dedup();
    if let Some(s) = seed_of
        .iter()
        .find(|s| s.k >= dims.height || s.l >= dims.width)
    {
        return Err(EvwError::invalid(format!(
            "seed ({}, {}) outside a {}x{} grid",
            s.k, s.l, dims.height, dims.width
        )));
    }
    if let Some(s) = seed_of
        .iter()
        .find(|&&s| seed_of.binary_search(&mate(s, dims)).is_err())
    {
        return Err(EvwError::invalid(format!(
            "seed set is not closed under the mate map: ({}, {}) lacks its mate",
            s.k, s.l
        )));
    }

    let pair_of = pairing(dims, &seed_of)?;
    let all: Vec<usize> = (0..seed_of.len()).collect();
    let self_paired: Vec<usize> = all.iter().copied().filter(|&c| pair_of[c] == c).collect();
    let self_mate_pool = if self_paired.is_empty() {
        &all
    } else {
        &self_paired
    };

    const UNSET: usize = usize::MAX;
    let mut labels = vec![UNSET; dims.len()];
    for (i, slot) in labels.iter_mut().enumerate() {
        let b = dims.at(i);
        let m = mate(b, dims);
        match dims.centered(b).cmp(&dims.centered(m)) {
            std::cmp::Ordering::Greater => *slot = nearest(dims, b, &seed_of, &all),
            std::cmp::Ordering::Equal => *slot = nearest(dims, b, &seed_of, self_mate_pool),
            std::cmp::Ordering::Less => {}
        }
    }
    for i in 0..labels.len() {
        if labels[i] == UNSET {
            labels[i] = pair_of[labels[dims.mate_flat(i)]];
        }
    }

    let dc_cell = labels[0];
    let partition = PartitionLabels {
        dims,
        labels,
        seed_of,
        pair_of: Vec::new(),
        dc_cell,
    };
    pair_symmetric_cells(partition)
}

/// Inner boundary of the union of `cell` and its paired cell: member bins
/// with at least one 4-neighbor (periodic wrap) outside the union.
pub fn cell_boundary(labels: &PartitionLabels, cell: usize) -> Result<Vec<FreqIndex>> {
    if cell >= labels.num_cells() {
        return Err(EvwError::invalid(format!(
            "cell {cell} out of range (partition has {} cells)",
            labels.num_cells()
        )));
    }
    let inside = labels.class_mask(cell);
    Ok(inner_boundary(labels.dims, &inside))
}

/// Bins of `inside` having a 4-neighbor (periodic) outside it.
pub fn inner_boundary(dims: Dims, inside: &[bool]) -> Vec<FreqIndex> {
    let (h, w) = (dims.height, dims.width);
    dims.bins()
        .filter(|&b| {
            inside[dims.index(b)]
                && [
                    FreqIndex::new((b.k + h - 1) % h, b.l),
                    FreqIndex::new((b.k + 1) % h, b.l),
                    FreqIndex::new(b.k, (b.l + w - 1) % w),
                    FreqIndex::new(b.k, (b.l + 1) % w),
                ]
                .iter()
                .any(|&n| !inside[dims.index(n)])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seeds(list: &[(usize, usize)]) -> SeedSet {
        SeedSet::from_seeds(list.iter().map(|&(k, l)| FreqIndex::new(k, l)).collect())
    }

    #[test]
    fn single_dc_seed() {
        let p = label_grid(&seeds(&[(0, 0)]), Dims::new(8, 8)).unwrap();
        assert!(p.labels.iter().all(|&l| l == 0));
        assert_eq!(p.pair_of, vec![0]);
        assert_eq!(p.dc_cell, 0);
        assert!(cell_boundary(&p, 0).unwrap().is_empty());
    }

    #[test]
    fn mate_pair_seeds_split_the_plane() {
        let dims = Dims::new(8, 8);
        let p = label_grid(&seeds(&[(0, 2), (0, 6)]), dims).unwrap();
        assert_eq!(p.pair_of, vec![1, 0]);
        // Brute-force nearest with symmetry fill, for bins off the tie line
        // and off the Nyquist lines.
        for b in dims.bins() {
            let (r, c) = dims.centered(b);
            if c == 0 || c == 4 || r == 4 {
                continue;
            }
            assert_eq!(p.label(b), if c > 0 { 0 } else { 1 }, "{b:?}");
        }
        for b in dims.bins() {
            if !dims.is_self_mate(b) {
                assert_eq!(p.label(mate(b, dims)), p.pair_of[p.label(b)]);
            }
        }
        // One pair class covering everything: no boundary.
        assert_eq!(p.pair_classes(), vec![vec![0, 1]]);
        assert!(cell_boundary(&p, 0).unwrap().is_empty());
    }

    #[test]
    fn two_self_paired_bands_boundary() {
        // DC and Nyquist seeds split 8x8 into a low band |c| <= 2 (ties at
        // |c| = 2 go to the smaller id, the DC cell) and a high band.
        let dims = Dims::new(8, 8);
        let p = label_grid(&seeds(&[(0, 0), (0, 4)]), dims).unwrap();
        assert_eq!(p.pair_of, vec![0, 1]);
        for b in dims.bins() {
            let c = dims.centered(b).1.abs();
            assert_eq!(p.label(b), if c <= 2 { 0 } else { 1 });
        }
        // Oracle: scan every bin's 4-neighbors by hand.
        let low = cell_boundary(&p, 0).unwrap();
        let high = cell_boundary(&p, 1).unwrap();
        let cols = |v: &[FreqIndex]| {
            let mut c: Vec<usize> = v.iter().map(|b| b.l).collect();
            c.sort();
            c.dedup();
            c
        };
        assert_eq!(cols(&low), vec![2, 6]);
        assert_eq!(low.len(), 16);
        assert_eq!(cols(&high), vec![3, 5]);
        assert_eq!(high.len(), 16);
    }

    #[test]
    fn boundary_is_mate_symmetric() {
        let dims = Dims::new(12, 10);
        let p = label_grid(&seeds(&[(0, 0), (2, 3), (10, 7), (5, 1), (7, 9)]), dims).unwrap();
        for c in 0..p.num_cells() {
            let b = cell_boundary(&p, c).unwrap();
            let mut mirrored: Vec<FreqIndex> = b.iter().map(|&x| mate(x, dims)).collect();
            mirrored.sort();
            assert_eq!(mirrored, b);
        }
    }

    #[test]
    fn seeds_own_their_cells() {
        let dims = Dims::new(9, 12);
        let p = label_grid(
            &seeds(&[(0, 0), (1, 2), (8, 10), (4, 6), (5, 6), (0, 6)]),
            dims,
        )
        .unwrap();
        for (c, &s) in p.seed_of.iter().enumerate() {
            assert_eq!(p.label(s), c);
        }
    }

    #[test]
    fn errors() {
        let dims = Dims::new(8, 8);
        assert!(matches!(
            label_grid(&SeedSet::from_seeds(vec![]), dims),
            Err(EvwError::InvalidInput(_))
        ));
        assert!(matches!(
            label_grid(&seeds(&[(0, 2)]), dims),
            Err(EvwError::InvalidInput(_))
        ));
        let p = label_grid(&seeds(&[(0, 0)]), dims).unwrap();
        assert!(cell_boundary(&p, 3).is_err());

        let mut broken = p.clone();
        broken.seed_of = vec![FreqIndex::new(0, 1)];
        assert!(matches!(
            pair_symmetric_cells(broken),
            Err(EvwError::Internal(_))
        ));
    }
}
