//! Signed quasi-Euclidean distance to a cell boundary.
//!
//! The quasi-Euclidean metric `max(|Δ|) + (√2 − 1)·min(|Δ|)` is the cost of
//! the cheapest 8-connected path with axial steps of cost 1 and diagonal
//! steps of cost √2, so a two-pass chamfer sweep with those weights computes
//! it exactly on an unobstructed grid. Geometry is the centered (shifted)
//! rectangle without wrap-around.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{EvwError, Result};
use crate::grid::{Dims, FreqIndex};

/// `2π / max(H, W)`: grid units to radians.
pub fn norm_factor(dims: Dims) -> f64 {
    2.0 * PI / dims.height.max(dims.width) as f64
}

/// Quasi-Euclidean distance between `(k, l)` and `(p, q)`.
///
/// ```
/// use evw::quasi_euclidean;
/// assert_eq!(quasi_euclidean(0, 0, 1, 0), 1.0);
/// assert!((quasi_euclidean(0, 0, 3, 3) - 3.0 * 2f64.sqrt()).abs() < 1e-12);
/// ```
pub fn quasi_euclidean(k: i64, l: i64, p: i64, q: i64) -> f64 {
    let dk = (p - k).abs() as f64;
    let dl = (q - l).abs() as f64;
    if dk >= dl {
        (SQRT_2 - 1.0) * dl + dk
    } else {
        (SQRT_2 - 1.0) * dk + dl
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignedDistanceMap {
    dims: Dims,
    /// Radians, unshifted bin order.
    pub values: Vec<f64>,
    /// The cell the map refers to.
    pub inside: Vec<bool>,
    pub norm_factor: f64,
}

impl SignedDistanceMap {
    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn at(&self, idx: FreqIndex) -> f64 {
        self.values[self.dims.index(idx)]
    }

    /// Value used everywhere when the cell is the whole grid; larger than any
    /// attainable distance.
    pub fn sentinel(dims: Dims, norm_factor: f64) -> f64 {
        norm_factor * (dims.height + dims.width) as f64
    }

    pub fn is_whole_grid(&self) -> bool {
        self.inside.iter().all(|&b| b)
    }

    /// Largest value inside the cell (its in-radius, in radians).
    pub fn max_inside(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.inside)
            .filter(|(_, &i)| i)
            .map(|(&v, _)| v)
            .fold(0.0, f64::max)
    }
}

fn validate(cell: &[bool], boundary: &[FreqIndex], dims: Dims) -> Result<bool> {
    if cell.len() != dims.len() {
        return Err(EvwError::invalid("cell mask size does not match grid"));
    }
    if !cell.iter().any(|&b| b) {
        return Err(EvwError::invalid("empty cell"));
    }
    if let Some(b) = boundary
        .iter()
        .find(|b| b.k >= dims.height || b.l >= dims.width || !cell[dims.index(**b)])
    {
        return Err(EvwError::invalid(format!(
            "boundary bin ({}, {}) is not in the cell",
            b.k, b.l
        )));
    }
    let whole = cell.iter().all(|&b| b);
    if boundary.is_empty() && !whole {
        return Err(EvwError::invalid(
            "empty boundary for a cell with an exterior",
        ));
    }
    Ok(whole)
}

fn whole_grid(dims: Dims, norm_factor: f64) -> SignedDistanceMap {
    SignedDistanceMap {
        dims,
        values: vec![SignedDistanceMap::sentinel(dims, norm_factor); dims.len()],
        inside: vec![true; dims.len()],
        norm_factor,
    }
}

fn sign_and_scale(
    dims: Dims,
    cell: &[bool],
    unsigned: Vec<f64>,
    norm_factor: f64,
) -> SignedDistanceMap {
    let values = unsigned
        .into_iter()
        .zip(cell)
        .map(|(d, &inside)| {
            if inside {
                d * norm_factor
            } else {
                -d * norm_factor
            }
        })
        .collect();
    SignedDistanceMap {
        dims,
        values,
        inside: cell.to_vec(),
        norm_factor,
    }
}

/// Signed distance to `boundary` by a two-pass chamfer sweep: positive in
/// the cell, zero on the boundary, negative outside, scaled by
/// `norm_factor`.
pub fn signed_distance(
    cell: &[bool],
    boundary: &[FreqIndex],
    dims: Dims,
    norm_factor: f64,
) -> Result<SignedDistanceMap> {
    if validate(cell, boundary, dims)? && boundary.is_empty() {
        return Ok(whole_grid(dims, norm_factor));
    }
    let (h, w) = (dims.height, dims.width);
    let mut grid = vec![f64::INFINITY; h * w];
    for &b in boundary {
        let (r, c) = dims.shifted_position(b);
        grid[r * w + c] = 0.0;
    }

    const FORWARD: [(isize, isize, f64); 4] = [
        (-1, -1, SQRT_2),
        (-1, 0, 1.0),
        (-1, 1, SQRT_2),
        (0, -1, 1.0),
    ];
    const BACKWARD: [(isize, isize, f64); 4] =
        [(1, 1, SQRT_2), (1, 0, 1.0), (1, -1, SQRT_2), (0, 1, 1.0)];
    let relax = |grid: &mut [f64], r: usize, c: usize, mask: &[(isize, isize, f64)]| {
        let mut best = grid[r * w + c];
        for &(dr, dc, cost) in mask {
            let nr = r as isize + dr;
            let nc = c as isize + dc;
            if nr >= 0 && nc >= 0 && (nr as usize) < h && (nc as usize) < w {
                best = best.min(grid[nr as usize * w + nc as usize] + cost);
            }
        }
        grid[r * w + c] = best;
    };
    for r in 0..h {
        for c in 0..w {
            relax(&mut grid, r, c, &FORWARD);
        }
    }
    for r in (0..h).rev() {
        for c in (0..w).rev() {
            relax(&mut grid, r, c, &BACKWARD);
        }
    }

    let unsigned = dims
        .bins()
        .map(|b| {
            let (r, c) = dims.shifted_position(b);
            grid[r * w + c]
        })
        .collect();
    Ok(sign_and_scale(dims, cell, unsigned, norm_factor))
}

/// Same contract as [`signed_distance`], by a literal minimum of
/// [`quasi_euclidean`] over all boundary bins. Quadratic; meant as a
/// reference for testing.
pub fn brute_force_signed_distance(
    cell: &[bool],
    boundary: &[FreqIndex],
    dims: Dims,
    norm_factor: f64,
) -> Result<SignedDistanceMap> {
    if validate(cell, boundary, dims)? && boundary.is_empty() {
        return Ok(whole_grid(dims, norm_factor));
    }
    let edge: Vec<(i64, i64)> = boundary.iter().map(|&b| dims.centered(b)).collect();
    let unsigned = dims
        .bins()
        .map(|b| {
            let (k, l) = dims.centered(b);
            edge.iter()
                .map(|&(p, q)| quasi_euclidean(k, l, p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Ok(sign_and_scale(dims, cell, unsigned, norm_factor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::mate;
    use crate::voronoi::inner_boundary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quasi_euclidean_examples() {
        assert_eq!(quasi_euclidean(0, 0, 1, 0), 1.0);
        assert!((quasi_euclidean(0, 0, 3, 3) - 4.242640687).abs() < 1e-9);
        assert!((quasi_euclidean(0, 0, 4, 1) - 4.414213562).abs() < 1e-9);
        assert_eq!(quasi_euclidean(2, 5, 2, 5), 0.0);
        assert_eq!(quasi_euclidean(1, 1, 4, 2), quasi_euclidean(4, 2, 1, 1));
    }

    /// 5x5 grid with Ω = the three left columns of the centered raster and
    /// ∂Ω its rightmost column.
    fn left_columns() -> (Dims, Vec<bool>, Vec<FreqIndex>) {
        let dims = Dims::new(5, 5);
        let mut cell = vec![false; 25];
        let mut boundary = Vec::new();
        for b in dims.bins() {
            let (_, c) = dims.shifted_position(b);
            if c <= 2 {
                cell[dims.index(b)] = true;
            }
            if c == 2 {
                boundary.push(b);
            }
        }
        (dims, cell, boundary)
    }

    fn at_shifted(map: &SignedDistanceMap, r: usize, c: usize) -> f64 {
        let dims = map.dims();
        let b = dims
            .bins()
            .find(|&b| dims.shifted_position(b) == (r, c))
            .unwrap();
        map.at(b)
    }

    #[test]
    fn five_by_five_example() {
        let (dims, cell, boundary) = left_columns();
        let nf = norm_factor(dims);
        for map in [
            signed_distance(&cell, &boundary, dims, nf).unwrap(),
            brute_force_signed_distance(&cell, &boundary, dims, nf).unwrap(),
        ] {
            assert!((at_shifted(&map, 2, 0) - 2.0 * nf).abs() < 1e-15);
            assert!((at_shifted(&map, 2, 4) + 2.0 * nf).abs() < 1e-15);
            assert_eq!(at_shifted(&map, 0, 2), 0.0);
        }
    }

    #[test]
    fn whole_grid_is_sentinel() {
        let dims = Dims::new(6, 4);
        let cell = vec![true; 24];
        let map = signed_distance(&cell, &[], dims, 1.0).unwrap();
        assert!(map.values.iter().all(|&v| v == 10.0));
        assert_eq!(
            map,
            brute_force_signed_distance(&cell, &[], dims, 1.0).unwrap()
        );
    }

    #[test]
    fn single_boundary_bin_at_center() {
        let dims = Dims::new(9, 9);
        let center = FreqIndex::DC;
        let mut cell = vec![false; 81];
        cell[0] = true;
        let map = brute_force_signed_distance(&cell, &[center], dims, 1.0).unwrap();
        for b in dims.bins() {
            let (k, l) = dims.centered(b);
            let expect = quasi_euclidean(k, l, 0, 0);
            assert_eq!(map.at(b), if b == center { 0.0 } else { -expect });
        }
        let fast = signed_distance(&cell, &[center], dims, 1.0).unwrap();
        for (a, b) in fast.values.iter().zip(&map.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_cell_gives_symmetric_map() {
        // Odd dimensions: negation of centered coordinates is exactly the mate map.
        let dims = Dims::new(11, 9);
        let cell: Vec<bool> = dims
            .bins()
            .map(|b| {
                let (r, c) = dims.centered(b);
                r * r + 2 * c * c <= 12
            })
            .collect();
        let boundary = inner_boundary(dims, &cell);
        let map = signed_distance(&cell, &boundary, dims, norm_factor(dims)).unwrap();
        for b in dims.bins() {
            assert_eq!(map.at(b), map.at(mate(b, dims)));
        }
    }

    #[test]
    fn sign_and_lipschitz_on_random_cells() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let dims = Dims::new(rng.gen_range(3..20), rng.gen_range(3..20));
            let cell: Vec<bool> = (0..dims.len()).map(|_| rng.gen_bool(0.4)).collect();
            if !cell.iter().any(|&b| b) || cell.iter().all(|&b| b) {
                continue;
            }
            let boundary = inner_boundary(dims, &cell);
            let nf = norm_factor(dims);
            let map = signed_distance(&cell, &boundary, dims, nf).unwrap();
            let on_edge: std::collections::HashSet<_> = boundary.iter().copied().collect();
            for b in dims.bins() {
                let v = map.at(b);
                if on_edge.contains(&b) {
                    assert_eq!(v, 0.0);
                } else if cell[dims.index(b)] {
                    assert!(v > 0.0);
                } else {
                    assert!(v < 0.0);
                }
            }
            // Neighbors in the shifted raster.
            let mut shifted = vec![0.0; dims.len()];
            for b in dims.bins() {
                let (r, c) = dims.shifted_position(b);
                shifted[r * dims.width + c] = map.at(b);
            }
            for r in 0..dims.height {
                for c in 0..dims.width {
                    let v = shifted[r * dims.width + c];
                    if c + 1 < dims.width {
                        assert!((v - shifted[r * dims.width + c + 1]).abs() <= nf * (1.0 + 1e-12));
                    }
                    if r + 1 < dims.height {
                        assert!(
                            (v - shifted[(r + 1) * dims.width + c]).abs() <= nf * (1.0 + 1e-12)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn errors() {
        let dims = Dims::new(4, 4);
        let empty = vec![false; 16];
        assert!(signed_distance(&empty, &[], dims, 1.0).is_err());
        let mut one = vec![false; 16];
        one[5] = true;
        assert!(signed_distance(&one, &[], dims, 1.0).is_err());
        assert!(brute_force_signed_distance(&one, &[FreqIndex::new(0, 0)], dims, 1.0).is_err());
    }
}
