//! Fourier-domain wavelet filters, one per pair of symmetric Voronoi cells,
//! and the dual bank used for reconstruction.
//!
//! Each filter is 1 deeper than `tau` inside its cell, 0 farther than `tau`
//! outside, and follows a Meyer-type `cos(π/2 · β(·))` transition across the
//! boundary band.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use crate::distance::{norm_factor, signed_distance, SignedDistanceMap};
use crate::error::{EvwError, Result};
use crate::grid::{Dims, FreqIndex};
use crate::voronoi::{inner_boundary, PartitionLabels};

/// Bins whose summed filter energy falls below this fail the frame check.
pub const MIN_FRAME_ENERGY: f64 = 1e-12;

/// Transition half-width. An explicit `tau` (radians) wins; otherwise it is
/// derived as `gamma` times the smallest cell in-radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransitionParams {
    pub tau: Option<f64>,
    pub gamma: f64,
}

impl Default for TransitionParams {
    fn default() -> Self {
        Self {
            tau: None,
            gamma: Self::DEFAULT_GAMMA,
        }
    }
}

impl TransitionParams {
    pub const DEFAULT_GAMMA: f64 = 0.3;

    pub fn with_tau(tau: f64) -> Self {
        Self {
            tau: Some(tau),
            ..Self::default()
        }
    }

    pub fn with_gamma(gamma: f64) -> Self {
        Self { tau: None, gamma }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(tau) = self.tau {
            if !(tau > 0.0 && tau.is_finite()) {
                return Err(EvwError::invalid(format!(
                    "tau must be positive, got {tau}"
                )));
            }
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(EvwError::invalid(format!(
                "gamma must lie in (0, 1), got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// `β(x) = x⁴(35 − 84x + 70x² − 20x³)`, clamped to 0 below 0 and 1 above 1.
///
/// ```
/// assert_eq!(evw::beta(0.0), 0.0);
/// assert_eq!(evw::beta(1.0), 1.0);
/// assert_eq!(evw::beta(0.5), 0.5);
/// ```
pub fn beta(x: f64) -> f64 {
    fn poly(x: f64) -> f64 {
        x.powi(4) * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)))
    }
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else if x <= 0.5 {
        poly(x)
    } else {
        // β(x) = 1 − β(1 − x); the direct form cancels badly near 1.
        1.0 - poly(1.0 - x)
    }
}

/// Filter response at signed distance `d` for transition half-width `tau`.
pub fn transition_value(d: f64, tau: f64) -> f64 {
    if d > tau {
        1.0
    } else if d < -tau {
        0.0
    } else {
        (FRAC_PI_2 * beta((tau - d) / (2.0 * tau))).cos()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveletFilter {
    /// Response per bin, unshifted order, in `[0, 1]`.
    pub mask: Vec<f64>,
    /// Smallest cell id of the pair this filter covers.
    pub cell_id: usize,
    /// The Voronoi cells merged into this filter's support.
    pub cells: Vec<usize>,
    /// True for the filter whose cell holds DC; its output is the residue.
    pub is_scaling: bool,
}

/// Evaluate the transition profile on a distance map.
///
/// On even axes the Nyquist lines break the negation symmetry of the
/// centered rectangle, so distances of a bin and its mate can differ there;
/// the mask keeps the larger response of the two, which makes it exactly
/// mate-symmetric.
pub fn build_filter(
    dist: &SignedDistanceMap,
    tau: f64,
    cells: Vec<usize>,
    is_scaling: bool,
) -> Result<WaveletFilter> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(EvwError::invalid(format!(
            "tau must be positive, got {tau}"
        )));
    }
    let dims = dist.dims();
    let raw: Vec<f64> = dist
        .values
        .iter()
        .map(|&d| transition_value(d, tau))
        .collect();
    let mask = (0..raw.len())
        .map(|i| raw[i].max(raw[dims.mate_flat(i)]))
        .collect();
    Ok(WaveletFilter {
        mask,
        cell_id: *cells.iter().min().expect("filter covers at least one cell"),
        cells,
        is_scaling,
    })
}

/// `gamma` times the smallest positive in-radius among the maps. Maps of a
/// whole-grid cell are skipped; if nothing remains the value is
/// `gamma · π`, which has no effect on an all-ones filter.
pub fn auto_tau(dist_maps: &[SignedDistanceMap], gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(EvwError::invalid(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )));
    }
    let radius = dist_maps
        .iter()
        .filter(|m| !m.is_whole_grid())
        .map(SignedDistanceMap::max_inside)
        .filter(|&r| r > 0.0)
        .fold(f64::INFINITY, f64::min);
    Ok(if radius.is_finite() {
        gamma * radius
    } else {
        gamma * std::f64::consts::PI
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilterBank {
    dims: Dims,
    pub tau: f64,
    /// Scaling filter first, then by cell id.
    pub filters: Vec<WaveletFilter>,
    /// `mask_k / energy`, bin-wise.
    pub duals: Vec<Vec<f64>>,
    /// `Σ_k mask_k²` per bin.
    pub energy: Vec<f64>,
}

impl FilterBank {
    /// Assemble a bank from ready filters, computing energy and duals.
    pub fn from_filters(dims: Dims, tau: f64, filters: Vec<WaveletFilter>) -> Result<Self> {
        if filters.is_empty() {
            return Err(EvwError::invalid("a filter bank needs at least one filter"));
        }
        if let Some(f) = filters.iter().find(|f| f.mask.len() != dims.len()) {
            return Err(EvwError::invalid(format!(
                "filter for cell {} has {} bins, expected {}",
                f.cell_id,
                f.mask.len(),
                dims.len()
            )));
        }
        let mut energy = vec![0.0; dims.len()];
        for f in &filters {
            for (e, m) in energy.iter_mut().zip(&f.mask) {
                *e += m * m;
            }
        }
        if let Some((i, &e)) = energy
            .iter()
            .enumerate()
            .find(|(_, &e)| e.is_nan() || e <= MIN_FRAME_ENERGY)
        {
            return Err(EvwError::FrameFailure {
                bin: dims.at(i),
                energy: e,
            });
        }
        let duals = filters
            .iter()
            .map(|f| f.mask.iter().zip(&energy).map(|(m, e)| m / e).collect())
            .collect();
        Ok(Self {
            dims,
            tau,
            filters,
            duals,
            energy,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.filters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filters.is_empty()
    }

    /// Index of the scaling filter (always 0 for banks from [`build_bank`]).
    pub fn scaling_index(&self) -> Option<usize> {
        self.filters.iter().position(|f| f.is_scaling)
    }

    /// `(A, B)`: smallest and largest bin energy.
    pub fn frame_bounds(&self) -> (f64, f64) {
        self.energy
            .iter()
            .fold((f64::INFINITY, 0.0), |(lo, hi), &e| (lo.min(e), hi.max(e)))
    }

    /// The bin holding the smallest energy.
    pub fn weakest_bin(&self) -> FreqIndex {
        let (i, _) = self
            .energy
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (i, &e)| if e < acc.1 { (i, e) } else { acc },
            );
        self.dims.at(i)
    }
}

/// Signed distance maps for every pair class, in [`PartitionLabels::pair_classes`] order.
pub fn class_distance_maps(partition: &PartitionLabels) -> Result<Vec<SignedDistanceMap>> {
    let dims = partition.dims();
    let nf = norm_factor(dims);
    partition
        .pair_classes()
        .par_iter()
        .map(|class| {
            let inside = partition.class_mask(class[0]);
            let boundary = inner_boundary(dims, &inside);
            signed_distance(&inside, &boundary, dims, nf)
        })
        .collect()
}

/// One filter per pair class of the partition, with energy and duals.
pub fn build_bank(
    partition: &PartitionLabels,
    transition: &TransitionParams,
) -> Result<FilterBank> {
    transition.validate()?;
    let classes = partition.pair_classes();
    let maps = class_distance_maps(partition)?;
    let tau = match transition.tau {
        Some(t) => t,
        None => auto_tau(&maps, transition.gamma)?,
    };
    let filters = classes
        .into_par_iter()
        .zip(maps.par_iter())
        .map(|(cells, map)| {
            let is_scaling = cells.contains(&partition.dc_cell);
            build_filter(map, tau, cells, is_scaling)
        })
        .collect::<Result<Vec<_>>>()?;
    FilterBank::from_filters(partition.dims(), tau, filters)
}
