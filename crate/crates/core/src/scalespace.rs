//! Detection of harmonic-mode positions in a magnitude spectrum.
//!
//! The magnitude spectrum is smoothed with Gaussians of increasing variance.
//! Levels are spaced uniformly in the scale parameter `σ`, which is the
//! kernel *variance* (standard deviation `√σ`); `σ = 0` is the unsmoothed
//! spectrum.
//! Every strict local maximum of the unsmoothed spectrum starts a track, and
//! a track survives from one level to the next while some maximum of the new
//! level lies close to its last position. The number of levels a track
//! survives is its persistence length. Otsu's threshold on the histogram of
//! persistence lengths separates the short-lived maxima (sidelobes, noise)
//! from the long-lived ones, which become the seeds.

use rayon::prelude::*;

use crate::error::{EvwError, Result};
use crate::grid::{mate, Dims, FreqIndex, ImageGrid};

/// Magnitudes below this fraction of the spectrum maximum are treated as
/// exact zeros before detection. DFT rounding leaves a speckle of
/// ~1e-14-relative values where the spectrum should vanish, and each speck
/// would otherwise be a strict maximum.
pub const MAGNITUDE_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Neighborhood {
    Four,
    #[default]
    Eight,
}

impl Neighborhood {
    fn offsets(self) -> &'static [(i64, i64)] {
        match self {
            Neighborhood::Four => &[(-1, 0), (1, 0), (0, -1), (0, 1)],
            Neighborhood::Eight => &[
                (-1, -1),
                (-1, 0),
                (-1, 1),
                (0, -1),
                (0, 1),
                (1, -1),
                (1, 0),
                (1, 1),
            ],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleSpaceParams {
    /// Increment of the scale (kernel variance) between consecutive levels.
    pub scale_step: f64,
    /// Number of smoothing levels after the unsmoothed level 0.
    pub max_levels: usize,
    pub neighborhood: Neighborhood,
}

impl ScaleSpaceParams {
    pub const DEFAULT_SCALE_STEP: f64 = 0.5;

    /// `scale_step = 0.5`, `max_levels = ⌈min(H, W) / 4⌉` (at least 2).
    pub fn for_dims(dims: Dims) -> Self {
        Self {
            scale_step: Self::DEFAULT_SCALE_STEP,
            max_levels: Self::default_max_levels(dims),
            neighborhood: Neighborhood::default(),
        }
    }

    pub fn default_max_levels(dims: Dims) -> usize {
        dims.height.min(dims.width).div_ceil(4).max(2)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale_step > 0.0 && self.scale_step.is_finite()) {
            return Err(EvwError::invalid(format!(
                "scale_step must be positive, got {}",
                self.scale_step
            )));
        }
        if self.max_levels < 2 {
            return Err(EvwError::invalid(format!(
                "max_levels must be at least 2, got {}",
                self.max_levels
            )));
        }
        Ok(())
    }

    /// Scale (kernel variance) of a level.
    pub fn scale(&self, level: usize) -> f64 {
        level as f64 * self.scale_step
    }
}

/// A maximum of the unsmoothed spectrum and the number of consecutive
/// levels (counting level 0) it survived.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MaximaTrack {
    pub origin: FreqIndex,
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeedSet {
    /// Seed bins in row-major order, closed under the mate map.
    pub seeds: Vec<FreqIndex>,
    pub threshold: f64,
    pub all_tracks: Vec<MaximaTrack>,
}

impl SeedSet {
    /// A seed set given directly rather than detected (no tracks, threshold 0).
    pub fn from_seeds(mut seeds: Vec<FreqIndex>) -> Self {
        seeds.sort();
        seeds.dedup();
        Self {
            seeds,
            threshold: 0.0,
            all_tracks: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    pub fn is_mate_closed(&self, dims: Dims) -> bool {
        self.seeds
            .iter()
            .all(|&s| self.seeds.binary_search(&mate(s, dims)).is_ok())
    }
}

/// Sampled Gaussian of variance `scale`, truncated at four standard
/// deviations, normalized to unit mass, and folded onto an axis of length `n`.
fn periodic_kernel(scale: f64, n: usize) -> Vec<f64> {
    let radius = (4.0 * scale.sqrt()).ceil() as i64;
    let mut folded = vec![0.0; n];
    let mut total = 0.0;
    for t in -radius..=radius {
        let w = (-(t * t) as f64 / (2.0 * scale)).exp();
        folded[t.rem_euclid(n as i64) as usize] += w;
        total += w;
    }
    for w in &mut folded {
        *w /= total;
    }
    folded
}

fn convolve_rows(dims: Dims, src: &[f64], kernel: &[f64]) -> Vec<f64> {
    let w = dims.width;
    let taps: Vec<(usize, f64)> = kernel
        .iter()
        .enumerate()
        .filter(|(_, &k)| k != 0.0)
        .map(|(i, &k)| (i, k))
        .collect();
    let mut out = vec![0.0; src.len()];
    out.par_chunks_mut(w)
        .zip(src.par_chunks(w))
        .for_each(|(dst, row)| {
            for (c, d) in dst.iter_mut().enumerate() {
                let mut acc = 0.0;
                for &(t, k) in &taps {
                    acc += k * row[(c + w - t) % w];
                }
                *d = acc;
            }
        });
    out
}

fn transpose(dims: Dims, src: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; src.len()];
    for r in 0..dims.height {
        for c in 0..dims.width {
            out[c * dims.height + r] = src[r * dims.width + c];
        }
    }
    out
}

/// Periodic Gaussian smoothing at scale `sigma` (the kernel variance).
/// `sigma = 0` returns the input unchanged.
///
/// The kernel is sampled, truncated at radius `⌈4√σ⌉` and renormalized, so
/// total mass and nonnegativity are preserved.
pub fn gaussian_smooth(mag: &ImageGrid, sigma: f64) -> ImageGrid {
    assert!(sigma >= 0.0, "sigma must be nonnegative");
    if sigma == 0.0 {
        return mag.clone();
    }
    let dims = mag.dims();
    let along_rows = convolve_rows(dims, mag.data(), &periodic_kernel(sigma, dims.width));
    let t_dims = Dims::new(dims.width, dims.height);
    let along_cols = convolve_rows(
        t_dims,
        &transpose(dims, &along_rows),
        &periodic_kernel(sigma, dims.height),
    );
    ImageGrid::from_raw(dims, transpose(t_dims, &along_cols))
}

/// Bins strictly greater than every neighbor, with periodic wrap-around.
/// A neighbor that wraps onto the bin itself (axes of length 1) is ignored.
pub fn local_maxima(smoothed: &ImageGrid, neighborhood: Neighborhood) -> Vec<FreqIndex> {
    let dims = smoothed.dims();
    let (h, w) = (dims.height as i64, dims.width as i64);
    let data = smoothed.data();
    dims.bins()
        .filter(|&b| {
            let v = data[dims.index(b)];
            neighborhood.offsets().iter().all(|&(dr, dc)| {
                let nr = (b.k as i64 + dr).rem_euclid(h) as usize;
                let nc = (b.l as i64 + dc).rem_euclid(w) as usize;
                let n = FreqIndex::new(nr, nc);
                n == b || v > data[dims.index(n)]
            })
        })
        .collect()
}

/// Periodic Chebyshev distance between two bins.
fn torus_chebyshev(a: FreqIndex, b: FreqIndex, dims: Dims) -> usize {
    let dk = a.k.abs_diff(b.k);
    let dl = a.l.abs_diff(b.l);
    dk.min(dims.height - dk).max(dl.min(dims.width - dl))
}

/// Per-level outcome of the scale-space sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleSpaceTrace {
    pub tracks: Vec<MaximaTrack>,
    /// Number of local maxima found at each level `0..=max_levels`.
    pub maxima_counts: Vec<usize>,
}

impl ScaleSpaceTrace {
    /// Levels at which the maxima count went up relative to the previous
    /// level. Continuous 1D scale-space never creates maxima; sampled 2D
    /// smoothing occasionally does, so this is reported, not enforced.
    pub fn monotonicity_violations(&self) -> Vec<usize> {
        self.maxima_counts
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1] > w[0])
            .map(|(i, _)| i + 1)
            .collect()
    }
}

/// Follow every level-0 maximum through the smoothing levels.
///
/// At level `i` (σ = `i·scale_step`) a live track may be extended by a
/// maximum within periodic Chebyshev distance `⌈√σ⌉ + 1` of the track's last
/// position, i.e. one kernel standard deviation plus a bin. Matching is greedy over candidate pairs ordered by distance,
/// then track origin (row-major), then maximum position; each maximum
/// extends at most one track and each track takes at most one maximum.
/// Unmatched tracks stop growing.
pub fn track_maxima(mag: &ImageGrid, params: &ScaleSpaceParams) -> Result<Vec<MaximaTrack>> {
    Ok(trace_scale_space(mag, params)?.tracks)
}

/// [`track_maxima`] plus the per-level maxima counts.
pub fn trace_scale_space(mag: &ImageGrid, params: &ScaleSpaceParams) -> Result<ScaleSpaceTrace> {
    params.validate()?;
    let dims = mag.dims();

    let level_maxima: Vec<Vec<FreqIndex>> = (0..=params.max_levels)
        .into_par_iter()
        .map(|level| {
            let smoothed = gaussian_smooth(mag, params.scale(level));
            local_maxima(&smoothed, params.neighborhood)
        })
        .collect();

    let origins = &level_maxima[0];
    let mut tracks: Vec<MaximaTrack> = origins
        .iter()
        .map(|&origin| MaximaTrack { origin, length: 1 })
        .collect();
    // Last position of each live track; origins are already row-major sorted.
    let mut live: Vec<(usize, FreqIndex)> = origins.iter().copied().enumerate().collect();
    let mut owner: Vec<Option<usize>> = vec![None; dims.len()];

    for (level, maxima) in level_maxima.iter().enumerate().skip(1) {
        if live.is_empty() {
            break;
        }
        let radius = params.scale(level).sqrt().ceil() as usize + 1;
        for &(t, pos) in &live {
            owner[dims.index(pos)] = Some(t);
        }

        let mut candidates: Vec<(usize, FreqIndex, usize, FreqIndex)> = Vec::new();
        let rk = radius.min((dims.height - 1) / 2 + 1);
        let rl = radius.min((dims.width - 1) / 2 + 1);
        for &m in maxima {
            let mut seen_rows = Vec::with_capacity(2 * rk + 1);
            for dk in -(rk as i64)..=(rk as i64) {
                let k = (m.k as i64 + dk).rem_euclid(dims.height as i64) as usize;
                if seen_rows.contains(&k) {
                    continue;
                }
                seen_rows.push(k);
                let mut seen_cols = Vec::with_capacity(2 * rl + 1);
                for dl in -(rl as i64)..=(rl as i64) {
                    let l = (m.l as i64 + dl).rem_euclid(dims.width as i64) as usize;
                    if seen_cols.contains(&l) {
                        continue;
                    }
                    seen_cols.push(l);
                    let p = FreqIndex::new(k, l);
                    if let Some(t) = owner[dims.index(p)] {
                        let d = torus_chebyshev(p, m, dims);
                        if d <= radius {
                            candidates.push((d, tracks[t].origin, t, m));
                        }
                    }
                }
            }
        }
        for &(_, pos) in &live {
            owner[dims.index(pos)] = None;
        }

        candidates.sort_by_key(|c| (c.0, c.1, c.3));
        let mut track_taken = vec![false; tracks.len()];
        let mut max_taken = std::collections::HashSet::new();
        let mut next_live = Vec::new();
        for (_, _, t, m) in candidates {
            if track_taken[t] || max_taken.contains(&m) {
                continue;
            }
            track_taken[t] = true;
            max_taken.insert(m);
            tracks[t].length += 1;
            next_live.push((t, m));
        }
        next_live.sort_by_key(|&(t, _)| t);
        live = next_live;
    }

    Ok(ScaleSpaceTrace {
        tracks,
        maxima_counts: level_maxima.iter().map(Vec::len).collect(),
    })
}

/// Otsu threshold on the unit-bin histogram of persistence lengths.
///
/// Returns the integer `T` maximizing the between-class variance of
/// `{l ≤ T}` versus `{l > T}`; ties go to the smallest `T`. When every
/// length is equal the result is that length minus one, so everything is
/// kept.
///
/// ```
/// use evw::otsu_threshold;
/// assert_eq!(otsu_threshold(&[1, 1, 1, 10, 10]).unwrap(), 1.0);
/// assert_eq!(otsu_threshold(&[5, 5, 5, 5]).unwrap(), 4.0);
/// ```
pub fn otsu_threshold(lengths: &[usize]) -> Result<f64> {
    if lengths.is_empty() {
        return Err(EvwError::invalid("otsu threshold of an empty list"));
    }
    let lo = *lengths.iter().min().unwrap();
    let hi = *lengths.iter().max().unwrap();
    if lo == hi {
        return Ok(lo as f64 - 1.0);
    }

    let mut hist = vec![0u64; hi - lo + 1];
    for &l in lengths {
        hist[l - lo] += 1;
    }
    let n = lengths.len() as u64;
    let s: u64 = lengths.iter().map(|&l| l as u64).sum();

    // Between-class variance is (n1·S0 − n0·S1)² / (N²·n0·n1); compare the
    // rationals (n1·S0 − n0·S1)² / (n0·n1) exactly.
    let mut best: Option<(u128, u128, usize)> = None;
    let (mut n0, mut s0) = (0u64, 0u64);
    for (i, &count) in hist.iter().enumerate().take(hi - lo) {
        let t = lo + i;
        n0 += count;
        s0 += count * t as u64;
        if n0 == 0 {
            continue;
        }
        let n1 = n - n0;
        let s1 = s - s0;
        let diff = (n1 as i128 * s0 as i128 - n0 as i128 * s1 as i128).unsigned_abs();
        let num = diff * diff;
        let den = n0 as u128 * n1 as u128;
        let better = match best {
            None => true,
            Some((bn, bd, _)) => ratio_gt(num, den, bn, bd),
        };
        if better {
            best = Some((num, den, t));
        }
    }
    Ok(best.expect("at least one split when lengths differ").2 as f64)
}

/// `a/b > c/d` for positive denominators, exact when the products fit in
/// `u128`, otherwise in floating point.
fn ratio_gt(a: u128, b: u128, c: u128, d: u128) -> bool {
    match (a.checked_mul(d), c.checked_mul(b)) {
        (Some(x), Some(y)) => x > y,
        _ => a as f64 / b as f64 > c as f64 / d as f64,
    }
}

/// Full detection: scale-space tracks, Otsu threshold, then the kept
/// origins closed under the mate map. DC is always included as a seed so
/// that the residue has its own cell.
pub fn detect_seeds(mag: &ImageGrid, params: &ScaleSpaceParams) -> Result<SeedSet> {
    let dims = mag.dims();
    let peak = mag.data().iter().copied().fold(0.0, f64::max);
    let floor = peak * MAGNITUDE_FLOOR;
    let cleaned = ImageGrid::from_raw(
        dims,
        mag.data()
            .iter()
            .map(|&v| if v > floor { v } else { 0.0 })
            .collect(),
    );

    let trace = trace_scale_space(&cleaned, params)?;
    let violations = trace.monotonicity_violations();
    if !violations.is_empty() {
        log::debug!("maxima count increased at scale levels {violations:?}");
    }
    let tracks = trace.tracks;
    if tracks.is_empty() {
        return Err(EvwError::NoModes {
            reason: "the magnitude spectrum has no strict local maximum".into(),
            diagnostics: format!("0 tracks; spectrum peak {peak:e}"),
        });
    }
    let lengths: Vec<usize> = tracks.iter().map(|t| t.length).collect();
    let threshold = otsu_threshold(&lengths)?;

    let mut seeds: Vec<FreqIndex> = tracks
        .iter()
        .filter(|t| t.length as f64 > threshold)
        .map(|t| t.origin)
        .collect();
    if seeds.is_empty() {
        return Err(EvwError::NoModes {
            reason: format!("no track longer than the threshold {threshold}"),
            diagnostics: dump_tracks(&tracks),
        });
    }
    let mates: Vec<FreqIndex> = seeds.iter().map(|&s| mate(s, dims)).collect();
    seeds.extend(mates);
    seeds.push(FreqIndex::DC);
    seeds.sort();
    seeds.dedup();

    Ok(SeedSet {
        seeds,
        threshold,
        all_tracks: tracks,
    })
}

fn dump_tracks(tracks: &[MaximaTrack]) -> String {
    let mut out = String::from("origin_row,origin_col,length\n");
    for t in tracks {
        out.push_str(&format!("{},{},{}\n", t.origin.k, t.origin.l, t.length));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn impulse(h: usize, w: usize, at: FreqIndex) -> ImageGrid {
        ImageGrid::from_fn(h, w, |r, c| if (r, c) == (at.k, at.l) { 1.0 } else { 0.0 })
    }

    #[test]
    fn smoothing_sigma_zero_is_identity() {
        let img = ImageGrid::from_fn(5, 6, |r, c| (r * 7 + c * 3) as f64 % 5.0);
        assert_eq!(gaussian_smooth(&img, 0.0), img);
    }

    #[test]
    fn smoothing_constant_is_constant() {
        let img = ImageGrid::from_fn(12, 9, |_, _| 3.25);
        for sigma in [0.5, 1.0, 3.7, 20.0] {
            let s = gaussian_smooth(&img, sigma);
            for &v in s.data() {
                assert!((v - 3.25).abs() < 1e-13, "sigma {sigma}: {v}");
            }
        }
    }

    #[test]
    fn smoothing_impulse_matches_direct_convolution() {
        let (h, w) = (32, 32);
        let img = impulse(h, w, FreqIndex::new(10, 20));
        let sigma: f64 = 1.0;
        let out = gaussian_smooth(&img, sigma);

        // Independent oracle: direct 2D sum with the separable truncated
        // kernel normalized per axis.
        let radius = 4i64;
        let g = |t: i64| (-(t * t) as f64 / 2.0).exp();
        let norm: f64 = (-radius..=radius).map(g).sum();
        for r in 0..h {
            for c in 0..w {
                let dr = r as i64 - 10;
                let dc = c as i64 - 20;
                let expect = if dr.abs() <= radius && dc.abs() <= radius {
                    g(dr) * g(dc) / (norm * norm)
                } else {
                    0.0
                };
                assert!((out.get(r, c) - expect).abs() < 1e-15, "({r},{c})");
            }
        }
        assert!((out.get(10, 20) - 1.0 / (norm * norm)).abs() < 1e-15);
    }

    #[test]
    fn local_maxima_examples() {
        let flat = ImageGrid::from_fn(6, 6, |_, _| 1.0);
        assert!(local_maxima(&flat, Neighborhood::Eight).is_empty());

        let one = impulse(6, 6, FreqIndex::new(2, 3));
        assert_eq!(
            local_maxima(&one, Neighborhood::Four),
            vec![FreqIndex::new(2, 3)]
        );

        let two = ImageGrid::from_fn(16, 16, |r, c| match (r, c) {
            (2, 2) => 2.0,
            (10, 12) => 1.0,
            _ => 0.0,
        });
        assert_eq!(
            local_maxima(&two, Neighborhood::Eight),
            vec![FreqIndex::new(2, 2), FreqIndex::new(10, 12)]
        );
    }

    #[test]
    fn local_maxima_wraps_periodically() {
        // The corner bin neighbors the opposite corner.
        let img = ImageGrid::from_fn(5, 5, |r, c| match (r, c) {
            (0, 0) => 1.0,
            (4, 4) => 2.0,
            _ => 0.0,
        });
        assert_eq!(
            local_maxima(&img, Neighborhood::Eight),
            vec![FreqIndex::new(4, 4)]
        );
        assert_eq!(
            local_maxima(&img, Neighborhood::Four),
            vec![FreqIndex::new(0, 0), FreqIndex::new(4, 4)]
        );
    }

    #[test]
    fn impulse_track_persists_through_all_levels() {
        let img = impulse(32, 32, FreqIndex::new(5, 9));
        let params = ScaleSpaceParams::for_dims(img.dims());
        let tracks = track_maxima(&img, &params).unwrap();
        assert_eq!(
            tracks,
            vec![MaximaTrack {
                origin: FreqIndex::new(5, 9),
                length: params.max_levels + 1
            }]
        );
    }

    #[test]
    fn constant_image_has_no_tracks() {
        let img = ImageGrid::from_fn(16, 16, |_, _| 4.0);
        let params = ScaleSpaceParams::for_dims(img.dims());
        assert!(track_maxima(&img, &params).unwrap().is_empty());
    }

    #[test]
    fn wide_bump_outlives_spike() {
        let (h, w) = (64, 64);
        let img = ImageGrid::from_fn(h, w, |r, c| {
            let dr = r as f64 - 20.0;
            let dc = c as f64 - 20.0;
            let bump = 10.0 * (-(dr * dr + dc * dc) / (2.0 * 16.0)).exp();
            // On the bump's flank: a maximum at fine scales only.
            let spike = if (r, c) == (30, 20) { 1.0 } else { 0.0 };
            bump + spike
        });
        let params = ScaleSpaceParams::for_dims(img.dims());
        let tracks = track_maxima(&img, &params).unwrap();
        let len_of = |p: FreqIndex| tracks.iter().find(|t| t.origin == p).unwrap().length;
        let spike = len_of(FreqIndex::new(30, 20));
        assert!(spike >= 1);
        assert!(len_of(FreqIndex::new(20, 20)) > spike);
    }

    #[test]
    fn maxima_count_never_grows_for_separated_bumps() {
        let centers = [
            (8.0, 10.0, 3.0),
            (40.0, 12.0, 5.0),
            (24.0, 44.0, 2.0),
            (52.0, 50.0, 4.0),
        ];
        let img = ImageGrid::from_fn(64, 64, |r, c| {
            centers
                .iter()
                .map(|&(cr, cc, s)| {
                    let (dr, dc) = (r as f64 - cr, c as f64 - cc);
                    (-(dr * dr + dc * dc) / (2.0 * s * s)).exp()
                })
                .sum()
        });
        let trace = trace_scale_space(&img, &ScaleSpaceParams::for_dims(img.dims())).unwrap();
        assert_eq!(trace.maxima_counts[0], 4);
        assert!(
            trace.monotonicity_violations().is_empty(),
            "{:?}",
            trace.maxima_counts
        );
    }

    #[test]
    fn violations_are_reported_by_level() {
        let trace = ScaleSpaceTrace {
            tracks: Vec::new(),
            maxima_counts: vec![5, 4, 4, 6, 3, 4],
        };
        assert_eq!(trace.monotonicity_violations(), vec![3, 5]);
    }

    #[test]
    fn invalid_params_rejected() {
        let img = ImageGrid::zeros(8, 8);
        let bad = ScaleSpaceParams {
            scale_step: 0.0,
            max_levels: 4,
            neighborhood: Neighborhood::Eight,
        };
        assert!(track_maxima(&img, &bad).is_err());
        let bad = ScaleSpaceParams {
            scale_step: 0.5,
            max_levels: 1,
            neighborhood: Neighborhood::Eight,
        };
        assert!(track_maxima(&img, &bad).is_err());
    }

    #[test]
    fn otsu_examples() {
        assert_eq!(otsu_threshold(&[1, 1, 1, 10, 10]).unwrap(), 1.0);
        assert_eq!(otsu_threshold(&[5, 5, 5, 5]).unwrap(), 4.0);
        assert_eq!(otsu_threshold(&[1, 2, 8, 9]).unwrap(), 2.0);
        assert!(matches!(
            otsu_threshold(&[]),
            Err(EvwError::InvalidInput(_))
        ));
    }

    #[test]
    fn dc_impulse_spectrum_gives_single_dc_seed() {
        let img = impulse(16, 16, FreqIndex::DC);
        let seeds = detect_seeds(&img, &ScaleSpaceParams::for_dims(img.dims())).unwrap();
        assert_eq!(seeds.seeds, vec![FreqIndex::DC]);
    }

    #[test]
    fn zero_spectrum_reports_no_modes() {
        let img = ImageGrid::zeros(16, 16);
        let err = detect_seeds(&img, &ScaleSpaceParams::for_dims(img.dims())).unwrap_err();
        assert!(matches!(err, EvwError::NoModes { .. }));
    }

    proptest! {
        #[test]
        fn smoothing_preserves_mass_and_sign(
            vals in proptest::collection::vec(0.0f64..10.0, 12 * 10),
            sigma in 0.1f64..8.0,
        ) {
            let img = ImageGrid::new(12, 10, vals).unwrap();
            let out = gaussian_smooth(&img, sigma);
            let m0: f64 = img.data().iter().sum();
            let m1: f64 = out.data().iter().sum();
            prop_assert!((m0 - m1).abs() <= 1e-9 * m0.max(1e-300));
            prop_assert!(out.data().iter().all(|&v| v >= 0.0));
        }
    }
}
