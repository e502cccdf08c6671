//! Synthetic test images: piecewise-constant objects plus planar cosines.

use std::f64::consts::PI;

use crate::error::{EvwError, Result};
use crate::grid::{Dims, ImageGrid};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarmonicMode {
    pub amplitude: f64,
    /// Cycles across the image along (rows, cols).
    pub freq: (f64, f64),
    pub phase: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Rectangle,
    Ellipse,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PiecewiseObject {
    pub shape: Shape,
    /// (row, col).
    pub center: (f64, f64),
    /// Half extents (or semi-axes) along (row, col).
    pub half_sizes: (f64, f64),
    pub intensity: f64,
}

impl PiecewiseObject {
    fn contains(&self, r: f64, c: f64) -> bool {
        let dr = (r - self.center.0) / self.half_sizes.0;
        let dc = (c - self.center.1) / self.half_sizes.1;
        match self.shape {
            Shape::Rectangle => dr.abs() <= 1.0 && dc.abs() <= 1.0,
            Shape::Ellipse => dr * dr + dc * dc <= 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ToySpec {
    pub dims: Dims,
    pub modes: Vec<HarmonicMode>,
    pub objects: Vec<PiecewiseObject>,
}

impl Default for ToySpec {
    /// 256x256: a rectangle and an ellipse under four unit cosines at
    /// (20, 8), (8, 20), (36, 14), (14, 36) cycles, i.e. two radii with two
    /// orientations each.
    fn default() -> Self {
        let mode = |fr: f64, fc: f64| HarmonicMode {
            amplitude: 1.0,
            freq: (fr, fc),
            phase: 0.0,
        };
        Self {
            dims: Dims::new(256, 256),
            modes: vec![
                mode(20.0, 8.0),
                mode(8.0, 20.0),
                mode(36.0, 14.0),
                mode(14.0, 36.0),
            ],
            objects: vec![
                PiecewiseObject {
                    shape: Shape::Rectangle,
                    center: (64.0, 64.0),
                    half_sizes: (40.0, 24.0),
                    intensity: 0.5,
                },
                PiecewiseObject {
                    shape: Shape::Ellipse,
                    center: (176.0, 160.0),
                    half_sizes: (48.0, 28.0),
                    intensity: 0.5,
                },
            ],
        }
    }
}

impl ToySpec {
    pub fn validate(&self) -> Result<()> {
        let Dims { height, width } = self.dims;
        if height == 0 || width == 0 {
            return Err(EvwError::invalid("toy image dimensions must be positive"));
        }
        for m in &self.modes {
            if !m.amplitude.is_finite() || !m.phase.is_finite() {
                return Err(EvwError::invalid("mode amplitude and phase must be finite"));
            }
            let (fr, fc) = m.freq;
            if !(fr.abs() < height as f64 / 2.0 && fc.abs() < width as f64 / 2.0) {
                return Err(EvwError::invalid(format!(
                    "mode frequency ({fr}, {fc}) is not below Nyquist for {height}x{width}"
                )));
            }
        }
        for o in &self.objects {
            let finite = [o.center.0, o.center.1, o.intensity]
                .iter()
                .all(|v| v.is_finite());
            if !finite || !(o.half_sizes.0 > 0.0 && o.half_sizes.1 > 0.0) {
                return Err(EvwError::invalid(
                    "object geometry must be finite and positive",
                ));
            }
        }
        Ok(())
    }
}

/// Objects' indicator-weighted intensities plus
/// `Σ a·cos(2π(f_r·r/H + f_c·c/W) + φ)`.
pub fn make_toy_image(spec: &ToySpec) -> Result<ImageGrid> {
    spec.validate()?;
    let Dims { height, width } = spec.dims;
    Ok(ImageGrid::from_fn(height, width, |r, c| {
        let (rf, cf) = (r as f64, c as f64);
        let objects: f64 = spec
            .objects
            .iter()
            .filter(|o| o.contains(rf, cf))
            .map(|o| o.intensity)
            .sum();
        let modes: f64 = spec
            .modes
            .iter()
            .map(|m| {
                let arg = 2.0 * PI * (m.freq.0 * rf / height as f64 + m.freq.1 * cf / width as f64);
                m.amplitude * (arg + m.phase).cos()
            })
            .sum();
        objects + modes
    }))
}

/// A single cosine with zero phase.
pub fn make_pure_tone(dims: Dims, freq: (f64, f64), amplitude: f64) -> Result<ImageGrid> {
    make_toy_image(&ToySpec {
        dims,
        modes: vec![HarmonicMode {
            amplitude,
            freq,
            phase: 0.0,
        }],
        objects: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::FreqIndex;
    use crate::spectral::{forward_dft, magnitude};

    #[test]
    fn tone_peaks_at_expected_bins() {
        let img = make_pure_tone(Dims::new(64, 64), (0.0, 8.0), 1.0).unwrap();
        let spec = forward_dft(&img).unwrap();
        for b in spec.dims().bins() {
            let v = spec.get(b).norm();
            if b == FreqIndex::new(0, 8) || b == FreqIndex::new(0, 56) {
                assert!((v - 2048.0).abs() < 1e-9);
            } else {
                assert!(v < 1e-9, "{b:?}: {v}");
            }
        }
    }

    #[test]
    fn zero_amplitude_is_zero() {
        let img = make_pure_tone(Dims::new(8, 8), (1.0, 1.0), 0.0).unwrap();
        assert!(img.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn tones_add_spectrally() {
        let d = Dims::new(16, 16);
        let a = make_pure_tone(d, (2.0, 1.0), 1.0).unwrap();
        let b = make_pure_tone(d, (0.0, 5.0), 0.5).unwrap();
        let sum = ImageGrid::from_fn(16, 16, |r, c| a.get(r, c) + b.get(r, c));
        let (sa, sb, ss) = (
            forward_dft(&a).unwrap(),
            forward_dft(&b).unwrap(),
            forward_dft(&sum).unwrap(),
        );
        for i in 0..256 {
            assert!((ss.data()[i] - sa.data()[i] - sb.data()[i]).norm() < 1e-10);
        }
    }

    #[test]
    fn rejects_nyquist_and_nonfinite() {
        assert!(make_pure_tone(Dims::new(16, 16), (8.0, 0.0), 1.0).is_err());
        assert!(make_pure_tone(Dims::new(16, 16), (0.0, 1.0), f64::NAN).is_err());
    }

    #[test]
    fn default_toy_is_deterministic_with_strict_mode_peaks() {
        let spec = ToySpec::default();
        let a = make_toy_image(&spec).unwrap();
        let b = make_toy_image(&spec).unwrap();
        assert_eq!(a, b);
        let mag = magnitude(&forward_dft(&a).unwrap());
        let dims = mag.dims();
        for m in &spec.modes {
            let k = m.freq.0 as usize;
            let l = m.freq.1 as usize;
            let v = mag.get(k, l);
            for dk in [-1i64, 0, 1] {
                for dl in [-1i64, 0, 1] {
                    if (dk, dl) == (0, 0) {
                        continue;
                    }
                    let nk = (k as i64 + dk).rem_euclid(dims.height as i64) as usize;
                    let nl = (l as i64 + dl).rem_euclid(dims.width as i64) as usize;
                    assert!(v > mag.get(nk, nl));
                }
            }
        }
    }
}
