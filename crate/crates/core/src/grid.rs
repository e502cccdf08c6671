//! Raster containers and frequency-plane index arithmetic.
//!
//! All spectra are stored in unshifted DFT order: bin `(0, 0)` is DC and the
//! negative frequencies live in the upper halves of each axis. The centered
//! representative of an index `k` on an axis of size `n` is the unique value
//! congruent to `k` in `(-n/2, n/2]`.

use rustfft::num_complex::Complex64;

use crate::error::{EvwError, Result};

/// Grid dimensions, rows by columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dims {
    pub height: usize,
    pub width: usize,
}

impl Dims {
    pub fn new(height: usize, width: usize) -> Self {
        Self { height, width }
    }

    pub fn len(&self) -> usize {
        self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, idx: FreqIndex) -> usize {
        idx.k * self.width + idx.l
    }

    #[inline]
    pub fn at(&self, flat: usize) -> FreqIndex {
        FreqIndex::new(flat / self.width, flat % self.width)
    }

    /// Iterator over every bin in row-major order.
    pub fn bins(&self) -> impl Iterator<Item = FreqIndex> {
        let w = self.width;
        (0..self.len()).map(move |i| FreqIndex::new(i / w, i % w))
    }

    /// Flat index of the centrally-symmetric mate of `flat`.
    #[inline]
    pub fn mate_flat(&self, flat: usize) -> usize {
        self.index(mate(self.at(flat), *self))
    }

    /// Centered `(row, col)` representative of a bin.
    #[inline]
    pub fn centered(&self, idx: FreqIndex) -> (i64, i64) {
        (
            centered_coord(idx.k, self.height),
            centered_coord(idx.l, self.width),
        )
    }

    /// Position of a bin in the centered (fft-shifted) raster, where DC sits
    /// at `((height - 1) / 2, (width - 1) / 2)`.
    #[inline]
    pub fn shifted_position(&self, idx: FreqIndex) -> (usize, usize) {
        let (r, c) = self.centered(idx);
        (
            (r + ((self.height as i64 - 1) / 2)) as usize,
            (c + ((self.width as i64 - 1) / 2)) as usize,
        )
    }

    /// Bins that are their own mate: DC and, for even axes, the Nyquist lines'
    /// crossings.
    pub fn is_self_mate(&self, idx: FreqIndex) -> bool {
        mate(idx, *self) == idx
    }
}

/// A frequency bin `(k, l)`: row `k`, column `l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreqIndex {
    pub k: usize,
    pub l: usize,
}

impl FreqIndex {
    pub const DC: FreqIndex = FreqIndex { k: 0, l: 0 };

    pub const fn new(k: usize, l: usize) -> Self {
        Self { k, l }
    }
}

/// Signed representative of `k` on an axis of size `n`, in `(-n/2, n/2]`.
#[inline]
pub fn centered_coord(k: usize, n: usize) -> i64 {
    if 2 * k <= n {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Central-symmetry mate: `((H - k) mod H, (W - l) mod W)`.
///
/// ```
/// use evw::{mate, Dims, FreqIndex};
/// let d = Dims::new(8, 8);
/// assert_eq!(mate(FreqIndex::new(1, 2), d), FreqIndex::new(7, 6));
/// assert_eq!(mate(FreqIndex::new(4, 0), d), FreqIndex::new(4, 0));
/// ```
#[inline]
pub fn mate(idx: FreqIndex, dims: Dims) -> FreqIndex {
    FreqIndex::new(
        (dims.height - idx.k) % dims.height,
        (dims.width - idx.l) % dims.width,
    )
}

/// Real-valued raster stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageGrid {
    dims: Dims,
    data: Vec<f64>,
}

impl ImageGrid {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(EvwError::invalid("image dimensions must be positive"));
        }
        if data.len() != height * width {
            return Err(EvwError::invalid(format!(
                "data length {} does not match {}x{}",
                data.len(),
                height,
                width
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(EvwError::invalid(format!(
                "non-finite value at row {}, col {}",
                pos / width,
                pos % width
            )));
        }
        Ok(Self {
            dims: Dims::new(height, width),
            data,
        })
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self {
            dims: Dims::new(height, width),
            data: vec![0.0; height * width],
        }
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Self {
            dims: Dims::new(height, width),
            data,
        }
    }

    /// Unchecked constructor for values produced inside the crate.
    pub(crate) fn from_raw(dims: Dims, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dims.len());
        Self { dims, data }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn height(&self) -> usize {
        self.dims.height
    }

    pub fn width(&self) -> usize {
        self.dims.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dims.width + col]
    }

    pub fn norm_l2(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `‖self − other‖₂ / ‖other‖₂`, or the absolute norm when `other` is zero.
    pub fn relative_error(&self, other: &ImageGrid) -> f64 {
        assert_eq!(self.dims, other.dims, "dimension mismatch");
        let diff: f64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let base = other.norm_l2();
        if base > 0.0 {
            diff / base
        } else {
            diff
        }
    }
}

/// Complex raster in unshifted DFT order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumGrid {
    dims: Dims,
    data: Vec<Complex64>,
}

impl SpectrumGrid {
    pub fn new(height: usize, width: usize, data: Vec<Complex64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(EvwError::invalid("spectrum dimensions must be positive"));
        }
        if data.len() != height * width {
            return Err(EvwError::invalid(format!(
                "data length {} does not match {}x{}",
                data.len(),
                height,
                width
            )));
        }
        Ok(Self {
            dims: Dims::new(height, width),
            data,
        })
    }

    pub(crate) fn from_raw(dims: Dims, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), dims.len());
        Self { dims, data }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, idx: FreqIndex) -> Complex64 {
        self.data[self.dims.index(idx)]
    }

    /// Pointwise product with a real mask.
    pub fn masked(&self, mask: &[f64]) -> SpectrumGrid {
        assert_eq!(mask.len(), self.data.len());
        SpectrumGrid::from_raw(
            self.dims,
            self.data.iter().zip(mask).map(|(z, m)| z * *m).collect(),
        )
    }

    /// Largest conjugate-symmetry defect `|X(mate ξ) − conj X(ξ)|`, relative
    /// to the largest modulus.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let scale = self.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        (0..self.data.len())
            .map(|i| (self.data[self.dims.mate_flat(i)] - self.data[i].conj()).norm())
            .fold(0.0, f64::max)
            / scale
    }
}
