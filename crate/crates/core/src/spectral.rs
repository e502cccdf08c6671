//! Forward and inverse 2D DFT on [`ImageGrid`] / [`SpectrumGrid`].
//!
//! The forward transform is unnormalized; the inverse carries the
//! `1 / (H·W)` factor. Row and column passes are delegated to `rustfft`.

use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{EvwError, Result};
use crate::grid::{Dims, ImageGrid, SpectrumGrid};

/// Tolerated `max|Im| / max|Re|` when inverting a conjugate-symmetric
/// spectrum.
pub const IMAG_RESIDUE_TOLERANCE: f64 = 1e-9;

fn fft_2d_in_place(dims: Dims, buf: &mut [Complex64], direction: FftDirection) {
    let Dims { height, width } = dims;
    let mut planner = FftPlanner::<f64>::new();

    let row_fft = planner.plan_fft(width, direction);
    let mut scratch = vec![Complex64::default(); row_fft.get_inplace_scratch_len()];
    for row in buf.chunks_exact_mut(width) {
        row_fft.process_with_scratch(row, &mut scratch);
    }

    let col_fft = planner.plan_fft(height, direction);
    scratch.resize(col_fft.get_inplace_scratch_len(), Complex64::default());
    let mut column = vec![Complex64::default(); height];
    for c in 0..width {
        for r in 0..height {
            column[r] = buf[r * width + c];
        }
        col_fft.process_with_scratch(&mut column, &mut scratch);
        for r in 0..height {
            buf[r * width + c] = column[r];
        }
    }
}

/// Unnormalized 2D DFT of a real image.
///
/// The result is projected onto the conjugate-symmetric subspace
/// (`X(ξ) ← (X(ξ) + conj X(mate ξ)) / 2`), which only moves values by
/// rounding error and makes the Hermitian symmetry hold bit-exactly.
pub fn forward_dft(img: &ImageGrid) -> Result<SpectrumGrid> {
    let dims = img.dims();
    if dims.is_empty() {
        return Err(EvwError::invalid("zero-sized image"));
    }
    let mut buf: Vec<Complex64> = img.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_2d_in_place(dims, &mut buf, FftDirection::Forward);

    let mut sym = buf.clone();
    for (i, out) in sym.iter_mut().enumerate() {
        let m = dims.mate_flat(i);
        if m == i {
            *out = Complex64::new(buf[i].re, 0.0);
        } else {
            let avg = (buf[i] + buf[m].conj()) * 0.5;
            // Write both halves from the same computed value so they agree exactly.
            *out = if i < m {
                avg
            } else {
                (buf[m] + buf[i].conj()).conj() * 0.5
            };
        }
    }
    Ok(SpectrumGrid::from_raw(dims, sym))
}

/// Complex inverse 2D DFT, including the `1/(H·W)` normalization.
pub fn inverse_dft_complex(spec: &SpectrumGrid) -> Vec<Complex64> {
    let dims = spec.dims();
    let mut buf = spec.data().to_vec();
    fft_2d_in_place(dims, &mut buf, FftDirection::Inverse);
    let scale = 1.0 / dims.len() as f64;
    for z in &mut buf {
        *z *= scale;
    }
    buf
}

/// Inverse DFT returning the real part together with the measured
/// imaginary residue `max|Im| / max|Re|` (zero for an all-zero result).
pub fn inverse_dft_checked(spec: &SpectrumGrid) -> (ImageGrid, f64) {
    let buf = inverse_dft_complex(spec);
    let max_re = buf.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    let max_im = buf.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let residue = if max_re > 0.0 {
        max_im / max_re
    } else if max_im > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let img = ImageGrid::from_raw(spec.dims(), buf.into_iter().map(|z| z.re).collect());
    (img, residue)
}

/// Inverse DFT, discarding the imaginary part. A residue above
/// [`IMAG_RESIDUE_TOLERANCE`] is reported through `log::warn!`.
pub fn inverse_dft(spec: &SpectrumGrid) -> ImageGrid {
    let (img, residue) = inverse_dft_checked(spec);
    if residue > IMAG_RESIDUE_TOLERANCE {
        log::warn!(
            "inverse DFT discarded an imaginary residue of {residue:e} (relative); \
             the spectrum is not conjugate-symmetric"
        );
    }
    img
}

/// Pointwise modulus `|f̂|`.
pub fn magnitude(spec: &SpectrumGrid) -> ImageGrid {
    ImageGrid::from_raw(spec.dims(), spec.data().iter().map(|z| z.norm()).collect())
}
