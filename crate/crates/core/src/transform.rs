//! Forward transform (detect → partition → filter) and dual-frame inverse.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::error::{EvwError, Result};
use crate::filterbank::{build_bank, FilterBank, TransitionParams};
use crate::grid::{Dims, ImageGrid, SpectrumGrid};
use crate::scalespace::{detect_seeds, ScaleSpaceParams, SeedSet, MAGNITUDE_FLOOR};
use crate::spectral::{forward_dft, inverse_dft, inverse_dft_checked, magnitude};
use crate::voronoi::{label_grid, PartitionLabels};

/// Smallest image side accepted by [`decompose`].
pub const MIN_SIDE: usize = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EvwParams {
    /// `None` selects [`ScaleSpaceParams::for_dims`].
    pub scale_space: Option<ScaleSpaceParams>,
    pub transition: TransitionParams,
}

impl EvwParams {
    pub fn scale_space_for(&self, dims: Dims) -> ScaleSpaceParams {
        self.scale_space
            .unwrap_or_else(|| ScaleSpaceParams::for_dims(dims))
    }
}

#[derive(Clone, Debug)]
pub struct EvwDecomposition {
    /// One band per filter; band 0 is the residue of the scaling filter.
    pub bands: Vec<ImageGrid>,
    pub bank: FilterBank,
    /// `None` when the bank was supplied rather than detected.
    pub seeds: Option<SeedSet>,
    pub partition: Option<PartitionLabels>,
    /// `max|Im| / max|Re|` of each band before the imaginary part was dropped.
    pub imag_residue: Vec<f64>,
    pub source_dims: Dims,
}

fn check_dims(img: &ImageGrid) -> Result<()> {
    if img.height() < MIN_SIDE || img.width() < MIN_SIDE {
        return Err(EvwError::invalid(format!(
            "image is {}x{}; both sides must be at least {MIN_SIDE}",
            img.height(),
            img.width()
        )));
    }
    Ok(())
}

/// Detect modes in `|f̂|`, partition, build the bank and filter.
///
/// ```
/// use evw::{decompose, reconstruct, make_pure_tone, Dims, EvwParams};
/// let img = make_pure_tone(Dims::new(32, 32), (0.0, 4.0), 1.0).unwrap();
/// let dec = decompose(&img, &EvwParams::default()).unwrap();
/// assert_eq!(dec.bands.len(), 2);
/// assert!(reconstruct(&dec).unwrap().relative_error(&img) < 1e-9);
/// ```
pub fn decompose(img: &ImageGrid, params: &EvwParams) -> Result<EvwDecomposition> {
    check_dims(img)?;
    let spectrum = forward_dft(img)?;
    let mag = magnitude(&spectrum);
    let peak = mag.data().iter().copied().fold(0.0, f64::max);
    if mag.data()[1..].iter().all(|&v| v <= peak * MAGNITUDE_FLOOR) {
        return Err(EvwError::NoModes {
            reason: "the image has no content beyond its mean".into(),
            diagnostics: format!("DC magnitude {peak:e}, all other bins below the floor"),
        });
    }
    let seeds = detect_seeds(&mag, &params.scale_space_for(img.dims()))?;
    decompose_spectrum_with_seeds(img.dims(), &spectrum, seeds, &params.transition)
}

/// Skip detection and partition from the given mate-closed seeds.
pub fn decompose_with_seeds(
    img: &ImageGrid,
    seeds: SeedSet,
    transition: &TransitionParams,
) -> Result<EvwDecomposition> {
    check_dims(img)?;
    let spectrum = forward_dft(img)?;
    decompose_spectrum_with_seeds(img.dims(), &spectrum, seeds, transition)
}

fn decompose_spectrum_with_seeds(
    dims: Dims,
    spectrum: &SpectrumGrid,
    seeds: SeedSet,
    transition: &TransitionParams,
) -> Result<EvwDecomposition> {
    let partition = label_grid(&seeds, dims)?;
    let bank = build_bank(&partition, transition)?;
    let (bands, imag_residue) = filter_all(spectrum, &bank);
    Ok(EvwDecomposition {
        bands,
        bank,
        seeds: Some(seeds),
        partition: Some(partition),
        imag_residue,
        source_dims: dims,
    })
}

fn filter_all(spectrum: &SpectrumGrid, bank: &FilterBank) -> (Vec<ImageGrid>, Vec<f64>) {
    bank.filters
        .par_iter()
        .map(|f| inverse_dft_checked(&spectrum.masked(&f.mask)))
        .unzip()
}

/// Filter with an existing bank. Linear in `img`.
pub fn decompose_with_bank(img: &ImageGrid, bank: &FilterBank) -> Result<EvwDecomposition> {
    if img.dims() != bank.dims() {
        return Err(EvwError::invalid(format!(
            "image is {}x{} but the bank is {}x{}",
            img.height(),
            img.width(),
            bank.dims().height,
            bank.dims().width
        )));
    }
    let spectrum = forward_dft(img)?;
    let (bands, imag_residue) = filter_all(&spectrum, bank);
    Ok(EvwDecomposition {
        bands,
        bank: bank.clone(),
        seeds: None,
        partition: None,
        imag_residue,
        source_dims: img.dims(),
    })
}

/// `f = F⁻¹(Σ_k F(f_k) · dual_k)`.
///
/// Bands are transformed again rather than reusing cached spectra, so bands
/// edited after decomposition are honored.
pub fn reconstruct(dec: &EvwDecomposition) -> Result<ImageGrid> {
    reconstruct_bands(&dec.bands, &dec.bank)
}

pub fn reconstruct_bands(bands: &[ImageGrid], bank: &FilterBank) -> Result<ImageGrid> {
    if bands.len() != bank.len() {
        return Err(EvwError::invalid(format!(
            "{} bands for a bank of {} filters",
            bands.len(),
            bank.len()
        )));
    }
    let dims = bank.dims();
    if let Some((k, b)) = bands.iter().enumerate().find(|(_, b)| b.dims() != dims) {
        return Err(EvwError::invalid(format!(
            "band {k} is {}x{}, expected {}x{}",
            b.height(),
            b.width(),
            dims.height,
            dims.width
        )));
    }
    let spectra = bands
        .par_iter()
        .map(forward_dft)
        .collect::<Result<Vec<_>>>()?;
    let mut acc = vec![Complex64::default(); dims.len()];
    for (spec, dual) in spectra.iter().zip(&bank.duals) {
        for ((a, z), d) in acc.iter_mut().zip(spec.data()).zip(dual) {
            *a += z * *d;
        }
    }
    Ok(inverse_dft(&SpectrumGrid::new(
        dims.height,
        dims.width,
        acc,
    )?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::FreqIndex;
    use crate::synth::make_pure_tone;

    #[test]
    fn pure_tone_splits_into_two_bands() {
        let dims = Dims::new(64, 64);
        let img = make_pure_tone(dims, (0.0, 8.0), 1.0).unwrap();
        let dec = decompose(&img, &EvwParams::default()).unwrap();
        let seeds = dec.seeds.as_ref().unwrap();
        assert_eq!(
            seeds.seeds,
            vec![FreqIndex::DC, FreqIndex::new(0, 8), FreqIndex::new(0, 56)]
        );
        assert_eq!(dec.bands.len(), 2);
        let energy = |g: &ImageGrid| g.data().iter().map(|v| v * v).sum::<f64>();
        let total = energy(&img);
        assert!(energy(&dec.bands[1]) >= 0.99 * total);
        assert!(reconstruct(&dec).unwrap().relative_error(&img) < 1e-9);
    }

    #[test]
    fn constant_and_zero_images_fail_detection() {
        let c = ImageGrid::from_fn(16, 16, |_, _| 2.0);
        assert!(matches!(
            decompose(&c, &EvwParams::default()),
            Err(EvwError::NoModes { .. })
        ));
        let z = ImageGrid::zeros(16, 16);
        assert!(matches!(
            decompose(&z, &EvwParams::default()),
            Err(EvwError::NoModes { .. })
        ));
    }

    #[test]
    fn small_images_rejected() {
        let img = ImageGrid::zeros(7, 32);
        assert!(matches!(
            decompose(&img, &EvwParams::default()),
            Err(EvwError::InvalidInput(_))
        ));
    }

    #[test]
    fn single_cell_bank_returns_input() {
        let img = make_pure_tone(Dims::new(16, 16), (3.0, 2.0), 1.5).unwrap();
        let dec = decompose_with_seeds(
            &img,
            SeedSet::from_seeds(vec![FreqIndex::DC]),
            &TransitionParams::default(),
        )
        .unwrap();
        assert_eq!(dec.bands.len(), 1);
        assert!(dec.bands[0].relative_error(&img) < 1e-14);
        let rec = reconstruct(&dec).unwrap();
        assert!(rec.relative_error(&dec.bands[0]) < 1e-14);
    }

    #[test]
    fn zero_bands_reconstruct_to_zero() {
        let img = make_pure_tone(Dims::new(16, 16), (0.0, 4.0), 1.0).unwrap();
        let mut dec = decompose(&img, &EvwParams::default()).unwrap();
        for b in &mut dec.bands {
            *b = ImageGrid::zeros(16, 16);
        }
        assert!(reconstruct(&dec).unwrap().data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mismatched_bands_rejected() {
        let img = make_pure_tone(Dims::new(16, 16), (0.0, 4.0), 1.0).unwrap();
        let mut dec = decompose(&img, &EvwParams::default()).unwrap();
        dec.bands.pop();
        assert!(matches!(reconstruct(&dec), Err(EvwError::InvalidInput(_))));
        let other = ImageGrid::zeros(16, 8);
        assert!(decompose_with_bank(&other, &dec.bank).is_err());
    }
}
