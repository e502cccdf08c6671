//! Empirical Voronoi wavelets.
//!
//! An adaptive 2D wavelet filter bank is built from the image itself:
//!
//! 1. the magnitude spectrum is examined across Gaussian scales and the
//!    maxima that persist longest are kept as seeds ([`detect_seeds`]);
//! 2. the frequency plane is split into the Voronoi cells of those seeds,
//!    with centrally-symmetric cells paired ([`label_grid`]);
//! 3. each pair of cells gets a smooth Fourier-domain filter whose
//!    transition follows the quasi-Euclidean distance to the cell edge
//!    ([`build_bank`]);
//! 4. the image is filtered by every filter ([`decompose`]) and recovered
//!    exactly through the dual frame ([`reconstruct`]).
//!
//! Spectra are kept in unshifted DFT order throughout; see [`grid`].

pub mod distance;
pub mod error;
pub mod filterbank;
pub mod grid;
pub mod scalespace;
pub mod spectral;
pub mod synth;
pub mod transform;
pub mod voronoi;

pub use distance::{
    brute_force_signed_distance, norm_factor, quasi_euclidean, signed_distance, SignedDistanceMap,
};
pub use error::{EvwError, Result};
pub use filterbank::{
    auto_tau, beta, build_bank, build_filter, transition_value, FilterBank, TransitionParams,
    WaveletFilter,
};
pub use grid::{mate, Dims, FreqIndex, ImageGrid, SpectrumGrid};
pub use scalespace::{
    detect_seeds, gaussian_smooth, local_maxima, otsu_threshold, trace_scale_space, track_maxima,
    MaximaTrack, Neighborhood, ScaleSpaceParams, ScaleSpaceTrace, SeedSet,
};
pub use spectral::{forward_dft, inverse_dft, inverse_dft_checked, magnitude};
pub use synth::{make_pure_tone, make_toy_image, HarmonicMode, PiecewiseObject, Shape, ToySpec};
pub use transform::{
    decompose, decompose_with_bank, decompose_with_seeds, reconstruct, reconstruct_bands,
    EvwDecomposition, EvwParams,
};
pub use voronoi::{
    cell_boundary, inner_boundary, label_grid, pair_symmetric_cells, PartitionLabels,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/detection.md")]
    mod detection {}
    #[doc = include_str!("../../../book/src/partition.md")]
    mod partition {}
    #[doc = include_str!("../../../book/src/filters.md")]
    mod filters {}
    #[doc = include_str!("../../../book/src/transform.md")]
    mod transform {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
