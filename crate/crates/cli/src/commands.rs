use std::path::Path;

use evw::spectral::IMAG_RESIDUE_TOLERANCE;
use evw::{
    decompose, decompose_with_bank, decompose_with_seeds, detect_seeds, forward_dft, label_grid,
    magnitude, make_pure_tone, make_toy_image, mate, reconstruct_bands, Dims, EvwDecomposition,
    EvwParams, FreqIndex, ImageGrid, PartitionLabels, ScaleSpaceParams, SeedSet, ToySpec,
    TransitionParams,
};

use crate::bundle::{self, BankSource, Manifest};
use crate::error::{CliError, Result};
use crate::raster::{encode_pgm, read_image, write_file, write_image};

/// Detection and transition settings shared by `decompose` and `partition`.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    pub tau: Option<f64>,
    pub gamma: Option<f64>,
    pub scale_step: Option<f64>,
    pub max_levels: Option<usize>,
}

impl Settings {
    fn transition(&self) -> TransitionParams {
        TransitionParams {
            tau: self.tau,
            gamma: self.gamma.unwrap_or(TransitionParams::default().gamma),
        }
    }

    fn scale_space(&self, dims: Dims) -> ScaleSpaceParams {
        let mut p = ScaleSpaceParams::for_dims(dims);
        if let Some(s) = self.scale_step {
            p.scale_step = s;
        }
        if let Some(m) = self.max_levels {
            p.max_levels = m;
        }
        p
    }
}

/// Seeds from a file, completed with their mates.
fn seeds_from_file(path: &Path, dims: Dims) -> Result<SeedSet> {
    let listed = bundle::read_seed_file(path)?;
    if let Some(s) = listed
        .iter()
        .find(|s| s.k >= dims.height || s.l >= dims.width)
    {
        return Err(CliError::invalid(format!(
            "{}: seed ({}, {}) is outside the {}x{} spectrum",
            path.display(),
            s.k,
            s.l,
            dims.height,
            dims.width
        )));
    }
    let mut all = listed.clone();
    all.extend(listed.iter().map(|&s| mate(s, dims)));
    let seeds = SeedSet::from_seeds(all);
    if seeds.len() > listed.len() {
        log::info!(
            "added mates: {} seeds listed, {} used",
            listed.len(),
            seeds.len()
        );
    }
    Ok(seeds)
}

fn warn_on_residue(dec: &EvwDecomposition) {
    for (k, &r) in dec.imag_residue.iter().enumerate() {
        if r > IMAG_RESIDUE_TOLERANCE {
            log::warn!("band {k}: imaginary residue {r:e} discarded");
        }
    }
}

pub fn decompose_cmd(
    input: &Path,
    out: &Path,
    settings: &Settings,
    seed_file: Option<&Path>,
    bank_dir: Option<&Path>,
) -> Result<()> {
    let img = read_image(input)?;
    let dims = img.dims();
    let scale_space = settings.scale_space(dims);
    let (dec, src, gamma) = if let Some(dir) = bank_dir {
        let (m, src) = bundle::load_bank(dir)?;
        if m.dims() != dims {
            return Err(CliError::invalid(format!(
                "{} is {}x{} but the bank in {} is {}x{}",
                input.display(),
                dims.height,
                dims.width,
                dir.display(),
                m.height,
                m.width
            )));
        }
        (decompose_with_bank(&img, &src.bank)?, src, m.gamma)
    } else {
        let transition = settings.transition();
        let dec = match seed_file {
            Some(path) => decompose_with_seeds(&img, seeds_from_file(path, dims)?, &transition)?,
            None => decompose(
                &img,
                &EvwParams {
                    scale_space: Some(scale_space),
                    transition,
                },
            )?,
        };
        let src = BankSource {
            seeds: dec.seeds.clone().expect("detected decomposition has seeds"),
            partition: dec
                .partition
                .clone()
                .expect("detected decomposition has a partition"),
            bank: dec.bank.clone(),
        };
        (dec, src, transition.gamma)
    };
    warn_on_residue(&dec);
    let (a, b) = src.bank.frame_bounds();
    log::info!(
        "{} seeds, {} bands, tau {:.4}, frame bounds [{a:.4}, {b:.4}]",
        src.seeds.len(),
        dec.bands.len(),
        src.bank.tau
    );
    let manifest = Manifest {
        version: bundle::VERSION,
        height: dims.height,
        width: dims.width,
        num_bands: dec.bands.len(),
        tau: src.bank.tau,
        gamma,
        scale_step: scale_space.scale_step,
        max_levels: scale_space.max_levels,
        dc_band_index: src.bank.scaling_index().unwrap_or(0),
    };
    bundle::write_bundle(out, &manifest, &dec.bands, &src)
}

pub fn reconstruct_cmd(dir: &Path, out: &Path) -> Result<()> {
    let (manifest, src) = bundle::load_bank(dir)?;
    let bands = bundle::load_bands(dir, &manifest)?;
    let img = reconstruct_bands(&bands, &src.bank)?;
    write_image(out, &img)
}

/// `log(1 + |f̂|)` in 8 bits, DC-centered, with cell edges drawn at 255.
fn overlay(img: &ImageGrid, partition: &PartitionLabels) -> Result<Vec<u8>> {
    let dims = img.dims();
    let mag = magnitude(&forward_dft(img)?);
    let logs: Vec<f64> = mag.data().iter().map(|v| v.ln_1p()).collect();
    let top = logs.iter().copied().fold(0.0, f64::max);
    let (h, w) = (dims.height, dims.width);
    let pixels: Vec<u16> = dims
        .bins()
        .enumerate()
        .map(|(i, b)| {
            let here = partition.labels[i];
            let edge = [
                FreqIndex::new((b.k + 1) % h, b.l),
                FreqIndex::new(b.k, (b.l + 1) % w),
            ]
            .iter()
            .any(|&n| partition.label(n) != here);
            if edge {
                255
            } else if top > 0.0 {
                (logs[i] / top * 254.0).round() as u16
            } else {
                0
            }
        })
        .collect();
    Ok(encode_pgm(h, w, 255, &bundle::to_centered(dims, &pixels)))
}

pub fn partition_cmd(
    input: &Path,
    out: &Path,
    settings: &Settings,
    seed_file: Option<&Path>,
) -> Result<()> {
    let img = read_image(input)?;
    let dims = img.dims();
    let seeds = match seed_file {
        Some(path) => seeds_from_file(path, dims)?,
        None => detect_seeds(&magnitude(&forward_dft(&img)?), &settings.scale_space(dims))?,
    };
    let partition = label_grid(&seeds, dims)?;
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    write_file(
        &out.join(bundle::PARTITION),
        &bundle::partition_pgm(&partition)?,
    )?;
    write_file(&out.join(bundle::SEEDS), &bundle::seeds_csv(&partition)?)?;
    write_file(
        &out.join("partition_overlay.pgm"),
        &overlay(&img, &partition)?,
    )?;
    log::info!(
        "{} cells in {} pair classes",
        partition.num_cells(),
        partition.pair_classes().len()
    );
    Ok(())
}

pub fn synth_cmd(out: &Path, tone: Option<(f64, f64)>, size: Option<Dims>) -> Result<()> {
    let img = match tone {
        Some(freq) => make_pure_tone(size.unwrap_or(Dims::new(256, 256)), freq, 1.0)?,
        None => {
            let mut spec = ToySpec::default();
            if let Some(d) = size {
                spec.dims = d;
            }
            make_toy_image(&spec)?
        }
    };
    write_image(out, &img)
}

pub fn info_cmd(dir: &Path) -> Result<String> {
    let (manifest, src) = bundle::load_bank(dir)?;
    let (a, b) = src.bank.frame_bounds();
    let weakest = src.bank.weakest_bin();
    let mut text = manifest.render();
    text.push_str(&format!("frame_lower={}\n", bundle::fmt_f64(a)));
    text.push_str(&format!("frame_upper={}\n", bundle::fmt_f64(b)));
    text.push_str(&format!("weakest_bin={},{}\n", weakest.k, weakest.l));
    Ok(text)
}
