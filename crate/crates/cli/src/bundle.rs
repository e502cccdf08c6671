//! Coefficient bundle: a directory holding
//!
//! - `manifest.txt`: `key=value` lines;
//! - `band_<k>.pfm`: band `k` (band 0 is the residue), plus `band_<k>.f64`,
//!   the same samples as raw little-endian doubles, top row first;
//! - `filter_<k>.pfm`: filter `k`, DC-centered;
//! - `partition.pgm`: 16-bit cell ids, DC-centered;
//! - `seeds.csv`: `cell_id,row,col,pair_id` in DFT bin coordinates.
//!
//! The bank is rebuilt from `seeds.csv` and the manifest's `tau`; the
//! rebuild is deterministic, so no filter precision is lost on disk. A
//! `.f64` sidecar is only trusted while its samples round to the PFM
//! contents, so editing a band's PFM takes effect.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use evw::{
    build_bank, label_grid, Dims, FilterBank, FreqIndex, ImageGrid, PartitionLabels, SeedSet,
    TransitionParams,
};

use crate::error::{CliError, Result};
use crate::raster::{decode_pfm, encode_pfm, encode_pgm, read_file, write_file};

pub const VERSION: u32 = 1;
pub const MANIFEST: &str = "manifest.txt";
pub const SEEDS: &str = "seeds.csv";
pub const PARTITION: &str = "partition.pgm";

/// Doubles with 17 significant digits, enough to read back bit-exact.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    pub version: u32,
    pub height: usize,
    pub width: usize,
    pub num_bands: usize,
    pub tau: f64,
    pub gamma: f64,
    pub scale_step: f64,
    pub max_levels: usize,
    pub dc_band_index: usize,
}

impl Manifest {
    pub fn dims(&self) -> Dims {
        Dims::new(self.height, self.width)
    }

    pub fn lines(&self) -> Vec<(&'static str, String)> {
        vec![
            ("version", self.version.to_string()),
            ("height", self.height.to_string()),
            ("width", self.width.to_string()),
            ("num_bands", self.num_bands.to_string()),
            ("tau", fmt_f64(self.tau)),
            ("gamma", fmt_f64(self.gamma)),
            ("scale_step", fmt_f64(self.scale_step)),
            ("max_levels", self.max_levels.to_string()),
            ("dc_band_index", self.dc_band_index.to_string()),
        ]
    }

    pub fn render(&self) -> String {
        self.lines()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let bad = |msg: String| CliError::invalid(format!("{}: {msg}", path.display()));
        let mut map = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("line {} is not key=value", n + 1)))?;
            map.insert(k.trim(), v.trim());
        }
        fn get<T: std::str::FromStr>(
            map: &BTreeMap<&str, &str>,
            key: &str,
            bad: &dyn Fn(String) -> CliError,
        ) -> Result<T> {
            let v = map
                .get(key)
                .ok_or_else(|| bad(format!("missing key `{key}`")))?;
            v.parse()
                .map_err(|_| bad(format!("bad value for `{key}`: {v}")))
        }
        let m = Manifest {
            version: get(&map, "version", &bad)?,
            height: get(&map, "height", &bad)?,
            width: get(&map, "width", &bad)?,
            num_bands: get(&map, "num_bands", &bad)?,
            tau: get(&map, "tau", &bad)?,
            gamma: get(&map, "gamma", &bad)?,
            scale_step: get(&map, "scale_step", &bad)?,
            max_levels: get(&map, "max_levels", &bad)?,
            dc_band_index: get(&map, "dc_band_index", &bad)?,
        };
        if m.version != VERSION {
            return Err(bad(format!("unsupported bundle version {}", m.version)));
        }
        if m.height == 0 || m.width == 0 || m.num_bands == 0 || m.dc_band_index >= m.num_bands {
            return Err(bad("inconsistent sizes".into()));
        }
        Ok(m)
    }
}

/// What is needed to filter: the seeds, their partition and the bank.
pub struct BankSource {
    pub seeds: SeedSet,
    pub partition: PartitionLabels,
    pub bank: FilterBank,
}

impl BankSource {
    pub fn build(seeds: SeedSet, dims: Dims, transition: &TransitionParams) -> Result<Self> {
        let partition = label_grid(&seeds, dims)?;
        let bank = build_bank(&partition, transition)?;
        Ok(BankSource {
            seeds,
            partition,
            bank,
        })
    }
}

pub fn band_path(dir: &Path, k: usize) -> PathBuf {
    dir.join(format!("band_{k}.pfm"))
}

pub fn sidecar_path(dir: &Path, k: usize) -> PathBuf {
    dir.join(format!("band_{k}.f64"))
}

pub fn filter_path(dir: &Path, k: usize) -> PathBuf {
    dir.join(format!("filter_{k}.pfm"))
}

/// Reorders an unshifted frequency raster so DC sits at
/// `((H - 1) / 2, (W - 1) / 2)`.
pub fn to_centered<T: Copy + Default>(dims: Dims, values: &[T]) -> Vec<T> {
    let mut out = vec![T::default(); dims.len()];
    for (i, b) in dims.bins().enumerate() {
        let (r, c) = dims.shifted_position(b);
        out[r * dims.width + c] = values[i];
    }
    out
}

pub fn seeds_csv(partition: &PartitionLabels) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::invalid(format!("writing {SEEDS}: {e}"));
    w.write_record(["cell_id", "row", "col", "pair_id"])
        .map_err(csv_err)?;
    for (cell, s) in partition.seed_of.iter().enumerate() {
        w.serialize((cell, s.k, s.l, partition.pair_of[cell]))
            .map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| CliError::invalid(format!("writing {SEEDS}: {e}")))
}

/// Seed positions from a CSV file. With a header row, the `row` and `col`
/// columns are used; without one, the first two columns.
pub fn read_seed_file(path: &Path) -> Result<Vec<FreqIndex>> {
    let bytes = read_file(path)?;
    let bad = |msg: String| CliError::invalid(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(bytes.as_slice());
    let mut columns = (0, 1);
    let mut seeds = Vec::new();
    for (n, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if n == 0 && rec.get(0).is_some_and(|f| f.parse::<usize>().is_err()) {
            let find = |name: &str| rec.iter().position(|f| f.eq_ignore_ascii_case(name));
            columns = find("row")
                .zip(find("col"))
                .ok_or_else(|| bad("header lacks `row` and `col` columns".into()))?;
            continue;
        }
        let field = |i: usize| -> Result<usize> {
            let f = rec.get(i).unwrap_or("");
            f.parse()
                .map_err(|_| bad(format!("record {}: `{f}` is not a bin index", n + 1)))
        };
        seeds.push(FreqIndex::new(field(columns.0)?, field(columns.1)?));
    }
    if seeds.is_empty() {
        return Err(bad("no seeds listed".into()));
    }
    Ok(seeds)
}

/// Band, sidecar and filter files from an earlier bundle in the same place.
fn stale_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = match fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(CliError::io(dir, e)),
    };
    let mut stale = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        let numbered = |prefix: &str, ext: &str| {
            name.strip_prefix(prefix)
                .and_then(|r| r.strip_suffix(ext))
                .is_some_and(|k| !k.is_empty() && k.bytes().all(|b| b.is_ascii_digit()))
        };
        if numbered("band_", ".pfm") || numbered("band_", ".f64") || numbered("filter_", ".pfm") {
            stale.push(path);
        }
    }
    Ok(stale)
}

pub fn write_bundle(
    dir: &Path,
    manifest: &Manifest,
    bands: &[ImageGrid],
    src: &BankSource,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    for path in stale_files(dir)? {
        fs::remove_file(&path).map_err(|e| CliError::io(&path, e))?;
    }
    let dims = manifest.dims();
    for (k, band) in bands.iter().enumerate() {
        write_file(&band_path(dir, k), &encode_pfm(band))?;
        let raw: Vec<u8> = band.data().iter().flat_map(|v| v.to_le_bytes()).collect();
        write_file(&sidecar_path(dir, k), &raw)?;
    }
    for (k, f) in src.bank.filters.iter().enumerate() {
        let mask = ImageGrid::new(dims.height, dims.width, to_centered(dims, &f.mask))?;
        write_file(&filter_path(dir, k), &encode_pfm(&mask))?;
    }
    write_file(&dir.join(PARTITION), &partition_pgm(&src.partition)?)?;
    write_file(&dir.join(SEEDS), &seeds_csv(&src.partition)?)?;
    write_file(&dir.join(MANIFEST), manifest.render().as_bytes())
}

pub fn partition_pgm(partition: &PartitionLabels) -> Result<Vec<u8>> {
    let dims = partition.dims();
    if partition.num_cells() > u16::MAX as usize + 1 {
        return Err(CliError::invalid(format!(
            "{} cells do not fit a 16-bit label map",
            partition.num_cells()
        )));
    }
    let labels: Vec<u16> = partition.labels.iter().map(|&l| l as u16).collect();
    Ok(encode_pgm(
        dims.height,
        dims.width,
        u16::MAX,
        &to_centered(dims, &labels),
    ))
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST);
    if !path.is_file() {
        return Err(CliError::invalid(format!(
            "{} is not a bundle: missing {}",
            dir.display(),
            path.display()
        )));
    }
    let text = String::from_utf8(read_file(&path)?)
        .map_err(|_| CliError::invalid(format!("{}: not UTF-8", path.display())))?;
    Manifest::parse(&text, &path)
}

/// Manifest plus the bank rebuilt from the bundle's seeds.
pub fn load_bank(dir: &Path) -> Result<(Manifest, BankSource)> {
    let manifest = read_manifest(dir)?;
    let seeds_path = dir.join(SEEDS);
    if !seeds_path.is_file() {
        return Err(CliError::invalid(format!(
            "missing seed table {}",
            seeds_path.display()
        )));
    }
    let listed = read_seed_file(&seeds_path)?;
    let dims = manifest.dims();
    let transition = TransitionParams {
        tau: Some(manifest.tau),
        gamma: manifest.gamma,
    };
    let src = BankSource::build(SeedSet::from_seeds(listed.clone()), dims, &transition)?;
    if src.partition.seed_of != listed {
        return Err(CliError::invalid(format!(
            "{}: seeds must be listed in cell order without repeats",
            seeds_path.display()
        )));
    }
    if src.bank.len() != manifest.num_bands
        || src.bank.scaling_index() != Some(manifest.dc_band_index)
    {
        return Err(CliError::invalid(format!(
            "{}: seeds give {} bands, manifest says {}",
            seeds_path.display(),
            src.bank.len(),
            manifest.num_bands
        )));
    }
    Ok((manifest, src))
}

fn read_band(dir: &Path, k: usize, dims: Dims) -> Result<ImageGrid> {
    let path = band_path(dir, k);
    if !path.is_file() {
        return Err(CliError::invalid(format!(
            "missing band file {}",
            path.display()
        )));
    }
    let band = decode_pfm(&read_file(&path)?, &path)?;
    if band.dims() != dims {
        return Err(CliError::invalid(format!(
            "{} is {}x{}, bundle is {}x{}",
            path.display(),
            band.height(),
            band.width(),
            dims.height,
            dims.width
        )));
    }
    let side = sidecar_path(dir, k);
    if !side.is_file() {
        log::info!("{} absent; using single precision samples", side.display());
        return Ok(band);
    }
    let raw = read_file(&side)?;
    if raw.len() != 8 * dims.len() {
        log::info!("{} has the wrong size; ignored", side.display());
        return Ok(band);
    }
    let precise: Vec<f64> = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let agrees = precise
        .iter()
        .zip(band.data())
        .all(|(&p, &s)| (p as f32).to_bits() == (s as f32).to_bits());
    if agrees {
        Ok(ImageGrid::new(dims.height, dims.width, precise)?)
    } else {
        log::info!("{} differs from its PFM; using the PFM", side.display());
        Ok(band)
    }
}

pub fn load_bands(dir: &Path, manifest: &Manifest) -> Result<Vec<ImageGrid>> {
    (0..manifest.num_bands)
        .map(|k| read_band(dir, k, manifest.dims()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_roundtrip() {
        let m = Manifest {
            version: VERSION,
            height: 64,
            width: 48,
            num_bands: 5,
            tau: 0.1 + 0.2,
            gamma: 0.3,
            scale_step: 0.5,
            max_levels: 12,
            dc_band_index: 0,
        };
        let text = m.render();
        assert!(text.contains("tau=3.0000000000000004e-1\n"));
        assert_eq!(Manifest::parse(&text, Path::new("m")).unwrap(), m);
    }

    #[test]
    fn manifest_errors() {
        let p = Path::new("m");
        assert!(Manifest::parse("version=1\nheight=4\n", p).is_err());
        assert!(Manifest::parse("garbage\n", p).is_err());
    }

    #[test]
    fn centered_raster_puts_dc_in_the_middle() {
        let dims = Dims::new(4, 5);
        let mut v = vec![0u16; 20];
        v[0] = 7;
        let c = to_centered(dims, &v);
        assert_eq!(c[5 + 2], 7);
    }
}
