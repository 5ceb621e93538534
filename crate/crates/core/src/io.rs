//! CSV, JSON and PGM readers and writers for laws, layouts, band scans and
//! intensity maps.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::design::{CouplingLaw, LawRow, LayoutRecord, WaveguideLayout};
use crate::error::{Error, Result};
use crate::spectral::BandScan;

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn read_records<T: DeserializeOwned, R: Read>(reader: R) -> Result<Vec<T>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

fn write_records<T: Serialize, W: Write>(writer: W, records: &[T], header: &[&str]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    wtr.write_record(header)?;
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub const LAW_HEADER: [&str; 3] = ["wavelength_nm", "A_per_cm", "gamma_per_um"];

pub fn read_law<R: Read>(reader: R) -> Result<CouplingLaw> {
    CouplingLaw::new(read_records::<LawRow, _>(reader)?)
}

pub fn write_law<W: Write>(writer: W, law: &CouplingLaw) -> Result<()> {
    write_records(writer, law.rows(), &LAW_HEADER)
}

pub fn read_law_file(path: &Path) -> Result<CouplingLaw> {
    read_law(File::open(path)?)
}

pub fn write_law_file(path: &Path, law: &CouplingLaw) -> Result<()> {
    write_law(create(path)?, law)
}

pub const LAYOUT_HEADER: [&str; 6] = ["z_cm", "wg_index", "ix", "iy", "x_um", "y_um"];

pub fn read_layout<R: Read>(reader: R) -> Result<WaveguideLayout> {
    WaveguideLayout::from_records(&read_records::<LayoutRecord, _>(reader)?)
}

pub fn write_layout<W: Write>(writer: W, layout: &WaveguideLayout) -> Result<()> {
    write_records(writer, &layout.records(), &LAYOUT_HEADER)
}

pub fn read_layout_file(path: &Path) -> Result<WaveguideLayout> {
    read_layout(File::open(path)?)
}

pub fn write_layout_file(path: &Path, layout: &WaveguideLayout) -> Result<()> {
    write_layout(create(path)?, layout)
}

/// One row of a band-scan export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandRecord {
    pub sample: usize,
    pub phi_x: f64,
    pub phi_y: f64,
    pub state_index: usize,
    pub energy_per_cm: f64,
    /// Empty when the scan was not classified.
    pub class: String,
}

pub const BANDS_HEADER: [&str; 6] = ["sample", "phi_x", "phi_y", "state_index", "energy_per_cm", "class"];

pub fn band_records(scan: &BandScan) -> Vec<BandRecord> {
    let mut out = Vec::new();
    for (s, (pump, energies)) in scan.path.iter().zip(&scan.energies).enumerate() {
        for (k, &e) in energies.iter().enumerate() {
            let class = match &scan.classes {
                Some(c) => c[s][k].to_string(),
                None => String::new(),
            };
            out.push(BandRecord {
                sample: s,
                phi_x: pump.phi_x(),
                phi_y: pump.phi_y(),
                state_index: k,
                energy_per_cm: e,
                class,
            });
        }
    }
    out
}

pub fn write_bands<W: Write>(writer: W, scan: &BandScan) -> Result<()> {
    write_records(writer, &band_records(scan), &BANDS_HEADER)
}

pub fn read_bands<R: Read>(reader: R) -> Result<Vec<BandRecord>> {
    read_records(reader)
}

pub fn write_bands_file(path: &Path, scan: &BandScan) -> Result<()> {
    write_bands(create(path)?, scan)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensityRecord {
    pub ix: usize,
    pub iy: usize,
    pub intensity: f64,
}

pub const INTENSITY_HEADER: [&str; 3] = ["ix", "iy", "intensity"];

fn check_map(intensity: &[f64], size_x: usize, size_y: usize) -> Result<()> {
    if intensity.len() != size_x * size_y {
        return Err(Error::DimensionMismatch {
            expected: size_x * size_y,
            actual: intensity.len(),
        });
    }
    Ok(())
}

/// Rows in site order (`x` fastest).
pub fn write_intensity<W: Write>(writer: W, intensity: &[f64], size_x: usize, size_y: usize) -> Result<()> {
    check_map(intensity, size_x, size_y)?;
    let records: Vec<IntensityRecord> = intensity
        .iter()
        .enumerate()
        .map(|(i, &v)| IntensityRecord {
            ix: i % size_x,
            iy: i / size_x,
            intensity: v,
        })
        .collect();
    write_records(writer, &records, &INTENSITY_HEADER)
}

pub fn read_intensity<R: Read>(reader: R) -> Result<Vec<IntensityRecord>> {
    read_records(reader)
}

pub fn write_intensity_file(path: &Path, intensity: &[f64], size_x: usize, size_y: usize) -> Result<()> {
    write_intensity(create(path)?, intensity, size_x, size_y)
}

/// Binary 8-bit graymap, one pixel per site, top row (`iy = size_y − 1`)
/// first, scaled so the brightest site is 255.
pub fn write_pgm<W: Write>(mut writer: W, intensity: &[f64], size_x: usize, size_y: usize) -> Result<()> {
    check_map(intensity, size_x, size_y)?;
    let max = intensity.iter().cloned().fold(0.0, f64::max);
    write!(writer, "P5\n{size_x} {size_y}\n255\n")?;
    let mut pixels = Vec::with_capacity(intensity.len());
    for y in (0..size_y).rev() {
        for x in 0..size_x {
            let v = intensity[y * size_x + x];
            let level = if max > 0.0 { (255.0 * v / max).round().clamp(0.0, 255.0) } else { 0.0 };
            pixels.push(level as u8);
        }
    }
    writer.write_all(&pixels)?;
    writer.flush()?;
    Ok(())
}

pub fn write_pgm_file(path: &Path, intensity: &[f64], size_x: usize, size_y: usize) -> Result<()> {
    write_pgm(create(path)?, intensity, size_x, size_y)
}

/// `(width, height, pixels)` of a binary graymap written by [`write_pgm`].
pub fn read_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let bad = |m: &str| Error::Parse(format!("PGM: {m}"));
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("non-ASCII header"))?);
    }
    if fields[0] != "P5" || fields[3] != "255" {
        return Err(bad("expected P5 with maxval 255"));
    }
    let w: usize = fields[1].parse().map_err(|_| bad("width"))?;
    let h: usize = fields[2].parse().map_err(|_| bad("height"))?;
    let data = &bytes[(pos + 1).min(bytes.len())..];
    if data.len() != w * h {
        return Err(bad("pixel count does not match the header"));
    }
    Ok((w, h, data.to_vec()))
}

/// Pretty-printed with a trailing newline.
pub fn write_json<T: Serialize + ?Sized, W: Write>(mut writer: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, value)?;
    writer.write_all(b"\n")?;
    writer.flush()?;
    Ok(())
}

pub fn write_json_file<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_json(create(path)?, value)
}

pub fn read_json_file<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?)
}
