//! Cloud export: CSV tables and binary PPM renders.

use std::io::Write;

use crate::error::{Error, Result};
use crate::rauzy::FractalCloud;
use crate::report::format_fixed;

const PALETTE: [[u8; 3]; 8] = [
    [215, 48, 39],
    [69, 117, 180],
    [26, 152, 80],
    [253, 174, 97],
    [152, 78, 163],
    [77, 175, 74],
    [247, 129, 191],
    [166, 86, 40],
];

const BACKGROUND: [u8; 3] = [255, 255, 255];
const SHARED: [u8; 3] = [0, 0, 0];

/// Height of the strip drawn for one-dimensional clouds.
const STRIP_HEIGHT: usize = 32;

/// Writes `n,label,c1,...,c(m-1)` with reduced coordinates at `digits` decimals.
pub fn write_cloud_csv<W: Write>(cloud: &FractalCloud, digits: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["n".to_string(), "label".to_string()];
    header.extend((1..=cloud.dim()).map(|i| format!("c{i}")));
    w.write_record(&header)?;
    for (n, (coords, label)) in cloud.iter_coords().enumerate() {
        let mut row = vec![n.to_string(), label.to_string()];
        row.extend(coords.iter().map(|&x| format_fixed(x, digits)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Renders the cloud as a binary PPM: a `size x size` square for `m = 3`
/// and a `size x 32` strip for `m = 2`. Pixels holding several letters are black.
pub fn write_cloud_ppm<W: Write>(cloud: &FractalCloud, size: usize, mut out: W) -> Result<()> {
    if size == 0 {
        return Err(Error::InvalidArgument("image size must be positive".into()));
    }
    let (width, height) = match cloud.dim() {
        1 => (size, STRIP_HEIGHT),
        2 => (size, size),
        d => {
            return Err(Error::InvalidArgument(format!(
                "images are drawn for m = 2 or 3, cloud has dimension {d}"
            )))
        }
    };
    let pixel = |x: f64| ((x * size as f64) as usize).min(size - 1);
    let mut masks = vec![0u32; width * height];
    for (coords, label) in cloud.iter_coords() {
        let bit = 1u32 << (label - 1);
        let col = pixel(coords[0]);
        if cloud.dim() == 1 {
            for row in 0..height {
                masks[row * width + col] |= bit;
            }
        } else {
            // y grows upwards
            let row = size - 1 - pixel(coords[1]);
            masks[row * width + col] |= bit;
        }
    }
    write!(out, "P6\n{width} {height}\n255\n")?;
    let mut bytes = Vec::with_capacity(width * height * 3);
    for mask in masks {
        let rgb = match mask.count_ones() {
            0 => BACKGROUND,
            1 => PALETTE[mask.trailing_zeros() as usize % PALETTE.len()],
            _ => SHARED,
        };
        bytes.extend_from_slice(&rgb);
    }
    out.write_all(&bytes)?;
    Ok(())
}
