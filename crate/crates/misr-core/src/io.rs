//! Image file I/O: binary PGM (P5) and 8-bit PNG (gray / RGB).
//!
//! Floating-point data is clamped to [0, 255] and rounded on save; loading
//! 8-bit data is lossless, so save-then-load round trips exactly.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{ImageGray, ImageRgb};

/// A decoded image file: grayscale or RGB.
#[derive(Debug, Clone)]
pub enum LoadedImage {
    Gray(ImageGray),
    Rgb(ImageRgb),
}

impl LoadedImage {
    /// Luminance plane: gray images pass through, RGB converts via BT.601.
    pub fn into_luma(self) -> Result<ImageGray> {
        match self {
            LoadedImage::Gray(g) => Ok(g),
            LoadedImage::Rgb(rgb) => Ok(crate::color::rgb_to_yuv(&rgb)?.y),
        }
    }
}

fn quantize(v: f64) -> u8 {
    v.clamp(0.0, 255.0).round() as u8
}

// ---------------------------------------------------------------------------
// PGM (P5, 8-bit, maxval 255)
// ---------------------------------------------------------------------------

pub fn save_pgm(path: &Path, image: &ImageGray) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e)))?;
    let mut w = BufWriter::new(file);
    write!(w, "P5\n{} {}\n255\n", image.width(), image.height())?;
    let bytes: Vec<u8> = image.data().iter().map(|&v| quantize(v)).collect();
    w.write_all(&bytes)?;
    Ok(())
}

/// Consume PGM header whitespace and `#` comment lines.
fn skip_pgm_separators(bytes: &[u8], mut pos: usize) -> usize {
    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
        } else {
            return pos;
        }
    }
}

fn read_pgm_number(bytes: &[u8], pos: usize) -> Result<(usize, usize)> {
    let start = skip_pgm_separators(bytes, pos);
    let mut end = start;
    while end < bytes.len() && bytes[end].is_ascii_digit() {
        end += 1;
    }
    if end == start {
        return Err(Error::MalformedFile("expected integer in PGM header".into()));
    }
    let text = std::str::from_utf8(&bytes[start..end])
        .map_err(|_| Error::MalformedFile("non-ascii PGM header".into()))?;
    let value = text
        .parse::<usize>()
        .map_err(|_| Error::MalformedFile(format!("bad PGM header number '{}'", text)))?;
    Ok((value, end))
}

pub fn load_pgm(path: &Path) -> Result<ImageGray> {
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e)))?;
    let mut bytes = Vec::new();
    BufReader::new(file).read_to_end(&mut bytes)?;
    if bytes.len() < 2 || &bytes[0..2] != b"P5" {
        return Err(Error::MalformedFile(format!(
            "{}: not a binary PGM (missing P5 magic)",
            path.display()
        )));
    }
    let (width, pos) = read_pgm_number(&bytes, 2)?;
    let (height, pos) = read_pgm_number(&bytes, pos)?;
    let (maxval, pos) = read_pgm_number(&bytes, pos)?;
    if maxval != 255 {
        return Err(Error::UnsupportedFormat(format!(
            "{}: PGM maxval {} (only 8-bit maxval 255 supported)",
            path.display(),
            maxval
        )));
    }
    // exactly one whitespace byte between header and raster
    let data_start = pos + 1;
    let expected = height * width;
    if bytes.len() < data_start + expected {
        return Err(Error::MalformedFile(format!(
            "{}: raster truncated ({} bytes, need {})",
            path.display(),
            bytes.len().saturating_sub(data_start),
            expected
        )));
    }
    let data = bytes[data_start..data_start + expected]
        .iter()
        .map(|&b| b as f64)
        .collect();
    ImageGray::from_data(height, width, data)
}

// ---------------------------------------------------------------------------
// PNG (8-bit gray and RGB)
// ---------------------------------------------------------------------------

pub fn save_png_gray(path: &Path, image: &ImageGray) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e)))?;
    let mut encoder = png::Encoder::new(
        BufWriter::new(file),
        image.width() as u32,
        image.height() as u32,
    );
    encoder.set_color(png::ColorType::Grayscale);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder
        .write_header()
        .map_err(|e| Error::Io(format!("png encode: {}", e)))?;
    let bytes: Vec<u8> = image.data().iter().map(|&v| quantize(v)).collect();
    writer
        .write_image_data(&bytes)
        .map_err(|e| Error::Io(format!("png encode: {}", e)))?;
    Ok(())
}

pub fn save_png_rgb(path: &Path, image: &ImageRgb) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e)))?;
    let mut encoder = png::Encoder::new(
        BufWriter::new(file),
        image.r.width() as u32,
        image.r.height() as u32,
    );
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder
        .write_header()
        .map_err(|e| Error::Io(format!("png encode: {}", e)))?;
    let mut bytes = Vec::with_capacity(image.r.data().len() * 3);
    for i in 0..image.r.data().len() {
        bytes.push(quantize(image.r.data()[i]));
        bytes.push(quantize(image.g.data()[i]));
        bytes.push(quantize(image.b.data()[i]));
    }
    writer
        .write_image_data(&bytes)
        .map_err(|e| Error::Io(format!("png encode: {}", e)))?;
    Ok(())
}

pub fn load_png(path: &Path) -> Result<LoadedImage> {
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e)))?;
    let decoder = png::Decoder::new(BufReader::new(file));
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::MalformedFile(format!("{}: {}", path.display(), e)))?;
    let mut buf = vec![0u8; reader.output_buffer_size()];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::MalformedFile(format!("{}: {}", path.display(), e)))?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedFormat(format!(
            "{}: only 8-bit PNG supported, got {:?}",
            path.display(),
            info.bit_depth
        )));
    }
    let (h, w) = (info.height as usize, info.width as usize);
    let pixels = &buf[..info.buffer_size()];
    match info.color_type {
        png::ColorType::Grayscale => {
            let data = pixels.iter().map(|&b| b as f64).collect();
            Ok(LoadedImage::Gray(ImageGray::from_data(h, w, data)?))
        }
        png::ColorType::Rgb => {
            let mut r = Vec::with_capacity(h * w);
            let mut g = Vec::with_capacity(h * w);
            let mut b = Vec::with_capacity(h * w);
            for px in pixels.chunks_exact(3) {
                r.push(px[0] as f64);
                g.push(px[1] as f64);
                b.push(px[2] as f64);
            }
            Ok(LoadedImage::Rgb(ImageRgb::new(
                ImageGray::from_data(h, w, r)?,
                ImageGray::from_data(h, w, g)?,
                ImageGray::from_data(h, w, b)?,
            )?))
        }
        other => Err(Error::UnsupportedFormat(format!(
            "{}: unsupported PNG color type {:?}",
            path.display(),
            other
        ))),
    }
}

/// Load by extension: `.pgm` or `.png` (case-insensitive).
pub fn load_image(path: &Path) -> Result<LoadedImage> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("pgm") => Ok(LoadedImage::Gray(load_pgm(path)?)),
        Some("png") => load_png(path),
        other => Err(Error::UnsupportedFormat(format!(
            "{}: unknown extension {:?} (expected .pgm or .png)",
            path.display(),
            other
        ))),
    }
}

/// Save a grayscale image by extension: `.pgm` or `.png`.
pub fn save_image(path: &Path, image: &ImageGray) -> Result<()> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("pgm") => save_pgm(path, image),
        Some("png") => save_png_gray(path, image),
        other => Err(Error::UnsupportedFormat(format!(
            "{}: unknown extension {:?} (expected .pgm or .png)",
            path.display(),
            other
        ))),
    }
}
