//! Binary PGM/PPM (maxval 255) images and their tensor layout: an
//! `h x w` image with `c` channels becomes an `h x c x w` tensor with
//! `M(i, ch, k)` the channel value at row `i`, column `k`, divided by 255.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use image::codecs::pnm::{PnmDecoder, PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType};
use tubal::{Dims, Tensor3};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    /// 1 (gray) or 3 (RGB).
    pub channels: usize,
    /// Row-major, channels interleaved.
    pub pixels: Vec<u8>,
}

fn unsupported(path: &Path, why: impl std::fmt::Display) -> CliError {
    CliError::UnsupportedFormat(format!("{}: {why}", path.display()))
}

pub fn read_image(path: &Path) -> CliResult<Image> {
    let reader = BufReader::new(File::open(path)?);
    let decoder = PnmDecoder::new(reader).map_err(|e| unsupported(path, e))?;
    let header = decoder.header();
    let channels = match header.subtype() {
        PnmSubtype::Graymap(SampleEncoding::Binary) => 1,
        PnmSubtype::Pixmap(SampleEncoding::Binary) => 3,
        other => return Err(unsupported(path, format!("{other:?}, need binary P5 or P6"))),
    };
    if header.maximal_sample() != 255 {
        return Err(unsupported(path, format!("maxval {}, need 255", header.maximal_sample())));
    }
    let img = DynamicImage::from_decoder(decoder).map_err(|e| unsupported(path, e))?;
    let (width, height) = (img.width() as usize, img.height() as usize);
    let pixels = if channels == 1 {
        img.into_luma8().into_raw()
    } else {
        img.into_rgb8().into_raw()
    };
    Ok(Image {
        width,
        height,
        channels,
        pixels,
    })
}

pub fn write_image(path: &Path, img: &Image) -> CliResult<()> {
    let (subtype, color) = if img.channels == 1 {
        (PnmSubtype::Graymap(SampleEncoding::Binary), ExtendedColorType::L8)
    } else {
        (PnmSubtype::Pixmap(SampleEncoding::Binary), ExtendedColorType::Rgb8)
    };
    let out = BufWriter::new(File::create(path)?);
    PnmEncoder::new(out)
        .with_subtype(subtype)
        .encode(img.pixels.as_slice(), img.width as u32, img.height as u32, color)
        .map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(())
}

impl Image {
    pub fn dims(&self) -> CliResult<Dims> {
        Ok(Dims::new(self.height, self.channels, self.width)?)
    }

    pub fn to_tensor(&self) -> CliResult<Tensor3> {
        let c = self.channels;
        let w = self.width;
        Ok(Tensor3::from_fn(self.dims()?, |i, ch, k| {
            self.pixels[(i * w + k) * c + ch] as f64 / 255.0
        }))
    }

    /// Clamps to `[0, 1]` and rounds to 8 bits.
    pub fn from_tensor(t: &Tensor3) -> Image {
        let (h, c, w) = (t.n1(), t.n2(), t.n3());
        let mut pixels = vec![0u8; h * w * c];
        for i in 0..h {
            for k in 0..w {
                for ch in 0..c {
                    pixels[(i * w + k) * c + ch] = quantize(t.get(i, ch, k));
                }
            }
        }
        Image {
            width: w,
            height: h,
            channels: c,
            pixels,
        }
    }
}

pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}
