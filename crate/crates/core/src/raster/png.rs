use std::path::Path;

use image::{DynamicImage, GrayImage, ImageBuffer, Rgb, RgbImage};

use super::{BinaryMask, ColorPalette, LabelMap, Raster};
use crate::error::{Error, Result};

fn open(path: &Path) -> Result<DynamicImage> {
    if !path.exists() {
        return Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
        ));
    }
    image::open(path).map_err(|e| Error::Image {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn write(img: &DynamicImage, path: &Path) -> Result<()> {
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::Image {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
}

/// Decodes an 8-bit RGB label image through `palette`.
pub fn load_label_png(path: impl AsRef<Path>, palette: &ColorPalette) -> Result<LabelMap> {
    let path = path.as_ref();
    let img = match open(path)? {
        DynamicImage::ImageRgb8(img) => img,
        other => {
            return Err(Error::Image {
                path: path.to_path_buf(),
                message: format!("expected 8-bit RGB, found {:?}", other.color()),
            })
        }
    };
    labels_from_rgb(&img, palette)
}

pub(crate) fn labels_from_rgb(img: &RgbImage, palette: &ColorPalette) -> Result<LabelMap> {
    let (w, h) = img.dimensions();
    let mut labels = Vec::with_capacity((w * h) as usize);
    for (x, y, px) in img.enumerate_pixels() {
        let [r, g, b] = px.0;
        let label = palette
            .label_of(px.0)
            .ok_or(Error::UnknownColor { r, g, b, x, y })?;
        labels.push(label);
    }
    LabelMap::new(w as usize, h as usize, labels, palette.len() as u8)
}

pub fn save_label_png(
    map: &LabelMap,
    palette: &ColorPalette,
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut img: RgbImage = ImageBuffer::new(map.width() as u32, map.height() as u32);
    for (x, y, px) in img.enumerate_pixels_mut() {
        let label = map.get(x as usize, y as usize);
        let rgb = palette.color_of(label).ok_or(Error::LabelOutOfPalette {
            label,
            size: palette.len(),
        })?;
        *px = Rgb(rgb);
    }
    write(&DynamicImage::ImageRgb8(img), path.as_ref())
}

/// Loads a building mask from either an 8-bit grayscale image (nonzero is
/// building) or an RGB label image, in which case the palette's building
/// label is extracted.
pub fn load_mask_png(path: impl AsRef<Path>, palette: &ColorPalette) -> Result<BinaryMask> {
    let path = path.as_ref();
    match open(path)? {
        DynamicImage::ImageLuma8(img) => {
            let (w, h) = img.dimensions();
            let bits = img.pixels().map(|p| p.0[0] != 0).collect();
            BinaryMask::new(w as usize, h as usize, bits)
        }
        DynamicImage::ImageRgb8(img) => Ok(BinaryMask::from_label(
            &labels_from_rgb(&img, palette)?,
            ColorPalette::BUILDING,
        )),
        other => Err(Error::Image {
            path: path.to_path_buf(),
            message: format!("expected 8-bit gray or RGB, found {:?}", other.color()),
        }),
    }
}

/// Writes a mask as 8-bit grayscale, `1 -> 255`.
pub fn save_mask_png(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    let raster: &Raster<bool> = mask.raster();
    let img = GrayImage::from_fn(raster.width() as u32, raster.height() as u32, |x, y| {
        image::Luma([if raster.get(x as usize, y as usize) { 255 } else { 0 }])
    });
    write(&DynamicImage::ImageLuma8(img), path.as_ref())
}
