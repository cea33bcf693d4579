//! Class-mean backgrounds and the padded double images built on them.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::encoder::{CpcrImage, BACKGROUND};
use crate::{Error, Result};

/// Pixel-wise mean of a set of same-shaped images.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanImage {
    pub width: u32,
    pub height: u32,
    pub channels: usize,
    /// Values in `[0, 255]`, same layout as [`CpcrImage::pixels`].
    pub pixels: Vec<f64>,
    pub label: usize,
    /// Case ids of the contributing images.
    pub case_ids: Vec<usize>,
}

/// How a mean is turned back into 8-bit pixels for composition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanRender {
    /// Keep the mean's own channels.
    #[default]
    Own,
    /// Average the channels into one grey value.
    Grey,
}

fn quantize(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

impl MeanImage {
    pub fn count(&self) -> usize {
        self.case_ids.len()
    }

    /// 8-bit rendering with round-half-up.
    pub fn render(&self, mode: MeanRender) -> CpcrImage {
        let pixels = match (mode, self.channels) {
            (MeanRender::Grey, 3) => self
                .pixels
                .chunks_exact(3)
                .map(|p| quantize((p[0] + p[1] + p[2]) / 3.0))
                .collect(),
            _ => self.pixels.iter().map(|&v| quantize(v)).collect(),
        };
        let channels = if mode == MeanRender::Grey { 1 } else { self.channels };
        CpcrImage::from_raw(self.width, self.height, channels, pixels)
            .expect("mean layout matches its own dimensions")
    }

    /// Writes `{stem}.json` (header) and `{stem}.f64` (little-endian pixels).
    pub fn save(&self, stem: &Path) -> Result<()> {
        let header = MeanHeader {
            width: self.width,
            height: self.height,
            channels: self.channels,
            label: self.label,
            case_ids: self.case_ids.clone(),
        };
        let json = stem.with_extension("json");
        std::fs::write(&json, serde_json::to_string_pretty(&header)?)
            .map_err(|e| Error::io(&json, e))?;
        let raw: Vec<u8> = self.pixels.iter().flat_map(|v| v.to_le_bytes()).collect();
        let bin = stem.with_extension("f64");
        std::fs::write(&bin, raw).map_err(|e| Error::io(&bin, e))
    }

    pub fn load(stem: &Path) -> Result<Self> {
        let json = stem.with_extension("json");
        let text = std::fs::read_to_string(&json).map_err(|e| Error::io(&json, e))?;
        let header: MeanHeader = serde_json::from_str(&text)?;
        let bin = stem.with_extension("f64");
        let raw = std::fs::read(&bin).map_err(|e| Error::io(&bin, e))?;
        let expected = header.width as usize * header.height as usize * header.channels;
        if raw.len() != expected * 8 {
            return Err(Error::DimensionMismatch {
                expected: expected * 8,
                found: raw.len(),
            });
        }
        let pixels = raw
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
            .collect();
        Ok(MeanImage {
            width: header.width,
            height: header.height,
            channels: header.channels,
            pixels,
            label: header.label,
            case_ids: header.case_ids,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct MeanHeader {
    width: u32,
    height: u32,
    channels: usize,
    label: usize,
    case_ids: Vec<usize>,
}

fn same_shape(a: &CpcrImage, b: &CpcrImage) -> bool {
    a.width() == b.width() && a.height() == b.height() && a.channels() == b.channels()
}

/// Pixel-wise arithmetic mean. Case ids come from image metadata, or the
/// position in `images` when an image has none.
pub fn class_mean(images: &[&CpcrImage], label: usize) -> Result<MeanImage> {
    let first = images.first().ok_or(Error::Empty("images for a class mean"))?;
    let mut sums = vec![0.0f64; first.pixels().len()];
    let mut case_ids = Vec::with_capacity(images.len());
    for (i, img) in images.iter().enumerate() {
        if !same_shape(first, img) {
            return Err(Error::DimensionMismatch {
                expected: first.pixels().len(),
                found: img.pixels().len(),
            });
        }
        for (s, &p) in sums.iter_mut().zip(img.pixels()) {
            *s += f64::from(p);
        }
        case_ids.push(img.meta.as_ref().map_or(i, |m| m.case_id));
    }
    let n = images.len() as f64;
    Ok(MeanImage {
        width: first.width(),
        height: first.height(),
        channels: first.channels(),
        pixels: sums.into_iter().map(|s| s / n).collect(),
        label,
        case_ids,
    })
}

/// One mean per class, classes `0..n_classes`, from the labeled images.
pub fn class_means(images: &[CpcrImage], labels: &[usize], n_classes: usize) -> Result<Vec<MeanImage>> {
    (0..n_classes)
        .map(|c| {
            let members: Vec<&CpcrImage> = images
                .iter()
                .zip(labels)
                .filter(|(_, &l)| l == c)
                .map(|(img, _)| img)
                .collect();
            if members.is_empty() {
                return Err(Error::invalid(format!("class {c} has no images to average")));
            }
            class_mean(&members, c)
        })
        .collect()
}

/// Overlays the case on each rendered mean and lays the results out left
/// to right: `height × (means · width)`.
pub fn compose_double(case: &CpcrImage, means: &[MeanImage], mode: MeanRender) -> Result<CpcrImage> {
    if means.len() < 2 {
        return Err(Error::invalid(format!(
            "a double image needs at least 2 class means, got {}",
            means.len()
        )));
    }
    let rendered: Vec<CpcrImage> = means.iter().map(|m| m.render(mode)).collect();
    for m in &rendered {
        if m.width() != case.width() || m.height() != case.height() {
            return Err(Error::Geometry(format!(
                "case is {}x{}, mean is {}x{}",
                case.width(),
                case.height(),
                m.width(),
                m.height()
            )));
        }
    }
    let channels = rendered
        .iter()
        .map(CpcrImage::channels)
        .chain(std::iter::once(case.channels()))
        .max()
        .unwrap();
    let widen = |img: &CpcrImage| if channels == 3 { img.to_rgb() } else { img.clone() };
    let case = widen(case);
    let (w, h) = (case.width(), case.height());
    let mut out = CpcrImage::blank(w * means.len() as u32, h, channels);
    for (i, mean) in rendered.iter().map(widen).enumerate() {
        let x0 = i as u32 * w;
        for row in 0..h {
            for col in 0..w {
                let src = if case.is_background(col, row) { &mean } else { &case };
                out.set_pixel(x0 + col, row, src.pixel(col, row));
            }
        }
    }
    out.meta = case.meta.clone();
    Ok(out)
}

/// Adds white rows to make a `h × (c·h)` image square; the odd row goes
/// below.
pub fn pad_square(image: &CpcrImage) -> Result<CpcrImage> {
    let (w, h) = (image.width(), image.height());
    if h == 0 || w % h != 0 {
        return Err(Error::Geometry(format!(
            "width {w} is not a multiple of height {h}"
        )));
    }
    let extra = w - h;
    let top = extra / 2;
    let row_len = w as usize * image.channels();
    let mut pixels = vec![BACKGROUND; row_len * w as usize];
    let start = top as usize * row_len;
    pixels[start..start + image.pixels().len()].copy_from_slice(image.pixels());
    let mut out = CpcrImage::from_raw(w, w, image.channels(), pixels)?;
    out.meta = image.meta.clone();
    Ok(out)
}

/// `pad_square(compose_double(case, means))`.
pub fn contextualize(case: &CpcrImage, means: &[MeanImage], mode: MeanRender) -> Result<CpcrImage> {
    pad_square(&compose_double(case, means, mode)?)
}

/// Where a single-image pixel shows up in a composed, padded image built
/// from `panels` panels of a `side × side` case.
pub fn panel_offsets(side: u32, panels: usize) -> Vec<(u32, u32)> {
    let total = side * panels as u32;
    let top = (total - side) / 2;
    (0..panels as u32).map(|i| (i * side, top)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solid(w: u32, h: u32, channels: usize, v: u8) -> CpcrImage {
        CpcrImage::from_raw(w, h, channels, vec![v; (w * h) as usize * channels]).unwrap()
    }

    #[test]
    fn mean_of_black_and_white_renders_128() {
        let (a, b) = (solid(3, 3, 1, 0), solid(3, 3, 1, 255));
        let m = class_mean(&[&a, &b], 0).unwrap();
        assert!(m.pixels.iter().all(|&v| v == 127.5));
        assert!(m.render(MeanRender::Own).pixels().iter().all(|&v| v == 128));
        assert_eq!(m.case_ids, vec![0, 1]);
    }

    #[test]
    fn mean_of_one_image_is_the_image() {
        let mut img = solid(4, 4, 3, 255);
        img.set_pixel(1, 2, &[10, 20, 30]);
        let m = class_mean(&[&img], 1).unwrap();
        assert_eq!(m.render(MeanRender::Own), img);
        assert_eq!(m.render(MeanRender::Grey).pixel(1, 2), &[20]);
    }

    #[test]
    fn mean_errors() {
        assert!(class_mean(&[], 0).is_err());
        let (a, b) = (solid(3, 3, 1, 0), solid(3, 4, 1, 0));
        assert!(class_mean(&[&a, &b], 0).is_err());
    }

    #[test]
    fn empty_case_shows_means_side_by_side() {
        let means = [
            class_mean(&[&solid(2, 2, 1, 40)], 0).unwrap(),
            class_mean(&[&solid(2, 2, 1, 90)], 1).unwrap(),
        ];
        let d = compose_double(&solid(2, 2, 1, 255), &means, MeanRender::Own).unwrap();
        assert_eq!((d.width(), d.height()), (4, 2));
        assert_eq!(d.pixels(), &[40, 40, 90, 90, 40, 40, 90, 90]);
    }

    #[test]
    fn case_pixels_show_in_every_half() {
        let means = [
            class_mean(&[&solid(3, 3, 1, 200)], 0).unwrap(),
            class_mean(&[&solid(3, 3, 1, 100)], 1).unwrap(),
            class_mean(&[&solid(3, 3, 1, 50)], 2).unwrap(),
        ];
        let mut case = solid(3, 3, 1, 255);
        case.set_pixel(2, 1, &[0]);
        let d = compose_double(&case, &means, MeanRender::Own).unwrap();
        for x0 in [0, 3, 6] {
            assert_eq!(d.pixel(x0 + 2, 1), &[0]);
        }
        let p = pad_square(&d).unwrap();
        assert_eq!((p.width(), p.height()), (9, 9));
        assert_eq!(p.pixel(5, 4), &[0]);
        assert!(p.is_background(5, 0));
        assert_eq!(panel_offsets(3, 3), vec![(0, 3), (3, 3), (6, 3)]);
    }

    #[test]
    fn color_case_on_grey_mean_is_rgb() {
        let means = [
            class_mean(&[&solid(2, 2, 3, 30)], 0).unwrap(),
            class_mean(&[&solid(2, 2, 3, 60)], 1).unwrap(),
        ];
        let mut case = solid(2, 2, 3, 255);
        case.set_pixel(0, 0, &[0, 255, 255]);
        let d = compose_double(&case, &means, MeanRender::Grey).unwrap();
        assert_eq!(d.channels(), 3);
        assert_eq!(d.pixel(2, 0), &[0, 255, 255]);
        assert_eq!(d.pixel(3, 1), &[60, 60, 60]);
    }

    #[test]
    fn padding_rules() {
        let p = pad_square(&solid(60, 30, 1, 0)).unwrap();
        assert_eq!((p.width(), p.height()), (60, 60));
        assert!(p.is_background(0, 14));
        assert_eq!(p.pixel(0, 15), &[0]);
        assert_eq!(p.pixel(0, 44), &[0]);
        assert!(p.is_background(0, 45));

        let odd = pad_square(&solid(6, 3, 1, 0)).unwrap();
        let rows: Vec<u8> = odd.pixels().chunks(6).map(|r| r[0]).collect();
        assert_eq!(rows, vec![255, 0, 0, 0, 255, 255]);
        let square = solid(5, 5, 1, 7);
        assert_eq!(pad_square(&square).unwrap(), square);
        assert!(pad_square(&solid(7, 3, 1, 0)).is_err());
    }

    #[test]
    fn mean_sidecar_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (solid(3, 2, 1, 1), solid(3, 2, 1, 4));
        let m = class_mean(&[&a, &b], 1).unwrap();
        let stem = dir.path().join("mean_1");
        m.save(&stem).unwrap();
        assert_eq!(MeanImage::load(&stem).unwrap(), m);
    }
}
