use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder};
use serde::{Deserialize, Serialize};

use super::config::EncodingConfig;
use super::pairing::Pairing;
use super::render::{CpcrImage, ImageMeta};
use crate::{Error, Result};

/// File-name suffix for composed context images.
pub const CONTEXT_SUFFIX: &str = "_ctx";

fn color_type(image: &CpcrImage) -> ExtendedColorType {
    if image.channels() == 1 {
        ExtendedColorType::L8
    } else {
        ExtendedColorType::Rgb8
    }
}

/// Writes an 8-bit gray or RGB PNG.
pub fn write_png(image: &CpcrImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    image::save_buffer_with_format(
        path,
        image.pixels(),
        image.width(),
        image.height(),
        color_type(image),
        image::ImageFormat::Png,
    )?;
    Ok(())
}

/// Writes binary PGM (1 channel) or PPM (3 channels).
pub fn write_pnm(image: &CpcrImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let subtype = if image.channels() == 1 {
        PnmSubtype::Graymap(SampleEncoding::Binary)
    } else {
        PnmSubtype::Pixmap(SampleEncoding::Binary)
    };
    PnmEncoder::new(BufWriter::new(file))
        .with_subtype(subtype)
        .write_image(image.pixels(), image.width(), image.height(), color_type(image))?;
    Ok(())
}

/// Reads a PNG or PNM file. Gray images load with 1 channel, everything
/// else as RGB. No metadata is attached.
pub fn read_image(path: impl AsRef<Path>) -> Result<CpcrImage> {
    let path = path.as_ref();
    let dynamic = image::open(path)?;
    let gray = matches!(
        dynamic.color(),
        image::ColorType::L8 | image::ColorType::L16 | image::ColorType::La8
    );
    if gray {
        let buf = dynamic.into_luma8();
        CpcrImage::from_raw(buf.width(), buf.height(), 1, buf.into_raw())
    } else {
        let buf = dynamic.into_rgb8();
        CpcrImage::from_raw(buf.width(), buf.height(), 3, buf.into_raw())
    }
}

/// Everything needed to decode an exported image or to train on it
/// elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub dataset: String,
    pub case_id: usize,
    pub label: Option<usize>,
    pub class_name: Option<String>,
    pub config: EncodingConfig,
    pub pairing: Pairing,
}

impl Sidecar {
    pub fn meta(&self) -> ImageMeta {
        ImageMeta {
            config: self.config.clone(),
            case_id: self.case_id,
            label: self.label,
        }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// `{dir}/{dataset}_{case_id}{suffix}` without extension.
pub fn case_stem(dir: &Path, dataset: &str, case_id: usize, suffix: &str) -> PathBuf {
    dir.join(format!("{dataset}_{case_id}{suffix}"))
}

/// Paths written by [`export_case`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExportedCase {
    pub image: PathBuf,
    pub sidecar: PathBuf,
}

/// Writes `{dataset}_{case_id}{suffix}.png` (or `.pgm`/`.ppm` when `pnm`)
/// plus its JSON sidecar into `dir`.
pub fn export_case(
    dir: &Path,
    image: &CpcrImage,
    sidecar: &Sidecar,
    suffix: &str,
    pnm: bool,
) -> Result<ExportedCase> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = case_stem(dir, &sidecar.dataset, sidecar.case_id, suffix);
    let image_path = if pnm {
        let ext = if image.channels() == 1 { "pgm" } else { "ppm" };
        let p = stem.with_extension(ext);
        write_pnm(image, &p)?;
        p
    } else {
        let p = stem.with_extension("png");
        write_png(image, &p)?;
        p
    };
    let sidecar_path = stem.with_extension("json");
    sidecar.write(&sidecar_path)?;
    Ok(ExportedCase {
        image: image_path,
        sidecar: sidecar_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DiscretePoint;
    use crate::encoder::{encode, ColorMode};

    fn five_pair_record() -> (CpcrImage, Sidecar) {
        let point = DiscretePoint::new(vec![8, 10, 10, 8, 7, 10, 9, 7, 1, 1], 1, 10)
            .unwrap()
            .with_case_id(4);
        let config = EncodingConfig::new(10, 5).unwrap().with_cell_px(2);
        let pairing = Pairing::identity(10);
        let image = encode(&point, &pairing, &config).unwrap();
        let sidecar = Sidecar {
            dataset: "wbc".into(),
            case_id: 4,
            label: Some(1),
            class_name: None,
            config,
            pairing,
        };
        (image, sidecar)
    }

    #[test]
    fn png_and_pgm_round_trip_pixels() {
        let dir = tempfile::tempdir().unwrap();
        let (image, sidecar) = five_pair_record();
        let png = export_case(dir.path(), &image, &sidecar, "", false).unwrap();
        assert!(png.image.ends_with("wbc_4.png"));
        let back = read_image(&png.image).unwrap();
        assert_eq!(back.pixels(), image.pixels());
        assert_eq!(Sidecar::read(&png.sidecar).unwrap(), sidecar);

        let pgm = export_case(dir.path(), &image, &sidecar, CONTEXT_SUFFIX, true).unwrap();
        assert!(pgm.image.ends_with("wbc_4_ctx.pgm"));
        assert_eq!(read_image(&pgm.image).unwrap().pixels(), image.pixels());
    }

    #[test]
    fn rgb_png_keeps_three_channels() {
        let dir = tempfile::tempdir().unwrap();
        let (_, mut sidecar) = five_pair_record();
        sidecar.config = sidecar.config.with_color_mode(ColorMode::RandomRgb);
        let point = DiscretePoint::new(vec![1, 2, 3, 4, 5, 6, 7, 8, 9, 10], 0, 10).unwrap();
        let image = encode(&point, &sidecar.pairing, &sidecar.config).unwrap();
        let out = export_case(dir.path(), &image, &sidecar, "", false).unwrap();
        let back = read_image(&out.image).unwrap();
        assert_eq!(back.channels(), 3);
        assert_eq!(back.pixels(), image.pixels());
        let ppm = dir.path().join("x.ppm");
        write_pnm(&image, &ppm).unwrap();
        assert_eq!(read_image(&ppm).unwrap().pixels(), image.pixels());
    }
}
