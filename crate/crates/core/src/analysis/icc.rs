use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{fit, fold_seed, prepare_fold, MlpSpec, TrainConfig};
use crate::context::{panel_offsets, MeanRender};
use crate::data::{DiscreteDataset, FoldPlan};
use crate::encoder::{encode_all, CpcrImage, EncodingConfig, Pairing, BACKGROUND};
use crate::{Error, Result};

/// A `block × block` square of grid coordinates.
///
/// Ids run `1..=(G/block)²`, left to right along `x`, then upward in `y`:
/// cell 1 holds `x, y ∈ {1..block}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IccCell {
    pub id: usize,
    pub block: u32,
    /// Lowest covered `x` and `y`.
    pub x0: u32,
    pub y0: u32,
}

impl IccCell {
    pub fn contains(&self, (x, y): (u32, u32)) -> bool {
        (self.x0..self.x0 + self.block).contains(&x) && (self.y0..self.y0 + self.block).contains(&y)
    }

    /// Covered grid coordinates, ordered by `x` then `y`.
    pub fn coords(&self) -> Vec<(u32, u32)> {
        (self.x0..self.x0 + self.block)
            .flat_map(|x| (self.y0..self.y0 + self.block).map(move |y| (x, y)))
            .collect()
    }

    /// Pixel rectangle `(column, row, width, height)` of the cell in a
    /// single image rendered under `config`.
    pub fn pixel_rect(&self, config: &EncodingConfig) -> (u32, u32, u32, u32) {
        let top = self.y0 + self.block - 1;
        let (c0, r_low) = config.cell_origin((self.x0, self.y0));
        let (_, r_high) = config.cell_origin((self.x0, top));
        let side = self.block * config.cell_px;
        (c0, r_low.min(r_high), side, side)
    }
}

/// Tiles the `G × G` grid with `block × block` cells.
pub fn icc_cells(grid: u32, block: u32) -> Result<Vec<IccCell>> {
    if block == 0 || !grid.is_multiple_of(block) {
        return Err(Error::invalid(format!(
            "block {block} does not divide grid {grid}"
        )));
    }
    let per_side = grid / block;
    Ok((0..per_side)
        .flat_map(|by| (0..per_side).map(move |bx| (bx, by)))
        .map(|(bx, by)| IccCell {
            id: (by * per_side + bx + 1) as usize,
            block,
            x0: bx * block + 1,
            y0: by * block + 1,
        })
        .collect())
}

/// Whites out `cell` in a single image or in every panel of a composed
/// context image; all other pixels are left untouched.
pub fn cover_cell(image: &CpcrImage, cell: &IccCell, config: &EncodingConfig) -> Result<CpcrImage> {
    let side = config.side();
    if cell.x0 + cell.block - 1 > config.grid || cell.y0 + cell.block - 1 > config.grid {
        return Err(Error::Geometry(format!(
            "cell {} lies outside the {}-grid",
            cell.id, config.grid
        )));
    }
    let offsets = if image.width() == side && image.height() == side {
        vec![(0, 0)]
    } else if image.width() == image.height() && image.width().is_multiple_of(side) && image.width() > side {
        panel_offsets(side, (image.width() / side) as usize)
    } else {
        return Err(Error::Geometry(format!(
            "{}x{} image does not match a {side}-pixel encoding",
            image.width(),
            image.height()
        )));
    };
    let (c, r, w, h) = cell.pixel_rect(config);
    let white = vec![BACKGROUND; image.channels()];
    let mut out = image.clone();
    for (dx, dy) in offsets {
        out.fill_rect(c + dx, r + dy, w, h, &white);
    }
    Ok(out)
}

/// Covered accuracy of one cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellScore {
    pub cell: IccCell,
    /// Mean over folds.
    pub accuracy: f64,
    pub fold_accuracies: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IccReport {
    /// Indexed by cell id − 1.
    pub cells: Vec<CellScore>,
    /// Cell ids by covered accuracy ascending, ties to the lower id.
    pub ranking: Vec<usize>,
    /// Mean validation accuracy with nothing covered.
    pub baseline_accuracy: f64,
    pub most_informative: usize,
}

impl IccReport {
    fn from_scores(cells: Vec<CellScore>, baseline_accuracy: f64) -> Self {
        let mut ranking: Vec<usize> = cells.iter().map(|c| c.cell.id).collect();
        ranking.sort_by(|&a, &b| {
            cells[a - 1]
                .accuracy
                .total_cmp(&cells[b - 1].accuracy)
                .then(a.cmp(&b))
        });
        IccReport {
            most_informative: ranking[0],
            cells,
            ranking,
            baseline_accuracy,
        }
    }

    pub fn accuracy_of(&self, id: usize) -> f64 {
        self.cells[id - 1].accuracy
    }

    /// Two-column table, most informative cell first.
    pub fn to_text(&self) -> String {
        let mut s = format!("uncovered accuracy {:.2}\n", 100.0 * self.baseline_accuracy);
        s.push_str("Cell  Accuracy\n");
        for &id in &self.ranking {
            let _ = writeln!(s, "{id:>4}  {:>8.2}", 100.0 * self.accuracy_of(id));
        }
        s
    }
}

/// Occlusion ranking: per fold, trains once on uncovered training images,
/// then scores the validation images with each cell whited out.
#[allow(clippy::too_many_arguments)]
pub fn icc_rank(
    data: &DiscreteDataset,
    pairing: &Pairing,
    config: &EncodingConfig,
    context: Option<MeanRender>,
    block: u32,
    plan: &FoldPlan,
    architecture: &MlpSpec,
    train: &TrainConfig,
) -> Result<IccReport> {
    let cells = icc_cells(config.grid, block)?;
    let images = encode_all(data, pairing, config)?;
    let labels = data.labels();
    let n_classes = data.n_classes();

    // Per fold: (uncovered accuracy, covered accuracy per cell).
    let per_fold = (0..plan.k)
        .into_par_iter()
        .map(|fold| {
            let prepared = prepare_fold(&images, &labels, n_classes, plan, fold, context)?;
            let train_labels: Vec<usize> = prepared.train_idx.iter().map(|&i| labels[i]).collect();
            let val_labels: Vec<usize> =
                prepared.validation_idx.iter().map(|&i| labels[i]).collect();
            let (model, _) = fit(
                &prepared.train_images,
                &train_labels,
                n_classes,
                architecture,
                train,
                fold_seed(train.seed, fold),
            )?;
            let score = |imgs: &[CpcrImage]| {
                let inputs: Vec<Vec<f64>> = imgs.iter().map(|i| train.input(i)).collect();
                model.accuracy(&inputs, &val_labels)
            };
            let uncovered = score(&prepared.validation_images)?;
            let covered = cells
                .par_iter()
                .map(|cell| {
                    let masked = prepared
                        .validation_images
                        .iter()
                        .map(|img| cover_cell(img, cell, config))
                        .collect::<Result<Vec<_>>>()?;
                    score(&masked)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok((uncovered, covered))
        })
        .collect::<Result<Vec<_>>>()?;

    let folds = per_fold.len() as f64;
    let baseline = per_fold.iter().map(|(u, _)| u).sum::<f64>() / folds;
    let scores = cells
        .iter()
        .enumerate()
        .map(|(c, &cell)| {
            let fold_accuracies: Vec<f64> = per_fold.iter().map(|(_, cov)| cov[c]).collect();
            CellScore {
                cell,
                accuracy: fold_accuracies.iter().sum::<f64>() / folds,
                fold_accuracies,
            }
        })
        .collect();
    Ok(IccReport::from_scores(scores, baseline))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{contextualize, MeanImage};
    use crate::data::DiscretePoint;
    use crate::encoder::{encode, Origin};

    #[test]
    fn numbering_matches_the_reference_layout() {
        let cells = icc_cells(10, 2).unwrap();
        assert_eq!(cells.len(), 25);
        assert_eq!(cells[0].coords(), vec![(1, 1), (1, 2), (2, 1), (2, 2)]);
        assert_eq!(cells[12].id, 13);
        assert_eq!(cells[12].coords(), vec![(5, 5), (5, 6), (6, 5), (6, 6)]);
        assert_eq!(cells[4].coords()[0], (9, 1));
        assert_eq!(cells[5].coords()[0], (1, 3));
        assert_eq!(icc_cells(2, 2).unwrap().len(), 1);
        assert!(icc_cells(10, 3).is_err());
    }

    #[test]
    fn cells_tile_the_grid() {
        for (g, b) in [(10, 2), (12, 3), (8, 4), (6, 1)] {
            let cells = icc_cells(g, b).unwrap();
            for x in 1..=g {
                for y in 1..=g {
                    assert_eq!(cells.iter().filter(|c| c.contains((x, y))).count(), 1);
                }
            }
        }
    }

    fn five_pair_record() -> (CpcrImage, EncodingConfig) {
        let p = DiscretePoint::new(vec![8, 10, 10, 8, 7, 10, 9, 7, 1, 1], 0, 10).unwrap();
        let config = EncodingConfig::new(10, 5).unwrap().with_cell_px(3);
        (encode(&p, &Pairing::identity(10), &config).unwrap(), config)
    }

    #[test]
    fn covering_is_local_and_idempotent() {
        let (image, config) = five_pair_record();
        for cell in icc_cells(10, 2).unwrap() {
            let covered = cover_cell(&image, &cell, &config).unwrap();
            assert_eq!(cover_cell(&covered, &cell, &config).unwrap(), covered);
            for row in 0..image.height() {
                for col in 0..image.width() {
                    let inside = cell.contains(config.cell_at(col, row));
                    if inside {
                        assert!(covered.is_background(col, row));
                    } else {
                        assert_eq!(covered.pixel(col, row), image.pixel(col, row));
                    }
                }
            }
        }
    }

    #[test]
    fn covering_one_pair_keeps_the_others() {
        let (image, config) = five_pair_record();
        let single = icc_cells(10, 1)
            .unwrap()
            .into_iter()
            .find(|c| c.contains((8, 10)))
            .unwrap();
        let covered = cover_cell(&image, &single, &config).unwrap();
        assert_eq!(image.foreground_pixels() - covered.foreground_pixels(), 9);
        let (c, r) = config.cell_origin((8, 10));
        assert!(covered.is_background(c, r));
        for cell_xy in [(10, 8), (7, 10), (9, 7), (1, 1)] {
            let (c, r) = config.cell_origin(cell_xy);
            assert_eq!(covered.pixel(c, r), image.pixel(c, r));
        }

        // The 2x2 block around (8,10) also holds (7,10).
        let block = icc_cells(10, 2)
            .unwrap()
            .into_iter()
            .find(|c| c.contains((8, 10)))
            .unwrap();
        let covered = cover_cell(&image, &block, &config).unwrap();
        assert_eq!(image.foreground_pixels() - covered.foreground_pixels(), 18);
    }

    #[test]
    fn lower_left_origin_covers_the_right_rows() {
        let p = DiscretePoint::new(vec![1, 1, 5, 6], 0, 10).unwrap();
        let config = EncodingConfig::new(10, 2)
            .unwrap()
            .with_origin(Origin::LowerLeft)
            .with_cell_px(2);
        let image = encode(&p, &Pairing::identity(4), &config).unwrap();
        let cells = icc_cells(10, 2).unwrap();
        let covered = cover_cell(&image, &cells[12], &config).unwrap();
        assert_eq!(covered.foreground_pixels(), 4);
        let covered = cover_cell(&image, &cells[0], &config).unwrap();
        assert_eq!(covered.foreground_pixels(), 4);
        assert_eq!(image.foreground_pixels(), 8);
    }

    #[test]
    fn context_images_are_covered_in_every_panel() {
        let p = DiscretePoint::new(vec![5, 5, 9, 9], 0, 10).unwrap();
        let config = EncodingConfig::new(10, 2).unwrap();
        let image = encode(&p, &Pairing::identity(4), &config).unwrap();
        let blank = MeanImage {
            width: 10,
            height: 10,
            channels: 1,
            pixels: vec![255.0; 100],
            label: 0,
            case_ids: vec![],
        };
        let means = vec![blank.clone(), MeanImage { label: 1, ..blank }];
        let ctx = contextualize(&image, &means, MeanRender::Own).unwrap();
        assert_eq!(ctx.foreground_pixels(), 4);
        let covered = cover_cell(&ctx, &icc_cells(10, 2).unwrap()[12], &config).unwrap();
        assert_eq!(covered.foreground_pixels(), 2);
        let bad = CpcrImage::blank(10, 20, 1);
        assert!(cover_cell(&bad, &icc_cells(10, 2).unwrap()[0], &config).is_err());
    }

    #[test]
    fn ranking_orders_ties_by_id() {
        let cells = icc_cells(4, 2).unwrap();
        let scores = cells
            .iter()
            .zip([0.8, 0.6, 0.8, 0.6])
            .map(|(&cell, accuracy)| CellScore {
                cell,
                accuracy,
                fold_accuracies: vec![accuracy],
            })
            .collect();
        let report = IccReport::from_scores(scores, 0.9);
        assert_eq!(report.ranking, vec![2, 4, 1, 3]);
        assert_eq!(report.most_informative, 2);
        assert!(report.to_text().lines().nth(2).unwrap().trim_start().starts_with('2'));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn covering_touches_only_its_block(
                values in proptest::collection::vec(1u32..=8, 8),
                block in prop_oneof![Just(1u32), Just(2), Just(4)],
                pick in 0usize..64,
                cell_px in 1u32..4,
                lower_left in any::<bool>(),
            ) {
                let origin = if lower_left { Origin::LowerLeft } else { Origin::UpperLeft };
                let config = EncodingConfig::new(8, 4).unwrap().with_cell_px(cell_px).with_origin(origin);
                let image = encode(&DiscretePoint::new(values, 0, 8).unwrap(), &Pairing::identity(8), &config).unwrap();
                let cells = icc_cells(8, block).unwrap();
                let cell = cells[pick % cells.len()];
                let covered = cover_cell(&image, &cell, &config).unwrap();
                for row in 0..image.height() {
                    for col in 0..image.width() {
                        if cell.contains(config.cell_at(col, row)) {
                            prop_assert!(covered.is_background(col, row));
                        } else {
                            prop_assert_eq!(covered.pixel(col, row), image.pixel(col, row));
                        }
                    }
                }
            }
        }
    }
}
