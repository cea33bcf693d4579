use super::config::{Collision, ColorMode, EncodingConfig, Marker};
use super::pairing::Pairing;
use super::render::CpcrImage;
use super::schedule::BACKGROUND;
use crate::data::DiscretePoint;
use crate::{Error, Result};

/// Recovers the point behind a grayscale image.
///
/// Each schedule level identifies its pair. Under the adjacent-cell
/// strategies a pair is taken as displaced from cell `q` when, at the time
/// the pair was placed, `q` was occupied by a darker pair and the pair's
/// cell was the first free neighbor of `q` in fill order. Among several such
/// cells, those whose occupant sits at its own nominal cell are preferred;
/// if that still leaves more than one, the decode is ambiguous. A pair with
/// no such `q` is read at its own cell.
///
/// The encoding is not injective under the adjacent strategies: a pair
/// that nominally sits next to an occupied cell renders exactly like a
/// displaced collider, and decodes as one.
pub fn decode(image: &CpcrImage, pairing: &Pairing, config: &EncodingConfig) -> Result<DiscretePoint> {
    config.validate()?;
    match config.collision {
        Collision::OverwriteLast | Collision::CrossAdjacent | Collision::SpiralAdjacent => {}
        other => {
            return Err(Error::Unsupported(format!(
                "decoding {other:?} images is not defined"
            )))
        }
    }
    if config.color_mode != ColorMode::Grayscale || config.marker != Marker::Cell {
        return Err(Error::Unsupported(
            "decoding needs grayscale images with cell markers".into(),
        ));
    }
    let side = config.side();
    if image.width() != side || image.height() != side || image.channels() != 1 {
        return Err(Error::Geometry(format!(
            "expected a {side}x{side} single-channel image, got {}x{}x{}",
            image.width(),
            image.height(),
            image.channels()
        )));
    }
    let m = config.pair_count();
    if pairing.pair_count() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            found: pairing.pair_count(),
        });
    }

    // Cell of every pair, read from each block's top-left pixel.
    let mut cell_of: Vec<Option<(u32, u32)>> = vec![None; m];
    for y in 1..=config.grid {
        for x in 1..=config.grid {
            let (col, row) = config.cell_origin((x, y));
            let level = image.pixel(col, row)[0];
            if level == BACKGROUND {
                continue;
            }
            let k = config.schedule.pair_of(level).ok_or_else(|| {
                Error::Geometry(format!("cell ({x}, {y}) has level {level}, not in the schedule"))
            })?;
            if cell_of[k].is_some() {
                return Err(Error::AmbiguousDecode(vec![k]));
            }
            cell_of[k] = Some((x, y));
        }
    }
    let missing: Vec<usize> = (0..m).filter(|&k| cell_of[k].is_none()).collect();
    if !missing.is_empty() {
        return Err(Error::MissingLevels(missing));
    }
    let cells: Vec<(u32, u32)> = cell_of.into_iter().flatten().collect();

    let nominal = if config.collision == Collision::OverwriteLast {
        cells
    } else {
        invert_displacements(&cells, config)?
    };

    let mut values = vec![0u32; pairing.len()];
    for (k, &(a, b)) in nominal.iter().enumerate() {
        let (i, j) = pairing.attributes(k);
        values[i] = a;
        values[j] = b;
    }
    let meta = image.meta.as_ref();
    let label = meta.and_then(|m| m.label).unwrap_or(0);
    let point = DiscretePoint::new(values, label, config.grid)?;
    Ok(match meta {
        Some(m) => point.with_case_id(m.case_id),
        None => point,
    })
}

fn invert_displacements(cells: &[(u32, u32)], config: &EncodingConfig) -> Result<Vec<(u32, u32)>> {
    let g = config.grid;
    let mut occupied = vec![false; (g * g) as usize];
    let idx = |(x, y): (u32, u32)| ((y - 1) * g + (x - 1)) as usize;
    let order = config.fill_order();
    let mut nominal: Vec<(u32, u32)> = Vec::with_capacity(cells.len());
    // Pair index per occupied cell, for the pairs decoded so far.
    let mut holder = vec![usize::MAX; (g * g) as usize];

    for (k, &cell) in cells.iter().enumerate() {
        let mut sources: Vec<(u32, u32)> = Vec::new();
        for (i, &dir) in order.iter().enumerate() {
            let Some(q) = config.neighbor_source(cell, dir) else {
                continue;
            };
            if !occupied[idx(q)] {
                continue;
            }
            // `cell` must be the first free neighbor of `q` at this point.
            let earlier_full = order[..i]
                .iter()
                .filter_map(|&d| config.neighbor(q, d))
                .all(|n| occupied[idx(n)]);
            if earlier_full {
                sources.push(q);
            }
        }
        if sources.len() > 1 {
            let anchored: Vec<(u32, u32)> = sources
                .iter()
                .copied()
                .filter(|&q| nominal[holder[idx(q)]] == q)
                .collect();
            if !anchored.is_empty() {
                sources = anchored;
            }
        }
        match sources.as_slice() {
            [] => nominal.push(cell),
            [q] => nominal.push(*q),
            _ => {
                let mut conflicting: Vec<usize> = sources
                    .iter()
                    .map(|&q| holder[idx(q)])
                    .chain(std::iter::once(k))
                    .collect();
                conflicting.sort_unstable();
                return Err(Error::AmbiguousDecode(conflicting));
            }
        }
        occupied[idx(cell)] = true;
        holder[idx(cell)] = k;
    }
    Ok(nominal)
}
