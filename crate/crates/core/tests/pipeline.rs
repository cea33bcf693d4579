//! Library-level pipeline invariants through the public API.

use std::collections::HashSet;

use cpcr::data::DiscretePoint;
use cpcr::encoder::{decode, encode, read_image, write_png, write_pnm, Collision, EncodingConfig, Pairing, Sidecar};
use proptest::prelude::*;

/// Records whose pairs land on distinct cells under `order`.
fn distinct_record(grid: u32, pairs: usize) -> impl Strategy<Value = (Vec<u32>, Vec<usize>)> {
    let n = 2 * pairs;
    (
        proptest::collection::vec(1..=grid, n),
        Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
    )
        .prop_filter("pairs share a cell", move |(v, order)| {
            let cells: HashSet<(u32, u32)> = order.chunks(2).map(|c| (v[c[0]], v[c[1]])).collect();
            cells.len() == pairs
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distinct_cells_round_trip_under_any_pairing((values, order) in distinct_record(8, 4), cell_px in 1u32..4) {
        let pairing = Pairing::new(order).unwrap();
        let config = EncodingConfig::new(8, 4).unwrap().with_cell_px(cell_px);
        let point = DiscretePoint::new(values.clone(), 0, 8).unwrap();
        let image = encode(&point, &pairing, &config).unwrap();
        prop_assert_eq!(image.foreground_pixels(), (4 * cell_px * cell_px) as usize);
        let decoded = decode(&image, &pairing, &config).unwrap();
        prop_assert_eq!(decoded.values(), &values[..]);
    }

    #[test]
    fn every_strategy_keeps_pixels_in_range(values in proptest::collection::vec(1u32..=6, 6)) {
        let point = DiscretePoint::new(values, 1, 6).unwrap();
        for collision in [
            Collision::OverwriteLast,
            Collision::DarkestWins,
            Collision::CrossAdjacent,
            Collision::SpiralAdjacent,
            Collision::StripSplit,
        ] {
            let config = EncodingConfig::new(6, 3).unwrap().with_cell_px(3).with_collision(collision);
            let image = encode(&point, &Pairing::identity(6), &config).unwrap();
            prop_assert_eq!((image.width(), image.height()), (18, 18));
            let dark = image.foreground_pixels();
            prop_assert!((9..=27).contains(&dark), "{collision:?}: {dark} dark pixels");
        }
    }
}

#[test]
fn files_round_trip_through_png_pnm_and_sidecar() {
    let tmp = tempfile::tempdir().unwrap();
    let point = DiscretePoint::new(vec![2, 3, 4, 1, 6, 5], 1, 6).unwrap().with_case_id(42);
    let pairing = Pairing::new(vec![1, 0, 2, 3, 5, 4]).unwrap();
    let config = EncodingConfig::new(6, 3).unwrap().with_cell_px(2);
    let image = encode(&point, &pairing, &config).unwrap();
    let sidecar = Sidecar {
        dataset: "t".into(),
        case_id: 42,
        label: Some(1),
        class_name: None,
        config: config.clone(),
        pairing: pairing.clone(),
    };
    sidecar.write(tmp.path().join("c.json")).unwrap();
    let back = Sidecar::read(tmp.path().join("c.json")).unwrap();
    assert_eq!(back, sidecar);

    for name in ["c.png", "c.pgm"] {
        let path = tmp.path().join(name);
        if name.ends_with("png") {
            write_png(&image, &path).unwrap();
        } else {
            write_pnm(&image, &path).unwrap();
        }
        let mut read = read_image(&path).unwrap();
        assert_eq!(read.pixels(), image.pixels());
        read.meta = Some(back.meta());
        let decoded = decode(&read, &back.pairing, &back.config).unwrap();
        assert_eq!(decoded.values(), point.values());
        assert_eq!(decoded.case_id(), 42);
        assert_eq!(decoded.label(), 1);
    }
}
