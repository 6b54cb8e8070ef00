mod common;

use common::*;
use hsap::dataset::*;
use hsap::linalg::Matrix;
use hsap::HsapError;
use proptest::prelude::*;

/// Writes the binary layout byte by byte, without the crate's encoder.
fn hand_encoded(rows: u64, cols: u64, values: &[f64]) -> Vec<u8> {
    let mut out = b"HSAP".to_vec();
    out.extend([1, 0, 0, 0]);
    for v in [rows, cols] {
        out.extend((0..8).map(|i| (v >> (8 * i)) as u8));
    }
    for x in values {
        let bits = x.to_bits();
        out.extend((0..8).map(|i| (bits >> (8 * i)) as u8));
    }
    out
}

#[test]
fn reads_a_hand_written_binary_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.bin");
    let values = [1.5, -2.0, 0.1, 1e300, -0.0, 7.0];
    std::fs::write(&path, hand_encoded(2, 3, &values)).unwrap();
    let m = load_matrix(&path, MatrixFormat::Binary).unwrap().points;
    assert_eq!(m.shape(), (2, 3));
    assert_eq!(m.as_slice(), &values);
    assert_eq!(load_matrix_auto(&path).unwrap().points, m);
    assert_eq!(encode_binary(&m), hand_encoded(2, 3, &values));
}

#[test]
fn rejects_malformed_binary() {
    let good = hand_encoded(1, 2, &[1.0, 2.0]);
    assert!(matches!(
        decode_binary(&good[..good.len() - 1]),
        Err(HsapError::Truncated { .. })
    ));
    let mut long = good.clone();
    long.push(0);
    assert!(matches!(
        decode_binary(&long),
        Err(HsapError::TrailingBytes { extra: 1 })
    ));
    let mut bad = good.clone();
    bad[0] = b'X';
    assert!(matches!(
        decode_binary(&bad),
        Err(HsapError::BadMagic { .. })
    ));
    let mut ver = good;
    ver[4] = 2;
    assert!(matches!(
        decode_binary(&ver),
        Err(HsapError::UnsupportedVersion(2))
    ));
    assert!(decode_binary(&hand_encoded(1, 1, &[f64::NAN])).is_err());
}

#[test]
fn csv_errors_point_at_the_line() {
    let p = std::path::Path::new("in.csv");
    assert!(matches!(
        parse_csv("1,2\n3\n", p),
        Err(HsapError::RaggedRow { line: 2, .. })
    ));
    assert!(matches!(
        parse_csv("1,2\n3,x\n", p),
        Err(HsapError::NonNumeric {
            line: 2,
            field: 2,
            ..
        })
    ));
    assert!(parse_csv("\n\n", p).is_err());
}

#[test]
fn single_entry_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let m = Matrix::new(1, 1, vec![-3.25]).unwrap();
    for f in [MatrixFormat::Csv, MatrixFormat::Binary] {
        let path = dir.path().join(format!("one.{}", f.extension()));
        save_matrix(&m, &path, f).unwrap();
        assert_eq!(load_matrix(&path, f).unwrap().points, m);
    }
}

#[test]
fn cube_rows_follow_pixel_order() {
    let desc: CubeDescriptor = "2x2x3".parse().unwrap();
    // value encodes (row, col, band)
    let value = |r: usize, c: usize, b: usize| (100 * r + 10 * c + b) as f64;
    let mut bip = Vec::new();
    for r in 0..2 {
        for c in 0..2 {
            for b in 0..3 {
                bip.push(value(r, c, b));
            }
        }
    }
    let mut bsq = Vec::new();
    for b in 0..3 {
        for r in 0..2 {
            for c in 0..2 {
                bsq.push(value(r, c, b));
            }
        }
    }
    let mut bil = Vec::new();
    for r in 0..2 {
        for b in 0..3 {
            for c in 0..2 {
                bil.push(value(r, c, b));
            }
        }
    }
    for (raw, layout) in [
        (bip, Interleave::Bip),
        (bil, Interleave::Bil),
        (bsq, Interleave::Bsq),
    ] {
        let m = flatten_cube(&raw, desc, layout).unwrap().points;
        for r in 0..2 {
            for c in 0..2 {
                for b in 0..3 {
                    assert_eq!(m.get(r * 2 + c, b), value(r, c, b), "{layout}");
                }
            }
        }
    }
}

#[test]
fn full_size_cube_shape() {
    let desc: CubeDescriptor = "145x145x200".parse().unwrap();
    let raw = vec![0.5; desc.len()];
    let m = flatten_cube(&raw, desc, Interleave::Bip).unwrap();
    assert_eq!(m.points.shape(), (21025, 200));
    assert!(matches!(
        flatten_cube(&raw[1..], desc, Interleave::Bip),
        Err(HsapError::CubeLength { .. })
    ));
}

#[test]
fn synthetic_set_is_deterministic_and_on_its_pieces() {
    let params = SynthParams::default();
    let a = gen_synthetic(&params).unwrap();
    assert_eq!(a, gen_synthetic(&params).unwrap());
    assert_eq!(a.points.shape(), (700, 3));
    let other = gen_synthetic(&SynthParams {
        seed: 1,
        ..params.clone()
    })
    .unwrap();
    assert_ne!(a.points, other.points);
    let labels = a.labels.as_ref().unwrap();
    for (i, l) in labels.iter().enumerate() {
        let x = a.points.row(i);
        match l {
            1 => assert!(x[0] + x[1] == 0.0 && x[2] == 1.0),
            2 => assert!(x[0] == x[1] && x[2] == 4.0),
            3 => assert!((x[2] - (2.0 * x[0] + x[1] - 3.0)).abs() < 1e-12),
            _ => panic!("unexpected label {l}"),
        }
        assert!(x[0].abs() <= 15.0);
    }
    assert_eq!(labels.iter().filter(|l| **l == 3).count(), 500);
}

#[test]
fn labels_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("labels.csv");
    save_labels(&[3, -1, 0, 7], &path).unwrap();
    assert_eq!(load_labels(&path).unwrap(), vec![3, -1, 0, 7]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matrices_round_trip_exactly(
        rows in 1usize..6,
        cols in 1usize..6,
        seed in any::<u64>(),
        scale in prop::sample::select(vec![1e-300, 1e-8, 1.0, 1e8, 1e300]),
    ) {
        let mut r = rng(seed);
        let g = gaussian(&mut r, rows, cols);
        let m = Matrix::new(rows, cols, g.as_slice().iter().map(|x| x * scale).collect()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        for f in [MatrixFormat::Csv, MatrixFormat::Binary] {
            let path = dir.path().join(format!("m.{}", f.extension()));
            save_matrix(&m, &path, f).unwrap();
            prop_assert_eq!(&load_matrix(&path, f).unwrap().points, &m);
            prop_assert_eq!(&load_matrix_auto(&path).unwrap().points, &m);
        }
    }
}
