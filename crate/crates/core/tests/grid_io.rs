use proptest::prelude::*;
use starprior::grid::{Dataset, GridShape, ImageGrid, MaskGrid, Pixel, ProbMap, Sample};
use starprior::io::pnm::{decode_image, decode_mask, encode_image, encode_mask};
use starprior::io::spf::{decode_probmap, encode_probmap};
use starprior::io::{
    normalize_dataset, read_dataset, read_image, read_mask, read_probmap, write_dataset, write_image, write_mask,
    write_probmap, ChannelStats,
};
use starprior::Error;

fn shape(h: usize, w: usize) -> GridShape {
    GridShape::new(h, w).unwrap()
}

#[test]
fn mask_file_examples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.pgm");
    std::fs::write(&path, b"P5\n2 2\n255\n\xff\x00\x00\xff").unwrap();
    assert_eq!(read_mask(&path).unwrap(), MaskGrid::from_rows(&[&[1, 0], &[0, 1]]).unwrap());
    std::fs::write(&path, b"P5\n1 1\n255\n\x80").unwrap();
    assert_eq!(read_mask(&path).unwrap(), MaskGrid::from_rows(&[&[1]]).unwrap());
    std::fs::write(&path, b"P6\n1 1\n255\n\x80\x80\x80").unwrap();
    match read_mask(&path) {
        Err(Error::Format { message, .. }) => assert!(message.contains("unsupported magic")),
        other => panic!("expected format error, got {other:?}"),
    }
}

#[test]
fn mask_header_bytes() {
    let m = MaskGrid::from_rows(&[&[1, 0]]).unwrap();
    assert_eq!(encode_mask(&m), b"P5\n2 1\n255\n\xff\x00".to_vec());
}

#[test]
fn empty_path_write_fails() {
    let m = MaskGrid::from_rows(&[&[1]]).unwrap();
    assert!(matches!(write_mask(&m, ""), Err(Error::Io { .. })));
}

#[test]
fn truncated_and_malformed_files() {
    assert!(matches!(decode_mask(b"P5\n2 2\n255\n\x00"), Err(Error::Format { .. })));
    assert!(matches!(decode_mask(b"P5\n2 x\n255\n"), Err(Error::Format { .. })));
    assert!(matches!(decode_mask(b"P5\n1 1\n65535\n\x00\x00"), Err(Error::Format { .. })));
    match decode_mask(b"P5\n2 2\n255\n\x00") {
        Err(Error::Format { offset, .. }) => assert!(offset >= 11),
        other => panic!("{other:?}"),
    }
}

#[test]
fn image_scaling_and_channels() {
    let img: ImageGrid<f64> = decode_image(b"P6\n1 1\n255\n\xff\x00\x00").unwrap();
    assert_eq!(img.channels(), 3);
    assert_eq!(
        [img.get(0, Pixel::new(0, 0)), img.get(1, Pixel::new(0, 0)), img.get(2, Pixel::new(0, 0))],
        [1.0, 0.0, 0.0]
    );
    let gray: ImageGrid<f32> = decode_image(b"P5\n2 1\n255\n\x00\xff").unwrap();
    assert_eq!(gray.channels(), 1);
}

#[test]
fn probmap_payload_encoding() {
    let pm = ProbMap::new(shape(1, 2), vec![0.0f32, 1.0]).unwrap();
    let bytes = encode_probmap(&pm);
    let header = b"SPF1\n1 2\n";
    assert_eq!(&bytes[..header.len()], header);
    assert_eq!(&bytes[header.len()..], &[0, 0, 0, 0, 0x00, 0x00, 0x80, 0x3F]);
}

#[test]
fn probmap_out_of_range_is_rejected() {
    let mut bytes = b"SPF1\n1 1\n".to_vec();
    bytes.extend_from_slice(&1.5f32.to_le_bytes());
    assert!(matches!(decode_probmap::<f64>(&bytes), Err(Error::Validation(_))));
    assert!(decode_probmap::<f64>(b"SPF2\n1 1\n\0\0\0\0").is_err());
    assert!(decode_probmap::<f64>(b"SPF1\n1 2\n\0\0\0\0").is_err());
}

#[test]
fn probmap_rejects_non_finite() {
    let s = shape(1, 3);
    assert!(ProbMap::new(s, vec![0.1, f64::NAN, 0.2]).is_err());
    assert!(ProbMap::new(s, vec![0.1, f64::INFINITY, 0.2]).is_err());
    assert!(ProbMap::new(s, vec![0.1, -0.01, 0.2]).is_err());
}

#[test]
fn file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let s = shape(8, 8);
    let img = ImageGrid::new(s, 3, (0..192).map(|i| ((i * 37) % 256) as f64 / 255.0).collect()).unwrap();
    let ip = dir.path().join("a.ppm");
    write_image(&img, &ip).unwrap();
    let back: ImageGrid<f64> = read_image(&ip).unwrap();
    assert_eq!(std::fs::read(&ip).unwrap(), encode_image(&back).unwrap());
    let pm = ProbMap::new(s, (0..64).map(|i| i as f32 / 63.0).collect()).unwrap();
    let pp = dir.path().join("a.spf");
    write_probmap(&pm, &pp).unwrap();
    assert_eq!(read_probmap::<f32>(&pp).unwrap(), pm);
}

#[test]
fn normalize_single_image() {
    let s = shape(1, 2);
    let ds = Dataset::new(vec![Sample {
        name: "a".into(),
        image: ImageGrid::new(s, 1, vec![0.0, 1.0]).unwrap(),
        mask: MaskGrid::empty(s),
    }])
    .unwrap();
    let (out, stats) = normalize_dataset(&ds).unwrap();
    assert_eq!(stats, ChannelStats { mean: vec![0.5], std: vec![0.5] });
    assert_eq!(out.items()[0].image.data(), &[-1.0, 1.0]);
}

#[test]
fn normalize_constant_channel_is_only_centered() {
    let s = shape(3, 3);
    let ds = Dataset::new(vec![Sample {
        name: "a".into(),
        image: ImageGrid::filled(s, 2, 0.4f64).unwrap(),
        mask: MaskGrid::empty(s),
    }])
    .unwrap();
    let (out, stats) = normalize_dataset(&ds).unwrap();
    assert_eq!(stats.std, vec![0.0, 0.0]);
    assert!(out.items()[0].image.data().iter().all(|&v| v == 0.0));
}

/// Two-pass pooled statistics computed directly from the raw samples.
fn direct_stats(images: &[Vec<f64>]) -> (f64, f64) {
    let all: Vec<f64> = images.iter().flatten().copied().collect();
    let n = all.len() as f64;
    let mean = all.iter().sum::<f64>() / n;
    let var = all.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[test]
fn pooled_stats_match_direct_two_pass() {
    let a = vec![0.1, 0.2, 0.9, 0.4, 0.5, 0.7];
    let b = vec![0.3, 0.8, 0.0, 1.0, 0.6, 0.25];
    let s = shape(2, 3);
    let ds = Dataset::new(
        [&a, &b]
            .iter()
            .enumerate()
            .map(|(i, v)| Sample {
                name: format!("{i}"),
                image: ImageGrid::new(s, 1, v.to_vec()).unwrap(),
                mask: MaskGrid::empty(s),
            })
            .collect(),
    )
    .unwrap();
    let stats = ChannelStats::from_dataset(&ds);
    let (m, sd) = direct_stats(&[a, b]);
    assert!((stats.mean[0] - m).abs() < 1e-15);
    assert!((stats.std[0] - sd).abs() < 1e-15);
}

#[test]
fn dataset_directory_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let s = shape(4, 5);
    let items = (0..3)
        .map(|i| Sample {
            name: format!("s{i}"),
            image: ImageGrid::new(s, 3, (0..60).map(|k| ((k * 7 + i * 11) % 256) as f64 / 255.0).collect()).unwrap(),
            mask: MaskGrid::from_fn(s, |p| (p.row + p.col + i) % 3 == 0),
        })
        .collect();
    let ds: Dataset<f64> = Dataset::new(items).unwrap();
    write_dataset(&ds, dir.path()).unwrap();
    let back: Dataset<f64> = read_dataset(dir.path()).unwrap();
    assert_eq!(back.len(), 3);
    for (a, b) in ds.items().iter().zip(back.items()) {
        assert_eq!(a.name, b.name);
        assert_eq!(a.mask, b.mask);
        assert_eq!(a.image, b.image);
    }
}

#[test]
fn dataset_requires_items() {
    assert!(Dataset::<f64>::new(vec![]).is_err());
}

fn arb_mask() -> impl Strategy<Value = MaskGrid> {
    (1usize..20, 1usize..20).prop_flat_map(|(h, w)| {
        proptest::collection::vec(0u8..2, h * w).prop_map(move |l| MaskGrid::new(shape(h, w), l).unwrap())
    })
}

proptest! {
    #[test]
    fn mask_round_trip(m in arb_mask()) {
        prop_assert_eq!(decode_mask(&encode_mask(&m)).unwrap(), m);
    }

    #[test]
    fn image_bytes_round_trip(h in 1usize..10, w in 1usize..10, ch in prop::sample::select(vec![1usize, 3]), pool in proptest::collection::vec(any::<u8>(), 300)) {
        let bytes = &pool[..h * w * ch];
        let magic = if ch == 1 { "P5" } else { "P6" };
        let mut file = format!("{magic}\n{w} {h}\n255\n").into_bytes();
        file.extend_from_slice(bytes);
        let img: ImageGrid<f64> = decode_image(&file).unwrap();
        prop_assert_eq!(encode_image(&img).unwrap(), file);
    }

    #[test]
    fn probmap_round_trip(h in 1usize..12, w in 1usize..12, vals in proptest::collection::vec(0.0f32..=1.0, 144)) {
        let pm = ProbMap::new(shape(h, w), vals[..h * w].to_vec()).unwrap();
        prop_assert_eq!(decode_probmap::<f32>(&encode_probmap(&pm)).unwrap(), pm);
    }

    #[test]
    fn normalized_channels_are_standard(vals in proptest::collection::vec(0.0f64..1.0, 2 * 3 * 16)) {
        let s = shape(4, 4);
        let items = (0..2).map(|i| Sample {
            name: format!("{i}"),
            image: ImageGrid::new(s, 3, vals[i * 48..(i + 1) * 48].to_vec()).unwrap(),
            mask: MaskGrid::empty(s),
        }).collect();
        let ds = Dataset::new(items).unwrap();
        let stats = ChannelStats::from_dataset(&ds);
        prop_assume!(stats.std.iter().all(|&s| s > 1e-3));
        let (out, _) = normalize_dataset(&ds).unwrap();
        for c in 0..3 {
            let v: Vec<f64> = out.items().iter().flat_map(|s| s.image.channel(c).to_vec()).collect();
            let n = v.len() as f64;
            let mean = v.iter().sum::<f64>() / n;
            let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
            prop_assert!(mean.abs() < 1e-6);
            prop_assert!((sd - 1.0).abs() < 1e-6);
        }
    }
}
