mod common;

use proptest::prelude::*;
use starprior::geometry::{all_ray_samples, quantize_direction, ray_samples, DirectionSet, COMPASS8_NAMES};
use starprior::grid::{GridShape, Pixel};
use starprior::Error;

fn px(r: usize, c: usize) -> Pixel {
    Pixel::new(r, c)
}

fn name(i: usize) -> &'static str {
    COMPASS8_NAMES[i]
}

#[test]
fn quantization_examples() {
    let d8 = DirectionSet::compass8();
    assert_eq!(name(quantize_direction(px(0, 5), px(0, 0), &d8).unwrap()), "W");
    assert_eq!(name(quantize_direction(px(4, 4), px(0, 0), &d8).unwrap()), "NW");
    // (c - p) = (-1, -4): cos(W) = 4/√17 ≈ 0.970 beats cos(NW) = 5/√34 ≈ 0.857.
    let i = quantize_direction(px(1, 4), px(0, 0), &d8).unwrap();
    assert_eq!(name(i), "W");
    assert_eq!(i, common::cosine_oracle(px(1, 4), px(0, 0), &d8));
    assert!(matches!(quantize_direction(px(2, 2), px(2, 2), &d8), Err(Error::CenterHasNoDirection)));
}

#[test]
fn exhaustive_quantization_agrees_with_cosines() {
    for d in [4, 8] {
        let dirs = DirectionSet::with_count(d).unwrap();
        for pr in 0..15 {
            for pc in 0..15 {
                let p = px(pr, pc);
                let c = px(7, 7);
                if p == c {
                    continue;
                }
                assert_eq!(quantize_direction(p, c, &dirs).unwrap(), common::cosine_oracle(p, c, &dirs), "d={d} p={p}");
            }
        }
    }
}

#[test]
fn exact_ties_take_the_lowest_index() {
    let d4 = DirectionSet::compass4();
    // (c - p) = (-1, 1) is equally close to E (index 0) and N (index 1).
    assert_eq!(quantize_direction(px(1, 0), px(0, 1), &d4).unwrap(), 0);
    // (c - p) = (-1, -1): N (1) and W (2).
    assert_eq!(quantize_direction(px(1, 1), px(0, 0), &d4).unwrap(), 1);
    let d8 = DirectionSet::compass8();
    // (c - p) = (-1, -2): cos(NW) = 3/√10 beats cos(W) = 2/√5.
    assert_eq!(name(quantize_direction(px(1, 2), px(0, 0), &d8).unwrap()), "NW");
}

#[test]
fn ray_walk_examples() {
    let d8 = DirectionSet::compass8();
    let shape = GridShape::new(6, 6).unwrap();
    assert_eq!(ray_samples(px(0, 5), px(0, 0), 3, &d8, shape).samples, vec![px(0, 4), px(0, 3), px(0, 2)]);
    assert_eq!(ray_samples(px(0, 1), px(0, 0), 6, &d8, shape).samples, vec![px(0, 0)]);
    let r = ray_samples(px(2, 3), px(0, 0), 6, &d8, shape);
    assert_eq!(r.samples, common::reference_walk(px(2, 3), px(0, 0), 6, &d8, shape));
    assert_eq!(r.samples, vec![px(1, 2), px(0, 1)]);
    assert!(ray_samples(px(3, 3), px(3, 3), 6, &d8, shape).samples.is_empty());
}

#[test]
fn table_examples() {
    let d8 = DirectionSet::compass8();
    let one = all_ray_samples(px(0, 0), 6, &d8, GridShape::new(1, 1).unwrap());
    assert_eq!(one.pair_count(), 0);
    assert!(one.get(px(0, 0)).samples.is_empty());
    let shape = GridShape::new(3, 3).unwrap();
    let t = all_ray_samples(px(1, 1), 1, &d8, shape);
    for p in shape.pixels() {
        let s = t.get(p).samples;
        if p == px(1, 1) {
            assert!(s.is_empty());
        } else {
            assert_eq!(s, vec![px(1, 1)], "{p}");
        }
    }
}

#[test]
fn table_equals_per_pixel_walks() {
    let mut rng = common::rng(12);
    let shape = GridShape::new(12, 12).unwrap();
    for d in [4, 8] {
        let dirs = DirectionSet::with_count(d).unwrap();
        for m in [1, 3, 6] {
            let c = common::random_pixel(&mut rng, shape);
            let table = all_ray_samples(c, m, &dirs, shape);
            for p in shape.pixels() {
                assert_eq!(table.get(p), ray_samples(p, c, m, &dirs, shape));
                assert_eq!(table.get(p).samples, common::reference_walk(p, c, m, &dirs, shape));
            }
        }
    }
}

fn chebyshev(a: Pixel, b: Pixel) -> usize {
    a.row.abs_diff(b.row).max(a.col.abs_diff(b.col))
}

fn mirror(p: Pixel, w: usize) -> Pixel {
    px(p.row, w - 1 - p.col)
}

proptest! {
    #[test]
    fn rays_approach_the_center(h in 1usize..16, w in 1usize..16, seed in any::<u64>(), m in 1usize..8) {
        let shape = GridShape::new(h, w).unwrap();
        let mut rng = common::rng(seed);
        let c = common::random_pixel(&mut rng, shape);
        let p = common::random_pixel(&mut rng, shape);
        let r = ray_samples(p, c, m, &DirectionSet::compass8(), shape);
        prop_assert!(r.samples.len() <= m);
        let mut prev = chebyshev(p, c);
        for q in &r.samples {
            prop_assert!(shape.contains(*q));
            let d = chebyshev(*q, c);
            prop_assert!(d < prev || (d == prev && d > 0));
            prev = d;
        }
        prop_assert_eq!(r.samples, common::reference_walk(p, c, m, &DirectionSet::compass8(), shape));
    }

    #[test]
    fn multiples_of_a_step_quantize_to_it(k in 1usize..6, dir in 0usize..8) {
        let dirs = DirectionSet::compass8();
        let (sr, sc) = dirs.step(dir);
        let c = px(8, 8);
        let p = px((8 - k as isize * sr) as usize, (8 - k as isize * sc) as usize);
        prop_assert_eq!(quantize_direction(p, c, &dirs).unwrap(), dir);
    }

    #[test]
    fn mirror_symmetry(h in 1usize..14, w in 1usize..14, seed in any::<u64>(), m in 1usize..7) {
        let dirs = DirectionSet::compass8();
        let swap = |i: usize| dirs.index_of({ let (r, c) = dirs.step(i); (r, -c) }).unwrap();
        let shape = GridShape::new(h, w).unwrap();
        let mut rng = common::rng(seed);
        let c = common::random_pixel(&mut rng, shape);
        let table = all_ray_samples(c, m, &dirs, shape);
        let mirrored = all_ray_samples(mirror(c, w), m, &dirs, shape);
        for p in shape.pixels() {
            let a = table.get(p);
            let b = mirrored.get(mirror(p, w));
            let dir_a = a.direction.map(swap);
            // Reflection swaps the order of W/NW-style ties, so compare only
            // where the quantized direction is unambiguous.
            if dir_a == b.direction {
                let reflected: Vec<Pixel> = a.samples.iter().map(|&q| mirror(q, w)).collect();
                prop_assert_eq!(reflected, b.samples);
            } else {
                let (vr, vc) = p.delta_to(c);
                prop_assert!(vr.abs() == vc.abs() || vr == 0 || vc == 0 || vr.abs() == 2 * vc.abs() || vc.abs() == 2 * vr.abs(),
                    "asymmetric non-tie at p={} c={}", p, c);
            }
        }
    }
}
