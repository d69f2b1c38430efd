use std::path::PathBuf;

use colordiff_core::palette::{extract_palette, kmeans, load_image, palette_of, KmeansConfig, PixelMatrix};
use colordiff_core::{ColorSpaceTag, Srgb8};
use image::{Rgb, RgbImage, Rgba, RgbaImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod support {
    pub mod lloyd_oracle;
}
use support::lloyd_oracle::brute_force_best;

fn random_points(seed: u64, n: usize) -> PixelMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PixelMatrix {
        space: ColorSpaceTag::Lab,
        data: (0..n).map(|_| [rng.gen_range(0.0..100.0), rng.gen_range(-80.0..80.0), rng.gen_range(-80.0..80.0)]).collect(),
    }
}

#[test]
fn objective_never_increases() {
    for seed in 0..50 {
        let pts = random_points(seed, 200);
        let r = kmeans(&pts, &KmeansConfig::new(1 + (seed as usize % 7), seed)).unwrap();
        for w in r.objective_history.windows(2) {
            assert!(w[1] <= w[0], "seed {seed}: {:?}", r.objective_history);
        }
        assert_eq!(*r.objective_history.last().unwrap(), r.objective);
        assert_eq!(r.populations.iter().sum::<usize>(), 200);
    }
}

#[test]
fn points_end_at_nearest_centroid() {
    let pts = random_points(11, 300);
    let r = kmeans(&pts, &KmeansConfig::new(5, 11)).unwrap();
    for (p, &c) in pts.data.iter().zip(&r.assignments) {
        let d = |q: &[f64; 3]| (0..3).map(|j| (p[j] - q[j]).powi(2)).sum::<f64>();
        let own = d(&r.centroids[c]);
        assert!(r.centroids.iter().all(|q| own <= d(q) + 1e-9));
    }
}

#[test]
fn single_cluster_is_the_mean() {
    let pts = random_points(3, 500);
    let r = kmeans(&pts, &KmeansConfig::new(1, 3)).unwrap();
    for j in 0..3 {
        let mean = pts.data.iter().map(|p| p[j]).sum::<f64>() / 500.0;
        assert!((r.centroids[0][j] - mean).abs() <= 1e-9 * mean.abs().max(1.0));
    }
}

#[test]
fn fixed_seed_is_bit_identical_across_thread_counts() {
    let pts = random_points(5, 2000);
    let cfg = KmeansConfig::new(6, 42);
    let reference = kmeans(&pts, &cfg).unwrap();
    for threads in [1, 2, 4, 8] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let r = pool.install(|| kmeans(&pts, &cfg).unwrap());
        assert_eq!(r, reference, "{threads} threads");
    }
}

#[test]
fn close_to_multi_restart_optimum() {
    for seed in 0..10 {
        let pts = random_points(100 + seed, 100);
        let best = brute_force_best(&pts.data, 3, 1000, seed);
        let r = kmeans(&pts, &KmeansConfig::new(3, seed)).unwrap();
        assert!(r.objective <= best * 1.05, "seed {seed}: {} vs {best}", r.objective);
    }
}

fn write_png(img: &RgbImage) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("img.png");
    img.save(&path).unwrap();
    (dir, path)
}

#[test]
fn load_image_cases() {
    let (_d, path) = write_png(&RgbImage::from_pixel(2, 2, Rgb([255, 0, 0])));
    let m = load_image(&path).unwrap();
    assert_eq!(m.data, vec![[255.0, 0.0, 0.0]; 4]);

    let (_d, path) = write_png(&RgbImage::from_pixel(1, 1, Rgb([1, 2, 3])));
    assert_eq!(load_image(&path).unwrap().rows(), 1);

    let dir = tempfile::tempdir().unwrap();
    let rgba = dir.path().join("a.png");
    RgbaImage::from_pixel(1, 1, Rgba([255, 0, 0, 0])).save(&rgba).unwrap();
    assert_eq!(load_image(&rgba).unwrap().data, vec![[255.0; 3]]);

    assert!(load_image(&dir.path().join("missing.png")).is_err());
    let junk = dir.path().join("junk.png");
    std::fs::write(&junk, b"not an image").unwrap();
    assert!(load_image(&junk).is_err());
}

#[test]
fn black_and_white_in_every_space() {
    let img = RgbImage::from_fn(8, 4, |x, _| if x < 4 { Rgb([0, 0, 0]) } else { Rgb([255, 255, 255]) });
    let (_d, path) = write_png(&img);
    for space in ColorSpaceTag::ALL {
        let r = extract_palette(&path, space, &KmeansConfig::new(2, 1)).unwrap();
        let mut sw = r.centroids_srgb.clone();
        sw.sort();
        assert_eq!(sw, vec![Srgb8::BLACK, Srgb8::WHITE], "{space}");
    }
}

#[test]
fn uniform_gray_survives_lab() {
    let pixels = PixelMatrix::from_srgb(&[Srgb8::new(97, 97, 97); 16]);
    let r = palette_of(&pixels, ColorSpaceTag::Lab, &KmeansConfig::new(1, 0)).unwrap();
    let s = r.centroids_srgb[0];
    assert!(s.r.abs_diff(97) <= 1 && s.g.abs_diff(97) <= 1 && s.b.abs_diff(97) <= 1);
}
