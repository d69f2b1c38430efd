//! Dominant-palette extraction with k-means.
//!
//! Pixels are converted into a working color model, clustered with Lloyd
//! iterations on plain Euclidean distance over that model's coordinates, and
//! the centroids are converted back to sRGB. Hue is treated as an ordinary
//! linear channel, so reds near 0° and 360° are far apart in HSV/HSL.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use image::{Rgb, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::color::{convert, Color, ColorSpaceTag, Srgb8, WhitePoint};
use crate::error::{ColorError, Result};

/// N×3 pixel coordinates in one color model.
///
/// HSV/HSL rows carry hue scaled to `[0, 1]`; every other space uses its
/// native units (`[0, 255]` for 8-bit sRGB).
#[derive(Debug, Clone, PartialEq)]
pub struct PixelMatrix {
    pub space: ColorSpaceTag,
    pub data: Vec<[f64; 3]>,
}

impl PixelMatrix {
    pub fn from_srgb(pixels: &[Srgb8]) -> Self {
        PixelMatrix {
            space: ColorSpaceTag::Srgb8,
            data: pixels.iter().map(|p| [p.r as f64, p.g as f64, p.b as f64]).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.data.len()
    }

    /// Converts every row into `space`.
    pub fn to_space(&self, space: ColorSpaceTag, wp: &WhitePoint) -> Result<PixelMatrix> {
        let data = self
            .data
            .par_iter()
            .map(|row| {
                let c = convert(&row_to_color(self.space, *row), space, wp)?;
                Ok(color_to_row(&c))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PixelMatrix { space, data })
    }
}

fn is_hue_space(space: ColorSpaceTag) -> bool {
    matches!(space, ColorSpaceTag::Hsv | ColorSpaceTag::Hsl)
}

/// Working-space coordinates of a color.
pub fn color_to_row(c: &Color) -> [f64; 3] {
    let mut ch = c.channels();
    if is_hue_space(c.tag()) {
        ch[0] /= 360.0;
    }
    ch
}

pub fn row_to_color(space: ColorSpaceTag, row: [f64; 3]) -> Color {
    let mut ch = row;
    if is_hue_space(space) {
        ch[0] *= 360.0;
    }
    Color::from_channels(space, ch)
}

/// Loads a PNG or JPEG as 8-bit sRGB pixels in row-major order. Alpha is
/// composited over opaque white.
pub fn load_image(path: &Path) -> Result<PixelMatrix> {
    let img = image::open(path)
        .map_err(|source| ColorError::Image { path: path.to_path_buf(), source })?
        .to_rgba8();
    if img.width() == 0 || img.height() == 0 {
        return Err(ColorError::EmptyImage { path: path.to_path_buf() });
    }
    let pixels: Vec<Srgb8> = img
        .pixels()
        .map(|p| {
            let [r, g, b, a] = p.0;
            let over_white = |c: u8| {
                let a = a as u32;
                ((c as u32 * a + 255 * (255 - a) + 127) / 255) as u8
            };
            Srgb8::new(over_white(r), over_white(g), over_white(b))
        })
        .collect();
    Ok(PixelMatrix::from_srgb(&pixels))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    KmeansPlusPlus,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KmeansConfig {
    pub k: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Stop once the relative objective improvement of an iteration drops
    /// below this value.
    pub tol: f64,
    pub init: Init,
    /// Independent initializations; the run with the lowest objective wins.
    pub restarts: usize,
}

impl KmeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        KmeansConfig { k, seed, max_iters: 100, tol: 1e-6, init: Init::KmeansPlusPlus, restarts: 10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PaletteResult {
    pub space: ColorSpaceTag,
    /// Centroids in working-space coordinates, ordered by population (largest
    /// first).
    pub centroids: Vec<[f64; 3]>,
    pub populations: Vec<usize>,
    pub objective: f64,
    pub iterations: usize,
    pub centroids_srgb: Vec<Srgb8>,
    /// Objective after initialization and after every iteration.
    pub objective_history: Vec<f64>,
    /// Final cluster index of every input row.
    pub assignments: Vec<usize>,
    /// Requested k before reduction to the number of distinct points.
    pub requested_k: usize,
    /// True when k exceeded the number of distinct points and was reduced.
    pub k_reduced: bool,
}

fn sq_dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d0 = a[0] - b[0];
    let d1 = a[1] - b[1];
    let d2 = a[2] - b[2];
    d0 * d0 + d1 * d1 + d2 * d2
}

fn nearest(p: &[f64; 3], centroids: &[[f64; 3]]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centroids.iter().enumerate() {
        let d = sq_dist(p, c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn distinct_points(points: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let mut seen = HashSet::new();
    points
        .iter()
        .filter(|p| seen.insert(p.map(|v| if v == 0.0 { 0u64 } else { v.to_bits() })))
        .copied()
        .collect()
}

fn init_centroids(points: &[[f64; 3]], distinct: &[[f64; 3]], k: usize, cfg: &KmeansConfig, rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
    match cfg.init {
        Init::Random => {
            let picks = rand::seq::index::sample(rng, distinct.len(), k);
            picks.iter().map(|i| distinct[i]).collect()
        }
        Init::KmeansPlusPlus => {
            let mut centroids = vec![points[rng.gen_range(0..points.len())]];
            let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
            while centroids.len() < k {
                let total: f64 = d2.iter().sum();
                let mut target = rng.gen::<f64>() * total;
                let mut chosen = None;
                for (i, &w) in d2.iter().enumerate() {
                    if w > 0.0 {
                        chosen = Some(i);
                        if target < w {
                            break;
                        }
                        target -= w;
                    }
                }
                let c = points[chosen.expect("k does not exceed the distinct point count")];
                for (p, d) in points.iter().zip(d2.iter_mut()) {
                    *d = d.min(sq_dist(p, &c));
                }
                centroids.push(c);
            }
            centroids
        }
    }
}

fn assign(points: &[[f64; 3]], centroids: &[[f64; 3]]) -> Vec<(usize, f64)> {
    points.par_iter().map(|p| nearest(p, centroids)).collect()
}

/// Moves the farthest point of a multi-member cluster into each empty cluster
/// and centers the emptied cluster on it. Returns whether anything moved.
fn fill_empty_clusters(points: &[[f64; 3]], assignment: &mut [(usize, f64)], centroids: &mut [[f64; 3]]) -> bool {
    let k = centroids.len();
    let mut moved = false;
    loop {
        let mut counts = vec![0usize; k];
        for &(c, _) in assignment.iter() {
            counts[c] += 1;
        }
        let Some(empty) = counts.iter().position(|&n| n == 0) else { return moved };
        let donor = assignment
            .iter()
            .enumerate()
            .filter(|(_, (c, _))| counts[*c] > 1)
            .fold(None::<(usize, f64)>, |best, (i, &(_, d))| match best {
                Some((_, bd)) if bd >= d => best,
                _ => Some((i, d)),
            });
        let Some((i, _)) = donor else { return moved };
        assignment[i] = (empty, 0.0);
        centroids[empty] = points[i];
        moved = true;
    }
}

fn update_centroids(points: &[[f64; 3]], assignment: &[(usize, f64)], prev: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let k = prev.len();
    let mut sums = vec![[0.0f64; 3]; k];
    let mut counts = vec![0usize; k];
    // sequential in input order so results do not depend on the thread count
    for (p, &(c, _)) in points.iter().zip(assignment) {
        for j in 0..3 {
            sums[c][j] += p[j];
        }
        counts[c] += 1;
    }
    sums.iter()
        .zip(&counts)
        .zip(prev)
        .map(|((s, &n), old)| if n == 0 { *old } else { s.map(|v| v / n as f64) })
        .collect()
}

fn objective_of(points: &[[f64; 3]], assignment: &[(usize, f64)], centroids: &[[f64; 3]]) -> f64 {
    points.iter().zip(assignment).map(|(p, &(c, _))| sq_dist(p, &centroids[c])).sum()
}

/// Lloyd's k-means over the rows of `points`.
pub fn kmeans(points: &PixelMatrix, cfg: &KmeansConfig) -> Result<PaletteResult> {
    if cfg.k < 1 {
        return Err(ColorError::Usage("k must be at least 1".into()));
    }
    if points.data.is_empty() {
        return Err(ColorError::Usage("cannot cluster an empty pixel set".into()));
    }
    if !(cfg.tol >= 0.0) {
        return Err(ColorError::Usage(format!("tolerance must be non-negative, got {}", cfg.tol)));
    }
    let pts = &points.data;
    let distinct = distinct_points(pts);
    let k = cfg.k.min(distinct.len());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut best: Option<LloydRun> = None;
    for _ in 0..cfg.restarts.max(1) {
        let run = lloyd(pts, &distinct, k, cfg, &mut rng);
        if best.as_ref().map_or(true, |b| run.objective < b.objective) {
            best = Some(run);
        }
    }
    let LloydRun { centroids, assignment, objective, history, iterations } = best.expect("at least one run");

    let mut populations = vec![0usize; k];
    for &(c, _) in &assignment {
        populations[c] += 1;
    }

    // order clusters by population, ties by centroid coordinates
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        populations[b].cmp(&populations[a]).then_with(|| {
            centroids[a].partial_cmp(&centroids[b]).unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let mut rank = vec![0usize; k];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let centroids: Vec<[f64; 3]> = order.iter().map(|&i| centroids[i]).collect();
    let populations: Vec<usize> = order.iter().map(|&i| populations[i]).collect();
    let assignments: Vec<usize> = assignment.iter().map(|&(c, _)| rank[c]).collect();

    let centroids_srgb = centroids
        .iter()
        .map(|c| match convert(&row_to_color(points.space, *c), ColorSpaceTag::Srgb8, &WhitePoint::D65)? {
            Color::Srgb8(s) => Ok(s),
            _ => unreachable!("conversion returns the requested space"),
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(PaletteResult {
        space: points.space,
        centroids,
        populations,
        objective,
        iterations,
        centroids_srgb,
        objective_history: history,
        assignments,
        requested_k: cfg.k,
        k_reduced: k < cfg.k,
    })
}

struct LloydRun {
    centroids: Vec<[f64; 3]>,
    assignment: Vec<(usize, f64)>,
    objective: f64,
    history: Vec<f64>,
    iterations: usize,
}

fn lloyd(pts: &[[f64; 3]], distinct: &[[f64; 3]], k: usize, cfg: &KmeansConfig, rng: &mut ChaCha8Rng) -> LloydRun {
    let mut centroids = init_centroids(pts, distinct, k, cfg, rng);
    let mut assignment = assign(pts, &centroids);
    fill_empty_clusters(pts, &mut assignment, &mut centroids);
    let mut objective = objective_of(pts, &assignment, &centroids);
    let mut history = vec![objective];
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        iterations += 1;
        centroids = update_centroids(pts, &assignment, &centroids);
        let mut next = assign(pts, &centroids);
        let refilled = fill_empty_clusters(pts, &mut next, &mut centroids);
        let changed = refilled || next.iter().zip(&assignment).any(|(a, b)| a.0 != b.0);
        assignment = next;
        let new_objective = objective_of(pts, &assignment, &centroids);
        let improvement = objective - new_objective;
        objective = new_objective;
        history.push(objective);
        if !changed || objective == 0.0 || (!refilled && improvement <= cfg.tol * objective) {
            break;
        }
    }
    LloydRun { centroids, assignment, objective, history, iterations }
}

/// Loads an image, clusters it in `space`, and returns the palette.
pub fn extract_palette(path: &Path, space: ColorSpaceTag, cfg: &KmeansConfig) -> Result<PaletteResult> {
    let pixels = load_image(path)?;
    palette_of(&pixels, space, cfg)
}

/// Clusters already-loaded pixels in `space`.
pub fn palette_of(pixels: &PixelMatrix, space: ColorSpaceTag, cfg: &KmeansConfig) -> Result<PaletteResult> {
    let working = pixels.to_space(space, &WhitePoint::D65)?;
    kmeans(&working, cfg)
}

impl PaletteResult {
    /// Plain-text report: header lines followed by `swatch,population` rows.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "space: {}", self.space);
        let _ = writeln!(out, "k: {}", self.centroids.len());
        if self.k_reduced {
            let _ = writeln!(out, "requested_k: {} (reduced to distinct colors)", self.requested_k);
        }
        let _ = writeln!(out, "objective: {:.4}", self.objective);
        let _ = writeln!(out, "iterations: {}", self.iterations);
        let _ = writeln!(out, "swatch,population");
        for (s, n) in self.centroids_srgb.iter().zip(&self.populations) {
            let _ = writeln!(out, "{s},{n}");
        }
        out
    }
}

/// Renders palettes as stacked rows of square swatches, one row per palette.
pub fn render_swatch_sheet(rows: &[Vec<Srgb8>], swatch: u32, gap: u32) -> RgbImage {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0) as u32;
    let width = (cols * swatch + (cols + 1) * gap).max(1);
    let height = (rows.len() as u32 * swatch + (rows.len() as u32 + 1) * gap).max(1);
    let mut img = RgbImage::from_pixel(width, height, Rgb([255, 255, 255]));
    for (ri, row) in rows.iter().enumerate() {
        let y0 = gap + ri as u32 * (swatch + gap);
        for (ci, c) in row.iter().enumerate() {
            let x0 = gap + ci as u32 * (swatch + gap);
            for y in y0..y0 + swatch {
                for x in x0..x0 + swatch {
                    img.put_pixel(x, y, Rgb([c.r, c.g, c.b]));
                }
            }
        }
    }
    img
}

/// Writes a swatch sheet as PNG.
pub fn save_swatch_sheet(rows: &[Vec<Srgb8>], path: &Path) -> Result<()> {
    render_swatch_sheet(rows, 48, 6)
        .save(path)
        .map_err(|source| ColorError::Image { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[[f64; 3]]) -> PixelMatrix {
        PixelMatrix { space: ColorSpaceTag::Lab, data: rows.to_vec() }
    }

    #[test]
    fn uniform_k1() {
        let m = matrix(&[[10.0, 2.0, 3.0]; 5]);
        let r = kmeans(&m, &KmeansConfig::new(1, 7)).unwrap();
        assert_eq!(r.centroids, vec![[10.0, 2.0, 3.0]]);
        assert_eq!(r.objective, 0.0);
        assert_eq!(r.populations, vec![5]);
    }

    #[test]
    fn two_points_k2() {
        let m = matrix(&[[0.0, 0.0, 0.0], [50.0, 10.0, -10.0]]);
        let r = kmeans(&m, &KmeansConfig::new(2, 1)).unwrap();
        assert_eq!(r.objective, 0.0);
        assert_eq!(r.populations, vec![1, 1]);
        assert!(r.centroids.contains(&[0.0, 0.0, 0.0]));
    }

    #[test]
    fn k_reduced_to_distinct() {
        let m = matrix(&[[1.0, 1.0, 1.0], [1.0, 1.0, 1.0], [2.0, 2.0, 2.0]]);
        let r = kmeans(&m, &KmeansConfig::new(5, 3)).unwrap();
        assert!(r.k_reduced);
        assert_eq!(r.centroids.len(), 2);
        assert_eq!(r.populations.iter().sum::<usize>(), 3);
    }

    #[test]
    fn zero_k_is_usage_error() {
        let m = matrix(&[[1.0, 1.0, 1.0]]);
        assert!(matches!(kmeans(&m, &KmeansConfig::new(0, 3)), Err(ColorError::Usage(_))));
    }

    #[test]
    fn random_init_works() {
        let m = matrix(&[[0.0; 3], [1.0; 3], [10.0; 3], [11.0; 3]]);
        let cfg = KmeansConfig { init: Init::Random, ..KmeansConfig::new(2, 9) };
        let r = kmeans(&m, &cfg).unwrap();
        assert!((r.objective - 3.0).abs() < 1e-12, "{}", r.objective);
    }

    #[test]
    fn empty_cluster_refilled() {
        let pts = vec![[0.0; 3], [0.0, 0.0, 1.0], [100.0, 0.0, 0.0]];
        let mut a = vec![(0, 0.0), (0, 1.0), (0, 100.0)];
        let mut c = vec![[0.0; 3], [-5.0; 3]];
        assert!(fill_empty_clusters(&pts, &mut a, &mut c));
        assert_eq!(a[2].0, 1);
        assert_eq!(c[1], [100.0, 0.0, 0.0]);
    }

    #[test]
    fn hue_scaled_rows() {
        let c = Color::Hsv(crate::color::Hsv { h: 180.0, s: 0.5, v: 1.0 });
        assert_eq!(color_to_row(&c), [0.5, 0.5, 1.0]);
        assert_eq!(row_to_color(ColorSpaceTag::Hsv, [0.5, 0.5, 1.0]), c);
    }

    #[test]
    fn report_format() {
        let m = PixelMatrix::from_srgb(&[Srgb8::new(255, 0, 0); 3]);
        let r = kmeans(&m, &KmeansConfig::new(1, 0)).unwrap();
        assert_eq!(r.report(), "space: srgb8\nk: 1\nobjective: 0.0000\niterations: 1\nswatch,population\n#FF0000,3\n");
    }
}
