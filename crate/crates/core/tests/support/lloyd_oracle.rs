use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Plain Lloyd iterations from `k` distinct random points, run to a fixed
/// point. Written independently of the library for use as an oracle.
fn lloyd_restart(points: &[[f64; 3]], k: usize, rng: &mut ChaCha8Rng) -> f64 {
    let idx = rand::seq::index::sample(rng, points.len(), k);
    let mut centers: Vec<[f64; 3]> = idx.iter().map(|i| points[i]).collect();
    let mut labels = vec![usize::MAX; points.len()];
    loop {
        let mut changed = false;
        for (p, l) in points.iter().zip(labels.iter_mut()) {
            let best = (0..k)
                .min_by(|&a, &b| {
                    let da: f64 = (0..3).map(|j| (p[j] - centers[a][j]).powi(2)).sum();
                    let db: f64 = (0..3).map(|j| (p[j] - centers[b][j]).powi(2)).sum();
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap();
            if *l != best {
                *l = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        for (c, center) in centers.iter_mut().enumerate() {
            let members: Vec<&[f64; 3]> = points.iter().zip(&labels).filter(|(_, &l)| l == c).map(|(p, _)| p).collect();
            if !members.is_empty() {
                for j in 0..3 {
                    center[j] = members.iter().map(|m| m[j]).sum::<f64>() / members.len() as f64;
                }
            }
        }
    }
    points.iter().zip(&labels).map(|(p, &l)| (0..3).map(|j| (p[j] - centers[l][j]).powi(2)).sum::<f64>()).sum()
}

pub fn brute_force_best(points: &[[f64; 3]], k: usize, restarts: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..restarts).map(|_| lloyd_restart(points, k, &mut rng)).fold(f64::INFINITY, f64::min)
}
