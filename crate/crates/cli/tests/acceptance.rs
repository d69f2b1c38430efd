//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines are printed by a plain `cargo test`.

mod support;

#[path = "../../core/tests/support/ciede2000_vectors.rs"]
mod ciede2000_vectors;
#[path = "../../core/tests/support/lloyd_oracle.rs"]
mod lloyd_oracle;

use std::fs;
use std::time::{Duration, Instant};

use colordiff_core::color::convert_srgb;
use colordiff_core::evaluation::{build_report, load_dataset, DistanceTable, Mode};
use colordiff_core::metrics::{delta_cmc, delta_e2000, delta_e76, delta_e94, evaluate, Ciede2000Params, CmcParams, Registry};
use colordiff_core::palette::{kmeans, KmeansConfig, PixelMatrix};
use colordiff_core::{convert, Color, ColorSpaceTag, Lab, Srgb8, WhitePoint};
use colordiff_survey::simulate::Client;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{data, stderr, ServeProcess};

const WP: WhitePoint = WhitePoint::D65;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ciede2000() -> Check {
    let p = Ciede2000Params::default();
    let mut worst = 0.0f64;
    for (i, (a, b, published, _)) in ciede2000_vectors::PAIRS.iter().enumerate() {
        let la = Lab { l: a[0], a: a[1], b: a[2] };
        let lb = Lab { l: b[0], a: b[1], b: b[2] };
        let d = delta_e2000(&la, &lb, &p);
        worst = worst.max((d - published).abs());
        ensure((d - published).abs() < 1e-4, || format!("pair {}: {d} vs {published}", i + 1))?;
    }
    Ok(format!("{} pairs, max deviation {worst:.2e}", ciede2000_vectors::PAIRS.len()))
}

fn round_trips() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let spaces = [ColorSpaceTag::Xyz, ColorSpaceTag::Lab, ColorSpaceTag::Luv, ColorSpaceTag::Hsv, ColorSpaceTag::Hsl];
    for _ in 0..100_000 {
        let c = Srgb8::new(rng.gen(), rng.gen(), rng.gen());
        for space in spaces {
            let there = convert_srgb(c, space, &WP).map_err(|e| e.to_string())?;
            let Ok(Color::Srgb8(back)) = convert(&there, ColorSpaceTag::Srgb8, &WP) else {
                return Err(format!("{c} via {space} did not convert back"));
            };
            let ok = c.r.abs_diff(back.r) <= 1 && c.g.abs_diff(back.g) <= 1 && c.b.abs_diff(back.b) <= 1;
            ensure(ok, || format!("{c} via {space} came back as {back}"))?;
        }
    }
    for (c, want) in [(Srgb8::WHITE, [100.0, 0.0, 0.0]), (Srgb8::BLACK, [0.0, 0.0, 0.0])] {
        let got = convert_srgb(c, ColorSpaceTag::Lab, &WP).map_err(|e| e.to_string())?.channels();
        let ok = got.iter().zip(want).all(|(g, w)| (g - w).abs() <= 1e-6);
        ensure(ok, || format!("{c} -> Lab {got:?}"))?;
    }
    Ok("1e5 colors x 5 spaces within 1 step; white/black Lab anchors".into())
}

fn table1() -> Check {
    let ds = load_dataset(&data("table1_pairs.csv")).map_err(|e| e.to_string())?;
    let table = DistanceTable::load(&data("table1_distances.csv")).map_err(|e| e.to_string())?;
    let report = build_report(&ds, &table).map_err(|e| e.to_string())?;
    let r = |m: &str| report.score(m).and_then(|s| s.pearson_r).ok_or(format!("no r for {m}"));
    let mut summary = Vec::new();
    for (m, stated) in [("hsl_cyl", 0.72), ("hsv_cyl", 0.60), ("xyz_euclid", 0.24), ("euclid_rgb", 0.18), ("w_rgb", 0.15)] {
        let got = r(m)?;
        ensure((got - stated).abs() <= 0.05, || format!("{m}: r={got:.4}, stated {stated}"))?;
        summary.push(format!("{m} {got:.3}"));
    }
    for m in ["lab_cie2000", "lab_cmc", "luv_dist"] {
        let got = r(m)?;
        ensure(got < 0.0, || format!("{m}: r={got:.4} is not negative"))?;
        summary.push(format!("{m} {got:.3}"));
    }
    ensure(report.scores[0].metric == "hsl_cyl", || format!("ranked first: {}", report.scores[0].metric))?;
    Ok(summary.join(", "))
}

fn metric_axioms() -> Check {
    let reg = Registry::default();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let rand_srgb = |rng: &mut ChaCha8Rng| Srgb8::new(rng.gen(), rng.gen(), rng.gen());
    for _ in 0..2000 {
        let (a, b) = (rand_srgb(&mut rng), rand_srgb(&mut rng));
        for id in reg.ids() {
            let desc = reg.lookup(id).map_err(|e| e.to_string())?;
            let d = evaluate(desc, a, b, &WP).map_err(|e| e.to_string())?;
            let zero = evaluate(desc, a, a, &WP).map_err(|e| e.to_string())?;
            ensure(zero == 0.0, || format!("{id}: d({a},{a}) = {zero}"))?;
            ensure(d >= 0.0 && (a == b || d > 0.0), || format!("{id}: d({a},{b}) = {d}"))?;
            if desc.symmetric {
                let back = evaluate(desc, b, a, &WP).map_err(|e| e.to_string())?;
                ensure((d - back).abs() < 1e-12, || format!("{id} asymmetric on {a},{b}"))?;
            }
        }
    }
    let (x, y) = (Lab { l: 50.0, a: 30.0, b: 0.0 }, Lab { l: 50.0, a: 0.0, b: 0.0 });
    ensure((delta_e94(&x, &y) - delta_e94(&y, &x)).abs() > 1e-6, || "cie94 symmetric on witness".into())?;
    let (x, y) = (Lab { l: 50.0, a: 10.0, b: 10.0 }, Lab { l: 60.0, a: 10.0, b: 10.0 });
    let p = CmcParams::default();
    ensure((delta_cmc(&x, &y, &p) - delta_cmc(&y, &x, &p)).abs() > 1e-6, || "cmc symmetric on witness".into())?;
    let lab = |rng: &mut ChaCha8Rng| Lab { l: rng.gen_range(0.0..100.0), a: rng.gen_range(-128.0..127.0), b: rng.gen_range(-128.0..127.0) };
    for _ in 0..10_000 {
        let (a, b, c) = (lab(&mut rng), lab(&mut rng), lab(&mut rng));
        ensure(delta_e76(&a, &c) <= delta_e76(&a, &b) + delta_e76(&b, &c) + 1e-9, || "cie76 triangle inequality".into())?;
    }
    Ok(format!("{} metrics, 2000 pairs; 2 asymmetry witnesses; 1e4 triangle triples", reg.ids().count()))
}

fn random_points(seed: u64, n: usize) -> PixelMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PixelMatrix {
        space: ColorSpaceTag::Lab,
        data: (0..n).map(|_| [rng.gen_range(0.0..100.0), rng.gen_range(-80.0..80.0), rng.gen_range(-80.0..80.0)]).collect(),
    }
}

fn kmeans_properties() -> Check {
    for seed in 0..50 {
        let pts = random_points(seed, 300);
        let r = kmeans(&pts, &KmeansConfig::new(2 + seed as usize % 6, seed)).map_err(|e| e.to_string())?;
        ensure(r.objective_history.windows(2).all(|w| w[1] <= w[0]), || format!("seed {seed}: objective rose"))?;
    }
    let pts = random_points(1, 1000);
    let r = kmeans(&pts, &KmeansConfig::new(1, 1)).map_err(|e| e.to_string())?;
    for j in 0..3 {
        let mean = pts.data.iter().map(|p| p[j]).sum::<f64>() / pts.data.len() as f64;
        let rel = (r.centroids[0][j] - mean).abs() / mean.abs().max(f64::MIN_POSITIVE);
        ensure(rel <= 1e-9, || format!("k=1 centroid off by {rel:e} relative"))?;
    }
    let pts = random_points(2, 2000);
    let cfg = KmeansConfig::new(6, 42);
    let first = kmeans(&pts, &cfg).map_err(|e| e.to_string())?;
    for _ in 0..3 {
        ensure(kmeans(&pts, &cfg).map_err(|e| e.to_string())? == first, || "repeated run differs".into())?;
    }
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let pts = random_points(100 + seed, 100);
        let best = lloyd_oracle::brute_force_best(&pts.data, 3, 1000, seed);
        let r = kmeans(&pts, &KmeansConfig::new(3, seed)).map_err(|e| e.to_string())?;
        let ratio = r.objective / best;
        worst = worst.max(ratio);
        ensure(ratio <= 1.05, || format!("instance {seed}: {:.2}% above oracle", (ratio - 1.0) * 100.0))?;
    }
    Ok(format!("worst ratio to 1000-restart oracle {worst:.4}"))
}

fn closed_loop() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let datasets = dir.path().join("datasets");
    fs::create_dir(&datasets).map_err(|e| e.to_string())?;
    for name in ["demo10", "durability"] {
        fs::copy(data("datasets/demo10.csv"), datasets.join(format!("{name}.csv"))).map_err(|e| e.to_string())?;
    }
    let store = dir.path().join("store");

    // acknowledged judgments must survive a SIGKILL
    let server = ServeProcess::start(&store, &datasets);
    let c = Client::new(&server.url);
    let sid = c.create_session(Mode::Rating, "durability", 1, None).map_err(|e| e.to_string())?.session_id;
    let mut acked = 0;
    for r in 0..7 {
        let s = c.next(&sid).map_err(|e| e.to_string())?.ok_or("session ended early")?;
        c.submit(&sid, s.stimulus_id, r, 10).map_err(|e| e.to_string())?;
        acked += 1;
    }
    let addr = server.addr.clone();
    server.kill();
    let server = ServeProcess::start_at(&addr, &store, &datasets);
    let c = Client::new(&server.url);
    let logged = c.export("durability").map_err(|e| e.to_string())?.lines().count();
    ensure(logged == acked, || format!("{acked} acknowledged, {logged} after restart"))?;
    let resumed = c.next(&sid).map_err(|e| e.to_string())?.ok_or("session lost")?;
    ensure(resumed.index == acked, || format!("resumed at {} instead of {acked}", resumed.index))?;

    let scored = dir.path().join("scored.csv");
    let out = support::bin()
        .args(["simulate", "demo10", "--respondents", "40", "--noise", "0", "--seed", "3"])
        .args(["--oracle-metric", "lab_cie2000", "--url", &server.url])
        .arg("--out")
        .arg(&scored)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("simulate failed: {}", stderr(&out)))?;
    drop(server);

    let report = dir.path().join("report.csv");
    let out = support::bin()
        .arg("eval")
        .arg(&scored)
        .arg("--out")
        .arg(&report)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("eval failed: {}", stderr(&out)))?;
    let text = fs::read_to_string(&report).map_err(|e| e.to_string())?;
    let r: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("lab_cie2000,"))
        .and_then(|rest| rest.split(',').next())
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| format!("no lab_cie2000 row in\n{text}"))?;
    ensure(r >= 0.999, || format!("lab_cie2000 r = {r}"))?;
    Ok(format!("r = {r:.4}; {acked}/{acked} judgments survived SIGKILL"))
}

fn palette_sheet() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let sheet = dir.path().join("sheet.png");
    let img = data("images/night_scene.png");
    let out = support::bin()
        .arg("palette")
        .arg(&img)
        .args(["--space", "srgb8,hsv,hsl,xyz,lab,luv", "--k", "6", "--seed", "1", "--sheet"])
        .arg(&sheet)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("palette failed: {}", stderr(&out)))?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    let swatches = stdout.lines().filter(|l| l.starts_with('#')).count();
    ensure(swatches == 36, || format!("{swatches} swatches, expected 36"))?;
    let png = image::open(&sheet).map_err(|e| e.to_string())?.to_rgb8();
    let (w, h) = png.dimensions();
    ensure((w, h) == (6 * 48 + 7 * 6, 6 * 48 + 7 * 6), || format!("sheet is {w}x{h}"))?;
    Ok(format!("6 models x 6 swatches, {w}x{h} sheet"))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 7] = [
        ("CIEDE2000 published test vectors", ciede2000, Duration::from_secs(1)),
        ("conversion round trips", round_trips, Duration::from_secs(5)),
        ("reference correlation reproduction", table1, Duration::from_secs(1)),
        ("metric axioms", metric_axioms, Duration::from_secs(30)),
        ("k-means properties", kmeans_properties, Duration::from_secs(30)),
        ("closed loop serve + simulate + eval", closed_loop, Duration::from_secs(30)),
        ("palette sheet in six color models", palette_sheet, Duration::from_secs(30)),
    ];
    let mut failed = Vec::new();
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; took {elapsed:.2?}, budget {budget:.0?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {name} ({elapsed:.2?}): {detail}"),
            Err(why) => {
                println!("FAIL {name} ({elapsed:.2?}): {why}");
                failed.push(name);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
