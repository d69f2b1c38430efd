//! Scoring color-difference metrics against human judgments.
//!
//! A [`ColorPairDataset`] holds the stimulus pairs and, optionally, one human
//! score per pair. Metric distances are tabulated per pair and compared with
//! the scores by Pearson correlation and by a range-normalized mean absolute
//! error.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::color::{Srgb8, WhitePoint};
use crate::error::{ColorError, Result};
use crate::metrics::Registry;

/// Upper end of the integer rating scale. Ratings run from 0 to this value.
pub const RATING_MAX: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorPair {
    pub id: u32,
    pub a: Srgb8,
    pub b: Srgb8,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ColorPairDataset {
    pub pairs: Vec<ColorPair>,
    /// One score per pair, aligned with `pairs`, when the file carries them.
    pub human: Option<Vec<f64>>,
    pub source: String,
    /// `# key: value` comment directives other than `source`.
    pub directives: BTreeMap<String, String>,
}

impl ColorPairDataset {
    pub fn new(pairs: Vec<ColorPair>, human: Option<Vec<f64>>, source: impl Into<String>) -> Result<Self> {
        let mut seen = HashSet::new();
        for p in &pairs {
            if !seen.insert(p.id) {
                return Err(ColorError::DuplicatePair(p.id));
            }
        }
        if let Some(h) = &human {
            if h.len() != pairs.len() {
                return Err(ColorError::Dataset {
                    location: "dataset".into(),
                    message: format!("{} human scores for {} pairs", h.len(), pairs.len()),
                });
            }
            if let Some(i) = h.iter().position(|v| !v.is_finite()) {
                return Err(ColorError::Dataset {
                    location: format!("pair {}", pairs[i].id),
                    message: "human score is not finite".into(),
                });
            }
        }
        Ok(ColorPairDataset { pairs, human, source: source.into(), directives: BTreeMap::new() })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair(&self, id: u32) -> Option<&ColorPair> {
        self.pairs.iter().find(|p| p.id == id)
    }

    pub fn index_of(&self, id: u32) -> Option<usize> {
        self.pairs.iter().position(|p| p.id == id)
    }

    /// Parses the line format `id,#RRGGBB,#RRGGBB[,human_score]`. Lines
    /// starting with `#` are comments; `# key: value` comments are kept as
    /// directives. Either every record carries a score or none does.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut scores: Vec<Option<f64>> = Vec::new();
        let mut directives = BTreeMap::new();
        let mut seen = HashSet::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let loc = || format!("{origin}:{}", n + 1);
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((k, v)) = comment.split_once(':') {
                    let key = k.trim();
                    if !key.is_empty() && key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                        directives.insert(key.to_ascii_lowercase(), v.trim().to_string());
                    }
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if !(3..=4).contains(&fields.len()) {
                return Err(ColorError::Dataset {
                    location: loc(),
                    message: format!("expected 3 or 4 fields, found {}", fields.len()),
                });
            }
            let id: u32 = fields[0].parse().map_err(|_| ColorError::Dataset {
                location: loc(),
                message: format!("invalid pair id `{}`", fields[0]),
            })?;
            let color = |s: &str| {
                s.parse::<Srgb8>().map_err(|e| ColorError::Dataset { location: loc(), message: e.to_string() })
            };
            let (a, b) = (color(fields[1])?, color(fields[2])?);
            let score = match fields.get(3) {
                Some(s) if !s.is_empty() => Some(s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                    ColorError::Dataset { location: loc(), message: format!("invalid human score `{s}`") }
                })?),
                _ => None,
            };
            if !seen.insert(id) {
                return Err(ColorError::DuplicatePair(id));
            }
            pairs.push(ColorPair { id, a, b });
            scores.push(score);
        }
        let human = if scores.iter().any(Option::is_some) {
            if let Some(i) = scores.iter().position(Option::is_none) {
                return Err(ColorError::Dataset {
                    location: origin.to_string(),
                    message: format!("pair {} has no human score but others do", pairs[i].id),
                });
            }
            Some(scores.into_iter().flatten().collect())
        } else {
            None
        };
        let source = directives.remove("source").unwrap_or_else(|| origin.to_string());
        let mut ds = ColorPairDataset::new(pairs, human, source)?;
        ds.directives = directives;
        Ok(ds)
    }

    /// Serializes back to the line format, including the source directive.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# source: {}", self.source);
        for (k, v) in &self.directives {
            let _ = writeln!(out, "# {k}: {v}");
        }
        for (i, p) in self.pairs.iter().enumerate() {
            match &self.human {
                Some(h) => {
                    let _ = writeln!(out, "{},{},{},{}", p.id, p.a, p.b, h[i]);
                }
                None => {
                    let _ = writeln!(out, "{},{},{}", p.id, p.a, p.b);
                }
            }
        }
        out
    }
}

pub fn load_dataset(path: &Path) -> Result<ColorPairDataset> {
    let text = std::fs::read_to_string(path).map_err(|e| ColorError::io(path, e))?;
    ColorPairDataset::parse(&text, &path.display().to_string())
}

/// Per-metric distance columns aligned with a dataset's pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTable {
    pub pair_ids: Vec<u32>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl DistanceTable {
    pub fn column(&self, metric: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(m, _)| m == metric).map(|(_, v)| v.as_slice())
    }

    pub fn metrics(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(m, _)| m.as_str())
    }

    /// Reads a precomputed table: header `pair_id,<metric>,...`, one row per
    /// pair. Comment lines start with `#`.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let err = |n: usize, message: String| ColorError::Dataset { location: format!("{origin}:{n}"), message };
        let (hn, header) = lines.next().ok_or_else(|| err(0, "missing header".into()))?;
        let names: Vec<&str> = header.split(',').map(str::trim).collect();
        if names.len() < 2 || names[0] != "pair_id" {
            return Err(err(hn, "header must be `pair_id,<metric>,...`".into()));
        }
        let mut pair_ids = Vec::new();
        let mut columns: Vec<(String, Vec<f64>)> = names[1..].iter().map(|m| (m.to_string(), Vec::new())).collect();
        for (n, line) in lines {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != names.len() {
                return Err(err(n, format!("expected {} fields, found {}", names.len(), fields.len())));
            }
            pair_ids.push(fields[0].parse().map_err(|_| err(n, format!("invalid pair id `{}`", fields[0])))?);
            for (col, f) in columns.iter_mut().zip(&fields[1..]) {
                let v: f64 = f
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite() && *v >= 0.0)
                    .ok_or_else(|| err(n, format!("invalid distance `{f}`")))?;
                col.1.push(v);
            }
        }
        Ok(DistanceTable { pair_ids, columns })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ColorError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("pair_id");
        for m in self.metrics() {
            out.push(',');
            out.push_str(m);
        }
        out.push('\n');
        for (i, id) in self.pair_ids.iter().enumerate() {
            let _ = write!(out, "{id}");
            for (_, col) in &self.columns {
                let _ = write!(out, ",{:.4}", col[i]);
            }
            out.push('\n');
        }
        out
    }
}

/// Evaluates every metric on every pair, in dataset order.
pub fn compute_distance_table(
    ds: &ColorPairDataset,
    metrics: &[&str],
    registry: &Registry,
    wp: &WhitePoint,
) -> Result<DistanceTable> {
    let mut columns = Vec::with_capacity(metrics.len());
    for &id in metrics {
        let desc = registry.lookup(id)?;
        let col = ds
            .pairs
            .iter()
            .map(|p| crate::metrics::evaluate(desc, p.a, p.b, wp))
            .collect::<Result<Vec<_>>>()?;
        columns.push((id.to_string(), col));
    }
    Ok(DistanceTable { pair_ids: ds.pairs.iter().map(|p| p.id).collect(), columns })
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(ColorError::UndefinedCorrelation(format!("length mismatch {} vs {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(ColorError::UndefinedCorrelation("fewer than two observations".into()));
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(ColorError::UndefinedCorrelation("zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Average ranks, ties sharing the mean of their positions.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = r;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation (Pearson over average ranks).
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(ColorError::UndefinedCorrelation(format!("length mismatch {} vs {}", x.len(), y.len())));
    }
    pearson(&ranks(x), &ranks(y))
}

/// Mean absolute error after min-max mapping `metric` onto the range of
/// `human`.
pub fn mae_normalized(metric: &[f64], human: &[f64]) -> Result<f64> {
    if metric.len() != human.len() || metric.is_empty() {
        return Err(ColorError::UndefinedScaling(format!(
            "column lengths {} and {}",
            metric.len(),
            human.len()
        )));
    }
    let (lo, hi) = min_max(metric);
    if hi == lo {
        return Err(ColorError::UndefinedScaling("metric column is constant".into()));
    }
    let (hlo, hhi) = min_max(human);
    let scale = (hhi - hlo) / (hi - lo);
    Ok(metric.iter().zip(human).map(|(m, h)| ((m - lo) * scale + hlo - h).abs()).sum::<f64>() / metric.len() as f64)
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricScore {
    pub metric: String,
    pub pearson_r: Option<f64>,
    pub spearman_rho: Option<f64>,
    pub mae: Option<f64>,
    /// Why a value is missing, when one is.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    /// Ranked by Pearson r, descending; unavailable correlations last.
    pub scores: Vec<MetricScore>,
    pub pair_count: usize,
    pub source: String,
}

/// Correlates every table column with the dataset's human scores.
pub fn build_report(ds: &ColorPairDataset, table: &DistanceTable) -> Result<EvaluationReport> {
    let human = ds
        .human
        .as_ref()
        .ok_or_else(|| ColorError::Usage(format!("dataset `{}` has no human scores", ds.source)))?;
    let aligned: Vec<f64> = table
        .pair_ids
        .iter()
        .map(|id| ds.index_of(*id).map(|i| human[i]).ok_or(ColorError::UnknownPair(*id)))
        .collect::<Result<_>>()?;
    let mut scores: Vec<MetricScore> = table
        .columns
        .iter()
        .map(|(metric, col)| {
            let r = pearson(col, &aligned);
            let mae = mae_normalized(col, &aligned);
            let note = match (&r, &mae) {
                (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
                _ => None,
            };
            MetricScore {
                metric: metric.clone(),
                pearson_r: r.ok(),
                spearman_rho: spearman(col, &aligned).ok(),
                mae: mae.ok(),
                note,
            }
        })
        .collect();
    scores.sort_by(|a, b| match (a.pearson_r, b.pearson_r) {
        (Some(x), Some(y)) => y.total_cmp(&x),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    Ok(EvaluationReport { scores, pair_count: aligned.len(), source: ds.source.clone() })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "NA".into())
}

impl EvaluationReport {
    pub fn score(&self, metric: &str) -> Option<&MetricScore> {
        self.scores.iter().find(|s| s.metric == metric)
    }

    /// `metric,pearson_r,mae` rows in ranking order; `NA` marks unavailable
    /// values.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,pearson_r,mae\n");
        for s in &self.scores {
            let _ = writeln!(out, "{},{},{}", s.metric, fmt_opt(s.pearson_r), fmt_opt(s.mae));
        }
        out
    }

    /// Human-readable ranking with the sign of each correlation spelled out.
    pub fn ranking_text(&self) -> String {
        let mut out = format!("{} pairs from {}\n", self.pair_count, self.source);
        for (i, s) in self.scores.iter().enumerate() {
            let sign = match s.pearson_r {
                Some(r) if r > 0.0 => "positive",
                Some(r) if r < 0.0 => "negative",
                Some(_) => "zero",
                None => "unavailable",
            };
            let _ = write!(
                out,
                "{:>2}. {:<12} r={} ({sign}) rho={} mae={}",
                i + 1,
                s.metric,
                fmt_opt(s.pearson_r),
                fmt_opt(s.spearman_rho),
                fmt_opt(s.mae)
            );
            if let Some(n) = &s.note {
                let _ = write!(out, " [{n}]");
            }
            out.push('\n');
        }
        out
    }
}

/// Diverging ramp: blue at −1, white at 0, red at +1.
pub fn ramp_color(r: f64) -> Srgb8 {
    let t = r.clamp(-1.0, 1.0);
    let (from, to, f) = if t >= 0.0 {
        ([247.0, 247.0, 247.0], [178.0, 24.0, 43.0], t)
    } else {
        ([247.0, 247.0, 247.0], [33.0, 102.0, 172.0], -t)
    };
    let mix = |i: usize| (from[i] + (to[i] - from[i]) * f).round() as u8;
    Srgb8::new(mix(0), mix(1), mix(2))
}

/// One-row SVG heatmap of Pearson r per metric, in report order.
pub fn render_heatmap(report: &EvaluationReport) -> Result<String> {
    if report.scores.is_empty() {
        return Err(ColorError::Usage("cannot render a heatmap of an empty report".into()));
    }
    let (cell, label_h, pad) = (90u32, 40u32, 10u32);
    let width = pad * 2 + cell * report.scores.len() as u32;
    let height = pad * 2 + label_h + cell;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"  <rect width="{width}" height="{height}" fill="white"/>"#);
    for (i, s) in report.scores.iter().enumerate() {
        let x = pad + i as u32 * cell;
        let y = pad + label_h;
        let (fill, text) = match s.pearson_r {
            Some(r) => (ramp_color(r).to_string(), format!("{r:.2}")),
            None => ("#BDBDBD".to_string(), "NA".to_string()),
        };
        let _ = writeln!(
            svg,
            r#"  <text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
            x + cell / 2,
            pad + label_h - 12,
            xml_escape(&s.metric)
        );
        let _ = writeln!(
            svg,
            r#"  <rect class="cell" data-metric="{}" x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{fill}" stroke="white"/>"#,
            xml_escape(&s.metric)
        );
        let _ = writeln!(
            svg,
            r#"  <text class="value" x="{}" y="{}" font-size="16" text-anchor="middle">{text}</text>"#,
            x + cell / 2,
            y + cell / 2 + 6
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rating,
    #[serde(rename = "2afc")]
    TwoAfc,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Rating => "rating",
            Mode::TwoAfc => "2afc",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = ColorError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rating" => Ok(Mode::Rating),
            "2afc" => Ok(Mode::TwoAfc),
            _ => Err(ColorError::Usage(format!("unknown mode `{s}` (expected rating or 2afc)"))),
        }
    }
}

/// Viewing conditions reported by the client, best effort.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClientInfo {
    pub viewport_w: u32,
    pub viewport_h: u32,
    pub device_pixel_ratio: f64,
}

/// One participant response, as stored in the judgment log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Judgment {
    pub session_id: String,
    pub dataset: String,
    pub stimulus_id: u32,
    pub mode: Mode,
    /// Pair ids shown in the stimulus: one for rating, two for 2AFC.
    pub pairs: Vec<u32>,
    /// Rating 0–10, or the id of the chosen pair.
    pub response: u32,
    pub elapsed_ms: u64,
    pub recorded_at: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub client: Option<ClientInfo>,
}

/// Per-pair human scores, keyed by pair id, separately per mode.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Aggregate {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rating: Option<BTreeMap<u32, f64>>,
    #[serde(rename = "2afc", skip_serializing_if = "Option::is_none")]
    pub two_afc: Option<BTreeMap<u32, f64>>,
}

impl Aggregate {
    /// The dataset with its human column replaced by one mode's scores.
    /// Pairs with no judgments are dropped.
    pub fn scored_dataset(&self, ds: &ColorPairDataset, mode: Mode) -> Result<ColorPairDataset> {
        let scores = match mode {
            Mode::Rating => self.rating.as_ref(),
            Mode::TwoAfc => self.two_afc.as_ref(),
        }
        .ok_or(ColorError::EmptyLog)?;
        let pairs: Vec<ColorPair> = ds.pairs.iter().filter(|p| scores.contains_key(&p.id)).copied().collect();
        let human = pairs.iter().map(|p| scores[&p.id]).collect();
        let mut out = ColorPairDataset::new(pairs, Some(human), format!("{} ({mode} aggregate)", ds.source))?;
        out.directives = ds.directives.clone();
        Ok(out)
    }
}

/// Averages ratings per pair; for 2AFC, scores each pair by its win
/// proportion scaled onto the rating range.
pub fn aggregate_judgments(log: &[Judgment], ds: &ColorPairDataset) -> Result<Aggregate> {
    if log.is_empty() {
        return Err(ColorError::EmptyLog);
    }
    let mut rating: BTreeMap<u32, (f64, u32)> = BTreeMap::new();
    let mut afc: BTreeMap<u32, (u32, u32)> = BTreeMap::new();
    for j in log {
        for &id in &j.pairs {
            if ds.pair(id).is_none() {
                return Err(ColorError::UnknownPair(id));
            }
        }
        match j.mode {
            Mode::Rating => {
                let [id] = j.pairs[..] else {
                    return Err(ColorError::Usage(format!("rating judgment with {} pairs", j.pairs.len())));
                };
                let e = rating.entry(id).or_default();
                e.0 += j.response as f64;
                e.1 += 1;
            }
            Mode::TwoAfc => {
                if j.pairs.len() != 2 || !j.pairs.contains(&j.response) {
                    return Err(ColorError::Usage(format!(
                        "2afc judgment choosing {} from {:?}",
                        j.response, j.pairs
                    )));
                }
                for &id in &j.pairs {
                    let e = afc.entry(id).or_default();
                    e.1 += 1;
                    if id == j.response {
                        e.0 += 1;
                    }
                }
            }
        }
    }
    let finish = |m: BTreeMap<u32, f64>| (!m.is_empty()).then_some(m);
    Ok(Aggregate {
        rating: finish(rating.into_iter().map(|(id, (sum, n))| (id, sum / n as f64)).collect()),
        two_afc: finish(
            afc.into_iter()
                .map(|(id, (wins, seen))| (id, wins as f64 / seen as f64 * RATING_MAX as f64))
                .collect(),
        ),
    })
}
