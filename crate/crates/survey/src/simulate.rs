//! Synthetic respondents that answer rating trials through the HTTP API.
//!
//! Each respondent rates a pair as the oracle metric's distance, min-max
//! normalized over the dataset onto the rating scale, plus seeded Gaussian
//! noise. The real-valued rating is clamped to the scale and then rounded
//! stochastically (up with probability equal to its fractional part), so the
//! mean over respondents is an unbiased estimate of the noisy target.

use std::collections::BTreeMap;

use colordiff_core::evaluation::{Aggregate, ColorPair, ColorPairDataset, Mode, RATING_MAX};
use colordiff_core::{Registry, Srgb8, WhitePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Result, SurveyError};
use crate::store::{SessionCreated, Stimulus};

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub respondents: usize,
    pub noise: f64,
    pub seed: u64,
    pub oracle_metric: String,
}

/// Oracle distances mapped onto `[0, RATING_MAX]`, keyed by pair id.
pub fn oracle_targets(pairs: &[ColorPair], metric: &str, registry: &Registry) -> Result<BTreeMap<u32, f64>> {
    let wp = WhitePoint::D65;
    let desc = registry.lookup(metric)?;
    let d: Vec<f64> = pairs
        .iter()
        .map(|p| colordiff_core::metrics::evaluate(desc, p.a, p.b, &wp))
        .collect::<colordiff_core::Result<_>>()?;
    let (lo, hi) = d.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
    let span = hi - lo;
    Ok(pairs
        .iter()
        .zip(&d)
        .map(|(p, &x)| {
            let t = if span > 0.0 { (x - lo) / span * RATING_MAX as f64 } else { RATING_MAX as f64 / 2.0 };
            (p.id, t)
        })
        .collect())
}

/// One synthetic respondent.
pub struct Respondent {
    rng: ChaCha8Rng,
    noise: Option<Normal<f64>>,
}

impl Respondent {
    pub fn new(seed: u64, noise: f64) -> Result<Self> {
        let noise = if noise > 0.0 {
            Some(Normal::new(0.0, noise).map_err(|e| SurveyError::BadRequest(format!("noise {noise}: {e}")))?)
        } else if noise == 0.0 {
            None
        } else {
            return Err(SurveyError::BadRequest(format!("noise must be non-negative, got {noise}")));
        };
        Ok(Respondent { rng: ChaCha8Rng::seed_from_u64(seed), noise })
    }

    pub fn rate(&mut self, target: f64) -> u32 {
        let noisy = target + self.noise.map_or(0.0, |n| n.sample(&mut self.rng));
        let x = noisy.clamp(0.0, RATING_MAX as f64);
        let floor = x.floor();
        let up = self.rng.gen::<f64>() < x - floor;
        (floor as u32 + up as u32).min(RATING_MAX)
    }

    pub fn elapsed_ms(&mut self) -> u64 {
        self.rng.gen_range(400..2500)
    }
}

/// Per-respondent seed derived from the run seed.
pub fn respondent_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index as u64 + 1)
}

/// Ratings for every pair from every respondent, without any I/O. Used for
/// offline studies of how noise attenuates correlations.
pub fn simulate_offline(pairs: &[ColorPair], cfg: &SimulationConfig, registry: &Registry) -> Result<Vec<Vec<u32>>> {
    let targets = oracle_targets(pairs, &cfg.oracle_metric, registry)?;
    (0..cfg.respondents)
        .map(|i| {
            let mut r = Respondent::new(respondent_seed(cfg.seed, i), cfg.noise)?;
            Ok(pairs.iter().map(|p| r.rate(targets[&p.id])).collect())
        })
        .collect()
}

/// A submitted synthetic response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedRecord {
    pub respondent: usize,
    pub stimulus_id: u32,
    pub pair_id: u32,
    pub response: u32,
}

pub struct SimulationOutcome {
    pub records: Vec<SimulatedRecord>,
    pub aggregate: Aggregate,
    pub dataset: ColorPairDataset,
}

/// Blocking client for the survey API.
pub struct Client {
    base: String,
    agent: ureq::Agent,
}

fn http_err(e: ureq::Error) -> SurveyError {
    match e {
        ureq::Error::Status(code, resp) => {
            let body = resp.into_string().unwrap_or_default();
            SurveyError::Http(format!("HTTP {code}: {body}"))
        }
        other => SurveyError::Http(other.to_string()),
    }
}

#[derive(Deserialize)]
struct DatasetView {
    source: String,
    pairs: Vec<crate::store::PairView>,
}

impl Client {
    pub fn new(base: &str) -> Self {
        Client { base: base.trim_end_matches('/').to_string(), agent: ureq::AgentBuilder::new().build() }
    }

    fn get(&self, path: &str) -> Result<ureq::Response> {
        self.agent.get(&format!("{}{path}", self.base)).call().map_err(http_err)
    }

    fn post(&self, path: &str, body: Value) -> Result<ureq::Response> {
        self.agent.post(&format!("{}{path}", self.base)).send_json(body).map_err(http_err)
    }

    fn json<T: for<'de> Deserialize<'de>>(resp: ureq::Response) -> Result<T> {
        resp.into_json().map_err(|e| SurveyError::Http(e.to_string()))
    }

    pub fn dataset(&self, name: &str) -> Result<ColorPairDataset> {
        let view: DatasetView = Self::json(self.get(&format!("/api/dataset?dataset={name}"))?)?;
        let pairs = view
            .pairs
            .iter()
            .map(|p| {
                Ok(ColorPair { id: p.id, a: p.a.parse::<Srgb8>()?, b: p.b.parse::<Srgb8>()? })
            })
            .collect::<colordiff_core::Result<Vec<_>>>()?;
        Ok(ColorPairDataset::new(pairs, None, view.source)?)
    }

    pub fn create_session(&self, mode: Mode, dataset: &str, seed: u64, label: Option<&str>) -> Result<SessionCreated> {
        Self::json(self.post("/api/sessions", json!({ "mode": mode, "dataset": dataset, "seed": seed, "label": label }))?)
    }

    pub fn next(&self, session_id: &str) -> Result<Option<Stimulus>> {
        let v: Value = Self::json(self.get(&format!("/api/sessions/{session_id}/next"))?)?;
        if v.get("done").and_then(Value::as_bool) == Some(true) {
            return Ok(None);
        }
        Ok(Some(serde_json::from_value(v)?))
    }

    pub fn submit(&self, session_id: &str, stimulus_id: u32, response: u32, elapsed_ms: u64) -> Result<Value> {
        Self::json(self.post(
            &format!("/api/sessions/{session_id}/judgments"),
            json!({ "stimulus_id": stimulus_id, "response": response, "elapsed_ms": elapsed_ms }),
        )?)
    }

    pub fn aggregate(&self, dataset: &str) -> Result<Aggregate> {
        Self::json(self.get(&format!("/api/aggregate?dataset={dataset}"))?)
    }

    pub fn export(&self, dataset: &str) -> Result<String> {
        self.get(&format!("/api/export?dataset={dataset}"))?.into_string().map_err(|e| SurveyError::Http(e.to_string()))
    }
}

/// Runs every respondent through a rating session on the live service and
/// returns the submitted records with the service's resulting aggregate.
pub fn run_simulation(client: &Client, dataset: &str, cfg: &SimulationConfig, registry: &Registry) -> Result<SimulationOutcome> {
    let ds = client.dataset(dataset)?;
    let targets = oracle_targets(&ds.pairs, &cfg.oracle_metric, registry)?;
    let mut records = Vec::new();
    for i in 0..cfg.respondents {
        let seed = respondent_seed(cfg.seed, i);
        let mut respondent = Respondent::new(seed, cfg.noise)?;
        let label = format!("simulated respondent {i}");
        let session = client.create_session(Mode::Rating, dataset, seed, Some(&label))?;
        while let Some(stim) = client.next(&session.session_id)? {
            let pair_id = stim.pairs[0].id;
            let target = *targets
                .get(&pair_id)
                .ok_or_else(|| SurveyError::Http(format!("service presented unknown pair {pair_id}")))?;
            let response = respondent.rate(target);
            client.submit(&session.session_id, stim.stimulus_id, response, respondent.elapsed_ms())?;
            records.push(SimulatedRecord { respondent: i, stimulus_id: stim.stimulus_id, pair_id, response });
        }
    }
    let aggregate = client.aggregate(dataset)?;
    let scored = aggregate.scored_dataset(&ds, Mode::Rating)?;
    Ok(SimulationOutcome { records, aggregate, dataset: scored })
}

/// CSV rendering of simulated records: `respondent,stimulus_id,pair_id,response`.
pub fn records_csv(records: &[SimulatedRecord]) -> String {
    let mut out = String::from("respondent,stimulus_id,pair_id,response\n");
    for r in records {
        out.push_str(&format!("{},{},{},{}\n", r.respondent, r.stimulus_id, r.pair_id, r.response));
    }
    out
}
