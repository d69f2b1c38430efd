//! Durable survey state: datasets, sessions and the judgment log.
//!
//! Two append-only line-delimited JSON files live in the data directory:
//! `sessions.jsonl` (one record per created session) and `judgments.jsonl`
//! (one [`Judgment`] per acknowledged response). Every append is a single
//! `write` of a whole line followed by `fsync`. On open, both files are
//! replayed and each session's cursor is the number of its logged judgments.

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use colordiff_core::evaluation::{aggregate_judgments, load_dataset, Aggregate, ClientInfo, ColorPair, ColorPairDataset, Judgment, Mode, RATING_MAX};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SurveyError};

pub const SESSIONS_FILE: &str = "sessions.jsonl";
pub const JUDGMENTS_FILE: &str = "judgments.jsonl";

/// Cap on 2AFC trials per session.
pub const DEFAULT_AFC_CAP: usize = 20;

pub fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

/// How stimuli of a dataset are drawn on screen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Display {
    /// Gray level of the surround, 0–255.
    pub background: u8,
    /// Gap between the two patches of a pair, in device pixels.
    pub separation_px: u32,
}

impl Default for Display {
    fn default() -> Self {
        Display { background: 128, separation_px: 0 }
    }
}

impl Display {
    fn from_directives(ds: &ColorPairDataset) -> Result<Self> {
        let mut d = Display::default();
        let bad = |k: &str, v: &str| SurveyError::Config(format!("dataset `{}`: invalid {k} `{v}`", ds.source));
        if let Some(v) = ds.directives.get("background") {
            d.background = v.parse().map_err(|_| bad("background", v))?;
        }
        if let Some(v) = ds.directives.get("separation_px") {
            d.separation_px = v.parse().map_err(|_| bad("separation_px", v))?;
        }
        Ok(d)
    }
}

#[derive(Debug, Clone)]
pub struct SurveyDataset {
    pub name: String,
    pub data: ColorPairDataset,
    pub display: Display,
}

impl SurveyDataset {
    pub fn new(name: impl Into<String>, data: ColorPairDataset) -> Result<Self> {
        let display = Display::from_directives(&data)?;
        Ok(SurveyDataset { name: name.into(), data, display })
    }

    /// Every unordered pair of pairs, as indices into `data.pairs`, in
    /// lexicographic order. A 2AFC stimulus id is a position in this list.
    pub fn afc_combinations(&self) -> Vec<(usize, usize)> {
        let n = self.data.pairs.len();
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
    }

    /// Stimulus ids presented to a session, in presentation order.
    pub fn schedule(&self, mode: Mode, seed: u64, afc_cap: usize) -> Vec<u32> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match mode {
            Mode::Rating => {
                let mut ids: Vec<u32> = self.data.pairs.iter().map(|p| p.id).collect();
                ids.shuffle(&mut rng);
                ids
            }
            Mode::TwoAfc => {
                let total = self.afc_combinations().len();
                let mut ids: Vec<u32> = (0..total as u32).collect();
                ids.shuffle(&mut rng);
                ids.truncate(afc_cap);
                ids
            }
        }
    }

    /// Pairs shown by a stimulus.
    pub fn stimulus_pairs(&self, mode: Mode, stimulus_id: u32) -> Option<Vec<ColorPair>> {
        match mode {
            Mode::Rating => self.data.pair(stimulus_id).map(|p| vec![*p]),
            Mode::TwoAfc => {
                let (i, j) = *self.afc_combinations().get(stimulus_id as usize)?;
                Some(vec![self.data.pairs[i], self.data.pairs[j]])
            }
        }
    }
}

/// Loads every `*.csv` dataset in `dir`, keyed by file stem.
pub fn load_dataset_dir(dir: &Path) -> Result<BTreeMap<String, SurveyDataset>> {
    let entries = std::fs::read_dir(dir).map_err(|e| SurveyError::io(dir, e))?;
    let mut out = BTreeMap::new();
    for entry in entries {
        let path = entry.map_err(|e| SurveyError::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("csv") {
            continue;
        }
        let Some(name) = path.file_stem().and_then(|s| s.to_str()) else { continue };
        let data = load_dataset(&path)?;
        out.insert(name.to_string(), SurveyDataset::new(name, data)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub session_id: String,
    pub mode: Mode,
    pub dataset: String,
    pub seed: u64,
    /// Stimulus ids in presentation order.
    pub order: Vec<u32>,
    #[serde(default)]
    pub cursor: usize,
    pub created_at: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Session {
    pub fn count(&self) -> usize {
        self.order.len()
    }

    pub fn is_done(&self) -> bool {
        self.cursor >= self.order.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairView {
    pub id: u32,
    pub a: String,
    pub b: String,
}

impl From<&ColorPair> for PairView {
    fn from(p: &ColorPair) -> Self {
        PairView { id: p.id, a: p.a.to_string(), b: p.b.to_string() }
    }
}

/// What the client renders for one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stimulus {
    pub stimulus_id: u32,
    pub mode: Mode,
    /// Zero-based position in the session.
    pub index: usize,
    pub count: usize,
    pub pairs: Vec<PairView>,
    pub display: Display,
}

/// A response as submitted by a client.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Submission {
    pub stimulus_id: u32,
    pub response: u32,
    #[serde(default)]
    pub elapsed_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub client: Option<ClientInfo>,
}

#[derive(Debug)]
struct AppendLog {
    path: PathBuf,
    file: File,
}

impl AppendLog {
    fn open(path: PathBuf) -> Result<Self> {
        truncate_torn_tail(&path)?;
        let file = OpenOptions::new().create(true).append(true).open(&path).map_err(|e| SurveyError::io(&path, e))?;
        Ok(AppendLog { path, file })
    }

    fn append<T: Serialize>(&mut self, record: &T) -> Result<()> {
        let mut line = serde_json::to_vec(record)?;
        line.push(b'\n');
        self.file.write_all(&line).map_err(|e| SurveyError::io(&self.path, e))?;
        self.file.sync_data().map_err(|e| SurveyError::io(&self.path, e))
    }

    fn flush(&mut self) -> Result<()> {
        self.file.sync_all().map_err(|e| SurveyError::io(&self.path, e))
    }
}

/// Drops bytes after the last newline, left behind by an append that never
/// completed.
fn truncate_torn_tail(path: &Path) -> Result<()> {
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(()),
        Err(e) => return Err(SurveyError::io(path, e)),
    };
    if bytes.is_empty() || bytes.ends_with(b"\n") {
        return Ok(());
    }
    let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    tracing::warn!(path = %path.display(), dropped = bytes.len() - keep, "truncating torn final record");
    let file = OpenOptions::new().write(true).open(path).map_err(|e| SurveyError::io(path, e))?;
    file.set_len(keep as u64).map_err(|e| SurveyError::io(path, e))?;
    file.sync_all().map_err(|e| SurveyError::io(path, e))
}

/// Reads a JSONL file. A torn final line (crash mid-append, never
/// acknowledged) is ignored; malformed lines elsewhere are errors.
fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(SurveyError::io(path, e)),
    };
    let lines: Vec<String> =
        BufReader::new(file).lines().collect::<std::io::Result<_>>().map_err(|e| SurveyError::io(path, e))?;
    let last = lines.len();
    let mut out = Vec::with_capacity(last);
    for (n, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(v) => out.push(v),
            Err(_) if n + 1 == last => tracing::warn!(path = %path.display(), "ignoring torn final record"),
            Err(e) => {
                return Err(SurveyError::Corrupt { path: path.to_path_buf(), line: n + 1, message: e.to_string() })
            }
        }
    }
    Ok(out)
}

/// Parses exported judgment records (one JSON object per line).
pub fn parse_judgments(text: &str) -> Result<Vec<Judgment>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            serde_json::from_str(l).map_err(|e| SurveyError::Corrupt {
                path: PathBuf::from("<export>"),
                line: n + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionCreated {
    pub session_id: String,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Ack {
    pub ok: bool,
    pub cursor: usize,
}

/// Survey state. Not internally synchronized: the service wraps it in a
/// mutex, which serializes both per-session mutations and log appends.
#[derive(Debug)]
pub struct SurveyStore {
    datasets: BTreeMap<String, SurveyDataset>,
    sessions: HashMap<String, Session>,
    judgments: Vec<Judgment>,
    session_log: AppendLog,
    judgment_log: AppendLog,
    afc_cap: usize,
}

impl SurveyStore {
    /// Opens (or creates) the store in `data_dir` and replays its logs.
    pub fn open(data_dir: &Path, datasets: BTreeMap<String, SurveyDataset>) -> Result<Self> {
        std::fs::create_dir_all(data_dir).map_err(|e| SurveyError::io(data_dir, e))?;
        let session_path = data_dir.join(SESSIONS_FILE);
        let judgment_path = data_dir.join(JUDGMENTS_FILE);
        let mut sessions: HashMap<String, Session> = read_jsonl::<Session>(&session_path)?
            .into_iter()
            .map(|s| (s.session_id.clone(), Session { cursor: 0, ..s }))
            .collect();
        let judgments: Vec<Judgment> = read_jsonl(&judgment_path)?;
        for j in &judgments {
            if let Some(s) = sessions.get_mut(&j.session_id) {
                s.cursor += 1;
            }
        }
        Ok(SurveyStore {
            datasets,
            sessions,
            judgments,
            session_log: AppendLog::open(session_path)?,
            judgment_log: AppendLog::open(judgment_path)?,
            afc_cap: DEFAULT_AFC_CAP,
        })
    }

    pub fn with_afc_cap(mut self, cap: usize) -> Self {
        self.afc_cap = cap;
        self
    }

    pub fn datasets(&self) -> impl Iterator<Item = &SurveyDataset> {
        self.datasets.values()
    }

    pub fn dataset(&self, name: &str) -> Result<&SurveyDataset> {
        self.datasets.get(name).ok_or_else(|| SurveyError::UnknownDataset(name.to_string()))
    }

    pub fn session(&self, id: &str) -> Result<&Session> {
        self.sessions.get(id).ok_or_else(|| SurveyError::UnknownSession(id.to_string()))
    }

    pub fn judgment_count(&self) -> usize {
        self.judgments.len()
    }

    /// Creates and persists a session with a seeded stimulus order.
    pub fn create_session(&mut self, mode: Mode, dataset: &str, seed: u64, label: Option<String>) -> Result<SessionCreated> {
        let order = self.dataset(dataset)?.schedule(mode, seed, self.afc_cap);
        let session_id = loop {
            let id = format!("{:032x}", rand::random::<u128>());
            if !self.sessions.contains_key(&id) {
                break id;
            }
        };
        let session = Session {
            session_id: session_id.clone(),
            mode,
            dataset: dataset.to_string(),
            seed,
            order,
            cursor: 0,
            created_at: now_ms(),
            label,
        };
        self.session_log.append(&session)?;
        let count = session.count();
        self.sessions.insert(session_id.clone(), session);
        Ok(SessionCreated { session_id, count })
    }

    /// The stimulus at the session cursor, or `None` once the session is done.
    pub fn next_stimulus(&self, session_id: &str) -> Result<Option<Stimulus>> {
        let s = self.session(session_id)?;
        if s.is_done() {
            return Ok(None);
        }
        let ds = self.dataset(&s.dataset)?;
        let stimulus_id = s.order[s.cursor];
        let pairs = ds
            .stimulus_pairs(s.mode, stimulus_id)
            .ok_or_else(|| SurveyError::Config(format!("stimulus {stimulus_id} missing from `{}`", ds.name)))?;
        Ok(Some(Stimulus {
            stimulus_id,
            mode: s.mode,
            index: s.cursor,
            count: s.count(),
            pairs: pairs.iter().map(PairView::from).collect(),
            display: ds.display,
        }))
    }

    /// Validates a response against the session cursor, logs it durably and
    /// advances the cursor.
    pub fn submit(&mut self, session_id: &str, sub: Submission) -> Result<Ack> {
        let s = self.session(session_id)?;
        let expected = s.order.get(s.cursor).copied();
        if expected != Some(sub.stimulus_id) {
            return Err(if s.order[..s.cursor].contains(&sub.stimulus_id) {
                SurveyError::Duplicate { stimulus_id: sub.stimulus_id }
            } else {
                SurveyError::OutOfOrder { stimulus_id: sub.stimulus_id, expected }
            });
        }
        let ds = self.dataset(&s.dataset)?;
        let pairs: Vec<u32> = ds
            .stimulus_pairs(s.mode, sub.stimulus_id)
            .map(|v| v.iter().map(|p| p.id).collect())
            .unwrap_or_default();
        match s.mode {
            Mode::Rating if sub.response > RATING_MAX => {
                return Err(SurveyError::Range(format!("rating {} outside 0..={RATING_MAX}", sub.response)))
            }
            Mode::TwoAfc if !pairs.contains(&sub.response) => {
                return Err(SurveyError::Range(format!("choice {} is not one of {:?}", sub.response, pairs)))
            }
            _ => {}
        }
        let judgment = Judgment {
            session_id: session_id.to_string(),
            dataset: s.dataset.clone(),
            stimulus_id: sub.stimulus_id,
            mode: s.mode,
            pairs,
            response: sub.response,
            elapsed_ms: sub.elapsed_ms,
            recorded_at: now_ms(),
            client: sub.client,
        };
        self.judgment_log.append(&judgment)?;
        self.judgments.push(judgment);
        let s = self.sessions.get_mut(session_id).expect("session checked above");
        s.cursor += 1;
        Ok(Ack { ok: true, cursor: s.cursor })
    }

    /// Logged judgments for one dataset, in submission order.
    pub fn judgments_for(&self, dataset: &str) -> impl Iterator<Item = &Judgment> {
        let dataset = dataset.to_string();
        self.judgments.iter().filter(move |j| j.dataset == dataset)
    }

    pub fn aggregate(&self, dataset: &str) -> Result<Aggregate> {
        let ds = self.dataset(dataset)?;
        let log: Vec<Judgment> = self.judgments_for(dataset).cloned().collect();
        Ok(aggregate_judgments(&log, &ds.data)?)
    }

    /// JSONL export of a dataset's judgments.
    pub fn export(&self, dataset: &str) -> Result<String> {
        let mut out = String::new();
        for j in self.judgments_for(dataset) {
            out.push_str(&serde_json::to_string(j)?);
            out.push('\n');
        }
        Ok(out)
    }

    /// Appends previously exported judgments to the log.
    pub fn import(&mut self, records: Vec<Judgment>) -> Result<usize> {
        let n = records.len();
        for j in records {
            self.judgment_log.append(&j)?;
            if let Some(s) = self.sessions.get_mut(&j.session_id) {
                s.cursor += 1;
            }
            self.judgments.push(j);
        }
        Ok(n)
    }

    pub fn flush(&mut self) -> Result<()> {
        self.session_log.flush()?;
        self.judgment_log.flush()
    }
}
