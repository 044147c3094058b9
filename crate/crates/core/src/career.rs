//! Career score data.
//!
//! A career file is UTF-8 text with one innings per line: a non-negative run
//! count, optionally followed by `*` when the batsman was not out. Blank lines
//! and lines starting with `#` are ignored.
//!
//! ```text
//! # Test innings, in order
//! 42
//! 7*
//! 0
//! ```

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::hazard::{HazardModel, HARD_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Innings {
    pub runs: u32,
    /// The innings ended without a dismissal, so `runs` is right-censored.
    pub not_out: bool,
}

impl Innings {
    pub fn dismissed(runs: u32) -> Self {
        Innings {
            runs,
            not_out: false,
        }
    }

    pub fn not_out(runs: u32) -> Self {
        Innings {
            runs,
            not_out: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Career {
    pub player_id: String,
    pub innings: Vec<Innings>,
}

/// Counts and the traditional average, for display.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CareerSummary {
    pub innings: usize,
    pub not_outs: usize,
    /// Total runs over dismissals; `None` when the player was never out.
    pub average: Option<f64>,
}

impl Career {
    pub fn new(player_id: impl Into<String>, innings: Vec<Innings>) -> Self {
        Career {
            player_id: player_id.into(),
            innings,
        }
    }

    pub fn parse(source: &str, player_id: impl Into<String>) -> Result<Self> {
        let mut innings = Vec::new();
        for (idx, raw) in source.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            innings.push(parse_line(line).map_err(|message| Error::Parse {
                line: idx + 1,
                message,
            })?);
        }
        Ok(Career::new(player_id, innings))
    }

    /// Reads a career file; the player id defaults to the file stem.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let player = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Career::parse(&text, player)
    }

    /// One line per innings, `*` marking not-outs. Inverse of [`Career::parse`].
    pub fn render(&self) -> String {
        let mut out = String::with_capacity(self.innings.len() * 4);
        for inn in &self.innings {
            let _ = writeln!(out, "{}{}", inn.runs, if inn.not_out { "*" } else { "" });
        }
        out
    }

    /// Runs of completed innings and of not-out innings, in career order.
    pub fn split_completed(&self) -> (Vec<u32>, Vec<u32>) {
        let mut dismissed = Vec::new();
        let mut not_out = Vec::new();
        for inn in &self.innings {
            if inn.not_out {
                not_out.push(inn.runs);
            } else {
                dismissed.push(inn.runs);
            }
        }
        (dismissed, not_out)
    }

    pub fn summary(&self) -> CareerSummary {
        let innings = self.innings.len();
        let not_outs = self.innings.iter().filter(|i| i.not_out).count();
        let total: u64 = self.innings.iter().map(|i| u64::from(i.runs)).sum();
        let average = (innings > not_outs).then(|| total as f64 / (innings - not_outs) as f64);
        CareerSummary {
            innings,
            not_outs,
            average,
        }
    }

    pub fn max_runs(&self) -> Option<u32> {
        self.innings.iter().map(|i| i.runs).max()
    }

    pub fn is_empty(&self) -> bool {
        self.innings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.innings.len()
    }
}

fn parse_line(line: &str) -> std::result::Result<Innings, String> {
    let (digits, not_out) = match line.strip_suffix('*') {
        Some(rest) => (rest.trim_end(), true),
        None => (line, false),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("expected a run count like `42` or `7*`, found `{line}`"));
    }
    let runs = digits
        .parse::<u32>()
        .map_err(|e| format!("run count `{digits}` out of range: {e}"))?;
    Ok(Innings { runs, not_out })
}

/// Marginal probability that an innings ends not out when, before each
/// dismissal trial, the innings is cut short with probability `c`.
fn not_out_probability<M: HazardModel>(model: &M, c: f64) -> f64 {
    let mut reach = 1.0;
    let mut total = 0.0;
    for a in 0..HARD_CAP {
        total += reach * c;
        reach *= (1.0 - c) * (1.0 - model.hazard(a));
        if reach < 1e-17 {
            break;
        }
    }
    total
}

/// Per-score censoring probability giving a marginal not-out rate of `rate`.
fn censoring_hazard<M: HazardModel>(model: &M, rate: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if not_out_probability(model, mid) < rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Draws `n` innings from `model`, a fraction `not_out_rate` of them not out
/// on average.
///
/// Not-outs come from an independent censoring trial run before each
/// dismissal trial, with a fixed per-score probability chosen so that the
/// marginal not-out rate equals `not_out_rate`. Censoring is therefore
/// independent of the dismissal process and the recorded not-out score `y`
/// carries exactly the information `X >= y` that the likelihood assumes.
/// With a rate of 0 this reduces to plain draws from `model`.
pub fn simulate_career<M: HazardModel, R: Rng + ?Sized>(
    model: &M,
    n: usize,
    not_out_rate: f64,
    player_id: impl Into<String>,
    rng: &mut R,
) -> Result<Career> {
    if !(0.0..1.0).contains(&not_out_rate) {
        return Err(Error::InvalidParams(format!(
            "not-out rate must lie in [0, 1), got {not_out_rate}"
        )));
    }
    if not_out_rate == 0.0 {
        let innings = (0..n)
            .map(|_| Innings::dismissed(model.sample_score(rng)))
            .collect();
        return Ok(Career::new(player_id, innings));
    }
    let c = censoring_hazard(model, not_out_rate);
    let innings = (0..n)
        .map(|_| {
            let mut runs = 0;
            loop {
                if rng.gen::<f64>() < c {
                    break Innings::not_out(runs);
                }
                if rng.gen::<f64>() < model.hazard(runs) {
                    break Innings::dismissed(runs);
                }
                runs += 1;
            }
        })
        .collect();
    Ok(Career::new(player_id, innings))
}
