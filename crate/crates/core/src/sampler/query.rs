use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::hazard::HazardModel;
use crate::model::{ModelKind, Params};
use crate::rng;

use super::PosteriorSamples;

type PredicateFn<'a> = dyn Fn(&[Params]) -> bool + Sync + 'a;

/// A boolean statement about one parameter vector from each of `arity`
/// sample sets.
pub struct Predicate<'a> {
    arity: usize,
    f: Box<PredicateFn<'a>>,
}

impl<'a> Predicate<'a> {
    pub fn unary(f: impl Fn(&Params) -> bool + Sync + 'a) -> Self {
        Predicate {
            arity: 1,
            f: Box::new(move |p| f(&p[0])),
        }
    }

    pub fn binary(f: impl Fn(&Params, &Params) -> bool + Sync + 'a) -> Self {
        Predicate {
            arity: 2,
            f: Box::new(move |p| f(&p[0], &p[1])),
        }
    }

    pub fn nary(arity: usize, f: impl Fn(&[Params]) -> bool + Sync + 'a) -> Self {
        Predicate {
            arity,
            f: Box::new(f),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    fn eval(&self, params: &[Params]) -> bool {
        (self.f)(params)
    }
}

impl fmt::Debug for Predicate<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Predicate").field("arity", &self.arity).finish()
    }
}

/// How draws from independent chains are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// Shuffle each set with its own seeded stream, then pair by index over
    /// the shortest set.
    Shuffled { seed: u64 },
    /// Every combination of draws. At most two sets.
    CrossProduct,
}

impl Default for Pairing {
    fn default() -> Self {
        Pairing::Shuffled { seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryResult {
    pub probability: f64,
    /// Number of draw combinations evaluated.
    pub pairs: u64,
}

/// Monte-Carlo probability that `predicate` holds, for one sample set or a
/// pair drawn from independent chains.
pub fn probability_query(
    samples_a: &PosteriorSamples,
    samples_b: Option<&PosteriorSamples>,
    predicate: &Predicate<'_>,
    pairing: Pairing,
) -> Result<QueryResult> {
    match samples_b {
        Some(b) => joint_probability(&[samples_a, b], predicate, pairing),
        None => joint_probability(&[samples_a], predicate, pairing),
    }
}

/// [`probability_query`] over any number of independent sample sets.
pub fn joint_probability(
    sets: &[&PosteriorSamples],
    predicate: &Predicate<'_>,
    pairing: Pairing,
) -> Result<QueryResult> {
    if predicate.arity() != sets.len() {
        return Err(Error::Usage(format!(
            "predicate takes {} sample set(s), {} given",
            predicate.arity(),
            sets.len()
        )));
    }
    if sets.iter().any(|s| s.is_empty()) {
        return Err(Error::Usage("probability query on an empty sample set".into()));
    }
    let draws: Vec<Vec<Params>> = sets.iter().map(|s| s.params().collect()).collect();

    match pairing {
        Pairing::CrossProduct => match draws.as_slice() {
            [a] => Ok(count_single(a, predicate)),
            [a, b] => {
                let mut hits = 0u64;
                let mut buf = [a[0], b[0]];
                for &pa in a {
                    buf[0] = pa;
                    for &pb in b {
                        buf[1] = pb;
                        hits += u64::from(predicate.eval(&buf));
                    }
                }
                let pairs = (a.len() * b.len()) as u64;
                Ok(QueryResult {
                    probability: hits as f64 / pairs as f64,
                    pairs,
                })
            }
            _ => Err(Error::Usage(
                "cross-product pairing supports at most two sample sets".into(),
            )),
        },
        Pairing::Shuffled { seed } => {
            if let [a] = draws.as_slice() {
                return Ok(count_single(a, predicate));
            }
            let mut shuffled = draws;
            for (i, set) in shuffled.iter_mut().enumerate() {
                set.shuffle(&mut rng::substream(seed, i as u64));
            }
            let pairs = shuffled.iter().map(Vec::len).min().unwrap_or(0);
            let mut buf: Vec<Params> = shuffled.iter().map(|s| s[0]).collect();
            let mut hits = 0u64;
            for k in 0..pairs {
                for (slot, set) in buf.iter_mut().zip(&shuffled) {
                    *slot = set[k];
                }
                hits += u64::from(predicate.eval(&buf));
            }
            Ok(QueryResult {
                probability: hits as f64 / pairs as f64,
                pairs: pairs as u64,
            })
        }
    }
}

fn count_single(draws: &[Params], predicate: &Predicate<'_>) -> QueryResult {
    let hits = draws
        .iter()
        .filter(|p| predicate.eval(std::slice::from_ref(*p)))
        .count();
    QueryResult {
        probability: hits as f64 / draws.len() as f64,
        pairs: draws.len() as u64,
    }
}

/// Built-in comparisons between players, addressable by name from the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedQuery {
    /// `H_a(0) < H_b(0)`: player a is harder to dismiss on arrival.
    Hazard0Less,
    /// `(mu2/mu1)_a > (mu2/mu1)_b`: player a is less robust.
    RobustnessRatioGreater,
    /// Player a has both the smallest `tau` and the smallest `ell`.
    TauAndEllBothLess,
}

impl NamedQuery {
    pub const ALL: [NamedQuery; 3] = [
        NamedQuery::Hazard0Less,
        NamedQuery::RobustnessRatioGreater,
        NamedQuery::TauAndEllBothLess,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedQuery::Hazard0Less => "hazard0_less",
            NamedQuery::RobustnessRatioGreater => "robustness_ratio_greater",
            NamedQuery::TauAndEllBothLess => "tau_and_ell_both_less",
        }
    }

    pub fn registry() -> String {
        NamedQuery::ALL.map(NamedQuery::name).join(", ")
    }

    fn needs_varying(self) -> bool {
        !matches!(self, NamedQuery::Hazard0Less)
    }

    /// Predicate over `arity` sets. `tau_and_ell_both_less` compares the first
    /// set against all others; the rest are pairwise only.
    pub fn predicate(self, arity: usize) -> Result<Predicate<'static>> {
        if arity < 2 || (arity > 2 && self != NamedQuery::TauAndEllBothLess) {
            return Err(Error::Usage(format!(
                "query `{}` does not take {arity} sample sets",
                self.name()
            )));
        }
        Ok(match self {
            NamedQuery::Hazard0Less => Predicate::binary(|a, b| a.hazard(0) < b.hazard(0)),
            NamedQuery::RobustnessRatioGreater => Predicate::binary(|a, b| {
                let (a, b) = (a.values(), b.values());
                a[1] / a[0] > b[1] / b[0]
            }),
            NamedQuery::TauAndEllBothLess => Predicate::nary(arity, |ps| {
                let first = match ps[0] {
                    Params::Varying(p) => p,
                    Params::Constant(_) => return false,
                };
                ps[1..].iter().all(|o| match o {
                    Params::Varying(q) => first.tau < q.tau && first.ell < q.ell,
                    Params::Constant(_) => false,
                })
            }),
        })
    }

    pub fn evaluate(self, sets: &[&PosteriorSamples], pairing: Pairing) -> Result<QueryResult> {
        if self.needs_varying() && sets.iter().any(|s| s.kind() != ModelKind::Varying) {
            return Err(Error::Usage(format!(
                "query `{}` needs varying-model samples",
                self.name()
            )));
        }
        joint_probability(sets, &self.predicate(sets.len())?, pairing)
    }
}

impl FromStr for NamedQuery {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NamedQuery::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| {
                Error::Usage(format!(
                    "unknown query `{s}`; available: {}",
                    NamedQuery::registry()
                ))
            })
    }
}
