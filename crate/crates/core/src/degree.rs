//! Degree distributions for the configuration model.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lognum::log_sum_exp;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DegreeKind {
    Constant { d: u32 },
    Poisson { mu: f64 },
    /// `pmf[k] = P(D = k)` for `k = 0..=d_max`.
    Empirical { pmf: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeDistribution {
    #[serde(flatten)]
    kind: DegreeKind,
    mean: f64,
}

impl DegreeDistribution {
    pub fn constant(d: u32) -> Self {
        DegreeDistribution { kind: DegreeKind::Constant { d }, mean: d as f64 }
    }

    pub fn poisson(mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::param(format!("Poisson mean must be positive and finite, got {mu}")));
        }
        Ok(DegreeDistribution { kind: DegreeKind::Poisson { mu }, mean: mu })
    }

    /// Bounded-support distribution from its probability mass function.
    /// Trailing zero entries are dropped so that `max_degree` is the true
    /// support maximum.
    pub fn empirical(pmf: Vec<f64>) -> Result<Self> {
        if pmf.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
            return Err(Error::param("pmf entries must be finite and nonnegative"));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::param(format!("pmf sums to {total}, expected 1")));
        }
        let mut pmf = pmf;
        while pmf.last() == Some(&0.0) {
            pmf.pop();
        }
        let mean = pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        Ok(DegreeDistribution { kind: DegreeKind::Empirical { pmf }, mean })
    }

    /// Reads `k probability` pairs, one per line; `#` starts a comment.
    pub fn read_empirical(text: &str) -> Result<Self> {
        let mut pmf = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: &str| Error::Parse { line: i + 1, msg: msg.to_string() };
            let mut fields = line.split_whitespace();
            let k: usize = fields
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err("expected degree"))?;
            let p: f64 = fields
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err("expected probability"))?;
            if fields.next().is_some() {
                return Err(parse_err("trailing fields"));
            }
            if pmf.len() <= k {
                pmf.resize(k + 1, 0.0);
            }
            pmf[k] += p;
        }
        Self::empirical(pmf)
    }

    pub fn kind(&self) -> &DegreeKind {
        &self.kind
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn min_degree(&self) -> u64 {
        match &self.kind {
            DegreeKind::Constant { d } => *d as u64,
            DegreeKind::Poisson { .. } => 0,
            DegreeKind::Empirical { pmf } => pmf.iter().position(|p| *p > 0.0).unwrap_or(0) as u64,
        }
    }

    /// `None` for unbounded support.
    pub fn max_degree(&self) -> Option<u64> {
        match &self.kind {
            DegreeKind::Constant { d } => Some(*d as u64),
            DegreeKind::Poisson { .. } => None,
            DegreeKind::Empirical { pmf } => Some(pmf.len().saturating_sub(1) as u64),
        }
    }

    pub fn ln_pmf(&self, k: u64) -> f64 {
        match &self.kind {
            DegreeKind::Constant { d } => {
                if k == *d as u64 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            DegreeKind::Poisson { mu } => {
                k as f64 * mu.ln() - mu - statrs::function::factorial::ln_factorial(k)
            }
            DegreeKind::Empirical { pmf } => pmf.get(k as usize).map_or(f64::NEG_INFINITY, |p| p.ln()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match &self.kind {
            DegreeKind::Constant { d } => *d as u64,
            DegreeKind::Poisson { mu } => {
                let dist = Poisson::new(*mu).expect("validated Poisson mean");
                dist.sample(rng) as u64
            }
            DegreeKind::Empirical { pmf } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (k, p) in pmf.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        return k as u64;
                    }
                }
                (pmf.len() - 1) as u64
            }
        }
    }

    /// Cumulant generating function `ln E[e^{λD}]`.
    pub fn cgf(&self, lambda: f64) -> f64 {
        match &self.kind {
            DegreeKind::Constant { d } => lambda * *d as f64,
            DegreeKind::Poisson { mu } => mu * lambda.exp_m1(),
            DegreeKind::Empirical { pmf } => log_sum_exp(&self.tilted_log_weights(pmf, lambda)),
        }
    }

    /// First and second derivative of the cgf: mean and variance of the
    /// exponentially tilted law.
    pub fn tilted_moments(&self, lambda: f64) -> (f64, f64) {
        match &self.kind {
            DegreeKind::Constant { d } => (*d as f64, 0.0),
            DegreeKind::Poisson { mu } => {
                let m = mu * lambda.exp();
                (m, m)
            }
            DegreeKind::Empirical { pmf } => {
                let w = self.tilted_log_weights(pmf, lambda);
                let norm = log_sum_exp(&w);
                let (mut m1, mut m2) = (0.0, 0.0);
                for (k, lw) in w.iter().enumerate() {
                    let q = (lw - norm).exp();
                    m1 += k as f64 * q;
                    m2 += (k * k) as f64 * q;
                }
                (m1, (m2 - m1 * m1).max(0.0))
            }
        }
    }

    fn tilted_log_weights(&self, pmf: &[f64], lambda: f64) -> Vec<f64> {
        pmf.iter()
            .enumerate()
            .map(|(k, p)| if *p > 0.0 { p.ln() + lambda * k as f64 } else { f64::NEG_INFINITY })
            .collect()
    }

    /// `E[x^D]` for `x ∈ [0, 1]`.
    pub fn power_mean(&self, x: f64) -> f64 {
        match &self.kind {
            DegreeKind::Constant { d } => x.powi(*d as i32),
            DegreeKind::Poisson { mu } => (mu * (x - 1.0)).exp(),
            DegreeKind::Empirical { pmf } => pmf.iter().enumerate().map(|(k, p)| p * x.powi(k as i32)).sum(),
        }
    }

    pub fn prob_zero(&self) -> f64 {
        self.ln_pmf(0).exp()
    }
}

impl fmt::Display for DegreeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DegreeKind::Constant { d } => write!(f, "constant:{d}"),
            DegreeKind::Poisson { mu } => write!(f, "poisson:{mu}"),
            DegreeKind::Empirical { pmf } => {
                write!(f, "empirical:")?;
                for (i, p) in pmf.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

/// Parses `constant:d`, `poisson:mu` or `empirical:p0,p1,...`.
impl FromStr for DegreeDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::param(format!("expected kind:value, got '{s}'")))?;
        let bad = |what: &str| Error::param(format!("cannot parse {what} from '{arg}'"));
        match kind {
            "constant" => Ok(Self::constant(arg.parse().map_err(|_| bad("degree"))?)),
            "poisson" => Self::poisson(arg.parse().map_err(|_| bad("mean"))?),
            "empirical" => {
                let pmf = arg
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad("pmf"))?;
                Self::empirical(pmf)
            }
            other => Err(Error::param(format!("unknown distribution kind '{other}'"))),
        }
    }
}
