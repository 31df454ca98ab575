//! Birth-death chains on `{k0, ..., k1}`: exact expected hitting times of
//! `k0` and the two-sided product bounds, all in log-domain.
//!
//! The chain moves `k -> k+1` at rate `λ_k` (interior states only) and
//! `k -> k-1` at rate `μ_k`, which defaults to `k`. The hitting times obey
//!
//! ```text
//! H_k0 = 0
//! H_k  = (1 + μ_k H_{k-1} + λ_k H_{k+1}) / (μ_k + λ_k),   k0 < k < k1
//! H_k1 = 1/μ_k1 + H_{k1-1}
//! ```
//!
//! Writing `D_k = H_k - H_{k-1}` turns this into the backward recursion
//! `D_k1 = 1/μ_k1`, `D_k = 1/μ_k + (λ_k/μ_k) D_{k+1}`, whose terms are all
//! positive. `D_{k0+1}` is the telescoped product-sum
//! `Σ_j (1/μ_j) Π_{i<j} λ_i/μ_i`, and `H_k` is its prefix sum.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lognum::{ln_add_exp, LogNumber};

/// Largest supported `k1 - k0`.
pub const MAX_SPAN: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BirthDeathSpec {
    k0: usize,
    k1: usize,
    /// `birth[k - k0]` is `λ_k`; only `k0 < k < k1` is used.
    birth: Vec<f64>,
    /// `death[k - k0]` is `μ_k`; only `k0 < k <= k1` is used.
    death: Vec<f64>,
    unit_deaths: bool,
}

impl BirthDeathSpec {
    /// Chain with death rate `k` in state `k`. `k0 = 0` is accepted as an
    /// absorbing label (the complete-graph chain); the coupling argument
    /// itself needs `k0 >= 1`.
    pub fn new<F: Fn(usize) -> f64>(k0: usize, k1: usize, birth: F) -> Result<Self> {
        Self::with_death_rates(k0, k1, birth, |k| k as f64).map(|mut s| {
            s.unit_deaths = true;
            s
        })
    }

    pub fn with_death_rates<F, G>(k0: usize, k1: usize, birth: F, death: G) -> Result<Self>
    where
        F: Fn(usize) -> f64,
        G: Fn(usize) -> f64,
    {
        if k0 >= k1 {
            return Err(Error::param(format!("need k0 < k1, got k0 = {k0}, k1 = {k1}")));
        }
        if k1 - k0 > MAX_SPAN {
            return Err(Error::param(format!("k1 - k0 = {} exceeds {MAX_SPAN}", k1 - k0)));
        }
        let mut b = vec![0.0; k1 - k0 + 1];
        let mut d = vec![0.0; k1 - k0 + 1];
        for k in k0 + 1..=k1 {
            let i = k - k0;
            if k < k1 {
                b[i] = birth(k);
                if !(b[i] > 0.0 && b[i].is_finite()) {
                    return Err(Error::param(format!("birth rate at k = {k} must be positive, got {}", b[i])));
                }
            }
            d[i] = death(k);
            if !(d[i] > 0.0 && d[i].is_finite()) {
                return Err(Error::param(format!("death rate at k = {k} must be positive, got {}", d[i])));
            }
        }
        Ok(BirthDeathSpec { k0, k1, birth: b, death: d, unit_deaths: false })
    }

    pub fn k0(&self) -> usize {
        self.k0
    }

    pub fn k1(&self) -> usize {
        self.k1
    }

    pub fn birth_rate(&self, k: usize) -> f64 {
        self.birth[k - self.k0]
    }

    pub fn death_rate(&self, k: usize) -> f64 {
        self.death[k - self.k0]
    }

    /// Same chain with every rate multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        BirthDeathSpec {
            birth: self.birth.iter().map(|r| r * c).collect(),
            death: self.death.iter().map(|r| r * c).collect(),
            unit_deaths: self.unit_deaths && c == 1.0,
            ..self.clone()
        }
    }

    /// `ln(λ_i/μ_i)` for `k0 < i < k1`.
    fn ln_ratios(&self) -> impl Iterator<Item = f64> + '_ {
        (self.k0 + 1..self.k1).map(|k| (self.birth_rate(k) / self.death_rate(k)).ln())
    }
}

/// Expected hitting times of `k0`, indexed by `k - k0` for `k0 <= k <= k1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HittingTimes {
    pub k0: usize,
    pub values: Vec<LogNumber>,
}

impl HittingTimes {
    pub fn at(&self, k: usize) -> LogNumber {
        self.values[k - self.k0]
    }

    pub fn k1(&self) -> usize {
        self.k0 + self.values.len() - 1
    }
}

pub fn expected_hitting_times(spec: &BirthDeathSpec) -> HittingTimes {
    let span = spec.k1 - spec.k0;
    // ln D_k for k = k0+1..=k1, stored at index k - k0 - 1
    let mut ln_diff = vec![0.0; span];
    ln_diff[span - 1] = -spec.death_rate(spec.k1).ln();
    for k in (spec.k0 + 1..spec.k1).rev() {
        let i = k - spec.k0 - 1;
        let ln_mu = spec.death_rate(k).ln();
        ln_diff[i] = ln_add_exp(-ln_mu, spec.birth_rate(k).ln() - ln_mu + ln_diff[i + 1]);
    }
    let mut values = Vec::with_capacity(span + 1);
    let mut acc = f64::NEG_INFINITY;
    values.push(LogNumber::ZERO);
    for d in ln_diff {
        assert!(d.is_finite(), "hitting-time increment is not a positive finite number");
        acc = ln_add_exp(acc, d);
        values.push(LogNumber::from_ln(acc));
    }
    HittingTimes { k0: spec.k0, values }
}

/// `(1/μ_k1) Π_{k0<i<k1} λ_i/μ_i`, a lower bound on every `H_k`, `k > k0`.
/// With unit deaths this is `(1/k1) Π λ_i/i`.
pub fn hitting_lower_bound(spec: &BirthDeathSpec) -> LogNumber {
    LogNumber::from_ln(spec.ln_ratios().sum::<f64>() - spec.death_rate(spec.k1).ln())
}

/// `max_{k0<=k<=j<k1} Π_{i=k+1}^{j} λ_i/μ_i` (empty products count as 1),
/// found in one pass as the largest rise of the prefix sums of `ln(λ_i/μ_i)`.
pub fn max_window_product(spec: &BirthDeathSpec) -> LogNumber {
    let (mut prefix, mut lowest, mut best) = (0.0f64, 0.0f64, 0.0f64);
    for r in spec.ln_ratios() {
        prefix += r;
        best = best.max(prefix - lowest);
        lowest = lowest.min(prefix);
    }
    LogNumber::from_ln(best)
}

/// Upper bound on every `H_k`.
///
/// For unit death rates and `k1 >= 2` this is `½ (k1 - k0)² · W` with `W` from
/// [`max_window_product`]. For other death rates the same telescoping gives
/// `(n/μ_k1 + n(n-1)/2 · max_m 1/μ_m) · W`, `n = k1 - k0`.
pub fn hitting_upper_bound(spec: &BirthDeathSpec) -> LogNumber {
    let n = (spec.k1 - spec.k0) as f64;
    let window = max_window_product(spec);
    let prefactor = if spec.unit_deaths && spec.k1 >= 2 {
        0.5 * n * n
    } else {
        let worst = (spec.k0 + 1..=spec.k1).map(|k| 1.0 / spec.death_rate(k)).fold(0.0, f64::max);
        n / spec.death_rate(spec.k1) + 0.5 * n * (n - 1.0) * worst
    };
    LogNumber::new(prefactor) * window
}

/// Contact process on `K_n` with per-edge rate `lam / n`: births
/// `λ_k = lam·k(n-k)/n`, deaths `k`, absorbing at 0.
pub fn complete_graph_spec(n: usize, lam: f64) -> Result<BirthDeathSpec> {
    if n < 2 {
        return Err(Error::param(format!("complete graph needs n >= 2, got {n}")));
    }
    if !(lam > 0.0 && lam.is_finite()) {
        return Err(Error::param(format!("infection parameter must be positive, got {lam}")));
    }
    let nf = n as f64;
    BirthDeathSpec::new(0, n, |k| lam * k as f64 * (nf - k as f64) / nf)
}

/// Product lower bound on the mean extinction time from all-infected, given
/// uniform cut bounds `M_k` on `k0 <= k < k1`:
/// `(1/k1) Π_{k=k0+1}^{k1-1} τ M_k / k`.
pub fn proposition_lower_bound<M>(tau: f64, m: M, k0: usize, k1: usize) -> Result<LogNumber>
where
    M: Fn(usize) -> u64,
{
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::param(format!("infection rate must be positive, got {tau}")));
    }
    if k0 == 0 || k0 >= k1 {
        return Err(Error::param(format!("need 0 < k0 < k1, got k0 = {k0}, k1 = {k1}")));
    }
    if let Some(k) = (k0..k1).find(|&k| m(k) == 0) {
        return Err(Error::param(format!("cut bound M_{k} must be at least 1")));
    }
    let ln = (k0 + 1..k1).map(|k| (tau * m(k) as f64 / k as f64).ln()).sum::<f64>() - (k1 as f64).ln();
    Ok(LogNumber::from_ln(ln))
}

/// Best [`proposition_lower_bound`] over all admissible windows
/// `0 < k0 < k1 <= n` where `M_k >= 1` on `[k0, k1)`, with the window.
pub fn best_proposition_bound<M>(tau: f64, m: M, n: usize) -> Result<(LogNumber, usize, usize)>
where
    M: Fn(usize) -> u64,
{
    let mut best: Option<(LogNumber, usize, usize)> = None;
    for k0 in 1..n {
        if m(k0) == 0 {
            continue;
        }
        let mut ln = -0.0f64;
        for k1 in k0 + 1..=n {
            // ln holds Σ_{k0<k<k1} ln(τ M_k / k)
            let value = LogNumber::from_ln(ln - (k1 as f64).ln());
            if best.as_ref().is_none_or(|b| value > b.0) {
                best = Some((value, k0, k1));
            }
            if k1 == n || m(k1) == 0 {
                break;
            }
            ln += (tau * m(k1) as f64 / k1 as f64).ln();
        }
    }
    best.ok_or_else(|| Error::param("no window with positive cut bounds"))
}
