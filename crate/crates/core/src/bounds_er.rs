//! Threshold and growth-rate formulas for Erdős–Rényi graphs, plus the
//! entropy and Chernoff primitives they are built from.
//!
//! Growth exponents `c` are per node: `E[T_N] >= exp(c N (1 + o(1)))`.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::BoundReport;

/// Binary entropy in nats, `H(0) = H(1) = 0`.
pub fn entropy(gamma: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::param(format!("entropy argument must lie in [0, 1], got {gamma}")));
    }
    Ok(entropy_unchecked(gamma))
}

pub(crate) fn entropy_unchecked(gamma: f64) -> f64 {
    xlnx_neg(gamma) + xlnx_neg(1.0 - gamma)
}

/// `-x ln x` with the continuous extension at 0.
fn xlnx_neg(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

/// Bernoulli Kullback–Leibler divergence `D(q ‖ p)`.
pub fn kl_bernoulli(q: f64, p: f64) -> f64 {
    let term = |a: f64, b: f64| if a <= 0.0 { 0.0 } else { a * (a / b).ln() };
    term(q, p) + term(1.0 - q, 1.0 - p)
}

/// Upper bounds on `P(Bin(n, p) <= ρ n p)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChernoffBound {
    /// `exp(-n D(ρp ‖ p))`.
    pub kl: f64,
    /// `exp(-½ (1-ρ)² n p)`.
    pub simple: f64,
}

pub fn chernoff_lower_tail(n: u64, p: f64, rho: f64) -> Result<ChernoffBound> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("probability must lie in [0, 1], got {p}")));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::param(format!("rho must lie in [0, 1], got {rho}")));
    }
    let n = n as f64;
    Ok(ChernoffBound {
        kl: (-n * kl_bernoulli(rho * p, p)).exp(),
        simple: (-0.5 * (1.0 - rho).powi(2) * n * p).exp(),
    })
}

/// `G(ρ) = ρ ln ρ + 1 - ρ`, the per-edge large-deviation cost of keeping
/// only a fraction `ρ` of the expected boundary edges.
pub fn g_rate(rho: f64) -> f64 {
    -xlnx_neg(rho) + 1.0 - rho
}

/// Dense-regime scaling of the infection rate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DenseRegime {
    /// `N p τ -> ∞`: exponent `(1-ε) ln(Npτ)`.
    Diverging,
    /// `N p τ = λ` fixed: exponent `(1-ε) ln λ + 1/λ - 1`.
    Constant,
}

pub fn dense_growth_exponent(n: u64, p: f64, tau: f64, eps: f64, regime: DenseRegime) -> Result<BoundReport> {
    if n == 0 || !(p > 0.0 && p <= 1.0) {
        return Err(Error::param(format!("need n >= 1 and p in (0, 1], got n = {n}, p = {p}")));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::param(format!("infection rate must be positive, got {tau}")));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::param(format!("eps must lie in [0, 1), got {eps}")));
    }
    let lam = n as f64 * p * tau;
    let exponent = match regime {
        DenseRegime::Diverging => (1.0 - eps) * lam.ln(),
        DenseRegime::Constant => (1.0 - eps) * lam.ln() + 1.0 / lam - 1.0,
    };
    let feasible = lam > 1.0;
    let mut r = BoundReport::new()
        .input("n", n as f64)
        .input("p", p)
        .input("tau", tau)
        .input("eps", eps)
        .term("lambda", lam)
        .term("exponent", exponent);
    r.threshold_tau = Some(1.0 / (n as f64 * p));
    r.feasible = feasible;
    if feasible {
        r.growth_exponent = Some(exponent);
    } else {
        r = r.note("N p tau <= 1: no exponential lower bound");
    }
    if regime == DenseRegime::Diverging {
        r = r.note("asymptotic regime N p tau -> infinity");
    }
    Ok(r)
}

/// `ln λ + 1/λ - 1`, the extinction-time growth rate on `K_N` with per-edge
/// rate `λ/N`. The expression is also positive for `λ < 1`, where it has no
/// meaning; only `λ > 1` is feasible.
pub fn complete_graph_exponent(lam: f64) -> f64 {
    lam.ln() + 1.0 / lam - 1.0
}

pub fn complete_graph_report(lam: f64) -> Result<BoundReport> {
    if !(lam > 0.0 && lam.is_finite()) {
        return Err(Error::param(format!("lambda must be positive, got {lam}")));
    }
    let e = complete_graph_exponent(lam);
    let mut r = BoundReport::new().input("lambda", lam).term("exponent", e);
    r.feasible = lam > 1.0;
    r.growth_exponent = r.feasible.then_some(e);
    Ok(r)
}

/// Smallest admissible mean degree for the sparse bounds.
pub const SIGMA_MIN: f64 = 4.0 * LN_2;

/// Constants of the sparse cut bound for mean degree `σ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SparseParams {
    pub sigma: f64,
    /// `¼ - ln2/σ`.
    pub zeta: f64,
    /// Cut bounds hold for set fractions in `(γ_σ, 1-γ_σ)`.
    pub gamma_sigma: f64,
    pub alpha: f64,
    /// `ζ^√(2α)`, the level `ρ` is kept above.
    pub c: f64,
    /// `ρ(γ) > c` on `(γ₀, 1-γ₀)`.
    pub gamma0: f64,
}

pub fn sparse_params(sigma: f64) -> Result<SparseParams> {
    if !(sigma > SIGMA_MIN) || !sigma.is_finite() {
        return Err(Error::Inapplicable(format!("mean degree {sigma} is not above 4 ln 2")));
    }
    let zeta = 0.25 - LN_2 / sigma;
    // ½ - √(ζ - z) written as (¼ - ζ + z)/(½ + √(ζ - z)) to avoid cancellation
    let gamma_sigma = (LN_2 / sigma) / (0.5 + zeta.max(0.0).sqrt());
    let alpha = 2.0 * (1.0 - 2.0 * (LN_2 / sigma).sqrt()).ln() / zeta.ln();
    let c = zeta.powf((2.0 * alpha).sqrt());
    let z = zeta.powf((2.0 / alpha).sqrt());
    let gamma0 = (LN_2 / sigma + z) / (0.5 + (zeta - z).max(0.0).sqrt());
    if !(alpha > 0.0 && alpha < 2.0 && c > 0.0 && gamma0 > 0.0) {
        return Err(Error::Inapplicable(format!("mean degree {sigma} is too close to 4 ln 2")));
    }
    Ok(SparseParams { sigma, zeta, gamma_sigma, alpha, c, gamma0 })
}

impl SparseParams {
    /// `(γ(1-γ) - ln2/σ)^α` on `(γ_σ, 1-γ_σ)`, zero outside.
    pub fn rho(&self, gamma: f64) -> f64 {
        let base = gamma * (1.0 - gamma) - LN_2 / self.sigma;
        if base <= 0.0 {
            0.0
        } else {
            base.powf(self.alpha)
        }
    }

    /// `τ₀ = 1/(σ c (1 - γ₀))`.
    pub fn tau0(&self) -> f64 {
        1.0 / (self.sigma * self.c * (1.0 - self.gamma0))
    }

    /// Cut bound `ρ(k/N) (σ/N) k (N-k)` for sets of size `k`.
    pub fn cut_bound(&self, n: usize, k: usize) -> f64 {
        let nf = n as f64;
        self.rho(k as f64 / nf) * self.sigma / nf * (k * (n - k)) as f64
    }
}

pub fn tau0_sparse(sigma: f64) -> Result<f64> {
    Ok(sparse_params(sigma)?.tau0())
}

/// `∫_0^s ln x dx = s ln s - s`.
fn ln_antiderivative(s: f64) -> f64 {
    -xlnx_neg(s) - s
}

/// Explicit per-node exponent for mean degree `σ` and infection rate `τ`.
///
/// `exponent` is `(γ₁-γ₀) ln(τσ) + ∫_{γ₀}^{γ₁} ln ρ + ∫_{1-γ₁}^{1} ln s`.
/// The last integral over-counts `[1-γ₀, 1]`, which makes `exponent`
/// negative just above `τ₀`; `range_integral_exponent` integrates over
/// `[1-γ₁, 1-γ₀]` only and is positive for every `τ > τ₀`.
pub fn sparse_growth_exponent(sigma: f64, tau: f64) -> Result<BoundReport> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::param(format!("infection rate must be positive, got {tau}")));
    }
    let mut r = BoundReport::new().input("sigma", sigma).input("tau", tau);
    let sp = match sparse_params(sigma) {
        Ok(sp) => sp,
        Err(Error::Inapplicable(msg)) => return Ok(r.note(msg)),
        Err(e) => return Err(e),
    };
    let tau0 = sp.tau0();
    r.threshold_tau = Some(tau0);
    r = r
        .term("zeta", sp.zeta)
        .term("gamma_sigma", sp.gamma_sigma)
        .term("alpha", sp.alpha)
        .term("c", sp.c)
        .term("gamma0", sp.gamma0)
        .term("tau0", tau0);
    if tau <= tau0 {
        return Ok(r.note("tau does not exceed tau0"));
    }
    let ts = tau * sigma;
    let (g0, gs) = (sp.gamma0, sp.gamma_sigma);
    let g1 = (1.0 - g0).min(1.0 - 1.0 / (ts * sp.c));
    let f = ln_antiderivative;
    let linear = (g1 - g0) * ts.ln();
    let rho_integral = sp.alpha * (f(g1 - gs) - f(g0 - gs) + f(1.0 - g0 - gs) - f(1.0 - g1 - gs));
    let survival = f(1.0) - f(1.0 - g1);
    let range = f(1.0 - g0) - f(1.0 - g1);
    let exponent = linear + rho_integral + survival;
    r.feasible = true;
    r.growth_exponent = Some(exponent);
    Ok(r.term("gamma1", g1)
        .term("linear_term", linear)
        .term("rho_integral", rho_integral)
        .term("survival_integral", survival)
        .term("range_integral", range)
        .term("exponent", exponent)
        .term("range_integral_exponent", linear + rho_integral + range)
        .term("asymptotic_exponent", ts.ln() + 1.0 / ts - 1.0))
}
