//! Mixed pairs in a uniform random stub matching.
//!
//! With `n1` red and `n2` white stubs paired uniformly at random (one stub
//! left over when `n1 + n2` is odd), `L` counts red-white pairs. This module
//! gives the exact law of `L`, a sampler, the decay-rate function `φ` and the
//! exponential left-tail bound `e (l+1)^{3/2} e^{-φ(n1, n2; l)}`.

use rand::seq::SliceRandom;
use serde::Serialize;
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::rng::{stream, Purpose};

/// Exact distribution of the number of mixed pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairingLaw {
    pub n1: u64,
    pub n2: u64,
    /// `pmf[l] = P(L = l)` for `l = 0..=min(n1, n2)`.
    pub pmf: Vec<f64>,
}

impl PairingLaw {
    pub fn prob(&self, l: u64) -> f64 {
        self.pmf.get(l as usize).copied().unwrap_or(0.0)
    }

    /// `P(L <= l)`.
    pub fn cdf(&self, l: u64) -> f64 {
        let end = (l as usize + 1).min(self.pmf.len());
        self.pmf[..end].iter().sum::<f64>().min(1.0)
    }

    pub fn mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(l, p)| l as f64 * p).sum()
    }
}

/// Natural log of `P(L = l)`, `-inf` off the support.
///
/// All three parity cases reduce to
/// `2^l C(h, l) C(h - l, j) / C(B, n1)` with `h = ⌊B/2⌋` and
/// `j = ⌊(n1 - l)/2⌋`; for even `B` the parity of `n1 - l` must be even.
pub fn ln_mixed_pair_prob(n1: u64, n2: u64, l: u64) -> f64 {
    let total = n1 + n2;
    if l > n1.min(n2) {
        return f64::NEG_INFINITY;
    }
    let half = total / 2;
    let red_rest = n1 - l;
    if total.is_multiple_of(2) && !red_rest.is_multiple_of(2) {
        return f64::NEG_INFINITY;
    }
    let red_pairs = red_rest / 2;
    if l > half || red_pairs > half - l {
        return f64::NEG_INFINITY;
    }
    l as f64 * std::f64::consts::LN_2 + ln_binomial(half, l) + ln_binomial(half - l, red_pairs) - ln_binomial(total, n1)
}

pub fn mixed_pair_pmf(n1: u64, n2: u64) -> Result<PairingLaw> {
    if n1 + n2 < 2 {
        return Err(Error::param(format!("need at least two stubs, got n1 = {n1}, n2 = {n2}")));
    }
    let pmf = (0..=n1.min(n2)).map(|l| ln_mixed_pair_prob(n1, n2, l).exp()).collect();
    Ok(PairingLaw { n1, n2, pmf })
}

/// One draw of `L` from an explicit uniform matching: shuffle the stubs and
/// pair consecutive positions.
pub fn simulate_pairing(n1: u64, n2: u64, seed: u64) -> Result<u64> {
    simulate_pairing_indexed(n1, n2, seed, 0)
}

/// As [`simulate_pairing`], drawing from stream `index` of `seed`.
pub fn simulate_pairing_indexed(n1: u64, n2: u64, seed: u64, index: u64) -> Result<u64> {
    if n1 + n2 < 2 {
        return Err(Error::param(format!("need at least two stubs, got n1 = {n1}, n2 = {n2}")));
    }
    let mut stubs: Vec<bool> = std::iter::repeat_n(true, n1 as usize)
        .chain(std::iter::repeat_n(false, n2 as usize))
        .collect();
    stubs.shuffle(&mut stream(seed, Purpose::Pairing, index));
    Ok(stubs.chunks_exact(2).filter(|p| p[0] != p[1]).count() as u64)
}

/// `x ln x` with `0 ln 0 = 0`.
pub fn nlg(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Arguments of `φ(a1, a2; ρ)`: stub densities and link density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhiArgs {
    pub a1: f64,
    pub a2: f64,
    pub rho: f64,
}

impl PhiArgs {
    pub fn new(a1: f64, a2: f64, rho: f64) -> Result<Self> {
        if [a1, a2, rho].iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::param(format!("φ arguments must be finite and nonnegative: ({a1}, {a2}; {rho})")));
        }
        Ok(PhiArgs { a1, a2, rho })
    }
}

/// Exponential decay rate of `P(L <= ρ)` given stub counts `a1`, `a2`.
/// Zero on and below the curve `a1 a2 = ρ (a1 + a2)`.
pub fn phi(args: PhiArgs) -> f64 {
    phi_raw(args.a1, args.a2, args.rho)
}

pub(crate) fn phi_raw(a1: f64, a2: f64, rho: f64) -> f64 {
    let total = a1 + a2;
    if total <= 0.0 {
        return 0.0;
    }
    // ρ* = a1 a2 / (a1 + a2) is the typical mixed-pair density. Expanding
    // around it turns φ into a sum of nonnegative terms x* h(±δ/x*), exact in
    // δ = ρ* - ρ and free of cancellation as ρ approaches ρ*.
    let rho_star = a1 * a2 / total;
    let delta = rho_star - rho;
    if !(delta > 0.0) {
        return 0.0;
    }
    let term = |x_star: f64, u: f64| if x_star > 0.0 { x_star * bregman(u) } else { 0.0 };
    let (x1, x2) = (a1 * a1 / total, a2 * a2 / total);
    0.5 * term(x1, delta / x1) + 0.5 * term(x2, delta / x2) + term(rho_star, -delta / rho_star)
}

/// `(1+u) ln(1+u) - u` for `u >= -1`, by its Taylor series near zero.
fn bregman(u: f64) -> f64 {
    if u.abs() < 0.1 {
        let (mut sum, mut pow) = (0.0, u);
        for n in 2..24 {
            pow *= -u;
            sum += pow / (n * (n - 1)) as f64;
        }
        -sum
    } else if u <= -1.0 {
        1.0
    } else {
        (1.0 + u) * u.ln_1p() - u
    }
}

/// Upper bound on `P(L <= l)` given `n1` and `n2` stubs on the two sides.
pub fn tail_bound(n1: u64, n2: u64, l: u64) -> f64 {
    let l1 = l as f64 + 1.0;
    std::f64::consts::E * l1 * l1.sqrt() * (-phi_raw(n1 as f64, n2 as f64, l as f64)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_pair() {
        assert_eq!(mixed_pair_pmf(1, 1).unwrap().pmf, vec![0.0, 1.0]);
        for seed in 0..20 {
            assert_eq!(simulate_pairing(1, 1, seed).unwrap(), 1);
        }
    }

    #[test]
    fn two_by_two() {
        // three perfect matchings of {r, r, w, w}: one pure, two mixed
        let law = mixed_pair_pmf(2, 2).unwrap();
        assert!((law.prob(0) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(law.prob(1), 0.0);
        assert!((law.prob(2) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn too_few_stubs() {
        assert!(mixed_pair_pmf(1, 0).is_err());
        assert!(simulate_pairing(0, 1, 0).is_err());
        assert_eq!(mixed_pair_pmf(0, 5).unwrap().pmf, vec![1.0]);
    }

    #[test]
    fn two_by_two_sampled_within_three_sigma() {
        let draws = 100_000;
        let zeros = (0..draws).filter(|&i| simulate_pairing_indexed(2, 2, 17, i).unwrap() == 0).count();
        let p = 1.0 / 3.0;
        let sd = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((zeros as f64 / draws as f64 - p).abs() < 3.0 * sd);
    }

    #[test]
    fn phi_special_values() {
        for a in [0.1, 1.0, 7.5, 300.0] {
            assert!((phi(PhiArgs::new(a, a, 0.0).unwrap()) - a * 2f64.ln()).abs() < 1e-12 * a.max(1.0));
        }
        // below the boundary a1 a2 < ρ (a1 + a2)
        assert_eq!(phi(PhiArgs::new(1.0, 1.0, 0.6).unwrap()), 0.0);
        // on it
        assert!(phi(PhiArgs::new(2.0, 2.0, 1.0).unwrap()).abs() < 1e-15);
        let (a1, a2, r) = (1.3, 2.1, 0.4);
        let base = phi(PhiArgs::new(a1, a2, r).unwrap());
        let scaled = phi(PhiArgs::new(7.0 * a1, 7.0 * a2, 7.0 * r).unwrap());
        assert!((scaled - 7.0 * base).abs() < 1e-12 * scaled);
        assert!(PhiArgs::new(-1.0, 1.0, 0.0).is_err());
        assert!(PhiArgs::new(f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn tail_bound_trivial_regime() {
        // n1 n2 <= l (n1 + n2) gives φ = 0
        assert_eq!(tail_bound(3, 3, 2), std::f64::consts::E * 3f64.powf(1.5));
        assert!(tail_bound(3, 3, 2) >= 1.0);
    }

    #[test]
    fn tail_bound_dominates_exact_cdf_at_40_60() {
        let law = mixed_pair_pmf(40, 60).unwrap();
        for l in 0..=40 {
            assert!(tail_bound(40, 60, l) >= law.cdf(l), "l = {l}");
        }
        assert!(tail_bound(40, 60, 5) < 1e-3);
    }

    #[test]
    fn phi_matches_entropy_form_away_from_boundary() {
        let direct = |a1: f64, a2: f64, r: f64| {
            0.5 * nlg(a1 + a2) + 0.5 * nlg(a1 - r) + 0.5 * nlg(a2 - r) - nlg(a1) - nlg(a2) + nlg(r)
        };
        for (a1, a2) in [(1.0, 1.0), (0.3, 5.0), (12.0, 7.5), (100.0, 0.5)] {
            let star = a1 * a2 / (a1 + a2);
            for i in 0..=18 {
                let r = star * i as f64 / 20.0;
                let want = direct(a1, a2, r);
                let got = phi(PhiArgs::new(a1, a2, r).unwrap());
                assert!((got - want).abs() <= 1e-11 * want.max(1e-3), "({a1}, {a2}; {r}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn bregman_series_meets_direct_form() {
        for u in [-0.0999, -0.05, 1e-3, 0.0999] {
            let direct = (1.0 + u) * f64::ln_1p(u) - u;
            assert!((bregman(u) - direct).abs() <= 1e-15, "u = {u}");
        }
        assert_eq!(bregman(0.0), 0.0);
        assert_eq!(bregman(-1.0), 1.0);
    }
}
