//! Construction of the rescaled flight polyline `X_n` for the three growth
//! regimes.
//!
//! All exponential-family quantities are computed as differences inside a
//! single `exp` call (`e^{−β(Γ_n−Γ_k)}` rather than `e^{βΓ_k}/e^{βΓ_n}`), so
//! nothing overflows no matter how large `βΓ_n` or `log f(Γ_n)` get. Knots
//! that underflow to the same float are merged by the [`Polyline`]
//! constructor, which keeps the later value; the discarded values underflow
//! to zero together with their knots, so the path still starts at the origin.

use serde::{Deserialize, Serialize};

use crate::path::Polyline;
use crate::regime::{GrowthFunction, RegimeConfig};
use crate::stochastic::{sample_directions, sample_gamma_path, DirectionSequence, GammaPath, RandomSeed};
use crate::{Error, Result};

/// Which equal-in-law form of the exponential flight to build: the direct
/// normalization of `X_n`, or the time-reversed polyline `Y_n` whose vertices
/// accumulate from the tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Direct,
    Reversed,
}

/// One realization of the rescaled flight `X_n`, together with the
/// randomness that produced it.
#[derive(Clone, Debug)]
pub struct FlightRealization {
    pub path: Polyline,
    pub gamma: GammaPath,
    pub directions: DirectionSequence,
    pub regime: RegimeConfig,
    pub n: usize,
}

fn draw_inputs(
    n: usize,
    d: usize,
    seed: RandomSeed,
) -> Result<(GammaPath, DirectionSequence)> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "flight construction requires n >= 1 (got 0)".into(),
        ));
    }
    let gamma = sample_gamma_path(n, seed.child(0));
    let directions = sample_directions(n, d, seed.child(1))?;
    Ok((gamma, directions))
}

/// Accumulates `Σ_{i<=k} ε_i w_i` into a flat value buffer with the origin at
/// knot 0.
fn cumulative_values(directions: &DirectionSequence, weights: &[f64], d: usize) -> Vec<f64> {
    let n = weights.len();
    let mut values = vec![0.0; (n + 1) * d];
    for i in 1..=n {
        let w = weights[i - 1];
        let eps = directions.vector(i);
        let (prev, cur) = values.split_at_mut(i * d);
        let prev = &prev[(i - 1) * d..];
        for c in 0..d {
            cur[c] = prev[c] + w * eps[c];
        }
    }
    values
}

/// Case 1 of the growth trichotomy: `f(t) = t^α`, `α > 1/2`.
///
/// Knots `t_{n,k} = (Γ_k/Γ_n)^α`, values
/// `n^{1/2−α} Σ_{i<=k} ε_i (Γ_i^α − Γ_{i−1}^α)` with `Γ_0^α = 0`.
pub fn build_polynomial_flight(
    alpha: f64,
    n: usize,
    d: usize,
    seed: RandomSeed,
) -> Result<FlightRealization> {
    let regime = RegimeConfig::polynomial(alpha);
    regime.validate()?;
    let (gamma, directions) = draw_inputs(n, d, seed)?;
    let gamma_n = gamma.arrival(n);
    let scale = (n as f64).powf(0.5 - alpha);

    let mut knots = Vec::with_capacity(n + 1);
    knots.push(0.0);
    let mut weights = Vec::with_capacity(n);
    let mut prev_pow = 0.0; // Γ_0^α = 0
    for k in 1..=n {
        let g = gamma.arrival(k);
        knots.push(if k == n { 1.0 } else { (g / gamma_n).powf(alpha) });
        let pow = g.powf(alpha);
        weights.push(scale * (pow - prev_pow));
        prev_pow = pow;
    }
    let values = cumulative_values(&directions, &weights, d);
    let path = Polyline::new(d, knots, values)?;
    Ok(FlightRealization {
        path,
        gamma,
        directions,
        regime,
        n,
    })
}

/// Case 2: `f(t) = e^{βt}`, `β > 0`.
///
/// Direct form: knots `t_{n,k} = e^{−β(Γ_n−Γ_k)}`, values
/// `Σ_{i<=k} ε_i (e^{−β(Γ_n−Γ_i)} − e^{−β(Γ_n−Γ_{i−1})})`.
/// Reversed form: the equal-in-law polyline with vertices
/// `τ_{n,k} = e^{−βΓ_{k−1}}` and values accumulated from the tail plus the
/// standalone `ε_n e^{−βΓ_{n−1}}` term.
pub fn build_exponential_flight(
    beta: f64,
    n: usize,
    d: usize,
    seed: RandomSeed,
    representation: Representation,
) -> Result<FlightRealization> {
    let regime = RegimeConfig::exponential(beta);
    regime.validate()?;
    let (gamma, directions) = draw_inputs(n, d, seed)?;
    let gamma_n = gamma.arrival(n);

    let path = match representation {
        Representation::Direct => {
            let mut knots = Vec::with_capacity(n + 1);
            knots.push(0.0);
            let mut weights = Vec::with_capacity(n);
            let mut prev = (-beta * gamma_n).exp(); // e^{−β(Γ_n−Γ_0)}
            for k in 1..=n {
                let cur = if k == n {
                    1.0
                } else {
                    (-beta * (gamma_n - gamma.arrival(k))).exp()
                };
                knots.push(cur);
                weights.push(cur - prev);
                prev = cur;
            }
            let values = cumulative_values(&directions, &weights, d);
            Polyline::new(d, knots, values)?
        }
        Representation::Reversed => {
            // τ_{n,1} = 1, τ_{n,k} = e^{−βΓ_{k−1}}; suffix sums of the
            // weights e^{−βΓ_{i−1}} − e^{−βΓ_i} plus the last-step term.
            let tau: Vec<f64> = (1..=n)
                .map(|k| {
                    if k == 1 {
                        1.0
                    } else {
                        (-beta * gamma.arrival(k - 1)).exp()
                    }
                })
                .collect();
            let mut suffix = vec![0.0; (n + 1) * d];
            {
                let eps_n = directions.vector(n);
                let w_last = (-beta * gamma.arrival(n - 1)).exp();
                let base = &mut suffix[n * d..(n + 1) * d];
                for c in 0..d {
                    base[c] = w_last * eps_n[c];
                }
            }
            for k in (1..n).rev() {
                let w = (-beta * gamma.arrival(k - 1)).exp() - (-beta * gamma.arrival(k)).exp();
                let eps = directions.vector(k);
                let (head, tail) = suffix.split_at_mut((k + 1) * d);
                let cur = &mut head[k * d..];
                let next = &tail[..d];
                for c in 0..d {
                    cur[c] = next[c] + w * eps[c];
                }
            }
            // Ascending knots: 0, τ_{n,n}, …, τ_{n,1} = 1.
            let mut knots = Vec::with_capacity(n + 1);
            let mut values = Vec::with_capacity((n + 1) * d);
            knots.push(0.0);
            values.extend(std::iter::repeat(0.0).take(d));
            for k in (1..=n).rev() {
                knots.push(tau[k - 1]);
                values.extend_from_slice(&suffix[k * d..(k + 1) * d]);
            }
            Polyline::new(d, knots, values)?
        }
    };
    Ok(FlightRealization {
        path,
        gamma,
        directions,
        regime,
        n,
    })
}

/// Case 3: increasing `f` with `f'/f → ∞`, supplied as `log f`.
///
/// Knots `exp(log f(Γ_k) − log f(Γ_n))`, values accumulated from the
/// increments `exp(log f(Γ_i) − log f(Γ_n)) − exp(log f(Γ_{i−1}) − log f(Γ_n))`
/// with `f(Γ_0) = f(0)`. Everything stays in log space.
pub fn build_superexp_flight(
    growth: &dyn GrowthFunction,
    n: usize,
    d: usize,
    seed: RandomSeed,
) -> Result<FlightRealization> {
    let (gamma, directions) = draw_inputs(n, d, seed)?;
    let log_n = growth.log_f(gamma.arrival(n));

    let mut log_vals = Vec::with_capacity(n + 1);
    log_vals.push(growth.log_f(0.0));
    for k in 1..=n {
        let l = growth.log_f(gamma.arrival(k));
        if l <= log_vals[k - 1] {
            return Err(Error::NonMonotoneGrowth(gamma.arrival(k)));
        }
        log_vals.push(l);
    }

    let mut knots = Vec::with_capacity(n + 1);
    knots.push(0.0);
    let mut weights = Vec::with_capacity(n);
    let mut prev = (log_vals[0] - log_n).exp();
    for k in 1..=n {
        let cur = if k == n { 1.0 } else { (log_vals[k] - log_n).exp() };
        knots.push(cur);
        weights.push(cur - prev);
        prev = cur;
    }
    let values = cumulative_values(&directions, &weights, d);
    let path = Polyline::new(d, knots, values)?;
    let regime = RegimeConfig::SuperExponential {
        preset: growth.label().to_string(),
    };
    Ok(FlightRealization {
        path,
        gamma,
        directions,
        regime,
        n,
    })
}

/// Builds a flight for any regime; exponential flights use the direct form.
pub fn build_flight(
    regime: &RegimeConfig,
    n: usize,
    d: usize,
    seed: RandomSeed,
) -> Result<FlightRealization> {
    match regime {
        RegimeConfig::Polynomial { alpha } => build_polynomial_flight(*alpha, n, d, seed),
        RegimeConfig::Exponential { beta } => {
            build_exponential_flight(*beta, n, d, seed, Representation::Direct)
        }
        RegimeConfig::SuperExponential { .. } => {
            build_superexp_flight(regime.growth()?, n, d, seed)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::{sup_norm, Polyline};
    use crate::regime::ExpSquare;

    #[test]
    fn polynomial_rejects_small_alpha() {
        let err = build_polynomial_flight(0.4, 10, 1, RandomSeed(0)).unwrap_err();
        assert!(err.to_string().contains("1/2"));
        assert!(build_polynomial_flight(0.5, 10, 1, RandomSeed(0)).is_err());
    }

    #[test]
    fn exponential_rejects_nonpositive_beta() {
        assert!(build_exponential_flight(0.0, 10, 1, RandomSeed(0), Representation::Direct).is_err());
        assert!(build_exponential_flight(-1.0, 10, 1, RandomSeed(0), Representation::Direct).is_err());
    }

    #[test]
    fn zero_steps_rejected() {
        assert!(build_polynomial_flight(1.0, 0, 1, RandomSeed(0)).is_err());
    }

    #[test]
    fn polynomial_single_step() {
        // n = 1: one segment from the origin to ε_1 Γ_1^α with knot t_{1,1}=1.
        let alpha = 1.25;
        let flight = build_polynomial_flight(alpha, 1, 3, RandomSeed(5)).unwrap();
        assert_eq!(flight.path.num_knots(), 2);
        assert_eq!(flight.path.knots(), &[0.0, 1.0]);
        let g1 = flight.gamma.arrival(1);
        let eps = flight.directions.vector(1);
        let endpoint = flight.path.point(1);
        for c in 0..3 {
            let expect = g1.powf(alpha) * eps[c]; // 1^{1/2−α} = 1
            assert!((endpoint[c] - expect).abs() < 1e-12 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn polynomial_knots_match_gamma_path() {
        let alpha = 0.8;
        let flight = build_polynomial_flight(alpha, 50, 2, RandomSeed(9)).unwrap();
        let gn = flight.gamma.arrival(50);
        for k in 1..50 {
            let expect = (flight.gamma.arrival(k) / gn).powf(alpha);
            assert_eq!(flight.path.knots()[k], expect);
        }
        assert_eq!(flight.path.knots()[0], 0.0);
        assert_eq!(flight.path.knots()[50], 1.0);
    }

    #[test]
    fn polynomial_endpoint_variance_matches_limit() {
        // d=1, α=1: Var X_n(1) → 2α²/(2α−1) = 2. Oracle = the Ito isometry of
        // the case-1 limit; 10% relative tolerance at n = 2000, 2000 seeds.
        let (n, replicas) = (2000, 2000);
        let master = RandomSeed(2024);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for r in 0..replicas {
            let flight = build_polynomial_flight(1.0, n, 1, master.child(r)).unwrap();
            let x = flight.path.point(n)[0];
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / replicas as f64;
        let var = sum_sq / replicas as f64 - mean * mean;
        assert!((var - 2.0).abs() < 0.2, "Var X_n(1) = {var}, want 2 ± 0.2");
    }

    #[test]
    fn polynomial_endpoint_mean_is_centered() {
        // Increments ε_i(Γ_i^α − Γ_{i−1}^α) are symmetric; the empirical mean
        // of X_n(1) stays within four standard errors of zero.
        let replicas = 2000;
        let master = RandomSeed(77);
        let mut xs = Vec::with_capacity(replicas as usize);
        for r in 0..replicas {
            let flight = build_polynomial_flight(0.75, 200, 1, master.child(r)).unwrap();
            xs.push(flight.path.point(200)[0]);
        }
        let nf = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / nf;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (nf - 1.0);
        assert!(mean.abs() <= 4.0 * (var / nf).sqrt());
    }

    #[test]
    fn exponential_knots_in_unit_interval() {
        for seed in 0..20u64 {
            let flight =
                build_exponential_flight(0.7, 60, 2, RandomSeed(seed), Representation::Direct)
                    .unwrap();
            let knots = flight.path.knots();
            assert_eq!(knots[0], 0.0);
            assert_eq!(*knots.last().unwrap(), 1.0);
            for w in knots.windows(2) {
                assert!(w[1] > w[0]);
            }
        }
    }

    #[test]
    fn exponential_stays_in_unit_ball() {
        for seed in 0..200u64 {
            for &(beta, n) in &[(0.5, 10), (2.0, 100), (1.0, 400)] {
                let flight = build_exponential_flight(
                    beta,
                    n,
                    2,
                    RandomSeed(seed),
                    Representation::Direct,
                )
                .unwrap();
                assert!(sup_norm(&flight.path) <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn reversed_representation_structure() {
        let n = 40;
        let flight =
            build_exponential_flight(1.0, n, 1, RandomSeed(3), Representation::Reversed).unwrap();
        let knots = flight.path.knots();
        assert_eq!(knots[0], 0.0);
        assert_eq!(*knots.last().unwrap(), 1.0);
        // First vertex after the origin is τ_{n,n} = e^{−βΓ_{n−1}} with value
        // ε_n e^{−βΓ_{n−1}}, so |value| equals the knot exactly.
        let tau_last = (-flight.gamma.arrival(n - 1)).exp();
        assert_eq!(knots[1], tau_last);
        let v = flight.path.point(1)[0].abs();
        assert!((v - tau_last).abs() <= 1e-15);
        assert!(sup_norm(&flight.path) <= 1.0 + 1e-12);
    }

    #[test]
    fn reversed_single_step_hits_sphere() {
        let flight =
            build_exponential_flight(2.0, 1, 3, RandomSeed(8), Representation::Reversed).unwrap();
        let norm: f64 = flight.path.point(1).iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn superexp_stays_in_unit_ball() {
        for seed in 0..200u64 {
            for &n in &[10usize, 100] {
                let flight = build_superexp_flight(&ExpSquare, n, 2, RandomSeed(seed)).unwrap();
                assert!(sup_norm(&flight.path) <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn superexp_single_step() {
        // n = 1: one segment to ε_1 (1 − exp(log f(0) − log f(Γ_1))).
        let flight = build_superexp_flight(&ExpSquare, 1, 2, RandomSeed(4)).unwrap();
        let g1 = flight.gamma.arrival(1);
        let w = 1.0 - (0.0 - g1 * g1).exp();
        let eps = flight.directions.vector(1);
        for c in 0..2 {
            assert!((flight.path.point(1)[c] - w * eps[c]).abs() < 1e-15);
        }
    }

    #[test]
    fn superexp_penultimate_knot_collapses() {
        // t_{n,n−1} = exp(Γ_{n−1}² − Γ_n²) → 0 in probability; at n = 100 the
        // median over 200 seeds sits far below 0.01. Oracle = direct
        // simulation of the knot statistic.
        let mut stats: Vec<f64> = (0..200u64)
            .map(|seed| {
                let gamma = sample_gamma_path(100, RandomSeed(seed).child(0));
                let (a, b) = (gamma.arrival(99), gamma.arrival(100));
                (a * a - b * b).exp()
            })
            .collect();
        stats.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = stats[100];
        assert!(median < 0.01, "median penultimate knot {median}");
    }

    #[test]
    fn superexp_rejects_nonmonotone_log_growth() {
        struct Bad;
        impl GrowthFunction for Bad {
            fn label(&self) -> &str {
                "bad"
            }
            fn log_f(&self, t: f64) -> f64 {
                -t
            }
            fn dlog_f(&self, _t: f64) -> f64 {
                -1.0
            }
        }
        assert!(matches!(
            build_superexp_flight(&Bad, 5, 1, RandomSeed(0)),
            Err(Error::NonMonotoneGrowth(_))
        ));
    }

    #[test]
    fn all_regimes_start_at_origin_with_increasing_knots() {
        let regimes = [
            RegimeConfig::polynomial(0.75),
            RegimeConfig::exponential(1.5),
            RegimeConfig::superexp(),
        ];
        for regime in &regimes {
            for seed in 0..30u64 {
                let flight = build_flight(regime, 80, 2, RandomSeed(seed)).unwrap();
                assert_eq!(flight.path.point(0), &[0.0, 0.0]);
                for w in flight.path.knots().windows(2) {
                    assert!(w[1] > w[0]);
                }
                assert_eq!(flight.path.knots()[0], 0.0);
                assert_eq!(*flight.path.knots().last().unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn knot_merging_survives_extreme_underflow() {
        // β Γ_n ≈ 2000: most direct knots underflow to exactly 0 and merge;
        // the merged path still starts at the origin.
        let flight =
            build_exponential_flight(2.0, 1000, 1, RandomSeed(1), Representation::Direct).unwrap();
        assert!(flight.path.num_knots() <= 1001);
        assert_eq!(flight.path.point(0), &[0.0]);
        assert!(sup_norm(&flight.path) <= 1.0 + 1e-12);

        let superexp = build_superexp_flight(&ExpSquare, 1000, 1, RandomSeed(1)).unwrap();
        assert!(superexp.path.num_knots() >= 2);
        assert_eq!(superexp.path.point(0), &[0.0]);
        assert!(sup_norm(&superexp.path) <= 1.0 + 1e-12);
    }

    #[test]
    fn builders_are_deterministic() {
        let a = build_flight(&RegimeConfig::exponential(1.0), 50, 2, RandomSeed(12)).unwrap();
        let b = build_flight(&RegimeConfig::exponential(1.0), 50, 2, RandomSeed(12)).unwrap();
        assert_eq!(a.path, b.path);
        assert_eq!(a.gamma, b.gamma);

        let direct_zero: Vec<Polyline> = (0..3)
            .map(|_| {
                build_flight(&RegimeConfig::polynomial(1.0), 20, 1, RandomSeed(99))
                    .unwrap()
                    .path
            })
            .collect();
        assert_eq!(direct_zero[0], direct_zero[1]);
        assert_eq!(direct_zero[1], direct_zero[2]);
    }
}
