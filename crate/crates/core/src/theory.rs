//! Bit-length bound `M > (n+1)²·A²/(ε²·δ)` and the Monte-Carlo harness that
//! checks convergence of the SCNN towards its reference network.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bitstream::{sng_encode, Encoding};
use crate::error::{Error, Result};
use crate::netcore::{Grid, ReferenceNetwork, TargetFunction};
use crate::par::{try_map_indexed, ExecPolicy};
use crate::rng::StreamKey;
use crate::scgates::AccumulationMode;
use crate::scnn::{forward_scnn, ScnnConfig};
use crate::stats::{binomial_se, log_log_slope, mean_var, Summary};

/// Largest stream length the harness will simulate.
pub const MAX_SIMULATED_LEN: u64 = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundQuery {
    pub n: usize,
    #[serde(rename = "N")]
    pub width: usize,
    pub epsilon: f64,
    pub delta: f64,
    /// `Σ|αᵢ|`; `N` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_sum: Option<f64>,
}

impl BoundQuery {
    pub fn new(n: usize, width: usize, epsilon: f64, delta: f64) -> Self {
        BoundQuery {
            n,
            width,
            epsilon,
            delta,
            alpha_sum: None,
        }
    }

    pub fn with_alpha_sum(self, a: f64) -> Self {
        BoundQuery {
            alpha_sum: Some(a),
            ..self
        }
    }

    /// Query for a concrete network. Each `|αᵢ|` is weighted by unit `i`'s
    /// pre-scaling factor, since stream noise is amplified by it.
    pub fn from_network(net: &ReferenceNetwork, epsilon: f64, delta: f64) -> Self {
        let ps = net.prescale();
        let a = net
            .output_weights()
            .iter()
            .enumerate()
            .map(|(i, a)| a.abs() * ps.preactivation_scale(i))
            .sum();
        BoundQuery::new(net.dim(), net.width(), epsilon, delta).with_alpha_sum(a)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha_sum.unwrap_or(self.width as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if self.width == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must be in (0, 1), got {}",
                self.delta
            )));
        }
        let a = self.alpha();
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha_sum must be > 0, got {a}"
            )));
        }
        Ok(())
    }

    /// `(n+1)²·A²/(ε²·δ)` as a real number.
    pub fn value(&self) -> Result<f64> {
        self.validate()?;
        let num = (self.n as f64 + 1.0) * self.alpha();
        Ok(num * num / (self.epsilon * self.epsilon * self.delta))
    }
}

/// Smallest integer strictly above [`BoundQuery::value`].
///
/// Values within a relative `1e-9` of an integer are taken to be that
/// integer, so that decimal inputs like `ε = 0.1` give the exact answer.
pub fn m_min_bound(q: &BoundQuery) -> Result<u64> {
    let mut v = q.value()?;
    let r = v.round();
    if (v - r).abs() <= 1e-9 * r.abs().max(1.0) {
        v = r;
    }
    if v >= 9.0e18 {
        return Err(Error::InvalidParameter(format!(
            "bound {v:e} does not fit in 64 bits"
        )));
    }
    Ok(v.floor() as u64 + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevCheck {
    pub x: f64,
    #[serde(rename = "M")]
    pub len: usize,
    pub trials: usize,
    pub k: f64,
    /// Fraction of trials with `|decode − x| ≥ k/(2√M)`.
    pub tail: f64,
    /// `min(1, 1/k²)`
    pub bound: f64,
    /// Two binomial standard errors at the bound.
    pub slack: f64,
    pub pass: bool,
}

/// Tail of a unipolar stream's decode error against Chebyshev with the
/// variance cap `1/(4M)`.
pub fn chebyshev_stream_bound_check(
    x: f64,
    len: usize,
    trials: usize,
    k: f64,
    key: &StreamKey,
    exec: ExecPolicy,
) -> Result<ChebyshevCheck> {
    if trials < 1000 {
        return Err(Error::InvalidParameter(format!(
            "need at least 1000 trials, got {trials}"
        )));
    }
    if k.is_nan() || k <= 0.0 {
        return Err(Error::InvalidParameter(format!("k must be > 0, got {k}")));
    }
    let threshold = k / (2.0 * (len as f64).sqrt());
    let hits = try_map_indexed(trials, exec, |t| {
        let s = sng_encode(x, len, Encoding::Unipolar, &key.fork(t as u64))?;
        Ok::<_, Error>((s.decode() - x).abs() >= threshold)
    })?
    .into_iter()
    .filter(|&h| h)
    .count();
    let tail = hits as f64 / trials as f64;
    let bound = (1.0 / (k * k)).min(1.0);
    let slack = 2.0 * binomial_se(bound, trials);
    Ok(ChebyshevCheck {
        x,
        len,
        trials,
        k,
        tail,
        bound,
        slack,
        pass: tail <= bound + slack,
    })
}

/// Mean and unbiased variance of `decode` over `keys` independent streams;
/// stream `t` uses `key.fork(t)`.
pub fn decode_moments(
    x: f64,
    len: usize,
    encoding: Encoding,
    keys: usize,
    key: &StreamKey,
    exec: ExecPolicy,
) -> Result<(f64, f64)> {
    let values = try_map_indexed(keys, exec, |t| {
        sng_encode(x, len, encoding, &key.fork(t as u64)).map(|s| s.decode())
    })?;
    Ok(mean_var(values))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Stream lengths, strictly ascending.
    pub lens: Vec<usize>,
    pub trials: usize,
    pub epsilon: f64,
    pub mode: AccumulationMode,
    pub key: StreamKey,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.lens.is_empty() {
            return Err(Error::InvalidParameter("no stream lengths given".into()));
        }
        if self.lens[0] == 0 {
            return Err(Error::ZeroLength);
        }
        if let Some(w) = self.lens.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "stream lengths must be strictly ascending ({} then {})",
                w[0], w[1]
            )));
        }
        if let Some(&m) = self.lens.iter().find(|&&m| m as u64 > MAX_SIMULATED_LEN) {
            return Err(Error::Infeasible {
                m: m as u64,
                limit: MAX_SIMULATED_LEN,
            });
        }
        if self.trials < 30 {
            return Err(Error::InvalidParameter(format!(
                "need at least 30 trials, got {}",
                self.trials
            )));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(rename = "M")]
    pub len: usize,
    pub trials: usize,
    pub grid_size: usize,
    /// `|G_SC,M − G|` over all trials and grid points.
    pub sc: Summary,
    /// `|G_SC,M − f|` over all trials and grid points.
    pub total: Summary,
    /// Fraction of evaluations with `|G_SC,M − f| ≥ ε`.
    pub failure_rate: f64,
    pub failure_se: f64,
    /// Fraction of trials where any grid point fails.
    pub sup_failure_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub network: String,
    pub target: String,
    pub grid: String,
    pub mode: AccumulationMode,
    pub epsilon: f64,
    /// Sup of `|G − f|` over the grid.
    pub reference_error: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Log-log slope of the median `|G_SC,M − G|` against `M`.
    pub sc_median_slope: Option<f64>,
    pub sc_rms_slope: Option<f64>,
}

const LONG_STATS: [&str; 11] = [
    "trials",
    "grid_size",
    "sc_median",
    "sc_max",
    "sc_rms",
    "total_median",
    "total_max",
    "total_rms",
    "failure_rate",
    "failure_se",
    "sup_failure_rate",
];

impl ConvergenceRow {
    fn stat(&self, name: &str) -> f64 {
        match name {
            "trials" => self.trials as f64,
            "grid_size" => self.grid_size as f64,
            "sc_median" => self.sc.median,
            "sc_max" => self.sc.max,
            "sc_rms" => self.sc.rms,
            "total_median" => self.total.median,
            "total_max" => self.total.max,
            "total_rms" => self.total.rms,
            "failure_rate" => self.failure_rate,
            "failure_se" => self.failure_se,
            "sup_failure_rate" => self.sup_failure_rate,
            _ => unreachable!("unknown statistic {name}"),
        }
    }
}

impl ConvergenceReport {
    pub fn lens(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.len).collect()
    }

    /// `M,statistic,value` rows; slopes use `M = all`.
    pub fn write_long_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["M", "statistic", "value"])?;
        for row in &self.rows {
            let m = row.len.to_string();
            for name in LONG_STATS {
                w.write_record([m.as_str(), name, &row.stat(name).to_string()])?;
            }
        }
        for (name, v) in [
            ("sc_median_slope", self.sc_median_slope),
            ("sc_rms_slope", self.sc_rms_slope),
        ] {
            let v = v.map_or_else(|| "nan".to_string(), |v| v.to_string());
            w.write_record(["all", name, &v])?;
        }
        w.flush()?;
        Ok(())
    }

    /// One row per `M`, one column per statistic.
    pub fn write_plot_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["M"];
        header.extend(LONG_STATS);
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![row.len.to_string()];
            rec.extend(LONG_STATS.iter().map(|s| row.stat(s).to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs `forward_scnn` on every grid point for every trial at every `M`.
/// Evaluation `(M, t, g)` uses key `spec.key.fork(M).fork(t).fork(g)`.
pub fn convergence_sweep(
    net: &ReferenceNetwork,
    f: &TargetFunction,
    grid: &Grid,
    spec: &SweepSpec,
    exec: ExecPolicy,
) -> Result<ConvergenceReport> {
    spec.validate()?;
    if grid.is_empty() {
        return Err(Error::InvalidParameter("grid is empty".into()));
    }
    if grid.dim() != net.dim() || f.arity() != net.dim() {
        return Err(Error::DimensionMismatch {
            expected: net.dim(),
            found: grid.dim(),
        });
    }
    let points: Vec<Vec<f64>> = grid.iter().collect();
    let reference = points
        .iter()
        .map(|x| net.forward(x))
        .collect::<Result<Vec<_>>>()?;
    let target: Vec<f64> = points.iter().map(|x| f.eval(x)).collect();
    let reference_error = reference
        .iter()
        .zip(&target)
        .map(|(g, t)| (g - t).abs())
        .fold(0.0, f64::max);

    let gsize = points.len();
    let mut rows = Vec::with_capacity(spec.lens.len());
    for &len in &spec.lens {
        let base = spec.key.fork(len as u64);
        let outputs = try_map_indexed(spec.trials * gsize, exec, |idx| {
            let (t, g) = (idx / gsize, idx % gsize);
            let cfg = ScnnConfig::new(len, spec.mode, base.fork(t as u64).fork(g as u64));
            forward_scnn(net, &points[g], &cfg)
        })?;
        let sc: Vec<f64> = outputs
            .iter()
            .enumerate()
            .map(|(i, y)| (y - reference[i % gsize]).abs())
            .collect();
        let total: Vec<f64> = outputs
            .iter()
            .enumerate()
            .map(|(i, y)| (y - target[i % gsize]).abs())
            .collect();
        let fails = total.iter().filter(|&&e| e >= spec.epsilon).count();
        let sup_fails = total
            .chunks(gsize)
            .filter(|trial| trial.iter().any(|&e| e >= spec.epsilon))
            .count();
        let failure_rate = fails as f64 / total.len() as f64;
        rows.push(ConvergenceRow {
            len,
            trials: spec.trials,
            grid_size: gsize,
            sc: Summary::of(&sc),
            total: Summary::of(&total),
            failure_rate,
            failure_se: binomial_se(failure_rate, total.len()),
            sup_failure_rate: sup_fails as f64 / spec.trials as f64,
        });
    }
    let ms: Vec<f64> = rows.iter().map(|r| r.len as f64).collect();
    let medians: Vec<f64> = rows.iter().map(|r| r.sc.median).collect();
    let rms: Vec<f64> = rows.iter().map(|r| r.sc.rms).collect();
    Ok(ConvergenceReport {
        network: net.name().to_string(),
        target: f.name().to_string(),
        grid: grid.describe(),
        mode: spec.mode,
        epsilon: spec.epsilon,
        reference_error,
        sc_median_slope: log_log_slope(&ms, &medians),
        sc_rms_slope: log_log_slope(&ms, &rms),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundValidation {
    pub query: BoundQuery,
    #[serde(rename = "M")]
    pub len: u64,
    pub trials: usize,
    pub evaluations: usize,
    pub failures: usize,
    pub failure_rate: f64,
    pub failure_se: f64,
    /// `δ + 2·SE`
    pub threshold: f64,
    pub pass: bool,
}

/// Simulates at `M = m_min_bound(q)` and checks that the fraction of
/// evaluations with `|G_SC,M − f| ≥ ε` stays within `δ` plus two standard
/// errors. Evaluation `(t, g)` uses `key.fork(t).fork(g)`.
#[allow(clippy::too_many_arguments)]
pub fn bound_validation(
    q: &BoundQuery,
    net: &ReferenceNetwork,
    f: &TargetFunction,
    grid: &Grid,
    trials: usize,
    mode: AccumulationMode,
    key: &StreamKey,
    exec: ExecPolicy,
) -> Result<BoundValidation> {
    let m = m_min_bound(q)?;
    if m > MAX_SIMULATED_LEN {
        return Err(Error::Infeasible {
            m,
            limit: MAX_SIMULATED_LEN,
        });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if grid.is_empty() || grid.dim() != net.dim() {
        return Err(Error::DimensionMismatch {
            expected: net.dim(),
            found: grid.dim(),
        });
    }
    let gsize = grid.len();
    let errors = try_map_indexed(trials * gsize, exec, |idx| {
        let (t, g) = (idx / gsize, idx % gsize);
        let x = grid.point(g);
        let cfg = ScnnConfig::new(m as usize, mode, key.fork(t as u64).fork(g as u64));
        Ok::<_, Error>((forward_scnn(net, &x, &cfg)? - f.eval(&x)).abs())
    })?;
    let failures = errors.iter().filter(|&&e| e >= q.epsilon).count();
    let evaluations = errors.len();
    let failure_rate = failures as f64 / evaluations as f64;
    let failure_se = binomial_se(failure_rate, evaluations);
    let threshold = q.delta + 2.0 * failure_se;
    Ok(BoundValidation {
        query: *q,
        len: m,
        trials,
        evaluations,
        failures,
        failure_rate,
        failure_se,
        threshold,
        pass: failure_rate <= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::{fit_reference, Activation};
    use proptest::prelude::*;

    fn tiny_net() -> ReferenceNetwork {
        ReferenceNetwork::new(
            "tiny",
            vec![vec![0.8], vec![-0.6]],
            vec![0.1, 0.4],
            vec![0.5, -0.3],
            Activation::Sigmoid,
        )
        .unwrap()
    }

    #[test]
    fn bound_examples() {
        assert_eq!(
            m_min_bound(&BoundQuery::new(2, 10, 0.1, 0.1)).unwrap(),
            900_001
        );
        assert!(m_min_bound(&BoundQuery::new(0, 10, 0.1, 0.1)).is_err());
        assert!(m_min_bound(&BoundQuery::new(1, 1, 0.1, 0.0)).is_err());
        assert!(m_min_bound(&BoundQuery::new(1, 1, 0.1, 1.0)).is_err());
        assert!(m_min_bound(&BoundQuery::new(1, 1, 0.0, 0.5)).is_err());
        assert!(m_min_bound(&BoundQuery::new(1, 1, 0.1, 0.5).with_alpha_sum(0.0)).is_err());
        // (n+1)² A² / (ε² δ) = 4·0.64/(0.25·0.25) = 40.96
        let q = BoundQuery::new(1, 2, 0.5, 0.25).with_alpha_sum(0.8);
        assert_eq!(m_min_bound(&q).unwrap(), 41);
        // Exactly integral: 4·1/(0.25·0.25) = 64, so 65.
        assert_eq!(m_min_bound(&BoundQuery::new(1, 1, 0.5, 0.25)).unwrap(), 65);
    }

    #[test]
    fn halving_epsilon_quadruples() {
        for (n, w, e, d) in [(2, 10, 0.1, 0.1), (3, 5, 0.4, 0.3), (1, 7, 0.25, 0.5)] {
            let a = BoundQuery::new(n, w, e, d).value().unwrap();
            let b = BoundQuery::new(n, w, e / 2.0, d).value().unwrap();
            assert_eq!(b, 4.0 * a);
        }
    }

    #[test]
    fn near_one_delta_is_well_formed() {
        let q = BoundQuery::new(1, 1, 1.0, 1.0 - 1e-12);
        assert_eq!(m_min_bound(&q).unwrap(), 5);
    }

    proptest! {
        #[test]
        fn bound_is_monotone(
            n in 1usize..20, dn in 0usize..5,
            w in 1usize..50, dw in 0usize..5,
            e in 0.01f64..2.0, de in 0.0f64..1.0,
            d in 0.01f64..0.98, dd in 0.0f64..0.01,
        ) {
            let base = m_min_bound(&BoundQuery::new(n, w, e, d)).unwrap();
            prop_assert!(m_min_bound(&BoundQuery::new(n + dn, w, e, d)).unwrap() >= base);
            prop_assert!(m_min_bound(&BoundQuery::new(n, w + dw, e, d)).unwrap() >= base);
            prop_assert!(m_min_bound(&BoundQuery::new(n, w, e + de, d)).unwrap() <= base);
            prop_assert!(m_min_bound(&BoundQuery::new(n, w, e, d + dd)).unwrap() <= base);
        }
    }

    #[test]
    fn query_from_network_weights_by_prescale() {
        let net = ReferenceNetwork::new(
            "p",
            vec![vec![3.0], vec![0.5]],
            vec![0.0, -2.0],
            vec![1.0, -0.5],
            Activation::Sigmoid,
        )
        .unwrap();
        let q = BoundQuery::from_network(&net, 0.1, 0.1);
        assert_eq!(q.alpha(), 3.0 + 0.5 * 2.0);
        assert_eq!((q.n, q.width), (1, 2));
    }

    #[test]
    fn chebyshev_examples() {
        let key = StreamKey::root(42);
        let c = chebyshev_stream_bound_check(0.5, 100, 20_000, 2.0, &key, ExecPolicy::Parallel)
            .unwrap();
        assert!(c.pass && c.tail <= 0.26, "{c:?}");
        assert!(c.tail > 0.02 && c.tail < 0.08, "binomial tail {}", c.tail);
        let one = chebyshev_stream_bound_check(1.0, 100, 1000, 3.0, &key, ExecPolicy::Sequential)
            .unwrap();
        assert_eq!(one.tail, 0.0);
        let vacuous =
            chebyshev_stream_bound_check(0.3, 64, 1000, 1.0, &key, ExecPolicy::Sequential).unwrap();
        assert_eq!(vacuous.bound, 1.0);
        assert!(vacuous.pass);
        assert!(
            chebyshev_stream_bound_check(0.5, 100, 999, 2.0, &key, ExecPolicy::Sequential).is_err()
        );
    }

    #[test]
    fn variance_under_cap() {
        let (mean, var) = decode_moments(
            0.5,
            400,
            Encoding::Unipolar,
            4000,
            &StreamKey::root(8),
            ExecPolicy::Parallel,
        )
        .unwrap();
        assert!((mean - 0.5).abs() < 0.005);
        assert!(var <= 1.1 / 1600.0, "var {var}");
    }

    fn spec(lens: Vec<usize>, trials: usize) -> SweepSpec {
        SweepSpec {
            lens,
            trials,
            epsilon: 0.15,
            mode: AccumulationMode::Apc,
            key: StreamKey::root(5),
        }
    }

    #[test]
    fn degenerate_network_has_no_error() {
        let net = ReferenceNetwork::new(
            "z",
            vec![vec![0.3]],
            vec![0.2],
            vec![0.0],
            Activation::Sigmoid,
        )
        .unwrap();
        let f = TargetFunction::constant(0.0, 1);
        let r = convergence_sweep(
            &net,
            &f,
            &Grid::uniform(1, 5).unwrap(),
            &spec(vec![4, 16, 64], 30),
            ExecPolicy::Parallel,
        )
        .unwrap();
        for row in &r.rows {
            assert_eq!(row.sc.max, 0.0);
            assert_eq!(row.total.max, 0.0);
            assert_eq!(row.failure_rate, 0.0);
        }
        assert_eq!(r.sc_median_slope, None);
    }

    #[test]
    fn sweep_validation() {
        let net = tiny_net();
        let f = TargetFunction::from_network(&net);
        let g = Grid::uniform(1, 3).unwrap();
        let run = |s: SweepSpec| convergence_sweep(&net, &f, &g, &s, ExecPolicy::Sequential);
        assert!(run(spec(vec![64, 16], 30)).is_err());
        assert!(run(spec(vec![16, 16], 30)).is_err());
        assert!(run(spec(vec![16], 29)).is_err());
        assert!(run(spec(vec![], 30)).is_err());
        assert!(matches!(
            run(spec(vec![1 << 27], 30)),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn sweep_converges_and_is_deterministic() {
        let f = TargetFunction::sine(1.0);
        let fit = fit_reference(
            &f,
            16,
            &Grid::uniform(1, 128).unwrap(),
            &StreamKey::root(11),
        )
        .unwrap();
        let g = Grid::uniform(1, 16).unwrap();
        let s = spec(vec![16, 64, 256, 1024], 40);
        let a = convergence_sweep(&fit.network, &f, &g, &s, ExecPolicy::Parallel).unwrap();
        let b = convergence_sweep(&fit.network, &f, &g, &s, ExecPolicy::Sequential).unwrap();
        assert_eq!(a, b);
        let medians: Vec<f64> = a.rows.iter().map(|r| r.sc.median).collect();
        assert!(medians.windows(2).all(|w| w[1] < w[0]), "{medians:?}");
        let slope = a.sc_median_slope.unwrap();
        assert!((-0.65..=-0.35).contains(&slope), "slope {slope}");
        for w in a.rows.windows(2) {
            let slack = 2.0 * (w[0].failure_se + w[1].failure_se);
            assert!(w[1].failure_rate <= w[0].failure_rate + slack);
        }
        assert!(a.reference_error <= fit.sup_error + 1e-12);

        let mut x = Vec::new();
        let mut y = Vec::new();
        a.write_long_csv(&mut x).unwrap();
        b.write_long_csv(&mut y).unwrap();
        assert_eq!(x, y);
        let text = String::from_utf8(x).unwrap();
        assert!(text.starts_with("M,statistic,value\n16,trials,40\n"));
        assert!(text.contains("all,sc_median_slope,"));
        let mut plot = Vec::new();
        a.write_plot_csv(&mut plot).unwrap();
        assert_eq!(String::from_utf8(plot).unwrap().lines().count(), 5);
    }

    #[test]
    fn tiny_bound_validation() {
        let net = tiny_net();
        let f = TargetFunction::from_network(&net);
        let q = BoundQuery::new(1, 2, 0.5, 0.25).with_alpha_sum(net.alpha_abs_sum());
        let g = Grid::uniform(1, 8).unwrap();
        let v = bound_validation(
            &q,
            &net,
            &f,
            &g,
            200,
            AccumulationMode::Apc,
            &StreamKey::root(3),
            ExecPolicy::Parallel,
        )
        .unwrap();
        assert_eq!(v.len, m_min_bound(&q).unwrap());
        assert!(v.pass && v.failure_rate <= 0.25, "{v:?}");

        let loose = BoundQuery::new(1, 2, 10.0, 0.5);
        let v = bound_validation(
            &loose,
            &net,
            &f,
            &g,
            50,
            AccumulationMode::Mux,
            &StreamKey::root(4),
            ExecPolicy::Sequential,
        )
        .unwrap();
        assert_eq!(v.failure_rate, 0.0);

        let huge = BoundQuery::new(2, 10, 0.01, 0.01);
        assert!(matches!(
            bound_validation(
                &huge,
                &net,
                &f,
                &g,
                10,
                AccumulationMode::Apc,
                &StreamKey::root(0),
                ExecPolicy::Sequential
            ),
            Err(Error::Infeasible { .. })
        ));
    }
}
