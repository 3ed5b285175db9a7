//! Direct simulation of sample paths: exponential holding times, jumps drawn from the
//! jump matrix, deterministic flow in between.
//!
//! Path `m` of an ensemble draws from its own ChaCha8 stream `(seed, m)`, so an
//! ensemble does not depend on how paths are spread over threads.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::expr::{DriftExpr, EvalError};
use crate::model::{JumpMatrix, ModelSpec};
use crate::scalar::Real;
use crate::solver::InitialCondition;

/// Name recorded in ensemble provenance.
pub const GENERATOR_NAME: &str = "chacha8-stream";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum McError {
    #[error("drift of state {state} failed during integration: {source}")]
    Flow { state: usize, source: EvalError },
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error("could not build thread pool: {0}")]
    ThreadPool(String),
}

/// The RNG stream used for path `index` of an ensemble seeded with `seed`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform draw on `(0, 1]`.
fn unit_open_closed<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Inverse-CDF holding time `-ln(u)/rate`; infinite for a zero rate.
pub fn waiting_time_from_uniform<T: Real>(u: T, rate: T) -> T {
    if rate == T::zero() {
        T::infinity()
    } else {
        -u.ln() / rate
    }
}

pub fn sample_waiting_time<R: Rng + ?Sized, T: Real>(rng: &mut R, rate: T) -> T {
    waiting_time_from_uniform(T::lit(unit_open_closed(rng)), rate)
}

/// Next state after a switch out of `from`, by walking column `from` in index order.
pub fn sample_next_state<R: Rng + ?Sized, T: Real>(rng: &mut R, jump: &JumpMatrix<T>, from: usize) -> usize {
    let u = T::lit(rng.random::<f64>());
    let mut acc = T::zero();
    let mut last_positive = from;
    for (i, p) in jump.column(from).enumerate() {
        if p > T::zero() {
            acc = acc + p;
            last_positive = i;
            if u < acc {
                return i;
            }
        }
    }
    // round-off left the column sum a hair below u
    last_positive
}

/// Deterministic flow of one drift law over a duration.
#[derive(Debug, Clone)]
enum Flow {
    Affine { slope: f64, intercept: f64 },
    Numeric(DriftExpr),
}

impl Flow {
    fn of(expr: &DriftExpr) -> Flow {
        match expr.affine() {
            Some(a) => Flow::Affine {
                slope: a.slope,
                intercept: a.intercept,
            },
            None => Flow::Numeric(expr.clone()),
        }
    }

    fn advance<T: Real>(&self, x0: T, tau: T, h: T) -> Result<T, EvalError> {
        match self {
            Flow::Affine { slope, intercept } => {
                let (a, b) = (T::lit(*slope), T::lit(*intercept));
                let x = if a == T::zero() {
                    x0 + b * tau
                } else {
                    // x0 + (a x0 + b)(e^{a τ} - 1)/a, exact solution of x' = a x + b
                    x0 + (a * x0 + b) * (a * tau).exp_m1() / a
                };
                if x.is_finite() {
                    Ok(x)
                } else {
                    Err(EvalError::NonFinite)
                }
            }
            Flow::Numeric(e) => rk4(e, x0, tau, h),
        }
    }
}

/// Classical fourth-order Runge-Kutta with fixed substep `h`, the last substep shortened.
pub fn rk4<T: Real>(expr: &DriftExpr, x0: T, tau: T, h: T) -> Result<T, EvalError> {
    if tau <= T::zero() {
        return Ok(x0);
    }
    let n = (tau / h).ceil().to_usize().unwrap_or(usize::MAX).max(1);
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    let mut x = x0;
    for i in 0..n {
        let step = if i + 1 == n {
            tau - T::from_usize_lossy(n - 1) * h
        } else {
            h
        };
        let k1 = expr.eval(x)?;
        let k2 = expr.eval(x + step / two * k1)?;
        let k3 = expr.eval(x + step / two * k2)?;
        let k4 = expr.eval(x + step * k3)?;
        x = x + step / six * (k1 + two * k2 + two * k3 + k4);
        if !x.is_finite() {
            return Err(EvalError::NonFinite);
        }
    }
    Ok(x)
}

/// Solves `x' = A(x)` for a duration `tau`: closed form for affine drifts, RK4 otherwise.
pub fn integrate_drift<T: Real>(expr: &DriftExpr, x0: T, tau: T, h: T) -> Result<T, EvalError> {
    Flow::of(expr).advance(x0, tau, h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathConfig<T> {
    pub paths: usize,
    pub horizon: T,
    pub seed: u64,
    /// RK4 substep for non-affine drifts.
    pub substep: T,
}

impl<T: Real> PathConfig<T> {
    pub fn new(paths: usize, horizon: T, seed: u64) -> Self {
        PathConfig {
            paths,
            horizon,
            seed,
            substep: T::lit(1e-2),
        }
    }

    fn validate(&self) -> Result<(), McError> {
        if self.paths == 0 {
            return Err(McError::Config("path count must be >= 1".into()));
        }
        if !(self.horizon >= T::zero()) || !self.horizon.is_finite() {
            return Err(McError::Config(format!(
                "horizon {} must be finite and >= 0",
                self.horizon
            )));
        }
        if !(self.substep > T::zero()) {
            return Err(McError::Config(format!("substep {} must be positive", self.substep)));
        }
        Ok(())
    }
}

enum Component<T> {
    Point(T),
    Table(crate::solver::CdfTable<T>),
}

/// Draws `(x0, s0)` from the same Cauchy data the solver starts from.
pub struct InitialSampler<T> {
    state_probs: Vec<T>,
    // per state: (weight, component)
    components: Vec<Vec<(T, Component<T>)>>,
}

impl<T: Real> InitialSampler<T> {
    pub fn new(ic: &InitialCondition<T>) -> Result<Self, McError> {
        let mut state_probs = Vec::with_capacity(ic.states.len());
        let mut components = Vec::with_capacity(ic.states.len());
        for st in &ic.states {
            let mut comps = Vec::new();
            for step in &st.steps {
                if step.weight > T::zero() {
                    comps.push((step.weight, Component::Point(step.location)));
                }
            }
            if let Some(t) = &st.table {
                if t.total() > T::zero() {
                    comps.push((t.total(), Component::Table(t.clone())));
                }
            }
            state_probs.push(st.mass());
            components.push(comps);
        }
        let total: T = state_probs.iter().copied().sum();
        if !(total > T::zero()) {
            return Err(McError::Config("initial condition carries no probability".into()));
        }
        Ok(InitialSampler {
            state_probs,
            components,
        })
    }

    fn pick<R: Rng + ?Sized>(rng: &mut R, weights: impl Iterator<Item = T> + Clone) -> usize {
        let total: T = weights.clone().sum();
        let u = T::lit(rng.random::<f64>()) * total;
        let mut acc = T::zero();
        let mut last = 0;
        for (i, w) in weights.enumerate() {
            if w > T::zero() {
                acc = acc + w;
                last = i;
                if u < acc {
                    return i;
                }
            }
        }
        last
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (T, usize) {
        let s = Self::pick(rng, self.state_probs.iter().copied());
        let comps = &self.components[s];
        let c = Self::pick(rng, comps.iter().map(|c| c.0));
        let x = match &comps[c].1 {
            Component::Point(x) => *x,
            Component::Table(t) => t.quantile(T::lit(unit_open_closed(rng)) * t.total()),
        };
        (x, s)
    }
}

/// Simulates paths of one model.
pub struct PathSimulator<'a, T> {
    spec: &'a ModelSpec<T>,
    flows: Vec<Flow>,
    substep: T,
}

impl<'a, T: Real> PathSimulator<'a, T> {
    pub fn new(spec: &'a ModelSpec<T>, substep: T) -> Self {
        PathSimulator {
            spec,
            flows: spec.drifts.iter().map(Flow::of).collect(),
            substep,
        }
    }

    /// Value and state at `horizon` of a path started at `(x0, s0)`. A switch drawn to
    /// happen exactly at the horizon is not applied.
    pub fn simulate_path<R: Rng + ?Sized>(
        &self,
        x0: T,
        s0: usize,
        horizon: T,
        rng: &mut R,
    ) -> Result<(T, usize), McError> {
        let mut t = T::zero();
        let mut x = x0;
        let mut s = s0;
        loop {
            let tau = sample_waiting_time(rng, self.spec.rates[s]);
            let flow = |x, d| {
                self.flows[s]
                    .advance(x, d, self.substep)
                    .map_err(|source| McError::Flow { state: s, source })
            };
            if tau >= horizon - t {
                x = flow(x, horizon - t)?;
                return Ok((x, s));
            }
            x = flow(x, tau)?;
            t = t + tau;
            s = sample_next_state(rng, &self.spec.jump, s);
        }
    }
}

pub fn simulate_path<R: Rng + ?Sized, T: Real>(
    spec: &ModelSpec<T>,
    x0: T,
    s0: usize,
    horizon: T,
    substep: T,
    rng: &mut R,
) -> Result<(T, usize), McError> {
    PathSimulator::new(spec, substep).simulate_path(x0, s0, horizon, rng)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub seed: u64,
    pub paths: usize,
    pub horizon: f64,
    pub generator: &'static str,
}

/// Endpoints `X(T)` sorted ascending, with the state each path ended in.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleEnsemble<T> {
    pub endpoints: Vec<T>,
    pub end_states: Vec<usize>,
    pub provenance: Provenance,
}

impl<T: Real> SampleEnsemble<T> {
    pub fn len(&self) -> usize {
        self.endpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.endpoints.is_empty()
    }

    /// Fraction of endpoints `<= x`.
    pub fn ecdf(&self, x: T) -> T {
        let below = self.endpoints.partition_point(|&e| e <= x);
        T::from_usize_lossy(below) / T::from_usize_lossy(self.endpoints.len())
    }

    /// Probability density per bin `[e_i, e_{i+1})` (last bin closed); samples outside
    /// the edges are not counted.
    pub fn histogram(&self, edges: &[T]) -> Result<Vec<T>, McError> {
        if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(McError::Config(
                "histogram edges must be increasing, at least two".into(),
            ));
        }
        let bins = edges.len() - 1;
        let mut counts = vec![0usize; bins];
        for &x in &self.endpoints {
            if x < edges[0] || x > edges[bins] {
                continue;
            }
            let i = (edges.partition_point(|&e| e <= x) - 1).min(bins - 1);
            counts[i] += 1;
        }
        let n = T::from_usize_lossy(self.endpoints.len());
        Ok(counts
            .iter()
            .zip(edges.windows(2))
            .map(|(&c, w)| T::from_usize_lossy(c) / (n * (w[1] - w[0])))
            .collect())
    }

    /// CSV `endpoint,end_state` preceded by a provenance comment line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let p = &self.provenance;
        writeln!(
            w,
            "# seed={} N={} T={} generator={}",
            p.seed, p.paths, p.horizon, p.generator
        )?;
        writeln!(w, "endpoint,end_state")?;
        for (x, s) in self.endpoints.iter().zip(&self.end_states) {
            writeln!(w, "{:.16e},{}", x.as_f64(), s)?;
        }
        Ok(())
    }
}

/// Runs `cfg.paths` independent paths on the current rayon pool.
pub fn run_ensemble<T: Real>(
    spec: &ModelSpec<T>,
    ic: &InitialCondition<T>,
    cfg: &PathConfig<T>,
) -> Result<SampleEnsemble<T>, McError> {
    cfg.validate()?;
    if ic.states.len() != spec.states() {
        return Err(McError::Config(format!(
            "initial condition has {} states, model has {}",
            ic.states.len(),
            spec.states()
        )));
    }
    let sampler = InitialSampler::new(ic)?;
    let sim = PathSimulator::new(spec, cfg.substep);
    let mut pairs = (0..cfg.paths)
        .into_par_iter()
        .map(|m| {
            let mut rng = path_rng(cfg.seed, m as u64);
            let (x0, s0) = sampler.sample(&mut rng);
            sim.simulate_path(x0, s0, cfg.horizon, &mut rng)
        })
        .collect::<Result<Vec<_>, _>>()?;
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite endpoints").then(a.1.cmp(&b.1)));
    let (endpoints, end_states) = pairs.into_iter().unzip();
    Ok(SampleEnsemble {
        endpoints,
        end_states,
        provenance: Provenance {
            seed: cfg.seed,
            paths: cfg.paths,
            horizon: cfg.horizon.as_f64(),
            generator: GENERATOR_NAME,
        },
    })
}

/// [`run_ensemble`] on a dedicated pool of `threads` workers.
pub fn run_ensemble_with_threads<T: Real>(
    spec: &ModelSpec<T>,
    ic: &InitialCondition<T>,
    cfg: &PathConfig<T>,
    threads: usize,
) -> Result<SampleEnsemble<T>, McError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| McError::ThreadPool(e.to_string()))?;
    pool.install(|| run_ensemble(spec, ic, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::JumpMatrix;

    fn sec4(mu: f64, gamma: f64) -> ModelSpec<f64> {
        let d: Vec<String> = [1.0, -1.0, 2.0, -2.0]
            .iter()
            .map(|w| format!("-{gamma}*x + {w}"))
            .collect();
        let r: Vec<&str> = d.iter().map(String::as_str).collect();
        ModelSpec::from_strs(&r, vec![mu; 4], JumpMatrix::uniform(4)).unwrap()
    }

    #[test]
    fn waiting_time_examples() {
        let mut rng = path_rng(1, 0);
        assert_eq!(sample_waiting_time(&mut rng, 0.0f64), f64::INFINITY);
        assert!((waiting_time_from_uniform((-1.0f64).exp(), 2.0) - 0.5).abs() < 1e-15);
        assert_eq!(waiting_time_from_uniform(1.0f64, 3.0), 0.0);
    }

    #[test]
    fn waiting_time_mean() {
        let mut rng = path_rng(7, 0);
        let n = 1_000_000;
        let mu = 4.0;
        let mean: f64 = (0..n).map(|_| sample_waiting_time(&mut rng, mu)).sum::<f64>() / n as f64;
        // standard error 1/(mu sqrt n) = 2.5e-4
        assert!((mean - 0.25).abs() < 4.0 * 0.25 / (n as f64).sqrt(), "{mean}");
        assert!((mean - 0.25).abs() < 1e-3);
    }

    #[test]
    fn next_state_examples() {
        let mut rng = path_rng(3, 0);
        let rows = vec![
            vec![0.0, 0.0, 0.0, 0.0],
            vec![1.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ];
        let q = JumpMatrix::from_rows(rows);
        for _ in 0..1000 {
            assert_eq!(sample_next_state(&mut rng, &q, 0), 1);
            assert_eq!(sample_next_state(&mut rng, &q, 2), 2);
        }
        let u = JumpMatrix::<f64>::uniform(4);
        let mut counts = [0usize; 4];
        let n = 100_000;
        for _ in 0..n {
            counts[sample_next_state(&mut rng, &u, 1)] += 1;
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 0.25).abs() < 0.01, "{counts:?}");
        }
    }

    #[test]
    fn integrate_examples() {
        let d = DriftExpr::parse("-x+1").unwrap();
        for tau in [0.0, 0.3, 10.0] {
            assert_eq!(integrate_drift(&d, 1.0, tau, 0.01).unwrap(), 1.0);
        }
        let d = DriftExpr::parse("-0.001*x + 2").unwrap();
        let x = integrate_drift(&d, 0.0, 1000.0, 0.01).unwrap();
        assert!((x - 2000.0 * (1.0 - (-1.0f64).exp())).abs() < 1e-9);
        assert!((x - 1264.24).abs() < 0.01);
        let drift = DriftExpr::parse("3").unwrap();
        assert_eq!(integrate_drift(&drift, 1.0, 2.0, 0.1).unwrap(), 7.0);
        let rk = rk4(&d, 0.0, 1000.0, 10.0).unwrap();
        assert!((rk - x).abs() < 1e-6);
    }

    #[test]
    fn rk4_on_nonlinear_drift() {
        // x' = -tanh(x) has sinh(x(t)) = sinh(x0) e^{-t}
        let d = DriftExpr::parse("-tanh(x)").unwrap();
        let x = integrate_drift(&d, 2.0, 1.5, 1e-2).unwrap();
        let exact = (2.0f64.sinh() * (-1.5f64).exp()).asinh();
        assert!((x - exact).abs() < 1e-9);
        let blow = DriftExpr::parse("x^2").unwrap();
        assert!(integrate_drift(&blow, 1.0, 2.0, 1e-2).is_err());
    }

    #[test]
    fn deterministic_limit() {
        let spec = sec4(0.0, 0.1);
        let mut rng = path_rng(0, 0);
        let (x, s) = simulate_path(&spec, 0.0, 2, 5.0, 1e-2, &mut rng).unwrap();
        assert_eq!(s, 2);
        assert!((x - 20.0 * (1.0 - (-0.5f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn paths_stay_in_invariant_domain() {
        let spec = sec4(4.0, 1e-3);
        let sim = PathSimulator::new(&spec, 1e-2);
        let mut rng = path_rng(11, 0);
        for _ in 0..2000 {
            let (x, _) = sim.simulate_path(0.0, 0, 500.0, &mut rng).unwrap();
            assert!((-2000.0..=2000.0).contains(&x));
        }
    }

    #[test]
    fn same_stream_same_path() {
        let spec = sec4(0.2, 0.1);
        let a = simulate_path(&spec, 0.0, 1, 20.0, 1e-2, &mut path_rng(5, 9)).unwrap();
        let b = simulate_path(&spec, 0.0, 1, 20.0, 1e-2, &mut path_rng(5, 9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn telegraph_occupation_is_balanced() {
        let spec = ModelSpec::from_strs(&["-x+1", "-x-1"], vec![1.0, 1.0], JumpMatrix::swap2()).unwrap();
        let ic = InitialCondition::riemann(2, 0.0);
        let n = 40_000;
        let e = run_ensemble(&spec, &ic, &PathConfig::new(n, 10.0, 99)).unwrap();
        let frac = e.end_states.iter().filter(|&&s| s == 0).count() as f64 / n as f64;
        assert!((frac - 0.5).abs() < 4.0 * 0.5 / (n as f64).sqrt(), "{frac}");
        assert!(e.endpoints.iter().all(|x| (-1.0..=1.0).contains(x)));
    }

    fn simulate_indexed<T: Real>(
        spec: &ModelSpec<T>,
        sampler: &InitialSampler<T>,
        cfg: &PathConfig<T>,
        m: usize,
    ) -> Result<(T, usize), McError> {
        let mut rng = path_rng(cfg.seed, m as u64);
        let (x0, s0) = sampler.sample(&mut rng);
        PathSimulator::new(spec, cfg.substep).simulate_path(x0, s0, cfg.horizon, &mut rng)
    }

    #[test]
    fn single_path_ensemble_matches_stream_zero() {
        let spec = sec4(0.2, 0.1);
        let ic = InitialCondition::riemann(4, 0.0);
        let cfg = PathConfig::new(1, 7.0, 1234);
        let e = run_ensemble(&spec, &ic, &cfg).unwrap();
        let sampler = InitialSampler::new(&ic).unwrap();
        let direct = simulate_indexed(&spec, &sampler, &cfg, 0).unwrap();
        assert_eq!((e.endpoints[0], e.end_states[0]), direct);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let spec = sec4(0.2, 0.1);
        let ic = InitialCondition::riemann(4, 0.0);
        let cfg = PathConfig::new(5000, 8.0, 42);
        let a = run_ensemble_with_threads(&spec, &ic, &cfg, 1).unwrap();
        let b = run_ensemble_with_threads(&spec, &ic, &cfg, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.endpoints.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sampler_follows_table() {
        let table = crate::solver::CdfTable::new(vec![(0.0, 0.0), (1.0, 1.0)]).unwrap();
        let ic = InitialCondition::tabulated(&table, &[0.5, 0.5]);
        let sampler = InitialSampler::new(&ic).unwrap();
        let mut rng = path_rng(8, 0);
        let n = 20_000;
        let draws: Vec<(f64, usize)> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
        let mean = draws.iter().map(|d| d.0).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.01);
        assert!(draws.iter().all(|d| (0.0..=1.0).contains(&d.0)));
    }

    fn ensemble(xs: &[f64]) -> SampleEnsemble<f64> {
        SampleEnsemble {
            endpoints: xs.to_vec(),
            end_states: vec![0; xs.len()],
            provenance: Provenance {
                seed: 0,
                paths: xs.len(),
                horizon: 0.0,
                generator: GENERATOR_NAME,
            },
        }
    }

    #[test]
    fn ecdf_examples() {
        let e = ensemble(&[0.0]);
        assert_eq!((e.ecdf(-1e-9), e.ecdf(0.0), e.ecdf(5.0)), (0.0, 1.0, 1.0));
        let e = ensemble(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.ecdf(2.5), 0.5);
        assert_eq!(e.ecdf(0.0), 0.0);
        assert_eq!(e.ecdf(4.0), 1.0);
    }

    #[test]
    fn histogram_integrates_to_one() {
        let e = ensemble(&[0.1, 0.2, 0.6, 1.0]);
        let edges = [0.0, 0.5, 1.0];
        let h = e.histogram(&edges).unwrap();
        assert_eq!(h, vec![1.0, 1.0]);
        let mass: f64 = h.iter().zip(edges.windows(2)).map(|(d, w)| d * (w[1] - w[0])).sum();
        assert_eq!(mass, 1.0);
        let h = e.histogram(&[0.0, 0.25, 0.5, 0.75, 1.0]).unwrap();
        assert_eq!(h, vec![2.0, 0.0, 1.0, 1.0]);
        assert!(e.histogram(&[1.0]).is_err());
    }

    #[test]
    fn csv_has_provenance_header() {
        let spec = sec4(0.2, 0.1);
        let e = run_ensemble(&spec, &InitialCondition::riemann(4, 0.0), &PathConfig::new(3, 1.0, 17)).unwrap();
        let mut buf = Vec::new();
        e.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# seed=17 N=3 T=1 generator=chacha8-stream");
        assert_eq!(lines[1], "endpoint,end_state");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn config_errors() {
        let spec = sec4(0.2, 0.1);
        let ic = InitialCondition::riemann(4, 0.0);
        assert!(run_ensemble(&spec, &ic, &PathConfig::new(0, 1.0, 0)).is_err());
        assert!(run_ensemble(&spec, &ic, &PathConfig::new(1, -1.0, 0)).is_err());
        assert!(run_ensemble(&spec, &InitialCondition::riemann(2, 0.0), &PathConfig::new(1, 1.0, 0)).is_err());
    }
}
