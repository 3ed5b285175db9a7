//! Upwind finite-difference solver for the per-state distribution functions.
//!
//! The field `F[l][k]` approximates `F_l(x_k, t)`, the probability of being in state
//! `l` with value at most `x_k`. Each step applies
//!
//! ```text
//! F'[l][k] = F[l][k] - (A_l(x_k) dt/dx) (F[l][k+ν] - F[l][k+ν-1]) + dt Σ_s Q[l][s] F[s][k]
//! ```
//!
//! with `ν = 1` where `A_l(x_k) < 0` and `ν = 0` otherwise. Outside the mesh the
//! closure is `F[l][-1] = 0` and `F[l][K] = π_l(t)`, where `π` follows `π' = Qπ`
//! with the same forward-Euler step.

use thiserror::Error;

use crate::expr::EvalError;
use crate::grid::Grid;
use crate::model::{generator_matrix, GeneratorMatrix, ModelSpec};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("drift {state} cannot be evaluated at x = {x}: {source}")]
    Drift { state: usize, x: f64, source: EvalError },
    #[error("model has {model} states but the initial condition has {initial}")]
    StateCount { model: usize, initial: usize },
    #[error("initial step of state {state} at {location} lies outside the domain [{lo}, {hi}]")]
    StepOutsideDomain {
        state: usize,
        location: f64,
        lo: f64,
        hi: f64,
    },
    #[error("invalid initial condition for state {state}: {message}")]
    InitialCondition { state: usize, message: String },
    #[error("initial probabilities sum to {0}, expected 1")]
    InitialMass(f64),
    #[error("time step {dt} exceeds the CFL bound {dt_max}")]
    CflViolation { dt: f64, dt_max: f64 },
    #[error("non-finite value at step {step}, state {state}, node {node}")]
    NonFinite { step: usize, state: usize, node: usize },
    #[error("invalid time parameters: {0}")]
    BadTime(String),
}

/// `S x K` matrix of distribution-function values at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState<T> {
    states: usize,
    nodes: usize,
    values: Vec<T>,
    t: T,
}

impl<T: Real> FieldState<T> {
    pub fn zeros(states: usize, nodes: usize, t: T) -> Self {
        FieldState {
            states,
            nodes,
            values: vec![T::zero(); states * nodes],
            t,
        }
    }

    /// Builds a state from per-state rows of equal length.
    pub fn from_rows(rows: Vec<Vec<T>>, t: T) -> Self {
        let states = rows.len();
        let nodes = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == nodes), "ragged field rows");
        FieldState {
            states,
            nodes,
            values: rows.into_iter().flatten().collect(),
            t,
        }
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn time(&self) -> T {
        self.t
    }

    #[inline]
    pub fn get(&self, s: usize, k: usize) -> T {
        self.values[s * self.nodes + k]
    }

    pub fn row(&self, s: usize) -> &[T] {
        &self.values[s * self.nodes..(s + 1) * self.nodes]
    }

    pub fn row_mut(&mut self, s: usize) -> &mut [T] {
        &mut self.values[s * self.nodes..(s + 1) * self.nodes]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

/// Per-state probabilities `π_s(t)`, the right-boundary data of the field.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalState<T> {
    pub probs: Vec<T>,
    pub t: T,
}

impl<T: Real> MarginalState<T> {
    pub fn total(&self) -> T {
        self.probs.iter().copied().sum()
    }
}

/// A jump of height `weight` at `location` in a state's initial distribution function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step<T> {
    pub weight: T,
    pub location: T,
}

/// Tabulated, linearly interpolated distribution function; constant beyond the ends.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfTable<T> {
    points: Vec<(T, T)>,
}

impl<T: Real> CdfTable<T> {
    /// Requires strictly increasing abscissae and non-negative, non-decreasing values
    /// starting at 0.
    pub fn new(points: Vec<(T, T)>) -> Result<Self, String> {
        if points.len() < 2 {
            return Err("a CDF table needs at least two points".into());
        }
        if points[0].1 != T::zero() {
            return Err(format!("table must start at 0, starts at {}", points[0].1));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(format!("abscissae not increasing at {}", w[1].0));
            }
            if !(w[1].1 >= w[0].1) {
                return Err(format!("values decrease at {}", w[1].0));
            }
        }
        if !points.iter().all(|&(x, f)| x.is_finite() && f.is_finite()) {
            return Err("non-finite table entry".into());
        }
        Ok(CdfTable { points })
    }

    pub fn points(&self) -> &[(T, T)] {
        &self.points
    }

    pub fn eval(&self, x: T) -> T {
        let pts = &self.points;
        if x <= pts[0].0 {
            return pts[0].1;
        }
        let last = pts[pts.len() - 1];
        if x >= last.0 {
            return last.1;
        }
        let i = pts.partition_point(|p| p.0 <= x);
        let (x0, f0) = pts[i - 1];
        let (x1, f1) = pts[i];
        f0 + (f1 - f0) * (x - x0) / (x1 - x0)
    }

    pub fn total(&self) -> T {
        self.points[self.points.len() - 1].1
    }

    /// Smallest `x` with `eval(x) = level`, for `0 < level <= total`.
    pub fn quantile(&self, level: T) -> T {
        let pts = &self.points;
        let i = pts.partition_point(|p| p.1 < level).clamp(1, pts.len() - 1);
        let (x0, f0) = pts[i - 1];
        let (x1, f1) = pts[i];
        if f1 == f0 {
            x1
        } else {
            x0 + (x1 - x0) * (level - f0) / (f1 - f0)
        }
    }
}

/// Initial distribution function of one state: steps plus an optional table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StateInitial<T> {
    pub steps: Vec<Step<T>>,
    pub table: Option<CdfTable<T>>,
}

impl<T: Real> StateInitial<T> {
    pub fn eval(&self, x: T) -> T {
        let steps: T = self.steps.iter().filter(|s| x >= s.location).map(|s| s.weight).sum();
        steps + self.table.as_ref().map_or(T::zero(), |t| t.eval(x))
    }

    pub fn mass(&self) -> T {
        let steps: T = self.steps.iter().map(|s| s.weight).sum();
        steps + self.table.as_ref().map_or(T::zero(), CdfTable::total)
    }
}

/// Cauchy data for every state.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialCondition<T> {
    pub states: Vec<StateInitial<T>>,
}

impl<T: Real> InitialCondition<T> {
    /// All mass at `x0`, split evenly over `states` states.
    pub fn riemann(states: usize, x0: T) -> Self {
        let w = T::one() / T::from_usize_lossy(states);
        InitialCondition {
            states: (0..states)
                .map(|_| StateInitial {
                    steps: vec![Step {
                        weight: w,
                        location: x0,
                    }],
                    table: None,
                })
                .collect(),
        }
    }

    /// The same tabulated CDF scaled by `weights[s]` in each state.
    pub fn tabulated(table: &CdfTable<T>, weights: &[T]) -> Self {
        InitialCondition {
            states: weights
                .iter()
                .map(|&w| StateInitial {
                    steps: Vec::new(),
                    table: Some(CdfTable {
                        points: table.points.iter().map(|&(x, f)| (x, f * w)).collect(),
                    }),
                })
                .collect(),
        }
    }
}

/// Builds the discrete field and `π(0)` from Cauchy data.
pub fn init_cauchy<T: Real>(
    spec: &ModelSpec<T>,
    grid: &Grid<T>,
    ic: &InitialCondition<T>,
) -> Result<(FieldState<T>, MarginalState<T>), SolveError> {
    let s_n = spec.states();
    if ic.states.len() != s_n {
        return Err(SolveError::StateCount {
            model: s_n,
            initial: ic.states.len(),
        });
    }
    let dom = grid.domain();
    for (s, st) in ic.states.iter().enumerate() {
        for step in &st.steps {
            if !dom.contains(step.location) {
                return Err(SolveError::StepOutsideDomain {
                    state: s,
                    location: step.location.as_f64(),
                    lo: dom.lo.as_f64(),
                    hi: dom.hi.as_f64(),
                });
            }
            if !(step.weight >= T::zero()) {
                return Err(SolveError::InitialCondition {
                    state: s,
                    message: format!("negative weight {}", step.weight),
                });
            }
        }
    }
    let mut field = FieldState::zeros(s_n, grid.len(), T::zero());
    for (s, st) in ic.states.iter().enumerate() {
        for (k, v) in field.row_mut(s).iter_mut().enumerate() {
            *v = st.eval(grid.node(k));
        }
    }
    let probs: Vec<T> = (0..s_n).map(|s| field.get(s, grid.len() - 1)).collect();
    let marginal = MarginalState { probs, t: T::zero() };
    let total = marginal.total();
    if !((total - T::one()).abs() <= T::lit(1e-9).max(T::epsilon() * T::lit(64.0))) {
        return Err(SolveError::InitialMass(total.as_f64()));
    }
    Ok((field, marginal))
}

/// Ingredients and value of the explicit time-step bound
/// `dt_max = 1 / (M/dx + max_l μ_l (1 - q_ll))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CflBound<T> {
    /// `M = max_{l,k} |A_l(x_k)|`.
    pub max_drift: T,
    pub dx: T,
    pub max_exit_rate: T,
    /// `None` when nothing moves and nothing switches.
    pub dt_max: Option<T>,
}

impl<T: Real> CflBound<T> {
    fn new(max_drift: T, dx: T, max_exit_rate: T) -> Self {
        let denom = max_drift / dx + max_exit_rate;
        let dt_max = (denom > T::zero()).then(|| T::one() / denom);
        CflBound {
            max_drift,
            dx,
            max_exit_rate,
            dt_max,
        }
    }

    /// Whether `dt` keeps every coefficient of the update non-negative.
    pub fn admits(&self, dt: T) -> bool {
        match self.dt_max {
            None => true,
            Some(m) => dt <= m * (T::one() + T::epsilon() * T::lit(4.0)),
        }
    }
}

/// Whether a step beyond the CFL bound is refused or carried out anyway.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CflPolicy {
    #[default]
    Enforce,
    AllowViolation,
}

/// Drift values on the mesh, the generator and the CFL bound for one (model, grid) pair.
#[derive(Debug, Clone)]
pub struct Stepper<T> {
    grid: Grid<T>,
    generator: GeneratorMatrix<T>,
    drift: Vec<T>,
    cfl: CflBound<T>,
}

impl<T: Real> Stepper<T> {
    pub fn new(spec: &ModelSpec<T>, grid: &Grid<T>) -> Result<Self, SolveError> {
        let k_n = grid.len();
        let mut drift = Vec::with_capacity(spec.states() * k_n);
        for (state, d) in spec.drifts.iter().enumerate() {
            for x in grid.nodes() {
                let a = d.eval(x).map_err(|source| SolveError::Drift {
                    state,
                    x: x.as_f64(),
                    source,
                })?;
                drift.push(a);
            }
        }
        let generator = generator_matrix(spec);
        let max_drift = drift.iter().fold(T::zero(), |m, a| m.max(a.abs()));
        let cfl = CflBound::new(max_drift, grid.dx(), generator.max_exit_rate());
        Ok(Stepper {
            grid: *grid,
            generator,
            drift,
            cfl,
        })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn generator(&self) -> &GeneratorMatrix<T> {
        &self.generator
    }

    pub fn cfl(&self) -> CflBound<T> {
        self.cfl
    }

    pub fn states(&self) -> usize {
        self.generator.len()
    }

    #[inline]
    pub fn drift_at(&self, l: usize, k: usize) -> T {
        self.drift[l * self.grid.len() + k]
    }

    fn check_dt(&self, dt: T, policy: CflPolicy) -> Result<(), SolveError> {
        if policy == CflPolicy::Enforce && !self.cfl.admits(dt) {
            return Err(SolveError::CflViolation {
                dt: dt.as_f64(),
                dt_max: self.cfl.dt_max.map_or(f64::INFINITY, Real::as_f64),
            });
        }
        Ok(())
    }

    /// One upwind step of length `dt` using `marginal` (at the field's time) as right-boundary data.
    pub fn upwind_step(
        &self,
        state: &FieldState<T>,
        marginal: &MarginalState<T>,
        dt: T,
        policy: CflPolicy,
    ) -> Result<FieldState<T>, SolveError> {
        self.check_dt(dt, policy)?;
        let mut out = FieldState::zeros(state.states, state.nodes, state.t + dt);
        self.advance_into(&state.values, &marginal.probs, dt, &mut out.values);
        Ok(out)
    }

    fn advance_into(&self, src: &[T], pi: &[T], dt: T, dst: &mut [T]) {
        let k_n = self.grid.len();
        let dx = self.grid.dx();
        for l in 0..self.states() {
            let row = &src[l * k_n..(l + 1) * k_n];
            let drift = &self.drift[l * k_n..(l + 1) * k_n];
            let qrow = self.generator.row(l);
            for k in 0..k_n {
                let a = drift[k];
                let f = row[k];
                let diff = if a < T::zero() {
                    let next = if k + 1 < k_n { row[k + 1] } else { pi[l] };
                    next - f
                } else {
                    let prev = if k > 0 { row[k - 1] } else { T::zero() };
                    f - prev
                };
                let mut coupling = T::zero();
                for (s, &q) in qrow.iter().enumerate() {
                    coupling = coupling + q * src[s * k_n + k];
                }
                dst[l * k_n + k] = f - a * dt / dx * diff + dt * coupling;
            }
        }
    }

    /// Artificial diffusion of the scheme at node `k` of state `l`.
    pub fn diffusion_coefficient(&self, dt: T, l: usize, k: usize) -> T {
        numerical_diffusion(self.drift_at(l, k), self.grid.dx(), dt)
    }
}

/// Maximum admissible time step for `spec` on `grid`.
pub fn cfl_max_dt<T: Real>(spec: &ModelSpec<T>, grid: &Grid<T>) -> Result<CflBound<T>, SolveError> {
    Stepper::new(spec, grid).map(|s| s.cfl)
}

/// `π' = (I + dt Q) π`.
pub fn marginal_step<T: Real>(pi: &MarginalState<T>, q: &GeneratorMatrix<T>, dt: T) -> MarginalState<T> {
    let mut probs = Vec::with_capacity(pi.probs.len());
    for l in 0..q.len() {
        let mut coupling = T::zero();
        for (s, &qv) in q.row(l).iter().enumerate() {
            coupling = coupling + qv * pi.probs[s];
        }
        probs.push(pi.probs[l] + dt * coupling);
    }
    MarginalState { probs, t: pi.t + dt }
}

/// Coefficient `|A| dx/2 (1 - |A| dt/dx)` of the leading error term of the scheme.
pub fn numerical_diffusion<T: Real>(drift: T, dx: T, dt: T) -> T {
    let a = drift.abs();
    a * dx / T::lit(2.0) * (T::one() - a * dt / dx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions<T> {
    pub horizon: T,
    pub dt: T,
    /// Extra output times in `[0, horizon]`; the final time is always included.
    pub snapshots: Vec<T>,
    pub policy: CflPolicy,
}

impl<T: Real> SolveOptions<T> {
    pub fn new(horizon: T, dt: T) -> Self {
        SolveOptions {
            horizon,
            dt,
            snapshots: Vec::new(),
            policy: CflPolicy::Enforce,
        }
    }

    pub fn with_snapshots(mut self, times: Vec<T>) -> Self {
        self.snapshots = times;
        self
    }

    pub fn allow_cfl_violation(mut self) -> Self {
        self.policy = CflPolicy::AllowViolation;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    pub field: FieldState<T>,
    pub marginal: MarginalState<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    /// In increasing time order; the last one is at the horizon.
    pub snapshots: Vec<Snapshot<T>>,
    pub steps: usize,
    /// `Σ_s F[s][0]` of the initial data.
    pub initial_left_mass: T,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> &Snapshot<T> {
        self.snapshots
            .last()
            .expect("trajectory always holds the final snapshot")
    }
}

/// Number of steps of nominal length `dt` needed to cover `span`, the last one shortened.
fn steps_to_cover<T: Real>(span: T, dt: T) -> usize {
    if span <= T::zero() {
        return 0;
    }
    let ratio = span / dt;
    let mut n = ratio.ceil().to_usize().unwrap_or(usize::MAX).max(1);
    // a ratio that lands a hair above an integer through rounding
    if n > 1 && T::from_usize_lossy(n - 1) * dt >= span * (T::one() - T::epsilon() * T::lit(16.0)) {
        n -= 1;
    }
    n
}

/// Integrates from the Cauchy data to `opts.horizon`, stopping exactly on every snapshot time.
pub fn solve<T: Real>(
    spec: &ModelSpec<T>,
    grid: &Grid<T>,
    ic: &InitialCondition<T>,
    opts: &SolveOptions<T>,
) -> Result<Trajectory<T>, SolveError> {
    let horizon = opts.horizon;
    if !(horizon >= T::zero()) || !horizon.is_finite() {
        return Err(SolveError::BadTime(format!(
            "horizon {horizon} must be finite and >= 0"
        )));
    }
    if !(opts.dt > T::zero()) || !opts.dt.is_finite() {
        return Err(SolveError::BadTime(format!("time step {} must be positive", opts.dt)));
    }
    let mut targets = opts.snapshots.clone();
    if let Some(bad) = targets.iter().find(|&&t| !(t >= T::zero() && t <= horizon)) {
        return Err(SolveError::BadTime(format!(
            "snapshot time {bad} outside [0, {horizon}]"
        )));
    }
    targets.push(horizon);
    targets.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
    targets.dedup();

    let stepper = Stepper::new(spec, grid)?;
    stepper.check_dt(opts.dt, opts.policy)?;
    let (field, mut marginal) = init_cauchy(spec, grid, ic)?;
    let initial_left_mass = (0..field.states()).map(|s| field.get(s, 0)).sum();

    let mut current = field;
    let mut scratch = current.clone();
    let mut snapshots = Vec::with_capacity(targets.len());
    let mut steps = 0usize;
    for target in targets {
        let n = steps_to_cover(target - current.t, opts.dt);
        let start = current.t;
        for i in 0..n {
            let dt = if i + 1 == n {
                target - (start + T::from_usize_lossy(n - 1) * opts.dt)
            } else {
                opts.dt
            };
            stepper.advance_into(&current.values, &marginal.probs, dt, &mut scratch.values);
            marginal = marginal_step(&marginal, &stepper.generator, dt);
            std::mem::swap(&mut current, &mut scratch);
            current.t = if i + 1 == n {
                target
            } else {
                start + T::from_usize_lossy(i + 1) * opts.dt
            };
            marginal.t = current.t;
            steps += 1;
            if let Some(pos) = current.values.iter().position(|v| !v.is_finite()) {
                return Err(SolveError::NonFinite {
                    step: steps,
                    state: pos / current.nodes,
                    node: pos % current.nodes,
                });
            }
        }
        snapshots.push(Snapshot {
            field: current.clone(),
            marginal: marginal.clone(),
        });
    }
    Ok(Trajectory {
        snapshots,
        steps,
        initial_left_mass,
    })
}

/// `𝓕_k = Σ_s F[s][k]`.
pub fn total_cdf<T: Real>(state: &FieldState<T>) -> Vec<T> {
    (0..state.nodes)
        .map(|k| (0..state.states).map(|s| state.get(s, k)).sum())
        .collect()
}

/// Backward-difference densities per state and summed over states.
#[derive(Debug, Clone, PartialEq)]
pub struct Density<T> {
    pub per_state: FieldState<T>,
    pub total: Vec<T>,
}

pub fn density<T: Real>(state: &FieldState<T>, dx: T) -> Density<T> {
    let mut per_state = FieldState::zeros(state.states, state.nodes, state.t);
    for s in 0..state.states {
        let row = state.row(s);
        let out = per_state.row_mut(s);
        let mut prev = T::zero();
        for (k, &f) in row.iter().enumerate() {
            out[k] = (f - prev) / dx;
            prev = f;
        }
    }
    let total = total_cdf(&per_state);
    Density { per_state, total }
}
