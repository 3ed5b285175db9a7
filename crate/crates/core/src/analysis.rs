//! Runnable checks of the scheme's guarantees and of solver/simulator agreement.

use std::fmt;

use thiserror::Error;

use crate::grid::Grid;
use crate::model::{GeneratorMatrix, ModelSpec};
use crate::scalar::Real;
use crate::solver::{
    cfl_max_dt, solve, total_cdf, FieldState, InitialCondition, MarginalState, SolveError, SolveOptions,
};

/// Outcome of one check, printed as
/// `CHECK <name> <PASS|FAIL> observed=<v> tol=<t> at=<loc>`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub observed: f64,
    pub tolerance: f64,
    pub location: String,
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CHECK {} {} observed={:e} tol={:e} at={}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.observed,
            self.tolerance,
            if self.location.is_empty() { "-" } else { &self.location }
        )
    }
}

/// Smallest increment `F[s][k] - F[s][k-1]` (with `F[s][-1] = 0`); passes when `>= -tol`.
pub fn check_monotone<T: Real>(state: &FieldState<T>, tol: T) -> CheckReport {
    let mut worst = f64::INFINITY;
    let mut at = (0, 0);
    for s in 0..state.states() {
        let mut prev = T::zero();
        for (k, &f) in state.row(s).iter().enumerate() {
            let d = (f - prev).as_f64();
            // NaN counts as the worst possible increment
            if d < worst || d.is_nan() {
                worst = if d.is_nan() { f64::NEG_INFINITY } else { d };
                at = (s, k);
            }
            prev = f;
        }
    }
    CheckReport {
        name: "monotone".into(),
        passed: worst >= -tol.as_f64(),
        observed: worst,
        tolerance: tol.as_f64(),
        location: format!("s={},k={}", at.0, at.1),
    }
}

/// Right-boundary total equals 1, left-boundary total keeps its initial value, and the
/// marginals still sum to 1.
pub fn check_conservation<T: Real>(
    state: &FieldState<T>,
    marginal: &MarginalState<T>,
    initial_left_mass: T,
    tol: T,
) -> CheckReport {
    let last = state.nodes() - 1;
    let right: T = (0..state.states()).map(|s| state.get(s, last)).sum();
    let left: T = (0..state.states()).map(|s| state.get(s, 0)).sum();
    let candidates = [
        ("right", (right - T::one()).abs().as_f64()),
        ("left", (left - initial_left_mass).abs().as_f64()),
        ("marginal", (marginal.total() - T::one()).abs().as_f64()),
    ];
    let (loc, observed) = candidates.into_iter().fold(("right", f64::NEG_INFINITY), |acc, c| {
        if c.1 > acc.1 || c.1.is_nan() {
            c
        } else {
            acc
        }
    });
    CheckReport {
        name: "conservation".into(),
        passed: observed <= tol.as_f64(),
        observed,
        tolerance: tol.as_f64(),
        location: loc.into(),
    }
}

/// `‖I + dt Q‖₁` (largest absolute column sum) must equal 1 to within 1e-12.
pub fn stochastic_norm_check<T: Real>(q: &GeneratorMatrix<T>, dt: T) -> CheckReport {
    let n = q.len();
    let m = q.euler_operator(dt);
    let mut norm = T::zero();
    let mut col = 0;
    for j in 0..n {
        let s: T = (0..n).map(|i| m[i * n + j].abs()).sum();
        if s > norm {
            norm = s;
            col = j;
        }
    }
    let tol = T::identity_tol();
    let observed = (norm - T::one()).abs();
    let precondition = dt * q.max_exit_rate() <= T::one() + T::epsilon() * T::lit(4.0);
    CheckReport {
        name: "stochastic_norm".into(),
        passed: precondition && observed <= tol,
        observed: observed.as_f64(),
        tolerance: tol.as_f64(),
        location: if precondition {
            format!("col={col}")
        } else {
            format!("precondition dt*max_exit={}", (dt * q.max_exit_rate()).as_f64())
        },
    }
}

/// A distribution function given by finitely many breakpoints, linear or constant in between.
pub trait PiecewiseCdf<T> {
    fn knots(&self) -> &[T];
    /// Right-continuous value at `x`.
    fn value(&self, x: T) -> T;
    fn left_limit(&self, x: T) -> T;
}

/// Nodal values read as a right-continuous step function: `F_k` on `[x_k, x_{k+1})`,
/// 0 left of the first node.
pub struct GridCdf<'a, T> {
    xs: &'a [T],
    values: &'a [T],
}

impl<'a, T: Real> GridCdf<'a, T> {
    pub fn new(xs: &'a [T], values: &'a [T]) -> Self {
        assert_eq!(xs.len(), values.len(), "one value per node");
        assert!(!xs.is_empty());
        GridCdf { xs, values }
    }
}

impl<T: Real> PiecewiseCdf<T> for GridCdf<'_, T> {
    fn knots(&self) -> &[T] {
        self.xs
    }

    fn value(&self, x: T) -> T {
        match self.xs.partition_point(|&v| v <= x) {
            0 => T::zero(),
            i => self.values[i - 1],
        }
    }

    fn left_limit(&self, x: T) -> T {
        match self.xs.partition_point(|&v| v < x) {
            0 => T::zero(),
            i => self.values[i - 1],
        }
    }
}

/// Step function of sorted samples.
pub struct EmpiricalCdf<'a, T> {
    sorted: &'a [T],
}

impl<'a, T: Real> EmpiricalCdf<'a, T> {
    pub fn new(sorted: &'a [T]) -> Self {
        assert!(!sorted.is_empty(), "empirical CDF of no samples");
        debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]), "samples must be sorted");
        EmpiricalCdf { sorted }
    }
}

impl<T: Real> PiecewiseCdf<T> for EmpiricalCdf<'_, T> {
    fn knots(&self) -> &[T] {
        self.sorted
    }

    fn value(&self, x: T) -> T {
        T::from_usize_lossy(self.sorted.partition_point(|&v| v <= x)) / T::from_usize_lossy(self.sorted.len())
    }

    fn left_limit(&self, x: T) -> T {
        T::from_usize_lossy(self.sorted.partition_point(|&v| v < x)) / T::from_usize_lossy(self.sorted.len())
    }
}

/// `sup_x |a(x) - b(x)|`, evaluated at every knot of either function from both sides.
pub fn ks_distance_between<T: Real>(a: &dyn PiecewiseCdf<T>, b: &dyn PiecewiseCdf<T>) -> T {
    let mut worst = T::zero();
    for &x in a.knots().iter().chain(b.knots()) {
        let right = (a.value(x) - b.value(x)).abs();
        let left = (a.left_limit(x) - b.left_limit(x)).abs();
        worst = worst.max(right).max(left);
    }
    worst
}

/// KS distance between a nodal CDF on `xs` and the ECDF of `sorted_samples`.
pub fn ks_distance<T: Real>(xs: &[T], cdf: &[T], sorted_samples: &[T]) -> T {
    ks_distance_between(&GridCdf::new(xs, cdf), &EmpiricalCdf::new(sorted_samples))
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("grids are not nested (coarse {coarse} nodes, fine {fine} nodes)")]
    NonNested { coarse: usize, fine: usize },
    #[error("a convergence study needs at least {min} levels, got {got}")]
    TooFewLevels { min: usize, got: usize },
}

/// `max_k |coarse[k] - fine[k * stride]|` over the nodes both grids share.
pub fn nested_error<T: Real>(
    coarse_grid: &Grid<T>,
    coarse: &[T],
    fine_grid: &Grid<T>,
    fine: &[T],
) -> Result<T, AnalysisError> {
    let stride = coarse_grid.stride_in(fine_grid).ok_or(AnalysisError::NonNested {
        coarse: coarse_grid.len(),
        fine: fine_grid.len(),
    })?;
    Ok(coarse
        .iter()
        .enumerate()
        .map(|(k, &c)| (c - fine[k * stride]).abs())
        .fold(T::zero(), T::max))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope<T: Real>(x: &[T], y: &[T]) -> Option<T> {
    if x.len() < 2 || x.len() != y.len() || y.iter().any(|&v| !(v > T::zero())) {
        return None;
    }
    let lx: Vec<T> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<T> = y.iter().map(|v| v.ln()).collect();
    let n = T::from_usize_lossy(x.len());
    let mx = lx.iter().copied().sum::<T>() / n;
    let my = ly.iter().copied().sum::<T>() / n;
    let sxy: T = lx.iter().zip(&ly).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let sxx: T = lx.iter().map(|&a| (a - mx) * (a - mx)).sum();
    (sxx > T::zero()).then(|| sxy / sxx)
}

/// Dyadic refinement study against a reference solution on a much finer nested grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy<T> {
    /// Coarsest measured grid.
    pub base: Grid<T>,
    /// Number of measured grids `base, base/2, ...`; at least 3.
    pub levels: usize,
    /// Reference grid is this many times finer than the finest measured grid.
    pub reference_factor: usize,
    /// Each level steps with `cfl_fraction * dt_max` of that level.
    pub cfl_fraction: T,
}

impl<T: Real> ConvergenceStudy<T> {
    pub fn new(base: Grid<T>, levels: usize) -> Self {
        ConvergenceStudy {
            base,
            levels,
            reference_factor: 16,
            cfl_fraction: T::lit(0.9),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport<T> {
    pub spacings: Vec<T>,
    pub errors: Vec<T>,
    /// `None` when some error is exactly zero.
    pub order: Option<T>,
    pub reference_nodes: usize,
}

fn total_at<T: Real>(
    spec: &ModelSpec<T>,
    grid: &Grid<T>,
    ic: &InitialCondition<T>,
    times: &[T],
    cfl_fraction: T,
) -> Result<Vec<Vec<T>>, SolveError> {
    let horizon = times.iter().copied().fold(T::zero(), T::max);
    let dt = match cfl_max_dt(spec, grid)?.dt_max {
        Some(m) => cfl_fraction * m,
        None => horizon.max(T::one()),
    };
    let tr = solve(
        spec,
        grid,
        ic,
        &SolveOptions::new(horizon, dt).with_snapshots(times.to_vec()),
    )?;
    times
        .iter()
        .map(|&t| {
            let snap = tr
                .snapshots
                .iter()
                .find(|s| s.field.time() == t)
                .expect("every requested time is a snapshot");
            Ok(total_cdf(&snap.field))
        })
        .collect()
}

/// Observed order of the max-node error of the total CDF at `horizon`.
pub fn convergence_order<T: Real>(
    spec: &ModelSpec<T>,
    ic: &InitialCondition<T>,
    horizon: T,
    study: &ConvergenceStudy<T>,
) -> Result<ConvergenceReport<T>, AnalysisError> {
    if study.levels < 3 {
        return Err(AnalysisError::TooFewLevels {
            min: 3,
            got: study.levels,
        });
    }
    let finest = 1usize << (study.levels - 1);
    let reference_grid = study.base.refined(finest * study.reference_factor.max(1));
    let reference = total_at(spec, &reference_grid, ic, &[horizon], study.cfl_fraction)?.remove(0);
    let mut spacings = Vec::with_capacity(study.levels);
    let mut errors = Vec::with_capacity(study.levels);
    for level in 0..study.levels {
        let grid = study.base.refined(1 << level);
        let total = total_at(spec, &grid, ic, &[horizon], study.cfl_fraction)?.remove(0);
        errors.push(nested_error(&grid, &total, &reference_grid, &reference)?);
        spacings.push(grid.dx());
    }
    let order = log_log_slope(&spacings, &errors);
    Ok(ConvergenceReport {
        spacings,
        errors,
        order,
        reference_nodes: reference_grid.len(),
    })
}

/// Max-node error of the total CDF on `grid` at each of `times`, against a reference
/// `reference_factor` times finer.
pub fn error_growth<T: Real>(
    spec: &ModelSpec<T>,
    ic: &InitialCondition<T>,
    grid: &Grid<T>,
    times: &[T],
    reference_factor: usize,
    cfl_fraction: T,
) -> Result<Vec<T>, AnalysisError> {
    let fine = grid.refined(reference_factor.max(1));
    let reference = total_at(spec, &fine, ic, times, cfl_fraction)?;
    let coarse = total_at(spec, grid, ic, times, cfl_fraction)?;
    coarse
        .iter()
        .zip(&reference)
        .map(|(c, r)| nested_error(grid, c, &fine, r))
        .collect()
}
