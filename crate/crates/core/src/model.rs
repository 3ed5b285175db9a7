//! Process definition: drift laws, switching rates and the jump matrix.

use std::fmt;

use thiserror::Error;

use crate::expr::DriftExpr;
use crate::scalar::Real;

/// Column-stochastic matrix: `get(i, j)` is the probability of jumping to state `i`
/// from state `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpMatrix<T> {
    rows: Vec<Vec<T>>,
}

impl<T: Real> JumpMatrix<T> {
    /// Wraps row-major data. Shape and stochasticity are checked by [`validate_model`].
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        JumpMatrix { rows }
    }

    /// Every switch picks each of the `n` states with equal probability.
    pub fn uniform(n: usize) -> Self {
        let p = T::one() / T::from_usize_lossy(n);
        JumpMatrix {
            rows: vec![vec![p; n]; n],
        }
    }

    /// Two-state swap (the random telegraph jump rule).
    pub fn swap2() -> Self {
        JumpMatrix {
            rows: vec![vec![T::zero(), T::one()], vec![T::one(), T::zero()]],
        }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
        JumpMatrix { rows }
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    #[inline]
    pub fn get(&self, to: usize, from: usize) -> T {
        self.rows[to][from]
    }

    /// Probabilities of the targets reachable from `from`, in state order.
    pub fn column(&self, from: usize) -> impl Iterator<Item = T> + '_ {
        self.rows.iter().map(move |r| r[from])
    }
}

/// An interval `[lo, hi]` of the state variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Domain<T> {
    pub fn new(lo: T, hi: T) -> Self {
        Domain { lo, hi }
    }

    pub fn contains(&self, x: T) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec<T> {
    pub drifts: Vec<DriftExpr>,
    /// Switching rate of each state (1/time).
    pub rates: Vec<T>,
    pub jump: JumpMatrix<T>,
    /// Explicit computational domain; required when the drifts are not all stable affine laws.
    pub domain: Option<Domain<T>>,
}

impl<T: Real> ModelSpec<T> {
    pub fn new(drifts: Vec<DriftExpr>, rates: Vec<T>, jump: JumpMatrix<T>) -> Self {
        ModelSpec {
            drifts,
            rates,
            jump,
            domain: None,
        }
    }

    pub fn with_domain(mut self, domain: Domain<T>) -> Self {
        self.domain = Some(domain);
        self
    }

    /// Parses drift strings; fails on the first malformed one.
    pub fn from_strs(drifts: &[&str], rates: Vec<T>, jump: JumpMatrix<T>) -> Result<Self, ModelError> {
        let drifts = drifts
            .iter()
            .enumerate()
            .map(|(i, s)| {
                DriftExpr::parse(s).map_err(|e| ModelError::Drift {
                    index: i,
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ModelSpec::new(drifts, rates, jump))
    }

    pub fn states(&self) -> usize {
        self.drifts.len()
    }

    /// Returns `self` when [`validate_model`] finds nothing.
    pub fn validated(self) -> Result<Self, ModelError> {
        let v = validate_model(&self);
        if v.is_empty() {
            Ok(self)
        } else {
            Err(ModelError::Invalid(v))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Whole,
    Entry(usize),
    Cell(usize, usize),
    Column(usize),
    Row(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Whole => Ok(()),
            Location::Entry(i) => write!(f, "[{i}]"),
            Location::Cell(i, j) => write!(f, "[{i}][{j}]"),
            Location::Column(j) => write!(f, " column {j}"),
            Location::Row(i) => write!(f, " row {i}"),
        }
    }
}

/// One broken invariant of a [`ModelSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: &'static str,
    pub at: Location,
    pub observed: f64,
    pub requirement: &'static str,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}: observed {} ({})",
            self.field, self.at, self.observed, self.requirement
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("drift {index}: {message}")]
    Drift { index: usize, message: String },
    #[error("invalid model: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("drift {index} is not a stable affine law and no domain was given")]
    DomainRequired { index: usize },
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Lists every violated invariant; an empty list means the model is usable.
pub fn validate_model<T: Real>(spec: &ModelSpec<T>) -> Vec<Violation> {
    let mut out = Vec::new();
    let s = spec.drifts.len();
    if s == 0 {
        out.push(Violation {
            field: "drifts",
            at: Location::Whole,
            observed: 0.0,
            requirement: "at least one state",
        });
    }
    if spec.rates.len() != s {
        out.push(Violation {
            field: "rates",
            at: Location::Whole,
            observed: spec.rates.len() as f64,
            requirement: "one rate per drift",
        });
    }
    for (i, &mu) in spec.rates.iter().enumerate() {
        if !(mu >= T::zero()) || !mu.is_finite() {
            out.push(Violation {
                field: "rates",
                at: Location::Entry(i),
                observed: mu.as_f64(),
                requirement: "finite and >= 0",
            });
        }
    }
    let q = spec.jump.rows();
    if q.len() != s {
        out.push(Violation {
            field: "q",
            at: Location::Whole,
            observed: q.len() as f64,
            requirement: "S x S",
        });
    }
    for (i, row) in q.iter().enumerate() {
        if row.len() != q.len() {
            out.push(Violation {
                field: "q",
                at: Location::Row(i),
                observed: row.len() as f64,
                requirement: "square",
            });
        }
    }
    if out.iter().any(|v| v.field == "q") {
        return out;
    }
    let n = q.len();
    for j in 0..n {
        let mut sum = T::zero();
        for (i, row) in q.iter().enumerate() {
            let v = row[j];
            if !(v >= T::zero() && v <= T::one()) {
                out.push(Violation {
                    field: "q",
                    at: Location::Cell(i, j),
                    observed: v.as_f64(),
                    requirement: "0 <= q <= 1",
                });
            }
            sum = sum + v;
        }
        if !((sum - T::one()).abs() <= T::identity_tol()) {
            out.push(Violation {
                field: "q",
                at: Location::Column(j),
                observed: sum.as_f64(),
                requirement: "column sums to 1",
            });
        }
    }
    if let Some(d) = spec.domain {
        if !(d.lo < d.hi) {
            out.push(Violation {
                field: "domain",
                at: Location::Whole,
                observed: d.width().as_f64(),
                requirement: "lo < hi",
            });
        }
    }
    out
}

/// `Q[i][j] = (q[i][j] - δij) μ_j`; off-diagonal >= 0, columns sum to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> GeneratorMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        GeneratorMatrix {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let n = rows.len();
        GeneratorMatrix {
            n,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// `max_l (-Q_ll) = max_l μ_l (1 - q_ll)`, the fastest rate of leaving a state.
    pub fn max_exit_rate(&self) -> T {
        (0..self.n).map(|l| -self.get(l, l)).fold(T::zero(), T::max)
    }

    pub fn column_sum(&self, j: usize) -> T {
        (0..self.n).map(|i| self.get(i, j)).sum()
    }

    /// `(I + dt Q)` as row-major data.
    pub fn euler_operator(&self, dt: T) -> Vec<T> {
        let mut m: Vec<T> = self.data.iter().map(|&v| v * dt).collect();
        for l in 0..self.n {
            m[l * self.n + l] = m[l * self.n + l] + T::one();
        }
        m
    }
}

pub fn generator_matrix<T: Real>(spec: &ModelSpec<T>) -> GeneratorMatrix<T> {
    let n = spec.jump.len();
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { T::one() } else { T::zero() };
            data.push((spec.jump.get(i, j) - delta) * spec.rates[j]);
        }
    }
    GeneratorMatrix { n, data }
}

/// Interval spanned by the attractors `W_s/γ_s` of stable affine drifts `-γ_s x + W_s`.
///
/// Falls back to the model's explicit domain when any drift is non-affine or not
/// contracting. A zero-width result is widened to `[c - 1, c + 1]`.
pub fn equilibrium_domain<T: Real>(spec: &ModelSpec<T>) -> Result<Domain<T>, ModelError> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (index, d) in spec.drifts.iter().enumerate() {
        match d.affine() {
            Some(a) if a.slope < 0.0 => {
                let c = -a.intercept / a.slope;
                lo = lo.min(c);
                hi = hi.max(c);
            }
            _ => return spec.domain.ok_or(ModelError::DomainRequired { index }),
        }
    }
    if spec.drifts.is_empty() {
        return spec.domain.ok_or(ModelError::DomainRequired { index: 0 });
    }
    if lo == hi {
        log::warn!(
            "equilibrium domain collapses to the point {lo}; widening to [{}, {}]",
            lo - 1.0,
            hi + 1.0
        );
        lo -= 1.0;
        hi += 1.0;
    }
    Ok(Domain::new(T::lit(lo), T::lit(hi)))
}
