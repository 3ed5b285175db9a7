//! Uniform spatial mesh.

use thiserror::Error;

use crate::model::Domain;
use crate::scalar::Real;

/// How finely to resolve a domain: a node count, or a target spacing that is
/// rounded to the nearest whole number of cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resolution<T> {
    Nodes(usize),
    Spacing(T),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("domain [{lo}, {hi}] is empty or inverted")]
    BadDomain { lo: f64, hi: f64 },
    #[error("need at least 3 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("grid spacing must be positive and finite, got {0}")]
    BadSpacing(f64),
}

/// `K` nodes `x_k = x_min + k dx`, `dx = (x_max - x_min) / (K - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T> {
    x_min: T,
    x_max: T,
    nodes: usize,
    dx: T,
}

impl<T: Real> Grid<T> {
    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn domain(&self) -> Domain<T> {
        Domain::new(self.x_min, self.x_max)
    }

    pub fn len(&self) -> usize {
        self.nodes
    }

    pub fn is_empty(&self) -> bool {
        self.nodes == 0
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    /// `x_k`; the last node is exactly `x_max`.
    #[inline]
    pub fn node(&self, k: usize) -> T {
        if k + 1 == self.nodes {
            self.x_max
        } else {
            self.x_min + T::from_usize_lossy(k) * self.dx
        }
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = T> + '_ {
        (0..self.nodes).map(|k| self.node(k))
    }

    /// Same domain with every cell split into `factor` cells.
    pub fn refined(&self, factor: usize) -> Grid<T> {
        build_grid(self.domain(), Resolution::Nodes((self.nodes - 1) * factor + 1))
            .expect("refining a valid grid stays valid")
    }

    /// Index stride of `self`'s nodes inside `fine`, when `fine` nests them.
    pub fn stride_in(&self, fine: &Grid<T>) -> Option<usize> {
        if self.x_min != fine.x_min || self.x_max != fine.x_max || fine.nodes < self.nodes {
            return None;
        }
        let (c, f) = (self.nodes - 1, fine.nodes - 1);
        (f % c == 0).then_some(f / c)
    }
}

pub fn build_grid<T: Real>(domain: Domain<T>, resolution: Resolution<T>) -> Result<Grid<T>, GridError> {
    let (lo, hi) = (domain.lo, domain.hi);
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(GridError::BadDomain {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }
    let nodes = match resolution {
        Resolution::Nodes(k) => k,
        Resolution::Spacing(dx) => {
            if !(dx > T::zero()) || !dx.is_finite() {
                return Err(GridError::BadSpacing(dx.as_f64()));
            }
            let cells = ((hi - lo) / dx).round().to_usize().unwrap_or(0);
            cells + 1
        }
    };
    if nodes < 3 {
        return Err(GridError::TooFewNodes(nodes));
    }
    let dx = (hi - lo) / T::from_usize_lossy(nodes - 1);
    Ok(Grid {
        x_min: lo,
        x_max: hi,
        nodes,
        dx,
    })
}
