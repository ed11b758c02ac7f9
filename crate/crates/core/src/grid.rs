//! Uniform periodic Cartesian grids.
//!
//! Node `(i, j, k)` sits at `origin + (i dx, j dy, k dz)` and is stored at the
//! flat index `i + nx * (j + ny * k)`; x is the fastest-varying axis in every
//! field of the crate.

use crate::error::{Error, Result};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i]
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// Triply periodic box with uniform spacing along each axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: [usize; 3],
    len: [f64; 3],
    origin: [f64; 3],
}

impl Grid {
    pub const MIN_POINTS: usize = 8;

    pub fn new(n: [usize; 3], len: [f64; 3]) -> Result<Self> {
        for a in Axis::ALL {
            let i = a.index();
            if n[i] < Self::MIN_POINTS {
                return Err(Error::AxisTooSmall {
                    axis: a,
                    n: n[i],
                    min: Self::MIN_POINTS,
                });
            }
            if !(len[i].is_finite() && len[i] > 0.0) {
                return Err(Error::InvalidGrid(format!(
                    "extent along {a} must be positive, got {}",
                    len[i]
                )));
            }
        }
        Ok(Self {
            n,
            len,
            origin: [0.0; 3],
        })
    }

    /// `n^3` nodes on a cube of side `l`.
    pub fn cube(n: usize, l: f64) -> Result<Self> {
        Self::new([n; 3], [l; 3])
    }

    pub fn with_origin(mut self, origin: [f64; 3]) -> Self {
        self.origin = origin;
        self
    }

    pub fn shape(&self) -> [usize; 3] {
        self.n
    }

    pub fn lengths(&self) -> [f64; 3] {
        self.len
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    pub fn nx(&self) -> usize {
        self.n[0]
    }

    pub fn ny(&self) -> usize {
        self.n[1]
    }

    pub fn nz(&self) -> usize {
        self.n[2]
    }

    pub fn n(&self, axis: Axis) -> usize {
        self.n[axis.index()]
    }

    pub fn spacing(&self, axis: Axis) -> f64 {
        let i = axis.index();
        self.len[i] / self.n[i] as f64
    }

    pub fn spacings(&self) -> [f64; 3] {
        [
            self.spacing(Axis::X),
            self.spacing(Axis::Y),
            self.spacing(Axis::Z),
        ]
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacings().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Geometric-mean cell size `(dx dy dz)^(1/3)`.
    pub fn filter_width(&self) -> f64 {
        let [dx, dy, dz] = self.spacings();
        (dx * dy * dz).cbrt()
    }

    pub fn is_isotropic(&self) -> bool {
        let [dx, dy, dz] = self.spacings();
        let tol = 1e-12 * dx;
        (dx - dy).abs() <= tol && (dx - dz).abs() <= tol
    }

    pub fn is_cubic(&self) -> bool {
        self.n[0] == self.n[1] && self.n[1] == self.n[2] && self.is_isotropic()
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn volume(&self) -> f64 {
        self.len[0] * self.len[1] * self.len[2]
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n[0] * (j + self.n[1] * k)
    }

    #[inline]
    pub fn unflatten(&self, idx: usize) -> (usize, usize, usize) {
        let i = idx % self.n[0];
        let jk = idx / self.n[0];
        (i, jk % self.n[1], jk / self.n[1])
    }

    /// Periodic wrap of a signed index along `axis`.
    #[inline]
    pub fn wrap(&self, axis: Axis, i: isize) -> usize {
        i.rem_euclid(self.n[axis.index()] as isize) as usize
    }

    pub fn coordinate(&self, axis: Axis, i: usize) -> f64 {
        self.origin[axis.index()] + i as f64 * self.spacing(axis)
    }

    pub fn position(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            self.coordinate(Axis::X, i),
            self.coordinate(Axis::Y, j),
            self.coordinate(Axis::Z, k),
        ]
    }
}
