//! Periodic (cyclic) tridiagonal systems.
//!
//! A cyclic system couples row `0` to row `n - 1` through two corner entries.
//! It is reduced with the Sherman-Morrison formula to two ordinary tridiagonal
//! solves (Thomas algorithm).

use crate::error::{Error, Result};

/// `sub[i]` multiplies `x[i - 1]` and `sup[i]` multiplies `x[i + 1]`, indices
/// taken modulo `n`; so `sub[0]` is the top-right corner `A[0][n-1]` and
/// `sup[n - 1]` the bottom-left corner `A[n-1][0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl CyclicTridiagonalSystem {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if sub.len() != n || sup.len() != n {
            return Err(Error::ShapeMismatch);
        }
        if n < 3 {
            return Err(Error::InvalidParameter(format!(
                "cyclic tridiagonal system needs n >= 3, got {n}"
            )));
        }
        Ok(Self { sub, diag, sup })
    }

    /// Constant-coefficient circulant system `lo x[i-1] + d x[i] + hi x[i+1]`.
    pub fn constant(n: usize, lo: f64, d: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; n], vec![d; n], vec![hi; n])
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Matrix-vector product `A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                self.sub[i] * x[(i + n - 1) % n] + self.diag[i] * x[i] + self.sup[i] * x[(i + 1) % n]
            })
            .collect()
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if rhs.len() != n {
            return Err(Error::ShapeMismatch);
        }
        let corner_top = self.sub[0];
        let corner_bottom = self.sup[n - 1];
        let gamma = -self.diag[0];
        if gamma == 0.0 {
            return Err(Error::ZeroPivot { row: 0 });
        }
        let mut diag = self.diag.clone();
        diag[0] -= gamma;
        diag[n - 1] -= corner_bottom * corner_top / gamma;

        let y = thomas(&self.sub, &diag, &self.sup, rhs)?;
        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = corner_bottom;
        let z = thomas(&self.sub, &diag, &self.sup, &u)?;

        let denom = 1.0 + z[0] + corner_top * z[n - 1] / gamma;
        if denom == 0.0 {
            return Err(Error::ZeroPivot { row: n - 1 });
        }
        let fact = (y[0] + corner_top * y[n - 1] / gamma) / denom;
        Ok(y.iter().zip(&z).map(|(yi, zi)| yi - fact * zi).collect())
    }
}

/// Solves the cyclic system `sys x = rhs`.
pub fn solve_cyclic_tridiagonal(sys: &CyclicTridiagonalSystem, rhs: &[f64]) -> Result<Vec<f64>> {
    sys.solve(rhs)
}

// Non-periodic Thomas solve; ignores sub[0] and sup[n-1].
fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut cp = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut m = diag[0];
    if m == 0.0 {
        return Err(Error::ZeroPivot { row: 0 });
    }
    cp[0] = sup[0] / m;
    x[0] = rhs[0] / m;
    for i in 1..n {
        m = diag[i] - sub[i] * cp[i - 1];
        if m == 0.0 {
            return Err(Error::ZeroPivot { row: i });
        }
        cp[i] = sup[i] / m;
        x[i] = (rhs[i] - sub[i] * x[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        x[i] -= cp[i] * x[i + 1];
    }
    Ok(x)
}

/// Pre-factored constant-coefficient cyclic system `lo x[i-1] + d x[i] + hi x[i+1]`,
/// solved for many right-hand sides at once.
///
/// Right-hand sides are stored row-major as `[n][width]` with row stride
/// `stride`; each of the `width` columns is an independent system.
#[derive(Debug, Clone)]
pub(crate) struct CyclicFactor {
    n: usize,
    lo: f64,
    inv_pivot: Vec<f64>,
    c_prime: Vec<f64>,
    z: Vec<f64>,
    top_over_gamma: f64,
    inv_denom: f64,
}

impl CyclicFactor {
    pub(crate) fn new(n: usize, lo: f64, d: f64, hi: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!(
                "cyclic tridiagonal system needs n >= 3, got {n}"
            )));
        }
        let gamma = -d;
        if gamma == 0.0 {
            return Err(Error::ZeroPivot { row: 0 });
        }
        let mut diag = vec![d; n];
        diag[0] -= gamma;
        diag[n - 1] -= hi * lo / gamma;

        let mut inv_pivot = vec![0.0; n];
        let mut c_prime = vec![0.0; n];
        let mut m = diag[0];
        if m == 0.0 {
            return Err(Error::ZeroPivot { row: 0 });
        }
        inv_pivot[0] = 1.0 / m;
        c_prime[0] = hi / m;
        for i in 1..n {
            m = diag[i] - lo * c_prime[i - 1];
            if m == 0.0 {
                return Err(Error::ZeroPivot { row: i });
            }
            inv_pivot[i] = 1.0 / m;
            c_prime[i] = hi / m;
        }

        let mut z = vec![0.0; n];
        z[0] = gamma;
        z[n - 1] = hi;
        z[0] *= inv_pivot[0];
        for i in 1..n {
            z[i] = (z[i] - lo * z[i - 1]) * inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            z[i] -= c_prime[i] * z[i + 1];
        }
        let top_over_gamma = lo / gamma;
        let denom = 1.0 + z[0] + top_over_gamma * z[n - 1];
        if denom == 0.0 {
            return Err(Error::ZeroPivot { row: n - 1 });
        }
        Ok(Self {
            n,
            lo,
            inv_pivot,
            c_prime,
            z,
            top_over_gamma,
            inv_denom: 1.0 / denom,
        })
    }

    /// In-place solve of `width` interleaved systems.
    pub(crate) fn solve_rows(&self, data: &mut [f64], stride: usize, width: usize) {
        let n = self.n;
        debug_assert!(data.len() >= (n - 1) * stride + width);
        {
            let row = &mut data[..width];
            let p = self.inv_pivot[0];
            row.iter_mut().for_each(|v| *v *= p);
        }
        for i in 1..n {
            let (prev, cur) = data.split_at_mut(i * stride);
            let prev = &prev[(i - 1) * stride..(i - 1) * stride + width];
            let cur = &mut cur[..width];
            let p = self.inv_pivot[i];
            let lo = self.lo;
            for (c, q) in cur.iter_mut().zip(prev) {
                *c = (*c - lo * q) * p;
            }
        }
        for i in (0..n - 1).rev() {
            let (cur, next) = data.split_at_mut((i + 1) * stride);
            let cur = &mut cur[i * stride..i * stride + width];
            let next = &next[..width];
            let cp = self.c_prime[i];
            for (c, q) in cur.iter_mut().zip(next) {
                *c -= cp * q;
            }
        }
        // Sherman-Morrison correction: x = y - fact * z, fact per column.
        let mut fact = vec![0.0; width];
        {
            let first = &data[..width];
            let last = &data[(n - 1) * stride..(n - 1) * stride + width];
            for ((f, a), b) in fact.iter_mut().zip(first).zip(last) {
                *f = (a + self.top_over_gamma * b) * self.inv_denom;
            }
        }
        for i in 0..n {
            let zi = self.z[i];
            let row = &mut data[i * stride..i * stride + width];
            for (v, f) in row.iter_mut().zip(&fact) {
                *v -= f * zi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    #[test]
    fn identity_system() {
        let sys = CyclicTridiagonalSystem::constant(5, 0.0, 1.0, 0.0).unwrap();
        let r = vec![1.0, -2.0, 3.5, 0.25, 7.0];
        assert_eq!(sys.solve(&r).unwrap(), r);
    }

    #[test]
    fn hand_solved_four_by_four() {
        // [4 1 0 1; 1 4 1 0; 0 1 4 1; 1 0 1 4] x = [6 6 6 6] has x = 1 everywhere,
        // and with rhs [7 6 6 6]: subtracting gives A d = e0, solved by hand
        // elimination as d = [7 -2 1 -2] / 24.
        let sys = CyclicTridiagonalSystem::constant(4, 1.0, 4.0, 1.0).unwrap();
        let x = sys.solve(&[6.0, 6.0, 6.0, 6.0]).unwrap();
        for v in &x {
            assert!((v - 1.0).abs() < 1e-14);
        }
        let x = sys.solve(&[7.0, 6.0, 6.0, 6.0]).unwrap();
        let expect = [1.0 + 7.0 / 24.0, 1.0 - 2.0 / 24.0, 1.0 + 1.0 / 24.0, 1.0 - 2.0 / 24.0];
        for (a, b) in x.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14, "{a} vs {b}");
        }
    }

    #[test]
    fn random_dominant_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 64;
        let sub: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sup: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let diag: Vec<f64> = (0..n)
            .map(|i| (sub[i] as f64).abs() + sup[i].abs() + rng.gen_range(0.5..2.0))
            .collect();
        let sys = CyclicTridiagonalSystem::new(sub, diag, sup).unwrap();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let x = sys.solve(&b).unwrap();
        let ax = sys.apply(&x);
        let res: Vec<f64> = ax.iter().zip(&b).map(|(a, c)| a - c).collect();
        assert!(max_abs(&res) <= 1e-12 * max_abs(&b));
    }

    #[test]
    fn zero_pivot_reported() {
        let sys = CyclicTridiagonalSystem::constant(6, 1.0, 0.0, 1.0).unwrap();
        assert!(matches!(sys.solve(&[1.0; 6]), Err(Error::ZeroPivot { .. })));
    }

    #[test]
    fn batched_factor_matches_general_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (n, width, stride) = (17, 5, 7);
        let (lo, d, hi) = (1.0 / 3.0, 1.0, 1.0 / 3.0);
        let fac = CyclicFactor::new(n, lo, d, hi).unwrap();
        let sys = CyclicTridiagonalSystem::constant(n, lo, d, hi).unwrap();
        let mut data: Vec<f64> = (0..n * stride).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let orig = data.clone();
        fac.solve_rows(&mut data, stride, width);
        for c in 0..width {
            let rhs: Vec<f64> = (0..n).map(|i| orig[i * stride + c]).collect();
            let x = sys.solve(&rhs).unwrap();
            for i in 0..n {
                assert!((x[i] - data[i * stride + c]).abs() < 1e-14);
            }
        }
        // columns beyond width are untouched
        for i in 0..n {
            for c in width..stride {
                assert_eq!(data[i * stride + c], orig[i * stride + c]);
            }
        }
    }
}
