//! Multidimensional FFT on x-fastest arrays.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

pub(crate) type C64 = Complex<f64>;

/// In-place unnormalized transform over all axes of length > 1.
pub(crate) fn fft3(data: &mut [C64], dims: [usize; 3], inverse: bool) {
    let mut planner = FftPlanner::new();
    let [nx, ny, nz] = dims;
    debug_assert_eq!(data.len(), nx * ny * nz);
    let strides = [1, nx, nx * ny];
    let mut line = Vec::new();
    for axis in 0..3 {
        let n = dims[axis];
        if n < 2 {
            continue;
        }
        let fft = if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        };
        let stride = strides[axis];
        line.resize(n, C64::new(0.0, 0.0));
        let total = nx * ny * nz;
        for start in 0..total {
            // `start` must be the first element of a line along `axis`.
            if (start / stride) % n != 0 {
                continue;
            }
            for (m, v) in line.iter_mut().enumerate() {
                *v = data[start + m * stride];
            }
            fft.process(&mut line);
            for (m, v) in line.iter().enumerate() {
                data[start + m * stride] = *v;
            }
        }
    }
}

/// Signed integer wavenumber of FFT bin `m` on `n` points.
pub(crate) fn wavenumber(m: usize, n: usize) -> i64 {
    if m <= n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}
