//! Real 2*pi-periodic functions on an equispaced grid.
//!
//! A [`PeriodicFunction`] keeps grid values at `s_j = 2*pi*j/N` together
//! with the Fourier coefficients of `u(s_j) = sum_k c_k exp(i*k*s_j)` for
//! wavenumbers `|k| <= N/2`, stored in FFT index order (`k = m` for
//! `m < N/2`, `k = m - N` otherwise). Periodicity of `u` and `u'` is
//! structural in this representation, which is exactly the boundary
//! condition of the canonical problem.
//!
//! The Nyquist mode `k = N/2` carries no sign information on a real even-N
//! grid; differentiation and the shifted solve both zero it.

use crate::error::Error;
use crate::{real, Real};
use num_traits::Zero;
use rustfft::FftPlanner;

pub use num_complex::Complex;

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicFunction<T: Real> {
    values: Vec<T>,
    coeffs: Vec<Complex<T>>,
}

fn validate_grid<T: Real>(n: usize) -> Result<(), Error<T>> {
    if n >= 8 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::ShapeError { n })
    }
}

/// Signed wavenumber for FFT bin `m` on an `n`-point grid.
fn wavenumber(m: usize, n: usize) -> i64 {
    if m <= n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// Grid point `s_j = 2*pi*j/n`.
pub fn grid_point<T: Real>(j: usize, n: usize) -> T {
    T::TAU() * real::<T>(j as f64) / real::<T>(n as f64)
}

/// Forward transform: grid values to normalized Fourier coefficients.
pub fn to_coeffs<T: Real>(values: &[T]) -> Result<Vec<Complex<T>>, Error<T>> {
    let n = values.len();
    validate_grid::<T>(n)?;
    let mut buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = T::one() / real::<T>(n as f64);
    for c in &mut buf {
        *c = *c * scale;
    }
    Ok(buf)
}

/// Inverse transform: Fourier coefficients back to grid values.
pub fn to_values<T: Real>(coeffs: &[Complex<T>]) -> Result<Vec<T>, Error<T>> {
    let n = coeffs.len();
    validate_grid::<T>(n)?;
    let mut buf = coeffs.to_vec();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    Ok(buf.into_iter().map(|c| c.re).collect())
}

impl<T: Real> PeriodicFunction<T> {
    pub fn from_values(values: Vec<T>) -> Result<Self, Error<T>> {
        let coeffs = to_coeffs(&values)?;
        Ok(Self { values, coeffs })
    }

    /// Builds from coefficients, symmetrizing conjugate pairs so the
    /// function is real-valued even for hand-made spectra.
    pub fn from_coeffs(mut coeffs: Vec<Complex<T>>) -> Result<Self, Error<T>> {
        let n = coeffs.len();
        validate_grid::<T>(n)?;
        let half = real::<T>(0.5);
        coeffs[0] = Complex::new(coeffs[0].re, T::zero());
        coeffs[n / 2] = Complex::new(coeffs[n / 2].re, T::zero());
        for m in 1..n / 2 {
            let avg = (coeffs[m] + coeffs[n - m].conj()) * half;
            coeffs[m] = avg;
            coeffs[n - m] = avg.conj();
        }
        Self::from_coeffs_raw(coeffs)
    }

    fn from_coeffs_raw(coeffs: Vec<Complex<T>>) -> Result<Self, Error<T>> {
        let values = to_values(&coeffs)?;
        Ok(Self { values, coeffs })
    }

    /// Constant function; exact, no transform involved.
    pub fn constant(value: T, n: usize) -> Result<Self, Error<T>> {
        validate_grid::<T>(n)?;
        let mut coeffs = vec![Complex::zero(); n];
        coeffs[0] = Complex::new(value, T::zero());
        Ok(Self {
            values: vec![value; n],
            coeffs,
        })
    }

    /// Samples `f` on the grid.
    pub fn sample(n: usize, mut f: impl FnMut(T) -> T) -> Result<Self, Error<T>> {
        Self::from_values((0..n).map(|j| f(grid_point(j, n))).collect())
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn grid_point(&self, j: usize) -> T {
        grid_point(j, self.n())
    }

    pub fn min_value(&self) -> T {
        self.values.iter().fold(T::infinity(), |acc, &v| acc.min(v))
    }

    pub fn max_value(&self) -> T {
        self.values
            .iter()
            .fold(T::neg_infinity(), |acc, &v| acc.max(v))
    }

    pub fn sup_norm(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    /// Pointwise map `v_j -> f(s_j, v_j)` into a fresh function.
    pub fn map_with_grid(&self, mut f: impl FnMut(T, T) -> T) -> Self {
        let values: Vec<T> = self
            .values
            .iter()
            .enumerate()
            .map(|(j, &v)| f(self.grid_point(j), v))
            .collect();
        let coeffs = to_coeffs(&values).expect("grid already validated");
        Self { values, coeffs }
    }

    /// Scales by a constant; exact on both representations.
    pub fn scale(&self, factor: T) -> Self {
        Self {
            values: self.values.iter().map(|&v| v * factor).collect(),
            coeffs: self.coeffs.iter().map(|&c| c * factor).collect(),
        }
    }

    /// Spectral second derivative: coefficients scaled by `-k^2`, Nyquist
    /// dropped.
    pub fn second_derivative(&self) -> Self {
        let n = self.n();
        let coeffs: Vec<Complex<T>> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, &c)| {
                if m == n / 2 {
                    Complex::zero()
                } else {
                    let k = wavenumber(m, n) as f64;
                    c * real::<T>(-(k * k))
                }
            })
            .collect();
        Self::from_coeffs_raw(coeffs).expect("grid already validated")
    }

    /// Solves `-u'' + lambda*u = self` with periodic boundary conditions:
    /// diagonal in the Fourier basis with symbol `k^2 + lambda`.
    pub fn solve_shifted(&self, lambda: T) -> Result<Self, Error<T>> {
        if !(lambda > T::zero()) {
            return Err(Error::NonPositiveShift { lambda });
        }
        let n = self.n();
        let coeffs: Vec<Complex<T>> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, &c)| {
                if m == n / 2 {
                    Complex::zero()
                } else {
                    let k = wavenumber(m, n) as f64;
                    c * (T::one() / (real::<T>(k * k) + lambda))
                }
            })
            .collect();
        Self::from_coeffs_raw(coeffs)
    }

    /// Values on a `refine * N` grid via zero-padded coefficients.
    /// `refine` must keep the refined size a power of two.
    pub fn resample(&self, refine: usize) -> Result<Vec<T>, Error<T>> {
        if refine == 1 {
            return Ok(self.values.clone());
        }
        let n = self.n();
        let m_total = n * refine;
        validate_grid::<T>(m_total)?;
        let mut padded = vec![Complex::<T>::zero(); m_total];
        let half = real::<T>(0.5);
        for (m, &c) in self.coeffs.iter().enumerate() {
            let k = wavenumber(m, n);
            if k.unsigned_abs() as usize == n / 2 {
                // Split the Nyquist energy across +-N/2 on the fine grid.
                padded[n / 2] = padded[n / 2] + c * half;
                padded[m_total - n / 2] = padded[m_total - n / 2] + c.conj() * half;
            } else if k >= 0 {
                padded[k as usize] = c;
            } else {
                padded[m_total - k.unsigned_abs() as usize] = c;
            }
        }
        to_values(&padded)
    }
}

/// Sup-norm of the pointwise difference of two equal-length slices.
pub fn sup_diff<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc.max((x - y).abs()))
}
