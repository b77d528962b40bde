use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Lines per rayon task in the batched 1-D transforms.
const LINES_PER_TASK: usize = 64;

/// Uniform discretization of the 2π-periodic torus in 2 or 3 dimensions.
///
/// Data are laid out row-major with axis 0 (x₁) slowest. The integer
/// wavevector of index `i` along one axis is `i` for `i < n/2` and `i - n`
/// otherwise, so every component lies in `[-n/2, n/2)`.
///
/// Cloning is cheap; the lattice tables and FFT plans are shared.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<Inner>,
}

struct Inner {
    dim: usize,
    n: usize,
    len: usize,
    k: Vec<[i32; 3]>,
    kmag: Vec<f64>,
    conj: Vec<usize>,
    retained: Vec<bool>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Grid {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidGrid(format!("dim must be 2 or 3, got {dim}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n must be a power of two >= 8, got {n}"
            )));
        }
        let len = n.pow(dim as u32);
        let wrap = |i: usize| -> i32 {
            if i < n / 2 {
                i as i32
            } else {
                i as i32 - n as i32
            }
        };
        let cutoff = n as f64 / 3.0;
        let mut k = Vec::with_capacity(len);
        let mut kmag = Vec::with_capacity(len);
        let mut conj = Vec::with_capacity(len);
        let mut retained = Vec::with_capacity(len);
        for idx in 0..len {
            let ijk = unravel(idx, dim, n);
            let mut kv = [0i32; 3];
            let mut c = [0usize; 3];
            for a in 0..dim {
                kv[a] = wrap(ijk[a]);
                c[a] = (n - ijk[a]) % n;
            }
            k.push(kv);
            kmag.push(
                kv.iter()
                    .map(|&x| (x as f64) * (x as f64))
                    .sum::<f64>()
                    .sqrt(),
            );
            conj.push(ravel(c, dim, n));
            retained.push(kv[..dim].iter().all(|&x| (x.abs() as f64) < cutoff));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Grid {
            inner: Arc::new(Inner {
                dim,
                n,
                len,
                k,
                kmag,
                conj,
                retained,
                forward,
                inverse,
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    /// Number of lattice points, `n^dim`.
    pub fn len(&self) -> usize {
        self.inner.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Side length of every axis (always 2π).
    pub fn length(&self) -> f64 {
        2.0 * PI
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.inner.n as f64
    }

    /// Quadrature weight `(2π/n)^dim` of a single collocation point.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.inner.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        (2.0 * PI).powi(self.inner.dim as i32)
    }

    pub fn wavevector(&self, idx: usize) -> [i32; 3] {
        self.inner.k[idx]
    }

    pub fn wavevectors(&self) -> &[[i32; 3]] {
        &self.inner.k
    }

    /// `|k|` for every lattice point.
    pub fn kmag(&self) -> &[f64] {
        &self.inner.kmag
    }

    /// Index of `-k` for every lattice point.
    pub fn conj_index(&self) -> &[usize] {
        &self.inner.conj
    }

    /// Whether the mode survives two-thirds dealiasing (`|k_i| < n/3` on every axis).
    pub fn is_retained(&self, idx: usize) -> bool {
        self.inner.retained[idx]
    }

    pub fn retained_mask(&self) -> &[bool] {
        &self.inner.retained
    }

    /// Largest `|k|` among retained modes.
    pub fn k_max_retained(&self) -> f64 {
        self.inner
            .kmag
            .iter()
            .zip(&self.inner.retained)
            .filter(|(_, &r)| r)
            .map(|(&m, _)| m)
            .fold(0.0, f64::max)
    }

    /// Whether the mode is a Nyquist mode (some component equal to `-n/2`).
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let half = -(self.inner.n as i32 / 2);
        self.inner.k[idx][..self.inner.dim].contains(&half)
    }

    /// Physical coordinates of a collocation point.
    pub fn coordinates(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        let ijk = unravel(idx, self.inner.dim, self.inner.n);
        [ijk[0] as f64 * h, ijk[1] as f64 * h, ijk[2] as f64 * h]
    }

    pub fn index(&self, ijk: [usize; 3]) -> usize {
        ravel(ijk, self.inner.dim, self.inner.n)
    }

    /// Index of the lattice point holding wavevector `k` (components taken modulo n).
    pub fn index_of_wavevector(&self, k: [i32; 3]) -> usize {
        let n = self.inner.n as i32;
        let mut ijk = [0usize; 3];
        for a in 0..self.inner.dim {
            ijk[a] = k[a].rem_euclid(n) as usize;
        }
        ravel(ijk, self.inner.dim, self.inner.n)
    }

    /// In-place forward transform, normalized so that coefficients are
    /// `(1/n^dim) Σ_x f(x) e^{-ik·x}`.
    pub(crate) fn fft_forward(&self, data: &mut [Complex64]) {
        self.fft_nd(data, &self.inner.forward);
        let scale = 1.0 / self.inner.len as f64;
        data.iter_mut().for_each(|c| *c *= scale);
    }

    /// In-place inverse transform (plain synthesis sum, no scaling).
    pub(crate) fn fft_inverse(&self, data: &mut [Complex64]) {
        self.fft_nd(data, &self.inner.inverse);
    }

    fn fft_nd(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.inner.n;
        let dim = self.inner.dim;
        debug_assert_eq!(data.len(), self.inner.len);
        data.par_chunks_mut(n * LINES_PER_TASK)
            .for_each(|chunk| plan.process(chunk));
        if dim == 1 {
            return;
        }
        let mut buf = vec![Complex64::default(); data.len()];
        for axis in 0..dim - 1 {
            let stride = n.pow((dim - 1 - axis) as u32);
            let outer = data.len() / (n * stride);
            gather_lines(data, &mut buf, n, stride, outer);
            buf.par_chunks_mut(n * LINES_PER_TASK)
                .for_each(|chunk| plan.process(chunk));
            scatter_lines(&buf, data, n, stride, outer);
        }
    }
}

fn gather_lines(src: &[Complex64], dst: &mut [Complex64], n: usize, stride: usize, outer: usize) {
    let mut line = 0;
    for o in 0..outer {
        let base = o * n * stride;
        for inner in 0..stride {
            let out = &mut dst[line * n..(line + 1) * n];
            for (j, slot) in out.iter_mut().enumerate() {
                *slot = src[base + j * stride + inner];
            }
            line += 1;
        }
    }
}

fn scatter_lines(src: &[Complex64], dst: &mut [Complex64], n: usize, stride: usize, outer: usize) {
    let mut line = 0;
    for o in 0..outer {
        let base = o * n * stride;
        for inner in 0..stride {
            let inp = &src[line * n..(line + 1) * n];
            for (j, v) in inp.iter().enumerate() {
                dst[base + j * stride + inner] = *v;
            }
            line += 1;
        }
    }
}

fn unravel(mut idx: usize, dim: usize, n: usize) -> [usize; 3] {
    let mut out = [0usize; 3];
    for a in (0..dim).rev() {
        out[a] = idx % n;
        idx /= n;
    }
    out
}

fn ravel(ijk: [usize; 3], dim: usize, n: usize) -> usize {
    let mut idx = 0;
    for &i in ijk.iter().take(dim) {
        idx = idx * n + i;
    }
    idx
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.dim == other.inner.dim && self.inner.n == other.inner.n)
    }
}

impl Eq for Grid {}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grid(dim={}, n={})", self.inner.dim, self.inner.n)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.inner.n, self.inner.dim)
    }
}
