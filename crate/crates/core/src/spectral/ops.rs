//! Fourier-multiplier operators, dealiasing, Leray projection and norms.

use num_complex::Complex64;

use super::field::Field;
use super::grid::Grid;
use crate::error::{Error, Result};

/// Differential operators realized as exact Fourier multipliers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DiffOp {
    /// Scalar to `dim`-vector.
    Gradient,
    /// `dim`-vector to scalar.
    Divergence,
    /// 3-vector to 3-vector, or 2-vector to the scalar vorticity in 2D.
    Curl,
    /// `(-Δ)^{α/2}`: multiplies the coefficient at `k` by `|k|^α`.
    FractionalLaplacian(f64),
    /// `(-Δ)^{-1/2}` with the mean mode sent to zero.
    InverseLambda,
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `i k_a`, with Nyquist components zeroed so odd derivatives keep the
/// coefficients Hermitian.
fn ik(grid: &Grid, idx: usize, axis: usize) -> Complex64 {
    let k = grid.wavevector(idx)[axis];
    if k == -(grid.n() as i32) / 2 {
        Complex64::default()
    } else {
        I * k as f64
    }
}

pub fn differentiate(f: &Field, op: DiffOp) -> Result<Field> {
    let grid = f.grid().clone();
    let dim = grid.dim();
    let spec = f.to_spectral();
    let data = spec.spectral().unwrap();
    match op {
        DiffOp::Gradient => {
            f.check_components(1)?;
            let c = &data[0];
            let comps = (0..dim)
                .map(|a| (0..grid.len()).map(|i| ik(&grid, i, a) * c[i]).collect())
                .collect();
            Field::from_spectral(&grid, comps)
        }
        DiffOp::Divergence => {
            f.check_components(dim)?;
            let out = (0..grid.len())
                .map(|i| (0..dim).map(|a| ik(&grid, i, a) * data[a][i]).sum())
                .collect();
            Field::from_spectral(&grid, vec![out])
        }
        DiffOp::Curl => {
            f.check_components(dim)?;
            if dim == 2 {
                let out = (0..grid.len())
                    .map(|i| ik(&grid, i, 0) * data[1][i] - ik(&grid, i, 1) * data[0][i])
                    .collect();
                Field::from_spectral(&grid, vec![out])
            } else {
                let cx = (0..grid.len())
                    .map(|i| ik(&grid, i, 1) * data[2][i] - ik(&grid, i, 2) * data[1][i])
                    .collect();
                let cy = (0..grid.len())
                    .map(|i| ik(&grid, i, 2) * data[0][i] - ik(&grid, i, 0) * data[2][i])
                    .collect();
                let cz = (0..grid.len())
                    .map(|i| ik(&grid, i, 0) * data[1][i] - ik(&grid, i, 1) * data[0][i])
                    .collect();
                Field::from_spectral(&grid, vec![cx, cy, cz])
            }
        }
        DiffOp::FractionalLaplacian(alpha) => Ok(f.apply_multiplier(&fractional_symbol(&grid, alpha))),
        DiffOp::InverseLambda => Ok(f.apply_multiplier(&fractional_symbol(&grid, -1.0))),
    }
}

/// `|k|^α` on the lattice. The mean mode gets `0` unless `α == 0`.
pub fn fractional_symbol(grid: &Grid, alpha: f64) -> Vec<f64> {
    grid.kmag()
        .iter()
        .map(|&m| {
            if m == 0.0 {
                if alpha == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                m.powf(alpha)
            }
        })
        .collect()
}

/// `R^⊥θ = Λ^{-1}(-∂₂θ, ∂₁θ)` for a zero-mean scalar on the 2-torus.
pub fn riesz_perp(theta: &Field) -> Result<Field> {
    let grid = theta.grid().clone();
    if grid.dim() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            found: grid.dim(),
        });
    }
    theta.check_components(1)?;
    let spec = theta.to_spectral();
    let c = &spec.spectral().unwrap()[0];
    let scale = spec.spectral_energy().sqrt();
    if c[0].norm() > 1e-12 * (1.0 + scale) {
        return Err(Error::NonzeroMean(c[0].re));
    }
    let km = grid.kmag();
    let mut u1 = Vec::with_capacity(grid.len());
    let mut u2 = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        if km[i] == 0.0 {
            u1.push(Complex64::default());
            u2.push(Complex64::default());
        } else {
            u1.push(-ik(&grid, i, 1) * c[i] / km[i]);
            u2.push(ik(&grid, i, 0) * c[i] / km[i]);
        }
    }
    Field::from_spectral(&grid, vec![u1, u2])
}

/// Projection onto divergence-free vector fields,
/// `v̂ - k (k·v̂)/|k|²`. The mean mode is left untouched.
pub fn leray_project(v: &Field) -> Result<Field> {
    let grid = v.grid().clone();
    let dim = grid.dim();
    v.check_components(dim)?;
    let mut data = v.to_spectral().into_spectral_data();
    for i in 0..grid.len() {
        let k = grid.wavevector(i);
        if grid.is_nyquist(i) {
            // The Nyquist plane carries no derivative; remove it outright.
            for comp in data.iter_mut() {
                comp[i] = Complex64::default();
            }
            continue;
        }
        let k2: f64 = k[..dim].iter().map(|&x| (x * x) as f64).sum();
        if k2 == 0.0 {
            continue;
        }
        let kdot: Complex64 = (0..dim).map(|a| data[a][i] * k[a] as f64).sum();
        for a in 0..dim {
            data[a][i] -= kdot * (k[a] as f64 / k2);
        }
    }
    Field::from_spectral(&grid, data)
}

/// Two-thirds rule: zeroes every coefficient with some `|k_i| >= n/3`.
pub fn dealias(f: &Field) -> Field {
    let grid = f.grid();
    let mask: Vec<f64> = grid
        .retained_mask()
        .iter()
        .map(|&r| if r { 1.0 } else { 0.0 })
        .collect();
    f.apply_multiplier(&mask)
}

/// Discrete `L^r` norm with quadrature weight `(2π/n)^dim`. The pointwise
/// magnitude is Euclidean over components; `r = ∞` gives its maximum.
pub fn lp_norm(f: &Field, r: f64) -> Result<f64> {
    if r.is_nan() || r < 1.0 {
        return Err(Error::InvalidExponent(r));
    }
    let grid = f.grid();
    let phys = f.to_physical();
    let comps = phys.physical().unwrap();
    let mag: Vec<f64> = if comps.len() == 1 {
        comps[0].iter().map(|x| x.abs()).collect()
    } else {
        (0..grid.len())
            .map(|i| comps.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
            .collect()
    };
    Ok(lp_of_magnitudes(&mag, r, grid.cell_volume()))
}

pub(crate) fn lp_of_magnitudes(mag: &[f64], r: f64, weight: f64) -> f64 {
    let max = mag.iter().copied().fold(0.0, f64::max);
    if r.is_infinite() || max == 0.0 {
        return max;
    }
    if r == 2.0 {
        return (mag.iter().map(|x| x * x).sum::<f64>() * weight).sqrt();
    }
    let sum: f64 = mag.iter().map(|x| (x / max).powf(r)).sum();
    max * (sum * weight).powf(1.0 / r)
}

/// `∫ f·g dx` computed spectrally, `(2π)^dim Σ_k Σ_c Re(f̂ conj ĝ)`.
pub fn inner_product(f: &Field, g: &Field) -> Result<f64> {
    f.check_grid(g)?;
    g.check_components(f.components())?;
    let fs = f.to_spectral();
    let gs = g.to_spectral();
    let s: f64 = fs
        .spectral()
        .unwrap()
        .iter()
        .zip(gs.spectral().unwrap())
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x * y.conj()).re))
        .sum();
    Ok(s * f.grid().volume())
}

fn dealiased_samples(f: &Field) -> Vec<Vec<f64>> {
    dealias(f).into_physical_data()
}

fn from_samples_dealiased(grid: &Grid, comps: Vec<Vec<f64>>) -> Result<Field> {
    Ok(dealias(&Field::from_physical(grid, comps)?))
}

/// Pointwise product formed in physical space from dealiased factors and
/// dealiased again. Equal component counts multiply componentwise; a
/// scalar factor broadcasts over the other's components.
pub fn multiply(u: &Field, v: &Field) -> Result<Field> {
    u.check_grid(v)?;
    let (cu, cv) = (u.components(), v.components());
    if cu != cv && cu != 1 && cv != 1 {
        return Err(Error::ComponentMismatch {
            expected: cu,
            found: cv,
        });
    }
    let a = dealiased_samples(u);
    let b = dealiased_samples(v);
    let out = (0..cu.max(cv))
        .map(|c| {
            let x = &a[if cu == 1 { 0 } else { c }];
            let y = &b[if cv == 1 { 0 } else { c }];
            x.iter().zip(y).map(|(p, q)| p * q).collect()
        })
        .collect();
    from_samples_dealiased(u.grid(), out)
}

/// `(a·∇) w` for a `dim`-vector advector `a` and a field `w` with any
/// number of components. Factors and product are dealiased identically.
pub fn advect(a: &Field, w: &Field) -> Result<Field> {
    a.check_grid(w)?;
    let grid = a.grid().clone();
    let dim = grid.dim();
    a.check_components(dim)?;
    let av = dealiased_samples(a);
    let ws = dealias(w);
    let mut out = Vec::with_capacity(w.components());
    for c in 0..w.components() {
        let grad = differentiate(&ws.component(c), DiffOp::Gradient)?.into_physical_data();
        let mut acc = vec![0.0; grid.len()];
        for (ai, gi) in av.iter().zip(&grad) {
            for ((s, x), y) in acc.iter_mut().zip(ai).zip(gi) {
                *s += x * y;
            }
        }
        out.push(acc);
    }
    from_samples_dealiased(&grid, out)
}

/// Pointwise cross product of two 3-vectors, dealiased.
pub fn cross(a: &Field, b: &Field) -> Result<Field> {
    a.check_grid(b)?;
    if a.grid().dim() != 3 {
        return Err(Error::WrongDimension {
            expected: 3,
            found: a.grid().dim(),
        });
    }
    a.check_components(3)?;
    b.check_components(3)?;
    let x = dealiased_samples(a);
    let y = dealiased_samples(b);
    let comp = |i: usize, j: usize| -> Vec<f64> {
        (0..a.grid().len())
            .map(|p| x[i][p] * y[j][p] - x[j][p] * y[i][p])
            .collect()
    };
    from_samples_dealiased(a.grid(), vec![comp(1, 2), comp(2, 0), comp(0, 1)])
}

/// Relative divergence `‖∇·v‖₂ / (‖∇v‖₂ + tiny)` used for solenoidality checks.
pub fn relative_divergence(v: &Field) -> Result<f64> {
    let div = differentiate(v, DiffOp::Divergence)?;
    let d = lp_norm(&div, 2.0)?;
    if d == 0.0 {
        return Ok(0.0);
    }
    let mut g2 = 0.0;
    for c in 0..v.components() {
        let g = differentiate(&v.component(c), DiffOp::Gradient)?;
        g2 += lp_norm(&g, 2.0)?.powi(2);
    }
    Ok(d / (g2.sqrt() + f64::MIN_POSITIVE))
}

/// `‖∇v‖₂²` summed over components, computed spectrally.
pub fn gradient_norm_sq(v: &Field) -> f64 {
    let spec = v.to_spectral();
    let grid = v.grid();
    let km = grid.kmag();
    spec.spectral()
        .unwrap()
        .iter()
        .flat_map(|c| {
            c.iter().enumerate().map(|(i, z)| {
                if grid.is_nyquist(i) {
                    0.0
                } else {
                    km[i] * km[i] * z.norm_sqr()
                }
            })
        })
        .sum::<f64>()
        * grid.volume()
}

/// `‖v‖₂²` computed spectrally (Parseval).
pub fn l2_norm_sq(v: &Field) -> f64 {
    v.spectral_energy() * v.grid().volume()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Rep;
    use std::f64::consts::PI;

    fn g2(n: usize) -> Grid {
        Grid::new(2, n).unwrap()
    }

    fn max_diff(a: &Field, b: &Field) -> f64 {
        let x = a.to_physical().into_physical_data();
        let y = b.to_physical().into_physical_data();
        x.iter()
            .flatten()
            .zip(y.iter().flatten())
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn constant_has_only_mean_mode() {
        let g = g2(16);
        let f = Field::scalar_fn(&g, |_| 1.0).to_spectral();
        let c = &f.spectral().unwrap()[0];
        assert!((c[0].re - 1.0).abs() < 1e-15);
        assert!(c[1..].iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn cosine_coefficients_are_one_half() {
        let g = g2(16);
        let f = Field::scalar_fn(&g, |x| x[0].cos()).to_spectral();
        let c = &f.spectral().unwrap()[0];
        for i in 0..g.len() {
            let k = g.wavevector(i);
            let expect = if k[1] == 0 && k[0].abs() == 1 { 0.5 } else { 0.0 };
            assert!((c[i].re - expect).abs() < 1e-14, "k={k:?}");
            assert!(c[i].im.abs() < 1e-14);
        }
    }

    #[test]
    fn transform_is_idempotent() {
        let g = g2(8);
        let f = Field::scalar_fn(&g, |x| x[0].sin() * x[1].cos());
        assert_eq!(f.transform(Rep::Physical).rep(), Rep::Physical);
        let s = f.transform(Rep::Spectral);
        let s2 = s.transform(Rep::Spectral);
        assert_eq!(s.spectral().unwrap(), s2.spectral().unwrap());
    }

    #[test]
    fn fractional_laplacian_fixes_unit_modes() {
        let g = g2(16);
        let f = Field::scalar_fn(&g, |x| x[0].cos());
        for alpha in [0.3, 1.0, 1.7, -0.5] {
            let out = differentiate(&f, DiffOp::FractionalLaplacian(alpha)).unwrap();
            assert!(max_diff(&out, &f) < 1e-13);
        }
    }

    #[test]
    fn divergence_of_gradient_is_laplacian() {
        let g = g2(16);
        let f = Field::scalar_fn(&g, |x| x[0].cos());
        let lap = differentiate(
            &differentiate(&f, DiffOp::Gradient).unwrap(),
            DiffOp::Divergence,
        )
        .unwrap();
        assert!(max_diff(&lap, &f.scale(-1.0)) < 1e-13);
    }

    #[test]
    fn curl_2d_matches_symbolic_derivative() {
        let g = g2(16);
        let v = Field::vector_fn(&g, |x| [-x[1].sin(), x[0].sin(), 0.0]);
        let w = differentiate(&v, DiffOp::Curl).unwrap();
        let expect = Field::scalar_fn(&g, |x| x[0].cos() + x[1].cos());
        assert!(max_diff(&w, &expect) < 1e-13);
    }

    #[test]
    fn curl_3d_matches_symbolic_derivative() {
        let g = Grid::new(3, 8).unwrap();
        // v = (sin z, sin x, sin y) has curl (cos y, cos z, cos x).
        let v = Field::vector_fn(&g, |x| [x[2].sin(), x[0].sin(), x[1].sin()]);
        let w = differentiate(&v, DiffOp::Curl).unwrap();
        let expect = Field::vector_fn(&g, |x| [x[1].cos(), x[2].cos(), x[0].cos()]);
        assert!(max_diff(&w, &expect) < 1e-13);
    }

    #[test]
    fn vector_operators_reject_wrong_components() {
        let g = g2(8);
        let s = Field::scalar_fn(&g, |x| x[0].cos());
        assert!(matches!(
            differentiate(&s, DiffOp::Divergence),
            Err(Error::ComponentMismatch { .. })
        ));
        let v = Field::vector_fn(&g, |x| [x[0].cos(), 0.0, 0.0]);
        assert!(differentiate(&v, DiffOp::Gradient).is_err());
        assert!(leray_project(&s).is_err());
    }

    #[test]
    fn riesz_perp_of_cosine() {
        let g = g2(16);
        let th = Field::scalar_fn(&g, |x| x[0].cos());
        let u = riesz_perp(&th).unwrap();
        let expect = Field::vector_fn(&g, |x| [0.0, -x[0].sin(), 0.0]);
        assert!(max_diff(&u, &expect) < 1e-13);
        let zero = riesz_perp(&Field::zeros(&g, 1, Rep::Physical)).unwrap();
        assert_eq!(lp_norm(&zero, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn riesz_perp_rejects_mean_and_dimension() {
        let g = g2(8);
        let th = Field::scalar_fn(&g, |x| 1.0 + x[0].cos());
        assert!(matches!(riesz_perp(&th), Err(Error::NonzeroMean(_))));
        let g3 = Grid::new(3, 8).unwrap();
        assert!(matches!(
            riesz_perp(&Field::zeros(&g3, 1, Rep::Spectral)),
            Err(Error::WrongDimension { .. })
        ));
    }

    #[test]
    fn leray_kills_gradients_and_keeps_solenoidal() {
        let g = g2(16);
        let grad = differentiate(&Field::scalar_fn(&g, |x| x[0].cos()), DiffOp::Gradient).unwrap();
        assert!(lp_norm(&leray_project(&grad).unwrap(), 2.0).unwrap() < 1e-13);
        let v = Field::vector_fn(&g, |x| [x[1].cos(), x[0].cos(), 0.0]);
        // k·v̂ = 0 per mode: v1 depends on x₂ only, v2 on x₁ only.
        let vs = v.to_spectral();
        let d = vs.spectral().unwrap();
        for i in 0..g.len() {
            let k = g.wavevector(i);
            let dot = d[0][i] * k[0] as f64 + d[1][i] * k[1] as f64;
            assert!(dot.norm() < 1e-14);
        }
        assert!(max_diff(&leray_project(&v).unwrap(), &v) < 1e-12);
    }

    #[test]
    fn dealias_truncates_at_two_thirds() {
        let g = g2(16);
        let f = Field::scalar_fn(&g, |x| (6.0 * x[0]).cos() + (x[0] + x[1]).cos());
        let d = dealias(&f);
        let expect = Field::scalar_fn(&g, |x| (x[0] + x[1]).cos());
        assert!(max_diff(&d, &expect) < 1e-13);
    }

    #[test]
    fn norms_of_cosine() {
        let g = g2(16);
        let f = Field::scalar_fn(&g, |x| x[0].cos());
        assert!((lp_norm(&f, f64::INFINITY).unwrap() - 1.0).abs() < 1e-15);
        assert!((lp_norm(&f, 2.0).unwrap() - (2.0 * PI * PI).sqrt()).abs() < 1e-12);
        let z = Field::zeros(&g, 2, Rep::Physical);
        for r in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert_eq!(lp_norm(&z, r).unwrap(), 0.0);
        }
        assert!(matches!(lp_norm(&f, 0.5), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn l1_norm_of_cosine() {
        // ∫|cos x| dx dy over the 2-torus = 4 · 2π
        let g = g2(256);
        let f = Field::scalar_fn(&g, |x| x[0].cos());
        let v = lp_norm(&f, 1.0).unwrap();
        assert!((v - 8.0 * PI).abs() < 1e-2, "{v}");
    }

    #[test]
    fn product_of_retained_modes_is_alias_free() {
        // Exhaustive bookkeeping at n = 16: every pair of retained modes
        // multiplies to a sum of two modes; after truncation only the
        // exact product's retained modes survive, never an alias.
        let g = Grid::new(2, 16).unwrap();
        let kc = 5;
        let modes: Vec<(i32, i32)> = (-kc..=kc)
            .flat_map(|a| (-kc..=kc).map(move |b| (a, b)))
            .filter(|&(a, b)| (a, b) >= (0, 0))
            .collect();
        let unit = |k: (i32, i32)| {
            Field::scalar_fn(&g, move |x| (k.0 as f64 * x[0] + k.1 as f64 * x[1]).cos())
        };
        for (ia, &ka) in modes.iter().enumerate().step_by(7) {
            for &kb in modes.iter().skip(ia).step_by(5) {
                let p = multiply(&unit(ka), &unit(kb)).unwrap();
                let sum = (ka.0 + kb.0, ka.1 + kb.1);
                let diff = (ka.0 - kb.0, ka.1 - kb.1);
                let keep = |k: (i32, i32)| k.0.abs() <= kc && k.1.abs() <= kc;
                let mut expect = Field::zeros(&g, 1, Rep::Physical);
                for k in [sum, diff] {
                    if keep(k) {
                        expect = expect.axpy(0.5, &unit(k)).unwrap();
                    }
                }
                assert!(max_diff(&p, &expect) < 1e-12, "{ka:?} x {kb:?}");
            }
        }
    }
}
