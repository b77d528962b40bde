use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Which representation a [`Field`] currently holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rep {
    /// Real samples at the collocation points.
    Physical,
    /// Complex Fourier coefficients, forward transform divided by `n^dim`.
    Spectral,
}

#[derive(Clone, Debug)]
enum Data {
    Physical(Vec<Vec<f64>>),
    Spectral(Vec<Vec<Complex64>>),
}

/// A scalar or vector field on a [`Grid`].
///
/// Fields are immutable values: every operation returns a new field.
/// A spectral field is expected to be Hermitian (`c(-k) = conj c(k)`) so
/// that its physical representation is real.
#[derive(Clone, Debug)]
pub struct Field {
    grid: Grid,
    data: Data,
}

impl Field {
    pub fn zeros(grid: &Grid, components: usize, rep: Rep) -> Field {
        let data = match rep {
            Rep::Physical => Data::Physical(vec![vec![0.0; grid.len()]; components]),
            Rep::Spectral => {
                Data::Spectral(vec![vec![Complex64::default(); grid.len()]; components])
            }
        };
        Field {
            grid: grid.clone(),
            data,
        }
    }

    pub fn from_physical(grid: &Grid, components: Vec<Vec<f64>>) -> Result<Field> {
        check_shape(grid, components.len(), components.iter().map(Vec::len))?;
        Ok(Field {
            grid: grid.clone(),
            data: Data::Physical(components),
        })
    }

    /// Builds a field from spectral coefficients. Hermitian symmetry is not
    /// enforced; see [`Field::hermitian_symmetrized`].
    pub fn from_spectral(grid: &Grid, components: Vec<Vec<Complex64>>) -> Result<Field> {
        check_shape(grid, components.len(), components.iter().map(Vec::len))?;
        Ok(Field {
            grid: grid.clone(),
            data: Data::Spectral(components),
        })
    }

    /// Samples a scalar function of position.
    pub fn scalar_fn(grid: &Grid, f: impl Fn([f64; 3]) -> f64) -> Field {
        let data = (0..grid.len()).map(|i| f(grid.coordinates(i))).collect();
        Field {
            grid: grid.clone(),
            data: Data::Physical(vec![data]),
        }
    }

    /// Samples a vector function of position; only the first `dim`
    /// returned components are kept.
    pub fn vector_fn(grid: &Grid, f: impl Fn([f64; 3]) -> [f64; 3]) -> Field {
        let dim = grid.dim();
        let mut comps = vec![Vec::with_capacity(grid.len()); dim];
        for i in 0..grid.len() {
            let v = f(grid.coordinates(i));
            for (c, comp) in comps.iter_mut().enumerate() {
                comp.push(v[c]);
            }
        }
        Field {
            grid: grid.clone(),
            data: Data::Physical(comps),
        }
    }

    /// Concatenates the components of several fields on the same grid.
    pub fn stack(parts: &[Field]) -> Result<Field> {
        let first = parts
            .first()
            .ok_or(Error::ComponentMismatch {
                expected: 1,
                found: 0,
            })?;
        let mut comps = Vec::new();
        for p in parts {
            first.check_grid(p)?;
            comps.extend(p.to_spectral().into_spectral_data());
        }
        Field::from_spectral(&first.grid, comps)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        match &self.data {
            Data::Physical(c) => c.len(),
            Data::Spectral(c) => c.len(),
        }
    }

    pub fn rep(&self) -> Rep {
        match self.data {
            Data::Physical(_) => Rep::Physical,
            Data::Spectral(_) => Rep::Spectral,
        }
    }

    pub fn physical(&self) -> Option<&[Vec<f64>]> {
        match &self.data {
            Data::Physical(c) => Some(c),
            Data::Spectral(_) => None,
        }
    }

    pub fn spectral(&self) -> Option<&[Vec<Complex64>]> {
        match &self.data {
            Data::Spectral(c) => Some(c),
            Data::Physical(_) => None,
        }
    }

    pub fn transform(&self, target: Rep) -> Field {
        match target {
            Rep::Physical => self.to_physical(),
            Rep::Spectral => self.to_spectral(),
        }
    }

    pub fn to_spectral(&self) -> Field {
        match &self.data {
            Data::Spectral(_) => self.clone(),
            Data::Physical(comps) => Field {
                grid: self.grid.clone(),
                data: Data::Spectral(
                    comps
                        .iter()
                        .map(|c| {
                            let mut buf: Vec<Complex64> =
                                c.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                            self.grid.fft_forward(&mut buf);
                            buf
                        })
                        .collect(),
                ),
            },
        }
    }

    pub fn to_physical(&self) -> Field {
        match &self.data {
            Data::Physical(_) => self.clone(),
            Data::Spectral(comps) => Field {
                grid: self.grid.clone(),
                data: Data::Physical(
                    comps
                        .iter()
                        .map(|c| {
                            let mut buf = c.clone();
                            self.grid.fft_inverse(&mut buf);
                            buf.into_iter().map(|z| z.re).collect()
                        })
                        .collect(),
                ),
            },
        }
    }

    /// Consumes the field and returns its spectral coefficients.
    pub fn into_spectral_data(self) -> Vec<Vec<Complex64>> {
        match self.to_spectral().data {
            Data::Spectral(c) => c,
            Data::Physical(_) => unreachable!(),
        }
    }

    /// Consumes the field and returns its physical samples.
    pub fn into_physical_data(self) -> Vec<Vec<f64>> {
        match self.to_physical().data {
            Data::Physical(c) => c,
            Data::Spectral(_) => unreachable!(),
        }
    }

    /// Selects one component as a scalar field.
    pub fn component(&self, c: usize) -> Field {
        let data = match &self.data {
            Data::Physical(comps) => Data::Physical(vec![comps[c].clone()]),
            Data::Spectral(comps) => Data::Spectral(vec![comps[c].clone()]),
        };
        Field {
            grid: self.grid.clone(),
            data,
        }
    }

    pub fn check_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch {
                left: self.grid.to_string(),
                right: other.grid.to_string(),
            });
        }
        Ok(())
    }

    pub fn check_components(&self, expected: usize) -> Result<()> {
        if self.components() != expected {
            return Err(Error::ComponentMismatch {
                expected,
                found: self.components(),
            });
        }
        Ok(())
    }

    /// Multiplies every spectral coefficient at lattice index `i` by `m[i]`.
    pub fn apply_multiplier(&self, m: &[f64]) -> Field {
        debug_assert_eq!(m.len(), self.grid.len());
        let comps = self
            .to_spectral()
            .into_spectral_data()
            .into_iter()
            .map(|mut c| {
                c.par_iter_mut().zip(m.par_iter()).for_each(|(z, &w)| *z *= w);
                c
            })
            .collect();
        Field {
            grid: self.grid.clone(),
            data: Data::Spectral(comps),
        }
    }

    pub fn scale(&self, a: f64) -> Field {
        let data = match &self.data {
            Data::Physical(comps) => Data::Physical(
                comps
                    .iter()
                    .map(|c| c.iter().map(|x| a * x).collect())
                    .collect(),
            ),
            Data::Spectral(comps) => Data::Spectral(
                comps
                    .iter()
                    .map(|c| c.iter().map(|x| a * x).collect())
                    .collect(),
            ),
        };
        Field {
            grid: self.grid.clone(),
            data,
        }
    }

    /// Returns `self + a * other`. Both operands must share grid and
    /// component count; the result is spectral unless both are physical.
    pub fn axpy(&self, a: f64, other: &Field) -> Result<Field> {
        self.check_grid(other)?;
        other.check_components(self.components())?;
        let data = match (&self.data, &other.data) {
            (Data::Physical(x), Data::Physical(y)) => Data::Physical(
                x.iter()
                    .zip(y)
                    .map(|(cx, cy)| cx.iter().zip(cy).map(|(p, q)| p + a * q).collect())
                    .collect(),
            ),
            _ => {
                let x = self.to_spectral().into_spectral_data();
                let y = other.to_spectral().into_spectral_data();
                Data::Spectral(
                    x.into_iter()
                        .zip(y)
                        .map(|(cx, cy)| {
                            cx.into_iter().zip(cy).map(|(p, q)| p + a * q).collect()
                        })
                        .collect(),
                )
            }
        };
        Ok(Field {
            grid: self.grid.clone(),
            data,
        })
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.axpy(-1.0, other)
    }

    /// Mean value of each component (the `k = 0` coefficient).
    pub fn mean(&self) -> Vec<f64> {
        match &self.data {
            Data::Spectral(comps) => comps.iter().map(|c| c[0].re).collect(),
            Data::Physical(comps) => comps
                .iter()
                .map(|c| c.iter().sum::<f64>() / c.len() as f64)
                .collect(),
        }
    }

    /// Largest `|c(-k) - conj c(k)|` over all components and modes.
    pub fn hermitian_defect(&self) -> f64 {
        let spec = self.to_spectral();
        let conj = self.grid.conj_index();
        spec.spectral()
            .unwrap()
            .iter()
            .flat_map(|c| (0..c.len()).map(move |i| (c[conj[i]] - c[i].conj()).norm()))
            .fold(0.0, f64::max)
    }

    /// Projects the coefficients onto the Hermitian subspace.
    pub fn hermitian_symmetrized(&self) -> Field {
        let spec = self.to_spectral();
        let conj = self.grid.conj_index();
        let comps = spec
            .spectral()
            .unwrap()
            .iter()
            .map(|c| (0..c.len()).map(|i| 0.5 * (c[i] + c[conj[i]].conj())).collect())
            .collect();
        Field {
            grid: self.grid.clone(),
            data: Data::Spectral(comps),
        }
    }

    pub fn is_finite(&self) -> bool {
        match &self.data {
            Data::Physical(comps) => comps.iter().flatten().all(|x| x.is_finite()),
            Data::Spectral(comps) => comps
                .iter()
                .flatten()
                .all(|z| z.re.is_finite() && z.im.is_finite()),
        }
    }

    /// Sum of squared coefficient magnitudes over all components.
    pub fn spectral_energy(&self) -> f64 {
        self.to_spectral()
            .spectral()
            .unwrap()
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum()
    }
}

fn check_shape(grid: &Grid, count: usize, lens: impl Iterator<Item = usize>) -> Result<()> {
    if count == 0 {
        return Err(Error::ComponentMismatch {
            expected: 1,
            found: 0,
        });
    }
    for l in lens {
        if l != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "component has {l} samples, grid {grid} needs {}",
                grid.len()
            )));
        }
    }
    Ok(())
}
