//! Bony paraproduct, the transport commutator `[Δ_q, u_{≤p-2}·∇]` and the
//! two Hall commutators, plus the cancellation identities they expose.
//!
//! Every product is formed in physical space from dealiased factors and
//! dealiased again, so the two orderings inside a commutator differ only
//! by the commutator itself.
//!
//! The Hall commutator estimates are stated on `ℝ³` for `G` vanishing at
//! infinity; on the torus that hypothesis is vacuous and is not checked.

use crate::error::{Error, Result};
use crate::lp::{lambda, DyadicPartition, ShellDecomposition, Q_MIN};
use crate::spectral::{
    advect, cross, differentiate, inner_product, l2_norm_sq, lp_norm, multiply,
    relative_divergence, DiffOp, Field, Rep,
};

/// Tolerance on the relative divergence of advecting fields.
pub const SOLENOIDAL_TOL: f64 = 1e-8;

/// Bound on the normalized cancellation residuals `|I22|/(λ_q‖u_q‖₂²)`
/// and `|H12|/‖∇×b_q‖₂²`.
pub const CANCELLATION_TOL: f64 = 1e-10;

/// The three Bony pieces of a product `uv`.
#[derive(Clone, Debug)]
pub struct ParaproductTriple {
    /// `Σ_q u_{≤q-2} v_q`
    pub low_high: Field,
    /// `Σ_q u_q v_{≤q-2}`
    pub high_low: Field,
    /// `Σ_q ũ_q v_q`
    pub resonant: Field,
}

impl ParaproductTriple {
    pub fn sum(&self) -> Field {
        self.low_high
            .add(&self.high_low)
            .and_then(|s| s.add(&self.resonant))
            .expect("pieces share grid and components")
    }
}

fn zero_like(f: &Field, components: usize) -> Field {
    Field::zeros(f.grid(), components, Rep::Spectral)
}

pub fn bony_decompose(lp: &DyadicPartition, u: &Field, v: &Field) -> Result<ParaproductTriple> {
    u.check_grid(v)?;
    let comps = match (u.components(), v.components()) {
        (a, b) if a == b => a,
        (1, b) => b,
        (a, 1) => a,
        (a, b) => {
            return Err(Error::ComponentMismatch {
                expected: a,
                found: b,
            })
        }
    };
    let ud = lp.decompose(u)?;
    let vd = lp.decompose(v)?;
    let mut low_high = zero_like(u, comps);
    let mut high_low = zero_like(u, comps);
    let mut resonant = zero_like(u, comps);
    for q in lp.shells() {
        let uq = ud.shell(q).unwrap();
        let vq = vd.shell(q).unwrap();
        if q - 2 >= Q_MIN {
            low_high = low_high.add(&multiply(&ud.low(q - 2), vq)?)?;
            high_low = high_low.add(&multiply(uq, &vd.low(q - 2))?)?;
        }
        resonant = resonant.add(&multiply(&ud.neighborhood(q), vq)?)?;
    }
    Ok(ParaproductTriple {
        low_high,
        high_low,
        resonant,
    })
}

fn require_solenoidal(u: &Field) -> Result<()> {
    let d = relative_divergence(u)?;
    if d > SOLENOIDAL_TOL {
        return Err(Error::NotSolenoidal(d));
    }
    Ok(())
}

fn low_or_zero(lp: &DyadicPartition, f: &Field, q: i32) -> Result<Field> {
    if q < Q_MIN {
        Ok(zero_like(f, f.components()))
    } else {
        lp.project_low(f, q)
    }
}

/// `[Δ_q, u_{≤p-2}·∇] v_p = Δ_q(u_{≤p-2}·∇v_p) - u_{≤p-2}·∇Δ_q v_p`.
pub fn commutator_transport(
    lp: &DyadicPartition,
    q: i32,
    u: &Field,
    p: i32,
    v: &Field,
) -> Result<Field> {
    u.check_grid(v)?;
    u.check_components(u.grid().dim())?;
    require_solenoidal(u)?;
    let advector = low_or_zero(lp, u, p - 2)?;
    let vp = lp.project_shell(v, p)?;
    let first = lp.project_shell(&advect(&advector, &vp)?, q)?;
    let second = advect(&advector, &lp.project_shell(&vp, q)?)?;
    first.sub(&second)
}

/// Right-hand side of the transport commutator estimate,
/// `‖v_p‖_{r₂} Σ_{p' ≤ p-2} λ_{p'} ‖u_{p'}‖_{r₃}`.
pub fn transport_bound(
    lp: &DyadicPartition,
    u: &Field,
    p: i32,
    v: &Field,
    r2: f64,
    r3: f64,
) -> Result<f64> {
    let vp = lp_norm(&lp.project_shell(v, p)?, r2)?;
    let mut sum = 0.0;
    for pp in Q_MIN..=(p - 2) {
        sum += lambda(pp) * lp_norm(&lp.project_shell(u, pp)?, r3)?;
    }
    Ok(vp * sum)
}

fn require_3d(f: &Field) -> Result<()> {
    if f.grid().dim() != 3 {
        return Err(Error::WrongDimension {
            expected: 3,
            found: f.grid().dim(),
        });
    }
    Ok(())
}

/// `[Δ_q, F×∇×] G = Δ_q(F × (∇×G)) - F × (∇×G_q)`.
pub fn commutator_hall_cross(lp: &DyadicPartition, q: i32, f: &Field, g: &Field) -> Result<Field> {
    require_3d(f)?;
    f.check_grid(g)?;
    let curl_g = differentiate(g, DiffOp::Curl)?;
    let first = lp.project_shell(&cross(f, &curl_g)?, q)?;
    let curl_gq = differentiate(&lp.project_shell(g, q)?, DiffOp::Curl)?;
    first.sub(&cross(f, &curl_gq)?)
}

/// `[Δ_q, (∇×F)×] G = Δ_q(∇×(F × G)) - (∇×F) × G_q`, exactly as the
/// commutator is defined for the Hall term.
pub fn commutator_hall_curl(lp: &DyadicPartition, q: i32, f: &Field, g: &Field) -> Result<Field> {
    require_3d(f)?;
    f.check_grid(g)?;
    let first = lp.project_shell(&differentiate(&cross(f, g)?, DiffOp::Curl)?, q)?;
    let curl_f = differentiate(f, DiffOp::Curl)?;
    first.sub(&cross(&curl_f, &lp.project_shell(g, q)?)?)
}

/// `‖∇F‖_∞`: maximum over the grid of the Frobenius norm of the Jacobian.
pub fn jacobian_sup(f: &Field) -> Result<f64> {
    let grads = (0..f.components())
        .map(|c| differentiate(&f.component(c), DiffOp::Gradient).map(|g| g.into_physical_data()))
        .collect::<Result<Vec<_>>>()?;
    let len = f.grid().len();
    Ok((0..len)
        .map(|i| {
            grads
                .iter()
                .flat_map(|g| g.iter().map(move |c| c[i] * c[i]))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max))
}

/// One shell of the cancellation report.
#[derive(Clone, Debug, PartialEq)]
pub struct CancellationRow {
    pub q: i32,
    /// `∫ u_{≤q-2}·∇u_q · u_q dx`
    pub i22: f64,
    /// `λ_q ‖u_q‖₂²`
    pub i22_scale: f64,
    /// `∫ (b_{≤q-2} × (∇×b_q))·(∇×b_q) dx`
    pub h12: Option<f64>,
    /// `‖∇×b_q‖₂²`
    pub h12_scale: Option<f64>,
}

fn normalized(value: f64, scale: f64) -> f64 {
    if value == 0.0 {
        0.0
    } else if scale == 0.0 {
        f64::INFINITY
    } else {
        value.abs() / scale
    }
}

impl CancellationRow {
    pub fn i22_normalized(&self) -> f64 {
        normalized(self.i22, self.i22_scale)
    }

    pub fn h12_normalized(&self) -> Option<f64> {
        Some(normalized(self.h12?, self.h12_scale?))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CancellationReport {
    pub rows: Vec<CancellationRow>,
}

impl CancellationReport {
    pub fn max_i22(&self) -> f64 {
        self.rows
            .iter()
            .map(CancellationRow::i22_normalized)
            .fold(0.0, f64::max)
    }

    pub fn max_h12(&self) -> Option<f64> {
        self.rows
            .iter()
            .map(CancellationRow::h12_normalized)
            .try_fold(0.0, |acc: f64, v| v.map(|x| acc.max(x)))
    }

    pub fn passes(&self) -> bool {
        self.max_i22() <= CANCELLATION_TOL
            && self.max_h12().is_none_or(|h| h <= CANCELLATION_TOL)
    }
}

/// Evaluates the two cancellation identities shell by shell: the
/// self-transport term `I22` vanishes for solenoidal `u`, and the Hall
/// term `H12` vanishes pointwise by orthogonality of the cross product.
pub fn cancellation_suite(
    lp: &DyadicPartition,
    u: &Field,
    b: Option<&Field>,
) -> Result<CancellationReport> {
    u.check_components(u.grid().dim())?;
    require_solenoidal(u)?;
    let ud = lp.decompose(u)?;
    let bd = match b {
        Some(b) => {
            require_3d(b)?;
            b.check_components(3)?;
            require_solenoidal(b)?;
            Some(lp.decompose(b)?)
        }
        None => None,
    };
    let mut rows = Vec::new();
    for q in lp.shells() {
        let uq = ud.shell(q).unwrap();
        let i22 = if q - 2 >= Q_MIN {
            inner_product(&advect(&ud.low(q - 2), uq)?, uq)?
        } else {
            0.0
        };
        let i22_scale = lambda(q) * l2_norm_sq(uq);
        let (h12, h12_scale) = match &bd {
            Some(bd) => {
                let (h, s) = hall_h12(bd, q)?;
                (Some(h), Some(s))
            }
            None => (None, None),
        };
        rows.push(CancellationRow {
            q,
            i22,
            i22_scale,
            h12,
            h12_scale,
        });
    }
    Ok(CancellationReport { rows })
}

fn hall_h12(bd: &ShellDecomposition, q: i32) -> Result<(f64, f64)> {
    let bq = bd.shell(q).unwrap();
    let j = differentiate(bq, DiffOp::Curl)?;
    let scale = l2_norm_sq(&j);
    if q - 2 < Q_MIN {
        return Ok((0.0, scale));
    }
    let a = bd.low(q - 2).into_physical_data();
    let jp = j.to_physical().into_physical_data();
    let grid = bq.grid();
    let mut sum = 0.0;
    for i in 0..grid.len() {
        let c = [
            a[1][i] * jp[2][i] - a[2][i] * jp[1][i],
            a[2][i] * jp[0][i] - a[0][i] * jp[2][i],
            a[0][i] * jp[1][i] - a[1][i] * jp[0][i],
        ];
        sum += c[0] * jp[0][i] + c[1] * jp[1][i] + c[2] * jp[2][i];
    }
    Ok((sum * grid.cell_volume(), scale))
}
