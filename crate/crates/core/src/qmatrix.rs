//! Fixed-size dense complex matrices for one- and two-qubit operators.
//!
//! Everything here works on `CMat<2>` and `CMat<4>` by value. Hermitian
//! eigenproblems are solved in closed form for 2×2 and by cyclic complex
//! Jacobi rotations otherwise; the unitary and Gibbs exponentials are built
//! from the resulting spectral decomposition.

use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
#[allow(unused_imports)] // float math under no_std; shadowed when std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Absolute tolerance on `max |H - H†|` for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Absolute tolerance on `|Tr ρ - 1|` for density matrices.
pub const TRACE_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Dense `D×D` complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat<const D: usize>(pub [[C64; D]; D]);

pub type CMat2 = CMat<2>;
pub type CMat4 = CMat<4>;

pub const IDENTITY2: CMat2 = CMat([[ONE, ZERO], [ZERO, ONE]]);
pub const SIGMA_X: CMat2 = CMat([[ZERO, ONE], [ONE, ZERO]]);
pub const SIGMA_Y: CMat2 = CMat([[ZERO, C64::new(0.0, -1.0)], [I, ZERO]]);
pub const SIGMA_Z: CMat2 = CMat([[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]]);

impl<const D: usize> Default for CMat<D> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const D: usize> CMat<D> {
    pub const fn zeros() -> Self {
        CMat([[ZERO; D]; D])
    }

    pub fn identity() -> Self {
        Self::diag_real(&[1.0; D])
    }

    pub fn diag_real(d: &[f64; D]) -> Self {
        let mut m = Self::zeros();
        for (i, &v) in d.iter().enumerate() {
            m.0[i][i] = C64::new(v, 0.0);
        }
        m
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..D {
            for j in 0..D {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    /// Entrywise complex conjugate (not the adjoint).
    pub fn conj(&self) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for z in row.iter_mut() {
                *z = z.conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..D).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_c(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for z in row.iter_mut() {
                *z = f(*z);
            }
        }
        m
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// `max |H - H†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(H + H†) / 2`, used to remove round-off asymmetry.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.dagger()).scale(0.5)
    }

    /// `A ρ A†`.
    pub fn conjugate_by(&self, a: &Self) -> Self {
        *a * *self * a.dagger()
    }

    /// `Tr(A B)`.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let mut acc = ZERO;
        for i in 0..D {
            for k in 0..D {
                acc += self.0[i][k] * other.0[k][i];
            }
        }
        acc
    }

    fn check_hermitian(&self) -> Result<()> {
        let deviation = self.hermiticity_defect();
        if deviation <= HERMITIAN_TOL * self.max_abs().max(1.0) {
            Ok(())
        } else {
            Err(Error::NotHermitian { deviation })
        }
    }
}

impl<const D: usize> Index<(usize, usize)> for CMat<D> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const D: usize> IndexMut<(usize, usize)> for CMat<D> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const D: usize> Add for CMat<D> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..D {
            for j in 0..D {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl<const D: usize> Sub for CMat<D> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..D {
            for j in 0..D {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl<const D: usize> Neg for CMat<D> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

impl<const D: usize> Mul for CMat<D> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..D {
            for k in 0..D {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..D {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

/// Spectral decomposition `H = V diag(values) V†` of a Hermitian matrix.
///
/// Eigenvalues ascend; column `k` of `vectors` belongs to `values[k]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermEig<const D: usize> {
    pub values: [f64; D],
    pub vectors: CMat<D>,
}

impl<const D: usize> HermEig<D> {
    /// `V diag(f(w)) V†`.
    #[allow(clippy::needless_range_loop)]
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> CMat<D> {
        let mut out = CMat::<D>::zeros();
        let v = &self.vectors.0;
        for k in 0..D {
            let fk = f(self.values[k]);
            for i in 0..D {
                let a = v[i][k] * fk;
                for j in 0..D {
                    out.0[i][j] += a * v[j][k].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMat<D> {
        self.apply(|w| C64::new(w, 0.0))
    }

    /// `e^{-iHt}`.
    pub fn propagator(&self, t: f64) -> CMat<D> {
        self.apply(|w| C64::from_polar(1.0, -w * t))
    }

    pub fn min_value(&self) -> f64 {
        self.values[0]
    }
}

/// Eigendecomposition of a Hermitian matrix.
pub fn herm_eig<const D: usize>(h: &CMat<D>) -> Result<HermEig<D>> {
    h.check_hermitian()?;
    Ok(if D == 2 { eig2(h) } else { jacobi_eig(h) })
}

/// Closed-form 2×2 Hermitian eigensolver. Only the upper triangle is read.
fn eig2<const D: usize>(h: &CMat<D>) -> HermEig<D> {
    debug_assert_eq!(D, 2);
    let a = h.0[0][0].re;
    let d = h.0[1][1].re;
    let b = h.0[0][1];
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = half.hypot(b.norm());
    let mut values = [0.0; D];
    values[0] = mean - r;
    values[1] = mean + r;
    let mut vectors = CMat::<D>::identity();
    if b.norm() == 0.0 {
        if a > d {
            vectors = CMat::zeros();
            vectors.0[1][0] = ONE;
            vectors.0[0][1] = ONE;
        }
        return HermEig { values, vectors };
    }
    // Lower eigenvector: pick the better-conditioned of (b, λ-a) and (λ-d, b*).
    let (x, y) = if half >= 0.0 {
        (b, C64::new(-half - r, 0.0))
    } else {
        (C64::new(half - r, 0.0), b.conj())
    };
    let norm = (x.norm_sqr() + y.norm_sqr()).sqrt();
    let (x, y) = (x / norm, y / norm);
    vectors.0[0][0] = x;
    vectors.0[1][0] = y;
    vectors.0[0][1] = -y.conj();
    vectors.0[1][1] = x.conj();
    HermEig { values, vectors }
}

/// Cyclic complex Jacobi eigensolver for any `D`.
///
/// Exposed separately from [`herm_eig`] so the closed-form 2×2 path can be
/// cross-checked against it.
pub fn jacobi_eig<const D: usize>(h: &CMat<D>) -> HermEig<D> {
    let mut a = h.hermitian_part();
    let mut v = CMat::<D>::identity();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);

    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..D {
            for q in (p + 1)..D {
                off += a.0[p][q].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..D {
            for q in (p + 1)..D {
                let b = a.0[p][q];
                let babs = b.norm();
                if babs <= 1e-300 {
                    continue;
                }
                let phase = b / babs;
                let tau = (a.0[q][q].re - a.0[p][p].re) / (2.0 * babs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]] in the (p, q) plane.
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(s, 0.0);
                let gqp = -phase.conj() * s;
                let gqq = phase.conj() * c;
                for k in 0..D {
                    let akp = a.0[k][p];
                    let akq = a.0[k][q];
                    a.0[k][p] = akp * gpp + akq * gqp;
                    a.0[k][q] = akp * gpq + akq * gqq;
                    let vkp = v.0[k][p];
                    let vkq = v.0[k][q];
                    v.0[k][p] = vkp * gpp + vkq * gqp;
                    v.0[k][q] = vkp * gpq + vkq * gqq;
                }
                for k in 0..D {
                    let apk = a.0[p][k];
                    let aqk = a.0[q][k];
                    a.0[p][k] = gpp.conj() * apk + gqp.conj() * aqk;
                    a.0[q][k] = gpq.conj() * apk + gqq.conj() * aqk;
                }
                a.0[p][q] = ZERO;
                a.0[q][p] = ZERO;
                a.0[p][p].im = 0.0;
                a.0[q][q].im = 0.0;
            }
        }
    }

    let mut order = [0usize; D];
    for (k, o) in order.iter_mut().enumerate() {
        *o = k;
    }
    order.sort_by(|&i, &j| a.0[i][i].re.total_cmp(&a.0[j][j].re));
    let mut values = [0.0; D];
    let mut vectors = CMat::<D>::zeros();
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = a.0[src][src].re;
        for k in 0..D {
            vectors.0[k][dst] = v.0[k][src];
        }
    }
    HermEig { values, vectors }
}

/// `e^{-iHt}` for Hermitian `H`.
pub fn exp_unitary<const D: usize>(h: &CMat<D>, t: f64) -> Result<CMat<D>> {
    Ok(herm_eig(h)?.propagator(t))
}

/// Unnormalized `e^{-βH}` for Hermitian `H`.
pub fn exp_gibbs<const D: usize>(h: &CMat<D>, beta: f64) -> Result<CMat<D>> {
    Ok(herm_eig(h)?.apply(|w| C64::new((-beta * w).exp(), 0.0)))
}

/// Normalized Gibbs state and `ln Tr e^{-βH}`, safe for large `β‖H‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsState<const D: usize> {
    pub rho: CMat<D>,
    pub log_partition: f64,
}

pub fn gibbs_state<const D: usize>(h: &CMat<D>, beta: f64) -> Result<GibbsState<D>> {
    let eig = herm_eig(h)?;
    let shift = eig.min_value();
    let z_shifted: f64 = eig
        .values
        .iter()
        .map(|&w| (-beta * (w - shift)).exp())
        .sum();
    let rho = eig.apply(|w| C64::new((-beta * (w - shift)).exp() / z_shifted, 0.0));
    Ok(GibbsState {
        rho,
        log_partition: -beta * shift + z_shifted.ln(),
    })
}

/// Kronecker product; qubit 1 is the most significant index.
pub fn kron(a: &CMat2, b: &CMat2) -> CMat4 {
    let mut m = CMat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qubit {
    First,
    Second,
}

/// Trace out `traced` from a two-qubit density matrix, returning the state of
/// the other qubit.
pub fn ptrace(rho: &CMat4, traced: Qubit) -> Result<CMat2> {
    check_trace(rho.trace().re)?;
    let mut out = CMat2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            out.0[i][j] = match traced {
                Qubit::Second => rho.0[2 * i][2 * j] + rho.0[2 * i + 1][2 * j + 1],
                Qubit::First => rho.0[i][j] + rho.0[2 + i][2 + j],
            };
        }
    }
    Ok(out)
}

fn check_trace(trace: f64) -> Result<()> {
    if (trace - 1.0).abs() <= TRACE_TOL {
        Ok(())
    } else {
        Err(Error::BadTrace { trace })
    }
}

/// Bloch vector `(Tr σx ρ, Tr σy ρ, Tr σz ρ)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }
}

pub fn bloch_from_rho(rho: &CMat2) -> Result<BlochVector> {
    rho.check_hermitian()?;
    check_trace(rho.trace().re)?;
    Ok(BlochVector {
        x: 2.0 * rho.0[0][1].re,
        y: -2.0 * rho.0[0][1].im,
        z: (rho.0[0][0] - rho.0[1][1]).re,
    })
}

/// `(𝟙 + p·σ) / 2`.
pub fn rho_from_bloch(p: &BlochVector) -> CMat2 {
    CMat([
        [
            C64::new(0.5 * (1.0 + p.z), 0.0),
            C64::new(0.5 * p.x, -0.5 * p.y),
        ],
        [
            C64::new(0.5 * p.x, 0.5 * p.y),
            C64::new(0.5 * (1.0 - p.z), 0.0),
        ],
    ])
}
