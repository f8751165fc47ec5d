//! One central qubit in a spin bath.
//!
//! Within bath sector `n` the qubit sees the shifted Hamiltonian
//! `H_{S,n} = (ε + e_n)/2 σz + Δ₀/2 σx`, which precesses the Bloch vector
//! about `(Δ₀, 0, ε + e_n)` at angular frequency `2Δ̃_n`,
//! `Δ̃_n = ½ √((ε + e_n)² + Δ₀²)`. The reduced state is the thermal
//! mixture of these sector rotations.
//!
//! Preparation applies `R = e^{iπ/4 σy}` to a Gibbs state. Without
//! correlations that state is `e^{-βH_S0}/Z` for every sector; with
//! correlations each sector carries its own shifted Gibbs state and an extra
//! weight `A_n = 2 cosh(βΔ̃₀ⁿ)`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;

use num_complex::Complex64 as C64;
#[allow(unused_imports)] // float math under no_std; shadowed when std is linked
use num_traits::Float;

use crate::bath::{BathEnsemble, BathSpec, BathTerm};
use crate::logsum::{ln_2cosh, normalize_log_weights};
use crate::qmatrix::{
    bloch_from_rho, exp_gibbs, exp_unitary, herm_eig, BlochVector, CMat2, IDENTITY2, SIGMA_X,
    SIGMA_Y, SIGMA_Z,
};
use crate::series::{check_grid, TimeSeries};
use crate::{Error, Result};

/// Central-qubit energies before (`eps0`) and after (`eps`) the preparation
/// pulse. The tunneling amplitude `delta0` is the same on both sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemSpec {
    pub eps0: f64,
    pub eps: f64,
    pub delta0: f64,
}

impl SystemSpec {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("eps0", self.eps0),
            ("eps", self.eps),
            ("delta0", self.delta0),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidSystem {
                    field,
                    reason: "must be finite".into(),
                });
            }
        }
        if self.delta0 < 0.0 {
            return Err(Error::InvalidSystem {
                field: "delta0",
                reason: format!("must be >= 0, got {}", self.delta0),
            });
        }
        Ok(())
    }
}

/// `(bias/2) σz + (Δ₀/2) σx`.
pub fn system_hamiltonian(bias: f64, delta0: f64) -> CMat2 {
    SIGMA_Z.scale(0.5 * bias) + SIGMA_X.scale(0.5 * delta0)
}

/// `Δ̃ = ½ √(bias² + Δ₀²)`.
pub fn half_gap(bias: f64, delta0: f64) -> f64 {
    0.5 * bias.hypot(delta0)
}

/// `(H_{S0,n}, H_{S,n})`, the pre- and post-pulse Hamiltonians of sector `term`.
pub fn shifted_hamiltonians(sys: &SystemSpec, term: &BathTerm) -> (CMat2, CMat2) {
    (
        system_hamiltonian(sys.eps0 + term.e, sys.delta0),
        system_hamiltonian(sys.eps + term.e, sys.delta0),
    )
}

/// `R = e^{iπ/4 σy}`; takes spin-down along z to spin-up along x.
pub fn prep_pulse_r() -> CMat2 {
    IDENTITY2.scale(FRAC_PI_4.cos()) + SIGMA_Y.scale_c(C64::new(0.0, FRAC_PI_4.sin()))
}

/// Bloch vector of `R e^{-βH} R† / Z` for `H = (bias/2)σz + (Δ₀/2)σx`:
/// `tanh(βΔ̃)/(2Δ̃) · (bias, 0, -Δ₀)`.
pub fn prepared_bloch(bias: f64, delta0: f64, beta: f64) -> BlochVector {
    let gap = half_gap(bias, delta0);
    let f = if gap > 0.0 {
        (beta * gap).tanh() / (2.0 * gap)
    } else {
        0.5 * beta
    };
    BlochVector::new(f * bias, 0.0, -f * delta0)
}

/// Prepared state ignoring the system–bath interaction.
pub fn initial_bloch_woc(sys: &SystemSpec, beta: f64) -> BlochVector {
    prepared_bloch(sys.eps0, sys.delta0, beta)
}

/// Prepared state starting from the joint Gibbs state.
pub fn initial_bloch_wc(sys: &SystemSpec, ens: &BathEnsemble) -> Result<BlochVector> {
    Ok(SingleQubitEvolver::new(sys, ens)?.initial_wc())
}

/// `sin(x)/x`.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Bloch-vector rotation produced by `e^{-iHt}`, `H = (bias/2)σz + (Δ/2)σx`.
///
/// Entries follow the sector propagator element by element, written with
/// `sin(2Δ̃t)/(2Δ̃)` and `sin²(Δ̃t)/(2Δ̃²)` so that `Δ̃ → 0` is finite.
pub fn bloch_rotation(bias: f64, delta: f64, t: f64) -> [[f64; 3]; 3] {
    let gap = half_gap(bias, delta);
    let c2 = (2.0 * gap * t).cos();
    // sin(2Δ̃t) / (2Δ̃)
    let s2 = t * sinc(2.0 * gap * t);
    // sin²(Δ̃t) / (2Δ̃²)
    let sinc1 = sinc(gap * t);
    let q = 0.5 * t * t * sinc1 * sinc1;
    [
        [c2 + delta * delta * q, -bias * s2, delta * bias * q],
        [bias * s2, c2, -delta * s2],
        [delta * bias * q, delta * s2, c2 + bias * bias * q],
    ]
}

fn mat3_vec(m: &[[f64; 3]; 3], p: &BlochVector) -> BlochVector {
    let v = p.as_array();
    BlochVector::from_array(core::array::from_fn(|i| {
        m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2]
    }))
}

/// `M(t) / Z` together with `ln Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorMatrix {
    /// Normalized elements; `normalized[i][j] = M_ij / Z`.
    pub normalized: [[f64; 3]; 3],
    pub log_norm: f64,
}

impl PropagatorMatrix {
    pub fn apply(&self, p: &BlochVector) -> BlochVector {
        mat3_vec(&self.normalized, p)
    }

    /// Unnormalized `M_ij`; overflows for very large baths.
    pub fn element(&self, i: usize, j: usize) -> f64 {
        self.normalized[i][j] * self.log_norm.exp()
    }
}

/// Sectors sharing one value of `e_n` evolve identically, so the evolver
/// keeps one entry per distinct coupling eigenvalue.
#[derive(Debug, Clone, Copy)]
struct BiasClass {
    bias: f64,
    p_woc: f64,
    p_wc: f64,
    /// Normalized prepared state of the sector (correlated preparation).
    start: BlochVector,
}

/// Precomputed sector data for evaluating both preparations at any time.
#[derive(Debug, Clone)]
pub struct SingleQubitEvolver {
    delta0: f64,
    classes: Vec<BiasClass>,
    start_woc: BlochVector,
    start_wc: BlochVector,
    log_z_env: f64,
    log_z_tot: f64,
}

impl SingleQubitEvolver {
    pub fn new(sys: &SystemSpec, ens: &BathEnsemble) -> Result<Self> {
        sys.validate()?;
        if ens.terms.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let beta = ens.beta;

        let (es, log_k): (Vec<f64>, Vec<f64>) = ens.coupling_classes().into_iter().unzip();

        let log_a: Vec<f64> = es
            .iter()
            .map(|e| ln_2cosh(beta * half_gap(sys.eps0 + e, sys.delta0)))
            .collect();
        let log_ak: Vec<f64> = log_k.iter().zip(&log_a).map(|(k, a)| k + a).collect();
        let woc = normalize_log_weights(&log_k);
        let wc = normalize_log_weights(&log_ak);

        let classes: Vec<BiasClass> = es
            .iter()
            .enumerate()
            .map(|(i, e)| BiasClass {
                bias: sys.eps + e,
                p_woc: woc.probs[i],
                p_wc: wc.probs[i],
                start: prepared_bloch(sys.eps0 + e, sys.delta0, beta),
            })
            .collect();

        let mut start_wc = [0.0; 3];
        for c in &classes {
            for (acc, v) in start_wc.iter_mut().zip(c.start.as_array()) {
                *acc += c.p_wc * v;
            }
        }

        Ok(Self {
            delta0: sys.delta0,
            start_woc: initial_bloch_woc(sys, beta),
            start_wc: BlochVector::from_array(start_wc),
            classes,
            log_z_env: woc.log_total,
            log_z_tot: wc.log_total,
        })
    }

    /// Number of distinct coupling eigenvalues.
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn initial_woc(&self) -> BlochVector {
        self.start_woc
    }

    pub fn initial_wc(&self) -> BlochVector {
        self.start_wc
    }

    /// `ln Z_E`.
    pub fn log_z_env(&self) -> f64 {
        self.log_z_env
    }

    /// `ln Z_tot = ln Σ_n A_n k_n`.
    pub fn log_z_tot(&self) -> f64 {
        self.log_z_tot
    }

    fn weighted_rotation(&self, t: f64, weight: impl Fn(&BiasClass) -> f64) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for c in &self.classes {
            let w = weight(c);
            let r = bloch_rotation(c.bias, self.delta0, t);
            for i in 0..3 {
                for j in 0..3 {
                    m[i][j] += w * r[i][j];
                }
            }
        }
        m
    }

    pub fn propagator_woc(&self, t: f64) -> PropagatorMatrix {
        PropagatorMatrix {
            normalized: self.weighted_rotation(t, |c| c.p_woc),
            log_norm: self.log_z_env,
        }
    }

    /// Compact correlated propagator with `A_n k_n` weights.
    pub fn propagator_wc(&self, t: f64) -> PropagatorMatrix {
        PropagatorMatrix {
            normalized: self.weighted_rotation(t, |c| c.p_wc),
            log_norm: self.log_z_tot,
        }
    }

    pub fn woc_at(&self, t: f64) -> BlochVector {
        self.propagator_woc(t).apply(&self.start_woc)
    }

    /// Exact correlated evolution: each sector rotates its own prepared state.
    pub fn wc_at(&self, t: f64) -> BlochVector {
        let mut acc = [0.0; 3];
        for c in &self.classes {
            let p = mat3_vec(&bloch_rotation(c.bias, self.delta0, t), &c.start);
            for (a, v) in acc.iter_mut().zip(p.as_array()) {
                *a += c.p_wc * v;
            }
        }
        BlochVector::from_array(acc)
    }

    /// Summed correlated propagator applied to the summed initial vector.
    /// Differs from [`Self::wc_at`] whenever sectors start in different states.
    pub fn wc_compact_at(&self, t: f64) -> BlochVector {
        self.propagator_wc(t).apply(&self.start_wc)
    }
}

pub fn propagator_woc(sys: &SystemSpec, ens: &BathEnsemble, t: f64) -> Result<PropagatorMatrix> {
    Ok(SingleQubitEvolver::new(sys, ens)?.propagator_woc(t))
}

pub fn propagator_wc(sys: &SystemSpec, ens: &BathEnsemble, t: f64) -> Result<PropagatorMatrix> {
    Ok(SingleQubitEvolver::new(sys, ens)?.propagator_wc(t))
}

fn bloch_channels(series: &mut TimeSeries, suffix: &str, points: &[BlochVector]) {
    for (axis, pick) in [
        ("px", (|p: &BlochVector| p.x) as fn(&BlochVector) -> f64),
        ("py", |p| p.y),
        ("pz", |p| p.z),
    ] {
        series.push_channel(
            format!("{axis}_{suffix}"),
            points.iter().map(pick).collect(),
        );
    }
}

/// Channels `px_woc`, `py_woc`, `pz_woc`.
pub fn evolve_woc(sys: &SystemSpec, ens: &BathEnsemble, times: &[f64]) -> Result<TimeSeries> {
    check_grid(times)?;
    let ev = SingleQubitEvolver::new(sys, ens)?;
    let mut series = TimeSeries::new(times.to_vec());
    let points: Vec<_> = times.iter().map(|&t| ev.woc_at(t)).collect();
    bloch_channels(&mut series, "woc", &points);
    series.meta.insert("variant".into(), "woc".into());
    series
        .meta
        .insert("bath".into(), ens.source.as_str().into());
    Ok(series)
}

/// Channels `p*_wc` (exact) and `p*_wc_compact` (summed propagator on
/// summed initial vector).
pub fn evolve_wc(sys: &SystemSpec, ens: &BathEnsemble, times: &[f64]) -> Result<TimeSeries> {
    check_grid(times)?;
    let ev = SingleQubitEvolver::new(sys, ens)?;
    let mut series = TimeSeries::new(times.to_vec());
    let exact: Vec<_> = times.iter().map(|&t| ev.wc_at(t)).collect();
    let compact: Vec<_> = times.iter().map(|&t| ev.wc_compact_at(t)).collect();
    bloch_channels(&mut series, "wc", &exact);
    bloch_channels(&mut series, "wc_compact", &compact);
    series.meta.insert("variant".into(), "wc".into());
    series
        .meta
        .insert("bath".into(), ens.source.as_str().into());
    Ok(series)
}

/// Reference evolution built only from matrix exponentials, one bath
/// configuration at a time. Produces `p*_woc` or `p*_wc` channels.
pub fn evolve_oracle(
    sys: &SystemSpec,
    spec: &BathSpec,
    times: &[f64],
    correlated: bool,
    cap: usize,
) -> Result<TimeSeries> {
    sys.validate()?;
    spec.validate()?;
    check_grid(times)?;
    let n = spec.n_spins;
    if n > cap || n >= usize::BITS as usize {
        return Err(Error::CapExceeded { n_spins: n, cap });
    }
    let beta = spec.beta;
    let r = exp_unitary(&SIGMA_Y, -FRAC_PI_4)?;
    let bonds = spec.bond_count();

    let h_pre = system_hamiltonian(sys.eps0, sys.delta0);
    let g = exp_gibbs(&h_pre, beta)?;
    let rho_uncorrelated = (r * g * r.dagger()).scale(1.0 / g.trace().re);

    let mut log_weights = Vec::with_capacity(1 << n);
    let mut sectors = Vec::with_capacity(1 << n);
    for bits in 0usize..1 << n {
        let spin = |i: usize| if bits >> i & 1 == 0 { 1.0 } else { -1.0 };
        let e: f64 = (0..n).map(|i| spin(i) * spec.couplings[i]).sum();
        let eps: f64 = (0..n).map(|i| spin(i) * spec.splittings[i]).sum();
        let lam: f64 = (0..bonds)
            .map(|i| spec.ising[i] * spin(i) * spin((i + 1) % n))
            .sum();
        let mut log_w = -beta * (0.5 * eps + lam);
        let rho0 = if correlated {
            let h = system_hamiltonian(sys.eps0 + e, sys.delta0);
            let floor = -0.5 * ((sys.eps0 + e).abs() + sys.delta0);
            let g = exp_gibbs(&(h - IDENTITY2.scale(floor)), beta)?;
            let tr = g.trace().re;
            log_w += tr.ln() - beta * floor;
            (r * g * r.dagger()).scale(1.0 / tr)
        } else {
            rho_uncorrelated
        };
        log_weights.push(log_w);
        let h_after = system_hamiltonian(sys.eps + e, sys.delta0);
        sectors.push((herm_eig(&h_after)?, rho0));
    }
    let probs = normalize_log_weights(&log_weights).probs;

    let mut points = Vec::with_capacity(times.len());
    for &t in times {
        let mut rho = CMat2::zeros();
        for ((eig, rho0), &p) in sectors.iter().zip(&probs) {
            let u = eig.propagator(t);
            rho = rho + (u * *rho0 * u.dagger()).scale(p);
        }
        points.push(bloch_from_rho(&rho.hermitian_part())?);
    }
    let suffix = if correlated { "wc" } else { "woc" };
    let mut series = TimeSeries::new(times.to_vec());
    bloch_channels(&mut series, suffix, &points);
    series.meta.insert("variant".into(), suffix.into());
    series.meta.insert("bath".into(), "oracle".into());
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{collapse_uniform_free, enumerate_bruteforce, Boundary};
    use crate::qmatrix::{rho_from_bloch, CMat2};
    use alloc::vec;

    const SYS: SystemSpec = SystemSpec {
        eps0: 4.0,
        eps: 2.0,
        delta0: 1.0,
    };

    #[test]
    fn negative_tunneling_rejected() {
        let sys = SystemSpec {
            delta0: -1.0,
            ..SYS
        };
        assert!(matches!(
            sys.validate(),
            Err(Error::InvalidSystem {
                field: "delta0",
                ..
            })
        ));
    }

    #[test]
    fn shifted_hamiltonian_biases() {
        let t = BathTerm {
            e: 1.0,
            eps: 0.0,
            lam: 0.0,
            log_mult: 0.0,
        };
        let (pre, post) = shifted_hamiltonians(&SYS, &t);
        assert_eq!(pre, system_hamiltonian(5.0, 1.0));
        assert_eq!(post, system_hamiltonian(3.0, 1.0));
        let zero = BathTerm { e: 0.0, ..t };
        assert_eq!(
            shifted_hamiltonians(&SYS, &zero).1,
            system_hamiltonian(SYS.eps, SYS.delta0)
        );
        let w = herm_eig(&post).unwrap().values;
        let gap = 0.5 * (9.0f64 + 1.0).sqrt();
        assert!((w[0] + gap).abs() < 1e-14 && (w[1] - gap).abs() < 1e-14);
    }

    #[test]
    fn pulse_maps_down_z_to_up_x() {
        let r = prep_pulse_r();
        assert!((r * r.dagger()).max_abs_diff(&IDENTITY2) < 1e-15);
        let down = CMat2::diag_real(&[0.0, 1.0]);
        let p = bloch_from_rho(&down.conjugate_by(&r)).unwrap();
        assert!(p.max_abs_diff(&BlochVector::new(1.0, 0.0, 0.0)) < 1e-15);
        let r2 = exp_unitary(&SIGMA_Y, -core::f64::consts::FRAC_PI_2).unwrap();
        assert!((r * r).max_abs_diff(&r2) < 1e-15);
        assert!(exp_unitary(&SIGMA_Y, -FRAC_PI_4).unwrap().max_abs_diff(&r) < 1e-15);
    }

    #[test]
    fn prepared_state_matches_operator_construction() {
        let beta = 1.0;
        let g = exp_gibbs(&system_hamiltonian(SYS.eps0, SYS.delta0), beta).unwrap();
        let rho = g.scale(1.0 / g.trace().re).conjugate_by(&prep_pulse_r());
        let p = bloch_from_rho(&rho).unwrap();
        assert!(p.max_abs_diff(&initial_bloch_woc(&SYS, beta)) < 1e-14);
    }

    #[test]
    fn infinite_temperature_limit() {
        let p = initial_bloch_woc(&SYS, 1e-8);
        assert!(p.norm() < 1e-7);
        let p = prepared_bloch(0.0, 0.0, 3.0);
        assert_eq!(p, BlochVector::new(0.0, 0.0, 0.0));
    }

    #[test]
    fn rotation_matches_unitary_conjugation() {
        let (bias, delta, t) = (1.7, 0.6, 2.3);
        let u = exp_unitary(&system_hamiltonian(bias, delta), t).unwrap();
        let p0 = BlochVector::new(0.3, -0.4, 0.5);
        let expected = bloch_from_rho(&rho_from_bloch(&p0).conjugate_by(&u)).unwrap();
        let got = mat3_vec(&bloch_rotation(bias, delta, t), &p0);
        assert!(got.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn rotation_degenerate_gap_is_identity() {
        let r = bloch_rotation(0.0, 0.0, 5.0);
        assert_eq!(r, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    }

    #[test]
    fn propagator_structure() {
        let spec = BathSpec::uniform(6, 0.3, 1.0, 0.0, Boundary::Periodic, 1.0);
        let ens = collapse_uniform_free(&spec).unwrap();
        let m0 = propagator_woc(&SYS, &ens, 0.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let id = if i == j { 1.0 } else { 0.0 };
                assert!((m0.normalized[i][j] - id).abs() < 1e-14);
            }
        }
        assert!((m0.log_norm - ens.log_partition()).abs() < 1e-12);
        let m = propagator_wc(&SYS, &ens, 1.3).unwrap().normalized;
        assert_eq!(m[0][1], -m[1][0]);
        assert_eq!(m[1][2], -m[2][1]);
        assert_eq!(m[0][2], m[2][0]);
    }

    #[test]
    fn single_sector_is_periodic() {
        let spec = BathSpec::uniform(1, 0.0, 0.0, 0.0, Boundary::Open, 1.0);
        let ens = enumerate_bruteforce(&spec).unwrap();
        let ev = SingleQubitEvolver::new(&SYS, &ens).unwrap();
        assert_eq!(ev.class_count(), 1);
        let period = core::f64::consts::PI / half_gap(SYS.eps, SYS.delta0);
        for t in [0.3, 1.1, 2.9] {
            assert!(ev.woc_at(t).max_abs_diff(&ev.woc_at(t + period)) < 1e-12);
        }
    }

    #[test]
    fn empty_inputs() {
        let spec = BathSpec::uniform(2, 0.1, 1.0, 0.0, Boundary::Periodic, 1.0);
        let mut ens = collapse_uniform_free(&spec).unwrap();
        assert!(matches!(evolve_woc(&SYS, &ens, &[]), Err(Error::EmptyGrid)));
        ens.terms.clear();
        assert!(matches!(
            evolve_wc(&SYS, &ens, &[0.0]),
            Err(Error::EmptyEnsemble)
        ));
    }

    #[test]
    fn compact_channel_present() {
        let spec = BathSpec::uniform(4, 0.5, 1.0, 0.0, Boundary::Periodic, 2.0);
        let ens = collapse_uniform_free(&spec).unwrap();
        let s = evolve_wc(&SYS, &ens, &[0.0, 1.0, 2.0]).unwrap();
        let names: Vec<&str> = s.channels.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(
            names,
            vec![
                "px_wc",
                "py_wc",
                "pz_wc",
                "px_wc_compact",
                "py_wc_compact",
                "pz_wc_compact"
            ]
        );
        // Both forms agree at t = 0.
        assert!(
            (s.channel("px_wc").unwrap()[0] - s.channel("px_wc_compact").unwrap()[0]).abs() < 1e-15
        );
    }
}
