//! Two central qubits sharing one spin bath.
//!
//! Both qubits couple to the same bath operator, so bath sector `n` shifts
//! each qubit's bias by `e_n` (times an optional per-qubit scale). The pair
//! is entangled at `t = 0` by the pulse `CZ = e^{iπ/4 (σx⊗𝟙 + 𝟙⊗σx − σx⊗σx)}`
//! and then evolves under `H_{S,n}⁽¹⁾ + H_{S,n}⁽²⁾ + κ σz⊗σz` in every sector.
//! Scalar phases from the bath energy cancel in `U ρ U†` and are dropped.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;

#[allow(unused_imports)] // float math under no_std; shadowed when std is linked
use num_traits::Float;

use crate::bath::{log_weight, BathEnsemble};
use crate::logsum::normalize_log_weights;
use crate::qmatrix::{
    exp_unitary, gibbs_state, herm_eig, jacobi_eig, kron, CMat, CMat4, HermEig, IDENTITY2, SIGMA_X,
    SIGMA_Y, SIGMA_Z,
};
use crate::series::check_grid;
use crate::single::system_hamiltonian;
use crate::{Error, Result};

/// Concurrence below this counts as "no entanglement" in [`esd_scan`].
pub const DEFAULT_ESD_TOL: f64 = 1e-9;

/// Tolerance on trace, Hermiticity and negative eigenvalues of a state.
pub const STATE_TOL: f64 = 1e-10;

/// Negative eigenvalues smaller in magnitude than this are round-off and
/// are clipped silently.
pub const CLIP_SILENT: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitSpec {
    pub eps0: [f64; 2],
    pub eps: [f64; 2],
    pub delta0: [f64; 2],
    pub kappa: f64,
    /// Multiplier on `e_n` seen by each qubit; `[1, 1]` is a common bath.
    pub coupling_scale: [f64; 2],
}

impl TwoQubitSpec {
    pub fn symmetric(eps0: f64, eps: f64, delta0: f64, kappa: f64) -> Self {
        Self {
            eps0: [eps0; 2],
            eps: [eps; 2],
            delta0: [delta0; 2],
            kappa,
            coupling_scale: [1.0; 2],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("eps0", self.eps0),
            ("eps", self.eps),
            ("delta0", self.delta0),
            ("coupling_scale", self.coupling_scale),
            ("kappa", [self.kappa; 2]),
        ];
        for (field, pair) in named {
            if pair.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSystem {
                    field,
                    reason: "must be finite".into(),
                });
            }
        }
        if self.delta0.iter().any(|&d| d < 0.0) {
            return Err(Error::InvalidSystem {
                field: "delta0",
                reason: format!("must be >= 0, got {:?}", self.delta0),
            });
        }
        Ok(())
    }

    fn biases(&self, base: [f64; 2], e: f64) -> [f64; 2] {
        [
            base[0] + self.coupling_scale[0] * e,
            base[1] + self.coupling_scale[1] * e,
        ]
    }
}

/// `σx⊗𝟙 + 𝟙⊗σx − σx⊗σx`.
pub fn cz_generator() -> CMat4 {
    kron(&SIGMA_X, &IDENTITY2) + kron(&IDENTITY2, &SIGMA_X) - kron(&SIGMA_X, &SIGMA_X)
}

/// `e^{iπ/4 (σx⊗𝟙 + 𝟙⊗σx − σx⊗σx)}`.
pub fn cz_pulse() -> CMat4 {
    exp_unitary(&cz_generator().scale(FRAC_PI_4), -1.0).expect("generator is Hermitian")
}

/// `H⁽¹⁾ + H⁽²⁾ + κ σz⊗σz` with `H⁽ⁱ⁾ = (bias_i/2)σz + (Δ₀ᵢ/2)σx`.
pub fn pair_hamiltonian(bias: [f64; 2], delta0: [f64; 2], kappa: f64) -> CMat4 {
    kron(&system_hamiltonian(bias[0], delta0[0]), &IDENTITY2)
        + kron(&IDENTITY2, &system_hamiltonian(bias[1], delta0[1]))
        + kron(&SIGMA_Z, &SIGMA_Z).scale(kappa)
}

/// One bath term after preparation: normalized pair state and
/// `ln(multiplicity · k_n · A_n)` (`A_n = 1` without correlations).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreparedTerm {
    pub e: f64,
    pub log_weight: f64,
    pub rho: CMat4,
}

/// Prepared pair states, one per ensemble term.
pub fn initial_state_2q(
    spec: &TwoQubitSpec,
    ens: &BathEnsemble,
    correlated: bool,
) -> Result<Vec<PreparedTerm>> {
    spec.validate()?;
    if ens.terms.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let cz = cz_pulse();
    let bare = gibbs_state(
        &pair_hamiltonian(spec.eps0, spec.delta0, spec.kappa),
        ens.beta,
    )?;
    let bare_rho = bare.rho.conjugate_by(&cz);
    ens.terms
        .iter()
        .map(|t| {
            let lw = log_weight(t, ens.beta);
            if correlated {
                let h = pair_hamiltonian(spec.biases(spec.eps0, t.e), spec.delta0, spec.kappa);
                let g = gibbs_state(&h, ens.beta)?;
                Ok(PreparedTerm {
                    e: t.e,
                    log_weight: lw + g.log_partition,
                    rho: g.rho.conjugate_by(&cz),
                })
            } else {
                Ok(PreparedTerm {
                    e: t.e,
                    log_weight: lw,
                    rho: bare_rho,
                })
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Propagation {
    /// Factorized when `κ = 0`, full 4×4 otherwise.
    #[default]
    Auto,
    /// `U⁽¹⁾ ⊗ U⁽²⁾`; only valid for `κ = 0`.
    Factorized,
    /// Full 4×4 exponential.
    General,
}

#[derive(Debug, Clone, Copy)]
enum SectorPropagator {
    Factorized(HermEig<2>, HermEig<2>),
    General(HermEig<4>),
}

impl SectorPropagator {
    fn at(&self, t: f64) -> CMat4 {
        match self {
            SectorPropagator::Factorized(a, b) => kron(&a.propagator(t), &b.propagator(t)),
            SectorPropagator::General(e) => e.propagator(t),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct PairClass {
    p_woc: f64,
    p_wc: f64,
    start_wc: CMat4,
    propagator: SectorPropagator,
}

/// Precomputed sector data for evaluating both preparations at any time.
#[derive(Debug, Clone)]
pub struct TwoQubitEvolver {
    classes: Vec<PairClass>,
    start_woc: CMat4,
}

impl TwoQubitEvolver {
    pub fn new(spec: &TwoQubitSpec, ens: &BathEnsemble, propagation: Propagation) -> Result<Self> {
        spec.validate()?;
        if ens.terms.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let factorized = match propagation {
            Propagation::Auto => spec.kappa == 0.0,
            Propagation::Factorized if spec.kappa != 0.0 => {
                return Err(Error::InvalidSystem {
                    field: "kappa",
                    reason: "factorized propagation needs kappa = 0".into(),
                })
            }
            Propagation::Factorized => true,
            Propagation::General => false,
        };
        let beta = ens.beta;
        let cz = cz_pulse();

        let (es, log_k): (Vec<f64>, Vec<f64>) = ens.coupling_classes().into_iter().unzip();

        let mut starts = Vec::with_capacity(es.len());
        let mut log_ak = Vec::with_capacity(es.len());
        for (e, lk) in es.iter().zip(&log_k) {
            let h = pair_hamiltonian(spec.biases(spec.eps0, *e), spec.delta0, spec.kappa);
            let g = gibbs_state(&h, beta)?;
            starts.push(g.rho.conjugate_by(&cz));
            log_ak.push(lk + g.log_partition);
        }
        let woc = normalize_log_weights(&log_k);
        let wc = normalize_log_weights(&log_ak);

        let mut classes = Vec::with_capacity(es.len());
        for (i, e) in es.iter().enumerate() {
            let bias = spec.biases(spec.eps, *e);
            let propagator = if factorized {
                SectorPropagator::Factorized(
                    herm_eig(&system_hamiltonian(bias[0], spec.delta0[0]))?,
                    herm_eig(&system_hamiltonian(bias[1], spec.delta0[1]))?,
                )
            } else {
                SectorPropagator::General(herm_eig(&pair_hamiltonian(
                    bias,
                    spec.delta0,
                    spec.kappa,
                ))?)
            };
            classes.push(PairClass {
                p_woc: woc.probs[i],
                p_wc: wc.probs[i],
                start_wc: starts[i],
                propagator,
            });
        }

        let bare = gibbs_state(&pair_hamiltonian(spec.eps0, spec.delta0, spec.kappa), beta)?;
        Ok(Self {
            classes,
            start_woc: bare.rho.conjugate_by(&cz),
        })
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn initial(&self, correlated: bool) -> CMat4 {
        if correlated {
            self.classes
                .iter()
                .fold(CMat4::zeros(), |acc, c| acc + c.start_wc.scale(c.p_wc))
        } else {
            self.start_woc
        }
    }

    /// Reduced pair state at time `t`.
    pub fn state_at(&self, t: f64, correlated: bool) -> CMat4 {
        let mut rho = CMat4::zeros();
        for c in &self.classes {
            let u = c.propagator.at(t);
            let (p, start) = if correlated {
                (c.p_wc, &c.start_wc)
            } else {
                (c.p_woc, &self.start_woc)
            };
            rho = rho + start.conjugate_by(&u).scale(p);
        }
        rho.hermitian_part()
    }
}

pub fn evolve_2q(
    spec: &TwoQubitSpec,
    ens: &BathEnsemble,
    times: &[f64],
    correlated: bool,
    propagation: Propagation,
) -> Result<Vec<CMat4>> {
    check_grid(times)?;
    let ev = TwoQubitEvolver::new(spec, ens, propagation)?;
    Ok(times.iter().map(|&t| ev.state_at(t, correlated)).collect())
}

/// Eigenvalues of a two-qubit state after checking trace and Hermiticity;
/// negatives down to `-STATE_TOL` are tolerated but reported as-is.
pub fn state_spectrum(rho: &CMat4) -> Result<[f64; 4]> {
    Ok(checked_eig(rho)?.values)
}

fn checked_eig(rho: &CMat4) -> Result<HermEig<4>> {
    let trace = rho.trace().re;
    if (trace - 1.0).abs() > STATE_TOL {
        return Err(Error::NotAState {
            reason: format!("trace is {trace}"),
        });
    }
    let defect = rho.hermiticity_defect();
    if defect > STATE_TOL {
        return Err(Error::NotAState {
            reason: format!("not Hermitian (defect {defect:e})"),
        });
    }
    let eig = herm_eig(&rho.hermitian_part())?;
    if eig.values[0] < -STATE_TOL {
        return Err(Error::NotAState {
            reason: format!("negative eigenvalue {:e}", eig.values[0]),
        });
    }
    Ok(eig)
}

fn clip_negative(w: f64) -> f64 {
    if w < -CLIP_SILENT {
        log::warn!("clipping negative eigenvalue {w:e} to zero");
    }
    w.max(0.0)
}

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)`.
///
/// With `ρ = Σᵢ |vᵢ⟩⟨vᵢ|` (subnormalized eigenvectors), the `λᵢ` are the
/// singular values of `τᵢⱼ = vᵢᵀ (σy⊗σy) vⱼ`. They are read off as the
/// non-negative eigenvalues of the Hermitian dilation `[[0, τ], [τ†, 0]]`,
/// which keeps small `λᵢ` accurate to machine precision instead of taking
/// square roots of rounding noise.
pub fn concurrence(rho: &CMat4) -> Result<f64> {
    let eig = checked_eig(rho)?;
    let mut v = eig.vectors;
    for k in 0..4 {
        let s = clip_negative(eig.values[k]).sqrt();
        for i in 0..4 {
            v[(i, k)] *= s;
        }
    }
    let yy = kron(&SIGMA_Y, &SIGMA_Y);
    let mut vt = v;
    for i in 0..4 {
        for j in 0..4 {
            vt[(i, j)] = v[(j, i)];
        }
    }
    let tau = vt * yy * v;
    let mut dilation = CMat::<8>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            dilation[(i, 4 + j)] = tau[(i, j)];
            dilation[(4 + j, i)] = tau[(i, j)].conj();
        }
    }
    let mut lam = jacobi_eig(&dilation).values;
    lam.sort_by(|a, b| b.total_cmp(a));
    let l = |k: usize| lam[k].max(0.0);
    Ok((l(0) - l(1) - l(2) - l(3)).clamp(0.0, 1.0))
}

/// Concurrence on a time grid with its sudden-death intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceSeries {
    pub grid: Vec<f64>,
    pub c: Vec<f64>,
    pub esd_intervals: Vec<(f64, f64)>,
}

pub fn concurrence_series(
    spec: &TwoQubitSpec,
    ens: &BathEnsemble,
    times: &[f64],
    correlated: bool,
) -> Result<ConcurrenceSeries> {
    let states = evolve_2q(spec, ens, times, correlated, Propagation::Auto)?;
    let c = states.iter().map(concurrence).collect::<Result<Vec<_>>>()?;
    let esd_intervals = esd_scan(times, &c, DEFAULT_ESD_TOL);
    Ok(ConcurrenceSeries {
        grid: times.to_vec(),
        c,
        esd_intervals,
    })
}

/// Maximal runs of grid points with `c ≤ tol`, as `(first, last)` times.
pub fn esd_scan(grid: &[f64], c: &[f64], tol: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut open: Option<usize> = None;
    for (k, &v) in c.iter().enumerate() {
        match (v <= tol, open) {
            (true, None) => open = Some(k),
            (false, Some(s)) => {
                out.push((grid[s], grid[k - 1]));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        out.push((grid[s], grid[c.len() - 1]));
    }
    out
}
