//! Spin-bath configurations and their Boltzmann weights.
//!
//! A bath configuration `n` assigns each environment spin up (`n_i = 0`) or
//! down (`n_i = 1`). Everything the dynamics needs from a configuration is
//! the triple
//!
//! * `e   = Σ (-1)^{n_i} g_i`                         (coupling eigenvalue)
//! * `eps = Σ (-1)^{n_i} ε_i`                         (bath splitting eigenvalue)
//! * `lam = Σ α_i (-1)^{n_i} (-1)^{n_{i+1}}`          (Ising eigenvalue)
//!
//! so a [`BathEnsemble`] stores distinct triples with a log-multiplicity.
//! Uniform baths collapse from `2^N` configurations to `O(N)` classes
//! (free spins, indexed by magnetization) or `O(N²)` classes (Ising ring or
//! chain, indexed by magnetization and bond sum).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::logsum::{log_add_exp, logsumexp};
use crate::{Error, Result};
#[allow(unused_imports)] // float math under no_std; shadowed when std is linked
use num_traits::Float;

/// Default ceiling on `N` for brute-force enumeration.
pub const DEFAULT_BRUTEFORCE_CAP: usize = 24;

/// Largest `N` for which the Ising class counts are tallied in exact integers.
pub const EXACT_DP_MAX_SPINS: usize = 64;

/// Tolerance on `ln Σ multiplicity = N ln 2`.
pub const COUNT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Bond `i` couples spins `i` and `(i + 1) mod N`; `N` bonds.
    #[default]
    Periodic,
    /// Bond `i` couples spins `i` and `i + 1` for `i < N - 1`; the last
    /// `α` entry has no partner spin and is ignored.
    Open,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec {
    pub n_spins: usize,
    pub couplings: Vec<f64>,
    pub splittings: Vec<f64>,
    pub ising: Vec<f64>,
    pub boundary: Boundary,
    pub beta: f64,
}

/// Parameters of a bath whose spins are all alike.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformParams {
    pub coupling: f64,
    pub splitting: f64,
    pub ising: f64,
}

impl BathSpec {
    pub fn uniform(
        n_spins: usize,
        coupling: f64,
        splitting: f64,
        ising: f64,
        boundary: Boundary,
        beta: f64,
    ) -> Self {
        Self {
            n_spins,
            couplings: vec![coupling; n_spins],
            splittings: vec![splitting; n_spins],
            ising: vec![ising; n_spins],
            boundary,
            beta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_spins == 0 {
            return Err(invalid("n_spins", "must be at least 1"));
        }
        for (field, list) in [
            ("couplings", &self.couplings),
            ("splittings", &self.splittings),
            ("ising", &self.ising),
        ] {
            if list.len() != self.n_spins {
                return Err(invalid(
                    field,
                    &format!(
                        "has {} entries, expected n_spins = {}",
                        list.len(),
                        self.n_spins
                    ),
                ));
            }
            if let Some(i) = list.iter().position(|v| !v.is_finite()) {
                return Err(invalid(field, &format!("entry {i} is not finite")));
            }
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(invalid("beta", "must be positive and finite"));
        }
        Ok(())
    }

    /// The `α` entry that an open chain has no bond for, if any.
    pub fn ignored_ising_entry(&self) -> Option<f64> {
        match self.boundary {
            Boundary::Open => self.ising.last().copied(),
            Boundary::Periodic => None,
        }
    }

    pub fn bond_count(&self) -> usize {
        bond_count(self.n_spins, self.boundary)
    }

    fn active_ising(&self) -> &[f64] {
        &self.ising[..self.bond_count()]
    }

    /// Common parameters when every spin (and every active bond) is alike.
    pub fn uniform_params(&self) -> Option<UniformParams> {
        let all_eq = |v: &[f64]| v.windows(2).all(|w| w[0] == w[1]);
        let active = self.active_ising();
        if !(all_eq(&self.couplings) && all_eq(&self.splittings) && all_eq(active)) {
            return None;
        }
        Some(UniformParams {
            coupling: self.couplings.first().copied().unwrap_or(0.0),
            splitting: self.splittings.first().copied().unwrap_or(0.0),
            ising: active.first().copied().unwrap_or(0.0),
        })
    }
}

fn invalid(field: &'static str, reason: &str) -> Error {
    Error::InvalidBath {
        field,
        reason: reason.into(),
    }
}

fn bond_count(n_spins: usize, boundary: Boundary) -> usize {
    match boundary {
        Boundary::Periodic => n_spins,
        Boundary::Open => n_spins.saturating_sub(1),
    }
}

/// One equivalence class of bath configurations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathTerm {
    pub e: f64,
    pub eps: f64,
    pub lam: f64,
    /// Natural log of the number of configurations in the class.
    pub log_mult: f64,
}

impl BathTerm {
    fn triple_cmp(&self, other: &Self) -> Ordering {
        // `+ 0.0` folds -0.0 into 0.0, which `total_cmp` would keep apart.
        let cmp = |a: f64, b: f64| (a + 0.0).total_cmp(&(b + 0.0));
        cmp(self.e, other.e)
            .then(cmp(self.eps, other.eps))
            .then(cmp(self.lam, other.lam))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleSource {
    Bruteforce,
    UniformFree,
    UniformIsing,
}

impl EnsembleSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            EnsembleSource::Bruteforce => "bruteforce",
            EnsembleSource::UniformFree => "uniform_free",
            EnsembleSource::UniformIsing => "uniform_ising",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathEnsemble {
    pub terms: Vec<BathTerm>,
    pub source: EnsembleSource,
    /// `ln Σ multiplicity`; equals `N ln 2` when every configuration is counted once.
    pub total_log_count: f64,
    pub n_spins: usize,
    pub beta: f64,
}

impl BathEnsemble {
    fn new(terms: Vec<BathTerm>, source: EnsembleSource, n_spins: usize, beta: f64) -> Self {
        let total_log_count = logsumexp(terms.iter().map(|t| t.log_mult));
        Self {
            terms,
            source,
            total_log_count,
            n_spins,
            beta,
        }
    }

    /// `|ln Σ multiplicity - N ln 2|`.
    pub fn count_defect(&self) -> f64 {
        (self.total_log_count - self.n_spins as f64 * core::f64::consts::LN_2).abs()
    }

    /// `ln Z_E = ln Σ_n k_n`.
    pub fn log_partition(&self) -> f64 {
        logsumexp(self.terms.iter().map(|t| log_weight(t, self.beta)))
    }

    /// Terms grouped by coupling eigenvalue `e`, ascending, as
    /// `(e, ln Σ_{n: e_n = e} multiplicity · k_n)`.
    ///
    /// The reduced qubit dynamics depend on a sector only through `e_n` and
    /// its weight, so this is all the evolution needs.
    pub fn coupling_classes(&self) -> Vec<(f64, f64)> {
        let mut terms: Vec<&BathTerm> = self.terms.iter().collect();
        terms.sort_by(|a, b| a.e.total_cmp(&b.e));
        let mut out = Vec::new();
        let mut start = 0;
        while start < terms.len() {
            let e = terms[start].e;
            let len = terms[start..].iter().take_while(|t| t.e == e).count();
            let group = &terms[start..start + len];
            out.push((e, logsumexp(group.iter().map(|t| log_weight(t, self.beta)))));
            start += len;
        }
        out
    }

    /// `Σ_n w_n f(term) / Σ_n w_n` with `w_n = k_n · multiplicity`.
    pub fn thermal_average(&self, f: impl Fn(&BathTerm) -> f64) -> f64 {
        let logs: Vec<f64> = self
            .terms
            .iter()
            .map(|t| log_weight(t, self.beta))
            .collect();
        let norm = crate::logsum::normalize_log_weights(&logs);
        self.terms
            .iter()
            .zip(&norm.probs)
            .map(|(t, p)| p * f(t))
            .sum()
    }
}

/// `ln(multiplicity · k_n)` with `k_n = e^{-β(eps/2 + lam)}`.
pub fn log_weight(term: &BathTerm, beta: f64) -> f64 {
    term.log_mult - beta * (0.5 * term.eps + term.lam)
}

/// Every one of the `2^N` configurations as its own term.
///
/// Bit `i` of the term index is `n_i`, so terms come out in ascending
/// configuration order.
pub fn enumerate_bruteforce(spec: &BathSpec) -> Result<BathEnsemble> {
    enumerate_bruteforce_capped(spec, DEFAULT_BRUTEFORCE_CAP)
}

pub fn enumerate_bruteforce_capped(spec: &BathSpec, cap: usize) -> Result<BathEnsemble> {
    spec.validate()?;
    let n = spec.n_spins;
    if n > cap || n >= usize::BITS as usize {
        return Err(Error::CapExceeded { n_spins: n, cap });
    }
    let bonds = spec.bond_count();
    let sign = |bits: usize, i: usize| if bits >> i & 1 == 0 { 1.0 } else { -1.0 };
    let terms = (0..1usize << n)
        .map(|bits| {
            let mut term = BathTerm {
                e: 0.0,
                eps: 0.0,
                lam: 0.0,
                log_mult: 0.0,
            };
            for i in 0..n {
                let s = sign(bits, i);
                term.e += s * spec.couplings[i];
                term.eps += s * spec.splittings[i];
            }
            for i in 0..bonds {
                term.lam += spec.ising[i] * sign(bits, i) * sign(bits, (i + 1) % n);
            }
            term
        })
        .collect();
    Ok(BathEnsemble::new(
        terms,
        EnsembleSource::Bruteforce,
        n,
        spec.beta,
    ))
}

/// `ln C(n, k)` via log-gamma. Bitwise symmetric in `k ↔ n - k`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    let lg = |x: usize| libm::lgamma(x as f64 + 1.0);
    let (lo, hi) = (k.min(n - k), k.max(n - k));
    lg(n) - lg(hi) - lg(lo)
}

/// Collapse a bath of identical, non-interacting spins onto magnetization
/// classes `m = N - 2k` (`k` spins down), each with multiplicity `C(N, k)`.
pub fn collapse_uniform_free(spec: &BathSpec) -> Result<BathEnsemble> {
    spec.validate()?;
    let p = spec.uniform_params().ok_or(Error::NotUniform {
        reason: "couplings, splittings and ising strengths must each be equal across spins",
    })?;
    if p.ising != 0.0 {
        return Err(Error::NotUniform {
            reason: "free collapse requires all ising strengths to be zero",
        });
    }
    let n = spec.n_spins;
    let terms = (0..=n)
        .map(|k| {
            let m = n as f64 - 2.0 * k as f64;
            BathTerm {
                e: p.coupling * m,
                eps: p.splitting * m,
                lam: 0.0,
                log_mult: ln_binomial(n, k),
            }
        })
        .collect();
    Ok(finish_collapsed(terms, EnsembleSource::UniformFree, spec))
}

/// Number of configurations in one `(m, s)` class of a uniform Ising bath.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IsingClassCount {
    /// Magnetization `Σ (-1)^{n_i}`.
    pub m: i64,
    /// Bond sum `Σ (-1)^{n_i} (-1)^{n_{i+1}}` over the active bonds.
    pub s: i64,
    pub count: u128,
}

/// Transfer-matrix tally of configurations per `(m, s)` class in exact
/// integers. Available for `n_spins ≤ EXACT_DP_MAX_SPINS`.
pub fn ising_class_counts_exact(
    n_spins: usize,
    boundary: Boundary,
) -> Result<Vec<IsingClassCount>> {
    if n_spins == 0 {
        return Err(invalid("n_spins", "must be at least 1"));
    }
    if n_spins > EXACT_DP_MAX_SPINS {
        return Err(Error::CapExceeded {
            n_spins,
            cap: EXACT_DP_MAX_SPINS,
        });
    }
    let table = ising_dp(n_spins, boundary, 0u128, 1u128, |acc, v| acc + v);
    Ok(table
        .into_iter()
        .map(|(m, s, count)| IsingClassCount { m, s, count })
        .collect())
}

/// Same tally in log space: `(m, s, ln count)`.
fn ising_class_counts_log(n_spins: usize, boundary: Boundary) -> Vec<(i64, i64, f64)> {
    ising_dp(n_spins, boundary, f64::NEG_INFINITY, 0.0, log_add_exp)
}

/// Dynamic program over spin positions. State after placing spins `0..=j`:
/// (first spin, current spin, spins down so far, domain walls so far).
///
/// Counts live in a semiring given by `zero`, `one` and `add`; appending a
/// spin never multiplies, so addition is all that is needed.
fn ising_dp<T: Copy + PartialEq>(
    n: usize,
    boundary: Boundary,
    zero: T,
    one: T,
    add: impl Fn(T, T) -> T,
) -> Vec<(i64, i64, T)> {
    let dim = n + 1;
    let idx = |first: usize, cur: usize, down: usize, walls: usize| {
        ((first * 2 + cur) * dim + down) * dim + walls
    };
    let mut table = vec![zero; 4 * dim * dim];
    table[idx(0, 0, 0, 0)] = one;
    table[idx(1, 1, 1, 0)] = one;
    for j in 1..n {
        let mut next = vec![zero; table.len()];
        for first in 0..2 {
            for cur in 0..2 {
                for down in 0..=j {
                    for walls in 0..j {
                        let c = table[idx(first, cur, down, walls)];
                        if c == zero {
                            continue;
                        }
                        for spin in 0..2 {
                            let slot =
                                idx(first, spin, down + spin, walls + usize::from(spin != cur));
                            next[slot] = add(next[slot], c);
                        }
                    }
                }
            }
        }
        table = next;
    }

    let bonds = bond_count(n, boundary) as i64;
    // Collect by (down, walls) after closing the ring if needed.
    let mut classes = vec![zero; dim * (dim + 1)];
    for first in 0..2 {
        for cur in 0..2 {
            for down in 0..=n {
                for walls in 0..n {
                    let c = table[idx(first, cur, down, walls)];
                    if c == zero {
                        continue;
                    }
                    let closing = match boundary {
                        Boundary::Periodic => usize::from(first != cur),
                        Boundary::Open => 0,
                    };
                    let slot = down * (dim + 1) + walls + closing;
                    classes[slot] = add(classes[slot], c);
                }
            }
        }
    }
    let mut out = Vec::new();
    for down in 0..=n {
        for walls in 0..=n {
            let c = classes[down * (dim + 1) + walls];
            if c != zero {
                let m = n as i64 - 2 * down as i64;
                let s = bonds - 2 * walls as i64;
                out.push((m, s, c));
            }
        }
    }
    out
}

/// Collapse a uniform Ising bath onto `(m, s)` classes with
/// `e = g·m`, `eps = ε·m`, `lam = α·s`.
pub fn collapse_uniform_ising(spec: &BathSpec) -> Result<BathEnsemble> {
    spec.validate()?;
    let p = spec.uniform_params().ok_or(Error::NotUniform {
        reason: "couplings, splittings and ising strengths must each be equal across spins",
    })?;
    if p.ising == 0.0 {
        return Err(Error::NotUniform {
            reason: "ising collapse requires a nonzero ising strength",
        });
    }
    let n = spec.n_spins;
    let classes: Vec<(i64, i64, f64)> = if n <= EXACT_DP_MAX_SPINS {
        ising_class_counts_exact(n, spec.boundary)?
            .into_iter()
            .map(|c| (c.m, c.s, (c.count as f64).ln()))
            .collect()
    } else {
        ising_class_counts_log(n, spec.boundary)
    };
    let terms = classes
        .into_iter()
        .map(|(m, s, log_mult)| BathTerm {
            e: p.coupling * m as f64,
            eps: p.splitting * m as f64,
            lam: p.ising * s as f64,
            log_mult,
        })
        .collect();
    Ok(finish_collapsed(terms, EnsembleSource::UniformIsing, spec))
}

/// Sort by triple and merge classes whose triples coincide (e.g. `g = ε = 0`).
fn finish_collapsed(
    mut terms: Vec<BathTerm>,
    source: EnsembleSource,
    spec: &BathSpec,
) -> BathEnsemble {
    terms.sort_by(|a, b| b.triple_cmp(a));
    let mut merged: Vec<BathTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        match merged.last_mut() {
            Some(last) if last.triple_cmp(&t) == Ordering::Equal => {
                last.log_mult = log_add_exp(last.log_mult, t.log_mult);
            }
            _ => merged.push(t),
        }
    }
    BathEnsemble::new(merged, source, spec.n_spins, spec.beta)
}

/// How to turn a [`BathSpec`] into a [`BathEnsemble`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    /// Collapse when the bath is uniform, enumerate otherwise.
    #[default]
    Auto,
    Bruteforce,
    Collapsed,
}

pub fn build_ensemble(spec: &BathSpec, engine: Engine, cap: usize) -> Result<BathEnsemble> {
    spec.validate()?;
    let collapse = |p: UniformParams| {
        if p.ising == 0.0 {
            collapse_uniform_free(spec)
        } else {
            collapse_uniform_ising(spec)
        }
    };
    match engine {
        Engine::Bruteforce => enumerate_bruteforce_capped(spec, cap),
        Engine::Collapsed => match spec.uniform_params() {
            Some(p) => collapse(p),
            None => Err(Error::NotUniform {
                reason: "collapsed engine needs equal couplings, splittings and ising strengths",
            }),
        },
        Engine::Auto => match spec.uniform_params() {
            Some(p) => collapse(p),
            None => enumerate_bruteforce_capped(spec, cap),
        },
    }
}
