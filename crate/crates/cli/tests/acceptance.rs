//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion.
//!
//! Runs without the libtest harness so the report is always printed.
//! Exits non-zero when any criterion fails.

use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use spinbath_cli::config::SystemConfig;
use spinbath_cli::run::{compute, csv_text, RunOutput};
use spinbath_cli::{preset, PRESETS};
use spinbath_core::bath::{
    collapse_uniform_free, collapse_uniform_ising, enumerate_bruteforce, ising_class_counts_exact,
    BathSpec, Boundary,
};
use spinbath_core::qmatrix::{
    bloch_from_rho, exp_gibbs, exp_unitary, herm_eig, kron, rho_from_bloch, BlochVector, CMat,
    CMat4,
};
use spinbath_core::series::{TimeGrid, TimeSeries};
use spinbath_core::single::{
    evolve_oracle, evolve_wc, evolve_woc, initial_bloch_woc, prep_pulse_r, system_hamiltonian,
    SingleQubitEvolver, SystemSpec,
};
use spinbath_core::two_qubit::{concurrence, state_spectrum, Propagation, TwoQubitEvolver};

type Outcome = Result<String, String>;
type Criterion = Box<dyn FnOnce(&mut StdRng) -> Outcome>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn channel_diff(a: &TimeSeries, a_suffix: &str, b: &TimeSeries, b_suffix: &str) -> f64 {
    ["px", "py", "pz"]
        .iter()
        .map(|axis| {
            let x = a.channel(&format!("{axis}_{a_suffix}")).expect("channel");
            let y = b.channel(&format!("{axis}_{b_suffix}")).expect("channel");
            max_diff(x, y)
        })
        .fold(0.0, f64::max)
}

fn random_system(rng: &mut StdRng) -> SystemSpec {
    SystemSpec {
        eps0: rng.gen_range(-6.0..6.0),
        eps: rng.gen_range(-4.0..4.0),
        delta0: rng.gen_range(0.0..3.0),
    }
}

fn random_bath(rng: &mut StdRng, n: usize, boundary: Boundary, beta: f64) -> BathSpec {
    let mut list = |lo: f64, hi: f64| (0..n).map(|_| rng.gen_range(lo..hi)).collect::<Vec<_>>();
    BathSpec {
        n_spins: n,
        couplings: list(-1.0, 1.0),
        splittings: list(-1.5, 1.5),
        ising: list(-0.5, 0.5),
        boundary,
        beta,
    }
}

fn random_hermitian<const D: usize>(rng: &mut StdRng) -> CMat<D> {
    let mut m = CMat::<D>::zeros();
    for i in 0..D {
        m[(i, i)] = C64::new(rng.gen_range(-3.0..3.0), 0.0);
        for j in i + 1..D {
            let z = C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

fn bell() -> CMat4 {
    let h = FRAC_1_SQRT_2 * FRAC_1_SQRT_2;
    let mut b = CMat4::zeros();
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        b[(i, j)] = C64::new(h, 0.0);
    }
    b
}

fn criterion_1_oracle(rng: &mut StdRng) -> Outcome {
    let start = Instant::now();
    let times = TimeGrid::new(10.0, 200).times();
    let mut worst: f64 = 0.0;
    // The compact M^wc form is a diagnostic; it is reported, not judged.
    let mut compact: f64 = 0.0;
    for k in 0..25 {
        let n = rng.gen_range(1..=12);
        let boundary = if k % 2 == 0 {
            Boundary::Periodic
        } else {
            Boundary::Open
        };
        let beta = [0.1, 1.0, 10.0][k % 3];
        let spec = random_bath(rng, n, boundary, beta);
        let sys = random_system(rng);
        let ens = enumerate_bruteforce(&spec).map_err(|e| e.to_string())?;
        let woc = evolve_woc(&sys, &ens, &times).map_err(|e| e.to_string())?;
        let wc = evolve_wc(&sys, &ens, &times).map_err(|e| e.to_string())?;
        let oracle_woc =
            evolve_oracle(&sys, &spec, &times, false, 12).map_err(|e| e.to_string())?;
        let oracle_wc = evolve_oracle(&sys, &spec, &times, true, 12).map_err(|e| e.to_string())?;
        worst = worst
            .max(channel_diff(&woc, "woc", &oracle_woc, "woc"))
            .max(channel_diff(&wc, "wc", &oracle_wc, "wc"));
        compact = compact.max(channel_diff(&wc, "wc_compact", &oracle_wc, "wc"));
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-10 && elapsed < Duration::from_secs(60),
        format!(
            "25 specs x 200 points, max |diff| = {worst:.2e}, {elapsed:.2?} (compact diagnostic deviates by up to {compact:.2e})"
        ),
    )
}

fn enumerate_classes(n: usize, boundary: Boundary) -> HashMap<(i64, i64), u128> {
    let bonds = match boundary {
        Boundary::Periodic => n,
        Boundary::Open => n - 1,
    };
    let mut counts = HashMap::new();
    for bits in 0u32..1 << n {
        let spin = |i: usize| if bits >> i & 1 == 0 { 1i64 } else { -1 };
        let m: i64 = (0..n).map(spin).sum();
        let s: i64 = (0..bonds).map(|i| spin(i) * spin((i + 1) % n)).sum();
        *counts.entry((m, s)).or_insert(0) += 1;
    }
    counts
}

fn criterion_2_collapse(rng: &mut StdRng) -> Outcome {
    let times = TimeGrid::new(10.0, 200).times();
    let mut worst: f64 = 0.0;
    for n in [8, 12, 14] {
        for boundary in [Boundary::Periodic, Boundary::Open] {
            for ising in [0.0, rng.gen_range(0.05..0.5)] {
                let spec = BathSpec::uniform(
                    n,
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(0.1..1.5),
                    ising,
                    boundary,
                    [0.1, 1.0, 10.0][rng.gen_range(0..3)],
                );
                let sys = random_system(rng);
                let brute = enumerate_bruteforce(&spec).map_err(|e| e.to_string())?;
                let collapsed = if ising == 0.0 {
                    collapse_uniform_free(&spec)
                } else {
                    collapse_uniform_ising(&spec)
                }
                .map_err(|e| e.to_string())?;
                let woc = |e| evolve_woc(&sys, e, &times).map_err(|e| e.to_string());
                let wc = |e| evolve_wc(&sys, e, &times).map_err(|e| e.to_string());
                let (wa, wb) = (woc(&brute)?, woc(&collapsed)?);
                let (ca, cb) = (wc(&brute)?, wc(&collapsed)?);
                worst = worst
                    .max(channel_diff(&wa, "woc", &wb, "woc"))
                    .max(channel_diff(&ca, "wc", &cb, "wc"))
                    .max(channel_diff(&ca, "wc_compact", &cb, "wc_compact"));
            }
        }
    }
    let mut count_mismatch = Vec::new();
    for n in 1..=16 {
        for boundary in [Boundary::Periodic, Boundary::Open] {
            let dp = ising_class_counts_exact(n, boundary).map_err(|e| e.to_string())?;
            let dp: HashMap<(i64, i64), u128> =
                dp.into_iter().map(|c| ((c.m, c.s), c.count)).collect();
            if dp != enumerate_classes(n, boundary) {
                count_mismatch.push(format!("N={n} {boundary:?}"));
            }
        }
    }
    check(
        worst <= 1e-10 && count_mismatch.is_empty(),
        format!(
            "N in {{8,12,14}} free+Ising, max |diff| = {worst:.2e}; exact counts N<=16 mismatches: {count_mismatch:?}"
        ),
    )
}

fn criterion_3_physicality() -> Outcome {
    let mut worst_trace: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    let mut max_norm: f64 = 0.0;
    let mut c_range = (f64::INFINITY, f64::NEG_INFINITY);
    for (name, _) in PRESETS {
        let scenario = preset(name).map_err(|e| e.to_string())?;
        let ens = scenario.build_ensemble().map_err(|e| e.to_string())?;
        let times = scenario.grid.times();
        match scenario.system {
            SystemConfig::Single(sys) => {
                let ev = SingleQubitEvolver::new(&sys, &ens).map_err(|e| e.to_string())?;
                for &t in &times {
                    for p in [ev.woc_at(t), ev.wc_at(t), ev.wc_compact_at(t)] {
                        let rho = rho_from_bloch(&p);
                        worst_trace = worst_trace.max((rho.trace().re - 1.0).abs());
                        let eig = herm_eig(&rho).map_err(|e| e.to_string())?;
                        min_eig = min_eig.min(eig.min_value());
                        max_norm = max_norm.max(p.norm());
                    }
                }
            }
            SystemConfig::TwoQubit(spec) => {
                let ev = TwoQubitEvolver::new(&spec, &ens, Propagation::Auto)
                    .map_err(|e| e.to_string())?;
                for &t in &times {
                    for corr in [false, true] {
                        let rho = ev.state_at(t, corr);
                        worst_trace = worst_trace.max((rho.trace().re - 1.0).abs());
                        let spectrum = state_spectrum(&rho).map_err(|e| e.to_string())?;
                        min_eig = spectrum.iter().copied().fold(min_eig, f64::min);
                        let c = concurrence(&rho).map_err(|e| format!("{name}: {e}"))?;
                        c_range = (c_range.0.min(c), c_range.1.max(c));
                    }
                }
            }
        }
    }
    check(
        worst_trace <= 1e-12
            && min_eig >= -1e-10
            && max_norm <= 1.0 + 1e-9
            && c_range.0 >= 0.0
            && c_range.1 <= 1.0,
        format!(
            "fig1..fig13: |tr-1| <= {worst_trace:.1e}, min eig {min_eig:.2e}, max |p| {max_norm:.12}, C in [{:.4}, {:.4}]",
            c_range.0, c_range.1
        ),
    )
}

fn preset_run(name: &str) -> Result<RunOutput, String> {
    compute(&preset(name).map_err(|e| e.to_string())?, 0).map_err(|e| e.to_string())
}

fn gap(out: &RunOutput, wc: &str, woc: &str) -> f64 {
    max_diff(
        &out.column(wc).expect("wc column"),
        &out.column(woc).expect("woc column"),
    )
}

fn criterion_4_orderings() -> Outcome {
    let d = |name: &str| preset_run(name).map(|o| gap(&o, "px_wc", "px_woc"));
    let c = |name: &str| preset_run(name).map(|o| gap(&o, "c_wc", "c_woc"));
    let (d1, d2, d3, d4, d6) = (d("fig1")?, d("fig2")?, d("fig3")?, d("fig4")?, d("fig6")?);
    let (c11, c12) = (c("fig11")?, c("fig12")?);
    let claims = [
        ("D(0.01) < D(0.05) < D(0.1)", d1 < d2 && d2 < d3),
        ("D(beta=0.1) < D(beta=1)", d4 < d2),
        ("D(N=250) > D(N=50)", d6 > d1),
        ("gap(fig12) > gap(fig11)", c12 > c11),
    ];
    let failed: Vec<&str> = claims.iter().filter(|c| !c.1).map(|c| c.0).collect();
    check(
        failed.is_empty(),
        format!(
            "D fig1/2/3 = {d1:.4e}/{d2:.4e}/{d3:.4e}, fig4 {d4:.4e}, fig6 {d6:.4e}; C gap fig11 {c11:.4e}, fig12 {c12:.4e}; failed: {failed:?}"
        ),
    )
}

fn criterion_5_limits(rng: &mut StdRng) -> Outcome {
    let times = TimeGrid::new(10.0, 200).times();
    let (mut g0, mut hot, mut pz_drift): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for k in 0..10 {
        let boundary = if k % 2 == 0 {
            Boundary::Periodic
        } else {
            Boundary::Open
        };
        let beta = [0.1, 1.0, 10.0][k % 3];
        let n = rng.gen_range(1..=10);
        let sys = random_system(rng);

        let mut spec = random_bath(rng, n, boundary, beta);
        spec.couplings = vec![0.0; n];
        let ens = enumerate_bruteforce(&spec).map_err(|e| e.to_string())?;
        let woc = evolve_woc(&sys, &ens, &times).map_err(|e| e.to_string())?;
        let wc = evolve_wc(&sys, &ens, &times).map_err(|e| e.to_string())?;
        g0 = g0
            .max(channel_diff(&wc, "wc", &woc, "woc"))
            .max(channel_diff(&wc, "wc_compact", &woc, "woc"));

        let hot_spec = BathSpec {
            beta: 1e-4,
            ..random_bath(rng, n, boundary, 1.0)
        };
        let ev = SingleQubitEvolver::new(
            &sys,
            &enumerate_bruteforce(&hot_spec).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        hot = hot.max(ev.initial_woc().norm()).max(ev.initial_wc().norm());

        let flat = SystemSpec { delta0: 0.0, ..sys };
        let spec = random_bath(rng, n, boundary, beta);
        let ev = SingleQubitEvolver::new(
            &flat,
            &enumerate_bruteforce(&spec).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        let (z_woc, z_wc) = (ev.initial_woc().z, ev.initial_wc().z);
        for &t in &times {
            pz_drift = pz_drift
                .max((ev.woc_at(t).z - z_woc).abs())
                .max((ev.wc_at(t).z - z_wc).abs())
                .max((ev.wc_compact_at(t).z - z_wc).abs());
        }
    }
    check(
        g0 <= 1e-12 && hot <= 1e-3 && pz_drift <= 1e-12,
        format!("g=0 |wc-woc| {g0:.2e}; beta=1e-4 max |p(0)| {hot:.2e}; delta0=0 p_z drift {pz_drift:.2e}"),
    )
}

fn criterion_6_closed_form(rng: &mut StdRng) -> Outcome {
    let r = prep_pulse_r();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (eps0, delta0, beta) = (
            rng.gen_range(-10.0..10.0),
            rng.gen_range(0.0..5.0),
            rng.gen_range(0.01..10.0),
        );
        let g = exp_gibbs(&system_hamiltonian(eps0, delta0), beta).map_err(|e| e.to_string())?;
        let rho = (r * g * r.dagger()).scale(1.0 / g.trace().re);
        let operator = bloch_from_rho(&rho).map_err(|e| e.to_string())?;
        let closed = initial_bloch_woc(
            &SystemSpec {
                eps0,
                eps: 0.0,
                delta0,
            },
            beta,
        );
        worst = worst.max(closed.max_abs_diff(&operator));
    }
    check(
        worst <= 1e-12,
        format!("100 triples, max |diff| = {worst:.2e}"),
    )
}

fn criterion_7_concurrence(rng: &mut StdRng) -> Outcome {
    let c = |rho: &CMat4| concurrence(rho).map_err(|e| e.to_string());
    let bell_err = (c(&bell())? - 1.0).abs();
    let up = rho_from_bloch(&BlochVector::new(0.0, 0.0, 1.0));
    let plus = rho_from_bloch(&BlochVector::new(1.0, 0.0, 0.0));
    let product_err = c(&kron(&up, &plus))?.abs();
    let werner = bell().scale(0.5) + CMat4::identity().scale(0.125);
    let werner_err = (c(&werner)? - 0.25).abs();

    let mut invariance: f64 = 0.0;
    for k in 0..50 {
        let a: CMat4 = random_hermitian(rng);
        let mixed = a * a.dagger();
        let mixed = mixed.scale(1.0 / mixed.trace().re);
        let w = [0.3, 0.6, 0.9][k % 3];
        let rho = (bell().scale(w) + mixed.scale(1.0 - w)).hermitian_part();
        let local = |rng: &mut StdRng| exp_unitary(&random_hermitian::<2>(rng), 1.0);
        let u = kron(
            &local(rng).map_err(|e| e.to_string())?,
            &local(rng).map_err(|e| e.to_string())?,
        );
        let rotated = rho.conjugate_by(&u).hermitian_part();
        invariance = invariance.max((c(&rho)? - c(&rotated)?).abs());
    }
    check(
        bell_err <= 1e-12 && product_err <= 1e-12 && werner_err <= 1e-10 && invariance <= 1e-10,
        format!(
            "Bell {bell_err:.1e}, product {product_err:.1e}, Werner {werner_err:.1e}, 50 local unitaries {invariance:.1e}"
        ),
    )
}

fn criterion_8_performance() -> Outcome {
    let start = Instant::now();
    let out = preset_run("fig6")?;
    let fig6 = start.elapsed();

    let mut scenario = preset("fig6").map_err(|e| e.to_string())?;
    scenario.bath = BathSpec::uniform(250, 0.01, 1.0, 0.1, Boundary::Periodic, 1.0);
    let start = Instant::now();
    let ising = compute(&scenario, 0).map_err(|e| e.to_string())?;
    let ising_time = start.elapsed();
    let rows_ok = out.rows.len() == 1000 && out.columns.len() == 9 && ising.rows.len() == 1000;
    check(
        rows_ok && fig6 < Duration::from_secs(5) && ising_time < Duration::from_secs(60),
        format!(
            "fig6 {fig6:.2?} ({} terms); N=250 Ising {ising_time:.2?} ({} terms)",
            out.n_terms, ising.n_terms
        ),
    )
}

fn criterion_9_determinism() -> Outcome {
    let mut differing = Vec::new();
    for (name, _) in PRESETS {
        let scenario = preset(name).map_err(|e| e.to_string())?;
        let runs: Vec<String> = [1, 4, 1, 7]
            .into_iter()
            .map(|w| compute(&scenario, w).map(|o| csv_text(&o)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        if runs.windows(2).any(|w| w[0] != w[1]) {
            differing.push(name);
        }
    }
    check(
        differing.is_empty(),
        format!("13 presets x workers {{1,4,1,7}} byte-identical; differing: {differing:?}"),
    )
}

fn main() -> ExitCode {
    let mut rng = StdRng::seed_from_u64(0x5eed_cafe);
    let criteria: Vec<(&str, Criterion)> = vec![
        ("1 oracle equivalence", Box::new(criterion_1_oracle)),
        ("2 collapse correctness", Box::new(criterion_2_collapse)),
        ("3 physicality", Box::new(|_| criterion_3_physicality())),
        ("4 orderings", Box::new(|_| criterion_4_orderings())),
        ("5 limits", Box::new(criterion_5_limits)),
        (
            "6 prepared-state closed form",
            Box::new(criterion_6_closed_form),
        ),
        ("7 concurrence", Box::new(criterion_7_concurrence)),
        ("8 performance", Box::new(|_| criterion_8_performance())),
        ("9 determinism", Box::new(|_| criterion_9_determinism())),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        match run(&mut rng) {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
