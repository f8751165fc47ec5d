//! Built-in scenarios `fig1`..`fig13`.

use spinbath_core::bath::{BathSpec, Boundary, DEFAULT_BRUTEFORCE_CAP};
use spinbath_core::series::TimeGrid;
use spinbath_core::single::SystemSpec;
use spinbath_core::two_qubit::TwoQubitSpec;

use crate::config::{EngineName, Scenario, SystemConfig, Variants};
use crate::CliError;

pub const PRESETS: [(&str, &str); 13] = [
    ("fig1", "single qubit, weak coupling g=0.01, beta=1, N=50"),
    ("fig2", "fig1 with g=0.05"),
    ("fig3", "fig1 with g=0.1"),
    ("fig4", "fig2 with beta=0.1"),
    ("fig5", "fig1 with g=1, beta=10"),
    ("fig6", "fig1 with N=250 (collapsed engine)"),
    ("fig7", "fig1 with delta0=10, g=0.05"),
    ("fig8", "fig1 with g=1, delta0=10"),
    ("fig9", "fig1 with beta=10, g=1, bath splitting 0.01"),
    ("fig10", "interacting bath: alpha=0.1, g=0.5, eps0=5, N=10"),
    ("fig11", "two qubits, g=0.05, kappa=0, beta=1, N=50"),
    ("fig12", "fig11 with beta=3, g=0.5"),
    ("fig13", "fig11 with kappa=0.5"),
];

fn scenario(name: &str, system: SystemConfig, bath: BathSpec) -> Scenario {
    Scenario {
        system,
        bath,
        variants: Variants::Both,
        grid: TimeGrid::new(10.0, 1000),
        output: name.into(),
        engine: EngineName::Auto,
        bruteforce_cap: DEFAULT_BRUTEFORCE_CAP,
    }
}

fn single(eps0: f64, delta0: f64) -> SystemConfig {
    SystemConfig::Single(SystemSpec {
        eps0,
        eps: 2.0,
        delta0,
    })
}

fn free_bath(n: usize, g: f64, beta: f64) -> BathSpec {
    BathSpec::uniform(n, g, 1.0, 0.0, Boundary::Periodic, beta)
}

pub fn preset(name: &str) -> Result<Scenario, CliError> {
    let fig1 = |g: f64, beta: f64| scenario(name, single(4.0, 1.0), free_bath(50, g, beta));
    let pair = |kappa: f64, g: f64, beta: f64| {
        scenario(
            name,
            SystemConfig::TwoQubit(TwoQubitSpec::symmetric(5.0, 2.0, 1.0, kappa)),
            free_bath(50, g, beta),
        )
    };
    Ok(match name {
        "fig1" => fig1(0.01, 1.0),
        "fig2" => fig1(0.05, 1.0),
        "fig3" => fig1(0.1, 1.0),
        "fig4" => fig1(0.05, 0.1),
        "fig5" => fig1(1.0, 10.0),
        "fig6" => Scenario {
            bath: free_bath(250, 0.01, 1.0),
            engine: EngineName::Collapsed,
            ..fig1(0.01, 1.0)
        },
        "fig7" => scenario(name, single(4.0, 10.0), free_bath(50, 0.05, 1.0)),
        "fig8" => scenario(name, single(4.0, 10.0), free_bath(50, 1.0, 1.0)),
        "fig9" => scenario(
            name,
            single(4.0, 1.0),
            BathSpec::uniform(50, 1.0, 0.01, 0.0, Boundary::Periodic, 10.0),
        ),
        "fig10" => scenario(
            name,
            single(5.0, 1.0),
            BathSpec::uniform(10, 0.5, 1.0, 0.1, Boundary::Periodic, 1.0),
        ),
        "fig11" => pair(0.0, 0.05, 1.0),
        "fig12" => pair(0.0, 0.5, 3.0),
        "fig13" => pair(0.5, 0.05, 1.0),
        _ => return Err(CliError::UnknownPreset(name.into())),
    })
}
