// Three receivers served at once by nullspace precoding.

use uwmi::em::FieldModel;
use uwmi::harness::{default_receiver, kernels, Scenario};
use uwmi::multiuser::{max_leakage, multiuser_rates, swarm_channels, swarm_draw};

pub fn run_example() -> uwmi::Result<()> {
    let scenario = Scenario {
        receivers: (0..3).map(default_receiver).collect(),
        model: FieldModel::Simplified,
        ..Scenario::default()
    };
    let kernels = kernels(&scenario)?;
    let lb = scenario.link_budget(20.0)?;
    for draw in 0..3 {
        let users = swarm_channels(&kernels, &swarm_draw(3, scenario.seed, draw));
        let r = multiuser_rates(&users, &lb)?;
        println!(
            "draw {draw}: coils {:?}, rates {:.3?} bit/s/Hz, leakage {:.1e}{}",
            r.stream_coils,
            r.capacities,
            max_leakage(&r.rows, &r.precode),
            if r.precode.has_warning() { " (weak stream)" } else { "" }
        );
    }
    let two = multiuser_rates(&swarm_channels(&kernels[..2], &swarm_draw(2, scenario.seed, 0)), &lb)?;
    println!("two receivers: streams per user {:?}, rates {:.3?}", two.precode.stream_user, two.capacities);
    Ok(())
}

#[allow(dead_code)]
fn main() -> uwmi::Result<()> {
    run_example()
}
