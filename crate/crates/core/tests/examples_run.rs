#[allow(dead_code)]
mod field_models_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/field_models.rs"));
}

#[test]
fn field_models_example_runs() {
    field_models_example::run_example().expect("field_models example should run");
}

#[allow(dead_code)]
mod spectral_oracle_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/spectral_oracle.rs"));
}

#[test]
fn spectral_oracle_example_runs() {
    spectral_oracle_example::run_example().expect("spectral_oracle example should run");
}

#[allow(dead_code)]
mod coupling_frames_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/coupling_frames.rs"));
}

#[test]
fn coupling_frames_example_runs() {
    coupling_frames_example::run_example().expect("coupling_frames example should run");
}

#[allow(dead_code)]
mod strategies_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/strategies.rs"));
}

#[test]
fn strategies_example_runs() {
    strategies_example::run_example().expect("strategies example should run");
}

#[allow(dead_code)]
mod reliability_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/reliability.rs"));
}

#[test]
fn reliability_example_runs() {
    reliability_example::run_example().expect("reliability example should run");
}

#[allow(dead_code)]
mod multiuser_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/multiuser.rs"));
}

#[test]
fn multiuser_example_runs() {
    multiuser_example::run_example().expect("multiuser example should run");
}

#[allow(dead_code)]
mod mii_estimation_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/mii_estimation.rs"));
}

#[test]
fn mii_estimation_example_runs() {
    mii_estimation_example::run_example().expect("mii_estimation example should run");
}

#[allow(dead_code)]
mod experiment_csv_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/experiment_csv.rs"));
}

#[test]
fn experiment_csv_example_runs() {
    experiment_csv_example::run_example().expect("experiment_csv example should run");
}

#[allow(dead_code)]
mod field_probe_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/field_probe.rs"));
}

#[test]
fn field_probe_example_runs() {
    field_probe_example::run_example().expect("field_probe example should run");
}
