//! Drive a task from a scenario JSON, as the switchlab binary does.
use switchdiff::cli::{run_scenario, ScenarioConfig};

fn main() -> switchdiff::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/threshold_d_c.json").into());
    let mut cfg = ScenarioConfig::load(path.as_ref())?;
    cfg.output = std::env::temp_dir().join("switchlab-example");
    let run = run_scenario(&cfg);
    print!("{}", std::fs::read_to_string(&run.report)?);
    for p in run.csv.iter().chain(&run.svg) {
        println!("wrote {}", p.display());
    }
    std::process::exit(run.exit_code);
}
