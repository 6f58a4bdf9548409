//! Run selected criteria of the verification battery; all thirteen without arguments.
use switchdiff::verify::{render_report, run_battery, run_criterion, BatteryConfig};

fn main() {
    let cfg = BatteryConfig::default();
    let picked: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let sections = if picked.is_empty() {
        run_battery(&cfg)
    } else {
        picked.iter().map(|&k| run_criterion(k, &cfg)).collect()
    };
    print!("{}", render_report(&sections));
}
