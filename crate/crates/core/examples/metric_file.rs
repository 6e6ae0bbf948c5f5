// Reads a metric from text in the file format and runs a few checks on it.

use std::error::Error;

use wstar::cli::{parse_metric_file, run_session, CheckSelection, OutputFormat, RunConfig, Session};

const REISSNER_NORDSTROM: &str = "
# charged black hole, outside the outer horizon
dim = 4
coords = t, r, theta, phi
param M = 1.0
param Q = 0.5
domain t = 0 .. 10
domain r = 3 .. 20
domain theta = 0.3 .. 2.8
domain phi = 0 .. 6.28
g[0][0] = -(1 - 2*M/r + Q^2/r^2)
g[1][1] = 1/(1 - 2*M/r + Q^2/r^2)
g[2][2] = r^2
g[3][3] = r^2 * sin(theta)^2
";

pub fn run() -> Result<(), Box<dyn Error>> {
    let metric = parse_metric_file("reissner_nordstrom", REISSNER_NORDSTROM)?;
    let mut cfg = RunConfig::new("reissner_nordstrom");
    cfg.points = 6;
    cfg.timestamp = false;
    cfg.format = OutputFormat::Table;
    cfg.checks = CheckSelection::parse("einstein,ricci_flat,wstar_divergence_free,codazzi,em_distribution")?;
    let session = Session::from_metric(metric, cfg.points, cfg.seed)?;
    print!("{}", run_session(&session, &cfg)?.render(cfg.format));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
