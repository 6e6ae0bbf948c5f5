// Classifies every catalog metric and lists the theorem pairings that
// disagree.

use std::error::Error;

use wstar::cli::{RunConfig, Session, CATALOG};

pub fn run() -> Result<(), Box<dyn Error>> {
    for name in CATALOG {
        let mut cfg = RunConfig::new(name);
        cfg.points = 8;
        let session = Session::open(&cfg)?;
        let rec = session.classify(&cfg)?;
        let holding: Vec<&str> = rec.flags().into_iter().filter(|(_, f)| f.holds).map(|(n, _)| n).collect();
        println!("{name}: {}", holding.join(", "));
        for p in rec.pairings.iter().filter(|p| !p.holds) {
            println!("  disagreement {}: {}", p.name, p.detail);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
