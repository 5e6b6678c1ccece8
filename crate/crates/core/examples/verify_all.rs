//! Every check on one pencil, as a JSON report.

use std::sync::Arc;

use qplab::jobs::{verify_all, DEFAULT_BUDGET};
use qplab::pencil::PencilOfQuadrics;

fn main() -> qplab::Result<()> {
    let g = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let p = Arc::new(PencilOfQuadrics::canonical(g)?);
    let report = verify_all(&p, 0, DEFAULT_BUDGET);
    for (name, s) in &report.sections {
        println!("{name:<12} {}", if s.pass { "ok" } else { "FAIL" });
    }
    println!("overall: {}", report.pass);
    Ok(())
}
