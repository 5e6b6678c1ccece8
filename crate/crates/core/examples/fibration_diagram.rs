//! Fits the linear identification between the two fibrations and checks it
//! on fresh samples.

use std::sync::Arc;

use qplab::fibration::{fit_identification, float_sample, verify_identification, DiagramSample};
use qplab::pencil::PencilOfQuadrics;
use qplab::variety::RANK_TOL;

fn samples(p: &Arc<PencilOfQuadrics>, section: u32, n: u32) -> qplab::Result<Vec<DiagramSample>> {
    (0..n)
        .map(|i| {
            let s = float_sample(p, 11, section, i, false)?;
            DiagramSample::compute(&s.point, &s.covector, RANK_TOL)
        })
        .collect()
}

fn main() -> qplab::Result<()> {
    for g in [2, 3] {
        let p = Arc::new(PencilOfQuadrics::canonical(g)?);
        let map = fit_identification(&p, &samples(&p, 1, 4 * g as u32)?)?;
        let report = verify_identification(&map, &samples(&p, 2, 100)?, 1e-8)?;
        println!(
            "g = {g}: fit residual {:.2e}, holdout residual {:.2e} over {} samples, pass = {}",
            map.fit_residual(),
            report.max_residual,
            report.samples,
            report.pass
        );
    }
    Ok(())
}
