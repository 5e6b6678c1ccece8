//! Jacobian rank and isotropy of the fibres in a cotangent chart.

use std::sync::Arc;

use qplab::fibration::{float_sample, verify_lagrangian, DEFAULT_FD_STEP, DEFAULT_ISOTROPY_TOL};
use qplab::pencil::PencilOfQuadrics;

fn main() -> qplab::Result<()> {
    let p = Arc::new(PencilOfQuadrics::canonical(2)?);
    for i in 0..5 {
        let s = float_sample(&p, 5, 0, i, false)?;
        let r = verify_lagrangian(&s.point, &s.covector, DEFAULT_FD_STEP, DEFAULT_ISOTROPY_TOL)?;
        println!(
            "sample {i}: rank {}/{}, isotropy defect {:.2e}, chart {:?}",
            r.jacobian_rank,
            r.expected_rank,
            r.isotropy_defect.unwrap_or(f64::NAN),
            r.chart
        );
    }
    Ok(())
}
