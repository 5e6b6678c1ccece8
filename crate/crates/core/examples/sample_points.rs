//! Exact points of X and Y over biquadratic fields.

use std::sync::Arc;

use qplab::algebra::Field;
use qplab::pencil::PencilOfQuadrics;
use qplab::rng::substream;
use qplab::variety::{sample_exact_point, tangent_frame, SampleOptions, RANK_TOL};

fn main() -> qplab::Result<()> {
    let p = Arc::new(PencilOfQuadrics::canonical(2)?);
    for (i, on_y) in [false, true].into_iter().enumerate() {
        let opts = SampleOptions {
            on_y,
            ..Default::default()
        };
        let x = sample_exact_point(&p, &mut substream(7, 0, i as u32), &opts)?;
        println!("on Y: {on_y}");
        for (j, c) in x.coords().iter().enumerate() {
            println!("  x_{j} = {c}");
        }
        let c = x.coords();
        println!("  q1 = {}, q2 = {}", p.q1(c), p.q2(c));
        let frame = tangent_frame(&x, RANK_TOL)?;
        println!("  dim S = {}", frame.s_basis().len());
        assert!(p.q1(c).is_zero() && p.q2(c).is_zero());
    }
    Ok(())
}
