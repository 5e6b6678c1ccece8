//! Minimal kernel basis of the polynomial map t -> (x, t x) and the
//! splitting type of the quotient bundle.

use std::sync::Arc;

use qplab::p1bundle::{n_tilde_splitting, trivial_factor_matches_tangent, v_perp_kernel};
use qplab::pencil::PencilOfQuadrics;
use qplab::rng::substream;
use qplab::variety::{sample_exact_point, tangent_frame, SampleOptions, RANK_TOL};

fn main() -> qplab::Result<()> {
    for g in 2..=4 {
        let p = Arc::new(PencilOfQuadrics::canonical(g)?);
        let x = sample_exact_point(&p, &mut substream(1, 0, g as u32), &SampleOptions::default())?;
        let kb = v_perp_kernel(&x)?;
        let split = n_tilde_splitting(&kb)?;
        let tangent = trivial_factor_matches_tangent(&kb, &tangent_frame(&x, RANK_TOL)?);
        println!(
            "g = {g}: column degrees {:?}, quotient {split}, trivial part = S: {tangent}",
            kb.degrees()
        );
    }
    Ok(())
}
