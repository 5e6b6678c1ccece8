//! On Y the last fibration component and f_H at the last branch point
//! vanish identically.

use std::sync::Arc;

use qplab::algebra::Field;
use qplab::fibration::{exact_sample, f_h, phi_y};
use qplab::pencil::PencilOfQuadrics;
use qplab::variety::RANK_TOL;

fn main() -> qplab::Result<()> {
    let p = Arc::new(PencilOfQuadrics::canonical(2)?);
    let last = p.last();
    for i in 0..5 {
        let s = exact_sample(&p, 3, 0, i, true)?;
        let v = phi_y(&s.point, &s.covector)?;
        let f = f_h(&s.point, &s.covector, RANK_TOL)?;
        let at_last = f.eval_pencil(&p.lambda(last));
        println!("sample {i}: v_last = {}, f_H(lambda_last) = {}", v.components[last], at_last);
        assert!(v.components[last].is_zero() && at_last.is_zero());
    }
    Ok(())
}
