//! Characteristic coefficients, Pfaffian and nilpotency of skew maps.

use qplab::algebra::field::rat;
use qplab::algebra::{Biquad, Matrix, Radicands};
use qplab::rng::substream;
use qplab::skew::{char_coeffs, hitchin_vector, nilpotency_and_rank, pfaffian, random_rank2, random_skew, SkewMap};

fn main() -> qplab::Result<()> {
    let mut rng = substream(2, 0, 0);
    let a = random_skew(&mut rng, 6, 4);
    println!("random 6x6: a = {:?}", char_coeffs(&a)?.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    println!("  Pf = {}, det = {}", pfaffian(&a), a.matrix().det()?);

    let b = random_rank2(&mut rng, 6, 4);
    let h = hitchin_vector(&b, 3)?;
    println!("rank two: a = {:?}, Pf = {}", h.a.iter().map(|c| c.to_string()).collect::<Vec<_>>(), h.pf);

    // u w^T - w u^T with u isotropic and orthogonal to w
    let ctx = Radicands::new(rat(-1), rat(2))?;
    let i = Biquad::sqrt_u(&ctx);
    let u = [Biquad::rational(rat(1)), i, Biquad::rational(rat(0)), Biquad::rational(rat(0))];
    let w = [Biquad::rational(rat(0)), Biquad::rational(rat(0)), Biquad::rational(rat(1)), Biquad::rational(rat(3))];
    let m = Matrix::from_rows(
        (0..4)
            .map(|r| (0..4).map(|c| u[r].clone() * w[c].clone() - w[r].clone() * u[c].clone()).collect())
            .collect(),
    )?;
    let n = nilpotency_and_rank(&SkewMap::new(m)?)?;
    println!("isotropic rank two: rank {}, nilpotent {}", n.rank, n.nilpotent);
    Ok(())
}
