//! Seeded randomness with per-sample substreams.
//!
//! Every sample draws from its own ChaCha8 stream selected by
//! `(section, index)`, so results do not depend on evaluation order or on the
//! number of worker threads.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::field::{ratio, Field, Rational};
use crate::algebra::Biquad;

/// Recorded in reports so that runs can be reproduced.
pub const RNG_NAME: &str = "chacha8-stream-v1";

pub fn substream(seed: u64, section: u32, index: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(section) << 32 | u64::from(index));
    rng
}

/// Numerator in `-5..=5`, denominator in `1..=3`.
pub fn small_rational<R: Rng + ?Sized>(rng: &mut R, nonzero: bool) -> Rational {
    loop {
        let n = rng.gen_range(-5..=5);
        if nonzero && n == 0 {
            continue;
        }
        return ratio(n, rng.gen_range(1..=3));
    }
}

/// Integer in `-range..=range`.
pub fn small_int<R: Rng + ?Sized>(rng: &mut R, range: i64) -> Rational {
    ratio(rng.gen_range(-range..=range), 1)
}

pub fn unit_box_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Scalars that can be drawn at random for covectors and test data.
pub trait RandomScalar: Field {
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl RandomScalar for Rational {
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        small_rational(rng, false)
    }
}

impl RandomScalar for Biquad {
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Biquad::rational(small_rational(rng, false))
    }
}

impl RandomScalar for Complex64 {
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        unit_box_complex(rng)
    }
}
