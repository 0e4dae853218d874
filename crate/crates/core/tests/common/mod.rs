#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semiconf::{CScalar, Mode};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rational(rng: &mut impl Rng) -> BigRational {
    let n: i64 = rng.gen_range(-9..=9);
    let d: i64 = rng.gen_range(1..=9);
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Random Gaussian rational with small numerators and denominators, never
/// zero.
pub fn gaussian(rng: &mut impl Rng) -> CScalar {
    loop {
        let c = CScalar::exact(rational(rng), rational(rng));
        if !c.is_zero() {
            return c;
        }
    }
}

pub fn real_rational(rng: &mut impl Rng) -> CScalar {
    loop {
        let r = rational(rng);
        if r != BigRational::from_integer(0.into()) {
            return CScalar::from_rational(&r, Mode::Exact);
        }
    }
}
