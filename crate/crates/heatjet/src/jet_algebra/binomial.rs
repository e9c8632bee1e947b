//! Falling factorials and binomial coefficients with rational upper argument.

use crate::error::{Error, Result};

use super::Rat;

/// The falling factorial `[x]_r = x (x-1) ... (x-r+1)`.
pub fn falling_factorial(x: &Rat, r: u32) -> Rat {
    let mut acc = Rat::one();
    for i in 0..r {
        acc *= &(x - &Rat::from_int(i as i64));
    }
    acc
}

/// `binom(x, r) = [x]_r / r!` for rational `x` and integer `r >= 0`.
pub fn rational_binomial(x: &Rat, r: u32) -> Rat {
    falling_factorial(x, r) / Rat::factorial(r as usize)
}

/// `sum_l binom(r + n/2, r - l) * binom(-n/2 - mu, l)` over `l = 0..=r`,
/// which collapses to `1` when `mu = 0` and to `0` for `0 < mu <= r`.
pub fn binomial_inversion_sum(n: usize, r: u32, mu: u32) -> Result<Rat> {
    if mu > r {
        return Err(Error::InvalidArgument(format!(
            "binomial inversion needs r >= mu >= 0, got r = {r}, mu = {mu}"
        )));
    }
    let half_n = Rat::new(n as i64, 2);
    let upper_a = &Rat::from_int(r as i64) + &half_n;
    let upper_b = -(&half_n + &Rat::from_int(mu as i64));
    let mut acc = Rat::zero();
    for l in 0..=r {
        acc += rational_binomial(&upper_a, r - l) * rational_binomial(&upper_b, l);
    }
    Ok(acc)
}
