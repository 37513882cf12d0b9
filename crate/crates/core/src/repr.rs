//! Solving `n = x^2 + d*y^2` with `x, y > 0`.

use num_bigint::BigUint;
use num_integer::{Integer, Roots};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{integer_sqrt, is_probable_prime, sqrt_mod_prime};
use crate::error::{Error, Result};
use crate::serde_decimal;

/// Largest `n` that [`represent_bruteforce`] will search.
pub const BRUTEFORCE_CAP: u64 = 1_000_000_000_000;

/// `n = x^2 + d*y^2` with `x > 0` and `y > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Representation {
    #[serde(with = "serde_decimal")]
    pub n: BigUint,
    pub d: u64,
    #[serde(with = "serde_decimal")]
    pub x: BigUint,
    #[serde(with = "serde_decimal")]
    pub y: BigUint,
}

impl Representation {
    /// Checks the identity and positivity before building the value.
    pub fn new(n: BigUint, d: u64, x: BigUint, y: BigUint) -> Result<Self> {
        if x.is_zero() || y.is_zero() {
            return Err(Error::invalid("representation needs x > 0 and y > 0"));
        }
        if &x * &x + &y * &y * d != n {
            return Err(Error::invalid(format!("{x}^2 + {d}*{y}^2 != {n}")));
        }
        Ok(Representation { n, d, x, y })
    }

    pub fn holds(&self) -> bool {
        !self.x.is_zero()
            && !self.y.is_zero()
            && &self.x * &self.x + &self.y * &self.y * self.d == self.n
    }

    pub fn x_mod(&self, m: u32) -> u32 {
        (&self.x % m).to_u32().expect("small residue")
    }

    pub fn y_mod(&self, m: u32) -> u32 {
        (&self.y % m).to_u32().expect("small residue")
    }
}

/// Cornacchia's descent for an odd prime `n` and `1 <= d < n`.
///
/// Returns `None` when `-d` is a non-residue mod `n` or the descent ends on
/// a remainder that does not complete to a solution. For `d = 1` the pair
/// is returned with `y <= x`. Composite `n` is not detected; any value
/// returned is still checked, but a solution may be missed.
pub fn cornacchia(n: &BigUint, d: u64) -> Result<Option<Representation>> {
    if n.is_even() {
        return Err(Error::invalid(format!("cornacchia: {n} is even")));
    }
    if d == 0 || *n <= BigUint::from(d) {
        return Err(Error::invalid(format!(
            "cornacchia: need 1 <= d < n, got d = {d}, n = {n}"
        )));
    }

    let minus_d = n - d;
    let Some(r) = sqrt_mod_prime(&minus_d, n)? else {
        return Ok(None);
    };
    // root in (n/2, n)
    let mut a = n.clone();
    let mut b = n - &r;
    let limit = n.sqrt();
    while b > limit {
        let rem = &a % &b;
        a = std::mem::replace(&mut b, rem);
    }

    let rest = n - &b * &b;
    let (quot, rem) = rest.div_rem(&BigUint::from(d));
    if !rem.is_zero() {
        return Ok(None);
    }
    let (y, exact) = integer_sqrt(&quot);
    if !exact || y.is_zero() || b.is_zero() {
        return Ok(None);
    }
    let (x, y) = if d == 1 && y > b { (y, b) } else { (b, y) };
    Representation::new(n.clone(), d, x, y).map(Some)
}

/// Exhaustive search over `y = 1, 2, ...`; returns the solution with the
/// smallest `y`. Limited to `n <= BRUTEFORCE_CAP`.
pub fn represent_bruteforce(n: &BigUint, d: u64) -> Result<Option<Representation>> {
    if d == 0 {
        return Err(Error::invalid("d must be positive"));
    }
    let small = match n.to_u64() {
        Some(v) if v <= BRUTEFORCE_CAP => v,
        _ => {
            return Err(Error::TooLarge {
                n: n.to_string(),
                cap: BRUTEFORCE_CAP,
            })
        }
    };
    Ok(bruteforce_u64(small, d).map(|(x, y)| Representation {
        n: n.clone(),
        d,
        x: x.into(),
        y: y.into(),
    }))
}

fn bruteforce_u64(n: u64, d: u64) -> Option<(u64, u64)> {
    let mut y = 1u64;
    loop {
        let dy2 = d.checked_mul(y * y)?;
        if dy2 >= n {
            return None;
        }
        let rest = n - dy2;
        let x = rest.sqrt();
        if x * x == rest {
            return Some((x, y));
        }
        y += 1;
    }
}

/// Whether positive `x, y` with `n = x^2 + d*y^2` exist. Odd primes above
/// `d` go through Cornacchia; anything else is searched exhaustively.
pub fn representable(n: &BigUint, d: u64) -> Result<bool> {
    represent(n, d).map(|r| r.is_some())
}

/// The representation behind [`representable`].
pub fn represent(n: &BigUint, d: u64) -> Result<Option<Representation>> {
    if d == 0 {
        return Err(Error::invalid("d must be positive"));
    }
    if n.is_odd() && *n > BigUint::from(d) && is_probable_prime(n) {
        cornacchia(n, d)
    } else {
        represent_bruteforce(n, d)
    }
}
