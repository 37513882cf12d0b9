//! Arbitrary-precision number-theoretic kernel.
//!
//! Everything here works on [`BigUint`] (signed inputs only where a
//! symbol needs them) and is a pure function of its arguments.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Value of a Legendre or Jacobi symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symbol {
    MinusOne,
    Zero,
    One,
}

impl Symbol {
    pub fn as_i8(self) -> i8 {
        match self {
            Symbol::MinusOne => -1,
            Symbol::Zero => 0,
            Symbol::One => 1,
        }
    }

    fn from_sign(sign: i8) -> Self {
        if sign < 0 {
            Symbol::MinusOne
        } else {
            Symbol::One
        }
    }
}

impl std::ops::Mul for Symbol {
    type Output = Symbol;

    fn mul(self, rhs: Symbol) -> Symbol {
        match self.as_i8() * rhs.as_i8() {
            -1 => Symbol::MinusOne,
            0 => Symbol::Zero,
            _ => Symbol::One,
        }
    }
}

/// `base^exp mod modulus`.
pub fn mod_pow(base: &BigUint, exp: &BigUint, modulus: &BigUint) -> Result<BigUint> {
    if modulus.is_zero() {
        return Err(Error::invalid("mod_pow: modulus must be at least 1"));
    }
    Ok(base.modpow(exp, modulus))
}

/// Greatest common divisor; `gcd(0, 0) = 0`.
pub fn gcd(a: &BigUint, b: &BigUint) -> BigUint {
    a.gcd(b)
}

/// Jacobi symbol `(a/n)` for odd `n >= 1`. Negative `a` is allowed.
pub fn jacobi(a: &BigInt, n: &BigUint) -> Result<Symbol> {
    if n.is_zero() || n.is_even() {
        return Err(Error::invalid(format!(
            "jacobi: modulus {n} must be odd and positive"
        )));
    }
    let modulus = BigInt::from_biguint(Sign::Plus, n.clone());
    let mut a = a.mod_floor(&modulus).magnitude().clone();
    let mut n = n.clone();
    let mut sign: i8 = 1;

    while !a.is_zero() {
        let twos = a.trailing_zeros().unwrap_or(0);
        if twos > 0 {
            a >>= twos;
            let n_mod_8 = low_bits(&n, 8);
            if twos % 2 == 1 && (n_mod_8 == 3 || n_mod_8 == 5) {
                sign = -sign;
            }
        }
        // reciprocity
        if low_bits(&a, 4) == 3 && low_bits(&n, 4) == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= &n;
    }

    if n.is_one() {
        Ok(Symbol::from_sign(sign))
    } else {
        Ok(Symbol::Zero)
    }
}

/// Jacobi symbol for machine-sized arguments.
pub fn jacobi_i64(a: i64, n: u64) -> Result<Symbol> {
    jacobi(&BigInt::from(a), &BigUint::from(n))
}

/// `n mod m` for a power-of-two `m <= 256`.
fn low_bits(n: &BigUint, m: u32) -> u32 {
    let low = n.iter_u32_digits().next().unwrap_or(0);
    low & (m - 1)
}

/// Square root of `a` modulo the odd prime `p` (Tonelli-Shanks).
///
/// `a` is reduced modulo `p` first. Returns the root in `0..=(p-1)/2`, or
/// `None` when `a` is a quadratic non-residue. Primality of `p` is the
/// caller's responsibility.
pub fn sqrt_mod_prime(a: &BigUint, p: &BigUint) -> Result<Option<BigUint>> {
    if p.is_even() || *p < BigUint::from(3u32) {
        return Err(Error::invalid(format!(
            "sqrt_mod_prime: {p} is not an odd prime"
        )));
    }
    let a = a % p;
    if a.is_zero() {
        return Ok(Some(a));
    }
    if jacobi(&BigInt::from(a.clone()), p)? != Symbol::One {
        return Ok(None);
    }

    let one = BigUint::one();
    let p_minus_1 = p - &one;
    let s = p_minus_1.trailing_zeros().unwrap_or(0);
    let q = &p_minus_1 >> s;

    let root = if s == 1 {
        a.modpow(&((p + &one) >> 2), p)
    } else {
        let mut z = BigUint::from(2u32);
        while jacobi(&BigInt::from(z.clone()), p)? != Symbol::MinusOne {
            z += 1u32;
            if z >= *p {
                return Err(not_prime(p));
            }
        }
        let mut m = s;
        let mut c = z.modpow(&q, p);
        let mut t = a.modpow(&q, p);
        let mut r = a.modpow(&((&q + &one) >> 1), p);
        while !t.is_one() {
            // least i with t^(2^i) = 1
            let mut i = 0u64;
            let mut t2 = t.clone();
            while !t2.is_one() {
                t2 = &t2 * &t2 % p;
                i += 1;
                if i >= m {
                    return Err(not_prime(p));
                }
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = &b * &b % p;
            }
            m = i;
            c = &b * &b % p;
            t = t * &c % p;
            r = r * &b % p;
        }
        r
    };
    if &root * &root % p != a {
        return Err(not_prime(p));
    }

    let other = p - &root;
    Ok(Some(if other < root { other } else { root }))
}

fn not_prime(p: &BigUint) -> Error {
    Error::invalid(format!("sqrt_mod_prime: {p} is not prime"))
}

/// `(floor(sqrt(n)), n is a perfect square)`.
pub fn integer_sqrt(n: &BigUint) -> (BigUint, bool) {
    let root = n.sqrt();
    let exact = &root * &root == *n;
    (root, exact)
}

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Witnesses that make Miller-Rabin deterministic below 2^64.
const U64_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Primality test.
///
/// Exact for `n < 2^64`. Above that it is the Baillie-PSW combination of a
/// strong base-2 Fermat test and a strong Lucas test with Selfridge
/// parameters, so a `true` there means "probable prime".
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &sp in &SMALL_PRIMES {
        if (n % sp).is_zero() {
            return false;
        }
    }
    is_strong_probable_prime(n, &BigUint::from(2u32))
        && !integer_sqrt(n).1
        && is_strong_lucas_prp(n)
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &sp in &SMALL_PRIMES {
        let sp = u64::from(sp);
        if n == sp {
            return true;
        }
        if n % sp == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &U64_WITNESSES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Strong probable-prime test to the given base. `n` must be odd and > 2.
fn is_strong_probable_prime(n: &BigUint, base: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = base.modpow(&d, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Strong Lucas probable-prime test, Selfridge's method A (P = 1).
/// `n` must be odd, not a perfect square, and free of small factors.
fn is_strong_lucas_prp(n: &BigUint) -> bool {
    let n_int = BigInt::from(n.clone());
    // D = 5, -7, 9, -11, ... until (D/n) = -1
    let mut disc: i64 = 5;
    loop {
        match jacobi(&BigInt::from(disc), n).expect("odd modulus") {
            Symbol::MinusOne => break,
            Symbol::Zero => {
                if BigInt::from(disc.unsigned_abs()) != n_int {
                    return false;
                }
            }
            Symbol::One => {}
        }
        disc = if disc > 0 { -(disc + 2) } else { -disc + 2 };
    }

    let reduce = |v: BigInt| -> BigUint { v.mod_floor(&n_int).magnitude().clone() };
    let d_mod = reduce(BigInt::from(disc));
    let q_mod = reduce(BigInt::from((1 - disc) / 4));
    let half = |v: BigUint| -> BigUint {
        if v.is_even() {
            v >> 1
        } else {
            (v + n) >> 1
        }
    };
    let sub = |a: &BigUint, b: &BigUint| -> BigUint { (a + n - (b % n)) % n };

    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let odd_part = &n_plus_1 >> s;

    // U_1 = 1, V_1 = P = 1, Q^1
    let mut u = BigUint::one();
    let mut v = BigUint::one();
    let mut qk = q_mod.clone();
    let bits = odd_part.bits();
    for i in (0..bits - 1).rev() {
        u = &u * &v % n;
        v = sub(&(&v * &v), &(&qk << 1));
        qk = &qk * &qk % n;
        if odd_part.bit(i) {
            let new_u = half((&u + &v) % n);
            let new_v = half((&d_mod * &u + &v) % n);
            u = new_u;
            v = new_v;
            qk = &qk * &q_mod % n;
        }
    }

    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = sub(&(&v * &v), &(&qk << 1));
        if v.is_zero() {
            return true;
        }
        qk = &qk * &qk % n;
    }
    false
}
