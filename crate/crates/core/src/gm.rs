//! Gaussian Mersenne norms `G_p = 2^p - (2/p) 2^((p+1)/2) + 1`.
//!
//! `G_p` is computed two ways: from the closed formula and as the norm of
//! `(1+i)^p - 1` in the Gaussian integers. The second route is the oracle
//! for the first.

use std::ops::{Mul, Sub};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::is_probable_prime;
use crate::error::{Error, Result};
use crate::serde_decimal;

/// Element `re + im*i` of `Z[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussianInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        GaussianInt {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn one() -> Self {
        GaussianInt::new(1, 0)
    }

    pub fn conj(&self) -> Self {
        GaussianInt {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn norm(&self) -> BigUint {
        (&self.re * &self.re + &self.im * &self.im)
            .to_biguint()
            .expect("sum of squares is nonnegative")
    }

    /// Square-and-multiply power.
    pub fn pow(&self, mut exp: u64) -> Self {
        let mut acc = GaussianInt::one();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }
}

impl Mul for &GaussianInt {
    type Output = GaussianInt;

    fn mul(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Sub for &GaussianInt {
    type Output = GaussianInt;

    fn sub(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Primality {
    /// Below 2^64, where the test is deterministic.
    ProvenSmall,
    ProbablePrime,
    Composite,
    Untested,
}

impl Primality {
    pub fn classify(n: &BigUint) -> Self {
        if !is_probable_prime(n) {
            Primality::Composite
        } else if n.bits() <= 64 {
            Primality::ProvenSmall
        } else {
            Primality::ProbablePrime
        }
    }

    pub fn is_prime(self) -> bool {
        matches!(self, Primality::ProvenSmall | Primality::ProbablePrime)
    }
}

/// One Gaussian Mersenne candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GmNorm {
    pub p: u64,
    /// The symbol `(2/p)`.
    pub epsilon: i8,
    #[serde(with = "serde_decimal")]
    pub value: BigUint,
    pub primality: Primality,
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p < 3 || p % 2 == 0 || !is_probable_prime(&BigUint::from(p)) {
        return Err(Error::invalid(format!("exponent {p} is not an odd prime")));
    }
    Ok(())
}

/// `(2/p)`: +1 iff `p = ±1 (mod 8)`.
pub fn epsilon(p: u64) -> Result<i8> {
    if p % 2 == 0 {
        return Err(Error::invalid(format!("epsilon: {p} is even")));
    }
    Ok(if matches!(p % 8, 1 | 7) { 1 } else { -1 })
}

fn closed_form(p: u64) -> BigUint {
    let eps = if matches!(p % 8, 1 | 7) { 1 } else { -1 };
    let high = BigUint::one() << p;
    let mid = BigUint::one() << ((p + 1) / 2);
    if eps == 1 {
        high - mid + 1u32
    } else {
        high + mid + 1u32
    }
}

/// `G_p` with its primality status filled in.
pub fn gm_norm(p: u64) -> Result<GmNorm> {
    gm_norm_with(p, true)
}

/// `G_p` without running the primality test.
pub fn gm_norm_untested(p: u64) -> Result<GmNorm> {
    gm_norm_with(p, false)
}

fn gm_norm_with(p: u64, test: bool) -> Result<GmNorm> {
    check_odd_prime(p)?;
    let value = closed_form(p);
    let primality = if test {
        Primality::classify(&value)
    } else {
        Primality::Untested
    };
    Ok(GmNorm {
        p,
        epsilon: epsilon(p)?,
        value,
        primality,
    })
}

/// `N((1+i)^p - 1)` computed in `Z[i]`, independent of the closed formula.
pub fn gm_norm_oracle(p: u64) -> Result<BigUint> {
    check_odd_prime(p)?;
    Ok(gaussian_mersenne(p).norm())
}

/// `mu_p = (1+i)^p - 1`.
pub fn gaussian_mersenne(p: u64) -> GaussianInt {
    &GaussianInt::new(1, 1).pow(p) - &GaussianInt::one()
}

/// Residue claims about `G_p`. Each raw prediction is paired with whether
/// it is asserted for this `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruencePrediction {
    pub p: u64,
    pub mod8: Option<u32>,
    pub mod16: Option<u32>,
    pub mod32: Option<u32>,
    pub mod7: Option<u32>,
    pub applicable: Applicability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Applicability {
    pub mod8: bool,
    pub mod16: bool,
    pub mod32: bool,
    pub mod7: bool,
}

/// Predicted residues of `G_p`.
///
/// The mod-7 claim is only marked applicable when `(2/p) = +1`: `G_5 = 41`
/// is 6 mod 7, so the ungated claim is false.
pub fn predict_congruences(p: u64) -> Result<CongruencePrediction> {
    check_odd_prime(p)?;
    let plus = epsilon(p)? == 1;
    let mod7 = match p % 6 {
        1 => Some(1),
        5 => Some(4),
        _ => None,
    };
    Ok(CongruencePrediction {
        p,
        mod8: Some(1),
        mod16: Some(1),
        mod32: Some(1),
        mod7,
        applicable: Applicability {
            mod8: p > 3,
            mod16: plus,
            mod32: plus && p > 7,
            mod7: plus && mod7.is_some(),
        },
    })
}

/// Actual residues of `G_p` next to the predictions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceCheck {
    pub prediction: CongruencePrediction,
    pub actual_mod8: u32,
    pub actual_mod16: u32,
    pub actual_mod32: u32,
    pub actual_mod7: u32,
    /// Every applicable prediction matches the actual residue.
    pub holds: bool,
}

pub fn check_congruences(p: u64) -> Result<CongruenceCheck> {
    let prediction = predict_congruences(p)?;
    let g = closed_form(p);
    let residue = |m: u32| (&g % m).to_u32().expect("residue fits");
    let (r8, r16, r32, r7) = (residue(8), residue(16), residue(32), residue(7));
    let ok = |applicable: bool, predicted: Option<u32>, actual: u32| {
        !applicable || predicted == Some(actual)
    };
    let a = prediction.applicable;
    let holds = ok(a.mod8, prediction.mod8, r8)
        && ok(a.mod16, prediction.mod16, r16)
        && ok(a.mod32, prediction.mod32, r32)
        && ok(a.mod7, prediction.mod7, r7);
    Ok(CongruenceCheck {
        prediction,
        actual_mod8: r8,
        actual_mod16: r16,
        actual_mod32: r32,
        actual_mod7: r7,
        holds,
    })
}

/// Odd primes in `lo..=hi`.
pub fn odd_primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi)
        .filter(|&n| n % 2 == 1 && is_probable_prime(&BigUint::from(n)))
        .collect()
}

/// Exponents `p` in `p_min..=p_max` whose `G_p` passes the primality test,
/// in increasing order. Exponents are tested in parallel on the current
/// rayon pool.
pub fn scan_exponents(p_min: u64, p_max: u64) -> Result<Vec<GmNorm>> {
    if p_min < 3 {
        return Err(Error::invalid(format!(
            "scan lower bound {p_min} must be at least 3"
        )));
    }
    if p_min > p_max {
        return Ok(Vec::new());
    }
    let mut hits: Vec<GmNorm> = odd_primes_in(p_min, p_max)
        .into_par_iter()
        .map(|p| gm_norm(p).expect("odd prime exponent"))
        .filter(|g| g.primality.is_prime())
        .collect();
    hits.sort_by_key(|g| g.p);
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon(7).unwrap(), 1);
        assert_eq!(epsilon(5).unwrap(), -1);
        assert_eq!(epsilon(47).unwrap(), 1);
        assert!(epsilon(4).is_err());
    }

    #[test]
    fn epsilon_is_jacobi_of_two() {
        for p in odd_primes_in(3, 2000) {
            let j = crate::arith::jacobi_i64(2, p).unwrap().as_i8();
            assert_eq!(epsilon(p).unwrap(), j);
        }
    }

    #[test]
    fn gm_norm_examples() {
        assert_eq!(gm_norm(7).unwrap().value, BigUint::from(113u32));
        assert_eq!(
            gm_norm(47).unwrap().value,
            BigUint::from(140737471578113u64)
        );
        assert_eq!(
            gm_norm(73).unwrap().value,
            "9444732965601851473921".parse::<BigUint>().unwrap()
        );
        assert_eq!(gm_norm(7).unwrap().primality, Primality::ProvenSmall);
        assert_eq!(gm_norm(73).unwrap().primality, Primality::ProbablePrime);
        assert_eq!(gm_norm(13).unwrap().primality, Primality::Composite);
        assert_eq!(gm_norm_untested(13).unwrap().primality, Primality::Untested);
        assert!(gm_norm(1).is_err());
        assert!(gm_norm(2).is_err());
        assert!(gm_norm(9).is_err());
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(gm_norm_oracle(7).unwrap(), BigUint::from(113u32));
        assert_eq!(gaussian_mersenne(3), GaussianInt::new(-3, 2));
        assert_eq!(gm_norm_oracle(3).unwrap(), BigUint::from(13u32));
        assert_eq!(
            gm_norm_oracle(113).unwrap(),
            "10384593717069655112945804582584321"
                .parse::<BigUint>()
                .unwrap()
        );
    }

    #[test]
    fn formula_matches_oracle_and_conjugate() {
        for p in odd_primes_in(3, 601) {
            let formula = gm_norm_untested(p).unwrap().value;
            assert_eq!(formula, gm_norm_oracle(p).unwrap(), "p = {p}");
            let conj = &GaussianInt::new(1, -1).pow(p) - &GaussianInt::one();
            assert_eq!(conj.norm(), formula);
        }
    }

    #[test]
    fn norm_is_multiplicative() {
        let z = GaussianInt::new(-3, 2);
        let w = GaussianInt::new(5, -11);
        assert_eq!((&z * &w).norm(), z.norm() * w.norm());
        assert_eq!(z.conj().norm(), z.norm());
    }

    #[test]
    fn congruence_predictions() {
        let c47 = predict_congruences(47).unwrap();
        assert_eq!(c47.mod7, Some(4));
        assert!(c47.applicable.mod7);
        let c73 = predict_congruences(73).unwrap();
        assert_eq!(c73.mod7, Some(1));
        assert!(c73.applicable.mod7 && c73.applicable.mod32);

        let check5 = check_congruences(5).unwrap();
        assert_eq!(gm_norm(5).unwrap().value, BigUint::from(41u32));
        assert_eq!(check5.actual_mod7, 6);
        assert!(!check5.prediction.applicable.mod7);
        assert!(check5.holds);

        let c7 = check_congruences(7).unwrap();
        assert!(!c7.prediction.applicable.mod32);
        assert_eq!(c7.actual_mod32, 113 % 32);

        assert!(!predict_congruences(3).unwrap().applicable.mod8);
    }

    #[test]
    fn every_applicable_congruence_holds_to_601() {
        for p in odd_primes_in(3, 601) {
            assert!(check_congruences(p).unwrap().holds, "p = {p}");
        }
    }

    #[test]
    fn scan_contains_known_exponents() {
        let hits: Vec<u64> = scan_exponents(3, 120)
            .unwrap()
            .iter()
            .map(|g| g.p)
            .collect();
        for p in [7, 47, 73, 113, 5, 11, 19, 29, 79] {
            assert!(hits.contains(&p), "missing {p} in {hits:?}");
        }
        assert!(hits.windows(2).all(|w| w[0] < w[1]));
        for &p in &hits {
            if p < 32 {
                let g = gm_norm_untested(p).unwrap().value.to_u64().unwrap();
                assert!(trial_division(g), "G_{p} = {g}");
            }
        }
        assert!(trial_division(41) && trial_division(2113));
        assert_eq!(
            hits,
            scan_exponents(3, 120)
                .unwrap()
                .iter()
                .map(|g| g.p)
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn scan_bounds() {
        let hits: Vec<u64> = scan_exponents(48, 72)
            .unwrap()
            .iter()
            .map(|g| g.p)
            .collect();
        assert!(!hits.contains(&47) && !hits.contains(&73));
        assert!(scan_exponents(50, 40).unwrap().is_empty());
        assert!(scan_exponents(2, 40).is_err());
        let inclusive: Vec<u64> = scan_exponents(47, 47)
            .unwrap()
            .iter()
            .map(|g| g.p)
            .collect();
        assert_eq!(inclusive, vec![47]);
    }
}
