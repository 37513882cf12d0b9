//! Audits of the `x^2 + d*y^2` congruence statements on concrete Gaussian
//! Mersenne primes, with ordinary Mersenne primes as a control.
//!
//! A record's verdict is decided in this order:
//!
//! 1. `p <= 7` is below the theorem range: `OutOfRange`.
//! 2. any hypothesis flag fails: `HypothesisNotMet`.
//! 3. no positive `(x, y)` exists: `NoRepresentation`.
//! 4. `x = ±1 (mod 8)` and `y = 0 (mod 8)`: `Confirmed`, otherwise `Refuted`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_probable_prime, jacobi, Symbol};
use crate::error::{Error, Result};
use crate::gm::{gm_norm, odd_primes_in, scan_exponents, GmNorm};
use crate::quadclass::group_structure;
use crate::repr::{represent, representable, Representation};
use crate::serde_decimal;

/// Theorem statements only cover exponents above this bound.
pub const THEOREM_P_BOUND: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Confirmed,
    HypothesisNotMet,
    NoRepresentation,
    OutOfRange,
    Refuted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct HypothesisFlags {
    /// `p = ±1 (mod 8)`.
    pub p_mod8_ok: bool,
    pub gp_probable_prime: bool,
    /// `(2/d) = 1`.
    pub legendre_2_d: bool,
    /// `(-d/G_p) = 1`.
    pub legendre_minus_d_gp: bool,
    /// The class group of discriminant `-8d` has an element of order 4.
    pub class_group_order4: bool,
}

impl HypothesisFlags {
    pub fn all(&self) -> bool {
        self.p_mod8_ok
            && self.gp_probable_prime
            && self.legendre_2_d
            && self.legendre_minus_d_gp
            && self.class_group_order4
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub p: u64,
    pub d: u64,
    #[serde(with = "serde_decimal")]
    pub g_value: BigUint,
    pub hypothesis_flags: HypothesisFlags,
    pub representation: Option<Representation>,
    pub x_mod8: Option<u32>,
    pub y_mod8: Option<u32>,
    /// Only filled for `d = 7`.
    pub artin_trivial: Option<bool>,
    pub verdict: Verdict,
}

/// Residue checks of the `x^2 + 7y^2` lemma, one per step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaChecks {
    pub x_odd: bool,
    pub y_even: bool,
    pub four_divides_y: bool,
    pub x_pm1_mod8: bool,
}

impl LemmaChecks {
    pub fn all(&self) -> bool {
        self.x_odd && self.y_even && self.four_divides_y && self.x_pm1_mod8
    }
}

pub fn audit_lemma(x: &BigUint, y: &BigUint, g: &BigUint) -> Result<LemmaChecks> {
    if x * x + y * y * 7u32 != *g {
        return Err(Error::invalid(format!("{x}^2 + 7*{y}^2 != {g}")));
    }
    let x8 = residue(x, 8);
    Ok(LemmaChecks {
        x_odd: x.is_odd(),
        y_even: y.is_even(),
        four_divides_y: residue(y, 4) == 0,
        x_pm1_mod8: x8 == 1 || x8 == 7,
    })
}

fn residue(n: &BigUint, m: u32) -> u32 {
    (n % m).to_u32().expect("small residue")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtinClass {
    Trivial,
    Rho,
}

/// Artin symbol of `x + y*sqrt(-7)` in the quadratic extension cut out by
/// `a + b*omega -> a - 2b (mod 8)`: trivial iff `x + 3y = ±1 (mod 8)`.
pub fn artin_class_d7(x: &BigUint, y: &BigUint) -> ArtinClass {
    let image = (residue(x, 8) + 3 * residue(y, 8)) % 8;
    if image == 1 || image == 7 {
        ArtinClass::Trivial
    } else {
        ArtinClass::Rho
    }
}

fn is_squarefree(d: u64) -> bool {
    let mut q = 2u64;
    while q * q <= d {
        if d % (q * q) == 0 {
            return false;
        }
        q += 1;
    }
    d > 0
}

fn check_generalized_d(d: u64) -> Result<()> {
    if d % 24 != 7 {
        return Err(Error::invalid(format!("d = {d} is not 7 mod 24")));
    }
    if !is_squarefree(d) {
        return Err(Error::invalid(format!("d = {d} is not square-free")));
    }
    Ok(())
}

/// Whether the class group of discriminant `-8d` has an element of order 4.
pub fn class_group_order4(d: u64) -> Result<bool> {
    let disc = i64::try_from(d)
        .ok()
        .and_then(|d| d.checked_mul(-8))
        .ok_or_else(|| Error::invalid(format!("d = {d} too large")))?;
    Ok(group_structure(disc)?.has_order_4_element)
}

fn audit_with(gm: &GmNorm, d: u64, order4: bool) -> Result<VerificationRecord> {
    let p = gm.p;
    let g = &gm.value;
    let prime = gm.primality.is_prime();
    let flags = HypothesisFlags {
        p_mod8_ok: matches!(p % 8, 1 | 7),
        gp_probable_prime: prime,
        legendre_2_d: jacobi(&BigInt::from(2), &BigUint::from(d))? == Symbol::One,
        legendre_minus_d_gp: jacobi(&-BigInt::from(d), g)? == Symbol::One,
        class_group_order4: order4,
    };
    let representation = if prime { represent(g, d)? } else { None };
    let x_mod8 = representation.as_ref().map(|r| r.x_mod(8));
    let y_mod8 = representation.as_ref().map(|r| r.y_mod(8));
    let artin_trivial = match (&representation, d) {
        (Some(r), 7) => Some(artin_class_d7(&r.x, &r.y) == ArtinClass::Trivial),
        _ => None,
    };

    let verdict = if p <= THEOREM_P_BOUND {
        Verdict::OutOfRange
    } else if !flags.all() {
        Verdict::HypothesisNotMet
    } else if representation.is_none() {
        Verdict::NoRepresentation
    } else if matches!(x_mod8, Some(1 | 7)) && y_mod8 == Some(0) {
        Verdict::Confirmed
    } else {
        Verdict::Refuted
    };

    Ok(VerificationRecord {
        p,
        d,
        g_value: g.clone(),
        hypothesis_flags: flags,
        representation,
        x_mod8,
        y_mod8,
        artin_trivial,
        verdict,
    })
}

fn check_exponent(p: u64) -> Result<()> {
    if p < 3 || !is_probable_prime(&BigUint::from(p)) {
        return Err(Error::invalid(format!("exponent {p} is not an odd prime")));
    }
    Ok(())
}

/// Audit `G_p = x^2 + 7y^2 => x = ±1, y = 0 (mod 8)` for one exponent `p > 7`.
pub fn audit_theorem_d7(p: u64) -> Result<VerificationRecord> {
    check_exponent(p)?;
    if p <= THEOREM_P_BOUND {
        return Err(Error::OutOfTheoremRange {
            p,
            bound: THEOREM_P_BOUND,
        });
    }
    audit_with(&gm_norm(p)?, 7, class_group_order4(7)?)
}

/// Audit `8 | y` for `G_p = x^2 + d*y^2`, `d = 7 (mod 24)` square-free.
pub fn audit_generalized(p: u64, d: u64) -> Result<VerificationRecord> {
    check_generalized_d(d)?;
    check_exponent(p)?;
    audit_with(&gm_norm(p)?, d, class_group_order4(d)?)
}

/// Representability of `G_p` by `x^2 + d*y^2` next to `x^2 + 2d*y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct D2dAudit {
    pub p: u64,
    pub d: u64,
    pub rep_d: bool,
    pub rep_2d: bool,
    pub equivalent: bool,
    pub d_mod4: u64,
}

pub fn audit_d_2d(p: u64, d: u64) -> Result<D2dAudit> {
    check_exponent(p)?;
    audit_d_2d_with(&gm_norm(p)?, d)
}

fn audit_d_2d_with(gm: &GmNorm, d: u64) -> Result<D2dAudit> {
    if d == 0 || !is_squarefree(d) {
        return Err(Error::invalid(format!(
            "d = {d} must be positive and square-free"
        )));
    }
    if !gcd(&gm.value, &BigUint::from(2 * d)).is_one() {
        return Err(Error::Ramified { p: gm.p, d });
    }
    let rep_d = representable(&gm.value, d)?;
    let rep_2d = representable(&gm.value, 2 * d)?;
    Ok(D2dAudit {
        p: gm.p,
        d,
        rep_d,
        rep_2d,
        equivalent: rep_d == rep_2d,
        d_mod4: d % 4,
    })
}

/// Ordinary Mersenne prime `M_p = x^2 + 7y^2`, `p = 1 (mod 3)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MersenneRecord {
    pub p: u64,
    #[serde(with = "serde_decimal")]
    pub m_value: BigUint,
    #[serde(with = "serde_decimal")]
    pub x: BigUint,
    #[serde(with = "serde_decimal")]
    pub y: BigUint,
    pub x_mod8: u32,
    pub y_mod8: u32,
    pub artin_trivial: bool,
}

impl MersenneRecord {
    /// `8 | x` and `y = ±3 (mod 8)`.
    pub fn pattern_holds(&self) -> bool {
        self.x_mod8 == 0 && matches!(self.y_mod8, 3 | 5)
    }
}

/// Solve `M_p = x^2 + 7y^2`. `Ok(None)` when `M_p` is composite; a prime
/// `M_p` with `p != 1 (mod 3)` is rejected.
pub fn mersenne_crosscheck(p: u64) -> Result<Option<MersenneRecord>> {
    check_exponent(p)?;
    let m = (BigUint::one() << p) - 1u32;
    if !is_probable_prime(&m) {
        return Ok(None);
    }
    if p % 3 != 1 {
        return Err(Error::invalid(format!("exponent {p} is not 1 mod 3")));
    }
    let rep = represent(&m, 7)?
        .ok_or_else(|| Error::invalid(format!("M_{p} has no x^2 + 7y^2 representation")))?;
    Ok(Some(MersenneRecord {
        p,
        x_mod8: rep.x_mod(8),
        y_mod8: rep.y_mod(8),
        artin_trivial: artin_class_d7(&rep.x, &rep.y) == ArtinClass::Trivial,
        m_value: m,
        x: rep.x,
        y: rep.y,
    }))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub confirmed: u64,
    pub hypothesis_not_met: u64,
    pub no_representation: u64,
    pub out_of_range: u64,
    pub refuted: u64,
    /// `d = 7` records in the theorem range that meet `p = ±1 (mod 8)` with
    /// `G_p` prime, yet are not confirmed.
    pub unexpected_hypothesis_failures: u64,
    pub d2d_disagreements: u64,
    pub mersenne_pattern_failures: u64,
}

impl SuiteSummary {
    pub fn tally(records: &[VerificationRecord]) -> Self {
        let mut s = SuiteSummary::default();
        for r in records {
            match r.verdict {
                Verdict::Confirmed => s.confirmed += 1,
                Verdict::HypothesisNotMet => s.hypothesis_not_met += 1,
                Verdict::NoRepresentation => s.no_representation += 1,
                Verdict::OutOfRange => s.out_of_range += 1,
                Verdict::Refuted => s.refuted += 1,
            }
            if is_unexpected(r) {
                s.unexpected_hypothesis_failures += 1;
            }
        }
        s
    }
}

fn is_unexpected(r: &VerificationRecord) -> bool {
    r.d == 7
        && r.p > THEOREM_P_BOUND
        && r.hypothesis_flags.p_mod8_ok
        && r.hypothesis_flags.gp_probable_prime
        && r.verdict != Verdict::Confirmed
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub p_max: u64,
    pub d_list: Vec<u64>,
    /// Sorted by `(p, d)`.
    pub records: Vec<VerificationRecord>,
    /// Sorted by `(p, d)`; ramified pairs are left out.
    pub d2d: Vec<D2dAudit>,
    pub mersenne: Vec<MersenneRecord>,
    pub summary: SuiteSummary,
}

/// Audit every Gaussian Mersenne prime `G_p`, `3 <= p <= p_max`, against
/// each `d` in `d_list` (each `d = 7 (mod 24)`, square-free), plus the
/// `d`/`2d` comparison and the Mersenne control for `p = 1 (mod 3)`.
///
/// Work fans out on the current rayon pool; the output order does not
/// depend on scheduling.
pub fn run_suite(p_max: u64, d_list: &[u64]) -> Result<SuiteReport> {
    if p_max < 7 {
        return Err(Error::invalid(format!(
            "p_max = {p_max} must be at least 7"
        )));
    }
    let mut d_list = d_list.to_vec();
    d_list.sort_unstable();
    d_list.dedup();
    for &d in &d_list {
        check_generalized_d(d)?;
    }
    let order4: BTreeMap<u64, bool> = d_list
        .iter()
        .map(|&d| class_group_order4(d).map(|o| (d, o)))
        .collect::<Result<_>>()?;

    let exponents = scan_exponents(3, p_max)?;
    let pairs: Vec<(&GmNorm, u64)> = exponents
        .iter()
        .flat_map(|g| d_list.iter().map(move |&d| (g, d)))
        .collect();

    let mut records = pairs
        .par_iter()
        .map(|&(g, d)| audit_with(g, d, order4[&d]))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by_key(|r| (r.p, r.d));

    let mut d2d: Vec<D2dAudit> = pairs
        .par_iter()
        .filter_map(|&(g, d)| match audit_d_2d_with(g, d) {
            Err(Error::Ramified { .. }) => None,
            other => Some(other),
        })
        .collect::<Result<Vec<_>>>()?;
    d2d.sort_by_key(|a| (a.p, a.d));

    let mut mersenne: Vec<MersenneRecord> = odd_primes_in(3, p_max)
        .into_par_iter()
        .filter(|p| p % 3 == 1)
        .map(mersenne_crosscheck)
        .filter_map(|r| r.transpose())
        .collect::<Result<Vec<_>>>()?;
    mersenne.sort_by_key(|m| m.p);

    let mut summary = SuiteSummary::tally(&records);
    summary.d2d_disagreements = d2d
        .iter()
        .filter(|a| a.p > THEOREM_P_BOUND && !a.equivalent)
        .count() as u64;
    summary.mersenne_pattern_failures =
        mersenne.iter().filter(|m| !m.pattern_holds()).count() as u64;

    Ok(SuiteReport {
        p_max,
        d_list,
        records,
        d2d,
        mersenne,
        summary,
    })
}
