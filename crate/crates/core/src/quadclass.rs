//! Positive definite binary quadratic forms and the form class group of a
//! negative discriminant.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_probable_prime, sqrt_mod_prime};
use crate::error::{Error, Result};
use crate::serde_decimal;

/// `a*x^2 + b*x*y + c*y^2` with `a > 0`, negative discriminant, and
/// `gcd(a, b, c) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QuadForm {
    #[serde(with = "serde_decimal::signed")]
    pub a: BigInt,
    #[serde(with = "serde_decimal::signed")]
    pub b: BigInt,
    #[serde(with = "serde_decimal::signed")]
    pub c: BigInt,
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl QuadForm {
    /// Builds a form, rejecting non-positive `a`, non-negative discriminant
    /// and imprimitive coefficients.
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Result<Self> {
        let form = QuadForm {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        };
        if !form.a.is_positive() {
            return Err(Error::invalid(format!("form {form}: a must be positive")));
        }
        if !form.discriminant().is_negative() {
            return Err(Error::invalid(format!(
                "form {form}: discriminant must be negative"
            )));
        }
        if !form.a.gcd(&form.b).gcd(&form.c).is_one() {
            return Err(Error::invalid(format!("form {form} is not primitive")));
        }
        Ok(form)
    }

    fn raw(a: BigInt, b: BigInt, c: BigInt) -> Self {
        QuadForm { a, b, c }
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    /// `|b| <= a <= c`, with `b >= 0` when `|b| = a` or `a = c`.
    pub fn is_reduced(&self) -> bool {
        let abs_b = self.b.abs();
        if abs_b > self.a || self.a > self.c {
            return false;
        }
        if (abs_b == self.a || self.a == self.c) && self.b.is_negative() {
            return false;
        }
        true
    }

    /// The principal form of discriminant `disc`.
    pub fn principal(disc: i64) -> Result<Self> {
        check_discriminant(disc)?;
        let b = disc.rem_euclid(2);
        Ok(QuadForm::raw(
            BigInt::one(),
            BigInt::from(b),
            BigInt::from((b - disc) / 4),
        ))
    }

    pub fn is_principal(&self) -> bool {
        self.a.is_one()
    }

    /// Inverse class, reduced.
    pub fn inverse(&self) -> QuadForm {
        reduce_unchecked(QuadForm::raw(self.a.clone(), -&self.b, self.c.clone()))
    }

    pub fn evaluate(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }
}

pub fn check_discriminant(disc: i64) -> Result<()> {
    if disc >= 0 || !matches!(disc.rem_euclid(4), 0 | 1) {
        return Err(Error::invalid(format!(
            "discriminant {disc} must be negative and 0 or 1 mod 4"
        )));
    }
    Ok(())
}

/// The unique reduced form equivalent to `f`.
pub fn reduce(f: &QuadForm) -> Result<QuadForm> {
    let checked = QuadForm::new(f.a.clone(), f.b.clone(), f.c.clone())?;
    Ok(reduce_unchecked(checked))
}

fn reduce_unchecked(f: QuadForm) -> QuadForm {
    let QuadForm {
        mut a,
        mut b,
        mut c,
    } = f;
    let two = BigInt::from(2);
    loop {
        // normalize: -a < b <= a
        if !(-&a < b && b <= a) {
            let two_a = &two * &a;
            let (mut q, mut r) = b.div_mod_floor(&two_a);
            if r > a {
                r -= &two_a;
                q += 1;
            }
            c -= (&b + &r) / &two * &q;
            b = r;
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        if a == c && b.is_negative() {
            b = -b;
        }
        return QuadForm::raw(a, b, c);
    }
}

/// All primitive reduced forms of discriminant `disc`, sorted by `(a, b)`.
pub fn enumerate_reduced(disc: i64) -> Result<Vec<QuadForm>> {
    check_discriminant(disc)?;
    let abs = disc.unsigned_abs() as i64;
    let mut forms = Vec::new();
    // walk b >= 0 with b = disc (mod 2), then split (b^2 - disc)/4 = a*c
    let mut b = abs % 2;
    while 3 * b * b <= abs {
        let q = (b * b + abs) / 4;
        let mut a = b.max(1);
        while a * a <= q {
            if q % a == 0 {
                let c = q / a;
                if a.gcd(&b).gcd(&c) == 1 {
                    forms.push(QuadForm::raw(a.into(), b.into(), c.into()));
                    if b > 0 && b < a && a < c {
                        forms.push(QuadForm::raw(a.into(), (-b).into(), c.into()));
                    }
                }
            }
            a += 1;
        }
        b += 2;
    }
    forms.sort();
    Ok(forms)
}

/// Class number `h(disc)`.
pub fn class_number(disc: i64) -> Result<u64> {
    Ok(enumerate_reduced(disc)?.len() as u64)
}

/// Dirichlet composition of two forms of the same discriminant, reduced.
pub fn compose(f: &QuadForm, g: &QuadForm) -> Result<QuadForm> {
    let disc = f.discriminant();
    if disc != g.discriminant() {
        return Err(Error::invalid(format!(
            "cannot compose {f} and {g}: discriminants differ"
        )));
    }
    QuadForm::new(f.a.clone(), f.b.clone(), f.c.clone())?;
    QuadForm::new(g.a.clone(), g.b.clone(), g.c.clone())?;
    Ok(compose_unchecked(f, g, &disc))
}

fn compose_unchecked(f: &QuadForm, g: &QuadForm, disc: &BigInt) -> QuadForm {
    let (f1, f2) = if f.a > g.a { (g, f) } else { (f, g) };
    let (a1, a2) = (&f1.a, &f2.a);
    let (b2, c2) = (&f2.b, &f2.c);
    let s: BigInt = (&f1.b + b2) / 2;
    let n = b2 - &s;

    let (y1, d) = if a2.is_multiple_of(a1) {
        (BigInt::zero(), a1.clone())
    } else {
        let e = a2.extended_gcd(a1);
        normalize_egcd(e.gcd, e.x)
    };
    let (x2, y2, d1) = if s.is_multiple_of(&d) {
        (BigInt::zero(), -BigInt::one(), d.clone())
    } else {
        let e = s.extended_gcd(&d);
        let (d1, x2, y2) = if e.gcd.is_negative() {
            (-e.gcd, -e.x, -e.y)
        } else {
            (e.gcd, e.x, e.y)
        };
        (x2, -y2, d1)
    };

    let v1 = a1 / &d1;
    let v2 = a2 / &d1;
    let r = (&y1 * &y2 * &n - &x2 * c2).mod_floor(&v1);
    let b3 = b2 + BigInt::from(2) * &v2 * &r;
    let a3 = &v1 * &v2;
    let c3 = (&b3 * &b3 - disc) / (BigInt::from(4) * &a3);
    reduce_unchecked(QuadForm::raw(a3, b3, c3))
}

fn normalize_egcd(gcd: BigInt, x: BigInt) -> (BigInt, BigInt) {
    if gcd.is_negative() {
        (-x, -gcd)
    } else {
        (x, gcd)
    }
}

/// `f` composed with itself `k` times.
pub fn power(f: &QuadForm, k: u64) -> Result<QuadForm> {
    let disc = f.discriminant();
    let principal = QuadForm::principal(
        disc.to_i64()
            .ok_or_else(|| Error::invalid("discriminant too large"))?,
    )?;
    let mut acc = principal;
    let mut base = reduce(f)?;
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            acc = compose_unchecked(&acc, &base, &disc);
        }
        base = compose_unchecked(&base, &base, &disc);
        k >>= 1;
    }
    Ok(acc)
}

/// Order of the class of `f`.
pub fn order(f: &QuadForm) -> Result<u64> {
    let disc = f.discriminant();
    let start = reduce(f)?;
    let mut current = start.clone();
    let mut k = 1;
    while !current.is_principal() {
        current = compose_unchecked(&current, &start, &disc);
        k += 1;
    }
    Ok(k)
}

/// Class number and invariant-factor decomposition of the form class group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupSummary {
    pub discriminant: i64,
    pub h: u64,
    /// Invariant factors `n1 | n2 | ...`, ascending; `[1]` for the trivial group.
    pub cyclic_orders: Vec<u64>,
    pub has_order_4_element: bool,
    pub forms: Vec<QuadForm>,
}

pub fn group_structure(disc: i64) -> Result<ClassGroupSummary> {
    let forms = enumerate_reduced(disc)?;
    let h = forms.len() as u64;
    let orders = forms.iter().map(order).collect::<Result<Vec<u64>>>()?;
    Ok(ClassGroupSummary {
        discriminant: disc,
        h,
        cyclic_orders: invariant_factors(h, &orders),
        has_order_4_element: orders.iter().any(|o| o % 4 == 0),
        forms,
    })
}

fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        let mut e = 0;
        while n % q == 0 {
            n /= q;
            e += 1;
        }
        if e > 0 {
            out.push((q, e));
        }
        q += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Invariant factors of an abelian group of order `h` with the given
/// multiset of element orders.
///
/// For each prime `q`, `#{x : x^(q^k) = 1} = q^(sum_i min(k, e_i))`, which
/// pins down the exponents `e_i` of the `q`-primary cyclic factors.
fn invariant_factors(h: u64, orders: &[u64]) -> Vec<u64> {
    if h == 1 {
        return vec![1];
    }
    let mut primary: Vec<(u64, Vec<u32>)> = Vec::new();
    for (q, total) in prime_factors(h) {
        let mut log_counts = vec![0u32];
        let mut k = 1;
        while *log_counts.last().unwrap() < total {
            let qk = q.pow(k);
            let count = orders.iter().filter(|&&o| qk % o == 0).count() as u64;
            log_counts.push(exact_log(count, q));
            k += 1;
        }
        // at_least[k-1] = number of factors with exponent >= k
        let at_least: Vec<u32> = log_counts.windows(2).map(|w| w[1] - w[0]).collect();
        let mut exps = Vec::new();
        for (i, &n) in at_least.iter().enumerate() {
            let next = at_least.get(i + 1).copied().unwrap_or(0);
            for _ in 0..(n - next) {
                exps.push(i as u32 + 1);
            }
        }
        exps.sort_unstable_by(|a, b| b.cmp(a));
        primary.push((q, exps));
    }
    let width = primary.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
    let mut factors: Vec<u64> = (0..width)
        .map(|i| {
            primary
                .iter()
                .map(|(q, exps)| exps.get(i).map_or(1, |&e| q.pow(e)))
                .product()
        })
        .collect();
    factors.sort_unstable();
    factors
}

fn exact_log(mut n: u64, q: u64) -> u32 {
    let mut e = 0;
    while n > 1 {
        assert_eq!(n % q, 0, "subgroup size must be a power of {q}");
        n /= q;
        e += 1;
    }
    e
}

/// Reduced classes that represent the prime `n`: one per square root `b` of
/// `disc` mod `4n`, namely the class of `(n, b, (b^2 - disc)/4n)`. Empty when
/// `disc` is a non-residue mod `n`.
pub fn represented_by_class(n: &BigUint, disc: i64) -> Result<BTreeSet<QuadForm>> {
    check_discriminant(disc)?;
    let two_d = BigUint::from(2 * disc.unsigned_abs());
    if !gcd(n, &two_d).is_one() {
        return Err(Error::invalid(format!("{n} shares a factor with 2*{disc}")));
    }
    if !is_probable_prime(n) {
        return Err(Error::invalid(format!("{n} is not prime")));
    }
    let n_int = BigInt::from(n.clone());
    let disc_int = BigInt::from(disc);
    let residue = disc_int
        .mod_floor(&n_int)
        .to_biguint()
        .expect("nonnegative");
    let Some(root) = sqrt_mod_prime(&residue, n)? else {
        return Ok(BTreeSet::new());
    };
    let root = BigInt::from(root);
    let parity = BigInt::from(disc.rem_euclid(2));
    let mut classes = BTreeSet::new();
    for r in [root.clone(), &n_int - &root] {
        let b = if r.mod_floor(&BigInt::from(2)) == parity {
            r
        } else {
            r + &n_int
        };
        let c = (&b * &b - &disc_int) / (BigInt::from(4) * &n_int);
        classes.insert(reduce_unchecked(QuadForm::raw(n_int.clone(), b, c)));
    }
    Ok(classes)
}

/// `floor(sqrt(|disc| / 3))`, the bound on `a` for reduced forms.
pub fn reduced_a_bound(disc: i64) -> i64 {
    (disc.unsigned_abs() / 3).sqrt() as i64
}
