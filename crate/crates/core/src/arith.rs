//! Exact integer and rational helpers: negative continued fractions,
//! divisor enumeration and the Seifert invariant solver.
//!
//! Continued fractions use the negative (Hirzebruch-Jung) convention
//!
//! ```text
//! [t1, t2, ..., tm] = t1 - 1/(t2 - 1/(... - 1/tm))
//! ```
//!
//! and are expanded with the ceiling recurrence `t = ceil(n/d)`,
//! `(n, d) <- (d, t*d - n)`, which yields terms `>= 2` whenever `0 < d < n`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Canonical "num/den" rendering used in every text output.
pub fn render_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn rational(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Rational {
    Rational::new(n.into(), d.into())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfExpansion {
    terms: Vec<i64>,
}

impl CfExpansion {
    pub fn new(terms: Vec<i64>) -> Self {
        CfExpansion { terms }
    }

    pub fn terms(&self) -> &[i64] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Expands `num/den` (with `0 < den < num`, coprime) into its negative
/// continued fraction.
pub fn cf_expand(num: u64, den: u64) -> Result<CfExpansion> {
    if den == 0 || den >= num {
        return Err(Error::invalid(format!(
            "continued fraction needs 0 < den < num, got {num}/{den}"
        )));
    }
    if num.gcd(&den) != 1 {
        return Err(Error::invalid(format!("{num}/{den} is not reduced")));
    }
    let (mut n, mut d) = (u128::from(num), u128::from(den));
    let mut terms = Vec::new();
    while d != 0 {
        let t = n.div_ceil(d);
        terms.push(t as i64);
        (n, d) = (d, t * d - n);
    }
    Ok(CfExpansion { terms })
}

pub fn cf_evaluate(cf: &CfExpansion) -> Result<Rational> {
    let (last, rest) = cf
        .terms
        .split_last()
        .ok_or_else(|| Error::invalid("empty continued fraction"))?;
    let mut x = Rational::from_integer(BigInt::from(*last));
    for &t in rest.iter().rev() {
        if x.is_zero() {
            return Err(Error::invalid("continued fraction hits a zero denominator"));
        }
        x = Rational::from_integer(BigInt::from(t)) - x.recip();
    }
    Ok(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeifertData {
    pub e0: i64,
    pub p_prime: u64,
    pub q_prime: u64,
    pub r_prime: u64,
}

/// Products below this size are also solved by exhaustive search and the
/// two answers compared.
const BRUTE_FORCE_CROSSCHECK_LIMIT: u64 = 10_000;

/// Solves `e0*pqr + p'qr + pq'r + pqr' = -1` with `1 <= p' < p` etc.
///
/// Each unknown is pinned by reducing modulo its own multiplicity: for
/// example `p' = -(qr)^-1 mod p`. A multiplicity of 1 carries no
/// exceptional fiber and gets the invariant 0.
pub fn solve_seifert_diophantine(p: u64, q: u64, r: u64) -> Result<SeifertData> {
    if p == 0 || q == 0 || r == 0 {
        return Err(Error::invalid("Seifert multiplicities must be positive"));
    }
    if p == 1 && q == 1 && r == 1 {
        return Err(Error::invalid("(1,1,1) has no exceptional fibers"));
    }
    if p.gcd(&q) != 1 || p.gcd(&r) != 1 || q.gcd(&r) != 1 {
        return Err(Error::invalid(format!(
            "({p},{q},{r}) is not pairwise coprime"
        )));
    }
    let (bp, bq, br) = (BigInt::from(p), BigInt::from(q), BigInt::from(r));
    let p_prime = neg_inverse_mod(&(&bq * &br), &bp);
    let q_prime = neg_inverse_mod(&(&bp * &br), &bq);
    let r_prime = neg_inverse_mod(&(&bp * &bq), &br);
    let pqr = &bp * &bq * &br;
    let rest = BigInt::from(-1)
        - &p_prime * &bq * &br
        - &bp * &q_prime * &br
        - &bp * &bq * &r_prime;
    let (e0, rem) = rest.div_rem(&pqr);
    debug_assert!(rem.is_zero());
    let to_u64 = |x: &BigInt| x.to_u64().expect("residue below modulus");
    let data = SeifertData {
        e0: e0
            .to_i64()
            .ok_or_else(|| Error::Overflow(format!("e0 = {e0}")))?,
        p_prime: to_u64(&p_prime),
        q_prime: to_u64(&q_prime),
        r_prime: to_u64(&r_prime),
    };

    if p.checked_mul(q).and_then(|x| x.checked_mul(r)).unwrap_or(u64::MAX)
        <= BRUTE_FORCE_CROSSCHECK_LIMIT
    {
        let brute = seifert_brute_force(p, q, r);
        if brute != vec![data] {
            return Err(Error::Mismatch(format!(
                "Seifert solver disagrees with exhaustive search for ({p},{q},{r})"
            )));
        }
    }
    Ok(data)
}

// -(a^-1) mod m, in [1, m-1]; 0 when m = 1.
fn neg_inverse_mod(a: &BigInt, m: &BigInt) -> BigInt {
    if m.is_one() {
        return BigInt::zero();
    }
    let egcd = a.extended_gcd(m);
    debug_assert!(egcd.gcd.is_one());
    (-egcd.x).mod_floor(m)
}

/// Every `(e0, p', q', r')` in the admissible box solving the equation.
pub fn seifert_brute_force(p: u64, q: u64, r: u64) -> Vec<SeifertData> {
    let range = |n: u64| if n == 1 { 0..=0 } else { 1..=n - 1 };
    let (pi, qi, ri) = (p as i128, q as i128, r as i128);
    let pqr = pi * qi * ri;
    let mut out = Vec::new();
    for pp in range(p) {
        for qq in range(q) {
            for rr in range(r) {
                let rest = -1 - pp as i128 * qi * ri - pi * qq as i128 * ri - pi * qi * rr as i128;
                if rest % pqr == 0 {
                    out.push(SeifertData {
                        e0: (rest / pqr) as i64,
                        p_prime: pp,
                        q_prime: qq,
                        r_prime: rr,
                    });
                }
            }
        }
    }
    out
}

/// All `(s, n/s)` with `s <= n/s`, by trial division, `s` ascending.
pub fn divisor_pairs(n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut s = 1u64;
    while s <= n / s {
        if n % s == 0 {
            out.push((s, n / s));
        }
        s += 1;
    }
    out
}

/// Floor of a rational as a big integer.
pub(crate) fn floor(x: &Rational) -> BigInt {
    x.numer().div_floor(x.denom())
}
