//! Parametric triplet families and triplet enumeration.
//!
//! Given `p`, every solution of `pq + pr - qr = 1` with smallest entry `p`
//! satisfies `(q - p)(r - p) = p² - 1`, so the triplets are exactly
//! `(p, p + s, p + (p² - 1)/s)` over the divisors `s < sqrt(p² - 1)`.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::divisor_pairs;
use crate::error::{Error, Result};
use crate::fast::{d_invariant, LatticePoint};
use crate::triplet::Triplet;

/// Integer polynomial in `n`, coefficients in ascending degree (at most 2).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct Poly([i64; 3]);

impl Poly {
    pub const fn new(c0: i64, c1: i64, c2: i64) -> Self {
        Poly([c0, c1, c2])
    }

    pub fn eval(&self, n: i64) -> Option<i128> {
        let n = i128::from(n);
        let [c0, c1, c2] = self.0.map(i128::from);
        c2.checked_mul(n)?
            .checked_add(c1)?
            .checked_mul(n)?
            .checked_add(c0)
    }

    pub fn coefficients(&self) -> [i64; 3] {
        self.0
    }
}

impl TryFrom<Vec<i64>> for Poly {
    type Error = String;

    fn try_from(v: Vec<i64>) -> std::result::Result<Self, String> {
        if v.is_empty() || v.len() > 3 {
            return Err(format!("expected 1 to 3 coefficients, got {}", v.len()));
        }
        let mut c = [0; 3];
        c[..v.len()].copy_from_slice(&v);
        Ok(Poly(c))
    }
}

impl From<Poly> for Vec<i64> {
    fn from(p: Poly) -> Self {
        p.0.to_vec()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    Polynomial { p: Poly, q: Poly, r: Poly },
    /// `(F_{2n+1}, F_{2n+2}, F_{2n+3})`.
    Fibonacci,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub name: String,
    pub generator: Generator,
    pub expected_d: Option<Poly>,
    pub n_min: i64,
}

/// On-disk form of a polynomial family:
/// `{"name":str,"p":[c0,c1,c2],"q":[...],"r":[...],"expected_d":[...]|null,"n_min":int}`;
/// `expected_d` and `n_min` (default 1) may be omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub name: String,
    pub p: Poly,
    pub q: Poly,
    pub r: Poly,
    #[serde(default)]
    pub expected_d: Option<Poly>,
    #[serde(default = "default_n_min")]
    pub n_min: i64,
}

fn default_n_min() -> i64 {
    1
}

impl From<FamilyConfig> for FamilySpec {
    fn from(c: FamilyConfig) -> Self {
        FamilySpec {
            name: c.name,
            generator: Generator::Polynomial { p: c.p, q: c.q, r: c.r },
            expected_d: c.expected_d,
            n_min: c.n_min,
        }
    }
}

impl FamilySpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str::<FamilyConfig>(text)?.into())
    }

    /// The config form; `None` for non-polynomial families.
    pub fn to_config(&self) -> Option<FamilyConfig> {
        match &self.generator {
            Generator::Polynomial { p, q, r } => Some(FamilyConfig {
                name: self.name.clone(),
                p: p.clone(),
                q: q.clone(),
                r: r.clone(),
                expected_d: self.expected_d.clone(),
                n_min: self.n_min,
            }),
            Generator::Fibonacci => None,
        }
    }

    /// Symbolic form, e.g. `(2n+1,4n+1,4n+3)`.
    pub fn describe(&self) -> String {
        match &self.generator {
            Generator::Polynomial { p, q, r } => {
                format!("({},{},{})", render_poly(p), render_poly(q), render_poly(r))
            }
            Generator::Fibonacci => "(F(2n+1),F(2n+2),F(2n+3))".into(),
        }
    }

    pub fn triplet(&self, n: i64) -> Result<Triplet> {
        if n < self.n_min {
            return Err(Error::invalid(format!(
                "family {} starts at n = {}",
                self.name, self.n_min
            )));
        }
        let (p, q, r) = match &self.generator {
            Generator::Polynomial { p, q, r } => {
                let at = |poly: &Poly| {
                    poly.eval(n)
                        .and_then(|x| u64::try_from(x).ok())
                        .ok_or_else(|| {
                            Error::Overflow(format!("family {} at n = {n}", self.name))
                        })
                };
                (at(p)?, at(q)?, at(r)?)
            }
            Generator::Fibonacci => {
                let idx = usize::try_from(2 * n + 1)
                    .map_err(|_| Error::invalid(format!("n = {n}")))?;
                let f = |i| {
                    fibonacci(i).ok_or_else(|| Error::Overflow(format!("F({i})")))
                };
                (f(idx)?, f(idx + 1)?, f(idx + 2)?)
            }
        };
        Triplet::new(p, q, r)
    }

    pub fn expected(&self, n: i64) -> Option<i64> {
        self.expected_d
            .as_ref()
            .and_then(|e| e.eval(n))
            .and_then(|x| i64::try_from(x).ok())
    }
}

fn render_poly(p: &Poly) -> String {
    let [c0, c1, c2] = p.coefficients();
    let mut out = String::new();
    for (c, var) in [(c2, "n^2"), (c1, "n"), (c0, "")] {
        if c == 0 {
            continue;
        }
        let sign = if c < 0 { "-" } else if out.is_empty() { "" } else { "+" };
        let mag = c.unsigned_abs();
        let coef = if mag == 1 && !var.is_empty() { String::new() } else { mag.to_string() };
        out.push_str(&format!("{sign}{coef}{var}"));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// `F(i)` with `F(1) = F(2) = 1`; `None` on overflow.
pub fn fibonacci(i: usize) -> Option<u64> {
    if i == 0 {
        return Some(0);
    }
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 1..i {
        (a, b) = (b, a.checked_add(b)?);
    }
    Some(b)
}

fn poly_family(name: &str, p: Poly, q: Poly, r: Poly, d: Option<Poly>, n_min: i64) -> FamilySpec {
    FamilySpec {
        name: name.into(),
        generator: Generator::Polynomial { p, q, r },
        expected_d: d,
        n_min,
    }
}

/// The five families with closed-form d-invariants (`"1"`..`"5"`), the
/// consecutive family `(p, p+1, p²+p-1)` indexed by `p` and the odd-index
/// Fibonacci family.
pub fn builtin_families() -> Vec<FamilySpec> {
    vec![
        poly_family("1", Poly::new(1, 2, 0), Poly::new(1, 4, 0), Poly::new(3, 4, 0), Some(Poly::new(0, 2, 0)), 1),
        poly_family("2", Poly::new(1, 2, 0), Poly::new(2, 3, 0), Poly::new(1, 6, 0), Some(Poly::new(0, 2, 0)), 1),
        poly_family("3", Poly::new(1, 2, 0), Poly::new(1, 3, 0), Poly::new(5, 6, 0), Some(Poly::new(0, 2, 0)), 1),
        poly_family("4", Poly::new(3, 4, 0), Poly::new(4, 5, 0), Poly::new(11, 20, 0), Some(Poly::new(2, 6, 0)), 1),
        poly_family("5", Poly::new(1, 2, 0), Poly::new(2, 2, 0), Poly::new(1, 6, 4), Some(Poly::new(0, 1, 1)), 1),
        poly_family("consecutive", Poly::new(0, 1, 0), Poly::new(1, 1, 0), Poly::new(-1, 1, 1), None, 2),
        FamilySpec {
            name: "fibonacci".into(),
            generator: Generator::Fibonacci,
            expected_d: None,
            n_min: 1,
        },
    ]
}

pub fn builtin_family(name: &str) -> Option<FamilySpec> {
    builtin_families().into_iter().find(|f| f.name == name)
}

/// All triplets with smallest entry `p`, ordered by `q`.
pub fn enumerate_triplets(p: u64) -> Result<Vec<Triplet>> {
    if p <= 1 {
        return Err(Error::invalid(format!("p = {p} must be at least 2")));
    }
    let n = p
        .checked_mul(p)
        .ok_or_else(|| Error::Overflow(format!("p² for p = {p}")))?
        - 1;
    divisor_pairs(n)
        .into_iter()
        .filter(|&(s, t)| s < t)
        .map(|(s, t)| {
            let r = p.checked_add(t).ok_or_else(|| Error::Overflow(format!("r for p = {p}")))?;
            Triplet::new(p, p + s, r)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyRow {
    pub n: i64,
    pub triplet: Triplet,
    pub d_computed: i64,
    pub d_expected: Option<i64>,
    /// `None` when the family has no closed form.
    pub matched: Option<bool>,
    pub argmax: Option<LatticePoint>,
    pub qhb_obstructed: bool,
    /// `d >= p - 1` (odd `p`); always true for even `p`.
    pub lower_bound_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub name: String,
    pub rows: Vec<FamilyRow>,
}

impl FamilyReport {
    pub fn mismatches(&self) -> usize {
        self.rows.iter().filter(|r| r.matched == Some(false)).count()
    }
}

pub fn verify_family(spec: &FamilySpec, n_range: RangeInclusive<i64>) -> Result<FamilyReport> {
    if n_range.is_empty() || *n_range.start() < spec.n_min {
        return Err(Error::invalid(format!(
            "range {}..={} is empty or starts below n_min = {}",
            n_range.start(),
            n_range.end(),
            spec.n_min
        )));
    }
    let ns: Vec<i64> = n_range.collect();
    let rows = ns
        .par_iter()
        .map(|&n| {
            let triplet = spec.triplet(n)?;
            let res = d_invariant(&triplet)?;
            let d_expected = spec.expected(n);
            Ok(FamilyRow {
                n,
                triplet,
                d_computed: res.d,
                d_expected,
                matched: d_expected.map(|e| e == res.d),
                argmax: res.argmax,
                qhb_obstructed: res.qhb_obstructed,
                lower_bound_ok: triplet.is_p_even() || res.d >= triplet.p() as i64 - 1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FamilyReport { name: spec.name.clone(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trip(p: u64, q: u64, r: u64) -> Triplet {
        Triplet::new(p, q, r).unwrap()
    }

    #[test]
    fn builtin_examples() {
        let fams = builtin_families();
        assert_eq!(fams.len(), 7);
        let f1 = builtin_family("1").unwrap();
        assert_eq!(f1.triplet(1).unwrap(), trip(3, 5, 7));
        assert_eq!(f1.expected(1), Some(2));
        let f4 = builtin_family("4").unwrap();
        assert_eq!(f4.triplet(2).unwrap(), trip(11, 14, 51));
        assert_eq!(f4.expected(2), Some(14));
        let fib = builtin_family("fibonacci").unwrap();
        assert_eq!(fib.triplet(2).unwrap(), trip(5, 8, 13));
        assert_eq!(fib.triplet(1).unwrap(), trip(2, 3, 5));
        assert_eq!(fib.expected(2), None);
        assert!(f1.triplet(0).is_err());
        assert!(fib.triplet(100).is_err());
        assert_eq!(f1.describe(), "(2n+1,4n+1,4n+3)");
        assert_eq!(builtin_family("5").unwrap().describe(), "(2n+1,2n+2,4n^2+6n+1)");
        assert_eq!(builtin_family("consecutive").unwrap().describe(), "(n,n+1,n^2+n-1)");
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_triplets(3).unwrap(), vec![trip(3, 4, 11), trip(3, 5, 7)]);
        assert_eq!(enumerate_triplets(2).unwrap(), vec![trip(2, 3, 5)]);
        let eleven: Vec<(u64, u64)> =
            enumerate_triplets(11).unwrap().iter().map(|t| (t.q(), t.r())).collect();
        assert_eq!(
            eleven,
            vec![(12, 131), (13, 71), (14, 51), (15, 41), (16, 35), (17, 31), (19, 26), (21, 23)]
        );
        assert!(enumerate_triplets(1).is_err());
        assert!(enumerate_triplets(0).is_err());
    }

    #[test]
    fn enumeration_is_a_bijection_onto_divisor_pairs() {
        for p in 2..200u64 {
            let pairs: Vec<(u64, u64)> = enumerate_triplets(p)
                .unwrap()
                .iter()
                .map(|t| (t.q() - p, t.r() - p))
                .collect();
            let expected: Vec<(u64, u64)> =
                divisor_pairs(p * p - 1).into_iter().filter(|(s, t)| s < t).collect();
            assert_eq!(pairs, expected);
        }
    }

    #[test]
    fn verify_examples() {
        let rep = verify_family(&builtin_family("5").unwrap(), 1..=3).unwrap();
        let ds: Vec<i64> = rep.rows.iter().map(|r| r.d_computed).collect();
        assert_eq!(ds, vec![2, 6, 12]);
        assert_eq!(rep.mismatches(), 0);

        let rep = verify_family(&builtin_family("2").unwrap(), 1..=3).unwrap();
        assert_eq!(rep.rows.iter().map(|r| r.d_computed).collect::<Vec<_>>(), vec![2, 4, 6]);

        let rep = verify_family(&builtin_family("3").unwrap(), 1..=1).unwrap();
        assert_eq!(rep.rows[0].triplet, trip(3, 4, 11));
        assert_eq!(rep.rows[0].d_computed, 2);
        assert_eq!(rep.rows[0].argmax, Some(LatticePoint { a: 1, m: 1 }));

        assert!(verify_family(&builtin_family("1").unwrap(), 0..=3).is_err());
    }

    #[test]
    fn broken_config_is_a_hard_failure() {
        let spec = FamilySpec::from_json(
            r#"{"name":"bad","p":[3],"q":[5],"r":[8],"expected_d":null,"n_min":1}"#,
        )
        .unwrap();
        assert!(matches!(
            verify_family(&spec, 1..=2),
            Err(Error::InvalidTriplet { .. })
        ));
    }

    #[test]
    fn config_round_trip() {
        for spec in builtin_families() {
            if let Some(cfg) = spec.to_config() {
                let text = serde_json::to_string(&cfg).unwrap();
                assert_eq!(FamilySpec::from_json(&text).unwrap(), spec);
            }
        }
        assert!(FamilySpec::from_json(r#"{"name":"x","p":[],"q":[1],"r":[1],"expected_d":null,"n_min":1}"#).is_err());
        assert!(FamilySpec::from_json(r#"{"name":"x","p":[1,1,1,1],"q":[1],"r":[1],"expected_d":null,"n_min":1}"#).is_err());
    }

    #[test]
    fn consecutive_family_matches_closed_forms() {
        let cons = builtin_family("consecutive").unwrap();
        let five = builtin_family("5").unwrap();
        for p in 2..=60i64 {
            let t = cons.triplet(p).unwrap();
            let d = d_invariant(&t).unwrap().d;
            if p % 2 == 1 {
                let n = (p - 1) / 2;
                assert_eq!(five.triplet(n).unwrap(), t);
                assert_eq!(d, n * n + n);
            } else {
                assert_eq!(d, (p * p + 2 * p) / 4);
            }
        }
    }

    #[test]
    fn fibonacci_numbers() {
        assert_eq!(fibonacci(1), Some(1));
        assert_eq!(fibonacci(7), Some(13));
        assert_eq!(fibonacci(93), Some(12200160415121876738));
        assert_eq!(fibonacci(94), None);
    }
}
