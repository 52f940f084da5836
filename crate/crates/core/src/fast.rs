//! Closed-form d-invariant of `Σ(p,q,r)` with `pq + pr - qr = 1`.
//!
//! For even `p` the intersection form is even, `k = 0` is characteristic and
//! `d = (q+r)/4`. For odd `p` the maximal degree is attained by the classes
//! `k_{a,m}` whose squares are
//!
//! ```text
//! f(a, m) = -(q+r)a² + 4qam - 4(q-p)m² - 4m
//! ```
//!
//! over the lattice points `a ∈ {-p, -p+2, ..., p}`, `m ∈ {0, ..., (p-1)/2}`,
//! and `d = (max f + q + r) / 4`. `f(·, m)` is a concave parabola with vertex
//! at `c(m) = 2qm/(q+r)`, so each slice is maximized at the odd integer(s)
//! nearest `c(m)` and the scan costs `O(p)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{floor, Rational};
use crate::error::{Error, Result};
use crate::triplet::Triplet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LatticePoint {
    pub a: i64,
    pub m: i64,
}

impl LatticePoint {
    pub fn new(t: &Triplet, a: i64, m: i64) -> Result<Self> {
        let p = t.p() as i64;
        if a.rem_euclid(2) != 1 || a.abs() > p || m < 0 || m > t.m_max() as i64 {
            return Err(Error::invalid(format!(
                "({a},{m}) is not a lattice point for p = {p}"
            )));
        }
        Ok(LatticePoint { a, m })
    }
}

/// All lattice points of an odd-`p` triplet, `m` outer and `a` ascending.
pub fn lattice_points(t: &Triplet) -> impl Iterator<Item = LatticePoint> {
    let p = t.p() as i64;
    let m_max = t.m_max() as i64;
    (0..=m_max).flat_map(move |m| (-p..=p).step_by(2).map(move |a| LatticePoint { a, m }))
}

fn big(x: u64) -> BigInt {
    BigInt::from(x)
}

/// `f(x, y) = -(q+r)x² + 4qxy - 4(q-p)y² - 4y`.
pub fn f_eval(t: &Triplet, x: i64, y: i64) -> BigInt {
    let (x, y) = (BigInt::from(x), BigInt::from(y));
    let (p, q, qr) = (big(t.p()), big(t.q()), big(t.q_plus_r()));
    -(qr * &x * &x) + 4 * q.clone() * &x * &y - 4 * (q - p) * &y * &y - 4 * y
}

/// `Δ(y) = 4[2y - (q+r)]² - 16(q+r)(p-1)`, the discriminant of
/// `f(·, y) = f(1,1)` scaled so that slice `y` of the region is the interval
/// with center `c(y)` and radius `sqrt(Δ(y)) / (2(q+r))`.
pub fn delta(t: &Triplet, m: i64) -> BigInt {
    let qr = big(t.q_plus_r());
    let bracket = 2 * BigInt::from(m) - &qr;
    4 * &bracket * &bracket - 16 * qr * big(t.p() - 1)
}

/// `c(m) = 2qm / (q+r)`.
pub fn center(t: &Triplet, m: i64) -> Rational {
    Rational::new(2 * big(t.q()) * m, big(t.q_plus_r()))
}

/// Closest odd integer to `c`. An even integer `c` is equidistant from
/// `c - 1` and `c + 1`; the larger is returned with the tie flag set.
pub fn nearest_odd(c: &Rational) -> (BigInt, bool) {
    let fl = floor(c);
    if fl.is_odd() {
        (fl, false)
    } else {
        (&fl + 1, c.is_integer())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionSlice {
    pub m: i64,
    pub delta: BigInt,
    pub center: Rational,
    /// `r(m)² = Δ(m) / (4(q+r)²)`; negative when the slice misses the region.
    pub radius_sq: Rational,
    pub nearest_odd: i64,
    pub tie: bool,
    /// `(a* - c(m))²`.
    pub dist_to_odd_sq: Rational,
    pub f_at_best: BigInt,
    pub in_region: bool,
}

impl RegionSlice {
    /// `|a - c(m)| <= r(m)` without square roots:
    /// `Δ(m) >= 0` and `(2(q+r)a - 4qm)² <= Δ(m)`.
    pub fn within_radius(&self, t: &Triplet, a: i64) -> bool {
        let lhs = 2 * big(t.q_plus_r()) * a - 4 * big(t.q()) * self.m;
        !self.delta.is_negative() && &lhs * &lhs <= self.delta
    }
}

pub fn region_slice(t: &Triplet, m: i64) -> Result<RegionSlice> {
    if m < 0 || m > t.m_max() as i64 {
        return Err(Error::invalid(format!("slice m = {m} outside 0..={}", t.m_max())));
    }
    let p = t.p() as i64;
    let c = center(t, m);
    let (a, tie) = nearest_odd(&c);
    let a = a.to_i64().expect("c(m) < p").clamp(-p, p);
    let delta = delta(t, m);
    let qr = big(t.q_plus_r());
    let radius_sq = Rational::new(delta.clone(), 4 * &qr * &qr);
    let off = Rational::from_integer(BigInt::from(a)) - &c;
    let f_at_best = f_eval(t, a, m);
    let in_region = f_at_best >= f_eval(t, 1, 1);
    Ok(RegionSlice {
        m,
        delta,
        center: c,
        radius_sq,
        nearest_odd: a,
        tie,
        dist_to_odd_sq: &off * &off,
        f_at_best,
        in_region,
    })
}

/// One slice per `m = 0..=(p-1)/2`; odd `p` only.
pub fn region_dump(t: &Triplet) -> Result<Vec<RegionSlice>> {
    if t.is_p_even() {
        return Err(Error::invalid("the region is defined for odd p only"));
    }
    (0..=t.m_max() as i64).map(|m| region_slice(t, m)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    EvenP,
    LatticeScan,
    Oracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::EvenP => "EvenP",
            Method::LatticeScan => "LatticeScan",
            Method::Oracle => "Oracle",
        }
    }
}

pub const PRETZEL_NOTE: &str = "K(-p,q,r) not rationally slice";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DInvariantResult {
    pub triplet: Triplet,
    pub d: i64,
    /// Maximal degree found; `None` for the even-`p` rule.
    pub max_f: Option<BigInt>,
    pub argmax: Option<LatticePoint>,
    pub method: Method,
    pub qhb_obstructed: bool,
    pub pretzel_note: Option<&'static str>,
}

impl DInvariantResult {
    pub(crate) fn from_max(
        triplet: Triplet,
        max_f: BigInt,
        argmax: Option<LatticePoint>,
        method: Method,
    ) -> Result<Self> {
        let total = &max_f + big(triplet.q_plus_r());
        let (d, rem) = total.div_rem(&BigInt::from(4));
        if !rem.is_zero() {
            return Err(Error::Mismatch(format!(
                "{triplet}: max degree {max_f} + q + r is not divisible by 4"
            )));
        }
        let d = d.to_i64().ok_or_else(|| Error::Overflow(format!("d = {d}")))?;
        Ok(Self::finish(triplet, d, Some(max_f), argmax, method))
    }

    fn finish(
        triplet: Triplet,
        d: i64,
        max_f: Option<BigInt>,
        argmax: Option<LatticePoint>,
        method: Method,
    ) -> Self {
        let qhb_obstructed = d != 0;
        DInvariantResult {
            triplet,
            d,
            max_f,
            argmax,
            method,
            qhb_obstructed,
            pretzel_note: qhb_obstructed.then_some(PRETZEL_NOTE),
        }
    }
}

/// Per-slice maximum of `f(·, m)`: the nearest odd integer, and on a tie
/// also its lower neighbor (reported only if strictly better, which a tie
/// never is).
fn slice_best(t: &Triplet, m: i64) -> (BigInt, LatticePoint) {
    let p = t.p() as i64;
    let c = center(t, m);
    let (a, tie) = nearest_odd(&c);
    let a = a.to_i64().expect("c(m) < p").clamp(-p, p);
    let mut best = (f_eval(t, a, m), LatticePoint { a, m });
    if tie && a - 2 >= -p {
        let other = f_eval(t, a - 2, m);
        if other > best.0 {
            best = (other, LatticePoint { a: a - 2, m });
        }
    }
    best
}

pub fn d_invariant(t: &Triplet) -> Result<DInvariantResult> {
    if t.is_p_even() {
        let qr = t.q_plus_r();
        if qr % 4 != 0 {
            return Err(Error::Mismatch(format!("{t}: q + r = {qr} is not divisible by 4")));
        }
        return Ok(DInvariantResult::finish(*t, (qr / 4) as i64, None, None, Method::EvenP));
    }
    let (max_f, argmax) = (0..=t.m_max() as i64)
        .map(|m| slice_best(t, m))
        .reduce(|best, cand| if cand.0 > best.0 { cand } else { best })
        .expect("m = 0 is always a slice");
    DInvariantResult::from_max(*t, max_f, Some(argmax), Method::LatticeScan)
}

/// Maximum of `f` over every lattice point, first maximizer in
/// [`lattice_points`] order. `O(p²)`; used to cross-check the scan.
pub fn lattice_max_exhaustive(t: &Triplet) -> (BigInt, LatticePoint) {
    lattice_points(t)
        .map(|pt| (f_eval(t, pt.a, pt.m), pt))
        .reduce(|best, cand| if cand.0 > best.0 { cand } else { best })
        .expect("non-empty lattice")
}

/// `f(1,1) = 4p - 4 - (q+r)`, the degree of `k_{1,1}`.
pub fn f_one_one(t: &Triplet) -> BigInt {
    f_eval(t, 1, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational;

    fn t(p: u64, q: u64, r: u64) -> Triplet {
        Triplet::new(p, q, r).unwrap()
    }

    #[test]
    fn f_examples() {
        assert_eq!(f_eval(&t(3, 5, 7), 0, 0), BigInt::zero());
        assert_eq!(f_eval(&t(3, 5, 7), 1, 1), BigInt::from(-4));
        assert_eq!(f_eval(&t(7, 9, 31), 1, 2), BigInt::from(-8));
        assert_eq!(f_one_one(&t(7, 9, 31)), BigInt::from(-16));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(&t(3, 5, 7), 0), BigInt::from(192));
        assert_eq!(delta(&t(3, 5, 7), 2), BigInt::from(-128));
        // the bracket vanishes at m = (q+r)/2
        assert_eq!(delta(&t(3, 5, 7), 6), BigInt::from(-16 * 12 * 2));
    }

    #[test]
    fn nearest_odd_examples() {
        assert_eq!(nearest_odd(&rational(36, 40)), (BigInt::from(1), false));
        assert_eq!(nearest_odd(&rational(0, 1)), (BigInt::from(1), true));
        assert_eq!(nearest_odd(&rational(7, 3)), (BigInt::from(3), false));
        assert_eq!(nearest_odd(&rational(-7, 3)), (BigInt::from(-3), false));
        assert_eq!(nearest_odd(&rational(4, 1)), (BigInt::from(5), true));
        assert_eq!(nearest_odd(&rational(3, 1)), (BigInt::from(3), false));
    }

    #[test]
    fn slices_of_3_5_7() {
        let tt = t(3, 5, 7);
        let s1 = region_slice(&tt, 1).unwrap();
        assert_eq!((s1.nearest_odd, s1.in_region), (1, true));
        assert_eq!(s1.f_at_best, BigInt::from(-4));
        let s0 = region_slice(&tt, 0).unwrap();
        assert!(!s0.in_region && s0.tie);
        assert_eq!(s0.f_at_best, BigInt::from(-12));
        assert!(s0.radius_sq < rational(1, 1));
        assert!(region_slice(&tt, 2).is_err());
    }

    #[test]
    fn slice_of_7_9_31() {
        let s = region_slice(&t(7, 9, 31), 2).unwrap();
        assert_eq!(s.nearest_odd, 1);
        assert!(s.in_region);
        assert_eq!(s.f_at_best, BigInt::from(-8));
        assert_eq!(s.center, rational(9, 10));
        assert_eq!(s.dist_to_odd_sq, rational(1, 100));
    }

    #[test]
    fn d_examples() {
        let res = d_invariant(&t(3, 5, 7)).unwrap();
        assert_eq!((res.d, res.argmax), (2, Some(LatticePoint { a: 1, m: 1 })));
        assert_eq!(res.method, Method::LatticeScan);
        let res = d_invariant(&t(7, 9, 31)).unwrap();
        assert_eq!((res.d, res.argmax), (8, Some(LatticePoint { a: 1, m: 2 })));
        let res = d_invariant(&t(4, 5, 19)).unwrap();
        assert_eq!((res.d, res.method, res.argmax), (6, Method::EvenP, None));
        let res = d_invariant(&t(11, 12, 131)).unwrap();
        assert_eq!((res.d, res.argmax), (30, Some(LatticePoint { a: 1, m: 5 })));
        assert!(res.qhb_obstructed);
        assert_eq!(res.pretzel_note, Some(PRETZEL_NOTE));
    }

    #[test]
    fn region_dumps() {
        assert_eq!(region_dump(&t(11, 12, 131)).unwrap().len(), 6);
        let flags: Vec<bool> =
            region_dump(&t(3, 5, 7)).unwrap().iter().map(|s| s.in_region).collect();
        assert_eq!(flags, vec![false, true]);
        let dump = region_dump(&t(3, 4, 11)).unwrap();
        assert_eq!(dump.len(), 2);
        assert_eq!(dump.iter().map(|s| s.in_region).collect::<Vec<_>>(), vec![false, true]);
        assert_eq!(dump[1].f_at_best, BigInt::from(-7));
        assert!(region_dump(&t(4, 5, 19)).is_err());
    }

    #[test]
    fn lattice_point_validation() {
        let tt = t(7, 9, 31);
        assert!(LatticePoint::new(&tt, 1, 2).is_ok());
        assert!(LatticePoint::new(&tt, 2, 2).is_err());
        assert!(LatticePoint::new(&tt, 9, 2).is_err());
        assert!(LatticePoint::new(&tt, 1, 4).is_err());
        assert_eq!(lattice_points(&tt).count(), 8 * 4);
    }

    #[test]
    fn radius_surrogate_matches_rational_comparison() {
        for tt in [t(7, 9, 31), t(11, 12, 131), t(11, 21, 23), t(9, 10, 89)] {
            for s in region_dump(&tt).unwrap() {
                for a in (-(tt.p() as i64)..=tt.p() as i64).step_by(2) {
                    let off = Rational::from_integer(BigInt::from(a)) - &s.center;
                    let rational_test =
                        !s.radius_sq.is_negative() && &off * &off <= s.radius_sq;
                    assert_eq!(s.within_radius(&tt, a), rational_test);
                    // inside the interval <=> f(a,m) >= f(1,1)
                    assert_eq!(rational_test, f_eval(&tt, a, s.m) >= f_one_one(&tt));
                }
            }
        }
    }
}
