use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{solve_seifert_diophantine, SeifertData};
use crate::error::{Error, Result};

/// Ordered, pairwise coprime `p < q < r` with `pq + pr - qr = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawTriplet", into = "RawTriplet")]
pub struct Triplet {
    p: u64,
    q: u64,
    r: u64,
}

#[derive(Serialize, Deserialize)]
struct RawTriplet {
    p: u64,
    q: u64,
    r: u64,
}

impl TryFrom<RawTriplet> for Triplet {
    type Error = Error;
    fn try_from(raw: RawTriplet) -> Result<Self> {
        Triplet::new(raw.p, raw.q, raw.r)
    }
}

impl From<Triplet> for RawTriplet {
    fn from(t: Triplet) -> Self {
        RawTriplet { p: t.p, q: t.q, r: t.r }
    }
}

impl Triplet {
    pub fn new(p: u64, q: u64, r: u64) -> Result<Self> {
        let fail = |reason: &str| Error::InvalidTriplet { p, q, r, reason: reason.into() };
        if p == 0 || !(p < q && q < r) {
            return Err(fail("need 0 < p < q < r"));
        }
        if p.gcd(&q) != 1 || p.gcd(&r) != 1 || q.gcd(&r) != 1 {
            return Err(fail("entries are not pairwise coprime"));
        }
        let (pi, qi, ri) = (i128::from(p), i128::from(q), i128::from(r));
        let lhs = pi
            .checked_mul(qi)
            .zip(pi.checked_mul(ri))
            .zip(qi.checked_mul(ri))
            .map(|((a, b), c)| a + b - c);
        if lhs != Some(1) {
            return Err(fail("pq + pr - qr != 1"));
        }
        Ok(Triplet { p, q, r })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    /// `q + r`, the number of vertices of the plumbing graph.
    pub fn q_plus_r(&self) -> u64 {
        self.q + self.r
    }

    pub fn is_p_even(&self) -> bool {
        self.p % 2 == 0
    }

    /// Largest `m` of a lattice point, `(p - 1) / 2`.
    pub fn m_max(&self) -> u64 {
        (self.p - 1) / 2
    }

    pub fn seifert(&self) -> Result<SeifertData> {
        solve_seifert_diophantine(self.p, self.q, self.r)
    }
}

impl fmt::Display for Triplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.p, self.q, self.r)
    }
}
