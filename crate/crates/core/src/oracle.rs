//! Brute-force d-invariant of a negative-definite unimodular plumbing tree
//! with at most one bad vertex.
//!
//! Initial classes are the characteristic vectors inside the adjunction
//! window `e_j + 2 <= <k, v_j> <= -e_j`. A full path repeatedly adds
//! `2PD(v)` at a vertex with `<k, v> = -e_v` until either some evaluation
//! exceeds `-e_v` (bad) or no such vertex is left (good). The d-invariant is
//! `max (k^2 + |G|) / 4` over the window, which must agree with the maximum
//! over classes supporting good full paths.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::plumbing::{build_simple_linear, CharVector, PlumbingGraph};

pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 28;
pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub enumeration_budget: u64,
    pub step_budget: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }
}

/// Which vertex a full path updates when several are eligible.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum VertexOrder {
    #[default]
    LowestFirst,
    HighestFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Good,
    Bad,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathOutcome {
    pub verdict: Verdict,
    pub terminal: CharVector,
    pub steps: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub d_value: Rational,
    pub max_k_squared: BigInt,
    pub argmax: CharVector,
    pub good_max_k_squared: BigInt,
    pub good_argmax: CharVector,
    pub enumerated: u64,
    /// Every enumerated class satisfied `k^2 ≡ -|G| (mod 8)`.
    pub elkies_holds: bool,
}

/// Window `(lowest value, number of values)` at each vertex.
fn windows(g: &PlumbingGraph) -> Vec<(i64, u64)> {
    g.weights()
        .iter()
        .map(|&e| (e + 2, if e < 0 { (-e) as u64 } else { 0 }))
        .collect()
}

/// Number of initial classes, `prod(-e_j)`.
pub fn initial_count(g: &PlumbingGraph) -> BigInt {
    windows(g).iter().map(|&(_, n)| BigInt::from(n)).product()
}

fn check_budget(g: &PlumbingGraph, budget: u64) -> Result<u64> {
    let states = initial_count(g);
    match states.to_u64() {
        Some(n) if n <= budget => Ok(n),
        _ => Err(Error::BudgetExceeded { states, budget }),
    }
}

/// Lexicographic stream of the initial classes (last vertex fastest).
#[derive(Clone, Debug)]
pub struct InitialClasses {
    windows: Vec<(i64, u64)>,
    digits: Vec<u64>,
    remaining: u64,
}

impl Iterator for InitialClasses {
    type Item = CharVector;

    fn next(&mut self) -> Option<CharVector> {
        if self.remaining == 0 {
            return None;
        }
        let out = CharVector::new(
            self.windows
                .iter()
                .zip(&self.digits)
                .map(|(&(lo, _), &d)| lo + 2 * d as i64)
                .collect(),
        );
        self.remaining -= 1;
        for j in (0..self.digits.len()).rev() {
            self.digits[j] += 1;
            if self.digits[j] < self.windows[j].1 {
                break;
            }
            self.digits[j] = 0;
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (n, Some(n))
    }
}

pub fn enumerate_initial(g: &PlumbingGraph, budget: u64) -> Result<InitialClasses> {
    let remaining = check_budget(g, budget)?;
    let windows = windows(g);
    Ok(InitialClasses { digits: vec![0; windows.len()], windows, remaining })
}

fn in_window(g: &PlumbingGraph, k: &CharVector) -> bool {
    k.evals
        .iter()
        .zip(g.weights())
        .all(|(&x, &e)| e + 2 <= x && x <= -e)
}

// Runs the path in place; returns the verdict and the number of moves.
fn run_path_in_place(
    g: &PlumbingGraph,
    evals: &mut [i64],
    order: VertexOrder,
    step_budget: u64,
    mut trace: Option<&mut Vec<CharVector>>,
) -> Result<(Verdict, u64)> {
    let weights = g.weights();
    let n = evals.len();
    let mut steps = 0u64;
    loop {
        if evals.iter().zip(weights).any(|(&x, &e)| x > -e) {
            return Ok((Verdict::Bad, steps));
        }
        let eligible = |&v: &usize| evals[v] == -weights[v];
        let next = match order {
            VertexOrder::LowestFirst => (0..n).find(eligible),
            VertexOrder::HighestFirst => (0..n).rev().find(eligible),
        };
        let Some(v) = next else {
            return Ok((Verdict::Good, steps));
        };
        if steps >= step_budget {
            return Err(Error::StepBudgetExceeded(step_budget));
        }
        g.add_twice_dual(evals, v);
        steps += 1;
        if let Some(t) = trace.as_deref_mut() {
            t.push(CharVector::new(evals.to_vec()));
        }
    }
}

fn check_path_start(g: &PlumbingGraph, k: &CharVector) -> Result<()> {
    g.check_characteristic(k)?;
    if !in_window(g, k) {
        return Err(Error::invalid("initial class lies outside the adjunction window"));
    }
    Ok(())
}

pub fn run_full_path(
    g: &PlumbingGraph,
    k: &CharVector,
    order: VertexOrder,
    step_budget: u64,
) -> Result<PathOutcome> {
    check_path_start(g, k)?;
    let mut evals = k.evals.clone();
    let (verdict, steps) = run_path_in_place(g, &mut evals, order, step_budget, None)?;
    Ok(PathOutcome { verdict, terminal: CharVector::new(evals), steps })
}

/// Like [`run_full_path`], also returning every class `k_0, ..., k_n`.
pub fn run_full_path_traced(
    g: &PlumbingGraph,
    k: &CharVector,
    order: VertexOrder,
    step_budget: u64,
) -> Result<(PathOutcome, Vec<CharVector>)> {
    check_path_start(g, k)?;
    let mut evals = k.evals.clone();
    let mut trace = vec![k.clone()];
    let (verdict, steps) =
        run_path_in_place(g, &mut evals, order, step_budget, Some(&mut trace))?;
    Ok((PathOutcome { verdict, terminal: CharVector::new(evals), steps }, trace))
}

/// Outcome of every initial class of the all-`(-2)` path `A_t`.
pub fn classify_terminals(
    t: usize,
    order: VertexOrder,
) -> Result<BTreeMap<CharVector, PathOutcome>> {
    if t > 20 {
        return Err(Error::invalid(format!("A_{t} is too large to classify exhaustively")));
    }
    let g = build_simple_linear(t)?;
    enumerate_initial(&g, u64::MAX)?
        .map(|k| run_full_path(&g, &k, order, DEFAULT_STEP_BUDGET).map(|o| (k, o)))
        .collect()
}

/// On `A_t`, the good initial classes are exactly zero and the single-2
/// classes; `2` at position `s` (1-based) ends at `-2` at position
/// `t - s + 1` and zero ends at zero.
pub fn linear_lemmas_hold(t: usize) -> Result<bool> {
    let outcomes = classify_terminals(t, VertexOrder::LowestFirst)?;
    Ok(outcomes.iter().all(|(k, out)| {
        let twos: Vec<usize> = (0..t).filter(|&i| k.evals[i] == 2).collect();
        match twos.as_slice() {
            [] => out.verdict == Verdict::Good && out.terminal == *k,
            [s] => {
                let mut want = vec![0; t];
                want[t - 1 - s] = -2;
                out.verdict == Verdict::Good && out.terminal.evals == want
            }
            _ => out.verdict == Verdict::Bad,
        }
    }))
}

#[derive(Clone, Debug)]
struct Partial {
    best: i64,
    argmax: Vec<i64>,
    good_best: Option<i64>,
    good_argmax: Vec<i64>,
    count: u64,
    elkies: bool,
}

/// Integer `I^-1` plus the data needed for incremental `k^2` updates.
struct Workspace<'a> {
    graph: &'a PlumbingGraph,
    inverse: Vec<Vec<i64>>,
    windows: Vec<(i64, u64)>,
    step_budget: u64,
}

impl Workspace<'_> {
    /// Walks every class with `<k, v_0>` fixed to `first`, in reflected
    /// Gray-code order so consecutive classes differ at a single vertex.
    ///
    /// With `eager` unset, full paths are only run for classes that reach
    /// the running maximum; otherwise for every class beating the best good
    /// value so far.
    fn scan(&self, first: i64, eager: bool, good_floor: Option<i64>) -> Result<Partial> {
        let n = self.windows.len();
        let size = n as i64;
        let mut k: Vec<i64> = self.windows.iter().map(|&(lo, _)| lo).collect();
        k[0] = first;
        let mut y: Vec<i64> = (0..n)
            .map(|i| (0..n).map(|j| self.inverse[i][j] * k[j]).sum())
            .collect();
        let mut ksq: i64 = k.iter().zip(&y).map(|(a, b)| a * b).sum();

        // Only vertices 1.. with more than one admissible value move.
        let moving: Vec<usize> = (1..n).filter(|&j| self.windows[j].1 > 1).collect();
        let mut digits = vec![0u64; moving.len()];
        let mut up = vec![true; moving.len()];

        let mut out = Partial {
            best: i64::MIN,
            argmax: Vec::new(),
            good_best: good_floor,
            good_argmax: Vec::new(),
            count: 0,
            elkies: true,
        };
        let mut scratch = vec![0i64; n];
        loop {
            out.count += 1;
            if (ksq + size).rem_euclid(8) != 0 {
                out.elkies = false;
            }
            if ksq > out.best || (ksq == out.best && k < out.argmax) {
                out.best = ksq;
                out.argmax.clone_from(&k);
            }
            let beats_good = out.good_best.is_none_or(|g| ksq > g);
            if beats_good && (eager || ksq == out.best) {
                scratch.copy_from_slice(&k);
                let (verdict, _) = run_path_in_place(
                    self.graph,
                    &mut scratch,
                    VertexOrder::LowestFirst,
                    self.step_budget,
                    None,
                )?;
                if verdict == Verdict::Good {
                    out.good_best = Some(ksq);
                    out.good_argmax.clone_from(&k);
                }
            }

            // Advance the Gray code.
            let mut slot = 0;
            loop {
                if slot == moving.len() {
                    return Ok(out);
                }
                let radix = self.windows[moving[slot]].1;
                let can_move = if up[slot] { digits[slot] + 1 < radix } else { digits[slot] > 0 };
                if can_move {
                    break;
                }
                up[slot] = !up[slot];
                slot += 1;
            }
            let delta: i64 = if up[slot] { 2 } else { -2 };
            if up[slot] {
                digits[slot] += 1;
            } else {
                digits[slot] -= 1;
            }
            let i = moving[slot];
            // (k + δe_i)^T J (k + δe_i) = k^2 + 2δ(Jk)_i + δ² J_ii
            ksq += 2 * delta * y[i] + delta * delta * self.inverse[i][i];
            for (yj, row) in y.iter_mut().zip(&self.inverse) {
                *yj += delta * row[i];
            }
            k[i] += delta;
        }
    }
}

fn merge(parts: Vec<Partial>) -> Partial {
    parts
        .into_iter()
        .reduce(|mut acc, p| {
            if p.best > acc.best || (p.best == acc.best && p.argmax < acc.argmax) {
                acc.best = p.best;
                acc.argmax = p.argmax;
            }
            match (acc.good_best, p.good_best) {
                (None, Some(_)) => {
                    acc.good_best = p.good_best;
                    acc.good_argmax = p.good_argmax;
                }
                (Some(a), Some(b)) if b > a || (b == a && p.good_argmax < acc.good_argmax) => {
                    acc.good_best = p.good_best;
                    acc.good_argmax = p.good_argmax;
                }
                _ => {}
            }
            acc.count += p.count;
            acc.elkies &= p.elkies;
            acc
        })
        .expect("at least one partition")
}

/// d-invariant by exhaustive search over the adjunction window.
pub fn oracle_d(g: &PlumbingGraph, config: &OracleConfig) -> Result<OracleResult> {
    let report = g.validate();
    if !report.is_negative_definite {
        return Err(Error::NotNegativeDefinite);
    }
    if !report.is_unimodular {
        return Err(Error::NotUnimodular(report.determinant));
    }
    if report.bad_vertex_count > 1 {
        return Err(Error::TooManyBadVertices(report.bad_vertex_count));
    }
    check_budget(g, config.enumeration_budget)?;

    let windows = windows(g);
    let inverse = machine_inverse(g, &windows)?;
    let work = Workspace { graph: g, inverse, windows, step_budget: config.step_budget };

    let (lo, count) = work.windows[0];
    let firsts: Vec<i64> = (0..count).map(|i| lo + 2 * i as i64).collect();
    let lazy = merge(
        firsts
            .par_iter()
            .map(|&a| work.scan(a, false, None))
            .collect::<Result<Vec<_>>>()?,
    );
    let merged = if lazy.good_best == Some(lazy.best) {
        lazy
    } else {
        // No maximizer supports a good path: find the true good maximum.
        let mut floor = lazy.good_best;
        let mut parts = Vec::with_capacity(firsts.len());
        for &a in &firsts {
            let part = work.scan(a, true, floor)?;
            floor = part.good_best;
            parts.push(part);
        }
        let mut full = merge(parts);
        if full.good_best.is_none() {
            full.good_best = lazy.good_best;
            full.good_argmax = lazy.good_argmax;
        }
        full
    };

    let Some(good_best) = merged.good_best else {
        return Err(Error::Mismatch("no initial class supports a good full path".into()));
    };
    if good_best != merged.best {
        return Err(Error::Mismatch(format!(
            "max k^2 over the window is {} but over good paths is {good_best}",
            merged.best
        )));
    }
    let n = g.len() as i64;
    Ok(OracleResult {
        d_value: Rational::new(BigInt::from(merged.best + n), BigInt::from(4)),
        max_k_squared: BigInt::from(merged.best),
        argmax: CharVector::new(merged.argmax),
        good_max_k_squared: BigInt::from(good_best),
        good_argmax: CharVector::new(merged.good_argmax),
        enumerated: merged.count,
        elkies_holds: merged.elkies,
    })
}

// `I^-1` in machine integers, refusing graphs whose k^2 values could
// overflow the incremental updates.
fn machine_inverse(g: &PlumbingGraph, windows: &[(i64, u64)]) -> Result<Vec<Vec<i64>>> {
    let big = g.unimodular_inverse()?;
    let max_entry = big.iter().flatten().map(|x| x.magnitude().clone()).max();
    let max_eval = windows
        .iter()
        .map(|&(lo, count)| lo.abs().max((lo + 2 * count as i64 - 2).abs()))
        .max()
        .unwrap_or(0);
    let bound = BigInt::from(g.len() as i64 * max_eval).pow(2)
        * BigInt::from(max_entry.unwrap_or_default());
    if bound >= BigInt::one() << 62 {
        return Err(Error::Overflow(format!("k^2 bound {bound} exceeds 2^62")));
    }
    Ok(big
        .iter()
        .map(|row| row.iter().map(|x| x.to_i64().expect("bounded above")).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plumbing::AslGraph;
    use crate::triplet::Triplet;

    fn cv(x: &[i64]) -> CharVector {
        CharVector::new(x.to_vec())
    }

    fn asl(p: u64, q: u64, r: u64) -> PlumbingGraph {
        AslGraph::new(Triplet::new(p, q, r).unwrap()).unwrap().into_graph()
    }

    #[test]
    fn enumerates_a2() {
        let g = build_simple_linear(2).unwrap();
        let all: Vec<_> = enumerate_initial(&g, 1 << 28).unwrap().collect();
        assert_eq!(all, vec![cv(&[0, 0]), cv(&[0, 2]), cv(&[2, 0]), cv(&[2, 2])]);
    }

    #[test]
    fn counts_and_budget() {
        assert_eq!(enumerate_initial(&asl(2, 3, 5), 1 << 28).unwrap().count(), 256);
        let err = enumerate_initial(&asl(5, 6, 29), 1 << 28).unwrap_err();
        match err {
            Error::BudgetExceeded { states, .. } => {
                assert_eq!(states, BigInt::from(5u64 << 34))
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn path_examples() {
        let a2 = build_simple_linear(2).unwrap();
        let out = run_full_path(&a2, &cv(&[2, 2]), VertexOrder::LowestFirst, 100).unwrap();
        assert_eq!(out.verdict, Verdict::Bad);

        let a3 = build_simple_linear(3).unwrap();
        let out = run_full_path(&a3, &cv(&[0, 2, 0]), VertexOrder::LowestFirst, 100).unwrap();
        assert_eq!(out.verdict, Verdict::Good);
        assert_eq!(out.terminal, cv(&[0, -2, 0]));

        let g = asl(3, 5, 7);
        let k = CharVector::new({
            let mut v = vec![0; 12];
            v[0] = 1;
            v
        });
        let out = run_full_path(&g, &k, VertexOrder::LowestFirst, 100).unwrap();
        assert_eq!((out.verdict, out.steps), (Verdict::Good, 0));
        assert_eq!(out.terminal, k);
    }

    #[test]
    fn path_preconditions() {
        let a2 = build_simple_linear(2).unwrap();
        assert!(run_full_path(&a2, &cv(&[-2, 0]), VertexOrder::LowestFirst, 100).is_err());
        assert!(run_full_path(&a2, &cv(&[1, 0]), VertexOrder::LowestFirst, 100).is_err());
        assert!(matches!(
            run_full_path(&a2, &cv(&[2, 0]), VertexOrder::LowestFirst, 1),
            Err(Error::StepBudgetExceeded(1))
        ));
    }

    #[test]
    fn classify_small_linear() {
        let table = classify_terminals(2, VertexOrder::LowestFirst).unwrap();
        let good: Vec<_> = table
            .iter()
            .filter(|(_, o)| o.verdict == Verdict::Good)
            .map(|(k, _)| k.clone())
            .collect();
        assert_eq!(good, vec![cv(&[0, 0]), cv(&[0, 2]), cv(&[2, 0])]);

        let table = classify_terminals(5, VertexOrder::LowestFirst).unwrap();
        let out = &table[&cv(&[0, 0, 2, 0, 0])];
        assert_eq!(out.verdict, Verdict::Good);
        assert_eq!(out.terminal, cv(&[0, 0, -2, 0, 0]));

        let table = classify_terminals(4, VertexOrder::LowestFirst).unwrap();
        assert_eq!(table[&cv(&[0, 0, 0, 0])].terminal, cv(&[0, 0, 0, 0]));
    }

    #[test]
    fn gray_scan_visits_every_class() {
        let g = asl(3, 4, 11);
        let windows = windows(&g);
        let work = Workspace {
            graph: &g,
            inverse: machine_inverse(&g, &windows).unwrap(),
            windows,
            step_budget: DEFAULT_STEP_BUDGET,
        };
        let total: u64 = [-1, 1, 3]
            .iter()
            .map(|&a| work.scan(a, false, None).unwrap().count)
            .sum();
        assert_eq!(total, 3 << 14);
    }

    #[test]
    fn oracle_small_instances() {
        let res = oracle_d(&asl(2, 3, 5), &OracleConfig::default()).unwrap();
        assert_eq!(res.max_k_squared, BigInt::from(0));
        assert_eq!(res.d_value, Rational::from_integer(BigInt::from(2)));
        assert_eq!(res.argmax, CharVector::zeros(8));
        assert_eq!(res.enumerated, 256);
        assert!(res.elkies_holds);

        let res = oracle_d(&asl(3, 5, 7), &OracleConfig::default()).unwrap();
        assert_eq!(res.max_k_squared, BigInt::from(-4));
        assert_eq!(res.d_value, Rational::from_integer(BigInt::from(2)));

        let res = oracle_d(&asl(3, 4, 11), &OracleConfig::default()).unwrap();
        assert_eq!(res.max_k_squared, BigInt::from(-7));
        assert_eq!(res.d_value, Rational::from_integer(BigInt::from(2)));
        assert_eq!(res.good_max_k_squared, res.max_k_squared);
    }

    #[test]
    fn oracle_rejections() {
        let cfg = OracleConfig::default();
        assert!(matches!(
            oracle_d(&build_simple_linear(3).unwrap(), &cfg),
            Err(Error::NotUnimodular(_))
        ));
        assert!(matches!(
            oracle_d(&asl(5, 6, 29), &cfg),
            Err(Error::BudgetExceeded { .. })
        ));
        let tiny = OracleConfig { enumeration_budget: 10, ..cfg };
        assert!(matches!(oracle_d(&asl(2, 3, 5), &tiny), Err(Error::BudgetExceeded { .. })));
        let positive = PlumbingGraph::new(vec![1], vec![]).unwrap();
        assert!(matches!(oracle_d(&positive, &cfg), Err(Error::NotNegativeDefinite)));
        // bad vertices 1 (valency 4, weight -3) and 4 (valency 2, weight -1)
        let two_bad = PlumbingGraph::new(
            vec![-4, -3, -3, -1, -1, -2, -4, -3],
            vec![(0, 1), (1, 2), (1, 3), (1, 4), (0, 5), (4, 6), (2, 7)],
        )
        .unwrap();
        let report = two_bad.validate();
        assert!(report.is_negative_definite && report.is_unimodular);
        assert_eq!(report.bad_vertex_count, 2);
        assert!(matches!(oracle_d(&two_bad, &cfg), Err(Error::TooManyBadVertices(2))));
    }
}
