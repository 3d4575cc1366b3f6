use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Matrix;
use crate::rng;

/// Largest side the exact routine enumerates.
pub const CUT_EXACT_CAP: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutNormResult {
    pub value: f64,
    pub arg_a: Vec<usize>,
    pub arg_b: Vec<usize>,
    pub exact: bool,
}

/// Columns with positive (or negative) sums, and the absolute total.
fn best_columns(sums: &[f64]) -> (f64, bool) {
    let (mut pos, mut neg) = (0.0, 0.0);
    for &s in sums {
        if s > 0.0 {
            pos += s;
        } else {
            neg -= s;
        }
    }
    if pos >= neg {
        (pos, true)
    } else {
        (neg, false)
    }
}

fn select(sums: &[f64], positive: bool) -> Vec<usize> {
    (0..sums.len()).filter(|&j| if positive { sums[j] > 0.0 } else { sums[j] < 0.0 }).collect()
}

/// `max_{A,B} |Σ_{A×B} D|` by enumerating row subsets in Gray-code order and
/// choosing the best columns for each.
pub fn cut_norm_exact(d: &Matrix) -> Result<CutNormResult> {
    if d.rows.min(d.cols) > CUT_EXACT_CAP {
        return Err(Error::Refused(format!(
            "{}x{} matrix exceeds the exact cut-norm cap {CUT_EXACT_CAP}; use the heuristic",
            d.rows, d.cols
        )));
    }
    if d.rows > d.cols {
        let r = cut_norm_exact(&d.transpose())?;
        return Ok(CutNormResult { arg_a: r.arg_b, arg_b: r.arg_a, ..r });
    }
    let (rows, cols) = (d.rows, d.cols);
    let mut sums = vec![0.0f64; cols];
    let mut member = 0u32;
    let (mut best, mut best_mask, mut best_pos) = (0.0f64, 0u32, true);
    for step in 1u64..(1u64 << rows) {
        let i = step.trailing_zeros() as usize;
        member ^= 1 << i;
        let row = d.row(i);
        if member >> i & 1 == 1 {
            for (s, &x) in sums.iter_mut().zip(row) {
                *s += x;
            }
        } else {
            for (s, &x) in sums.iter_mut().zip(row) {
                *s -= x;
            }
        }
        let (v, pos) = best_columns(&sums);
        if v > best + 1e-12 {
            best = v;
            best_mask = member;
            best_pos = pos;
        }
    }
    let arg_a: Vec<usize> = (0..rows).filter(|&i| best_mask >> i & 1 == 1).collect();
    let mut colsum = vec![0.0; cols];
    for &i in &arg_a {
        for (s, &x) in colsum.iter_mut().zip(d.row(i)) {
            *s += x;
        }
    }
    let arg_b = if best > 0.0 { select(&colsum, best_pos) } else { Vec::new() };
    let value = d.block_sum(&arg_a, &arg_b).abs();
    Ok(CutNormResult { value, arg_a: if arg_b.is_empty() { Vec::new() } else { arg_a }, arg_b, exact: true })
}

/// Alternating maximization from a spectral start and random starts. The
/// value is the recomputed sum of the returned witness, hence a lower bound.
pub fn cut_norm_heuristic(d: &Matrix, seed: u64) -> CutNormResult {
    cut_norm_heuristic_with(d, seed, 16)
}

pub fn cut_norm_heuristic_with(d: &Matrix, seed: u64, restarts: usize) -> CutNormResult {
    let (rows, cols) = (d.rows, d.cols);
    let mut best = CutNormResult { value: 0.0, arg_a: Vec::new(), arg_b: Vec::new(), exact: false };
    if rows == 0 || cols == 0 {
        return best;
    }
    let mut r = rng::stream(seed, &[rng::label("cut-heuristic")]);
    let mut starts: Vec<Vec<f64>> = Vec::new();
    // Top right singular vector by power iteration on DᵀD.
    let mut v: Vec<f64> = (0..cols).map(|_| r.gen_range(-1.0..1.0)).collect();
    for _ in 0..60 {
        let u: Vec<f64> = (0..rows).map(|i| d.row(i).iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
        let mut w = vec![0.0; cols];
        for (i, &ui) in u.iter().enumerate() {
            for (wj, &x) in w.iter_mut().zip(d.row(i)) {
                *wj += ui * x;
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        v = w.into_iter().map(|x| x / norm).collect();
    }
    starts.push(v.clone());
    starts.push(v.iter().map(|x| -x).collect());
    for _ in 0..restarts {
        starts.push((0..cols).map(|_| if r.gen_bool(0.5) { 1.0 } else { -1.0 }).collect());
    }
    for start in starts {
        for sign in [1.0, -1.0] {
            // Initial column set: where the start vector is positive.
            let mut b: Vec<bool> = start.iter().map(|&x| x > 0.0).collect();
            let mut a: Vec<bool> = vec![false; rows];
            for _ in 0..100 {
                let na: Vec<bool> = (0..rows)
                    .map(|i| sign * (0..cols).filter(|&j| b[j]).map(|j| d.get(i, j)).sum::<f64>() > 0.0)
                    .collect();
                let nb: Vec<bool> = (0..cols)
                    .map(|j| sign * (0..rows).filter(|&i| na[i]).map(|i| d.get(i, j)).sum::<f64>() > 0.0)
                    .collect();
                let stable = na == a && nb == b;
                a = na;
                b = nb;
                if stable {
                    break;
                }
            }
            let arg_a: Vec<usize> = (0..rows).filter(|&i| a[i]).collect();
            let arg_b: Vec<usize> = (0..cols).filter(|&j| b[j]).collect();
            let value = d.block_sum(&arg_a, &arg_b).abs();
            if value > best.value + 1e-12 {
                best = CutNormResult { value, arg_a, arg_b, exact: false };
            }
        }
    }
    best
}
