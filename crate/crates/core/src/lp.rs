//! A small dense primal simplex for `max cᵀx` subject to `Ax ≤ b`, `x ≥ 0`
//! with `b ≥ 0`, so the slack basis is feasible and no phase one is needed.
//! Every program in this crate has that shape: the zero kernel or the
//! zero test function is always feasible.

use alloc::vec::Vec;

use thiserror::Error;

/// Feasibility and optimality tolerance.
pub const LP_TOL: f64 = 1e-8;
const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("row {0} has a negative right-hand side")]
    NegativeRhs(usize),
    #[error("objective is unbounded")]
    Unbounded,
    #[error("iteration limit reached after {0} pivots")]
    IterationLimit(usize),
}

/// `Σ coeffs · x ≤ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRow {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl SparseRow {
    pub fn new(coeffs: Vec<(usize, f64)>, rhs: f64) -> Self {
        Self { coeffs, rhs }
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        self.evaluate(x) - self.rhs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub n: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<SparseRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        Self { n: objective.len(), objective, rows: Vec::new() }
    }

    pub fn push(&mut self, row: SparseRow) {
        self.rows.push(row);
    }

    pub fn maximize(&self) -> Result<LpSolution, LpError> {
        Dictionary::new(self)?.solve()
    }

    /// Constraint generation: solves with the current rows, appends every
    /// row of `lazy` violated by more than `tol`, and repeats.
    pub fn maximize_with_lazy_rows(&mut self, lazy: &[SparseRow], tol: f64) -> Result<LpSolution, LpError> {
        if let Some(i) = lazy.iter().position(|r| r.rhs < 0.0) {
            return Err(LpError::NegativeRhs(self.rows.len() + i));
        }
        let mut added = alloc::vec![false; lazy.len()];
        let mut pivots = 0;
        loop {
            let mut sol = self.maximize()?;
            pivots += sol.pivots;
            let mut any = false;
            for (i, row) in lazy.iter().enumerate() {
                if !added[i] && row.violation(&sol.x) > tol {
                    added[i] = true;
                    self.rows.push(row.clone());
                    any = true;
                }
            }
            if !any {
                sol.pivots = pivots;
                return Ok(sol);
            }
        }
    }
}

/// `x_B(i) = b_i − Σ_k t[i][k] x_N(k)`, `z = z0 + Σ_k c_k x_N(k)`.
struct Dictionary {
    m: usize,
    n: usize,
    t: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    z0: f64,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    original: usize,
}

impl Dictionary {
    fn new(lp: &LinearProgram) -> Result<Self, LpError> {
        let m = lp.rows.len();
        let n = lp.n;
        let mut t = alloc::vec![0.0; m * n];
        let mut b = Vec::with_capacity(m);
        for (i, row) in lp.rows.iter().enumerate() {
            if row.rhs < 0.0 {
                return Err(LpError::NegativeRhs(i));
            }
            for &(j, a) in &row.coeffs {
                t[i * n + j] += a;
            }
            b.push(row.rhs);
        }
        Ok(Self {
            m,
            n,
            t,
            b,
            c: lp.objective.clone(),
            z0: 0.0,
            basic: (n..n + m).collect(),
            nonbasic: (0..n).collect(),
            original: n,
        })
    }

    fn solve(mut self) -> Result<LpSolution, LpError> {
        let limit = 50_000 + 20 * (self.m + self.n);
        let mut pivots = 0;
        let mut degenerate = 0;
        loop {
            let bland = degenerate >= DEGENERATE_RUN;
            let Some(e) = self.entering(bland) else {
                return Ok(self.solution(pivots));
            };
            let Some(r) = self.leaving(e, bland) else {
                return Err(LpError::Unbounded);
            };
            if self.b[r] <= PIVOT_TOL {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, e);
            pivots += 1;
            if pivots > limit {
                return Err(LpError::IterationLimit(pivots));
            }
        }
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        let mut best: Option<usize> = None;
        for k in 0..self.n {
            if self.c[k] <= PIVOT_TOL {
                continue;
            }
            best = match best {
                None => Some(k),
                Some(o) if bland && self.nonbasic[k] < self.nonbasic[o] => Some(k),
                Some(o) if !bland && self.c[k] > self.c[o] => Some(k),
                keep => keep,
            };
        }
        best
    }

    fn leaving(&self, e: usize, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let a = self.t[i * self.n + e];
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = self.b[i] / a;
            best = match best {
                None => Some((i, ratio)),
                Some((o, q)) => {
                    let tie = ratio <= q + 1e-12 && ratio >= q - 1e-12;
                    let better = if tie {
                        if bland {
                            self.basic[i] < self.basic[o]
                        } else {
                            a > self.t[o * self.n + e]
                        }
                    } else {
                        ratio < q
                    };
                    if better {
                        Some((i, ratio))
                    } else {
                        Some((o, q))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let n = self.n;
        let p = self.t[r * n + e];
        let inv = 1.0 / p;
        {
            let row = &mut self.t[r * n..(r + 1) * n];
            for v in row.iter_mut() {
                *v *= inv;
            }
            row[e] = inv;
        }
        self.b[r] *= inv;
        let pivot_row: Vec<f64> = self.t[r * n..(r + 1) * n].to_vec();
        let br = self.b[r];
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * n + e];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * n..(i + 1) * n];
            for (k, v) in row.iter_mut().enumerate() {
                if pivot_row[k] != 0.0 {
                    *v -= f * pivot_row[k];
                }
            }
            row[e] = -f * inv;
            let nb = self.b[i] - f * br;
            self.b[i] = if nb < 0.0 && nb > -PIVOT_TOL { 0.0 } else { nb };
        }
        let ce = self.c[e];
        for (c, &p) in self.c.iter_mut().zip(&pivot_row) {
            if p != 0.0 {
                *c -= ce * p;
            }
        }
        self.c[e] = -ce * inv;
        self.z0 += ce * br;
        core::mem::swap(&mut self.basic[r], &mut self.nonbasic[e]);
    }

    fn solution(&self, pivots: usize) -> LpSolution {
        let mut x = alloc::vec![0.0; self.original];
        for (i, &v) in self.basic.iter().enumerate() {
            if v < self.original {
                x[v] = self.b[i].max(0.0);
            }
        }
        LpSolution { value: self.z0, x, pivots }
    }
}
