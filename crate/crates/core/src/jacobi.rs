//! The Jacobi method for `Ax = b` as a farm problem.
//!
//! With `c_ij = -a_ij / a_ii` (`c_ii = 0`) and `d_i = b_i / a_ii` the iteration
//! is `x(k+1) = C x(k) + d`, starting from `x(0) = d`, and stops once
//! `‖x(k+1) - x(k)‖² < ε`. Note that ε bounds the *squared* Euclidean norm.
//!
//! Two formulations are provided:
//!
//! * [`JacobiProblem`]: the map-list is the column indices; each column `c_j`
//!   is scaled by `x_j` and the scaled columns are summed by vector addition.
//! * [`JacobiMapProblem`]: the map-list is the row indices; each element yields
//!   one coordinate of `x(k+1)`, and the fold only collects the coordinates.
//!
//! Indices are 0-based throughout; error messages report 1-based rows.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codec::{CodecError, WireCodec};
use crate::config::JobId;
use crate::context::{ExecutionContext, IterationInfo};
use crate::problem::{Job, Next, NoJob, Problem};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JacobiError {
    /// `a_ii = 0`; `row` is 1-based.
    #[error("ZeroDiagonal({row}): a_{row}{row} is zero, the Jacobi method does not apply")]
    ZeroDiagonal { row: usize },
    #[error("DimensionMismatch: expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("InvalidEpsilon: epsilon must be positive")]
    InvalidEpsilon,
    #[error("NotConverged: no stop after {iterations} iterations")]
    NotConverged { iterations: usize },
}

/// Square system `Ax = b`, `A` stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    n: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl LinearSystem {
    pub fn new(n: usize, a: Vec<f64>, b: Vec<f64>) -> Result<Self, JacobiError> {
        if a.len() != n * n {
            return Err(JacobiError::DimensionMismatch {
                expected: n * n,
                got: a.len(),
            });
        }
        if b.len() != n {
            return Err(JacobiError::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        Ok(LinearSystem { n, a, b })
    }

    pub fn from_rows(rows: &[Vec<f64>], b: Vec<f64>) -> Result<Self, JacobiError> {
        let n = b.len();
        if rows.len() != n {
            return Err(JacobiError::DimensionMismatch {
                expected: n,
                got: rows.len(),
            });
        }
        let mut a = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(JacobiError::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            a.extend_from_slice(row);
        }
        Self::new(n, a, b)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// `‖Ax - b‖∞`.
    pub fn residual_inf_norm(&self, x: &[f64]) -> f64 {
        (0..self.n)
            .map(|i| {
                let ax: f64 = self.row(i).iter().zip(x).map(|(a, x)| a * x).sum();
                (ax - self.b[i]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// `C`, `d` and the stop threshold derived from a system.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiIterationData {
    n: usize,
    /// Row-major copy of `C`.
    c_rows: Vec<f64>,
    /// Column-major copy of `C`, so `c_j` is contiguous.
    c_cols: Vec<f64>,
    d: Vec<f64>,
    epsilon: f64,
}

impl JacobiIterationData {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self, i: usize, j: usize) -> f64 {
        self.c_rows[i * self.n + j]
    }

    /// Column `c_j`.
    pub fn column(&self, j: usize) -> &[f64] {
        &self.c_cols[j * self.n..(j + 1) * self.n]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.c_rows[i * self.n..(i + 1) * self.n]
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    /// Threshold on the squared norm of the step.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

pub fn build_iteration_data(sys: &LinearSystem, epsilon: f64) -> Result<JacobiIterationData, JacobiError> {
    // Written to reject NaN as well.
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(JacobiError::InvalidEpsilon);
    }
    let n = sys.n();
    if let Some(i) = (0..n).find(|&i| sys.a(i, i) == 0.0) {
        return Err(JacobiError::ZeroDiagonal { row: i + 1 });
    }
    let mut c_rows = vec![0.0; n * n];
    let mut c_cols = vec![0.0; n * n];
    for i in 0..n {
        let diag = sys.a(i, i);
        for j in 0..n {
            if j != i {
                let c = -sys.a(i, j) / diag;
                c_rows[i * n + j] = c;
                c_cols[j * n + i] = c;
            }
        }
    }
    let d = (0..n).map(|i| sys.b()[i] / sys.a(i, i)).collect();
    Ok(JacobiIterationData {
        n,
        c_rows,
        c_cols,
        d,
        epsilon,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dominance {
    /// `|a_ii| ≥ Σ_{j≠i} |a_ij|` for every row.
    pub dominant: bool,
    /// The matrix is dominant and at least one row satisfies the inequality
    /// strictly. Always `false` for a non-dominant matrix.
    pub strict_somewhere: bool,
}

impl Dominance {
    /// The sufficient condition for convergence.
    pub fn guarantees_convergence(self) -> bool {
        self.dominant && self.strict_somewhere
    }
}

pub fn check_diagonal_dominance(sys: &LinearSystem) -> Dominance {
    let mut dominant = true;
    let mut strict_somewhere = false;
    for i in 0..sys.n() {
        let diag = sys.a(i, i).abs();
        let off: f64 = sys.row(i).iter().map(|a| a.abs()).sum::<f64>() - diag;
        if diag < off {
            dominant = false;
        } else if diag > off {
            strict_somewhere = true;
        }
    }
    Dominance {
        dominant,
        strict_somewhere: dominant && strict_somewhere,
    }
}

/// `x_j · c_j`.
pub fn map_f_column(j: usize, x: &[f64], data: &JacobiIterationData) -> Vec<f64> {
    let xj = x[j];
    data.column(j).iter().map(|c| xj * c).collect()
}

pub fn reduce_vec_add(u: &[f64], v: &[f64]) -> Vec<f64> {
    debug_assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(a, b)| a + b).collect()
}

pub fn vec_add_assign(acc: &mut [f64], v: &[f64]) {
    debug_assert_eq!(acc.len(), v.len());
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

pub fn squared_distance(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `x(k+1) = s + d` and the stop test `‖x(k+1) - x(k)‖² < ε`.
pub fn process_results_jacobi(s: &[f64], x_prev: &[f64], data: &JacobiIterationData) -> (Vec<f64>, bool) {
    let x_next = reduce_vec_add(s, data.d());
    let exit = squared_distance(&x_next, x_prev) < data.epsilon();
    (x_next, exit)
}

/// `d_i + Σ_j c_ij x_j`: coordinate `i` of the next approximation.
pub fn map_f_coordinate(i: usize, x: &[f64], data: &JacobiIterationData) -> f64 {
    data.d()[i] + data.row(i).iter().zip(x).map(|(c, x)| c * x).sum::<f64>()
}

/// Plain Jacobi loop, independent of the farm engine.
///
/// Returns every iterate, starting with `x(0) = d` and ending with the first
/// `x(k)` whose step from `x(k-1)` has squared norm below `epsilon`.
pub fn sequential_jacobi_oracle(
    sys: &LinearSystem,
    epsilon: f64,
    max_iter: usize,
) -> Result<Vec<Vec<f64>>, JacobiError> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(JacobiError::InvalidEpsilon);
    }
    let n = sys.n();
    let mut c = vec![vec![0.0; n]; n];
    let mut d = vec![0.0; n];
    for i in 0..n {
        let diag = sys.a(i, i);
        if diag == 0.0 {
            return Err(JacobiError::ZeroDiagonal { row: i + 1 });
        }
        for (j, cij) in c[i].iter_mut().enumerate() {
            if j != i {
                *cij = -sys.a(i, j) / diag;
            }
        }
        d[i] = sys.b()[i] / diag;
    }
    let mut iterates = vec![d.clone()];
    for _ in 0..max_iter {
        let x = iterates.last().expect("non-empty");
        let mut next = vec![0.0; n];
        for i in 0..n {
            let mut sum = 0.0;
            for j in 0..n {
                sum += c[i][j] * x[j];
            }
            next[i] = sum + d[i];
        }
        let mut step = 0.0;
        for i in 0..n {
            step += (next[i] - x[i]) * (next[i] - x[i]);
        }
        iterates.push(next);
        if step < epsilon {
            return Ok(iterates);
        }
    }
    Err(JacobiError::NotConverged { iterations: max_iter })
}

/// Random strictly diagonally dominant system: off-diagonal entries uniform in
/// `[-1, 1]`, `a_ii = Σ_{j≠i} |a_ij| + 1`, `b` uniform in `[-n, n]`.
pub fn generate_diagonally_dominant_system(n: usize, seed: u64) -> LinearSystem {
    assert!(n >= 1, "system dimension must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        let mut off = 0.0;
        for j in 0..n {
            if j != i {
                let v: f64 = rng.random_range(-1.0..=1.0);
                a[i * n + j] = v;
                off += v.abs();
            }
        }
        a[i * n + i] = off + 1.0;
    }
    let bound = n as f64;
    let b = (0..n).map(|_| rng.random_range(-bound..=bound)).collect();
    LinearSystem::new(n, a, b).expect("dimensions are consistent")
}

/// Order parameter: the current approximation `x(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiParameter {
    pub x: Vec<f64>,
}

impl WireCodec for JacobiParameter {
    fn encode(&self, out: &mut Vec<u8>) {
        self.x.encode(out);
    }

    fn decode(input: &mut &[u8]) -> Result<Self, CodecError> {
        Ok(JacobiParameter { x: Vec::decode(input)? })
    }
}

fn format_head(x: &[f64], precision: usize) -> String {
    const SHOWN: usize = 4;
    let mut out = String::from("x=[");
    for (k, v) in x.iter().take(SHOWN).enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{v:.precision$}");
    }
    if x.len() > SHOWN {
        out.push_str(", ...");
    }
    out.push(']');
    out
}

/// Jacobi with Map and Reduce over the column indices.
#[derive(Debug, Clone)]
pub struct JacobiProblem {
    data: JacobiIterationData,
}

impl JacobiProblem {
    pub fn new(sys: &LinearSystem, epsilon: f64) -> Result<Self, JacobiError> {
        Ok(JacobiProblem {
            data: build_iteration_data(sys, epsilon)?,
        })
    }

    pub fn data(&self) -> &JacobiIterationData {
        &self.data
    }
}

/// The single job of [`JacobiProblem`].
#[derive(Debug)]
pub struct ScaledColumns;

impl Problem for JacobiProblem {
    type Parameter = JacobiParameter;
    /// Column index `j`.
    type MapElem = usize;
    type Job0 = ScaledColumns;
    type Job1 = NoJob;
    type Job2 = NoJob;
    type Job3 = NoJob;

    fn list_size(&self) -> usize {
        self.data.n()
    }

    fn map_list_elem(&self, index: usize) -> usize {
        index
    }

    fn init_parameter(&self) -> JacobiParameter {
        JacobiParameter {
            x: self.data.d().to_vec(),
        }
    }

    fn parameters_output(&self, _: &JacobiParameter, _: usize) -> Option<String> {
        Some(format!(
            "jacobi map+reduce n={} eps={:e}",
            self.data.n(),
            self.data.epsilon()
        ))
    }
}

impl Job<JacobiProblem> for ScaledColumns {
    type Reduce = Vec<f64>;

    fn map_f(problem: &JacobiProblem, j: &usize, ctx: &ExecutionContext<'_, JacobiParameter>) -> Option<Vec<f64>> {
        Some(map_f_column(*j, &ctx.parameter().x, &problem.data))
    }

    fn reduce_f(_: &JacobiProblem, x: &Vec<f64>, y: &Vec<f64>) -> Vec<f64> {
        reduce_vec_add(x, y)
    }

    fn reduce_into(_: &JacobiProblem, acc: &mut Vec<f64>, y: &Vec<f64>) {
        vec_add_assign(acc, y);
    }

    fn process_results(
        problem: &JacobiProblem,
        reduce: Option<&Vec<f64>>,
        _: u64,
        parameter: &mut JacobiParameter,
        _: &IterationInfo,
    ) -> Next {
        let zero;
        let s = match reduce {
            Some(s) => s,
            None => {
                zero = vec![0.0; problem.data.n()];
                &zero
            }
        };
        let (x_next, exit) = process_results_jacobi(s, &parameter.x, &problem.data);
        parameter.x = x_next;
        if exit {
            Next::Exit
        } else {
            Next::Continue
        }
    }

    fn iter_output(
        _: &JacobiProblem,
        _: Option<&Vec<f64>>,
        _: u64,
        parameter: &JacobiParameter,
        _: f64,
        _: JobId,
        precision: usize,
    ) -> String {
        format_head(&parameter.x, precision)
    }

    fn problem_output(
        _: &JacobiProblem,
        _: Option<&Vec<f64>>,
        _: u64,
        parameter: &JacobiParameter,
        _: f64,
        precision: usize,
    ) -> Option<String> {
        Some(format!("solution {}", format_head(&parameter.x, precision)))
    }
}

/// Coordinates of a vector keyed by global index, sorted and disjoint.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseCoordinates(pub Vec<(u64, f64)>);

impl SparseCoordinates {
    pub fn single(index: usize, value: f64) -> Self {
        SparseCoordinates(vec![(index as u64, value)])
    }

    /// Disjoint union; keeps the index order.
    pub fn merge_from(&mut self, other: &SparseCoordinates) {
        let appendable = match (self.0.last(), other.0.first()) {
            (Some(&(last, _)), Some(&(first, _))) => last < first,
            _ => true,
        };
        if appendable {
            self.0.extend_from_slice(&other.0);
            return;
        }
        let mut merged = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            let next = match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => {
                    debug_assert_ne!(x.0, y.0, "coordinate {} produced twice", x.0);
                    if x.0 < y.0 {
                        a.next()
                    } else {
                        b.next()
                    }
                }
                (Some(_), None) => a.next(),
                (None, Some(_)) => b.next(),
                (None, None) => break,
            };
            merged.push(*next.expect("peeked"));
        }
        self.0 = merged;
    }
}

impl WireCodec for SparseCoordinates {
    fn encode(&self, out: &mut Vec<u8>) {
        self.0.encode(out);
    }

    fn decode(input: &mut &[u8]) -> Result<Self, CodecError> {
        Ok(SparseCoordinates(Vec::decode(input)?))
    }
}

/// Jacobi with Map only: element `i` computes coordinate `i` of `x(k+1)`.
#[derive(Debug, Clone)]
pub struct JacobiMapProblem {
    data: JacobiIterationData,
}

impl JacobiMapProblem {
    pub fn new(sys: &LinearSystem, epsilon: f64) -> Result<Self, JacobiError> {
        Ok(JacobiMapProblem {
            data: build_iteration_data(sys, epsilon)?,
        })
    }

    pub fn data(&self) -> &JacobiIterationData {
        &self.data
    }
}

/// The single job of [`JacobiMapProblem`].
#[derive(Debug)]
pub struct NextCoordinates;

impl Problem for JacobiMapProblem {
    type Parameter = JacobiParameter;
    /// Row index `i`.
    type MapElem = usize;
    type Job0 = NextCoordinates;
    type Job1 = NoJob;
    type Job2 = NoJob;
    type Job3 = NoJob;

    fn list_size(&self) -> usize {
        self.data.n()
    }

    fn map_list_elem(&self, index: usize) -> usize {
        index
    }

    fn init_parameter(&self) -> JacobiParameter {
        JacobiParameter {
            x: self.data.d().to_vec(),
        }
    }

    fn parameters_output(&self, _: &JacobiParameter, _: usize) -> Option<String> {
        Some(format!(
            "jacobi map-only n={} eps={:e}",
            self.data.n(),
            self.data.epsilon()
        ))
    }
}

impl Job<JacobiMapProblem> for NextCoordinates {
    type Reduce = SparseCoordinates;

    fn map_f(
        problem: &JacobiMapProblem,
        i: &usize,
        ctx: &ExecutionContext<'_, JacobiParameter>,
    ) -> Option<SparseCoordinates> {
        // The coordinate is placed by the sublist position, not the element.
        let index = ctx.global_index();
        debug_assert_eq!(index, *i);
        Some(SparseCoordinates::single(
            index,
            map_f_coordinate(*i, &ctx.parameter().x, &problem.data),
        ))
    }

    fn reduce_f(_: &JacobiMapProblem, x: &SparseCoordinates, y: &SparseCoordinates) -> SparseCoordinates {
        let mut out = x.clone();
        out.merge_from(y);
        out
    }

    fn reduce_into(_: &JacobiMapProblem, acc: &mut SparseCoordinates, y: &SparseCoordinates) {
        acc.merge_from(y);
    }

    fn process_results(
        problem: &JacobiMapProblem,
        reduce: Option<&SparseCoordinates>,
        _: u64,
        parameter: &mut JacobiParameter,
        _: &IterationInfo,
    ) -> Next {
        let mut x_next = parameter.x.clone();
        if let Some(coords) = reduce {
            debug_assert_eq!(coords.0.len(), problem.data.n());
            for &(index, value) in &coords.0 {
                x_next[index as usize] = value;
            }
        }
        let exit = squared_distance(&x_next, &parameter.x) < problem.data.epsilon();
        parameter.x = x_next;
        if exit {
            Next::Exit
        } else {
            Next::Continue
        }
    }

    fn iter_output(
        _: &JacobiMapProblem,
        _: Option<&SparseCoordinates>,
        _: u64,
        parameter: &JacobiParameter,
        _: f64,
        _: JobId,
        precision: usize,
    ) -> String {
        format_head(&parameter.x, precision)
    }

    fn problem_output(
        _: &JacobiMapProblem,
        _: Option<&SparseCoordinates>,
        _: u64,
        parameter: &JacobiParameter,
        _: f64,
        precision: usize,
    ) -> Option<String> {
        Some(format!("solution {}", format_head(&parameter.x, precision)))
    }
}
