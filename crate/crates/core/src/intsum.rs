//! Exact-arithmetic toy problem.
//!
//! Each iteration maps every list value `a` to `a · m` and sums the products,
//! all in wrapping `u64` arithmetic, which is associative and commutative. The
//! sum seeds the next multiplier (`m ← sum | 1`). The run stops after a fixed
//! number of rounds, so its result must be identical for every worker count.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codec::{CodecError, WireCodec};
use crate::config::JobId;
use crate::context::{ExecutionContext, IterationInfo};
use crate::problem::{Job, Next, NoJob, Problem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSumParameter {
    pub multiplier: u64,
    pub round: u32,
    pub total: u64,
}

impl WireCodec for IntSumParameter {
    fn encode(&self, out: &mut Vec<u8>) {
        self.multiplier.encode(out);
        self.round.encode(out);
        self.total.encode(out);
    }

    fn decode(input: &mut &[u8]) -> Result<Self, CodecError> {
        Ok(IntSumParameter {
            multiplier: u64::decode(input)?,
            round: u32::decode(input)?,
            total: u64::decode(input)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSum {
    values: Vec<i64>,
    rounds: u32,
}

impl IntSum {
    pub fn new(values: Vec<i64>, rounds: u32) -> Self {
        assert!(rounds >= 1, "at least one round");
        IntSum { values, rounds }
    }

    /// `len` values uniform in `[-1000, 1000]`.
    pub fn generate(len: usize, seed: u64, rounds: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..len).map(|_| rng.random_range(-1000..=1000)).collect();
        Self::new(values, rounds)
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    /// The expected final parameter, computed with a plain loop.
    pub fn reference(&self) -> IntSumParameter {
        let mut p = self.init_parameter();
        for _ in 0..self.rounds {
            let sum = self
                .values
                .iter()
                .fold(0u64, |acc, &a| acc.wrapping_add((a as u64).wrapping_mul(p.multiplier)));
            p = advance(&p, sum);
        }
        p
    }
}

fn advance(p: &IntSumParameter, sum: u64) -> IntSumParameter {
    IntSumParameter {
        multiplier: sum | 1,
        round: p.round + 1,
        total: sum,
    }
}

#[derive(Debug)]
pub struct WrappingSum;

impl Problem for IntSum {
    type Parameter = IntSumParameter;
    type MapElem = i64;
    type Job0 = WrappingSum;
    type Job1 = NoJob;
    type Job2 = NoJob;
    type Job3 = NoJob;

    fn list_size(&self) -> usize {
        self.values.len()
    }

    fn map_list_elem(&self, index: usize) -> i64 {
        self.values[index]
    }

    fn init_parameter(&self) -> IntSumParameter {
        IntSumParameter {
            multiplier: 1,
            round: 0,
            total: 0,
        }
    }

    fn parameters_output(&self, _: &IntSumParameter, _: usize) -> Option<String> {
        Some(format!("intsum len={} rounds={}", self.values.len(), self.rounds))
    }
}

impl Job<IntSum> for WrappingSum {
    type Reduce = u64;

    fn map_f(_: &IntSum, a: &i64, ctx: &ExecutionContext<'_, IntSumParameter>) -> Option<u64> {
        Some((*a as u64).wrapping_mul(ctx.parameter().multiplier))
    }

    fn reduce_f(_: &IntSum, x: &u64, y: &u64) -> u64 {
        x.wrapping_add(*y)
    }

    fn process_results(
        problem: &IntSum,
        reduce: Option<&u64>,
        _: u64,
        parameter: &mut IntSumParameter,
        _: &IterationInfo,
    ) -> Next {
        *parameter = advance(parameter, reduce.copied().unwrap_or(0));
        if parameter.round >= problem.rounds {
            Next::Exit
        } else {
            Next::Continue
        }
    }

    fn iter_output(
        _: &IntSum,
        _: Option<&u64>,
        counter: u64,
        p: &IntSumParameter,
        _: f64,
        _: JobId,
        _: usize,
    ) -> String {
        format!("total={} counted={}", p.total as i64, counter)
    }

    fn problem_output(
        _: &IntSum,
        _: Option<&u64>,
        counter: u64,
        p: &IntSumParameter,
        _: f64,
        _: usize,
    ) -> Option<String> {
        Some(format!("sum={} counted={}", p.total as i64, counter))
    }
}
