//! Benchmark fixture that slows every map call down by a fixed amount.
//!
//! Makes speedup measurable on problems whose map is otherwise too cheap.

use core::marker::PhantomData;
use std::time::Duration;

use bsf_core::{ExecutionContext, IterationInfo, Job, JobId, Next, Problem};

#[derive(Debug, Clone)]
pub struct Delayed<P> {
    inner: P,
    delay: Duration,
}

impl<P> Delayed<P> {
    pub fn new(inner: P, delay: Duration) -> Self {
        Delayed { inner, delay }
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }

    pub fn delay(&self) -> Duration {
        self.delay
    }
}

/// Job `J` of the wrapped problem, with the delay applied in its map.
pub struct DelayedJob<J>(PhantomData<fn() -> J>);

impl<P: Problem> Problem for Delayed<P> {
    type Parameter = P::Parameter;
    type MapElem = P::MapElem;
    type Job0 = DelayedJob<P::Job0>;
    type Job1 = DelayedJob<P::Job1>;
    type Job2 = DelayedJob<P::Job2>;
    type Job3 = DelayedJob<P::Job3>;

    fn init(&mut self) -> bool {
        self.inner.init()
    }

    fn list_size(&self) -> usize {
        self.inner.list_size()
    }

    fn map_list_elem(&self, index: usize) -> P::MapElem {
        self.inner.map_list_elem(index)
    }

    fn init_parameter(&self) -> P::Parameter {
        self.inner.init_parameter()
    }

    fn job_dispatcher(&self, parameter: &mut P::Parameter, job: &mut JobId, exit: &mut bool, info: &IterationInfo) {
        self.inner.job_dispatcher(parameter, job, exit, info)
    }

    fn parameters_output(&self, parameter: &P::Parameter, precision: usize) -> Option<String> {
        self.inner.parameters_output(parameter, precision)
    }
}

impl<P: Problem, J: Job<P>> Job<Delayed<P>> for DelayedJob<J> {
    type Reduce = J::Reduce;
    const IMPLEMENTED: bool = J::IMPLEMENTED;

    fn map_f(problem: &Delayed<P>, elem: &P::MapElem, ctx: &ExecutionContext<'_, P::Parameter>) -> Option<J::Reduce> {
        if !problem.delay.is_zero() {
            std::thread::sleep(problem.delay);
        }
        J::map_f(&problem.inner, elem, ctx)
    }

    fn reduce_f(problem: &Delayed<P>, x: &J::Reduce, y: &J::Reduce) -> J::Reduce {
        J::reduce_f(&problem.inner, x, y)
    }

    fn reduce_into(problem: &Delayed<P>, acc: &mut J::Reduce, y: &J::Reduce) {
        J::reduce_into(&problem.inner, acc, y)
    }

    fn process_results(
        problem: &Delayed<P>,
        reduce: Option<&J::Reduce>,
        reduce_counter: u64,
        parameter: &mut P::Parameter,
        info: &IterationInfo,
    ) -> Next {
        J::process_results(&problem.inner, reduce, reduce_counter, parameter, info)
    }

    fn iter_output(
        problem: &Delayed<P>,
        reduce: Option<&J::Reduce>,
        reduce_counter: u64,
        parameter: &P::Parameter,
        elapsed_seconds: f64,
        next_job: JobId,
        precision: usize,
    ) -> String {
        J::iter_output(
            &problem.inner,
            reduce,
            reduce_counter,
            parameter,
            elapsed_seconds,
            next_job,
            precision,
        )
    }

    fn problem_output(
        problem: &Delayed<P>,
        reduce: Option<&J::Reduce>,
        reduce_counter: u64,
        parameter: &P::Parameter,
        elapsed_seconds: f64,
        precision: usize,
    ) -> Option<String> {
        J::problem_output(
            &problem.inner,
            reduce,
            reduce_counter,
            parameter,
            elapsed_seconds,
            precision,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bsf_core::intsum::IntSum;
    use bsf_core::{run_sequential, NoClock, RunConfig};
    use std::time::Instant;

    #[test]
    fn same_result_only_slower() {
        let plain = IntSum::generate(20, 5, 2);
        let mut delayed = Delayed::new(plain.clone(), Duration::from_millis(2));
        let config = RunConfig::default();
        let start = Instant::now();
        let slow = run_sequential(&mut delayed, &config, &NoClock, &mut ()).unwrap();
        assert!(start.elapsed() >= Duration::from_millis(80));
        let fast = run_sequential(&mut plain.clone(), &config, &NoClock, &mut ()).unwrap();
        assert_eq!(slow.final_parameter, fast.final_parameter);
        assert_eq!(slow.iterations, fast.iterations);
        assert_eq!(slow.final_reduce.encoded_value(), fast.final_reduce.encoded_value());
    }

    #[test]
    fn unimplemented_slots_stay_unimplemented() {
        const { assert!(<DelayedJob<<IntSum as Problem>::Job0> as Job<Delayed<IntSum>>>::IMPLEMENTED) };
        const { assert!(!<DelayedJob<<IntSum as Problem>::Job1> as Job<Delayed<IntSum>>>::IMPLEMENTED) };
    }
}
