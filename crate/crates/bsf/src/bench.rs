//! Speedup measurements over a list of worker counts.

use std::fmt::Write as _;
use std::io;
use std::time::Duration;

use bsf_core::{BsfError, Problem, RunConfig};

use crate::runner::run_inproc;

pub const CSV_HEADER: [&str; 7] = ["variant", "n", "K", "transport", "iterations", "elapsed_s", "speedup"];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub variant: String,
    pub n: usize,
    pub k: usize,
    pub transport: String,
    pub iterations: u64,
    pub elapsed_s: f64,
    pub residual_inf_norm: Option<f64>,
    /// `elapsed(K = 1) / elapsed(K)`; exactly 1 for `K = 1`.
    pub speedup: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
}

pub fn speedup(k: usize, baseline_s: f64, elapsed_s: f64) -> f64 {
    if k == 1 {
        1.0
    } else {
        baseline_s / elapsed_s
    }
}

/// Runs `problem` once per entry of `k_list` on the in-process transport,
/// each time from a fresh clone. A `K = 1` baseline is measured separately
/// when the list lacks one.
pub fn run_bench<P, F>(
    variant: &str,
    problem: &P,
    base: &RunConfig,
    k_list: &[usize],
    timeout: Duration,
    residual: F,
) -> Result<BenchReport, BsfError>
where
    P: Problem + Clone + Send,
    F: Fn(&P::Parameter) -> Option<f64>,
{
    if k_list.is_empty() {
        return Err(BsfError::InvalidConfig("empty worker-count list"));
    }
    let once = |k: usize| {
        let config = RunConfig {
            num_workers: k,
            ..base.clone()
        };
        let outcome = run_inproc(&mut problem.clone(), &config, timeout, &mut ())?;
        log::info!(
            "K={k}: {} iterations in {:.6} s",
            outcome.iterations,
            outcome.elapsed_seconds
        );
        Ok::<_, BsfError>(outcome)
    };

    let mut runs = Vec::with_capacity(k_list.len());
    for &k in k_list {
        runs.push((k, once(k)?));
    }
    let baseline = match runs.iter().find(|(k, _)| *k == 1) {
        Some((_, o)) => o.elapsed_seconds,
        None => once(1)?.elapsed_seconds,
    };

    let n = problem.list_size();
    let records = runs
        .into_iter()
        .map(|(k, o)| BenchRecord {
            variant: variant.to_string(),
            n,
            k,
            transport: "inproc".to_string(),
            iterations: o.iterations,
            elapsed_s: o.elapsed_seconds,
            residual_inf_norm: residual(&o.final_parameter),
            speedup: speedup(k, baseline, o.elapsed_seconds),
        })
        .collect();
    Ok(BenchReport { records })
}

impl BenchReport {
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.records {
            w.write_record([
                r.variant.clone(),
                r.n.to_string(),
                r.k.to_string(),
                r.transport.clone(),
                r.iterations.to_string(),
                format!("{:.6}", r.elapsed_s),
                format!("{:.4}", r.speedup),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Human-readable table with the residual column added.
    pub fn table(&self) -> String {
        let mut s = format!(
            "{:<10} {:>6} {:>4} {:>9} {:>10} {:>12} {:>8} {:>12}\n",
            "variant", "n", "K", "transport", "iterations", "elapsed_s", "speedup", "residual"
        );
        for r in &self.records {
            let residual = r
                .residual_inf_norm
                .map_or_else(|| "-".to_string(), |v| format!("{v:.3e}"));
            let _ = writeln!(
                s,
                "{:<10} {:>6} {:>4} {:>9} {:>10} {:>12.6} {:>8.4} {:>12}",
                r.variant, r.n, r.k, r.transport, r.iterations, r.elapsed_s, r.speedup, residual
            );
        }
        s
    }

    pub fn speedup_for(&self, k: usize) -> Option<f64> {
        self.records.iter().find(|r| r.k == k).map(|r| r.speedup)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bsf_core::intsum::IntSum;

    #[test]
    fn single_worker_row_is_exactly_one() {
        assert_eq!(speedup(1, 0.0, 0.0), 1.0);
        assert_eq!(speedup(1, 2.0, 3.0), 1.0);
        assert_eq!(speedup(4, 2.0, 0.5), 4.0);
    }

    #[test]
    fn one_row_per_k_with_shared_instance() {
        let p = IntSum::generate(64, 3, 2);
        let report = run_bench(
            "intsum",
            &p,
            &RunConfig::default(),
            &[1, 2, 4],
            Duration::from_secs(10),
            |_| None,
        )
        .unwrap();
        let ks: Vec<_> = report.records.iter().map(|r| r.k).collect();
        assert_eq!(ks, vec![1, 2, 4]);
        assert!(report.records.iter().all(|r| r.iterations == 2 && r.n == 64));
        assert_eq!(report.speedup_for(1), Some(1.0));
    }

    #[test]
    fn baseline_is_measured_when_missing() {
        let p = IntSum::generate(16, 3, 1);
        let report = run_bench(
            "intsum",
            &p,
            &RunConfig::default(),
            &[2],
            Duration::from_secs(10),
            |_| None,
        )
        .unwrap();
        assert_eq!(report.records.len(), 1);
        assert!(report.records[0].speedup.is_finite());
    }

    #[test]
    fn errors_propagate() {
        let p = IntSum::generate(4, 3, 1);
        let err = run_bench(
            "intsum",
            &p,
            &RunConfig::default(),
            &[1, 8],
            Duration::from_secs(10),
            |_| None,
        )
        .unwrap_err();
        assert!(matches!(err, BsfError::ListTooShort { .. }));
        assert!(
            run_bench("intsum", &p, &RunConfig::default(), &[], Duration::from_secs(1), |_| {
                None
            })
            .is_err()
        );
    }

    #[test]
    fn csv_schema() {
        let report = BenchReport {
            records: vec![BenchRecord {
                variant: "jacobi".into(),
                n: 8,
                k: 1,
                transport: "inproc".into(),
                iterations: 12,
                elapsed_s: 0.5,
                residual_inf_norm: Some(1e-9),
                speedup: 1.0,
            }],
        };
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "variant,n,K,transport,iterations,elapsed_s,speedup\njacobi,8,1,inproc,12,0.500000,1.0000\n"
        );
        assert!(report.table().contains("1.000e-9"));
    }
}
