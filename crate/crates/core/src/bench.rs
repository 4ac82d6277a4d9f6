//! Random-circuit benchmark: mean routed CNOT count per input size.

use std::fmt::Write as _;

use thiserror::Error;

use crate::arch::Architecture;
use crate::circuit::{random_cnot_circuit, Circuit, CircuitError};
use crate::exec::Execution;
use crate::pipeline::{overhead_percent, route_circuit, RouteError, RouteOptions};
use crate::placement::GaParams;
use crate::rng::derive_seed;

pub const CSV_HEADER: &str = "architecture,input_cnots,samples,mean_output_cnots,overhead_percent,seed";

/// Constraint-oblivious estimate for square-9: the unconstrained plateau
/// of about 25.6 CNOTs, each costing 4(d − 1) CNOTs at distance d = 2.
pub const NAIVE_SQUARE9_ESTIMATE: f64 = 25.6 * 4.0 * (2.0 - 1.0);

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("no gate counts given")]
    NoCounts,
    #[error("samples must be at least 1")]
    NoSamples,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("sample {sample} at {count} CNOTs: {source}")]
    Route {
        count: usize,
        sample: usize,
        source: RouteError,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub architecture: String,
    pub input_cnots: usize,
    pub samples: usize,
    pub mean_output_cnots: f64,
    pub overhead_percent: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub counts: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    /// GA settings; the seed field is replaced by a per-sample seed.
    /// `None` keeps the identity placement.
    pub ga: Option<GaParams>,
    /// Patel-Markov-Hayes instead of the connectivity-aware router.
    pub unconstrained: bool,
    /// How samples of one input size are spread over threads.
    pub exec: Execution,
}

impl BenchConfig {
    /// 20 samples per count with size-dependent GA defaults for `a`.
    pub fn new(a: &Architecture, counts: Vec<usize>, seed: u64) -> Self {
        Self {
            counts,
            samples: 20,
            seed,
            ga: Some(GaParams::for_size(a.n(), seed)),
            unconstrained: false,
            exec: Execution::default(),
        }
    }
}

/// Input circuit of sample `i` at `count` CNOTs.
pub fn sample_circuit(n: usize, count: usize, i: usize, seed: u64) -> Result<Circuit, CircuitError> {
    random_cnot_circuit(n, count, derive_seed(seed, "circuit-gen", &[count as u64, i as u64]))
}

/// Routed CNOT counts of every sample at one input size, in sample order.
pub fn sample_counts(a: &Architecture, cfg: &BenchConfig, count: usize) -> Result<Vec<usize>, BenchError> {
    if cfg.samples == 0 {
        return Err(BenchError::NoSamples);
    }
    let indices: Vec<usize> = (0..cfg.samples).collect();
    cfg.exec.try_map(&indices, |_, &i| {
        let c = sample_circuit(a.n(), count, i, cfg.seed)?;
        let placement = cfg.ga.map(|g| GaParams {
            seed: derive_seed(cfg.seed, "ga", &[count as u64, i as u64]),
            ..g
        });
        let opts = RouteOptions {
            placement,
            unconstrained: cfg.unconstrained,
            phasepoly: false,
            exec: Execution::Sequential,
        };
        let routed = route_circuit(&c, a, &opts).map_err(|source| BenchError::Route {
            count,
            sample: i,
            source,
        })?;
        Ok(routed.output_cnots)
    })
}

pub fn run_bench(a: &Architecture, cfg: &BenchConfig) -> Result<Vec<BenchRow>, BenchError> {
    if cfg.counts.is_empty() {
        return Err(BenchError::NoCounts);
    }
    cfg.counts
        .iter()
        .map(|&count| {
            let outputs = sample_counts(a, cfg, count)?;
            let mean = outputs.iter().sum::<usize>() as f64 / outputs.len() as f64;
            Ok(BenchRow {
                architecture: a.name().to_string(),
                input_cnots: count,
                samples: cfg.samples,
                mean_output_cnots: mean,
                overhead_percent: overhead_percent(count as f64, mean),
                seed: cfg.seed,
            })
        })
        .collect()
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{:.4},{:.4},{}",
            r.architecture, r.input_cnots, r.samples, r.mean_output_cnots, r.overhead_percent, r.seed
        )
        .unwrap();
    }
    out
}

/// Human-readable summary of the reference figures for `a`.
pub fn explain(a: &Architecture) -> String {
    let n = a.n() as f64;
    let bound = if a.n() > 1 { n * n / n.log2() } else { 0.0 };
    let mut s = String::new();
    writeln!(
        s,
        "architecture: {} ({} qubits, {} edges)",
        a.name(),
        a.n(),
        a.edges().len()
    )
    .unwrap();
    writeln!(s, "mean qubit distance: {:.3}", a.mean_distance()).unwrap();
    writeln!(s, "unconstrained asymptotic size n^2/log2(n): {bound:.1}").unwrap();
    writeln!(
        s,
        "naive baseline on square-9: 25.6 * 4 * (2 - 1) = {NAIVE_SQUARE9_ESTIMATE:.1}, about {} CNOTs",
        NAIVE_SQUARE9_ESTIMATE.round()
    )
    .unwrap();
    s
}

/// File name and circuit of each generated sample.
pub fn generate(n: usize, count: usize, samples: usize, seed: u64) -> Result<Vec<(String, Circuit)>, CircuitError> {
    (0..samples)
        .map(|i| {
            Ok((
                format!("rand_n{n}_g{count}_s{i}.qasm"),
                sample_circuit(n, count, i, seed)?,
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_row() {
        let a = Architecture::builtin("square-9").unwrap();
        let cfg = BenchConfig {
            samples: 1,
            ..BenchConfig::new(&a, vec![0], 4)
        };
        let rows = run_bench(&a, &cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].mean_output_cnots, 0.0);
        assert_eq!(rows[0].overhead_percent, 0.0);
        assert_eq!(to_csv(&rows), format!("{CSV_HEADER}\nsquare-9,0,1,0.0000,0.0000,4\n"));
    }

    #[test]
    fn overhead_follows_the_mean() {
        let a = Architecture::builtin("square-9").unwrap();
        let cfg = BenchConfig {
            samples: 3,
            ga: None,
            ..BenchConfig::new(&a, vec![10, 20], 8)
        };
        for row in run_bench(&a, &cfg).unwrap() {
            let means = sample_counts(&a, &cfg, row.input_cnots).unwrap();
            let mean = means.iter().sum::<usize>() as f64 / 3.0;
            assert_eq!(row.mean_output_cnots, mean);
            assert!(
                (row.overhead_percent - 100.0 * (mean - row.input_cnots as f64) / row.input_cnots as f64).abs() < 1e-12
            );
        }
    }

    #[test]
    fn csv_is_independent_of_execution_mode() {
        let a = Architecture::builtin("square-9").unwrap();
        let cfg = BenchConfig {
            samples: 4,
            ..BenchConfig::new(&a, vec![5, 15], 21)
        };
        let par = to_csv(
            &run_bench(
                &a,
                &BenchConfig {
                    exec: Execution::Parallel,
                    ..cfg.clone()
                },
            )
            .unwrap(),
        );
        let seq = to_csv(
            &run_bench(
                &a,
                &BenchConfig {
                    exec: Execution::Sequential,
                    ..cfg
                },
            )
            .unwrap(),
        );
        assert_eq!(par, seq);
    }

    #[test]
    fn rejects_degenerate_configs() {
        let a = Architecture::line(3);
        assert!(matches!(
            run_bench(&a, &BenchConfig::new(&a, vec![], 0)),
            Err(BenchError::NoCounts)
        ));
        let cfg = BenchConfig {
            samples: 0,
            ..BenchConfig::new(&a, vec![1], 0)
        };
        assert!(matches!(run_bench(&a, &cfg), Err(BenchError::NoSamples)));
    }

    #[test]
    fn generated_names_and_sizes() {
        let files = generate(9, 3, 20, 7).unwrap();
        assert_eq!(files.len(), 20);
        assert_eq!(files[4].0, "rand_n9_g3_s4.qasm");
        assert!(files
            .iter()
            .all(|(_, c)| c.n() == 9 && c.count_cnots() == 3 && c.len() == 3));
        assert_eq!(generate(9, 3, 20, 7).unwrap(), files);
    }

    #[test]
    fn explain_mentions_the_baseline() {
        let text = explain(&Architecture::builtin("square-9").unwrap());
        assert!(text.contains("102"));
        assert!(text.contains("25.6"));
    }
}
