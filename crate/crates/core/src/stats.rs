//! Monte Carlo estimation with reproducible, worker-independent partitioning,
//! plus the small amount of statistics the checks need (binomial standard
//! errors, normal-approximation confidence intervals, chi-square p-values).

use crate::rng::{stream, ChaCha8Rng};

/// z-score for a two-sided 99% confidence interval.
pub const Z_99: f64 = 2.5758293035489004;

/// Outcome of a Monte Carlo estimate of an acceptance/rejection probability.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ExperimentReport {
    pub test: String,
    pub params: String,
    pub trials: u64,
    pub seed: u64,
    pub successes: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl ExperimentReport {
    pub fn from_counts(test: &str, params: &str, trials: u64, seed: u64, successes: u64) -> Self {
        let p = if trials == 0 {
            0.0
        } else {
            successes as f64 / trials as f64
        };
        let se = if trials == 0 {
            0.0
        } else {
            (p * (1.0 - p) / trials as f64).sqrt()
        };
        ExperimentReport {
            test: test.to_string(),
            params: params.to_string(),
            trials,
            seed,
            successes,
            estimate: p,
            stderr: se,
            ci_lo: (p - Z_99 * se).max(0.0),
            ci_hi: (p + Z_99 * se).min(1.0),
        }
    }

    /// True iff `value` lies in the 99% confidence interval.
    pub fn ci_contains(&self, value: f64) -> bool {
        value >= self.ci_lo && value <= self.ci_hi
    }

    pub fn csv_header() -> &'static str {
        "test,params,trials,seed,estimate,stderr,ci_lo,ci_hi"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.test,
            self.params,
            self.trials,
            self.seed,
            self.estimate,
            self.stderr,
            self.ci_lo,
            self.ci_hi
        )
    }
}

/// Trials are split into fixed-size blocks; block `b` draws from stream `b+1`
/// of the seed. The block structure, not the worker count, determines every
/// random draw, so any worker count produces identical reports.
#[derive(Debug, Clone, Copy)]
pub struct EstimatorConfig {
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
}

impl EstimatorConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        EstimatorConfig {
            trials,
            seed,
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }
}

const BLOCK: u64 = 1024;

/// Estimates `Pr[trial(rng) = true]`.
pub fn estimate<F>(cfg: EstimatorConfig, test: &str, params: &str, trial: F) -> ExperimentReport
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    let blocks: Vec<(u64, u64)> = {
        let mut v = Vec::new();
        let mut start = 0;
        while start < cfg.trials {
            let len = BLOCK.min(cfg.trials - start);
            v.push((start / BLOCK, len));
            start += len;
        }
        v
    };

    let run_block = |&(index, len): &(u64, u64)| -> u64 {
        let mut rng = stream(cfg.seed, index + 1);
        let mut hits = 0;
        for _ in 0..len {
            if trial(&mut rng) {
                hits += 1;
            }
        }
        hits
    };

    let successes: u64 = if cfg.workers <= 1 || blocks.len() <= 1 {
        blocks.iter().map(run_block).sum()
    } else {
        let chunk = blocks.len().div_ceil(cfg.workers);
        std::thread::scope(|scope| {
            let handles: Vec<_> = blocks
                .chunks(chunk)
                .map(|part| scope.spawn(|| part.iter().map(run_block).sum::<u64>()))
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).sum()
        })
    };

    ExperimentReport::from_counts(test, params, cfg.trials, cfg.seed, successes)
}

/// Regularized lower incomplete gamma P(a, x), by series for x < a+1 and by
/// continued fraction otherwise.
fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let ln_gamma_a = ln_gamma(a);
    if x < a + 1.0 {
        // series expansion
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut n = a;
        for _ in 0..500 {
            n += 1.0;
            term *= x / n;
            sum += term;
            if term.abs() < sum.abs() * 1e-15 {
                break;
            }
        }
        sum * (-x + a * x.ln() - ln_gamma_a).exp()
    } else {
        // Lentz continued fraction for Q(a, x)
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-15 {
                break;
            }
        }
        let q = (-x + a * x.ln() - ln_gamma_a).exp() * h;
        1.0 - q
    }
}

/// Lanczos approximation of ln Γ(x) for x > 0.
fn ln_gamma(x: f64) -> f64 {
    const G: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let mut y = x;
    let tmp = x + 5.5 - (x + 0.5) * (x + 5.5).ln();
    let mut ser = 1.000000000190015;
    for g in G {
        y += 1.0;
        ser += g / y;
    }
    -tmp + (2.5066282746310005 * ser / x).ln()
}

/// Upper-tail p-value of a chi-square statistic with `dof` degrees of freedom.
pub fn chi_square_pvalue(stat: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    (1.0 - gamma_p(dof as f64 / 2.0, stat / 2.0)).clamp(0.0, 1.0)
}

/// Pearson chi-square p-value of observed counts against expected counts.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    let mut stat = 0.0;
    let mut dof = 0usize;
    for (&o, &e) in observed.iter().zip(expected) {
        if e > 0.0 {
            stat += (o as f64 - e) * (o as f64 - e) / e;
            dof += 1;
        }
    }
    chi_square_pvalue(stat, dof.saturating_sub(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn estimate_is_worker_independent() {
        let cfg = EstimatorConfig::new(10_000, 42);
        let f = |rng: &mut ChaCha8Rng| rng.gen_bool(0.3);
        let r1 = estimate(cfg, "t", "p", f);
        let r4 = estimate(cfg.with_workers(4), "t", "p", f);
        assert_eq!(r1.successes, r4.successes);
        assert_eq!(r1.csv_row(), r4.csv_row());
        assert!((r1.estimate - 0.3).abs() < 0.02);
    }

    #[test]
    fn chi_square_known_values() {
        // P(chi2_1 > 3.841) ~= 0.05, P(chi2_5 > 15.086) ~= 0.01
        assert!((chi_square_pvalue(3.841, 1) - 0.05).abs() < 1e-3);
        assert!((chi_square_pvalue(15.086, 5) - 0.01).abs() < 1e-3);
        assert!((chi_square_pvalue(0.0, 3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn report_ci_covers_estimate() {
        let r = ExperimentReport::from_counts("t", "p", 1000, 1, 300);
        assert!(r.ci_contains(0.3));
        assert!(!r.ci_contains(0.5));
        assert_eq!(r.estimate, 0.3);
    }
}
