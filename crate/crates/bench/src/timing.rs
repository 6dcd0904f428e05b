use std::time::Instant;

/// Summary of repeated timings, in seconds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Timing {
    pub mean: f64,
    pub median: f64,
    pub reps: usize,
}

impl Timing {
    pub fn from_samples(samples: &[f64]) -> Self {
        if samples.is_empty() {
            return Self {
                mean: 0.0,
                median: 0.0,
                reps: 0,
            };
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len().is_multiple_of(2) {
            (sorted[mid - 1] + sorted[mid]) / 2.0
        } else {
            sorted[mid]
        };
        Self {
            mean: samples.iter().sum::<f64>() / samples.len() as f64,
            median,
            reps: samples.len(),
        }
    }
}

/// Runs `f(rep)` once as a discarded warm-up (with rep `0`), then `reps`
/// timed times on the calling thread. Returns the timing and every result.
pub fn time_reps<T, F>(reps: usize, mut f: F) -> (Timing, Vec<T>)
where
    F: FnMut(usize) -> T,
{
    std::hint::black_box(f(0));
    let mut samples = Vec::with_capacity(reps);
    let mut results = Vec::with_capacity(reps);
    for rep in 0..reps {
        let start = Instant::now();
        let out = std::hint::black_box(f(rep));
        samples.push(start.elapsed().as_secs_f64());
        results.push(out);
    }
    (Timing::from_samples(&samples), results)
}
