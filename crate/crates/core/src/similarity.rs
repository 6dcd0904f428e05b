//! Jaccard estimation from signatures, exact Jaccard and RMSE.

use std::collections::HashSet;
use std::hash::{BuildHasher, Hash};

use crate::error::{invalid, Result};
use crate::sketch::Signature;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimilarityEstimate {
    pub estimate: f64,
    pub k_used: usize,
    pub matches: usize,
}

/// Fraction of positions where the two signatures agree.
pub fn estimate_jaccard(s1: &Signature, s2: &Signature) -> Result<SimilarityEstimate> {
    if s1.k() != s2.k() {
        return Err(invalid(format!(
            "signature lengths differ: {} vs {}",
            s1.k(),
            s2.k()
        )));
    }
    if s1.family_seed() != s2.family_seed() {
        return Err(invalid("signatures come from different hash families"));
    }
    let matches = s1
        .values()
        .iter()
        .zip(s2.values())
        .filter(|(a, b)| a == b)
        .count();
    Ok(SimilarityEstimate {
        estimate: matches as f64 / s1.k() as f64,
        k_used: s1.k(),
        matches,
    })
}

/// `|A ∩ B| / |A ∪ B|`, with `J(∅, ∅) = 0`.
pub fn exact_jaccard<T, S>(a: &HashSet<T, S>, b: &HashSet<T, S>) -> f64
where
    T: Eq + Hash,
    S: BuildHasher,
{
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let inter = small.iter().filter(|x| large.contains(*x)).count();
    ratio(inter, a.len() + b.len() - inter)
}

/// Same as [`exact_jaccard`] for strictly increasing slices, by merging.
pub fn exact_jaccard_sorted<T: Ord>(a: &[T], b: &[T]) -> f64 {
    let (mut i, mut j, mut inter) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    ratio(inter, a.len() + b.len() - inter)
}

fn ratio(inter: usize, union: usize) -> f64 {
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Root mean square of `estimate - truth` over `(estimate, truth)` pairs.
pub fn rmse(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(invalid("rmse of an empty list"));
    }
    let sum: f64 = pairs.iter().map(|(e, t)| (e - t).powi(2)).sum();
    Ok((sum / pairs.len() as f64).sqrt())
}

/// Population standard deviation of the errors `estimate - truth`.
pub fn error_stddev(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(invalid("stddev of an empty list"));
    }
    let n = pairs.len() as f64;
    let mean = pairs.iter().map(|(e, t)| e - t).sum::<f64>() / n;
    let var = pairs
        .iter()
        .map(|(e, t)| (e - t - mean).powi(2))
        .sum::<f64>()
        / n;
    Ok(var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(values: Vec<u32>) -> Signature {
        Signature::new(values, 0)
    }

    #[test]
    fn identical_signatures() {
        let s = sig(vec![1, 2, 3]);
        assert_eq!(estimate_jaccard(&s, &s).unwrap().estimate, 1.0);
    }

    #[test]
    fn half_matching() {
        let a = sig((0..100).collect());
        let b = sig((0..100)
            .map(|i| if i < 50 { i } else { i + 1000 })
            .collect());
        let e = estimate_jaccard(&a, &b).unwrap();
        assert_eq!(e.estimate, 0.5);
        assert_eq!(e.matches, 50);
        assert_eq!(estimate_jaccard(&b, &a).unwrap(), e);
    }

    #[test]
    fn mismatches_rejected() {
        assert!(estimate_jaccard(&sig(vec![1]), &sig(vec![1, 2])).is_err());
        assert!(estimate_jaccard(&sig(vec![1]), &Signature::new(vec![1], 9)).is_err());
    }

    #[test]
    fn exact_values() {
        let a: HashSet<u32> = [1, 2, 3].into();
        let b: HashSet<u32> = [2, 3, 4].into();
        let c: HashSet<u32> = [7].into();
        let e: HashSet<u32> = HashSet::new();
        assert_eq!(exact_jaccard(&a, &b), 0.5);
        assert_eq!(exact_jaccard(&a, &a), 1.0);
        assert_eq!(exact_jaccard(&a, &c), 0.0);
        assert_eq!(exact_jaccard(&e, &e), 0.0);
        assert_eq!(exact_jaccard_sorted(&[1, 2, 3], &[2, 3, 4]), 0.5);
        assert_eq!(exact_jaccard_sorted::<u32>(&[], &[]), 0.0);
    }

    #[test]
    fn rmse_values() {
        assert_eq!(rmse(&[(0.3, 0.3), (0.9, 0.9)]).unwrap(), 0.0);
        assert!((rmse(&[(0.6, 0.5)]).unwrap() - 0.1).abs() < 1e-12);
        assert!(rmse(&[]).is_err());
        assert!((error_stddev(&[(0.6, 0.5), (0.4, 0.5)]).unwrap() - 0.1).abs() < 1e-12);
    }
}
