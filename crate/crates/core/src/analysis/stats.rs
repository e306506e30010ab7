use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation.
pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)).sqrt()
}

/// Bootstrap resample `r` of `xs`, drawn from stream `r` of a generator
/// keyed by `seed`.
pub fn resample(xs: &[f64], seed: u64, r: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r);
    let n = xs.len() as u64;
    (0..xs.len()).map(|_| xs[(rng.next_u64() % n) as usize]).collect()
}

/// Standard error of `stat` over `resamples` bootstrap draws.
pub fn bootstrap_se<F>(xs: &[f64], resamples: u64, seed: u64, stat: F) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let vals: Vec<f64> = (0..resamples).map(|r| stat(&resample(xs, seed, r))).collect();
    std_dev(&vals)
}

/// Ordinary least squares `y ≈ X b`; returns coefficients and their
/// standard errors.
pub fn linear_least_squares(x: &[Vec<f64>], y: &[f64], w: Option<&[f64]>) -> Option<(Vec<f64>, Vec<f64>)> {
    use nalgebra::{DMatrix, DVector};
    let n = y.len();
    let k = x.first()?.len();
    if n < k {
        return None;
    }
    let sw = |i: usize| w.map_or(1.0, |w| w[i].sqrt());
    let a = DMatrix::from_fn(n, k, |i, j| x[i][j] * sw(i));
    let b = DVector::from_fn(n, |i, _| y[i] * sw(i));
    let ata = a.transpose() * &a;
    let inv = ata.clone().try_inverse()?;
    let coef = &inv * (a.transpose() * &b);
    let resid = &b - &a * &coef;
    let dof = (n - k).max(1) as f64;
    let s2 = if n > k { resid.norm_squared() / dof } else { 0.0 };
    let se = (0..k).map(|j| (inv[(j, j)] * s2).max(0.0).sqrt()).collect();
    Some((coef.iter().copied().collect(), se))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_moments() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert!((std_dev(&xs) - 1.2909944487358056).abs() < 1e-15);
    }

    #[test]
    fn resample_deterministic() {
        let xs: Vec<f64> = (0..50).map(f64::from).collect();
        assert_eq!(resample(&xs, 1, 2), resample(&xs, 1, 2));
        assert_ne!(resample(&xs, 1, 2), resample(&xs, 1, 3));
    }

    #[test]
    fn exact_line() {
        let x: Vec<Vec<f64>> = (0..5).map(|i| vec![1.0, i as f64]).collect();
        let y: Vec<f64> = (0..5).map(|i| 3.0 - 2.0 * i as f64).collect();
        let (c, se) = linear_least_squares(&x, &y, None).unwrap();
        assert!((c[0] - 3.0).abs() < 1e-12 && (c[1] + 2.0).abs() < 1e-12);
        assert!(se.iter().all(|s| *s < 1e-6));
    }
}
