//! Sample summaries for repetition aggregates.

use serde::Serialize;

use crate::scalar::Scalar;

/// Mean with a normal-approximation 95% confidence half-width
/// (`1.96 · s / √count`, `s` the sample standard deviation).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary<T> {
    pub count: usize,
    pub mean: T,
    pub std_dev: T,
    pub ci95: T,
    pub min: T,
    pub max: T,
}

impl<T: Scalar> Summary<T> {
    /// `None` for an empty sample.
    pub fn from_samples(xs: &[T]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        let count = xs.len();
        let c = T::of(count as f64);
        let mean = xs.iter().fold(T::zero(), |a, &x| a + x) / c;
        let std_dev = if count > 1 {
            let ss = xs.iter().fold(T::zero(), |a, &x| a + (x - mean) * (x - mean));
            (ss / T::of((count - 1) as f64)).sqrt()
        } else {
            T::zero()
        };
        Some(Self {
            count,
            mean,
            std_dev,
            ci95: T::of(1.96) * std_dev / c.sqrt(),
            min: xs.iter().copied().fold(T::infinity(), T::min),
            max: xs.iter().copied().fold(T::neg_infinity(), T::max),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_sample() {
        let s = Summary::from_samples(&[2.0f64, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).unwrap();
        assert_eq!(s.mean, 5.0);
        assert!((s.std_dev - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        assert!((s.ci95 - 1.96 * s.std_dev / 8f64.sqrt()).abs() < 1e-12);
        assert_eq!((s.min, s.max, s.count), (2.0, 9.0, 8));
    }

    #[test]
    fn degenerate_samples() {
        assert!(Summary::<f64>::from_samples(&[]).is_none());
        let one = Summary::from_samples(&[3.5f32]).unwrap();
        assert_eq!((one.mean, one.ci95), (3.5, 0.0));
    }
}
