//! Statistics used by the acceptance checks.

use statrs::distribution::{ContinuousCDF, StudentsT};

/// One-sided paired t-test of `H1: mean(after - before) > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairedTest {
    pub n: usize,
    pub mean_diff: f64,
    pub t: f64,
    pub p_value: f64,
}

impl PairedTest {
    pub fn significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// `None` when fewer than two pairs are given or any value is not finite.
pub fn paired_increase(before: &[f64], after: &[f64]) -> Option<PairedTest> {
    assert_eq!(before.len(), after.len(), "samples must be paired");
    let n = before.len();
    if n < 2 || before.iter().chain(after).any(|v| !v.is_finite()) {
        return None;
    }
    let d: Vec<f64> = after.iter().zip(before).map(|(a, b)| a - b).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let (t, p_value) = if var == 0.0 {
        // Constant differences: certain if positive, impossible otherwise.
        let t = if mean > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        (t, if mean > 0.0 { 0.0 } else { 1.0 })
    } else {
        let t = mean / (var / n as f64).sqrt();
        let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("n >= 2");
        (t, 1.0 - dist.cdf(t))
    };
    Some(PairedTest {
        n,
        mean_diff: mean,
        t,
        p_value,
    })
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_example() {
        // d = 1, 2, 3, 4, 5: mean 3, sd 1.5811, t = 4.2426 on 4 df.
        let before = [0.0; 5];
        let after = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = paired_increase(&before, &after).unwrap();
        assert!((r.t - 4.242640687).abs() < 1e-8);
        assert!((r.p_value - 0.0066178).abs() < 1e-6, "{}", r.p_value);
        assert!(r.significant(0.05));
    }

    #[test]
    fn direction_matters() {
        let a = [1.0, 2.0, 3.0, 2.5];
        let b = [2.0, 2.9, 4.2, 3.0];
        assert!(paired_increase(&a, &b).unwrap().significant(0.05));
        assert!(!paired_increase(&b, &a).unwrap().significant(0.05));
    }

    #[test]
    fn degenerate_samples() {
        assert!(paired_increase(&[1.0], &[2.0]).is_none());
        assert!(paired_increase(&[1.0, f64::NAN], &[2.0, 3.0]).is_none());
        assert_eq!(paired_increase(&[1.0, 1.0], &[1.0, 1.0]).unwrap().p_value, 1.0);
        assert_eq!(paired_increase(&[1.0, 1.0], &[2.0, 2.0]).unwrap().p_value, 0.0);
    }
}
