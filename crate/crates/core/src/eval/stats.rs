use std::collections::BTreeMap;

use statrs::distribution::{ContinuousCDF, StudentsT};

use super::EvalError;

/// Result of a two-tailed paired t-test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TTest {
    pub t: f64,
    pub df: usize,
    pub significant_05: bool,
    pub significant_01: bool,
}

/// Two-tailed critical value of Student's t at level `alpha`.
pub fn t_critical(df: usize, alpha: f64) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("df >= 1");
    dist.inverse_cdf(1.0 - alpha / 2.0)
}

/// Paired t-test over per-fold accuracies. A constant nonzero difference
/// gives an infinite t, which is significant.
pub fn paired_t(a: &[f64], b: &[f64]) -> Result<TTest, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(EvalError::TooFew(2));
    }
    let k = a.len() as f64;
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / k;
    let sd = (d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
    let t = if sd < 1e-15 {
        if mean.abs() < 1e-15 {
            0.0
        } else {
            f64::INFINITY.copysign(mean)
        }
    } else {
        mean / (sd / k.sqrt())
    };
    let df = a.len() - 1;
    Ok(TTest {
        t,
        df,
        significant_05: t.abs() > t_critical(df, 0.05),
        significant_01: t.abs() > t_critical(df, 0.01),
    })
}

/// Cohen's kappa for two parallel codings, with chance agreement from the
/// product of the marginals.
pub fn kappa<T: Ord>(a: &[T], b: &[T]) -> Result<f64, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(EvalError::TooFew(1));
    }
    let n = a.len() as f64;
    let mut ma: BTreeMap<&T, f64> = BTreeMap::new();
    let mut mb: BTreeMap<&T, f64> = BTreeMap::new();
    let mut agree = 0.0;
    for (x, y) in a.iter().zip(b) {
        *ma.entry(x).or_default() += 1.0;
        *mb.entry(y).or_default() += 1.0;
        if x == y {
            agree += 1.0;
        }
    }
    let po = agree / n;
    let pe: f64 = ma.iter().map(|(c, na)| na / n * mb.get(c).copied().unwrap_or(0.0) / n).sum();
    if (1.0 - pe).abs() < 1e-15 {
        return Err(EvalError::DegenerateKappa);
    }
    Ok((po - pe) / (1.0 - pe))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_values_for_24_df() {
        assert!((t_critical(24, 0.05) - 2.064).abs() < 1e-3);
        assert!((t_critical(24, 0.01) - 2.797).abs() < 1e-3);
        assert!((t_critical(1, 0.05) - 12.706).abs() < 1e-3);
    }

    #[test]
    fn paired_t_cases() {
        let a = vec![0.5; 25];
        let t = paired_t(&a, &a).unwrap();
        assert_eq!((t.t, t.df, t.significant_05), (0.0, 24, false));

        let b: Vec<f64> = a.iter().map(|x| x - 0.1).collect();
        let t = paired_t(&a, &b).unwrap();
        assert!(t.t.is_infinite() && t.t > 0.0 && t.significant_01);

        // differences with mean 0.02 and sd 0.04: t = 0.02 / (0.04 / 5) = 2.5
        let mut d = vec![0.06; 12];
        d.extend(vec![-0.02; 12]);
        d.push(0.02);
        let zeros = vec![0.0; 25];
        let t = paired_t(&d, &zeros).unwrap();
        assert!((t.t - 2.5).abs() < 1e-9, "{}", t.t);
        assert!(t.significant_05 && !t.significant_01);

        assert!(paired_t(&[0.1], &[0.2]).is_err());
        assert!(paired_t(&[0.1, 0.2], &[0.2]).is_err());
    }

    #[test]
    fn kappa_cases() {
        assert_eq!(kappa(&[1, 2, 1, 2], &[1, 2, 1, 2]).unwrap(), 1.0);
        assert_eq!(kappa(&[1, 1, 2, 2], &[1, 2, 1, 2]).unwrap(), 0.0);
        // 10 items: 4 yes/yes, 4 no/no, 1 yes/no, 1 no/yes -> po .8, pe .5
        let a = [1, 1, 1, 1, 0, 0, 0, 0, 1, 0];
        let b = [1, 1, 1, 1, 0, 0, 0, 0, 0, 1];
        assert!((kappa(&a, &b).unwrap() - 0.6).abs() < 1e-12);
        assert_eq!(kappa(&[1, 1], &[1, 1]), Err(EvalError::DegenerateKappa));
        assert!(kappa::<u8>(&[], &[]).is_err());
    }
}
