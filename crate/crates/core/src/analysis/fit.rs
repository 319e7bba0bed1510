use crate::scalar::Scalar;

/// Ordinary least squares `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit<S> {
    pub slope: S,
    pub intercept: S,
    /// Coefficient of determination. `1` when the data have no spread and the
    /// fit is exact.
    pub r_squared: S,
}

pub fn least_squares<S: Scalar>(xs: &[S], ys: &[S]) -> LinearFit<S> {
    assert_eq!(xs.len(), ys.len(), "fit needs paired samples");
    let n = S::from_count(xs.len().max(1));
    let mean_x = xs.iter().fold(S::zero(), |a, &x| a + x) / n;
    let mean_y = ys.iter().fold(S::zero(), |a, &y| a + y) / n;
    let (mut sxx, mut sxy) = (S::zero(), S::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        sxx = sxx + (x - mean_x) * (x - mean_x);
        sxy = sxy + (x - mean_x) * (y - mean_y);
    }
    let slope = if sxx > S::zero() { sxy / sxx } else { S::zero() };
    let intercept = mean_y - slope * mean_x;
    let (mut ss_res, mut ss_tot) = (S::zero(), S::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - (intercept + slope * x);
        ss_res = ss_res + r * r;
        ss_tot = ss_tot + (y - mean_y) * (y - mean_y);
    }
    let r_squared = if ss_tot > S::zero() {
        S::one() - ss_res / ss_tot
    } else if ss_res > S::zero() {
        S::zero()
    } else {
        S::one()
    };
    LinearFit {
        slope,
        intercept,
        r_squared,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_line() {
        let f = least_squares(&[1.0, 2.0, 3.0, 4.0], &[3.0, 5.0, 7.0, 9.0]);
        assert_relative_eq!(f.slope, 2.0);
        assert_relative_eq!(f.intercept, 1.0);
        assert_relative_eq!(f.r_squared, 1.0);
    }

    #[test]
    fn noisy_line() {
        // numpy.polyfit: slope 0.8, intercept 0.3, R² 0.64
        let f = least_squares(&[0.0, 1.0, 2.0, 3.0], &[0.0, 2.0, 1.0, 3.0]);
        assert_relative_eq!(f.slope, 0.8, epsilon = 1e-12);
        assert_relative_eq!(f.intercept, 0.3, epsilon = 1e-12);
        assert_relative_eq!(f.r_squared, 0.64, epsilon = 1e-12);
    }

    #[test]
    fn flat_data() {
        let f = least_squares(&[5.0], &[0.0]);
        assert_eq!(f.slope, 0.0);
        assert_eq!(f.r_squared, 1.0);
    }
}
