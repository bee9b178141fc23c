//! Eigenvalue counting, plunge region, deviation from the area and `A_Ω`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::operator::Spectrum;

/// Relative width of the band around `δ` whose eigenvalues count as `≤ δ`.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Counting data of one spectrum at one threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingReport {
    pub delta: f64,
    pub count: usize,
    pub deviation: f64,
    /// Plunge count at `min(δ, 1 − δ)`.
    pub plunge: usize,
    pub a_omega: u64,
    pub tau: f64,
}

impl CountingReport {
    pub const CSV_HEADER: &'static str = "delta,count,deviation,plunge,a_omega,tau";

    pub fn compute(spec: &Spectrum, dom: &Domain, delta: f64) -> Result<Self> {
        let count = counting(spec, delta)?;
        let e = delta.min(1.0 - delta);
        let plunge = count_above(spec.values(), e) - count_above(spec.values(), 1.0 - e);
        Ok(CountingReport {
            delta,
            count,
            deviation: (count as f64 - dom.measure()).abs(),
            plunge,
            a_omega: a_omega(dom),
            tau: tau(delta)?,
        })
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{},{:.16e},{},{},{:.16e}",
            self.delta, self.count, self.deviation, self.plunge, self.a_omega, self.tau
        )
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("threshold must lie in (0, 1), got {delta}")))
    }
}

/// `#{λ > δ}` on a decreasing list.
pub(crate) fn count_above(values: &[f64], delta: f64) -> usize {
    let cut = delta * (1.0 + TIE_TOLERANCE);
    values.partition_point(|&v| v > cut)
}

/// `τ = max(1/δ, 1/(1 − δ))`.
pub fn tau(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok((1.0 / delta).max(1.0 / (1.0 - delta)))
}

/// Number of eigenvalues strictly above `δ`, with multiplicity.
pub fn counting(spec: &Spectrum, delta: f64) -> Result<usize> {
    check_delta(delta)?;
    Ok(count_above(spec.values(), delta))
}

/// `#{δ < λ ≤ 1 − δ}`.
pub fn plunge(spec: &Spectrum, delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Domain(format!("plunge threshold must lie in (0, 1/2), got {delta}")));
    }
    Ok(count_above(spec.values(), delta) - count_above(spec.values(), 1.0 - delta))
}

/// `|#{λ > δ} − |Ω||`.
pub fn deviation(spec: &Spectrum, dom: &Domain, delta: f64) -> Result<f64> {
    Ok((counting(spec, delta)? as f64 - dom.measure()).abs())
}

/// Smallest integer `≥ |Ω|`, ignoring round-off above an integer.
pub fn a_omega(dom: &Domain) -> u64 {
    let m = dom.measure();
    (m - 1e-12 * m.max(1.0)).ceil().max(0.0) as u64
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::special::reg_lower_gamma;

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::from_values(v.to_vec(), v.len()).unwrap()
    }

    #[test]
    fn counting_examples() {
        assert_eq!(counting(&spec(&[1.0, 1.0, 0.0]), 0.5).unwrap(), 2);
        let s = spec(&[0.9, 0.5, 0.1]);
        assert_eq!(counting(&s, 0.9).unwrap(), 0);
        assert_eq!(counting(&s, 0.95).unwrap(), 0);
        // ties count as below the threshold
        assert_eq!(counting(&s, 0.5).unwrap(), 1);
        assert!(counting(&s, 0.0).is_err());
        assert!(counting(&s, 1.0).is_err());
    }

    #[test]
    fn counting_matches_enumeration_on_disk() {
        let x = 4.0 * PI;
        let vals: Vec<f64> = (0..200).map(|k| reg_lower_gamma(k as f64 + 1.0, x).unwrap()).collect();
        let s = spec(&vals);
        let brute = vals.iter().filter(|&&v| v > 0.5).count();
        assert_eq!(counting(&s, 0.5).unwrap(), brute);
        let d = Domain::disk([0.0, 0.0], 2.0).unwrap();
        assert!((deviation(&s, &d, 0.5).unwrap() - (brute as f64 - x).abs()).abs() < 1e-12);
    }

    #[test]
    fn plunge_examples() {
        assert_eq!(plunge(&spec(&[1.0, 1.0, 0.0, 0.0]), 0.1).unwrap(), 0);
        assert_eq!(plunge(&spec(&[0.9, 0.5, 0.1]), 0.2).unwrap(), 1);
        // the upper endpoint is closed
        assert_eq!(plunge(&spec(&[0.8, 0.5]), 0.2).unwrap(), 2);
        assert!(plunge(&spec(&[0.5]), 0.5).is_err());
    }

    #[test]
    fn deviation_and_a_omega() {
        let empty = Spectrum::from_values(vec![], 0).unwrap();
        assert_eq!(deviation(&empty, &Domain::empty(), 0.3).unwrap(), 0.0);
        assert_eq!(a_omega(&Domain::disk([0.0, 0.0], 2.0).unwrap()), 13);
        assert_eq!(a_omega(&Domain::unit_square()), 1);
        assert_eq!(a_omega(&Domain::empty()), 0);
        let nine = Domain::dilated(Domain::unit_square(), 3.0).unwrap();
        assert_eq!(a_omega(&nine), 9);
    }

    #[test]
    fn deviation_jumps_only_at_eigenvalues() {
        let s = spec(&[0.8, 0.6, 0.3]);
        let d = Domain::unit_square();
        let grid: Vec<f64> = (1..1000).map(|i| i as f64 / 1000.0).collect();
        for w in grid.windows(2) {
            let (a, b) = (w[0], w[1]);
            let jump = deviation(&s, &d, a).unwrap() != deviation(&s, &d, b).unwrap();
            let straddles = s.values().iter().any(|&l| a < l && l <= b);
            assert_eq!(jump, straddles, "{a}..{b}");
        }
    }

    #[test]
    fn report_row() {
        let s = spec(&[0.9, 0.5, 0.1]);
        let r = CountingReport::compute(&s, &Domain::unit_square(), 0.8).unwrap();
        assert_eq!((r.count, r.plunge, r.a_omega), (1, 1, 1));
        assert!((r.tau - 5.0).abs() < 1e-12);
        assert_eq!(r.csv_row().split(',').count(), CountingReport::CSV_HEADER.split(',').count());
    }
}
