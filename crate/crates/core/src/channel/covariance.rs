use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;

use super::ResourceGrid;
use crate::linalg::{hermitian_defect, CMatrix};
use crate::{Error, Result};

const BUNDLED_TDL_C: &str = include_str!("../../data/tdl_c_300ns.txt");

/// Tolerance on the sum of PDP powers.
pub const PDP_SUM_TOL: f64 = 1e-6;

/// Tapped-delay-line power delay profile; delays in seconds, linear powers
/// summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDelayProfile {
    taps: Vec<(f64, f64)>,
}

impl PowerDelayProfile {
    pub fn new(taps: Vec<(f64, f64)>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::InvalidParameter("power delay profile has no taps".into()));
        }
        if taps.iter().any(|&(d, p)| !(d.is_finite() && d >= 0.0 && p.is_finite() && p >= 0.0)) {
            return Err(Error::InvalidParameter("PDP delays and powers must be finite and nonnegative".into()));
        }
        let total: f64 = taps.iter().map(|t| t.1).sum();
        if (total - 1.0).abs() > PDP_SUM_TOL {
            return Err(Error::InvalidParameter(format!("PDP powers sum to {total}, expected 1")));
        }
        Ok(Self { taps })
    }

    /// Rescales the powers to sum to one before validating.
    pub fn normalized(taps: Vec<(f64, f64)>) -> Result<Self> {
        let total: f64 = taps.iter().map(|t| t.1).sum();
        if !(total > 0.0) {
            return Err(Error::InvalidParameter("PDP has no power".into()));
        }
        Self::new(taps.into_iter().map(|(d, p)| (d, p / total)).collect())
    }

    /// Single tap at zero delay.
    pub fn flat() -> Self {
        Self { taps: vec![(0.0, 1.0)] }
    }

    /// TDL-C scaled to 300 ns RMS delay spread.
    pub fn tdl_c_300ns() -> Self {
        Self::parse(BUNDLED_TDL_C, "<bundled>").expect("bundled PDP is valid")
    }

    /// Text with one `delay_ns power_linear` pair per line; `#` comments.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut taps = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                [d, p] => d.parse::<f64>().ok().zip(p.parse::<f64>().ok()),
                _ => None,
            };
            let (delay_ns, power) = parsed.ok_or_else(|| Error::DataFile {
                path: origin.to_string(),
                reason: format!("line {}: expected `delay_ns power_linear`", lineno + 1),
            })?;
            taps.push((delay_ns * 1e-9, power));
        }
        Self::new(taps).map_err(|e| Error::DataFile {
            path: origin.to_string(),
            reason: e.to_string(),
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn taps(&self) -> &[(f64, f64)] {
        &self.taps
    }

    /// Power-weighted RMS delay spread in seconds.
    pub fn rms_delay_spread(&self) -> f64 {
        let mean: f64 = self.taps.iter().map(|(d, p)| d * p).sum();
        let second: f64 = self.taps.iter().map(|(d, p)| d * d * p).sum();
        (second - mean * mean).max(0.0).sqrt()
    }

    /// Frequency correlation `sum_t p_t exp(-j 2 pi df tau_t)`.
    pub fn frequency_correlation(&self, df: f64) -> Complex64 {
        self.taps
            .iter()
            .map(|&(tau, p)| Complex64::from_polar(p, -2.0 * PI * df * tau))
            .sum()
    }
}

/// Channel covariance over the REs of a grid, pilot-first.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingCovariance {
    r: CMatrix,
    n_pilot: usize,
}

impl FadingCovariance {
    /// Validates Hermitian symmetry (1e-12) and unit diagonal (1e-9).
    pub fn new(r: CMatrix, n_pilot: usize) -> Result<Self> {
        let n = r.nrows();
        if r.ncols() != n || n == 0 || n_pilot > n {
            return Err(Error::InvalidParameter("covariance must be square and cover the pilots".into()));
        }
        if hermitian_defect(&r) > 1e-12 {
            return Err(Error::InvalidParameter("covariance is not Hermitian".into()));
        }
        if (0..n).any(|i| (r[(i, i)] - Complex64::from(1.0)).norm() > 1e-9) {
            return Err(Error::InvalidParameter("covariance diagonal must be 1".into()));
        }
        Ok(Self { r, n_pilot })
    }

    /// All-ones covariance: one complex gain shared by every RE.
    pub fn flat(n: usize, n_pilot: usize) -> Self {
        Self {
            r: CMatrix::from_element(n, n, Complex64::from(1.0)),
            n_pilot,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.r
    }

    pub fn dim(&self) -> usize {
        self.r.nrows()
    }

    pub fn n_pilot(&self) -> usize {
        self.n_pilot
    }

    pub fn n_data(&self) -> usize {
        self.dim() - self.n_pilot
    }

    pub fn pp(&self) -> CMatrix {
        self.r.view((0, 0), (self.n_pilot, self.n_pilot)).into_owned()
    }

    pub fn dp(&self) -> CMatrix {
        self.r.view((self.n_pilot, 0), (self.n_data(), self.n_pilot)).into_owned()
    }

    pub fn pd(&self) -> CMatrix {
        self.r.view((0, self.n_pilot), (self.n_pilot, self.n_data())).into_owned()
    }

    pub fn dd(&self) -> CMatrix {
        self.r.view((self.n_pilot, self.n_pilot), (self.n_data(), self.n_data())).into_owned()
    }

    /// True if every entry is 1 within `tol`.
    pub fn is_flat(&self, tol: f64) -> bool {
        self.r.iter().all(|z| (z - Complex64::from(1.0)).norm() <= tol)
    }
}

fn covariance_from(grid: &ResourceGrid, subcarrier_spacing: f64, corr: impl Fn(f64) -> Complex64) -> FadingCovariance {
    let subs = grid.ordered_subcarriers();
    let n = subs.len();
    let r = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::from(1.0)
        } else {
            corr((subs[i] as f64 - subs[j] as f64) * subcarrier_spacing)
        }
    });
    // exact Hermitian symmetry regardless of rounding in `corr`
    let r = CMatrix::from_fn(n, n, |i, j| if i >= j { r[(i, j)] } else { r[(j, i)].conj() });
    FadingCovariance {
        r,
        n_pilot: grid.n_pilot(),
    }
}

/// `R[i,j] = sum_t p_t exp(-j 2 pi (f_i - f_j) tau_t)`. REs on the same
/// subcarrier are fully correlated (block fading across OFDM symbols).
pub fn build_covariance(pdp: &PowerDelayProfile, subcarrier_spacing: f64, grid: &ResourceGrid) -> Result<FadingCovariance> {
    if !(subcarrier_spacing > 0.0 && subcarrier_spacing.is_finite()) {
        return Err(Error::InvalidParameter("subcarrier spacing must be positive".into()));
    }
    Ok(covariance_from(grid, subcarrier_spacing, |df| pdp.frequency_correlation(df)))
}

/// `sin(pi x) / (pi x)`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - (PI * x).powi(2) / 6.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Covariance of a uniform PDP on `[0, tau]`:
/// `R[i,j] = exp(-j pi df tau) sinc(df tau)`.
pub fn rmmse_covariance(tau: f64, subcarrier_spacing: f64, grid: &ResourceGrid) -> Result<FadingCovariance> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParameter("RMMSE delay span must be positive".into()));
    }
    if !(subcarrier_spacing > 0.0 && subcarrier_spacing.is_finite()) {
        return Err(Error::InvalidParameter("subcarrier spacing must be positive".into()));
    }
    Ok(covariance_from(grid, subcarrier_spacing, |df| {
        let x = df * tau;
        Complex64::from_polar(sinc(x), -PI * x)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_tap_is_flat() {
        let g = ResourceGrid::pucch_f2();
        let c = build_covariance(&PowerDelayProfile::flat(), 30e3, &g).unwrap();
        assert!(c.is_flat(1e-15));
        assert_eq!((c.n_pilot(), c.n_data()), (8, 16));
    }

    #[test]
    fn bundled_tdl_c_profile() {
        let pdp = PowerDelayProfile::tdl_c_300ns();
        assert_eq!(pdp.taps().len(), 24);
        assert!((pdp.rms_delay_spread() - 300e-9).abs() < 1e-10);
        let c = build_covariance(&pdp, 30e3, &ResourceGrid::pucch_f2()).unwrap();
        let validated = FadingCovariance::new(c.matrix().clone(), 8).unwrap();
        assert_eq!(validated, c);
    }

    #[test]
    fn two_tap_direct_sum() {
        // equal taps at 0 and tau with df * tau = 0.5: 0.5 * (1 + e^{-j pi}) = 0
        let df = 30e3;
        let tau = 0.5 / df;
        let pdp = PowerDelayProfile::new(vec![(0.0, 0.5), (tau, 0.5)]).unwrap();
        let g = ResourceGrid::pucch_f2();
        let c = build_covariance(&pdp, df, &g).unwrap();
        let subs = g.ordered_subcarriers();
        // pilot 0 on subcarrier 1, data 0 on subcarrier 0
        assert_eq!((subs[0], subs[8]), (1, 0));
        let direct = 0.5 + 0.5 * Complex64::from_polar(1.0, -2.0 * PI * df * tau);
        assert!((c.matrix()[(0, 8)] - direct).norm() < 1e-15);
        assert!(direct.norm() < 1e-15);
        // same subcarrier, other symbol
        assert!((c.matrix()[(0, 4)] - Complex64::from(1.0)).norm() < 1e-15);
    }

    #[test]
    fn rmmse_properties() {
        let g = ResourceGrid::pucch_f2();
        let df = 30e3;
        let c = rmmse_covariance(1.0 / df, df, &g).unwrap();
        let subs = g.ordered_subcarriers();
        for i in 0..24 {
            assert_eq!(c.matrix()[(i, i)], Complex64::from(1.0));
            for j in 0..24 {
                if subs[i].abs_diff(subs[j]) == 1 {
                    assert!(c.matrix()[(i, j)].norm() < 1e-15);
                }
            }
        }
        let tiny = rmmse_covariance(1e-15, df, &g).unwrap();
        assert!(tiny.is_flat(1e-8));
        assert!(rmmse_covariance(0.0, df, &g).is_err());
    }

    #[test]
    fn unnormalized_pdp_rejected() {
        assert!(PowerDelayProfile::new(vec![(0.0, 0.5), (1e-7, 0.6)]).is_err());
        assert!(PowerDelayProfile::new(vec![(-1e-9, 1.0)]).is_err());
        let n = PowerDelayProfile::normalized(vec![(0.0, 2.0), (1e-7, 2.0)]).unwrap();
        assert_eq!(n.taps()[1].1, 0.5);
        assert!(PowerDelayProfile::parse("0 1\n10", "t").is_err());
        let p = PowerDelayProfile::parse("# c\n0 0.25\n100 0.75 # tail\n", "t").unwrap();
        assert!((p.taps()[1].0 - 100e-9).abs() < 1e-20);
    }
}
