//! Empirical spectral distributions, theoretical laws, and law-vs-sample
//! distance.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::ensembles::HermitianMatrix;
use crate::error::{Error, Result};

/// Sorted spectrum of an N x N symmetric matrix plus shape metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    eigenvalues: Vec<f64>,
    n: usize,
    t: Option<usize>,
}

impl SpectrumSample {
    pub fn new(mut eigenvalues: Vec<f64>, t: Option<usize>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidDimension("empty spectrum".into()));
        }
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("spectrum"));
        }
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let n = eigenvalues.len();
        Ok(Self { eigenvalues, n, t })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> Option<usize> {
        self.t
    }

    /// Aspect ratio c = N/T when the time dimension is known.
    pub fn ratio(&self) -> Option<f64> {
        self.t.map(|t| self.n as f64 / t as f64)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.n - 1]
    }

    /// First spectral moment (1/N) sum lambda_i.
    pub fn mean(&self) -> f64 {
        self.eigenvalues.iter().sum::<f64>() / self.n as f64
    }
}

/// A real grid with nonnegative density values and its support interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub support: (f64, f64),
    /// Set when the estimate collapsed to a single degenerate bin.
    #[serde(default)]
    pub degenerate: bool,
    /// Total mass clamped away from negative density values.
    #[serde(default)]
    pub clamped_mass: f64,
}

impl DensityEstimate {
    pub fn new(grid: Vec<f64>, density: Vec<f64>, support: (f64, f64)) -> Result<Self> {
        if grid.len() != density.len() || grid.len() < 2 {
            return Err(Error::InvalidDimension(
                "density grid and values must have equal length >= 2".into(),
            ));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidDimension(
                "density grid must be strictly increasing".into(),
            ));
        }
        if density.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::NonFinite("density values"));
        }
        Ok(Self {
            grid,
            density,
            support,
            degenerate: false,
            clamped_mass: 0.0,
        })
    }

    /// Trapezoid mass of the estimate over its grid.
    pub fn mass(&self) -> f64 {
        trapezoid(&self.grid, &self.density)
    }

    /// Trapezoid first moment of the estimate.
    pub fn mean(&self) -> f64 {
        let weighted: Vec<f64> = self
            .grid
            .iter()
            .zip(&self.density)
            .map(|(x, d)| x * d)
            .collect();
        trapezoid(&self.grid, &weighted)
    }
}

pub(crate) fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (y[0] + y[1]) * (x[1] - x[0]))
        .sum()
}

/// A theoretical limiting law. `sigma2 = v` denotes the law of `v * X` for X
/// under the unit law, so supports and densities scale linearly in `v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LawSpec {
    Semicircle { sigma2: f64 },
    Mp { c: f64, sigma2: f64 },
    FreeWishartSum { k: u32, c: f64, sigma2: f64 },
}

impl LawSpec {
    pub fn semicircle() -> Self {
        LawSpec::Semicircle { sigma2: 1.0 }
    }

    pub fn mp(c: f64) -> Result<Self> {
        if !(c > 0.0 && c <= 1.0) {
            return Err(Error::InvalidLaw(format!("mp requires 0 < c <= 1, got {c}")));
        }
        Ok(LawSpec::Mp { c, sigma2: 1.0 })
    }

    pub fn wishart_sum(k: u32, c: f64) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidLaw("wishart sum requires k >= 1".into()));
        }
        if !(c > 0.0 && c <= 1.0) {
            return Err(Error::InvalidLaw(format!(
                "wishart sum requires 0 < c <= 1, got {c}"
            )));
        }
        Ok(LawSpec::FreeWishartSum { k, c, sigma2: 1.0 })
    }

    pub fn with_sigma2(self, sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidLaw(format!("sigma2 must be positive, got {sigma2}")));
        }
        Ok(match self {
            LawSpec::Semicircle { .. } => LawSpec::Semicircle { sigma2 },
            LawSpec::Mp { c, .. } => LawSpec::Mp { c, sigma2 },
            LawSpec::FreeWishartSum { k, c, .. } => LawSpec::FreeWishartSum { k, c, sigma2 },
        })
    }

    pub fn sigma2(&self) -> f64 {
        match *self {
            LawSpec::Semicircle { sigma2 }
            | LawSpec::Mp { sigma2, .. }
            | LawSpec::FreeWishartSum { sigma2, .. } => sigma2,
        }
    }

    /// First moment of the law.
    pub fn mean(&self) -> f64 {
        match *self {
            LawSpec::Semicircle { .. } => 0.0,
            LawSpec::Mp { sigma2, .. } => sigma2,
            LawSpec::FreeWishartSum { k, sigma2, .. } => k as f64 * sigma2,
        }
    }
}

/// Full spectrum of a Hermitian matrix, ascending with multiplicity.
pub fn eigenvalues(m: &HermitianMatrix) -> Result<SpectrumSample> {
    if let Some(spec) = m.as_spectrum() {
        return SpectrumSample::new(spec.to_vec(), m.time_samples());
    }
    let dense = m.as_dense().expect("dense or spectral");
    if dense.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix entries"));
    }
    let eig = dense.clone().symmetric_eigenvalues();
    SpectrumSample::new(eig.iter().copied().collect(), m.time_samples())
}

/// Empirical spectral CDF: the fraction of eigenvalues <= x.
pub fn esd_cdf(s: &SpectrumSample, x: f64) -> f64 {
    // partition_point gives the count of eigenvalues <= x on a sorted slice.
    let count = s.eigenvalues().partition_point(|&l| l <= x);
    count as f64 / s.n() as f64
}

/// Histogram of the spectrum over [min, max], normalized to unit mass, with
/// the grid at bin centers.
pub fn esd_histogram(s: &SpectrumSample, bins: usize) -> Result<DensityEstimate> {
    if bins == 0 {
        return Err(Error::InvalidDimension("bins must be >= 1".into()));
    }
    let (lo, hi) = (s.min(), s.max());
    if hi - lo <= 0.0 {
        // All eigenvalues equal: a single degenerate bin carrying unit mass.
        let h = lo.abs().max(1.0) * 1e-9;
        let mut d = DensityEstimate::new(
            vec![lo - h, lo, lo + h],
            vec![0.0, 1.0 / h, 0.0],
            (lo - h, lo + h),
        )?;
        d.degenerate = true;
        return Ok(d);
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &l in s.eigenvalues() {
        let mut b = ((l - lo) / width) as usize;
        if b >= bins {
            b = bins - 1;
        }
        counts[b] += 1;
    }
    let grid = (0..bins)
        .map(|b| lo + (b as f64 + 0.5) * width)
        .collect::<Vec<_>>();
    let density = counts
        .iter()
        .map(|&c| c as f64 / (s.n() as f64 * width))
        .collect::<Vec<_>>();
    if bins == 1 {
        // A one-point grid cannot carry trapezoid mass; span the bin.
        return DensityEstimate::new(vec![lo, hi], vec![density[0]; 2], (lo, hi));
    }
    DensityEstimate::new(grid, density, (lo, hi))
}

fn unit_density(law: &LawSpec, x: f64) -> f64 {
    match *law {
        LawSpec::Semicircle { .. } => {
            if x.abs() >= 2.0 {
                0.0
            } else {
                (4.0 - x * x).sqrt() / (2.0 * PI)
            }
        }
        LawSpec::Mp { c, .. } => {
            let a1 = (1.0 - c.sqrt()).powi(2);
            let a2 = (1.0 + c.sqrt()).powi(2);
            if x <= a1 || x >= a2 || x <= 0.0 {
                0.0
            } else {
                ((a2 - x) * (x - a1)).sqrt() / (2.0 * PI * c * x)
            }
        }
        LawSpec::FreeWishartSum { k, c, .. } => {
            let k = k as f64;
            let lo = (k.sqrt() - c.sqrt()).powi(2);
            let hi = (k.sqrt() + c.sqrt()).powi(2);
            if x <= lo || x >= hi || x <= 0.0 {
                0.0
            } else {
                ((hi - x) * (x - lo)).sqrt() / (2.0 * PI * c * x)
            }
        }
    }
}

/// Law density at x; zero outside the support.
pub fn law_density(law: &LawSpec, x: f64) -> f64 {
    let v = law.sigma2();
    unit_density(law, x / v) / v
}

/// Closed support interval of the law.
pub fn law_support(law: &LawSpec) -> (f64, f64) {
    let v = law.sigma2();
    let (lo, hi) = match *law {
        LawSpec::Semicircle { .. } => (-2.0, 2.0),
        LawSpec::Mp { c, .. } => ((1.0 - c.sqrt()).powi(2), (1.0 + c.sqrt()).powi(2)),
        LawSpec::FreeWishartSum { k, c, .. } => {
            let k = k as f64;
            ((k.sqrt() - c.sqrt()).powi(2), (k.sqrt() + c.sqrt()).powi(2))
        }
    };
    (v * lo, v * hi)
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson_inner(
    f: &impl Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    whole: f64,
    m: f64,
    fm: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let (left, lm, flm) = simpson(f, a, fa, m, fm);
    let (right, rm, frm) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_simpson_inner(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
        + adaptive_simpson_inner(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature with an absolute tolerance.
pub(crate) fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(&f, a, fa, b, fb);
    adaptive_simpson_inner(&f, a, fa, b, fb, whole, m, fm, tol, 40)
}

/// Integral of the law density over [a, b]. Square-root edge singularities
/// are removed by the substitution x = edge +- u^2 near each support edge.
pub fn law_mass_between(law: &LawSpec, a: f64, b: f64) -> f64 {
    let (lo, hi) = law_support(law);
    let a = a.max(lo);
    let b = b.min(hi);
    if b <= a {
        return 0.0;
    }
    let width = hi - lo;
    let zone = 0.1 * width;
    let tol_per_piece = 1e-10_f64.max(1e-9 * (b - a) / width);
    let mut total = 0.0;

    // Lower edge zone under x = lo + u^2.
    let lo_zone_end = (lo + zone).min(b);
    if a < lo_zone_end {
        let u0 = (a - lo).max(0.0).sqrt();
        let u1 = (lo_zone_end - lo).sqrt();
        total += adaptive_simpson(
            |u| 2.0 * u * law_density(law, lo + u * u),
            u0,
            u1,
            tol_per_piece,
        );
    }

    // Upper edge zone under x = hi - u^2.
    let hi_zone_start = (hi - zone).max(a).max(lo_zone_end);
    if hi_zone_start < b {
        let u0 = (hi - b).max(0.0).sqrt();
        let u1 = (hi - hi_zone_start).sqrt();
        total += adaptive_simpson(
            |u| 2.0 * u * law_density(law, hi - u * u),
            u0,
            u1,
            tol_per_piece,
        );
    }

    // Smooth middle.
    let mid_a = a.max(lo_zone_end.min(hi_zone_start));
    let mid_b = b.min(hi_zone_start);
    if mid_a < mid_b {
        total += adaptive_simpson(|x| law_density(law, x), mid_a, mid_b, tol_per_piece);
    }
    total
}

/// Law CDF H(x) by adaptive quadrature of the density.
pub fn law_cdf(law: &LawSpec, x: f64) -> f64 {
    let (lo, hi) = law_support(law);
    if x <= lo {
        return 0.0;
    }
    if x >= hi {
        return 1.0;
    }
    law_mass_between(law, lo, x).min(1.0)
}

/// k-th moment of the law by quadrature of x^k times the density (with the
/// same edge substitution as the CDF).
pub fn law_moment(law: &LawSpec, k: u32) -> f64 {
    let (lo, hi) = law_support(law);
    let width = hi - lo;
    let zone = 0.1 * width;
    let f = |x: f64| x.powi(k as i32) * law_density(law, x);
    let mut total = adaptive_simpson(
        |u| 2.0 * u * f(lo + u * u),
        0.0,
        zone.sqrt(),
        1e-10,
    );
    total += adaptive_simpson(f, lo + zone, hi - zone, 1e-10);
    total += adaptive_simpson(|u| 2.0 * u * f(hi - u * u), 0.0, zone.sqrt(), 1e-10);
    total
}

/// Kolmogorov distance sup_x |F_emp(x) - H_law(x)|, evaluated at both
/// one-sided limits of every empirical jump plus a uniform law grid.
pub fn kolmogorov_distance(s: &SpectrumSample, law: &LawSpec) -> f64 {
    const LAW_GRID: usize = 512;
    let (lo, hi) = law_support(law);
    let n = s.n() as f64;
    let eigs = s.eigenvalues();

    // Merge eigenvalues and the law grid into one ascending sweep so the CDF
    // quadrature runs incrementally over short segments.
    let mut points: Vec<f64> = eigs.to_vec();
    points.extend((0..=LAW_GRID).map(|i| lo + (hi - lo) * i as f64 / LAW_GRID as f64));
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite"));

    let mut sup: f64 = 0.0;
    let mut h = 0.0;
    let mut prev_x = f64::NEG_INFINITY;
    for &x in &points {
        h = if x <= lo {
            0.0
        } else if x >= hi {
            1.0
        } else if prev_x.is_finite() {
            (h + law_mass_between(law, prev_x, x)).clamp(0.0, 1.0)
        } else {
            law_cdf(law, x)
        };
        prev_x = x;
        // Empirical CDF's right limit at x, and its left limit.
        let right = esd_cdf(s, x);
        let left = eigs.partition_point(|&l| l < x) as f64 / n;
        sup = sup.max((right - h).abs()).max((left - h).abs());
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_lue, HermitianMatrix, MatrixOrigin};
    use nalgebra::DMatrix;

    fn sample(values: &[f64]) -> SpectrumSample {
        SpectrumSample::new(values.to_vec(), None).unwrap()
    }

    #[test]
    fn eigenvalues_of_simple_matrices() {
        let diag = HermitianMatrix::from_dense(
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 3.0]),
            MatrixOrigin::Covariance,
            None,
        )
        .unwrap();
        assert_eq!(eigenvalues(&diag).unwrap().eigenvalues(), &[1.0, 3.0]);

        let offdiag = HermitianMatrix::from_dense(
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
            MatrixOrigin::Covariance,
            None,
        )
        .unwrap();
        let e = eigenvalues(&offdiag).unwrap();
        assert!((e.eigenvalues()[0] + 1.0).abs() < 1e-12);
        assert!((e.eigenvalues()[1] - 1.0).abs() < 1e-12);

        // Characteristic polynomial of [[2,1],[1,2]] gives (1, 3).
        let m = HermitianMatrix::from_dense(
            DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]),
            MatrixOrigin::Covariance,
            None,
        )
        .unwrap();
        let e = eigenvalues(&m).unwrap();
        assert!((e.eigenvalues()[0] - 1.0).abs() < 1e-12);
        assert!((e.eigenvalues()[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn esd_cdf_counts_jumps() {
        let s = sample(&[1.0, 2.0, 3.0]);
        assert_eq!(esd_cdf(&s, 2.0), 2.0 / 3.0);
        assert_eq!(esd_cdf(&s, 0.5), 0.0);
        assert_eq!(esd_cdf(&s, 3.0), 1.0);
        assert_eq!(esd_cdf(&s, 10.0), 1.0);
    }

    #[test]
    fn histogram_counts_and_normalizes() {
        let s = sample(&[0.0, 0.0, 1.0, 1.0]);
        let h = esd_histogram(&s, 2).unwrap();
        assert_eq!(h.grid, vec![0.25, 0.75]);
        assert_eq!(h.density, vec![1.0, 1.0]);
        assert!((h.mass() - 0.5).abs() < 1e-12); // trapezoid over bin centers
    }

    #[test]
    fn histogram_single_bin_has_unit_mass() {
        let s = sample(&[0.0, 0.5, 1.0, 2.0]);
        let h = esd_histogram(&s, 1).unwrap();
        assert!((h.mass() - 1.0).abs() < 1e-9);
        assert!(!h.degenerate);
    }

    #[test]
    fn histogram_of_constant_spectrum_is_degenerate() {
        let s = sample(&[2.0, 2.0, 2.0]);
        let h = esd_histogram(&s, 4).unwrap();
        assert!(h.degenerate);
        assert!((h.mass() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn lue_histogram_tracks_mp_density() {
        let m = sample_lue(1000, 3000, 21).unwrap();
        let s = eigenvalues(&m).unwrap();
        let h = esd_histogram(&s, 50).unwrap();
        let law = LawSpec::mp(1.0 / 3.0).unwrap();
        // Interior bins only: edge bins straddle the support boundary.
        let mut worst: f64 = 0.0;
        for (x, d) in h.grid.iter().zip(&h.density).skip(2).take(46) {
            worst = worst.max((d - law_density(&law, *x)).abs());
        }
        assert!(worst <= 0.1, "sup interior deviation {worst}");
    }

    #[test]
    fn law_density_closed_form_points() {
        let semi = LawSpec::semicircle();
        assert!((law_density(&semi, 0.0) - 1.0 / PI).abs() < 1e-12);
        let mp1 = LawSpec::mp(1.0).unwrap();
        assert!((law_density(&mp1, 2.0) - 1.0 / (2.0 * PI)).abs() < 1e-12);
        let mp3 = LawSpec::mp(1.0 / 3.0).unwrap();
        assert_eq!(law_density(&mp3, 0.1), 0.0); // below a1 = 0.17863
        let fw = LawSpec::wishart_sum(5, 1.0).unwrap();
        assert_eq!(law_density(&fw, 1.0), 0.0); // below (sqrt5 - 1)^2 = 1.5279
    }

    #[test]
    fn law_support_closed_forms() {
        assert_eq!(law_support(&LawSpec::semicircle()), (-2.0, 2.0));
        let (a1, a2) = law_support(&LawSpec::mp(1.0 / 3.0).unwrap());
        assert!((a1 - 0.17863).abs() < 1e-4, "a1 {a1}");
        assert!((a2 - 2.48803).abs() < 1e-4, "a2 {a2}");
        let (lo, hi) = law_support(&LawSpec::wishart_sum(5, 1.0).unwrap());
        assert!((lo - (5f64.sqrt() - 1.0).powi(2)).abs() < 1e-12);
        assert!((hi - (5f64.sqrt() + 1.0).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn sigma2_scales_support_and_density() {
        let law = LawSpec::mp(0.5).unwrap().with_sigma2(2.0).unwrap();
        let (lo, hi) = law_support(&LawSpec::mp(0.5).unwrap());
        assert_eq!(law_support(&law), (2.0 * lo, 2.0 * hi));
        // Mass still integrates to one.
        assert!((law_cdf(&law, 2.0 * hi) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn laws_integrate_to_one() {
        let laws = [
            LawSpec::semicircle(),
            LawSpec::mp(0.1).unwrap(),
            LawSpec::mp(1.0 / 3.0).unwrap(),
            LawSpec::mp(0.5).unwrap(),
            LawSpec::mp(1.0).unwrap(),
            LawSpec::wishart_sum(2, 1.0).unwrap(),
            LawSpec::wishart_sum(5, 1.0).unwrap(),
            LawSpec::wishart_sum(100, 1.0).unwrap(),
        ];
        for law in laws {
            let (lo, hi) = law_support(&law);
            let mass = law_mass_between(&law, lo, hi);
            assert!((mass - 1.0).abs() < 1e-4, "{law:?} mass {mass}");
        }
    }

    #[test]
    fn wishart_sum_with_k1_is_mp() {
        let fw = LawSpec::wishart_sum(1, 0.37).unwrap();
        let mp = LawSpec::mp(0.37).unwrap();
        for i in 0..200 {
            let x = i as f64 * 0.02;
            assert!((law_density(&fw, x) - law_density(&mp, x)).abs() < 1e-12);
        }
    }

    #[test]
    fn kolmogorov_of_quantile_spectrum_is_tiny() {
        // Eigenvalues at the law's (i - 1/2)/n quantiles by bisection.
        let law = LawSpec::mp(0.5).unwrap();
        let (lo, hi) = law_support(&law);
        let n = 64;
        let eigs: Vec<f64> = (0..n)
            .map(|i| {
                let target = (i as f64 + 0.5) / n as f64;
                let (mut a, mut b) = (lo, hi);
                for _ in 0..60 {
                    let m = 0.5 * (a + b);
                    if law_cdf(&law, m) < target {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                0.5 * (a + b)
            })
            .collect();
        let s = SpectrumSample::new(eigs, None).unwrap();
        let d = kolmogorov_distance(&s, &law);
        assert!(d <= 0.5 / n as f64 + 1e-4, "distance {d}");
    }

    #[test]
    fn kolmogorov_of_point_mass_against_semicircle() {
        let s = sample(&[0.0]);
        let d = kolmogorov_distance(&s, &LawSpec::semicircle());
        assert!((d - 0.5).abs() < 1e-6, "distance {d}");
    }

    #[test]
    fn kolmogorov_lue_against_mp_is_small() {
        let mut ds = Vec::new();
        for seed in 0..10 {
            let m = sample_lue(1000, 3000, 100 + seed).unwrap();
            let s = eigenvalues(&m).unwrap();
            ds.push(kolmogorov_distance(&s, &LawSpec::mp(1.0 / 3.0).unwrap()));
        }
        let mean = ds.iter().sum::<f64>() / ds.len() as f64;
        assert!(mean <= 0.02, "mean distance {mean}");
    }

    #[test]
    fn esd_cdf_is_monotone_and_bounded() {
        let m = sample_lue(50, 150, 7).unwrap();
        let s = eigenvalues(&m).unwrap();
        let mut prev = 0.0;
        for i in 0..200 {
            let x = -1.0 + i as f64 * 0.02;
            let f = esd_cdf(&s, x);
            assert!((0.0..=1.0).contains(&f));
            assert!(f >= prev);
            prev = f;
        }
        assert_eq!(esd_cdf(&s, f64::NEG_INFINITY), 0.0);
        assert_eq!(esd_cdf(&s, f64::INFINITY), 1.0);
    }
}
