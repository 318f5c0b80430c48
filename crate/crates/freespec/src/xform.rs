//! Stieltjes transform, Stieltjes inversion, moments and cumulants, the
//! functional inverse of G, and the R-transform.
//!
//! Every transform works against a [`GSource`]: an empirical spectrum, a
//! tabulated density, or a closed-form law. Branches are fixed by the
//! requirement G(z) ~ 1/z at infinity, equivalently Im G(z) < 0 for
//! Im z > 0.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::{trapezoid, DensityEstimate, LawSpec, SpectrumSample};

/// Source of a Stieltjes transform.
#[derive(Debug, Clone, PartialEq)]
pub enum GSource {
    Empirical(SpectrumSample),
    Density(DensityEstimate),
    Analytic(LawSpec),
}

impl GSource {
    /// First moment of the underlying measure, used to seed inversions.
    pub fn mean(&self) -> f64 {
        match self {
            GSource::Empirical(s) => s.mean(),
            GSource::Density(d) => {
                let mass = d.mass();
                if mass > 0.0 {
                    d.mean() / mass
                } else {
                    0.0
                }
            }
            GSource::Analytic(law) => law.mean(),
        }
    }
}

/// An evaluation band z = x + i eps, x in [x_min, x_max].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nodes: usize,
    pub eps: f64,
}

impl ContourSpec {
    pub const MIN_NODES: usize = 8;

    pub fn new(x_min: f64, x_max: f64, nodes: usize, eps: f64) -> Result<Self> {
        if x_min >= x_max {
            return Err(Error::InvalidContour(format!(
                "x_min {x_min} must be below x_max {x_max}"
            )));
        }
        if nodes < Self::MIN_NODES {
            return Err(Error::InvalidContour(format!(
                "at least {} nodes required, got {nodes}",
                Self::MIN_NODES
            )));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidContour(format!("eps must be positive, got {eps}")));
        }
        Ok(Self {
            x_min,
            x_max,
            nodes,
            eps,
        })
    }

    /// Real parts of the contour nodes, ascending.
    pub fn xs(&self) -> Vec<f64> {
        let n = self.nodes;
        (0..n)
            .map(|j| self.x_min + (self.x_max - self.x_min) * j as f64 / (n - 1) as f64)
            .collect()
    }
}

impl Default for ContourSpec {
    /// The evaluation band used throughout: x in [-3, 3], 241 nodes,
    /// eps = 0.1.
    fn default() -> Self {
        Self {
            x_min: -3.0,
            x_max: 3.0,
            nodes: 241,
            eps: 0.1,
        }
    }
}

/// Complex samples of G along a contour and R along the induced w-grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RSignature {
    pub z_nodes: Vec<Complex64>,
    pub w_nodes: Vec<Complex64>,
    pub r_values: Vec<Complex64>,
    pub source_id: String,
    pub contour: ContourSpec,
    /// Contour node indices dropped because |w| fell below 1e-12.
    #[serde(default)]
    pub dropped: Vec<usize>,
}

impl RSignature {
    pub fn len(&self) -> usize {
        self.w_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w_nodes.is_empty()
    }

    /// Node-wise agreement of two w-grids within an absolute tolerance.
    pub fn w_grid_matches(&self, other: &RSignature, tol: f64) -> bool {
        self.len() == other.len()
            && self
                .w_nodes
                .iter()
                .zip(&other.w_nodes)
                .all(|(a, b)| (a - b).norm() <= tol)
    }
}

// ---------------------------------------------------------------------------
// Stieltjes transforms
// ---------------------------------------------------------------------------

/// Normalized resolvent trace (1/N) sum 1/(z - lambda_i).
pub fn stieltjes_empirical(s: &SpectrumSample, z: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::ZERO;
    for &l in s.eigenvalues() {
        let d = z - l;
        if d.norm() < 1e-12 {
            return Err(Error::Pole { z });
        }
        acc += d.inv();
    }
    Ok(acc / s.n() as f64)
}

fn stieltjes_empirical_derivative(s: &SpectrumSample, z: Complex64) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for &l in s.eigenvalues() {
        let d = (z - l).inv();
        acc -= d * d;
    }
    acc / s.n() as f64
}

/// Trapezoid quadrature of rho(s) / (z - s) over the density grid.
pub fn stieltjes_from_density(d: &DensityEstimate, z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re >= d.support.0 && z.re <= d.support.1 {
        return Err(Error::PrincipalValue {
            lo: d.support.0,
            hi: d.support.1,
        });
    }
    let vals: Vec<Complex64> = d
        .grid
        .iter()
        .zip(&d.density)
        .map(|(&s, &rho)| rho / (z - s))
        .collect();
    Ok(trapezoid_complex(&d.grid, &vals))
}

fn stieltjes_density_derivative(d: &DensityEstimate, z: Complex64) -> Complex64 {
    let vals: Vec<Complex64> = d
        .grid
        .iter()
        .zip(&d.density)
        .map(|(&s, &rho)| {
            let inv = (z - s).inv();
            -rho * inv * inv
        })
        .collect();
    trapezoid_complex(&d.grid, &vals)
}

fn trapezoid_complex(xs: &[f64], ys: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for i in 1..xs.len() {
        acc += 0.5 * (ys[i - 1] + ys[i]) * (xs[i] - xs[i - 1]);
    }
    acc
}

/// Branch-disciplined square root of (z - a)(z - b): principal square roots
/// of the factors, which is analytic off the cut [a, b] and behaves like z at
/// infinity.
fn edge_sqrt(z: Complex64, a: f64, b: f64) -> Complex64 {
    (z - a).sqrt() * (z - b).sqrt()
}

fn semicircle_g_unit(z: Complex64) -> Complex64 {
    (z - edge_sqrt(z, -2.0, 2.0)) / 2.0
}

fn mp_g_unit(c: f64, z: Complex64) -> Result<Complex64> {
    if z.norm() < 1e-300 {
        return Err(Error::Pole { z });
    }
    let a1 = (1.0 - c.sqrt()).powi(2);
    let a2 = (1.0 + c.sqrt()).powi(2);
    Ok((z + c - 1.0 - edge_sqrt(z, a1, a2)) / (2.0 * c * z))
}

/// Closed-form Stieltjes transform for the semicircle and M-P laws, on the
/// branch with G(z) ~ 1/z at infinity. The lower half-plane is served by
/// conjugate symmetry. Sum-of-Wisharts laws have no closed form here; they
/// are reached through the convolution pipeline.
pub fn stieltjes_analytic(law: &LawSpec, z: Complex64) -> Result<Complex64> {
    if z.im < 0.0 {
        return Ok(stieltjes_analytic(law, z.conj())?.conj());
    }
    let v = law.sigma2();
    let zu = z / v;
    let unit = match *law {
        LawSpec::Semicircle { .. } => semicircle_g_unit(zu),
        LawSpec::Mp { c, .. } => mp_g_unit(c, zu)?,
        LawSpec::FreeWishartSum { .. } => return Err(Error::UnsupportedAnalytic),
    };
    Ok(unit / v)
}

fn stieltjes_analytic_derivative(law: &LawSpec, z: Complex64) -> Result<Complex64> {
    if z.im < 0.0 {
        return Ok(stieltjes_analytic_derivative(law, z.conj())?.conj());
    }
    let v = law.sigma2();
    let zu = z / v;
    let unit = match *law {
        LawSpec::Semicircle { .. } => {
            let w = edge_sqrt(zu, -2.0, 2.0);
            (Complex64::ONE - zu / w) / 2.0
        }
        LawSpec::Mp { c, .. } => {
            let a1 = (1.0 - c.sqrt()).powi(2);
            let a2 = (1.0 + c.sqrt()).powi(2);
            let w = edge_sqrt(zu, a1, a2);
            let dw = (2.0 * zu - a1 - a2) / (2.0 * w);
            let g = mp_g_unit(c, zu)?;
            ((Complex64::ONE - dw) - 2.0 * c * g) / (2.0 * c * zu)
        }
        LawSpec::FreeWishartSum { .. } => return Err(Error::UnsupportedAnalytic),
    };
    Ok(unit / (v * v))
}

/// G(z) for any source.
pub fn stieltjes(g: &GSource, z: Complex64) -> Result<Complex64> {
    match g {
        GSource::Empirical(s) => stieltjes_empirical(s, z),
        GSource::Density(d) => stieltjes_from_density(d, z),
        GSource::Analytic(law) => stieltjes_analytic(law, z),
    }
}

/// dG/dz for any source.
pub fn stieltjes_derivative(g: &GSource, z: Complex64) -> Result<Complex64> {
    match g {
        GSource::Empirical(s) => Ok(stieltjes_empirical_derivative(s, z)),
        GSource::Density(d) => Ok(stieltjes_density_derivative(d, z)),
        GSource::Analytic(law) => stieltjes_analytic_derivative(law, z),
    }
}

/// Recover a density on `grid` from G via rho(x) = -Im G(x + i eps) / pi,
/// clamping negative values at zero and recording the clamped mass.
pub fn invert_stieltjes_density(g: &GSource, grid: &[f64], eps: f64) -> Result<DensityEstimate> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidContour(format!("eps must be positive, got {eps}")));
    }
    if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidDimension(
            "inversion grid must be strictly increasing with >= 2 points".into(),
        ));
    }
    let mut density = Vec::with_capacity(grid.len());
    let mut raw = Vec::with_capacity(grid.len());
    for &x in grid {
        let gz = stieltjes(g, Complex64::new(x, eps))?;
        let rho = -gz.im / PI;
        raw.push(rho.min(0.0).abs());
        density.push(rho.max(0.0));
    }
    let clamped = trapezoid(grid, &raw);
    let mut est = DensityEstimate::new(grid.to_vec(), density, (grid[0], grid[grid.len() - 1]))?;
    est.clamped_mass = clamped;
    Ok(est)
}

// ---------------------------------------------------------------------------
// Moments and cumulants
// ---------------------------------------------------------------------------

/// Normalized spectral moments m_k = (1/N) sum lambda_i^k for k = 1..=kmax.
pub fn moments(s: &SpectrumSample, kmax: usize) -> Vec<f64> {
    let n = s.n() as f64;
    let mut acc = vec![0.0; kmax];
    for &l in s.eigenvalues() {
        let mut p = 1.0;
        for slot in acc.iter_mut() {
            p *= l;
            *slot += p;
        }
    }
    acc.iter_mut().for_each(|v| *v /= n);
    acc
}

/// Truncated convolution powers of the moment sequence: out[s][t] is the sum
/// over compositions i_1 + ... + i_s = t of m_{i_1} ... m_{i_s}, with m_0 = 1.
fn composition_sums(m: &[f64], kmax: usize) -> Vec<Vec<f64>> {
    let mut padded = vec![1.0];
    padded.extend_from_slice(m);
    // Orders beyond the provided moments are never read by callers; zero-pad
    // so every row can be built to kmax.
    padded.resize(kmax + 1, 0.0);
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); kmax + 1];
    rows[0] = {
        let mut r = vec![0.0; kmax + 1];
        r[0] = 1.0;
        r
    };
    for s in 1..=kmax {
        let mut r = vec![0.0; kmax + 1];
        for t in 0..=kmax {
            let mut acc = 0.0;
            for i in 0..=t {
                acc += rows[s - 1][t - i] * padded[i];
            }
            r[t] = acc;
        }
        rows[s] = r;
    }
    rows
}

/// Free cumulants from moments, by matching coefficients order by order in
/// the functional relation between the moment and cumulant series
/// (equivalently: moments decompose over non-crossing partitions).
pub fn free_cumulants(m: &[f64]) -> Vec<f64> {
    let kmax = m.len();
    let comp = composition_sums(m, kmax);
    let mut kappa = vec![0.0; kmax];
    for n in 1..=kmax {
        let mut rest = 0.0;
        for s in 1..n {
            rest += kappa[s - 1] * comp[s][n - s];
        }
        kappa[n - 1] = m[n - 1] - rest;
    }
    kappa
}

/// Forward map: moments from free cumulants, order by order.
pub fn free_cumulants_to_moments(kappa: &[f64]) -> Vec<f64> {
    let kmax = kappa.len();
    let mut m = vec![0.0; kmax];
    for n in 1..=kmax {
        // composition sums over the moments known so far (orders < n).
        let comp = composition_sums(&m[..n - 1], n);
        let mut acc = 0.0;
        for s in 1..=n {
            acc += kappa[s - 1] * comp[s][n - s];
        }
        m[n - 1] = acc;
    }
    m
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Classical cumulants from moments, inverting the all-set-partition (Bell
/// polynomial) relation m_n = sum_k C(n-1, k-1) kappa_k m_{n-k}.
pub fn classical_cumulants(m: &[f64]) -> Vec<f64> {
    let kmax = m.len();
    let mut kappa = vec![0.0; kmax];
    for n in 1..=kmax {
        let mut rest = 0.0;
        for k in 1..n {
            let m_tail = if n - k == 0 { 1.0 } else { m[n - k - 1] };
            rest += binomial(n - 1, k - 1) * kappa[k - 1] * m_tail;
        }
        kappa[n - 1] = m[n - 1] - rest;
    }
    kappa
}

/// Forward map: moments from classical cumulants.
pub fn classical_cumulants_to_moments(kappa: &[f64]) -> Vec<f64> {
    let kmax = kappa.len();
    let mut m = vec![0.0; kmax];
    for n in 1..=kmax {
        let mut acc = 0.0;
        for k in 1..=n {
            let m_tail = if n - k == 0 { 1.0 } else { m[n - k - 1] };
            acc += binomial(n - 1, k - 1) * kappa[k - 1] * m_tail;
        }
        m[n - 1] = acc;
    }
    m
}

// ---------------------------------------------------------------------------
// Functional inverse and R-transform
// ---------------------------------------------------------------------------

const NEWTON_MAX_ITER: usize = 200;
const NEWTON_MAX_HALVINGS: usize = 30;

fn newton_tol(w: Complex64) -> f64 {
    1e-10 * (1.0 + w.norm())
}

fn inverse_g_newton(g: &GSource, w: Complex64, start: Complex64) -> Result<Complex64> {
    let mut z = start;
    let mut resid = match stieltjes(g, z) {
        Ok(v) => (v - w).norm(),
        Err(_) => f64::INFINITY,
    };
    let tol = newton_tol(w);
    for _ in 0..NEWTON_MAX_ITER {
        if resid <= tol {
            return Ok(z);
        }
        let gz = stieltjes(g, z)?;
        let dg = stieltjes_derivative(g, z)?;
        if dg.norm() < 1e-300 {
            return Err(Error::InversionFailure {
                last: z,
                residual: resid,
            });
        }
        let step = (gz - w) / dg;
        let mut scale = 1.0;
        let mut improved = false;
        for _ in 0..NEWTON_MAX_HALVINGS {
            let zn = z - step * scale;
            if let Ok(v) = stieltjes(g, zn) {
                let rn = (v - w).norm();
                if rn < resid {
                    z = zn;
                    resid = rn;
                    improved = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if resid <= tol {
        Ok(z)
    } else {
        Err(Error::InversionFailure {
            last: z,
            residual: resid,
        })
    }
}

/// Exact algebraic inverse of the closed-form G for the semicircle and M-P
/// laws. Both satisfy a quadratic in G, so z is a rational function of w and
/// the inverse extends analytically past the principal image of G.
fn inverse_g_analytic(law: &LawSpec, w: Complex64) -> Result<Complex64> {
    let v = law.sigma2();
    let wu = w * v;
    if wu.norm() < 1e-300 {
        return Err(Error::Pole { z: w });
    }
    let unit = match *law {
        LawSpec::Semicircle { .. } => wu + wu.inv(),
        LawSpec::Mp { c, .. } => ((c - 1.0) * wu - 1.0) / (wu * (c * wu - 1.0)),
        LawSpec::FreeWishartSum { .. } => return Err(Error::UnsupportedAnalytic),
    };
    Ok(unit * v)
}

/// dz/dw of the inverse at (w, z).
pub(crate) fn inverse_g_derivative(g: &GSource, w: Complex64, z: Complex64) -> Result<Complex64> {
    match g {
        GSource::Analytic(law) => {
            let v = law.sigma2();
            let wu = w * v;
            let unit = match *law {
                LawSpec::Semicircle { .. } => Complex64::ONE - (wu * wu).inv(),
                LawSpec::Mp { c, .. } => {
                    let den = wu * (c * wu - 1.0);
                    let num = (c - 1.0) * wu - 1.0;
                    let dden = 2.0 * c * wu - 1.0;
                    ((c - 1.0) * den - num * dden) / (den * den)
                }
                LawSpec::FreeWishartSum { .. } => return Err(Error::UnsupportedAnalytic),
            };
            Ok(unit * v * v)
        }
        _ => {
            let dg = stieltjes_derivative(g, z)?;
            if dg.norm() < 1e-300 {
                return Err(Error::InversionFailure {
                    last: z,
                    residual: f64::INFINITY,
                });
            }
            Ok(dg.inv())
        }
    }
}

/// Functional inverse z = G^{-1}(w). Analytic laws use their exact algebraic
/// inverse; empirical and density sources run a damped Newton iteration on
/// G(z) - w, seeded by `guess` or by the Laurent asymptote 1/w + m_1.
pub fn inverse_g(g: &GSource, w: Complex64, guess: Option<Complex64>) -> Result<Complex64> {
    if w.norm() < 1e-300 {
        return Err(Error::Pole { z: w });
    }
    if let GSource::Analytic(law) = g {
        return inverse_g_analytic(law, w);
    }
    let start = guess.unwrap_or_else(|| w.inv() + g.mean());
    inverse_g_newton(g, w, start)
}

/// R(w) = G^{-1}(w) - 1/w.
pub fn r_transform(g: &GSource, w: Complex64) -> Result<Complex64> {
    if w.norm() < 1e-300 {
        return Err(Error::Pole { z: w });
    }
    Ok(inverse_g(g, w, None)? - w.inv())
}

/// R(w) with an explicit seed for the inner inversion.
pub fn r_transform_seeded(g: &GSource, w: Complex64, guess: Complex64) -> Result<Complex64> {
    if w.norm() < 1e-300 {
        return Err(Error::Pole { z: w });
    }
    Ok(inverse_g(g, w, Some(guess))? - w.inv())
}

/// Evaluate the signature of a source along a contour: z_j = x_j + i eps,
/// w_j = G(z_j), R(w_j) = z_j - 1/w_j. Nodes whose |w| falls below 1e-12 are
/// dropped and flagged.
pub fn r_contour(g: &GSource, contour: &ContourSpec, source_id: impl Into<String>) -> Result<RSignature> {
    let eps = contour.eps;
    let mut z_nodes = Vec::with_capacity(contour.nodes);
    let mut w_nodes = Vec::with_capacity(contour.nodes);
    let mut r_values = Vec::with_capacity(contour.nodes);
    let mut dropped = Vec::new();
    for (j, x) in contour.xs().into_iter().enumerate() {
        let z = Complex64::new(x, eps);
        let w = stieltjes(g, z)?;
        if w.norm() < 1e-12 {
            dropped.push(j);
            continue;
        }
        z_nodes.push(z);
        w_nodes.push(w);
        r_values.push(z - w.inv());
    }
    if w_nodes.len() < ContourSpec::MIN_NODES {
        return Err(Error::InvalidContour(format!(
            "only {} usable nodes remain on the contour",
            w_nodes.len()
        )));
    }
    Ok(RSignature {
        z_nodes,
        w_nodes,
        r_values,
        source_id: source_id.into(),
        contour: *contour,
        dropped,
    })
}
