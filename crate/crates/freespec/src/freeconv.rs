//! The spectral addition algebra: pointwise R-transform addition and
//! scaling, alignment of signatures onto a common w-grid, and full free
//! additive convolution of densities.
//!
//! The convolution pipeline follows the transform chain G -> T -> R, adds
//! R-transforms node-wise, forms T back, and inverts T by a continuation-
//! seeded damped Newton sweep before applying Stieltjes inversion.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{law_density, law_support, DensityEstimate, LawSpec};
use crate::xform::{
    inverse_g, inverse_g_derivative, r_contour, stieltjes, ContourSpec, GSource, RSignature,
};

/// Absolute node-wise tolerance for treating two w-grids as identical.
pub const W_GRID_TOL: f64 = 1e-9;

/// Pointwise sum of R-signatures sharing a common w-grid. The z-nodes of the
/// sum are recomputed as T(w) = R(w) + 1/w.
pub fn r_add(signatures: &[&RSignature]) -> Result<RSignature> {
    if signatures.len() < 2 {
        return Err(Error::MisalignedContour(
            "r_add needs at least two signatures".into(),
        ));
    }
    let first = signatures[0];
    for sig in &signatures[1..] {
        if !first.w_grid_matches(sig, W_GRID_TOL) {
            return Err(Error::MisalignedContour(format!(
                "w-grid of '{}' does not match '{}'",
                sig.source_id, first.source_id
            )));
        }
    }
    let w_nodes = first.w_nodes.clone();
    let mut r_values = vec![Complex64::ZERO; w_nodes.len()];
    for sig in signatures {
        for (acc, r) in r_values.iter_mut().zip(&sig.r_values) {
            *acc += r;
        }
    }
    let z_nodes: Vec<Complex64> = w_nodes
        .iter()
        .zip(&r_values)
        .map(|(w, r)| r + w.inv())
        .collect();
    let source_id = signatures
        .iter()
        .map(|s| s.source_id.as_str())
        .collect::<Vec<_>>()
        .join("+");
    Ok(RSignature {
        z_nodes,
        w_nodes,
        r_values,
        source_id,
        contour: first.contour,
        dropped: first.dropped.clone(),
    })
}

/// Scaling law R_{alpha X}(w) = alpha R_X(alpha w), realized exactly by
/// reparametrizing the sampled grid: the node (w, R) becomes (w / alpha,
/// alpha R), so every new node evaluates alpha R(alpha w') from sampled data
/// with no root-finding.
pub fn r_scale(sig: &RSignature, alpha: f64) -> Result<RSignature> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "scale factor must be positive, got {alpha}"
        )));
    }
    let w_nodes: Vec<Complex64> = sig.w_nodes.iter().map(|w| w / alpha).collect();
    let r_values: Vec<Complex64> = sig.r_values.iter().map(|r| r * alpha).collect();
    let z_nodes: Vec<Complex64> = w_nodes
        .iter()
        .zip(&r_values)
        .map(|(w, r)| r + w.inv())
        .collect();
    Ok(RSignature {
        z_nodes,
        w_nodes,
        r_values,
        source_id: format!("{}*{alpha}", sig.source_id),
        contour: sig.contour,
        dropped: sig.dropped.clone(),
    })
}

/// R-values of a source re-evaluated on a foreign w-grid via inverse_g.
#[derive(Debug, Clone)]
pub struct AlignedR {
    /// Per node: z = G^{-1}(w), when the inversion converged.
    pub z: Vec<Option<Complex64>>,
    /// Per node: R(w) = z - 1/w, when the inversion converged.
    pub r: Vec<Option<Complex64>>,
    pub failures: usize,
}

/// Evaluate R of `source` at each w-node of a foreign grid. Each node tries
/// two Newton seeds, a caller-provided local hint (typically the observed
/// contour point that produced the node) and the continuation from the
/// previous node, and keeps the root with the smaller G-residual. Analytic
/// sources invert exactly and ignore the seeds.
pub fn align_to_w_grid(
    source: &GSource,
    w_nodes: &[Complex64],
    local_hints: Option<&[Complex64]>,
) -> AlignedR {
    let mut z_out = Vec::with_capacity(w_nodes.len());
    let mut r_out = Vec::with_capacity(w_nodes.len());
    let mut failures = 0usize;
    let mut carried: Option<Complex64> = None;
    for (j, &w) in w_nodes.iter().enumerate() {
        let mut best: Option<Complex64> = None;
        // Seed order matters: the local hint and the continuation stay on
        // the branch induced by the observed contour; the free Laurent seed
        // is only a cold-start fallback, since mid-spectrum it can land on a
        // spurious interior root.
        let mut seeds: Vec<Option<Complex64>> = Vec::new();
        if let Some(hints) = local_hints {
            seeds.push(Some(hints[j]));
        }
        if carried.is_some() {
            seeds.push(carried);
        }
        if seeds.is_empty() {
            seeds.push(None);
        }
        let mut best_resid = f64::INFINITY;
        for seed in seeds {
            if let Ok(z) = inverse_g(source, w, seed) {
                let resid = stieltjes(source, z)
                    .map(|g| (g - w).norm())
                    .unwrap_or(f64::INFINITY);
                // Analytic inverses may continue past the principal image;
                // accept them as-is.
                let resid = if matches!(source, GSource::Analytic(_)) {
                    0.0
                } else {
                    resid
                };
                if resid < best_resid {
                    best_resid = resid;
                    best = Some(z);
                }
            }
            if matches!(source, GSource::Analytic(_)) && best.is_some() {
                break;
            }
        }
        match best {
            Some(z) => {
                carried = Some(z);
                z_out.push(Some(z));
                r_out.push(Some(z - w.inv()));
            }
            None => {
                failures += 1;
                z_out.push(None);
                r_out.push(None);
            }
        }
    }
    AlignedR {
        z: z_out,
        r: r_out,
        failures,
    }
}

/// Closed-form density of the free sum of k unit-scale Wishart spectra with
/// ratio c, supported on [(sqrt k - sqrt c)^2, (sqrt k + sqrt c)^2]. This is
/// the reference the convolution pipeline is validated against.
pub fn wishart_sum_reference(k: u32, c: f64, x: f64) -> Result<f64> {
    let law = LawSpec::wishart_sum(k, c)?;
    Ok(law_density(&law, x))
}

/// Support interval of the k-fold Wishart free sum.
pub fn wishart_sum_support(k: u32, c: f64) -> Result<(f64, f64)> {
    let law = LawSpec::wishart_sum(k, c)?;
    Ok(law_support(&law))
}

/// Free additive convolution of two spectral sources. See
/// [`free_convolve_many`].
pub fn free_convolve_density(
    a: &GSource,
    b: &GSource,
    contour: &ContourSpec,
    out_grid: &[f64],
    eps_out: f64,
) -> Result<DensityEstimate> {
    free_convolve_many(&[a.clone(), b.clone()], contour, out_grid, eps_out)
}

/// Free additive convolution of k spectral sources.
///
/// R-transforms are combined on the w-grid induced by the first source's
/// G-image along `contour` (the remaining sources are aligned onto it via
/// inverse_g), giving T_c(w) = sum_i R_i(w) + 1/w. For each output point the
/// equation T_c(w) = x + i eps_out is solved by a damped Newton sweep in w,
/// seeded by analytic continuation along the ascending grid, and the
/// recovered w = G_c(x + i eps_out) is fed through Stieltjes inversion.
pub fn free_convolve_many(
    sources: &[GSource],
    contour: &ContourSpec,
    out_grid: &[f64],
    eps_out: f64,
) -> Result<DensityEstimate> {
    if sources.is_empty() {
        return Err(Error::InvalidConfig("no sources to convolve".into()));
    }
    if out_grid.len() < 2 || out_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidDimension(
            "output grid must be strictly increasing with >= 2 points".into(),
        ));
    }
    if !(eps_out > 0.0 && eps_out.is_finite()) {
        return Err(Error::InvalidContour(format!(
            "eps_out must be positive, got {eps_out}"
        )));
    }

    let k = sources.len();
    let m1_total: f64 = sources.iter().map(GSource::mean).sum();

    // Common w-grid from the first source, with the others aligned onto it.
    // This realizes the R-addition stage and stocks the seed pool for the
    // output sweep.
    let base = r_contour(&sources[0], contour, "a")?;
    let mut aligned: Vec<AlignedR> = Vec::with_capacity(k - 1);
    for src in &sources[1..] {
        aligned.push(align_to_w_grid(src, &base.w_nodes, Some(&base.z_nodes)));
    }
    // T_c at the grid nodes where every source aligned.
    let mut seed_pool: Vec<(Complex64, Complex64, Vec<Complex64>)> = Vec::new();
    for j in 0..base.w_nodes.len() {
        let w = base.w_nodes[j];
        let mut t = base.r_values[j] + w.inv();
        let mut zs = vec![base.z_nodes[j]];
        let mut ok = true;
        for al in &aligned {
            match (al.r[j], al.z[j]) {
                (Some(r), Some(z)) => {
                    t += r;
                    zs.push(z);
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            seed_pool.push((w, t, zs));
        }
    }

    // Residual of T_c(w) - z_out together with dT/dw and the per-source
    // subordination points; `None` when any inner inversion diverges.
    let eval = |w: Complex64,
                z_seeds: &[Complex64],
                z_out: Complex64|
     -> Option<(Complex64, Complex64, Vec<Complex64>)> {
        if w.norm() < 1e-14 {
            return None;
        }
        let mut f = -z_out - (k as f64 - 1.0) * w.inv();
        let mut df = (k as f64 - 1.0) / (w * w);
        let mut zs = Vec::with_capacity(k);
        for (i, src) in sources.iter().enumerate() {
            let z = inverse_g(src, w, z_seeds.get(i).copied()).ok()?;
            f += z;
            df += inverse_g_derivative(src, w, z).ok()?;
            zs.push(z);
        }
        Some((f, df, zs))
    };

    // Damped Newton from one start; accepts only physical roots
    // (Im w <= 0, since G maps the upper half-plane into the lower one).
    let solve_from = |w0: Complex64,
                      zs0: &[Complex64],
                      z_out: Complex64|
     -> Option<(Complex64, Vec<Complex64>)> {
        let (mut w, mut f, mut df, mut zs) = {
            let (f, df, zs) = eval(w0, zs0, z_out)?;
            (w0, f, df, zs)
        };
        let tol = 1e-9 * (1.0 + z_out.norm());
        for _ in 0..100 {
            if f.norm() <= tol {
                break;
            }
            if df.norm() < 1e-300 {
                break;
            }
            let step = f / df;
            let mut scale = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let wn = w - step * scale;
                if let Some((fn_, dfn, zn)) = eval(wn, &zs, z_out) {
                    if fn_.norm() < f.norm() {
                        w = wn;
                        f = fn_;
                        df = dfn;
                        zs = zn;
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
        let loose_tol = 1e-7 * (1.0 + z_out.norm());
        (f.norm() <= loose_tol && w.im <= 0.0).then_some((w, zs))
    };

    let mut density = vec![f64::NAN; out_grid.len()];
    let mut failed = 0usize;
    let mut carry: Option<(Complex64, Vec<Complex64>)> = None;

    for (ix, &x) in out_grid.iter().enumerate() {
        let z_out = Complex64::new(x, eps_out);
        let laurent = {
            let w0 = (z_out - m1_total).inv();
            let zg = w0.inv() + m1_total / k as f64;
            (w0, vec![zg; k])
        };
        let pool_seed = seed_pool.iter().min_by(|a, b| {
            (a.1 - z_out)
                .norm()
                .partial_cmp(&(b.1 - z_out).norm())
                .expect("finite")
        });

        // Continuation first, then the Laurent asymptote, then the nearest
        // contour node from the R-addition stage.
        let mut solution = carry
            .as_ref()
            .and_then(|(w, zs)| solve_from(*w, zs, z_out));
        if solution.is_none() {
            solution = solve_from(laurent.0, &laurent.1, z_out);
        }
        if solution.is_none() {
            if let Some((w, _, zs)) = pool_seed {
                solution = solve_from(*w, zs, z_out);
            }
        }

        match solution {
            Some((w, zs)) => {
                density[ix] = (-w.im / std::f64::consts::PI).max(0.0);
                carry = Some((w, zs));
            }
            None => {
                failed += 1;
                carry = None;
            }
        }
    }

    if failed * 20 > out_grid.len() {
        return Err(Error::ConvolutionFailure {
            failed,
            total: out_grid.len(),
        });
    }

    // Patch isolated failures by linear interpolation; edge failures get 0.
    let patched: Vec<f64> = (0..density.len())
        .map(|i| {
            if density[i].is_finite() {
                return density[i];
            }
            let left = (0..i).rev().find(|&j| density[j].is_finite());
            let right = (i + 1..density.len()).find(|&j| density[j].is_finite());
            match (left, right) {
                (Some(l), Some(r)) => {
                    let t = (out_grid[i] - out_grid[l]) / (out_grid[r] - out_grid[l]);
                    density[l] + t * (density[r] - density[l])
                }
                _ => 0.0,
            }
        })
        .collect();

    DensityEstimate::new(
        out_grid.to_vec(),
        patched,
        (out_grid[0], out_grid[out_grid.len() - 1]),
    )
}
