use anyhow::{anyhow, Context};
use freespec::{
    covariance, decompose_with_options, eigenvalues, esd_histogram, free_convolve_many,
    law_density, law_support, r_contour, sample_gue, sample_lue, signature, simulate_scene,
    spike_band_contour, wishart_sum_support, ContourSpec, DensityEstimate,
    EventSignature, GSource, HermitianMatrix, LawSpec, ResidualConvention, ResidualOptions,
    SceneConfig, SpectrumSample,
};
use serde::Serialize;
use std::path::Path;

use crate::args::{
    ConvolveArgs, DecomposeArgs, EsdArgs, LawArgs, LawKind, OutputFormat, SignatureArgs,
    SimulateArgs, TransformArgs,
};
use crate::io;

fn resolve_law(args: &LawArgs) -> anyhow::Result<Option<LawSpec>> {
    let Some(kind) = args.law else {
        return Ok(None);
    };
    let law = match kind {
        LawKind::Semicircle => LawSpec::semicircle(),
        LawKind::Mp => {
            let c = args
                .c
                .ok_or_else(|| freespec::Error::InvalidLaw("mp needs --c".into()))?;
            LawSpec::mp(c)?
        }
        LawKind::FreeWishartSum => {
            let c = args
                .c
                .ok_or_else(|| freespec::Error::InvalidLaw("free-wishart-sum needs --c".into()))?;
            let k = args
                .k
                .ok_or_else(|| freespec::Error::InvalidLaw("free-wishart-sum needs --k".into()))?;
            LawSpec::wishart_sum(k, c)?
        }
    };
    Ok(Some(law.with_sigma2(args.sigma2)?))
}

fn format_for(path: &Path, requested: Option<OutputFormat>) -> OutputFormat {
    requested.unwrap_or_else(|| {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => OutputFormat::Csv,
            _ => OutputFormat::Json,
        }
    })
}

/// Sample a matrix whose spectrum follows the law: GUE for the semicircle,
/// LUE for M-P, and a sum of independent LUEs for the Wishart sum. The
/// sigma2 scale multiplies the sampled matrix.
fn sample_law_matrix(
    law: &LawSpec,
    n: usize,
    t: Option<usize>,
    seed: u64,
) -> anyhow::Result<HermitianMatrix> {
    match *law {
        LawSpec::Semicircle { .. } => Ok(sample_gue(n, seed)?),
        LawSpec::Mp { c, .. } => {
            let t = t.unwrap_or_else(|| (n as f64 / c).round() as usize);
            Ok(sample_lue(n, t, seed)?)
        }
        LawSpec::FreeWishartSum { k, c, .. } => {
            let t = t.unwrap_or_else(|| (n as f64 / c).round() as usize);
            let mut acc: Option<HermitianMatrix> = None;
            for i in 0..k {
                let term = sample_lue(n, t, seed.wrapping_add(0x9e37_79b9 * (i as u64 + 1)))?;
                acc = Some(match acc {
                    None => term,
                    Some(sum) => sum.try_add(&term)?,
                });
            }
            Ok(acc.expect("k >= 1"))
        }
    }
}

fn scaled_spectrum(m: &HermitianMatrix, sigma2: f64) -> anyhow::Result<SpectrumSample> {
    let s = eigenvalues(m)?;
    if (sigma2 - 1.0).abs() < 1e-15 {
        return Ok(s);
    }
    Ok(SpectrumSample::new(
        s.eigenvalues().iter().map(|l| l * sigma2).collect(),
        s.t(),
    )?)
}

#[derive(Serialize)]
struct EsdReport {
    seed: Option<u64>,
    n: usize,
    bins: usize,
    grid: Vec<f64>,
    density: Vec<f64>,
    support: (f64, f64),
    degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    overlay: Option<Vec<f64>>,
}

pub fn cmd_esd(args: &EsdArgs) -> anyhow::Result<()> {
    let law = resolve_law(&args.law)?;
    let spectrum = if let Some(input) = &args.input {
        let panel = io::read_panel(input)?;
        let cov = covariance(&panel, args.standardize)?;
        eigenvalues(&cov)?
    } else {
        let law = law.ok_or_else(|| {
            freespec::Error::InvalidConfig("esd needs --input or --law".into())
        })?;
        let n = args.n.ok_or_else(|| {
            freespec::Error::InvalidConfig("sampling a law needs --n".into())
        })?;
        let m = sample_law_matrix(&law, n, args.t, args.seed.unwrap_or(0))?;
        scaled_spectrum(&m, law.sigma2())?
    };

    let hist = esd_histogram(&spectrum, args.bins)?;
    let overlay = if args.overlay {
        let law = law.ok_or_else(|| {
            freespec::Error::InvalidConfig("--overlay needs --law".into())
        })?;
        Some(hist.grid.iter().map(|&x| law_density(&law, x)).collect())
    } else {
        None
    };

    match format_for(&args.out, args.format) {
        OutputFormat::Json => io::write_json(
            &args.out,
            &EsdReport {
                seed: args.seed,
                n: spectrum.n(),
                bins: args.bins,
                grid: hist.grid.clone(),
                density: hist.density.clone(),
                support: hist.support,
                degenerate: hist.degenerate,
                overlay,
            },
        )?,
        OutputFormat::Csv => {
            let mut columns = vec!["x", "density"];
            let mut rows: Vec<Vec<f64>> = hist
                .grid
                .iter()
                .zip(&hist.density)
                .map(|(x, d)| vec![*x, *d])
                .collect();
            if let Some(ov) = &overlay {
                columns.push("overlay");
                for (row, o) in rows.iter_mut().zip(ov) {
                    row.push(*o);
                }
            }
            io::write_csv(&args.out, &columns, &rows)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct TransformRow {
    x: f64,
    eps: f64,
    re_g: f64,
    im_g: f64,
    re_w: f64,
    im_w: f64,
    re_r: f64,
    im_r: f64,
}

#[derive(Serialize)]
struct TransformReport {
    source: String,
    contour: ContourSpec,
    rows: Vec<TransformRow>,
}

pub fn cmd_transform(args: &TransformArgs) -> anyhow::Result<()> {
    let contour = ContourSpec::new(
        args.contour.xmin,
        args.contour.xmax,
        args.contour.nodes,
        args.contour.eps,
    )?;
    let law = resolve_law(&args.law)?;
    let (source, label) = if let Some(input) = &args.input {
        let panel = io::read_panel(input)?;
        let cov = covariance(&panel, args.standardize)?;
        (
            GSource::Empirical(eigenvalues(&cov)?),
            input.display().to_string(),
        )
    } else {
        let law = law.ok_or_else(|| {
            freespec::Error::InvalidConfig("transform needs --input or --law".into())
        })?;
        if args.empirical {
            let n = args.n.ok_or_else(|| {
                freespec::Error::InvalidConfig("--empirical needs --n".into())
            })?;
            let m = sample_law_matrix(&law, n, args.t, args.seed.unwrap_or(0))?;
            (
                GSource::Empirical(scaled_spectrum(&m, law.sigma2())?),
                format!("{law:?} (sampled)"),
            )
        } else {
            (GSource::Analytic(law), format!("{law:?}"))
        }
    };

    let sig = r_contour(&source, &contour, label.clone())?;
    let rows: Vec<TransformRow> = sig
        .z_nodes
        .iter()
        .zip(sig.w_nodes.iter().zip(&sig.r_values))
        .map(|(z, (w, r))| TransformRow {
            x: z.re,
            eps: z.im,
            re_g: w.re,
            im_g: w.im,
            re_w: w.re,
            im_w: w.im,
            re_r: r.re,
            im_r: r.im,
        })
        .collect();

    match format_for(&args.out, args.format) {
        OutputFormat::Json => io::write_json(
            &args.out,
            &TransformReport {
                source: label,
                contour,
                rows,
            },
        )?,
        OutputFormat::Csv => {
            let columns = [
                "x", "eps", "re_g", "im_g", "re_w", "im_w", "re_r", "im_r",
            ];
            let data: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| {
                    vec![r.x, r.eps, r.re_g, r.im_g, r.re_w, r.im_w, r.re_r, r.im_r]
                })
                .collect();
            io::write_csv(&args.out, &columns, &data)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ConvolveReport {
    sources: usize,
    seed: Option<u64>,
    eps_out: f64,
    grid: Vec<f64>,
    density: Vec<f64>,
    mass: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    overlay: Option<Vec<f64>>,
    /// Sup |density - overlay| on the interior 90% of the reference support.
    #[serde(skip_serializing_if = "Option::is_none")]
    sup_error_interior: Option<f64>,
}

pub fn cmd_convolve(args: &ConvolveArgs) -> anyhow::Result<()> {
    let contour = ContourSpec::new(
        args.contour.xmin,
        args.contour.xmax,
        args.contour.nodes,
        args.contour.eps,
    )?;
    let seed = args.seed.unwrap_or(0);

    let (sources, reference): (Vec<GSource>, Option<LawSpec>) = if args.wishart_sum {
        let law = LawSpec::wishart_sum(args.k, args.c)?;
        let t = (args.n as f64 / args.c).round() as usize;
        let mut sources = Vec::with_capacity(args.k as usize);
        for i in 0..args.k {
            let m = sample_lue(args.n, t, seed.wrapping_add(0x9e37_79b9 * (i as u64 + 1)))?;
            sources.push(GSource::Empirical(eigenvalues(&m)?));
        }
        (sources, Some(law))
    } else {
        if args.input.len() < 2 {
            return Err(freespec::Error::InvalidConfig(
                "convolve needs --wishart-sum or at least two --input panels".into(),
            )
            .into());
        }
        let mut sources = Vec::with_capacity(args.input.len());
        for path in &args.input {
            let panel = io::read_panel(path)?;
            let cov = covariance(&panel, args.standardize)?;
            sources.push(GSource::Empirical(eigenvalues(&cov)?));
        }
        (sources, None)
    };

    // Output grid over the expected support, widened by 5% on each side.
    let (lo, hi) = match &reference {
        Some(law) => law_support(law),
        None => {
            let lo: f64 = sources
                .iter()
                .map(|s| match s {
                    GSource::Empirical(sp) => sp.min(),
                    _ => 0.0,
                })
                .sum();
            let hi: f64 = sources
                .iter()
                .map(|s| match s {
                    GSource::Empirical(sp) => sp.max(),
                    _ => 0.0,
                })
                .sum();
            (lo, hi)
        }
    };
    let width = hi - lo;
    let (glo, ghi) = (lo - 0.05 * width, hi + 0.05 * width);
    let grid: Vec<f64> = (0..args.grid_points)
        .map(|i| glo + (ghi - glo) * i as f64 / (args.grid_points - 1) as f64)
        .collect();
    let eps_out = args.eps_out.unwrap_or(0.01 * width);

    let density: DensityEstimate = free_convolve_many(&sources, &contour, &grid, eps_out)?;

    let (overlay, sup_error) = if args.overlay {
        let law = reference.ok_or_else(|| {
            freespec::Error::InvalidConfig("--overlay requires --wishart-sum".into())
        })?;
        let overlay: Vec<f64> = grid.iter().map(|&x| law_density(&law, x)).collect();
        let (slo, shi) = wishart_sum_support(args.k, args.c)?;
        let margin = 0.05 * (shi - slo);
        let sup = grid
            .iter()
            .zip(density.density.iter().zip(&overlay))
            .filter(|(x, _)| **x >= slo + margin && **x <= shi - margin)
            .map(|(_, (d, o))| (d - o).abs())
            .fold(0.0f64, f64::max);
        (Some(overlay), Some(sup))
    } else {
        (None, None)
    };

    match format_for(&args.out, args.format) {
        OutputFormat::Json => io::write_json(
            &args.out,
            &ConvolveReport {
                sources: sources.len(),
                seed: args.seed,
                eps_out,
                mass: density.mass(),
                grid: density.grid.clone(),
                density: density.density.clone(),
                overlay,
                sup_error_interior: sup_error,
            },
        )?,
        OutputFormat::Csv => {
            let mut columns = vec!["x", "density"];
            let mut rows: Vec<Vec<f64>> = density
                .grid
                .iter()
                .zip(&density.density)
                .map(|(x, d)| vec![*x, *d])
                .collect();
            if let Some(ov) = &overlay {
                columns.push("overlay");
                for (row, o) in rows.iter_mut().zip(ov) {
                    row.push(*o);
                }
            }
            io::write_csv(&args.out, &columns, &rows)?;
        }
    }
    Ok(())
}

pub fn cmd_simulate(args: &SimulateArgs) -> anyhow::Result<()> {
    let seed = args.seed.unwrap_or(0);
    let mut cfg = match args.scene.to_ascii_lowercase().as_str() {
        "noise" => SceneConfig::noise_only(seed),
        "a" => SceneConfig::scene_a(seed),
        "b" => SceneConfig::scene_b(seed),
        "c" => SceneConfig::scene_c(seed),
        other => {
            return Err(freespec::Error::InvalidConfig(format!(
                "unknown scene '{other}' (expected noise, A, B, or C)"
            ))
            .into())
        }
    };
    if let Some(n) = args.n {
        cfg.n = n;
        for src in &mut cfg.sources {
            src.node_index = src.node_index.min(n.saturating_sub(1));
        }
    }
    if let Some(t) = args.t {
        cfg.t = t;
    }
    if let Some(sd) = args.noise_sd {
        cfg.noise_sd = sd;
    }
    let panel = simulate_scene(&cfg)?;
    io::write_panel(&args.out, &panel)?;
    Ok(())
}

fn contour_for_panel(
    spectrum: &SpectrumSample,
    contour: &crate::args::ContourArgs,
    spike_band: bool,
) -> anyhow::Result<ContourSpec> {
    if spike_band {
        let c = spectrum
            .ratio()
            .ok_or_else(|| anyhow!("spectrum lacks a time dimension"))?;
        Ok(spike_band_contour(spectrum, c)?)
    } else {
        Ok(ContourSpec::new(
            contour.xmin,
            contour.xmax,
            contour.nodes,
            contour.eps,
        )?)
    }
}

fn signature_from_panel(
    path: &Path,
    id: Option<String>,
    contour: &crate::args::ContourArgs,
    spike_band: bool,
) -> anyhow::Result<EventSignature> {
    let panel = io::read_panel(path)?;
    let id = id.unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "event".into())
    });
    let cov = covariance(&panel, true)?;
    let spectrum = eigenvalues(&cov)?;
    let contour = contour_for_panel(&spectrum, contour, spike_band)?;
    Ok(signature(&panel, &contour, id)?)
}

pub fn cmd_signature(args: &SignatureArgs) -> anyhow::Result<()> {
    let sig = signature_from_panel(&args.input, args.id.clone(), &args.contour, args.spike_band)?;
    io::write_json(&args.out, &sig)?;
    Ok(())
}

fn load_signature(
    path: &Path,
    contour: &crate::args::ContourArgs,
    spike_band: bool,
) -> anyhow::Result<EventSignature> {
    if path.extension().and_then(|e| e.to_str()) == Some("json") {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot open {}", path.display()))?;
        let sig: EventSignature = serde_json::from_str(&text)
            .map_err(|e| io::UnreadableInput(anyhow!("{}: {e}", path.display())))?;
        Ok(sig)
    } else {
        signature_from_panel(path, None, contour, spike_band)
    }
}

pub fn cmd_decompose(args: &DecomposeArgs) -> anyhow::Result<()> {
    let observed = load_signature(&args.observed, &args.contour, args.spike_band)?;
    let mut library = Vec::with_capacity(args.library.len());
    for path in &args.library {
        library.push(load_signature(path, &args.contour, args.spike_band)?);
    }
    let opts = ResidualOptions {
        convention: if args.real_part {
            ResidualConvention::RealPart
        } else {
            ResidualConvention::Modulus
        },
        per_node: args.per_node,
    };
    let result = decompose_with_options(&observed, &library, args.k, opts)?;
    io::write_json(&args.out, &result)?;
    if let Some(best) = result.ranked.first() {
        eprintln!(
            "winner: [{}] residual {:.4} margin {}",
            best.ids.join(", "),
            best.residual,
            result
                .winner_margin
                .map(|m| format!("{m:.3}"))
                .unwrap_or_else(|| "n/a".into())
        );
    }
    Ok(())
}
