//! Event signatures, spike counting, residual-based composite-event
//! decomposition, and a synthetic low-rank-signal-plus-noise scene
//! generator.
//!
//! A scene is a sensor panel X = noise plus sum_j amplitude_j
//! (loading_j x profile_j). The loading of a source decays exponentially
//! away from its home node; profiles are a daylight half-sine bump or an
//! AR(1) drift. Profiles are standardized to zero mean and unit variance
//! before the amplitude is applied, so the amplitude fixes the realized
//! signal power regardless of the profile realization.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::ensembles::{covariance, DataMatrix};
use crate::error::{Error, Result};
use crate::freeconv::align_to_w_grid;
use crate::rng;
use crate::spectral::{eigenvalues, SpectrumSample};
use crate::xform::{r_contour, ContourSpec, GSource, RSignature};

/// Eigenvalues this far (relatively) above the M-P bulk edge count as
/// spikes; absorbs finite-N edge fluctuation.
pub const DEFAULT_EDGE_SLACK: f64 = 0.05;

/// A named event: spectrum, R-signature, and spike count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSignature {
    pub id: String,
    pub spectrum: SpectrumSample,
    pub r_signature: RSignature,
    pub spike_count: usize,
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
}

/// Temporal profile of a scene source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SourceProfile {
    /// Daylight bump: max(0, sin(pi (tau - T/4) / (T/2))).
    HalfSine,
    /// First-order autoregressive drift x_tau = phi x_{tau-1} + innovation.
    Ar1 { phi: f64, innovation_sd: f64 },
}

impl SourceProfile {
    pub fn ar1_default() -> Self {
        SourceProfile::Ar1 {
            phi: 0.98,
            innovation_sd: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneSource {
    pub node_index: usize,
    pub profile: SourceProfile,
    pub amplitude: f64,
}

/// Synthetic scene description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneConfig {
    pub n: usize,
    pub t: usize,
    pub sources: Vec<SceneSource>,
    pub noise_sd: f64,
    pub seed: u64,
}

/// Default photovoltaic-like source: half-sine daylight bump on node 11.
pub const SCENE_A_AMPLITUDE: f64 = 2.0;
/// Default wind-like source: AR(1) drift on node 31.
pub const SCENE_B_AMPLITUDE: f64 = 18.0;

impl SceneConfig {
    pub fn noise_only(seed: u64) -> Self {
        Self {
            n: 33,
            t: 1440,
            sources: vec![],
            noise_sd: 1.0,
            seed,
        }
    }

    /// Scene A: one half-sine source on node 11.
    pub fn scene_a(seed: u64) -> Self {
        let mut cfg = Self::noise_only(seed);
        cfg.sources.push(SceneSource {
            node_index: 11,
            profile: SourceProfile::HalfSine,
            amplitude: SCENE_A_AMPLITUDE,
        });
        cfg
    }

    /// Scene B: one AR(1) source on node 31.
    pub fn scene_b(seed: u64) -> Self {
        let mut cfg = Self::noise_only(seed);
        cfg.sources.push(SceneSource {
            node_index: 31,
            profile: SourceProfile::ar1_default(),
            amplitude: SCENE_B_AMPLITUDE,
        });
        cfg
    }

    /// Scene C: the superposition of scenes A and B.
    pub fn scene_c(seed: u64) -> Self {
        let mut cfg = Self::noise_only(seed);
        cfg.sources.push(SceneSource {
            node_index: 11,
            profile: SourceProfile::HalfSine,
            amplitude: SCENE_A_AMPLITUDE,
        });
        cfg.sources.push(SceneSource {
            node_index: 31,
            profile: SourceProfile::ar1_default(),
            amplitude: SCENE_B_AMPLITUDE,
        });
        cfg
    }
}

fn standardize_profile(profile: &mut [f64]) {
    let t = profile.len() as f64;
    let mean = profile.iter().sum::<f64>() / t;
    profile.iter_mut().for_each(|p| *p -= mean);
    let sd = (profile.iter().map(|p| p * p).sum::<f64>() / t).sqrt();
    if sd > 0.0 {
        profile.iter_mut().for_each(|p| *p /= sd);
    }
}

/// Generate the panel of a synthetic scene. Deterministic in the seed: the
/// noise and each source draw from independent substreams, so the same
/// configuration always yields the same panel.
pub fn simulate_scene(cfg: &SceneConfig) -> Result<DataMatrix> {
    if cfg.n < 2 || cfg.t < 2 {
        return Err(Error::InvalidDimension(format!(
            "scene must be at least 2x2, got {}x{}",
            cfg.n, cfg.t
        )));
    }
    if !(cfg.noise_sd > 0.0 && cfg.noise_sd.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "noise_sd must be positive, got {}",
            cfg.noise_sd
        )));
    }
    for src in &cfg.sources {
        if src.node_index >= cfg.n {
            return Err(Error::InvalidConfig(format!(
                "source node {} outside 0..{}",
                src.node_index, cfg.n
            )));
        }
        if !(src.amplitude >= 0.0 && src.amplitude.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "amplitude must be nonnegative, got {}",
                src.amplitude
            )));
        }
    }

    let (n, t) = (cfg.n, cfg.t);
    let mut noise_rng = rng::stream(rng::subseed(cfg.seed, 0));
    let mut x = DMatrix::from_vec(n, t, rng::gaussian_vec(&mut noise_rng, n * t));
    x.scale_mut(cfg.noise_sd);

    for (j, src) in cfg.sources.iter().enumerate() {
        let mut src_rng = rng::stream(rng::subseed(cfg.seed, 1 + j as u64));
        // Spatial loading with exponential decay away from the home node.
        let mut loading: Vec<f64> = (0..n)
            .map(|i| (-((i as f64 - src.node_index as f64).abs()) / 3.0).exp())
            .collect();
        let norm = loading.iter().map(|u| u * u).sum::<f64>().sqrt();
        loading.iter_mut().for_each(|u| *u /= norm);

        let mut profile: Vec<f64> = match src.profile {
            SourceProfile::HalfSine => (0..t)
                .map(|tau| {
                    (PI * (tau as f64 - 0.25 * t as f64) / (0.5 * t as f64))
                        .sin()
                        .max(0.0)
                })
                .collect(),
            SourceProfile::Ar1 {
                phi,
                innovation_sd,
            } => {
                let mut state = 0.0;
                (0..t)
                    .map(|_| {
                        let (g, _) = rng::gaussian_pair(&mut src_rng);
                        state = phi * state + innovation_sd * g;
                        state
                    })
                    .collect()
            }
        };
        standardize_profile(&mut profile);

        for i in 0..n {
            let w = src.amplitude * loading[i];
            if w == 0.0 {
                continue;
            }
            for (tau, p) in profile.iter().enumerate() {
                x[(i, tau)] += w * p;
            }
        }
    }

    let labels = (0..n).map(|i| format!("node_{i}")).collect();
    DataMatrix::new(x)?.with_row_labels(labels)
}

/// Count eigenvalues strictly above sigma2 (1 + sqrt c)^2 (1 + slack).
pub fn count_spikes_with_slack(s: &SpectrumSample, c: f64, sigma2: f64, slack: f64) -> usize {
    let edge = sigma2 * (1.0 + c.sqrt()).powi(2) * (1.0 + slack);
    s.eigenvalues().iter().filter(|&&l| l > edge).count()
}

/// Spike count at the M-P bulk edge with the default slack.
pub fn count_spikes(s: &SpectrumSample, c: f64, sigma2: f64) -> usize {
    count_spikes_with_slack(s, c, sigma2, DEFAULT_EDGE_SLACK)
}

/// Build the event signature of a panel: standardized covariance spectrum,
/// R-signature along `contour`, and spike count at the M-P edge.
pub fn signature(
    data: &DataMatrix,
    contour: &ContourSpec,
    id: impl Into<String>,
) -> Result<EventSignature> {
    if data.n() > data.t() {
        return Err(Error::InvalidRatio {
            n: data.n(),
            t: data.t(),
        });
    }
    let id = id.into();
    let cov = covariance(data, true)?;
    let spectrum = eigenvalues(&cov)?;
    let c = spectrum.ratio().expect("covariance carries t");
    let spike_count = count_spikes(&spectrum, c, 1.0);
    let r_signature = r_contour(&GSource::Empirical(spectrum.clone()), contour, id.clone())?;
    Ok(EventSignature {
        id,
        spectrum,
        r_signature,
        spike_count,
        meta: BTreeMap::new(),
    })
}

/// A contour that brackets the spike band of an observed spectrum: it starts
/// above the noise bulk and extends past the largest eigenvalue, with a thin
/// smoothing band so nearby spikes stay resolved.
pub fn spike_band_contour(s: &SpectrumSample, c: f64) -> Result<ContourSpec> {
    let edge = (1.0 + c.sqrt()).powi(2);
    let x_min = 1.5 * edge;
    let x_max = (1.25 * s.max() + 0.5).max(x_min + 2.0 * edge);
    ContourSpec::new(x_min, x_max, 301, 0.05)
}

/// How node residuals are folded into a score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResidualConvention {
    /// Complex modulus |R_obs - sum R_i| (default).
    Modulus,
    /// Absolute real part only.
    RealPart,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualOptions {
    pub convention: ResidualConvention,
    /// Divide the raw sum by the number of valid nodes. Off by default: the
    /// raw-sum convention matches the scale of the published residuals.
    pub per_node: bool,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self {
            convention: ResidualConvention::Modulus,
            per_node: false,
        }
    }
}

/// Fraction of observed nodes allowed to fail candidate alignment before the
/// score is rejected.
const MAX_ALIGNMENT_FAILURE: f64 = 0.2;

/// Sum over usable nodes of the residual between the observed R and the sum
/// of the candidates' R, with every candidate re-evaluated on the observed
/// w-grid (signatures already on that grid are used verbatim).
pub fn residual_score(
    observed: &RSignature,
    combo: &[&EventSignature],
    opts: ResidualOptions,
) -> Result<f64> {
    if combo.is_empty() {
        return Err(Error::InvalidConfig("empty combination".into()));
    }
    let nodes = observed.len();
    // Per candidate: R at each observed node (None where inversion failed).
    let mut aligned: Vec<Vec<Option<Complex64>>> = Vec::with_capacity(combo.len());
    for sig in combo {
        if sig.r_signature.w_grid_matches(observed, crate::freeconv::W_GRID_TOL) {
            aligned.push(sig.r_signature.r_values.iter().map(|r| Some(*r)).collect());
        } else {
            let src = GSource::Empirical(sig.spectrum.clone());
            let al = align_to_w_grid(&src, &observed.w_nodes, Some(&observed.z_nodes));
            aligned.push(al.r);
        }
    }

    let mut total = 0.0;
    let mut valid = 0usize;
    for j in 0..nodes {
        let mut sum = Complex64::ZERO;
        let mut ok = true;
        for cand in &aligned {
            match cand[j] {
                Some(r) => sum += r,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let diff = observed.r_values[j] - sum;
        total += match opts.convention {
            ResidualConvention::Modulus => diff.norm(),
            ResidualConvention::RealPart => diff.re.abs(),
        };
        valid += 1;
    }

    let failed = nodes - valid;
    if (failed as f64) > MAX_ALIGNMENT_FAILURE * nodes as f64 {
        return Err(Error::MisalignedContour(format!(
            "{failed} of {nodes} nodes failed candidate alignment"
        )));
    }
    Ok(if opts.per_node {
        total / valid as f64
    } else {
        total
    })
}

/// One scored combination: the multiset of library ids and its residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComboScore {
    pub ids: Vec<String>,
    pub residual: f64,
}

/// Ranked candidate decompositions of an observed event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResult {
    /// Ascending by residual; ties broken by the sorted id tuple.
    pub ranked: Vec<ComboScore>,
    /// Second-best residual over best, when at least two combos exist.
    pub winner_margin: Option<f64>,
}

const MAX_COMBOS: u128 = 1_000_000;

fn multiset_count(n: u128, k: u128) -> u128 {
    // C(n + k - 1, k), saturating.
    let top = n + k - 1;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(top - i);
        acc /= i + 1;
        if acc > MAX_COMBOS.saturating_mul(1000) {
            return u128::MAX;
        }
    }
    acc
}

/// Score every multiset of `k` library members against the observed event
/// and rank ascending by residual.
pub fn decompose(
    observed: &EventSignature,
    library: &[EventSignature],
    k: usize,
) -> Result<DecompositionResult> {
    decompose_with_options(observed, library, k, ResidualOptions::default())
}

pub fn decompose_with_options(
    observed: &EventSignature,
    library: &[EventSignature],
    k: usize,
    opts: ResidualOptions,
) -> Result<DecompositionResult> {
    if library.is_empty() {
        return Err(Error::EmptyLibrary);
    }
    if k == 0 {
        return Err(Error::InvalidConfig("k must be >= 1".into()));
    }
    let count = multiset_count(library.len() as u128, k as u128);
    if count > MAX_COMBOS {
        return Err(Error::TooManyCombos {
            count,
            max: MAX_COMBOS,
        });
    }

    // Enumerate nondecreasing index tuples (combinations with repetition).
    let mut indices = vec![0usize; k];
    let mut scored: Vec<ComboScore> = Vec::with_capacity(count as usize);
    loop {
        let combo: Vec<&EventSignature> = indices.iter().map(|&i| &library[i]).collect();
        let residual = residual_score(&observed.r_signature, &combo, opts)?;
        let mut ids: Vec<String> = combo.iter().map(|s| s.id.clone()).collect();
        ids.sort();
        scored.push(ComboScore { ids, residual });

        // Advance: bump the rightmost index that has room, reset the tail.
        let Some(pos) = (0..k).rev().find(|&p| indices[p] + 1 < library.len()) else {
            break;
        };
        let next = indices[pos] + 1;
        for slot in indices.iter_mut().skip(pos) {
            *slot = next;
        }
    }

    scored.sort_by(|a, b| {
        a.residual
            .partial_cmp(&b.residual)
            .expect("finite residuals")
            .then_with(|| a.ids.cmp(&b.ids))
    });
    let winner_margin = if scored.len() >= 2 {
        let first = scored[0].residual;
        let second = scored[1].residual;
        Some(if first > 0.0 {
            second / first
        } else if second > 0.0 {
            f64::INFINITY
        } else {
            1.0
        })
    } else {
        None
    };
    Ok(DecompositionResult {
        ranked: scored,
        winner_margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freeconv::r_add;
    use crate::spectral::{kolmogorov_distance, LawSpec};

    #[test]
    fn scenes_are_deterministic() {
        let a = simulate_scene(&SceneConfig::scene_c(11)).unwrap();
        let b = simulate_scene(&SceneConfig::scene_c(11)).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn scene_dimensions_and_labels() {
        let x = simulate_scene(&SceneConfig::noise_only(0)).unwrap();
        assert_eq!((x.n(), x.t()), (33, 1440));
        assert_eq!(x.row_labels().unwrap().len(), 33);
    }

    #[test]
    fn scene_rejects_bad_node_index() {
        let mut cfg = SceneConfig::noise_only(0);
        cfg.sources.push(SceneSource {
            node_index: 40,
            profile: SourceProfile::HalfSine,
            amplitude: 1.0,
        });
        assert!(matches!(simulate_scene(&cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn pure_noise_panel_tracks_the_mp_law() {
        let x = simulate_scene(&SceneConfig::noise_only(3)).unwrap();
        let cov = covariance(&x, true).unwrap();
        let s = eigenvalues(&cov).unwrap();
        let law = LawSpec::mp(33.0 / 1440.0).unwrap();
        let d = kolmogorov_distance(&s, &law);
        assert!(d <= 0.06, "KS distance {d}");
    }

    #[test]
    fn pure_noise_scenes_rarely_show_spikes() {
        let mut clean = 0;
        for seed in 0..50u64 {
            let x = simulate_scene(&SceneConfig::noise_only(seed)).unwrap();
            let sig = signature(&x, &ContourSpec::default(), "noise").unwrap();
            if sig.spike_count == 0 {
                clean += 1;
            }
        }
        assert!(clean >= 48, "spike-free in only {clean}/50 seeds");
    }

    #[test]
    fn count_spikes_examples() {
        let s = SpectrumSample::new(vec![0.5, 1.0, 3.5], None).unwrap();
        assert_eq!(count_spikes(&s, 1.0 / 3.0, 1.0), 1);
        let inside = SpectrumSample::new(vec![0.5, 1.0, 1.5], None).unwrap();
        assert_eq!(count_spikes(&inside, 1.0 / 3.0, 1.0), 0);
        let above = SpectrumSample::new(vec![3.0, 3.5, 4.0], None).unwrap();
        assert_eq!(count_spikes(&above, 1.0 / 3.0, 1.0), 3);
    }

    #[test]
    fn scene_signatures_count_their_sources() {
        for seed in 0..3 {
            let xa = simulate_scene(&SceneConfig::scene_a(seed)).unwrap();
            let sa = signature(&xa, &ContourSpec::default(), "A").unwrap();
            assert_eq!(sa.spike_count, 1, "scene A seed {seed}");

            let xb = simulate_scene(&SceneConfig::scene_b(seed)).unwrap();
            let sb = signature(&xb, &ContourSpec::default(), "B").unwrap();
            assert_eq!(sb.spike_count, 1, "scene B seed {seed}");

            let xc = simulate_scene(&SceneConfig::scene_c(seed)).unwrap();
            let sc = signature(&xc, &ContourSpec::default(), "C").unwrap();
            assert_eq!(sc.spike_count, 2, "scene C seed {seed}");
        }
    }

    #[test]
    fn signature_rejects_wide_panels() {
        let x = DataMatrix::from_rows(&[
            vec![1.0, 2.0],
            vec![0.5, 1.5],
            vec![2.0, 0.1],
        ])
        .unwrap();
        assert!(matches!(
            signature(&x, &ContourSpec::default(), "x"),
            Err(Error::InvalidRatio { .. })
        ));
    }

    #[test]
    fn exact_superposition_scores_zero() {
        let xa = simulate_scene(&SceneConfig::scene_a(5)).unwrap();
        let xb = simulate_scene(&SceneConfig::scene_b(5)).unwrap();
        let contour = ContourSpec::default();
        let siga = signature(&xa, &contour, "A").unwrap();
        let mut sigb = signature(&xb, &contour, "B").unwrap();
        // Re-grid B's signature onto A's w-grid so the sum is exact.
        let src_b = GSource::Empirical(sigb.spectrum.clone());
        let al = align_to_w_grid(
            &src_b,
            &siga.r_signature.w_nodes,
            Some(&siga.r_signature.z_nodes),
        );
        assert_eq!(al.failures, 0);
        sigb.r_signature = RSignature {
            z_nodes: al.z.iter().map(|z| z.unwrap()).collect(),
            w_nodes: siga.r_signature.w_nodes.clone(),
            r_values: al.r.iter().map(|r| r.unwrap()).collect(),
            source_id: "B".into(),
            contour,
            dropped: vec![],
        };
        let observed = r_add(&[&siga.r_signature, &sigb.r_signature]).unwrap();
        let score =
            residual_score(&observed, &[&siga, &sigb], ResidualOptions::default()).unwrap();
        assert!(score <= 1e-9, "score {score}");
    }

    #[test]
    fn decompose_single_member_library() {
        let xa = simulate_scene(&SceneConfig::scene_a(7)).unwrap();
        let sig = signature(&xa, &ContourSpec::default(), "A").unwrap();
        let result = decompose(&sig, std::slice::from_ref(&sig), 2).unwrap();
        assert_eq!(result.ranked.len(), 1);
        assert_eq!(result.ranked[0].ids, vec!["A", "A"]);
        assert!(result.winner_margin.is_none());
    }

    #[test]
    fn decompose_rejects_empty_library_and_huge_k() {
        let xa = simulate_scene(&SceneConfig::scene_a(7)).unwrap();
        let sig = signature(&xa, &ContourSpec::default(), "A").unwrap();
        assert!(matches!(decompose(&sig, &[], 2), Err(Error::EmptyLibrary)));
        let library: Vec<EventSignature> = (0..20)
            .map(|i| {
                let mut s = sig.clone();
                s.id = format!("lib{i}");
                s
            })
            .collect();
        assert!(matches!(
            decompose(&sig, &library, 12),
            Err(Error::TooManyCombos { .. })
        ));
    }

    #[test]
    fn residuals_are_permutation_invariant() {
        let xa = simulate_scene(&SceneConfig::scene_a(9)).unwrap();
        let xb = simulate_scene(&SceneConfig::scene_b(9)).unwrap();
        let xc = simulate_scene(&SceneConfig::scene_c(9)).unwrap();
        let contour = ContourSpec::default();
        let siga = signature(&xa, &contour, "A").unwrap();
        let sigb = signature(&xb, &contour, "B").unwrap();
        let sigc = signature(&xc, &contour, "C").unwrap();
        let opts = ResidualOptions::default();
        let ab = residual_score(&sigc.r_signature, &[&siga, &sigb], opts).unwrap();
        let ba = residual_score(&sigc.r_signature, &[&sigb, &siga], opts).unwrap();
        assert!((ab - ba).abs() < 1e-9);

        let r1 = decompose(&sigc, &[siga.clone(), sigb.clone()], 2).unwrap();
        let r2 = decompose(&sigc, &[sigb, siga], 2).unwrap();
        let ids1: Vec<_> = r1.ranked.iter().map(|c| c.ids.clone()).collect();
        let ids2: Vec<_> = r2.ranked.iter().map(|c| c.ids.clone()).collect();
        assert_eq!(ids1, ids2);
    }
}
