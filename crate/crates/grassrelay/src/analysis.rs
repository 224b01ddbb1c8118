//! Closed-form SNR-loss bounds for quantized beamforming, the scalar
//! inequalities behind them, and the statistical helpers used to verify
//! distribution claims (Kolmogorov-Smirnov machinery, paired
//! Monte-Carlo loss estimators).

use rand::Rng;

use crate::channels::{sample_channel_set, LinkGains, SystemDims};
use crate::codebooks::Codebook;
use crate::numerics::{sample_complex_gaussian_matrix, svd, CMatrix, CVector, RngStream};
use crate::schemes::{
    optimal_no_direct, optimal_with_direct, properly_quantized_with_direct, quantized_no_direct,
    DirectLinkKnowledge,
};
use crate::{Error, Result};

/// Fraction of the sphere left uncovered by `size` disjoint caps of
/// chordal radius `delta/2` in `C^dim`:
/// `1 - N (delta/2)^{2(dim-1)} (1 - delta/2)`. This is the distortion
/// factor shared by the two-hop and direct-link loss bounds.
pub fn packing_shortfall(size: usize, delta: f64, dim: usize) -> f64 {
    1.0 - size as f64 * (delta / 2.0).powi(2 * (dim as i32 - 1)) * (1.0 - delta / 2.0)
}

fn check_packing_args(size: usize, delta: f64, dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!(
            "loss bound needs dimension > 1, got {dim}"
        )));
    }
    if size < 2 {
        return Err(Error::InvalidParameter(format!(
            "loss bound needs at least 2 codewords, got {size}"
        )));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "minimum distance must lie in (0, 1], got {delta}"
        )));
    }
    Ok(())
}

/// Average SNR-loss bound for a single quantized beamforming hop:
/// `P E{sigma1^2} (1 - N (delta/2)^{2(dim-1)} (1 - delta^2/4))`.
///
/// Note the quadratic cap factor `1 - delta^2/4`; the multi-hop bounds
/// below use the linear factor `1 - delta/2`. Both forms are kept
/// exactly as stated.
pub fn bound_single_hop(
    gain: f64,
    dim: usize,
    size: usize,
    delta: f64,
    expected_top_singular_sq: f64,
) -> Result<f64> {
    check_packing_args(size, delta, dim)?;
    let shortfall =
        1.0 - size as f64 * (delta / 2.0).powi(2 * (dim as i32 - 1)) * (1.0 - delta * delta / 4.0);
    Ok(gain * expected_top_singular_sq * shortfall)
}

/// Average total SNR-loss bound for the quantized two-hop scheme:
/// `2 m n P1 shortfall(N1, delta1, m) + 2 n l P2 shortfall(N2, delta2, n)`.
#[allow(clippy::too_many_arguments)]
pub fn bound_no_direct(
    p1: f64,
    p2: f64,
    dims: SystemDims,
    n1: usize,
    delta1: f64,
    n2: usize,
    delta2: f64,
) -> Result<f64> {
    let (m, n, l) = (dims.tx, dims.relay, dims.rx);
    check_packing_args(n1, delta1, m)?;
    check_packing_args(n2, delta2, n)?;
    Ok(2.0 * (m * n) as f64 * p1 * packing_shortfall(n1, delta1, m)
        + 2.0 * (n * l) as f64 * p2 * packing_shortfall(n2, delta2, n))
}

/// Loss bound for the quantized direct-link scheme when the transmit
/// selector sees the full direct channel: the transmit-codebook term
/// picks up the direct path, `2 (m l P0 + m n P1) shortfall(N1, delta1, m)
/// + 2 n l P2 shortfall(N2, delta2, n)`.
#[allow(clippy::too_many_arguments)]
pub fn bound_with_direct_full(
    p0: f64,
    p1: f64,
    p2: f64,
    dims: SystemDims,
    n1: usize,
    delta1: f64,
    n2: usize,
    delta2: f64,
) -> Result<f64> {
    let (m, n, l) = (dims.tx, dims.relay, dims.rx);
    check_packing_args(n1, delta1, m)?;
    check_packing_args(n2, delta2, n)?;
    Ok(2.0 * ((m * l) as f64 * p0 + (m * n) as f64 * p1) * packing_shortfall(n1, delta1, m)
        + 2.0 * (n * l) as f64 * p2 * packing_shortfall(n2, delta2, n))
}

/// Loss bound when the direct channel itself is quantized through a
/// third codebook: adds `4 m l P0 shortfall(N0, delta0, m)` to the
/// full-knowledge bound.
#[allow(clippy::too_many_arguments)]
pub fn bound_with_direct_quantized(
    p0: f64,
    p1: f64,
    p2: f64,
    dims: SystemDims,
    n0: usize,
    delta0: f64,
    n1: usize,
    delta1: f64,
    n2: usize,
    delta2: f64,
) -> Result<f64> {
    check_packing_args(n0, delta0, dims.tx)?;
    let base = bound_with_direct_full(p0, p1, p2, dims, n1, delta1, n2, delta2)?;
    Ok(base + 4.0 * (dims.tx * dims.rx) as f64 * p0 * packing_shortfall(n0, delta0, dims.tx))
}

// ── Scalar inequalities ─────────────────────────────────────────────────────

const INEQ_EPS: f64 = 1e-12;

/// `|x1 y1/(1+x1+y1) - x2 y2/(1+x2+y2)| <= |x1-x2| + |y1-y2|` for
/// nonnegative arguments.
pub fn cascade_difference_check(x1: f64, x2: f64, y1: f64, y2: f64) -> bool {
    debug_assert!(x1 >= 0.0 && x2 >= 0.0 && y1 >= 0.0 && y2 >= 0.0);
    let f = |x: f64, y: f64| x * y / (1.0 + x + y);
    let lhs = (f(x1, y1) - f(x2, y2)).abs();
    let rhs = (x1 - x2).abs() + (y1 - y2).abs();
    lhs <= rhs + INEQ_EPS * (1.0 + lhs)
}

/// `|a/(a+c) - b/(b+c)| <= |a-b| / c` for nonnegative `a`, `b` and
/// positive `c`.
pub fn ratio_difference_check(a: f64, b: f64, c: f64) -> bool {
    debug_assert!(a >= 0.0 && b >= 0.0 && c > 0.0);
    let lhs = (a / (a + c) - b / (b + c)).abs();
    lhs <= (a - b).abs() / c + INEQ_EPS
}

/// `| |u^H v|^2 - |v^H w|^2 | <= 2 d(u, w)` for unit vectors.
pub fn correlation_difference_check(u: &CVector, v: &CVector, w: &CVector) -> Result<bool> {
    let lhs = (u.dotc(v).norm_sqr() - v.dotc(w).norm_sqr()).abs();
    let d = crate::codebooks::chordal_distance(u, w)?;
    Ok(lhs <= 2.0 * d + INEQ_EPS)
}

/// Quantization continuity: replacing a unit vector by its nearest
/// codeword moves the received power by at most twice the total channel
/// energy times the quantization distance.
pub fn quantization_continuity_check(h: &CMatrix, s: &CVector, codebook: &Codebook) -> Result<bool> {
    let (_, word, distance) = codebook.nearest_codeword(s)?;
    let energy: f64 = svd(h)?.singulars.iter().map(|x| x * x).sum();
    let lhs = ((h * s).norm_squared() - (h * word).norm_squared()).abs();
    Ok(lhs <= 2.0 * energy * distance + INEQ_EPS * (1.0 + energy))
}

/// Spectral sandwich of the received power:
/// `sigma1^2 |v1^H s|^2 <= |H s|^2 <= sigma1^2 |v1^H s|^2 + sigma2^2`.
pub fn spectral_sandwich_check(h: &CMatrix, s: &CVector) -> Result<bool> {
    let f = svd(h)?;
    let sig1_sq = f.top_singular().powi(2);
    let sig2_sq = f.singulars.get(1).map_or(0.0, |x| x * x);
    let aligned = sig1_sq * f.right_vector(0).dotc(s).norm_sqr();
    let power = (h * s).norm_squared();
    let eps = INEQ_EPS * (1.0 + power);
    Ok(aligned <= power + eps && power <= aligned + sig2_sq + eps)
}

/// One draw from the diagonalized relay feasibility region for a relay
/// with `relay_antennas` antennas: random hop magnitudes, a random
/// transmit image and a random spectrum scaled onto the relay power
/// budget. Returns `(attained SNR, cascade ceiling)`; the attained value
/// never exceeds the ceiling.
pub fn sample_relay_spectrum_gap<R: Rng + ?Sized>(
    rng: &mut R,
    relay_antennas: usize,
) -> (f64, f64) {
    let c1_sq: f64 = rng.gen_range(1e-3..16.0);
    let c2_sq: f64 = rng.gen_range(1e-3..16.0);
    let x = crate::numerics::sample_unit_vector(rng, relay_antennas).scale(c1_sq.sqrt());
    let raw: Vec<f64> = (0..relay_antennas).map(|_| rng.gen_range(0.0..1.0)).collect();
    let scale: f64 = raw.iter().zip(x.iter()).map(|(t, xi)| t * (xi.norm_sqr() + 1.0)).sum();
    let attained: f64 = x
        .iter()
        .zip(&raw)
        .map(|(xi, t)| {
            let sig_sq = t / scale;
            xi.norm_sqr() * sig_sq / (sig_sq + 1.0 / c2_sq)
        })
        .sum();
    (attained, c1_sq * c2_sq / (1.0 + c1_sq + c2_sq))
}

// ── Appendix-style spectral gap ─────────────────────────────────────────────

/// Monte-Carlo estimate of `10 log10(1 + E{nu2^2} / E{nu1^2})` for an
/// `rx x tx` channel with unit-variance complex Gaussian entries: the
/// average dB penalty of keeping only the strongest direct-channel mode.
pub fn spectral_gap_db(rx: usize, tx: usize, samples: usize, stream: &RngStream) -> Result<f64> {
    if rx.min(tx) < 2 {
        return Err(Error::InvalidParameter(
            "spectral gap needs at least two singular values".into(),
        ));
    }
    let sums = crate::exec::map_indexed(samples as u64, |k| {
        let h = sample_complex_gaussian_matrix(&stream.child(k), rx, tx);
        let f = svd(&h).expect("finite sample");
        (f.singulars[0].powi(2), f.singulars[1].powi(2))
    });
    let (top, second) = sums
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    Ok(10.0 * (1.0 + second / top).log10())
}

// ── Kolmogorov-Smirnov helpers ──────────────────────────────────────────────

/// One-sample KS statistic against a fully specified CDF. Sorts the
/// sample in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut sup = 0.0f64;
    for (i, x) in samples.iter().enumerate() {
        let f = cdf(*x);
        sup = sup.max((f - i as f64 / n).abs());
        sup = sup.max((f - (i as f64 + 1.0) / n).abs());
    }
    sup
}

/// CDF of the Kolmogorov distribution,
/// `P(K <= x) = 1 - 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2)`.
pub fn kolmogorov_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..200 {
        let term = (-2.0 * (k * k) as f64 * x * x).exp();
        if term < 1e-16 {
            break;
        }
        sum += sign * term;
        sign = -sign;
    }
    (1.0 - 2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic KS critical value: reject at level `alpha` when the
/// statistic exceeds this.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    assert!(n > 0 && alpha > 0.0 && alpha < 1.0);
    let target = 1.0 - alpha;
    let (mut lo, mut hi) = (0.1f64, 4.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_cdf(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi) / (n as f64).sqrt()
}

/// CDF of `|q^H s|^2` for `s` uniform on the unit sphere of `C^dim` and
/// any fixed unit `q`: `1 - (1 - x)^(dim - 1)` on `[0, 1]`.
pub fn sphere_alignment_cdf(x: f64, dim: usize) -> f64 {
    debug_assert!(dim >= 2);
    let x = x.clamp(0.0, 1.0);
    1.0 - (1.0 - x).powi(dim as i32 - 1)
}

// ── Paired Monte-Carlo loss estimation ──────────────────────────────────────

/// Outcome of one empirical-loss-versus-bound comparison. The check
/// passes when the paired loss estimate stays below the bound with
/// three standard errors of slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub empirical_loss: f64,
    pub bound_value: f64,
    pub standard_error: f64,
    pub samples: usize,
    pub satisfied: bool,
}

impl BoundReport {
    pub fn new(empirical_loss: f64, bound_value: f64, standard_error: f64, samples: usize) -> Self {
        Self {
            empirical_loss,
            bound_value,
            standard_error,
            samples,
            satisfied: empirical_loss <= bound_value + 3.0 * standard_error,
        }
    }
}

fn mean_and_se(losses: &[f64]) -> (f64, f64) {
    let n = losses.len() as f64;
    let mean = losses.iter().sum::<f64>() / n;
    let var = losses.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Paired loss of the quantized two-hop scheme against the unquantized
/// optimum, on common channel realizations, compared to its bound.
pub fn check_bound_no_direct(
    dims: SystemDims,
    gains: LinkGains,
    c1: &Codebook,
    c2: &Codebook,
    channels: usize,
    stream: &RngStream,
) -> Result<BoundReport> {
    let bound = bound_no_direct(
        gains.tx_relay,
        gains.relay_rx,
        dims,
        c1.size(),
        c1.min_distance()?,
        c2.size(),
        c2.min_distance()?,
    )?;
    let losses: Vec<f64> = crate::exec::map_indexed(channels as u64, |k| {
        let ch = sample_channel_set(&stream.child(k), dims, gains, false);
        let best = optimal_no_direct(&ch).expect("finite channels");
        let quant = quantized_no_direct(&ch, c1, c2).expect("matching dims");
        best.snr.total - quant.snr.total
    });
    let (mean, se) = mean_and_se(&losses);
    Ok(BoundReport::new(mean, bound, se, channels))
}

/// Paired loss of the quantized direct-link scheme against the
/// unquantized optimum. With `c0 = None` the selector knows the direct
/// channel exactly (full-knowledge bound); with `c0 = Some` its singular
/// vectors are quantized (adds the third bound term).
#[allow(clippy::too_many_arguments)]
pub fn check_bound_with_direct(
    dims: SystemDims,
    gains: LinkGains,
    c1: &Codebook,
    c2: &Codebook,
    c0: Option<&Codebook>,
    channels: usize,
    stream: &RngStream,
    restarts: usize,
    tol: f64,
) -> Result<BoundReport> {
    let bound = match c0 {
        None => bound_with_direct_full(
            gains.direct,
            gains.tx_relay,
            gains.relay_rx,
            dims,
            c1.size(),
            c1.min_distance()?,
            c2.size(),
            c2.min_distance()?,
        )?,
        Some(c0) => bound_with_direct_quantized(
            gains.direct,
            gains.tx_relay,
            gains.relay_rx,
            dims,
            c0.size(),
            c0.min_distance()?,
            c1.size(),
            c1.min_distance()?,
            c2.size(),
            c2.min_distance()?,
        )?,
    };
    let losses: Vec<f64> = crate::exec::map_indexed(channels as u64, |k| {
        let interval = stream.child(k);
        let ch = sample_channel_set(&interval, dims, gains, true);
        let best = optimal_with_direct(&ch, &interval.child(1_000), restarts, tol)
            .expect("finite channels");
        let knowledge = match c0 {
            None => DirectLinkKnowledge::full(),
            Some(c0) => DirectLinkKnowledge::quantized(ch.direct.as_ref().unwrap(), c0)
                .expect("matching dims"),
        };
        let quant = properly_quantized_with_direct(&ch, c1, c2, &knowledge)
            .expect("matching dims");
        best.snr.total - quant.snr.total
    });
    let (mean, se) = mean_and_se(&losses);
    Ok(BoundReport::new(mean, bound, se, channels))
}
