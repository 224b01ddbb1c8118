//! Beamforming solvers for the two-slot amplify-and-forward relay link.
//!
//! Every solver returns a [`BeamformingSolution`]: the transmit vector,
//! the relay receive/transmit vectors, the receiver combiners, the relay
//! scale and rank-one weighting matrix, and the resulting SNR breakdown.
//! Receive-side vectors are always unit-normalized matched filters and
//! all reported vectors carry a canonical global phase, so equal inputs
//! produce bitwise equal solutions.

use crate::channels::ChannelSet;
use crate::codebooks::Codebook;
use crate::numerics::{
    canonical_phase, normalized_or_basis, sample_unit_vector, svd, CMatrix, CVector, RngStream,
    C64,
};
use crate::{Error, Result};

/// SNR accounting of one beamforming solution, all in linear units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrBreakdown {
    /// Direct Tx-Rx path SNR (zero when the direct link is absent or ignored).
    pub direct: f64,
    /// First-hop (Tx-relay) SNR.
    pub tx_relay: f64,
    /// Second-hop (relay-Rx) SNR.
    pub relay_rx: f64,
    /// SNR of the amplified two-hop cascade.
    pub relay_path: f64,
    /// Post-combining output SNR: `relay_path + direct`.
    pub total: f64,
}

/// SNR of an amplify-and-forward cascade with per-hop SNRs `g1`, `g2`:
/// `g1 g2 / (1 + g1 + g2)`. Strictly below `min(g1, g2)` and increasing
/// in both arguments.
pub fn two_hop_snr(g1: f64, g2: f64) -> f64 {
    if g1 <= 0.0 || g2 <= 0.0 {
        return 0.0;
    }
    g1 * g2 / (1.0 + g1 + g2)
}

impl SnrBreakdown {
    pub fn from_links(direct: f64, tx_relay: f64, relay_rx: f64) -> Self {
        let relay_path = two_hop_snr(tx_relay, relay_rx);
        Self { direct, tx_relay, relay_rx, relay_path, total: relay_path + direct }
    }
}

/// Codebook labels a solution would feed back.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeedbackIndices {
    /// Labels of the quantized right singular vectors of the direct channel.
    pub direct_vectors: Vec<usize>,
    /// Label of the transmit beamforming codeword.
    pub tx: Option<usize>,
    /// Label of the relay transmit codeword.
    pub relay: Option<usize>,
}

/// A complete two-slot beamforming configuration and its SNR breakdown.
#[derive(Debug, Clone)]
pub struct BeamformingSolution {
    /// Transmit beamforming vector (unit, canonical phase).
    pub tx: CVector,
    /// Relay receive combiner, matched to the first-hop signal.
    pub relay_rx: CVector,
    /// Relay transmit direction.
    pub relay_tx: CVector,
    /// Receiver combiner for the relayed slot.
    pub rx: CVector,
    /// Receiver combiner for the direct slot, when that link is used.
    pub rx_direct: Option<CVector>,
    /// Relay amplification scale meeting the unit relay power constraint.
    pub relay_scale: f64,
    /// Rank-one relay weighting matrix `scale * relay_tx * relay_rx^H`.
    pub relay_matrix: CMatrix,
    pub snr: SnrBreakdown,
    /// Present for quantized schemes.
    pub feedback: Option<FeedbackIndices>,
}

fn canonical(v: CVector) -> CVector {
    canonical_phase(&v).unwrap_or(v)
}

/// Build the full solution for a chosen transmit vector and relay
/// transmit direction: matched receive combiners on the true channels,
/// relay scale from the power constraint, and the SNR breakdown.
fn assemble(
    ch: &ChannelSet,
    tx: CVector,
    relay_tx: CVector,
    use_direct: bool,
    feedback: Option<FeedbackIndices>,
) -> BeamformingSolution {
    let tx = canonical(tx);
    let relay_tx = canonical(relay_tx);

    let first_hop = &ch.tx_relay * &tx;
    let relay_rx = canonical(normalized_or_basis(&first_hop));
    let second_hop = &ch.relay_rx * &relay_tx;
    let rx = canonical(normalized_or_basis(&second_hop));

    let gamma1 = ch.gains.tx_relay * first_hop.norm_squared();
    let gamma2 = ch.gains.relay_rx * second_hop.norm_squared();
    let (gamma0, rx_direct) = match (use_direct, ch.direct.as_ref()) {
        (true, Some(h0)) => {
            let direct_sig = h0 * &tx;
            (
                ch.gains.direct * direct_sig.norm_squared(),
                Some(canonical(normalized_or_basis(&direct_sig))),
            )
        }
        _ => (0.0, None),
    };

    let relay_scale = (1.0 + gamma1).sqrt().recip();
    let relay_matrix = (&relay_tx * relay_rx.adjoint()).scale(relay_scale);

    BeamformingSolution {
        tx,
        relay_rx,
        relay_tx,
        rx,
        rx_direct,
        relay_scale,
        relay_matrix,
        snr: SnrBreakdown::from_links(gamma0, gamma1, gamma2),
        feedback,
    }
}

// ── Two-hop link, no direct path ────────────────────────────────────────────

/// Optimal unquantized scheme for the pure two-hop link: the Tx and the
/// relay transmit on the strongest right singular vectors of their
/// outgoing channels, the relay weighting matrix is rank one.
pub fn optimal_no_direct(ch: &ChannelSet) -> Result<BeamformingSolution> {
    let f1 = svd(&ch.tx_relay)?;
    let f2 = svd(&ch.relay_rx)?;
    Ok(assemble(ch, f1.right_vector(0), f2.right_vector(0), false, None))
}

/// Best relay weighting matrix for fixed Tx/Rx beamformers: the matched
/// rank-one map between the effective hop signatures, scaled to the unit
/// relay power budget. Returns the matrix and the attained SNR.
pub fn snr_for_fixed_beamformers_opt_relay(
    ch: &ChannelSet,
    tx: &CVector,
    rx: &CVector,
) -> Result<(CMatrix, f64)> {
    for v in [tx, rx] {
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::NonUnitVector { norm });
        }
    }
    let h1 = (&ch.tx_relay * tx).scale(ch.gains.tx_relay.sqrt());
    let h2 = (ch.relay_rx.adjoint() * rx).scale(ch.gains.relay_rx.sqrt());
    let (c1_sq, c2_sq) = (h1.norm_squared(), h2.norm_squared());
    if c1_sq == 0.0 || c2_sq == 0.0 {
        let n = ch.dims.relay;
        return Ok((CMatrix::zeros(n, n), 0.0));
    }
    let scale = (1.0 + c1_sq).sqrt().recip();
    let w = (h2.unscale(c2_sq.sqrt()) * h1.unscale(c1_sq.sqrt()).adjoint()).scale(scale);
    Ok((w, two_hop_snr(c1_sq, c2_sq)))
}

/// Quantized two-hop scheme: the Tx codeword maximizes the first-hop
/// received power over `c1`, the relay codeword maximizes the second-hop
/// received power over `c2`, receive sides stay matched.
pub fn quantized_no_direct(
    ch: &ChannelSet,
    c1: &Codebook,
    c2: &Codebook,
) -> Result<BeamformingSolution> {
    let (i1, tx, _) = c1.best_codeword_by_gain(&ch.tx_relay, ch.gains.tx_relay)?;
    let (i2, relay_tx, _) = c2.best_codeword_by_gain(&ch.relay_rx, ch.gains.relay_rx)?;
    let feedback = FeedbackIndices { tx: Some(i1), relay: Some(i2), ..Default::default() };
    Ok(assemble(ch, tx.clone(), relay_tx.clone(), false, Some(feedback)))
}

// ── Transmit-vector objective with a direct path ────────────────────────────

/// Coefficients of the transmit-vector objective when the relay hop runs
/// at SNR `gamma2`: `lambda = (1 + gamma2) / P1`, `mu = P0 / gamma2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectObjectiveParams {
    pub lambda: f64,
    pub mu: f64,
}

impl DirectObjectiveParams {
    pub fn new(gains: &crate::channels::LinkGains, gamma2: f64) -> Result<Self> {
        if gamma2 <= 0.0 {
            return Err(Error::DegenerateRelayHop);
        }
        Ok(Self { lambda: (1.0 + gamma2) / gains.tx_relay, mu: gains.direct / gamma2 })
    }
}

/// The scalar objective ranking transmit vectors when both the relayed
/// and the direct path matter:
/// `|H1 s|^2 / (|H1 s|^2 + lambda) + mu |H0 s|^2`.
///
/// At a fixed second-hop SNR `gamma2`, the total output SNR equals
/// `gamma2` times this value, so ranking by it ranks total SNR.
pub fn direct_link_objective(
    ch: &ChannelSet,
    s: &CVector,
    gamma2: f64,
) -> Result<(f64, DirectObjectiveParams)> {
    let h0 = ch
        .direct
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("channel set has no direct link".into()))?;
    let norm = s.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NonUnitVector { norm });
    }
    let params = DirectObjectiveParams::new(&ch.gains, gamma2)?;
    let hop = (&ch.tx_relay * s).norm_squared();
    let direct = (h0 * s).norm_squared();
    Ok((hop / (hop + params.lambda) + params.mu * direct, params))
}

/// Smooth objective `q1(s)/(q1(s)+lambda) + mu * q0(s)` over the unit
/// sphere, with `q1 = s^H A s` for the hop Gram matrix and `q0 = s^H D s`
/// for a positive semidefinite direct-term form.
struct SphereObjective {
    hop_gram: CMatrix,
    direct_form: CMatrix,
    lambda: f64,
    mu: f64,
}

pub const DEFAULT_ASCENT_TOL: f64 = 1e-10;
const MAX_ASCENT_ITERATIONS: usize = 500;
const ARMIJO_SLOPE: f64 = 1e-4;
const ARMIJO_SHRINK: f64 = 0.5;

/// Random multi-start budget used by the unquantized direct-link solvers.
pub fn default_restarts(tx_antennas: usize) -> usize {
    (4 * tx_antennas).max(8)
}

impl SphereObjective {
    fn value(&self, s: &CVector) -> f64 {
        let q1 = s.dotc(&(&self.hop_gram * s)).re.max(0.0);
        let q0 = s.dotc(&(&self.direct_form * s)).re.max(0.0);
        let hop_term = if self.lambda.is_finite() { q1 / (q1 + self.lambda) } else { 0.0 };
        hop_term + self.mu * q0
    }

    /// Gradient of the objective restricted to the sphere (the ambient
    /// gradient of the normalized parameterization, evaluated at a unit
    /// point).
    fn sphere_gradient(&self, s: &CVector) -> CVector {
        let hop = &self.hop_gram * s;
        let q1 = s.dotc(&hop).re.max(0.0);
        let dir = &self.direct_form * s;
        let q0 = s.dotc(&dir).re.max(0.0);
        let coef = self.lambda / (q1 + self.lambda).powi(2);
        let coef = if coef.is_finite() { coef } else { 0.0 };
        let mut g = (hop - s * C64::new(q1, 0.0)).scale(coef);
        g += (dir - s * C64::new(q0, 0.0)).scale(self.mu);
        g
    }

    /// Backtracking gradient ascent from one start; returns the point
    /// and value at convergence.
    fn ascend(&self, start: &CVector, tol: f64) -> (CVector, f64) {
        let mut s = normalized_or_basis(start);
        let mut value = self.value(&s);
        for _ in 0..MAX_ASCENT_ITERATIONS {
            let grad = self.sphere_gradient(&s);
            let slope = grad.norm_squared();
            if slope < 1e-28 {
                break;
            }
            let mut step = 1.0;
            let mut accepted = None;
            for _ in 0..60 {
                let cand = normalized_or_basis(&(&s + grad.scale(step)));
                let cand_value = self.value(&cand);
                if cand_value >= value + ARMIJO_SLOPE * step * slope {
                    accepted = Some((cand, cand_value));
                    break;
                }
                step *= ARMIJO_SHRINK;
            }
            let Some((next, next_value)) = accepted else { break };
            let improvement = next_value - value;
            s = next;
            value = next_value;
            if improvement < tol {
                break;
            }
        }
        (s, value)
    }

    /// Multi-start maximization: the provided warm starts run first,
    /// then `restarts` random starts from `stream`. Ties keep the
    /// earliest start, so the result is deterministic.
    fn solve(
        &self,
        warm_starts: &[CVector],
        stream: &RngStream,
        restarts: usize,
        tol: f64,
    ) -> (CVector, f64) {
        let dim = self.hop_gram.nrows();
        let mut rng = stream.rng();
        let mut best: Option<(CVector, f64)> = None;
        let starts = warm_starts
            .iter()
            .cloned()
            .chain((0..restarts).map(|_| sample_unit_vector(&mut rng, dim)));
        for start in starts {
            let (s, value) = self.ascend(&start, tol);
            if best.as_ref().is_none_or(|(_, bv)| value > *bv) {
                best = Some((s, value));
            }
        }
        let (s, value) = best.expect("at least one start");
        (canonical(s), value)
    }
}

fn require_direct(ch: &ChannelSet) -> Result<&CMatrix> {
    ch.direct
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("channel set has no direct link".into()))
}

/// Optimal unquantized scheme with the direct link: multi-start gradient
/// ascent for the transmit vector (warm-started at the strongest right
/// singular vectors of the hop and direct channels), relay on the
/// strongest right singular vector of the second hop, matched combiners
/// on both slots, MRC at the receiver.
pub fn optimal_with_direct(
    ch: &ChannelSet,
    stream: &RngStream,
    restarts: usize,
    tol: f64,
) -> Result<BeamformingSolution> {
    let h0 = require_direct(ch)?;
    let f0 = svd(h0)?;
    let f1 = svd(&ch.tx_relay)?;
    let f2 = svd(&ch.relay_rx)?;
    let gamma2 = ch.gains.relay_rx * f2.top_singular().powi(2);
    let relay_tx = f2.right_vector(0);
    if gamma2 <= 0.0 {
        // Dead relay hop: only the direct path carries signal.
        return Ok(assemble(ch, f0.right_vector(0), relay_tx, true, None));
    }
    let params = DirectObjectiveParams::new(&ch.gains, gamma2)?;
    let objective = SphereObjective {
        hop_gram: ch.tx_relay.adjoint() * &ch.tx_relay,
        direct_form: h0.adjoint() * h0,
        lambda: params.lambda,
        mu: params.mu,
    };
    let warm = [f1.right_vector(0), f0.right_vector(0)];
    let (tx, _) = objective.solve(&warm, stream, restarts, tol);
    Ok(assemble(ch, tx, relay_tx, true, None))
}

/// As [`optimal_with_direct`] but the transmit objective sees only the
/// strongest singular value/vector of the direct channel. The attained
/// SNR is still evaluated on the true channels.
pub fn modified_unquantized_with_direct(
    ch: &ChannelSet,
    stream: &RngStream,
    restarts: usize,
    tol: f64,
) -> Result<BeamformingSolution> {
    let h0 = require_direct(ch)?;
    let f0 = svd(h0)?;
    let f1 = svd(&ch.tx_relay)?;
    let f2 = svd(&ch.relay_rx)?;
    let gamma2 = ch.gains.relay_rx * f2.top_singular().powi(2);
    let relay_tx = f2.right_vector(0);
    if gamma2 <= 0.0 {
        return Ok(assemble(ch, f0.right_vector(0), relay_tx, true, None));
    }
    let params = DirectObjectiveParams::new(&ch.gains, gamma2)?;
    let e1 = f0.right_vector(0);
    let nu1_sq = f0.top_singular().powi(2);
    let objective = SphereObjective {
        hop_gram: ch.tx_relay.adjoint() * &ch.tx_relay,
        direct_form: (&e1 * e1.adjoint()).scale(nu1_sq),
        lambda: params.lambda,
        mu: params.mu,
    };
    let warm = [f1.right_vector(0), e1];
    let (tx, _) = objective.solve(&warm, stream, restarts, tol);
    Ok(assemble(ch, tx, relay_tx, true, None))
}

// ── Quantized schemes with a direct path ────────────────────────────────────

/// What the transmit-vector selector knows about the direct channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectKnowledgeMode {
    /// The full direct channel matrix.
    FullChannel,
    /// Exact singular values, codebook-quantized right singular vectors.
    QuantizedSingulars,
    /// Only the strongest singular value and its quantized vector.
    TopSingularOnly,
}

/// Direct-channel knowledge carried to the transmit-vector selector:
/// exact singular values paired with quantized right singular vectors.
#[derive(Debug, Clone)]
pub struct DirectLinkKnowledge {
    pub mode: DirectKnowledgeMode,
    /// Exact singular values, one per carried vector (empty for
    /// `FullChannel`).
    pub singulars: Vec<f64>,
    /// Quantized right singular vectors from the direct-channel codebook.
    pub vectors: Vec<CVector>,
    /// Codebook labels of `vectors`.
    pub labels: Vec<usize>,
}

/// Relative threshold deciding the numerical rank of the direct channel.
const RANK_REL_TOL: f64 = 1e-10;

impl DirectLinkKnowledge {
    pub fn full() -> Self {
        Self {
            mode: DirectKnowledgeMode::FullChannel,
            singulars: Vec::new(),
            vectors: Vec::new(),
            labels: Vec::new(),
        }
    }

    /// Quantize the right singular vectors of `h0` (up to its numerical
    /// rank) to their nearest codewords in `c0`.
    pub fn quantized(h0: &CMatrix, c0: &Codebook) -> Result<Self> {
        Self::from_rank_budget(h0, c0, usize::MAX, DirectKnowledgeMode::QuantizedSingulars)
    }

    /// Keep only the strongest singular value and its quantized vector.
    pub fn top_singular_only(h0: &CMatrix, c0: &Codebook) -> Result<Self> {
        Self::from_rank_budget(h0, c0, 1, DirectKnowledgeMode::TopSingularOnly)
    }

    fn from_rank_budget(
        h0: &CMatrix,
        c0: &Codebook,
        budget: usize,
        mode: DirectKnowledgeMode,
    ) -> Result<Self> {
        let f0 = svd(h0)?;
        let rank = f0.rank(RANK_REL_TOL).min(budget).max(1);
        let mut singulars = Vec::with_capacity(rank);
        let mut vectors = Vec::with_capacity(rank);
        let mut labels = Vec::with_capacity(rank);
        for i in 0..rank {
            let (label, word, _) = c0.nearest_codeword(&f0.right_vector(i))?;
            singulars.push(f0.singulars[i]);
            vectors.push(word.clone());
            labels.push(label);
        }
        Ok(Self { mode, singulars, vectors, labels })
    }

    /// The selector's surrogate for the direct-path received power at
    /// transmit vector `w`.
    fn direct_term(&self, h0: &CMatrix, w: &CVector) -> f64 {
        match self.mode {
            DirectKnowledgeMode::FullChannel => (h0 * w).norm_squared(),
            _ => self
                .singulars
                .iter()
                .zip(&self.vectors)
                .map(|(nu, e)| nu * nu * e.dotc(w).norm_sqr())
                .sum(),
        }
    }
}

fn select_tx_codeword<F: Fn(&CVector) -> f64>(c1: &Codebook, score: F) -> (usize, CVector) {
    let mut best: Option<(usize, f64)> = None;
    for (i, w) in c1.vectors().iter().enumerate() {
        let v = score(w);
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some((i, v));
        }
    }
    let (i, _) = best.expect("codebook is nonempty");
    (i, c1.vector(i).clone())
}

fn quantized_with_direct_impl(
    ch: &ChannelSet,
    c1: &Codebook,
    c2: &Codebook,
    knowledge: &DirectLinkKnowledge,
) -> Result<BeamformingSolution> {
    let h0 = require_direct(ch)?;
    if c1.dim() != ch.dims.tx {
        return Err(Error::DimensionMismatch(format!(
            "transmit codebook in C^{} for {} Tx antennas",
            c1.dim(),
            ch.dims.tx
        )));
    }
    let (relay_label, relay_tx, gamma2) =
        c2.best_codeword_by_gain(&ch.relay_rx, ch.gains.relay_rx)?;
    let relay_tx = relay_tx.clone();

    let (tx_label, tx) = if gamma2 > 0.0 {
        let params = DirectObjectiveParams::new(&ch.gains, gamma2)?;
        select_tx_codeword(c1, |w| {
            let hop = (&ch.tx_relay * w).norm_squared();
            hop / (hop + params.lambda) + params.mu * knowledge.direct_term(h0, w)
        })
    } else {
        // Dead relay hop: rank codewords by the direct term alone.
        select_tx_codeword(c1, |w| knowledge.direct_term(h0, w))
    };

    let feedback = FeedbackIndices {
        direct_vectors: knowledge.labels.clone(),
        tx: Some(tx_label),
        relay: Some(relay_label),
    };
    Ok(assemble(ch, tx, relay_tx, true, Some(feedback)))
}

/// Quantized scheme with the direct link. The relay codeword maximizes
/// the second-hop SNR; the transmit codeword maximizes the direct-link
/// objective, with the direct term taken from `knowledge` (full channel,
/// or exact singular values with quantized singular vectors). The SNR is
/// evaluated on the true channels.
pub fn properly_quantized_with_direct(
    ch: &ChannelSet,
    c1: &Codebook,
    c2: &Codebook,
    knowledge: &DirectLinkKnowledge,
) -> Result<BeamformingSolution> {
    if knowledge.mode == DirectKnowledgeMode::TopSingularOnly {
        return Err(Error::InvalidParameter(
            "top-singular-only knowledge belongs to the modified scheme".into(),
        ));
    }
    quantized_with_direct_impl(ch, c1, c2, knowledge)
}

/// The reduced-feedback variant: only the strongest singular value and
/// its quantized vector of the direct channel enter the transmit
/// selection.
pub fn modified_quantized_with_direct(
    ch: &ChannelSet,
    c0: &Codebook,
    c1: &Codebook,
    c2: &Codebook,
) -> Result<BeamformingSolution> {
    let h0 = require_direct(ch)?;
    let knowledge = DirectLinkKnowledge::top_singular_only(h0, c0)?;
    quantized_with_direct_impl(ch, c1, c2, &knowledge)
}

// ── Baselines ───────────────────────────────────────────────────────────────

/// Baseline that picks the transmit vector as if the direct link did not
/// exist (strongest right singular vector of the first hop); combining
/// still uses both slots.
pub fn baseline_ignore_direct(ch: &ChannelSet) -> Result<BeamformingSolution> {
    let f1 = svd(&ch.tx_relay)?;
    let f2 = svd(&ch.relay_rx)?;
    Ok(assemble(ch, f1.right_vector(0), f2.right_vector(0), ch.direct.is_some(), None))
}

/// Baseline that transmits toward whichever of the two paths is stronger
/// on its own: the relayed path at the first hop's strongest direction,
/// or the direct path at the direct channel's strongest direction.
pub fn baseline_switch_stronger(ch: &ChannelSet) -> Result<BeamformingSolution> {
    let h0 = require_direct(ch)?;
    let f0 = svd(h0)?;
    let f1 = svd(&ch.tx_relay)?;
    let f2 = svd(&ch.relay_rx)?;
    let relayed = two_hop_snr(
        ch.gains.tx_relay * f1.top_singular().powi(2),
        ch.gains.relay_rx * f2.top_singular().powi(2),
    );
    let direct = ch.gains.direct * f0.top_singular().powi(2);
    let tx = if relayed >= direct { f1.right_vector(0) } else { f0.right_vector(0) };
    Ok(assemble(ch, tx, f2.right_vector(0), true, None))
}

// ── Component-quantizer baseline ────────────────────────────────────────────

/// Reconstruction level of the one-bit sign quantizer for a zero-mean
/// Gaussian component with variance 1/2: `E{|X|} = 1/sqrt(pi)`.
pub fn mmse_one_bit_level() -> f64 {
    std::f64::consts::FRAC_2_SQRT_PI / 2.0
}

/// Quantize every real and imaginary component of each entry to its
/// one-bit MMSE reconstruction.
pub fn mmse_reconstruct(h: &CMatrix) -> CMatrix {
    let level = mmse_one_bit_level();
    h.map(|e| C64::new(level.copysign(e.re), level.copysign(e.im)))
}

/// Baseline that feeds back component-quantized channel matrices: the
/// beamformers are computed by the corresponding unquantized procedure
/// on the reconstructed matrices, then evaluated on the true channels.
/// Only the one-bit-per-component quantizer is modeled.
pub fn baseline_mmse_quantizer(
    ch: &ChannelSet,
    stream: &RngStream,
    restarts: usize,
    tol: f64,
    bits_per_component: u32,
) -> Result<BeamformingSolution> {
    if bits_per_component != 1 {
        return Err(Error::InvalidParameter(
            "only one-bit component quantization is modeled".into(),
        ));
    }
    let recon = ChannelSet {
        direct: ch.direct.as_ref().map(mmse_reconstruct),
        tx_relay: mmse_reconstruct(&ch.tx_relay),
        relay_rx: mmse_reconstruct(&ch.relay_rx),
        gains: ch.gains,
        dims: ch.dims,
    };
    let chosen = if recon.direct.is_some() {
        optimal_with_direct(&recon, stream, restarts, tol)?
    } else {
        optimal_no_direct(&recon)?
    };
    Ok(assemble(ch, chosen.tx, chosen.relay_tx, ch.direct.is_some(), None))
}
