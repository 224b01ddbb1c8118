//! Monte-Carlo BER engine: quasi-static coherence intervals, BPSK over
//! the two-slot relay protocol, matched/MRC combining, scheme comparison
//! under common random numbers, and feedback-bit accounting.
//!
//! Within one interval every scheme sees the identical channel set and
//! the identical noise and symbol draws, so BER orderings are testable
//! at desk scale. Intervals are independent work units; with the
//! `parallel` feature they run on rayon and reduce by integer sums, so
//! results are bit-identical to the sequential path.

use std::fmt::Write as _;

use rand::Rng;
use sha2::{Digest, Sha256};

use crate::channels::{lane, sample_channel_set, ChannelSet, CoherenceSchedule, LinkGains, SystemDims};
use crate::codebooks::Codebook;
use crate::numerics::{complex_gaussian, CVector, RngStream, C64};
use crate::schemes::{
    baseline_ignore_direct, baseline_mmse_quantizer, baseline_switch_stronger,
    modified_quantized_with_direct, modified_unquantized_with_direct, optimal_no_direct,
    optimal_with_direct, properly_quantized_with_direct, quantized_no_direct,
    BeamformingSolution, DirectLinkKnowledge,
};
use crate::{Error, Result};

/// Every scheme the simulator can run, one per solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeId {
    OptimalNoDirect,
    QuantizedNoDirect,
    OptimalDirect,
    ModifiedUnquantizedDirect,
    ProperlyQuantizedDirect,
    ModifiedQuantizedDirect,
    IgnoreDirect,
    SwitchStronger,
    MmseBaseline,
    RandomCodebookBaseline,
}

impl SchemeId {
    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeId::OptimalNoDirect => "optimal_no_dl",
            SchemeId::QuantizedNoDirect => "quantized_no_dl",
            SchemeId::OptimalDirect => "optimal_dl",
            SchemeId::ModifiedUnquantizedDirect => "modified_unquantized_dl",
            SchemeId::ProperlyQuantizedDirect => "properly_quantized_dl",
            SchemeId::ModifiedQuantizedDirect => "modified_quantized_dl",
            SchemeId::IgnoreDirect => "ignore_direct",
            SchemeId::SwitchStronger => "switch_stronger",
            SchemeId::MmseBaseline => "mmse_baseline",
            SchemeId::RandomCodebookBaseline => "random_codebook_baseline",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "optimal_no_dl" => SchemeId::OptimalNoDirect,
            "quantized_no_dl" => SchemeId::QuantizedNoDirect,
            "optimal_dl" => SchemeId::OptimalDirect,
            "modified_unquantized_dl" => SchemeId::ModifiedUnquantizedDirect,
            "properly_quantized_dl" => SchemeId::ProperlyQuantizedDirect,
            "modified_quantized_dl" => SchemeId::ModifiedQuantizedDirect,
            "ignore_direct" => SchemeId::IgnoreDirect,
            "switch_stronger" => SchemeId::SwitchStronger,
            "mmse_baseline" => SchemeId::MmseBaseline,
            "random_codebook_baseline" => SchemeId::RandomCodebookBaseline,
            other => return Err(Error::InvalidConfig(format!("unknown scheme `{other}`"))),
        })
    }

    /// Schemes that only make sense with the direct link in the model.
    pub fn requires_direct(&self) -> bool {
        matches!(
            self,
            SchemeId::OptimalDirect
                | SchemeId::ModifiedUnquantizedDirect
                | SchemeId::ProperlyQuantizedDirect
                | SchemeId::ModifiedQuantizedDirect
                | SchemeId::IgnoreDirect
                | SchemeId::SwitchStronger
        )
    }
}

impl std::fmt::Display for SchemeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Codebook sizes and scalar-quantizer budget entering the feedback-bit
/// accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeedbackBudget {
    /// Direct-channel vector codebook size.
    pub n0: usize,
    /// Transmit codebook size.
    pub n1: usize,
    /// Relay codebook size.
    pub n2: usize,
    /// Bits of the (ideal) scalar quantizer per scalar quantity.
    pub scalar_bits: u64,
    /// Rank of the direct channel entering the accounting.
    pub direct_rank: usize,
}

fn log2_exact(n: usize) -> Result<u64> {
    if n >= 1 && n.is_power_of_two() {
        Ok(n.trailing_zeros() as u64)
    } else {
        Err(Error::InvalidParameter(format!(
            "codebook size {n} is not a power of two; bit accounting is undefined"
        )))
    }
}

/// Exact number of feedback bits a scheme consumes per coherence
/// interval. Unquantized schemes cost nothing; the component quantizer
/// pays two bits per complex channel entry plus one scalar.
pub fn feedback_bits(
    scheme: SchemeId,
    budget: &FeedbackBudget,
    dims: SystemDims,
    include_direct: bool,
) -> Result<u64> {
    let (m, n, l) = (dims.tx as u64, dims.relay as u64, dims.rx as u64);
    Ok(match scheme {
        SchemeId::OptimalNoDirect
        | SchemeId::OptimalDirect
        | SchemeId::ModifiedUnquantizedDirect
        | SchemeId::IgnoreDirect
        | SchemeId::SwitchStronger => 0,
        SchemeId::QuantizedNoDirect | SchemeId::RandomCodebookBaseline => {
            log2_exact(budget.n1)? + log2_exact(budget.n2)?
        }
        SchemeId::ProperlyQuantizedDirect => {
            let r0 = budget.direct_rank as u64;
            (1 + r0) * budget.scalar_bits
                + r0 * log2_exact(budget.n0)?
                + log2_exact(budget.n1)?
                + log2_exact(budget.n2)?
        }
        SchemeId::ModifiedQuantizedDirect => {
            2 * budget.scalar_bits
                + log2_exact(budget.n0)?
                + log2_exact(budget.n1)?
                + log2_exact(budget.n2)?
        }
        SchemeId::MmseBaseline => {
            if include_direct {
                2 * (m * n + m * l + l * n) + budget.scalar_bits
            } else {
                2 * (m * n + n * l)
            }
        }
    })
}

/// One scheme entry of a simulation: the solver id plus whatever
/// codebooks it needs. The random baseline carries an ensemble of
/// `(c1, c2)` pairs whose error counts are averaged.
#[derive(Debug, Clone)]
pub struct SchemeSpec {
    pub id: SchemeId,
    pub label: String,
    pub c0: Option<Codebook>,
    pub c1: Option<Codebook>,
    pub c2: Option<Codebook>,
    pub ensemble: Vec<(Codebook, Codebook)>,
}

impl SchemeSpec {
    pub fn unquantized(id: SchemeId) -> Self {
        Self { id, label: id.as_str().into(), c0: None, c1: None, c2: None, ensemble: Vec::new() }
    }

    pub fn two_hop(id: SchemeId, label: impl Into<String>, c1: Codebook, c2: Codebook) -> Self {
        Self { id, label: label.into(), c0: None, c1: Some(c1), c2: Some(c2), ensemble: Vec::new() }
    }

    pub fn with_direct_books(
        id: SchemeId,
        label: impl Into<String>,
        c0: Codebook,
        c1: Codebook,
        c2: Codebook,
    ) -> Self {
        Self {
            id,
            label: label.into(),
            c0: Some(c0),
            c1: Some(c1),
            c2: Some(c2),
            ensemble: Vec::new(),
        }
    }

    pub fn random_ensemble(label: impl Into<String>, pairs: Vec<(Codebook, Codebook)>) -> Self {
        Self {
            id: SchemeId::RandomCodebookBaseline,
            label: label.into(),
            c0: None,
            c1: None,
            c2: None,
            ensemble: pairs,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// How many independent runs this scheme contributes per interval.
    fn replicas(&self) -> u64 {
        if self.id == SchemeId::RandomCodebookBaseline { self.ensemble.len() as u64 } else { 1 }
    }

    /// Budget entry for the bit accounting, from this scheme's own
    /// codebooks and the experiment's scalar-bit setting.
    pub fn budget(&self, scalar_bits: u64, dims: SystemDims) -> FeedbackBudget {
        let first_pair = self.ensemble.first();
        FeedbackBudget {
            n0: self.c0.as_ref().map_or(1, Codebook::size),
            n1: self
                .c1
                .as_ref()
                .map_or_else(|| first_pair.map_or(1, |(a, _)| a.size()), Codebook::size),
            n2: self
                .c2
                .as_ref()
                .map_or_else(|| first_pair.map_or(1, |(_, b)| b.size()), Codebook::size),
            scalar_bits,
            // Full-rank accounting for the direct channel.
            direct_rank: dims.tx.min(dims.rx),
        }
    }

    fn validate(&self, dims: SystemDims, include_direct: bool) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.id.requires_direct() && !include_direct {
            return fail(format!("scheme `{}` needs the direct link", self.label));
        }
        let check_dim = |cb: &Codebook, want: usize, role: &str| {
            if cb.dim() != want {
                return fail(format!(
                    "scheme `{}`: {role} codebook has dimension {}, expected {want}",
                    self.label,
                    cb.dim()
                ));
            }
            Ok(())
        };
        match self.id {
            SchemeId::QuantizedNoDirect => {
                let c1 = self.c1.as_ref().ok_or_else(|| {
                    Error::InvalidConfig(format!("scheme `{}` needs codebook c1", self.label))
                })?;
                let c2 = self.c2.as_ref().ok_or_else(|| {
                    Error::InvalidConfig(format!("scheme `{}` needs codebook c2", self.label))
                })?;
                check_dim(c1, dims.tx, "transmit")?;
                check_dim(c2, dims.relay, "relay")?;
            }
            SchemeId::ProperlyQuantizedDirect | SchemeId::ModifiedQuantizedDirect => {
                for (cb, want, role) in [
                    (&self.c0, dims.tx, "direct-vector"),
                    (&self.c1, dims.tx, "transmit"),
                    (&self.c2, dims.relay, "relay"),
                ] {
                    let cb = cb.as_ref().ok_or_else(|| {
                        Error::InvalidConfig(format!(
                            "scheme `{}` needs the {role} codebook",
                            self.label
                        ))
                    })?;
                    check_dim(cb, want, role)?;
                }
            }
            SchemeId::RandomCodebookBaseline => {
                if include_direct {
                    return fail("the random-codebook baseline models the two-hop link".into());
                }
                if self.ensemble.is_empty() {
                    return fail(format!("scheme `{}` needs at least one codebook pair", self.label));
                }
                for (c1, c2) in &self.ensemble {
                    check_dim(c1, dims.tx, "transmit")?;
                    check_dim(c2, dims.relay, "relay")?;
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Which link SNR a BER experiment sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Direct,
    TxRelay,
    RelayRx,
}

impl SweepVariable {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVariable::Direct => "p0",
            SweepVariable::TxRelay => "p1",
            SweepVariable::RelayRx => "p2",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "p0" | "P0" => SweepVariable::Direct,
            "p1" | "P1" => SweepVariable::TxRelay,
            "p2" | "P2" => SweepVariable::RelayRx,
            other => return Err(Error::InvalidConfig(format!("unknown sweep variable `{other}`"))),
        })
    }
}

impl std::fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Full description of one BER experiment.
#[derive(Debug, Clone)]
pub struct SimulationSetup {
    pub dims: SystemDims,
    pub schedule: CoherenceSchedule,
    pub include_direct: bool,
    /// Fixed link SNRs in dB; the swept entry is replaced per grid point.
    pub direct_db: f64,
    pub tx_relay_db: f64,
    pub relay_rx_db: f64,
    pub sweep: SweepVariable,
    pub grid_db: Vec<f64>,
    pub schemes: Vec<SchemeSpec>,
    /// Bits per scalar feedback quantity (`b` in the accounting).
    pub scalar_bits: u64,
    pub seed: u64,
    /// Multi-start budget of the gradient solvers.
    pub solver_restarts: usize,
    pub solver_tol: f64,
}

impl SimulationSetup {
    fn gains_at(&self, snr_db: f64) -> LinkGains {
        let (mut p0, mut p1, mut p2) = (self.direct_db, self.tx_relay_db, self.relay_rx_db);
        match self.sweep {
            SweepVariable::Direct => p0 = snr_db,
            SweepVariable::TxRelay => p1 = snr_db,
            SweepVariable::RelayRx => p2 = snr_db,
        }
        LinkGains::from_db(p0, p1, p2)
    }

    fn validate(&self) -> Result<()> {
        if self.schemes.is_empty() {
            return Err(Error::InvalidConfig("scheme list is empty".into()));
        }
        if self.grid_db.is_empty() {
            return Err(Error::InvalidConfig("sweep grid is empty".into()));
        }
        if !self.grid_db.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig("sweep grid must be strictly increasing".into()));
        }
        if self.include_direct
            && self.sweep == SweepVariable::Direct
            && self.schemes.is_empty()
        {
            return Err(Error::InvalidConfig("scheme list is empty".into()));
        }
        if !self.include_direct && self.sweep == SweepVariable::Direct {
            return Err(Error::InvalidConfig(
                "cannot sweep the direct link SNR without the direct link".into(),
            ));
        }
        for spec in &self.schemes {
            spec.validate(self.dims, self.include_direct)?;
        }
        Ok(())
    }

    /// Content fingerprint of the experiment: seed, dimensions,
    /// schedule, gains, grid, scheme labels and codebook hashes.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.seed.to_le_bytes());
        hasher.update((self.dims.tx as u64).to_le_bytes());
        hasher.update((self.dims.relay as u64).to_le_bytes());
        hasher.update((self.dims.rx as u64).to_le_bytes());
        hasher.update(self.schedule.intervals.to_le_bytes());
        hasher.update(self.schedule.symbols_per_interval.to_le_bytes());
        hasher.update([self.include_direct as u8]);
        for db in [self.direct_db, self.tx_relay_db, self.relay_rx_db] {
            hasher.update(db.to_le_bytes());
        }
        hasher.update(self.sweep.as_str().as_bytes());
        for g in &self.grid_db {
            hasher.update(g.to_le_bytes());
        }
        hasher.update(self.scalar_bits.to_le_bytes());
        hasher.update((self.solver_restarts as u64).to_le_bytes());
        hasher.update(self.solver_tol.to_le_bytes());
        for spec in &self.schemes {
            hasher.update(spec.id.as_str().as_bytes());
            hasher.update(spec.label.as_bytes());
            for cb in [&spec.c0, &spec.c1, &spec.c2].into_iter().flatten() {
                hasher.update(cb.content_hash().as_bytes());
            }
            for (a, b) in &spec.ensemble {
                hasher.update(a.content_hash().as_bytes());
                hasher.update(b.content_hash().as_bytes());
            }
        }
        let mut out = String::new();
        for byte in hasher.finalize() {
            let _ = write!(out, "{byte:02x}");
        }
        out
    }
}

/// One point of a BER curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    pub bit_errors: u64,
    pub bits_sent: u64,
    pub ber: f64,
    /// Binomial standard error of `ber`.
    pub stderr: f64,
}

/// BER results of one scheme across the sweep.
#[derive(Debug, Clone)]
pub struct BerCurve {
    pub scheme: SchemeId,
    pub label: String,
    pub sweep: SweepVariable,
    pub feedback_bits: u64,
    pub seed: u64,
    pub fingerprint: String,
    pub points: Vec<BerPoint>,
}

// ── Symbol-level model ──────────────────────────────────────────────────────

/// MRC combination of the two slot observations after noise whitening:
/// `conj(a0)/v0 * y0 + conj(a1)/v1 * y1`.
pub fn combine_two_slots(
    y0: C64,
    y1: C64,
    noise_var0: f64,
    noise_var1: f64,
    amp0: C64,
    amp1: C64,
) -> Result<C64> {
    if noise_var0 <= 0.0 || noise_var1 <= 0.0 {
        return Err(Error::InvalidParameter("noise variances must be positive".into()));
    }
    Ok(amp0.conj().unscale(noise_var0) * y0 + amp1.conj().unscale(noise_var1) * y1)
}

/// Output SNR of the combiner above.
pub fn combined_snr(amp0: C64, noise_var0: f64, amp1: C64, noise_var1: f64) -> f64 {
    amp0.norm_sqr() / noise_var0 + amp1.norm_sqr() / noise_var1
}

/// Scalarized two-slot model of one solution on one channel set. With
/// the rank-one relay matrix and matched receive filters, the relayed
/// slot reduces to `y1 = relay_amp x + relay_noise_coef (a^H z1) + f^H z2`,
/// a scalar channel with a single noise variance.
#[derive(Debug, Clone)]
pub struct EffectiveLink {
    /// Direct-slot amplitude and combiner (unit noise variance).
    pub direct: Option<(C64, CVector)>,
    pub relay_amp: C64,
    pub relay_noise_coef: C64,
    pub relay_combiner: CVector,
    pub rx_combiner: CVector,
    /// `|relay_noise_coef|^2 + 1`.
    pub relay_noise_var: f64,
}

impl EffectiveLink {
    pub fn new(sol: &BeamformingSolution, ch: &ChannelSet) -> Self {
        let second_hop = sol.rx.dotc(&(&ch.relay_rx * &sol.relay_tx));
        let first_hop = sol.relay_rx.dotc(&(&ch.tx_relay * &sol.tx));
        let sigma = C64::new(sol.relay_scale, 0.0);
        let relay_amp = sigma
            * second_hop
            * first_hop
            * (ch.gains.tx_relay * ch.gains.relay_rx).sqrt();
        let relay_noise_coef = sigma * second_hop * ch.gains.relay_rx.sqrt();
        let direct = match (&sol.rx_direct, &ch.direct) {
            (Some(r0), Some(h0)) => {
                let amp = r0.dotc(&(h0 * &sol.tx)) * ch.gains.direct.sqrt();
                Some((amp, r0.clone()))
            }
            _ => None,
        };
        Self {
            direct,
            relay_amp,
            relay_noise_coef,
            relay_combiner: sol.relay_rx.clone(),
            rx_combiner: sol.rx.clone(),
            relay_noise_var: relay_noise_coef.norm_sqr() + 1.0,
        }
    }

    /// Analytic post-combining SNR of this scalarized model; matches the
    /// solution's SNR breakdown.
    pub fn analytic_snr(&self) -> f64 {
        let direct = self.direct.as_ref().map_or(0.0, |(a, _)| a.norm_sqr());
        combined_snr(
            C64::new(direct.sqrt(), 0.0),
            1.0,
            self.relay_amp,
            self.relay_noise_var,
        )
    }
}

fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    CVector::from_fn(dim, |_, _| complex_gaussian(rng))
}

// ── Engine ──────────────────────────────────────────────────────────────────

fn solve_scheme(
    spec: &SchemeSpec,
    ch: &ChannelSet,
    solver_stream: &RngStream,
    restarts: usize,
    tol: f64,
) -> Result<Vec<BeamformingSolution>> {
    let one = |sol: BeamformingSolution| Ok(vec![sol]);
    match spec.id {
        SchemeId::OptimalNoDirect => one(optimal_no_direct(ch)?),
        SchemeId::QuantizedNoDirect => one(quantized_no_direct(
            ch,
            spec.c1.as_ref().expect("validated"),
            spec.c2.as_ref().expect("validated"),
        )?),
        SchemeId::OptimalDirect => one(optimal_with_direct(ch, solver_stream, restarts, tol)?),
        SchemeId::ModifiedUnquantizedDirect => {
            one(modified_unquantized_with_direct(ch, solver_stream, restarts, tol)?)
        }
        SchemeId::ProperlyQuantizedDirect => {
            let c0 = spec.c0.as_ref().expect("validated");
            let knowledge =
                DirectLinkKnowledge::quantized(ch.direct.as_ref().expect("validated"), c0)?;
            one(properly_quantized_with_direct(
                ch,
                spec.c1.as_ref().expect("validated"),
                spec.c2.as_ref().expect("validated"),
                &knowledge,
            )?)
        }
        SchemeId::ModifiedQuantizedDirect => one(modified_quantized_with_direct(
            ch,
            spec.c0.as_ref().expect("validated"),
            spec.c1.as_ref().expect("validated"),
            spec.c2.as_ref().expect("validated"),
        )?),
        SchemeId::IgnoreDirect => one(baseline_ignore_direct(ch)?),
        SchemeId::SwitchStronger => one(baseline_switch_stronger(ch)?),
        SchemeId::MmseBaseline => {
            one(baseline_mmse_quantizer(ch, solver_stream, restarts, tol, 1)?)
        }
        SchemeId::RandomCodebookBaseline => spec
            .ensemble
            .iter()
            .map(|(c1, c2)| quantized_no_direct(ch, c1, c2))
            .collect(),
    }
}

/// Error counts of every scheme (replicas summed) over one interval at
/// the given gains.
fn run_interval(setup: &SimulationSetup, gains: LinkGains, interval: u64) -> Vec<u64> {
    let stream = setup.schedule.interval_stream(setup.seed, interval);
    let ch = sample_channel_set(&stream, setup.dims, gains, setup.include_direct);
    let solver_base = stream.child(lane::SOLVER);

    // (scheme slot, scalarized link) pairs; replicas share a slot.
    let mut engines: Vec<(usize, EffectiveLink)> = Vec::new();
    for (slot, spec) in setup.schemes.iter().enumerate() {
        let sols = solve_scheme(
            spec,
            &ch,
            &solver_base.child(slot as u64),
            setup.solver_restarts,
            setup.solver_tol,
        )
        .expect("setup validated before running");
        for sol in &sols {
            engines.push((slot, EffectiveLink::new(sol, &ch)));
        }
    }

    let mut errors = vec![0u64; setup.schemes.len()];
    let mut symbol_rng = stream.child(lane::SYMBOLS).rng();
    let mut direct_noise_rng = stream.child(lane::NOISE_DIRECT).rng();
    let mut relay_noise_rng = stream.child(lane::NOISE_RELAY_IN).rng();
    let mut rx_noise_rng = stream.child(lane::NOISE_RX_IN).rng();

    for _ in 0..setup.schedule.symbols_per_interval {
        let x: f64 = if symbol_rng.gen::<bool>() { 1.0 } else { -1.0 };
        let z0 = setup
            .include_direct
            .then(|| gaussian_vector(&mut direct_noise_rng, setup.dims.rx));
        let z1 = gaussian_vector(&mut relay_noise_rng, setup.dims.relay);
        let z2 = gaussian_vector(&mut rx_noise_rng, setup.dims.rx);

        for (slot, link) in &engines {
            let y1 = link.relay_amp * x
                + link.relay_noise_coef * link.relay_combiner.dotc(&z1)
                + link.rx_combiner.dotc(&z2);
            let soft = match (&link.direct, &z0) {
                (Some((amp0, combiner0)), Some(z0)) => {
                    let y0 = *amp0 * x + combiner0.dotc(z0);
                    amp0.conj() * y0 + amp1_weight(link) * y1
                }
                _ => amp1_weight(link) * y1,
            };
            let decided = if soft.re >= 0.0 { 1.0 } else { -1.0 };
            if decided != x {
                errors[*slot] += 1;
            }
        }
    }
    errors
}

#[inline]
fn amp1_weight(link: &EffectiveLink) -> C64 {
    link.relay_amp.conj().unscale(link.relay_noise_var)
}

fn map_intervals<T, F>(parallel: bool, n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(&f).collect();
        }
    }
    let _ = parallel;
    (0..n).map(f).collect()
}

fn run(setup: &SimulationSetup, parallel: bool) -> Result<Vec<BerCurve>> {
    setup.validate()?;
    let fingerprint = setup.fingerprint();
    let mut totals = vec![Vec::with_capacity(setup.grid_db.len()); setup.schemes.len()];

    for &snr_db in &setup.grid_db {
        let gains = setup.gains_at(snr_db);
        let per_interval =
            map_intervals(parallel, setup.schedule.intervals, |k| run_interval(setup, gains, k));
        // Order-independent integer reduction keeps determinism.
        let mut sums = vec![0u64; setup.schemes.len()];
        for interval in &per_interval {
            for (slot, err) in interval.iter().enumerate() {
                sums[slot] += err;
            }
        }
        for (slot, spec) in setup.schemes.iter().enumerate() {
            let bits = setup.schedule.total_symbols() * spec.replicas();
            let ber = sums[slot] as f64 / bits as f64;
            totals[slot].push(BerPoint {
                snr_db,
                bit_errors: sums[slot],
                bits_sent: bits,
                ber,
                stderr: (ber * (1.0 - ber) / bits as f64).sqrt(),
            });
        }
    }

    setup
        .schemes
        .iter()
        .zip(totals)
        .map(|(spec, points)| {
            let budget = spec.budget(setup.scalar_bits, setup.dims);
            Ok(BerCurve {
                scheme: spec.id,
                label: spec.label.clone(),
                sweep: setup.sweep,
                feedback_bits: feedback_bits(spec.id, &budget, setup.dims, setup.include_direct)?,
                seed: setup.seed,
                fingerprint: fingerprint.clone(),
                points,
            })
        })
        .collect()
}

/// Run the BER experiment; interval-parallel when the `parallel` feature
/// is enabled.
pub fn simulate_ber(setup: &SimulationSetup) -> Result<Vec<BerCurve>> {
    run(setup, true)
}

/// Sequential reference path; bit-identical to [`simulate_ber`].
pub fn simulate_ber_serial(setup: &SimulationSetup) -> Result<Vec<BerCurve>> {
    run(setup, false)
}
