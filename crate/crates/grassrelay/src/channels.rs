//! Quasi-static i.i.d. Rayleigh channel realizations and link-SNR
//! configuration for the three links of the relay system.

use serde::{Deserialize, Serialize};

use crate::numerics::{sample_complex_gaussian_matrix, CMatrix, RngStream};

/// Antenna counts at the transmitter, relay and receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemDims {
    /// Tx antennas (m).
    pub tx: usize,
    /// Relay antennas (n).
    pub relay: usize,
    /// Rx antennas (l).
    pub rx: usize,
}

impl SystemDims {
    pub fn new(tx: usize, relay: usize, rx: usize) -> Self {
        assert!(tx >= 1 && relay >= 1 && rx >= 1, "antenna counts must be >= 1");
        Self { tx, relay, rx }
    }
}

/// Linear power ratios of the three links. External configuration is in
/// dB; internally everything is linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGains {
    /// Direct Tx-Rx link SNR (P0).
    pub direct: f64,
    /// Tx-relay link SNR (P1).
    pub tx_relay: f64,
    /// Relay-Rx link SNR (P2).
    pub relay_rx: f64,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

impl LinkGains {
    pub fn new(direct: f64, tx_relay: f64, relay_rx: f64) -> Self {
        assert!(
            direct > 0.0 && tx_relay > 0.0 && relay_rx > 0.0,
            "link gains must be positive"
        );
        Self { direct, tx_relay, relay_rx }
    }

    pub fn from_db(direct_db: f64, tx_relay_db: f64, relay_rx_db: f64) -> Self {
        Self::new(
            db_to_linear(direct_db),
            db_to_linear(tx_relay_db),
            db_to_linear(relay_rx_db),
        )
    }
}

/// One realization of the fading channels, drawn once per coherence
/// interval. `direct` is `None` when the scenario has no Tx-Rx link.
#[derive(Debug, Clone)]
pub struct ChannelSet {
    /// Tx-Rx channel (rx x tx), when the direct link is modeled.
    pub direct: Option<CMatrix>,
    /// Tx-relay channel (relay x tx).
    pub tx_relay: CMatrix,
    /// Relay-Rx channel (rx x relay).
    pub relay_rx: CMatrix,
    pub gains: LinkGains,
    pub dims: SystemDims,
}

/// Sub-stream tags for the independent draws inside one interval. The
/// channel lanes are fixed so that H1 and H2 do not depend on whether
/// the direct link is sampled.
pub mod lane {
    pub const CHANNEL_DIRECT: u64 = 0;
    pub const CHANNEL_TX_RELAY: u64 = 1;
    pub const CHANNEL_RELAY_RX: u64 = 2;
    pub const NOISE_DIRECT: u64 = 3;
    pub const NOISE_RELAY_IN: u64 = 4;
    pub const NOISE_RX_IN: u64 = 5;
    pub const SYMBOLS: u64 = 6;
    pub const SOLVER: u64 = 7;
}

/// Draw one channel set. All entries are i.i.d. unit-variance complex
/// Gaussian; the three matrices come from disjoint sub-streams and are
/// mutually independent. The same `stream` reproduces the same set.
pub fn sample_channel_set(
    stream: &RngStream,
    dims: SystemDims,
    gains: LinkGains,
    include_direct: bool,
) -> ChannelSet {
    let direct = include_direct.then(|| {
        sample_complex_gaussian_matrix(&stream.child(lane::CHANNEL_DIRECT), dims.rx, dims.tx)
    });
    let tx_relay =
        sample_complex_gaussian_matrix(&stream.child(lane::CHANNEL_TX_RELAY), dims.relay, dims.tx);
    let relay_rx =
        sample_complex_gaussian_matrix(&stream.child(lane::CHANNEL_RELAY_RX), dims.rx, dims.relay);
    ChannelSet { direct, tx_relay, relay_rx, gains, dims }
}

/// The interval/symbol grid of a Monte-Carlo run: channels are constant
/// within an interval and independent across intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoherenceSchedule {
    pub intervals: u64,
    pub symbols_per_interval: u64,
}

impl CoherenceSchedule {
    pub fn new(intervals: u64, symbols_per_interval: u64) -> Self {
        assert!(intervals >= 1 && symbols_per_interval >= 1);
        Self { intervals, symbols_per_interval }
    }

    pub fn total_symbols(&self) -> u64 {
        self.intervals * self.symbols_per_interval
    }

    /// Root stream of one interval, from which the per-lane sub-streams
    /// (channels, noise, symbols, solver) are derived.
    pub fn interval_stream(&self, seed: u64, interval: u64) -> RngStream {
        RngStream::new(seed, 0).child(interval)
    }
}
