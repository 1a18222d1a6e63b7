use thiserror::Error;

/// Crate-wide error type.
///
/// Construction and configuration paths return `Result<_, Error>`; hot-path
/// functions whose preconditions are established at construction time use
/// debug assertions instead.
#[derive(Debug, Error)]
pub enum Error {
    /// Subblock geometry must satisfy 1 <= k <= n.
    #[error("invalid subblock geometry: n = {n}, k = {k} (need 1 <= k <= n)")]
    InvalidSubblock { n: usize, k: usize },

    /// Modulation order must be a power of two, at least 2.
    #[error("invalid modulation order {0} (need a power of two >= 2)")]
    InvalidModOrder(usize),

    /// The near user's power fraction must lie strictly inside (0, 0.5).
    #[error("invalid power fraction {0} (need 0 < gamma < 0.5)")]
    InvalidPowerSplit(f64),

    /// Total transmit power must be positive and finite.
    #[error("invalid total power {0} (need a positive finite value)")]
    InvalidTotalPower(f64),

    /// Frame length must be a positive multiple of the subblock length.
    #[error("invalid frame layout: {n_total} subcarriers is not a positive multiple of subblock length {subblock_len}")]
    InvalidFrameLayout { n_total: usize, subblock_len: usize },

    /// The cyclic prefix is too short for the channel's delay spread.
    #[error("cyclic prefix of {cp_len} samples cannot absorb {taps} channel taps (need cp_len >= taps - 1)")]
    ShortCyclicPrefix { cp_len: usize, taps: usize },

    /// The channel must have at least one tap.
    #[error("channel needs at least one tap")]
    EmptyChannel,

    /// Joint enumeration of every subblock realization is capped to keep
    /// candidate lists addressable.
    #[error("candidate space of 2^{bits} realizations exceeds the enumeration cap of 2^{cap}")]
    CandidateSpaceTooLarge { bits: u32, cap: u32 },

    /// A config line could not be parsed.
    #[error("config line {line}: {msg}")]
    ConfigParse { line: usize, msg: String },

    /// A config key carried an unusable value.
    #[error("config key `{key}`: {msg}")]
    ConfigValue { key: String, msg: String },

    /// The requested SNR sweep is empty or inverted.
    #[error("invalid SNR sweep: start {start} dB, stop {stop} dB, step {step} dB")]
    InvalidSweep { start: f64, stop: f64, step: f64 },

    /// Underlying I/O failure while reading config or writing results.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
