//! Subblock detectors for the two-user superposed downlink.
//!
//! Four detectors are implemented, two that exploit the near user's rotated
//! alphabet and two successive-interference-cancellation baselines that
//! work on unrotated transmissions:
//!
//! - [`detect_proposed`]: two-stage per-subcarrier detection. Stage one
//!   scores every subcarrier with an activity log-likelihood ratio, sums
//!   the scores over each legal active set, and keeps the best set. Stage
//!   two decides the symbol on each chosen subcarrier. Because the other
//!   user's alphabet sits on the orthogonal axis, both users decode
//!   directly, without cancellation.
//! - [`detect_rotated_ml`]: joint maximum-likelihood search over all of a
//!   user's subblock realizations, again direct for both users thanks to
//!   the rotation.
//! - [`detect_conventional_ml`]: the classical baseline. The far user
//!   searches its own realizations treating the near user as noise; the
//!   near user first detects and subtracts the far user's subblock, then
//!   searches its own.
//! - [`detect_two_stage_llr_sic`]: the same cancellation structure with the
//!   two-stage detector in place of the joint search.
//!
//! Every detector accepts an optional [`OpCounter`] that tallies complex
//! multiplications under one convention: a joint search pays `k` products
//! per candidate (one per active subcarrier), the two-stage detector pays
//! `M` products per subcarrier in stage one, and stage-two decisions plus
//! cancellation subtractions reuse stage-one products for free. The
//! [`crate::complexity`] module reproduces the same convention in closed
//! form.
//!
//! Numerics: activity scores are evaluated as `(|y|^2 - d_min)/sigma^2`
//! plus a stabilized log-sum-exp over distance gaps, so they stay finite
//! even at the noise-variance floor, where raw exponentials would
//! underflow to zero.

use crate::constellation::Constellation;
use crate::im_mapping::{
    pack_symbols, IndexLookupTable, SubblockPayload, UserParams, UserRole,
};
use crate::{Complex64, Error};
use std::fmt;

/// The four detector families.
///
/// The variants ordering is alphabetical by [`Self::name`], which is also
/// the order report rows sort into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DetectorKind {
    ConventionalMl,
    Proposed,
    RotatedMl,
    TwoStageLlrSic,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 4] = [
        DetectorKind::ConventionalMl,
        DetectorKind::Proposed,
        DetectorKind::RotatedMl,
        DetectorKind::TwoStageLlrSic,
    ];

    /// Stable machine-readable name, used in config files and CSV rows.
    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::ConventionalMl => "conventional_ml",
            DetectorKind::Proposed => "proposed",
            DetectorKind::RotatedMl => "rotated_ml",
            DetectorKind::TwoStageLlrSic => "two_stage_llr_sic",
        }
    }

    /// Inverse of [`Self::name`].
    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|kind| kind.name() == s)
    }

    /// Whether the detector expects the near user to transmit on the
    /// rotated alphabet.
    pub fn uses_rotation(self) -> bool {
        matches!(self, DetectorKind::Proposed | DetectorKind::RotatedMl)
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Tally of complex multiplications spent inside detectors.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounter {
    pub complex_muls: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    fn add(&mut self, n: u64) {
        self.complex_muls += n;
    }
}

fn bump(counter: &mut Option<&mut OpCounter>, n: u64) {
    if let Some(c) = counter {
        c.add(n);
    }
}

/// One complete subblock hypothesis: the payload it encodes and the
/// nonzero constellation points it places.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub payload: SubblockPayload,
    /// `(subcarrier index, point)` per active rank, indices ascending.
    pub active: Vec<(usize, Complex64)>,
}

/// Every realization of one user's subblock, in payload order (index word
/// major, symbol word minor).
#[derive(Debug, Clone)]
pub struct RealizationSet {
    n: usize,
    k: usize,
    realizations: Vec<Realization>,
}

impl RealizationSet {
    /// Joint-search spaces beyond `2^MAX_BITS` candidates are refused.
    pub const MAX_BITS: u32 = 20;

    pub fn enumerate(
        table: &IndexLookupTable,
        alphabet: &Constellation,
    ) -> Result<Self, Error> {
        let k = table.k();
        let bits = alphabet.bits_per_symbol();
        let total_bits = table.index_bits() + k as u32 * bits;
        if total_bits > Self::MAX_BITS {
            return Err(Error::CandidateSpaceTooLarge {
                bits: total_bits,
                cap: Self::MAX_BITS,
            });
        }
        let symbol_words = 1u32 << (k as u32 * bits);
        let mut realizations =
            Vec::with_capacity(table.num_sets() << (k as u32 * bits));
        for index_word in 0..table.num_sets() as u32 {
            let indices = table.active_indices(index_word);
            for symbol_word in 0..symbol_words {
                let payload = SubblockPayload { index_word, symbol_word };
                let active = indices
                    .iter()
                    .enumerate()
                    .map(|(rank, &idx)| (idx, alphabet.point(payload.symbol_at(k, bits, rank))))
                    .collect();
                realizations.push(Realization { payload, active });
            }
        }
        Ok(Self { n: table.n(), k, realizations })
    }

    pub fn len(&self) -> usize {
        self.realizations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.realizations.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Realization> {
        self.realizations.iter()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// One user's detection context: role, power share, index table, alphabet,
/// and the enumerated realization list for joint searches.
#[derive(Debug, Clone)]
pub struct UserLink {
    role: UserRole,
    power: f64,
    table: IndexLookupTable,
    alphabet: Constellation,
    realizations: RealizationSet,
}

impl UserLink {
    /// Builds the table and realization list for `params`, transmitting
    /// with `alphabet` at allocated power `power`.
    pub fn new(
        params: UserParams,
        alphabet: Constellation,
        power: f64,
    ) -> Result<Self, Error> {
        if alphabet.order() != params.m {
            return Err(Error::InvalidModOrder(alphabet.order()));
        }
        assert!(power > 0.0 && power.is_finite(), "power must be positive and finite");
        let table = IndexLookupTable::new(params.n, params.k)?;
        let realizations = RealizationSet::enumerate(&table, &alphabet)?;
        Ok(Self { role: params.role, power, table, alphabet, realizations })
    }

    pub fn role(&self) -> UserRole {
        self.role
    }

    /// Allocated power share.
    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn table(&self) -> &IndexLookupTable {
        &self.table
    }

    pub fn alphabet(&self) -> &Constellation {
        &self.alphabet
    }

    pub fn realizations(&self) -> &RealizationSet {
        &self.realizations
    }
}

/// Decoded subblock plus detector diagnostics.
///
/// Diagnostic vectors are filled by the two-stage detectors and left empty
/// by the joint searches.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub payload: SubblockPayload,
    /// Winning set score (two-stage) or negated Euclidean distance (joint
    /// search); larger is more confident either way.
    pub score: f64,
    /// Stage-one activity score per subcarrier.
    pub subcarrier_llrs: Vec<f64>,
    /// Summed activity score per legal set, in index-word order.
    pub set_scores: Vec<f64>,
    /// Stage-two decision margin per active rank.
    pub symbol_margins: Vec<f64>,
}

/// Activity log-likelihood ratio of a single subcarrier: log odds that it
/// carries one of the user's `M` points at amplitude `sqrt(power) * h`
/// against it being silent, including the `ln(k / (n - k))` prior from the
/// subblock geometry.
pub fn llr_stage1(
    y: Complex64,
    h: Complex64,
    power: f64,
    noise_var: f64,
    k: usize,
    n: usize,
    alphabet: &Constellation,
) -> f64 {
    let mut dists = [0.0f64; 64];
    let m = alphabet.order();
    assert!(m <= dists.len(), "alphabet too large for the stack buffer");
    stage1_score(y, h, power.sqrt(), noise_var, prior(k, n), alphabet, &mut dists[..m])
}

/// BPSK fast path of [`llr_stage1`] for hypothesis points `q0`, `q1`:
/// `prior + (|y|^2 - d_min)/sigma^2 + ln(1 + exp(-|gap|))`.
pub fn llr_stage1_bpsk(
    y: Complex64,
    h: Complex64,
    power: f64,
    noise_var: f64,
    k: usize,
    n: usize,
    q0: Complex64,
    q1: Complex64,
) -> f64 {
    let scale = power.sqrt();
    let d0 = (y - scale * (h * q0)).norm_sqr();
    let d1 = (y - scale * (h * q1)).norm_sqr();
    let d_min = d0.min(d1);
    let gap = (d0 - d1).abs() / noise_var;
    prior(k, n) + (y.norm_sqr() - d_min) / noise_var + (-gap).exp().ln_1p()
}

fn prior(k: usize, n: usize) -> f64 {
    (k as f64).ln() - ((n - k) as f64).ln()
}

/// Shared stage-one kernel; fills `dists` with the squared distance to
/// each hypothesis point and returns the activity score.
fn stage1_score(
    y: Complex64,
    h: Complex64,
    scale: f64,
    noise_var: f64,
    prior: f64,
    alphabet: &Constellation,
    dists: &mut [f64],
) -> f64 {
    let mut d_min = f64::INFINITY;
    for (d, q) in dists.iter_mut().zip(alphabet.points()) {
        *d = (y - scale * (h * q)).norm_sqr();
        d_min = d_min.min(*d);
    }
    let sum: f64 = dists.iter().map(|d| (-(d - d_min) / noise_var).exp()).sum();
    prior + (y.norm_sqr() - d_min) / noise_var + sum.ln()
}

/// Sums per-subcarrier activity scores over every legal set and picks the
/// best one (lowest index word on ties). Returns the winning index word
/// and the per-set scores.
pub fn select_active_set(
    subcarrier_llrs: &[f64],
    table: &IndexLookupTable,
) -> (u32, Vec<f64>) {
    assert_eq!(subcarrier_llrs.len(), table.n(), "one score per subcarrier");
    let mut best_word = 0u32;
    let mut best_score = f64::NEG_INFINITY;
    let mut scores = Vec::with_capacity(table.num_sets());
    for (word, set) in table.sets().iter().enumerate() {
        let score: f64 = set.iter().map(|&i| subcarrier_llrs[i]).sum();
        scores.push(score);
        if score > best_score {
            best_score = score;
            best_word = word as u32;
        }
    }
    (best_word, scores)
}

/// Stage-two symbol margin for binary alphabets:
/// `(|y - s h q1|^2 - |y - s h q0|^2) / sigma^2`. Non-negative margins
/// decide for `q0`.
pub fn llr_stage2(
    y: Complex64,
    h: Complex64,
    power: f64,
    noise_var: f64,
    q0: Complex64,
    q1: Complex64,
) -> f64 {
    let scale = power.sqrt();
    let d0 = (y - scale * (h * q0)).norm_sqr();
    let d1 = (y - scale * (h * q1)).norm_sqr();
    (d1 - d0) / noise_var
}

/// Two-stage detection of one subblock against a single user's hypotheses;
/// whatever the other user contributes is treated as noise or, with
/// orthogonal alphabets, ignored outright.
///
/// Counts `M` complex products per subcarrier. Stage two reuses the
/// stage-one distances, so it adds nothing.
pub fn detect_llr(
    y: &[Complex64],
    h: &[Complex64],
    power: f64,
    noise_var: f64,
    table: &IndexLookupTable,
    alphabet: &Constellation,
    mut counter: Option<&mut OpCounter>,
) -> DetectionResult {
    let n = table.n();
    let k = table.k();
    let m = alphabet.order();
    assert_eq!(y.len(), n, "subblock length mismatch");
    assert_eq!(h.len(), n, "response length mismatch");
    assert!(noise_var > 0.0, "noise variance must be positive");

    let scale = power.sqrt();
    let pri = prior(k, n);
    let mut dists = vec![0.0f64; n * m];
    let mut lambdas = vec![0.0f64; n];
    for i in 0..n {
        lambdas[i] = stage1_score(
            y[i],
            h[i],
            scale,
            noise_var,
            pri,
            alphabet,
            &mut dists[i * m..(i + 1) * m],
        );
        bump(&mut counter, m as u64);
    }

    let (index_word, set_scores) = select_active_set(&lambdas, table);
    let score = set_scores[index_word as usize];

    let mut symbols = Vec::with_capacity(k);
    let mut margins = Vec::with_capacity(k);
    for &idx in table.active_indices(index_word) {
        let d = &dists[idx * m..(idx + 1) * m];
        if m == 2 {
            // Margin signs follow the stage-two rule: >= 0 decides symbol 0.
            let margin = (d[1] - d[0]) / noise_var;
            margins.push(margin);
            symbols.push(if margin >= 0.0 { 0 } else { 1 });
        } else {
            let (best, runner_up) = two_smallest(d);
            margins.push((d[runner_up] - d[best]) / noise_var);
            symbols.push(best as u32);
        }
    }

    DetectionResult {
        payload: SubblockPayload {
            index_word,
            symbol_word: pack_symbols(&symbols, alphabet.bits_per_symbol()),
        },
        score,
        subcarrier_llrs: lambdas,
        set_scores,
        symbol_margins: margins,
    }
}

/// Indices of the smallest and second-smallest entries (ties resolve to
/// the lower index).
fn two_smallest(values: &[f64]) -> (usize, usize) {
    debug_assert!(values.len() >= 2);
    let (mut best, mut second) = if values[1] < values[0] { (1, 0) } else { (0, 1) };
    for (i, &v) in values.iter().enumerate().skip(2) {
        if v < values[best] {
            second = best;
            best = i;
        } else if v < values[second] {
            second = i;
        }
    }
    (best, second)
}

/// Joint maximum-likelihood search over one user's realizations: the
/// candidate minimizing `|y - sqrt(power) diag(h) e|^2` wins (first
/// enumerated candidate on exact ties). Counts `k` complex products per
/// candidate.
pub fn detect_ml(
    y: &[Complex64],
    h: &[Complex64],
    power: f64,
    set: &RealizationSet,
    mut counter: Option<&mut OpCounter>,
) -> DetectionResult {
    let (best, dist) = ml_argmin(y, h, power.sqrt(), set, &mut counter);
    DetectionResult {
        payload: set.realizations[best].payload,
        score: -dist,
        subcarrier_llrs: Vec::new(),
        set_scores: Vec::new(),
        symbol_margins: Vec::new(),
    }
}

fn ml_argmin(
    y: &[Complex64],
    h: &[Complex64],
    scale: f64,
    set: &RealizationSet,
    counter: &mut Option<&mut OpCounter>,
) -> (usize, f64) {
    assert_eq!(y.len(), set.n(), "subblock length mismatch");
    assert_eq!(h.len(), set.n(), "response length mismatch");

    // Silent subcarriers contribute |y_i|^2 to every candidate; start from
    // the all-silent distance and adjust only the active entries.
    let y_energy: f64 = y.iter().map(|v| v.norm_sqr()).sum();
    let mut best = 0usize;
    let mut best_dist = f64::INFINITY;
    for (c, cand) in set.realizations.iter().enumerate() {
        let mut dist = y_energy;
        for &(idx, point) in &cand.active {
            dist += (y[idx] - scale * (h[idx] * point)).norm_sqr() - y[idx].norm_sqr();
        }
        bump(counter, set.k as u64);
        if dist < best_dist {
            best_dist = dist;
            best = c;
        }
    }
    (best, best_dist)
}

/// Subtracts a reconstructed subblock, `y_i - sqrt(power) h_i q_i` on the
/// given active points. The subtraction reuses already-priced products and
/// adds nothing to the counter.
fn cancel(
    y: &mut [Complex64],
    h: &[Complex64],
    power: f64,
    active: &[(usize, Complex64)],
) {
    let scale = power.sqrt();
    for &(idx, point) in active {
        y[idx] -= scale * (h[idx] * point);
    }
}

/// Rotation-aware joint search: each user searches only its own (rotated)
/// realizations, directly on the composite signal.
pub fn detect_rotated_ml(
    y: &[Complex64],
    h: &[Complex64],
    me: &UserLink,
    counter: Option<&mut OpCounter>,
) -> DetectionResult {
    detect_ml(y, h, me.power, &me.realizations, counter)
}

/// Conventional joint-search baseline on unrotated alphabets. The far user
/// searches directly, treating the near user as noise; the near user
/// detects the far user's subblock first, subtracts it, and then searches
/// its own.
///
/// # Panics
/// Panics if `me` and `partner` share a role.
pub fn detect_conventional_ml(
    y: &[Complex64],
    h: &[Complex64],
    me: &UserLink,
    partner: &UserLink,
    mut counter: Option<&mut OpCounter>,
) -> DetectionResult {
    assert_ne!(me.role, partner.role, "need one link per user");
    match me.role {
        UserRole::Far => detect_ml(y, h, me.power, &me.realizations, counter),
        UserRole::Near => {
            let (pbest, _) =
                ml_argmin(y, h, partner.power.sqrt(), &partner.realizations, &mut counter);
            let mut residual = y.to_vec();
            cancel(
                &mut residual,
                h,
                partner.power,
                &partner.realizations.realizations[pbest].active,
            );
            detect_ml(&residual, h, me.power, &me.realizations, counter)
        }
    }
}

/// Two-stage baseline with cancellation, on unrotated alphabets: the far
/// user runs the two-stage detector directly; the near user two-stage
/// detects the far user, subtracts the reconstruction, and detects itself.
///
/// # Panics
/// Panics if `me` and `partner` share a role.
pub fn detect_two_stage_llr_sic(
    y: &[Complex64],
    h: &[Complex64],
    noise_var: f64,
    me: &UserLink,
    partner: &UserLink,
    mut counter: Option<&mut OpCounter>,
) -> DetectionResult {
    assert_ne!(me.role, partner.role, "need one link per user");
    match me.role {
        UserRole::Far => detect_llr(
            y,
            h,
            me.power,
            noise_var,
            &me.table,
            &me.alphabet,
            counter,
        ),
        UserRole::Near => {
            let partner_est = detect_llr(
                y,
                h,
                partner.power,
                noise_var,
                &partner.table,
                &partner.alphabet,
                counter.as_deref_mut(),
            );
            let mut residual = y.to_vec();
            let bits = partner.alphabet.bits_per_symbol();
            let k = partner.table.k();
            let active: Vec<(usize, Complex64)> = partner
                .table
                .active_indices(partner_est.payload.index_word)
                .iter()
                .enumerate()
                .map(|(rank, &idx)| {
                    (idx, partner.alphabet.point(partner_est.payload.symbol_at(k, bits, rank)))
                })
                .collect();
            cancel(&mut residual, h, partner.power, &active);
            detect_llr(
                &residual,
                h,
                me.power,
                noise_var,
                &me.table,
                &me.alphabet,
                counter,
            )
        }
    }
}

/// Rotation-aware two-stage detection: each user scores its own (rotated)
/// hypotheses directly on the composite signal, with no cancellation.
pub fn detect_proposed(
    y: &[Complex64],
    h: &[Complex64],
    noise_var: f64,
    me: &UserLink,
    counter: Option<&mut OpCounter>,
) -> DetectionResult {
    detect_llr(y, h, me.power, noise_var, &me.table, &me.alphabet, counter)
}
