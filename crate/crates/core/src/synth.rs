//! Seeded synthetic event-log generation and case replication.
//!
//! The generator produces a log with an exact number of distinct variants
//! and activities, which makes it a desk-scale stand-in for the public
//! benchmark logs: replication multiplies events and cases while variant and
//! activity sets stay fixed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::log_model::{EventTable, EventTableBuilder};
use crate::{Error, Result};

/// Parameters of the synthetic generator. Case lengths are uniform in
/// `[min_case_len, max_case_len]`, except that the first variants are
/// constructed to cover the whole activity alphabet.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_cases: usize,
    pub n_activities: usize,
    pub n_variants: usize,
    pub min_case_len: usize,
    pub max_case_len: usize,
    pub seed: u64,
    /// Earliest case start, epoch ms.
    pub base_ts_ms: i64,
    /// Maximum gap between consecutive events of a case, ms.
    pub max_step_ms: i64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_cases: 1000,
            n_activities: 11,
            n_variants: 231,
            min_case_len: 2,
            max_case_len: 8,
            seed: 7,
            // 2024-01-01T00:00:00Z
            base_ts_ms: 1_704_067_200_000,
            max_step_ms: 60_000,
        }
    }
}

/// Generates a deterministic synthetic log for the given seed.
///
/// The result has exactly `n_variants` distinct variants, exactly
/// `n_activities` distinct activities, and `n_cases` cases; infeasible
/// parameter combinations are argument errors.
pub fn generate(cfg: &SynthConfig) -> Result<EventTable> {
    validate(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let activities: Vec<String> = (0..cfg.n_activities).map(|i| format!("act{i}")).collect();

    // Coverage variants first: consecutive alphabet chunks guarantee every
    // activity appears, and distinct first symbols keep them unique.
    let mut variants: Vec<Vec<usize>> = Vec::with_capacity(cfg.n_variants);
    let mut seen = std::collections::HashSet::new();
    let mut next_activity = 0usize;
    while next_activity < cfg.n_activities {
        let chunk_end = (next_activity + cfg.max_case_len).min(cfg.n_activities);
        let mut seq: Vec<usize> = (next_activity..chunk_end).collect();
        let mut pad = 0usize;
        while seq.len() < cfg.min_case_len {
            seq.push(pad % cfg.n_activities);
            pad += 1;
        }
        next_activity = chunk_end;
        seen.insert(seq.clone());
        variants.push(seq);
    }

    // Random variants for the remainder, rejected until distinct.
    while variants.len() < cfg.n_variants {
        let mut attempts = 0;
        loop {
            let len = rng.random_range(cfg.min_case_len..=cfg.max_case_len);
            let seq: Vec<usize> = (0..len)
                .map(|_| rng.random_range(0..cfg.n_activities))
                .collect();
            if seen.insert(seq.clone()) {
                variants.push(seq);
                break;
            }
            attempts += 1;
            if attempts > 100_000 {
                return Err(Error::Argument(
                    "variant space too tight to sample distinct sequences".into(),
                ));
            }
        }
    }

    let mut builder = EventTableBuilder::new();
    for case in 0..cfg.n_cases {
        // The first n_variants cases take one variant each, so every variant
        // is realized; the rest draw uniformly.
        let variant = if case < cfg.n_variants {
            case
        } else {
            rng.random_range(0..cfg.n_variants)
        };
        let case_id = format!("c{case}");
        let mut ts = cfg.base_ts_ms + rng.random_range(0..30 * 86_400_000i64);
        for &activity in &variants[variant] {
            builder.push(&case_id, &activities[activity], ts);
            ts += rng.random_range(0..=cfg.max_step_ms);
        }
    }
    Ok(builder.finish())
}

fn validate(cfg: &SynthConfig) -> Result<()> {
    if cfg.n_cases == 0 || cfg.n_activities == 0 || cfg.n_variants == 0 {
        return Err(Error::Argument(
            "cases, activities, and variants must all be positive".into(),
        ));
    }
    if cfg.min_case_len == 0 || cfg.min_case_len > cfg.max_case_len {
        return Err(Error::Argument(format!(
            "invalid case length range [{}, {}]",
            cfg.min_case_len, cfg.max_case_len
        )));
    }
    if cfg.n_variants > cfg.n_cases {
        return Err(Error::Argument(format!(
            "{} variants cannot be realized by {} cases",
            cfg.n_variants, cfg.n_cases
        )));
    }
    if cfg.max_step_ms < 0 {
        return Err(Error::Argument("max step must be non-negative".into()));
    }
    // Distinct sequences available with lengths in [min, max].
    let mut possible: u128 = 0;
    for len in cfg.min_case_len..=cfg.max_case_len {
        let mut combos: u128 = 1;
        for _ in 0..len {
            combos = combos.saturating_mul(cfg.n_activities as u128);
        }
        possible = possible.saturating_add(combos);
        if possible >= cfg.n_variants as u128 {
            break;
        }
    }
    if possible < cfg.n_variants as u128 {
        return Err(Error::Argument(format!(
            "only {possible} distinct sequences exist for {} activities with lengths {}..={}; \
             cannot realize {} variants",
            cfg.n_activities, cfg.min_case_len, cfg.max_case_len, cfg.n_variants
        )));
    }
    // Every activity must fit into the coverage variants.
    let coverage_variants = cfg.n_activities.div_ceil(cfg.max_case_len);
    if coverage_variants > cfg.n_variants {
        return Err(Error::Argument(format!(
            "{} activities cannot all appear across {} variants of length <= {}",
            cfg.n_activities, cfg.n_variants, cfg.max_case_len
        )));
    }
    Ok(())
}

/// Duplicates every case `k` times under fresh case ids (`id~0` .. `id~k-1`),
/// preserving attributes. Events multiply by `k` while the variant and
/// activity sets stay unchanged.
pub fn replicate(table: &EventTable, k: usize) -> EventTable {
    assert!(k >= 1, "replication factor must be at least 1");
    let mut builder = EventTableBuilder::new();
    for (name, col) in table.attrs() {
        builder = builder
            .attr(name, col.kind())
            .expect("source table has valid attribute names");
    }
    let mut attr_buf = Vec::with_capacity(table.attrs().len());
    for replica in 0..k {
        for row in 0..table.n_events() {
            attr_buf.clear();
            for (_, col) in table.attrs() {
                attr_buf.push(col.get(row));
            }
            let case = format!("{}~{replica}", table.case().value(row));
            builder
                .push_with_attrs(
                    &case,
                    table.activity().value(row),
                    table.timestamps()[row],
                    &attr_buf,
                )
                .expect("decoded values match declared kinds");
        }
    }
    builder.finish()
}
