use ckptsel::cachesim::{simulate, Access, AccessFilter, AccessKind, AccessTrace, CacheConfig};
use proptest::prelude::*;

fn trace_strategy() -> impl Strategy<Value = AccessTrace> {
    prop::collection::vec((0u8..3, 0u64..(1 << 14), 1u8..=16), 1..400).prop_map(|raw| {
        let records = raw
            .into_iter()
            .map(|(kind, address, size)| Access {
                kind: match kind {
                    0 => AccessKind::InstructionFetch,
                    1 => AccessKind::DataRead,
                    _ => AccessKind::DataWrite,
                },
                address,
                size,
            })
            .collect();
        AccessTrace::new(records).unwrap()
    })
}

fn misses(trace: &AccessTrace, cfg: &CacheConfig) -> u64 {
    simulate(trace, cfg).map_or(0, |d| d.total())
}

proptest! {
    /// More ways over the same sets can only keep more lines resident.
    #[test]
    fn more_ways_never_miss_more(trace in trace_strategy(), sets in prop::sample::select(vec![1u64, 4, 16])) {
        for filter in [AccessFilter::DataOnly, AccessFilter::InstructionOnly] {
            let mut prev = u64::MAX;
            for ways in [1u64, 2, 4, 8] {
                let cfg = CacheConfig {
                    total_size: sets * ways * 32,
                    associativity: ways,
                    line_size: 32,
                    weight_per_miss: 1,
                    filter,
                };
                let m = misses(&trace, &cfg);
                prop_assert!(m <= prev, "{ways} ways: {m} > {prev}");
                prev = m;
            }
        }
    }

    #[test]
    fn replay_is_deterministic(trace in trace_strategy()) {
        let cfg = CacheConfig::default();
        let again = AccessTrace::parse(&trace.to_text()).unwrap();
        prop_assert_eq!(simulate(&trace, &cfg).ok(), simulate(&again, &cfg).ok());
    }

    #[test]
    fn weight_scales_counts(trace in trace_strategy(), w in 1u64..10) {
        let base = CacheConfig::default();
        let heavy = CacheConfig { weight_per_miss: w, ..base.clone() };
        prop_assert_eq!(misses(&trace, &heavy), w * misses(&trace, &base));
    }
}

#[test]
fn undersized_cache_is_rejected() {
    let cfg = CacheConfig {
        total_size: 128,
        associativity: 4,
        line_size: 64,
        ..CacheConfig::default()
    };
    let trace = AccessTrace::parse("R 0 4\n").unwrap();
    assert!(simulate(&trace, &cfg).is_err());
}
