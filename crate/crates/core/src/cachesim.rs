//! Fault distributions from cache misses of a memory-access trace.
//!
//! Main memory is the vulnerable component, so faults are planned whenever a
//! line is fetched from it. The trace position of an access is its cycle.
//!
//! Trace files hold one access per line, `<I|R|W> <hex-address> <size>`, with
//! `#` comments and blank lines ignored.

use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::distribution::FaultDistribution;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum AccessKind {
    InstructionFetch,
    DataRead,
    DataWrite,
}

impl AccessKind {
    fn tag(self) -> char {
        match self {
            AccessKind::InstructionFetch => 'I',
            AccessKind::DataRead => 'R',
            AccessKind::DataWrite => 'W',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Access {
    pub kind: AccessKind,
    pub address: u64,
    pub size: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AccessTrace {
    records: Vec<Access>,
}

impl AccessTrace {
    pub fn new(records: Vec<Access>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Parameter("access trace is empty".into()));
        }
        if let Some(pos) = records.iter().position(|a| a.size == 0 || a.size > 64) {
            return Err(Error::Parameter(format!(
                "record {pos}: access size must be 1..=64 bytes"
            )));
        }
        Ok(AccessTrace { records })
    }

    pub fn records(&self) -> &[Access] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut records = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(kind), Some(addr), Some(size), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(Error::parse(
                    line_no,
                    format!("expected `<I|R|W> <addr> <size>`, got `{line}`"),
                ));
            };
            let kind = match kind {
                "I" => AccessKind::InstructionFetch,
                "R" => AccessKind::DataRead,
                "W" => AccessKind::DataWrite,
                other => {
                    return Err(Error::parse(
                        line_no,
                        format!("unknown access kind `{other}`"),
                    ))
                }
            };
            let hex = addr
                .strip_prefix("0x")
                .or_else(|| addr.strip_prefix("0X"))
                .unwrap_or(addr);
            let address = u64::from_str_radix(hex, 16)
                .map_err(|e| Error::parse(line_no, format!("bad address `{addr}`: {e}")))?;
            let size: u8 = size
                .parse()
                .ok()
                .filter(|s| (1..=64).contains(s))
                .ok_or_else(|| Error::parse(line_no, format!("size `{size}` not in 1..=64")))?;
            records.push(Access {
                kind,
                address,
                size,
            });
        }
        AccessTrace::new(records)
    }

    pub fn to_text(&self) -> String {
        self.records
            .iter()
            .map(|a| format!("{} {:x} {}\n", a.kind.tag(), a.address, a.size))
            .collect()
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        AccessTrace::parse(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AccessFilter {
    InstructionOnly,
    DataOnly,
}

impl AccessFilter {
    fn admits(self, kind: AccessKind) -> bool {
        match self {
            AccessFilter::InstructionOnly => kind == AccessKind::InstructionFetch,
            AccessFilter::DataOnly => kind != AccessKind::InstructionFetch,
        }
    }
}

impl FromStr for AccessFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "instruction" | "i" => Ok(AccessFilter::InstructionOnly),
            "data" | "d" => Ok(AccessFilter::DataOnly),
            other => Err(Error::Parameter(format!("unknown access filter `{other}`"))),
        }
    }
}

/// Set-associative LRU cache with write-allocate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CacheConfig {
    pub total_size: u64,
    pub associativity: u64,
    pub line_size: u64,
    pub weight_per_miss: u64,
    pub filter: AccessFilter,
}

impl Default for CacheConfig {
    fn default() -> Self {
        CacheConfig {
            total_size: 4096,
            associativity: 4,
            line_size: 64,
            weight_per_miss: 1,
            filter: AccessFilter::DataOnly,
        }
    }
}

impl CacheConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Parameter(msg));
        if !self.total_size.is_power_of_two() {
            return bad(format!(
                "total_size {} is not a power of two",
                self.total_size
            ));
        }
        if !self.line_size.is_power_of_two() {
            return bad(format!(
                "line_size {} is not a power of two",
                self.line_size
            ));
        }
        if self.associativity == 0 {
            return bad("associativity must be positive".into());
        }
        let set_bytes = self.associativity * self.line_size;
        if self.total_size < set_bytes || self.total_size % set_bytes != 0 {
            return bad(format!(
                "total_size {} must be a positive multiple of associativity x line_size = {set_bytes}",
                self.total_size
            ));
        }
        if self.weight_per_miss == 0 {
            return bad("weight_per_miss must be positive".into());
        }
        Ok(())
    }

    pub fn sets(&self) -> u64 {
        self.total_size / (self.associativity * self.line_size)
    }
}

/// One set keeps its tags ordered from most to least recently used.
struct Cache {
    sets: Vec<Vec<u64>>,
    ways: usize,
}

impl Cache {
    fn new(cfg: &CacheConfig) -> Self {
        Cache {
            sets: vec![Vec::with_capacity(cfg.associativity as usize); cfg.sets() as usize],
            ways: cfg.associativity as usize,
        }
    }

    /// Touches `line` and reports whether it missed.
    fn touch(&mut self, line: u64) -> bool {
        let set_count = self.sets.len() as u64;
        let set = &mut self.sets[(line % set_count) as usize];
        let tag = line / set_count;
        match set.iter().position(|&t| t == tag) {
            Some(pos) => {
                set[..=pos].rotate_right(1);
                false
            }
            None => {
                if set.len() == self.ways {
                    set.pop();
                }
                set.insert(0, tag);
                true
            }
        }
    }
}

/// Replays the filtered trace and returns the miss distribution over
/// `[0, trace.len())`. An access spanning several lines touches each of them
/// and contributes one weighted miss if any line missed.
pub fn simulate(trace: &AccessTrace, cfg: &CacheConfig) -> Result<FaultDistribution> {
    cfg.validate()?;
    let mut cache = Cache::new(cfg);
    let mut misses = Vec::new();
    let mut admitted = false;
    for (t, a) in trace.records.iter().enumerate() {
        if !cfg.filter.admits(a.kind) {
            continue;
        }
        admitted = true;
        let first = a.address / cfg.line_size;
        let last = a.address.saturating_add(a.size as u64 - 1) / cfg.line_size;
        let mut missed = false;
        for line in first..=last {
            missed |= cache.touch(line);
        }
        if missed {
            misses.push((t as u64, cfg.weight_per_miss));
        }
    }
    if !admitted {
        return Err(Error::NoAccesses);
    }
    if misses.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    FaultDistribution::new(misses, 0, trace.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(address: u64) -> Access {
        Access {
            kind: AccessKind::DataRead,
            address,
            size: 4,
        }
    }

    fn cfg(total_size: u64, associativity: u64, line_size: u64) -> CacheConfig {
        CacheConfig {
            total_size,
            associativity,
            line_size,
            ..CacheConfig::default()
        }
    }

    #[test]
    fn same_line_misses_once() {
        let trace =
            AccessTrace::new((0..50).map(|i| read(0x1000 + (i % 16) * 4)).collect()).unwrap();
        let d = simulate(&trace, &CacheConfig::default()).unwrap();
        assert_eq!(d.entries(), &[(0, 1)]);
        assert_eq!((d.t_start(), d.t_end()), (0, 50));
    }

    #[test]
    fn conflicting_lines_thrash() {
        // 2 sets x 1 way of 64-byte lines; 0x000 and 0x080 both map to set 0
        let trace = AccessTrace::new(
            (0..20)
                .map(|i| read(if i % 2 == 0 { 0 } else { 0x80 }))
                .collect(),
        )
        .unwrap();
        let d = simulate(&trace, &cfg(128, 1, 64)).unwrap();
        assert_eq!(d.entries().len(), 20);
        assert!(d.entries().iter().all(|&(_, c)| c == 1));
    }

    #[test]
    fn lru_keeps_recent_lines() {
        // 1 set x 2 ways: A B A C A -> C evicts B, A stays
        let lines = [0u64, 64, 0, 128, 0, 64];
        let trace = AccessTrace::new(lines.iter().map(|&a| read(a)).collect()).unwrap();
        let d = simulate(&trace, &cfg(128, 2, 64)).unwrap();
        let times: Vec<u64> = d.entries().iter().map(|&(t, _)| t).collect();
        assert_eq!(times, vec![0, 1, 3, 5]);
    }

    #[test]
    fn straddling_access_counts_once() {
        let trace = AccessTrace::new(vec![
            Access {
                kind: AccessKind::DataWrite,
                address: 60,
                size: 8,
            },
            read(64),
            read(0),
        ])
        .unwrap();
        let mut c = cfg(1024, 4, 64);
        c.weight_per_miss = 8;
        let d = simulate(&trace, &c).unwrap();
        assert_eq!(d.entries(), &[(0, 8)]);
    }

    #[test]
    fn filters_and_errors() {
        let text = "# trace\nI 400000 4\nR 0x1000 8\nW 2000 4\n\nI 400004 4\n";
        let trace = AccessTrace::parse(text).unwrap();
        assert_eq!(trace.len(), 4);
        let mut c = CacheConfig::default();
        c.filter = AccessFilter::InstructionOnly;
        assert_eq!(simulate(&trace, &c).unwrap().entries(), &[(0, 1)]);
        c.filter = AccessFilter::DataOnly;
        assert_eq!(simulate(&trace, &c).unwrap().entries(), &[(1, 1), (2, 1)]);

        let only_data = AccessTrace::parse("R 0 4\n").unwrap();
        c.filter = AccessFilter::InstructionOnly;
        assert!(matches!(simulate(&only_data, &c), Err(Error::NoAccesses)));

        assert!(AccessTrace::parse("X 0 4\n").is_err());
        assert!(AccessTrace::parse("R zz 4\n").is_err());
        assert!(AccessTrace::parse("R 0 65\n").is_err());
        assert!(AccessTrace::parse("# nothing\n").is_err());
        assert_eq!(AccessTrace::parse(&trace.to_text()).unwrap(), trace);
    }

    #[test]
    fn config_validation() {
        assert!(cfg(4096, 4, 64).validate().is_ok());
        assert!(cfg(128, 4, 64).validate().is_err());
        assert!(cfg(3000, 4, 64).validate().is_err());
        assert!(cfg(4096, 4, 48).validate().is_err());
        assert!(cfg(4096, 0, 64).validate().is_err());
        assert_eq!(cfg(2048, 4, 64).sets(), 8);
        // non-power-of-two ways are fine as long as the sets divide evenly
        assert!(cfg(1024, 2, 64).validate().is_ok());
    }
}
