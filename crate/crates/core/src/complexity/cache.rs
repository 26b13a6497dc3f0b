//! Persistent memo cache for complexity searches.
//!
//! One directory of append-only record files, one file per operation kind.
//! Each line is `hex(key) TAB value TAB exact-flag TAB witness`, where the
//! key is `version|kind|target|context|L|T`, `exact-flag` is `1` or `0`, and
//! the witness is the program bits, empty for the empty program and `-` when
//! there is none. Entries are immutable; a lookup hit is bit-identical to a
//! recomputation.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use log::warn;
use parking_lot::{Mutex, RwLock};

use super::{Budget, ComplexityResult};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::machine::{run, Program, MACHINE_VERSION};
use crate::quantity::{LogSum, Quantity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SearchKind {
    Plain,
    Levin,
}

impl SearchKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchKind::Plain => "plain",
            SearchKind::Levin => "levin",
        }
    }

    fn parse(s: &str) -> Option<SearchKind> {
        match s {
            "plain" => Some(SearchKind::Plain),
            "levin" => Some(SearchKind::Levin),
            _ => None,
        }
    }

    const ALL: [SearchKind; 2] = [SearchKind::Plain, SearchKind::Levin];
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub version: String,
    pub kind: SearchKind,
    pub target: BitString,
    /// canonical context encoding
    pub context: BitString,
    pub max_program_bits: u32,
    pub max_steps: u64,
}

impl CacheKey {
    pub fn new(kind: SearchKind, target: &BitString, context: &BitString, budget: &Budget) -> Self {
        CacheKey {
            version: MACHINE_VERSION.to_string(),
            kind,
            target: target.clone(),
            context: context.clone(),
            max_program_bits: budget.max_program_bits(),
            max_steps: budget.max_steps(),
        }
    }

    fn to_hex(&self) -> String {
        hex::encode(format!(
            "{}|{}|{}|{}|{}|{}",
            self.version,
            self.kind.as_str(),
            self.target,
            self.context,
            self.max_program_bits,
            self.max_steps
        ))
    }

    fn from_hex(s: &str) -> Option<CacheKey> {
        let raw = String::from_utf8(hex::decode(s).ok()?).ok()?;
        let parts: Vec<&str> = raw.split('|').collect();
        let [version, kind, target, context, l, t] = parts.as_slice() else {
            return None;
        };
        Some(CacheKey {
            version: version.to_string(),
            kind: SearchKind::parse(kind)?,
            target: target.parse().ok()?,
            context: context.parse().ok()?,
            max_program_bits: l.parse().ok()?,
            max_steps: t.parse().ok()?,
        })
    }
}

fn format_record(key: &CacheKey, result: &ComplexityResult) -> String {
    let witness = match &result.witness {
        Some(p) => p.to_string(),
        None => "-".to_string(),
    };
    format!(
        "{}\t{}\t{}\t{}",
        key.to_hex(),
        result.value,
        if result.exact { 1 } else { 0 },
        witness
    )
}

fn parse_record(line: &str) -> Option<(CacheKey, ComplexityResult)> {
    let fields: Vec<&str> = line.split('\t').collect();
    let [key, value, exact, witness] = fields.as_slice() else {
        return None;
    };
    let key = CacheKey::from_hex(key)?;
    let value: Quantity = value.parse().ok()?;
    if value == Quantity::Undefined {
        return None;
    }
    let exact = match *exact {
        "1" => true,
        "0" => false,
        _ => return None,
    };
    let witness = match *witness {
        "-" => None,
        bits => Some(Program(bits.parse().ok()?)),
    };
    Some((key, ComplexityResult { value, exact, witness }))
}

/// Checks a record by rerunning its witness.
pub fn verify_record(key: &CacheKey, result: &ComplexityResult) -> std::result::Result<(), String> {
    let Some(witness) = &result.witness else {
        return match result.value {
            Quantity::Infinite => Ok(()),
            _ => Err("finite value without a witness".into()),
        };
    };
    let out = run(witness, &key.context, key.max_steps);
    let expected = match key.kind {
        SearchKind::Plain => {
            if !out.halted_with(&key.target) {
                return Err(format!("witness {witness} does not halt with the target"));
            }
            LogSum::int(witness.len() as i64)
        }
        SearchKind::Levin => {
            let Some(t) = out.print_time(&key.target) else {
                return Err(format!("witness {witness} never prints the target"));
            };
            LogSum::int(witness.len() as i64) + LogSum::log2(t.max(1))
        }
    };
    match &result.value {
        Quantity::Finite(v) if v.exact_eq(&expected) => Ok(()),
        other => Err(format!("recorded value {other} but witness gives {expected}")),
    }
}

#[derive(Debug, Default, Clone, serde::Serialize)]
pub struct CacheStats {
    pub entries: BTreeMap<String, usize>,
    pub stale: usize,
    pub corrupt: usize,
}

#[derive(Debug, Default, Clone, serde::Serialize)]
pub struct VerifyReport {
    pub checked: usize,
    /// (file, line number, reason)
    pub failures: Vec<(String, usize, String)>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Memo table shared by complexity models; optionally backed by a
/// directory on disk. Safe for concurrent readers and writers.
#[derive(Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
    entries: RwLock<HashMap<CacheKey, ComplexityResult>>,
    write_lock: Mutex<()>,
}

impl Cache {
    pub fn in_memory() -> Self {
        Cache::default()
    }

    /// Opens (creating if needed) a cache directory and loads its records.
    /// Corrupt lines are skipped with a warning.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        let mut entries = HashMap::new();
        for kind in SearchKind::ALL {
            let path = record_path(&dir, kind);
            if !path.exists() {
                continue;
            }
            for (lineno, line) in BufReader::new(File::open(&path)?).lines().enumerate() {
                let line = line?;
                if line.is_empty() {
                    continue;
                }
                match parse_record(&line) {
                    Some((key, result)) => {
                        entries.entry(key).or_insert(result);
                    }
                    None => warn!("{}:{}: skipping corrupt cache record", path.display(), lineno + 1),
                }
            }
        }
        Ok(Cache {
            dir: Some(dir),
            entries: RwLock::new(entries),
            write_lock: Mutex::new(()),
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn len(&self) -> usize {
        self.entries.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &CacheKey) -> Option<ComplexityResult> {
        self.entries.read().get(key).cloned()
    }

    /// Inserts a result. Re-inserting an identical value is a no-op.
    pub fn insert(&self, key: CacheKey, result: ComplexityResult) -> Result<()> {
        {
            let mut entries = self.entries.write();
            if let Some(existing) = entries.get(&key) {
                if existing != &result {
                    warn!("conflicting cache entry for {:?}; keeping the first", key);
                }
                return Ok(());
            }
            entries.insert(key.clone(), result.clone());
        }
        if let Some(dir) = &self.dir {
            let _guard = self.write_lock.lock();
            let mut f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(record_path(dir, key.kind))?;
            writeln!(f, "{}", format_record(&key, &result))?;
        }
        Ok(())
    }

    pub fn get_or_compute(
        &self,
        key: CacheKey,
        compute: impl FnOnce() -> ComplexityResult,
    ) -> ComplexityResult {
        if let Some(hit) = self.get(&key) {
            return hit;
        }
        let result = compute();
        if let Err(e) = self.insert(key, result.clone()) {
            warn!("could not persist cache record: {e}");
        }
        result
    }
}

fn record_path(dir: &Path, kind: SearchKind) -> PathBuf {
    dir.join(format!("{}.tsv", kind.as_str()))
}

fn scan_dir(dir: &Path) -> Result<Vec<(String, usize, String)>> {
    let mut lines = Vec::new();
    for kind in SearchKind::ALL {
        let path = record_path(dir, kind);
        if !path.exists() {
            continue;
        }
        let name = path.display().to_string();
        for (i, line) in BufReader::new(File::open(&path)?).lines().enumerate() {
            let line = line?;
            if !line.is_empty() {
                lines.push((name.clone(), i + 1, line));
            }
        }
    }
    Ok(lines)
}

/// Entry counts per operation kind for the current machine version.
pub fn stats(dir: &Path) -> Result<CacheStats> {
    let mut out = CacheStats::default();
    for (_, _, line) in scan_dir(dir)? {
        match parse_record(&line) {
            Some((key, _)) if key.version == MACHINE_VERSION => {
                *out.entries.entry(key.kind.as_str().to_string()).or_default() += 1;
            }
            Some(_) => out.stale += 1,
            None => out.corrupt += 1,
        }
    }
    Ok(out)
}

/// Reruns every witness; corrupt lines and mismatches are failures.
pub fn verify(dir: &Path) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    for (file, lineno, line) in scan_dir(dir)? {
        report.checked += 1;
        match parse_record(&line) {
            None => report.failures.push((file, lineno, "corrupt record".into())),
            Some((key, _)) if key.version != MACHINE_VERSION => {}
            Some((key, result)) => {
                if let Err(reason) = verify_record(&key, &result) {
                    report.failures.push((file, lineno, reason));
                }
            }
        }
    }
    Ok(report)
}

/// Removes records written by older machine versions. Returns how many
/// were removed. Corrupt lines are kept for inspection.
pub fn clear_stale(dir: &Path) -> Result<usize> {
    let mut removed = 0;
    for kind in SearchKind::ALL {
        let path = record_path(dir, kind);
        if !path.exists() {
            continue;
        }
        let content = fs::read_to_string(&path)?;
        let mut kept = String::new();
        for line in content.lines().filter(|l| !l.is_empty()) {
            match parse_record(line) {
                Some((key, _)) if key.version != MACHINE_VERSION => removed += 1,
                _ => {
                    kept.push_str(line);
                    kept.push('\n');
                }
            }
        }
        let tmp = path.with_extension("tsv.tmp");
        fs::write(&tmp, kept)?;
        fs::rename(&tmp, &path).map_err(Error::Io)?;
    }
    Ok(removed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bs;
    use crate::complexity::plain_complexity;
    use crate::encoding::Context;

    #[test]
    fn record_round_trip() {
        let b = Budget::new(6, 100).unwrap();
        let key = CacheKey::new(SearchKind::Plain, &bs("0"), &bs(""), &b);
        let res = plain_complexity(&bs("0"), &Context::empty(), &b);
        let line = format_record(&key, &res);
        assert_eq!(parse_record(&line), Some((key.clone(), res.clone())));
        assert!(verify_record(&key, &res).is_ok());
        let none = ComplexityResult {
            value: Quantity::Infinite,
            exact: true,
            witness: None,
        };
        assert_eq!(parse_record(&format_record(&key, &none)).unwrap().1, none);
    }

    #[test]
    fn corrupt_lines_are_rejected() {
        assert!(parse_record("zz\t3\t1\t111").is_none());
        assert!(parse_record("abcd").is_none());
    }

    #[test]
    fn persisted_entries_reload() {
        let dir = tempfile::tempdir().unwrap();
        let b = Budget::new(6, 100).unwrap();
        let key = CacheKey::new(SearchKind::Plain, &bs("0"), &bs(""), &b);
        let res = plain_complexity(&bs("0"), &Context::empty(), &b);
        {
            let cache = Cache::open(dir.path()).unwrap();
            cache.insert(key.clone(), res.clone()).unwrap();
            cache.insert(key.clone(), res.clone()).unwrap();
        }
        let cache = Cache::open(dir.path()).unwrap();
        assert_eq!(cache.get(&key), Some(res));
        assert_eq!(stats(dir.path()).unwrap().entries.get("plain"), Some(&1));
        assert!(verify(dir.path()).unwrap().ok());
    }

    #[test]
    fn stale_versions_are_cleared() {
        let dir = tempfile::tempdir().unwrap();
        let b = Budget::new(6, 100).unwrap();
        let mut key = CacheKey::new(SearchKind::Plain, &bs("0"), &bs(""), &b);
        let res = plain_complexity(&bs("0"), &Context::empty(), &b);
        let current = format_record(&key, &res);
        key.version = "ISLAB-M0".into();
        let old = format_record(&key, &res);
        fs::write(dir.path().join("plain.tsv"), format!("{old}\n{current}\n")).unwrap();
        assert_eq!(stats(dir.path()).unwrap().stale, 1);
        assert_eq!(clear_stale(dir.path()).unwrap(), 1);
        let s = stats(dir.path()).unwrap();
        assert_eq!((s.stale, s.entries.get("plain")), (0, Some(&1)));
    }
}
