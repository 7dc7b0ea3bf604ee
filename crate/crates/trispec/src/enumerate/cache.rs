//! Versioned on-disk cache of an enumeration run.
//!
//! The cache is JSON: a header (signature, mode, bound, word cap, geometry,
//! field descriptor), one record per conjugacy-class representative
//! (canonical word, exact trace quadruple, displacement interval endpoints,
//! class data), and a sha256 checksum over the records. Writes go through a
//! temp file and an atomic rename. The cache key hashes signature, mode,
//! bound, word cap and code version; precision is deliberately not part of
//! the key because results are precision-independent by the dedup
//! invariant.

use super::conjugacy::{ClassSet, GeodesicClass};
use super::{Bound, ElementStore, EnumStats, RunGeometry, SubgroupMode};
use crate::fuchsian::traces::{letters_from_string, letters_to_string};
use crate::fuchsian::{Letter, TriangleGroup};
use crate::interval::RealInterval;
use crate::poly::Rat;
use crate::realfield::{FieldDescriptor, FieldElement, SerializedElement};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

pub const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundRecord {
    pub kind: String,
    pub value: String,
}

impl BoundRecord {
    pub fn of(b: &Bound) -> BoundRecord {
        match b {
            Bound::Length(l) => BoundRecord { kind: "length".into(), value: rat_str(l) },
            Bound::Trace(t) => BoundRecord { kind: "trace".into(), value: rat_str(t) },
        }
    }

    pub fn to_bound(&self) -> crate::Result<Bound> {
        let v = parse_rat(&self.value)?;
        match self.kind.as_str() {
            "length" => Ok(Bound::Length(v)),
            "trace" => Ok(Bound::Trace(v)),
            other => Err(crate::Error::CacheCorrupt(format!("unknown bound kind {other}"))),
        }
    }
}

pub fn rat_str(q: &Rat) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rat(s: &str) -> crate::Result<Rat> {
    let (n, d) = s
        .split_once('/')
        .ok_or_else(|| crate::Error::CacheCorrupt(format!("bad rational {s:?}")))?;
    let n = BigInt::from_str(n).map_err(|e| crate::Error::CacheCorrupt(e.to_string()))?;
    let d = BigInt::from_str(d).map_err(|e| crate::Error::CacheCorrupt(e.to_string()))?;
    if d <= BigInt::from(0) {
        return Err(crate::Error::CacheCorrupt("non-positive denominator".into()));
    }
    Ok(Rat::new(n, d))
}

/// One conjugacy-class record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassRecord {
    pub word: String,
    pub quad: [SerializedElement; 4],
    /// Displacement interval endpoints of the representative.
    pub disp: [f64; 2],
    pub trace: SerializedElement,
    /// Exact rational endpoints of the certified length interval.
    pub length: [String; 2],
    pub members: usize,
    pub primitive: bool,
    pub root: Option<(usize, u32)>,
    pub in_squares: bool,
    pub inverse_class: usize,
    pub unoriented_id: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunCache {
    pub format_version: u32,
    pub code_version: String,
    pub signature: String,
    pub mode: SubgroupMode,
    pub bound: BoundRecord,
    pub word_cap: usize,
    pub geometry: RunGeometry,
    pub field_n: u64,
    pub field_degree: usize,
    pub min_poly: Vec<String>,
    pub complete: bool,
    pub total_elements: usize,
    pub stats: EnumStats,
    pub candidates: usize,
    pub pool: usize,
    pub undecided: Vec<(String, String)>,
    pub classes: Vec<ClassRecord>,
    pub checksum: String,
}

fn records_digest(classes: &[ClassRecord]) -> String {
    let payload = serde_json::to_string(classes).expect("serializing class records");
    let mut h = Sha256::new();
    h.update(payload.as_bytes());
    hex(&h.finalize())
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Cache key: hash of (signature, mode, bound, word cap, code version).
pub fn cache_key(sig: &str, mode: SubgroupMode, bound: &Bound, word_cap: usize) -> String {
    let mut h = Sha256::new();
    let b = BoundRecord::of(bound);
    h.update(
        format!(
            "{sig}|{mode}|{}|{}|{word_cap}|{}",
            b.kind,
            b.value,
            env!("CARGO_PKG_VERSION")
        )
        .as_bytes(),
    );
    hex(&h.finalize())[..16].to_string()
}

pub fn cache_path(dir: &Path, sig: &str, mode: SubgroupMode, bound: &Bound, word_cap: usize) -> PathBuf {
    dir.join(format!(
        "{}_{}_{}.json",
        sig.replace(',', "-"),
        mode,
        cache_key(sig, mode, bound, word_cap)
    ))
}

pub fn build_cache(
    group: &TriangleGroup,
    store: &ElementStore,
    set: &ClassSet,
) -> RunCache {
    let classes: Vec<ClassRecord> = set
        .classes
        .iter()
        .map(|c| class_record(group, store, c))
        .collect();
    let checksum = records_digest(&classes);
    RunCache {
        format_version: CACHE_FORMAT_VERSION,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        signature: group.signature().to_string(),
        mode: store.cfg.mode,
        bound: BoundRecord::of(&store.cfg.bound),
        word_cap: store.cfg.word_cap,
        geometry: store.cfg.geometry.clone(),
        field_n: group.field().index_n().expect("ambient field has an index"),
        field_degree: group.field().degree(),
        min_poly: group
            .field()
            .min_poly()
            .coeffs()
            .iter()
            .map(|c| c.to_string())
            .collect(),
        complete: matches!(store.status, super::EnumStatus::Complete),
        total_elements: store.len(),
        stats: store.stats.clone(),
        candidates: set.candidates,
        pool: set.pool,
        undecided: set
            .undecided
            .iter()
            .map(|(w, s)| (w.to_string(), s.clone()))
            .collect(),
        classes,
        checksum,
    }
}

fn class_record(group: &TriangleGroup, store: &ElementStore, c: &GeodesicClass) -> ClassRecord {
    let quad = group.quad_of_letters(&c.rep_word);
    let el = &store.elements[c.rep as usize];
    let disp_lo = el.cosh_disp.lo.max(1.0).acosh();
    let disp_hi = el.cosh_disp.hi.max(1.0).acosh();
    ClassRecord {
        word: letters_to_string(&c.rep_word),
        quad: [
            quad.w.to_serialized(),
            quad.wa.to_serialized(),
            quad.wb.to_serialized(),
            quad.wab.to_serialized(),
        ],
        disp: [disp_lo, disp_hi],
        trace: c.trace.to_serialized(),
        length: [rat_str(c.length.lo()), rat_str(c.length.hi())],
        members: c.members,
        primitive: c.primitive,
        root: c.root,
        in_squares: c.in_squares,
        inverse_class: c.inverse_class,
        unoriented_id: c.unoriented_id,
    }
}

/// Atomic write: temp file in the same directory, then rename.
pub fn write_cache(cache: &RunCache, path: &Path) -> crate::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("json.tmp");
    let payload = serde_json::to_string_pretty(cache)?;
    std::fs::write(&tmp, payload)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_cache(path: &Path) -> crate::Result<RunCache> {
    let text = std::fs::read_to_string(path)
        .map_err(|_| crate::Error::CacheMissing(path.display().to_string()))?;
    let cache: RunCache =
        serde_json::from_str(&text).map_err(|e| crate::Error::CacheCorrupt(e.to_string()))?;
    if cache.format_version != CACHE_FORMAT_VERSION {
        return Err(crate::Error::CacheCorrupt(format!(
            "format version {} != {}",
            cache.format_version, CACHE_FORMAT_VERSION
        )));
    }
    let digest = records_digest(&cache.classes);
    if digest != cache.checksum {
        return Err(crate::Error::CacheCorrupt("checksum mismatch".into()));
    }
    Ok(cache)
}

/// A class as reconstructed from the cache, with exact data re-materialized.
#[derive(Clone)]
pub struct CachedClass {
    pub rep_word: Vec<Letter>,
    pub trace: FieldElement,
    pub length: RealInterval,
    pub members: usize,
    pub primitive: bool,
    pub root: Option<(usize, u32)>,
    pub in_squares: bool,
    pub inverse_class: usize,
    pub unoriented_id: usize,
}

/// A full deserialized run, the input to the spectrum stage.
pub struct CachedRun {
    pub cache: RunCache,
    pub field: Arc<FieldDescriptor>,
    pub classes: Vec<CachedClass>,
}

pub fn materialize(cache: RunCache) -> crate::Result<CachedRun> {
    let field = FieldDescriptor::new(cache.field_n);
    if field.degree() != cache.field_degree {
        return Err(crate::Error::CacheCorrupt("field degree mismatch".into()));
    }
    let mut classes = Vec::with_capacity(cache.classes.len());
    for rec in &cache.classes {
        let trace = FieldElement::from_serialized(&field, &rec.trace)
            .map_err(|e| crate::Error::CacheCorrupt(e.to_string()))?;
        let lo = parse_rat(&rec.length[0])?;
        let hi = parse_rat(&rec.length[1])?;
        let word = letters_from_string(&rec.word)
            .ok_or_else(|| crate::Error::CacheCorrupt(format!("bad word {:?}", rec.word)))?;
        classes.push(CachedClass {
            rep_word: word,
            trace,
            length: RealInterval::new(lo, hi, 96),
            members: rec.members,
            primitive: rec.primitive,
            root: rec.root,
            in_squares: rec.in_squares,
            inverse_class: rec.inverse_class,
            unoriented_id: rec.unoriented_id,
        });
    }
    Ok(CachedRun { cache, field, classes })
}
