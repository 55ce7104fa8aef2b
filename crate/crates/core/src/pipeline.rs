//! End-to-end computation of the invariant-space dimension per prime,
//! the dense oracle, checkpointing and reports.
//!
//! Each prime gets an independent pass. A pass walks stages in a fixed
//! order: relations whose lowest-degree part has degree `d`, for `d` from the
//! cutoff down to 1, split by the largest number of non-`q_{i,5}` letters in a
//! lowest-degree term. Reduced coordinate vectors are memoized and kept in
//! normal form modulo the rows already eliminated, which keeps them short.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modlinalg::{Echelon, LinAlgError, Prime, RankReport, SparseRow};
use crate::qalgebra::{monomial_count, QMonomial, SignedBraidLetter, Zp};
use crate::relations::{
    braid_instances_at, braid_relation_set, bottom_generators, lower_letter_count, reversal_instances,
    reversal_instances_at, top_generators, topological_instances_at, write_ndjson, braid_instances,
    topological_instances, Family, RelationError, RelationInstance,
};
use crate::rewriter::{CoordSystem, ModCoords, Reducer, RewriteError, TBasis, DEFAULT_FUEL};

const CHECKPOINT_MAGIC: &[u8; 4] = b"MKQC";
const CHECKPOINT_VERSION: u32 = 1;

/// Primes used when none are given.
pub const DEFAULT_PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 89, 131];

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

impl PipelineError {
    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Rewrite(RewriteError::FuelExhausted { .. }) => 2,
            PipelineError::Config(_) | PipelineError::LinAlg(LinAlgError::NotPrime(_)) => 3,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub strands: u8,
    pub cutoff: u8,
    pub primes: Vec<u64>,
    /// Standard families to use; reversal is controlled by `reversal`.
    pub families: Vec<Family>,
    pub reversal: bool,
    pub checkpoint: Option<PathBuf>,
    pub threads: usize,
    pub fuel: u64,
    #[serde(skip)]
    pub dump_relations: Option<PathBuf>,
    /// Stop after this many stages per prime (testing hook).
    #[serde(skip)]
    pub stop_after_stages: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            strands: 5,
            cutoff: 6,
            primes: DEFAULT_PRIMES.to_vec(),
            families: vec![
                Family::Commutation,
                Family::ThreeStrand,
                Family::FourStrand,
                Family::TopologicalLeft,
                Family::TopologicalRight,
            ],
            reversal: false,
            checkpoint: None,
            threads: 1,
            fuel: DEFAULT_FUEL,
            dump_relations: None,
            stop_after_stages: None,
        }
    }
}

impl RunConfig {
    pub fn with_cutoff(cutoff: u8, primes: &[u64]) -> Self {
        Self {
            cutoff,
            primes: primes.to_vec(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<Vec<Prime>, PipelineError> {
        if self.strands != 5 {
            return Err(PipelineError::Config(format!(
                "only 5 strands are supported, got {}",
                self.strands
            )));
        }
        if self.cutoff > 6 {
            return Err(PipelineError::Config(format!("cutoff {} exceeds 6", self.cutoff)));
        }
        if self.primes.is_empty() {
            return Err(PipelineError::Config("no primes given".into()));
        }
        if self.threads == 0 {
            return Err(PipelineError::Config("thread count must be positive".into()));
        }
        if self.families.contains(&Family::Reversal) {
            return Err(PipelineError::Config("enable reversal with the reversal flag".into()));
        }
        let mut primes = Vec::new();
        for &p in &self.primes {
            let prime = Prime::new(p).map_err(|e| PipelineError::Config(e.to_string()))?;
            if primes.contains(&prime) {
                return Err(PipelineError::Config(format!("prime {p} listed twice")));
            }
            primes.push(prime);
        }
        Ok(primes)
    }

    fn fingerprint(&self) -> u64 {
        let mut f = self.cutoff as u64;
        for fam in &self.families {
            f |= 1 << (8 + *fam as u64);
        }
        f | (self.reversal as u64) << 16
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageGroup {
    Standard,
    Reversal,
}

/// One unit of work between checkpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub group: StageGroup,
    pub degree: usize,
    pub bucket: usize,
}

impl Stage {
    pub fn label(&self) -> String {
        match self.group {
            StageGroup::Standard => format!("degree {} bucket {}", self.degree, self.bucket),
            StageGroup::Reversal => format!("reversal degree {}", self.degree),
        }
    }
}

pub fn stages(cfg: &RunConfig) -> Vec<Stage> {
    let mut out = Vec::new();
    for d in (1..=cfg.cutoff as usize).rev() {
        for k in 0..=d {
            out.push(Stage {
                group: StageGroup::Standard,
                degree: d,
                bucket: k,
            });
        }
    }
    if cfg.reversal {
        for d in (1..=cfg.cutoff as usize).rev() {
            out.push(Stage {
                group: StageGroup::Reversal,
                degree: d,
                bucket: 0,
            });
        }
    }
    out
}

/// Largest count of non-`q_{i,5}` letters among lowest-degree terms.
fn bucket(inst: &RelationInstance) -> usize {
    let d = inst.min_degree();
    inst.terms
        .iter()
        .filter(|(x, _)| x.len() == d)
        .map(|(x, _)| lower_letter_count(*x))
        .max()
        .unwrap_or(0)
}

fn stage_instances(cfg: &RunConfig, stage: Stage) -> Box<dyn Iterator<Item = RelationInstance>> {
    let cutoff = cfg.cutoff;
    match stage.group {
        StageGroup::Reversal => Box::new(reversal_instances_at(stage.degree)),
        StageGroup::Standard => {
            let fams = cfg.families.clone();
            let k = stage.bucket;
            Box::new(
                braid_instances_at(cutoff, stage.degree)
                    .chain(topological_instances_at(cutoff, stage.degree))
                    .filter(move |i| fams.contains(&i.family) && bucket(i) == k),
            )
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyCounts {
    pub generated: u64,
    /// Rows that raised the rank, per prime.
    pub nontrivial: BTreeMap<u32, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeReport {
    #[serde(flatten)]
    pub rank: RankReport,
    /// Corank from the standard families alone, when reversal is on.
    pub corank_without_reversal: Option<u64>,
}

/// What the prime battery says about the torsion subgroup `X` of
/// `Q = Z^r x X`, assuming some listed prime does not divide `|X|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionSummary {
    pub min_corank: u64,
    pub order_divisible_by: Vec<u32>,
    pub order_not_divisible_by: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageTiming {
    pub prime: u32,
    pub stage: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub s_size: u64,
    pub t_size: u32,
    pub families: BTreeMap<Family, FamilyCounts>,
    pub primes: Vec<PrimeReport>,
    pub torsion: TorsionSummary,
    pub complete: bool,
    pub timings: Vec<StageTiming>,
}

impl Report {
    pub fn corank(&self, p: u32) -> Option<u64> {
        self.primes.iter().find(|r| r.rank.prime == p).map(|r| r.rank.corank)
    }

    /// The report with timings removed, for comparisons.
    pub fn without_timings(&self) -> Report {
        Report {
            timings: Vec::new(),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// State of one prime pass, as saved in a checkpoint.
struct PassState {
    prime: Prime,
    stages_done: usize,
    generated: BTreeMap<Family, u64>,
    nontrivial: BTreeMap<Family, u64>,
    corank_without_reversal: Option<u64>,
    reducer: Reducer<ModCoords>,
}

struct PassOutcome {
    prime: Prime,
    stages_done: usize,
    generated: BTreeMap<Family, u64>,
    nontrivial: BTreeMap<Family, u64>,
    corank_without_reversal: Option<u64>,
    rank: RankReport,
    timings: Vec<StageTiming>,
}

fn checkpoint_file(dir: &Path, prime: Prime) -> PathBuf {
    dir.join(format!("prime-{}.ckpt", prime.get()))
}

fn family_code(f: Family) -> u8 {
    f as u8
}

fn family_from_code(c: u8) -> Option<Family> {
    Family::ALL.get(c as usize).copied()
}

fn write_counts<W: Write>(w: &mut W, m: &BTreeMap<Family, u64>) -> std::io::Result<()> {
    w.write_u32::<LittleEndian>(m.len() as u32)?;
    for (f, n) in m {
        w.write_u8(family_code(*f))?;
        w.write_u64::<LittleEndian>(*n)?;
    }
    Ok(())
}

fn read_counts<R: Read>(r: &mut R) -> Result<BTreeMap<Family, u64>, PipelineError> {
    let n = r.read_u32::<LittleEndian>()?;
    let mut m = BTreeMap::new();
    for _ in 0..n {
        let f = family_from_code(r.read_u8()?).ok_or_else(|| PipelineError::Checkpoint("bad family code".into()))?;
        m.insert(f, r.read_u64::<LittleEndian>()?);
    }
    Ok(m)
}

impl PassState {
    fn fresh(cfg: &RunConfig, prime: Prime) -> Self {
        let basis = TBasis::new(cfg.cutoff);
        Self {
            prime,
            stages_done: 0,
            generated: BTreeMap::new(),
            nontrivial: BTreeMap::new(),
            corank_without_reversal: None,
            reducer: Reducer::new(cfg.cutoff, ModCoords::new(prime, basis.len())).with_fuel(cfg.fuel),
        }
    }

    fn save(&self, cfg: &RunConfig, dir: &Path) -> Result<(), PipelineError> {
        fs::create_dir_all(dir)?;
        let path = checkpoint_file(dir, self.prime);
        let tmp = path.with_extension("tmp");
        {
            let mut w = BufWriter::new(fs::File::create(&tmp)?);
            w.write_all(CHECKPOINT_MAGIC)?;
            w.write_u32::<LittleEndian>(CHECKPOINT_VERSION)?;
            w.write_u64::<LittleEndian>(cfg.fingerprint())?;
            w.write_u32::<LittleEndian>(self.prime.get())?;
            w.write_u64::<LittleEndian>(self.stages_done as u64)?;
            write_counts(&mut w, &self.generated)?;
            write_counts(&mut w, &self.nontrivial)?;
            w.write_u64::<LittleEndian>(self.corank_without_reversal.map_or(u64::MAX, |c| c))?;
            self.reducer.system().echelon().write_to(&mut w)?;
            w.write_u64::<LittleEndian>(self.reducer.cache_len() as u64)?;
            let mut entries: Vec<_> = self.reducer.cached().collect();
            entries.sort_by_key(|(k, _)| **k);
            for (k, v) in entries {
                w.write_u64::<LittleEndian>(k.raw())?;
                w.write_u32::<LittleEndian>(v.len() as u32)?;
                for &(c, a) in v.entries() {
                    w.write_u32::<LittleEndian>(c)?;
                    w.write_u32::<LittleEndian>(a)?;
                }
            }
            w.flush()?;
        }
        fs::rename(tmp, path)?;
        Ok(())
    }

    fn load(cfg: &RunConfig, dir: &Path, prime: Prime) -> Result<Option<Self>, PipelineError> {
        let path = checkpoint_file(dir, prime);
        if !path.exists() {
            return Ok(None);
        }
        let bad = |m: &str| PipelineError::Checkpoint(format!("{}: {m}", path.display()));
        let mut r = BufReader::new(fs::File::open(&path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != CHECKPOINT_MAGIC {
            return Err(bad("not a checkpoint file"));
        }
        let version = r.read_u32::<LittleEndian>()?;
        if version != CHECKPOINT_VERSION {
            return Err(bad(&format!("version {version}, expected {CHECKPOINT_VERSION}")));
        }
        if r.read_u64::<LittleEndian>()? != cfg.fingerprint() {
            return Err(bad("written for a different configuration"));
        }
        if r.read_u32::<LittleEndian>()? != prime.get() {
            return Err(bad("prime mismatch"));
        }
        let stages_done = r.read_u64::<LittleEndian>()? as usize;
        let generated = read_counts(&mut r)?;
        let nontrivial = read_counts(&mut r)?;
        let cwr = r.read_u64::<LittleEndian>()?;
        let echelon = Echelon::read_from(&mut r)?;
        let basis = TBasis::new(cfg.cutoff);
        if echelon.ncols() != basis.len() || echelon.field().modulus() != prime.get() {
            return Err(bad("echelon shape mismatch"));
        }
        let mut reducer = Reducer::new(cfg.cutoff, ModCoords::with_echelon(echelon)).with_fuel(cfg.fuel);
        let n = r.read_u64::<LittleEndian>()?;
        for _ in 0..n {
            let key = QMonomial::from_raw(r.read_u64::<LittleEndian>()?);
            let len = r.read_u32::<LittleEndian>()? as usize;
            if len > basis.len() as usize || key.len() > cfg.cutoff as usize {
                return Err(bad("cache entry out of range"));
            }
            let mut entries = Vec::with_capacity(len);
            for _ in 0..len {
                let c = r.read_u32::<LittleEndian>()?;
                let a = r.read_u32::<LittleEndian>()?;
                if c >= basis.len() || a >= prime.get() {
                    return Err(bad("cache coordinate out of range"));
                }
                entries.push((c, a));
            }
            let mut v = SparseRow::new(entries).map_err(|e| bad(&e.to_string()))?;
            // Entries may predate later pivots.
            reducer.system_mut().refresh(&mut v);
            reducer.insert_cached(key, v);
        }
        Ok(Some(Self {
            prime,
            stages_done,
            generated,
            nontrivial,
            corank_without_reversal: (cwr != u64::MAX).then_some(cwr),
            reducer,
        }))
    }
}

fn run_prime(cfg: &RunConfig, prime: Prime, stage_list: &[Stage]) -> Result<PassOutcome, PipelineError> {
    let mut state = match &cfg.checkpoint {
        Some(dir) => PassState::load(cfg, dir, prime)?,
        None => None,
    }
    .unwrap_or_else(|| PassState::fresh(cfg, prime));
    let mut timings = Vec::new();
    let mut ran = 0usize;
    while state.stages_done < stage_list.len() {
        if cfg.stop_after_stages.is_some_and(|n| ran >= n) {
            break;
        }
        let stage = stage_list[state.stages_done];
        if stage.group == StageGroup::Reversal && state.corank_without_reversal.is_none() {
            state.corank_without_reversal = Some(state.reducer.system().echelon().corank());
        }
        let start = Instant::now();
        for inst in stage_instances(cfg, stage) {
            *state.generated.entry(inst.family).or_default() += 1;
            let row = state.reducer.reduce_terms(&inst.terms)?;
            let echelon = state.reducer.system_mut().echelon_mut();
            echelon.note_consumed();
            if echelon.insert_reduced(row) {
                *state.nontrivial.entry(inst.family).or_default() += 1;
            }
        }
        state.stages_done += 1;
        ran += 1;
        timings.push(StageTiming {
            prime: prime.get(),
            stage: stage.label(),
            seconds: start.elapsed().as_secs_f64(),
        });
        if let Some(dir) = &cfg.checkpoint {
            state.save(cfg, dir)?;
        }
    }
    Ok(PassOutcome {
        prime,
        stages_done: state.stages_done,
        rank: state.reducer.system().echelon().report(),
        generated: state.generated,
        nontrivial: state.nontrivial,
        corank_without_reversal: state.corank_without_reversal,
        timings,
    })
}

/// Uses the coranks of the standard families, i.e. of `Q` itself.
fn torsion_summary(primes: &[PrimeReport]) -> TorsionSummary {
    let corank = |p: &PrimeReport| p.corank_without_reversal.unwrap_or(p.rank.corank);
    let min = primes.iter().map(corank).min().unwrap_or(0);
    let (div, nondiv): (Vec<_>, Vec<_>) = primes.iter().partition(|p| corank(p) > min);
    TorsionSummary {
        min_corank: min,
        order_divisible_by: div.iter().map(|p| p.rank.prime).collect(),
        order_not_divisible_by: nondiv.iter().map(|p| p.rank.prime).collect(),
    }
}

/// Reduces every enabled relation and eliminates modulo each prime.
pub fn run_quotient(cfg: &RunConfig) -> Result<Report, PipelineError> {
    let primes = cfg.validate()?;
    if let Some(path) = &cfg.dump_relations {
        dump_relations(cfg, path)?;
    }
    let stage_list = stages(cfg);
    let mut outcomes: Vec<Option<Result<PassOutcome, PipelineError>>> = primes.iter().map(|_| None).collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let results = std::sync::Mutex::new(&mut outcomes);
    std::thread::scope(|scope| {
        for _ in 0..cfg.threads.min(primes.len()) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if k >= primes.len() {
                    break;
                }
                let out = run_prime(cfg, primes[k], &stage_list);
                results.lock().expect("result lock")[k] = Some(out);
            });
        }
    });
    let mut passes = Vec::new();
    for o in outcomes {
        passes.push(o.expect("every prime ran")?);
    }
    let mut families: BTreeMap<Family, FamilyCounts> = BTreeMap::new();
    let mut fams = cfg.families.clone();
    if cfg.reversal {
        fams.push(Family::Reversal);
    }
    for f in fams {
        let entry = families.entry(f).or_default();
        entry.generated = passes[0].generated.get(&f).copied().unwrap_or(0);
        for p in &passes {
            entry
                .nontrivial
                .insert(p.prime.get(), p.nontrivial.get(&f).copied().unwrap_or(0));
        }
    }
    let complete = passes.iter().all(|p| p.stages_done == stage_list.len());
    let prime_reports: Vec<PrimeReport> = passes
        .iter()
        .map(|p| PrimeReport {
            rank: p.rank,
            corank_without_reversal: p.corank_without_reversal,
        })
        .collect();
    Ok(Report {
        config: cfg.clone(),
        s_size: monomial_count(10, cfg.cutoff as usize),
        t_size: TBasis::new(cfg.cutoff).len(),
        families,
        torsion: torsion_summary(&prime_reports),
        primes: prime_reports,
        complete,
        timings: passes.into_iter().flat_map(|p| p.timings).collect(),
    })
}

/// [`run_quotient`] with the reversal relations folded in after the
/// standard families.
pub fn run_reversal(cfg: &RunConfig) -> Result<Report, PipelineError> {
    run_quotient(&RunConfig {
        reversal: true,
        ..cfg.clone()
    })
}

/// Writes every enabled relation instance as NDJSON.
pub fn dump_relations(cfg: &RunConfig, path: &Path) -> Result<u64, PipelineError> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    let fams = cfg.families.clone();
    let cutoff = cfg.cutoff;
    let standard = braid_instances(cutoff)
        .chain(topological_instances(cutoff))
        .filter(move |i| fams.contains(&i.family));
    let n = if cfg.reversal {
        write_ndjson(&mut w, standard.chain(reversal_instances(cutoff)), cutoff)?
    } else {
        write_ndjson(&mut w, standard, cutoff)?
    };
    w.flush()?;
    Ok(n)
}

/// Largest cutoff the dense oracle accepts.
pub const ORACLE_MAX_CUTOFF: u8 = 3;

/// Dense polynomial in the q-generators, keyed by letter-code words.
type DenseElement = BTreeMap<Vec<u8>, i64>;

fn dense_mul(a: &DenseElement, b: &DenseElement, cutoff: usize) -> DenseElement {
    let mut out = DenseElement::new();
    for (x, c) in a {
        for (y, d) in b {
            if x.len() + y.len() <= cutoff {
                let mut w = x.clone();
                w.extend_from_slice(y);
                *out.entry(w).or_default() += c * d;
            }
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

fn dense_letter(l: SignedBraidLetter, cutoff: usize) -> DenseElement {
    let code = l.pair.code();
    let mut out = DenseElement::new();
    out.insert(Vec::new(), 1);
    if l.exponent > 0 {
        if cutoff >= 1 {
            out.insert(vec![code], 1);
        }
    } else {
        // (1 + q)^{-1} = 1 - q + q^2 - ...
        for k in 1..=cutoff {
            out.insert(vec![code; k], if k % 2 == 0 { 1 } else { -1 });
        }
    }
    out
}

fn dense_word(w: &[SignedBraidLetter], cutoff: usize) -> DenseElement {
    let mut acc = DenseElement::from([(Vec::new(), 1)]);
    for l in w {
        acc = dense_mul(&acc, &dense_letter(*l, cutoff), cutoff);
    }
    acc
}

fn dense_sub(a: &DenseElement, b: &DenseElement) -> DenseElement {
    let mut out = a.clone();
    for (x, c) in b {
        *out.entry(x.clone()).or_default() -= c;
    }
    out.retain(|_, v| *v != 0);
    out
}

fn all_words(max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for c in 0..10u8 {
                let mut v: Vec<u8> = w.clone();
                v.push(c);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn reverse_word(w: &[u8]) -> Vec<u8> {
    // (i, j) -> (6 - j, 6 - i) in colex codes.
    w.iter()
        .rev()
        .map(|&c| {
            let mut j = 2u8;
            while j * (j - 1) / 2 <= c {
                j += 1;
            }
            let i = c - (j - 1) * (j - 2) / 2 + 1;
            let (i2, j2) = (6 - j, 6 - i);
            (j2 - 1) * (j2 - 2) / 2 + i2 - 1
        })
        .collect()
}

/// Integer rows of the dense relation matrix over all of `S`, indexed by
/// word position in degree-lex order.
pub fn oracle_rows(cutoff: u8, reversal: bool) -> Result<(usize, Vec<Vec<(u32, i64)>>), PipelineError> {
    if cutoff > ORACLE_MAX_CUTOFF {
        return Err(PipelineError::Config(format!(
            "oracle cutoff {cutoff} exceeds {ORACLE_MAX_CUTOFF}"
        )));
    }
    let c = cutoff as usize;
    let words = all_words(c);
    let index: BTreeMap<Vec<u8>, u32> = words.iter().enumerate().map(|(k, w)| (w.clone(), k as u32)).collect();
    let mut bodies: Vec<DenseElement> = braid_relation_set(5)
        .iter()
        .map(|r| dense_sub(&dense_word(&r.lhs, c), &dense_word(&r.rhs, c)))
        .collect();
    let one = DenseElement::from([(Vec::new(), 1)]);
    let left: Vec<DenseElement> = top_generators().iter().map(|g| dense_sub(&dense_word(g, c), &one)).collect();
    let right: Vec<DenseElement> = bottom_generators()
        .iter()
        .map(|g| dense_sub(&dense_word(g, c), &one))
        .collect();
    let mut rows = Vec::new();
    let to_row = |e: &DenseElement| -> Vec<(u32, i64)> { e.iter().map(|(w, v)| (index[w], *v)).collect() };
    for body in bodies.drain(..) {
        for u in &words {
            for v in &words {
                let e = dense_mul(&dense_mul(&DenseElement::from([(u.clone(), 1)]), &body, c), &DenseElement::from([(v.clone(), 1)]), c);
                if !e.is_empty() {
                    rows.push(to_row(&e));
                }
            }
        }
    }
    for x in &words {
        let xe = DenseElement::from([(x.clone(), 1)]);
        for b in &left {
            let e = dense_mul(b, &xe, c);
            if !e.is_empty() {
                rows.push(to_row(&e));
            }
        }
        for b in &right {
            let e = dense_mul(&xe, b, c);
            if !e.is_empty() {
                rows.push(to_row(&e));
            }
        }
        if reversal {
            let r = reverse_word(x);
            if r != *x {
                rows.push(vec![(index[x], 1), (index[&r], -1)]);
            }
        }
    }
    Ok((words.len(), rows))
}

/// Corank of the dense relation matrix over all monomials of `S`.
pub fn run_oracle(cutoff: u8, p: u64) -> Result<RankReport, PipelineError> {
    run_oracle_with(cutoff, p, false)
}

pub fn run_oracle_with(cutoff: u8, p: u64, reversal: bool) -> Result<RankReport, PipelineError> {
    let prime = Prime::new(p).map_err(|e| PipelineError::Config(e.to_string()))?;
    let (ncols, rows) = oracle_rows(cutoff, reversal)?;
    let field: Zp = prime.field();
    let mut e = Echelon::new(ncols as u32, prime);
    for r in &rows {
        e.insert(&SparseRow::from_integers(r.iter().copied(), field))?;
    }
    Ok(e.report())
}
