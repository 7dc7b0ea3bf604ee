//! Enumeration of group elements inside a displacement ball.
//!
//! Breadth-first search over words in {A, B, A^-1, B^-1}, shortlex order.
//! A word is pruned when its displacement d(i, g*i), read off the certified
//! interval of (p^2+q^2+r^2+s^2)/2 = cosh d, certifiedly exceeds the pruning
//! radius. Deduplication is up to overall matrix sign (PSL elements): a cell
//! index over quantized interval midpoints finds near pairs, certified
//! interval comparison decides them, and undecidable pairs escalate to
//! dyadic precision recomputed from the words.
//!
//! The completeness contract is: every group element with displacement at
//! most R_cut - margin appears, margin taken from the one-step displacement
//! of the generators. It is validated against a no-pruning oracle at small
//! caps (see [`naive`]).

pub mod cache;
pub mod conjugacy;
pub mod naive;

use crate::fuchsian::traces::letters_to_string;
use crate::fuchsian::{Letter, TriangleGroup};
use crate::interval::{F64Interval, IntervalOps, Mat2, RealInterval};
use crate::poly::Rat;
use num_bigint::BigInt;
use std::collections::HashMap;

/// Default word-length cap; cusp spirals make words much longer than the
/// displacement radius suggests.
pub const DEFAULT_WORD_CAP: usize = 8192;

/// Enumerate the full group or (downstream) the squares subgroup Gamma^(2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SubgroupMode {
    Full,
    Squares,
}

impl std::fmt::Display for SubgroupMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SubgroupMode::Full => write!(f, "full"),
            SubgroupMode::Squares => write!(f, "squares"),
        }
    }
}

/// Geodesic-length or trace bound; exactly one is given, the other derived
/// through l = 2 arcosh(t/2).
#[derive(Clone, Debug, PartialEq)]
pub enum Bound {
    Length(Rat),
    Trace(Rat),
}

impl Bound {
    pub fn length_f64(&self) -> f64 {
        match self {
            Bound::Length(l) => crate::interval::rat_to_f64(l),
            Bound::Trace(t) => {
                let t = crate::interval::rat_to_f64(t).max(2.0 + 1e-9);
                2.0 * (t / 2.0).acosh()
            }
        }
    }

    pub fn trace_f64(&self) -> f64 {
        match self {
            Bound::Length(l) => 2.0 * (crate::interval::rat_to_f64(l) / 2.0).cosh(),
            Bound::Trace(t) => crate::interval::rat_to_f64(t),
        }
    }
}

/// User-facing enumeration parameters; geometry-derived values are resolved
/// against the group before the run.
#[derive(Clone, Debug)]
pub struct EnumerationConfig {
    pub mode: SubgroupMode,
    pub bound: Bound,
    pub bits: u32,
    pub word_cap: usize,
    pub epsilon_override: Option<f64>,
    pub rho_override: Option<f64>,
    pub r_cut_override: Option<f64>,
}

impl EnumerationConfig {
    pub fn length(l: Rat) -> EnumerationConfig {
        EnumerationConfig {
            mode: SubgroupMode::Full,
            bound: Bound::Length(l),
            bits: 53,
            word_cap: DEFAULT_WORD_CAP,
            epsilon_override: None,
            rho_override: None,
            r_cut_override: None,
        }
    }

    pub fn trace(t: Rat) -> EnumerationConfig {
        let mut c = Self::length(Rat::from_integer(BigInt::from(1)));
        c.bound = Bound::Trace(t);
        c
    }

    pub fn with_mode(mut self, mode: SubgroupMode) -> Self {
        self.mode = mode;
        self
    }
}

/// Geometry constants of a run, all validated policy values.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct RunGeometry {
    /// Domain radius: every conjugacy class of length <= L has a
    /// representative whose axis passes within rho of the base point.
    pub rho: f64,
    /// Completeness margin: max one-step displacement of the generators.
    pub margin: f64,
    /// Pruning radius.
    pub r_cut: f64,
    /// Conjugator search radius 2 rho + L/2 + slack.
    pub r_conj: f64,
    /// Dedup separation threshold.
    pub epsilon: f64,
    /// Horoball truncation height (cusped groups only).
    pub horoball_height: Option<f64>,
}

fn f64_mat(group: &TriangleGroup, l: Letter) -> [f64; 4] {
    let m = group.generator(l);
    [
        crate::interval::rat_to_f64(&m.a.midpoint()),
        crate::interval::rat_to_f64(&m.b.midpoint()),
        crate::interval::rat_to_f64(&m.c.midpoint()),
        crate::interval::rat_to_f64(&m.d.midpoint()),
    ]
}

fn hyp_dist(z: (f64, f64), w: (f64, f64)) -> f64 {
    let dx = z.0 - w.0;
    let dy = z.1 - w.1;
    (1.0 + (dx * dx + dy * dy) / (2.0 * z.1 * w.1)).acosh()
}

fn mobius(m: &[f64; 4], z: (f64, f64)) -> (f64, f64) {
    // (az + b) / (cz + d) on x + iy
    let (x, y) = z;
    let num_re = m[0] * x + m[1];
    let num_im = m[0] * y;
    let den_re = m[2] * x + m[3];
    let den_im = m[2] * y;
    let d2 = den_re * den_re + den_im * den_im;
    (
        (num_re * den_re + num_im * den_im) / d2,
        (num_im * den_re - num_re * den_im) / d2,
    )
}

/// Domain radius rho.
///
/// Cocompact: the doubled fundamental triangle lies within
/// max(d(v_a, v_b), d(v_a, v_c)) of the base vertex, by convexity.
///
/// Cusped (c = infinity): the domain is truncated at the precisely
/// invariant horoball of the cusp (Shimizu height = cusp width in the
/// normalization sending the cusp to infinity); closed geodesics cannot
/// stay inside an embedded cusp neighborhood, so every class has an axis
/// point in the truncated domain. rho is the circumradius of the truncated
/// domain from the base point: distances to the finite vertex and to the
/// two truncation corners.
pub fn domain_radius(group: &TriangleGroup) -> (f64, Option<f64>) {
    let sig = group.signature();
    let ca = (std::f64::consts::PI / sig.a() as f64).cos();
    let cb = (std::f64::consts::PI / sig.b() as f64).cos();
    let sa = (std::f64::consts::PI / sig.a() as f64).sin();
    let sb = (std::f64::consts::PI / sig.b() as f64).sin();
    match sig.c() {
        Some(c) => {
            let cc = (std::f64::consts::PI / c as f64).cos();
            let sc = (std::f64::consts::PI / c as f64).sin();
            let d_ab = ((ca * cb + cc) / (sa * sb)).acosh();
            let d_ac = ((ca * cc + cb) / (sa * sc)).acosh();
            (d_ab.max(d_ac) + 0.05, None)
        }
        None => {
            // h = cosh d(v_a, v_b) with cos(pi/c) := 1
            let h = (ca * cb + 1.0) / (sa * sb);
            let d_ab = h.acosh();
            let t = h + (h * h - 1.0).sqrt();
            let v_b = (0.0, t);
            // parabolic AB; its fixed point on the real axis
            let ma = f64_mat(group, Letter::A);
            let mb = f64_mat(group, Letter::B);
            let ab = [
                ma[0] * mb[0] + ma[1] * mb[2],
                ma[0] * mb[1] + ma[1] * mb[3],
                ma[2] * mb[0] + ma[3] * mb[2],
                ma[2] * mb[1] + ma[3] * mb[3],
            ];
            let p = (ab[0] - ab[3]) / (2.0 * ab[2]);
            // g: z -> -1/(z - p) sends the cusp to infinity
            let g = [0.0, -1.0, 1.0, -p];
            let g_inv = [-p, 1.0, -1.0, 0.0];
            // width of the conjugated parabolic g (AB) g^{-1} = +-[[1, w],[0,1]]
            let conj = mat4_mul(&mat4_mul(&g, &ab), &g_inv);
            let width = (conj[1] / conj[0]).abs();
            let h0 = width.max(1e-6) * 1.001;
            let gi = mobius(&g, (0.0, 1.0));
            let gvb = mobius(&g, v_b);
            // sides through the cusp become vertical lines through g(i), g(v_b)
            let corner1 = (gi.0, h0);
            let corner2 = (gvb.0, h0);
            let rho = d_ab
                .max(hyp_dist(gi, corner1))
                .max(hyp_dist(gi, corner2))
                + 0.05;
            (rho, Some(h0))
        }
    }
}

fn mat4_mul(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

/// Default dedup threshold: half the smallest positive matrix distance
/// among distinct elements of word length <= 6 (distinctness from the exact
/// quadruple ball, so there is no circularity).
pub fn default_epsilon(group: &TriangleGroup) -> f64 {
    let ball = crate::fuchsian::arithmetic::word_ball(group, 6);
    let gens: [[f64; 4]; 4] = [
        f64_mat(group, Letter::A),
        f64_mat(group, Letter::AInv),
        f64_mat(group, Letter::B),
        f64_mat(group, Letter::BInv),
    ];
    let mats: Vec<[f64; 4]> = ball
        .iter()
        .map(|el| {
            let mut m = [1.0, 0.0, 0.0, 1.0];
            for l in el.word.letters() {
                m = mat4_mul(&m, &gens[l as usize]);
            }
            m
        })
        .collect();
    let mut min_dist = f64::INFINITY;
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            let mut d_plus: f64 = 0.0;
            let mut d_minus: f64 = 0.0;
            for k in 0..4 {
                d_plus = d_plus.max((mats[i][k] - mats[j][k]).abs());
                d_minus = d_minus.max((mats[i][k] + mats[j][k]).abs());
            }
            let d = d_plus.min(d_minus);
            if d > 0.0 {
                min_dist = min_dist.min(d);
            }
        }
    }
    assert!(
        min_dist.is_finite() && min_dist > 1e-7,
        "discreteness scale too small for the f64 fast path"
    );
    min_dist / 2.0
}

/// Resolved, self-consistent run parameters.
#[derive(Clone, Debug)]
pub struct ResolvedConfig {
    pub mode: SubgroupMode,
    pub bound: Bound,
    pub bits: u32,
    pub word_cap: usize,
    pub geometry: RunGeometry,
}

pub fn resolve_config(group: &TriangleGroup, cfg: &EnumerationConfig) -> ResolvedConfig {
    let (rho0, horoball) = domain_radius(group);
    let rho = cfg.rho_override.unwrap_or(rho0);
    let margin = group.max_generator_displacement() + 0.35;
    let l = cfg.bound.length_f64();
    let r_conj = 2.0 * rho + l / 2.0 + 0.5;
    let r_cut = cfg
        .r_cut_override
        .unwrap_or_else(|| (l + 2.0 * rho).max(r_conj) + margin + 0.02);
    let epsilon = cfg.epsilon_override.unwrap_or_else(|| default_epsilon(group));
    ResolvedConfig {
        mode: cfg.mode,
        bound: cfg.bound.clone(),
        bits: cfg.bits,
        word_cap: cfg.word_cap,
        geometry: RunGeometry {
            rho,
            margin,
            r_cut,
            r_conj,
            epsilon,
            horoball_height: horoball,
        },
    }
}

/// Interval scalars usable in the enumeration inner loop.
pub trait EnumInterval: IntervalOps {
    fn lo_f64(&self) -> f64;
    fn hi_f64(&self) -> f64;
    fn from_real(iv: &RealInterval) -> Self;
    fn mid_f64(&self) -> f64 {
        0.5 * (self.lo_f64() + self.hi_f64())
    }
    fn width_f64(&self) -> f64 {
        self.hi_f64() - self.lo_f64()
    }
    fn to_f64_interval(&self) -> F64Interval {
        F64Interval::new(self.lo_f64(), self.hi_f64())
    }
}

impl EnumInterval for F64Interval {
    fn lo_f64(&self) -> f64 {
        self.lo
    }
    fn hi_f64(&self) -> f64 {
        self.hi
    }
    fn from_real(iv: &RealInterval) -> Self {
        iv.to_f64()
    }
}

impl EnumInterval for RealInterval {
    fn lo_f64(&self) -> f64 {
        crate::interval::rat_to_f64_down(self.lo())
    }
    fn hi_f64(&self) -> f64 {
        crate::interval::rat_to_f64_up(self.hi())
    }
    fn from_real(iv: &RealInterval) -> Self {
        iv.clone()
    }
}

/// One stored group element (PSL representative). The canonical word is
/// held as a link into the BFS tree so that arbitrarily long words (cusp
/// spirals) cost four bytes, reconstructable by walking parents.
#[derive(Clone)]
pub struct StoredElement {
    pub parent: u32,
    pub letter: Letter,
    pub level: u32,
    pub mat: Mat2<F64Interval>,
    pub cosh_disp: F64Interval,
    /// (A-parity, B-parity) of the word.
    pub parity: (u8, u8),
    /// Displacement certified <= r_cut (as opposed to merely not certified
    /// greater).
    pub in_ball: bool,
}

/// Outcome of the breadth-first enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnumStatus {
    Complete,
    WordCapReached { frontier: usize },
}

#[derive(Clone, Debug, Default, serde::Serialize, serde::Deserialize)]
pub struct EnumStats {
    pub levels: Vec<usize>,
    pub pruned: usize,
    pub dedup_hits: usize,
    pub escalations: usize,
    /// Deep words rebuilt at dyadic precision to keep widths tight.
    pub refreshes: usize,
    pub max_width: f64,
}

/// Dedup index: cell hash -> chain of element ids.
struct CellIndex {
    head: HashMap<u64, u32>,
    next: Vec<u32>,
}

const NO_NEXT: u32 = u32::MAX;

impl CellIndex {
    fn new() -> CellIndex {
        CellIndex { head: HashMap::new(), next: Vec::new() }
    }

    fn chain(&self, key: u64) -> CellChain<'_> {
        CellChain { index: self, cur: self.head.get(&key).copied() }
    }

    fn insert(&mut self, key: u64, id: u32) {
        debug_assert_eq!(self.next.len(), id as usize);
        match self.head.get_mut(&key) {
            Some(h) => {
                self.next.push(*h);
                *h = id;
            }
            None => {
                self.next.push(NO_NEXT);
                self.head.insert(key, id);
            }
        }
    }
}

struct CellChain<'a> {
    index: &'a CellIndex,
    cur: Option<u32>,
}

impl Iterator for CellChain<'_> {
    type Item = u32;
    fn next(&mut self) -> Option<u32> {
        let c = self.cur?;
        let n = self.index.next[c as usize];
        self.cur = if n == NO_NEXT { None } else { Some(n) };
        Some(c)
    }
}

fn cell_key(cells: [i64; 4]) -> u64 {
    // Fibonacci-style mixing; collisions across distinct cells are harmless
    // because every hit is verified by interval comparison.
    let mut h: u64 = 0xcbf29ce484222325;
    for c in cells {
        h ^= c as u64;
        h = h.wrapping_mul(0x9e3779b97f4a7c15);
        h ^= h >> 29;
    }
    h
}

/// The element store: dedup index plus records, in deterministic BFS order.
pub struct ElementStore {
    pub cfg: ResolvedConfig,
    pub elements: Vec<StoredElement>,
    index: CellIndex,
    cell_size: f64,
    pub stats: EnumStats,
    pub status: EnumStatus,
}

/// Result of a certified matrix lookup.
pub enum Lookup {
    Found(u32),
    NotFound,
    Undecided(Vec<(String, String)>),
}

impl ElementStore {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Canonical word of an element, reconstructed from the BFS tree.
    pub fn letters_of(&self, id: u32) -> Vec<Letter> {
        let mut out = Vec::new();
        let mut cur = id;
        while cur != 0 {
            let el = &self.elements[cur as usize];
            out.push(el.letter);
            cur = el.parent;
        }
        out.reverse();
        out
    }

    pub fn word_string(&self, id: u32) -> String {
        letters_to_string(&self.letters_of(id))
    }

    fn cells_of(&self, mat: &Mat2<F64Interval>) -> Vec<u64> {
        let delta = self.cell_size;
        let eta = delta / 8.0;
        let mut options: [Vec<i64>; 4] = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
        for (k, e) in mat.entries().iter().enumerate() {
            let m = e.mid();
            let base = (m / delta).floor();
            options[k].push(base as i64);
            if m - base * delta < eta {
                options[k].push(base as i64 - 1);
            } else if (base + 1.0) * delta - m < eta {
                options[k].push(base as i64 + 1);
            }
        }
        let mut keys = Vec::with_capacity(4);
        for &c0 in &options[0] {
            for &c1 in &options[1] {
                for &c2 in &options[2] {
                    for &c3 in &options[3] {
                        keys.push(cell_key([c0, c1, c2, c3]));
                    }
                }
            }
        }
        keys
    }

    fn primary_cell(&self, mat: &Mat2<F64Interval>) -> u64 {
        let delta = self.cell_size;
        let mut cells = [0i64; 4];
        for (k, e) in mat.entries().iter().enumerate() {
            cells[k] = (e.mid() / delta).floor() as i64;
        }
        cell_key(cells)
    }

    /// Find the stored element equal (up to sign) to `mat`. When f64
    /// intervals cannot decide, both sides are rebuilt at escalating dyadic
    /// precision: the stored side from its word, the query side through
    /// `recompute`.
    pub fn lookup_mat(
        &self,
        group: &TriangleGroup,
        mat: &Mat2<F64Interval>,
        recompute: &dyn Fn(u32) -> crate::Result<Mat2<RealInterval>>,
        mut stats: Option<&mut EnumStats>,
    ) -> crate::Result<Lookup> {
        let eps = self.cfg.geometry.epsilon;
        let neg = mat.neg();
        let mut candidates: Vec<u32> = Vec::new();
        for m in [mat, &neg] {
            for key in self.cells_of(m) {
                for id in self.index.chain(key) {
                    if !candidates.contains(&id) {
                        candidates.push(id);
                    }
                }
            }
        }
        let mut undecided = Vec::new();
        for id in candidates {
            let stored = &self.elements[id as usize];
            match f64_equal_up_to_sign(&stored.mat, mat, eps) {
                Some(true) => {
                    if let Some(s) = stats.as_deref_mut() {
                        s.dedup_hits += 1;
                    }
                    return Ok(Lookup::Found(id));
                }
                Some(false) => continue,
                None => {
                    if let Some(s) = stats.as_deref_mut() {
                        s.escalations += 1;
                    }
                    let stored_letters = self.letters_of(id);
                    match dyadic_equal_up_to_sign(group, &stored_letters, recompute, eps)? {
                        Some(true) => {
                            if let Some(s) = stats.as_deref_mut() {
                                s.dedup_hits += 1;
                            }
                            return Ok(Lookup::Found(id));
                        }
                        Some(false) => continue,
                        None => undecided.push((
                            letters_to_string(&stored_letters),
                            "escalation cap".to_string(),
                        )),
                    }
                }
            }
        }
        if undecided.is_empty() {
            Ok(Lookup::NotFound)
        } else {
            Ok(Lookup::Undecided(undecided))
        }
    }
}

/// Interval equality-up-to-sign test at threshold eps:
/// Some(true) = same PSL element, Some(false) = certified distinct,
/// None = cannot decide at this precision.
fn f64_equal_up_to_sign(
    p: &Mat2<F64Interval>,
    q: &Mat2<F64Interval>,
    eps: f64,
) -> Option<bool> {
    let widths_ok = p
        .entries()
        .into_iter()
        .chain(q.entries())
        .all(|e| e.width() < eps / 2.0);
    let overlap = |q_sign: f64| {
        p.entries()
            .iter()
            .zip(q.entries())
            .all(|(a, b)| {
                let blo = if q_sign > 0.0 { b.lo } else { -b.hi };
                let bhi = if q_sign > 0.0 { b.hi } else { -b.lo };
                a.lo <= bhi && blo <= a.hi
            })
    };
    let any_overlap = overlap(1.0) || overlap(-1.0);
    if any_overlap {
        if widths_ok {
            Some(true)
        } else {
            None
        }
    } else {
        Some(false)
    }
}

fn real_equal_up_to_sign(
    p: &Mat2<RealInterval>,
    q: &Mat2<RealInterval>,
    eps: &Rat,
) -> Option<bool> {
    let half_eps = eps / Rat::from_integer(BigInt::from(2));
    let widths_ok = p
        .entries()
        .into_iter()
        .chain(q.entries())
        .all(|e| e.width() < half_eps);
    let overlap_plus = p
        .entries()
        .iter()
        .zip(q.entries())
        .all(|(a, b)| a.intersects(b));
    let overlap_minus = p
        .entries()
        .iter()
        .zip(q.entries())
        .all(|(a, b)| a.intersects(&b.neg()));
    if overlap_plus || overlap_minus {
        if widths_ok {
            Some(true)
        } else {
            None
        }
    } else {
        Some(false)
    }
}

/// Decide equality of a stored word's element against a recomputable query
/// matrix by rebuilding both at escalating dyadic precision.
fn dyadic_equal_up_to_sign(
    group: &TriangleGroup,
    stored_letters: &[Letter],
    recompute: &dyn Fn(u32) -> crate::Result<Mat2<RealInterval>>,
    eps: f64,
) -> crate::Result<Option<bool>> {
    let eps_rat = Rat::from_float(eps).unwrap_or_else(|| crate::interval::rat_of(1, 1 << 20));
    let mut bits = 96u32;
    loop {
        let m1 = group.matrix_of_letters(stored_letters, bits)?;
        let m2 = recompute(bits)?;
        match real_equal_up_to_sign(&m1, &m2, &eps_rat) {
            Some(v) => return Ok(Some(v)),
            None => {
                bits *= 2;
                if bits > crate::interval::PRECISION_CAP {
                    return Ok(None);
                }
            }
        }
    }
}

/// Breadth-first enumeration with displacement pruning.
pub fn enumerate_ball(
    group: &TriangleGroup,
    cfg: &EnumerationConfig,
) -> crate::Result<ElementStore> {
    let resolved = resolve_config(group, cfg);
    if resolved.bits <= 53 {
        let gens: [Mat2<F64Interval>; 4] = [
            group.generator(Letter::A).to_f64(),
            group.generator(Letter::AInv).to_f64(),
            group.generator(Letter::B).to_f64(),
            group.generator(Letter::BInv).to_f64(),
        ];
        bfs(group, resolved, &gens)
    } else {
        let gens = group.generators_at(resolved.bits)?;
        bfs(group, resolved, &gens)
    }
}

fn bfs<T: EnumInterval>(
    group: &TriangleGroup,
    cfg: ResolvedConfig,
    gens: &[Mat2<T>; 4],
) -> crate::Result<ElementStore> {
    let r_cut = cfg.geometry.r_cut;
    let cosh_prune = r_cut.cosh().next_up();
    let cosh_in = r_cut.cosh().next_down();
    let cell_size = cfg.geometry.epsilon / 4.0;
    let word_cap = cfg.word_cap;
    // interval widths grow by a factor of up to the generator norm per
    // letter; once a child's width threatens the dedup scale it is rebuilt
    // from its word at a dyadic precision proportional to the word length
    let width_refresh = cfg.geometry.epsilon / 64.0;
    let gen_norm: f64 = gens
        .iter()
        .flat_map(|m| m.entries().into_iter().map(|e| e.hi_f64().abs().max(e.lo_f64().abs())))
        .fold(1.0f64, f64::max);
    let bits_per_letter = gen_norm.log2().ceil().max(1.0) as u32 + 1;
    let mut gen_cache: HashMap<u32, [Mat2<RealInterval>; 4]> = HashMap::new();
    let mut store = ElementStore {
        cfg,
        elements: Vec::new(),
        index: CellIndex::new(),
        cell_size,
        stats: EnumStats::default(),
        status: EnumStatus::Complete,
    };
    let mut mats: Vec<Mat2<T>> = Vec::new();

    let push = |store: &mut ElementStore,
                mats: &mut Vec<Mat2<T>>,
                parent: u32,
                letter: Letter,
                level: u32,
                parity: (u8, u8),
                mat: Mat2<T>| {
        let f = Mat2 {
            a: mat.a.to_f64_interval(),
            b: mat.b.to_f64_interval(),
            c: mat.c.to_f64_interval(),
            d: mat.d.to_f64_interval(),
        };
        let ss = mat.sum_of_squares();
        let cosh_disp = F64Interval::new(ss.lo_f64() / 2.0, ss.hi_f64() / 2.0);
        let id = store.elements.len() as u32;
        let key = store.primary_cell(&f);
        for e in f.entries() {
            store.stats.max_width = store.stats.max_width.max(e.width());
        }
        store.elements.push(StoredElement {
            parent,
            letter,
            level,
            mat: f,
            cosh_disp,
            parity,
            in_ball: cosh_disp.hi <= cosh_in,
        });
        store.index.insert(key, id);
        mats.push(mat);
        id
    };

    let id0 = push(
        &mut store,
        &mut mats,
        0,
        Letter::A,
        0,
        (0, 0),
        Mat2::<T>::identity(),
    );
    let mut frontier = vec![id0];
    let mut level = 0u32;
    store.stats.levels.push(1);
    while !frontier.is_empty() {
        level += 1;
        if level as usize > word_cap {
            store.status = EnumStatus::WordCapReached { frontier: frontier.len() };
            break;
        }
        if std::env::var("TRISPEC_PROGRESS").is_ok() && level % 2 == 0 {
            eprintln!(
                "  level {level}: frontier {}, elements {}, pruned {}, escalations {}",
                frontier.len(),
                store.elements.len(),
                store.stats.pruned,
                store.stats.escalations
            );
        }
        let mut next = Vec::new();
        for &pid in &frontier {
            let parent_last = if pid == 0 {
                None
            } else {
                Some(store.elements[pid as usize].letter)
            };
            let parent_parity = store.elements[pid as usize].parity;
            let parent_mat = mats[pid as usize].clone();
            for l in Letter::ALL {
                if parent_last == Some(l.inverse()) {
                    continue;
                }
                let mut mat = parent_mat.mul(&gens[l as usize]);
                let child_letters = {
                    let mut ls = store.letters_of(pid);
                    ls.push(l);
                    ls
                };
                let too_wide = mat
                    .entries()
                    .into_iter()
                    .any(|e| e.width_f64() > width_refresh);
                if too_wide {
                    let mut bits = 64 + bits_per_letter * child_letters.len() as u32;
                    loop {
                        let refreshed =
                            matrix_at_bits(group, &child_letters, bits, &mut gen_cache)?;
                        let tight = Mat2 {
                            a: T::from_real(&refreshed.a),
                            b: T::from_real(&refreshed.b),
                            c: T::from_real(&refreshed.c),
                            d: T::from_real(&refreshed.d),
                        };
                        let ok = tight
                            .entries()
                            .into_iter()
                            .all(|e| e.width_f64() <= width_refresh);
                        if ok {
                            mat = tight;
                            store.stats.refreshes += 1;
                            break;
                        }
                        bits *= 2;
                        if bits > crate::interval::PRECISION_CAP {
                            return Err(crate::Error::PrecisionCap {
                                cap: crate::interval::PRECISION_CAP,
                                context: "tightening a deep word matrix".into(),
                            });
                        }
                    }
                }
                let ss = mat.sum_of_squares();
                if ss.lo_f64() / 2.0 > cosh_prune {
                    store.stats.pruned += 1;
                    continue;
                }
                let f = Mat2 {
                    a: mat.a.to_f64_interval(),
                    b: mat.b.to_f64_interval(),
                    c: mat.c.to_f64_interval(),
                    d: mat.d.to_f64_interval(),
                };
                let recompute = |bits: u32| -> crate::Result<Mat2<RealInterval>> {
                    group.matrix_of_letters(&child_letters, bits)
                };
                let mut stats = std::mem::take(&mut store.stats);
                let looked = store.lookup_mat(group, &f, &recompute, Some(&mut stats));
                store.stats = stats;
                match looked? {
                    Lookup::Found(_) => continue,
                    Lookup::NotFound => {
                        let parity = match l {
                            Letter::A | Letter::AInv => (parent_parity.0 ^ 1, parent_parity.1),
                            Letter::B | Letter::BInv => (parent_parity.0, parent_parity.1 ^ 1),
                        };
                        let id = push(&mut store, &mut mats, pid, l, level, parity, mat);
                        next.push(id);
                    }
                    Lookup::Undecided(pairs) => {
                        let (wa, _) = &pairs[0];
                        return Err(crate::Error::DedupCollision {
                            word_a: wa.clone(),
                            word_b: letters_to_string(&child_letters),
                        });
                    }
                }
            }
        }
        store.stats.levels.push(next.len());
        frontier = next;
    }
    Ok(store)
}

/// Word matrix at a dyadic precision, with the generator matrices cached
/// per precision level.
fn matrix_at_bits(
    group: &TriangleGroup,
    letters: &[Letter],
    bits: u32,
    cache: &mut HashMap<u32, [Mat2<RealInterval>; 4]>,
) -> crate::Result<Mat2<RealInterval>> {
    if !cache.contains_key(&bits) {
        cache.insert(bits, group.generators_at(bits)?);
    }
    let gens = &cache[&bits];
    let mut m = Mat2::<RealInterval>::identity();
    for &l in letters {
        m = m.mul(&gens[l as usize]);
    }
    Ok(m)
}

/// Exact Gamma^(2) membership for a stored element (parity test).
pub fn in_squares_subgroup(group: &TriangleGroup, el: &StoredElement) -> bool {
    crate::fuchsian::arithmetic::SquaresParity::of(group.signature()).contains(el.parity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::Signature;

    fn group(sig: &str) -> TriangleGroup {
        TriangleGroup::new(Signature::parse(sig).unwrap(), 128).unwrap()
    }

    #[test]
    fn epsilon_is_reasonable() {
        for sig in ["2,3,7", "2,5,inf"] {
            let g = group(sig);
            let eps = default_epsilon(&g);
            assert!(eps > 1e-6 && eps < 1.0, "{sig}: eps = {eps}");
        }
    }

    #[test]
    fn tiny_ball_contains_torsion_only() {
        // R_cut below the smallest nontrivial displacement: only elements
        // fixing i (powers of A) and the identity survive
        let g = group("2,3,7");
        let mut cfg = EnumerationConfig::length(crate::interval::rat_of(1, 1));
        cfg.r_cut_override = Some(0.05);
        let store = enumerate_ball(&g, &cfg).unwrap();
        assert_eq!(store.status, EnumStatus::Complete);
        // Delta(2,3,7): stabilizer of i in <A> is {1, A}
        assert_eq!(store.len(), 2, "identity and the rotation A");
        for el in &store.elements {
            assert!(el.cosh_disp.lo < 1.0 + 1e-9);
        }
    }

    #[test]
    fn store_matches_exact_ball_at_word_cap() {
        // f64 fingerprint dedup must agree with exact quadruple dedup
        for sig in ["2,3,inf", "2,5,inf", "2,3,7"] {
            let g = group(sig);
            let mut cfg = EnumerationConfig::length(crate::interval::rat_of(1, 1));
            cfg.r_cut_override = Some(1e6); // no pruning
            cfg.word_cap = 6;
            let store = enumerate_ball(&g, &cfg).unwrap();
            let exact = crate::fuchsian::arithmetic::word_ball(&g, 6);
            assert_eq!(store.len(), exact.len(), "{sig}: store vs exact ball");
            // canonical words agree elementwise (both BFS shortlex)
            for (i, b) in exact.iter().enumerate() {
                assert_eq!(store.word_string(i as u32), b.word.to_string(), "{sig}");
            }
        }
    }

    #[test]
    fn doubled_precision_same_store() {
        let g = group("2,5,inf");
        let mut cfg = EnumerationConfig::length(crate::interval::rat_of(4, 1));
        cfg.word_cap = 8;
        let store53 = enumerate_ball(&g, &cfg).unwrap();
        let mut cfg128 = cfg.clone();
        cfg128.bits = 128;
        let store128 = enumerate_ball(&g, &cfg128).unwrap();
        let mut cfg256 = cfg.clone();
        cfg256.bits = 256;
        let store256 = enumerate_ball(&g, &cfg256).unwrap();
        assert_eq!(store53.len(), store128.len());
        assert_eq!(store128.len(), store256.len());
        for i in 0..store53.len() as u32 {
            assert_eq!(store53.word_string(i), store128.word_string(i));
            assert_eq!(store128.word_string(i), store256.word_string(i));
        }
    }

    #[test]
    fn prune_soundness_small_cap() {
        // pruned enumeration equals unpruned enumeration filtered by
        // displacement <= r_cut
        let g = group("2,5,inf");
        let r_cut = 3.0f64;
        let mut pruned_cfg = EnumerationConfig::length(crate::interval::rat_of(1, 1));
        pruned_cfg.r_cut_override = Some(r_cut);
        pruned_cfg.word_cap = 7;
        let pruned = enumerate_ball(&g, &pruned_cfg).unwrap();

        let mut full_cfg = pruned_cfg.clone();
        full_cfg.r_cut_override = Some(1e6);
        let full = enumerate_ball(&g, &full_cfg).unwrap();

        let cosh_r = r_cut.cosh();
        let filtered: Vec<(u32, &StoredElement)> = full
            .elements
            .iter()
            .enumerate()
            .filter(|(_, e)| e.cosh_disp.lo <= cosh_r.next_up())
            .map(|(i, e)| (i as u32, e))
            .collect();
        // every pruned-store element appears in the filtered set
        let pruned_words: std::collections::HashSet<String> =
            (0..pruned.len() as u32).map(|i| pruned.word_string(i)).collect();
        let filtered_words: std::collections::HashSet<String> = filtered
            .iter()
            .map(|&(i, _)| full.word_string(i))
            .collect();
        for w in &pruned_words {
            assert!(filtered_words.contains(w), "pruned store grew a word {w}");
        }
        // and every unpruned element with certified displacement <= r_cut
        // appears in the pruned store
        for (i, e) in full.elements.iter().enumerate() {
            if e.cosh_disp.hi <= cosh_r {
                assert!(
                    pruned_words.contains(&full.word_string(i as u32)),
                    "missing {} at displacement {:.3}",
                    full.word_string(i as u32),
                    (e.cosh_disp.mid()).acosh()
                );
            }
        }
    }

    #[test]
    fn geometry_values() {
        let g = group("2,3,7");
        let (rho, horo) = domain_radius(&g);
        assert!(horo.is_none());
        // max(d_ab, d_ac) for (2,3,7) is about 0.545
        assert!((rho - 0.595).abs() < 0.02, "rho = {rho}");
        let g = group("2,5,inf");
        let (rho, horo) = domain_radius(&g);
        assert!(horo.is_some());
        assert!(rho > 1.0 && rho < 2.5, "rho = {rho}");
    }
}
