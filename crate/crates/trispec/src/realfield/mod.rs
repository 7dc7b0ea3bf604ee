//! Exact arithmetic in the totally real fields Q(2cos(pi/N)).
//!
//! Elements are dense rational coefficient vectors modulo the minimal
//! polynomial of lambda_N = 2cos(pi/N), so equality is canonical-form
//! equality and every comparison or separation test is exact. All d Galois
//! embeddings are realized as certified root intervals of the minimal
//! polynomial; evaluating an element under an embedding is interval Horner
//! evaluation over the (refinable) root interval.

pub mod subfield;

use crate::interval::{self, RealInterval, PRECISION_CAP};
use crate::poly::{self, Rat, ZPoly};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::sync::{Arc, Mutex};

/// How a field descriptor was constructed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldKind {
    /// Q(2cos(pi/N)); the generator lambda_N is the largest root.
    CosPiOver(u64),
    /// A subfield of some ambient field, presented by the minimal polynomial
    /// of a primitive element.
    Derived,
}

/// A totally real number field with certified root data for its embeddings.
///
/// Roots are stored in descending numeric order; embedding index 0 is the
/// identity embedding (for `CosPiOver` fields this is the largest root,
/// 2cos(pi/N)). Refinement state is shared and only ever shrinks.
pub struct FieldDescriptor {
    kind: FieldKind,
    degree: usize,
    min_poly: ZPoly,
    identity_index: usize,
    base_bits: u32,
    roots: Mutex<Vec<(Rat, Rat)>>,
}

impl std::fmt::Debug for FieldDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldDescriptor")
            .field("kind", &self.kind)
            .field("degree", &self.degree)
            .field("min_poly", &self.min_poly)
            .finish()
    }
}

impl PartialEq for FieldDescriptor {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.min_poly == other.min_poly
    }
}

/// Default starting precision in bits.
pub const DEFAULT_BITS: u32 = 128;

impl FieldDescriptor {
    /// The field Q(2cos(pi/N)). Valid for every N >= 1; the degree is
    /// phi(2N)/2 for N >= 2 and 1 for N = 1.
    pub fn new(n: u64) -> Arc<FieldDescriptor> {
        assert!(n >= 1, "field index must be positive");
        let min_poly = poly::min_poly_two_cos_pi_over(n);
        // locate the identity root by a certified enclosure of 2cos(pi/N)
        let locator = interval::two_cos_pi_frac(1, n, 64);
        let desc = Self::from_min_poly(min_poly, &locator, FieldKind::CosPiOver(n));
        if n >= 2 {
            debug_assert_eq!(desc.degree as u64, poly::euler_phi(2 * n) / 2);
        }
        // for these fields the identity embedding is the largest root
        debug_assert_eq!(desc.identity_index, 0);
        desc
    }

    /// Build a descriptor from a monic integer minimal polynomial, flagging
    /// as identity the unique root inside `identity_locator`.
    pub fn from_min_poly(
        min_poly: ZPoly,
        identity_locator: &RealInterval,
        kind: FieldKind,
    ) -> Arc<FieldDescriptor> {
        assert!(min_poly.is_monic(), "minimal polynomial must be monic");
        let degree = min_poly.degree();
        let mut roots = poly::isolate_real_roots(&min_poly);
        assert_eq!(roots.len(), degree, "field must be totally real");
        roots.reverse(); // descending numeric order
        // refine until the locator intersects exactly one interval
        let identity_index = loop {
            let hits: Vec<usize> = roots
                .iter()
                .enumerate()
                .filter(|(_, (lo, hi))| {
                    !(hi < identity_locator.lo() || lo > identity_locator.hi())
                })
                .map(|(i, _)| i)
                .collect();
            match hits.len() {
                0 => panic!("identity locator misses every root interval"),
                1 => break hits[0],
                _ => {
                    for iv in roots.iter_mut() {
                        let (a, b) = iv.clone();
                        *iv = poly::bisect_step(&min_poly, &a, &b);
                    }
                }
            }
        };
        Arc::new(FieldDescriptor {
            kind,
            degree,
            min_poly,
            identity_index,
            base_bits: DEFAULT_BITS,
            roots: Mutex::new(roots),
        })
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    /// The index N for Q(2cos(pi/N)) fields.
    pub fn index_n(&self) -> Option<u64> {
        match self.kind {
            FieldKind::CosPiOver(n) => Some(n),
            FieldKind::Derived => None,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn min_poly(&self) -> &ZPoly {
        &self.min_poly
    }

    pub fn identity_index(&self) -> usize {
        self.identity_index
    }

    /// Current certified isolating interval of root `i` (descending order).
    pub fn root_interval(&self, i: usize) -> (Rat, Rat) {
        self.roots.lock().unwrap()[i].clone()
    }

    pub fn root_intervals(&self) -> Vec<(Rat, Rat)> {
        self.roots.lock().unwrap().clone()
    }

    /// Refine root `i` until its width is at most 2^-bits. Never widens.
    pub fn refine_root(&self, i: usize, bits: u32) -> crate::Result<(Rat, Rat)> {
        if bits > PRECISION_CAP {
            return Err(crate::Error::PrecisionCap {
                cap: PRECISION_CAP,
                context: format!("refining root {i}"),
            });
        }
        let target = Rat::new(BigInt::one(), BigInt::one() << bits);
        let mut guard = self.roots.lock().unwrap();
        let (mut lo, mut hi) = guard[i].clone();
        while &hi - &lo > target {
            let (a, b) = poly::bisect_step(&self.min_poly, &lo, &hi);
            lo = a;
            hi = b;
        }
        guard[i] = (lo.clone(), hi.clone());
        Ok((lo, hi))
    }

    pub fn element_from_coeffs(self: &Arc<Self>, coeffs: Vec<Rat>) -> FieldElement {
        FieldElement::from_raw(Arc::clone(self), coeffs)
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        self.element_from_coeffs(vec![])
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        self.element_from_coeffs(vec![Rat::one()])
    }

    pub fn from_rat(self: &Arc<Self>, q: Rat) -> FieldElement {
        self.element_from_coeffs(vec![q])
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> FieldElement {
        self.from_rat(Rat::from_integer(BigInt::from(n)))
    }

    /// The generator lambda (the identity-embedding root).
    pub fn generator(self: &Arc<Self>) -> FieldElement {
        if self.degree == 1 {
            // lambda is rational: -constant term
            let c = -Rat::from_integer(self.min_poly.coeff(0));
            return self.from_rat(c);
        }
        self.element_from_coeffs(vec![Rat::zero(), Rat::one()])
    }

    /// 2cos(k * pi / N) as an exact element: s_k(lambda_N).
    pub fn two_cos_pi_multiple(self: &Arc<Self>, k: u64) -> FieldElement {
        let s_k = poly::two_cos_multiple(k);
        let coeffs: Vec<Rat> = s_k
            .coeffs()
            .iter()
            .map(|c| Rat::from_integer(c.clone()))
            .collect();
        let mut el = self.element_from_coeffs(coeffs);
        el.reduce();
        el
    }
}

/// An element of a [`FieldDescriptor`] in canonical reduced form:
/// a rational polynomial in the generator of degree < d, lowest terms.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<FieldDescriptor>,
    coeffs: Vec<Rat>,
}

impl std::fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs == other.coeffs
    }
}

impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        for c in &self.coeffs {
            c.numer().hash(state);
            c.denom().hash(state);
        }
    }
}

impl FieldElement {
    fn from_raw(field: Arc<FieldDescriptor>, mut coeffs: Vec<Rat>) -> Self {
        let d = field.degree();
        if coeffs.len() > d {
            let mut el = FieldElement { field, coeffs };
            el.reduce();
            return el;
        }
        coeffs.resize(d.max(1), Rat::zero());
        // degree-1 fields store a single rational even though d = 1
        coeffs.truncate(d.max(1));
        FieldElement { field, coeffs }
    }

    /// Reduce modulo the minimal polynomial (monic, integer coefficients).
    fn reduce(&mut self) {
        let d = self.field.degree();
        let mp = self.field.min_poly();
        while self.coeffs.len() > d.max(1) || (d >= 1 && self.coeffs.len() > d) {
            if self.coeffs.len() <= d {
                break;
            }
            let k = self.coeffs.len() - 1;
            let top = self.coeffs.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            // x^k = x^(k-d) * (x^d - min_poly)
            for j in 0..d {
                let c = mp.coeff(j);
                if !c.is_zero() {
                    let delta = &top * Rat::from_integer(c);
                    self.coeffs[k - d + j] -= delta;
                }
            }
        }
        self.coeffs.resize(d.max(1), Rat::zero());
    }

    pub fn field(&self) -> &Arc<FieldDescriptor> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<Rat> {
        if self.is_rational() {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn same_field(&self, other: &Self) -> crate::Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(crate::Error::MixedFields)
        }
    }

    pub fn checked_add(&self, other: &Self) -> crate::Result<Self> {
        self.same_field(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(FieldElement { field: Arc::clone(&self.field), coeffs })
    }

    pub fn checked_sub(&self, other: &Self) -> crate::Result<Self> {
        self.same_field(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(FieldElement { field: Arc::clone(&self.field), coeffs })
    }

    pub fn checked_mul(&self, other: &Self) -> crate::Result<Self> {
        self.same_field(other)?;
        let d = self.field.degree().max(1);
        let mut prod = vec![Rat::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                prod[i + j] += a * b;
            }
        }
        let mut el = FieldElement { field: Arc::clone(&self.field), coeffs: prod };
        el.reduce();
        Ok(el)
    }

    pub fn neg(&self) -> Self {
        FieldElement {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, q: &Rat) -> Self {
        FieldElement {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in Q[x].
    pub fn inverse(&self) -> crate::Result<Self> {
        if self.is_zero() {
            return Err(crate::Error::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(self.field.from_rat(Rat::one() / q));
        }
        // xgcd(a, m) with m the minimal polynomial: u*a + v*m = gcd = const
        let m: Vec<Rat> = self
            .field
            .min_poly()
            .coeffs()
            .iter()
            .map(|c| Rat::from_integer(c.clone()))
            .collect();
        let a = self.coeffs.clone();
        let (mut r0, mut r1) = (m, a);
        let (mut u0, mut u1) = (vec![Rat::zero()], vec![Rat::one()]);
        loop {
            let deg1 = poly_deg(&r1);
            if deg1.is_none() {
                panic!("minimal polynomial not irreducible");
            }
            let (q, r) = poly_divmod(&r0, &r1);
            let u = poly_sub(&u0, &poly_mul(&q, &u1));
            r0 = r1;
            r1 = r;
            u0 = u1;
            u1 = u;
            if poly_deg(&r1) == Some(0) || r1.iter().all(|c| c.is_zero()) {
                break;
            }
        }
        assert!(
            !r1.iter().all(|c| c.is_zero()),
            "element shares a factor with the minimal polynomial"
        );
        let c = r1[0].clone();
        let inv_coeffs: Vec<Rat> = u1.iter().map(|x| x / &c).collect();
        let mut el = FieldElement { field: Arc::clone(&self.field), coeffs: inv_coeffs };
        el.reduce();
        debug_assert!(el.checked_mul(self).unwrap().is_one());
        Ok(el)
    }

    pub fn checked_div(&self, other: &Self) -> crate::Result<Self> {
        self.checked_mul(&other.inverse()?)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base).unwrap();
            }
            base = base.checked_mul(&base).unwrap();
            e >>= 1;
        }
        acc
    }

    /// Certified interval for the i-th embedding (descending root order),
    /// refined until the width is at most 2^-bits.
    pub fn embed(&self, i: usize, bits: u32) -> crate::Result<RealInterval> {
        assert!(i < self.field.degree().max(1));
        if let Some(q) = self.as_rational() {
            return Ok(RealInterval::point(q, bits));
        }
        let mut root_bits = bits + 4;
        loop {
            if root_bits > PRECISION_CAP {
                return Err(crate::Error::PrecisionCap {
                    cap: PRECISION_CAP,
                    context: format!("embedding evaluation at index {i}"),
                });
            }
            let (lo, hi) = self.field.refine_root(i, root_bits)?;
            let root_iv = RealInterval::new(lo, hi, root_bits + 16);
            let val = self.eval_over(&root_iv);
            if val.width_below(bits) {
                return Ok(val.round_out(root_bits));
            }
            root_bits *= 2;
        }
    }

    /// Interval Horner evaluation of the coefficient polynomial.
    fn eval_over(&self, x: &RealInterval) -> RealInterval {
        let bits = x.bits();
        let mut acc = RealInterval::zero(bits);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add_rat(c);
        }
        acc
    }

    /// Identity-embedding interval.
    pub fn embed_id(&self, bits: u32) -> crate::Result<RealInterval> {
        self.embed(self.field.identity_index(), bits)
    }

    /// Exact sign under the identity embedding.
    pub fn sign(&self) -> crate::Result<i8> {
        if self.is_zero() {
            return Ok(0);
        }
        if let Some(q) = self.as_rational() {
            return Ok(if q.is_negative() { -1 } else { 1 });
        }
        let mut bits = self.field.base_bits;
        loop {
            let iv = self.embed_id(bits)?;
            if iv.strictly_positive() {
                return Ok(1);
            }
            if iv.strictly_negative() {
                return Ok(-1);
            }
            bits *= 2;
            if bits > PRECISION_CAP {
                return Err(crate::Error::PrecisionCap {
                    cap: PRECISION_CAP,
                    context: "sign determination".into(),
                });
            }
        }
    }

    /// Exact order under the identity embedding. Equality is decided by
    /// canonical form; strict order by interval refinement, which terminates
    /// because distinct elements have distinct values.
    pub fn compare(&self, other: &Self) -> crate::Result<Ordering> {
        let diff = self.checked_sub(other)?;
        Ok(match diff.sign()? {
            0 => Ordering::Equal,
            s if s < 0 => Ordering::Less,
            _ => Ordering::Greater,
        })
    }

    pub fn compare_rat(&self, q: &Rat) -> crate::Result<Ordering> {
        self.compare(&self.field.from_rat(q.clone()))
    }

    pub fn abs(&self) -> crate::Result<Self> {
        Ok(if self.sign()? < 0 { self.neg() } else { self.clone() })
    }

    /// Matrix of multiplication by self on the power basis.
    fn mult_matrix(&self) -> Vec<Vec<Rat>> {
        let d = self.field.degree().max(1);
        let mut cols = Vec::with_capacity(d);
        let mut cur = self.clone();
        for j in 0..d {
            cols.push(cur.coeffs.clone());
            if j + 1 < d {
                cur = cur.checked_mul(&self.field.generator()).unwrap();
            }
        }
        // cols[j][i]: coefficient of lambda^i in x*lambda^j; transpose to rows
        let mut rows = vec![vec![Rat::zero(); d]; d];
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                rows[i][j] = v.clone();
            }
        }
        rows
    }

    /// Exact field norm N_{K|Q}(x): determinant of the multiplication matrix.
    /// Computed exactly from coefficients, never from intervals.
    pub fn field_norm(&self) -> Rat {
        if let Some(q) = self.as_rational() {
            return pow_rat(&q, self.field.degree().max(1) as u32);
        }
        det_rat(self.mult_matrix())
    }

    /// Exact trace Tr_{K|Q}(x) = sum of all conjugates.
    pub fn trace_rational(&self) -> Rat {
        if let Some(q) = self.as_rational() {
            return q * Rat::from_integer(BigInt::from(self.field.degree().max(1) as u64));
        }
        let m = self.mult_matrix();
        let mut t = Rat::zero();
        for (i, row) in m.iter().enumerate() {
            t += &row[i];
        }
        t
    }

    /// Monic minimal polynomial of this element over Q, as rational
    /// coefficients in ascending degree (constant first, leading 1 last).
    pub fn min_poly_rational(&self) -> Vec<Rat> {
        let d = self.field.degree().max(1);
        // rows: coordinates of x^0, x^1, ... until linearly dependent
        let mut powers: Vec<Vec<Rat>> = Vec::new();
        let mut cur = self.field.one();
        for k in 0..=d {
            powers.push(cur.coeffs.clone());
            if let Some(dep) = linear_dependence(&powers) {
                debug_assert_eq!(dep.len(), k + 1);
                return dep;
            }
            cur = cur.checked_mul(self).unwrap();
        }
        unreachable!("an element of a degree-d field satisfies a degree <= d relation");
    }

    /// True iff the minimal polynomial over Q is monic with integer
    /// coefficients.
    pub fn is_algebraic_integer(&self) -> bool {
        self.min_poly_rational().iter().all(|c| c.is_integer())
    }

    /// Canonical JSON-facing serialization (ambient Q(2cos(pi/N)) fields).
    pub fn to_serialized(&self) -> SerializedElement {
        let n = self
            .field
            .index_n()
            .expect("canonical serialization applies to Q(2cos(pi/N)) fields");
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        if den.is_negative() {
            den = -den;
        }
        let num = self
            .coeffs
            .iter()
            .map(|c| (c.numer() * (&den / c.denom())).to_string())
            .collect();
        SerializedElement { field_n: n, num, den: den.to_string() }
    }

    pub fn from_serialized(field: &Arc<FieldDescriptor>, s: &SerializedElement) -> crate::Result<Self> {
        if field.index_n() != Some(s.field_n) {
            return Err(crate::Error::MixedFields);
        }
        let den: BigInt = s
            .den
            .parse()
            .map_err(|e| crate::Error::Serde(format!("bad denominator: {e}")))?;
        if den.is_zero() || den.is_negative() {
            return Err(crate::Error::Serde("denominator must be positive".into()));
        }
        let mut coeffs = Vec::with_capacity(s.num.len());
        for t in &s.num {
            let n: BigInt = t
                .parse()
                .map_err(|e| crate::Error::Serde(format!("bad numerator: {e}")))?;
            coeffs.push(Rat::new(n, den.clone()));
        }
        Ok(FieldElement::from_raw(Arc::clone(field), coeffs))
    }

    /// Approximate identity-embedding value, for display and binning only.
    pub fn approx_f64(&self) -> f64 {
        match self.embed_id(60) {
            Ok(iv) => interval::rat_to_f64(&iv.midpoint()),
            Err(_) => f64::NAN,
        }
    }
}

/// Canonical wire form: {"field_N": N, "num": [...], "den": "..."} with
/// coefficients in ascending degree over a common positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerializedElement {
    #[serde(rename = "field_N")]
    pub field_n: u64,
    pub num: Vec<String>,
    pub den: String,
}

fn pow_rat(q: &Rat, e: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e {
        acc *= q;
    }
    acc
}

// -- small exact linear algebra over Q ---------------------------------------

fn poly_deg(p: &[Rat]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| {
            let x = a.get(k).cloned().unwrap_or_else(Rat::zero);
            let y = b.get(k).cloned().unwrap_or_else(Rat::zero);
            x - y
        })
        .collect()
}

fn poly_divmod(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let db = poly_deg(b).expect("division by zero polynomial");
    let lead = b[db].clone();
    let mut rem = a.to_vec();
    let mut quo = vec![Rat::zero(); a.len().saturating_sub(db)];
    while let Some(dr) = poly_deg(&rem) {
        if dr < db {
            break;
        }
        let f = &rem[dr] / &lead;
        for j in 0..=db {
            let delta = &f * &b[j];
            rem[dr - db + j] -= delta;
        }
        quo[dr - db] = f;
        rem[dr] = Rat::zero();
    }
    (quo, rem)
}

/// Exact determinant by fraction-aware Gaussian elimination.
pub fn det_rat(mut m: Vec<Vec<Rat>>) -> Rat {
    let n = m.len();
    let mut det = Rat::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let Some(p) = pivot else { return Rat::zero() };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det *= &pv;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &pv;
            for c in col..n {
                let delta = &f * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    det
}

/// If the last row of `rows` is a linear combination of the previous rows,
/// return the monic relation p(x): x^k = sum c_i x^i as ascending
/// coefficients [c_0, ..., c_{k-1}, 1] (negated into p = x^k - sum...).
fn linear_dependence(rows: &[Vec<Rat>]) -> Option<Vec<Rat>> {
    let k = rows.len() - 1;
    let dim = rows[0].len();
    // solve sum_{i<k} c_i rows[i] = rows[k]
    let mut aug: Vec<Vec<Rat>> = (0..dim)
        .map(|j| {
            let mut row: Vec<Rat> = (0..k).map(|i| rows[i][j].clone()).collect();
            row.push(rows[k][j].clone());
            row
        })
        .collect();
    // gaussian elimination on the dim x (k+1) system
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..k {
        let Some(p) = (r..dim).find(|&i| !aug[i][c].is_zero()) else { continue };
        aug.swap(r, p);
        let pv = aug[r][c].clone();
        for x in aug[r].iter_mut() {
            *x = &*x / &pv;
        }
        for i in 0..dim {
            if i != r && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for j in 0..=k {
                    let delta = &f * &aug[r][j];
                    aug[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == dim {
            break;
        }
    }
    // consistent iff no row reduces to [0 ... 0 | nonzero]
    for row in &aug {
        if row[..k].iter().all(|x| x.is_zero()) && !row[k].is_zero() {
            return None;
        }
    }
    let mut sol = vec![Rat::zero(); k];
    for (idx, &c) in pivots.iter().enumerate() {
        sol[c] = aug[idx][k].clone();
    }
    // p(x) = x^k - sum c_i x^i
    let mut out: Vec<Rat> = sol.into_iter().map(|c| -c).collect();
    out.push(Rat::one());
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::rat_of;

    fn phi_field() -> Arc<FieldDescriptor> {
        FieldDescriptor::new(5)
    }

    #[test]
    fn make_field_examples() {
        let f1 = FieldDescriptor::new(1);
        assert_eq!(f1.degree(), 1);
        assert_eq!(f1.min_poly(), &ZPoly::from_i64(&[2, 1]));

        let f5 = phi_field();
        assert_eq!(f5.degree(), 2);
        assert_eq!(f5.min_poly(), &ZPoly::from_i64(&[-1, -1, 1]));

        let f7 = FieldDescriptor::new(7);
        assert_eq!(f7.degree(), 3);
        assert_eq!(f7.min_poly(), &ZPoly::from_i64(&[1, -2, -1, 1]));
    }

    #[test]
    fn degrees_follow_euler_phi() {
        for n in 2..=24u64 {
            let f = FieldDescriptor::new(n);
            assert_eq!(f.degree() as u64, poly::euler_phi(2 * n) / 2, "N={n}");
        }
    }

    #[test]
    fn golden_ratio_arithmetic() {
        let f = phi_field();
        let lam = f.generator();
        // lambda^2 = lambda + 1
        let sq = lam.checked_mul(&lam).unwrap();
        assert_eq!(sq.coeffs()[0], Rat::one());
        assert_eq!(sq.coeffs()[1], Rat::one());
        // inverse(lambda) = lambda - 1
        let inv = lam.inverse().unwrap();
        assert_eq!(inv.coeffs()[0], rat_of(-1, 1));
        assert_eq!(inv.coeffs()[1], Rat::one());
        // ring identities
        let x = f.from_int(7).checked_add(&lam.scale(&rat_of(3, 2))).unwrap();
        assert_eq!(x.checked_add(&f.zero()).unwrap(), x);
        assert_eq!(x.checked_mul(&f.one()).unwrap(), x);
    }

    #[test]
    fn embeddings_of_golden() {
        let f = phi_field();
        let lam = f.generator();
        let id = lam.embed(0, 80).unwrap();
        let conj = lam.embed(1, 80).unwrap();
        let phi = 1.6180339887498949f64;
        assert!((interval::rat_to_f64(&id.midpoint()) - phi).abs() < 1e-12);
        assert!((interval::rat_to_f64(&conj.midpoint()) - (1.0 - phi)).abs() < 1e-12);
        // embed(4*lambda + 2, sigma_2) ~ -0.472136
        let x = lam.scale(&rat_of(4, 1)).checked_add(&f.from_int(2)).unwrap();
        let e = x.embed(1, 80).unwrap();
        assert!((interval::rat_to_f64(&e.midpoint()) + 0.4721359549995794).abs() < 1e-12);
        // rationals are fixed by all embeddings
        let r = f.from_rat(rat_of(3, 2));
        for i in 0..2 {
            let iv = r.embed(i, 80).unwrap();
            assert!(iv.contains_rat(&rat_of(3, 2)));
            assert_eq!(iv.width(), Rat::zero());
        }
    }

    #[test]
    fn norms() {
        let f = phi_field();
        let lam = f.generator();
        assert_eq!(f.one().field_norm(), Rat::one());
        assert_eq!(f.zero().field_norm(), Rat::zero());
        assert_eq!(lam.field_norm(), rat_of(-1, 1));
        let x = lam.scale(&rat_of(4, 1)).checked_add(&f.from_int(2)).unwrap();
        assert_eq!(x.field_norm(), rat_of(-4, 1));
        // multiplicativity
        let y = lam.checked_add(&f.from_int(3)).unwrap();
        let xy = x.checked_mul(&y).unwrap();
        assert_eq!(xy.field_norm(), x.field_norm() * y.field_norm());
    }

    #[test]
    fn algebraic_integers() {
        let f = phi_field();
        assert!(f.from_int(7).is_algebraic_integer());
        assert!(!f.from_rat(rat_of(1, 2)).is_algebraic_integer());
        assert!(f.generator().is_algebraic_integer());
        assert!(!f.generator().scale(&rat_of(1, 3)).is_algebraic_integer());
    }

    #[test]
    fn comparisons() {
        let f = phi_field();
        let lam = f.generator();
        assert_eq!(lam.compare(&lam).unwrap(), Ordering::Equal);
        // lambda = 1.618... > 8/5
        assert_eq!(lam.compare_rat(&rat_of(8, 5)).unwrap(), Ordering::Greater);
        // lambda^2 - lambda - 1 = 0
        let z = lam
            .checked_mul(&lam)
            .unwrap()
            .checked_sub(&lam)
            .unwrap()
            .checked_sub(&f.one())
            .unwrap();
        assert_eq!(z.compare(&f.zero()).unwrap(), Ordering::Equal);
    }

    #[test]
    fn division_errors() {
        let f = phi_field();
        assert!(matches!(f.zero().inverse(), Err(crate::Error::DivisionByZero)));
        let g = FieldDescriptor::new(7);
        assert!(matches!(
            f.generator().checked_add(&g.generator()),
            Err(crate::Error::MixedFields)
        ));
    }

    #[test]
    fn serialization_roundtrip() {
        let f = phi_field();
        let x = f
            .generator()
            .scale(&rat_of(7, 6))
            .checked_add(&f.from_rat(rat_of(-2, 9)))
            .unwrap();
        let s = x.to_serialized();
        assert_eq!(s.field_n, 5);
        let back = FieldElement::from_serialized(&f, &s).unwrap();
        assert_eq!(back, x);
        // JSON round-trip is bit-exact
        let js = serde_json::to_string(&s).unwrap();
        let s2: SerializedElement = serde_json::from_str(&js).unwrap();
        assert_eq!(s2, s);
    }

    #[test]
    fn trace_contained_in_embedding_sum() {
        let f = FieldDescriptor::new(7);
        let lam = f.generator();
        let x = lam
            .checked_mul(&lam)
            .unwrap()
            .scale(&rat_of(3, 7))
            .checked_add(&f.from_int(2))
            .unwrap();
        let exact = x.trace_rational();
        let mut sum = RealInterval::zero(96);
        for i in 0..f.degree() {
            sum = sum.add(&x.embed(i, 96).unwrap());
        }
        assert!(sum.contains_rat(&exact));
    }

    #[test]
    fn subfield_containment_via_chebyshev() {
        // for a | N the element 2cos(pi/a) = s_{N/a}(lambda_N) has minimal
        // polynomial of degree dividing d
        let f = FieldDescriptor::new(15);
        let d = f.degree();
        for a in [1u64, 3, 5, 15] {
            let el = f.two_cos_pi_multiple(15 / a);
            let mp = el.min_poly_rational();
            let deg = mp.len() - 1;
            assert_eq!(d % deg, 0, "degree {deg} divides {d} for a={a}");
        }
    }
}
