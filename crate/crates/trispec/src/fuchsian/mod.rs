//! Triangle groups Delta(a,b,c) as matrix groups over the hyperbolic plane.
//!
//! The generator pair follows the rotation recipe: A is the rotation by
//! 2pi/a about the base point i, B the rotation by 2pi/b about i*t where t
//! is fixed by the hyperbolic law of cosines for the side joining the two
//! vertices. Matrix entries are certified intervals only; exactness lives in
//! the traces, which all land in the single ambient field Q(2cos(pi/2M)),
//! M = lcm of the finite entries.

pub mod arithmetic;
pub mod traces;

use crate::interval::{self, Mat2, RealInterval, PRECISION_CAP};
use crate::poly::Rat;
use crate::realfield::{FieldDescriptor, FieldElement};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::sync::Arc;
pub use traces::{Letter, TraceQuad, TraceRules, Word};

/// Triangle-group signature (a, b, c), 2 <= a <= b <= c <= infinity,
/// hyperbolic: 1/a + 1/b + 1/c < 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    a: u64,
    b: u64,
    /// None encodes c = infinity.
    c: Option<u64>,
}

impl Signature {
    pub fn new(a: u64, b: u64, c: Option<u64>) -> crate::Result<Signature> {
        let sig = Signature { a, b, c };
        if a < 2 || b < a || c.map_or(false, |c| c < b) {
            return Err(crate::Error::BadSignature(format!(
                "need 2 <= a <= b <= c, got {sig}"
            )));
        }
        if !sig.is_hyperbolic() {
            return Err(crate::Error::NotHyperbolic(sig.to_string()));
        }
        Ok(sig)
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn c(&self) -> Option<u64> {
        self.c
    }

    /// Angle-sum test 1/a + 1/b + 1/c < 1 with 1/inf = 0.
    pub fn is_hyperbolic(&self) -> bool {
        self.margin() > Rat::zero()
    }

    /// Hyperbolicity margin 1 - (1/a + 1/b + 1/c).
    pub fn margin(&self) -> Rat {
        let one = BigInt::one();
        let mut s = Rat::new(one.clone(), BigInt::from(self.a))
            + Rat::new(one.clone(), BigInt::from(self.b));
        if let Some(c) = self.c {
            s += Rat::new(one, BigInt::from(c));
        }
        Rat::one() - s
    }

    pub fn is_cocompact(&self) -> bool {
        self.c.is_some()
    }

    /// lcm of the finite entries.
    pub fn lcm_finite(&self) -> u64 {
        let l = num_integer::lcm(self.a, self.b);
        match self.c {
            Some(c) => num_integer::lcm(l, c),
            None => l,
        }
    }

    /// Parse "2,6,10" or "2,5,inf".
    pub fn parse(s: &str) -> crate::Result<Signature> {
        let parts: Vec<&str> = s.split(',').map(|p| p.trim()).collect();
        if parts.len() != 3 {
            return Err(crate::Error::BadSignature(format!(
                "expected three comma-separated entries, got {s:?}"
            )));
        }
        let parse_entry = |p: &str| -> crate::Result<u64> {
            p.parse()
                .map_err(|_| crate::Error::BadSignature(format!("bad entry {p:?}")))
        };
        let a = parse_entry(parts[0])?;
        let b = parse_entry(parts[1])?;
        let c = if parts[2] == "inf" || parts[2] == "oo" {
            None
        } else {
            Some(parse_entry(parts[2])?)
        };
        Signature::new(a, b, c)
    }
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.c {
            Some(c) => write!(f, "{},{},{}", self.a, self.b, c),
            None => write!(f, "{},{},inf", self.a, self.b),
        }
    }
}

impl std::fmt::Debug for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Delta({self})")
    }
}

/// Isometry type by fixed points, decided by exact trace comparison with 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// A triangle group with exact trace data and certified generator matrices.
pub struct TriangleGroup {
    sig: Signature,
    field: Arc<FieldDescriptor>,
    rules: TraceRules,
    /// x^2 + y^2 + z^2 - xyz - 4; nonzero certifies irreducibility of (A,B).
    kappa: FieldElement,
    bits: u32,
    gen_mats: [Mat2<RealInterval>; 4],
}

impl TriangleGroup {
    /// Build the group with the geometric rotation generators.
    ///
    /// Only the largest entry may be infinite.
    pub fn new(sig: Signature, bits: u32) -> crate::Result<TriangleGroup> {
        let m = sig.lcm_finite();
        let field = FieldDescriptor::new(2 * m);
        let n = 2 * m;
        let x = field.two_cos_pi_multiple(n / sig.a());
        let y = field.two_cos_pi_multiple(n / sig.b());
        let z = match sig.c() {
            Some(c) => field.two_cos_pi_multiple(n / c).neg(),
            None => field.from_int(-2),
        };
        Self::from_trace_triple(sig, field, x, y, z, bits, GeneratorStyle::Rotation)
    }

    /// The classical parabolic/involution generator pair for Delta(2,q,inf):
    /// S = [[0,-1],[1,0]], T = [[1, lambda_q],[0,1]], presented on the
    /// generators (S, ST). A cross-check construction; trace sets from both
    /// constructions must agree.
    pub fn hecke(q: u64, bits: u32) -> crate::Result<TriangleGroup> {
        let sig = Signature::new(2, q, None)?;
        let m = sig.lcm_finite();
        let field = FieldDescriptor::new(2 * m);
        let n = 2 * m;
        let x = field.from_int(0);
        let y = field.two_cos_pi_multiple(n / q);
        let z = field.from_int(-2);
        Self::from_trace_triple(sig, field, x, y, z, bits, GeneratorStyle::Hecke)
    }

    fn from_trace_triple(
        sig: Signature,
        field: Arc<FieldDescriptor>,
        x: FieldElement,
        y: FieldElement,
        z: FieldElement,
        bits: u32,
        style: GeneratorStyle,
    ) -> crate::Result<TriangleGroup> {
        // kappa != 0: the generator pair is irreducible, so trace quadruples
        // determine elements
        let sq = |u: &FieldElement| u.checked_mul(u).unwrap();
        let xyz = x
            .checked_mul(&y)
            .unwrap()
            .checked_mul(&z)
            .unwrap();
        let kappa = sq(&x)
            .checked_add(&sq(&y))
            .unwrap()
            .checked_add(&sq(&z))
            .unwrap()
            .checked_sub(&xyz)
            .unwrap()
            .checked_sub(&field.from_int(4))
            .unwrap();
        assert!(!kappa.is_zero(), "degenerate (reducible) generator pair");
        let rules = TraceRules::new(x, y, z);
        let gen_mats = match style {
            GeneratorStyle::Rotation => build_rotation_generators(&sig, &field, bits)?,
            GeneratorStyle::Hecke => build_hecke_generators(&field, &rules.y, bits)?,
        };
        let group = TriangleGroup { sig, field, rules, kappa, bits, gen_mats };
        group.certify_generators()?;
        Ok(group)
    }

    /// Interval certification of the construction: determinants contain 1,
    /// matrix traces match the exact traces, and the sign convention of
    /// z = tr(AB) is pinned by the constructed matrices.
    fn certify_generators(&self) -> crate::Result<()> {
        let [a, _ai, b, _bi] = &self.gen_mats;
        for m in [a, b] {
            let det = m.det();
            assert!(det.contains_rat(&Rat::one()), "generator determinant drifted from 1");
        }
        let ab = a.mul(b);
        let tr_ab = ab.trace();
        let z_iv = self.rules.z.embed_id(self.bits.min(96))?;
        if !tr_ab.intersects(&z_iv) {
            return Err(crate::Error::IntervalDomain(
                "constructed tr(AB) does not match the exact z".into(),
            ));
        }
        // the opposite sign must be excluded unless z = 0
        if !self.rules.z.is_zero() {
            let neg_iv = self.rules.z.neg().embed_id(self.bits.min(96))?;
            if tr_ab.intersects(&neg_iv) {
                return Err(crate::Error::PrecisionCap {
                    cap: self.bits,
                    context: "certifying the sign of tr(AB)".into(),
                });
            }
        }
        Ok(())
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn field(&self) -> &Arc<FieldDescriptor> {
        &self.field
    }

    pub fn rules(&self) -> &TraceRules {
        &self.rules
    }

    pub fn kappa(&self) -> &FieldElement {
        &self.kappa
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Generator matrix for a letter, at construction precision.
    pub fn generator(&self, l: Letter) -> &Mat2<RealInterval> {
        &self.gen_mats[l as usize]
    }

    /// Generator matrices rebuilt at a different precision (for escalation).
    pub fn generators_at(&self, bits: u32) -> crate::Result<[Mat2<RealInterval>; 4]> {
        if bits > PRECISION_CAP {
            return Err(crate::Error::PrecisionCap {
                cap: PRECISION_CAP,
                context: "rebuilding generator matrices".into(),
            });
        }
        match self.style() {
            GeneratorStyle::Rotation => build_rotation_generators(&self.sig, &self.field, bits),
            GeneratorStyle::Hecke => build_hecke_generators(&self.field, &self.rules.y, bits),
        }
    }

    fn style(&self) -> GeneratorStyle {
        // Hecke-style groups store exact rational 0/-1/1 entries in A; the
        // rotation construction for a = 2 has the same A, so distinguish by
        // the B matrix shape: Hecke B = ST has zero width in every entry.
        let b = &self.gen_mats[Letter::B as usize];
        if b.a.width().is_zero() && b.d.width() > Rat::zero() {
            GeneratorStyle::Hecke
        } else if b.entries().iter().all(|e| e.width().is_zero() || !e.width().is_zero()) {
            // fall back to signature: entries of the rotation B are irrational
            // unless degenerate; Hecke B entries are 0, -1, 1, lambda
            if b.b.width().is_zero() && b.c.width().is_zero() {
                GeneratorStyle::Hecke
            } else {
                GeneratorStyle::Rotation
            }
        } else {
            GeneratorStyle::Rotation
        }
    }

    /// Word evaluation as an interval matrix product at the given precision.
    pub fn matrix_of_word(&self, w: &Word, bits: u32) -> crate::Result<Mat2<RealInterval>> {
        self.matrix_of_letters(&w.letters().collect::<Vec<_>>(), bits)
    }

    /// Like [`Self::matrix_of_word`] for arbitrary-length letter sequences.
    pub fn matrix_of_letters(
        &self,
        letters: &[Letter],
        bits: u32,
    ) -> crate::Result<Mat2<RealInterval>> {
        let gens = if bits == self.bits {
            None
        } else {
            Some(self.generators_at(bits)?)
        };
        let gens: &[Mat2<RealInterval>; 4] = gens.as_ref().unwrap_or(&self.gen_mats);
        let mut m = Mat2::<RealInterval>::identity();
        for &l in letters {
            m = m.mul(&gens[l as usize]);
        }
        Ok(m)
    }

    /// Exact trace quadruple of an arbitrary-length letter sequence.
    pub fn quad_of_letters(&self, letters: &[Letter]) -> TraceQuad {
        let mut q = self.rules.identity_quad();
        for &l in letters {
            q = self.rules.extend(&q, l);
        }
        q
    }

    /// Build the full exact-and-certified isometry for a word.
    pub fn isometry(&self, w: Word) -> crate::Result<Isometry> {
        let quad = self.rules.quad_of_word(&w);
        let mat = self.matrix_of_word(&w, self.bits)?;
        Isometry::assemble(self, w, quad, mat)
    }

    /// Classification from an exact trace quadruple.
    pub fn classify_quad(&self, quad: &TraceQuad) -> crate::Result<Classification> {
        // identity in PSL iff the quadruple is +-(2, x, y, z)
        let id = self.rules.identity_quad();
        if quad.same_psl_element(&id) {
            return Ok(Classification::Identity);
        }
        let two = self.field.from_int(2);
        let abs_t = quad.w.abs()?;
        Ok(match abs_t.compare(&two)? {
            Ordering::Less => Classification::Elliptic,
            Ordering::Equal => Classification::Parabolic,
            Ordering::Greater => Classification::Hyperbolic,
        })
    }

    /// Translation length from an exact hyperbolic trace:
    /// l = 2 arcosh(|tr|/2), certified to width 2^-bits.
    pub fn length_from_trace(&self, t: &FieldElement, bits: u32) -> crate::Result<RealInterval> {
        length_from_trace(t, bits)
    }

    /// Exact verification of the generator relations. In SL(2,R):
    /// A^a = B^b = -Identity, and (AB)^c = (-1)^(c-1) Identity because the
    /// construction pins tr(AB) = -2cos(pi/c). For c = infinity, AB is
    /// parabolic. All checks are exact trace-quadruple identities.
    pub fn verify_torsion_relations(&self) -> crate::Result<()> {
        let id = self.rules.identity_quad();
        let fail = |what: &str| {
            crate::Error::InequalityViolated(format!(
                "torsion relation {what} failed for {}",
                self.sig
            ))
        };
        let power_word = |letters: &[Letter], count: u64| {
            let mut w = Word::empty();
            for _ in 0..count {
                for &l in letters {
                    w = w.push(l).expect("relation word exceeds capacity");
                }
            }
            w
        };
        let qa = self.rules.quad_of_word(&power_word(&[Letter::A], self.sig.a()));
        if qa != id.negate() {
            return Err(fail("A^a = -1"));
        }
        let qb = self.rules.quad_of_word(&power_word(&[Letter::B], self.sig.b()));
        if qb != id.negate() {
            return Err(fail("B^b = -1"));
        }
        match self.sig.c() {
            Some(c) => {
                let qab = self.rules.quad_of_word(&power_word(&[Letter::A, Letter::B], c));
                let expected = if c % 2 == 0 { id.negate() } else { id };
                if qab != expected {
                    return Err(fail("(AB)^c = (-1)^(c-1)"));
                }
            }
            None => {
                let qab = self.rules.quad_of_word(&power_word(&[Letter::A, Letter::B], 1));
                if self.classify_quad(&qab)? != Classification::Parabolic {
                    return Err(fail("AB parabolic"));
                }
            }
        }
        Ok(())
    }

    /// One-step displacement bound: max over generators of d(i, g i), f64.
    pub fn max_generator_displacement(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for m in &self.gen_mats {
            let ss = m.sum_of_squares().to_f64();
            let cosh_d = (ss.hi / 2.0).max(1.0);
            worst = worst.max((cosh_d).acosh());
        }
        worst
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum GeneratorStyle {
    Rotation,
    Hecke,
}

/// Translation length of a hyperbolic trace, standalone form.
pub fn length_from_trace(t: &FieldElement, bits: u32) -> crate::Result<RealInterval> {
    let two = t.field().from_int(2);
    let abs_t = t.abs()?;
    if abs_t.compare(&two)? != Ordering::Greater {
        let cls = if abs_t.compare(&two)? == Ordering::Equal {
            Classification::Parabolic
        } else {
            Classification::Elliptic
        };
        return Err(crate::Error::NotHyperbolicElement(cls));
    }
    let mut work = bits + 8;
    loop {
        let half = abs_t.embed_id(work)?.scale_rat(&interval::rat_of(1, 2));
        match interval::arcosh_iv(&half, work) {
            Ok(l) => {
                let out = l.scale_rat(&interval::rat_of(2, 1));
                if out.width_below(bits) {
                    return Ok(out.round_out(work));
                }
            }
            Err(crate::Error::IntervalDomain(_)) => {} // |t|/2 enclosure touched 1; refine
            Err(e) => return Err(e),
        }
        work *= 2;
        if work > PRECISION_CAP {
            return Err(crate::Error::PrecisionCap {
                cap: PRECISION_CAP,
                context: "length evaluation".into(),
            });
        }
    }
}

/// tr(gamma^2) from tr(gamma): t^2 - 2.
pub fn squared_trace(t: &FieldElement) -> FieldElement {
    t.checked_mul(t)
        .unwrap()
        .checked_sub(&t.field().from_int(2))
        .unwrap()
}

/// tr(gamma^n) from tr(gamma), by the 2cos/2cosh recursion
/// p_0 = 2, p_1 = t, p_{k+1} = t p_k - p_{k-1}.
pub fn power_trace(t: &FieldElement, n: u64) -> FieldElement {
    let mut prev = t.field().from_int(2);
    if n == 0 {
        return prev;
    }
    let mut cur = t.clone();
    for _ in 1..n {
        let next = t.checked_mul(&cur).unwrap().checked_sub(&prev).unwrap();
        prev = cur;
        cur = next;
    }
    cur
}

/// A group element: word, certified matrix, exact trace quadruple.
#[derive(Clone)]
pub struct Isometry {
    pub word: Word,
    pub mat: Mat2<RealInterval>,
    pub quad: TraceQuad,
    classification: Classification,
}

impl Isometry {
    fn assemble(
        group: &TriangleGroup,
        word: Word,
        quad: TraceQuad,
        mat: Mat2<RealInterval>,
    ) -> crate::Result<Isometry> {
        let classification = group.classify_quad(&quad)?;
        let iso = Isometry { word, mat, quad, classification };
        debug_assert!(iso.trace_consistent(group.bits()));
        Ok(iso)
    }

    pub fn classification(&self) -> Classification {
        self.classification
    }

    pub fn trace(&self) -> &FieldElement {
        &self.quad.w
    }

    /// The identity-embedding interval of the exact trace must meet the
    /// interval trace of the matrix (up to the global sign of the matrix).
    pub fn trace_consistent(&self, bits: u32) -> bool {
        let Ok(exact) = self.quad.w.embed_id(bits.min(96)) else { return false };
        let m_tr = self.mat.trace();
        m_tr.intersects(&exact) || m_tr.intersects(&exact.neg())
    }

    /// Certified translation length.
    pub fn length(&self, bits: u32) -> crate::Result<RealInterval> {
        if self.classification != Classification::Hyperbolic {
            return Err(crate::Error::NotHyperbolicElement(self.classification));
        }
        length_from_trace(&self.quad.w, bits)
    }
}

fn half(iv: &RealInterval) -> RealInterval {
    iv.scale_rat(&interval::rat_of(1, 2))
}

fn build_rotation_generators(
    sig: &Signature,
    field: &Arc<FieldDescriptor>,
    bits: u32,
) -> crate::Result<[Mat2<RealInterval>; 4]> {
    let n = 2 * sig.lcm_finite();
    let mut work = bits.max(64);
    loop {
        let cos_a = half(&field.two_cos_pi_multiple(n / sig.a()).embed_id(work)?);
        let cos_b = half(&field.two_cos_pi_multiple(n / sig.b()).embed_id(work)?);
        let cos_c = match sig.c() {
            Some(c) => half(&field.two_cos_pi_multiple(n / c).embed_id(work)?),
            None => RealInterval::one(work),
        };
        let one = RealInterval::one(work);
        let sin_a = interval::sqrt_iv(&one.sub(&cos_a.square()), work)?;
        let sin_b = interval::sqrt_iv(&one.sub(&cos_b.square()), work)?;
        if !(sin_a.strictly_positive() && sin_b.strictly_positive()) {
            work *= 2;
            continue;
        }
        let h = cos_a
            .mul(&cos_b)
            .add(&cos_c)
            .div(&sin_a.mul(&sin_b))?;
        let h2m1 = h.square().sub(&one);
        if !h2m1.strictly_positive() {
            if work >= PRECISION_CAP {
                return Err(crate::Error::PrecisionCap {
                    cap: PRECISION_CAP,
                    context: "certifying the vertex distance h > 1".into(),
                });
            }
            work *= 2;
            continue;
        }
        let t = h.add(&interval::sqrt_iv(&h2m1, work)?);
        let a_mat = Mat2 {
            a: cos_a.clone(),
            b: sin_a.clone(),
            c: sin_a.neg(),
            d: cos_a.clone(),
        };
        let b_mat = Mat2 {
            a: cos_b.clone(),
            b: t.mul(&sin_b),
            c: sin_b.neg().div(&t)?,
            d: cos_b.clone(),
        };
        let a_inv = a_mat.adjugate();
        let b_inv = b_mat.adjugate();
        return Ok([a_mat, a_inv, b_mat, b_inv]);
    }
}

fn build_hecke_generators(
    _field: &Arc<FieldDescriptor>,
    y: &FieldElement,
    bits: u32,
) -> crate::Result<[Mat2<RealInterval>; 4]> {
    let work = bits.max(64);
    let lam = y.embed_id(work)?;
    let zero = RealInterval::zero(work);
    let one = RealInterval::one(work);
    // S = [[0,-1],[1,0]], B = ST = [[0,-1],[1,lambda]]
    let s = Mat2 { a: zero.clone(), b: one.neg(), c: one.clone(), d: zero.clone() };
    let b = Mat2 { a: zero.clone(), b: one.neg(), c: one.clone(), d: lam };
    let s_inv = s.adjugate();
    let b_inv = b.adjugate();
    Ok([s, s_inv, b, b_inv])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{rat_of, rat_to_f64};

    fn group(sig: &str) -> TriangleGroup {
        TriangleGroup::new(Signature::parse(sig).unwrap(), 128).unwrap()
    }

    #[test]
    fn signature_validation() {
        assert!(Signature::parse("2,3,7").is_ok());
        assert!(Signature::parse("2,5,inf").is_ok());
        assert!(matches!(Signature::parse("2,3,6"), Err(crate::Error::NotHyperbolic(_))));
        assert!(matches!(Signature::parse("2,3,5"), Err(crate::Error::NotHyperbolic(_))));
        assert!(matches!(Signature::parse("1,9,9"), Err(crate::Error::BadSignature(_))));
        assert!(matches!(Signature::parse("3,2,7"), Err(crate::Error::BadSignature(_))));
        let s = Signature::parse("2,6,10").unwrap();
        assert_eq!(s.margin(), rat_of(7, 30));
        assert!(s.is_cocompact());
        assert!(!Signature::parse("2,5,inf").unwrap().is_cocompact());
    }

    #[test]
    fn law_of_cosines_example_2_3_inf() {
        // h = (0*(1/2) + 1) / (1 * sqrt(3)/2) = 2/sqrt(3)
        let g = group("2,3,inf");
        let b = g.generator(Letter::B);
        // t + 1/t = 2h; recover h from the B matrix: b.b * (-b.c) = sin^2
        // easier: h from the construction directly
        let expected_h = 2.0 / 3.0f64.sqrt();
        // reconstruct h = cosh(d_ab) from t: here b.b = t sin(pi/3)
        let sin_b = (1.0f64 - 0.25).sqrt(); // sin(pi/3) with cos = 1/2
        let t = rat_to_f64(&b.b.midpoint()) / sin_b;
        let h = 0.5 * (t + 1.0 / t);
        assert!((h - expected_h).abs() < 1e-12, "h = {h}, expected {expected_h}");
    }

    #[test]
    fn hecke_2_5_inf_traces() {
        let g = group("2,5,inf");
        assert!(g.rules().x.is_zero(), "tr A = 0");
        // tr B = 2cos(pi/5) = golden ratio
        let y = g.rules().y.embed_id(80).unwrap();
        assert!((rat_to_f64(&y.midpoint()) - 1.618033988749895).abs() < 1e-12);
        // AB parabolic
        let ab = g.rules().quad_of_word(&Word::parse("AB").unwrap());
        assert_eq!(g.classify_quad(&ab).unwrap(), Classification::Parabolic);
    }

    #[test]
    fn relation_powers_reduce_to_torsion() {
        // A^a = B^b = -1 in SL(2,R); (AB)^c picks up the parity of c because
        // tr(AB) = -2cos(pi/c): the lift is (-1)^(c-1).
        for sig in ["2,3,7", "2,6,10", "3,3,4", "2,5,inf", "2,3,inf"] {
            let g = group(sig);
            g.verify_torsion_relations().unwrap();
        }
        // pin the sign explicitly for one odd and one even c
        let g7 = group("2,3,7");
        let mut w = Word::empty();
        for _ in 0..7 {
            w = w.push(Letter::A).unwrap();
            w = w.push(Letter::B).unwrap();
        }
        assert_eq!(g7.rules().quad_of_word(&w), g7.rules().identity_quad());
        let g10 = group("2,6,10");
        let mut w = Word::empty();
        for _ in 0..10 {
            w = w.push(Letter::A).unwrap();
            w = w.push(Letter::B).unwrap();
        }
        assert_eq!(
            g10.rules().quad_of_word(&w),
            g10.rules().identity_quad().negate()
        );
    }

    #[test]
    fn relation_2_6_10_certified_by_intervals() {
        let g = group("2,6,10");
        let mut w = Word::empty();
        for _ in 0..10 {
            w = w.push(Letter::A).unwrap();
            w = w.push(Letter::B).unwrap();
        }
        let m = g.matrix_of_word(&w, 192).unwrap();
        let minus_one = rat_of(-1, 1);
        assert!(m.a.contains_rat(&minus_one));
        assert!(m.d.contains_rat(&minus_one));
        assert!(m.b.contains_rat(&Rat::zero()));
        assert!(m.c.contains_rat(&Rat::zero()));
        assert!(m.a.width() < rat_of(1, 1_000_000));
    }

    #[test]
    fn quad_rules_match_interval_products() {
        // every extension rule cross-checked against matrix products
        let g = group("2,6,10");
        let words = ["A", "B", "AB", "BA", "aB", "Ab", "ABab", "BBAb", "AbaB", "BABA", "abab"];
        for w_str in &words {
            let w = Word::parse(w_str).unwrap();
            let quad = g.rules().quad_of_word(&w);
            let m = g.matrix_of_word(&w, 128).unwrap();
            let suffixes: [Word; 3] = [
                Word::parse("A").unwrap(),
                Word::parse("B").unwrap(),
                Word::parse("AB").unwrap(),
            ];
            let quads = [&quad.w, &quad.wa, &quad.wb, &quad.wab];
            for (k, suffix) in std::iter::once(Word::empty()).chain(suffixes).enumerate() {
                let mut full = m.clone();
                for l in suffix.letters() {
                    full = full.mul(g.generator(l));
                }
                let exact_iv = quads[k].embed_id(96).unwrap();
                let mat_tr = full.trace();
                assert!(
                    mat_tr.intersects(&exact_iv),
                    "word {w_str} suffix {k}: exact {:?} vs matrix {:?}",
                    exact_iv.to_f64(),
                    mat_tr.to_f64()
                );
            }
        }
    }

    #[test]
    fn classify_examples() {
        let g = group("2,5,inf");
        let id = g.rules().quad_of_word(&Word::empty());
        assert_eq!(g.classify_quad(&id).unwrap(), Classification::Identity);
        // A has order 2: AA is the identity in PSL
        let aa = g.rules().quad_of_word(&Word::parse("AA").unwrap());
        assert_eq!(g.classify_quad(&aa).unwrap(), Classification::Identity);
        // BBA-type words are hyperbolic with trace 2 lambda_5
        let bba = g.rules().quad_of_word(&Word::parse("BBA").unwrap());
        let tr = bba.w.abs().unwrap();
        let expected = g.rules().y.scale(&rat_of(2, 1)); // 2cos(pi/5)*2
        assert_eq!(tr.compare(&expected).unwrap(), Ordering::Equal);
        assert_eq!(g.classify_quad(&bba).unwrap(), Classification::Hyperbolic);
    }

    #[test]
    fn length_examples() {
        let f = FieldDescriptor::new(5);
        // |tr| = 3: l = 2 arcosh(1.5) = 1.9248473002384139...
        let l = length_from_trace(&f.from_int(3), 64).unwrap();
        assert!((rat_to_f64(&l.midpoint()) - 1.9248473002384139).abs() < 1e-12);
        // |tr| = 2 is parabolic: explicit error naming the classification
        match length_from_trace(&f.from_int(2), 64) {
            Err(crate::Error::NotHyperbolicElement(Classification::Parabolic)) => {}
            other => panic!("expected parabolic error, got {other:?}"),
        }
        match length_from_trace(&f.from_int(1), 64) {
            Err(crate::Error::NotHyperbolicElement(Classification::Elliptic)) => {}
            other => panic!("expected elliptic error, got {other:?}"),
        }
    }

    #[test]
    fn length_round_trip() {
        // 2 arcosh(cosh(l/2)) = l for sampled l, via trace 2cosh(l/2)
        let f = FieldDescriptor::new(5);
        for l_tenths in [12u32, 35, 60, 101, 150, 200] {
            let l = rat_of(l_tenths as i64, 10);
            let half_l = RealInterval::point(l.clone(), 200).scale_rat(&rat_of(1, 2));
            let tr = interval::cosh_iv(&half_l, 200).scale_rat(&rat_of(2, 1));
            // use the rational midpoint as an exact trace stand-in
            let t = f.from_rat(tr.midpoint());
            let back = length_from_trace(&t, 128).unwrap();
            let err = (rat_to_f64(&back.midpoint()) - rat_to_f64(&l)).abs();
            assert!(err < 1e-12, "round trip error {err} at l={l}");
        }
    }

    #[test]
    fn squared_trace_examples() {
        let f = FieldDescriptor::new(5);
        assert_eq!(squared_trace(&f.from_int(2)), f.from_int(2));
        assert_eq!(squared_trace(&f.from_int(3)), f.from_int(7));
        let lam = f.generator();
        let st = squared_trace(&lam);
        // lambda^2 - 2 = lambda - 1
        assert_eq!(st.coeffs()[0], rat_of(-1, 1));
        assert_eq!(st.coeffs()[1], Rat::one());
        // power traces: p_2(t) = t^2-2 matches squared_trace
        assert_eq!(power_trace(&f.from_int(3), 2), f.from_int(7));
        // p_3(3) = 3^3 - 3*3 = 18
        assert_eq!(power_trace(&f.from_int(3), 3), f.from_int(18));
    }

    #[test]
    fn hecke_cross_check_same_traces() {
        let geo = group("2,5,inf");
        let hec = TriangleGroup::hecke(5, 128).unwrap();
        // identical exact trace coordinates
        assert_eq!(geo.rules().x, hec.rules().x);
        assert_eq!(geo.rules().y, hec.rules().y);
        assert_eq!(geo.rules().z, hec.rules().z);
        // matrices differ but matrix traces match exact traces in both
        for w_str in ["AB", "BAB", "ABab", "BBA"] {
            let w = Word::parse(w_str).unwrap();
            let q = geo.rules().quad_of_word(&w);
            for g in [&geo, &hec] {
                let m = g.matrix_of_word(&w, 96).unwrap();
                let iv = q.w.embed_id(80).unwrap();
                assert!(m.trace().intersects(&iv) || m.trace().intersects(&iv.neg()));
            }
        }
    }

    #[test]
    fn isometry_invariants() {
        let g = group("2,3,7");
        for w_str in ["AB", "ABAB", "ABb", "aBAbA"] {
            let iso = g.isometry(Word::parse(w_str).unwrap()).unwrap();
            assert!(iso.trace_consistent(96));
            let det = iso.mat.det();
            assert!(det.contains_rat(&Rat::one()));
        }
    }
}
