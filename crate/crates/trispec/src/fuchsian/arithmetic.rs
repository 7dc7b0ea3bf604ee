//! Trace fields, arithmetic dimension, and arithmeticity.
//!
//! The scans work on the word ball: a breadth-first enumeration of group
//! elements up to a word-length cap, deduplicated exactly by sign-canonical
//! trace quadruples (no matrices, no floating point). The squares subgroup
//! is cut out exactly: Gamma/Gamma^(2) is the quotient of (Z/2)^2 by the
//! parities of the torsion relations, so membership is a parity test on the
//! word.

use super::traces::{Letter, TraceQuad, Word};
use super::{Signature, TriangleGroup};
use crate::realfield::subfield::{Subfield, SubfieldPresentation};
use crate::realfield::FieldElement;
use std::collections::HashMap;

/// One group element of the word ball.
#[derive(Clone)]
pub struct BallElement {
    pub word: Word,
    pub quad: TraceQuad,
    /// (A-parity, B-parity) of the word.
    pub parity: (u8, u8),
    /// BFS tree structure: index of the word prefix and the appended letter
    /// (the identity is its own parent).
    pub parent: u32,
    pub letter: Letter,
}

/// BFS over words up to `cap` letters, deduplicated exactly as PSL elements
/// via canonical trace quadruples. Returns elements grouped in BFS order;
/// each element carries its shortlex-least word.
pub fn word_ball(group: &TriangleGroup, cap: usize) -> Vec<BallElement> {
    let rules = group.rules();
    let mut seen: HashMap<TraceQuad, usize> = HashMap::new();
    let mut out: Vec<BallElement> = Vec::new();
    let id = BallElement {
        word: Word::empty(),
        quad: rules.identity_quad(),
        parity: (0, 0),
        parent: 0,
        letter: Letter::A,
    };
    seen.insert(id.quad.canonical_psl(), 0);
    out.push(id);
    let mut frontier: Vec<usize> = vec![0];
    for _level in 1..=cap {
        let mut next = Vec::new();
        for &idx in &frontier {
            let parent = out[idx].clone();
            for l in Letter::ALL {
                if parent.word.last() == Some(l.inverse()) {
                    continue; // free reduction
                }
                let Some(word) = parent.word.push(l) else { continue };
                let quad = rules.extend(&parent.quad, l);
                let key = quad.canonical_psl();
                if seen.contains_key(&key) {
                    continue;
                }
                let parity = word.parity();
                seen.insert(key, out.len());
                next.push(out.len());
                out.push(BallElement { word, quad, parity, parent: idx as u32, letter: l });
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    out
}

/// The subgroup of (Z/2)^2 generated by the parities of the torsion
/// relations; Gamma^(2) is exactly the set of words whose parity lies here.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SquaresParity {
    members: [bool; 4], // indexed by pa + 2*pb
}

impl SquaresParity {
    pub fn of(sig: Signature) -> SquaresParity {
        let mut gens: Vec<(u8, u8)> = Vec::new();
        if sig.a() % 2 == 1 {
            gens.push((1, 0));
        }
        if sig.b() % 2 == 1 {
            gens.push((0, 1));
        }
        if let Some(c) = sig.c() {
            if c % 2 == 1 {
                gens.push((1, 1));
            }
        }
        let mut members = [false; 4];
        members[0] = true;
        // close under addition mod 2
        loop {
            let mut grew = false;
            for i in 0..4 {
                if !members[i] {
                    continue;
                }
                for &(ga, gb) in &gens {
                    let j = ((i as u8 & 1) ^ ga) as usize + 2 * ((((i as u8) >> 1) & 1) ^ gb) as usize;
                    if !members[j] {
                        members[j] = true;
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        SquaresParity { members }
    }

    pub fn contains(&self, parity: (u8, u8)) -> bool {
        self.members[(parity.0 & 1) as usize + 2 * (parity.1 & 1) as usize]
    }

    /// Index of Gamma^(2) in Gamma.
    pub fn index(&self) -> usize {
        4 / self.members.iter().filter(|&&m| m).count()
    }
}

/// Result of the invariant-trace-field scan.
pub struct TraceFieldScan {
    pub subfield: Subfield,
    pub presentation: SubfieldPresentation,
    /// First word cap W with the field unchanged from W-2 to W.
    pub stabilized_at: Option<usize>,
    pub word_cap: usize,
    /// The ball used for the scan, reusable by later passes.
    pub ball: Vec<BallElement>,
}

impl TraceFieldScan {
    pub fn degree(&self) -> usize {
        self.subfield.dim()
    }

    pub fn stabilized(&self) -> bool {
        self.stabilized_at.is_some()
    }
}

/// The invariant trace field: the subfield of the ambient field generated by
/// {tr(gamma^2) : gamma in the word ball}, with a stabilization certificate.
/// A non-stabilized scan is reported in the result, never silently.
pub fn invariant_trace_field(group: &TriangleGroup, word_cap: usize) -> crate::Result<TraceFieldScan> {
    let ball = word_ball(group, word_cap);
    let ambient = group.field();
    let mut sf = Subfield::generate(ambient, &[]);
    // level-by-level: dims[w] = dim after absorbing words of length <= w
    let mut dims: Vec<usize> = Vec::new();
    let mut stabilized_at = None;
    let mut level_start = 0usize;
    for w in 0..=word_cap {
        let mut idx = level_start;
        while idx < ball.len() && ball[idx].word.len() == w {
            let t2 = super::squared_trace(&ball[idx].quad.w);
            sf.add_generator(&t2);
            idx += 1;
        }
        level_start = idx;
        dims.push(sf.dim());
        if w >= 2 && dims[w] == dims[w - 2] && stabilized_at.is_none() {
            stabilized_at = Some(w);
            // the certificate needs two quiet increments; keep absorbing to
            // confirm nothing later in the ball grows the field
        }
        if idx >= ball.len() {
            break;
        }
    }
    // final consistency: if anything grew after the certificate, it is void
    if let Some(w) = stabilized_at {
        if sf.dim() != dims[w] {
            stabilized_at = None;
        }
    }
    let presentation = sf.to_descriptor()?;
    Ok(TraceFieldScan { subfield: sf, presentation, stabilized_at, word_cap, ball })
}

/// Verdict for one embedding of the invariant trace field.
#[derive(Clone, Debug)]
pub enum EmbeddingVerdict {
    /// Certified witness trace with |sigma(tr)| > 2.
    Unbounded { witness: Word },
    /// Every sampled conjugate trace stayed inside [-2, 2] up to the cap.
    BoundedAtCap,
}

/// Result of the arithmetic-dimension scan.
pub struct DimensionScan {
    pub r: usize,
    pub verdicts: Vec<EmbeddingVerdict>,
    /// sign of sigma_j(kappa) for each embedding of K, kappa the
    /// two-generator character discriminant x^2+y^2+z^2-xyz-4.
    pub kappa_signs: Vec<i8>,
    pub word_cap: usize,
    pub squares_checked: usize,
}

/// Arithmetic dimension: the number of embeddings of the invariant trace
/// field under which some enumerated Gamma^(2) trace leaves [-2, 2],
/// certified by intervals. Bounded verdicts are cross-checked against the
/// sign of the conjugated character discriminant; disagreement is an error.
pub fn arithmetic_dimension(
    group: &TriangleGroup,
    scan: &TraceFieldScan,
) -> crate::Result<DimensionScan> {
    let parities = SquaresParity::of(group.signature());
    let pres = &scan.presentation;
    let k_deg = pres.descriptor.degree().max(1);
    let reps = pres.section();
    let two = crate::interval::rat_of(2, 1);

    // kappa must live in K (runtime containment check)
    if !scan.subfield.contains(group.kappa()) {
        return Err(crate::Error::AmbientContainment(
            "character discriminant lies outside the scanned trace field".into(),
        ));
    }

    let mut verdicts: Vec<Option<Word>> = vec![None; k_deg];
    let mut squares_checked = 0usize;
    for el in &scan.ball {
        if !parities.contains(el.parity) {
            continue;
        }
        squares_checked += 1;
        let t = &el.quad.w;
        if !scan.subfield.contains(t) {
            return Err(crate::Error::AmbientContainment(format!(
                "trace of {} lies outside the scanned trace field",
                el.word
            )));
        }
        for j in 0..k_deg {
            if verdicts[j].is_some() {
                continue;
            }
            if embed_abs_certainly_gt(t, reps[j], &two)? {
                verdicts[j] = Some(el.word);
            }
        }
        if verdicts.iter().all(|v| v.is_some()) {
            break;
        }
    }

    let mut kappa_signs = Vec::with_capacity(k_deg);
    for j in 0..k_deg {
        kappa_signs.push(sign_under_embedding(group.kappa(), reps[j])?);
    }
    // cross-check: unbounded <=> kappa conjugate positive
    for j in 0..k_deg {
        let unbounded = verdicts[j].is_some();
        let positive = kappa_signs[j] > 0;
        if unbounded != positive {
            return Err(crate::Error::BoundednessDisagreement { embedding: j });
        }
    }

    let r = verdicts.iter().filter(|v| v.is_some()).count();
    Ok(DimensionScan {
        r,
        verdicts: verdicts
            .into_iter()
            .map(|v| match v {
                Some(w) => EmbeddingVerdict::Unbounded { witness: w },
                None => EmbeddingVerdict::BoundedAtCap,
            })
            .collect(),
        kappa_signs,
        word_cap: scan.word_cap,
        squares_checked,
    })
}

/// |sigma_i(t)| > 2, certified; refusal to certify counts as "not greater".
fn embed_abs_certainly_gt(
    t: &FieldElement,
    ambient_embedding: usize,
    threshold: &crate::poly::Rat,
) -> crate::Result<bool> {
    let mut bits = 64u32;
    loop {
        let iv = t.embed(ambient_embedding, bits)?.abs();
        if iv.lo() > threshold {
            return Ok(true);
        }
        if iv.hi() <= threshold {
            return Ok(false);
        }
        bits *= 2;
        if bits > 1024 {
            // straddling 2 at high precision: the conjugate is +-2 or
            // indistinguishably close; not a certified witness
            return Ok(false);
        }
    }
}

fn sign_under_embedding(x: &FieldElement, ambient_embedding: usize) -> crate::Result<i8> {
    let mut bits = 64u32;
    loop {
        let iv = x.embed(ambient_embedding, bits)?;
        if iv.strictly_positive() {
            return Ok(1);
        }
        if iv.strictly_negative() {
            return Ok(-1);
        }
        bits *= 2;
        if bits > crate::interval::PRECISION_CAP {
            return Err(crate::Error::PrecisionCap {
                cap: crate::interval::PRECISION_CAP,
                context: "sign of a conjugated element".into(),
            });
        }
    }
}

/// Takeuchi-style arithmeticity verdict with its certificate data.
pub struct ArithmeticityVerdict {
    pub is_arithmetic: bool,
    pub r: usize,
    pub traces_checked: usize,
    pub all_traces_integral: bool,
    pub stabilized: bool,
}

/// Arithmetic iff r = 1 and all enumerated traces are algebraic integers.
pub fn takeuchi_is_arithmetic(
    scan: &TraceFieldScan,
    dim: &DimensionScan,
) -> ArithmeticityVerdict {
    // integrality is a property of the (deduplicated) trace set
    let mut distinct: Vec<&FieldElement> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for el in &scan.ball {
        let key = el.quad.canonical_psl().w;
        if seen.insert(key.clone()) {
            distinct.push(&el.quad.w);
        }
    }
    let all_integral = distinct.iter().all(|t| {
        if t.is_rational() {
            t.as_rational().unwrap().is_integer()
        } else {
            t.is_algebraic_integer()
        }
    });
    ArithmeticityVerdict {
        is_arithmetic: dim.r == 1 && all_integral,
        r: dim.r,
        traces_checked: distinct.len(),
        all_traces_integral: all_integral,
        stabilized: scan.stabilized(),
    }
}

/// Full pipeline for one signature.
pub struct GroupAnalysis {
    pub scan: TraceFieldScan,
    pub dimension: DimensionScan,
    pub verdict: ArithmeticityVerdict,
}

pub fn analyze(group: &TriangleGroup, word_cap: usize) -> crate::Result<GroupAnalysis> {
    let scan = invariant_trace_field(group, word_cap)?;
    let dimension = arithmetic_dimension(group, &scan)?;
    let verdict = takeuchi_is_arithmetic(&scan, &dimension);
    Ok(GroupAnalysis { scan, dimension, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::Signature;

    fn group(sig: &str) -> TriangleGroup {
        TriangleGroup::new(Signature::parse(sig).unwrap(), 128).unwrap()
    }

    #[test]
    fn ball_respects_torsion() {
        let g = group("2,3,7");
        let ball = word_ball(&g, 6);
        // distinct elements, far fewer than 4^6 words
        assert!(ball.len() > 30);
        assert!(ball.len() < 4_usize.pow(6));
        // the identity appears exactly once
        let id = g.rules().identity_quad().canonical_psl();
        let count = ball
            .iter()
            .filter(|e| e.quad.canonical_psl() == id)
            .count();
        assert_eq!(count, 1);
    }

    #[test]
    fn squares_parity_examples() {
        // (2,3,7): all relations odd or even-a: H1 tensor Z/2 trivial
        let p = SquaresParity::of(Signature::parse("2,3,7").unwrap());
        assert_eq!(p.index(), 1);
        // (2,6,10): all entries even: index 4
        let p = SquaresParity::of(Signature::parse("2,6,10").unwrap());
        assert_eq!(p.index(), 4);
        assert!(p.contains((0, 0)));
        assert!(!p.contains((1, 0)));
        // (2,5,inf): b odd kills the B coordinate
        let p = SquaresParity::of(Signature::parse("2,5,inf").unwrap());
        assert_eq!(p.index(), 2);
        assert!(p.contains((0, 1)));
        assert!(!p.contains((1, 0)));
    }

    #[test]
    fn products_of_squares_satisfy_parity() {
        for sig in ["2,3,7", "2,6,10", "2,5,inf", "2,3,inf"] {
            let g = group(sig);
            let p = SquaresParity::of(g.signature());
            let ball = word_ball(&g, 4);
            for el in &ball {
                // gamma^2 has even parities in both letters after doubling
                let mut w2 = el.word;
                for l in el.word.letters() {
                    w2 = w2.push(l).unwrap();
                }
                assert!(p.contains(w2.parity()), "square of {} in {}", el.word, sig);
            }
        }
    }

    #[test]
    fn trace_field_of_modular_like_group_is_q() {
        let g = group("2,3,inf");
        let scan = invariant_trace_field(&g, 8).unwrap();
        assert_eq!(scan.degree(), 1, "K(2,3,inf) = Q");
        assert!(scan.stabilized());
    }

    #[test]
    fn trace_field_of_hecke_5_is_golden() {
        let g = group("2,5,inf");
        let scan = invariant_trace_field(&g, 8).unwrap();
        assert_eq!(scan.degree(), 2, "K(2,5,inf) = Q(sqrt 5)");
        // lambda_5 = 2cos(pi/5) = s_4(lambda_20) lies in K
        let lam5 = g.field().two_cos_pi_multiple(4);
        assert!(scan.subfield.contains(&lam5));
    }

    #[test]
    fn trace_field_of_2_6_10_is_quadratic() {
        let g = group("2,6,10");
        let scan = invariant_trace_field(&g, 8).unwrap();
        assert_eq!(scan.degree(), 2);
        // contains sqrt5 via lambda_5 = s_12(lambda_60)
        let lam5 = g.field().two_cos_pi_multiple(12);
        assert!(scan.subfield.contains(&lam5));
    }

    #[test]
    fn dimension_anchors() {
        let cases = [("2,3,7", 1usize), ("2,6,10", 2), ("2,5,inf", 2), ("2,3,inf", 1)];
        for (sig, expected_r) in cases {
            let g = group(sig);
            let analysis = analyze(&g, 8).unwrap();
            assert_eq!(analysis.dimension.r, expected_r, "r for {sig}");
        }
    }

    #[test]
    fn arithmeticity_anchors() {
        let expectations = [("2,3,7", true), ("2,6,10", false), ("2,5,inf", false)];
        for (sig, expected) in expectations {
            let g = group(sig);
            let analysis = analyze(&g, 8).unwrap();
            assert_eq!(analysis.verdict.is_arithmetic, expected, "{sig}");
            assert!(analysis.verdict.all_traces_integral, "{sig} semi-arithmetic");
            assert!(analysis.verdict.stabilized, "{sig} scan stabilized");
        }
    }
}
