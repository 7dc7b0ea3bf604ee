//! Reference implementations for validating the enumeration pipeline.
//!
//! Everything here is deliberately independent of the production path: no
//! pruning, no f64 fingerprints, no conjugator radius. Elements are
//! deduplicated by exact canonical trace quadruples; conjugation acts on
//! quadruples through the exact letter rules; classes come from a sweep with
//! the whole word ball as the conjugator pool.
//!
//! The conjugation orbit of a quadruple over the ball is computed in one
//! pass along the BFS tree: for g = p*l,
//! g^{-1} q g = l^{-1} (p^{-1} q p) l, so each pool element costs a single
//! letter conjugation.

use super::conjugacy::trace_within_bound;
use super::Bound;
use crate::fuchsian::arithmetic::{word_ball, BallElement};
use crate::fuchsian::{Classification, TraceQuad, TriangleGroup, Word};
use crate::interval::{Mat2, RealInterval};
use crate::realfield::FieldElement;
use std::collections::HashMap;

/// One reference conjugacy class.
pub struct NaiveClass {
    pub rep_word: Word,
    pub trace: FieldElement,
    pub members: usize,
    pub primitive: bool,
    pub unoriented_id: usize,
}

pub struct NaiveClasses {
    pub classes: Vec<NaiveClass>,
}

/// All values g^{-1} q g for g in the ball, in ball order.
fn orbit_values(group: &TriangleGroup, ball: &[BallElement], q: &TraceQuad) -> Vec<TraceQuad> {
    let mut vals = Vec::with_capacity(ball.len());
    vals.push(q.clone());
    for el in &ball[1..] {
        let parent_val = &vals[el.parent as usize];
        vals.push(group.rules().conjugate(parent_val, el.letter.inverse()));
    }
    vals
}

/// Does the conjugation orbit of `q` over the ball contain `target`
/// (a canonical quadruple)?
fn orbit_contains(
    group: &TriangleGroup,
    ball: &[BallElement],
    q: &TraceQuad,
    target: &TraceQuad,
) -> bool {
    orbit_values(group, ball, q)
        .iter()
        .any(|v| v.canonical_psl() == *target)
}

/// Brute-force conjugacy classes of hyperbolic elements within the bound,
/// conjugators drawn from the full word ball.
pub fn naive_classes(
    group: &TriangleGroup,
    word_cap: usize,
    bound: &Bound,
) -> crate::Result<NaiveClasses> {
    let ball = word_ball(group, word_cap);
    let mut position: HashMap<TraceQuad, usize> = HashMap::new();
    for (i, el) in ball.iter().enumerate() {
        position.insert(el.quad.canonical_psl(), i);
    }
    // candidates: hyperbolic, within the bound
    let mut is_candidate = vec![false; ball.len()];
    for (i, el) in ball.iter().enumerate() {
        if group.classify_quad(&el.quad)? != Classification::Hyperbolic {
            continue;
        }
        let t = el.quad.w.abs()?;
        if trace_within_bound(&t, bound)? {
            is_candidate[i] = true;
        }
    }
    // conjugation sweep with the whole ball as pool
    let mut class_of: Vec<Option<usize>> = vec![None; ball.len()];
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..ball.len() {
        if !is_candidate[i] || class_of[i].is_some() {
            continue;
        }
        let k = reps.len();
        reps.push(i);
        for v in orbit_values(group, &ball, &ball[i].quad) {
            if let Some(&j) = position.get(&v.canonical_psl()) {
                if is_candidate[j] && class_of[j].is_none() {
                    class_of[j] = Some(k);
                }
            }
        }
    }
    let mut members = vec![0usize; reps.len()];
    for c in class_of.iter().flatten() {
        members[*c] += 1;
    }

    // inversion identification
    let mut unoriented: Vec<usize> = (0..reps.len()).collect();
    for (k, &rep) in reps.iter().enumerate() {
        let inv_word = ball[rep].word.inverse();
        let inv_quad = group.rules().quad_of_word(&inv_word).canonical_psl();
        let mut inv_class = position.get(&inv_quad).and_then(|&j| class_of[j]);
        if inv_class.is_none() {
            for (k2, &rep2) in reps.iter().enumerate() {
                if orbit_contains(group, &ball, &ball[rep2].quad, &inv_quad) {
                    inv_class = Some(k2);
                    break;
                }
            }
        }
        if let Some(k2) = inv_class {
            let lo = unoriented[k].min(unoriented[k2]);
            unoriented[k] = lo;
            unoriented[k2] = lo;
        }
    }

    // primitive split: exact power-trace identity plus a conjugacy check of
    // the powered representative against the class representative
    let mut traces: Vec<FieldElement> = Vec::new();
    for &rep in &reps {
        traces.push(ball[rep].quad.w.abs()?);
    }
    let mut primitive = vec![true; reps.len()];
    for j in 0..reps.len() {
        'powers: for n in 2..=16u64 {
            for k in 0..reps.len() {
                if k == j {
                    continue;
                }
                if crate::fuchsian::power_trace(&traces[k], n) != traces[j] {
                    continue;
                }
                // quad of rep_k^n by repeated extension
                let mut q = ball[reps[k]].quad.clone();
                let w = ball[reps[k]].word;
                for _ in 1..n {
                    for l in w.letters() {
                        q = group.rules().extend(&q, l);
                    }
                }
                let target = ball[reps[j]].quad.canonical_psl();
                if q.canonical_psl() == target
                    || orbit_contains(group, &ball, &q, &target)
                {
                    primitive[j] = false;
                    break 'powers;
                }
            }
        }
    }

    let mut classes: Vec<NaiveClass> = (0..reps.len())
        .map(|k| NaiveClass {
            rep_word: ball[reps[k]].word,
            trace: traces[k].clone(),
            members: members[k],
            primitive: primitive[k],
            unoriented_id: unoriented[k],
        })
        .collect();
    // deterministic order: by trace, then representative word length
    classes.sort_by(|a, b| {
        a.trace
            .compare(&b.trace)
            .expect("trace comparison")
            .then(a.rep_word.len().cmp(&b.rep_word.len()))
    });
    Ok(NaiveClasses { classes })
}

/// Count distinct PSL elements among all words of length <= cap by
/// high-precision interval matrices alone (no quadruples, no fingerprints).
pub fn brute_force_element_count(group: &TriangleGroup, cap: usize, bits: u32) -> crate::Result<usize> {
    let mut words = vec![Word::empty()];
    let mut frontier = vec![Word::empty()];
    for _ in 0..cap {
        let mut next = Vec::new();
        for w in &frontier {
            for l in crate::fuchsian::Letter::ALL {
                if let Some(w2) = w.push(l) {
                    next.push(w2);
                    words.push(w2);
                }
            }
        }
        frontier = next;
    }
    let mats: Vec<Mat2<RealInterval>> = words
        .iter()
        .map(|w| group.matrix_of_word(w, bits))
        .collect::<crate::Result<_>>()?;
    let mut distinct: Vec<usize> = Vec::new();
    'outer: for i in 0..mats.len() {
        for &j in &distinct {
            let same_plus = mats[i]
                .entries()
                .iter()
                .zip(mats[j].entries())
                .all(|(a, b)| a.intersects(b));
            let same_minus = mats[i]
                .entries()
                .iter()
                .zip(mats[j].entries())
                .all(|(a, b)| a.intersects(&b.neg()));
            if same_plus || same_minus {
                continue 'outer;
            }
        }
        distinct.push(i);
    }
    Ok(distinct.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::Signature;

    fn group(sig: &str) -> TriangleGroup {
        TriangleGroup::new(Signature::parse(sig).unwrap(), 128).unwrap()
    }

    #[test]
    fn brute_force_matches_exact_ball() {
        // the spec-level micro oracle: all words of length <= 2
        let g = group("2,3,inf");
        let count = brute_force_element_count(&g, 2, 160).unwrap();
        let exact = word_ball(&g, 2).len();
        assert_eq!(count, exact);
    }

    #[test]
    fn orbit_values_match_direct_conjugation() {
        let g = group("2,5,inf");
        let ball = word_ball(&g, 5);
        let q = g.rules().quad_of_word(&Word::parse("BBA").unwrap());
        let vals = orbit_values(&g, &ball, &q);
        for (el, v) in ball.iter().zip(&vals) {
            // reference: quad of the concatenated word g^{-1} w g
            let mut full = el.word.inverse();
            for l in Word::parse("BBA").unwrap().letters() {
                full = full.push(l).unwrap();
            }
            for l in el.word.letters() {
                full = full.push(l).unwrap();
            }
            let expected = g.rules().quad_of_word(&full);
            assert_eq!(*v, expected, "orbit value at {}", el.word);
        }
    }

    #[test]
    fn small_naive_classes_hecke() {
        let g = group("2,5,inf");
        let bound = Bound::Length(crate::interval::rat_of(4, 1));
        let nc = naive_classes(&g, 8, &bound).unwrap();
        assert!(!nc.classes.is_empty());
        for c in &nc.classes {
            assert!(c.members > 0);
        }
        // the shortest class is primitive
        assert!(nc.classes[0].primitive);
    }
}
