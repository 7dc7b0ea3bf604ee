//! Conjugacy classes of hyperbolic elements: closed geodesics.
//!
//! Candidates are store elements whose axis passes within rho of the base
//! point, tested through the identity
//! sinh(d(i, g*i)/2) = cosh(d(i, axis)) * sinh(l/2)
//! which is rational in the matrix entries and the trace. Same-class
//! candidates are linked by a conjugator of displacement at most
//! 2 rho + l/2 + slack, so one orbit sweep over the conjugator pool per
//! class representative decides the bucket; exhausting the pool certifies a
//! split. Classes are keyed by exact traces, merged across inversion, and
//! split into primitive classes and proper powers with exact Chebyshev
//! trace identities.

use super::{ElementStore, EnumStatus, Lookup, StoredElement, SubgroupMode};
use crate::fuchsian::arithmetic::SquaresParity;
use crate::fuchsian::traces::{letters_inverse, letters_to_string};
use crate::fuchsian::{power_trace, Classification, Letter, TriangleGroup};
use crate::interval::{F64Interval, Mat2, RealInterval};
use crate::realfield::FieldElement;
use rayon::prelude::*;
use std::cmp::Ordering;
use std::collections::HashMap;

/// A conjugacy class of hyperbolic elements: a closed geodesic.
#[derive(Clone)]
pub struct GeodesicClass {
    /// Store id of the representative (shortlex-least candidate).
    pub rep: u32,
    pub rep_word: Vec<Letter>,
    /// Exact canonical trace (nonnegative identity embedding).
    pub trace: FieldElement,
    /// Certified length interval, 2 arcosh(trace/2).
    pub length: RealInterval,
    /// Number of store candidates assigned to this class.
    pub members: usize,
    pub primitive: bool,
    /// For non-primitive classes: (root class index, power n >= 2).
    pub root: Option<(usize, u32)>,
    /// Representative word parity lies in Gamma^(2).
    pub in_squares: bool,
    /// Class of the inverses (gamma ~ gamma^{-1} identification).
    pub inverse_class: usize,
    /// Orbit id under inversion: min(class, inverse_class).
    pub unoriented_id: usize,
}

impl GeodesicClass {
    /// Oriented classes counted once, unoriented orbits counted once by
    /// their smallest member.
    pub fn is_unoriented_rep(&self, own_index: usize) -> bool {
        self.unoriented_id == own_index
    }

    pub fn length_f64(&self) -> f64 {
        crate::interval::rat_to_f64(&self.length.midpoint())
    }
}

/// The extracted classes plus run diagnostics.
pub struct ClassSet {
    pub classes: Vec<GeodesicClass>,
    /// Store id -> class index, for every candidate assigned to a kept class.
    pub assignment: HashMap<u32, usize>,
    /// Pairs the conjugator sweep could not decide at the precision cap.
    pub undecided: Vec<(String, String)>,
    /// Candidates and pool sizes, for reports.
    pub candidates: usize,
    pub pool: usize,
    /// Exact systole trace (smallest class trace), when any class exists.
    pub systole_trace: Option<FieldElement>,
}

impl ClassSet {
    pub fn systole_length_f64(&self) -> Option<f64> {
        self.classes.first().map(|c| c.length_f64())
    }

    /// Classes filtered to the subgroup mode.
    pub fn in_mode<'a>(&'a self, mode: SubgroupMode) -> impl Iterator<Item = (usize, &'a GeodesicClass)> {
        self.classes
            .iter()
            .enumerate()
            .filter(move |(_, c)| mode == SubgroupMode::Full || c.in_squares)
    }
}

/// Compare an exact hyperbolic trace against the run bound.
/// Length bounds compare l(t) with the rational bound by interval
/// refinement; the comparison terminates because equality would force
/// e^(rational/2) to be algebraic.
pub fn trace_within_bound(t: &FieldElement, bound: &super::Bound) -> crate::Result<bool> {
    match bound {
        super::Bound::Trace(tb) => Ok(t.compare_rat(tb)? != Ordering::Greater),
        super::Bound::Length(lb) => {
            let mut bits = 64u32;
            loop {
                let l = crate::fuchsian::length_from_trace(t, bits)?;
                if l.hi() < lb {
                    return Ok(true);
                }
                if l.lo() > lb {
                    return Ok(false);
                }
                bits *= 2;
                if bits > crate::interval::PRECISION_CAP {
                    return Err(crate::Error::PrecisionCap {
                        cap: crate::interval::PRECISION_CAP,
                        context: "comparing a length against the bound".into(),
                    });
                }
            }
        }
    }
}

/// Extract conjugacy classes of hyperbolic elements with length <= bound.
pub fn conjugacy_classes(
    group: &TriangleGroup,
    store: &ElementStore,
) -> crate::Result<ClassSet> {
    if let EnumStatus::WordCapReached { .. } = store.status {
        return Err(crate::Error::WordCapReached { cap: store.cfg.word_cap });
    }
    let geo = &store.cfg.geometry;
    let l_max = store.cfg.bound.length_f64();
    let required = l_max + 2.0 * geo.rho + geo.margin;
    if geo.r_cut < required - 1e-9 {
        return Err(crate::Error::IncompleteStore { required, have: geo.r_cut });
    }

    // --- candidate collection -------------------------------------------
    let cosh2_rho = {
        let c = geo.rho.cosh();
        (c * c).next_up()
    };
    let t_max_slack = store.cfg.bound.trace_f64() + 1e-6;
    let mut candidates: Vec<u32> = Vec::new();
    for (id, el) in store.elements.iter().enumerate() {
        if !el.in_ball {
            continue;
        }
        let tr = el.mat.trace().abs();
        if tr.lo > t_max_slack {
            continue; // certainly beyond the bound
        }
        if tr.hi <= 2.0 {
            continue; // certainly not hyperbolic
        }
        if tr.lo <= 2.0 {
            // straddling 2: resolve exactly (parabolic and near-parabolic)
            let quad = group.quad_of_letters(&store.letters_of(id as u32));
            if group.classify_quad(&quad)? != Classification::Hyperbolic {
                continue;
            }
        }
        if !axis_near_base(el, cosh2_rho) {
            continue;
        }
        candidates.push(id as u32);
    }

    // --- conjugator pool -------------------------------------------------
    let cosh_r_conj = geo.r_conj.cosh().next_up();
    let pool: Vec<u32> = store
        .elements
        .iter()
        .enumerate()
        .filter(|(_, el)| el.cosh_disp.lo <= cosh_r_conj)
        .map(|(id, _)| id as u32)
        .collect();

    // --- cluster by approximate trace -------------------------------------
    // same-class candidates share an exact trace, so their midpoints differ
    // by at most the sum of half-widths: split only across larger gaps
    let mut by_trace: Vec<(f64, f64, u32)> = candidates
        .iter()
        .map(|&id| {
            let tr = store.elements[id as usize].mat.trace().abs();
            (tr.mid(), tr.width(), id)
        })
        .collect();
    by_trace.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.2.cmp(&b.2)));
    let mut clusters: Vec<Vec<u32>> = Vec::new();
    for (i, &(mid, width, id)) in by_trace.iter().enumerate() {
        let split = if i == 0 {
            true
        } else {
            let (pmid, pwidth, _) = by_trace[i - 1];
            mid - pmid > (width + pwidth) + 1e-12 * mid.abs().max(1.0)
        };
        if split {
            clusters.push(Vec::new());
        }
        clusters.last_mut().unwrap().push(id);
    }

    // --- orbit sweep per cluster ------------------------------------------
    let cosh_r_cut = geo.r_cut.cosh().next_up();
    let mut class_of: HashMap<u32, usize> = HashMap::new();
    let mut reps: Vec<u32> = Vec::new();
    let mut members: Vec<usize> = Vec::new();
    let mut undecided: Vec<(String, String)> = Vec::new();
    for cluster in &clusters {
        let member_set: std::collections::HashSet<u32> = cluster.iter().copied().collect();
        for &cid in cluster {
            if class_of.contains_key(&cid) {
                continue;
            }
            let k = reps.len();
            reps.push(cid);
            members.push(1);
            class_of.insert(cid, k);
            let rep_el = &store.elements[cid as usize];
            let rep_mat = rep_el.mat.clone();
            for &gid in &pool {
                let g = &store.elements[gid as usize];
                let conj = g.mat.mul(&rep_mat).mul(&g.mat.adjugate());
                let ss = conj.sum_of_squares();
                if ss.lo / 2.0 > cosh_r_cut {
                    continue; // conjugate falls outside the store
                }
                let g_word = store.letters_of(gid);
                let rep_word = store.letters_of(cid);
                let recompute = |bits: u32| -> crate::Result<Mat2<RealInterval>> {
                    let gm = group.matrix_of_letters(&g_word, bits)?;
                    let rm = group.matrix_of_letters(&rep_word, bits)?;
                    Ok(gm.mul(&rm).mul(&gm.adjugate()))
                };
                match store.lookup_mat(group, &conj, &recompute, None)? {
                    Lookup::Found(fid) => {
                        if member_set.contains(&fid) {
                            if let std::collections::hash_map::Entry::Vacant(e) =
                                class_of.entry(fid)
                            {
                                e.insert(k);
                                members[k] += 1;
                            }
                        }
                    }
                    Lookup::NotFound => {}
                    Lookup::Undecided(pairs) => {
                        undecided.extend(pairs);
                    }
                }
            }
        }
    }

    // --- exact traces, bound filter, lengths (parallel) -------------------
    let rep_data: Vec<crate::Result<Option<(FieldElement, RealInterval)>>> = reps
        .par_iter()
        .map(|&rid| -> crate::Result<Option<(FieldElement, RealInterval)>> {
            let quad = group.quad_of_letters(&store.letters_of(rid));
            let t = quad.w.abs()?;
            debug_assert_eq!(group.classify_quad(&quad)?, Classification::Hyperbolic);
            if !trace_within_bound(&t, &store.cfg.bound)? {
                return Ok(None);
            }
            let length = crate::fuchsian::length_from_trace(&t, 96)?;
            Ok(Some((t, length)))
        })
        .collect();

    let parities = SquaresParity::of(group.signature());
    let mut kept: Vec<(usize, u32, FieldElement, RealInterval)> = Vec::new();
    for (k, data) in rep_data.into_iter().enumerate() {
        if let Some((t, l)) = data? {
            kept.push((k, reps[k], t, l));
        }
    }
    // deterministic order: by exact trace ascending, then representative id
    kept.sort_by(|a, b| {
        a.2.compare(&b.2)
            .expect("trace comparison")
            .then(a.1.cmp(&b.1))
    });
    let old_to_new: HashMap<usize, usize> =
        kept.iter().enumerate().map(|(new, (old, ..))| (*old, new)).collect();

    let mut classes: Vec<GeodesicClass> = kept
        .iter()
        .map(|(old_k, rid, t, l)| {
            let el = &store.elements[*rid as usize];
            GeodesicClass {
                rep: *rid,
                rep_word: store.letters_of(*rid),
                trace: t.clone(),
                length: l.clone(),
                members: members[*old_k],
                primitive: true,
                root: None,
                in_squares: parities.contains(el.parity),
                inverse_class: usize::MAX,
                unoriented_id: usize::MAX,
            }
        })
        .collect();

    // assignment in the new indexing, restricted to kept classes
    let assignment: HashMap<u32, usize> = class_of
        .iter()
        .filter_map(|(&id, old)| old_to_new.get(old).map(|&new| (id, new)))
        .collect();

    // --- inversion closure -------------------------------------------------
    for k in 0..classes.len() {
        if classes[k].inverse_class != usize::MAX {
            continue;
        }
        let rep = &store.elements[classes[k].rep as usize];
        let inv_mat = rep.mat.adjugate();
        let rep_letters = store.letters_of(classes[k].rep);
        let inv_word = letters_to_string(&letters_inverse(&rep_letters));
        let recompute = |bits: u32| -> crate::Result<Mat2<RealInterval>> {
            Ok(group.matrix_of_letters(&rep_letters, bits)?.adjugate())
        };
        match store.lookup_mat(group, &inv_mat, &recompute, None)? {
            Lookup::Found(fid) => match assignment.get(&fid) {
                Some(&k2) => {
                    classes[k].inverse_class = k2;
                    classes[k2].inverse_class = k;
                }
                None => {
                    undecided.push((inv_word, format!("inverse of class {k} unassigned")));
                    classes[k].inverse_class = k;
                }
            },
            Lookup::NotFound => {
                undecided.push((inv_word, format!("inverse of class {k} not in store")));
                classes[k].inverse_class = k;
            }
            Lookup::Undecided(pairs) => {
                undecided.extend(pairs);
                classes[k].inverse_class = k;
            }
        }
    }
    for k in 0..classes.len() {
        classes[k].unoriented_id = k.min(classes[k].inverse_class);
    }

    let systole_trace = classes.first().map(|c| c.trace.clone());
    Ok(ClassSet {
        classes,
        assignment,
        undecided,
        candidates: candidates.len(),
        pool: pool.len(),
        systole_trace,
    })
}

/// Axis-proximity test: keep unless certified
/// sinh^2(d/2) > cosh^2(rho) * sinh^2(l/2), both sides rational in the
/// matrix entries and the trace.
fn axis_near_base(el: &StoredElement, cosh2_rho: f64) -> bool {
    // sinh^2(d/2) = (cosh d - 1)/2
    let lhs = el
        .cosh_disp
        .sub(&F64Interval::one())
        .mul(&F64Interval::point(0.5));
    // sinh^2(l/2) = tr^2/4 - 1
    let tr = el.mat.trace();
    let rhs_core = tr
        .square()
        .mul(&F64Interval::point(0.25))
        .sub(&F64Interval::one());
    let rhs_hi = cosh2_rho * rhs_core.hi.max(0.0);
    !(lhs.lo > rhs_hi)
}

/// Split classes into primitive geodesics and proper powers. A class is
/// non-primitive iff some class delta with n * l(delta) = l(gamma)
/// satisfies delta^n conjugate into the class; the exact certificate is the
/// Chebyshev trace identity tr(delta^n) = p_n(tr delta) combined with a
/// certified store lookup of the powered representative.
pub fn primitive_split(
    group: &TriangleGroup,
    store: &ElementStore,
    set: &mut ClassSet,
) -> crate::Result<()> {
    let n_classes = set.classes.len();
    let Some(systole) = set.classes.first().map(|c| c.length_f64()) else {
        return Ok(());
    };
    for j in 0..n_classes {
        let lj = set.classes[j].length_f64();
        let n_max = ((lj / systole) + 0.5).floor() as u32;
        let mut found: Option<(usize, u32)> = None;
        'power: for n in (2..=n_max.max(1)).rev() {
            for k in 0..n_classes {
                if k == j {
                    continue;
                }
                // quick length filter before the exact trace identity
                let lk = set.classes[k].length_f64();
                if (lk * n as f64 - lj).abs() > 1e-6 * lj.max(1.0) {
                    continue;
                }
                let powered = power_trace(&set.classes[k].trace, n as u64);
                if powered != set.classes[j].trace {
                    continue;
                }
                // certified conjugacy of rep_k^n into class j
                let base = store.elements[set.classes[k].rep as usize].mat.clone();
                let mut m = Mat2::<F64Interval>::identity();
                for _ in 0..n {
                    m = m.mul(&base);
                }
                let w = set.classes[k].rep_word.clone();
                let recompute = move |bits: u32| -> crate::Result<Mat2<RealInterval>> {
                    let base = group.matrix_of_letters(&w, bits)?;
                    let mut acc = Mat2::<RealInterval>::identity();
                    for _ in 0..n {
                        acc = acc.mul(&base);
                    }
                    Ok(acc)
                };
                match store.lookup_mat(group, &m, &recompute, None)? {
                    Lookup::Found(fid) => {
                        if set.assignment.get(&fid) == Some(&j) {
                            found = Some((k, n));
                            break 'power;
                        }
                    }
                    Lookup::NotFound => {}
                    Lookup::Undecided(pairs) => set.undecided.extend(pairs),
                }
            }
        }
        if let Some((k, n)) = found {
            set.classes[j].primitive = false;
            set.classes[j].root = Some((k, n));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{enumerate_ball, naive, Bound, EnumerationConfig};
    use crate::fuchsian::Signature;
    use crate::interval::rat_of;

    fn group(sig: &str) -> TriangleGroup {
        TriangleGroup::new(Signature::parse(sig).unwrap(), 128).unwrap()
    }

    fn production(sig: &str, l: crate::poly::Rat) -> (TriangleGroup, ElementStore, ClassSet) {
        let g = group(sig);
        let cfg = EnumerationConfig::length(l);
        let store = enumerate_ball(&g, &cfg).unwrap();
        let mut set = conjugacy_classes(&g, &store).unwrap();
        primitive_split(&g, &store, &mut set).unwrap();
        (g, store, set)
    }

    #[test]
    fn classes_match_naive_oracle_modular_like() {
        let (g, _store, set) = production("2,3,inf", rat_of(7, 2));
        let naive = naive::naive_classes(&g, 10, &Bound::Length(rat_of(7, 2))).unwrap();
        assert_eq!(set.classes.len(), naive.classes.len(), "class count");
        for (c, n) in set.classes.iter().zip(&naive.classes) {
            assert_eq!(c.trace, n.trace, "trace mismatch");
            assert_eq!(c.primitive, n.primitive, "primitive flag");
        }
        let unoriented: std::collections::HashSet<usize> =
            set.classes.iter().map(|c| c.unoriented_id).collect();
        let naive_unoriented: std::collections::HashSet<usize> =
            naive.classes.iter().map(|c| c.unoriented_id).collect();
        assert_eq!(unoriented.len(), naive_unoriented.len(), "unoriented orbit count");
        assert!(set.undecided.is_empty(), "undecided pairs: {:?}", set.undecided);
    }

    #[test]
    fn classes_match_naive_oracle_hecke5() {
        let (g, _store, set) = production("2,5,inf", rat_of(7, 2));
        let naive = naive::naive_classes(&g, 9, &Bound::Length(rat_of(7, 2))).unwrap();
        assert_eq!(set.classes.len(), naive.classes.len(), "class count");
        for (c, n) in set.classes.iter().zip(&naive.classes) {
            assert_eq!(c.trace, n.trace);
            assert_eq!(c.primitive, n.primitive);
        }
        assert!(set.undecided.is_empty());
    }

    #[test]
    fn conjugate_lands_in_same_class() {
        // gamma and w gamma w^-1 share a class
        let (g, store, set) = production("2,5,inf", rat_of(4, 1));
        assert!(!set.classes.is_empty());
        let c0 = &set.classes[0];
        let rep = &store.elements[c0.rep as usize];
        for gid in [1usize, 2, 5] {
            let conj_el = &store.elements[gid];
            let m = conj_el.mat.mul(&rep.mat).mul(&conj_el.mat.adjugate());
            let gw = store.letters_of(gid as u32);
            let rw = store.letters_of(c0.rep);
            let g_ref = &g;
            let recompute = |bits: u32| -> crate::Result<Mat2<RealInterval>> {
                let gm = g_ref.matrix_of_letters(&gw, bits)?;
                let rm = g_ref.matrix_of_letters(&rw, bits)?;
                Ok(gm.mul(&rm).mul(&gm.adjugate()))
            };
            match store.lookup_mat(&g, &m, &recompute, None).unwrap() {
                crate::enumerate::Lookup::Found(fid) => {
                    if let Some(&cls) = set.assignment.get(&fid) {
                        assert_eq!(cls, 0, "conjugate must stay in class 0");
                    }
                }
                _ => {} // conjugate may exit the ball; nothing to check
            }
        }
    }

    #[test]
    fn inverse_closure_involution() {
        let (_g, _store, set) = production("2,3,inf", rat_of(4, 1));
        for (k, c) in set.classes.iter().enumerate() {
            let k2 = c.inverse_class;
            assert_eq!(set.classes[k2].inverse_class, k, "inversion is an involution");
            assert_eq!(set.classes[k2].trace, c.trace, "inverse class has equal trace");
            assert_eq!(c.unoriented_id, k.min(k2));
        }
    }

    #[test]
    fn member_partition_counts() {
        let (_g, _store, set) = production("2,5,inf", rat_of(4, 1));
        let total: usize = set.classes.iter().map(|c| c.members).sum();
        assert_eq!(total, set.assignment.len(), "every assigned candidate counted once");
    }

    #[test]
    fn squares_of_stored_elements_are_flagged_nonprimitive() {
        let (_g, _store, set) = production("2,3,inf", rat_of(5, 1));
        // for every primitive class whose doubled length fits the bound, the
        // squared class exists and links back to its root
        let mut found_any = false;
        for (j, c) in set.classes.iter().enumerate() {
            if let Some((root, n)) = c.root {
                found_any = true;
                assert!(!c.primitive);
                assert!(n >= 2);
                // exact Chebyshev trace identity
                let powered = power_trace(&set.classes[root].trace, n as u64);
                assert_eq!(powered, c.trace, "class {j}: tr(delta^n) = p_n(tr delta)");
            }
        }
        assert!(found_any, "bound 5 is large enough to contain squared classes");
    }

    #[test]
    fn refusal_on_incomplete_store() {
        let g = group("2,3,inf");
        let mut cfg = EnumerationConfig::length(rat_of(6, 1));
        cfg.r_cut_override = Some(3.0); // far below L + 2 rho
        let store = enumerate_ball(&g, &cfg).unwrap();
        match conjugacy_classes(&g, &store) {
            Err(crate::Error::IncompleteStore { required, have }) => {
                assert!(required > have);
            }
            other => panic!("expected refusal, got {:?}", other.map(|s| s.classes.len())),
        }
    }
}
