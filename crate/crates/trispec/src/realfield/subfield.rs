//! Subfields of an ambient field presented as Q-subalgebras.
//!
//! A finite-dimensional Q-subalgebra of a field is a subfield, so the span of
//! a generating set closed under multiplication is exactly the subfield the
//! generators generate. The basis is kept in reduced row-echelon form over
//! the ambient power basis; a primitive element and its minimal polynomial
//! present the subfield abstractly and induce the map from ambient
//! embeddings onto subfield embeddings.

use super::{det_rat, FieldDescriptor, FieldElement, FieldKind};
use crate::interval::RealInterval;
use crate::poly::{Rat, ZPoly};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::sync::Arc;

/// A subfield of an ambient [`FieldDescriptor`], as an RREF basis of its
/// underlying Q-vector space plus the integral generators that produced it.
pub struct Subfield {
    ambient: Arc<FieldDescriptor>,
    /// RREF rows over the ambient power basis; first row spans Q.
    basis: Vec<Vec<Rat>>,
    pivots: Vec<usize>,
    /// Raw generating elements (kept for primitive-element search).
    gens: Vec<FieldElement>,
}

impl Subfield {
    /// The subfield generated by `gens` (always contains Q).
    pub fn generate(ambient: &Arc<FieldDescriptor>, gens: &[FieldElement]) -> Subfield {
        let mut sf = Subfield {
            ambient: Arc::clone(ambient),
            basis: Vec::new(),
            pivots: Vec::new(),
            gens: Vec::new(),
        };
        sf.insert(&ambient.one());
        for g in gens {
            sf.add_generator(g);
        }
        sf
    }

    /// Add a generator and re-close under multiplication. Returns true if
    /// the subfield grew.
    pub fn add_generator(&mut self, g: &FieldElement) -> bool {
        if self.contains(g) {
            return false;
        }
        self.gens.push(g.clone());
        self.insert(g);
        self.close();
        true
    }

    /// Close the span under multiplication by the generators.
    fn close(&mut self) {
        loop {
            let mut grew = false;
            let basis_els: Vec<FieldElement> = self
                .basis
                .iter()
                .map(|row| self.ambient.element_from_coeffs(row.clone()))
                .collect();
            for g in self.gens.clone() {
                for b in &basis_els {
                    let prod = b.checked_mul(&g).unwrap();
                    if !self.contains(&prod) {
                        self.insert(&prod);
                        grew = true;
                    }
                }
            }
            if !grew {
                return;
            }
        }
    }

    /// Row-reduce `x` against the basis; returns the residual vector.
    fn residual(&self, x: &FieldElement) -> Vec<Rat> {
        let mut v = x.coeffs().to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for (j, r) in row.iter().enumerate() {
                    let delta = &f * r;
                    v[j] -= delta;
                }
            }
        }
        v
    }

    fn insert(&mut self, x: &FieldElement) {
        let mut v = self.residual(x);
        let Some(p) = v.iter().position(|c| !c.is_zero()) else { return };
        let pv = v[p].clone();
        for c in v.iter_mut() {
            *c = &*c / &pv;
        }
        // eliminate the new pivot from existing rows
        for (row, _) in self.basis.iter_mut().zip(&self.pivots) {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for (j, r) in v.iter().enumerate() {
                    let delta = &f * r;
                    row[j] -= delta;
                }
            }
        }
        // keep rows ordered by pivot
        let at = self.pivots.iter().position(|&q| q > p).unwrap_or(self.pivots.len());
        self.basis.insert(at, v);
        self.pivots.insert(at, p);
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> &Arc<FieldDescriptor> {
        &self.ambient
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        self.residual(x).iter().all(|c| c.is_zero())
    }

    /// Coordinates of `x` in the RREF basis, if contained.
    pub fn coords(&self, x: &FieldElement) -> Option<Vec<Rat>> {
        if !self.contains(x) {
            return None;
        }
        // because the basis is RREF, coordinates are read off pivot columns
        // of the running reduction
        let mut v = x.coeffs().to_vec();
        let mut out = vec![Rat::zero(); self.dim()];
        for (i, (row, &p)) in self.basis.iter().zip(&self.pivots).enumerate() {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for (j, r) in row.iter().enumerate() {
                    let delta = &f * r;
                    v[j] -= delta;
                }
                out[i] = f;
            }
        }
        Some(out)
    }

    /// Exact norm of `x` from this subfield down to Q: determinant of
    /// multiplication by `x` on the subfield basis. `x` must be contained.
    pub fn norm(&self, x: &FieldElement) -> Option<Rat> {
        let k = self.dim();
        let mut cols = Vec::with_capacity(k);
        for row in &self.basis {
            let b = self.ambient.element_from_coeffs(row.clone());
            let prod = b.checked_mul(x).unwrap();
            cols.push(self.coords(&prod)?);
        }
        // cols[j] = coords of x * basis_j; determinant of the transpose
        let m: Vec<Vec<Rat>> = (0..k)
            .map(|i| (0..k).map(|j| cols[j][i].clone()).collect())
            .collect();
        Some(det_rat(m))
    }

    /// A primitive element: an integral combination of the generators whose
    /// powers span the subfield.
    pub fn primitive_element(&self) -> FieldElement {
        let k = self.dim();
        if k == 1 {
            return self.ambient.one();
        }
        let mut candidates: Vec<FieldElement> = self.gens.clone();
        // deterministic small integer combinations of the generators
        for spread in 1..=8i64 {
            let mut combo = self.ambient.zero();
            for (i, g) in self.gens.iter().enumerate() {
                let c = Rat::from_integer(BigInt::from(1 + (i as i64) * spread));
                combo = combo.checked_add(&g.scale(&c)).unwrap();
            }
            candidates.push(combo);
        }
        for theta in candidates {
            if self.power_rank(&theta) == k {
                return theta;
            }
        }
        panic!("no primitive element found among generator combinations");
    }

    fn power_rank(&self, theta: &FieldElement) -> usize {
        let mut probe = Subfield {
            ambient: Arc::clone(&self.ambient),
            basis: Vec::new(),
            pivots: Vec::new(),
            gens: Vec::new(),
        };
        probe.insert(&self.ambient.one());
        let mut cur = theta.clone();
        for _ in 0..self.dim() {
            probe.insert(&cur);
            cur = cur.checked_mul(theta).unwrap();
        }
        probe.dim()
    }

    /// Present the subfield abstractly: a descriptor built from the minimal
    /// polynomial of a primitive element, together with the map sending each
    /// ambient embedding index to the induced subfield embedding index.
    pub fn to_descriptor(&self) -> crate::Result<SubfieldPresentation> {
        let theta = self.primitive_element();
        let mp_rat = theta.min_poly_rational();
        if mp_rat.len() - 1 != self.dim() {
            return Err(crate::Error::AmbientContainment(
                "primitive element degree does not match subfield dimension".into(),
            ));
        }
        if !mp_rat.iter().all(|c| c.is_integer()) {
            return Err(crate::Error::AmbientContainment(
                "primitive element is not an algebraic integer".into(),
            ));
        }
        let mp = ZPoly::new(mp_rat.iter().map(|c| c.numer().clone()).collect());
        let locator = theta.embed_id(64)?;
        let desc = FieldDescriptor::from_min_poly(mp, &locator, FieldKind::Derived);
        // induced map: ambient sigma_i restricted to the subfield is the
        // subfield embedding whose root interval contains sigma_i(theta)
        let ambient_deg = self.ambient.degree().max(1);
        let mut induced = Vec::with_capacity(ambient_deg);
        for i in 0..ambient_deg {
            let mut bits = 64u32;
            let idx = loop {
                let enc = theta.embed(i, bits)?;
                let hits: Vec<usize> = (0..desc.degree().max(1))
                    .filter(|&j| {
                        let (lo, hi) = desc.root_interval(j);
                        !(enc.hi() < &lo || enc.lo() > &hi)
                    })
                    .collect();
                if hits.len() == 1 {
                    break hits[0];
                }
                // refine subfield roots and the enclosure together
                for j in 0..desc.degree().max(1) {
                    desc.refine_root(j, bits)?;
                }
                bits *= 2;
                if bits > crate::interval::PRECISION_CAP {
                    return Err(crate::Error::PrecisionCap {
                        cap: crate::interval::PRECISION_CAP,
                        context: "matching ambient embedding to subfield root".into(),
                    });
                }
            };
            induced.push(idx);
        }
        Ok(SubfieldPresentation { descriptor: desc, theta, induced_embedding: induced })
    }

    /// Basis rows as ambient elements (for reporting).
    pub fn basis_elements(&self) -> Vec<FieldElement> {
        self.basis
            .iter()
            .map(|row| self.ambient.element_from_coeffs(row.clone()))
            .collect()
    }
}

/// Abstract presentation of a subfield.
pub struct SubfieldPresentation {
    pub descriptor: Arc<FieldDescriptor>,
    /// Primitive element, as an ambient field element.
    pub theta: FieldElement,
    /// For each ambient embedding index, the subfield embedding it induces.
    pub induced_embedding: Vec<usize>,
}

impl SubfieldPresentation {
    /// Ambient embedding indices inducing each subfield embedding, one
    /// representative per subfield embedding.
    pub fn section(&self) -> Vec<usize> {
        let k = self.descriptor.degree().max(1);
        let mut reps = vec![usize::MAX; k];
        for (amb, &sub) in self.induced_embedding.iter().enumerate() {
            if reps[sub] == usize::MAX {
                reps[sub] = amb;
            }
        }
        reps
    }

    /// Identity embedding locator interval for a contained ambient element
    /// under subfield embedding `j`, evaluated through a representative
    /// ambient embedding.
    pub fn embed_via_ambient(
        &self,
        x: &FieldElement,
        j: usize,
        bits: u32,
    ) -> crate::Result<RealInterval> {
        let reps = self.section();
        x.embed(reps[j], bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::rat_of;

    #[test]
    fn span_of_rationals_is_dim_one() {
        let f = FieldDescriptor::new(7);
        let sf = Subfield::generate(&f, &[f.from_int(3), f.from_rat(rat_of(5, 2))]);
        assert_eq!(sf.dim(), 1);
        assert!(sf.contains(&f.from_rat(rat_of(-11, 13))));
        assert!(!sf.contains(&f.generator()));
    }

    #[test]
    fn golden_subfield_of_lambda_20() {
        // lambda_20 has degree 8; 2cos(pi/5) = s_4(lambda_20) generates Q(sqrt 5)
        let f = FieldDescriptor::new(20);
        assert_eq!(f.degree(), 8);
        let lam5 = f.two_cos_pi_multiple(4);
        let sf = Subfield::generate(&f, &[lam5.clone()]);
        assert_eq!(sf.dim(), 2);
        assert!(sf.contains(&lam5.checked_mul(&lam5).unwrap()));
        // sqrt5 = 2*lambda5 - 1
        let sqrt5 = lam5.scale(&rat_of(2, 1)).checked_sub(&f.one()).unwrap();
        assert!(sf.contains(&sqrt5));
        assert_eq!(
            sqrt5.checked_mul(&sqrt5).unwrap(),
            f.from_int(5),
            "(2 lambda_5 - 1)^2 = 5"
        );
        // norm over the subfield: N(lambda_5) = -1 in Q(sqrt5)
        assert_eq!(sf.norm(&lam5).unwrap(), rat_of(-1, 1));

        let pres = sf.to_descriptor().unwrap();
        assert_eq!(pres.descriptor.degree(), 2);
        assert_eq!(pres.induced_embedding.len(), 8);
        // both subfield embeddings are induced by some ambient embedding
        let mut seen = pres.induced_embedding.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen, vec![0, 1]);
    }

    #[test]
    fn primitive_element_of_composite() {
        // Q(sqrt2, sqrt3) inside Q(2cos(pi/12)): degree 4
        let f = FieldDescriptor::new(12);
        assert_eq!(f.degree(), 4);
        let two_cos_pi_6 = f.two_cos_pi_multiple(2); // sqrt 3
        let two_cos_pi_4 = f.two_cos_pi_multiple(3); // sqrt 2
        let sf = Subfield::generate(&f, &[two_cos_pi_6, two_cos_pi_4]);
        assert_eq!(sf.dim(), 4);
        let pres = sf.to_descriptor().unwrap();
        assert_eq!(pres.descriptor.degree(), 4);
    }
}
